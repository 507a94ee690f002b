use fusioncat::fusionring::{kac_peterson, verlinde_all};
use fusioncat::invariants::{search_type_i_invariant, ConformalEmbedding};
use fusioncat::liedata::AlgebraKind;
use fusioncat::scalars::{Precision, ToleranceProfile};
use fusioncat::splitting::{build_instance, solve};
use fusioncat::symmetries::solve_intertwining;

fn main() {
    let prec = Precision::decimal(60);
    let tol = ToleranceProfile::new(-25, -25);
    let md = kac_peterson(AlgebraKind::B2, 2, prec, &tol).unwrap();
    let ring = verlinde_all(&md, prec, &tol).unwrap();
    let emb = ConformalEmbedding::get(AlgebraKind::B2, 2).unwrap();
    let inv = search_type_i_invariant(&ring, &emb, 2, prec, &tol).unwrap();
    let inst = build_instance(&ring.n, &inv.m);
    let fam = solve(&inst, Some((inv.r_w(), inv.r_o()))).unwrap();
    println!("classes: {:?}", fam.symmetry_order());
    let g = solve_intertwining(&fam, &ring, &inv.m).unwrap();
    println!("alternates {}", g.alternates);
}
