use fusioncat::fusionring::{kac_peterson, verlinde_all};
use fusioncat::invariants::{search_type_i_invariant, ConformalEmbedding};
use fusioncat::liedata::AlgebraKind;
use fusioncat::scalars::{Precision, ToleranceProfile};
use fusioncat::splitting::{build_instance, solve};
use std::time::Instant;

fn main() {
    let prec = Precision::decimal(80);
    let tol = ToleranceProfile::default();
    for (alg, k) in [
        (AlgebraKind::B2, 2),
        (AlgebraKind::B2, 3),
        (AlgebraKind::G2, 3),
        (AlgebraKind::G2, 4),
        (AlgebraKind::B2, 7),
    ] {
        let md = kac_peterson(alg, k, prec, &tol).unwrap();
        let ring = verlinde_all(&md, prec, &tol).unwrap();
        let emb = ConformalEmbedding::get(alg, k).unwrap();
        let inv = search_type_i_invariant(&ring, &emb, 2, prec, &tol).unwrap();
        let inst = build_instance(&ring.n, &inv.m);
        let t = Instant::now();
        match solve(&inst, Some((inv.r_w(), inv.r_o()))) {
            Ok(fam) => {
                let sched: Vec<(i64, Vec<i64>)> = fam.schedule().into_iter().collect();
                println!(
                    "{alg}@{k}: {}/{} [{:?}] schedule {:?}",
                    fam.r_w(),
                    fam.r_o(),
                    t.elapsed(),
                    sched
                );
            }
            Err(e) => println!("{alg}@{k}: FAILED {e}"),
        }
    }
}
