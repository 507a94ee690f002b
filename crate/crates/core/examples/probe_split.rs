use fusioncat::fusionring::{kac_peterson, verlinde_all};
use fusioncat::invariants::{counting_data, search_type_i_invariant, ConformalEmbedding};
use fusioncat::liedata::AlgebraKind;
use fusioncat::scalars::{Precision, ToleranceProfile};
use fusioncat::splitting::{build_instance, solve};
use std::time::Instant;

fn main() {
    let prec = Precision::decimal(80);
    let tol = ToleranceProfile::default();
    let (alg, k) = (AlgebraKind::B2, 12);
    let t0 = Instant::now();
    let md = kac_peterson(alg, k, prec, &tol).unwrap();
    println!("kac_peterson [{:?}]", t0.elapsed());
    let t1 = Instant::now();
    let ring = verlinde_all(&md, prec, &tol).unwrap();
    println!("verlinde_all [{:?}]", t1.elapsed());
    let t2 = Instant::now();
    let emb = ConformalEmbedding::get(alg, k).unwrap();
    let inv = search_type_i_invariant(&ring, &emb, 2, prec, &tol).unwrap();
    let (re, ro, rw, _, _) = counting_data(&inv, &ring, prec);
    println!("invariant: r_E={re} r_O={ro} r_W={rw} [{:?}]", t2.elapsed());
    println!("Z = {}", inv.z_string(&ring.basis));
    let t3 = Instant::now();
    let inst = build_instance(&ring.n, &inv.m);
    println!("instance: {} distinct norms [{:?}]", inst.norm_values().len(), t3.elapsed());
    let t4 = Instant::now();
    let fam = solve(&inst, Some((inv.r_w(), inv.r_o()))).unwrap();
    println!("family: {} distinct / {} total [{:?}]", fam.r_w(), fam.r_o(), t4.elapsed());
    let sched: Vec<(i64, usize)> = fam.schedule().into_iter().map(|(n, v)| (n, v.len())).collect();
    println!("schedule (norm, #new): {:?}", sched);
    let (d, db) = ring.block_dims();
    println!("ambient d_B = {}", db);
    println!("first d_n: {:?}", &d[..6]);
}
