use fusioncat::fusionring::{kac_peterson, verlinde_all};
use fusioncat::invariants::{search_type_i_invariant, ConformalEmbedding};
use fusioncat::liedata::AlgebraKind;
use fusioncat::scalars::{Precision, ToleranceProfile};
use fusioncat::splitting::{build_instance, solve};
use fusioncat::symmetries::{component_analysis, quantum_symmetry_generators, solve_intertwining};
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
        let fam = solve(&inst, Some((inv.r_w(), inv.r_o()))).unwrap();
        let t = Instant::now();
        match solve_intertwining(&fam, &ring, &inv.m) {
            Ok(gens) => {
                let graph = component_analysis(&gens);
                let probe = quantum_symmetry_generators(&gens);
                let sizes: Vec<(usize, usize)> = graph
                    .components
                    .iter()
                    .zip(&graph.kinds)
                    .map(|(c, &k)| (c.len(), k))
                    .collect();
                println!(
                    "{alg}@{k}: completions {} ext {} comps {:?} ambi {} blocks {:?} alt {} [{:?}]",
                    fusioncat::symmetries::COMPLETIONS.swap(0, std::sync::atomic::Ordering::Relaxed),
                    fusioncat::symmetries::EXT_CALLS.swap(0, std::sync::atomic::Ordering::Relaxed),
                    sizes,
                    graph.ambichiral.len(),
                    probe.block_dims,
                    gens.alternates,
                    t.elapsed()
                );
            }
            Err(e) => println!("{alg}@{k}: ERR {e} [{:?}]", t.elapsed()),
        }
    }
}
