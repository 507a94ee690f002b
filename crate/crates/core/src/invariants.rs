//! Type-I modular invariants of the six conformal embeddings, found by
//! constrained search, and the counting data read off them.
//!
//! The search enumerates candidate modular blocks per congruence class of
//! conformal weights. Every block of a type-I invariant coming from one of
//! these embeddings carries the same quantum mass `sum_n b_n qdim(n) =
//! |A_k| / |E_k| = sqrt(|A_k| / |J|)`, which is computable before any block
//! is known; that turns the enumeration into a bounded knapsack per class.

use rug::Float;

use crate::fusionring::FusionRing;
use crate::intmat::IntMat;
use crate::liedata::{
    central_charge, conformal_weight_mod1, AlgebraKind, Level1TargetData, TargetKind, Weight,
};
use crate::rat::{mod1, rat, Rat};
use crate::scalars::{Precision, ToleranceProfile};

#[derive(Debug, thiserror::Error)]
pub enum InvariantError {
    #[error("no type-I invariant found for {alg} level {level} with coefficient cap {cap}")]
    NoInvariantFound { alg: AlgebraKind, level: i64, cap: i64 },
    #[error("{count} distinct invariants survive the constraints; selection left to the caller")]
    MultipleInvariantsFound { count: usize, candidates: Vec<ModularInvariant> },
}

/// One of the six registered conformal embeddings (G, k) in (K, 1).
#[derive(Clone, Debug)]
pub struct ConformalEmbedding {
    pub source: (AlgebraKind, i64),
    pub target: Level1TargetData,
    pub dynkin_index: i64,
}

impl ConformalEmbedding {
    pub fn get(alg: AlgebraKind, k: i64) -> Option<ConformalEmbedding> {
        let target = match (alg, k) {
            (AlgebraKind::B2, 2) => TargetKind::A4,
            (AlgebraKind::B2, 3) => TargetKind::D5,
            (AlgebraKind::B2, 7) => TargetKind::D7,
            (AlgebraKind::B2, 12) => TargetKind::E8,
            (AlgebraKind::G2, 3) => TargetKind::E6,
            (AlgebraKind::G2, 4) => TargetKind::D7,
            _ => return None,
        };
        let target = Level1TargetData::get(target);
        let emb = ConformalEmbedding {
            source: (alg, k),
            target,
            dynkin_index: k,
        };
        // conformal criterion, exact rational equality
        let desc = crate::liedata::AlgebraDescriptor::get(alg);
        let c_src = central_charge(desc, k);
        let c_tgt = rat(emb.target.dimension, emb.target.dual_coxeter + 1);
        assert_eq!(c_src, c_tgt, "central charges must match");
        Some(emb)
    }

    pub fn registered() -> Vec<ConformalEmbedding> {
        [
            (AlgebraKind::B2, 2),
            (AlgebraKind::B2, 3),
            (AlgebraKind::B2, 7),
            (AlgebraKind::B2, 12),
            (AlgebraKind::G2, 3),
            (AlgebraKind::G2, 4),
        ]
        .into_iter()
        .map(|(a, k)| ConformalEmbedding::get(a, k).unwrap())
        .collect()
    }
}

/// A nonnegative integer matrix commuting with S and T, in block form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModularInvariant {
    pub m: IntMat,
    /// Block vectors over the weight basis, unit block first.
    pub blocks: Vec<Vec<i64>>,
    /// Diagonal support with multiplicity: (basis index, multiplicity).
    pub exponents: Vec<(usize, i64)>,
    /// The unit block, as a multiset of basis indices with multiplicity.
    pub frobenius_block: Vec<(usize, i64)>,
}

impl ModularInvariant {
    pub fn from_blocks(r: usize, blocks: Vec<Vec<i64>>) -> ModularInvariant {
        let mut m = IntMat::zeros(r, r);
        for b in &blocks {
            for (i, &bi) in b.iter().enumerate() {
                if bi == 0 {
                    continue;
                }
                for (j, &bj) in b.iter().enumerate() {
                    if bj != 0 {
                        m[(i, j)] += bi * bj;
                    }
                }
            }
        }
        let exponents = (0..r).filter(|&i| m[(i, i)] != 0).map(|i| (i, m[(i, i)])).collect();
        let frobenius_block = blocks[0]
            .iter()
            .enumerate()
            .filter(|&(_, &v)| v != 0)
            .map(|(i, &v)| (i, v))
            .collect();
        ModularInvariant {
            m,
            blocks,
            exponents,
            frobenius_block,
        }
    }

    pub fn r_e(&self) -> i64 {
        self.m.trace()
    }

    pub fn r_o(&self) -> i64 {
        self.m.matmul(&self.m.transpose()).trace()
    }

    pub fn r_w(&self) -> usize {
        self.m.count_nonzero()
    }

    /// Partition function in the usual sum-of-squares notation.
    pub fn z_string(&self, basis: &crate::fusionring::WeightBasis) -> String {
        let mut groups: Vec<(Vec<i64>, usize)> = Vec::new();
        for b in &self.blocks {
            if let Some(g) = groups.iter_mut().find(|(v, _)| v == b) {
                g.1 += 1;
            } else {
                groups.push((b.clone(), 1));
            }
        }
        let term = |b: &[i64]| -> String {
            let parts: Vec<String> = b
                .iter()
                .enumerate()
                .filter(|&(_, &v)| v != 0)
                .map(|(i, &v)| {
                    let w = basis.weights[i];
                    if v == 1 {
                        format!("{w}")
                    } else {
                        format!("{v} {w}")
                    }
                })
                .collect();
            parts.join(" + ")
        };
        groups
            .iter()
            .map(|(b, mult)| {
                let inner = term(b);
                let single = b.iter().filter(|&&v| v != 0).count() == 1 && !inner.contains(' ');
                let body = if single { inner } else { format!("({inner})") };
                if *mult == 1 {
                    format!("{body}^2")
                } else {
                    format!("{mult} {body}^2")
                }
            })
            .collect::<Vec<_>>()
            .join(" + ")
    }
}

/// Quantum cardinalities attached to an invariant.
#[derive(Clone, Debug)]
pub struct DimensionLedger {
    pub ambient_dim: Float,
    pub frobenius_dim: Float,
    pub subgroup_dim: Float,
    pub ambichiral_dim: Float,
    /// residuals of the closure identities |F| |E| = |A| and |J| |A| = |E|^2
    pub closure_residual: Float,
}

pub fn dimension_ledger(ring: &FusionRing, inv: &ModularInvariant, prec: Precision) -> DimensionLedger {
    let ambient = ring.global_dim.clone();
    let mut frob = Float::new(prec.bits());
    for &(i, mult) in &inv.frobenius_block {
        frob += ring.qdims[i].clone() * mult;
    }
    let subgroup = ambient.clone() / &frob;
    let ambi = subgroup.clone().square() / &ambient;
    let res1: Float = (frob.clone() * &subgroup - &ambient).abs();
    let res2: Float = (ambi.clone() * &ambient - subgroup.clone().square()).abs();
    let closure_residual = if res1 > res2 { res1 } else { res2 };
    DimensionLedger {
        ambient_dim: ambient,
        frobenius_dim: frob,
        subgroup_dim: subgroup,
        ambichiral_dim: ambi,
        closure_residual,
    }
}

/// Search for the type-I invariant of a conformal embedding.
///
/// Block j is supported on weights with h(lambda) = h_j (mod 1), carries
/// quantum mass sqrt(|A_k|/|J|), has coefficients bounded by `cap`, and the
/// unit block contains the unit with coefficient 1. Among all candidate
/// block systems, those whose assembled M commutes with S survive.
pub fn search_type_i_invariant(
    ring: &FusionRing,
    emb: &ConformalEmbedding,
    cap: i64,
    prec: Precision,
    tol: &ToleranceProfile,
) -> Result<ModularInvariant, InvariantError> {
    let r = ring.rank();
    let desc = ring.basis.descriptor();
    let k = ring.basis.k;
    // per-block quantum mass |F| = sqrt(|A|/|J|)
    let mass = (ring.global_dim.clone() / emb.target.ambichiral_dim()).sqrt();
    // knapsack tolerance: coarse, the commutation check is the fine filter
    let knap_eps = prec.pow10(-15);

    // congruence classes
    let h_of: Vec<Rat> = ring
        .basis
        .weights
        .iter()
        .map(|&w| conformal_weight_mod1(w, desc, k))
        .collect();
    let mut class_values: Vec<Rat> = emb.target.conformal_weights.iter().map(mod1_ref).collect();
    class_values.dedup();
    // candidates per distinct class value
    let mut class_candidates: Vec<(Rat, Vec<Vec<i64>>)> = Vec::new();
    for &hj in &class_values {
        if class_candidates.iter().any(|(h, _)| *h == hj) {
            continue;
        }
        let support: Vec<usize> = (0..r).filter(|&i| h_of[i] == hj).collect();
        let is_unit_class = hj == rat(0, 1);
        let mut found = Vec::new();
        let mut coeffs = vec![0i64; support.len()];
        knapsack(
            &support,
            &ring.qdims,
            &mass,
            &knap_eps,
            cap,
            is_unit_class,
            0,
            Float::new(prec.bits()),
            &mut coeffs,
            &mut found,
            r,
        );
        class_candidates.push((hj, found));
    }

    // one block per target representation; assemble and filter by [M,S]=0
    let block_choice_sets: Vec<&Vec<Vec<i64>>> = emb
        .target
        .conformal_weights
        .iter()
        .map(|h| {
            let hm = mod1(*h);
            &class_candidates.iter().find(|(v, _)| *v == hm).unwrap().1
        })
        .collect();
    let mut results: Vec<ModularInvariant> = Vec::new();
    let mut selection = vec![0usize; block_choice_sets.len()];
    assemble(&block_choice_sets, 0, &mut selection, &mut |blocks| {
        let inv = ModularInvariant::from_blocks(r, blocks);
        if inv.m[(0, 0)] == 1
            && commutes_with_s(&inv.m, ring, prec, tol)
            && !results.iter().any(|x| x.m == inv.m)
        {
            results.push(inv);
        }
    });
    match results.len() {
        0 => Err(InvariantError::NoInvariantFound {
            alg: ring.basis.alg,
            level: k,
            cap,
        }),
        1 => Ok(results.pop().unwrap()),
        n => Err(InvariantError::MultipleInvariantsFound {
            count: n,
            candidates: results,
        }),
    }
}

fn mod1_ref(h: &Rat) -> Rat {
    mod1(*h)
}

#[allow(clippy::too_many_arguments)]
fn knapsack(
    support: &[usize],
    qdims: &[Float],
    mass: &Float,
    eps: &Float,
    cap: i64,
    unit_class: bool,
    pos: usize,
    acc: Float,
    coeffs: &mut Vec<i64>,
    found: &mut Vec<Vec<i64>>,
    r: usize,
) {
    let over: Float = acc.clone() - mass;
    if over > *eps {
        return;
    }
    if pos == support.len() {
        let residual: Float = (acc - mass).abs();
        if residual <= *eps {
            let mut block = vec![0i64; r];
            for (s, &c) in support.iter().zip(coeffs.iter()) {
                block[*s] = c;
            }
            found.push(block);
        }
        return;
    }
    // unit block must contain the unit exactly once
    let range: Vec<i64> = if unit_class && support[pos] == 0 {
        vec![1]
    } else {
        (0..=cap).collect()
    };
    for c in range {
        coeffs[pos] = c;
        let next = acc.clone() + qdims[support[pos]].clone() * c;
        knapsack(support, qdims, mass, eps, cap, unit_class, pos + 1, next, coeffs, found, r);
    }
    coeffs[pos] = 0;
}

fn assemble(
    sets: &[&Vec<Vec<i64>>],
    pos: usize,
    selection: &mut Vec<usize>,
    sink: &mut impl FnMut(Vec<Vec<i64>>),
) {
    if pos == sets.len() {
        let blocks: Vec<Vec<i64>> = selection
            .iter()
            .zip(sets)
            .map(|(&i, s)| s[i].clone())
            .collect();
        sink(blocks);
        return;
    }
    // identical class values share a candidate set; avoid double-counting
    // permutations of equal blocks
    let start = if pos > 0 && std::ptr::eq(sets[pos], sets[pos - 1]) {
        selection[pos - 1]
    } else {
        0
    };
    for i in start..sets[pos].len() {
        selection[pos] = i;
        assemble(sets, pos + 1, selection, sink);
    }
}

fn commutes_with_s(m: &IntMat, ring: &FusionRing, prec: Precision, tol: &ToleranceProfile) -> bool {
    residual_s_commutator(m, ring, prec) <= tol.equality_eps(prec)
}

/// max |[S, M]| entry.
pub fn residual_s_commutator(m: &IntMat, ring: &FusionRing, prec: Precision) -> Float {
    let r = ring.rank();
    let md = &ring.md;
    let mut max = Float::new(prec.bits());
    for i in 0..r {
        for j in 0..r {
            let mut sm = Float::new(prec.bits());
            let mut ms = Float::new(prec.bits());
            for k in 0..r {
                if m[(k, j)] != 0 {
                    sm += md.s_re(i, k).clone() * m[(k, j)];
                }
                if m[(i, k)] != 0 {
                    ms += md.s_re(k, j).clone() * m[(i, k)];
                }
            }
            let d: Float = (sm - ms).abs();
            if d > max {
                max = d;
            }
        }
    }
    max
}

/// max |[T, M]| entry; T is diagonal so this reduces to per-entry phase
/// mismatches.
pub fn residual_t_commutator(m: &IntMat, ring: &FusionRing, prec: Precision) -> Float {
    let r = ring.rank();
    let md = &ring.md;
    let mut max = Float::new(prec.bits());
    for i in 0..r {
        for j in 0..r {
            if m[(i, j)] != 0 {
                let d = md.t[i].sub(&md.t[j]).modulus() * m[(i, j)];
                if d > max {
                    max = d;
                }
            }
        }
    }
    max
}

/// Verification report for a (candidate) modular invariant.
#[derive(Clone, Debug)]
pub struct InvariantReport {
    pub s_residual: Float,
    pub t_residual: Float,
    pub unit_normalized: bool,
    pub nonnegative: bool,
    /// | sum_mn qdim(m) M_mn qdim(n) - |A_k| |
    pub trig_identity_residual: Float,
    pub passed: bool,
}

pub fn verify_invariant(
    m: &IntMat,
    ring: &FusionRing,
    prec: Precision,
    tol: &ToleranceProfile,
) -> InvariantReport {
    let s_residual = residual_s_commutator(m, ring, prec);
    let t_residual = residual_t_commutator(m, ring, prec);
    let unit_normalized = m[(0, 0)] == 1;
    let nonnegative = m.is_nonneg();
    let r = ring.rank();
    let mut sum = Float::new(prec.bits());
    for i in 0..r {
        for j in 0..r {
            if m[(i, j)] != 0 {
                sum += ring.qdims[i].clone() * &ring.qdims[j] * m[(i, j)];
            }
        }
    }
    let trig_identity_residual: Float = (sum - &ring.global_dim).abs();
    let eps = tol.equality_eps(prec);
    let passed = unit_normalized
        && nonnegative
        && s_residual <= eps
        && t_residual <= eps
        && trig_identity_residual <= prec.pow10(-20);
    InvariantReport {
        s_residual,
        t_residual,
        unit_normalized,
        nonnegative,
        trig_identity_residual,
        passed,
    }
}

/// Counting data (r_E, r_O, r_W), exponents, and the dimension ledger.
pub fn counting_data(
    inv: &ModularInvariant,
    ring: &FusionRing,
    prec: Precision,
) -> (i64, i64, usize, Vec<(Weight, i64)>, DimensionLedger) {
    let exps = inv
        .exponents
        .iter()
        .map(|&(i, mult)| (ring.basis.weights[i], mult))
        .collect();
    let ledger = dimension_ledger(ring, inv, prec);
    (inv.r_e(), inv.r_o(), inv.r_w(), exps, ledger)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fusionring::{kac_peterson, verlinde_all};
    use crate::scalars::near_equal_f;

    fn setup(alg: AlgebraKind, k: i64) -> (FusionRing, Precision, ToleranceProfile) {
        let prec = Precision::decimal(60);
        let tol = ToleranceProfile::new(-25, -25);
        let md = kac_peterson(alg, k, prec, &tol).unwrap();
        (verlinde_all(&md, prec, &tol).unwrap(), prec, tol)
    }

    #[test]
    fn b2_level2_invariant_is_the_printed_one() {
        let (ring, prec, tol) = setup(AlgebraKind::B2, 2);
        let emb = ConformalEmbedding::get(AlgebraKind::B2, 2).unwrap();
        let inv = search_type_i_invariant(&ring, &emb, 2, prec, &tol).unwrap();
        // Z = ({0,0}+{2,0})^2 + 2 {0,2}^2 + 2 {1,0}^2
        // ordering: {0,0},{0,1},{1,0},{0,2},{1,1},{2,0}
        let expect = IntMat::from_rows(&[
            &[1, 0, 0, 0, 0, 1],
            &[0, 0, 0, 0, 0, 0],
            &[0, 0, 2, 0, 0, 0],
            &[0, 0, 0, 2, 0, 0],
            &[0, 0, 0, 0, 0, 0],
            &[1, 0, 0, 0, 0, 1],
        ]);
        assert_eq!(inv.m, expect);
        assert_eq!((inv.r_e(), inv.r_o(), inv.r_w()), (6, 12, 6));
        let ledger = dimension_ledger(&ring, &inv, prec);
        assert!(near_equal_f(&ledger.subgroup_dim, &prec.float(10), prec, &tol));
        assert!(near_equal_f(&ledger.ambichiral_dim, &prec.float(5), prec, &tol));
        assert!(near_equal_f(&ledger.frobenius_dim, &prec.float(2), prec, &tol));
    }

    #[test]
    fn g2_level3_invariant_matches() {
        let (ring, prec, tol) = setup(AlgebraKind::G2, 3);
        let emb = ConformalEmbedding::get(AlgebraKind::G2, 3).unwrap();
        let inv = search_type_i_invariant(&ring, &emb, 2, prec, &tol).unwrap();
        let expect = IntMat::from_rows(&[
            &[1, 0, 0, 0, 0, 1],
            &[0, 0, 0, 0, 0, 0],
            &[0, 0, 2, 0, 0, 0],
            &[0, 0, 0, 0, 0, 0],
            &[0, 0, 0, 0, 0, 0],
            &[1, 0, 0, 0, 0, 1],
        ]);
        assert_eq!(inv.m, expect);
        assert_eq!((inv.r_e(), inv.r_o(), inv.r_w()), (4, 8, 5));
        let report = verify_invariant(&inv.m, &ring, prec, &tol);
        assert!(report.passed, "{report:?}");
    }

    #[test]
    fn identity_invariant_passes() {
        let (ring, prec, tol) = setup(AlgebraKind::B2, 2);
        let report = verify_invariant(&IntMat::identity(6), &ring, prec, &tol);
        assert!(report.passed);
    }

    #[test]
    fn perturbed_invariant_fails_commutation() {
        let (ring, prec, tol) = setup(AlgebraKind::B2, 2);
        let emb = ConformalEmbedding::get(AlgebraKind::B2, 2).unwrap();
        let inv = search_type_i_invariant(&ring, &emb, 2, prec, &tol).unwrap();
        let mut broken = inv.m.clone();
        broken[(0, 1)] += 1;
        let report = verify_invariant(&broken, &ring, prec, &tol);
        assert!(!report.passed);
        assert!(report.s_residual > tol.equality_eps(prec));
    }

    #[test]
    fn z_string_rendering() {
        let (ring, prec, tol) = setup(AlgebraKind::B2, 2);
        let emb = ConformalEmbedding::get(AlgebraKind::B2, 2).unwrap();
        let inv = search_type_i_invariant(&ring, &emb, 2, prec, &tol).unwrap();
        let z = inv.z_string(&ring.basis);
        assert!(z.contains("({0,0} + {2,0})^2"), "{z}");
        assert!(z.contains("2 {0,2}^2"), "{z}");
        assert!(z.contains("2 {1,0}^2"), "{z}");
    }

    #[test]
    fn unregistered_level_has_no_embedding() {
        assert!(ConformalEmbedding::get(AlgebraKind::B2, 5).is_none());
        assert!(ConformalEmbedding::get(AlgebraKind::G2, 2).is_none());
    }
}
