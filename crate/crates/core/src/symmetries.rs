//! Chiral generators of the algebra of quantum symmetries, solved from the
//! intertwining equations, and the Ocneanu graph they span.
//!
//! For a fundamental f the left generator satisfies N_f W_x = sum_y
//! (V_f)_xy W_y, and similarly on the right with W_x N_f. Since the
//! distinct toric matrices are linearly independent, the class-level
//! coefficients are forced; what remains is distributing them over
//! duplicate toric matrices. That lift is a bounded search constrained by
//! symmetry of the generators, nonnegativity, commutation of all chiral
//! generators with each other, and extendability to a full ring
//! representation; solutions are collected up to class-preserving
//! relabeling.

use std::collections::BTreeMap;

use crate::canon;
use crate::fusionring::{extend_ring_rep, FusionRing};
use crate::intmat::{coords_in_span, rat_vec_to_ints, GramSolver, IntMat};
use crate::splitting::ToricFamily;

#[derive(Debug, thiserror::Error)]
pub enum SymError {
    #[error("class coefficients of N_f W are not nonnegative integers")]
    FractionalClassAction,
    #[error("no nonnegative integer solution to the intertwining equations")]
    NoNonnegativeSolution,
    #[error("{count} non-isomorphic chiral generator families survive")]
    AmbiguousUpToIso { count: usize },
}

/// Left and right chiral generators plus their ring-representation
/// extensions to every ambient simple object.
pub struct ChiralGenerators {
    /// basis indices of the fundamentals existing at this level
    pub fundamentals: Vec<usize>,
    pub left: Vec<IntMat>,
    pub right: Vec<IntMat>,
    pub left_all: Vec<IntMat>,
    pub right_all: Vec<IntMat>,
    /// symmetry index -> distinct toric matrix index (duplicates adjacent)
    pub symmetry_class: Vec<usize>,
    /// true when the search space was exhausted and exactly one solution
    /// survived up to class-preserving relabeling
    pub uniqueness_certified: bool,
    /// representatives of other isomorphism classes, when any survived
    pub alternates: usize,
}

/// Solve the intertwining equations for every fundamental.
pub fn solve_intertwining(
    family: &ToricFamily,
    ring: &FusionRing,
    minv: &IntMat,
) -> Result<ChiralGenerators, SymError> {
    let distinct = &family.distinct;
    let mu = &family.multiplicity;
    let nd = distinct.len();
    let r_o: i64 = mu.iter().sum();
    let r_o = r_o as usize;
    let gram = GramSolver::new(distinct);

    // class-level action of each fundamental, both sides
    let fundamentals = ring.fundamentals.clone();
    let mut class_left: Vec<Vec<Vec<i64>>> = Vec::new(); // [f][d][d']
    let mut class_right: Vec<Vec<Vec<i64>>> = Vec::new();
    for &f in &fundamentals {
        let mut cl = Vec::with_capacity(nd);
        let mut cr = Vec::with_capacity(nd);
        for w in distinct {
            let left_prod = ring.n[f].matmul(w);
            let right_prod = w.matmul(&ring.n[f]);
            let lc = coords_in_span(distinct, &gram, &left_prod)
                .and_then(|v| rat_vec_to_ints(&v))
                .ok_or(SymError::FractionalClassAction)?;
            let rc = coords_in_span(distinct, &gram, &right_prod)
                .and_then(|v| rat_vec_to_ints(&v))
                .ok_or(SymError::FractionalClassAction)?;
            if lc.iter().chain(&rc).any(|&c| c < 0) {
                return Err(SymError::FractionalClassAction);
            }
            cl.push(lc);
            cr.push(rc);
        }
        // mu_d c[d][d'] = mu_d' c[d'][d] consistency
        for d in 0..nd {
            for dp in 0..nd {
                if mu[d] * cl[d][dp] != mu[dp] * cl[dp][d]
                    || mu[d] * cr[d][dp] != mu[dp] * cr[dp][d]
                {
                    return Err(SymError::NoNonnegativeSolution);
                }
            }
        }
        class_left.push(cl);
        class_right.push(cr);
    }

    // class offsets in the symmetry ordering (duplicates adjacent)
    let mut offset = Vec::with_capacity(nd);
    let mut acc = 0usize;
    for &m in mu {
        offset.push(acc);
        acc += m as usize;
    }
    let symmetry_class = family.symmetry_order();

    // lift: fill each generator matrix class block by class block
    let nf = fundamentals.len();
    let specs: Vec<(usize, bool)> = (0..nf)
        .map(|fi| (fi, true))
        .chain((0..nf).map(|fi| (fi, false)))
        .collect();
    let mut solutions: Vec<Vec<IntMat>> = Vec::new();
    let mut work = vec![IntMat::zeros(r_o, r_o); specs.len()];
    let cap = 64;
    let ctx = LiftCtx {
        specs: &specs,
        class_left: &class_left,
        class_right: &class_right,
        mu,
        offset: &offset,
        ring,
        fundamentals: &fundamentals,
        distinct,
        symmetry_class: &symmetry_class,
        cap,
    };
    lift(&ctx, 0, &mut work, &mut solutions);
    let debug = std::env::var_os("FUSIONCAT_SYM_DEBUG").is_some();
    if debug {
        eprintln!("lift found {} raw solutions (cap {cap})", solutions.len());
    }
    if solutions.is_empty() {
        return Err(SymError::NoNonnegativeSolution);
    }
    let exhausted = solutions.len() < cap;

    // validate by extension and keep survivors
    let mut valid: Vec<(Vec<IntMat>, Vec<IntMat>, Vec<IntMat>)> = Vec::new();
    for sol in &solutions {
        let lefts: Vec<IntMat> = specs
            .iter()
            .zip(sol)
            .filter(|((_, is_left), _)| *is_left)
            .map(|(_, m)| m.clone())
            .collect();
        let rights: Vec<IntMat> = specs
            .iter()
            .zip(sol)
            .filter(|((_, is_left), _)| !*is_left)
            .map(|(_, m)| m.clone())
            .collect();
        let lmap: BTreeMap<usize, IntMat> = fundamentals
            .iter()
            .copied()
            .zip(lefts.iter().cloned())
            .collect();
        let rmap: BTreeMap<usize, IntMat> = fundamentals
            .iter()
            .copied()
            .zip(rights.iter().cloned())
            .collect();
        let left_ext = extend_ring_rep(&ring.basis, &ring.n, &lmap);
        let right_ext = extend_ring_rep(&ring.basis, &ring.n, &rmap);
        if debug {
            eprintln!(
                "  candidate: left ext {:?} right ext {:?}",
                left_ext.as_ref().err(),
                right_ext.as_ref().err()
            );
        }
        let (Ok(left_all), Ok(right_all)) = (left_ext, right_ext) else {
            continue;
        };
        // full commutation of the two extended families
        let commuting = left_all
            .iter()
            .all(|l| right_all.iter().all(|r| l.commutes_with(r)));
        // bimodule structure: row 0 of V^L_m V^R_n is the coefficient
        // vector (W_y)_mn of the toric family
        let bimodule = commuting
            && (0..left_all.len()).all(|m| {
                (0..right_all.len()).all(|n| {
                    let prod_row0: Vec<i64> = {
                        let l = &left_all[m];
                        let r = &right_all[n];
                        (0..r_o)
                            .map(|y| (0..r_o).map(|z| l[(0, z)] * r[(z, y)]).sum())
                            .collect()
                    };
                    let expect: Vec<i64> = symmetry_class
                        .iter()
                        .map(|&d| distinct[d][(m, n)])
                        .collect();
                    prod_row0 == expect
                })
            });
        if bimodule && joint_spectrum_matches(&lefts, &rights, ring, minv) {
            valid.push((sol.clone(), left_all, right_all));
        }
    }
    if valid.is_empty() {
        return Err(SymError::NoNonnegativeSolution);
    }
    // dedup up to vertex relabelings fixing the identity symmetry and the
    // edge coloring; class-preserving isomorphism is tried first (cheap),
    // then the full colored-graph isomorphism
    let mut reps: Vec<usize> = Vec::new();
    for i in 0..valid.len() {
        let novel = reps.iter().all(|&j| {
            !classed_isomorphic(&valid[i].0, &valid[j].0, &symmetry_class)
                && !canon::isomorphic(&valid[i].0, &valid[j].0, true)
        });
        if novel {
            reps.push(i);
        }
    }
    if debug && reps.len() > 1 {
        for (ri, &i) in reps.iter().enumerate() {
            eprintln!("representative {ri}:");
            for (si, m) in valid[i].0.iter().enumerate() {
                eprintln!("  spec {:?}", specs[si]);
                for row in 0..m.rows {
                    eprintln!("    {:?}", m.row(row));
                }
            }
        }
    }
    let alternates = reps.len() - 1;
    let (sol, left_all, right_all) = valid.swap_remove(reps[0]);
    let lefts: Vec<IntMat> = specs
        .iter()
        .zip(&sol)
        .filter(|((_, l), _)| *l)
        .map(|(_, m)| m.clone())
        .collect();
    let rights: Vec<IntMat> = specs
        .iter()
        .zip(&sol)
        .filter(|((_, l), _)| !*l)
        .map(|(_, m)| m.clone())
        .collect();
    Ok(ChiralGenerators {
        fundamentals,
        left: lefts,
        right: rights,
        left_all,
        right_all,
        symmetry_class,
        uniqueness_certified: exhausted && alternates == 0,
        alternates,
    })
}

pub static COMPLETIONS: std::sync::atomic::AtomicU64 = std::sync::atomic::AtomicU64::new(0);
pub static EXT_CALLS: std::sync::atomic::AtomicU64 = std::sync::atomic::AtomicU64::new(0);

/// Search context for the duplicate-class lift.
struct LiftCtx<'a> {
    specs: &'a [(usize, bool)],
    class_left: &'a [Vec<Vec<i64>>],
    class_right: &'a [Vec<Vec<i64>>],
    mu: &'a [i64],
    offset: &'a [usize],
    ring: &'a FusionRing,
    fundamentals: &'a [usize],
    distinct: &'a [IntMat],
    symmetry_class: &'a [usize],
    cap: usize,
}

impl LiftCtx<'_> {
    /// When matrix `mat_idx` closes one chiral side, extend that side to a
    /// full ring representation; failure prunes the branch early.
    fn side_extends(&self, mat_idx: usize, work: &[IntMat]) -> bool {
        let nf = self.fundamentals.len();
        let side_end = if mat_idx + 1 == nf {
            Some(0..nf)
        } else if mat_idx + 1 == 2 * nf {
            Some(nf..2 * nf)
        } else {
            None
        };
        let Some(range) = side_end else {
            return true;
        };
        let map: BTreeMap<usize, IntMat> = self
            .fundamentals
            .iter()
            .copied()
            .zip(work[range].iter().cloned())
            .collect();
        extend_ring_rep(&self.ring.basis, &self.ring.n, &map).is_ok()
    }
}

/// Fill generator matrices block by block, left side first, pruning by
/// symmetry, commutation and per-side extendability.
fn lift(ctx: &LiftCtx, mat_idx: usize, work: &mut Vec<IntMat>, out: &mut Vec<Vec<IntMat>>) {
    if out.len() >= ctx.cap {
        return;
    }
    if mat_idx == ctx.specs.len() {
        out.push(work.clone());
        return;
    }
    let (fi, is_left) = ctx.specs[mat_idx];
    let class = if is_left {
        &ctx.class_left[fi]
    } else {
        &ctx.class_right[fi]
    };
    let nd = ctx.mu.len();
    let r_o = ctx.symmetry_class.len();
    // bimodule structure at the unit pins row and column 0 exactly:
    // (V^L_f)_{0y} = (W_y)_{f,0} and (V^R_f)_{0y} = (W_y)_{0,f}
    let f = ctx.fundamentals[fi];
    let pin = |y: usize| -> i64 {
        let w = &ctx.distinct[ctx.symmetry_class[y]];
        if is_left {
            w[(f, 0)]
        } else {
            w[(0, f)]
        }
    };
    {
        let m = &mut work[mat_idx];
        for y in 0..r_o {
            let v = pin(y);
            m[(0, y)] = v;
            m[(y, 0)] = v;
        }
    }
    let mut blocks: Vec<(usize, usize)> = Vec::new();
    {
        let m = &mut work[mat_idx];
        for d in 0..nd {
            for dp in d..nd {
                let c = class[d][dp];
                if c == 0 {
                    continue;
                }
                if d == 0 || dp == 0 {
                    // already pinned; verify the class sums agree
                    let rows = ctx.mu[d] as usize;
                    let cols = ctx.mu[dp] as usize;
                    for i in 0..rows {
                        let sum: i64 = (0..cols)
                            .map(|j| m[(ctx.offset[d] + i, ctx.offset[dp] + j)])
                            .sum();
                        if sum != c {
                            // inconsistent family; no solutions on this path
                            clear_matrix(m);
                            return;
                        }
                    }
                    continue;
                }
                if ctx.mu[d] == 1 && ctx.mu[dp] == 1 {
                    m[(ctx.offset[d], ctx.offset[dp])] = c;
                    m[(ctx.offset[dp], ctx.offset[d])] = class[dp][d];
                } else {
                    blocks.push((d, dp));
                }
            }
        }
    }
    // band order: all blocks whose larger class index is D come before any
    // block reaching D+1, so rows of classes <= D complete in order and
    // commutators restricted to finished bands can prune early
    blocks.sort_by_key(|&(d, dp)| (dp.max(d), dp.min(d)));
    fill_blocks(ctx, mat_idx, class, &blocks, 0, work, out);
    clear_matrix(&mut work[mat_idx]);
}

/// Verify commutator entries of `cur` against all previous matrices for
/// vertex pairs whose classes are both complete (bands <= done).
fn band_commutes(
    ctx: &LiftCtx,
    mat_idx: usize,
    work: &[IntMat],
    done: usize,
) -> bool {
    let cur = &work[mat_idx];
    let r_o = ctx.symmetry_class.len();
    let hi = ctx.offset[done] + ctx.mu[done] as usize;
    for prev in work.iter().take(mat_idx) {
        for x in 0..hi {
            for y in 0..hi {
                // (prev cur)_{xy} = sum_z prev_{xz} cur_{yz} by symmetry of cur
                let mut pc = 0;
                let mut cp = 0;
                for z in 0..r_o {
                    pc += prev[(x, z)] * cur[(y, z)];
                    cp += cur[(x, z)] * prev[(z, y)];
                }
                if pc != cp {
                    return false;
                }
            }
        }
    }
    true
}

fn clear_matrix(m: &mut IntMat) {
    for i in 0..m.rows {
        for j in 0..m.cols {
            m[(i, j)] = 0;
        }
    }
}

fn fill_blocks(
    ctx: &LiftCtx,
    mat_idx: usize,
    class: &[Vec<i64>],
    blocks: &[(usize, usize)],
    bi: usize,
    work: &mut Vec<IntMat>,
    out: &mut Vec<Vec<IntMat>>,
) {
    if out.len() >= ctx.cap {
        return;
    }
    // a band is complete once no later block touches it
    let band_now = if bi == 0 {
        None
    } else {
        let reached = blocks[bi - 1].1.max(blocks[bi - 1].0);
        let upcoming = blocks
            .get(bi)
            .map(|&(d, dp)| dp.max(d))
            .unwrap_or(usize::MAX);
        if upcoming > reached {
            Some(reached)
        } else {
            None
        }
    };
    if let Some(done) = band_now {
        if !band_commutes(ctx, mat_idx, work, done) {
            return;
        }
    }
    if bi == blocks.len() {
        // matrix complete: symmetry, commutation with all previous, and
        // side-extendability when a chiral side closes
        COMPLETIONS.fetch_add(1, std::sync::atomic::Ordering::Relaxed);
        let cur = &work[mat_idx];
        if !cur.is_symmetric() {
            return;
        }
        for prev in work.iter().take(mat_idx) {
            if !prev.commutes_with(cur) {
                return;
            }
        }
        EXT_CALLS.fetch_add(1, std::sync::atomic::Ordering::Relaxed);
        if !ctx.side_extends(mat_idx, work) {
            return;
        }
        let mut next_work = work.clone();
        lift(ctx, mat_idx + 1, &mut next_work, out);
        return;
    }
    let (d, dp) = blocks[bi];
    let c = class[d][dp];
    let (p, q) = (ctx.mu[d] as usize, ctx.mu[dp] as usize);
    let fillings = if d == dp {
        symmetric_transport(p, c)
    } else {
        transportation(p, q, c, class[dp][d])
    };
    for b in &fillings {
        {
            let m = &mut work[mat_idx];
            for i in 0..p {
                for j in 0..q {
                    m[(ctx.offset[d] + i, ctx.offset[dp] + j)] = b[(i, j)];
                    m[(ctx.offset[dp] + j, ctx.offset[d] + i)] = b[(i, j)];
                }
            }
        }
        fill_blocks(ctx, mat_idx, class, blocks, bi + 1, work, out);
        if out.len() >= ctx.cap {
            break;
        }
    }
    let m = &mut work[mat_idx];
    for i in 0..p {
        for j in 0..q {
            m[(ctx.offset[d] + i, ctx.offset[dp] + j)] = 0;
            m[(ctx.offset[dp] + j, ctx.offset[d] + i)] = 0;
        }
    }
}

/// Nonnegative integer p x q matrices with every row summing to `row_sum`
/// and every column summing to `col_sum`.
fn transportation(p: usize, q: usize, row_sum: i64, col_sum: i64) -> Vec<IntMat> {
    if (p as i64) * row_sum != (q as i64) * col_sum {
        return Vec::new();
    }
    let mut out = Vec::new();
    let mut m = IntMat::zeros(p, q);
    let mut col_left = vec![col_sum; q];
    fn rec(
        m: &mut IntMat,
        col_left: &mut Vec<i64>,
        row: usize,
        col: usize,
        row_left: i64,
        row_sum: i64,
        out: &mut Vec<IntMat>,
    ) {
        let (p, q) = (m.rows, m.cols);
        if row == p {
            out.push(m.clone());
            return;
        }
        if col == q {
            if row_left == 0 {
                rec(m, col_left, row + 1, 0, row_sum, row_sum, out);
            }
            return;
        }
        let hi = row_left.min(col_left[col]);
        for v in 0..=hi {
            m[(row, col)] = v;
            col_left[col] -= v;
            rec(m, col_left, row, col + 1, row_left - v, row_sum, out);
            col_left[col] += v;
            m[(row, col)] = 0;
        }
    }
    rec(&mut m, &mut col_left, 0, 0, row_sum, row_sum, &mut out);
    out
}

/// Symmetric nonnegative p x p matrices with all row sums `c`.
fn symmetric_transport(p: usize, c: i64) -> Vec<IntMat> {
    let mut out = Vec::new();
    let mut m = IntMat::zeros(p, p);
    // fill the upper triangle row by row, tracking remaining row budgets
    fn rec(m: &mut IntMat, budgets: &mut Vec<i64>, row: usize, col: usize, out: &mut Vec<IntMat>) {
        let p = m.rows;
        if row == p {
            out.push(m.clone());
            return;
        }
        if col == p {
            if budgets[row] == 0 {
                rec(m, budgets, row + 1, row + 1, out);
            }
            return;
        }
        let hi = if col == row {
            budgets[row]
        } else {
            budgets[row].min(budgets[col])
        };
        for v in 0..=hi {
            m[(row, col)] = v;
            m[(col, row)] = v;
            budgets[row] -= v;
            if col != row {
                budgets[col] -= v;
            } else {
                // diagonal entries count once toward the row sum
            }
            // diagonal: m[r][r] = v consumes v from budgets[row] only once
            rec(m, budgets, row, col + 1, out);
            budgets[row] += v;
            if col != row {
                budgets[col] += v;
            }
            m[(row, col)] = 0;
            m[(col, row)] = 0;
        }
    }
    let mut budgets = vec![c; p];
    rec(&mut m, &mut budgets, 0, 0, &mut out);
    out
}

/// Isomorphism of generator tuples under permutations that fix the map
/// x -> W_x (permute only within duplicate classes) and fix vertex 0.
fn classed_isomorphic(a: &[IntMat], b: &[IntMat], classes: &[usize]) -> bool {
    let n = classes.len();
    let mut perm: Vec<Option<usize>> = vec![None; n];
    let mut used = vec![false; n];
    fn consistent(a: &[IntMat], b: &[IntMat], perm: &[Option<usize>], i: usize) -> bool {
        let pi = perm[i].unwrap();
        for (ma, mb) in a.iter().zip(b) {
            for (j, pj) in perm.iter().enumerate() {
                if let Some(pj) = pj {
                    if ma[(pi, *pj)] != mb[(i, j)] || ma[(*pj, pi)] != mb[(j, i)] {
                        return false;
                    }
                }
            }
        }
        true
    }
    fn rec(
        a: &[IntMat],
        b: &[IntMat],
        classes: &[usize],
        perm: &mut Vec<Option<usize>>,
        used: &mut Vec<bool>,
    ) -> bool {
        let n = perm.len();
        let Some(i) = (0..n).find(|&x| perm[x].is_none()) else {
            return true;
        };
        for v in 0..n {
            if used[v] || classes[v] != classes[i] {
                continue;
            }
            perm[i] = Some(v);
            used[v] = true;
            if consistent(a, b, perm, i) && rec(a, b, classes, perm, used) {
                return true;
            }
            perm[i] = None;
            used[v] = false;
        }
        false
    }
    rec(a, b, classes, &mut perm, &mut used)
}

// ---------------------------------------------------------------------------
// Ocneanu graph
// ---------------------------------------------------------------------------

/// The Ocneanu graph: chiral generator adjacency plus its component census.
pub struct OcneanuGraph {
    pub r_o: usize,
    pub fundamentals: Vec<usize>,
    pub left: Vec<IntMat>,
    pub right: Vec<IntMat>,
    /// connected components of the union of the left generators, each a
    /// sorted vertex list; the identity component first
    pub components: Vec<Vec<usize>>,
    /// iso-class id per component (0 = the identity component's class)
    pub kinds: Vec<usize>,
    pub ambichiral: Vec<usize>,
    pub symmetry_class: Vec<usize>,
}

pub fn component_analysis(gens: &ChiralGenerators) -> OcneanuGraph {
    let r_o = gens.symmetry_class.len();
    let left_comps = components_of(&gens.left, r_o);
    let right_comps = components_of(&gens.right, r_o);
    let left_id = left_comps
        .iter()
        .position(|c| c.contains(&0))
        .expect("identity symmetry exists");
    let right_id = right_comps
        .iter()
        .position(|c| c.contains(&0))
        .expect("identity symmetry exists");
    let ambichiral: Vec<usize> = left_comps[left_id]
        .iter()
        .copied()
        .filter(|v| right_comps[right_id].contains(v))
        .collect();
    // order components: identity first, then by lowest vertex
    let mut components = left_comps;
    components.swap(0, left_id);
    components[1..].sort_by_key(|c| c[0]);
    // iso-classification of components via their colored restrictions
    let restricted: Vec<Vec<IntMat>> = components
        .iter()
        .map(|c| gens.left.iter().map(|m| restrict(m, c)).collect())
        .collect();
    let mut kinds = vec![usize::MAX; components.len()];
    let mut next_kind = 0;
    for i in 0..components.len() {
        if kinds[i] != usize::MAX {
            continue;
        }
        kinds[i] = next_kind;
        for j in i + 1..components.len() {
            if kinds[j] == usize::MAX && canon::isomorphic(&restricted[i], &restricted[j], false) {
                kinds[j] = next_kind;
            }
        }
        next_kind += 1;
    }
    OcneanuGraph {
        r_o,
        fundamentals: gens.fundamentals.clone(),
        left: gens.left.clone(),
        right: gens.right.clone(),
        components,
        kinds,
        ambichiral,
        symmetry_class: gens.symmetry_class.clone(),
    }
}

pub fn restrict(m: &IntMat, vertices: &[usize]) -> IntMat {
    let n = vertices.len();
    let mut out = IntMat::zeros(n, n);
    for (i, &vi) in vertices.iter().enumerate() {
        for (j, &vj) in vertices.iter().enumerate() {
            out[(i, j)] = m[(vi, vj)];
        }
    }
    out
}

fn components_of(mats: &[IntMat], n: usize) -> Vec<Vec<usize>> {
    let mut seen = vec![false; n];
    let mut comps = Vec::new();
    for start in 0..n {
        if seen[start] {
            continue;
        }
        let mut stack = vec![start];
        seen[start] = true;
        let mut comp = vec![start];
        while let Some(v) = stack.pop() {
            for u in 0..n {
                if !seen[u] && mats.iter().any(|m| m[(v, u)] != 0 || m[(u, v)] != 0) {
                    seen[u] = true;
                    stack.push(u);
                    comp.push(u);
                }
            }
        }
        comp.sort_unstable();
        comps.push(comp);
    }
    comps
}

// ---------------------------------------------------------------------------
// Algebra probe
// ---------------------------------------------------------------------------

/// Licensing report for identifying generators, and the block structure of
/// the diagonalized algebra of quantum symmetries.
pub struct AlgebraProbe {
    /// per fundamental: does the first line of V_f0 hold a single entry 1
    pub left_licensed: Vec<bool>,
    pub right_licensed: Vec<bool>,
    /// matrix block sizes of the semisimple algebra, derived from the joint
    /// spectrum of the chiral generators
    pub block_dims: Vec<usize>,
}

pub fn quantum_symmetry_generators(gens: &ChiralGenerators) -> AlgebraProbe {
    let licensed = |m: &IntMat| {
        let row = m.row(0);
        row.iter().filter(|&&v| v != 0).count() == 1 && row.iter().any(|&v| v == 1)
    };
    let left_licensed = gens.left.iter().map(licensed).collect();
    let right_licensed = gens.right.iter().map(licensed).collect();
    let block_dims = joint_block_dims(&gens.left, &gens.right);
    AlgebraProbe {
        left_licensed,
        right_licensed,
        block_dims,
    }
}

/// The joint spectrum of the chiral generators is pinned by the modular
/// invariant: each (m, n) with M_mn != 0 contributes the character pair
/// (chi_m, chi_n) on the fundamentals with joint eigenspace dimension
/// M_mn^2. Candidate lifts violating this are spurious.
fn joint_spectrum_matches(
    lefts: &[IntMat],
    rights: &[IntMat],
    ring: &FusionRing,
    minv: &IntMat,
) -> bool {
    let gens: Vec<IntMat> = lefts.iter().chain(rights.iter()).cloned().collect();
    let spaces = joint_eigenspaces(&gens);
    // expected character tuples
    let chi = |m: usize, f: usize| -> f64 {
        (ring.md.s_re(f, m).clone() / ring.md.s_re(0, m)).to_f64()
    };
    let mut expected: Vec<(Vec<f64>, usize)> = Vec::new();
    let r = ring.rank();
    for m in 0..r {
        for n in 0..r {
            if minv[(m, n)] != 0 {
                let mut tuple: Vec<f64> =
                    ring.fundamentals.iter().map(|&f| chi(m, f)).collect();
                tuple.extend(ring.fundamentals.iter().map(|&f| chi(n, f)));
                let mult = (minv[(m, n)] * minv[(m, n)]) as usize;
                expected.push((tuple, mult));
            }
        }
    }
    let total: usize = spaces.iter().map(|s| s.basis.len()).sum();
    if expected.iter().map(|e| e.1).sum::<usize>() != total {
        return false;
    }
    let eps = 1e-4;
    let close = |a: &[f64], b: &[f64]| a.iter().zip(b).all(|(x, y)| (x - y).abs() < eps);
    // each computed eigenspace must match exactly one expected tuple with
    // the right dimension
    let mut used = vec![false; expected.len()];
    for s in &spaces {
        let found = expected.iter().enumerate().find(|(i, (tuple, mult))| {
            !used[*i] && *mult == s.basis.len() && close(tuple, &s.characters)
        });
        match found {
            Some((i, _)) => used[i] = true,
            None => return false,
        }
    }
    used.iter().all(|&u| u)
}

struct JointSpace {
    basis: Vec<Vec<f64>>,
    characters: Vec<f64>,
}

/// Simultaneous eigenspaces of a commuting family of symmetric integer
/// matrices, by recursive splitting.
fn joint_eigenspaces(gens: &[IntMat]) -> Vec<JointSpace> {
    let n = gens[0].rows;
    let mut spaces: Vec<Vec<Vec<f64>>> = vec![(0..n)
        .map(|i| {
            let mut e = vec![0f64; n];
            e[i] = 1.0;
            e
        })
        .collect()];
    for m in gens {
        let mut next = Vec::new();
        for basis in &spaces {
            split_subspace(m, basis, &mut next);
        }
        spaces = next;
    }
    spaces
        .into_iter()
        .map(|basis| {
            let characters = gens
                .iter()
                .map(|m| {
                    let v = &basis[0];
                    let mut mv = vec![0f64; n];
                    for i in 0..n {
                        for j in 0..n {
                            mv[i] += m[(i, j)] as f64 * v[j];
                        }
                    }
                    v.iter().zip(&mv).map(|(a, b)| a * b).sum::<f64>()
                        / v.iter().map(|a| a * a).sum::<f64>()
                })
                .collect();
            JointSpace { basis, characters }
        })
        .collect()
}

fn split_subspace(m: &IntMat, basis: &[Vec<f64>], out: &mut Vec<Vec<Vec<f64>>>) {
    let n = m.rows;
    let d = basis.len();
    if d == 1 {
        out.push(basis.to_vec());
        return;
    }
    let mut proj = vec![0f64; d * d];
    for (a, va) in basis.iter().enumerate() {
        let mut mv = vec![0f64; n];
        for i in 0..n {
            for j in 0..n {
                mv[i] += m[(i, j)] as f64 * va[j];
            }
        }
        for (b, vb) in basis.iter().enumerate() {
            proj[b * d + a] = vb.iter().zip(&mv).map(|(x, y)| x * y).sum();
        }
    }
    let vecs = jacobi_eigenvectors(&mut proj.clone(), d);
    let mut pairs: Vec<(f64, Vec<f64>)> = vecs
        .into_iter()
        .map(|u| {
            let mut lam = 0f64;
            for a in 0..d {
                for b in 0..d {
                    lam += u[a] * proj[a * d + b] * u[b];
                }
            }
            (lam, u)
        })
        .collect();
    pairs.sort_by(|x, y| x.0.partial_cmp(&y.0).unwrap());
    let eps = 1e-4;
    let mut cluster: Vec<Vec<f64>> = Vec::new();
    let mut last = f64::NAN;
    for (lam, u) in pairs {
        let lifted: Vec<f64> = (0..n)
            .map(|i| basis.iter().enumerate().map(|(a, va)| u[a] * va[i]).sum())
            .collect();
        if !cluster.is_empty() && (lam - last).abs() < eps {
            cluster.push(lifted);
        } else {
            if !cluster.is_empty() {
                out.push(std::mem::take(&mut cluster));
            }
            cluster.push(lifted);
        }
        last = lam;
    }
    if !cluster.is_empty() {
        out.push(cluster);
    }
}

/// Block sizes of the algebra from the joint spectrum of the chiral
/// generators: each simple block of size s carries one joint character with
/// eigenspace dimension s^2.
fn joint_block_dims(left: &[IntMat], right: &[IntMat]) -> Vec<usize> {
    let gens: Vec<IntMat> = left.iter().chain(right.iter()).cloned().collect();
    let spaces = joint_eigenspaces(&gens);
    if std::env::var_os("FUSIONCAT_SYM_DEBUG").is_some() {
        let raw: Vec<usize> = spaces.iter().map(|s| s.basis.len()).collect();
        eprintln!("joint eigenspace dims: {raw:?}");
    }
    let mut dims: Vec<usize> = spaces
        .iter()
        .map(|s| {
            let e = s.basis.len();
            let sq = (e as f64).sqrt().round() as usize;
            assert_eq!(sq * sq, e, "joint eigenspace dimension must be a square");
            sq
        })
        .collect();
    dims.sort_unstable();
    dims
}

/// Plain Jacobi rotation eigensolver for small symmetric matrices; returns
/// the eigenvectors as rows.
fn jacobi_eigenvectors(a: &mut [f64], n: usize) -> Vec<Vec<f64>> {
    let mut v = vec![0f64; n * n];
    for i in 0..n {
        v[i * n + i] = 1.0;
    }
    for _sweep in 0..100 {
        let mut off = 0f64;
        for i in 0..n {
            for j in i + 1..n {
                off += a[i * n + j] * a[i * n + j];
            }
        }
        if off < 1e-24 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[p * n + q];
                if apq.abs() < 1e-18 {
                    continue;
                }
                let theta = (a[q * n + q] - a[p * n + p]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    a[k * n + p] = c * akp - s * akq;
                    a[k * n + q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p * n + k];
                    let aqk = a[q * n + k];
                    a[p * n + k] = c * apk - s * aqk;
                    a[q * n + k] = s * apk + c * aqk;
                }
                for k in 0..n {
                    let vkp = v[k * n + p];
                    let vkq = v[k * n + q];
                    v[k * n + p] = c * vkp - s * vkq;
                    v[k * n + q] = s * vkp + c * vkq;
                }
            }
        }
    }
    (0..n).map(|c| (0..n).map(|r| v[r * n + c]).collect()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fusionring::{kac_peterson, verlinde_all};
    use crate::invariants::{search_type_i_invariant, ConformalEmbedding};
    use crate::liedata::AlgebraKind;
    use crate::scalars::{Precision, ToleranceProfile};
    use crate::splitting::{build_instance, solve};

    fn full(alg: AlgebraKind, k: i64) -> (FusionRing, ToricFamily) {
        let prec = Precision::decimal(60);
        let tol = ToleranceProfile::new(-25, -25);
        let md = kac_peterson(alg, k, prec, &tol).unwrap();
        let ring = verlinde_all(&md, prec, &tol).unwrap();
        let emb = ConformalEmbedding::get(alg, k).unwrap();
        let inv = search_type_i_invariant(&ring, &emb, 2, prec, &tol).unwrap();
        let inst = build_instance(&ring.n, &inv.m);
        let fam = solve(&inst, Some((inv.r_w(), inv.r_o()))).unwrap();
        (ring, fam)
    }

    #[test]
    fn diagonal_case_gives_fusion_matrices() {
        // M = 1: V_f = N_f on both sides, one component, all ambichiral
        let prec = Precision::decimal(50);
        let tol = ToleranceProfile::new(-20, -20);
        let md = kac_peterson(AlgebraKind::B2, 1, prec, &tol).unwrap();
        let ring = verlinde_all(&md, prec, &tol).unwrap();
        let ident = IntMat::identity(3);
        let inst = build_instance(&ring.n, &ident);
        let fam = solve(&inst, Some((3, 3))).unwrap();
        let gens = solve_intertwining(&fam, &ring, &ident).unwrap();
        // classes are a permutation of the fusion matrices; compare in the
        // family order
        for (fi, &f) in gens.fundamentals.iter().enumerate() {
            let perm: Vec<usize> = (0..3)
                .map(|x| {
                    ring.n
                        .iter()
                        .position(|nm| *nm == fam.distinct[x])
                        .unwrap()
                })
                .collect();
            let expect = ring.n[f].permute_square(&perm);
            assert_eq!(gens.left[fi], expect);
            assert_eq!(gens.right[fi], expect);
        }
        let graph = component_analysis(&gens);
        assert_eq!(graph.components.len(), 1);
        assert_eq!(graph.ambichiral.len(), 3);
        let probe = quantum_symmetry_generators(&gens);
        assert!(probe.left_licensed.iter().all(|&b| b));
        assert_eq!(probe.block_dims, vec![1, 1, 1], "commutative algebra");
    }

    #[test]
    fn e2_b2_quantum_symmetries() {
        let (ring, fam) = full(AlgebraKind::B2, 2);
        let gens = solve_intertwining(&fam, &ring, &inv.m).unwrap();
        // left and right commute, all generators symmetric
        for l in &gens.left {
            assert!(l.is_symmetric());
            for r in &gens.right {
                assert!(l.commutes_with(r));
            }
        }
        let graph = component_analysis(&gens);
        assert_eq!(graph.r_o, 12);
        assert_eq!(graph.ambichiral.len(), 5, "|J| = 5");
        // the algebra splits as 4 C + 2 M(2,C)
        let probe = quantum_symmetry_generators(&gens);
        assert_eq!(probe.block_dims, vec![1, 1, 1, 1, 2, 2]);
    }

    #[test]
    fn g2_level3_ambichiral_count() {
        let (ring, fam) = full(AlgebraKind::G2, 3);
        let gens = solve_intertwining(&fam, &ring, &inv.m).unwrap();
        let graph = component_analysis(&gens);
        assert_eq!(graph.r_o, 8);
        assert_eq!(graph.ambichiral.len(), 3);
        // one subgroup component and one module component, not isomorphic
        assert_eq!(graph.components.len(), 2);
        assert_ne!(graph.kinds[0], graph.kinds[1]);
        assert_eq!(graph.components[0].len(), 4);
        assert_eq!(graph.components[1].len(), 4);
    }
}
