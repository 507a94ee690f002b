//! Dense integer matrices and exact linear solving.
//!
//! Everything the constraint solvers touch lives here: fusion matrices,
//! modular invariants, toric matrices, annular matrices. Sizes stay small
//! (at most 144 on a side) so a flat `Vec<i64>` with explicit loops beats
//! anything fancier, and exact solves go through `BigRational` to dodge
//! overflow questions entirely.

use num_bigint::BigInt;
use num_traits::{One, Zero};
use std::fmt;

use crate::rat::BigRat;

#[derive(Clone, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub struct IntMat {
    pub rows: usize,
    pub cols: usize,
    data: Vec<i64>,
}

impl IntMat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMat {
            rows,
            cols,
            data: vec![0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = IntMat::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1;
        }
        m
    }

    pub fn from_rows(rows: &[&[i64]]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        let mut m = IntMat::zeros(r, c);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), c, "ragged rows");
            m.data[i * c..(i + 1) * c].copy_from_slice(row);
        }
        m
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<i64>) -> Self {
        assert_eq!(data.len(), rows * cols);
        IntMat { rows, cols, data }
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[i64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn data(&self) -> &[i64] {
        &self.data
    }

    pub fn transpose(&self) -> IntMat {
        let mut t = IntMat::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)];
            }
        }
        t
    }

    pub fn matmul(&self, other: &IntMat) -> IntMat {
        assert_eq!(self.cols, other.rows, "dimension mismatch");
        let mut out = IntMat::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            let a_row = self.row(i);
            let out_row = &mut out.data[i * other.cols..(i + 1) * other.cols];
            for (k, &a) in a_row.iter().enumerate() {
                if a == 0 {
                    continue;
                }
                let b_row = other.row(k);
                for (j, &b) in b_row.iter().enumerate() {
                    out_row[j] += a * b;
                }
            }
        }
        out
    }

    pub fn add(&self, other: &IntMat) -> IntMat {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a + b)
            .collect();
        IntMat {
            rows: self.rows,
            cols: self.cols,
            data,
        }
    }

    pub fn sub(&self, other: &IntMat) -> IntMat {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a - b)
            .collect();
        IntMat {
            rows: self.rows,
            cols: self.cols,
            data,
        }
    }

    /// self -= k * other, reporting whether every entry stayed nonnegative.
    pub fn sub_scaled_nonneg(&mut self, other: &IntMat, k: i64) -> bool {
        let mut ok = true;
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a -= k * b;
            ok &= *a >= 0;
        }
        ok
    }

    pub fn add_scaled(&mut self, other: &IntMat, k: i64) {
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += k * b;
        }
    }

    pub fn scale(&self, k: i64) -> IntMat {
        IntMat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|a| a * k).collect(),
        }
    }

    /// Entrywise division by k; None if any entry is not divisible.
    pub fn div_exact(&self, k: i64) -> Option<IntMat> {
        let mut data = Vec::with_capacity(self.data.len());
        for &a in &self.data {
            if a % k != 0 {
                return None;
            }
            data.push(a / k);
        }
        Some(IntMat {
            rows: self.rows,
            cols: self.cols,
            data,
        })
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&a| a == 0)
    }

    pub fn is_nonneg(&self) -> bool {
        self.data.iter().all(|&a| a >= 0)
    }

    pub fn is_symmetric(&self) -> bool {
        self.rows == self.cols
            && (0..self.rows).all(|i| (0..i).all(|j| self[(i, j)] == self[(j, i)]))
    }

    pub fn trace(&self) -> i64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn entry_sum(&self) -> i64 {
        self.data.iter().sum()
    }

    pub fn count_nonzero(&self) -> usize {
        self.data.iter().filter(|&&a| a != 0).count()
    }

    pub fn max_entry(&self) -> i64 {
        self.data.iter().copied().max().unwrap_or(0)
    }

    /// Frobenius inner product <self, other>.
    pub fn dot(&self, other: &IntMat) -> i64 {
        self.data.iter().zip(&other.data).map(|(a, b)| a * b).sum()
    }

    pub fn commutes_with(&self, other: &IntMat) -> bool {
        self.matmul(other) == other.matmul(self)
    }

    /// Apply a simultaneous row/column permutation: out[i][j] = self[p[i]][p[j]].
    pub fn permute_square(&self, p: &[usize]) -> IntMat {
        assert_eq!(self.rows, self.cols);
        let mut out = IntMat::zeros(self.rows, self.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(i, j)] = self[(p[i], p[j])];
            }
        }
        out
    }

    pub fn permute_cols(&self, p: &[usize]) -> IntMat {
        let mut out = IntMat::zeros(self.rows, self.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(i, j)] = self[(i, p[j])];
            }
        }
        out
    }

    pub fn col(&self, j: usize) -> Vec<i64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }
}

impl std::ops::Index<(usize, usize)> for IntMat {
    type Output = i64;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &i64 {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for IntMat {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut i64 {
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Debug for IntMat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "IntMat {}x{}", self.rows, self.cols)?;
        for i in 0..self.rows {
            writeln!(f, "  {:?}", self.row(i))?;
        }
        Ok(())
    }
}

fn bigrat(v: i64) -> BigRat {
    BigRat::from_integer(BigInt::from(v))
}

/// Solve A x = b exactly over the rationals.
///
/// Returns None when the system is inconsistent. When the solution is not
/// unique an arbitrary member of the affine solution set is returned along
/// with a basis of the kernel.
pub struct RatSolution {
    pub particular: Vec<BigRat>,
    pub kernel: Vec<Vec<BigRat>>,
}

pub fn solve_rational(a_rows: &[Vec<i64>], b: &[i64]) -> Option<RatSolution> {
    let m = a_rows.len();
    assert_eq!(m, b.len());
    let n = a_rows.first().map_or(0, |r| r.len());
    // augmented matrix in BigRat
    let mut aug: Vec<Vec<BigRat>> = a_rows
        .iter()
        .zip(b)
        .map(|(row, &bi)| {
            row.iter()
                .map(|&v| bigrat(v))
                .chain(std::iter::once(bigrat(bi)))
                .collect()
        })
        .collect();

    let mut pivot_cols = Vec::new();
    let mut r = 0;
    for c in 0..n {
        let Some(p) = (r..m).find(|&i| !aug[i][c].is_zero()) else {
            continue;
        };
        aug.swap(r, p);
        let inv = aug[r][c].clone();
        for v in aug[r].iter_mut() {
            *v = &*v / &inv;
        }
        for i in 0..m {
            if i != r && !aug[i][c].is_zero() {
                let f = aug[i][c].clone();
                for j in 0..=n {
                    let delta = &aug[r][j] * &f;
                    aug[i][j] = &aug[i][j] - delta;
                }
            }
        }
        pivot_cols.push(c);
        r += 1;
        if r == m {
            break;
        }
    }
    // inconsistency: zero row with nonzero rhs
    for row in aug.iter().skip(r) {
        if row[..n].iter().all(|v| v.is_zero()) && !row[n].is_zero() {
            return None;
        }
    }
    let mut particular = vec![BigRat::zero(); n];
    for (k, &c) in pivot_cols.iter().enumerate() {
        particular[c] = aug[k][n].clone();
    }
    let free: Vec<usize> = (0..n).filter(|c| !pivot_cols.contains(c)).collect();
    let mut kernel = Vec::new();
    for &fc in &free {
        let mut v = vec![BigRat::zero(); n];
        v[fc] = BigRat::one();
        for (k, &c) in pivot_cols.iter().enumerate() {
            v[c] = -aug[k][fc].clone();
        }
        kernel.push(v);
    }
    Some(RatSolution { particular, kernel })
}

/// Certify that a rational vector is integral and convert it.
pub fn rat_vec_to_ints(v: &[BigRat]) -> Option<Vec<i64>> {
    v.iter()
        .map(|x| {
            if x.is_integer() {
                x.to_integer().try_into().ok()
            } else {
                None
            }
        })
        .collect()
}

/// Express `target` in the span of `basis` (all matrices of equal shape),
/// requiring a unique rational solution. Uses the Gram matrix, so the basis
/// must be linearly independent.
pub fn coords_in_span(basis: &[IntMat], gram_lu: &GramSolver, target: &IntMat) -> Option<Vec<BigRat>> {
    let rhs: Vec<i64> = basis.iter().map(|w| w.dot(target)).collect();
    let sol = gram_lu.solve(&rhs)?;
    // verify: reconstruct and compare (guards against target outside the span)
    let mut recon = IntMat::zeros(target.rows, target.cols);
    let ints = rat_vec_to_ints(&sol);
    match ints {
        Some(cs) => {
            for (w, &c) in basis.iter().zip(&cs) {
                if c != 0 {
                    recon.add_scaled(w, c);
                }
            }
            if &recon == target {
                Some(sol)
            } else {
                None
            }
        }
        None => {
            // non-integer coordinates: verify by residual dot products
            let mut ok = true;
            for (i, w) in basis.iter().enumerate() {
                let mut lhs = BigRat::zero();
                for (j, wj) in basis.iter().enumerate() {
                    lhs += &sol[j] * bigrat(w.dot(wj));
                }
                if lhs != bigrat(rhs[i]) {
                    ok = false;
                    break;
                }
            }
            // target must also reconstruct exactly; check entrywise sum
            if ok {
                let mut norm_t = bigrat(target.dot(target));
                for (j, wj) in basis.iter().enumerate() {
                    norm_t -= &sol[j] * bigrat(wj.dot(target));
                }
                if norm_t.is_zero() {
                    return Some(sol);
                }
            }
            None
        }
    }
}

/// Pre-factored Gram matrix of a basis of matrices.
pub struct GramSolver {
    n: usize,
    rows: Vec<Vec<i64>>,
}

impl GramSolver {
    pub fn new(basis: &[IntMat]) -> Self {
        let n = basis.len();
        let mut rows = vec![vec![0i64; n]; n];
        for i in 0..n {
            for j in i..n {
                let d = basis[i].dot(&basis[j]);
                rows[i][j] = d;
                rows[j][i] = d;
            }
        }
        GramSolver { n, rows }
    }

    pub fn solve(&self, rhs: &[i64]) -> Option<Vec<BigRat>> {
        assert_eq!(rhs.len(), self.n);
        let sol = solve_rational(&self.rows, rhs)?;
        if sol.kernel.is_empty() {
            Some(sol.particular)
        } else {
            None // basis was not independent
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matmul_identity() {
        let a = IntMat::from_rows(&[&[1, 2], &[3, 4]]);
        let i = IntMat::identity(2);
        assert_eq!(a.matmul(&i), a);
        assert_eq!(i.matmul(&a), a);
    }

    #[test]
    fn solve_unique() {
        let a = vec![vec![2, 1], vec![1, 3]];
        let b = vec![5, 10];
        let sol = solve_rational(&a, &b).unwrap();
        assert!(sol.kernel.is_empty());
        let ints = rat_vec_to_ints(&sol.particular).unwrap();
        assert_eq!(ints, vec![1, 3]);
    }

    #[test]
    fn solve_inconsistent() {
        let a = vec![vec![1, 1], vec![2, 2]];
        assert!(solve_rational(&a, &[1, 3]).is_none());
    }

    #[test]
    fn solve_underdetermined_has_kernel() {
        let a = vec![vec![1, 1]];
        let sol = solve_rational(&a, &[2]).unwrap();
        assert_eq!(sol.kernel.len(), 1);
    }

    #[test]
    fn span_coordinates() {
        let b1 = IntMat::from_rows(&[&[1, 0], &[0, 0]]);
        let b2 = IntMat::from_rows(&[&[0, 1], &[1, 0]]);
        let gram = GramSolver::new(&[b1.clone(), b2.clone()]);
        let t = IntMat::from_rows(&[&[3, 2], &[2, 0]]);
        let c = coords_in_span(&[b1, b2], &gram, &t).unwrap();
        let ints = rat_vec_to_ints(&c).unwrap();
        assert_eq!(ints, vec![3, 2]);
    }
}
