//! Bounded enumeration of nonnegative integer solutions to linear systems.
//!
//! The constraint searches in this crate (annular matrices from an
//! intertwiner, relative invariants, graph algebras) all reduce to systems
//! with nonnegative coefficients and small right-hand sides, where
//! propagation of residual bounds prunes almost everything.

/// One linear equation: sum coeff * var = rhs.
#[derive(Clone, Debug)]
pub struct LinEq {
    pub terms: Vec<(usize, i64)>,
    pub rhs: i64,
}

#[derive(Clone, Debug)]
pub struct LinSystem {
    pub n_vars: usize,
    pub upper: Vec<i64>,
    pub eqs: Vec<LinEq>,
}

impl LinSystem {
    pub fn new(n_vars: usize, upper_bound: i64) -> Self {
        LinSystem {
            n_vars,
            upper: vec![upper_bound; n_vars],
            eqs: Vec::new(),
        }
    }

    pub fn add_eq(&mut self, terms: Vec<(usize, i64)>, rhs: i64) {
        debug_assert!(terms.iter().all(|&(_, c)| c > 0), "coefficients must be positive");
        self.eqs.push(LinEq { terms, rhs });
    }

    /// Enumerate solutions in lexicographic variable order, stopping after
    /// `cap` of them. Deterministic.
    pub fn enumerate(&self, cap: usize) -> Vec<Vec<i64>> {
        let mut upper = self.upper.clone();
        // tighten upper bounds from single equations
        for eq in &self.eqs {
            for &(v, c) in &eq.terms {
                upper[v] = upper[v].min(eq.rhs / c);
            }
        }
        let mut state = State {
            sys: self,
            upper,
            assign: vec![-1; self.n_vars],
            residual: self.eqs.iter().map(|e| e.rhs).collect(),
            unassigned: self.eqs.iter().map(|e| e.terms.len()).collect(),
            var_eqs: vec![Vec::new(); self.n_vars],
            out: Vec::new(),
            cap,
        };
        for (ei, eq) in self.eqs.iter().enumerate() {
            for &(v, c) in &eq.terms {
                state.var_eqs[v].push((ei, c));
            }
        }
        // infeasible right away?
        if state.residual.iter().any(|&r| r < 0) {
            return Vec::new();
        }
        state.dfs(0);
        state.out
    }
}

struct State<'a> {
    sys: &'a LinSystem,
    upper: Vec<i64>,
    assign: Vec<i64>,
    residual: Vec<i64>,
    unassigned: Vec<usize>,
    var_eqs: Vec<Vec<(usize, i64)>>,
    out: Vec<Vec<i64>>,
    cap: usize,
}

impl State<'_> {
    fn dfs(&mut self, from: usize) {
        if self.out.len() >= self.cap {
            return;
        }
        // next unassigned variable in order
        let Some(v) = (from..self.sys.n_vars).find(|&v| self.assign[v] < 0) else {
            if self.residual.iter().all(|&r| r == 0) {
                self.out.push(self.assign.clone());
            }
            return;
        };
        // upper bound from every touching equation's residual
        let mut hi = self.upper[v];
        for &(ei, c) in &self.var_eqs[v] {
            hi = hi.min(self.residual[ei] / c);
        }
        'values: for val in 0..=hi {
            for &(ei, c) in &self.var_eqs[v] {
                let r = self.residual[ei] - c * val;
                // if this was the last unassigned term the eq must close
                if r < 0 || (self.unassigned[ei] == 1 && r != 0) {
                    continue 'values;
                }
            }
            self.assign[v] = val;
            for &(ei, c) in &self.var_eqs[v] {
                self.residual[ei] -= c * val;
                self.unassigned[ei] -= 1;
            }
            self.dfs(v + 1);
            for &(ei, c) in &self.var_eqs[v] {
                self.residual[ei] += c * val;
                self.unassigned[ei] += 1;
            }
            self.assign[v] = -1;
            if self.out.len() >= self.cap {
                return;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn enumerates_simple_system() {
        // x + y = 3, y + z = 2
        let mut sys = LinSystem::new(3, 10);
        sys.add_eq(vec![(0, 1), (1, 1)], 3);
        sys.add_eq(vec![(1, 1), (2, 1)], 2);
        let sols = sys.enumerate(100);
        assert_eq!(sols.len(), 3); // y in {0,1,2}
        assert!(sols.contains(&vec![3, 0, 2]));
        assert!(sols.contains(&vec![1, 2, 0]));
    }

    #[test]
    fn respects_coefficients_and_bounds() {
        // 2x + 3y = 12 with both variables capped at 3
        let mut sys = LinSystem::new(2, 3);
        sys.add_eq(vec![(0, 2), (1, 3)], 12);
        let sols = sys.enumerate(100);
        assert_eq!(sols, vec![vec![3, 2]]);
    }

    #[test]
    fn infeasible_system_is_empty() {
        let mut sys = LinSystem::new(2, 10);
        sys.add_eq(vec![(0, 2)], 3); // 2x = 3
        assert!(sys.enumerate(10).is_empty());
    }
}
