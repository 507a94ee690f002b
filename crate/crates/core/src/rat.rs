//! Exact rational arithmetic aliases. Structural Lie data (quadratic forms,
//! conformal weights, exponents of roots of unity) stays rational end to end;
//! floats only appear once a root of unity is chosen.

use num_rational::{BigRational, Ratio};

pub type Rat = Ratio<i64>;
pub type BigRat = BigRational;

pub fn rat(n: i64, d: i64) -> Rat {
    Ratio::new(n, d)
}

/// r mod 1, normalized into [0, 1).
pub fn mod1(r: Rat) -> Rat {
    let f = r.floor();
    r - f
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mod1_normalizes() {
        assert_eq!(mod1(rat(7, 4)), rat(3, 4));
        assert_eq!(mod1(rat(-1, 4)), rat(3, 4));
        assert_eq!(mod1(rat(3, 1)), rat(0, 1));
    }
}
