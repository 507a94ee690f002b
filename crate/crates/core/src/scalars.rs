//! High-precision complex arithmetic with certified rounding of
//! provably-integer results.
//!
//! Everything downstream (Verlinde sums, commutators, eigenvector checks)
//! branches on integers that are only *computed* in floating arithmetic.
//! The working precision is a run parameter, fixed once and carried along
//! into every output, and `round_integer` refuses to guess when a value is
//! not provably close to an integer.

use rug::float::Constant;
use rug::ops::Pow;
use rug::Float;
use std::fmt;

use crate::rat::Rat;

/// Working precision for all transcendental arithmetic in a run.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Precision {
    decimal_digits: u32,
    bits: u32,
}

impl Precision {
    /// Precision from a decimal digit count. A few guard bits are added on
    /// top of the binary equivalent.
    pub fn decimal(digits: u32) -> Self {
        assert!(digits >= 10, "precision below 10 digits is not supported");
        let bits = (digits as f64 * std::f64::consts::LOG2_10).ceil() as u32 + 32;
        Precision {
            decimal_digits: digits,
            bits,
        }
    }

    pub fn digits(&self) -> u32 {
        self.decimal_digits
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    /// Same number with twice the decimal digits, for stability checks.
    pub fn doubled(&self) -> Self {
        Precision::decimal(self.decimal_digits * 2)
    }

    pub fn float(&self, v: i64) -> Float {
        Float::with_val(self.bits, v)
    }

    pub fn float_rat(&self, r: Rat) -> Float {
        let num = Float::with_val(self.bits, *r.numer());
        num / *r.denom()
    }

    pub fn pi(&self) -> Float {
        Float::with_val(self.bits, Constant::Pi)
    }

    /// 10^exp at working precision; used to materialize tolerances.
    pub fn pow10(&self, exp: i32) -> Float {
        Float::with_val(self.bits, 10).pow(exp)
    }
}

impl Default for Precision {
    fn default() -> Self {
        Precision::decimal(80)
    }
}

/// Residual tolerances, kept separate from the precision so that audits can
/// tighten or loosen them without recomputing anything.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct ToleranceProfile {
    /// `round_integer` accepts residuals up to 10^integer_rounding_exp10.
    pub integer_rounding_exp10: i32,
    /// `near_equal` accepts differences up to 10^equality_exp10.
    pub equality_exp10: i32,
}

impl ToleranceProfile {
    pub fn new(integer_rounding_exp10: i32, equality_exp10: i32) -> Self {
        // both tolerances strictly positive and usable for rounding
        assert!(integer_rounding_exp10 < 0, "rounding tolerance must be < 0.5");
        assert!(equality_exp10 < 0, "equality tolerance must be positive and small");
        ToleranceProfile {
            integer_rounding_exp10,
            equality_exp10,
        }
    }

    pub fn rounding_eps(&self, prec: Precision) -> Float {
        prec.pow10(self.integer_rounding_exp10)
    }

    pub fn equality_eps(&self, prec: Precision) -> Float {
        prec.pow10(self.equality_exp10)
    }
}

impl Default for ToleranceProfile {
    fn default() -> Self {
        ToleranceProfile::new(-30, -30)
    }
}

#[derive(Debug, thiserror::Error)]
pub enum ScalarError {
    /// A value that should be an integer is not close to one at the working
    /// precision. Either the precision is too small or something upstream
    /// produced a genuine non-integer.
    #[error("residual too large when rounding to integer: value ~ {value_approx}, residual exponent {residual_exp10}")]
    ResidualTooLarge {
        value_approx: f64,
        residual_exp10: i64,
    },
}

/// A complex number at the working precision. Plain value semantics: freely
/// cloned, no shared state.
#[derive(Clone, PartialEq)]
pub struct Scalar {
    pub re: Float,
    pub im: Float,
}

impl Scalar {
    pub fn zero(prec: Precision) -> Self {
        Scalar {
            re: prec.float(0),
            im: prec.float(0),
        }
    }

    pub fn one(prec: Precision) -> Self {
        Scalar {
            re: prec.float(1),
            im: prec.float(0),
        }
    }

    pub fn from_int(prec: Precision, v: i64) -> Self {
        Scalar {
            re: prec.float(v),
            im: prec.float(0),
        }
    }

    pub fn from_rat(prec: Precision, r: Rat) -> Self {
        Scalar {
            re: prec.float_rat(r),
            im: prec.float(0),
        }
    }

    pub fn real(re: Float) -> Self {
        let im = Float::with_val(re.prec(), 0);
        Scalar { re, im }
    }

    /// e^{2 i pi r} for rational r; the only way roots of unity enter.
    pub fn exp_2pi_i(prec: Precision, r: Rat) -> Self {
        let angle: Float = prec.pi() * 2u32 * prec.float_rat(r);
        let (sin, cos) = angle.sin_cos(Float::new(prec.bits()));
        Scalar { re: cos, im: sin }
    }

    pub fn prec_bits(&self) -> u32 {
        self.re.prec()
    }

    pub fn conj(&self) -> Scalar {
        Scalar {
            re: self.re.clone(),
            im: -self.im.clone(),
        }
    }

    /// |self|, as a real Float.
    pub fn modulus(&self) -> Float {
        let m2 = self.re.clone().square() + self.im.clone().square();
        m2.sqrt()
    }

    pub fn is_real_within(&self, eps: &Float) -> bool {
        self.im.clone().abs() <= *eps
    }

    pub fn add(&self, o: &Scalar) -> Scalar {
        Scalar {
            re: self.re.clone() + &o.re,
            im: self.im.clone() + &o.im,
        }
    }

    pub fn sub(&self, o: &Scalar) -> Scalar {
        Scalar {
            re: self.re.clone() - &o.re,
            im: self.im.clone() - &o.im,
        }
    }

    pub fn mul(&self, o: &Scalar) -> Scalar {
        let re = self.re.clone() * &o.re - self.im.clone() * &o.im;
        let im = self.re.clone() * &o.im + self.im.clone() * &o.re;
        Scalar { re, im }
    }

    pub fn div(&self, o: &Scalar) -> Scalar {
        let den = o.re.clone().square() + o.im.clone().square();
        let re = (self.re.clone() * &o.re + self.im.clone() * &o.im) / &den;
        let im = (self.im.clone() * &o.re - self.re.clone() * &o.im) / &den;
        Scalar { re, im }
    }

    pub fn neg(&self) -> Scalar {
        Scalar {
            re: -self.re.clone(),
            im: -self.im.clone(),
        }
    }

    pub fn scale_int(&self, v: i64) -> Scalar {
        Scalar {
            re: self.re.clone() * v,
            im: self.im.clone() * v,
        }
    }

    /// i^k for integer k, multiplied in exactly.
    pub fn mul_i_pow(&self, k: u32) -> Scalar {
        match k % 4 {
            0 => self.clone(),
            1 => Scalar {
                re: -self.im.clone(),
                im: self.re.clone(),
            },
            2 => self.neg(),
            _ => Scalar {
                re: self.im.clone(),
                im: -self.re.clone(),
            },
        }
    }

    pub fn to_f64(&self) -> (f64, f64) {
        (self.re.to_f64(), self.im.to_f64())
    }
}

impl fmt::Debug for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:.6e}{:+.6e}i", self.re.to_f64(), self.im.to_f64())
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let digits = (self.re.prec() as f64 / std::f64::consts::LOG2_10) as usize;
        write!(
            f,
            "{}{}{}i",
            self.re.to_string_radix(10, Some(digits)),
            if self.im.is_sign_negative() { "" } else { "+" },
            self.im.to_string_radix(10, Some(digits))
        )
    }
}

/// Round a scalar that is mathematically an integer.
pub fn round_integer(s: &Scalar, prec: Precision, tol: &ToleranceProfile) -> Result<i64, ScalarError> {
    let eps = tol.rounding_eps(prec);
    let err = |res: &Float| ScalarError::ResidualTooLarge {
        value_approx: s.re.to_f64(),
        residual_exp10: res
            .clone()
            .abs()
            .log10()
            .to_f64()
            .round() as i64,
    };
    let im_abs = s.im.clone().abs();
    if im_abs > eps {
        return Err(err(&im_abs));
    }
    let nearest = s.re.clone().round();
    let residual = (s.re.clone() - &nearest).abs();
    if residual > eps {
        return Err(err(&residual));
    }
    Ok(nearest.to_f64() as i64)
}

/// Tolerant equality on scalars.
pub fn near_equal(a: &Scalar, b: &Scalar, prec: Precision, tol: &ToleranceProfile) -> bool {
    a.sub(b).modulus() <= tol.equality_eps(prec)
}

/// Tolerant equality on real floats, same tolerance source.
pub fn near_equal_f(a: &Float, b: &Float, prec: Precision, tol: &ToleranceProfile) -> bool {
    (a.clone() - b).abs() <= tol.equality_eps(prec)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::rat;
    use proptest::prelude::*;

    const P: fn() -> Precision = Precision::default;

    #[test]
    fn rounds_near_integers() {
        let prec = P();
        let tol = ToleranceProfile::default();
        let mut s = Scalar::from_int(prec, 2);
        s.re += prec.pow10(-40); // 2.000...0001 within tolerance
        assert_eq!(round_integer(&s, prec, &tol).unwrap(), 2);
        let z = Scalar::zero(prec);
        assert_eq!(round_integer(&z, prec, &tol).unwrap(), 0);
    }

    #[test]
    fn rejects_residuals() {
        let prec = P();
        let tol = ToleranceProfile::default();
        let mut s = Scalar::from_int(prec, 2);
        s.re += prec.pow10(-10);
        assert!(matches!(
            round_integer(&s, prec, &tol),
            Err(ScalarError::ResidualTooLarge { .. })
        ));
        let mut t = Scalar::from_int(prec, 1);
        t.im += prec.pow10(-10);
        assert!(round_integer(&t, prec, &tol).is_err());
    }

    #[test]
    fn near_equal_basic() {
        let prec = P();
        let tol = ToleranceProfile::default();
        // sqrt(2) two ways
        let a = Scalar::real(prec.float(2).sqrt());
        let b = Scalar::real(prec.float(8).sqrt() / 2);
        assert!(near_equal(&a, &b, prec, &tol));
        // 1 vs 1+1e-10 at default tolerance
        let c = Scalar::one(prec);
        let mut d = Scalar::one(prec);
        d.re += prec.pow10(-10);
        assert!(!near_equal(&c, &d, prec, &tol));
    }

    #[test]
    fn roots_of_unity_are_on_the_circle() {
        let prec = P();
        let tol = ToleranceProfile::default();
        let q = Scalar::exp_2pi_i(prec, rat(1, 5));
        let mut p = Scalar::one(prec);
        for _ in 0..5 {
            p = p.mul(&q);
        }
        assert!(near_equal(&p, &Scalar::one(prec), prec, &tol));
        assert!(near_equal_f(&q.modulus(), &prec.float(1), prec, &tol));
    }

    proptest! {
        // arithmetic stays exact enough for certified rounding
        #[test]
        fn prop_int_arithmetic_rounds_back(a in -1000i64..1000, b in -1000i64..1000) {
            let prec = P();
            let tol = ToleranceProfile::default();
            let sa = Scalar::from_int(prec, a);
            let sb = Scalar::from_int(prec, b);
            prop_assert_eq!(round_integer(&sa.mul(&sb), prec, &tol).unwrap(), a * b);
            prop_assert_eq!(round_integer(&sa.add(&sb), prec, &tol).unwrap(), a + b);
        }

        #[test]
        fn prop_conj_involution(re in -100i64..100, im in -100i64..100) {
            let prec = P();
            let tol = ToleranceProfile::default();
            let s = Scalar { re: prec.float(re), im: prec.float(im) };
            prop_assert!(near_equal(&s.conj().conj(), &s, prec, &tol));
        }
    }
}
