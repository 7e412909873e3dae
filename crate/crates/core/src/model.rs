//! Exponent bookkeeping shared by every other module.
//!
//! For the equation `w_tt - Δw = ι|w|^{p-1} w` on ℝ³ with `p > 5` the
//! relevant derived exponents are `m = (p-1)/2` (the Lebesgue exponent of
//! the generalized energy) and the critical regularity `s_c = 3/2 - 2/(p-1)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Sign of the nonlinearity: `+1` focusing, `-1` defocusing.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sign {
    Focusing,
    Defocusing,
}

impl Sign {
    pub fn value(self) -> f64 {
        match self {
            Sign::Focusing => 1.0,
            Sign::Defocusing => -1.0,
        }
    }

    pub fn from_value(v: i32) -> Option<Self> {
        match v {
            1 => Some(Sign::Focusing),
            -1 => Some(Sign::Defocusing),
            _ => None,
        }
    }
}

/// The exponent bundle `(p, ι, m, s_c)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Params {
    p: f64,
    iota: Sign,
    m: f64,
    s_c: f64,
}

impl Params {
    pub fn new(p: f64, iota: Sign) -> Result<Self> {
        if !p.is_finite() {
            return Err(Error::NonFiniteExponent(p));
        }
        if p <= 5.0 {
            return Err(Error::SubcriticalExponent(p));
        }
        Ok(Self {
            p,
            iota,
            m: (p - 1.0) / 2.0,
            s_c: 1.5 - 2.0 / (p - 1.0),
        })
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn iota(&self) -> Sign {
        self.iota
    }

    /// `ι` as a float, for direct use in formulas.
    pub fn iota_value(&self) -> f64 {
        self.iota.value()
    }

    pub fn m(&self) -> f64 {
        self.m
    }

    pub fn s_c(&self) -> f64 {
        self.s_c
    }

    /// Amplitude exponent `2/(p-1)` of the scaling symmetry.
    pub fn scaling_exponent(&self) -> f64 {
        2.0 / (self.p - 1.0)
    }

    pub fn with_sign(&self, iota: Sign) -> Self {
        Self { iota, ..*self }
    }

    /// Factors for `w ↦ λ^{2/(p-1)} w(λt, λx)`: the amplitude factor and the
    /// change of the `Ḣ^{s_c} × Ḣ^{s_c-1}` norm, which is identically one.
    pub fn rescale_exponents(&self, lambda: f64) -> Result<(f64, f64)> {
        if !(lambda > 0.0) || !lambda.is_finite() {
            return Err(Error::NonpositiveScale(lambda));
        }
        Ok((lambda.powf(self.scaling_exponent()), 1.0))
    }
}

/// Free-function form of [`Params::new`].
pub fn make_params(p: f64, iota: Sign) -> Result<Params> {
    Params::new(p, iota)
}

/// Sign-preserving power `|x|^{q-1} x`.
#[inline]
pub fn signed_pow(x: f64, q: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x.abs().powf(q - 1.0) * x
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn p7_focusing() {
        let pr = make_params(7.0, Sign::Focusing).unwrap();
        assert_relative_eq!(pr.m(), 3.0);
        assert_relative_eq!(pr.s_c(), 7.0 / 6.0, epsilon = 1e-15);
    }

    #[test]
    fn p9_defocusing() {
        let pr = make_params(9.0, Sign::Defocusing).unwrap();
        assert_relative_eq!(pr.m(), 4.0);
        assert_relative_eq!(pr.s_c(), 1.25, epsilon = 1e-15);
        assert_eq!(pr.iota_value(), -1.0);
    }

    #[test]
    fn p5_rejected() {
        assert_eq!(
            make_params(5.0, Sign::Focusing),
            Err(Error::SubcriticalExponent(5.0))
        );
        assert!(make_params(3.0, Sign::Defocusing).is_err());
        assert!(make_params(f64::NAN, Sign::Focusing).is_err());
        assert!(make_params(f64::INFINITY, Sign::Focusing).is_err());
    }

    #[test]
    fn rescale_examples() {
        let p7 = make_params(7.0, Sign::Focusing).unwrap();
        assert_eq!(p7.rescale_exponents(1.0).unwrap(), (1.0, 1.0));
        let (a, n) = p7.rescale_exponents(8.0).unwrap();
        assert_relative_eq!(a, 2.0, epsilon = 1e-14);
        assert_eq!(n, 1.0);
        let p9 = make_params(9.0, Sign::Focusing).unwrap();
        let (a, _) = p9.rescale_exponents(16.0).unwrap();
        assert_relative_eq!(a, 2.0, epsilon = 1e-14);
        assert_eq!(p7.rescale_exponents(0.0), Err(Error::NonpositiveScale(0.0)));
        assert!(p7.rescale_exponents(-1.0).is_err());
    }

    #[test]
    fn signed_pow_is_odd() {
        assert_eq!(signed_pow(-2.0, 7.0), -128.0);
        assert_eq!(signed_pow(0.0, 7.5), 0.0);
    }

    proptest! {
        #[test]
        fn exponent_invariants(p in 5.0001f64..60.0) {
            let pr = make_params(p, Sign::Focusing).unwrap();
            prop_assert!(pr.m() > 2.0);
            prop_assert!(pr.s_c() > 1.0 && pr.s_c() < 1.5);
            prop_assert!(4.0 * pr.m() > 8.0);
            prop_assert!((pr.s_c() - (1.5 - 1.0 / pr.m())).abs() < 1e-14);
        }
    }
}
