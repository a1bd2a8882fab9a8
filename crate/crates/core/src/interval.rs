//! Compact real intervals with the endpoint arithmetic, the generalized
//! Hukuhara difference and the Pompeiu-Hausdorff distance.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A compact interval `[lo, hi]` with finite endpoints and `lo <= hi`.
///
/// Equality is exact endpoint equality. Use [`Interval::dist`] with a
/// tolerance for approximate comparison.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "[f64; 2]", into = "[f64; 2]")]
pub struct Interval {
    lo: f64,
    hi: f64,
}

impl Interval {
    pub const ZERO: Interval = Interval { lo: 0.0, hi: 0.0 };

    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !lo.is_finite() || !hi.is_finite() {
            return Err(Error::NonFinite(format!("interval endpoints [{lo}, {hi}]")));
        }
        if lo > hi {
            return Err(Error::Inverted { lo, hi });
        }
        Ok(Interval { lo, hi })
    }

    /// The degenerate interval `[c, c]`.
    pub fn degenerate(c: f64) -> Result<Self> {
        Self::new(c, c)
    }

    /// Builds the interval from endpoints already known to be ordered and finite.
    pub(crate) fn from_ordered(lo: f64, hi: f64) -> Self {
        debug_assert!(lo <= hi && lo.is_finite() && hi.is_finite());
        Interval { lo, hi }
    }

    #[inline]
    pub fn lo(&self) -> f64 {
        self.lo
    }

    #[inline]
    pub fn hi(&self) -> f64 {
        self.hi
    }

    #[inline]
    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn is_degenerate(&self) -> bool {
        self.lo == self.hi
    }

    /// `[a.lo + b.lo, a.hi + b.hi]`.
    #[allow(clippy::should_implement_trait)] // fallible, unlike `Add`
    pub fn add(self, other: Interval) -> Result<Self> {
        checked(self.lo + other.lo, self.hi + other.hi, "interval sum")
    }

    /// Scalar multiple `t * A`; a negative factor swaps the endpoints.
    pub fn scale(self, t: f64) -> Result<Self> {
        if !t.is_finite() {
            return Err(Error::Argument(format!("non-finite scale factor {t}")));
        }
        let (lo, hi) = if t >= 0.0 {
            (t * self.lo, t * self.hi)
        } else {
            (t * self.hi, t * self.lo)
        };
        // 0 * x with x < 0 gives -0.0; keep zero canonical.
        checked(lo + 0.0, hi + 0.0, "scalar multiple")
    }

    /// `-A = [-hi, -lo]`.
    #[allow(clippy::should_implement_trait)]
    pub fn neg(self) -> Self {
        Interval {
            lo: -self.hi,
            hi: -self.lo,
        }
    }

    /// Generalized Hukuhara difference `A ⊖ B`.
    pub fn gh_sub(self, other: Interval) -> Result<Self> {
        let dl = self.lo - other.lo;
        let du = self.hi - other.hi;
        checked(dl.min(du), dl.max(du), "gH difference")
    }

    /// Pompeiu-Hausdorff distance, `max(|a.lo - b.lo|, |a.hi - b.hi|)`.
    pub fn dist(self, other: Interval) -> f64 {
        (self.lo - other.lo).abs().max((self.hi - other.hi).abs())
    }

    /// `max{|c| : c in A}`.
    pub fn norm(self) -> f64 {
        self.lo.abs().max(self.hi.abs())
    }

    /// Image under a nondecreasing real map applied to both endpoints.
    pub fn map_monotone(self, f: impl Fn(f64) -> f64) -> Result<Self> {
        let (lo, hi) = (f(self.lo), f(self.hi));
        if !lo.is_finite() || !hi.is_finite() {
            return Err(Error::Range(format!("monotone image of {self}")));
        }
        Interval::new(lo, hi)
    }
}

fn checked(lo: f64, hi: f64, what: &str) -> Result<Interval> {
    if !lo.is_finite() || !hi.is_finite() {
        return Err(Error::Range(format!("{what} overflowed to [{lo}, {hi}]")));
    }
    Ok(Interval { lo, hi })
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}

impl TryFrom<[f64; 2]> for Interval {
    type Error = Error;

    fn try_from(v: [f64; 2]) -> Result<Self> {
        Interval::new(v[0], v[1])
    }
}

impl From<Interval> for [f64; 2] {
    fn from(a: Interval) -> Self {
        [a.lo, a.hi]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn iv(lo: f64, hi: f64) -> Interval {
        Interval::new(lo, hi).unwrap()
    }

    #[test]
    fn construction_rejects_bad_endpoints() {
        assert_eq!(
            Interval::new(2.0, 1.0),
            Err(Error::Inverted { lo: 2.0, hi: 1.0 })
        );
        assert!(matches!(
            Interval::new(f64::NAN, 1.0),
            Err(Error::NonFinite(_))
        ));
        assert!(matches!(
            Interval::new(0.0, f64::INFINITY),
            Err(Error::NonFinite(_))
        ));
        assert!(Interval::degenerate(3.0).unwrap().is_degenerate());
    }

    #[test]
    fn add_examples() {
        assert_eq!(iv(1.0, 2.0).add(iv(3.0, 5.0)).unwrap(), iv(4.0, 7.0));
        assert_eq!(iv(0.0, 0.0).add(iv(2.0, 3.0)).unwrap(), iv(2.0, 3.0));
        assert_eq!(iv(-1.0, 1.0).add(iv(-1.0, 1.0)).unwrap(), iv(-2.0, 2.0));
    }

    #[test]
    fn add_overflow_is_range_error() {
        let big = iv(f64::MAX, f64::MAX);
        assert!(matches!(big.add(big), Err(Error::Range(_))));
    }

    #[test]
    fn scale_examples() {
        assert_eq!(iv(1.0, 3.0).scale(2.0).unwrap(), iv(2.0, 6.0));
        assert_eq!(iv(1.0, 3.0).scale(-2.0).unwrap(), iv(-6.0, -2.0));
        assert_eq!(iv(1.0, 3.0).scale(0.0).unwrap(), iv(0.0, 0.0));
        assert!(matches!(
            iv(1.0, 3.0).scale(f64::NAN),
            Err(Error::Argument(_))
        ));
    }

    #[test]
    fn gh_sub_examples() {
        assert_eq!(iv(1.0, 3.0).gh_sub(iv(1.0, 3.0)).unwrap(), Interval::ZERO);
        assert_eq!(iv(1.0, 3.0).gh_sub(iv(0.0, 1.0)).unwrap(), iv(1.0, 2.0));
        assert_eq!(iv(0.0, 1.0).gh_sub(iv(1.0, 3.0)).unwrap(), iv(-2.0, -1.0));
    }

    #[test]
    fn dist_and_norm_examples() {
        assert_eq!(iv(0.0, 2.0).dist(iv(1.0, 3.0)), 1.0);
        assert_eq!(iv(0.0, 0.0).dist(iv(-3.0, 2.0)), 3.0);
        assert_eq!(iv(-3.0, 2.0).norm(), 3.0);
        assert_eq!(Interval::ZERO.norm(), 0.0);
        assert_eq!(iv(1.0, 4.0).norm(), 4.0);
    }

    #[test]
    fn serde_as_pair() {
        let a = iv(-0.5, 2.0);
        let s = serde_json::to_string(&a).unwrap();
        assert_eq!(s, "[-0.5,2.0]");
        assert_eq!(serde_json::from_str::<Interval>(&s).unwrap(), a);
        assert!(serde_json::from_str::<Interval>("[2.0,1.0]").is_err());
    }

    fn arb_interval() -> impl Strategy<Value = Interval> {
        (-1e3..1e3f64, 0.0..1e3f64).prop_map(|(lo, w)| iv(lo, lo + w))
    }

    proptest! {
        #[test]
        fn dist_is_norm_of_gh_difference(a in arb_interval(), b in arb_interval()) {
            prop_assert_eq!(a.dist(b), a.gh_sub(b).unwrap().norm());
        }

        #[test]
        fn gh_difference_defining_property(a in arb_interval(), b in arb_interval()) {
            let c = a.gh_sub(b).unwrap();
            let case_a = b.add(c).unwrap();
            let case_b = a.add(c.neg()).unwrap();
            prop_assert!(a.dist(case_a) <= 1e-9 || b.dist(case_b) <= 1e-9);
        }

        #[test]
        fn dist_translation_invariant(a in arb_interval(), b in arb_interval(), c in arb_interval()) {
            let lhs = a.add(c).unwrap().dist(b.add(c).unwrap());
            prop_assert!((lhs - a.dist(b)).abs() <= 1e-9);
        }

        #[test]
        fn nonnegative_scales_compose(a in arb_interval(), t in 0.0..10.0f64, s in 0.0..10.0f64) {
            let lhs = a.scale(s).unwrap().scale(t).unwrap();
            let rhs = a.scale(t * s).unwrap();
            prop_assert!(lhs.dist(rhs) <= 1e-9 * (1.0 + a.norm()) * (1.0 + t * s));
        }
    }
}
