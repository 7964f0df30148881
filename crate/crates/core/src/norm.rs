//! Exact norms `|p|^e` with rational exponents.

use std::cmp::Ordering;
use std::fmt;

use num::rational::Ratio;
use num::{One, Signed, Zero};

/// Rational exponent type used for norms.
pub type Exponent = Ratio<i64>;

/// A norm value `|p|^e = p^(-e)`, or the norm of zero.
///
/// Ordering follows the real value: a larger exponent is a smaller norm and
/// the zero element is below everything.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct NormValue(Option<Exponent>);

impl NormValue {
    pub const ZERO: NormValue = NormValue(None);

    pub fn one() -> Self {
        NormValue(Some(Exponent::zero()))
    }

    pub fn from_exponent(e: Exponent) -> Self {
        NormValue(Some(e))
    }

    pub fn from_valuation(v: i64) -> Self {
        NormValue(Some(Exponent::from_integer(v)))
    }

    /// `ω = |p|^{1/(p-1)}`.
    pub fn omega(p: u32) -> Self {
        NormValue(Some(Exponent::new(1, p as i64 - 1)))
    }

    pub fn exponent(&self) -> Option<Exponent> {
        self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_none()
    }

    #[allow(clippy::should_implement_trait)]
    pub fn mul(self, other: NormValue) -> NormValue {
        match (self.0, other.0) {
            (Some(a), Some(b)) => NormValue(Some(a + b)),
            _ => NormValue::ZERO,
        }
    }

    /// `self / other`; `None` when `other` is zero.
    #[allow(clippy::should_implement_trait)]
    pub fn div(self, other: NormValue) -> Option<NormValue> {
        let b = other.0?;
        Some(match self.0 {
            Some(a) => NormValue(Some(a - b)),
            None => NormValue::ZERO,
        })
    }

    pub fn inv(self) -> Option<NormValue> {
        NormValue::one().div(self)
    }

    /// `self^r` for rational `r`; `None` for `0^r` with `r <= 0`.
    pub fn powr(self, r: Exponent) -> Option<NormValue> {
        match self.0 {
            Some(a) => Some(NormValue(Some(a * r))),
            None if r.is_positive() => Some(NormValue::ZERO),
            None => None,
        }
    }

    pub fn powi(self, k: i64) -> Option<NormValue> {
        self.powr(Exponent::from_integer(k))
    }

    pub fn is_less_than_one(&self) -> bool {
        *self < NormValue::one()
    }

    /// Natural log of the real value, for plotting only.
    pub fn ln(&self, p: u32) -> f64 {
        match self.0 {
            Some(e) => -(*e.numer() as f64 / *e.denom() as f64) * (p as f64).ln(),
            None => f64::NEG_INFINITY,
        }
    }

    pub fn exponent_string(&self) -> Option<String> {
        self.0.map(|e| e.to_string())
    }

    pub fn parse_exponent(s: &str) -> Option<NormValue> {
        let s = s.trim();
        if s == "zero" {
            return Some(NormValue::ZERO);
        }
        let e = match s.split_once('/') {
            Some((n, d)) => {
                let d: i64 = d.trim().parse().ok()?;
                if d == 0 {
                    return None;
                }
                Exponent::new(n.trim().parse().ok()?, d)
            }
            None => Exponent::from_integer(s.parse().ok()?),
        };
        Some(NormValue(Some(e)))
    }
}

impl Ord for NormValue {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self.0, other.0) {
            (None, None) => Ordering::Equal,
            (None, Some(_)) => Ordering::Less,
            (Some(_), None) => Ordering::Greater,
            (Some(a), Some(b)) => b.cmp(&a),
        }
    }
}

impl PartialOrd for NormValue {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for NormValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.0 {
            None => write!(f, "0"),
            Some(e) if e.is_one() => write!(f, "|p|"),
            Some(e) if e.is_integer() => write!(f, "|p|^{}", e),
            Some(e) => write!(f, "|p|^({})", e),
        }
    }
}
