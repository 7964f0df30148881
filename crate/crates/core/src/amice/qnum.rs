//! The q parameter and q-numerics: q-integers, q-factorials, q-binomials,
//! binomial powers `q^α`, `κ` and `ω_q`.

use num::rational::Ratio;

use crate::error::{Error, Result};
use crate::norm::{Exponent, NormValue};
use crate::padic::PAdic;

const KAPPA_CAP: u32 = 64;

/// A deformation parameter `q ∈ Q_p` with `|q - 1| < 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QParam {
    q: PAdic,
    q_minus_one: PAdic,
    t: i64,
    kappa: u32,
    omega_q: NormValue,
}

impl QParam {
    pub fn new(q: PAdic) -> Result<Self> {
        let p = q.prime();
        let one = PAdic::one(p, q.rel_precision().unwrap_or(1));
        let qm1 = q.sub(&one);
        let t = match qm1.valuation() {
            Some(t) => t,
            None => return Err(Error::PreconditionViolated(format!("|q - 1| is not determined at this precision (q = {q})"))),
        };
        if t < 1 {
            return Err(Error::PreconditionViolated(format!("|q - 1| = |p|^{t} is not < 1")));
        }
        let mut qp = QParam { q, q_minus_one: qm1, t, kappa: 0, omega_q: NormValue::ZERO };
        let w = NormValue::omega(p);
        let mut found = None;
        for k in 1..=KAPPA_CAP {
            let vk = t + qp.q_int(k as i64).valuation_lower_bound().unwrap_or(i64::MAX / 4);
            if NormValue::from_valuation(vk) < w {
                found = Some((k, vk));
                break;
            }
        }
        let (k, vk) = found.ok_or_else(|| Error::PreconditionViolated(format!("no kappa <= {KAPPA_CAP} found")))?;
        qp.kappa = k;
        let e = (Exponent::from_integer(vk - t) + Exponent::new(1, p as i64 - 1)) / Exponent::from_integer(k as i64);
        qp.omega_q = NormValue::from_exponent(e);
        Ok(qp)
    }

    pub fn from_int(p: u32, q: i64, prec: u32) -> Result<Self> {
        QParam::new(PAdic::from_int(p, q, prec))
    }

    /// `q = 1 + p^t` at the given precision.
    pub fn one_plus_p_pow(p: u32, t: i64, prec: u32) -> Result<Self> {
        QParam::new(PAdic::one(p, prec).add(&PAdic::one(p, prec).shift(t)))
    }

    pub fn prime(&self) -> u32 {
        self.q.prime()
    }

    pub fn q(&self) -> &PAdic {
        &self.q
    }

    pub fn q_minus_one(&self) -> &PAdic {
        &self.q_minus_one
    }

    /// `v(q - 1)`.
    pub fn t(&self) -> i64 {
        self.t
    }

    pub fn q_minus_one_norm(&self) -> NormValue {
        NormValue::from_valuation(self.t)
    }

    pub fn kappa(&self) -> u32 {
        self.kappa
    }

    pub fn omega_q(&self) -> NormValue {
        self.omega_q
    }

    /// `|q - 1| < ω`.
    pub fn is_small(&self) -> bool {
        self.q_minus_one_norm() < NormValue::omega(self.prime())
    }

    pub fn require_small(&self) -> Result<()> {
        if self.is_small() {
            Ok(())
        } else {
            Err(Error::PreconditionViolated(format!("|q - 1| = |p|^{} is not < omega", self.t)))
        }
    }

    fn one(&self) -> PAdic {
        PAdic::one(self.prime(), self.q.rel_precision().unwrap_or(1))
    }

    pub fn q_pow(&self, i: i64) -> PAdic {
        self.q.pow(i).expect("q is a unit")
    }

    /// `([n]_q, q^n)` for `n ≥ 0` by doubling.
    fn q_int_pow(&self, n: u64) -> (PAdic, PAdic) {
        if n == 0 {
            return (PAdic::zero(self.prime()), self.one());
        }
        if n.is_multiple_of(2) {
            let (s, qk) = self.q_int_pow(n / 2);
            (s.mul(&self.one().add(&qk)), qk.mul(&qk))
        } else {
            let (s, qk) = self.q_int_pow(n - 1);
            (s.add(&qk), qk.mul(&self.q))
        }
    }

    /// `[i]_q = (q^i - 1)/(q - 1)` for any integer `i`.
    pub fn q_int(&self, i: i64) -> PAdic {
        let (s, qn) = self.q_int_pow(i.unsigned_abs());
        if i >= 0 {
            s
        } else {
            s.mul(&qn.inv().expect("unit")).neg()
        }
    }

    /// `[n]_q! = [1]_q [2]_q ⋯ [n]_q`.
    pub fn q_factorial(&self, n: u64) -> PAdic {
        let mut acc = self.one();
        for i in 1..=n {
            acc = acc.mul(&self.q_int(i as i64));
        }
        acc
    }

    /// Gaussian binomial `[n]_q! / ([k]_q! [n-k]_q!)`.
    pub fn q_binomial(&self, n: u64, k: u64) -> Result<PAdic> {
        if k > n {
            return Ok(PAdic::zero(self.prime()));
        }
        let mut acc = self.one();
        for i in 0..k {
            acc = acc.mul(&self.q_int((n - i) as i64)).div(&self.q_int((i + 1) as i64))?;
        }
        Ok(acc)
    }

    /// `q^α = Σ_k C(α, k) (q-1)^k`, truncated after `terms` terms or at the
    /// working precision.
    pub fn q_power(&self, alpha: &PAdic, terms: Option<usize>) -> Result<PAdic> {
        let p = self.prime();
        if alpha.is_exact_zero() {
            return Ok(self.one());
        }
        let sigma = (-alpha.valuation_lower_bound().unwrap_or(0)).max(0);
        let c = Exponent::from_integer(self.t - sigma) - Exponent::new(1, p as i64 - 1);
        if c <= Exponent::from_integer(0) {
            return Err(Error::OutOfConvergenceDomain(format!(
                "|q - 1| = |p|^{} is not < omega / max(|alpha|, 1) with |alpha| = |p|^{}",
                self.t, -sigma
            )));
        }
        let target = self.q_minus_one.abs_precision().unwrap_or(64);
        let k_max = match terms {
            Some(k) => k.max(1),
            None => (Exponent::from_integer(target) / c).ceil().to_integer().max(1) as usize,
        };
        let mut coef = self.one();
        let mut pw = self.one();
        let mut acc = self.one();
        for k in 1..=k_max {
            let km1 = PAdic::from_int(p, k as i64 - 1, alpha.rel_precision().unwrap_or(64));
            coef = coef.mul(&alpha.sub(&km1)).div_int(k as i64)?;
            pw = pw.mul(&self.q_minus_one);
            acc = acc.add(&coef.mul(&pw));
        }
        Ok(acc)
    }

    /// `log q`.
    pub fn log_q(&self) -> Result<PAdic> {
        padic_log(&self.q)
    }
}

/// `log x = Σ (-1)^{k+1} (x-1)^k / k` for `|x - 1| < 1`.
pub fn padic_log(x: &PAdic) -> Result<PAdic> {
    let p = x.prime();
    let one = PAdic::one(p, x.rel_precision().unwrap_or(1));
    let y = x.sub(&one);
    let s = match y.valuation() {
        Some(s) => s,
        None if y.is_exact_zero() => return Ok(PAdic::zero(p)),
        None => return Ok(y),
    };
    if s < 1 {
        return Err(Error::LogDomain(format!("|x - 1| = |p|^{s} is not < 1")));
    }
    let a = y.abs_precision().unwrap_or(s + 64);
    let mut acc = PAdic::zero(p);
    let mut yk = one.clone();
    let mut k: i64 = 1;
    loop {
        yk = yk.mul(&y);
        let log_k = (k as f64).ln() / (p as f64).ln();
        if (k * s) as f64 - log_k >= a as f64 + 1.0 {
            break;
        }
        let term = yk.div_int(k)?;
        acc = if k % 2 == 1 { acc.add(&term) } else { acc.sub(&term) };
        k += 1;
    }
    Ok(acc)
}

/// `ω = |p|^{1/(p-1)}`.
pub fn omega(p: u32) -> NormValue {
    NormValue::omega(p)
}

pub fn omega_q(q: &QParam) -> NormValue {
    q.omega_q()
}

pub fn kappa(q: &QParam) -> u32 {
    q.kappa()
}

/// Requests accepted by [`q_numerics`].
#[derive(Clone, Debug)]
pub enum QNumeric {
    QInt(i64),
    QFactorial(u64),
    QBinomial(u64, u64),
    QPower { alpha: PAdic, terms: Option<usize> },
    Omega,
    OmegaQ,
    Kappa,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum QValue {
    Value(PAdic),
    Norm(NormValue),
    Int(u32),
}

pub fn q_numerics(kind: &QNumeric, p: u32, q: Option<&QParam>) -> Result<QValue> {
    let need = || q.ok_or_else(|| Error::PreconditionViolated("this quantity needs q".into()));
    Ok(match kind {
        QNumeric::Omega => QValue::Norm(omega(p)),
        QNumeric::OmegaQ => QValue::Norm(need()?.omega_q()),
        QNumeric::Kappa => QValue::Int(need()?.kappa()),
        QNumeric::QInt(i) => QValue::Value(need()?.q_int(*i)),
        QNumeric::QFactorial(n) => QValue::Value(need()?.q_factorial(*n)),
        QNumeric::QBinomial(n, k) => QValue::Value(need()?.q_binomial(*n, *k)?),
        QNumeric::QPower { alpha, terms } => QValue::Value(need()?.q_power(alpha, *terms)?),
    })
}

/// Exponent of `|[n]_q!|^{1/n}`.
pub fn q_factorial_root_exponent(q: &QParam, n: u64) -> Option<Exponent> {
    q.q_factorial(n).valuation().map(|v| Ratio::new(v, n as i64))
}

#[cfg(test)]
mod tests {
    use super::*;

    const N: u32 = 24;

    #[test]
    fn q_integers_and_factorials() {
        let q = QParam::from_int(3, 4, N).unwrap();
        assert_eq!(q.q_int(1).to_i64(), Some(1));
        assert_eq!(q.q_int(3).to_i64(), Some(21));
        assert_eq!(q.q_factorial(1).to_i64(), Some(1));
        assert_eq!(q.q_factorial(3).to_i64(), Some(21 * 5));
        let back = q.q_int(-2).mul(q.q_minus_one()).add(&PAdic::one(3, N));
        assert!(back.agrees_with(&q.q_pow(-2)));
        assert_eq!(q.q_binomial(4, 2).unwrap().to_i64(), Some(1 + 4 + 2 * 16 + 64 + 256));
    }

    #[test]
    fn kappa_and_omega_q() {
        let q = QParam::from_int(3, 4, N).unwrap();
        assert_eq!(q.kappa(), 1);
        assert_eq!(q.omega_q(), omega(3));
        let q = QParam::from_int(2, 3, N).unwrap();
        assert_eq!(q.kappa(), 2);
        assert_eq!(q.omega_q().exponent(), Some(Exponent::new(3, 2)));
        let q = QParam::from_int(2, 5, N).unwrap();
        assert_eq!((q.kappa(), q.omega_q()), (1, omega(2)));
        assert!(QParam::from_int(5, 2, N).is_err());
    }

    #[test]
    fn q_power_integer_exponent() {
        let q = QParam::from_int(5, 26, N).unwrap();
        let a = q.q_power(&PAdic::from_int(5, 3, N), None).unwrap();
        assert!(a.agrees_with(&PAdic::from_int(5, 26 * 26 * 26, N)));
        let half = PAdic::parse_rational(5, "1/2", N).unwrap();
        let r = q.q_power(&half, None).unwrap();
        assert!(r.mul(&r).agrees_with(q.q()));
        let bad = QParam::from_int(2, 5, N).unwrap();
        assert!(matches!(bad.q_power(&PAdic::parse_rational(2, "1/2", N).unwrap(), None), Err(Error::OutOfConvergenceDomain(_))));
    }

    #[test]
    fn log_is_additive() {
        let x = PAdic::from_int(3, 4, N);
        let y = PAdic::from_int(3, 10, N);
        let lhs = padic_log(&x.mul(&y)).unwrap();
        let rhs = padic_log(&x).unwrap().add(&padic_log(&y).unwrap());
        assert!(lhs.agrees_with(&rhs));
        assert!(matches!(padic_log(&PAdic::from_int(3, 2, N)), Err(Error::LogDomain(_))));
    }
}
