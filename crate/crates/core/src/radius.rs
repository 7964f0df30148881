//! Iterates `g_[k]`, radius of convergence estimates, the small-radius closed
//! forms and the sharp `> ω` test.

use serde::Serialize;

use crate::amice::{apply, DerivOp, LaurentWindow, QParam};
use crate::error::{Error, Result};
use crate::norm::{Exponent, NormValue};
use crate::padic::PAdic;

pub const DEFAULT_K_MAX: usize = 64;
pub const DEFAULT_S_MAX: usize = 64;
/// Iterate windows are clamped to `[-budget, budget]`.
pub const DEFAULT_BUDGET: i64 = 4096;

/// A rank-one operator: `∂_T - g` or `σ_q - a`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum OperatorSpec {
    Diff { g: LaurentWindow },
    QDiff { a: LaurentWindow, q: QParam },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum OpKind {
    Diff,
    QDiff,
}

impl OpKind {
    pub fn parse(s: &str) -> Option<OpKind> {
        match s {
            "diff" => Some(OpKind::Diff),
            "qdiff" => Some(OpKind::QDiff),
            _ => None,
        }
    }
}

impl OperatorSpec {
    pub fn diff(g: LaurentWindow) -> Self {
        OperatorSpec::Diff { g }
    }

    pub fn qdiff(a: LaurentWindow, q: QParam) -> Result<Self> {
        if a.prime() != q.prime() {
            return Err(Error::PrimeMismatch(a.prime(), q.prime()));
        }
        Ok(OperatorSpec::QDiff { a, q })
    }

    pub fn kind(&self) -> OpKind {
        match self {
            OperatorSpec::Diff { .. } => OpKind::Diff,
            OperatorSpec::QDiff { .. } => OpKind::QDiff,
        }
    }

    pub fn prime(&self) -> u32 {
        self.series().prime()
    }

    /// `g` or `a`.
    pub fn series(&self) -> &LaurentWindow {
        match self {
            OperatorSpec::Diff { g } => g,
            OperatorSpec::QDiff { a, .. } => a,
        }
    }

    pub fn q(&self) -> Option<&QParam> {
        match self {
            OperatorSpec::Diff { .. } => None,
            OperatorSpec::QDiff { q, .. } => Some(q),
        }
    }

    /// `ω` or `ω_q`.
    pub fn omega_prime(&self) -> NormValue {
        match self {
            OperatorSpec::Diff { g } => NormValue::omega(g.prime()),
            OperatorSpec::QDiff { q, .. } => q.omega_q(),
        }
    }

    /// `g/T` or `(a - 1)/((q - 1)T)`.
    pub fn g1(&self) -> Result<LaurentWindow> {
        match self {
            OperatorSpec::Diff { g } => Ok(g.shift(-1)),
            OperatorSpec::QDiff { a, q } => Ok(a.minus_one().scale(&q.q_minus_one().inv()?).shift(-1)),
        }
    }
}

fn clamp(w: LaurentWindow, budget: i64) -> LaurentWindow {
    if w.i_min() >= -budget && w.i_max() <= budget {
        w
    } else {
        w.with_window(w.i_min().max(-budget), w.i_max().min(budget))
    }
}

/// `g_[1], …, g_[k_max]`.
pub fn iterates(op: &OperatorSpec, k_max: usize) -> Result<Vec<LaurentWindow>> {
    iterates_with_budget(op, k_max, DEFAULT_BUDGET)
}

pub fn iterates_with_budget(op: &OperatorSpec, k_max: usize, budget: i64) -> Result<Vec<LaurentWindow>> {
    if k_max == 0 {
        return Err(Error::PreconditionViolated("k_max must be at least 1".into()));
    }
    let g1 = clamp(op.g1()?, budget);
    let mut out = vec![g1.clone()];
    for _ in 1..k_max {
        let gk = out.last().expect("nonempty");
        let next = match op {
            OperatorSpec::Diff { .. } => apply(DerivOp::DdT, gk, None)?.add(&gk.mul_full(&g1)),
            OperatorSpec::QDiff { q, .. } => {
                let d = apply(DerivOp::DQ, gk, Some(q))?;
                let s = apply(DerivOp::SigmaQ, gk, Some(q))?;
                d.add(&s.mul_full(&g1))
            }
        };
        out.push(clamp(next, budget));
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Provenance {
    SmallRadius,
    SharpTest,
    ByConstruction,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Relation {
    Equal,
    GreaterThan,
}

/// A certified statement `Ray = value` or `Ray > value`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Certified {
    pub value: NormValue,
    pub relation: Relation,
    pub provenance: Provenance,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RadiusReport {
    pub rho: NormValue,
    pub omega_prime: NormValue,
    /// `min(ρ, ω' |g_[k]|_ρ^{-1/k})` for `k = 1..k_max`.
    pub estimates: Vec<NormValue>,
    pub running_min_tail: NormValue,
    pub exact: Option<Certified>,
    /// Some iterate window hit the coefficient budget.
    pub truncated: bool,
}

fn estimate(omega: NormValue, rho: NormValue, norm: NormValue, k: usize) -> NormValue {
    if norm.is_zero() {
        return rho;
    }
    let r = norm.powr(Exponent::new(-1, k as i64)).expect("nonzero");
    rho.min(omega.mul(r))
}

/// Finite-k radius report at `ρ`.
pub fn ray_estimate(op: &OperatorSpec, rho: NormValue, k_max: usize) -> Result<RadiusReport> {
    ray_estimate_with(op, rho, k_max, DEFAULT_BUDGET)
}

pub fn ray_estimate_with(op: &OperatorSpec, rho: NormValue, k_max: usize, budget: i64) -> Result<RadiusReport> {
    if rho.is_zero() {
        return Err(Error::PreconditionViolated("rho must be positive".into()));
    }
    let its = iterates_with_budget(op, k_max, budget)?;
    let w = op.omega_prime();
    let estimates: Vec<NormValue> = its.iter().enumerate().map(|(k, g)| estimate(w, rho, g.gauss_norm(rho), k + 1)).collect();
    let tail_start = k_max.div_ceil(2).max(1) - 1;
    let running_min_tail = estimates[tail_start..].iter().copied().min().unwrap_or(rho);
    let g1 = &its[0];
    let n1 = g1.gauss_norm(rho);
    let rho_inv = rho.inv().expect("positive");
    let exact = if g1.is_zero() {
        Some(Certified { value: rho, relation: Relation::Equal, provenance: Provenance::ByConstruction })
    } else if n1 > rho_inv {
        Some(Certified { value: w.div(n1).expect("nonzero"), relation: Relation::Equal, provenance: Provenance::SmallRadius })
    } else if rho == NormValue::one() {
        sharp_scan(&its).map(|_| Certified { value: w, relation: Relation::GreaterThan, provenance: Provenance::SharpTest })
    } else {
        None
    };
    Ok(RadiusReport { rho, omega_prime: w, estimates, running_min_tail, exact, truncated: its.iter().any(LaurentWindow::truncated) })
}

/// Closed form in the small-radius regime, when it applies.
pub fn small_radius(op: &OperatorSpec, rho: NormValue) -> Result<Option<NormValue>> {
    let n1 = op.g1()?.gauss_norm(rho);
    if n1 > rho.inv().expect("positive") {
        Ok(Some(op.omega_prime().div(n1).expect("nonzero")))
    } else {
        Ok(None)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SharpOutcome {
    ProvenGreaterThanOmega(usize),
    Inconclusive,
}

fn sharp_scan(its: &[LaurentWindow]) -> Option<usize> {
    its.iter().position(|g| g.gauss_norm_bound(NormValue::one()) < NormValue::one()).map(|s| s + 1)
}

/// Looks for `s ≤ s_max` with `|g_[s]|_1 < 1`.
pub fn sharp_test(op: &OperatorSpec, s_max: usize) -> Result<SharpOutcome> {
    let g1 = op.g1()?;
    if g1.gauss_norm_bound(NormValue::one()) > NormValue::one() {
        return Err(Error::PreconditionViolated("|g_[1]|_1 <= 1 fails".into()));
    }
    let its = iterates(op, s_max)?;
    Ok(match sharp_scan(&its) {
        Some(s) => SharpOutcome::ProvenGreaterThanOmega(s),
        None => SharpOutcome::Inconclusive,
    })
}

/// One row of the `(log ρ, log(Ray/ρ))` table.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ProfileRow {
    pub rho_exponent: String,
    pub ratio_exponent: String,
    pub certified: bool,
    pub log_rho: f64,
    pub log_ratio: f64,
}

/// `Ray/ρ` over several radii, using the certified value when there is one.
pub fn ray_profile(op: &OperatorSpec, rhos: &[NormValue], k_max: usize) -> Result<Vec<ProfileRow>> {
    let p = op.prime();
    rhos.iter()
        .map(|&rho| {
            let rep = ray_estimate(op, rho, k_max)?;
            let (ray, certified) = match rep.exact {
                Some(c) if c.relation == Relation::Equal => (c.value, true),
                _ => (rep.running_min_tail, false),
            };
            let ratio = ray.div(rho).expect("positive");
            Ok(ProfileRow {
                rho_exponent: rho.exponent_string().unwrap_or_default(),
                ratio_exponent: ratio.exponent_string().unwrap_or_default(),
                certified,
                log_rho: rho.ln(p),
                log_ratio: ratio.ln(p),
            })
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProfileEntry {
    pub n: usize,
    /// `|S_n|^{1/n} / |q - 1|`, or an upper bound when `bound_only`.
    pub value: NormValue,
    pub bound_only: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConstantProfile {
    pub entries: Vec<ProfileEntry>,
    /// Common value of the last quarter of exact entries, if they agree.
    pub stabilized: Option<NormValue>,
}

/// `S_n = Σ_j (-1)^j C(n, j)_{q^{-1}} q^{-j(j-1)/2} λ^j` and the profile
/// `|S_n|^{1/n} / |q - 1|` at `ρ = 1`.
pub fn constant_qdiff_profile(lambda: &PAdic, q: &QParam, n_max: usize) -> Result<ConstantProfile> {
    let qi = QParam::new(q.q().inv()?)?;
    let t = q.t();
    let mut entries = Vec::with_capacity(n_max);
    for n in 1..=n_max {
        let mut s = PAdic::zero(q.prime());
        let mut lj = PAdic::one(q.prime(), lambda.rel_precision().unwrap_or(1));
        for j in 0..=n {
            let jj = j as i64;
            let term = qi.q_binomial(n as u64, j as u64)?.mul(&q.q_pow(-(jj * (jj - 1) / 2))).mul(&lj);
            s = if j % 2 == 0 { s.add(&term) } else { s.sub(&term) };
            lj = lj.mul(lambda);
        }
        let bound_only = s.valuation().is_none();
        let value = match s.valuation_lower_bound() {
            None => NormValue::ZERO,
            Some(v) => NormValue::from_exponent(Exponent::new(v, n as i64) - Exponent::from_integer(t)),
        };
        entries.push(ProfileEntry { n, value, bound_only });
    }
    let exact: Vec<&ProfileEntry> = entries.iter().filter(|e| !e.bound_only).collect();
    let quarter = exact.len().div_ceil(4);
    let stabilized = match exact.last() {
        Some(last) if exact[exact.len() - quarter..].iter().all(|e| e.value == last.value) => Some(last.value),
        _ => None,
    };
    Ok(ConstantProfile { entries, stabilized })
}

#[cfg(test)]
mod tests {
    use super::*;

    const N: u32 = 24;

    fn diff(p: u32, t: &[(i64, i64)]) -> OperatorSpec {
        OperatorSpec::diff(LaurentWindow::from_ints(p, N, t))
    }

    #[test]
    fn iterate_examples() {
        let its = iterates(&diff(2, &[(1, 1)]), 4).unwrap();
        for g in &its {
            assert!(g.agrees_with(&LaurentWindow::one(2, N)));
        }
        let its = iterates(&diff(3, &[(0, 1)]), 4).unwrap();
        assert!(its[0].agrees_with(&LaurentWindow::from_ints(3, N, &[(-1, 1)])));
        assert!(its[1].is_zero() && its[2].is_zero());
        let q = QParam::from_int(3, 4, N).unwrap();
        let op = OperatorSpec::qdiff(LaurentWindow::one(3, N), q).unwrap();
        assert!(iterates(&op, 3).unwrap().iter().all(LaurentWindow::is_zero));
    }

    #[test]
    fn small_radius_diff_example() {
        let g = LaurentWindow::from_terms(2, 1, 1, [(1, PAdic::parse_rational(2, "1/2", N).unwrap())]).unwrap();
        let rep = ray_estimate(&OperatorSpec::diff(g), NormValue::one(), 16).unwrap();
        let ex = rep.exact.unwrap();
        assert_eq!(ex.provenance, Provenance::SmallRadius);
        assert_eq!(ex.value, NormValue::from_valuation(2));
        assert!(rep.estimates.iter().all(|e| *e == ex.value));
    }

    #[test]
    fn zero_operator_is_exact() {
        let rep = ray_estimate(&OperatorSpec::diff(LaurentWindow::zero(5)), NormValue::one(), 4).unwrap();
        assert_eq!(rep.exact.unwrap().provenance, Provenance::ByConstruction);
        assert_eq!(rep.exact.unwrap().value, NormValue::one());
    }

    #[test]
    fn qdiff_small_radius_example() {
        let p = 3;
        let q = QParam::from_int(p, 4, N).unwrap();
        let a = LaurentWindow::from_ints(p, N, &[(0, 1), (1, 1)]);
        let op = OperatorSpec::qdiff(a, q.clone()).unwrap();
        let rep = ray_estimate(&op, NormValue::one(), 12).unwrap();
        let want = q.omega_q().mul(q.q_minus_one_norm());
        assert_eq!(rep.exact.unwrap().value, want);
        assert!(rep.estimates.iter().all(|e| *e == want));
    }

    #[test]
    fn sharp_examples() {
        assert_eq!(sharp_test(&diff(3, &[(1, 3)]), 8).unwrap(), SharpOutcome::ProvenGreaterThanOmega(1));
        assert_eq!(sharp_test(&diff(2, &[(1, 1)]), 16).unwrap(), SharpOutcome::Inconclusive);
        let q = QParam::from_int(5, 6, N).unwrap();
        let op = OperatorSpec::qdiff(LaurentWindow::one(5, N), q).unwrap();
        assert_eq!(sharp_test(&op, 4).unwrap(), SharpOutcome::ProvenGreaterThanOmega(1));
        let big = OperatorSpec::diff(LaurentWindow::from_terms(3, 1, 1, [(1, PAdic::parse_rational(3, "1/3", N).unwrap())]).unwrap());
        assert!(matches!(sharp_test(&big, 4), Err(Error::PreconditionViolated(_))));
    }

    #[test]
    fn constant_profile_matches_iterates() {
        let p = 3;
        let q = QParam::from_int(p, 10, N).unwrap();
        for lam in [4i64, 28, 10, 2 * 27 + 1] {
            let l = PAdic::from_int(p, lam, N);
            let prof = constant_qdiff_profile(&l, &q, 6).unwrap();
            let op = OperatorSpec::qdiff(LaurentWindow::constant(l), q.clone()).unwrap();
            let its = iterates(&op, 6).unwrap();
            for (e, g) in prof.entries.iter().zip(&its) {
                if e.bound_only {
                    continue;
                }
                let n = g.gauss_norm(NormValue::one()).powr(Exponent::new(1, e.n as i64)).unwrap();
                assert_eq!(n, e.value, "lambda {lam}, n {}", e.n);
            }
        }
    }

    #[test]
    fn constant_profile_for_q_is_degenerate() {
        let q = QParam::from_int(5, 6, N).unwrap();
        let prof = constant_qdiff_profile(q.q(), &q, 5).unwrap();
        assert!(!prof.entries[0].bound_only);
        assert!(prof.entries[1..].iter().all(|e| e.bound_only));
    }
}
