//! Witt-vector families, the solvability criteria for `∂_T - g` and
//! `σ_q - a`, Artin–Hasse type exponentials, canonical forms and
//! q-deformation.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num::Zero;
use serde::Serialize;

use crate::amice::{apply, padic_log, DerivOp, LaurentWindow, QParam, Side};
use crate::error::{Error, Result};
use crate::motzkin;
use crate::norm::{Exponent, NormValue};
use crate::padic::{coprime, p_power, PAdic};
use crate::radius::{OpKind, OperatorSpec};
use crate::witt::{column_height, ghost, unghost, PhantomVector, WittVector};

/// Default decay cut `|p|^2`.
pub const DEFAULT_DECAY_CUT: i64 = 2;
/// Largest window the q-difference generator will build.
pub const GENERATE_BUDGET: i64 = 2048;

/// Families `{λ_n}` indexed by `n ∈ J ∪ -J` together with `a_0`.
///
/// Slot `(n, m)` stands for the index `n p^m`; positive keys live on
/// `n p^m ≤ pos_bound`, negative keys on `|n| p^m ≤ neg_bound`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WittFamily {
    prime: u32,
    pub a0: PAdic,
    entries: BTreeMap<i64, WittVector>,
    neg_bound: i64,
    pos_bound: i64,
}

impl WittFamily {
    pub fn new(prime: u32, a0: PAdic, neg_bound: i64, pos_bound: i64) -> Result<Self> {
        if a0.prime() != prime {
            return Err(Error::PrimeMismatch(prime, a0.prime()));
        }
        if neg_bound < 0 || pos_bound < 0 {
            return Err(Error::PreconditionViolated("family bounds must be non-negative".into()));
        }
        Ok(WittFamily { prime, a0, entries: BTreeMap::new(), neg_bound, pos_bound })
    }

    pub fn empty(prime: u32, neg_bound: i64, pos_bound: i64) -> Self {
        WittFamily::new(prime, PAdic::zero(prime), neg_bound, pos_bound).expect("valid bounds")
    }

    pub fn prime(&self) -> u32 {
        self.prime
    }

    pub fn neg_bound(&self) -> i64 {
        self.neg_bound
    }

    pub fn pos_bound(&self) -> i64 {
        self.pos_bound
    }

    fn bound_for(&self, n: i64) -> i64 {
        if n < 0 {
            self.neg_bound
        } else {
            self.pos_bound
        }
    }

    /// Number of Witt slots available to `n` inside the window.
    pub fn column_len(&self, n: i64) -> usize {
        column_height(self.prime, n.unsigned_abs(), self.bound_for(n) as u64).map_or(0, |h| h + 1)
    }

    /// Stores `λ_n`, truncated to the slots the window represents.
    pub fn insert(&mut self, n: i64, w: WittVector) -> Result<()> {
        if w.prime() != self.prime {
            return Err(Error::PrimeMismatch(self.prime, w.prime()));
        }
        if n == 0 || !coprime(n, self.prime) {
            return Err(Error::PreconditionViolated(format!("index {n} is not a nonzero integer prime to p")));
        }
        let len = self.column_len(n);
        if len == 0 {
            return Err(Error::PreconditionViolated(format!("index {n} lies outside the family window")));
        }
        let w = if w.len() > len { w.resized(len) } else { w };
        self.entries.insert(n, w);
        Ok(())
    }

    pub fn get(&self, n: i64) -> Option<&WittVector> {
        self.entries.get(&n)
    }

    pub fn entries(&self) -> impl Iterator<Item = (i64, &WittVector)> + '_ {
        self.entries.iter().map(|(n, w)| (*n, w))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn witt_len(&self) -> usize {
        self.entries.values().map(WittVector::len).max().unwrap_or(0)
    }

    /// `λ_{n,m}`, zero when not stored.
    pub fn slot(&self, n: i64, m: usize) -> PAdic {
        self.entries.get(&n).and_then(|w| w.components().get(m).cloned()).unwrap_or_else(|| PAdic::zero(self.prime))
    }

    /// Overwrites `λ_{n,m}`, creating or padding the column as needed.
    pub fn set_slot(&mut self, n: i64, m: usize, x: PAdic) -> Result<()> {
        if m >= self.column_len(n) {
            return Err(Error::PreconditionViolated(format!("slot ({n}, {m}) lies outside the family window")));
        }
        let mut w = self.entries.get(&n).cloned().unwrap_or_else(|| WittVector::zero(self.prime, m + 1));
        if w.len() <= m {
            w = w.resized(m + 1);
        }
        w.set_component(m, x);
        self.insert(n, w)
    }

    /// All stored slots ordered by `n`, then `m`.
    pub fn slots(&self) -> impl Iterator<Item = (i64, usize, &PAdic)> + '_ {
        self.entries.iter().flat_map(|(n, w)| w.components().iter().enumerate().map(move |(m, c)| (*n, m, c)))
    }

    /// `λ_n` zero-padded to the full column over `bound`.
    fn padded(&self, n: i64, bound: i64) -> Option<WittVector> {
        let w = self.entries.get(&n)?;
        let h = column_height(self.prime, n.unsigned_abs(), bound as u64)?;
        Some(w.resized(h + 1))
    }

    /// Same `a_0` and slots within precision; missing slots count as zero.
    pub fn agrees_with(&self, o: &WittFamily) -> bool {
        if self.prime != o.prime || !self.a0.agrees_with(&o.a0) {
            return false;
        }
        let keys: BTreeSet<i64> = self.entries.keys().chain(o.entries.keys()).copied().collect();
        keys.into_iter().all(|n| {
            let len = self.get(n).map_or(0, WittVector::len).max(o.get(n).map_or(0, WittVector::len));
            (0..len).all(|m| self.slot(n, m).agrees_with(&o.slot(n, m)))
        })
    }

    /// Drops every slot outside the narrower window.
    pub fn restrict(&self, neg_bound: i64, pos_bound: i64) -> WittFamily {
        let mut out = WittFamily { entries: BTreeMap::new(), neg_bound, pos_bound, ..self.clone() };
        for (n, w) in self.entries() {
            let len = out.column_len(n).min(w.len());
            if len > 0 {
                out.entries.insert(n, w.resized(len));
            }
        }
        out
    }

    /// The extraction window matching this family.
    pub fn window(&self) -> FamilyWindow {
        FamilyWindow { neg_bound: Some(self.neg_bound), pos_bound: Some(self.pos_bound), max_len: None }
    }
}

/// Bounds used when reading a family off an operator.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct FamilyWindow {
    pub neg_bound: Option<i64>,
    pub pos_bound: Option<i64>,
    /// Cap on the Witt length of each column.
    pub max_len: Option<usize>,
}

/// Which test a failing slot violates.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SlotTest {
    /// `|a_0| ≤ 1` or the exponent solve for `λ = q^{a_0}`.
    A0,
    /// Motzkin `N = 0`.
    NShift,
    /// `|a^± - 1|_1 ≥ ω`, forcing a small radius.
    SmallRadius,
    /// `|λ_{n,m}| ≤ 1`.
    Integrality,
    /// `|λ_{-n,m}| < 1`.
    Strict,
    /// A coefficient the extraction never consumed.
    Residual,
}

impl SlotTest {
    pub fn name(self) -> &'static str {
        match self {
            SlotTest::A0 => "a0",
            SlotTest::NShift => "n_shift",
            SlotTest::SmallRadius => "small_radius",
            SlotTest::Integrality => "integrality",
            SlotTest::Strict => "strict",
            SlotTest::Residual => "residual",
        }
    }
}

/// A slot `(n, m)` failing a test.  Operator-level tests use `n = 0`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct SlotFailure {
    pub n: i64,
    pub m: usize,
    pub test: SlotTest,
}

impl fmt::Display for SlotFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(n={}, m={}, {})", self.n, self.m, self.test.name())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    PassOnWindow,
    Fail { witness: SlotFailure },
    Indeterminate { reason: String },
}

impl Verdict {
    pub fn label(&self) -> &'static str {
        match self {
            Verdict::PassOnWindow => "PASS-on-window",
            Verdict::Fail { .. } => "FAIL",
            Verdict::Indeterminate { .. } => "INDETERMINATE",
        }
    }

    pub fn is_pass(&self) -> bool {
        matches!(self, Verdict::PassOnWindow)
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            Verdict::PassOnWindow => 0,
            Verdict::Fail { .. } => 1,
            Verdict::Indeterminate { .. } => 2,
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::PassOnWindow => write!(f, "PASS-on-window"),
            Verdict::Fail { witness } => write!(f, "FAIL at {witness}"),
            Verdict::Indeterminate { reason } => write!(f, "INDETERMINATE: {reason}"),
        }
    }
}

/// Result of reading a family off an operator.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Extraction {
    pub family: WittFamily,
    /// Motzkin `N`; always 0 for differential operators.
    pub n_shift: i64,
    /// Motzkin `λ` for q-difference operators.
    pub lambda: Option<PAdic>,
    /// Why `a_0` could not be solved for, if it could not.
    pub a0_error: Option<String>,
    /// Nonzero coefficients outside every read slot.
    pub residual: Vec<i64>,
    /// Nonzero coefficients beyond the Witt length cap.
    pub unread: Vec<i64>,
}

/// `φ_{n,m}` per slot: `a_{n p^m} / n` for differential operators.
fn read_columns<F>(p: u32, neg: i64, pos: i64, max_len: Option<usize>, mut phi: F) -> Result<(BTreeMap<i64, WittVector>, BTreeSet<i64>)>
where
    F: FnMut(i64, i64, usize) -> Result<PAdic>,
{
    let mut out = BTreeMap::new();
    let mut read = BTreeSet::new();
    for (sign, bound) in [(-1i64, neg), (1, pos)] {
        for n in 1..=bound {
            if !coprime(n, p) {
                continue;
            }
            let Some(h) = column_height(p, n as u64, bound as u64) else { continue };
            let len = max_len.map_or(h + 1, |l| l.min(h + 1));
            if len == 0 {
                continue;
            }
            let mut comps = Vec::with_capacity(len);
            let mut k = n;
            for m in 0..len {
                read.insert(sign * k);
                comps.push(phi(sign * n, sign * k, m)?);
                k *= p as i64;
            }
            if comps.iter().all(PAdic::is_exact_zero) {
                continue;
            }
            let lam = unghost(&PhantomVector::new(p, comps)?)?;
            out.insert(sign * n, lam);
        }
    }
    Ok((out, read))
}

fn leftovers(s: &LaurentWindow, read: &BTreeSet<i64>, lo: i64, hi: i64) -> (Vec<i64>, Vec<i64>) {
    let mut residual = Vec::new();
    let mut unread = Vec::new();
    for (i, _) in s.terms() {
        if i == 0 || read.contains(&i) {
            continue;
        }
        if i >= -lo && i <= hi {
            unread.push(i);
        } else {
            residual.push(i);
        }
    }
    (residual, unread)
}

/// Reads `a_0` and `{λ_{±n}}` off the operator on its own window.
pub fn witt_extract(op: &OperatorSpec) -> Result<WittFamily> {
    let ex = extract_with(op, &FamilyWindow::default())?;
    match ex.a0_error {
        Some(e) => Err(Error::ExponentSolveFailed(e)),
        None => Ok(ex.family),
    }
}

/// Extraction on an explicit family window.
pub fn extract_with(op: &OperatorSpec, win: &FamilyWindow) -> Result<Extraction> {
    match op {
        OperatorSpec::Diff { g } => extract_diff(g, win),
        OperatorSpec::QDiff { a, q } => extract_qdiff(a, q, win),
    }
}

fn extract_diff(g: &LaurentWindow, win: &FamilyWindow) -> Result<Extraction> {
    let p = g.prime();
    let neg = win.neg_bound.unwrap_or(i64::MAX).min(-g.i_min().min(0));
    let pos = win.pos_bound.unwrap_or(i64::MAX).min(g.i_max().max(0));
    let (entries, read) = read_columns(p, neg, pos, win.max_len, |n, idx, _| g.coeff_or_zero(idx).div_int(n))?;
    let (residual, unread) = leftovers(g, &read, neg, pos);
    let mut family = WittFamily::new(p, g.coeff_or_zero(0), neg, pos)?;
    family.entries = entries;
    Ok(Extraction { family, n_shift: 0, lambda: None, a0_error: None, residual, unread })
}

/// Solves `λ = q^{a_0}` by `a_0 = log λ / log q` and verifies it.
pub fn solve_a0(lambda: &PAdic, q: &QParam) -> Result<PAdic> {
    let fail = |why: String| Error::ExponentSolveFailed(why);
    let l = padic_log(lambda).map_err(|e| fail(format!("log λ undefined: {e}")))?;
    let a0 = l.div(&q.log_q()?)?;
    match a0.is_integral(false) {
        Ok(true) => {}
        Ok(false) => return Err(fail(format!("log λ / log q = {a0} has norm > 1"))),
        Err(e) => return Err(fail(format!("|a0| undecidable: {e}"))),
    }
    let back = q.q_power(&a0, None).map_err(|e| fail(e.to_string()))?;
    if !back.agrees_with(lambda) {
        return Err(fail(format!("q^a0 = {back} differs from λ = {lambda}")));
    }
    Ok(a0)
}

/// `(q^k - 1) / p^m` for `k = ± n p^m`.
fn q_weight(q: &QParam, k: i64, m: usize) -> PAdic {
    let p = q.prime();
    let prec = q.q().rel_precision().unwrap_or(1);
    q.q_pow(k).sub(&PAdic::one(p, prec)).shift(-(m as i64))
}

/// Extent of `1/a^-` in `T^{-1}` at precision `cap`.
fn inverse_extent(a_minus: &LaurentWindow, cap: i64) -> Result<i64> {
    let inv = a_minus.inverse_one_sided(Side::Minus, -a_minus.i_min(), Some(cap))?;
    Ok(-inv.min_index().unwrap_or(0))
}

fn extract_qdiff(a: &LaurentWindow, q: &QParam, win: &FamilyWindow) -> Result<Extraction> {
    let p = a.prime();
    let f = motzkin::decompose(a)?;
    let omega = NormValue::omega(p);
    for (side, factor) in [(Side::Minus, &f.a_minus), (Side::Plus, &f.a_plus)] {
        let n = factor.minus_one().gauss_norm_bound(NormValue::one());
        if n >= omega {
            return Err(Error::LogDomain(format!("|a^{} - 1|_1 is not < omega", if side == Side::Plus { "+" } else { "-" })));
        }
    }
    let reach = inverse_extent(&f.a_minus, f.precision)?;
    let neg = win.neg_bound.unwrap_or(i64::MAX).min(-a.i_min().min(0));
    let pos = win.pos_bound.unwrap_or(i64::MAX).min((a.i_max() - reach).max(0));
    let phi_m = f.a_minus.log_one_sided(Side::Minus, neg)?;
    let phi_p = f.a_plus.log_one_sided(Side::Plus, pos)?;
    let (entries, read) = read_columns(p, neg, pos, win.max_len, |_, idx, m| {
        let c = if idx < 0 { phi_m.coeff_or_zero(idx) } else { phi_p.coeff_or_zero(idx) };
        if c.is_exact_zero() {
            return Ok(c);
        }
        c.div(&q_weight(q, idx, m))
    })?;
    let logs = phi_m.restrict(phi_m.i_min(), -1).add(&phi_p.restrict(1, phi_p.i_max().max(1)));
    let (residual, unread) = leftovers(&logs, &read, neg, pos);
    let (a0, a0_error) = match solve_a0(&f.lambda, q) {
        Ok(a0) => (a0, None),
        Err(e) => (PAdic::zero(p), Some(e.to_string())),
    };
    let mut family = WittFamily::new(p, a0, neg, pos)?;
    family.entries = entries;
    Ok(Extraction { family, n_shift: f.n, lambda: Some(f.lambda), a0_error, residual, unread })
}

/// Strict per-slot bound and the decay surrogate on the negative family.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ConvVerdict {
    pub decay_cut_exponent: Option<String>,
    /// Slots with `|λ_{-n,m}| ≥ 1`.
    pub strict_failures: Vec<(i64, usize)>,
    /// Outer-third slots not below the decay cut.
    pub decay_failures: Vec<(i64, usize)>,
    /// Levels `m` whose window holds fewer than three indices.
    pub decay_unchecked: Vec<usize>,
}

impl ConvVerdict {
    pub fn strict_ok(&self) -> bool {
        self.strict_failures.is_empty()
    }

    pub fn decay_ok(&self) -> bool {
        self.decay_failures.is_empty()
    }

    pub fn passes(&self) -> bool {
        self.strict_ok() && self.decay_ok()
    }
}

/// Window check of the negative family against the Conv condition.
pub fn conv_window(family: &WittFamily, decay_cut: NormValue) -> Result<ConvVerdict> {
    let p = family.prime as i64;
    let mut strict_failures = Vec::new();
    for (n, m, c) in family.slots().filter(|(n, _, _)| *n < 0) {
        if !c.is_integral(true)? {
            strict_failures.push((n, m));
        }
    }
    let mut decay_failures = Vec::new();
    let mut decay_unchecked = Vec::new();
    let mut pm: i64 = 1;
    let mut m = 0usize;
    while family.neg_bound > 0 && pm <= family.neg_bound {
        let n_max = family.neg_bound / pm;
        if n_max < 3 {
            decay_unchecked.push(m);
        } else {
            for (n, w) in family.entries.range(-n_max..0) {
                if 3 * (-n) <= 2 * n_max || w.len() <= m {
                    continue;
                }
                let c = w.component(m);
                if c.norm_bound() < decay_cut {
                    continue;
                }
                if c.is_bounded_zero() {
                    return Err(Error::IndeterminateValuation { at_least: c.abs_precision().unwrap_or(0) });
                }
                decay_failures.push((*n, m));
            }
        }
        pm = pm.saturating_mul(p);
        m += 1;
    }
    decay_failures.sort_by_key(|&(n, m)| (n, m));
    Ok(ConvVerdict { decay_cut_exponent: decay_cut.exponent_string(), strict_failures, decay_failures, decay_unchecked })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CheckConfig {
    pub window: FamilyWindow,
    pub decay_cut: NormValue,
}

impl Default for CheckConfig {
    fn default() -> Self {
        CheckConfig { window: FamilyWindow::default(), decay_cut: NormValue::from_valuation(DEFAULT_DECAY_CUT) }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SolvabilityReport {
    pub kind: OpKind,
    pub verdict: Verdict,
    pub extracted: Option<WittFamily>,
    /// Every failing slot, ordered by `n`, then `m`.
    pub failing: Vec<SlotFailure>,
    pub conv: Option<ConvVerdict>,
    pub n_shift: Option<i64>,
    /// `a_0` when it is forced to equal a small integer.
    pub a0_integer: Option<i64>,
    pub notes: Vec<String>,
}

impl SolvabilityReport {
    fn indeterminate(kind: OpKind, reason: String) -> Self {
        SolvabilityReport {
            kind,
            verdict: Verdict::Indeterminate { reason },
            extracted: None,
            failing: Vec::new(),
            conv: None,
            n_shift: None,
            a0_integer: None,
            notes: Vec::new(),
        }
    }
}

/// Solvability check on the operator's own window.
pub fn check(op: &OperatorSpec) -> Result<SolvabilityReport> {
    check_with(op, &CheckConfig::default())
}

pub fn check_with(op: &OperatorSpec, cfg: &CheckConfig) -> Result<SolvabilityReport> {
    let kind = op.kind();
    if let Some(q) = op.q() {
        if !q.is_small() {
            return Err(Error::HypothesisViolated(format!("the q-difference criterion needs |q - 1| < omega, got |p|^{}", q.t())));
        }
    }
    if !op.series().norm_faithful() {
        return Ok(SolvabilityReport::indeterminate(kind, "window is not marked norm_faithful".into()));
    }
    let ex = match extract_with(op, &cfg.window) {
        Ok(ex) => ex,
        Err(Error::LogDomain(msg)) => {
            let mut r = SolvabilityReport::indeterminate(kind, String::new());
            let w = SlotFailure { n: 0, m: 0, test: SlotTest::SmallRadius };
            r.failing.push(w);
            r.notes.push(msg);
            r.verdict = Verdict::Fail { witness: w };
            return Ok(r);
        }
        Err(e @ (Error::NotAUnit(_) | Error::PrimeMismatch(..))) => return Err(e),
        Err(e) => return Ok(SolvabilityReport::indeterminate(kind, e.to_string())),
    };
    let mut failing = Vec::new();
    let mut undecided = Vec::new();
    let mut notes = Vec::new();
    match &ex.a0_error {
        Some(msg) => {
            failing.push(SlotFailure { n: 0, m: 0, test: SlotTest::A0 });
            notes.push(msg.clone());
        }
        None => match ex.family.a0.is_integral(false) {
            Ok(true) => {}
            Ok(false) => failing.push(SlotFailure { n: 0, m: 0, test: SlotTest::A0 }),
            Err(e) => undecided.push(format!("a0: {e}")),
        },
    }
    if ex.n_shift != 0 {
        failing.push(SlotFailure { n: 0, m: 0, test: SlotTest::NShift });
    }
    for (n, m, c) in ex.family.slots() {
        match c.is_integral(false) {
            Ok(true) => {}
            Ok(false) => failing.push(SlotFailure { n, m, test: SlotTest::Integrality }),
            Err(e) => undecided.push(format!("slot ({n}, {m}): {e}")),
        }
    }
    let conv = match conv_window(&ex.family, cfg.decay_cut) {
        Ok(c) => {
            failing.extend(c.strict_failures.iter().map(|&(n, m)| SlotFailure { n, m, test: SlotTest::Strict }));
            Some(c)
        }
        Err(e) => {
            undecided.push(format!("conv window: {e}"));
            None
        }
    };
    failing.extend(ex.residual.iter().map(|&i| SlotFailure { n: i, m: 0, test: SlotTest::Residual }));
    if !ex.unread.is_empty() {
        undecided.push(format!("{} coefficients lie beyond the Witt length cap", ex.unread.len()));
    }
    failing.sort();
    failing.dedup();
    let verdict = if let Some(w) = failing.first() {
        Verdict::Fail { witness: *w }
    } else if !undecided.is_empty() {
        Verdict::Indeterminate { reason: undecided.join("; ") }
    } else if conv.as_ref().is_some_and(|c| !c.decay_ok()) {
        Verdict::Indeterminate { reason: "decay surrogate failed on the outer third of the negative window".into() }
    } else {
        Verdict::PassOnWindow
    };
    let a0_integer = if ex.a0_error.is_none() {
        ex.family.a0.to_small_rational().filter(|r| r.is_integer()).and_then(|r| num::ToPrimitive::to_i64(&r.to_integer()))
    } else {
        None
    };
    Ok(SolvabilityReport { kind, verdict, extracted: Some(ex.family), failing, conv, n_shift: Some(ex.n_shift), a0_integer, notes })
}

/// `Σ_{n,m} φ_{n,m} w(n p^m, m) T^{n p^m}` over one side, with every column
/// zero-padded to the full height inside `bound`.
fn phantom_series<W>(family: &WittFamily, side: Side, bound: i64, weight: W) -> Result<LaurentWindow>
where
    W: Fn(i64, usize) -> Result<PAdic>,
{
    let p = family.prime;
    let (lo, hi) = match side {
        Side::Plus => (0, bound),
        Side::Minus => (-bound, 0),
    };
    let mut s = LaurentWindow::new(p, lo, hi);
    for (n, _) in family.entries().filter(|(n, _)| (*n > 0) == (side == Side::Plus)) {
        let Some(lam) = family.padded(n, bound) else { continue };
        let phi = ghost(&lam);
        let mut k = n.abs();
        for (m, c) in phi.components().iter().enumerate() {
            if !c.is_exact_zero() {
                s.add_term(side.sign() * k, &c.mul(&weight(side.sign() * k, m)?));
            }
            k *= p as i64;
        }
    }
    Ok(s)
}

/// Builds an operator from a family on the family's window.
///
/// Differential: `g = Σ -n φ_{-n,m} T^{-n p^m} + a_0 + Σ n φ_{n,m} T^{n p^m}`.
/// q-difference: `a = q^{a_0} exp(φ_q^-) exp(φ_q^+)`, on a window wide enough
/// that `a^-` has died out below it and the right edge does not disturb the
/// factors inside the family window.
pub fn generate(family: &WittFamily, kind: OpKind, q: Option<&QParam>, prec: u32) -> Result<OperatorSpec> {
    let p = family.prime;
    match kind {
        OpKind::Diff => {
            let neg = family.neg_bound;
            let pos = family.pos_bound;
            let mut g = LaurentWindow::new(p, -neg, pos);
            let minus = phantom_series(family, Side::Minus, neg, |k, m| Ok(PAdic::from_int(p, k / p.pow(m as u32) as i64, prec)))?;
            let plus = phantom_series(family, Side::Plus, pos, |k, m| Ok(PAdic::from_int(p, k / p.pow(m as u32) as i64, prec)))?;
            g = g.add(&minus).add(&plus);
            if !family.a0.is_exact_zero() {
                g.add_term(0, &family.a0);
            }
            Ok(OperatorSpec::diff(g.restrict(-neg, pos)))
        }
        OpKind::QDiff => {
            let q = q.ok_or_else(|| Error::PreconditionViolated("q-difference generation needs q".into()))?;
            if q.prime() != p {
                return Err(Error::PrimeMismatch(p, q.prime()));
            }
            if !q.is_small() {
                return Err(Error::OutOfConvergenceDomain(format!("|q - 1| = |p|^{} is not < omega", q.t())));
            }
            generate_qdiff(family, q, prec)
        }
    }
}

fn exp_extent(phi: &LaurentWindow, side: Side, degree: i64, cap: i64) -> Result<(LaurentWindow, i64)> {
    let e = phi.exp_one_sided(side, degree)?.reduce_abs(cap);
    let extent = match side {
        Side::Minus => -e.min_index().unwrap_or(0),
        Side::Plus => e.max_index().unwrap_or(0),
    };
    Ok((e, extent))
}

/// Degree past which `exp(φ)` vanishes mod `p^cap`, from the valuation of `φ`.
fn exp_degree_bound(phi: &LaurentWindow, support: i64, cap: i64) -> Result<i64> {
    let p = phi.prime();
    let Some(v) = phi.min_valuation() else { return Ok(0) };
    let c = Exponent::from_integer(v) - Exponent::new(1, p as i64 - 1);
    if c <= Exponent::zero() {
        return Err(Error::OutOfConvergenceDomain("|φ_q|_1 is not < omega".into()));
    }
    let steps = (Exponent::from_integer(cap) / c).ceil().to_integer();
    Ok(support.saturating_mul(steps.max(1)))
}

fn generate_qdiff(family: &WittFamily, q: &QParam, prec: u32) -> Result<OperatorSpec> {
    let p = family.prime;
    let cap = prec as i64;
    let weight = |k: i64, m: usize| Ok(q_weight(q, k, m));
    let mut nb = family.neg_bound;
    let (e_minus, lo_ext, reach) = loop {
        let phi_m = phantom_series(family, Side::Minus, nb, weight)?.reduce_abs(cap);
        let deg = exp_degree_bound(&phi_m, nb, cap)?.min(GENERATE_BUDGET);
        let (e, ext) = exp_extent(&phi_m, Side::Minus, deg, cap)?;
        let (_, reach) = exp_extent(&phi_m.neg(), Side::Minus, deg, cap)?;
        if ext <= nb {
            break (e, nb, reach);
        }
        if ext >= GENERATE_BUDGET {
            return Err(Error::NotConverged(format!("a^- does not die out within {GENERATE_BUDGET} terms")));
        }
        nb = ext;
    };
    let hi = family.pos_bound + reach;
    let phi_p = phantom_series(family, Side::Plus, hi, weight)?.reduce_abs(cap);
    if phi_p.gauss_norm(NormValue::one()) >= NormValue::omega(p) {
        return Err(Error::OutOfConvergenceDomain("|φ_q^+|_1 is not < omega".into()));
    }
    let e_plus = phi_p.exp_one_sided(Side::Plus, hi + lo_ext)?.reduce_abs(cap);
    let lambda = q.q_power(&family.a0, None)?;
    let a = e_minus.mul_window(&e_plus, -lo_ext, hi, Some(cap)).scale(&lambda).reduce_abs(cap);
    let mut a = a.restrict(-lo_ext, hi);
    a.set_norm_faithful(true);
    OperatorSpec::qdiff(a, q.clone())
}

/// `E(Σ λ_n T^n, 1) = exp(Σ_n Σ_m φ_{n,m} T^{n p^m} / p^m)` to `degree`,
/// over the positive (`Plus`) or negative (`Minus`, in `T^{-1}`) entries.
pub fn artin_hasse(family: &WittFamily, degree: i64, direction: Side) -> Result<LaurentWindow> {
    if degree < 1 {
        return Err(Error::PreconditionViolated("degree must be at least 1".into()));
    }
    let p = family.prime;
    let prec = family.slots().filter_map(|(_, _, c)| c.rel_precision()).max().unwrap_or(crate::padic::DEFAULT_PREC);
    let s = phantom_series(family, direction, degree, |_, m| Ok(p_power(p, -(m as i64), prec)))?;
    s.exp_one_sided(direction, degree)
}

/// The family with `exp(Σ b_d T^d / d) = E(Σ λ_n T^n, 1)`: `φ_{n,m} = b_{n p^m} / n`,
/// read on `1 ≤ d ≤ degree` (missing `b_d` are zero).
pub fn exp_decompose(p: u32, b: &BTreeMap<i64, PAdic>, degree: i64) -> Result<WittFamily> {
    if let Some((&d, _)) = b.iter().find(|(d, _)| **d < 1) {
        return Err(Error::PreconditionViolated(format!("degree {d} is not positive")));
    }
    if let Some(c) = b.values().find(|c| c.prime() != p) {
        return Err(Error::PrimeMismatch(p, c.prime()));
    }
    let top = b.keys().next_back().copied().unwrap_or(0).max(degree);
    let (entries, _) = read_columns(p, 0, top, None, |n, idx, _| match b.get(&idx) {
        Some(c) => c.div_int(n),
        None => Ok(PAdic::zero(p)),
    })?;
    let mut family = WittFamily::empty(p, 0, top);
    family.entries = entries;
    Ok(family)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CanonicalForm {
    pub op: OperatorSpec,
    /// `h` with `∂_T(h)/h = g^+` (resp. `σ_q(h)/h = a^+`).
    pub gauge: LaurentWindow,
    /// The gauge relation held coefficientwise on `[0, degree]`.
    pub gauge_verified: bool,
    pub degree: i64,
}

/// `∂_T - (a_0 + g^-)` or `σ_q - q^{a_0} a^-` for a solvable operator.
pub fn canonical_form(op: &OperatorSpec) -> Result<CanonicalForm> {
    canonical_form_with(op, &CheckConfig::default())
}

pub fn canonical_form_with(op: &OperatorSpec, cfg: &CheckConfig) -> Result<CanonicalForm> {
    let report = check_with(op, cfg)?;
    if !report.verdict.is_pass() {
        return Err(Error::NotSolvable(report.verdict.to_string()));
    }
    let family = report.extracted.expect("pass carries a family");
    let degree = family.pos_bound;
    let plus_family = family.restrict(0, degree);
    match op {
        OperatorSpec::Diff { g } => {
            let h = artin_hasse(&plus_family, degree.max(1), Side::Plus)?;
            let (_, _, g_plus) = g.tripartite();
            let canon = g.sub(&g_plus).restrict(g.i_min(), g.i_max());
            let lhs = apply(DerivOp::Theta, &h, None)?.restrict(0, degree);
            let rhs = g_plus.mul_window(&h, 0, degree, None);
            let gauge_verified = lhs.agrees_with(&rhs);
            Ok(CanonicalForm { op: OperatorSpec::diff(canon), gauge: h, gauge_verified, degree })
        }
        OperatorSpec::QDiff { a, q } => {
            let f = motzkin::decompose(a)?;
            let canon = f.a_minus.scale(&f.lambda).restrict(a.i_min().min(0), a.i_max().max(0));
            let h = artin_hasse(&plus_family, degree.max(1), Side::Plus)?;
            let lhs = apply(DerivOp::SigmaQ, &h, Some(q))?.restrict(0, degree);
            let rhs = f.a_plus.mul_window(&h, 0, degree, None);
            let gauge_verified = lhs.agrees_with(&rhs);
            Ok(CanonicalForm { op: OperatorSpec::qdiff(canon, q.clone())?, gauge: h, gauge_verified, degree })
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QDeformation {
    pub op: OperatorSpec,
    /// Verdict of the differential operator that was deformed.
    pub source_verdict: Verdict,
    /// The family window shared by both operators.
    pub window: FamilyWindow,
}

impl QDeformation {
    pub fn source_solvable(&self) -> bool {
        self.source_verdict.is_pass()
    }
}

/// The q-difference operator sharing the differential operator's symbol.
pub fn q_deform(diff: &OperatorSpec, q: &QParam, prec: u32) -> Result<QDeformation> {
    let OperatorSpec::Diff { .. } = diff else {
        return Err(Error::PreconditionViolated("q_deform takes a differential operator".into()));
    };
    let report = check(diff)?;
    let ex = extract_with(diff, &FamilyWindow::default())?;
    let op = generate(&ex.family, OpKind::QDiff, Some(q), prec)?;
    Ok(QDeformation { op, source_verdict: report.verdict, window: ex.family.window() })
}
