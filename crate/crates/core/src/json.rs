//! JSON forms of the toolkit's values and reports.
//!
//! Readers are lenient: p-adic numbers may be given as the object form, as
//! a rational string `"n/d"`, as the display string `"p^v * u :: O(p^A)"`
//! or as a bare JSON integer.

use std::collections::BTreeMap;

use num::bigint::BigInt;
use serde_json::{json, Map, Value};

use crate::amice::{LaurentWindow, QParam};
use crate::error::{Error, Result};
use crate::motzkin::{FactorPredicates, MotzkinFactors};
use crate::norm::NormValue;
use crate::padic::PAdic;
use crate::radius::{Certified, ConstantProfile, OpKind, OperatorSpec, RadiusReport, SharpOutcome};
use crate::solvability::{CanonicalForm, Extraction, FamilyWindow, QDeformation, SolvabilityReport, Verdict, WittFamily};
use crate::witt::{PhantomVector, WittVector};

fn bad(msg: impl Into<String>) -> Error {
    Error::Parse(msg.into())
}

fn field<'a>(v: &'a Value, key: &str) -> Result<&'a Value> {
    v.get(key).ok_or_else(|| bad(format!("missing field {key:?}")))
}

fn as_i64(v: &Value, what: &str) -> Result<i64> {
    v.as_i64().ok_or_else(|| bad(format!("{what} must be an integer")))
}

fn opt_i64(v: &Value, key: &str) -> Result<Option<i64>> {
    match v.get(key) {
        None | Some(Value::Null) => Ok(None),
        Some(x) => as_i64(x, key).map(Some),
    }
}

fn as_array<'a>(v: &'a Value, what: &str) -> Result<&'a Vec<Value>> {
    v.as_array().ok_or_else(|| bad(format!("{what} must be an array")))
}

/// Unwraps `{"version", "config", "result"}` envelopes.
pub fn unwrap_envelope(v: &Value) -> &Value {
    match v.get("result") {
        Some(r) if v.get("version").is_some() => r,
        _ => v,
    }
}

pub fn norm_to_json(n: NormValue) -> Value {
    match n.exponent_string() {
        Some(e) => Value::String(e),
        None => Value::String("zero".into()),
    }
}

pub fn padic_to_json(x: &PAdic) -> Value {
    match (x.valuation(), x.signed_unit()) {
        (Some(v), Some(_)) => json!({
            "v": v,
            "unit": x.unit().expect("unit state").to_string(),
            "prec": x.rel_precision(),
        }),
        _ => json!({ "v": Value::Null, "unit": "0", "prec": x.abs_precision() }),
    }
}

/// Parses a p-adic from any accepted string form.
pub fn parse_padic_str(p: u32, s: &str, prec: u32) -> Result<PAdic> {
    let s = s.trim();
    if s.starts_with('{') {
        let v: Value = serde_json::from_str(s).map_err(|e| bad(e.to_string()))?;
        return padic_from_json(p, &v, prec);
    }
    if s.contains("::") || s.starts_with("O(") || s.ends_with(":0") {
        let x: PAdic = s.parse()?;
        if x.prime() != p {
            return Err(Error::PrimeMismatch(p, x.prime()));
        }
        return Ok(x);
    }
    PAdic::parse_rational(p, s, prec)
}

pub fn padic_from_json(p: u32, v: &Value, prec: u32) -> Result<PAdic> {
    match v {
        Value::Number(n) => {
            let i = n.as_i64().ok_or_else(|| bad(format!("{n} is not an integer")))?;
            Ok(PAdic::from_int(p, i, prec))
        }
        Value::String(s) => parse_padic_str(p, s, prec),
        Value::Object(_) => {
            let unit: BigInt = match field(v, "unit")? {
                Value::String(s) => s.trim().parse().map_err(|_| bad(format!("bad unit {s:?}")))?,
                Value::Number(n) => n.as_i64().ok_or_else(|| bad("bad unit"))?.into(),
                _ => return Err(bad("unit must be a decimal string")),
            };
            let pr = opt_i64(v, "prec")?;
            match opt_i64(v, "v")? {
                None => Ok(match pr {
                    Some(a) => PAdic::bounded_zero(p, a),
                    None => PAdic::zero(p),
                }),
                Some(val) => {
                    let pr = pr.unwrap_or(prec as i64);
                    if pr < 1 {
                        return Err(bad("prec must be at least 1"));
                    }
                    PAdic::from_parts(p, val, &unit, pr as u32)
                }
            }
        }
        _ => Err(bad(format!("cannot read a p-adic number from {v}"))),
    }
}

pub fn series_to_json(w: &LaurentWindow) -> Value {
    let coeffs: Vec<Value> = w.terms().map(|(i, c)| json!([i, padic_to_json(c)])).collect();
    let mut m = Map::new();
    m.insert("prime".into(), json!(w.prime()));
    m.insert("coeffs".into(), Value::Array(coeffs));
    m.insert("i_min".into(), json!(w.i_min()));
    m.insert("i_max".into(), json!(w.i_max()));
    m.insert("norm_faithful".into(), json!(w.norm_faithful()));
    if w.truncated() {
        m.insert("truncated".into(), json!(true));
    }
    if let Some(f) = w.floor() {
        m.insert("floor".into(), json!(f));
    }
    Value::Object(m)
}

/// Reads a series; `norm_faithful` defaults to `false` when absent.
pub fn series_from_json(v: &Value, default_p: u32, prec: u32) -> Result<LaurentWindow> {
    let v = unwrap_envelope(v);
    let p = match opt_i64(v, "prime")? {
        Some(p) => crate::padic::validate_prime(u32::try_from(p).map_err(|_| bad("bad prime"))?)?,
        None => default_p,
    };
    let mut terms = Vec::new();
    for t in as_array(field(v, "coeffs")?, "coeffs")? {
        let pair = as_array(t, "coefficient entry")?;
        if pair.len() != 2 {
            return Err(bad("coefficient entries are [index, value] pairs"));
        }
        terms.push((as_i64(&pair[0], "index")?, padic_from_json(p, &pair[1], prec)?));
    }
    let lo = opt_i64(v, "i_min")?.unwrap_or_else(|| terms.iter().map(|t| t.0).min().unwrap_or(0));
    let hi = opt_i64(v, "i_max")?.unwrap_or_else(|| terms.iter().map(|t| t.0).max().unwrap_or(0));
    if lo > hi {
        return Err(bad("i_min exceeds i_max"));
    }
    if let Some((i, _)) = terms.iter().find(|(i, _)| *i < lo || *i > hi) {
        return Err(bad(format!("index {i} lies outside [{lo}, {hi}]")));
    }
    let mut w = LaurentWindow::from_terms(p, lo, hi, terms)?;
    if let Some(f) = opt_i64(v, "floor")? {
        w.add_floor(f);
    }
    w.set_norm_faithful(v.get("norm_faithful").and_then(Value::as_bool).unwrap_or(false));
    w.set_truncated(v.get("truncated").and_then(Value::as_bool).unwrap_or(false));
    Ok(w)
}

pub fn witt_to_json(w: &WittVector) -> Value {
    json!({
        "prime": w.prime(),
        "length": w.len(),
        "components": w.components().iter().map(padic_to_json).collect::<Vec<_>>(),
    })
}

pub fn phantom_to_json(w: &PhantomVector) -> Value {
    json!({
        "prime": w.prime(),
        "length": w.len(),
        "phantom": w.components().iter().map(padic_to_json).collect::<Vec<_>>(),
    })
}

fn prime_or(v: &Value, default_p: u32) -> Result<u32> {
    match opt_i64(v, "prime")? {
        Some(p) => crate::padic::validate_prime(u32::try_from(p).map_err(|_| bad("bad prime"))?),
        None => Ok(default_p),
    }
}

fn components(v: &Value, key: &str, p: u32, prec: u32) -> Result<Vec<PAdic>> {
    let xs: Vec<PAdic> = as_array(field(v, key)?, key)?.iter().map(|c| padic_from_json(p, c, prec)).collect::<Result<_>>()?;
    if let Some(l) = opt_i64(v, "length")? {
        if l as usize != xs.len() {
            return Err(bad(format!("length {l} does not match {} components", xs.len())));
        }
    }
    Ok(xs)
}

pub fn witt_from_json(v: &Value, default_p: u32, prec: u32) -> Result<WittVector> {
    let v = unwrap_envelope(v);
    let p = prime_or(v, default_p)?;
    WittVector::new(p, components(v, "components", p, prec)?)
}

pub fn phantom_from_json(v: &Value, default_p: u32, prec: u32) -> Result<PhantomVector> {
    let v = unwrap_envelope(v);
    let p = prime_or(v, default_p)?;
    PhantomVector::new(p, components(v, "phantom", p, prec)?)
}

pub fn family_to_json(f: &WittFamily) -> Value {
    let entries: Vec<Value> = f.entries().map(|(n, w)| json!({ "n": n, "witt": witt_to_json(w) })).collect();
    json!({
        "prime": f.prime(),
        "a0": padic_to_json(&f.a0),
        "neg_bound": f.neg_bound(),
        "pos_bound": f.pos_bound(),
        "entries": entries,
    })
}

/// Reads a family.  Missing bounds default to the smallest window holding
/// every given slot.
pub fn family_from_json(v: &Value, default_p: u32, prec: u32) -> Result<WittFamily> {
    let v = unwrap_envelope(v);
    let v = v.get("family").unwrap_or(v);
    let p = prime_or(v, default_p)?;
    let a0 = match v.get("a0") {
        Some(x) => padic_from_json(p, x, prec)?,
        None => PAdic::zero(p),
    };
    let mut cols = Vec::new();
    for e in as_array(field(v, "entries")?, "entries")? {
        let n = as_i64(field(e, "n")?, "n")?;
        cols.push((n, witt_from_json(field(e, "witt")?, p, prec)?));
    }
    let reach = |sign: i64| {
        cols.iter()
            .filter(|(n, _)| n.signum() == sign)
            .map(|(n, w)| n.abs() * (p as i64).pow(w.len().saturating_sub(1) as u32))
            .max()
            .unwrap_or(0)
    };
    let neg = opt_i64(v, "neg_bound")?.unwrap_or_else(|| reach(-1));
    let pos = opt_i64(v, "pos_bound")?.unwrap_or_else(|| reach(1));
    let mut f = WittFamily::new(p, a0, neg, pos)?;
    for (n, w) in cols {
        f.insert(n, w)?;
    }
    Ok(f)
}

pub fn window_to_json(w: &FamilyWindow) -> Value {
    json!({ "neg_bound": w.neg_bound, "pos_bound": w.pos_bound, "max_len": w.max_len })
}

pub fn window_from_json(v: &Value) -> Result<FamilyWindow> {
    let max_len = opt_i64(v, "max_len")?.map(|l| l as usize);
    Ok(FamilyWindow { neg_bound: opt_i64(v, "neg_bound")?, pos_bound: opt_i64(v, "pos_bound")?, max_len })
}

pub fn operator_to_json(op: &OperatorSpec, window: Option<&FamilyWindow>) -> Value {
    let mut m = Map::new();
    m.insert("kind".into(), json!(op.kind()));
    m.insert("series".into(), series_to_json(op.series()));
    if let Some(q) = op.q() {
        m.insert("q".into(), padic_to_json(q.q()));
    }
    if let Some(w) = window {
        m.insert("family_window".into(), window_to_json(w));
    }
    Value::Object(m)
}

/// An operator read from JSON, with the window it was generated on.
#[derive(Clone, Debug)]
pub struct OperatorInput {
    pub op: OperatorSpec,
    pub window: Option<FamilyWindow>,
}

/// Reads `{"kind", "series", "q"?, "family_window"?}` or a bare series.
/// `kind` and `q` given by the caller fill in whatever the file omits.
pub fn operator_from_json(v: &Value, kind: Option<OpKind>, q: Option<&str>, default_p: u32, prec: u32) -> Result<OperatorInput> {
    let v = unwrap_envelope(v);
    let v = v.get("op").filter(|o| o.get("series").is_some()).unwrap_or(v);
    let (series_v, file_kind) = match v.get("series") {
        Some(s) => {
            let k = match v.get("kind").and_then(Value::as_str) {
                Some(k) => Some(OpKind::parse(k).ok_or_else(|| bad(format!("unknown operator kind {k:?}")))?),
                None => None,
            };
            (s, k)
        }
        None => (v, None),
    };
    let kind = match (kind, file_kind) {
        (Some(a), Some(b)) if a != b => return Err(bad(format!("--kind {a:?} contradicts the file's kind {b:?}"))),
        (Some(a), _) | (None, Some(a)) => a,
        (None, None) => return Err(bad("operator kind is missing; pass --kind")),
    };
    let series = series_from_json(series_v, default_p, prec)?;
    let p = series.prime();
    let op = match kind {
        OpKind::Diff => OperatorSpec::diff(series),
        OpKind::QDiff => {
            let qv = match (q, v.get("q")) {
                (Some(s), _) => parse_padic_str(p, s, prec)?,
                (None, Some(x)) => padic_from_json(p, x, prec)?,
                (None, None) => return Err(bad("q-difference operator needs q")),
            };
            OperatorSpec::qdiff(series, QParam::new(qv)?)?
        }
    };
    let window = match v.get("family_window") {
        Some(w) => Some(window_from_json(w)?),
        None => None,
    };
    Ok(OperatorInput { op, window })
}

pub fn factors_to_json(f: &MotzkinFactors) -> Value {
    json!({
        "lambda": padic_to_json(&f.lambda),
        "N": f.n,
        "a_minus": series_to_json(&f.a_minus),
        "a_plus": series_to_json(&f.a_plus),
        "iterations": f.iterations,
        "residuals": f.residuals,
        "residual_norm_exponent": f.residual_norm_exponent(),
        "precision": f.precision,
    })
}

pub fn factors_from_json(v: &Value, default_p: u32, prec: u32) -> Result<MotzkinFactors> {
    let v = unwrap_envelope(v);
    let am = series_from_json(field(v, "a_minus")?, default_p, prec)?;
    let p = am.prime();
    let ap = series_from_json(field(v, "a_plus")?, p, prec)?;
    let lambda = padic_from_json(p, field(v, "lambda")?, prec)?;
    let n = as_i64(field(v, "N")?, "N")?;
    MotzkinFactors::new(lambda, n, am, ap)
}

pub fn predicates_to_json(f: &FactorPredicates) -> Value {
    let side = |cs: &[crate::motzkin::CoeffVerdict]| -> Vec<Value> {
        cs.iter().map(|c| json!({ "index": c.index, "exponent": c.exponent.to_string(), "strict": c.strict, "weak": c.weak })).collect()
    };
    json!({
        "rho": norm_to_json(f.rho),
        "minus": side(&f.minus),
        "plus": side(&f.plus),
        "minus_strict": f.minus_strict(),
        "plus_strict": f.plus_strict(),
        "product_norm": norm_to_json(f.product_norm),
        "product_bound": f.product_bound,
    })
}

fn certified_to_json(c: &Certified) -> Value {
    json!({ "value": norm_to_json(c.value), "relation": c.relation, "provenance": c.provenance })
}

pub fn radius_to_json(r: &RadiusReport) -> Value {
    json!({
        "rho": norm_to_json(r.rho),
        "omega_prime": norm_to_json(r.omega_prime),
        "estimates": r.estimates.iter().map(|e| norm_to_json(*e)).collect::<Vec<_>>(),
        "running_min_tail": norm_to_json(r.running_min_tail),
        "exact": r.exact.as_ref().map(certified_to_json),
        "truncated": r.truncated,
    })
}

pub fn sharp_to_json(s: &SharpOutcome) -> Value {
    match s {
        SharpOutcome::ProvenGreaterThanOmega(k) => json!({ "outcome": "ProvenGreaterThanOmega", "witness_s": k }),
        SharpOutcome::Inconclusive => json!({ "outcome": "Inconclusive" }),
    }
}

pub fn profile_to_json(c: &ConstantProfile) -> Value {
    json!({
        "entries": c.entries.iter().map(|e| json!({
            "n": e.n,
            "value": norm_to_json(e.value),
            "bound_only": e.bound_only,
        })).collect::<Vec<_>>(),
        "stabilized": c.stabilized.map(norm_to_json),
    })
}

pub fn verdict_to_json(v: &Verdict) -> Value {
    match v {
        Verdict::PassOnWindow => json!({ "label": v.label() }),
        Verdict::Fail { witness } => json!({ "label": v.label(), "witness": witness }),
        Verdict::Indeterminate { reason } => json!({ "label": v.label(), "reason": reason }),
    }
}

pub fn report_to_json(r: &SolvabilityReport) -> Value {
    json!({
        "kind": r.kind,
        "verdict": verdict_to_json(&r.verdict),
        "extracted": r.extracted.as_ref().map(family_to_json),
        "failing": r.failing,
        "conv": r.conv,
        "n_shift": r.n_shift,
        "a0_integer": r.a0_integer,
        "notes": r.notes,
    })
}

pub fn extraction_to_json(e: &Extraction) -> Value {
    json!({
        "family": family_to_json(&e.family),
        "n_shift": e.n_shift,
        "lambda": e.lambda.as_ref().map(padic_to_json),
        "a0_error": e.a0_error,
        "residual": e.residual,
        "unread": e.unread,
    })
}

pub fn canonical_to_json(c: &CanonicalForm) -> Value {
    json!({
        "op": operator_to_json(&c.op, None),
        "gauge": series_to_json(&c.gauge),
        "gauge_verified": c.gauge_verified,
        "degree": c.degree,
    })
}

pub fn qdeform_to_json(d: &QDeformation) -> Value {
    json!({
        "op": operator_to_json(&d.op, Some(&d.window)),
        "source_verdict": verdict_to_json(&d.source_verdict),
    })
}

/// Reads exponent data `{d: b_d}` as `{"b": [[d, x]…]}` or `{"d": x, …}`.
pub fn exponent_data_from_json(v: &Value, default_p: u32, prec: u32) -> Result<(u32, BTreeMap<i64, PAdic>)> {
    let v = unwrap_envelope(v);
    let p = prime_or(v, default_p)?;
    let mut b = BTreeMap::new();
    match v.get("b") {
        Some(list) => {
            for t in as_array(list, "b")? {
                let pair = as_array(t, "b entry")?;
                if pair.len() != 2 {
                    return Err(bad("b entries are [degree, value] pairs"));
                }
                b.insert(as_i64(&pair[0], "degree")?, padic_from_json(p, &pair[1], prec)?);
            }
        }
        None => {
            let obj = v.as_object().ok_or_else(|| bad("exponent data must be an object"))?;
            for (k, x) in obj {
                if k == "prime" {
                    continue;
                }
                let d: i64 = k.parse().map_err(|_| bad(format!("bad degree {k:?}")))?;
                b.insert(d, padic_from_json(p, x, prec)?);
            }
        }
    }
    if let Some(d) = b.keys().find(|d| **d < 1) {
        return Err(bad(format!("degree {d} must be at least 1")));
    }
    Ok((p, b))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn padic_forms() {
        let x = PAdic::from_int(2, 12, 5);
        let j = padic_to_json(&x);
        assert_eq!(j, json!({"v": 2, "unit": "3", "prec": 5}));
        assert_eq!(padic_from_json(2, &j, 9).unwrap(), x);
        assert_eq!(padic_from_json(2, &json!(12), 5).unwrap(), x);
        assert_eq!(padic_from_json(2, &json!("2^2 * 3 :: O(2^7)"), 9).unwrap(), x);
        let z = padic_from_json(3, &json!({"v": null, "unit": "0", "prec": null}), 5).unwrap();
        assert!(z.is_exact_zero());
        let third = padic_from_json(3, &json!("1/3"), 4).unwrap();
        assert_eq!(third.valuation(), Some(-1));
    }

    #[test]
    fn series_roundtrip() {
        let w = LaurentWindow::from_ints(3, 10, &[(-2, 9), (0, 1), (4, 2)]).with_norm_faithful(true);
        let j = series_to_json(&w);
        let back = series_from_json(&j, 2, 10).unwrap();
        assert_eq!(back, w);
    }

    #[test]
    fn family_roundtrip_and_default_bounds() {
        let mut f = WittFamily::empty(2, 4, 8);
        f.insert(1, WittVector::from_ints(2, &[1, 0, 0, 1], 10).unwrap()).unwrap();
        f.insert(-3, WittVector::from_ints(2, &[2, 4], 10).unwrap()).unwrap();
        let back = family_from_json(&family_to_json(&f), 3, 10).unwrap();
        assert_eq!(back, f);
        let bare = json!({"prime": 2, "entries": [{"n": 1, "witt": {"components": [1, 0, 0]}}]});
        let g = family_from_json(&bare, 2, 10).unwrap();
        assert_eq!((g.neg_bound(), g.pos_bound()), (0, 4));
    }

    #[test]
    fn operator_with_envelope() {
        let w = LaurentWindow::from_ints(2, 10, &[(1, 1)]).with_norm_faithful(true);
        let op = OperatorSpec::diff(w);
        let env = json!({"version": "x", "config": {}, "result": operator_to_json(&op, None)});
        let back = operator_from_json(&env, None, None, 2, 10).unwrap();
        assert_eq!(back.op, op);
        assert!(operator_from_json(&series_to_json(op.series()), None, None, 2, 10).is_err());
    }
}
