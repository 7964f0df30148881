use std::time::{Duration, Instant};

use amice_core::amice::{LaurentWindow, QParam, Side};
use amice_core::lemmas::{self, LemmaId, LemmaRange};
use amice_core::motzkin::{decompose, recompose, MotzkinFactors};
use amice_core::norm::Exponent;
use amice_core::radius::{ray_estimate, OpKind, OperatorSpec};
use amice_core::solvability::{artin_hasse, canonical_form, check_with, generate, q_deform, CheckConfig, Verdict, WittFamily};
use amice_core::witt::{ghost, witt_ring, WittOp, WittVector};
use amice_core::{NormValue, PAdic};
use num::{BigInt, BigRational, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = std::result::Result<String, String>;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn coprime_unit(rng: &mut ChaCha8Rng, p: u32) -> i64 {
    loop {
        let u: i64 = rng.gen_range(1..2000);
        if u % p as i64 != 0 {
            return if rng.gen_bool(0.5) { u } else { -u };
        }
    }
}

fn random_padic(rng: &mut ChaCha8Rng, p: u32, vmin: i64, vmax: i64, prec: u32) -> PAdic {
    let v = rng.gen_range(vmin..=vmax);
    PAdic::from_int(p, coprime_unit(rng, p), prec).shift(v)
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> std::result::Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn err(e: amice_core::Error) -> String {
    e.to_string()
}

fn ghost_int(p: u32, x: &[i64], m: usize) -> BigInt {
    (0..=m).fold(BigInt::zero(), |acc, j| acc + BigInt::from(p).pow(j as u32) * BigInt::from(x[j]).pow(p.pow((m - j) as u32)))
}

fn unghost_rational(p: u32, w: &[BigInt]) -> Vec<BigRational> {
    let mut out: Vec<BigRational> = Vec::new();
    for (m, wm) in w.iter().enumerate() {
        let mut acc = BigRational::from_integer(wm.clone());
        for (j, s) in out.iter().enumerate() {
            let pj = BigRational::from_integer(BigInt::from(p).pow(j as u32));
            acc -= pj * num::pow(s.clone(), p.pow((m - j) as u32) as usize);
        }
        out.push(acc / BigRational::from_integer(BigInt::from(p).pow(m as u32)));
    }
    out
}

fn criterion_1() -> Outcome {
    let prec = 24;
    let mut cases = 0u64;
    for p in [2u32, 3] {
        for len in 1..=3usize {
            let total = 5usize.pow(len as u32);
            let vec_of = |mut k: usize| -> Vec<i64> {
                (0..len)
                    .map(|_| {
                        let d = (k % 5) as i64 - 2;
                        k /= 5;
                        d
                    })
                    .collect()
            };
            for a in 0..total {
                let x = vec_of(a);
                let wx = WittVector::from_ints(p, &x, prec).map_err(err)?;
                for b in 0..total {
                    let y = vec_of(b);
                    let wy = WittVector::from_ints(p, &y, prec).map_err(err)?;
                    for op in [WittOp::Add, WittOp::Mul] {
                        let ghosts: Vec<BigInt> = (0..len)
                            .map(|m| match op {
                                WittOp::Add => ghost_int(p, &x, m) + ghost_int(p, &y, m),
                                _ => ghost_int(p, &x, m) * ghost_int(p, &y, m),
                            })
                            .collect();
                        let oracle = unghost_rational(p, &ghosts);
                        if len >= 2 {
                            let pp = BigInt::from(p);
                            let (x0, x1, y0, y1) = (BigInt::from(x[0]), BigInt::from(x[1]), BigInt::from(y[0]), BigInt::from(y[1]));
                            let e = p as usize;
                            let s1 = match op {
                                WittOp::Add => {
                                    let c = num::pow(x0.clone(), e) + num::pow(y0.clone(), e) - num::pow(&x0 + &y0, e);
                                    &x1 + &y1 + c / &pp
                                }
                                _ => num::pow(x0.clone(), e) * &y1 + num::pow(y0.clone(), e) * &x1 + &pp * &x1 * &y1,
                            };
                            ensure(oracle[1] == BigRational::from_integer(s1), || {
                                format!("ghost oracle disagrees with S_1/P_1 at p={p} {x:?} {y:?}")
                            })?;
                        }
                        let got = witt_ring(op, &wx, &wy).map_err(err)?;
                        for (m, o) in oracle.iter().enumerate() {
                            ensure(o.is_integer(), || format!("non-integral universal value at p={p} {x:?} {y:?}"))?;
                            let expect = PAdic::from_bigint(p, &o.to_integer(), prec);
                            ensure(got.component(m).agrees_with(&expect), || {
                                format!("p={p} {op:?} {x:?} {y:?} slot {m}: got {} expected {o}", got.component(m))
                            })?;
                        }
                        cases += 1;
                    }
                }
            }
        }
    }
    Ok(format!("{cases} exhaustive sums and products"))
}

fn criterion_2() -> Outcome {
    let prec = 24;
    let mut r = rng(2);
    let mut worst = 0i64;
    for p in [2u32, 3, 5] {
        for _ in 0..1000 {
            let comps: Vec<PAdic> = (0..8).map(|_| random_padic(&mut r, p, 0, 3, prec).reduce_abs(prec as i64)).collect();
            let lam = WittVector::new(p, comps).map_err(err)?;
            let back = ghost(&lam).unghost().map_err(err)?;
            ensure(back.agrees_with(&lam), || format!("unghost(ghost(x)) != x at p={p}: {lam:?}"))?;
            for m in 0..8 {
                let got = back.component(m).abs_precision().unwrap_or(i64::MAX);
                let lost = prec as i64 - got;
                worst = worst.max(lost);
                ensure(lost <= m as i64, || format!("slot {m} lost {lost} digits at p={p}"))?;
            }
        }
    }
    Ok(format!("3000 vectors, worst slot loss {worst} digits"))
}

fn random_family(r: &mut ChaCha8Rng, p: u32, neg: i64, pos: i64, prec: u32) -> std::result::Result<WittFamily, String> {
    let a0 = PAdic::from_int(p, r.gen_range(0..(p as i64).pow(3)), prec);
    let mut fam = WittFamily::new(p, a0, neg, pos).map_err(err)?;
    for n in (1..=pos).filter(|n| n % p as i64 != 0) {
        if r.gen_bool(0.6) {
            let len = fam.column_len(n);
            let comps = (0..len).map(|_| random_padic(r, p, 0, 2, prec)).collect();
            fam.insert(n, WittVector::new(p, comps).map_err(err)?).map_err(err)?;
        }
    }
    for n in (1..=neg).filter(|n| n % p as i64 != 0) {
        if r.gen_bool(0.6) {
            let len = fam.column_len(-n);
            let comps = (0..len)
                .map(|m| {
                    let level = neg / (p as i64).pow(m as u32);
                    let outer = level >= 3 && 3 * n > 2 * level;
                    random_padic(r, p, if outer { 3 } else { 1 }, if outer { 5 } else { 3 }, prec)
                })
                .collect();
            fam.insert(-n, WittVector::new(p, comps).map_err(err)?).map_err(err)?;
        }
    }
    Ok(fam)
}

fn criterion_3() -> Outcome {
    let prec = 128;
    let degree = 64;
    let mut r = rng(3);
    let primes = [2u32, 3, 5];
    for i in 0..100 {
        let p = primes[i % 3];
        let fam = random_family(&mut r, p, 0, degree, prec)?;
        let e = artin_hasse(&fam, degree, Side::Plus).map_err(err)?;
        for d in 1..=degree {
            let c = e.coeff_or_zero(d);
            ensure(c.norm_bound() <= NormValue::one(), || format!("integral family {i} (p={p}) has |E_{d}| = {}", c.norm_bound()))?;
        }
    }
    for i in 0..20 {
        let p = primes[i % 3];
        let mut fam = random_family(&mut r, p, 0, degree, prec)?;
        let n = loop {
            let n = r.gen_range(1..=degree);
            if n % p as i64 != 0 {
                break n;
            }
        };
        let m = r.gen_range(0..fam.column_len(n));
        fam.set_slot(n, m, PAdic::from_int(p, 1, prec).shift(-1)).map_err(err)?;
        let e = artin_hasse(&fam, degree, Side::Plus).map_err(err)?;
        let found = (1..=degree).any(|d| e.coeff_or_zero(d).valuation().is_some_and(|v| v < 0));
        ensure(found, || format!("family with |λ_({n},{m})| = p gave no coefficient of norm > 1"))?;
    }
    Ok("100 integral families integral to degree 64, 20 corrupted families detected".into())
}

struct Fixture {
    kind: OpKind,
    p: u32,
    q: Option<QParam>,
    neg: i64,
    pos: i64,
    prec: u32,
}

fn fixtures(kind: OpKind) -> std::result::Result<Vec<Fixture>, String> {
    let mut out = Vec::new();
    for i in 0..100 {
        let p = [2u32, 3, 5][i % 3];
        out.push(match kind {
            OpKind::Diff => Fixture { kind, p, q: None, neg: 12, pos: 16, prec: 24 },
            OpKind::QDiff => {
                let t = if p == 2 { 3 } else { 2 };
                let prec = 16;
                let q = QParam::one_plus_p_pow(p, t, prec).map_err(err)?;
                Fixture { kind, p, q: Some(q), neg: 4, pos: 24, prec }
            }
        });
    }
    Ok(out)
}

/// A single slot set to norm `p`.  For q-difference operators only slots
/// whose ghost column ends inside the generator's working window are
/// eligible; the others have no operator in the convergence domain.
fn corrupt(
    r: &mut ChaCha8Rng,
    fam: &WittFamily,
    fx: &Fixture,
    clean: &OperatorSpec,
) -> std::result::Result<(i64, usize, OperatorSpec), String> {
    let p = fx.p as i64;
    let mut slots: Vec<(i64, usize)> = (1..=fx.pos)
        .chain((1..=fx.neg).map(|n| -n))
        .filter(|n| n % p != 0)
        .flat_map(|n| {
            let h = fam.column_len(n);
            (0..h).map(move |m| (n, m))
        })
        .filter(|&(n, m)| match fx.kind {
            OpKind::Diff => true,
            OpKind::QDiff => {
                let edge = if n > 0 { clean.series().i_max() } else { -clean.series().i_min() };
                m + 1 == fam.column_len(n) && n.abs() * p.pow(m as u32 + 1) > edge
            }
        })
        .collect();
    while !slots.is_empty() {
        let (n, m) = slots.swap_remove(r.gen_range(0..slots.len()));
        let mut bad = fam.clone();
        bad.set_slot(n, m, PAdic::from_int(fx.p, coprime_unit(r, fx.p), fx.prec).shift(-1)).map_err(err)?;
        match generate(&bad, fx.kind, fx.q.as_ref(), fx.prec) {
            Ok(op) => return Ok((n, m, op)),
            Err(amice_core::Error::OutOfConvergenceDomain(_)) if fx.kind == OpKind::QDiff => continue,
            Err(e) => return Err(err(e)),
        }
    }
    Err(format!("no corruptible slot for {:?} p={} on [{}, {}]", fx.kind, fx.p, clean.series().i_min(), clean.series().i_max()))
}

fn criterion_4(qdiff_ops: &mut Vec<OperatorSpec>) -> Outcome {
    let mut r = rng(4);
    let mut summary = Vec::new();
    for kind in [OpKind::Diff, OpKind::QDiff] {
        let mut flips = 0;
        for fx in fixtures(kind)? {
            let fam = random_family(&mut r, fx.p, fx.neg, fx.pos, fx.prec)?;
            let cfg = CheckConfig { window: fam.window(), ..CheckConfig::default() };
            let op = generate(&fam, fx.kind, fx.q.as_ref(), fx.prec).map_err(err)?;
            let rep = check_with(&op, &cfg).map_err(err)?;
            ensure(rep.verdict.is_pass(), || format!("{kind:?} p={} generated operator gave {}", fx.p, rep.verdict))?;
            if kind == OpKind::QDiff {
                qdiff_ops.push(op.clone());
            }
            let (n, m, op) = corrupt(&mut r, &fam, &fx, &op)?;
            let rep = check_with(&op, &cfg).map_err(err)?;
            match rep.verdict {
                Verdict::Fail { witness } if witness.n == n && witness.m == m => flips += 1,
                v => return Err(format!("{kind:?} p={} corruption at ({n},{m}) gave {v}", fx.p)),
            }
        }
        summary.push(format!("{kind:?} 100/100 pass, {flips}/100 flips"));
    }
    Ok(summary.join("; "))
}

fn random_laurent(r: &mut ChaCha8Rng, p: u32, lo: i64, hi: i64, vmin: i64, vmax: i64, prec: u32) -> LaurentWindow {
    let mut w = LaurentWindow::new(p, lo, hi);
    for i in lo..=hi {
        if r.gen_bool(0.7) {
            w.put(i, random_padic(r, p, vmin, vmax, prec));
        }
    }
    w
}

fn criterion_5() -> Outcome {
    let prec = 40;
    let k_max = 64;
    let mut r = rng(5);
    for kind in [OpKind::Diff, OpKind::QDiff] {
        for i in 0..50 {
            let p = [2u32, 3, 5][i % 3];
            let omega = Exponent::new(1, p as i64 - 1);
            let (op, closed) = match kind {
                OpKind::Diff => {
                    let mut g = random_laurent(&mut r, p, -3, 3, 0, 3, prec);
                    let v = r.gen_range(-2..=-1);
                    g.put(r.gen_range(-3..=3), random_padic(&mut r, p, v, v, prec));
                    let vmin = g.min_valuation().expect("nonzero");
                    (OperatorSpec::diff(g.with_norm_faithful(true)), omega - Exponent::from_integer(vmin))
                }
                OpKind::QDiff => {
                    let t = r.gen_range(2..=3);
                    let q = QParam::one_plus_p_pow(p, t, prec).map_err(err)?;
                    let mut h = random_laurent(&mut r, p, -3, 3, 0, t + 2, prec);
                    let v = r.gen_range(0..t);
                    h.put(r.gen_range(-3..=3), random_padic(&mut r, p, v, v, prec));
                    let vmin = h.min_valuation().expect("nonzero");
                    let mut a = h;
                    a.add_term(0, &PAdic::one(p, prec));
                    let op = OperatorSpec::qdiff(a.with_norm_faithful(true), q).map_err(err)?;
                    (op, omega + Exponent::from_integer(t - vmin))
                }
            };
            let rep = ray_estimate(&op, NormValue::one(), k_max).map_err(err)?;
            let expect = NormValue::from_exponent(closed);
            for (k, e) in rep.estimates.iter().enumerate() {
                ensure(*e == expect, || format!("{kind:?} #{i} p={p}: estimate at k={} is {e}, closed form {expect}", k + 1))?;
            }
            ensure(rep.exact.is_some_and(|c| c.value == expect), || format!("{kind:?} #{i}: certified value missing"))?;
        }
    }
    Ok("50 operators per kind, every k <= 64 exact".into())
}

fn one_sided(r: &mut ChaCha8Rng, p: u32, side: Side, prec: u32) -> LaurentWindow {
    let d = r.gen_range(1..=4);
    let mut w = match side {
        Side::Minus => random_laurent(r, p, -d, -1, 1, 3, prec).with_window(-d, 0),
        Side::Plus => random_laurent(r, p, 1, d, 1, 3, prec).with_window(0, d),
    };
    w.put(0, PAdic::one(p, prec));
    w
}

fn criterion_6(qdiff_ops: &[OperatorSpec]) -> Outcome {
    let prec = 20;
    let mut r = rng(6);
    let contracting = |f: &MotzkinFactors| f.residuals.windows(2).all(|w| w[0] < w[1]);
    for i in 0..200 {
        let p = [2u32, 3, 5][i % 3];
        let lambda = random_padic(&mut r, p, -2, 2, prec);
        let n = r.gen_range(-3..=3);
        let f =
            MotzkinFactors::new(lambda, n, one_sided(&mut r, p, Side::Minus, prec), one_sided(&mut r, p, Side::Plus, prec)).map_err(err)?;
        let a = recompose(&f).with_norm_faithful(true);
        let g = decompose(&a).map_err(err)?;
        ensure(g.agrees_with(&f), || format!("decompose(recompose(F)) != F for #{i} p={p}"))?;
        ensure(contracting(&g), || format!("residuals {:?} not increasing", g.residuals))?;
    }
    for i in 0..200 {
        let p = [2u32, 3, 5][i % 3];
        let v0 = r.gen_range(-2..=2);
        let mut a = random_laurent(&mut r, p, -3, 3, v0 + 1, v0 + 4, prec);
        a.put(r.gen_range(-3..=3), random_padic(&mut r, p, v0, v0, prec));
        let a = a.with_norm_faithful(true);
        let f = decompose(&a).map_err(err)?;
        ensure(recompose(&f).agrees_with(&a), || format!("recompose(decompose(a)) != a for {a}"))?;
        ensure(contracting(&f), || format!("residuals {:?} not increasing", f.residuals))?;
    }
    for op in qdiff_ops {
        let f = decompose(op.series()).map_err(err)?;
        let lam_minus_one = f.lambda.sub(&PAdic::one(op.prime(), 16));
        ensure(f.n == 0 && lam_minus_one.norm_bound() < NormValue::one(), || {
            format!("solvable operator gave N={} lambda={}", f.n, f.lambda)
        })?;
    }
    Ok(format!("200+200 roundtrips, {} solvable q-difference operators with N = 0", qdiff_ops.len()))
}

fn criterion_7() -> Outcome {
    let start = Instant::now();
    let mut cases = 0;
    for p in [2u32, 3, 5] {
        let mut reports = lemmas::run_defaults(p).map_err(err)?;
        for rho in [-1, 1] {
            let mut range = LemmaRange::default_for(LemmaId::L5_1_2, p);
            range.rho = Exponent::from_integer(rho);
            reports.push(lemmas::run(&range).map_err(err)?);
        }
        for rep in reports {
            ensure(rep.holds(), || format!("{} at p={p}: {} counterexamples", rep.which, rep.counterexamples))?;
            cases += rep.cases.len();
        }
    }
    let took = start.elapsed();
    ensure(took < Duration::from_secs(30), || format!("lemma suites took {took:?}"))?;
    Ok(format!("{cases} cases, 0 counterexamples, {:.1}s", took.as_secs_f64()))
}

fn criterion_8() -> Outcome {
    let mut worst = 0.0f64;
    let mut saw_kappa_two = false;
    for (p, q) in [(3u32, 4i64), (2, 5), (5, 6), (3, 10), (2, 3), (2, 7)] {
        let qp = QParam::from_int(p, q, 64).map_err(err)?;
        saw_kappa_two |= qp.kappa() == 2;
        let root = amice_core::amice::q_factorial_root_exponent(&qp, 200).ok_or("zero factorial")?;
        let closed = qp.omega_q().exponent().ok_or("zero omega_q")?;
        let (a, b) = (to_f64(root), to_f64(closed));
        let rel = ((a - b) / b).abs();
        worst = worst.max(rel);
        ensure(rel <= 0.05, || format!("p={p} q={q}: root exponent {a} vs closed form {b}"))?;
    }
    ensure(saw_kappa_two, || "no kappa = 2 configuration".into())?;
    Ok(format!("6 configurations, worst relative error {:.2}%", worst * 100.0))
}

fn to_f64(e: Exponent) -> f64 {
    *e.numer() as f64 / *e.denom() as f64
}

fn criterion_9() -> Outcome {
    let prec = 72;
    let degree = 32;
    let mut r = rng(9);
    for i in 0..50 {
        let p = [2u32, 3, 5][i % 3];
        let fam = random_family(&mut r, p, 6, degree, prec)?;
        let op = generate(&fam, OpKind::Diff, None, prec).map_err(err)?;
        let cf = canonical_form(&op).map_err(err)?;
        let g = op.series();
        let h = &cf.gauge;
        ensure(h.coeff_or_zero(0).agrees_with(&PAdic::one(p, prec)), || "gauge does not start at 1".into())?;
        for j in 1..=degree {
            let lhs = h.coeff_or_zero(j).mul_int(j);
            let rhs = (1..=j).fold(PAdic::zero(p), |acc, i| acc.add(&g.coeff_or_zero(i).mul(&h.coeff_or_zero(j - i))));
            ensure(lhs.agrees_with(&rhs), || format!("#{i} p={p}: gauge identity fails at degree {j}"))?;
        }
        let rest = cf.op.series();
        ensure((1..=degree).all(|j| rest.coeff(j).is_none_or(PAdic::is_zero)), || {
            format!("#{i}: canonical operator keeps positive terms")
        })?;
    }
    Ok("50 operators, theta(h)/h = g^+ to degree 32".into())
}

fn criterion_10() -> Outcome {
    let prec = 40;
    let mut lines = Vec::new();
    for (p, top) in [(3u32, 9i64), (2, 8)] {
        let g = OperatorSpec::diff(LaurentWindow::from_ints(p, prec, &[(1, 1)]).with_window(0, top).with_norm_faithful(true));
        let mut last_coeff: Option<NormValue> = None;
        let mut last_series: Option<NormValue> = None;
        for k in 3..=6 {
            let q = QParam::one_plus_p_pow(p, k, prec).map_err(err)?;
            let d = q_deform(&g, &q, prec).map_err(err)?;
            let scaled = d.op.series().minus_one().scale(&q.q_minus_one().inv().map_err(err)?);
            let coeff_err = scaled.coeff_or_zero(1).sub(&PAdic::one(p, prec)).norm_bound();
            ensure(coeff_err <= q.q_minus_one_norm(), || format!("p={p} k={k}: error {coeff_err} exceeds |q-1|"))?;
            ensure(last_coeff.is_none_or(|l| coeff_err <= l), || format!("p={p} k={k}: coefficient error grew"))?;
            let mut dev = scaled.restrict(0, top);
            dev.add_term(1, &PAdic::from_int(p, -1, prec));
            let series_err = dev.gauss_norm_bound(NormValue::one());
            ensure(last_series.is_none_or(|l| series_err < l), || format!("p={p} k={k}: series deviation did not shrink"))?;
            last_coeff = Some(coeff_err);
            last_series = Some(series_err);
            lines.push(format!("p={p} k={k} coeff err {coeff_err} series err {series_err}"));
        }
    }
    Ok(lines.join(", "))
}

fn main() {
    let mut qdiff_ops = Vec::new();
    let mut failed = 0;
    let mut report = |name: &str, run: &mut dyn FnMut() -> Outcome| {
        let start = Instant::now();
        let outcome = run();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS {name} ({secs:.1}s): {detail}"),
            Err(e) => {
                failed += 1;
                println!("FAIL {name} ({secs:.1}s): {e}");
            }
        }
    };
    report("1 witt universal polynomials", &mut criterion_1);
    report("2 ghost roundtrip", &mut criterion_2);
    report("3 artin-hasse integrality", &mut criterion_3);
    report("4 solvability roundtrip and corruption", &mut || criterion_4(&mut qdiff_ops));
    report("5 small-radius closed form", &mut criterion_5);
    report("6 motzkin factorisation", &mut || criterion_6(&qdiff_ops));
    report("7 lemma suites", &mut criterion_7);
    report("8 q-factorial limit", &mut criterion_8);
    report("9 canonical gauge", &mut criterion_9);
    report("10 q-deformation limit", &mut criterion_10);
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
