//! Acceptance criteria 1–10, one PASS/FAIL line each.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::Command;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde_json::Value;

use hyperell::ensemble::{
    accumulate_moments, nonvanishing_proportion, one_level_average, one_level_average_exact,
    pair_correlation_average_exact, scan_ensemble, simple_zero_proportion, PassOptions,
};
use hyperell::fqx::enumerate::hyperelliptic;
use hyperell::fqx::{Field, FieldSpec, Poly};
use hyperell::lfunction::{central_value, compute_zeros, l_coefficients, multiplicity_profile};
use hyperell::ratios::{a_euler, exact_logderiv_average, ratios_logderiv, ratios_one_level, zeta_q, ShiftPair};
use hyperell::testfn::TestFunction;
use hyperell::theorems::{
    corollary_constants, katz_sarnak_exact, nonvanishing_bound, simple_zero_bound, thm1_rhs, thm2_rhs, PiecewiseLinear,
    ThmParams,
};
use hyperell::verify::{
    dual_route_checks, gauss_closed_check, lambda_square_check, lemma31_check, poisson_check, prime_count_check,
    symmetry_check, Check,
};

type Outcome = Result<String, String>;
type Criterion = (u32, &'static str, Duration, fn() -> Outcome);

fn field(s: &str) -> Field {
    Field::new(&s.parse::<FieldSpec>().unwrap()).unwrap()
}

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn require_checks(checks: &[Check]) -> Result<f64, String> {
    let mut worst: f64 = 0.0;
    for c in checks {
        ensure(c.pass, format!("{}: {}", c.name, c.detail))?;
        worst = worst.max(c.residual);
    }
    Ok(worst)
}

fn c1_running_example() -> Outcome {
    let f = field("3");
    let d = Poly::from_ints(&f, &[1, 2, 0, 1]);
    let l = l_coefficients(&d, &f).map_err(|e| e.to_string())?;
    ensure(l.coeffs == vec![1, 3, 3], format!("coefficients {:?}", l.coeffs))?;
    let z = compute_zeros(&l).map_err(|e| e.to_string())?;
    let gap = (z.angles[0] - 5.0 / 12.0).abs().max((z.angles[1] - 7.0 / 12.0).abs());
    ensure(gap < 1e-9, format!("angles {:?}", z.angles))?;
    let cv = central_value(&l);
    let (two, one) = (BigRational::from_integer(2.into()), BigRational::one());
    ensure(cv.a == two && cv.b == one, format!("central value ({}, {})", cv.a, cv.b))?;
    let m = multiplicity_profile(&l);
    ensure(m == vec![1, 1], format!("multiplicities {m:?}"))?;
    Ok(format!("c = (1,3,3), angle error {gap:.1e}, (A,B) = (2,1), multiplicities {m:?}"))
}

fn c2_riemann_hypothesis() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut count = 0;
    for (q, g) in [("3", 2), ("3", 3), ("5", 2)] {
        let f = field(q);
        for d in hyperelliptic(&f, 2 * g + 1) {
            let l = l_coefficients(&d, &f).map_err(|e| e.to_string())?;
            worst = worst.max(compute_zeros(&l).map_err(|e| e.to_string())?.max_residual());
            count += 1;
        }
    }
    ensure(count == 162 + 1458 + 2500, format!("{count} discriminants"))?;
    ensure(worst < 1e-8, format!("max residual {worst:e}"))?;
    Ok(format!("{count} discriminants, max root-radius residual {worst:.2e}"))
}

fn c3_dual_route() -> Outcome {
    let mut checks = dual_route_checks(&field("3"), 4, 0).map_err(|e| e.to_string())?;
    checks.extend(dual_route_checks(&field("5"), 2, 0).map_err(|e| e.to_string())?);
    let worst = require_checks(&checks)?;
    let cases: u64 = checks.iter().map(|c| c.cases).sum();
    Ok(format!("{} groups, {cases} discriminants, max per-D gap {worst:.2e}", checks.len()))
}

fn c4_identities() -> Outcome {
    let f3 = field("3");
    let f5 = field("5");
    let mut checks = vec![lemma31_check(&f3, 3, 2)];
    for f in [&f3, &f5] {
        checks.push(gauss_closed_check(f, 3, 3, 4));
        checks.push(poisson_check(f, 3));
        checks.push(lambda_square_check(f, 8));
    }
    for f in [&f3, &f5, &field("9")] {
        checks.push(prime_count_check(f, 6));
    }
    for g in 1..=3 {
        checks.push(symmetry_check(&f3, g));
    }
    let checks: Vec<Check> = checks.into_iter().collect::<Result<_, _>>().map_err(|e| e.to_string())?;
    let analytic = checks.iter().filter(|c| c.name.starts_with("gauss") || c.name.starts_with("poisson"));
    let worst = analytic.map(|c| c.residual).fold(0.0, f64::max);
    require_checks(&checks)?;
    Ok(format!("{} exact/analytic checks, max Gauss/Poisson residual {worst:.2e}", checks.len()))
}

fn c5_one_level_g6() -> Outcome {
    let (q, g) = (3u32, 6usize);
    let f = field("3");
    let tf = TestFunction::fejer(7);
    let cache = accumulate_moments(&f, g, 6, &PassOptions::default()).map_err(|e| e.to_string())?;
    ensure(cache.h == BigInt::from(1_062_882), format!("|H_13| = {}", cache.h))?;
    let exact = one_level_average(&tf, &cache, q).map_err(|e| e.to_string())?;
    let thm = thm1_rhs(&tf, q, g, &ThmParams::default()).map_err(|e| e.to_string())?;
    ensure(thm.k == 1, format!("window K = {}", thm.k))?;
    let with = exact - thm.total().to_f64().unwrap();
    let without = exact - thm.principal().to_f64().unwrap();
    let bound = 10.0 * 3f64.powf(6.0 / 2.0 - 2.0 * g as f64 - 0.5);
    let sec = thm.secondary.iter().find(|(k, _)| *k == 1).map(|(_, v)| v.to_f64().unwrap()).unwrap_or(0.0);
    let hat_third = tf.at_over_g(g / 3).to_f64().unwrap();
    let per_unit = sec / hat_third;
    ensure(with.abs() <= bound, format!("|residual| {:.3e} > {bound:.3e}", with.abs()))?;
    ensure(with.abs() < without.abs(), format!("residual {with:.3e} not below {without:.3e}"))?;
    ensure((per_unit.abs() - 1.27e-5).abs() < 0.01e-5, format!("secondary/Φ̂(1/3) = {per_unit:.4e}"))?;
    Ok(format!(
        "secondary k=1 {sec:.4e} (= {per_unit:.4e}·Φ̂(1/3)), residual {with:.3e} with vs {without:.3e} without, bound {bound:.3e}"
    ))
}

fn c6_pair_correlation_g4() -> Outcome {
    let (q, g) = (3u32, 4usize);
    let f = field("3");
    let tf = TestFunction::fejer(3);
    let cache = accumulate_moments(&f, g, 2, &PassOptions::default()).map_err(|e| e.to_string())?;
    let exact = pair_correlation_average_exact(&tf, &cache, q).map_err(|e| e.to_string())?;
    let thm = thm2_rhs(&tf, q, g, &ThmParams::default()).map_err(|e| e.to_string())?;
    ensure(thm.k == 1, format!("window K = {}", thm.k))?;
    let resid = (&exact - thm.total()).to_f64().unwrap();
    ensure(
        resid.abs() <= 10.0 * thm.error_scale,
        format!("|residual| {:.3e} > 10 × {:.3e}", resid.abs(), thm.error_scale),
    )?;
    Ok(format!(
        "c1..c4 = {}, {}, {}, {}; residual {resid:.3e}, error scale {:.3e}",
        thm.c1, thm.c2, thm.c3, thm.c4, thm.error_scale
    ))
}

fn c7_corollary_constants() -> Outcome {
    let c = corollary_constants();
    ensure((c.p0_bound - 0.94273).abs() <= 5e-5, format!("p0 bound {}", c.p0_bound))?;
    ensure((c.simple_bound - 0.67252).abs() <= 5e-5, format!("simple-zero bound {}", c.simple_bound))?;
    let nv = nonvanishing_bound(&PiecewiseLinear::sinc_squared_wide());
    let sz = simple_zero_bound(&PiecewiseLinear::fejer());
    ensure(nv == BigRational::new(15.into(), 16.into()), format!("Fourier-pair nonvanishing bound {nv}"))?;
    ensure(sz == BigRational::new(2.into(), 3.into()), format!("Fourier-pair simple-zero bound {sz}"))?;
    ensure(c.h0_residual < 1e-8, format!("h0 residual {:e}", c.h0_residual))?;
    Ok(format!(
        "p0 {:.6}, simple {:.6}, KS integral {}, bounds {nv} and {sz}, h0 residual {:.1e}",
        c.p0_bound,
        c.simple_bound,
        katz_sarnak_exact(&PiecewiseLinear::sinc_squared_wide()),
        c.h0_residual
    ))
}

fn c8_ratios() -> Outcome {
    let q = 3u32;
    let f = field("3");
    let mut diag: f64 = 0.0;
    let mut closed: f64 = 0.0;
    for r in [0.0, 0.05, 0.1, 0.2] {
        let a = a_euler(q, &ShiftPair::real(r, r), None).map_err(|e| e.to_string())?;
        diag = diag.max((a.value - 1.0).norm());
    }
    for t in [0.1, 0.3, 0.7] {
        let sp = ShiftPair { alpha: Complex64::new(0.0, -t), beta: Complex64::new(0.0, t) };
        let a = a_euler(q, &sp, None).map_err(|e| e.to_string())?.value;
        let z = zeta_q(q, Complex64::new(2.0, 0.0)).unwrap() / zeta_q(q, Complex64::new(2.0, -2.0 * t)).unwrap();
        closed = closed.max((a - z).norm());
    }
    ensure(diag < 1e-10, format!("A(r;r) − 1 = {diag:e}"))?;
    ensure(closed < 1e-10, format!("A(−it;it) closed-form gap {closed:e}"))?;
    let mut parts = vec![format!("A(r;r) gap {diag:.1e}, closed-form gap {closed:.1e}")];
    for g in [2usize, 3] {
        let bound = 10.0 * (q as f64).powf(-(g as f64) - 0.5 + 0.1 * g as f64);
        let tf = TestFunction::fejer(g as u32 + 1);
        let cache = accumulate_moments(&f, g, tf.support(), &PassOptions::default()).map_err(|e| e.to_string())?;
        let exact = one_level_average_exact(&tf, &cache, q).map_err(|e| e.to_string())?.to_f64(q);
        let one = (ratios_one_level(&tf, q, g).map_err(|e| e.to_string())?.total_f64() - exact).abs();
        let ld = (ratios_logderiv(q, 0.1, g).map_err(|e| e.to_string())?
            - exact_logderiv_average(&f, g, 0.1, &PassOptions::default()).map_err(|e| e.to_string())?)
        .abs();
        ensure(one <= bound && ld <= bound, format!("g={g}: gaps {one:.3e}, {ld:.3e} vs soft bound {bound:.3e}"))?;
        parts.push(format!("g={g}: 1-level gap {one:.2e}, ⟨L′/L⟩ gap {ld:.2e}, soft bound {bound:.2e}"));
    }
    Ok(parts.join("; "))
}

fn strip_metadata(text: &str) -> Result<Value, String> {
    let mut v: Value = serde_json::from_str(text).map_err(|e| format!("invalid JSON: {e}"))?;
    let obj = v.as_object_mut().ok_or("JSON output is not an object")?;
    ensure(obj.remove("metadata").is_some(), "no metadata object")?;
    Ok(v)
}

fn cli_json(threads: &str) -> Result<Value, String> {
    let out = Command::new(env!("CARGO_BIN_EXE_hyperell"))
        .args(["density", "--field", "3", "--g", "3", "--testfn", "fejer:3", "--N", "3", "--out", "json"])
        .args(["--threads", threads])
        .env_remove("HYPERELL_CACHE_DIR")
        .output()
        .map_err(|e| e.to_string())?;
    ensure(out.status.success(), format!("CLI exit status {}", out.status))?;
    strip_metadata(&String::from_utf8_lossy(&out.stdout))
}

fn c9_determinism() -> Outcome {
    let f = field("3");
    let mut docs = Vec::new();
    for t in [1, 2, 8] {
        docs.push(accumulate_moments(&f, 4, 8, &PassOptions::with_threads(t)).map_err(|e| e.to_string())?.to_json());
    }
    ensure(docs.windows(2).all(|w| w[0] == w[1]), "cache JSON differs across worker counts")?;
    let a = cli_json("1")?;
    let b = cli_json("8")?;
    let c = cli_json("1")?;
    ensure(a == b && a == c, "CLI JSON payload differs across runs")?;
    Ok(format!(
        "cache ({} bytes) identical for 1/2/8 workers; CLI payload identical for --threads 1, 8 and a rerun",
        docs[0].len()
    ))
}

fn c10_exact_counts() -> Outcome {
    let f = field("3");
    let consts = corollary_constants();
    let mut parts = Vec::new();
    for g in 0..=3 {
        let scan = scan_ensemble(&f, g, 1, &PassOptions::default()).map_err(|e| e.to_string())?;
        let nv = nonvanishing_proportion(&scan.cache);
        let sz = simple_zero_proportion(&scan.cache);
        let unit = |x: &BigRational| *x >= BigRational::zero() && *x <= BigRational::one();
        ensure(unit(&nv) && unit(&sz), format!("g={g}: proportions {nv}, {sz}"))?;
        ensure(scan.odd_centre_orders.is_zero(), format!("g={g}: {} odd central orders", scan.odd_centre_orders))?;
        parts.push(format!("g={g}: nonvanishing {nv}, simple {sz}"));
    }
    Ok(format!("{} (asymptotic {:.4}/{:.4})", parts.join("; "), consts.p0_bound, consts.simple_bound))
}

fn main() {
    let criteria: [Criterion; 10] = [
        (1, "running example", Duration::from_secs(1), c1_running_example),
        (2, "Riemann Hypothesis residuals", Duration::from_secs(60), c2_riemann_hypothesis),
        (3, "dual-route equality", Duration::from_secs(120), c3_dual_route),
        (4, "exact identity suite", Duration::from_secs(120), c4_identities),
        (5, "1-level density at g = 6", Duration::from_secs(600), c5_one_level_g6),
        (6, "pair correlation at g = 4", Duration::from_secs(180), c6_pair_correlation_g4),
        (7, "corollary constants", Duration::from_secs(1), c7_corollary_constants),
        (8, "ratios comparison", Duration::from_secs(60), c8_ratios),
        (9, "determinism", Duration::from_secs(60), c9_determinism),
        (10, "exact-count counterparts", Duration::from_secs(600), c10_exact_counts),
    ];
    let only: Option<u32> = std::env::var("ACCEPTANCE_ONLY").ok().and_then(|s| s.parse().ok());
    let mut failed = 0;
    for (id, name, limit, run) in criteria {
        if only.is_some_and(|o| o != id) {
            continue;
        }
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|_| Err("panicked".into()));
        let elapsed = start.elapsed();
        let outcome = match outcome {
            Ok(d) if elapsed > limit => {
                Err(format!("{d}; runtime {:.1}s exceeds {}s", elapsed.as_secs_f64(), limit.as_secs()))
            }
            other => other,
        };
        let (tag, detail) = match &outcome {
            Ok(d) => ("PASS", d),
            Err(d) => ("FAIL", d),
        };
        failed += usize::from(outcome.is_err());
        println!("criterion {id:>2} {tag} [{:.2}s] {name}: {detail}", elapsed.as_secs_f64());
    }
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
