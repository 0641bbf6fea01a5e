//! Ratios-conjecture predictions for the hyperelliptic ensemble: ζ_q, the
//! Euler product A_g(α;β), its diagonal derivative, the conjectured ratio
//! average, the averaged log-derivative and the resulting 1-level density,
//! with exact ensemble baselines.

use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;

use crate::ensemble::{PassOptions, PrimeTable};
use crate::error::{domain, Result};
use crate::fqx::arith::pi_q_f64;
use crate::fqx::enumerate::hyperelliptic;
use crate::fqx::Field;
use crate::lfunction::{l_from_psi, LPolynomial};
use crate::testfn::TestFunction;
use crate::theorems::c_phi;

/// Pole detection threshold for |1 − q^{…}|.
const POLE_TOL: f64 = 1e-12;

/// Default truncation target for Euler products.
pub const EULER_TOL: f64 = 1e-13;

const MAX_DEGREE: usize = 2000;

/// A pair of shifts (α, β).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ShiftPair {
    pub alpha: Complex64,
    pub beta: Complex64,
}

impl ShiftPair {
    pub fn real(alpha: f64, beta: f64) -> Self {
        ShiftPair { alpha: Complex64::new(alpha, 0.0), beta: Complex64::new(beta, 0.0) }
    }

    /// |Re α| < 1/4 and 0 < Re β < 1/4.
    pub fn in_window(&self) -> bool {
        self.alpha.re.abs() < 0.25 && self.beta.re > 0.0 && self.beta.re < 0.25
    }
}

fn qpow_c(q: u32, s: Complex64) -> Complex64 {
    (s * (q as f64).ln()).exp()
}

/// ζ_q(s) = (1 − q^{1−s})^{−1}.
pub fn zeta_q(q: u32, s: Complex64) -> Result<Complex64> {
    let den = Complex64::new(1.0, 0.0) - qpow_c(q, Complex64::new(1.0, 0.0) - s);
    if den.norm() < POLE_TOL {
        return domain(format!("ζ_q has a pole at s = {s}"));
    }
    Ok(den.inv())
}

/// 𝒵(u) = (1 − qu)^{−1}.
pub fn zeta_u(q: u32, u: Complex64) -> Result<Complex64> {
    let den = Complex64::new(1.0, 0.0) - u * q as f64;
    if den.norm() < POLE_TOL {
        return domain("𝒵 has a pole at u = 1/q");
    }
    Ok(den.inv())
}

/// ζ′_q/ζ_q(1 + 2r) = −log q · q^{−2r}/(1 − q^{−2r}), natural-log units.
pub fn zeta_log_derivative(q: u32, r: f64) -> Result<f64> {
    let x = (q as f64).powf(-2.0 * r);
    if (1.0 - x).abs() < POLE_TOL {
        return domain("ζ′_q/ζ_q(1+2r) has a pole at r = 0");
    }
    Ok(-(q as f64).ln() * x / (1.0 - x))
}

/// A truncated Euler product with a bound on the discarded factors.
#[derive(Clone, Copy, Debug)]
pub struct EulerValue {
    pub value: Complex64,
    pub tail_bound: f64,
    pub degree: usize,
}

/// Local factor minus one at |P| = x = q^m:
/// (x^{−α−β} − x^{−2α}) / (x(x+1)(1 − x^{−1−α−β})).
fn local_excess(q: u32, m: usize, sp: &ShiftPair) -> Complex64 {
    let lx = m as f64 * (q as f64).ln();
    let x = lx.exp();
    let p = |s: Complex64| (s * lx).exp();
    let one = Complex64::new(1.0, 0.0);
    (p(-sp.alpha - sp.beta) - p(-2.0 * sp.alpha)) / (x * (x + 1.0) * (one - p(-one - sp.alpha - sp.beta)))
}

/// log(1 + w) without cancellation for small |w|.
fn ln_1p(w: Complex64) -> Complex64 {
    if w.norm() < 1e-4 {
        w - w * w / 2.0 + w * w * w / 3.0 - w * w * w * w / 4.0
    } else {
        (Complex64::new(1.0, 0.0) + w).ln()
    }
}

/// Bound on |local_excess| · π_q(m), from |x^{−s}| = x^{−Re s}.
fn excess_bound(q: u32, m: usize, sp: &ShiftPair) -> f64 {
    let x = (q as f64).powi(m as i32);
    let a = x.powf(-(sp.alpha + sp.beta).re) + x.powf(-2.0 * sp.alpha.re);
    let d = 1.0 - x.powf(-1.0 - (sp.alpha + sp.beta).re);
    a / (x * (x + 1.0) * d) * x / m as f64
}

/// A_g(α;β) = Π_P (1 − |P|^{−1−α−β})^{−1}(1 − 1/(|P|^{1+2α}(|P|+1)) − 1/(|P|^{α+β}(|P|+1))),
/// grouped by degree, truncated at `dmax` (or where the tail falls below
/// 1e−13 when `dmax` is None).
pub fn a_euler(q: u32, sp: &ShiftPair, dmax: Option<usize>) -> Result<EulerValue> {
    let ratio = (q as f64).powf(-(sp.alpha + sp.beta).re.min(2.0 * sp.alpha.re) - 1.0);
    if (sp.alpha + sp.beta).re <= -0.5 || sp.alpha.re <= -0.5 || ratio >= 1.0 {
        return domain("A_g(α;β) needs Re(α+β) > −1/2 and Re α > −1/2");
    }
    let mut log_sum = Complex64::zero();
    let mut m = 1;
    let tail = |m: usize| excess_bound(q, m + 1, sp) / (1.0 - ratio);
    loop {
        let w = local_excess(q, m, sp);
        log_sum += ln_1p(w) * pi_q_f64(q, m as u64);
        let done = match dmax {
            Some(d) => m >= d,
            None => tail(m) < EULER_TOL || m >= MAX_DEGREE,
        };
        if done {
            break;
        }
        m += 1;
    }
    let value = log_sum.exp();
    let t = tail(m);
    Ok(EulerValue { value, tail_bound: value.norm() * (t.exp() - 1.0) * 1.01, degree: m })
}

/// A′_g(r;r) = Σ_P log|P| / ((|P|^{1+2r} − 1)(|P|+1)) in units of log q.
pub fn a_prime_diag(q: u32, r: f64, dmax: usize) -> Result<f64> {
    if r <= -0.25 {
        return domain("A′_g(r;r) needs r > −1/4");
    }
    let qf = q as f64;
    Ok((1..=dmax)
        .map(|m| {
            let x = qf.powi(m as i32);
            pi_q_f64(q, m as u64) * m as f64 / ((x.powf(1.0 + 2.0 * r) - 1.0) * (x + 1.0))
        })
        .sum())
}

/// A′_g(r;r) in natural-log units, truncated where terms fall below 1e−17.
pub fn a_prime_diag_natural(q: u32, r: f64) -> Result<f64> {
    let dmax = ((40.0 / ((1.0 + 2.0 * r) * (q as f64).log10())).ceil() as usize).clamp(8, MAX_DEGREE);
    Ok(a_prime_diag(q, r, dmax)? * (q as f64).ln())
}

/// R(α;β) = ζ_q(1+2α)/ζ_q(1+α+β)·A_g(α;β) + q^{−2gα} ζ_q(1−2α)/ζ_q(1−α+β)·A_g(−α;β).
pub fn ratios_r(q: u32, sp: &ShiftPair, g: usize) -> Result<Complex64> {
    let one = Complex64::new(1.0, 0.0);
    let pole = |z: Complex64, what: &str| -> Result<Complex64> {
        if z.norm() < POLE_TOL {
            return domain(format!("pole of {what} at α = {}, β = {}", sp.alpha, sp.beta));
        }
        Ok(z)
    };
    // ζ_q(1+2α)/ζ_q(1+α+β) = (1 − q^{−α−β})/(1 − q^{−2α})
    let d1 = pole(one - qpow_c(q, -2.0 * sp.alpha), "ζ_q(1+2α)")?;
    let first = (one - qpow_c(q, -sp.alpha - sp.beta)) / d1 * a_euler(q, sp, None)?.value;
    let d2 = pole(one - qpow_c(q, 2.0 * sp.alpha), "ζ_q(1−2α)")?;
    let flipped = ShiftPair { alpha: -sp.alpha, beta: sp.beta };
    let second = qpow_c(q, -2.0 * g as f64 * sp.alpha) * (one - qpow_c(q, sp.alpha - sp.beta)) / d2
        * a_euler(q, &flipped, None)?.value;
    Ok(first + second)
}

/// ζ′_q/ζ_q(1+2r) + A′_g(r;r) − log q · q^{−2gr} ζ_q(1−2r) A_g(−r;r), natural-log units.
pub fn ratios_logderiv(q: u32, r: f64, g: usize) -> Result<f64> {
    let lq = (q as f64).ln();
    let z = zeta_q(q, Complex64::new(1.0 - 2.0 * r, 0.0))?;
    let a = a_euler(q, &ShiftPair::real(-r, r), None)?.value;
    let last = lq * (q as f64).powf(-2.0 * g as f64 * r) * (z * a).re;
    Ok(zeta_log_derivative(q, r)? + a_prime_diag_natural(q, r)? - last)
}

/// The four contributions to the conjectured 1-level density.
#[derive(Clone, Debug)]
pub struct RatiosOneLevel {
    /// Φ̂(0)
    pub a1: BigRational,
    /// −(1/g) Σ_{n≤N/2} Φ̂(n/g)
    pub a2: BigRational,
    /// c(Φ,g)
    pub a3: BigRational,
    /// −Φ̂(1)/(g(q−1)) + (1/g) Σ_{g<n≤N/2} Φ̂(n/g)
    pub a4: BigRational,
}

impl RatiosOneLevel {
    pub fn total(&self) -> BigRational {
        &self.a1 + &self.a2 + &self.a3 + &self.a4
    }

    pub fn total_f64(&self) -> f64 {
        self.total().to_f64().unwrap()
    }
}

/// The 1-level density predicted by the ratios conjecture, for any support.
pub fn ratios_one_level(tf: &TestFunction, q: u32, g: usize) -> Result<RatiosOneLevel> {
    if g == 0 {
        return domain("the ratios 1-level density needs g >= 1");
    }
    let gq = BigRational::from_integer(g.into());
    let n2 = tf.support() / 2;
    let mut a2 = BigRational::zero();
    for n in 1..=n2 {
        a2 -= tf.at_over_g(n);
    }
    let mut a4 = -tf.at_over_g(g) / BigRational::from_integer((q - 1).into());
    for n in g + 1..=n2 {
        a4 += tf.at_over_g(n);
    }
    Ok(RatiosOneLevel { a1: tf.coeff(0), a2: a2 / &gq, a3: c_phi(tf, q, g)?, a4: a4 / gq })
}

/// Ensemble average of a per-D functional of ℒ over H_{2g+1}.
fn ensemble_mean<F>(field: &Field, g: usize, opts: &PassOptions, f: F) -> Result<f64>
where
    F: Fn(&LPolynomial) -> f64 + Sync,
{
    let required = (field.q() as u128).checked_pow(2 * g as u32 + 1).unwrap_or(u128::MAX);
    if required > opts.budget {
        return Err(crate::Error::Budget { required, budget: opts.budget });
    }
    let table = PrimeTable::new(field, g)?;
    let discs: Vec<_> = hyperelliptic(field, 2 * g + 1).collect();
    let run = || -> Result<Vec<f64>> {
        discs.par_iter().map(|d| Ok(f(&l_from_psi(d, &table.psi(d, g, field), field.q(), g)?))).collect()
    };
    let vals = if opts.threads == 0 {
        run()?
    } else {
        rayon::ThreadPoolBuilder::new()
            .num_threads(opts.threads)
            .build()
            .map_err(|e| crate::Error::Domain(format!("thread pool: {e}")))?
            .install(run)?
    };
    Ok(vals.iter().sum::<f64>() / vals.len() as f64)
}

/// ⟨L(1/2+α)/L(1/2+β)⟩ over H_{2g+1} for real shifts.
pub fn exact_ratio_average(field: &Field, g: usize, alpha: f64, beta: f64, opts: &PassOptions) -> Result<f64> {
    ensemble_mean(field, g, opts, |l| l.eval_s(0.5 + alpha) / l.eval_s(0.5 + beta))
}

/// ⟨L′/L(1/2+r)⟩ over H_{2g+1}, natural-log units.
pub fn exact_logderiv_average(field: &Field, g: usize, r: f64, opts: &PassOptions) -> Result<f64> {
    ensemble_mean(field, g, opts, |l| l.log_derivative(0.5 + r))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ensemble::{accumulate_moments, one_level_average};
    use crate::fqx::FieldSpec;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn zeta_closed_form() {
        assert!((zeta_q(3, c(2.0, 0.0)).unwrap() - c(1.5, 0.0)).norm() < 1e-15);
        let pole = c(1.0, 2.0 * std::f64::consts::PI / 3f64.ln());
        assert!(zeta_q(3, pole).is_err());
        assert_eq!(zeta_u(3, c(0.0, 0.0)).unwrap(), c(1.0, 0.0));
    }

    #[test]
    fn euler_product_on_the_diagonal_is_one() {
        for q in [3, 5] {
            for r in [0.0, 0.05, 0.1, 0.2] {
                let a = a_euler(q, &ShiftPair::real(r, r), None).unwrap();
                assert!((a.value - 1.0).norm() < 1e-10);
            }
        }
    }

    #[test]
    fn euler_product_closed_form() {
        for q in [3, 5] {
            for t in [0.0, 0.1, 0.3, 0.7] {
                let sp = ShiftPair { alpha: c(0.0, -t), beta: c(0.0, t) };
                let a = a_euler(q, &sp, None).unwrap();
                let want = zeta_q(q, c(2.0, 0.0)).unwrap() / zeta_q(q, c(2.0, -2.0 * t)).unwrap();
                assert!((a.value - want).norm() < 1e-10, "q={q} t={t}");
            }
        }
    }

    #[test]
    fn truncation_tail_is_honest() {
        let sp = ShiftPair::real(0.1, 0.2);
        let a = a_euler(3, &sp, Some(10)).unwrap();
        let b = a_euler(3, &sp, Some(20)).unwrap();
        assert!((a.value - b.value).norm() <= a.tail_bound);
    }

    #[test]
    fn prime_derivative() {
        assert!(a_prime_diag(3, 0.1, 30).unwrap() < a_prime_diag(3, 0.0, 30).unwrap());
        assert!((a_prime_diag(3, 0.0, 30).unwrap() - a_prime_diag(3, 0.0, 40).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn log_derivative_of_zeta() {
        let r = 0.25;
        let geometric: f64 = (1..200).map(|n| 3f64.powf(-2.0 * r * n as f64)).sum();
        assert!((zeta_log_derivative(3, r).unwrap() + 3f64.ln() * geometric).abs() < 1e-12);
        assert!(zeta_log_derivative(3, 0.0).is_err());
        // the dual term decays like q^{−2gr}
        let tail = zeta_log_derivative(3, 0.2).unwrap() + a_prime_diag_natural(3, 0.2).unwrap();
        assert!((ratios_logderiv(3, 0.2, 200).unwrap() - tail).abs() < 1e-12);
    }

    #[test]
    fn ratio_poles() {
        assert!(ratios_r(3, &ShiftPair::real(0.1, 0.1), 2).unwrap().norm().is_finite());
        assert!(ratios_r(3, &ShiftPair::real(0.0, 0.1), 2).is_err());
    }

    #[test]
    fn one_level_terms() {
        let z = TestFunction::from_coeffs(vec![]);
        assert!(ratios_one_level(&z, 3, 2).unwrap().total().is_zero());
        // Φ̂(1) = 1 at g = 2 is coefficient 4
        let mut coeffs = vec![BigRational::zero(); 5];
        coeffs[4] = BigRational::from_integer(1.into());
        let tf = TestFunction::from_coeffs(coeffs);
        let r = ratios_one_level(&tf, 3, 2).unwrap();
        assert_eq!(r.a4, BigRational::new((-1).into(), 4.into()));
    }

    #[test]
    fn ratio_against_ensemble() {
        let f = Field::new(&FieldSpec::prime(3).unwrap()).unwrap();
        let opts = PassOptions::default();
        let exact = exact_ratio_average(&f, 2, 0.1, 0.1, &opts).unwrap();
        assert!((exact - 1.0).abs() < 1e-12);
        let r = ratios_r(3, &ShiftPair::real(0.1, 0.1), 2).unwrap();
        assert!((r.re - exact).abs() <= 10.0 * 3f64.powf(-2.5));
        let tf = TestFunction::fejer(4);
        let cache = accumulate_moments(&f, 2, 3, &opts).unwrap();
        let gap = ratios_one_level(&tf, 3, 2).unwrap().total_f64() - one_level_average(&tf, &cache, 3).unwrap();
        assert!(gap.abs() <= 10.0 * 3f64.powf(-2.5 + 0.2));
    }
}
