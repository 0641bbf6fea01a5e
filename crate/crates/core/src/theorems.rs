//! Closed-form right-hand sides of the 1-level density and pair-correlation
//! theorems, the Katz–Sarnak limit integrals and the corollary constants.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{domain, Result};
use crate::fqx::arith::{divisors, lambda_square_sum, pi_q};
use crate::fqx::enumerate::primes;
use crate::fqx::Field;
use crate::testfn::TestFunction;

/// Choice of truncation parameters K and K′ and the out-of-window override.
#[derive(Clone, Copy, Debug, Default)]
pub struct ThmParams {
    pub k: Option<usize>,
    pub k_prime: Option<usize>,
    pub force: bool,
}

/// A named exact term.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Term {
    pub name: String,
    pub value: BigRational,
}

fn rat(n: impl Into<BigInt>) -> BigRational {
    BigRational::from_integer(n.into())
}

fn frac(a: impl Into<BigInt>, b: impl Into<BigInt>) -> BigRational {
    BigRational::new(a.into(), b.into())
}

fn qpow(q: u32, n: usize) -> BigRational {
    rat(BigInt::from(q).pow(n as u32))
}

fn sum_terms<'a>(it: impl Iterator<Item = &'a BigRational>) -> BigRational {
    it.fold(BigRational::zero(), |a, b| a + b)
}

/// Σ_{P^r, d(P^r) = n} d(P)^e / (|P|^r (|P|+1)), grouped by m = d(P).
fn prime_weight(q: u32, n: usize, e: u32) -> Result<BigRational> {
    let mut s = BigRational::zero();
    for m in divisors(n as u64) {
        let m = m as usize;
        let count = rat(BigInt::from(pi_q(q, m as u64)?));
        s += count * rat(BigInt::from(m).pow(e)) / (qpow(q, n) * (qpow(q, m) + BigRational::one()));
    }
    Ok(s)
}

/// Σ_{P^r, d(P^r) = n} d(P)² / (|P|^{2r−2} (|P|+1)²).
fn prime_weight_c2(q: u32, n: usize) -> Result<BigRational> {
    let mut s = BigRational::zero();
    for m in divisors(n as u64) {
        let m = m as usize;
        let count = rat(BigInt::from(pi_q(q, m as u64)?));
        let den = qpow(q, 2 * n - 2 * m) * (qpow(q, m) + BigRational::one()).pow(2);
        s += count * rat(BigInt::from(m * m)) / den;
    }
    Ok(s)
}

/// c(Φ,g) = (1/g) Σ_{n≤N/2} Φ̂(n/g) Σ_{P^r ∈ ℳ_n} d(P)/(|P|^r(|P|+1)).
pub fn c_phi(tf: &TestFunction, q: u32, g: usize) -> Result<BigRational> {
    if g == 0 {
        return domain("c(Φ,g) needs g >= 1");
    }
    let mut s = BigRational::zero();
    for n in 1..=tf.support() / 2 {
        let phi = tf.at_over_g(n);
        if !phi.is_zero() {
            s += phi * prime_weight(q, n, 1)?;
        }
    }
    Ok(s / rat(g))
}

/// c(Φ,g) by summing over explicitly enumerated prime powers.
pub fn c_phi_brute(tf: &TestFunction, field: &Field, g: usize) -> Result<BigRational> {
    if g == 0 {
        return domain("c(Φ,g) needs g >= 1");
    }
    let mut s = BigRational::zero();
    for m in 1..=tf.support() / 2 {
        for p in primes(field, m) {
            let norm = rat(BigInt::from(p.norm(field)));
            let mut r = 1;
            while m * r <= tf.support() / 2 {
                s += tf.at_over_g(m * r) * rat(p.deg()) / (norm.pow(r as i32) * (&norm + BigRational::one()));
                r += 1;
            }
        }
    }
    Ok(s / rat(g))
}

/// Right-hand side of the 1-level density formula, term by term.
#[derive(Clone, Debug)]
pub struct Thm1Report {
    pub q: u32,
    pub g: usize,
    pub support: usize,
    pub k: usize,
    pub k_prime: usize,
    /// Set when N lies outside every admissible window and `force` was given.
    pub forced: bool,
    pub main: BigRational,
    pub oscillatory: BigRational,
    pub c_term: BigRational,
    /// (k, −𝟙_{(2k+1)|g} Φ̂(1/(2k+1)) q^{−4kg/(2k+1)} / (g(q−1))); k = 0 holds
    /// −Φ̂(1)/(g(q−1)) in the 2g ≤ N < 4g range.
    pub secondary: Vec<(usize, BigRational)>,
    /// (k, (1/g) Σ Φ̂(n/g) q^{−4kn}) over (g+1)/(2k+1) ≤ n ≤ min(N/2, (g−1)/2k).
    pub tails: Vec<(usize, BigRational)>,
    /// Size of the O-terms.
    pub error_scale: f64,
}

impl Thm1Report {
    /// Main, oscillatory and c(Φ,g) terms only.
    pub fn principal(&self) -> BigRational {
        &self.main + &self.oscillatory + &self.c_term
    }

    pub fn secondary_total(&self) -> BigRational {
        sum_terms(self.secondary.iter().map(|(_, v)| v)) + sum_terms(self.tails.iter().map(|(_, v)| v))
    }

    pub fn total(&self) -> BigRational {
        self.principal() + self.secondary_total()
    }

    pub fn terms(&self) -> Vec<Term> {
        let mut out = vec![
            Term { name: "main".into(), value: self.main.clone() },
            Term { name: "oscillatory".into(), value: self.oscillatory.clone() },
            Term { name: "c".into(), value: self.c_term.clone() },
        ];
        out.extend(self.secondary.iter().map(|(k, v)| Term { name: format!("secondary_k{k}"), value: v.clone() }));
        out.extend(self.tails.iter().map(|(k, v)| Term { name: format!("tail_k{k}"), value: v.clone() }));
        out
    }
}

fn thm1_window(g: usize, n: usize) -> Option<usize> {
    if 2 * g <= n && n < 4 * g {
        return Some(0);
    }
    (1..=g.max(1)).find(|&k| 2 * g <= n * (2 * k + 1) && n * (2 * k - 1) < 2 * g)
}

fn thm1_in_window(g: usize, n: usize, k: usize) -> bool {
    if k == 0 {
        2 * g <= n && n < 4 * g
    } else {
        2 * g <= n * (2 * k + 1) && n * (2 * k - 1) < 2 * g
    }
}

/// Evaluates every term of the 1-level density formula exactly.
pub fn thm1_rhs(tf: &TestFunction, q: u32, g: usize, params: &ThmParams) -> Result<Thm1Report> {
    if g == 0 {
        return domain("the 1-level density formula needs g >= 1");
    }
    let n = tf.support();
    let detected = thm1_window(g, n);
    let k = match params.k.or(detected) {
        Some(k) => k,
        None if params.force => {
            if n >= 2 * g {
                0
            } else if n == 0 {
                g
            } else {
                (2 * g).div_ceil(n).saturating_sub(1).div_ceil(2).max(1)
            }
        }
        None => {
            return domain(format!(
                "N = {n} is outside every admissible window for g = {g}: need 2g/(2K+1) <= N <= (2g-1)/(2K-1) for some K >= 1, or 2g <= N < 4g"
            ))
        }
    };
    let in_window = thm1_in_window(g, n, k);
    if !in_window && !params.force {
        return domain(format!(
            "N = {n} is outside the K = {k} window for g = {g}: need 2g/(2K+1) <= N <= (2g-1)/(2K-1), or 2g <= N < 4g for K = 0"
        ));
    }
    let k_prime = params.k_prime.unwrap_or(g.max(k));
    if k > 0 && (k_prime < k || k_prime > g) && !params.force {
        return domain(format!("K' = {k_prime} must satisfy K <= K' <= g"));
    }
    let gq = rat(g);
    let qm1 = rat(q - 1);
    let main = tf.coeff(0);
    let osc_limit = if k == 0 { g } else { n / 2 };
    let oscillatory = -sum_terms((1..=osc_limit).map(|m| tf.at_over_g(m)).collect::<Vec<_>>().iter()) / &gq;
    let c_term = c_phi(tf, q, g)?;
    let mut secondary = Vec::new();
    let mut tails = Vec::new();
    let qf = q as f64;
    let gf = g as f64;
    let error_scale = if k == 0 {
        secondary.push((0, -tf.at_over_g(g) / (&gq * &qm1)));
        qf.powf(n as f64 / 2.0 - 2.0 * gf - 0.5)
    } else {
        for kk in k..=k_prime {
            let d = 2 * kk + 1;
            let v = if g.is_multiple_of(d) {
                // Φ̂(1/(2k+1)) = Φ̂(n/2g) at n = 2g/(2k+1)
                -tf.coeff(2 * g / d) / (qpow(q, 4 * kk * g / d) * &gq * &qm1)
            } else {
                BigRational::zero()
            };
            secondary.push((kk, v));
            let lo = (g + 1).div_ceil(d);
            let hi = (n / 2).min((g - 1) / (2 * kk));
            let mut t = BigRational::zero();
            for m in lo..=hi {
                t += tf.at_over_g(m) / qpow(q, 4 * kk * m);
            }
            tails.push((kk, t / &gq));
        }
        let a = (n as f64 / 2.0).min((gf - 1.0) / (2.0 * k as f64));
        qf.powf(a - 2.0 * gf - 0.5) / k as f64 + qf.powf((gf - 1.0) / (k_prime as f64 + 1.0) - 2.0 * gf) / gf
    };
    Ok(Thm1Report {
        q,
        g,
        support: n,
        k,
        k_prime,
        forced: !in_window,
        main,
        oscillatory,
        c_term,
        secondary,
        tails,
        error_scale,
    })
}

/// Right-hand side of the pair-correlation formula, term by term.
#[derive(Clone, Debug)]
pub struct Thm2Report {
    pub q: u32,
    pub g: usize,
    pub support: usize,
    pub k: usize,
    pub k_prime: usize,
    pub forced: bool,
    pub main: BigRational,
    /// (1/2g²) Σ_{n≤N} Φ̂(n/2g) n Σ_{d|n} (α(d)/d) q^{n/d−n}
    pub lambda_diag: BigRational,
    /// (1/2g²) Σ_{n≤N/2} Φ̂(n/g)
    pub square_term: BigRational,
    pub c1: BigRational,
    pub c2: BigRational,
    pub c3: BigRational,
    pub c4: BigRational,
    /// (k, 𝟙_{(k+1)|g} (k+1) Φ̂(1/(2k+2)) q^{−2kg/(k+1)} / (2g²(q−1))); k = 0
    /// holds Φ̂(1/2)/(2g²(q−1)) in the g ≤ N < 2g range.
    pub secondary: Vec<(usize, BigRational)>,
    /// (k, −((k+1)/2g²) Σ_{(g+1)/(k+1)≤n≤N} Φ̂(n/2g) q^{−2kn}); k = 0 holds
    /// −(1/2g²) Σ_{g+1≤n≤N} Φ̂(n/2g).
    pub tails: Vec<(usize, BigRational)>,
    pub error_scale: f64,
}

impl Thm2Report {
    pub fn principal(&self) -> BigRational {
        &self.main + &self.lambda_diag + &self.square_term + &self.c1 + &self.c2 + &self.c3 + &self.c4
    }

    pub fn secondary_total(&self) -> BigRational {
        sum_terms(self.secondary.iter().map(|(_, v)| v)) + sum_terms(self.tails.iter().map(|(_, v)| v))
    }

    pub fn total(&self) -> BigRational {
        self.principal() + self.secondary_total()
    }

    pub fn terms(&self) -> Vec<Term> {
        let mut out: Vec<Term> = [
            ("main", &self.main),
            ("lambda_diag", &self.lambda_diag),
            ("square", &self.square_term),
            ("c1", &self.c1),
            ("c2", &self.c2),
            ("c3", &self.c3),
            ("c4", &self.c4),
        ]
        .into_iter()
        .map(|(n, v)| Term { name: n.into(), value: v.clone() })
        .collect();
        out.extend(self.secondary.iter().map(|(k, v)| Term { name: format!("secondary_k{k}"), value: v.clone() }));
        out.extend(self.tails.iter().map(|(k, v)| Term { name: format!("tail_k{k}"), value: v.clone() }));
        out
    }
}

fn thm2_in_window(g: usize, n: usize, k: usize) -> bool {
    if k == 0 {
        g <= n && n < 2 * g
    } else {
        g <= n * (k + 1) && n * k < g
    }
}

/// Evaluates every term of the pair-correlation formula exactly.
pub fn thm2_rhs(tf: &TestFunction, q: u32, g: usize, params: &ThmParams) -> Result<Thm2Report> {
    if g == 0 {
        return domain("the pair-correlation formula needs g >= 1");
    }
    let n = tf.support();
    let detected = (0..g.max(1)).find(|&k| thm2_in_window(g, n, k));
    let k = match params.k.or(detected) {
        Some(k) => k,
        None if params.force => {
            if n >= g {
                0
            } else if n == 0 {
                g - 1
            } else {
                (g.div_ceil(n).saturating_sub(1)).clamp(1, g.saturating_sub(1).max(1))
            }
        }
        None => {
            return domain(format!(
                "N = {n} is outside every admissible window for g = {g}: need g/(K+1) <= N <= (g-1)/K for some K >= 1, or g <= N < 2g"
            ))
        }
    };
    let in_window = thm2_in_window(g, n, k);
    if !in_window && !params.force {
        return domain(format!(
            "N = {n} is outside the K = {k} window for g = {g}: need g/(K+1) <= N <= (g-1)/K, or g <= N < 2g for K = 0"
        ));
    }
    let k_prime = params.k_prime.unwrap_or((g - 1).max(k));
    if k > 0 && (k_prime < k || k_prime >= g) && !params.force {
        return domain(format!("K' = {k_prime} must satisfy K <= K' < g"));
    }
    let two_g2 = rat(2 * g * g);
    let qm1 = rat(q - 1);
    let mut lambda_diag = BigRational::zero();
    let mut c1 = BigRational::zero();
    for m in 1..=n {
        let phi = tf.coeff(m);
        if phi.is_zero() {
            continue;
        }
        lambda_diag += &phi * rat(lambda_square_sum(q, m as u64)?) / qpow(q, m);
        c1 -= &phi * prime_weight(q, m, 2)?;
    }
    let mut square_term = BigRational::zero();
    let mut c2 = BigRational::zero();
    let mut c3 = BigRational::zero();
    let mut c4 = BigRational::zero();
    for m in 1..=n / 2 {
        let phi = tf.at_over_g(m);
        if phi.is_zero() {
            continue;
        }
        let w = prime_weight(q, m, 1)?;
        square_term += &phi;
        c2 -= &phi * prime_weight_c2(q, m)?;
        c3 -= &phi * &w * rat(2);
        c4 += &phi * &w * &w;
    }
    let mut secondary = Vec::new();
    let mut tails = Vec::new();
    let (qf, gf, nf) = (q as f64, g as f64, n as f64);
    let error_scale = if k == 0 {
        secondary.push((0, tf.coeff(g) / (&two_g2 * &qm1)));
        let t = sum_terms((g + 1..=n).map(|m| tf.coeff(m)).collect::<Vec<_>>().iter());
        tails.push((0, -t / &two_g2));
        qf.powf(-gf / 2.0 - 0.5) / (gf * gf) + qf.powf(nf - 2.0 * gf - 1.0) + qf.powf(nf - 2.0 * gf) / (gf * gf)
    } else {
        for kk in k..=k_prime {
            let d = kk + 1;
            let v = if g.is_multiple_of(d) {
                // Φ̂(1/(2k+2)) = Φ̂(n/2g) at n = g/(k+1)
                rat(d) * tf.coeff(g / d) / (qpow(q, 2 * kk * g / d) * &two_g2 * &qm1)
            } else {
                BigRational::zero()
            };
            secondary.push((kk, v));
            let mut t = BigRational::zero();
            for m in (g + 1).div_ceil(d)..=n {
                t += tf.coeff(m) / qpow(q, 2 * kk * m);
            }
            tails.push((kk, -rat(d) * t / &two_g2));
        }
        let kf = k as f64;
        let kpf = k_prime as f64;
        qf.powf(3.0 * gf / (2.0 * (kf + 1.0)) - 2.0 * gf - 1.0) / (gf * gf)
            + (1.0 + kpf.ln()) * qf.powf(nf - 2.0 * gf - 1.0)
            + kpf * qf.powf(2.0 * (gf - 1.0) / (kpf + 1.0) - 2.0 * gf - 1.0) / (gf * gf)
    };
    Ok(Thm2Report {
        q,
        g,
        support: n,
        k,
        k_prime,
        forced: !in_window,
        main: tf.coeff(0),
        lambda_diag: lambda_diag / &two_g2,
        square_term: square_term / &two_g2,
        c1: c1 / &two_g2,
        c2: c2 / &two_g2,
        c3: c3 / &two_g2,
        c4: c4 / &two_g2,
        secondary,
        tails,
        error_scale,
    })
}

/// An even function on ℝ, linear between knots on [0, X] and zero beyond X.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PiecewiseLinear {
    knots: Vec<(BigRational, BigRational)>,
}

impl PiecewiseLinear {
    /// Knots (x, y) with x strictly increasing from 0.
    pub fn new(knots: Vec<(BigRational, BigRational)>) -> Result<Self> {
        if knots.first().is_none_or(|(x, _)| !x.is_zero()) || knots.windows(2).any(|w| w[0].0 >= w[1].0) {
            return domain("knots must start at 0 and increase strictly");
        }
        Ok(PiecewiseLinear { knots })
    }

    /// Φ̂(y) = (1/2)(1 − |y|/2) on [−2, 2], the transform of (sin 2πx/2πx)².
    pub fn sinc_squared_wide() -> Self {
        Self::new(vec![(rat(0), frac(1, 2)), (rat(2), rat(0))]).unwrap()
    }

    /// Φ̂(y) = 1 − |y| on [−1, 1], the transform of (sin πx/πx)².
    pub fn fejer() -> Self {
        Self::new(vec![(rat(0), rat(1)), (rat(1), rat(0))]).unwrap()
    }

    pub fn at_zero(&self) -> BigRational {
        self.knots[0].1.clone()
    }

    pub fn eval(&self, y: f64) -> f64 {
        let y = y.abs();
        for w in self.knots.windows(2) {
            let (x0, y0) = (w[0].0.to_f64().unwrap(), w[0].1.to_f64().unwrap());
            let (x1, y1) = (w[1].0.to_f64().unwrap(), w[1].1.to_f64().unwrap());
            if y <= x1 {
                return y0 + (y1 - y0) * (y - x0) / (x1 - x0);
            }
        }
        0.0
    }

    /// ∫_0^a y^e f(y) dy for e ∈ {0, 1}.
    pub fn moment(&self, a: &BigRational, e: u32) -> BigRational {
        let mut s = BigRational::zero();
        for w in self.knots.windows(2) {
            let (x0, y0) = (&w[0].0, &w[0].1);
            let (x1, y1) = (&w[1].0, &w[1].1);
            if x0 >= a {
                break;
            }
            let b = if x1 < a { x1 } else { a };
            let slope = (y1 - y0) / (x1 - x0);
            let l = b - x0;
            let l2 = &l * &l;
            s += match e {
                0 => y0 * &l + &slope * &l2 / rat(2),
                _ => x0 * y0 * &l + (y0 + &slope * x0) * &l2 / rat(2) + &slope * &l2 * &l / rat(3),
            };
        }
        s
    }

    /// Φ(0) = ∫_ℝ Φ̂.
    pub fn phi_at_zero(&self) -> BigRational {
        let end = self.knots.last().unwrap().0.clone();
        self.moment(&end, 0) * rat(2)
    }
}

/// Φ̂(0) − (1/2)∫_{−1}^{1} Φ̂ exactly.
pub fn katz_sarnak_exact(f: &PiecewiseLinear) -> BigRational {
    f.at_zero() - f.moment(&rat(1), 0)
}

/// Φ̂(0) + ∫_{−1}^{1} |y| Φ̂(y) dy exactly.
pub fn pair_corr_limit_exact(f: &PiecewiseLinear) -> BigRational {
    f.at_zero() + f.moment(&rat(1), 1) * rat(2)
}

/// Lower bound 1 − (1/2Φ(0)) ∫ Φ̂ Ŵ_Sp for the nonvanishing proportion.
pub fn nonvanishing_bound(f: &PiecewiseLinear) -> BigRational {
    BigRational::one() - katz_sarnak_exact(f) / (f.phi_at_zero() * rat(2))
}

/// Lower bound 2 − (1/Φ(0)) ∫ Φ̂ (δ_0 + η|y|) for the simple-zero proportion.
pub fn simple_zero_bound(f: &PiecewiseLinear) -> BigRational {
    rat(2) - pair_corr_limit_exact(f) / f.phi_at_zero()
}

#[allow(clippy::too_many_arguments)]
fn simpson_step(
    f: &dyn Fn(f64) -> f64,
    a: f64,
    fa: f64,
    b: f64,
    fb: f64,
    m: f64,
    fm: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let (flm, frm) = (f(lm), f(rm));
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        return left + right + delta / 15.0;
    }
    simpson_step(f, a, fa, m, fm, lm, flm, left, tol / 2.0, depth - 1)
        + simpson_step(f, m, fm, b, fb, rm, frm, right, tol / 2.0, depth - 1)
}

/// Adaptive Simpson quadrature of f over [a, b].
pub fn integrate(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    let m = 0.5 * (a + b);
    let (fa, fb, fm) = (f(a), f(b), f(m));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    simpson_step(f, a, fa, b, fb, m, fm, whole, tol, 50)
}

/// Composite Simpson rule with `n` (even) panels.
pub fn simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let n = n + n % 2;
    let h = (b - a) / n as f64;
    let mut s = f(a) + f(b);
    for i in 1..n {
        s += if i % 2 == 1 { 4.0 } else { 2.0 } * f(a + i as f64 * h);
    }
    s * h / 3.0
}

/// Quadrature tolerance for the limit integrals.
pub const QUAD_TOL: f64 = 1e-10;

/// Φ̂(0) − (1/2)∫_{−1}^{1} Φ̂ for an even Φ̂.
pub fn katz_sarnak_density(hat: &dyn Fn(f64) -> f64) -> f64 {
    hat(0.0) - integrate(hat, 0.0, 1.0, QUAD_TOL)
}

/// Φ̂(0) + 2∫_0^1 y Φ̂(y) dy for an even Φ̂.
pub fn pair_corr_limit(hat: &dyn Fn(f64) -> f64) -> f64 {
    hat(0.0) + 2.0 * integrate(&|y| y * hat(y), 0.0, 1.0, QUAD_TOL)
}

/// The optimal nonvanishing and simple-zero constants and the checks on h0.
#[derive(Clone, Debug)]
pub struct CorollaryConstants {
    /// (19 − cot(1/4))/16
    pub p0_bound: f64,
    /// 3/2 − cot(1/√2)/√2
    pub simple_bound: f64,
    /// (cot(1/4) − 3)/8
    pub inf_integral: f64,
    /// ⟨1, h0⟩ over [−1, 1] by quadrature.
    pub h0_mass: f64,
    /// |1/⟨1, h0⟩ − (cot(1/4) − 3)/8|
    pub h0_mass_gap: f64,
    /// max over y ∈ [0,1] of |h0(y) − (1/2)∫_0^1 h0 − (1/2)∫_0^{1−y} h0 − 1|
    pub h0_residual: f64,
}

/// h0(y) = sin(|y|/2 − (π+1)/4) / (√2 sin(1/4) − cos((π+1)/4)).
pub fn h0(y: f64) -> f64 {
    let c = (std::f64::consts::PI + 1.0) / 4.0;
    (y.abs() / 2.0 - c).sin() / (2f64.sqrt() * 0.25f64.sin() - c.cos())
}

pub fn corollary_constants() -> CorollaryConstants {
    let cot = |x: f64| x.cos() / x.sin();
    let inf_integral = (cot(0.25) - 3.0) / 8.0;
    let h0_mass = 2.0 * integrate(&h0, 0.0, 1.0, 1e-13);
    let full = integrate(&h0, 0.0, 1.0, 1e-13);
    let mut h0_residual: f64 = 0.0;
    for i in 0..=200 {
        let y = i as f64 / 200.0;
        let partial = if y < 1.0 { integrate(&h0, 0.0, 1.0 - y, 1e-13) } else { 0.0 };
        h0_residual = h0_residual.max((h0(y) - 0.5 * full - 0.5 * partial - 1.0).abs());
    }
    CorollaryConstants {
        p0_bound: (19.0 - cot(0.25)) / 16.0,
        simple_bound: 1.5 - cot(1.0 / 2f64.sqrt()) / 2f64.sqrt(),
        inf_integral,
        h0_mass,
        h0_mass_gap: (1.0 / h0_mass - inf_integral).abs(),
        h0_residual,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fqx::FieldSpec;

    fn f3() -> Field {
        Field::new(&FieldSpec::prime(3).unwrap()).unwrap()
    }

    #[test]
    fn zero_function_gives_zero_terms() {
        let z = TestFunction::from_coeffs(vec![BigRational::zero(); 1]);
        let p = ThmParams { force: true, ..ThmParams::default() };
        assert!(thm1_rhs(&z, 3, 3, &p).unwrap().total().is_zero());
        assert!(thm2_rhs(&z, 3, 3, &p).unwrap().total().is_zero());
    }

    #[test]
    fn single_term_c() {
        // only n = 1: Φ̂(1/g)·π_3(1)·1/(3·4)/g
        let tf = TestFunction::from_coeffs(vec![rat(1), rat(0), rat(1)]);
        assert_eq!(c_phi(&tf, 3, 2).unwrap(), frac(3, 12) / rat(2));
    }

    #[test]
    fn c_matches_brute_force() {
        let f = f3();
        for m in 1..=9 {
            let tf = TestFunction::fejer(m);
            for g in 1..=4 {
                assert_eq!(c_phi(&tf, 3, g).unwrap(), c_phi_brute(&tf, &f, g).unwrap());
            }
        }
    }

    #[test]
    fn secondary_gate() {
        let tf = TestFunction::fejer(6);
        let r = thm1_rhs(&tf, 3, 3, &ThmParams::default()).unwrap();
        assert_eq!(r.k, 1);
        // −Φ̂(1/3) q^{−4} / (3(q−1)), Φ̂(1/3) = coefficient 2 = 4/6
        assert_eq!(r.secondary[0], (1, -frac(4, 6) / rat(81 * 3 * 2)));
        let tf = TestFunction::fejer(8);
        let r = thm1_rhs(&tf, 3, 4, &ThmParams::default()).unwrap();
        assert!(r.secondary[0].1.is_zero());
    }

    #[test]
    fn windows_are_enforced() {
        // N = 29 ≥ 4g
        let tf = TestFunction::fejer(30);
        assert!(thm1_rhs(&tf, 3, 6, &ThmParams::default()).is_err());
        let forced = thm1_rhs(&tf, 3, 6, &ThmParams { force: true, ..ThmParams::default() }).unwrap();
        assert!(forced.forced);
        assert_eq!(thm2_rhs(&TestFunction::fejer(3), 3, 4, &ThmParams::default()).unwrap().k, 1);
        assert_eq!(thm2_rhs(&TestFunction::fejer(5), 3, 4, &ThmParams::default()).unwrap().k, 0);
    }

    #[test]
    fn lambda_diag_at_four() {
        let mut c = vec![rat(0); 5];
        c[4] = rat(1);
        let tf = TestFunction::from_coeffs(c);
        let r = thm2_rhs(&tf, 3, 4, &ThmParams { force: true, ..ThmParams::default() }).unwrap();
        assert_eq!(r.lambda_diag, frac(303, 81) / rat(32));
    }

    #[test]
    fn thm2_signs() {
        let tf = TestFunction::fejer(4);
        let r = thm2_rhs(&tf, 3, 6, &ThmParams::default()).unwrap();
        assert!(r.c2 <= BigRational::zero() && r.c3 <= BigRational::zero() && r.c4 >= BigRational::zero());
    }

    #[test]
    fn fourier_pairs() {
        let six = PiecewiseLinear::sinc_squared_wide();
        assert_eq!(katz_sarnak_exact(&six), frac(1, 8));
        assert_eq!(six.phi_at_zero(), rat(1));
        assert_eq!(nonvanishing_bound(&six), frac(15, 16));
        let fej = PiecewiseLinear::fejer();
        assert_eq!(pair_corr_limit_exact(&fej), frac(4, 3));
        assert_eq!(simple_zero_bound(&fej), frac(2, 3));
        assert!((katz_sarnak_density(&|y| six.eval(y)) - 0.125).abs() < 1e-10);
        assert!((pair_corr_limit(&|y| fej.eval(y)) - 4.0 / 3.0).abs() < 1e-10);
        let outside =
            PiecewiseLinear::new(vec![(rat(0), rat(0)), (rat(1), rat(0)), (rat(2), rat(1)), (rat(3), rat(0))]).unwrap();
        assert_eq!(katz_sarnak_exact(&outside), rat(0));
    }

    #[test]
    fn constants() {
        let c = corollary_constants();
        assert!((c.p0_bound - 0.94273).abs() < 5e-5);
        assert!((c.simple_bound - 0.67252).abs() < 5e-5);
        assert!((c.inf_integral - 0.114540).abs() < 1e-5);
        assert!(c.h0_mass_gap < 1e-9, "{c:?}");
        assert!(c.h0_residual < 1e-8, "{c:?}");
    }
}
