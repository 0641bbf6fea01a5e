//! L-polynomials ℒ(u, χ_D) = Σ c_n u^n of the hyperelliptic ensemble, their
//! zeros, power sums, central values and exact zero multiplicities.

use std::f64::consts::PI;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::characters::chi_d;
use crate::error::{domain, Error, Result};
use crate::fqx::enumerate::{monic, primes};
use crate::fqx::{Field, Poly};
use crate::qpoly::{gcd_with_derivative_degree_modp, QPoly};

/// Root-finder iteration cap.
pub const MAX_ITER: usize = 200;
/// Root-finder step tolerance (on the unit circle after rescaling).
pub const STEP_TOL: f64 = 1e-13;

/// ℒ(u, χ_D) as its integer coefficient vector c_0..c_{2g}.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LPolynomial {
    pub discriminant: Poly,
    pub q: u32,
    pub g: usize,
    pub coeffs: Vec<i128>,
}

fn overflow() -> Error {
    Error::Domain("L-coefficient exceeds 128-bit range".into())
}

fn q_pow(q: u32, n: usize) -> Result<i128> {
    (q as i128).checked_pow(n as u32).ok_or_else(overflow)
}

/// Checks D ∈ H_{2g+1} and returns g.
pub fn genus_of(d: &Poly, field: &Field) -> Result<usize> {
    if !d.is_monic() || d.deg().is_multiple_of(2) || !d.is_squarefree(field)? {
        return domain("D must be monic, square-free and of odd degree");
    }
    Ok((d.deg() - 1) / 2)
}

/// c_{2g−n} = q^{g−n} c_n fills the upper half from c_0..c_g.
fn complete_by_symmetry(low: &[i128], q: u32, g: usize) -> Result<Vec<i128>> {
    let mut c = vec![0i128; 2 * g + 1];
    c[..=g].copy_from_slice(&low[..=g]);
    for n in 0..g {
        c[2 * g - n] = q_pow(q, g - n)?.checked_mul(c[n]).ok_or_else(overflow)?;
    }
    Ok(c)
}

/// c_n = Σ_{f ∈ ℳ_n} χ_D(f) summed for n ≤ g, the rest by the functional
/// equation.
pub fn l_coefficients(d: &Poly, field: &Field) -> Result<LPolynomial> {
    let g = genus_of(d, field)?;
    let low = (0..=g).map(|n| char_sum(d, n, field)).collect::<Result<Vec<_>>>()?;
    Ok(LPolynomial { discriminant: d.clone(), q: field.q(), g, coeffs: complete_by_symmetry(&low, field.q(), g)? })
}

/// Every c_n by direct summation, for validating the symmetric fill.
pub fn l_coefficients_full(d: &Poly, field: &Field) -> Result<LPolynomial> {
    let g = genus_of(d, field)?;
    let coeffs = (0..=2 * g).map(|n| char_sum(d, n, field)).collect::<Result<Vec<_>>>()?;
    Ok(LPolynomial { discriminant: d.clone(), q: field.q(), g, coeffs })
}

fn char_sum(d: &Poly, n: usize, field: &Field) -> Result<i128> {
    let mut s = 0i128;
    for f in monic(field, n) {
        s += chi_d(d, &f, field)? as i128;
    }
    Ok(s)
}

/// Newton's identities n c_n = Σ_{k=1}^{n} ψ(k) c_{n−k} for n ≤ g, then the
/// functional equation. `psi[k−1]` holds ψ_D(k); at least g values needed.
pub fn l_from_psi(d: &Poly, psi: &[i128], q: u32, g: usize) -> Result<LPolynomial> {
    if psi.len() < g {
        return domain("need ψ_D(n) for every n ≤ g");
    }
    let mut low = vec![0i128; g + 1];
    low[0] = 1;
    for n in 1..=g {
        let mut s = 0i128;
        for k in 1..=n {
            s = s.checked_add(psi[k - 1].checked_mul(low[n - k]).ok_or_else(overflow)?).ok_or_else(overflow)?;
        }
        if s % n as i128 != 0 {
            return domain("power sums are inconsistent with an integer L-polynomial");
        }
        low[n] = s / n as i128;
    }
    Ok(LPolynomial { discriminant: d.clone(), q, g, coeffs: complete_by_symmetry(&low, q, g)? })
}

/// ψ_D(1..=N) from the coefficients by Newton's identities,
/// ψ(n) = n c_n − Σ_{k<n} ψ(k) c_{n−k} with c_n = 0 beyond 2g.
pub fn psi_from_l(l: &LPolynomial, n_max: usize) -> Result<Vec<i128>> {
    let c = |n: usize| l.coeffs.get(n).copied().unwrap_or(0);
    let mut psi = Vec::with_capacity(n_max);
    for n in 1..=n_max {
        let mut s = (n as i128).checked_mul(c(n)).ok_or_else(overflow)?;
        for k in 1..n {
            s = s.checked_sub(psi[k - 1] * c(n - k)).ok_or_else(overflow)?;
        }
        psi.push(s);
    }
    Ok(psi)
}

/// ψ_D(n) = Σ_{r·d(P) = n} d(P) χ_D(P)^r for n = 1..=N, by enumerating primes.
pub fn psi_power_sums(d: &Poly, n_max: usize, field: &Field) -> Result<Vec<i128>> {
    genus_of(d, field)?;
    // s[e] = Σ_{P ∈ 𝒫_e} χ_D(P), t[e] = #{P ∈ 𝒫_e : P ∤ D}
    let mut s = vec![0i128; n_max + 1];
    let mut t = vec![0i128; n_max + 1];
    for e in 1..=n_max {
        for p in primes(field, e) {
            let c = chi_d(d, &p, field)? as i128;
            s[e] += c;
            t[e] += c * c;
        }
    }
    Ok(psi_from_prime_sums(&s, &t, n_max))
}

/// Assembles ψ(1..=N) from per-degree sums s[e] = Σ χ(P) and t[e] = Σ χ(P)².
pub fn psi_from_prime_sums(s: &[i128], t: &[i128], n_max: usize) -> Vec<i128> {
    (1..=n_max)
        .map(|n| {
            crate::fqx::arith::divisors(n as u64)
                .into_iter()
                .map(|e| {
                    let (e, r) = (e as usize, n / e as usize);
                    e as i128 * if r % 2 == 1 { s[e] } else { t[e] }
                })
                .sum()
        })
        .collect()
}

impl LPolynomial {
    /// ℒ(u) at a complex point.
    pub fn eval(&self, u: Complex64) -> Complex64 {
        self.coeffs.iter().rev().fold(Complex64::zero(), |acc, &c| acc * u + c as f64)
    }

    /// ℒ(u) and ℒ′(u) at a complex point.
    pub fn eval_with_derivative(&self, u: Complex64) -> (Complex64, Complex64) {
        let mut p = Complex64::zero();
        let mut dp = Complex64::zero();
        for &c in self.coeffs.iter().rev() {
            dp = dp * u + p;
            p = p * u + c as f64;
        }
        (p, dp)
    }

    /// L(s, χ_D) at real s via u = q^{−s}.
    pub fn eval_s(&self, s: f64) -> f64 {
        self.eval(Complex64::new((self.q as f64).powf(-s), 0.0)).re
    }

    /// L′/L(s) = −log q · u ℒ′(u)/ℒ(u) at u = q^{−s}, natural-log units.
    pub fn log_derivative(&self, s: f64) -> f64 {
        let u = Complex64::new((self.q as f64).powf(-s), 0.0);
        let (p, dp) = self.eval_with_derivative(u);
        -(self.q as f64).ln() * (u * dp / p).re
    }

    fn qpoly(&self) -> QPoly {
        QPoly::from_ints(&self.coeffs)
    }
}

/// Zeros u_j = q^{−1/2} e^{2πiθ_j}, angles ascending in [0, 1).
#[derive(Clone, Debug, PartialEq)]
pub struct ZeroSet {
    pub angles: Vec<f64>,
    /// |u_j|√q − 1 for each zero, in the order of `angles`.
    pub residuals: Vec<f64>,
}

impl ZeroSet {
    pub fn max_residual(&self) -> f64 {
        self.residuals.iter().fold(0.0, |m, r| m.max(r.abs()))
    }

    /// −q^{n/2} Σ_j e(nθ_j), which equals ψ_D(n).
    pub fn power_sum(&self, q: u32, n: i64) -> f64 {
        let s: f64 = self.angles.iter().map(|t| (2.0 * PI * n as f64 * t).cos()).sum();
        -(q as f64).powf(n as f64 / 2.0) * s
    }
}

/// Square-free factors of ℒ over Q with multiplicities; a single factor of
/// multiplicity one when the modular screen already proves ℒ square-free.
fn squarefree_parts(l: &LPolynomial) -> Vec<(QPoly, usize)> {
    if l.g == 0 {
        return Vec::new();
    }
    if gcd_with_derivative_degree_modp(&l.coeffs) == 0 {
        return vec![(l.qpoly(), 1)];
    }
    l.qpoly().squarefree_decomposition()
}

/// Aberth–Ehrlich on a polynomial with simple roots, all on |z| = 1.
fn aberth(coeffs: &[f64]) -> Result<Vec<Complex64>> {
    let n = coeffs.len() - 1;
    let eval = |z: Complex64| {
        let mut p = Complex64::zero();
        let mut dp = Complex64::zero();
        for &c in coeffs.iter().rev() {
            dp = dp * z + p;
            p = p * z + c;
        }
        (p, dp)
    };
    // irrational phase offset keeps the start away from symmetric roots
    let offset = 0.5 * (5f64.sqrt() - 1.0);
    let mut z: Vec<Complex64> =
        (0..n).map(|k| Complex64::from_polar(1.0, 2.0 * PI * (k as f64 + offset) / n as f64)).collect();
    let mut worst = f64::INFINITY;
    for _ in 0..MAX_ITER {
        worst = 0.0;
        for k in 0..n {
            let (p, dp) = eval(z[k]);
            if p.norm() == 0.0 {
                continue;
            }
            let w = p / dp;
            let s: Complex64 = (0..n).filter(|&j| j != k).map(|j| (z[k] - z[j]).inv()).sum();
            let step = w / (Complex64::one() - w * s);
            z[k] -= step;
            worst = worst.max(step.norm());
        }
        if worst < STEP_TOL {
            // Newton polish
            for zk in z.iter_mut() {
                let (p, dp) = eval(*zk);
                if dp.norm() > 0.0 {
                    *zk -= p / dp;
                }
            }
            return Ok(z);
        }
    }
    Err(Error::NonConvergence { iterations: MAX_ITER, worst })
}

/// All 2g zeros with multiplicity, found on the exact square-free factors.
pub fn compute_zeros(l: &LPolynomial) -> Result<ZeroSet> {
    let sq = (l.q as f64).sqrt();
    let mut roots = Vec::with_capacity(2 * l.g);
    for (factor, mult) in squarefree_parts(l) {
        // rescale u = z/√q so the roots lie on the unit circle
        let c: Vec<f64> = factor.to_f64().iter().enumerate().map(|(i, &a)| a * sq.powi(-(i as i32))).collect();
        let lead = *c.last().unwrap();
        let c: Vec<f64> = c.iter().map(|a| a / lead).collect();
        for z in aberth(&c)? {
            for _ in 0..mult {
                roots.push(z);
            }
        }
    }
    let mut pairs: Vec<(f64, f64)> = roots
        .iter()
        .map(|z| {
            let mut t = z.arg() / (2.0 * PI);
            if t < 0.0 {
                t += 1.0;
            }
            if t >= 1.0 - 1e-12 {
                t = 0.0;
            }
            (t, z.norm() - 1.0)
        })
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    Ok(ZeroSet { angles: pairs.iter().map(|p| p.0).collect(), residuals: pairs.iter().map(|p| p.1).collect() })
}

/// L(1/2, χ_D) = A + B√q exactly.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CentralValue {
    pub a: BigRational,
    pub b: BigRational,
    pub vanishing: bool,
}

impl CentralValue {
    pub fn to_f64(&self, q: u32) -> f64 {
        use num_traits::ToPrimitive;
        self.a.to_f64().unwrap() + self.b.to_f64().unwrap() * (q as f64).sqrt()
    }
}

/// Integer square root of q when q is a perfect square.
pub fn sqrt_q(q: u32) -> Option<u32> {
    let s = (q as f64).sqrt().round() as u32;
    (s * s == q).then_some(s)
}

/// Exact central value with A = Σ_{n even} c_n q^{−n/2} and
/// B = Σ_{n odd} c_n q^{−(n+1)/2}.
pub fn central_value(l: &LPolynomial) -> CentralValue {
    let (an, bn) = central_numerators(l);
    let den = BigInt::from(l.q).pow(l.g as u32);
    let a = BigRational::new(an.clone(), den.clone());
    let b = BigRational::new(bn.clone(), den);
    CentralValue { a, b, vanishing: central_vanishes(&an, &bn, l.q) }
}

/// (A·q^g, B·q^g) as integers.
pub fn central_numerators(l: &LPolynomial) -> (BigInt, BigInt) {
    let mut an = BigInt::zero();
    let mut bn = BigInt::zero();
    for (n, &c) in l.coeffs.iter().enumerate() {
        if n % 2 == 0 {
            an += BigInt::from(c) * BigInt::from(l.q).pow((l.g - n / 2) as u32);
        } else {
            bn += BigInt::from(c) * BigInt::from(l.q).pow((l.g - n.div_ceil(2)) as u32);
        }
    }
    (an, bn)
}

pub(crate) fn central_vanishes(an: &BigInt, bn: &BigInt, q: u32) -> bool {
    match sqrt_q(q) {
        None => an.is_zero() && bn.is_zero(),
        Some(s) => (an + bn * BigInt::from(s)).is_zero(),
    }
}

/// Multiplicities of the distinct zeros, descending; they sum to 2g.
pub fn multiplicity_profile(l: &LPolynomial) -> Vec<usize> {
    let mut out = Vec::new();
    for (f, m) in squarefree_parts(l) {
        out.extend(std::iter::repeat_n(m, f.deg()));
    }
    out.sort_unstable_by(|a, b| b.cmp(a));
    out
}

/// Number of simple zeros, exactly.
pub fn simple_zero_count(l: &LPolynomial) -> usize {
    squarefree_parts(l).iter().filter(|(_, m)| *m == 1).map(|(f, _)| f.deg()).sum()
}

/// Order of vanishing of ℒ at u = q^{−1/2}, by exact repeated division by
/// the minimal polynomial (qu² − 1, or su − 1 when q = s²).
pub fn order_at_centre(l: &LPolynomial) -> usize {
    if l.g == 0 {
        return 0;
    }
    let m = match sqrt_q(l.q) {
        None => QPoly::from_ints(&[-1, 0, l.q as i128]),
        Some(s) => QPoly::from_ints(&[-1, s as i128]),
    };
    let mut f = l.qpoly();
    let mut k = 0;
    while let Some(next) = f.div_exact(&m) {
        f = next;
        k += 1;
    }
    k
}

/// Both sides of the approximate functional equation at s = 1/2 + α.
pub fn afe_evaluate(l: &LPolynomial, alpha: f64) -> Result<(f64, f64)> {
    if alpha.abs() >= 0.25 {
        return domain("approximate functional equation needs |α| < 1/4");
    }
    let q = l.q as f64;
    let lhs = l.eval_s(0.5 + alpha);
    let first: f64 = (0..=l.g).map(|n| l.coeffs[n] as f64 * q.powf(-(n as f64) * (0.5 + alpha))).sum();
    let second: f64 = (0..l.g).map(|n| l.coeffs[n] as f64 * q.powf(-(n as f64) * (0.5 - alpha))).sum();
    let x = q.powf(-2.0 * l.g as f64 * alpha);
    Ok((lhs, first + x * second))
}
