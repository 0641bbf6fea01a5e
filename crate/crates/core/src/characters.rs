//! Quadratic residue and Jacobi symbols, the characters χ_D, the additive
//! exponential e(·), generalized Gauss sums and ε(q).

use std::f64::consts::PI;

use num_bigint::{BigInt, BigUint};
use num_complex::Complex64;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{domain, Result};
use crate::fqx::enumerate::{hyperelliptic, monic, primes};
use crate::fqx::factor::{factor, is_perfect_square};
use crate::fqx::{Field, FieldSpec, Fq, Poly};

/// Euler criterion (f/P) ≡ f^{(|P|−1)/2} mod P for P monic irreducible.
pub fn residue_symbol(f: &Poly, p: &Poly, field: &Field) -> Result<i8> {
    if !p.is_monic() || p.deg() == 0 || !p.is_irreducible(field)? {
        return domain("residue symbol needs a monic irreducible modulus");
    }
    let e = (p.norm(field) - 1u32) / 2u32;
    let r = f.pow_mod(&e, p, field)?;
    Ok(if r.is_zero() {
        0
    } else if r.is_one() {
        1
    } else {
        debug_assert_eq!(r, Poly::constant(field.neg(Fq::ONE)));
        -1
    })
}

/// Jacobi symbol (f/Q) for monic Q of positive degree, computed by the
/// Euclidean reciprocity ladder without factoring Q.
pub fn jacobi_symbol(f: &Poly, q_mod: &Poly, field: &Field) -> Result<i8> {
    if !q_mod.is_monic() || q_mod.deg() == 0 {
        return domain("Jacobi symbol needs a monic modulus of positive degree");
    }
    Ok(jacobi_unchecked(f.clone(), q_mod.clone(), field))
}

fn jacobi_unchecked(mut a: Poly, mut b: Poly, field: &Field) -> i8 {
    let half = (field.q() - 1) / 2;
    let mut result = 1i8;
    loop {
        a = a.rem(&b, field).expect("modulus is nonzero");
        if a.is_zero() {
            return 0;
        }
        let c = a.leading();
        if c != Fq::ONE {
            if b.deg() % 2 == 1 {
                result *= field.quad_char(c);
            }
            a = a.monic(field);
        }
        if a.deg() == 0 {
            return result;
        }
        if (half as usize * a.deg() * b.deg()) % 2 == 1 {
            result = -result;
        }
        std::mem::swap(&mut a, &mut b);
    }
}

/// Jacobi symbol through the factorization of Q, as a cross-check.
pub fn jacobi_by_factoring(f: &Poly, q_mod: &Poly, field: &Field) -> Result<i8> {
    if !q_mod.is_monic() || q_mod.deg() == 0 {
        return domain("Jacobi symbol needs a monic modulus of positive degree");
    }
    let mut out = 1i8;
    for (p, e) in factor(q_mod, field)?.factors {
        let s = residue_symbol(f, &p, field)?;
        if e % 2 == 1 {
            out *= s;
        } else if s == 0 {
            out = 0;
        }
    }
    Ok(out)
}

/// χ_D(f) = (D/f) for monic f; χ_D(1) = 1.
pub fn chi_d(d: &Poly, f: &Poly, field: &Field) -> Result<i8> {
    if !f.is_monic() {
        return domain("χ_D is evaluated on monic polynomials");
    }
    if f.deg() == 0 {
        return Ok(1);
    }
    jacobi_symbol(d, f, field)
}

/// Character χ_f(h) = (h/f) of modulus f, the convention under which the
/// Poisson identities hold with Gauss sums mod f.
pub fn chi_mod(f: &Poly, h: &Poly, field: &Field) -> Result<i8> {
    if f.deg() == 0 && f.is_monic() {
        return Ok(1);
    }
    jacobi_symbol(h, f, field)
}

/// e(a) = exp(2πi Tr(a_1)/p) from the 1/x-coefficient a_1.
pub fn additive_e(a1: Fq, field: &Field) -> Complex64 {
    let t = field.trace(a1) as f64 / field.p() as f64;
    Complex64::from_polar(1.0, 2.0 * PI * t)
}

/// Prefactor (−1)^{(q−1)d(f)/2}(1+i)/2 + (1−i)/2: 1 or −i.
fn gauss_prefactor(q: u32, deg: usize) -> Complex64 {
    if ((q as usize - 1) / 2 * deg).is_multiple_of(2) {
        Complex64::new(1.0, 0.0)
    } else {
        Complex64::new(0.0, -1.0)
    }
}

/// Every residue class mod a polynomial of degree n: all polynomials of
/// degree < n, by index.
fn residues(field: &Field, n: usize) -> impl Iterator<Item = Poly> + '_ {
    (0..(field.q() as usize).pow(n as u32)).map(move |i| poly_at(field, n, i))
}

/// G(V, χ_f) = prefactor · Σ_{u mod f} χ_f(u) e(uV/f).
pub fn gauss_sum(v: &Poly, f: &Poly, field: &Field) -> Result<Complex64> {
    if !f.is_monic() || f.deg() == 0 {
        return domain("Gauss sum needs a monic modulus of positive degree");
    }
    let n = f.deg();
    let v = v.rem(f, field)?;
    let mut acc = Complex64::zero();
    for u in residues(field, n) {
        let chi = jacobi_unchecked(u.clone(), f.clone(), field);
        if chi == 0 {
            continue;
        }
        // for monic f, the 1/x-coefficient of (uV mod f)/f is its x^{n−1} coefficient
        let a1 = u.mul(&v, field).rem(f, field)?.coeff(n - 1);
        acc += additive_e(a1, field) * chi as f64;
    }
    Ok(gauss_prefactor(field.q(), n) * acc)
}

/// All Gauss sums G(V, χ_f) for one modulus f, from a single additive
/// Fourier transform of the character table over F_q^{d(f)}.
pub struct GaussTable {
    f: Poly,
    values: Vec<Complex64>,
}

impl GaussTable {
    pub fn new(f: &Poly, field: &Field) -> Result<Self> {
        if !f.is_monic() || f.deg() == 0 {
            return domain("Gauss sum needs a monic modulus of positive degree");
        }
        let n = f.deg();
        let q = field.q() as usize;
        let size = q
            .checked_pow(n as u32)
            .filter(|&s| s <= 1 << 26)
            .ok_or_else(|| crate::error::Error::Domain(format!("Gauss table for degree {n} exceeds the size limit")))?;
        let mut chi = vec![1i8; size];
        for (p, e) in factor(f, field)?.factors {
            let res = residue_indices(&p, n, field)?;
            let table = quadratic_table(&p, field)?;
            for (c, &r) in chi.iter_mut().zip(&res) {
                let s = table[r as usize];
                *c *= if e % 2 == 1 { s } else { s * s };
            }
        }
        let mut values: Vec<Complex64> = chi.iter().map(|&c| Complex64::new(c as f64, 0.0)).collect();
        // e(Tr(a·w)/p) for a, w ∈ F_q
        let kernel: Vec<Complex64> = (0..q)
            .flat_map(|a| (0..q).map(move |w| (a, w)))
            .map(|(a, w)| additive_e(field.mul(Fq(a as u16), Fq(w as u16)), field))
            .collect();
        let mut line = vec![Complex64::zero(); q];
        let mut stride = 1;
        for _ in 0..n {
            for block in (0..size).step_by(stride * q) {
                for off in 0..stride {
                    let base = block + off;
                    for (w, slot) in line.iter_mut().enumerate() {
                        *slot = (0..q).map(|a| values[base + a * stride] * kernel[a * q + w]).sum();
                    }
                    for (w, &v) in line.iter().enumerate() {
                        values[base + w * stride] = v;
                    }
                }
            }
            stride *= q;
        }
        let pre = gauss_prefactor(field.q(), n);
        values.iter_mut().for_each(|v| *v *= pre);
        Ok(GaussTable { f: f.clone(), values })
    }

    /// G(V, χ_f) by lookup: V enters through w_i = [x^{n−1}](x^i V mod f).
    pub fn get(&self, v: &Poly, field: &Field) -> Result<Complex64> {
        let n = self.f.deg();
        let q = field.q() as usize;
        let mut w = v.rem(&self.f, field)?;
        let mut idx = 0usize;
        let mut scale = 1usize;
        for _ in 0..n {
            idx += w.coeff(n - 1).index() * scale;
            scale *= q;
            w = w.mul(&Poly::x(), field).rem(&self.f, field)?;
        }
        Ok(self.values[idx])
    }
}

/// For every u of degree < n (by index), the index of u mod P.
fn residue_indices(p: &Poly, n: usize, field: &Field) -> Result<Vec<u32>> {
    let q = field.q() as usize;
    let d = p.deg();
    let size_p = q.pow(d as u32);
    // step[r·q + c] = index of (x·r + c) mod P
    let mut step = vec![0u32; size_p * q];
    for r in 0..size_p {
        let rp = poly_at(field, d, r);
        let xr = rp.mul(&Poly::x(), field);
        for c in 0..q {
            let v = xr.add(&Poly::constant(Fq(c as u16)), field).rem(p, field)?;
            step[r * q + c] = poly_index(&v, field) as u32;
        }
    }
    let size = q.pow(n as u32);
    let mut out = vec![0u32; size];
    for u in 1..size {
        out[u] = step[out[u / q] as usize * q + u % q];
    }
    Ok(out)
}

/// (r/P) for every residue r mod P, by index.
fn quadratic_table(p: &Poly, field: &Field) -> Result<Vec<i8>> {
    let size = (field.q() as usize).pow(p.deg() as u32);
    (0..size).map(|r| residue_symbol(&poly_at(field, p.deg(), r), p, field)).collect()
}

fn poly_at(field: &Field, n: usize, mut i: usize) -> Poly {
    let q = field.q() as usize;
    let mut c = Vec::with_capacity(n);
    for _ in 0..n {
        c.push(Fq((i % q) as u16));
        i /= q;
    }
    Poly::from_coeffs(c)
}

fn poly_index(f: &Poly, field: &Field) -> usize {
    f.coeffs().iter().rev().fold(0, |acc, c| acc * field.q() as usize + c.index())
}

/// Euler φ(f) = |{u mod f : gcd(u, f) = 1}|.
pub fn euler_phi(f: &Poly, field: &Field) -> Result<BigUint> {
    let mut out = BigUint::one();
    for (p, e) in factor(f, field)?.factors {
        let np = p.norm(field);
        out *= np.pow(e - 1) * (np - 1u32);
    }
    Ok(out)
}

/// τ(q) = Σ_{a ∈ F_q} χ_q(a) e(a) by direct summation.
pub fn tau_direct(field: &Field) -> Complex64 {
    field.elements().map(|a| additive_e(a, field) * field.quad_char(a) as f64).sum()
}

/// τ(q) = (−1)^{k−1} τ(p)^k with τ(p) = √p or i√p.
pub fn tau_hasse_davenport(spec: &FieldSpec) -> Complex64 {
    let p = spec.p();
    let sp = (p as f64).sqrt();
    let tp = if p % 4 == 1 { Complex64::new(sp, 0.0) } else { Complex64::new(0.0, sp) };
    let sign = if spec.k() % 2 == 1 { 1.0 } else { -1.0 };
    tp.powu(spec.k()) * sign
}

fn epsilon_from_tau(q: u32, tau: Complex64) -> Result<i8> {
    let sq = (q as f64).sqrt();
    let e = if q % 4 == 1 { tau / sq } else { Complex64::new(0.0, -1.0) * tau / sq };
    if (e.re - 1.0).abs() < 1e-9 && e.im.abs() < 1e-9 {
        Ok(1)
    } else if (e.re + 1.0).abs() < 1e-9 && e.im.abs() < 1e-9 {
        Ok(-1)
    } else {
        domain(format!("ε(q) is not ±1: {e}"))
    }
}

/// ε(q) ∈ {±1}, by direct summation of τ(q) and by Hasse–Davenport; errors
/// if the two routes disagree.
pub fn epsilon_q(field: &Field) -> Result<i8> {
    let direct = epsilon_from_tau(field.q(), tau_direct(field))?;
    let hd = epsilon_from_tau(field.q(), tau_hasse_davenport(field.spec()))?;
    if direct != hd {
        return domain("ε(q) routes disagree");
    }
    Ok(direct)
}

/// Closed form of G(V, χ_{P^j}) for P monic irreducible, j ≥ 1.
pub fn gauss_sum_closed(v: &Poly, p: &Poly, j: u32, field: &Field) -> Result<Complex64> {
    if j == 0 {
        return domain("gauss_sum_closed needs j >= 1");
    }
    let np = p.norm(field).to_f64().unwrap();
    // V = V_1 P^α with P ∤ V_1; V = 0 behaves as α = ∞
    let (alpha, v1) = if v.is_zero() {
        (u32::MAX, Poly::one())
    } else {
        let (mut a, mut w) = (0, v.clone());
        while p.divides(&w, field)? {
            w = w.div_exact(p, field)?;
            a += 1;
        }
        (a, w)
    };
    let real = |x: f64| Ok(Complex64::new(x, 0.0));
    if j <= alpha {
        if j % 2 == 1 {
            return real(0.0);
        }
        return real(np.powi(j as i32 - 1) * (np - 1.0));
    }
    if j >= alpha.saturating_add(2) {
        return real(0.0);
    }
    if j.is_multiple_of(2) {
        return real(-np.powi(j as i32 - 1));
    }
    let chi = residue_symbol(&v1, p, field)? as f64;
    let mag = np.powf(j as f64 - 0.5);
    if p.deg().is_multiple_of(2) {
        real(chi * mag)
    } else {
        real(epsilon_q(field)? as f64 * chi * mag)
    }
}

/// Both sides of the ensemble character-sum identity for Σ_{D ∈ H_{2g+1}} χ_D(f).
pub fn verify_lemma31(f: &Poly, g: usize, field: &Field) -> Result<(BigInt, BigInt)> {
    if !f.is_monic() {
        return domain("character-sum identity needs monic f");
    }
    let mut lhs = BigInt::zero();
    for d in hyperelliptic(field, 2 * g + 1) {
        lhs += chi_d(&d, f, field)?;
    }
    // C runs over monic polynomials built from the primes of f; only d(C) ≤ g matters
    let primes_of_f: Vec<Poly> =
        if f.deg() == 0 { Vec::new() } else { factor(f, field)?.factors.into_iter().map(|(p, _)| p).collect() };
    let mut c_degree_counts = vec![0u64; g + 1];
    smooth_degree_counts(&primes_of_f, 0, 0, &mut c_degree_counts);
    let mut rhs = BigInt::zero();
    for (dc, &count) in c_degree_counts.iter().enumerate() {
        if count == 0 {
            continue;
        }
        let first = symbol_sum_over_monic(f, 2 * g + 1 - 2 * dc, field)?;
        let second = if 2 * dc < 2 * g { symbol_sum_over_monic(f, 2 * g - 1 - 2 * dc, field)? } else { 0 };
        rhs += BigInt::from(count) * (BigInt::from(first) - BigInt::from(field.q()) * second);
    }
    if ((field.q() as usize - 1) / 2 * f.deg()) % 2 == 1 {
        rhs = -rhs;
    }
    Ok((lhs, rhs))
}

/// counts[d] += number of monic C of degree d supported on `ps`.
fn smooth_degree_counts(ps: &[Poly], idx: usize, deg: usize, counts: &mut [u64]) {
    if idx == ps.len() {
        counts[deg] += 1;
        return;
    }
    let step = ps[idx].deg();
    let mut d = deg;
    while d < counts.len() {
        smooth_degree_counts(ps, idx + 1, d, counts);
        d += step;
    }
}

/// Σ_{h ∈ ℳ_m} (f/h): the character χ_f read like χ_D, which differs from
/// (h/f) by (−1)^{(q−1)d(f)m/2}.
pub fn symbol_sum_over_monic(f: &Poly, m: usize, field: &Field) -> Result<i64> {
    let mut s = 0i64;
    for h in monic(field, m) {
        s += chi_d(f, &h, field)? as i64;
    }
    Ok(s)
}

/// Σ_{h ∈ ℳ_m} χ_f(h) = Σ (h/f) as an exact integer.
pub fn char_sum_over_monic(f: &Poly, m: usize, field: &Field) -> Result<i64> {
    let mut s = 0i64;
    for h in monic(field, m) {
        s += chi_mod(f, &h, field)? as i64;
    }
    Ok(s)
}

/// Result of the Poisson-summation check.
#[derive(Clone, Debug)]
pub struct PoissonCheck {
    pub direct: i64,
    pub poisson: Complex64,
    /// The prime-modulus specialization, when f is irreducible.
    pub prime_form: Option<f64>,
}

/// Σ_{h ∈ ℳ_m} χ_f(h) directly and through the dual sum over V of Gauss sums.
pub fn verify_poisson(f: &Poly, m: usize, field: &Field) -> Result<PoissonCheck> {
    if !f.is_monic() || f.deg() == 0 {
        return domain("Poisson formula needs monic f of positive degree");
    }
    let n = f.deg();
    if m >= n {
        return domain("Poisson formula needs m < d(f)");
    }
    let q = field.q() as f64;
    let nf = q.powi(n as i32);
    let direct = char_sum_over_monic(f, m, field)?;
    let table = GaussTable::new(f, field)?;
    let sum_g = |deg: usize| -> Result<Complex64> {
        let mut s = Complex64::zero();
        for v in monic(field, deg) {
            s += table.get(&v, field)?;
        }
        Ok(s)
    };
    let top = sum_g(n - m - 1)?;
    let poisson = if n.is_multiple_of(2) {
        let mut low = Complex64::zero();
        for deg in 0..=(n - m).saturating_sub(2) {
            if deg + 2 <= n - m {
                low += sum_g(deg)?;
            }
        }
        (table.get(&Poly::zero(), field)? + low * (q - 1.0) - top) * (q.powi(m as i32) / nf)
    } else {
        top * (epsilon_q(field)? as f64 * q.powf(m as f64 + 0.5) / nf)
    };
    let prime_form = if f.is_irreducible(field)? {
        let chi_sum = |deg: usize| -> Result<f64> {
            let mut s = 0i64;
            for v in monic(field, deg) {
                s += residue_symbol(&v, f, field)? as i64;
            }
            Ok(s as f64)
        };
        let top = chi_sum(n - m - 1)?;
        Some(if n.is_multiple_of(2) {
            let mut low = 0.0;
            for deg in 0..=(n - m).saturating_sub(2) {
                if deg + 2 <= n - m {
                    low += chi_sum(deg)?;
                }
            }
            q.powi(m as i32) / nf.sqrt() * ((q - 1.0) * low - top)
        } else {
            q.powf(m as f64 + 0.5) / nf.sqrt() * top
        })
    } else {
        None
    };
    Ok(PoissonCheck { direct, poisson, prime_form })
}

/// Largest |Σ_{h ∈ ℳ_m} χ_f(h)| / |f|^{1/2} over non-square monic f of
/// degree ≤ `max_deg` and m < d(f).
pub fn polya_vinogradov_ratio(field: &Field, max_deg: usize) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for n in 1..=max_deg {
        let nf = (field.q() as f64).powf(n as f64 / 2.0);
        for f in monic(field, n) {
            if is_perfect_square(&f, field)? {
                continue;
            }
            for m in 0..n {
                worst = worst.max(char_sum_over_monic(&f, m, field)?.abs() as f64 / nf);
            }
        }
    }
    Ok(worst)
}

/// Largest |Σ_{P ∈ 𝒫_n} χ_V(P)| / ((d(V)/n) q^{n/2}) over non-square monic V
/// of degree 1..=`max_deg_v` and 1 ≤ n ≤ `max_n`.
pub fn weil_ratio(field: &Field, max_deg_v: usize, max_n: usize) -> Result<f64> {
    let prime_lists: Vec<Vec<Poly>> = (1..=max_n).map(|n| primes(field, n).collect()).collect();
    let mut worst: f64 = 0.0;
    for dv in 1..=max_deg_v {
        for v in monic(field, dv) {
            if is_perfect_square(&v, field)? {
                continue;
            }
            for (i, ps) in prime_lists.iter().enumerate() {
                let n = i + 1;
                let mut s = 0i64;
                for p in ps {
                    s += jacobi_unchecked(v.clone(), p.clone(), field) as i64;
                }
                let scale = dv as f64 / n as f64 * (field.q() as f64).powf(n as f64 / 2.0);
                worst = worst.max(s.abs() as f64 / scale);
            }
        }
    }
    Ok(worst)
}

/// Number of D ∈ H_{2g+1} coprime to P, by enumeration.
pub fn coprime_count_direct(p: &Poly, g: usize, field: &Field) -> Result<BigInt> {
    let mut n = BigInt::zero();
    for d in hyperelliptic(field, 2 * g + 1) {
        if d.gcd(p, field)?.is_one() {
            n += 1;
        }
    }
    Ok(n)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn field(s: &str) -> Field {
        Field::new(&s.parse::<FieldSpec>().unwrap()).unwrap()
    }

    fn p(f: &Field, c: &[i64]) -> Poly {
        Poly::from_ints(f, c)
    }

    #[test]
    fn residue_symbol_examples() {
        let f = field("3");
        let x = Poly::x();
        assert_eq!(residue_symbol(&p(&f, &[1, 1]), &x, &f).unwrap(), 1);
        assert_eq!(residue_symbol(&p(&f, &[2, 1]), &x, &f).unwrap(), -1);
        assert_eq!(residue_symbol(&x, &x, &f).unwrap(), 0);
        assert!(residue_symbol(&x, &p(&f, &[2, 0, 1]), &f).is_err());
    }

    #[test]
    fn jacobi_examples() {
        let f = field("3");
        let x = Poly::x();
        let x1 = p(&f, &[1, 1]);
        assert_eq!(jacobi_symbol(&x, &x1, &f).unwrap(), -1);
        assert_eq!(jacobi_symbol(&x1, &x, &f).unwrap(), 1);
        assert_eq!(jacobi_symbol(&p(&f, &[0, 1, 1]), &x1, &f).unwrap(), 0);
        assert!(jacobi_symbol(&x, &Poly::one(), &f).is_err());
    }

    #[test]
    fn jacobi_ladder_matches_factoring() {
        for s in ["3", "5"] {
            let f = field(s);
            let max_q = if s == "3" { 4 } else { 3 };
            let mut fs: Vec<Poly> = vec![Poly::zero()];
            for n in 0..=max_q {
                for a in monic(&f, n) {
                    fs.push(a.scale(f.from_int(2), &f));
                    fs.push(a);
                }
            }
            for n in 1..=max_q {
                for qm in monic(&f, n) {
                    for a in &fs {
                        assert_eq!(
                            jacobi_symbol(a, &qm, &f).unwrap(),
                            jacobi_by_factoring(a, &qm, &f).unwrap(),
                            "q={s} a={} Q={}",
                            a.display(&f),
                            qm.display(&f)
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn chi_d_examples() {
        let f = field("3");
        let d = p(&f, &[1, 2, 0, 1]);
        let x = Poly::x();
        let x1 = p(&f, &[1, 1]);
        assert_eq!(chi_d(&d, &x, &f).unwrap(), 1);
        assert_eq!(chi_d(&d, &x.mul(&x1, &f), &f).unwrap(), chi_d(&d, &x, &f).unwrap() * chi_d(&d, &x1, &f).unwrap());
        assert_eq!(chi_d(&d, &Poly::one(), &f).unwrap(), 1);
        assert_eq!(chi_d(&x, &x, &f).unwrap(), 0);
    }

    #[test]
    fn additive_character() {
        let f = field("3");
        assert!((additive_e(Fq::ZERO, &f) - Complex64::new(1.0, 0.0)).norm() < 1e-15);
        let w = Complex64::from_polar(1.0, 2.0 * PI / 3.0);
        assert!((additive_e(Fq::ONE, &f) - w).norm() < 1e-15);
        let f9 = field("3^2:1,0,1");
        assert!((additive_e(f9.t(), &f9) - Complex64::new(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn gauss_sum_examples() {
        let f = field("3");
        let x = Poly::x();
        assert!(gauss_sum(&Poly::zero(), &x, &f).unwrap().norm() < 1e-12);
        let g = gauss_sum(&Poly::one(), &x, &f).unwrap();
        assert!((g - Complex64::new(3f64.sqrt(), 0.0)).norm() < 1e-12, "{g}");
        let x3 = x.pow(3, &f);
        assert!(gauss_sum(&Poly::one(), &x3, &f).unwrap().norm() < 1e-9);
    }

    #[test]
    fn table_matches_direct_sums() {
        for s in ["3", "5", "9"] {
            let f = field(s);
            for m in [p(&f, &[1, 0, 1]), Poly::x().pow(2, &f), p(&f, &[0, 1, 1]), p(&f, &[1, 2, 0, 1])] {
                let t = GaussTable::new(&m, &f).unwrap();
                for n in 0..=2 {
                    for v in monic(&f, n) {
                        let v = v.scale(f.from_int(2), &f);
                        let d = gauss_sum(&v, &m, &f).unwrap();
                        assert!((t.get(&v, &f).unwrap() - d).norm() < 1e-9, "q={s}");
                    }
                }
                assert!((t.get(&Poly::zero(), &f).unwrap() - gauss_sum(&Poly::zero(), &m, &f).unwrap()).norm() < 1e-9);
            }
        }
    }

    #[test]
    fn closed_form_examples() {
        let f = field("3");
        let x = Poly::x();
        let x2 = x.pow(2, &f);
        assert!((gauss_sum_closed(&x2, &x, 2, &f).unwrap().re - 6.0).abs() < 1e-12);
        assert!((gauss_sum_closed(&x, &x, 2, &f).unwrap().re + 3.0).abs() < 1e-12);
        assert!((gauss_sum_closed(&Poly::one(), &x, 1, &f).unwrap().re - 3f64.sqrt()).abs() < 1e-12);
        assert_eq!(euler_phi(&x2, &f).unwrap(), BigUint::from(6u32));
    }

    #[test]
    fn epsilon_values() {
        assert_eq!(epsilon_q(&field("3")).unwrap(), 1);
        assert_eq!(epsilon_q(&field("5")).unwrap(), 1);
        assert_eq!(epsilon_q(&field("7")).unwrap(), 1);
        assert_eq!(epsilon_q(&field("9")).unwrap(), 1);
        assert_eq!(epsilon_q(&field("25")).unwrap(), -1);
        assert_eq!(epsilon_q(&field("27")).unwrap(), -1);
    }

    #[test]
    fn lemma31_small_cases() {
        let f = field("3");
        let (l, r) = verify_lemma31(&Poly::one(), 1, &f).unwrap();
        assert_eq!(l, BigInt::from(18));
        assert_eq!(r, BigInt::from(18));
        let (l, r) = verify_lemma31(&Poly::x(), 1, &f).unwrap();
        assert_eq!(l, r);
        let (l, r) = verify_lemma31(&Poly::x().pow(2, &f), 1, &f).unwrap();
        assert_eq!((l.clone(), r), (BigInt::from(14), BigInt::from(14)));
    }

    #[test]
    fn poisson_small_cases() {
        let f = field("3");
        for (poly, m) in [(p(&f, &[1, 0, 1]), 1), (Poly::x(), 0), (p(&f, &[1, 2, 0, 1]), 2)] {
            let c = verify_poisson(&poly, m, &f).unwrap();
            assert!((c.poisson - Complex64::new(c.direct as f64, 0.0)).norm() < 1e-9, "{c:?}");
            if let Some(pf) = c.prime_form {
                assert!((pf - c.direct as f64).abs() < 1e-9, "{c:?}");
            }
        }
        assert!(verify_poisson(&Poly::x(), 1, &f).is_err());
    }
}
