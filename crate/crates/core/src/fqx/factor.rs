//! Factorization over F_q: square-free decomposition, distinct-degree and
//! equal-degree splitting, and the functions Λ and μ built on it.

use num_bigint::BigUint;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{domain, Result};
use crate::fqx::field::{Field, Fq};
use crate::fqx::poly::Poly;

/// Fixed seed of the equal-degree splitting step.
const EDF_SEED: u64 = 0x5eed;

/// f = unit · Π P_i^{e_i}, with the P_i monic irreducible and sorted.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Factorization {
    pub unit: Fq,
    pub factors: Vec<(Poly, u32)>,
}

impl Factorization {
    /// Rebuilds the factored polynomial.
    pub fn expand(&self, field: &Field) -> Poly {
        self.factors.iter().fold(Poly::constant(self.unit), |acc, (p, e)| acc.mul(&p.pow(*e, field), field))
    }
}

/// a^{1/p} in F_q, i.e. a^{q/p}.
fn fq_pth_root(a: Fq, field: &Field) -> Fq {
    field.pow(a, (field.q() / field.p()) as u64)
}

/// The p-th root of a polynomial whose derivative vanishes.
fn pth_root(f: &Poly, field: &Field) -> Poly {
    let p = field.p() as usize;
    Poly::from_coeffs(f.coeffs().iter().step_by(p).map(|&c| fq_pth_root(c, field)).collect())
}

/// Square-free decomposition of a monic polynomial: pairs (s_i, i) with
/// f = Π s_i^i and every s_i square-free (pairwise coprime).
pub fn squarefree_decomposition(f: &Poly, field: &Field) -> Result<Vec<(Poly, u32)>> {
    if f.is_zero() {
        return domain("square-free decomposition of zero");
    }
    let f = f.monic(field);
    let mut out = Vec::new();
    if f.deg() == 0 {
        return Ok(out);
    }
    let d = f.derivative(field);
    let mut c = if d.is_zero() { f.clone() } else { f.gcd(&d, field)? };
    let mut w = f.div_exact(&c, field)?;
    let mut i = 1;
    while !w.is_one() {
        let y = w.gcd(&c, field)?;
        let fac = w.div_exact(&y, field)?;
        if !fac.is_one() {
            out.push((fac, i));
        }
        w = y;
        c = c.div_exact(&w, field)?;
        i += 1;
    }
    if !c.is_one() {
        let p = field.p();
        for (s, m) in squarefree_decomposition(&pth_root(&c, field), field)? {
            out.push((s, m * p));
        }
    }
    Ok(out)
}

/// Distinct-degree factorization of a monic square-free polynomial: pairs
/// (g_d, d) where g_d is the product of all irreducible factors of degree d.
pub fn distinct_degree(f: &Poly, field: &Field) -> Result<Vec<(Poly, usize)>> {
    let q = BigUint::from(field.q());
    let mut out = Vec::new();
    let mut rest = f.monic(field);
    let mut h = Poly::x().rem(&rest, field)?;
    let mut d = 1;
    while rest.deg() >= 2 * d {
        h = h.pow_mod(&q, &rest, field)?;
        let g = rest.gcd(&h.sub(&Poly::x(), field), field)?;
        if !g.is_one() {
            rest = rest.div_exact(&g, field)?;
            h = h.rem(&rest, field)?;
            out.push((g, d));
        }
        d += 1;
    }
    if rest.deg() > 0 {
        let n = rest.deg();
        out.push((rest, n));
    }
    Ok(out)
}

/// Splits a monic product of distinct degree-d irreducibles (q odd).
pub fn equal_degree(f: &Poly, d: usize, field: &Field) -> Result<Vec<Poly>> {
    let mut rng = ChaCha8Rng::seed_from_u64(EDF_SEED);
    let mut out = Vec::new();
    edf_rec(f.monic(field), d, field, &mut rng, &mut out)?;
    out.sort();
    Ok(out)
}

fn edf_rec(f: Poly, d: usize, field: &Field, rng: &mut ChaCha8Rng, out: &mut Vec<Poly>) -> Result<()> {
    let n = f.deg();
    if n == d {
        out.push(f);
        return Ok(());
    }
    let e = (BigUint::from(field.q()).pow(d as u32) - 1u32) / 2u32;
    loop {
        let a = Poly::from_coeffs((0..n).map(|_| Fq(rng.gen_range(0..field.q()) as u16)).collect());
        if a.is_constant() {
            continue;
        }
        let mut h = f.gcd(&a, field)?;
        if h.is_one() {
            let b = a.pow_mod(&e, &f, field)?.sub(&Poly::one(), field);
            if b.is_zero() {
                continue;
            }
            h = f.gcd(&b, field)?;
        }
        if h.deg() > 0 && h.deg() < n {
            let other = f.div_exact(&h, field)?;
            edf_rec(h, d, field, rng, out)?;
            return edf_rec(other, d, field, rng, out);
        }
    }
}

/// Complete factorization into monic irreducibles with multiplicities.
pub fn factor(f: &Poly, field: &Field) -> Result<Factorization> {
    if f.is_zero() {
        return domain("factorization of the zero polynomial");
    }
    let unit = f.leading();
    let mut factors = Vec::new();
    for (s, m) in squarefree_decomposition(f, field)? {
        for (g, d) in distinct_degree(&s, field)? {
            for p in equal_degree(&g, d, field)? {
                factors.push((p, m));
            }
        }
    }
    factors.sort();
    Ok(Factorization { unit, factors })
}

/// Λ(f) = d(P) if f = c·P^k with P irreducible, else 0.
pub fn von_mangoldt(f: &Poly, field: &Field) -> Result<u32> {
    let fac = factor(f, field)?;
    Ok(match fac.factors.as_slice() {
        [(p, _)] => p.deg() as u32,
        _ => 0,
    })
}

/// μ(f) = (−1)^{#prime factors} if f is square-free, else 0.
pub fn mobius_poly(f: &Poly, field: &Field) -> Result<i32> {
    let fac = factor(f, field)?;
    if fac.factors.iter().any(|(_, e)| *e > 1) {
        return Ok(0);
    }
    Ok(if fac.factors.len() % 2 == 0 { 1 } else { -1 })
}

/// Whether a monic polynomial is a perfect square in F_q[x].
pub fn is_perfect_square(f: &Poly, field: &Field) -> Result<bool> {
    if !f.is_monic() {
        return domain("perfect-square test needs a monic polynomial");
    }
    Ok(squarefree_decomposition(f, field)?.iter().all(|(_, m)| m % 2 == 0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fqx::enumerate::monic;
    use crate::fqx::field::FieldSpec;

    fn field(s: &str) -> Field {
        Field::new(&s.parse::<FieldSpec>().unwrap()).unwrap()
    }

    #[test]
    fn von_mangoldt_examples() {
        let f = field("3");
        assert_eq!(von_mangoldt(&Poly::from_ints(&f, &[0, 0, 1]), &f).unwrap(), 1);
        assert_eq!(von_mangoldt(&Poly::from_ints(&f, &[0, 1, 1]), &f).unwrap(), 0);
        assert_eq!(von_mangoldt(&Poly::from_ints(&f, &[4, 2]), &f).unwrap(), 1);
        assert_eq!(von_mangoldt(&Poly::one(), &f).unwrap(), 0);
        assert!(von_mangoldt(&Poly::zero(), &f).is_err());
    }

    #[test]
    fn p_th_powers_factor() {
        let f = field("3");
        let fac = factor(&Poly::from_ints(&f, &[1, 0, 0, 1]), &f).unwrap();
        assert_eq!(fac.factors, vec![(Poly::from_ints(&f, &[1, 1]), 3)]);
    }

    #[test]
    fn factorizations_expand_back() {
        for s in ["3", "5", "9"] {
            let f = field(s);
            let max = if s == "3" { 5 } else { 3 };
            for n in 1..=max {
                for p in monic(&f, n) {
                    let fac = factor(&p, &f).unwrap();
                    assert_eq!(fac.expand(&f), p);
                    for (g, _) in &fac.factors {
                        assert!(g.is_irreducible(&f).unwrap());
                    }
                }
            }
        }
    }

    #[test]
    fn perfect_squares() {
        let f = field("3");
        assert!(is_perfect_square(&Poly::one(), &f).unwrap());
        assert!(is_perfect_square(&Poly::from_ints(&f, &[1, 2, 1]), &f).unwrap());
        assert!(!is_perfect_square(&Poly::from_ints(&f, &[1, 0, 0, 1]), &f).unwrap());
        assert!(is_perfect_square(&Poly::from_ints(&f, &[1, 0, 0, 2, 0, 0, 1]), &f).unwrap());
    }

    #[test]
    fn mobius_on_polynomials() {
        let f = field("3");
        assert_eq!(mobius_poly(&Poly::one(), &f).unwrap(), 1);
        assert_eq!(mobius_poly(&Poly::x(), &f).unwrap(), -1);
        assert_eq!(mobius_poly(&Poly::from_ints(&f, &[0, 1, 1]), &f).unwrap(), 1);
        assert_eq!(mobius_poly(&Poly::from_ints(&f, &[0, 0, 1]), &f).unwrap(), 0);
    }
}
