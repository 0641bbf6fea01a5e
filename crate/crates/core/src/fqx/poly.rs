//! Dense polynomials over F_q, little-endian coefficient vectors.

use num_bigint::BigUint;

use crate::error::{domain, Result};
use crate::fqx::field::{Field, Fq};

/// A polynomial over F_q. The coefficient vector never ends in a zero; the
/// zero polynomial is the empty vector.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Poly {
    coeffs: Vec<Fq>,
}

impl Poly {
    pub fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Poly { coeffs: vec![Fq::ONE] }
    }

    pub fn x() -> Self {
        Poly { coeffs: vec![Fq::ZERO, Fq::ONE] }
    }

    pub fn constant(c: Fq) -> Self {
        Self::from_coeffs(vec![c])
    }

    /// c·x^n
    pub fn monomial(c: Fq, n: usize) -> Self {
        let mut coeffs = vec![Fq::ZERO; n + 1];
        coeffs[n] = c;
        Self::from_coeffs(coeffs)
    }

    pub fn from_coeffs(mut coeffs: Vec<Fq>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    /// Coefficients taken from the prime subfield, constant term first.
    pub fn from_ints(field: &Field, ints: &[i64]) -> Self {
        Self::from_coeffs(ints.iter().map(|&n| field.from_int(n)).collect())
    }

    pub fn coeffs(&self) -> &[Fq] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> Fq {
        self.coeffs.get(i).copied().unwrap_or(Fq::ZERO)
    }

    /// d(f); `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// d(f), with the zero polynomial mapped to 0.
    pub fn deg(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.coeffs == [Fq::ONE]
    }

    /// Zero or a nonzero constant.
    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    pub fn leading(&self) -> Fq {
        self.coeffs.last().copied().unwrap_or(Fq::ZERO)
    }

    pub fn is_monic(&self) -> bool {
        self.leading() == Fq::ONE
    }

    /// |f| = q^{d(f)} as an exact integer (0 for the zero polynomial).
    pub fn norm(&self, field: &Field) -> BigUint {
        if self.is_zero() {
            return BigUint::from(0u32);
        }
        BigUint::from(field.q()).pow(self.deg() as u32)
    }

    pub fn add(&self, other: &Poly, field: &Field) -> Poly {
        let n = self.coeffs.len().max(other.coeffs.len());
        Poly::from_coeffs((0..n).map(|i| field.add(self.coeff(i), other.coeff(i))).collect())
    }

    pub fn sub(&self, other: &Poly, field: &Field) -> Poly {
        let n = self.coeffs.len().max(other.coeffs.len());
        Poly::from_coeffs((0..n).map(|i| field.sub(self.coeff(i), other.coeff(i))).collect())
    }

    pub fn neg(&self, field: &Field) -> Poly {
        Poly { coeffs: self.coeffs.iter().map(|&c| field.neg(c)).collect() }
    }

    pub fn scale(&self, c: Fq, field: &Field) -> Poly {
        Poly::from_coeffs(self.coeffs.iter().map(|&a| field.mul(a, c)).collect())
    }

    pub fn mul(&self, other: &Poly, field: &Field) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![Fq::ZERO; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, &b) in other.coeffs.iter().enumerate() {
                out[i + j] = field.add(out[i + j], field.mul(a, b));
            }
        }
        Poly::from_coeffs(out)
    }

    pub fn pow(&self, mut e: u32, field: &Field) -> Poly {
        let (mut base, mut acc) = (self.clone(), Poly::one());
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base, field);
            }
            base = base.mul(&base, field);
            e >>= 1;
        }
        acc
    }

    /// Euclidean division: `self = quot·divisor + rem` with d(rem) < d(divisor).
    pub fn divrem(&self, divisor: &Poly, field: &Field) -> Result<(Poly, Poly)> {
        if divisor.is_zero() {
            return domain("polynomial division by zero");
        }
        let dd = divisor.deg();
        if self.coeffs.len() <= dd {
            return Ok((Poly::zero(), self.clone()));
        }
        let lead_inv = field.inv_nz(divisor.leading());
        let mut rem = self.coeffs.clone();
        let mut quot = vec![Fq::ZERO; rem.len() - dd];
        for i in (dd..rem.len()).rev() {
            let c = field.mul(rem[i], lead_inv);
            if c.is_zero() {
                continue;
            }
            quot[i - dd] = c;
            for (j, &b) in divisor.coeffs.iter().enumerate() {
                let pos = i - dd + j;
                rem[pos] = field.sub(rem[pos], field.mul(c, b));
            }
        }
        rem.truncate(dd);
        Ok((Poly::from_coeffs(quot), Poly::from_coeffs(rem)))
    }

    pub fn rem(&self, divisor: &Poly, field: &Field) -> Result<Poly> {
        Ok(self.divrem(divisor, field)?.1)
    }

    /// Exact quotient; errors if the division leaves a remainder.
    pub fn div_exact(&self, divisor: &Poly, field: &Field) -> Result<Poly> {
        let (q, r) = self.divrem(divisor, field)?;
        if !r.is_zero() {
            return domain("polynomial division is not exact");
        }
        Ok(q)
    }

    pub fn divides(&self, other: &Poly, field: &Field) -> Result<bool> {
        Ok(other.rem(self, field)?.is_zero())
    }

    /// Scales to leading coefficient one; zero stays zero.
    pub fn monic(&self, field: &Field) -> Poly {
        if self.is_zero() {
            return Poly::zero();
        }
        self.scale(field.inv_nz(self.leading()), field)
    }

    /// Monic greatest common divisor.
    pub fn gcd(&self, other: &Poly, field: &Field) -> Result<Poly> {
        if self.is_zero() && other.is_zero() {
            return domain("gcd(0, 0) is undefined");
        }
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let r = a.rem(&b, field)?;
            a = b;
            b = r;
        }
        Ok(a.monic(field))
    }

    /// Formal derivative; coefficients i·c_i are reduced mod p.
    pub fn derivative(&self, field: &Field) -> Poly {
        if self.coeffs.len() <= 1 {
            return Poly::zero();
        }
        Poly::from_coeffs(
            self.coeffs.iter().enumerate().skip(1).map(|(i, &c)| field.mul(field.from_int(i as i64), c)).collect(),
        )
    }

    pub fn eval(&self, a: Fq, field: &Field) -> Fq {
        self.coeffs.iter().rev().fold(Fq::ZERO, |acc, &c| field.add(field.mul(acc, a), c))
    }

    /// self^e mod m.
    pub fn pow_mod(&self, e: &BigUint, m: &Poly, field: &Field) -> Result<Poly> {
        let mut base = self.rem(m, field)?;
        let mut acc = Poly::one().rem(m, field)?;
        for i in 0..e.bits() {
            if e.bit(i) {
                acc = acc.mul(&base, field).rem(m, field)?;
            }
            base = base.mul(&base, field).rem(m, field)?;
        }
        Ok(acc)
    }

    /// No irreducible P with P² | f. A vanishing derivative means f is a
    /// p-th power, which is square-free only when constant.
    pub fn is_squarefree(&self, field: &Field) -> Result<bool> {
        if self.is_zero() {
            return domain("square-freeness of the zero polynomial");
        }
        if self.deg() == 0 {
            return Ok(true);
        }
        let d = self.derivative(field);
        if d.is_zero() {
            return Ok(false);
        }
        Ok(self.gcd(&d, field)?.deg() == 0)
    }

    /// Membership in 𝒫: x^{q^d} ≡ x mod P and gcd(x^{q^{d/ℓ}} − x, P) = 1
    /// for each prime ℓ | d.
    pub fn is_irreducible(&self, field: &Field) -> Result<bool> {
        if !self.is_monic() || self.deg() == 0 {
            return domain("irreducibility test needs a monic non-constant polynomial");
        }
        let d = self.deg();
        if d == 1 {
            return Ok(true);
        }
        let q = BigUint::from(field.q());
        // frob[i] = x^{q^i} mod P
        let mut frob = Vec::with_capacity(d + 1);
        frob.push(Poly::x().rem(self, field)?);
        for i in 1..=d {
            let next = frob[i - 1].pow_mod(&q, self, field)?;
            frob.push(next);
        }
        let x = Poly::x().rem(self, field)?;
        if frob[d] != x {
            return Ok(false);
        }
        for l in prime_divisors(d) {
            let h = frob[d / l].sub(&x, field);
            if h.is_zero() || self.gcd(&h, field)?.deg() != 0 {
                return Ok(false);
            }
        }
        Ok(true)
    }

    pub fn display(&self, field: &Field) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut terms = Vec::new();
        for (i, &c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let cs = field.fmt_elem(c);
            let cs = if field.k() > 1 && cs.contains('+') { format!("({cs})") } else { cs };
            terms.push(match (i, c == Fq::ONE) {
                (0, _) => cs,
                (1, true) => "x".into(),
                (1, false) => format!("{cs}x"),
                (_, true) => format!("x^{i}"),
                (_, false) => format!("{cs}x^{i}"),
            });
        }
        terms.join(" + ")
    }
}

fn prime_divisors(mut n: usize) -> Vec<usize> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            out.push(d);
            while n.is_multiple_of(d) {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fqx::field::FieldSpec;

    fn f3() -> Field {
        Field::new(&FieldSpec::prime(3).unwrap()).unwrap()
    }

    fn p(f: &Field, c: &[i64]) -> Poly {
        Poly::from_ints(f, c)
    }

    #[test]
    fn long_division() {
        let f = f3();
        let (s, r) = p(&f, &[1, 0, 1]).divrem(&p(&f, &[1, 1]), &f).unwrap();
        assert_eq!(s, p(&f, &[2, 1]));
        assert_eq!(r, p(&f, &[2]));
        assert!(p(&f, &[1]).divrem(&Poly::zero(), &f).is_err());
    }

    #[test]
    fn products() {
        let f = f3();
        let a = p(&f, &[0, 1]);
        assert_eq!(a.mul(&p(&f, &[1, 1]), &f), p(&f, &[0, 1, 1]));
        assert_eq!(a.mul(&Poly::one(), &f), a);
    }

    #[test]
    fn gcds() {
        let f = f3();
        let a = p(&f, &[2, 1, 1]);
        assert_eq!(a.gcd(&Poly::zero(), &f).unwrap(), a.monic(&f));
        assert_eq!(p(&f, &[-1, 0, 1]).gcd(&p(&f, &[-1, 1]), &f).unwrap(), p(&f, &[2, 1]));
        assert_eq!(p(&f, &[1, 0, 1]).gcd(&p(&f, &[1, 1]), &f).unwrap(), Poly::one());
        assert!(Poly::zero().gcd(&Poly::zero(), &f).is_err());
    }

    #[test]
    fn derivatives_in_characteristic_three() {
        let f = f3();
        assert!(p(&f, &[1, 0, 0, 1]).derivative(&f).is_zero());
        assert!(p(&f, &[2]).derivative(&f).is_zero());
        assert_eq!(p(&f, &[0, 1, 1]).derivative(&f), p(&f, &[1, 2]));
    }

    #[test]
    fn squarefree_examples() {
        let f = f3();
        assert!(!p(&f, &[0, 0, 1]).is_squarefree(&f).unwrap());
        assert!(!p(&f, &[1, 0, 0, 1]).is_squarefree(&f).unwrap());
        assert!(p(&f, &[1, 2, 0, 1]).is_squarefree(&f).unwrap());
        assert!(Poly::zero().is_squarefree(&f).is_err());
    }

    #[test]
    fn irreducibility_examples() {
        let f = f3();
        assert!(Poly::x().is_irreducible(&f).unwrap());
        assert!(p(&f, &[1, 0, 1]).is_irreducible(&f).unwrap());
        assert!(!p(&f, &[2, 0, 1]).is_irreducible(&f).unwrap());
        assert!(p(&f, &[1, 2, 0, 1]).is_irreducible(&f).unwrap());
        assert!(p(&f, &[2, 0, 2]).is_irreducible(&f).is_err());
        assert!(Poly::one().is_irreducible(&f).is_err());
    }

    #[test]
    fn display_reads_naturally() {
        let f = f3();
        assert_eq!(p(&f, &[1, 2, 0, 1]).display(&f), "x^3 + 2x + 1");
    }
}
