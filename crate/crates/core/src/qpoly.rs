//! Small dense polynomials over Q and over Z/pZ, used for exact root
//! multiplicities of L-polynomials.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

/// Dense polynomial over Q, little-endian, no trailing zeros.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QPoly(pub Vec<BigRational>);

impl QPoly {
    pub fn from_ints(c: &[i128]) -> Self {
        Self::norm(c.iter().map(|&x| BigRational::from_integer(BigInt::from(x))).collect())
    }

    fn norm(mut v: Vec<BigRational>) -> Self {
        while v.last().is_some_and(|c| c.is_zero()) {
            v.pop();
        }
        QPoly(v)
    }

    pub fn deg(&self) -> usize {
        self.0.len().saturating_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn derivative(&self) -> Self {
        Self::norm(
            self.0.iter().enumerate().skip(1).map(|(i, c)| c * BigRational::from_integer(BigInt::from(i))).collect(),
        )
    }

    pub fn monic(&self) -> Self {
        let lead = self.0.last().expect("nonzero polynomial").clone();
        QPoly(self.0.iter().map(|c| c / &lead).collect())
    }

    pub fn divrem(&self, d: &QPoly) -> (QPoly, QPoly) {
        assert!(!d.is_zero(), "division by the zero polynomial");
        let dd = d.deg();
        if self.0.len() <= dd {
            return (QPoly(Vec::new()), self.clone());
        }
        let lead = d.0.last().unwrap();
        let mut rem = self.0.clone();
        let mut quot = vec![BigRational::zero(); rem.len() - dd];
        for i in (dd..rem.len()).rev() {
            if rem[i].is_zero() {
                continue;
            }
            let c = &rem[i] / lead;
            for (j, b) in d.0.iter().enumerate() {
                let t = &c * b;
                rem[i - dd + j] -= t;
            }
            quot[i - dd] = c;
        }
        rem.truncate(dd);
        (Self::norm(quot), Self::norm(rem))
    }

    /// Monic gcd.
    pub fn gcd(&self, other: &QPoly) -> QPoly {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let r = a.divrem(&b).1;
            a = b;
            b = r;
        }
        a.monic()
    }

    /// Yun's square-free decomposition: (a_i, i) with self = c·Π a_i^i.
    pub fn squarefree_decomposition(&self) -> Vec<(QPoly, usize)> {
        let mut out = Vec::new();
        if self.deg() == 0 {
            return out;
        }
        let f = self.monic();
        let fp = f.derivative();
        let mut a = f.gcd(&fp);
        let mut b = f.divrem(&a).0;
        let mut c = fp.divrem(&a).0;
        let mut d = c.sub(&b.derivative());
        let mut i = 1;
        while b.deg() > 0 {
            a = b.gcd(&d);
            b = b.divrem(&a).0;
            c = d.divrem(&a).0;
            d = c.sub(&b.derivative());
            if a.deg() > 0 {
                out.push((a.clone(), i));
            }
            i += 1;
        }
        out
    }

    pub fn sub(&self, o: &QPoly) -> QPoly {
        let n = self.0.len().max(o.0.len());
        let z = BigRational::zero();
        Self::norm((0..n).map(|i| self.0.get(i).unwrap_or(&z) - o.0.get(i).unwrap_or(&z)).collect())
    }

    /// Exact division by `d`, if it leaves no remainder.
    pub fn div_exact(&self, d: &QPoly) -> Option<QPoly> {
        let (q, r) = self.divrem(d);
        r.is_zero().then_some(q)
    }

    pub fn to_f64(&self) -> Vec<f64> {
        use num_traits::ToPrimitive;
        self.0.iter().map(|c| c.to_f64().unwrap()).collect()
    }
}

/// A Mersenne prime modulus for the fast square-free screen.
pub const MODP: u64 = (1 << 61) - 1;

fn mulmod(a: u64, b: u64) -> u64 {
    ((a as u128 * b as u128) % MODP as u128) as u64
}

fn powmod(mut a: u64, mut e: u64) -> u64 {
    let mut r = 1;
    while e > 0 {
        if e & 1 == 1 {
            r = mulmod(r, a);
        }
        a = mulmod(a, a);
        e >>= 1;
    }
    r
}

fn reduce(c: i128) -> u64 {
    c.rem_euclid(MODP as i128) as u64
}

fn trim(v: &mut Vec<u64>) {
    while v.last() == Some(&0) {
        v.pop();
    }
}

fn rem_modp(a: &mut Vec<u64>, b: &[u64]) {
    let db = b.len() - 1;
    let inv = powmod(b[db], MODP - 2);
    while a.len() > db {
        let top = a.len() - 1;
        let c = mulmod(a[top], inv);
        for (j, &bj) in b.iter().enumerate() {
            let pos = top - db + j;
            a[pos] = (a[pos] + MODP - mulmod(c, bj)) % MODP;
        }
        trim(a);
    }
}

/// Degree of gcd(f, f′) over Z/pZ. When the leading coefficient of f is a
/// unit mod p, degree 0 proves f square-free over Q.
pub fn gcd_with_derivative_degree_modp(c: &[i128]) -> usize {
    let mut a: Vec<u64> = c.iter().map(|&x| reduce(x)).collect();
    trim(&mut a);
    let mut b: Vec<u64> = c.iter().enumerate().skip(1).map(|(i, &x)| mulmod(reduce(x), i as u64)).collect();
    trim(&mut b);
    while !b.is_empty() {
        rem_modp(&mut a, &b);
        std::mem::swap(&mut a, &mut b);
    }
    a.len().saturating_sub(1)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn yun_finds_repeated_factors() {
        // (u−1)²(u+2) = u³ − 3u + 2
        let f = QPoly::from_ints(&[2, -3, 0, 1]);
        let dec = f.squarefree_decomposition();
        assert_eq!(dec.len(), 2);
        assert_eq!(dec[0], (QPoly::from_ints(&[2, 1]), 1));
        assert_eq!(dec[1], (QPoly::from_ints(&[-1, 1]), 2));
    }

    #[test]
    fn modular_screen() {
        assert_eq!(gcd_with_derivative_degree_modp(&[1, 3, 3]), 0);
        assert_eq!(gcd_with_derivative_degree_modp(&[2, -3, 0, 1]), 1);
    }

    #[test]
    fn exact_division() {
        let f = QPoly::from_ints(&[-1, 0, 3]);
        assert!(QPoly::from_ints(&[1, 0, 2, 0, 3]).div_exact(&f).is_none());
        let g = QPoly::from_ints(&[1, 0, -6, 0, 9]);
        assert_eq!(g.div_exact(&f).unwrap(), f);
    }
}
