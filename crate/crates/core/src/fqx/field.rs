//! Finite fields F_q, q = p^k with p odd, realised as F_p[t]/(modulus).
//!
//! Elements are stored as a single index `Σ coords[i]·p^i`, and all field
//! operations go through precomputed q×q tables. Desk-scale fields are tiny
//! (q ≤ 1023), so the tables stay well under a few megabytes.

use std::fmt;
use std::str::FromStr;

use crate::error::{domain, Error, Result};
use crate::fqx::poly::Poly;

/// Largest supported cardinality; keeps the q×q tables small.
pub const MAX_Q: u32 = 1023;

/// Description of F_q: prime `p`, degree `k` and (for k > 1) the modulus
/// coefficients `c_0, …, c_{k-1}, 1` over F_p.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FieldSpec {
    p: u32,
    k: u32,
    modulus: Option<Vec<u32>>,
}

impl FieldSpec {
    pub fn prime(p: u32) -> Result<Self> {
        let spec = FieldSpec { p, k: 1, modulus: None };
        spec.check_prime()?;
        Ok(spec)
    }

    /// F_{p^k} with an explicit modulus given as `c_0, …, c_k` (monic).
    pub fn extension(p: u32, k: u32, modulus: Vec<u32>) -> Result<Self> {
        let spec = FieldSpec { p, k, modulus: Some(modulus) };
        spec.check_prime()?;
        if k < 2 {
            return Err(spec.err("extension degree must be at least 2"));
        }
        let m = spec.modulus.as_ref().unwrap();
        if m.len() != k as usize + 1 {
            return Err(spec.err(format!("modulus needs {} coefficients", k + 1)));
        }
        if m[k as usize] != 1 {
            return Err(spec.err("modulus must be monic"));
        }
        if m.iter().any(|&c| c >= p) {
            return Err(spec.err("modulus coefficients must lie in [0, p)"));
        }
        Ok(spec)
    }

    /// F_{p^k} with the built-in modulus for q ∈ {9, 25, 27}, or the first
    /// irreducible monic polynomial of degree k in enumeration order.
    pub fn with_default_modulus(p: u32, k: u32) -> Result<Self> {
        if k == 1 {
            return Self::prime(p);
        }
        let builtin = match (p, k) {
            (3, 2) => Some(vec![1, 0, 1]),
            (5, 2) => Some(vec![2, 0, 1]),
            (3, 3) => Some(vec![1, 2, 0, 1]),
            _ => None,
        };
        if let Some(m) = builtin {
            return Self::extension(p, k, m);
        }
        let base = Field::new(&Self::prime(p)?)?;
        for f in crate::fqx::enumerate::monic(&base, k as usize) {
            if f.is_irreducible(&base)? {
                let m = f.coeffs().iter().map(|c| c.index() as u32).collect();
                return Self::extension(p, k, m);
            }
        }
        unreachable!("an irreducible polynomial of every degree exists")
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn q(&self) -> u32 {
        self.p.pow(self.k)
    }

    pub fn modulus(&self) -> Option<&[u32]> {
        self.modulus.as_deref()
    }

    fn err(&self, msg: impl Into<String>) -> Error {
        Error::Field { spec: self.to_string(), msg: msg.into() }
    }

    fn check_prime(&self) -> Result<()> {
        if self.p < 3 || !is_prime_u32(self.p) {
            return Err(self.err("characteristic must be an odd prime"));
        }
        match self.p.checked_pow(self.k) {
            Some(q) if q <= MAX_Q => Ok(()),
            _ => Err(self.err(format!("q exceeds the supported maximum {MAX_Q}"))),
        }
    }
}

impl fmt::Display for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.modulus {
            None => write!(f, "{}", self.p),
            Some(m) => {
                let cs: Vec<String> = m.iter().map(|c| c.to_string()).collect();
                write!(f, "{}^{}:{}", self.p, self.k, cs.join(","))
            }
        }
    }
}

impl FromStr for FieldSpec {
    type Err = Error;

    /// Accepts `"p"`, `"q"` (a prime power, default modulus), `"p^k"` and
    /// `"p^k:c0,c1,…,1"`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = |msg: &str| Error::Field { spec: s.to_string(), msg: msg.to_string() };
        let s_trim = s.trim();
        let (head, modulus) = match s_trim.split_once(':') {
            Some((h, m)) => (h, Some(m)),
            None => (s_trim, None),
        };
        let (p, k) = match head.split_once('^') {
            Some((p, k)) => (
                p.trim().parse::<u32>().map_err(|_| bad("bad characteristic"))?,
                k.trim().parse::<u32>().map_err(|_| bad("bad exponent"))?,
            ),
            None => {
                let q = head.parse::<u32>().map_err(|_| bad("expected an integer"))?;
                if q % 2 == 0 {
                    return Err(bad("q must be odd"));
                }
                prime_power(q).ok_or_else(|| bad("q must be a prime power"))?
            }
        };
        if p % 2 == 0 {
            return Err(bad("q must be odd"));
        }
        if k == 0 {
            return Err(bad("exponent must be positive"));
        }
        match modulus {
            None => FieldSpec::with_default_modulus(p, k),
            Some(m) => {
                let coeffs = m
                    .split(',')
                    .map(|c| c.trim().parse::<u32>())
                    .collect::<std::result::Result<Vec<_>, _>>()
                    .map_err(|_| bad("bad modulus coefficient"))?;
                if k == 1 {
                    return Err(bad("prime fields take no modulus"));
                }
                FieldSpec::extension(p, k, coeffs)
            }
        }
    }
}

fn is_prime_u32(n: u32) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// Returns (p, k) with q = p^k, if q is a prime power.
fn prime_power(q: u32) -> Option<(u32, u32)> {
    if q < 2 {
        return None;
    }
    let p = (2..=q).find(|d| q.is_multiple_of(*d))?;
    let (mut r, mut k) = (q, 0);
    while r % p == 0 {
        r /= p;
        k += 1;
    }
    (r == 1).then_some((p, k))
}

/// An element of F_q, stored as its table index.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Fq(pub(crate) u16);

impl Fq {
    pub const ZERO: Fq = Fq(0);
    pub const ONE: Fq = Fq(1);

    pub fn index(self) -> usize {
        self.0 as usize
    }

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

/// F_q with arithmetic tables.
#[derive(Clone)]
pub struct Field {
    spec: FieldSpec,
    p: u32,
    k: u32,
    q: u32,
    add: Vec<u16>,
    mul: Vec<u16>,
    neg: Vec<u16>,
    inv: Vec<u16>,
    quad: Vec<i8>,
    trace: Vec<u16>,
}

impl fmt::Debug for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Field({})", self.spec)
    }
}

impl Field {
    pub fn new(spec: &FieldSpec) -> Result<Self> {
        let (p, k, q) = (spec.p, spec.k, spec.q());
        let qs = q as usize;
        let digits = |mut i: usize| -> Vec<u32> {
            (0..k)
                .map(|_| {
                    let d = (i % p as usize) as u32;
                    i /= p as usize;
                    d
                })
                .collect()
        };
        let index = |c: &[u32]| -> u16 { c.iter().rev().fold(0u32, |acc, &d| acc * p + d) as u16 };

        if let Some(m) = &spec.modulus {
            let base = Field::new(&FieldSpec::prime(p)?)?;
            let mpoly = Poly::from_ints(&base, &m.iter().map(|&c| c as i64).collect::<Vec<_>>());
            if !mpoly.is_irreducible(&base)? {
                return domain(format!("modulus of {spec} is reducible over F_{p}"));
            }
        }

        let mut add = vec![0u16; qs * qs];
        let mut mul = vec![0u16; qs * qs];
        let modulus: Vec<u32> = spec.modulus.clone().unwrap_or_else(|| vec![0, 1]);
        for a in 0..qs {
            let da = digits(a);
            for b in 0..qs {
                let db = digits(b);
                let sum: Vec<u32> = da.iter().zip(&db).map(|(x, y)| (x + y) % p).collect();
                add[a * qs + b] = index(&sum);
                // schoolbook product, then reduce by the monic modulus
                let mut prod = vec![0u32; 2 * k as usize];
                for (i, x) in da.iter().enumerate() {
                    for (j, y) in db.iter().enumerate() {
                        prod[i + j] = (prod[i + j] + x * y) % p;
                    }
                }
                for deg in (k as usize..prod.len()).rev() {
                    let c = prod[deg];
                    if c != 0 {
                        for (i, &mi) in modulus.iter().enumerate().take(k as usize) {
                            let pos = deg - k as usize + i;
                            prod[pos] = (prod[pos] + (p - c) * mi) % p;
                        }
                        prod[deg] = 0;
                    }
                }
                mul[a * qs + b] = index(&prod[..k as usize]);
            }
        }
        let neg: Vec<u16> = (0..qs).map(|a| (0..qs).find(|&b| add[a * qs + b] == 0).unwrap() as u16).collect();
        let inv: Vec<u16> =
            (0..qs).map(|a| if a == 0 { 0 } else { (1..qs).find(|&b| mul[a * qs + b] == 1).unwrap() as u16 }).collect();

        let mut field = Field { spec: spec.clone(), p, k, q, add, mul, neg, inv, quad: Vec::new(), trace: Vec::new() };
        let half = (q as u64 - 1) / 2;
        field.quad = (0..qs)
            .map(|a| {
                if a == 0 {
                    0
                } else if field.pow(Fq(a as u16), half) == Fq::ONE {
                    1
                } else {
                    -1
                }
            })
            .collect();
        field.trace = (0..qs)
            .map(|a| {
                let mut t = Fq::ZERO;
                let mut frob = Fq(a as u16);
                for _ in 0..k {
                    t = field.add(t, frob);
                    frob = field.pow(frob, p as u64);
                }
                debug_assert!((t.0 as u32) < p, "trace must land in the prime field");
                t.0
            })
            .collect();
        Ok(field)
    }

    pub fn spec(&self) -> &FieldSpec {
        &self.spec
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    /// Whether q is a perfect square (k even).
    pub fn q_is_square(&self) -> bool {
        self.k.is_multiple_of(2)
    }

    /// Iterates over all q elements in index order.
    pub fn elements(&self) -> impl Iterator<Item = Fq> {
        (0..self.q as u16).map(Fq)
    }

    pub fn from_coords(&self, coords: &[u32]) -> Fq {
        assert!(coords.len() <= self.k as usize, "too many coordinates");
        Fq(coords.iter().rev().fold(0u32, |acc, &d| acc * self.p + d % self.p) as u16)
    }

    pub fn coords(&self, a: Fq) -> Vec<u32> {
        let mut i = a.0 as u32;
        (0..self.k)
            .map(|_| {
                let d = i % self.p;
                i /= self.p;
                d
            })
            .collect()
    }

    /// Image of an integer in the prime subfield.
    pub fn from_int(&self, n: i64) -> Fq {
        Fq(n.rem_euclid(self.p as i64) as u16)
    }

    /// The class of t in F_p[t]/(modulus). Panics on prime fields.
    pub fn t(&self) -> Fq {
        assert!(self.k > 1, "prime fields have no generator t");
        Fq(self.p as u16)
    }

    #[inline]
    pub fn add(&self, a: Fq, b: Fq) -> Fq {
        Fq(self.add[a.index() * self.q as usize + b.index()])
    }

    #[inline]
    pub fn neg(&self, a: Fq) -> Fq {
        Fq(self.neg[a.index()])
    }

    #[inline]
    pub fn sub(&self, a: Fq, b: Fq) -> Fq {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: Fq, b: Fq) -> Fq {
        Fq(self.mul[a.index() * self.q as usize + b.index()])
    }

    pub fn inv(&self, a: Fq) -> Result<Fq> {
        if a.is_zero() {
            return domain("inverse of zero in F_q");
        }
        Ok(Fq(self.inv[a.index()]))
    }

    /// Inverse of a known-nonzero element.
    #[inline]
    pub(crate) fn inv_nz(&self, a: Fq) -> Fq {
        debug_assert!(!a.is_zero());
        Fq(self.inv[a.index()])
    }

    pub fn pow(&self, a: Fq, mut e: u64) -> Fq {
        let (mut base, mut acc) = (a, Fq::ONE);
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    /// Tr_{F_q/F_p}(a) as a residue in [0, p).
    #[inline]
    pub fn trace(&self, a: Fq) -> u32 {
        self.trace[a.index()] as u32
    }

    /// Quadratic character χ_q: 0, +1 or −1.
    #[inline]
    pub fn quad_char(&self, a: Fq) -> i8 {
        self.quad[a.index()]
    }

    pub fn fmt_elem(&self, a: Fq) -> String {
        if self.k == 1 {
            return a.0.to_string();
        }
        let terms: Vec<String> = self
            .coords(a)
            .iter()
            .enumerate()
            .filter(|(_, &c)| c != 0)
            .map(|(i, &c)| match i {
                0 => c.to_string(),
                1 if c == 1 => "t".to_string(),
                1 => format!("{c}t"),
                _ if c == 1 => format!("t^{i}"),
                _ => format!("{c}t^{i}"),
            })
            .collect();
        if terms.is_empty() {
            "0".into()
        } else {
            terms.join("+")
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f3() -> Field {
        Field::new(&FieldSpec::prime(3).unwrap()).unwrap()
    }

    fn f9() -> Field {
        Field::new(&"3^2:1,0,1".parse().unwrap()).unwrap()
    }

    #[test]
    fn prime_field_arith() {
        let f = f3();
        let two = f.from_int(2);
        assert_eq!(f.mul(two, two), Fq::ONE);
        assert_eq!(f.inv(two).unwrap(), two);
        assert!(f.inv(Fq::ZERO).is_err());
    }

    #[test]
    fn f9_t_squared_is_minus_one() {
        let f = f9();
        let t = f.t();
        assert_eq!(f.mul(t, t), f.from_int(2));
    }

    #[test]
    fn fermat_in_every_field() {
        for s in ["3", "5", "7", "3^2:1,0,1", "25", "27"] {
            let f = Field::new(&s.parse().unwrap()).unwrap();
            for a in f.elements().skip(1) {
                assert_eq!(f.pow(a, f.q() as u64 - 1), Fq::ONE, "{s}");
                assert_eq!(f.mul(a, f.inv(a).unwrap()), Fq::ONE);
            }
        }
    }

    #[test]
    fn traces() {
        let f = f3();
        assert_eq!(f.trace(f.from_int(2)), 2);
        let f = f9();
        assert_eq!(f.trace(Fq::ONE), 2);
        assert_eq!(f.trace(f.t()), 0);
    }

    #[test]
    fn quadratic_character() {
        let f = f3();
        assert_eq!(f.quad_char(Fq::ONE), 1);
        assert_eq!(f.quad_char(f.from_int(2)), -1);
        assert_eq!(f.quad_char(Fq::ZERO), 0);
        assert_eq!(f9().quad_char(f9().t()), 1);
    }

    #[test]
    fn parse_and_display() {
        assert_eq!("3".parse::<FieldSpec>().unwrap().to_string(), "3");
        assert_eq!("9".parse::<FieldSpec>().unwrap().to_string(), "3^2:1,0,1");
        assert_eq!("3^2".parse::<FieldSpec>().unwrap().to_string(), "3^2:1,0,1");
        assert_eq!("25".parse::<FieldSpec>().unwrap().q(), 25);
        assert!("4".parse::<FieldSpec>().is_err());
        assert!("15".parse::<FieldSpec>().is_err());
        assert!("2".parse::<FieldSpec>().is_err());
        // t^2 + 2 = (t+1)(t+2) over F_3
        assert!(Field::new(&"3^2:2,0,1".parse().unwrap()).is_err());
    }

    #[test]
    fn default_modulus_search() {
        let spec = FieldSpec::with_default_modulus(7, 2).unwrap();
        let f = Field::new(&spec).unwrap();
        assert_eq!(f.q(), 49);
    }
}
