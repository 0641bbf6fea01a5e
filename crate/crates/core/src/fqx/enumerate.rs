//! Deterministic streams of monic and monic square-free polynomials.
//!
//! Monic polynomials of degree n are indexed by 0..q^n: index i has
//! coefficients c_j = j-th base-q digit of i (constant term fastest), so any
//! index range can be streamed independently.

use num_bigint::BigUint;

use crate::fqx::field::{Field, Fq};
use crate::fqx::poly::Poly;

/// q^n as u64, or `None` on overflow.
pub fn count_monic(q: u32, n: usize) -> Option<u64> {
    (q as u64).checked_pow(n as u32)
}

/// The monic polynomial of degree n with enumeration index `index`.
pub fn monic_at(field: &Field, n: usize, mut index: u64) -> Poly {
    let q = field.q() as u64;
    let mut coeffs = Vec::with_capacity(n + 1);
    for _ in 0..n {
        coeffs.push(Fq((index % q) as u16));
        index /= q;
    }
    coeffs.push(Fq::ONE);
    Poly::from_coeffs(coeffs)
}

/// Streams the monic polynomials of degree n with indices in [start, end).
pub struct MonicRange<'a> {
    field: &'a Field,
    coeffs: Vec<Fq>,
    next: u64,
    end: u64,
}

impl Iterator for MonicRange<'_> {
    type Item = Poly;

    fn next(&mut self) -> Option<Poly> {
        if self.next >= self.end {
            return None;
        }
        let out = Poly::from_coeffs(self.coeffs.clone());
        self.next += 1;
        // odometer increment on the non-leading coefficients
        let q = self.field.q() as u16;
        let n = self.coeffs.len() - 1;
        for c in &mut self.coeffs[..n] {
            c.0 += 1;
            if c.0 < q {
                break;
            }
            c.0 = 0;
        }
        Some(out)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let left = (self.end - self.next) as usize;
        (left, Some(left))
    }
}

impl ExactSizeIterator for MonicRange<'_> {}

pub fn monic_range(field: &Field, n: usize, start: u64, end: u64) -> MonicRange<'_> {
    let total = count_monic(field.q(), n).expect("q^n overflows u64");
    let end = end.min(total);
    let start = start.min(end);
    let coeffs = monic_at(field, n, start).coeffs().to_vec();
    // monic_at normalizes, but the leading coefficient is one, so the length is n+1
    debug_assert_eq!(coeffs.len(), n + 1);
    MonicRange { field, coeffs, next: start, end }
}

/// All q^n monic polynomials of degree n, in enumeration order.
pub fn monic(field: &Field, n: usize) -> MonicRange<'_> {
    monic_range(field, n, 0, u64::MAX)
}

/// Monic square-free polynomials of degree d, i.e. the ensemble H_d.
pub fn hyperelliptic(field: &Field, d: usize) -> impl Iterator<Item = Poly> + '_ {
    hyperelliptic_range(field, d, 0, u64::MAX)
}

/// Members of H_d whose monic enumeration index lies in [start, end).
pub fn hyperelliptic_range(field: &Field, d: usize, start: u64, end: u64) -> impl Iterator<Item = Poly> + '_ {
    monic_range(field, d, start, end).filter(move |f| f.is_squarefree(field).expect("monic is nonzero"))
}

/// Monic irreducible polynomials of degree n, in enumeration order.
pub fn primes(field: &Field, n: usize) -> impl Iterator<Item = Poly> + '_ {
    monic(field, n).filter(move |f| n > 0 && f.is_irreducible(field).expect("monic of positive degree"))
}

/// |H_d|: 1 for d = 0, q for d = 1, q^{d−1}(q−1) for d ≥ 2.
pub fn cardinality(q: u32, d: usize) -> BigUint {
    match d {
        0 => BigUint::from(1u32),
        1 => BigUint::from(q),
        _ => BigUint::from(q).pow(d as u32 - 1) * (q - 1),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fqx::field::FieldSpec;

    fn field(s: &str) -> Field {
        Field::new(&s.parse::<FieldSpec>().unwrap()).unwrap()
    }

    #[test]
    fn monic_counts() {
        let f3 = field("3");
        assert_eq!(monic(&f3, 0).collect::<Vec<_>>(), vec![Poly::one()]);
        assert_eq!(monic(&f3, 2).count(), 9);
        assert_eq!(monic(&field("5"), 3).count(), 125);
    }

    #[test]
    fn order_is_constant_term_fastest() {
        let f = field("3");
        let v: Vec<Poly> = monic(&f, 1).collect();
        assert_eq!(v, vec![Poly::from_ints(&f, &[0, 1]), Poly::from_ints(&f, &[1, 1]), Poly::from_ints(&f, &[2, 1])]);
        for (i, p) in monic(&f, 3).enumerate() {
            assert_eq!(p, monic_at(&f, 3, i as u64));
        }
    }

    #[test]
    fn ranges_partition_the_stream() {
        let f = field("3");
        let all: Vec<Poly> = monic(&f, 4).collect();
        let mut joined: Vec<Poly> = monic_range(&f, 4, 0, 30).collect();
        joined.extend(monic_range(&f, 4, 30, 81));
        assert_eq!(all, joined);
    }

    #[test]
    fn prime_counts_match_closed_form() {
        for s in ["3", "5", "9"] {
            let f = field(s);
            let max = if s == "3" { 6 } else { 4 };
            for n in 1..=max {
                let count = primes(&f, n).count();
                assert_eq!(BigUint::from(count), crate::fqx::arith::pi_q(f.q(), n as u64).unwrap(), "q={s} n={n}");
            }
        }
    }

    #[test]
    fn hyperelliptic_counts() {
        let f = field("3");
        assert_eq!(hyperelliptic(&f, 1).count(), 3);
        assert_eq!(hyperelliptic(&f, 2).count(), 6);
        assert_eq!(hyperelliptic(&f, 7).count(), 1458);
        for q in ["3", "5"] {
            let f = field(q);
            for d in 0..=if q == "3" { 7 } else { 5 } {
                assert_eq!(BigUint::from(hyperelliptic(&f, d).count()), cardinality(f.q(), d), "q={q} d={d}");
            }
        }
    }
}
