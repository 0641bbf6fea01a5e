//! Integer arithmetic functions: Möbius, π_q, α(d) and Σ Λ(f)².

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::error::{domain, Result};

/// Integer Möbius function.
pub fn mobius(mut n: u64) -> i64 {
    assert!(n >= 1, "mobius(0) is undefined");
    let mut sign = 1;
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            n /= d;
            if n.is_multiple_of(d) {
                return 0;
            }
            sign = -sign;
        }
        d += 1;
    }
    if n > 1 {
        sign = -sign;
    }
    sign
}

pub fn divisors(n: u64) -> Vec<u64> {
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut d = 1;
    while d * d <= n {
        if n.is_multiple_of(d) {
            small.push(d);
            if d * d != n {
                large.push(n / d);
            }
        }
        d += 1;
    }
    small.extend(large.into_iter().rev());
    small
}

/// Number of monic irreducibles of degree n over F_q:
/// (1/n) Σ_{d|n} μ(d) q^{n/d}.
pub fn pi_q(q: u32, n: u64) -> Result<BigUint> {
    if n == 0 {
        return domain("pi_q needs n >= 1");
    }
    let mut acc = BigInt::zero();
    for d in divisors(n) {
        let mu = mobius(d);
        if mu != 0 {
            acc += BigInt::from(mu) * BigInt::from(q).pow((n / d) as u32);
        }
    }
    let (quot, rem) = acc.div_rem(&BigInt::from(n));
    debug_assert!(rem.is_zero());
    Ok(quot.to_biguint().expect("pi_q is nonnegative"))
}

/// π_q(n) in floating point, safe for large n.
pub fn pi_q_f64(q: u32, n: u64) -> f64 {
    assert!(n >= 1);
    let qf = q as f64;
    // q^{n/d}/n relative to q^n/n; the d = 1 term dominates
    divisors(n).into_iter().map(|d| mobius(d) as f64 * (qf.ln() * (n / d) as f64).exp()).sum::<f64>() / n as f64
}

/// α(d) = Π_{p | d} (1 − p).
pub fn alpha(mut d: u64) -> i64 {
    assert!(d >= 1);
    let mut out = 1i64;
    let mut p = 2;
    while p * p <= d {
        if d.is_multiple_of(p) {
            out *= 1 - p as i64;
            while d.is_multiple_of(p) {
                d /= p;
            }
        }
        p += 1;
    }
    if d > 1 {
        out *= 1 - d as i64;
    }
    out
}

/// Σ_{f ∈ ℳ_n} Λ(f)² in closed form n Σ_{d|n} (α(d)/d) q^{n/d}.
pub fn lambda_square_sum(q: u32, n: u64) -> Result<BigInt> {
    if n == 0 {
        return domain("lambda_square_sum needs n >= 1");
    }
    // n·α(d)/d is an integer since d | n
    let mut acc = BigInt::zero();
    for d in divisors(n) {
        acc += BigInt::from(alpha(d)) * BigInt::from(n / d) * BigInt::from(q).pow((n / d) as u32);
    }
    Ok(acc)
}

/// q^n as a big integer.
pub fn qpow(q: u32, n: u64) -> BigUint {
    if n == 0 {
        return BigUint::one();
    }
    BigUint::from(q).pow(n as u32)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mobius_values() {
        let v: Vec<i64> = (1..=10).map(mobius).collect();
        assert_eq!(v, vec![1, -1, -1, 0, -1, 1, -1, 0, 0, 1]);
    }

    #[test]
    fn prime_counts() {
        assert_eq!(pi_q(3, 1).unwrap(), BigUint::from(3u32));
        assert_eq!(pi_q(3, 3).unwrap(), BigUint::from(8u32));
        assert_eq!(pi_q(5, 4).unwrap(), BigUint::from(150u32));
        assert!(pi_q(3, 0).is_err());
        assert!((pi_q_f64(5, 4) - 150.0).abs() < 1e-9);
    }

    #[test]
    fn alpha_values() {
        assert_eq!(alpha(1), 1);
        assert_eq!(alpha(2), -1);
        assert_eq!(alpha(6), 2);
        assert_eq!(alpha(12), 2);
    }

    #[test]
    fn lambda_square_closed_form() {
        assert_eq!(lambda_square_sum(3, 4).unwrap(), BigInt::from(303));
        assert_eq!(lambda_square_sum(3, 1).unwrap(), BigInt::from(3));
    }

    #[test]
    fn divisor_lists() {
        assert_eq!(divisors(12), vec![1, 2, 3, 4, 6, 12]);
        assert_eq!(divisors(1), vec![1]);
        assert_eq!(divisors(9), vec![1, 3, 9]);
    }
}
