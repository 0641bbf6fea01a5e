//! Even trigonometric-polynomial test functions given by their Fourier
//! coefficients Φ̂(n/2g), n = 0..=N.

use std::f64::consts::PI;
use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{domain, Error, Result};

/// Φ with Φ(2gθ) = (1/2g) Σ_{|n| ≤ N} Φ̂(n/2g) e(nθ).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TestFunction {
    coeffs: Vec<BigRational>,
}

/// How to build a test function.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TestFnKind {
    /// Φ̂(n/2g) = 1 − n/M for n < M.
    Fejer(u32),
    /// Φ̂(0) = 1 only.
    Delta0,
    /// Explicit "n value" lines.
    File(String),
}

impl FromStr for TestFnKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Domain(format!("unknown test function `{s}` (expected fejer:M, delta0 or file:PATH)"));
        if s == "delta0" {
            return Ok(TestFnKind::Delta0);
        }
        match s.split_once(':') {
            Some(("fejer", m)) => {
                let m: u32 = m.parse().map_err(|_| bad())?;
                if m == 0 {
                    return domain("fejer:M needs M >= 1");
                }
                Ok(TestFnKind::Fejer(m))
            }
            Some(("file", p)) if !p.is_empty() => Ok(TestFnKind::File(p.to_string())),
            _ => Err(bad()),
        }
    }
}

impl TestFunction {
    /// From Φ̂(n/2g) for n = 0, 1, …; trailing zeros are dropped.
    pub fn from_coeffs(mut coeffs: Vec<BigRational>) -> Self {
        while coeffs.len() > 1 && coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            coeffs.push(BigRational::zero());
        }
        TestFunction { coeffs }
    }

    pub fn zero() -> Self {
        Self::from_coeffs(Vec::new())
    }

    pub fn delta0() -> Self {
        Self::from_coeffs(vec![BigRational::one()])
    }

    pub fn fejer(m: u32) -> Self {
        let m_big = BigInt::from(m);
        Self::from_coeffs((0..m).map(|n| BigRational::new(&m_big - BigInt::from(n), m_big.clone())).collect())
    }

    pub fn make(kind: &TestFnKind) -> Result<Self> {
        match kind {
            TestFnKind::Fejer(m) => Ok(Self::fejer(*m)),
            TestFnKind::Delta0 => Ok(Self::delta0()),
            TestFnKind::File(p) => Self::load(Path::new(p)),
        }
    }

    /// Support bound N: the largest n with Φ̂(n/2g) ≠ 0 (0 for Φ̂ ≡ 0).
    pub fn support(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    /// Φ̂(n/2g).
    pub fn coeff(&self, n: usize) -> BigRational {
        self.coeffs.get(n).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn coeff_f64(&self, n: usize) -> f64 {
        self.coeff(n).to_f64().unwrap()
    }

    /// Φ̂(n/g) = Φ̂(2n/2g).
    pub fn at_over_g(&self, n: usize) -> BigRational {
        self.coeff(2 * n)
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().map(|c| c.to_f64().unwrap().abs()).fold(0.0, f64::max)
    }

    /// Φ(2gθ) = (1/2g)(Φ̂(0) + 2 Σ_{n≥1} Φ̂(n/2g) cos 2πnθ).
    pub fn eval_at_angle(&self, theta: f64, g: usize) -> f64 {
        let mut s = self.coeff_f64(0);
        for n in 1..self.coeffs.len() {
            s += 2.0 * self.coeff_f64(n) * (2.0 * PI * n as f64 * theta).cos();
        }
        s / (2 * g) as f64
    }

    /// Parses "n value" lines; '#' starts a comment; values are integers,
    /// fractions a/b or decimals, all read exactly.
    pub fn parse(text: &str) -> Result<Self> {
        let mut coeffs: Vec<Option<BigRational>> = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let err = |msg: &str| Error::Parse { line: line_no, msg: msg.to_string() };
            let line = raw.split('#').next().unwrap().trim();
            if line.is_empty() {
                continue;
            }
            let mut parts = line.split_whitespace();
            let (n, v) = match (parts.next(), parts.next(), parts.next()) {
                (Some(n), Some(v), None) => (n, v),
                _ => return Err(err("expected `n value`")),
            };
            let n: usize = n.parse().map_err(|_| err("index must be a nonnegative integer"))?;
            let v = parse_rational(v).ok_or_else(|| err("value must be an integer, a/b or a decimal"))?;
            if coeffs.len() <= n {
                coeffs.resize(n + 1, None);
            }
            if coeffs[n].is_some() {
                return Err(err("duplicate index"));
            }
            coeffs[n] = Some(v);
        }
        Ok(Self::from_coeffs(coeffs.into_iter().map(|c| c.unwrap_or_else(BigRational::zero)).collect()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    /// Serializes in the file format read by [`TestFunction::parse`].
    pub fn to_file_string(&self) -> String {
        let mut s = String::from("# n  Phi_hat(n/2g)\n");
        for (n, c) in self.coeffs.iter().enumerate() {
            if !c.is_zero() {
                writeln!(s, "{n} {c}").unwrap();
            }
        }
        s
    }
}

/// Exact rational from "a", "a/b", "a.b" or "a.be±k".
pub fn parse_rational(s: &str) -> Option<BigRational> {
    if let Some((a, b)) = s.split_once('/') {
        let a: BigInt = a.parse().ok()?;
        let b: BigInt = b.parse().ok()?;
        return (!b.is_zero()).then(|| BigRational::new(a, b));
    }
    let (mant, exp) = match s.split_once(['e', 'E']) {
        Some((m, e)) => (m, e.parse::<i32>().ok()?),
        None => (s, 0),
    };
    let (neg, mant) = match mant.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mant.strip_prefix('+').unwrap_or(mant)),
    };
    let (int, frac) = mant.split_once('.').unwrap_or((mant, ""));
    if int.is_empty() && frac.is_empty() {
        return None;
    }
    if !int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let digits: BigInt = format!("{int}{frac}").parse().ok()?;
    let ten = BigInt::from(10);
    let scale = exp - frac.len() as i32;
    let mut r = BigRational::from_integer(digits);
    if scale >= 0 {
        r *= BigRational::from_integer(ten.pow(scale as u32));
    } else {
        r /= BigRational::from_integer(ten.pow((-scale) as u32));
    }
    Some(if neg { -r } else { r })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(a: i64, b: i64) -> BigRational {
        BigRational::new(a.into(), b.into())
    }

    #[test]
    fn delta0_and_fejer() {
        let d = TestFunction::delta0();
        assert_eq!(d.support(), 0);
        assert_eq!(d.coeff(0), r(1, 1));
        let f = TestFunction::fejer(4);
        assert_eq!(f.coeffs(), &[r(1, 1), r(3, 4), r(1, 2), r(1, 4)]);
        assert_eq!(f.support(), 3);
        assert_eq!(f.at_over_g(1), r(1, 2));
    }

    #[test]
    fn kinds_parse() {
        assert_eq!("fejer:3".parse::<TestFnKind>().unwrap(), TestFnKind::Fejer(3));
        assert_eq!("delta0".parse::<TestFnKind>().unwrap(), TestFnKind::Delta0);
        assert!("fejer:0".parse::<TestFnKind>().is_err());
        assert!("gauss".parse::<TestFnKind>().is_err());
    }

    #[test]
    fn file_round_trip() {
        let f = TestFunction::from_coeffs(vec![r(1, 1), r(-2, 3), r(0, 1), r(5, 7)]);
        assert_eq!(TestFunction::parse(&f.to_file_string()).unwrap(), f);
    }

    #[test]
    fn decimals_are_exact() {
        let t = TestFunction::parse("# header\n0 1\n1 0.25 # comment\n2 1.5e-1\n").unwrap();
        assert_eq!(t.coeffs(), &[r(1, 1), r(1, 4), r(3, 20)]);
    }

    #[test]
    fn malformed_lines_report_their_number() {
        match TestFunction::parse("0 1\n1 x\n") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("{other:?}"),
        }
        assert!(matches!(TestFunction::parse("0 1\n0 2\n"), Err(Error::Parse { line: 2, .. })));
        assert!(matches!(TestFunction::parse("0 1 2\n"), Err(Error::Parse { line: 1, .. })));
    }

    #[test]
    fn constant_function_counts_zeros() {
        // Φ̂(0) only: Φ ≡ Φ̂(0)/2g, so 2g zeros give Φ̂(0)
        let d = TestFunction::delta0();
        assert!((d.eval_at_angle(0.3, 2) * 4.0 - 1.0).abs() < 1e-15);
    }
}
