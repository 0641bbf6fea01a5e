//! Exhaustive passes over the hyperelliptic ensemble H_{2g+1}: exact moment
//! aggregates of ψ_D, the 1-level density and pair correlation by the
//! explicit-formula and zero routes, and exact character-sum averages.

use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::characters::chi_d;
use crate::error::{domain, Error, Result};
use crate::fqx::enumerate::{cardinality, count_monic, hyperelliptic, monic_at, primes};
use crate::fqx::{Field, FieldSpec, Fq, Poly};
use crate::lfunction::{
    central_numerators, central_vanishes, compute_zeros, l_from_psi, order_at_centre, psi_from_l, psi_from_prime_sums,
    simple_zero_count, LPolynomial, ZeroSet,
};
use crate::qpoly::gcd_with_derivative_degree_modp;
use crate::testfn::TestFunction;

/// Default cap on q^{2g+1}, the number of monic polynomials scanned.
pub const DEFAULT_BUDGET: u128 = 50_000_000;

/// Per-prime lookup tables are built while q^{d(P)+1} stays below this.
const TABLE_LIMIT: usize = 1 << 14;

/// Number of monic indices per work unit; fixed so results never depend on
/// the thread count.
const CHUNK: u64 = 1 << 12;

/// Cache file format tag.
pub const CACHE_FORMAT: u32 = 1;

/// Worker count and enumeration budget for ensemble passes.
#[derive(Clone, Copy, Debug)]
pub struct PassOptions {
    /// 0 selects the rayon default.
    pub threads: usize,
    pub budget: u128,
}

impl Default for PassOptions {
    fn default() -> Self {
        PassOptions { threads: 0, budget: DEFAULT_BUDGET }
    }
}

impl PassOptions {
    pub fn with_threads(threads: usize) -> Self {
        PassOptions { threads, ..Self::default() }
    }

    fn install<T: Send>(&self, f: impl FnOnce() -> T + Send) -> Result<T> {
        if self.threads == 0 {
            return Ok(f());
        }
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(self.threads)
            .build()
            .map_err(|e| Error::Domain(format!("thread pool: {e}")))?;
        Ok(pool.install(f))
    }

    fn check_budget(&self, q: u32, g: usize) -> Result<u64> {
        let required = (q as u128).checked_pow(2 * g as u32 + 1).unwrap_or(u128::MAX);
        if required > self.budget || required > u64::MAX as u128 {
            return Err(Error::Budget { required, budget: self.budget });
        }
        Ok(required as u64)
    }
}

struct PrimeEntry {
    poly: Poly,
    /// step[r·q + c] = index of (x·r + c) mod P
    step: Option<Vec<u32>>,
    /// quadratic character of each residue index
    chi: Option<Vec<i8>>,
}

/// All monic irreducibles up to a degree, with per-prime tables that turn
/// χ_D(P) into one table walk over the coefficients of D.
pub struct PrimeTable {
    q: usize,
    by_degree: Vec<Vec<PrimeEntry>>,
}

impl PrimeTable {
    pub fn new(field: &Field, max_deg: usize) -> Result<Self> {
        let q = field.q() as usize;
        let mut by_degree = vec![Vec::new()];
        for e in 1..=max_deg {
            let mut list = Vec::new();
            for p in primes(field, e) {
                let tabled = q.checked_pow(e as u32 + 1).is_some_and(|s| s <= TABLE_LIMIT);
                let (step, chi) = if tabled {
                    let (s, c) = residue_tables(&p, field)?;
                    (Some(s), Some(c))
                } else {
                    (None, None)
                };
                list.push(PrimeEntry { poly: p, step, chi });
            }
            by_degree.push(list);
        }
        Ok(PrimeTable { q, by_degree })
    }

    pub fn max_degree(&self) -> usize {
        self.by_degree.len() - 1
    }

    /// Per-degree sums s[e] = Σ_{P ∈ 𝒫_e} χ_D(P) and t[e] = Σ χ_D(P)².
    pub fn prime_sums(&self, d: &Poly, field: &Field) -> (Vec<i128>, Vec<i128>) {
        let n = self.by_degree.len();
        let mut s = vec![0i128; n];
        let mut t = vec![0i128; n];
        for (e, list) in self.by_degree.iter().enumerate().skip(1) {
            for entry in list {
                let c = match (&entry.step, &entry.chi) {
                    (Some(step), Some(chi)) => {
                        let mut r = 0usize;
                        for &c in d.coeffs().iter().rev() {
                            r = step[r * self.q + c.index()] as usize;
                        }
                        chi[r]
                    }
                    _ => chi_d(d, &entry.poly, field).expect("prime is monic"),
                };
                s[e] += c as i128;
                t[e] += (c * c) as i128;
            }
        }
        (s, t)
    }

    /// ψ_D(1..=n_max), with n_max at most the table degree.
    pub fn psi(&self, d: &Poly, n_max: usize, field: &Field) -> Vec<i128> {
        assert!(n_max <= self.max_degree(), "prime table too small");
        let (s, t) = self.prime_sums(d, field);
        psi_from_prime_sums(&s, &t, n_max)
    }
}

fn poly_index(f: &Poly, q: usize) -> usize {
    f.coeffs().iter().rev().fold(0, |acc, c| acc * q + c.index())
}

fn poly_at(n: usize, mut i: usize, q: usize) -> Poly {
    let mut c = Vec::with_capacity(n);
    for _ in 0..n {
        c.push(Fq((i % q) as u16));
        i /= q;
    }
    Poly::from_coeffs(c)
}

fn residue_tables(p: &Poly, field: &Field) -> Result<(Vec<u32>, Vec<i8>)> {
    let q = field.q() as usize;
    let d = p.deg();
    let size = q.pow(d as u32);
    let mut step = vec![0u32; size * q];
    for r in 0..size {
        let xr = poly_at(d, r, q).mul(&Poly::x(), field).rem(p, field)?;
        for c in 0..q {
            let v = xr.add(&Poly::constant(Fq(c as u16)), field);
            step[r * q + c] = poly_index(&v, q) as u32;
        }
    }
    let mut chi = vec![-1i8; size];
    chi[0] = 0;
    for r in 1..size {
        let rp = poly_at(d, r, q);
        chi[poly_index(&rp.mul(&rp, field).rem(p, field)?, q)] = 1;
    }
    Ok((step, chi))
}

/// Everything the ensemble pass extracts from one discriminant.
#[derive(Clone, Debug)]
pub struct DiscriminantStats {
    pub psi: Vec<i128>,
    pub l: LPolynomial,
    pub vanishing: bool,
    pub simple_zeros: usize,
    /// Order of the zero at u = q^{−1/2}.
    pub centre_order: usize,
}

/// ψ_D(1..=n_max), ℒ, central vanishing, simple-zero count and central
/// order for one D. The table must reach degree g.
pub fn analyse_discriminant(
    d: &Poly,
    g: usize,
    n_max: usize,
    table: &PrimeTable,
    field: &Field,
) -> Result<DiscriminantStats> {
    let low = table.psi(d, g, field);
    let l = l_from_psi(d, &low, field.q(), g)?;
    let psi = if n_max <= g { low[..n_max].to_vec() } else { psi_from_l(&l, n_max)? };
    let vanishing = {
        let (an, bn) = central_numerators(&l);
        central_vanishes(&an, &bn, l.q)
    };
    let simple_zeros =
        if g == 0 || gcd_with_derivative_degree_modp(&l.coeffs) == 0 { 2 * g } else { simple_zero_count(&l) };
    let centre_order = if vanishing { order_at_centre(&l) } else { 0 };
    Ok(DiscriminantStats { psi, l, vanishing, simple_zeros, centre_order })
}

#[derive(Clone, Debug, Default)]
struct Partial {
    h: u64,
    s1: Vec<i128>,
    s2: Vec<i128>,
    nonvanishing: u64,
    simple: u64,
    odd_centre: u64,
}

/// Exact ensemble aggregates, keyed by (field, g, Nmax).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MomentCache {
    pub field: String,
    pub g: usize,
    pub n_max: usize,
    pub h: BigInt,
    /// S1(n) = Σ_D ψ_D(n), index n − 1.
    pub s1: Vec<BigInt>,
    /// S2(n) = Σ_D ψ_D(n)², index n − 1.
    pub s2: Vec<BigInt>,
    pub nonvanishing: BigInt,
    pub simple_zeros: BigInt,
}

/// A moment cache plus the central-order parity tally from the same pass.
#[derive(Clone, Debug)]
pub struct EnsembleScan {
    pub cache: MomentCache,
    /// Discriminants whose central zero has odd order.
    pub odd_centre_orders: BigInt,
}

/// Streams H_{2g+1} once and aggregates S1, S2 and the corollary counts.
pub fn scan_ensemble(field: &Field, g: usize, n_max: usize, opts: &PassOptions) -> Result<EnsembleScan> {
    if n_max == 0 {
        return domain("Nmax must be at least 1");
    }
    let total = opts.check_budget(field.q(), g)?;
    let table = PrimeTable::new(field, g)?;
    let d = 2 * g + 1;
    let chunks = total.div_ceil(CHUNK);
    let partials: Vec<Result<Partial>> = opts.install(|| {
        (0..chunks)
            .into_par_iter()
            .map(|c| {
                let mut p = Partial { s1: vec![0; n_max], s2: vec![0; n_max], ..Partial::default() };
                let end = ((c + 1) * CHUNK).min(total);
                for idx in c * CHUNK..end {
                    let disc = monic_at(field, d, idx);
                    if !disc.is_squarefree(field)? {
                        continue;
                    }
                    let st = analyse_discriminant(&disc, g, n_max, &table, field)?;
                    p.h += 1;
                    for (n, &v) in st.psi.iter().enumerate() {
                        p.s1[n] += v;
                        p.s2[n] += v * v;
                    }
                    p.nonvanishing += u64::from(!st.vanishing);
                    p.simple += st.simple_zeros as u64;
                    p.odd_centre += u64::from(st.centre_order % 2 == 1);
                }
                Ok(p)
            })
            .collect()
    })?;
    let mut h = BigInt::zero();
    let mut s1 = vec![BigInt::zero(); n_max];
    let mut s2 = vec![BigInt::zero(); n_max];
    let (mut nonvanishing, mut simple, mut odd) = (BigInt::zero(), BigInt::zero(), BigInt::zero());
    for p in partials {
        let p = p?;
        h += p.h;
        for n in 0..n_max {
            s1[n] += p.s1[n];
            s2[n] += p.s2[n];
        }
        nonvanishing += p.nonvanishing;
        simple += p.simple;
        odd += p.odd_centre;
    }
    debug_assert_eq!(h, BigInt::from(cardinality(field.q(), d)));
    Ok(EnsembleScan {
        cache: MomentCache { field: field.spec().to_string(), g, n_max, h, s1, s2, nonvanishing, simple_zeros: simple },
        odd_centre_orders: odd,
    })
}

/// The moment cache of H_{2g+1} for ψ_D(1..=Nmax).
pub fn accumulate_moments(field: &Field, g: usize, n_max: usize, opts: &PassOptions) -> Result<MomentCache> {
    Ok(scan_ensemble(field, g, n_max, opts)?.cache)
}

#[derive(Serialize, Deserialize)]
struct CacheFile {
    format: u32,
    field: String,
    g: usize,
    #[serde(rename = "Nmax")]
    n_max: usize,
    #[serde(rename = "H")]
    h: String,
    #[serde(rename = "S1")]
    s1: Vec<String>,
    #[serde(rename = "S2")]
    s2: Vec<String>,
    nonvanishing: String,
    simple_zeros: String,
}

impl MomentCache {
    pub fn to_json(&self) -> String {
        let file = CacheFile {
            format: CACHE_FORMAT,
            field: self.field.clone(),
            g: self.g,
            n_max: self.n_max,
            h: self.h.to_string(),
            s1: self.s1.iter().map(|x| x.to_string()).collect(),
            s2: self.s2.iter().map(|x| x.to_string()).collect(),
            nonvanishing: self.nonvanishing.to_string(),
            simple_zeros: self.simple_zeros.to_string(),
        };
        let mut s = serde_json::to_string_pretty(&file).expect("cache serializes");
        s.push('\n');
        s
    }

    /// Parses and validates a cache document.
    pub fn from_json(text: &str, path: &Path) -> Result<Self> {
        let bad = |msg: String| Error::Integrity { path: path.to_path_buf(), msg };
        let file: CacheFile = serde_json::from_str(text).map_err(|e| bad(format!("malformed JSON: {e}")))?;
        if file.format != CACHE_FORMAT {
            return Err(bad(format!("format {} is not {CACHE_FORMAT}", file.format)));
        }
        let spec: FieldSpec = file.field.parse().map_err(|_| bad(format!("invalid field `{}`", file.field)))?;
        let int = |s: &str| s.parse::<BigInt>().map_err(|_| bad(format!("`{s}` is not an integer")));
        let cache = MomentCache {
            field: file.field.clone(),
            g: file.g,
            n_max: file.n_max,
            h: int(&file.h)?,
            s1: file.s1.iter().map(|s| int(s)).collect::<Result<_>>()?,
            s2: file.s2.iter().map(|s| int(s)).collect::<Result<_>>()?,
            nonvanishing: int(&file.nonvanishing)?,
            simple_zeros: int(&file.simple_zeros)?,
        };
        cache.validate(spec.q()).map_err(bad)?;
        Ok(cache)
    }

    /// Checks lengths, |H| and the trivial bounds on every aggregate.
    fn validate(&self, q: u32) -> std::result::Result<(), String> {
        if self.s1.len() != self.n_max || self.s2.len() != self.n_max {
            return Err(format!("S1/S2 must have Nmax = {} entries", self.n_max));
        }
        if self.h != BigInt::from(cardinality(q, 2 * self.g + 1)) {
            return Err(format!("H = {} is not |H_{}|", self.h, 2 * self.g + 1));
        }
        let two_g = BigInt::from(2 * self.g);
        for n in 1..=self.n_max {
            let qn = BigInt::from(q).pow(n as u32);
            // |S1(n)|² ≤ (H·2g)² q^n
            if self.s1[n - 1].pow(2) > (&self.h * &two_g).pow(2) * &qn {
                return Err(format!("S1({n}) exceeds its bound"));
            }
            if self.s2[n - 1].is_negative() || self.s2[n - 1] > &self.h * two_g.pow(2) * &qn {
                return Err(format!("S2({n}) outside [0, H(2g)²q^n]"));
            }
        }
        if self.nonvanishing.is_negative() || self.nonvanishing > self.h {
            return Err("nonvanishing count outside [0, H]".into());
        }
        if self.simple_zeros.is_negative() || self.simple_zeros > &self.h * two_g {
            return Err("simple-zero total outside [0, 2gH]".into());
        }
        Ok(())
    }

    /// File name for the cache key (field, g, Nmax).
    pub fn file_name(field: &str, g: usize, n_max: usize) -> String {
        let f: String = field.chars().map(|c| if c.is_ascii_alphanumeric() { c } else { '_' }).collect();
        format!("moments_q{f}_g{g}_N{n_max}.json")
    }

    pub fn path_in(&self, dir: &Path) -> PathBuf {
        dir.join(Self::file_name(&self.field, self.g, self.n_max))
    }

    /// Writes atomically (temporary file, then rename).
    pub fn save(&self, dir: &Path) -> Result<PathBuf> {
        fs::create_dir_all(dir)?;
        let path = self.path_in(dir);
        let tmp = dir.join(format!(".{}.tmp{}", Self::file_name(&self.field, self.g, self.n_max), std::process::id()));
        fs::write(&tmp, self.to_json())?;
        fs::rename(&tmp, &path)?;
        Ok(path)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&fs::read_to_string(path)?, path)
    }

    /// Loads the cache for a key, checking that its contents match the key.
    pub fn load_key(dir: &Path, field: &str, g: usize, n_max: usize) -> Result<Self> {
        let path = dir.join(Self::file_name(field, g, n_max));
        let c = Self::load(&path)?;
        if c.field != field || c.g != g || c.n_max != n_max {
            return Err(Error::Integrity {
                path,
                msg: format!("key mismatch: file holds field {} g {} Nmax {}", c.field, c.g, c.n_max),
            });
        }
        Ok(c)
    }
}

/// A real number a + b/√q with exact rational parts.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SurdValue {
    pub rational: BigRational,
    pub over_sqrt_q: BigRational,
}

impl SurdValue {
    pub fn to_f64(&self, q: u32) -> f64 {
        self.rational.to_f64().unwrap() + self.over_sqrt_q.to_f64().unwrap() / (q as f64).sqrt()
    }
}

fn rat(n: impl Into<BigInt>) -> BigRational {
    BigRational::from_integer(n.into())
}

fn check_support(tf: &TestFunction, cache: &MomentCache) -> Result<()> {
    if tf.support() > cache.n_max {
        return domain(format!("test-function support {} exceeds cache Nmax {}", tf.support(), cache.n_max));
    }
    Ok(())
}

/// ⟨Σ1⟩ = Φ̂(0) − (1/gH) Σ_{n≤N} Φ̂(n/2g) q^{−n/2} S1(n), exactly.
pub fn one_level_average_exact(tf: &TestFunction, cache: &MomentCache, q: u32) -> Result<SurdValue> {
    check_support(tf, cache)?;
    let zero = SurdValue { rational: BigRational::zero(), over_sqrt_q: BigRational::zero() };
    if cache.g == 0 {
        return Ok(zero);
    }
    let mut even = BigRational::zero();
    let mut odd = BigRational::zero();
    for n in 1..=tf.support() {
        let term = tf.coeff(n) * rat(cache.s1[n - 1].clone()) / rat(BigInt::from(q).pow((n / 2) as u32));
        if n % 2 == 0 {
            even += term;
        } else {
            odd += term;
        }
    }
    let scale = rat(&cache.h * BigInt::from(cache.g));
    Ok(SurdValue { rational: tf.coeff(0) - even / &scale, over_sqrt_q: -odd / scale })
}

pub fn one_level_average(tf: &TestFunction, cache: &MomentCache, q: u32) -> Result<f64> {
    Ok(one_level_average_exact(tf, cache, q)?.to_f64(q))
}

/// ⟨Σ2⟩ = Φ̂(0) + (1/2g²H) Σ_{n≤N} Φ̂(n/2g) q^{−n} S2(n), exactly.
pub fn pair_correlation_average_exact(tf: &TestFunction, cache: &MomentCache, q: u32) -> Result<BigRational> {
    check_support(tf, cache)?;
    if cache.g == 0 {
        return Ok(BigRational::zero());
    }
    let mut s = BigRational::zero();
    for n in 1..=tf.support() {
        s += tf.coeff(n) * rat(cache.s2[n - 1].clone()) / rat(BigInt::from(q).pow(n as u32));
    }
    Ok(tf.coeff(0) + s / rat(&cache.h * BigInt::from(2 * cache.g * cache.g)))
}

pub fn pair_correlation_average(tf: &TestFunction, cache: &MomentCache, q: u32) -> Result<f64> {
    Ok(pair_correlation_average_exact(tf, cache, q)?.to_f64().unwrap())
}

/// Σ1 for one D from its zeros: Σ_j Φ(2gθ_j).
pub fn sigma1_zeros(tf: &TestFunction, zeros: &ZeroSet, g: usize) -> f64 {
    zeros.angles.iter().map(|&t| tf.eval_at_angle(t, g)).sum()
}

/// Σ2 for one D from its zeros: (1/2g) Σ_{j,k} Φ(2g(θ_j − θ_k)).
pub fn sigma2_zeros(tf: &TestFunction, zeros: &ZeroSet, g: usize) -> f64 {
    if g == 0 {
        return 0.0;
    }
    let mut s = 0.0;
    for &a in &zeros.angles {
        for &b in &zeros.angles {
            s += tf.eval_at_angle(a - b, g);
        }
    }
    s / (2 * g) as f64
}

/// Σ1 for one D from its power sums: Φ̂(0) − (1/g) Σ Φ̂(n/2g) ψ_D(n) q^{−n/2}.
pub fn sigma1_explicit(tf: &TestFunction, psi: &[i128], q: u32, g: usize) -> f64 {
    if g == 0 {
        return 0.0;
    }
    let s: f64 =
        (1..=tf.support()).map(|n| tf.coeff_f64(n) * psi[n - 1] as f64 * (q as f64).powf(-(n as f64) / 2.0)).sum();
    tf.coeff_f64(0) - s / g as f64
}

/// Σ2 for one D from its power sums: Φ̂(0) + (1/2g²) Σ Φ̂(n/2g) ψ_D(n)² q^{−n}.
pub fn sigma2_explicit(tf: &TestFunction, psi: &[i128], q: u32, g: usize) -> f64 {
    if g == 0 {
        return 0.0;
    }
    let s: f64 =
        (1..=tf.support()).map(|n| tf.coeff_f64(n) * (psi[n - 1] as f64).powi(2) * (q as f64).powi(-(n as i32))).sum();
    tf.coeff_f64(0) + s / (2 * g * g) as f64
}

/// Per-D comparison of both routes.
#[derive(Clone, Debug)]
pub struct DualRoute {
    pub sigma1_zeros: f64,
    pub sigma1_explicit: f64,
    pub sigma2_zeros: f64,
    pub sigma2_explicit: f64,
}

impl DualRoute {
    pub fn max_gap(&self) -> f64 {
        (self.sigma1_zeros - self.sigma1_explicit).abs().max((self.sigma2_zeros - self.sigma2_explicit).abs())
    }
}

/// Σ1 and Σ2 for one D by both routes: zeros of ℒ against ψ_D summed over
/// primes. The table must reach degree max(g, N).
pub fn dual_route(d: &Poly, tf: &TestFunction, table: &PrimeTable, field: &Field) -> Result<DualRoute> {
    let g = crate::lfunction::genus_of(d, field)?;
    let psi = table.psi(d, tf.support().max(g), field);
    let zeros = compute_zeros(&l_from_psi(d, &psi, field.q(), g)?)?;
    Ok(DualRoute {
        sigma1_zeros: sigma1_zeros(tf, &zeros, g),
        sigma1_explicit: sigma1_explicit(tf, &psi, field.q(), g),
        sigma2_zeros: sigma2_zeros(tf, &zeros, g),
        sigma2_explicit: sigma2_explicit(tf, &psi, field.q(), g),
    })
}

/// Ensemble averages of Σ1 and Σ2 computed from extracted zeros.
pub fn zero_route_averages(tf: &TestFunction, field: &Field, g: usize, opts: &PassOptions) -> Result<(f64, f64)> {
    let total = opts.check_budget(field.q(), g)?;
    if g == 0 {
        return Ok((0.0, 0.0));
    }
    let table = PrimeTable::new(field, g)?;
    let d = 2 * g + 1;
    let chunks = total.div_ceil(CHUNK);
    let parts: Vec<Result<(f64, f64, u64)>> = opts.install(|| {
        (0..chunks)
            .into_par_iter()
            .map(|c| {
                let (mut a, mut b, mut h) = (0.0, 0.0, 0u64);
                for idx in c * CHUNK..((c + 1) * CHUNK).min(total) {
                    let disc = monic_at(field, d, idx);
                    if !disc.is_squarefree(field)? {
                        continue;
                    }
                    let st = analyse_discriminant(&disc, g, g, &table, field)?;
                    let z = compute_zeros(&st.l)?;
                    a += sigma1_zeros(tf, &z, g);
                    b += sigma2_zeros(tf, &z, g);
                    h += 1;
                }
                Ok((a, b, h))
            })
            .collect()
    })?;
    let (mut a, mut b, mut h) = (0.0, 0.0, 0u64);
    for p in parts {
        let (x, y, n) = p?;
        a += x;
        b += y;
        h += n;
    }
    Ok((a / h as f64, b / h as f64))
}

pub fn one_level_average_zeros(tf: &TestFunction, field: &Field, g: usize, opts: &PassOptions) -> Result<f64> {
    Ok(zero_route_averages(tf, field, g, opts)?.0)
}

pub fn pair_correlation_zeros(tf: &TestFunction, field: &Field, g: usize, opts: &PassOptions) -> Result<f64> {
    Ok(zero_route_averages(tf, field, g, opts)?.1)
}

/// `count` distinct members of H_{2g+1} drawn uniformly with a fixed seed,
/// returned in enumeration order.
pub fn sample_ensemble(field: &Field, g: usize, count: usize, seed: u64) -> Result<Vec<Poly>> {
    let d = 2 * g + 1;
    let total = count_monic(field.q(), d).ok_or_else(|| Error::Domain("ensemble index overflows".into()))?;
    let h = cardinality(field.q(), d).to_u64().unwrap_or(u64::MAX);
    if (count as u64) > h {
        return domain(format!("cannot sample {count} distinct members from {h}"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut picked = BTreeSet::new();
    while picked.len() < count {
        let idx = rng.gen_range(0..total);
        if monic_at(field, d, idx).is_squarefree(field)? {
            picked.insert(idx);
        }
    }
    Ok(picked.into_iter().map(|i| monic_at(field, d, i)).collect())
}

/// Outcome of re-deriving a seeded subsample of a cache.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CacheAudit {
    pub sampled: usize,
    /// D whose streamed ψ_D differs from direct prime summation.
    pub mismatches: usize,
    /// (D, n) pairs with |ψ_D(n)| > 2g q^{n/2}.
    pub bound_violations: usize,
    /// n with Σ_{sample} ψ_D(n)² > S2(n).
    pub moment_violations: usize,
}

impl CacheAudit {
    pub fn pass(&self) -> bool {
        self.mismatches == 0 && self.bound_violations == 0 && self.moment_violations == 0
    }
}

/// Recomputes ψ_D(1..=Nmax) for a seeded `fraction` of H_{2g+1} both as the
/// ensemble pass does and by summing over every prime of degree ≤ Nmax, and
/// checks the results against each other and against the cached moments.
pub fn audit_cache(cache: &MomentCache, field: &Field, fraction: f64, seed: u64) -> Result<CacheAudit> {
    if cache.field != field.spec().to_string() {
        return domain(format!("cache field {} does not match {}", cache.field, field.spec()));
    }
    let (g, n_max) = (cache.g, cache.n_max);
    let h = cache.h.to_f64().unwrap_or(f64::MAX);
    let count = ((h * fraction).ceil() as usize).clamp(1, h as usize);
    let sample = sample_ensemble(field, g, count, seed)?;
    let stream = PrimeTable::new(field, g)?;
    let prime_lists: Vec<Vec<Poly>> = (1..=n_max).map(|e| primes(field, e).collect()).collect();
    let direct = |d: &Poly| -> Result<Vec<i128>> {
        let (mut s, mut t) = (vec![0i128; n_max + 1], vec![0i128; n_max + 1]);
        for (i, ps) in prime_lists.iter().enumerate() {
            for p in ps {
                let c = chi_d(d, p, field)? as i128;
                s[i + 1] += c;
                t[i + 1] += c * c;
            }
        }
        Ok(psi_from_prime_sums(&s, &t, n_max))
    };
    let rows: Vec<(Vec<i128>, Vec<i128>)> = sample
        .par_iter()
        .map(|d| Ok((analyse_discriminant(d, g, n_max, &stream, field)?.psi, direct(d)?)))
        .collect::<Result<_>>()?;
    let mut audit = CacheAudit { sampled: count, mismatches: 0, bound_violations: 0, moment_violations: 0 };
    let mut s2 = vec![BigInt::zero(); n_max];
    for (a, b) in &rows {
        audit.mismatches += usize::from(a != b);
        for n in 1..=n_max {
            let v = BigInt::from(a[n - 1]);
            // |ψ_D(n)|² ≤ (2g)² q^n
            if v.pow(2) > BigInt::from(2 * g).pow(2) * BigInt::from(field.q()).pow(n as u32) {
                audit.bound_violations += 1;
            }
            s2[n - 1] += v.pow(2);
        }
    }
    audit.moment_violations = s2.iter().zip(&cache.s2).filter(|(a, b)| a > b).count();
    Ok(audit)
}

/// (1/|H_{2g+1}|) Σ_D χ_D(P^{2r}) exactly, via #{D ∈ H_m : P ∤ D} =
/// |H_m| − #{D ∈ H_{m−d(P)} : P ∤ D}.
pub fn chi_square_ensemble_sum(p: &Poly, g: usize, field: &Field) -> Result<BigRational> {
    if !p.is_monic() || p.deg() == 0 || !p.is_irreducible(field)? {
        return domain("P must be monic irreducible");
    }
    let m = 2 * g + 1;
    let count = coprime_count(field.q(), m as i64, p.deg() as i64);
    Ok(BigRational::new(count, BigInt::from(cardinality(field.q(), m))))
}

fn coprime_count(q: u32, m: i64, dp: i64) -> BigInt {
    if m < 0 {
        return BigInt::zero();
    }
    BigInt::from(cardinality(q, m as usize)) - coprime_count(q, m - dp, dp)
}

/// The same average by enumerating the ensemble.
pub fn chi_square_direct(p: &Poly, r: u32, g: usize, field: &Field) -> Result<BigRational> {
    let p2r = p.pow(2 * r, field);
    let mut s = BigInt::zero();
    let mut h = BigInt::zero();
    for d in hyperelliptic(field, 2 * g + 1) {
        s += chi_d(&d, &p2r, field)?;
        h += 1;
    }
    Ok(BigRational::new(s, h))
}

/// nonvanishing / H.
pub fn nonvanishing_proportion(cache: &MomentCache) -> BigRational {
    BigRational::new(cache.nonvanishing.clone(), cache.h.clone())
}

/// simple zeros / (2g·H); 1 for g = 0, where there are no zeros.
pub fn simple_zero_proportion(cache: &MomentCache) -> BigRational {
    if cache.g == 0 {
        return BigRational::one();
    }
    BigRational::new(cache.simple_zeros.clone(), &cache.h * BigInt::from(2 * cache.g))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lfunction::{l_coefficients, psi_power_sums};

    fn f3() -> Field {
        Field::new(&FieldSpec::prime(3).unwrap()).unwrap()
    }

    #[test]
    fn genus_one_cardinality_and_first_moment() {
        let f = f3();
        let c = accumulate_moments(&f, 1, 2, &PassOptions::default()).unwrap();
        assert_eq!(c.h, BigInt::from(18));
        // S1(1) = Σ_D Σ_a χ_D(x + a)
        let mut s = 0i64;
        for d in hyperelliptic(&f, 3) {
            for a in 0..3 {
                s += chi_d(&d, &Poly::from_ints(&f, &[a, 1]), &f).unwrap() as i64;
            }
        }
        assert_eq!(c.s1[0], BigInt::from(s));
        assert!(c.s2.iter().all(|x| !x.is_negative()));
    }

    #[test]
    fn table_psi_matches_direct() {
        let f = f3();
        let table = PrimeTable::new(&f, 4).unwrap();
        for d in hyperelliptic(&f, 5) {
            assert_eq!(table.psi(&d, 4, &f), psi_power_sums(&d, 4, &f).unwrap());
            let st = analyse_discriminant(&d, 2, 4, &table, &f).unwrap();
            assert_eq!(st.l, l_coefficients(&d, &f).unwrap());
        }
    }

    #[test]
    fn cache_json_round_trip() {
        let f = f3();
        let c = accumulate_moments(&f, 1, 3, &PassOptions::default()).unwrap();
        let back = MomentCache::from_json(&c.to_json(), Path::new("mem")).unwrap();
        assert_eq!(back, c);
        let mut bad = c.clone();
        bad.h += 1;
        assert!(matches!(MomentCache::from_json(&bad.to_json(), Path::new("mem")), Err(Error::Integrity { .. })));
    }

    #[test]
    fn averages_of_trivial_functions() {
        let f = f3();
        let c = accumulate_moments(&f, 1, 2, &PassOptions::default()).unwrap();
        assert_eq!(one_level_average(&TestFunction::zero(), &c, 3).unwrap(), 0.0);
        assert_eq!(one_level_average(&TestFunction::delta0(), &c, 3).unwrap(), 1.0);
        assert_eq!(pair_correlation_average(&TestFunction::zero(), &c, 3).unwrap(), 0.0);
        assert!(one_level_average(&TestFunction::fejer(4), &c, 3).is_err());
    }

    #[test]
    fn genus_zero_has_no_zeros() {
        let f = f3();
        let c = accumulate_moments(&f, 0, 2, &PassOptions::default()).unwrap();
        assert_eq!(c.h, BigInt::from(3));
        assert_eq!(one_level_average(&TestFunction::fejer(2), &c, 3).unwrap(), 0.0);
        assert_eq!(nonvanishing_proportion(&c), BigRational::one());
        assert_eq!(one_level_average_zeros(&TestFunction::fejer(2), &f, 0, &PassOptions::default()).unwrap(), 0.0);
    }

    #[test]
    fn dual_route_genus_one() {
        let f = f3();
        let tf = TestFunction::fejer(3);
        let c = accumulate_moments(&f, 1, 2, &PassOptions::default()).unwrap();
        let (z1, z2) = zero_route_averages(&tf, &f, 1, &PassOptions::default()).unwrap();
        assert!((z1 - one_level_average(&tf, &c, 3).unwrap()).abs() < 1e-9);
        assert!((z2 - pair_correlation_average(&tf, &c, 3).unwrap()).abs() < 1e-9);
    }

    #[test]
    fn chi_square_sums() {
        let f = f3();
        let v = chi_square_ensemble_sum(&Poly::x(), 1, &f).unwrap();
        assert_eq!(v, BigRational::new(7.into(), 9.into()));
        assert_eq!(chi_square_direct(&Poly::x(), 1, 1, &f).unwrap(), v);
        let dev = (v - BigRational::new(3.into(), 4.into())).abs();
        assert_eq!(dev, BigRational::new(1.into(), 36.into()));
        // no D of degree 3 is divisible by a quartic prime
        let p4 = primes(&f, 4).next().unwrap();
        assert_eq!(chi_square_ensemble_sum(&p4, 1, &f).unwrap(), BigRational::one());
    }

    #[test]
    fn budget_is_enforced() {
        let f = f3();
        let opts = PassOptions { threads: 1, budget: 100 };
        assert!(matches!(accumulate_moments(&f, 2, 2, &opts), Err(Error::Budget { required: 243, budget: 100 })));
    }

    #[test]
    fn sampling_is_reproducible() {
        let f = f3();
        let a = sample_ensemble(&f, 3, 20, 0).unwrap();
        assert_eq!(a, sample_ensemble(&f, 3, 20, 0).unwrap());
        assert!(a.iter().all(|d| d.is_squarefree(&f).unwrap() && d.deg() == 7));
    }

    #[test]
    fn cache_audit() {
        let f = f3();
        let mut c = accumulate_moments(&f, 2, 5, &PassOptions::default()).unwrap();
        let a = audit_cache(&c, &f, 0.1, 0).unwrap();
        assert_eq!(a.sampled, 17);
        assert!(a.pass(), "{a:?}");
        c.s2[4] = BigInt::zero();
        assert_eq!(audit_cache(&c, &f, 0.1, 0).unwrap().moment_violations, 1);
    }
}
