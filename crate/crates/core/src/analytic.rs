//! Numerical evaluation: primes, the Riemann zeta function, truncated Euler
//! products, the continued product built from a [`ZetaDecomposition`], pole
//! atlases and boundary scans.
//!
//! Products are accumulated as sums of principal logarithms of the local
//! factors in ascending prime order. Values and moduli do not depend on the
//! branch; reported arguments are taken modulo `2 pi`.

use std::fmt::Write as _;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive};
use serde::{Deserialize, Serialize};

use crate::char_ring::{CharParam, CharPolynomial};
use crate::error::{Error, Result};
use crate::witt::ZetaDecomposition;

pub const DEFAULT_PRIME_LIMIT: u64 = 100_000;
pub const MAX_PRIME_LIMIT: u64 = 10_000_000;
pub const DEFAULT_ZETA_TERMS: usize = 50;
pub const DEFAULT_BERNOULLI_TERMS: usize = 12;
/// Distance kept above `1/(M+1)` when evaluating the continued product.
pub const CONTINUATION_MARGIN: f64 = 0.05;
/// A local factor smaller than this in modulus counts as vanishing.
pub const VANISHING_FACTOR: f64 = 1e-14;
const MAX_SCAN_POINTS: usize = 4_000_000;

/// `B_{2k}` for `k = 1..=12`, as (numerator, denominator).
const BERNOULLI: [(f64, f64); 12] = [
    (1.0, 6.0),
    (-1.0, 30.0),
    (1.0, 42.0),
    (-1.0, 30.0),
    (5.0, 66.0),
    (-691.0, 2730.0),
    (7.0, 6.0),
    (-3617.0, 510.0),
    (43867.0, 798.0),
    (-174611.0, 330.0),
    (854513.0, 138.0),
    (-236364091.0, 2730.0),
];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvalConfig {
    /// Largest prime included in truncated products.
    pub prime_limit: u64,
    /// Decomposition level `M` used by the continued product.
    pub level: u32,
    /// Base Euler-Maclaurin cutoff; `ceil(|Im s|)` is added per call.
    pub zeta_terms: usize,
    /// Number of Bernoulli corrections `B_2 .. B_{2K}`, counted by `K`.
    pub bernoulli_terms: usize,
    /// Worker threads for grid scans. Per-point values do not depend on it.
    pub threads: usize,
}

impl Default for EvalConfig {
    fn default() -> Self {
        EvalConfig {
            prime_limit: DEFAULT_PRIME_LIMIT,
            level: crate::witt::DEFAULT_LEVEL,
            zeta_terms: DEFAULT_ZETA_TERMS,
            bernoulli_terms: DEFAULT_BERNOULLI_TERMS,
            threads: 1,
        }
    }
}

impl EvalConfig {
    pub fn with_prime_limit(mut self, p: u64) -> Self {
        self.prime_limit = p;
        self
    }

    pub fn with_level(mut self, m: u32) -> Self {
        self.level = m;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.prime_limit < 2 {
            return Err(Error::InvalidArgument(format!("prime limit must be at least 2, got {}", self.prime_limit)));
        }
        if self.prime_limit > MAX_PRIME_LIMIT {
            return Err(Error::PrimeLimitTooLarge { limit: self.prime_limit, max: MAX_PRIME_LIMIT });
        }
        if self.level == 0 || self.level > crate::witt::MAX_LEVEL {
            return Err(Error::InvalidArgument(format!(
                "level must lie in 1..={}, got {}",
                crate::witt::MAX_LEVEL,
                self.level
            )));
        }
        if self.zeta_terms < 10 {
            return Err(Error::InvalidArgument(format!("zeta terms must be at least 10, got {}", self.zeta_terms)));
        }
        if self.bernoulli_terms == 0 || self.bernoulli_terms > BERNOULLI.len() {
            return Err(Error::InvalidArgument(format!(
                "Bernoulli terms must lie in 1..={}, got {}",
                BERNOULLI.len(),
                self.bernoulli_terms
            )));
        }
        if self.threads == 0 {
            return Err(Error::InvalidArgument("threads must be at least 1".into()));
        }
        Ok(())
    }
}

/// All primes `<= limit`, ascending.
pub fn sieve_primes(limit: u64) -> Result<Vec<u64>> {
    if limit < 2 {
        return Err(Error::InvalidArgument(format!("prime limit must be at least 2, got {limit}")));
    }
    if limit > MAX_PRIME_LIMIT {
        return Err(Error::PrimeLimitTooLarge { limit, max: MAX_PRIME_LIMIT });
    }
    let n = limit as usize;
    // odd[i] stands for 2i + 1
    let mut odd = vec![true; n / 2 + 1];
    odd[0] = false;
    let mut i = 1;
    while (2 * i + 1) * (2 * i + 1) <= n {
        if odd[i] {
            let p = 2 * i + 1;
            let mut j = p * p / 2;
            while j < odd.len() {
                odd[j] = false;
                j += p;
            }
        }
        i += 1;
    }
    let mut primes = vec![2];
    primes.extend(
        odd.iter()
            .enumerate()
            .filter(|&(i, &is_p)| is_p && 2 * i < n)
            .map(|(i, _)| (2 * i + 1) as u64),
    );
    Ok(primes)
}

/// Euler-Maclaurin evaluation of `zeta(s)` on `Re(s) > -1`, `|Im(s)| <= 1000`.
pub fn riemann_zeta(s: Complex64, cfg: &EvalConfig) -> Result<Complex64> {
    if s == Complex64::new(1.0, 0.0) {
        return Err(Error::ZetaPole);
    }
    if !(s.re > -1.0) || !(s.im.abs() <= 1000.0) {
        return Err(Error::OutsideZetaRegion { re: s.re, im: s.im });
    }
    let n_terms = cfg.zeta_terms + s.im.abs().ceil() as usize;
    let n = n_terms as f64;
    let one = Complex64::new(1.0, 0.0);

    let mut sum = Complex64::new(0.0, 0.0);
    for k in 1..n_terms {
        sum += (-s * (k as f64).ln()).exp();
    }
    let ln_n = n.ln();
    let n_pow = (-s * ln_n).exp(); // N^{-s}
    sum += n_pow * n / (s - one);
    sum += n_pow * 0.5;

    // B_{2k}/(2k)! * s(s+1)...(s+2k-2) * N^{-s-2k+1}
    let mut rising = s * n_pow / n; // s * N^{-s-1}
    let mut factorial = 2.0;
    for (k, &(bn, bd)) in BERNOULLI.iter().take(cfg.bernoulli_terms).enumerate() {
        let k = k + 1;
        if k > 1 {
            let a = s + (2 * k - 3) as f64;
            let b = s + (2 * k - 2) as f64;
            rising = rising * a * b / (n * n);
            factorial *= ((2 * k - 1) * (2 * k)) as f64;
        }
        sum += rising * (bn / bd / factorial);
    }
    Ok(sum)
}

/// `f64` image of a [`CharPolynomial`] for repeated evaluation at many norms.
#[derive(Clone, Debug)]
pub(crate) struct NumericTemplate {
    coeffs: Vec<Vec<(f64, f64)>>,
}

impl NumericTemplate {
    pub(crate) fn new(h: &CharPolynomial) -> Self {
        NumericTemplate { coeffs: h.coefficients().iter().map(|c| c.numeric_terms()).collect() }
    }

    /// `H_x(u)`.
    fn local_factor(&self, x: f64, u: Complex64) -> Complex64 {
        let mut value = Complex64::new(1.0, 0.0);
        let mut power = Complex64::new(1.0, 0.0);
        for terms in &self.coeffs {
            power *= u;
            let h: Complex64 = terms.iter().map(|&(q, m)| Complex64::from_polar(m, q * x)).sum();
            value += h * power;
        }
        value
    }
}

/// `sum_N -log H_{log N}(N^{-s})` over the norms, in the given order.
pub(crate) fn log_product_over(
    norms: impl IntoIterator<Item = f64>,
    template: &NumericTemplate,
    s: Complex64,
) -> Result<Complex64> {
    accumulate_log_product(Complex64::new(0.0, 0.0), norms, template, s)
}

/// Continues a running `-sum log H` from `acc`, in the same order of
/// operations as a single pass would use.
pub(crate) fn accumulate_log_product(
    mut acc: Complex64,
    norms: impl IntoIterator<Item = f64>,
    template: &NumericTemplate,
    s: Complex64,
) -> Result<Complex64> {
    for norm in norms {
        let x = norm.ln();
        let u = (-s * x).exp();
        let f = template.local_factor(x, u);
        if f.norm() < VANISHING_FACTOR {
            return Err(Error::VanishingLocalFactor { norm });
        }
        acc -= f.ln();
    }
    Ok(acc)
}

pub(crate) fn require_absolute_convergence(s: Complex64) -> Result<()> {
    if !(s.re > 1.0) {
        return Err(Error::OutsideConvergence { re: s.re, bound: 1.0 });
    }
    Ok(())
}

/// `prod_{p <= P} H_{log p}(p^{-s})^{-1}` for `Re(s) > 1`.
pub fn euler_product_eval(h: &CharPolynomial, s: Complex64, cfg: &EvalConfig) -> Result<Complex64> {
    require_absolute_convergence(s)?;
    cfg.validate()?;
    let primes = sieve_primes(cfg.prime_limit)?;
    euler_product_over_primes(h, s, &primes)
}

pub(crate) fn euler_product_over_primes(h: &CharPolynomial, s: Complex64, primes: &[u64]) -> Result<Complex64> {
    let template = NumericTemplate::new(h);
    Ok(log_product_over(primes.iter().map(|&p| p as f64), &template, s)?.exp())
}

/// Evaluates the continued product at many points while sharing the prime
/// table and the numeric form of the decomposition.
#[derive(Clone, Debug)]
pub struct ContinuedEvaluator {
    cfg: EvalConfig,
    primes: Vec<u64>,
    template: NumericTemplate,
    factors: Vec<(u32, CharParam, f64, f64)>,
    exact: bool,
    bound: f64,
}

impl ContinuedEvaluator {
    pub fn new(h: &CharPolynomial, d: &ZetaDecomposition, cfg: &EvalConfig) -> Result<Self> {
        cfg.validate()?;
        let exact = d.is_exact_factorization();
        let primes = if exact { Vec::new() } else { sieve_primes(cfg.prime_limit)? };
        let factors = d
            .entries()
            .map(|(m, q, l)| (m, q.clone(), q.to_f64(), l.to_f64().unwrap_or(f64::NAN)))
            .collect();
        Ok(ContinuedEvaluator {
            cfg: cfg.clone(),
            primes,
            template: NumericTemplate::new(h),
            factors,
            exact,
            bound: 1.0 / (d.max_level() as f64 + 1.0) + CONTINUATION_MARGIN,
        })
    }

    /// Smallest admissible `Re(s)` (exclusive).
    pub fn bound(&self) -> f64 {
        self.bound
    }

    /// True when the local remainder is identically 1 and the value is a pure
    /// product of zeta powers.
    pub fn is_exact(&self) -> bool {
        self.exact
    }

    pub fn eval(&self, s: Complex64) -> Result<Complex64> {
        if !(s.re > self.bound) {
            return Err(Error::OutsideConvergence { re: s.re, bound: self.bound });
        }
        let mut log_value = Complex64::new(0.0, 0.0);
        for (m, q, qf, lambda) in &self.factors {
            let w = s * (*m as f64) - Complex64::new(0.0, *qf);
            let z = riemann_zeta(w, &self.cfg).map_err(|e| match e {
                Error::ZetaPole => Error::ZetaFactorPole { m: *m, q: q.to_string() },
                other => other,
            })?;
            log_value += z.ln() * *lambda;
        }
        if !self.exact {
            log_value += self.log_remainder(s)?;
        }
        Ok(log_value.exp())
    }

    fn log_remainder(&self, s: Complex64) -> Result<Complex64> {
        let mut acc = Complex64::new(0.0, 0.0);
        let one = Complex64::new(1.0, 0.0);
        for &p in &self.primes {
            let x = (p as f64).ln();
            let u = (-s * x).exp();
            let f = self.template.local_factor(x, u);
            if f.norm() < VANISHING_FACTOR {
                return Err(Error::VanishingLocalFactor { norm: p as f64 });
            }
            let mut local = -f.ln();
            for (m, _, qf, lambda) in &self.factors {
                let um = u.powu(*m);
                local += (one - Complex64::from_polar(1.0, qf * x) * um).ln() * *lambda;
            }
            acc += local;
        }
        Ok(acc)
    }
}

/// `prod zeta(ms - i q_mu)^{lambda(m, mu)}` times the truncated product of the
/// corrected local factors, valid for `Re(s) > 1/(M+1) + 0.05`.
pub fn continued_eval(h: &CharPolynomial, d: &ZetaDecomposition, s: Complex64, cfg: &EvalConfig) -> Result<Complex64> {
    ContinuedEvaluator::new(h, d, cfg)?.eval(s)
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum PoleKind {
    Pole,
    Zero,
}

/// A candidate singularity `s = (1 + i q)/m` contributed by the pole of
/// `zeta(ms - i q)^{lambda}`. Contributions from zeros of zeta are not listed.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PoleEntry {
    pub re: f64,
    pub im: f64,
    pub kind: PoleKind,
    #[serde(with = "crate::witt::bigint_serde")]
    pub order: BigInt,
    pub m: u32,
    pub q: CharParam,
    #[serde(with = "crate::witt::bigint_serde")]
    pub lambda: BigInt,
}

impl PoleEntry {
    /// `(Re s, Im s) = (1/m, q/m)` exactly.
    pub fn exact_location(&self) -> (BigRational, BigRational) {
        let m = BigRational::from_integer(BigInt::from(self.m));
        (m.recip(), self.q.value() / m)
    }
}

/// Closed axis-parallel rectangle in the `s`-plane.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Region {
    pub re_min: f64,
    pub re_max: f64,
    pub im_min: f64,
    pub im_max: f64,
}

impl Region {
    pub fn new(re_min: f64, re_max: f64, im_min: f64, im_max: f64) -> Self {
        Region { re_min, re_max, im_min, im_max }
    }

    pub fn everything() -> Self {
        Region::new(f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY)
    }

    pub fn contains(&self, re: f64, im: f64) -> bool {
        self.re_min <= re && re <= self.re_max && self.im_min <= im && im <= self.im_max
    }
}

/// One entry per table row whose point `(1 + i q)/m` lies in the region,
/// sorted by descending real part, then ascending imaginary part.
pub fn pole_atlas(d: &ZetaDecomposition, region: &Region) -> Vec<PoleEntry> {
    // ascending (m, q) is exactly descending Re then ascending Im
    d.entries()
        .filter_map(|(m, q, lambda)| {
            let re = 1.0 / m as f64;
            let im = q.to_f64() / m as f64;
            region.contains(re, im).then(|| PoleEntry {
                re,
                im,
                kind: if lambda.is_positive() { PoleKind::Pole } else { PoleKind::Zero },
                order: lambda.abs(),
                m,
                q: q.clone(),
                lambda: lambda.clone(),
            })
        })
        .collect()
}

pub fn atlas_to_csv(atlas: &[PoleEntry]) -> String {
    let mut out = String::from("re,im,kind,order,m,q,lambda\n");
    for e in atlas {
        let kind = match e.kind {
            PoleKind::Pole => "POLE",
            PoleKind::Zero => "ZERO",
        };
        let _ = writeln!(out, "{},{},{kind},{},{},{},{}", e.re, e.im, e.order, e.m, e.q, e.lambda);
    }
    out
}

/// Regular grid over a region: real parts `re_min, re_min + step, ...` up to
/// `re_max`, likewise for imaginary parts.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanGrid {
    pub region: Region,
    pub step: f64,
}

impl ScanGrid {
    fn axis(lo: f64, hi: f64, step: f64) -> Vec<f64> {
        let count = ((hi - lo) / step + 1e-9).floor() as usize + 1;
        // drop accumulated binary noise such as 0.30000000000000004
        let snap = |v: f64| format!("{v:.12}").parse::<f64>().unwrap_or(v);
        (0..count).map(|k| snap(lo + k as f64 * step)).collect()
    }

    /// Points in row-major order: imaginary part outer, real part inner.
    pub fn points(&self) -> Result<Vec<Complex64>> {
        let r = &self.region;
        if !(self.step > 0.0) || !self.step.is_finite() {
            return Err(Error::InvalidArgument(format!("grid step must be positive, got {}", self.step)));
        }
        if ![r.re_min, r.re_max, r.im_min, r.im_max].iter().all(|v| v.is_finite()) {
            return Err(Error::InvalidArgument("grid bounds must be finite".into()));
        }
        if r.re_min > r.re_max || r.im_min > r.im_max {
            return Ok(Vec::new());
        }
        let res = Self::axis(r.re_min, r.re_max, self.step);
        let ims = Self::axis(r.im_min, r.im_max, self.step);
        if res.len().saturating_mul(ims.len()) > MAX_SCAN_POINTS {
            return Err(Error::InvalidArgument(format!("grid has more than {MAX_SCAN_POINTS} points")));
        }
        Ok(ims.iter().flat_map(|&im| res.iter().map(move |&re| Complex64::new(re, im))).collect())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScanRow {
    pub s: Complex64,
    pub value: std::result::Result<Complex64, String>,
}

impl ScanRow {
    fn csv_line(&self, out: &mut String) {
        match &self.value {
            Ok(v) => {
                let _ = writeln!(out, "{},{},{},{}", self.s.re, self.s.im, v.norm(), v.arg());
            }
            Err(code) => {
                let _ = writeln!(out, "{},{},error,{code}", self.s.re, self.s.im);
            }
        }
    }
}

/// Continued product over a grid. Points where evaluation fails are kept,
/// carrying the error code.
pub fn boundary_scan(
    h: &CharPolynomial,
    d: &ZetaDecomposition,
    grid: &ScanGrid,
    cfg: &EvalConfig,
) -> Result<Vec<ScanRow>> {
    let points = grid.points()?;
    let evaluator = ContinuedEvaluator::new(h, d, cfg)?;
    let eval_point = |s: Complex64| ScanRow { s, value: evaluator.eval(s).map_err(|e| e.code().to_string()) };
    if cfg.threads <= 1 || points.len() < 2 {
        return Ok(points.into_iter().map(eval_point).collect());
    }
    let chunk = points.len().div_ceil(cfg.threads);
    let rows = std::thread::scope(|scope| {
        let handles: Vec<_> = points
            .chunks(chunk)
            .map(|part| scope.spawn(|| part.iter().map(|&s| eval_point(s)).collect::<Vec<_>>()))
            .collect();
        handles.into_iter().flat_map(|h| h.join().expect("scan worker panicked")).collect()
    });
    Ok(rows)
}

/// `re,im,abs,arg` with shortest round-trip float formatting and LF endings.
pub fn scan_to_csv(rows: &[ScanRow]) -> String {
    let mut out = String::from("re,im,abs,arg\n");
    for row in rows {
        row.csv_line(&mut out);
    }
    out
}
