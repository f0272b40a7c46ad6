//! Euler data: the ordered list of norms `N(P) > 1` a product runs over.
//!
//! The default datum is the rational primes up to a limit. Other norm systems
//! (prime ideals of a number field, prime geodesics with `N(P) = e^{length}`)
//! can be loaded from a text file with one decimal norm per line; `#` starts a
//! comment. Custom data support direct evaluation only: the zeta-factor
//! continuation is specific to the rational primes.

use std::fs;
use std::path::Path;

use num_complex::Complex64;

use crate::analytic::{self, EvalConfig, NumericTemplate};
use crate::char_ring::CharPolynomial;
use crate::error::{Error, Result};
use crate::witt::ZetaDecomposition;

#[derive(Clone, Debug, PartialEq)]
enum Source {
    RationalPrimes { limit: u64, primes: Vec<u64> },
    Custom,
}

#[derive(Clone, Debug, PartialEq)]
pub struct EulerDatum {
    label: String,
    norms: Vec<f64>,
    source: Source,
}

impl EulerDatum {
    /// The primes `p <= limit` with `N(p) = p`.
    pub fn rational_primes(limit: u64) -> Result<Self> {
        let primes = analytic::sieve_primes(limit)?;
        let norms = primes.iter().map(|&p| p as f64).collect();
        Ok(EulerDatum {
            label: format!("rational primes <= {limit}"),
            norms,
            source: Source::RationalPrimes { limit, primes },
        })
    }

    /// A custom datum; norms are sorted ascending and must all exceed 1.
    pub fn from_norms(label: impl Into<String>, mut norms: Vec<f64>) -> Result<Self> {
        if let Some((i, &v)) = norms.iter().enumerate().find(|(_, &v)| !(v > 1.0) || !v.is_finite()) {
            return Err(Error::DatumNorm { line: i + 1, value: v });
        }
        norms.sort_by(f64::total_cmp);
        Ok(EulerDatum { label: label.into(), norms, source: Source::Custom })
    }

    /// Parses the line format: one norm per line, blank lines and `#`
    /// comments ignored. Errors carry 1-based line numbers.
    pub fn parse(label: impl Into<String>, text: &str) -> Result<Self> {
        let mut norms = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let value: f64 = line
                .parse()
                .map_err(|_| Error::DatumParse { line: i + 1, message: format!("cannot parse {line:?} as a norm") })?;
            if !(value > 1.0) || !value.is_finite() {
                return Err(Error::DatumNorm { line: i + 1, value });
            }
            norms.push(value);
        }
        norms.sort_by(f64::total_cmp);
        Ok(EulerDatum { label: label.into(), norms, source: Source::Custom })
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn norms(&self) -> &[f64] {
        &self.norms
    }

    pub fn len(&self) -> usize {
        self.norms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.norms.is_empty()
    }

    pub fn is_rational_primes(&self) -> bool {
        matches!(self.source, Source::RationalPrimes { .. })
    }

    /// The prime list behind a rational-prime datum.
    pub fn primes(&self) -> Option<&[u64]> {
        match &self.source {
            Source::RationalPrimes { primes, .. } => Some(primes),
            Source::Custom => None,
        }
    }
}

/// Reads a datum file.
pub fn load_datum(path: impl AsRef<Path>) -> Result<EulerDatum> {
    let path = path.as_ref();
    let text = fs::read_to_string(path)?;
    EulerDatum::parse(path.display().to_string(), &text)
}

/// `prod_N H_{log N}(N^{-s})^{-1}` over the datum's norms, ascending.
pub fn datum_euler_product_eval(datum: &EulerDatum, h: &CharPolynomial, s: Complex64) -> Result<Complex64> {
    analytic::require_absolute_convergence(s)?;
    let template = NumericTemplate::new(h);
    Ok(analytic::log_product_over(datum.norms.iter().copied(), &template, s)?.exp())
}

/// Partial products over the first `k` norms for `k = stride, 2 stride, ...`
/// and finally the full list.
pub fn partial_products(
    datum: &EulerDatum,
    h: &CharPolynomial,
    s: Complex64,
    stride: usize,
) -> Result<Vec<(usize, Complex64)>> {
    if stride == 0 {
        return Err(Error::InvalidArgument("stride must be at least 1".into()));
    }
    analytic::require_absolute_convergence(s)?;
    let template = NumericTemplate::new(h);
    let mut out = Vec::new();
    let mut acc = Complex64::new(0.0, 0.0);
    let mut start = 0;
    while start < datum.norms.len() {
        let end = (start + stride).min(datum.norms.len());
        acc = analytic::accumulate_log_product(acc, datum.norms[start..end].iter().copied(), &template, s)?;
        out.push((end, acc.exp()));
        start = end;
    }
    Ok(out)
}

/// The continued product, available only for the rational-prime datum.
pub fn datum_continued_eval(
    datum: &EulerDatum,
    h: &CharPolynomial,
    d: &ZetaDecomposition,
    s: Complex64,
    cfg: &EvalConfig,
) -> Result<Complex64> {
    match &datum.source {
        Source::RationalPrimes { limit, .. } => {
            analytic::continued_eval(h, d, s, &cfg.clone().with_prime_limit(*limit))
        }
        Source::Custom => Err(Error::CustomDatum),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::char_ring::CharParam;
    use crate::family::build_habc;
    use crate::witt::decompose;

    fn h000() -> CharPolynomial {
        let z = CharParam::zero();
        build_habc(&z, &z, &z)
    }

    #[test]
    fn parse_plain_list() {
        let d = EulerDatum::parse("t", "2\n3\n5\n").unwrap();
        assert_eq!(d.norms(), &[2.0, 3.0, 5.0]);
        assert!(!d.is_rational_primes());
    }

    #[test]
    fn parse_comments_and_sorting() {
        let d = EulerDatum::parse("t", "# toy norms\n7.25\n\n  2.5 # smallest\n20.125\n").unwrap();
        assert_eq!(d.norms(), &[2.5, 7.25, 20.125]);
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        let err = EulerDatum::parse("t", "2\n0.5\n3\n").unwrap_err();
        assert!(matches!(err, Error::DatumNorm { line: 2, value } if value == 0.5));
        let err = EulerDatum::parse("t", "2\n# c\nabc\n").unwrap_err();
        assert!(matches!(err, Error::DatumParse { line: 3, .. }));
        assert!(EulerDatum::parse("t", "1\n").is_err());
        assert!(EulerDatum::parse("t", "inf\n").is_err());
    }

    #[test]
    fn load_from_file() {
        let dir = std::env::temp_dir().join(format!("euler-datum-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("norms.txt");
        std::fs::write(&path, "5\n2\n3\n").unwrap();
        let d = load_datum(&path).unwrap();
        assert_eq!(d.norms(), &[2.0, 3.0, 5.0]);
        assert!(load_datum(dir.join("missing.txt")).is_err());
        std::fs::remove_dir_all(&dir).unwrap();
    }

    #[test]
    fn three_primes_by_hand() {
        // (1 - p^-2)^-2 at p = 2, 3, 5: (4/3)^2 (9/8)^2 (25/24)^2 = 2.44140625
        let d = EulerDatum::parse("t", "2\n3\n5\n").unwrap();
        let v = datum_euler_product_eval(&d, &h000(), Complex64::new(2.0, 0.0)).unwrap();
        assert!((v - Complex64::new(2.44140625, 0.0)).norm() < 1e-13);
    }

    #[test]
    fn empty_datum_gives_one() {
        let d = EulerDatum::parse("t", "# nothing\n").unwrap();
        assert!(d.is_empty());
        let v = datum_euler_product_eval(&d, &h000(), Complex64::new(3.0, 1.0)).unwrap();
        assert_eq!(v, Complex64::new(1.0, 0.0));
    }

    #[test]
    fn rational_datum_is_bitwise_consistent() {
        let h = build_habc(&CharParam::zero(), &CharParam::new(1, 2), &CharParam::integer(1));
        let s = Complex64::new(2.0, 0.7);
        let d = EulerDatum::rational_primes(100_000).unwrap();
        let a = datum_euler_product_eval(&d, &h, s).unwrap();
        let b = analytic::euler_product_eval(&h, s, &EvalConfig::default()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn custom_datum_refuses_continuation() {
        let h = h000();
        let dec = decompose(&h, 3).unwrap();
        let d = EulerDatum::parse("t", "2\n3\n").unwrap();
        let err = datum_continued_eval(&d, &h, &dec, Complex64::new(0.6, 0.0), &EvalConfig::default()).unwrap_err();
        assert!(matches!(err, Error::CustomDatum));
        let primes = EulerDatum::rational_primes(1000).unwrap();
        assert!(datum_continued_eval(&primes, &h, &dec, Complex64::new(0.6, 0.0), &EvalConfig::default()).is_ok());
    }

    #[test]
    fn partial_products_approach_the_full_product() {
        let h = build_habc(&CharParam::zero(), &CharParam::zero(), &CharParam::integer(1));
        let d = EulerDatum::rational_primes(20_000).unwrap();
        let s = Complex64::new(2.0, 0.0);
        let parts = partial_products(&d, &h, s, 200).unwrap();
        assert_eq!(parts.last().unwrap().0, d.len());
        assert_eq!(parts.last().unwrap().1, datum_euler_product_eval(&d, &h, s).unwrap());
        // log H_x(p^-2) is at most about 3 p^-2 in size, so the tail after
        // the k-th norm is bounded by 3 / N_k
        let full = parts.last().unwrap().1;
        for &(k, v) in &parts {
            let tail = 3.0 / d.norms()[k - 1];
            assert!((v / full - 1.0).norm() <= tail, "k = {k}");
        }
    }

    #[test]
    fn per_norm_increments_shrink_for_equal_shifts() {
        // the increment at N is about |h_1(log N)| N^-2; with a = b the first
        // coefficient -2 chi_a has constant modulus, otherwise it oscillates
        // between |2 cos((a - b) x / 2)| and increments need not be monotone
        let specs = ["0 0 | 1", "0 0 | 0", "1/2 1/2 | 0", "-1 -1 | 1/3", "1/3 1/3 | 5"];
        let d = EulerDatum::rational_primes(5_000).unwrap();
        for text in specs {
            let h = text.parse::<crate::family::FamilySpec>().unwrap().polynomial();
            for t in [0.0, 3.0, -17.5] {
                let s = Complex64::new(2.0, t);
                let parts = partial_products(&d, &h, s, 1).unwrap();
                let mut prev = (parts[0].1 - 1.0).norm();
                for w in parts.windows(2) {
                    let step = (w[1].1 - w[0].1).norm();
                    assert!(step <= prev, "{text} at {s}: step {step} after {prev} at N = {}", w[1].0);
                    prev = step;
                }
            }
        }
    }

    #[test]
    fn refuses_critical_strip() {
        let d = EulerDatum::parse("t", "2\n").unwrap();
        assert!(datum_euler_product_eval(&d, &h000(), Complex64::new(1.0, 0.0)).is_err());
    }
}
