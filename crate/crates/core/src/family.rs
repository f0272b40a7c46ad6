//! The two parametrized template families and their unitarity tests.
//!
//! `H^{abc}(T) = 1 - (chi_a + chi_b) T + chi_c T^2` and, for `n >= 2`,
//!
//! ```text
//! H(T) = (1 - chi_{a_1} T)...(1 - chi_{a_n} T) + (-1)^n (chi_b - chi_{a_1+...+a_n}) T^n
//! ```
//!
//! Both are unitary exactly when `a_1 + ... + a_n = b`.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::char_ring::{CharParam, CharPolynomial, VirtualCharacter};
use crate::error::{Error, Result};

pub const DEFAULT_SAMPLE_COUNT: usize = 64;
pub const DEFAULT_WITNESS_TOL: f64 = 1e-8;

const GOLDEN_RATIO: f64 = 1.618_033_988_749_895;

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FamilyVariant {
    Abc,
    Chain,
}

/// A member of one of the families: shifts `a_1..a_n` and the top shift `b`
/// (`c` for the three-parameter family).
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct FamilySpec {
    pub variant: FamilyVariant,
    pub shifts: Vec<CharParam>,
    pub top: CharParam,
}

impl FamilySpec {
    pub fn abc(a: CharParam, b: CharParam, c: CharParam) -> Self {
        FamilySpec { variant: FamilyVariant::Abc, shifts: vec![a, b], top: c }
    }

    pub fn chain(shifts: Vec<CharParam>, b: CharParam) -> Result<Self> {
        if shifts.len() < 2 {
            return Err(Error::InvalidArgument(format!(
                "the chain family needs at least 2 shifts, got {}",
                shifts.len()
            )));
        }
        Ok(FamilySpec { variant: FamilyVariant::Chain, shifts, top: b })
    }

    /// Number of shifts, which is also the degree of the template.
    pub fn degree(&self) -> usize {
        self.shifts.len()
    }

    pub fn shift_sum(&self) -> CharParam {
        CharParam::sum(&self.shifts)
    }

    pub fn polynomial(&self) -> CharPolynomial {
        match self.variant {
            FamilyVariant::Abc => build_habc(&self.shifts[0], &self.shifts[1], &self.top),
            FamilyVariant::Chain => build_chain(&self.shifts, &self.top)
                .expect("chain specs are validated on construction"),
        }
    }
}

impl fmt::Display for FamilySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let shifts: Vec<String> = self.shifts.iter().map(ToString::to_string).collect();
        write!(f, "({} | {})", shifts.join(", "), self.top)
    }
}

impl FromStr for FamilySpec {
    type Err = Error;

    /// `"a b | c"` gives the three-parameter family, longer lists before the
    /// bar give the chain family. Separators may be spaces or commas.
    fn from_str(s: &str) -> Result<Self> {
        let (lhs, rhs) = s
            .split_once('|')
            .ok_or_else(|| Error::InvalidArgument(format!("expected \"a1 .. an | b\", got {s:?}")))?;
        let parse_list = |t: &str| -> Result<Vec<CharParam>> {
            t.split(|c: char| c.is_whitespace() || c == ',')
                .filter(|w| !w.is_empty())
                .map(str::parse)
                .collect()
        };
        let shifts = parse_list(lhs)?;
        let top = parse_list(rhs)?;
        let [top] = <[CharParam; 1]>::try_from(top)
            .map_err(|_| Error::InvalidArgument("expected exactly one shift after '|'".into()))?;
        if shifts.len() == 2 {
            let mut it = shifts.into_iter();
            Ok(FamilySpec::abc(it.next().unwrap(), it.next().unwrap(), top))
        } else {
            FamilySpec::chain(shifts, top)
        }
    }
}

/// `1 - (chi_a + chi_b) T + chi_c T^2`.
pub fn build_habc(a: &CharParam, b: &CharParam, c: &CharParam) -> CharPolynomial {
    let minus_one = BigInt::from(-1);
    let h1 = VirtualCharacter::from_terms([(a.clone(), minus_one.clone()), (b.clone(), minus_one)]);
    let h2 = VirtualCharacter::character(c.clone());
    CharPolynomial::new(vec![h1, h2]).expect("h2 is a single character")
}

/// `prod (1 - chi_{a_i} T) + (-1)^n (chi_b - chi_{sum a_i}) T^n`, built from the
/// elementary symmetric functions of the `chi_{a_i}`.
pub fn build_chain(shifts: &[CharParam], b: &CharParam) -> Result<CharPolynomial> {
    let n = shifts.len();
    if n < 2 {
        return Err(Error::InvalidArgument(format!("need n >= 2 shifts, got {n}")));
    }
    // e[k] = k-th elementary symmetric polynomial, updated one shift at a time
    let mut e = vec![VirtualCharacter::zero(); n + 1];
    e[0] = VirtualCharacter::one();
    for (i, a) in shifts.iter().enumerate() {
        for k in (1..=i + 1).rev() {
            let add = e[k - 1].shift(a);
            e[k] = &e[k] + &add;
        }
    }
    let mut coeffs: Vec<VirtualCharacter> = (1..n)
        .map(|k| if k % 2 == 1 { -&e[k] } else { e[k].clone() })
        .collect();
    let sign = if n % 2 == 0 { BigInt::from(1) } else { BigInt::from(-1) };
    coeffs.push(VirtualCharacter::monomial(b.clone(), sign));
    CharPolynomial::new(coeffs)
}

/// Exact test `a_1 + ... + a_n = b`.
pub fn is_unitary_algebraic(spec: &FamilySpec) -> bool {
    spec.shift_sum() == spec.top
}

/// A sample point at which some reciprocal root leaves the unit circle.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub x: f64,
    /// Moduli of all reciprocal roots of `H_x`, ascending.
    pub root_moduli: Vec<f64>,
    /// Arguments of the reciprocal roots that do lie on the unit circle.
    pub unit_phases: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct UnitarityVerdict {
    pub algebraic: Option<bool>,
    pub numeric_witness: Option<Witness>,
    pub samples: usize,
    pub tol: f64,
}

impl UnitarityVerdict {
    pub fn witness_found(&self) -> bool {
        self.numeric_witness.is_some()
    }
}

/// The deterministic sample points `x_k = k * phi`, `k = 1..=count`.
pub fn sample_points(count: usize) -> impl Iterator<Item = f64> {
    (1..=count).map(|k| k as f64 * GOLDEN_RATIO)
}

/// Reciprocal roots of `H_x`, failing with the offending `x`.
pub fn reciprocal_roots_at(h: &CharPolynomial, x: f64) -> Result<Vec<Complex64>> {
    h.specialize(x)
        .reciprocal_roots()
        .map_err(|e| Error::RootNotConverged { x, iterations: e.iterations })
}

/// Samples `H_x` and reports the first `x` (in sample order) at which some
/// reciprocal root has `| |beta| - 1 | > tol`.
pub fn unitarity_witness_search(h: &CharPolynomial, sample_count: usize, tol: f64) -> Result<UnitarityVerdict> {
    if sample_count == 0 {
        return Err(Error::InvalidArgument("sample count must be at least 1".into()));
    }
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument(format!("tolerance must be positive, got {tol}")));
    }
    let mut witness = None;
    for x in sample_points(sample_count) {
        let roots = reciprocal_roots_at(h, x)?;
        if roots.iter().any(|r| (r.norm() - 1.0).abs() > tol) {
            let mut root_moduli: Vec<f64> = roots.iter().map(|r| r.norm()).collect();
            root_moduli.sort_by(f64::total_cmp);
            let unit_phases = roots
                .iter()
                .filter(|r| (r.norm() - 1.0).abs() <= tol)
                .map(|r| r.arg())
                .collect();
            witness = Some(Witness { x, root_moduli, unit_phases });
            break;
        }
    }
    Ok(UnitarityVerdict { algebraic: None, numeric_witness: witness, samples: sample_count, tol })
}

/// Both tests for a family member. The algebraic result is attached, and when
/// it says unitary the numeric search must come back empty.
pub fn unitarity_verdict(spec: &FamilySpec, sample_count: usize, tol: f64) -> Result<UnitarityVerdict> {
    let algebraic = is_unitary_algebraic(spec);
    let mut verdict = unitarity_witness_search(&spec.polynomial(), sample_count, tol)?;
    if algebraic && verdict.numeric_witness.is_some() {
        return Err(Error::Consistency(format!(
            "{spec} satisfies the shift-sum condition but a root left the unit circle at x = {}",
            verdict.numeric_witness.as_ref().map_or(f64::NAN, |w| w.x)
        )));
    }
    verdict.algebraic = Some(algebraic);
    Ok(verdict)
}
