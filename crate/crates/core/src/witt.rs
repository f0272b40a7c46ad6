//! Level-by-level factorization
//!
//! ```text
//! H(T) = prod_{m <= M} prod_mu (1 - chi_mu T^m)^{lambda(m, mu)}   (mod T^{M+1})
//! ```
//!
//! computed exactly in `R(R)[[T]]`. Each factor `(1 - chi_mu T^m)` turns into
//! `zeta(ms - i q_mu)` in the Euler product, so the table is what carries the
//! continuation into `Re(s) > 1/(M+1)`. A unitary template stops after level 1;
//! anything else leaves nonzero exponents at some level `m >= 2`.

use std::collections::BTreeMap;
use std::fmt::{self, Write as _};

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::char_ring::{CharParam, CharPolynomial, VirtualCharacter};
use crate::error::{Error, Result};
use crate::family::{self, FamilySpec, Witness};

pub const DEFAULT_LEVEL: u32 = 6;
pub const MAX_LEVEL: u32 = 12;

/// A power series in `T` over `R(R)`, truncated after `T^order`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct TruncatedSeries {
    coeffs: Vec<VirtualCharacter>,
}

impl TruncatedSeries {
    pub fn one(order: u32) -> Self {
        let mut coeffs = vec![VirtualCharacter::zero(); order as usize + 1];
        coeffs[0] = VirtualCharacter::one();
        TruncatedSeries { coeffs }
    }

    /// `H mod T^{order+1}`.
    pub fn from_polynomial(h: &CharPolynomial, order: u32) -> Self {
        let coeffs = (0..=order as usize).map(|k| h.coeff(k)).collect();
        TruncatedSeries { coeffs }
    }

    pub fn order(&self) -> u32 {
        (self.coeffs.len() - 1) as u32
    }

    pub fn coeff(&self, k: usize) -> &VirtualCharacter {
        &self.coeffs[k]
    }

    pub fn coefficients(&self) -> &[VirtualCharacter] {
        &self.coeffs
    }

    pub fn is_one(&self) -> bool {
        self.coeffs[0] == VirtualCharacter::one() && self.coeffs[1..].iter().all(VirtualCharacter::is_zero)
    }

    pub fn mul(&self, other: &TruncatedSeries) -> TruncatedSeries {
        let n = self.coeffs.len().min(other.coeffs.len());
        let mut out = vec![VirtualCharacter::zero(); n];
        for (i, a) in self.coeffs.iter().enumerate().take(n) {
            for (j, b) in other.coeffs.iter().enumerate().take(n - i) {
                out[i + j] = &out[i + j] + &(a * b);
            }
        }
        TruncatedSeries { coeffs: out }
    }

    /// Multiplies in place by `(1 - chi_mu T^level)^exponent` for any integer
    /// exponent, using the integral binomial series.
    pub fn mul_binomial(&mut self, level: u32, mu: &CharParam, exponent: &BigInt) {
        let level = level as usize;
        let len = self.coeffs.len();
        let max_j = (len - 1) / level;
        if max_j == 0 || exponent.is_zero() {
            return;
        }
        // terms[j] = binom(exponent, j) (-1)^j, shift j*mu
        let mut terms = Vec::with_capacity(max_j + 1);
        let mut binom = BigInt::one();
        for j in 0..=max_j {
            if j > 0 {
                binom = binom * (exponent - BigInt::from(j - 1)) / BigInt::from(j);
                if binom.is_zero() {
                    break;
                }
            }
            let signed = if j % 2 == 0 { binom.clone() } else { -&binom };
            terms.push((signed, mu.scaled(j as i64)));
        }
        let mut out = vec![VirtualCharacter::zero(); len];
        for (t, slot) in out.iter_mut().enumerate() {
            for (j, (k, shift)) in terms.iter().enumerate() {
                if j * level > t {
                    break;
                }
                self.coeffs[t - j * level].add_shifted_into(slot, shift, k);
            }
        }
        self.coeffs = out;
    }
}

/// The exponent table `(m, mu) -> lambda(m, mu)` up to `max_level`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ZetaDecomposition {
    max_level: u32,
    source_degree: usize,
    table: BTreeMap<(u32, CharParam), BigInt>,
}

/// One row of the exponent table.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct ZetaFactor {
    pub m: u32,
    pub q: CharParam,
    #[serde(with = "bigint_serde")]
    pub lambda: BigInt,
}

pub(crate) mod bigint_serde {
    use num_bigint::BigInt;
    use serde::{Deserialize, Deserializer, Serializer};

    // small values stay JSON numbers; anything beyond i64 becomes a string
    pub fn serialize<S: Serializer>(v: &BigInt, s: S) -> Result<S::Ok, S::Error> {
        match i64::try_from(v) {
            Ok(small) => s.serialize_i64(small),
            Err(_) => s.collect_str(v),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigInt, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Either {
            Small(i64),
            Big(String),
        }
        match Either::deserialize(d)? {
            Either::Small(v) => Ok(v.into()),
            Either::Big(s) => s.parse().map_err(serde::de::Error::custom),
        }
    }
}

impl ZetaDecomposition {
    pub fn from_factors(max_level: u32, source_degree: usize, factors: impl IntoIterator<Item = ZetaFactor>) -> Self {
        let mut table = BTreeMap::new();
        for f in factors {
            if !f.lambda.is_zero() {
                table.insert((f.m, f.q), f.lambda);
            }
        }
        ZetaDecomposition { max_level, source_degree, table }
    }

    pub fn max_level(&self) -> u32 {
        self.max_level
    }

    pub fn source_degree(&self) -> usize {
        self.source_degree
    }

    pub fn is_empty(&self) -> bool {
        self.table.is_empty()
    }

    pub fn len(&self) -> usize {
        self.table.len()
    }

    pub fn lambda(&self, m: u32, mu: &CharParam) -> BigInt {
        self.table.get(&(m, mu.clone())).cloned().unwrap_or_else(BigInt::zero)
    }

    /// Entries sorted by `(m, mu)`.
    pub fn entries(&self) -> impl Iterator<Item = (u32, &CharParam, &BigInt)> {
        self.table.iter().map(|((m, q), l)| (*m, q, l))
    }

    pub fn factors(&self) -> Vec<ZetaFactor> {
        self.entries()
            .map(|(m, q, l)| ZetaFactor { m, q: q.clone(), lambda: l.clone() })
            .collect()
    }

    /// `sum_mu lambda(m, mu) chi_mu`.
    pub fn level(&self, m: u32) -> VirtualCharacter {
        VirtualCharacter::from_terms(
            self.entries().filter(|(k, _, _)| *k == m).map(|(_, q, l)| (q.clone(), l.clone())),
        )
    }

    /// Smallest level `>= 2` carrying a nonzero exponent.
    pub fn first_higher_level(&self) -> Option<u32> {
        self.entries().map(|(m, _, _)| m).find(|&m| m >= 2)
    }

    pub fn terminates_at_level_one(&self) -> bool {
        self.first_higher_level().is_none()
    }

    /// True when the table multiplies out to `H` itself rather than just
    /// `H mod T^{M+1}`: all exponents positive, total degree within `M`, and
    /// the source polynomial no longer than `M`. In that case every corrected
    /// local factor of the continuation is identically 1.
    pub fn is_exact_factorization(&self) -> bool {
        let mut degree = BigInt::zero();
        for (m, _, l) in self.entries() {
            if !l.is_positive() {
                return false;
            }
            degree += l * BigInt::from(m);
        }
        self.source_degree <= self.max_level as usize && degree <= BigInt::from(self.max_level)
    }

    /// Fixed-width text table, one row per entry.
    pub fn to_text_table(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{:>3}  {:>12}  {:>14}", "m", "q", "lambda");
        for (m, q, l) in self.entries() {
            let _ = writeln!(out, "{m:>3}  {:>12}  {:>14}", q.to_string(), l.to_string());
        }
        out
    }
}

impl Serialize for ZetaDecomposition {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Repr {
            max_level: u32,
            source_degree: usize,
            factors: Vec<ZetaFactor>,
        }
        Repr { max_level: self.max_level, source_degree: self.source_degree, factors: self.factors() }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for ZetaDecomposition {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Repr {
            max_level: u32,
            source_degree: usize,
            factors: Vec<ZetaFactor>,
        }
        let r = Repr::deserialize(d)?;
        Ok(ZetaDecomposition::from_factors(r.max_level, r.source_degree, r.factors))
    }
}

fn check_level(level: u32) -> Result<()> {
    if level == 0 || level > MAX_LEVEL {
        return Err(Error::InvalidArgument(format!("level M must lie in 1..={MAX_LEVEL}, got {level}")));
    }
    Ok(())
}

/// Peels `H` level by level: at level `m` the coefficient `c_m` of the
/// remaining series gives `lambda(m, mu) = -mult(chi_mu in c_m)`, and the new
/// factors are divided out before moving on.
pub fn decompose(h: &CharPolynomial, max_level: u32) -> Result<ZetaDecomposition> {
    check_level(max_level)?;
    let order = max_level as usize;
    let mut series = TruncatedSeries::from_polynomial(h, max_level);
    let mut table = BTreeMap::new();
    for m in 1..=max_level {
        let c = std::mem::take(&mut series.coeffs[m as usize]);
        if c.is_zero() {
            continue;
        }
        let level: Vec<(CharParam, BigInt)> = c.terms().map(|(q, k)| (q.clone(), -k)).collect();
        if 2 * m as usize <= order {
            // restore and divide by prod (1 - chi_mu T^m)^lambda; for 2m > M the
            // division only clears c_m, which is already taken
            series.coeffs[m as usize] = c;
            for (mu, lambda) in &level {
                series.mul_binomial(m, mu, &-lambda);
            }
            if !series.coeffs[m as usize].is_zero() {
                return Err(Error::Consistency(format!("level {m} did not cancel during peeling")));
            }
        }
        for (mu, lambda) in level {
            table.insert((m, mu), lambda);
        }
    }
    Ok(ZetaDecomposition { max_level, source_degree: h.degree(), table })
}

/// Expands the product of the table's factors modulo `T^{M+1}`.
pub fn reconstruct(d: &ZetaDecomposition) -> TruncatedSeries {
    let mut series = TruncatedSeries::one(d.max_level);
    for (m, mu, lambda) in d.entries() {
        series.mul_binomial(m, mu, lambda);
    }
    series
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum RigidityVerdict {
    EntireMeromorphic,
    NaturalBoundary,
}

impl fmt::Display for RigidityVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RigidityVerdict::EntireMeromorphic => "ENTIRE_MEROMORPHIC",
            RigidityVerdict::NaturalBoundary => "NATURAL_BOUNDARY",
        })
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct RigidityReport {
    pub spec: FamilySpec,
    pub verdict: RigidityVerdict,
    pub algebraic_unitary: bool,
    pub numeric_witness: Option<Witness>,
    /// First level `m >= 2` with a nonzero exponent.
    pub first_higher_level: Option<u32>,
    /// For the entire case, the zeta product the Euler product equals.
    pub identification: Option<String>,
    pub decomposition: ZetaDecomposition,
}

/// Decides entire meromorphy versus natural boundary for a family member and
/// cross-checks the algebraic test, the decomposition and the root sampling.
/// Any disagreement is reported as [`Error::Consistency`].
pub fn classify_rigidity(spec: &FamilySpec, max_level: u32) -> Result<RigidityReport> {
    classify_rigidity_with(spec, max_level, family::DEFAULT_SAMPLE_COUNT, family::DEFAULT_WITNESS_TOL)
}

pub fn classify_rigidity_with(
    spec: &FamilySpec,
    max_level: u32,
    sample_count: usize,
    tol: f64,
) -> Result<RigidityReport> {
    if max_level < 2 {
        return Err(Error::InvalidArgument(format!("classification needs M >= 2, got {max_level}")));
    }
    if (max_level as usize) < spec.degree() {
        return Err(Error::InvalidArgument(format!(
            "level M = {max_level} cannot see a degree-{} template; use M >= {}",
            spec.degree(),
            spec.degree()
        )));
    }
    let h = spec.polynomial();
    let algebraic = family::is_unitary_algebraic(spec);
    let decomposition = decompose(&h, max_level)?;
    let search = family::unitarity_witness_search(&h, sample_count, tol)?;
    let first_higher_level = decomposition.first_higher_level();
    let witness = search.numeric_witness;

    let verdict = if algebraic {
        if let Some(m) = first_higher_level {
            return Err(Error::Consistency(format!("{spec} is unitary but level {m} is nonzero")));
        }
        if let Some(w) = &witness {
            return Err(Error::Consistency(format!("{spec} is unitary but sampling found a witness at x = {}", w.x)));
        }
        let expected = VirtualCharacter::from_terms(spec.shifts.iter().map(|a| (a.clone(), 1)));
        if decomposition.level(1) != expected {
            return Err(Error::Consistency(format!("{spec}: level 1 is not the list of shifts")));
        }
        RigidityVerdict::EntireMeromorphic
    } else {
        if first_higher_level.is_none() {
            return Err(Error::Consistency(format!("{spec} is not unitary but the decomposition terminates")));
        }
        if witness.is_none() {
            return Err(Error::Consistency(format!("{spec} is not unitary but no sample left the unit circle")));
        }
        RigidityVerdict::NaturalBoundary
    };
    let identification = (verdict == RigidityVerdict::EntireMeromorphic).then(|| shifted_zeta_product(&spec.shifts));
    Ok(RigidityReport {
        spec: spec.clone(),
        verdict,
        algebraic_unitary: algebraic,
        numeric_witness: witness,
        first_higher_level,
        identification,
        decomposition,
    })
}

/// Renders level-1 entries as `zeta(s-i/2)zeta(s+i)` and so on.
pub fn zeta_product_name(d: &ZetaDecomposition) -> String {
    let mut out = String::new();
    for (m, q, l) in d.entries() {
        let arg = if m == 1 { "s".to_string() } else { format!("{m}s") };
        let shift = shift_suffix(q);
        let _ = write!(out, "ζ({arg}{shift})");
        if !l.is_one() {
            let _ = write!(out, "^{l}");
        }
    }
    if out.is_empty() {
        out.push('1');
    }
    out
}

/// `zeta(s - i a_1) ... zeta(s - i a_n)` in the order the shifts are given,
/// repeated shifts collected into a power at their first position.
pub fn shifted_zeta_product(shifts: &[CharParam]) -> String {
    let mut seen: Vec<(&CharParam, usize)> = Vec::new();
    for a in shifts {
        match seen.iter_mut().find(|(b, _)| *b == a) {
            Some(slot) => slot.1 += 1,
            None => seen.push((a, 1)),
        }
    }
    let mut out = String::new();
    for (a, k) in seen {
        let _ = write!(out, "ζ(s{})", shift_suffix(a));
        if k > 1 {
            let _ = write!(out, "^{k}");
        }
    }
    out
}

/// `-i q` written compactly: `q = 1/2` gives `-i/2`, `q = -3` gives `+3i`.
fn shift_suffix(q: &CharParam) -> String {
    if q.is_zero() {
        return String::new();
    }
    let r = q.value();
    let sign = if r.is_negative() { '+' } else { '-' };
    let n = r.numer().abs();
    let d = r.denom();
    let num = if n.is_one() { "i".to_string() } else { format!("{n}i") };
    if d.is_one() {
        format!("{sign}{num}")
    } else {
        format!("{sign}{num}/{d}")
    }
}

impl ZetaFactor {
    pub fn lambda_f64(&self) -> f64 {
        self.lambda.to_f64().unwrap_or(f64::NAN)
    }
}
