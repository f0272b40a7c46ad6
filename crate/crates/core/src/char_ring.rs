//! Exact arithmetic in the virtual character ring `R(R)`.
//!
//! A unitary character of the additive group `R` is `chi_a(x) = e^{ax}` with
//! `a = iq` purely imaginary. Shifts are carried as exact rationals `q`, so the
//! relation `chi_a chi_b = chi_{a+b}` and every equality test between shifts is
//! exact. Irrational shifts are not representable.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::de::{self, Deserializer, SeqAccess, Visitor};
use serde::ser::{SerializeSeq, Serializer};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::roots::ComplexPolynomial;

/// The shift `q` of the character `x -> e^{iqx}`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct CharParam(BigRational);

impl CharParam {
    pub fn new(numer: i64, denom: i64) -> Self {
        assert!(denom != 0, "zero denominator");
        CharParam(BigRational::new(numer.into(), denom.into()))
    }

    pub fn integer(n: i64) -> Self {
        CharParam(BigRational::from_integer(n.into()))
    }

    pub fn zero() -> Self {
        CharParam(BigRational::zero())
    }

    pub fn from_rational(q: BigRational) -> Self {
        CharParam(q)
    }

    pub fn value(&self) -> &BigRational {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or(f64::NAN)
    }

    pub fn scaled(&self, k: i64) -> CharParam {
        CharParam(&self.0 * BigRational::from_integer(k.into()))
    }

    pub fn sum<'a>(params: impl IntoIterator<Item = &'a CharParam>) -> CharParam {
        params.into_iter().fold(CharParam::zero(), |acc, q| &acc + q)
    }
}

impl<'a> Add<&'a CharParam> for &'a CharParam {
    type Output = CharParam;
    fn add(self, rhs: &'a CharParam) -> CharParam {
        CharParam(&self.0 + &rhs.0)
    }
}

impl fmt::Display for CharParam {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl FromStr for CharParam {
    type Err = Error;

    /// Accepts `p`, `p/q`, `-p/q` (ASCII or U+2212 minus). Decimals are rejected
    /// so that every shift stays an exact rational.
    fn from_str(s: &str) -> Result<Self> {
        let err = || Error::ParseRational(s.to_string());
        let t = s.trim().replace('\u{2212}', "-");
        let (neg, body) = match t.strip_prefix('-') {
            Some(rest) => (true, rest),
            None => (false, t.strip_prefix('+').unwrap_or(&t)),
        };
        let digits = |x: &str| !x.is_empty() && x.bytes().all(|b| b.is_ascii_digit());
        let (num, den) = match body.split_once('/') {
            Some((n, d)) if digits(n) && digits(d) => (n, d),
            None if digits(body) => (body, "1"),
            _ => return Err(err()),
        };
        let num: BigInt = num.parse().map_err(|_| err())?;
        let den: BigInt = den.parse().map_err(|_| err())?;
        if den.is_zero() {
            return Err(err());
        }
        let q = BigRational::new(if neg { -num } else { num }, den);
        Ok(CharParam(q))
    }
}

impl Serialize for CharParam {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for CharParam {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(de::Error::custom)
    }
}

/// A finite integer combination `sum m(q) chi_{iq}`.
///
/// Zero multiplicities are never stored, so structural equality is ring
/// equality. Keys are ordered by rational value.
#[derive(Clone, PartialEq, Eq, Hash, Default, Debug)]
pub struct VirtualCharacter {
    terms: BTreeMap<CharParam, BigInt>,
}

impl VirtualCharacter {
    pub fn zero() -> Self {
        Self::default()
    }

    /// The trivial character `chi_0`.
    pub fn one() -> Self {
        Self::character(CharParam::zero())
    }

    pub fn character(q: CharParam) -> Self {
        Self::monomial(q, BigInt::one())
    }

    pub fn monomial(q: CharParam, m: BigInt) -> Self {
        let mut v = Self::zero();
        v.add_term(q, m);
        v
    }

    pub fn from_terms<I, M>(terms: I) -> Self
    where
        I: IntoIterator<Item = (CharParam, M)>,
        M: Into<BigInt>,
    {
        let mut v = Self::zero();
        for (q, m) in terms {
            v.add_term(q, m.into());
        }
        v
    }

    /// Adds `m chi_q` in place, dropping the key if it cancels.
    pub fn add_term(&mut self, q: CharParam, m: BigInt) {
        if m.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(q) {
            Entry::Vacant(e) => {
                e.insert(m);
            }
            Entry::Occupied(mut e) => {
                *e.get_mut() += m;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&CharParam, &BigInt)> {
        self.terms.iter()
    }

    pub fn multiplicity(&self, q: &CharParam) -> BigInt {
        self.terms.get(q).cloned().unwrap_or_else(BigInt::zero)
    }

    /// Multiplies by the integer `k`.
    pub fn scale(&self, k: &BigInt) -> Self {
        if k.is_zero() {
            return Self::zero();
        }
        VirtualCharacter {
            terms: self.terms.iter().map(|(q, m)| (q.clone(), m * k)).collect(),
        }
    }

    /// Multiplies by the single character `chi_shift`.
    pub fn shift(&self, shift: &CharParam) -> Self {
        VirtualCharacter {
            terms: self.terms.iter().map(|(q, m)| (q + shift, m.clone())).collect(),
        }
    }

    /// Accumulates `k * chi_shift * self` into `acc`.
    pub(crate) fn add_shifted_into(&self, acc: &mut VirtualCharacter, shift: &CharParam, k: &BigInt) {
        if k.is_zero() {
            return;
        }
        for (q, m) in &self.terms {
            acc.add_term(q + shift, m * k);
        }
    }

    /// Evaluates `sum m(q) e^{iqx}`.
    pub fn evaluate(&self, x: f64) -> Complex64 {
        self.terms
            .iter()
            .map(|(q, m)| Complex64::from_polar(1.0, q.to_f64() * x) * m.to_f64().unwrap_or(f64::NAN))
            .sum()
    }

    /// Shifts and `f64` multiplicities for fast repeated numeric evaluation.
    pub fn numeric_terms(&self) -> Vec<(f64, f64)> {
        self.terms
            .iter()
            .map(|(q, m)| (q.to_f64(), m.to_f64().unwrap_or(f64::NAN)))
            .collect()
    }

    /// Largest absolute multiplicity, zero for the empty element.
    pub fn max_abs_multiplicity(&self) -> BigInt {
        self.terms.values().map(|m| m.abs()).max().unwrap_or_else(BigInt::zero)
    }
}

impl Add for &VirtualCharacter {
    type Output = VirtualCharacter;
    fn add(self, rhs: &VirtualCharacter) -> VirtualCharacter {
        let mut out = self.clone();
        for (q, m) in &rhs.terms {
            out.add_term(q.clone(), m.clone());
        }
        out
    }
}

impl Sub for &VirtualCharacter {
    type Output = VirtualCharacter;
    fn sub(self, rhs: &VirtualCharacter) -> VirtualCharacter {
        let mut out = self.clone();
        for (q, m) in &rhs.terms {
            out.add_term(q.clone(), -m);
        }
        out
    }
}

impl Neg for &VirtualCharacter {
    type Output = VirtualCharacter;
    fn neg(self) -> VirtualCharacter {
        VirtualCharacter {
            terms: self.terms.iter().map(|(q, m)| (q.clone(), -m)).collect(),
        }
    }
}

impl Mul for &VirtualCharacter {
    type Output = VirtualCharacter;
    fn mul(self, rhs: &VirtualCharacter) -> VirtualCharacter {
        let mut out = VirtualCharacter::zero();
        for (q, m) in &rhs.terms {
            self.add_shifted_into(&mut out, q, m);
        }
        out
    }
}

macro_rules! forward_owned {
    ($tr:ident, $f:ident) => {
        impl $tr for VirtualCharacter {
            type Output = VirtualCharacter;
            fn $f(self, rhs: VirtualCharacter) -> VirtualCharacter {
                (&self).$f(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl fmt::Display for VirtualCharacter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (q, m)) in self.terms.iter().enumerate() {
            let sign = if m.is_negative() { "-" } else { "+" };
            if i == 0 {
                if m.is_negative() {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            let a = m.abs();
            if !a.is_one() {
                write!(f, "{a}")?;
            }
            write!(f, "chi[{q}]")?;
        }
        Ok(())
    }
}

/// Serialized as a sorted list of `"q=p/r: m"` strings.
impl Serialize for VirtualCharacter {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut seq = serializer.serialize_seq(Some(self.terms.len()))?;
        for (q, m) in &self.terms {
            seq.serialize_element(&format!("q={q}: {m}"))?;
        }
        seq.end()
    }
}

impl<'de> Deserialize<'de> for VirtualCharacter {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        struct TermsVisitor;

        impl<'de> Visitor<'de> for TermsVisitor {
            type Value = VirtualCharacter;

            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a list of \"q=p/r: m\" strings")
            }

            fn visit_seq<A: SeqAccess<'de>>(self, mut seq: A) -> std::result::Result<Self::Value, A::Error> {
                let mut v = VirtualCharacter::zero();
                while let Some(item) = seq.next_element::<String>()? {
                    let (q, m) = item
                        .strip_prefix("q=")
                        .and_then(|rest| rest.split_once(':'))
                        .ok_or_else(|| de::Error::custom(format!("malformed term {item:?}")))?;
                    let q: CharParam = q.parse().map_err(de::Error::custom)?;
                    let m: BigInt = m.trim().parse().map_err(de::Error::custom)?;
                    v.add_term(q, m);
                }
                Ok(v)
            }
        }

        deserializer.deserialize_seq(TermsVisitor)
    }
}

/// `H(T) = 1 + h_1 T + ... + h_n T^n` with coefficients in `R(R)`.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct CharPolynomial {
    /// `h_1..h_n`; the constant term is implicitly `chi_0`.
    coeffs: Vec<VirtualCharacter>,
}

impl CharPolynomial {
    /// Builds `1 + sum h_k T^k` from `h_1..h_n`. The top coefficient must be
    /// nonzero so that the degree is what was constructed.
    pub fn new(coeffs: Vec<VirtualCharacter>) -> Result<Self> {
        match coeffs.last() {
            None => Err(Error::InvalidArgument("polynomial degree must be at least 1".into())),
            Some(top) if top.is_zero() => Err(Error::InvalidArgument(
                "leading coefficient of the polynomial is zero".into(),
            )),
            Some(_) => Ok(CharPolynomial { coeffs }),
        }
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len()
    }

    /// Coefficient of `T^k`; `k = 0` gives the unit.
    pub fn coeff(&self, k: usize) -> VirtualCharacter {
        match k {
            0 => VirtualCharacter::one(),
            k if k <= self.coeffs.len() => self.coeffs[k - 1].clone(),
            _ => VirtualCharacter::zero(),
        }
    }

    /// `h_1..h_n`.
    pub fn coefficients(&self) -> &[VirtualCharacter] {
        &self.coeffs
    }

    /// All coefficients `h_0..h_n`.
    pub fn full_coefficients(&self) -> Vec<VirtualCharacter> {
        (0..=self.degree()).map(|k| self.coeff(k)).collect()
    }

    pub fn mul(&self, other: &CharPolynomial) -> CharPolynomial {
        let a = self.full_coefficients();
        let b = other.full_coefficients();
        let mut out = vec![VirtualCharacter::zero(); a.len() + b.len() - 1];
        for (i, ai) in a.iter().enumerate() {
            for (j, bj) in b.iter().enumerate() {
                out[i + j] = &out[i + j] + &(ai * bj);
            }
        }
        while out.len() > 1 && out.last().is_some_and(VirtualCharacter::is_zero) {
            out.pop();
        }
        out.remove(0);
        CharPolynomial { coeffs: out }
    }

    /// `H_x(T) = sum h_m(x) T^m`, with constant term exactly 1.
    pub fn specialize(&self, x: f64) -> ComplexPolynomial {
        let mut coeffs = Vec::with_capacity(self.degree() + 1);
        coeffs.push(Complex64::new(1.0, 0.0));
        coeffs.extend(self.coeffs.iter().map(|h| h.evaluate(x)));
        ComplexPolynomial::new(coeffs)
    }
}

impl fmt::Display for CharPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "1")?;
        for (k, h) in self.coeffs.iter().enumerate() {
            if !h.is_zero() {
                write!(f, " + ({h}) T^{}", k + 1)?;
            }
        }
        Ok(())
    }
}
