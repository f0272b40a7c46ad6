//! Reference computations used by the integration tests. Nothing here calls
//! into the crate's algebra or numerics: characters are `i128` multiplicities
//! over `Rational64` frequencies, exponent tables come from power sums, and
//! `zeta` is summed directly.

#![allow(dead_code)]

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::Rational64;
use num_traits::{ToPrimitive, Zero};
use rand::Rng;

use euler_rigidity::{CharPolynomial, FamilySpec, VirtualCharacter, ZetaDecomposition};

pub type Q = Rational64;
/// `sum n_q chi_q` as a map `q -> n_q` without zero entries.
pub type Elem = BTreeMap<Q, i128>;

pub fn q(n: i64, d: i64) -> Q {
    Q::new(n, d)
}

pub fn add_term(e: &mut Elem, at: Q, n: i128) {
    let slot = e.entry(at).or_insert(0);
    *slot = slot.checked_add(n).expect("oracle coefficient overflow");
    if *slot == 0 {
        e.remove(&at);
    }
}

pub fn mul(a: &Elem, b: &Elem) -> Elem {
    let mut out = Elem::new();
    for (qa, na) in a {
        for (qb, nb) in b {
            add_term(&mut out, qa + qb, na.checked_mul(*nb).expect("oracle coefficient overflow"));
        }
    }
    out
}

pub fn scale(a: &Elem, k: i128) -> Elem {
    let mut out = Elem::new();
    for (q, n) in a {
        add_term(&mut out, *q, n * k);
    }
    out
}

/// `Psi_j`: every frequency multiplied by `j`.
pub fn adams(a: &Elem, j: i64) -> Elem {
    let mut out = Elem::new();
    for (q, n) in a {
        add_term(&mut out, q * Q::from_integer(j), *n);
    }
    out
}

pub fn chi(at: Q) -> Elem {
    Elem::from([(at, 1)])
}

/// `1 + h_1 T + ... + h_n T^n` as the list `h_0 = 1, h_1, ..., h_n` for
/// `prod (1 - chi_{a_i} T) + (-1)^n (chi_b - chi_{sum a}) T^n`.
pub fn family_coefficients(shifts: &[Q], top: Q) -> Vec<Elem> {
    let n = shifts.len();
    let mut poly = vec![chi(Q::zero())];
    for &a in shifts {
        let mut next = vec![Elem::new(); poly.len() + 1];
        for (k, c) in poly.iter().enumerate() {
            for (q, m) in c {
                add_term(&mut next[k], *q, *m);
                add_term(&mut next[k + 1], q + a, -m);
            }
        }
        poly = next;
    }
    let sign = if n % 2 == 0 { 1 } else { -1 };
    let sum: Q = shifts.iter().sum();
    add_term(&mut poly[n], top, sign);
    add_term(&mut poly[n], sum, -sign);
    poly
}

fn to_q(v: &num_rational::BigRational) -> Q {
    Q::new(v.numer().to_i64().unwrap(), v.denom().to_i64().unwrap())
}

pub fn from_library(v: &VirtualCharacter) -> Elem {
    let mut out = Elem::new();
    for (q, n) in v.terms() {
        add_term(&mut out, to_q(q.value()), n.to_i128().unwrap());
    }
    out
}

pub fn library_coefficients(h: &CharPolynomial) -> Vec<Elem> {
    let mut out = vec![chi(Q::zero())];
    out.extend(h.coefficients().iter().map(from_library));
    out
}

pub type Table = BTreeMap<(u32, Q), i128>;

pub fn library_table(d: &ZetaDecomposition) -> Table {
    d.entries()
        .map(|(m, q, l)| ((m, to_q(q.value())), l.to_i128().unwrap()))
        .collect()
}

/// Exponents `lambda(m, mu)` with `H = prod (1 - chi_mu T^m)^{lambda}` mod
/// `T^{order+1}`, via power sums. If `H_x = prod (1 - beta_i T)` then
/// `p_k = sum beta_i^k` obeys Newton's identity
/// `p_k = -k h_k - sum_{i<k} h_i p_{k-i}`, and taking logarithms of the
/// product form gives `p_k = sum_{m | k} m Psi_{k/m}(Lambda_m)` with
/// `Lambda_m = sum_mu lambda(m, mu) chi_mu`. `None` if some `Lambda_m` is not
/// integral.
pub fn exponents_by_power_sums(h: &[Elem], order: u32) -> Option<Table> {
    let order = order as usize;
    let coeff = |k: usize| h.get(k).cloned().unwrap_or_default();
    let mut p: Vec<Elem> = vec![Elem::new(); order + 1];
    for k in 1..=order {
        let mut pk = scale(&coeff(k), -(k as i128));
        for i in 1..k {
            for (q, n) in mul(&coeff(i), &p[k - i]) {
                add_term(&mut pk, q, -n);
            }
        }
        p[k] = pk;
    }
    let mut levels: Vec<Elem> = vec![Elem::new(); order + 1];
    let mut table = Table::new();
    for k in 1..=order {
        let mut rest = p[k].clone();
        for m in (1..k).filter(|m| k % m == 0) {
            for (q, n) in adams(&levels[m], (k / m) as i64) {
                add_term(&mut rest, q, -(m as i128) * n);
            }
        }
        let mut level = Elem::new();
        for (q, n) in rest {
            if n % k as i128 != 0 {
                return None;
            }
            add_term(&mut level, q, n / k as i128);
            table.insert((k as u32, q), n / k as i128);
        }
        levels[k] = level;
    }
    Some(table)
}

/// `prod (1 - chi_mu T^m)^{lambda}` mod `T^{order+1}`, coefficients `0..=order`.
pub fn expand_product(table: &Table, order: u32) -> Vec<Elem> {
    let order = order as usize;
    let mut series = vec![Elem::new(); order + 1];
    series[0] = chi(Q::zero());
    for (&(m, mu), &lambda) in table {
        let m = m as usize;
        // (1 - x)^lambda = sum_j binom(lambda, j) (-x)^j
        let mut factor = vec![Elem::new(); order + 1];
        let mut binom: i128 = 1;
        for j in 0..=order / m {
            let sign = if j % 2 == 0 { 1 } else { -1 };
            add_term(&mut factor[j * m], mu * Q::from_integer(j as i64), sign * binom);
            binom = binom * (lambda - j as i128) / (j as i128 + 1);
        }
        let mut next = vec![Elem::new(); order + 1];
        for (i, a) in series.iter().enumerate() {
            for (j, b) in factor.iter().enumerate().take(order + 1 - i) {
                for (q, n) in mul(a, b) {
                    add_term(&mut next[i + j], q, n);
                }
            }
        }
        series = next;
    }
    series
}

/// `sum_{n <= N} n^{-s} + N^{1-s}/(s-1) - N^{-s}/2 + s N^{-s-1}/12` for real
/// `s > 1`; the error is below `s (s+1) (s+2) N^{-s-3} / 720`.
pub fn zeta_direct(s: f64, terms: u64) -> f64 {
    let head: f64 = (1..=terms).rev().map(|n| (n as f64).powf(-s)).sum();
    let n = terms as f64;
    head + n.powf(1.0 - s) / (s - 1.0) - 0.5 * n.powf(-s) + s * n.powf(-s - 1.0) / 12.0
}

/// `zeta(s) = eta(s) / (1 - 2^{1-s})` with Borwein's acceleration of the
/// alternating series for `eta`. Accurate to about `1e-14` relative for
/// `Re(s) > 0`, `|Im(s)| <= 40`, away from the zeros of `1 - 2^{1-s}`.
pub fn zeta_alternating(s: Complex64) -> Complex64 {
    const N: usize = 80;
    // d_k = n sum_{i <= k} (n + i - 1)! 4^i / ((n - i)! (2i)!), as a running sum
    let mut d = Vec::with_capacity(N + 1);
    let mut term = 1.0 / N as f64;
    let mut acc = 0.0;
    for i in 0..=N {
        if i > 0 {
            let i_f = i as f64;
            term *= 4.0 * (N as f64 + i_f - 1.0) * (N as f64 - i_f + 1.0) / ((2.0 * i_f - 1.0) * (2.0 * i_f));
        }
        acc += term;
        d.push(acc * N as f64);
    }
    let dn = d[N];
    let mut eta = Complex64::new(0.0, 0.0);
    for k in (0..N).rev() {
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        let power = (-s * ((k + 1) as f64).ln()).exp();
        eta += sign * (dn - d[k]) * power;
    }
    eta /= dn;
    eta / (1.0 - (Complex64::new(1.0, 0.0) - s).expf(2.0))
}

pub fn random_shift(rng: &mut impl Rng) -> Q {
    q(rng.gen_range(-5..=5), rng.gen_range(1..=4))
}

/// A random member of degree `2..=max_degree`; half of the draws use the
/// three-parameter family.
pub fn random_member(rng: &mut impl Rng, max_degree: usize, unitary: bool) -> (Vec<Q>, Q) {
    let n = if rng.gen_bool(0.5) { 2 } else { rng.gen_range(2..=max_degree) };
    let shifts: Vec<Q> = (0..n).map(|_| random_shift(rng)).collect();
    let sum: Q = shifts.iter().sum();
    let top = if unitary {
        sum
    } else {
        let mut t = random_shift(rng);
        while t == sum {
            t = random_shift(rng);
        }
        t
    };
    (shifts, top)
}

pub fn family_spec(shifts: &[Q], top: Q) -> FamilySpec {
    let list: Vec<String> = shifts.iter().map(ToString::to_string).collect();
    format!("{} | {top}", list.join(" ")).parse().expect("oracle specs are well formed")
}

pub fn bigint(n: i128) -> BigInt {
    BigInt::from(n)
}
