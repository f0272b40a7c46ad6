//! Dense complex polynomials and an all-roots solver.
//!
//! Degree two uses the cancellation-free quadratic formula; higher degrees use
//! Aberth-Ehrlich simultaneous iteration. A root of multiplicity `k` is only
//! resolved to about `eps^{1/k}` individually, so roots that agree to within
//! [`CLUSTER_RADIUS`] are treated as one candidate multiple root: the cluster
//! centroid is polished by Newton's method on the `(k-1)`-th derivative, where
//! the root is simple, and the polished point replaces the cluster when the
//! polynomial vanishes there to working precision. Otherwise the computed
//! roots are kept as they are. Simple roots get a final Newton step, and the
//! centres of the merged clusters are then fitted to the power sums of the
//! coefficients, so the sum of the returned roots matches `-a_1` to rounding.

use num_complex::Complex64;

pub const ROOT_TOLERANCE: f64 = 1e-12;
pub const MAX_ITERATIONS: usize = 200;
pub const CLUSTER_RADIUS: f64 = 1e-3;

/// Aberth iteration hit the iteration cap.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NoConvergence {
    pub iterations: usize,
}

/// `c_0 + c_1 T + ... + c_n T^n`, ascending order.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexPolynomial {
    coeffs: Vec<Complex64>,
}

impl ComplexPolynomial {
    pub fn new(coeffs: Vec<Complex64>) -> Self {
        ComplexPolynomial { coeffs }
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn eval(&self, t: Complex64) -> Complex64 {
        self.coeffs.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, c| acc * t + c)
    }

    pub fn mul(&self, other: &ComplexPolynomial) -> ComplexPolynomial {
        let mut out = vec![Complex64::new(0.0, 0.0); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        ComplexPolynomial { coeffs: out }
    }

    /// For `H(T) = 1 + h_1 T + ... + h_n T^n`, the `beta_j` with
    /// `H(T) = prod (1 - beta_j T)`, i.e. the roots of the monic
    /// `z^n + h_1 z^{n-1} + ... + h_n`.
    ///
    /// Panics unless the constant term is 1.
    pub fn reciprocal_roots(&self) -> Result<Vec<Complex64>, NoConvergence> {
        assert!(
            self.coeffs.first() == Some(&Complex64::new(1.0, 0.0)),
            "reciprocal roots need constant term 1"
        );
        monic_roots(&self.coeffs[1..])
    }
}

/// Roots of `z^n + a_1 z^{n-1} + ... + a_n`, given `a_1..a_n`.
pub fn monic_roots(tail: &[Complex64]) -> Result<Vec<Complex64>, NoConvergence> {
    let roots = match tail.len() {
        0 => Vec::new(),
        1 => vec![-tail[0]],
        2 => quadratic(tail[0], tail[1]).to_vec(),
        _ => aberth(tail)?,
    };
    Ok(merge_clusters(tail, roots))
}

/// Value of the `order`-th derivative of the monic polynomial with tail `tail`.
fn derivative_at(tail: &[Complex64], order: usize, z: Complex64) -> Complex64 {
    let n = tail.len();
    let mut acc = Complex64::new(0.0, 0.0);
    // coefficient of z^{n-k} is monic[k]; d^order z^e = e!/(e-order)! z^{e-order}
    for k in 0..=n {
        let e = n - k;
        if e < order {
            break;
        }
        let c = if k == 0 { Complex64::new(1.0, 0.0) } else { tail[k - 1] };
        let falling: f64 = ((e - order + 1)..=e).map(|v| v as f64).product();
        acc = acc * z + c * falling;
    }
    acc
}

fn polish_multiple_root(tail: &[Complex64], multiplicity: usize, start: Complex64) -> Option<Complex64> {
    let order = multiplicity - 1;
    let radius = CLUSTER_RADIUS * start.norm().max(1.0);
    let mut z = start;
    for _ in 0..20 {
        let f = derivative_at(tail, order, z);
        let df = derivative_at(tail, order + 1, z);
        if df.norm() == 0.0 {
            break;
        }
        let step = f / df;
        if !step.is_finite() {
            break;
        }
        z -= step;
        if step.norm() <= f64::EPSILON * z.norm().max(1.0) {
            break;
        }
    }
    if (z - start).norm() > radius {
        return None;
    }
    let n = tail.len();
    let az = z.norm();
    let bound = tail.iter().fold(1.0, |acc, c| acc * az + c.norm());
    let noise = 4.0 * (n as f64 + 1.0) * f64::EPSILON;
    (derivative_at(tail, 0, z).norm() <= 64.0 * noise * bound).then_some(z)
}

fn quadratic(p: Complex64, q: Complex64) -> [Complex64; 2] {
    let d = (p * p - 4.0 * q).sqrt();
    // pick the sign that avoids cancellation in -p -/+ d
    let z1 = if (p.conj() * d).re >= 0.0 { (-p - d) * 0.5 } else { (-p + d) * 0.5 };
    if z1.norm() == 0.0 {
        return [z1, z1];
    }
    [z1, q / z1]
}

fn aberth(tail: &[Complex64]) -> Result<Vec<Complex64>, NoConvergence> {
    let n = tail.len();
    let mut monic = Vec::with_capacity(n + 1);
    monic.push(Complex64::new(1.0, 0.0));
    monic.extend_from_slice(tail);

    // monic[k] multiplies z^{n-k}
    let eval = |z: Complex64| -> (Complex64, Complex64, f64) {
        let mut p = Complex64::new(0.0, 0.0);
        let mut dp = Complex64::new(0.0, 0.0);
        let mut bound = 0.0;
        let az = z.norm();
        for c in &monic {
            dp = dp * z + p;
            p = p * z + c;
            bound = bound * az + c.norm();
        }
        (p, dp, bound)
    };

    let radius = tail
        .iter()
        .enumerate()
        .map(|(k, c)| c.norm().powf(1.0 / (k + 1) as f64))
        .fold(0.0f64, f64::max)
        .max(1e-3);
    let mut z: Vec<Complex64> = (0..n)
        .map(|j| Complex64::from_polar(radius, std::f64::consts::TAU * j as f64 / n as f64 + 0.4))
        .collect();

    let noise = 4.0 * (n as f64 + 1.0) * f64::EPSILON;
    for iteration in 1..=MAX_ITERATIONS {
        let mut converged = true;
        for i in 0..n {
            let (p, dp, bound) = eval(z[i]);
            if p.norm() <= noise * bound {
                continue;
            }
            let ratio = p / dp;
            let repulsion: Complex64 = (0..n)
                .filter(|&j| j != i)
                .map(|j| {
                    let d = z[i] - z[j];
                    if d.norm() == 0.0 { Complex64::new(0.0, 0.0) } else { d.inv() }
                })
                .sum();
            let mut step = ratio / (Complex64::new(1.0, 0.0) - ratio * repulsion);
            if !step.is_finite() {
                step = Complex64::from_polar(radius * 1e-3, iteration as f64);
            }
            z[i] -= step;
            if step.norm() > ROOT_TOLERANCE * z[i].norm().max(1.0) {
                converged = false;
            }
        }
        if converged {
            return Ok(z);
        }
    }
    Err(NoConvergence { iterations: MAX_ITERATIONS })
}

fn merge_clusters(tail: &[Complex64], mut roots: Vec<Complex64>) -> Vec<Complex64> {
    let n = roots.len();
    let mut label: Vec<usize> = (0..n).collect();
    fn find(label: &mut [usize], mut i: usize) -> usize {
        while label[i] != i {
            label[i] = label[label[i]];
            i = label[i];
        }
        i
    }
    for i in 0..n {
        for j in (i + 1)..n {
            let scale = roots[i].norm().max(roots[j].norm()).max(1.0);
            if (roots[i] - roots[j]).norm() <= CLUSTER_RADIUS * scale {
                let (a, b) = (find(&mut label, i), find(&mut label, j));
                label[a.max(b)] = a.min(b);
            }
        }
    }
    let mut sums = vec![(Complex64::new(0.0, 0.0), 0usize); n];
    for i in 0..n {
        let r = find(&mut label, i);
        sums[r].0 += roots[i];
        sums[r].1 += 1;
    }
    let mut polished = vec![None; n];
    let mut multiple = vec![false; n];
    for i in 0..n {
        let r = find(&mut label, i);
        let (sum, count) = sums[r];
        if count > 1 {
            let z = *polished[r].get_or_insert_with(|| polish_multiple_root(tail, count, sum / count as f64));
            if let Some(z) = z {
                roots[i] = z;
                multiple[i] = true;
            }
        }
    }
    for i in 0..n {
        if !multiple[i] {
            roots[i] = polish_simple_root(tail, roots[i]);
        }
    }
    let mut clusters: Vec<(usize, usize)> = Vec::new();
    for i in 0..n {
        let r = find(&mut label, i);
        if multiple[i] && r == i {
            clusters.push((i, sums[r].1));
        }
    }
    if let Some(means) = fit_power_sums(tail, &roots, &multiple, &clusters) {
        for i in 0..n {
            if multiple[i] {
                let r = find(&mut label, i);
                let at = clusters.iter().position(|&(c, _)| c == r).expect("every multiple root has a cluster");
                roots[i] = means[at];
            }
        }
    }
    roots
}

fn polish_simple_root(tail: &[Complex64], start: Complex64) -> Complex64 {
    let residual = |z: Complex64| derivative_at(tail, 0, z).norm();
    let mut best = (residual(start), start);
    let mut z = start;
    for _ in 0..8 {
        let d = derivative_at(tail, 1, z);
        if d.norm() == 0.0 {
            break;
        }
        z -= derivative_at(tail, 0, z) / d;
        let r = residual(z);
        if r < best.0 {
            best = (r, z);
        } else {
            break;
        }
    }
    if (best.1 - start).norm() <= CLUSTER_RADIUS * start.norm().max(1.0) {
        best.1
    } else {
        start
    }
}

/// Moves the centres of the multiple roots so that the first `clusters.len()`
/// power sums of all roots match the ones fixed by the coefficients. The
/// centre found on a derivative is off by the square of the (rounding-sized)
/// split of the cluster times the pull of the other roots; the power sums are
/// linear in the coefficients and carry no such error.
fn fit_power_sums(
    tail: &[Complex64],
    roots: &[Complex64],
    multiple: &[bool],
    clusters: &[(usize, usize)],
) -> Option<Vec<Complex64>> {
    let c = clusters.len();
    if c == 0 {
        return None;
    }
    let zero = Complex64::new(0.0, 0.0);
    // Newton's identities for z^n + a_1 z^{n-1} + ... + a_n
    let mut power = vec![zero; c + 1];
    for j in 1..=c {
        let mut pj = -(j as f64) * tail.get(j - 1).copied().unwrap_or(zero);
        for i in 1..j {
            pj -= tail[i - 1] * power[j - i];
        }
        power[j] = pj;
    }
    let mut target = power;
    for (z, _) in roots.iter().zip(multiple).filter(|(_, m)| !**m) {
        let mut zj = *z;
        for t in target.iter_mut().skip(1) {
            *t -= zj;
            zj *= z;
        }
    }
    let start: Vec<Complex64> = clusters.iter().map(|&(i, _)| roots[i]).collect();
    let mut m = start.clone();
    for _ in 0..8 {
        let mut jac = vec![vec![zero; c]; c];
        let mut rhs = vec![zero; c];
        for j in 1..=c {
            let mut f = -target[j];
            for (at, &(_, k)) in clusters.iter().enumerate() {
                let k = k as f64;
                f += k * m[at].powu(j as u32);
                jac[j - 1][at] = k * j as f64 * m[at].powu(j as u32 - 1);
            }
            rhs[j - 1] = -f;
        }
        let step = solve(jac, rhs)?;
        let size: f64 = step.iter().map(|d| d.norm()).fold(0.0, f64::max);
        for (x, d) in m.iter_mut().zip(&step) {
            *x += d;
        }
        if size <= f64::EPSILON * m.iter().map(|x| x.norm()).fold(1.0, f64::max) {
            break;
        }
    }
    let stays = m
        .iter()
        .zip(&start)
        .all(|(x, s)| (x - s).norm() <= CLUSTER_RADIUS * s.norm().max(1.0));
    stays.then_some(m)
}

/// Gaussian elimination with partial pivoting; `None` for a singular system.
fn solve(mut a: Vec<Vec<Complex64>>, mut b: Vec<Complex64>) -> Option<Vec<Complex64>> {
    let n = b.len();
    for col in 0..n {
        let pivot = (col..n).max_by(|&i, &j| a[i][col].norm().total_cmp(&a[j][col].norm()))?;
        if a[pivot][col].norm() == 0.0 {
            return None;
        }
        a.swap(col, pivot);
        b.swap(col, pivot);
        for row in (col + 1)..n {
            let f = a[row][col] / a[col][col];
            for k in col..n {
                let v = a[col][k];
                a[row][k] -= f * v;
            }
            let v = b[col];
            b[row] -= f * v;
        }
    }
    let mut x = vec![Complex64::new(0.0, 0.0); n];
    for row in (0..n).rev() {
        let mut v = b[row];
        for k in (row + 1)..n {
            v -= a[row][k] * x[k];
        }
        x[row] = v / a[row][row];
    }
    Some(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn from_roots(roots: &[Complex64]) -> Vec<Complex64> {
        // coefficients a_1..a_n of prod (z - r)
        let mut p = vec![c(1.0, 0.0)];
        for r in roots {
            let mut next = vec![c(0.0, 0.0); p.len() + 1];
            for (k, a) in p.iter().enumerate() {
                next[k] += a;
                next[k + 1] -= a * r;
            }
            p = next;
        }
        p.remove(0);
        p
    }

    fn assert_same_roots(mut got: Vec<Complex64>, mut want: Vec<Complex64>, tol: f64) {
        let key = |z: &Complex64| (z.re * 1e6).round() as i64 * 1_000_000_000 + (z.im * 1e6).round() as i64;
        got.sort_by_key(key);
        want.sort_by_key(key);
        for (g, w) in got.iter().zip(&want) {
            assert!((g - w).norm() < tol, "{got:?} vs {want:?}");
        }
    }

    #[test]
    fn quadratic_by_hand() {
        // 1 - 2T - T^2: T = -1 +- sqrt 2, reciprocal roots 1 +- sqrt 2
        let h = ComplexPolynomial::new(vec![c(1.0, 0.0), c(-2.0, 0.0), c(-1.0, 0.0)]);
        let beta = h.reciprocal_roots().unwrap();
        let s = 2f64.sqrt();
        assert_same_roots(beta, vec![c(1.0 + s, 0.0), c(1.0 - s, 0.0)], 1e-14);
    }

    #[test]
    fn double_root_is_merged_exactly() {
        let u = Complex64::from_polar(1.0, 0.7);
        let tail = from_roots(&[u, u]);
        for r in monic_roots(&tail).unwrap() {
            assert!((r.norm() - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn cubic_with_triple_root() {
        let tail = from_roots(&[c(1.0, 0.0); 3]);
        let roots = monic_roots(&tail).unwrap();
        assert_eq!(roots.len(), 3);
        for r in roots {
            assert!((r - c(1.0, 0.0)).norm() < 1e-12, "{r}");
        }
    }

    #[test]
    fn quadruple_unimodular_root() {
        let u = Complex64::from_polar(1.0, -2.1);
        let roots = monic_roots(&from_roots(&[u; 4])).unwrap();
        assert_eq!(roots.len(), 4);
        for r in roots {
            assert!((r - u).norm() < 1e-12, "{r}");
        }
    }

    #[test]
    fn double_and_simple_roots() {
        let u = Complex64::from_polar(1.0, 0.4);
        let want = vec![u, u, c(-2.0, 0.5)];
        let roots = monic_roots(&from_roots(&want)).unwrap();
        assert_same_roots(roots, want, 1e-12);
    }

    #[test]
    fn quartic_distinct_roots() {
        let want = vec![c(2.0, 1.0), c(-0.5, 0.0), c(0.0, -3.0), Complex64::from_polar(1.0, 2.0)];
        let roots = monic_roots(&from_roots(&want)).unwrap();
        assert_same_roots(roots, want, 1e-11);
    }

    #[test]
    fn nearby_unimodular_roots_are_not_pulled_inward() {
        let want = vec![Complex64::from_polar(1.0, 0.3), Complex64::from_polar(1.0, 0.3002), c(-1.0, 0.0)];
        let roots = monic_roots(&from_roots(&want)).unwrap();
        for r in roots {
            assert!((r.norm() - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn crowded_double_root_keeps_the_root_sum() {
        // a double root within 0.05 of two simple ones, all on the unit circle
        let x: f64 = 71.19349550499538;
        let e = |q: f64| Complex64::from_polar(1.0, q * x);
        let want = [e(3.0), e(3.0), e(1.5), e(-3.0)];
        let got = monic_roots(&from_roots(&want)).unwrap();
        let sum: Complex64 = got.iter().sum::<Complex64>() - want.iter().sum::<Complex64>();
        let product: Complex64 = got.iter().product::<Complex64>() - want.iter().product::<Complex64>();
        assert!(sum.norm() < 1e-12 && product.norm() < 1e-12, "{got:?}");
        assert_same_roots(got, want.to_vec(), 1e-9);
    }
}
