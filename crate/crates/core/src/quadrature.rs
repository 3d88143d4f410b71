//! Gauss-type quadrature rules and deterministic reductions.
//!
//! Gauss-Jacobi rules come from the Golub-Welsch construction: the nodes are
//! the eigenvalues of the symmetric Jacobi matrix of the weight
//! `(1 - t)^a (1 + t)^b`, polished by Newton steps on the orthonormal
//! recurrence, and the weights are the Christoffel numbers
//! `1 / sum_k p_k(t_i)^2`.

use crate::error::{Error, Result};
use crate::special::ln_gamma;

/// Pairwise (cascade) summation. The reduction tree depends only on the
/// slice length, so results are reproducible bit for bit.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    const BLOCK: usize = 8;
    if values.len() <= BLOCK {
        let mut s = 0.0;
        for v in values {
            s += v;
        }
        return s;
    }
    let mid = values.len() / 2;
    pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
}

/// Pairwise dot product of two equally long slices.
pub fn pairwise_dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    const BLOCK: usize = 8;
    if a.len() <= BLOCK {
        let mut s = 0.0;
        for (x, y) in a.iter().zip(b) {
            s += x * y;
        }
        return s;
    }
    let mid = a.len() / 2;
    pairwise_dot(&a[..mid], &b[..mid]) + pairwise_dot(&a[mid..], &b[mid..])
}

/// A one-dimensional quadrature rule.
#[derive(Debug, Clone, PartialEq)]
pub struct Rule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl Rule {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn total_weight(&self) -> f64 {
        pairwise_sum(&self.weights)
    }

    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        let terms: Vec<f64> = self
            .nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(x))
            .collect();
        pairwise_sum(&terms)
    }
}

/// Recurrence coefficients of the orthonormal Jacobi polynomials.
/// `diag[k]` is alpha_k and `off[k]` is sqrt(beta_{k+1}) for k = 0..n-1.
fn jacobi_recurrence(n: usize, a: f64, b: f64) -> (Vec<f64>, Vec<f64>) {
    let mut diag = Vec::with_capacity(n);
    let mut off = Vec::with_capacity(n);
    let ab = a + b;
    for k in 0..n {
        let kf = k as f64;
        let s = 2.0 * kf + ab;
        let alpha = if k == 0 {
            (b - a) / (ab + 2.0)
        } else {
            (b * b - a * a) / (s * (s + 2.0))
        };
        diag.push(alpha);
        // beta_{k+1}
        let k1 = kf + 1.0;
        let s1 = 2.0 * k1 + ab;
        let num = 4.0 * k1 * (k1 + a) * (k1 + b) * (k1 + ab);
        let den = s1 * s1 * (s1 + 1.0) * (s1 - 1.0);
        off.push((num / den).sqrt());
    }
    // k1 = 1 with a + b = -1 makes (s1 - 1) vanish together with (k1 + ab);
    // recompute that entry from the limit formula.
    if n > 0 && (ab + 1.0).abs() < 1e-14 {
        let k1 = 1.0;
        let s1 = 2.0 + ab;
        off[0] = (4.0 * (k1 + a) * (k1 + b) / (s1 * s1 * (s1 + 1.0))).sqrt();
    }
    (diag, off)
}

/// Eigenvalues of a symmetric tridiagonal matrix (implicit QL with
/// Wilkinson shifts). `e[i]` couples rows i and i+1.
fn tridiagonal_eigenvalues(mut d: Vec<f64>, e_in: &[f64]) -> Result<Vec<f64>> {
    let n = d.len();
    let mut e = vec![0.0; n];
    e[..n.saturating_sub(1)].copy_from_slice(&e_in[..n.saturating_sub(1)]);
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > 60 {
                return Err(Error::Domain("tridiagonal QL failed to converge".into()));
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut i = m;
            let mut deflated = false;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    deflated = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
            }
            if deflated {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    d.sort_by(|x, y| x.partial_cmp(y).unwrap());
    Ok(d)
}

/// Values p_0..p_{n} (orthonormal) and the derivative of p_n at `x`.
fn orthonormal_values(x: f64, n: usize, diag: &[f64], off: &[f64], p0: f64) -> (Vec<f64>, f64) {
    let mut p = Vec::with_capacity(n + 1);
    let (mut prev, mut cur) = (0.0, p0);
    let (mut dprev, mut dcur) = (0.0, 0.0);
    p.push(cur);
    for k in 0..n {
        let b_prev = if k == 0 { 0.0 } else { off[k - 1] };
        let next = ((x - diag[k]) * cur - b_prev * prev) / off[k];
        let dnext = (cur + (x - diag[k]) * dcur - b_prev * dprev) / off[k];
        prev = cur;
        cur = next;
        dprev = dcur;
        dcur = dnext;
        p.push(cur);
    }
    (p, dcur)
}

/// Gauss-Jacobi rule on [-1, 1] for the weight `(1 - t)^a (1 + t)^b`.
pub fn gauss_jacobi(n: usize, a: f64, b: f64) -> Result<Rule> {
    if n == 0 {
        return Err(Error::InvalidArgument("quadrature needs at least one node".into()));
    }
    if !(a > -1.0 && b > -1.0) {
        return Err(Error::InvalidArgument(format!(
            "Jacobi exponents must exceed -1, got a={a}, b={b}"
        )));
    }
    let (diag, off) = jacobi_recurrence(n, a, b);
    let mut nodes = tridiagonal_eigenvalues(diag.clone(), &off)?;
    let ln_mu0 = (a + b + 1.0) * std::f64::consts::LN_2 + ln_gamma(a + 1.0) + ln_gamma(b + 1.0)
        - ln_gamma(a + b + 2.0);
    let mu0 = ln_mu0.exp();
    let p0 = 1.0 / mu0.sqrt();
    let mut weights = Vec::with_capacity(n);
    for x in nodes.iter_mut() {
        for _ in 0..3 {
            let (p, dp) = orthonormal_values(*x, n, &diag, &off, p0);
            if dp == 0.0 {
                break;
            }
            let step = p[n] / dp;
            *x -= step;
            if step.abs() < 1e-17 {
                break;
            }
        }
        let (p, _) = orthonormal_values(*x, n, &diag, &off, p0);
        let s: f64 = pairwise_dot(&p[..n], &p[..n]);
        weights.push(1.0 / s);
    }
    Ok(Rule { nodes, weights })
}

/// Gauss-Legendre rule mapped to [lo, hi].
pub fn gauss_legendre(n: usize, lo: f64, hi: f64) -> Result<Rule> {
    let base = gauss_jacobi(n, 0.0, 0.0)?;
    let half = 0.5 * (hi - lo);
    let mid = 0.5 * (hi + lo);
    Ok(Rule {
        nodes: base.nodes.iter().map(|t| mid + half * t).collect(),
        weights: base.weights.iter().map(|w| w * half).collect(),
    })
}

/// Composite Gauss-Legendre rule over the consecutive breakpoints.
pub fn composite_legendre(breaks: &[f64], per_panel: usize) -> Result<Rule> {
    let base = gauss_jacobi(per_panel, 0.0, 0.0)?;
    let mut nodes = Vec::new();
    let mut weights = Vec::new();
    for w in breaks.windows(2) {
        let half = 0.5 * (w[1] - w[0]);
        let mid = 0.5 * (w[1] + w[0]);
        for (t, wt) in base.nodes.iter().zip(&base.weights) {
            nodes.push(mid + half * t);
            weights.push(wt * half);
        }
    }
    Ok(Rule { nodes, weights })
}

/// Quadrature on [0, pi] against `sin^{2 gamma - 1}(alpha)`, realized as
/// Gauss-Jacobi in `t = cos(alpha)` with weight `(1 - t^2)^{gamma - 1}`.
///
/// Returned nodes are angles in (0, pi), increasing.
pub fn jacobi_angle_rule(gamma_axis: f64, points: usize) -> Result<Rule> {
    if !(gamma_axis > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "gamma must be positive, got {gamma_axis}"
        )));
    }
    if points < 4 {
        return Err(Error::InvalidArgument(format!(
            "angle rule needs at least 4 points, got {points}"
        )));
    }
    let rule = gauss_jacobi(points, gamma_axis - 1.0, gamma_axis - 1.0)?;
    // t increasing means alpha decreasing; reverse to keep angles increasing.
    let nodes: Vec<f64> = rule.nodes.iter().rev().map(|t| t.clamp(-1.0, 1.0).acos()).collect();
    let mut weights = rule.weights;
    weights.reverse();
    Ok(Rule { nodes, weights })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special::gamma;
    use std::f64::consts::PI;

    #[test]
    fn legendre_integrates_polynomials() {
        let r = gauss_legendre(10, 0.0, 2.0).unwrap();
        let v = r.integrate(|x| x.powi(19));
        assert!((v - 2f64.powi(20) / 20.0).abs() < 1e-9 * 2f64.powi(20) / 20.0);
    }

    #[test]
    fn jacobi_weight_sum_matches_beta() {
        for &(a, b) in &[(0.0, 0.0), (-0.5, -0.5), (0.5, -0.3), (2.0, 1.0), (-0.9, 3.0)] {
            let r = gauss_jacobi(24, a, b).unwrap();
            let mu0 = 2f64.powf(a + b + 1.0) * gamma(a + 1.0).unwrap() * gamma(b + 1.0).unwrap()
                / gamma(a + b + 2.0).unwrap();
            assert!((r.total_weight() - mu0).abs() < 1e-13 * mu0, "a={a} b={b}");
        }
    }

    #[test]
    fn chebyshev_nodes_are_recovered() {
        // a = b = -1/2 gives cos((2i-1) pi / 2n) with equal weights pi/n
        let n = 16;
        let r = gauss_jacobi(n, -0.5, -0.5).unwrap();
        for (i, (x, w)) in r.nodes.iter().zip(&r.weights).enumerate() {
            let expect = ((2 * (n - i) - 1) as f64 * PI / (2 * n) as f64).cos();
            assert!((x - expect).abs() < 1e-15);
            assert!((w - PI / n as f64).abs() < 1e-14);
        }
    }

    #[test]
    fn angle_rule_sums() {
        let r = jacobi_angle_rule(0.5, 16).unwrap();
        assert!((r.total_weight() - PI).abs() < 1e-13);
        let r = jacobi_angle_rule(1.0, 16).unwrap();
        assert!((r.total_weight() - 2.0).abs() < 1e-13);
        let r = jacobi_angle_rule(1.5, 16).unwrap();
        let odd = r.integrate(|a| a.cos());
        assert!(odd.abs() < 1e-15);
    }

    #[test]
    fn angle_rule_is_symmetric() {
        let r = jacobi_angle_rule(0.3, 21).unwrap();
        let n = r.len();
        for i in 0..n {
            assert!((r.nodes[i] + r.nodes[n - 1 - i] - PI).abs() < 1e-13);
            assert!((r.weights[i] - r.weights[n - 1 - i]).abs() < 1e-13 * r.weights[i]);
        }
    }

    #[test]
    fn angle_rule_rejects_bad_input() {
        assert!(jacobi_angle_rule(0.0, 16).is_err());
        assert!(jacobi_angle_rule(1.0, 3).is_err());
    }

    #[test]
    fn pairwise_sum_is_order_stable() {
        let v: Vec<f64> = (0..1000).map(|i| 1.0 / (i as f64 + 1.0)).collect();
        assert_eq!(pairwise_sum(&v), pairwise_sum(&v.clone()));
        let plain: f64 = v.iter().sum();
        assert!((pairwise_sum(&v) - plain).abs() < 1e-12);
    }
}
