//! Quadrature on the positive unit hemisphere `S_+^{n-1}` against the
//! surface weight `prod theta_i^{2 gamma_i} dS`.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::grid::GammaIndex;
use crate::quadrature::{gauss_jacobi, pairwise_sum};

#[derive(Debug, Clone, PartialEq)]
pub struct SphereRule {
    gamma: GammaIndex,
    nodes: Vec<Vec<f64>>,
    weights: Vec<f64>,
}

impl SphereRule {
    /// Builds the product-of-angles rule with `points` nodes per angle.
    ///
    /// With `theta_j = cos(phi_j) prod_{i<j} sin(phi_i)` and the last
    /// coordinate a pure product of sines, angle `phi_j` carries the weight
    /// `cos^{a_j} sin^{b_j}` on `[0, pi/2]`. In `u = cos(2 phi)` that is a
    /// Gauss-Jacobi weight, so every angle gets an exact rule.
    pub fn new(gamma: GammaIndex, points: usize) -> Result<Self> {
        if points < 4 {
            return Err(Error::InvalidArgument(format!(
                "sphere rule needs at least 4 points per angle, got {points}"
            )));
        }
        let n = gamma.n();
        if n == 1 {
            return Ok(Self { gamma, nodes: vec![vec![1.0]], weights: vec![1.0] });
        }
        let g = gamma.values();
        let mut angle_rules = Vec::with_capacity(n - 1);
        for j in 0..n - 1 {
            let a = 2.0 * g[j];
            let b = (n - 2 - j) as f64 + 2.0 * g[j + 1..].iter().sum::<f64>();
            let rule = gauss_jacobi(points, 0.5 * (b - 1.0), 0.5 * (a - 1.0))?;
            let scale = 2f64.powf(-0.5 * (a + b) - 1.0);
            let cs: Vec<(f64, f64)> = rule
                .nodes
                .iter()
                .map(|u| (((1.0 + u) * 0.5).sqrt(), ((1.0 - u) * 0.5).sqrt()))
                .collect();
            let w: Vec<f64> = rule.weights.iter().map(|w| w * scale).collect();
            angle_rules.push((cs, w));
        }

        let total = points.pow((n - 1) as u32);
        let mut nodes = Vec::with_capacity(total);
        let mut weights = Vec::with_capacity(total);
        let mut idx = vec![0usize; n - 1];
        for _ in 0..total {
            let mut theta = vec![0.0; n];
            let mut sin_prod = 1.0;
            let mut w = 1.0;
            for j in 0..n - 1 {
                let (c, s) = angle_rules[j].0[idx[j]];
                theta[j] = sin_prod * c;
                sin_prod *= s;
                w *= angle_rules[j].1[idx[j]];
            }
            theta[n - 1] = sin_prod;
            nodes.push(theta);
            weights.push(w);
            for j in (0..n - 1).rev() {
                idx[j] += 1;
                if idx[j] < points {
                    break;
                }
                idx[j] = 0;
            }
        }

        let expected = gamma.sphere_measure();
        let got = pairwise_sum(&weights);
        if (got - expected).abs() > 1e-10 * expected {
            return Err(Error::Domain(format!(
                "sphere rule total weight {got} differs from m(S+) = {expected}"
            )));
        }
        Ok(Self { gamma, nodes, weights })
    }

    pub fn gamma(&self) -> &GammaIndex {
        &self.gamma
    }

    pub fn nodes(&self) -> &[Vec<f64>] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn total_weight(&self) -> f64 {
        pairwise_sum(&self.weights)
    }

    /// `int_{S_+} f(theta) prod theta_i^{2 gamma_i} dS`.
    pub fn integrate(&self, f: impl Fn(&[f64]) -> f64 + Sync) -> f64 {
        let terms: Vec<f64> = self
            .nodes
            .par_iter()
            .zip(self.weights.par_iter())
            .map(|(t, w)| w * f(t))
            .collect();
        pairwise_sum(&terms)
    }
}

pub fn build_sphere_rule(gamma: GammaIndex, points: usize) -> Result<SphereRule> {
    SphereRule::new(gamma, points)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn rule(g: &[f64], points: usize) -> SphereRule {
        SphereRule::new(GammaIndex::new(g.to_vec()).unwrap(), points).unwrap()
    }

    #[test]
    fn total_weights() {
        assert!((rule(&[0.5, 0.5], 16).total_weight() - 0.5).abs() < 1e-14);
        assert!((rule(&[0.5, 1.5], 16).total_weight() - 0.25).abs() < 1e-14);
        assert!((rule(&[1.0, 1.0], 16).total_weight() - PI / 16.0).abs() < 1e-14);
        assert!((rule(&[0.3, 0.7, 1.2], 12).total_weight()
            - GammaIndex::new(vec![0.3, 0.7, 1.2]).unwrap().sphere_measure())
        .abs()
            < 1e-13);
    }

    #[test]
    fn nodes_are_on_the_positive_sphere() {
        for t in rule(&[0.5, 1.0, 2.0], 8).nodes() {
            assert!(t.iter().all(|v| *v >= 0.0));
            assert!((t.iter().map(|v| v * v).sum::<f64>() - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn one_dimensional_rule_is_a_point() {
        let r = rule(&[0.7], 8);
        assert_eq!(r.nodes(), &[vec![1.0]]);
        assert_eq!(r.total_weight(), 1.0);
    }

    #[test]
    fn rejects_too_few_points() {
        assert!(SphereRule::new(GammaIndex::new(vec![0.5, 0.5]).unwrap(), 3).is_err());
    }

    #[test]
    fn moments_match_beta_integrals() {
        // int theta_1^2 over the weighted sphere = m(S+) (gamma_1 + 1/2)/(|gamma| + n/2)
        let g = GammaIndex::new(vec![0.5, 1.5]).unwrap();
        let r = SphereRule::new(g.clone(), 24).unwrap();
        let got = r.integrate(|t| t[0] * t[0]);
        let want = g.sphere_measure() * 1.0 / 3.0;
        assert!((got - want).abs() < 1e-14);
    }
}
