//! Fourier-Bessel transform on tensor grids and the closed forms it is
//! checked against.
//!
//! `F_B f(y) = c * int f(x) prod j_{gamma_i - 1/2}(x_i y_i) d mu_gamma(x)` with
//! `c = prod [2^{gamma_i - 1/2} Gamma(gamma_i + 1/2)]^{-1}`. With this constant
//! the transform is its own inverse.

use std::sync::Arc;

use ndarray::Array2;

use crate::error::{check_dim, Error, Result};
use crate::grid::{contract_axis, GammaIndex, GridFunction, TensorGrid};
use crate::poly::{apply_bessel, EvenPoly};
use crate::quadrature::{gauss_legendre, pairwise_sum};
use crate::special::{gamma as gamma_fn, normalized_j, BesselOrder};
use crate::sphere::SphereRule;

#[derive(Debug, Clone)]
pub struct FBPlan {
    gamma: GammaIndex,
    input: Arc<TensorGrid>,
    output: Arc<TensorGrid>,
    c_fb: f64,
    // forward[i][(b, a)] = j(y_b x_a) * w_a on axis i
    forward: Vec<Array2<f64>>,
    inverse: Vec<Array2<f64>>,
}

fn kernel_matrix(gamma_axis: f64, rows: &[f64], cols: &[f64], col_weights: &[f64]) -> Array2<f64> {
    let order = BesselOrder::from_gamma(gamma_axis).expect("gamma_i > 0");
    Array2::from_shape_fn((rows.len(), cols.len()), |(b, a)| {
        normalized_j(order, rows[b] * cols[a]).expect("nonnegative argument") * col_weights[a]
    })
}

impl FBPlan {
    /// Plan between a spatial grid and a frequency grid with the same gamma.
    /// Fails when the round trip on `exp(-|x|^2)` is worse than `1e-6`.
    pub fn new(input: Arc<TensorGrid>, output: Arc<TensorGrid>) -> Result<Self> {
        let plan = Self::unchecked(input, output)?;
        let err = plan.round_trip_error();
        if !(err < 1e-6) {
            return Err(Error::Domain(format!("transform round trip error {err:e} exceeds 1e-6")));
        }
        Ok(plan)
    }

    /// Plan without the round-trip test. The forward transform is still a
    /// Gauss rule on the input grid; only the inverse may be unresolved.
    pub fn unchecked(input: Arc<TensorGrid>, output: Arc<TensorGrid>) -> Result<Self> {
        if input.gamma() != output.gamma() {
            return Err(Error::GridMismatch("spatial and frequency grids use different gamma".into()));
        }
        let gamma = input.gamma().clone();
        let c_fb = gamma.fourier_constant();
        let mut forward = Vec::with_capacity(gamma.n());
        let mut inverse = Vec::with_capacity(gamma.n());
        for (i, &g) in gamma.values().iter().enumerate() {
            let (xa, ya) = (input.axis(i), output.axis(i));
            forward.push(kernel_matrix(g, &ya.nodes, &xa.nodes, &xa.weights));
            inverse.push(kernel_matrix(g, &xa.nodes, &ya.nodes, &ya.weights));
        }
        Ok(Self { gamma, input, output, c_fb, forward, inverse })
    }

    /// Plan with a frequency grid of the same size reaching `1.5 * x_max`, so
    /// the transform of a unit Gaussian has decayed below `1e-15` at its edge.
    pub fn with_default_frequency(grid: Arc<TensorGrid>) -> Result<Self> {
        Self::new(grid.clone(), Arc::new(frequency_grid(&grid)?))
    }

    /// Plan whose frequency grid is the spatial grid itself.
    pub fn symmetric(grid: Arc<TensorGrid>) -> Result<Self> {
        Self::new(grid.clone(), grid)
    }

    pub fn gamma(&self) -> &GammaIndex {
        &self.gamma
    }

    pub fn input_grid(&self) -> &Arc<TensorGrid> {
        &self.input
    }

    pub fn output_grid(&self) -> &Arc<TensorGrid> {
        &self.output
    }

    pub fn c_fb(&self) -> f64 {
        self.c_fb
    }

    /// Max abs error of inverse(forward(exp(-|x|^2))) on the spatial grid.
    pub fn round_trip_error(&self) -> f64 {
        let f = GridFunction::from_fn(self.input.clone(), |x| (-x.iter().map(|v| v * v).sum::<f64>()).exp());
        let back = self.apply(f.values(), &self.forward);
        let back = self.apply(&back, &self.inverse);
        f.values().iter().zip(back.iter()).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()))
    }

    fn apply(&self, values: &ndarray::ArrayD<f64>, mats: &[Array2<f64>]) -> ndarray::ArrayD<f64> {
        let mut acc = values.clone();
        for (i, m) in mats.iter().enumerate() {
            acc = contract_axis(&acc, i, m);
        }
        acc.mapv_inplace(|v| v * self.c_fb);
        acc
    }
}

pub fn frequency_grid(spatial: &TensorGrid) -> Result<TensorGrid> {
    TensorGrid::new(spatial.gamma().clone(), 1.5 * spatial.x_max(), spatial.axis(0).len())
}

pub fn fb_forward(plan: &FBPlan, f: &GridFunction) -> Result<GridFunction> {
    if f.grid().as_ref() != plan.input.as_ref() {
        return Err(Error::GridMismatch("function is not on the plan's spatial grid".into()));
    }
    GridFunction::new(plan.output.clone(), plan.apply(f.values(), &plan.forward))
}

/// Inverse transform. Uses the same constant as the forward transform; the
/// round trip is the identity under this normalization.
pub fn fb_inverse(plan: &FBPlan, g: &GridFunction) -> Result<GridFunction> {
    if g.grid().as_ref() != plan.output.as_ref() {
        return Err(Error::GridMismatch("function is not on the plan's frequency grid".into()));
    }
    GridFunction::new(plan.input.clone(), plan.apply(g.values(), &plan.inverse))
}

/// Transform of a sampled function at one arbitrary frequency.
pub fn fb_forward_at(f: &GridFunction, y: &[f64]) -> Result<f64> {
    let grid = f.grid();
    check_dim(grid.n(), y.len())?;
    let mut acc = f.values().clone();
    for i in (0..grid.n()).rev() {
        let axis = grid.axis(i);
        let order = BesselOrder::from_gamma(grid.gamma().values()[i])?;
        let row: Vec<f64> = axis
            .nodes
            .iter()
            .zip(&axis.weights)
            .map(|(x, w)| normalized_j(order, x * y[i]).map(|j| j * w))
            .collect::<Result<_>>()?;
        let m = Array2::from_shape_vec((1, row.len()), row).expect("row");
        acc = contract_axis(&acc, i, &m);
    }
    Ok(grid.gamma().fourier_constant() * acc.iter().next().copied().unwrap_or(0.0))
}

/// `F_B[exp(-alpha |x|^2)](y) = (2 alpha)^{-(|gamma| + n/2)} exp(-|y|^2 / (4 alpha))`.
pub fn gaussian_transform(gamma: &GammaIndex, alpha: f64, y: &[f64]) -> Result<f64> {
    check_dim(gamma.n(), y.len())?;
    if !(alpha > 0.0) {
        return Err(Error::InvalidArgument(format!("alpha must be positive, got {alpha}")));
    }
    let s = gamma.abs() + 0.5 * gamma.n() as f64;
    let y2: f64 = y.iter().map(|v| v * v).sum();
    Ok((2.0 * alpha).powf(-s) * (-y2 / (4.0 * alpha)).exp())
}

/// Sign `i^k` for even `k`.
pub(crate) fn even_i_power(k: u32) -> f64 {
    if (k / 2).is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

pub(crate) fn require_b_harmonic(p: &EvenPoly, gamma: &GammaIndex) -> Result<()> {
    if p.degree() % 2 == 1 || p.degree() < 2 {
        return Err(Error::InvalidArgument(format!("need even degree k >= 2, got {}", p.degree())));
    }
    let image = apply_bessel(p, gamma)?;
    let scale = p.terms().fold(0.0f64, |m, (_, c)| m.max(c.abs()));
    if image.terms().any(|(_, c)| c.abs() > 1e-12 * scale) {
        return Err(Error::NotBHarmonic(format!("B P = {}", image.to_json())));
    }
    Ok(())
}

/// `F_B[P_k(x) exp(-|x|^2)](y) = 2^{-(|gamma| + k + n/2)} i^k P_k(y) exp(-|y|^2/4)`
/// for B-harmonic `P_k` of even degree.
pub fn harmonic_gaussian_transform(p: &EvenPoly, gamma: &GammaIndex, y: &[f64]) -> Result<f64> {
    check_dim(gamma.n(), y.len())?;
    require_b_harmonic(p, gamma)?;
    let k = p.degree();
    let s = gamma.abs() + k as f64 + 0.5 * gamma.n() as f64;
    let y2: f64 = y.iter().map(|v| v * v).sum();
    Ok(2f64.powf(-s) * even_i_power(k) * p.eval(y)? * (-y2 / 4.0).exp())
}

/// `F_B[p.v. P_k(x) / |x|^{k + n + 2|gamma|}](y)
///   = 2^{-(n + 2|gamma|)/2} i^k Gamma(k/2) / Gamma((k + n + 2|gamma|)/2) P_k(y) / |y|^k`.
pub fn pv_kernel_transform(p: &EvenPoly, gamma: &GammaIndex, y: &[f64]) -> Result<f64> {
    check_dim(gamma.n(), y.len())?;
    require_b_harmonic(p, gamma)?;
    let r2: f64 = y.iter().map(|v| v * v).sum();
    if r2 == 0.0 {
        return Err(Error::Singular("kernel transform is undefined at y = 0".into()));
    }
    let k = p.degree() as f64;
    let d = gamma.homogeneous_dim();
    let c = 2f64.powf(-0.5 * d) * gamma_fn(0.5 * k)? / gamma_fn(0.5 * (k + d))?;
    Ok(c * even_i_power(p.degree()) * p.eval(y)? / r2.powf(0.5 * k))
}

#[derive(Debug, Clone, PartialEq)]
pub struct PvLimit {
    pub eps: Vec<f64>,
    /// `int f(x/|x|) |x|^{-(n+2|gamma|-eps)} phi d mu_gamma` per eps.
    pub lhs: Vec<f64>,
    /// `int_{|x|>eps} f(x/|x|) |x|^{-(n+2|gamma|)} phi d mu_gamma` per eps.
    pub rhs: Vec<f64>,
    pub lhs_limit: f64,
    pub rhs_limit: f64,
}

/// Two-point Richardson extrapolation to zero for an error of order `h^order`.
pub fn richardson(h1: f64, v1: f64, h2: f64, v2: f64, order: i32) -> f64 {
    let (a, b) = (h1.powi(order), h2.powi(order));
    (a * v2 - b * v1) / (a - b)
}

/// Neville's polynomial extrapolation of `(h_i, v_i)` to `h = 0`.
pub fn extrapolate_to_zero(h: &[f64], v: &[f64]) -> f64 {
    let mut t = v.to_vec();
    let m = t.len();
    for level in 1..m {
        for i in 0..m - level {
            let (a, b) = (h[i], h[i + level]);
            t[i] = (a * t[i + 1] - b * t[i]) / (a - b);
        }
    }
    t[0]
}

/// Radial panels for `int_0^r_max` with a breakpoint at each `eps` and at 1.
fn radial_rule(breaks: &mut Vec<f64>, per_panel: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    breaks.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
    breaks.dedup();
    let mut nodes = Vec::new();
    let mut weights = Vec::new();
    for w in breaks.windows(2) {
        let r = gauss_legendre(per_panel, w[0], w[1])?;
        nodes.extend(r.nodes);
        weights.extend(r.weights);
    }
    Ok((nodes, weights))
}

/// Both sides of the regularization identity for a mean-zero angular
/// function, with their extrapolated limits. In polar form both reduce to
/// `int_0^inf Phi(r) dr / r` with `Phi(r) = int_S f(theta) phi(r theta) dS`.
pub fn pv_regularized_limit(
    rule: &SphereRule,
    f_angular: impl Fn(&[f64]) -> f64 + Sync,
    phi: impl Fn(&[f64]) -> f64 + Sync,
    eps_seq: &[f64],
    r_max: f64,
) -> Result<PvLimit> {
    if eps_seq.len() < 2 || eps_seq.windows(2).any(|w| !(w[1] < w[0]) || !(w[1] > 0.0)) {
        return Err(Error::InvalidArgument("eps sequence must be positive and decreasing".into()));
    }
    let mean = rule.integrate(&f_angular);
    if mean.abs() > 1e-8 {
        return Err(Error::InvalidArgument(format!("angular function has weighted mean {mean:e}")));
    }
    let phi_r = |r: f64| rule.integrate(|t| {
        let x: Vec<f64> = t.iter().map(|v| v * r).collect();
        f_angular(t) * phi(&x)
    });
    let mut breaks = vec![0.0, 1.0, r_max];
    breaks.extend_from_slice(eps_seq);
    let (nodes, weights) = radial_rule(&mut breaks, 24)?;
    let values: Vec<f64> = nodes.iter().map(|&r| phi_r(r)).collect();

    let mut lhs = Vec::with_capacity(eps_seq.len());
    let mut rhs = Vec::with_capacity(eps_seq.len());
    for &eps in eps_seq {
        let l: Vec<f64> = nodes
            .iter()
            .zip(&weights)
            .zip(&values)
            .map(|((r, w), v)| w * r.powf(eps - 1.0) * v)
            .collect();
        let t: Vec<f64> = nodes
            .iter()
            .zip(&weights)
            .zip(&values)
            .map(|((r, w), v)| if *r > eps { w * v / r } else { 0.0 })
            .collect();
        lhs.push(pairwise_sum(&l));
        rhs.push(pairwise_sum(&t));
    }
    let lhs_limit = extrapolate_to_zero(eps_seq, &lhs);
    let rhs_limit = extrapolate_to_zero(eps_seq, &rhs);
    Ok(PvLimit { eps: eps_seq.to_vec(), lhs, rhs, lhs_limit, rhs_limit })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn worked() -> EvenPoly {
        EvenPoly::new(2, 2, [(vec![2, 0], 4.0), (vec![0, 2], -2.0)]).unwrap()
    }

    fn g() -> GammaIndex {
        GammaIndex::new(vec![0.5, 1.5]).unwrap()
    }

    #[test]
    fn gaussian_closed_form_values() {
        assert!((gaussian_transform(&g(), 1.0, &[0.0, 0.0]).unwrap() - 0.125).abs() < 1e-16);
        let g1 = GammaIndex::new(vec![0.5]).unwrap();
        assert!((gaussian_transform(&g1, 0.5, &[0.0]).unwrap() - 1.0).abs() < 1e-16);
        assert!(gaussian_transform(&g1, 0.0, &[0.0]).is_err());
    }

    #[test]
    fn worked_harmonic_value() {
        let v = harmonic_gaussian_transform(&worked(), &g(), &[1.0, 1.0]).unwrap();
        assert!((v - (-0.0625 * (-0.5f64).exp())).abs() < 1e-15);
        assert_eq!(harmonic_gaussian_transform(&worked(), &g(), &[0.0, 0.0]).unwrap(), 0.0);
        let not = EvenPoly::norm_squared(2);
        assert!(matches!(harmonic_gaussian_transform(&not, &g(), &[1.0, 1.0]), Err(Error::NotBHarmonic(_))));
    }

    #[test]
    fn worked_pv_value() {
        let v = pv_kernel_transform(&worked(), &g(), &[1.0, 0.0]).unwrap();
        assert!((v + 1.0 / 12.0).abs() < 1e-15);
        let w = pv_kernel_transform(&worked(), &g(), &[3.0, 0.0]).unwrap();
        assert!((v - w).abs() < 1e-15);
        let cone = pv_kernel_transform(&worked(), &g(), &[1.0, 2f64.sqrt()]).unwrap();
        assert!(cone.abs() < 1e-15);
        assert!(pv_kernel_transform(&worked(), &g(), &[0.0, 0.0]).is_err());
    }

    #[test]
    fn neville_recovers_cubic_intercept() {
        let h = [0.4, 0.2, 0.1, 0.05];
        let v: Vec<f64> = h.iter().map(|x| 1.5 - x + 2.0 * x * x - 0.5 * x * x * x).collect();
        assert!((extrapolate_to_zero(&h, &v) - 1.5).abs() < 1e-13);
    }

    #[test]
    fn richardson_removes_leading_term() {
        let f = |h: f64| 2.0 + 3.0 * h * h;
        assert!((richardson(0.1, f(0.1), 0.05, f(0.05), 2) - 2.0).abs() < 1e-14);
    }
}
