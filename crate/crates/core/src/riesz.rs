//! High-order Riesz-Bessel transforms
//! `R f(x) = c_k p.v. int P_k(y) |y|^{-(k+n+2|gamma|)} T^y f(x) d mu_gamma(y)`
//! in space and as the multiplier `i^k P_k(xi) / |xi|^k` in frequency, plus
//! empirical probes of the a priori and L_p bounds.

use rayon::prelude::*;

use crate::error::{check_dim, Error, Result};
use crate::fourier::{even_i_power, extrapolate_to_zero, fb_forward, fb_forward_at, fb_inverse, require_b_harmonic, FBPlan};
use crate::grid::{GammaIndex, GridAxis, GridFunction};
use crate::poly::{sphere_sample, EvenPoly};
use crate::quadrature::{gauss_legendre, pairwise_dot, pairwise_sum};
use crate::shift::{AngleRule, ShiftOperatorPlan};
use crate::special::gamma as gamma_fn;
use crate::sphere::SphereRule;

const RADIAL_PANEL: usize = 16;

#[derive(Debug, Clone, PartialEq)]
pub struct RieszKernel {
    p: EvenPoly,
    gamma: GammaIndex,
    c_k: f64,
    exponent: f64,
}

impl RieszKernel {
    /// Kernel for a B-harmonic `P_k` of even degree `k >= 2`.
    pub fn new(p: EvenPoly, gamma: GammaIndex) -> Result<Self> {
        check_dim(gamma.n(), p.n())?;
        require_b_harmonic(&p, &gamma)?;
        let k = p.degree() as f64;
        let d = gamma.homogeneous_dim();
        let c_k = 2f64.powf(0.5 * d) * gamma_fn(0.5 * (k + d))? / gamma_fn(0.5 * k)?;
        Ok(Self { p, gamma, c_k, exponent: k + d })
    }

    pub fn p(&self) -> &EvenPoly {
        &self.p
    }

    pub fn gamma(&self) -> &GammaIndex {
        &self.gamma
    }

    pub fn k(&self) -> u32 {
        self.p.degree()
    }

    /// `2^{(n+2|gamma|)/2} Gamma((n+k+2|gamma|)/2) / Gamma(k/2)`.
    pub fn c_k(&self) -> f64 {
        self.c_k
    }

    /// The constant that makes the spatial and spectral forms agree under
    /// this crate's transform normalization: `c_k` times the transform
    /// constant.
    pub fn fitted_c_k(&self) -> f64 {
        self.c_k * self.gamma.fourier_constant()
    }

    pub fn exponent(&self) -> f64 {
        self.exponent
    }

    /// `(-1)^{k/2} P_k(xi) / |xi|^k`, zero at the origin.
    pub fn multiplier(&self, xi: &[f64]) -> Result<f64> {
        check_dim(self.gamma.n(), xi.len())?;
        let r2: f64 = xi.iter().map(|v| v * v).sum();
        if r2 == 0.0 {
            return Ok(0.0);
        }
        Ok(even_i_power(self.k()) * self.p.eval(xi)? / r2.powf(0.5 * self.k() as f64))
    }

    /// `max |P_k(theta)|` over a dense sample of the unit sphere.
    pub fn multiplier_bound(&self) -> f64 {
        sphere_sample(self.gamma.n(), 20_000)
            .iter()
            .map(|t| self.p.eval(t).map(f64::abs).unwrap_or(0.0))
            .fold(0.0, f64::max)
    }

    /// `int_{S_+} P_k(theta) prod theta_i^{2 gamma_i} dS`.
    pub fn angular_mean(&self, rule: &SphereRule) -> f64 {
        rule.integrate(|t| self.p.eval(t).unwrap_or(f64::NAN))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpatialRiesz {
    pub eps: Vec<f64>,
    /// Truncated integral `|y| > eps` per eps, constant included.
    pub values: Vec<f64>,
    pub limit: f64,
    /// Last step exceeds 10x the extrapolation correction.
    pub non_converged: bool,
}

/// Interpolation row producing `T^{y} f(x)` along one axis. Points outside
/// the box contribute zero.
fn axis_shift_row(axis: &GridAxis, x_max: f64, x: f64, y: f64, rule: &AngleRule, out: &mut [f64]) {
    out.iter_mut().for_each(|v| *v = 0.0);
    let mut row = vec![0.0; axis.len()];
    let mut add = |s: f64, w: f64| {
        if s <= x_max {
            axis.lagrange_row(s, &mut row);
            out.iter_mut().zip(&row).for_each(|(o, r)| *o += w * r);
        }
    };
    if x * y == 0.0 {
        add((x * x + y * y).sqrt(), 1.0);
    } else {
        for (t, w) in rule.t.iter().zip(&rule.normalized) {
            add((x * x + y * y - 2.0 * x * y * t).max(0.0).sqrt(), *w);
        }
    }
}

/// Contracts a row-major tensor with one row per axis, last axis first.
fn contract_rows(values: &[f64], shape: &[usize], rows: &[Vec<f64>]) -> f64 {
    let mut acc = values.to_vec();
    for axis in (0..shape.len()).rev() {
        let m = shape[axis];
        acc = acc.chunks(m).map(|c| pairwise_dot(c, &rows[axis])).collect();
    }
    acc[0]
}

/// Spatial transform at `x` by polar principal-value quadrature.
///
/// With `y = r theta` the integrand is `A(r) / r`, where
/// `A(r) = int_{S_+} P_k(theta) [T^{r theta} f(x) - f(x)] dS`; the subtracted
/// term integrates to zero against `P_k` and makes `A(r) = O(r^2)`. Each
/// truncation `r > eps` is computed, and the sequence is extrapolated in
/// `eps^2`. The result carries [`RieszKernel::fitted_c_k`].
pub fn riesz_spatial(
    plan: &ShiftOperatorPlan,
    kernel: &RieszKernel,
    rule: &SphereRule,
    f: &GridFunction,
    x: &[f64],
    eps_seq: &[f64],
) -> Result<SpatialRiesz> {
    let grid = f.grid();
    let n = grid.n();
    check_dim(n, x.len())?;
    if grid.gamma() != kernel.gamma() || plan.gamma() != kernel.gamma() || rule.gamma() != kernel.gamma() {
        return Err(Error::GridMismatch("kernel, plan, rule and grid must share gamma".into()));
    }
    if eps_seq.len() < 2 || eps_seq.windows(2).any(|w| !(w[1] < w[0])) || !(eps_seq[eps_seq.len() - 1] > 0.0) {
        return Err(Error::InvalidArgument("eps sequence must be positive and decreasing".into()));
    }
    let shape = grid.shape();
    let values: Vec<f64> = f.values().iter().copied().collect();
    if values.iter().all(|v| *v == 0.0) {
        let m = eps_seq.len();
        return Ok(SpatialRiesz { eps: eps_seq.to_vec(), values: vec![0.0; m], limit: 0.0, non_converged: false });
    }
    let x_max = grid.x_max();
    let fx = f.interpolate(x)?;
    let rules = plan.angle_rules();
    let p_theta: Vec<f64> = rule.nodes().iter().map(|t| kernel.p.eval(t)).collect::<Result<_>>()?;

    let shifted = |y: &[f64]| -> f64 {
        let rows: Vec<Vec<f64>> = (0..n)
            .map(|i| {
                let mut r = vec![0.0; shape[i]];
                axis_shift_row(grid.axis(i), x_max, x[i], y[i], &rules[i], &mut r);
                r
            })
            .collect();
        contract_rows(&values, &shape, &rows)
    };
    let a_of_r = |r: f64| -> f64 {
        let terms: Vec<f64> = rule
            .nodes()
            .iter()
            .zip(rule.weights())
            .zip(&p_theta)
            .map(|((t, w), p)| {
                let y: Vec<f64> = t.iter().map(|v| v * r).collect();
                w * p * (shifted(&y) - fx)
            })
            .collect();
        pairwise_sum(&terms)
    };

    // beyond this radius every shifted point leaves the box
    let x_norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    let r_max = x_norm + (n as f64).sqrt() * x_max;
    let mut breaks: Vec<f64> = eps_seq.to_vec();
    breaks.push(0.0);
    let mut b = 0.5;
    while b < r_max {
        breaks.push(b);
        b += 0.5;
    }
    breaks.push(r_max);
    breaks.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
    breaks.dedup();
    let mut nodes = Vec::new();
    let mut weights = Vec::new();
    for w in breaks.windows(2) {
        let q = gauss_legendre(RADIAL_PANEL, w[0], w[1])?;
        nodes.extend(q.nodes);
        weights.extend(q.weights);
    }
    let integrand: Vec<f64> = nodes.par_iter().map(|&r| a_of_r(r) / r).collect();

    let c = kernel.fitted_c_k();
    let truncated: Vec<f64> = eps_seq
        .iter()
        .map(|&eps| {
            let t: Vec<f64> = nodes
                .iter()
                .zip(&weights)
                .zip(&integrand)
                .map(|((r, w), v)| if *r > eps { w * v } else { 0.0 })
                .collect();
            c * pairwise_sum(&t)
        })
        .collect();
    let h: Vec<f64> = eps_seq.iter().map(|e| e * e).collect();
    let limit = extrapolate_to_zero(&h, &truncated);
    let m = truncated.len();
    let step = (truncated[m - 1] - truncated[m - 2]).abs();
    let correction = (limit - truncated[m - 1]).abs();
    let floor = 1e-12 * limit.abs().max(fx.abs()).max(1e-300);
    let non_converged = step > 10.0 * correction.max(floor);
    Ok(SpatialRiesz { eps: eps_seq.to_vec(), values: truncated, limit, non_converged })
}

fn check_plan(plan: &FBPlan, kernel_gamma: &GammaIndex, f: &GridFunction) -> Result<()> {
    if plan.gamma() != kernel_gamma {
        return Err(Error::GridMismatch("plan and kernel use different gamma".into()));
    }
    if f.grid().as_ref() != plan.input_grid().as_ref() {
        return Err(Error::GridMismatch("function is not on the plan's spatial grid".into()));
    }
    Ok(())
}

fn apply_multiplier(plan: &FBPlan, f: &GridFunction, m: impl Fn(&[f64]) -> Result<f64> + Sync) -> Result<GridFunction> {
    let hat = fb_forward(plan, f)?;
    let field = multiplier_field(plan, m)?;
    let product = hat.values() * field.values();
    fb_inverse(plan, &GridFunction::new(plan.output_grid().clone(), product)?)
}

/// Samples a multiplier on the plan's frequency grid.
pub fn multiplier_field(plan: &FBPlan, m: impl Fn(&[f64]) -> Result<f64> + Sync) -> Result<GridFunction> {
    let grid = plan.output_grid().clone();
    let err = std::sync::Mutex::new(None);
    let out = GridFunction::from_fn(grid, |xi| match m(xi) {
        Ok(v) => v,
        Err(e) => {
            *err.lock().expect("lock") = Some(e);
            f64::NAN
        }
    });
    match err.into_inner().expect("lock") {
        Some(e) => Err(e),
        None => Ok(out),
    }
}

/// `F_B^{-1}[(-1)^{k/2} P_k(xi) |xi|^{-k} F_B f]` on the spatial grid.
pub fn riesz_spectral(plan: &FBPlan, kernel: &RieszKernel, f: &GridFunction) -> Result<GridFunction> {
    check_plan(plan, kernel.gamma(), f)?;
    apply_multiplier(plan, f, |xi| kernel.multiplier(xi))
}

/// The spectral transform evaluated at an arbitrary spatial point.
pub fn riesz_spectral_at(plan: &FBPlan, kernel: &RieszKernel, f: &GridFunction, x: &[f64]) -> Result<f64> {
    check_plan(plan, kernel.gamma(), f)?;
    let hat = fb_forward(plan, f)?;
    let field = multiplier_field(plan, |xi| kernel.multiplier(xi))?;
    let product = GridFunction::new(plan.output_grid().clone(), hat.values() * field.values())?;
    fb_forward_at(&product, x)
}

/// `F_B[R f](xi)` at an arbitrary frequency: the multiplier times the
/// transform of the samples.
pub fn riesz_transform_at(kernel: &RieszKernel, f: &GridFunction, xi: &[f64]) -> Result<f64> {
    if f.grid().gamma() != kernel.gamma() {
        return Err(Error::GridMismatch("grid and kernel use different gamma".into()));
    }
    Ok(kernel.multiplier(xi)? * fb_forward_at(f, xi)?)
}

/// `P(B_1, ..., B_n) f` through the symbol `P(-xi_1^2, ..., -xi_n^2)`.
pub fn apply_bessel_poly_spectral(plan: &FBPlan, p: &EvenPoly, f: &GridFunction) -> Result<GridFunction> {
    check_dim(plan.gamma().n(), p.n())?;
    if !p.is_even() {
        return Err(Error::InvalidArgument("P(B) needs a polynomial in x_i^2".into()));
    }
    check_plan(plan, plan.gamma(), f)?;
    apply_multiplier(plan, f, |xi| p.bessel_symbol(xi))
}

/// `d_i d_k f` realized as `-R_i R_k B f`, whose multiplier is `-xi_i xi_k`.
pub fn second_derivative_spectral(plan: &FBPlan, i: usize, k: usize, f: &GridFunction) -> Result<GridFunction> {
    let n = plan.gamma().n();
    if i >= n || k >= n {
        return Err(Error::InvalidArgument(format!("axis out of range for n = {n}")));
    }
    check_plan(plan, plan.gamma(), f)?;
    apply_multiplier(plan, f, |xi| Ok(-xi[i] * xi[k]))
}

/// A probe input together with its analytic `B f`.
#[derive(Debug, Clone)]
pub struct ProbeMember {
    pub label: String,
    pub f: GridFunction,
    pub bessel_f: GridFunction,
}

/// Dilated Gaussians `exp(-s |x|^2)` with `B f = (4 s^2 |x|^2 - 2 s d) exp(-s |x|^2)`.
pub fn gaussian_family(grid: &std::sync::Arc<crate::grid::TensorGrid>, scales: &[f64]) -> Vec<ProbeMember> {
    let d = grid.gamma().homogeneous_dim();
    scales
        .iter()
        .map(|&s| {
            let r2 = |x: &[f64]| x.iter().map(|v| v * v).sum::<f64>();
            ProbeMember {
                label: format!("gaussian s={s}"),
                f: GridFunction::from_fn(grid.clone(), |x| (-s * r2(x)).exp()),
                bessel_f: GridFunction::from_fn(grid.clone(), |x| (4.0 * s * s * r2(x) - 2.0 * s * d) * (-s * r2(x)).exp()),
            }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProbeRow {
    pub label: String,
    pub p: f64,
    pub numerator: f64,
    pub denominator: f64,
    pub ratio: f64,
}

/// Spread `(max - min) / max` of the ratios in a table.
pub fn ratio_spread(rows: &[ProbeRow]) -> f64 {
    let max = rows.iter().map(|r| r.ratio).fold(f64::NEG_INFINITY, f64::max);
    let min = rows.iter().map(|r| r.ratio).fold(f64::INFINITY, f64::min);
    (max - min) / max
}

fn probe_exponent(p: f64) -> Result<()> {
    if !(p > 1.0 && p.is_finite()) {
        return Err(Error::InvalidArgument(format!("need 1 < p < inf, got {p}")));
    }
    Ok(())
}

/// `max_{i,k} ||d_i d_k f||_p / ||B f||_p` per family member.
pub fn priori_bound_probe(plan: &FBPlan, p: f64, family: &[ProbeMember]) -> Result<Vec<ProbeRow>> {
    probe_exponent(p)?;
    let n = plan.gamma().n();
    family
        .iter()
        .map(|m| {
            let den = m.bessel_f.lp_norm(p)?;
            let mut num = 0.0f64;
            for i in 0..n {
                for k in i..n {
                    num = num.max(second_derivative_spectral(plan, i, k, &m.f)?.lp_norm(p)?);
                }
            }
            Ok(ProbeRow { label: m.label.clone(), p, numerator: num, denominator: den, ratio: num / den })
        })
        .collect()
}

/// `||B f||_p / ||P(B) f||_p` per family member, for an elliptic `P`.
/// Only a quadratic `P` gives an operator of the same order as `B`, so
/// only then is the ratio scale invariant.
pub fn elliptic_estimate_probe(plan: &FBPlan, poly: &EvenPoly, p: f64, family: &[ProbeMember]) -> Result<Vec<ProbeRow>> {
    probe_exponent(p)?;
    family
        .iter()
        .map(|m| {
            let num = m.bessel_f.lp_norm(p)?;
            let den = apply_bessel_poly_spectral(plan, poly, &m.f)?.lp_norm(p)?;
            Ok(ProbeRow { label: m.label.clone(), p, numerator: num, denominator: den, ratio: num / den })
        })
        .collect()
}

/// `||R f||_p / ||f||_p` for each `p` and family member.
pub fn lp_boundedness_probe(plan: &FBPlan, kernel: &RieszKernel, p_values: &[f64], family: &[ProbeMember]) -> Result<Vec<ProbeRow>> {
    let mut rows = Vec::new();
    for m in family {
        let rf = riesz_spectral(plan, kernel, &m.f)?;
        for &p in p_values {
            probe_exponent(p)?;
            let num = rf.lp_norm(p)?;
            let den = m.f.lp_norm(p)?;
            rows.push(ProbeRow { label: m.label.clone(), p, numerator: num, denominator: den, ratio: num / den });
        }
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn worked() -> RieszKernel {
        let p = EvenPoly::new(2, 2, [(vec![2, 0], 4.0), (vec![0, 2], -2.0)]).unwrap();
        RieszKernel::new(p, GammaIndex::new(vec![0.5, 1.5]).unwrap()).unwrap()
    }

    #[test]
    fn constant_and_exponent() {
        let k = worked();
        // d = 6, k = 2: 2^3 Gamma(4) / Gamma(1) = 48
        assert!((k.c_k() - 48.0).abs() < 1e-12);
        assert_eq!(k.exponent(), 8.0);
        assert!((k.fitted_c_k() - 48.0 * GammaIndex::new(vec![0.5, 1.5]).unwrap().fourier_constant()).abs() < 1e-15);
    }

    #[test]
    fn rejects_non_harmonic() {
        let g = GammaIndex::new(vec![0.5, 1.5]).unwrap();
        assert!(matches!(RieszKernel::new(EvenPoly::norm_squared(2), g), Err(Error::NotBHarmonic(_))));
    }

    #[test]
    fn multiplier_is_degree_zero() {
        let k = worked();
        assert_eq!(k.multiplier(&[0.0, 0.0]).unwrap(), 0.0);
        let a = k.multiplier(&[0.3, 1.7]).unwrap();
        let b = k.multiplier(&[0.6, 3.4]).unwrap();
        assert!((a - b).abs() < 1e-15);
        assert!((k.multiplier(&[1.0, 1.0]).unwrap() + 1.0).abs() < 1e-15);
        assert!((k.multiplier_bound() - 4.0).abs() < 1e-12);
    }

    #[test]
    fn contract_rows_matches_manual() {
        let v = [1.0, 2.0, 3.0, 4.0, 5.0, 6.0];
        let rows = vec![vec![1.0, 10.0], vec![1.0, 0.0, 2.0]];
        // axis 1 first: [1 + 6, 4 + 12] = [7, 16]; then 7 + 160
        assert_eq!(contract_rows(&v, &[2, 3], &rows), 167.0);
    }
}
