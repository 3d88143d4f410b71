//! The Bessel generalized shift `T^y` and the B-convolution it induces.
//!
//! Per axis the shift averages `phi` over the law-of-cosines points
//! `sqrt(x^2 + y^2 - 2 x y cos a)` against `sin^{2 gamma - 1} a da`. The
//! angular integral is done by Gauss-Jacobi in `t = cos a`.

use std::sync::Arc;

use ndarray::Array2;
use rayon::prelude::*;

use crate::error::{check_dim, Error, Result};
use crate::grid::{contract_axis, GammaIndex, GridAxis, GridFunction, TensorGrid};
use crate::quadrature::{gauss_jacobi, pairwise_sum};
use crate::special::ln_gamma;

pub const DEFAULT_ANGLES: usize = 48;
pub const MAX_ANGLES: usize = 384;
const ADAPTIVE_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct AngleRule {
    /// `cos a` at the nodes.
    pub t: Vec<f64>,
    /// Raw Gauss-Jacobi weights for `(1 - t^2)^{gamma - 1}`.
    pub weights: Vec<f64>,
    /// Weights times the per-axis constant; they sum to one.
    pub normalized: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct ShiftOperatorPlan {
    gamma: GammaIndex,
    c_gamma: f64,
    angles: usize,
    // levels[l][i]: rule for axis i with angles * 2^l nodes
    levels: Vec<Vec<AngleRule>>,
}

impl ShiftOperatorPlan {
    pub fn new(gamma: GammaIndex, angles: usize) -> Result<Self> {
        if angles < 4 {
            return Err(Error::InvalidArgument(format!("need at least 4 angles, got {angles}")));
        }
        let mut levels = Vec::new();
        let mut q = angles;
        loop {
            let axes = gamma
                .values()
                .iter()
                .map(|&g| {
                    let r = gauss_jacobi(q, g - 1.0, g - 1.0)?;
                    let c = (ln_gamma(g + 0.5) - ln_gamma(0.5) - ln_gamma(g)).exp();
                    Ok(AngleRule {
                        normalized: r.weights.iter().map(|w| w * c).collect(),
                        t: r.nodes,
                        weights: r.weights,
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            levels.push(axes);
            if q >= MAX_ANGLES {
                break;
            }
            q = (2 * q).min(MAX_ANGLES);
        }
        let c_gamma = gamma.shift_constant();
        let prod: f64 = levels[0].iter().map(|r| pairwise_sum(&r.weights)).product();
        if (c_gamma * prod - 1.0).abs() > 1e-12 {
            return Err(Error::Domain(format!("shift weights normalize to {} not 1", c_gamma * prod)));
        }
        Ok(Self { gamma, c_gamma, angles, levels })
    }

    pub fn gamma(&self) -> &GammaIndex {
        &self.gamma
    }

    pub fn c_gamma(&self) -> f64 {
        self.c_gamma
    }

    pub fn angles(&self) -> usize {
        self.angles
    }

    pub fn angle_rules(&self) -> &[AngleRule] {
        &self.levels[0]
    }

    /// `T^y phi(x)` with the plan's base angle count, no refinement.
    pub fn shift_fixed(&self, phi: &(impl Fn(&[f64]) -> f64 + ?Sized), x: &[f64], y: &[f64]) -> Result<f64> {
        check_dim(self.gamma.n(), x.len())?;
        check_dim(self.gamma.n(), y.len())?;
        Ok(self.shift_level(phi, x, y, 0))
    }

    fn shift_level(&self, phi: &(impl Fn(&[f64]) -> f64 + ?Sized), x: &[f64], y: &[f64], level: usize) -> f64 {
        if y.iter().all(|v| *v == 0.0) {
            return phi(x);
        }
        let n = x.len();
        let rules = &self.levels[level];
        // axes with x_i y_i = 0 collapse to a single point
        let per_axis: Vec<Vec<(f64, f64)>> = (0..n)
            .map(|i| {
                let (a, b) = (x[i], y[i]);
                if a * b == 0.0 {
                    vec![((a * a + b * b).sqrt(), 1.0)]
                } else {
                    rules[i]
                        .t
                        .iter()
                        .zip(&rules[i].normalized)
                        .map(|(t, w)| ((a * a + b * b - 2.0 * a * b * t).max(0.0).sqrt(), *w))
                        .collect()
                }
            })
            .collect();
        let total: usize = per_axis.iter().map(Vec::len).product();
        let mut terms = Vec::with_capacity(total);
        let mut idx = vec![0usize; n];
        let mut p = vec![0.0; n];
        for _ in 0..total {
            let mut w = 1.0;
            for i in 0..n {
                let (s, wi) = per_axis[i][idx[i]];
                p[i] = s;
                w *= wi;
            }
            terms.push(w * phi(&p));
            for i in (0..n).rev() {
                idx[i] += 1;
                if idx[i] < per_axis[i].len() {
                    break;
                }
                idx[i] = 0;
            }
        }
        pairwise_sum(&terms)
    }
}

pub fn build_shift_plan(gamma: GammaIndex, angles: usize) -> Result<ShiftOperatorPlan> {
    ShiftOperatorPlan::new(gamma, angles)
}

/// `T^y phi(x)`, doubling the angle count until successive values agree to
/// `1e-10` (capped at 384 angles per axis).
pub fn shift(plan: &ShiftOperatorPlan, phi: impl Fn(&[f64]) -> f64, x: &[f64], y: &[f64]) -> Result<f64> {
    check_dim(plan.gamma.n(), x.len())?;
    check_dim(plan.gamma.n(), y.len())?;
    let mut prev = plan.shift_level(&phi, x, y, 0);
    for level in 1..plan.levels.len() {
        let next = plan.shift_level(&phi, x, y, level);
        if (next - prev).abs() < ADAPTIVE_TOL * prev.abs().max(1.0) {
            return Ok(next);
        }
        prev = next;
    }
    Ok(prev)
}

/// Per-axis shift matrix on a grid axis: row `a` holds the interpolation
/// weights that produce `T^{y} f` at node `a` from the node values.
/// Returns the matrix and the number of evaluation points clamped at x_max.
fn axis_shift_matrix(axis: &GridAxis, x_max: f64, y: f64, rule: &AngleRule) -> (Array2<f64>, usize) {
    let m = axis.len();
    if y == 0.0 {
        return (Array2::eye(m), 0);
    }
    let mut out = Array2::zeros((m, m));
    let mut beyond = 0;
    let mut row = vec![0.0; m];
    for (a, &x) in axis.nodes.iter().enumerate() {
        for (t, w) in rule.t.iter().zip(&rule.normalized) {
            let s = (x * x + y * y - 2.0 * x * y * t).max(0.0).sqrt();
            if s > x_max {
                beyond += 1;
            }
            axis.lagrange_row(s.min(x_max), &mut row);
            for (o, r) in out.row_mut(a).iter_mut().zip(&row) {
                *o += w * r;
            }
        }
    }
    (out, beyond)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShiftDiagnostics {
    /// Fraction of angular evaluation points that fell beyond x_max.
    pub clamped_fraction: f64,
    /// Set when more than 1% of evaluation points were clamped.
    pub truncation_warning: bool,
}

impl ShiftDiagnostics {
    fn from_axis_fractions(fractions: &[f64]) -> Self {
        let inside: f64 = fractions.iter().map(|f| 1.0 - f).product();
        let clamped_fraction = 1.0 - inside;
        Self { clamped_fraction, truncation_warning: clamped_fraction > 0.01 }
    }

    pub fn merge(self, other: Self) -> Self {
        let clamped_fraction = self.clamped_fraction.max(other.clamped_fraction);
        Self { clamped_fraction, truncation_warning: self.truncation_warning || other.truncation_warning }
    }
}

/// Applies `T^y` to a sampled function at every grid node. Off-node values
/// come from global barycentric interpolation on each axis, clamped at x_max.
pub fn shift_grid(plan: &ShiftOperatorPlan, f: &GridFunction, y: &[f64]) -> Result<(GridFunction, ShiftDiagnostics)> {
    let grid = f.grid();
    check_dim(plan.gamma.n(), grid.n())?;
    check_dim(grid.n(), y.len())?;
    if grid.gamma() != &plan.gamma {
        return Err(Error::GridMismatch("grid and plan use different gamma".into()));
    }
    let mut values = f.values().clone();
    let mut fractions = Vec::with_capacity(grid.n());
    for (i, &yi) in y.iter().enumerate() {
        let rule = &plan.levels[0][i];
        let (m, beyond) = axis_shift_matrix(grid.axis(i), grid.x_max(), yi, rule);
        fractions.push(beyond as f64 / (grid.axis(i).len() * rule.t.len()) as f64);
        if yi != 0.0 {
            values = contract_axis(&values, i, &m);
        }
    }
    Ok((GridFunction::new(grid.clone(), values)?, ShiftDiagnostics::from_axis_fractions(&fractions)))
}

/// `(f * phi)(x) = int f(y) T^y phi(x) d mu_gamma(y)` at a single point, by
/// direct quadrature over the grid of `f`.
pub fn b_convolve_at(
    plan: &ShiftOperatorPlan,
    f: &GridFunction,
    phi: &(impl Fn(&[f64]) -> f64 + Sync + ?Sized),
    x: &[f64],
) -> Result<f64> {
    let grid = f.grid();
    check_dim(grid.n(), x.len())?;
    let shape = grid.shape();
    let weights = node_weights(grid);
    let fv: Vec<f64> = f.values().iter().copied().collect();
    let terms: Vec<f64> = (0..fv.len())
        .into_par_iter()
        .map(|flat| {
            let wf = weights[flat] * fv[flat];
            if wf == 0.0 {
                return 0.0;
            }
            let y = unflatten(grid, &shape, flat);
            wf * plan.shift_level(phi, x, &y, 0)
        })
        .collect();
    Ok(pairwise_sum(&terms))
}

/// B-convolution of a sampled `f` with a callable `phi` at every node of the
/// grid of `f`. Costs `O(N_grid^2 * angles^n)` kernel evaluations.
pub fn b_convolve(
    plan: &ShiftOperatorPlan,
    f: &GridFunction,
    phi: &(impl Fn(&[f64]) -> f64 + Sync + ?Sized),
) -> Result<GridFunction> {
    let grid = f.grid().clone();
    check_dim(plan.gamma.n(), grid.n())?;
    let shape = grid.shape();
    let total = grid.node_count();
    let vals = (0..total)
        .map(|flat| b_convolve_at(plan, f, phi, &unflatten(&grid, &shape, flat)))
        .collect::<Result<Vec<f64>>>()?;
    GridFunction::new(grid, ndarray::ArrayD::from_shape_vec(shape, vals).expect("shape"))
}

/// B-convolution where `phi` is also sampled on the grid. Uses
/// `(f * phi)(x) = int f(y) T^x phi(y) d mu_gamma(y)` with separable shift
/// matrices, `O(n N^{2n+1})` work.
pub fn b_convolve_sampled(
    plan: &ShiftOperatorPlan,
    f: &GridFunction,
    phi: &GridFunction,
) -> Result<(GridFunction, ShiftDiagnostics)> {
    let grid = f.grid().clone();
    if grid.as_ref() != phi.grid().as_ref() {
        return Err(Error::GridMismatch("f and phi live on different grids".into()));
    }
    check_dim(plan.gamma.n(), grid.n())?;
    let n = grid.n();
    // per axis, per node: shift matrix with y = that node
    let mut mats: Vec<Vec<Array2<f64>>> = Vec::with_capacity(n);
    let mut fractions = Vec::with_capacity(n);
    for i in 0..n {
        let axis = grid.axis(i);
        let rule = &plan.levels[0][i];
        let built: Vec<(Array2<f64>, usize)> = axis
            .nodes
            .par_iter()
            .map(|&xa| axis_shift_matrix(axis, grid.x_max(), xa, rule))
            .collect();
        let beyond: usize = built.iter().map(|b| b.1).sum();
        fractions.push(beyond as f64 / (axis.len() * axis.len() * rule.t.len()) as f64);
        mats.push(built.into_iter().map(|b| b.0).collect());
    }
    let shape = grid.shape();
    let weights = node_weights(&grid);
    let wf: Vec<f64> = weights.iter().zip(f.values().iter()).map(|(w, v)| w * v).collect();
    let vals: Vec<f64> = (0..grid.node_count())
        .into_par_iter()
        .map(|flat| {
            let idx = unflatten_index(&shape, flat);
            let mut t = phi.values().clone();
            for i in 0..n {
                t = contract_axis_serial(&t, i, &mats[i][idx[i]]);
            }
            let tv: Vec<f64> = t.iter().copied().collect();
            crate::quadrature::pairwise_dot(&wf, &tv)
        })
        .collect();
    let values = ndarray::ArrayD::from_shape_vec(shape, vals).expect("shape");
    Ok((GridFunction::new(grid, values)?, ShiftDiagnostics::from_axis_fractions(&fractions)))
}

fn contract_axis_serial(input: &ndarray::ArrayD<f64>, axis: usize, m: &Array2<f64>) -> ndarray::ArrayD<f64> {
    use ndarray::{Axis, IxDyn, Zip};
    let mut shape = input.shape().to_vec();
    shape[axis] = m.nrows();
    let mut out = ndarray::ArrayD::zeros(IxDyn(&shape));
    Zip::from(out.lanes_mut(Axis(axis))).and(input.lanes(Axis(axis))).for_each(|mut o, lane| {
        let lane: Vec<f64> = lane.to_vec();
        for (ov, row) in o.iter_mut().zip(m.outer_iter()) {
            *ov = crate::quadrature::pairwise_dot(row.as_slice().expect("contiguous row"), &lane);
        }
    });
    out
}

pub(crate) fn unflatten_index(shape: &[usize], mut flat: usize) -> Vec<usize> {
    let mut idx = vec![0; shape.len()];
    for ax in (0..shape.len()).rev() {
        idx[ax] = flat % shape[ax];
        flat /= shape[ax];
    }
    idx
}

fn unflatten(grid: &TensorGrid, shape: &[usize], flat: usize) -> Vec<f64> {
    grid.point(&unflatten_index(shape, flat))
}

/// Product quadrature weight of every node, row-major.
pub(crate) fn node_weights(grid: &Arc<TensorGrid>) -> Vec<f64> {
    let shape = grid.shape();
    (0..grid.node_count())
        .map(|flat| {
            unflatten_index(&shape, flat)
                .iter()
                .enumerate()
                .map(|(i, &k)| grid.axis(i).weights[k])
                .product()
        })
        .collect()
}
