//! The weighted measure `d mu_gamma = prod x_i^{2 gamma_i} dx` on the
//! positive orthant and tensor-product quadrature grids carrying it.

use std::fmt::Write as _;
use std::io::{BufRead, Write};
use std::path::Path;
use std::sync::Arc;

use ndarray::{Array2, ArrayD, Axis, Dimension, IxDyn, Zip};
use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::quadrature::{gauss_legendre, pairwise_dot, pairwise_sum};
use crate::special::{gamma, ln_gamma};

/// The multi-index `gamma = (gamma_1, ..., gamma_n)`, every entry positive.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct GammaIndex {
    values: Vec<f64>,
    abs: f64,
}

impl GammaIndex {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidArgument("gamma index needs at least one axis".into()));
        }
        if let Some(g) = values.iter().find(|g| !(**g > 0.0) || !g.is_finite()) {
            return Err(Error::InvalidArgument(format!("every gamma_i must be positive, got {g}")));
        }
        let abs = pairwise_sum(&values);
        Ok(Self { values, abs })
    }

    pub fn n(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// `|gamma| = gamma_1 + ... + gamma_n`.
    pub fn abs(&self) -> f64 {
        self.abs
    }

    /// Homogeneous dimension `n + 2|gamma|` of the measure.
    pub fn homogeneous_dim(&self) -> f64 {
        self.n() as f64 + 2.0 * self.abs
    }

    /// Weighted area of the positive unit hemisphere,
    /// `prod Gamma(gamma_i + 1/2) / (2^{n-1} Gamma(|gamma| + n/2))`.
    pub fn sphere_measure(&self) -> f64 {
        let n = self.n() as f64;
        let ln = self.values.iter().map(|g| ln_gamma(g + 0.5)).sum::<f64>()
            - (n - 1.0) * std::f64::consts::LN_2
            - ln_gamma(self.abs + 0.5 * n);
        ln.exp()
    }

    /// Normalizing constant of the forward Fourier-Bessel transform,
    /// `prod [2^{gamma_i - 1/2} Gamma(gamma_i + 1/2)]^{-1}`.
    pub fn fourier_constant(&self) -> f64 {
        self.values
            .iter()
            .map(|g| 1.0 / (2f64.powf(g - 0.5) * gamma(g + 0.5).expect("gamma_i > 0")))
            .product()
    }

    /// Normalizing constant of the generalized shift,
    /// `prod Gamma(gamma_i + 1/2) / (Gamma(1/2) Gamma(gamma_i))`.
    pub fn shift_constant(&self) -> f64 {
        self.values
            .iter()
            .map(|&g| (ln_gamma(g + 0.5) - ln_gamma(0.5) - ln_gamma(g)).exp())
            .product()
    }
}

impl TryFrom<Vec<f64>> for GammaIndex {
    type Error = Error;
    fn try_from(v: Vec<f64>) -> Result<Self> {
        GammaIndex::new(v)
    }
}

impl From<GammaIndex> for Vec<f64> {
    fn from(g: GammaIndex) -> Self {
        g.values
    }
}

/// Nodes and measure-weighted quadrature weights along one axis.
#[derive(Debug, Clone, PartialEq)]
pub struct GridAxis {
    pub nodes: Vec<f64>,
    /// Gauss-Legendre weight times `x^{2 gamma_i}`.
    pub weights: Vec<f64>,
    /// Barycentric interpolation weights of the Legendre nodes.
    pub(crate) bary: Vec<f64>,
}

impl GridAxis {
    fn new(gamma_axis: f64, x_max: f64, points: usize) -> Result<Self> {
        let base = gauss_legendre(points, -1.0, 1.0)?;
        let half = 0.5 * x_max;
        let nodes: Vec<f64> = base.nodes.iter().map(|t| half * (1.0 + t)).collect();
        let weights = nodes
            .iter()
            .zip(&base.weights)
            .map(|(&x, &w)| w * half * x.powf(2.0 * gamma_axis))
            .collect();
        // lambda_j = (-1)^j sqrt((1 - t_j^2) w_j) for Gauss-Legendre points
        let bary = base
            .nodes
            .iter()
            .zip(&base.weights)
            .enumerate()
            .map(|(j, (t, w))| {
                let s = ((1.0 - t * t) * w).sqrt();
                if j % 2 == 0 {
                    s
                } else {
                    -s
                }
            })
            .collect();
        Ok(Self { nodes, weights, bary })
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Lagrange basis values at `x`; returns a unit vector when `x` is a node.
    pub fn lagrange_row(&self, x: f64, out: &mut [f64]) {
        debug_assert_eq!(out.len(), self.len());
        let mut denom = 0.0;
        for (j, (&xj, &lj)) in self.nodes.iter().zip(&self.bary).enumerate() {
            let d = x - xj;
            if d == 0.0 {
                out.iter_mut().for_each(|v| *v = 0.0);
                out[j] = 1.0;
                return;
            }
            let t = lj / d;
            out[j] = t;
            denom += t;
        }
        let inv = 1.0 / denom;
        out.iter_mut().for_each(|v| *v *= inv);
    }
}

/// Truncated tensor-product quadrature grid on `(0, x_max]^n` for `mu_gamma`.
#[derive(Debug, Clone, PartialEq)]
pub struct TensorGrid {
    gamma: GammaIndex,
    x_max: f64,
    axes: Vec<GridAxis>,
}

impl TensorGrid {
    pub fn new(gamma: GammaIndex, x_max: f64, points_per_axis: usize) -> Result<Self> {
        if !(x_max > 0.0) || !x_max.is_finite() {
            return Err(Error::InvalidArgument(format!("x_max must be positive, got {x_max}")));
        }
        if points_per_axis < 8 {
            return Err(Error::InvalidArgument(format!(
                "need at least 8 points per axis, got {points_per_axis}"
            )));
        }
        let axes = gamma
            .values()
            .iter()
            .map(|&g| GridAxis::new(g, x_max, points_per_axis))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { gamma, x_max, axes })
    }

    pub fn gamma(&self) -> &GammaIndex {
        &self.gamma
    }

    pub fn x_max(&self) -> f64 {
        self.x_max
    }

    pub fn n(&self) -> usize {
        self.axes.len()
    }

    pub fn axes(&self) -> &[GridAxis] {
        &self.axes
    }

    pub fn axis(&self, i: usize) -> &GridAxis {
        &self.axes[i]
    }

    pub fn shape(&self) -> Vec<usize> {
        self.axes.iter().map(GridAxis::len).collect()
    }

    pub fn node_count(&self) -> usize {
        self.shape().iter().product()
    }

    /// Coordinates of the node with the given multi-index.
    pub fn point(&self, index: &[usize]) -> Vec<f64> {
        index.iter().zip(&self.axes).map(|(&i, a)| a.nodes[i]).collect()
    }

    /// Exact measure of the box, `prod x_max^{2 gamma_i + 1} / (2 gamma_i + 1)`.
    pub fn box_measure(&self) -> f64 {
        self.gamma
            .values()
            .iter()
            .map(|g| self.x_max.powf(2.0 * g + 1.0) / (2.0 * g + 1.0))
            .product()
    }

    pub(crate) fn same_layout(&self, other: &TensorGrid) -> bool {
        self == other
    }
}

/// Convenience constructor mirroring the free-function style of the rest of
/// the crate.
pub fn build_tensor_grid(gamma: GammaIndex, x_max: f64, points_per_axis: usize) -> Result<TensorGrid> {
    TensorGrid::new(gamma, x_max, points_per_axis)
}

/// Function values sampled at every node of a [`TensorGrid`].
#[derive(Debug, Clone)]
pub struct GridFunction {
    grid: Arc<TensorGrid>,
    values: ArrayD<f64>,
}

impl GridFunction {
    pub fn new(grid: Arc<TensorGrid>, values: ArrayD<f64>) -> Result<Self> {
        if values.shape() != grid.shape().as_slice() {
            return Err(Error::GridMismatch(format!(
                "values shape {:?} does not match grid {:?}",
                values.shape(),
                grid.shape()
            )));
        }
        Ok(Self { grid, values })
    }

    pub fn zeros(grid: Arc<TensorGrid>) -> Self {
        let values = ArrayD::zeros(IxDyn(&grid.shape()));
        Self { grid, values }
    }

    /// Samples `f` at every node.
    pub fn from_fn(grid: Arc<TensorGrid>, f: impl Fn(&[f64]) -> f64 + Sync) -> Self {
        use rayon::prelude::*;
        let shape = grid.shape();
        let total: usize = shape.iter().product();
        let g = &grid;
        let vals: Vec<f64> = (0..total)
            .into_par_iter()
            .map(|flat| {
                let mut rem = flat;
                let mut p = vec![0.0; shape.len()];
                for ax in (0..shape.len()).rev() {
                    p[ax] = g.axis(ax).nodes[rem % shape[ax]];
                    rem /= shape[ax];
                }
                f(&p)
            })
            .collect();
        let values = ArrayD::from_shape_vec(IxDyn(&shape), vals).expect("grid shape");
        Self { grid, values }
    }

    pub fn grid(&self) -> &Arc<TensorGrid> {
        &self.grid
    }

    pub fn values(&self) -> &ArrayD<f64> {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut ArrayD<f64> {
        &mut self.values
    }

    pub fn into_values(self) -> ArrayD<f64> {
        self.values
    }

    /// Pointwise map producing a function on the same grid.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self { grid: self.grid.clone(), values: self.values.mapv(f) }
    }

    /// `a * self + b * other`.
    pub fn axpby(&self, a: f64, other: &GridFunction, b: f64) -> Result<Self> {
        if !self.grid.same_layout(&other.grid) {
            return Err(Error::GridMismatch("functions live on different grids".into()));
        }
        let mut values = self.values.clone();
        Zip::from(&mut values).and(&other.values).for_each(|v, &o| *v = a * *v + b * o);
        Ok(Self { grid: self.grid.clone(), values })
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }

    /// Integral against `mu_gamma` by tensor contraction with pairwise sums.
    pub fn integrate(&self) -> f64 {
        let mut acc = self.values.clone();
        for axis in (0..self.grid.n()).rev() {
            let w = &self.grid.axis(axis).weights;
            let row = Array2::from_shape_vec((1, w.len()), w.clone()).expect("row shape");
            acc = contract_axis(&acc, axis, &row);
        }
        acc.iter().next().copied().unwrap_or(0.0)
    }

    /// `(int |f|^p d mu_gamma)^{1/p}`.
    pub fn lp_norm(&self, p: f64) -> Result<f64> {
        if !(p >= 1.0) {
            return Err(Error::InvalidArgument(format!("p must be at least 1, got {p}")));
        }
        let pow = self.map(|v| v.abs().powf(p));
        Ok(pow.integrate().max(0.0).powf(1.0 / p))
    }

    /// Tensor barycentric interpolation at an arbitrary point inside the box.
    pub fn interpolate(&self, x: &[f64]) -> Result<f64> {
        check_dim(self.grid.n(), x.len())?;
        let mut acc = self.values.clone();
        for axis in (0..self.grid.n()).rev() {
            let a = self.grid.axis(axis);
            let mut row = vec![0.0; a.len()];
            a.lagrange_row(x[axis].clamp(0.0, self.grid.x_max()), &mut row);
            let m = Array2::from_shape_vec((1, row.len()), row).expect("row shape");
            acc = contract_axis(&acc, axis, &m);
        }
        Ok(acc.iter().next().copied().unwrap_or(0.0))
    }

    /// CSV with header `x_1,...,x_n,value`, one row per node in row-major
    /// order, numbers printed with 17 significant digits.
    pub fn to_csv(&self) -> String {
        let n = self.grid.n();
        let mut out = String::new();
        let header: Vec<String> = (1..=n).map(|i| format!("x_{i}")).collect();
        out.push_str(&header.join(","));
        out.push_str(",value\n");
        for (idx, v) in self.values.indexed_iter() {
            for (i, &k) in idx.slice().iter().enumerate() {
                let _ = write!(out, "{:.16e},", self.grid.axis(i).nodes[k]);
            }
            let _ = writeln!(out, "{v:.16e}");
        }
        out
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut f = std::fs::File::create(path)?;
        f.write_all(self.to_csv().as_bytes())?;
        Ok(())
    }

    /// Reads values written by [`GridFunction::to_csv`] back onto `grid`.
    pub fn read_csv(grid: Arc<TensorGrid>, reader: impl BufRead) -> Result<Self> {
        let n = grid.n();
        let mut lines = reader.lines();
        let header = lines.next().ok_or_else(|| Error::Io("empty CSV".into()))??;
        if header.split(',').count() != n + 1 {
            return Err(Error::GridMismatch(format!("CSV header {header:?} does not have {n} axes")));
        }
        let mut vals = Vec::with_capacity(grid.node_count());
        for line in lines {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let last = line.rsplit(',').next().unwrap_or("");
            vals.push(
                last.trim()
                    .parse::<f64>()
                    .map_err(|e| Error::Io(format!("bad value {last:?}: {e}")))?,
            );
        }
        let values = ArrayD::from_shape_vec(IxDyn(&grid.shape()), vals)
            .map_err(|e| Error::GridMismatch(e.to_string()))?;
        Self::new(grid, values)
    }
}

/// Applies the matrix `m` (rows: output index, columns: input index) along
/// `axis`. Each output entry is a pairwise dot product, so results do not
/// depend on how lanes are scheduled across threads.
pub fn contract_axis(input: &ArrayD<f64>, axis: usize, m: &Array2<f64>) -> ArrayD<f64> {
    let mut shape = input.shape().to_vec();
    assert_eq!(shape[axis], m.ncols(), "matrix does not match axis length");
    shape[axis] = m.nrows();
    let mut out = ArrayD::zeros(IxDyn(&shape));
    let rows: Vec<Vec<f64>> = m.outer_iter().map(|r| r.to_vec()).collect();
    Zip::from(out.lanes_mut(Axis(axis)))
        .and(input.lanes(Axis(axis)))
        .par_for_each(|mut o, lane| {
            let lane: Vec<f64> = lane.to_vec();
            for (ov, row) in o.iter_mut().zip(&rows) {
                *ov = pairwise_dot(row, &lane);
            }
        });
    out
}
