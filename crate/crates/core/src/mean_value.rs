//! Weighted hemisphere means of B-harmonic functions, the Pizzetti-type
//! expansion and the radial profiles `v_eta` behind it.

use crate::error::{check_dim, Error, Result};
use crate::grid::GammaIndex;
use crate::poly::{apply_bessel, EvenPoly};
use crate::shift::{shift, ShiftOperatorPlan};
use crate::special::ln_gamma;
use crate::sphere::SphereRule;

/// `int_{S_+} u(R theta) prod theta_i^{2 gamma_i} dS`.
pub fn sphere_mean(u: impl Fn(&[f64]) -> f64 + Sync, rule: &SphereRule, r: f64) -> f64 {
    rule.integrate(|t| {
        let x: Vec<f64> = t.iter().map(|v| v * r).collect();
        u(&x)
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct MeanValueOutcome {
    pub lhs: f64,
    pub rhs: f64,
    pub abs_err: f64,
    /// `int |u(R theta)| dS`; the natural size of `lhs` when `rhs` is zero.
    pub scale: f64,
    /// Largest sampled `|B u|` relative to `max |u|`, by finite differences.
    pub residual: f64,
    pub residual_ok: bool,
}

/// Numerical `B u(x)` by 4th-order central differences.
pub fn bessel_fd(u: &(impl Fn(&[f64]) -> f64 + ?Sized), gamma: &GammaIndex, x: &[f64], h: f64) -> f64 {
    let mut p = x.to_vec();
    let mut total = 0.0;
    for i in 0..x.len() {
        let mut at = |d: f64| {
            p[i] = x[i] + d;
            let v = u(&p);
            p[i] = x[i];
            v
        };
        let (m2, m1, z, p1, p2) = (at(-2.0 * h), at(-h), at(0.0), at(h), at(2.0 * h));
        let d2 = (-p2 + 16.0 * p1 - 30.0 * z + 16.0 * m1 - m2) / (12.0 * h * h);
        let d1 = (-p2 + 8.0 * p1 - 8.0 * m1 + m2) / (12.0 * h);
        total += d2 + 2.0 * gamma.values()[i] / x[i] * d1;
    }
    total
}

fn residual_probe(u: &(impl Fn(&[f64]) -> f64 + Sync), rule: &SphereRule, r: f64) -> f64 {
    let gamma = rule.gamma();
    let mut worst: f64 = 0.0;
    let mut size: f64 = 0.0;
    for (j, t) in rule.nodes().iter().enumerate().step_by((rule.len() / 8).max(1)) {
        // interior sample points at a few radii
        let rho = r * (0.3 + 0.6 * ((j % 5) as f64 / 4.0));
        let x: Vec<f64> = t.iter().map(|v| (v * rho).max(0.05 * r)).collect();
        worst = worst.max(bessel_fd(u, gamma, &x, 1e-3 * r).abs());
        size = size.max(u(&x).abs());
    }
    worst / size.max(1e-300) * r * r
}

/// Compares `sphere_mean(u, R)` with `m(S_+) u(0)`. A failed B-residual
/// precondition is reported in the outcome, not raised.
pub fn mean_value_check(u: impl Fn(&[f64]) -> f64 + Sync, rule: &SphereRule, r: f64) -> MeanValueOutcome {
    let n = rule.gamma().n();
    let lhs = sphere_mean(&u, rule, r);
    let rhs = rule.gamma().sphere_measure() * u(&vec![0.0; n]);
    let scale = sphere_mean(|x| u(x).abs(), rule, r);
    let residual = residual_probe(&u, rule, r);
    MeanValueOutcome { lhs, rhs, abs_err: (lhs - rhs).abs(), scale, residual, residual_ok: residual < 1e-6 }
}

/// Shifted form: `int_{S_+} T^y u(R theta) dS` against `m(S_+) u(y)`.
pub fn shifted_mean_value_check(
    plan: &ShiftOperatorPlan,
    u: impl Fn(&[f64]) -> f64 + Sync,
    rule: &SphereRule,
    r: f64,
    y: &[f64],
) -> Result<MeanValueOutcome> {
    check_dim(rule.gamma().n(), y.len())?;
    let shifted = |x: &[f64]| shift(plan, &u, x, y).expect("dimensions checked");
    let lhs = sphere_mean(shifted, rule, r);
    let rhs = rule.gamma().sphere_measure() * u(y);
    let scale = sphere_mean(|x| shift(plan, &u, x, y).expect("dimensions checked").abs(), rule, r);
    let residual = residual_probe(&u, rule, r);
    Ok(MeanValueOutcome { lhs, rhs, abs_err: (lhs - rhs).abs(), scale, residual, residual_ok: residual < 1e-6 })
}

#[derive(Debug, Clone, PartialEq)]
pub struct PizzettiCoefficients {
    pub r: f64,
    pub gamma: GammaIndex,
    pub c: Vec<f64>,
}

/// `c_eta = (R/2)^{2 eta} Gamma(|gamma| + n/2) / (eta! Gamma(eta + |gamma| + n/2))`
/// by the ratio recurrence.
pub fn pizzetti_coeffs(gamma: &GammaIndex, r: f64, m: usize) -> PizzettiCoefficients {
    let s = gamma.abs() + 0.5 * gamma.n() as f64;
    let q = 0.25 * r * r;
    let mut c = Vec::with_capacity(m + 1);
    c.push(1.0);
    for eta in 0..m {
        let e = eta as f64;
        c.push(c[eta] * q / ((e + 1.0) * (e + s)));
    }
    PizzettiCoefficients { r, gamma: gamma.clone(), c }
}

impl PizzettiCoefficients {
    /// Direct Gamma-function evaluation of `c_eta`, independent of the recurrence.
    pub fn direct(&self, eta: usize) -> f64 {
        let s = self.gamma.abs() + 0.5 * self.gamma.n() as f64;
        let e = eta as f64;
        (2.0 * e * (0.5 * self.r).ln() + ln_gamma(s) - ln_gamma(e + 1.0) - ln_gamma(e + s)).exp()
    }
}

/// `sum_{eta <= m} c_eta (B^eta p)(0)` for a polynomial in `x_i^2`.
pub fn pizzetti_mean_poly(p: &EvenPoly, gamma: &GammaIndex, r: f64, m: usize) -> Result<f64> {
    let coeffs = pizzetti_coeffs(gamma, r, m);
    let mut cur = p.clone();
    let mut total = 0.0;
    for c in coeffs.c {
        total += c * cur.value_at_origin();
        if cur.degree() < 2 {
            break;
        }
        cur = apply_bessel(&cur, gamma)?;
    }
    Ok(total)
}

/// Taylor derivatives at the origin of a function even in every variable;
/// `u(-h e_i)` is taken as `u(h e_i)`.
fn even_taylor(u: &(impl Fn(&[f64]) -> f64 + ?Sized), n: usize, h: f64) -> (f64, Vec<f64>, Vec<f64>, Vec<Vec<f64>>) {
    let at = |steps: &[(usize, i32)]| {
        let mut x = vec![0.0; n];
        for &(i, k) in steps {
            x[i] = (k.abs() as f64) * h;
        }
        u(&x)
    };
    // 4th-order second-derivative stencil on even data
    let d2w = [(-2, -1.0 / 12.0), (-1, 16.0 / 12.0), (0, -30.0 / 12.0), (1, 16.0 / 12.0), (2, -1.0 / 12.0)];
    let d4w = [
        (-3, -1.0 / 6.0),
        (-2, 2.0),
        (-1, -39.0 / 6.0),
        (0, 56.0 / 6.0),
        (1, -39.0 / 6.0),
        (2, 2.0),
        (3, -1.0 / 6.0),
    ];
    let u0 = at(&[]);
    let mut u2 = vec![0.0; n];
    let mut u4 = vec![0.0; n];
    let mut u22 = vec![vec![0.0; n]; n];
    for i in 0..n {
        u2[i] = d2w.iter().map(|&(k, w)| w * at(&[(i, k)])).sum::<f64>() / (h * h);
        u4[i] = d4w.iter().map(|&(k, w)| w * at(&[(i, k)])).sum::<f64>() / h.powi(4);
        for j in i + 1..n {
            let mut s = 0.0;
            for &(a, wa) in &d2w {
                for &(b, wb) in &d2w {
                    s += wa * wb * at(&[(i, a), (j, b)]);
                }
            }
            u22[i][j] = s / h.powi(4);
            u22[j][i] = u22[i][j];
        }
    }
    (u0, u2, u4, u22)
}

/// `B^eta u(0)` for `eta <= 2` from finite-difference Taylor derivatives at
/// the origin, `h = 1e-2 R`.
pub fn bessel_powers_at_origin(u: &(impl Fn(&[f64]) -> f64 + ?Sized), gamma: &GammaIndex, r: f64, m: usize) -> Result<Vec<f64>> {
    if m > 2 {
        return Err(Error::InvalidArgument(format!("finite-difference B powers limited to m <= 2, got {m}")));
    }
    let n = gamma.n();
    let g = gamma.values();
    let (u0, u2, u4, u22) = even_taylor(u, n, 1e-2 * r);
    let b1: f64 = (0..n).map(|i| (1.0 + 2.0 * g[i]) * u2[i]).sum();
    let mut b2: f64 = (0..n).map(|i| (1.0 + 2.0 * g[i]) * (3.0 + 2.0 * g[i]) * u4[i] / 3.0).sum();
    for i in 0..n {
        for j in i + 1..n {
            b2 += 2.0 * (1.0 + 2.0 * g[i]) * (1.0 + 2.0 * g[j]) * u22[i][j];
        }
    }
    Ok([u0, b1, b2][..=m].to_vec())
}

/// Pizzetti partial sum for a callable, `m <= 2`.
pub fn pizzetti_mean_fn(u: impl Fn(&[f64]) -> f64, gamma: &GammaIndex, r: f64, m: usize) -> Result<f64> {
    let b = bessel_powers_at_origin(&u, gamma, r, m)?;
    let c = pizzetti_coeffs(gamma, r, m).c;
    Ok(c.iter().zip(&b).map(|(c, b)| c * b).sum())
}

/// Normalized mean `sphere_mean / m(S_+)`.
pub fn normalized_sphere_mean(u: impl Fn(&[f64]) -> f64 + Sync, rule: &SphereRule, r: f64) -> f64 {
    sphere_mean(u, rule, r) / rule.gamma().sphere_measure()
}

const PROFILE_POINTS: usize = 256;
const PANEL_POINTS: usize = 32;
const PROFILE_FLOOR: f64 = 1e-3;

/// Chebyshev-Lobatto points on [-1, 1], ascending.
fn lobatto(n: usize) -> Vec<f64> {
    (0..n).map(|j| -(std::f64::consts::PI * j as f64 / (n - 1) as f64).cos()).collect()
}

/// Chebyshev coefficients from values at ascending Lobatto points.
fn cheb_coeffs(values: &[f64]) -> Vec<f64> {
    let n = values.len();
    let m = (n - 1) as f64;
    (0..n)
        .map(|k| {
            let mut s = 0.0;
            for (j, v) in values.iter().enumerate() {
                // ascending order: t_j = -cos(pi j / m) = cos(pi (m - j) / m)
                let jj = (n - 1 - j) as f64;
                let half = if j == 0 || j == n - 1 { 0.5 } else { 1.0 };
                s += half * v * (std::f64::consts::PI * jj * k as f64 / m).cos();
            }
            let half = if k == 0 || k == n - 1 { 0.5 } else { 1.0 };
            2.0 / m * s * half
        })
        .collect()
}

fn cheb_eval(a: &[f64], t: f64) -> f64 {
    // Clenshaw
    let (mut b1, mut b2) = (0.0, 0.0);
    for &c in a.iter().skip(1).rev() {
        let b0 = 2.0 * t * b1 - b2 + c;
        b2 = b1;
        b1 = b0;
    }
    t * b1 - b2 + a[0]
}

/// Coefficients of the antiderivative on [-1, 1] (arbitrary constant).
fn cheb_integral(a: &[f64]) -> Vec<f64> {
    let n = a.len();
    let mut b = vec![0.0; n + 1];
    let get = |k: usize| if k < n { a[k] } else { 0.0 };
    b[1] = get(0) - 0.5 * get(2);
    for k in 2..=n {
        b[k] = (get(k - 1) - get(k + 1)) / (2.0 * k as f64);
    }
    b
}

fn cheb_derivative(a: &[f64]) -> Vec<f64> {
    let n = a.len();
    let mut d = vec![0.0; n + 1];
    for k in (0..n.saturating_sub(1)).rev() {
        d[k] = d[k + 2] + 2.0 * (k + 1) as f64 * a[k + 1];
    }
    d[0] *= 0.5;
    d.truncate(n.max(1));
    d
}

/// Radial function on `[1e-3 R, R]`, stored piecewise on Chebyshev-Lobatto
/// panels in `s = ln r`. Internally keeps `w = r^{d-2} v`, which stays
/// bounded; each panel resolves its own scale, so the `r^{-(d-2)}` growth
/// toward the inner radius does not pollute values near `R`.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialProfile {
    pub radii: Vec<f64>,
    pub values: Vec<f64>,
    pub r_outer: f64,
    exponent: f64,
    // panel p covers s in [edges[p], edges[p + 1]]
    edges: Vec<f64>,
    // w at the nodes of each panel, and its coefficients
    w: Vec<Vec<f64>>,
    coeffs: Vec<Vec<f64>>,
    panel_radii: Vec<Vec<f64>>,
}

impl RadialProfile {
    fn layout(r_outer: f64, panels: usize) -> (Vec<f64>, Vec<Vec<f64>>) {
        let s_hi = r_outer.ln();
        let s_lo = (PROFILE_FLOOR * r_outer).ln();
        let edges: Vec<f64> = (0..=panels).map(|p| s_lo + (s_hi - s_lo) * p as f64 / panels as f64).collect();
        let t = lobatto(PANEL_POINTS);
        let radii = (0..panels)
            .map(|p| {
                let (a, b) = (edges[p], edges[p + 1]);
                let mut r: Vec<f64> = t.iter().map(|t| (a + 0.5 * (t + 1.0) * (b - a)).exp()).collect();
                if p == 0 {
                    r[0] = PROFILE_FLOOR * r_outer;
                }
                if p == panels - 1 {
                    r[PANEL_POINTS - 1] = r_outer;
                }
                r
            })
            .collect();
        (edges, radii)
    }

    fn from_w(w: Vec<Vec<f64>>, edges: Vec<f64>, panel_radii: Vec<Vec<f64>>, r_outer: f64, exponent: f64) -> Self {
        let coeffs = w.iter().map(|w| cheb_coeffs(w)).collect();
        let mut radii = Vec::new();
        let mut values = Vec::new();
        for (p, (rs, ws)) in panel_radii.iter().zip(&w).enumerate() {
            let skip = if p == 0 { 0 } else { 1 };
            for (r, wv) in rs.iter().zip(ws).skip(skip) {
                radii.push(*r);
                values.push(wv * r.powf(-exponent));
            }
        }
        Self { radii, values, r_outer, exponent, edges, w, coeffs, panel_radii }
    }

    fn locate(&self, r: f64) -> (usize, f64) {
        let s = r.ln();
        let panels = self.w.len();
        let p = self.edges[1..panels].iter().take_while(|e| s > **e).count();
        let (a, b) = (self.edges[p], self.edges[p + 1]);
        (p, (2.0 * (s - a) / (b - a) - 1.0).clamp(-1.0, 1.0))
    }

    /// `r^{d-2} v(r)`.
    pub fn scaled_at(&self, r: f64) -> f64 {
        if r >= self.r_outer {
            let last = self.w.last().expect("panels");
            return last[last.len() - 1];
        }
        let (p, t) = self.locate(r);
        cheb_eval(&self.coeffs[p], t)
    }

    pub fn value_at(&self, r: f64) -> f64 {
        self.scaled_at(r) * r.powf(-self.exponent)
    }

    /// `v'(r)` by spectral differentiation of the stored profile.
    pub fn derivative_at(&self, r: f64) -> f64 {
        let (p, t) = self.locate(r.min(self.r_outer));
        let dw_dt = cheb_eval(&cheb_derivative(&self.coeffs[p]), t);
        let dw_dr = dw_dt * 2.0 / (self.edges[p + 1] - self.edges[p]) / r;
        (dw_dr - self.exponent * self.scaled_at(r) / r) * r.powf(-self.exponent)
    }

    /// `int_r^R g(rho, w(rho)) drho` at every panel node, by per-panel
    /// Chebyshev integration in s accumulated from the outer radius.
    fn tail_integral(&self, g: impl Fn(f64, f64) -> f64) -> Vec<Vec<f64>> {
        let panels = self.w.len();
        let t = lobatto(PANEL_POINTS);
        let mut out = vec![Vec::new(); panels];
        let mut carry = 0.0;
        for p in (0..panels).rev() {
            let vals: Vec<f64> =
                self.panel_radii[p].iter().zip(&self.w[p]).map(|(&r, &w)| g(r, w) * r).collect();
            let a = cheb_integral(&cheb_coeffs(&vals));
            let scale = 0.5 * (self.edges[p + 1] - self.edges[p]);
            let top = cheb_eval(&a, 1.0);
            out[p] = t.iter().map(|&t| carry + scale * (top - cheb_eval(&a, t))).collect();
            carry = out[p][0];
        }
        out
    }
}

/// Profiles `v_0, ..., v_{eta_max}` with
/// `v_0 = (1/m(S_+)) (d-2)^{-1} [r^{-(d-2)} - R^{-(d-2)}]` and
/// `v_{eta+1}(r) = [(d-2) r^{d-2}]^{-1} int_r^R rho v_eta(rho) [rho^{d-2} - r^{d-2}] drho`.
///
/// `radial_points` is split into panels of 32 points (0 selects 256).
pub fn v_recursion(gamma: &GammaIndex, r_outer: f64, eta_max: usize, radial_points: usize) -> Result<Vec<RadialProfile>> {
    let d = gamma.homogeneous_dim();
    if !(d > 2.0) {
        return Err(Error::InvalidArgument(format!("need n + 2|gamma| > 2, got {d}")));
    }
    if !(r_outer > 0.0) {
        return Err(Error::InvalidArgument(format!("radius must be positive, got {r_outer}")));
    }
    let points = if radial_points == 0 { PROFILE_POINTS } else { radial_points };
    if points < PANEL_POINTS {
        return Err(Error::InvalidArgument(format!("need at least {PANEL_POINTS} radial points, got {points}")));
    }
    let panels = points / PANEL_POINTS;
    let e = d - 2.0;
    let m = gamma.sphere_measure();
    // endpoint radii are exact, so w_0(R) is exactly zero
    let (edges, radii) = RadialProfile::layout(r_outer, panels);
    let w0: Vec<Vec<f64>> = radii
        .iter()
        .map(|rs| rs.iter().map(|r| (1.0 - (r / r_outer).powf(e)) / (m * e)).collect())
        .collect();
    let mut out = vec![RadialProfile::from_w(w0, edges.clone(), radii.clone(), r_outer, e)];
    for _ in 0..eta_max {
        let prev = out.last().expect("nonempty");
        // I1 = int rho^{d-1} v = int rho w ; I2 = int rho v = int rho^{3-d} w
        let i1 = prev.tail_integral(|r, w| r * w);
        let i2 = prev.tail_integral(|r, w| r.powf(1.0 - e) * w);
        let w: Vec<Vec<f64>> = radii
            .iter()
            .zip(i1.iter().zip(&i2))
            .map(|(rs, (a, b))| {
                rs.iter().zip(a.iter().zip(b)).map(|(r, (a, b))| (a - r.powf(e) * b) / e).collect()
            })
            .collect();
        out.push(RadialProfile::from_w(w, edges.clone(), radii.clone(), r_outer, e));
    }
    Ok(out)
}

/// Radial operator `v'' + ((d-1)/r) v'` by 4th-order central differences.
pub fn radial_bessel_fd(p: &RadialProfile, r: f64, h: f64) -> f64 {
    let v = |x: f64| p.value_at(x);
    let d = p.exponent + 2.0;
    let (m2, m1, z, p1, p2) = (v(r - 2.0 * h), v(r - h), v(r), v(r + h), v(r + 2.0 * h));
    let d2 = (-p2 + 16.0 * p1 - 30.0 * z + 16.0 * m1 - m2) / (12.0 * h * h);
    let d1 = (-p2 + 8.0 * p1 - 8.0 * m1 + m2) / (12.0 * h);
    d2 + (d - 1.0) / r * d1
}

/// `m(S_+) int_0^R rho^{d-1} v(rho) drho`, which reproduces `c_{eta+1}` from `v_eta`.
pub fn profile_moment(p: &RadialProfile, m_sphere: f64) -> f64 {
    let tail = p.tail_integral(|r, w| r * w);
    // the excised ball contributes about w(r_min) r_min^2 / 2
    let r0 = p.radii[0];
    m_sphere * (tail[0][0] + 0.5 * p.w[0][0] * r0 * r0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g() -> GammaIndex {
        GammaIndex::new(vec![0.5, 1.5]).unwrap()
    }

    #[test]
    fn coefficient_values() {
        let c = pizzetti_coeffs(&g(), 2.0, 3);
        assert_eq!(c.c[0], 1.0);
        assert!((c.c[1] - 1.0 / 3.0).abs() < 1e-16);
        let c = pizzetti_coeffs(&g(), 1.0, 1);
        assert!((c.c[1] - 1.0 / 12.0).abs() < 1e-17);
        let c = pizzetti_coeffs(&g(), 1.7, 10);
        for eta in 0..=10 {
            assert!((c.direct(eta) - c.c[eta]).abs() < 1e-13 * c.c[eta]);
        }
    }

    #[test]
    fn pizzetti_polynomial_series() {
        let r2 = EvenPoly::norm_squared(2);
        assert!((pizzetti_mean_poly(&r2, &g(), 1.0, 1).unwrap() - 1.0).abs() < 1e-15);
        let one = EvenPoly::new(2, 0, [(vec![0, 0], 1.0)]).unwrap();
        for m in 0..4 {
            assert_eq!(pizzetti_mean_poly(&one, &g(), 1.3, m).unwrap(), 1.0);
        }
        let p = EvenPoly::new(2, 2, [(vec![2, 0], 4.0), (vec![0, 2], -2.0)]).unwrap();
        assert_eq!(pizzetti_mean_poly(&p, &g(), 1.0, 3).unwrap(), 0.0);
    }

    #[test]
    fn finite_difference_powers_match_polynomial() {
        let p = EvenPoly::new(2, 4, [(vec![4, 0], 1.0), (vec![2, 2], -3.0), (vec![0, 4], 0.5)]).unwrap();
        let u = |x: &[f64]| 2.0 + x[0] * x[0] + p.eval(x).unwrap();
        let b = bessel_powers_at_origin(&u, &g(), 1.0, 2).unwrap();
        let q = EvenPoly::new(2, 2, [(vec![2, 0], 1.0)]).unwrap();
        let b1 = apply_bessel(&q, &g()).unwrap().value_at_origin();
        let b2 = apply_bessel(&apply_bessel(&p, &g()).unwrap(), &g()).unwrap().value_at_origin();
        assert!((b[0] - 2.0).abs() < 1e-14);
        assert!((b[1] - b1).abs() < 1e-8, "{} vs {b1}", b[1]);
        assert!((b[2] - b2).abs() < 1e-5 * b2.abs(), "{} vs {b2}", b[2]);
        assert!(bessel_powers_at_origin(&u, &g(), 1.0, 3).is_err());
    }

    #[test]
    fn chebyshev_integration_is_spectral() {
        let t = lobatto(33);
        let vals: Vec<f64> = t.iter().map(|t| (2.0 * t).exp()).collect();
        let a = cheb_integral(&cheb_coeffs(&vals));
        let got = cheb_eval(&a, 1.0) - cheb_eval(&a, -1.0);
        let want = ((2.0f64).exp() - (-2.0f64).exp()) / 2.0;
        assert!((got - want).abs() < 1e-14);
        let d = cheb_derivative(&cheb_coeffs(&vals));
        assert!((cheb_eval(&d, 0.3) - 2.0 * 0.6f64.exp()).abs() < 1e-12);
    }

    #[test]
    fn recursion_needs_positive_exponent() {
        let small = GammaIndex::new(vec![0.1]).unwrap();
        assert!(v_recursion(&small, 1.0, 2, 0).is_err());
    }
}
