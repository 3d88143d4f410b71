//! Verification suites: each check group turns library results into report
//! rows with their built-in tolerances.

use std::f64::consts::PI;
use std::str::FromStr;
use std::sync::Arc;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::fourier::{
    fb_forward, fb_forward_at, fb_inverse, gaussian_transform, harmonic_gaussian_transform, FBPlan,
};
use crate::grid::{GammaIndex, GridFunction, TensorGrid};
use crate::mean_value::{
    mean_value_check, normalized_sphere_mean, pizzetti_coeffs, pizzetti_mean_fn, pizzetti_mean_poly,
    profile_moment, radial_bessel_fd, shifted_mean_value_check, v_recursion,
};
use crate::poly::{b_harmonic_basis, EvenPoly};
use crate::report::{num, Kind, Row, RunConfig, Timing, VerificationReport};
use crate::riesz::{
    elliptic_estimate_probe, gaussian_family, lp_boundedness_probe, multiplier_field, priori_bound_probe,
    ratio_spread, riesz_spatial, riesz_spectral_at, riesz_transform_at, ProbeRow, RieszKernel,
};
use crate::shift::{b_convolve_sampled, shift, shift_grid, ShiftOperatorPlan};
use crate::special::{gamma as gamma_fn, normalized_j, poisson_representation, BesselOrder};
use crate::sphere::SphereRule;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Special,
    Shift,
    Transform,
    MeanValue,
    Pizzetti,
    Riesz,
    Estimates,
    All,
}

impl Suite {
    pub const ALL: [Suite; 7] =
        [Suite::Special, Suite::Shift, Suite::Transform, Suite::MeanValue, Suite::Pizzetti, Suite::Riesz, Suite::Estimates];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Special => "special",
            Suite::Shift => "shift",
            Suite::Transform => "transform",
            Suite::MeanValue => "mean-value",
            Suite::Pizzetti => "pizzetti",
            Suite::Riesz => "riesz",
            Suite::Estimates => "estimates",
            Suite::All => "all",
        }
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .iter()
            .copied()
            .chain([Suite::All])
            .find(|x| x.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown suite {s:?}")))
    }
}

/// Plans shared by the check groups, built once per run.
struct Ctx<'a> {
    config: &'a RunConfig,
    gamma: GammaIndex,
    grid: Arc<TensorGrid>,
}

impl Ctx<'_> {
    fn tol(&self, check: &str, default: f64) -> f64 {
        self.config.tolerance(check, default)
    }

    fn shift_plan(&self) -> Result<ShiftOperatorPlan> {
        ShiftOperatorPlan::new(self.gamma.clone(), self.config.angles)
    }

    fn sphere(&self) -> Result<SphereRule> {
        SphereRule::new(self.gamma.clone(), self.config.sphere_points)
    }

    fn fb_plan(&self) -> Result<FBPlan> {
        FBPlan::with_default_frequency(self.grid.clone())
    }

    fn gaussian(&self, alpha: f64) -> GridFunction {
        GridFunction::from_fn(self.grid.clone(), move |x| (-alpha * sq(x)).exp())
    }

    /// Five interior test points, cycling the planar ones over the axes.
    fn interior_points(&self) -> Vec<Vec<f64>> {
        let base = [[1.0, 1.0], [0.5, 1.0], [1.0, 0.5], [1.5, 0.7], [0.8, 1.6]];
        base.iter().map(|b| (0..self.gamma.n()).map(|i| b[i % 2]).collect()).collect()
    }

    /// 25 frequency points on the 5 x 5 lattice over the first two axes.
    fn frequency_points(&self) -> Vec<Vec<f64>> {
        let t = [0.3, 0.8, 1.3, 1.8, 2.3];
        let n = self.gamma.n();
        let mut out = Vec::new();
        for &a in &t {
            for &b in &t {
                out.push((0..n).map(|i| if i % 2 == 0 { a } else { b }).collect());
            }
        }
        if n == 1 {
            out.dedup();
        }
        out
    }
}

fn sq(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum()
}

fn nums(v: &[f64]) -> Value {
    Value::Array(v.iter().map(|x| num(*x)).collect())
}

type Group = fn(&Ctx) -> Result<Vec<Row>>;

fn groups(suite: Suite) -> Vec<(&'static str, Group)> {
    match suite {
        Suite::Special => vec![
            ("j-closed-forms", special_closed_forms),
            ("poisson-vs-series", special_poisson),
            ("bessel-ode-residual", special_ode),
            ("gamma-function", special_gamma),
            ("sphere-measure", special_sphere_measure),
        ],
        Suite::Shift => vec![
            ("shift-identity", shift_identity),
            ("shift-of-one", shift_of_one),
            ("shift-square-1d", shift_square),
            ("shift-kernel-product", shift_kernel_product),
            ("shift-integral", shift_integral),
        ],
        Suite::Transform => vec![
            ("fb-gaussian-pair", fb_gaussian_pair),
            ("fb-round-trip", fb_round_trip),
            ("fb-eigenrelation", fb_eigenrelation),
            ("fb-convolution-theorem", fb_convolution),
            ("fb-scaling", fb_scaling),
            ("harmonic-gaussian-transform", fb_harmonic_gaussian),
        ],
        Suite::MeanValue => vec![
            ("mvt-constant", mvt_constant),
            ("mean-value", mvt_polynomials),
            ("mean-value-shifted", mvt_shifted),
        ],
        Suite::Pizzetti => vec![
            ("pizzetti-series", pizzetti_series),
            ("pizzetti-ratio", pizzetti_ratio),
            ("pizzetti-remainder", pizzetti_remainder),
            ("v-recursion", pizzetti_profiles),
        ],
        Suite::Riesz => vec![
            ("riesz-multiplier", riesz_multiplier),
            ("riesz-kernel", riesz_kernel_checks),
            ("riesz-multiplier-field", riesz_field),
        ],
        Suite::Estimates => vec![
            ("priori-bound", estimates_priori),
            ("elliptic-estimate", estimates_elliptic),
            ("lp-boundedness", estimates_lp),
        ],
        Suite::All => Suite::ALL.iter().flat_map(|s| groups(*s)).collect(),
    }
}

/// Runs a suite. A check group that errors becomes a single failed row; the
/// returned timings go to the sidecar file, not the report.
pub fn run_suite(config: &RunConfig, suite: Suite) -> Result<(VerificationReport, Vec<Timing>)> {
    config.validate()?;
    let gamma = config.gamma_index();
    let grid = Arc::new(TensorGrid::new(gamma.clone(), config.grid.x_max, config.grid.points)?);
    let ctx = Ctx { config, gamma, grid };
    let mut rows = Vec::new();
    let mut timings = Vec::new();
    for (name, group) in groups(suite) {
        let start = Instant::now();
        let got = match group(&ctx) {
            Ok(r) => r,
            Err(e) => vec![Row::failed(name, json!({}), &e)],
        };
        timings.push(Timing { group: name.into(), rows: got.len(), seconds: start.elapsed().as_secs_f64() });
        rows.extend(got);
    }
    Ok((VerificationReport::new(suite.name(), config.clone(), rows), timings))
}

// special

fn special_closed_forms(c: &Ctx) -> Result<Vec<Row>> {
    let mut worst = [0.0f64; 2];
    for i in 0..1000 {
        let r = 50.0 * i as f64 / 999.0;
        let sinc = if r == 0.0 { 1.0 } else { r.sin() / r };
        worst[0] = worst[0].max((normalized_j(BesselOrder::new(0.5)?, r)? - sinc).abs());
        worst[1] = worst[1].max((normalized_j(BesselOrder::new(-0.5)?, r)? - r.cos()).abs());
    }
    let inputs = json!({"r_min": 0.0, "r_max": 50.0, "points": 1000});
    Ok(vec![
        Row::new("j-half-closed-form", Kind::Abs, inputs.clone(), worst[0], 0.0, c.tol("j-half-closed-form", 1e-12)),
        Row::new("j-minus-half-closed-form", Kind::Abs, inputs, worst[1], 0.0, c.tol("j-minus-half-closed-form", 1e-12)),
    ])
}

fn special_poisson(c: &Ctx) -> Result<Vec<Row>> {
    [0.3, 0.5, 1.0, 1.5, 3.0]
        .iter()
        .map(|&g| {
            let mut worst = 0.0f64;
            for i in 0..=40 {
                let r = 20.0 * i as f64 / 40.0;
                let a = poisson_representation(g, r, 64)?;
                let b = normalized_j(BesselOrder::from_gamma(g)?, r)?;
                worst = worst.max((a - b).abs());
            }
            let inputs = json!({"gamma": g, "r_max": 20.0, "points": 41, "quad_points": 64});
            Ok(Row::new("poisson-vs-series", Kind::Abs, inputs, worst, 0.0, c.tol("poisson-vs-series", 1e-10)))
        })
        .collect()
}

fn special_ode(c: &Ctx) -> Result<Vec<Row>> {
    [0.5, 1.5, 3.0]
        .iter()
        .map(|&g| {
            let order = BesselOrder::from_gamma(g)?;
            let u = |x: f64| normalized_j(order, x);
            let h = 1e-4;
            let mut worst = 0.0f64;
            for i in 0..=195 {
                let r = 0.5 + 0.1 * i as f64;
                let (rp, rm) = (r + h, r - h);
                let (hp, hm) = (rp - r, r - rm);
                let (up, u0, um) = (u(rp)?, u(r)?, u(rm)?);
                let d2 = 2.0 * ((up - u0) / hp - (u0 - um) / hm) / (hp + hm);
                let d1 = (up - um) / (hp + hm);
                worst = worst.max((d2 + 2.0 * g / r * d1 + u0).abs());
            }
            let inputs = json!({"gamma": g, "r_min": 0.5, "r_max": 20.0, "h": h});
            Ok(Row::new("bessel-ode-residual", Kind::Abs, inputs, worst, 0.0, c.tol("bessel-ode-residual", 1e-7)))
        })
        .collect()
}

fn special_gamma(c: &Ctx) -> Result<Vec<Row>> {
    let mut worst = 0.0f64;
    for i in 1..=200 {
        let x = 0.05 + 49.0 * i as f64 / 200.0;
        let lhs = gamma_fn(x + 1.0)?;
        worst = worst.max((lhs - x * gamma_fn(x)?).abs() / lhs);
    }
    let mut rows = vec![Row::new(
        "gamma-recurrence",
        Kind::Abs,
        json!({"x_min": 0.05, "x_max": 49.05, "points": 200}),
        worst,
        0.0,
        c.tol("gamma-recurrence", 1e-13),
    )];
    rows.push(Row::new("gamma-half-squared", Kind::Rel, json!({"x": 0.5}), gamma_fn(0.5)?.powi(2), PI, c.tol("gamma-half-squared", 1e-14)));
    for (x, want) in [(1.0, 1.0), (5.0, 24.0), (10.0, 362880.0), (2.5, 0.75 * PI.sqrt())] {
        rows.push(Row::new("gamma-value", Kind::Rel, json!({"x": x}), gamma_fn(x)?, want, c.tol("gamma-value", 1e-14)));
    }
    Ok(rows)
}

fn special_sphere_measure(c: &Ctx) -> Result<Vec<Row>> {
    let cases = [(vec![0.5, 0.5], 0.5), (vec![0.5, 1.5], 0.25), (vec![1.0, 1.0], PI / 16.0)];
    cases
        .into_iter()
        .map(|(g, want)| {
            let rule = SphereRule::new(GammaIndex::new(g.clone())?, c.config.sphere_points)?;
            let inputs = json!({"gamma": g, "sphere_points": c.config.sphere_points});
            Ok(Row::new("sphere-measure", Kind::Rel, inputs, rule.total_weight(), want, c.tol("sphere-measure", 1e-10)))
        })
        .collect()
}

// shift

fn gauss(x: &[f64]) -> f64 {
    (-sq(x)).exp()
}

fn shift_identity(c: &Ctx) -> Result<Vec<Row>> {
    let plan = c.shift_plan()?;
    let n = c.gamma.n();
    let zero = vec![0.0; n];
    let mut worst = 0.0f64;
    for x in c.interior_points() {
        worst = worst.max((shift(&plan, gauss, &x, &zero)? - gauss(&x)).abs());
    }
    let f = c.gaussian(1.0);
    let (s, _) = shift_grid(&plan, &f, &zero)?;
    worst = worst.max(s.axpby(1.0, &f, -1.0)?.max_abs());
    Ok(vec![Row::new("shift-identity", Kind::Abs, json!({"y": nums(&zero)}), worst, 0.0, c.tol("shift-identity", 0.0))])
}

fn shift_of_one(c: &Ctx) -> Result<Vec<Row>> {
    let plan = c.shift_plan()?;
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let n = c.gamma.n();
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let x: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..5.0)).collect();
        let y: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..5.0)).collect();
        worst = worst.max((shift(&plan, |_| 1.0, &x, &y)? - 1.0).abs());
    }
    Ok(vec![Row::new("shift-of-one", Kind::Abs, json!({"samples": 20, "seed": 7}), worst, 0.0, c.tol("shift-of-one", 1e-12))])
}

fn shift_square(c: &Ctx) -> Result<Vec<Row>> {
    let g = c.gamma.values()[0];
    let plan = ShiftOperatorPlan::new(GammaIndex::new(vec![g])?, c.config.angles)?;
    let mut rows = Vec::new();
    for i in 0..5 {
        for j in 0..5 {
            let (x, y) = (0.3 + 0.9 * i as f64, 0.1 + 1.1 * j as f64);
            let v = shift(&plan, |p| p[0] * p[0], &[x], &[y])?;
            let inputs = json!({"gamma": [g], "x": x, "y": y});
            rows.push(Row::new("shift-square-1d", Kind::Rel, inputs, v, x * x + y * y, c.tol("shift-square-1d", 1e-10)));
        }
    }
    Ok(rows)
}

fn shift_kernel_product(c: &Ctx) -> Result<Vec<Row>> {
    let plan = c.shift_plan()?;
    let n = c.gamma.n();
    let t: Vec<f64> = (0..n).map(|i| if i % 2 == 0 { 1.3 } else { 0.7 }).collect();
    let orders: Vec<BesselOrder> = c.gamma.values().iter().map(|&g| BesselOrder::from_gamma(g)).collect::<Result<_>>()?;
    let kernel = |x: &[f64]| -> f64 {
        x.iter().zip(&t).zip(&orders).map(|((x, t), o)| normalized_j(*o, x * t).unwrap_or(f64::NAN)).product()
    };
    let pts = c.interior_points();
    (0..2)
        .map(|i| {
            let (x, y) = (&pts[i], &pts[i + 3]);
            let lhs = shift(&plan, kernel, x, y)?;
            let inputs = json!({"x": nums(x), "y": nums(y), "t": nums(&t)});
            Ok(Row::new("shift-kernel-product", Kind::Abs, inputs, lhs, kernel(x) * kernel(y), c.tol("shift-kernel-product", 1e-8)))
        })
        .collect()
}

fn shift_integral(c: &Ctx) -> Result<Vec<Row>> {
    let plan = c.shift_plan()?;
    let f = c.gaussian(1.0);
    let before = f.integrate();
    let n = c.gamma.n();
    [[0.5, 0.5], [1.0, 2.0], [2.5, 0.3]]
        .iter()
        .map(|b| {
            let y: Vec<f64> = (0..n).map(|i| b[i % 2]).collect();
            let (s, diag) = shift_grid(&plan, &f, &y)?;
            Ok(Row::new("shift-integral", Kind::Rel, json!({"y": nums(&y), "f": "exp(-|x|^2)"}), s.integrate(), before, c.tol("shift-integral", 1e-8))
                .extra("clamped_fraction", num(diag.clamped_fraction)))
        })
        .collect()
}

// transform

fn fb_gaussian_pair(c: &Ctx) -> Result<Vec<Row>> {
    let mut rows = Vec::new();
    for alpha in [0.5, 1.0, 2.0] {
        let f = c.gaussian(alpha);
        for y in c.frequency_points() {
            let got = fb_forward_at(&f, &y)?;
            let want = gaussian_transform(&c.gamma, alpha, &y)?;
            rows.push(Row::new("fb-gaussian-pair", Kind::Rel, json!({"alpha": alpha, "y": nums(&y)}), got, want, c.tol("fb-gaussian-pair", 1e-6)));
        }
    }
    Ok(rows)
}

fn fb_round_trip(c: &Ctx) -> Result<Vec<Row>> {
    let plan = c.fb_plan()?;
    let f = c.gaussian(1.0);
    let back = fb_inverse(&plan, &fb_forward(&plan, &f)?)?;
    let err = back.axpby(1.0, &f, -1.0)?.max_abs();
    let inputs = json!({"f": "exp(-|x|^2)", "frequency_x_max": plan.output_grid().x_max()});
    Ok(vec![Row::new("fb-round-trip", Kind::Abs, inputs, err, 0.0, c.tol("fb-round-trip", 1e-6))
        .extra("plan_self_test", num(plan.round_trip_error()))])
}

fn fb_eigenrelation(c: &Ctx) -> Result<Vec<Row>> {
    let d = c.gamma.homogeneous_dim();
    let f = c.gaussian(1.0);
    let bf = GridFunction::from_fn(c.grid.clone(), |x| (4.0 * sq(x) - 2.0 * d) * (-sq(x)).exp());
    c.frequency_points()
        .into_iter()
        .map(|y| {
            let lhs = fb_forward_at(&bf, &y)?;
            let rhs = -sq(&y) * fb_forward_at(&f, &y)?;
            Ok(Row::new("fb-eigenrelation", Kind::Rel, json!({"y": nums(&y)}), lhs, rhs, c.tol("fb-eigenrelation", 1e-5)))
        })
        .collect()
}

fn fb_convolution(c: &Ctx) -> Result<Vec<Row>> {
    let points = c.config.grid.points;
    let grid = Arc::new(TensorGrid::new(c.gamma.clone(), c.config.grid.x_max, points)?);
    let plan = c.shift_plan()?;
    let f = GridFunction::from_fn(grid.clone(), gauss);
    let phi = GridFunction::from_fn(grid, |x| (-2.0 * sq(x)).exp());
    let (conv, _) = b_convolve_sampled(&plan, &f, &phi)?;
    let cfb = c.gamma.fourier_constant();
    c.frequency_points()
        .into_iter()
        .map(|y| {
            let lhs = fb_forward_at(&conv, &y)?;
            let rhs = gaussian_transform(&c.gamma, 1.0, &y)? * gaussian_transform(&c.gamma, 2.0, &y)? / cfb;
            let inputs = json!({"y": nums(&y), "f": "exp(-|x|^2)", "phi": "exp(-2|x|^2)", "points": points});
            Ok(Row::new("fb-convolution-theorem", Kind::Rel, inputs, lhs, rhs, c.tol("fb-convolution-theorem", 1e-4)))
        })
        .collect()
}

fn fb_scaling(c: &Ctx) -> Result<Vec<Row>> {
    // the dilated Gaussian exp(-|x|^2/4) needs a wider box than the default
    let x_max = 1.5 * c.config.grid.x_max;
    let points = c.config.grid.points * 4 / 3;
    let grid = Arc::new(TensorGrid::new(c.gamma.clone(), x_max, points)?);
    let d = c.gamma.homogeneous_dim();
    let f = GridFunction::from_fn(grid.clone(), gauss);
    let mut rows = Vec::new();
    for alpha in [0.5, 2.0] {
        let fa = GridFunction::from_fn(grid.clone(), |x| (-alpha * alpha * sq(x)).exp());
        for y in c.frequency_points() {
            let lhs = fb_forward_at(&fa, &y)?;
            let ys: Vec<f64> = y.iter().map(|v| v / alpha).collect();
            let rhs = alpha.powf(-d) * fb_forward_at(&f, &ys)?;
            let inputs = json!({"alpha": alpha, "y": nums(&y), "x_max": x_max, "points": points});
            rows.push(Row::new("fb-scaling", Kind::Rel, inputs, lhs, rhs, c.tol("fb-scaling", 1e-6)));
        }
    }
    Ok(rows)
}

fn fb_harmonic_gaussian(c: &Ctx) -> Result<Vec<Row>> {
    let mut rows = Vec::new();
    for k in [2, 4] {
        for (b, p) in b_harmonic_basis(c.gamma.n(), k, &c.gamma)?.iter().enumerate() {
            let f = GridFunction::from_fn(c.grid.clone(), |x| p.eval(x).unwrap_or(f64::NAN) * (-sq(x)).exp());
            for y in c.frequency_points() {
                let got = fb_forward_at(&f, &y)?;
                let want = harmonic_gaussian_transform(p, &c.gamma, &y)?;
                let inputs = json!({"k": k, "basis_index": b, "y": nums(&y)});
                rows.push(Row::new("harmonic-gaussian-transform", Kind::Rel, inputs, got, want, c.tol("harmonic-gaussian-transform", 1e-5)));
            }
        }
    }
    Ok(rows)
}

// mean value

fn sphere_measure_closed_form(g: &GammaIndex) -> Result<f64> {
    let n = g.n() as f64;
    let mut num = 1.0;
    for &v in g.values() {
        num *= gamma_fn(v + 0.5)?;
    }
    Ok(num / (2f64.powf(n - 1.0) * gamma_fn(g.abs() + 0.5 * n)?))
}

fn mvt_constant(c: &Ctx) -> Result<Vec<Row>> {
    let rule = c.sphere()?;
    let want = sphere_measure_closed_form(&c.gamma)?;
    let got = crate::mean_value::sphere_mean(|_| 1.0, &rule, 1.0);
    Ok(vec![Row::new("mvt-constant", Kind::Rel, json!({"gamma": nums(c.gamma.values())}), got, want, c.tol("mvt-constant", 1e-10))])
}

fn mvt_polynomials(c: &Ctx) -> Result<Vec<Row>> {
    let rule = c.sphere()?;
    let n = c.gamma.n();
    let mut us: Vec<(String, EvenPoly)> = vec![("1".into(), EvenPoly::new(n, 0, [(vec![0; n], 1.0)])?)];
    for k in [2, 4] {
        for (b, p) in b_harmonic_basis(n, k, &c.gamma)?.into_iter().enumerate() {
            us.push((format!("k={k} basis[{b}]"), p));
        }
    }
    let tol = c.tol("mean-value", 1e-8);
    let mut rows = Vec::new();
    for (label, p) in &us {
        for r in [0.5, 1.0, 2.0] {
            let o = mean_value_check(|x| p.eval(x).unwrap_or(f64::NAN), &rule, r);
            rows.push(
                Row::with_scale("mean-value", Kind::Scaled, json!({"u": label, "R": r}), o.lhs, o.rhs, tol, o.scale)
                    .extra("residual", num(o.residual))
                    .require(o.residual_ok, "B u residual above 1e-6"),
            );
        }
    }
    Ok(rows)
}

fn mvt_shifted(c: &Ctx) -> Result<Vec<Row>> {
    let rule = c.sphere()?;
    let plan = c.shift_plan()?;
    let n = c.gamma.n();
    let p = b_harmonic_basis(n, 2, &c.gamma)?.remove(0);
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let ys: Vec<Vec<f64>> = (0..5).map(|_| (0..n).map(|_| rng.gen_range(0.2..2.0)).collect()).collect();
    ys.iter()
        .map(|y| {
            let o = shifted_mean_value_check(&plan, |x| p.eval(x).unwrap_or(f64::NAN), &rule, 1.0, y)?;
            Ok(Row::new("mean-value-shifted", Kind::Rel, json!({"u": "k=2 basis[0]", "R": 1.0, "y": nums(y)}), o.lhs, o.rhs, c.tol("mean-value-shifted", 1e-5))
                .require(o.residual_ok, "B u residual above 1e-6"))
        })
        .collect()
}

// pizzetti

fn pizzetti_series(c: &Ctx) -> Result<Vec<Row>> {
    let rule = c.sphere()?;
    let n = c.gamma.n();
    let r2 = EvenPoly::norm_squared(n);
    let mean = normalized_sphere_mean(|x| r2.eval(x).unwrap_or(f64::NAN), &rule, 1.0);
    let mut rows = vec![Row::new("pizzetti-norm-squared", Kind::Rel, json!({"u": "|x|^2", "R": 1.0}), mean, 1.0, c.tol("pizzetti-norm-squared", 1e-9))];
    let q = EvenPoly::new(n, 4, (0..n).map(|i| {
        let mut a = vec![0; n];
        a[i] = 4;
        (a, 1.0 + i as f64)
    }))?;
    for r in [0.5, 1.0, 2.0] {
        let lhs = normalized_sphere_mean(|x| q.eval(x).unwrap_or(f64::NAN), &rule, r);
        let rhs = pizzetti_mean_poly(&q, &c.gamma, r, 2)?;
        rows.push(Row::new("pizzetti-polynomial", Kind::Rel, json!({"u": "sum (i+1) x_i^4", "R": r}), lhs, rhs, c.tol("pizzetti-polynomial", 1e-9)));
    }
    Ok(rows)
}

fn pizzetti_ratio(c: &Ctx) -> Result<Vec<Row>> {
    let s = c.gamma.abs() + 0.5 * c.gamma.n() as f64;
    let coeffs = pizzetti_coeffs(&c.gamma, 1.0, 11);
    let mut rows = Vec::new();
    for eta in 0..=10usize {
        let got = coeffs.c[eta] / coeffs.direct(eta);
        rows.push(Row::new("pizzetti-coefficient", Kind::Rel, json!({"eta": eta, "R": 1.0}), got, 1.0, c.tol("pizzetti-coefficient", 1e-13)));
    }
    for eta in 0..=10usize {
        // the identity is about the Gamma-defined coefficients
        let ratio = coeffs.direct(eta + 1) / coeffs.direct(eta);
        let want = 0.25 / ((eta as f64 + 1.0) * (eta as f64 + s));
        rows.push(Row::new("pizzetti-ratio", Kind::Rel, json!({"eta": eta, "R": 1.0}), ratio, want, c.tol("pizzetti-ratio", 1e-13)));
    }
    Ok(rows)
}

fn pizzetti_remainder(c: &Ctx) -> Result<Vec<Row>> {
    let rule = c.sphere()?;
    let u = |x: &[f64]| (-sq(x)).exp();
    let mut rows = Vec::new();
    for r in [0.5, 1.0] {
        let mean = normalized_sphere_mean(u, &rule, r);
        let errs: Vec<f64> = (0..=2).map(|m| Ok((mean - pizzetti_mean_fn(u, &c.gamma, r, m)?).abs())).collect::<Result<_>>()?;
        for (m, e) in errs.iter().enumerate() {
            rows.push(Row::new("pizzetti-remainder", Kind::Info, json!({"u": "exp(-|x|^2)", "R": r, "m": m}), *e, 0.0, 0.0));
        }
        for m in 1..=2 {
            let inputs = json!({"u": "exp(-|x|^2)", "R": r, "m": m});
            rows.push(Row::new("pizzetti-remainder-decreases", Kind::Bound, inputs, errs[m], errs[m - 1], 0.0));
        }
    }
    Ok(rows)
}

fn pizzetti_profiles(c: &Ctx) -> Result<Vec<Row>> {
    let r_outer = 1.0;
    let v = v_recursion(&c.gamma, r_outer, 3, 0)?;
    let mut rows = Vec::new();
    let tb = c.tol("v-boundary", 1e-8);
    for (eta, p) in v.iter().enumerate() {
        rows.push(Row::new("v-boundary", Kind::Abs, json!({"eta": eta, "R": r_outer, "quantity": "v(R)"}), p.value_at(r_outer), 0.0, tb));
        if eta > 0 {
            rows.push(Row::new("v-boundary", Kind::Abs, json!({"eta": eta, "R": r_outer, "quantity": "v'(R)"}), p.derivative_at(r_outer), 0.0, tb));
        }
    }
    for eta in 0..v.len() - 1 {
        let mut worst = (0.0f64, 0.0, 0.0, 0.0);
        for i in 0..=14 {
            let r = r_outer * (0.2 + 0.05 * i as f64);
            let lhs = radial_bessel_fd(&v[eta + 1], r, 1e-3 * r_outer);
            let rhs = v[eta].value_at(r);
            let rel = (lhs - rhs).abs() / rhs.abs();
            if rel > worst.0 {
                worst = (rel, r, lhs, rhs);
            }
        }
        let inputs = json!({"eta": eta + 1, "R": r_outer, "worst_r": worst.1});
        rows.push(Row::new("v-recursion", Kind::Rel, inputs, worst.2, worst.3, c.tol("v-recursion", 1e-5)));
    }
    let coeffs = pizzetti_coeffs(&c.gamma, r_outer, 4);
    for eta in 0..3 {
        let got = profile_moment(&v[eta], c.gamma.sphere_measure());
        rows.push(Row::new("v-moment", Kind::Rel, json!({"eta": eta, "R": r_outer}), got, coeffs.c[eta + 1], c.tol("v-moment", 1e-5)));
    }
    Ok(rows)
}

// riesz

fn riesz_multiplier(c: &Ctx) -> Result<Vec<Row>> {
    let shift_plan = c.shift_plan()?;
    let fb = c.fb_plan()?;
    let rule = c.sphere()?;
    let p = b_harmonic_basis(c.gamma.n(), 2, &c.gamma)?.remove(0);
    let kernel = RieszKernel::new(p, c.gamma.clone())?;
    let f = c.gaussian(1.0);
    c.interior_points()
        .into_iter()
        .map(|x| {
            let s = riesz_spatial(&shift_plan, &kernel, &rule, &f, &x, &c.config.eps_seq)?;
            let t = riesz_spectral_at(&fb, &kernel, &f, &x)?;
            let inputs = json!({"k": 2, "gamma": nums(c.gamma.values()), "point": nums(&x), "f": "exp(-|x|^2)"});
            Ok(Row::new("riesz-multiplier", Kind::Rel, inputs, s.limit, t, c.tol("riesz-multiplier", 1e-2))
                .extra("spatial", num(s.limit))
                .extra("spectral", num(t))
                .extra("eps_values", nums(&s.values))
                .extra("c_k_printed", num(kernel.c_k()))
                .extra("c_k_fitted", num(kernel.fitted_c_k()))
                .require(!s.non_converged, "eps sequence did not converge"))
        })
        .collect()
}

fn riesz_kernel_checks(c: &Ctx) -> Result<Vec<Row>> {
    let rule = c.sphere()?;
    let mut rows = Vec::new();
    for k in [2, 4] {
        for (b, p) in b_harmonic_basis(c.gamma.n(), k, &c.gamma)?.into_iter().enumerate() {
            let kernel = RieszKernel::new(p, c.gamma.clone())?;
            rows.push(Row::new("riesz-kernel-mean-zero", Kind::Abs, json!({"k": k, "basis_index": b}), kernel.angular_mean(&rule), 0.0, c.tol("riesz-kernel-mean-zero", 1e-10)));
        }
    }
    if c.gamma.values() == [0.5, 1.5] {
        let p = EvenPoly::new(2, 2, [(vec![2, 0], 4.0), (vec![0, 2], -2.0)])?;
        let kernel = RieszKernel::new(p, c.gamma.clone())?;
        let got = riesz_transform_at(&kernel, &c.gaussian(1.0), &[1.0, 1.0])?;
        let inputs = json!({"p": "4x_1^2 - 2x_2^2", "f": "exp(-|x|^2)", "xi": [1.0, 1.0]});
        rows.push(Row::new("riesz-worked-spectral", Kind::Rel, inputs, got, -(-0.5f64).exp() / 8.0, c.tol("riesz-worked-spectral", 1e-6)));
    }
    Ok(rows)
}

fn riesz_field(c: &Ctx) -> Result<Vec<Row>> {
    let fb = c.fb_plan()?;
    let p = b_harmonic_basis(c.gamma.n(), 2, &c.gamma)?.remove(0);
    let kernel = RieszKernel::new(p, c.gamma.clone())?;
    let bound = kernel.multiplier_bound();
    let field = multiplier_field(&fb, |xi| kernel.multiplier(xi))?;
    let mut rows = vec![Row::new("riesz-multiplier-bound", Kind::Bound, json!({"k": 2}), field.max_abs(), bound, c.tol("riesz-multiplier-bound", 1e-12))];
    let mut worst = 0.0f64;
    for xi in c.frequency_points() {
        let a = kernel.multiplier(&xi)?;
        for s in [0.5, 2.0, 7.0] {
            let scaled: Vec<f64> = xi.iter().map(|v| s * v).collect();
            worst = worst.max((kernel.multiplier(&scaled)? - a).abs());
        }
    }
    rows.push(Row::new("riesz-homogeneity", Kind::Abs, json!({"k": 2, "scales": [0.5, 2.0, 7.0]}), worst, 0.0, c.tol("riesz-homogeneity", 1e-12)));
    let f = c.gaussian(1.0);
    for xi in c.frequency_points().into_iter().step_by(6) {
        let lhs = riesz_transform_at(&kernel, &f, &xi)?.abs();
        let rhs = bound * fb_forward_at(&f, &xi)?.abs();
        rows.push(Row::new("riesz-pointwise-bound", Kind::Bound, json!({"k": 2, "xi": nums(&xi)}), lhs, rhs, c.tol("riesz-pointwise-bound", 1e-12)));
    }
    Ok(rows)
}

// estimates

const SCALES: [f64; 3] = [0.5, 1.0, 2.0];
const EXPONENTS: [f64; 3] = [1.5, 2.0, 4.0];

fn ratio_rows(check: &str, rows: &[ProbeRow]) -> Vec<Row> {
    rows.iter()
        .map(|r| {
            Row::new(check, Kind::Info, json!({"f": r.label, "p": r.p}), r.ratio, 0.0, 0.0)
                .extra("numerator", num(r.numerator))
                .extra("denominator", num(r.denominator))
        })
        .collect()
}

fn spread_row(c: &Ctx, check: &str, p: f64, rows: &[ProbeRow], default: f64) -> Row {
    Row::new(check, Kind::Bound, json!({"p": p, "scales": SCALES}), ratio_spread(rows), 0.0, c.tol(check, default))
}

fn estimates_priori(c: &Ctx) -> Result<Vec<Row>> {
    let fb = c.fb_plan()?;
    let family = gaussian_family(&c.grid, &SCALES);
    let mut out = Vec::new();
    for p in EXPONENTS {
        let rows = priori_bound_probe(&fb, p, &family)?;
        out.extend(ratio_rows("priori-ratio", &rows));
        out.push(spread_row(c, "priori-dilation-spread", p, &rows, 0.1));
    }
    Ok(out)
}

fn estimates_elliptic(c: &Ctx) -> Result<Vec<Row>> {
    let fb = c.fb_plan()?;
    let n = c.gamma.n();
    let poly = EvenPoly::new(n, 2, (0..n).map(|i| {
        let mut a = vec![0; n];
        a[i] = 2;
        (a, 1.0 + i as f64)
    }))?;
    let family = gaussian_family(&c.grid, &SCALES);
    let mut out = Vec::new();
    for p in EXPONENTS {
        let rows = elliptic_estimate_probe(&fb, &poly, p, &family)?;
        out.extend(ratio_rows("elliptic-ratio", &rows));
        out.push(spread_row(c, "elliptic-dilation-spread", p, &rows, 0.1));
    }
    Ok(out)
}

fn estimates_lp(c: &Ctx) -> Result<Vec<Row>> {
    let fb = c.fb_plan()?;
    let p = b_harmonic_basis(c.gamma.n(), 2, &c.gamma)?.remove(0);
    let kernel = RieszKernel::new(p, c.gamma.clone())?;
    let family = gaussian_family(&c.grid, &SCALES);
    let grid_max = multiplier_field(&fb, |xi| kernel.multiplier(xi))?.max_abs();
    let mut out = Vec::new();
    for p in EXPONENTS {
        let rows = lp_boundedness_probe(&fb, &kernel, &[p], &family)?;
        out.extend(ratio_rows("lp-ratio", &rows));
        out.push(spread_row(c, "lp-dilation-spread", p, &rows, 0.05));
        if p == 2.0 {
            for r in &rows {
                let inputs = json!({"f": r.label, "p": 2.0});
                out.push(Row::new("lp-p2-bound", Kind::Bound, inputs, r.ratio, grid_max, c.tol("lp-p2-bound", 1e-6)));
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_names_round_trip() {
        for s in Suite::ALL.iter().chain([Suite::All].iter()) {
            assert_eq!(s.name().parse::<Suite>().unwrap(), *s);
        }
        assert!("nope".parse::<Suite>().is_err());
    }

    #[test]
    fn special_suite_passes_on_defaults() {
        let (r, t) = run_suite(&RunConfig::default(), Suite::Special).unwrap();
        assert!(r.all_passed(), "{:#?}", r.rows.iter().filter(|r| !r.pass).collect::<Vec<_>>());
        assert_eq!(t.len(), 5);
    }
}
