use std::sync::Arc;

use bhk::fourier::*;
use bhk::grid::{GammaIndex, GridFunction, TensorGrid};
use bhk::poly::{b_harmonic_basis, EvenPoly};
use bhk::shift::{b_convolve_sampled, ShiftOperatorPlan};
use bhk::sphere::SphereRule;

fn gamma() -> GammaIndex {
    GammaIndex::new(vec![0.5, 1.5]).unwrap()
}

fn grid(x_max: f64, points: usize) -> Arc<TensorGrid> {
    Arc::new(TensorGrid::new(gamma(), x_max, points).unwrap())
}

fn sq(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum()
}

fn freq_points() -> Vec<[f64; 2]> {
    let t = [0.3, 0.8, 1.3, 1.8, 2.3];
    t.iter().flat_map(|&a| t.iter().map(move |&b| [a, b])).collect()
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1e-300)
}

#[test]
fn gaussian_pair_on_frequency_grid() {
    let gr = grid(8.0, 96);
    for alpha in [0.5, 1.0, 2.0] {
        let f = GridFunction::from_fn(gr.clone(), |x| (-alpha * sq(x)).exp());
        for y in freq_points() {
            let got = fb_forward_at(&f, &y).unwrap();
            let want = gaussian_transform(&gamma(), alpha, &y).unwrap();
            assert!(rel(got, want) < 1e-6, "alpha={alpha} y={y:?}");
        }
    }
}

#[test]
fn one_dimensional_pair() {
    let g1 = GammaIndex::new(vec![0.5]).unwrap();
    let gr = Arc::new(TensorGrid::new(g1.clone(), 8.0, 64).unwrap());
    let plan = FBPlan::with_default_frequency(gr.clone()).unwrap();
    let f = GridFunction::from_fn(gr, |x| (-x[0] * x[0]).exp());
    let t = fb_forward(&plan, &f).unwrap();
    for (v, y) in t.values().iter().zip(&plan.output_grid().axis(0).nodes) {
        assert!((v - 0.5 * (-y * y / 4.0).exp()).abs() < 1e-12);
    }
    let back = fb_inverse(&plan, &t).unwrap();
    assert!(back.axpby(1.0, &f, -1.0).unwrap().max_abs() < 1e-12);
}

#[test]
fn default_plan_round_trip() {
    let plan = FBPlan::with_default_frequency(grid(8.0, 96)).unwrap();
    assert!(plan.round_trip_error() < 1e-6);
    let z = GridFunction::zeros(plan.output_grid().clone());
    assert_eq!(fb_inverse(&plan, &z).unwrap().max_abs(), 0.0);
    // the output lives on the frequency grid, not the spatial one
    let f = GridFunction::zeros(plan.output_grid().clone());
    assert!(fb_forward(&plan, &f).is_err());
}

#[test]
fn same_grid_plan_is_too_short_at_default_radius() {
    assert!(FBPlan::symmetric(grid(8.0, 96)).is_err());
    assert!(FBPlan::symmetric(grid(12.0, 96)).is_ok());
}

#[test]
fn convolution_theorem_with_normalizing_factor() {
    let gr = grid(8.0, 48);
    let plan = ShiftOperatorPlan::new(gamma(), 32).unwrap();
    let f = GridFunction::from_fn(gr.clone(), |x| (-sq(x)).exp());
    let phi = GridFunction::from_fn(gr.clone(), |x| (-2.0 * sq(x)).exp());
    let (conv, _) = b_convolve_sampled(&plan, &f, &phi).unwrap();
    let c = gamma().fourier_constant();
    for y in freq_points() {
        let lhs = fb_forward_at(&conv, &y).unwrap();
        let rhs = gaussian_transform(&gamma(), 1.0, &y).unwrap() * gaussian_transform(&gamma(), 2.0, &y).unwrap() / c;
        assert!(rel(lhs, rhs) < 1e-4, "y={y:?} {lhs} vs {rhs}");
    }
}

#[test]
fn bessel_operator_becomes_multiplication() {
    let gr = grid(8.0, 96);
    let (n, ga) = (2.0, gamma().abs());
    let f = GridFunction::from_fn(gr.clone(), |x| (-sq(x)).exp());
    let bf = GridFunction::from_fn(gr, |x| (4.0 * sq(x) - 2.0 * n - 4.0 * ga) * (-sq(x)).exp());
    for y in freq_points() {
        let lhs = fb_forward_at(&bf, &y).unwrap();
        let rhs = -sq(&y) * fb_forward_at(&f, &y).unwrap();
        assert!(rel(lhs, rhs) < 1e-5, "y={y:?}");
    }
}

#[test]
fn dilation_scaling() {
    let gr = grid(12.0, 128);
    let d = gamma().homogeneous_dim();
    let f = GridFunction::from_fn(gr.clone(), |x| (-sq(x)).exp());
    for alpha in [0.5, 2.0] {
        let fa = GridFunction::from_fn(gr.clone(), |x| (-alpha * alpha * sq(x)).exp());
        for y in freq_points() {
            let lhs = fb_forward_at(&fa, &y).unwrap();
            let ys = [y[0] / alpha, y[1] / alpha];
            let rhs = alpha.powf(-d) * fb_forward_at(&f, &ys).unwrap();
            assert!(rel(lhs, rhs) < 1e-6, "alpha={alpha} y={y:?}");
        }
    }
}

#[test]
fn harmonic_gaussian_theorem_for_every_basis_element() {
    let gr = grid(8.0, 96);
    for k in [2, 4] {
        for p in b_harmonic_basis(2, k, &gamma()).unwrap() {
            let f = GridFunction::from_fn(gr.clone(), |x| p.eval(x).unwrap() * (-sq(x)).exp());
            for y in freq_points() {
                let got = fb_forward_at(&f, &y).unwrap();
                let want = harmonic_gaussian_transform(&p, &gamma(), &y).unwrap();
                assert!(rel(got, want) < 1e-5, "k={k} y={y:?} {got} vs {want}");
            }
        }
    }
}

#[test]
fn harmonic_gaussian_dilation_ratio() {
    let p = EvenPoly::new(2, 2, [(vec![2, 0], 4.0), (vec![0, 2], -2.0)]).unwrap();
    let y = [0.7, 0.2];
    let a = harmonic_gaussian_transform(&p, &gamma(), &y).unwrap();
    let b = harmonic_gaussian_transform(&p, &gamma(), &[1.4, 0.4]).unwrap();
    assert!(rel(b / a, 4.0 * (-0.75 * sq(&y)).exp()) < 1e-14);
}

#[test]
fn regularized_limits_agree() {
    let rule = SphereRule::new(gamma(), 48).unwrap();
    let p = EvenPoly::new(2, 2, [(vec![2, 0], 4.0), (vec![0, 2], -2.0)]).unwrap();
    let eps = [0.4, 0.2, 0.1, 0.05];
    let f = |t: &[f64]| p.eval(t).unwrap();
    let phi = |x: &[f64]| (-(x[0] - 0.3).powi(2) - 2.0 * x[1] * x[1]).exp();
    let r = pv_regularized_limit(&rule, f, phi, &eps, 8.0).unwrap();
    assert!((r.lhs_limit - r.rhs_limit).abs() < 1e-4, "{r:?}");

    let radial = pv_regularized_limit(&rule, f, |x| (-sq(x)).exp(), &eps, 8.0).unwrap();
    assert!(radial.lhs_limit.abs() < 1e-12 && radial.rhs_limit.abs() < 1e-12);
    let zero = pv_regularized_limit(&rule, f, |_| 0.0, &eps, 8.0).unwrap();
    assert_eq!((zero.lhs_limit, zero.rhs_limit), (0.0, 0.0));
    assert!(pv_regularized_limit(&rule, |_| 1.0, phi, &eps, 8.0).is_err());
}

/// Pairs the closed-form kernel transform with a Gaussian and compares with
/// the principal value integral of the kernel against the Gaussian's
/// transform: `int F[K] g = int K F[g]`.
#[test]
fn kernel_transform_matches_regularized_integral() {
    let g = gamma();
    let p = EvenPoly::new(2, 2, [(vec![2, 0], 4.0), (vec![0, 2], -2.0)]).unwrap();
    let gr = grid(8.0, 96);
    let lhs_fn = GridFunction::from_fn(gr, |y| {
        if sq(y) == 0.0 {
            0.0
        } else {
            pv_kernel_transform(&p, &g, y).unwrap() * (-(y[0] - 0.5).powi(2) - y[1] * y[1]).exp()
        }
    });
    let lhs = lhs_fn.integrate();

    // F of the shifted-center Gaussian is not closed form; transform it numerically
    let src = GridFunction::from_fn(grid(8.0, 96), |y| (-(y[0] - 0.5).powi(2) - y[1] * y[1]).exp());
    let rule = SphereRule::new(g.clone(), 48).unwrap();
    let r = pv_regularized_limit(
        &rule,
        |t| p.eval(t).unwrap(),
        |x| fb_forward_at(&src, x).unwrap(),
        &[0.4, 0.2, 0.1, 0.05],
        12.0,
    )
    .unwrap();
    assert!(rel(r.rhs_limit, lhs) < 1e-4, "{} vs {lhs}", r.rhs_limit);
}
