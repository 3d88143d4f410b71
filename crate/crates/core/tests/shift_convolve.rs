use std::sync::Arc;

use bhk::grid::{GammaIndex, GridFunction, TensorGrid};
use bhk::shift::{b_convolve, b_convolve_at, b_convolve_sampled, shift, shift_grid, ShiftOperatorPlan};
use bhk::special::{normalized_j, BesselOrder};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn gamma() -> GammaIndex {
    GammaIndex::new(vec![0.5, 1.5]).unwrap()
}

fn gauss(x: &[f64]) -> f64 {
    (-(x.iter().map(|v| v * v).sum::<f64>())).exp()
}

#[test]
fn shift_of_one_is_one_at_random_points() {
    let plan = ShiftOperatorPlan::new(gamma(), 48).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..20 {
        let x = [rng.gen_range(0.0..5.0), rng.gen_range(0.0..5.0)];
        let y = [rng.gen_range(0.0..5.0), rng.gen_range(0.0..5.0)];
        assert!((shift(&plan, |_| 1.0, &x, &y).unwrap() - 1.0).abs() < 1e-12);
    }
}

#[test]
fn one_dimensional_square_at_25_pairs() {
    let plan = ShiftOperatorPlan::new(GammaIndex::new(vec![0.8]).unwrap(), 48).unwrap();
    for i in 0..5 {
        for j in 0..5 {
            let (x, y) = (0.3 + 0.9 * i as f64, 0.1 + 1.1 * j as f64);
            let v = shift(&plan, |p| p[0] * p[0], &[x], &[y]).unwrap();
            let want = x * x + y * y;
            assert!((v - want).abs() <= 1e-10 * want);
        }
    }
}

#[test]
fn kernel_product_formula() {
    let plan = ShiftOperatorPlan::new(gamma(), 48).unwrap();
    let g = gamma();
    let t = [1.3, 0.7];
    let j = |i: usize, r: f64| normalized_j(BesselOrder::from_gamma(g.values()[i]).unwrap(), r).unwrap();
    let kernel = |x: &[f64]| j(0, x[0] * t[0]) * j(1, x[1] * t[1]);
    for (x, y) in [([0.5, 1.0], [1.2, 0.3]), ([2.0, 0.4], [0.9, 1.9])] {
        let lhs = shift(&plan, kernel, &x, &y).unwrap();
        let rhs = kernel(&x) * kernel(&y);
        assert!((lhs - rhs).abs() < 1e-8, "{lhs} vs {rhs}");
    }
}

#[test]
fn grid_shift_preserves_the_integral() {
    let grid = Arc::new(TensorGrid::new(gamma(), 8.0, 96).unwrap());
    let plan = ShiftOperatorPlan::new(gamma(), 48).unwrap();
    let f = GridFunction::from_fn(grid, gauss);
    let before = f.integrate();
    for y in [[0.5, 0.5], [1.0, 2.0], [2.5, 0.3]] {
        let (s, _) = shift_grid(&plan, &f, &y).unwrap();
        let rel = (s.integrate() - before).abs() / before;
        assert!(rel < 1e-8, "y={y:?} rel={rel:e}");
    }
    let (_, small) = shift_grid(&plan, &f, &[0.01, 0.0]).unwrap();
    assert!(!small.truncation_warning);
    let (_, big) = shift_grid(&plan, &f, &[6.0, 6.0]).unwrap();
    assert!(big.truncation_warning);
}

#[test]
fn grid_shift_matches_pointwise_shift() {
    let grid = Arc::new(TensorGrid::new(gamma(), 8.0, 64).unwrap());
    let plan = ShiftOperatorPlan::new(gamma(), 48).unwrap();
    let f = GridFunction::from_fn(grid.clone(), gauss);
    let y = [0.8, 1.1];
    let (s, _) = shift_grid(&plan, &f, &y).unwrap();
    for idx in [[3usize, 5usize], [10, 20], [30, 12]] {
        let x = grid.point(&idx);
        let direct = shift(&plan, gauss, &x, &y).unwrap();
        assert!((s.values()[[idx[0], idx[1]]] - direct).abs() < 1e-10);
    }
}

#[test]
fn convolution_with_one_is_the_integral() {
    let grid = Arc::new(TensorGrid::new(gamma(), 6.0, 16).unwrap());
    let plan = ShiftOperatorPlan::new(gamma(), 16).unwrap();
    let f = GridFunction::from_fn(grid.clone(), gauss);
    let c = b_convolve(&plan, &f, &|_: &[f64]| 1.0).unwrap();
    let total = f.integrate();
    for v in c.values() {
        assert!((v - total).abs() < 1e-12 * total);
    }
}

#[test]
fn convolution_commutes() {
    let grid = Arc::new(TensorGrid::new(gamma(), 7.0, 40).unwrap());
    let plan = ShiftOperatorPlan::new(gamma(), 32).unwrap();
    let f = |x: &[f64]| (-(x[0] * x[0] + 0.5 * x[1] * x[1])).exp();
    let phi = |x: &[f64]| (-(2.0 * x[0] * x[0] + x[1] * x[1])).exp();
    let fg = GridFunction::from_fn(grid.clone(), f);
    let pg = GridFunction::from_fn(grid.clone(), phi);
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..10 {
        let idx = [rng.gen_range(0..20usize), rng.gen_range(0..20usize)];
        let x = grid.point(&idx);
        let a = b_convolve_at(&plan, &fg, &phi, &x).unwrap();
        let b = b_convolve_at(&plan, &pg, &f, &x).unwrap();
        assert!((a - b).abs() < 1e-6, "{a} vs {b}");
    }
}

#[test]
fn sampled_convolution_matches_direct() {
    let grid = Arc::new(TensorGrid::new(gamma(), 7.0, 40).unwrap());
    let plan = ShiftOperatorPlan::new(gamma(), 32).unwrap();
    let fg = GridFunction::from_fn(grid.clone(), gauss);
    let (c, _) = b_convolve_sampled(&plan, &fg, &fg).unwrap();
    for idx in [[2usize, 3usize], [15, 9], [22, 22]] {
        let direct = b_convolve_at(&plan, &fg, &gauss, &grid.point(&idx)).unwrap();
        assert!((c.values()[[idx[0], idx[1]]] - direct).abs() < 1e-9);
    }
}

#[test]
fn narrow_gaussian_preserves_mass() {
    // a unit-mass bump near the origin convolved with phi keeps int phi
    let g = GammaIndex::new(vec![0.5]).unwrap();
    let grid = Arc::new(TensorGrid::new(g.clone(), 8.0, 64).unwrap());
    let plan = ShiftOperatorPlan::new(g, 48).unwrap();
    let bump = GridFunction::from_fn(grid.clone(), |x| (-16.0 * x[0] * x[0]).exp());
    let mass = bump.integrate();
    let bump = bump.map(|v| v / mass);
    let phi = |x: &[f64]| (-x[0] * x[0]).exp();
    let c = b_convolve(&plan, &bump, &phi).unwrap();
    let want = GridFunction::from_fn(grid, phi).integrate();
    assert!((c.integrate() - want).abs() < 1e-6 * want);
}
