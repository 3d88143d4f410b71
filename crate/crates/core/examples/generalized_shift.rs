// The generalized shift T^y, its action on a sampled grid, and B-convolution.

use std::sync::Arc;

use bhk::grid::{GammaIndex, GridFunction, TensorGrid};
use bhk::shift::{b_convolve_at, shift, shift_grid, ShiftOperatorPlan};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let gamma = GammaIndex::new(vec![0.5, 1.5])?;
    let plan = ShiftOperatorPlan::new(gamma.clone(), 48)?;
    let gauss = |x: &[f64]| (-(x[0] * x[0] + x[1] * x[1])).exp();

    let x = [0.7, 1.1];
    println!("T^0 f(x) = {:.15}  f(x) = {:.15}", shift(&plan, gauss, &x, &[0.0, 0.0])?, gauss(&x));
    println!("T^y 1    = {:.15}", shift(&plan, |_| 1.0, &x, &[2.0, 0.4])?);

    let one_d = ShiftOperatorPlan::new(GammaIndex::new(vec![0.8])?, 48)?;
    let v = shift(&one_d, |p| p[0] * p[0], &[1.2], &[0.5])?;
    println!("n = 1: T^0.5 (x^2) at 1.2 = {v:.15} (x^2 + y^2 = {})", 1.2f64 * 1.2 + 0.25);

    let grid = Arc::new(TensorGrid::new(gamma, 8.0, 64)?);
    let f = GridFunction::from_fn(grid.clone(), gauss);
    let (shifted, diag) = shift_grid(&plan, &f, &[1.0, 2.0])?;
    println!("integral before {:.12} after {:.12}, clamped {:.2e}", f.integrate(), shifted.integrate(), diag.clamped_fraction);

    let c = b_convolve_at(&plan, &f, &|p: &[f64]| (-2.0 * (p[0] * p[0] + p[1] * p[1])).exp(), &[0.5, 0.5])?;
    println!("(f * phi)(0.5, 0.5) = {c:.12}");
    Ok(())
}

fn main() {
    run_example().unwrap();
}
