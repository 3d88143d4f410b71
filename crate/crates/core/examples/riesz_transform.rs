// High-order Riesz-Bessel transform of a Gaussian, in space by principal
// value quadrature and in frequency as a multiplier.

use std::sync::Arc;

use bhk::fourier::FBPlan;
use bhk::grid::{GammaIndex, GridFunction, TensorGrid};
use bhk::poly::EvenPoly;
use bhk::riesz::{riesz_spatial, riesz_spectral_at, riesz_transform_at, RieszKernel};
use bhk::shift::ShiftOperatorPlan;
use bhk::sphere::SphereRule;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let gamma = GammaIndex::new(vec![0.5, 1.5])?;
    let p = EvenPoly::new(2, 2, [(vec![2, 0], 4.0), (vec![0, 2], -2.0)])?;
    let kernel = RieszKernel::new(p, gamma.clone())?;
    println!("c_k = {} (fitted {:.12})", kernel.c_k(), kernel.fitted_c_k());

    let grid = Arc::new(TensorGrid::new(gamma.clone(), 8.0, 96)?);
    let f = GridFunction::from_fn(grid.clone(), |x| (-(x[0] * x[0] + x[1] * x[1])).exp());
    let fb = FBPlan::with_default_frequency(grid)?;
    let shift = ShiftOperatorPlan::new(gamma.clone(), 48)?;
    let rule = SphereRule::new(gamma, 96)?;

    let x = [1.0, 1.0];
    let s = riesz_spatial(&shift, &kernel, &rule, &f, &x, &[0.4, 0.2, 0.1, 0.05])?;
    let t = riesz_spectral_at(&fb, &kernel, &f, &x)?;
    println!("truncated integrals {:?}", s.values);
    println!("spatial {:.12}  spectral {:.12}", s.limit, t);
    assert!((s.limit - t).abs() < 1e-2 * t.abs());

    let v = riesz_transform_at(&kernel, &f, &[1.0, 1.0])?;
    println!("F[Rf](1, 1) = {v:.12}  (-e^(-1/2)/8 = {:.12})", -(-0.5f64).exp() / 8.0);
    Ok(())
}

fn main() {
    run_example().unwrap();
}
