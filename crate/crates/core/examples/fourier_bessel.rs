// Fourier-Bessel transform on a grid: the Gaussian pair, the round trip, and
// the transform of B-harmonic polynomials times a Gaussian.

use std::sync::Arc;

use bhk::fourier::{fb_forward, fb_forward_at, fb_inverse, gaussian_transform, harmonic_gaussian_transform, FBPlan};
use bhk::grid::{GammaIndex, GridFunction, TensorGrid};
use bhk::poly::b_harmonic_basis;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let gamma = GammaIndex::new(vec![0.5, 1.5])?;
    let grid = Arc::new(TensorGrid::new(gamma.clone(), 8.0, 96)?);
    let plan = FBPlan::with_default_frequency(grid.clone())?;
    let sq = |x: &[f64]| x.iter().map(|v| v * v).sum::<f64>();
    let f = GridFunction::from_fn(grid.clone(), |x| (-sq(x)).exp());

    let y = [0.8, 1.3];
    let got = fb_forward_at(&f, &y)?;
    let want = gaussian_transform(&gamma, 1.0, &y)?;
    println!("F[exp(-|x|^2)]({y:?}) = {got:.15e}  closed form {want:.15e}");

    let back = fb_inverse(&plan, &fb_forward(&plan, &f)?)?;
    println!("round trip max error {:.2e}", back.axpby(1.0, &f, -1.0)?.max_abs());

    let p = b_harmonic_basis(2, 2, &gamma)?.remove(0);
    let pf = GridFunction::from_fn(grid, |x| p.eval(x).unwrap() * (-sq(x)).exp());
    let got = fb_forward_at(&pf, &y)?;
    let want = harmonic_gaussian_transform(&p, &gamma, &y)?;
    println!("F[P_2 exp(-|x|^2)]({y:?}) = {got:.12e}  closed form {want:.12e}");
    assert!((got - want).abs() < 1e-5 * want.abs());
    Ok(())
}

fn main() {
    run_example().unwrap();
}
