// Empirical ratio tables for the a priori bound, the elliptic estimate and
// L_p boundedness of a Riesz-Bessel transform, over dilated Gaussians.

use std::sync::Arc;

use bhk::fourier::FBPlan;
use bhk::grid::{GammaIndex, TensorGrid};
use bhk::poly::{b_harmonic_basis, EvenPoly};
use bhk::riesz::{elliptic_estimate_probe, gaussian_family, lp_boundedness_probe, priori_bound_probe, ratio_spread, RieszKernel};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let gamma = GammaIndex::new(vec![0.5, 1.5])?;
    let grid = Arc::new(TensorGrid::new(gamma.clone(), 8.0, 64)?);
    let plan = FBPlan::with_default_frequency(grid.clone())?;
    let family = gaussian_family(&grid, &[0.5, 1.0, 2.0]);

    let rows = priori_bound_probe(&plan, 2.0, &family)?;
    for r in &rows {
        println!("{:<16} ||d_i d_k f|| / ||B f|| = {:.6}", r.label, r.ratio);
    }
    println!("spread {:.2e}", ratio_spread(&rows));

    let ell = EvenPoly::new(2, 2, [(vec![2, 0], 1.0), (vec![0, 2], 2.0)])?;
    let rows = elliptic_estimate_probe(&plan, &ell, 4.0, &family)?;
    println!("||B f||_4 / ||P(B) f||_4 spread {:.2e}", ratio_spread(&rows));

    let kernel = RieszKernel::new(b_harmonic_basis(2, 2, &gamma)?.remove(0), gamma)?;
    for r in lp_boundedness_probe(&plan, &kernel, &[1.5, 2.0, 4.0], &family)? {
        println!("{:<16} p = {}: ||Rf|| / ||f|| = {:.6}", r.label, r.p, r.ratio);
    }
    Ok(())
}

fn main() {
    run_example().unwrap();
}
