// Tensor grids carrying the weight prod x_i^{2 gamma_i}, sampled functions,
// norms, interpolation and CSV round trips.

use std::sync::Arc;

use bhk::grid::{GammaIndex, GridFunction, TensorGrid};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let gamma = GammaIndex::new(vec![0.5, 1.5])?;
    let grid = Arc::new(TensorGrid::new(gamma.clone(), 8.0, 48)?);
    let f = GridFunction::from_fn(grid.clone(), |x| (-(x[0] * x[0] + x[1] * x[1])).exp());

    // int exp(-|x|^2) d mu_gamma = prod Gamma(gamma_i + 1/2) / 2
    let want = 0.5 * 1.0 * 0.5;
    println!("integral {:.15} (closed form {want})", f.integrate());
    assert!((f.integrate() - want).abs() < 1e-12);
    println!("L2 norm {:.12}", f.lp_norm(2.0)?);
    println!("f(0.3, 1.2) ~ {:.12}", f.interpolate(&[0.3, 1.2])?);

    let csv = f.to_csv();
    let back = GridFunction::read_csv(grid, csv.as_bytes())?;
    assert_eq!(back.values(), f.values());
    println!("{} CSV rows, first: {}", csv.lines().count() - 1, csv.lines().nth(1).unwrap_or(""));
    Ok(())
}

fn main() {
    run_example().unwrap();
}
