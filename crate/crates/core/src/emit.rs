//! Grid export of the registered test functions.

use std::path::{Path, PathBuf};
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::fourier::{fb_forward, frequency_grid, FBPlan};
use crate::grid::{GridFunction, TensorGrid};
use crate::poly::b_harmonic_basis;
use crate::report::RunConfig;
use crate::riesz::{riesz_spectral, RieszKernel};

pub const FUNCTIONS: [&str; 4] = ["gaussian", "b-harmonic-k2", "b-harmonic-k4", "riesz-gaussian"];

fn sq(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum()
}

/// Samples a registered function on the configured grid.
pub fn sample(config: &RunConfig, name: &str) -> Result<GridFunction> {
    config.validate()?;
    let gamma = config.gamma_index();
    let grid = Arc::new(TensorGrid::new(gamma.clone(), config.grid.x_max, config.grid.points)?);
    let harmonic = |k: u32| -> Result<GridFunction> {
        let p = b_harmonic_basis(gamma.n(), k, &gamma)?.remove(0);
        Ok(GridFunction::from_fn(grid.clone(), |x| p.eval(x).unwrap_or(f64::NAN) * (-sq(x)).exp()))
    };
    match name {
        "gaussian" => Ok(GridFunction::from_fn(grid.clone(), |x| (-sq(x)).exp())),
        "b-harmonic-k2" => harmonic(2),
        "b-harmonic-k4" => harmonic(4),
        "riesz-gaussian" => {
            let plan = FBPlan::with_default_frequency(grid.clone())?;
            let kernel = RieszKernel::new(b_harmonic_basis(gamma.n(), 2, &gamma)?.remove(0), gamma.clone())?;
            riesz_spectral(&plan, &kernel, &GridFunction::from_fn(grid.clone(), |x| (-sq(x)).exp()))
        }
        _ => Err(Error::InvalidArgument(format!("unknown function {name:?}; known: {}", FUNCTIONS.join(", ")))),
    }
}

/// `out.csv` becomes `out.transform.csv`.
pub fn transform_path(out: &Path) -> PathBuf {
    let stem = out.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    out.with_file_name(format!("{stem}.transform.csv"))
}

/// Writes the function CSV, and with `transform` its Fourier-Bessel
/// transform on the default frequency grid. Returns the written paths.
pub fn emit_grid(config: &RunConfig, name: &str, out: &Path, transform: bool) -> Result<Vec<PathBuf>> {
    let f = sample(config, name)?;
    f.write_csv(out)?;
    let mut written = vec![out.to_path_buf()];
    if transform {
        // export needs only the forward direction
        let freq = Arc::new(frequency_grid(f.grid())?);
        let plan = FBPlan::unchecked(f.grid().clone(), freq)?;
        let path = transform_path(out);
        fb_forward(&plan, &f)?.write_csv(&path)?;
        written.push(path);
    }
    Ok(written)
}
