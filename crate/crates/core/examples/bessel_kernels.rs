// Normalized Bessel kernels, the gamma function, and the Poisson integral.

use bhk::special::{bessel_j, gamma, normalized_j, poisson_representation, BesselOrder};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let half = BesselOrder::new(0.5)?;
    for r in [0.0, 1.0, 10.0, 40.0] {
        let j = normalized_j(half, r)?;
        let sinc = if r == 0.0 { 1.0 } else { f64::sin(r) / r };
        println!("j_1/2({r:>4}) = {j:+.15e}  sin r / r = {sinc:+.15e}");
        assert!((j - sinc).abs() < 1e-12);
    }

    // gamma = 1.5 is the order nu = gamma - 1/2 = 1
    let g = 1.5;
    let series = normalized_j(BesselOrder::from_gamma(g)?, 7.3)?;
    let integral = poisson_representation(g, 7.3, 64)?;
    println!("series {series:+.15e}  Poisson {integral:+.15e}");
    assert!((series - integral).abs() < 1e-10);

    println!("J_0(2.404825557695773) = {:e}", bessel_j(BesselOrder::new(0.0)?, 2.404825557695773)?);
    println!("Gamma(5) = {}", gamma(5.0)?);
    Ok(())
}

fn main() {
    run_example().unwrap();
}
