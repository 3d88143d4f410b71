// Homogeneous polynomials annihilated by the Bessel operator, and the
// sampled ellipticity test.

use bhk::grid::GammaIndex;
use bhk::poly::{apply_bessel, b_harmonic_basis, is_elliptic, EvenPoly};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let gamma = GammaIndex::new(vec![0.5, 1.5])?;
    for k in [2, 4, 6] {
        for p in b_harmonic_basis(2, k, &gamma)? {
            println!("k = {k}: {}", p.to_json());
            assert!(apply_bessel(&p, &gamma)?.is_zero());
        }
    }
    let r2 = EvenPoly::norm_squared(2);
    println!("B |x|^2 = {}", apply_bessel(&r2, &gamma)?.to_json());
    println!("|x|^2 elliptic: {}", is_elliptic(&r2, 500)?);
    let p = EvenPoly::from_json(r#"{"n":2,"k":2,"terms":[{"alpha":[2,0],"c":4},{"alpha":[0,2],"c":-2}]}"#)?;
    println!("4x_1^2 - 2x_2^2 elliptic: {}", is_elliptic(&p, 500)?);
    Ok(())
}

fn main() {
    run_example().unwrap();
}
