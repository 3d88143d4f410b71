// Mean value formula on the weighted hemisphere, the Pizzetti series, and
// the radial profiles v_eta.

use bhk::grid::GammaIndex;
use bhk::mean_value::{mean_value_check, normalized_sphere_mean, pizzetti_coeffs, pizzetti_mean_fn, v_recursion};
use bhk::poly::b_harmonic_basis;
use bhk::sphere::SphereRule;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let gamma = GammaIndex::new(vec![0.5, 1.5])?;
    let rule = SphereRule::new(gamma.clone(), 96)?;

    let p = b_harmonic_basis(2, 2, &gamma)?.remove(0);
    let o = mean_value_check(|x| p.eval(x).unwrap(), &rule, 1.5);
    println!("mean of {} over |x| = 1.5: {:.2e} (m(S+) P(0) = {})", p.to_json(), o.lhs, o.rhs);

    let u = |x: &[f64]| (-(x[0] * x[0] + x[1] * x[1])).exp();
    let mean = normalized_sphere_mean(u, &rule, 0.5);
    for m in 0..=2 {
        println!("Pizzetti m = {m}: error {:.3e}", (mean - pizzetti_mean_fn(u, &gamma, 0.5, m)?).abs());
    }
    println!("c_eta at R = 1: {:?}", pizzetti_coeffs(&gamma, 1.0, 4).c);

    let v = v_recursion(&gamma, 1.0, 2, 0)?;
    for (eta, prof) in v.iter().enumerate() {
        println!("v_{eta}(0.5) = {:.10e}  v_{eta}(1) = {:.1e}", prof.value_at(0.5), prof.value_at(1.0));
    }
    Ok(())
}

fn main() {
    run_example().unwrap();
}
