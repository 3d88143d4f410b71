// Quadrature on the weighted positive hemisphere and the constant m(S_+).

use bhk::grid::GammaIndex;
use bhk::sphere::SphereRule;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    for (g, want) in [(vec![0.5, 0.5], 0.5), (vec![0.5, 1.5], 0.25), (vec![1.0, 1.0], std::f64::consts::PI / 16.0)] {
        let gamma = GammaIndex::new(g.clone())?;
        let rule = SphereRule::new(gamma.clone(), 32)?;
        println!("gamma {g:?}: {} nodes, total {:.15} (m(S+) = {want:.15})", rule.len(), rule.total_weight());
        assert!((rule.total_weight() - want).abs() < 1e-12);
    }
    let rule = SphereRule::new(GammaIndex::new(vec![0.3, 0.7, 1.2])?, 12)?;
    let m2 = rule.integrate(|t| t[0] * t[0]);
    println!("n = 3: int theta_1^2 = {m2:.12}");
    Ok(())
}

fn main() {
    run_example().unwrap();
}
