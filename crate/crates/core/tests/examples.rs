#[allow(dead_code)]
mod bessel_kernels_example {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/bessel_kernels.rs"));
}

#[test]
fn bessel_kernels_example_runs() {
    bessel_kernels_example::run_example().expect("bessel_kernels example should run");
}

#[allow(dead_code)]
mod weighted_grid_example {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/weighted_grid.rs"));
}

#[test]
fn weighted_grid_example_runs() {
    weighted_grid_example::run_example().expect("weighted_grid example should run");
}

#[allow(dead_code)]
mod sphere_rule_example {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/sphere_rule.rs"));
}

#[test]
fn sphere_rule_example_runs() {
    sphere_rule_example::run_example().expect("sphere_rule example should run");
}

#[allow(dead_code)]
mod b_harmonic_polynomials_example {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/b_harmonic_polynomials.rs"));
}

#[test]
fn b_harmonic_polynomials_example_runs() {
    b_harmonic_polynomials_example::run_example().expect("b_harmonic_polynomials example should run");
}

#[allow(dead_code)]
mod generalized_shift_example {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/generalized_shift.rs"));
}

#[test]
fn generalized_shift_example_runs() {
    generalized_shift_example::run_example().expect("generalized_shift example should run");
}

#[allow(dead_code)]
mod fourier_bessel_example {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/fourier_bessel.rs"));
}

#[test]
fn fourier_bessel_example_runs() {
    fourier_bessel_example::run_example().expect("fourier_bessel example should run");
}

#[allow(dead_code)]
mod mean_value_example {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/mean_value.rs"));
}

#[test]
fn mean_value_example_runs() {
    mean_value_example::run_example().expect("mean_value example should run");
}

#[allow(dead_code)]
mod riesz_transform_example {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/riesz_transform.rs"));
}

#[test]
fn riesz_transform_example_runs() {
    riesz_transform_example::run_example().expect("riesz_transform example should run");
}

#[allow(dead_code)]
mod estimates_example {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/estimates.rs"));
}

#[test]
fn estimates_example_runs() {
    estimates_example::run_example().expect("estimates example should run");
}

#[allow(dead_code)]
mod verification_report_example {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/verification_report.rs"));
}

#[test]
fn verification_report_example_runs() {
    verification_report_example::run_example().expect("verification_report example should run");
}
