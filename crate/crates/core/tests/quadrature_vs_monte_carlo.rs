//! Cross-validation of the two expectation routes: adaptive quadrature
//! against Monte Carlo, within combined statistical error.

use subexp_core::dist::{Distribution, ExpectationRequest};
use subexp_core::orlicz::OrliczFunction;

fn agree_within_4_se(d: &Distribution, scale: f64, seed: u64) {
    let integrand = |x: f64| OrliczFunction::Psi11.eval(x.abs() / scale).unwrap();
    let quad = d.expect(&ExpectationRequest::new(&integrand)).unwrap();

    let n = 400_000usize;
    let samples = d.sample(n, seed);
    let values: Vec<f64> = samples.iter().map(|&x| integrand(x)).collect();
    let mean = values.iter().sum::<f64>() / n as f64;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1) as f64;
    let se = (var / n as f64).sqrt();

    let diff = (quad.value - mean).abs();
    let margin = 4.0 * se + quad.error;
    assert!(
        diff <= margin,
        "{d:?} scale {scale}: quad {} vs mc {mean} (diff {diff}, margin {margin})",
        quad.value
    );
}

#[test]
fn uniform_quadrature_matches_monte_carlo() {
    let d = Distribution::uniform(-1.0, 1.0).unwrap();
    agree_within_4_se(&d, 0.7, 101);
    agree_within_4_se(&d, 2.0, 102);
}

#[test]
fn laplace_quadrature_matches_monte_carlo() {
    let d = Distribution::laplace(1.0).unwrap();
    agree_within_4_se(&d, 2.5, 103);
    agree_within_4_se(&d, 4.0, 104);
}

#[test]
fn centered_exponential_quadrature_matches_monte_carlo() {
    let d = Distribution::centered_exponential(1.0).unwrap();
    agree_within_4_se(&d, 2.0, 105);
    agree_within_4_se(&d, 3.5, 106);
}
