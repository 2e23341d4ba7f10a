//! Polynomial solutions of the biconfluent and confluent Heun equations.
//!
//! cargo run --example heun_polynomials

use heun_spectra::heun::{
    heunb_degree, heunb_ode_check, heunb_sequences, heunc_degree, heunc_ode_check, heunc_sequences,
    polynomial_from_recurrence, HeunBParams, HeunCParams,
};
use heun_spectra::spectral::{determinant_polynomial, find_roots};

fn main() -> heun_spectra::Result<()> {
    // gamma - alpha = 2(n + 1) picks the degree; delta is then tuned so the
    // recurrence terminates.
    let (alpha, beta, gamma) = (1.0, 0.5, 7.0);
    let n = heunb_degree(&HeunBParams::new(alpha, beta, gamma, 0.0)?).expect("integer degree");
    println!("biconfluent: alpha={alpha} beta={beta} gamma={gamma} -> degree {n}");

    // delta enters a_j linearly, so det(A_{n+1}) is a polynomial in delta.
    let seqs = heunb_sequences(&HeunBParams::new(alpha, beta, gamma, 0.0)?, n);
    let shifted = heun_spectra::heun::TridiagonalSequences::new(
        seqs.a.iter().map(|a| *a + heun_spectra::heun::SpectralPoly::linear(0.0, -1.0)).collect(),
        seqs.b.clone(),
        seqs.c.clone(),
    )?;
    let roots = find_roots(&determinant_polynomial(&shifted))?;
    for delta in roots.roots.iter().filter(|r| r.im.abs() < 1e-9).map(|r| r.re) {
        let params = HeunBParams::new(alpha, beta, gamma, delta)?;
        let poly = polynomial_from_recurrence(&heunb_sequences(&params, n).at_f64(0.0))?;
        let worst = [0.3, 1.0, 2.5]
            .iter()
            .map(|&z| heunb_ode_check(&params, &poly, z).relative())
            .fold(0.0, f64::max);
        println!("  delta={delta:>12.8} p={:?} ode residual {worst:.1e}", poly.coeffs);
    }

    // Confluent: the degree follows from delta = -(n + 1 + (beta + gamma)/2) alpha.
    let (alpha, beta, gamma) = (-2.0, 1.0, 0.5);
    let n = 2;
    let delta = -(n as f64 + 1.0 + 0.5 * (beta + gamma)) * alpha;
    let probe = HeunCParams::new(alpha, beta, gamma, delta, 0.0)?;
    println!("confluent: alpha={alpha} beta={beta} gamma={gamma} delta={delta} -> degree {:?}", heunc_degree(&probe)?);
    let seqs = heunc_sequences(&probe, n);
    // eta shifts mu = a_0 by -eta; solve det = 0 for eta.
    let shifted = heun_spectra::heun::TridiagonalSequences::new(
        seqs.a.iter().map(|a| *a + heun_spectra::heun::SpectralPoly::linear(0.0, -1.0)).collect(),
        seqs.b.clone(),
        seqs.c.clone(),
    )?;
    for eta in find_roots(&determinant_polynomial(&shifted))?.roots.iter().filter(|r| r.im.abs() < 1e-9).map(|r| r.re) {
        let params = HeunCParams::new(alpha, beta, gamma, delta, eta)?;
        let poly = polynomial_from_recurrence(&heunc_sequences(&params, n).at_f64(0.0))?;
        let worst = [0.4, 1.7, 3.0]
            .iter()
            .map(|&z| heunc_ode_check(&params, &poly, z).relative())
            .fold(0.0, f64::max);
        println!("  eta={eta:>12.8} p={:?} ode residual {worst:.1e}", poly.coeffs);
    }
    Ok(())
}
