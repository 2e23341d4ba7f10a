//! Tridiagonal quantization: continuant determinant, companion roots, null vectors.
//!
//! cargo run --example determinant_roots

use heun_spectra::heun::{SpectralPoly, TridiagonalSequences};
use heun_spectra::spectral::{determinant_polynomial, find_roots, null_vector, symmetric_roots};

fn main() -> heun_spectra::Result<()> {
    // a_j = s - j, b_j = 2, c_j = 1 for a 4x4 matrix.
    let n = 3;
    let seqs = TridiagonalSequences::new(
        (0..=n).map(|j| SpectralPoly::linear(-(j as f64), 1.0)).collect(),
        vec![SpectralPoly::constant(2.0); n],
        vec![SpectralPoly::constant(1.0); n],
    )?;
    let det = determinant_polynomial(&seqs);
    println!("det(s) coefficients (low to high): {:?}", det.coeffs);

    let roots = find_roots(&det)?;
    let symmetric = symmetric_roots(&seqs)?;
    println!("{:>22} {:>22} {:>10}", "companion", "symmetric", "residual");
    for ((r, sym), res) in roots.roots.iter().zip(&symmetric).zip(&roots.residuals) {
        println!("{:>22.15} {:>22.15} {:>10.1e}", r.re, sym, res);
    }

    let s = roots.roots[0].re;
    let p = null_vector::<f64>(&seqs, &s, 53)?;
    println!("null vector at s = {s:.6}: {:?}", p.coeffs);
    println!("terminal residual {:.1e}", p.terminal_residual);
    Ok(())
}
