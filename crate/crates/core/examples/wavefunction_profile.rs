//! Radial profile, norm and Schrodinger residual of one bound state.
//!
//! cargo run --example wavefunction_profile > profile.csv

use heun_spectra::models::{
    permissible_blocks, radial_norm, radial_profile, residual_grid, schrodinger_residual, spectrum, Case, ModelConfig,
};

fn main() -> heun_spectra::Result<()> {
    let cfg = ModelConfig::repulsive(Case::A, 2, -1.0)?;
    let block = permissible_blocks(&cfg, 3)?[1];
    let roots = spectrum(&cfg, &block)?;
    let state = &roots[0];

    let norm = radial_norm(&cfg, &block, state)?;
    let residual = schrodinger_residual(&cfg, &block, state, &residual_grid(&cfg, &block, state, 1e-3))?;
    eprintln!(
        "{block}, E = {:.12}, norm {:.12} (tail {:.1e}), residual {residual:.1e}",
        state.energy,
        norm.total,
        norm.tail_fraction()
    );

    let profile = radial_profile(&cfg, &block, state, 4.0, 81)?;
    let scale = 1.0 / (2.0 * std::f64::consts::PI * profile.norm).sqrt();
    println!("rho,psi");
    for (rho, v) in profile.grid.iter().zip(&profile.values) {
        println!("{rho:.3},{:.12e}", v.re * scale);
    }
    Ok(())
}
