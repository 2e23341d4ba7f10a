//! Vector potential, magnetic field, scalar potential and flux of both systems.
//!
//! cargo run --example fields_and_flux

use heun_spectra::models::{
    flux_by_quadrature, magnetic_field, scalar_potential, total_flux, vector_potential, Case, ModelConfig, UnitSystem,
};

fn main() -> heun_spectra::Result<()> {
    let repulsive = ModelConfig::repulsive(Case::A, 1, 1.0)?;
    let non_rational = ModelConfig::non_rational(Case::Second, 2, 3.0)?;
    println!("{:>6} {:>12} {:>12} {:>12} {:>12} {:>12} {:>12}", "rho", "A1", "B1", "u1", "A2", "B2", "u2");
    for i in 1..=10 {
        let rho = 0.5 * i as f64;
        println!(
            "{rho:>6.2} {:>12.5} {:>12.5} {:>12.5} {:>12.5} {:>12.5} {:>12.5}",
            vector_potential(&repulsive, rho)?,
            magnetic_field(&repulsive, rho)?,
            scalar_potential(&repulsive, rho)?,
            vector_potential(&non_rational, rho)?,
            magnetic_field(&non_rational, rho)?,
            scalar_potential(&non_rational, rho)?,
        );
    }
    match total_flux(&repulsive) {
        Ok(f) => println!("repulsive flux {f}"),
        Err(e) => println!("repulsive flux: {e}"),
    }
    let units = UnitSystem::natural(1.0);
    for k in 1..=4 {
        let cfg = ModelConfig::non_rational(Case::Second, k, 3.0)?;
        println!(
            "k = {k}: flux {:.12} by quadrature, {:.12} closed form, in units of {} (c hbar / e)",
            flux_by_quadrature(&cfg)?,
            total_flux(&cfg)?,
            units.flux()
        );
    }
    Ok(())
}
