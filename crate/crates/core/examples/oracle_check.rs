//! Analytic energies against the finite-volume radial eigensolver.
//!
//! cargo run --release --example oracle_check

use heun_spectra::models::{effective_potential, permissible_blocks, Case, ModelConfig};
use heun_spectra::oracle::{check_block, convergence_order, GridSpec};

fn main() -> heun_spectra::Result<()> {
    let cases = [
        (ModelConfig::repulsive(Case::A, 2, -2.0)?, 2, 8.0),
        (ModelConfig::repulsive(Case::B, 5, 1.0)?, 1, 8.0),
        (ModelConfig::non_rational(Case::First, -3, 40.0)?, 0, 200.0),
        (ModelConfig::non_rational(Case::Second, 3, 40.0)?, 1, 60.0),
    ];
    for (cfg, index, rho_max) in cases {
        let block = permissible_blocks(&cfg, 4)?[index];
        let grid = GridSpec::new(1e-3, rho_max, 8000)?;
        let (report, numeric) = check_block(&cfg, &block, grid, 1e-3)?;
        println!("{} k={} {block}: {}", cfg.case, cfg.k, if report.passed { "agree" } else { "DISAGREE" });
        for p in &report.pairs {
            println!("  analytic {:>16.10}  numeric {:>16.10}  error {:.1e}", p.analytic, p.numeric, p.error);
        }
        for w in &numeric.warnings {
            println!("  warning: {w}");
        }
        if let Some(p) = report.pairs.first() {
            let m = block.angular_number();
            let coarse = GridSpec::new(1e-3, rho_max, 2000)?;
            let order = convergence_order(|r| effective_potential(&cfg, m, r).unwrap(), coarse, p.analytic)?;
            println!("  observed order {order:.2}");
        }
    }
    Ok(())
}
