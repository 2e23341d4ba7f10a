//! Spectrum of the repulsive polynomial system block by block.
//!
//! cargo run --example repulsive_spectrum -- [k] [epsilon] [n_max]

use heun_spectra::models::{permissible_blocks, solve_block, Case, ModelConfig};
use heun_spectra::precision::PrecisionPolicy;

fn main() -> heun_spectra::Result<()> {
    let mut args = std::env::args().skip(1);
    let k: i64 = args.next().map_or(2, |a| a.parse().expect("integer k"));
    let eps: f64 = args.next().map_or(0.5, |a| a.parse().expect("real epsilon"));
    let n_max: usize = args.next().map_or(4, |a| a.parse().expect("integer n_max"));

    for case in [Case::A, Case::B] {
        let cfg = ModelConfig::repulsive(case, k, eps)?;
        println!("case {case}, k = {k}, eps = {eps}");
        for d in cfg.diagnostics() {
            println!("  note: {d}");
        }
        for block in permissible_blocks(&cfg, n_max)? {
            let sol = solve_block(&cfg, &block, PrecisionPolicy::Auto)?;
            let energies: Vec<String> = sol.physical().map(|r| format!("{:.10}", r.energy)).collect();
            println!(
                "  {block}: E = [{}]  (companion/symmetric gap {:.1e})",
                energies.join(", "),
                sol.symmetric_gap.unwrap_or(f64::NAN)
            );
        }
    }
    Ok(())
}
