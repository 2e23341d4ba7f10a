//! Precision ladder on large blocks: 53, 128 and 256 significand bits.
//!
//! cargo run --release --example extended_precision

use heun_spectra::models::{permissible_blocks, solve_block, Case, ModelConfig};
use heun_spectra::precision::PrecisionPolicy;

fn main() -> heun_spectra::Result<()> {
    let cfg = ModelConfig::non_rational(Case::Second, 24, 900.0)?;
    for block in permissible_blocks(&cfg, 30)?.into_iter().filter(|b| b.n >= 19).take(3) {
        println!("{block}, automatic ladder {:?}", PrecisionPolicy::Auto.ladder(block.n));
        for policy in [PrecisionPolicy::Fixed(53), PrecisionPolicy::Auto, PrecisionPolicy::Fixed(256)] {
            match solve_block(&cfg, &block, policy) {
                Ok(sol) => {
                    let bound: Vec<String> = sol.physical().map(|r| format!("{:.12}", r.energy)).collect();
                    println!(
                        "  {policy:?}: {} bits, {} real and {} complex roots, quality {:.1e}, bound E = [{}]",
                        sol.precision_bits,
                        sol.roots.len(),
                        sol.complex_roots.len(),
                        sol.root_quality,
                        bound.join(", ")
                    );
                }
                Err(e) => println!("  {policy:?}: {e}"),
            }
        }
    }
    Ok(())
}
