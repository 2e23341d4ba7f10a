//! Bound states of the non-rational system and the sign filter on chi.
//!
//! cargo run --example non_rational_spectrum -- [k] [epsilon]

use heun_spectra::models::{permissible_blocks, solve_block, total_flux, Case, ModelConfig};
use heun_spectra::precision::PrecisionPolicy;

fn main() -> heun_spectra::Result<()> {
    let mut args = std::env::args().skip(1);
    let k: i64 = args.next().map_or(3, |a| a.parse().expect("integer k"));
    let eps: f64 = args.next().map_or(40.0, |a| a.parse().expect("real epsilon"));

    for (case, kk) in [(Case::Second, k.abs()), (Case::First, -k.abs())] {
        let cfg = ModelConfig::non_rational(case, kk, eps)?;
        println!("{case} case, k = {kk}, eps = {eps}, flux = {:.6} (c hbar / e)", total_flux(&cfg)?);
        for block in permissible_blocks(&cfg, 3)? {
            let sol = solve_block(&cfg, &block, PrecisionPolicy::Auto)?;
            println!("  {block}: {} roots, {} filtered", sol.total_roots(), sol.filtered());
            for r in &sol.roots {
                let tag = if r.physical { "bound" } else if r.borderline { "borderline" } else { "rejected" };
                println!("    chi = {:>14.10}  E = {:>14.10}  {tag}", r.value, r.energy);
            }
        }
    }
    Ok(())
}
