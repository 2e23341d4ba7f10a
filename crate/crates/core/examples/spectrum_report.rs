//! JSON and CSV reports as written by the command-line tool.
//!
//! cargo run --example spectrum_report

use heun_spectra::models::{permissible_blocks, solve_block, Case, ModelConfig};
use heun_spectra::precision::PrecisionPolicy;
use heun_spectra::report::SpectrumReport;

fn main() -> heun_spectra::Result<()> {
    let cfg = ModelConfig::non_rational(Case::Second, 2, 20.0)?;
    let spectra = permissible_blocks(&cfg, 10)?
        .iter()
        .map(|b| solve_block(&cfg, b, PrecisionPolicy::Auto))
        .collect::<heun_spectra::Result<Vec<_>>>()?;
    let report = SpectrumReport::new(&cfg, &spectra);
    let json = report.to_json().expect("serializable");
    println!("{json}");
    print!("{}", report.to_csv());
    assert_eq!(SpectrumReport::from_json(&json).expect("round trip"), report);
    Ok(())
}
