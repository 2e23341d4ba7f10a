//! Machine-readable spectrum and wavefunction output.

use std::fmt::Write as _;

use serde::de::Deserializer;
use serde::ser::{Error as _, Serializer};
use serde::{Deserialize, Serialize};
use serde_json::value::RawValue;

use crate::models::{BlockSpectrum, ModelConfig, RadialProfile};

/// A float written with 17 significant digits; non-finite values become `null`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sig17(pub f64);

impl Sig17 {
    pub fn text(&self) -> String {
        format_sig17(self.0)
    }
}

/// `x` with 17 significant digits, or `null` if non-finite.
pub fn format_sig17(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        "null".to_string()
    }
}

impl Serialize for Sig17 {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let raw = RawValue::from_string(self.text()).map_err(S::Error::custom)?;
        raw.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Sig17 {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        Ok(Sig17(Option::<f64>::deserialize(deserializer)?.unwrap_or(f64::NAN)))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RootReport {
    pub value: Sig17,
    pub energy: Sig17,
    pub physical: bool,
    pub residual: Option<Sig17>,
    pub coefficients: Vec<Sig17>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlockReport {
    pub n: usize,
    pub l: i64,
    pub sigma: i32,
    pub roots: Vec<RootReport>,
    /// Complex and unphysical roots dropped from the physical set.
    pub filtered: usize,
    pub precision_bits: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumReport {
    pub example: u8,
    pub case: String,
    pub k: i64,
    pub epsilon: Sig17,
    pub blocks: Vec<BlockReport>,
}

impl SpectrumReport {
    pub fn new(config: &ModelConfig, spectra: &[BlockSpectrum]) -> Self {
        let blocks = spectra
            .iter()
            .map(|s| BlockReport {
                n: s.block.n,
                l: s.block.l,
                sigma: s.block.sigma,
                roots: s
                    .roots
                    .iter()
                    .map(|r| RootReport {
                        value: Sig17(r.value),
                        energy: Sig17(r.energy),
                        physical: r.physical,
                        residual: r.residual().map(Sig17),
                        coefficients: r
                            .eigenvector
                            .as_ref()
                            .map(|p| p.coeffs.iter().copied().map(Sig17).collect())
                            .unwrap_or_default(),
                    })
                    .collect(),
                filtered: s.filtered(),
                precision_bits: s.precision_bits,
            })
            .collect();
        SpectrumReport {
            example: config.example.number(),
            case: config.case.label().to_string(),
            k: config.k,
            epsilon: Sig17(config.epsilon),
            blocks,
        }
    }

    pub fn to_json(&self) -> serde_json::Result<String> {
        serde_json::to_string_pretty(self)
    }

    pub fn from_json(text: &str) -> serde_json::Result<Self> {
        serde_json::from_str(text)
    }

    /// One row per real root: `n,l,sigma,root,energy,physical,residual`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,l,sigma,root,energy,physical,residual\n");
        for b in &self.blocks {
            for r in &b.roots {
                let residual = r.residual.map(|x| x.text()).unwrap_or_default();
                writeln!(
                    out,
                    "{},{},{},{},{},{},{}",
                    b.n,
                    b.l,
                    b.sigma,
                    r.value.text(),
                    r.energy.text(),
                    r.physical,
                    residual
                )
                .unwrap();
            }
        }
        out
    }
}

/// `rho,re,im,abs2` rows; `scale` multiplies every value.
pub fn profile_csv(profile: &RadialProfile, phi: f64, m: i64, scale: f64) -> String {
    let mut out = String::from("rho,re,im,abs2\n");
    let phase = num_complex::Complex64::from_polar(1.0, m as f64 * phi);
    for (rho, v) in profile.grid.iter().zip(&profile.values) {
        let psi = v * phase * scale;
        writeln!(
            out,
            "{},{},{},{}",
            format_sig17(*rho),
            format_sig17(psi.re),
            format_sig17(psi.im),
            format_sig17(psi.norm_sqr())
        )
        .unwrap();
    }
    out
}
