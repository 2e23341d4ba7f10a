//! Self-check suite aggregating the library's invariants.

use std::f64::consts::PI;
use std::fmt;

use nalgebra::DMatrix;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use crate::heun::SpectralPoly;
use crate::models::{
    self, block_heun, block_sequences, flux_by_quadrature, magnetic_field, ode_residuals, overlap, permissible_blocks,
    radial_norm, residual_grid, schrodinger_residual, solve_block, vector_potential, BlockSpec, Case, Example,
    ModelConfig,
};
use crate::oracle::{self, GridSpec};
use crate::precision::PrecisionPolicy;
use crate::spectral::determinant_numeric;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Level {
    Quick,
    Full,
}

/// Deliberate corruption used to confirm that failures are reported.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Fault {
    /// Shifts one model sequence entry before the identity check.
    Sequences,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VerifyOptions {
    pub level: Level,
    pub fault: Option<Fault>,
    pub seed: u64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions { level: Level::Quick, fault: None, seed: 0x5eed }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl fmt::Display for CheckOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "{tag} {}: {}", self.name, self.detail)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyReport {
    pub checks: Vec<CheckOutcome>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckOutcome> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

type CheckResult = std::result::Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> std::result::Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

type Check<'a> = Box<dyn Fn() -> CheckResult + 'a>;

pub fn run(options: &VerifyOptions) -> VerifyReport {
    let full = options.level == Level::Full;
    let mut checks: Vec<(&'static str, Check)> = vec![
        ("sequence_identity", Box::new(move || sequence_identity(options.seed, if full { 200 } else { 40 }, options.fault))),
        ("closed_form_spectra", Box::new(closed_form_spectra)),
        ("root_count_reality", Box::new(move || root_count_reality(options.seed, if full { 10 } else { 5 }))),
        ("determinant_dual_path", Box::new(move || determinant_dual_path(options.seed, if full { 20 } else { 10 }))),
        ("ode_residuals", Box::new(ode_residual_check)),
        ("field_identities", Box::new(field_identities)),
        ("orthogonality", Box::new(orthogonality)),
    ];
    if full {
        checks.push(("oracle_agreement", Box::new(oracle_agreement)));
    }
    VerifyReport {
        checks: checks
            .into_iter()
            .map(|(name, check)| {
                let (passed, detail) = match check() {
                    Ok(d) => (true, d),
                    Err(d) => (false, d),
                };
                CheckOutcome { name, passed, detail }
            })
            .collect(),
    }
}

/// A random permissible block of the given case.
pub fn random_block(rng: &mut StdRng, case: Case) -> (ModelConfig, BlockSpec) {
    let (k, eps) = match case {
        Case::A => (rng.gen_range(-3..=5), rng.gen_range(-5.0..5.0)),
        Case::B => (rng.gen_range(1..=12), rng.gen_range(-5.0..5.0)),
        Case::First => (rng.gen_range(-8..=-1), rng.gen_range(-5.0..40.0)),
        Case::Second => (rng.gen_range(1..=8), rng.gen_range(-5.0..40.0)),
    };
    let cfg = ModelConfig::new(case.example(), case, k, eps).expect("sampled parameters are valid");
    let blocks = permissible_blocks(&cfg, 12).expect("valid configuration");
    let block = blocks[rng.gen_range(0..blocks.len())];
    (cfg, block)
}

fn sequence_identity(seed: u64, tuples: usize, fault: Option<Fault>) -> CheckResult {
    let mut rng = StdRng::seed_from_u64(seed);
    let mut worst = 0.0_f64;
    for case in [Case::A, Case::B, Case::First, Case::Second] {
        for _ in 0..tuples {
            let (cfg, block) = random_block(&mut rng, case);
            let mut model = block_sequences(&cfg, &block).map_err(|e| e.to_string())?;
            if fault == Some(Fault::Sequences) {
                model.a[0] = model.a[0] + SpectralPoly::constant(1e-6);
            }
            let generic = block_heun(&cfg, &block).map_err(|e| e.to_string())?.sequences(block.n);
            let d = model.max_relative_distance(&generic);
            worst = worst.max(d);
            ensure(d <= 1e-12, || {
                format!("case {} k={} eps={} {block}: model and generic sequences differ by {d:e}", case, cfg.k, cfg.epsilon)
            })?;
        }
    }
    Ok(format!("{} tuples per case, max relative difference {worst:e}", tuples))
}

fn closed_form_spectra() -> CheckResult {
    let values = |cfg: ModelConfig, block: BlockSpec| -> std::result::Result<Vec<f64>, String> {
        Ok(models::spectrum(&cfg, &block)
            .map_err(|e| e.to_string())?
            .iter()
            .map(|r| r.value)
            .collect())
    };
    for eps in [-3.5, 0.0, 1.0, 4.25] {
        let cfg = ModelConfig::repulsive(Case::A, 1, eps).map_err(|e| e.to_string())?;
        let v = values(cfg, BlockSpec { n: 0, l: 0, sigma: 1 })?;
        ensure(v.len() == 1 && (v[0] - eps).abs() <= 1e-12 * eps.abs().max(1.0), || {
            format!("ground block at eps={eps} gave {v:?}")
        })?;
    }
    let cfg = ModelConfig::repulsive(Case::A, 1, 0.0).map_err(|e| e.to_string())?;
    let mut v = values(cfg, BlockSpec { n: 1, l: 1, sigma: 1 })?;
    v.sort_by(f64::total_cmp);
    ensure(v.len() == 2 && (v[0] + 4.0).abs() < 1e-10 && (v[1] - 4.0).abs() < 1e-10, || {
        format!("two-level block gave {v:?}, expected -4, 4")
    })?;
    for (case, k, l) in [(Case::First, -1, 1), (Case::Second, 1, -1)] {
        let cfg = ModelConfig::non_rational(case, k, 15.0).map_err(|e| e.to_string())?;
        let sol = solve_block(&cfg, &BlockSpec { n: 0, l, sigma: l.signum() as i32 }, PrecisionPolicy::Auto)
            .map_err(|e| e.to_string())?;
        let mut all: Vec<f64> = sol.roots.iter().map(|r| r.value).collect();
        all.sort_by(f64::total_cmp);
        let phys: Vec<f64> = sol.physical().map(|r| r.energy).collect();
        ensure(
            all.len() == 2 && (all[0] + 1.0).abs() < 1e-10 && (all[1] - 3.0).abs() < 1e-10,
            || format!("{case} case roots {all:?}, expected -1, 3"),
        )?;
        ensure(phys.len() == 1 && (phys[0] + 1.0).abs() < 1e-10, || format!("{case} case physical energies {phys:?}"))?;
    }
    Ok("ground state, two-level block and non-rational quadratics reproduced".into())
}

fn root_count_reality(seed: u64, n_max: usize) -> CheckResult {
    let mut rng = StdRng::seed_from_u64(seed ^ 0xa5a5);
    let mut blocks = 0;
    let mut worst = 0.0_f64;
    for k in 1..=4 {
        let eps = rng.gen_range(-5.0..5.0);
        for case in [Case::A, Case::B] {
            let cfg = ModelConfig::repulsive(case, k, eps).map_err(|e| e.to_string())?;
            for block in permissible_blocks(&cfg, n_max).map_err(|e| e.to_string())? {
                let sol = solve_block(&cfg, &block, PrecisionPolicy::Auto).map_err(|e| e.to_string())?;
                ensure(sol.complex_roots.is_empty() && sol.roots.len() == block.n + 1, || {
                    format!("{case} k={k} {block}: {} real and {} complex roots", sol.roots.len(), sol.complex_roots.len())
                })?;
                for r in &sol.roots {
                    worst = worst.max(r.residual().unwrap_or(f64::INFINITY));
                }
                blocks += 1;
            }
        }
    }
    ensure(worst < 1e-10, || format!("terminal residual {worst:e}"))?;
    for k in 1..=4 {
        let eps = rng.gen_range(0.0..40.0);
        for (case, kk) in [(Case::First, -k), (Case::Second, k)] {
            let cfg = ModelConfig::non_rational(case, kk, eps).map_err(|e| e.to_string())?;
            for block in permissible_blocks(&cfg, 3).map_err(|e| e.to_string())? {
                let sol = solve_block(&cfg, &block, PrecisionPolicy::Auto).map_err(|e| e.to_string())?;
                ensure(sol.total_roots() == 2 * (block.n + 1), || {
                    format!("{case} k={kk} {block}: {} roots, expected {}", sol.total_roots(), 2 * (block.n + 1))
                })?;
                blocks += 1;
            }
        }
    }
    Ok(format!("{blocks} blocks, max terminal residual {worst:e}"))
}

/// LU determinant of the assembled matrix against the continuant.
fn determinant_dual_path(seed: u64, n_max: usize) -> CheckResult {
    let mut rng = StdRng::seed_from_u64(seed ^ 0x0d37);
    let mut worst = 0.0_f64;
    for case in [Case::A, Case::B, Case::First, Case::Second] {
        for _ in 0..8 {
            let (cfg, block) = random_block(&mut rng, case);
            if block.n > n_max {
                continue;
            }
            let seqs = block_sequences(&cfg, &block).map_err(|e| e.to_string())?;
            for _ in 0..5 {
                let s = rng.gen_range(-3.0..3.0);
                let size = seqs.size();
                let rows = seqs.dense_at(s);
                let dense = DMatrix::from_fn(size, size, |i, j| rows[i][j]).lu().determinant();
                let cont = determinant_numeric(&seqs, s);
                let d = (dense - cont).abs() / dense.abs().max(cont.abs()).max(f64::MIN_POSITIVE);
                worst = worst.max(d);
                ensure(d <= 1e-8, || format!("{case} k={} {block} s={s}: dense {dense:e} vs continuant {cont:e}", cfg.k))?;
            }
        }
    }
    Ok(format!("max relative difference {worst:e}"))
}

fn sample_configs() -> Vec<ModelConfig> {
    [
        ModelConfig::repulsive(Case::A, 1, 1.0),
        ModelConfig::repulsive(Case::A, 3, -2.0),
        ModelConfig::repulsive(Case::B, 5, 0.5),
        ModelConfig::non_rational(Case::First, -3, 40.0),
        ModelConfig::non_rational(Case::Second, 3, 40.0),
    ]
    .into_iter()
    .map(|c| c.expect("fixed sample parameters are valid"))
    .collect()
}

fn ode_residual_check() -> CheckResult {
    let mut worst = 0.0_f64;
    let mut states = 0;
    for cfg in sample_configs() {
        for block in permissible_blocks(&cfg, 4).map_err(|e| e.to_string())? {
            for root in models::spectrum(&cfg, &block).map_err(|e| e.to_string())?.iter().filter(|r| r.physical) {
                let points: Vec<f64> = (0..10)
                    .map(|i| match cfg.example {
                        Example::RepulsivePolynomial => 0.1 + 0.5 * i as f64,
                        Example::NonRational => 1.05 + 0.6 * i as f64,
                    })
                    .collect();
                for r in ode_residuals(&cfg, &block, root, &points).map_err(|e| e.to_string())? {
                    worst = worst.max(r.relative());
                }
                states += 1;
            }
        }
    }
    ensure(worst < 1e-8, || format!("relative residual {worst:e}"))?;
    Ok(format!("{states} states, max relative residual {worst:e}"))
}

/// `(1/rho) d(rho A)/d rho` by Richardson-extrapolated central differences.
pub fn curl_numeric<F: Fn(f64) -> f64>(rho_a: F, rho: f64) -> f64 {
    let d = |h: f64| (rho_a(rho - 2.0 * h) - 8.0 * rho_a(rho - h) + 8.0 * rho_a(rho + h) - rho_a(rho + 2.0 * h)) / (12.0 * h);
    let h = 1e-2 * rho.min(1.0);
    let (coarse, fine) = (d(h), d(0.5 * h));
    (fine + (fine - coarse) / 15.0) / rho
}

fn field_identities() -> CheckResult {
    let mut worst = 0.0_f64;
    let configs = [
        ModelConfig::repulsive(Case::A, 1, 1.5),
        ModelConfig::repulsive(Case::A, 1, -2.0),
        ModelConfig::non_rational(Case::Second, 3, 1.0),
        ModelConfig::non_rational(Case::First, -2, 1.0),
    ];
    for cfg in configs {
        let cfg = cfg.map_err(|e| e.to_string())?;
        for i in 1..=100 {
            let rho = 0.05 * i as f64;
            let curl = curl_numeric(|r| r * vector_potential(&cfg, r).unwrap_or(f64::NAN), rho);
            let b = magnetic_field(&cfg, rho).map_err(|e| e.to_string())?;
            let d = (curl - b).abs() / b.abs().max(1.0);
            worst = worst.max(d);
            ensure(d <= 1e-10, || format!("example {} rho={rho}: B={b} curl={curl}", cfg.example.number()))?;
        }
    }
    let mut flux_err = 0.0_f64;
    for k in (-5..=5).filter(|&k| k != 0) {
        let case = if k < 0 { Case::First } else { Case::Second };
        let cfg = ModelConfig::non_rational(case, k, 1.0).map_err(|e| e.to_string())?;
        let flux = flux_by_quadrature(&cfg).map_err(|e| e.to_string())?;
        let d = (flux - 2.0 * PI * k as f64).abs();
        flux_err = flux_err.max(d);
        ensure(d <= 1e-6, || format!("k={k}: flux {flux} vs {}", 2.0 * PI * k as f64))?;
    }
    Ok(format!("curl max relative gap {worst:e}, flux max error {flux_err:e}"))
}

fn orthogonality() -> CheckResult {
    let mut worst_overlap = 0.0_f64;
    let mut worst_tail = 0.0_f64;
    for cfg in sample_configs() {
        for block in permissible_blocks(&cfg, 3).map_err(|e| e.to_string())? {
            let roots = models::spectrum(&cfg, &block).map_err(|e| e.to_string())?;
            let phys: Vec<_> = roots.iter().filter(|r| r.physical).collect();
            for (i, a) in phys.iter().enumerate() {
                let norm = radial_norm(&cfg, &block, a).map_err(|e| e.to_string())?;
                ensure(norm.total.is_finite() && norm.total > 0.0, || format!("{block}: norm {}", norm.total))?;
                worst_tail = worst_tail.max(norm.tail_fraction());
                for b in &phys[i + 1..] {
                    let o = overlap(&cfg, &block, a, b).map_err(|e| e.to_string())?.abs();
                    worst_overlap = worst_overlap.max(o);
                }
            }
        }
    }
    ensure(worst_overlap <= 1e-6, || format!("overlap {worst_overlap:e}"))?;
    ensure(worst_tail < 1e-12, || format!("tail fraction {worst_tail:e}"))?;
    Ok(format!("max overlap {worst_overlap:e}, max tail fraction {worst_tail:e}"))
}

/// Blocks and box sizes used for oracle comparison.
pub fn oracle_cases() -> Vec<(ModelConfig, BlockSpec, f64)> {
    let pick = |cfg: ModelConfig, index: usize, rho_max: f64| {
        let block = permissible_blocks(&cfg, 4).expect("valid")[index];
        (cfg, block, rho_max)
    };
    vec![
        pick(ModelConfig::repulsive(Case::A, 1, 1.0).unwrap(), 0, 8.0),
        pick(ModelConfig::repulsive(Case::A, 2, -2.0).unwrap(), 2, 8.0),
        pick(ModelConfig::repulsive(Case::B, 4, 0.5).unwrap(), 0, 8.0),
        pick(ModelConfig::repulsive(Case::B, 5, 1.0).unwrap(), 1, 8.0),
        pick(ModelConfig::non_rational(Case::First, -1, 15.0).unwrap(), 0, 40.0),
        pick(ModelConfig::non_rational(Case::First, -3, 40.0).unwrap(), 0, 200.0),
        pick(ModelConfig::non_rational(Case::Second, 3, 40.0).unwrap(), 1, 60.0),
    ]
}

fn oracle_agreement() -> CheckResult {
    let mut states = 0;
    let mut worst = 0.0_f64;
    for (cfg, block, rho_max) in oracle_cases() {
        let grid = GridSpec::new(1e-3, rho_max, 8000).map_err(|e| e.to_string())?;
        let (report, _) = oracle::check_block(&cfg, &block, grid, 1e-3).map_err(|e| e.to_string())?;
        ensure(report.passed, || format!("{} {block}: unmatched {:?}", cfg.case, report.unmatched))?;
        worst = worst.max(report.max_error);
        states += report.pairs.len();
        let roots = models::spectrum(&cfg, &block).map_err(|e| e.to_string())?;
        let root = roots.iter().find(|r| r.physical).ok_or_else(|| format!("{} {block}: no bound state", cfg.case))?;
        let grid = residual_grid(&cfg, &block, root, 1e-3);
        let res = schrodinger_residual(&cfg, &block, root, &grid).map_err(|e| e.to_string())?;
        ensure(res < 1e-5, || format!("{} {block}: Schrodinger residual {res:e}", cfg.case))?;
    }
    Ok(format!("{states} states, max relative error {worst:e}"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn curl_of_uniform_field() {
        // A = B0 rho / 2  =>  B = B0
        let b = curl_numeric(|r| r * 1.5 * r, 0.7);
        assert!((b - 3.0).abs() < 1e-12);
    }

    #[test]
    fn quick_suite_passes() {
        let report = run(&VerifyOptions::default());
        for c in &report.checks {
            assert!(c.passed, "{c}");
        }
    }

    #[test]
    fn full_suite_passes() {
        let report = run(&VerifyOptions { level: Level::Full, ..Default::default() });
        assert!(report.checks.iter().any(|c| c.name == "oracle_agreement"));
        for c in &report.checks {
            assert!(c.passed, "{c}");
        }
    }

    #[test]
    fn injected_fault_is_named() {
        let report = run(&VerifyOptions { fault: Some(Fault::Sequences), ..Default::default() });
        let failed: Vec<_> = report.failures().map(|c| c.name).collect();
        assert_eq!(failed, vec!["sequence_identity"]);
    }
}
