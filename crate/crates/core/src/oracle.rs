//! Independent radial eigensolver with no Heun machinery.
//!
//! Discretizes `-(rho R')' / rho + V R = E R` by finite volumes: node `i`
//! owns the cell between faces `rho_i -+ h/2` (the inner face clipped at the
//! origin), fluxes through the faces use two-point differences, and the mass
//! of each cell is `int rho d rho` over it. The inner face carries no flux and
//! `R(rho_max) = 0`. The resulting generalized problem `K R = E M R` with
//! diagonal `M` is symmetrized and solved by Sturm bisection.

use crate::error::{Error, Result};
use crate::models::{effective_potential, solve_block, BlockSpec, ModelConfig};
use crate::precision::PrecisionPolicy;
use crate::tridiag::SymTridiagonal;

/// Amplitude at the outer wall, relative to the peak, above which the box is too small.
pub const WALL_AMPLITUDE: f64 = 1e-6;

/// Uniform radial grid; the last point is the Dirichlet wall.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub rho_min: f64,
    pub rho_max: f64,
    pub points: usize,
}

impl GridSpec {
    pub fn new(rho_min: f64, rho_max: f64, points: usize) -> Result<Self> {
        if points < 100 {
            return Err(Error::InvalidParameter(format!("grid needs at least 100 points, got {points}")));
        }
        if !(rho_min > 0.0 && rho_max > rho_min && rho_max.is_finite()) {
            return Err(Error::InvalidParameter(format!("bad grid range [{rho_min}, {rho_max}]")));
        }
        Ok(GridSpec { rho_min, rho_max, points })
    }

    /// Grid whose first cell ends exactly at the origin: `rho_min = h / 2`.
    pub fn cell_centered(rho_max: f64, points: usize) -> Result<Self> {
        let h = rho_max / (points as f64 - 0.5);
        Self::new(0.5 * h, rho_max, points)
    }

    pub fn spacing(&self) -> f64 {
        (self.rho_max - self.rho_min) / (self.points - 1) as f64
    }

    pub fn node(&self, i: usize) -> f64 {
        self.rho_min + i as f64 * self.spacing()
    }

    /// Same range with twice the resolution.
    pub fn refined(&self) -> Self {
        GridSpec { points: 2 * self.points - 1, ..*self }
    }
}

/// Lowest eigenvalues of one angular channel.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleSpectrum {
    pub eigenvalues: Vec<f64>,
    pub warnings: Vec<String>,
}

/// Symmetrized operator and the cell masses used to build it.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialOperator {
    pub matrix: SymTridiagonal,
    pub mass: Vec<f64>,
    pub grid: GridSpec,
}

impl RadialOperator {
    pub fn new<V: Fn(f64) -> f64>(potential: V, grid: GridSpec) -> Result<Self> {
        let h = grid.spacing();
        let unknowns = grid.points - 1;
        let face = |i: usize| grid.node(i) + 0.5 * h;
        let mut mass = Vec::with_capacity(unknowns);
        let mut diag = Vec::with_capacity(unknowns);
        for i in 0..unknowns {
            let rho = grid.node(i);
            let upper = face(i);
            let lower = if i == 0 { (rho - 0.5 * h).max(0.0) } else { face(i - 1) };
            let m = 0.5 * (upper * upper - lower * lower) / h;
            let inflow = if i == 0 { 0.0 } else { lower };
            let v = potential(rho);
            if !v.is_finite() {
                return Err(Error::Domain(format!("effective potential not finite at rho = {rho}")));
            }
            mass.push(m);
            diag.push((upper + inflow) / (h * h) + m * v);
        }
        let off: Vec<f64> = (0..unknowns - 1).map(|i| -face(i) / (h * h)).collect();
        let scaled_diag = diag.iter().zip(&mass).map(|(d, m)| d / m).collect();
        let scaled_off = off
            .iter()
            .enumerate()
            .map(|(i, o)| o / (mass[i] * mass[i + 1]).sqrt())
            .collect();
        Ok(RadialOperator { matrix: SymTridiagonal::new(scaled_diag, scaled_off)?, mass, grid })
    }

    /// `R` at the interior nodes for an eigenvalue, scaled to unit peak.
    pub fn radial_vector(&self, eigenvalue: f64) -> Vec<f64> {
        let y = self.matrix.eigenvector(eigenvalue);
        let r: Vec<f64> = y.iter().zip(&self.mass).map(|(y, m)| y / m.sqrt()).collect();
        let peak = r.iter().fold(0.0_f64, |p, x| p.max(x.abs()));
        r.iter().map(|x| x / peak).collect()
    }

    /// `|R|` next to the wall relative to its peak, for the given eigenvalue.
    pub fn wall_amplitude(&self, eigenvalue: f64) -> f64 {
        self.radial_vector(eigenvalue).last().map_or(0.0, |x| x.abs())
    }
}

/// Lowest `count` eigenvalues of `-R'' - R'/rho + V R` on the grid.
pub fn radial_eigensolve_with<V: Fn(f64) -> f64>(potential: V, grid: GridSpec, count: usize) -> Result<OracleSpectrum> {
    let op = RadialOperator::new(potential, grid)?;
    let eigenvalues = op.matrix.lowest(count)?;
    let mut warnings = Vec::new();
    if let Some(&lowest) = eigenvalues.first() {
        let wall = op.wall_amplitude(lowest);
        if wall > WALL_AMPLITUDE {
            warnings.push(format!(
                "lowest state has relative amplitude {wall:e} at rho_max = {}; enlarge the box",
                grid.rho_max
            ));
        }
    }
    Ok(OracleSpectrum { eigenvalues, warnings })
}

/// Lowest `count` eigenvalues of the channel `e^{i sigma |l| phi}` of a model.
pub fn radial_eigensolve(config: &ModelConfig, l: i64, sigma: i32, grid: GridSpec, count: usize) -> Result<OracleSpectrum> {
    let m = sigma as i64 * l.abs();
    let cfg = *config;
    radial_eigensolve_with(
        |rho| effective_potential(&cfg, m, rho).unwrap_or(f64::NAN),
        grid,
        count,
    )
}

/// One analytic value paired with its nearest numeric one.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MatchPair {
    pub analytic: f64,
    pub numeric: f64,
    /// `|a - n| / max(|a|, 1)`.
    pub error: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MatchReport {
    pub pairs: Vec<MatchPair>,
    /// Analytic values below the ceiling left without a partner within tolerance.
    pub unmatched: Vec<f64>,
    pub max_error: f64,
    pub passed: bool,
}

/// Relative error, switching to absolute below unit magnitude.
pub fn spectral_error(analytic: f64, numeric: f64) -> f64 {
    (analytic - numeric).abs() / analytic.abs().max(1.0)
}

/// Greedy nearest matching of analytic against numeric values.
///
/// Analytic values above `ceiling` are paired when possible but never cause failure.
pub fn compare_spectra(analytic: &[f64], numeric: &[f64], tol: f64, ceiling: f64) -> MatchReport {
    let mut used = vec![false; numeric.len()];
    let mut pairs = Vec::new();
    let mut unmatched = Vec::new();
    for &a in analytic {
        let best = numeric
            .iter()
            .enumerate()
            .filter(|(j, _)| !used[*j])
            .min_by(|(_, x), (_, y)| (a - **x).abs().total_cmp(&(a - **y).abs()));
        match best {
            Some((j, &v)) if spectral_error(a, v) <= tol => {
                used[j] = true;
                pairs.push(MatchPair { analytic: a, numeric: v, error: spectral_error(a, v) });
            }
            _ if a <= ceiling => unmatched.push(a),
            _ => {}
        }
    }
    let max_error = pairs.iter().map(|p| p.error).fold(0.0, f64::max);
    MatchReport { passed: unmatched.is_empty(), pairs, unmatched, max_error }
}

/// Analytic physical energies of a block checked against the oracle on `grid`.
pub fn check_block(config: &ModelConfig, block: &BlockSpec, grid: GridSpec, tol: f64) -> Result<(MatchReport, OracleSpectrum)> {
    let analytic: Vec<f64> = solve_block(config, block, PrecisionPolicy::Auto)?
        .physical()
        .map(|r| r.energy)
        .collect();
    let top = analytic.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let m = block.angular_number();
    let cfg = *config;
    let op = RadialOperator::new(|rho| effective_potential(&cfg, m, rho).unwrap_or(f64::NAN), grid)?;
    let count = if analytic.is_empty() {
        1
    } else {
        (op.matrix.count_below(top + top.abs().max(1.0) * 0.05) + 1).min(op.matrix.len())
    };
    let numeric = radial_eigensolve(config, block.l, block.sigma, grid, count)?;
    Ok((compare_spectra(&analytic, &numeric.eigenvalues, tol, f64::INFINITY), numeric))
}

/// Observed order `log2(e_h / e_{h/2})` of the error in the eigenvalue nearest `exact`.
pub fn convergence_order<V: Fn(f64) -> f64 + Copy>(potential: V, grid: GridSpec, exact: f64) -> Result<f64> {
    let nearest = |g: GridSpec| -> Result<f64> {
        let op = RadialOperator::new(potential, g)?;
        let idx = op.matrix.count_below(exact).min(op.matrix.len() - 1);
        let above = op.matrix.eigenvalue(idx)?;
        let below = if idx > 0 { op.matrix.eigenvalue(idx - 1)? } else { above };
        Ok(if (below - exact).abs() < (above - exact).abs() { below } else { above })
    };
    let coarse = (nearest(grid)? - exact).abs();
    let fine = (nearest(grid.refined())? - exact).abs();
    Ok((coarse / fine).log2())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_validation() {
        assert!(GridSpec::new(0.0, 1.0, 200).is_err());
        assert!(GridSpec::new(0.1, 1.0, 50).is_err());
        assert!(GridSpec::new(2.0, 1.0, 200).is_err());
        let g = GridSpec::cell_centered(10.0, 1000).unwrap();
        assert!((g.rho_min - 0.5 * g.spacing()).abs() < 1e-15);
        assert_eq!(g.refined().spacing(), 0.5 * g.spacing());
    }

    #[test]
    fn free_disc() {
        // Dirichlet disc of radius 10: E = (j_{0,1} / 10)^2
        let j01 = 2.404_825_557_695_773_f64;
        let g = GridSpec::cell_centered(10.0, 2000).unwrap();
        let ev = radial_eigensolve_with(|_| 0.0, g, 3).unwrap().eigenvalues;
        assert!((ev[0] / (j01 / 10.0).powi(2) - 1.0).abs() < 1e-5, "{}", ev[0]);
        // m = 1: j_{1,1} = 3.8317...
        let j11 = 3.831_705_970_207_512_f64;
        let ev = radial_eigensolve_with(|r| 1.0 / (r * r), g, 1).unwrap().eigenvalues;
        assert!((ev[0] / (j11 / 10.0).powi(2) - 1.0).abs() < 1e-4, "{}", ev[0]);
    }

    #[test]
    fn harmonic_oscillator_and_order() {
        // 2D oscillator -Lap + rho^2: E = 2(2 n_r + |m| + 1)
        let g = GridSpec::cell_centered(8.0, 800).unwrap();
        let ev = radial_eigensolve_with(|r| r * r, g, 3).unwrap();
        for (i, e) in ev.eigenvalues.iter().enumerate() {
            assert!((e - (4.0 * i as f64 + 2.0)).abs() < 1e-3, "{i}: {e}");
        }
        assert!(ev.warnings.is_empty());
        let order = convergence_order(|r| r * r, g, 2.0).unwrap();
        assert!((order - 2.0).abs() < 0.2, "{order}");
    }

    #[test]
    fn small_box_warns() {
        let g = GridSpec::cell_centered(1.5, 200).unwrap();
        let ev = radial_eigensolve_with(|r| r * r, g, 1).unwrap();
        assert!(!ev.warnings.is_empty());
        assert!(radial_eigensolve_with(|r| r * r, g, 500).is_err());
    }

    #[test]
    fn model_anchors() {
        use crate::models::Case;
        let cfg = ModelConfig::repulsive(Case::A, 1, 1.0).unwrap();
        let g = GridSpec::new(1e-3, 8.0, 4000).unwrap();
        let ev = radial_eigensolve(&cfg, 0, 1, g, 1).unwrap();
        assert!((ev.eigenvalues[0] - 1.0).abs() < 1e-3, "{:?}", ev.eigenvalues);

        let cfg = ModelConfig::non_rational(Case::First, -1, 15.0).unwrap();
        let g = GridSpec::new(1e-3, 40.0, 8000).unwrap();
        let ev = radial_eigensolve(&cfg, 1, 1, g, 3).unwrap();
        assert!(ev.eigenvalues.iter().any(|e| (e + 1.0).abs() < 1e-3), "{:?}", ev.eigenvalues);
    }

    #[test]
    fn box_size_invariance() {
        use crate::models::Case;
        let cfg = ModelConfig::repulsive(Case::A, 2, -2.0).unwrap();
        let small = GridSpec::cell_centered(6.0, 3000).unwrap();
        let large = GridSpec { rho_max: small.rho_min + 4499.0 * small.spacing(), points: 4500, ..small };
        let a = radial_eigensolve(&cfg, 1, 1, small, 4).unwrap().eigenvalues;
        let b = radial_eigensolve(&cfg, 1, 1, large, 4).unwrap().eigenvalues;
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).abs() <= 1e-6 * x.abs().max(1.0), "{x} vs {y}");
        }
    }

    #[test]
    fn nothing_below_analytic_ground_state() {
        use crate::models::{permissible_blocks, Case};
        let cfg = ModelConfig::repulsive(Case::A, 2, -2.0).unwrap();
        let block = permissible_blocks(&cfg, 3).unwrap()[2];
        let ground = solve_block(&cfg, &block, PrecisionPolicy::Auto).unwrap().roots[0].energy;
        let g = GridSpec::new(1e-3, 8.0, 4000).unwrap();
        let (report, numeric) = check_block(&cfg, &block, g, 1e-3).unwrap();
        assert!(report.passed);
        assert!(numeric.eigenvalues[0] > ground - 1e-3 * ground.abs(), "{} vs {ground}", numeric.eigenvalues[0]);
    }

    #[test]
    fn matching() {
        let r = compare_spectra(&[1.0, 2.0], &[1.0, 2.0], 1e-12, f64::INFINITY);
        assert!(r.passed && r.max_error == 0.0);
        let r = compare_spectra(&[-1.0], &[-0.9995, 3.2], 1e-2, f64::INFINITY);
        assert!(r.passed && r.pairs[0].numeric == -0.9995);
        let r = compare_spectra(&[-1.0, 5.0], &[-1.0], 1e-2, f64::INFINITY);
        assert_eq!(r.unmatched, vec![5.0]);
        assert!(!r.passed);
        let r = compare_spectra(&[-1.0, 5.0], &[-1.0], 1e-2, 0.0);
        assert!(r.passed);
    }
}
