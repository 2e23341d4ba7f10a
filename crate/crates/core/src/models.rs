//! The two magnetic systems in dimensionless form.
//!
//! Lengths are measured in `a`, energies in `hbar^2 / (2 m a^2)`, the vector
//! potential in `c hbar / (e a)`, the field in `c hbar / (e a^2)` and flux in
//! `c hbar / e`. In these units the Hamiltonian acting on
//! `R(rho) e^{i m phi}` reduces to
//!
//! ```text
//! -R'' - R'/rho + [(m/rho - A(rho))^2 + u(rho)] R = E R.
//! ```
//!
//! * Repulsive polynomial system: `A = rho (eps + 3 rho^2) / 2`,
//!   `u = -(2 rho^6 + eps rho^4 + 2 k rho^2)`, `E = lambda`.
//! * Non-rational system: `A = -k / (rho sqrt(rho^2 + 1))`,
//!   `u = (3 / (rho^2+1)^2 - eps / (rho^2+1)) / 4`, `E = -chi^2`.

use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::heun::{
    heunb_sequences_spectral, heunc_sequences_spectral, polynomial_from_recurrence, HeunBParams,
    HeunCParams, OdeResidual, PolynomialCoefficients, SpectralHeunB, SpectralHeunC, SpectralPoly,
    TridiagonalSequences,
};
use crate::precision::{dispatch, Extended, PrecisionPolicy, Real, DOUBLE_BITS};
use crate::quad;
use crate::spectral::{determinant_polynomial_in, find_roots, polish_real_root, refine_roots, symmetric_roots};

/// Residual a physical root's coefficient vector must meet.
pub const RESIDUAL_TOL: f64 = 1e-10;
/// Relative imaginary part below which a root counts as real.
pub const REALITY_TOL: f64 = 1e-9;
/// Roots of the non-rational system in `[-BORDERLINE, 0)` are flagged, not accepted.
pub const BORDERLINE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Example {
    /// Polynomial potential overwhelmed by a quadratically growing field.
    RepulsivePolynomial,
    /// Algebraic field with finite total flux.
    NonRational,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Case {
    /// Repulsive system, `e^{+i l phi}` substitution.
    A,
    /// Repulsive system, `e^{-i l phi}` substitution.
    B,
    /// Non-rational system, solution regular through `n + k + 1 = 0`.
    First,
    /// Non-rational system, solution regular through `n + l + 1 = 0`.
    Second,
}

impl Example {
    pub fn number(self) -> u8 {
        match self {
            Example::RepulsivePolynomial => 1,
            Example::NonRational => 2,
        }
    }
}

impl Case {
    pub fn example(self) -> Example {
        match self {
            Case::A | Case::B => Example::RepulsivePolynomial,
            Case::First | Case::Second => Example::NonRational,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Case::A => "a",
            Case::B => "b",
            Case::First => "first",
            Case::Second => "second",
        }
    }
}

impl fmt::Display for Case {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// One system with its Hamiltonian parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelConfig {
    pub example: Example,
    pub case: Case,
    pub k: i64,
    pub epsilon: f64,
    /// Length scale; only enters when converting to physical units.
    pub a: f64,
}

impl ModelConfig {
    pub fn new(example: Example, case: Case, k: i64, epsilon: f64) -> Result<Self> {
        let cfg = ModelConfig { example, case, k, epsilon, a: 1.0 };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn repulsive(case: Case, k: i64, epsilon: f64) -> Result<Self> {
        Self::new(Example::RepulsivePolynomial, case, k, epsilon)
    }

    pub fn non_rational(case: Case, k: i64, epsilon: f64) -> Result<Self> {
        Self::new(Example::NonRational, case, k, epsilon)
    }

    pub fn with_length_scale(mut self, a: f64) -> Result<Self> {
        self.a = a;
        self.validate()?;
        Ok(self)
    }

    /// Checks the sign constraints on `k`. `k = 0` is accepted where it only
    /// empties the block list; see [`ModelConfig::diagnostics`].
    pub fn validate(&self) -> Result<()> {
        if self.case.example() != self.example {
            return Err(Error::InvalidParameter(format!(
                "case {} does not belong to example {}",
                self.case,
                self.example.number()
            )));
        }
        if !self.epsilon.is_finite() {
            return Err(Error::InvalidParameter(format!("epsilon = {} is not finite", self.epsilon)));
        }
        if !(self.a.is_finite() && self.a > 0.0) {
            return Err(Error::InvalidParameter(format!("length scale a = {} must be positive", self.a)));
        }
        match self.case {
            Case::A => Ok(()),
            Case::B if self.k < 0 => Err(Error::Constraint(format!(
                "case b needs k - n - 1 to be a non-negative even integer, so k must be a natural number (got k = {})",
                self.k
            ))),
            Case::First if self.k > 0 => Err(Error::Constraint(format!(
                "first case needs n + k + 1 = 0, so k must be a negative integer (got k = {})",
                self.k
            ))),
            Case::Second if self.k < 0 => Err(Error::Constraint(format!(
                "second case needs n + l + 1 = 0 with k + l >= 0, so k must be a natural number (got k = {})",
                self.k
            ))),
            _ => Ok(()),
        }
    }

    /// Notes on degenerate but accepted parameter choices.
    pub fn diagnostics(&self) -> Vec<String> {
        let mut out = Vec::new();
        if self.k == 0 && self.case != Case::A {
            out.push(format!("k = 0 admits no blocks in case {}", self.case));
        }
        if self.example == Example::NonRational && self.k == 0 {
            out.push("k = 0 switches the magnetic field off".into());
        }
        out
    }
}

/// Conversion factors from dimensionless to physical quantities.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnitSystem {
    pub hbar: f64,
    pub mass: f64,
    pub charge: f64,
    pub c: f64,
    pub a: f64,
}

impl UnitSystem {
    /// All constants set to one.
    pub fn natural(a: f64) -> Self {
        UnitSystem { hbar: 1.0, mass: 1.0, charge: 1.0, c: 1.0, a }
    }

    pub fn length(&self) -> f64 {
        self.a
    }

    /// `hbar^2 / (2 m a^2)`.
    pub fn energy(&self) -> f64 {
        self.hbar * self.hbar / (2.0 * self.mass * self.a * self.a)
    }

    /// `c hbar / (e a)`.
    pub fn vector_potential(&self) -> f64 {
        self.c * self.hbar / (self.charge * self.a)
    }

    /// `c hbar / (e a^2)`.
    pub fn magnetic_field(&self) -> f64 {
        self.c * self.hbar / (self.charge * self.a * self.a)
    }

    /// `c hbar / e`.
    pub fn flux(&self) -> f64 {
        self.c * self.hbar / self.charge
    }
}

/// A family of states with fixed polynomial degree and angular dependence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct BlockSpec {
    /// Degree of the Heun polynomial.
    pub n: usize,
    /// Angular number as it appears in the radial factors.
    pub l: i64,
    /// Sign of the phase `e^{i sigma |l| phi}`.
    pub sigma: i32,
}

impl BlockSpec {
    /// Signed angular momentum `m` of `e^{i m phi}`.
    pub fn angular_number(&self) -> i64 {
        self.sigma as i64 * self.l.abs()
    }
}

impl fmt::Display for BlockSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "n={} l={} sigma={:+}", self.n, self.l, self.sigma)
    }
}

/// One root of the quantization condition.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralRoot {
    /// `lambda` (repulsive system) or `chi` (non-rational system).
    pub value: f64,
    /// Dimensionless energy.
    pub energy: f64,
    pub physical: bool,
    /// Non-rational roots with `-1e-9 <= chi < 0`.
    pub borderline: bool,
    /// Heun polynomial coefficients; present for physical roots.
    pub eigenvector: Option<PolynomialCoefficients>,
}

impl SpectralRoot {
    pub fn residual(&self) -> Option<f64> {
        self.eigenvector.as_ref().map(|p| p.terminal_residual)
    }

    fn coefficients(&self) -> Result<&PolynomialCoefficients> {
        self.eigenvector
            .as_ref()
            .filter(|_| self.physical)
            .ok_or_else(|| Error::NotPhysical(format!("root {} has no bound state", self.value)))
    }
}

/// Everything computed for one block.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockSpectrum {
    pub block: BlockSpec,
    /// Real roots, ascending in energy.
    pub roots: Vec<SpectralRoot>,
    /// Roots discarded for being complex.
    pub complex_roots: Vec<Complex64>,
    /// Significand bits of the successful attempt.
    pub precision_bits: u32,
    /// Largest relative gap between the companion and symmetric eigenvalue
    /// routes, where the latter applies.
    pub symmetric_gap: Option<f64>,
    /// Worst of the root-finder residuals and the recurrence closure at every
    /// real root, physical or not.
    pub root_quality: f64,
    pub warnings: Vec<String>,
}

impl BlockSpectrum {
    /// Number of roots before any filtering.
    pub fn total_roots(&self) -> usize {
        self.roots.len() + self.complex_roots.len()
    }

    /// Roots removed by the physicality filter.
    pub fn filtered(&self) -> usize {
        self.total_roots() - self.physical().count()
    }

    pub fn physical(&self) -> impl Iterator<Item = &SpectralRoot> {
        self.roots.iter().filter(|r| r.physical)
    }
}

/// Sampled radial profile at `phi = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialProfile {
    pub grid: Vec<f64>,
    pub values: Vec<Complex64>,
    /// `int |psi|^2 rho d rho` over the half line.
    pub norm: f64,
}

/// Norm of a radial state split at the decay radius.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadialNorm {
    pub total: f64,
    pub tail: f64,
    pub decay_radius: f64,
}

impl RadialNorm {
    pub fn tail_fraction(&self) -> f64 {
        self.tail / self.total
    }
}

/// Blocks with `n <= n_max`. For the first non-rational case `n` is fixed and
/// `n_max + 1` consecutive values of `l` are listed instead.
pub fn permissible_blocks(config: &ModelConfig, n_max: usize) -> Result<Vec<BlockSpec>> {
    config.validate()?;
    let k = config.k;
    let blocks = match config.case {
        Case::A => {
            let start = (k - 1).max(0) as usize;
            (start..=n_max)
                .map(|n| BlockSpec { n, l: n as i64 + 1 - k, sigma: 1 })
                .collect()
        }
        Case::B => (0..=n_max)
            .filter(|&n| {
                let rest = k - n as i64 - 1;
                rest >= 0 && rest % 2 == 0
            })
            .map(|n| BlockSpec { n, l: (k - n as i64 - 1) / 2, sigma: -1 })
            .collect(),
        Case::First => {
            if k == 0 {
                Vec::new()
            } else {
                let n = (-k - 1) as usize;
                (0..=n_max as i64)
                    .map(|i| BlockSpec { n, l: -k + i, sigma: 1 })
                    .collect()
            }
        }
        Case::Second => (0..k)
            .rev()
            .map(|n| n as usize)
            .filter(|&n| n <= n_max)
            .map(|n| BlockSpec { n, l: -(n as i64) - 1, sigma: -1 })
            .collect(),
    };
    Ok(blocks)
}

/// Checks a block against the model's polynomiality constraints.
pub fn validate_block(config: &ModelConfig, block: &BlockSpec) -> Result<()> {
    config.validate()?;
    let (k, n, l) = (config.k, block.n as i64, block.l);
    let fail = |why: String| Err(Error::Constraint(format!("block {block} not permissible: {why}")));
    match config.case {
        Case::A => {
            if l != n + 1 - k {
                return fail(format!("case a needs l + k = n + 1 (k = {k})"));
            }
            if l < 0 {
                return fail("l must be non-negative".into());
            }
            if block.sigma != 1 {
                return fail("case a carries e^{+i l phi}".into());
            }
        }
        Case::B => {
            if 2 * l != k - n - 1 || l < 0 {
                return fail(format!("case b needs k - 2l = n + 1 with l >= 0 (k = {k})"));
            }
            if block.sigma != -1 {
                return fail("case b carries e^{-i l phi}".into());
            }
        }
        Case::First => {
            if n + k + 1 != 0 {
                return fail(format!("first case needs n + k + 1 = 0 (k = {k})"));
            }
            if k + l < 0 {
                return fail("regularity at the origin needs k + l >= 0".into());
            }
            if block.sigma != 1 {
                return fail("first case has l > 0, so sigma = +1".into());
            }
        }
        Case::Second => {
            if n + l + 1 != 0 {
                return fail("second case needs n + l + 1 = 0".into());
            }
            if k + l < 0 {
                return fail(format!("regularity at the origin needs k + l >= 0 (k = {k})"));
            }
            if block.sigma != -1 {
                return fail("second case has l < 0, so sigma = -1".into());
            }
        }
    }
    Ok(())
}

/// Resolves a block from whichever of `n`, `l` the caller supplies.
pub fn block_for(config: &ModelConfig, n: Option<usize>, l: Option<i64>) -> Result<BlockSpec> {
    let k = config.k;
    let block = match (config.case, n, l) {
        (Case::A, Some(n), _) => BlockSpec { n, l: n as i64 + 1 - k, sigma: 1 },
        (Case::A, None, Some(l)) => {
            let n = l + k - 1;
            if n < 0 {
                return Err(Error::Constraint(format!("l = {l} gives negative n for k = {k}")));
            }
            BlockSpec { n: n as usize, l, sigma: 1 }
        }
        (Case::B, Some(n), _) => BlockSpec { n, l: (k - n as i64 - 1).div_euclid(2), sigma: -1 },
        (Case::B, None, Some(l)) => {
            let n = k - 2 * l - 1;
            if n < 0 {
                return Err(Error::Constraint(format!("l = {l} gives negative n for k = {k}")));
            }
            BlockSpec { n: n as usize, l, sigma: -1 }
        }
        (Case::First, _, Some(l)) => BlockSpec { n: (-k - 1).max(0) as usize, l, sigma: 1 },
        (Case::First, Some(n), None) => BlockSpec { n, l: -k, sigma: 1 },
        (Case::Second, Some(n), _) => BlockSpec { n, l: -(n as i64) - 1, sigma: -1 },
        (Case::Second, None, Some(l)) => {
            if l >= 0 {
                return Err(Error::Constraint("second case needs l < 0".into()));
            }
            BlockSpec { n: (-l - 1) as usize, l, sigma: -1 }
        }
        (_, None, None) => {
            return Err(Error::InvalidParameter("select a block with n and/or l".into()))
        }
    };
    if let (Some(want), true) = (l, config.case == Case::A || config.case == Case::B) {
        if want != block.l {
            return Err(Error::Constraint(format!("n and l are inconsistent for k = {k}")));
        }
    }
    validate_block(config, &block)?;
    Ok(block)
}

/// Model sequences with the spectral parameter left symbolic (`s = lambda` or `chi`).
pub fn block_sequences(config: &ModelConfig, block: &BlockSpec) -> Result<TridiagonalSequences> {
    validate_block(config, block)?;
    let eps = config.epsilon;
    let k = config.k as f64;
    let n = block.n as f64;
    let l = block.l as f64;
    let s = SpectralPoly::S;
    let idx = |count: usize| (0..count).map(|j| j as f64);

    let (a, b, c): (Vec<SpectralPoly>, Vec<SpectralPoly>, Vec<SpectralPoly>) = match config.case {
        Case::A => (
            idx(block.n + 1).map(|j| s + (-eps * (2.0 * j + 1.0))).collect(),
            idx(block.n)
                .map(|j| SpectralPoly::constant(2.0 * (j * (j + n - k + 3.0) + n - k + 2.0)))
                .collect(),
            idx(block.n).map(|j| SpectralPoly::constant(4.0 * (n - j))).collect(),
        ),
        Case::B => (
            idx(block.n + 1).map(|j| s + (-eps * (k - n + 2.0 * j))).collect(),
            idx(block.n)
                .map(|j| SpectralPoly::constant(j * (2.0 * j - n + k + 3.0) - n + k + 1.0))
                .collect(),
            idx(block.n).map(|j| SpectralPoly::constant(4.0 * (n - j))).collect(),
        ),
        Case::First => (
            idx(block.n + 1)
                .map(|j| {
                    s * (s + 2.0 * (2.0 * j - n - l))
                        + (l * l - n * n - n - j * (j - 2.0 * n - 1.0) - 0.25 * (1.0 + eps))
                })
                .collect(),
            idx(block.n).map(|j| SpectralPoly::constant((j + 1.0) * (j - n - l))).collect(),
            idx(block.n).map(|j| s * (4.0 * (n - j))).collect(),
        ),
        Case::Second => (
            idx(block.n + 1)
                .map(|j| {
                    s * (s + 2.0 * (2.0 * j - k - n)) + (-j * (j - 2.0 * n - 1.0) + n + 0.25 * (3.0 - eps))
                })
                .collect(),
            idx(block.n).map(|j| SpectralPoly::constant((j + 1.0) * (j - n - k))).collect(),
            idx(block.n).map(|j| s * (4.0 * (n - j))).collect(),
        ),
    };
    TridiagonalSequences::new(a, b, c)
}

/// The Heun equation a block reduces to, with the spectral parameter symbolic.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BlockHeun {
    Biconfluent(SpectralHeunB),
    Confluent(SpectralHeunC),
}

impl BlockHeun {
    /// Generic recurrence sequences for this block's degree.
    pub fn sequences(&self, n: usize) -> TridiagonalSequences {
        match self {
            BlockHeun::Biconfluent(p) => heunb_sequences_spectral(p, n),
            BlockHeun::Confluent(p) => heunc_sequences_spectral(p, n),
        }
    }
}

/// Heun parameters of a block: `(l, eps, 3l + 2k, -l eps - lambda)` and
/// `(l, eps, -3l + 2k, eps l - lambda)` for the repulsive cases,
/// `(4 chi, +-(k - l), k + l, 0, (k^2 - l^2)/2 + (eps + 1)/4 - chi^2)` for the
/// non-rational ones.
pub fn block_heun(config: &ModelConfig, block: &BlockSpec) -> Result<BlockHeun> {
    validate_block(config, block)?;
    let eps = config.epsilon;
    let k = config.k as f64;
    let l = block.l as f64;
    let s = SpectralPoly::S;
    let c = SpectralPoly::constant;
    Ok(match config.case {
        Case::A => BlockHeun::Biconfluent(SpectralHeunB {
            alpha: c(l),
            beta: c(eps),
            gamma: c(3.0 * l + 2.0 * k),
            delta: -s + (-l * eps),
        }),
        Case::B => BlockHeun::Biconfluent(SpectralHeunB {
            alpha: c(l),
            beta: c(eps),
            gamma: c(-3.0 * l + 2.0 * k),
            delta: -s + eps * l,
        }),
        Case::First | Case::Second => {
            let beta = if config.case == Case::First { k - l } else { l - k };
            BlockHeun::Confluent(SpectralHeunC {
                alpha: s * 4.0,
                beta: c(beta),
                gamma: c(k + l),
                delta: c(0.0),
                eta: -(s * s) + (0.5 * (k * k - l * l) + 0.25 * (eps + 1.0)),
            })
        }
    })
}

/// Argument of the Heun function at radius `rho`: `rho^2 / 2` or `t(rho)`.
pub fn heun_argument(config: &ModelConfig, rho: f64) -> f64 {
    match config.example {
        Example::RepulsivePolynomial => 0.5 * rho * rho,
        Example::NonRational => t_of_rho(rho),
    }
}

/// `t = (1 + sqrt(rho^2 + 1)) / 2`.
pub fn t_of_rho(rho: f64) -> f64 {
    0.5 * (1.0 + rho.hypot(1.0))
}

/// `t - 1` without cancellation near the origin.
fn t_minus_one(rho: f64) -> f64 {
    let r2 = rho * rho;
    r2 / (2.0 * (1.0 + rho.hypot(1.0)))
}

/// Dimensionless energy of a spectral parameter value.
pub fn energy_of(config: &ModelConfig, value: f64) -> f64 {
    match config.example {
        Example::RepulsivePolynomial => value,
        Example::NonRational => -value * value,
    }
}

/// Physical roots of the block, ascending in energy.
pub fn spectrum(config: &ModelConfig, block: &BlockSpec) -> Result<Vec<SpectralRoot>> {
    Ok(solve_block(config, block, PrecisionPolicy::Auto)?.roots)
}

/// Full pipeline for one block: sequences, determinant, roots, physicality
/// filter and coefficient vectors, escalating precision as needed.
pub fn solve_block(config: &ModelConfig, block: &BlockSpec, policy: PrecisionPolicy) -> Result<BlockSpectrum> {
    let seqs = block_sequences(config, block)?;
    let mut worst = (f64::NAN, 0);
    for bits in policy.ladder(block.n) {
        let attempt = dispatch(
            bits,
            || solve_at::<f64>(config, block, &seqs, bits),
            || solve_at::<Extended>(config, block, &seqs, bits),
        )?;
        let max_residual = attempt
            .physical()
            .filter_map(|r| r.residual())
            .fold(attempt.root_quality, |m, r| if r.is_nan() { f64::INFINITY } else { m.max(r) });
        if max_residual <= RESIDUAL_TOL {
            return Ok(attempt);
        }
        worst = (max_residual, bits);
    }
    Err(Error::PrecisionFailure { residual: worst.0, bits: worst.1 })
}

fn solve_at<T: Real>(
    config: &ModelConfig,
    block: &BlockSpec,
    seqs: &TridiagonalSequences,
    bits: u32,
) -> Result<BlockSpectrum> {
    let det = determinant_polynomial_in::<T>(seqs, bits);
    let mut root_set = find_roots(&det)?;
    if bits > DOUBLE_BITS {
        root_set = refine_roots::<T>(seqs, &root_set.roots, bits);
    }
    let mut warnings = Vec::new();
    if root_set.has_multiple() {
        warnings.push(format!("block {block}: near-multiple roots detected"));
    }

    let mut root_quality = root_set.residuals.iter().fold(0.0_f64, |m, &r| m.max(r));
    let mut roots = Vec::new();
    let mut complex_roots = Vec::new();
    for z in &root_set.roots {
        if z.im.abs() > REALITY_TOL * z.norm().max(1.0) {
            complex_roots.push(*z);
            continue;
        }
        let s: T = polish_real_root(seqs, z.re, bits);
        let value = s.to_f64();
        let (physical, borderline) = match config.example {
            Example::RepulsivePolynomial => (true, false),
            Example::NonRational => (value < -BORDERLINE, (-BORDERLINE..0.0).contains(&value)),
        };
        if borderline {
            warnings.push(format!("block {block}: root chi = {value:e} sits at the sign boundary"));
        }
        let poly = polynomial_from_recurrence(&seqs.at(&s, bits))?.to_f64();
        root_quality = root_quality.max(if poly.terminal_residual.is_nan() { f64::INFINITY } else { poly.terminal_residual });
        let eigenvector = physical.then_some(poly);
        roots.push(SpectralRoot {
            value,
            energy: energy_of(config, value),
            physical,
            borderline,
            eigenvector,
        });
    }
    roots.sort_by(|x, y| x.energy.total_cmp(&y.energy).then(x.value.total_cmp(&y.value)));

    let symmetric_gap = if config.example == Example::RepulsivePolynomial {
        let sym = symmetric_roots(seqs)?;
        let mut values: Vec<f64> = roots.iter().map(|r| r.value).collect();
        values.sort_by(f64::total_cmp);
        let gap = if values.len() == sym.len() {
            values
                .iter()
                .zip(&sym)
                .map(|(x, y)| (x - y).abs() / x.abs().max(y.abs()).max(1.0))
                .fold(0.0_f64, f64::max)
        } else {
            f64::INFINITY
        };
        if gap > 1e-8 {
            warnings.push(format!("block {block}: companion and symmetric roots differ by {gap:e}"));
        }
        Some(gap)
    } else {
        None
    };
    if !complex_roots.is_empty() && config.example == Example::RepulsivePolynomial {
        warnings.push(format!("block {block}: {} complex roots discarded", complex_roots.len()));
    }

    Ok(BlockSpectrum {
        block: *block,
        roots,
        complex_roots,
        precision_bits: bits,
        symmetric_gap,
        root_quality,
        warnings,
    })
}

/// `A_phi` in units of `c hbar / (e a)`.
pub fn vector_potential(config: &ModelConfig, rho: f64) -> Result<f64> {
    match config.example {
        Example::RepulsivePolynomial => {
            check_rho(rho, false)?;
            Ok(0.5 * rho * (config.epsilon + 3.0 * rho * rho))
        }
        Example::NonRational => {
            check_rho(rho, true)?;
            Ok(-(config.k as f64) / (rho * rho.hypot(1.0)))
        }
    }
}

/// `u` in units of `hbar^2 / (2 m a^2)`.
pub fn scalar_potential(config: &ModelConfig, rho: f64) -> Result<f64> {
    check_rho(rho, false)?;
    let eps = config.epsilon;
    Ok(match config.example {
        Example::RepulsivePolynomial => {
            let r2 = rho * rho;
            -(2.0 * r2 * r2 * r2 + eps * r2 * r2 + 2.0 * config.k as f64 * r2)
        }
        Example::NonRational => {
            let w = 1.0 / (rho * rho + 1.0);
            0.25 * (3.0 * w * w - eps * w)
        }
    })
}

/// `B` in units of `c hbar / (e a^2)`.
pub fn magnetic_field(config: &ModelConfig, rho: f64) -> Result<f64> {
    check_rho(rho, false)?;
    Ok(match config.example {
        Example::RepulsivePolynomial => config.epsilon + 6.0 * rho * rho,
        Example::NonRational => config.k as f64 / (rho * rho + 1.0).powf(1.5),
    })
}

/// Closed-form total flux `2 pi k` in units of `c hbar / e`.
pub fn total_flux(config: &ModelConfig) -> Result<f64> {
    match config.example {
        Example::NonRational => Ok(2.0 * PI * config.k as f64),
        Example::RepulsivePolynomial => Err(Error::Domain("the field grows like rho^2; total flux diverges".into())),
    }
}

/// Total flux `2 pi int_0^inf B rho d rho` by quadrature.
pub fn flux_by_quadrature(config: &ModelConfig) -> Result<f64> {
    total_flux(config)?;
    let cfg = *config;
    let integral = quad::integrate_to_infinity(
        |rho| magnetic_field(&cfg, rho).unwrap_or(0.0) * rho,
        0.0,
        16,
    );
    Ok(2.0 * PI * integral)
}

fn check_rho(rho: f64, strictly_positive: bool) -> Result<()> {
    if !rho.is_finite() || rho < 0.0 || (strictly_positive && rho == 0.0) {
        Err(Error::Domain(format!("rho = {rho} outside the domain")))
    } else {
        Ok(())
    }
}

/// `(m/rho - A)^2 + u`, the effective radial potential of angular channel `m`.
pub fn effective_potential(config: &ModelConfig, m: i64, rho: f64) -> Result<f64> {
    let kinetic = m as f64 / rho - vector_potential(config, rho)?;
    Ok(kinetic * kinetic + scalar_potential(config, rho)?)
}

/// Radial factor `R(rho)` of the bound state (the wavefunction at `phi = 0`).
pub fn radial_value(config: &ModelConfig, block: &BlockSpec, value: f64, poly: &PolynomialCoefficients, rho: f64) -> f64 {
    let l = block.l;
    match config.example {
        Example::RepulsivePolynomial => {
            let r2 = rho * rho;
            let envelope = (-(r2 * r2) / 8.0 - config.epsilon * r2 / 4.0).exp();
            envelope * rho.powi(l as i32) * poly.eval(0.5 * r2)
        }
        Example::NonRational => {
            let k = config.k;
            let t = t_of_rho(rho);
            let t1 = t_minus_one(rho);
            let t_power = match config.case {
                Case::First => (k - l) as f64 / 2.0,
                _ => (l - k) as f64 / 2.0,
            };
            let t1_power = (k + l) as f64 / 2.0;
            if t1_power != 0.0 && t1 == 0.0 {
                return 0.0;
            }
            // sqrt(2t - 1) = (rho^2 + 1)^{1/4}
            let mut log = 0.25 * (rho * rho + 1.0).ln() + t_power * t.ln() + 2.0 * value * t;
            if t1_power != 0.0 {
                log += t1_power * t1.ln();
            }
            log.exp() * poly.eval(t)
        }
    }
}

/// `psi(rho, phi)`, unnormalized with `p_0 = 1`.
pub fn wavefunction(config: &ModelConfig, block: &BlockSpec, root: &SpectralRoot, rho: f64, phi: f64) -> Result<Complex64> {
    check_rho(rho, false)?;
    let poly = root.coefficients()?;
    let radial = radial_value(config, block, root.value, poly, rho);
    let m = block.angular_number() as f64;
    Ok(Complex64::from_polar(1.0, m * phi) * radial)
}

/// Sampled radial profile on `samples` uniform points of `[0, rho_max]`.
pub fn radial_profile(
    config: &ModelConfig,
    block: &BlockSpec,
    root: &SpectralRoot,
    rho_max: f64,
    samples: usize,
) -> Result<RadialProfile> {
    if samples < 2 || rho_max.is_nan() || rho_max <= 0.0 {
        return Err(Error::InvalidParameter("need at least two samples on a positive range".into()));
    }
    let grid: Vec<f64> = (0..samples)
        .map(|i| rho_max * i as f64 / (samples - 1) as f64)
        .collect();
    let values = grid
        .iter()
        .map(|&rho| wavefunction(config, block, root, rho, 0.0))
        .collect::<Result<Vec<_>>>()?;
    let norm = radial_norm(config, block, root)?.total;
    Ok(RadialProfile { grid, values, norm })
}

/// Radius beyond which a bound state is negligible.
pub fn decay_radius(config: &ModelConfig, block: &BlockSpec, root: &SpectralRoot) -> f64 {
    match config.example {
        Example::RepulsivePolynomial => 20.0,
        Example::NonRational => {
            let spread = (block.n as i64 + config.k.abs() + block.l.abs() + 1) as f64;
            (36.0 + 8.0 * spread) / root.value.abs()
        }
    }
}

/// `int_0^inf |R|^2 rho d rho`, with the part beyond the decay radius reported separately.
pub fn radial_norm(config: &ModelConfig, block: &BlockSpec, root: &SpectralRoot) -> Result<RadialNorm> {
    let poly = root.coefficients()?;
    let f = |rho: f64| {
        let r = radial_value(config, block, root.value, poly, rho);
        r * r * rho
    };
    let decay = decay_radius(config, block, root);
    let inner = quad::integrate(f, 0.0, decay, panel_count(config, root, decay));
    let tail = quad::integrate_to_infinity(f, decay, 16);
    Ok(RadialNorm { total: inner + tail, tail, decay_radius: decay })
}

/// Normalized overlap `int R_i R_j rho d rho / (|R_i| |R_j|)` of two states of one block.
pub fn overlap(config: &ModelConfig, block: &BlockSpec, first: &SpectralRoot, second: &SpectralRoot) -> Result<f64> {
    let (p1, p2) = (first.coefficients()?, second.coefficients()?);
    let decay = decay_radius(config, block, first).max(decay_radius(config, block, second));
    let panels = panel_count(config, first, decay).max(panel_count(config, second, decay));
    let cross = quad::integrate(
        |rho| radial_value(config, block, first.value, p1, rho) * radial_value(config, block, second.value, p2, rho) * rho,
        0.0,
        decay,
        panels,
    );
    let n1 = radial_norm(config, block, first)?.total;
    let n2 = radial_norm(config, block, second)?.total;
    Ok(cross / (n1 * n2).sqrt())
}

fn panel_count(config: &ModelConfig, root: &SpectralRoot, decay: f64) -> usize {
    let width = match config.example {
        Example::RepulsivePolynomial => 0.25,
        Example::NonRational => (0.5 / root.value.abs()).min(0.5),
    };
    ((decay / width).ceil() as usize).clamp(8, 4000)
}

/// `max |L R - E R| / max |R|` over `grid`, with fourth-order central differences.
///
/// `grid` must be uniform with every point at least `5h` away from the origin.
pub fn schrodinger_residual(config: &ModelConfig, block: &BlockSpec, root: &SpectralRoot, grid: &[f64]) -> Result<f64> {
    schrodinger_residual_at_energy(config, block, root, root.energy, grid)
}

/// As [`schrodinger_residual`] but testing against an arbitrary energy.
pub fn schrodinger_residual_at_energy(
    config: &ModelConfig,
    block: &BlockSpec,
    root: &SpectralRoot,
    energy: f64,
    grid: &[f64],
) -> Result<f64> {
    if grid.len() < 2 {
        return Err(Error::InvalidParameter("residual grid needs two or more points".into()));
    }
    let h = grid[1] - grid[0];
    if h.is_nan() || h <= 0.0 {
        return Err(Error::InvalidParameter("residual grid must be increasing".into()));
    }
    if grid[0] < 5.0 * h {
        return Err(Error::Domain(format!(
            "grid starts at rho = {} < 5h = {}; too close to the coordinate singularity",
            grid[0],
            5.0 * h
        )));
    }
    let poly = root.coefficients()?;
    let m = block.angular_number();
    let r = |rho: f64| radial_value(config, block, root.value, poly, rho);
    let mut worst = 0.0_f64;
    let mut rmax = 0.0_f64;
    for &rho in grid {
        let (rm2, rm1, r0, rp1, rp2) = (r(rho - 2.0 * h), r(rho - h), r(rho), r(rho + h), r(rho + 2.0 * h));
        let d1 = (-rp2 + 8.0 * rp1 - 8.0 * rm1 + rm2) / (12.0 * h);
        let d2 = (-rp2 + 16.0 * rp1 - 30.0 * r0 + 16.0 * rm1 - rm2) / (12.0 * h * h);
        let v = effective_potential(config, m, rho)?;
        let lr = -d2 - d1 / rho + v * r0;
        worst = worst.max((lr - energy * r0).abs());
        rmax = rmax.max(r0.abs());
    }
    Ok(worst / rmax)
}

/// Uniform grid `[start, end]` with spacing `h`.
pub fn uniform_grid(start: f64, end: f64, h: f64) -> Vec<f64> {
    let count = ((end - start) / h).round() as usize + 1;
    (0..count).map(|i| start + i as f64 * h).collect()
}

/// Default residual grid covering where a state lives.
pub fn residual_grid(config: &ModelConfig, block: &BlockSpec, root: &SpectralRoot, h: f64) -> Vec<f64> {
    let end = match config.example {
        Example::RepulsivePolynomial => 4.5,
        Example::NonRational => (decay_radius(config, block, root) * 0.5).min(200.0),
    };
    uniform_grid(0.1, end, h)
}

/// Heun-equation residuals of a physical root at `points` values of the Heun argument.
pub fn ode_residuals(config: &ModelConfig, block: &BlockSpec, root: &SpectralRoot, points: &[f64]) -> Result<Vec<OdeResidual>> {
    let poly = root.coefficients()?;
    match block_heun(config, block)? {
        BlockHeun::Biconfluent(p) => {
            let params: HeunBParams = p.at(root.value)?;
            Ok(points.iter().map(|&z| crate::heun::heunb_ode_check(&params, poly, z)).collect())
        }
        BlockHeun::Confluent(p) => {
            let params: HeunCParams = p.at(root.value)?;
            Ok(points.iter().map(|&z| crate::heun::heunc_ode_check(&params, poly, z)).collect())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn blocks(case: Case, k: i64, n_max: usize) -> Vec<(usize, i64)> {
        let cfg = ModelConfig::new(case.example(), case, k, 0.5).unwrap();
        permissible_blocks(&cfg, n_max).unwrap().iter().map(|b| (b.n, b.l)).collect()
    }

    #[test]
    fn block_enumeration() {
        assert_eq!(blocks(Case::A, 1, 2), vec![(0, 0), (1, 1), (2, 2)]);
        assert_eq!(blocks(Case::A, 3, 3), vec![(2, 0), (3, 1)]);
        assert_eq!(blocks(Case::B, 4, 3), vec![(1, 1), (3, 0)]);
        assert_eq!(blocks(Case::Second, 2, 10), vec![(1, -2), (0, -1)]);
        assert_eq!(blocks(Case::First, -2, 2), vec![(1, 2), (1, 3), (1, 4)]);
        assert!(blocks(Case::B, 0, 5).is_empty());
        assert!(blocks(Case::First, 0, 5).is_empty());
    }

    #[test]
    fn sign_constraints() {
        assert!(ModelConfig::non_rational(Case::First, 1, 0.0).is_err());
        assert!(ModelConfig::non_rational(Case::Second, -1, 0.0).is_err());
        assert!(ModelConfig::repulsive(Case::B, -3, 0.0).is_err());
        assert!(ModelConfig::new(Example::RepulsivePolynomial, Case::First, -1, 0.0).is_err());
        assert!(ModelConfig::repulsive(Case::A, 1, f64::NAN).is_err());
        let cfg = ModelConfig::non_rational(Case::Second, 0, 1.0).unwrap();
        assert!(!cfg.diagnostics().is_empty());
    }

    #[test]
    fn block_validation() {
        let cfg = ModelConfig::repulsive(Case::A, 1, 0.0).unwrap();
        assert!(validate_block(&cfg, &BlockSpec { n: 1, l: 1, sigma: 1 }).is_ok());
        assert!(validate_block(&cfg, &BlockSpec { n: 1, l: 0, sigma: 1 }).is_err());
        assert!(validate_block(&cfg, &BlockSpec { n: 1, l: 1, sigma: -1 }).is_err());
        assert!(block_sequences(&cfg, &BlockSpec { n: 2, l: 1, sigma: 1 }).is_err());
        assert_eq!(block_for(&cfg, Some(2), None).unwrap(), BlockSpec { n: 2, l: 2, sigma: 1 });
        assert_eq!(block_for(&cfg, None, Some(2)).unwrap(), BlockSpec { n: 2, l: 2, sigma: 1 });
        assert!(block_for(&cfg, Some(2), Some(1)).is_err());
        let cfg = ModelConfig::repulsive(Case::B, 4, 0.0).unwrap();
        assert!(block_for(&cfg, Some(2), None).is_err());
        assert_eq!(block_for(&cfg, Some(1), None).unwrap(), BlockSpec { n: 1, l: 1, sigma: -1 });
        let cfg = ModelConfig::non_rational(Case::First, -2, 0.0).unwrap();
        assert_eq!(block_for(&cfg, None, Some(3)).unwrap(), BlockSpec { n: 1, l: 3, sigma: 1 });
        assert!(block_for(&cfg, None, Some(1)).is_err());
    }

    #[test]
    fn model_sequences_by_hand() {
        let eps = 0.7;
        let cfg = ModelConfig::repulsive(Case::A, 1, eps).unwrap();
        let s = block_sequences(&cfg, &BlockSpec { n: 0, l: 0, sigma: 1 }).unwrap();
        assert_eq!(s.a[0], SpectralPoly::linear(-eps, 1.0));

        let cfg = ModelConfig::non_rational(Case::First, -1, 15.0).unwrap();
        let s = block_sequences(&cfg, &BlockSpec { n: 0, l: 1, sigma: 1 }).unwrap();
        // (s - 1)^2 - 4
        assert_eq!(s.a[0], SpectralPoly::quadratic(-3.0, -2.0, 1.0));

        let eps = 2.0;
        let cfg = ModelConfig::non_rational(Case::Second, 1, eps).unwrap();
        let s = block_sequences(&cfg, &BlockSpec { n: 0, l: -1, sigma: -1 }).unwrap();
        assert_eq!(s.a[0], SpectralPoly::quadratic(0.25 * (3.0 - eps), -2.0, 1.0));
    }

    #[test]
    fn fields_and_potentials() {
        let cfg = ModelConfig::repulsive(Case::A, 1, 2.0).unwrap();
        assert_eq!(vector_potential(&cfg, 1.0).unwrap(), 2.5);
        let cfg0 = ModelConfig::repulsive(Case::A, 1, 0.0).unwrap();
        assert_eq!(vector_potential(&cfg0, 0.0).unwrap(), 0.0);
        assert_eq!(magnetic_field(&cfg0, 0.0).unwrap(), 0.0);
        let cfg = ModelConfig::repulsive(Case::A, 1, 1.0).unwrap();
        assert_eq!(scalar_potential(&cfg, 1.0).unwrap(), -5.0);
        assert_eq!(scalar_potential(&cfg, 0.0).unwrap(), 0.0);
        assert!(total_flux(&cfg).is_err());

        let cfg = ModelConfig::non_rational(Case::First, -1, 3.0).unwrap();
        assert!((vector_potential(&cfg, 1.0).unwrap() - 1.0 / 2f64.sqrt()).abs() < 1e-15);
        assert!(vector_potential(&cfg, 0.0).is_err());
        assert_eq!(scalar_potential(&cfg, 0.0).unwrap(), 0.0);
        let cfg = ModelConfig::non_rational(Case::Second, 3, 3.0).unwrap();
        assert_eq!(magnetic_field(&cfg, 0.0).unwrap(), 3.0);
        let cfg = ModelConfig::non_rational(Case::Second, 2, 3.0).unwrap();
        assert_eq!(total_flux(&cfg).unwrap(), 4.0 * PI);
        assert!((flux_by_quadrature(&cfg).unwrap() - 4.0 * PI).abs() < 1e-6);
    }

    #[test]
    fn t_map() {
        assert_eq!(t_of_rho(0.0), 1.0);
        assert!((t_of_rho(3f64.sqrt()) - 1.5).abs() < 1e-15);
        assert!((t_of_rho(1e8) / 0.5e8 - 1.0).abs() < 1e-7);
        assert!((t_minus_one(1e-5) / 0.25e-10 - 1.0).abs() < 1e-9);
    }

    #[test]
    fn ground_state_closed_form() {
        for eps in [-2.0, 0.0, 1.0, 3.5] {
            let cfg = ModelConfig::repulsive(Case::A, 1, eps).unwrap();
            let block = BlockSpec { n: 0, l: 0, sigma: 1 };
            let roots = spectrum(&cfg, &block).unwrap();
            assert_eq!(roots.len(), 1);
            assert!((roots[0].value - eps).abs() <= 1e-12 * eps.abs().max(1.0));
            let psi = wavefunction(&cfg, &block, &roots[0], 1.2, 0.3).unwrap();
            let expect = (-(1.2f64.powi(4)) / 8.0 - eps * 1.44 / 4.0).exp();
            assert!((psi.norm() - expect).abs() < 1e-14);
        }
    }

    #[test]
    fn non_rational_closed_form() {
        let cfg = ModelConfig::non_rational(Case::First, -1, 15.0).unwrap();
        let block = BlockSpec { n: 0, l: 1, sigma: 1 };
        let sol = solve_block(&cfg, &block, PrecisionPolicy::Auto).unwrap();
        assert_eq!(sol.total_roots(), 2);
        let values: Vec<f64> = sol.roots.iter().map(|r| r.value).collect();
        // energies -9 and -1
        assert!((values[0] - 3.0).abs() < 1e-12 && (values[1] + 1.0).abs() < 1e-12);
        let phys: Vec<_> = sol.physical().collect();
        assert_eq!(phys.len(), 1);
        assert!((phys[0].energy + 1.0).abs() < 1e-12);
        let psi0 = wavefunction(&cfg, &block, phys[0], 0.0, 0.0).unwrap();
        assert!((psi0.re - (-2.0f64).exp()).abs() < 1e-15);
    }

    #[test]
    fn large_blocks_escalate() {
        // n = 20 sits below the size cutoff, but its degree-42 determinant defeats f64 roots
        let cfg = ModelConfig::non_rational(Case::First, -21, 10.0).unwrap();
        let block = permissible_blocks(&cfg, 0).unwrap()[0];
        assert_eq!(block.n, 20);
        let sol = solve_block(&cfg, &block, PrecisionPolicy::Auto).unwrap();
        assert_eq!(sol.precision_bits, 128);
        assert_eq!(sol.total_roots(), 42);
        assert!(sol.root_quality <= RESIDUAL_TOL);
        assert!(solve_block(&cfg, &block, PrecisionPolicy::Fixed(53)).is_err());

        let cfg = ModelConfig::non_rational(Case::First, -22, 60.0).unwrap();
        let block = permissible_blocks(&cfg, 0).unwrap()[0];
        let auto = solve_block(&cfg, &block, PrecisionPolicy::Auto).unwrap();
        let wide = solve_block(&cfg, &block, PrecisionPolicy::Fixed(256)).unwrap();
        assert_eq!(auto.precision_bits, 128);
        assert_eq!(auto.roots.len(), wide.roots.len());
        for (x, y) in auto.roots.iter().zip(&wide.roots) {
            assert!((x.value - y.value).abs() <= 1e-12 * x.value.abs().max(1.0));
        }
    }

    #[test]
    fn unphysical_root_has_no_wavefunction() {
        let cfg = ModelConfig::non_rational(Case::First, -1, 15.0).unwrap();
        let block = BlockSpec { n: 0, l: 1, sigma: 1 };
        let roots = spectrum(&cfg, &block).unwrap();
        let bad = roots.iter().find(|r| !r.physical).unwrap();
        assert!(matches!(wavefunction(&cfg, &block, bad, 1.0, 0.0), Err(Error::NotPhysical(_))));
    }

    #[test]
    fn residual_grid_guard() {
        let cfg = ModelConfig::repulsive(Case::A, 1, 1.0).unwrap();
        let block = BlockSpec { n: 0, l: 0, sigma: 1 };
        let root = spectrum(&cfg, &block).unwrap().remove(0);
        let grid = uniform_grid(0.004, 1.0, 1e-3);
        assert!(schrodinger_residual(&cfg, &block, &root, &grid).is_err());
        let grid = uniform_grid(0.1, 3.0, 1e-3);
        assert!(schrodinger_residual(&cfg, &block, &root, &grid).unwrap() < 1e-6);
    }
}
