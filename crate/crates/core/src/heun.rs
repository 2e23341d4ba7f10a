//! Biconfluent and Confluent Heun polynomial machinery.
//!
//! Both equations admit a regular series solution `sum p_j z^j` whose
//! coefficients obey a three-term recurrence
//!
//! ```text
//! c_{j-1} p_{j-1} + a_j p_j + b_j p_{j+1} = 0,   p_{-1} = 0, p_0 = 1.
//! ```
//!
//! The series truncates to a degree-`n` polynomial exactly when the degree
//! condition holds (which forces `c_n = 0`) and the `(n+1) x (n+1)` tridiagonal
//! matrix built from `a`, `b`, `c` is singular.
//!
//! Sequence entries are stored as polynomials of degree at most two in a
//! spectral parameter `s`, so that model layers can leave the energy-like
//! parameter symbolic and the determinant can be formed as a polynomial.

use std::ops::{Add, Mul, Neg, Sub};

use crate::error::{Error, Result};
use crate::precision::Real;

/// Absolute tolerance used to recognise integers in degree conditions.
pub const INTEGER_TOL: f64 = 1e-9;

/// A polynomial `c0 + c1 s + c2 s^2` in the spectral parameter.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SpectralPoly(pub [f64; 3]);

impl SpectralPoly {
    pub const ZERO: SpectralPoly = SpectralPoly([0.0; 3]);
    /// The spectral parameter itself.
    pub const S: SpectralPoly = SpectralPoly([0.0, 1.0, 0.0]);

    pub const fn constant(c: f64) -> Self {
        SpectralPoly([c, 0.0, 0.0])
    }

    pub const fn linear(c0: f64, c1: f64) -> Self {
        SpectralPoly([c0, c1, 0.0])
    }

    pub const fn quadratic(c0: f64, c1: f64, c2: f64) -> Self {
        SpectralPoly([c0, c1, c2])
    }

    pub fn coeffs(&self) -> [f64; 3] {
        self.0
    }

    pub fn degree(&self) -> usize {
        match self.0 {
            [_, _, c2] if c2 != 0.0 => 2,
            [_, c1, _] if c1 != 0.0 => 1,
            _ => 0,
        }
    }

    pub fn is_constant(&self) -> bool {
        self.degree() == 0
    }

    pub fn scale(self, k: f64) -> Self {
        SpectralPoly(self.0.map(|c| c * k))
    }

    pub fn eval(&self, s: f64) -> f64 {
        (self.0[2] * s + self.0[1]) * s + self.0[0]
    }

    /// Evaluates in the working precision of `T`.
    pub fn eval_in<T: Real>(&self, s: &T, bits: u32) -> T {
        let [c0, c1, c2] = self.0;
        let c0 = T::from_f64(c0, bits);
        if c1 == 0.0 && c2 == 0.0 {
            return c0;
        }
        let c1 = T::from_f64(c1, bits);
        let c2 = T::from_f64(c2, bits);
        (c2 * s.clone() + c1) * s.clone() + c0
    }

    /// Derivative with respect to `s`, evaluated in `T`.
    pub fn derivative_in<T: Real>(&self, s: &T, bits: u32) -> T {
        let c1 = T::from_f64(self.0[1], bits);
        let two_c2 = T::from_f64(2.0 * self.0[2], bits);
        two_c2 * s.clone() + c1
    }

    /// Largest coefficient magnitude, used to scale identity comparisons.
    pub fn magnitude(&self) -> f64 {
        self.0.iter().fold(0.0_f64, |m, c| m.max(c.abs()))
    }

    /// Relative distance between two polynomials, coefficientwise.
    pub fn relative_distance(&self, other: &SpectralPoly) -> f64 {
        let scale = self.magnitude().max(other.magnitude()).max(1.0);
        self.0
            .iter()
            .zip(other.0.iter())
            .fold(0.0_f64, |m, (x, y)| m.max((x - y).abs()))
            / scale
    }
}

impl Add for SpectralPoly {
    type Output = SpectralPoly;
    fn add(self, rhs: SpectralPoly) -> SpectralPoly {
        SpectralPoly([self.0[0] + rhs.0[0], self.0[1] + rhs.0[1], self.0[2] + rhs.0[2]])
    }
}

impl Sub for SpectralPoly {
    type Output = SpectralPoly;
    fn sub(self, rhs: SpectralPoly) -> SpectralPoly {
        self + (-rhs)
    }
}

impl Neg for SpectralPoly {
    type Output = SpectralPoly;
    fn neg(self) -> SpectralPoly {
        self.scale(-1.0)
    }
}

impl Add<f64> for SpectralPoly {
    type Output = SpectralPoly;
    fn add(self, rhs: f64) -> SpectralPoly {
        self + SpectralPoly::constant(rhs)
    }
}

impl Mul<f64> for SpectralPoly {
    type Output = SpectralPoly;
    fn mul(self, rhs: f64) -> SpectralPoly {
        self.scale(rhs)
    }
}

impl Mul for SpectralPoly {
    type Output = SpectralPoly;
    /// Product, which must stay within degree two.
    fn mul(self, rhs: SpectralPoly) -> SpectralPoly {
        let mut out = [0.0; 5];
        for (i, x) in self.0.iter().enumerate() {
            for (j, y) in rhs.0.iter().enumerate() {
                out[i + j] += x * y;
            }
        }
        assert!(
            out[3] == 0.0 && out[4] == 0.0,
            "spectral polynomial product exceeds degree 2"
        );
        SpectralPoly([out[0], out[1], out[2]])
    }
}

impl From<f64> for SpectralPoly {
    fn from(c: f64) -> Self {
        SpectralPoly::constant(c)
    }
}

/// Parameters of the Biconfluent Heun equation
/// `y'' + (-2z - beta + (1+alpha)/z) y' + (gamma - alpha - 2 - ((1+alpha) beta + delta)/(2z)) y = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HeunBParams {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub delta: f64,
}

impl HeunBParams {
    pub fn new(alpha: f64, beta: f64, gamma: f64, delta: f64) -> Result<Self> {
        let p = HeunBParams { alpha, beta, gamma, delta };
        if [alpha, beta, gamma, delta].iter().all(|x| x.is_finite()) {
            Ok(p)
        } else {
            Err(Error::InvalidParameter(format!("non-finite HeunB parameters {p:?}")))
        }
    }
}

/// Parameters of the Confluent Heun equation
/// `y'' + (alpha + (beta+1)/z + (gamma+1)/(z-1)) y' + (mu/z + nu/(z-1)) y = 0`.
///
/// `mu` and `nu` are derived from the five primaries and recomputed on
/// construction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HeunCParams {
    alpha: f64,
    beta: f64,
    gamma: f64,
    delta: f64,
    eta: f64,
    mu: f64,
    nu: f64,
}

impl HeunCParams {
    pub fn new(alpha: f64, beta: f64, gamma: f64, delta: f64, eta: f64) -> Result<Self> {
        if ![alpha, beta, gamma, delta, eta].iter().all(|x| x.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "non-finite HeunC parameters ({alpha}, {beta}, {gamma}, {delta}, {eta})"
            )));
        }
        let mu = 0.5 * (alpha - beta - gamma + alpha * beta - gamma * beta) - eta;
        let nu = 0.5 * (alpha + beta + gamma + gamma * alpha + gamma * beta) + delta + eta;
        Ok(HeunCParams { alpha, beta, gamma, delta, eta, mu, nu })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }
    pub fn beta(&self) -> f64 {
        self.beta
    }
    pub fn gamma(&self) -> f64 {
        self.gamma
    }
    pub fn delta(&self) -> f64 {
        self.delta
    }
    pub fn eta(&self) -> f64 {
        self.eta
    }
    pub fn mu(&self) -> f64 {
        self.mu
    }
    pub fn nu(&self) -> f64 {
        self.nu
    }
}

/// Biconfluent parameters with entries possibly depending on the spectral parameter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralHeunB {
    pub alpha: SpectralPoly,
    pub beta: SpectralPoly,
    pub gamma: SpectralPoly,
    pub delta: SpectralPoly,
}

impl SpectralHeunB {
    pub fn at(&self, s: f64) -> Result<HeunBParams> {
        HeunBParams::new(self.alpha.eval(s), self.beta.eval(s), self.gamma.eval(s), self.delta.eval(s))
    }
}

impl From<HeunBParams> for SpectralHeunB {
    fn from(p: HeunBParams) -> Self {
        SpectralHeunB {
            alpha: p.alpha.into(),
            beta: p.beta.into(),
            gamma: p.gamma.into(),
            delta: p.delta.into(),
        }
    }
}

/// Confluent parameters with entries possibly depending on the spectral parameter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralHeunC {
    pub alpha: SpectralPoly,
    pub beta: SpectralPoly,
    pub gamma: SpectralPoly,
    pub delta: SpectralPoly,
    pub eta: SpectralPoly,
}

impl SpectralHeunC {
    pub fn mu(&self) -> SpectralPoly {
        let (a, b, g) = (self.alpha, self.beta, self.gamma);
        (a - b - g + a * b - g * b) * 0.5 - self.eta
    }

    pub fn at(&self, s: f64) -> Result<HeunCParams> {
        HeunCParams::new(
            self.alpha.eval(s),
            self.beta.eval(s),
            self.gamma.eval(s),
            self.delta.eval(s),
            self.eta.eval(s),
        )
    }
}

impl From<HeunCParams> for SpectralHeunC {
    fn from(p: HeunCParams) -> Self {
        SpectralHeunC {
            alpha: p.alpha.into(),
            beta: p.beta.into(),
            gamma: p.gamma.into(),
            delta: p.delta.into(),
            eta: p.eta.into(),
        }
    }
}

/// The three diagonals of `A_{n+1}`: `a` on the diagonal, `b` above, `c` below.
#[derive(Debug, Clone, PartialEq)]
pub struct TridiagonalSequences {
    pub a: Vec<SpectralPoly>,
    pub b: Vec<SpectralPoly>,
    pub c: Vec<SpectralPoly>,
}

impl TridiagonalSequences {
    pub fn new(a: Vec<SpectralPoly>, b: Vec<SpectralPoly>, c: Vec<SpectralPoly>) -> Result<Self> {
        if a.is_empty() || b.len() + 1 != a.len() || c.len() + 1 != a.len() {
            return Err(Error::InvalidParameter(format!(
                "sequence lengths a={}, b={}, c={} do not describe a square tridiagonal matrix",
                a.len(),
                b.len(),
                c.len()
            )));
        }
        Ok(TridiagonalSequences { a, b, c })
    }

    /// Matrix dimension `n + 1`.
    pub fn size(&self) -> usize {
        self.a.len()
    }

    /// Polynomial degree `n` of the associated solution.
    pub fn degree(&self) -> usize {
        self.a.len() - 1
    }

    /// Substitutes `s` in the working precision of `T`.
    pub fn at<T: Real>(&self, s: &T, bits: u32) -> NumericSequences<T> {
        NumericSequences {
            a: self.a.iter().map(|p| p.eval_in(s, bits)).collect(),
            b: self.b.iter().map(|p| p.eval_in(s, bits)).collect(),
            c: self.c.iter().map(|p| p.eval_in(s, bits)).collect(),
            bits,
        }
    }

    pub fn at_f64(&self, s: f64) -> NumericSequences<f64> {
        self.at(&s, crate::precision::DOUBLE_BITS)
    }

    /// Largest relative coefficient mismatch against another set of sequences.
    pub fn max_relative_distance(&self, other: &TridiagonalSequences) -> f64 {
        if self.size() != other.size() {
            return f64::INFINITY;
        }
        let pairs = self
            .a
            .iter()
            .zip(&other.a)
            .chain(self.b.iter().zip(&other.b))
            .chain(self.c.iter().zip(&other.c));
        pairs.fold(0.0_f64, |m, (x, y)| m.max(x.relative_distance(y)))
    }

    /// Dense `(n+1) x (n+1)` matrix at a fixed `s`, row-major.
    pub fn dense_at(&self, s: f64) -> Vec<Vec<f64>> {
        let size = self.size();
        let mut m = vec![vec![0.0; size]; size];
        for j in 0..size {
            m[j][j] = self.a[j].eval(s);
            if j + 1 < size {
                m[j][j + 1] = self.b[j].eval(s);
                m[j + 1][j] = self.c[j].eval(s);
            }
        }
        m
    }
}

/// Sequences with the spectral parameter substituted.
#[derive(Debug, Clone, PartialEq)]
pub struct NumericSequences<T> {
    pub a: Vec<T>,
    pub b: Vec<T>,
    pub c: Vec<T>,
    pub bits: u32,
}

/// Coefficients `p_0..p_n` of a polynomial solution, with `p_0 = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct PolynomialCoefficients<T = f64> {
    pub coeffs: Vec<T>,
    /// Relative violation of the last recurrence relation.
    pub terminal_residual: f64,
}

impl<T: Real> PolynomialCoefficients<T> {
    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn to_f64(&self) -> PolynomialCoefficients<f64> {
        PolynomialCoefficients {
            coeffs: self.coeffs.iter().map(Real::to_f64).collect(),
            terminal_residual: self.terminal_residual,
        }
    }
}

impl PolynomialCoefficients<f64> {
    /// Value, first and second derivative at `z` (Horner).
    pub fn eval_with_derivatives(&self, z: f64) -> (f64, f64, f64) {
        let mut y = 0.0;
        let mut dy = 0.0;
        let mut d2y = 0.0;
        for &p in self.coeffs.iter().rev() {
            d2y = d2y * z + 2.0 * dy;
            dy = dy * z + y;
            y = y * z + p;
        }
        (y, dy, d2y)
    }

    pub fn eval(&self, z: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &p| acc * z + p)
    }

    /// Same as [`eval_with_derivatives`](Self::eval_with_derivatives) with
    /// `|p_j|` and `|z|`, bounding the magnitude of every monomial term.
    fn abs_eval_with_derivatives(&self, z: f64) -> (f64, f64, f64) {
        let abs = PolynomialCoefficients {
            coeffs: self.coeffs.iter().map(|p| p.abs()).collect(),
            terminal_residual: 0.0,
        };
        abs.eval_with_derivatives(z.abs())
    }

    /// Replaces one coefficient.
    pub fn with_coeff(mut self, j: usize, value: f64) -> Self {
        self.coeffs[j] = value;
        self
    }
}

/// Degree `n` with `gamma - alpha = 2(n+1)`, if any.
pub fn heunb_degree(params: &HeunBParams) -> Option<usize> {
    let n = (params.gamma - params.alpha) / 2.0 - 1.0;
    nonnegative_integer(n)
}

/// Degree `n` with `delta = -(n + 1 + (beta+gamma)/2) alpha`, if any.
///
/// Errors when `alpha = 0`, where the condition carries no information on `n`.
pub fn heunc_degree(params: &HeunCParams) -> Result<Option<usize>> {
    if params.alpha == 0.0 {
        return Err(Error::InvalidParameter(
            "HeunC degree condition degenerates for alpha = 0".into(),
        ));
    }
    let n = -params.delta / params.alpha - 1.0 - 0.5 * (params.beta + params.gamma);
    Ok(nonnegative_integer(n))
}

fn nonnegative_integer(x: f64) -> Option<usize> {
    let r = x.round();
    if x.is_finite() && r >= 0.0 && (x - r).abs() <= INTEGER_TOL {
        Some(r as usize)
    } else {
        None
    }
}

/// Biconfluent recurrence sequences for a degree-`n` polynomial:
/// `a_j = -(delta + beta(2j + alpha + 1))`, `b_j = 2(j(j + alpha + 2) + alpha + 1)`,
/// `c_j = 2(gamma - alpha - 2j - 2)`.
pub fn heunb_sequences(params: &HeunBParams, n: usize) -> TridiagonalSequences {
    heunb_sequences_spectral(&SpectralHeunB::from(*params), n)
}

pub fn heunb_sequences_spectral(p: &SpectralHeunB, n: usize) -> TridiagonalSequences {
    let a = (0..=n)
        .map(|j| {
            let j = j as f64;
            -(p.delta + p.beta * (p.alpha + (2.0 * j + 1.0)))
        })
        .collect();
    let b = (0..n)
        .map(|j| {
            let j = j as f64;
            (p.alpha * (j + 1.0) * 2.0) + 2.0 * (j * (j + 2.0) + 1.0)
        })
        .collect();
    let c = (0..n)
        .map(|j| {
            let j = j as f64;
            (p.gamma - p.alpha + (-2.0 * j - 2.0)) * 2.0
        })
        .collect();
    TridiagonalSequences { a, b, c }
}

/// Confluent recurrence sequences for a degree-`n` polynomial:
/// `a_j = mu - j(j - alpha + beta + gamma + 1)`, `b_j = (j+1)(j + beta + 1)`,
/// `c_j = (n - j) alpha`.
pub fn heunc_sequences(params: &HeunCParams, n: usize) -> TridiagonalSequences {
    heunc_sequences_spectral(&SpectralHeunC::from(*params), n)
}

pub fn heunc_sequences_spectral(p: &SpectralHeunC, n: usize) -> TridiagonalSequences {
    let mu = p.mu();
    let a = (0..=n)
        .map(|j| {
            let j = j as f64;
            mu - (p.beta + p.gamma - p.alpha + (j + 1.0)) * j
        })
        .collect();
    let b = (0..n)
        .map(|j| {
            let j = j as f64;
            (p.beta + (j + 1.0)) * (j + 1.0)
        })
        .collect();
    let c = (0..n).map(|j| p.alpha * (n - j) as f64).collect();
    TridiagonalSequences { a, b, c }
}

/// Runs the coefficient recurrence forward from `p_{-1} = 0`, `p_0 = 1`.
///
/// The terminal residual is
/// `|c_{n-1} p_{n-1} + a_n p_n| / (max_j |p_j| * max(|a_n|, |c_{n-1}|, 1))`.
pub fn polynomial_from_recurrence<T: Real>(
    seqs: &NumericSequences<T>,
) -> Result<PolynomialCoefficients<T>> {
    let n = seqs.a.len() - 1;
    let bits = seqs.bits;
    let zero = T::from_f64(0.0, bits);
    let mut p: Vec<T> = Vec::with_capacity(n + 1);
    p.push(T::from_f64(1.0, bits));
    for j in 0..n {
        if seqs.b[j].is_zero() {
            return Err(Error::RecurrenceBreakdown { index: j });
        }
        let prev = if j == 0 {
            zero.clone()
        } else {
            seqs.c[j - 1].clone() * p[j - 1].clone()
        };
        let next = -(prev + seqs.a[j].clone() * p[j].clone()) / seqs.b[j].clone();
        p.push(next);
    }

    let last = if n == 0 {
        seqs.a[0].clone() * p[0].clone()
    } else {
        seqs.c[n - 1].clone() * p[n - 1].clone() + seqs.a[n].clone() * p[n].clone()
    };
    let pmax = p.iter().map(|x| x.abs().to_f64()).fold(0.0_f64, f64::max);
    let mut scale = seqs.a[n].abs().to_f64().max(1.0);
    if n > 0 {
        scale = scale.max(seqs.c[n - 1].abs().to_f64());
    }
    let terminal_residual = last.abs().to_f64() / (pmax * scale);
    Ok(PolynomialCoefficients { coeffs: p, terminal_residual })
}

/// An ODE residual together with the magnitude of the terms that cancel in it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OdeResidual {
    pub value: f64,
    pub scale: f64,
}

impl OdeResidual {
    pub fn relative(&self) -> f64 {
        if self.scale == 0.0 {
            self.value
        } else {
            self.value / self.scale
        }
    }
}

/// `|y'' + (-2z - beta + (1+alpha)/z) y' + (gamma - alpha - 2 - ((1+alpha)beta + delta)/(2z)) y|`
/// for `y = P_n`.
pub fn heunb_ode_residual(params: &HeunBParams, poly: &PolynomialCoefficients, z: f64) -> f64 {
    heunb_ode_check(params, poly, z).value
}

/// Residual of the Biconfluent equation with its local term scale.
pub fn heunb_ode_check(params: &HeunBParams, poly: &PolynomialCoefficients, z: f64) -> OdeResidual {
    let HeunBParams { alpha, beta, gamma, delta } = *params;
    let (y, dy, d2y) = poly.eval_with_derivatives(z);
    let p1 = -2.0 * z - beta + (1.0 + alpha) / z;
    let q = gamma - alpha - 2.0 - ((1.0 + alpha) * beta + delta) / (2.0 * z);
    let value = (d2y + p1 * dy + q * y).abs();

    let (ya, dya, d2ya) = poly.abs_eval_with_derivatives(z);
    let p1a = 2.0 * z.abs() + beta.abs() + (1.0 + alpha.abs()) / z.abs();
    let qa = gamma.abs() + alpha.abs() + 2.0 + ((1.0 + alpha).abs() * beta.abs() + delta.abs()) / (2.0 * z.abs());
    OdeResidual { value, scale: d2ya + p1a * dya + qa * ya }
}

/// `|y'' + (alpha + (beta+1)/z + (gamma+1)/(z-1)) y' + (mu/z + nu/(z-1)) y|` for `y = P_n`.
pub fn heunc_ode_residual(params: &HeunCParams, poly: &PolynomialCoefficients, z: f64) -> f64 {
    heunc_ode_check(params, poly, z).value
}

/// Residual of the Confluent equation with its local term scale.
pub fn heunc_ode_check(params: &HeunCParams, poly: &PolynomialCoefficients, z: f64) -> OdeResidual {
    let (y, dy, d2y) = poly.eval_with_derivatives(z);
    let zm1 = z - 1.0;
    let p1 = params.alpha + (params.beta + 1.0) / z + (params.gamma + 1.0) / zm1;
    let q = params.mu / z + params.nu / zm1;
    let value = (d2y + p1 * dy + q * y).abs();

    let (ya, dya, d2ya) = poly.abs_eval_with_derivatives(z);
    // mu and nu vanish together for constant solutions, so their scale is
    // taken from the parameters they are built from.
    let (a, b, g) = (params.alpha.abs(), params.beta.abs(), params.gamma.abs());
    let mu_a = 0.5 * (a + b + g + a * b + g * b) + params.eta.abs();
    let nu_a = 0.5 * (a + b + g + g * a + g * b) + params.delta.abs() + params.eta.abs();
    let p1a = a + (b + 1.0) / z.abs() + (g + 1.0) / zm1.abs();
    let qa = mu_a / z.abs() + nu_a / zm1.abs();
    OdeResidual { value, scale: d2ya + p1a * dya + qa * ya }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn b(alpha: f64, beta: f64, gamma: f64, delta: f64) -> HeunBParams {
        HeunBParams::new(alpha, beta, gamma, delta).unwrap()
    }

    #[test]
    fn heunb_degree_cases() {
        assert_eq!(heunb_degree(&b(1.0, 0.5, 5.0, 0.3)), Some(1));
        assert_eq!(heunb_degree(&b(0.0, 0.0, 2.0, -7.0)), Some(0));
        assert_eq!(heunb_degree(&b(1.0, 0.0, 4.0, 0.0)), None);
        // below zero
        assert_eq!(heunb_degree(&b(3.0, 0.0, 4.0, 0.0)), None);
        // within tolerance
        assert_eq!(heunb_degree(&b(1.0, 0.0, 5.0 + 1e-11, 0.0)), Some(1));
    }

    #[test]
    fn heunc_degree_cases() {
        let chi = -1.0;
        let p = HeunCParams::new(4.0 * chi, -2.0, 0.0, 0.0, 0.7).unwrap();
        assert_eq!(heunc_degree(&p).unwrap(), Some(0));
        let p = HeunCParams::new(2.0, 0.0, 0.0, -4.0, 0.0).unwrap();
        assert_eq!(heunc_degree(&p).unwrap(), Some(1));
        let p = HeunCParams::new(0.0, 1.0, 1.0, 0.0, 0.0).unwrap();
        assert!(heunc_degree(&p).is_err());
        let p = HeunCParams::new(2.0, 0.0, 0.0, -4.5, 0.0).unwrap();
        assert_eq!(heunc_degree(&p).unwrap(), None);
    }

    #[test]
    fn non_finite_rejected() {
        assert!(HeunBParams::new(f64::NAN, 0.0, 0.0, 0.0).is_err());
        assert!(HeunCParams::new(0.0, f64::INFINITY, 0.0, 0.0, 0.0).is_err());
    }

    #[test]
    fn mu_nu_recomputed() {
        let p = HeunCParams::new(4.0, 0.0, 0.0, -8.0, 0.0).unwrap();
        assert_eq!(p.mu(), 2.0);
        assert_eq!(p.nu(), 2.0 - 8.0);
        let p = HeunCParams::new(1.5, -0.5, 2.0, 0.25, 0.75).unwrap();
        let mu = 0.5 * (1.5 + 0.5 - 2.0 + 1.5 * -0.5 - 2.0 * -0.5) - 0.75;
        let nu = 0.5 * (1.5 - 0.5 + 2.0 + 2.0 * 1.5 + 2.0 * -0.5) + 0.25 + 0.75;
        assert_eq!(p.mu(), mu);
        assert_eq!(p.nu(), nu);
    }

    #[test]
    fn heunb_sequences_by_hand() {
        let s = heunb_sequences(&b(1.0, 0.0, 6.0, 0.0), 1);
        assert_eq!(s.a, vec![SpectralPoly::constant(0.0); 2]);
        assert_eq!(s.b[0].eval(0.0), 2.0 * (0.0 + 1.0 + 1.0));
        assert_eq!(s.c[0].eval(0.0), 6.0);

        let s = heunb_sequences(&b(0.0, 1.0, 2.0, 0.0), 0);
        assert_eq!(s.a[0].eval(0.0), -1.0);
        assert!(s.b.is_empty() && s.c.is_empty());
    }

    #[test]
    fn heunc_sequences_by_hand() {
        let p = HeunCParams::new(4.0, 0.0, 0.0, -8.0, 0.0).unwrap();
        assert_eq!(p.mu(), 2.0);
        let s = heunc_sequences(&p, 1);
        assert_eq!(s.a[0].eval(0.0), 2.0);
        assert_eq!(s.a[1].eval(0.0), 2.0 - (1.0 - 4.0 + 1.0));
        assert_eq!(s.b[0].eval(0.0), 1.0);
        assert_eq!(s.c[0].eval(0.0), 4.0);
    }

    #[test]
    fn termination_when_degree_condition_holds() {
        // c_n = 2(gamma - alpha - 2n - 2) vanishes exactly
        let p = b(2.0, 0.3, 2.0 + 2.0 * 4.0, 1.1);
        let n = heunb_degree(&p).unwrap();
        let s = heunb_sequences(&p, n + 1);
        assert_eq!(s.c[n].eval(0.0), 0.0);
    }

    #[test]
    fn recurrence_two_by_two() {
        let seqs = NumericSequences { a: vec![-2.0, 5.0], b: vec![4.0], c: vec![3.0], bits: 53 };
        let p = polynomial_from_recurrence(&seqs).unwrap();
        assert_eq!(p.coeffs, vec![1.0, 0.5]);
        // RB(1) = c_0 p_0 + a_1 p_1 = 3 + 2.5
        let expected = 5.5 / (1.0 * 5.0);
        assert!((p.terminal_residual - expected).abs() < 1e-15);
    }

    #[test]
    fn recurrence_single_relation() {
        let seqs = NumericSequences { a: vec![-3.0], b: vec![], c: vec![], bits: 53 };
        let p = polynomial_from_recurrence(&seqs).unwrap();
        assert_eq!(p.coeffs, vec![1.0]);
        assert_eq!(p.terminal_residual, 1.0);
        let seqs = NumericSequences { a: vec![0.0], b: vec![], c: vec![], bits: 53 };
        assert_eq!(polynomial_from_recurrence(&seqs).unwrap().terminal_residual, 0.0);
    }

    #[test]
    fn recurrence_breakdown() {
        let seqs = NumericSequences { a: vec![1.0, 1.0, 1.0], b: vec![1.0, 0.0], c: vec![1.0, 1.0], bits: 53 };
        assert_eq!(
            polynomial_from_recurrence(&seqs),
            Err(Error::RecurrenceBreakdown { index: 1 })
        );
    }

    #[test]
    fn constant_solution_residuals_vanish() {
        let one = PolynomialCoefficients { coeffs: vec![1.0], terminal_residual: 0.0 };
        // gamma - alpha - 2 = 0 and (1+alpha) beta + delta = 0
        let p = b(1.0, 0.5, 3.0, -1.0);
        for z in [0.3, 1.0, 4.0, -2.0] {
            assert_eq!(heunb_ode_residual(&p, &one, z), 0.0);
        }
        // mu = nu = 0
        let alpha = 2.0;
        let (beta, gamma) = (0.0, 0.0);
        let eta = 0.5 * alpha;
        let delta = -(0.5 * alpha) - eta;
        let c = HeunCParams::new(alpha, beta, gamma, delta, eta).unwrap();
        assert_eq!(c.mu(), 0.0);
        assert_eq!(c.nu(), 0.0);
        for z in [0.5, 2.0, 7.0] {
            assert_eq!(heunc_ode_residual(&c, &one, z), 0.0);
        }
    }

    #[test]
    fn biconfluent_linear_solution() {
        // degree 1: gamma - alpha = 4; choose delta so that det(A_2) = 0
        let (alpha, beta, gamma) = (1.0, 0.0, 5.0);
        // a_j = -delta; b_0 = 2(alpha + 1) = 4; c_0 = 2(gamma - alpha - 2) = 4
        // det = delta^2 - 16  => delta = 4
        let p = b(alpha, beta, gamma, 4.0);
        let seqs = heunb_sequences(&p, 1).at_f64(0.0);
        let poly = polynomial_from_recurrence(&seqs).unwrap();
        assert_eq!(poly.coeffs, vec![1.0, 1.0]);
        assert!(poly.terminal_residual < 1e-15);
        for z in [0.5, 1.0, 2.0] {
            assert!(heunb_ode_check(&p, &poly, z).relative() < 1e-14);
        }
        let bad = poly.clone().with_coeff(1, 1.01);
        let r = heunb_ode_check(&p, &bad, 0.5);
        assert!(r.relative() > 1e-4, "{r:?}");
    }

    #[test]
    fn spectral_poly_arithmetic() {
        let s = SpectralPoly::S;
        let p = (s + 1.0) * (s + (-1.0));
        assert_eq!(p, SpectralPoly::quadratic(-1.0, 0.0, 1.0));
        assert_eq!(p.degree(), 2);
        assert_eq!(p.eval(3.0), 8.0);
        assert_eq!(p.derivative_in(&3.0, 53), 6.0);
        assert!((s * 2.0).relative_distance(&SpectralPoly::linear(0.0, 2.0)) == 0.0);
    }

    #[test]
    #[should_panic]
    fn spectral_poly_degree_cap() {
        let q = SpectralPoly::S * SpectralPoly::S;
        let _ = q * SpectralPoly::S;
    }
}
