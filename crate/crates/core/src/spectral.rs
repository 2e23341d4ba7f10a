//! Tridiagonal determinant quantization.
//!
//! `det(A_{n+1})` is built as a polynomial in the spectral parameter through
//! the continuant recurrence `D_j = a_j D_{j-1} - b_{j-1} c_{j-1} D_{j-2}`,
//! its roots come from a balanced companion matrix and are then polished by
//! Newton iteration on the recurrence-evaluated determinant.

use nalgebra::{linalg::balancing, DMatrix, Schur};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::heun::{polynomial_from_recurrence, PolynomialCoefficients, TridiagonalSequences};
use crate::precision::{Extended, Real, DOUBLE_BITS};
use crate::tridiag::SymTridiagonal;

/// Relative distance under which two roots count as one (near-)multiple root.
pub const CLUSTER_TOL: f64 = 1e-7;
/// Terminal residual above which a null vector is rejected outright.
pub const NULL_VECTOR_TOL: f64 = 1e-8;

/// `det(A_{n+1})` as a polynomial, lowest degree first.
#[derive(Debug, Clone, PartialEq)]
pub struct DeterminantPolynomial {
    pub coeffs: Vec<f64>,
}

impl DeterminantPolynomial {
    /// Index of the highest nonzero coefficient.
    pub fn degree(&self) -> usize {
        self.coeffs.iter().rposition(|&c| c != 0.0).unwrap_or(0)
    }

    /// Compensated Horner: as accurate as Horner in doubled precision.
    pub fn eval(&self, s: f64) -> f64 {
        let mut value = 0.0;
        let mut correction = 0.0;
        for &c in self.coeffs.iter().rev() {
            let product = value * s;
            let product_err = value.mul_add(s, -product);
            let sum = product + c;
            let bb = sum - product;
            let sum_err = (product - (sum - bb)) + (c - bb);
            value = sum;
            correction = correction * s + (product_err + sum_err);
        }
        value + correction
    }

    pub fn eval_complex(&self, s: Complex64) -> Complex64 {
        self.coeffs
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * s + c)
    }

    /// `sum |c_i| |s|^i`, the natural scale for a computed value at `s`.
    pub fn abs_scale(&self, s: Complex64) -> f64 {
        let r = s.norm();
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * r + c.abs())
    }

    fn eval_with_derivative(&self, s: Complex64) -> (Complex64, Complex64) {
        let mut p = Complex64::new(0.0, 0.0);
        let mut dp = Complex64::new(0.0, 0.0);
        for &c in self.coeffs.iter().rev() {
            dp = dp * s + p;
            p = p * s + c;
        }
        (p, dp)
    }
}

/// All roots of a determinant polynomial with multiplicity information.
#[derive(Debug, Clone, PartialEq)]
pub struct RootSet {
    pub roots: Vec<Complex64>,
    /// Size of the cluster each root belongs to (1 for simple roots).
    pub multiplicity: Vec<usize>,
    /// Backward error `|det(r)| / sum |c_i||r|^i` per root.
    pub residuals: Vec<f64>,
}

impl RootSet {
    pub fn len(&self) -> usize {
        self.roots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.roots.is_empty()
    }

    pub fn has_multiple(&self) -> bool {
        self.multiplicity.iter().any(|&m| m > 1)
    }
}

/// Bits used to accumulate the standalone determinant polynomial.
pub const ACCUMULATION_BITS: u32 = 128;

/// Builds `det(A_{n+1})`; coefficients are accumulated in 128-bit arithmetic
/// and rounded once, since the monomial form of large blocks is ill-conditioned.
pub fn determinant_polynomial(seqs: &TridiagonalSequences) -> DeterminantPolynomial {
    determinant_polynomial_in::<Extended>(seqs, ACCUMULATION_BITS)
}

/// Builds `det(A_{n+1})` with polynomial arithmetic in `T`, rounding the result to `f64`.
pub fn determinant_polynomial_in<T: Real>(seqs: &TridiagonalSequences, bits: u32) -> DeterminantPolynomial {
    let lift = |p: &crate::heun::SpectralPoly| -> Vec<T> {
        p.coeffs().iter().map(|&c| T::from_f64(c, bits)).collect()
    };
    let mut prev2: Vec<T> = vec![T::from_f64(1.0, bits)];
    let mut prev1: Vec<T> = lift(&seqs.a[0]);
    for j in 1..seqs.size() {
        let a = lift(&seqs.a[j]);
        let bc = poly_mul(&lift(&seqs.b[j - 1]), &lift(&seqs.c[j - 1]), bits);
        let next = poly_sub(&poly_mul(&a, &prev1, bits), &poly_mul(&bc, &prev2, bits), bits);
        prev2 = prev1;
        prev1 = next;
    }
    let mut coeffs: Vec<f64> = prev1.iter().map(Real::to_f64).collect();
    while coeffs.len() > 1 && *coeffs.last().unwrap() == 0.0 {
        coeffs.pop();
    }
    DeterminantPolynomial { coeffs }
}

fn poly_mul<T: Real>(x: &[T], y: &[T], bits: u32) -> Vec<T> {
    let mut out = vec![T::from_f64(0.0, bits); x.len() + y.len() - 1];
    for (i, xi) in x.iter().enumerate() {
        if xi.is_zero() {
            continue;
        }
        for (j, yj) in y.iter().enumerate() {
            out[i + j] = out[i + j].clone() + xi.clone() * yj.clone();
        }
    }
    out
}

fn poly_sub<T: Real>(x: &[T], y: &[T], bits: u32) -> Vec<T> {
    let len = x.len().max(y.len());
    (0..len)
        .map(|i| {
            let xi = x.get(i).cloned().unwrap_or_else(|| T::from_f64(0.0, bits));
            let yi = y.get(i).cloned().unwrap_or_else(|| T::from_f64(0.0, bits));
            xi - yi
        })
        .collect()
}

/// Determinant at a fixed `s` via the continuant recurrence, in `f64`.
pub fn determinant_numeric(seqs: &TridiagonalSequences, s: f64) -> f64 {
    determinant_numeric_in(seqs, &s, DOUBLE_BITS)
}

pub fn determinant_numeric_in<T: Real>(seqs: &TridiagonalSequences, s: &T, bits: u32) -> T {
    determinant_with_derivative(seqs, s, bits).0
}

/// Determinant and its `s`-derivative at a fixed `s`, both by recurrence.
pub fn determinant_with_derivative<T: Real>(seqs: &TridiagonalSequences, s: &T, bits: u32) -> (T, T) {
    let mut d2 = T::from_f64(1.0, bits);
    let mut dd2 = T::from_f64(0.0, bits);
    let mut d1 = seqs.a[0].eval_in(s, bits);
    let mut dd1 = seqs.a[0].derivative_in(s, bits);
    for j in 1..seqs.size() {
        let a = seqs.a[j].eval_in(s, bits);
        let da = seqs.a[j].derivative_in(s, bits);
        let b = seqs.b[j - 1].eval_in(s, bits);
        let db = seqs.b[j - 1].derivative_in(s, bits);
        let c = seqs.c[j - 1].eval_in(s, bits);
        let dc = seqs.c[j - 1].derivative_in(s, bits);
        let bc = b.clone() * c.clone();
        let dbc = db * c + b * dc;
        let d = a.clone() * d1.clone() - bc.clone() * d2.clone();
        let dd = da * d1.clone() + a * dd1.clone() - dbc * d2 - bc * dd2;
        d2 = d1;
        dd2 = dd1;
        d1 = d;
        dd1 = dd;
    }
    (d1, dd1)
}

/// All complex roots from the eigenvalues of the balanced companion matrix of
/// the monic, rescaled polynomial, each refined by complex Newton steps.
pub fn find_roots(det: &DeterminantPolynomial) -> Result<RootSet> {
    let degree = det.degree();
    if degree == 0 {
        return Err(Error::DegeneratePolynomial("determinant has degree 0".into()));
    }
    let lead = det.coeffs[degree];
    if lead.abs() < 1e-300 || !lead.is_finite() {
        return Err(Error::DegeneratePolynomial(format!("leading coefficient {lead:e}")));
    }
    let monic: Vec<f64> = det.coeffs[..=degree].iter().map(|c| c / lead).collect();

    // s = scale * x keeps the companion entries near unity
    let scale = root_scale(&monic);
    let scaled: Vec<f64> = monic
        .iter()
        .enumerate()
        .map(|(i, c)| c / scale.powi((degree - i) as i32))
        .collect();

    let mut companion = DMatrix::<f64>::zeros(degree, degree);
    for i in 1..degree {
        companion[(i, i - 1)] = 1.0;
    }
    for i in 0..degree {
        companion[(i, degree - 1)] = -scaled[i];
    }
    balancing::balance_parlett_reinsch(&mut companion);
    let eigen = Schur::try_new(companion, f64::EPSILON, 10_000)
        .ok_or_else(|| Error::DegeneratePolynomial("companion Schur iteration did not converge".into()))?
        .complex_eigenvalues();

    let trimmed = DeterminantPolynomial { coeffs: det.coeffs[..=degree].to_vec() };
    let mut roots: Vec<Complex64> = eigen
        .iter()
        .map(|z| newton_polish_complex(&trimmed, z * scale))
        .collect();
    for r in &mut roots {
        if r.im.abs() <= 4.0 * f64::EPSILON * r.norm() {
            r.im = 0.0;
        }
    }
    roots.sort_by(|x, y| x.re.total_cmp(&y.re).then(x.im.total_cmp(&y.im)));

    let multiplicity = cluster_sizes(&roots);
    let residuals = roots
        .iter()
        .map(|&r| {
            let scale = trimmed.abs_scale(r);
            if scale == 0.0 {
                0.0
            } else {
                trimmed.eval_complex(r).norm() / scale
            }
        })
        .collect();
    Ok(RootSet { roots, multiplicity, residuals })
}

fn root_scale(monic: &[f64]) -> f64 {
    // geometric mean of the root moduli: |c_0|^(1/deg), guarded against zero roots
    let degree = monic.len() - 1;
    let bound = monic[..degree]
        .iter()
        .enumerate()
        .filter(|(_, c)| **c != 0.0)
        .map(|(i, c)| c.abs().powf(1.0 / (degree - i) as f64))
        .fold(0.0_f64, f64::max);
    if bound > 0.0 && bound.is_finite() {
        // power of two so the rescaling is exact
        2f64.powi(bound.log2().round() as i32)
    } else {
        1.0
    }
}

fn newton_polish_complex(p: &DeterminantPolynomial, start: Complex64) -> Complex64 {
    let mut z = start;
    let mut best = (p.eval_complex(z).norm(), z);
    for _ in 0..8 {
        let (v, dv) = p.eval_with_derivative(z);
        if dv.norm() == 0.0 || v.norm() == 0.0 {
            break;
        }
        let next = z - v / dv;
        let nv = p.eval_complex(next).norm();
        if nv.is_nan() || nv >= best.0 {
            break;
        }
        best = (nv, next);
        z = next;
    }
    best.1
}

fn cluster_sizes(roots: &[Complex64]) -> Vec<usize> {
    let n = roots.len();
    // union-find over the "within CLUSTER_TOL" relation
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], i: usize) -> usize {
        let mut r = i;
        while parent[r] != r {
            r = parent[r];
        }
        parent[i] = r;
        r
    }
    for i in 0..n {
        for j in i + 1..n {
            let scale = roots[i].norm().max(roots[j].norm()).max(1.0);
            if (roots[i] - roots[j]).norm() <= CLUSTER_TOL * scale {
                let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                parent[ri] = rj;
            }
        }
    }
    let roots_of: Vec<usize> = (0..n).map(|i| find(&mut parent, i)).collect();
    roots_of
        .iter()
        .map(|r| roots_of.iter().filter(|x| *x == r).count())
        .collect()
}

/// Complex number over a [`Real`] backend; only what the root refinement needs.
#[derive(Debug, Clone)]
struct Cx<T> {
    re: T,
    im: T,
}

impl<T: Real> Cx<T> {
    fn from_c64(z: Complex64, bits: u32) -> Self {
        Cx { re: T::from_f64(z.re, bits), im: T::from_f64(z.im, bits) }
    }
    fn to_c64(&self) -> Complex64 {
        Complex64::new(self.re.to_f64(), self.im.to_f64())
    }
    fn add(&self, o: &Self) -> Self {
        Cx { re: self.re.clone() + o.re.clone(), im: self.im.clone() + o.im.clone() }
    }
    fn sub(&self, o: &Self) -> Self {
        Cx { re: self.re.clone() - o.re.clone(), im: self.im.clone() - o.im.clone() }
    }
    fn mul(&self, o: &Self) -> Self {
        Cx {
            re: self.re.clone() * o.re.clone() - self.im.clone() * o.im.clone(),
            im: self.re.clone() * o.im.clone() + self.im.clone() * o.re.clone(),
        }
    }
    fn div(&self, o: &Self) -> Self {
        let den = o.re.clone() * o.re.clone() + o.im.clone() * o.im.clone();
        Cx {
            re: (self.re.clone() * o.re.clone() + self.im.clone() * o.im.clone()) / den.clone(),
            im: (self.im.clone() * o.re.clone() - self.re.clone() * o.im.clone()) / den,
        }
    }
    fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }
}

fn spectral_poly_complex<T: Real>(p: &crate::heun::SpectralPoly, z: &Cx<T>, bits: u32) -> (Cx<T>, Option<Cx<T>>) {
    let [c0, c1, c2] = p.coeffs();
    let lift = |c: f64| Cx { re: T::from_f64(c, bits), im: T::from_f64(0.0, bits) };
    let scaled = |c: f64| Cx { re: z.re.clone() * T::from_f64(c, bits), im: z.im.clone() * T::from_f64(c, bits) };
    match (c1 != 0.0, c2 != 0.0) {
        (false, false) => (lift(c0), None),
        (true, false) => (scaled(c1).add(&lift(c0)), Some(lift(c1))),
        _ => {
            let inner = scaled(c2).add(&lift(c1));
            (z.mul(&inner).add(&lift(c0)), Some(scaled(2.0 * c2).add(&lift(c1))))
        }
    }
}

/// Newton ratio `det / det'` at complex `z` by the continuant recurrence.
fn newton_ratio<T: Real>(seqs: &TridiagonalSequences, z: &Cx<T>, bits: u32) -> Option<Cx<T>> {
    let zero = || Cx { re: T::from_f64(0.0, bits), im: T::from_f64(0.0, bits) };
    let (mut d2, mut dd2) = (Cx { re: T::from_f64(1.0, bits), im: T::from_f64(0.0, bits) }, zero());
    let (mut d1, da0) = spectral_poly_complex(&seqs.a[0], z, bits);
    let mut dd1 = da0.unwrap_or_else(zero);
    for j in 1..seqs.size() {
        let (a, da) = spectral_poly_complex(&seqs.a[j], z, bits);
        let (b, db) = spectral_poly_complex(&seqs.b[j - 1], z, bits);
        let (c, dc) = spectral_poly_complex(&seqs.c[j - 1], z, bits);
        let bc = b.mul(&c);
        let dbc = match (db, dc) {
            (None, None) => None,
            (Some(db), None) => Some(db.mul(&c)),
            (None, Some(dc)) => Some(b.mul(&dc)),
            (Some(db), Some(dc)) => Some(db.mul(&c).add(&b.mul(&dc))),
        };
        let d = a.mul(&d1).sub(&bc.mul(&d2));
        let mut dd = a.mul(&dd1).sub(&bc.mul(&dd2));
        if let Some(da) = da {
            dd = dd.add(&da.mul(&d1));
        }
        if let Some(dbc) = dbc {
            dd = dd.sub(&dbc.mul(&d2));
        }
        d2 = d1;
        dd2 = dd1;
        d1 = d;
        dd1 = dd;
        let size = d1.to_c64().norm().max(dd1.to_c64().norm());
        if size > 1e100 {
            // only the ratio is needed; a power of two rescales exactly
            let f = T::from_f64(2f64.powi(-(size.log2() as i32)), bits);
            for v in [&mut d1, &mut dd1, &mut d2, &mut dd2] {
                v.re = v.re.clone() * f.clone();
                v.im = v.im.clone() * f.clone();
            }
        }
    }
    if d1.is_zero() {
        return Some(zero());
    }
    if dd1.is_zero() {
        return None;
    }
    Some(d1.div(&dd1))
}

/// Refines approximate roots of `det(A_{n+1})` simultaneously by Aberth-Ehrlich
/// iteration, first in `f64` and then in the working precision of `T`.
///
/// The determinant is evaluated through the continuant rather than its monomial
/// coefficients, so the result does not inherit the conditioning of the
/// rounded coefficients. Seeds are rotated off the real axis first; a
/// conjugate-symmetric start can never split a real pair into a complex one.
/// The returned `residuals` are final relative Newton steps.
pub fn refine_roots<T: Real>(seqs: &TridiagonalSequences, seeds: &[Complex64], bits: u32) -> RootSet {
    let kicked: Vec<Complex64> = seeds
        .iter()
        .enumerate()
        .map(|(k, s)| s + Complex64::from_polar(1e-3 * s.norm().max(1.0), 0.9 + 2.4 * k as f64))
        .collect();
    let (rough, _) = aberth::<f64>(seqs, kicked, DOUBLE_BITS, 1e-13, 500);
    let (fine, steps) = aberth::<T>(seqs, rough, bits, REFINED_STEP, 200);
    let mut pairs: Vec<(Complex64, f64)> = fine
        .into_iter()
        .zip(steps)
        .map(|(mut c, step)| {
            if c.im.abs() <= 4.0 * f64::EPSILON * c.norm() {
                c.im = 0.0;
            }
            (c, step)
        })
        .collect();
    pairs.sort_by(|x, y| x.0.re.total_cmp(&y.0.re).then(x.0.im.total_cmp(&y.0.im)));
    let roots: Vec<Complex64> = pairs.iter().map(|p| p.0).collect();
    RootSet { multiplicity: cluster_sizes(&roots), residuals: pairs.iter().map(|p| p.1).collect(), roots }
}

/// Relative step at which [`refine_roots`] stops; real roots are polished further.
const REFINED_STEP: f64 = 1e-20;

/// Aberth sweeps where only the Newton ratio is evaluated in `T`. The
/// repulsion sum enters the step at second order and is kept in `f64`.
fn aberth<T: Real>(
    seqs: &TridiagonalSequences,
    mut z: Vec<Complex64>,
    bits: u32,
    tol: f64,
    sweeps: usize,
) -> (Vec<Complex64>, Vec<f64>) {
    let n = z.len();
    let mut steps = vec![f64::INFINITY; n];
    let mut exact: Vec<Cx<T>> = z.iter().map(|s| Cx::from_c64(*s, bits)).collect();
    for _ in 0..sweeps {
        let mut converged = true;
        for k in 0..n {
            if steps[k] <= tol {
                continue;
            }
            let Some(w) = newton_ratio(seqs, &exact[k], bits) else {
                converged = false;
                continue;
            };
            let sum: Complex64 = (0..n)
                .filter(|&j| j != k && z[j] != z[k])
                .map(|j| 1.0 / (z[k] - z[j]))
                .sum();
            let wf = w.to_c64();
            let factor = 1.0 - wf * sum;
            let step = if factor.norm() > 0.0 && factor.is_finite() {
                w.div(&Cx::from_c64(factor, bits))
            } else {
                w
            };
            let next = exact[k].sub(&step);
            let next_f = next.to_c64();
            let size = step.to_c64().norm() / next_f.norm().max(1.0);
            if size.is_finite() && next_f.is_finite() {
                exact[k] = next;
                z[k] = next_f;
                steps[k] = size;
            }
            converged &= steps[k] <= tol;
        }
        if converged {
            break;
        }
    }
    (z, steps)
}

/// Newton iteration for a real root in the working precision of `T`, using
/// the recurrence-evaluated determinant and derivative.
pub fn polish_real_root<T: Real>(seqs: &TridiagonalSequences, seed: f64, bits: u32) -> T {
    let mut s = T::from_f64(seed, bits);
    let mut last_step = f64::INFINITY;
    let rel_eps = 2f64.powi(-(bits as i32) + 3);
    for _ in 0..100 {
        let (d, dd) = determinant_with_derivative(seqs, &s, bits);
        if dd.is_zero() || d.is_zero() {
            break;
        }
        let step = d / dd;
        let step_mag = step.abs().to_f64();
        if !step_mag.is_finite() || step_mag > 2.0 * last_step {
            // diverging or stalled at a multiple root
            break;
        }
        s = s - step;
        last_step = step_mag;
        if step_mag <= rel_eps * s.abs().to_f64().max(1.0) {
            break;
        }
    }
    s
}

/// Coefficients `p_j` for an accepted root: the recurrence run at `s*`.
///
/// Rejects the root when the terminal residual exceeds [`NULL_VECTOR_TOL`].
pub fn null_vector<T: Real>(
    seqs: &TridiagonalSequences,
    s_star: &T,
    bits: u32,
) -> Result<PolynomialCoefficients<T>> {
    let poly = polynomial_from_recurrence(&seqs.at(s_star, bits))?;
    if poly.terminal_residual > NULL_VECTOR_TOL || !poly.terminal_residual.is_finite() {
        return Err(Error::ResidualTooLarge {
            residual: poly.terminal_residual,
            tolerance: NULL_VECTOR_TOL,
        });
    }
    Ok(poly)
}

/// Roots for sequences with `a_j = g s + d_j` (common slope `g`) and constant
/// `b_j`, `c_j` with `b_j c_j > 0`: the eigenvalues of the symmetrized
/// constant matrix `-(1/g) M`, computed by Sturm bisection.
pub fn symmetric_roots(seqs: &TridiagonalSequences) -> Result<Vec<f64>> {
    let g = seqs.a[0].coeffs()[1];
    if g == 0.0 {
        return Err(Error::InvalidParameter("diagonal does not depend on s".into()));
    }
    let mut diag = Vec::with_capacity(seqs.size());
    for a in &seqs.a {
        let [d, slope, quad] = a.coeffs();
        if quad != 0.0 || slope != g {
            return Err(Error::InvalidParameter(
                "diagonal entries are not affine with a common slope".into(),
            ));
        }
        diag.push(-d / g);
    }
    let mut off = Vec::with_capacity(seqs.degree());
    for (b, c) in seqs.b.iter().zip(&seqs.c) {
        if !b.is_constant() || !c.is_constant() {
            return Err(Error::InvalidParameter("off-diagonals depend on s".into()));
        }
        let product = b.eval(0.0) * c.eval(0.0);
        if product <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "off-diagonal product {product} is not positive"
            )));
        }
        off.push(product.sqrt() / g.abs());
    }
    SymTridiagonal::new(diag, off)?.eigenvalues()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compensated_evaluation_near_multiple_root() {
        // (s - 1)^10 expanded; plain Horner loses every digit at s = 1.01
        let mut coeffs = vec![1.0];
        for _ in 0..10 {
            let mut next = vec![0.0; coeffs.len() + 1];
            for (i, c) in coeffs.iter().enumerate() {
                next[i] -= c;
                next[i + 1] += c;
            }
            coeffs = next;
        }
        let det = DeterminantPolynomial { coeffs };
        let x = 1.01;
        let exact = (x - 1.0f64).powi(10);
        assert!((det.eval(x) / exact - 1.0).abs() < 1e-6, "{}", det.eval(x));
    }
    use crate::heun::SpectralPoly;

    fn constant_seqs(a: &[f64], b: &[f64], c: &[f64]) -> TridiagonalSequences {
        TridiagonalSequences::new(
            a.iter().map(|&x| SpectralPoly::constant(x)).collect(),
            b.iter().map(|&x| SpectralPoly::constant(x)).collect(),
            c.iter().map(|&x| SpectralPoly::constant(x)).collect(),
        )
        .unwrap()
    }

    #[test]
    fn refinement_recovers_wilkinson_roots() {
        let n = 30;
        let seqs = TridiagonalSequences::new(
            (0..n).map(|j| SpectralPoly::linear(-(j as f64), 1.0)).collect(),
            vec![SpectralPoly::constant(1.0); n - 1],
            vec![SpectralPoly::ZERO; n - 1],
        )
        .unwrap();
        let seeds = find_roots(&determinant_polynomial(&seqs)).unwrap();
        let rough = seeds.roots.iter().enumerate().map(|(j, r)| (r - j as f64).norm()).fold(0.0, f64::max);
        assert!(rough > 1e-6, "companion roots unexpectedly accurate: {rough:e}");
        let refined = refine_roots::<Extended>(&seqs, &seeds.roots, 128);
        for (j, r) in refined.roots.iter().enumerate() {
            assert!((r - j as f64).norm() < 1e-12, "root {j}: {r}");
        }
        assert!(refined.residuals.iter().all(|&r| r <= 1e-10));
        assert!(!refined.has_multiple());
    }

    #[test]
    fn two_by_two_constant() {
        let s = constant_seqs(&[2.0, 3.0], &[1.0], &[1.0]);
        assert_eq!(determinant_polynomial(&s).coeffs, vec![5.0]);
        assert_eq!(determinant_numeric(&s, 0.7), 5.0);
    }

    #[test]
    fn affine_two_by_two() {
        // a_j = s, b_0 = c_0 = 4  =>  s^2 - 16
        let s = TridiagonalSequences::new(
            vec![SpectralPoly::S; 2],
            vec![SpectralPoly::constant(4.0)],
            vec![SpectralPoly::constant(4.0)],
        )
        .unwrap();
        let det = determinant_polynomial(&s);
        assert_eq!(det.coeffs, vec![-16.0, 0.0, 1.0]);
        let roots = find_roots(&det).unwrap();
        assert_eq!(roots.len(), 2);
        assert!((roots.roots[0] - Complex64::new(-4.0, 0.0)).norm() < 1e-13);
        assert!((roots.roots[1] - Complex64::new(4.0, 0.0)).norm() < 1e-13);
        let sym = symmetric_roots(&s).unwrap();
        assert!((sym[0] + 4.0).abs() < 1e-13 && (sym[1] - 4.0).abs() < 1e-13);
    }

    #[test]
    fn constant_term_matches_numeric_at_zero() {
        let s = TridiagonalSequences::new(
            vec![SpectralPoly::linear(1.5, 1.0), SpectralPoly::quadratic(-2.0, 0.5, 1.0), SpectralPoly::linear(0.3, -2.0)],
            vec![SpectralPoly::constant(2.0), SpectralPoly::linear(1.0, 1.0)],
            vec![SpectralPoly::linear(0.0, 3.0), SpectralPoly::constant(-1.0)],
        )
        .unwrap();
        let det = determinant_polynomial(&s);
        assert_eq!(det.coeffs[0], determinant_numeric(&s, 0.0));
        for x in [-1.3, 0.2, 2.7] {
            let rel = (det.eval(x) - determinant_numeric(&s, x)).abs() / det.eval(x).abs().max(1.0);
            assert!(rel < 1e-13);
        }
    }

    #[test]
    fn ill_scaled_agreement() {
        let mut rng_state = 7u64;
        let mut next = || {
            rng_state = rng_state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((rng_state >> 11) as f64 / (1u64 << 53) as f64 - 0.5) * 2e6
        };
        let n = 10;
        let a = (0..=n).map(|_| SpectralPoly::linear(next(), 1.0)).collect();
        let b = (0..n).map(|_| SpectralPoly::constant(next())).collect();
        let c = (0..n).map(|_| SpectralPoly::constant(next())).collect();
        let s = TridiagonalSequences::new(a, b, c).unwrap();
        let det = determinant_polynomial(&s);
        for x in [-3.1e5, 0.0, 2.2e4, 7.7e5] {
            let (p, q) = (det.eval(x), determinant_numeric(&s, x));
            assert!((p - q).abs() <= 1e-6 * p.abs().max(q.abs()), "{p:e} vs {q:e}");
        }
    }

    #[test]
    fn double_root_flagged() {
        // (s - 1)^2 (s + 2) = s^3 - 3s + 2
        let det = DeterminantPolynomial { coeffs: vec![2.0, -3.0, 0.0, 1.0] };
        let roots = find_roots(&det).unwrap();
        assert_eq!(roots.len(), 3);
        assert!((roots.roots[0].re + 2.0).abs() < 1e-12);
        assert_eq!(roots.multiplicity, vec![1, 2, 2]);
        assert!(roots.has_multiple());
        assert!((roots.roots[1].re - 1.0).abs() < 1e-7);
    }

    #[test]
    fn degenerate_rejected() {
        assert!(find_roots(&DeterminantPolynomial { coeffs: vec![3.0] }).is_err());
        assert!(find_roots(&DeterminantPolynomial { coeffs: vec![1.0, 1e-301] }).is_err());
    }

    #[test]
    fn complex_pair() {
        // s^2 + 1
        let roots = find_roots(&DeterminantPolynomial { coeffs: vec![1.0, 0.0, 1.0] }).unwrap();
        assert!((roots.roots[0].im.abs() - 1.0).abs() < 1e-14);
        assert!(roots.roots[0].re.abs() < 1e-14);
    }

    #[test]
    fn newton_polish_in_extended() {
        use crate::precision::Extended;
        let s = TridiagonalSequences::new(
            vec![SpectralPoly::S; 2],
            vec![SpectralPoly::constant(2.0)],
            vec![SpectralPoly::constant(1.0)],
        )
        .unwrap();
        // s^2 - 2
        let root: Extended = polish_real_root(&s, 1.4, 200);
        let err = root.clone() * root - Extended::from_f64(2.0, 200);
        assert!(Real::to_f64(&Real::abs(&err)) < 1e-55);
    }

    #[test]
    fn null_vector_rejects_off_root() {
        let s = TridiagonalSequences::new(
            vec![SpectralPoly::S; 2],
            vec![SpectralPoly::constant(4.0)],
            vec![SpectralPoly::constant(4.0)],
        )
        .unwrap();
        let p = null_vector(&s, &4.0, 53).unwrap();
        assert_eq!(p.coeffs, vec![1.0, -1.0]);
        assert!(matches!(null_vector(&s, &4.01, 53), Err(Error::ResidualTooLarge { .. })));
    }

    #[test]
    fn symmetric_path_requires_positive_products() {
        let s = TridiagonalSequences::new(
            vec![SpectralPoly::S; 2],
            vec![SpectralPoly::constant(4.0)],
            vec![SpectralPoly::constant(-4.0)],
        )
        .unwrap();
        assert!(symmetric_roots(&s).is_err());
    }
}
