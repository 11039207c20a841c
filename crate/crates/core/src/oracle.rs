//! Independent verification backends.
//!
//! None of these sit on the production path. The dense eigensolvers come from
//! `nalgebra`; the Sturm-bisection route in [`crate::orthopoly`] never calls
//! them.

use nalgebra::{Complex, DMatrix, DVector, Schur, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::model::{FlowParams, JacobiCoefficients, Profile};
use crate::orthopoly::{MAX_BISECTIONS, SPECTRUM_CAP};

const SCHUR_EPS: f64 = 1e-15;
const SCHUR_MAX_ITER: usize = 0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MatrixKind {
    /// Truncated Fourier operator acting on `f̂(−N..N)`.
    FourierB,
    /// Truncated Jacobi matrix.
    JacobiA,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumEstimate {
    pub eigenvalues: Vec<Complex64>,
    pub truncation: usize,
    pub matrix_kind: MatrixKind,
    /// `‖Mv − λv‖ / ‖v‖` for each eigenpair, aligned with `eigenvalues`.
    pub residuals: Vec<f64>,
}

impl SpectrumEstimate {
    /// Largest imaginary part; `k` times this is the fastest growth rate.
    pub fn max_imag(&self) -> f64 {
        self.eigenvalues.iter().map(|z| z.im).fold(f64::NEG_INFINITY, f64::max)
    }

    /// Eigenvalue with the largest imaginary part.
    pub fn dominant(&self) -> Option<Complex64> {
        self.eigenvalues.iter().copied().max_by(|a, b| a.im.total_cmp(&b.im))
    }

    pub fn max_abs_imag(&self) -> f64 {
        self.eigenvalues.iter().map(|z| z.im.abs()).fold(0.0, f64::max)
    }

    pub fn max_residual(&self) -> f64 {
        self.residuals.iter().copied().fold(0.0, f64::max)
    }
}

/// Dense `(2N+1)×(2N+1)` operator whose eigenvalues are the wave speeds `c`:
/// entry `(ℓ, m)` is
/// `(ℓ²+k²+1/Bu)⁻¹·[û(ℓ−m)(m²+k²) − (ℓ−m)² û(ℓ−m)]`, modes beyond `±N` dropped.
pub fn fourier_operator(profile: &Profile, params: &FlowParams, truncation: usize) -> DMatrix<Complex64> {
    let n = truncation as i64;
    let dim = 2 * truncation + 1;
    let k2 = params.k() * params.k();
    let mut m = DMatrix::from_element(dim, dim, Complex64::new(0.0, 0.0));
    for ell in -n..=n {
        let den = params.denominator(ell as f64);
        for (shift, u) in profile.nonzero_coefficients() {
            let col = ell - shift;
            if col.abs() > n {
                continue;
            }
            let colf = col as f64;
            let shiftf = shift as f64;
            let entry = u * (colf * colf + k2 - shiftf * shiftf) / den;
            m[((ell + n) as usize, (col + n) as usize)] += entry;
        }
    }
    m
}

fn sort_pairs(pairs: &mut [(Complex64, f64)]) {
    pairs.sort_by(|a, b| a.0.re.total_cmp(&b.0.re).then(a.0.im.total_cmp(&b.0.im)));
}

/// Eigenvalues of the truncated Fourier operator via a complex Schur
/// decomposition; eigenvectors come from back substitution on the triangular
/// factor and are only used for residuals.
pub fn truncated_spectrum(
    profile: &Profile,
    params: &FlowParams,
    truncation: usize,
) -> Result<SpectrumEstimate> {
    if truncation < 8 {
        return Err(Error::invalid("truncation", format!("must be >= 8, got {truncation}")));
    }
    let m = fourier_operator(profile, params, truncation);
    let schur = Schur::try_new(m.clone(), SCHUR_EPS, SCHUR_MAX_ITER)
        .ok_or(Error::EigenSolverFailed { truncation })?;
    let (q, t) = schur.unpack();
    let dim = t.nrows();
    let t_norm = t.iter().map(|v| v.norm()).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
    let floor = f64::EPSILON * t_norm;

    let mut pairs = Vec::with_capacity(dim);
    let mut y = vec![Complex64::new(0.0, 0.0); dim];
    for i in 0..dim {
        let lambda = t[(i, i)];
        y[i] = Complex64::new(1.0, 0.0);
        for j in (0..i).rev() {
            let mut s = Complex64::new(0.0, 0.0);
            for l in j + 1..=i {
                s += t[(j, l)] * y[l];
            }
            let mut d = t[(j, j)] - lambda;
            if d.norm() < floor {
                d = Complex64::new(floor, 0.0);
            }
            y[j] = -s / d;
            if y[j].norm() > 1e150 {
                y[j..=i].iter_mut().for_each(|e| *e *= 1e-150);
            }
        }
        let mut v = DVector::from_element(dim, Complex64::new(0.0, 0.0));
        for (l, &yl) in y.iter().enumerate().take(i + 1) {
            if yl != Complex::new(0.0, 0.0) {
                v.axpy(yl, &q.column(l), Complex64::new(1.0, 0.0));
            }
        }
        let norm = v.norm();
        let residual = (&m * &v - &v * lambda).norm() / norm;
        pairs.push((lambda, residual));
    }
    sort_pairs(&mut pairs);
    let (eigenvalues, residuals) = pairs.into_iter().unzip();
    Ok(SpectrumEstimate {
        eigenvalues,
        truncation,
        matrix_kind: MatrixKind::FourierB,
        residuals,
    })
}

fn jacobi_matrix(coeffs: &JacobiCoefficients, n: usize) -> Result<DMatrix<f64>> {
    if n > SPECTRUM_CAP {
        return Err(Error::SpectrumCapExceeded { n, cap: SPECTRUM_CAP });
    }
    coeffs.require_truncation(n)?;
    let (a, b) = (coeffs.a(), coeffs.b());
    Ok(DMatrix::from_fn(n, n, |i, j| {
        if i == j {
            b[i]
        } else if i + 1 == j {
            a[i]
        } else if j + 1 == i {
            a[j]
        } else {
            0.0
        }
    }))
}

/// Eigenvalues of the explicit `n×n` Jacobi truncation, ascending.
pub fn jacobi_truncation_eigs(coeffs: &JacobiCoefficients, n: usize) -> Result<Vec<f64>> {
    let mut values: Vec<f64> = SymmetricEigen::new(jacobi_matrix(coeffs, n)?).eigenvalues.iter().copied().collect();
    values.sort_by(f64::total_cmp);
    Ok(values)
}

/// [`jacobi_truncation_eigs`] with residuals, as a [`SpectrumEstimate`].
pub fn jacobi_truncation_spectrum(coeffs: &JacobiCoefficients, n: usize) -> Result<SpectrumEstimate> {
    let matrix = jacobi_matrix(coeffs, n)?;
    let eig = SymmetricEigen::new(matrix.clone());
    let mut pairs: Vec<(Complex64, f64)> = (0..n)
        .map(|i| {
            let v = eig.eigenvectors.column(i);
            let lambda = eig.eigenvalues[i];
            let residual = (&matrix * v - v * lambda).norm() / v.norm();
            (Complex64::new(lambda, 0.0), residual)
        })
        .collect();
    sort_pairs(&mut pairs);
    let (eigenvalues, residuals) = pairs.into_iter().unzip();
    Ok(SpectrumEstimate {
        eigenvalues,
        truncation: n,
        matrix_kind: MatrixKind::JacobiA,
        residuals,
    })
}

/// Index convention for the continued fraction
/// `m(z) = −1/(z − b_1 + a_1²[−1/(z − b_2 + a_2²[…])])`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CfOffset {
    /// The leading `b_1, a_1` are the table's `b_0, a_0` (one-based labels).
    Shifted,
    /// The leading `b_1, a_1` are the table's `b_1, a_1`, i.e. the first row
    /// of the matrix is skipped.
    Literal,
}

impl CfOffset {
    fn first(self) -> usize {
        match self {
            CfOffset::Shifted => 0,
            CfOffset::Literal => 1,
        }
    }
}

/// The convention whose pole reproduces the negative root of the Jacobi
/// matrix; `Literal` locates the root of the matrix with its first row
/// removed instead.
pub const FROZEN_OFFSET: CfOffset = CfOffset::Shifted;

pub const SCAN_POINTS: usize = 2048;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StieltjesPole {
    pub location: f64,
    pub depth: usize,
    pub offset: CfOffset,
}

fn check_depth(coeffs: &JacobiCoefficients, depth: usize, offset: CfOffset) -> Result<()> {
    if depth < 1 {
        return Err(Error::invalid("depth", "must be >= 1"));
    }
    // Levels first..first+depth use b up to first+depth-1 and a up to first+depth-2.
    let needed = offset.first() + depth;
    if coeffs.b().len() < needed || coeffs.a().len() + 1 < needed {
        return Err(Error::InsufficientCoefficients {
            needed,
            available: coeffs.b().len().min(coeffs.a().len() + 1),
        });
    }
    Ok(())
}

fn reciprocal_unchecked(coeffs: &JacobiCoefficients, depth: usize, offset: CfOffset, z: f64) -> f64 {
    let (a, b) = (coeffs.a(), coeffs.b());
    let first = offset.first();
    let last = first + depth - 1;
    let mut tail = 0.0;
    for j in (first + 1..=last).rev() {
        let coupling = if j < last { a[j] * a[j] * tail } else { 0.0 };
        tail = -1.0 / (z - b[j] + coupling);
    }
    let coupling = if depth > 1 { a[first] * a[first] * tail } else { 0.0 };
    -(z - b[first] + coupling)
}

/// `1/m(z)` of the depth-truncated continued fraction. Zeros of `1/m` are
/// the poles of `m`, where `1/m` changes sign from `+` to `−`.
pub fn reciprocal_m(coeffs: &JacobiCoefficients, depth: usize, offset: CfOffset, z: f64) -> Result<f64> {
    check_depth(coeffs, depth, offset)?;
    Ok(reciprocal_unchecked(coeffs, depth, offset, z))
}

/// Pole of the Stieltjes function in `bracket` using [`FROZEN_OFFSET`].
pub fn stieltjes_pole(
    coeffs: &JacobiCoefficients,
    depth: usize,
    bracket: (f64, f64),
) -> Result<Option<StieltjesPole>> {
    stieltjes_pole_with(coeffs, depth, bracket, FROZEN_OFFSET)
}

pub fn stieltjes_pole_with(
    coeffs: &JacobiCoefficients,
    depth: usize,
    bracket: (f64, f64),
    offset: CfOffset,
) -> Result<Option<StieltjesPole>> {
    let (lo, hi) = bracket;
    if !(lo < hi && hi < 0.0) {
        return Err(Error::invalid("bracket", format!("need lo < hi < 0, got ({lo}, {hi})")));
    }
    if depth < 16 {
        return Err(Error::invalid("depth", format!("must be >= 16, got {depth}")));
    }
    check_depth(coeffs, depth, offset)?;
    let f = |z: f64| reciprocal_unchecked(coeffs, depth, offset, z);

    let step = (hi - lo) / SCAN_POINTS as f64;
    let mut left = lo;
    let mut f_left = f(left);
    for i in 1..=SCAN_POINTS {
        let right = if i == SCAN_POINTS { hi } else { lo + step * i as f64 };
        let f_right = f(right);
        if f_left > 0.0 && f_right <= 0.0 {
            let (mut a, mut b) = (left, right);
            for _ in 0..MAX_BISECTIONS {
                let mid = 0.5 * (a + b);
                if mid <= a || mid >= b {
                    break;
                }
                if f(mid) > 0.0 {
                    a = mid;
                } else {
                    b = mid;
                }
            }
            return Ok(Some(StieltjesPole {
                location: 0.5 * (a + b),
                depth,
                offset,
            }));
        }
        left = right;
        f_left = f_right;
    }
    Ok(None)
}
