//! Physical parameters, the cosine-profile Jacobi coefficients and general
//! trigonometric-polynomial background profiles.
//!
//! Square roots of negative radicands take the principal branch `+i·sqrt(|x|)`.
//! For `0 < k < 1` only `z_0` is non-real, and only `z_0²` (which is real)
//! enters the Jacobi matrix, so the branch never affects a spectrum.

use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Wave number `k` and inverse Burger number `1/Bu` of the modified Rayleigh
/// equation. `inv_bu = 0` is the non-rotating limit `Bu = ∞`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlowParams {
    k: f64,
    inv_bu: f64,
}

impl FlowParams {
    pub fn new(k: f64, inv_bu: f64) -> Result<Self> {
        if !(k.is_finite() && k > 0.0) {
            return Err(Error::invalid("k", format!("must be finite and > 0, got {k}")));
        }
        if !(inv_bu.is_finite() && inv_bu >= 0.0) {
            return Err(Error::invalid(
                "inv_bu",
                format!("must be finite and >= 0, got {inv_bu}"),
            ));
        }
        Ok(Self { k, inv_bu })
    }

    /// Parameters from a Burger number; `f64::INFINITY` maps to `inv_bu = 0`.
    pub fn from_burger(k: f64, bu: f64) -> Result<Self> {
        if !(bu > 0.0) {
            return Err(Error::invalid("bu", format!("must be > 0, got {bu}")));
        }
        Self::new(k, 1.0 / bu)
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    pub fn inv_bu(&self) -> f64 {
        self.inv_bu
    }

    /// Complex eigenvalues exist only for `k < 1`; `k = 1` belongs to the
    /// stable branch.
    pub fn in_unstable_band(&self) -> bool {
        self.k < 1.0
    }

    /// `ℓ² + k² − 1`
    pub(crate) fn shifted_numerator(&self, ell: f64) -> f64 {
        ell * ell + self.k * self.k - 1.0
    }

    /// `ℓ² + k² + 1/Bu`
    pub(crate) fn denominator(&self, ell: f64) -> f64 {
        ell * ell + self.k * self.k + self.inv_bu
    }
}

pub(crate) fn principal_sqrt(x: f64) -> Complex64 {
    if x >= 0.0 {
        Complex64::new(x.sqrt(), 0.0)
    } else {
        Complex64::new(0.0, (-x).sqrt())
    }
}

/// Off-diagonal entry `z_j` of the symmetrized cosine operator.
pub fn zeta(params: &FlowParams, j: usize) -> Complex64 {
    let j = j as f64;
    let num = params.shifted_numerator(j) * params.shifted_numerator(j + 1.0);
    let den = params.denominator(j) * params.denominator(j + 1.0);
    0.5 * principal_sqrt(num / den)
}

/// Symmetrizing factor `q̂(ℓ)`; `z_j = q̂(j)·q̂(j+1)`.
pub fn qhat(params: &FlowParams, ell: i64) -> Complex64 {
    let ell = ell as f64;
    FRAC_1_SQRT_2 * principal_sqrt(params.shifted_numerator(ell) / params.denominator(ell))
}

/// Weight `w(ℓ) = (ℓ²+k²−1)^{1/2} (ℓ²+k²+1/Bu)^{1/2}` relating the symmetric
/// variable `ĝ = w·f̂` to Fourier coefficients `f̂`.
///
/// Returns [`Error::ZeroWeight`] when `ℓ² + k² = 1`, where `f̂ = ĝ/w` is
/// undefined.
pub fn weight(params: &FlowParams, ell: i64) -> Result<Complex64> {
    let l = ell as f64;
    let num = params.shifted_numerator(l);
    if num == 0.0 {
        return Err(Error::ZeroWeight { ell });
    }
    Ok(principal_sqrt(num) * params.denominator(l).sqrt())
}

/// Lazily extendable Jacobi coefficients `a_j`, `b_j` (and the `z_j` they
/// are built from) of the matrix `A` whose negative eigenvalue is `c²`.
///
/// Extension only appends, so every prefix handed out stays valid.
#[derive(Debug, Clone)]
pub struct JacobiCoefficients {
    params: FlowParams,
    z: Vec<Complex64>,
    a: Vec<f64>,
    b: Vec<f64>,
}

impl JacobiCoefficients {
    /// Empty table; call [`extend_to`](Self::extend_to) before use.
    pub fn new(params: FlowParams) -> Self {
        Self {
            params,
            z: Vec::new(),
            a: Vec::new(),
            b: Vec::new(),
        }
    }

    /// Materializes `a_0..a_{n-1}` and `b_0..b_n`. Already computed entries
    /// are kept as is.
    pub fn extend_to(&mut self, n: usize) {
        let z_len = 2 * n + 2;
        while self.z.len() < z_len {
            let j = self.z.len();
            self.z.push(zeta(&self.params, j));
        }
        let z = &self.z;
        while self.b.len() <= n {
            let j = self.b.len();
            let value = if j == 0 {
                2.0 * z[0] * z[0] + z[1] * z[1]
            } else {
                z[2 * j] * z[2 * j] + z[2 * j + 1] * z[2 * j + 1]
            };
            self.b.push(value.re);
        }
        while self.a.len() < n {
            let j = self.a.len();
            self.a.push((z[2 * j + 1] * z[2 * j + 2]).re);
        }
    }

    pub fn params(&self) -> &FlowParams {
        &self.params
    }

    /// Number of materialized off-diagonal entries.
    pub fn order(&self) -> usize {
        self.a.len()
    }

    pub fn a(&self) -> &[f64] {
        &self.a
    }

    pub fn b(&self) -> &[f64] {
        &self.b
    }

    pub fn z(&self) -> &[Complex64] {
        &self.z
    }

    /// Checks that the `n×n` truncation (which uses `b_0..b_{n-1}` and
    /// `a_0..a_{n-2}`) is available.
    pub fn require_truncation(&self, n: usize) -> Result<()> {
        if n == 0 {
            return Err(Error::invalid("n", "truncation order must be >= 1"));
        }
        if self.b.len() < n || self.a.len() + 1 < n {
            return Err(Error::InsufficientCoefficients {
                needed: n,
                available: self.b.len().min(self.a.len() + 1),
            });
        }
        Ok(())
    }

    /// Largest coefficient magnitude among the first `n` rows.
    pub(crate) fn scale(&self, n: usize) -> f64 {
        let b = self.b[..n].iter().map(|v| v.abs());
        let a = self.a[..n.saturating_sub(1)].iter().map(|v| v.abs());
        b.chain(a).fold(0.0, f64::max)
    }

    /// Gershgorin radius bound `max_j(|b_j| + |a_j| + |a_{j−1}|)` of the `n×n`
    /// truncation; every eigenvalue lies in `[−L, L]`.
    pub fn gershgorin_bound(&self, n: usize) -> f64 {
        (0..n)
            .map(|j| {
                let upper = if j + 1 < n { self.a[j].abs() } else { 0.0 };
                let lower = if j > 0 { self.a[j - 1].abs() } else { 0.0 };
                self.b[j].abs() + upper + lower
            })
            .fold(0.0, f64::max)
    }
}

/// Coefficient table with `a_0..a_{n-1}` and `b_0..b_n` materialized.
pub fn jacobi_coefficients(params: FlowParams, n: usize) -> Result<JacobiCoefficients> {
    if n == 0 {
        return Err(Error::invalid("n", "must be >= 1"));
    }
    let mut coeffs = JacobiCoefficients::new(params);
    coeffs.extend_to(n);
    Ok(coeffs)
}

/// Real-valued trigonometric-polynomial background velocity
/// `u(y) = Σ_ℓ û(ℓ) e^{iℓy}`, stored on a symmetric index range.
#[derive(Debug, Clone, PartialEq)]
pub struct Profile {
    /// `coeffs[ℓ + degree]` is `û(ℓ)` for `|ℓ| <= degree`.
    coeffs: Vec<Complex64>,
    degree: usize,
}

impl Profile {
    /// `u(y) = cos(y)`
    pub fn cosine() -> Self {
        Self::from_cos_sin(0.0, &[(1.0, 0.0)])
    }

    /// `u(y) = mean + cos(y)`
    pub fn shifted_cosine(mean: f64) -> Self {
        Self::from_cos_sin(mean, &[(1.0, 0.0)])
    }

    /// `u(y) = mean + Σ_n (c_n cos(ny) + s_n sin(ny))` with `terms[n-1] = (c_n, s_n)`.
    pub fn from_cos_sin(mean: f64, terms: &[(f64, f64)]) -> Self {
        let degree = terms.len();
        let mut coeffs = vec![Complex64::new(0.0, 0.0); 2 * degree + 1];
        coeffs[degree] = Complex64::new(mean, 0.0);
        for (i, &(c, s)) in terms.iter().enumerate() {
            let n = i + 1;
            coeffs[degree + n] = Complex64::new(0.5 * c, -0.5 * s);
            coeffs[degree - n] = Complex64::new(0.5 * c, 0.5 * s);
        }
        Self { coeffs, degree }
    }

    /// Builds a profile from explicit Fourier coefficients `(ℓ, û(ℓ))`.
    /// Rejects sets that are not conjugate-symmetric, i.e. not real-valued.
    pub fn from_fourier(entries: &[(i64, Complex64)]) -> Result<Self> {
        let degree = entries.iter().map(|(l, _)| l.unsigned_abs() as usize).max().unwrap_or(0);
        let mut coeffs = vec![Complex64::new(0.0, 0.0); 2 * degree + 1];
        for &(l, v) in entries {
            coeffs[(l + degree as i64) as usize] += v;
        }
        for l in 0..=degree {
            let plus = coeffs[degree + l];
            let minus = coeffs[degree - l];
            let tol = 1e-14 * (1.0 + plus.norm());
            if (plus - minus.conj()).norm() > tol {
                return Err(Error::invalid(
                    "profile",
                    format!("û({l}) and û(-{l}) are not complex conjugates"),
                ));
            }
        }
        Ok(Self { coeffs, degree })
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    /// `û(ℓ)`, zero outside the stored range.
    pub fn coefficient(&self, ell: i64) -> Complex64 {
        if ell.unsigned_abs() as usize > self.degree {
            return Complex64::new(0.0, 0.0);
        }
        self.coeffs[(ell + self.degree as i64) as usize]
    }

    /// Nonzero coefficients as `(ℓ, û(ℓ))`.
    pub fn nonzero_coefficients(&self) -> impl Iterator<Item = (i64, Complex64)> + '_ {
        let d = self.degree as i64;
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| c.norm() != 0.0)
            .map(move |(i, &c)| (i as i64 - d, c))
    }

    fn eval_with(&self, y: f64, factor: impl Fn(f64) -> f64) -> f64 {
        self.nonzero_coefficients()
            .map(|(l, c)| {
                let phase = Complex64::from_polar(1.0, l as f64 * y);
                factor(l as f64) * (c * phase).re
            })
            .sum()
    }

    pub fn value(&self, y: f64) -> f64 {
        self.eval_with(y, |_| 1.0)
    }

    pub fn second_derivative(&self, y: f64) -> f64 {
        self.eval_with(y, |l| -l * l)
    }
}
