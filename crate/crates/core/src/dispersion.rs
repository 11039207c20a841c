//! Per-wave-number stability results: the converged negative root `r`, the
//! eigenvalues `±i√r`, the growth rate `k√r` and its monotone lower bounds,
//! and reconstruction of the unstable eigenfunction.

use std::borrow::Cow;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::{weight, FlowParams, JacobiCoefficients};
use crate::orthopoly::{negative_root, NegativeRootTrace};

pub const DEFAULT_TOL: f64 = 1e-10;
pub const DEFAULT_N_MAX: usize = 1 << 14;
/// First order tried by the doubling iteration.
pub const N_START: usize = 4;
/// Bound on the relative residual of a reconstructed eigenfunction.
pub const RESIDUAL_LIMIT: f64 = 1e-8;

/// Bisection width used for individual roots; the iteration stops earlier
/// once the bracket can no longer be halved in floating point.
const ROOT_TOL: f64 = 1e-16;

#[derive(Debug, Clone, PartialEq)]
pub struct DispersionPoint {
    pub params: FlowParams,
    pub stable: bool,
    pub r_trace: NegativeRootTrace,
    /// `(+i√r, −i√r)` for unstable points.
    pub c: Option<(Complex64, Complex64)>,
    /// `k·Im(c)`, zero when stable.
    pub growth_rate: f64,
    pub n_used: usize,
    /// `k·√r_{n_used}`.
    pub lower_bound: f64,
}

impl DispersionPoint {
    fn stable(params: FlowParams) -> Self {
        Self {
            params,
            stable: true,
            r_trace: NegativeRootTrace::default(),
            c: None,
            growth_rate: 0.0,
            n_used: 0,
            lower_bound: 0.0,
        }
    }

    /// Converged `r`, absent for stable points.
    pub fn r(&self) -> Option<f64> {
        self.r_trace.r_limit
    }

    /// Growth-rate lower bound `k√r_n` at an order visited by the iteration.
    pub fn lower_bound_at(&self, n: usize) -> Option<f64> {
        self.r_trace.at(n).map(|r| self.params.k() * r.sqrt())
    }
}

/// Growth-rate lower bound `k√r_n` from the `n×n` truncation alone.
pub fn growth_lower_bound(coeffs: &JacobiCoefficients, n: usize) -> Result<Option<f64>> {
    let k = coeffs.params().k();
    Ok(negative_root(coeffs, n, ROOT_TOL)?.map(|r| k * r.sqrt()))
}

pub fn solve_dispersion(params: FlowParams, tol: f64, n_max: usize) -> Result<DispersionPoint> {
    let mut coeffs = JacobiCoefficients::new(params);
    solve_dispersion_with(&mut coeffs, tol, n_max)
}

/// As [`solve_dispersion`], extending a caller-owned coefficient table so
/// later work (eigenfunctions, oracles) can reuse it.
pub fn solve_dispersion_with(
    coeffs: &mut JacobiCoefficients,
    tol: f64,
    n_max: usize,
) -> Result<DispersionPoint> {
    if !(tol > 0.0) {
        return Err(Error::invalid("tol", format!("must be > 0, got {tol}")));
    }
    if n_max < N_START {
        return Err(Error::invalid("n_max", format!("must be >= {N_START}, got {n_max}")));
    }
    let params = *coeffs.params();
    if !params.in_unstable_band() {
        return Ok(DispersionPoint::stable(params));
    }

    let mut trace = NegativeRootTrace::default();
    let mut n = N_START;
    coeffs.extend_to(n);
    let mut previous = negative_root(coeffs, n, ROOT_TOL)?;
    if let Some(r) = previous {
        trace.push(n, r);
    }
    let mut last_delta = f64::INFINITY;
    while 2 * n <= n_max {
        n *= 2;
        coeffs.extend_to(n);
        let current = negative_root(coeffs, n, ROOT_TOL)?;
        if let Some(r) = current {
            trace.push(n, r);
        }
        if let (Some(p), Some(q)) = (previous, current) {
            last_delta = q - p;
            if last_delta < tol {
                trace.converged = true;
                trace.r_limit = Some(q);
                let k = params.k();
                let im = q.sqrt();
                return Ok(DispersionPoint {
                    params,
                    stable: false,
                    r_trace: trace,
                    c: Some((Complex64::new(0.0, im), Complex64::new(0.0, -im))),
                    growth_rate: k * im,
                    n_used: n,
                    lower_bound: k * im,
                });
            }
        }
        previous = current;
    }
    match trace.last() {
        None => Err(Error::NoRootAtNmax {
            k: params.k(),
            n_max,
        }),
        Some((_, r_last)) => Err(Error::NotConverged {
            n_max,
            r_last,
            delta: last_delta,
        }),
    }
}

/// Solves every grid point independently (in parallel on the current rayon
/// pool); results keep the input order.
pub fn sweep(grid: &[FlowParams], tol: f64, n_max: usize) -> Vec<Result<DispersionPoint>> {
    grid.par_iter()
        .map(|&params| solve_dispersion(params, tol, n_max))
        .collect()
}

/// Fourier coefficients `f̂(ℓ)`, `|ℓ| <= range`, of an unstable mode.
#[derive(Debug, Clone, PartialEq)]
pub struct Eigenfunction {
    pub k: f64,
    pub c: Complex64,
    range: usize,
    coeffs: Vec<Complex64>,
    /// Relative residual of the cosine eigenvalue relation over `|ℓ| < range`.
    pub residual: f64,
}

impl Eigenfunction {
    pub fn range(&self) -> usize {
        self.range
    }

    pub fn get(&self, ell: i64) -> Complex64 {
        if ell.unsigned_abs() as usize > self.range {
            return Complex64::new(0.0, 0.0);
        }
        self.coeffs[(ell + self.range as i64) as usize]
    }

    /// `(ℓ, f̂(ℓ))` for `ℓ = −range..=range`.
    pub fn iter(&self) -> impl Iterator<Item = (i64, Complex64)> + '_ {
        let offset = self.range as i64;
        self.coeffs.iter().enumerate().map(move |(i, &v)| (i as i64 - offset, v))
    }
}

/// Largest residual of
/// `c f̂(ℓ) = ½((ℓ+1)²+k²−1)/(ℓ²+k²+1/Bu) f̂(ℓ+1) + ½((ℓ−1)²+k²−1)/(ℓ²+k²+1/Bu) f̂(ℓ−1)`
/// over `|ℓ| < range`, relative to `|c|·max|f̂|`.
pub fn cosine_relation_residual(
    params: &FlowParams,
    c: Complex64,
    range: usize,
    f: impl Fn(i64) -> Complex64,
) -> f64 {
    let l_max = range as i64 - 1;
    let mut worst = 0.0f64;
    let mut scale = 0.0f64;
    for ell in -(l_max + 1)..=(l_max + 1) {
        scale = scale.max(f(ell).norm());
    }
    for ell in -l_max..=l_max {
        let l = ell as f64;
        let den = params.denominator(l);
        let up = 0.5 * params.shifted_numerator(l + 1.0) / den;
        let down = 0.5 * params.shifted_numerator(l - 1.0) / den;
        let res = c * f(ell) - up * f(ell + 1) - down * f(ell - 1);
        worst = worst.max(res.norm());
    }
    worst / (c.norm() * scale)
}

/// Rebuilds `f̂(ℓ)` for `|ℓ| <= range` from the eigenvector of the Jacobi
/// matrix at `c² = −r`.
///
/// The eigenvector is taken from a truncation of order at least
/// `max(n_used, range/2 + 64)`, computed by backward recursion (stable for
/// the decaying solution) at that truncation's own negative root. The result
/// has unit `ℓ²` norm with `f̂(1)` real and positive.
pub fn reconstruct_eigenfunction(
    point: &DispersionPoint,
    coeffs: &JacobiCoefficients,
    range: usize,
) -> Result<Eigenfunction> {
    if range < 4 {
        return Err(Error::invalid("range", format!("must be >= 4, got {range}")));
    }
    if point.stable || point.c.is_none() {
        return Err(Error::NotUnstable { k: point.params.k() });
    }
    if coeffs.params() != &point.params {
        return Err(Error::invalid("coeffs", "parameters differ from the dispersion point"));
    }
    let params = point.params;
    let depth = point.n_used.max(range / 2 + 64);
    let coeffs: Cow<'_, JacobiCoefficients> = if coeffs.order() >= depth {
        Cow::Borrowed(coeffs)
    } else {
        let mut owned = coeffs.clone();
        owned.extend_to(depth);
        Cow::Owned(owned)
    };
    let r = negative_root(&coeffs, depth + 1, ROOT_TOL)?
        .ok_or(Error::NotUnstable { k: params.k() })?;
    let x = -r;
    let (a, b, z) = (coeffs.a(), coeffs.b(), coeffs.z());

    let mut v = vec![0.0f64; depth + 2];
    v[depth] = 1.0;
    for j in (1..=depth).rev() {
        let upper = if j < depth { a[j] * v[j + 1] } else { 0.0 };
        v[j - 1] = ((x - b[j]) * v[j] - upper) / a[j - 1];
        if v[j - 1].abs() > 1e200 {
            v[j - 1..].iter_mut().for_each(|e| *e *= 1e-200);
        }
    }
    let v0 = v[0];
    v.iter_mut().for_each(|e| *e /= v0);

    let c = Complex64::new(0.0, r.sqrt());
    let mut half = Vec::with_capacity(range + 1);
    for ell in 0..=range {
        let g = if ell % 2 == 1 {
            Complex64::new(v[(ell - 1) / 2], 0.0)
        } else if ell == 0 {
            2.0 * z[0] * v[0] / c
        } else {
            let j = ell / 2;
            (z[ell - 1] * v[j - 1] + z[ell] * v[j]) / c
        };
        half.push(g / weight(&params, ell as i64)?);
    }

    let mut full: Vec<Complex64> = half.iter().rev().chain(half.iter().skip(1)).copied().collect();
    let norm = full.iter().map(|e| e.norm_sqr()).sum::<f64>().sqrt();
    let f1 = half[1];
    let phase = f1 / f1.norm();
    full.iter_mut().for_each(|e| *e /= phase * norm);

    let offset = range as i64;
    let residual = cosine_relation_residual(&params, c, range, |ell| {
        if ell.abs() > offset {
            Complex64::new(0.0, 0.0)
        } else {
            full[(ell + offset) as usize]
        }
    });
    if !(residual < RESIDUAL_LIMIT) {
        return Err(Error::ResidualTooLarge {
            residual,
            limit: RESIDUAL_LIMIT,
        });
    }
    Ok(Eigenfunction {
        k: params.k(),
        c,
        range,
        coeffs: full,
        residual,
    })
}
