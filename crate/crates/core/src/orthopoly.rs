//! Three-term recursion, Sturm counts and root isolation for the orthogonal
//! polynomials `p_n` of a Jacobi coefficient table.
//!
//! The roots of `p_n` are the eigenvalues of the `n×n` truncation of the
//! Jacobi matrix, so everything here works on the truncation through the
//! shifted `LDLᵀ` pivot sequence and never forms `p_n` itself.

use crate::error::{Error, Result};
use crate::model::JacobiCoefficients;

/// Bisection stops after this many halvings even if `tol` is not reached.
pub const MAX_BISECTIONS: usize = 200;

/// Default cap on the order accepted by [`root_spectrum`].
pub const SPECTRUM_CAP: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SturmCount {
    pub x: f64,
    /// Number of roots of `p_n` strictly below `x`.
    pub count_below: usize,
    pub sequence_length: usize,
}

/// Monotone sequence of negative-root magnitudes `r_n` at increasing orders.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct NegativeRootTrace {
    pub roots: Vec<f64>,
    pub n_values: Vec<usize>,
    pub converged: bool,
    pub r_limit: Option<f64>,
}

impl NegativeRootTrace {
    pub fn push(&mut self, n: usize, r: f64) {
        self.n_values.push(n);
        self.roots.push(r);
    }

    pub fn last(&self) -> Option<(usize, f64)> {
        Some((*self.n_values.last()?, *self.roots.last()?))
    }

    /// `r` at order `n`, if that order was evaluated.
    pub fn at(&self, n: usize) -> Option<f64> {
        let idx = self.n_values.iter().position(|&m| m == n)?;
        Some(self.roots[idx])
    }

    pub fn is_monotone(&self) -> bool {
        self.roots.windows(2).all(|w| w[1] >= w[0])
    }
}

/// Number of negative pivots of `T_n − x I`. Zero pivots are replaced by
/// `−tiny`.
fn pivots_below(a: &[f64], b: &[f64], n: usize, x: f64, tiny: f64) -> usize {
    let mut d = b[0] - x;
    if d == 0.0 {
        d = -tiny;
    }
    let mut count = usize::from(d < 0.0);
    for i in 1..n {
        d = (b[i] - x) - a[i - 1] * a[i - 1] / d;
        if d == 0.0 {
            d = -tiny;
        }
        count += usize::from(d < 0.0);
    }
    count
}

/// Evaluates Sturm counts of one truncation without re-validating inputs.
struct Counter<'a> {
    a: &'a [f64],
    b: &'a [f64],
    n: usize,
    tiny: f64,
}

impl<'a> Counter<'a> {
    fn new(coeffs: &'a JacobiCoefficients, n: usize) -> Result<Self> {
        coeffs.require_truncation(n)?;
        let scale = coeffs.scale(n).max(f64::MIN_POSITIVE);
        Ok(Self {
            a: coeffs.a(),
            b: coeffs.b(),
            n,
            tiny: f64::EPSILON * scale,
        })
    }

    fn below(&self, x: f64) -> usize {
        pivots_below(self.a, self.b, self.n, x, self.tiny)
    }

    /// Bisects for the smallest `x` in `[lo, hi]` with at least `index + 1`
    /// roots below it.
    fn isolate(&self, index: usize, mut lo: f64, mut hi: f64, tol: f64) -> f64 {
        for _ in 0..MAX_BISECTIONS {
            if hi - lo < tol {
                break;
            }
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.below(mid) > index {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        0.5 * (lo + hi)
    }
}

pub fn sturm_count(coeffs: &JacobiCoefficients, n: usize, x: f64) -> Result<SturmCount> {
    let counter = Counter::new(coeffs, n)?;
    Ok(SturmCount {
        x,
        count_below: counter.below(x),
        sequence_length: n,
    })
}

/// Magnitude `r_n` of the negative root of `p_n`, or `None` if `p_n` has no
/// negative root.
pub fn negative_root(coeffs: &JacobiCoefficients, n: usize, tol: f64) -> Result<Option<f64>> {
    if !(tol > 0.0) {
        return Err(Error::invalid("tol", format!("must be > 0, got {tol}")));
    }
    let counter = Counter::new(coeffs, n)?;
    match counter.below(0.0) {
        0 => Ok(None),
        1 => {
            let bound = coeffs.gershgorin_bound(n);
            let root = counter.isolate(0, -bound, 0.0, tol);
            Ok(Some(-root))
        }
        count => Err(Error::MultipleNegativeRoots { n, count }),
    }
}

/// All `n` roots of `p_n`, ascending. Intended for verification at small `n`.
pub fn root_spectrum(coeffs: &JacobiCoefficients, n: usize, tol: f64) -> Result<Vec<f64>> {
    root_spectrum_capped(coeffs, n, tol, SPECTRUM_CAP)
}

pub fn root_spectrum_capped(
    coeffs: &JacobiCoefficients,
    n: usize,
    tol: f64,
    cap: usize,
) -> Result<Vec<f64>> {
    if n > cap {
        return Err(Error::SpectrumCapExceeded { n, cap });
    }
    if !(tol > 0.0) {
        return Err(Error::invalid("tol", format!("must be > 0, got {tol}")));
    }
    let counter = Counter::new(coeffs, n)?;
    let bound = coeffs.gershgorin_bound(n);
    let mut roots = Vec::with_capacity(n);
    let mut lo = -bound;
    for index in 0..n {
        let root = counter.isolate(index, lo, bound, tol);
        roots.push(root);
        lo = root;
    }
    Ok(roots)
}

/// `p_n(z) / p_{n−1}(z)` through the ratio recursion
/// `ρ_m = (z − b_{m−1})/a_{m−1} − (a_{m−2}/a_{m−1})/ρ_{m−1}`, `ρ_1 = (z − b_0)/a_0`.
pub fn ratio_asymptote(coeffs: &JacobiCoefficients, z: f64, n: usize) -> Result<f64> {
    if n == 0 {
        return Err(Error::invalid("n", "must be >= 1"));
    }
    if coeffs.order() < n {
        return Err(Error::InsufficientCoefficients {
            needed: n,
            available: coeffs.order(),
        });
    }
    let (a, b) = (coeffs.a(), coeffs.b());
    let mut ratio = (z - b[0]) / a[0];
    for m in 2..=n {
        ratio = (z - b[m - 1]) / a[m - 1] - (a[m - 2] / a[m - 1]) / ratio;
    }
    Ok(ratio)
}

/// `p_0(x), …, p_n(x)` by forward recursion. Only well conditioned for small
/// `n` or for `x` where the polynomials grow.
pub fn polynomial_values(coeffs: &JacobiCoefficients, n: usize, x: f64) -> Result<Vec<f64>> {
    if coeffs.order() < n {
        return Err(Error::InsufficientCoefficients {
            needed: n,
            available: coeffs.order(),
        });
    }
    let (a, b) = (coeffs.a(), coeffs.b());
    let mut values = Vec::with_capacity(n + 1);
    values.push(1.0);
    if n >= 1 {
        values.push((x - b[0]) / a[0]);
    }
    for m in 1..n {
        let next = ((x - b[m]) * values[m] - a[m - 1] * values[m - 1]) / a[m];
        values.push(next);
    }
    Ok(values)
}

/// True when `outer` (roots of `p_{n+1}`) strictly interlaces `inner`
/// (roots of `p_n`), both ascending.
///
/// This compares `f64` values, so it reports `false` once the converged
/// isolated root is shared by both orders to full precision.
pub fn strictly_interlace(outer: &[f64], inner: &[f64]) -> bool {
    if outer.len() != inner.len() + 1 {
        return false;
    }
    inner
        .iter()
        .enumerate()
        .all(|(i, &x)| outer[i] < x && x < outer[i + 1])
}
