//! Necessary-condition checks that apply to any trigonometric-polynomial
//! profile: the modified inflection criterion `u'' − u/Bu = 0` and the
//! centered semicircle bound `|c| <= max|u|`.

use std::f64::consts::TAU;

use num_complex::Complex64;

use crate::dispersion::DispersionPoint;
use crate::error::{Error, Result};
use crate::model::Profile;
use crate::orthopoly::MAX_BISECTIONS;

pub const DEFAULT_SAMPLES: usize = 1024;
/// Slack on the semicircle radius.
pub const HOWARD_SLACK: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct ProfileDiagnostics {
    pub has_modified_inflection: bool,
    /// Zeros of `u'' − u·(1/Bu)` in `[0, 2π)`, ascending.
    pub inflection_points: Vec<f64>,
    /// `max_y |u(y)|`, the semicircle radius for a centered profile.
    pub howard_radius: f64,
    pub value_range: (f64, f64),
}

fn bisect_zero(g: &impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    let mut g_lo = g(lo);
    for _ in 0..MAX_BISECTIONS {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let g_mid = g(mid);
        if g_mid == 0.0 {
            return mid;
        }
        if (g_mid < 0.0) == (g_lo < 0.0) {
            lo = mid;
            g_lo = g_mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Locates zeros of `g(y) = u''(y) − u(y)·inv_bu` by sign changes on a uniform
/// grid of `samples` points followed by bisection.
pub fn modified_inflection(profile: &Profile, inv_bu: f64, samples: usize) -> Result<ProfileDiagnostics> {
    if samples < 64 {
        return Err(Error::invalid("samples", format!("must be >= 64, got {samples}")));
    }
    if !(inv_bu >= 0.0 && inv_bu.is_finite()) {
        return Err(Error::invalid("inv_bu", format!("must be finite and >= 0, got {inv_bu}")));
    }
    let g = |y: f64| profile.second_derivative(y) - profile.value(y) * inv_bu;
    let grid: Vec<f64> = (0..=samples).map(|i| TAU * i as f64 / samples as f64).collect();
    let values: Vec<f64> = grid.iter().map(|&y| g(y)).collect();

    let mut points = Vec::new();
    for i in 0..samples {
        let (g0, g1) = (values[i], values[i + 1]);
        if g0 == 0.0 {
            points.push(grid[i]);
        } else if g1 != 0.0 && (g0 < 0.0) != (g1 < 0.0) {
            points.push(bisect_zero(&g, grid[i], grid[i + 1]));
        }
    }

    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    let fine = samples.max(4096);
    for i in 0..fine {
        let u = profile.value(TAU * i as f64 / fine as f64);
        lo = lo.min(u);
        hi = hi.max(u);
    }
    Ok(ProfileDiagnostics {
        has_modified_inflection: !points.is_empty(),
        inflection_points: points,
        howard_radius: lo.abs().max(hi.abs()),
        value_range: (lo, hi),
    })
}

/// True iff every non-real eigenvalue lies within `radius` of the origin.
pub fn howard_check_eigenvalues(eigenvalues: &[Complex64], radius: f64) -> bool {
    eigenvalues
        .iter()
        .filter(|c| c.im != 0.0)
        .all(|c| c.norm() <= radius + HOWARD_SLACK)
}

/// [`howard_check_eigenvalues`] over every unstable dispersion point.
pub fn howard_check(points: &[DispersionPoint], radius: f64) -> bool {
    let eigenvalues: Vec<Complex64> = points
        .iter()
        .filter_map(|p| p.c)
        .flat_map(|(up, down)| [up, down])
        .collect();
    howard_check_eigenvalues(&eigenvalues, radius)
}
