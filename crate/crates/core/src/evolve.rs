//! Time evolution of the linearized QG equation at fixed `k`.
//!
//! With `ψ = e^{ikx} φ(y, t)` and the cosine background, the Fourier
//! coefficients obey `dφ̂/dt = −ik M φ̂`, where `M` is the truncated operator
//! from [`oracle::fourier_operator`]. A growing solution grows like
//! `exp(k·Im(c) t)`, so the measured slope of `log‖φ̂‖` is an estimate of the
//! growth rate that uses no eigensolver at all.
//!
//! The tracked norm weights `φ̂(ℓ)` by `|w(ℓ)|` (see [`crate::model::weight`]).
//! In those variables the cosine operator is symmetric, so for `k >= 1` the
//! norm is conserved and the measured slope is zero up to RK4 error.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::model::{FlowParams, Profile};
use crate::oracle;

/// Largest `dt · ρ` accepted; classical RK4 is stable on the imaginary axis
/// up to `2√2`.
pub const RK4_STABILITY_LIMIT: f64 = 2.8;
pub const RENORM_INTERVAL: usize = 50;
pub const DEFAULT_WINDOW: f64 = 0.5;
/// Transient amplification tolerated above the growth-rate ceiling before a
/// run is declared numerically unstable.
const TRANSIENT_ALLOWANCE: f64 = 1e3;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvolveOptions {
    pub truncation: usize,
    pub dt: f64,
    pub t_final: f64,
    pub seed: u64,
    /// Fraction of the samples (from the end) used by the slope fit.
    pub window_fraction: f64,
}

impl EvolveOptions {
    pub fn new(truncation: usize, dt: f64, t_final: f64, seed: u64) -> Self {
        Self {
            truncation,
            dt,
            t_final,
            seed,
            window_fraction: DEFAULT_WINDOW,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvolutionRun {
    pub params: FlowParams,
    pub truncation: usize,
    pub dt: f64,
    pub t_final: f64,
    /// `(t, log‖φ̂(t)‖)` with renormalizations folded back in.
    pub norm_series: Vec<(f64, f64)>,
    pub fitted_rate: f64,
    pub fit_residual: f64,
}

/// RK4 stepper for `dφ̂/dt = −ik M φ̂` on modes `−N..=N`.
#[derive(Debug, Clone)]
pub struct Evolver {
    params: FlowParams,
    truncation: usize,
    dt: f64,
    rows: Vec<Vec<(usize, Complex64)>>,
    weights: Vec<f64>,
    radius_bound: f64,
    scratch: [Vec<Complex64>; 5],
}

impl Evolver {
    pub fn new(params: FlowParams, truncation: usize, dt: f64) -> Result<Self> {
        if truncation < 1 {
            return Err(Error::invalid("truncation", "must be >= 1"));
        }
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::invalid("dt", format!("must be finite and > 0, got {dt}")));
        }
        let dense = oracle::fourier_operator(&Profile::cosine(), &params, truncation);
        let dim = dense.nrows();
        let factor = Complex64::new(0.0, -params.k());
        let rows: Vec<Vec<(usize, Complex64)>> = (0..dim)
            .map(|i| {
                (0..dim)
                    .filter(|&j| dense[(i, j)].norm() != 0.0)
                    .map(|j| (j, factor * dense[(i, j)]))
                    .collect()
            })
            .collect();
        let radius_bound = rows
            .iter()
            .map(|row| row.iter().map(|(_, v)| v.norm()).sum::<f64>())
            .fold(0.0, f64::max);
        if dt * radius_bound >= RK4_STABILITY_LIMIT {
            return Err(Error::StepUnstable {
                reason: format!(
                    "dt·ρ = {} >= {RK4_STABILITY_LIMIT} (ρ <= {radius_bound})",
                    dt * radius_bound
                ),
            });
        }
        let n = truncation as i64;
        let weights = (-n..=n)
            .map(|ell| {
                let l = ell as f64;
                (params.shifted_numerator(l).abs() * params.denominator(l)).sqrt()
            })
            .collect();
        Ok(Self {
            params,
            truncation,
            dt,
            rows,
            weights,
            radius_bound,
            scratch: std::array::from_fn(|_| vec![Complex64::new(0.0, 0.0); dim]),
        })
    }

    pub fn params(&self) -> &FlowParams {
        &self.params
    }

    pub fn dimension(&self) -> usize {
        self.rows.len()
    }

    pub fn truncation(&self) -> usize {
        self.truncation
    }

    /// Row-sum bound on the spectral radius of `−ik M`.
    pub fn radius_bound(&self) -> f64 {
        self.radius_bound
    }

    fn apply(rows: &[Vec<(usize, Complex64)>], x: &[Complex64], out: &mut [Complex64]) {
        for (o, row) in out.iter_mut().zip(rows) {
            *o = row.iter().map(|&(j, v)| v * x[j]).sum();
        }
    }

    /// One classical RK4 step in place.
    pub fn step(&mut self, state: &mut [Complex64]) {
        let h = self.dt;
        let [k1, k2, k3, k4, tmp] = &mut self.scratch;
        Self::apply(&self.rows, state, k1);
        for ((t, s), k) in tmp.iter_mut().zip(state.iter()).zip(k1.iter()) {
            *t = s + 0.5 * h * k;
        }
        Self::apply(&self.rows, tmp, k2);
        for ((t, s), k) in tmp.iter_mut().zip(state.iter()).zip(k2.iter()) {
            *t = s + 0.5 * h * k;
        }
        Self::apply(&self.rows, tmp, k3);
        for ((t, s), k) in tmp.iter_mut().zip(state.iter()).zip(k3.iter()) {
            *t = s + h * k;
        }
        Self::apply(&self.rows, tmp, k4);
        for (i, s) in state.iter_mut().enumerate() {
            *s += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
    }

    /// `(Σ |w(ℓ)|² |φ̂(ℓ)|²)^{1/2}`
    pub fn weighted_norm(&self, state: &[Complex64]) -> f64 {
        state
            .iter()
            .zip(&self.weights)
            .map(|(s, w)| w * w * s.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }
}

/// Deterministic pseudo-random initial coefficients with `e^{−|ℓ|/2}` decay.
pub fn initial_condition(truncation: usize, seed: u64) -> Vec<Complex64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = truncation as i64;
    (-n..=n)
        .map(|ell| {
            let re: f64 = rng.gen_range(-1.0..1.0);
            let im: f64 = rng.gen_range(-1.0..1.0);
            Complex64::new(re, im) * (-(ell.abs() as f64) / 2.0).exp()
        })
        .collect()
}

pub fn integrate(params: FlowParams, truncation: usize, dt: f64, t_final: f64, seed: u64) -> Result<EvolutionRun> {
    integrate_with(params, &EvolveOptions::new(truncation, dt, t_final, seed))
}

pub fn integrate_with(params: FlowParams, options: &EvolveOptions) -> Result<EvolutionRun> {
    let initial = initial_condition(options.truncation, options.seed);
    integrate_from(params, options, initial)
}

/// Runs from an explicit initial state (length `2N+1`, index `ℓ + N`).
/// `options.seed` is ignored.
pub fn integrate_from(params: FlowParams, options: &EvolveOptions, mut state: Vec<Complex64>) -> Result<EvolutionRun> {
    if options.truncation < 32 {
        return Err(Error::invalid("truncation", format!("must be >= 32, got {}", options.truncation)));
    }
    if !(options.t_final > 0.0 && options.t_final.is_finite()) {
        return Err(Error::invalid("t_final", format!("must be finite and > 0, got {}", options.t_final)));
    }
    let mut evolver = Evolver::new(params, options.truncation, options.dt)?;
    if state.len() != evolver.dimension() {
        return Err(Error::invalid(
            "initial",
            format!("expected {} coefficients, got {}", evolver.dimension(), state.len()),
        ));
    }
    let steps = (options.t_final / options.dt).round() as usize;
    let interval = RENORM_INTERVAL.min((steps / 64).max(1));

    // Physical growth is capped by k·max|u| = k for the cosine profile.
    let rate_ceiling = params.k();
    let initial_norm = evolver.weighted_norm(&state);
    if !(initial_norm > 0.0 && initial_norm.is_finite()) {
        return Err(Error::DegenerateFit {
            reason: "initial condition has zero or non-finite norm".into(),
        });
    }
    state.iter_mut().for_each(|s| *s /= initial_norm);
    let mut log_norm = initial_norm.ln();
    let mut series = vec![(0.0, log_norm)];

    for step in 1..=steps {
        evolver.step(&mut state);
        if step % interval == 0 || step == steps {
            let t = step as f64 * options.dt;
            let norm = evolver.weighted_norm(&state);
            if !norm.is_finite() || norm == 0.0 {
                return Err(Error::StepUnstable {
                    reason: format!("norm became {norm} at t = {t}"),
                });
            }
            log_norm += norm.ln();
            let excess = log_norm - series[0].1 - rate_ceiling * t;
            if excess > TRANSIENT_ALLOWANCE.ln() {
                return Err(Error::StepUnstable {
                    reason: format!("norm grew e^{excess:.3} beyond the k·t ceiling by t = {t}"),
                });
            }
            state.iter_mut().for_each(|s| *s /= norm);
            series.push((t, log_norm));
        }
    }

    let (fitted_rate, fit_residual) = fit_growth(&series, options.window_fraction)?;
    Ok(EvolutionRun {
        params,
        truncation: options.truncation,
        dt: options.dt,
        t_final: steps as f64 * options.dt,
        norm_series: series,
        fitted_rate,
        fit_residual,
    })
}

/// Least-squares slope of `log‖·‖` against `t` over the last
/// `window_fraction` of the samples, with the RMS deviation from the line.
pub fn fit_growth(series: &[(f64, f64)], window_fraction: f64) -> Result<(f64, f64)> {
    if series.len() < 16 {
        return Err(Error::invalid("series", format!("need >= 16 samples, got {}", series.len())));
    }
    if !(window_fraction > 0.0 && window_fraction <= 1.0) {
        return Err(Error::invalid("window_fraction", format!("must lie in (0, 1], got {window_fraction}")));
    }
    let count = ((series.len() as f64 * window_fraction).ceil() as usize).clamp(2, series.len());
    let tail = &series[series.len() - count..];
    if tail.iter().any(|(t, y)| !t.is_finite() || !y.is_finite()) {
        return Err(Error::DegenerateFit {
            reason: "non-finite samples (zero norm?)".into(),
        });
    }
    let n = count as f64;
    let t_mean = tail.iter().map(|p| p.0).sum::<f64>() / n;
    let y_mean = tail.iter().map(|p| p.1).sum::<f64>() / n;
    let stt: f64 = tail.iter().map(|p| (p.0 - t_mean).powi(2)).sum();
    if stt == 0.0 {
        return Err(Error::DegenerateFit {
            reason: "all samples share one time".into(),
        });
    }
    let sty: f64 = tail.iter().map(|p| (p.0 - t_mean) * (p.1 - y_mean)).sum();
    let slope = sty / stt;
    let intercept = y_mean - slope * t_mean;
    let rms = (tail
        .iter()
        .map(|p| (p.1 - intercept - slope * p.0).powi(2))
        .sum::<f64>()
        / n)
        .sqrt();
    Ok((slope, rms))
}
