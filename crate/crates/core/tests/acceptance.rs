//! Acceptance suite. Runs without the libtest harness so every criterion
//! prints exactly one PASS/FAIL line regardless of output capture; the
//! process exits nonzero if any criterion fails.

mod common;

use std::process::ExitCode;
use std::time::{Duration, Instant};

use num_complex::Complex64;
use shear_spectrum::diagnostics::{modified_inflection, DEFAULT_SAMPLES};
use shear_spectrum::oracle::{jacobi_truncation_eigs, stieltjes_pole, truncated_spectrum, CfOffset, FROZEN_OFFSET};
use shear_spectrum::orthopoly::{negative_root, ratio_asymptote, root_spectrum};
use shear_spectrum::{evolve, solve_dispersion, FlowParams, JacobiCoefficients, Profile};

const TOL: f64 = 1e-10;
const N_MAX: usize = 1 << 14;
const ROOT_TOL: f64 = 1e-16;

fn params(k: f64, inv_bu: f64) -> FlowParams {
    FlowParams::new(k, inv_bu).expect("valid parameters")
}

fn coeffs(k: f64, inv_bu: f64, n: usize) -> JacobiCoefficients {
    let mut c = JacobiCoefficients::new(params(k, inv_bu));
    c.extend_to(n);
    c
}

/// Outcome of one criterion plus the eigenvalues it produced, which feed the
/// semicircle check.
struct Outcome {
    failures: Vec<String>,
    detail: String,
}

impl Outcome {
    fn new() -> Self {
        Self {
            failures: Vec::new(),
            detail: String::new(),
        }
    }

    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        if !ok {
            self.failures.push(what());
        }
    }
}

fn instability_boundary(eigs: &mut Vec<Complex64>) -> Outcome {
    let mut out = Outcome::new();
    let start = Instant::now();
    for inv_bu in [0.0, 0.01, 1.0] {
        for i in 1..=9 {
            let k = i as f64 / 10.0;
            match solve_dispersion(params(k, inv_bu), TOL, N_MAX) {
                Ok(p) => {
                    out.check(!p.stable, || format!("k={k} inv_bu={inv_bu} reported stable"));
                    if let Some((up, down)) = p.c {
                        eigs.extend([up, down]);
                    }
                }
                Err(e) => out.failures.push(format!("k={k} inv_bu={inv_bu}: {e}")),
            }
        }
        for k in [1.0, 1.2, 1.5, 2.0] {
            match solve_dispersion(params(k, inv_bu), TOL, N_MAX) {
                Ok(p) => out.check(p.stable, || format!("k={k} inv_bu={inv_bu} reported unstable")),
                Err(e) => out.failures.push(format!("k={k} inv_bu={inv_bu}: {e}")),
            }
        }
    }
    let elapsed = start.elapsed();
    out.check(elapsed < Duration::from_secs(10), || format!("runtime {elapsed:?} >= 10 s"));
    out.detail = format!("39 points in {:.2} s", elapsed.as_secs_f64());
    out
}

fn monotone_convergence() -> Outcome {
    let mut out = Outcome::new();
    let mut worst_tail: f64 = 0.0;
    for k in [0.3, 0.5, 0.7] {
        for inv_bu in [0.0, 1.0] {
            let c = coeffs(k, inv_bu, 200);
            let mut previous: Option<f64> = None;
            let mut r100 = None;
            let mut r200 = None;
            for n in 1..=200 {
                let r = match negative_root(&c, n, ROOT_TOL) {
                    Ok(r) => r,
                    Err(e) => {
                        out.failures.push(format!("k={k} inv_bu={inv_bu} n={n}: {e}"));
                        break;
                    }
                };
                match (previous, r) {
                    (Some(_), None) => out.failures.push(format!("k={k} inv_bu={inv_bu}: root vanished at n={n}")),
                    (Some(p), Some(q)) if q < p - 1e-14 => {
                        out.failures.push(format!("k={k} inv_bu={inv_bu}: r_{n} = {q} < r_{} = {p}", n - 1))
                    }
                    _ => {}
                }
                if r.is_some() {
                    previous = r;
                }
                if n == 100 {
                    r100 = r;
                }
                if n == 200 {
                    r200 = r;
                }
            }
            match (r100, r200) {
                (Some(a), Some(b)) => {
                    worst_tail = worst_tail.max(b - a);
                    out.check(b - a < 1e-8, || format!("k={k} inv_bu={inv_bu}: r_200 - r_100 = {:e}", b - a));
                }
                _ => out.failures.push(format!("k={k} inv_bu={inv_bu}: no root at n=100/200")),
            }
        }
    }
    out.detail = format!("max r_200 - r_100 = {worst_tail:.2e}");
    out
}

fn interlacing() -> Outcome {
    let mut out = Outcome::new();
    let mut worst: f64 = 0.0;
    for k in [0.3, 0.5, 0.7] {
        for inv_bu in [0.0, 1.0] {
            let c = coeffs(k, inv_bu, 21);
            let spectra: Vec<Vec<f64>> = (1..=21).map(|n| root_spectrum(&c, n, ROOT_TOL).expect("spectrum")).collect();
            for n in 1..=20 {
                if let Err(e) = common::certify_strict_interlacing(&c, n) {
                    out.failures.push(format!("k={k} inv_bu={inv_bu}: {e}"));
                }
            }
            for n in 1..=12 {
                let dense = jacobi_truncation_eigs(&c, n).expect("dense eigenvalues");
                let sturm = &spectra[n - 1];
                let diff = dense.iter().zip(sturm).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
                worst = worst.max(diff);
                out.check(dense.len() == sturm.len() && diff < 1e-9, || {
                    format!("k={k} inv_bu={inv_bu} n={n}: dense/Sturm mismatch {diff:e}")
                });
            }
        }
    }
    out.detail = format!("exact certificates for n = 1..20, max dense/Sturm difference {worst:.2e}");
    out
}

fn three_way(eigs: &mut Vec<Complex64>) -> Outcome {
    let mut out = Outcome::new();
    let start = Instant::now();
    let mut details = Vec::new();
    for inv_bu in [0.0, 1.0] {
        let p = params(0.5, inv_bu);
        let poly = match solve_dispersion(p, TOL, N_MAX) {
            Ok(d) => d.growth_rate,
            Err(e) => {
                out.failures.push(format!("inv_bu={inv_bu} polynomial: {e}"));
                continue;
            }
        };
        let spec = match truncated_spectrum(&Profile::cosine(), &p, 256) {
            Ok(s) => {
                if let Some(c) = s.dominant() {
                    eigs.push(c);
                }
                0.5 * s.max_imag()
            }
            Err(e) => {
                out.failures.push(format!("inv_bu={inv_bu} spectrum: {e}"));
                continue;
            }
        };
        let evo = match evolve::integrate(p, 256, 0.05, 200.0, 1) {
            Ok(run) => run.fitted_rate,
            Err(e) => {
                out.failures.push(format!("inv_bu={inv_bu} evolution: {e}"));
                continue;
            }
        };
        let rel = |a: f64, b: f64| (a - b).abs() / a.abs().max(b.abs());
        let (d_ps, d_pe, d_se) = (rel(poly, spec), rel(poly, evo), rel(spec, evo));
        out.check(d_ps < 1e-6, || format!("inv_bu={inv_bu}: polynomial vs spectrum {d_ps:e}"));
        out.check(d_pe < 1e-3, || format!("inv_bu={inv_bu}: polynomial vs evolution {d_pe:e}"));
        out.check(d_se < 1e-3, || format!("inv_bu={inv_bu}: spectrum vs evolution {d_se:e}"));
        details.push(format!("inv_bu={inv_bu}: {d_ps:.1e}/{d_pe:.1e}/{d_se:.1e}"));
    }
    let elapsed = start.elapsed();
    out.check(elapsed < Duration::from_secs(60), || format!("runtime {elapsed:?} >= 60 s"));
    out.detail = format!("{} in {:.1} s", details.join(", "), elapsed.as_secs_f64());
    out
}

fn hand_anchor() -> Outcome {
    let mut out = Outcome::new();
    let c = coeffs(0.5, 0.0, 1);
    let z0sq = (c.z()[0] * c.z()[0]).re;
    let z1sq = (c.z()[1] * c.z()[1]).re;
    out.check((z0sq + 0.15).abs() < 1e-12, || format!("z_0^2 = {z0sq}"));
    out.check((z1sq - 0.0382353).abs() < 1e-6, || format!("z_1^2 = {z1sq}"));
    match negative_root(&c, 1, ROOT_TOL) {
        Ok(Some(r1)) => {
            out.check((r1 - 0.2617647).abs() < 1e-6, || format!("r_1 = {r1}"));
            out.check((r1 + c.b()[0]).abs() < 1e-14, || format!("r_1 = {r1} != |b_0| = {}", c.b()[0].abs()));
            out.detail = format!("r_1 = {r1:.10}");
        }
        other => out.failures.push(format!("r_1 missing: {other:?}")),
    }
    out
}

fn burger_monotonicity(eigs: &mut Vec<Complex64>) -> Outcome {
    let mut out = Outcome::new();
    let mut rows = Vec::new();
    for k in [0.2, 0.5, 0.8] {
        let rates: Vec<f64> = [0.01, 1.0, 4.0]
            .iter()
            .filter_map(|&inv_bu| match solve_dispersion(params(k, inv_bu), TOL, N_MAX) {
                Ok(p) => {
                    if let Some((up, down)) = p.c {
                        eigs.extend([up, down]);
                    }
                    Some(p.growth_rate)
                }
                Err(e) => {
                    out.failures.push(format!("k={k} inv_bu={inv_bu}: {e}"));
                    None
                }
            })
            .collect();
        if rates.len() == 3 {
            out.check(rates[0] > rates[1] && rates[1] > rates[2], || format!("k={k}: rates {rates:?} not strictly decreasing"));
            rows.push(format!("k={k}: {:.4} > {:.4} > {:.4}", rates[0], rates[1], rates[2]));
        }
    }
    out.detail = rows.join("; ");
    out
}

fn shifted_profile() -> Outcome {
    let mut out = Outcome::new();
    let profile = Profile::shifted_cosine(2.0);
    match truncated_spectrum(&profile, &params(0.5, 2.0), 128) {
        Ok(s) => {
            let im = s.max_abs_imag();
            out.check(im < 1e-8, || format!("max |Im c| = {im:e}"));
            out.detail = format!("max |Im c| = {im:.2e}");
        }
        Err(e) => out.failures.push(e.to_string()),
    }
    match modified_inflection(&profile, 2.0, DEFAULT_SAMPLES) {
        Ok(d) => out.check(!d.has_modified_inflection, || format!("inflection points {:?}", d.inflection_points)),
        Err(e) => out.failures.push(e.to_string()),
    }
    out
}

fn howard(eigs: &[Complex64]) -> Outcome {
    let mut out = Outcome::new();
    let unstable: Vec<&Complex64> = eigs.iter().filter(|c| c.im.abs() > 0.0).collect();
    out.check(!unstable.is_empty(), || "no unstable eigenvalues collected".into());
    for c in &unstable {
        out.check(c.norm() <= 1.0 + 1e-10, || format!("|c| = {} for c = {c}", c.norm()));
        out.check(c.re.abs() <= 1e-10, || format!("Re c = {:e} for c = {c}", c.re));
    }
    let max_abs = unstable.iter().map(|c| c.norm()).fold(0.0, f64::max);
    out.detail = format!("{} eigenvalues, max |c| = {max_abs:.6}", unstable.len());
    out
}

fn asymptotics() -> Outcome {
    let mut out = Outcome::new();
    // Limits a -> 1/4, b -> 1/2; the ratio p_{n+1}/p_n at z solves
    // a t^2 - (z - b) t + a = 0 and takes the root outside the unit circle.
    let (a_inf, b_inf, z): (f64, f64, f64) = (0.25, 0.5, -2.0);
    let disc = ((z - b_inf) * (z - b_inf) - 4.0 * a_inf * a_inf).sqrt();
    let closed = [(z - b_inf + disc) / (2.0 * a_inf), (z - b_inf - disc) / (2.0 * a_inf)]
        .into_iter()
        .fold(0.0f64, |acc, t| if t.abs() > acc.abs() { t } else { acc });
    let mut worst: f64 = 0.0;
    for inv_bu in [0.0, 1.0] {
        let c = coeffs(0.5, inv_bu, 501);
        let (a200, b200) = (c.a()[200], c.b()[200]);
        out.check((a200 - 0.25).abs() < 1e-3, || format!("inv_bu={inv_bu}: a_200 = {a200}"));
        out.check((b200 - 0.5).abs() < 1e-3, || format!("inv_bu={inv_bu}: b_200 = {b200}"));
        match ratio_asymptote(&c, z, 500) {
            Ok(ratio) => {
                let d = (ratio - closed).abs();
                worst = worst.max(d);
                out.check(d < 1e-3, || format!("inv_bu={inv_bu}: ratio {ratio} vs {closed}"));
            }
            Err(e) => out.failures.push(e.to_string()),
        }
    }
    out.detail = format!("closed form {closed:.6}, max ratio error {worst:.2e}");
    out
}

fn stieltjes() -> Outcome {
    let mut out = Outcome::new();
    out.check(FROZEN_OFFSET == CfOffset::Shifted, || format!("offset changed to {FROZEN_OFFSET:?}"));
    let r = match solve_dispersion(params(0.5, 0.0), TOL, N_MAX) {
        Ok(p) => p.r().expect("unstable"),
        Err(e) => {
            out.failures.push(e.to_string());
            return out;
        }
    };
    let c = coeffs(0.5, 0.0, 513);
    match stieltjes_pole(&c, 512, (-1.0, -1e-6)) {
        Ok(Some(pole)) => {
            let d = (pole.location + r).abs();
            out.check(d < 1e-6, || format!("pole {} vs -r = {}", pole.location, -r));
            out.detail = format!("pole {:.12}, |pole + r| = {d:.2e}", pole.location);
        }
        other => out.failures.push(format!("no pole: {other:?}")),
    }
    out
}

fn main() -> ExitCode {
    let mut eigs = Vec::new();
    let criteria: Vec<(&str, Outcome)> = vec![
        ("instability boundary", instability_boundary(&mut eigs)),
        ("monotone convergence", monotone_convergence()),
        ("interlacing and dense equivalence", interlacing()),
        ("three-way oracle agreement", three_way(&mut eigs)),
        ("hand-computed anchor r_1", hand_anchor()),
        ("Burger-number monotonicity", burger_monotonicity(&mut eigs)),
        ("shifted-profile stability", shifted_profile()),
    ];
    let mut criteria = criteria;
    criteria.push(("semicircle bound", howard(&eigs)));
    criteria.push(("asymptotic coefficients", asymptotics()));
    criteria.push(("Stieltjes pole", stieltjes()));

    let mut failed = 0;
    for (i, (name, outcome)) in criteria.iter().enumerate() {
        let status = if outcome.failures.is_empty() { "PASS" } else { "FAIL" };
        println!("criterion {:>2} {status}: {name} ({})", i + 1, outcome.detail);
        for f in &outcome.failures {
            println!("    {f}");
        }
        if !outcome.failures.is_empty() {
            failed += 1;
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
