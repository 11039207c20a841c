//! Exact interlacing certificates.
//!
//! Once the isolated root has converged, consecutive truncations share it to
//! every printed digit, so comparing `f64` roots cannot show strict
//! interlacing. The coefficients themselves are exact dyadic rationals,
//! though, so the characteristic polynomials can be evaluated with big
//! integers at dyadic points and their Sturm counts are exact. Strict
//! interlacing of `p_n` and `p_{n+1}` is certified by exhibiting, for every
//! adjacent pair of roots, a dyadic point strictly between them.

#![allow(dead_code)]

use num_bigint::BigInt;
use num_traits::{Float, Signed, Zero};
use shear_spectrum::JacobiCoefficients;

/// `num / 2^scale`
#[derive(Debug, Clone)]
struct Dyadic {
    num: BigInt,
    scale: u32,
}

impl Dyadic {
    fn from_f64(x: f64) -> Self {
        let (mantissa, exp, sign) = x.integer_decode();
        let mut num = BigInt::from(mantissa) * i64::from(sign);
        let scale = if exp >= 0 {
            num <<= exp as usize;
            0
        } else {
            (-exp) as u32
        };
        Self { num, scale }
    }

    fn at_scale(&self, scale: u32) -> BigInt {
        assert!(scale >= self.scale);
        &self.num << (scale - self.scale) as usize
    }

    fn midpoint(a: &Dyadic, b: &Dyadic) -> Dyadic {
        let s = a.scale.max(b.scale);
        Dyadic {
            num: a.at_scale(s) + b.at_scale(s),
            scale: s + 1,
        }
    }

    /// Moves the point by a unit at a finer scale.
    fn nudge(&self) -> Dyadic {
        Dyadic {
            num: (&self.num << 1usize) + 1,
            scale: self.scale + 1,
        }
    }
}

struct ExactSturm {
    b: Vec<Dyadic>,
    a: Vec<Dyadic>,
}

impl ExactSturm {
    fn new(coeffs: &JacobiCoefficients, n: usize) -> Self {
        Self {
            b: coeffs.b()[..n].iter().map(|&v| Dyadic::from_f64(v)).collect(),
            a: coeffs.a()[..n.saturating_sub(1)].iter().map(|&v| Dyadic::from_f64(v)).collect(),
        }
    }

    /// Exact number of eigenvalues of the leading `n×n` block strictly
    /// below `x`, or `None` when `x` is a root of some leading minor.
    fn count_below(&self, n: usize, x: &Dyadic) -> Option<usize> {
        let s = self
            .b
            .iter()
            .chain(&self.a)
            .map(|d| d.scale)
            .chain([x.scale])
            .max()
            .unwrap();
        let xs = x.at_scale(s);
        // q_i = det(xI - T_i) scaled by 2^{i s}.
        let mut prev = BigInt::from(1);
        let mut cur = &xs - self.b[0].at_scale(s);
        let mut changes = 0;
        let sign = |v: &BigInt| v.is_positive();
        if cur.is_zero() {
            return None;
        }
        if !sign(&cur) {
            changes += 1;
        }
        for i in 1..n {
            let a = self.a[i - 1].at_scale(s);
            let next = (&xs - self.b[i].at_scale(s)) * &cur - &a * &a * &prev;
            if next.is_zero() {
                return None;
            }
            if sign(&next) != sign(&cur) {
                changes += 1;
            }
            prev = cur;
            cur = next;
        }
        Some(n - changes)
    }

    /// Finds a point with `count_{p}(x) >= at_least` and
    /// `count_{r}(x) <= at_most`, i.e. strictly above the `at_least`-th root
    /// of the order-`p` polynomial and not above the `(at_most+1)`-th root of
    /// the order-`r` one.
    fn separate(&self, p: usize, at_least: usize, r: usize, at_most: usize, bound: f64) -> bool {
        let mut lo = Dyadic::from_f64(-bound);
        let mut hi = Dyadic::from_f64(bound);
        for _ in 0..512 {
            let mut mid = Dyadic::midpoint(&lo, &hi);
            let (cp, cr) = loop {
                match (self.count_below(p, &mid), self.count_below(r, &mid)) {
                    (Some(cp), Some(cr)) => break (cp, cr),
                    _ => mid = mid.nudge(),
                }
            };
            if cp >= at_least && cr <= at_most {
                return true;
            }
            if cp < at_least {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        false
    }
}

/// Certifies that the roots of `p_{n+1}` strictly interlace those of `p_n`.
/// Returns the first adjacent pair for which no separating point exists.
pub fn certify_strict_interlacing(coeffs: &JacobiCoefficients, n: usize) -> Result<(), String> {
    let sturm = ExactSturm::new(coeffs, n + 1);
    let bound = coeffs.gershgorin_bound(n + 1) + 1.0;
    for i in 1..=n {
        // x_i < y_i: a point above the i-th root of p_{n+1}, not above y_i.
        if !sturm.separate(n + 1, i, n, i - 1, bound) {
            return Err(format!("root {i} of p_{} is not below root {i} of p_{n}", n + 1));
        }
        // y_i < x_{i+1}
        if !sturm.separate(n, i, n + 1, i, bound) {
            return Err(format!("root {i} of p_{n} is not below root {} of p_{}", i + 1, n + 1));
        }
    }
    Ok(())
}

/// Exact eigenvalue count below `x` for the leading `n×n` block; `None` when
/// `x` is a root of a leading minor.
pub fn exact_count_below(coeffs: &JacobiCoefficients, n: usize, x: f64) -> Option<usize> {
    ExactSturm::new(coeffs, n).count_below(n, &Dyadic::from_f64(x))
}
