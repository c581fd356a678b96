//! Brute-force reference evaluators in plain complex arithmetic.
//!
//! Nothing here goes through [`QValue`](crate::QValue) or the memoized
//! evaluator; only the admissibility predicates are shared with the main path.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;

use crate::error::Error;
use crate::shadow::{crossing_tuple, region_phase_radians, ShadowGraph};
use crate::sixj::{check_tuple, triple_admissible, Tuple6};

pub const SIXJ_MAX_R: u32 = 31;
pub const STATE_SUM_MAX_R: u32 = 9;
pub const TV_MAX_R: u32 = 7;
const STATE_SUM_MAX_REGIONS: usize = 6;
const TV_MAX_LOOPS: usize = 6;

fn q(r: u32) -> Complex64 {
    Complex64::from_polar(1.0, 2.0 * PI / r as f64)
}

/// `[n] = (qⁿ − q⁻ⁿ)/(q − q⁻¹)`.
fn qint(r: u32, n: u32) -> Complex64 {
    let q = q(r);
    (q.powi(n as i32) - q.powi(-(n as i32))) / (q - q.inv())
}

fn qfact(r: u32, n: u32) -> Complex64 {
    (1..=n).fold(Complex64::new(1.0, 0.0), |acc, k| acc * qint(r, k))
}

/// Square root of a real number, `√y = √|y|·√−1` for `y < 0`.
fn sqrt_real(y: f64) -> Complex64 {
    if y < 0.0 {
        Complex64::new(0.0, libm::sqrt(-y))
    } else {
        Complex64::new(libm::sqrt(y), 0.0)
    }
}

fn delta(r: u32, a: u32, b: u32, c: u32) -> Complex64 {
    let num = qfact(r, (a + b - c) / 2) * qfact(r, (a + c - b) / 2) * qfact(r, (b + c - a) / 2);
    let den = qfact(r, (a + b + c) / 2 + 1);
    sqrt_real((num / den).re)
}

/// Literal evaluation of the 6j-symbol.
pub fn sixj_naive(r: u32, t: &Tuple6) -> Result<Complex64, Error> {
    if r > SIXJ_MAX_R {
        return Err(Error::Range(format!("sixj_naive requires r <= {SIXJ_MAX_R}, got {r}")));
    }
    check_tuple(r, t)?;
    let [a1, a2, a3, a4, a5, a6] = t.0;
    let tt = [(a1 + a2 + a3) / 2, (a1 + a5 + a6) / 2, (a2 + a4 + a6) / 2, (a3 + a4 + a5) / 2];
    let qq = [(a1 + a2 + a4 + a5) / 2, (a1 + a3 + a4 + a6) / 2, (a2 + a3 + a5 + a6) / 2];
    let lo = *tt.iter().max().unwrap();
    let hi = *qq.iter().min().unwrap();
    let mut sum = Complex64::new(0.0, 0.0);
    for k in lo..=hi {
        let mut den = Complex64::new(1.0, 0.0);
        for &x in &tt {
            den *= qfact(r, k - x);
        }
        for &x in &qq {
            den *= qfact(r, x - k);
        }
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        sum += qfact(r, k + 1) * sign / den;
    }
    let total = t.0.iter().sum::<u32>() as i32;
    let pre = Complex64::i().powi(-total)
        * delta(r, a1, a2, a3)
        * delta(r, a1, a5, a6)
        * delta(r, a2, a4, a6)
        * delta(r, a3, a4, a5);
    Ok(pre * sum)
}

/// Every region coloring in `I_r^regions`, admissible or not, filtered by the
/// edge predicate; states multiplied out from scratch.
pub fn state_sum_naive(g: &ShadowGraph, r: u32, gamma: &[u32]) -> Result<Complex64, Error> {
    if r > STATE_SUM_MAX_R {
        return Err(Error::Range(format!("state_sum_naive requires r <= {STATE_SUM_MAX_R}, got {r}")));
    }
    let n = g.regions().len();
    if n > STATE_SUM_MAX_REGIONS {
        return Err(Error::Range(format!("state_sum_naive supports at most {STATE_SUM_MAX_REGIONS} regions, got {n}")));
    }
    if gamma.len() != g.loop_count() {
        return Err(Error::ColoringLength { expected: g.loop_count(), got: gamma.len() });
    }
    let base = r - 1;
    let mut total = Complex64::new(0.0, 0.0);
    let mut eta = vec![0u32; n];
    for idx in 0..base.pow(n as u32) {
        let mut x = idx;
        for slot in eta.iter_mut() {
            *slot = x % base;
            x /= base;
        }
        let mut admissible = gamma.iter().all(|&c| c < base);
        for e in g.edges() {
            admissible &= triple_admissible(r, gamma[e.loop_id], eta[e.regions[0]], eta[e.regions[1]])?;
        }
        if !admissible {
            continue;
        }
        let mut s = Complex64::new(1.0, 0.0);
        for c in g.crossings() {
            s *= sixj_naive(r, &crossing_tuple(c, gamma, &eta))?;
        }
        for (reg, &j) in g.regions().iter().zip(&eta) {
            let v = qint(r, j + 1) * if j % 2 == 1 { -1.0 } else { 1.0 };
            s *= v.powi(reg.euler) * Complex64::from_polar(1.0, region_phase_radians(r, reg, j));
        }
        total += s;
    }
    Ok(total)
}

/// `Σ_γ |state_sum_naive|²` over all link colorings.
pub fn tv_naive(g: &ShadowGraph, r: u32) -> Result<f64, Error> {
    if r > TV_MAX_R {
        return Err(Error::Range(format!("tv_naive requires r <= {TV_MAX_R}, got {r}")));
    }
    let n = g.loop_count();
    if n > TV_MAX_LOOPS {
        return Err(Error::Range(format!("tv_naive supports at most {TV_MAX_LOOPS} loops, got {n}")));
    }
    let base = r - 1;
    let mut gamma: Vec<u32> = vec![0; n];
    let mut total = 0.0;
    for idx in 0..base.pow(n as u32) {
        let mut x = idx;
        for slot in gamma.iter_mut() {
            *slot = x % base;
            x /= base;
        }
        total += state_sum_naive(g, r, &gamma)?.norm_sqr();
    }
    Ok(total)
}
