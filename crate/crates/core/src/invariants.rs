//! Relative Reshetikhin-Turaev and Turaev-Viro values from state sums, and
//! their growth rates against `2(k + 2l)·v₈`.
//!
//! The normalization constant `C_r` is taken to be 1 throughout, so absolute
//! values are defined only up to a factor growing at most polynomially in
//! `r`. Growth rates are unaffected.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::error::Error;
use crate::qarith::{log_sum_exp, QValue, RootContext};
use crate::shadow::{build_shadow, state_sum, state_sum_report, GluingSpec, ShadowGraph, StateSumReport};
use crate::sixj::SixjEvaluator;
use crate::volume::v8;

/// Relative tolerance for `|Σ states| = Σ |states|` on the diagonal.
pub const DIAGONAL_TOLERANCE: f64 = 1e-10;

/// Diagonal color: `(r−1)/2` if `r ≡ 1 mod 4`, `(r−3)/2` if `r ≡ 3 mod 4`.
pub fn n_r(r: u32) -> Result<u32, Error> {
    RootContext::new(r)?;
    Ok(if r % 4 == 1 { (r - 1) / 2 } else { (r - 3) / 2 })
}

/// `2(k + 2l)·v₈`.
pub fn target(spec: &GluingSpec) -> f64 {
    2.0 * spec.complexity() as f64 * v8()
}

/// `RT_r(γ) = C_r · |(P, gl)|_γ` with `C_r = 1`.
pub fn rt(ev: &SixjEvaluator, g: &ShadowGraph, gamma: &[u32]) -> Result<QValue, Error> {
    state_sum(ev, g, gamma)
}

/// Number of link colorings, `(r−1)^loops`.
pub fn gamma_count(g: &ShadowGraph, r: u32) -> Result<u64, Error> {
    (r as u64 - 1)
        .checked_pow(g.loop_count() as u32)
        .ok_or_else(|| Error::Range(format!("(r-1)^{} link colorings overflow", g.loop_count())))
}

/// The `index`-th link coloring in lexicographic order.
pub fn gamma_at(g: &ShadowGraph, r: u32, mut index: u64) -> Vec<u32> {
    let base = r as u64 - 1;
    let mut gamma = vec![0u32; g.loop_count()];
    for slot in gamma.iter_mut().rev() {
        *slot = (index % base) as u32;
        index /= base;
    }
    gamma
}

/// `log |rt|²`, `−∞` for a vanishing state sum.
fn log_rt_sq(ev: &SixjEvaluator, g: &ShadowGraph, index: u64) -> Result<f64, Error> {
    let gamma = gamma_at(g, ev.r(), index);
    Ok(2.0 * rt(ev, g, &gamma)?.log_mag())
}

fn tv_from_logs(logs: &[f64]) -> QValue {
    let l = log_sum_exp(logs);
    if l == f64::NEG_INFINITY {
        QValue::ZERO
    } else {
        QValue::new(0, 1, l)
    }
}

/// `TV_r = Σ_γ |RT_r(γ)|²`, single-threaded.
pub fn tv_serial(ev: &SixjEvaluator, g: &ShadowGraph) -> Result<QValue, Error> {
    let n = gamma_count(g, ev.r())?;
    let logs = (0..n).map(|i| log_rt_sq(ev, g, i)).collect::<Result<Vec<_>, _>>()?;
    Ok(tv_from_logs(&logs))
}

/// `TV_r = Σ_γ |RT_r(γ)|²`, with the γ space split across the current rayon
/// pool. Per-γ terms are gathered in index order before the log-sum-exp, so
/// the result does not depend on the thread count.
#[cfg(feature = "parallel")]
pub fn tv(ev: &SixjEvaluator, g: &ShadowGraph) -> Result<QValue, Error> {
    use rayon::prelude::*;
    let n = gamma_count(g, ev.r())?;
    let logs = (0..n).into_par_iter().map(|i| log_rt_sq(ev, g, i)).collect::<Result<Vec<_>, _>>()?;
    Ok(tv_from_logs(&logs))
}

#[cfg(not(feature = "parallel"))]
pub fn tv(ev: &SixjEvaluator, g: &ShadowGraph) -> Result<QValue, Error> {
    tv_serial(ev, g)
}

/// State sum at the diagonal coloring `γ = (n_r, …, n_r)`, checked for
/// uniform sign and absence of cancellation.
pub fn diagonal_statesum(ev: &SixjEvaluator, g: &ShadowGraph) -> Result<StateSumReport, Error> {
    let n = n_r(ev.r())?;
    let gamma = vec![n; g.loop_count()];
    #[cfg(feature = "parallel")]
    let rep = crate::shadow::state_sum_report_par(ev, g, &gamma)?;
    #[cfg(not(feature = "parallel"))]
    let rep = state_sum_report(ev, g, &gamma)?;
    if !rep.uniform_sign {
        return Err(Error::InvariantViolation(format!("diagonal states at r={} do not share a sign", ev.r())));
    }
    if !rep.no_cancellation(DIAGONAL_TOLERANCE) {
        return Err(Error::InvariantViolation(format!(
            "diagonal state sum at r={} has |sum| = {} but sum of |states| = {}",
            ev.r(),
            rep.value.abs(),
            rep.abs_sum
        )));
    }
    Ok(rep)
}

/// Serial [`diagonal_statesum`].
pub fn diagonal_statesum_serial(ev: &SixjEvaluator, g: &ShadowGraph) -> Result<StateSumReport, Error> {
    let n = n_r(ev.r())?;
    let rep = state_sum_report(ev, g, &vec![n; g.loop_count()])?;
    if !rep.uniform_sign || !rep.no_cancellation(DIAGONAL_TOLERANCE) {
        return Err(Error::InvariantViolation(format!("diagonal same-sign property fails at r={}", ev.r())));
    }
    Ok(rep)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GrowthKind {
    /// `(2π/r)·log TV_r`
    Tv,
    /// `(4π/r)·log |(P, gl)|_{(n_r)}|`
    Diagonal,
}

impl GrowthKind {
    pub fn scale(self, r: u32) -> f64 {
        match self {
            GrowthKind::Tv => 2.0 * PI / r as f64,
            GrowthKind::Diagonal => 4.0 * PI / r as f64,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GrowthRecord {
    pub r: u32,
    pub log_value: f64,
    pub growth: f64,
    pub target: f64,
    pub abs_error: f64,
}

/// Growth records sorted by `r`; values that vanish are listed in `zeros`
/// instead of producing an infinite growth.
#[derive(Clone, Debug, PartialEq)]
pub struct GrowthSeries {
    pub kind: GrowthKind,
    pub target: f64,
    pub records: Vec<GrowthRecord>,
    pub zeros: Vec<u32>,
}

impl GrowthSeries {
    pub fn new(kind: GrowthKind, target: f64) -> Self {
        GrowthSeries { kind, target, records: Vec::new(), zeros: Vec::new() }
    }

    /// Adds the value computed at `r`, keeping records sorted.
    pub fn push(&mut self, r: u32, value: &QValue) {
        if value.is_zero() {
            self.zeros.push(r);
            self.zeros.sort_unstable();
            return;
        }
        let log_value = value.log_mag();
        let growth = self.kind.scale(r) * log_value;
        let rec = GrowthRecord { r, log_value, growth, target: self.target, abs_error: libm::fabs(growth - self.target) };
        let at = self.records.partition_point(|x| x.r < r);
        self.records.insert(at, rec);
    }

    pub fn get(&self, r: u32) -> Option<&GrowthRecord> {
        self.records.iter().find(|x| x.r == r)
    }

    /// Smallest `C` with `|growth − target| ≤ C·log r / r` for `lo ≤ r ≤ hi`,
    /// or `None` when no record falls in range.
    pub fn fit(&self, lo: u32, hi: u32) -> Option<f64> {
        self.records
            .iter()
            .filter(|x| x.r >= lo && x.r <= hi && x.r > 1)
            .map(|x| x.abs_error * x.r as f64 / libm::log(x.r as f64))
            .reduce(f64::max)
    }

    /// Fit over every record with `r ≥ lo`.
    pub fn fit_from(&self, lo: u32) -> Option<f64> {
        self.fit(lo, u32::MAX)
    }

    /// Whether `abs_error` never increases along the listed `r` values.
    pub fn error_nonincreasing(&self, rs: &[u32]) -> bool {
        let errs: Vec<f64> = rs.iter().filter_map(|&r| self.get(r).map(|x| x.abs_error)).collect();
        errs.len() == rs.len() && errs.windows(2).all(|w| w[1] <= w[0])
    }
}

/// `(2π/r)·log TV_r` for each `r`.
pub fn tv_growth_series(spec: &GluingSpec, r_list: &[u32]) -> Result<GrowthSeries, Error> {
    let g = build_shadow(spec)?;
    let mut s = GrowthSeries::new(GrowthKind::Tv, target(spec));
    for &r in r_list {
        let ev = SixjEvaluator::for_r(r)?;
        s.push(r, &tv(&ev, &g)?);
    }
    Ok(s)
}

/// `(4π/r)·log |(P, gl)|_{(n_r)}|` for each `r`.
pub fn diagonal_growth_series(spec: &GluingSpec, r_list: &[u32]) -> Result<GrowthSeries, Error> {
    let g = build_shadow(spec)?;
    let mut s = GrowthSeries::new(GrowthKind::Diagonal, target(spec));
    for &r in r_list {
        let ev = SixjEvaluator::for_r(r)?;
        s.push(r, &diagonal_statesum(&ev, &g)?.value);
    }
    Ok(s)
}

/// `start, start + step, …` up to `stop`, keeping odd values only.
pub fn odd_range(start: u32, stop: u32, step: u32) -> Vec<u32> {
    (start..=stop).step_by(step.max(1) as usize).filter(|r| r % 2 == 1).collect()
}
