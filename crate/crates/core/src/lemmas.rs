//! Batch checks of the structural 6j facts the growth argument rests on:
//! realness of `(n_r, m1, m2, n_r, m3, m4)`, constant sign of
//! `(n_r, m, m, n_r, m, m)` in `m`, and constant sign of the summands `S_k`.

use alloc::vec::Vec;

use crate::error::Error;
use crate::invariants::n_r;
use crate::qarith::RootContext;
use crate::sixj::{evaluate, for_each_admissible, for_each_opposite_pair, hypotheses_ab, signs_constant, summand_signs, triple_ok, Tuple6};

/// Violations kept verbatim in a report; the rest are only counted.
pub const MAX_LISTED: usize = 16;

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SweepReport {
    pub r: u32,
    pub checked: u64,
    pub violation_count: u64,
    pub violations: Vec<Tuple6>,
}

impl SweepReport {
    fn new(r: u32) -> Self {
        SweepReport { r, ..Default::default() }
    }

    fn record(&mut self, t: Tuple6) {
        self.violation_count += 1;
        if self.violations.len() < MAX_LISTED {
            self.violations.push(t);
        }
    }

    pub fn passed(&self) -> bool {
        self.violation_count == 0
    }
}

/// Which tuples the `S_k` sign sweep visits.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SummandScope {
    /// Every admissible tuple satisfying the hypotheses.
    Exhaustive,
    /// Only `(n_r, m1, m2, n_r, m3, m4)` satisfying the hypotheses.
    OppositePairs,
}

#[cfg(feature = "parallel")]
fn check_all<F>(r: u32, tuples: Vec<Tuple6>, bad: F) -> Result<SweepReport, Error>
where
    F: Fn(&Tuple6) -> Result<bool, Error> + Sync,
{
    use rayon::prelude::*;
    let flags = tuples.par_iter().map(&bad).collect::<Result<Vec<bool>, Error>>()?;
    Ok(tally(r, &tuples, &flags))
}

#[cfg(not(feature = "parallel"))]
fn check_all<F>(r: u32, tuples: Vec<Tuple6>, bad: F) -> Result<SweepReport, Error>
where
    F: Fn(&Tuple6) -> Result<bool, Error>,
{
    let flags = tuples.iter().map(&bad).collect::<Result<Vec<bool>, Error>>()?;
    Ok(tally(r, &tuples, &flags))
}

fn tally(r: u32, tuples: &[Tuple6], flags: &[bool]) -> SweepReport {
    let mut rep = SweepReport::new(r);
    rep.checked = tuples.len() as u64;
    for (t, &b) in tuples.iter().zip(flags) {
        if b {
            rep.record(*t);
        }
    }
    rep
}

/// Every admissible `(n_r, m1, m2, n_r, m3, m4)` evaluates to a real value.
pub fn realness_sweep(r: u32) -> Result<SweepReport, Error> {
    let ctx = RootContext::new(r)?;
    let n = n_r(r)?;
    let mut tuples = Vec::new();
    for_each_opposite_pair(r, n, |t| tuples.push(t));
    check_all(r, tuples, |t| Ok(evaluate(&ctx, t)?.value.phase_quarter() != 0))
}

/// `−1` when `r ≡ 1 mod 4`, `+1` when `r ≡ 3 mod 4`.
pub fn expected_diagonal_sign(r: u32) -> i8 {
    if r % 4 == 1 {
        -1
    } else {
        1
    }
}

/// Admissible `m` for `(n_r, m, m, n_r, m, m)`.
pub fn diagonal_m(r: u32) -> Result<Vec<u32>, Error> {
    let n = n_r(r)?;
    Ok((0..=r - 2).filter(|&m| triple_ok(r, n, m, m)).collect())
}

/// Every `(n_r, m, m, n_r, m, m)` is real, nonzero and has sign `expected`.
pub fn diagonal_sign_sweep(r: u32, expected: i8) -> Result<SweepReport, Error> {
    let ctx = RootContext::new(r)?;
    let n = n_r(r)?;
    let tuples: Vec<Tuple6> = diagonal_m(r)?.into_iter().map(|m| Tuple6([n, m, m, n, m, m])).collect();
    check_all(r, tuples, |t| {
        let v = evaluate(&ctx, t)?.value;
        Ok(!v.is_real() || v.sign() != expected)
    })
}

/// Summands `S_k` share one sign whenever the hypotheses hold.
pub fn summand_sign_sweep(r: u32, scope: SummandScope) -> Result<SweepReport, Error> {
    let ctx = RootContext::new(r)?;
    let mut tuples = Vec::new();
    let mut keep = |t: Tuple6| {
        if hypotheses_ab(r, &t).unwrap_or(false) {
            tuples.push(t);
        }
    };
    match scope {
        SummandScope::Exhaustive => for_each_admissible(r, &mut keep),
        SummandScope::OppositePairs => for_each_opposite_pair(r, n_r(r)?, &mut keep),
    }
    check_all(r, tuples, |t| Ok(!signs_constant(&summand_signs(&ctx, t)?)))
}
