//! Exact-phase, log-magnitude arithmetic at the root `q = exp(2πi/r)`.
//!
//! Every quantity that appears in a 6j-symbol or a state sum is a real or
//! purely imaginary number whose magnitude can exceed the range of `f64`
//! long before the colors become interesting. [`QValue`] keeps the phase as
//! an exact power of `√−1`, the sign exactly, and the magnitude as a natural
//! logarithm.

use alloc::vec::Vec;
use core::f64::consts::PI;
use core::fmt;

use num_complex::Complex64;

use crate::error::Error;

/// Magnitudes of scaled partial sums below this are treated as exact zero.
const SCALED_ZERO: f64 = 1e-300;

/// A number `sign · (√−1)^phase · exp(log_mag)` with `phase ∈ {0, 1}`.
#[derive(Clone, Copy, Debug)]
pub struct QValue {
    phase: u8,
    sign: i8,
    log_mag: f64,
}

impl QValue {
    pub const ZERO: QValue = QValue { phase: 0, sign: 0, log_mag: f64::NEG_INFINITY };
    pub const ONE: QValue = QValue { phase: 0, sign: 1, log_mag: 0.0 };
    pub const I: QValue = QValue { phase: 1, sign: 1, log_mag: 0.0 };

    /// Builds a value from any quarter-turn exponent; the result is canonical.
    pub fn new(phase_quarter: i64, sign: i8, log_mag: f64) -> Self {
        if sign == 0 {
            return Self::ZERO;
        }
        let p = phase_quarter.rem_euclid(4) as u8;
        let (phase, flip) = if p >= 2 { (p - 2, true) } else { (p, false) };
        let sign = if flip { -sign.signum() } else { sign.signum() };
        QValue { phase, sign, log_mag }
    }

    pub fn from_f64(x: f64) -> Self {
        if x == 0.0 {
            Self::ZERO
        } else {
            Self::new(0, if x > 0.0 { 1 } else { -1 }, libm::log(libm::fabs(x)))
        }
    }

    /// Canonical quarter-turn exponent: 0 for real, 1 for imaginary.
    pub fn phase_quarter(&self) -> u8 {
        self.phase
    }

    pub fn sign(&self) -> i8 {
        self.sign
    }

    /// Natural log of `|self|`; `-inf` for zero.
    pub fn log_mag(&self) -> f64 {
        if self.sign == 0 {
            f64::NEG_INFINITY
        } else {
            self.log_mag
        }
    }

    pub fn is_zero(&self) -> bool {
        self.sign == 0
    }

    pub fn is_real(&self) -> bool {
        self.phase == 0
    }

    pub fn is_imaginary(&self) -> bool {
        self.phase == 1 && self.sign != 0
    }

    pub fn neg(self) -> Self {
        QValue { sign: -self.sign, ..self }
    }

    pub fn abs(self) -> Self {
        if self.sign == 0 {
            self
        } else {
            QValue { phase: 0, sign: 1, log_mag: self.log_mag }
        }
    }

    pub fn powi(self, n: i32) -> Self {
        if n == 0 {
            return Self::ONE;
        }
        if self.sign == 0 {
            return Self::ZERO;
        }
        let sign = if self.sign < 0 && n % 2 != 0 { -1 } else { 1 };
        Self::new(self.phase as i64 * n as i64, sign, self.log_mag * n as f64)
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn recip(self) -> Option<Self> {
        if self.sign == 0 {
            None
        } else {
            Some(Self::new(-(self.phase as i64), self.sign, -self.log_mag))
        }
    }

    /// Value as a complex double; `None` when the magnitude is not representable.
    pub fn to_complex(&self) -> Option<Complex64> {
        if self.sign == 0 {
            return Some(Complex64::new(0.0, 0.0));
        }
        if self.log_mag > 690.0 || self.log_mag < -690.0 {
            return None;
        }
        let m = self.sign as f64 * libm::exp(self.log_mag);
        Some(if self.phase == 0 { Complex64::new(m, 0.0) } else { Complex64::new(0.0, m) })
    }

    /// Real part as `f64` for real values; `None` for imaginary or unrepresentable values.
    pub fn to_f64(&self) -> Option<f64> {
        if self.sign != 0 && self.phase != 0 {
            return None;
        }
        self.to_complex().map(|z| z.re)
    }

    /// Same complex number, compared exactly in phase and sign and within a
    /// relative tolerance on the magnitude.
    pub fn approx_eq(&self, other: &QValue, rel: f64) -> bool {
        if self.sign == 0 || other.sign == 0 {
            return self.sign == other.sign;
        }
        self.phase == other.phase
            && self.sign == other.sign
            && libm::fabs(libm::expm1(self.log_mag - other.log_mag)) <= rel
    }
}

impl PartialEq for QValue {
    fn eq(&self, other: &Self) -> bool {
        if self.sign == 0 || other.sign == 0 {
            return self.sign == other.sign;
        }
        self.phase == other.phase && self.sign == other.sign && self.log_mag == other.log_mag
    }
}

impl fmt::Display for QValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.sign == 0 {
            return f.write_str("0");
        }
        let s = if self.sign < 0 { "-" } else { "" };
        let i = if self.phase == 1 { "i*" } else { "" };
        write!(f, "{s}{i}exp({})", self.log_mag)
    }
}

/// Multiplies two values: log magnitudes add, signs multiply, phases add mod 4.
pub fn qmul(a: QValue, b: QValue) -> QValue {
    if a.sign == 0 || b.sign == 0 {
        return QValue::ZERO;
    }
    QValue::new(a.phase as i64 + b.phase as i64, a.sign * b.sign, a.log_mag + b.log_mag)
}

impl core::ops::Mul for QValue {
    type Output = QValue;

    fn mul(self, rhs: QValue) -> QValue {
        qmul(self, rhs)
    }
}

/// Neumaier-compensated running sum.
#[derive(Clone, Copy, Debug, Default)]
pub(crate) struct Compensated {
    sum: f64,
    comp: f64,
}

impl Compensated {
    pub(crate) fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if libm::fabs(self.sum) >= libm::fabs(x) {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub(crate) fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

/// Sums values that share a phase.
///
/// Two passes: the largest log magnitude sets the scale, then the scaled
/// terms are added with compensated summation. Zero inputs are ignored.
pub fn qsum<'a, I>(values: I) -> Result<QValue, Error>
where
    I: IntoIterator<Item = &'a QValue>,
    I::IntoIter: Clone,
{
    let iter = values.into_iter();
    let mut phase = None;
    let mut max = f64::NEG_INFINITY;
    for v in iter.clone().filter(|v| !v.is_zero()) {
        match phase {
            None => phase = Some(v.phase),
            Some(p) if p != v.phase => return Err(Error::PhaseMix),
            _ => {}
        }
        if v.log_mag > max {
            max = v.log_mag;
        }
    }
    let Some(phase) = phase else {
        return Ok(QValue::ZERO);
    };
    let mut acc = Compensated::default();
    for v in iter.filter(|v| !v.is_zero()) {
        acc.add(v.sign as f64 * libm::exp(v.log_mag - max));
    }
    let s = acc.value();
    if libm::fabs(s) < SCALED_ZERO {
        return Ok(QValue::ZERO);
    }
    Ok(QValue::new(phase as i64, if s > 0.0 { 1 } else { -1 }, max + libm::log(libm::fabs(s))))
}

/// Log-sum-exp over a family of nonnegative log magnitudes.
pub fn log_sum_exp(logs: &[f64]) -> f64 {
    let max = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return max;
    }
    let mut acc = Compensated::default();
    for &l in logs {
        acc.add(libm::exp(l - max));
    }
    max + libm::log(acc.value())
}

/// Accumulation precision for the quantum factorial table.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Precision {
    /// Plain `f64` running sums.
    #[default]
    Standard,
    /// Compensated running sums; intended for `r > 1001`.
    Extended,
}

/// `sin(2πn/r)` with the angle reduced exactly in integers first.
///
/// Returns `(sign, |sin|)`; the sign is exact.
pub(crate) fn sin_two_pi_frac(n: i64, r: i64) -> (i8, f64) {
    // sin(π t / r) with t = 2n mod 2r
    let mut t = (2 * n).rem_euclid(2 * r);
    let mut sign = 1i8;
    if t >= r {
        t -= r;
        sign = -1;
    }
    if t == 0 {
        return (0, 0.0);
    }
    let u = t.min(r - t);
    (sign, libm::sin(PI * u as f64 / r as f64))
}

/// Quantum integers and factorials at a fixed odd `r`.
///
/// Immutable after construction; share it freely between threads.
#[derive(Clone, Debug)]
pub struct RootContext {
    r: u32,
    precision: Precision,
    qint: Vec<QValue>,
    qfact: Vec<QValue>,
}

impl RootContext {
    pub fn new(r: u32) -> Result<Self, Error> {
        Self::with_precision(r, Precision::Standard)
    }

    pub fn with_precision(r: u32, precision: Precision) -> Result<Self, Error> {
        if r < 3 || r % 2 == 0 {
            return Err(Error::InvalidRoot(r));
        }
        let ri = r as i64;
        let (_, base) = sin_two_pi_frac(1, ri);
        let log_base = libm::log(base);
        let mut qint = Vec::with_capacity(r as usize);
        for n in 0..ri {
            let (s, m) = sin_two_pi_frac(n, ri);
            qint.push(if s == 0 { QValue::ZERO } else { QValue::new(0, s, libm::log(m) - log_base) });
        }
        let mut qfact = Vec::with_capacity(r as usize);
        qfact.push(QValue::ONE);
        let mut sign = 1i8;
        let mut plain = 0.0f64;
        let mut comp = Compensated::default();
        for q in qint.iter().skip(1) {
            sign *= q.sign;
            let log = match precision {
                Precision::Standard => {
                    plain += q.log_mag;
                    plain
                }
                Precision::Extended => {
                    comp.add(q.log_mag);
                    comp.value()
                }
            };
            qfact.push(QValue::new(0, sign, log));
        }
        Ok(RootContext { r, precision, qint, qfact })
    }

    pub fn r(&self) -> u32 {
        self.r
    }

    pub fn precision(&self) -> Precision {
        self.precision
    }

    /// Largest color, `r − 2`.
    pub fn max_color(&self) -> u32 {
        self.r - 2
    }

    fn check(&self, n: i64) -> Result<usize, Error> {
        if n < 0 || n > self.r as i64 - 1 {
            return Err(Error::Domain { value: n, max: self.r as i64 - 1 });
        }
        Ok(n as usize)
    }

    /// `[n] = sin(2πn/r) / sin(2π/r)` for `0 ≤ n ≤ r − 1`.
    pub fn qint(&self, n: i64) -> Result<QValue, Error> {
        self.check(n).map(|i| self.qint[i])
    }

    /// `[n]! = [1][2]⋯[n]`, `[0]! = 1`, for `0 ≤ n ≤ r − 1`.
    pub fn qfact(&self, n: i64) -> Result<QValue, Error> {
        self.check(n).map(|i| self.qfact[i])
    }

    /// Unchecked factorial lookup for indices already known to be in range.
    #[inline]
    pub(crate) fn fact(&self, n: usize) -> QValue {
        self.qfact[n]
    }

    /// Triangle coefficient `Δ(a1, a2, a3)`, using `√y = √|y|·√−1` for `y < 0`.
    pub fn delta(&self, a1: u32, a2: u32, a3: u32) -> Result<QValue, Error> {
        crate::sixj::check_triple(self.r, a1, a2, a3)?;
        Ok(self.delta_unchecked(a1, a2, a3))
    }

    pub(crate) fn delta_unchecked(&self, a1: u32, a2: u32, a3: u32) -> QValue {
        let (a1, a2, a3) = (a1 as usize, a2 as usize, a3 as usize);
        let num = self.fact((a1 + a2 - a3) / 2) * self.fact((a1 + a3 - a2) / 2) * self.fact((a2 + a3 - a1) / 2);
        let den = self.fact((a1 + a2 + a3) / 2 + 1);
        let sign = num.sign * den.sign;
        let log = 0.5 * (num.log_mag - den.log_mag);
        if sign > 0 {
            QValue::new(0, 1, log)
        } else {
            QValue::new(1, 1, log)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn qint_complex(r: u32, n: i64) -> Complex64 {
        let q = Complex64::from_polar(1.0, 2.0 * PI / r as f64);
        (q.powi(n as i32) - q.powi(-(n as i32))) / (q - q.inv())
    }

    #[test]
    fn rejects_even_or_small_r() {
        assert_eq!(RootContext::new(4).unwrap_err(), Error::InvalidRoot(4));
        assert_eq!(RootContext::new(1).unwrap_err(), Error::InvalidRoot(1));
        assert!(RootContext::new(3).is_ok());
    }

    #[test]
    fn qint_examples() {
        let ctx = RootContext::new(7).unwrap();
        assert!(ctx.qint(0).unwrap().is_zero());
        assert_eq!(ctx.qint(1).unwrap(), QValue::ONE);
        let six = ctx.qint(6).unwrap();
        assert_eq!(six.sign(), -1);
        assert!(libm::fabs(six.to_f64().unwrap() - qint_complex(7, 6).re) < 1e-14);
        assert!(libm::fabs(six.to_f64().unwrap() + 1.0) < 1e-14);
        assert!(matches!(ctx.qint(7), Err(Error::Domain { .. })));
        assert!(matches!(ctx.qint(-1), Err(Error::Domain { .. })));
    }

    #[test]
    fn qfact_examples() {
        assert_eq!(RootContext::new(7).unwrap().qfact(0).unwrap(), QValue::ONE);
        let two = RootContext::new(5).unwrap().qfact(2).unwrap().to_f64().unwrap();
        assert!(libm::fabs(two - 2.0 * libm::cos(2.0 * PI / 5.0)) < 1e-14);
        assert!(libm::fabs(two - 0.618_033_988_749_894_8) < 1e-12);
        // [4] and [5] are the only negative factors up to 5 at r = 7.
        let ctx = RootContext::new(7).unwrap();
        let mut direct = Complex64::new(1.0, 0.0);
        for k in 1..=5 {
            direct *= qint_complex(7, k);
        }
        let f5 = ctx.qfact(5).unwrap();
        assert_eq!(f5.sign(), if direct.re > 0.0 { 1 } else { -1 });
        assert_eq!(f5.sign(), 1);
        assert!(libm::fabs(f5.to_f64().unwrap() - direct.re) < 1e-12);
    }

    #[test]
    fn qint_sign_pattern() {
        for r in (3..=201u32).step_by(2) {
            let ctx = RootContext::new(r).unwrap();
            for n in 1..r as i64 {
                let s = ctx.qint(n).unwrap().sign();
                if 2 * n < r as i64 {
                    assert_eq!(s, 1, "r={r} n={n}");
                } else {
                    assert_eq!(s, -1, "r={r} n={n}");
                }
            }
        }
    }

    #[test]
    fn qfact_matches_complex_product() {
        for r in (3..=101u32).step_by(2) {
            let ctx = RootContext::new(r).unwrap();
            let mut direct = Complex64::new(1.0, 0.0);
            for n in 0..r as i64 {
                if n > 0 {
                    direct *= qint_complex(r, n);
                }
                let f = ctx.qfact(n).unwrap();
                let want = if direct.re > 0.0 { 1 } else { -1 };
                assert_eq!(f.sign(), want, "r={r} n={n}");
                let rel = libm::fabs(libm::exp(f.log_mag()) / direct.norm() - 1.0);
                assert!(rel < 1e-10, "r={r} n={n} rel={rel}");
            }
        }
    }

    #[test]
    fn extended_precision_agrees() {
        let a = RootContext::new(2001).unwrap();
        let b = RootContext::with_precision(2001, Precision::Extended).unwrap();
        for n in [0i64, 1, 999, 1000, 1500, 2000] {
            assert!(a.qfact(n).unwrap().approx_eq(&b.qfact(n).unwrap(), 1e-10));
        }
    }

    #[test]
    fn delta_examples() {
        let ctx = RootContext::new(7).unwrap();
        assert_eq!(ctx.delta(0, 0, 0).unwrap(), QValue::ONE);
        // Δ(0, a, a) = sqrt([a]! / [a+1]!) = 1/sqrt([a+1])
        let d = ctx.delta(0, 2, 2).unwrap();
        let want = 1.0 / libm::sqrt(qint_complex(7, 3).re);
        assert!(libm::fabs(d.to_f64().unwrap() - want) < 1e-14);
        // Δ(2,2,2) = sqrt([1]!^3 / [4]!), imaginary iff [4]! < 0.
        let d = ctx.delta(2, 2, 2).unwrap();
        let f4 = ctx.qfact(4).unwrap();
        assert_eq!(d.is_imaginary(), f4.sign() < 0);
        assert!(matches!(ctx.delta(1, 1, 1), Err(Error::NotAdmissible { .. })));
    }

    #[test]
    fn qmul_and_qsum_examples() {
        assert_eq!(qmul(QValue::ONE, QValue::ONE.neg()), QValue::ONE.neg());
        assert_eq!(qmul(QValue::I, QValue::I), QValue::ONE.neg());
        let x = QValue::from_f64(3.5);
        assert!(qsum(&[x, x.neg()]).unwrap().is_zero());
        let big = QValue::new(0, 1, 1000.0);
        let s = qsum(&[big, big]).unwrap();
        assert!(libm::fabs(s.log_mag() - (1000.0 + core::f64::consts::LN_2)) < 1e-12);
        assert_eq!(qsum(&[QValue::ONE, QValue::I]), Err(Error::PhaseMix));
        assert!(qsum(&[]).unwrap().is_zero());
        assert!(qsum(&[QValue::ZERO, QValue::I]).unwrap().is_imaginary());
    }

    #[test]
    fn canonical_form() {
        assert_eq!(QValue::new(2, 1, 0.5), QValue::new(0, -1, 0.5));
        assert_eq!(QValue::new(-1, 1, 0.5), QValue::new(1, -1, 0.5));
        assert_eq!(QValue::new(7, 1, 0.0), QValue::new(1, -1, 0.0));
        assert_eq!(QValue::I.powi(4), QValue::ONE);
        assert_eq!(QValue::I.recip().unwrap(), QValue::I.neg());
    }

    #[test]
    fn log_sum_exp_basic() {
        let v = vec![0.0, 0.0];
        assert!(libm::fabs(log_sum_exp(&v) - core::f64::consts::LN_2) < 1e-15);
        assert_eq!(log_sum_exp(&[]), f64::NEG_INFINITY);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn complex_round_trip(phase in 0i64..4, neg in any::<bool>(), log in -600.0f64..600.0) {
                let v = QValue::new(phase, if neg { -1 } else { 1 }, log);
                let z = v.to_complex().unwrap();
                let back = if z.im == 0.0 {
                    QValue::from_f64(z.re)
                } else {
                    qmul(QValue::from_f64(z.im), QValue::I)
                };
                prop_assert!(back.approx_eq(&v, 1e-12));
            }

            #[test]
            fn qsum_permutation_invariant(
                terms in proptest::collection::vec((any::<bool>(), -50.0f64..50.0), 1..40),
                seed in any::<u64>(),
            ) {
                let vals: Vec<QValue> = terms.iter().map(|&(n, l)| QValue::new(0, if n { -1 } else { 1 }, l)).collect();
                let mut shuffled = vals.clone();
                // deterministic Fisher-Yates from the seed
                let mut s = seed | 1;
                for i in (1..shuffled.len()).rev() {
                    s ^= s << 13; s ^= s >> 7; s ^= s << 17;
                    shuffled.swap(i, (s % (i as u64 + 1)) as usize);
                }
                let a = qsum(&vals).unwrap();
                let b = qsum(&shuffled).unwrap();
                let scale = vals.iter().map(|v| v.log_mag()).fold(f64::NEG_INFINITY, f64::max);
                let za = a.to_f64().unwrap_or(0.0) * libm::exp(-scale);
                let zb = b.to_f64().unwrap_or(0.0) * libm::exp(-scale);
                let tol = 1e-12 * (1.0 + libm::fabs(za));
                prop_assert!(libm::fabs(za - zb) <= tol * vals.len() as f64, "{za} vs {zb}");
            }
        }
    }
}
