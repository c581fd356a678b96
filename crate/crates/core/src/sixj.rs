//! Admissibility and evaluation of quantum 6j-symbols.

use alloc::vec::Vec;
use core::f64::consts::PI;
use core::fmt;
use core::hash::{BuildHasher, Hash};

use hashbrown::HashMap;
use spin::RwLock;

use crate::error::{Error, TripleFailure};
use crate::qarith::{qsum, QValue, RootContext};

/// Positions of the four face triples inside a 6-tuple.
pub const FACES: [[usize; 3]; 4] = [[0, 1, 2], [0, 4, 5], [1, 3, 5], [2, 3, 4]];

/// The six index maps of the tetrahedral symmetries
/// `(i,j,k,l,m,n) ↦ (j,i,k,m,l,n), (i,k,j,l,n,m), (i,m,n,l,j,k), (l,m,k,i,j,n), (l,j,n,i,m,k)`.
pub const SYMMETRIES: [[usize; 6]; 6] = [
    [0, 1, 2, 3, 4, 5],
    [1, 0, 2, 4, 3, 5],
    [0, 2, 1, 3, 5, 4],
    [0, 4, 5, 3, 1, 2],
    [3, 4, 2, 0, 1, 5],
    [3, 1, 5, 0, 4, 2],
];

const fn compose(a: &[usize; 6], b: &[usize; 6]) -> [usize; 6] {
    // (a ∘ b)(t)[i] = b(t)[a[i]] = t[b[a[i]]]
    let mut out = [0; 6];
    let mut i = 0;
    while i < 6 {
        out[i] = b[a[i]];
        i += 1;
    }
    out
}

const fn same(a: &[usize; 6], b: &[usize; 6]) -> bool {
    let mut i = 0;
    while i < 6 {
        if a[i] != b[i] {
            return false;
        }
        i += 1;
    }
    true
}

const fn closure() -> ([[usize; 6]; 24], usize) {
    let mut out = [[0usize; 6]; 24];
    out[0] = SYMMETRIES[0];
    let mut len = 1;
    let mut head = 0;
    while head < len {
        let mut g = 0;
        while g < SYMMETRIES.len() {
            let cand = compose(&out[head], &SYMMETRIES[g]);
            let mut seen = false;
            let mut j = 0;
            while j < len {
                if same(&out[j], &cand) {
                    seen = true;
                }
                j += 1;
            }
            if !seen {
                out[len] = cand;
                len += 1;
            }
            g += 1;
        }
        head += 1;
    }
    (out, len)
}

const ORBIT: ([[usize; 6]; 24], usize) = closure();

/// Every index map in the group generated by [`SYMMETRIES`].
pub fn symmetry_group() -> &'static [[usize; 6]] {
    &ORBIT.0[..ORBIT.1]
}

/// An ordered 6-tuple of colors `(a1, …, a6)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Tuple6(pub [u32; 6]);

impl Tuple6 {
    pub const fn new(a: [u32; 6]) -> Self {
        Tuple6(a)
    }

    pub const fn splat(a: u32) -> Self {
        Tuple6([a; 6])
    }

    pub fn entries(&self) -> [u32; 6] {
        self.0
    }

    /// Face half-sums `T1..T4`, floored; exact when the tuple is admissible.
    pub fn t(&self) -> [u32; 4] {
        let a = &self.0;
        FACES.map(|f| (a[f[0]] + a[f[1]] + a[f[2]]) / 2)
    }

    /// Quadrilateral half-sums `Q1..Q3`.
    pub fn q(&self) -> [u32; 3] {
        let a = &self.0;
        [(a[0] + a[1] + a[3] + a[4]) / 2, (a[0] + a[2] + a[3] + a[5]) / 2, (a[1] + a[2] + a[4] + a[5]) / 2]
    }

    pub fn face(&self, f: usize) -> [u32; 3] {
        FACES[f].map(|i| self.0[i])
    }

    /// Image under an index map from [`symmetry_group`].
    pub fn permuted(&self, map: &[usize; 6]) -> Tuple6 {
        Tuple6(map.map(|i| self.0[i]))
    }

    pub fn canonical_key(&self) -> CanonicalKey {
        let mut best = self.0;
        for map in symmetry_group() {
            let cand = map.map(|i| self.0[i]);
            if cand < best {
                best = cand;
            }
        }
        CanonicalKey(best)
    }

    /// Range `max T_i ..= min Q_j` of the alternating sum.
    pub fn summation_range(&self) -> (u32, u32) {
        (self.t().into_iter().max().unwrap_or(0), self.q().into_iter().min().unwrap_or(0))
    }
}

impl fmt::Display for Tuple6 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let a = &self.0;
        write!(f, "({},{},{},{},{},{})", a[0], a[1], a[2], a[3], a[4], a[5])
    }
}

/// Lexicographically least tuple in the symmetry orbit.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CanonicalKey(pub [u32; 6]);

fn triple_failure(a1: u32, a2: u32, a3: u32, r: u32) -> Option<TripleFailure> {
    let s = a1 + a2 + a3;
    if s % 2 != 0 {
        Some(TripleFailure::OddSum)
    } else if s > 2 * (r - 2) {
        Some(TripleFailure::SumTooLarge)
    } else if a1 + a2 < a3 || a1 + a3 < a2 || a2 + a3 < a1 {
        Some(TripleFailure::Triangle)
    } else {
        None
    }
}

fn check_colors(r: u32, colors: &[u32]) -> Result<(), Error> {
    for &c in colors {
        if c > r - 2 {
            return Err(Error::ColorOutOfRange { color: c, max: r - 2 });
        }
    }
    Ok(())
}

fn check_r(r: u32) -> Result<(), Error> {
    if r < 3 || r % 2 == 0 {
        Err(Error::InvalidRoot(r))
    } else {
        Ok(())
    }
}

/// Parity, upper-bound and triangle conditions on a color triple.
///
/// Errors only when a color lies outside `I_r`.
pub fn triple_admissible(r: u32, a1: u32, a2: u32, a3: u32) -> Result<bool, Error> {
    check_r(r)?;
    check_colors(r, &[a1, a2, a3])?;
    Ok(triple_failure(a1, a2, a3, r).is_none())
}

/// Like [`triple_admissible`] but reports the failing condition as an error.
pub fn check_triple(r: u32, a1: u32, a2: u32, a3: u32) -> Result<(), Error> {
    check_r(r)?;
    check_colors(r, &[a1, a2, a3])?;
    match triple_failure(a1, a2, a3, r) {
        None => Ok(()),
        Some(reason) => Err(Error::NotAdmissible { triple: [a1, a2, a3], reason }),
    }
}

/// Fast predicate for callers that already know `r` is valid and colors are in range.
#[inline]
pub(crate) fn triple_ok(r: u32, a1: u32, a2: u32, a3: u32) -> bool {
    triple_failure(a1, a2, a3, r).is_none()
}

pub fn tuple_admissible(r: u32, t: &Tuple6) -> Result<bool, Error> {
    check_r(r)?;
    check_colors(r, &t.0)?;
    Ok((0..4).all(|f| {
        let [a, b, c] = t.face(f);
        triple_failure(a, b, c, r).is_none()
    }))
}

/// Returns the first non-admissible face as an error.
pub fn check_tuple(r: u32, t: &Tuple6) -> Result<(), Error> {
    for f in 0..4 {
        let [a, b, c] = t.face(f);
        check_triple(r, a, b, c)?;
    }
    Ok(())
}

/// Value of a 6j-symbol with its cancellation diagnostics.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SixjEval {
    pub value: QValue,
    /// `log |S_k|` of the largest summand times the prefactor magnitude.
    pub max_term_log: f64,
    /// The alternating sum lost more than nine digits to cancellation.
    pub cancellation: bool,
}

/// Relative size below which a sum counts as cancelled.
pub const CANCELLATION_THRESHOLD: f64 = 1e-9;

/// Summands `S_k` of the alternating sum, `k` over the summation range.
///
/// Terms with `k + 1 ≥ r` vanish because `[r] = 0`.
fn summands(ctx: &RootContext, t: &Tuple6) -> Result<Vec<QValue>, Error> {
    let tt = t.t();
    let qq = t.q();
    let (lo, hi) = t.summation_range();
    if lo > hi {
        return Err(Error::Consistency(alloc::format!("empty summation range for {t}")));
    }
    let r = ctx.r() as usize;
    let mut out = Vec::with_capacity((hi - lo + 1) as usize);
    for k in lo..=hi {
        let k = k as usize;
        if k + 1 >= r {
            out.push(QValue::ZERO);
            continue;
        }
        let num = ctx.fact(k + 1);
        let mut sign = num.sign() * if k % 2 == 0 { 1 } else { -1 };
        let mut log = num.log_mag();
        for &ti in &tt {
            let f = ctx.fact(k - ti as usize);
            sign *= f.sign();
            log -= f.log_mag();
        }
        for &qj in &qq {
            let f = ctx.fact(qj as usize - k);
            sign *= f.sign();
            log -= f.log_mag();
        }
        out.push(QValue::new(0, sign, log));
    }
    Ok(out)
}

fn prefactor(ctx: &RootContext, t: &Tuple6) -> QValue {
    let a = &t.0;
    let total: i64 = a.iter().map(|&x| x as i64).sum();
    let mut p = QValue::new(-total, 1, 0.0);
    for f in 0..4 {
        let [x, y, z] = t.face(f);
        p = p * ctx.delta_unchecked(x, y, z);
    }
    p
}

/// Evaluates the 6j-symbol without memoization.
pub fn evaluate(ctx: &RootContext, t: &Tuple6) -> Result<SixjEval, Error> {
    check_tuple(ctx.r(), t)?;
    let terms = summands(ctx, t)?;
    let sum = qsum(&terms)?;
    let pre = prefactor(ctx, t);
    let max_log = terms.iter().map(|s| s.log_mag()).fold(f64::NEG_INFINITY, f64::max);
    let cancellation = max_log > f64::NEG_INFINITY
        && (sum.is_zero() || sum.log_mag() < max_log + libm::log(CANCELLATION_THRESHOLD));
    Ok(SixjEval { value: pre * sum, max_term_log: pre.log_mag() + max_log, cancellation })
}

/// 6j-symbol value without memoization.
pub fn sixj(ctx: &RootContext, t: &Tuple6) -> Result<QValue, Error> {
    evaluate(ctx, t).map(|e| e.value)
}

/// Sign of each summand `S_k`; `0` for the structurally vanishing terms.
pub fn summand_signs(ctx: &RootContext, t: &Tuple6) -> Result<Vec<i8>, Error> {
    check_tuple(ctx.r(), t)?;
    Ok(summands(ctx, t)?.iter().map(|s| s.sign()).collect())
}

/// True when every nonzero summand has the same sign.
pub fn signs_constant(signs: &[i8]) -> bool {
    let mut nonzero = signs.iter().filter(|&&s| s != 0);
    match nonzero.next() {
        None => true,
        Some(&first) => nonzero.all(|&s| s == first),
    }
}

/// Hypotheses `0 ≤ Q_j − T_i ≤ (r−2)/2` and `(r−2)/2 ≤ T_i ≤ r−2` for all `i, j`.
pub fn hypotheses_ab(r: u32, t: &Tuple6) -> Result<bool, Error> {
    check_tuple(r, t)?;
    let tt = t.t();
    let qq = t.q();
    let half = r as i64 - 2; // compare doubled quantities against r − 2
    let a = tt.iter().all(|&ti| {
        qq.iter().all(|&qj| {
            let d = qj as i64 - ti as i64;
            d >= 0 && 2 * d <= half
        })
    });
    let b = tt.iter().all(|&ti| 2 * ti as i64 >= half && ti as i64 <= r as i64 - 2);
    Ok(a && b)
}

/// Angles `α_i = |π − 2π a_i / r|` with the vertex-sum condition.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DihedralAngles {
    pub alpha: [f64; 6],
    /// `α_i + α_j + α_k ≤ π` around every vertex.
    pub hyperideal: bool,
}

/// Vertex triples are taken to be the admissible face triples `FACES`; each
/// truncation triangle of the hyperideal tetrahedron carries the three edges
/// of one colored triple.
pub fn dihedral_angles(r: u32, t: &Tuple6) -> Result<DihedralAngles, Error> {
    check_tuple(r, t)?;
    let alpha = t.0.map(|a| libm::fabs(PI - 2.0 * PI * a as f64 / r as f64));
    let hyperideal = FACES.iter().all(|f| alpha[f[0]] + alpha[f[1]] + alpha[f[2]] <= PI + 1e-12);
    Ok(DihedralAngles { alpha, hyperideal })
}

/// `(2π/r)·log|value|`.
pub fn growth_of(r: u32, value: &QValue) -> Result<f64, Error> {
    if value.is_zero() {
        return Err(Error::UndefinedGrowth);
    }
    Ok(2.0 * PI / r as f64 * value.log_mag())
}

pub fn growth_rate(ctx: &RootContext, t: &Tuple6) -> Result<f64, Error> {
    growth_of(ctx.r(), &sixj(ctx, t)?)
}

const SHARDS: usize = 64;

type Shard = RwLock<HashMap<CanonicalKey, SixjEval>>;

/// Memoizing 6j evaluator keyed by [`CanonicalKey`].
///
/// The cache is sharded behind reader-writer locks so the evaluator can be
/// shared by reference across worker threads.
pub struct SixjEvaluator {
    ctx: RootContext,
    shards: Vec<Shard>,
    hasher: hashbrown::DefaultHashBuilder,
}

impl SixjEvaluator {
    pub fn new(ctx: RootContext) -> Self {
        SixjEvaluator {
            ctx,
            shards: (0..SHARDS).map(|_| RwLock::new(HashMap::new())).collect(),
            hasher: hashbrown::DefaultHashBuilder::default(),
        }
    }

    pub fn for_r(r: u32) -> Result<Self, Error> {
        RootContext::new(r).map(Self::new)
    }

    pub fn ctx(&self) -> &RootContext {
        &self.ctx
    }

    pub fn r(&self) -> u32 {
        self.ctx.r()
    }

    fn shard(&self, key: &CanonicalKey) -> &Shard {
        let h = self.hasher.hash_one(key);
        &self.shards[(h as usize) % SHARDS]
    }

    /// Evaluation with diagnostics, memoized.
    pub fn eval(&self, t: &Tuple6) -> Result<SixjEval, Error> {
        let key = t.canonical_key();
        let shard = self.shard(&key);
        if let Some(v) = shard.read().get(&key) {
            return Ok(*v);
        }
        let v = evaluate(&self.ctx, &Tuple6(key.0))?;
        shard.write().insert(key, v);
        Ok(v)
    }

    pub fn sixj(&self, t: &Tuple6) -> Result<QValue, Error> {
        self.eval(t).map(|e| e.value)
    }

    pub fn clear_cache(&self) {
        for s in &self.shards {
            s.write().clear();
        }
    }

    pub fn cache_len(&self) -> usize {
        self.shards.iter().map(|s| s.read().len()).sum()
    }
}

impl fmt::Debug for SixjEvaluator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SixjEvaluator").field("r", &self.ctx.r()).field("cached", &self.cache_len()).finish()
    }
}

/// Calls `f` on every admissible 6-tuple at `r`, in lexicographic order.
pub fn for_each_admissible<F: FnMut(Tuple6)>(r: u32, mut f: F) {
    let max = r - 2;
    let ok = |a: u32, b: u32, c: u32| triple_ok(r, a, b, c);
    for a1 in 0..=max {
        for a2 in 0..=max {
            for a3 in 0..=max {
                if !ok(a1, a2, a3) {
                    continue;
                }
                for a4 in 0..=max {
                    for a5 in 0..=max {
                        if !ok(a3, a4, a5) {
                            continue;
                        }
                        for a6 in 0..=max {
                            if ok(a1, a5, a6) && ok(a2, a4, a6) {
                                f(Tuple6([a1, a2, a3, a4, a5, a6]));
                            }
                        }
                    }
                }
            }
        }
    }
}

/// Admissible tuples `(n, m1, m2, n, m3, m4)` with fixed opposite colors `n`.
pub fn for_each_opposite_pair<F: FnMut(Tuple6)>(r: u32, n: u32, mut f: F) {
    let max = r - 2;
    for m1 in 0..=max {
        for m2 in 0..=max {
            if !triple_ok(r, n, m1, m2) {
                continue;
            }
            for m3 in 0..=max {
                if !triple_ok(r, m2, n, m3) {
                    continue;
                }
                for m4 in 0..=max {
                    if triple_ok(r, n, m3, m4) && triple_ok(r, m1, n, m4) {
                        f(Tuple6([n, m1, m2, n, m3, m4]));
                    }
                }
            }
        }
    }
}
