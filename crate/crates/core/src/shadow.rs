//! Colored shadows built from S- and A-piece templates.
//!
//! A shadow here is the combinatorial data the state sum needs: loops,
//! crossings with their four incident regions, loop edges with the two
//! regions they separate, and per-region gleam, corner count and Euler
//! characteristic. Pieces are glued by identifying boundary ports; the
//! region slots adjacent to matched ports merge into one region.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;
use core::fmt;
use core::str::FromStr;

use crate::error::Error;
use crate::qarith::{qsum, QValue};
use crate::sixj::{triple_ok, SixjEvaluator, Tuple6};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PieceKind {
    S,
    A,
}

impl PieceKind {
    pub fn port_count(self) -> usize {
        match self {
            PieceKind::S => 1,
            PieceKind::A => 4,
        }
    }
}

/// Gleam, corner count and Euler characteristic of a region.
///
/// Gleams are half-integers and are stored doubled.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub struct RegionData {
    pub gleam2: i32,
    pub corners: u32,
    pub euler: i32,
}

impl RegionData {
    pub fn gleam(&self) -> f64 {
        self.gleam2 as f64 / 2.0
    }

    /// Doubled modified gleam `2x' = 2x − z`.
    pub fn modified_gleam2(&self) -> i32 {
        self.gleam2 - self.corners as i32
    }

    fn merge(&mut self, other: &RegionData) {
        self.gleam2 += other.gleam2;
        self.corners += other.corners;
        self.euler += other.euler;
    }
}

/// A crossing of two loops; `regions` holds the four incident regions in 6j
/// positions `j, k, m, n`, so the crossing contributes the symbol
/// `(γ(loops[0]), η(j), η(k), γ(loops[1]), η(m), η(n))`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Crossing {
    pub loops: [usize; 2],
    pub regions: [usize; 4],
}

/// An arc of a loop between crossings, with the regions on either side.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Edge {
    pub loop_id: usize,
    pub regions: [usize; 2],
}

/// Local shadow of one gluing piece.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PieceTemplate {
    pub kind: PieceKind,
    /// Both loops of the piece, by local index 0 and 1.
    pub loops: usize,
    pub crossings: Vec<Crossing>,
    pub edges: Vec<Edge>,
    pub regions: Vec<RegionData>,
    /// Region slot adjacent to each boundary port.
    pub ports: Vec<usize>,
}

/// Gleam of a region in a shadow of a link in a trivial bundle when the
/// region picks up one half per corner: `x = z/2`, returned doubled.
///
/// Reconstruction of the local gleam rule; it reproduces both templates.
pub fn gleam2_from_corners(corners: u32) -> i32 {
    corners as i32
}

impl PieceTemplate {
    /// Two loops meeting once on a one-holed torus; one annular region with
    /// four corners and gleam 2.
    pub fn s_piece() -> Self {
        PieceTemplate {
            kind: PieceKind::S,
            loops: 2,
            crossings: vec![Crossing { loops: [0, 1], regions: [0, 0, 0, 0] }],
            edges: vec![Edge { loop_id: 0, regions: [0, 0] }, Edge { loop_id: 1, regions: [0, 0] }],
            regions: vec![RegionData { gleam2: 4, corners: 4, euler: 0 }],
            ports: vec![0],
        }
    }

    /// Two loops meeting twice on a four-holed sphere; four annular regions
    /// with two corners and gleam 1 each. Both crossings see the regions in
    /// the same 6j positions.
    pub fn a_piece() -> Self {
        let c = Crossing { loops: [0, 1], regions: [0, 1, 2, 3] };
        PieceTemplate {
            kind: PieceKind::A,
            loops: 2,
            crossings: vec![c, c],
            // faces (i,j,k), (i,m,n) on loop 0; (j,l,n), (k,l,m) on loop 1
            edges: vec![
                Edge { loop_id: 0, regions: [0, 1] },
                Edge { loop_id: 0, regions: [2, 3] },
                Edge { loop_id: 1, regions: [0, 3] },
                Edge { loop_id: 1, regions: [1, 2] },
            ],
            regions: vec![RegionData { gleam2: 2, corners: 2, euler: 0 }; 4],
            ports: vec![0, 1, 2, 3],
        }
    }

    pub fn of(kind: PieceKind) -> Self {
        match kind {
            PieceKind::S => Self::s_piece(),
            PieceKind::A => Self::a_piece(),
        }
    }
}

/// Boundary port `S<i>.p0` or `A<j>.p0..p3`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Port {
    pub kind: PieceKind,
    pub piece: usize,
    pub index: usize,
}

impl Port {
    pub fn s(piece: usize) -> Self {
        Port { kind: PieceKind::S, piece, index: 0 }
    }

    pub fn a(piece: usize, index: usize) -> Self {
        Port { kind: PieceKind::A, piece, index }
    }
}

impl fmt::Display for Port {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let k = match self.kind {
            PieceKind::S => 'S',
            PieceKind::A => 'A',
        };
        write!(f, "{k}{}.p{}", self.piece, self.index)
    }
}

impl FromStr for Port {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        let bad = || Error::Spec(format!("malformed port name {s:?}"));
        let (head, tail) = s.split_once(".p").ok_or_else(bad)?;
        let kind = match head.as_bytes().first() {
            Some(b'S') => PieceKind::S,
            Some(b'A') => PieceKind::A,
            _ => return Err(bad()),
        };
        let piece = head[1..].parse::<usize>().map_err(|_| bad())?;
        let index = tail.parse::<usize>().map_err(|_| bad())?;
        Ok(Port { kind, piece, index })
    }
}

/// `k` S-pieces and `l` A-pieces with a perfect matching of their ports.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GluingSpec {
    k: usize,
    l: usize,
    matching: Vec<(Port, Port)>,
}

impl GluingSpec {
    pub fn new(k: usize, l: usize, matching: Vec<(Port, Port)>) -> Result<Self, Error> {
        check_counts(k, l)?;
        let ports = all_ports(k, l);
        let mut used = vec![false; ports.len()];
        let index_of = |p: &Port| -> Result<usize, Error> {
            ports.iter().position(|q| q == p).ok_or_else(|| Error::Spec(format!("port {p} does not exist for k={k}, l={l}")))
        };
        for (a, b) in &matching {
            if a == b {
                return Err(Error::Spec(format!("port {a} matched to itself")));
            }
            for p in [a, b] {
                let i = index_of(p)?;
                if used[i] {
                    return Err(Error::Spec(format!("port {p} used more than once")));
                }
                used[i] = true;
            }
        }
        if let Some(i) = used.iter().position(|u| !u) {
            return Err(Error::Spec(format!("port {} is unmatched", ports[i])));
        }
        Ok(GluingSpec { k, l, matching })
    }

    /// Canonical pairing: S-pieces in consecutive pairs `(S0,S1), (S2,S3), …`,
    /// and each A-piece closed up on itself by `(p0,p1), (p2,p3)`. With `k`
    /// even no ports are left over.
    pub fn auto(k: usize, l: usize) -> Result<Self, Error> {
        check_counts(k, l)?;
        let mut m = Vec::new();
        for i in (0..k).step_by(2) {
            m.push((Port::s(i), Port::s(i + 1)));
        }
        for j in 0..l {
            m.push((Port::a(j, 0), Port::a(j, 1)));
            m.push((Port::a(j, 2), Port::a(j, 3)));
        }
        Self::new(k, l, m)
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn l(&self) -> usize {
        self.l
    }

    pub fn matching(&self) -> &[(Port, Port)] {
        &self.matching
    }

    /// `k + 2l`, the number of crossings.
    pub fn complexity(&self) -> usize {
        self.k + 2 * self.l
    }
}

fn check_counts(k: usize, l: usize) -> Result<(), Error> {
    if k % 2 != 0 {
        return Err(Error::Spec("k must be even".to_string()));
    }
    if k == 0 && l == 0 {
        return Err(Error::Spec("at least one piece is required (k = l = 0)".to_string()));
    }
    Ok(())
}

/// Every port in canonical order: S-pieces first, then A-pieces.
pub fn all_ports(k: usize, l: usize) -> Vec<Port> {
    let mut v: Vec<Port> = (0..k).map(Port::s).collect();
    for j in 0..l {
        v.extend((0..4).map(|i| Port::a(j, i)));
    }
    v
}

/// Disjoint-set forest over region slots.
#[derive(Clone, Debug)]
pub(crate) struct UnionFind {
    parent: Vec<usize>,
    rank: Vec<u8>,
}

impl UnionFind {
    pub(crate) fn new(n: usize) -> Self {
        UnionFind { parent: (0..n).collect(), rank: vec![0; n] }
    }

    pub(crate) fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    pub(crate) fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        match self.rank[ra].cmp(&self.rank[rb]) {
            core::cmp::Ordering::Less => self.parent[ra] = rb,
            core::cmp::Ordering::Greater => self.parent[rb] = ra,
            core::cmp::Ordering::Equal => {
                self.parent[rb] = ra;
                self.rank[ra] += 1;
            }
        }
        true
    }
}

/// A shadow with merged regions, ready for state-sum evaluation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ShadowGraph {
    loops: usize,
    crossings: Vec<Crossing>,
    edges: Vec<Edge>,
    regions: Vec<RegionData>,
    spec: Option<GluingSpec>,
}

impl ShadowGraph {
    /// Assembles a shadow from explicit parts, checking index ranges.
    pub fn from_parts(
        loops: usize,
        crossings: Vec<Crossing>,
        edges: Vec<Edge>,
        regions: Vec<RegionData>,
    ) -> Result<Self, Error> {
        let nreg = regions.len();
        for c in &crossings {
            if c.loops.iter().any(|&l| l >= loops) || c.regions.iter().any(|&x| x >= nreg) {
                return Err(Error::Consistency(format!("crossing {c:?} references a missing loop or region")));
            }
        }
        for e in &edges {
            if e.loop_id >= loops || e.regions.iter().any(|&x| x >= nreg) {
                return Err(Error::Consistency(format!("edge {e:?} references a missing loop or region")));
            }
        }
        Ok(ShadowGraph { loops, crossings, edges, regions, spec: None })
    }

    /// The sphere with no loops and zero gleam: one region, Euler characteristic 2.
    pub fn sphere() -> Self {
        ShadowGraph {
            loops: 0,
            crossings: Vec::new(),
            edges: Vec::new(),
            regions: vec![RegionData { gleam2: 0, corners: 0, euler: 2 }],
            spec: None,
        }
    }

    pub fn loop_count(&self) -> usize {
        self.loops
    }

    pub fn crossings(&self) -> &[Crossing] {
        &self.crossings
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn regions(&self) -> &[RegionData] {
        &self.regions
    }

    pub fn spec(&self) -> Option<&GluingSpec> {
        self.spec.as_ref()
    }

    /// `Σ gleams − 2·#crossings`, doubled.
    pub fn total_gleam2(&self) -> i64 {
        self.regions.iter().map(|r| r.gleam2 as i64).sum::<i64>() - 4 * self.crossings.len() as i64
    }

    /// Whether the region factor `v^χ·exp(2u x')` is identically 1.
    pub fn trivial_region_factors(&self) -> bool {
        self.regions.iter().all(|r| r.euler == 0 && r.modified_gleam2() == 0)
    }

    fn check_coloring(&self, gamma: &[u32], eta: &[u32]) -> Result<(), Error> {
        if gamma.len() != self.loops {
            return Err(Error::ColoringLength { expected: self.loops, got: gamma.len() });
        }
        if eta.len() != self.regions.len() {
            return Err(Error::ColoringLength { expected: self.regions.len(), got: eta.len() });
        }
        Ok(())
    }

    /// Every edge triple `(γ(e), η(X), η(X'))` is admissible.
    pub fn is_admissible(&self, r: u32, gamma: &[u32], eta: &[u32]) -> bool {
        let max = r - 2;
        gamma.iter().chain(eta).all(|&c| c <= max)
            && self.edges.iter().all(|e| triple_ok(r, gamma[e.loop_id], eta[e.regions[0]], eta[e.regions[1]]))
    }
}

/// Glues the templates along `spec` and audits the result.
pub fn build_shadow(spec: &GluingSpec) -> Result<ShadowGraph, Error> {
    let (k, l) = (spec.k, spec.l);
    let mut pieces = Vec::new();
    pieces.extend((0..k).map(|_| PieceTemplate::s_piece()));
    pieces.extend((0..l).map(|_| PieceTemplate::a_piece()));

    let mut slot_base = Vec::with_capacity(pieces.len());
    let mut slots = Vec::new();
    let mut loop_base = Vec::with_capacity(pieces.len());
    let mut loops = 0;
    for p in &pieces {
        slot_base.push(slots.len());
        slots.extend_from_slice(&p.regions);
        loop_base.push(loops);
        loops += p.loops;
    }
    let piece_index = |port: &Port| match port.kind {
        PieceKind::S => port.piece,
        PieceKind::A => k + port.piece,
    };
    let slot_of = |port: &Port| {
        let pi = piece_index(port);
        slot_base[pi] + pieces[pi].ports[port.index]
    };

    let mut uf = UnionFind::new(slots.len());
    for (a, b) in &spec.matching {
        uf.union(slot_of(a), slot_of(b));
    }
    // merged ids in order of first slot
    let mut merged_id = vec![usize::MAX; slots.len()];
    let mut regions: Vec<RegionData> = Vec::new();
    for s in 0..slots.len() {
        let root = uf.find(s);
        if merged_id[root] == usize::MAX {
            merged_id[root] = regions.len();
            regions.push(RegionData::default());
        }
        let id = merged_id[root];
        merged_id[s] = id;
        regions[id].merge(&slots[s]);
    }

    let mut crossings = Vec::new();
    let mut edges = Vec::new();
    for (pi, p) in pieces.iter().enumerate() {
        let lb = loop_base[pi];
        let sb = slot_base[pi];
        for c in &p.crossings {
            crossings.push(Crossing { loops: c.loops.map(|x| lb + x), regions: c.regions.map(|x| merged_id[sb + x]) });
        }
        for e in &p.edges {
            edges.push(Edge { loop_id: lb + e.loop_id, regions: e.regions.map(|x| merged_id[sb + x]) });
        }
    }

    let g = ShadowGraph { loops, crossings, edges, regions, spec: Some(spec.clone()) };
    audit(&g, spec, slots.len())?;
    Ok(g)
}

fn audit(g: &ShadowGraph, spec: &GluingSpec, slot_count: usize) -> Result<(), Error> {
    let fail = |m: String| Err(Error::Consistency(m));
    if g.loops != 2 * (spec.k + spec.l) {
        return fail(format!("{} loops, expected {}", g.loops, 2 * (spec.k + spec.l)));
    }
    if g.crossings.len() != spec.complexity() {
        return fail(format!("{} crossings, expected {}", g.crossings.len(), spec.complexity()));
    }
    let gleam2: i64 = g.regions.iter().map(|r| r.gleam2 as i64).sum();
    if gleam2 != 2 * (2 * spec.k as i64 + 4 * spec.l as i64) {
        return fail(format!("total region gleam {} != 2k + 4l", gleam2 as f64 / 2.0));
    }
    if g.total_gleam2() != 0 {
        return fail(format!("total gleam {} != 0", g.total_gleam2() as f64 / 2.0));
    }
    if let Some(r) = g.regions.iter().find(|r| r.euler != 0 || r.modified_gleam2() != 0) {
        return fail(format!("region {r:?} has nonzero euler characteristic or modified gleam"));
    }
    if g.regions.len() != slot_count - spec.matching.len() {
        return fail(format!("{} merged regions, expected {}", g.regions.len(), slot_count - spec.matching.len()));
    }
    Ok(())
}

/// Colors of the merged regions.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SurfaceColoring(pub Vec<u32>);

impl SurfaceColoring {
    pub fn colors(&self) -> &[u32] {
        &self.0
    }
}

/// The 6-tuple `(i, j, k, l, m, n)` seen by a crossing.
pub fn crossing_tuple(crossing: &Crossing, gamma: &[u32], eta: &[u32]) -> Tuple6 {
    let [a, b] = crossing.loops;
    let [j, k, m, n] = crossing.regions;
    Tuple6([gamma[a], eta[j], eta[k], gamma[b], eta[m], eta[n]])
}

/// `v_j = (−1)^j [j+1]`.
fn v_color(ev: &SixjEvaluator, j: u32) -> QValue {
    let q = ev.ctx().qint(j as i64 + 1).unwrap_or(QValue::ZERO);
    if j % 2 == 1 {
        q.neg()
    } else {
        q
    }
}

/// `v_j^χ · exp(2 u_j x')` with `u_j = π√−1 (j/2)(1 − (j+2)/r)`.
///
/// The exponential is a quarter-turn phase exactly when
/// `r | j (r − j − 2) · 2x'`; other phases are rejected.
pub fn region_factor(ev: &SixjEvaluator, region: &RegionData, color: u32) -> Result<QValue, Error> {
    let mut f = if region.euler == 0 { QValue::ONE } else { v_color(ev, color).powi(region.euler) };
    let g2 = region.modified_gleam2() as i64;
    if g2 != 0 {
        // 2 u_j x' = i π j (r − j − 2) (2x') / (2r); in quarter turns: j (r − j − 2)(2x') / r
        let r = ev.r() as i64;
        let j = color as i64;
        let num = j * (r - j - 2) * g2;
        if num % r != 0 {
            return Err(Error::UnsupportedPhase);
        }
        f = f * QValue::new(num / r, 1, 0.0);
    }
    Ok(f)
}

/// Region phase in radians, for the complex oracle.
pub(crate) fn region_phase_radians(r: u32, region: &RegionData, color: u32) -> f64 {
    let j = color as f64;
    let r = r as f64;
    PI * j * (1.0 - (j + 2.0) / r) * region.modified_gleam2() as f64 / 2.0
}

/// Single state `∏ crossings · ∏ region factors` for an admissible coloring.
pub fn state(ev: &SixjEvaluator, g: &ShadowGraph, gamma: &[u32], eta: &[u32]) -> Result<QValue, Error> {
    g.check_coloring(gamma, eta)?;
    let r = ev.r();
    if gamma.iter().chain(eta).any(|&c| c > r - 2) {
        let c = *gamma.iter().chain(eta).find(|&&c| c > r - 2).unwrap();
        return Err(Error::ColorOutOfRange { color: c, max: r - 2 });
    }
    for e in &g.edges {
        let t = [gamma[e.loop_id], eta[e.regions[0]], eta[e.regions[1]]];
        crate::sixj::check_triple(r, t[0], t[1], t[2])?;
    }
    let mut v = QValue::ONE;
    for c in &g.crossings {
        v = v * ev.sixj(&crossing_tuple(c, gamma, eta))?;
    }
    if !g.trivial_region_factors() {
        for (x, reg) in g.regions.iter().enumerate() {
            v = v * region_factor(ev, reg, eta[x])?;
        }
    }
    Ok(v)
}

/// Lexicographic enumeration of admissible surface colorings with per-edge
/// pruning: an edge is checked as soon as its later region is colored.
#[derive(Clone, Debug)]
pub struct AdmissibleColorings<'a> {
    r: u32,
    gamma: &'a [u32],
    regions: Vec<usize>,
    /// per position, edges `(loop color, other position)` whose later end is here
    checks: Vec<Vec<(u32, usize)>>,
    colors: Vec<u32>,
    full: Vec<u32>,
    /// inclusive color range of the first tracked region
    first: (u32, u32),
    started: bool,
    done: bool,
}

impl<'a> AdmissibleColorings<'a> {
    fn new(g: &ShadowGraph, r: u32, gamma: &'a [u32], regions: Vec<usize>, first: Option<u32>) -> Self {
        let pos_of = |x: usize| regions.iter().position(|&y| y == x);
        let mut checks = vec![Vec::new(); regions.len()];
        for e in &g.edges {
            if let (Some(a), Some(b)) = (pos_of(e.regions[0]), pos_of(e.regions[1])) {
                checks[a.max(b)].push((gamma[e.loop_id], a.min(b)));
            }
        }
        let n = regions.len();
        AdmissibleColorings {
            r,
            gamma,
            regions,
            checks,
            colors: vec![0; n],
            full: vec![0; g.regions.len()],
            first: first.map_or((0, r - 2), |c| (c, c)),
            started: false,
            done: gamma.iter().any(|&c| c > r - 2),
        }
    }

    fn ok_at(&self, pos: usize) -> bool {
        let c = self.colors[pos];
        self.checks[pos].iter().all(|&(lc, other)| triple_ok(self.r, lc, c, self.colors[other]))
    }

    /// Increments the color at `pos`, backtracking on overflow.
    fn bump(&mut self, pos: &mut usize) -> bool {
        loop {
            let limit = if *pos == 0 { self.first.1 } else { self.r - 2 };
            if self.colors[*pos] < limit {
                self.colors[*pos] += 1;
                return true;
            }
            if *pos == 0 {
                return false;
            }
            *pos -= 1;
        }
    }

    /// Advances to the next admissible assignment of the tracked regions.
    fn advance(&mut self) -> bool {
        let n = self.colors.len();
        if n == 0 {
            let fresh = !self.started;
            self.started = true;
            return fresh;
        }
        let mut pos = 0;
        if !self.started {
            self.started = true;
            self.colors[0] = self.first.0;
        } else {
            pos = n - 1;
            if !self.bump(&mut pos) {
                return false;
            }
        }
        loop {
            if self.ok_at(pos) {
                if pos + 1 == n {
                    return true;
                }
                pos += 1;
                self.colors[pos] = 0;
            } else if !self.bump(&mut pos) {
                return false;
            }
        }
    }

    pub(crate) fn next_colors(&mut self) -> Option<&[u32]> {
        if self.done || !self.advance() {
            self.done = true;
            return None;
        }
        for (p, &x) in self.regions.iter().enumerate() {
            self.full[x] = self.colors[p];
        }
        Some(&self.full)
    }

    pub fn gamma(&self) -> &[u32] {
        self.gamma
    }
}

impl Iterator for AdmissibleColorings<'_> {
    type Item = SurfaceColoring;

    fn next(&mut self) -> Option<SurfaceColoring> {
        self.next_colors().map(|c| SurfaceColoring(c.to_vec()))
    }
}

/// All admissible colorings of every merged region, lexicographic by region id.
pub fn enumerate_admissible<'a>(g: &ShadowGraph, r: u32, gamma: &'a [u32]) -> Result<AdmissibleColorings<'a>, Error> {
    if gamma.len() != g.loops {
        return Err(Error::ColoringLength { expected: g.loops, got: gamma.len() });
    }
    Ok(AdmissibleColorings::new(g, r, gamma, (0..g.regions.len()).collect(), None))
}

/// Regions coupled through a crossing or an edge.
pub(crate) fn components(g: &ShadowGraph) -> Vec<Vec<usize>> {
    let n = g.regions.len();
    let mut uf = UnionFind::new(n);
    for c in &g.crossings {
        for w in c.regions.windows(2) {
            uf.union(w[0], w[1]);
        }
    }
    for e in &g.edges {
        uf.union(e.regions[0], e.regions[1]);
    }
    let mut out: Vec<Vec<usize>> = Vec::new();
    let mut id = vec![usize::MAX; n];
    for x in 0..n {
        let root = uf.find(x);
        if id[root] == usize::MAX {
            id[root] = out.len();
            out.push(Vec::new());
        }
        out[id[root]].push(x);
    }
    out
}

/// Summary of a state sum: the value, `Σ|state|`, the number of admissible
/// colorings, and whether every nonzero state has the same phase and sign.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StateSumReport {
    pub value: QValue,
    pub abs_sum: QValue,
    pub count: u64,
    pub uniform_sign: bool,
}

impl StateSumReport {
    /// `|value|` agrees with `Σ|state|` to the given relative tolerance.
    pub fn no_cancellation(&self, rel: f64) -> bool {
        self.value.abs().approx_eq(&self.abs_sum, rel)
    }
}

struct ComponentPlan {
    regions: Vec<usize>,
    crossings: Vec<usize>,
}

fn plan(g: &ShadowGraph) -> Vec<ComponentPlan> {
    components(g)
        .into_iter()
        .map(|regions| {
            let crossings =
                (0..g.crossings.len()).filter(|&c| regions.contains(&g.crossings[c].regions[0])).collect();
            ComponentPlan { regions, crossings }
        })
        .collect()
}

/// States of one component in lexicographic order, optionally restricted to
/// colorings whose first region has color `first`.
fn component_states(
    ev: &SixjEvaluator,
    g: &ShadowGraph,
    gamma: &[u32],
    comp: &ComponentPlan,
    first: Option<u32>,
) -> Result<Vec<QValue>, Error> {
    let mut it = AdmissibleColorings::new(g, ev.r(), gamma, comp.regions.clone(), first);
    let trivial = g.trivial_region_factors();
    let mut out = Vec::new();
    while let Some(eta) = it.next_colors() {
        out.push(component_state(ev, g, gamma, eta, comp, trivial)?);
    }
    Ok(out)
}

fn component_state(
    ev: &SixjEvaluator,
    g: &ShadowGraph,
    gamma: &[u32],
    eta: &[u32],
    comp: &ComponentPlan,
    trivial: bool,
) -> Result<QValue, Error> {
    let mut v = QValue::ONE;
    for &c in &comp.crossings {
        v = v * ev.sixj(&crossing_tuple(&g.crossings[c], gamma, eta))?;
    }
    if !trivial {
        for &x in &comp.regions {
            v = v * region_factor(ev, &g.regions[x], eta[x])?;
        }
    }
    Ok(v)
}

fn summarize(states: &[QValue]) -> Result<StateSumReport, Error> {
    let value = qsum(states)?;
    let abs: Vec<QValue> = states.iter().map(|s| s.abs()).collect();
    let abs_sum = qsum(&abs)?;
    let mut first: Option<(u8, i8)> = None;
    let mut uniform = true;
    for s in states.iter().filter(|s| !s.is_zero()) {
        let key = (s.phase_quarter(), s.sign());
        match first {
            None => first = Some(key),
            Some(k) if k != key => uniform = false,
            _ => {}
        }
    }
    Ok(StateSumReport { value, abs_sum, count: states.len() as u64, uniform_sign: uniform })
}

fn combine(parts: &[StateSumReport]) -> StateSumReport {
    let mut out = StateSumReport { value: QValue::ONE, abs_sum: QValue::ONE, count: 1, uniform_sign: true };
    for p in parts {
        out.value = out.value * p.value;
        out.abs_sum = out.abs_sum * p.abs_sum;
        out.count *= p.count;
        out.uniform_sign &= p.uniform_sign;
    }
    if out.count == 0 {
        out.value = QValue::ZERO;
        out.abs_sum = QValue::ZERO;
        out.uniform_sign = true;
    }
    out
}

/// State sum with diagnostics. The sum factorizes over groups of regions
/// that share no crossing or edge; each group is enumerated separately.
pub fn state_sum_report(ev: &SixjEvaluator, g: &ShadowGraph, gamma: &[u32]) -> Result<StateSumReport, Error> {
    if gamma.len() != g.loops {
        return Err(Error::ColoringLength { expected: g.loops, got: gamma.len() });
    }
    let mut parts = Vec::new();
    for comp in plan(g) {
        let states = component_states(ev, g, gamma, &comp, None)?;
        parts.push(summarize(&states)?);
    }
    Ok(combine(&parts))
}

/// `Σ_η state(γ, η)` over admissible surface colorings; exact zero when none exist.
pub fn state_sum(ev: &SixjEvaluator, g: &ShadowGraph, gamma: &[u32]) -> Result<QValue, Error> {
    state_sum_report(ev, g, gamma).map(|r| r.value)
}

/// Parallel [`state_sum_report`], partitioned by the first region color of
/// each group. Partition results are concatenated in order before summing,
/// so the result is bit-identical to the serial one.
#[cfg(feature = "parallel")]
pub fn state_sum_report_par(ev: &SixjEvaluator, g: &ShadowGraph, gamma: &[u32]) -> Result<StateSumReport, Error> {
    use rayon::prelude::*;
    if gamma.len() != g.loops {
        return Err(Error::ColoringLength { expected: g.loops, got: gamma.len() });
    }
    let mut parts = Vec::new();
    for comp in plan(g) {
        let chunks: Vec<Result<Vec<QValue>, Error>> =
            (0..=ev.r() - 2).into_par_iter().map(|c| component_states(ev, g, gamma, &comp, Some(c))).collect();
        let mut states = Vec::new();
        for c in chunks {
            states.extend(c?);
        }
        parts.push(summarize(&states)?);
    }
    Ok(combine(&parts))
}
