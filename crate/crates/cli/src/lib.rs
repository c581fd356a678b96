//! `qshadow` command line: 6j-symbols, lemma sweeps, shadows, RT/TV values
//! and growth-series CSV.

pub mod format;
pub mod gluing;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use qshadow_core::invariants::{self, GrowthKind, GrowthSeries};
use qshadow_core::lemmas::{self, SummandScope};
use qshadow_core::sixj::{self, Tuple6};
use qshadow_core::{build_shadow, oracle, Error, GluingSpec, Precision, RootContext, ShadowGraph, SixjEvaluator};

use crate::format::{g15, write_series};

/// Environment variable holding the default worker count.
pub const THREADS_ENV: &str = "QSHADOW_THREADS";

/// Largest `r` at which the lemma sweep checks summand signs on every
/// admissible tuple; above it only `(n_r, m1, m2, n_r, m3, m4)` is swept.
pub const EXHAUSTIVE_SUMMAND_MAX_R: u32 = 31;

#[derive(Debug, Parser)]
#[command(name = "qshadow", version, about = "Quantum 6j-symbols, shadow state sums and Turaev-Viro growth rates")]
pub struct Cli {
    /// Worker threads (default: all cores)
    #[arg(long, global = true, env = THREADS_ENV)]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate one 6j-symbol with diagnostics
    Sixj(SixjArgs),
    /// Realness, sign-constancy and summand-sign sweeps
    Lemmas(LemmaArgs),
    /// Describe the glued shadow
    Shadow(ShadowArgs),
    /// Relative RT value (state sum) at one link coloring
    Rt(RtArgs),
    /// Turaev-Viro growth series as CSV
    Tv(SeriesArgs),
    /// Diagonal state-sum growth series as CSV
    Diagonal(SeriesArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PrecisionArg {
    Standard,
    Extended,
}

impl From<PrecisionArg> for Precision {
    fn from(p: PrecisionArg) -> Self {
        match p {
            PrecisionArg::Standard => Precision::Standard,
            PrecisionArg::Extended => Precision::Extended,
        }
    }
}

#[derive(Debug, Args)]
pub struct SixjArgs {
    #[arg(long)]
    pub r: u32,
    /// Six comma-separated colors `i,j,k,l,m,n`
    #[arg(long)]
    pub tuple: String,
    /// Also print the brute-force complex value
    #[arg(long)]
    pub naive: bool,
    #[arg(long, value_enum, default_value = "standard")]
    pub precision: PrecisionArg,
}

#[derive(Debug, Args)]
pub struct RSelect {
    /// Single odd r >= 5
    #[arg(long, conflicts_with = "r_range")]
    pub r: Option<u32>,
    /// `start:stop:step` over odd r (start odd, step even)
    #[arg(long)]
    pub r_range: Option<String>,
}

#[derive(Debug, Args)]
pub struct LemmaArgs {
    #[command(flatten)]
    pub rs: RSelect,
    /// Flip the expected diagonal sign (harness self-test)
    #[arg(long, hide = true)]
    pub inject_fault: bool,
}

#[derive(Debug, Args)]
pub struct PieceArgs {
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long)]
    pub l: Option<usize>,
    /// `auto` or a JSON gluing-spec file
    #[arg(long, default_value = "auto")]
    pub matching: String,
}

#[derive(Debug, Args)]
pub struct ShadowArgs {
    #[command(flatten)]
    pub pieces: PieceArgs,
}

#[derive(Debug, Args)]
pub struct RtArgs {
    #[command(flatten)]
    pub pieces: PieceArgs,
    #[arg(long)]
    pub r: u32,
    /// Comma-separated loop colors; defaults to the diagonal `n_r`
    #[arg(long)]
    pub gamma: Option<String>,
    #[arg(long)]
    pub naive: bool,
    #[arg(long, value_enum, default_value = "standard")]
    pub precision: PrecisionArg,
}

#[derive(Debug, Args)]
pub struct SeriesArgs {
    #[command(flatten)]
    pub pieces: PieceArgs,
    #[command(flatten)]
    pub rs: RSelect,
    /// Output CSV path (default: stdout)
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Use the brute-force oracle (small r only)
    #[arg(long)]
    pub naive: bool,
    #[arg(long, value_enum, default_value = "standard")]
    pub precision: PrecisionArg,
}

/// A failed property check, as opposed to bad input.
#[derive(Debug)]
pub struct Violation(pub String);

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Violation {}

/// 1 for property violations, 2 for everything else.
pub fn exit_code(err: &anyhow::Error) -> i32 {
    if err.downcast_ref::<Violation>().is_some() {
        return 1;
    }
    match err.downcast_ref::<Error>() {
        Some(Error::InvariantViolation(_)) | Some(Error::Consistency(_)) => 1,
        _ => 2,
    }
}

pub fn run(cli: Cli, out: &mut dyn Write) -> Result<()> {
    let pool = {
        let mut b = rayon::ThreadPoolBuilder::new();
        if let Some(n) = cli.threads {
            if n == 0 {
                bail!(Error::Spec("--threads must be at least 1".into()));
            }
            b = b.num_threads(n);
        }
        b.build().context("building thread pool")?
    };
    // commands write into a buffer so the pool closure stays `Send`
    let mut buf: Vec<u8> = Vec::new();
    let res = pool.install(|| {
        let w: &mut dyn Write = &mut buf;
        match cli.command {
            Command::Sixj(a) => cmd_sixj(&a, w),
            Command::Lemmas(a) => cmd_lemmas(&a, w),
            Command::Shadow(a) => cmd_shadow(&a, w),
            Command::Rt(a) => cmd_rt(&a, w),
            Command::Tv(a) => cmd_series(GrowthKind::Tv, &a, w),
            Command::Diagonal(a) => cmd_series(GrowthKind::Diagonal, &a, w),
        }
    });
    out.write_all(&buf)?;
    out.flush()?;
    res
}

fn parse_colors(s: &str) -> Result<Vec<u32>> {
    s.split(',')
        .map(|x| x.trim().parse::<u32>().map_err(|_| anyhow!(Error::Spec(format!("bad color {x:?} in {s:?}")))))
        .collect()
}

fn check_r(r: u32) -> Result<u32> {
    if r < 5 || r % 2 == 0 {
        bail!(Error::Spec(format!("r must be odd and >= 5, got {r}")));
    }
    Ok(r)
}

/// `start:stop:step` with odd `start ≥ 5` and even `step`.
pub fn parse_r_range(s: &str) -> Result<Vec<u32>> {
    let parts: Vec<&str> = s.split(':').collect();
    let bad = || anyhow!(Error::Spec(format!("r-range must be start:stop:step, got {s:?}")));
    if parts.len() != 3 {
        return Err(bad());
    }
    let nums: Vec<u32> = parts.iter().map(|p| p.trim().parse::<u32>()).collect::<Result<_, _>>().map_err(|_| bad())?;
    let (start, stop, step) = (nums[0], nums[1], nums[2]);
    check_r(start)?;
    if step == 0 || step % 2 == 1 {
        bail!(Error::Spec(format!("r-range step must be even and positive, got {step}")));
    }
    if stop < start {
        bail!(Error::Spec(format!("r-range is empty: {s}")));
    }
    Ok(invariants::odd_range(start, stop, step))
}

fn r_list(sel: &RSelect, default: &str) -> Result<Vec<u32>> {
    match (&sel.r, &sel.r_range) {
        (Some(r), None) => Ok(vec![check_r(*r)?]),
        (None, Some(range)) => parse_r_range(range),
        (None, None) => parse_r_range(default),
        (Some(_), Some(_)) => bail!(Error::Spec("give --r or --r-range, not both".into())),
    }
}

fn resolve_spec(p: &PieceArgs) -> Result<GluingSpec> {
    if p.matching == "auto" {
        let (Some(k), Some(l)) = (p.k, p.l) else {
            bail!(Error::Spec("--k and --l are required with --matching auto".into()));
        };
        return Ok(GluingSpec::auto(k, l)?);
    }
    let spec = gluing::load_spec(std::path::Path::new(&p.matching))?;
    for (flag, given, file) in [("k", p.k, spec.k()), ("l", p.l, spec.l())] {
        if given.is_some_and(|v| v != file) {
            bail!(Error::Spec(format!("--{flag} {} disagrees with {flag} = {file} in {}", given.unwrap(), p.matching)));
        }
    }
    Ok(spec)
}

fn evaluator(r: u32, p: PrecisionArg) -> Result<SixjEvaluator> {
    Ok(SixjEvaluator::new(RootContext::with_precision(r, p.into())?))
}

fn print_value(out: &mut dyn Write, v: &qshadow_core::QValue) -> io::Result<()> {
    writeln!(out, "phase_quarter: {}", v.phase_quarter())?;
    writeln!(out, "sign: {}", v.sign())?;
    writeln!(out, "log_mag: {}", g15(v.log_mag()))?;
    match v.to_f64() {
        Some(x) if v.is_real() => writeln!(out, "value: {}", g15(x)),
        Some(x) => writeln!(out, "value: {}i", g15(x)),
        None => writeln!(out, "value: (outside f64 range)"),
    }
}

fn cmd_sixj(a: &SixjArgs, out: &mut dyn Write) -> Result<()> {
    let r = a.r;
    let colors = parse_colors(&a.tuple)?;
    let t = Tuple6(colors.try_into().map_err(|_| anyhow!(Error::Spec("--tuple needs six colors".into())))?);
    let ev = evaluator(r, a.precision)?;
    let e = ev.eval(&t)?;
    writeln!(out, "tuple: {t}")?;
    writeln!(out, "r: {r}")?;
    print_value(out, &e.value)?;
    match sixj::growth_of(r, &e.value) {
        Ok(g) => writeln!(out, "growth: {}", g15(g))?,
        Err(_) => writeln!(out, "growth: undefined")?,
    }
    writeln!(out, "cancellation: {}", e.cancellation)?;
    writeln!(out, "hypotheses_ab: {}", sixj::hypotheses_ab(r, &t)?)?;
    let d = sixj::dihedral_angles(r, &t)?;
    let angles: Vec<String> = d.alpha.iter().map(|x| g15(*x)).collect();
    writeln!(out, "dihedral: {}", angles.join(","))?;
    writeln!(out, "hyperideal: {}", d.hyperideal)?;
    if a.naive {
        let z = oracle::sixj_naive(r, &t)?;
        writeln!(out, "naive: {} {}i", g15(z.re), g15(z.im))?;
    }
    Ok(())
}

fn cmd_lemmas(a: &LemmaArgs, out: &mut dyn Write) -> Result<()> {
    let rs = r_list(&a.rs, "5:101:2")?;
    let mut failures = Vec::new();
    for &r in &rs {
        let real = lemmas::realness_sweep(r)?;
        let mut expected = lemmas::expected_diagonal_sign(r);
        if a.inject_fault {
            expected = -expected;
        }
        let sign = lemmas::diagonal_sign_sweep(r, expected)?;
        let scope = if r <= EXHAUSTIVE_SUMMAND_MAX_R { SummandScope::Exhaustive } else { SummandScope::OppositePairs };
        let summands = lemmas::summand_sign_sweep(r, scope)?;
        let verdict = |p: bool| if p { "ok" } else { "FAIL" };
        writeln!(
            out,
            "r={r} realness {} ({} tuples) diagonal-sign {} ({} m, expected {:+}) summand-signs {} ({} tuples, {})",
            verdict(real.passed()),
            real.checked,
            verdict(sign.passed()),
            sign.checked,
            expected,
            verdict(summands.passed()),
            summands.checked,
            if scope == SummandScope::Exhaustive { "exhaustive" } else { "opposite pairs" },
        )?;
        for (name, rep) in [("realness", &real), ("diagonal-sign", &sign), ("summand-signs", &summands)] {
            for t in &rep.violations {
                writeln!(out, "  {name} violation at r={r}: {t}")?;
            }
            if !rep.passed() {
                failures.push(format!("{name} at r={r} ({} violations)", rep.violation_count));
            }
        }
    }
    if failures.is_empty() {
        writeln!(out, "all sweeps passed for {} value(s) of r", rs.len())?;
        Ok(())
    } else {
        Err(Violation(format!("sweep failures: {}", failures.join("; "))).into())
    }
}

fn describe(g: &ShadowGraph, out: &mut dyn Write) -> io::Result<()> {
    writeln!(out, "loops: {}", g.loop_count())?;
    writeln!(out, "crossings: {}", g.crossings().len())?;
    for (i, c) in g.crossings().iter().enumerate() {
        writeln!(out, "  crossing {i}: loops {:?} regions {:?}", c.loops, c.regions)?;
    }
    writeln!(out, "regions: {}", g.regions().len())?;
    for (i, x) in g.regions().iter().enumerate() {
        writeln!(out, "  region {i}: gleam {} corners {} euler {}", g15(x.gleam()), x.corners, x.euler)?;
    }
    writeln!(out, "total gleam: {}", g15(g.total_gleam2() as f64 / 2.0))
}

fn cmd_shadow(a: &ShadowArgs, out: &mut dyn Write) -> Result<()> {
    let spec = resolve_spec(&a.pieces)?;
    let g = build_shadow(&spec)?;
    writeln!(out, "spec: {}", gluing::to_json(&spec))?;
    describe(&g, out)?;
    Ok(())
}

fn cmd_rt(a: &RtArgs, out: &mut dyn Write) -> Result<()> {
    let r = check_r(a.r)?;
    let spec = resolve_spec(&a.pieces)?;
    let g = build_shadow(&spec)?;
    let gamma = match &a.gamma {
        Some(s) => parse_colors(s)?,
        None => vec![invariants::n_r(r)?; g.loop_count()],
    };
    if gamma.len() != g.loop_count() {
        bail!(Error::ColoringLength { expected: g.loop_count(), got: gamma.len() });
    }
    if let Some(&c) = gamma.iter().find(|&&c| c > r - 2) {
        bail!(Error::ColorOutOfRange { color: c, max: r - 2 });
    }
    let ev = evaluator(r, a.precision)?;
    let v = invariants::rt(&ev, &g, &gamma)?;
    writeln!(out, "# relative RT value with normalization C_r = 1")?;
    writeln!(out, "gamma: {}", gamma.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(","))?;
    print_value(out, &v)?;
    if a.naive {
        let z = oracle::state_sum_naive(&g, r, &gamma)?;
        writeln!(out, "naive: {} {}i", g15(z.re), g15(z.im))?;
    }
    Ok(())
}

fn series_value(kind: GrowthKind, g: &ShadowGraph, r: u32, a: &SeriesArgs) -> Result<qshadow_core::QValue> {
    Ok(match (kind, a.naive) {
        (GrowthKind::Tv, false) => invariants::tv(&evaluator(r, a.precision)?, g)?,
        (GrowthKind::Diagonal, false) => invariants::diagonal_statesum(&evaluator(r, a.precision)?, g)?.value,
        (GrowthKind::Tv, true) => qshadow_core::QValue::from_f64(oracle::tv_naive(g, r)?),
        (GrowthKind::Diagonal, true) => {
            let gamma = vec![invariants::n_r(r)?; g.loop_count()];
            let z = oracle::state_sum_naive(g, r, &gamma)?;
            qshadow_core::QValue::from_f64(z.norm())
        }
    })
}

fn cmd_series(kind: GrowthKind, a: &SeriesArgs, out: &mut dyn Write) -> Result<()> {
    let default = match kind {
        GrowthKind::Tv => "5:31:2",
        GrowthKind::Diagonal => "5:2001:2",
    };
    let rs = r_list(&a.rs, default)?;
    let spec = resolve_spec(&a.pieces)?;
    let g = build_shadow(&spec)?;
    let mut series = GrowthSeries::new(kind, invariants::target(&spec));
    for &r in &rs {
        series.push(r, &series_value(kind, &g, r, a)?);
    }
    let what = match kind {
        GrowthKind::Tv => "growth = (2*pi/r)*log TV_r",
        GrowthKind::Diagonal => "growth = (4*pi/r)*log|diagonal state sum|",
    };
    let comment = format!(
        "k={} l={} matching={} {what}; target = 2(k+2l)*v8; absolute values use the normalization C_r = 1{}",
        spec.k(),
        spec.l(),
        a.pieces.matching,
        if a.naive { "; naive oracle" } else { "" },
    );
    match &a.out {
        Some(path) => {
            let f = File::create(path).with_context(|| format!("creating {}", path.display()))?;
            let mut w = BufWriter::new(f);
            write_series(&mut w, &comment, &series)?;
            w.flush()?;
        }
        None => write_series(&mut *out, &comment, &series)?,
    }
    Ok(())
}
