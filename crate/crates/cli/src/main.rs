//! beiterlab — batch driver over the coefficient/lattice verification crate.
//!
//! Every subcommand writes one CSV report (stdout, or `--out FILE`), prints a
//! one-line JSON run manifest to stderr, and exits 0 on success / all-pass,
//! 1 on internal errors or failed hard checks, 2 on usage errors, and 3 when
//! a search finished clean but found nothing.
//!
//! Reports are assembled fully in memory and written once, so identical
//! invocations produce byte-identical files no matter how many worker
//! threads run underneath (`--jobs`, env `BEITERLAB_JOBS`).

mod svg;

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{ArgGroup, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use beiterlab::beiter::{
    beiter_sets, delta_lower_estimate, find_counterexample, verify_capture_bounds, SearchOutcome,
    Side,
};
use beiterlab::bfi::{bfi_scan, verify_sqrt_gap, BfiConfig};
use beiterlab::cyclotomic::{
    cyclotomic_coeffs, cyclotomic_coeffs_unbounded, height, height_unbounded, m_pq, MpqMode,
};
use beiterlab::inversegeo::{
    beiter_triangle, count_inverse_points, incomplete_kloosterman, kloosterman, Closure, Rectangle,
    Region, Triangle,
};
use beiterlab::numtheory::{is_prime, primes_in, PrimeRange};
use beiterlab::rat::{rat, rint, Rat};
use beiterlab::sweeps::{
    bzdega_sweep, rect_lemma_sweep, theorem1_sweep, theorem2_sweep, tri_lemma_sweep,
    weil_exhaustive, weil_random,
};
use beiterlab::{par, Error};

#[derive(Parser)]
#[command(
    name = "beiterlab",
    version,
    about = "Cyclotomic coefficient growth: exact sets, certificates, and batch verification",
    after_help = "Reports go to stdout as CSV unless --out is given; a JSON run \
manifest always goes to stderr.  Exit codes: 0 ok/all-pass, 1 internal error or \
failed check, 2 usage, 3 search exhausted."
)]
struct Cli {
    /// Worker threads for batch work (default: all cores; env BEITERLAB_JOBS)
    #[arg(long, global = true)]
    jobs: Option<usize>,

    /// Seed for the sampled sweeps
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Write the CSV report here instead of stdout
    #[arg(long, global = true, value_name = "FILE")]
    out: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Exact coefficients of Φ_n, one row per index
    Coeffs {
        n: u64,
        /// Compute even when the odd squarefree kernel has more than three primes
        #[arg(long)]
        force: bool,
    },

    /// Heights A(n) for one or more n
    Height {
        #[arg(required = true, num_args = 1..)]
        n: Vec<u64>,
        /// Lift the three-odd-prime kernel cap
        #[arg(long)]
        force: bool,
    },

    /// The sets B₋(p), B₊(p) as (side, β, β̄) rows; optionally an SVG scatter
    Beiter {
        p: u64,
        /// Also draw the Figure-2 style scatter to this file
        #[arg(long, value_name = "FILE")]
        svg: Option<PathBuf>,
    },

    /// Min/max β statistics of the Beiter sets with their proved envelopes
    Capture { p: u64 },

    /// Hunt a coefficient certificate with |a_pqr(n)| > (p+1)/2
    Counterexample {
        p: u64,
        /// Largest q tried (default 50·p)
        #[arg(long = "q-limit")]
        q_limit: Option<u64>,
        /// Largest r tried
        #[arg(long = "r-limit", default_value_t = 10_000)]
        r_limit: u64,
    },

    /// M(p;q), the maximal ternary height for fixed p and q
    Mpq {
        p: u64,
        q: u64,
        #[arg(long, value_enum, default_value_t = MpqCliMode::Residue)]
        mode: MpqCliMode,
        /// Search ceiling for r (brute mode only)
        #[arg(long = "r-limit", default_value_t = 10_000)]
        r_limit: u64,
        /// Candidates tried per residue class before giving up (residue mode)
        #[arg(long, default_value_t = 10_000)]
        cap: u64,
        /// Double-sample every class to re-validate class invariance
        #[arg(long)]
        paranoid: bool,
    },

    /// Fraction of primes q ≤ q-max whose M(p;q) scan beats (p+1)/2
    Delta {
        p: u64,
        /// Largest q scanned (default 50·p)
        #[arg(long = "q-max")]
        q_max: Option<u64>,
        /// Largest r per q
        #[arg(long = "r-limit", default_value_t = 10_000)]
        r_limit: u64,
    },

    /// Kloosterman sum K(a,b;p), or the partial inverse sum over (LO, HI]
    Kloosterman {
        p: u64,
        a: i64,
        b: i64,
        /// Sum e(b·x̄/p) over LO < x ≤ HI instead (requires a = 0)
        #[arg(long, num_args = 2, value_names = ["LO", "HI"])]
        interval: Option<Vec<u64>>,
    },

    /// Count inverse points (x, x̄ mod p) inside a region
    #[command(group(ArgGroup::new("region").required(true).args(["rect", "tri", "beiter"])))]
    Count {
        p: u64,
        /// Axis-aligned box; coordinates are integers or fractions like 7/3
        #[arg(long, num_args = 4, value_names = ["X_LO", "X_HI", "Y_LO", "Y_HI"],
              value_parser = parse_rat, allow_hyphen_values = true)]
        rect: Option<Vec<Rat>>,
        /// Closed triangle by its vertices
        #[arg(long, num_args = 6, value_names = ["X1", "Y1", "X2", "Y2", "X3", "Y3"],
              value_parser = parse_rat, allow_hyphen_values = true)]
        tri: Option<Vec<Rat>>,
        /// One of the two Beiter triangles (p ≥ 11)
        #[arg(long, value_enum)]
        beiter: Option<SideArg>,
        /// Which rectangle boundary edges count
        #[arg(long, value_enum, default_value_t = ClosureArg::Low)]
        closure: ClosureArg,
    },

    /// Batch verification, one CSV row per prime; exit 0 iff every hard check passes
    Sweep {
        kind: SweepKind,
        p_lo: u64,
        /// Upper end of the prime range (for bzdega: the ceiling on p·q·r)
        p_hi: u64,
        /// Random draws per prime (weil, rect-lemma, tri-lemma)
        #[arg(long)]
        samples: Option<u64>,
    },

    /// Scan q ≡ 2 (mod 3), q | p+9 for inverse points near the triangle corner
    Bfi {
        x: u64,
        c3: f64,
        c4: f64,
        c5: f64,
        c6: f64,
        /// Slack constant of the implied bound M(p) > 2p/3 − c₈√p
        #[arg(long, default_value_t = 1.0)]
        c8: f64,
    },

    /// Empirical √p gap between min B₋(p) and the triangle corner
    Sqrtgap { p_max: u64 },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Coeffs { .. } => "coeffs",
            Command::Height { .. } => "height",
            Command::Beiter { .. } => "beiter",
            Command::Capture { .. } => "capture",
            Command::Counterexample { .. } => "counterexample",
            Command::Mpq { .. } => "mpq",
            Command::Delta { .. } => "delta",
            Command::Kloosterman { .. } => "kloosterman",
            Command::Count { .. } => "count",
            Command::Sweep { .. } => "sweep",
            Command::Bfi { .. } => "bfi",
            Command::Sqrtgap { .. } => "sqrtgap",
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MpqCliMode {
    /// One prime representative per invertible residue class mod pq (exact)
    Residue,
    /// Maximum over all primes r ≤ r-limit (a lower bound)
    Brute,
}

#[derive(Clone, Copy, ValueEnum)]
enum SideArg {
    Minus,
    Plus,
}

impl From<SideArg> for Side {
    fn from(s: SideArg) -> Side {
        match s {
            SideArg::Minus => Side::Minus,
            SideArg::Plus => Side::Plus,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum ClosureArg {
    /// Include the low edges: [lo, hi) × [lo, hi)
    Low,
    /// Include the high edges: (lo, hi] × (lo, hi]
    High,
}

impl From<ClosureArg> for Closure {
    fn from(c: ClosureArg) -> Closure {
        match c {
            ClosureArg::Low => Closure::HalfOpenLow,
            ClosureArg::High => Closure::HalfOpenHigh,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SweepKind {
    Theorem1,
    Theorem2,
    Weil,
    RectLemma,
    TriLemma,
    Bzdega,
}

impl SweepKind {
    fn name(self) -> &'static str {
        match self {
            SweepKind::Theorem1 => "theorem1",
            SweepKind::Theorem2 => "theorem2",
            SweepKind::Weil => "weil",
            SweepKind::RectLemma => "rect-lemma",
            SweepKind::TriLemma => "tri-lemma",
            SweepKind::Bzdega => "bzdega",
        }
    }
}

/// "7", "-3", or "7/3" — an exact rational coordinate.
fn parse_rat(s: &str) -> Result<Rat, String> {
    match s.split_once('/') {
        None => s
            .trim()
            .parse::<i128>()
            .map(rint)
            .map_err(|e| e.to_string()),
        Some((n, d)) => {
            let n: i128 = n.trim().parse().map_err(|e| format!("numerator: {e}"))?;
            let d: i128 = d.trim().parse().map_err(|e| format!("denominator: {e}"))?;
            if d == 0 {
                return Err("zero denominator".into());
            }
            Ok(rat(n, d))
        }
    }
}

// ---------------------------------------------------------------------------
// error and exit plumbing
// ---------------------------------------------------------------------------

#[derive(Debug)]
enum CliError {
    Usage(String),
    Lib(Error),
    Io(std::io::Error),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            // Rejected configuration is a usage problem, not a crash.
            CliError::Lib(Error::Config(_)) | CliError::Lib(Error::KernelTooLarge { .. }) => 2,
            _ => 1,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(msg) => write!(f, "{msg}"),
            CliError::Lib(e) => write!(f, "{e}"),
            CliError::Io(e) => write!(f, "{e}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Lib(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn require_odd_prime(p: u64) -> Result<(), CliError> {
    if p < 3 || !is_prime(p) {
        return Err(usage(format!("p = {p} is not an odd prime")));
    }
    Ok(())
}

fn pf(ok: bool) -> &'static str {
    if ok {
        "pass"
    } else {
        "fail"
    }
}

fn opt_pf(v: Option<bool>) -> &'static str {
    match v {
        Some(ok) => pf(ok),
        None => "na",
    }
}

/// One finished command: its CSV, side files, summary line, and exit code.
struct Run {
    params: Value,
    csv: String,
    extra: Vec<(PathBuf, String)>,
    note: Option<String>,
    exit: u8,
}

impl Run {
    fn new(params: Value, csv: String) -> Self {
        Run {
            params,
            csv,
            extra: Vec::new(),
            note: None,
            exit: 0,
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let t0 = Instant::now();
    let jobs = match effective_jobs(&cli) {
        Ok(jobs) => jobs,
        Err(e) => return abort(&e),
    };
    match par::with_jobs(jobs, || run(&cli)) {
        Ok(done) => match deliver(&cli, done, jobs, t0) {
            Ok(code) => ExitCode::from(code),
            Err(e) => abort(&e),
        },
        Err(e) => abort(&e),
    }
}

fn abort(e: &CliError) -> ExitCode {
    eprintln!("beiterlab: {e}");
    ExitCode::from(e.exit_code())
}

fn effective_jobs(cli: &Cli) -> Result<Option<usize>, CliError> {
    let jobs = cli.jobs.or_else(|| {
        std::env::var("BEITERLAB_JOBS")
            .ok()
            .and_then(|s| s.parse().ok())
    });
    if jobs == Some(0) {
        return Err(usage("--jobs must be at least 1"));
    }
    Ok(jobs)
}

/// Write outputs, print the note and the manifest, surface the exit code.
fn deliver(cli: &Cli, run: Run, jobs: Option<usize>, t0: Instant) -> Result<u8, CliError> {
    let mut outputs = vec![write_report(cli.out.as_deref(), &run.csv)?];
    for (path, contents) in &run.extra {
        std::fs::write(path, contents)?;
        outputs.push(json!({
            "path": path.display().to_string(),
            "sha256": sha256_hex(contents.as_bytes()),
        }));
    }
    if let Some(note) = &run.note {
        eprintln!("{note}");
    }
    let mut params = run.params;
    if let Value::Object(map) = &mut params {
        map.insert("jobs".into(), json!(jobs));
        map.insert("seed".into(), json!(cli.seed));
        map.insert(
            "out".into(),
            json!(cli.out.as_ref().map(|p| p.display().to_string())),
        );
    }
    let manifest = json!({
        "command": cli.command.name(),
        "params": params,
        "version": env!("CARGO_PKG_VERSION"),
        "duration_seconds": t0.elapsed().as_secs_f64(),
        "outputs": outputs,
    });
    eprintln!("{manifest}");
    Ok(run.exit)
}

fn write_report(out: Option<&Path>, csv: &str) -> Result<Value, CliError> {
    let digest = sha256_hex(csv.as_bytes());
    let path = match out {
        Some(p) => {
            std::fs::write(p, csv)?;
            p.display().to_string()
        }
        None => {
            std::io::stdout().write_all(csv.as_bytes())?;
            "-".to_string()
        }
    };
    Ok(json!({ "path": path, "sha256": digest }))
}

fn sha256_hex(bytes: &[u8]) -> String {
    format!("{:x}", Sha256::digest(bytes))
}

// ---------------------------------------------------------------------------
// command bodies
// ---------------------------------------------------------------------------

fn run(cli: &Cli) -> Result<Run, CliError> {
    match &cli.command {
        Command::Coeffs { n, force } => cmd_coeffs(*n, *force),
        Command::Height { n, force } => cmd_height(n, *force),
        Command::Beiter { p, svg } => cmd_beiter(*p, svg.clone()),
        Command::Capture { p } => cmd_capture(*p),
        Command::Counterexample {
            p,
            q_limit,
            r_limit,
        } => cmd_counterexample(*p, *q_limit, *r_limit),
        Command::Mpq {
            p,
            q,
            mode,
            r_limit,
            cap,
            paranoid,
        } => cmd_mpq(*p, *q, *mode, *r_limit, *cap, *paranoid),
        Command::Delta { p, q_max, r_limit } => cmd_delta(*p, *q_max, *r_limit),
        Command::Kloosterman { p, a, b, interval } => {
            cmd_kloosterman(*p, *a, *b, interval.as_deref())
        }
        Command::Count {
            p,
            rect,
            tri,
            beiter,
            closure,
        } => cmd_count(*p, rect.as_deref(), tri.as_deref(), *beiter, *closure),
        Command::Sweep {
            kind,
            p_lo,
            p_hi,
            samples,
        } => cmd_sweep(*kind, *p_lo, *p_hi, *samples, cli.seed),
        Command::Bfi {
            x,
            c3,
            c4,
            c5,
            c6,
            c8,
        } => cmd_bfi(*x, *c3, *c4, *c5, *c6, *c8),
        Command::Sqrtgap { p_max } => cmd_sqrtgap(*p_max),
    }
}

fn cmd_coeffs(n: u64, force: bool) -> Result<Run, CliError> {
    if n < 2 {
        return Err(usage(format!("n = {n}: coefficient tables start at n = 2")));
    }
    let computed = if force {
        cyclotomic_coeffs_unbounded(n)
    } else {
        cyclotomic_coeffs(n)
    };
    let seq = match computed {
        Err(e @ Error::KernelTooLarge { .. }) => {
            return Err(usage(format!("{e}; pass --force if you really want it")))
        }
        other => other?,
    };
    let mut csv = String::from("k,coeff\n");
    for (k, c) in seq.coeffs.iter().enumerate() {
        writeln!(csv, "{k},{c}").unwrap();
    }
    Ok(Run::new(json!({ "n": n, "force": force }), csv))
}

fn cmd_height(ns: &[u64], force: bool) -> Result<Run, CliError> {
    if let Some(&bad) = ns.iter().find(|&&n| n < 2) {
        return Err(usage(format!("n = {bad}: heights start at n = 2")));
    }
    let computed: Result<Vec<_>, Error> = par::map_collect(ns, |&n| {
        if force {
            height_unbounded(n)
        } else {
            height(n)
        }
    })
    .into_iter()
    .collect();
    let rows = match computed {
        Err(e @ Error::KernelTooLarge { .. }) => {
            return Err(usage(format!("{e}; pass --force if you really want it")))
        }
        other => other?,
    };
    let mut csv = String::from("n,kernel,height,argmax_k\n");
    for r in &rows {
        writeln!(csv, "{},{},{},{}", r.n, r.kernel, r.a, r.argmax_k).unwrap();
    }
    Ok(Run::new(json!({ "n": ns, "force": force }), csv))
}

fn cmd_beiter(p: u64, svg: Option<PathBuf>) -> Result<Run, CliError> {
    require_odd_prime(p)?;
    let sets = beiter_sets(p);
    let mut csv = String::from("side,beta,betabar\n");
    for pt in sets.iter() {
        writeln!(csv, "{},{},{}", pt.side.label(), pt.beta, pt.betabar).unwrap();
    }
    let params = json!({ "p": p, "svg": svg.as_ref().map(|f| f.display().to_string()) });
    let mut run = Run::new(params, csv);
    run.note = Some(format!(
        "beiter: p = {p}, {} minus + {} plus points",
        sets.count_minus(),
        sets.count_plus()
    ));
    if let Some(path) = svg {
        let figure = svg::beiter_figure(p, &sets);
        run.extra.push((path, figure));
    }
    Ok(run)
}

fn cmd_capture(p: u64) -> Result<Run, CliError> {
    require_odd_prime(p)?;
    let rep = verify_capture_bounds(p);
    let s = &rep.stats;
    let mut csv =
        String::from("p,min_minus,min_plus,min_union,max_minus,max_plus,max_union,hard,soft\n");
    writeln!(
        csv,
        "{},{},{},{},{},{},{},{},{}",
        p,
        s.min_minus,
        s.min_plus,
        s.min_union,
        s.max_minus,
        s.max_plus,
        s.max_union,
        pf(rep.all_hard()),
        pf(rep.all_soft())
    )
    .unwrap();
    let mut run = Run::new(json!({ "p": p }), csv);
    if !rep.all_hard() {
        run.exit = 1;
        run.note = Some(format!(
            "capture: proved envelope FAILED at p = {p} — that is a bug, not a discovery"
        ));
    }
    Ok(run)
}

fn cmd_counterexample(p: u64, q_limit: Option<u64>, r_limit: u64) -> Result<Run, CliError> {
    require_odd_prime(p)?;
    let q_limit = q_limit.unwrap_or(50 * p);
    if q_limit <= p || r_limit <= p {
        return Err(usage(format!("search limits must exceed p = {p}")));
    }
    let params = json!({ "p": p, "q_limit": q_limit, "r_limit": r_limit });
    let mut csv = String::from("status,p,q,r,n,value,beta\n");
    match find_counterexample(p, q_limit, r_limit)? {
        SearchOutcome::Found(c) => {
            writeln!(
                csv,
                "found,{},{},{},{},{},{}",
                c.p, c.q, c.r, c.n, c.value, c.beta
            )
            .unwrap();
            let mut run = Run::new(params, csv);
            run.note = Some(format!(
                "counterexample: a_{{{}}}({}) = {} beats (p+1)/2 = {}",
                c.p * c.q * c.r,
                c.n,
                c.value,
                p.div_ceil(2)
            ));
            Ok(run)
        }
        SearchOutcome::NotFound(rep) => {
            writeln!(csv, "notfound,{p},,,,,").unwrap();
            let mut run = Run::new(params, csv);
            run.exit = 3;
            run.note = Some(format!(
                "counterexample: nothing above (p+1)/2 for p = {p} with q ≤ {}, r ≤ {} ({} pairs scanned)",
                rep.q_limit, rep.r_limit, rep.pairs_scanned
            ));
            Ok(run)
        }
    }
}

fn cmd_mpq(
    p: u64,
    q: u64,
    mode: MpqCliMode,
    r_limit: u64,
    cap: u64,
    paranoid: bool,
) -> Result<Run, CliError> {
    require_odd_prime(p)?;
    require_odd_prime(q)?;
    if p >= q {
        return Err(usage(format!("need p < q, got p = {p}, q = {q}")));
    }
    let lib_mode = match mode {
        MpqCliMode::Residue => MpqMode::ResidueClasses { paranoid, cap },
        MpqCliMode::Brute => {
            if r_limit <= q {
                return Err(usage(format!("--r-limit must exceed q = {q}")));
            }
            MpqMode::Brute { r_limit }
        }
    };
    let mode_name = match mode {
        MpqCliMode::Residue => "residue",
        MpqCliMode::Brute => "brute",
    };
    let rep = m_pq(p, q, lib_mode)?;
    let mut csv =
        String::from("p,q,value,witness_r,witness_class,lower_bound_only,evaluated,skipped\n");
    writeln!(
        csv,
        "{},{},{},{},{},{},{},{}",
        rep.p,
        rep.q,
        rep.value,
        rep.witness_r,
        rep.witness_class,
        rep.lower_bound_only,
        rep.evaluated,
        rep.skipped
    )
    .unwrap();
    let params = json!({
        "p": p, "q": q, "mode": mode_name, "r_limit": r_limit,
        "cap": cap, "paranoid": paranoid,
    });
    let mut run = Run::new(params, csv);
    run.note = Some(format!(
        "M({p};{q}) {} {} at r = {}",
        if rep.lower_bound_only { ">=" } else { "=" },
        rep.value,
        rep.witness_r
    ));
    Ok(run)
}

fn cmd_delta(p: u64, q_max: Option<u64>, r_limit: u64) -> Result<Run, CliError> {
    require_odd_prime(p)?;
    let q_max = q_max.unwrap_or(50 * p);
    if q_max <= p || r_limit <= p {
        return Err(usage(format!("scan limits must exceed p = {p}")));
    }
    let rep = delta_lower_estimate(p, q_max, r_limit)?;
    let mut csv = String::from("p,q_max,r_limit,hits,total,empirical,rigorous\n");
    writeln!(
        csv,
        "{},{},{},{},{},{},{}",
        rep.p, rep.q_max, rep.r_limit, rep.hits, rep.total, rep.empirical, rep.rigorous
    )
    .unwrap();
    let params = json!({ "p": p, "q_max": q_max, "r_limit": r_limit });
    let mut run = Run::new(params, csv);
    run.note = Some(format!(
        "delta: {}/{} primes q exceeded the classical bound; provable floor {}",
        rep.hits, rep.total, rep.rigorous
    ));
    Ok(run)
}

fn cmd_kloosterman(p: u64, a: i64, b: i64, interval: Option<&[u64]>) -> Result<Run, CliError> {
    require_odd_prime(p)?;
    match interval {
        None => {
            if a.rem_euclid(p as i64) == 0 && b.rem_euclid(p as i64) == 0 {
                return Err(usage(
                    "a ≡ b ≡ 0 (mod p) gives the trivial sum p − 1; nothing to check",
                ));
            }
            let k = kloosterman(a, b, p);
            let mut csv = String::from("p,a,b,value,imag,weil_bound,pass\n");
            writeln!(
                csv,
                "{},{},{},{},{},{},{}",
                k.p,
                k.a,
                k.b,
                k.value,
                k.imag,
                k.weil_bound,
                pf(k.pass)
            )
            .unwrap();
            let params = json!({ "p": p, "a": a, "b": b, "interval": Value::Null });
            let mut run = Run::new(params, csv);
            if !k.pass {
                run.exit = 1;
                run.note = Some("kloosterman: Weil bound FAILED — that is a bug".to_string());
            }
            Ok(run)
        }
        Some(&[lo, hi]) => {
            if a != 0 {
                return Err(usage(
                    "interval sums take only the inverse-side coefficient; set a = 0",
                ));
            }
            if b.rem_euclid(p as i64) == 0 {
                return Err(usage("b ≡ 0 (mod p) makes the interval sum trivial"));
            }
            if !(lo <= hi && hi < p) {
                return Err(usage(format!(
                    "interval (LO, HI] needs LO ≤ HI < p, got ({lo}, {hi}] with p = {p}"
                )));
            }
            let s = incomplete_kloosterman(b, p, lo, hi);
            let mut csv = String::from("p,b,lo,hi,real,imag,modulus,bound,pass\n");
            writeln!(
                csv,
                "{},{},{},{},{},{},{},{},{}",
                s.p,
                s.b,
                s.lo,
                s.hi,
                s.real,
                s.imag,
                s.modulus,
                s.bound,
                pf(s.pass)
            )
            .unwrap();
            let params = json!({ "p": p, "a": a, "b": b, "interval": [lo, hi] });
            let mut run = Run::new(params, csv);
            if !s.pass {
                run.exit = 1;
                run.note =
                    Some("kloosterman: incomplete-sum bound FAILED — that is a bug".to_string());
            }
            Ok(run)
        }
        Some(other) => Err(usage(format!(
            "--interval takes exactly two values, got {}",
            other.len()
        ))),
    }
}

fn cmd_count(
    p: u64,
    rect: Option<&[Rat]>,
    tri: Option<&[Rat]>,
    side: Option<SideArg>,
    closure: ClosureArg,
) -> Result<Run, CliError> {
    require_odd_prime(p)?;
    let zero = rint(0);
    let (kind, region): (String, Region) = if let Some(v) = rect {
        let (x_lo, x_hi, y_lo, y_hi) = (v[0], v[1], v[2], v[3]);
        if x_lo < zero || y_lo < zero {
            return Err(usage("rectangle corners must be nonnegative"));
        }
        if x_lo >= x_hi || y_lo >= y_hi {
            return Err(usage("rectangle must have positive extent"));
        }
        (
            "rect".to_string(),
            Rectangle::new(x_lo, x_hi, y_lo, y_hi, closure.into()).into(),
        )
    } else if let Some(v) = tri {
        let tri = Triangle::closed([(v[0], v[1]), (v[2], v[3]), (v[4], v[5])]);
        ("tri".to_string(), tri.into())
    } else {
        let side = side.expect("clap group guarantees one region flag");
        if p < 11 {
            return Err(usage("the Beiter triangles need p ≥ 11"));
        }
        let name = format!("beiter-{}", Side::from(side).label());
        (name, beiter_triangle(p, side.into()).into())
    };
    let count = count_inverse_points(&region, p);
    let mut csv = String::from("p,kind,count\n");
    writeln!(csv, "{p},{kind},{count}").unwrap();
    let fmt_rats =
        |v: Option<&[Rat]>| v.map(|v| v.iter().map(ToString::to_string).collect::<Vec<_>>());
    let params = json!({
        "p": p,
        "rect": fmt_rats(rect),
        "tri": fmt_rats(tri),
        "beiter": side.map(|s| Side::from(s).label()),
        "closure": match closure { ClosureArg::Low => "low", ClosureArg::High => "high" },
    });
    Ok(Run::new(params, csv))
}

fn cmd_sweep(
    kind: SweepKind,
    p_lo: u64,
    p_hi: u64,
    samples: Option<u64>,
    seed: u64,
) -> Result<Run, CliError> {
    if p_lo > p_hi {
        return Err(usage(format!("empty range [{p_lo}, {p_hi}]")));
    }
    let sampled = matches!(
        kind,
        SweepKind::Weil | SweepKind::RectLemma | SweepKind::TriLemma
    );
    if samples.is_some() && !sampled {
        return Err(usage(
            "--samples only applies to weil, rect-lemma, and tri-lemma",
        ));
    }
    if samples == Some(0) {
        return Err(usage("--samples must be positive"));
    }

    let (csv, pass, summary) = match kind {
        SweepKind::Theorem1 => {
            let rows = theorem1_sweep(p_lo, p_hi);
            let mut csv = String::from(
                "p,count_minus,count_plus,count_union,residual_minus,bound_minus,\
                 residual_plus,bound_plus,residual_union,bound_union,ok\n",
            );
            let mut pass = true;
            for r in &rows {
                pass &= r.all_ok();
                writeln!(
                    csv,
                    "{},{},{},{},{},{},{},{},{},{},{}",
                    r.p,
                    r.count_minus,
                    r.count_plus,
                    r.count_union,
                    r.minus.residual,
                    r.minus.bound,
                    r.plus.residual,
                    r.plus.bound,
                    r.union.residual,
                    r.union.bound,
                    pf(r.all_ok())
                )
                .unwrap();
            }
            (csv, pass, format!("{} primes", rows.len()))
        }
        SweepKind::Theorem2 => {
            let rows = theorem2_sweep(p_lo, p_hi);
            let mut csv = String::from(
                "p,min_minus,min_plus,min_union,max_minus,max_plus,max_union,\
                 mod3,union_max,hard,soft\n",
            );
            let mut pass = true;
            let mut soft_misses = 0usize;
            for r in &rows {
                pass &= r.all_hard();
                soft_misses += usize::from(!r.all_soft());
                let s = &r.stats;
                writeln!(
                    csv,
                    "{},{},{},{},{},{},{},{},{},{},{}",
                    r.p,
                    s.min_minus,
                    s.min_plus,
                    s.min_union,
                    s.max_minus,
                    s.max_plus,
                    s.max_union,
                    opt_pf(r.exact_mod3),
                    opt_pf(r.exact_union_max),
                    pf(r.all_hard()),
                    pf(r.all_soft())
                )
                .unwrap();
            }
            (
                csv,
                pass,
                format!("{} primes, {} soft misses", rows.len(), soft_misses),
            )
        }
        SweepKind::Weil => {
            let rows = match samples {
                None => weil_exhaustive(p_lo, p_hi),
                Some(s) => {
                    let any = primes_in(&PrimeRange::interval(p_lo.max(3), p_hi))
                        .map(|v| !v.is_empty())
                        .unwrap_or(false);
                    if !any {
                        return Err(usage(format!("no odd primes in [{p_lo}, {p_hi}]")));
                    }
                    weil_random(p_lo, p_hi, s, seed)
                }
            };
            let mut csv = String::from("p,pairs,failures,max_ratio\n");
            let mut pass = true;
            let mut total = 0u64;
            for r in &rows {
                pass &= r.failures == 0;
                total += r.pairs;
                writeln!(csv, "{},{},{},{}", r.p, r.pairs, r.failures, r.max_ratio).unwrap();
            }
            (csv, pass, format!("{} primes, {total} pairs", rows.len()))
        }
        SweepKind::RectLemma => {
            let rows = rect_lemma_sweep(p_lo, p_hi, samples.unwrap_or(100), seed);
            let mut csv = String::from("p,samples,failures,max_ratio\n");
            let mut pass = true;
            for r in &rows {
                pass &= r.failures == 0;
                writeln!(csv, "{},{},{},{}", r.p, r.samples, r.failures, r.max_ratio).unwrap();
            }
            (csv, pass, format!("{} primes", rows.len()))
        }
        SweepKind::TriLemma => {
            let rows = tri_lemma_sweep(p_lo, p_hi, samples.unwrap_or(100), seed);
            let mut csv = String::from(
                "p,samples,right_samples,failures_general,failures_right,failures_sharp,\
                 max_general_ratio,max_sharp_ratio\n",
            );
            let mut pass = true;
            for r in &rows {
                pass &= r.failures_general == 0 && r.failures_right == 0 && r.failures_sharp == 0;
                writeln!(
                    csv,
                    "{},{},{},{},{},{},{},{}",
                    r.p,
                    r.samples,
                    r.right_samples,
                    r.failures_general,
                    r.failures_right,
                    r.failures_sharp,
                    r.max_general_ratio,
                    r.max_sharp_ratio
                )
                .unwrap();
            }
            (csv, pass, format!("{} primes", rows.len()))
        }
        SweepKind::Bzdega => {
            if p_hi < 105 {
                return Err(usage(
                    "bzdega needs a product ceiling of at least 105 (the smallest pqr)",
                ));
            }
            let rows = bzdega_sweep(p_hi)?;
            let mut csv = String::from("p,q,triples,failures,min_margin,max_height,bound_ok\n");
            let mut pass = true;
            let mut total = 0u64;
            for r in &rows {
                pass &= r.failures == 0 && r.bound_ok;
                total += r.triples;
                writeln!(
                    csv,
                    "{},{},{},{},{},{},{}",
                    r.p, r.q, r.triples, r.failures, r.min_margin, r.max_height, r.bound_ok
                )
                .unwrap();
            }
            (csv, pass, format!("{total} triples with pqr ≤ {p_hi}"))
        }
    };

    let params = json!({
        "kind": kind.name(), "p_lo": p_lo, "p_hi": p_hi, "samples": samples,
    });
    let mut run = Run::new(params, csv);
    run.exit = u8::from(!pass);
    run.note = Some(format!(
        "sweep {}: {summary} — {}",
        kind.name(),
        if pass { "PASS" } else { "FAIL" }
    ));
    Ok(run)
}

fn cmd_bfi(x: u64, c3: f64, c4: f64, c5: f64, c6: f64, c8: f64) -> Result<Run, CliError> {
    let config = BfiConfig::new(x, c3, c4, c5, c6, c8)?;
    let rep = bfi_scan(&config)?;
    let mut csv = String::from("p,q,m,case,a,b,x,y,membership,m_prime\n");
    for h in &rep.hits {
        writeln!(
            csv,
            "{},{},{},{},{},{},{},{},{},{}",
            h.p,
            h.q,
            h.m,
            h.case.label(),
            h.a,
            h.b,
            h.x,
            h.y,
            h.membership.label(),
            h.m_is_prime
        )
        .unwrap();
    }
    let params = json!({ "x": x, "c3": c3, "c4": c4, "c5": c5, "c6": c6, "c8": c8 });
    let mut run = Run::new(params, csv);
    run.exit = u8::from(!rep.pass);
    run.note = Some(format!(
        "bfi: {} hits across {} distinct p (floor {:.2}), {} in-triangle — {}",
        rep.hits.len(),
        rep.distinct_p,
        rep.density_floor,
        rep.membership_count,
        if rep.pass {
            "PASS"
        } else {
            "FAIL (floor missed at this X)"
        }
    ));
    Ok(run)
}

fn cmd_sqrtgap(p_max: u64) -> Result<Run, CliError> {
    if p_max < 11 {
        return Err(usage(
            "need p_max ≥ 11 (below that every minus set is empty)",
        ));
    }
    let rows = verify_sqrt_gap(p_max);
    let mut csv = String::from("p,points,min_a,ratio\n");
    let mut min_ratio = f64::INFINITY;
    for r in &rows {
        min_ratio = min_ratio.min(r.ratio);
        writeln!(csv, "{},{},{},{}", r.p, r.points, r.min_a, r.ratio).unwrap();
    }
    let mut run = Run::new(json!({ "p_max": p_max }), csv);
    run.note = Some(format!(
        "sqrtgap: {} primes with p ≡ 1 (mod 3); min gap ratio {min_ratio:.4} (recorded, not asserted)",
        rows.len()
    ));
    Ok(run)
}
