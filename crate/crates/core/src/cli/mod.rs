//! Command-line front end: `verify`, `tables` and `orbits`.

pub mod report;
pub mod suites;

use std::ffi::OsString;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::arc::ArcCtx;
use crate::error::{Error, Result};
use report::{Config, Format, Inventory, OrbitRow, Report, Timings};
use suites::{Session, SUITES};

/// Largest n accepted without `--extended`.
const DEFAULT_MAX_N: u32 = 5;
/// Largest n for line-level (and Klein-level) computations.
const LINE_MAX_N: u32 = 6;

#[derive(Parser, Debug)]
#[command(name = "arcgeom", version, about = "Orbit and incidence verification for the arc (1, t, t^σ, t^(σ+1)) ∪ {U4} of PG(3, 2^n)")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Run verification suites and report every check.
    Verify {
        #[command(flatten)]
        common: Common,
        /// Suites to run (repeatable); default: all applicable.
        #[arg(long = "suite", value_enum)]
        suites: Vec<SuiteArg>,
    },
    /// Recompute numbered tables next to their closed forms.
    Tables {
        #[command(flatten)]
        common: Common,
        /// Table number 1..=8 (repeatable); default: all applicable.
        #[arg(long = "table", value_parser = clap::value_parser!(u8).range(1..=8))]
        tables: Vec<u8>,
    },
    /// List the orbits of one kind of object.
    Orbits {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum)]
        kind: KindArg,
    },
}

#[derive(Args, Debug)]
pub struct Common {
    /// q = 2^n, 3 <= n <= 8.
    #[arg(long)]
    pub n: u32,
    /// σ = 2^h with gcd(h, n) = 1.
    #[arg(long, default_value_t = 1)]
    pub h: u32,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Write the report here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Worker threads (default: available parallelism).
    #[arg(long)]
    pub workers: Option<usize>,
    /// Allow n >= 6.
    #[arg(long)]
    pub extended: bool,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum SuiteArg {
    All,
    Points,
    Planes,
    Lines,
    Klein,
    Incidence,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum KindArg {
    Point,
    Plane,
    Line,
}

/// Parse `args`, run, and return the process exit code:
/// 0 all checks pass, 1 a mismatch, 2 invalid or unsupported input.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match execute(cli) {
        Ok(pass) => i32::from(!pass),
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::InvariantViolation(_) => 1,
                _ => 2,
            }
        }
    }
}

fn usage(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}

fn validate_n(c: &Common) -> Result<ArcCtx> {
    if !(3..=8).contains(&c.n) {
        return Err(Error::UnsupportedDegree(c.n));
    }
    let arc = ArcCtx::new(c.n, c.h)?;
    if c.n > DEFAULT_MAX_N && !c.extended {
        return Err(usage(format!("n = {} needs --extended", c.n)));
    }
    Ok(arc)
}

fn config(command: &str, c: &Common, arc: &ArcCtx) -> Config {
    Config {
        command: command.into(),
        n: c.n,
        h: c.h,
        q: arc.q(),
        xi: arc.field().xi(),
        suites: Vec::new(),
        table: None,
        extended: c.extended,
    }
}

fn pool(workers: Option<usize>) -> Result<(rayon::ThreadPool, usize)> {
    let w = workers
        .unwrap_or_else(|| std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1))
        .max(1);
    let p = rayon::ThreadPoolBuilder::new()
        .num_threads(w)
        .build()
        .map_err(|e| usage(format!("thread pool: {e}")))?;
    Ok((p, w))
}

fn emit(text: &str, out: &Option<PathBuf>) -> Result<()> {
    match out {
        Some(p) => std::fs::write(p, text).map_err(|e| usage(format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn selected_suites(requested: &[SuiteArg], h: u32) -> Vec<&'static str> {
    let all = requested.is_empty() || requested.contains(&SuiteArg::All);
    SUITES
        .iter()
        .copied()
        .filter(|s| {
            if all {
                *s != "incidence" || h == 1
            } else {
                requested.iter().any(|r| format!("{r:?}").to_lowercase() == *s)
            }
        })
        .collect()
}

fn execute(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Verify { common, suites } => {
            let arc = validate_n(&common)?;
            let names = selected_suites(&suites, common.h);
            for s in &names {
                if *s != "points" && *s != "planes" && common.n > LINE_MAX_N {
                    return Err(usage(format!("suite {s} is limited to n <= {LINE_MAX_N}")));
                }
                if *s == "incidence" && common.h != 1 {
                    return Err(Error::TableUnavailable { table: 3, reason: "incidence suite needs h = 1".into() });
                }
            }
            let (pool, workers) = pool(common.workers)?;
            let mut cfg = config("verify", &common, &arc);
            cfg.suites = names.iter().map(|s| s.to_string()).collect();
            let mut report = Report {
                schema_version: report::SCHEMA_VERSION,
                config: cfg,
                pass: true,
                suites: Vec::new(),
                tables: Vec::new(),
                counterexamples: Vec::new(),
                timings: Timings { workers, ..Default::default() },
            };
            pool.install(|| {
                let session = Session::new(&arc);
                for name in &names {
                    let t0 = Instant::now();
                    let out = suites::run_suite(name, &session);
                    report.timings.suites_ms.insert(name.to_string(), t0.elapsed().as_millis() as u64);
                    report.pass &= out.result.pass;
                    report.suites.push(out.result);
                    report.tables.extend(out.tables);
                    report.counterexamples.extend(out.counterexamples);
                }
            });
            emit(&report.render(common.format), &common.out)?;
            Ok(report.pass)
        }
        Command::Tables { common, tables } => {
            let arc = validate_n(&common)?;
            if common.n > LINE_MAX_N {
                return Err(usage(format!("tables are limited to n <= {LINE_MAX_N}")));
            }
            let xi = arc.field().xi();
            let ids: Vec<u8> = if tables.is_empty() {
                let mut v = vec![1, 2];
                if common.h == 1 {
                    v.extend([if xi == -1 { 3 } else { 4 }, 5, 6, 7, 8]);
                }
                v
            } else {
                tables
            };
            let p = crate::expected::Params::new(common.n);
            for &id in &ids {
                if id >= 3 {
                    crate::incidence::require_twisted_cubic(&arc, id)?;
                }
                if id == 3 || id == 4 {
                    crate::expected::symbolic_table(id, &p)?;
                }
            }
            let (pool, workers) = pool(common.workers)?;
            let mut cfg = config("tables", &common, &arc);
            cfg.table = (ids.len() == 1).then(|| ids[0]);
            let mut report = Report {
                schema_version: report::SCHEMA_VERSION,
                config: cfg,
                pass: true,
                suites: Vec::new(),
                tables: Vec::new(),
                counterexamples: Vec::new(),
                timings: Timings { workers, ..Default::default() },
            };
            pool.install(|| -> Result<()> {
                let session = Session::new(&arc);
                for &id in &ids {
                    let t0 = Instant::now();
                    let t = suites::build_table(&session, id)?;
                    report.timings.suites_ms.insert(format!("table{id}"), t0.elapsed().as_millis() as u64);
                    report.pass &= t.pass;
                    for m in t.mismatches() {
                        report.counterexamples.push(report::Counterexample {
                            suite: "tables".into(),
                            check: format!("table {id}"),
                            detail: m,
                        });
                    }
                    report.tables.push(t);
                }
                Ok(())
            })?;
            emit(&report.render(common.format), &common.out)?;
            Ok(report.pass)
        }
        Command::Orbits { common, kind } => {
            let arc = validate_n(&common)?;
            let kind = match kind {
                KindArg::Point => "point",
                KindArg::Plane => "plane",
                KindArg::Line => "line",
            };
            if kind == "line" && common.n > LINE_MAX_N {
                return Err(usage(format!("line orbits are limited to n <= {LINE_MAX_N}")));
            }
            let (pool, _) = pool(common.workers)?;
            let rows = pool.install(|| suites::inventory(&Session::new(&arc), kind))?;
            let inv = Inventory {
                schema_version: report::SCHEMA_VERSION,
                config: config("orbits", &common, &arc),
                kind: kind.into(),
                orbits: rows
                    .into_iter()
                    .map(|(id, size, representative, label)| OrbitRow { id, size, representative, label })
                    .collect(),
            };
            emit(&inv.render(common.format), &common.out)?;
            Ok(true)
        }
    }
}
