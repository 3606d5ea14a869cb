//! `lcinv`: local Clifford invariants of stabilizer states from the command line.
//!
//! Exit status: 0 for valid / equivalent / success, 1 for invalid or
//! inequivalent, 2 for malformed input or mismatched sizes, 3 when a budget
//! would be exceeded.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use lc_invariants::invariants::{self, Budget, InvariantKind, OmegaTuple};
use lc_invariants::lcequiv::{self, FingerprintVerdict};
use lc_invariants::{dense, Error, LocalCliffordOp, Stabilizer};

#[derive(Parser, Debug)]
#[command(
    name = "lcinv",
    version,
    about = "Local Clifford invariants of stabilizer states"
)]
struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    format: Format,

    #[command(flatten)]
    budgets: Budgets,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Budgets {
    /// Maximum r*n for enumeration-based invariants.
    #[arg(long, global = true, default_value_t = invariants::DEFAULT_ENUMERATION_BUDGET)]
    budget_enumeration: usize,
    /// Maximum number of fingerprint entries.
    #[arg(long, global = true, default_value_t = invariants::DEFAULT_FINGERPRINT_BUDGET)]
    budget_fingerprint: u128,
    /// Maximum qubit count for the brute-force decider.
    #[arg(long, global = true, default_value_t = lcequiv::DEFAULT_BRUTE_FORCE_LIMIT)]
    budget_brute_force: usize,
    /// Maximum qubit count for the constructive decider.
    #[arg(long, global = true, default_value_t = lcequiv::DEFAULT_CONSTRUCTIVE_LIMIT)]
    budget_constructive: usize,
}

impl Budgets {
    fn library(&self) -> anyhow::Result<Budget> {
        if self.budget_enumeration == 0
            || self.budget_fingerprint == 0
            || self.budget_brute_force == 0
            || self.budget_constructive == 0
        {
            bail!(Error::Invalid("budgets must be positive".into()));
        }
        Ok(Budget {
            enumeration: self.budget_enumeration,
            fingerprint_entries: self.budget_fingerprint,
        })
    }
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Format {
    Text,
    Json,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum Kind {
    T,
    V,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum Method {
    Brute,
    Constructive,
    Fingerprint,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum CorpusKind {
    Graph,
    Random,
}

#[derive(Args, Debug)]
struct OmegaArg {
    /// Inline constraint tuple, e.g. `r=2; w1={1,2}; w2={2,3}; w12={1,3}`.
    #[arg(long, conflicts_with = "omega_file")]
    omega: Option<String>,
    /// File holding a constraint tuple in the inline syntax.
    #[arg(long)]
    omega_file: Option<PathBuf>,
}

impl OmegaArg {
    fn resolve(&self, n: usize) -> anyhow::Result<OmegaTuple> {
        let text = match (&self.omega, &self.omega_file) {
            (Some(t), _) => t.clone(),
            (None, Some(p)) => read(p)?,
            (None, None) => bail!(Error::Parse(
                "one of --omega or --omega-file is required".into()
            )),
        };
        Ok(OmegaTuple::parse(&text, n)?)
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check that a file describes a valid stabilizer state.
    Validate { path: PathBuf },
    /// Evaluate one invariant.
    Invariant {
        path: PathBuf,
        #[command(flatten)]
        omega: OmegaArg,
        #[arg(long, value_enum)]
        kind: Kind,
    },
    /// Write every dimension invariant of arity r in canonical order.
    Fingerprint {
        path: PathBuf,
        #[arg(long)]
        r: usize,
        /// Output file; standard output when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Decide local Clifford equivalence of two states.
    Equiv {
        path1: PathBuf,
        path2: PathBuf,
        #[arg(long, value_enum, default_value_t = Method::Constructive)]
        method: Method,
        /// Arity for the fingerprint method; defaults to n.
        #[arg(long)]
        r: Option<usize>,
    },
    /// Write a corpus of stabilizer files.
    Generate {
        #[arg(long, value_enum)]
        kind: CorpusKind,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        count: usize,
        #[arg(long)]
        out_dir: PathBuf,
        /// Fixed edge list for graph states, e.g. `1-2,2-3`; random graphs otherwise.
        #[arg(long)]
        edges: Option<String>,
    },
    /// Compare the dense trace formula with the arity-2 dimension invariant.
    DenseCheck {
        path: PathBuf,
        #[command(flatten)]
        omega: OmegaArg,
    },
}

fn read(path: &Path) -> anyhow::Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn load(path: &Path) -> anyhow::Result<Stabilizer> {
    let text = read(path)?;
    Stabilizer::parse_text(&text).with_context(|| format!("parsing {}", path.display()))
}

/// Loads and rejects invalid states for commands that assume validity.
fn load_valid(path: &Path) -> anyhow::Result<Stabilizer> {
    let s = load(path)?;
    let report = s.validate();
    if !report.is_ok() {
        bail!(Error::Invalid(format!("{}: {report}", path.display())));
    }
    Ok(s)
}

fn exit_code(err: &anyhow::Error) -> u8 {
    match err.downcast_ref::<Error>() {
        Some(Error::Budget { .. }) => 3,
        _ => 2,
    }
}

fn emit(format: Format, text: impl FnOnce() -> String, structured: impl FnOnce() -> Value) {
    match format {
        Format::Text => print!("{}", text()),
        Format::Json => println!("{}", structured()),
    }
}

fn operator_json(q: &LocalCliffordOp) -> Value {
    Value::Array(
        q.factors()
            .iter()
            .map(|f| json!([f.a as u8, f.b as u8, f.c as u8, f.d as u8]))
            .collect(),
    )
}

fn omega_json(omega: &OmegaTuple) -> Value {
    if omega.n() <= 64 {
        json!({ "text": omega.to_string(), "key": omega.key() })
    } else {
        json!({ "text": omega.to_string() })
    }
}

fn run(cli: Cli) -> anyhow::Result<u8> {
    let budget = cli.budgets.library()?;
    let format = cli.format;
    match cli.command {
        Command::Validate { path } => {
            let s = load(&path)?;
            let report = s.validate();
            emit(
                format,
                || format!("{report}\n"),
                || {
                    json!({
                        "valid": report.is_ok(),
                        "n": report.n,
                        "rank": report.rank,
                        "anticommuting": report
                            .anticommuting
                            .iter()
                            .map(|&(a, b)| [a + 1, b + 1])
                            .collect::<Vec<_>>(),
                    })
                },
            );
            Ok(if report.is_ok() { 0 } else { 1 })
        }
        Command::Invariant { path, omega, kind } => {
            let s = load_valid(&path)?;
            let omega = omega.resolve(s.n())?;
            let (kind, value) = match kind {
                Kind::T => (
                    InvariantKind::T,
                    invariants::t_invariant_with_budget(&s, &omega, &budget)?,
                ),
                Kind::V => (
                    InvariantKind::V,
                    invariants::v_dim_invariant(&s, &omega)? as u64,
                ),
            };
            emit(
                format,
                || format!("{value}\n"),
                || {
                    json!({
                        "n": s.n(),
                        "r": omega.r(),
                        "omega": omega_json(&omega),
                        "kind": kind,
                        "value": value,
                    })
                },
            );
            Ok(0)
        }
        Command::Fingerprint { path, r, out } => {
            let s = load_valid(&path)?;
            let fp = invariants::fingerprint(&s, r, &budget)?;
            let body = match format {
                Format::Text => fp.to_text(),
                Format::Json => format!("{}\n", serde_json::to_string(&fp.document())?),
            };
            match out {
                Some(p) => {
                    fs::write(&p, body).with_context(|| format!("writing {}", p.display()))?
                }
                None => print!("{body}"),
            }
            Ok(0)
        }
        Command::Equiv {
            path1,
            path2,
            method,
            r,
        } => {
            let s1 = load_valid(&path1)?;
            let s2 = load_valid(&path2)?;
            if s1.n() != s2.n() {
                bail!(Error::Dimension(format!(
                    "states on {} and {} qubits",
                    s1.n(),
                    s2.n()
                )));
            }
            let (name, found) = match method {
                Method::Brute => (
                    "brute",
                    lcequiv::brute_force_check_with_limit(
                        &s1,
                        &s2,
                        cli.budgets.budget_brute_force,
                    )?,
                ),
                Method::Constructive => (
                    "constructive",
                    lcequiv::constructive_check_with_limit(
                        &s1,
                        &s2,
                        cli.budgets.budget_constructive,
                    )?,
                ),
                Method::Fingerprint => {
                    let r = r.unwrap_or(s1.n());
                    let verdict = lcequiv::fingerprint_check(&s1, &s2, r, &budget)?;
                    return Ok(report_fingerprint(format, s1.n(), &verdict));
                }
            };
            match &found {
                Some(q) => emit(
                    format,
                    || format!("EQUIVALENT\n{}", q.to_text()),
                    || json!({ "verdict": "EQUIVALENT", "method": name, "operator": operator_json(q) }),
                ),
                None => emit(
                    format,
                    || "NOT-EQUIVALENT\n".to_string(),
                    || json!({ "verdict": "NOT-EQUIVALENT", "method": name }),
                ),
            }
            Ok(if found.is_some() { 0 } else { 1 })
        }
        Command::Generate {
            kind,
            n,
            seed,
            count,
            out_dir,
            edges,
        } => {
            if n == 0 {
                bail!(Error::Invalid("n must be at least 1".into()));
            }
            fs::create_dir_all(&out_dir)
                .with_context(|| format!("creating {}", out_dir.display()))?;
            let fixed = edges.as_deref().map(|e| parse_edges(e, n)).transpose()?;
            let mut written = Vec::new();
            for i in 0..count {
                let file_seed = seed.wrapping_add(i as u64);
                let (s, label) = match (kind, &fixed) {
                    (CorpusKind::Graph, Some(edges)) => {
                        (Stabilizer::graph_state_from_edges(n, edges)?, "graph")
                    }
                    (CorpusKind::Graph, None) => {
                        (Stabilizer::random_graph_state(n, file_seed)?, "graph")
                    }
                    (CorpusKind::Random, _) => (Stabilizer::random(n, file_seed)?, "random"),
                };
                let path = out_dir.join(format!("{label}_n{n}_{i:04}.stab"));
                let header = format!("# {label} n={n} seed={file_seed}\n");
                fs::write(&path, header + &s.to_text())
                    .with_context(|| format!("writing {}", path.display()))?;
                written.push(path.display().to_string());
            }
            emit(
                format,
                || written.iter().map(|p| format!("{p}\n")).collect(),
                || json!({ "files": written }),
            );
            Ok(0)
        }
        Command::DenseCheck { path, omega } => {
            let s = load_valid(&path)?;
            let omega = omega.resolve(s.n())?;
            if omega.r() != 2 {
                bail!(Error::Invalid(format!(
                    "dense check needs r=2, got r={}",
                    omega.r()
                )));
            }
            let trace = dense::lu_trace_invariant(&s, &omega)?;
            let dim = invariants::v_dim_invariant(&s, &omega)?;
            let count = 2f64.powi(dim as i32);
            let ratio = trace / count;
            emit(
                format,
                || format!("trace {trace:.12}\nv_count {count}\nratio {ratio:.12}\n"),
                || json!({ "omega": omega_json(&omega), "trace": trace, "v_dim": dim, "v_count": count, "ratio": ratio }),
            );
            Ok(0)
        }
    }
}

fn report_fingerprint(format: Format, n: usize, verdict: &FingerprintVerdict) -> u8 {
    match verdict {
        FingerprintVerdict::EqualAtR { r } => {
            emit(
                format,
                || {
                    let note = if *r < n {
                        format!("note: equality at r={r} < n={n} does not prove equivalence\n")
                    } else {
                        String::new()
                    };
                    format!("EQUAL-AT-r={r}\n{note}")
                },
                || json!({ "verdict": "EQUAL-AT-R", "r": r, "complete": *r >= n }),
            );
            0
        }
        FingerprintVerdict::Distinct {
            witness,
            left,
            right,
        } => {
            emit(
                format,
                || format!("DISTINCT\nwitness {witness}\ndim {left} vs {right}\n"),
                || json!({ "verdict": "DISTINCT", "witness": omega_json(witness), "left": left, "right": right }),
            );
            1
        }
    }
}

/// Parses `1-2,2-3` into 1-based edges.
fn parse_edges(text: &str, n: usize) -> anyhow::Result<Vec<(usize, usize)>> {
    text.split(',')
        .map(str::trim)
        .filter(|e| !e.is_empty())
        .map(|e| {
            let (a, b) = e
                .split_once('-')
                .ok_or_else(|| Error::Parse(format!("bad edge {e:?}")))?;
            let parse = |v: &str| {
                v.trim()
                    .parse::<usize>()
                    .map_err(|_| Error::Parse(format!("bad vertex in edge {e:?}")))
            };
            let edge = (parse(a)?, parse(b)?);
            if edge.0 == 0 || edge.1 == 0 || edge.0 > n || edge.1 > n || edge.0 == edge.1 {
                return Err(Error::Parse(format!("edge {e:?} invalid for n={n}")).into());
            }
            Ok(edge)
        })
        .collect()
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code(&err))
        }
    }
}
