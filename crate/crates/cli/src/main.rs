use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use lrc::analysis::{analyze_codebook, analyze_linear, sweep, FieldPolicy};
use lrc::construction::{construct, feasibility, minimum_guaranteed_q, Existence};
use lrc::f4family::verify_family;
use lrc::{
    AnyCode, Budget, CodeFile, CodeReport, Error, Family, FeasibilityMode, OperatorCode,
    OperatorMatrix, Verdict,
};
use serde_json::json;

const EXIT_FAILURE: u8 = 1;
const EXIT_INPUT: u8 = 2;
const EXIT_BELOW: u8 = 3;
const EXIT_INFEASIBLE: u8 = 4;

/// Construct, verify and exercise locally repairable codes.
#[derive(Parser)]
#[command(name = "lrc", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Copy)]
struct Common {
    /// Seed for every randomized step.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Oracle budget as a power of two: q^k enumeration limit 2^B,
    /// pair comparisons 2^(B+2), circuit search 2^(B-2).
    #[arg(long, default_value_t = 28, value_parser = clap::value_parser!(u32).range(4..=100))]
    budget: u32,
    /// Print machine-readable JSON instead of text.
    #[arg(long)]
    json: bool,
}

impl Common {
    fn budget(&self) -> Budget {
        Budget {
            enumeration: 1 << self.budget,
            pairwise: 1 << (self.budget + 2),
            circuits: 1 << (self.budget - 2),
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Build and verify a linear LRC, optionally writing its code file.
    Construct {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        r: usize,
        /// Field order; defaults to the smallest prime power above 2*C(n, k-1).
        #[arg(long)]
        q: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Measure (n, k, d, r) of a stored code file.
    Analyze {
        path: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Build and verify a member of an F4 operator-matrix family.
    F4 {
        /// f1-33, f2-33 or f1-34.
        #[arg(long)]
        family: Family,
        #[arg(long)]
        i: usize,
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Construct and measure every triple up to n-max; prints JSON lines.
    Sweep {
        #[arg(long)]
        n_max: usize,
        /// Largest accepted n-max.
        #[arg(long, default_value_t = 10)]
        cap: usize,
        /// Use this field order for every triple instead of the guaranteed one.
        #[arg(long)]
        q: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Erase random symbols of random codewords and repair them.
    Simulate {
        path: PathBuf,
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        #[arg(long)]
        erasures: usize,
        #[command(flatten)]
        common: Common,
    },
}

/// An error paired with the exit status it maps to.
struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Io(_)
            | Error::Json(_)
            | Error::Format(_)
            | Error::InvalidParams(_)
            | Error::NotPrime(_)
            | Error::NotPrimePower(_)
            | Error::InvalidModulus(_) => EXIT_INPUT,
            _ => EXIT_FAILURE,
        };
        let mut message = e.to_string();
        if let Error::BudgetExceeded { .. } = e {
            message.push_str(" (raise --budget)");
        }
        Failure { code, message }
    }
}

fn input_error(message: impl Into<String>) -> Failure {
    Failure {
        code: EXIT_INPUT,
        message: message.into(),
    }
}

type CmdResult = Result<u8, Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Construct {
            n,
            k,
            r,
            q,
            out,
            common,
        } => cmd_construct(n, k, r, q, out.as_deref(), common),
        Command::Analyze { path, common } => cmd_analyze(&path, common),
        Command::F4 {
            family,
            i,
            out,
            common,
        } => cmd_f4(family, i, out.as_deref(), common),
        Command::Sweep {
            n_max,
            cap,
            q,
            out,
            common,
        } => cmd_sweep(n_max, cap, q, out.as_deref(), common),
        Command::Simulate {
            path,
            trials,
            erasures,
            common,
        } => cmd_simulate(&path, trials, erasures, common),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn verdict_status(report: &CodeReport) -> u8 {
    match report.verdict {
        Verdict::Optimal | Verdict::AlmostOptimal => 0,
        Verdict::Below | Verdict::Invalid => EXIT_BELOW,
    }
}

fn print_report(report: &CodeReport) {
    println!(
        "n = {}, k = {}, d = {}, r = {}, d_opt = {}, verdict = {}",
        report.n, report.k, report.d, report.r, report.d_opt, report.verdict
    );
    if report.gap() > 0 {
        println!("gap = {} below d_opt", report.gap());
    }
}

/// Analysis of either code kind; for linear codes both distance oracles must
/// have run and agreed.
fn analyze_any(code: &AnyCode, budget: &Budget) -> Result<CodeReport, Failure> {
    match code {
        AnyCode::Linear(c) => {
            let report = analyze_linear(c, budget)?;
            if !report.cross_checked {
                return Err(Failure {
                    code: EXIT_FAILURE,
                    message: "circuit oracle exceeded its budget, distance not cross-checked (raise --budget)"
                        .into(),
                });
            }
            Ok(report)
        }
        AnyCode::Operator(c) => Ok(analyze_codebook(
            &c.matrix.codebook(budget)?,
            c.matrix.k(),
            budget,
        )?),
    }
}

fn cmd_construct(
    n: usize,
    k: usize,
    r: usize,
    q: Option<u64>,
    out: Option<&Path>,
    common: Common,
) -> CmdResult {
    let verdict = feasibility(n, k, r)?;
    if let FeasibilityMode::Infeasible(existence) = verdict.mode {
        let summary = match existence {
            Existence::Impossible => "d_opt = 0: no code exists",
            Existence::Unknown => "d_opt = 1: existence unknown",
        };
        if common.json {
            println!(
                "{}",
                json!({"n": n, "k": k, "r": r, "mode": "infeasible", "existence": existence, "reason": verdict.reason})
            );
        } else {
            println!("({n}, {k}, {r}) is outside the construction: {summary}");
            println!("{}", verdict.reason);
        }
        return Ok(EXIT_INFEASIBLE);
    }
    let q = q.unwrap_or_else(|| minimum_guaranteed_q(n, k));
    let budget = common.budget();
    let code = AnyCode::Linear(construct(n, k, r, q, common.seed)?);
    let report = analyze_any(&code, &budget)?;
    if let Some(path) = out {
        CodeFile::from_code(&code, Some(common.seed)).save(path)?;
    }
    if common.json {
        println!(
            "{}",
            json!({"mode": verdict.mode.to_string(), "q": q, "seed": common.seed, "report": report, "gap": report.gap()})
        );
    } else {
        println!(
            "({n}, {k}, {r}) over GF({q}), {} path, seed {}",
            verdict.mode, common.seed
        );
        print_report(&report);
        if let Some(path) = out {
            println!("wrote {}", path.display());
        }
    }
    Ok(verdict_status(&report))
}

fn load_code(path: &Path, budget: &Budget) -> Result<AnyCode, Failure> {
    let file = CodeFile::load(path).map_err(|e| input_error(format!("{}: {e}", path.display())))?;
    file.to_code(budget)
        .map_err(|e| input_error(format!("{}: {e}", path.display())))
}

fn cmd_analyze(path: &Path, common: Common) -> CmdResult {
    let budget = common.budget();
    let code = load_code(path, &budget)?;
    let report = analyze_any(&code, &budget)?;
    if common.json {
        println!("{}", json!({"report": report, "gap": report.gap()}));
    } else {
        print_report(&report);
        if report.r != code.r() {
            println!(
                "declared locality {} differs from measured {}",
                code.r(),
                report.r
            );
        }
    }
    Ok(verdict_status(&report))
}

fn cmd_f4(family: Family, i: usize, out: Option<&Path>, common: Common) -> CmdResult {
    let budget = common.budget();
    let report = verify_family(family, i, &budget)?;
    let code = AnyCode::Operator(OperatorCode::new(
        OperatorMatrix::family(family, i)?,
        &budget,
    )?);
    if let Some(path) = out {
        CodeFile::from_code(&code, None).save(path)?;
    }
    let c = report.claimed;
    let claimed_gap = report.d_opt_claimed.saturating_sub(c.d);
    if common.json {
        println!("{}", serde_json::to_string(&report).map_err(Error::from)?);
    } else {
        println!("{family} at i = {i}");
        println!(
            "claimed (n, k, d, r) = ({}, {}, {}, {}), d_opt at claimed r = {}",
            c.n, c.k, c.d, c.r, report.d_opt_claimed
        );
        print!("measured ");
        print_report(&report.measured);
        if claimed_gap > 0 {
            println!(
                "warning: claimed distance sits {claimed_gap} below the bound at r = {}",
                c.r
            );
        }
        if !report.matches_claim {
            println!("warning: measured parameters differ from the claimed ones");
        }
        if let Some(path) = out {
            println!("wrote {}", path.display());
        }
    }
    Ok(verdict_status(&report.measured))
}

fn cmd_sweep(
    n_max: usize,
    cap: usize,
    q: Option<u64>,
    out: Option<&Path>,
    common: Common,
) -> CmdResult {
    if n_max > cap {
        return Err(input_error(format!(
            "--n-max {n_max} exceeds the cap {cap} (raise --cap)"
        )));
    }
    let policy = q.map_or(FieldPolicy::Guaranteed, FieldPolicy::Fixed);
    let rows = sweep(n_max, policy, common.seed, &common.budget());
    let mut text = String::new();
    for row in &rows {
        text.push_str(&serde_json::to_string(row).map_err(Error::from)?);
        text.push('\n');
    }
    match out {
        Some(path) => std::fs::write(path, &text)
            .map_err(|e| input_error(format!("{}: {e}", path.display())))?,
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| input_error(e.to_string()))?,
    }
    let violations = rows.iter().filter(|r| !r.in_range).count();
    if violations > 0 {
        eprintln!(
            "{violations} of {} triples outside their predicted range",
            rows.len()
        );
        return Ok(EXIT_FAILURE);
    }
    Ok(0)
}

fn cmd_simulate(path: &Path, trials: usize, erasures: usize, common: Common) -> CmdResult {
    let budget = common.budget();
    let code = load_code(path, &budget)?;
    if erasures >= code.n() {
        return Err(input_error(format!(
            "--erasures {erasures} must be below n = {}",
            code.n()
        )));
    }
    let report = lrc::simulate(&code, trials, erasures, common.seed, &budget)?;
    println!("{}", serde_json::to_string(&report).map_err(Error::from)?);
    Ok(0)
}
