//! `lconv`: command-line front end. Every subcommand maps onto one library
//! operation; parity tables are explicit file inputs so runs are
//! reproducible from the command line alone.
//!
//! Exit codes: 0 success, 1 a data invariant the caller asserted
//! (`--expect-zero`, `--expect-pair`) was violated, 2 usage or I/O error.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use lconv_core::analytic::{analytic_record, write_analytic_csv};
use lconv_core::arith::{simple_prime_sieve, ParityTable, SignFunction};
use lconv_core::conv::{
    conv_scan, extremal_structure_report, goldbach_mm_pair, MmSearch,
};
use lconv_core::signature::{
    compute_signature, equivcond_scan, relations_check, PairState,
};
use lconv_core::spectrum::{dilation_residual, spectrum, spectrum_to_json};

#[derive(Parser)]
#[command(name = "lconv", about = "Sign-function convolution and spectrum toolkit", version)]
struct Cli {
    /// Worker threads for parallel sections (default: all cores). Output is
    /// identical for any value.
    #[arg(long, global = true)]
    workers: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum Function {
    /// Liouville lambda, read from a parity file.
    Liouville,
    /// Quadratic character mod p.
    Character,
}

/// Selects the sign function; `liouville` needs `--parity`.
#[derive(Args)]
struct FunctionArgs {
    #[arg(long, value_enum, default_value = "liouville")]
    function: Function,
    /// Parity file produced by `lconv sieve`.
    #[arg(long)]
    parity: Option<PathBuf>,
}

impl FunctionArgs {
    fn load_table(&self) -> Result<Option<ParityTable>> {
        match (self.function, &self.parity) {
            (Function::Liouville, Some(path)) => Ok(Some(
                ParityTable::load(path).with_context(|| format!("reading {}", path.display()))?,
            )),
            (Function::Liouville, None) => bail!("--function liouville requires --parity"),
            (Function::Character, _) => Ok(None),
        }
    }

    fn build<'a>(&self, table: &'a Option<ParityTable>, p: u64) -> Result<SignFunction<'a>> {
        match self.function {
            Function::Liouville => Ok(SignFunction::liouville(table.as_ref().unwrap())),
            Function::Character => Ok(SignFunction::quadratic(p)?),
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Sieve Liouville parities up to a limit and write a parity file.
    Sieve {
        #[arg(long)]
        limit: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Convolution sums L(N) for all 2 <= N <= limit, with the extremal flag.
    Scan {
        #[arg(long)]
        limit: u64,
        #[arg(long)]
        parity: PathBuf,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Divisor/extremality structure report for one N (JSON).
    Structure {
        #[arg(long)]
        n: u64,
        #[arg(long)]
        parity: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Spectrum of a sign function mod p (JSON).
    Spectrum {
        #[arg(long)]
        p: u64,
        #[command(flatten)]
        function: FunctionArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Dilation residuals `p,d,sign,residual`; one row per d (or all d < p).
    Dilation {
        #[arg(long)]
        p: u64,
        /// Single dilation factor; omitted means every 1 <= d < p.
        #[arg(long)]
        d: Option<u64>,
        #[command(flatten)]
        function: FunctionArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Descent trace for (p, q, m, j): `step,r,m,j,m_plus_jp` per step.
    Signature {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        q: u64,
        #[arg(long)]
        m: u64,
        #[arg(long)]
        j: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Translation-relation violation counts as `p,q,lemma,violations,first_witness`.
    Relations {
        #[arg(long)]
        p: u64,
        #[command(flatten)]
        function: FunctionArgs,
        /// Exit 1 if any violation is found.
        #[arg(long)]
        expect_zero: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Equivalence-condition scan as `p,q,lemma,violations,first_witness`.
    Equivcond {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        q: u64,
        #[command(flatten)]
        function: FunctionArgs,
        /// Exit 1 if any violation is found.
        #[arg(long)]
        expect_zero: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Per-prime analytic records for odd primes up to a bound (CSV).
    Analytic {
        #[arg(long)]
        pmax: u64,
        #[arg(long)]
        parity: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Minus-minus pair search at an even N (JSON result).
    GoldbachMm {
        #[arg(long)]
        n: u64,
        #[arg(long)]
        parity: PathBuf,
        /// Exit 1 if no pair exists.
        #[arg(long)]
        expect_pair: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Writes through a temp file in the target directory so a failure never
/// leaves a partial output behind.
fn write_output(out: Option<&Path>, body: &[u8]) -> Result<()> {
    match out {
        None => {
            std::io::stdout().write_all(body)?;
            Ok(())
        }
        Some(path) => {
            let dir = path.parent().filter(|d| !d.as_os_str().is_empty());
            let mut tmp = tempfile::NamedTempFile::new_in(dir.unwrap_or(Path::new(".")))?;
            tmp.write_all(body)?;
            tmp.persist(path)
                .with_context(|| format!("writing {}", path.display()))?;
            Ok(())
        }
    }
}

fn load_parity(path: &Path) -> Result<ParityTable> {
    ParityTable::load(path).with_context(|| format!("reading {}", path.display()))
}

fn run(cli: Cli) -> Result<ExitCode> {
    if let Some(n) = cli.workers {
        if n == 0 {
            bail!("--workers must be positive");
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .context("configuring worker pool")?;
    }

    match cli.command {
        Command::Sieve { limit, out } => {
            let table = ParityTable::build(limit)?;
            // save() already streams to the final path; build it fully in a
            // sibling temp file instead so failures leave nothing behind.
            let dir = out.parent().filter(|d| !d.as_os_str().is_empty());
            let tmp = tempfile::NamedTempFile::new_in(dir.unwrap_or(Path::new(".")))?;
            table.save(tmp.path())?;
            tmp.persist(&out)
                .with_context(|| format!("writing {}", out.display()))?;
        }
        Command::Scan {
            limit,
            parity,
            format,
            out,
        } => {
            let table = load_parity(&parity)?;
            let report = conv_scan(&table, limit)?;
            let mut buf = Vec::new();
            match format {
                Format::Csv => report.write_csv(&mut buf)?,
                Format::Json => report.write_json(&mut buf)?,
            }
            write_output(out.as_deref(), &buf)?;
        }
        Command::Structure { n, parity, out } => {
            let table = load_parity(&parity)?;
            let report = extremal_structure_report(&table, n)?;
            let mut body = serde_json::to_string_pretty(&report)?;
            body.push('\n');
            write_output(out.as_deref(), body.as_bytes())?;
        }
        Command::Spectrum { p, function, out } => {
            let table = function.load_table()?;
            let f = function.build(&table, p)?;
            let spec = spectrum(&f, p)?;
            let mut body = spectrum_to_json(&spec);
            body.push('\n');
            write_output(out.as_deref(), body.as_bytes())?;
        }
        Command::Dilation {
            p,
            d,
            function,
            out,
        } => {
            let table = function.load_table()?;
            let f = function.build(&table, p)?;
            let spec = spectrum(&f, p)?;
            let ds: Vec<u64> = match d {
                Some(d) => vec![d],
                None => (1..p).collect(),
            };
            let mut buf = Vec::new();
            writeln!(buf, "p,d,sign,residual")?;
            for d in ds {
                let s = f.eval(d)?;
                let residual = dilation_residual(&spec, d, s)?;
                writeln!(buf, "{p},{d},{s},{residual:.9e}")?;
            }
            write_output(out.as_deref(), &buf)?;
        }
        Command::Signature { p, q, m, j, out } => {
            let state = PairState::new(p, q, m, j)?;
            let sig = compute_signature(&state)?;
            let mut buf = Vec::new();
            writeln!(buf, "step,r,m,j,m_plus_jp")?;
            for (step, s) in sig.trajectory.iter().enumerate() {
                let r = sig.rs.get(step).copied().unwrap_or(q);
                writeln!(buf, "{step},{r},{},{},{}", s.m, s.j, s.height())?;
            }
            write_output(out.as_deref(), &buf)?;
        }
        Command::Relations {
            p,
            function,
            expect_zero,
            out,
        } => {
            let table = function.load_table()?;
            let f = function.build(&table, p)?;
            let report = relations_check(&f, p)?;
            let mut buf = Vec::new();
            writeln!(buf, "p,q,lemma,violations,first_witness")?;
            for (lemma, count) in [
                ('a', report.violations_a),
                ('b', report.violations_b),
                ('c', report.violations_c),
            ] {
                let witness = match report.first_witness {
                    Some((l, m)) if l == lemma => m.to_string(),
                    _ => String::new(),
                };
                writeln!(buf, "{p},,{lemma},{count},{witness}")?;
            }
            write_output(out.as_deref(), &buf)?;
            if expect_zero && report.total() > 0 {
                return Ok(ExitCode::from(1));
            }
        }
        Command::Equivcond {
            p,
            q,
            function,
            expect_zero,
            out,
        } => {
            let table = function.load_table()?;
            let f = function.build(&table, p)?;
            let report = equivcond_scan(&f, p, q)?;
            let mut buf = Vec::new();
            writeln!(buf, "p,q,lemma,violations,first_witness")?;
            let witness = report
                .first_witness
                .map(|(m, j)| format!("{m}:{j}"))
                .unwrap_or_default();
            writeln!(buf, "{p},{q},equivcond,{},{witness}", report.violations)?;
            write_output(out.as_deref(), &buf)?;
            if expect_zero && report.violations > 0 {
                return Ok(ExitCode::from(1));
            }
        }
        Command::Analytic { pmax, parity, out } => {
            let table = load_parity(&parity)?;
            let mut records = Vec::new();
            for p in simple_prime_sieve(pmax) {
                if p == 2 {
                    continue;
                }
                records.push(analytic_record(&table, p)?);
            }
            let mut buf = Vec::new();
            write_analytic_csv(&records, &mut buf)?;
            write_output(out.as_deref(), &buf)?;
        }
        Command::GoldbachMm {
            n,
            parity,
            expect_pair,
            out,
        } => {
            let table = load_parity(&parity)?;
            let result = goldbach_mm_pair(&table, n)?;
            let mut body = serde_json::to_string_pretty(&result)?;
            body.push('\n');
            write_output(out.as_deref(), body.as_bytes())?;
            if expect_pair && matches!(result, MmSearch::None { .. }) {
                return Ok(ExitCode::from(1));
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(2)
        }
    }
}
