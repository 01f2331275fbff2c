//! Command-line front end. [`run`] takes explicit streams so it can be driven
//! from tests; the binary is a thin wrapper around it.

use std::fs::File;
use std::io::{self, Read, Write};
use std::path::PathBuf;
use std::str::FromStr;

use clap::{Parser, Subcommand, ValueEnum};

use crate::bounds::{
    choose_prefix_length, emit_bound_table, max_constrained_entropy, max_constrained_entropy_numeric,
    verify_proof_chain, write_csv, ChainError,
};
use crate::code::{read_code, Code};
use crate::phimap::PhiVariant;
use crate::predicates::{
    property_violation, CodeProperty, SeparableCheck, SeparableReading, DEFAULT_SEPARABLE_BUDGET,
};
use crate::search::{max_code_search, search_table, SearchConfig, SearchOptions, DEFAULT_NODE_LIMIT};
use crate::code::CodeParams;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "sepcodes", version, about = "Separable, frameproof and B2 code toolkit")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

/// Prefix length for `prove-chain`: a number or `auto`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PrefixChoice {
    Auto,
    Fixed(usize),
}

impl FromStr for PrefixChoice {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "auto" {
            return Ok(Self::Auto);
        }
        s.parse()
            .map(Self::Fixed)
            .map_err(|_| format!("expected `auto` or a non-negative integer, got `{s}`"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum EntropyMode {
    Analytic,
    Numeric,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check a code file against a property; prints `true` or `false`.
    Verify {
        /// sep2, sep:<t>, fp:<t> or b2
        #[arg(long)]
        property: CodeProperty,
        /// Code file, or `-` for stdin
        #[arg(long)]
        input: PathBuf,
        /// distinct or disjoint (separability only)
        #[arg(long, default_value = "distinct")]
        reading: SeparableReading,
        /// Work budget for separability checks
        #[arg(long, default_value_t = DEFAULT_SEPARABLE_BUDGET)]
        budget: u64,
    },
    /// Exhaustive maximum-code search.
    Search {
        #[arg(long)]
        q: u32,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        property: CodeProperty,
        #[arg(long, default_value_t = DEFAULT_NODE_LIMIT)]
        node_limit: u64,
        /// Disable first-codeword symmetry reduction
        #[arg(long)]
        no_symmetry: bool,
        #[arg(long, default_value_t = 1)]
        workers: usize,
        #[arg(long, default_value = "distinct")]
        reading: SeparableReading,
        /// Print a CSV table for every length 1..=n instead of one witness
        #[arg(long)]
        table: bool,
    },
    /// Emit rate-bound curves as CSV.
    Bounds {
        #[arg(long)]
        q_min: u32,
        #[arg(long)]
        q_max: u32,
        /// Write to a file instead of stdout
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Evaluate the entropy proof chain on a code.
    ProveChain {
        #[arg(long)]
        input: PathBuf,
        /// sep or b2diff
        #[arg(long)]
        variant: PhiVariant,
        /// Prefix length, or `auto`
        #[arg(long, default_value = "auto")]
        e: PrefixChoice,
    },
    /// Maximum entropy of one coordinate under the zero-mass constraint.
    Entropy {
        #[arg(long)]
        q: u32,
        #[arg(long, value_enum, default_value_t = EntropyMode::Analytic)]
        mode: EntropyMode,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
    },
}

/// Failure carrying its exit code.
struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn new(message: impl ToString) -> Self {
        Self {
            code: EXIT_FAILURE,
            message: message.to_string(),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Self::new(format!("io error: {e}"))
    }
}

fn load_code(path: &PathBuf, stdin: &mut dyn Read) -> Result<Code, Failure> {
    let parsed = if path.as_os_str() == "-" {
        read_code(stdin)
    } else {
        let file = File::open(path).map_err(|e| Failure::new(format!("{}: {e}", path.display())))?;
        read_code(file)
    };
    parsed.map_err(|e| Failure::new(format!("{}: {e}", path.display())))
}

/// Parses `args` (including the program name) and executes the command.
/// Returns the process exit code.
pub fn run<I, S>(args: I, stdin: &mut dyn Read, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let rendered = e.render().to_string();
            let _ = if e.use_stderr() {
                stderr.write_all(rendered.as_bytes())
            } else {
                stdout.write_all(rendered.as_bytes())
            };
            return code;
        }
    };
    match execute(cli.command, stdin, stdout, stderr) {
        Ok(code) => code,
        Err(failure) => {
            let _ = writeln!(stderr, "error: {}", failure.message);
            failure.code
        }
    }
}

fn execute(
    command: Command,
    stdin: &mut dyn Read,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Result<i32, Failure> {
    match command {
        Command::Verify {
            property,
            input,
            reading,
            budget,
        } => {
            let code = load_code(&input, stdin)?;
            let check = SeparableCheck { reading, budget };
            match property_violation(&code, property, check).map_err(Failure::new)? {
                None => {
                    writeln!(out, "true")?;
                    Ok(EXIT_OK)
                }
                Some(v) => {
                    writeln!(out, "false")?;
                    writeln!(out, "violation: {}", v.describe(&code))?;
                    Ok(EXIT_FAILURE)
                }
            }
        }
        Command::Search {
            q,
            n,
            property,
            node_limit,
            no_symmetry,
            workers,
            reading,
            table,
        } => {
            let options = SearchOptions {
                node_limit,
                use_symmetry: !no_symmetry,
                workers,
                reading,
            };
            if table {
                let rows = search_table(q, n, property, options).map_err(Failure::new)?;
                writeln!(out, "n,max_size,rate,bound,exceeds_bound,complete")?;
                for row in rows {
                    let bound = row.bound.map_or_else(String::new, |b| format!("{b:.12}"));
                    writeln!(
                        out,
                        "{},{},{:.12},{},{},{}",
                        row.n, row.max_size, row.rate, bound, row.exceeds_bound, row.complete
                    )?;
                }
                return Ok(EXIT_OK);
            }
            let params = CodeParams::new(q, n).map_err(Failure::new)?;
            if let Some(space) = params.space_size() {
                writeln!(
                    err,
                    "searching {property} over {space} words (q={q}, n={n}), node limit {node_limit} per task"
                )?;
            }
            let result = max_code_search(&SearchConfig {
                params,
                property,
                options,
            })
            .map_err(Failure::new)?;
            writeln!(out, "{result}")?;
            Ok(EXIT_OK)
        }
        Command::Bounds { q_min, q_max, out: path } => {
            let rows = emit_bound_table(q_min, q_max).map_err(Failure::new)?;
            match path {
                Some(path) => {
                    let file = File::create(&path)
                        .map_err(|e| Failure::new(format!("{}: {e}", path.display())))?;
                    write_csv(&rows, io::BufWriter::new(file))?;
                }
                None => write_csv(&rows, &mut *out)?,
            }
            Ok(EXIT_OK)
        }
        Command::ProveChain { input, variant, e } => {
            let code = load_code(&input, stdin)?;
            let e = match e {
                PrefixChoice::Auto => choose_prefix_length(code.len() as u64, code.q()).min(code.n()),
                PrefixChoice::Fixed(e) => e,
            };
            let report = verify_proof_chain(&code, e, variant).map_err(|e| match e {
                ChainError::NotInFamily { property, description, .. } => Failure::new(format!(
                    "code violates {property}, required by the {variant} variant: {description}"
                )),
                other => Failure::new(other),
            })?;
            write!(out, "{}", report.to_text())?;
            write!(out, "{}", report.to_key_values())?;
            Ok(if report.pass() { EXIT_OK } else { EXIT_FAILURE })
        }
        Command::Entropy { q, mode, tol } => {
            match mode {
                EntropyMode::Analytic => {
                    let (bits, dist) = max_constrained_entropy(q).map_err(Failure::new)?;
                    writeln!(out, "q={q} mode=analytic bits={bits:.12}")?;
                    writeln!(
                        out,
                        "alpha0={:.12} alpha_rest={:.12} symbols={}",
                        dist.masses()[0],
                        dist.masses().get(1).copied().unwrap_or(0.0),
                        dist.masses().len()
                    )?;
                }
                EntropyMode::Numeric => {
                    let bits = max_constrained_entropy_numeric(q, tol).map_err(Failure::new)?;
                    writeln!(out, "q={q} mode=numeric bits={bits:.12}")?;
                }
            }
            Ok(EXIT_OK)
        }
    }
}
