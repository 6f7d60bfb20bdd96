//! The `isc` command-line front end.
//!
//! Exit codes: 0 on success, 1 when a checked property fails, 2 on usage or
//! input errors, 3 when a counter exceeds the size caps.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::analysis::{
    decompose, is_pure, pseudomanifold, reconstruction_injective, strongly_connected,
    verify_decomposition_iso, FacetGraph,
};
use crate::complex::{Complex, Limits};
use crate::correspondences::{
    chromatic_to_witness, poset_to_witness, witness_to_chromatic, witness_to_poset,
    ChromaticSimplex, Execution, WitnessPoset,
};
use crate::enumeration::count_facets;
use crate::error::Error;
use crate::round_counter::RoundCounter;
use crate::witness::{format_set, Simplex};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_LIMIT: i32 = 3;

/// Properties run by `check`, in output order.
pub const PROPERTIES: [&str; 7] = [
    "pure",
    "strong",
    "pseudo",
    "euler",
    "reconstruction",
    "decomposition",
    "count",
];

#[derive(Debug, Parser)]
#[command(name = "isc", version, about = "Immediate snapshot complexes from witness structures")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct CounterArgs {
    /// Round counter: dense list `2,1,1` or `@file.json`
    #[arg(long)]
    pub counter: String,
    /// Largest allowed total number of rounds
    #[arg(long, default_value_t = 8)]
    pub max_cardinality: u64,
    /// Largest allowed number of processes
    #[arg(long, default_value_t = 4)]
    pub max_processes: usize,
    /// Ignore the size caps
    #[arg(long)]
    pub force: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Dot,
    Text,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Encoding {
    Witness,
    Chromatic,
    Poset,
    Execution,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build the complex and print a summary or an export
    Build {
        #[command(flatten)]
        counter: CounterArgs,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print the number of facets
    Count {
        #[command(flatten)]
        counter: CounterArgs,
        /// Compare against explicit facet enumeration
        #[arg(long)]
        verify: bool,
    },
    /// Check structural properties, one PASS/FAIL line each
    Check {
        #[command(flatten)]
        counter: CounterArgs,
        /// Comma list out of pure,strong,pseudo,euler,reconstruction,decomposition,count or `all`
        #[arg(long, default_value = "all")]
        props: String,
    },
    /// List the parts of the canonical decomposition
    Decompose {
        #[command(flatten)]
        counter: CounterArgs,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Translate a simplex between encodings
    Convert {
        #[command(flatten)]
        counter: CounterArgs,
        /// The simplex in the `--from` encoding
        #[arg(long)]
        simplex: String,
        #[arg(long, value_enum, default_value_t = Encoding::Witness)]
        from: Encoding,
        #[arg(long, value_enum)]
        to: Encoding,
    },
    /// Write the complex as JSON or as a DOT facet graph
    Export {
        #[command(flatten)]
        counter: CounterArgs,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Lib(#[from] Error),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    fn exit_code(&self) -> i32 {
        match self {
            CliError::Lib(Error::LimitExceeded { .. }) => EXIT_LIMIT,
            _ => EXIT_USAGE,
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

/// Parses `args` (program name first), runs the command and returns the exit
/// code. Regular output goes to `out`, diagnostics to `err`.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            if e.use_stderr() {
                let _ = write!(err, "{text}");
            } else {
                let _ = write!(out, "{text}");
            }
            return code;
        }
    };
    let pool = match thread_pool() {
        Ok(pool) => pool,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return EXIT_USAGE;
        }
    };
    match pool.install(|| execute(&cli.command)) {
        Ok((text, code)) => {
            let written = match output_path(&cli.command) {
                Some(path) => std::fs::write(path, text.as_bytes()),
                None => out.write_all(text.as_bytes()),
            };
            if let Err(e) = written {
                let _ = writeln!(err, "error: {e}");
                return EXIT_USAGE;
            }
            code
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

/// A rayon pool sized by `ISC_MAX_THREADS`, or the rayon default.
fn thread_pool() -> CliResult<rayon::ThreadPool> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Ok(v) = std::env::var("ISC_MAX_THREADS") {
        let n: usize = v
            .trim()
            .parse()
            .map_err(|_| CliError::Usage(format!("ISC_MAX_THREADS must be a number, got {v:?}")))?;
        builder = builder.num_threads(n.max(1));
    }
    builder
        .build()
        .map_err(|e| CliError::Usage(format!("cannot start thread pool: {e}")))
}

fn output_path(command: &Command) -> Option<&PathBuf> {
    match command {
        Command::Build { out, .. } | Command::Decompose { out, .. } | Command::Export { out, .. } => {
            out.as_ref()
        }
        _ => None,
    }
}

fn load_counter(args: &CounterArgs) -> CliResult<RoundCounter> {
    let text = match args.counter.strip_prefix('@') {
        Some(path) => std::fs::read_to_string(path)?,
        None => args.counter.clone(),
    };
    let counter = RoundCounter::parse(&text)?;
    if counter.budgets().is_empty() {
        return Err(Error::EmptySupport.into());
    }
    Ok(counter)
}

fn limits(args: &CounterArgs) -> Limits {
    if args.force {
        Limits::unbounded()
    } else {
        Limits {
            max_cardinality: args.max_cardinality,
            max_processes: args.max_processes,
        }
    }
}

fn build(args: &CounterArgs) -> CliResult<Complex> {
    let counter = load_counter(args)?;
    Ok(Complex::build_with(&counter, &limits(args))?)
}

fn execute(command: &Command) -> CliResult<(String, i32)> {
    match command {
        Command::Build { counter, format, .. } => {
            let c = build(counter)?;
            Ok((render_complex(&c, *format)?, EXIT_OK))
        }
        Command::Export { counter, format, .. } => {
            let c = build(counter)?;
            if *format == Format::Text {
                return Err(CliError::Usage("export supports --format json or dot".into()));
            }
            Ok((render_complex(&c, *format)?, EXIT_OK))
        }
        Command::Count { counter, verify } => count(counter, *verify),
        Command::Check { counter, props } => check(counter, props),
        Command::Decompose { counter, format, .. } => decomposition(counter, *format),
        Command::Convert {
            counter,
            simplex,
            from,
            to,
        } => convert(counter, simplex, *from, *to).map(|s| (s, EXIT_OK)),
    }
}

fn render_complex(c: &Complex, format: Format) -> CliResult<String> {
    Ok(match format {
        Format::Json => {
            let mut s = c.to_json()?;
            s.push('\n');
            s
        }
        Format::Dot => FacetGraph::new(c).to_dot(&format!("P{}", c.counter())),
        Format::Text => {
            let f = c.f_vector();
            let counts: Vec<String> = f.counts.iter().map(u64::to_string).collect();
            format!(
                "counter: {}\ndimension: {}\nsimplices: {} (including the empty simplex)\nf-vector: ({})\neuler characteristic: {}\n",
                c.counter(),
                c.dimension(),
                c.len(),
                counts.join(","),
                f.euler_characteristic()
            )
        }
    })
}

fn count(args: &CounterArgs, verify: bool) -> CliResult<(String, i32)> {
    let counter = load_counter(args)?;
    let n = count_facets(&counter);
    let mut text = format!("{n}\n");
    if !verify {
        return Ok((text, EXIT_OK));
    }
    let c = Complex::build_with(&counter, &limits(args))?;
    let enumerated = c.facets().count();
    if n == enumerated.into() {
        let _ = writeln!(text, "verify: PASS (enumerated {enumerated} facets)");
        Ok((text, EXIT_OK))
    } else {
        let _ = writeln!(text, "verify: FAIL (enumerated {enumerated} facets)");
        Ok((text, EXIT_FAIL))
    }
}

fn selected_properties(props: &str) -> CliResult<Vec<&'static str>> {
    if props.trim() == "all" {
        return Ok(PROPERTIES.to_vec());
    }
    let wanted: Vec<&str> = props.split(',').map(str::trim).collect();
    if let Some(bad) = wanted.iter().find(|w| !PROPERTIES.contains(w)) {
        return Err(CliError::Usage(format!(
            "unknown property {bad:?}; expected one of {}",
            PROPERTIES.join(",")
        )));
    }
    Ok(PROPERTIES
        .iter()
        .copied()
        .filter(|p| wanted.contains(p))
        .collect())
}

fn check(args: &CounterArgs, props: &str) -> CliResult<(String, i32)> {
    let selected = selected_properties(props)?;
    let c = build(args)?;
    let mut text = String::new();
    let mut code = EXIT_OK;
    for name in selected {
        let (pass, detail) = run_property(&c, name)?;
        let verdict = if pass { "PASS" } else { "FAIL" };
        let _ = writeln!(text, "{name}: {verdict} ({detail})");
        if !pass {
            code = EXIT_FAIL;
        }
    }
    Ok((text, code))
}

fn run_property(c: &Complex, name: &str) -> CliResult<(bool, String)> {
    let facets = c.facets().count();
    Ok(match name {
        "pure" => (is_pure(c), format!("dimension {}, {facets} facets", c.dimension())),
        "strong" => {
            let g = FacetGraph::new(c);
            (g.is_connected(), format!("{facets} facets, {} adjacencies", g.edges().len()))
        }
        "pseudo" => {
            let r = pseudomanifold(c);
            let pass = r.is_pseudomanifold && r.boundary_matches && strongly_connected(c);
            let interior = r.ridge_degrees.values().filter(|&&d| d == 2).count();
            (
                pass,
                format!(
                    "{} ridges, {interior} interior, boundary {} simplices",
                    r.ridge_degrees.len(),
                    r.boundary_keys.len()
                ),
            )
        }
        "euler" => {
            let chi = c.euler_characteristic();
            (chi == 1, format!("chi = {chi}"))
        }
        "reconstruction" => (
            reconstruction_injective(c),
            format!("{} nonempty simplices", c.len() - 1),
        ),
        "decomposition" => {
            let parts = decompose(c).parts;
            let mut pass = true;
            for s in parts.keys().filter(|s| !s.is_empty()) {
                pass &= verify_decomposition_iso(c, s)?;
            }
            (pass, format!("{} nonempty parts", parts.len() - 1))
        }
        "count" => {
            let n = count_facets(c.counter());
            (n == facets.into(), format!("recursion {n}, enumerated {facets}"))
        }
        _ => unreachable!("validated by selected_properties"),
    })
}

fn decomposition(args: &CounterArgs, format: Format) -> CliResult<(String, i32)> {
    let c = build(args)?;
    let d = decompose(&c);
    match format {
        Format::Json => {
            let map: serde_json::Map<String, serde_json::Value> = d
                .parts
                .iter()
                .map(|(s, keys)| (format!("{{{}}}", format_set(s)), serde_json::json!(keys)))
                .collect();
            let mut s = serde_json::to_string_pretty(&map).map_err(Error::from)?;
            s.push('\n');
            Ok((s, EXIT_OK))
        }
        Format::Text => {
            let mut text = String::new();
            for (s, keys) in &d.parts {
                let target = c.counter().execute(s)?;
                let _ = writeln!(
                    text,
                    "X_{{{}}}: {} simplices, isomorphic to P{}",
                    format_set(s),
                    keys.len(),
                    target
                );
            }
            Ok((text, EXIT_OK))
        }
        Format::Dot => Err(CliError::Usage("decompose supports --format text or json".into())),
    }
}

fn convert(args: &CounterArgs, input: &str, from: Encoding, to: Encoding) -> CliResult<String> {
    let counter = load_counter(args)?;
    let n = counter.budgets().len() as u32 - 1;
    let witness: Simplex = match from {
        Encoding::Witness => input.parse()?,
        Encoding::Chromatic => chromatic_to_witness(&input.parse::<ChromaticSimplex>()?, n)?,
        Encoding::Poset => poset_to_witness(&WitnessPoset::from_json(&counter, input)?)?,
        Encoding::Execution => Execution::parse(&counter, input)?.to_facet(),
    };
    if !crate::complex::is_simplex_of(&witness, &counter) {
        return Err(Error::NotASimplex {
            key: witness.key(),
            counter: counter.to_string(),
        }
        .into());
    }
    let text = match to {
        Encoding::Witness => witness.key(),
        Encoding::Chromatic => witness_to_chromatic(&witness)?.to_string(),
        Encoding::Poset => witness_to_poset(&witness, &counter)?.to_json()?,
        Encoding::Execution => Execution::from_facet(&witness, &counter)?.to_string(),
    };
    Ok(text + "\n")
}
