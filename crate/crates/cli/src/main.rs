use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use hypergroup_cli::spec::{self, InstanceSpec};
use hypergroup_cli::{CliError, Options, Outcome, EXIT_OK};
use hypergroup_core::io::{parse_json, HypergroupDoc};

#[derive(Parser)]
#[command(name = "hypergroup", version, about = "Hypergroups from conditional expectations on finite groups")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct InstanceArgs {
    /// Catalog name (Z2..Z12, S3, S4, D4, Q8), inline JSON or a file path.
    #[arg(long, conflicts_with = "spec")]
    group: Option<String>,
    /// Builder name or inline JSON `{"blocks": .., "weights": ..}` or a file path.
    #[arg(long, conflicts_with = "spec")]
    expectation: Option<String>,
    /// Builder parameters as JSON, e.g. `{"subgroup": ["e", "(12)"]}`.
    #[arg(long, conflicts_with = "spec")]
    params: Option<String>,
    /// Instance specification file (or inline JSON).
    #[arg(long)]
    spec: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    /// Comma separated subset of djs,dual,haar,representation,cp,fourier.
    #[arg(long, value_delimiter = ',')]
    checks: Vec<String>,
}

#[derive(Args, Clone)]
struct NumericArgs {
    #[arg(long, default_value_t = 1e-9)]
    tolerance: f64,
    #[arg(long, default_value_t = 256)]
    samples: usize,
}

#[derive(Subcommand)]
enum Command {
    /// Check the group, expectation and construction hypotheses.
    Validate {
        #[command(flatten)]
        instance: InstanceArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Emit the structure constants of the hypergroup.
    Construct {
        #[command(flatten)]
        instance: InstanceArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Verify the hypergroup axioms of a constructed or hand-authored table.
    Verify {
        #[command(flatten)]
        instance: InstanceArgs,
        /// Hypergroup table JSON (as written by `construct`).
        #[arg(long, conflicts_with_all = ["group", "expectation", "params", "spec"])]
        table: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Complete positivity certificate of the dual comultiplication.
    CpCheck {
        #[command(flatten)]
        instance: InstanceArgs,
        #[command(flatten)]
        numeric: NumericArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Sampled submultiplicativity of the Fourier algebra norm.
    Norms {
        #[command(flatten)]
        instance: InstanceArgs,
        #[command(flatten)]
        numeric: NumericArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the whole pipeline.
    Report {
        #[command(flatten)]
        instance: InstanceArgs,
        #[command(flatten)]
        numeric: NumericArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// List built-in groups and expectation builders.
    Catalog {
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Regular representations and characters.
    Reps {
        #[command(flatten)]
        instance: InstanceArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn instance_spec(a: &InstanceArgs) -> Result<InstanceSpec, CliError> {
    let mut s = match &a.spec {
        Some(v) => {
            let text = spec::inline_or_file(v)?
                .ok_or_else(|| CliError::Parse(format!("--spec: cannot read `{v}`")))?;
            InstanceSpec::from_json(&text)?
        }
        None => {
            let group = a
                .group
                .as_deref()
                .ok_or_else(|| CliError::Parse("--group or --spec is required".into()))?;
            InstanceSpec {
                group: spec::group_ref_from_arg(group)?,
                expectation: match &a.expectation {
                    Some(e) => spec::expectation_ref_from_arg(e)?,
                    None => spec::ExpectationRef::Builder("id".into()),
                },
                params: a.params.as_deref().map(spec::params_from_arg).transpose()?.unwrap_or_default(),
                checks: Vec::new(),
                seed: 0,
                output: None,
            }
        }
    };
    if let Some(seed) = a.seed {
        s.seed = seed;
    }
    if !a.checks.is_empty() {
        s.checks = a.checks.clone();
    }
    Ok(s)
}

fn options(n: &NumericArgs) -> Options {
    Options {
        tolerance: n.tolerance,
        samples: n.samples,
    }
}

fn run(command: &Command) -> (Result<Outcome, CliError>, Option<PathBuf>) {
    let with = |i: &InstanceArgs, f: &dyn Fn(&InstanceSpec) -> Result<Outcome, CliError>| {
        instance_spec(i).and_then(|s| f(&s))
    };
    match command {
        Command::Validate { instance, out } => (with(instance, &hypergroup_cli::validate), out.clone()),
        Command::Construct { instance, out } => {
            (with(instance, &hypergroup_cli::emit_structure_constants), out.clone())
        }
        Command::Verify { instance, table, out } => {
            let r = match table {
                Some(t) => spec::inline_or_file(t)
                    .and_then(|text| text.ok_or_else(|| CliError::Parse(format!("--table: cannot read `{t}`"))))
                    .and_then(|text| {
                        parse_json::<HypergroupDoc>(&text).map_err(|e| CliError::Parse(e.to_string()))
                    })
                    .and_then(|doc| hypergroup_cli::verify_table(&doc)),
                None => with(instance, &|s: &InstanceSpec| {
                    let mut s = s.clone();
                    if s.checks.is_empty() {
                        s.checks = ["djs", "dual", "haar"].map(String::from).to_vec();
                    }
                    hypergroup_cli::run_pipeline(&s, &Options::default())
                }),
            };
            (r, out.clone())
        }
        Command::CpCheck { instance, numeric, out } => {
            let o = options(numeric);
            (with(instance, &|s: &InstanceSpec| hypergroup_cli::cp_check(s, &o)), out.clone())
        }
        Command::Norms { instance, numeric, out } => {
            let o = options(numeric);
            (with(instance, &|s: &InstanceSpec| hypergroup_cli::norms(s, &o)), out.clone())
        }
        Command::Report { instance, numeric, out } => {
            let o = options(numeric);
            (with(instance, &|s: &InstanceSpec| hypergroup_cli::run_pipeline(s, &o)), out.clone())
        }
        Command::Catalog { out } => (
            Ok(Outcome {
                exit_code: EXIT_OK,
                document: hypergroup_cli::catalog_list(),
            }),
            out.clone(),
        ),
        Command::Reps { instance, out } => (with(instance, &hypergroup_cli::reps), out.clone()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (result, out) = run(&cli.command);
    let (code, doc) = match result {
        Ok(o) => (o.exit_code, o.document),
        Err(e) => (hypergroup_cli::EXIT_PARSE, e.document()),
    };
    let text = hypergroup_cli::render(&doc);
    match out {
        Some(path) => {
            if let Err(e) = std::fs::write(&path, &text) {
                eprintln!("cannot write {}: {e}", path.display());
                return ExitCode::from(hypergroup_cli::EXIT_PARSE as u8);
            }
        }
        None => print!("{text}"),
    }
    ExitCode::from(code as u8)
}
