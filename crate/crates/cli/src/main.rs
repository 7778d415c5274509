use std::path::PathBuf;
use std::process::ExitCode;

use chamberlain::problem::{parse, OutputFormat, ProblemFile};
use chamberlain::report::{dot_for, error_report, run, Command};
use chamberlain::wallcross::Side;
use chamberlain::Error;
use clap::{Args, Parser, Subcommand, ValueEnum};

/// Chamber structure, wall crossings and semiorthogonal decompositions for toric GIT problems.
#[derive(Parser)]
#[command(name = "chamberlain", version)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Args)]
struct Common {
    /// Problem file (TOML).
    file: PathBuf,
    /// Perturbation seed; overrides `options.seed`.
    #[arg(long)]
    seed: Option<u64>,
    /// Output format; overrides `options.format`.
    #[arg(long, value_enum)]
    format: Option<Format>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Clone, Copy, ValueEnum)]
enum SideArg {
    #[value(name = "K")]
    K,
    #[value(name = "-K")]
    AntiK,
}

#[derive(Subcommand)]
enum Cmd {
    /// Secondary fan.
    Gkz(Common),
    /// Canonical characters and their chambers.
    Kuznetsov(Common),
    /// Wall-crossing ledger on one side.
    Sod {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum, allow_hyphen_values = true)]
        side: Option<SideArg>,
    },
    /// Complete-intersection pipeline from a toric base and divisors.
    Ci(Common),
    /// Calabi-Yau labels.
    Cy(Common),
    /// Visitor construction.
    Visitor(Common),
    /// Path-independence audit.
    Audit(Common),
    /// Chamber graph in DOT.
    Dot {
        file: PathBuf,
        /// Write here instead of stdout.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

fn load(path: &PathBuf) -> Result<ProblemFile, Error> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::InvalidInput(format!("{}: {e}", path.display())))?;
    let parsed = parse(&text)?;
    for w in &parsed.warnings {
        eprintln!("warning: {w}");
    }
    Ok(parsed.problem)
}

fn exit_code(e: &Error) -> ExitCode {
    match e {
        Error::UndefinedSide(_) => ExitCode::from(2),
        _ => ExitCode::from(1),
    }
}

fn verbose() -> bool {
    std::env::var("CHAMBERLAIN_VERBOSE").is_ok_and(|v| !v.is_empty() && v != "0")
}

fn emit(doc: &serde_json::Value, format: OutputFormat) {
    match format {
        OutputFormat::Json => println!("{}", serde_json::to_string_pretty(doc).expect("serializable")),
        OutputFormat::Text => {
            if let Some(lines) = doc["summary"].as_array() {
                for l in lines {
                    println!("{}", l.as_str().unwrap_or_default());
                }
            }
            if let Some(err) = doc.get("error") {
                println!("error [{}]: {}", err["code"].as_str().unwrap_or_default(), err["message"].as_str().unwrap_or_default());
            }
            if verbose() {
                println!("{}", serde_json::to_string_pretty(doc).expect("serializable"));
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    // `side_from_file`: sod without --side takes options.side
    let (common, command, side_from_file) = match cli.command {
        Cmd::Dot { file, output } => {
            let result = load(&file).and_then(|p| dot_for(&p));
            return match result {
                Ok(dot) => match output {
                    Some(path) => match std::fs::write(&path, dot) {
                        Ok(()) => ExitCode::SUCCESS,
                        Err(e) => {
                            eprintln!("error: {}: {e}", path.display());
                            ExitCode::from(1)
                        }
                    },
                    None => {
                        print!("{dot}");
                        ExitCode::SUCCESS
                    }
                },
                Err(e) => {
                    emit(&error_report("dot", &e), OutputFormat::Json);
                    exit_code(&e)
                }
            };
        }
        Cmd::Gkz(c) => (c, Command::Gkz, false),
        Cmd::Kuznetsov(c) => (c, Command::Kuznetsov, false),
        Cmd::Sod { common, side } => {
            let resolved = match side {
                Some(SideArg::K) | None => Side::K,
                Some(SideArg::AntiK) => Side::AntiK,
            };
            (common, Command::Sod(resolved), side.is_none())
        }
        Cmd::Ci(c) => (c, Command::Ci, false),
        Cmd::Cy(c) => (c, Command::Cy, false),
        Cmd::Visitor(c) => (c, Command::Visitor, false),
        Cmd::Audit(c) => (c, Command::Audit, false),
    };
    let mut problem = match load(&common.file) {
        Ok(p) => p,
        Err(e) => {
            emit(&error_report(command.name(), &e), common_format(&common, None));
            return exit_code(&e);
        }
    };
    if let Some(seed) = common.seed {
        problem.options.seed = seed;
    }
    let format = common_format(&common, Some(&problem));
    let command = match command {
        Command::Sod(_) if side_from_file => Command::Sod(problem.options.side),
        c => c,
    };
    match run(command, &problem) {
        Ok(doc) => {
            emit(&doc, format);
            ExitCode::SUCCESS
        }
        Err(e) => {
            emit(&error_report(command.name(), &e), format);
            exit_code(&e)
        }
    }
}

fn common_format(common: &Common, problem: Option<&ProblemFile>) -> OutputFormat {
    match common.format {
        Some(Format::Json) => OutputFormat::Json,
        Some(Format::Text) => OutputFormat::Text,
        None => problem.map_or(OutputFormat::Json, |p| p.options.format),
    }
}
