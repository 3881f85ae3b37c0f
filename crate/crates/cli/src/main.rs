use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use strictlin::checker::CheckMode;
use strictlin::explorer::{parse_program, Program, DEFAULT_BOUND};
use strictlin::history::parse_history;
use strictlin::registry::{self, AfId, CheckRequest, ModelId, RunOutput, SpecId};
use strictlin::repro;
use strictlin::value::Value;

#[derive(Parser)]
#[command(name = "strictlin", version, about = "Check and explore concurrent queue histories")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check a recorded history file.
    CheckHistory {
        #[arg(long)]
        file: PathBuf,
        #[arg(long)]
        spec: SpecId,
        #[command(flatten)]
        check: CheckArgs,
        #[command(flatten)]
        common: Common,
    },
    /// Explore every schedule of a client program, optionally checking the executions.
    Explore {
        #[arg(long)]
        model: ModelId,
        #[arg(long)]
        program: PathBuf,
        #[arg(long, default_value_t = DEFAULT_BOUND)]
        bound: usize,
        #[arg(long)]
        spec: Option<SpecId>,
        #[command(flatten)]
        check: CheckArgs,
        #[command(flatten)]
        common: Common,
    },
    /// Compare a model with its atomic version on observable traces and divergence.
    Compare {
        #[arg(long)]
        model: ModelId,
        #[arg(long)]
        spec: Option<SpecId>,
        #[arg(long)]
        program: PathBuf,
        #[arg(long, default_value_t = DEFAULT_BOUND)]
        bound: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Run a named reproduction.
    Reproduce {
        name: String,
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// List models, specifications, abstraction functions and reproductions.
    List,
}

#[derive(Args)]
struct CheckArgs {
    #[arg(long, value_enum)]
    mode: Option<Mode>,
    #[arg(long)]
    adt: Option<SpecId>,
    #[arg(long)]
    af: Option<AfId>,
}

#[derive(Args)]
struct Common {
    /// Initial queue contents, comma separated (e.g. `'a','b'`).
    #[arg(long)]
    init: Option<String>,
    /// Also write the report as JSON to this file.
    #[arg(long)]
    json: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Strict,
    General,
    Impl,
}

impl From<Mode> for CheckMode {
    fn from(m: Mode) -> Self {
        match m {
            Mode::Strict => CheckMode::Strict,
            Mode::General => CheckMode::General,
            Mode::Impl => CheckMode::Impl,
        }
    }
}

impl CheckArgs {
    fn request(&self, spec: Option<SpecId>, default: Mode) -> CheckRequest {
        CheckRequest {
            mode: self.mode.unwrap_or(default).into(),
            spec,
            adt: self.adt,
            af: self.af,
        }
    }

    fn given(&self) -> bool {
        self.mode.is_some() || self.adt.is_some() || self.af.is_some()
    }
}

impl Common {
    fn init(&self) -> Result<Vec<Value>> {
        match &self.init {
            Some(text) => Ok(registry::parse_init(text)?),
            None => Ok(Vec::new()),
        }
    }
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn program(path: &Path) -> Result<Program> {
    let text = read(path)?;
    parse_program(&text).map_err(|e| anyhow!("{}: {e}", path.display()))
}

fn write_json(path: Option<&PathBuf>, value: &serde_json::Value) -> Result<()> {
    if let Some(path) = path {
        let text = serde_json::to_string_pretty(value)?;
        std::fs::write(path, text + "\n").with_context(|| format!("cannot write {}", path.display()))?;
    }
    Ok(())
}

fn finish(out: RunOutput, json: Option<&PathBuf>) -> Result<bool> {
    print!("{}", out.text);
    write_json(json, &out.json)?;
    Ok(out.passed)
}

fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::CheckHistory { file, spec, check, common } => {
            let text = read(&file)?;
            let history = parse_history(&text).map_err(|e| anyhow!("{}: {e}", file.display()))?;
            let out = registry::run_check_history(&history, spec, &common.init()?, check.request(None, Mode::General))?;
            finish(out, common.json.as_ref())
        }
        Command::Explore { model, program: path, bound, spec, check, common } => {
            let p = program(&path)?;
            let req = (spec.is_some() || check.given()).then(|| check.request(spec, Mode::Strict));
            let out = registry::run_explore(model, &p, bound, &common.init()?, req)?;
            finish(out, common.json.as_ref())
        }
        Command::Compare { model, spec, program: path, bound, common } => {
            let p = program(&path)?;
            let out = registry::run_compare(model, spec, &p, bound, &common.init()?)?;
            finish(out, common.json.as_ref())
        }
        Command::Reproduce { name, json } => {
            let out = repro::reproduce(&name)?;
            print!("{}", out.text);
            println!("{}", out.summary);
            println!("{}: {}", out.name, if out.passed { "PASS" } else { "FAIL" });
            write_json(json.as_ref(), &serde_json::to_value(&out)?)?;
            Ok(out.passed)
        }
        Command::List => {
            print!("{}", registry::catalog_text());
            println!("\nreproductions:");
            print!("{}", repro::catalog_text());
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
