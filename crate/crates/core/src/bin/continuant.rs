use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use continuant::ensemble::Mode;
use continuant::semigroup::Parity;
use continuant::workbench::{self, RunConfig};
use continuant::{Alphabet, Error};

#[derive(Parser)]
#[command(name = "continuant", version, about = "Continued fractions with bounded partial quotients")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Continuant, value and matrix of a word such as 2,1,3
    Continuant {
        #[arg(allow_hyphen_values = true, default_value = "")]
        word: String,
    },
    /// Words with continuant at most --bound
    Enumerate(Common),
    /// Denominator coverage up to --bound
    Density(Common),
    /// Dimension fit over --grid
    Dimension(Common),
    /// Layered ensemble and its structural checks
    Ensemble(Common),
    /// Norm spectrum and arc report of the ensemble
    Expsum(Common),
    /// Dedekind sum identity sweep
    Dedekind(Common),
}

#[derive(Args)]
struct Common {
    #[arg(long, default_value = "1..5")]
    alphabet: String,
    /// Integer or forms like 1e9
    #[arg(long)]
    bound: Option<String>,
    /// even or any
    #[arg(long)]
    parity: Option<String>,
    #[arg(long)]
    epsilon0: Option<f64>,
    /// literal or relaxed
    #[arg(long, default_value = "relaxed")]
    mode: String,
    /// Constant override K=V, relaxed mode only; repeatable
    #[arg(long = "override", value_name = "K=V")]
    overrides: Vec<String>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Cache directory; CONTINUANT_CACHE takes precedence
    #[arg(long)]
    cache: Option<PathBuf>,
    /// Comma-separated fit points
    #[arg(long)]
    grid: Option<String>,
}

impl Common {
    fn config(&self) -> Result<RunConfig, Error> {
        let mut cfg = RunConfig::new(self.alphabet.parse::<Alphabet>()?, &self.out);
        cfg.bound = self.bound.clone();
        if let Some(b) = &self.bound {
            workbench::parse_bound(b)?;
        }
        cfg.parity = self.parity.as_deref().map(str::parse::<Parity>).transpose()?;
        cfg.epsilon0 = self.epsilon0;
        cfg.mode = self.mode.parse::<Mode>()?;
        for kv in &self.overrides {
            let (k, v) = kv
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("override {kv:?} is not K=V")))?;
            let v: f64 = v
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("override value {v:?} is not a number")))?;
            cfg.overrides.push((k.trim().to_string(), v));
        }
        cfg.seed = self.seed;
        cfg.cache = self.cache.clone();
        cfg.grid = self
            .grid
            .as_deref()
            .map(|g| {
                g.split(',')
                    .map(|t| workbench::parse_bound(t).and_then(|b| u64::try_from(b).map_err(|_| Error::TooLarge(t.into()))))
                    .collect::<Result<Vec<_>, _>>()
            })
            .transpose()?;
        // catches overrides in literal mode before any work starts
        cfg.constants()?;
        Ok(cfg)
    }
}

fn run(cli: Cli) -> Result<String, Error> {
    type Cmd = fn(&RunConfig) -> Result<String, Error>;
    let (common, cmd): (&Common, Cmd) = match &cli.command {
        Command::Continuant { word } => return workbench::cmd_continuant(word),
        Command::Enumerate(c) => (c, workbench::cmd_enumerate),
        Command::Density(c) => (c, workbench::cmd_density),
        Command::Dimension(c) => (c, workbench::cmd_dimension),
        Command::Ensemble(c) => (c, workbench::cmd_ensemble),
        Command::Expsum(c) => (c, workbench::cmd_expsum),
        Command::Dedekind(c) => (c, workbench::cmd_dedekind),
    };
    cmd(&common.config()?)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(line) => {
            println!("{line}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(workbench::exit_code(&e) as u8)
        }
    }
}
