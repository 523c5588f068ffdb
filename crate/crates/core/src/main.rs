use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use tourney_analysis::report::{
    cmd_analyze, cmd_compare, cmd_cost, cmd_precision, default_compare_set, export_bracket,
    render_analyze, render_compare, render_cost, render_precision, AnalysisConfig, FormatSelector,
    OutputMode,
};
use tourney_analysis::Result;

#[derive(Parser)]
#[command(
    name = "tourney",
    version,
    about = "Cost, competitiveness and ranking precision of tournament formats"
)]
struct Cli {
    /// Worker threads for enumeration (defaults to all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Number of matches needed to finish the format.
    Cost(Common),
    /// Progress trees and competitiveness findings.
    Analyze(Common),
    /// Exhaustive ranking tally over all strength assignments.
    Precision(Common),
    /// Cost / competitiveness / precision side by side.
    Compare {
        #[command(flatten)]
        common: Common,
        /// Compare only this format (repeatable); defaults to all four.
        #[arg(long = "only")]
        only: Vec<FormatSelector>,
    },
    /// Progress analysis of a partially played round robin.
    RrState {
        #[command(flatten)]
        common: Common,
    },
    /// Print the generated format as JSON.
    Export(Common),
}

#[derive(Args, Clone)]
struct Common {
    /// se | de | de-seeded | rr
    #[arg(long)]
    format: Option<FormatSelector>,
    #[arg(long, short = 'n', default_value_t = 8)]
    participants: usize,
    /// Comma-separated, best class first.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    prizes: Option<Vec<f64>>,
    /// table | csv | json
    #[arg(long, default_value = "table")]
    output: OutputMode,
    /// Bracket file (JSON) instead of a generated format.
    #[arg(long)]
    bracket: Option<PathBuf>,
    /// Round-robin standings file (JSON).
    #[arg(long)]
    standings: Option<PathBuf>,
}

impl From<Common> for AnalysisConfig {
    fn from(c: Common) -> Self {
        AnalysisConfig {
            format: c.format,
            participants: c.participants,
            prizes: c.prizes,
            output: c.output,
            bracket: c.bracket,
            standings: c.standings,
        }
    }
}

fn run(command: Command) -> Result<String> {
    match command {
        Command::Cost(c) => {
            let cfg = AnalysisConfig::from(c);
            render_cost(&cmd_cost(&cfg)?, cfg.output)
        }
        Command::Analyze(c) => {
            let cfg = AnalysisConfig::from(c);
            render_analyze(&cmd_analyze(&cfg)?, cfg.output)
        }
        Command::Precision(c) => {
            let cfg = AnalysisConfig::from(c);
            render_precision(&cmd_precision(&cfg)?, cfg.output)
        }
        Command::Compare { common, only } => {
            let cfg = AnalysisConfig::from(common);
            let configs = if cfg.bracket.is_some() {
                vec![cfg.clone()]
            } else if !only.is_empty() || cfg.format.is_some() {
                let formats = if only.is_empty() {
                    vec![cfg.format.unwrap()]
                } else {
                    only
                };
                formats
                    .into_iter()
                    .map(|f| AnalysisConfig {
                        format: Some(f),
                        ..cfg.clone()
                    })
                    .collect()
            } else {
                default_compare_set(cfg.participants)
                    .into_iter()
                    .map(|c| AnalysisConfig {
                        prizes: cfg.prizes.clone(),
                        ..c
                    })
                    .collect()
            };
            render_compare(&cmd_compare(&configs)?, cfg.output)
        }
        Command::RrState { common } => {
            let cfg = AnalysisConfig::from(common);
            if cfg.standings.is_none() {
                return Err(tourney_analysis::Error::Config(
                    "rr-state needs --standings".into(),
                ));
            }
            render_analyze(&cmd_analyze(&cfg)?, cfg.output)
        }
        Command::Export(c) => {
            let mut json = export_bracket(&AnalysisConfig::from(c))?;
            json.push('\n');
            Ok(json)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(jobs) = cli.jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs.max(1))
            .build_global()
        {
            eprintln!("error: {e}");
            return ExitCode::FAILURE;
        }
    }
    match run(cli.command) {
        Ok(text) => {
            print!("{text}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
