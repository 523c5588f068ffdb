//! Command layer: resolves an [`AnalysisConfig`] into a format, runs the
//! analyses and produces serializable reports for the CLI renderers.

mod render;

pub use render::{render_analyze, render_compare, render_cost, render_precision};

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::bracket::{conduction_cost, BracketGraph, Format, PrizeVector};
use crate::error::{Error, Result};
use crate::generators::{gen_double_elim, gen_round_robin, gen_single_elim};
use crate::precision::{
    enumerate_all, expected_ranking, precision_report, Constraint, PrecisionReport, RankTally,
    Seeding,
};
use crate::progress::{
    analyze_bracket, opening_state, rr_progress, BracketAnalysis, RrReport, Standings,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FormatSelector {
    Se,
    De,
    DeSeeded,
    Rr,
}

impl FormatSelector {
    pub const ALL: [FormatSelector; 4] = [Self::Se, Self::De, Self::DeSeeded, Self::Rr];

    pub fn system_name(self) -> &'static str {
        match self {
            FormatSelector::Se => "SE",
            FormatSelector::De => "DE",
            FormatSelector::DeSeeded => "DE (Seeded)",
            FormatSelector::Rr => "RR",
        }
    }
}

impl fmt::Display for FormatSelector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FormatSelector::Se => "se",
            FormatSelector::De => "de",
            FormatSelector::DeSeeded => "de-seeded",
            FormatSelector::Rr => "rr",
        })
    }
}

impl FromStr for FormatSelector {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "se" => Ok(Self::Se),
            "de" => Ok(Self::De),
            "de-seeded" => Ok(Self::DeSeeded),
            "rr" => Ok(Self::Rr),
            other => Err(Error::Config(format!(
                "unknown format `{other}` (se|de|de-seeded|rr)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputMode {
    #[default]
    Table,
    Csv,
    Json,
}

impl FromStr for OutputMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "table" => Ok(Self::Table),
            "csv" => Ok(Self::Csv),
            "json" => Ok(Self::Json),
            other => Err(Error::Config(format!(
                "unknown output mode `{other}` (table|csv|json)"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AnalysisConfig {
    pub format: Option<FormatSelector>,
    pub participants: usize,
    pub prizes: Option<Vec<f64>>,
    pub output: OutputMode,
    pub bracket: Option<PathBuf>,
    pub standings: Option<PathBuf>,
}

impl Default for AnalysisConfig {
    fn default() -> Self {
        AnalysisConfig {
            format: None,
            participants: 8,
            prizes: None,
            output: OutputMode::Table,
            bracket: None,
            standings: None,
        }
    }
}

impl AnalysisConfig {
    pub fn builtin(format: FormatSelector, participants: usize) -> Self {
        AnalysisConfig {
            format: Some(format),
            participants,
            ..Default::default()
        }
    }
}

/// A resolved format ready for analysis.
#[derive(Debug, Clone)]
pub struct Target {
    pub name: String,
    pub format: Format,
    pub constraint: Constraint,
}

fn power_of_two_rounds(n: usize, min: u32, what: &str) -> Result<u32> {
    if n.is_power_of_two() && n.trailing_zeros() >= min {
        Ok(n.trailing_zeros())
    } else {
        Err(Error::Config(format!(
            "{what} needs a power-of-two field of at least {} participants, got {n}",
            1 << min
        )))
    }
}

pub fn resolve(config: &AnalysisConfig) -> Result<Target> {
    if let Some(path) = &config.bracket {
        let graph = BracketGraph::from_json(&std::fs::read_to_string(path)?)?;
        let constraint = match config.format {
            Some(FormatSelector::DeSeeded) => Constraint::Seeded(Seeding::upper_lower(&graph)?),
            Some(FormatSelector::Rr) => {
                return Err(Error::Config(
                    "a bracket file cannot be analysed as a round robin".into(),
                ))
            }
            _ => Constraint::None,
        };
        let name = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_default();
        return Ok(Target {
            name,
            format: Format::Bracket(graph),
            constraint,
        });
    }
    let selector = config
        .format
        .ok_or_else(|| Error::Config("choose --format or --bracket".into()))?;
    let n = config.participants;
    let (format, constraint) = match selector {
        FormatSelector::Se => (
            Format::Bracket(gen_single_elim(power_of_two_rounds(
                n,
                1,
                "single elimination",
            )?)?),
            Constraint::None,
        ),
        FormatSelector::De => (
            Format::Bracket(gen_double_elim(power_of_two_rounds(
                n,
                2,
                "double elimination",
            )?)?),
            Constraint::None,
        ),
        FormatSelector::DeSeeded => {
            let g = gen_double_elim(power_of_two_rounds(n, 2, "double elimination")?)?;
            let seeding = Seeding::upper_lower(&g)?;
            (Format::Bracket(g), Constraint::Seeded(seeding))
        }
        FormatSelector::Rr => (Format::RoundRobin(gen_round_robin(n)?), Constraint::None),
    };
    Ok(Target {
        name: selector.system_name().to_string(),
        format,
        constraint,
    })
}

fn prize_vector(config: &AnalysisConfig, format: &Format) -> Result<PrizeVector> {
    let classes = format.placement_classes();
    match &config.prizes {
        Some(values) => {
            let p = PrizeVector::new(values.clone())?;
            p.check_arity(classes.len())?;
            Ok(p)
        }
        None => Ok(PrizeVector::positional(
            &classes,
            format.participants() as u32,
        )),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CostReport {
    pub format: String,
    pub participants: usize,
    pub matches: usize,
    pub rounds: usize,
}

pub fn cmd_cost(config: &AnalysisConfig) -> Result<CostReport> {
    let target = resolve(config)?;
    Ok(CostReport {
        format: target.name,
        participants: target.format.participants(),
        matches: conduction_cost(&target.format)?,
        rounds: target.format.rounds(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum AnalyzeReport {
    Bracket {
        format: String,
        prizes: Vec<f64>,
        analysis: BracketAnalysis,
        cd_pass: bool,
    },
    RoundRobin {
        format: String,
        /// Describes which state was analysed.
        state: String,
        prizes: Vec<f64>,
        report: RrReport,
        cd_pass: bool,
    },
}

impl AnalyzeReport {
    pub fn cd_pass(&self) -> bool {
        match self {
            AnalyzeReport::Bracket { cd_pass, .. } | AnalyzeReport::RoundRobin { cd_pass, .. } => {
                *cd_pass
            }
        }
    }
}

/// Competitiveness analysis. Round robins use the standings file when given;
/// otherwise the earliest state within the enumeration bound, with earlier
/// rounds won by the higher-numbered participant.
pub fn cmd_analyze(config: &AnalysisConfig) -> Result<AnalyzeReport> {
    if let Some(path) = &config.standings {
        let standings = Standings::from_json(&std::fs::read_to_string(path)?)?;
        return analyze_standings(
            config,
            standings,
            format!("standings from {}", path.display()),
        );
    }
    let target = resolve(config)?;
    match &target.format {
        Format::Bracket(g) => {
            let prizes = prize_vector(config, &target.format)?;
            let analysis = analyze_bracket(g, &prizes)?;
            Ok(AnalyzeReport::Bracket {
                format: target.name,
                prizes: prizes.values().to_vec(),
                cd_pass: analysis.passes(),
                analysis,
            })
        }
        Format::RoundRobin(schedule) => {
            let standings = opening_state(schedule)?;
            let played = schedule.rounds.len() - standings.remaining.len();
            let state = if played == 0 {
                "opening state (no rounds played)".to_string()
            } else {
                format!("after {played} rounds won by the higher-numbered participant (earliest state within the enumeration bound)")
            };
            analyze_standings(config, standings, state)
        }
    }
}

fn analyze_standings(
    config: &AnalysisConfig,
    standings: Standings,
    state: String,
) -> Result<AnalyzeReport> {
    let n = standings.participants.len();
    let prizes = match &config.prizes {
        Some(v) => {
            let p = PrizeVector::new(v.clone())?;
            p.check_arity(n)?;
            p
        }
        None => PrizeVector::new((1..=n).rev().map(|v| v as f64).collect())?,
    };
    let report = rr_progress(&standings, &prizes)?;
    Ok(AnalyzeReport::RoundRobin {
        format: "RR".into(),
        state,
        prizes: prizes.values().to_vec(),
        cd_pass: report.passes(),
        report,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PrecisionOutput {
    pub format: String,
    pub tally: RankTally,
    pub expected: Vec<usize>,
    pub report: PrecisionReport,
}

pub fn cmd_precision(config: &AnalysisConfig) -> Result<PrecisionOutput> {
    let target = resolve(config)?;
    let tally = enumerate_all(&target.format, &target.constraint).map_err(|e| match e {
        Error::EnumerationBound(msg) => Error::EnumerationBound(format!(
            "{msg}; precision runs are exhaustive, so pick a smaller field (de-seeded is documented for 8)"
        )),
        other => other,
    })?;
    let expected = expected_ranking(&tally.classes, tally.participants())?;
    let report = precision_report(&tally, &expected)?;
    Ok(PrecisionOutput {
        format: target.name,
        tally,
        expected,
        report,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CompareRow {
    pub system: String,
    pub participants: usize,
    pub cc: usize,
    pub cd: bool,
    pub rp: String,
}

/// One row per configuration: match count, competitiveness verdict and
/// precise-ranking summary, each computed by the underlying analyses.
pub fn cmd_compare(configs: &[AnalysisConfig]) -> Result<Vec<CompareRow>> {
    configs
        .iter()
        .map(|config| {
            let cost = cmd_cost(config)?;
            let cd = cmd_analyze(config)?.cd_pass();
            let precision = cmd_precision(config)?;
            Ok(CompareRow {
                system: cost.format,
                participants: cost.participants,
                cc: cost.matches,
                cd,
                rp: precision.report.summary,
            })
        })
        .collect()
}

/// The four built-in systems at `participants` each.
pub fn default_compare_set(participants: usize) -> Vec<AnalysisConfig> {
    FormatSelector::ALL
        .iter()
        .map(|&f| AnalysisConfig::builtin(f, participants))
        .collect()
}

/// JSON for a generated bracket, in the bracket file format.
pub fn export_bracket(config: &AnalysisConfig) -> Result<String> {
    match resolve(config)?.format {
        Format::Bracket(g) => g.to_json(),
        Format::RoundRobin(s) => Ok(serde_json::to_string_pretty(&s)?),
    }
}
