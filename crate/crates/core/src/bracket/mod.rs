//! Core data model: placement classes, prize vectors, destination-coded
//! bracket graphs and round-robin schedules.

mod graph;
mod schedule;

pub use graph::{BracketGraph, CompiledBracket, Destination, MatchNode, Outcome, Route, Source};
pub use schedule::RoundSchedule;

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A contiguous span of final ranks sharing one prize, e.g. `3-4th`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct PlacementClass {
    pub rank_lo: u32,
    pub rank_hi: u32,
    pub label: String,
}

impl PlacementClass {
    /// Builds a class spanning `rank_lo..=rank_hi` with the conventional label.
    pub fn span(rank_lo: u32, rank_hi: u32) -> Self {
        assert!(
            rank_lo >= 1 && rank_hi >= rank_lo,
            "bad rank span {rank_lo}..{rank_hi}"
        );
        PlacementClass {
            rank_lo,
            rank_hi,
            label: span_label(rank_lo, rank_hi),
        }
    }

    pub fn single(rank: u32) -> Self {
        Self::span(rank, rank)
    }

    pub fn capacity(&self) -> u32 {
        self.rank_hi - self.rank_lo + 1
    }

    pub fn contains(&self, rank: u32) -> bool {
        (self.rank_lo..=self.rank_hi).contains(&rank)
    }

    /// Parses labels of the form `1st`, `2nd`, `3-4th`, `2-3rd`.
    pub fn parse_label(label: &str) -> Option<Self> {
        let digits = label.trim_end_matches(|c: char| c.is_ascii_alphabetic());
        let (lo, hi) = match digits.split_once('-') {
            Some((lo, hi)) => (lo.parse().ok()?, hi.parse().ok()?),
            None => {
                let r = digits.parse().ok()?;
                (r, r)
            }
        };
        if lo == 0 || hi < lo {
            return None;
        }
        let class = Self::span(lo, hi);
        (class.label == label).then_some(class)
    }
}

impl fmt::Display for PlacementClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label)
    }
}

pub fn ordinal(n: u32) -> String {
    let suffix = match (n % 10, n % 100) {
        (_, 11..=13) => "th",
        (1, _) => "st",
        (2, _) => "nd",
        (3, _) => "rd",
        _ => "th",
    };
    format!("{n}{suffix}")
}

pub fn span_label(lo: u32, hi: u32) -> String {
    if lo == hi {
        ordinal(lo)
    } else {
        format!("{lo}-{}", ordinal(hi))
    }
}

/// Prize values per placement class, best class first.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct PrizeVector(pub(crate) Vec<f64>);

impl PrizeVector {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::PrizeNotFinite);
        }
        if let Some(position) = (1..values.len()).find(|&i| values[i] > values[i - 1]) {
            return Err(Error::PrizeOrder { position });
        }
        Ok(PrizeVector(values))
    }

    /// Positional defaults: rank r of n is worth n - r + 1, averaged over each class span.
    pub fn positional(classes: &[PlacementClass], n: u32) -> Self {
        let values = classes
            .iter()
            .map(|c| {
                let sum: u32 = (c.rank_lo..=c.rank_hi).map(|r| n - r + 1).sum();
                f64::from(sum) / f64::from(c.capacity())
            })
            .collect();
        PrizeVector(values)
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn check_arity(&self, classes: usize) -> Result<()> {
        if self.0.len() != classes {
            return Err(Error::PrizeArity {
                expected: classes,
                got: self.0.len(),
            });
        }
        Ok(())
    }

    /// Applies `x -> scale * x + offset`; `scale` must be positive to keep the order.
    pub fn affine(&self, scale: f64, offset: f64) -> Result<Self> {
        assert!(scale > 0.0, "affine scale must be positive");
        Self::new(self.0.iter().map(|x| scale * x + offset).collect())
    }

    /// Mean of per-rank prizes over `class`, for vectors indexed by single rank.
    pub fn span_mean(&self, class: &PlacementClass) -> f64 {
        let lo = class.rank_lo as usize - 1;
        let hi = class.rank_hi as usize;
        self.0[lo..hi].iter().sum::<f64>() / f64::from(class.capacity())
    }
}

impl TryFrom<Vec<f64>> for PrizeVector {
    type Error = Error;

    fn try_from(values: Vec<f64>) -> Result<Self> {
        Self::new(values)
    }
}

impl From<PrizeVector> for Vec<f64> {
    fn from(p: PrizeVector) -> Self {
        p.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ViolationKind {
    DuplicateId,
    UnknownReference,
    SlotConsumedTwice,
    SlotUnused,
    FeedConsumedTwice,
    FeedUnrouted,
    DestinationMismatch,
    RoundOrder,
    ClassPartition,
    CapacityMismatch,
    ChampionCount,
    ParticipantOutOfRange,
    ParticipantTwiceInRound,
    PairRepeated,
    PairMissing,
}

impl ViolationKind {
    pub fn describe(self) -> &'static str {
        match self {
            ViolationKind::DuplicateId => "duplicate id",
            ViolationKind::UnknownReference => "unknown reference",
            ViolationKind::SlotConsumedTwice => "slot consumed twice",
            ViolationKind::SlotUnused => "slot unused",
            ViolationKind::FeedConsumedTwice => "feed consumed twice",
            ViolationKind::FeedUnrouted => "feed unrouted",
            ViolationKind::DestinationMismatch => "destination mismatch",
            ViolationKind::RoundOrder => "round order",
            ViolationKind::ClassPartition => "class partition",
            ViolationKind::CapacityMismatch => "capacity mismatch",
            ViolationKind::ChampionCount => "champion count",
            ViolationKind::ParticipantOutOfRange => "participant out of range",
            ViolationKind::ParticipantTwiceInRound => "participant twice in round",
            ViolationKind::PairRepeated => "pair repeated",
            ViolationKind::PairMissing => "pair missing",
        }
    }
}

/// One broken invariant, naming the offending match, slot or pair.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub kind: ViolationKind,
    pub subject: String,
    pub detail: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}: {}: {}",
            self.kind.describe(),
            self.subject,
            self.detail
        )
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn has(&self, kind: ViolationKind) -> bool {
        self.violations.iter().any(|v| v.kind == kind)
    }

    pub(crate) fn push(
        &mut self,
        kind: ViolationKind,
        subject: impl Into<String>,
        detail: impl Into<String>,
    ) {
        self.violations.push(Violation {
            kind,
            subject: subject.into(),
            detail: detail.into(),
        });
    }

    pub(crate) fn into_result(self) -> Result<()> {
        if self.is_ok() {
            Ok(())
        } else {
            Err(Error::Invalid(self))
        }
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_ok() {
            return f.write_str("ok");
        }
        for (i, v) in self.violations.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "  - {v}")?;
        }
        Ok(())
    }
}

/// Checks that `classes` partition ranks `1..=n` with no gaps or overlaps.
pub(crate) fn check_partition(classes: &[PlacementClass], n: u32, report: &mut ValidationReport) {
    let mut sorted: Vec<&PlacementClass> = classes.iter().collect();
    sorted.sort();
    let mut next = 1;
    for c in sorted {
        if c.rank_lo == 0 || c.rank_hi < c.rank_lo {
            report.push(ViolationKind::ClassPartition, &c.label, "empty rank span");
            continue;
        }
        if c.rank_lo != next {
            report.push(
                ViolationKind::ClassPartition,
                &c.label,
                format!("starts at rank {} but rank {next} is next", c.rank_lo),
            );
        }
        next = next.max(c.rank_hi + 1);
    }
    if next != n + 1 {
        report.push(
            ViolationKind::CapacityMismatch,
            "placements",
            format!(
                "classes cover ranks 1..{} but there are {n} entry slots",
                next - 1
            ),
        );
    }
}

/// A tournament structure under analysis.
#[derive(Debug, Clone, PartialEq)]
pub enum Format {
    Bracket(BracketGraph),
    RoundRobin(RoundSchedule),
}

impl Format {
    pub fn participants(&self) -> usize {
        match self {
            Format::Bracket(g) => g.entry_slots.len(),
            Format::RoundRobin(s) => s.n,
        }
    }

    pub fn validate(&self) -> ValidationReport {
        match self {
            Format::Bracket(g) => g.validate(),
            Format::RoundRobin(s) => s.validate(),
        }
    }

    /// Placement classes in rank order; a round robin ranks every position separately.
    pub fn placement_classes(&self) -> Vec<PlacementClass> {
        match self {
            Format::Bracket(g) => {
                let mut classes = g.placements.clone();
                classes.sort();
                classes
            }
            Format::RoundRobin(s) => (1..=s.n as u32).map(PlacementClass::single).collect(),
        }
    }

    pub fn rounds(&self) -> usize {
        match self {
            Format::Bracket(g) => g
                .matches
                .iter()
                .map(|m| m.round as usize)
                .max()
                .unwrap_or(0),
            Format::RoundRobin(s) => s.rounds.len(),
        }
    }
}

/// Number of matches the format requires; the format must validate.
pub fn conduction_cost(format: &Format) -> Result<usize> {
    format.validate().into_result()?;
    Ok(match format {
        Format::Bracket(g) => g.matches.len(),
        Format::RoundRobin(s) => s.rounds.iter().map(Vec::len).sum(),
    })
}
