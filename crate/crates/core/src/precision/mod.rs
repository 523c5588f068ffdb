//! Ranking precision: every admissible assignment of strengths `1..=n` to
//! entry slots is played out with the stronger side always winning, and the
//! resulting placements are tallied per strength and class.

mod export;
pub mod perm;

pub use export::{tally_from_csv, tally_from_json, tally_to_csv, tally_to_json, TallyDocument};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bracket::{BracketGraph, CompiledBracket, Format, PlacementClass, RoundSchedule};
use crate::error::{Error, Result};
use perm::{factorial, next_permutation, unrank};

/// Largest enumeration accepted, `10!` assignments.
pub const MAX_ASSIGNMENTS: u64 = 3_628_800;

/// Strength per entry slot; a bijection onto `1..=n`, larger is stronger.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StrengthAssignment(Vec<u32>);

impl StrengthAssignment {
    pub fn new(strengths: Vec<u32>) -> Result<Self> {
        let mut sorted = strengths.clone();
        sorted.sort_unstable();
        if sorted.iter().enumerate().any(|(i, &s)| s as usize != i + 1) {
            return Err(Error::Arity(format!(
                "{strengths:?} is not a permutation of 1..={}",
                strengths.len()
            )));
        }
        Ok(StrengthAssignment(strengths))
    }

    pub fn strengths(&self) -> &[u32] {
        &self.0
    }
}

/// A format lowered for repeated simulation.
#[derive(Debug, Clone)]
pub enum Simulator {
    Bracket(CompiledBracket),
    RoundRobin(RoundSchedule),
}

impl Simulator {
    pub fn new(format: &Format) -> Result<Self> {
        match format {
            Format::Bracket(g) => Ok(Simulator::Bracket(g.compile()?)),
            Format::RoundRobin(s) => {
                s.validate().into_result()?;
                Ok(Simulator::RoundRobin(s.clone()))
            }
        }
    }

    pub fn participants(&self) -> usize {
        match self {
            Simulator::Bracket(b) => b.participants(),
            Simulator::RoundRobin(s) => s.n,
        }
    }

    pub fn classes(&self) -> Vec<PlacementClass> {
        match self {
            Simulator::Bracket(b) => b.classes().to_vec(),
            Simulator::RoundRobin(s) => (1..=s.n as u32).map(PlacementClass::single).collect(),
        }
    }

    /// Fills `placed[slot]` with a class index; `scratch` needs `n` entries.
    fn run(&self, strengths: &[u32], placed: &mut [usize], scratch: &mut [u32]) {
        match self {
            Simulator::Bracket(b) => b.play(|_, x, y| strengths[x] > strengths[y], placed),
            Simulator::RoundRobin(s) => {
                scratch.fill(0);
                for &(a, b) in s.rounds.iter().flatten() {
                    if strengths[a] > strengths[b] {
                        scratch[a] += 1;
                    } else {
                        scratch[b] += 1;
                    }
                }
                for p in 0..s.n {
                    // distinct strengths give distinct win counts, so no shared ranks
                    placed[p] = scratch.iter().filter(|&&w| w > scratch[p]).count();
                }
            }
        }
    }
}

/// Plays one assignment; returns each strength's class, indexed by `strength - 1`.
pub fn simulate(format: &Format, assignment: &StrengthAssignment) -> Result<Vec<PlacementClass>> {
    let sim = Simulator::new(format)?;
    let n = sim.participants();
    if assignment.0.len() != n {
        return Err(Error::Arity(format!(
            "{} strengths for {n} entry slots",
            assignment.0.len()
        )));
    }
    let classes = sim.classes();
    let mut placed = vec![0; n];
    let mut scratch = vec![0; n];
    sim.run(&assignment.0, &mut placed, &mut scratch);
    let mut by_strength = vec![classes[0].clone(); n];
    for (slot, &c) in placed.iter().enumerate() {
        by_strength[assignment.0[slot] as usize - 1] = classes[c].clone();
    }
    Ok(by_strength)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeedGroup {
    pub slots: Vec<usize>,
    pub strengths: Vec<u32>,
}

/// Fixes which strengths may start in which entry slots.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Seeding {
    pub groups: Vec<SeedGroup>,
}

impl Seeding {
    /// Upper entry slots (`U*`) receive the stronger half, lower slots (`L*`) the weaker half.
    pub fn upper_lower(graph: &BracketGraph) -> Result<Self> {
        let n = graph.entry_slots.len() as u32;
        let pick = |prefix: char| -> Vec<usize> {
            graph
                .entry_slots
                .iter()
                .enumerate()
                .filter(|(_, s)| s.starts_with(prefix))
                .map(|(i, _)| i)
                .collect()
        };
        let (upper, lower) = (pick('U'), pick('L'));
        if upper.is_empty() || upper.len() + lower.len() != n as usize || upper.len() != lower.len()
        {
            return Err(Error::Seeding(
                "bracket has no even U*/L* entry slot split".into(),
            ));
        }
        let half = n / 2;
        Ok(Seeding {
            groups: vec![
                SeedGroup {
                    slots: upper,
                    strengths: (half + 1..=n).collect(),
                },
                SeedGroup {
                    slots: lower,
                    strengths: (1..=half).collect(),
                },
            ],
        })
    }

    fn check(&self, n: usize) -> Result<()> {
        let mut slots = vec![false; n];
        let mut strengths = vec![false; n];
        for g in &self.groups {
            if g.slots.len() != g.strengths.len() {
                return Err(Error::Seeding(format!(
                    "group has {} slots but {} strengths",
                    g.slots.len(),
                    g.strengths.len()
                )));
            }
            for &s in &g.slots {
                if s >= n || std::mem::replace(&mut slots[s], true) {
                    return Err(Error::Seeding(format!("slot {s} missing or repeated")));
                }
            }
            for &s in &g.strengths {
                if s == 0
                    || s as usize > n
                    || std::mem::replace(&mut strengths[s as usize - 1], true)
                {
                    return Err(Error::Seeding(format!(
                        "strength {s} out of range or repeated"
                    )));
                }
            }
        }
        if slots.contains(&false) || strengths.contains(&false) {
            return Err(Error::Seeding(
                "groups must cover every slot and strength".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub enum Constraint {
    #[default]
    None,
    Seeded(Seeding),
}

/// Placement counts per strength (rows, strength 1 first) and class (columns, best first).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RankTally {
    pub classes: Vec<PlacementClass>,
    pub counts: Vec<Vec<u64>>,
    pub total: u64,
}

impl RankTally {
    pub fn empty(n: usize, classes: Vec<PlacementClass>) -> Self {
        RankTally {
            counts: vec![vec![0; classes.len()]; n],
            classes,
            total: 0,
        }
    }

    pub fn participants(&self) -> usize {
        self.counts.len()
    }

    pub fn row(&self, strength: u32) -> &[u64] {
        &self.counts[strength as usize - 1]
    }

    pub fn count(&self, strength: u32, label: &str) -> Option<u64> {
        let c = self.classes.iter().position(|c| c.label == label)?;
        Some(self.counts.get(strength as usize - 1)?[c])
    }

    pub fn percent(&self, count: u64) -> u64 {
        percent(count, self.total)
    }

    pub fn merge(mut self, other: &RankTally) -> RankTally {
        for (a, b) in self.counts.iter_mut().zip(&other.counts) {
            for (x, y) in a.iter_mut().zip(b) {
                *x += y;
            }
        }
        self.total += other.total;
        self
    }

    /// Every row sums to the total; every class column to capacity times the total.
    pub fn check_sums(&self) -> Result<()> {
        for (i, row) in self.counts.iter().enumerate() {
            let sum: u64 = row.iter().sum();
            if sum != self.total {
                return Err(Error::Tally(format!(
                    "row {} sums to {sum}, expected {}",
                    i + 1,
                    self.total
                )));
            }
        }
        for (c, class) in self.classes.iter().enumerate() {
            let sum: u64 = self.counts.iter().map(|r| r[c]).sum();
            let want = u64::from(class.capacity()) * self.total;
            if sum != want {
                return Err(Error::Tally(format!(
                    "column {} sums to {sum}, expected {want}",
                    class.label
                )));
            }
        }
        Ok(())
    }

    /// Column indices holding each row's largest count.
    pub fn modal(&self, strength: u32) -> Vec<usize> {
        let row = self.row(strength);
        let max = row.iter().copied().max().unwrap_or(0);
        (0..row.len())
            .filter(|&c| max > 0 && row[c] == max)
            .collect()
    }
}

/// Whole percent, rounding halves up.
pub fn percent(count: u64, total: u64) -> u64 {
    if total == 0 {
        return 0;
    }
    (200 * count + total) / (2 * total)
}

fn groups_for(n: usize, constraint: &Constraint) -> Result<Vec<SeedGroup>> {
    match constraint {
        Constraint::None => Ok(vec![SeedGroup {
            slots: (0..n).collect(),
            strengths: (1..=n as u32).collect(),
        }]),
        Constraint::Seeded(seeding) => {
            seeding.check(n)?;
            Ok(seeding
                .groups
                .iter()
                .map(|g| {
                    let mut strengths = g.strengths.clone();
                    strengths.sort_unstable();
                    SeedGroup {
                        slots: g.slots.clone(),
                        strengths,
                    }
                })
                .collect())
        }
    }
}

/// Number of assignments `enumerate_all` would visit.
pub fn assignment_count(n: usize, constraint: &Constraint) -> Result<u64> {
    let groups = groups_for(n, constraint)?;
    groups.iter().try_fold(1u64, |acc, g| {
        if g.slots.len() > 20 {
            return Err(Error::EnumerationBound(format!(
                "{}! assignments",
                g.slots.len()
            )));
        }
        acc.checked_mul(factorial(g.slots.len()))
            .ok_or_else(|| Error::EnumerationBound("assignment count overflows".into()))
    })
}

/// Plays every admissible assignment, in lexicographic order of slot
/// strengths, and tallies the placements. Work is split into contiguous
/// chunks on the current rayon pool and merged by addition.
pub fn enumerate_all(format: &Format, constraint: &Constraint) -> Result<RankTally> {
    let sim = Simulator::new(format)?;
    let n = sim.participants();
    let total = assignment_count(n, constraint)?;
    if total > MAX_ASSIGNMENTS {
        return Err(Error::EnumerationBound(format!(
            "{total} assignments exceed the limit of {MAX_ASSIGNMENTS}; use at most 10 participants unconstrained"
        )));
    }
    let groups = groups_for(n, constraint)?;
    let classes = sim.classes();
    let chunks = (rayon::current_num_threads() as u64 * 8).clamp(1, total);
    let step = total.div_ceil(chunks);
    let tally = (0..chunks)
        .into_par_iter()
        .map(|k| {
            let start = k * step;
            let end = ((k + 1) * step).min(total);
            sweep(&sim, &groups, &classes, start, end)
        })
        .reduce_with(|a, b| a.merge(&b))
        .unwrap_or_else(|| RankTally::empty(n, classes.clone()));
    Ok(tally)
}

fn sweep(
    sim: &Simulator,
    groups: &[SeedGroup],
    classes: &[PlacementClass],
    start: u64,
    end: u64,
) -> RankTally {
    let n = sim.participants();
    let mut tally = RankTally::empty(n, classes.to_vec());
    if start >= end {
        return tally;
    }
    // mixed-radix digits, first group most significant
    let radices: Vec<u64> = groups.iter().map(|g| factorial(g.slots.len())).collect();
    let mut digits = vec![0u64; groups.len()];
    let mut rest = start;
    for g in (0..groups.len()).rev() {
        digits[g] = rest % radices[g];
        rest /= radices[g];
    }
    let mut perms: Vec<Vec<u32>> = groups
        .iter()
        .zip(&digits)
        .map(|(g, &d)| unrank(&g.strengths, d))
        .collect();

    let mut strengths = vec![0u32; n];
    let mut placed = vec![0usize; n];
    let mut scratch = vec![0u32; n];
    for _ in start..end {
        for (g, p) in groups.iter().zip(&perms) {
            for (&slot, &s) in g.slots.iter().zip(p) {
                strengths[slot] = s;
            }
        }
        sim.run(&strengths, &mut placed, &mut scratch);
        for slot in 0..n {
            tally.counts[strengths[slot] as usize - 1][placed[slot]] += 1;
        }
        tally.total += 1;
        for p in perms.iter_mut().rev() {
            if next_permutation(p) {
                break;
            }
        }
    }
    tally
}

/// The class each strength lands in when the ranking is exactly right:
/// strength `s` of `n` belongs at rank `n - s + 1`.
pub fn expected_ranking(classes: &[PlacementClass], n: usize) -> Result<Vec<usize>> {
    (1..=n as u32)
        .map(|s| {
            let rank = n as u32 - s + 1;
            classes
                .iter()
                .position(|c| c.contains(rank))
                .ok_or_else(|| Error::Arity(format!("no class holds rank {rank}")))
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassPrecision {
    pub class: String,
    pub expected_strengths: Vec<u32>,
    /// Every expected strength lands here in every assignment.
    pub precise: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrecisionReport {
    pub classes: Vec<ClassPrecision>,
    pub precise: Vec<String>,
    /// Ranks covered by the unbroken run of precise classes from the top.
    pub precise_top: u32,
    pub summary: String,
}

/// Compares a tally with the expected class per strength (`expected[s - 1]`).
pub fn precision_report(tally: &RankTally, expected: &[usize]) -> Result<PrecisionReport> {
    if expected.len() != tally.participants() {
        return Err(Error::Arity(format!(
            "{} expectations for {} strengths",
            expected.len(),
            tally.participants()
        )));
    }
    if let Some(&bad) = expected.iter().find(|&&c| c >= tally.classes.len()) {
        return Err(Error::Arity(format!("class index {bad} out of range")));
    }
    let classes: Vec<ClassPrecision> = tally
        .classes
        .iter()
        .enumerate()
        .map(|(c, class)| {
            let expected_strengths: Vec<u32> = (1..=expected.len() as u32)
                .filter(|&s| expected[s as usize - 1] == c)
                .collect();
            let precise = tally.total > 0
                && !expected_strengths.is_empty()
                && expected_strengths
                    .iter()
                    .all(|&s| tally.row(s)[c] == tally.total);
            ClassPrecision {
                class: class.label.clone(),
                expected_strengths,
                precise,
            }
        })
        .collect();
    let precise: Vec<String> = classes
        .iter()
        .filter(|c| c.precise)
        .map(|c| c.class.clone())
        .collect();
    let precise_top = tally
        .classes
        .iter()
        .zip(&classes)
        .take_while(|(_, p)| p.precise)
        .map(|(c, _)| c.rank_hi)
        .last()
        .unwrap_or(0);
    let summary = if precise.len() == classes.len() {
        "All".to_string()
    } else {
        match precise_top {
            0 => "None".to_string(),
            1 => "Top 1 winner only".to_string(),
            k => format!("Top {k} winners"),
        }
    };
    Ok(PrecisionReport {
        classes,
        precise,
        precise_top,
        summary,
    })
}
