use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::{check_partition, PlacementClass, ValidationReport, ViolationKind};
use crate::error::Result;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    Win,
    Loss,
}

impl Outcome {
    pub fn flip(self) -> Self {
        match self {
            Outcome::Win => Outcome::Loss,
            Outcome::Loss => Outcome::Win,
        }
    }

    pub fn letter(self) -> char {
        match self {
            Outcome::Win => 'W',
            Outcome::Loss => 'L',
        }
    }
}

/// Where a match participant comes from.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Source {
    Slot {
        slot: String,
    },
    Feed {
        #[serde(rename = "match")]
        match_id: String,
        feed: Outcome,
    },
}

impl Source {
    pub fn slot(name: impl Into<String>) -> Self {
        Source::Slot { slot: name.into() }
    }

    pub fn winner_of(id: impl Into<String>) -> Self {
        Source::Feed {
            match_id: id.into(),
            feed: Outcome::Win,
        }
    }

    pub fn loser_of(id: impl Into<String>) -> Self {
        Source::Feed {
            match_id: id.into(),
            feed: Outcome::Loss,
        }
    }
}

/// Where the winner or loser of a match goes. `feed` repeats which outcome
/// is being routed so a destination can be matched against its consumer's source.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Destination {
    Match {
        #[serde(rename = "match")]
        match_id: String,
        feed: Outcome,
    },
    Placement {
        placement: String,
    },
}

impl Destination {
    pub fn to_match(id: impl Into<String>, feed: Outcome) -> Self {
        Destination::Match {
            match_id: id.into(),
            feed,
        }
    }

    pub fn placement(label: impl Into<String>) -> Self {
        Destination::Placement {
            placement: label.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatchNode {
    pub id: String,
    pub sources: [Source; 2],
    pub win_dest: Destination,
    pub loss_dest: Destination,
    pub round: u32,
}

impl MatchNode {
    pub fn dest(&self, outcome: Outcome) -> &Destination {
        match outcome {
            Outcome::Win => &self.win_dest,
            Outcome::Loss => &self.loss_dest,
        }
    }
}

/// Destination-coded match graph: every match names where its winner and
/// loser go, either into a later match or onto a placement class.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BracketGraph {
    pub entry_slots: Vec<String>,
    pub matches: Vec<MatchNode>,
    pub placements: Vec<PlacementClass>,
}

impl BracketGraph {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn validate(&self) -> ValidationReport {
        let mut report = ValidationReport::default();
        let n = self.entry_slots.len();

        let mut slots: HashMap<&str, usize> = HashMap::new();
        for s in &self.entry_slots {
            if slots.insert(s, 0).is_some() {
                report.push(ViolationKind::DuplicateId, s, "entry slot listed twice");
            }
        }
        let mut matches: HashMap<&str, &MatchNode> = HashMap::new();
        for m in &self.matches {
            if matches.insert(&m.id, m).is_some() {
                report.push(ViolationKind::DuplicateId, &m.id, "match id used twice");
            }
        }
        let mut classes: HashMap<&str, (&PlacementClass, u32)> = HashMap::new();
        for c in &self.placements {
            if classes.insert(&c.label, (c, 0)).is_some() {
                report.push(
                    ViolationKind::DuplicateId,
                    &c.label,
                    "placement label used twice",
                );
            }
        }

        // (match id, outcome) -> consumers of that feed
        let mut feeds: HashMap<(&str, Outcome), Vec<&str>> = HashMap::new();
        let mut slot_users: HashMap<&str, Vec<&str>> = HashMap::new();
        for m in &self.matches {
            if m.round == 0 {
                report.push(ViolationKind::RoundOrder, &m.id, "rounds start at 1");
            }
            if m.sources[0] == m.sources[1] {
                report.push(
                    ViolationKind::SlotConsumedTwice,
                    &m.id,
                    "both sources are identical",
                );
            }
            for src in &m.sources {
                match src {
                    Source::Slot { slot } => {
                        if let Some(count) = slots.get_mut(slot.as_str()) {
                            *count += 1;
                            slot_users.entry(slot).or_default().push(&m.id);
                        } else {
                            report.push(
                                ViolationKind::UnknownReference,
                                &m.id,
                                format!("source slot `{slot}` is not an entry slot"),
                            );
                        }
                    }
                    Source::Feed { match_id, feed } => match matches.get(match_id.as_str()) {
                        None => report.push(
                            ViolationKind::UnknownReference,
                            &m.id,
                            format!("source match `{match_id}` does not exist"),
                        ),
                        Some(prior) => {
                            if prior.round >= m.round {
                                report.push(
                                    ViolationKind::RoundOrder,
                                    &m.id,
                                    format!(
                                        "round {} is not after round {} of feeding match `{}`",
                                        m.round, prior.round, prior.id
                                    ),
                                );
                            }
                            feeds.entry((match_id, *feed)).or_default().push(&m.id);
                        }
                    },
                }
            }
        }

        for s in &self.entry_slots {
            match slots.get(s.as_str()).copied().unwrap_or(0) {
                0 => report.push(ViolationKind::SlotUnused, s, "no match consumes this slot"),
                1 => {}
                _ => report.push(
                    ViolationKind::SlotConsumedTwice,
                    s,
                    format!("fed into matches {}", slot_users[s.as_str()].join(", ")),
                ),
            }
        }

        let mut champions = 0;
        for m in &self.matches {
            for outcome in [Outcome::Win, Outcome::Loss] {
                let consumers = feeds
                    .get(&(m.id.as_str(), outcome))
                    .map(Vec::as_slice)
                    .unwrap_or(&[]);
                if consumers.len() > 1 {
                    report.push(
                        ViolationKind::FeedConsumedTwice,
                        &m.id,
                        format!("{outcome:?} feed consumed by {}", consumers.join(", ")),
                    );
                }
                match m.dest(outcome) {
                    Destination::Match { match_id, feed } => {
                        if *feed != outcome {
                            report.push(
                                ViolationKind::DestinationMismatch,
                                &m.id,
                                format!("{outcome:?} destination is tagged as the {feed:?} feed"),
                            );
                        }
                        if !matches.contains_key(match_id.as_str()) {
                            report.push(
                                ViolationKind::UnknownReference,
                                &m.id,
                                format!("destination match `{match_id}` does not exist"),
                            );
                        } else if !consumers.contains(&match_id.as_str()) {
                            report.push(
                                ViolationKind::DestinationMismatch,
                                &m.id,
                                format!("{outcome:?} goes to `{match_id}` but that match does not list it as a source"),
                            );
                        }
                    }
                    Destination::Placement { placement } => {
                        match classes.get_mut(placement.as_str()) {
                            Some((class, count)) => {
                                *count += 1;
                                if outcome == Outcome::Win && class.rank_lo == 1 {
                                    champions += 1;
                                }
                            }
                            None => report.push(
                                ViolationKind::UnknownReference,
                                &m.id,
                                format!("placement `{placement}` is not a placement class"),
                            ),
                        }
                        if !consumers.is_empty() {
                            report.push(
                                ViolationKind::DestinationMismatch,
                                &m.id,
                                format!(
                                    "{outcome:?} is placed but also consumed by {}",
                                    consumers.join(", ")
                                ),
                            );
                        }
                    }
                }
            }
        }
        if n > 0 && champions != 1 {
            report.push(
                ViolationKind::ChampionCount,
                "placements",
                format!("{champions} winning outcomes resolve to the rank-1 class"),
            );
        }

        check_partition(&self.placements, n as u32, &mut report);
        for c in &self.placements {
            let routed = classes[c.label.as_str()].1;
            if routed != c.capacity() {
                report.push(
                    ViolationKind::CapacityMismatch,
                    &c.label,
                    format!(
                        "capacity {} but {routed} outcomes are placed here",
                        c.capacity()
                    ),
                );
            }
        }
        report
    }

    /// Validates and lowers the graph to index form for simulation and tree building.
    pub fn compile(&self) -> Result<CompiledBracket> {
        self.validate().into_result()?;
        let mut classes = self.placements.clone();
        classes.sort();
        let class_index: HashMap<&str, usize> = classes
            .iter()
            .enumerate()
            .map(|(i, c)| (c.label.as_str(), i))
            .collect();
        let match_index: HashMap<&str, usize> = self
            .matches
            .iter()
            .enumerate()
            .map(|(i, m)| (m.id.as_str(), i))
            .collect();
        let slot_index: HashMap<&str, usize> = self
            .entry_slots
            .iter()
            .enumerate()
            .map(|(i, s)| (s.as_str(), i))
            .collect();

        let mut entry_match = vec![0; self.entry_slots.len()];
        let mut inputs = Vec::with_capacity(self.matches.len());
        for (mi, m) in self.matches.iter().enumerate() {
            let mut lower = |s: &Source| match s {
                Source::Slot { slot } => {
                    let si = slot_index[slot.as_str()];
                    entry_match[si] = mi;
                    Input::Slot(si)
                }
                Source::Feed { match_id, feed } => {
                    Input::Feed(match_index[match_id.as_str()], *feed)
                }
            };
            let a = lower(&m.sources[0]);
            let b = lower(&m.sources[1]);
            inputs.push([a, b]);
        }
        let route = |d: &Destination| match d {
            Destination::Match { match_id, .. } => Route::Match(match_index[match_id.as_str()]),
            Destination::Placement { placement } => Route::Class(class_index[placement.as_str()]),
        };
        let routes = self
            .matches
            .iter()
            .map(|m| [route(&m.win_dest), route(&m.loss_dest)])
            .collect();
        let mut order: Vec<usize> = (0..self.matches.len()).collect();
        order.sort_by_key(|&i| self.matches[i].round);

        Ok(CompiledBracket {
            slot_names: self.entry_slots.clone(),
            match_ids: self.matches.iter().map(|m| m.id.clone()).collect(),
            rounds: self.matches.iter().map(|m| m.round).collect(),
            inputs,
            routes,
            order,
            entry_match,
            classes,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Input {
    Slot(usize),
    Feed(usize, Outcome),
}

/// Index-form destination of a match outcome.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Route {
    Match(usize),
    Class(usize),
}

/// A validated bracket in index form. Class indices refer to
/// [`CompiledBracket::classes`], which is sorted best rank first.
#[derive(Debug, Clone)]
pub struct CompiledBracket {
    slot_names: Vec<String>,
    match_ids: Vec<String>,
    rounds: Vec<u32>,
    inputs: Vec<[Input; 2]>,
    routes: Vec<[Route; 2]>,
    order: Vec<usize>,
    entry_match: Vec<usize>,
    classes: Vec<PlacementClass>,
}

impl CompiledBracket {
    pub fn participants(&self) -> usize {
        self.slot_names.len()
    }

    pub fn match_count(&self) -> usize {
        self.match_ids.len()
    }

    pub fn classes(&self) -> &[PlacementClass] {
        &self.classes
    }

    pub fn slot_names(&self) -> &[String] {
        &self.slot_names
    }

    pub fn slot_index(&self, name: &str) -> Option<usize> {
        self.slot_names.iter().position(|s| s == name)
    }

    pub fn match_id(&self, m: usize) -> &str {
        &self.match_ids[m]
    }

    pub fn round(&self, m: usize) -> u32 {
        self.rounds[m]
    }

    /// The first match played by the participant starting at `slot`.
    pub fn entry_match(&self, slot: usize) -> usize {
        self.entry_match[slot]
    }

    pub fn route(&self, m: usize, outcome: Outcome) -> Route {
        match outcome {
            Outcome::Win => self.routes[m][0],
            Outcome::Loss => self.routes[m][1],
        }
    }

    /// Plays every match in round order. `first_wins(match, a, b)` decides
    /// between the slot indices `a` and `b`; `placed[slot]` receives the class index.
    pub fn play<F>(&self, mut first_wins: F, placed: &mut [usize])
    where
        F: FnMut(usize, usize, usize) -> bool,
    {
        let mut result = vec![[usize::MAX; 2]; self.match_ids.len()];
        for &m in &self.order {
            let resolve = |input: Input| match input {
                Input::Slot(s) => s,
                Input::Feed(prior, Outcome::Win) => result[prior][0],
                Input::Feed(prior, Outcome::Loss) => result[prior][1],
            };
            let a = resolve(self.inputs[m][0]);
            let b = resolve(self.inputs[m][1]);
            let (w, l) = if first_wins(m, a, b) { (a, b) } else { (b, a) };
            result[m] = [w, l];
            if let Route::Class(c) = self.routes[m][0] {
                placed[w] = c;
            }
            if let Route::Class(c) = self.routes[m][1] {
                placed[l] = c;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_player() -> BracketGraph {
        BracketGraph {
            entry_slots: vec!["S1".into(), "S2".into()],
            matches: vec![MatchNode {
                id: "F".into(),
                sources: [Source::slot("S1"), Source::slot("S2")],
                win_dest: Destination::placement("1st"),
                loss_dest: Destination::placement("2nd"),
                round: 1,
            }],
            placements: vec![PlacementClass::single(1), PlacementClass::single(2)],
        }
    }

    #[test]
    fn minimal_bracket_validates() {
        let g = two_player();
        assert!(g.validate().is_ok(), "{}", g.validate());
        let c = g.compile().unwrap();
        let mut placed = vec![0; 2];
        c.play(|_, a, b| a > b, &mut placed);
        assert_eq!(placed, vec![1, 0]);
    }

    #[test]
    fn slot_feeding_two_matches_is_reported() {
        let mut g = two_player();
        g.entry_slots.push("S3".into());
        g.entry_slots.push("S4".into());
        g.matches[0].sources[1] = Source::slot("S1");
        let report = g.validate();
        assert!(report.has(ViolationKind::SlotConsumedTwice), "{report}");
        assert!(report.has(ViolationKind::SlotUnused));
    }

    #[test]
    fn capacity_short_of_participants_is_reported() {
        let mut g = two_player();
        g.placements[1] = PlacementClass::span(2, 3);
        g.entry_slots.push("S3".into());
        let report = g.validate();
        assert!(report.has(ViolationKind::CapacityMismatch), "{report}");
        assert!(report.to_string().contains("capacity mismatch"));
    }

    #[test]
    fn feed_must_come_from_an_earlier_round() {
        let g = BracketGraph {
            entry_slots: vec!["A".into(), "B".into(), "C".into()],
            matches: vec![
                MatchNode {
                    id: "m1".into(),
                    sources: [Source::slot("A"), Source::slot("B")],
                    win_dest: Destination::to_match("m2", Outcome::Win),
                    loss_dest: Destination::placement("3rd"),
                    round: 2,
                },
                MatchNode {
                    id: "m2".into(),
                    sources: [Source::winner_of("m1"), Source::slot("C")],
                    win_dest: Destination::placement("1st"),
                    loss_dest: Destination::placement("2nd"),
                    round: 2,
                },
            ],
            placements: (1..=3).map(PlacementClass::single).collect(),
        };
        let report = g.validate();
        assert!(report.has(ViolationKind::RoundOrder), "{report}");
        assert_eq!(report.violations.len(), 1);
    }

    #[test]
    fn destination_must_agree_with_consumer() {
        let mut g = BracketGraph {
            entry_slots: vec!["A".into(), "B".into(), "C".into()],
            matches: vec![
                MatchNode {
                    id: "m1".into(),
                    sources: [Source::slot("A"), Source::slot("B")],
                    win_dest: Destination::to_match("m2", Outcome::Win),
                    loss_dest: Destination::placement("3rd"),
                    round: 1,
                },
                MatchNode {
                    id: "m2".into(),
                    sources: [Source::winner_of("m1"), Source::slot("C")],
                    win_dest: Destination::placement("1st"),
                    loss_dest: Destination::placement("2nd"),
                    round: 2,
                },
            ],
            placements: (1..=3).map(PlacementClass::single).collect(),
        };
        assert!(g.validate().is_ok());
        g.matches[1].sources[0] = Source::loser_of("m1");
        let report = g.validate();
        assert!(report.has(ViolationKind::DestinationMismatch), "{report}");
    }

    #[test]
    fn json_shape() {
        let json = two_player().to_json().unwrap();
        let value: serde_json::Value = serde_json::from_str(&json).unwrap();
        assert_eq!(value["matches"][0]["sources"][0]["slot"], "S1");
        assert_eq!(value["matches"][0]["win_dest"]["placement"], "1st");
        assert_eq!(value["placements"][1]["label"], "2nd");
        let back = BracketGraph::from_json(&json).unwrap();
        assert_eq!(back, two_player());
    }
}
