//! Progress analysis of a partially played round robin by enumerating every
//! completion of the remaining matches.
//!
//! Final placements rank by win count; participants level on wins share a
//! class spanning their positions (two players tied behind the leader hold
//! `2-3rd`), and a shared class is worth the mean of the per-rank prizes it spans.

use std::collections::BTreeSet;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::standings::Standings;
use super::{tree_issues, CdIssue, IssueKind, NodeState, ProgressNode, ProgressTree};
use crate::bracket::{PlacementClass, PrizeVector, RoundSchedule};
use crate::error::{Error, Result};

/// Upper bound on remaining matches; completions are enumerated exhaustively.
pub const MAX_REMAINING: usize = 20;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParticipantProgress {
    pub name: String,
    pub wins: u32,
    pub losses: u32,
    pub remaining: usize,
    pub reachable: Vec<PlacementClass>,
    pub stability: Option<f64>,
    pub tree: ProgressTree,
}

/// A remaining match that cannot change one of its players' placement under
/// some results of the rounds before it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionalThrowaway {
    pub participant: String,
    pub match_id: String,
    pub round: u32,
    pub opponent: String,
    /// Earlier-round result combinations under which the match is indifferent.
    pub histories_flagged: u64,
    pub histories_total: u64,
    /// The participant's own earlier results that guarantee indifference,
    /// e.g. `["won R6 v K"]`; `["always"]` when it holds unconditionally.
    pub conditions: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RrReport {
    pub completions: u64,
    pub participants: Vec<ParticipantProgress>,
    pub throwaways: Vec<ConditionalThrowaway>,
    pub issues: Vec<CdIssue>,
}

impl RrReport {
    pub fn passes(&self) -> bool {
        self.issues.is_empty()
    }

    pub fn participant(&self, name: &str) -> Option<&ParticipantProgress> {
        self.participants.iter().find(|p| p.name == name)
    }
}

#[derive(Debug, Clone, Copy)]
struct Pending {
    a: usize,
    b: usize,
    round: u32,
    /// Number of remaining matches in strictly earlier rounds.
    history_bits: usize,
}

#[derive(Clone, Copy, Default, PartialEq, Eq)]
struct ClassSet([u64; 4]);

impl ClassSet {
    fn key(lo: u32, hi: u32) -> usize {
        (((lo - 1) << 4) | (hi - 1)) as usize
    }

    fn insert(&mut self, key: usize) {
        self.0[key >> 6] |= 1 << (key & 63);
    }

    fn union(&mut self, other: &ClassSet) {
        for (a, b) in self.0.iter_mut().zip(other.0) {
            *a |= b;
        }
    }

    fn classes(&self) -> Vec<PlacementClass> {
        (0..256)
            .filter(|&k| self.0[k >> 6] >> (k & 63) & 1 == 1)
            .map(|k| PlacementClass::span((k >> 4) as u32 + 1, (k & 15) as u32 + 1))
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect()
    }
}

fn place(wins: &[u32], p: usize) -> (u32, u32) {
    let mut better = 0;
    let mut level = 0;
    for (q, &w) in wins.iter().enumerate() {
        if q != p {
            if w > wins[p] {
                better += 1;
            } else if w == wins[p] {
                level += 1;
            }
        }
    }
    (better + 1, better + 1 + level)
}

struct Tally {
    /// `leaves[p][own]`: classes reachable given `p`'s own results `own`.
    leaves: Vec<Vec<ClassSet>>,
    /// `sensitive[j][side][history]`: flipping match `j` changed that side's placement.
    sensitive: Vec<[Vec<bool>; 2]>,
}

impl Tally {
    fn new(own: &[Vec<(usize, bool)>], pending: &[Pending]) -> Self {
        Tally {
            leaves: own
                .iter()
                .map(|o| vec![ClassSet::default(); 1 << o.len()])
                .collect(),
            sensitive: pending
                .iter()
                .map(|p| {
                    [
                        vec![false; 1 << p.history_bits],
                        vec![false; 1 << p.history_bits],
                    ]
                })
                .collect(),
        }
    }

    fn merge(mut self, other: Tally) -> Tally {
        for (mine, theirs) in self.leaves.iter_mut().zip(other.leaves) {
            for (a, b) in mine.iter_mut().zip(theirs) {
                a.union(&b);
            }
        }
        for (mine, theirs) in self.sensitive.iter_mut().zip(other.sensitive) {
            for side in 0..2 {
                for (a, b) in mine[side].iter_mut().zip(&theirs[side]) {
                    *a |= *b;
                }
            }
        }
        self
    }
}

fn sweep(
    range: std::ops::Range<u64>,
    base: &[u32],
    pending: &[Pending],
    own: &[Vec<(usize, bool)>],
) -> Tally {
    let n = base.len();
    let mut tally = Tally::new(own, pending);
    let mut wins = vec![0u32; n];
    let mut placed = vec![(0u32, 0u32); n];
    for c in range {
        wins.copy_from_slice(base);
        for (j, m) in pending.iter().enumerate() {
            if c >> j & 1 == 1 {
                wins[m.a] += 1;
            } else {
                wins[m.b] += 1;
            }
        }
        for p in 0..n {
            placed[p] = place(&wins, p);
            let mut own_bits = 0usize;
            for (t, &(j, is_a)) in own[p].iter().enumerate() {
                if (c >> j & 1 == 1) == is_a {
                    own_bits |= 1 << t;
                }
            }
            let (lo, hi) = placed[p];
            tally.leaves[p][own_bits].insert(ClassSet::key(lo, hi));
        }
        // each flip pair is visited once, from the side where `b` won
        for (j, m) in pending.iter().enumerate() {
            if c >> j & 1 == 1 {
                continue;
            }
            let history = (c & ((1u64 << m.history_bits) - 1)) as usize;
            wins[m.a] += 1;
            wins[m.b] -= 1;
            for (side, p) in [m.a, m.b].into_iter().enumerate() {
                if place(&wins, p) != placed[p] {
                    tally.sensitive[j][side][history] = true;
                }
            }
            wins[m.a] -= 1;
            wins[m.b] += 1;
        }
    }
    tally
}

/// Enumerates all `2^m` completions of the `m` remaining matches and reports,
/// per participant, reachable placements, the progress tree over their own
/// remaining matches, and the competitiveness findings.
pub fn rr_progress(standings: &Standings, prizes: &PrizeVector) -> Result<RrReport> {
    standings.validate()?;
    let n = standings.participants.len();
    prizes.check_arity(n)?;
    let m = standings.remaining_count();
    if m > MAX_REMAINING {
        return Err(Error::EnumerationBound(format!(
            "{m} remaining matches exceed the limit of {MAX_REMAINING} ({} completions)",
            1u64 << m.min(63)
        )));
    }
    let names = standings.names();
    let index = |name: &str| {
        names
            .iter()
            .position(|x| x == name)
            .expect("validated name")
    };
    let base: Vec<u32> = standings.participants.iter().map(|r| r.wins).collect();
    let offset = standings.completed_rounds();

    let mut pending = Vec::with_capacity(m);
    for (r, round) in standings.remaining.iter().enumerate() {
        let history_bits = pending.len();
        for (a, b) in round {
            pending.push(Pending {
                a: index(a),
                b: index(b),
                round: offset + r as u32 + 1,
                history_bits,
            });
        }
    }
    let mut own: Vec<Vec<(usize, bool)>> = vec![Vec::new(); n];
    for (j, p) in pending.iter().enumerate() {
        own[p.a].push((j, true));
        own[p.b].push((j, false));
    }

    let total: u64 = 1 << m;
    let chunks = (rayon::current_num_threads() as u64 * 4).clamp(1, total);
    let step = total.div_ceil(chunks);
    let tally = (0..chunks)
        .into_par_iter()
        .map(|k| sweep(k * step..((k + 1) * step).min(total), &base, &pending, &own))
        .reduce_with(Tally::merge)
        .expect("at least one chunk");

    let match_id = |p: &Pending| format!("R{}:{}-{}", p.round, names[p.a], names[p.b]);
    let mut participants = Vec::with_capacity(n);
    let mut issues = Vec::new();
    for p in 0..n {
        let root = build_rr_node(
            &own[p],
            0,
            String::new(),
            &tally.leaves[p],
            &pending,
            &names,
            prizes,
        );
        let tree = ProgressTree {
            participant: names[p].clone(),
            root,
        };
        if !own[p].is_empty() {
            tree_issues(&tree, &mut issues);
        }
        let r = &standings.participants[p];
        participants.push(ParticipantProgress {
            name: r.name.clone(),
            wins: r.wins,
            losses: r.losses,
            remaining: own[p].len(),
            reachable: tree.root.reachable.clone(),
            stability: tree.root.stability,
            tree,
        });
    }

    let mut throwaways = Vec::new();
    for (j, pm) in pending.iter().enumerate() {
        for (side, p) in [pm.a, pm.b].into_iter().enumerate() {
            let sensitive = &tally.sensitive[j][side];
            let flagged = sensitive.iter().filter(|s| !**s).count() as u64;
            if flagged == 0 {
                continue;
            }
            let earlier: Vec<(usize, bool)> = own[p]
                .iter()
                .copied()
                .filter(|&(jj, _)| jj < pm.history_bits)
                .collect();
            let mut holds = vec![true; 1 << earlier.len()];
            for (h, s) in sensitive.iter().enumerate() {
                let mut pattern = 0;
                for (t, &(jj, is_a)) in earlier.iter().enumerate() {
                    if (h >> jj & 1 == 1) == is_a {
                        pattern |= 1 << t;
                    }
                }
                holds[pattern] &= !s;
            }
            let conditions = if holds.iter().all(|&x| x) {
                vec!["always".to_string()]
            } else {
                holds
                    .iter()
                    .enumerate()
                    .filter(|(_, &ok)| ok)
                    .map(|(pattern, _)| {
                        earlier
                            .iter()
                            .enumerate()
                            .map(|(t, &(jj, is_a))| {
                                let e = &pending[jj];
                                let opp = if is_a { e.b } else { e.a };
                                let verb = if pattern >> t & 1 == 1 { "won" } else { "lost" };
                                format!("{verb} R{} v {}", e.round, names[opp])
                            })
                            .collect::<Vec<_>>()
                            .join(" and ")
                    })
                    .collect()
            };
            let opponent = names[if side == 0 { pm.b } else { pm.a }].clone();
            let id = match_id(pm);
            let detail = format!(
                "placement cannot change with this result in {flagged}/{} earlier-round histories{}; a clinched or eliminated player gains nothing from winning",
                sensitive.len(),
                if conditions.is_empty() {
                    String::new()
                } else {
                    format!(", guaranteed when {}", conditions.join(" or "))
                }
            );
            issues.push(CdIssue {
                participant: names[p].clone(),
                match_id: Some(id.clone()),
                kind: IssueKind::Throwaway,
                detail,
            });
            throwaways.push(ConditionalThrowaway {
                participant: names[p].clone(),
                match_id: id,
                round: pm.round,
                opponent,
                histories_flagged: flagged,
                histories_total: sensitive.len() as u64,
                conditions,
            });
        }
    }

    Ok(RrReport {
        completions: total,
        participants,
        throwaways,
        issues,
    })
}

fn build_rr_node(
    own: &[(usize, bool)],
    depth: usize,
    path: String,
    leaves: &[ClassSet],
    pending: &[Pending],
    names: &[String],
    prizes: &PrizeVector,
) -> ProgressNode {
    if depth == own.len() {
        let bits = path
            .chars()
            .enumerate()
            .filter(|(_, c)| *c == 'W')
            .fold(0, |acc, (t, _)| acc | 1 << t);
        let reachable = leaves[bits].classes();
        let stability = match reachable.as_slice() {
            [only] => Some(prizes.span_mean(only)),
            _ => None,
        };
        return ProgressNode::leaf(path, reachable, stability);
    }
    let (j, is_a) = own[depth];
    let pm = &pending[j];
    let opponent = if is_a { pm.b } else { pm.a };
    let state = NodeState::Match {
        id: format!("R{}:{}-{}", pm.round, names[pm.a], names[pm.b]),
        round: pm.round,
        opponent: Some(names[opponent].clone()),
    };
    let win = build_rr_node(
        own,
        depth + 1,
        format!("{path}W"),
        leaves,
        pending,
        names,
        prizes,
    );
    let loss = build_rr_node(
        own,
        depth + 1,
        format!("{path}L"),
        leaves,
        pending,
        names,
        prizes,
    );
    ProgressNode::internal(state, path, win, loss)
}

/// The earliest state of `schedule` whose remaining matches fit the
/// enumeration bound, with earlier rounds decided in favour of the higher
/// participant number. Participants are named `P1..Pn`.
pub fn opening_state(schedule: &RoundSchedule) -> Result<Standings> {
    let names: Vec<String> = (1..=schedule.n).map(|i| format!("P{i}")).collect();
    let mut left = schedule.pair_count();
    let mut rounds_played = 0;
    while left > MAX_REMAINING {
        left -= schedule.rounds[rounds_played].len();
        rounds_played += 1;
    }
    Standings::after_rounds(schedule, &names, rounds_played, |a, b| a > b)
}
