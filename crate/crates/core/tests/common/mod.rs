//! Independent oracles shared by the integration and acceptance tests. They
//! deliberately avoid the library's simulation and enumeration code.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use tourney_analysis::bracket::{BracketGraph, Source};
use tourney_analysis::progress::Standings;

/// Single elimination over four entrants: semi-finals 1v2 and 3v4, then a final.
/// Returns `counts[strength-1]` over classes `[1st, 2nd, 3-4th]`.
pub fn se4_brute_force() -> Vec<[u64; 3]> {
    let mut counts = vec![[0u64; 3]; 4];
    for a in 1..=4u32 {
        for b in 1..=4u32 {
            for c in 1..=4u32 {
                for d in 1..=4u32 {
                    let mut seen = [a, b, c, d];
                    seen.sort();
                    if seen != [1, 2, 3, 4] {
                        continue;
                    }
                    let (w1, l1) = (a.max(b), a.min(b));
                    let (w2, l2) = (c.max(d), c.min(d));
                    counts[w1.max(w2) as usize - 1][0] += 1;
                    counts[w1.min(w2) as usize - 1][1] += 1;
                    counts[l1 as usize - 1][2] += 1;
                    counts[l2 as usize - 1][2] += 1;
                }
            }
        }
    }
    counts
}

/// Brute-force view of a partially played round robin.
#[derive(Debug, Default)]
pub struct RrOracle {
    /// Every `(lo, hi)` rank span a participant can finish in.
    pub reachable: BTreeMap<String, BTreeSet<(u32, u32)>>,
    /// Spans per participant and own-result string (e.g. `"WL"` in playing order).
    pub by_own: BTreeMap<(String, String), BTreeSet<(u32, u32)>>,
    /// `(participant, match index)` -> number of earlier-round histories in
    /// which flipping that match never changes the participant's span.
    pub indifferent: BTreeMap<(String, usize), u64>,
    pub completions: u64,
}

fn spans(wins: &BTreeMap<String, u32>) -> BTreeMap<String, (u32, u32)> {
    wins.iter()
        .map(|(name, &w)| {
            let above = wins.values().filter(|&&x| x > w).count() as u32;
            let level = wins.values().filter(|&&x| x == w).count() as u32;
            (name.clone(), (above + 1, above + level))
        })
        .collect()
}

pub fn rr_oracle(st: &Standings) -> RrOracle {
    let matches: Vec<(usize, String, String)> = st
        .remaining
        .iter()
        .enumerate()
        .flat_map(|(r, round)| round.iter().map(move |(a, b)| (r, a.clone(), b.clone())))
        .collect();
    let m = matches.len();
    let mut out = RrOracle {
        completions: 1 << m,
        ..Default::default()
    };
    let outcome = |bits: u64| -> BTreeMap<String, (u32, u32)> {
        let mut wins: BTreeMap<String, u32> = st
            .participants
            .iter()
            .map(|r| (r.name.clone(), r.wins))
            .collect();
        for (j, (_, a, b)) in matches.iter().enumerate() {
            let w = if bits >> j & 1 == 1 { a } else { b };
            *wins.get_mut(w).unwrap() += 1;
        }
        spans(&wins)
    };
    for bits in 0..(1u64 << m) {
        let placed = outcome(bits);
        for r in &st.participants {
            let span = placed[&r.name];
            out.reachable
                .entry(r.name.clone())
                .or_default()
                .insert(span);
            let own: String = matches
                .iter()
                .enumerate()
                .filter(|(_, (_, a, b))| *a == r.name || *b == r.name)
                .map(|(j, (_, a, _))| {
                    if (bits >> j & 1 == 1) == (*a == r.name) {
                        'W'
                    } else {
                        'L'
                    }
                })
                .collect();
            out.by_own
                .entry((r.name.clone(), own))
                .or_default()
                .insert(span);
        }
    }
    for (j, (round, a, b)) in matches.iter().enumerate() {
        let earlier: Vec<usize> = (0..m).filter(|&k| matches[k].0 < *round).collect();
        for p in [a, b] {
            let mut indifferent = 0;
            for h in 0..(1u64 << earlier.len()) {
                let mut changed = false;
                for bits in 0..(1u64 << m) {
                    let consistent = earlier
                        .iter()
                        .enumerate()
                        .all(|(t, &k)| (bits >> k & 1) == (h >> t & 1));
                    if !consistent || bits >> j & 1 == 1 {
                        continue;
                    }
                    if outcome(bits)[p] != outcome(bits | 1 << j)[p] {
                        changed = true;
                        break;
                    }
                }
                if !changed {
                    indifferent += 1;
                }
            }
            if indifferent > 0 {
                out.indifferent.insert((p.clone(), j), indifferent);
            }
        }
    }
    out
}

/// Renames entry slots throughout the graph according to `perm` (slot `i`
/// becomes slot `perm[i]`), keeping the entry slot list itself.
pub fn relabel_slots(graph: &BracketGraph, perm: &[usize]) -> BracketGraph {
    let mut out = graph.clone();
    for m in &mut out.matches {
        for s in &mut m.sources {
            if let Source::Slot { slot } = s {
                let i = graph.entry_slots.iter().position(|x| x == slot).unwrap();
                *slot = graph.entry_slots[perm[i]].clone();
            }
        }
    }
    out
}
