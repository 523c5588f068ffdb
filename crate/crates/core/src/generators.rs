//! Constructors for single elimination, the split-field double elimination
//! variant, and circle-method round robin.
//!
//! Sizes other than the 8-participant layouts are extensions: single
//! elimination is defined for any power of two, double elimination keeps the
//! half/half upper-lower split for every supported depth.

use crate::bracket::{
    BracketGraph, Destination, MatchNode, Outcome, PlacementClass, RoundSchedule, Source,
};
use crate::error::{Error, Result};

pub const MAX_ELIMINATION_ROUNDS: u32 = 6;
pub const MAX_ROUND_ROBIN: usize = 12;

/// Single elimination with `rounds` rounds and `2^rounds` entry slots.
/// Adjacent slots meet in round 1; losers of round `r` share ranks
/// `2^(rounds-r)+1 ..= 2^(rounds-r+1)`.
pub fn gen_single_elim(rounds: u32) -> Result<BracketGraph> {
    if !(1..=MAX_ELIMINATION_ROUNDS).contains(&rounds) {
        return Err(Error::UnsupportedSize(format!(
            "single elimination needs 1..={MAX_ELIMINATION_ROUNDS} rounds, got {rounds}"
        )));
    }
    let n = 1usize << rounds;
    let entry_slots: Vec<String> = (1..=n).map(|s| format!("S{s}")).collect();
    let mut matches = Vec::with_capacity(n - 1);
    let mut placements = vec![PlacementClass::single(1)];
    let id = |r: u32, j: usize| format!("R{r}-{}", j + 1);

    for r in 1..=rounds {
        let count = n >> r;
        let lo = (1u32 << (rounds - r)) + 1;
        let hi = 1u32 << (rounds - r + 1);
        let losers = PlacementClass::span(lo, hi);
        for j in 0..count {
            let sources = if r == 1 {
                [
                    Source::slot(&entry_slots[2 * j]),
                    Source::slot(&entry_slots[2 * j + 1]),
                ]
            } else {
                [
                    Source::winner_of(id(r - 1, 2 * j)),
                    Source::winner_of(id(r - 1, 2 * j + 1)),
                ]
            };
            let win_dest = if r == rounds {
                Destination::placement(&placements[0].label)
            } else {
                Destination::to_match(id(r + 1, j / 2), Outcome::Win)
            };
            matches.push(MatchNode {
                id: id(r, j),
                sources,
                win_dest,
                loss_dest: Destination::placement(&losers.label),
                round: r,
            });
        }
        placements.push(losers);
    }
    placements.sort();
    Ok(BracketGraph {
        entry_slots,
        matches,
        placements,
    })
}

/// Pairing of dropped upper-bracket losers with lower-bracket survivors.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub enum DropWiring {
    /// The loser of upper match `j` meets the winner of lower match `j`.
    #[default]
    Straight,
    /// The loser of upper match `j` meets the winner of lower match `k-1-j`.
    Cross,
    /// One permutation per drop stage: upper loser `j` meets lower survivor `perm[j]`.
    Custom(Vec<Vec<usize>>),
}

/// Double elimination over `2^upper_rounds` participants split evenly into
/// upper entry slots `U*` and lower entry slots `L*` (4 + 4 for the 8-player
/// layout), with two lower rounds per upper round and a single grand final.
pub fn gen_double_elim(upper_rounds: u32) -> Result<BracketGraph> {
    gen_double_elim_with(upper_rounds, &DropWiring::Straight)
}

pub fn gen_double_elim_with(upper_rounds: u32, wiring: &DropWiring) -> Result<BracketGraph> {
    if !(2..=MAX_ELIMINATION_ROUNDS).contains(&upper_rounds) {
        return Err(Error::UnsupportedSize(format!(
            "double elimination needs 2..={MAX_ELIMINATION_ROUNDS} upper rounds, got {upper_rounds}"
        )));
    }
    let i = upper_rounds;
    let n = 1usize << i;
    let half = n / 2;
    let upper_slots: Vec<String> = (1..=half).map(|s| format!("U{s}")).collect();
    let lower_slots: Vec<String> = (1..=half).map(|s| format!("L{s}")).collect();

    let mut b = Builder::default();
    let mut next_rank = n as u32;
    let mut take_class = |size: usize, b: &mut Builder| {
        let class = PlacementClass::span(next_rank - size as u32 + 1, next_rank);
        next_rank -= size as u32;
        b.placements.push(class.clone());
        class.label
    };

    // upper bracket: round k is played in global round 2k-1
    let mut upper_rounds_ids: Vec<Vec<usize>> = Vec::new();
    for k in 1..i {
        let count = half >> k;
        let mut ids = Vec::with_capacity(count);
        for j in 0..count {
            let sources = if k == 1 {
                [
                    Source::slot(&upper_slots[2 * j]),
                    Source::slot(&upper_slots[2 * j + 1]),
                ]
            } else {
                let prev = &upper_rounds_ids[k as usize - 2];
                [b.winner(prev[2 * j]), b.winner(prev[2 * j + 1])]
            };
            ids.push(b.add("Mu", sources, 2 * k - 1));
        }
        upper_rounds_ids.push(ids);
    }

    // lower bracket opening round
    let bottom = take_class(half / 2, &mut b);
    let mut survivors = Vec::with_capacity(half / 2);
    for j in 0..half / 2 {
        let m = b.add(
            "Ml",
            [
                Source::slot(&lower_slots[2 * j]),
                Source::slot(&lower_slots[2 * j + 1]),
            ],
            1,
        );
        b.place(m, Outcome::Loss, &bottom);
        survivors.push(m);
    }

    for k in 1..i {
        let dropped = &upper_rounds_ids[k as usize - 1];
        let count = dropped.len();
        let perm: Vec<usize> = match wiring {
            DropWiring::Straight => (0..count).collect(),
            DropWiring::Cross => (0..count).rev().collect(),
            DropWiring::Custom(perms) => {
                let p = perms
                    .get(k as usize - 1)
                    .cloned()
                    .unwrap_or_else(|| (0..count).collect());
                let mut sorted = p.clone();
                sorted.sort_unstable();
                if sorted != (0..count).collect::<Vec<_>>() {
                    return Err(Error::UnsupportedSize(format!(
                        "drop stage {k} needs a permutation of 0..{count}, got {p:?}"
                    )));
                }
                p
            }
        };
        let class = take_class(count, &mut b);
        let mut drop_matches = Vec::with_capacity(count);
        for (j, &upper) in dropped.iter().enumerate() {
            let sources = [b.winner(survivors[perm[j]]), b.loser(upper)];
            let m = b.add("Ml", sources, 2 * k);
            b.place(m, Outcome::Loss, &class);
            drop_matches.push(m);
        }
        survivors = drop_matches;
        if k < i - 1 {
            let class = take_class(survivors.len() / 2, &mut b);
            let mut merged = Vec::with_capacity(survivors.len() / 2);
            for pair in survivors.chunks(2) {
                let sources = [b.winner(pair[0]), b.winner(pair[1])];
                let m = b.add("Ml", sources, 2 * k + 1);
                b.place(m, Outcome::Loss, &class);
                merged.push(m);
            }
            survivors = merged;
        }
    }

    let upper_final = upper_rounds_ids[i as usize - 2][0];
    let lower_final = survivors[0];
    let sources = [b.winner(upper_final), b.winner(lower_final)];
    let gf = b.add("Mg", sources, 2 * i - 1);
    let second = take_class(1, &mut b);
    let first = take_class(1, &mut b);
    b.place(gf, Outcome::Loss, &second);
    b.place(gf, Outcome::Win, &first);
    debug_assert_eq!(next_rank, 0);

    let mut matches = b.matches;
    matches.sort_by_key(|m| m.round);
    let mut placements = b.placements;
    placements.sort();
    Ok(BracketGraph {
        entry_slots: upper_slots.into_iter().chain(lower_slots).collect(),
        matches,
        placements,
    })
}

#[derive(Default)]
struct Builder {
    matches: Vec<MatchNode>,
    placements: Vec<PlacementClass>,
    upper_count: usize,
    lower_count: usize,
}

impl Builder {
    fn add(&mut self, prefix: &str, sources: [Source; 2], round: u32) -> usize {
        let id = match prefix {
            "Mu" => {
                self.upper_count += 1;
                format!("Mu{}", self.upper_count)
            }
            "Ml" => {
                self.lower_count += 1;
                format!("Ml{}", self.lower_count)
            }
            _ => prefix.to_string(),
        };
        for src in &sources {
            if let Source::Feed { match_id, feed } = src {
                let prior = self
                    .matches
                    .iter_mut()
                    .find(|m| &m.id == match_id)
                    .expect("feed of a built match");
                let dest = Destination::to_match(&id, *feed);
                match feed {
                    Outcome::Win => prior.win_dest = dest,
                    Outcome::Loss => prior.loss_dest = dest,
                }
            }
        }
        self.matches.push(MatchNode {
            id,
            sources,
            win_dest: Destination::placement(""),
            loss_dest: Destination::placement(""),
            round,
        });
        self.matches.len() - 1
    }

    fn winner(&self, m: usize) -> Source {
        Source::winner_of(&self.matches[m].id)
    }

    fn loser(&self, m: usize) -> Source {
        Source::loser_of(&self.matches[m].id)
    }

    fn place(&mut self, m: usize, outcome: Outcome, label: &str) {
        let dest = Destination::placement(label);
        match outcome {
            Outcome::Win => self.matches[m].win_dest = dest,
            Outcome::Loss => self.matches[m].loss_dest = dest,
        }
    }
}

/// Circle-method schedule: participant 0 stays fixed while the others rotate,
/// giving `n-1` rounds of `n/2` disjoint pairs.
pub fn gen_round_robin(n: usize) -> Result<RoundSchedule> {
    if !(2..=MAX_ROUND_ROBIN).contains(&n) || !n.is_multiple_of(2) {
        return Err(Error::UnsupportedSize(format!(
            "round robin needs an even participant count in 2..={MAX_ROUND_ROBIN}, got {n}"
        )));
    }
    let mut positions: Vec<usize> = (0..n).collect();
    let mut rounds = Vec::with_capacity(n - 1);
    for _ in 0..n - 1 {
        rounds.push(
            (0..n / 2)
                .map(|k| (positions[k], positions[n - 1 - k]))
                .collect(),
        );
        positions[1..].rotate_right(1);
    }
    Ok(RoundSchedule { n, rounds })
}
