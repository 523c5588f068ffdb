use std::collections::{HashMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::bracket::RoundSchedule;
use crate::error::{Error, Result};

pub const MAX_PARTICIPANTS: usize = 16;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Record {
    pub name: String,
    pub wins: u32,
    pub losses: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlayedMatch {
    pub winner: String,
    pub loser: String,
}

/// A partially played round robin: records so far, completed results, and
/// the remaining rounds in playing order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Standings {
    pub participants: Vec<Record>,
    pub played: Vec<PlayedMatch>,
    pub remaining: Vec<Vec<(String, String)>>,
}

impl Standings {
    pub fn from_json(text: &str) -> Result<Self> {
        let s: Standings = serde_json::from_str(text)?;
        s.validate()?;
        Ok(s)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// Builds standings from results, deriving the win/loss records.
    pub fn from_results(
        names: &[String],
        played: Vec<PlayedMatch>,
        remaining: Vec<Vec<(String, String)>>,
    ) -> Result<Self> {
        let mut participants: Vec<Record> = names
            .iter()
            .map(|n| Record {
                name: n.clone(),
                wins: 0,
                losses: 0,
            })
            .collect();
        for m in &played {
            for (name, won) in [(&m.winner, true), (&m.loser, false)] {
                let r = participants
                    .iter_mut()
                    .find(|r| &r.name == name)
                    .ok_or_else(|| Error::Standings(format!("unknown participant `{name}`")))?;
                if won {
                    r.wins += 1;
                } else {
                    r.losses += 1;
                }
            }
        }
        let s = Standings {
            participants,
            played,
            remaining,
        };
        s.validate()?;
        Ok(s)
    }

    /// Plays the first `rounds_played` rounds of `schedule`, letting
    /// `first_wins(a, b)` decide each pair, and leaves the rest pending.
    pub fn after_rounds<F>(
        schedule: &RoundSchedule,
        names: &[String],
        rounds_played: usize,
        mut first_wins: F,
    ) -> Result<Self>
    where
        F: FnMut(usize, usize) -> bool,
    {
        if names.len() != schedule.n {
            return Err(Error::Standings(format!(
                "{} names for a {}-participant schedule",
                names.len(),
                schedule.n
            )));
        }
        if rounds_played > schedule.rounds.len() {
            return Err(Error::Standings(format!(
                "only {} rounds in the schedule",
                schedule.rounds.len()
            )));
        }
        let (done, todo) = schedule.rounds.split_at(rounds_played);
        let played = done
            .iter()
            .flatten()
            .map(|&(a, b)| {
                let (w, l) = if first_wins(a, b) { (a, b) } else { (b, a) };
                PlayedMatch {
                    winner: names[w].clone(),
                    loser: names[l].clone(),
                }
            })
            .collect();
        let remaining = todo
            .iter()
            .map(|round| {
                round
                    .iter()
                    .map(|&(a, b)| (names[a].clone(), names[b].clone()))
                    .collect()
            })
            .collect();
        Self::from_results(names, played, remaining)
    }

    pub fn names(&self) -> Vec<String> {
        self.participants.iter().map(|r| r.name.clone()).collect()
    }

    pub fn remaining_count(&self) -> usize {
        self.remaining.iter().map(Vec::len).sum()
    }

    /// Games already played by the busiest participant; remaining rounds are
    /// numbered after it.
    pub fn completed_rounds(&self) -> u32 {
        self.participants
            .iter()
            .map(|r| r.wins + r.losses)
            .max()
            .unwrap_or(0)
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.participants.len();
        if !(2..=MAX_PARTICIPANTS).contains(&n) {
            return Err(Error::Standings(format!(
                "need 2..={MAX_PARTICIPANTS} participants, got {n}"
            )));
        }
        let mut index = HashMap::new();
        for (i, r) in self.participants.iter().enumerate() {
            if index.insert(r.name.as_str(), i).is_some() {
                return Err(Error::Standings(format!(
                    "participant `{}` listed twice",
                    r.name
                )));
            }
        }
        let lookup = |name: &str| {
            index
                .get(name)
                .copied()
                .ok_or_else(|| Error::Standings(format!("unknown participant `{name}`")))
        };

        let mut seen = HashSet::new();
        let mut pair = |a: usize, b: usize, what: &str| -> Result<()> {
            if a == b {
                return Err(Error::Standings(format!(
                    "{what}: `{}` cannot meet itself",
                    self.participants[a].name
                )));
            }
            if !seen.insert((a.min(b), a.max(b))) {
                return Err(Error::Standings(format!(
                    "{what}: `{}` v `{}` appears more than once",
                    self.participants[a].name, self.participants[b].name
                )));
            }
            Ok(())
        };

        let mut wins = vec![0u32; n];
        let mut losses = vec![0u32; n];
        for m in &self.played {
            let (w, l) = (lookup(&m.winner)?, lookup(&m.loser)?);
            pair(w, l, "played")?;
            wins[w] += 1;
            losses[l] += 1;
        }
        for (r, round) in self.remaining.iter().enumerate() {
            let mut busy = HashSet::new();
            for (a, b) in round {
                let (a, b) = (lookup(a)?, lookup(b)?);
                pair(a, b, "remaining")?;
                for p in [a, b] {
                    if !busy.insert(p) {
                        return Err(Error::Standings(format!(
                            "`{}` plays twice in remaining round {}",
                            self.participants[p].name,
                            r + 1
                        )));
                    }
                }
            }
        }
        if seen.len() != n * (n - 1) / 2 {
            return Err(Error::Standings(format!(
                "played and remaining cover {} of the {} pairings",
                seen.len(),
                n * (n - 1) / 2
            )));
        }
        for (i, r) in self.participants.iter().enumerate() {
            if r.wins != wins[i] || r.losses != losses[i] {
                return Err(Error::Standings(format!(
                    "`{}` is recorded {}-{} but the played results give {}-{}",
                    r.name, r.wins, r.losses, wins[i], losses[i]
                )));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::gen_round_robin;

    fn names(n: usize) -> Vec<String> {
        (1..=n).map(|i| format!("P{i}")).collect()
    }

    #[test]
    fn after_rounds_derives_records() {
        let s = gen_round_robin(4).unwrap();
        let st = Standings::after_rounds(&s, &names(4), 1, |a, b| a > b).unwrap();
        assert_eq!(st.played.len(), 2);
        assert_eq!(st.remaining_count(), 4);
        assert_eq!(st.completed_rounds(), 1);
        let total_wins: u32 = st.participants.iter().map(|r| r.wins).sum();
        assert_eq!(total_wins, 2);
    }

    #[test]
    fn inconsistent_record_is_rejected() {
        let s = gen_round_robin(4).unwrap();
        let mut st = Standings::after_rounds(&s, &names(4), 2, |a, b| a < b).unwrap();
        st.participants[0].wins += 1;
        assert!(matches!(st.validate(), Err(Error::Standings(_))));
    }

    #[test]
    fn missing_pair_is_rejected() {
        let s = gen_round_robin(4).unwrap();
        let mut st = Standings::after_rounds(&s, &names(4), 0, |a, b| a < b).unwrap();
        st.remaining.pop();
        let err = st.validate().unwrap_err().to_string();
        assert!(err.contains("cover 4 of the 6"), "{err}");
    }

    #[test]
    fn json_round_trip() {
        let s = gen_round_robin(4).unwrap();
        let st = Standings::after_rounds(&s, &names(4), 2, |a, b| a < b).unwrap();
        let back = Standings::from_json(&st.to_json().unwrap()).unwrap();
        assert_eq!(back, st);
    }
}
