use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use super::{ValidationReport, ViolationKind};

/// Round-robin pairing schedule over participants `0..n`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RoundSchedule {
    pub n: usize,
    pub rounds: Vec<Vec<(usize, usize)>>,
}

impl RoundSchedule {
    pub fn pair_count(&self) -> usize {
        self.rounds.iter().map(Vec::len).sum()
    }

    pub fn validate(&self) -> ValidationReport {
        let mut report = ValidationReport::default();
        let mut seen = HashSet::new();
        for (r, round) in self.rounds.iter().enumerate() {
            let mut busy = HashSet::new();
            for &(a, b) in round {
                let subject = format!("round {} pair ({a}, {b})", r + 1);
                if a >= self.n || b >= self.n || a == b {
                    report.push(
                        ViolationKind::ParticipantOutOfRange,
                        subject,
                        "not a pair of distinct participants",
                    );
                    continue;
                }
                for p in [a, b] {
                    if !busy.insert(p) {
                        report.push(
                            ViolationKind::ParticipantTwiceInRound,
                            &subject,
                            format!("participant {p} already plays in this round"),
                        );
                    }
                }
                if !seen.insert((a.min(b), a.max(b))) {
                    report.push(
                        ViolationKind::PairRepeated,
                        subject,
                        "pair already scheduled",
                    );
                }
            }
        }
        for a in 0..self.n {
            for b in a + 1..self.n {
                if !seen.contains(&(a, b)) {
                    report.push(
                        ViolationKind::PairMissing,
                        format!("pair ({a}, {b})"),
                        "never scheduled",
                    );
                }
            }
        }
        report
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn detects_repeats_and_gaps() {
        let s = RoundSchedule {
            n: 4,
            rounds: vec![vec![(0, 1), (2, 3)], vec![(0, 1), (1, 2)]],
        };
        let report = s.validate();
        assert!(report.has(ViolationKind::PairRepeated));
        assert!(report.has(ViolationKind::ParticipantTwiceInRound));
        assert!(report.has(ViolationKind::PairMissing));
    }

    #[test]
    fn single_pair_is_complete() {
        let s = RoundSchedule {
            n: 2,
            rounds: vec![vec![(1, 0)]],
        };
        assert!(s.validate().is_ok());
        assert_eq!(s.pair_count(), 1);
    }
}
