//! Progress trees: one binary tree per participant whose internal nodes are
//! pending matches and whose leaves are final placements. Each node carries a
//! stability value (the mean of its two children, grounded at prize values)
//! and the set of placement classes still reachable from it.

mod rr;
mod standings;

pub use rr::{
    opening_state, rr_progress, ConditionalThrowaway, ParticipantProgress, RrReport, MAX_REMAINING,
};
pub use standings::{PlayedMatch, Record, Standings};

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::bracket::{BracketGraph, CompiledBracket, Outcome, PlacementClass, PrizeVector, Route};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum NodeState {
    Match {
        id: String,
        round: u32,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        opponent: Option<String>,
    },
    Placement,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProgressNode {
    pub state: NodeState,
    /// Outcomes leading here from the root, e.g. `WWL`.
    pub path: String,
    pub stability: Option<f64>,
    /// Reachable classes, best first. A leaf whose placement still depends on
    /// other matches lists every candidate and has unknown stability.
    pub reachable: Vec<PlacementClass>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub win: Option<Box<ProgressNode>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub loss: Option<Box<ProgressNode>>,
}

impl ProgressNode {
    pub fn leaf(path: String, reachable: Vec<PlacementClass>, stability: Option<f64>) -> Self {
        ProgressNode {
            state: NodeState::Placement,
            path,
            stability,
            reachable,
            win: None,
            loss: None,
        }
    }

    pub fn internal(state: NodeState, path: String, win: ProgressNode, loss: ProgressNode) -> Self {
        let stability = match (win.stability, loss.stability) {
            (Some(w), Some(l)) => Some((w + l) / 2.0),
            _ => None,
        };
        let reachable: BTreeSet<PlacementClass> = win
            .reachable
            .iter()
            .chain(&loss.reachable)
            .cloned()
            .collect();
        ProgressNode {
            state,
            path,
            stability,
            reachable: reachable.into_iter().collect(),
            win: Some(Box::new(win)),
            loss: Some(Box::new(loss)),
        }
    }

    pub fn is_leaf(&self) -> bool {
        self.win.is_none()
    }

    pub fn child(&self, outcome: Outcome) -> Option<&ProgressNode> {
        match outcome {
            Outcome::Win => self.win.as_deref(),
            Outcome::Loss => self.loss.as_deref(),
        }
    }

    pub fn match_id(&self) -> Option<&str> {
        match &self.state {
            NodeState::Match { id, .. } => Some(id),
            NodeState::Placement => None,
        }
    }

    /// Follows a `W`/`L` path from this node.
    pub fn descend(&self, path: &str) -> Option<&ProgressNode> {
        path.chars().try_fold(self, |node, c| match c {
            'W' => node.child(Outcome::Win),
            'L' => node.child(Outcome::Loss),
            _ => None,
        })
    }

    /// Pre-order walk over every node.
    pub fn walk(&self) -> impl Iterator<Item = &ProgressNode> {
        let mut stack = vec![self];
        std::iter::from_fn(move || {
            let node = stack.pop()?;
            if let (Some(w), Some(l)) = (&node.win, &node.loss) {
                stack.push(l);
                stack.push(w);
            }
            Some(node)
        })
    }

    pub fn depth(&self) -> usize {
        self.path.len()
    }

    fn coverage(&self) -> BTreeSet<u32> {
        self.reachable
            .iter()
            .flat_map(|c| c.rank_lo..=c.rank_hi)
            .collect()
    }
}

/// A participant's progress tree.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProgressTree {
    pub participant: String,
    pub root: ProgressNode,
}

/// Builds the tree for the participant entering at `entry`.
pub fn build_tree(graph: &BracketGraph, entry: &str, prizes: &PrizeVector) -> Result<ProgressTree> {
    let compiled = graph.compile()?;
    let slot = compiled
        .slot_index(entry)
        .ok_or_else(|| Error::UnknownSlot(entry.to_string()))?;
    build_tree_compiled(&compiled, slot, prizes)
}

pub fn build_tree_compiled(
    bracket: &CompiledBracket,
    slot: usize,
    prizes: &PrizeVector,
) -> Result<ProgressTree> {
    prizes.check_arity(bracket.classes().len())?;
    let root = build_match(bracket, bracket.entry_match(slot), String::new(), prizes);
    Ok(ProgressTree {
        participant: bracket.slot_names()[slot].clone(),
        root,
    })
}

fn build_match(
    bracket: &CompiledBracket,
    m: usize,
    path: String,
    prizes: &PrizeVector,
) -> ProgressNode {
    let child = |outcome: Outcome| {
        let mut p = path.clone();
        p.push(outcome.letter());
        match bracket.route(m, outcome) {
            Route::Match(next) => build_match(bracket, next, p, prizes),
            Route::Class(c) => ProgressNode::leaf(
                p,
                vec![bracket.classes()[c].clone()],
                Some(prizes.values()[c]),
            ),
        }
    };
    let state = NodeState::Match {
        id: bracket.match_id(m).to_string(),
        round: bracket.round(m),
        opponent: None,
    };
    let win = child(Outcome::Win);
    let loss = child(Outcome::Loss);
    ProgressNode::internal(state, path, win, loss)
}

pub(crate) fn values_equal(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-9 * a.abs().max(b.abs()).max(1.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Severity {
    /// Win and loss are worth the same: a throwaway candidate.
    Equality,
    /// Losing is worth more than winning.
    Inversion,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StabilityIssue {
    pub path: String,
    pub match_id: String,
    pub severity: Severity,
    pub win_value: f64,
    pub loss_value: f64,
}

/// Stability could not be evaluated because some leaves are undecided.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Indeterminate {
    /// Paths of the undecided leaves.
    pub unknown_leaves: Vec<String>,
}

/// Reports every internal node whose win child is not strictly more valuable
/// than its loss child.
pub fn check_stability_progressing(
    tree: &ProgressTree,
) -> Result<Vec<StabilityIssue>, Indeterminate> {
    let unknown_leaves: Vec<String> = tree
        .root
        .walk()
        .filter(|n| n.is_leaf() && n.stability.is_none())
        .map(|n| n.path.clone())
        .collect();
    if !unknown_leaves.is_empty() {
        return Err(Indeterminate { unknown_leaves });
    }
    let mut issues = Vec::new();
    for node in tree.root.walk() {
        let (Some(w), Some(l)) = (&node.win, &node.loss) else {
            continue;
        };
        let (wv, lv) = (w.stability.unwrap(), l.stability.unwrap());
        let severity = if values_equal(wv, lv) {
            Severity::Equality
        } else if wv < lv {
            Severity::Inversion
        } else {
            continue;
        };
        issues.push(StabilityIssue {
            path: node.path.clone(),
            match_id: node.match_id().unwrap_or_default().to_string(),
            severity,
            win_value: wv,
            loss_value: lv,
        });
    }
    Ok(issues)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PossibilityIssue {
    pub path: String,
    pub match_id: String,
    /// `None` when the root itself already misses a better placement.
    pub edge: Option<Outcome>,
    pub before: Vec<String>,
    pub after: Vec<String>,
    /// Ranks lost ahead of worse ranks that are still reachable.
    pub lost_early: Vec<u32>,
}

/// Reachable placements must drop out worst first while the participant is
/// still playing. The root must reach rank 1 and a contiguous run below it;
/// along every edge into a further match the child keeps exactly the parent's
/// ranks up to its own worst one. Edges into leaves are exempt.
pub fn check_possibility_of_results(tree: &ProgressTree) -> Vec<PossibilityIssue> {
    let mut issues = Vec::new();
    let root = &tree.root;
    if !root.is_leaf() {
        let cov = root.coverage();
        let worst = cov.iter().next_back().copied().unwrap_or(0);
        let missing: Vec<u32> = (1..=worst).filter(|r| !cov.contains(r)).collect();
        if !missing.is_empty() {
            issues.push(PossibilityIssue {
                path: root.path.clone(),
                match_id: root.match_id().unwrap_or_default().to_string(),
                edge: None,
                before: (1..=worst).map(crate::bracket::ordinal).collect(),
                after: labels(&root.reachable),
                lost_early: missing,
            });
        }
    }
    for node in root.walk() {
        let parent_cov = node.coverage();
        for outcome in [Outcome::Win, Outcome::Loss] {
            let Some(child) = node.child(outcome) else {
                continue;
            };
            if child.is_leaf() {
                continue;
            }
            let cov = child.coverage();
            let worst = cov.iter().next_back().copied().unwrap_or(0);
            let expected: BTreeSet<u32> =
                parent_cov.iter().copied().filter(|&r| r <= worst).collect();
            if cov != expected {
                issues.push(PossibilityIssue {
                    path: node.path.clone(),
                    match_id: node.match_id().unwrap_or_default().to_string(),
                    edge: Some(outcome),
                    before: labels(&node.reachable),
                    after: labels(&child.reachable),
                    lost_early: expected.difference(&cov).copied().collect(),
                });
            }
        }
    }
    issues
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Throwaway {
    pub participant: String,
    pub match_id: String,
    pub path: String,
    pub value: f64,
    pub reachable: Vec<String>,
}

/// Matches whose win and loss outcomes carry the same stability and the same
/// reachable placements for this participant.
pub fn detect_throwaway(tree: &ProgressTree) -> Vec<Throwaway> {
    tree.root
        .walk()
        .filter_map(|node| {
            let (w, l) = (node.win.as_deref()?, node.loss.as_deref()?);
            let (wv, lv) = (w.stability?, l.stability?);
            (values_equal(wv, lv) && w.reachable == l.reachable).then(|| Throwaway {
                participant: tree.participant.clone(),
                match_id: node.match_id().unwrap_or_default().to_string(),
                path: node.path.clone(),
                value: wv,
                reachable: labels(&w.reachable),
            })
        })
        .collect()
}

pub(crate) fn labels(classes: &[PlacementClass]) -> Vec<String> {
    classes.iter().map(|c| c.label.clone()).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IssueKind {
    Stability,
    Possibility,
    Throwaway,
}

impl fmt::Display for IssueKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            IssueKind::Stability => "stability",
            IssueKind::Possibility => "possibility",
            IssueKind::Throwaway => "throwaway",
        })
    }
}

/// One competitiveness-development finding.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CdIssue {
    pub participant: String,
    #[serde(rename = "match")]
    pub match_id: Option<String>,
    pub kind: IssueKind,
    pub detail: String,
}

impl fmt::Display for CdIssue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}] {}", self.kind, self.participant)?;
        if let Some(m) = &self.match_id {
            write!(f, " @ {m}")?;
        }
        write!(f, ": {}", self.detail)
    }
}

/// Runs the stability and possibility checks on one tree. Throwaways are
/// left to the caller since round robins detect them by enumeration.
pub(crate) fn tree_issues(tree: &ProgressTree, issues: &mut Vec<CdIssue>) {
    let who = &tree.participant;
    match check_stability_progressing(tree) {
        Ok(found) => issues.extend(found.into_iter().map(|s| CdIssue {
            participant: who.clone(),
            match_id: Some(s.match_id),
            kind: IssueKind::Stability,
            detail: format!(
                "{} at path '{}': win {:.4} vs loss {:.4}",
                match s.severity {
                    Severity::Equality => "equal outcomes (throwaway candidate)",
                    Severity::Inversion => "loss worth more than win",
                },
                s.path,
                s.win_value,
                s.loss_value
            ),
        })),
        Err(ind) => issues.push(CdIssue {
            participant: who.clone(),
            match_id: tree.root.match_id().map(str::to_string),
            kind: IssueKind::Stability,
            detail: format!(
                "indeterminate: {} undecided leaves ({})",
                ind.unknown_leaves.len(),
                ind.unknown_leaves.join(", ")
            ),
        }),
    }
    for p in check_possibility_of_results(tree) {
        let lost: Vec<String> = p
            .lost_early
            .iter()
            .map(|&r| crate::bracket::ordinal(r))
            .collect();
        let detail = match p.edge {
            None => format!(
                "still playing but {} out of reach; reachable {{{}}}",
                lost.join(", "),
                p.after.join(", ")
            ),
            Some(edge) => format!(
                "{:?} at path '{}' drops {} before worse placements; {{{}}} -> {{{}}}",
                edge,
                p.path,
                lost.join(", "),
                p.before.join(", "),
                p.after.join(", ")
            ),
        };
        issues.push(CdIssue {
            participant: who.clone(),
            match_id: Some(p.match_id),
            kind: IssueKind::Possibility,
            detail,
        });
    }
}

/// Competitiveness analysis of a bracket for every entry slot.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BracketAnalysis {
    pub trees: Vec<ProgressTree>,
    pub issues: Vec<CdIssue>,
}

impl BracketAnalysis {
    pub fn passes(&self) -> bool {
        self.issues.is_empty()
    }
}

pub fn analyze_bracket(graph: &BracketGraph, prizes: &PrizeVector) -> Result<BracketAnalysis> {
    let compiled = graph.compile()?;
    prizes.check_arity(compiled.classes().len())?;
    let mut trees = Vec::with_capacity(compiled.participants());
    let mut issues = Vec::new();
    for slot in 0..compiled.participants() {
        let tree = build_tree_compiled(&compiled, slot, prizes)?;
        tree_issues(&tree, &mut issues);
        for t in detect_throwaway(&tree) {
            issues.push(CdIssue {
                participant: t.participant,
                match_id: Some(t.match_id),
                kind: IssueKind::Throwaway,
                detail: format!(
                    "win and loss both worth {:.4} with reachable {{{}}}",
                    t.value,
                    t.reachable.join(", ")
                ),
            });
        }
        trees.push(tree);
    }
    Ok(BracketAnalysis { trees, issues })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{gen_double_elim, gen_single_elim};

    fn prizes(v: &[f64]) -> PrizeVector {
        PrizeVector::new(v.to_vec()).unwrap()
    }

    #[test]
    fn se8_node_values() {
        let g = gen_single_elim(3).unwrap();
        let tree = build_tree(&g, "S1", &prizes(&[100.0, 50.0, 25.0, 10.0])).unwrap();
        assert_eq!(tree.root.stability, Some(30.0));
        assert_eq!(tree.root.descend("W").unwrap().stability, Some(50.0));
        assert_eq!(tree.root.descend("WW").unwrap().stability, Some(75.0));
        assert_eq!(
            tree.root.descend("WWW").unwrap().reachable,
            vec![PlacementClass::single(1)]
        );
        assert_eq!(tree.root.walk().count(), 7);
    }

    #[test]
    fn se2_root_is_average() {
        let g = gen_single_elim(1).unwrap();
        let tree = build_tree(&g, "S2", &prizes(&[1.0, 0.0])).unwrap();
        assert_eq!(tree.root.stability, Some(0.5));
        assert_eq!(tree.participant, "S2");
    }

    #[test]
    fn arity_and_slot_errors() {
        let g = gen_single_elim(3).unwrap();
        assert!(matches!(
            build_tree(&g, "S1", &prizes(&[3.0, 2.0, 1.0])),
            Err(Error::PrizeArity {
                expected: 4,
                got: 3
            })
        ));
        assert!(matches!(
            build_tree(&g, "X9", &prizes(&[4.0, 3.0, 2.0, 1.0])),
            Err(Error::UnknownSlot(_))
        ));
    }

    #[test]
    fn strict_prizes_pass_se_and_de() {
        let se =
            analyze_bracket(&gen_single_elim(3).unwrap(), &prizes(&[8.0, 7.0, 5.5, 2.5])).unwrap();
        assert!(se.passes(), "{:?}", se.issues);
        let de = analyze_bracket(
            &gen_double_elim(3).unwrap(),
            &prizes(&[6.0, 5.0, 4.0, 3.0, 2.0, 1.0]),
        )
        .unwrap();
        assert!(de.passes(), "{:?}", de.issues);
    }

    #[test]
    fn equal_prizes_flag_every_node() {
        let g = gen_double_elim(3).unwrap();
        let p = prizes(&[1.0; 6]);
        for slot in ["U1", "L3"] {
            let tree = build_tree(&g, slot, &p).unwrap();
            let issues = check_stability_progressing(&tree).unwrap();
            let internal = tree.root.walk().filter(|n| !n.is_leaf()).count();
            assert_eq!(issues.len(), internal);
            assert!(issues.iter().all(|i| i.severity == Severity::Equality));
        }
    }

    #[test]
    fn inversion_is_distinct_from_equality() {
        // a 3rd-place prize above 2nd gives the semi-final loser more than the final's mean
        let g = gen_single_elim(2).unwrap();
        let p = PrizeVector(vec![10.0, 0.0, 9.0]);
        let tree = build_tree(&g, "S1", &p).unwrap();
        let issues = check_stability_progressing(&tree).unwrap();
        assert_eq!(issues.len(), 1);
        assert_eq!(issues[0].severity, Severity::Inversion);
        assert_eq!(issues[0].match_id, "R1-1");
    }

    #[test]
    fn de_upper_slot_reachability() {
        let g = gen_double_elim(3).unwrap();
        let p = PrizeVector::positional(&g.placements, 8);
        let upper = build_tree(&g, "U2", &p).unwrap();
        assert_eq!(
            labels(&upper.root.reachable),
            ["1st", "2nd", "3rd", "4th", "5-6th"]
        );
        let lower = build_tree(&g, "L4", &p).unwrap();
        assert_eq!(lower.root.reachable.len(), 6);
        assert!(check_possibility_of_results(&upper).is_empty());
        assert!(check_possibility_of_results(&lower).is_empty());
    }

    #[test]
    fn possibility_flags_top_prize_lost_first() {
        // hand-built tree: the root can still reach 1st and 3rd, the win child only 3rd
        let leaf = |p: &str, r: u32, v: f64| {
            ProgressNode::leaf(p.into(), vec![PlacementClass::single(r)], Some(v))
        };
        let state = |id: &str| NodeState::Match {
            id: id.into(),
            round: 1,
            opponent: None,
        };
        let inner = ProgressNode::internal(
            state("m2"),
            "W".into(),
            leaf("WW", 2, 2.0),
            leaf("WL", 3, 1.0),
        );
        let root = ProgressNode::internal(state("m1"), String::new(), inner, leaf("L", 1, 3.0));
        let tree = ProgressTree {
            participant: "x".into(),
            root,
        };
        let issues = check_possibility_of_results(&tree);
        assert_eq!(issues.len(), 1);
        assert_eq!(issues[0].edge, Some(Outcome::Win));
        assert_eq!(issues[0].lost_early, vec![1]);
    }

    #[test]
    fn decided_rematch_is_throwaway() {
        // two players, one already 1-0 up with first place settled, replaying
        let first = || vec![PlacementClass::single(1)];
        let root = ProgressNode::internal(
            NodeState::Match {
                id: "rematch".into(),
                round: 2,
                opponent: Some("b".into()),
            },
            String::new(),
            ProgressNode::leaf("W".into(), first(), Some(1.0)),
            ProgressNode::leaf("L".into(), first(), Some(1.0)),
        );
        let tree = ProgressTree {
            participant: "a".into(),
            root,
        };
        let found = detect_throwaway(&tree);
        assert_eq!(found.len(), 1);
        assert_eq!(found[0].match_id, "rematch");
        assert_eq!(found[0].reachable, ["1st"]);
    }

    #[test]
    fn strict_se8_has_no_throwaway() {
        let g = gen_single_elim(3).unwrap();
        let tree = build_tree(&g, "S5", &prizes(&[4.0, 3.0, 2.0, 1.0])).unwrap();
        assert!(detect_throwaway(&tree).is_empty());
    }

    #[test]
    fn walk_is_preorder() {
        let g = gen_single_elim(2).unwrap();
        let tree = build_tree(&g, "S1", &PrizeVector::positional(&g.placements, 4)).unwrap();
        let paths: Vec<&str> = tree.root.walk().map(|n| n.path.as_str()).collect();
        assert_eq!(paths, ["", "W", "WW", "WL", "L"]);
    }
}
