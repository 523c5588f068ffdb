mod common;

use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use tourney_analysis::bracket::{BracketGraph, Format, Outcome, PrizeVector};
use tourney_analysis::generators::{
    gen_double_elim, gen_double_elim_with, gen_round_robin, gen_single_elim, DropWiring,
};
use tourney_analysis::precision::{
    enumerate_all, percent, tally_from_csv, tally_to_csv, Constraint,
};
use tourney_analysis::progress::{
    analyze_bracket, build_tree_compiled, check_stability_progressing, rr_progress, ProgressNode,
    Standings,
};

fn prizes(k: usize) -> impl Strategy<Value = PrizeVector> {
    prop::collection::vec(-1e4f64..1e4, k).prop_map(|mut v| {
        v.sort_by(|a, b| b.partial_cmp(a).unwrap());
        PrizeVector::new(v).unwrap()
    })
}

fn bracket() -> impl Strategy<Value = BracketGraph> {
    prop_oneof![
        (1u32..=4).prop_map(|i| gen_single_elim(i).unwrap()),
        (2u32..=4).prop_map(|i| gen_double_elim(i).unwrap()),
    ]
}

/// Sum of leaf prizes weighted by 2^-depth below `node`.
fn weighted_leaves(node: &ProgressNode, weight: f64) -> f64 {
    match (&node.win, &node.loss) {
        (Some(w), Some(l)) => weighted_leaves(w, weight / 2.0) + weighted_leaves(l, weight / 2.0),
        _ => weight * node.stability.unwrap(),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn generated_brackets_validate(g in bracket()) {
        prop_assert!(g.validate().is_ok());
        let back = BracketGraph::from_json(&g.to_json().unwrap()).unwrap();
        prop_assert_eq!(back, g);
    }

    #[test]
    fn stability_is_an_average(g in bracket(), seed in any::<u64>()) {
        let k = g.placements.len();
        let mut rng = StdRng::seed_from_u64(seed);
        let mut v: Vec<f64> = (0..k).map(|_| rng.gen_range(0.0..100.0)).collect();
        v.sort_by(|a, b| b.partial_cmp(a).unwrap());
        let p = PrizeVector::new(v).unwrap();
        let compiled = g.compile().unwrap();
        for slot in 0..compiled.participants() {
            let tree = build_tree_compiled(&compiled, slot, &p).unwrap();
            let root = tree.root.stability.unwrap();
            prop_assert!((root - weighted_leaves(&tree.root, 1.0)).abs() <= 1e-9 * (1.0 + root.abs()));
            for node in tree.root.walk() {
                if let (Some(w), Some(l)) = (&node.win, &node.loss) {
                    let (a, b) = (w.stability.unwrap(), l.stability.unwrap());
                    let s = node.stability.unwrap();
                    prop_assert!(s >= a.min(b) - 1e-9 && s <= a.max(b) + 1e-9);
                }
            }
        }
    }

    #[test]
    fn reachable_sets_are_sound(g in bracket(), seed in any::<u64>()) {
        // random results: each match's first entrant wins with probability 1/2
        let compiled = g.compile().unwrap();
        let n = compiled.participants();
        let p = PrizeVector::positional(compiled.classes(), n as u32);
        let trees: Vec<_> = (0..n).map(|s| build_tree_compiled(&compiled, s, &p).unwrap()).collect();
        let mut rng = StdRng::seed_from_u64(seed);
        for _ in 0..16 {
            let mut outcome = vec![Vec::new(); n];
            let mut placed = vec![0; n];
            compiled.play(
                |m, a, b| {
                    let first = rng.gen::<bool>();
                    outcome[a].push((compiled.match_id(m).to_string(), if first { Outcome::Win } else { Outcome::Loss }));
                    outcome[b].push((compiled.match_id(m).to_string(), if first { Outcome::Loss } else { Outcome::Win }));
                    first
                },
                &mut placed,
            );
            for slot in 0..n {
                let class = &compiled.classes()[placed[slot]];
                let mut node = &trees[slot].root;
                prop_assert!(node.reachable.contains(class));
                for (id, o) in &outcome[slot] {
                    prop_assert_eq!(node.match_id(), Some(id.as_str()));
                    node = node.child(*o).unwrap();
                    prop_assert!(node.reachable.contains(class));
                }
                prop_assert!(node.is_leaf());
                prop_assert_eq!(&node.reachable, &vec![class.clone()]);
            }
        }
    }

    #[test]
    fn strictly_decreasing_prizes_never_flag_elimination(p4 in prizes(4), p6 in prizes(6)) {
        prop_assume!(p4.values().windows(2).all(|w| w[0] > w[1]));
        prop_assume!(p6.values().windows(2).all(|w| w[0] > w[1]));
        prop_assert!(analyze_bracket(&gen_single_elim(3).unwrap(), &p4).unwrap().passes());
        prop_assert!(analyze_bracket(&gen_double_elim(3).unwrap(), &p6).unwrap().passes());
    }

    #[test]
    fn equal_prizes_break_every_match(x in -100.0f64..100.0) {
        let g = gen_single_elim(2).unwrap();
        let p = PrizeVector::new(vec![x; 3]).unwrap();
        let tree = build_tree_compiled(&g.compile().unwrap(), 0, &p).unwrap();
        let issues = check_stability_progressing(&tree).unwrap();
        prop_assert_eq!(issues.len(), 2);
    }

    #[test]
    fn prize_vectors_must_not_increase(v in prop::collection::vec(-10.0f64..10.0, 2..8)) {
        let ok = v.windows(2).all(|w| w[0] >= w[1]);
        prop_assert_eq!(PrizeVector::new(v).is_ok(), ok);
    }

    #[test]
    fn percent_rounds_half_up(count in 0u64..1000, extra in 0u64..1000) {
        let total = count + extra + 1;
        let exact = 100.0 * count as f64 / total as f64;
        let p = percent(count, total) as f64;
        prop_assert!((p - exact).abs() <= 0.5 + 1e-12);
        prop_assert!(p >= (exact - 0.5).ceil() - 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn tallies_survive_csv(i in 1u32..=3, de in any::<bool>()) {
        let g = if de && i >= 2 { gen_double_elim(i).unwrap() } else { gen_single_elim(i).unwrap() };
        let t = enumerate_all(&Format::Bracket(g), &Constraint::None).unwrap();
        t.check_sums().unwrap();
        prop_assert_eq!(tally_from_csv(&tally_to_csv(&t).unwrap()).unwrap(), t);
    }

    #[test]
    fn custom_drop_wiring_is_valid(perm in Just(vec![0usize, 1, 2, 3]).prop_shuffle(), perm2 in Just(vec![0usize, 1]).prop_shuffle()) {
        let g = gen_double_elim_with(4, &DropWiring::Custom(vec![perm, perm2, vec![0]])).unwrap();
        prop_assert!(g.validate().is_ok());
        prop_assert_eq!(g.matches.len(), gen_double_elim(4).unwrap().matches.len());
    }

    #[test]
    fn rr_matches_oracle(n in prop_oneof![Just(4usize), Just(6)], seed in any::<u64>()) {
        let schedule = gen_round_robin(n).unwrap();
        let names: Vec<String> = (0..n).map(|i| format!("p{i}")).collect();
        // leave at most ten matches so the quadratic oracle stays quick
        let played = schedule.rounds.len().saturating_sub(10 / (n / 2));
        let mut rng = StdRng::seed_from_u64(seed);
        let st = Standings::after_rounds(&schedule, &names, played, |_, _| rng.gen()).unwrap();
        let per_rank = PrizeVector::new((1..=n).rev().map(|x| x as f64).collect()).unwrap();
        let report = rr_progress(&st, &per_rank).unwrap();
        let oracle = common::rr_oracle(&st);
        for p in &report.participants {
            let got: std::collections::BTreeSet<(u32, u32)> =
                p.reachable.iter().map(|c| (c.rank_lo, c.rank_hi)).collect();
            prop_assert_eq!(&got, &oracle.reachable[&p.name]);
        }
        prop_assert_eq!(report.throwaways.len(), oracle.indifferent.len());
    }
}
