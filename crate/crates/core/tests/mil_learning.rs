use std::time::Instant;

use seqteach::mil::{learn, merge_problem, sort_problem, MilError};

#[test]
fn learns_merger() {
    let t = Instant::now();
    let h = learn(&merge_problem(3).unwrap()).unwrap();
    eprintln!("merger in {:?}, {:?}", t.elapsed(), h.stats);
    assert_eq!(
        h.rules(),
        "merger(A,B):-parse_exprs(A,C),merger_1(C,B).\n\
         merger_1(A,B):-compare_nums(A,C),merger_1(C,B).\n\
         merger_1(A,B):-compare_nums(A,C),drop_bag_remaining(C,B).\n"
    );
}

#[test]
fn learns_sorter_with_merger() {
    let t = Instant::now();
    let h = learn(&sort_problem(true, 3).unwrap()).unwrap();
    eprintln!("sorter in {:?}, {:?}", t.elapsed(), h.stats);
    assert_eq!(
        h.rules(),
        "sorter(A,B):-merger(A,C),sorter(C,B).\n\
         sorter(A,B):-recycle_memory(A,C),sorter(C,B).\n\
         sorter(A,B):-single_expr(A,C),single_expr(C,B).\n"
    );
}

#[test]
fn flat_sorter_needs_five_clauses() {
    let t = Instant::now();
    let err = learn(&sort_problem(false, 4).unwrap()).unwrap_err();
    eprintln!("flat n=4 in {:?}", t.elapsed());
    assert_eq!(
        err,
        MilError::NoHypothesis {
            max_clauses: 4,
            budget_exhausted: false
        }
    );
    let t = Instant::now();
    let h = learn(&sort_problem(false, 5).unwrap()).unwrap();
    eprintln!("flat n=5 in {:?}, {:?}", t.elapsed(), h.stats);
    assert_eq!(
        h.rules(),
        "sorter(A,B):-parse_exprs(A,C),sorter(C,B).\n\
         sorter(A,B):-compare_nums(A,C),sorter(C,B).\n\
         sorter(A,B):-drop_bag_remaining(A,C),sorter(C,B).\n\
         sorter(A,B):-recycle_memory(A,C),sorter(C,B).\n\
         sorter(A,B):-single_expr(A,C),single_expr(C,B).\n"
    );
}

use std::sync::Arc;

use seqteach::logic::{parse_program, DEFAULT_STACK_LIMIT};
use seqteach::mil::{energy_resource, iterative_descent, Background, Example, Hypothesis, MilProblem};
use seqteach::robot::{run_predicate, run_sort, LtExpr, WorldState, MERGER_RULES};

/// Sorts every expression in one step, paying one unit of set-up plus one
/// per pair.
fn insert_all(s: &WorldState) -> Option<WorldState> {
    if s.exprs.len() < 2 || !s.memory.is_empty() || !s.left_bag.is_empty() || !s.right_bag.is_empty() {
        return None;
    }
    let mut values = s.flatten();
    values.sort_unstable();
    let n = values.len() as u64;
    Some(WorldState {
        exprs: vec![LtExpr::new(values).ok()?],
        energy: s.energy + 1 + n * (n - 1) / 2,
        ..WorldState::default()
    })
}

fn with_insertion(max_clauses: usize) -> MilProblem {
    let mut p = sort_problem(true, max_clauses).unwrap();
    p.background.insert(
        1,
        Background::Custom {
            name: "insert_all".into(),
            action: Arc::new(insert_all),
        },
    );
    p
}

#[test]
fn descent_prefers_cheaper_sorter() {
    let p = with_insertion(3);
    let small = learn(&p).unwrap();
    assert_eq!(
        small.rules(),
        "sorter(A,B):-insert_all(A,C),single_expr(C,B).\n\
         sorter(A,B):-single_expr(A,C),single_expr(C,B).\n"
    );
    let cheap = iterative_descent(&p, &energy_resource).unwrap();
    assert!(!cheap.rules().contains("insert_all"), "{}", cheap.rules());
    // independent energy count by executing the returned rules
    let program = parse_program(&format!("{}{MERGER_RULES}", cheap.rules())).unwrap();
    let executed: u64 = p
        .positives
        .iter()
        .map(|e| {
            let run = run_predicate(&program, "sorter", &e.input, None, DEFAULT_STACK_LIMIT).unwrap();
            run.final_state.energy - e.input.energy
        })
        .sum();
    assert_eq!(cheap.resource_cost, executed);
    let merge_sort: u64 = p
        .positives
        .iter()
        .map(|e| run_sort(&e.input).unwrap().final_state.energy - e.input.energy)
        .sum();
    assert!(cheap.resource_cost <= merge_sort);
    let by_hand: u64 = p
        .positives
        .iter()
        .filter_map(|e| insert_all(&e.input))
        .map(|s| s.energy)
        .sum();
    assert_eq!(small.resource_cost, by_hand);
    assert!(cheap.resource_cost < small.resource_cost);
}

#[test]
fn descent_matches_learn_when_costs_tie() {
    let p = merge_problem(3).unwrap();
    let a = learn(&p).unwrap();
    let b = iterative_descent(&p, &energy_resource).unwrap();
    assert_eq!(a.rules(), b.rules());
}

#[test]
fn empty_positives_are_rejected() {
    let mut p = merge_problem(3).unwrap();
    p.positives.clear();
    assert!(matches!(learn(&p), Err(MilError::NoHypothesis { .. })));
    assert!(matches!(
        iterative_descent(&p, &energy_resource),
        Err(MilError::NoHypothesis { .. })
    ));
}

#[test]
fn overlapping_examples_are_invalid() {
    let mut p = merge_problem(3).unwrap();
    let e = p.positives[0].clone();
    p.negatives.push(Example {
        input: e.input,
        output: e.output,
    });
    assert!(matches!(learn(&p), Err(MilError::InvalidProblem(_))));
}

#[test]
fn budget_exhaustion_is_flagged() {
    let mut p = sort_problem(false, 5).unwrap();
    p.budget.candidates = 10;
    assert_eq!(
        learn(&p).unwrap_err(),
        MilError::NoHypothesis {
            max_clauses: 5,
            budget_exhausted: true
        }
    );
}

fn recheck(h: &Hypothesis, p: &MilProblem, extra_rules: &str) {
    let program = parse_program(&format!("{}{}", h.rules(), extra_rules)).unwrap();
    for e in &p.positives {
        let run = run_predicate(&program, &p.target, &e.input, None, DEFAULT_STACK_LIMIT).unwrap();
        assert!(run.final_state.same_layout(&e.output), "{} on {}", p.target, e.input);
    }
    for e in &p.negatives {
        if let Ok(run) = run_predicate(&program, &p.target, &e.input, None, DEFAULT_STACK_LIMIT) {
            assert!(!run.final_state.same_layout(&e.output));
        }
    }
}

#[test]
fn hypotheses_recheck_through_robot_world() {
    let p = merge_problem(3).unwrap();
    recheck(&learn(&p).unwrap(), &p, "");
    let p = sort_problem(true, 3).unwrap();
    recheck(&learn(&p).unwrap(), &p, MERGER_RULES);
    let p = sort_problem(false, 5).unwrap();
    recheck(&learn(&p).unwrap(), &p, "");
}

#[test]
fn candidate_counts_stay_within_space_bound() {
    for (p, symbols) in [
        (merge_problem(3).unwrap(), 5 + 2),
        (sort_problem(true, 3).unwrap(), 6 + 2),
        (sort_problem(false, 5).unwrap(), 5 + 2),
    ] {
        let h = learn(&p).unwrap();
        let m = p.meta_rules.len() as u128;
        for (k, &count) in h.stats.programs_by_size.iter().enumerate() {
            let bound = m.pow(k as u32) * (symbols as u128).pow(3 * k as u32);
            assert!(count as u128 <= bound, "size {k}: {count} > {bound}");
        }
    }
}
