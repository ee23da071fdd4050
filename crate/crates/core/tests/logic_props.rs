use proptest::prelude::*;
use seqteach::logic::{evaluate, parse_program, program_cognitive_cost, Builtins, Clause, DatalogProgram, Term};

fn constant() -> impl Strategy<Value = Term> {
    prop_oneof![
        "[a-z][a-z0-9_]{0,5}".prop_map(Term::constant),
        (-500i64..500).prop_map(Term::int),
        Just(Term::Epsilon),
        any::<bool>().prop_map(Term::Truth),
    ]
}

fn term() -> impl Strategy<Value = Term> {
    let leaf = prop_oneof![constant(), "[A-Z][a-z0-9]{0,3}".prop_map(Term::var)];
    leaf.prop_recursive(4, 24, 3, |inner| {
        ("[a-z][a-z_]{0,4}", prop::collection::vec(inner, 1..4)).prop_map(|(f, args)| Term::compound(f, args))
    })
}

/// Atoms over a fixed predicate table so arities always agree.
fn atom() -> impl Strategy<Value = Term> {
    (0usize..4, prop::collection::vec(term(), 3)).prop_map(|(p, args)| {
        let (name, arity) = [("p", 1), ("q", 2), ("r", 3), ("edge", 2)][p];
        Term::compound(name, args.into_iter().take(arity).collect())
    })
}

fn program() -> impl Strategy<Value = DatalogProgram> {
    prop::collection::vec((atom(), prop::collection::vec(atom(), 0..3)), 0..6)
        .prop_map(|cs| DatalogProgram::new(cs.into_iter().map(|(h, b)| Clause::new(h, b)).collect()).unwrap())
}

fn graph_program(edges: &[(u8, u8)]) -> DatalogProgram {
    let mut text: String = edges.iter().map(|(a, b)| format!("edge(n{a},n{b}).\n")).collect();
    text.push_str("edge(m,m).\npath(X,Y):-edge(X,Y).\npath(X,Y):-edge(X,Z),path(Z,Y).\n");
    parse_program(&text).unwrap()
}

proptest! {
    #[test]
    fn cost_is_positive_and_additive(t in term()) {
        prop_assert!(t.cost() >= 1);
        if let Term::Compound { args, .. } = &t {
            prop_assert_eq!(t.cost(), 1 + args.iter().map(Term::cost).sum::<u64>());
        }
    }

    #[test]
    fn print_parse_round_trip(p in program()) {
        let printed = p.to_string();
        let reparsed = parse_program(&printed).unwrap();
        prop_assert_eq!(&reparsed, &p);
        prop_assert_eq!(reparsed.to_string(), printed);
    }

    #[test]
    fn stack_cost_matches_independent_sum(
        edges in prop::collection::vec((0u8..6, 0u8..6), 0..10),
        from in 0u8..6,
        limit in 2usize..60,
    ) {
        let program = graph_program(&edges);
        let q = Term::compound("path", vec![Term::constant(format!("n{from}")), Term::var("Y")]);
        let builtins = Builtins::new();
        let ev = evaluate(&program, &q, limit, &builtins).unwrap();
        prop_assert!(ev.stack.len() <= limit);
        let mut sum = 0;
        for entry in &ev.stack.entries {
            sum += entry.cost();
        }
        prop_assert_eq!(program_cognitive_cost(&program, &q, limit, &builtins).unwrap(), sum);
        prop_assert_eq!(evaluate(&program, &q, limit, &builtins).unwrap(), ev);
    }
}
