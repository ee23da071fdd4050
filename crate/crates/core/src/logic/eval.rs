//! Depth-first, left-to-right resolution that records every selected goal.
//!
//! The recorded stack is what the cognitive cost is summed over: one entry
//! for each selected goal (with the bindings current at selection time), one
//! extra entry for the solved instance of each built-in action, and a final
//! `⊤` or `⊥`. Re-trying another clause for the same goal after backtracking
//! does not add a second entry for that goal.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::rc::Rc;
use std::sync::Arc;

use super::program::DatalogProgram;
use super::term::Term;
use super::LogicError;

/// Stack bound used when the caller does not supply one.
pub const DEFAULT_STACK_LIMIT: usize = 10_000;

/// A deterministic built-in: receives the call arguments with current
/// bindings applied and returns the solved arguments, or `None` on failure.
pub type BuiltinFn = dyn Fn(&[Term]) -> Option<Vec<Term>> + Send + Sync;

#[derive(Clone, Default)]
pub struct Builtins {
    table: BTreeMap<(String, usize), Arc<BuiltinFn>>,
}

impl Builtins {
    pub fn new() -> Builtins {
        Builtins::default()
    }

    pub fn register<F>(&mut self, symbol: impl Into<String>, arity: usize, f: F)
    where
        F: Fn(&[Term]) -> Option<Vec<Term>> + Send + Sync + 'static,
    {
        self.table.insert((symbol.into(), arity), Arc::new(f));
    }

    pub fn contains(&self, symbol: &str, arity: usize) -> bool {
        self.table.contains_key(&(symbol.to_string(), arity))
    }

    fn get(&self, symbol: &str, arity: usize) -> Option<&Arc<BuiltinFn>> {
        self.table.get(&(symbol.to_string(), arity))
    }
}

impl fmt::Debug for Builtins {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.table.keys()).finish()
    }
}

/// The terms evaluated while answering one query, bounded by `limit`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExecutionStack {
    pub entries: Vec<Term>,
    pub limit: usize,
}

impl ExecutionStack {
    pub fn costs(&self) -> Vec<u64> {
        self.entries.iter().map(Term::cost).collect()
    }

    pub fn total_cost(&self) -> u64 {
        self.entries.iter().map(Term::cost).sum()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Outcome {
    /// Bindings for the query's variables.
    Answer(BTreeMap<String, Term>),
    /// Every derivation failed.
    NoAnswer,
    /// The stack bound was reached before an answer was found.
    BoundReached,
}

impl Outcome {
    pub fn is_answer(&self) -> bool {
        matches!(self, Outcome::Answer(_))
    }
}

/// One successful built-in call on the final derivation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BuiltinCall {
    pub symbol: String,
    pub call: Term,
    pub solved: Term,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Evaluation {
    pub outcome: Outcome,
    pub stack: ExecutionStack,
    /// Built-in calls along the derivation that produced the answer (or the
    /// last derivation explored when there is none).
    pub derivation: Vec<BuiltinCall>,
}

type Goals = Option<Rc<GoalNode>>;

struct GoalNode {
    goal: Term,
    next: Goals,
}

fn cons(goal: Term, next: Goals) -> Goals {
    Some(Rc::new(GoalNode { goal, next }))
}

#[derive(Clone, Default)]
struct Subst(HashMap<String, Term>);

impl Subst {
    fn walk<'a>(&'a self, t: &'a Term) -> &'a Term {
        let mut cur = t;
        while let Term::Var(v) = cur {
            match self.0.get(v) {
                Some(next) => cur = next,
                None => break,
            }
        }
        cur
    }

    fn apply(&self, t: &Term) -> Term {
        match self.walk(t) {
            Term::Compound { functor, args } => Term::Compound {
                functor: functor.clone(),
                args: args.iter().map(|a| self.apply(a)).collect(),
            },
            other => other.clone(),
        }
    }

    fn unify(&mut self, a: &Term, b: &Term) -> bool {
        let a = self.walk(a).clone();
        let b = self.walk(b).clone();
        match (&a, &b) {
            (Term::Var(x), Term::Var(y)) if x == y => true,
            (Term::Var(x), _) => {
                self.0.insert(x.clone(), b);
                true
            }
            (_, Term::Var(y)) => {
                self.0.insert(y.clone(), a);
                true
            }
            (Term::Compound { functor: f, args: xs }, Term::Compound { functor: g, args: ys }) => {
                f == g && xs.len() == ys.len() && xs.iter().zip(ys).all(|(x, y)| self.unify(x, y))
            }
            _ => a == b,
        }
    }
}

fn rename(t: &Term, tag: usize) -> Term {
    match t {
        Term::Var(v) => Term::Var(format!("_{tag}_{v}")),
        Term::Compound { functor, args } => Term::Compound {
            functor: functor.clone(),
            args: args.iter().map(|a| rename(a, tag)).collect(),
        },
        other => other.clone(),
    }
}

struct Choice {
    goal: Term,
    rest: Goals,
    subst: Subst,
    next_clause: usize,
    path_len: usize,
}

struct Halt;

struct Machine<'a> {
    program: &'a DatalogProgram,
    builtins: &'a Builtins,
    limit: usize,
    entries: Vec<Term>,
    path: Vec<BuiltinCall>,
    choices: Vec<Choice>,
    fresh: usize,
}

impl Machine<'_> {
    fn record(&mut self, t: Term) -> Result<(), Halt> {
        // one slot is always kept free for the terminal ⊤/⊥
        if self.entries.len() + 1 >= self.limit {
            return Err(Halt);
        }
        self.entries.push(t);
        Ok(())
    }

    /// Resolves `goal` against clauses from `start`, leaving a choice point
    /// when later clauses could also match.
    fn resolve(&mut self, goal: &Term, rest: &Goals, subst: &Subst, start: usize) -> Option<(Goals, Subst)> {
        let (sym, arity) = goal.predicate()?;
        let clauses = self.program.clauses();
        let matching = |i: usize| clauses[i].head.predicate() == Some((sym, arity));
        let mut i = start;
        while i < clauses.len() {
            if matching(i) {
                self.fresh += 1;
                let tag = self.fresh;
                let head = rename(&clauses[i].head, tag);
                let mut s = subst.clone();
                if s.unify(goal, &head) {
                    if (i + 1..clauses.len()).any(matching) {
                        self.choices.push(Choice {
                            goal: goal.clone(),
                            rest: rest.clone(),
                            subst: subst.clone(),
                            next_clause: i + 1,
                            path_len: self.path.len(),
                        });
                    }
                    let mut goals = rest.clone();
                    for b in clauses[i].body.iter().rev() {
                        goals = cons(rename(b, tag), goals);
                    }
                    return Some((goals, s));
                }
            }
            i += 1;
        }
        None
    }

    fn backtrack(&mut self) -> Option<(Goals, Subst)> {
        while let Some(choice) = self.choices.pop() {
            self.path.truncate(choice.path_len);
            if let Some(next) = self.resolve(&choice.goal, &choice.rest, &choice.subst, choice.next_clause) {
                return Some(next);
            }
        }
        None
    }

    fn run(&mut self, query: &Term) -> Result<Option<Subst>, Halt> {
        let mut goals = cons(query.clone(), None);
        let mut subst = Subst::default();
        loop {
            let Some(node) = goals.clone() else {
                return Ok(Some(subst));
            };
            let goal = subst.apply(&node.goal);
            self.record(goal.clone())?;
            let (sym, arity) = goal.predicate().expect("goals are atoms");
            let step = if let Some(f) = self.builtins.get(sym, arity) {
                let solved = f(goal.args()).and_then(|out| {
                    let mut s = subst.clone();
                    let ok = out.len() == arity && goal.args().iter().zip(&out).all(|(a, b)| s.unify(a, b));
                    ok.then_some(s)
                });
                match solved {
                    Some(s) => {
                        let solved = s.apply(&goal);
                        self.record(solved.clone())?;
                        self.path.push(BuiltinCall {
                            symbol: sym.to_string(),
                            call: goal,
                            solved,
                        });
                        Some((node.next.clone(), s))
                    }
                    None => None,
                }
            } else {
                self.resolve(&goal, &node.next, &subst, 0)
            };
            match step.or_else(|| self.backtrack()) {
                Some((g, s)) => {
                    goals = g;
                    subst = s;
                }
                None => return Ok(None),
            }
        }
    }
}

/// Answers `query` against `program`, recording the execution stack.
///
/// Evaluation stops with [`Outcome::BoundReached`] when the next entry would
/// leave no room for the terminal value inside `limit`.
pub fn evaluate(
    program: &DatalogProgram,
    query: &Term,
    limit: usize,
    builtins: &Builtins,
) -> Result<Evaluation, LogicError> {
    if query.predicate().is_none() {
        return Err(LogicError::NotAnAtom(query.to_string()));
    }
    for (sym, arity) in program.undefined_body_predicates() {
        if !builtins.contains(&sym, arity) {
            return Err(LogicError::UnknownPredicate { symbol: sym, arity });
        }
    }
    if limit < 2 {
        return Err(LogicError::StackLimitExceeded {
            partial: ExecutionStack {
                entries: std::iter::once(query.clone()).take(limit).collect(),
                limit,
            },
        });
    }
    let mut m = Machine {
        program,
        builtins,
        limit,
        entries: Vec::new(),
        path: Vec::new(),
        choices: Vec::new(),
        fresh: 0,
    };
    let outcome = match m.run(query) {
        Ok(Some(subst)) => {
            let mut vars = Vec::new();
            query.variables(&mut vars);
            let bindings = vars
                .into_iter()
                .map(|v| {
                    let value = subst.apply(&Term::Var(v.clone()));
                    (v, value)
                })
                .collect();
            Outcome::Answer(bindings)
        }
        Ok(None) => Outcome::NoAnswer,
        Err(Halt) => Outcome::BoundReached,
    };
    let mut entries = m.entries;
    entries.push(if outcome.is_answer() {
        Term::top()
    } else {
        Term::bottom()
    });
    Ok(Evaluation {
        outcome,
        stack: ExecutionStack { entries, limit },
        derivation: m.path,
    })
}

/// Sum of the costs of every stack entry produced by [`evaluate`].
pub fn program_cognitive_cost(
    program: &DatalogProgram,
    query: &Term,
    limit: usize,
    builtins: &Builtins,
) -> Result<u64, LogicError> {
    Ok(evaluate(program, query, limit, builtins)?.stack.total_cost())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::{parse_atom, parse_program};

    fn family() -> DatalogProgram {
        parse_program(
            "parent(ann,dan).\nparent(ann,bob).\nparent(bob,cid).\n\
             grand(X,Z):-parent(X,Y),parent(Y,Z).",
        )
        .unwrap()
    }

    #[test]
    fn answers_with_bindings() {
        let q = parse_atom("grand(ann,W)").unwrap();
        let ev = evaluate(&family(), &q, 100, &Builtins::new()).unwrap();
        match &ev.outcome {
            Outcome::Answer(b) => assert_eq!(b["W"], Term::constant("cid")),
            o => panic!("{o:?}"),
        }
        assert_eq!(ev.stack.entries.last(), Some(&Term::top()));
    }

    #[test]
    fn backtracking_does_not_duplicate_goal_entry() {
        // parent(ann,Y) is retried on backtracking but recorded once
        let q = parse_atom("grand(ann,W)").unwrap();
        let ev = evaluate(&family(), &q, 100, &Builtins::new()).unwrap();
        let shown: Vec<String> = ev.stack.entries.iter().map(|t| t.to_string()).collect();
        assert_eq!(
            shown,
            [
                "grand(ann,W)",
                "parent(ann,_1_Y)",
                "parent(dan,_1_Z)",
                "parent(bob,_1_Z)",
                "⊤"
            ]
        );
    }

    #[test]
    fn no_matching_clause_fails_immediately() {
        let q = parse_atom("parent(cid,X)").unwrap();
        let ev = evaluate(&family(), &q, 100, &Builtins::new()).unwrap();
        assert_eq!(ev.outcome, Outcome::NoAnswer);
        assert_eq!(ev.stack.entries, vec![q.clone(), Term::bottom()]);
    }

    #[test]
    fn zero_clause_program_costs_query_plus_one() {
        let q = parse_atom("p(a,B)").unwrap();
        let empty = DatalogProgram::default();
        let cost = program_cognitive_cost(&empty, &q, 10, &Builtins::new()).unwrap();
        assert_eq!(cost, q.cost() + 1);
    }

    #[test]
    fn limit_one_is_rejected() {
        let q = parse_atom("grand(ann,W)").unwrap();
        let err = evaluate(&family(), &q, 1, &Builtins::new()).unwrap_err();
        assert!(matches!(err, LogicError::StackLimitExceeded { .. }));
    }

    #[test]
    fn bound_truncates_with_bottom() {
        let q = parse_atom("grand(ann,W)").unwrap();
        let ev = evaluate(&family(), &q, 3, &Builtins::new()).unwrap();
        assert_eq!(ev.outcome, Outcome::BoundReached);
        assert_eq!(ev.stack.len(), 3);
        assert_eq!(ev.stack.entries[2], Term::bottom());
    }

    #[test]
    fn unknown_body_predicate() {
        let p = parse_program("p(X):-q(X).").unwrap();
        let q = parse_atom("p(a)").unwrap();
        let err = evaluate(&p, &q, 10, &Builtins::new()).unwrap_err();
        assert!(matches!(err, LogicError::UnknownPredicate { .. }));
    }

    #[test]
    fn builtin_records_call_and_solution() {
        let mut b = Builtins::new();
        b.register("succ", 2, |args: &[Term]| {
            let n = args[0].as_int()?;
            Some(vec![args[0].clone(), Term::int(n + 1)])
        });
        let p = parse_program("two(X,Z):-succ(X,Y),succ(Y,Z).").unwrap();
        let q = parse_atom("two(5,R)").unwrap();
        let ev = evaluate(&p, &q, 100, &b).unwrap();
        match &ev.outcome {
            Outcome::Answer(bind) => assert_eq!(bind["R"], Term::int(7)),
            o => panic!("{o:?}"),
        }
        assert_eq!(ev.derivation.len(), 2);
        assert_eq!(ev.stack.len(), 6);
        assert_eq!(ev.stack.entries[2].to_string(), "succ(5,6)");
    }
}
