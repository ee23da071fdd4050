use std::collections::hash_map::DefaultHasher;
use std::collections::{HashMap, HashSet};
use std::hash::{Hash, Hasher};
use std::rc::Rc;
use std::time::{Duration, Instant};

use super::{Background, CustomAction, Example, Hypothesis, MetaRule, MilError, MilProblem};
use crate::logic::{Clause, DatalogProgram, Term};
use crate::robot::{apply_action, sortedness, CompositeAction, WorldState, SORTEDNESS_TOLERANCE};

#[derive(Clone)]
enum Kind {
    Action(CompositeAction),
    Custom(CustomAction),
    Fixed,
    Target,
    Invented,
}

struct Sym {
    name: String,
    kind: Kind,
    rank: u32,
    usable: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
struct MetaClause {
    head: usize,
    rule: MetaRule,
    q: usize,
    r: usize,
}

/// Symbols and fixed clauses for one problem.
struct Space {
    syms: Vec<Sym>,
    fixed: Vec<MetaClause>,
    target: usize,
    meta_rules: Vec<MetaRule>,
    top_rank: u32,
}

fn meta_clause_of(clause: &Clause, index: &HashMap<String, usize>) -> Option<MetaClause> {
    let (Some((p, 2)), [q_atom, r_atom]) = (clause.head.predicate(), &clause.body[..]) else {
        return None;
    };
    let (Some((q, 2)), Some((r, 2))) = (q_atom.predicate(), r_atom.predicate()) else {
        return None;
    };
    let [a, b] = clause.head.args() else { return None };
    let [qa, c] = q_atom.args() else { return None };
    let [c2, rb] = r_atom.args() else { return None };
    let vars_ok = matches!((a, b, c), (Term::Var(x), Term::Var(y), Term::Var(z)) if x != y && y != z && x != z);
    if !vars_ok || qa != a || c2 != c || rb != b {
        return None;
    }
    let head = index[p];
    Some(MetaClause {
        head,
        rule: if r == p { MetaRule::Tailrec } else { MetaRule::Chain },
        q: index[q],
        r: index[r],
    })
}

impl Space {
    fn new(problem: &MilProblem) -> Result<Space, MilError> {
        let mut syms: Vec<Sym> = Vec::new();
        let mut index: HashMap<String, usize> = HashMap::new();
        fn add(
            syms: &mut Vec<Sym>,
            index: &mut HashMap<String, usize>,
            name: &str,
            kind: Kind,
            rank: u32,
            usable: bool,
        ) -> Result<(), MilError> {
            if index.contains_key(name) {
                return Err(MilError::InvalidProblem(format!("predicate {name} declared twice")));
            }
            index.insert(name.to_string(), syms.len());
            syms.push(Sym {
                name: name.to_string(),
                kind,
                rank,
                usable,
            });
            Ok(())
        }
        let mut defined = Vec::new();
        for b in &problem.background {
            let kind = match b {
                Background::Action(a) => Kind::Action(*a),
                Background::Custom { action, .. } => Kind::Custom(action.clone()),
                Background::Defined { program, .. } => {
                    defined.push(program);
                    Kind::Fixed
                }
            };
            add(&mut syms, &mut index, b.name(), kind, 0, true)?;
        }
        let n_inv = problem.invented.len() as u32;
        for (i, name) in problem.invented.iter().enumerate() {
            add(&mut syms, &mut index, name, Kind::Invented, n_inv - i as u32, true)?;
        }
        let top_rank = n_inv + 1;
        let target = syms.len();
        add(&mut syms, &mut index, &problem.target, Kind::Target, top_rank, true)?;

        // helper predicates of defined background are callable but not
        // available to hypotheses
        for program in &defined {
            for (sym, arity) in program.predicates() {
                if index.contains_key(sym) {
                    continue;
                }
                if *arity != 2 {
                    return Err(MilError::InvalidProblem(format!("{sym}/{arity} is not dyadic")));
                }
                let kind = if program.is_defined(sym, 2) {
                    Kind::Fixed
                } else if let Some(a) = CompositeAction::from_name(sym) {
                    Kind::Action(a)
                } else {
                    return Err(MilError::InvalidProblem(format!("unknown predicate {sym}")));
                };
                add(&mut syms, &mut index, sym, kind, 0, false)?;
            }
        }
        let mut fixed = Vec::new();
        for program in &defined {
            for clause in program.clauses() {
                let mc = meta_clause_of(clause, &index)
                    .ok_or_else(|| MilError::InvalidProblem(format!("clause {clause} does not fit a meta-rule")))?;
                if !matches!(syms[mc.head].kind, Kind::Fixed) {
                    return Err(MilError::InvalidProblem(format!(
                        "clause {clause} redefines a predicate"
                    )));
                }
                fixed.push(mc);
            }
        }
        Ok(Space {
            syms,
            fixed,
            target,
            meta_rules: problem.meta_rules.clone(),
            top_rank,
        })
    }

    fn exec_key(&self, c: &MetaClause) -> (u32, u8, usize, usize) {
        let rule = match c.rule {
            MetaRule::Tailrec => 0,
            MetaRule::Chain => 1,
        };
        (self.top_rank - self.syms[c.head].rank, rule, c.q, c.r)
    }

    fn select_key(&self, c: &MetaClause) -> (u32, u8, usize, usize) {
        match c.rule {
            MetaRule::Chain => (self.top_rank - self.syms[c.head].rank, 0, c.q, c.r),
            MetaRule::Tailrec => (self.top_rank - self.syms[c.head].rank, 1, c.q, 0),
        }
    }

    fn program_key(&self, prog: &[MetaClause]) -> (usize, Vec<(u32, u8, usize, usize)>) {
        let mut keys: Vec<_> = prog.iter().map(|c| self.select_key(c)).collect();
        keys.sort();
        (prog.len(), keys)
    }

    /// Clauses a hypothesis may add for `head`, respecting the predicate order.
    fn new_clauses(&self, head: usize) -> Vec<MetaClause> {
        let rank = self.syms[head].rank;
        let lower: Vec<usize> = (0..self.syms.len())
            .filter(|&i| self.syms[i].usable && self.syms[i].rank < rank)
            .collect();
        let mut out = Vec::new();
        for rule in [MetaRule::Tailrec, MetaRule::Chain] {
            if !self.meta_rules.contains(&rule) {
                continue;
            }
            for &q in &lower {
                match rule {
                    MetaRule::Tailrec => out.push(MetaClause { head, rule, q, r: head }),
                    MetaRule::Chain => out.extend(lower.iter().map(|&r| MetaClause { head, rule, q, r })),
                }
            }
        }
        out
    }

    fn to_program(&self, prog: &[MetaClause]) -> DatalogProgram {
        let mut sorted = prog.to_vec();
        sorted.sort_by_key(|c| self.exec_key(c));
        let atom =
            |s: usize, a: &str, b: &str| Term::compound(self.syms[s].name.clone(), vec![Term::var(a), Term::var(b)]);
        let clauses = sorted
            .iter()
            .map(|c| Clause::new(atom(c.head, "A", "B"), vec![atom(c.q, "A", "C"), atom(c.r, "C", "B")]))
            .collect();
        DatalogProgram::new(clauses).expect("meta-rule instances are well formed")
    }
}

type Progress = (f64, i64, i64, i64);

fn progress(s: &WorldState) -> Progress {
    let rho = sortedness(s).unwrap_or(1.0);
    let bag = (s.left_bag.len() + s.right_bag.len()) as i64;
    (
        rho,
        -((s.exprs.len() + s.memory.len()) as i64),
        -bag,
        -(s.memory.len() as i64),
    )
}

/// Term order for recursion: `z` must be strictly further along than `x`.
fn progress_gt(z: &WorldState, x: &WorldState) -> bool {
    let (a, b) = (progress(z), progress(x));
    if a.0 > b.0 + SORTEDNESS_TOLERANCE {
        return true;
    }
    if a.0 < b.0 - SORTEDNESS_TOLERANCE {
        return false;
    }
    (a.1, a.2, a.3) > (b.1, b.2, b.3)
}

fn normalized(mut s: WorldState) -> WorldState {
    s.energy = 0;
    s
}

enum Item {
    Call(usize),
    Guard(Rc<WorldState>),
}

struct Node {
    item: Item,
    next: Items,
}

type Items = Option<Rc<Node>>;

fn cons(item: Item, next: Items) -> Items {
    Some(Rc::new(Node { item, next }))
}

fn expand(c: &MetaClause, x: &WorldState, rest: Items) -> Items {
    match c.rule {
        MetaRule::Chain => cons(Item::Call(c.q), cons(Item::Call(c.r), rest)),
        MetaRule::Tailrec => cons(
            Item::Call(c.q),
            cons(Item::Guard(Rc::new(x.clone())), cons(Item::Call(c.head), rest)),
        ),
    }
}

/// Counters from one search, used to check the hypothesis-space bound.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CandidateStats {
    /// Clause additions tried.
    pub candidates: u64,
    /// Distinct programs generated, indexed by clause count.
    pub programs_by_size: Vec<u64>,
    pub elapsed: Duration,
}

struct Stop;

struct Search<'a> {
    space: &'a Space,
    examples: Vec<Example>,
    max: usize,
    prog: Vec<MetaClause>,
    found: Vec<Vec<MetaClause>>,
    found_set: HashSet<Vec<MetaClause>>,
    boundary: HashSet<(usize, Vec<MetaClause>)>,
    memo: HashMap<(usize, WorldState), Rc<Vec<WorldState>>>,
    fixed_memo: HashMap<(usize, WorldState), Rc<Vec<WorldState>>>,
    generated: HashSet<u64>,
    stats: CandidateStats,
    deadline: Instant,
    limit: u64,
}

impl<'a> Search<'a> {
    fn new(space: &'a Space, examples: &[Example], max: usize, deadline: Instant, limit: u64) -> Self {
        let examples = examples
            .iter()
            .map(|e| Example {
                input: normalized(e.input.clone()),
                output: normalized(e.output.clone()),
            })
            .collect();
        Search {
            space,
            examples,
            max,
            prog: Vec::new(),
            found: Vec::new(),
            found_set: HashSet::new(),
            boundary: HashSet::new(),
            memo: HashMap::new(),
            fixed_memo: HashMap::new(),
            generated: HashSet::new(),
            stats: CandidateStats {
                programs_by_size: vec![0; max + 1],
                ..CandidateStats::default()
            },
            deadline,
            limit,
        }
    }

    fn clauses_for(&self, sym: usize) -> Vec<MetaClause> {
        let source = match self.space.syms[sym].kind {
            Kind::Fixed => &self.space.fixed,
            _ => &self.prog,
        };
        let mut cs: Vec<MetaClause> = source.iter().filter(|c| c.head == sym).copied().collect();
        cs.sort_by_key(|c| self.space.exec_key(c));
        cs
    }

    /// Every state reachable by calling `sym` on `x` under the current
    /// program.
    fn outputs(&mut self, sym: usize, x: &WorldState) -> Rc<Vec<WorldState>> {
        let fixed = match &self.space.syms[sym].kind {
            Kind::Action(a) => return Rc::new(apply_action(*a, x).ok().map(normalized).into_iter().collect()),
            Kind::Custom(f) => return Rc::new(f(x).map(normalized).into_iter().collect()),
            Kind::Fixed => true,
            Kind::Target | Kind::Invented => false,
        };
        let key = (sym, x.clone());
        let memo = if fixed { &self.fixed_memo } else { &self.memo };
        if let Some(v) = memo.get(&key) {
            return v.clone();
        }
        let mut out = Vec::new();
        let mut seen = HashSet::new();
        for c in self.clauses_for(sym) {
            let zs = self.outputs(c.q, x);
            for z in zs.iter() {
                let ys = match c.rule {
                    MetaRule::Chain => self.outputs(c.r, z),
                    MetaRule::Tailrec if progress_gt(z, x) => self.outputs(c.head, z),
                    MetaRule::Tailrec => continue,
                };
                for y in ys.iter() {
                    if seen.insert(y.clone()) {
                        out.push(y.clone());
                    }
                }
            }
        }
        let rc = Rc::new(out);
        if fixed {
            self.fixed_memo.insert(key, rc.clone());
        } else {
            self.memo.insert(key, rc.clone());
        }
        rc
    }

    fn push(&mut self, c: MetaClause) -> Result<(), Stop> {
        self.stats.candidates += 1;
        if self.stats.candidates > self.limit || Instant::now() > self.deadline {
            return Err(Stop);
        }
        let pos = self.prog.partition_point(|d| d < &c);
        self.prog.insert(pos, c);
        self.memo.clear();
        let mut h = DefaultHasher::new();
        self.prog.hash(&mut h);
        if self.generated.insert(h.finish()) {
            self.stats.programs_by_size[self.prog.len()] += 1;
        }
        Ok(())
    }

    fn pop(&mut self, c: MetaClause) {
        let pos = self.prog.iter().position(|d| *d == c).expect("clause was pushed");
        self.prog.remove(pos);
        self.memo.clear();
    }

    fn prove(&mut self, state: WorldState, items: Items, ex: usize) -> Result<(), Stop> {
        let Some(node) = items else {
            if !state.same_layout(&self.examples[ex].output) {
                return Ok(());
            }
            let next = ex + 1;
            if next == self.examples.len() {
                if self.found_set.insert(self.prog.clone()) {
                    self.found.push(self.prog.clone());
                }
                return Ok(());
            }
            if !self.boundary.insert((next, self.prog.clone())) {
                return Ok(());
            }
            let start = self.examples[next].input.clone();
            return self.prove(start, cons(Item::Call(self.space.target), None), next);
        };
        let rest = node.next.clone();
        let sym = match &node.item {
            Item::Guard(x) => {
                if progress_gt(&state, x) {
                    return self.prove(state, rest, ex);
                }
                return Ok(());
            }
            Item::Call(sym) => *sym,
        };
        let open = matches!(self.space.syms[sym].kind, Kind::Target | Kind::Invented);
        if !open || self.prog.len() >= self.max {
            let outs = self.outputs(sym, &state);
            for z in outs.iter() {
                self.prove(z.clone(), rest.clone(), ex)?;
            }
            return Ok(());
        }
        for c in self.clauses_for(sym) {
            self.prove(state.clone(), expand(&c, &state, rest.clone()), ex)?;
        }
        for c in self.space.new_clauses(sym) {
            if self.prog.contains(&c) {
                continue;
            }
            self.push(c)?;
            let r = self.prove(state.clone(), expand(&c, &state, rest.clone()), ex);
            self.pop(c);
            r?;
        }
        Ok(())
    }

    fn run(&mut self) -> Result<(), Stop> {
        let start = self.examples[0].input.clone();
        self.prove(start, cons(Item::Call(self.space.target), None), 0)
    }

    fn entails(&mut self, prog: &[MetaClause], e: &Example) -> bool {
        self.prog = prog.to_vec();
        self.memo.clear();
        let goal = normalized(e.output.clone());
        let outs = self.outputs(self.space.target, &normalized(e.input.clone()));
        outs.iter().any(|y| y.same_layout(&goal))
    }
}

/// First derivation (clauses tried in program order) that reaches the
/// layout of `goal`, with energy accumulated.
fn first_run(
    space: &Space,
    prog: &[MetaClause],
    state: WorldState,
    items: Items,
    goal: &WorldState,
) -> Option<WorldState> {
    let Some(node) = items else {
        return state.same_layout(goal).then_some(state);
    };
    let rest = node.next.clone();
    match &node.item {
        Item::Guard(x) => {
            if progress_gt(&state, x) {
                first_run(space, prog, state, rest, goal)
            } else {
                None
            }
        }
        Item::Call(sym) => match &space.syms[*sym].kind {
            Kind::Action(a) => {
                let z = apply_action(*a, &state).ok()?;
                first_run(space, prog, z, rest, goal)
            }
            Kind::Custom(f) => first_run(space, prog, f(&state)?, rest, goal),
            kind => {
                let source = if matches!(kind, Kind::Fixed) {
                    &space.fixed[..]
                } else {
                    prog
                };
                let mut cs: Vec<&MetaClause> = source.iter().filter(|c| c.head == *sym).collect();
                cs.sort_by_key(|c| space.exec_key(c));
                cs.into_iter()
                    .find_map(|c| first_run(space, prog, state.clone(), expand(c, &state, rest.clone()), goal))
            }
        },
    }
}

fn validate(problem: &MilProblem) -> Result<(), MilError> {
    if problem.max_clauses == 0 {
        return Err(MilError::InvalidProblem("max_clauses must be at least 1".into()));
    }
    for p in &problem.positives {
        if problem
            .negatives
            .iter()
            .any(|n| n.input == p.input && n.output.same_layout(&p.output))
        {
            return Err(MilError::InvalidProblem(
                "an example is both positive and negative".into(),
            ));
        }
    }
    if problem.positives.is_empty() {
        return Err(MilError::NoHypothesis {
            max_clauses: problem.max_clauses,
            budget_exhausted: false,
        });
    }
    Ok(())
}

type ResourceFn<'c> = &'c (dyn Fn(&WorldState, &WorldState) -> u64 + Sync);

fn energy_cost(input: &WorldState, output: &WorldState) -> u64 {
    output.energy.saturating_sub(input.energy)
}

fn resource_cost(space: &Space, prog: &[MetaClause], problem: &MilProblem, cost: ResourceFn) -> Option<u64> {
    problem.positives.iter().try_fold(0u64, |acc, e| {
        let out = first_run(
            space,
            prog,
            e.input.clone(),
            cons(Item::Call(space.target), None),
            &e.output,
        )?;
        Some(acc + cost(&e.input, &out))
    })
}

/// Consistent programs of at most `max` clauses.
fn consistent_programs(
    space: &Space,
    problem: &MilProblem,
    max: usize,
    deadline: Instant,
    stats: &mut CandidateStats,
) -> Result<Vec<Vec<MetaClause>>, MilError> {
    let mut search = Search::new(space, &problem.positives, max, deadline, problem.budget.candidates);
    let outcome = search.run();
    stats.candidates += search.stats.candidates;
    stats.programs_by_size = search.stats.programs_by_size.clone();
    if outcome.is_err() {
        return Err(MilError::NoHypothesis {
            max_clauses: problem.max_clauses,
            budget_exhausted: true,
        });
    }
    let found = std::mem::take(&mut search.found);
    Ok(found
        .into_iter()
        .filter(|p| !problem.negatives.iter().any(|n| search.entails(p, n)))
        .collect())
}

fn with_big_stack<T: Send>(f: impl FnOnce() -> T + Send) -> T {
    std::thread::scope(|s| {
        std::thread::Builder::new()
            .stack_size(512 << 20)
            .spawn_scoped(s, f)
            .expect("spawn search thread")
            .join()
            .expect("search thread panicked")
    })
}

fn hypothesis(space: &Space, prog: &[MetaClause], resource_cost: u64, stats: CandidateStats) -> Hypothesis {
    Hypothesis {
        program: space.to_program(prog),
        textual_size: prog.len(),
        resource_cost,
        stats,
    }
}

/// Smallest program (by clause count, then clause order) of at most
/// `max_clauses` clauses entailing every positive and no negative example.
pub fn learn(problem: &MilProblem) -> Result<Hypothesis, MilError> {
    validate(problem)?;
    let space = Space::new(problem)?;
    with_big_stack(|| {
        let started = Instant::now();
        let deadline = started + problem.budget.time;
        let mut stats = CandidateStats::default();
        for k in 1..=problem.max_clauses {
            let found = consistent_programs(&space, problem, k, deadline, &mut stats)?;
            if let Some(best) = found.iter().min_by_key(|p| space.program_key(p)) {
                stats.elapsed = started.elapsed();
                let cost = resource_cost(&space, best, problem, &energy_cost).unwrap_or(0);
                return Ok(hypothesis(&space, best, cost, stats));
            }
        }
        Err(MilError::NoHypothesis {
            max_clauses: problem.max_clauses,
            budget_exhausted: false,
        })
    })
}

/// Among all consistent programs of at most `max_clauses` clauses, the one
/// with the least summed `cost(input, output)` over the positives; ties go
/// to fewer clauses, then clause order.
pub fn iterative_descent(
    problem: &MilProblem,
    cost: &(dyn Fn(&WorldState, &WorldState) -> u64 + Sync),
) -> Result<Hypothesis, MilError> {
    validate(problem)?;
    let space = Space::new(problem)?;
    with_big_stack(|| {
        let started = Instant::now();
        let deadline = started + problem.budget.time;
        let mut stats = CandidateStats::default();
        let found = consistent_programs(&space, problem, problem.max_clauses, deadline, &mut stats)?;
        stats.elapsed = started.elapsed();
        found
            .iter()
            .filter_map(|p| resource_cost(&space, p, problem, cost).map(|c| (c, p)))
            .min_by_key(|(c, p)| (*c, space.program_key(p)))
            .map(|(c, p)| hypothesis(&space, p, c, stats))
            .ok_or(MilError::NoHypothesis {
                max_clauses: problem.max_clauses,
                budget_exhausted: false,
            })
    })
}

/// The default resource: energy spent between input and output.
pub fn energy_resource(input: &WorldState, output: &WorldState) -> u64 {
    energy_cost(input, output)
}
