//! Ground-term encoding of world states for the rule evaluator.
//!
//! A state is `tuple(exprs, tuple(energy, tuple(left, tuple(right, memory))))`
//! where lists are `list(head, tail)` ending in `ε`, a one-number expression
//! is the bare integer and a longer one nests as `lt(a, lt(b, c))`.

use super::action::{apply_action, CompositeAction};
use super::state::{LtExpr, WorldState};
use super::RobotError;
use crate::logic::{Builtins, Term};

fn list(items: Vec<Term>) -> Term {
    items
        .into_iter()
        .rev()
        .fold(Term::Epsilon, |tail, head| Term::compound("list", vec![head, tail]))
}

fn tuple(a: Term, b: Term) -> Term {
    Term::compound("tuple", vec![a, b])
}

pub fn expr_to_term(e: &LtExpr) -> Term {
    match e.values() {
        [] => Term::Epsilon,
        values => {
            let mut it = values.iter().rev();
            let last = Term::int(*it.next().expect("nonempty"));
            it.fold(last, |acc, &v| Term::compound("lt", vec![Term::int(v), acc]))
        }
    }
}

pub fn state_to_term(s: &WorldState) -> Term {
    let exprs = list(s.exprs.iter().map(expr_to_term).collect());
    let bag = |b: &[i64]| list(b.iter().map(|&v| Term::int(v)).collect());
    let memory = list(s.memory.iter().map(expr_to_term).collect());
    tuple(
        exprs,
        tuple(
            Term::int(s.energy as i64),
            tuple(bag(&s.left_bag), tuple(bag(&s.right_bag), memory)),
        ),
    )
}

fn bad(t: &Term) -> RobotError {
    RobotError::Encoding(t.to_string())
}

fn split<'a>(t: &'a Term, functor: &str) -> Result<(&'a Term, &'a Term), RobotError> {
    match t {
        Term::Compound { functor: f, args } if f == functor && args.len() == 2 => Ok((&args[0], &args[1])),
        _ => Err(bad(t)),
    }
}

fn from_list(t: &Term) -> Result<Vec<&Term>, RobotError> {
    let mut out = Vec::new();
    let mut cur = t;
    while *cur != Term::Epsilon {
        let (h, rest) = split(cur, "list")?;
        out.push(h);
        cur = rest;
    }
    Ok(out)
}

pub fn term_to_expr(t: &Term) -> Result<LtExpr, RobotError> {
    let mut values = Vec::new();
    let mut cur = t;
    loop {
        match cur {
            Term::Epsilon if values.is_empty() => return Ok(LtExpr::open()),
            Term::Compound { .. } => {
                let (h, rest) = split(cur, "lt")?;
                values.push(h.as_int().ok_or_else(|| bad(t))?);
                cur = rest;
            }
            _ => {
                values.push(cur.as_int().ok_or_else(|| bad(t))?);
                return LtExpr::new(values);
            }
        }
    }
}

pub fn term_to_state(t: &Term) -> Result<WorldState, RobotError> {
    let (exprs, rest) = split(t, "tuple")?;
    let (energy, rest) = split(rest, "tuple")?;
    let (left, rest) = split(rest, "tuple")?;
    let (right, memory) = split(rest, "tuple")?;
    let ints = |l: &Term| -> Result<Vec<i64>, RobotError> {
        from_list(l)?
            .into_iter()
            .map(|v| v.as_int().ok_or_else(|| bad(v)))
            .collect()
    };
    let exprs_of =
        |l: &Term| -> Result<Vec<LtExpr>, RobotError> { from_list(l)?.into_iter().map(term_to_expr).collect() };
    Ok(WorldState {
        exprs: exprs_of(exprs)?,
        energy: energy
            .as_int()
            .and_then(|e| u64::try_from(e).ok())
            .ok_or_else(|| bad(energy))?,
        left_bag: ints(left)?,
        right_bag: ints(right)?,
        memory: exprs_of(memory)?,
    })
}

/// Evaluator hook for one action: `name(In, Out)` with `In` ground.
pub fn register_action(builtins: &mut Builtins, action: CompositeAction) {
    builtins.register(action.name(), 2, move |args: &[Term]| {
        let s = term_to_state(&args[0]).ok()?;
        let next = apply_action(action, &s).ok()?;
        Some(vec![args[0].clone(), state_to_term(&next)])
    });
}

/// All five composite actions as evaluator built-ins.
pub fn action_builtins() -> Builtins {
    let mut b = Builtins::new();
    for a in CompositeAction::ALL {
        register_action(&mut b, a);
    }
    b
}
