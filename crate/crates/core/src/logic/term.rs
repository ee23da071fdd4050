use std::fmt;

/// A first-order term of the rule language.
///
/// Compound terms double as atoms when they appear in clause heads and
/// bodies. Ground compound data (tuples, lists) may be nested freely as
/// arguments.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Var(String),
    Const(String),
    Compound { functor: String, args: Vec<Term> },
    Truth(bool),
    Epsilon,
}

impl Term {
    pub fn var(name: impl Into<String>) -> Term {
        Term::Var(name.into())
    }

    pub fn constant(symbol: impl Into<String>) -> Term {
        Term::Const(symbol.into())
    }

    pub fn int(value: i64) -> Term {
        Term::Const(value.to_string())
    }

    /// Builds a compound term. Panics on an empty argument list; use
    /// [`Term::constant`] for nullary symbols.
    pub fn compound(functor: impl Into<String>, args: Vec<Term>) -> Term {
        assert!(!args.is_empty(), "compound terms need at least one argument");
        Term::Compound {
            functor: functor.into(),
            args,
        }
    }

    pub fn top() -> Term {
        Term::Truth(true)
    }

    pub fn bottom() -> Term {
        Term::Truth(false)
    }

    /// Cognitive cost: one per variable, truth value, ε and functor symbol;
    /// a constant costs its character count.
    pub fn cost(&self) -> u64 {
        match self {
            Term::Var(_) | Term::Truth(_) | Term::Epsilon => 1,
            Term::Const(s) => s.chars().count() as u64,
            Term::Compound { args, .. } => 1 + args.iter().map(Term::cost).sum::<u64>(),
        }
    }

    pub fn is_ground(&self) -> bool {
        match self {
            Term::Var(_) => false,
            Term::Compound { args, .. } => args.iter().all(Term::is_ground),
            _ => true,
        }
    }

    /// `(symbol, arity)` when the term can stand as an atom.
    pub fn predicate(&self) -> Option<(&str, usize)> {
        match self {
            Term::Compound { functor, args } => Some((functor.as_str(), args.len())),
            _ => None,
        }
    }

    pub fn args(&self) -> &[Term] {
        match self {
            Term::Compound { args, .. } => args,
            _ => &[],
        }
    }

    pub fn as_int(&self) -> Option<i64> {
        match self {
            Term::Const(s) => s.parse().ok(),
            _ => None,
        }
    }

    /// Copy of the term with every constant `name` replaced by `with`.
    pub fn replace_constant(&self, name: &str, with: &Term) -> Term {
        match self {
            Term::Const(c) if c == name => with.clone(),
            Term::Compound { functor, args } => Term::Compound {
                functor: functor.clone(),
                args: args.iter().map(|a| a.replace_constant(name, with)).collect(),
            },
            other => other.clone(),
        }
    }

    pub fn variables(&self, out: &mut Vec<String>) {
        match self {
            Term::Var(v) => {
                if !out.contains(v) {
                    out.push(v.clone());
                }
            }
            Term::Compound { args, .. } => args.iter().for_each(|a| a.variables(out)),
            _ => {}
        }
    }
}

/// Variable names start with an uppercase ASCII letter or `_`.
pub fn is_variable_name(name: &str) -> bool {
    name.chars().next().is_some_and(|c| c.is_ascii_uppercase() || c == '_')
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(v) => f.write_str(v),
            Term::Const(c) => f.write_str(c),
            Term::Truth(true) => f.write_str("⊤"),
            Term::Truth(false) => f.write_str("⊥"),
            Term::Epsilon => f.write_str("ε"),
            Term::Compound { functor, args } => {
                write!(f, "{functor}(")?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{a}")?;
                }
                f.write_str(")")
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn list(h: Term, t: Term) -> Term {
        Term::compound("list", vec![h, t])
    }

    #[test]
    fn nested_list_costs_five() {
        let t = list(Term::int(1), list(Term::int(0), Term::Epsilon));
        assert_eq!(t.cost(), 5);
    }

    #[test]
    fn atom_with_two_variables_costs_three() {
        let t = Term::compound("merger", vec![Term::var("State1"), Term::var("State2")]);
        assert_eq!(t.cost(), 3);
    }

    #[test]
    fn constants_count_characters() {
        assert_eq!(Term::top().cost(), 1);
        assert_eq!(Term::bottom().cost(), 1);
        assert_eq!(Term::int(42).cost(), 2);
        assert_eq!(Term::int(-7).cost(), 2);
        assert_eq!(Term::constant("s1").cost(), 2);
        assert_eq!(Term::Epsilon.cost(), 1);
    }

    #[test]
    fn constant_replacement() {
        let q = Term::compound("m", vec![Term::constant("s1"), Term::var("V"), Term::constant("s2")]);
        let r = q.replace_constant("s1", &Term::Epsilon);
        assert_eq!(r.to_string(), "m(ε,V,s2)");
    }

    #[test]
    fn display_has_no_spaces() {
        let t = Term::compound("p", vec![Term::var("A"), Term::compound("f", vec![Term::Epsilon])]);
        assert_eq!(t.to_string(), "p(A,f(ε))");
    }
}
