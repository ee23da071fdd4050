use std::collections::BTreeSet;
use std::fmt;

use super::parser::check_arities;
use super::term::Term;
use super::LogicError;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Clause {
    pub head: Term,
    pub body: Vec<Term>,
}

impl Clause {
    pub fn new(head: Term, body: Vec<Term>) -> Clause {
        Clause { head, body }
    }

    pub fn fact(head: Term) -> Clause {
        Clause { head, body: vec![] }
    }
}

impl fmt::Display for Clause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.head)?;
        if !self.body.is_empty() {
            f.write_str(":-")?;
            for (i, b) in self.body.iter().enumerate() {
                if i > 0 {
                    f.write_str(",")?;
                }
                write!(f, "{b}")?;
            }
        }
        f.write_str(".")
    }
}

/// An ordered clause list plus the `(symbol, arity)` table of every predicate
/// it mentions.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct DatalogProgram {
    clauses: Vec<Clause>,
    predicates: BTreeSet<(String, usize)>,
}

impl DatalogProgram {
    pub fn new(clauses: Vec<Clause>) -> Result<DatalogProgram, LogicError> {
        for c in &clauses {
            if c.head.predicate().is_none() || c.body.iter().any(|b| b.predicate().is_none()) {
                return Err(LogicError::NotAnAtom(c.to_string()));
            }
        }
        let atoms = clauses.iter().flat_map(|c| std::iter::once(&c.head).chain(&c.body));
        let predicates = check_arities(atoms)?.into_iter().collect();
        Ok(DatalogProgram { clauses, predicates })
    }

    pub fn clauses(&self) -> &[Clause] {
        &self.clauses
    }

    pub fn predicates(&self) -> &BTreeSet<(String, usize)> {
        &self.predicates
    }

    /// Predicates that head at least one clause.
    pub fn defined(&self) -> BTreeSet<(String, usize)> {
        self.clauses
            .iter()
            .filter_map(|c| c.head.predicate())
            .map(|(s, a)| (s.to_string(), a))
            .collect()
    }

    pub fn is_defined(&self, symbol: &str, arity: usize) -> bool {
        self.clauses.iter().any(|c| c.head.predicate() == Some((symbol, arity)))
    }

    /// Body predicates that no clause defines.
    pub fn undefined_body_predicates(&self) -> BTreeSet<(String, usize)> {
        let defined = self.defined();
        self.clauses
            .iter()
            .flat_map(|c| c.body.iter())
            .filter_map(|b| b.predicate())
            .map(|(s, a)| (s.to_string(), a))
            .filter(|p| !defined.contains(p))
            .collect()
    }
}

impl fmt::Display for DatalogProgram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.clauses {
            writeln!(f, "{c}")?;
        }
        Ok(())
    }
}
