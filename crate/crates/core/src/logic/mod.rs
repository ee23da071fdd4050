//! Rule language: terms, clauses, a reader and a stack-recording evaluator.

mod eval;
mod parser;
mod program;
mod term;

pub use eval::{
    evaluate, program_cognitive_cost, BuiltinCall, BuiltinFn, Builtins, Evaluation, ExecutionStack, Outcome,
    DEFAULT_STACK_LIMIT,
};
pub use parser::{parse_atom, parse_program, parse_term};
pub use program::{Clause, DatalogProgram};
pub use term::{is_variable_name, Term};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LogicError {
    #[error("syntax error at {line}:{col}: {message}")]
    Syntax { line: usize, col: usize, message: String },
    #[error("predicate {symbol} used with arity {first} and {second}")]
    DuplicateArity {
        symbol: String,
        first: usize,
        second: usize,
    },
    #[error("not an atom: {0}")]
    NotAnAtom(String),
    #[error("stack limit {} cannot hold a query and its result", partial.limit)]
    StackLimitExceeded { partial: ExecutionStack },
    #[error("unknown predicate {symbol}/{arity}")]
    UnknownPredicate { symbol: String, arity: usize },
}

/// Cost of a single term (see [`Term::cost`]).
pub fn term_cost(t: &Term) -> u64 {
    t.cost()
}
