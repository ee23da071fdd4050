//! Meta-interpretive learning over robot world states.
//!
//! Hypotheses are built from two meta-rules, `Chain` (`P(x,y) ← Q(x,z), R(z,y)`)
//! and `Tailrec` (`P(x,y) ← Q(x,z), P(z,y)`), instantiated with background
//! predicates, the target symbol and invented symbols. Examples are pairs of
//! world states and entailment is decided by executing the candidate.

mod engine;
mod examples;
mod problem_file;

use std::fmt;
use std::sync::Arc;
use std::time::Duration;

use crate::logic::{DatalogProgram, LogicError};
use crate::robot::{CompositeAction, RobotError, WorldState};

pub use engine::{energy_resource, iterative_descent, learn, CandidateStats};
pub use examples::{merge_problem, negative_for, sort_problem, MERGE_INPUTS, SORT_INPUTS};
pub use problem_file::parse_problem;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum MetaRule {
    Chain,
    Tailrec,
}

impl MetaRule {
    pub const ALL: [MetaRule; 2] = [MetaRule::Chain, MetaRule::Tailrec];
}

/// A deterministic state transformer supplied by the caller.
pub type CustomAction = Arc<dyn Fn(&WorldState) -> Option<WorldState> + Send + Sync>;

#[derive(Clone)]
pub enum Background {
    Action(CompositeAction),
    /// A predicate defined by rules (for instance a previously learned
    /// merger). Every clause must have the shape of one of the meta-rules.
    Defined {
        name: String,
        program: DatalogProgram,
    },
    Custom {
        name: String,
        action: CustomAction,
    },
}

impl Background {
    pub fn name(&self) -> &str {
        match self {
            Background::Action(a) => a.name(),
            Background::Defined { name, .. } | Background::Custom { name, .. } => name,
        }
    }

    /// The five composite actions in the default tie-breaking order.
    pub fn actions() -> Vec<Background> {
        [
            CompositeAction::ParseExprs,
            CompositeAction::CompareNums,
            CompositeAction::DropBagRemaining,
            CompositeAction::RecycleMemory,
            CompositeAction::SingleExpr,
        ]
        .into_iter()
        .map(Background::Action)
        .collect()
    }
}

impl fmt::Debug for Background {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Background::Action(a) => write!(f, "Action({a})"),
            Background::Defined { name, .. } => write!(f, "Defined({name})"),
            Background::Custom { name, .. } => write!(f, "Custom({name})"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Budget {
    pub time: Duration,
    pub candidates: u64,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            time: Duration::from_secs(60),
            candidates: 1_000_000,
        }
    }
}

/// A pair of states: the target predicate should map `input` to a state
/// laid out like `output` (energy is not compared).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Example {
    pub input: WorldState,
    pub output: WorldState,
}

#[derive(Debug, Clone)]
pub struct MilProblem {
    pub target: String,
    /// Order matters: earlier predicates win ties between equally small
    /// hypotheses.
    pub background: Vec<Background>,
    pub meta_rules: Vec<MetaRule>,
    pub positives: Vec<Example>,
    pub negatives: Vec<Example>,
    pub invented: Vec<String>,
    pub max_clauses: usize,
    pub budget: Budget,
}

impl MilProblem {
    pub fn new(target: impl Into<String>, background: Vec<Background>, max_clauses: usize) -> MilProblem {
        let target = target.into();
        MilProblem {
            invented: vec![format!("{target}_1")],
            target,
            background,
            meta_rules: MetaRule::ALL.to_vec(),
            positives: Vec::new(),
            negatives: Vec::new(),
            max_clauses,
            budget: Budget::default(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Hypothesis {
    pub program: DatalogProgram,
    pub textual_size: usize,
    /// Summed resource cost of executing the program on every positive.
    pub resource_cost: u64,
    pub stats: CandidateStats,
}

impl Hypothesis {
    pub fn rules(&self) -> String {
        self.program.to_string()
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum MilError {
    #[error("no hypothesis with at most {max_clauses} clauses{}", if *.budget_exhausted { " (search budget exhausted)" } else { "" })]
    NoHypothesis { max_clauses: usize, budget_exhausted: bool },
    #[error("invalid problem: {0}")]
    InvalidProblem(String),
    #[error(transparent)]
    Robot(#[from] RobotError),
    #[error(transparent)]
    Logic(#[from] LogicError),
}
