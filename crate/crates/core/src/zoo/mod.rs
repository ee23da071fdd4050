//! Instrumented sorting algorithms and question generation.

mod algorithms;
mod questions;

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use questions::{generate_questions, BankSizes, QuestionBank, QuestionKind, QuestionSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Category {
    BS,
    DS,
    IS,
    MS,
    QS,
    Hybrid,
}

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

macro_rules! algorithms {
    ($($variant:ident => $name:literal, $cat:ident;)*) => {
        #[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
        pub enum AlgorithmId {
            $(#[serde(rename = $name)] $variant,)*
        }

        impl AlgorithmId {
            /// Registration order, which also breaks classifier ties.
            pub const ALL: [AlgorithmId; 24] = [$(AlgorithmId::$variant,)*];

            pub fn name(self) -> &'static str {
                match self {
                    $(AlgorithmId::$variant => $name,)*
                }
            }

            pub fn category(self) -> Category {
                match self {
                    $(AlgorithmId::$variant => Category::$cat,)*
                }
            }
        }
    };
}

algorithms! {
    BsForward => "bs_forward", BS;
    BsBidirectional => "bs_bidirectional", BS;
    DsLowBias => "ds_low_bias", DS;
    DsHighBias => "ds_high_bias", DS;
    IsLinearFwd => "is_linear_fwd", IS;
    IsLinearBwd => "is_linear_bwd", IS;
    IsBinaryFwd => "is_binary_fwd", IS;
    IsBinaryBwd => "is_binary_bwd", IS;
    MsTdLeftFirst => "ms_td_left_first", MS;
    MsTdRightFirst => "ms_td_right_first", MS;
    MsTdLevelOrder => "ms_td_level_order", MS;
    MsBuLevelOrder => "ms_bu_level_order", MS;
    MsBuCascade => "ms_bu_cascade", MS;
    MsBuNatural => "ms_bu_natural", MS;
    QsFirstLomuto => "qs_first_lomuto", QS;
    QsFirstHoare => "qs_first_hoare", QS;
    QsLastLomuto => "qs_last_lomuto", QS;
    QsLastHoare => "qs_last_hoare", QS;
    QsMiddleLomuto => "qs_middle_lomuto", QS;
    QsMiddleHoare => "qs_middle_hoare", QS;
    Hybrid3 => "hybrid_3", Hybrid;
    Hybrid4 => "hybrid_4", Hybrid;
    Hybrid5 => "hybrid_5", Hybrid;
    Hybrid6 => "hybrid_6", Hybrid;
}

impl AlgorithmId {
    /// The merge sort whose comparisons sort questions are tuned against.
    pub const MERGE_BASELINE: AlgorithmId = AlgorithmId::MsBuCascade;
    /// The insertion sort whose comparisons sort questions are tuned against.
    pub const INSERTION_BASELINE: AlgorithmId = AlgorithmId::IsLinearBwd;
}

impl fmt::Display for AlgorithmId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for AlgorithmId {
    type Err = ZooError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        AlgorithmId::ALL
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| ZooError::UnknownAlgorithm(s.to_string()))
    }
}

/// Comparisons in execution order.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Trace {
    pub pairs: Vec<(i64, i64)>,
}

impl Trace {
    pub fn new(pairs: Vec<(i64, i64)>) -> Trace {
        Trace { pairs }
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ZooError {
    #[error("input contains duplicate value {0}")]
    DuplicateValues(i64),
    #[error("input is empty")]
    EmptyInput,
    #[error("unknown algorithm {0}")]
    UnknownAlgorithm(String),
    #[error("gave up after {0} rejected candidates")]
    GenerationExhausted(usize),
}

fn check_input(input: &[i64]) -> Result<(), ZooError> {
    if input.is_empty() {
        return Err(ZooError::EmptyInput);
    }
    let mut seen = HashSet::new();
    for &v in input {
        if !seen.insert(v) {
            return Err(ZooError::DuplicateValues(v));
        }
    }
    Ok(())
}

/// Full record of one execution: output order, comparisons and the outcome
/// the comparator gave for each.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Execution {
    pub output: Vec<i64>,
    pub trace: Trace,
    pub outcomes: Vec<bool>,
}

/// Runs `alg` on `input` with `less(x, y)` deciding whether `x` goes before
/// `y`. The comparator need not be consistent.
pub fn run_with(alg: AlgorithmId, input: &[i64], less: &mut dyn FnMut(i64, i64) -> bool) -> Execution {
    let mut a = input.to_vec();
    let mut ctx = algorithms::Ctx::new(less);
    algorithms::run(alg, &mut a, &mut ctx);
    Execution {
        output: a,
        trace: Trace::new(ctx.trace),
        outcomes: ctx.outcomes,
    }
}

pub fn machine_trace(alg: AlgorithmId, input: &[i64]) -> Result<(Vec<i64>, Trace), ZooError> {
    check_input(input)?;
    let e = run_with(alg, input, &mut |x, y| x < y);
    Ok((e.output, e.trace))
}

pub fn comparison_count(alg: AlgorithmId, input: &[i64]) -> Result<usize, ZooError> {
    Ok(machine_trace(alg, input)?.1.len())
}

/// Re-runs `alg`, answering comparisons from `outcomes` in order.
pub fn replay(alg: AlgorithmId, input: &[i64], outcomes: &[bool]) -> Execution {
    let mut it = outcomes.iter().copied();
    run_with(alg, input, &mut |_, _| it.next().unwrap_or(false))
}
