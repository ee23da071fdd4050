use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::RobotError;

/// A run of strictly increasing integers written `a < b < c`.
///
/// Only the open slot at the end of memory may be empty.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct LtExpr {
    values: Vec<i64>,
}

impl LtExpr {
    pub fn new(values: Vec<i64>) -> Result<LtExpr, RobotError> {
        if values.is_empty() {
            return Err(RobotError::Syntax("empty expression".into()));
        }
        if let Some(w) = values.windows(2).find(|w| w[0] >= w[1]) {
            return Err(RobotError::NotIncreasing(w[0], w[1]));
        }
        Ok(LtExpr { values })
    }

    pub fn single(v: i64) -> LtExpr {
        LtExpr { values: vec![v] }
    }

    pub(crate) fn open() -> LtExpr {
        LtExpr { values: Vec::new() }
    }

    pub(crate) fn from_values_unchecked(values: Vec<i64>) -> LtExpr {
        LtExpr { values }
    }

    pub(crate) fn push(&mut self, v: i64) {
        self.values.push(v);
    }

    pub fn values(&self) -> &[i64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Parses `int (< int)*`; `ε` gives the empty expression.
pub fn parse_lt_expr(text: &str) -> Result<LtExpr, RobotError> {
    let text = text.trim();
    if text == "ε" {
        return Ok(LtExpr::open());
    }
    let values = text
        .split('<')
        .map(|p| {
            let p = p.trim();
            p.parse::<i64>()
                .map_err(|_| RobotError::Syntax(format!("bad integer {p:?} in {text:?}")))
        })
        .collect::<Result<Vec<_>, _>>()?;
    LtExpr::new(values)
}

impl FromStr for LtExpr {
    type Err = RobotError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_lt_expr(s)
    }
}

impl fmt::Display for LtExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.values.is_empty() {
            return f.write_str("ε");
        }
        let parts: Vec<String> = self.values.iter().map(i64::to_string).collect();
        f.write_str(&parts.join(" < "))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct WorldState {
    pub exprs: Vec<LtExpr>,
    pub energy: u64,
    pub left_bag: Vec<i64>,
    pub right_bag: Vec<i64>,
    pub memory: Vec<LtExpr>,
}

impl WorldState {
    /// One singleton expression per input integer.
    pub fn from_values(values: &[i64]) -> WorldState {
        WorldState {
            exprs: values.iter().map(|&v| LtExpr::single(v)).collect(),
            ..WorldState::default()
        }
    }

    pub fn from_exprs(exprs: Vec<LtExpr>) -> WorldState {
        WorldState {
            exprs,
            ..WorldState::default()
        }
    }

    /// All integers in reading order: memory, left bag, right bag, exprs.
    pub fn flatten(&self) -> Vec<i64> {
        let mut out = Vec::new();
        out.extend(self.memory.iter().flat_map(|e| e.values().iter().copied()));
        out.extend(&self.left_bag);
        out.extend(&self.right_bag);
        out.extend(self.exprs.iter().flat_map(|e| e.values().iter().copied()));
        out
    }

    /// The state without its energy counter, used when comparing outcomes.
    pub fn same_layout(&self, other: &WorldState) -> bool {
        self.exprs == other.exprs
            && self.left_bag == other.left_bag
            && self.right_bag == other.right_bag
            && self.memory == other.memory
    }

    /// Parses `exprs | energy | left | right | memory`.
    pub fn parse_line(line: &str) -> Result<WorldState, RobotError> {
        let fields: Vec<&str> = line.split('|').map(str::trim).collect();
        let [exprs, energy, left, right, memory] = fields[..] else {
            return Err(RobotError::Syntax(format!(
                "expected 5 '|'-separated fields, got {}",
                fields.len()
            )));
        };
        let exprs = split_list(exprs).map(parse_lt_expr).collect::<Result<Vec<_>, _>>()?;
        if exprs.iter().any(LtExpr::is_empty) {
            return Err(RobotError::Syntax("ε is only allowed in memory".into()));
        }
        let energy = energy
            .parse()
            .map_err(|_| RobotError::Syntax(format!("bad energy {energy:?}")))?;
        let bag = |s: &str| {
            split_list(s)
                .map(|v| {
                    v.parse::<i64>()
                        .map_err(|_| RobotError::Syntax(format!("bad bag value {v:?}")))
                })
                .collect::<Result<Vec<_>, _>>()
        };
        Ok(WorldState {
            exprs,
            energy,
            left_bag: bag(left)?,
            right_bag: bag(right)?,
            memory: split_list(memory).map(parse_lt_expr).collect::<Result<Vec<_>, _>>()?,
        })
    }

    pub fn to_line(&self) -> String {
        let join = |xs: &[LtExpr]| xs.iter().map(|e| e.to_string()).collect::<Vec<_>>().join(", ");
        let bag = |xs: &[i64]| xs.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(", ");
        format!(
            "{} | {} | {} | {} | {}",
            join(&self.exprs),
            self.energy,
            bag(&self.left_bag),
            bag(&self.right_bag),
            join(&self.memory)
        )
    }
}

fn split_list(s: &str) -> impl Iterator<Item = &str> {
    s.split(',').map(str::trim).filter(|p| !p.is_empty())
}

impl fmt::Display for WorldState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_line())
    }
}

impl FromStr for WorldState {
    type Err = RobotError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        WorldState::parse_line(s)
    }
}
