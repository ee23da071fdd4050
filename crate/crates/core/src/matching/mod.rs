//! Matching human comparison traces against the algorithm zoo.

mod report;
mod simulate;

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::stats::{chi_squared_2x2, spearman};
use crate::zoo::{machine_trace, AlgorithmId, Category, Trace, ZooError};

pub use report::{write_csv, ResponseRecord};
pub use simulate::{simulate_participant, Simulation};

#[derive(Debug, Error, PartialEq)]
pub enum MatchError {
    #[error("pair ({0}, {1}) uses an item outside the instance")]
    ItemMismatch(i64, i64),
    #[error("instance contains duplicate items")]
    DuplicateItems,
    #[error("human trace is empty")]
    EmptyTrace,
    #[error("noise must lie in [0, 1], got {0}")]
    InvalidNoise(f64),
    #[error(transparent)]
    Zoo(#[from] ZooError),
    #[error("csv output failed: {0}")]
    Csv(String),
}

/// Unordered pair with `a <= b`.
pub type Pair = (i64, i64);

pub fn normalize((a, b): (i64, i64)) -> Pair {
    (a.min(b), a.max(b))
}

/// Every unordered pair over an instance's items, self-pairs included.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PairUniverse {
    items: BTreeSet<i64>,
}

impl PairUniverse {
    pub fn new(items: &[i64]) -> Result<PairUniverse, MatchError> {
        let set: BTreeSet<i64> = items.iter().copied().collect();
        if set.len() != items.len() {
            return Err(MatchError::DuplicateItems);
        }
        Ok(PairUniverse { items: set })
    }

    pub fn n(&self) -> usize {
        self.items.len()
    }

    pub fn size(&self) -> usize {
        self.n() * (self.n() + 1) / 2
    }

    pub fn contains(&self, pair: (i64, i64)) -> bool {
        self.items.contains(&pair.0) && self.items.contains(&pair.1)
    }

    pub fn pairs(&self) -> Vec<Pair> {
        let v: Vec<i64> = self.items.iter().copied().collect();
        let mut out = Vec::with_capacity(self.size());
        for (i, &a) in v.iter().enumerate() {
            out.extend(v[i..].iter().map(|&b| (a, b)));
        }
        out
    }

    /// Distinct normalized pairs of a trace, in first-occurrence order.
    fn members(&self, trace: &Trace) -> Result<Vec<Pair>, MatchError> {
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        for &p in &trace.pairs {
            if !self.contains(p) {
                return Err(MatchError::ItemMismatch(p.0, p.1));
            }
            let p = normalize(p);
            if seen.insert(p) {
                out.push(p);
            }
        }
        Ok(out)
    }
}

/// Smoothed 2×2 membership counts. Rows are machine (not in, in); columns
/// are human (not in, in).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Contingency2x2 {
    pub cells: [[u64; 2]; 2],
}

impl Contingency2x2 {
    pub fn total(&self) -> u64 {
        self.cells.iter().flatten().sum()
    }

    pub fn both(&self) -> u64 {
        self.cells[1][1]
    }
}

pub fn contingency(human: &Trace, machine: &Trace, items: &[i64]) -> Result<Contingency2x2, MatchError> {
    let universe = PairUniverse::new(items)?;
    let h: BTreeSet<Pair> = universe.members(human)?.into_iter().collect();
    let m: BTreeSet<Pair> = universe.members(machine)?.into_iter().collect();
    let mut cells = [[1u64; 2]; 2];
    for p in universe.pairs() {
        cells[m.contains(&p) as usize][h.contains(&p) as usize] += 1;
    }
    Ok(Contingency2x2 { cells })
}

/// Ranks (1-based) of the pairs both traces share, human first. Each list
/// is re-ranked after the non-shared pairs are dropped.
pub fn common_pair_ranks(human: &Trace, machine: &Trace) -> (Vec<f64>, Vec<f64>) {
    let firsts = |t: &Trace| {
        let mut seen = BTreeSet::new();
        t.pairs
            .iter()
            .map(|&p| normalize(p))
            .filter(|p| seen.insert(*p))
            .collect::<Vec<_>>()
    };
    let (h, m) = (firsts(human), firsts(machine));
    let hs: BTreeSet<Pair> = h.iter().copied().collect();
    let ms: BTreeSet<Pair> = m.iter().copied().collect();
    let m_rank: HashMap<Pair, usize> = m
        .iter()
        .filter(|p| hs.contains(p))
        .enumerate()
        .map(|(i, p)| (*p, i + 1))
        .collect();
    h.iter()
        .filter(|p| ms.contains(p))
        .enumerate()
        .map(|(i, p)| ((i + 1) as f64, m_rank[p] as f64))
        .unzip()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MatchConfig {
    pub chi2_alpha: f64,
    pub rho_alpha: f64,
    pub yates: bool,
}

impl Default for MatchConfig {
    fn default() -> Self {
        MatchConfig {
            chi2_alpha: 0.025,
            rho_alpha: 0.05,
            yates: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatchResult {
    pub algorithm: AlgorithmId,
    pub chi2: f64,
    pub chi2_p: f64,
    /// Present once the association test rejects and at least two pairs
    /// are shared.
    pub rho: Option<f64>,
    pub rho_p: Option<f64>,
    pub machine_comparisons: usize,
    pub matched: bool,
}

pub fn match_traces(
    algorithm: AlgorithmId,
    human: &Trace,
    machine: &Trace,
    items: &[i64],
    config: &MatchConfig,
) -> Result<MatchResult, MatchError> {
    let table = contingency(human, machine, items)?;
    let (chi2, chi2_p) = chi_squared_2x2(table.cells, config.yates);
    let mut result = MatchResult {
        algorithm,
        chi2,
        chi2_p,
        rho: None,
        rho_p: None,
        machine_comparisons: machine.len(),
        matched: false,
    };
    if chi2_p < config.chi2_alpha {
        let (hr, mr) = common_pair_ranks(human, machine);
        if let Ok((rho, p)) = spearman(&hr, &mr) {
            result.rho = Some(rho);
            result.rho_p = Some(p);
            result.matched = rho > 0.0 && p < config.rho_alpha;
        }
    }
    Ok(result)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum StrategyCategory {
    BS,
    DS,
    IS,
    MS,
    QS,
    Hybrid,
    Other,
}

impl From<Category> for StrategyCategory {
    fn from(c: Category) -> Self {
        match c {
            Category::BS => StrategyCategory::BS,
            Category::DS => StrategyCategory::DS,
            Category::IS => StrategyCategory::IS,
            Category::MS => StrategyCategory::MS,
            Category::QS => StrategyCategory::QS,
            Category::Hybrid => StrategyCategory::Hybrid,
        }
    }
}

impl fmt::Display for StrategyCategory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Classification {
    pub category: StrategyCategory,
    pub best: Option<MatchResult>,
    /// One result per registered algorithm, in registration order.
    pub results: Vec<MatchResult>,
}

/// Compares a human trace with every registered algorithm on the same
/// input and keeps the strongest match.
pub fn classify_strategy(human: &Trace, input: &[i64], config: &MatchConfig) -> Result<Classification, MatchError> {
    if human.is_empty() {
        return Err(MatchError::EmptyTrace);
    }
    let mut results = Vec::with_capacity(AlgorithmId::ALL.len());
    for alg in AlgorithmId::ALL {
        let (_, machine) = machine_trace(alg, input)?;
        results.push(match_traces(alg, human, &machine, input, config)?);
    }
    let best = results
        .iter()
        .filter(|r| r.matched)
        .fold(None::<&MatchResult>, |best, r| match best {
            Some(b) if !better(r, b) => Some(b),
            _ => Some(r),
        })
        .cloned();
    let category = best
        .as_ref()
        .map_or(StrategyCategory::Other, |b| b.algorithm.category().into());
    Ok(Classification {
        category,
        best,
        results,
    })
}

fn better(r: &MatchResult, b: &MatchResult) -> bool {
    let (rr, br) = (r.rho.unwrap_or(f64::MIN), b.rho.unwrap_or(f64::MIN));
    if rr != br {
        return rr > br;
    }
    if r.chi2 != b.chi2 {
        return r.chi2 > b.chi2;
    }
    r.machine_comparisons < b.machine_comparisons
}

#[cfg(test)]
mod tests {
    use super::*;

    fn example() -> (Trace, Trace) {
        let human = Trace::new(vec![
            (6, 4),
            (5, 2),
            (3, 1),
            (4, 2),
            (5, 4),
            (6, 5),
            (2, 1),
            (3, 2),
            (4, 3),
        ]);
        let machine = Trace::new(vec![
            (4, 6),
            (5, 2),
            (2, 4),
            (4, 5),
            (5, 6),
            (3, 1),
            (1, 2),
            (2, 3),
            (3, 4),
        ]);
        (human, machine)
    }

    #[test]
    fn universe_counts_self_pairs() {
        let u = PairUniverse::new(&[4, 6, 5, 2, 3, 1]).unwrap();
        assert_eq!(u.size(), 21);
        assert_eq!(u.pairs().len(), 21);
        assert_eq!(PairUniverse::new(&[1, 1]), Err(MatchError::DuplicateItems));
    }

    #[test]
    fn worked_contingency() {
        let (h, m) = example();
        let t = contingency(&h, &m, &[4, 6, 5, 2, 3, 1]).unwrap();
        assert_eq!(t.cells, [[13, 1], [1, 10]]);
        assert_eq!(t.total(), 25);
    }

    #[test]
    fn worked_ranks_give_point_nine() {
        let (h, m) = example();
        let (hr, mr) = common_pair_ranks(&h, &m);
        assert_eq!(hr.len(), 9);
        let (rho, p) = spearman(&hr, &mr).unwrap();
        assert!((rho - 0.9).abs() < 1e-12);
        assert!(p < 0.001);
    }

    #[test]
    fn foreign_items_rejected() {
        let h = Trace::new(vec![(1, 9)]);
        let m = Trace::new(vec![(1, 2)]);
        assert_eq!(contingency(&h, &m, &[1, 2, 3]), Err(MatchError::ItemMismatch(1, 9)));
    }

    #[test]
    fn worked_example_is_merge_sort() {
        let (h, _) = example();
        let c = classify_strategy(&h, &[4, 6, 5, 2, 3, 1], &MatchConfig::default()).unwrap();
        assert_eq!(c.category, StrategyCategory::MS);
        assert_eq!(c.results.len(), 24);
    }

    #[test]
    fn empty_trace_is_an_error() {
        let r = classify_strategy(&Trace::new(vec![]), &[1, 2], &MatchConfig::default());
        assert_eq!(r.unwrap_err(), MatchError::EmptyTrace);
    }
}
