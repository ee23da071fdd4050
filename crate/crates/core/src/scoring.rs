//! Performance scores, comprehension, teaching effects and hypothesis-space
//! arithmetic.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::stats::{average_ranks, spearman, welch_t_test as stats_welch, StatsError};

pub const DEFAULT_DISCOUNT: f64 = 0.5;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ScoringError {
    #[error("sequences do not hold the same values")]
    MultisetMismatch,
    #[error("sequence contains repeated values")]
    DuplicateValues,
    #[error("need at least {need} items, got {got}")]
    DegenerateLength { need: usize, got: usize },
    #[error("no responses for concept {0}")]
    EmptyGroup(String),
    #[error("concept {0} is not measured")]
    ConceptMissing(String),
    #[error("response refers to unknown concept {0}")]
    UnknownBlock(String),
    #[error("curriculum ranks must be distinct, {0} repeats")]
    DuplicateRank(u32),
    #[error("domain error: {0}")]
    DomainError(String),
    #[error("samples too small or constant")]
    DegenerateSample,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PerformanceScore {
    pub value: f64,
    pub rho: f64,
    pub discounted: bool,
}

/// Rank agreement between a submitted order and the correct one. Negative
/// agreement is scaled by `discount`.
pub fn perf<T: Ord + Clone + std::hash::Hash>(
    human: &[T],
    oracle: &[T],
    discount: f64,
) -> Result<PerformanceScore, ScoringError> {
    if human.len() < 2 {
        return Err(ScoringError::DegenerateLength {
            need: 2,
            got: human.len(),
        });
    }
    let distinct: BTreeSet<&T> = oracle.iter().collect();
    if distinct.len() != oracle.len() {
        return Err(ScoringError::DuplicateValues);
    }
    let mut h: Vec<&T> = human.iter().collect();
    h.sort();
    if h.len() != oracle.len() || !h.iter().copied().eq(distinct.iter().copied()) {
        return Err(ScoringError::MultisetMismatch);
    }
    let position: HashMap<&T, f64> = oracle.iter().enumerate().map(|(i, v)| (v, i as f64)).collect();
    let xs = average_ranks(&human.iter().map(|v| position[v]).collect::<Vec<_>>());
    let ys: Vec<f64> = (1..=oracle.len()).map(|r| r as f64).collect();
    let (rho, _) = spearman(&xs, &ys).expect("lengths checked");
    Ok(if rho >= 0.0 {
        PerformanceScore {
            value: rho,
            rho,
            discounted: false,
        }
    } else {
        PerformanceScore {
            value: rho.abs() * discount,
            rho,
            discounted: true,
        }
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CurriculumBlock {
    pub rank: u32,
    pub concept: String,
    pub examples: String,
    /// Learner whose output is shown as explanation, if any.
    pub learner: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CurriculumSpec {
    blocks: Vec<CurriculumBlock>,
}

impl CurriculumSpec {
    pub fn new(mut blocks: Vec<CurriculumBlock>) -> Result<CurriculumSpec, ScoringError> {
        blocks.sort_by_key(|b| b.rank);
        if let Some(w) = blocks.windows(2).find(|w| w[0].rank == w[1].rank) {
            return Err(ScoringError::DuplicateRank(w[0].rank));
        }
        Ok(CurriculumSpec { blocks })
    }

    pub fn blocks(&self) -> &[CurriculumBlock] {
        &self.blocks
    }
}

/// A scored test answer for one concept.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestResponse {
    pub participant: String,
    pub concept: String,
    pub score: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComprehensionMeasurement {
    pub rank: u32,
    pub concept: String,
    pub tau: f64,
    pub aided: bool,
    pub responses: usize,
}

/// Mean score per curriculum block, in rank order.
pub fn comprehension(
    curriculum: &CurriculumSpec,
    responses: &[TestResponse],
) -> Result<Vec<ComprehensionMeasurement>, ScoringError> {
    let mut sums: BTreeMap<&str, (f64, usize)> = BTreeMap::new();
    for r in responses {
        if !curriculum.blocks.iter().any(|b| b.concept == r.concept) {
            return Err(ScoringError::UnknownBlock(r.concept.clone()));
        }
        let e = sums.entry(&r.concept).or_default();
        e.0 += r.score;
        e.1 += 1;
    }
    curriculum
        .blocks
        .iter()
        .map(|b| {
            let &(sum, n) = sums
                .get(b.concept.as_str())
                .ok_or_else(|| ScoringError::EmptyGroup(b.concept.clone()))?;
            Ok(ComprehensionMeasurement {
                rank: b.rank,
                concept: b.concept.clone(),
                tau: sum / n as f64,
                aided: b.learner.is_some(),
                responses: n,
            })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EffectClass {
    Beneficial,
    Harmful,
    None,
}

impl fmt::Display for EffectClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EffectClass::Beneficial => "beneficial",
            EffectClass::Harmful => "harmful",
            EffectClass::None => "none",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Effect {
    pub value: f64,
    pub class: EffectClass,
}

impl Effect {
    pub fn from_difference(value: f64) -> Effect {
        let class = if value > 0.0 {
            EffectClass::Beneficial
        } else if value < 0.0 {
            EffectClass::Harmful
        } else {
            EffectClass::None
        };
        Effect { value, class }
    }
}

fn tau_of(c: &[ComprehensionMeasurement], concept: &str) -> Result<f64, ScoringError> {
    c.iter()
        .find(|m| m.concept == concept)
        .map(|m| m.tau)
        .ok_or_else(|| ScoringError::ConceptMissing(concept.to_string()))
}

/// Difference in comprehension of `concept` between two curricula.
pub fn seq_effect(
    c1: &[ComprehensionMeasurement],
    c2: &[ComprehensionMeasurement],
    concept: &str,
) -> Result<Effect, ScoringError> {
    Ok(Effect::from_difference(tau_of(c1, concept)? - tau_of(c2, concept)?))
}

/// Comprehension with explanations minus comprehension without.
pub fn explanatory_effect(c_ex: f64, c_h: f64) -> Effect {
    Effect::from_difference(c_ex - c_h)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlumerParams {
    /// Meta-rule count.
    pub m: u32,
    /// Clause bound.
    pub n: u32,
    /// Predicate count.
    pub p: u32,
    /// Maximum body literals.
    pub j: u32,
}

/// Hypothesis-space size `m^n · p^((1+j)n)`, exactly.
pub fn blumer_bound(params: &BlumerParams) -> BigUint {
    let BlumerParams { m, n, p, j } = *params;
    BigUint::from(m).pow(n) * BigUint::from(p).pow((1 + j) * n)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Improvement {
    pub holds: bool,
    pub lhs: f64,
    pub rhs: f64,
}

/// Tests `u·ln p < (u+k)·ln(p+c)`.
pub fn curriculum_improvement(u: i64, p: i64, k: i64, c: i64) -> Result<Improvement, ScoringError> {
    if p < 1 || p + c < 1 {
        return Err(ScoringError::DomainError(format!(
            "predicate counts {p} and {} must be at least 1",
            p + c
        )));
    }
    if u < 0 || u + k < 0 {
        return Err(ScoringError::DomainError(format!(
            "program sizes {u} and {} must be non-negative",
            u + k
        )));
    }
    let lhs = u as f64 * (p as f64).ln();
    let rhs = (u + k) as f64 * ((p + c) as f64).ln();
    Ok(Improvement {
        holds: lhs < rhs,
        lhs,
        rhs,
    })
}

/// Welch's unequal-variance t test: `(t, df, two-tailed p)`.
pub fn welch_t_test(xs: &[f64], ys: &[f64]) -> Result<(f64, f64, f64), ScoringError> {
    if xs == ys && xs.len() >= 2 {
        return Ok((0.0, (2 * xs.len() - 2) as f64, 1.0));
    }
    stats_welch(xs, ys).map_err(|e| match e {
        StatsError::DegenerateLength { .. } | StatsError::ZeroVariance | StatsError::LengthMismatch(..) => {
            ScoringError::DegenerateSample
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn worked_scores() {
        let oracle = [1, 2, 3, 4, 5, 6];
        let s = perf(&[4, 6, 5, 2, 3, 1], &oracle, DEFAULT_DISCOUNT).unwrap();
        assert!(s.discounted);
        assert_abs_diff_eq!(s.value, 0.386, epsilon = 5e-4);
        let s = perf(&[1, 2, 6, 3, 4, 5], &oracle, DEFAULT_DISCOUNT).unwrap();
        assert_abs_diff_eq!(s.value, 0.657, epsilon = 5e-4);
        assert_eq!(perf(&oracle, &oracle, 0.5).unwrap().value, 1.0);
        assert_eq!(perf(&[6, 5, 4, 3, 2, 1], &oracle, 0.5).unwrap().value, 0.5);
    }

    #[test]
    fn perf_on_labels() {
        let s = perf(&["B", "A", "C"], &["A", "B", "C"], 0.5).unwrap();
        assert_abs_diff_eq!(s.value, 0.5, epsilon = 1e-12);
    }

    #[test]
    fn perf_input_checks() {
        assert_eq!(perf(&[1, 2], &[1, 3], 0.5), Err(ScoringError::MultisetMismatch));
        assert_eq!(perf(&[1, 2, 3], &[1, 2], 0.5), Err(ScoringError::MultisetMismatch));
        assert_eq!(perf(&[1, 1], &[1, 1], 0.5), Err(ScoringError::DuplicateValues));
        assert!(matches!(
            perf(&[1], &[1], 0.5),
            Err(ScoringError::DegenerateLength { .. })
        ));
    }

    fn block(rank: u32, concept: &str, learner: Option<&str>) -> CurriculumBlock {
        CurriculumBlock {
            rank,
            concept: concept.into(),
            examples: format!("E_{concept}"),
            learner: learner.map(String::from),
        }
    }

    fn resp(p: &str, concept: &str, score: f64) -> TestResponse {
        TestResponse {
            participant: p.into(),
            concept: concept.into(),
            score,
        }
    }

    #[test]
    fn comprehension_means() {
        let cur = CurriculumSpec::new(vec![block(1, "sorter", None), block(0, "merger", Some("learner"))]).unwrap();
        assert_eq!(cur.blocks()[0].concept, "merger");
        let c = comprehension(
            &cur,
            &[
                resp("a", "merger", 0.4),
                resp("b", "merger", 0.6),
                resp("a", "sorter", 1.0),
            ],
        )
        .unwrap();
        assert_abs_diff_eq!(c[0].tau, 0.5, epsilon = 1e-12);
        assert!(c[0].aided && !c[1].aided);
        assert_eq!(c[1].tau, 1.0);
        assert_eq!(
            comprehension(&cur, &[resp("a", "merger", 1.0)]),
            Err(ScoringError::EmptyGroup("sorter".into()))
        );
        assert_eq!(
            comprehension(&cur, &[resp("a", "other", 1.0)]),
            Err(ScoringError::UnknownBlock("other".into()))
        );
        assert_eq!(
            CurriculumSpec::new(vec![block(1, "a", None), block(1, "b", None)]),
            Err(ScoringError::DuplicateRank(1))
        );
    }

    #[test]
    fn effects() {
        let m = |tau| {
            vec![ComprehensionMeasurement {
                rank: 0,
                concept: "sorter".into(),
                tau,
                aided: false,
                responses: 1,
            }]
        };
        let e = seq_effect(&m(0.8), &m(0.6), "sorter").unwrap();
        assert_abs_diff_eq!(e.value, 0.2, epsilon = 1e-12);
        assert_eq!(e.class, EffectClass::Beneficial);
        assert_eq!(seq_effect(&m(0.6), &m(0.6), "sorter").unwrap().class, EffectClass::None);
        assert_eq!(
            seq_effect(&m(0.6), &m(0.8), "sorter").unwrap().class,
            EffectClass::Harmful
        );
        assert!(matches!(
            seq_effect(&m(0.6), &m(0.6), "x"),
            Err(ScoringError::ConceptMissing(_))
        ));
        assert_eq!(explanatory_effect(0.7, 0.7).class, EffectClass::None);
        let e = explanatory_effect(0.9, 0.6);
        assert_eq!(e.class, EffectClass::Beneficial);
        assert_abs_diff_eq!(e.value, 0.3, epsilon = 1e-12);
    }

    #[test]
    fn bounds() {
        let b = |m, n, p, j| blumer_bound(&BlumerParams { m, n, p, j });
        assert_eq!(b(2, 3, 8, 2), BigUint::from(1_073_741_824u64));
        assert_eq!(b(5, 0, 9, 3), BigUint::from(1u32));
        assert_eq!(b(1, 1, 1, 1), BigUint::from(1u32));
    }

    #[test]
    fn improvement() {
        let i = curriculum_improvement(3, 8, 2, -2).unwrap();
        assert!(i.holds);
        assert_abs_diff_eq!(i.lhs, 6.238, epsilon = 5e-4);
        assert_abs_diff_eq!(i.rhs, 8.959, epsilon = 5e-4);
        assert!(!curriculum_improvement(0, 5, 0, 0).unwrap().holds);
        assert!(!curriculum_improvement(4, 7, 0, 0).unwrap().holds);
        assert!(curriculum_improvement(3, 0, 1, 1).is_err());
        assert!(curriculum_improvement(3, 2, -4, 0).is_err());
    }

    #[test]
    fn welch_edges() {
        let (t, _, p) = welch_t_test(&[1.0, 2.0, 3.0], &[1.0, 2.0, 3.0]).unwrap();
        assert_eq!((t, p), (0.0, 1.0));
        assert_eq!(welch_t_test(&[1.0], &[2.0, 3.0]), Err(ScoringError::DegenerateSample));
        assert_eq!(
            welch_t_test(&[1.0, 1.0], &[2.0, 2.0]),
            Err(ScoringError::DegenerateSample)
        );
    }
}
