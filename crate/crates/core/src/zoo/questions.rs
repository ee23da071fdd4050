use std::collections::{BTreeMap, HashSet};
use std::fmt;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::json;

use super::{comparison_count, AlgorithmId, ZooError};
use crate::robot::{LtExpr, WorldState};

const MAX_REJECTIONS: usize = 10_000;
const MAX_WEIGHT: usize = 99;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QuestionKind {
    Merge,
    Sort,
}

impl fmt::Display for QuestionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            QuestionKind::Merge => "merge",
            QuestionKind::Sort => "sort",
        })
    }
}

/// One question: hidden weights grouped into sublists, with the letter
/// shown for each item.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuestionSpec {
    pub id: String,
    pub kind: QuestionKind,
    pub sublists: Vec<Vec<i64>>,
    pub labels: Vec<Vec<String>>,
}

impl QuestionSpec {
    pub fn values(&self) -> Vec<i64> {
        self.sublists.concat()
    }

    pub fn label_map(&self) -> BTreeMap<i64, String> {
        self.values().into_iter().zip(self.labels.concat()).collect()
    }

    pub fn value_of(&self, label: &str) -> Option<i64> {
        self.labels
            .concat()
            .iter()
            .position(|l| l == label)
            .map(|i| self.values()[i])
    }

    /// Labels ordered from lightest to heaviest.
    pub fn expected_answer(&self) -> Vec<String> {
        self.label_map().into_values().collect()
    }

    /// Robot start state: one expression per sublist for merging, one per
    /// item for sorting.
    pub fn start_state(&self) -> WorldState {
        match self.kind {
            QuestionKind::Merge => WorldState::from_exprs(
                self.sublists
                    .iter()
                    .map(|s| LtExpr::new(s.clone()).expect("sublists are ascending"))
                    .collect(),
            ),
            QuestionKind::Sort => WorldState::from_values(&self.values()),
        }
    }

    /// What a participant sees: labels only.
    pub fn ui_payload(&self) -> serde_json::Value {
        json!({ "id": self.id, "kind": self.kind, "labels": self.labels })
    }
}

fn letters(n: usize, rng: &mut ChaCha8Rng) -> Vec<String> {
    let mut ls: Vec<String> = (0..n).map(|i| ((b'A' + i as u8) as char).to_string()).collect();
    ls.shuffle(rng);
    ls
}

fn distinct_weights(n: usize, rng: &mut ChaCha8Rng) -> Vec<i64> {
    rand::seq::index::sample(rng, MAX_WEIGHT, n)
        .into_iter()
        .map(|i| i as i64 + 1)
        .collect()
}

fn sort_candidate(rng: &mut ChaCha8Rng) -> Vec<Vec<i64>> {
    let n = rng.random_range(6..=10);
    vec![distinct_weights(n, rng)]
}

fn merge_candidate(rng: &mut ChaCha8Rng) -> Vec<Vec<i64>> {
    let l = rng.random_range(1..=4usize);
    let r = (l as i64 + rng.random_range(-1..=1i64)).clamp(1, 4) as usize;
    let w = distinct_weights(l + r, rng);
    let (mut a, mut b) = (w[..l].to_vec(), w[l..].to_vec());
    a.sort_unstable();
    b.sort_unstable();
    vec![a, b]
}

fn acceptable(kind: QuestionKind, sublists: &[Vec<i64>]) -> bool {
    match kind {
        QuestionKind::Merge => true,
        QuestionKind::Sort => {
            let v = &sublists[0];
            let merge = comparison_count(AlgorithmId::MERGE_BASELINE, v).expect("distinct weights");
            let insertion = comparison_count(AlgorithmId::INSERTION_BASELINE, v).expect("distinct weights");
            merge < insertion
        }
    }
}

/// Deterministic question list: equal seeds give equal lists.
pub fn generate_questions(kind: QuestionKind, count: usize, seed: u64) -> Result<Vec<QuestionSpec>, ZooError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    let mut seen = HashSet::new();
    let mut rejections = 0;
    while out.len() < count {
        let sublists = match kind {
            QuestionKind::Merge => merge_candidate(&mut rng),
            QuestionKind::Sort => sort_candidate(&mut rng),
        };
        if !acceptable(kind, &sublists) || !seen.insert(sublists.clone()) {
            rejections += 1;
            if rejections >= MAX_REJECTIONS {
                return Err(ZooError::GenerationExhausted(rejections));
            }
            continue;
        }
        let n: usize = sublists.iter().map(Vec::len).sum();
        let mut names = letters(n, &mut rng).into_iter();
        let labels = sublists
            .iter()
            .map(|s| names.by_ref().take(s.len()).collect())
            .collect();
        out.push(QuestionSpec {
            id: format!("{kind}-{seed}-{}", out.len()),
            kind,
            sublists,
            labels,
        });
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BankSizes {
    pub merge_training: usize,
    pub merge_test: usize,
    pub sort_training: usize,
    pub sort_test: usize,
}

impl Default for BankSizes {
    fn default() -> Self {
        BankSizes {
            merge_training: 6,
            merge_test: 5,
            sort_training: 4,
            sort_test: 8,
        }
    }
}

/// The four question sets used by one experiment.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuestionBank {
    pub seed: u64,
    pub merge_training: Vec<QuestionSpec>,
    pub merge_test: Vec<QuestionSpec>,
    pub sort_training: Vec<QuestionSpec>,
    pub sort_test: Vec<QuestionSpec>,
}

impl QuestionBank {
    pub fn generate(seed: u64, sizes: BankSizes) -> Result<QuestionBank, ZooError> {
        let mut merges = generate_questions(QuestionKind::Merge, sizes.merge_training + sizes.merge_test, seed)?;
        let mut sorts = generate_questions(
            QuestionKind::Sort,
            sizes.sort_training + sizes.sort_test,
            seed.wrapping_add(1),
        )?;
        let merge_test = merges.split_off(sizes.merge_training);
        let sort_test = sorts.split_off(sizes.sort_training);
        Ok(QuestionBank {
            seed,
            merge_training: merges,
            merge_test,
            sort_training: sorts,
            sort_test,
        })
    }

    pub fn find(&self, id: &str) -> Option<&QuestionSpec> {
        self.merge_training
            .iter()
            .chain(&self.merge_test)
            .chain(&self.sort_training)
            .chain(&self.sort_test)
            .find(|q| q.id == id)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sort_questions_favour_merging() {
        let qs = generate_questions(QuestionKind::Sort, 20, 7).unwrap();
        for q in &qs {
            let v = q.values();
            assert!((6..=10).contains(&v.len()));
            assert!(
                comparison_count(AlgorithmId::MsBuCascade, &v).unwrap()
                    < comparison_count(AlgorithmId::IsLinearBwd, &v).unwrap()
            );
        }
    }

    #[test]
    fn merge_questions_shape() {
        for q in generate_questions(QuestionKind::Merge, 30, 3).unwrap() {
            assert_eq!(q.sublists.len(), 2);
            for s in &q.sublists {
                assert!((1..=4).contains(&s.len()));
                assert!(s.windows(2).all(|w| w[0] < w[1]));
            }
            let all = q.values();
            assert_eq!(all.iter().collect::<HashSet<_>>().len(), all.len());
        }
    }

    #[test]
    fn deterministic_under_seed() {
        let a = QuestionBank::generate(11, BankSizes::default()).unwrap();
        let b = QuestionBank::generate(11, BankSizes::default()).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, QuestionBank::generate(12, BankSizes::default()).unwrap());
        assert_eq!(a.merge_training.len(), 6);
        assert_eq!(a.sort_test.len(), 8);
    }

    #[test]
    fn payload_hides_weights() {
        let q = &generate_questions(QuestionKind::Sort, 1, 5).unwrap()[0];
        let text = q.ui_payload().to_string();
        assert!(!text.contains("sublists"));
        for v in q.values() {
            assert!(!text.contains(&format!(",{v},")) && !text.contains(&format!("[{v},")));
        }
        let expected = q.expected_answer();
        let weights: Vec<i64> = expected.iter().map(|l| q.value_of(l).unwrap()).collect();
        assert!(weights.windows(2).all(|w| w[0] < w[1]));
    }
}
