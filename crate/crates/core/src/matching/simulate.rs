use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::MatchError;
use crate::zoo::{run_with, AlgorithmId, QuestionSpec, Trace};

/// Output of an artificial participant.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Simulation {
    pub trace: Trace,
    /// Labels in the order the participant would submit them.
    pub answer: Vec<String>,
    pub outcomes: Vec<bool>,
}

/// Runs `alg` on the question's items, flipping each comparison outcome
/// with probability `noise`. The answer is whatever order the algorithm
/// produces under the flipped outcomes.
pub fn simulate_participant(
    alg: AlgorithmId,
    noise: f64,
    q: &QuestionSpec,
    seed: u64,
) -> Result<Simulation, MatchError> {
    if !(0.0..=1.0).contains(&noise) {
        return Err(MatchError::InvalidNoise(noise));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut less = |x: i64, y: i64| (x < y) != rng.random_bool(noise);
    let exec = run_with(alg, &q.values(), &mut less);
    let labels = q.label_map();
    Ok(Simulation {
        trace: exec.trace,
        answer: exec.output.iter().map(|v| labels[v].clone()).collect(),
        outcomes: exec.outcomes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::zoo::{generate_questions, machine_trace, QuestionKind};

    #[test]
    fn noiseless_matches_machine() {
        let qs = generate_questions(QuestionKind::Sort, 3, 1).unwrap();
        for q in &qs {
            for alg in AlgorithmId::ALL {
                let s = simulate_participant(alg, 0.0, q, 9).unwrap();
                assert_eq!(s.trace, machine_trace(alg, &q.values()).unwrap().1);
                assert_eq!(s.answer, q.expected_answer());
            }
        }
    }

    #[test]
    fn full_noise_reverses_a_pair() {
        let q = QuestionSpec {
            id: "t".into(),
            kind: QuestionKind::Sort,
            sublists: vec![vec![3, 7]],
            labels: vec![vec!["A".into(), "B".into()]],
        };
        let s = simulate_participant(AlgorithmId::IsLinearBwd, 1.0, &q, 0).unwrap();
        assert_eq!(s.trace.len(), 1);
        assert_eq!(s.answer, vec!["B", "A"]);
        assert!(simulate_participant(AlgorithmId::IsLinearBwd, 1.5, &q, 0).is_err());
    }
}
