use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::ctest::enumerate::{enumerate_minimal, prefix_steps};
use crate::ctest::program::{quantized_kt, run_unchecked, Op, OpKind, Program, MAX_CONSTANT};
use crate::delta::{delta, DeltaReport};
use crate::distinguisher::{Distinguisher, DistinguisherFamily};
use crate::error::{Error, Result};
use crate::sample::{Payload, Role, Sample, SampleSet};
use crate::scoring::ScoringFunction;

pub const DEFAULT_ALPHABET: u32 = 26;
pub const DEFAULT_MAX_ATTEMPTS: usize = 20_000;

#[derive(Debug, Clone, PartialEq)]
pub struct CtestItem {
    pub prefix: Vec<u32>,
    pub continuation: u32,
    pub difficulty_h: u32,
    pub minimal_program: Program,
    pub alphabet_size: u32,
    pub enumeration_bound: f64,
}

/// A prefix length that makes level `h` reachable with a program whose
/// every op is exercised by the prefix: 5 symbols up to h = 6, 9 above.
pub fn default_prefix_len(h: u32) -> usize {
    match h {
        0..=3 => 3,
        4..=6 => 5,
        _ => 9,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GenerationParams {
    pub h: u32,
    pub prefix_len: usize,
    pub alphabet: u32,
    pub kt_ceiling: f64,
    pub max_attempts: usize,
}

impl GenerationParams {
    pub fn new(h: u32) -> Self {
        GenerationParams {
            h,
            prefix_len: default_prefix_len(h),
            alphabet: DEFAULT_ALPHABET,
            kt_ceiling: h as f64 + 1.0,
            max_attempts: DEFAULT_MAX_ATTEMPTS,
        }
    }
}

fn random_program(rng: &mut ChaCha8Rng, ops: usize, alphabet: u32) -> Program {
    let start = rng.random_range(0..alphabet);
    let ops = (0..ops)
        .map(|_| {
            let kind = match rng.random_range(0..3) {
                0 => OpKind::Add,
                1 => OpKind::Sub,
                _ => OpKind::Mul,
            };
            Op {
                kind,
                k: rng.random_range(1..=MAX_CONSTANT),
            }
        })
        .collect();
    Program::new(start, ops).expect("ops is nonempty")
}

/// Rejection-sample programs at level `h` until one's prefix has a single
/// minimal explanation. Any other program reproducing that prefix then
/// sits at level ≥ h + 1, which is the uniqueness margin.
pub fn generate_item(h: u32, prefix_len: usize, alphabet: u32, seed: u64, kt_ceiling: f64) -> Result<CtestItem> {
    generate_item_with(
        &GenerationParams {
            h,
            prefix_len,
            alphabet,
            kt_ceiling,
            max_attempts: DEFAULT_MAX_ATTEMPTS,
        },
        seed,
    )
}

pub fn generate_item_with(params: &GenerationParams, seed: u64) -> Result<CtestItem> {
    let GenerationParams {
        h,
        prefix_len,
        alphabet,
        kt_ceiling,
        max_attempts,
    } = *params;
    if h < 3 || prefix_len < 3 {
        return Err(Error::InvalidArgument(format!("need h ≥ 3 and prefix_len ≥ 3, got {h} and {prefix_len}")));
    }
    if alphabet < 2 {
        return Err(Error::InvalidArgument("alphabet needs at least two symbols".into()));
    }
    if !(kt_ceiling >= h as f64 + 1.0) {
        return Err(Error::InvalidArgument(format!("kt ceiling {kt_ceiling} is below h + 1")));
    }
    let steps = prefix_steps(prefix_len);
    // level = ℓ + ⌈log₂ steps⌉ with ℓ = ops + 1
    let overhead = quantized_kt(0, steps) as i64;
    let n_ops = h as i64 - overhead - 1;
    if n_ops < 1 {
        return Err(Error::GenerationExhausted(0));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..max_attempts {
        let candidate = random_program(&mut rng, n_ops as usize, alphabet);
        let prefix = run_unchecked(&candidate, prefix_len, alphabet);
        let Ok(minimal) = enumerate_minimal(&prefix, kt_ceiling, alphabet) else {
            continue;
        };
        if let [only] = minimal.as_slice() {
            if only.level == h {
                return Ok(CtestItem {
                    prefix,
                    continuation: only.continuation,
                    difficulty_h: h,
                    minimal_program: only.program.clone(),
                    alphabet_size: alphabet,
                    enumeration_bound: kt_ceiling,
                });
            }
        }
    }
    Err(Error::GenerationExhausted(max_attempts))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ItemScore {
    Correct,
    Incorrect,
}

pub fn score_item(item: &CtestItem, answer: u32) -> Result<ItemScore> {
    if answer >= item.alphabet_size {
        return Err(Error::OutOfAlphabet {
            symbol: answer,
            alphabet: item.alphabet_size,
        });
    }
    Ok(if answer == item.continuation {
        ItemScore::Correct
    } else {
        ItemScore::Incorrect
    })
}

/// The item as a gap computation: `S = {continuation}`, `Ŝ = {answer}`,
/// `F = {exact match on the continuation}`, `σ = mean`. The gap is 0 for a
/// correct answer and 1 otherwise.
pub fn item_as_delta(item: &CtestItem, answer: u32) -> Result<DeltaReport> {
    score_item(item, answer)?;
    let target = Payload::Symbols(vec![item.continuation]);
    let original = SampleSet::new(vec![Sample::new("continuation", target.clone())?], Role::Original)?;
    let generated = SampleSet::new(vec![Sample::symbols("answer", vec![answer])], Role::Generated)?;
    let family = DistinguisherFamily::explicit("minimal-continuation", vec![Distinguisher::exact_match(target)])?;
    delta(&original, &generated, &family, &ScoringFunction::Mean)
}

/// The continuation the minimal program itself predicts.
pub fn minimal_program_answer(item: &CtestItem) -> u32 {
    run_unchecked(&item.minimal_program, item.prefix.len() + 1, item.alphabet_size)[item.prefix.len()]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ctest::program::parse_program;

    fn counting_item() -> CtestItem {
        CtestItem {
            prefix: vec![1, 2, 3, 4, 5],
            continuation: 6,
            difficulty_h: 4,
            minimal_program: parse_program("S1;A1").unwrap(),
            alphabet_size: 26,
            enumeration_bound: 8.0,
        }
    }

    #[test]
    fn scoring() {
        let item = counting_item();
        assert_eq!(score_item(&item, 6).unwrap(), ItemScore::Correct);
        assert_eq!(score_item(&item, 7).unwrap(), ItemScore::Incorrect);
        assert!(matches!(score_item(&item, 26), Err(Error::OutOfAlphabet { .. })));
    }

    #[test]
    fn binary_gap() {
        let item = counting_item();
        assert_eq!(item_as_delta(&item, 6).unwrap().delta, 0.0);
        assert_eq!(item_as_delta(&item, 7).unwrap().delta, 1.0);
        assert_eq!(minimal_program_answer(&item), 6);
    }

    #[test]
    fn generation_is_deterministic_and_sound() {
        let a = generate_item(5, 5, 26, 42, 6.0).unwrap();
        let b = generate_item(5, 5, 26, 42, 6.0).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.difficulty_h, 5);
        assert_eq!(a.minimal_program.token_len(), 3);
        assert_eq!(minimal_program_answer(&a), a.continuation);
    }

    #[test]
    fn level_three_needs_a_three_symbol_prefix() {
        assert!(matches!(
            generate_item(3, 5, 26, 0, 4.0),
            Err(Error::GenerationExhausted(0))
        ));
        let item = generate_item(3, 3, 26, 0, 4.0).unwrap();
        assert_eq!(item.minimal_program.token_len(), 2);
    }

    #[test]
    fn argument_checks() {
        assert!(generate_item(2, 5, 26, 0, 3.0).is_err());
        assert!(generate_item(5, 5, 26, 0, 5.5).is_err());
    }
}
