//! Levin search over the sequence language.
//!
//! Every program that reproduces a prefix of length `L` does so in exactly
//! `L − 1` steps, so among those programs the quantized Kt level is
//! determined by token length alone. The search walks token lengths in
//! ascending order and stops after the first length that yields a match.

use rayon::prelude::*;

use crate::ctest::program::{kt, quantized_kt, run_unchecked, Op, Program};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Explanation {
    pub program: Program,
    pub continuation: u32,
    pub kt: f64,
    pub level: u32,
}

/// Steps a program spends reproducing a prefix of this length.
pub fn prefix_steps(prefix_len: usize) -> usize {
    prefix_len - 1
}

/// Op sequences of length `d` consistent with the prefix transitions, in
/// lexicographic order. Ops past the last observed transition are free.
fn extend(prefix: &[u32], alphabet: u32, ops: &mut Vec<Op>, d: usize, out: &mut Vec<Vec<Op>>) {
    let j = ops.len();
    if j == d {
        out.push(ops.clone());
        return;
    }
    for op in Op::all() {
        if j + 1 < prefix.len() && op.apply(prefix[j], alphabet) != prefix[j + 1] {
            continue;
        }
        ops.push(op);
        extend(prefix, alphabet, ops, d, out);
        ops.pop();
    }
}

fn explanations_at(prefix: &[u32], alphabet: u32, token_len: usize) -> Vec<Explanation> {
    let d = token_len - 1;
    let first: Vec<Op> = Op::all()
        .filter(|op| op.apply(prefix[0], alphabet) == prefix[1])
        .collect();
    let candidates: Vec<Vec<Op>> = first
        .par_iter()
        .map(|&op| {
            let mut out = Vec::new();
            let mut ops = vec![op];
            extend(prefix, alphabet, &mut ops, d, &mut out);
            out
        })
        .collect::<Vec<_>>()
        .into_iter()
        .flatten()
        .collect();
    let steps = prefix_steps(prefix.len());
    candidates
        .into_iter()
        .filter_map(|ops| {
            let program = Program::new(prefix[0], ops).ok()?;
            let run = run_unchecked(&program, prefix.len() + 1, alphabet);
            (run[..prefix.len()] == *prefix).then(|| Explanation {
                continuation: run[prefix.len()],
                kt: kt(token_len, steps),
                level: quantized_kt(token_len, steps),
                program,
            })
        })
        .collect()
}

/// All programs with `ℓ ≤ kt_bound` that reproduce `prefix` at the least
/// quantized Kt, in (ℓ, lexicographic) order.
pub fn enumerate_minimal(prefix: &[u32], kt_bound: f64, alphabet: u32) -> Result<Vec<Explanation>> {
    if prefix.len() < 2 {
        return Err(Error::InvalidArgument("prefix needs at least two symbols".into()));
    }
    if let Some(&bad) = prefix.iter().find(|&&s| s >= alphabet) {
        return Err(Error::OutOfAlphabet { symbol: bad, alphabet });
    }
    let max_len = if kt_bound.is_finite() && kt_bound >= 0.0 {
        kt_bound.floor() as usize
    } else {
        return Err(Error::InvalidArgument(format!("bad kt bound {kt_bound}")));
    };
    for token_len in 2..=max_len {
        let found = explanations_at(prefix, alphabet, token_len);
        if !found.is_empty() {
            return Ok(found);
        }
    }
    Err(Error::NoExplanation)
}
