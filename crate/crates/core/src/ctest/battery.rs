//! Battery files.
//!
//! Items and the answer key are separate JSONL files in the same order:
//! `{"prefix": [..], "alphabet": 26, "h": 5}` per item line and
//! `{"continuation": 7, "program": "S1;A2"}` per key line. Answers to score
//! are `{"answer": 7}` per line.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::ctest::item::{
    generate_item_with, item_as_delta, score_item, CtestItem, GenerationParams, ItemScore,
};
use crate::ctest::program::Program;
use crate::error::{Error, Result};
use crate::seeds::derive_seed;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BatteryLine {
    pub prefix: Vec<u32>,
    pub alphabet: u32,
    pub h: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KeyLine {
    pub continuation: u32,
    pub program: Program,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnswerLine {
    pub answer: u32,
}

/// `count` items, item `i` generated from `derive_seed(seed, i)`.
pub fn generate_battery(params: &GenerationParams, count: usize, seed: u64) -> Result<Vec<CtestItem>> {
    (0..count)
        .map(|i| generate_item_with(params, derive_seed(seed, i as u64)))
        .collect()
}

fn write_jsonl<T: Serialize>(path: &Path, rows: impl IntoIterator<Item = T>) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    for row in rows {
        serde_json::to_writer(&mut w, &row)?;
        w.write_all(b"\n").map_err(|e| Error::io(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

pub(crate) fn read_jsonl<T: DeserializeOwned>(path: &Path) -> Result<Vec<T>> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut rows = Vec::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        rows.push(serde_json::from_str(&line).map_err(|e| Error::data(path, i + 1, e.to_string()))?);
    }
    Ok(rows)
}

pub fn write_battery(items: &[CtestItem], battery: &Path, key: &Path) -> Result<()> {
    write_jsonl(
        battery,
        items.iter().map(|it| BatteryLine {
            prefix: it.prefix.clone(),
            alphabet: it.alphabet_size,
            h: it.difficulty_h,
        }),
    )?;
    write_jsonl(
        key,
        items.iter().map(|it| KeyLine {
            continuation: it.continuation,
            program: it.minimal_program.clone(),
        }),
    )
}

pub fn read_battery(battery: &Path, key: &Path) -> Result<Vec<CtestItem>> {
    let lines: Vec<BatteryLine> = read_jsonl(battery)?;
    let keys: Vec<KeyLine> = read_jsonl(key)?;
    if lines.len() != keys.len() {
        return Err(Error::data(
            key,
            keys.len().min(lines.len()) + 1,
            format!("key has {} lines but battery has {}", keys.len(), lines.len()),
        ));
    }
    Ok(lines
        .into_iter()
        .zip(keys)
        .map(|(l, k)| CtestItem {
            prefix: l.prefix,
            continuation: k.continuation,
            difficulty_h: l.h,
            minimal_program: k.program,
            alphabet_size: l.alphabet,
            enumeration_bound: l.h as f64 + 1.0,
        })
        .collect())
}

pub fn read_answers(path: &Path) -> Result<Vec<u32>> {
    Ok(read_jsonl::<AnswerLine>(path)?.into_iter().map(|a| a.answer).collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoredItem {
    pub index: usize,
    pub answer: u32,
    pub score: ItemScore,
    pub delta: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BatteryScore {
    pub items: Vec<ScoredItem>,
    pub correct: usize,
    pub total: usize,
    pub accuracy: f64,
}

pub fn score_battery(items: &[CtestItem], answers: &[u32]) -> Result<BatteryScore> {
    if items.len() != answers.len() {
        return Err(Error::InvalidArgument(format!(
            "{} answers for {} items",
            answers.len(),
            items.len()
        )));
    }
    if items.is_empty() {
        return Err(Error::EmptyInput("battery"));
    }
    let scored = items
        .iter()
        .zip(answers)
        .enumerate()
        .map(|(index, (item, &answer))| {
            Ok(ScoredItem {
                index,
                answer,
                score: score_item(item, answer)?,
                delta: item_as_delta(item, answer)?.delta,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let correct = scored.iter().filter(|s| s.score == ItemScore::Correct).count();
    Ok(BatteryScore {
        total: scored.len(),
        accuracy: correct as f64 / scored.len() as f64,
        items: scored,
        correct,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ctest::item::minimal_program_answer;

    #[test]
    fn write_read_score() {
        let dir = tempfile::tempdir().unwrap();
        let items = generate_battery(&GenerationParams::new(5), 4, 9).unwrap();
        let (b, k) = (dir.path().join("b.jsonl"), dir.path().join("k.jsonl"));
        write_battery(&items, &b, &k).unwrap();
        let back = read_battery(&b, &k).unwrap();
        assert_eq!(back.len(), 4);
        for (x, y) in items.iter().zip(&back) {
            assert_eq!((&x.prefix, x.continuation, &x.minimal_program), (&y.prefix, y.continuation, &y.minimal_program));
        }
        let answers: Vec<u32> = back.iter().map(minimal_program_answer).collect();
        let score = score_battery(&back, &answers).unwrap();
        assert_eq!(score.correct, 4);
        assert!(score.items.iter().all(|s| s.delta == 0.0));
    }
}
