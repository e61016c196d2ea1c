//! A tiny modular-arithmetic sequence language.
//!
//! A program is a start symbol and a nonempty cycle of operations
//! `ADD(k)`, `SUB(k)`, `MUL(k)` with `k ∈ 1..=4`, all mod the alphabet size.
//! Running it emits the start, then applies the operations cyclically and
//! emits the register after each one.
//!
//! Text form: `S<int>(;(A|D|M)<int>)+`, e.g. `S1;M2;A1`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, ParseError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum OpKind {
    Add,
    Sub,
    Mul,
}

impl OpKind {
    fn letter(self) -> char {
        match self {
            OpKind::Add => 'A',
            OpKind::Sub => 'D',
            OpKind::Mul => 'M',
        }
    }
}

pub const MAX_CONSTANT: u8 = 4;

/// Ordered by kind (`A < D < M`), then constant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Op {
    pub kind: OpKind,
    pub k: u8,
}

impl Op {
    pub fn new(kind: OpKind, k: u8) -> Result<Self> {
        if (1..=MAX_CONSTANT).contains(&k) {
            Ok(Op { kind, k })
        } else {
            Err(Error::InvalidArgument(format!("op constant {k} outside 1..={MAX_CONSTANT}")))
        }
    }

    /// All 12 operations in lexicographic order.
    pub fn all() -> impl Iterator<Item = Op> {
        [OpKind::Add, OpKind::Sub, OpKind::Mul]
            .into_iter()
            .flat_map(|kind| (1..=MAX_CONSTANT).map(move |k| Op { kind, k }))
    }

    pub fn apply(self, x: u32, alphabet: u32) -> u32 {
        let (x, k, a) = (x as u64, self.k as u64, alphabet as u64);
        let y = match self.kind {
            OpKind::Add => (x + k) % a,
            OpKind::Sub => (x + a - k % a) % a,
            OpKind::Mul => (x * k) % a,
        };
        y as u32
    }
}

/// Lexicographic order on the token sequence (start, op₁, op₂, …).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct Program {
    start: u32,
    ops: Vec<Op>,
}

impl Program {
    pub fn new(start: u32, ops: Vec<Op>) -> Result<Self> {
        if ops.is_empty() {
            return Err(Error::InvalidArgument("program needs at least one op".into()));
        }
        Ok(Program { start, ops })
    }

    pub fn start(&self) -> u32 {
        self.start
    }

    pub fn ops(&self) -> &[Op] {
        &self.ops
    }

    /// `ℓ(p) = 1 + |ops|`: one token for the start, one per op.
    pub fn token_len(&self) -> usize {
        1 + self.ops.len()
    }
}

impl fmt::Display for Program {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "S{}", self.start)?;
        for op in &self.ops {
            write!(f, ";{}{}", op.kind.letter(), op.k)?;
        }
        Ok(())
    }
}

impl From<Program> for String {
    fn from(p: Program) -> String {
        p.to_string()
    }
}

impl TryFrom<String> for Program {
    type Error = ParseError;

    fn try_from(s: String) -> std::result::Result<Self, ParseError> {
        parse_program(&s)
    }
}

impl FromStr for Program {
    type Err = ParseError;

    fn from_str(s: &str) -> std::result::Result<Self, ParseError> {
        parse_program(s)
    }
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl Cursor<'_> {
    fn error(&self, expected: &str) -> ParseError {
        ParseError {
            offset: self.pos,
            expected: expected.to_string(),
        }
    }

    fn eat(&mut self, byte: u8) -> bool {
        if self.bytes.get(self.pos) == Some(&byte) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn int(&mut self) -> std::result::Result<u32, ParseError> {
        let begin = self.pos;
        while self.bytes.get(self.pos).is_some_and(u8::is_ascii_digit) {
            self.pos += 1;
        }
        if begin == self.pos {
            return Err(self.error("integer"));
        }
        std::str::from_utf8(&self.bytes[begin..self.pos])
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or(ParseError {
                offset: begin,
                expected: "integer that fits in 32 bits".into(),
            })
    }
}

pub fn parse_program(text: &str) -> std::result::Result<Program, ParseError> {
    let mut cur = Cursor {
        bytes: text.as_bytes(),
        pos: 0,
    };
    if !cur.eat(b'S') {
        return Err(cur.error("`S`"));
    }
    let start = cur.int()?;
    let mut ops = Vec::new();
    loop {
        if cur.pos == cur.bytes.len() && !ops.is_empty() {
            break;
        }
        if !cur.eat(b';') {
            return Err(cur.error(if ops.is_empty() { "`;`" } else { "`;` or end of input" }));
        }
        let kind = match cur.bytes.get(cur.pos) {
            Some(b'A') => OpKind::Add,
            Some(b'D') => OpKind::Sub,
            Some(b'M') => OpKind::Mul,
            _ => return Err(cur.error("one of `A`, `D`, `M`")),
        };
        cur.pos += 1;
        let at = cur.pos;
        let k = cur.int()?;
        if !(1..=MAX_CONSTANT as u32).contains(&k) {
            return Err(ParseError {
                offset: at,
                expected: format!("constant in 1..={MAX_CONSTANT}"),
            });
        }
        ops.push(Op { kind, k: k as u8 });
    }
    Ok(Program { start, ops })
}

/// Emit `n` symbols. Each op application is one step; `n − 1` are needed.
pub fn run_program(p: &Program, n: usize, step_budget: usize, alphabet: u32) -> Result<Vec<u32>> {
    if n == 0 {
        return Err(Error::InvalidArgument("need at least one symbol".into()));
    }
    if p.start >= alphabet {
        return Err(Error::OutOfAlphabet {
            symbol: p.start,
            alphabet,
        });
    }
    let needed = n - 1;
    if needed > step_budget {
        return Err(Error::StepBudgetExceeded {
            needed,
            budget: step_budget,
        });
    }
    Ok(run_unchecked(p, n, alphabet))
}

pub(crate) fn run_unchecked(p: &Program, n: usize, alphabet: u32) -> Vec<u32> {
    let mut out = Vec::with_capacity(n);
    let mut reg = p.start;
    out.push(reg);
    for op in p.ops.iter().cycle().take(n.saturating_sub(1)) {
        reg = op.apply(reg, alphabet);
        out.push(reg);
    }
    out
}

/// Levin complexity `ℓ + log₂(steps)`.
pub fn kt(token_len: usize, steps: usize) -> f64 {
    assert!(steps >= 1, "kt needs at least one step");
    token_len as f64 + (steps as f64).log2()
}

/// `⌈ℓ + log₂(steps)⌉`, computed in integers.
pub fn quantized_kt(token_len: usize, steps: usize) -> u32 {
    assert!(steps >= 1, "kt needs at least one step");
    let ceil_log2 = usize::BITS - (steps - 1).leading_zeros();
    token_len as u32 + if steps == 1 { 0 } else { ceil_log2 }
}
