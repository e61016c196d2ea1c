//! Synthetic categories: each spec describes its fibre constructively and
//! samples from it.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::ctest::program::{run_unchecked, Op, OpKind, Program, MAX_CONSTANT};
use crate::error::{Error, Result};
use crate::sample::{Payload, Role, Sample, SampleSet};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Shape {
    /// `location + scale · Z`, `Z ~ N(0, 1)`.
    Normal,
    /// `location + scale · U`, `U ~ U[0, 1)`.
    Uniform,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum CategoryGenerator {
    /// Programs from a template like `S?;A1;M?`, where each `?` is drawn
    /// per sample: the start from `start_range`, constants from
    /// `constant_range` (both inclusive).
    Ctest {
        template: String,
        start_range: (u32, u32),
        #[serde(default = "default_constants")]
        constant_range: (u8, u8),
        alphabet: u32,
        length: usize,
    },
    Numeric {
        shape: Shape,
        location: f64,
        scale: f64,
    },
}

fn default_constants() -> (u8, u8) {
    (1, MAX_CONSTANT)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CategorySpec {
    pub label: String,
    pub generator: CategoryGenerator,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Slot {
    Fixed(u32),
    Free,
}

#[derive(Debug, Clone, PartialEq)]
struct Template {
    start: Slot,
    ops: Vec<(OpKind, Slot)>,
}

fn parse_slot(text: &str, what: &str, template: &str) -> Result<Slot> {
    if text == "?" {
        return Ok(Slot::Free);
    }
    text.parse()
        .map(Slot::Fixed)
        .map_err(|_| Error::Config(format!("template `{template}`: bad {what} `{text}`")))
}

fn parse_template(template: &str) -> Result<Template> {
    let mut parts = template.split(';');
    let head = parts.next().unwrap_or_default();
    let start = head
        .strip_prefix('S')
        .ok_or_else(|| Error::Config(format!("template `{template}` must start with `S`")))?;
    let start = parse_slot(start, "start", template)?;
    let mut ops = Vec::new();
    for part in parts {
        let mut chars = part.chars();
        let kind = match chars.next() {
            Some('A') => OpKind::Add,
            Some('D') => OpKind::Sub,
            Some('M') => OpKind::Mul,
            _ => return Err(Error::Config(format!("template `{template}`: bad op `{part}`"))),
        };
        ops.push((kind, parse_slot(chars.as_str(), "constant", template)?));
    }
    if ops.is_empty() {
        return Err(Error::Config(format!("template `{template}` has no ops")));
    }
    Ok(Template { start, ops })
}

impl CategorySpec {
    pub fn ctest(label: &str, template: &str, start_range: (u32, u32), alphabet: u32, length: usize) -> Self {
        CategorySpec {
            label: label.into(),
            generator: CategoryGenerator::Ctest {
                template: template.into(),
                start_range,
                constant_range: default_constants(),
                alphabet,
                length,
            },
        }
    }

    pub fn numeric(label: &str, shape: Shape, location: f64, scale: f64) -> Self {
        CategorySpec {
            label: label.into(),
            generator: CategoryGenerator::Numeric { shape, location, scale },
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(format!("category `{}`: {m}", self.label)));
        match &self.generator {
            CategoryGenerator::Ctest {
                template,
                start_range,
                constant_range,
                alphabet,
                length,
            } => {
                let t = parse_template(template)?;
                if *alphabet < 2 || *length < 2 {
                    return bad("alphabet and length must be at least 2".into());
                }
                if start_range.0 > start_range.1 || start_range.1 >= *alphabet {
                    return bad(format!("start range {start_range:?} outside the alphabet"));
                }
                if constant_range.0 < 1 || constant_range.0 > constant_range.1 || constant_range.1 > MAX_CONSTANT {
                    return bad(format!("constant range {constant_range:?} outside 1..={MAX_CONSTANT}"));
                }
                if let Slot::Fixed(s) = t.start {
                    if s >= *alphabet {
                        return bad(format!("start {s} outside the alphabet"));
                    }
                }
                for (_, slot) in &t.ops {
                    if let Slot::Fixed(k) = slot {
                        if *k < 1 || *k > MAX_CONSTANT as u32 {
                            return bad(format!("constant {k} outside 1..={MAX_CONSTANT}"));
                        }
                    }
                }
                Ok(())
            }
            CategoryGenerator::Numeric { location, scale, .. } => {
                if !location.is_finite() || !(scale.is_finite() && *scale > 0.0) {
                    return bad("location must be finite and scale positive".into());
                }
                Ok(())
            }
        }
    }

    /// Log-probability (or log-density) of `x` under the category; `-inf`
    /// outside the fibre.
    pub fn log_likelihood(&self, x: &Sample) -> f64 {
        match (&self.generator, x.payload()) {
            (
                CategoryGenerator::Ctest {
                    template,
                    start_range,
                    constant_range,
                    alphabet,
                    length,
                },
                Payload::Symbols(seq),
            ) => {
                let Ok(t) = parse_template(template) else {
                    return f64::NEG_INFINITY;
                };
                if seq.len() != *length {
                    return f64::NEG_INFINITY;
                }
                let programs = all_programs(&t, *start_range, *constant_range);
                let hits = programs
                    .iter()
                    .filter(|p| run_unchecked(p, *length, *alphabet) == *seq)
                    .count();
                if hits == 0 {
                    f64::NEG_INFINITY
                } else {
                    (hits as f64 / programs.len() as f64).ln()
                }
            }
            (CategoryGenerator::Numeric { shape, location, scale }, Payload::Scalar(v)) => {
                let z = (v - location) / scale;
                match shape {
                    Shape::Normal => -0.5 * z * z - scale.ln() - 0.5 * (2.0 * std::f64::consts::PI).ln(),
                    Shape::Uniform if (0.0..1.0).contains(&z) => -scale.ln(),
                    Shape::Uniform => f64::NEG_INFINITY,
                }
            }
            _ => f64::NEG_INFINITY,
        }
    }

    pub fn contains(&self, x: &Sample) -> bool {
        self.log_likelihood(x) > f64::NEG_INFINITY
    }
}

fn draw(slot: Slot, range: (u32, u32), rng: &mut impl Rng) -> u32 {
    match slot {
        Slot::Fixed(v) => v,
        Slot::Free => rng.random_range(range.0..=range.1),
    }
}

fn all_programs(t: &Template, start_range: (u32, u32), constant_range: (u8, u8)) -> Vec<Program> {
    let starts: Vec<u32> = match t.start {
        Slot::Fixed(s) => vec![s],
        Slot::Free => (start_range.0..=start_range.1).collect(),
    };
    let mut op_lists: Vec<Vec<Op>> = vec![Vec::new()];
    for &(kind, slot) in &t.ops {
        let ks: Vec<u8> = match slot {
            Slot::Fixed(k) => vec![k as u8],
            Slot::Free => (constant_range.0..=constant_range.1).collect(),
        };
        op_lists = op_lists
            .into_iter()
            .flat_map(|prefix| {
                ks.iter().map(move |&k| {
                    let mut v = prefix.clone();
                    v.push(Op::new(kind, k).expect("validated constant"));
                    v
                })
            })
            .collect();
    }
    starts
        .iter()
        .flat_map(|&s| op_lists.iter().map(move |ops| Program::new(s, ops.clone()).expect("validated program")))
        .collect()
}

/// `m` iid draws from the category, ids `{label}-{i}`. The set (not the
/// samples) carries the label.
pub fn sample_category(spec: &CategorySpec, m: usize, seed: u64) -> Result<SampleSet> {
    if m == 0 {
        return Err(Error::EmptyInput("category sample count"));
    }
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let items = match &spec.generator {
        CategoryGenerator::Ctest {
            template,
            start_range,
            constant_range,
            alphabet,
            length,
        } => {
            let t = parse_template(template)?;
            let k_range = (constant_range.0 as u32, constant_range.1 as u32);
            (0..m)
                .map(|i| {
                    let start = draw(t.start, *start_range, &mut rng);
                    let ops = t
                        .ops
                        .iter()
                        .map(|&(kind, slot)| Op::new(kind, draw(slot, k_range, &mut rng) as u8))
                        .collect::<Result<Vec<_>>>()?;
                    let p = Program::new(start, ops)?;
                    Ok(Sample::symbols(format!("{}-{i}", spec.label), run_unchecked(&p, *length, *alphabet)))
                })
                .collect::<Result<Vec<_>>>()?
        }
        CategoryGenerator::Numeric { shape, location, scale } => (0..m)
            .map(|i| {
                let u: f64 = match shape {
                    Shape::Normal => StandardNormal.sample(&mut rng),
                    Shape::Uniform => rng.random::<f64>(),
                };
                Sample::scalar(format!("{}-{i}", spec.label), location + scale * u)
            })
            .collect::<Result<Vec<_>>>()?,
    };
    Ok(SampleSet::new(items, Role::Original)?.with_label(&spec.label))
}
