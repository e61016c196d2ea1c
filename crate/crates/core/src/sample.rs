//! Samples and sample multisets.
//!
//! A [`Sample`] is an opaque payload plus named real-valued features. A
//! [`SampleSet`] is a finite, nonempty multiset of samples: payload
//! duplicates are allowed, ids are not.

use std::collections::{BTreeMap, HashSet};
use std::fmt;

use base64::Engine as _;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// How a payload is to be read.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Codec {
    Utf8Text,
    SymbolSequence,
    Scalar,
    OpaqueBytes,
}

impl fmt::Display for Codec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Codec::Utf8Text => "utf8-text",
            Codec::SymbolSequence => "symbol-sequence",
            Codec::Scalar => "scalar",
            Codec::OpaqueBytes => "opaque-bytes",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Payload {
    Text(String),
    Symbols(Vec<u32>),
    Scalar(f64),
    Bytes(Vec<u8>),
}

impl Payload {
    pub fn codec(&self) -> Codec {
        match self {
            Payload::Text(_) => Codec::Utf8Text,
            Payload::Symbols(_) => Codec::SymbolSequence,
            Payload::Scalar(_) => Codec::Scalar,
            Payload::Bytes(_) => Codec::OpaqueBytes,
        }
    }

    /// Canonical byte encoding used by byte-level distinguishers.
    ///
    /// Text is its UTF-8 encoding, symbols are LEB128 varints in order,
    /// scalars are the little-endian IEEE-754 bits, and opaque bytes are
    /// passed through.
    pub fn to_bytes(&self) -> Vec<u8> {
        match self {
            Payload::Text(s) => s.as_bytes().to_vec(),
            Payload::Symbols(symbols) => {
                let mut out = Vec::with_capacity(symbols.len());
                for &s in symbols {
                    let mut v = s;
                    loop {
                        let byte = (v & 0x7f) as u8;
                        v >>= 7;
                        if v == 0 {
                            out.push(byte);
                            break;
                        }
                        out.push(byte | 0x80);
                    }
                }
                out
            }
            Payload::Scalar(x) => x.to_le_bytes().to_vec(),
            Payload::Bytes(b) => b.clone(),
        }
    }

    /// JSON form used in the sample interchange format.
    pub fn to_json(&self) -> serde_json::Value {
        match self {
            Payload::Text(s) => serde_json::Value::String(s.clone()),
            Payload::Symbols(s) => serde_json::Value::from(s.clone()),
            Payload::Scalar(x) => serde_json::Value::from(*x),
            Payload::Bytes(b) => {
                serde_json::Value::String(base64::engine::general_purpose::STANDARD.encode(b))
            }
        }
    }

    pub fn from_json(codec: Codec, value: &serde_json::Value) -> std::result::Result<Self, String> {
        use serde_json::Value;
        match (codec, value) {
            (Codec::Utf8Text, Value::String(s)) => Ok(Payload::Text(s.clone())),
            (Codec::OpaqueBytes, Value::String(s)) => base64::engine::general_purpose::STANDARD
                .decode(s)
                .map(Payload::Bytes)
                .map_err(|e| format!("bad base64 payload: {e}")),
            (Codec::SymbolSequence, Value::Array(items)) => items
                .iter()
                .map(|v| {
                    v.as_u64()
                        .and_then(|n| u32::try_from(n).ok())
                        .ok_or_else(|| format!("symbol {v} is not a non-negative 32-bit integer"))
                })
                .collect::<std::result::Result<Vec<_>, _>>()
                .map(Payload::Symbols),
            (Codec::Scalar, Value::Number(n)) => {
                let x = n.as_f64().ok_or("scalar payload is not a number")?;
                if x.is_finite() {
                    Ok(Payload::Scalar(x))
                } else {
                    Err("scalar payload is not finite".into())
                }
            }
            (codec, other) => Err(format!("payload {other} does not match codec {codec}")),
        }
    }
}

/// One element of a sample set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SampleRecord", into = "SampleRecord")]
pub struct Sample {
    id: String,
    payload: Payload,
    features: BTreeMap<String, f64>,
    label: Option<String>,
}

impl Sample {
    pub fn new(id: impl Into<String>, payload: Payload) -> Result<Self> {
        let id = id.into();
        if let Payload::Scalar(x) = payload {
            if !x.is_finite() {
                return Err(Error::NonFiniteFeature {
                    sample: id,
                    feature: "<payload>".into(),
                });
            }
        }
        Ok(Sample {
            id,
            payload,
            features: BTreeMap::new(),
            label: None,
        })
    }

    pub fn scalar(id: impl Into<String>, value: f64) -> Result<Self> {
        Sample::new(id, Payload::Scalar(value))
    }

    pub fn symbols(id: impl Into<String>, symbols: Vec<u32>) -> Self {
        Sample {
            id: id.into(),
            payload: Payload::Symbols(symbols),
            features: BTreeMap::new(),
            label: None,
        }
    }

    pub fn text(id: impl Into<String>, text: impl Into<String>) -> Self {
        Sample {
            id: id.into(),
            payload: Payload::Text(text.into()),
            features: BTreeMap::new(),
            label: None,
        }
    }

    pub fn with_feature(mut self, name: impl Into<String>, value: f64) -> Result<Self> {
        let name = name.into();
        if !value.is_finite() {
            return Err(Error::NonFiniteFeature {
                sample: self.id,
                feature: name,
            });
        }
        self.features.insert(name, value);
        Ok(self)
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = Some(label.into());
        self
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn payload(&self) -> &Payload {
        &self.payload
    }

    pub fn codec(&self) -> Codec {
        self.payload.codec()
    }

    pub fn features(&self) -> &BTreeMap<String, f64> {
        &self.features
    }

    pub fn feature(&self, name: &str) -> Result<f64> {
        self.features
            .get(name)
            .copied()
            .ok_or_else(|| Error::MissingFeature {
                sample: self.id.clone(),
                feature: name.to_string(),
            })
    }

    pub fn label(&self) -> Option<&str> {
        self.label.as_deref()
    }

    /// Copy with a new id and payload, keeping features and label.
    pub fn with_payload(&self, id: impl Into<String>, payload: Payload) -> Self {
        Sample {
            id: id.into(),
            payload,
            features: self.features.clone(),
            label: self.label.clone(),
        }
    }

    pub(crate) fn without_label(&self) -> Self {
        Sample {
            label: None,
            ..self.clone()
        }
    }
}

/// On-the-wire shape of a sample: one JSON object per JSONL line.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SampleRecord {
    pub id: String,
    pub codec: Codec,
    pub payload: serde_json::Value,
    #[serde(default)]
    pub features: BTreeMap<String, serde_json::Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
}

impl TryFrom<SampleRecord> for Sample {
    type Error = String;

    fn try_from(record: SampleRecord) -> std::result::Result<Self, String> {
        let payload = Payload::from_json(record.codec, &record.payload)?;
        let mut features = BTreeMap::new();
        for (name, value) in record.features {
            let x = match &value {
                serde_json::Value::Number(n) => n.as_f64(),
                serde_json::Value::String(s)
                    if matches!(s.as_str(), "NaN" | "nan" | "Infinity" | "-Infinity" | "inf" | "-inf") =>
                {
                    return Err(format!("feature `{name}` is not finite ({s})"));
                }
                _ => None,
            };
            match x {
                Some(x) if x.is_finite() => {
                    features.insert(name, x);
                }
                Some(_) => return Err(format!("feature `{name}` is not finite")),
                None => return Err(format!("feature `{name}` is not a number: {value}")),
            }
        }
        Ok(Sample {
            id: record.id,
            payload,
            features,
            label: record.label,
        })
    }
}

impl From<Sample> for SampleRecord {
    fn from(s: Sample) -> Self {
        SampleRecord {
            id: s.id,
            codec: s.payload.codec(),
            payload: s.payload.to_json(),
            features: s
                .features
                .into_iter()
                .map(|(k, v)| (k, serde_json::Value::from(v)))
                .collect(),
            label: s.label,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Role {
    Original,
    Generated,
}

/// A finite nonempty multiset of samples with unique ids.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleSet {
    items: Vec<Sample>,
    label: Option<String>,
    role: Role,
}

impl SampleSet {
    pub fn new(items: Vec<Sample>, role: Role) -> Result<Self> {
        if items.is_empty() {
            return Err(Error::EmptyInput("sample set"));
        }
        let mut seen = HashSet::with_capacity(items.len());
        for s in &items {
            if !seen.insert(s.id.as_str()) {
                return Err(Error::DuplicateId(s.id.clone()));
            }
        }
        Ok(SampleSet {
            items,
            label: None,
            role,
        })
    }

    /// Scalar-payload samples carrying the value both as payload and as
    /// feature `name`. Ids are `{name}-{index}`.
    pub fn from_feature_values(name: &str, values: &[f64], role: Role) -> Result<Self> {
        let items = values
            .iter()
            .enumerate()
            .map(|(i, &v)| Sample::scalar(format!("{name}-{i}"), v)?.with_feature(name, v))
            .collect::<Result<Vec<_>>>()?;
        SampleSet::new(items, role)
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = Some(label.into());
        self
    }

    pub fn items(&self) -> &[Sample] {
        &self.items
    }

    pub fn into_items(self) -> Vec<Sample> {
        self.items
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn label(&self) -> Option<&str> {
        self.label.as_deref()
    }

    pub fn role(&self) -> Role {
        self.role
    }

    /// Sub-multiset selected by index; indices may repeat (resampling), in
    /// which case ids are suffixed to stay unique.
    pub fn select(&self, indices: &[usize], role: Role) -> Result<Self> {
        let mut counts = vec![0usize; self.items.len()];
        let items = indices
            .iter()
            .map(|&i| {
                let s = &self.items[i];
                counts[i] += 1;
                if counts[i] == 1 {
                    s.clone()
                } else {
                    Sample {
                        id: format!("{}#{}", s.id, counts[i] - 1),
                        ..s.clone()
                    }
                }
            })
            .collect();
        SampleSet::new(items, role)
    }
}

impl<'a> IntoIterator for &'a SampleSet {
    type Item = &'a Sample;
    type IntoIter = std::slice::Iter<'a, Sample>;

    fn into_iter(self) -> Self::IntoIter {
        self.items.iter()
    }
}
