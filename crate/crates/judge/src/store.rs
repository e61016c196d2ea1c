//! Session state as a pure fold over the event log.

use std::collections::{BTreeMap, HashMap};
use std::path::Path;

use catfid_core::{
    bootstrap_delta_ci, delta, derive_seed, BootstrapInterval, Codec, DeltaReport, Distinguisher,
    DistinguisherFamily, Epsilon, Params, Role, Sample, SampleSet, ScoringFunction,
};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::JudgeError;
use crate::log::{Event, EventKind, EventLog};

pub const BOOTSTRAP_ROUNDS: usize = 1000;
pub const BOOTSTRAP_LEVEL: f64 = 0.95;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Call {
    Original,
    Generated,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SessionConfig {
    #[serde(default = "default_epsilon")]
    pub epsilon: f64,
    /// Each judge sees this many items, a contiguous run of the shuffled
    /// order starting at a judge-specific offset. `None` means all items.
    #[serde(default)]
    pub items_per_judge: Option<usize>,
    /// When false, a judge who has finished gets 409 from further `next`
    /// calls instead of the done marker.
    #[serde(default = "default_true")]
    pub allow_repeat_judges: bool,
}

fn default_epsilon() -> f64 {
    0.5
}
fn default_true() -> bool {
    true
}

impl Default for SessionConfig {
    fn default() -> Self {
        SessionConfig {
            epsilon: default_epsilon(),
            items_per_judge: None,
            allow_repeat_judges: true,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CreateRequest {
    pub original: Vec<Sample>,
    pub generated: Vec<Sample>,
    #[serde(default)]
    pub config: SessionConfig,
    #[serde(default)]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct StoredItem {
    item_id: String,
    provenance: Role,
    sample: Sample,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct CreatedData {
    session_id: String,
    seed: u64,
    config: SessionConfig,
    items: Vec<StoredItem>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerdictRequest {
    pub judge_id: String,
    pub item_id: String,
    pub call: Call,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct VerdictData {
    session_id: String,
    judge_id: String,
    item_id: String,
    call: Call,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct ClosedData {
    session_id: String,
}

/// What a judge is shown: no provenance, no features, no original id.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NextItem {
    pub item_id: String,
    pub codec: Codec,
    pub payload: serde_json::Value,
    pub answered: usize,
    pub total: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Next {
    Item(NextItem),
    Done,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ItemReveal {
    pub item_id: String,
    pub provenance: Role,
    pub fraction_original: f64,
    pub judgements: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SessionResult {
    pub session_id: String,
    pub delta: f64,
    pub pass: bool,
    pub epsilon: f64,
    pub items: Vec<ItemReveal>,
    pub report: DeltaReport,
    pub bootstrap: BootstrapInterval,
    pub judges: usize,
    pub verdicts: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Session {
    id: String,
    seed: u64,
    config: SessionConfig,
    items: Vec<StoredItem>,
    index: HashMap<String, usize>,
    created_at: String,
    /// First call per (judge, item).
    verdicts: BTreeMap<(String, String), Call>,
    result: Option<SessionResult>,
}

impl Session {
    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn is_closed(&self) -> bool {
        self.result.is_some()
    }

    pub fn created_at(&self) -> &str {
        &self.created_at
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    /// Item ids in shuffled order.
    pub fn item_ids(&self) -> impl Iterator<Item = &str> {
        self.items.iter().map(|i| i.item_id.as_str())
    }

    pub fn verdict_count(&self) -> usize {
        self.verdicts.len()
    }

    fn assignment(&self, judge: &str) -> Vec<usize> {
        let n = self.items.len();
        match self.config.items_per_judge {
            Some(k) if k < n => {
                // FNV-1a over the judge id, mixed with the session seed
                let mut h: u64 = 0xcbf2_9ce4_8422_2325;
                for b in judge.bytes() {
                    h = (h ^ b as u64).wrapping_mul(0x0100_0000_01b3);
                }
                let offset = (derive_seed(self.seed, h) % n as u64) as usize;
                (0..k).map(|i| (offset + i) % n).collect()
            }
            _ => (0..n).collect(),
        }
    }

    fn next_for(&self, judge: &str) -> Result<Next, JudgeError> {
        if self.is_closed() {
            return Err(JudgeError::SessionClosed(self.id.clone()));
        }
        let assigned = self.assignment(judge);
        let answered = assigned
            .iter()
            .filter(|&&i| self.verdicts.contains_key(&(judge.to_string(), self.items[i].item_id.clone())))
            .count();
        let pending = assigned
            .iter()
            .find(|&&i| !self.verdicts.contains_key(&(judge.to_string(), self.items[i].item_id.clone())));
        match pending {
            Some(&i) => {
                let item = &self.items[i];
                Ok(Next::Item(NextItem {
                    item_id: item.item_id.clone(),
                    codec: item.sample.codec(),
                    payload: item.sample.payload().to_json(),
                    answered,
                    total: assigned.len(),
                }))
            }
            None if !self.config.allow_repeat_judges => Err(JudgeError::RepeatJudge(judge.to_string())),
            None => Ok(Next::Done),
        }
    }

    fn unanswered(&self) -> Vec<String> {
        let judged: std::collections::HashSet<&str> = self.verdicts.keys().map(|(_, item)| item.as_str()).collect();
        self.items
            .iter()
            .filter(|i| !judged.contains(i.item_id.as_str()))
            .map(|i| i.item_id.clone())
            .collect()
    }

    /// Per-item fraction of judges calling it original.
    fn fractions(&self) -> BTreeMap<String, (f64, usize)> {
        let mut counts: HashMap<&str, (usize, usize)> = HashMap::new();
        for ((_, item), call) in &self.verdicts {
            let c = counts.entry(item.as_str()).or_default();
            c.1 += 1;
            if *call == Call::Original {
                c.0 += 1;
            }
        }
        self.items
            .iter()
            .map(|i| {
                let (orig, total) = counts.get(i.item_id.as_str()).copied().unwrap_or_default();
                let f = if total == 0 { 0.0 } else { orig as f64 / total as f64 };
                (i.item_id.clone(), (f, total))
            })
            .collect()
    }

    /// The empirical human gap. Every item needs at least one verdict.
    pub fn session_delta(&self) -> Result<(DeltaReport, BootstrapInterval), JudgeError> {
        let missing = self.unanswered();
        if !missing.is_empty() {
            return Err(JudgeError::IncompleteJudging(missing));
        }
        let fractions = self.fractions();
        let set = |role: Role| -> Result<SampleSet, JudgeError> {
            let items = self
                .items
                .iter()
                .filter(|i| i.provenance == role)
                .map(|i| Sample::new(i.item_id.clone(), i.sample.payload().clone()))
                .collect::<Result<Vec<_>, _>>()?;
            Ok(SampleSet::new(items, role)?)
        };
        let (s, g) = (set(Role::Original)?, set(Role::Generated)?);
        let judge = Distinguisher::new(
            "human-judges",
            Params::HumanEmpirical {
                fractions: fractions.iter().map(|(k, (f, _))| (k.clone(), *f)).collect(),
            },
        );
        let family = DistinguisherFamily::explicit("human", vec![judge])?;
        let report = delta(&s, &g, &family, &ScoringFunction::Mean)?;
        let ci = bootstrap_delta_ci(
            &s,
            &g,
            &family,
            &ScoringFunction::Mean,
            BOOTSTRAP_ROUNDS,
            BOOTSTRAP_LEVEL,
            derive_seed(self.seed, 1),
        )?;
        Ok((report, ci))
    }

    fn compute_result(&self) -> Result<SessionResult, JudgeError> {
        let (report, bootstrap) = self.session_delta()?;
        let fractions = self.fractions();
        let judges: std::collections::BTreeSet<&str> = self.verdicts.keys().map(|(j, _)| j.as_str()).collect();
        Ok(SessionResult {
            session_id: self.id.clone(),
            delta: report.delta,
            pass: report.delta <= self.config.epsilon,
            epsilon: self.config.epsilon,
            items: self
                .items
                .iter()
                .map(|i| ItemReveal {
                    item_id: i.item_id.clone(),
                    provenance: i.provenance,
                    fraction_original: fractions[&i.item_id].0,
                    judgements: fractions[&i.item_id].1,
                })
                .collect(),
            report,
            bootstrap,
            judges: judges.len(),
            verdicts: self.verdicts.len(),
        })
    }

    pub fn result(&self) -> Option<&SessionResult> {
        self.result.as_ref()
    }
}

fn renderable(sample: &Sample) -> Result<(), JudgeError> {
    match sample.codec() {
        Codec::Utf8Text | Codec::SymbolSequence => Ok(()),
        other => Err(JudgeError::UnrenderableCodec(other)),
    }
}

/// Shuffle `S ∪ Ŝ` with the session seed and give each item an opaque id.
fn blind_items(original: Vec<Sample>, generated: Vec<Sample>, seed: u64) -> Vec<StoredItem> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut items: Vec<(Role, Sample)> = original
        .into_iter()
        .map(|s| (Role::Original, s))
        .chain(generated.into_iter().map(|s| (Role::Generated, s)))
        .collect();
    items.shuffle(&mut rng);
    let mut used = std::collections::HashSet::new();
    items
        .into_iter()
        .map(|(provenance, sample)| {
            let item_id = loop {
                let id = format!("item-{:016x}", rng.random::<u64>());
                if used.insert(id.clone()) {
                    break id;
                }
            };
            StoredItem {
                item_id,
                provenance,
                sample,
            }
        })
        .collect()
}

/// All sessions plus the log that produced them.
#[derive(Debug)]
pub struct JudgeStore {
    log: EventLog,
    sessions: BTreeMap<String, Session>,
}

fn decode<T: serde::de::DeserializeOwned>(event: &Event) -> Result<T, JudgeError> {
    serde_json::from_value(event.data.clone())
        .map_err(|e| JudgeError::Storage(format!("event {}: {e}", event.seq)))
}

impl JudgeStore {
    /// Open the log at `path` and replay it.
    pub fn open(path: &Path) -> Result<Self, JudgeError> {
        let (log, events) = EventLog::open(path)?;
        let mut store = JudgeStore {
            log,
            sessions: BTreeMap::new(),
        };
        for event in &events {
            store.apply(event)?;
        }
        Ok(store)
    }

    fn apply(&mut self, event: &Event) -> Result<(), JudgeError> {
        match event.kind {
            EventKind::Created => {
                let d: CreatedData = decode(event)?;
                let index = d.items.iter().enumerate().map(|(i, it)| (it.item_id.clone(), i)).collect();
                self.sessions.insert(
                    d.session_id.clone(),
                    Session {
                        id: d.session_id,
                        seed: d.seed,
                        config: d.config,
                        items: d.items,
                        index,
                        created_at: event.ts.clone(),
                        verdicts: BTreeMap::new(),
                        result: None,
                    },
                );
            }
            EventKind::Verdict => {
                let d: VerdictData = decode(event)?;
                let s = self.session_mut(&d.session_id)?;
                s.verdicts.entry((d.judge_id, d.item_id)).or_insert(d.call);
            }
            EventKind::Closed => {
                let d: ClosedData = decode(event)?;
                let s = self.session_mut(&d.session_id)?;
                if s.result.is_none() {
                    s.result = Some(s.compute_result()?);
                }
            }
        }
        Ok(())
    }

    fn session_mut(&mut self, id: &str) -> Result<&mut Session, JudgeError> {
        self.sessions
            .get_mut(id)
            .ok_or_else(|| JudgeError::UnknownSession(id.to_string()))
    }

    pub fn session(&self, id: &str) -> Result<&Session, JudgeError> {
        self.sessions
            .get(id)
            .ok_or_else(|| JudgeError::UnknownSession(id.to_string()))
    }

    pub fn sessions(&self) -> impl Iterator<Item = &Session> {
        self.sessions.values()
    }

    fn record(&mut self, kind: EventKind, data: impl Serialize) -> Result<(), JudgeError> {
        let data = serde_json::to_value(data).map_err(|e| JudgeError::Storage(e.to_string()))?;
        let event = self.log.append(kind, data)?;
        self.apply(&event)
    }

    pub fn create_session(&mut self, request: CreateRequest) -> Result<String, JudgeError> {
        if request.original.is_empty() || request.generated.is_empty() {
            return Err(JudgeError::EmptyInput("both sample sets must be nonempty"));
        }
        for s in request.original.iter().chain(&request.generated) {
            renderable(s)?;
        }
        Epsilon::new(request.config.epsilon)?;
        if request.config.items_per_judge == Some(0) {
            return Err(JudgeError::Invalid("items_per_judge must be at least 1".into()));
        }
        let seed = request.seed.unwrap_or_else(|| rand::rng().random());
        let session_id = uuid::Uuid::new_v4().to_string();
        let items = blind_items(request.original, request.generated, seed);
        self.record(
            EventKind::Created,
            CreatedData {
                session_id: session_id.clone(),
                seed,
                config: request.config,
                items,
            },
        )?;
        Ok(session_id)
    }

    pub fn next_item(&self, session: &str, judge: &str) -> Result<Next, JudgeError> {
        self.session(session)?.next_for(judge)
    }

    /// `Ok(true)` when recorded, `Ok(false)` when the (judge, item) pair
    /// already had a verdict.
    pub fn submit_verdict(&mut self, session: &str, verdict: VerdictRequest) -> Result<bool, JudgeError> {
        let s = self.session(session)?;
        if s.is_closed() {
            return Err(JudgeError::SessionClosed(session.to_string()));
        }
        if !s.index.contains_key(&verdict.item_id) {
            return Err(JudgeError::UnknownItem(verdict.item_id));
        }
        if verdict.judge_id.is_empty() {
            return Err(JudgeError::Invalid("judge_id must be nonempty".into()));
        }
        if s.verdicts.contains_key(&(verdict.judge_id.clone(), verdict.item_id.clone())) {
            return Ok(false);
        }
        self.record(
            EventKind::Verdict,
            VerdictData {
                session_id: session.to_string(),
                judge_id: verdict.judge_id,
                item_id: verdict.item_id,
                call: verdict.call,
            },
        )?;
        Ok(true)
    }

    /// Close and reveal. Closing again returns the stored result.
    pub fn close_session(&mut self, session: &str) -> Result<SessionResult, JudgeError> {
        let s = self.session(session)?;
        if let Some(r) = &s.result {
            return Ok(r.clone());
        }
        s.compute_result()?;
        self.record(
            EventKind::Closed,
            ClosedData {
                session_id: session.to_string(),
            },
        )?;
        Ok(self.session(session)?.result.clone().expect("closed by apply"))
    }

    pub fn result(&self, session: &str) -> Result<&SessionResult, JudgeError> {
        let s = self.session(session)?;
        s.result.as_ref().ok_or_else(|| JudgeError::SessionOpen(session.to_string()))
    }
}
