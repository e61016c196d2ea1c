//! Blinded judging sessions. Judges see shuffled items from an original and
//! a generated set, call each one, and the per-item fraction of "original"
//! calls becomes a single distinguisher whose gap is reported at close.
//!
//! All state lives in an append-only JSONL event log and is rebuilt by
//! replaying it.

pub mod api;
pub mod error;
pub mod log;
pub mod store;

pub use api::{router, serve, SharedStore};
pub use error::JudgeError;
pub use log::{Event, EventKind, EventLog};
pub use store::{
    Call, CreateRequest, ItemReveal, JudgeStore, Next, NextItem, Session, SessionConfig, SessionResult,
    VerdictRequest,
};
