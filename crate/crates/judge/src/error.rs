use catfid_core::Codec;

#[derive(Debug, thiserror::Error)]
pub enum JudgeError {
    #[error("unknown session `{0}`")]
    UnknownSession(String),

    #[error("unknown item `{0}`")]
    UnknownItem(String),

    #[error("session `{0}` is closed")]
    SessionClosed(String),

    #[error("session `{0}` is still open")]
    SessionOpen(String),

    #[error("judge `{0}` has already finished this session")]
    RepeatJudge(String),

    #[error("{0} payloads cannot be shown to judges")]
    UnrenderableCodec(Codec),

    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    #[error("items without any verdict: {}", .0.join(", "))]
    IncompleteJudging(Vec<String>),

    #[error("invalid request: {0}")]
    Invalid(String),

    #[error("storage: {0}")]
    Storage(String),

    #[error(transparent)]
    Core(#[from] catfid_core::Error),
}
