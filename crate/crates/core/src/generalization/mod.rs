//! Multi-category generalization: synthetic category suites, k-shot
//! holdout evaluation of generators, and transport of families along
//! bijective re-encodings.

pub mod category;
pub mod functor;
pub mod generators;
pub mod holdout;
pub mod suite;

pub use category::{sample_category, CategoryGenerator, CategorySpec, Shape};
pub use functor::{pull_back, transport_family, transport_invariance_check, FunctorMap};
pub use generators::{
    baseline_copy_generator, ConstantGenerator, CopyGenerator, FreshSampleOracle, GenerationRequest, Generator,
};
pub use holdout::{holdout_eval, HoldoutConfig, HoldoutRow, HoldoutSummary, HoldoutTable, MIN_REFERENCE_SIZE};
pub use suite::{builtin_suites, default_family_for, numeric_suite, sequence_suite, CategorySuite};
