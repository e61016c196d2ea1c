//! C-test items: sequences with a unique minimal explanation under a fixed
//! program language, scored as a binary special case of the gap.

pub mod battery;
pub mod enumerate;
pub mod item;
pub mod program;

pub use battery::{generate_battery, read_answers, read_battery, score_battery, write_battery, BatteryScore};
pub use enumerate::{enumerate_minimal, Explanation};
pub use item::{
    default_prefix_len, generate_item, generate_item_with, item_as_delta, minimal_program_answer, score_item,
    CtestItem, GenerationParams, ItemScore,
};
pub use program::{kt, parse_program, quantized_kt, run_program, Op, OpKind, Program};
