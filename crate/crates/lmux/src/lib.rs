//! Linguistic multiplexing over very long binary transport words.
//!
//! Ethernet PHY microframes carry more payload bits than their duty of
//! data/control octets strictly needs. This crate finds that slack with
//! an exact-arithmetic parameter search, represents rounds of transfer
//! units through a mixed-radix root/affix split, and binds the result to
//! bit-exact frame codecs that embed one timed event per frame in the
//! spare bits, in a save box, or in an integral spare unit.
//!
//! - [`model`]: transfer-unit alphabets, unit/value bands, PHY profiles
//! - [`engine`]: echo samples, root/affix rounds, exact width math
//! - [`plan`]: the search grid, configurator, and calculators
//! - [`codec`]: frame plans and the three event-embedding codecs
//! - [`sim`]: the seeded SplitMix64 fuzz harness

pub mod bits;
pub mod codec;
pub mod engine;
pub mod error;
pub mod model;
pub mod plan;
pub mod sim;

pub use bits::Bits;
pub use codec::{
    builtin_plan, builtin_plans, decode_frame, encode_frame, DecodedFrame, EmbedMode, EventStamp,
    FramePlan, SaveBox,
};
pub use engine::{decode_round, echo_sample, encode_round, min_bits_for, RoundCodeword, WideUint};
pub use error::{Error, Result};
pub use model::{decompose, Alphabet, Profile, ProfileCatalog, TransferUnit};
pub use plan::{
    alu_class, configure, divisors, echo_budget, max_units_per_round, redundancy, resolution,
    search, upper_modulus, AluClass, MuxConfig, SearchOptions, SearchRow,
};
pub use sim::{simulate, SimReport, SplitMix64, StreamSpec};
