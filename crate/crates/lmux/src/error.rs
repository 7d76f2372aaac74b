//! Error types shared across the toolkit.

use thiserror::Error;

/// Everything that can go wrong while validating alphabets, searching
/// configurations, or running a frame codec.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    // --- alphabet / unit mapping ---
    #[error("filler units carry no value")]
    FillerHasNoValue,
    #[error("{kind} code {code} is outside the alphabet band (limit {limit})")]
    UnitOutOfBand {
        kind: &'static str,
        code: u32,
        limit: u32,
    },
    #[error("unit value {value} falls in the unassigned extras band")]
    UnassignedUnitValue { value: u32 },
    #[error("unit value {value} is outside the alphabet (modulus {modulus})")]
    UnitValueOutOfRange { value: u32, modulus: u32 },
    #[error("invalid alphabet: {reason}")]
    InvalidAlphabet { reason: String },

    // --- round engine ---
    #[error("round root is not a native sample (root >= root_modulus^count)")]
    RootNotNative,
    #[error("affix length {actual} does not match count * bypass width {expected}")]
    AffixLengthMismatch { expected: usize, actual: usize },

    // --- configuration search ---
    #[error("modulus {modulus} must exceed 256 (the data octets leave no extra items)")]
    ModulusTooSmall { modulus: u32 },
    #[error("extra bits per round must be at least 1")]
    ExtraBitsRequired,
    #[error("{scope} round of {units} units is not a multiple of the gathering factor {gather}")]
    GatherMisaligned {
        scope: &'static str,
        units: u32,
        gather: u32,
    },
    #[error("target scope {target} is smaller than one round of {units} units")]
    TargetTooSmall { target: u32, units: u32 },
    #[error(
        "capacity violation in the {scope} round: {root_modulus}^{count} exceeds 2^{root_bits}"
    )]
    CapacityExceeded {
        scope: &'static str,
        root_modulus: u32,
        count: u32,
        root_bits: u32,
    },
    #[error("negative spare: rounds need {needed} bits but the payload holds only {available}")]
    NegativeSpare { needed: u64, available: u64 },

    // --- frame codec ---
    #[error("plan is inconsistent: {reason}")]
    PlanMismatch { reason: String },
    #[error("duty holds {actual} units but the profile requires {expected}")]
    DutyLengthMismatch { expected: usize, actual: usize },
    #[error("unit {index} has kind {kind}, only data/ctrl are legal in a duty stream")]
    IllegalDutyKind { index: usize, kind: &'static str },
    #[error("event stamp does not fit the plan mode: {reason}")]
    EventModeMismatch { reason: &'static str },
    #[error("event unit index {index} is outside the stream (limit {limit})")]
    EventIndexOutOfRange { index: usize, limit: usize },
    #[error("event position code {code} is outside the event band (limit {limit})")]
    EventCodeOutOfRange { code: u32, limit: u32 },
    #[error("event position {position} overflows the {width}-bit stamp field")]
    StampOverflow { position: u64, width: u32 },
    #[error("round {round} holds a non-native root sample")]
    FrameRootNotNative { round: usize },
    #[error("round {round}: {source}")]
    RoundDecode { round: usize, source: Box<Error> },
    #[error("stream holds multiple event units (indices {first} and {second})")]
    MultipleEvents { first: usize, second: usize },
    #[error("an event unit landed in the spare slot")]
    EventInSpareSlot,
    #[error("save box mismatch: {reason}")]
    SaveBoxMismatch { reason: &'static str },
    #[error("payload is {actual} bits, plan expects {expected}")]
    PayloadLengthMismatch { expected: usize, actual: usize },
    #[error("bad hex payload: {reason}")]
    BadHex { reason: String },

    // --- profile catalog ---
    #[error("profile file line {line}: {reason}")]
    ProfileParse { line: usize, reason: String },
    #[error("unknown profile {0:?}")]
    UnknownProfile(String),
    #[error("unknown plan {0:?}")]
    UnknownPlan(String),
}

pub type Result<T> = std::result::Result<T, Error>;
