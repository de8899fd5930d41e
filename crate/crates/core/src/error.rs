use thiserror::Error;

/// Errors surfaced by every module of the toolkit.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("base must be at least 2 (got {0})")]
    InvalidBase(u32),

    #[error("digit {digit} at position {position} is out of range for base {base}")]
    InvalidDigit { digit: u32, position: usize, base: u32 },

    #[error("sequence exhausted: needed {needed} digits, only {available} available")]
    Exhausted { needed: usize, available: usize },

    #[error("window of {window} digits is shorter than block length {block}")]
    WindowTooShort { window: usize, block: usize },

    #[error("block length {block} is too long for base {base}: {base}^{block} exceeds the counting limit")]
    BlockTooLong { base: u32, block: usize },

    #[error("depth {depth} exceeds the enumeration limit for base {base} (max {max})")]
    DepthTooLarge { base: u32, depth: usize, max: usize },

    #[error("checkpoint set is empty")]
    EmptyCheckpoints,

    #[error("invalid checkpoints: {0}")]
    InvalidCheckpoints(String),

    #[error("invalid dilution pattern: {0}")]
    InvalidPattern(String),

    #[error("invalid stage schedule: {0}")]
    InvalidSchedule(String),

    #[error("invalid measure: {0}")]
    InvalidMeasure(String),

    #[error("measure is not shift-invariant at cylinder {word:?}: mu(C_w) = {mass}, mass of the preimage = {preimage}")]
    NotInvariant { word: Vec<u8>, mass: f64, preimage: f64 },

    #[error("repeat count overflow: ceil({factor} * {mass}) does not fit in 64 bits")]
    RepeatOverflow { factor: f64, mass: f64 },

    #[error("inconsistent cylinder masses at {word:?}: {mass} vs children sum {children}")]
    Inconsistent { word: Vec<u8>, mass: f64, children: f64 },

    #[error("only {certified} of {wanted} output digits could be certified")]
    Uncertified { wanted: usize, certified: usize },

    #[error("invalid gambler: {0}")]
    InvalidGambler(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("schedule selects checkpoint {0} which is not present in the series")]
    UnknownCheckpoint(usize),
}

pub type Result<T> = std::result::Result<T, Error>;
