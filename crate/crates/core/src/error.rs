use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("{what} = {value} is outside the supported range (max {max})")]
    OutOfRange {
        what: &'static str,
        value: String,
        max: String,
    },
    #[error("{n} is not {k}-full")]
    NotKFull { n: u128, k: u32 },
    #[error("k must be at least 2, got {0}")]
    InvalidK(u32),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("enumeration would exceed the cap of {cap} elements")]
    CapExceeded { cap: usize },
    #[error("integer overflow while computing {0}")]
    Overflow(&'static str),
    #[error("requested {requested} digits but the scalar type supports {available}")]
    PrecisionUnavailable { requested: u32, available: u32 },
    #[error("argument s = {0} must exceed 1")]
    NotConvergent(f64),
    #[error("subsets I and J overlap")]
    Overlap,
    #[error("tuple {0:?} is not an element of Lambda_k")]
    NotInLambda(Vec<u64>),
    #[error("need power sums up to order {need}, have {have}")]
    InsufficientPowerSums { have: usize, need: usize },
    #[error("series truncated at order {order} cannot reach radius {target:e}")]
    GuardInsufficient { order: usize, target: f64 },
    #[error("index {index} beyond computed range {max}")]
    IndexOutOfRange { index: usize, max: usize },
    #[error("could not decide the fractional-part criterion within {bits} bits")]
    PrecisionEscalation { bits: u64 },
    #[error("k mismatch: {left} vs {right}")]
    KMismatch { left: u32, right: u32 },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_k(k: u32) -> Result<()> {
    if k < 2 {
        Err(Error::InvalidK(k))
    } else if k > 64 {
        Err(Error::OutOfRange {
            what: "k",
            value: k.to_string(),
            max: "64".into(),
        })
    } else {
        Ok(())
    }
}
