use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("{0} is not a prime power")]
    NotPrimePower(u64),
    #[error("invalid modulus: {0}")]
    InvalidModulus(String),
    #[error("field order exceeds 2^31")]
    FieldTooLarge,
    #[error("element {value} is outside the field of order {order}")]
    ElementOutOfRange { value: u64, order: u64 },
    #[error("zero has no multiplicative inverse")]
    ZeroInverse,
    #[error("operands belong to different fields")]
    FieldMismatch,
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("generator matrix is rank deficient (rank {rank}, need {rows})")]
    RankDeficient { rank: usize, rows: usize },
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error(
        "parameters ({n}, {k}, {r}) are not covered by the {expected} construction path: {reason}"
    )]
    WrongPath {
        n: usize,
        k: usize,
        r: usize,
        expected: &'static str,
        reason: String,
    },
    #[error(
        "construction exhausted its candidates over GF({q}); success is guaranteed for q >= {guaranteed_q}"
    )]
    AttemptsExhausted { q: u64, guaranteed_q: u64 },
    #[error("{what} needs about {needed} operations, over the budget of {budget}")]
    BudgetExceeded {
        what: &'static str,
        needed: u128,
        budget: u128,
    },
    #[error("distance oracles disagree: brute force {bruteforce}, circuits {circuits}")]
    OracleDisagreement { bruteforce: usize, circuits: usize },
    #[error("measured distance {d} exceeds the bound {d_opt}")]
    BoundViolation { d: usize, d_opt: usize },
    #[error("encoder is not injective: {distinct} distinct codewords for {messages} messages")]
    NotInjective { distinct: u64, messages: u64 },
    #[error("no coordinate is known")]
    NothingKnown,
    #[error("unknown F4 operator {0:?}")]
    UnknownOperator(String),
    #[error("malformed code file: {0}")]
    Format(String),
    #[error("i/o error: {0}")]
    Io(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
