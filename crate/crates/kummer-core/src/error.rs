use thiserror::Error;

/// Errors produced by the exact arithmetic engine.
///
/// `BudgetExceeded` and `FieldTooLarge` are resource refusals (the requested
/// computation is exact but too big for the configured table budget); the
/// `Internal*` variants indicate an arithmetic invariant was violated and the
/// run must abort loudly rather than emit a wrong polynomial.
#[derive(Debug, Error)]
pub enum Error {
    #[error("odd characteristic required (p = {p})")]
    OddCharacteristicRequired { p: u64 },

    #[error("{p} is not prime")]
    NotPrime { p: u64 },

    #[error("field too large: p^k = {requested} exceeds table budget {budget}")]
    FieldTooLarge { requested: u128, budget: u64 },

    #[error("dlog of zero")]
    DlogOfZero,

    #[error("not a subfield: F_{small} does not embed in F_{big}")]
    NotASubfield { small: u64, big: u64 },

    #[error("{q} and {n} are not coprime")]
    NotCoprime { q: u64, n: u64 },

    #[error("gcd(2d, q) > 1 for d = {d}, q = {q}: strip p-part first")]
    StripPPartFirst { q: u64, d: u64 },

    #[error("orbit too long for exact computation: {what} needs {needed}, budget {budget}")]
    BudgetExceeded {
        what: String,
        needed: u128,
        budget: u64,
    },

    #[error("double sum over F_{q} exceeds naive-path budget {budget}: use closed form")]
    DoubleSumBudget { q: u64, budget: u64 },

    #[error("2d = {d2} is not supersingular for q = {q}")]
    NotSupersingular { q: u64, d2: u64 },

    #[error("internal consistency failure: non-integral coefficient: {detail}")]
    NonIntegralCoefficient { detail: String },

    #[error("internal consistency failure: {detail}")]
    OracleMismatch { detail: String },

    #[error("torsion check needs at least two good places, got {got}")]
    InsufficientPlaces { got: usize },

    #[error("bad-reduction place supplied where good reduction is required")]
    BadPlace,

    #[error("division polynomial formulas stated for even d (got d = {d})")]
    DivisionPolyOddD { d: u64 },

    #[error("no prime l <= {bound} with p = {p} generating (Z/l^2)^x")]
    NoGeneratorPrime { p: u64, bound: u64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
