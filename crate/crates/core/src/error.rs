use thiserror::Error;

/// Failure modes surfaced by the library.  Precondition violations (composite
/// moduli where a prime is required, out-of-range indices, malformed regions)
/// are programming errors and assert instead.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// Asked to invert a multiple of the modulus.
    #[error("x = {x} is divisible by {p}; no inverse exists")]
    ZeroResidue { x: u64, p: u64 },

    /// An arithmetic progression that can contain no prime beyond possibly
    /// its own residue.
    #[error(
        "residue {residue} shares a factor with modulus {modulus}; the class contains no prime"
    )]
    NonCoprimeResidue { residue: u64, modulus: u64 },

    /// Coefficient arithmetic left the 64-bit signed range.
    #[error("coefficient arithmetic overflowed the signed 64-bit range")]
    Overflow,

    /// Kernel with more than three odd prime factors and no explicit opt-in.
    #[error("the odd squarefree kernel of {n} has {factors} prime factors; use the unrestricted entry point for kernels beyond three primes")]
    KernelTooLarge { n: u64, factors: usize },

    /// Residue-class search exhausted its candidate budget.
    #[error(
        "no prime representative for the class {residue} (mod {modulus}) within {tried} candidates"
    )]
    RepresentativeNotFound {
        residue: u64,
        modulus: u64,
        tried: u64,
    },

    /// B(p) is empty (p < 11), so no coefficient certificate can exist.
    #[error("B({p}) is empty; no lower-bound certificate exists")]
    EmptyBeiterSet { p: u64 },

    /// Inputs to the explicit inverse-point construction violate its
    /// congruence preconditions.
    #[error("(p, q) = ({p}, {q}) violates the construction congruences: {reason}")]
    BadCongruence { p: u64, q: u64, reason: String },

    /// A scan configuration that violates the hypotheses of the density
    /// statement it is meant to exercise.
    #[error("invalid scan configuration: {0}")]
    Config(String),

    /// Two primes in the same residue class mod pq produced different
    /// heights.  This would falsify the residue-invariance the class mode
    /// relies on, so it is a hard error rather than a silent choice.
    #[error("height invariance failed for (p,q) = ({p},{q}), class {class}: A = {a1} at r = {r1} but A = {a2} at r = {r2}")]
    InvarianceViolation {
        p: u64,
        q: u64,
        class: u64,
        r1: u64,
        a1: i64,
        r2: u64,
        a2: i64,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
