use std::fmt;

use thiserror::Error;

/// The named invariants an input can violate. Every validation error carries
/// exactly one of these.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Invariant {
    OddPrimeResidue,
    PositiveDegree,
    OddDegree,
    FieldTooLarge,
    NonzeroElement,
    DivisibleOrder,
    SkewStratum,
    LeadingCoefficientPresence,
    SkewSignUniformizer,
    ReducedTameExponent,
    UniformLevel,
    Regularity,
    GaloisNonConjugacy,
    UniformSkewSign,
    NonemptyIndexSet,
    EvenPartition,
    ComponentMembership,
    PositiveLevel,
    ZeroLevel,
    SignPatternParity,
    SignMembership,
    PairingData,
    Containment,
}

impl Invariant {
    pub fn name(self) -> &'static str {
        match self {
            Invariant::OddPrimeResidue => "odd prime residue characteristic",
            Invariant::PositiveDegree => "positive degree",
            Invariant::OddDegree => "odd component degree",
            Invariant::FieldTooLarge => "field size within u64 arithmetic",
            Invariant::NonzeroElement => "nonzero field element",
            Invariant::DivisibleOrder => "order divides the unit group order",
            Invariant::SkewStratum => "skew stratum condition",
            Invariant::LeadingCoefficientPresence => "leading coefficient present iff level > 0",
            Invariant::SkewSignUniformizer => "skew sign matches the uniformizer value",
            Invariant::ReducedTameExponent => "tame exponent reduced mod q0^n + 1",
            Invariant::UniformLevel => "uniform level",
            Invariant::Regularity => "regularity",
            Invariant::GaloisNonConjugacy => "components not Galois-conjugate",
            Invariant::UniformSkewSign => "uniform skew sign (-1)^(n+1)",
            Invariant::NonemptyIndexSet => "nonempty index set",
            Invariant::EvenPartition => "even size of the even part",
            Invariant::ComponentMembership => "component belongs to the index set",
            Invariant::PositiveLevel => "positive level",
            Invariant::ZeroLevel => "zero level",
            Invariant::SignPatternParity => "sign pattern legal for the parity of (n1, n2)",
            Invariant::SignMembership => "component skew sign is one of the endoscopic signs",
            Invariant::PairingData => "hermitian pairing data attached",
            Invariant::Containment => "denominator contained in numerator",
        }
    }
}

impl fmt::Display for Invariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("invalid input: {invariant} ({detail})")]
    Invalid {
        invariant: Invariant,
        detail: String,
    },
    #[error("internal inconsistency: {0}")]
    Inconsistent(String),
}

impl Error {
    pub fn invalid(invariant: Invariant, detail: impl Into<String>) -> Self {
        Error::Invalid {
            invariant,
            detail: detail.into(),
        }
    }

    pub fn inconsistent(what: impl Into<String>) -> Self {
        Error::Inconsistent(what.into())
    }

    pub fn invariant(&self) -> Option<Invariant> {
        match self {
            Error::Invalid { invariant, .. } => Some(*invariant),
            Error::Inconsistent(_) => None,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
