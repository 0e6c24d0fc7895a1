//! Skew characters of E^× for odd unramified E/F, reduced to the data that
//! survives in every downstream formula: level d, leading coefficient β,
//! tame exponent on the norm-one units, and the value at ϖ.

use serde::{Serialize, Serializer};

use crate::error::{Error, Invariant, Result};
use crate::field::{frobenius, mul_mod, pow_mod, subfield_order, FieldElement, FieldSpec};
use crate::sign::Sign;

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct SkewCharacterComponent {
    #[serde(skip)]
    pub field: FieldSpec,
    pub n: u32,
    pub level: u32,
    #[serde(rename = "beta_log", serialize_with = "serialize_beta")]
    pub beta: Option<FieldElement>,
    /// Exponent of the character on μ_{E/E0}, reduced mod q0^n + 1.
    pub tame_exponent: u64,
    pub omega: Sign,
    pub skew_sign: Sign,
}

fn serialize_beta<S: Serializer>(
    beta: &Option<FieldElement>,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    match beta.and_then(|b| b.log()) {
        Some(l) => s.serialize_some(&l),
        None => s.serialize_none(),
    }
}

impl SkewCharacterComponent {
    /// Builds and validates a component; the skew sign is derived from ω.
    pub fn new(
        q0: u64,
        n: u32,
        level: u32,
        beta_log: Option<i64>,
        tame: i64,
        omega: Sign,
    ) -> Result<SkewCharacterComponent> {
        let field = FieldSpec::new(q0, n)?;
        let c = SkewCharacterComponent {
            field,
            n,
            level,
            beta: beta_log.map(|l| FieldElement::from_log(field, l)),
            tame_exponent: tame.rem_euclid(field.norm_one_order() as i64) as u64,
            omega,
            skew_sign: omega,
        };
        c.validate()?;
        Ok(c)
    }

    pub fn q0(&self) -> u64 {
        self.field.q0()
    }

    pub fn tame_modulus(&self) -> u64 {
        self.field.norm_one_order()
    }

    pub fn validate(&self) -> Result<()> {
        if self.n % 2 == 0 || self.field.deg_over_f() != self.n {
            return Err(Error::invalid(
                Invariant::OddDegree,
                format!("n = {}", self.n),
            ));
        }
        match (self.level, self.beta) {
            (0, None) => {}
            (0, Some(_)) => {
                return Err(Error::invalid(
                    Invariant::LeadingCoefficientPresence,
                    "level 0 with a leading coefficient",
                ))
            }
            (_, None) => {
                return Err(Error::invalid(
                    Invariant::LeadingCoefficientPresence,
                    format!("level {} without a leading coefficient", self.level),
                ))
            }
            (_, Some(b)) => {
                if !is_skew_leading_coefficient(b) {
                    return Err(Error::invalid(
                        Invariant::SkewStratum,
                        match b.log() {
                            Some(l) => format!("beta = g^{l} has beta^(q0^n - 1) != -1"),
                            None => "beta = 0".to_string(),
                        },
                    ));
                }
            }
        }
        if self.tame_exponent >= self.tame_modulus() {
            return Err(Error::invalid(
                Invariant::ReducedTameExponent,
                format!("tame exponent {} not reduced", self.tame_exponent),
            ));
        }
        if self.skew_sign != self.omega {
            return Err(Error::invalid(
                Invariant::SkewSignUniformizer,
                format!("epsilon = {} but omega = {}", self.skew_sign, self.omega),
            ));
        }
        Ok(())
    }

    /// Action of Frob_F^m: β ↦ β^{q^m}, t ↦ t·q^m.
    pub fn conjugate(&self, m: u32) -> SkewCharacterComponent {
        let modulus = self.tame_modulus();
        let mut c = self.clone();
        c.beta = self.beta.map(|b| frobenius(b, 2 * m as i64));
        c.tame_exponent = mul_mod(
            self.tame_exponent,
            pow_mod(self.field.q(), m as u64, modulus),
            modulus,
        );
        c
    }

    /// The Galois orbit, indexed by Frobenius power 0..n.
    pub fn galois_orbit(&self) -> Vec<SkewCharacterComponent> {
        (0..self.n).map(|m| self.conjugate(m)).collect()
    }

    pub fn is_galois_conjugate(&self, other: &SkewCharacterComponent) -> bool {
        self.field == other.field && self.galois_orbit().iter().any(|c| c == other)
    }

    /// Smallest representative of the Galois orbit, for canonical comparisons.
    pub fn canonical(&self) -> SkewCharacterComponent {
        self.galois_orbit()
            .into_iter()
            .min_by_key(|c| (c.beta.and_then(|b| b.log()), c.tame_exponent))
            .expect("orbit is nonempty")
    }

    /// Twist by the quadratic character of k_E^× (an at most quadratic tame
    /// character trivial at ϖ).
    pub fn twist_tame_quadratic(&self) -> SkewCharacterComponent {
        let modulus = self.tame_modulus();
        let mut c = self.clone();
        c.tame_exponent = (self.tame_exponent + modulus / 2) % modulus;
        c
    }
}

/// β^{q0^n - 1} = -1, i.e. c(β) = -β.
pub fn is_skew_leading_coefficient(beta: FieldElement) -> bool {
    let Some(l) = beta.log() else { return false };
    let spec = beta.spec();
    let e = spec.q0().pow(spec.deg_over_f()) - 1;
    mul_mod(l, e, spec.unit_order()) == spec.minus_one_log()
}

pub fn is_d_regular(c: &SkewCharacterComponent) -> Result<bool> {
    if c.level == 0 {
        return Err(Error::invalid(
            Invariant::PositiveLevel,
            "d-regularity needs level > 0",
        ));
    }
    let beta = c
        .beta
        .ok_or_else(|| Error::invalid(Invariant::LeadingCoefficientPresence, "missing beta"))?;
    Ok(subfield_order(beta)? == c.n)
}

pub fn tame_regular(c: &SkewCharacterComponent) -> Result<bool> {
    if c.level != 0 {
        return Err(Error::invalid(
            Invariant::ZeroLevel,
            "tame regularity needs level 0",
        ));
    }
    let modulus = c.tame_modulus();
    let q = c.field.q() % modulus;
    let mut t = c.tame_exponent;
    for k in 1..=c.n {
        t = mul_mod(t, q, modulus);
        if t == c.tame_exponent {
            return Ok(k == c.n);
        }
    }
    Ok(false)
}

pub fn is_regular(c: &SkewCharacterComponent) -> bool {
    if c.level == 0 {
        tame_regular(c).unwrap_or(false)
    } else {
        is_d_regular(c).unwrap_or(false)
    }
}

/// Equal levels, and pairwise disjoint Galois orbits of β (of the tame
/// exponent at level 0) among components of equal degree.
pub fn components_compatible(components: &[SkewCharacterComponent]) -> bool {
    let Some(first) = components.first() else {
        return true;
    };
    if components.iter().any(|c| c.level != first.level) {
        return false;
    }
    for (a, ca) in components.iter().enumerate() {
        for cb in &components[a + 1..] {
            if ca.n != cb.n || ca.field != cb.field {
                continue;
            }
            let clash = (0..ca.n).any(|m| {
                let g = ca.conjugate(m);
                if ca.level > 0 {
                    g.beta == cb.beta
                } else {
                    g.tame_exponent == cb.tame_exponent
                }
            });
            if clash {
                return false;
            }
        }
    }
    true
}

/// Exponent on μ_E of ξ∘(1-c) for ξ of exponent t on μ_{E/E0}.
pub fn base_change_tame(t: u64, n: u32, q0: u64) -> u64 {
    let q0n = q0.pow(n);
    let units = q0n * q0n - 1;
    mul_mod(t % (q0n + 1), q0n - 1, units)
}

/// Whether a character of μ_E with exponent a is trivial on μ_{E0}.
pub fn is_plus_skew_tame(a: u64, n: u32, q0: u64) -> bool {
    let q0n = q0.pow(n);
    let units = q0n * q0n - 1;
    (a % units) % (q0n - 1) == 0
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WildPart {
    pub level: u32,
    #[serde(serialize_with = "serialize_beta")]
    pub beta: Option<FieldElement>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TamePart {
    pub tame_exponent: u64,
    pub omega: Sign,
}

pub fn wild_tame_split(c: &SkewCharacterComponent) -> (WildPart, TamePart) {
    (
        WildPart {
            level: c.level,
            beta: c.beta,
        },
        TamePart {
            tame_exponent: c.tame_exponent,
            omega: c.omega,
        },
    )
}

pub fn merge_wild_tame(
    field: FieldSpec,
    wild: &WildPart,
    tame: &TamePart,
) -> SkewCharacterComponent {
    SkewCharacterComponent {
        field,
        n: field.deg_over_f(),
        level: wild.level,
        beta: wild.beta,
        tame_exponent: tame.tame_exponent,
        omega: tame.omega,
        skew_sign: tame.omega,
    }
}

/// Twist by the unramified quadratic character χ₋ of E^×.
pub fn twist_unramified_quadratic(c: &SkewCharacterComponent) -> SkewCharacterComponent {
    let mut t = c.clone();
    t.omega = c.omega.negate();
    t.skew_sign = c.skew_sign.negate();
    t
}

/// Twist by χ_ε: identity for ε = +, the unramified quadratic twist for ε = -.
pub fn twist_by_sign(c: &SkewCharacterComponent, eps: Sign) -> SkewCharacterComponent {
    match eps {
        Sign::Plus => c.clone(),
        Sign::Minus => twist_unramified_quadratic(c),
    }
}

pub fn skew_sign_of_induced(c: &SkewCharacterComponent) -> Sign {
    c.skew_sign
}

/// A regular, mutually non-conjugate family of skew characters of one level.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct VeryCuspidalDatum {
    pub q0: u64,
    pub components: Vec<SkewCharacterComponent>,
}

impl VeryCuspidalDatum {
    /// Validates everything except the uniform skew sign (mixed signs are the
    /// endoscopic case).
    pub fn new(q0: u64, components: Vec<SkewCharacterComponent>) -> Result<VeryCuspidalDatum> {
        let d = VeryCuspidalDatum { q0, components };
        d.validate()?;
        Ok(d)
    }

    pub fn validate(&self) -> Result<()> {
        if self.components.is_empty() {
            return Err(Error::invalid(Invariant::NonemptyIndexSet, "no components"));
        }
        for (i, c) in self.components.iter().enumerate() {
            if c.q0() != self.q0 {
                return Err(Error::invalid(
                    Invariant::OddPrimeResidue,
                    format!("component {i} uses q0 = {}", c.q0()),
                ));
            }
            c.validate()?;
        }
        let d = self.components[0].level;
        if let Some(i) = self.components.iter().position(|c| c.level != d) {
            return Err(Error::invalid(
                Invariant::UniformLevel,
                format!(
                    "component {i} has level {} != {d}",
                    self.components[i].level
                ),
            ));
        }
        if let Some(i) = self.components.iter().position(|c| !is_regular(c)) {
            return Err(Error::invalid(
                Invariant::Regularity,
                format!("component {i}"),
            ));
        }
        if !components_compatible(&self.components) {
            return Err(Error::invalid(
                Invariant::GaloisNonConjugacy,
                "two components share a Galois orbit",
            ));
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    pub fn level(&self) -> u32 {
        self.components[0].level
    }

    pub fn total_degree(&self) -> u32 {
        self.components.iter().map(|c| c.n).sum()
    }

    pub fn degrees(&self) -> Vec<u32> {
        self.components.iter().map(|c| c.n).collect()
    }

    /// (-1)^{n+1}, the skew sign of a stable parameter of U_n.
    pub fn stable_sign(&self) -> Sign {
        Sign::from_parity(self.total_degree() as u64 + 1)
    }

    pub fn require_stable_sign(&self) -> Result<()> {
        let s = self.stable_sign();
        match self.components.iter().position(|c| c.skew_sign != s) {
            None => Ok(()),
            Some(i) => Err(Error::invalid(
                Invariant::UniformSkewSign,
                format!(
                    "component {i} is {}-skew, expected {s}",
                    self.components[i].skew_sign
                ),
            )),
        }
    }
}
