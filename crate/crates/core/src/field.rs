//! Finite fields k_E of q^n elements (q = q0^2) seen multiplicatively: a formal
//! zero plus a cyclic unit group, with elements stored as discrete logs against
//! an abstract generator.

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Invariant, Result};
use crate::sign::{permutation_sign, Sign};

pub fn is_odd_prime(p: u64) -> bool {
    if p < 3 || p % 2 == 0 {
        return false;
    }
    let mut d = 3;
    while d * d <= p {
        if p % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

pub(crate) fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub(crate) fn pow_mod(base: u64, mut e: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut b = base % m;
    let mut acc = 1 % m;
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_mod(acc, b, m);
        }
        b = mul_mod(b, b, m);
        e >>= 1;
    }
    acc
}

pub(crate) fn checked_pow(base: u64, e: u32) -> Result<u64> {
    base.checked_pow(e)
        .ok_or_else(|| Error::invalid(Invariant::FieldTooLarge, format!("{base}^{e} overflows")))
}

/// The field with q^n elements, q = q0^2; `n` is the degree over k_F.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FieldSpec {
    q0: u64,
    n: u32,
    unit_order: u64,
}

impl FieldSpec {
    pub fn new(q0: u64, n: u32) -> Result<FieldSpec> {
        if !is_odd_prime(q0) {
            return Err(Error::invalid(
                Invariant::OddPrimeResidue,
                format!("q0 = {q0}"),
            ));
        }
        if n == 0 {
            return Err(Error::invalid(Invariant::PositiveDegree, "n = 0"));
        }
        let card = checked_pow(q0, 2 * n)?;
        Ok(FieldSpec {
            q0,
            n,
            unit_order: card - 1,
        })
    }

    pub fn q0(&self) -> u64 {
        self.q0
    }

    pub fn q(&self) -> u64 {
        self.q0 * self.q0
    }

    pub fn deg_over_f(&self) -> u32 {
        self.n
    }

    pub fn card(&self) -> u64 {
        self.unit_order + 1
    }

    /// q^n - 1.
    pub fn unit_order(&self) -> u64 {
        self.unit_order
    }

    /// q0^n + 1, the order of the norm-one subgroup of k_E over k_{E0}.
    pub fn norm_one_order(&self) -> u64 {
        self.q0.pow(self.n) + 1
    }

    /// Discrete log of -1.
    pub fn minus_one_log(&self) -> u64 {
        self.unit_order / 2
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FieldElement {
    spec: FieldSpec,
    log: Option<u64>,
}

impl FieldElement {
    pub fn zero(spec: FieldSpec) -> FieldElement {
        FieldElement { spec, log: None }
    }

    pub fn from_log(spec: FieldSpec, log: i64) -> FieldElement {
        let m = spec.unit_order as i64;
        FieldElement {
            spec,
            log: Some(log.rem_euclid(m) as u64),
        }
    }

    pub fn one(spec: FieldSpec) -> FieldElement {
        FieldElement::from_log(spec, 0)
    }

    pub fn spec(&self) -> FieldSpec {
        self.spec
    }

    pub fn log(&self) -> Option<u64> {
        self.log
    }

    pub fn is_zero(&self) -> bool {
        self.log.is_none()
    }

    /// x^e for e >= 0; 0^0 = 1.
    pub fn pow(&self, e: u64) -> FieldElement {
        match self.log {
            None if e == 0 => FieldElement::one(self.spec),
            None => *self,
            Some(l) => FieldElement {
                spec: self.spec,
                log: Some(mul_mod(l, e % self.spec.unit_order, self.spec.unit_order)),
            },
        }
    }

    /// Multiplicative order; the zero element is rejected.
    pub fn order(&self) -> Result<u64> {
        let l = self
            .log
            .ok_or_else(|| Error::invalid(Invariant::NonzeroElement, "order of zero"))?;
        Ok(self.spec.unit_order / l.gcd(&self.spec.unit_order))
    }
}

/// x^{q0^power}; negative powers use the inverse Frobenius.
pub fn frobenius(x: FieldElement, power: i64) -> FieldElement {
    let Some(l) = x.log else { return x };
    let p = power.rem_euclid(2 * x.spec.n as i64) as u64;
    let factor = pow_mod(x.spec.q0, p, x.spec.unit_order);
    FieldElement {
        spec: x.spec,
        log: Some(mul_mod(l, factor, x.spec.unit_order)),
    }
}

/// Degree over k_F of the subfield generated by x.
pub fn subfield_order(x: FieldElement) -> Result<u32> {
    let l = x
        .log
        .ok_or_else(|| Error::invalid(Invariant::NonzeroElement, "subfield of zero"))?;
    let m = x.spec.unit_order;
    let q = x.spec.q();
    let mut cur = l;
    for k in 1..=x.spec.n {
        cur = mul_mod(cur, q, m);
        if cur == l {
            return Ok(k);
        }
    }
    unreachable!("x^(q^n) = x for every unit")
}

/// k_{E1} ⊗_{k_F} k_{E2} as a product of g copies of F_{q^ell}.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TensorShape {
    pub g: u32,
    pub ell: u32,
    /// Frobenius exponents (powers of q) through which the second factor's
    /// units act on each simple factor.
    pub embedding_twists: Vec<u32>,
}

pub fn tensor_decompose(n1: u32, n2: u32) -> Result<TensorShape> {
    if n1 == 0 || n2 == 0 {
        return Err(Error::invalid(
            Invariant::PositiveDegree,
            format!("({n1}, {n2})"),
        ));
    }
    let g = n1.gcd(&n2);
    Ok(TensorShape {
        g,
        ell: n1.lcm(&n2),
        embedding_twists: (0..g).collect(),
    })
}

fn check_divides(zeta_order: u64, factor_card: u64) -> Result<()> {
    if zeta_order == 0 || factor_card < 2 || (factor_card - 1) % zeta_order != 0 {
        return Err(Error::invalid(
            Invariant::DivisibleOrder,
            format!("{zeta_order} does not divide {factor_card} - 1"),
        ));
    }
    Ok(())
}

/// Sign of "multiply by ζ" (ζ of order `zeta_order`) on `copies` disjoint
/// copies of a field with `factor_card` elements, from the cycle type.
pub fn mult_action_sign(zeta_order: u64, factor_card: u64, copies: u64) -> Result<Sign> {
    check_divides(zeta_order, factor_card)?;
    let cycles = (factor_card - 1) / zeta_order;
    Ok(Sign::from_parity(
        ((zeta_order - 1) % 2) * (cycles % 2) * (copies % 2),
    ))
}

/// Same quantity as [`mult_action_sign`], by building the permutation of
/// {0} ∪ Z/(Q-1) in every copy and decomposing it into cycles.
pub fn literal_mult_action_sign(zeta_order: u64, factor_card: u64, copies: u64) -> Result<Sign> {
    check_divides(zeta_order, factor_card)?;
    let units = factor_card - 1;
    let step = units / zeta_order;
    let size = (factor_card * copies) as usize;
    let mut perm = vec![0u32; size];
    for c in 0..copies {
        let base = c * factor_card;
        perm[base as usize] = base as u32;
        for l in 0..units {
            perm[(base + 1 + l) as usize] = (base + 1 + (l + step) % units) as u32;
        }
    }
    Ok(permutation_sign(&perm))
}
