//! Conjugacy classes of embeddings of the elliptic torus, parameterized by a
//! partition I = I_o ⊔ I_e with #I_e even.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::Serialize;

use crate::characters::VeryCuspidalDatum;
use crate::error::{Error, Invariant, Result};

pub type ComponentId = usize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum PartClass {
    Odd,
    Even,
}

impl PartClass {
    pub fn other(self) -> PartClass {
        match self {
            PartClass::Odd => PartClass::Even,
            PartClass::Even => PartClass::Odd,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct EmbeddingClass {
    index_set: Vec<ComponentId>,
    odd_part: BTreeSet<ComponentId>,
    even_part: BTreeSet<ComponentId>,
}

impl EmbeddingClass {
    pub fn new(
        index_set: Vec<ComponentId>,
        even_part: BTreeSet<ComponentId>,
    ) -> Result<EmbeddingClass> {
        if index_set.is_empty() {
            return Err(Error::invalid(
                Invariant::NonemptyIndexSet,
                "empty index set",
            ));
        }
        let all: BTreeSet<ComponentId> = index_set.iter().copied().collect();
        if all.len() != index_set.len() {
            return Err(Error::invalid(
                Invariant::ComponentMembership,
                "repeated component id",
            ));
        }
        if let Some(i) = even_part.iter().find(|i| !all.contains(i)) {
            return Err(Error::invalid(
                Invariant::ComponentMembership,
                format!("id {i} not in I"),
            ));
        }
        if even_part.len() % 2 != 0 {
            return Err(Error::invalid(
                Invariant::EvenPartition,
                format!("#I_e = {}", even_part.len()),
            ));
        }
        let odd_part = all.difference(&even_part).copied().collect();
        Ok(EmbeddingClass {
            index_set,
            odd_part,
            even_part,
        })
    }

    /// The class with I_e = ∅.
    pub fn all_odd(index_set: Vec<ComponentId>) -> Result<EmbeddingClass> {
        EmbeddingClass::new(index_set, BTreeSet::new())
    }

    pub fn index_set(&self) -> &[ComponentId] {
        &self.index_set
    }

    pub fn odd_part(&self) -> &BTreeSet<ComponentId> {
        &self.odd_part
    }

    pub fn even_part(&self) -> &BTreeSet<ComponentId> {
        &self.even_part
    }

    pub fn len(&self) -> usize {
        self.index_set.len()
    }

    pub fn is_empty(&self) -> bool {
        self.index_set.is_empty()
    }

    pub fn contains(&self, i: ComponentId) -> bool {
        self.odd_part.contains(&i) || self.even_part.contains(&i)
    }

    pub fn class_of(&self, i: ComponentId) -> Result<PartClass> {
        if self.odd_part.contains(&i) {
            Ok(PartClass::Odd)
        } else if self.even_part.contains(&i) {
            Ok(PartClass::Even)
        } else {
            Err(Error::invalid(
                Invariant::ComponentMembership,
                format!("id {i} not in I"),
            ))
        }
    }

    pub fn part(&self, class: PartClass) -> &BTreeSet<ComponentId> {
        match class {
            PartClass::Odd => &self.odd_part,
            PartClass::Even => &self.even_part,
        }
    }
}

impl fmt::Display for EmbeddingClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let list = |s: &BTreeSet<ComponentId>| {
            s.iter()
                .map(|i| i.to_string())
                .collect::<Vec<_>>()
                .join(",")
        };
        write!(
            f,
            "Io={{{}}}|Ie={{{}}}",
            list(&self.odd_part),
            list(&self.even_part)
        )
    }
}

/// All partitions with #I_e even, in order of the bitmask of I_e over `index_set`.
pub fn enumerate_embeddings(index_set: &[ComponentId]) -> Result<Vec<EmbeddingClass>> {
    if index_set.is_empty() {
        return Err(Error::invalid(
            Invariant::NonemptyIndexSet,
            "empty index set",
        ));
    }
    if index_set.len() >= 64 {
        return Err(Error::invalid(
            Invariant::NonemptyIndexSet,
            "index set too large",
        ));
    }
    let mut out = Vec::with_capacity(1 << (index_set.len() - 1));
    for mask in 0u64..(1 << index_set.len()) {
        if mask.count_ones() % 2 != 0 {
            continue;
        }
        let even = index_set
            .iter()
            .enumerate()
            .filter(|(b, _)| mask >> b & 1 == 1)
            .map(|(_, &i)| i)
            .collect();
        out.push(EmbeddingClass::new(index_set.to_vec(), even)?);
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum HermitianTwist {
    Unit,
    Uniformizer,
}

/// The twist x_i ∈ {1, ϖ} of the Hermitian form on each block.
pub fn hermitian_twists(x: &EmbeddingClass) -> BTreeMap<ComponentId, HermitianTwist> {
    x.index_set
        .iter()
        .map(|&i| {
            let t = if x.even_part.contains(&i) {
                HermitianTwist::Uniformizer
            } else {
                HermitianTwist::Unit
            };
            (i, t)
        })
        .collect()
}

/// Whether (x, ξ) and (x2, ξ2) are related by N(T_x): same partition, a
/// permutation of I preserving degrees and the partition, and a Galois
/// element on each component. Component ids index `xi.components`.
pub fn weyl_equivalent(
    x: &EmbeddingClass,
    xi: &VeryCuspidalDatum,
    x2: &EmbeddingClass,
    xi2: &VeryCuspidalDatum,
) -> bool {
    if x.odd_part != x2.odd_part
        || x.even_part != x2.even_part
        || xi.len() != xi2.len()
        || xi.q0 != xi2.q0
    {
        return false;
    }
    let ids: Vec<ComponentId> = x.index_set.clone();
    if ids.iter().any(|&i| i >= xi.len()) {
        return false;
    }
    let mut used = vec![false; xi2.len()];
    match_components(0, &ids, x, xi, xi2, &mut used)
}

fn match_components(
    k: usize,
    ids: &[ComponentId],
    x: &EmbeddingClass,
    xi: &VeryCuspidalDatum,
    xi2: &VeryCuspidalDatum,
    used: &mut [bool],
) -> bool {
    let Some(&i) = ids.get(k) else { return true };
    let ci = &xi.components[i];
    let class = x.class_of(i).expect("id from the index set");
    for &j in ids {
        if used[j] || x.class_of(j).expect("id from the index set") != class {
            continue;
        }
        let cj = &xi2.components[j];
        if cj.n != ci.n || !ci.is_galois_conjugate(cj) {
            continue;
        }
        used[j] = true;
        if match_components(k + 1, ids, x, xi, xi2, used) {
            return true;
        }
        used[j] = false;
    }
    false
}
