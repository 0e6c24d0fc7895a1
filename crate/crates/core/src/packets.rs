//! Stable packets of very cuspidal parameters, their base change, the
//! uniqueness of the amending correction, and elliptic endoscopic splitting.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::amending::{amending_character, Tag, Vertex};
use crate::characters::{twist_by_sign, SkewCharacterComponent, VeryCuspidalDatum};
use crate::embeddings::{enumerate_embeddings, ComponentId, EmbeddingClass, PartClass};
use crate::error::{Error, Invariant, Result};
use crate::sign::Sign;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AmendedComponent {
    pub id: ComponentId,
    /// ν^y_{i,x}
    pub amendment: Tag,
    /// ξ_{i,+} · ν^y_{i,x}
    pub character: SkewCharacterComponent,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PacketMember {
    pub x: EmbeddingClass,
    pub components: Vec<AmendedComponent>,
}

impl PacketMember {
    /// The member label (x, ξ₊ν) as a datum.
    pub fn label(&self, q0: u64) -> VeryCuspidalDatum {
        VeryCuspidalDatum {
            q0,
            components: self
                .components
                .iter()
                .map(|c| c.character.clone())
                .collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PacketDescription {
    pub parameter: VeryCuspidalDatum,
    /// ε with ξ_{i,+} = ξ_i · χ_ε; (−1)^{n−1} for a stable packet of U_n.
    pub twist: Sign,
    pub members: Vec<PacketMember>,
    /// The GL-side components {ξ̃_i}.
    pub base_change: Vec<SkewCharacterComponent>,
}

impl PacketDescription {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}

/// ν^y_{i,x} for the level of the datum; trivial at level 0.
pub fn amendment_tag(x: &EmbeddingClass, i: ComponentId, d: u32) -> Result<Tag> {
    if d == 0 {
        return Ok(Tag::Trivial);
    }
    Ok(amending_character(Vertex::Y, i, x, d)?.gl)
}

fn amend(c: &SkewCharacterComponent, tag: Tag) -> SkewCharacterComponent {
    match tag {
        Tag::Trivial => c.clone(),
        Tag::Quadratic => c.twist_tame_quadratic(),
    }
}

fn plus_normalized(datum: &VeryCuspidalDatum, twist: Sign) -> Result<Vec<SkewCharacterComponent>> {
    datum
        .components
        .iter()
        .enumerate()
        .map(|(i, c)| {
            let t = twist_by_sign(c, twist);
            if t.skew_sign != Sign::Plus {
                return Err(Error::invalid(
                    Invariant::SignMembership,
                    format!(
                        "component {i} is {}-skew, twist {twist} does not normalize it",
                        c.skew_sign
                    ),
                ));
            }
            Ok(t)
        })
        .collect()
}

fn packet_with_twist(datum: &VeryCuspidalDatum, twist: Sign) -> Result<PacketDescription> {
    let plus = plus_normalized(datum, twist)?;
    let ids: Vec<ComponentId> = (0..datum.len()).collect();
    let d = datum.level();
    let mut members = Vec::new();
    for x in enumerate_embeddings(&ids)? {
        let components = plus
            .iter()
            .enumerate()
            .map(|(i, c)| {
                let tag = amendment_tag(&x, i, d)?;
                Ok(AmendedComponent {
                    id: i,
                    amendment: tag,
                    character: amend(c, tag),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        members.push(PacketMember { x, components });
    }
    Ok(PacketDescription {
        parameter: datum.clone(),
        twist,
        members,
        base_change: datum.components.clone(),
    })
}

/// The stable packet {π_{x, ξ₊ν^y_x}}_{x∈𝒟} with base change {ξ̃_i}.
pub fn assemble_packet(datum: &VeryCuspidalDatum) -> Result<PacketDescription> {
    datum.validate()?;
    datum.require_stable_sign()?;
    let twist = Sign::from_parity(datum.total_degree() as u64 - 1);
    packet_with_twist(datum, twist)
}

/// Base change read off a member label η = ξ₊ν.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BaseChange {
    /// η_i · ν^y_{i,x} (+-skew)
    pub plus_normalized: Vec<SkewCharacterComponent>,
    /// η_i · ν^y_{i,x} · χ_{(−1)^{n−1}}
    pub untwisted: Vec<SkewCharacterComponent>,
}

pub fn base_change_of(x: &EmbeddingClass, label: &VeryCuspidalDatum) -> Result<BaseChange> {
    let d = label.level();
    let twist = Sign::from_parity(label.total_degree() as u64 - 1);
    let mut plus = Vec::new();
    let mut untwisted = Vec::new();
    for (i, c) in label.components.iter().enumerate() {
        let a = amend(c, amendment_tag(x, i, d)?);
        untwisted.push(twist_by_sign(&a, twist));
        plus.push(a);
    }
    Ok(BaseChange {
        plus_normalized: plus,
        untwisted,
    })
}

/// Key for comparing lists of GL-side components up to order and Galois
/// conjugacy of each entry.
pub fn canonical_components(
    cs: &[SkewCharacterComponent],
) -> Vec<(u32, u32, Option<u64>, u64, Sign)> {
    let mut key: Vec<_> = cs
        .iter()
        .map(|c| {
            let k = c.canonical();
            (
                k.n,
                k.level,
                k.beta.and_then(|b| b.log()),
                k.tame_exponent,
                k.omega,
            )
        })
        .collect();
    key.sort();
    key
}

type WeylKey = Vec<(PartClass, (u32, u32, Option<u64>, u64, Sign))>;

/// A complete invariant of the Weyl class of (x, ξ): the multiset of
/// Galois-canonical components, each tagged with its class in the partition.
pub fn weyl_key(x: &EmbeddingClass, xi: &VeryCuspidalDatum) -> Result<WeylKey> {
    let mut entries = Vec::new();
    for &i in x.index_set() {
        let class = x.class_of(i)?;
        let c = xi
            .components
            .get(i)
            .ok_or_else(|| {
                Error::invalid(Invariant::ComponentMembership, format!("no component {i}"))
            })?
            .canonical();
        entries.push((
            class,
            (
                c.n,
                c.level,
                c.beta.and_then(|b| b.log()),
                c.tame_exponent,
                c.omega,
            ),
        ));
    }
    entries.sort();
    Ok(entries)
}

/// Every datum obtained by changing the tame exponents of `datum` that is
/// still valid (regular and mutually non-conjugate).
pub fn tame_twist_family(datum: &VeryCuspidalDatum) -> Vec<VeryCuspidalDatum> {
    let mut family = vec![datum.components.clone()];
    for (i, c) in datum.components.iter().enumerate() {
        let modulus = c.tame_modulus();
        family = family
            .into_iter()
            .flat_map(|comps| {
                (0..modulus).map(move |t| {
                    let mut comps = comps.clone();
                    comps[i].tame_exponent = t;
                    comps
                })
            })
            .collect();
    }
    family
        .into_iter()
        .filter_map(|cs| VeryCuspidalDatum::new(datum.q0, cs).ok())
        .collect()
}

/// The amended label ξ₊ν^y_x of a +-skew datum.
pub fn amended_label(x: &EmbeddingClass, plus: &VeryCuspidalDatum) -> Result<VeryCuspidalDatum> {
    let d = plus.level();
    let components = plus
        .components
        .iter()
        .enumerate()
        .map(|(i, c)| Ok(amend(c, amendment_tag(x, i, d)?)))
        .collect::<Result<Vec<_>>>()?;
    Ok(VeryCuspidalDatum {
        q0: plus.q0,
        components,
    })
}

/// Whether ξ ↦ ξν is a bijection on Weyl classes of the tame-twist family
/// of `datum`, for every x.
pub fn amending_unique(datum: &VeryCuspidalDatum) -> Result<bool> {
    amending_unique_with(datum, amended_label)
}

/// [`amending_unique`] with a caller-supplied correction.
pub fn amending_unique_with(
    datum: &VeryCuspidalDatum,
    correction: impl Fn(&EmbeddingClass, &VeryCuspidalDatum) -> Result<VeryCuspidalDatum>,
) -> Result<bool> {
    let family = tame_twist_family(datum);
    let ids: Vec<ComponentId> = (0..datum.len()).collect();
    for x in enumerate_embeddings(&ids)? {
        let mut classes = BTreeSet::new();
        let mut images = BTreeMap::new();
        for xi in &family {
            let key = weyl_key(&x, xi)?;
            if !classes.insert(key.clone()) {
                continue;
            }
            let image = correction(&x, xi)?;
            if VeryCuspidalDatum::new(image.q0, image.components.clone()).is_err() {
                return Ok(false);
            }
            if images.insert(weyl_key(&x, &image)?, key).is_some() {
                return Ok(false);
            }
        }
        if images.keys().any(|k| !classes.contains(k)) {
            return Ok(false);
        }
    }
    Ok(true)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct EndoscopicDatum {
    pub n1: u32,
    pub n2: u32,
    pub signs: (Sign, Sign),
}

impl EndoscopicDatum {
    pub fn new(n1: u32, n2: u32, signs: (Sign, Sign)) -> Result<EndoscopicDatum> {
        let opposite = signs.0 != signs.1;
        if (n1 % 2 == n2 % 2) != opposite {
            return Err(Error::invalid(
                Invariant::SignPatternParity,
                format!(
                    "(n1, n2) = ({n1}, {n2}) with signs ({}, {})",
                    signs.0, signs.1
                ),
            ));
        }
        Ok(EndoscopicDatum { n1, n2, signs })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EndoscopicFactor {
    pub ids: Vec<ComponentId>,
    /// None for the empty factor U_0 (whose packet has one member).
    pub packet: Option<PacketDescription>,
}

impl EndoscopicFactor {
    pub fn len(&self) -> usize {
        self.packet.as_ref().map_or(1, |p| p.len())
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EndoscopicSplit {
    pub datum: EndoscopicDatum,
    pub factors: [EndoscopicFactor; 2],
}

impl EndoscopicSplit {
    pub fn total_members(&self) -> usize {
        self.factors.iter().map(|f| f.len()).product()
    }
}

fn factor(datum: &VeryCuspidalDatum, ids: Vec<ComponentId>, eps: Sign) -> Result<EndoscopicFactor> {
    if ids.is_empty() {
        return Ok(EndoscopicFactor { ids, packet: None });
    }
    let sub = VeryCuspidalDatum::new(
        datum.q0,
        ids.iter().map(|&i| datum.components[i].clone()).collect(),
    )?;
    Ok(EndoscopicFactor {
        ids,
        packet: Some(packet_with_twist(&sub, eps)?),
    })
}

/// Splits I by skew sign into the two factors of U_{n1} × U_{n2}, each with
/// its factor-local twist χ_{ε_j}. With ε1 = ε2 every component goes to the
/// first factor.
pub fn endoscopic_split(datum: &VeryCuspidalDatum, signs: (Sign, Sign)) -> Result<EndoscopicSplit> {
    datum.validate()?;
    let mut parts: [Vec<ComponentId>; 2] = [Vec::new(), Vec::new()];
    for (i, c) in datum.components.iter().enumerate() {
        if c.skew_sign == signs.0 {
            parts[0].push(i);
        } else if c.skew_sign == signs.1 {
            parts[1].push(i);
        } else {
            return Err(Error::invalid(
                Invariant::SignMembership,
                format!("component {i} is {}-skew", c.skew_sign),
            ));
        }
    }
    let deg = |ids: &[ComponentId]| ids.iter().map(|&i| datum.components[i].n).sum::<u32>();
    let (mut n1, mut n2) = (deg(&parts[0]), deg(&parts[1]));
    let mut signs = signs;
    EndoscopicDatum::new(n1, n2, signs)?;
    if n1 == n2 && signs == (Sign::Minus, Sign::Plus) {
        parts.swap(0, 1);
        std::mem::swap(&mut n1, &mut n2);
        signs = (Sign::Plus, Sign::Minus);
    }
    let [p1, p2] = parts;
    Ok(EndoscopicSplit {
        datum: EndoscopicDatum::new(n1, n2, signs)?,
        factors: [factor(datum, p1, signs.0)?, factor(datum, p2, signs.1)?],
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn comp(
        n: u32,
        level: u32,
        beta: Option<i64>,
        tame: i64,
        omega: Sign,
    ) -> SkewCharacterComponent {
        SkewCharacterComponent::new(3, n, level, beta, tame, omega).unwrap()
    }

    fn datum(cs: Vec<SkewCharacterComponent>) -> VeryCuspidalDatum {
        VeryCuspidalDatum::new(3, cs).unwrap()
    }

    #[test]
    fn single_component_packet() {
        let xi = datum(vec![comp(3, 1, Some(14), 5, Sign::Plus)]);
        let p = assemble_packet(&xi).unwrap();
        assert_eq!(p.len(), 1);
        assert_eq!(p.twist, Sign::Plus);
        assert_eq!(p.members[0].components[0].amendment, Tag::Trivial);
        assert_eq!(p.base_change, xi.components);
    }

    #[test]
    fn even_rank_twist_flips_omega() {
        let xi = datum(vec![
            comp(1, 2, Some(2), 1, Sign::Minus),
            comp(3, 2, Some(14), 0, Sign::Minus),
        ]);
        let p = assemble_packet(&xi).unwrap();
        assert_eq!(p.twist, Sign::Minus);
        assert_eq!(p.len(), 2);
        for m in &p.members {
            assert!(m
                .components
                .iter()
                .all(|c| c.character.skew_sign == Sign::Plus));
            let bc = base_change_of(&m.x, &m.label(3)).unwrap();
            assert_eq!(bc.untwisted, xi.components);
            assert!(bc.plus_normalized.iter().all(|c| c.skew_sign == Sign::Plus));
        }
        // d = 2, #I = 2, all odd: ν^y quadratic
        assert!(p.members[0]
            .components
            .iter()
            .all(|c| c.amendment == Tag::Quadratic));
    }

    #[test]
    fn wrong_sign_is_rejected() {
        let xi = datum(vec![
            comp(1, 1, Some(2), 0, Sign::Plus),
            comp(1, 1, Some(6), 0, Sign::Plus),
        ]);
        assert_eq!(
            assemble_packet(&xi).unwrap_err().invariant(),
            Some(Invariant::UniformSkewSign)
        );
    }

    #[test]
    fn degenerate_path_has_no_correction() {
        let xi = datum(vec![
            comp(1, 1, Some(2), 1, Sign::Minus),
            comp(1, 1, Some(6), 3, Sign::Minus),
        ]);
        let p = assemble_packet(&xi).unwrap();
        for m in &p.members {
            for c in &m.components {
                assert_eq!(c.amendment, Tag::Trivial);
                assert_eq!(
                    c.character,
                    twist_by_sign(&xi.components[c.id], Sign::Minus)
                );
            }
        }
    }

    #[test]
    fn uniqueness_and_negative_control() {
        let xi = datum(vec![comp(1, 2, Some(2), 0, Sign::Plus)]);
        assert_eq!(tame_twist_family(&xi).len(), 4);
        assert!(amending_unique(&xi).unwrap());
        let broken = |_: &EmbeddingClass, d: &VeryCuspidalDatum| {
            let mut out = d.clone();
            let c = &mut out.components[0];
            if c.tame_exponent < c.tame_modulus() / 2 {
                *c = c.twist_tame_quadratic();
            }
            Ok(out)
        };
        assert!(!amending_unique_with(&xi, broken).unwrap());

        let xi2 = datum(vec![
            comp(1, 1, Some(2), 0, Sign::Minus),
            comp(3, 1, Some(14), 0, Sign::Minus),
        ]);
        assert!(amending_unique(&xi2).unwrap());
    }

    #[test]
    fn endoscopic_examples() {
        let xi = datum(vec![
            comp(1, 1, Some(2), 0, Sign::Plus),
            comp(1, 1, Some(6), 1, Sign::Minus),
        ]);
        let s = endoscopic_split(&xi, (Sign::Plus, Sign::Minus)).unwrap();
        assert_eq!(s.total_members(), 1);
        assert_eq!(s.factors[0].ids, vec![0]);
        assert_eq!(s.factors[1].ids, vec![1]);
        // (−,+) at n1 = n2 is canonicalized
        let t = endoscopic_split(&xi, (Sign::Minus, Sign::Plus)).unwrap();
        assert_eq!(t, s);
        assert_eq!(
            endoscopic_split(&xi, (Sign::Plus, Sign::Plus))
                .unwrap_err()
                .invariant(),
            Some(Invariant::SignMembership)
        );

        let same = datum(vec![
            comp(1, 1, Some(2), 0, Sign::Plus),
            comp(1, 1, Some(6), 1, Sign::Plus),
            comp(3, 1, Some(14), 0, Sign::Plus),
        ]);
        let s = endoscopic_split(&same, (Sign::Plus, Sign::Plus)).unwrap();
        assert!(s.factors[1].packet.is_none());
        assert_eq!(s.total_members(), assemble_packet(&same).unwrap().len());
        assert_eq!(
            endoscopic_split(&same, (Sign::Plus, Sign::Minus))
                .unwrap_err()
                .invariant(),
            Some(Invariant::SignPatternParity)
        );
        assert!(EndoscopicDatum::new(2, 1, (Sign::Plus, Sign::Minus)).is_err());
        assert!(EndoscopicDatum::new(2, 1, (Sign::Minus, Sign::Minus)).is_ok());
    }
}
