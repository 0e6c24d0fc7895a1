//! Hecke algebra parameters at the two maximal vertices and the resulting
//! reducibility points of π̃|det|^s ⋊ π.

use num_rational::Rational64;
use serde::Serialize;

use crate::amending::{amending_character, Vertex};
use crate::characters::{SkewCharacterComponent, VeryCuspidalDatum};
use crate::embeddings::{ComponentId, EmbeddingClass};
use crate::error::{Error, Invariant, Result};
use crate::lattices::{build_higher, reductive_quotient, GroupFamily};

/// Exponents r_y, r_z with ω_{w,1}/ω_{w,2} = −q^{r_w}.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct HeckeParams {
    pub r_y: Rational64,
    pub r_z: Rational64,
}

/// The four real parts {±(r_y ± r_z)/(2n)}, sorted.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct ReducibilityPoints {
    pub points: [Rational64; 4],
}

impl ReducibilityPoints {
    pub fn contains(&self, s: Rational64) -> bool {
        self.points.contains(&s)
    }
}

fn half(n: u32) -> Rational64 {
    Rational64::new(n as i64, 2)
}

/// Parameter exponent of the finite Hecke algebra of the i∘ factor of the
/// reductive quotient (U2 or U3 over the degree-n residue field).
pub fn lusztig_case(family: GroupFamily, skew: bool, matching: bool, n: u32) -> Result<Rational64> {
    if !skew {
        return Ok(Rational64::from_integer(0));
    }
    match family {
        GroupFamily::U2 => Ok(half(n)),
        GroupFamily::U3 if matching => Ok(half(3 * n)),
        GroupFamily::U3 => Ok(half(n)),
        other => Err(Error::inconsistent(format!(
            "{other:?} quotient carries no Hecke generator"
        ))),
    }
}

pub fn hecke_params(matching: bool, n: u32) -> Result<HeckeParams> {
    if n % 2 == 0 {
        return Err(Error::invalid(Invariant::OddDegree, format!("n = {n}")));
    }
    Ok(HeckeParams {
        r_y: if matching { half(3 * n) } else { half(n) },
        r_z: half(n),
    })
}

/// Same parameters, read off the reductive quotients of 𝔐^y and 𝔐^z.
pub fn hecke_params_from_quotients(
    x: &EmbeddingClass,
    i0: ComponentId,
    degrees: &[u32],
    skew: bool,
    matching: bool,
) -> Result<HeckeParams> {
    let n = *degrees.get(i0).ok_or_else(|| {
        Error::invalid(
            Invariant::ComponentMembership,
            format!("no degree for id {i0}"),
        )
    })?;
    let r = |w: Vertex| -> Result<Rational64> {
        let seq = build_higher(x, i0, w.lattice())?.refine(x, degrees, Some(i0))?;
        let q = reductive_quotient(&seq, Some(i0))?;
        lusztig_case(q.factors[0].0, skew, matching, n)
    };
    Ok(HeckeParams {
        r_y: r(Vertex::Y)?,
        r_z: r(Vertex::Z)?,
    })
}

pub fn reducibility_points(p: HeckeParams, n: u32) -> ReducibilityPoints {
    let two_n = Rational64::from_integer(2 * n as i64);
    let a = (p.r_y + p.r_z) / two_n;
    let b = (p.r_y - p.r_z) / two_n;
    let mut points = [a, -a, b, -b];
    points.sort();
    ReducibilityPoints { points }
}

/// Whether the GL-side character is, up to Galois conjugacy, the i∘
/// component corrected by the amending tag for (w, x, d). At level 0 the
/// correction is trivial.
pub fn match_test(
    gl: &SkewCharacterComponent,
    x: &EmbeddingClass,
    datum: &VeryCuspidalDatum,
    i0: ComponentId,
    w: Vertex,
) -> Result<bool> {
    let base = datum.components.get(i0).ok_or_else(|| {
        Error::invalid(Invariant::ComponentMembership, format!("no component {i0}"))
    })?;
    if gl.n != base.n || gl.field != base.field || gl.level != base.level {
        return Ok(false);
    }
    let d = datum.level();
    let target = if d > 0 && amending_character(w, i0, x, d)?.gl.is_quadratic() {
        base.twist_tame_quadratic()
    } else {
        base.clone()
    };
    Ok(target
        .galois_orbit()
        .iter()
        .any(|c| c.beta == gl.beta && c.tame_exponent == gl.tame_exponent))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sign::Sign;

    fn r(a: i64, b: i64) -> Rational64 {
        Rational64::new(a, b)
    }

    #[test]
    fn parameter_examples() {
        assert_eq!(
            hecke_params(false, 1).unwrap(),
            HeckeParams {
                r_y: r(1, 2),
                r_z: r(1, 2)
            }
        );
        assert_eq!(
            hecke_params(true, 1).unwrap(),
            HeckeParams {
                r_y: r(3, 2),
                r_z: r(1, 2)
            }
        );
        assert_eq!(
            hecke_params(true, 3).unwrap(),
            HeckeParams {
                r_y: r(9, 2),
                r_z: r(3, 2)
            }
        );
        assert!(hecke_params(true, 2).is_err());
    }

    #[test]
    fn point_examples() {
        for n in [1u32, 3, 5] {
            let p = reducibility_points(hecke_params(false, n).unwrap(), n);
            assert_eq!(p.points, [r(-1, 2), r(0, 1), r(0, 1), r(1, 2)]);
            let p = reducibility_points(hecke_params(true, n).unwrap(), n);
            assert_eq!(p.points, [r(-1, 1), r(-1, 2), r(1, 2), r(1, 1)]);
        }
    }

    #[test]
    fn lusztig_table() {
        assert_eq!(
            lusztig_case(GroupFamily::U3, false, true, 3).unwrap(),
            r(0, 1)
        );
        assert_eq!(
            lusztig_case(GroupFamily::U2, true, true, 3).unwrap(),
            r(3, 2)
        );
        assert_eq!(
            lusztig_case(GroupFamily::U3, true, false, 3).unwrap(),
            r(3, 2)
        );
        assert_eq!(
            lusztig_case(GroupFamily::U3, true, true, 3).unwrap(),
            r(9, 2)
        );
        assert!(lusztig_case(GroupFamily::GL1, true, true, 1).is_err());
    }

    #[test]
    fn quotients_reproduce_the_closed_form() {
        for k in 1..=3usize {
            let ids: Vec<usize> = (0..k).collect();
            let degrees = vec![3u32; k];
            for x in crate::embeddings::enumerate_embeddings(&ids).unwrap() {
                for i0 in 0..k {
                    for m in [false, true] {
                        assert_eq!(
                            hecke_params_from_quotients(&x, i0, &degrees, true, m).unwrap(),
                            hecke_params(m, 3).unwrap()
                        );
                    }
                }
            }
        }
    }

    fn datum(level: u32, comps: &[(u32, Option<i64>, i64)]) -> VeryCuspidalDatum {
        let cs = comps
            .iter()
            .map(|&(n, b, t)| SkewCharacterComponent::new(3, n, level, b, t, Sign::Plus).unwrap())
            .collect();
        VeryCuspidalDatum::new(3, cs).unwrap()
    }

    #[test]
    fn match_examples() {
        // #I = 2, i∘ ∈ I_o, d = 2: ν^y is quadratic
        let xi = datum(2, &[(1, Some(2), 1), (3, Some(14), 0)]);
        let x = EmbeddingClass::all_odd(vec![0, 1]).unwrap();
        let amended = xi.components[0].twist_tame_quadratic();
        assert!(match_test(&amended, &x, &xi, 0, Vertex::Y).unwrap());
        assert!(!match_test(&xi.components[0], &x, &xi, 0, Vertex::Y).unwrap());
        assert!(!match_test(&xi.components[1], &x, &xi, 0, Vertex::Y).unwrap());

        let conj = xi.components[1].conjugate(2).twist_tame_quadratic();
        assert!(match_test(&conj, &x, &xi, 1, Vertex::Y).unwrap());

        // d odd: no correction
        let xi1 = datum(1, &[(1, Some(2), 1)]);
        let x1 = EmbeddingClass::all_odd(vec![0]).unwrap();
        assert!(match_test(&xi1.components[0], &x1, &xi1, 0, Vertex::Y).unwrap());
        assert!(match_test(&xi1.components[0].conjugate(1), &x1, &xi1, 0, Vertex::Y).unwrap());
    }

    #[test]
    fn plus_one_iff_match() {
        let one = Rational64::from_integer(1);
        let half = r(1, 2);
        for n in [1u32, 3, 5, 7] {
            for m in [false, true] {
                let p = reducibility_points(hecke_params(m, n).unwrap(), n);
                assert_eq!(p.contains(one), m);
                assert!(p.contains(half) && p.contains(-half));
                let mut neg = p.points.map(|s| -s);
                neg.sort();
                assert_eq!(neg, p.points);
            }
        }
    }
}
