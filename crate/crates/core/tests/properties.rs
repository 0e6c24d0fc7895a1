use proptest::prelude::*;

use upacket::amending::{amending_character, transfer_character, Tag, Vertex};
use upacket::characters::{twist_by_sign, SkewCharacterComponent, VeryCuspidalDatum};
use upacket::embeddings::{enumerate_embeddings, EmbeddingClass};
use upacket::field::{literal_mult_action_sign, mult_action_sign};
use upacket::hecke::{hecke_params, reducibility_points};
use upacket::lattices::{dual, Block, BlockLabel, BlockLatticeSequence};
use upacket::packets::assemble_packet;
use upacket::Sign;

fn field_card() -> impl Strategy<Value = u64> {
    prop::sample::select(vec![
        3u64, 5, 7, 9, 11, 13, 25, 27, 49, 81, 121, 125, 243, 343, 729,
    ])
}

fn embedding(max: usize) -> impl Strategy<Value = EmbeddingClass> {
    (1..=max).prop_flat_map(|k| {
        let ids: Vec<usize> = (0..k).collect();
        let all = enumerate_embeddings(&ids).unwrap();
        prop::sample::select(all)
    })
}

fn sign() -> impl Strategy<Value = Sign> {
    prop::sample::select(vec![Sign::Plus, Sign::Minus])
}

proptest! {
    #[test]
    fn closed_form_sign_matches_permutation(card in field_card(), pick in 0usize..64, copies in 1u64..4) {
        let divisors: Vec<u64> = (1..card).filter(|m| (card - 1) % m == 0).collect();
        let m = divisors[pick % divisors.len()];
        prop_assert_eq!(
            mult_action_sign(m, card, copies).unwrap(),
            literal_mult_action_sign(m, card, copies).unwrap()
        );
    }

    #[test]
    fn conjugation_is_a_group_action(k in 0usize..26, t in 0i64..28, a in 0u32..6, b in 0u32..6) {
        let c = SkewCharacterComponent::new(3, 3, 1, Some(14 + 28 * k as i64), t, Sign::Plus).unwrap();
        prop_assert_eq!(c.conjugate(a).conjugate(b), c.conjugate((a + b) % 3));
        prop_assert_eq!(c.conjugate(3), c.clone());
        prop_assert!(c.is_galois_conjugate(&c.conjugate(a)));
    }

    #[test]
    fn twists_are_involutions(t in 0i64..4, omega in sign(), eps in sign()) {
        let c = SkewCharacterComponent::new(3, 1, 2, Some(6), t, omega).unwrap();
        prop_assert_eq!(c.twist_tame_quadratic().twist_tame_quadratic(), c.clone());
        prop_assert_eq!(twist_by_sign(&twist_by_sign(&c, eps), eps), c.clone());
        prop_assert_ne!(c.twist_tame_quadratic(), c);
    }

    #[test]
    fn dual_is_an_involution(offsets in prop::collection::vec(-12i64..12, 4), twists in prop::collection::vec(0i64..2, 3), period in 1i64..7) {
        // V_- and V_+ are paired by one form, so they share its twist
        let twists = [twists[0], twists[1], twists[2], twists[0]];
        let labels = [BlockLabel::Minus, BlockLabel::Component(0), BlockLabel::Component(1), BlockLabel::Plus];
        let blocks = labels
            .iter()
            .zip(offsets.iter().zip(&twists))
            .map(|(&label, (&offset, &t))| Block { label, degree: Some(1), offset, form_twist: Some(t) })
            .collect();
        let l = BlockLatticeSequence::new(blocks, period).unwrap();
        let dd = dual(&dual(&l).unwrap()).unwrap();
        prop_assert_eq!(dd.blocks(), l.blocks());
    }

    #[test]
    fn switching_sides_swaps_the_vertices(x in embedding(5), d in 0u32..9) {
        for &i in x.index_set() {
            for &j in x.index_set() {
                if x.class_of(i).unwrap() == x.class_of(j).unwrap() {
                    continue;
                }
                prop_assert_eq!(
                    amending_character(Vertex::Y, i, &x, d).unwrap().gl,
                    amending_character(Vertex::Z, j, &x, d).unwrap().gl
                );
            }
        }
    }

    #[test]
    fn transfer_depends_only_on_the_size_of_i(x in embedding(6), d in 0u32..9) {
        let want = if x.len() % 2 == 1 { Tag::Quadratic } else { Tag::Trivial };
        for &i in x.index_set() {
            let chi = transfer_character(i, &x, d).unwrap();
            prop_assert_eq!(chi.gl, want);
            prop_assert!(chi.unitary_trivial());
            prop_assert_eq!(chi.value_at_uniformizer, 1);
        }
    }

    #[test]
    fn reducibility_points_are_symmetric(n in (0u32..10).prop_map(|k| 2 * k + 1), m in any::<bool>()) {
        let p = reducibility_points(hecke_params(m, n).unwrap(), n);
        let mut neg = p.points.map(|s| -s);
        neg.sort();
        prop_assert_eq!(neg, p.points);
    }

    #[test]
    fn amendments_follow_permutations(perm in Just(vec![0usize, 1, 2, 3]).prop_shuffle(), d in 1u32..5, tames in prop::collection::vec(0i64..28, 4)) {
        let specs = [(1u32, 2i64), (1, 6), (3, 14), (3, 42)];
        let build = |order: &[usize]| {
            let comps = order
                .iter()
                .map(|&i| {
                    let (n, b) = specs[i];
                    SkewCharacterComponent::new(3, n, d, Some(b), tames[i], Sign::Minus).unwrap()
                })
                .collect();
            VeryCuspidalDatum::new(3, comps).unwrap()
        };
        let base = assemble_packet(&build(&[0, 1, 2, 3])).unwrap();
        let moved = assemble_packet(&build(&perm)).unwrap();
        prop_assert_eq!(moved.len(), 8);
        // member x of the permuted datum corresponds to σ(x) of the original
        for m in &moved.members {
            let even = m.x.even_part().iter().map(|&k| perm[k]).collect();
            let x = EmbeddingClass::new(vec![0, 1, 2, 3], even).unwrap();
            let orig = base.members.iter().find(|b| b.x == x).unwrap();
            for c in &m.components {
                prop_assert_eq!(c.amendment, orig.components[perm[c.id]].amendment);
                prop_assert_eq!(&c.character, &orig.components[perm[c.id]].character);
            }
        }
    }
}
