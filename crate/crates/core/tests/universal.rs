mod common;

use std::collections::BTreeSet;
use std::sync::Arc;

use common::{cyclic, p4};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use subshift_core::codec::{encode_config, Configuration, NatStream, Periodic1d};
use subshift_core::decode::{decoded_language, fitting_layer_patterns};
use subshift_core::lang::{sft_language, Avoider};
use subshift_core::oracle::run_operator;
use subshift_core::pattern::Grid;
use subshift_core::skeleton::{alphabet, ty_of, C0, C1, LB, RB};
use subshift_core::universal::{
    assign_layers, axis_constant_lift, build_ks, build_universal_1d, decode_row, gamma_decode, gamma_encode,
    ks_encode, pack_binary, pack_prefix, packed_spec, serialize_stream, uniformity_patterns, unpack_operator,
    vertical_type_patterns, Source,
};
use subshift_core::{Alphabet, Error, Letter, PartialPattern, SubshiftSpec};

fn sized(s: u32) -> SubshiftSpec {
    SubshiftSpec::fullshift(s).unwrap()
}

fn language(spec: &SubshiftSpec, len: usize) -> BTreeSet<Vec<Letter>> {
    sft_language(spec, len).unwrap().into_iter().map(|w| w.into_cells()).collect()
}

#[test]
fn assignment_examples() {
    let a = assign_layers(&[sized(2), sized(2), sized(4)]);
    assert_eq!((a.target(1), a.target(2), a.target(3)), (Some(0), Some(1), Some(2)));
    assert_eq!(a.target(4), Some(2));
    let a = assign_layers(&[sized(8)]);
    assert_eq!((a.target(1), a.target(2), a.target(3)), (None, None, Some(0)));
    assert!((4..20).all(|n| a.target(n) == Some(0)));
    let a = assign_layers(&[sized(2)]);
    assert!((1..20).all(|n| a.target(n) == Some(0)));
}

#[test]
fn assignment_respects_sizes_and_covers_targets() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..50 {
        let sizes: Vec<u32> = (0..rng.gen_range(1..6)).map(|_| rng.gen_range(1..40)).collect();
        let targets: Vec<SubshiftSpec> = sizes.iter().map(|&s| sized(s)).collect();
        let a = assign_layers(&targets);
        let cover = a.covering_layer().unwrap();
        let mut seen = BTreeSet::new();
        for n in 1..=cover + 3 {
            if let Some(t) = a.target(n) {
                assert!(1u64 << n >= sizes[t] as u64, "layer {n} target {t}");
                seen.insert(t);
            }
        }
        assert_eq!(seen.len(), sizes.len(), "{sizes:?}");
    }
}

#[test]
fn bundle_registry_lists_assigned_layers() {
    let b = build_universal_1d(vec![SubshiftSpec::golden_mean(), SubshiftSpec::no00no11()], p4()).unwrap();
    assert_eq!(b.registry_layers, vec![1, 2]);
    assert_eq!(b.registry.name(0).unwrap(), "L1");
    let b = build_universal_1d(vec![sized(8)], p4()).unwrap();
    assert_eq!(b.registry_layers, vec![3]);
    assert!(build_universal_1d(vec![], p4()).is_err());
}

#[test]
fn stream_rounds_interleave_layers() {
    let b = build_universal_1d(vec![SubshiftSpec::golden_mean()], p4()).unwrap();
    assert!(matches!(b.stream.source(0), Source::Skeleton(0)));
    assert!(!matches!(b.stream.source(1), Source::Skeleton(_)));
    assert!(matches!(b.stream.source(2), Source::Skeleton(1)));
    assert_eq!(b.stream.activation_round(1), Some(0));
    assert_eq!(b.stream.activation_round(2), Some(11));
    // Idempotent access.
    assert_eq!(b.spec.pattern(40), b.spec.pattern(40));
}

#[test]
fn golden_mean_universal_decodes_to_golden_mean() {
    let b = build_universal_1d(vec![SubshiftSpec::golden_mean()], p4()).unwrap();
    let extra = fitting_layer_patterns(&b, 12 * 6 + 1);
    let lang = decoded_language(p4(), 1, 3, &extra).unwrap();
    assert_eq!(lang, language(&SubshiftSpec::golden_mean(), 3));
}

#[test]
fn fullshift_universal_decodes_everything() {
    let b = build_universal_1d(vec![sized(2)], p4()).unwrap();
    let extra = fitting_layer_patterns(&b, 12 * 7 + 1);
    // Higher layers re-code the target and only guard their unused letters.
    assert!(!extra.is_empty());
    assert_eq!(decoded_language(p4(), 1, 4, &extra).unwrap().len(), 16);
}

#[test]
fn pack_zero_and_unpack() {
    let zeros = pack_binary(p4(), &NatStream::constant(0));
    for q in -200i64..200 {
        assert_ne!(zeros.letter_at(q), C1);
    }
    let psi = unpack_operator(p4());
    let s = encode_config(Arc::new(zeros));
    for i in 0..6 {
        assert_eq!(run_operator(&psi, &s, i, 1 << 14).unwrap(), 0);
    }
}

#[test]
fn unpack_reads_a_generated_window() {
    // Depth-3 period with layer-i coding cells uniform in x = 1, 0, 1.
    let sizes = p4().bits_per_layer(3).unwrap();
    let bits: Vec<Vec<bool>> = sizes.iter().zip([true, false, true]).map(|(&n, b)| vec![b; n]).collect();
    let period = p4().generate(3, &bits).unwrap();
    let s = encode_config(Arc::new(Periodic1d { alphabet: alphabet(), period }));
    let psi = unpack_operator(p4());
    let got: Vec<u64> = (0..3).map(|i| run_operator(&psi, &s, i, 1 << 14).unwrap()).collect();
    assert_eq!(got, vec![1, 0, 1]);
}

#[test]
fn unpack_inverts_pack() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let psi = unpack_operator(p4());
    for _ in 0..20 {
        let x: Vec<u64> = (0..8).map(|_| rng.gen_range(0..2)).collect();
        let packed = pack_prefix(p4(), &x).unwrap();
        let s = encode_config(Arc::new(packed));
        let got: Vec<u64> = (0..8).map(|i| run_operator(&psi, &s, i, 1 << 14).unwrap()).collect();
        assert_eq!(got, x);
    }
    assert_eq!(pack_prefix(p4(), &[0, 2]).err(), Some(Error::NotBit { value: 2 }));
}

#[test]
fn packed_configurations_avoid_the_packed_stream() {
    let spec = packed_spec(p4());
    let pats = spec.first(600);
    let av = Avoider::new(&pats);
    let max = pats.iter().map(PartialPattern::span).max().unwrap();
    let packed = pack_prefix(p4(), &[1, 0, 1, 1]).unwrap();
    let w: Vec<Letter> = (-500i64..500 + max as i64).map(|q| packed.letter_at(q)).collect();
    assert!(av.avoids(&w));
}

#[test]
fn uniformity_rejects_mixed_layer_cells() {
    let u = uniformity_patterns(p4(), 1).unwrap();
    let av = Avoider::new(&u);
    let mixed = cyclic(&p4().generate(1, &[vec![true, false, true, true]]).unwrap(), 3);
    assert!(!av.avoids(&mixed));
    let ones = cyclic(&p4().generate(1, &[vec![true; 4]]).unwrap(), 3);
    assert!(av.avoids(&ones));
    // Consecutive groups that differ.
    let mut two = p4().generate(1, &[vec![true; 4]]).unwrap();
    two.extend(p4().generate(1, &[vec![false; 4]]).unwrap());
    assert!(!av.avoids(&cyclic(&two, 2)));
    let u2 = uniformity_patterns(p4(), 2).unwrap();
    let sizes = p4().bits_per_layer(2).unwrap();
    let mut l2 = vec![false; sizes[1]];
    l2[3] = true;
    let w = cyclic(&p4().generate(2, &[vec![false; sizes[0]], l2]).unwrap(), 2);
    assert!(!Avoider::new(&u2).avoids(&w));
    assert!(Avoider::new(&u).avoids(&w));
}

#[test]
fn ks_round_trip_for_golden_mean() {
    let gm = SubshiftSpec::golden_mean();
    let ks = build_ks(&gm, p4()).unwrap();
    let c = Arc::new(Periodic1d { alphabet: Alphabet::new(2).unwrap(), period: vec![0, 1, 0] });
    let packed = ks_encode(p4(), c.clone());
    let s = encode_config(Arc::new(packed));
    for n in 0..6u64 {
        let want = encode_config(c.clone()).get(n);
        assert_eq!(run_operator(&ks.psi, &s, n, 1 << 20).unwrap(), want, "index {n}");
    }
    let good_packed = ks_encode(p4(), c);
    let pats = ks.spec.first(200);
    let av = Avoider::new(&pats);
    let window = |p: &dyn Configuration| -> Vec<Letter> { (-3000i64..3000).map(|q| p.cell(&[q])).collect() };
    assert!(av.avoids(&window(&good_packed)));
}

#[test]
fn lift_examples() {
    let b = build_universal_1d(vec![SubshiftSpec::golden_mean()], p4()).unwrap();
    let lifted = axis_constant_lift(&b.spec).unwrap();
    assert_eq!(lifted.dimension, 2);
    let pats = lifted.first(400);
    let admissible = |g: &Grid| {
        pats.iter().all(|p| {
            let b = p.bounds();
            let (w, h) = (g.rows[0].len() as i64, g.rows.len() as i64);
            let mut ok = true;
            for y in -b[1].0..h - b[1].1 {
                for x in -b[0].0..w - b[0].1 {
                    if p.matches(g, &[x, y]).unwrap() {
                        ok = false;
                    }
                }
            }
            ok
        })
    };
    // Layer-1 letters 1,0 on top and 0,0 below; both rows are golden mean.
    let row = |a: [bool; 4], b: [bool; 4]| -> Vec<Letter> {
        [p4().generate(1, &[a.to_vec()]).unwrap(), p4().generate(1, &[b.to_vec()]).unwrap()].concat()
    };
    let top = row([true, false, true, true], [false, true, true, false]);
    let bottom = row([false, true, true, false], [false, false, true, true]);
    let g = Grid { rows: vec![bottom.clone(), top.clone()] };
    assert!(admissible(&g));
    let rows: Vec<Vec<Letter>> = g.rows.iter().map(|r| decode_row(p4(), 1, r)).collect();
    assert_eq!(rows, vec![vec![0], vec![1]]);
    let bad = Grid { rows: vec![vec![C0], vec![LB]] };
    assert!(!admissible(&bad));
    let shifted = Grid { rows: vec![bottom[1..].to_vec(), top[..23].to_vec()] };
    assert!(!admissible(&shifted));
}

#[test]
fn vertical_pairs_are_exactly_the_mixed_types() {
    let v = vertical_type_patterns();
    for a in [LB, RB, C0, C1] {
        for b in [LB, RB, C0, C1] {
            let g = Grid { rows: vec![vec![a], vec![b]] };
            let hit = v.iter().any(|p| p.matches(&g, &[0, 0]).unwrap());
            assert_eq!(hit, ty_of(a) != ty_of(b), "{a} below {b}");
        }
    }
    assert_eq!(v.len(), 10);
    assert!(v.iter().any(|p| p.cells().iter().map(|c| c.1).collect::<Vec<_>>() == vec![LB, RB]));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn gamma_round_trip(vals in prop::collection::vec(any::<u64>(), 0..20)) {
        let mut bits = Vec::new();
        for &v in &vals {
            gamma_encode(v, &mut bits);
        }
        let mut it = bits.iter().copied();
        let mut back = Vec::new();
        while let Some(v) = gamma_decode(|| it.next()) {
            back.push(v);
        }
        prop_assert_eq!(back, vals);
    }

    #[test]
    fn serialisation_is_binary(prefix in prop::collection::vec(0u64..50, 1..8)) {
        let s = serialize_stream(&NatStream::with_prefix(prefix, NatStream::constant(1)));
        prop_assert!((0..200).all(|i| s.get(i) <= 1));
    }
}
