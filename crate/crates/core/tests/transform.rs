mod common;

use std::collections::BTreeSet;

use common::{cyclic, p4};
use subshift_core::decode::decoded_language;
use subshift_core::lang::{sft_language, Avoider};
use subshift_core::pattern::PatternStream;
use subshift_core::skeleton::{C0, C1, LB};
use subshift_core::transform::{anchor, transform_forbidden};
use subshift_core::{Alphabet, Error, Letter, PartialPattern, SubshiftSpec};

fn all_words(s: u32, len: usize) -> BTreeSet<Vec<Letter>> {
    let mut out: Vec<Vec<Letter>> = vec![vec![]];
    for _ in 0..len {
        out = out.into_iter().flat_map(|w| (0..s).map(move |l| [w.clone(), vec![l]].concat())).collect();
    }
    out.into_iter().collect()
}

fn language(spec: &SubshiftSpec, len: usize) -> BTreeSet<Vec<Letter>> {
    sft_language(spec, len).unwrap().into_iter().map(|w| w.into_cells()).collect()
}

#[test]
fn anchors_pin_the_first_coding_cells() {
    let a1 = anchor(p4(), 1).unwrap();
    assert_eq!(a1.context, vec![(0, LB)]);
    assert_eq!(a1.bits, vec![1]);
    let a2 = anchor(p4(), 2).unwrap();
    assert_eq!(a2.bits.len(), 2);
    // Two adjacent real coding cells of the first block.
    assert_eq!(a2.bits[1] - a2.bits[0], 1);
    assert_eq!(a2.context[0], (0, LB));
    // Every context cell lies inside the span up to the last pinned bit.
    assert!(a2.context.iter().all(|&(q, _)| q >= 0 && q < *a2.bits.last().unwrap()));
}

#[test]
fn golden_mean_on_layer_one() {
    let t = transform_forbidden(p4(), 1, &SubshiftSpec::golden_mean()).unwrap();
    assert_eq!(t.finite_len(), Some(1));
    let p = t.get(0).unwrap();
    let cells: Vec<(i64, Letter)> = p.cells_1d().collect();
    assert_eq!(cells, vec![(0, LB), (1, C1), (12, LB), (13, C1)]);
    assert!(t.get(1).is_none());
    assert_eq!(t.pattern(5), p);
    let lang = decoded_language(p4(), 1, 3, &[p]).unwrap();
    assert_eq!(lang, language(&SubshiftSpec::golden_mean(), 3));
}

#[test]
fn generated_configurations_meet_the_transformed_patterns_as_expected() {
    let t = transform_forbidden(p4(), 1, &SubshiftSpec::golden_mean()).unwrap();
    let av = Avoider::new(&[t.get(0).unwrap()]);
    // Layer-1 letters along a period-3 block: 1,0,0 is golden mean, 1,1,0 is not.
    for (letters, ok) in [([true, false, false], true), ([true, true, false], false)] {
        let mut w = Vec::new();
        for &b in &letters {
            w.extend(p4().generate(1, &[vec![b, false, true, false]]).unwrap());
        }
        assert_eq!(av.avoids(&cyclic(&w, 3)), ok);
    }
}

#[test]
fn fullshift_adds_nothing() {
    let t = transform_forbidden(p4(), 1, &SubshiftSpec::fullshift(2).unwrap()).unwrap();
    assert_eq!(t.finite_len(), Some(0));
    assert!(t.get(0).is_none());
    assert_eq!(decoded_language(p4(), 1, 3, &[]).unwrap(), all_words(2, 3));
}

#[test]
fn unused_letters_are_guarded_first() {
    let three = SubshiftSpec::forbid_words(Alphabet::new(3).unwrap(), &["01"]).unwrap();
    let t = transform_forbidden(p4(), 2, &three).unwrap();
    assert_eq!(t.finite_len(), Some(2));
    let a2 = anchor(p4(), 2).unwrap();
    let guard = t.get(0).unwrap();
    for &q in &a2.bits {
        assert!(guard.cells_1d().any(|(o, l)| o == q && l == C1));
    }
    assert!(matches!(transform_forbidden(p4(), 1, &three), Err(Error::AlphabetTooLarge { size: 3, layer: 1 })));
}

#[test]
fn layer_two_image_of_a_four_letter_shift() {
    // Letter 3 may never follow letter 0.
    let four = SubshiftSpec::forbid_words(Alphabet::new(4).unwrap(), &["03"]).unwrap();
    let t = transform_forbidden(p4(), 2, &four).unwrap();
    let pats: Vec<PartialPattern> = (0..t.finite_len().unwrap()).map(|i| t.get(i).unwrap()).collect();
    let lang = decoded_language(p4(), 2, 2, &pats).unwrap();
    assert_eq!(lang, language(&four, 2));
}

#[test]
fn other_layers_are_untouched() {
    let t = transform_forbidden(p4(), 1, &SubshiftSpec::golden_mean()).unwrap();
    let pats = vec![t.get(0).unwrap()];
    assert_eq!(decoded_language(p4(), 2, 2, &pats).unwrap(), all_words(4, 2));
    let t2 = transform_forbidden(p4(), 2, &SubshiftSpec::no00no11()).unwrap();
    let pats: Vec<PartialPattern> = (0..t2.finite_len().unwrap()).map(|i| t2.get(i).unwrap()).collect();
    assert_eq!(decoded_language(p4(), 1, 2, &pats).unwrap(), all_words(2, 2));
}

#[test]
fn patterns_only_use_skeleton_letters() {
    let t = transform_forbidden(p4(), 3, &SubshiftSpec::no00no11()).unwrap();
    for i in 0..t.finite_len().unwrap() {
        let p = t.get(i).unwrap();
        assert_eq!(p.alphabet().size(), 4);
        let bits = p.cells_1d().filter(|&(_, l)| l == C0 || l == C1).count();
        assert!(bits % 3 == 0);
    }
}
