mod common;

use std::sync::Arc;

use common::{ones_pair_window, outputs_on, p4};
use subshift_core::certify::{build_b, dirty, enumerate_simulated, r_b, verify_claim, Budgets, Certifier, ClaimRecord, Inner};
use subshift_core::lang::Avoider;
use subshift_core::oracle::{IdentityMachine, OperatorRegistry};
use subshift_core::universal::{build_universal_1d, UniversalBundle};
use subshift_core::{Error, SubshiftSpec};

fn family() -> Vec<SubshiftSpec> {
    vec![SubshiftSpec::golden_mean(), SubshiftSpec::fullshift(2).unwrap(), SubshiftSpec::no00no11()]
}

fn gm_bundle() -> UniversalBundle {
    build_universal_1d(vec![SubshiftSpec::golden_mean()], p4()).unwrap()
}

fn budgets() -> Budgets {
    Budgets { max_sum: 210, ..Budgets::default() }
}

fn claim(target: usize, operator: usize, b: usize, j: usize) -> ClaimRecord {
    ClaimRecord { target, operator, b, j }
}

#[test]
fn precision_and_read_radius() {
    assert_eq!(build_b(&family()).unwrap(), vec![(0, 2), (1, 1), (2, 2)]);
    let four = SubshiftSpec::forbid_words(subshift_core::Alphabet::new(2).unwrap(), &["0000", "11"]).unwrap();
    assert_eq!(build_b(&[four]).unwrap(), vec![(0, 4)]);
    let stream = gm_bundle().spec;
    assert!(matches!(build_b(&[stream]), Err(Error::NotSft)));
    // Inputs 2.. address cells 0, 1, -1, 2, -2, ...
    assert_eq!(r_b(1, 1), 4);
    assert_eq!(r_b(2, 1), 6);
}

#[test]
fn dirt_examples() {
    let gm = SubshiftSpec::golden_mean();
    assert!(dirty(&[0, 1, 1, 0, 0], &gm, 2));
    assert!(!dirty(&[1, 0, 1, 0, 1], &gm, 2));
    assert!(dirty(&[0, 2, 0], &SubshiftSpec::fullshift(2).unwrap(), 1));
    assert!(!dirty(&[0, 1, 0], &SubshiftSpec::fullshift(2).unwrap(), 1));
}

#[test]
fn universal_golden_mean_claims() {
    let bundle = gm_bundle();
    let g = family();
    let bs = build_b(&g).unwrap();
    let mut seen = Vec::new();
    let rep = enumerate_simulated(&bundle.spec, &bundle.registry, &g, &bs, &budgets(), &mut |c| seen.push(*c)).unwrap();
    assert_eq!(rep.claims, vec![claim(1, 0, 1, 25), claim(0, 0, 2, 201)]);
    assert_eq!(seen, rep.claims);
    assert_eq!(rep.claimed_targets(), vec![1, 0]);
    assert!(rep.parked.is_empty() && rep.dropped.is_empty());
    for c in &rep.claims {
        assert!(verify_claim(c, &bundle.spec, &bundle.registry, &g, &budgets()).unwrap(), "{c:?}");
    }
    // Same inputs, same claims in the same order.
    let again = enumerate_simulated(&bundle.spec, &bundle.registry, &g, &bs, &budgets(), &mut |_| {}).unwrap();
    assert_eq!(again.claims, rep.claims);
    assert_eq!(again.checked, rep.checked);
}

#[test]
fn forged_claims_are_rejected() {
    let bundle = gm_bundle();
    let g = family();
    let b = budgets();
    let mut cert = Certifier::new(bundle.spec.clone());
    let ell = cert.modulus(&bundle.registry, 0, 2, 1, b.modulus).unwrap();
    assert_eq!(ell, 36);
    assert!(matches!(
        verify_claim(&claim(0, 0, 2, ell), &bundle.spec, &bundle.registry, &g, &b),
        Err(Error::InvalidClaim(_))
    ));
    assert!(!verify_claim(&claim(0, 0, 2, 200), &bundle.spec, &bundle.registry, &g, &b).unwrap());
    assert!(!verify_claim(&claim(2, 0, 2, 201), &bundle.spec, &bundle.registry, &g, &b).unwrap());
    assert!(verify_claim(&claim(9, 0, 2, 201), &bundle.spec, &bundle.registry, &g, &b).is_err());
}

#[test]
fn golden_mean_threshold_matches_exhaustive_search() {
    let bundle = gm_bundle();
    let gm = SubshiftSpec::golden_mean();
    let op = bundle.registry.get(0).unwrap().clone();
    let mut cert = Certifier::new(bundle.spec.clone());
    let b = budgets();
    // Below the threshold the certifier's witness is checked cell by cell.
    let Inner::Fail { witness: Some(w) } = cert.inner_check(op.as_ref(), &gm, 2, 200, &b, b.enum_cap).unwrap() else {
        panic!("expected a witness at depth 200");
    };
    assert_eq!(w.len(), 401);
    assert!(Avoider::new(&bundle.spec.first(200)).avoids(&w));
    let out: Vec<u32> = outputs_on(op.as_ref(), 6, &w, 4).unwrap()[2..].iter().map(|&v| v as u32).collect();
    // Inputs 2..=6 are output cells 0, 1, -1, 2, -2.
    let window = [out[4], out[2], out[0], out[1], out[3]];
    assert!(dirty(&window, &gm, 2), "{window:?}");
    assert!(ones_pair_window(p4(), &bundle.spec.first(200), 1).is_some());
    // At the threshold no window of any width has an adjacent pair of ones,
    // since every such window restricts to the searched one.
    assert!(ones_pair_window(p4(), &bundle.spec.first(201), 1).is_none());
    for j in 201..=204 {
        assert_eq!(cert.inner_check(op.as_ref(), &gm, 2, j, &b, b.enum_cap).unwrap(), Inner::Pass, "j {j}");
    }
}

#[test]
fn identity_on_the_golden_mean() {
    let mut reg = OperatorRegistry::new();
    reg.push("id", Arc::new(IdentityMachine));
    let gm = SubshiftSpec::golden_mean();
    let own = vec![gm.clone()];
    let rep = enumerate_simulated(&gm, &reg, &own, &build_b(&own).unwrap(), &Budgets::default(), &mut |_| {}).unwrap();
    assert_eq!(rep.claimed_targets(), vec![0]);
    let other = vec![SubshiftSpec::no00no11()];
    let rep = enumerate_simulated(&gm, &reg, &other, &build_b(&other).unwrap(), &Budgets::default(), &mut |_| {}).unwrap();
    assert!(rep.claims.is_empty());
    let mut cert = Certifier::new(gm.clone());
    let Inner::Fail { witness: Some(w) } =
        cert.inner_check(&IdentityMachine, &other[0], 2, 5, &Budgets::default(), 1 << 16).unwrap()
    else {
        panic!("identity cannot land in no00no11");
    };
    assert!(Avoider::new(&gm.first(5)).avoids(&w));
    let centre = &w[5 - 2..=5 + 2];
    assert!(dirty(centre, &other[0], 2), "{centre:?}");
}
