mod common;

use common::{all_crossed_modules, check_cocycle, check_round_trip, check_witness};

#[test]
fn every_small_crossed_module_has_a_cocycle_invariant() {
    let all = all_crossed_modules();
    assert!(all.len() > 1000, "only {} crossed modules", all.len());
    for (hn, gn, x) in &all {
        if let Err(e) = check_cocycle(x) {
            panic!("{hn} -> {gn}: {e}");
        }
    }
}

#[test]
fn split_crossed_modules_have_coboundary_obstructions() {
    let mut checked = 0;
    for (hn, gn, x) in all_crossed_modules() {
        match check_witness(&x) {
            Ok(true) => checked += 1,
            Ok(false) => {}
            Err(e) => panic!("{hn} -> {gn}: {e}"),
        }
    }
    assert!(checked > 100);
}

#[test]
fn strict_two_groups_round_trip() {
    for (hn, gn, x) in all_crossed_modules() {
        if let Err(e) = check_round_trip(&x) {
            panic!("{hn} -> {gn}: {e}");
        }
    }
}
