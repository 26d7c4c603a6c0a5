mod common;

use num_bigint::BigInt;
use num_traits::Zero;
use proptest::prelude::*;

use common::{check_fox_identity, check_fox_product, check_smith, letters, matrix, word_from};
use sectors::classify2d::{classify_based, XModHom};
use sectors::complexes::{CWComplex, CatalogSpace, HLetter, HWord};
use sectors::words::Word;
use sectors::xmod::{derivation_image, free_pre_crossed_boundary, target_catalog};
use sectors::zlinalg::{big, bigvec, smith_normal_form, solve, IntMatrix};

fn config(cases: u32) -> ProptestConfig {
    ProptestConfig { cases, failure_persistence: None, ..ProptestConfig::default() }
}

proptest! {
    #![proptest_config(config(500))]

    #[test]
    fn fox_product_rule(u in letters(), v in letters()) {
        check_fox_product(&u, &v)?;
    }

    #[test]
    fn fox_fundamental_identity(w in letters()) {
        check_fox_identity(&w)?;
    }

    #[test]
    fn smith_form(rows in matrix()) {
        check_smith(&rows)?;
    }

    #[test]
    fn solve_agrees_with_box_search(
        rows in (1..=3usize, 1..=3usize).prop_flat_map(|(r, c)| prop::collection::vec(prop::collection::vec(-3i64..=3, c), r)),
        rhs in prop::collection::vec(-6i64..=6, 3),
    ) {
        let a = IntMatrix::from_rows(&rows);
        let b = bigvec(&rhs[..rows.len()]);
        let n = rows[0].len();
        let mut witness = None;
        let mut x = vec![-6i64; n];
        'search: loop {
            if a.mul_vec(&bigvec(&x)) == b {
                witness = Some(x.clone());
                break;
            }
            for i in 0..n {
                x[i] += 1;
                if x[i] <= 6 {
                    continue 'search;
                }
                x[i] = -6;
            }
            break;
        }
        match solve(&a, &b) {
            Some(sol) => {
                prop_assert_eq!(a.mul_vec(&sol.particular), b.clone());
                for k in &sol.kernel {
                    prop_assert!(a.mul_vec(k).iter().all(|v| v.is_zero()));
                }
                let rank = smith_normal_form(&a).rank();
                prop_assert_eq!(sol.kernel.len(), n - rank);
                if let Some(w) = witness {
                    let diff: Vec<BigInt> = bigvec(&w).iter().zip(&sol.particular).map(|(p, q)| p - q).collect();
                    let k = IntMatrix::from_columns(&sol.kernel, n).unwrap_or_else(|_| IntMatrix::zeros(n, 0));
                    prop_assert!(diff.iter().all(|v| v.is_zero()) || solve(&k, &diff).is_some());
                }
            }
            None => prop_assert!(witness.is_none(), "missed solution {:?}", witness),
        }
    }
}

/// Spaces whose labeling sends every attaching word to the identity, so
/// the derivation image is a well-defined module over π₁.
fn exact_spaces() -> Vec<CatalogSpace> {
    CatalogSpace::dimension_two_samples()
        .into_iter()
        .filter(|s| {
            let m = s.complex();
            m.two_cells().iter().all(|t| s.labeling().label(&t.attach).is_identity())
        })
        .collect()
}

fn hword(m: &CWComplex, raw: &[(Vec<(usize, i64)>, usize, bool)]) -> HWord {
    let al = m.alphabet();
    let n = al.len();
    HWord::new(
        raw.iter()
            .map(|(conj, cell, positive)| HLetter {
                conj: word_from(al, &conj.iter().filter(|_| n > 0).map(|&(g, e)| (g % n, e)).collect::<Vec<_>>()),
                cell: m.two_cells()[cell % m.two_cells().len()].name.clone(),
                sign: if *positive { 1 } else { -1 },
            })
            .collect(),
    )
}

fn conjugate(w: &HWord, by: &Word) -> HWord {
    HWord::new(w.letters.iter().map(|l| HLetter { conj: by * &l.conj, ..l.clone() }).collect())
}

proptest! {
    #![proptest_config(config(200))]

    #[test]
    fn peiffer_commutators_vanish(
        space in 0..64usize,
        h1 in prop::collection::vec((letters(), 0..4usize, any::<bool>()), 1..4),
        h2 in prop::collection::vec((letters(), 0..4usize, any::<bool>()), 1..4),
    ) {
        let spaces = exact_spaces();
        prop_assume!(!spaces.is_empty());
        let space = spaces[space % spaces.len()];
        let m = space.complex();
        prop_assume!(!m.two_cells().is_empty());
        let (h1, h2) = (hword(&m, &h1), hword(&m, &h2));
        let d1 = free_pre_crossed_boundary(&m, &h1).unwrap();
        // ⟨h1, h2⟩ = h1 h2 h1⁻¹ ^{∂h1}h2⁻¹
        let peiffer = h1.concat(&h2).concat(&h1.inv()).concat(&conjugate(&h2.inv(), &d1));
        prop_assert!(free_pre_crossed_boundary(&m, &peiffer).unwrap().is_identity());
        for e in derivation_image(&m, &peiffer, &space.labeling()).unwrap() {
            prop_assert!(e.is_zero(), "{} leaves {:?}", space.name(), e.terms().collect::<Vec<_>>());
        }
    }

    #[test]
    fn homotopy_is_an_equivalence(
        coeffs in prop::collection::vec(prop::collection::vec(-4i64..=4, 3), 3),
        sector in 0..4usize,
    ) {
        let m = CatalogSpace::Torus2.complex();
        let x = target_catalog("rp2").unwrap();
        let c = classify_based(&m, &x).unwrap();
        let s = &c.sectors[sector];
        let homs: Vec<XModHom> = coeffs
            .iter()
            .map(|k| {
                let mut v = s.homs.base.clone();
                for (b, &t) in s.homs.basis.iter().zip(k) {
                    for (vi, bi) in v.iter_mut().zip(b) {
                        *vi += bi * big(t);
                    }
                }
                XModHom::from_vector(&c.layout, &v)
            })
            .collect();
        for h in &homs {
            prop_assert!(h.is_homomorphism(&m, &x));
            prop_assert!(c.same_class(h, h));
            prop_assert!(c.canonical(h).is_some());
        }
        for i in 0..3 {
            for j in 0..3 {
                prop_assert_eq!(c.same_class(&homs[i], &homs[j]), c.same_class(&homs[j], &homs[i]));
                prop_assert_eq!(c.same_class(&homs[i], &homs[j]), c.canonical(&homs[i]) == c.canonical(&homs[j]));
                for k in 0..3 {
                    if c.same_class(&homs[i], &homs[j]) && c.same_class(&homs[j], &homs[k]) {
                        prop_assert!(c.same_class(&homs[i], &homs[k]));
                    }
                }
            }
        }
    }
}
