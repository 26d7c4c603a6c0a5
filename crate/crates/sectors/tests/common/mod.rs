//! Checks shared by the property suites and the acceptance run.
#![allow(dead_code)]

use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};
use proptest::prelude::*;
use proptest::test_runner::TestCaseError;

use sectors::words::{fox_derivative, Alphabet, GroupRingElement, Word};
use sectors::xmod::{AxiomViolation, FiniteCrossedModule, FiniteGroup, ModuleXMod};
use sectors::zlinalg::{smith_normal_form, IntMatrix};

pub fn alphabet() -> Arc<Alphabet> {
    Alphabet::new(&["a", "b", "c"]).unwrap()
}

pub fn word_from(al: &Arc<Alphabet>, letters: &[(usize, i64)]) -> Word {
    letters.iter().fold(Word::identity(al), |w, &(g, e)| &w * &Word::power_of(al, g, e))
}

pub fn letters() -> impl Strategy<Value = Vec<(usize, i64)>> {
    prop::collection::vec((0..3usize, prop_oneof![-3i64..=-1, 1i64..=3]), 0..10)
}

pub fn matrix() -> impl Strategy<Value = Vec<Vec<i64>>> {
    (1..=8usize, 1..=8usize).prop_flat_map(|(r, c)| prop::collection::vec(prop::collection::vec(-50i64..=50, c), r))
}

/// `∂(uv)/∂a = ∂u/∂a + u·∂v/∂a` for every generator.
pub fn check_fox_product(u: &[(usize, i64)], v: &[(usize, i64)]) -> Result<(), TestCaseError> {
    let al = alphabet();
    let (u, v) = (word_from(&al, u), word_from(&al, v));
    let uv = &u * &v;
    for a in 0..3 {
        let rhs = fox_derivative(&u, a).add(&fox_derivative(&v, a).left_mul_word(&u));
        prop_assert_eq!(fox_derivative(&uv, a), rhs);
    }
    Ok(())
}

/// `Σₐ (∂w/∂a)(a − 1) = w − 1`.
pub fn check_fox_identity(w: &[(usize, i64)]) -> Result<(), TestCaseError> {
    let al = alphabet();
    let w = word_from(&al, w);
    let one = GroupRingElement::one(&al);
    let mut total = GroupRingElement::zero(&al);
    for a in 0..3 {
        let a_minus_one = GroupRingElement::from_word(&Word::power_of(&al, a, 1)).sub(&one);
        total = total.add(&fox_derivative(&w, a).mul(&a_minus_one));
    }
    prop_assert_eq!(total, GroupRingElement::from_word(&w).sub(&one));
    Ok(())
}

/// Fraction-free elimination, independent of the library's determinant.
pub fn det(m: &[Vec<i128>]) -> i128 {
    let n = m.len();
    let mut a = m.to_vec();
    let mut sign = 1;
    let mut prev = 1i128;
    for k in 0..n {
        if a[k][k] == 0 {
            match (k + 1..n).find(|&i| a[i][k] != 0) {
                Some(i) => {
                    a.swap(i, k);
                    sign = -sign;
                }
                None => return 0,
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) / prev;
            }
        }
        prev = a[k][k];
    }
    sign * a[n - 1][n - 1]
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![vec![]];
    }
    if n < k {
        return vec![];
    }
    let mut out = subsets(n - 1, k);
    for mut s in subsets(n - 1, k - 1) {
        s.push(n - 1);
        out.push(s);
    }
    out
}

/// gcd of all k×k minors.
pub fn minor_gcd(a: &[Vec<i64>], k: usize) -> i128 {
    let mut g = 0i128;
    for rows in subsets(a.len(), k) {
        for cols in subsets(a[0].len(), k) {
            let sub: Vec<Vec<i128>> = rows.iter().map(|&i| cols.iter().map(|&j| a[i][j] as i128).collect()).collect();
            g = g.gcd(&det(&sub));
        }
    }
    g
}

/// Reconstruction, unimodularity and divisibility; for matrices with at most
/// 36 entries also the products of invariant factors against minor gcds.
pub fn check_smith(rows: &[Vec<i64>]) -> Result<(), TestCaseError> {
    let a = IntMatrix::from_rows(rows);
    let d = smith_normal_form(&a);
    prop_assert_eq!(d.u.mul(&d.s).mul(&d.v), a);
    prop_assert!(d.u.det().abs() == BigInt::from(1));
    prop_assert!(d.v.det().abs() == BigInt::from(1));
    for i in 0..d.s.rows() {
        for j in 0..d.s.cols() {
            if i != j {
                prop_assert!(d.s.get(i, j).is_zero());
            }
        }
    }
    let diag = d.diagonal();
    prop_assert!(diag.iter().all(|x| !x.is_negative()));
    for w in diag.windows(2) {
        if !w[1].is_zero() {
            prop_assert!(!w[0].is_zero() && w[1].is_multiple_of(&w[0]));
        }
    }
    if rows.len() * rows[0].len() <= 36 {
        let mut product = BigInt::from(1);
        for (k, x) in diag.iter().enumerate() {
            product *= x;
            prop_assert_eq!(product.clone(), BigInt::from(minor_gcd(rows, k + 1)));
        }
    }
    Ok(())
}

fn module(free_rank: usize, torsion: Vec<i64>, action: Vec<Vec<Vec<i64>>>, boundary: Vec<Vec<i64>>) -> ModuleXMod {
    let action = action.iter().map(|m| IntMatrix::from_rows(m)).collect();
    ModuleXMod::new(free_rank, torsion, 2, action, IntMatrix::from_rows(&boundary)).unwrap()
}

fn swap() -> Vec<Vec<i64>> {
    vec![vec![0, 1], vec![1, 0]]
}

pub type Expectation = fn(&AxiomViolation) -> bool;

/// Corruptions of the ℝP² target, each paired with the violation it must trigger.
pub fn module_mutants() -> Vec<(&'static str, ModuleXMod, Expectation)> {
    vec![
        (
            "boundary not equivariant",
            module(1, vec![], vec![swap()], vec![vec![2, 1]]),
            |v| matches!(v, AxiomViolation::Equivariance { .. }),
        ),
        (
            "singular action",
            module(1, vec![], vec![vec![vec![1, 1], vec![1, 1]]], vec![vec![2, 2]]),
            |v| matches!(v, AxiomViolation::NotInvertible { .. }),
        ),
        (
            "boundary breaks the Peiffer identity",
            module(1, vec![], vec![swap()], vec![vec![1, 1]]),
            |v| matches!(v, AxiomViolation::Peiffer { .. }),
        ),
        (
            "action ignores the generator order",
            module(0, vec![3], vec![swap()], vec![vec![0, 0]]),
            |v| matches!(v, AxiomViolation::TorsionOrder { .. }),
        ),
        (
            "non-commuting generator actions",
            module(2, vec![], vec![swap(), vec![vec![1, 1], vec![0, 1]]], vec![vec![0, 0], vec![0, 0]]),
            |v| matches!(v, AxiomViolation::NonCommuting { .. }),
        ),
    ]
}

pub fn all_crossed_modules() -> Vec<(String, String, FiniteCrossedModule)> {
    let groups = FiniteGroup::small_groups(8);
    let mut out = Vec::new();
    for (hn, h) in &groups {
        for (gn, g) in &groups {
            for x in FiniteCrossedModule::enumerate(h, g) {
                out.push((hn.clone(), gn.clone(), x));
            }
        }
    }
    out
}

/// Validity, central kernel, order identity and `δβ = 0`.
pub fn check_cocycle(x: &FiniteCrossedModule) -> Result<(), String> {
    if !x.validate().is_empty() {
        return Err("enumerated module fails validation".into());
    }
    let h = &x.h;
    let kernel = x.kernel();
    for &k in &kernel {
        for a in 0..h.order() {
            if h.mul(k, a) != h.mul(a, k) {
                return Err("kernel not central".into());
            }
        }
    }
    let data = x.hoang_data();
    if data.pi1.order() * h.order() != x.g.order() * kernel.len() {
        return Err("order identity fails".into());
    }
    if data.pi2.order() != Some(kernel.len().into()) {
        return Err("π₂ has the wrong order".into());
    }
    if !data.is_cocycle() {
        return Err("δβ ≠ 0".into());
    }
    Ok(())
}

/// For split modules with |π₁| ≤ 4: a cochain whose coboundary is β.
/// Returns whether the module was in scope.
pub fn check_witness(x: &FiniteCrossedModule) -> Result<bool, String> {
    let data = x.hoang_data();
    if data.pi1.order() > 4 || !x.is_split() {
        return Ok(false);
    }
    let witness = data.coboundary_witness().ok_or("no coboundary witness")?;
    let delta = data.coboundary(&witness);
    let n = data.pi1.order();
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                if delta[(a * n + b) * n + c] != data.beta(a, b, c) {
                    return Err("witness coboundary differs from β".into());
                }
            }
        }
    }
    Ok(true)
}

/// Identity, inverses, and associativity by Light's test: `(ab)c = a(bc)`
/// for `c` in a generating set implies it for all `c`.
pub fn is_group(table: &[Vec<usize>], generators: &[usize]) -> bool {
    let n = table.len();
    if table.iter().any(|r| r.len() != n || r.iter().any(|&x| x >= n)) {
        return false;
    }
    if (0..n).any(|x| table[0][x] != x || table[x][0] != x) {
        return false;
    }
    if (0..n).any(|a| !table[a].contains(&0)) {
        return false;
    }
    let mut reached = vec![false; n];
    reached[0] = true;
    let mut frontier = vec![0];
    while let Some(a) = frontier.pop() {
        for &g in generators {
            let b = table[a][g];
            if !reached[b] {
                reached[b] = true;
                frontier.push(b);
            }
        }
    }
    if reached.contains(&false) {
        return false;
    }
    (0..n).all(|a| (0..n).all(|b| generators.iter().all(|&c| table[table[a][b]][c] == table[a][table[b][c]])))
}

/// The arrow group is a group, source and target are homomorphisms, and
/// `ker s → G` gives back the module.
pub fn check_round_trip(x: &FiniteCrossedModule) -> Result<(), String> {
    let s = x.to_strict_2group();
    if !is_group(s.arrows.table(), &s.arrows.generators()) {
        return Err("arrows do not form a group".into());
    }
    for p in 0..s.arrows.order() {
        for q in 0..s.arrows.order() {
            let pq = s.arrows.mul(p, q);
            if s.source[pq] != s.objects.mul(s.source[p], s.source[q])
                || s.target[pq] != s.objects.mul(s.target[p], s.target[q])
            {
                return Err("source or target is not a homomorphism".into());
            }
        }
    }
    if &s.crossed_module() != x {
        return Err("round trip changes the module".into());
    }
    Ok(())
}
