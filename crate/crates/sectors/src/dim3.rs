//! Maps from 3-complexes to S².
//!
//! Homomorphisms of free crossed squares into the crossed square of S² are
//! integer vectors on the 2- and 3-cells. A homotopy is a homomorphism out of
//! the cylinder `I₀M`; only its 4-cell imposes a condition, which for S²
//! evaluates to an affine equation in the values of the I-cells. Pontrjagin's
//! cup-product description gives an independent answer.

use std::collections::HashMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::Zero;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use thiserror::Error;

use crate::complexes::{CWComplex, CatalogSpace, ComplexError, HLetter, HWord};
use crate::words::Word;
use crate::xmod::unit_vector;
use crate::zlinalg::{big, bigvec, quotient, smallvec, solve, AbelianGroup, AffineLattice, IntMatrix};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Dim3Error {
    #[error("no cylinder preset for `{0}`")]
    NoPreset(String),
    #[error("cell `{0}` has no assigned value")]
    Unassigned(String),
    #[error("the 4-cell relation is not affine in the I-cell values")]
    NotAffine,
    #[error("the 4-cell relation does not hold for the constant homotopy")]
    NotReflexive,
    #[error("{0} is not a homomorphism of crossed squares")]
    NotAHomomorphism(String),
    #[error("inconsistent cup table: {0}")]
    InconsistentCup(String),
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },
    #[error("cannot read `{path}`: {message}")]
    Io { path: String, message: String },
    #[error(transparent)]
    Complex(#[from] ComplexError),
}

/// The crossed square of S²: `L = K = H = G = ℤ` with `κ = η = 0` and `ν = μ = Id`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct S2CrossedSquareTarget {
    pub kappa: IntMatrix,
    pub eta: IntMatrix,
    pub nu: IntMatrix,
    pub mu: IntMatrix,
}

impl Default for S2CrossedSquareTarget {
    fn default() -> Self {
        S2CrossedSquareTarget {
            kappa: IntMatrix::zeros(1, 1),
            eta: IntMatrix::zeros(1, 1),
            nu: IntMatrix::identity(1),
            mu: IntMatrix::identity(1),
        }
    }
}

impl S2CrossedSquareTarget {
    /// π₃ is the kernel of `(η, κ): L → H × K`.
    pub fn pi3(&self) -> AbelianGroup {
        let m = self.eta.vstack(&self.kappa);
        let k = solve(&m, &vec![BigInt::zero(); m.rows()]).expect("homogeneous").kernel;
        AbelianGroup::free(k.len())
    }
}

/// Homomorphisms into the S² square: one integer per 2-cell and per 3-cell,
/// with each σ₃ mapping to 0 under the signed sum of 2-cell values.
pub fn xsq_hom_lattice(m: &CWComplex) -> AffineLattice {
    let (n2, n3) = (m.two_cells().len(), m.three_cells().len());
    let n = n2 + n3;
    let mut rows = Vec::new();
    for x in m.three_cells() {
        let mut row = vec![0i64; n];
        for l in &x.attach.letters {
            let t = m.two_cell_index(&l.cell).expect("validated complex");
            row[t] += l.sign as i64;
        }
        rows.push(row);
    }
    if rows.iter().all(|r| r.iter().all(|&v| v == 0)) {
        return AffineLattice::full(n);
    }
    let a = IntMatrix::from_rows(&rows);
    let sol = solve(&a, &vec![BigInt::zero(); rows.len()]).expect("homogeneous");
    AffineLattice::new(vec![BigInt::zero(); n], &sol.kernel)
}

/// Letter of an element of `(H ⊗ H̄) ∘ C`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LLetter {
    /// `(h ⊗ k)^sign`.
    Tensor { h: HWord, k: HWord, sign: i32 },
    /// `^{(f,h)}c^sign` for a 3-cell c.
    C { conj_f: Word, conj_h: HWord, cell: String, sign: i32 },
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct FormalLWord {
    pub letters: Vec<LLetter>,
}

impl FormalLWord {
    pub fn concat(&self, other: &FormalLWord) -> FormalLWord {
        FormalLWord { letters: self.letters.iter().chain(&other.letters).cloned().collect() }
    }
}

/// Signed sum of cell values over the letters of an H-word.
fn phi2_of(w: &HWord, values: &HashMap<String, BigInt>) -> Result<BigInt, Dim3Error> {
    let mut out = BigInt::zero();
    for l in &w.letters {
        let v = values.get(&l.cell).ok_or_else(|| Dim3Error::Unassigned(l.cell.clone()))?;
        out += big(l.sign as i64) * v;
    }
    Ok(out)
}

/// Image in π₃S² = ℤ: `(h⊗k)^s ↦ s·Φ(h)Φ(k)` and `c^s ↦ s·Φ(c)`.
/// Conjugators drop out because S² acts trivially.
pub fn evaluate_l(w: &FormalLWord, values: &HashMap<String, BigInt>) -> Result<BigInt, Dim3Error> {
    let mut out = BigInt::zero();
    for l in &w.letters {
        match l {
            LLetter::Tensor { h, k, sign } => out += big(*sign as i64) * phi2_of(h, values)? * phi2_of(k, values)?,
            LLetter::C { cell, sign, .. } => {
                let v = values.get(cell).ok_or_else(|| Dim3Error::Unassigned(cell.clone()))?;
                out += big(*sign as i64) * v;
            }
        }
    }
    Ok(out)
}

/// Cylinder `I₀M` of a catalog 3-complex, with the boundary of its 4-cell.
#[derive(Debug, Clone)]
pub struct CylinderPreset {
    pub space: String,
    pub source: CWComplex,
    /// 3-skeleton of `I₀M`.
    pub cylinder: CWComplex,
    /// 2-cells `a_I`, one per generator of M.
    pub i_two_cells: Vec<String>,
    /// 3-cells `t_I`, one per 2-cell of M.
    pub i_three_cells: Vec<String>,
    pub boundary4: FormalLWord,
}

fn end(name: &str, j: usize) -> String {
    format!("{name}{j}")
}

fn interval(name: &str) -> String {
    format!("{name}_I")
}

impl CylinderPreset {
    pub fn for_space(space: &CatalogSpace) -> Result<Self, Dim3Error> {
        match space {
            CatalogSpace::S1xS2 => Ok(Self::s1_x_s2()),
            CatalogSpace::Torus3 => Ok(Self::torus3()),
            other => Err(Dim3Error::NoPreset(other.name())),
        }
    }

    fn s1_x_s2() -> Self {
        let cylinder = CWComplex::from_text(
            &["a0", "a1"],
            &[("t0", ""), ("t1", ""), ("a_I", "a1 a0^-1")],
            &[
                ("x0", &[("", "t0", 1), ("a0", "t0", -1)]),
                ("x1", &[("", "t1", 1), ("a1", "t1", -1)]),
                ("t_I", &[("", "t1", 1), ("", "t0", -1)]),
            ],
        )
        .expect("cylinder cells are valid");
        let al = cylinder.alphabet().clone();
        let h = |cells: &[(&str, &str, i32)]| {
            HWord::new(
                cells
                    .iter()
                    .map(|&(f, c, s)| HLetter { conj: Word::parse(&al, f).expect("preset word"), cell: c.into(), sign: s })
                    .collect(),
            )
        };
        let c = |conj_h: HWord, cell: &str, sign: i32| LLetter::C {
            conj_f: Word::identity(&al),
            conj_h,
            cell: cell.into(),
            sign,
        };
        let t0_inv = h(&[("", "t0", -1)]);
        let t0_inv_a = h(&[("", "t0", -1), ("", "a_I", 1)]);
        // (a_I⁻¹ ⊗ t₀)⁻¹ (^{a₁}t₀⁻¹ ⊗ a_I)⁻¹ ∘ ^{t₀⁻¹}(t_I x₁ t_I⁻¹ ^{a_I}x₀⁻¹)
        let boundary4 = FormalLWord {
            letters: vec![
                LLetter::Tensor { h: h(&[("", "a_I", -1)]), k: h(&[("", "t0", 1)]), sign: -1 },
                LLetter::Tensor { h: h(&[("a1", "t0", -1)]), k: h(&[("", "a_I", 1)]), sign: -1 },
                c(t0_inv.clone(), "t_I", 1),
                c(t0_inv.clone(), "x1", 1),
                c(t0_inv, "t_I", -1),
                c(t0_inv_a, "x0", -1),
            ],
        };
        CylinderPreset {
            space: "s1_x_s2".into(),
            source: CatalogSpace::S1xS2.complex(),
            cylinder,
            i_two_cells: vec!["a_I".into()],
            i_three_cells: vec!["t_I".into()],
            boundary4,
        }
    }

    fn torus3() -> Self {
        let mut gens = Vec::new();
        let mut two: Vec<(String, String)> = Vec::new();
        for j in 0..2 {
            let (a, b, c) = (end("a", j), end("b", j), end("c", j));
            gens.extend([a.clone(), b.clone(), c.clone()]);
            two.push((end("t", j), format!("{b} {c} {b}^-1 {c}^-1")));
            two.push((end("u", j), format!("{c} {a} {c}^-1 {a}^-1")));
            two.push((end("v", j), format!("{a} {b} {a}^-1 {b}^-1")));
        }
        for g in ["a", "b", "c"] {
            two.push((interval(g), format!("{} {}^-1", end(g, 1), end(g, 0))));
        }
        let x_letters = |j: usize| -> Vec<(String, String, i32)> {
            let s = |x: &str| end(x, j);
            vec![
                (String::new(), s("t"), 1),
                (s("c"), s("v"), -1),
                (String::new(), s("u"), 1),
                (s("a"), s("t"), -1),
                (String::new(), s("v"), 1),
                (s("b"), s("u"), -1),
            ]
        };
        // σ₃(t_I) = t₁ ^{c₁}b_I c_I t₀⁻¹ b_I⁻¹ ^{b₁}c_I⁻¹, and cyclically
        let i_letters = |t: &str, b: &str, c: &str| -> Vec<(String, String, i32)> {
            vec![
                (String::new(), end(t, 1), 1),
                (end(c, 1), interval(b), 1),
                (String::new(), interval(c), 1),
                (String::new(), end(t, 0), -1),
                (String::new(), interval(b), -1),
                (end(b, 1), interval(c), -1),
            ]
        };
        let three: Vec<(String, Vec<(String, String, i32)>)> = vec![
            ("x0".into(), x_letters(0)),
            ("x1".into(), x_letters(1)),
            (interval("t"), i_letters("t", "b", "c")),
            (interval("u"), i_letters("u", "c", "a")),
            (interval("v"), i_letters("v", "a", "b")),
        ];
        let gens_ref: Vec<&str> = gens.iter().map(String::as_str).collect();
        let two_ref: Vec<(&str, &str)> = two.iter().map(|(a, b)| (a.as_str(), b.as_str())).collect();
        let three_letters: Vec<Vec<(&str, &str, i32)>> =
            three.iter().map(|(_, ls)| ls.iter().map(|(f, c, s)| (f.as_str(), c.as_str(), *s)).collect()).collect();
        let three_ref: Vec<(&str, &[(&str, &str, i32)])> =
            three.iter().zip(&three_letters).map(|((n, _), ls)| (n.as_str(), ls.as_slice())).collect();
        let cylinder = CWComplex::from_text(&gens_ref, &two_ref, &three_ref).expect("cylinder cells are valid");
        let al = cylinder.alphabet().clone();
        let h = |f: &str, cell: &str, sign: i32| {
            HWord::new(vec![HLetter { conj: Word::parse(&al, f).expect("preset word"), cell: cell.into(), sign }])
        };
        let c = |f: &str, cell: &str, sign: i32| LLetter::C {
            conj_f: Word::parse(&al, f).expect("preset word"),
            conj_h: HWord::default(),
            cell: cell.into(),
            sign,
        };
        let mut letters = vec![
            c("", "x1", 1),
            c("", "t_I", -1),
            c("c1", "v_I", 1),
            c("", "u_I", -1),
            c("", "x0", -1),
            c("a1", "t_I", 1),
            c("", "v_I", -1),
            c("b1", "u_I", 1),
        ];
        // tensor part fixed by the evaluated relation: −2φ(t)Φ(a_I) − 2φ(u)Φ(b_I) − 2φ(v)Φ(c_I)
        for (g, t) in [("a", "t"), ("b", "u"), ("c", "v")] {
            letters.push(LLetter::Tensor { h: h("", &interval(g), -1), k: h("", &end(t, 0), 1), sign: 1 });
            letters.push(LLetter::Tensor { h: h(&end(g, 1), &end(t, 0), -1), k: h("", &interval(g), 1), sign: 1 });
        }
        CylinderPreset {
            space: "torus3".into(),
            source: CatalogSpace::Torus3.complex(),
            cylinder,
            i_two_cells: ["a", "b", "c"].iter().map(|g| interval(g)).collect(),
            i_three_cells: ["t", "u", "v"].iter().map(|t| interval(t)).collect(),
            boundary4: FormalLWord { letters },
        }
    }

    /// Cell values on the cylinder: `φ` on the 0-end, `ψ` on the 1-end, and the I-cells.
    fn values(&self, phi: &[BigInt], psi: &[BigInt], i_values: &[BigInt]) -> HashMap<String, BigInt> {
        let m = &self.source;
        let mut out = HashMap::new();
        let names: Vec<&String> =
            m.two_cells().iter().map(|t| &t.name).chain(m.three_cells().iter().map(|x| &x.name)).collect();
        for (j, v) in [phi, psi].into_iter().enumerate() {
            for (n, x) in names.iter().zip(v) {
                out.insert(end(n, j), x.clone());
            }
        }
        for (n, x) in self.i_two_cells.iter().chain(&self.i_three_cells).zip(i_values) {
            out.insert(n.clone(), x.clone());
        }
        out
    }

    fn i_count(&self) -> usize {
        self.i_two_cells.len() + self.i_three_cells.len()
    }

    /// Evaluated 4-cell relation for a homotopy from `φ` to `ψ`.
    pub fn relation(&self, phi: &[BigInt], psi: &[BigInt], i_values: &[BigInt]) -> Result<BigInt, Dim3Error> {
        evaluate_l(&self.boundary4, &self.values(phi, psi, i_values))
    }

    /// Whether two homomorphisms are homotopic: equal on 2-cells, and the
    /// 4-cell relation has an integer solution in the I-cell values.
    pub fn homotopic(&self, phi: &[BigInt], psi: &[BigInt]) -> Result<bool, Dim3Error> {
        let n2 = self.source.two_cells().len();
        if phi[..n2] != psi[..n2] {
            return Ok(false);
        }
        let (offset, coeffs) = self.affine_form(phi, psi)?;
        let g = coeffs.iter().fold(BigInt::zero(), |acc, c| acc.gcd(c));
        Ok(if g.is_zero() { offset.is_zero() } else { offset.is_multiple_of(&g) })
    }

    /// The relation as `offset + Σ coeffs_j·I_j`, recovered by probing and checked for affinity.
    fn affine_form(&self, phi: &[BigInt], psi: &[BigInt]) -> Result<(BigInt, Vec<BigInt>), Dim3Error> {
        let n = self.i_count();
        let zero = vec![BigInt::zero(); n];
        let offset = self.relation(phi, psi, &zero)?;
        let mut coeffs = Vec::with_capacity(n);
        for j in 0..n {
            coeffs.push(self.relation(phi, psi, &unit_vector(n, j))? - &offset);
        }
        for i in 0..n {
            for j in i..n {
                let mut v = unit_vector(n, i);
                v[j] += 1;
                v[i] += 2;
                let expected = &offset + big(3) * &coeffs[i] + &coeffs[j];
                if self.relation(phi, psi, &v)? != expected {
                    return Err(Dim3Error::NotAffine);
                }
            }
        }
        Ok((offset, coeffs))
    }

    /// Classes over a fixed restriction to the 2-skeleton: `ℤ^{|Σ₃|}` modulo
    /// the differences of 3-cell values realizable by a homotopy.
    pub fn sector(&self, phi2: &[BigInt]) -> Result<S2Sector, Dim3Error> {
        let n3 = self.source.three_cells().len();
        let base: Vec<BigInt> = phi2.iter().cloned().chain(std::iter::repeat_n(BigInt::zero(), n3)).collect();
        if !xsq_hom_lattice(&self.source).contains(&base) {
            return Err(Dim3Error::NotAHomomorphism(format!("phi2 = {:?}", smallvec(phi2))));
        }
        let (offset, coeffs) = self.affine_form(&base, &base)?;
        if !offset.is_zero() {
            return Err(Dim3Error::NotReflexive);
        }
        // relation(Δx, I) = Σ κ_x Δx + Σ c_j I_j
        let mut kappa = Vec::with_capacity(n3);
        for x in 0..n3 {
            let mut psi = base.clone();
            psi[phi2.len() + x] += 1;
            kappa.push(self.affine_form(&base, &psi)?.0);
        }
        let row: Vec<BigInt> = kappa.iter().chain(&coeffs).cloned().collect();
        let system = IntMatrix::from_rows_big(vec![row.clone()], row.len()).expect("one row");
        let kernel = solve(&system, &[BigInt::zero()]).expect("homogeneous").kernel;
        let realizable: Vec<Vec<BigInt>> = kernel.iter().map(|v| v[..n3].to_vec()).collect();
        let group = if realizable.is_empty() {
            AbelianGroup::free(n3)
        } else {
            quotient(n3, &IntMatrix::from_columns(&realizable, n3).expect("columns"))
        };
        Ok(S2Sector { phi2: phi2.to_vec(), group })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct S2Sector {
    pub phi2: Vec<BigInt>,
    pub group: AbelianGroup,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct S2Classification {
    pub space: String,
    pub cells: Vec<String>,
    pub sectors: Vec<S2Sector>,
}

impl S2Classification {
    pub fn to_json(&self) -> Value {
        json!({
            "space": self.space,
            "cells": self.cells,
            "sectors": self.sectors.iter().map(|s| json!({
                "phi2": smallvec(&s.phi2),
                "group": s.group.factors_i64(),
            })).collect::<Vec<_>>(),
        })
    }
}

impl fmt::Display for S2Classification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "maps {} -> S^2, sectors by ({})", self.space, self.cells.join(", "))?;
        for s in &self.sectors {
            let v: Vec<String> = s.phi2.iter().map(|x| x.to_string()).collect();
            writeln!(f, "({}): {}", v.join(","), s.group)?;
        }
        Ok(())
    }
}

/// Every point of `{v : |vᵢ| ≤ bound}` in the order of the first coordinate varying slowest.
fn box_points(dim: usize, bound: i64) -> Vec<Vec<BigInt>> {
    let mut out = vec![Vec::new()];
    for _ in 0..dim {
        out = out
            .into_iter()
            .flat_map(|p: Vec<BigInt>| {
                (-bound..=bound).map(move |x| {
                    let mut p = p.clone();
                    p.push(big(x));
                    p
                })
            })
            .collect();
    }
    out
}

/// Crossed-square classification of `[M, S²]` for sectors with 2-cell values in `[-bound, bound]`.
pub fn classify_s2(space: &CatalogSpace, bound: i64) -> Result<S2Classification, Dim3Error> {
    let preset = CylinderPreset::for_space(space)?;
    let m = &preset.source;
    let lattice = xsq_hom_lattice(m);
    let n3 = m.three_cells().len();
    let mut sectors = Vec::new();
    for p in box_points(m.two_cells().len(), bound) {
        let full: Vec<BigInt> = p.iter().cloned().chain(std::iter::repeat_n(BigInt::zero(), n3)).collect();
        if lattice.contains(&full) {
            sectors.push(preset.sector(&p)?);
        }
    }
    Ok(S2Classification {
        space: space.name(),
        cells: m.two_cells().iter().map(|t| t.name.clone()).collect(),
        sectors,
    })
}

/// Cohomology ring data for Pontrjagin's classification; `cup[i][j]` holds the
/// coordinates of `e¹ᵢ ∪ e²ⱼ` in the generators of H³.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CupTable {
    pub h1_rank: usize,
    pub h2: Vec<i64>,
    pub h3: Vec<i64>,
    pub cup: Vec<Vec<Vec<i64>>>,
}

impl CupTable {
    /// α ∪ eᵢ = qᵢ·vol for α = (q₁,q₂,q₃).
    pub fn torus3() -> Self {
        let cup = (0..3).map(|i| (0..3).map(|j| vec![i64::from(i == j)]).collect()).collect();
        CupTable { h1_rank: 3, h2: vec![0, 0, 0], h3: vec![0], cup }
    }

    pub fn s1_x_s2() -> Self {
        CupTable { h1_rank: 1, h2: vec![0], h3: vec![0], cup: vec![vec![vec![1]]] }
    }

    pub fn for_space(space: &CatalogSpace) -> Result<Self, Dim3Error> {
        match space {
            CatalogSpace::S1xS2 => Ok(Self::s1_x_s2()),
            CatalogSpace::Torus3 => Ok(Self::torus3()),
            other => Err(Dim3Error::NoPreset(other.name())),
        }
    }

    pub fn load(text: &str) -> Result<Self, Dim3Error> {
        let mut t: CupTable = serde_json::from_str(text)
            .map_err(|e| Dim3Error::Parse { line: e.line(), column: e.column(), message: e.to_string() })?;
        t.expand_rows();
        t.check()?;
        Ok(t)
    }

    pub fn load_path(path: &str) -> Result<Self, Dim3Error> {
        let text = std::fs::read_to_string(path).map_err(|e| Dim3Error::Io { path: path.into(), message: e.to_string() })?;
        CupTable::load(&text)
    }

    /// With a single H³ generator, `cup[i]` may also be written as one row
    /// `[[c₁,…,cₙ]]` of coefficients over the H² generators.
    fn expand_rows(&mut self) {
        let n = self.h2.len();
        let rows = self.h3.len() == 1 && n > 1 && self.cup.iter().all(|r| r.len() == 1 && r[0].len() == n);
        if rows {
            self.cup = self.cup.iter().map(|r| r[0].iter().map(|&c| vec![c]).collect()).collect();
        }
    }

    fn torsion_relations(&self) -> Vec<Vec<BigInt>> {
        let n = self.h3.len();
        self.h3
            .iter()
            .enumerate()
            .filter(|(_, &d)| d != 0)
            .map(|(i, &d)| {
                let mut v = vec![BigInt::zero(); n];
                v[i] = big(d);
                v
            })
            .collect()
    }

    fn in_relations(&self, v: &[BigInt]) -> bool {
        v.iter().zip(&self.h3).all(|(x, &d)| if d == 0 { x.is_zero() } else { x.is_multiple_of(&big(d)) })
    }

    /// Shapes match and the product is well defined on torsion classes of H².
    pub fn check(&self) -> Result<(), Dim3Error> {
        if self.cup.len() != self.h1_rank {
            return Err(Dim3Error::InconsistentCup(format!("expected {} rows, got {}", self.h1_rank, self.cup.len())));
        }
        for (i, row) in self.cup.iter().enumerate() {
            if row.len() != self.h2.len() {
                return Err(Dim3Error::InconsistentCup(format!("row {i} has {} entries", row.len())));
            }
            for (j, v) in row.iter().enumerate() {
                if v.len() != self.h3.len() {
                    return Err(Dim3Error::InconsistentCup(format!("entry ({i},{j}) has length {}", v.len())));
                }
                let order = self.h2[j];
                if order != 0 && !self.in_relations(&bigvec(&v.iter().map(|x| x * order).collect::<Vec<_>>())) {
                    return Err(Dim3Error::InconsistentCup(format!("entry ({i},{j}) ignores the order of e2_{j}")));
                }
            }
        }
        if self.h2.iter().chain(&self.h3).any(|&d| d < 0) {
            return Err(Dim3Error::InconsistentCup("negative order".into()));
        }
        Ok(())
    }

    /// `H³ / (2α ∪ H¹)`.
    pub fn classes_over(&self, alpha: &[BigInt]) -> Result<AbelianGroup, Dim3Error> {
        self.check()?;
        if alpha.len() != self.h2.len() {
            return Err(Dim3Error::InconsistentCup(format!("α needs {} coordinates", self.h2.len())));
        }
        let n = self.h3.len();
        let mut gens = self.torsion_relations();
        for row in &self.cup {
            let mut v = vec![BigInt::zero(); n];
            for (a, entry) in alpha.iter().zip(row) {
                for (x, e) in v.iter_mut().zip(entry) {
                    *x += big(2) * a * big(*e);
                }
            }
            gens.push(v);
        }
        if n == 0 {
            return Ok(AbelianGroup::trivial());
        }
        Ok(quotient(n, &IntMatrix::from_columns(&gens, n).expect("columns")))
    }
}

/// `⋃_α H³/(2α∪H¹)` over α with free coordinates in `[-bound, bound]`.
pub fn pontrjagin_classify(table: &CupTable, bound: i64) -> Result<Vec<S2Sector>, Dim3Error> {
    table.check()?;
    let mut out = Vec::new();
    for p in box_points(table.h2.len(), bound) {
        let in_range = p.iter().zip(&table.h2).all(|(x, &d)| d == 0 || (*x >= BigInt::zero() && *x < big(d)));
        if in_range {
            out.push(S2Sector { group: table.classes_over(&p)?, phi2: p });
        }
    }
    Ok(out)
}

/// Structural description of the free crossed square of a 3-complex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CrossedSquareReport {
    pub space: String,
    pub generators: Vec<String>,
    pub two_cells: Vec<(String, String)>,
    /// `(cell, σ₃ text, boundary in F)`; an empty boundary certifies `σ₃ ∈ H ∩ H̄`.
    pub three_cells: Vec<(String, String, String)>,
    pub h_bar_equals_h: bool,
    pub pi1_presentation: String,
    pub pi1_abelianized: AbelianGroup,
    pub notes: Vec<String>,
}

fn triad_text(x: &crate::complexes::ThreeCell) -> String {
    let parts: Vec<String> = x
        .attach
        .letters
        .iter()
        .map(|l| {
            let mut s = String::new();
            if !l.conj_h.is_empty() {
                let h: Vec<String> = l.conj_h.letters.iter().map(|hl| format!("{}^{}", hl.cell, hl.sign)).collect();
                s.push_str(&format!("^{{{}}}", h.join(" ")));
            }
            if !l.conj_f.is_identity() {
                s.push_str(&format!("^{{{}}}", l.conj_f));
            }
            s.push_str(&l.cell);
            if l.sign < 0 {
                s.push_str("^-1");
            }
            s
        })
        .collect();
    parts.join(" ")
}

pub fn crossed_square_report(space: &str, m: &CWComplex) -> Result<CrossedSquareReport, Dim3Error> {
    let mut three = Vec::new();
    for x in m.three_cells() {
        m.validate_triad(&x.attach)
            .map_err(|violation| ComplexError::Triad { cell: x.name.clone(), violation })?;
        let mut w = Word::identity(m.alphabet());
        for l in &x.attach.letters {
            w = &w * &m.triad_letter_boundary(l)?;
        }
        let shown = if w.is_identity() { "ε".to_string() } else { w.to_string() };
        three.push((x.name.clone(), triad_text(x), shown));
    }
    let relators: Vec<String> = m
        .two_cells()
        .iter()
        .filter(|t| !t.attach.is_identity())
        .map(|t| t.attach.to_string())
        .collect();
    let pi1_presentation = format!("<{} | {}>", m.generators().join(", "), relators.join(", "));
    let n1 = m.generators().len();
    let pi1_abelianized = if n1 == 0 {
        AbelianGroup::trivial()
    } else if m.two_cells().is_empty() {
        AbelianGroup::free(n1)
    } else {
        let cols: Vec<Vec<BigInt>> = m.two_cells().iter().map(|t| bigvec(&t.attach.exponent_sums())).collect();
        quotient(n1, &IntMatrix::from_columns(&cols, n1).expect("columns"))
    };
    let h_bar_equals_h = m.two_cells().iter().all(|t| t.attach.is_identity());
    let mut notes = vec![
        format!("F = free group on {{{}}}", m.generators().join(", ")),
        "H = free pre-crossed module on the 2-cells, boundary f·t ↦ f σ₂(t) f⁻¹".to_string(),
        "G = F ⋉ H, with H̄ = {(∂h, h⁻¹)} the kernel of the retraction onto F".to_string(),
        "L = (H ⊗ H̄) ∘ C with C free on the 3-cells; relations i(∂c ⊗ h̄) = j(c) j(^{h̄}c⁻¹), i(h ⊗ ∂c) = j(^{h}c) j(c⁻¹)".to_string(),
    ];
    if h_bar_equals_h {
        notes.push("every 2-cell has trivial boundary, so H̄ = H as subgroups".into());
    }
    if n1 == 0 {
        notes.push("F is trivial, so G = H = H̄".into());
    }
    Ok(CrossedSquareReport {
        space: space.to_string(),
        generators: m.generators().to_vec(),
        two_cells: m.two_cells().iter().map(|t| (t.name.clone(), t.attach.to_string())).collect(),
        three_cells: three,
        h_bar_equals_h,
        pi1_presentation,
        pi1_abelianized,
        notes,
    })
}

impl CrossedSquareReport {
    pub fn to_json(&self) -> Value {
        json!({
            "space": self.space,
            "generators": self.generators,
            "two_cells": self.two_cells.iter().map(|(n, w)| json!({"name": n, "boundary": w})).collect::<Vec<_>>(),
            "three_cells": self.three_cells.iter().map(|(n, w, b)| json!({"name": n, "attach": w, "boundary": b})).collect::<Vec<_>>(),
            "h_bar_equals_h": self.h_bar_equals_h,
            "pi1": self.pi1_presentation,
            "pi1_abelianized": self.pi1_abelianized.to_string(),
            "notes": self.notes,
        })
    }
}

impl fmt::Display for CrossedSquareReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "space: {}", self.space)?;
        writeln!(
            f,
            "cells: {} + {} + {}",
            self.generators.len(),
            self.two_cells.len(),
            self.three_cells.len()
        )?;
        for (n, w) in &self.two_cells {
            writeln!(f, "sigma2({n}) = {}", if w.is_empty() { "ε" } else { w })?;
        }
        for (n, w, b) in &self.three_cells {
            writeln!(f, "sigma3({n}) = {w}    boundary in F: {b}")?;
        }
        writeln!(f, "pi1 = {}  (abelianized {})", self.pi1_presentation, self.pi1_abelianized)?;
        for n in &self.notes {
            writeln!(f, "- {n}")?;
        }
        Ok(())
    }
}

/// Shorthand used by callers that only need the group per sector.
pub fn sector_groups(sectors: &[S2Sector]) -> Vec<(Vec<i64>, Vec<i64>)> {
    sectors.iter().map(|s| (smallvec(&s.phi2), s.group.factors_i64())).collect()
}

/// `2·gcd` of the absolute values, the expected order in each sector (0 for ℤ).
pub fn expected_order(q: &[i64]) -> i64 {
    2 * q.iter().fold(0i64, |g, &x| g.gcd(&x.abs()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn vals(pairs: &[(&str, i64)]) -> HashMap<String, BigInt> {
        pairs.iter().map(|(n, v)| (n.to_string(), big(*v))).collect()
    }

    #[test]
    fn target_square() {
        assert_eq!(S2CrossedSquareTarget::default().pi3(), AbelianGroup::free(1));
    }

    #[test]
    fn hom_lattices() {
        let s1s2 = CatalogSpace::S1xS2.complex();
        assert_eq!(xsq_hom_lattice(&s1s2).rank(), 2);
        assert_eq!(xsq_hom_lattice(&CatalogSpace::Torus3.complex()).rank(), 4);
        assert_eq!(xsq_hom_lattice(&CatalogSpace::Sphere2.complex()).rank(), 1);
        let bad = CWComplex::from_text(&[], &[("t", "")], &[("x", &[("", "t", 1), ("", "t", 1)])]).unwrap();
        let l = xsq_hom_lattice(&bad);
        assert_eq!(l.rank(), 1);
        assert!(!l.contains(&bigvec(&[1, 0])));
    }

    #[test]
    fn tensor_square_is_quadratic() {
        let al = crate::words::Alphabet::new::<&str>(&[]).unwrap();
        let t0 = HWord::new(vec![HLetter { conj: Word::identity(&al), cell: "t0".into(), sign: 1 }]);
        let w = FormalLWord { letters: vec![LLetter::Tensor { h: t0.clone(), k: t0, sign: 1 }] };
        assert_eq!(evaluate_l(&w, &vals(&[("t0", 7)])).unwrap(), big(49));
        assert!(matches!(evaluate_l(&w, &vals(&[])), Err(Dim3Error::Unassigned(_))));
    }

    #[test]
    fn s1_x_s2_relation() {
        let p = CylinderPreset::for_space(&CatalogSpace::S1xS2).unwrap();
        let v = vals(&[("t0", 3), ("t1", 3), ("x0", 5), ("x1", 11), ("a_I", 2), ("t_I", 9)]);
        // 2φ(t)Φ(a_I) + ψ(x) − φ(x)
        assert_eq!(evaluate_l(&p.boundary4, &v).unwrap(), big(2 * 3 * 2 + 11 - 5));
        assert_eq!(p.sector(&bigvec(&[3])).unwrap().group.factors_i64(), vec![6]);
        assert_eq!(p.sector(&bigvec(&[0])).unwrap().group.factors_i64(), vec![0]);
        assert!(p.homotopic(&bigvec(&[3, 1]), &bigvec(&[3, 7])).unwrap());
        assert!(!p.homotopic(&bigvec(&[3, 1]), &bigvec(&[3, 4])).unwrap());
        assert!(!p.homotopic(&bigvec(&[3, 1]), &bigvec(&[2, 1])).unwrap());
    }

    #[test]
    fn torus3_relation() {
        let p = CylinderPreset::for_space(&CatalogSpace::Torus3).unwrap();
        assert_eq!(p.cylinder.generators().len(), 6);
        assert_eq!(p.cylinder.two_cells().len(), 9);
        assert_eq!(p.cylinder.three_cells().len(), 5);
        let v = vals(&[
            ("t0", 2), ("u0", 3), ("v0", 5), ("t1", 2), ("u1", 3), ("v1", 5), ("x0", 1), ("x1", 4),
            ("a_I", 7), ("b_I", 11), ("c_I", 13), ("t_I", 17), ("u_I", 19), ("v_I", 23),
        ]);
        assert_eq!(evaluate_l(&p.boundary4, &v).unwrap(), big(4 - 1 - 2 * 2 * 7 - 2 * 3 * 11 - 2 * 5 * 13));
        assert_eq!(p.sector(&bigvec(&[2, 4, 6])).unwrap().group.factors_i64(), vec![4]);
        assert_eq!(p.sector(&bigvec(&[0, 0, 0])).unwrap().group.factors_i64(), vec![0]);
    }

    #[test]
    fn cylinder_ends_copy_the_space() {
        for space in [CatalogSpace::S1xS2, CatalogSpace::Torus3] {
            let p = CylinderPreset::for_space(&space).unwrap();
            let m = &p.source;
            for j in 0..2 {
                for t in m.two_cells() {
                    let copy = p.cylinder.attaching_word(&end(&t.name, j)).unwrap();
                    let expected = t.attach.translate(p.cylinder.alphabet(), |g| end(g, j)).unwrap();
                    assert_eq!(copy, &expected);
                }
                for x in m.three_cells() {
                    let copy = p.cylinder.three_cells().iter().find(|c| c.name == end(&x.name, j)).unwrap();
                    assert_eq!(copy.attach.len(), x.attach.len());
                    for (a, b) in copy.attach.letters.iter().zip(&x.attach.letters) {
                        assert_eq!(a.cell, end(&b.cell, j));
                        assert_eq!(a.sign, b.sign);
                    }
                }
            }
        }
        assert!(matches!(CylinderPreset::for_space(&CatalogSpace::Torus2), Err(Dim3Error::NoPreset(_))));
    }

    #[test]
    fn pontrjagin_presets() {
        let t = CupTable::torus3();
        assert_eq!(t.classes_over(&bigvec(&[2, 4, 6])).unwrap().factors_i64(), vec![4]);
        assert_eq!(t.classes_over(&bigvec(&[0, 0, 0])).unwrap().factors_i64(), vec![0]);
        assert_eq!(CupTable::s1_x_s2().classes_over(&bigvec(&[3])).unwrap().factors_i64(), vec![6]);
        let text = r#"{"h1_rank":3,"h2":[0,0,0],"h3":[0],"cup":[[[1,0,0]],[[0,1,0]],[[0,0,1]]]}"#;
        assert_eq!(CupTable::load(text).unwrap(), t);
        let text = r#"{"h1_rank":3,"h2":[0,0,0],"h3":[0],"cup":[[[1,0]],[[0,1,0]],[[0,0,1]]]}"#;
        assert!(matches!(CupTable::load(text), Err(Dim3Error::InconsistentCup(_))));
        let text = r#"{"h1_rank":3,"h2":[0,0,0],"h3":[0],"cup":[[[1],[0],[0]],[[0],[1],[0]],[[0],[0],[1]]]}"#;
        assert_eq!(CupTable::load(text).unwrap(), t);
    }

    #[test]
    fn reports() {
        let r = crossed_square_report("torus3", &CatalogSpace::Torus3.complex()).unwrap();
        assert_eq!((r.generators.len(), r.two_cells.len(), r.three_cells.len()), (3, 3, 1));
        assert_eq!(r.three_cells[0].2, "ε");
        assert_eq!(r.pi1_abelianized.factors_i64(), vec![0, 0, 0]);
        let r = crossed_square_report("s1_x_s2", &CatalogSpace::S1xS2.complex()).unwrap();
        assert!(r.h_bar_equals_h);
        let r = crossed_square_report("sphere2", &CatalogSpace::Sphere2.complex()).unwrap();
        assert!(r.notes.iter().any(|n| n.contains("G = H")));
        let knot = crossed_square_report("torus_knot:2,3", &CatalogSpace::TorusKnot(2, 3).complex()).unwrap();
        assert_eq!(knot.pi1_presentation, "<a, b | a^2 b^-3>");
    }
}
