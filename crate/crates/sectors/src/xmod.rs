//! Crossed modules: the free pre-crossed module of a CW complex, computable
//! targets `ℤʳ → G` with G abelian, finite crossed modules with their Hoàng
//! invariants, and the dictionary with strict 2-groups.

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::complexes::{CWComplex, ComplexError, HWord, Pi1Labeling, TriadWord};
use crate::words::{GroupRingElement, Word};
use crate::zlinalg::{
    big, bigvec, quotient_with_representatives, smallvec, solve, AbelianGroup, AffineLattice, CosetQuotient, IntMatrix,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum XModError {
    #[error("unknown target `{0}`")]
    UnknownTarget(String),
    #[error("invalid target: {0}")]
    Invalid(String),
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },
    #[error("cannot read `{path}`: {message}")]
    Io { path: String, message: String },
    #[error("not a group table: {0}")]
    NotAGroup(String),
}

/// A failed crossed-module axiom.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AxiomViolation {
    Shape(String),
    NotInvertible { generator: usize },
    TorsionOrder { generator: usize },
    NonCommuting { first: usize, second: usize },
    /// Condition 1: `∂(ᵍh) = g ∂(h) g⁻¹`.
    Equivariance { g: usize, h: usize },
    /// Condition 2: `^{∂h}h' = h h' h⁻¹`.
    Peiffer { h: usize, h2: usize },
    NotHomomorphism(String),
}

impl fmt::Display for AxiomViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AxiomViolation::Shape(s) => write!(f, "shape: {s}"),
            AxiomViolation::NotInvertible { generator } => write!(f, "action of generator {generator} is not invertible over Z"),
            AxiomViolation::TorsionOrder { generator } => {
                write!(f, "action of generator {generator} does not respect its order")
            }
            AxiomViolation::NonCommuting { first, second } => {
                write!(f, "actions of generators {first} and {second} do not commute")
            }
            AxiomViolation::Equivariance { g, h } => write!(f, "condition 1 fails for g = {g}, h = {h}"),
            AxiomViolation::Peiffer { h, h2 } => write!(f, "condition 2 fails for h = {h}, h' = {h2}"),
            AxiomViolation::NotHomomorphism(s) => write!(f, "not a homomorphism: {s}"),
        }
    }
}

/// Target crossed module `∂: ℤʳ → G` with `G = ℤᶠ ⊕ ⨁ ℤ/nᵢ` abelian, acting by
/// integer matrices. Generators of G are the free ones followed by the torsion ones.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModuleXMod {
    free_rank: usize,
    torsion: Vec<i64>,
    rank: usize,
    action: Vec<IntMatrix>,
    boundary: IntMatrix,
}

impl ModuleXMod {
    /// `boundary` is `k × r`; the action has one `r × r` matrix per generator of G.
    /// Only shapes are checked here; see [`ModuleXMod::validate`].
    pub fn new(
        free_rank: usize,
        torsion: Vec<i64>,
        rank: usize,
        action: Vec<IntMatrix>,
        boundary: IntMatrix,
    ) -> Result<Self, XModError> {
        let k = free_rank + torsion.len();
        if torsion.iter().any(|&n| n < 1) {
            return Err(XModError::Invalid("torsion orders must be positive".into()));
        }
        if action.len() != k {
            return Err(XModError::Invalid(format!("expected {k} action matrices, got {}", action.len())));
        }
        if action.iter().any(|m| m.rows() != rank || m.cols() != rank) {
            return Err(XModError::Invalid(format!("action matrices must be {rank}x{rank}")));
        }
        if boundary.rows() != k || boundary.cols() != rank {
            return Err(XModError::Invalid(format!("boundary must be {k}x{rank}")));
        }
        Ok(ModuleXMod { free_rank, torsion, rank, action, boundary })
    }

    pub fn free_rank(&self) -> usize {
        self.free_rank
    }

    pub fn torsion(&self) -> &[i64] {
        &self.torsion
    }

    /// Number of chosen generators of G.
    pub fn k(&self) -> usize {
        self.free_rank + self.torsion.len()
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn action(&self) -> &[IntMatrix] {
        &self.action
    }

    pub fn boundary(&self) -> &IntMatrix {
        &self.boundary
    }

    /// Order of generator `i` (0 for infinite order).
    pub fn generator_order(&self, i: usize) -> i64 {
        if i < self.free_rank {
            0
        } else {
            self.torsion[i - self.free_rank]
        }
    }

    /// Columns spanning the relations of G inside ℤᵏ.
    pub fn torsion_lattice(&self) -> Vec<Vec<BigInt>> {
        (self.free_rank..self.k())
            .map(|i| {
                let mut v = vec![BigInt::zero(); self.k()];
                v[i] = big(self.generator_order(i));
                v
            })
            .collect()
    }

    /// `ρ(v) = Π ρ(gᵢ)^{vᵢ}`. Panics if a negative power of a non-invertible matrix is needed.
    pub fn rho(&self, v: &[BigInt]) -> IntMatrix {
        let mut out = IntMatrix::identity(self.rank);
        for (i, e) in v.iter().enumerate() {
            let mut e = e.clone();
            let n = self.generator_order(i);
            if n > 0 {
                e = e.mod_floor(&big(n));
            }
            if e.is_zero() {
                continue;
            }
            let base = if e.is_negative() {
                self.action[i].inverse().expect("negative power of a non-invertible action")
            } else {
                self.action[i].clone()
            };
            let p = crate::zlinalg::small(&e.abs()) as u64;
            out = out.mul(&base.pow(p));
        }
        out
    }

    /// Image of ∂ together with the torsion relations.
    fn image_lattice(&self) -> Vec<Vec<BigInt>> {
        let mut gens: Vec<Vec<BigInt>> = (0..self.rank).map(|j| self.boundary.column(j)).collect();
        gens.extend(self.torsion_lattice());
        gens
    }

    /// π₁ = coker ∂ as a quotient of ℤᵏ, with canonical representatives.
    pub fn pi1(&self) -> CosetQuotient {
        quotient_with_representatives(&AffineLattice::full(self.k()), &self.image_lattice())
            .expect("image lies in the ambient lattice")
    }

    /// Basis of π₂ = ker ∂ ⊂ ℤʳ (columns of the returned `r × m` matrix).
    pub fn pi2_basis(&self) -> IntMatrix {
        let t = self.torsion_lattice();
        let tm = IntMatrix::from_columns(&t, self.k()).expect("torsion columns");
        let system = self.boundary.hstack(&tm.scale(&big(-1)));
        let sol = solve(&system, &vec![BigInt::zero(); self.k()]).expect("homogeneous system");
        let projected: Vec<Vec<BigInt>> = sol.kernel.iter().map(|v| v[..self.rank].to_vec()).collect();
        let basis = crate::zlinalg::hermite_basis(&projected, self.rank);
        IntMatrix::from_columns(&basis, self.rank).expect("kernel columns")
    }

    /// Matrix of `ρ(g)` restricted to π₂ in the basis of [`ModuleXMod::pi2_basis`].
    pub fn pi2_action(&self, v: &[BigInt]) -> IntMatrix {
        let k = self.pi2_basis();
        let rho = self.rho(v);
        let mut cols = Vec::new();
        for j in 0..k.cols() {
            let image = rho.mul_vec(&k.column(j));
            cols.push(solve(&k, &image).expect("π₂ is invariant under the action").particular);
        }
        IntMatrix::from_columns(&cols, k.cols()).expect("square block")
    }

    fn in_torsion_lattice(&self, v: &[BigInt]) -> bool {
        v.iter().enumerate().all(|(i, x)| {
            let n = self.generator_order(i);
            if n == 0 {
                x.is_zero()
            } else {
                x.is_multiple_of(&big(n))
            }
        })
    }

    /// Checks invertibility, torsion orders, commutativity, and both axioms.
    pub fn validate(&self) -> Vec<AxiomViolation> {
        let mut out = Vec::new();
        let k = self.k();
        let id = IntMatrix::identity(self.rank);
        for i in 0..k {
            let m = &self.action[i];
            if m.inverse().is_none() {
                out.push(AxiomViolation::NotInvertible { generator: i });
            }
            let n = self.generator_order(i);
            if n > 0 && m.pow(n as u64) != id {
                out.push(AxiomViolation::TorsionOrder { generator: i });
            }
            for j in i + 1..k {
                if m.mul(&self.action[j]) != self.action[j].mul(m) {
                    out.push(AxiomViolation::NonCommuting { first: i, second: j });
                }
            }
            let diff = self.boundary.mul(m).sub(&self.boundary);
            for h in 0..self.rank {
                if !self.in_torsion_lattice(&diff.column(h)) {
                    out.push(AxiomViolation::Equivariance { g: i, h });
                    break;
                }
            }
        }
        if !out.iter().any(|v| matches!(v, AxiomViolation::NotInvertible { .. })) {
            for j in 0..self.rank {
                if self.rho(&self.boundary.column(j)) != id {
                    out.push(AxiomViolation::Peiffer { h: j, h2: j });
                }
            }
        }
        out
    }

    pub fn to_file(&self) -> TargetFile {
        TargetFile {
            group: GroupSpec { free_rank: self.free_rank, torsion: self.torsion.clone() },
            rank: self.rank,
            action: self.action.iter().map(IntMatrix::to_i64_rows).collect(),
            boundary: (0..self.rank).map(|j| smallvec(&self.boundary.column(j))).collect(),
        }
    }

    pub fn save(&self) -> String {
        serde_json::to_string(&self.to_file()).expect("target serializes")
    }

    pub fn load(text: &str) -> Result<ModuleXMod, XModError> {
        let f: TargetFile = serde_json::from_str(text)
            .map_err(|e| XModError::Parse { line: e.line(), column: e.column(), message: e.to_string() })?;
        let k = f.group.free_rank + f.group.torsion.len();
        let action = f
            .action
            .iter()
            .map(|m| {
                if m.iter().any(|row| row.len() != f.rank) || m.len() != f.rank {
                    Err(XModError::Invalid("action matrix has the wrong shape".into()))
                } else {
                    Ok(IntMatrix::from_rows_big(m.iter().map(|r| bigvec(r)).collect(), f.rank).expect("checked shape"))
                }
            })
            .collect::<Result<Vec<_>, _>>()?;
        if f.boundary.len() != f.rank || f.boundary.iter().any(|c| c.len() != k) {
            return Err(XModError::Invalid(format!("boundary needs {} columns of length {k}", f.rank)));
        }
        let cols: Vec<Vec<BigInt>> = f.boundary.iter().map(|c| bigvec(c)).collect();
        let boundary = IntMatrix::from_columns(&cols, k).expect("checked shape");
        ModuleXMod::new(f.group.free_rank, f.group.torsion, f.rank, action, boundary)
    }

    pub fn load_path(path: &str) -> Result<ModuleXMod, XModError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| XModError::Io { path: path.to_string(), message: e.to_string() })?;
        ModuleXMod::load(&text)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroupSpec {
    pub free_rank: usize,
    #[serde(default)]
    pub torsion: Vec<i64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TargetFile {
    #[serde(rename = "G")]
    pub group: GroupSpec,
    pub rank: usize,
    pub action: Vec<Vec<Vec<i64>>>,
    pub boundary: Vec<Vec<i64>>,
}

/// Named targets: `rp2`, `sphere2`, `trivial:r,k`.
pub fn target_catalog(name: &str) -> Result<ModuleXMod, XModError> {
    match name {
        // ℤ[ℤ₂] → ℤ, (n₀, n₁) ↦ 2(n₀ + n₁), generator swapping the basis.
        "rp2" => ModuleXMod::new(
            1,
            vec![],
            2,
            vec![IntMatrix::from_rows(&[vec![0, 1], vec![1, 0]])],
            IntMatrix::from_rows(&[vec![2, 2]]),
        ),
        "sphere2" => ModuleXMod::new(0, vec![], 1, vec![], IntMatrix::zeros(0, 1)),
        _ => {
            let params = name
                .strip_prefix("trivial:")
                .and_then(|p| p.split_once(','))
                .and_then(|(r, k)| Some((r.trim().parse::<usize>().ok()?, k.trim().parse::<usize>().ok()?)));
            match params {
                Some((r, k)) => trivial_target(r, k),
                None => Err(XModError::UnknownTarget(name.to_string())),
            }
        }
    }
}

/// `ℤʳ → ℤᵏ` with zero boundary and trivial action.
pub fn trivial_target(r: usize, k: usize) -> Result<ModuleXMod, XModError> {
    ModuleXMod::new(k, vec![], r, vec![IntMatrix::identity(r); k], IntMatrix::zeros(k, r))
}

/// `∂(f,t) = f σ₂(t) f⁻¹`, extended multiplicatively.
pub fn free_pre_crossed_boundary(m: &CWComplex, w: &HWord) -> Result<Word, ComplexError> {
    m.hword_boundary(w)
}

/// Abelianized shadow of an element of the free crossed module: the letter
/// `(f, t, s)` contributes `s·[f]·e_t`, with `[f]` the π₁-label of `f`.
pub fn derivation_image(m: &CWComplex, w: &HWord, labeling: &Pi1Labeling) -> Result<Vec<GroupRingElement>, ComplexError> {
    let mut out = vec![GroupRingElement::zero(m.alphabet()); m.two_cells().len()];
    for l in &w.letters {
        let i = m.two_cell_index(&l.cell)?;
        out[i].add_term(labeling.label(&l.conj), l.sign as i64);
    }
    Ok(out)
}

/// Derivation image of a triad word; an H-conjugator acts through its boundary.
pub fn triad_derivation_image(
    m: &CWComplex,
    w: &TriadWord,
    labeling: &Pi1Labeling,
) -> Result<Vec<GroupRingElement>, ComplexError> {
    let mut out = vec![GroupRingElement::zero(m.alphabet()); m.two_cells().len()];
    for l in &w.letters {
        let i = m.two_cell_index(&l.cell)?;
        let conj = &m.hword_boundary(&l.conj_h)? * &l.conj_f;
        out[i].add_term(labeling.label(&conj), l.sign as i64);
    }
    Ok(out)
}

/// A finite group given by its multiplication table; element 0 is the identity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteGroup {
    table: Vec<Vec<usize>>,
    inverse: Vec<usize>,
}

impl FiniteGroup {
    pub fn from_table(table: Vec<Vec<usize>>) -> Result<Self, XModError> {
        let n = table.len();
        if n == 0 {
            return Err(XModError::NotAGroup("empty table".into()));
        }
        if table.iter().any(|r| r.len() != n || r.iter().any(|&x| x >= n)) {
            return Err(XModError::NotAGroup("table is not square or not closed".into()));
        }
        if (0..n).any(|x| table[0][x] != x || table[x][0] != x) {
            return Err(XModError::NotAGroup("element 0 is not the identity".into()));
        }
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    if table[table[a][b]][c] != table[a][table[b][c]] {
                        return Err(XModError::NotAGroup(format!("not associative at ({a},{b},{c})")));
                    }
                }
            }
        }
        let mut inverse = vec![0; n];
        for (a, inv) in inverse.iter_mut().enumerate() {
            *inv = (0..n)
                .find(|&b| table[a][b] == 0)
                .ok_or_else(|| XModError::NotAGroup(format!("element {a} has no inverse")))?;
        }
        Ok(FiniteGroup { table, inverse })
    }

    fn from_table_unchecked(table: Vec<Vec<usize>>) -> Self {
        let n = table.len();
        let inverse = (0..n).map(|a| (0..n).find(|&b| table[a][b] == 0).expect("inverse")).collect();
        FiniteGroup { table, inverse }
    }

    pub fn cyclic(n: usize) -> Self {
        Self::from_table_unchecked((0..n).map(|a| (0..n).map(|b| (a + b) % n).collect()).collect())
    }

    /// Dihedral group of order `2n`: element `2k + s` is `r^k f^s`.
    pub fn dihedral(n: usize) -> Self {
        let decode = |x: usize| (x / 2, x % 2);
        let table = (0..2 * n)
            .map(|a| {
                (0..2 * n)
                    .map(|b| {
                        let (k1, s1) = decode(a);
                        let (k2, s2) = decode(b);
                        // r^k1 f^s1 r^k2 f^s2 = r^{k1 ± k2} f^{s1+s2}
                        let k = if s1 == 0 { (k1 + k2) % n } else { (k1 + n - k2) % n };
                        2 * k + (s1 + s2) % 2
                    })
                    .collect()
            })
            .collect();
        Self::from_table_unchecked(table)
    }

    /// Quaternion group {±1, ±i, ±j, ±k}; element `2u + s` is `(-1)^s · unit_u`.
    pub fn quaternion() -> Self {
        // unit products: (unit, sign) with 0=1, 1=i, 2=j, 3=k
        let unit = |a: usize, b: usize| -> (usize, usize) {
            match (a, b) {
                (0, x) | (x, 0) => (x, 0),
                (x, y) if x == y => (0, 1),
                (1, 2) => (3, 0),
                (2, 1) => (3, 1),
                (2, 3) => (1, 0),
                (3, 2) => (1, 1),
                (3, 1) => (2, 0),
                (1, 3) => (2, 1),
                _ => unreachable!(),
            }
        };
        let table = (0..8)
            .map(|a| {
                (0..8)
                    .map(|b| {
                        let (u, s) = unit(a / 2, b / 2);
                        2 * u + (s + a % 2 + b % 2) % 2
                    })
                    .collect()
            })
            .collect();
        Self::from_table_unchecked(table)
    }

    pub fn product(a: &FiniteGroup, b: &FiniteGroup) -> Self {
        let (n, m) = (a.order(), b.order());
        let table = (0..n * m)
            .map(|x| (0..n * m).map(|y| a.mul(x / m, y / m) * m + b.mul(x % m, y % m)).collect())
            .collect();
        Self::from_table_unchecked(table)
    }

    /// One representative of each isomorphism type of order at most `max` (≤ 8).
    pub fn small_groups(max: usize) -> Vec<(String, FiniteGroup)> {
        let c = FiniteGroup::cyclic;
        let mut out = vec![
            ("C1".to_string(), c(1)),
            ("C2".into(), c(2)),
            ("C3".into(), c(3)),
            ("C4".into(), c(4)),
            ("C2xC2".into(), FiniteGroup::product(&c(2), &c(2))),
            ("C5".into(), c(5)),
            ("C6".into(), c(6)),
            ("S3".into(), FiniteGroup::dihedral(3)),
            ("C7".into(), c(7)),
            ("C8".into(), c(8)),
            ("C4xC2".into(), FiniteGroup::product(&c(4), &c(2))),
            ("C2xC2xC2".into(), FiniteGroup::product(&FiniteGroup::product(&c(2), &c(2)), &c(2))),
            ("D4".into(), FiniteGroup::dihedral(4)),
            ("Q8".into(), FiniteGroup::quaternion()),
        ];
        out.retain(|(_, g)| g.order() <= max);
        out
    }

    pub fn order(&self) -> usize {
        self.table.len()
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.table[a][b]
    }

    pub fn inv(&self, a: usize) -> usize {
        self.inverse[a]
    }

    pub fn table(&self) -> &[Vec<usize>] {
        &self.table
    }

    pub fn is_abelian(&self) -> bool {
        (0..self.order()).all(|a| (0..self.order()).all(|b| self.mul(a, b) == self.mul(b, a)))
    }

    pub fn element_order(&self, a: usize) -> usize {
        let mut x = a;
        let mut k = 1;
        while x != 0 {
            x = self.mul(x, a);
            k += 1;
        }
        k
    }

    /// Evaluates a word given images of its generators.
    pub fn evaluate(&self, w: &Word, images: &[usize]) -> usize {
        w.evaluate(0, |g, e| self.power(images[g], e), |a, b| self.mul(*a, *b))
    }

    pub fn power(&self, a: usize, e: i64) -> usize {
        let base = if e < 0 { self.inv(a) } else { a };
        (0..e.unsigned_abs()).fold(0, |acc, _| self.mul(acc, base))
    }

    /// A small generating set, chosen greedily by index.
    pub fn generators(&self) -> Vec<usize> {
        let mut gens = Vec::new();
        let mut span: BTreeSet<usize> = [0].into();
        for x in 0..self.order() {
            if !span.contains(&x) {
                gens.push(x);
                span = self.closure(&gens);
            }
        }
        gens
    }

    fn closure(&self, gens: &[usize]) -> BTreeSet<usize> {
        let mut seen: BTreeSet<usize> = [0].into();
        let mut queue: VecDeque<usize> = [0].into();
        while let Some(x) = queue.pop_front() {
            for &g in gens {
                let y = self.mul(x, g);
                if seen.insert(y) {
                    queue.push_back(y);
                }
            }
        }
        seen
    }

    /// All homomorphisms into `target`, as image tables.
    pub fn homomorphisms(&self, target: &FiniteGroup) -> Vec<Vec<usize>> {
        let gens = self.generators();
        let candidates: Vec<Vec<usize>> = gens
            .iter()
            .map(|&g| {
                let n = self.element_order(g);
                (0..target.order()).filter(|&y| n.is_multiple_of(target.element_order(y))).collect()
            })
            .collect();
        let mut out = Vec::new();
        let mut choice = vec![0usize; gens.len()];
        'outer: loop {
            let images: Vec<usize> = choice.iter().zip(&candidates).map(|(&i, c)| c[i]).collect();
            if let Some(map) = self.extend(&gens, &images, target) {
                out.push(map);
            }
            for pos in 0..choice.len() {
                choice[pos] += 1;
                if choice[pos] < candidates[pos].len() {
                    continue 'outer;
                }
                choice[pos] = 0;
            }
            return out;
        }
    }

    /// Extends generator images to a homomorphism, if consistent.
    fn extend(&self, gens: &[usize], images: &[usize], target: &FiniteGroup) -> Option<Vec<usize>> {
        let mut map = vec![usize::MAX; self.order()];
        map[0] = 0;
        let mut queue: VecDeque<usize> = [0].into();
        while let Some(x) = queue.pop_front() {
            for (&g, &img) in gens.iter().zip(images) {
                let y = self.mul(x, g);
                let fy = target.mul(map[x], img);
                if map[y] == usize::MAX {
                    map[y] = fy;
                    queue.push_back(y);
                } else if map[y] != fy {
                    return None;
                }
            }
        }
        Some(map)
    }

    /// Automorphisms as permutations, with the composition table `(σ·τ)(x) = σ(τ(x))`.
    pub fn automorphisms(&self) -> (Vec<Vec<usize>>, FiniteGroup) {
        let mut auts: Vec<Vec<usize>> = self
            .homomorphisms(self)
            .into_iter()
            .filter(|m| m.iter().collect::<BTreeSet<_>>().len() == self.order())
            .collect();
        auts.sort();
        let index: HashMap<Vec<usize>, usize> = auts.iter().cloned().enumerate().map(|(i, a)| (a, i)).collect();
        let table = auts
            .iter()
            .map(|s| {
                auts.iter()
                    .map(|t| index[&t.iter().map(|&x| s[x]).collect::<Vec<_>>()])
                    .collect()
            })
            .collect();
        (auts.clone(), FiniteGroup::from_table_unchecked(table))
    }
}

/// `∂: H → G` between finite groups with `G` acting on `H`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteCrossedModule {
    pub h: FiniteGroup,
    pub g: FiniteGroup,
    pub boundary: Vec<usize>,
    /// `action[g][h] = ᵍh`.
    pub action: Vec<Vec<usize>>,
}

impl FiniteCrossedModule {
    /// The identity crossed module on `g`, acting by conjugation.
    pub fn identity(g: &FiniteGroup) -> Self {
        let n = g.order();
        let action = (0..n).map(|x| (0..n).map(|y| g.mul(g.mul(x, y), g.inv(x))).collect()).collect();
        FiniteCrossedModule { h: g.clone(), g: g.clone(), boundary: (0..n).collect(), action }
    }

    /// Trivial action of `g` on `h` and the given boundary map.
    pub fn with_trivial_action(h: &FiniteGroup, g: &FiniteGroup, boundary: Vec<usize>) -> Self {
        let action = (0..g.order()).map(|_| (0..h.order()).collect()).collect();
        FiniteCrossedModule { h: h.clone(), g: g.clone(), boundary, action }
    }

    /// Checks that ∂ and the action are homomorphisms and both axioms hold.
    pub fn validate(&self) -> Vec<AxiomViolation> {
        let (h, g) = (&self.h, &self.g);
        let mut out = Vec::new();
        if self.boundary.len() != h.order() || self.action.len() != g.order() {
            out.push(AxiomViolation::Shape("boundary or action table has the wrong size".into()));
            return out;
        }
        for a in 0..h.order() {
            for b in 0..h.order() {
                if self.boundary[h.mul(a, b)] != g.mul(self.boundary[a], self.boundary[b]) {
                    out.push(AxiomViolation::NotHomomorphism(format!("boundary at ({a},{b})")));
                    return out;
                }
            }
        }
        for x in 0..g.order() {
            for a in 0..h.order() {
                for b in 0..h.order() {
                    if self.action[x][h.mul(a, b)] != h.mul(self.action[x][a], self.action[x][b]) {
                        out.push(AxiomViolation::NotHomomorphism(format!("action of {x} on H")));
                        return out;
                    }
                }
            }
            for y in 0..g.order() {
                for a in 0..h.order() {
                    if self.action[g.mul(x, y)][a] != self.action[x][self.action[y][a]] {
                        out.push(AxiomViolation::NotHomomorphism(format!("action at ({x},{y})")));
                        return out;
                    }
                }
            }
        }
        for x in 0..g.order() {
            for a in 0..h.order() {
                if self.boundary[self.action[x][a]] != g.mul(g.mul(x, self.boundary[a]), g.inv(x)) {
                    out.push(AxiomViolation::Equivariance { g: x, h: a });
                }
            }
        }
        for a in 0..h.order() {
            for b in 0..h.order() {
                if self.action[self.boundary[a]][b] != h.mul(h.mul(a, b), h.inv(a)) {
                    out.push(AxiomViolation::Peiffer { h: a, h2: b });
                }
            }
        }
        out
    }

    /// Every crossed module structure on the pair `(h, g)`.
    pub fn enumerate(h: &FiniteGroup, g: &FiniteGroup) -> Vec<FiniteCrossedModule> {
        let boundaries = h.homomorphisms(g);
        let (auts, aut_group) = h.automorphisms();
        let actions: Vec<Vec<Vec<usize>>> = g
            .homomorphisms(&aut_group)
            .into_iter()
            .map(|phi| phi.iter().map(|&i| auts[i].clone()).collect())
            .collect();
        let mut out = Vec::new();
        for action in &actions {
            for boundary in &boundaries {
                let x = FiniteCrossedModule { h: h.clone(), g: g.clone(), boundary: boundary.clone(), action: action.clone() };
                if x.satisfies_axioms() {
                    out.push(x);
                }
            }
        }
        out
    }

    fn satisfies_axioms(&self) -> bool {
        let (h, g) = (&self.h, &self.g);
        (0..g.order()).all(|x| {
            (0..h.order()).all(|a| self.boundary[self.action[x][a]] == g.mul(g.mul(x, self.boundary[a]), g.inv(x)))
        }) && (0..h.order())
            .all(|a| (0..h.order()).all(|b| self.action[self.boundary[a]][b] == h.mul(h.mul(a, b), h.inv(a))))
    }

    /// Elements of `ker ∂`, in index order.
    pub fn kernel(&self) -> Vec<usize> {
        (0..self.h.order()).filter(|&a| self.boundary[a] == 0).collect()
    }

    /// Coset label of each element of G modulo `∂H`: the minimal index in the coset.
    fn coset_labels(&self) -> Vec<usize> {
        let image: BTreeSet<usize> = self.boundary.iter().copied().collect();
        (0..self.g.order())
            .map(|x| image.iter().map(|&n| self.g.mul(x, n)).min().expect("nonempty image"))
            .collect()
    }

    pub fn hoang_data(&self) -> HoangData {
        let (h, g) = (&self.h, &self.g);
        let labels = self.coset_labels();
        let reps: Vec<usize> = labels.iter().copied().collect::<BTreeSet<_>>().into_iter().collect();
        let rep_index: HashMap<usize, usize> = reps.iter().enumerate().map(|(i, &r)| (r, i)).collect();
        let class = |x: usize| rep_index[&labels[x]];
        let n1 = reps.len();
        let pi1 = FiniteGroup::from_table_unchecked(
            (0..n1).map(|a| (0..n1).map(|b| class(g.mul(reps[a], reps[b]))).collect()).collect(),
        );
        // the minimal-index element of a coset is its label, so s = reps
        let section = reps.clone();
        let kernel = self.kernel();
        let k_index: HashMap<usize, usize> = kernel.iter().enumerate().map(|(i, &x)| (x, i)).collect();
        let pi2_table = FiniteGroup::from_table_unchecked(
            (0..kernel.len()).map(|a| (0..kernel.len()).map(|b| k_index[&h.mul(kernel[a], kernel[b])]).collect()).collect(),
        );
        let mut preimage = vec![usize::MAX; g.order()];
        for a in (0..h.order()).rev() {
            preimage[self.boundary[a]] = a;
        }
        let omega_lift: Vec<Vec<usize>> = (0..n1)
            .map(|a| {
                (0..n1)
                    .map(|b| {
                        let w = g.mul(g.mul(section[a], section[b]), g.inv(section[pi1.mul(a, b)]));
                        preimage[w]
                    })
                    .collect()
            })
            .collect();
        let mut beta = vec![0; n1 * n1 * n1];
        for a in 0..n1 {
            for b in 0..n1 {
                for c in 0..n1 {
                    let x = h.mul(
                        h.mul(self.action[section[a]][omega_lift[b][c]], omega_lift[a][pi1.mul(b, c)]),
                        h.mul(h.inv(omega_lift[pi1.mul(a, b)][c]), h.inv(omega_lift[a][b])),
                    );
                    beta[(a * n1 + b) * n1 + c] = *k_index.get(&x).expect("β takes values in ker ∂");
                }
            }
        }
        let alpha = (0..n1).map(|a| kernel.iter().map(|&x| k_index[&self.action[section[a]][x]]).collect()).collect();
        HoangData {
            pi2: abelian_invariants(&pi2_table),
            pi1,
            section,
            pi2_elements: kernel,
            pi2_table,
            alpha,
            beta,
        }
    }

    /// Whether some section of `G → π₁` is a homomorphism.
    pub fn is_split(&self) -> bool {
        let labels = self.coset_labels();
        let data = self.hoang_data();
        let n1 = data.pi1.order();
        let cosets: Vec<Vec<usize>> =
            data.section.iter().map(|&r| (0..self.g.order()).filter(|&x| labels[x] == r).collect()).collect();
        let mut choice = vec![0usize; n1];
        loop {
            let s: Vec<usize> = (0..n1).map(|a| cosets[a][choice[a]]).collect();
            if (0..n1).all(|a| (0..n1).all(|b| self.g.mul(s[a], s[b]) == s[data.pi1.mul(a, b)])) {
                return true;
            }
            let mut pos = 0;
            loop {
                if pos == n1 {
                    return false;
                }
                choice[pos] += 1;
                if choice[pos] < cosets[pos].len() {
                    break;
                }
                choice[pos] = 0;
                pos += 1;
            }
        }
    }

    pub fn to_strict_2group(&self) -> Strict2Group {
        let (h, g) = (&self.h, &self.g);
        let (nh, ng) = (h.order(), g.order());
        let idx = |a: usize, x: usize| a * ng + x;
        // (h₁,g₁)(h₂,g₂) = (^{g₂⁻¹}h₁ · h₂, g₁g₂), which makes t(h,g) = g∂(h) a homomorphism
        let table = (0..nh * ng)
            .map(|p| {
                let (h1, g1) = (p / ng, p % ng);
                (0..nh * ng)
                    .map(|q| {
                        let (h2, g2) = (q / ng, q % ng);
                        idx(h.mul(self.action[g.inv(g2)][h1], h2), g.mul(g1, g2))
                    })
                    .collect()
            })
            .collect();
        Strict2Group {
            objects: g.clone(),
            arrows: FiniteGroup::from_table_unchecked(table),
            source: (0..nh * ng).map(|p| p % ng).collect(),
            target: (0..nh * ng).map(|p| g.mul(p % ng, self.boundary[p / ng])).collect(),
            unit: (0..ng).map(|x| idx(0, x)).collect(),
        }
    }
}

/// A group in a finite crossed-module file: a name from [`FiniteGroup::small_groups`] or a table.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GroupFileSpec {
    Named(String),
    Table(Vec<Vec<usize>>),
}

impl GroupFileSpec {
    fn resolve(&self) -> Result<FiniteGroup, XModError> {
        match self {
            GroupFileSpec::Named(name) => FiniteGroup::small_groups(8)
                .into_iter()
                .find(|(n, _)| n == name)
                .map(|(_, g)| g)
                .ok_or_else(|| XModError::NotAGroup(format!("unknown group `{name}`"))),
            GroupFileSpec::Table(t) => FiniteGroup::from_table(t.clone()),
        }
    }
}

/// Finite crossed module file: `{"H":"C4","G":"C2","boundary":[0,1,0,1]}`;
/// `action[g][h]` defaults to the trivial action.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FiniteXModFile {
    #[serde(rename = "H")]
    pub h: GroupFileSpec,
    #[serde(rename = "G")]
    pub g: GroupFileSpec,
    pub boundary: Vec<usize>,
    #[serde(default)]
    pub action: Option<Vec<Vec<usize>>>,
}

impl FiniteCrossedModule {
    pub fn save(&self) -> String {
        let f = FiniteXModFile {
            h: GroupFileSpec::Table(self.h.table().to_vec()),
            g: GroupFileSpec::Table(self.g.table().to_vec()),
            boundary: self.boundary.clone(),
            action: Some(self.action.clone()),
        };
        serde_json::to_string(&f).expect("crossed module serializes")
    }

    /// Parses and validates; axiom failures are reported as `Invalid`.
    pub fn load(text: &str) -> Result<FiniteCrossedModule, XModError> {
        let f: FiniteXModFile = serde_json::from_str(text)
            .map_err(|e| XModError::Parse { line: e.line(), column: e.column(), message: e.to_string() })?;
        let (h, g) = (f.h.resolve()?, f.g.resolve()?);
        let x = match f.action {
            Some(action) => FiniteCrossedModule { h, g, boundary: f.boundary, action },
            None => FiniteCrossedModule::with_trivial_action(&h, &g, f.boundary),
        };
        let violations = x.validate();
        if let Some(v) = violations.first() {
            return Err(XModError::Invalid(v.to_string()));
        }
        Ok(x)
    }

    pub fn load_path(path: &str) -> Result<FiniteCrossedModule, XModError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| XModError::Io { path: path.to_string(), message: e.to_string() })?;
        FiniteCrossedModule::load(&text)
    }
}

/// Strict 2-group: objects-level group `G₁`, arrow group `G₂ = H ⋊ G`,
/// source, target, and identity-arrow maps. Arrow `(h, g)` has index `h·|G| + g`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Strict2Group {
    pub objects: FiniteGroup,
    pub arrows: FiniteGroup,
    pub source: Vec<usize>,
    pub target: Vec<usize>,
    pub unit: Vec<usize>,
}

impl Strict2Group {
    /// Recovers the crossed module `t: ker s → G₁`, with G₁ acting through conjugation by units.
    pub fn crossed_module(&self) -> FiniteCrossedModule {
        let kernel: Vec<usize> = (0..self.arrows.order()).filter(|&p| self.source[p] == 0).collect();
        let index: HashMap<usize, usize> = kernel.iter().enumerate().map(|(i, &p)| (p, i)).collect();
        let a = &self.arrows;
        let h = FiniteGroup::from_table_unchecked(
            kernel.iter().map(|&p| kernel.iter().map(|&q| index[&a.mul(p, q)]).collect()).collect(),
        );
        let boundary = kernel.iter().map(|&p| self.target[p]).collect();
        let action = (0..self.objects.order())
            .map(|x| {
                let u = self.unit[x];
                kernel.iter().map(|&p| index[&a.mul(a.mul(u, p), a.inv(u))]).collect()
            })
            .collect();
        FiniteCrossedModule { h, g: self.objects.clone(), boundary, action }
    }
}

/// `(π₁, π₂, α, β)` of a finite crossed module.
#[derive(Debug, Clone)]
pub struct HoangData {
    pub pi1: FiniteGroup,
    /// Chosen lift `s(a) ∈ G` of each element of π₁.
    pub section: Vec<usize>,
    pub pi2: AbelianGroup,
    /// Elements of π₂ as indices into H.
    pub pi2_elements: Vec<usize>,
    pub pi2_table: FiniteGroup,
    /// `alpha[a][k]`: the action of `a ∈ π₁` on the k-th element of π₂.
    pub alpha: Vec<Vec<usize>>,
    beta: Vec<usize>,
}

impl HoangData {
    pub fn beta(&self, a: usize, b: usize, c: usize) -> usize {
        let n = self.pi1.order();
        self.beta[(a * n + b) * n + c]
    }

    /// Every value of `δβ`, which vanishes identically for a cocycle.
    pub fn is_cocycle(&self) -> bool {
        let (p, m) = (&self.pi1, &self.pi2_table);
        let n = p.order();
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    for d in 0..n {
                        let terms = [
                            self.alpha[a][self.beta(b, c, d)],
                            m.inv(self.beta(p.mul(a, b), c, d)),
                            self.beta(a, p.mul(b, c), d),
                            m.inv(self.beta(a, b, p.mul(c, d))),
                            self.beta(a, b, c),
                        ];
                        if terms.iter().fold(0, |acc, &x| m.mul(acc, x)) != 0 {
                            return false;
                        }
                    }
                }
            }
        }
        true
    }

    pub fn is_zero(&self) -> bool {
        self.beta.iter().all(|&x| x == 0)
    }

    /// `(δc)(a,b,c') = α(a)c(b,c') − c(ab,c') + c(a,bc') − c(a,b)`.
    pub fn coboundary(&self, cochain: &[usize]) -> Vec<usize> {
        let (p, m) = (&self.pi1, &self.pi2_table);
        let n = p.order();
        let c = |a: usize, b: usize| cochain[a * n + b];
        let mut out = vec![0; n * n * n];
        for a in 0..n {
            for b in 0..n {
                for d in 0..n {
                    let terms = [self.alpha[a][c(b, d)], m.inv(c(p.mul(a, b), d)), c(a, p.mul(b, d)), m.inv(c(a, b))];
                    out[(a * n + b) * n + d] = terms.iter().fold(0, |acc, &x| m.mul(acc, x));
                }
            }
        }
        out
    }

    /// Backtracking search for a normalized 2-cochain `c` with `δc = β`.
    pub fn coboundary_witness(&self) -> Option<Vec<usize>> {
        let (p, m) = (&self.pi1, &self.pi2_table);
        let n = p.order();
        let vars: Vec<(usize, usize)> = (1..n).flat_map(|a| (1..n).map(move |b| (a, b))).collect();
        let pos: HashMap<(usize, usize), usize> = vars.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let slot = |a: usize, b: usize| pos.get(&(a, b)).copied();
        // group each triple under the last variable it mentions
        let mut checks: Vec<Vec<(usize, usize, usize)>> = vec![Vec::new(); vars.len()];
        for a in 0..n {
            for b in 0..n {
                for d in 0..n {
                    let involved = [slot(b, d), slot(p.mul(a, b), d), slot(a, p.mul(b, d)), slot(a, b)];
                    match involved.iter().flatten().max() {
                        Some(&last) => checks[last].push((a, b, d)),
                        None if self.beta(a, b, d) != 0 => return None,
                        None => {}
                    }
                }
            }
        }
        let mut cochain = vec![0usize; n * n];
        let holds = |cochain: &[usize], (a, b, d): (usize, usize, usize)| {
            let c = |x: usize, y: usize| cochain[x * n + y];
            let terms = [self.alpha[a][c(b, d)], m.inv(c(p.mul(a, b), d)), c(a, p.mul(b, d)), m.inv(c(a, b))];
            terms.iter().fold(0, |acc, &x| m.mul(acc, x)) == self.beta(a, b, d)
        };
        fn search(
            i: usize,
            vars: &[(usize, usize)],
            checks: &[Vec<(usize, usize, usize)>],
            order: usize,
            n: usize,
            cochain: &mut Vec<usize>,
            holds: &dyn Fn(&[usize], (usize, usize, usize)) -> bool,
        ) -> bool {
            if i == vars.len() {
                return true;
            }
            let (a, b) = vars[i];
            for v in 0..order {
                cochain[a * n + b] = v;
                if checks[i].iter().all(|&t| holds(cochain, t))
                    && search(i + 1, vars, checks, order, n, cochain, holds)
                {
                    return true;
                }
            }
            cochain[a * n + b] = 0;
            false
        }
        search(0, &vars, &checks, m.order(), n, &mut cochain, &holds).then_some(cochain)
    }
}

/// Invariant factors of a finite abelian group given by its table, from the
/// counts of solutions of `x^k = 1`.
pub fn abelian_invariants(g: &FiniteGroup) -> AbelianGroup {
    let n = g.order();
    let count = |k: usize| (0..n).filter(|&x| g.power(x, k as i64) == 0).count();
    let observed: Vec<usize> = (1..=n).map(count).collect();
    let mut candidates = Vec::new();
    factorizations(n as i64, &mut Vec::new(), &mut candidates);
    for factors in candidates {
        let predicted: Vec<usize> =
            (1..=n).map(|k| factors.iter().map(|&d| (k as i64).gcd(&d) as usize).product()).collect();
        if predicted == observed {
            return AbelianGroup::from_cyclic(&factors);
        }
    }
    panic!("table is not an abelian group");
}

/// Ordered factorizations `n = d₁·d₂·…` with `d₁ | d₂ | …`, all `dᵢ ≥ 2`.
fn factorizations(n: i64, prefix: &mut Vec<i64>, out: &mut Vec<Vec<i64>>) {
    if n == 1 {
        out.push(prefix.clone());
        return;
    }
    for d in 2..=n {
        if n % d == 0 && prefix.last().is_none_or(|&p| d % p == 0) {
            prefix.push(d);
            factorizations(n / d, prefix, out);
            prefix.pop();
        }
    }
}

/// The i-th standard basis vector of ℤ^dim.
pub fn unit_vector(dim: usize, i: usize) -> Vec<BigInt> {
    (0..dim).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }).collect()
}
