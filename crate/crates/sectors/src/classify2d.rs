//! Classification of maps from a 2-complex into a target crossed module.
//!
//! A map is a crossed-module homomorphism `(φ₁, φ₂)`; once the induced map on
//! π₁ (the sector) is fixed, homomorphisms form an affine lattice and based
//! homotopies a sublattice of its directions. Free classes are the orbits of
//! π₁X acting on the based ones.

use std::collections::BTreeSet;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde_json::{json, Map, Value};
use thiserror::Error;

use crate::complexes::{CWComplex, ComplexError};
use crate::words::fox_derivative;
use crate::xmod::{FiniteGroup, ModuleXMod};
use crate::zlinalg::{
    big, quotient_with_representatives, smith_normal_form, smallvec, solve, AbelianGroup, AffineLattice,
    ClassCoordinates, CosetQuotient, IntMatrix, LinalgError,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ClassifyError {
    #[error("unsupported target: {0}")]
    UnsupportedTarget(String),
    #[error("source must have dimension at most {max}, got {got}")]
    Dimension { max: usize, got: usize },
    #[error("no homomorphism lifts sector {0}")]
    EmptySector(usize),
    #[error(transparent)]
    Complex(#[from] ComplexError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// Positions of the unknowns `φ₁(a) ∈ ℤᵏ`, `φ₂(t) ∈ ℤʳ` in one flat vector.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Layout {
    pub generators: Vec<String>,
    pub cells: Vec<String>,
    pub k: usize,
    pub r: usize,
}

impl Layout {
    pub fn new(m: &CWComplex, x: &ModuleXMod) -> Self {
        Layout {
            generators: m.generators().to_vec(),
            cells: m.two_cells().iter().map(|t| t.name.clone()).collect(),
            k: x.k(),
            r: x.rank(),
        }
    }

    pub fn len(&self) -> usize {
        self.generators.len() * self.k + self.cells.len() * self.r
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn phi1(&self, a: usize) -> std::ops::Range<usize> {
        a * self.k..(a + 1) * self.k
    }

    pub fn phi2(&self, t: usize) -> std::ops::Range<usize> {
        let o = self.generators.len() * self.k;
        o + t * self.r..o + (t + 1) * self.r
    }

    /// Readable name of coordinate `i`, e.g. `phi1(a)` or `phi2(t)_0`.
    pub fn name(&self, i: usize) -> String {
        let n1 = self.generators.len() * self.k;
        if i < n1 {
            let (a, j) = (i / self.k, i % self.k);
            if self.k == 1 {
                format!("phi1({})", self.generators[a])
            } else {
                format!("phi1({})_{j}", self.generators[a])
            }
        } else {
            let (t, j) = ((i - n1) / self.r, (i - n1) % self.r);
            format!("phi2({})_{j}", self.cells[t])
        }
    }
}

/// A crossed-module homomorphism in coordinates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct XModHom {
    pub phi1: Vec<Vec<BigInt>>,
    pub phi2: Vec<Vec<BigInt>>,
}

impl XModHom {
    pub fn from_vector(layout: &Layout, v: &[BigInt]) -> Self {
        XModHom {
            phi1: (0..layout.generators.len()).map(|a| v[layout.phi1(a)].to_vec()).collect(),
            phi2: (0..layout.cells.len()).map(|t| v[layout.phi2(t)].to_vec()).collect(),
        }
    }

    pub fn to_vector(&self) -> Vec<BigInt> {
        self.phi1.iter().chain(&self.phi2).flatten().cloned().collect()
    }

    /// `d·φ₂(t) = Σₐ expsum(σ₂(t), a)·φ₁(a)` in G, for every 2-cell.
    pub fn is_homomorphism(&self, m: &CWComplex, x: &ModuleXMod) -> bool {
        m.two_cells().iter().enumerate().all(|(t, cell)| {
            let mut diff = x.boundary().mul_vec(&self.phi2[t]);
            for (a, e) in cell.attach.exponent_sums().into_iter().enumerate() {
                for (d, p) in diff.iter_mut().zip(&self.phi1[a]) {
                    *d -= big(e) * p;
                }
            }
            diff.iter().enumerate().all(|(i, v)| match x.generator_order(i) {
                0 => v.is_zero(),
                n => v.is_multiple_of(&big(n)),
            })
        })
    }
}

/// A homomorphism `π₁M → π₁X`, given by the class of each generator's image.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Sector {
    /// Canonical lift in ℤᵏ of each generator's image.
    pub labels: Vec<Vec<BigInt>>,
    /// Coordinates of each image in π₁X.
    pub coordinates: Vec<Vec<BigInt>>,
}

fn finite_pi1(x: &ModuleXMod) -> Result<CosetQuotient, ClassifyError> {
    let pi1 = x.pi1();
    if !pi1.group().is_finite() {
        return Err(ClassifyError::UnsupportedTarget(format!("π₁X = {} is infinite", pi1.group())));
    }
    Ok(pi1)
}

fn require_dim2(m: &CWComplex) -> Result<(), ClassifyError> {
    if m.dimension() > 2 {
        return Err(ClassifyError::Dimension { max: 2, got: m.dimension() });
    }
    Ok(())
}

/// Every assignment of π₁X elements to generators killing all relators.
/// The first generator varies fastest.
pub fn pi1_sectors(m: &CWComplex, x: &ModuleXMod) -> Result<Vec<Sector>, ClassifyError> {
    let pi1 = finite_pi1(x)?;
    let elements = pi1.torsion_representatives();
    let n = m.generators().len();
    let relators: Vec<Vec<i64>> = m.two_cells().iter().map(|t| t.attach.exponent_sums()).collect();
    let zero = vec![BigInt::zero(); x.k()];
    let mut out = Vec::new();
    let mut choice = vec![0usize; n];
    loop {
        let labels: Vec<Vec<BigInt>> = choice.iter().map(|&i| elements[i].clone()).collect();
        let kills = relators.iter().all(|e| {
            let mut s = zero.clone();
            for (a, &ea) in e.iter().enumerate() {
                for (si, li) in s.iter_mut().zip(&labels[a]) {
                    *si += big(ea) * li;
                }
            }
            pi1.canonical(&s) == pi1.canonical(&zero)
        });
        if kills {
            let coordinates = labels.iter().map(|l| pi1.coordinates(l).expect("label in ℤᵏ").torsion).collect();
            out.push(Sector { labels, coordinates });
        }
        let mut pos = 0;
        loop {
            if pos == n {
                return Ok(out);
            }
            choice[pos] += 1;
            if choice[pos] < elements.len() {
                break;
            }
            choice[pos] = 0;
            pos += 1;
        }
    }
}

/// All homomorphisms in a sector, as an affine lattice in [`Layout`] coordinates.
pub fn hom_lattice(m: &CWComplex, x: &ModuleXMod, sector: &Sector) -> Option<AffineLattice> {
    let layout = Layout::new(m, x);
    let (n1, n2, k, r) = (layout.generators.len(), layout.cells.len(), layout.k, layout.r);
    let torsion = x.torsion_lattice();
    let nt = torsion.len();
    // unknowns: φ₁, φ₂, then y_a ∈ ℤʳ, z_a ∈ ℤ^{nt}, w_t ∈ ℤ^{nt}
    let main = layout.len();
    let y0 = main;
    let z0 = y0 + n1 * r;
    let w0 = z0 + n1 * nt;
    let cols = w0 + n2 * nt;
    let rows = n1 * k + n2 * k;
    let mut a = IntMatrix::zeros(rows, cols);
    let mut b = vec![BigInt::zero(); rows];
    let neg_d = x.boundary().scale(&big(-1));
    // φ₁(a) − d·y_a − T·z_a = label_a
    for g in 0..n1 {
        let row = g * k;
        for i in 0..k {
            a.set(row + i, layout.phi1(g).start + i, BigInt::one());
            b[row + i] = sector.labels[g][i].clone();
        }
        a.set_block(row, y0 + g * r, &neg_d);
        for (j, tcol) in torsion.iter().enumerate() {
            for i in 0..k {
                a.set(row + i, z0 + g * nt + j, -&tcol[i]);
            }
        }
    }
    // d·φ₂(t) − Σ e·φ₁(a) − T·w_t = 0
    for (t, cell) in m.two_cells().iter().enumerate() {
        let row = n1 * k + t * k;
        a.set_block(row, layout.phi2(t).start, x.boundary());
        for (g, e) in cell.attach.exponent_sums().into_iter().enumerate() {
            for i in 0..k {
                let c = layout.phi1(g).start + i;
                let v = a.get(row + i, c) - big(e);
                a.set(row + i, c, v);
            }
        }
        for (j, tcol) in torsion.iter().enumerate() {
            for i in 0..k {
                a.set(row + i, w0 + t * nt + j, -&tcol[i]);
            }
        }
    }
    let sol = solve(&a, &b)?;
    let kernel: Vec<Vec<BigInt>> = sol.kernel.iter().map(|v| v[..main].to_vec()).collect();
    Some(AffineLattice::new(sol.particular[..main].to_vec(), &kernel))
}

/// `ρ(φ₁(w))` for a word over M's generators, through the sector labels.
fn rho_of_word(x: &ModuleXMod, sector: &Sector, sums: &[i64]) -> IntMatrix {
    let mut v = vec![BigInt::zero(); x.k()];
    for (a, &e) in sums.iter().enumerate() {
        for (vi, li) in v.iter_mut().zip(&sector.labels[a]) {
            *vi += big(e) * li;
        }
    }
    x.rho(&v)
}

/// Generators of the based-homotopy directions: for each generator `a` and
/// basis vector `v`, the free derivation with `θ(a) = v`; plus the torsion
/// relations of G in each `φ₁(a)`.
pub fn homotopy_generators(m: &CWComplex, x: &ModuleXMod, sector: &Sector) -> Vec<Vec<BigInt>> {
    let layout = Layout::new(m, x);
    let n1 = layout.generators.len();
    let mut out = Vec::new();
    for a in 0..n1 {
        // Σ coef·ρ(φ₁(g)) over the Fox derivative of each relator
        let blocks: Vec<IntMatrix> = m
            .two_cells()
            .iter()
            .map(|cell| {
                let mut acc = IntMatrix::zeros(x.rank(), x.rank());
                for (w, c) in fox_derivative(&cell.attach, a).terms() {
                    acc = acc.add(&rho_of_word(x, sector, &w.exponent_sums()).scale(&big(c)));
                }
                acc
            })
            .collect();
        for j in 0..x.rank() {
            let mut col = vec![BigInt::zero(); layout.len()];
            for (i, v) in x.boundary().column(j).into_iter().enumerate() {
                col[layout.phi1(a).start + i] = v;
            }
            for (t, block) in blocks.iter().enumerate() {
                for (i, v) in block.column(j).into_iter().enumerate() {
                    col[layout.phi2(t).start + i] = v;
                }
            }
            out.push(col);
        }
        for tcol in x.torsion_lattice() {
            let mut col = vec![BigInt::zero(); layout.len()];
            for (i, v) in tcol.into_iter().enumerate() {
                col[layout.phi1(a).start + i] = v;
            }
            out.push(col);
        }
    }
    out
}

/// Hermite basis of the based-homotopy sublattice.
pub fn homotopy_sublattice(m: &CWComplex, x: &ModuleXMod, sector: &Sector) -> Vec<Vec<BigInt>> {
    let layout = Layout::new(m, x);
    crate::zlinalg::hermite_basis(&homotopy_generators(m, x, sector), layout.len())
}

fn rank_of(vectors: &[Vec<BigInt>], dim: usize) -> usize {
    if vectors.is_empty() {
        return 0;
    }
    smith_normal_form(&IntMatrix::from_columns(vectors, dim).expect("uniform length")).rank()
}

/// Coordinates kept for display: scanning left to right, keep a coordinate
/// when it raises the rank of the projected direction lattice.
fn display_coordinates(directions: &[Vec<BigInt>], dim: usize) -> Vec<usize> {
    let target = rank_of(directions, dim);
    let mut kept = Vec::new();
    let mut current = 0;
    for i in 0..dim {
        if current == target {
            break;
        }
        let mut trial = kept.clone();
        trial.push(i);
        let r = rank_of(&project_all(directions, &trial), trial.len());
        if r > current {
            kept = trial;
            current = r;
        }
    }
    kept
}

fn project(v: &[BigInt], coords: &[usize]) -> Vec<BigInt> {
    coords.iter().map(|&i| v[i].clone()).collect()
}

fn project_all(vs: &[Vec<BigInt>], coords: &[usize]) -> Vec<Vec<BigInt>> {
    vs.iter().map(|v| project(v, coords)).collect()
}

/// Free classes within one sector.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FreeClasses {
    /// Finite based group: orbits as index sets into the representatives.
    Orbits(Vec<Vec<usize>>),
    /// Based group ℤ acted on with finitely many orbits; one canonical vector each.
    Finite(Vec<Vec<BigInt>>),
    /// Based group ℤ with infinitely many orbits: `base + n·direction` for
    /// `n ≥ min` (every integer n when `min` is absent), one per orbit.
    Family { base: Vec<BigInt>, direction: Vec<BigInt>, min: Option<BigInt> },
    Unsupported(String),
}

#[derive(Debug, Clone)]
pub struct SectorResult {
    pub sector: Sector,
    /// All homomorphisms in the sector, in [`Layout`] coordinates.
    pub homs: AffineLattice,
    /// Hermite basis of the based-homotopy sublattice.
    pub homotopies: Vec<Vec<BigInt>>,
    quotient: CosetQuotient,
    /// Canonical representatives of classes with zero free coordinates.
    pub representatives: Vec<Vec<BigInt>>,
    /// One display direction per ℤ factor of the based group.
    pub free_directions: Vec<Vec<BigInt>>,
    pub free: Option<FreeClasses>,
}

impl SectorResult {
    pub fn based_group(&self) -> &AbelianGroup {
        self.quotient.group()
    }

    /// The quotient in display coordinates.
    pub fn quotient(&self) -> &CosetQuotient {
        &self.quotient
    }

    /// Number of free classes, if finite.
    pub fn free_count(&self) -> Option<usize> {
        match self.free.as_ref()? {
            FreeClasses::Orbits(o) => Some(o.len()),
            FreeClasses::Finite(v) => Some(v.len()),
            _ => None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SectorClassification {
    pub layout: Layout,
    /// Layout coordinates shown in representatives.
    pub display: Vec<usize>,
    pub sectors: Vec<SectorResult>,
}

impl SectorClassification {
    pub fn display_names(&self) -> Vec<String> {
        self.display.iter().map(|&i| self.layout.name(i)).collect()
    }

    /// Display coordinates of a full homomorphism vector.
    pub fn to_display(&self, v: &[BigInt]) -> Vec<BigInt> {
        project(v, &self.display)
    }

    /// Index of the sector containing a homomorphism, if any.
    pub fn sector_of(&self, hom: &XModHom) -> Option<usize> {
        let v = hom.to_vector();
        self.sectors.iter().position(|s| s.homs.contains(&v))
    }

    /// Whether two homomorphisms are based homotopic.
    pub fn same_class(&self, u: &XModHom, v: &XModHom) -> bool {
        match (self.sector_of(u), self.sector_of(v)) {
            (Some(i), Some(j)) if i == j => {
                let q = &self.sectors[i].quotient;
                q.same_class(&self.to_display(&u.to_vector()), &self.to_display(&v.to_vector())).unwrap_or(false)
            }
            _ => false,
        }
    }

    /// Canonical display vector of the class of a homomorphism.
    pub fn canonical(&self, hom: &XModHom) -> Option<Vec<BigInt>> {
        let s = &self.sectors[self.sector_of(hom)?];
        Some(s.quotient.canonical(&self.to_display(&hom.to_vector())))
    }

    pub fn based_groups(&self) -> Vec<AbelianGroup> {
        self.sectors.iter().map(|s| s.based_group().clone()).collect()
    }

    pub fn to_json(&self) -> Value {
        let ints = |v: &[BigInt]| Value::from(smallvec(v));
        let sectors: Vec<Value> = self
            .sectors
            .iter()
            .map(|s| {
                let mut phi1 = Map::new();
                for (g, c) in self.layout.generators.iter().zip(&s.sector.coordinates) {
                    let v = match c.len() {
                        0 => json!(0),
                        1 => json!(crate::zlinalg::small(&c[0])),
                        _ => ints(c),
                    };
                    phi1.insert(g.clone(), v);
                }
                let mut o = Map::new();
                o.insert("phi1".into(), Value::Object(phi1));
                o.insert("based_group".into(), json!(s.based_group().factors_i64()));
                o.insert("representatives".into(), s.representatives.iter().map(|r| ints(r)).collect());
                o.insert("free_directions".into(), s.free_directions.iter().map(|r| ints(r)).collect());
                match &s.free {
                    None => {}
                    Some(FreeClasses::Orbits(orbits)) => {
                        o.insert("free_orbits".into(), json!(orbits));
                    }
                    Some(FreeClasses::Finite(reps)) => {
                        o.insert("free_classes".into(), reps.iter().map(|r| ints(r)).collect());
                    }
                    Some(FreeClasses::Family { base, direction, min }) => {
                        o.insert(
                            "free_family".into(),
                            json!({
                                "base": smallvec(base),
                                "direction": smallvec(direction),
                                "min": min.as_ref().map(crate::zlinalg::small),
                            }),
                        );
                    }
                    Some(FreeClasses::Unsupported(why)) => {
                        o.insert("free_unsupported".into(), json!(why));
                    }
                }
                Value::Object(o)
            })
            .collect();
        json!({ "coordinates": self.display_names(), "sectors": sectors })
    }
}

fn fmt_vec(v: &[BigInt]) -> String {
    let parts: Vec<String> = v.iter().map(|x| x.to_string()).collect();
    format!("[{}]", parts.join(","))
}

impl fmt::Display for SectorClassification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "coordinates: ({})", self.display_names().join(", "))?;
        for s in &self.sectors {
            let labels: Vec<String> = self
                .layout
                .generators
                .iter()
                .zip(&s.sector.coordinates)
                .map(|(g, c)| match c.len() {
                    0 => format!("{g}=0"),
                    1 => format!("{g}={}", c[0]),
                    _ => format!("{g}={}", fmt_vec(c)),
                })
                .collect();
            write!(f, "sector ({}): based {}", labels.join(", "), s.based_group())?;
            let reps: Vec<String> = s.representatives.iter().map(|r| fmt_vec(r)).collect();
            write!(f, "; representatives {}", reps.join(" "))?;
            for d in &s.free_directions {
                write!(f, " + Z{}", fmt_vec(d))?;
            }
            match &s.free {
                None => {}
                Some(FreeClasses::Orbits(orbits)) => {
                    let parts: Vec<String> = orbits
                        .iter()
                        .map(|o| {
                            let members: Vec<String> = o.iter().map(|&i| fmt_vec(&s.representatives[i])).collect();
                            format!("{{{}}}", members.join(" "))
                        })
                        .collect();
                    write!(f, "; free {}", parts.join(" "))?;
                }
                Some(FreeClasses::Finite(reps)) => {
                    let parts: Vec<String> = reps.iter().map(|r| fmt_vec(r)).collect();
                    write!(f, "; free {}", parts.join(" "))?;
                }
                Some(FreeClasses::Family { base, direction, min }) => {
                    write!(f, "; free {} + n{}", fmt_vec(base), fmt_vec(direction))?;
                    match min {
                        Some(m) => write!(f, ", n >= {m}")?,
                        None => write!(f, ", n in Z")?,
                    }
                }
                Some(FreeClasses::Unsupported(why)) => write!(f, "; free classes unsupported ({why})")?,
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

/// Based classes per sector.
pub fn classify_based(m: &CWComplex, x: &ModuleXMod) -> Result<SectorClassification, ClassifyError> {
    require_dim2(m)?;
    let layout = Layout::new(m, x);
    let sectors = pi1_sectors(m, x)?;
    let mut lattices = Vec::new();
    for (i, s) in sectors.iter().enumerate() {
        lattices.push(hom_lattice(m, x, s).ok_or(ClassifyError::EmptySector(i))?);
    }
    let directions = lattices.first().map(|l| l.basis.clone()).unwrap_or_default();
    let display = display_coordinates(&directions, layout.len());
    let mut results = Vec::new();
    for (sector, homs) in sectors.into_iter().zip(lattices) {
        let homotopies = homotopy_sublattice(m, x, &sector);
        let shown = AffineLattice::new(project(&homs.base, &display), &project_all(&homs.basis, &display));
        let quotient = quotient_with_representatives(&shown, &project_all(&homotopies, &display))?;
        results.push(SectorResult {
            representatives: quotient.torsion_representatives(),
            free_directions: quotient.free_directions(),
            sector,
            homs,
            homotopies,
            quotient,
            free: None,
        });
    }
    Ok(SectorClassification { layout, display, sectors: results })
}

/// Based classes plus their orbits under π₁X.
pub fn classify_free(m: &CWComplex, x: &ModuleXMod) -> Result<SectorClassification, ClassifyError> {
    let mut c = classify_based(m, x)?;
    let actions: Vec<IntMatrix> = (0..x.k()).map(|i| x.rho(&crate::xmod::unit_vector(x.k(), i))).collect();
    for i in 0..c.sectors.len() {
        let free = free_classes(&c, &c.sectors[i], &actions);
        c.sectors[i].free = Some(free);
    }
    Ok(c)
}

/// Applies `φ₂ ↦ ρ·φ₂` (φ₁ fixed) to a display vector and canonicalizes.
fn act(c: &SectorClassification, s: &SectorResult, rho: &IntMatrix, shown: &[BigInt]) -> Vec<BigInt> {
    let display = &c.display;
    let base = project(&s.homs.base, display);
    let cols = project_all(&s.homs.basis, display);
    let diff: Vec<BigInt> = shown.iter().zip(&base).map(|(a, b)| a - b).collect();
    let coeffs = if cols.is_empty() {
        Vec::new()
    } else {
        let mat = IntMatrix::from_columns(&cols, display.len()).expect("uniform length");
        solve(&mat, &diff).expect("display vector lies in the lattice").particular
    };
    let mut full = s.homs.base.clone();
    for (b, k) in s.homs.basis.iter().zip(&coeffs) {
        for (x, bx) in full.iter_mut().zip(b) {
            *x += k * bx;
        }
    }
    for t in 0..c.layout.cells.len() {
        let range = c.layout.phi2(t);
        let image = rho.mul_vec(&full[range.clone()]);
        full.splice(range, image);
    }
    s.quotient.canonical(&project(&full, display))
}

fn free_classes(c: &SectorClassification, s: &SectorResult, actions: &[IntMatrix]) -> FreeClasses {
    let group = s.based_group();
    if group.is_finite() {
        let reps = &s.representatives;
        let mut parent: Vec<usize> = (0..reps.len()).collect();
        fn find(p: &mut [usize], i: usize) -> usize {
            let mut r = i;
            while p[r] != r {
                r = p[r];
            }
            p[i] = r;
            r
        }
        for rho in actions {
            for i in 0..reps.len() {
                let j = reps.binary_search(&act(c, s, rho, &reps[i])).expect("action preserves the sector");
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                parent[a.max(b)] = a.min(b);
            }
        }
        let mut orbits: Vec<Vec<usize>> = Vec::new();
        let mut root_of = std::collections::BTreeMap::new();
        for i in 0..reps.len() {
            let r = find(&mut parent, i);
            let slot = *root_of.entry(r).or_insert_with(|| {
                orbits.push(Vec::new());
                orbits.len() - 1
            });
            orbits[slot].push(i);
        }
        return FreeClasses::Orbits(orbits);
    }
    if group.invariant_factors().len() != 1 {
        return FreeClasses::Unsupported(format!("based group {group} is neither finite nor Z"));
    }
    // n ↦ εn + c on the single free coordinate
    let q = &s.quotient;
    let at = |n: i64| q.element(&ClassCoordinates { torsion: vec![], free: vec![big(n)] });
    let coord = |v: &[BigInt]| q.coordinates(v).expect("image lies in the lattice").free[0].clone();
    let mut translation = BigInt::zero();
    let mut reflection: Option<BigInt> = None;
    for rho in actions {
        let c0 = coord(&act(c, s, rho, &at(0)));
        let eps = coord(&act(c, s, rho, &at(1))) - &c0;
        if eps.is_one() {
            translation = translation.gcd(&c0);
        } else {
            match &reflection {
                None => reflection = Some(c0),
                Some(r) => translation = translation.gcd(&(&c0 - r)),
            }
        }
    }
    let base = at(0);
    let direction: Vec<BigInt> = at(1).iter().zip(&base).map(|(a, b)| a - b).collect();
    match (translation.is_zero(), reflection) {
        (true, None) => FreeClasses::Family { base, direction, min: None },
        (true, Some(r)) => {
            let min = r.div_ceil(&big(2));
            FreeClasses::Family { base, direction, min: Some(min) }
        }
        (false, r) => {
            let m = translation.abs();
            let mut seen = BTreeSet::new();
            let mut out = Vec::new();
            let mut n = BigInt::zero();
            while n < m {
                let partner = match &r {
                    Some(r) => (r - &n).mod_floor(&m),
                    None => n.clone(),
                };
                if !seen.contains(&partner) {
                    out.push(at_big(q, &n));
                }
                seen.insert(n.clone());
                n += 1;
            }
            FreeClasses::Finite(out)
        }
    }
}

fn at_big(q: &CosetQuotient, n: &BigInt) -> Vec<BigInt> {
    q.element(&ClassCoordinates { torsion: vec![], free: vec![n.clone()] })
}

/// Maps from a wedge of circles: based classes are tuples of group elements,
/// free classes their orbits under simultaneous conjugation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dim1Classification {
    pub based: Vec<Vec<usize>>,
    /// Lexicographically least member of each conjugation orbit.
    pub free: Vec<Vec<usize>>,
}

pub fn classify_dim1(n: usize, g: &FiniteGroup) -> Dim1Classification {
    let order = g.order();
    let mut based = vec![Vec::new()];
    for _ in 0..n {
        based = based
            .into_iter()
            .flat_map(|t: Vec<usize>| {
                (0..order).map(move |x| {
                    let mut t = t.clone();
                    t.push(x);
                    t
                })
            })
            .collect();
    }
    let free: BTreeSet<Vec<usize>> = based
        .iter()
        .map(|t| {
            (0..order)
                .map(|c| t.iter().map(|&x| g.mul(g.mul(c, x), g.inv(c))).collect::<Vec<_>>())
                .min()
                .expect("nonempty group")
        })
        .collect();
    Dim1Classification { based, free: free.into_iter().collect() }
}

/// Closed form for `[S¹∨S², X]`: based classes `π₂X × π₁X`, free classes the
/// π₁X-orbits, where π₁X acts on π₂X and trivially on itself.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WedgeFormula {
    pub pi2: AbelianGroup,
    pub pi1: AbelianGroup,
    /// Action of each generator of G on π₂X, in the kernel basis.
    pub pi2_action: Vec<IntMatrix>,
}

impl WedgeFormula {
    /// Whether π₁X acts trivially on π₂X.
    pub fn trivial_action(&self) -> bool {
        self.pi2_action.iter().all(|m| *m == IntMatrix::identity(m.rows()))
    }

    /// Description of the based set, e.g. `Z x Z_2`.
    pub fn based_description(&self) -> String {
        match (self.pi2.is_trivial(), self.pi1.is_trivial()) {
            (_, true) => self.pi2.to_string(),
            (true, false) => self.pi1.to_string(),
            _ => format!("{} x {}", self.pi2, self.pi1),
        }
    }
}

pub fn wedge_formula(x: &ModuleXMod) -> WedgeFormula {
    let basis = x.pi2_basis();
    WedgeFormula {
        pi2: AbelianGroup::free(basis.cols()),
        pi1: x.pi1().group().clone(),
        pi2_action: (0..x.k()).map(|i| x.pi2_action(&crate::xmod::unit_vector(x.k(), i))).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complexes::catalog;
    use crate::xmod::target_catalog;
    use crate::zlinalg::bigvec;

    fn rp2() -> ModuleXMod {
        target_catalog("rp2").unwrap()
    }

    fn reps(s: &SectorResult) -> Vec<Vec<i64>> {
        s.representatives.iter().map(|r| smallvec(r)).collect()
    }

    #[test]
    fn torus_sectors_and_groups() {
        let t2 = catalog("torus2", &[]).unwrap();
        let c = classify_free(&t2, &rp2()).unwrap();
        assert_eq!(c.display_names(), vec!["phi1(a)", "phi1(b)", "phi2(t)_0"]);
        let labels: Vec<Vec<i64>> = c.sectors.iter().map(|s| s.sector.coordinates.iter().map(|v| smallvec(v)[0]).collect()).collect();
        assert_eq!(labels, vec![vec![0, 0], vec![1, 0], vec![0, 1], vec![1, 1]]);
        let groups: Vec<Vec<i64>> = c.based_groups().iter().map(|g| g.factors_i64()).collect();
        assert_eq!(groups, vec![vec![0], vec![2], vec![2], vec![2]]);
        assert_eq!(reps(&c.sectors[1]), vec![vec![1, 0, 0], vec![1, 0, 1]]);
        assert_eq!(
            c.sectors[0].free,
            Some(FreeClasses::Family { base: bigvec(&[0, 0, 0]), direction: bigvec(&[0, 0, 1]), min: Some(big(0)) })
        );
        assert_eq!(c.sectors[3].free, Some(FreeClasses::Orbits(vec![vec![0], vec![1]])));
    }

    #[test]
    fn torus_homotopy_membership() {
        let t2 = catalog("torus2", &[]).unwrap();
        let c = classify_based(&t2, &rp2()).unwrap();
        let hom = |a: i64, b: i64, t0: i64| XModHom { phi1: vec![bigvec(&[a]), bigvec(&[b])], phi2: vec![bigvec(&[t0, -t0])] };
        assert!(hom(2, 0, 5).is_homomorphism(&t2, &rp2()));
        assert!(c.same_class(&hom(2, 0, 3), &hom(0, 0, 3)));
        assert!(!c.same_class(&hom(0, 0, 3), &hom(0, 0, 4)));
        assert!(!c.same_class(&hom(1, 0, 3), &hom(0, 0, 3)));
    }

    #[test]
    fn rp2_self_maps() {
        let m = catalog("rp2", &[]).unwrap();
        let c = classify_free(&m, &rp2()).unwrap();
        assert_eq!(c.display_names(), vec!["phi1(a)", "phi2(t)_0"]);
        assert_eq!(c.based_groups().iter().map(|g| g.factors_i64()).collect::<Vec<_>>(), vec![vec![2], vec![0]]);
        assert_eq!(reps(&c.sectors[0]), vec![vec![0, 0], vec![0, 1]]);
        assert_eq!(c.sectors[0].free, Some(FreeClasses::Orbits(vec![vec![0], vec![1]])));
        match &c.sectors[1].free {
            Some(FreeClasses::Family { base, direction, min }) => {
                assert_eq!(smallvec(direction).iter().map(|x| x.abs()).collect::<Vec<_>>(), vec![0, 1]);
                assert_eq!(smallvec(base)[0], 1);
                assert!(min.is_some());
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn torus_knot_sectors() {
        let m = catalog("torus_knot", &[2, 3]).unwrap();
        let c = classify_free(&m, &rp2()).unwrap();
        let total: usize = c.sectors.iter().map(|s| s.free_count().unwrap()).sum();
        assert_eq!(total, 3);
        let m = catalog("torus_knot", &[3, 2]).unwrap();
        let s = pi1_sectors(&m, &rp2()).unwrap();
        let labels: Vec<Vec<i64>> = s.iter().map(|s| s.coordinates.iter().map(|v| smallvec(v)[0]).collect()).collect();
        assert_eq!(labels, vec![vec![0, 0], vec![0, 1]]);
    }

    #[test]
    fn sphere_target_has_one_sector() {
        let s2 = target_catalog("sphere2").unwrap();
        for name in ["torus2", "rp2", "s1_wedge_s2"] {
            let m = catalog(name, &[]).unwrap();
            assert_eq!(pi1_sectors(&m, &s2).unwrap().len(), 1);
        }
        let m = catalog("torus3", &[]).unwrap();
        assert!(matches!(classify_based(&m, &s2), Err(ClassifyError::Dimension { .. })));
        let infinite = target_catalog("trivial:1,1").unwrap();
        assert!(matches!(pi1_sectors(&catalog("torus2", &[]).unwrap(), &infinite), Err(ClassifyError::UnsupportedTarget(_))));
    }

    #[test]
    fn dim1_counts() {
        let s3 = FiniteGroup::dihedral(3);
        let c = classify_dim1(1, &s3);
        assert_eq!((c.based.len(), c.free.len()), (6, 3));
        let c = classify_dim1(2, &FiniteGroup::cyclic(2));
        assert_eq!((c.based.len(), c.free.len()), (4, 4));
        let c = classify_dim1(1, &FiniteGroup::cyclic(1));
        assert_eq!((c.based.len(), c.free.len()), (1, 1));
    }

    #[test]
    fn wedge_closed_form() {
        let w = wedge_formula(&rp2());
        assert_eq!(w.based_description(), "Z x Z_2");
        assert!(!w.trivial_action());
        assert_eq!(wedge_formula(&target_catalog("sphere2").unwrap()).based_description(), "Z");
        assert_eq!(wedge_formula(&target_catalog("trivial:1,0").unwrap()).based_description(), "Z");
        let m = catalog("s1_wedge_s2", &[]).unwrap();
        let c = classify_free(&m, &rp2()).unwrap();
        assert_eq!(c.sectors.len(), 2);
        for s in &c.sectors {
            assert_eq!(s.based_group(), &w.pi2);
            assert!(matches!(s.free, Some(FreeClasses::Family { min: Some(_), .. })));
        }
    }
}
