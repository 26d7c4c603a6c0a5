//! Cellular cohomology with local coefficients, computed from Fox derivatives,
//! and the classifier for targets whose only homotopy groups are π₁ and π₃.

use num_bigint::BigInt;
use num_traits::Zero;
use thiserror::Error;

use crate::classify2d::Sector;
use crate::complexes::{CWComplex, ComplexError, Pi1Labeling};
use crate::words::{fox_derivative, GroupRingElement, Word};
use crate::xmod::{triad_derivation_image, unit_vector, FiniteGroup, ModuleXMod};
use crate::zlinalg::{big, quotient, solve, AbelianGroup, IntMatrix};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CohomologyError {
    #[error("a π₁ labeling is required for complexes with 3-cells")]
    MissingLabeling,
    #[error("coefficient action does not kill the relator of 2-cell `{0}`")]
    NotARepresentation(String),
    #[error("expected {expected} action matrices, got {got}")]
    Shape { expected: usize, got: usize },
    #[error(transparent)]
    Complex(#[from] ComplexError),
}

/// `ℤʳ` as a module over the free group on M's generators: `ρ(φ₁(a))` per generator.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoefficientModule {
    rank: usize,
    action: Vec<IntMatrix>,
    inverse: Vec<IntMatrix>,
}

impl CoefficientModule {
    /// Panics if a matrix is not invertible over ℤ.
    pub fn new(rank: usize, action: Vec<IntMatrix>) -> Self {
        let inverse = action.iter().map(|m| m.inverse().expect("coefficient action must be invertible")).collect();
        CoefficientModule { rank, action, inverse }
    }

    pub fn trivial(rank: usize, generators: usize) -> Self {
        CoefficientModule::new(rank, vec![IntMatrix::identity(rank); generators])
    }

    /// π₂X = ker ∂ with the action pulled back along a sector of `M → X`.
    pub fn from_sector(x: &ModuleXMod, sector: &Sector) -> Self {
        let rank = x.pi2_basis().cols();
        CoefficientModule::new(rank, sector.labels.iter().map(|l| x.pi2_action(l)).collect())
    }

    /// A finite π₁X acting through `action[g]`, pulled back along generator images.
    pub fn from_group(action: &[IntMatrix], images: &[usize], rank: usize) -> Self {
        CoefficientModule::new(rank, images.iter().map(|&g| action[g].clone()).collect())
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn action(&self) -> &[IntMatrix] {
        &self.action
    }

    pub fn evaluate(&self, w: &Word) -> IntMatrix {
        w.evaluate(
            IntMatrix::identity(self.rank),
            |g, e| if e >= 0 { self.action[g].pow(e as u64) } else { self.inverse[g].pow(e.unsigned_abs()) },
            |a, b| a.mul(b),
        )
    }

    pub fn evaluate_ring(&self, e: &GroupRingElement) -> IntMatrix {
        let mut out = IntMatrix::zeros(self.rank, self.rank);
        for (w, c) in e.terms() {
            out = out.add(&self.evaluate(w).scale(&big(c)));
        }
        out
    }

    /// Whether every 2-cell relator acts trivially, i.e. the action factors through π₁M.
    pub fn check(&self, m: &CWComplex) -> Result<(), CohomologyError> {
        if self.action.len() != m.generators().len() {
            return Err(CohomologyError::Shape { expected: m.generators().len(), got: self.action.len() });
        }
        let id = IntMatrix::identity(self.rank);
        for t in m.two_cells() {
            if self.evaluate(&t.attach) != id {
                return Err(CohomologyError::NotARepresentation(t.name.clone()));
            }
        }
        Ok(())
    }
}

/// Cellular cochains `C⁰ → C¹ → C² → C³` with local coefficients.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CochainComplex {
    pub rank: usize,
    pub d0: IntMatrix,
    pub d1: IntMatrix,
    pub d2: IntMatrix,
}

pub fn build_complex(
    m: &CWComplex,
    coeffs: &CoefficientModule,
    labeling: Option<&Pi1Labeling>,
) -> Result<CochainComplex, CohomologyError> {
    coeffs.check(m)?;
    let r = coeffs.rank();
    let (n1, n2, n3) = (m.generators().len(), m.two_cells().len(), m.three_cells().len());
    let id = IntMatrix::identity(r);
    let mut d0 = IntMatrix::zeros(n1 * r, r);
    for (a, rho) in coeffs.action().iter().enumerate() {
        d0.set_block(a * r, 0, &rho.sub(&id));
    }
    let mut d1 = IntMatrix::zeros(n2 * r, n1 * r);
    for (t, cell) in m.two_cells().iter().enumerate() {
        for a in 0..n1 {
            d1.set_block(t * r, a * r, &coeffs.evaluate_ring(&fox_derivative(&cell.attach, a)));
        }
    }
    let mut d2 = IntMatrix::zeros(n3 * r, n2 * r);
    if n3 > 0 {
        let labeling = labeling.ok_or(CohomologyError::MissingLabeling)?;
        for (x, cell) in m.three_cells().iter().enumerate() {
            let image = triad_derivation_image(m, &cell.attach, labeling)?;
            for (t, e) in image.iter().enumerate() {
                d2.set_block(x * r, t * r, &coeffs.evaluate_ring(e));
            }
        }
    }
    Ok(CochainComplex { rank: r, d0, d1, d2 })
}

impl CochainComplex {
    fn differential(&self, n: usize) -> Option<&IntMatrix> {
        match n {
            0 => Some(&self.d0),
            1 => Some(&self.d1),
            2 => Some(&self.d2),
            _ => None,
        }
    }

    fn cochain_dim(&self, n: usize) -> usize {
        match n {
            0 => self.d0.cols(),
            1 => self.d1.cols(),
            2 => self.d2.cols(),
            3 => self.d2.rows(),
            _ => 0,
        }
    }

    /// `dⁿ⁺¹ ∘ dⁿ = 0` at both stages.
    pub fn is_complex(&self) -> bool {
        self.d1.mul(&self.d0).is_zero() && self.d2.mul(&self.d1).is_zero()
    }

    /// `Hⁿ = ker dⁿ / im dⁿ⁻¹` for `0 ≤ n ≤ 3`.
    pub fn cohomology(&self, n: usize) -> AbelianGroup {
        let dim = self.cochain_dim(n);
        let kernel: Vec<Vec<BigInt>> = match self.differential(n) {
            Some(d) if d.rows() > 0 => solve(d, &vec![BigInt::zero(); d.rows()]).expect("homogeneous").kernel,
            _ => (0..dim).map(|i| unit_vector(dim, i)).collect(),
        };
        if kernel.is_empty() {
            return AbelianGroup::trivial();
        }
        let k = IntMatrix::from_columns(&kernel, dim).expect("kernel columns");
        let image: Vec<Vec<BigInt>> = match n.checked_sub(1).and_then(|p| self.differential(p)) {
            Some(d) => (0..d.cols())
                .map(|j| solve(&k, &d.column(j)).expect("image lies in the kernel").particular)
                .collect(),
            None => Vec::new(),
        };
        if image.is_empty() {
            return AbelianGroup::free(kernel.len());
        }
        quotient(kernel.len(), &IntMatrix::from_columns(&image, kernel.len()).expect("image columns"))
    }
}

/// `H²_φ₁(M; π₂X)` for a 2-complex: the cokernel of `d¹`.
pub fn twisted_second_cohomology(m: &CWComplex, coeffs: &CoefficientModule) -> Result<AbelianGroup, CohomologyError> {
    let c = build_complex(&m.two_skeleton(), coeffs, None)?;
    Ok(c.cohomology(2))
}

/// A target with finite π₁, π₂ = 0, and π₃ = ℤʳ acted on by π₁.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpecialTarget {
    pub name: String,
    pub pi1: FiniteGroup,
    pub rank: usize,
    /// Action matrix of every element of π₁.
    pub action: Vec<IntMatrix>,
}

impl SpecialTarget {
    /// Lens space `L(p,q)`: π₁ = ℤ_p acting trivially on π₃ = ℤ (orientable).
    pub fn lens(p: usize, q: usize) -> Self {
        SpecialTarget {
            name: format!("lens:{p},{q}"),
            pi1: FiniteGroup::cyclic(p),
            rank: 1,
            action: vec![IntMatrix::identity(1); p],
        }
    }

    pub fn so3() -> Self {
        SpecialTarget { name: "so3".into(), ..SpecialTarget::lens(2, 1) }
    }

    /// Simply connected with π₃ = ℤ.
    pub fn three_sphere() -> Self {
        SpecialTarget { name: "sphere3".into(), ..SpecialTarget::lens(1, 1) }
    }

    pub fn parse(spec: &str) -> Option<Self> {
        match spec {
            "so3" => Some(SpecialTarget::so3()),
            "sphere3" => Some(SpecialTarget::three_sphere()),
            _ => {
                let (p, q) = spec.strip_prefix("lens:")?.split_once(',')?;
                let (p, q) = (p.trim().parse::<usize>().ok()?, q.trim().parse::<usize>().ok()?);
                (p >= 1).then(|| SpecialTarget::lens(p, q))
            }
        }
    }

    fn acts_trivially(&self) -> bool {
        self.pi1.is_abelian() && self.action.iter().all(|m| *m == IntMatrix::identity(self.rank))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpecialSector {
    /// Image in π₁X of each generator of M.
    pub images: Vec<usize>,
    pub group: AbelianGroup,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpecialClassification {
    pub sectors: Vec<SpecialSector>,
    /// Whether free classes coincide with based ones (abelian π₁X acting trivially on π₃).
    pub free_equals_based: bool,
}

impl SpecialClassification {
    /// The union written as `(Z_2)^3 x Z`: number of sectors times the common group.
    pub fn description(&self) -> String {
        let first = match self.sectors.first() {
            Some(s) => &s.group,
            None => return "empty".into(),
        };
        if self.sectors.iter().all(|s| &s.group == first) {
            let n = self.sectors.len();
            let count = match small_power(n) {
                Some((b, e)) if e > 1 => format!("(Z_{b})^{e}"),
                _ => format!("{n} copies of"),
            };
            if n == 1 {
                first.to_string()
            } else if count.ends_with("of") {
                format!("{count} {first}")
            } else {
                format!("{count} x {first}")
            }
        } else {
            let parts: Vec<String> = self.sectors.iter().map(|s| s.group.to_string()).collect();
            parts.join(" u ")
        }
    }
}

/// Writes `n = bᵉ` with the smallest base, when `n > 1`.
fn small_power(n: usize) -> Option<(usize, u32)> {
    (2..=n).find_map(|b| {
        let mut x = 1;
        let mut e = 0;
        while x < n {
            x *= b;
            e += 1;
        }
        (x == n).then_some((b, e))
    })
}

/// `[M, X]₀ = ⋃_φ₁ H³_φ₁(M; π₃X)` for a 3-complex M.
pub fn special_case_classify(
    m: &CWComplex,
    labeling: &Pi1Labeling,
    x: &SpecialTarget,
) -> Result<SpecialClassification, CohomologyError> {
    let n = m.generators().len();
    let order = x.pi1.order();
    let mut sectors = Vec::new();
    let mut images = vec![0usize; n];
    loop {
        if m.two_cells().iter().all(|t| x.pi1.evaluate(&t.attach, &images) == 0) {
            let coeffs = CoefficientModule::from_group(&x.action, &images, x.rank);
            let c = build_complex(m, &coeffs, Some(labeling))?;
            sectors.push(SpecialSector { images: images.clone(), group: c.cohomology(3) });
        }
        let mut pos = 0;
        loop {
            if pos == n {
                return Ok(SpecialClassification { sectors, free_equals_based: x.acts_trivially() });
            }
            images[pos] += 1;
            if images[pos] < order {
                break;
            }
            images[pos] = 0;
            pos += 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classify2d::pi1_sectors;
    use crate::complexes::{catalog, CatalogSpace};
    use crate::xmod::target_catalog;

    fn sign(generators: usize, flips: &[bool]) -> CoefficientModule {
        assert_eq!(flips.len(), generators);
        CoefficientModule::new(
            1,
            flips.iter().map(|&f| IntMatrix::from_rows(&[vec![if f { -1 } else { 1 }]])).collect(),
        )
    }

    #[test]
    fn torus_groups() {
        let t2 = catalog("torus2", &[]).unwrap();
        let c = build_complex(&t2, &CoefficientModule::trivial(1, 2), None).unwrap();
        assert!(c.d1.is_zero());
        assert_eq!(c.cohomology(2).factors_i64(), vec![0]);
        assert_eq!(c.cohomology(1).factors_i64(), vec![0, 0]);
        assert_eq!(c.cohomology(0).factors_i64(), vec![0]);
        assert_eq!(twisted_second_cohomology(&t2, &sign(2, &[true, true])).unwrap().factors_i64(), vec![2]);
        assert_eq!(twisted_second_cohomology(&t2, &sign(2, &[false, true])).unwrap().factors_i64(), vec![2]);
    }

    #[test]
    fn klein_and_projective_plane() {
        let k = catalog("klein_bottle", &[]).unwrap();
        assert_eq!(twisted_second_cohomology(&k, &sign(2, &[true, true])).unwrap().factors_i64(), vec![0]);
        let rp2 = catalog("rp2", &[]).unwrap();
        assert_eq!(twisted_second_cohomology(&rp2, &sign(1, &[true])).unwrap().factors_i64(), vec![0]);
        assert_eq!(twisted_second_cohomology(&rp2, &CoefficientModule::trivial(1, 1)).unwrap().factors_i64(), vec![2]);
        let s2 = catalog("sphere2", &[]).unwrap();
        assert_eq!(twisted_second_cohomology(&s2, &CoefficientModule::trivial(1, 0)).unwrap().factors_i64(), vec![0]);
        for g in 1..=3 {
            let m = catalog("genus_surface", &[g]).unwrap();
            let t = CoefficientModule::trivial(1, 2 * g as usize);
            assert_eq!(twisted_second_cohomology(&m, &t).unwrap().factors_i64(), vec![0]);
        }
    }

    #[test]
    fn bad_coefficients_are_rejected() {
        let rp2 = catalog("rp2", &[]).unwrap();
        let twice = CoefficientModule::new(1, vec![IntMatrix::from_rows(&[vec![1]])]);
        assert!(build_complex(&rp2, &twice, None).is_ok());
        let wrong = CoefficientModule::new(2, vec![IntMatrix::from_rows(&[vec![0, 1], vec![1, 1]])]);
        assert!(matches!(build_complex(&rp2, &wrong, None), Err(CohomologyError::NotARepresentation(_))));
        let t3 = catalog("torus3", &[]).unwrap();
        assert!(matches!(
            build_complex(&t3, &CoefficientModule::trivial(1, 3), None),
            Err(CohomologyError::MissingLabeling)
        ));
    }

    #[test]
    fn differentials_compose_to_zero() {
        let x = target_catalog("rp2").unwrap();
        for space in CatalogSpace::dimension_two_samples() {
            let m = space.complex();
            for s in pi1_sectors(&m, &x).unwrap() {
                let c = build_complex(&m, &CoefficientModule::from_sector(&x, &s), None).unwrap();
                assert!(c.is_complex(), "{}", space.name());
            }
        }
        for name in ["torus3", "s1_x_s2"] {
            let space = CatalogSpace::parse(name).unwrap();
            let m = space.complex();
            for flips in [[false, false, false], [true, false, true]] {
                let coeffs = sign(m.generators().len(), &flips[..m.generators().len()]);
                if coeffs.check(&m).is_ok() {
                    let c = build_complex(&m, &coeffs, Some(&space.labeling())).unwrap();
                    assert!(c.is_complex(), "{name}");
                }
            }
        }
    }

    #[test]
    fn three_dimensional_special_cases() {
        let space = CatalogSpace::parse("torus3").unwrap();
        let t3 = space.complex();
        let lab = space.labeling();
        let c = build_complex(&t3, &CoefficientModule::trivial(1, 3), Some(&lab)).unwrap();
        assert_eq!(c.cohomology(3).factors_i64(), vec![0]);
        assert_eq!(c.cohomology(2).factors_i64(), vec![0, 0, 0]);
        let r = special_case_classify(&t3, &lab, &SpecialTarget::lens(3, 1)).unwrap();
        assert_eq!(r.sectors.len(), 27);
        assert!(r.sectors.iter().all(|s| s.group.factors_i64() == vec![0]));
        assert!(r.free_equals_based);
        assert_eq!(r.description(), "(Z_3)^3 x Z");
        let so3 = special_case_classify(&t3, &lab, &SpecialTarget::so3()).unwrap();
        assert_eq!(so3.description(), "(Z_2)^3 x Z");
        let s3 = special_case_classify(&t3, &lab, &SpecialTarget::three_sphere()).unwrap();
        assert_eq!(s3.description(), "Z");
        assert_eq!(SpecialTarget::parse("lens:5,2").unwrap().pi1.order(), 5);
        assert!(SpecialTarget::parse("lens:0,1").is_none());
    }
}
