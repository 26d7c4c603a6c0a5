//! Exact integer linear algebra: Smith and Hermite normal forms, linear
//! Diophantine systems, and quotients of lattices.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LinalgError {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("sublattice generator {index} is not a direction of the lattice")]
    NotContained { index: usize },
    #[error("vector is not in the affine lattice")]
    NotInLattice,
}

pub fn big(x: i64) -> BigInt {
    BigInt::from(x)
}

pub fn bigvec(xs: &[i64]) -> Vec<BigInt> {
    xs.iter().map(|&x| BigInt::from(x)).collect()
}

/// Converts to `i64`, panicking on overflow (values here are small by construction).
pub fn small(x: &BigInt) -> i64 {
    x.to_i64().expect("integer does not fit in i64")
}

pub fn smallvec(xs: &[BigInt]) -> Vec<i64> {
    xs.iter().map(small).collect()
}

#[derive(Clone, PartialEq, Eq)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix { rows, cols, data: vec![BigInt::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = BigInt::one();
        }
        m
    }

    /// Builds from row vectors; `cols` is needed when there are no rows.
    pub fn from_rows_big(rows: Vec<Vec<BigInt>>, cols: usize) -> Result<Self, LinalgError> {
        let r = rows.len();
        let mut data = Vec::with_capacity(r * cols);
        for (i, row) in rows.into_iter().enumerate() {
            if row.len() != cols {
                return Err(LinalgError::Dimension(format!("row {i} has length {}, expected {cols}", row.len())));
            }
            data.extend(row);
        }
        Ok(IntMatrix { rows: r, cols, data })
    }

    /// Builds from `i64` rows; panics on ragged input.
    pub fn from_rows(rows: &[Vec<i64>]) -> Self {
        let cols = rows.first().map_or(0, Vec::len);
        Self::from_rows_big(rows.iter().map(|r| bigvec(r)).collect(), cols).expect("ragged matrix")
    }

    /// Builds from column vectors of length `rows`.
    pub fn from_columns(columns: &[Vec<BigInt>], rows: usize) -> Result<Self, LinalgError> {
        let mut m = Self::zeros(rows, columns.len());
        for (j, c) in columns.iter().enumerate() {
            if c.len() != rows {
                return Err(LinalgError::Dimension(format!("column {j} has length {}, expected {rows}", c.len())));
            }
            for (i, x) in c.iter().enumerate() {
                m.set(i, j, x.clone());
            }
        }
        Ok(m)
    }

    pub fn diagonal(entries: &[BigInt], rows: usize, cols: usize) -> Self {
        let mut m = Self::zeros(rows, cols);
        for (i, x) in entries.iter().enumerate() {
            m.set(i, i, x.clone());
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &BigInt {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, x: BigInt) {
        self.data[i * self.cols + j] = x;
    }

    pub fn row(&self, i: usize) -> Vec<BigInt> {
        self.data[i * self.cols..(i + 1) * self.cols].to_vec()
    }

    pub fn column(&self, j: usize) -> Vec<BigInt> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<BigInt>> {
        (0..self.rows).map(|i| self.row(i)).collect()
    }

    pub fn to_i64_rows(&self) -> Vec<Vec<i64>> {
        (0..self.rows).map(|i| smallvec(&self.row(i))).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j).clone());
            }
        }
        t
    }

    pub fn mul(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, other.rows, "matrix product dimension mismatch");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let v = out.get(i, j) + a * other.get(k, j);
                    out.set(i, j, v);
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[BigInt]) -> Vec<BigInt> {
        assert_eq!(self.cols, v.len(), "matrix-vector dimension mismatch");
        (0..self.rows)
            .map(|i| (0..self.cols).fold(BigInt::zero(), |acc, j| acc + self.get(i, j) * &v[j]))
            .collect()
    }

    pub fn add(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect();
        IntMatrix { rows: self.rows, cols: self.cols, data }
    }

    pub fn sub(&self, other: &IntMatrix) -> IntMatrix {
        self.add(&other.scale(&big(-1)))
    }

    pub fn scale(&self, k: &BigInt) -> IntMatrix {
        IntMatrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|x| x * k).collect() }
    }

    /// Places `block` with its top-left corner at `(r, c)`.
    pub fn set_block(&mut self, r: usize, c: usize, block: &IntMatrix) {
        for i in 0..block.rows {
            for j in 0..block.cols {
                self.set(r + i, c + j, block.get(i, j).clone());
            }
        }
    }

    pub fn hstack(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.rows, other.rows);
        let mut out = Self::zeros(self.rows, self.cols + other.cols);
        out.set_block(0, 0, self);
        out.set_block(0, self.cols, other);
        out
    }

    pub fn vstack(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, other.cols);
        let mut out = Self::zeros(self.rows + other.rows, self.cols);
        out.set_block(0, 0, self);
        out.set_block(self.rows, 0, other);
        out
    }

    pub fn pow(&self, k: u64) -> IntMatrix {
        assert_eq!(self.rows, self.cols);
        let mut out = Self::identity(self.rows);
        for _ in 0..k {
            out = out.mul(self);
        }
        out
    }

    /// Determinant by fraction-free (Bareiss) elimination.
    pub fn det(&self) -> BigInt {
        assert_eq!(self.rows, self.cols, "determinant of a non-square matrix");
        let n = self.rows;
        if n == 0 {
            return BigInt::one();
        }
        let mut a = self.to_rows();
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..n - 1 {
            if a[k][k].is_zero() {
                match (k + 1..n).find(|&i| !a[i][k].is_zero()) {
                    Some(i) => {
                        a.swap(i, k);
                        sign = -sign;
                    }
                    None => return BigInt::zero(),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    a[i][j] = (&a[i][j] * &a[k][k] - &a[i][k] * &a[k][j]) / &prev;
                }
            }
            prev = a[k][k].clone();
        }
        sign * &a[n - 1][n - 1]
    }

    /// Inverse of a unimodular matrix; `None` when `|det| ≠ 1`.
    pub fn inverse(&self) -> Option<IntMatrix> {
        if self.rows != self.cols {
            return None;
        }
        let d = smith_normal_form(self);
        if (0..self.rows).any(|i| !d.s.get(i, i).is_one()) {
            return None;
        }
        // A = U V, so A⁻¹ = V⁻¹ U⁻¹.
        Some(d.v_inv.mul(&d.u_inv))
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for j in 0..self.cols {
                self.data.swap(a * self.cols + j, b * self.cols + j);
            }
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a != b {
            for i in 0..self.rows {
                self.data.swap(i * self.cols + a, i * self.cols + b);
            }
        }
    }

    /// row[dst] += k · row[src]
    fn add_row(&mut self, dst: usize, src: usize, k: &BigInt) {
        for j in 0..self.cols {
            let v = self.get(dst, j) + k * self.get(src, j);
            self.set(dst, j, v);
        }
    }

    /// col[dst] += k · col[src]
    fn add_col(&mut self, dst: usize, src: usize, k: &BigInt) {
        for i in 0..self.rows {
            let v = self.get(i, dst) + k * self.get(i, src);
            self.set(i, dst, v);
        }
    }

    fn negate_row(&mut self, i: usize) {
        for j in 0..self.cols {
            let v = -self.get(i, j);
            self.set(i, j, v);
        }
    }
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for i in 0..self.rows {
            if i > 0 {
                f.write_str(",")?;
            }
            f.write_str("[")?;
            for j in 0..self.cols {
                if j > 0 {
                    f.write_str(",")?;
                }
                write!(f, "{}", self.get(i, j))?;
            }
            f.write_str("]")?;
        }
        f.write_str("]")
    }
}

/// `A = U · S · V` with `U`, `V` unimodular and `S` in Smith form.
/// The inverses are kept as well since solving needs them.
#[derive(Debug, Clone)]
pub struct SmithDecomposition {
    pub u: IntMatrix,
    pub s: IntMatrix,
    pub v: IntMatrix,
    pub u_inv: IntMatrix,
    pub v_inv: IntMatrix,
}

impl SmithDecomposition {
    pub fn diagonal(&self) -> Vec<BigInt> {
        (0..self.s.rows.min(self.s.cols)).map(|i| self.s.get(i, i).clone()).collect()
    }

    pub fn rank(&self) -> usize {
        self.diagonal().iter().filter(|d| !d.is_zero()).count()
    }
}

/// Tracks `W = P·A·Q` together with `P⁻¹` and `Q⁻¹`.
struct Reducer {
    w: IntMatrix,
    p: IntMatrix,
    p_inv: IntMatrix,
    q: IntMatrix,
    q_inv: IntMatrix,
}

impl Reducer {
    fn row_add(&mut self, dst: usize, src: usize, k: &BigInt) {
        self.w.add_row(dst, src, k);
        self.p.add_row(dst, src, k);
        self.p_inv.add_col(src, dst, &-k);
    }

    fn col_add(&mut self, dst: usize, src: usize, k: &BigInt) {
        self.w.add_col(dst, src, k);
        self.q.add_col(dst, src, k);
        self.q_inv.add_row(src, dst, &-k);
    }

    fn row_swap(&mut self, a: usize, b: usize) {
        self.w.swap_rows(a, b);
        self.p.swap_rows(a, b);
        self.p_inv.swap_cols(a, b);
    }

    fn col_swap(&mut self, a: usize, b: usize) {
        self.w.swap_cols(a, b);
        self.q.swap_cols(a, b);
        self.q_inv.swap_rows(a, b);
    }

    fn row_negate(&mut self, i: usize) {
        self.w.negate_row(i);
        self.p.negate_row(i);
        let n = self.p_inv.rows;
        for r in 0..n {
            let v = -self.p_inv.get(r, i);
            self.p_inv.set(r, i, v);
        }
    }

    /// Position of the smallest nonzero |entry| in the lower-right block from `t`.
    fn min_pivot(&self, t: usize) -> Option<(usize, usize)> {
        let mut best: Option<(usize, usize)> = None;
        for i in t..self.w.rows {
            for j in t..self.w.cols {
                let x = self.w.get(i, j);
                if x.is_zero() {
                    continue;
                }
                if best.is_none_or(|(bi, bj)| x.abs() < self.w.get(bi, bj).abs()) {
                    best = Some((i, j));
                }
            }
        }
        best
    }
}

pub fn smith_normal_form(a: &IntMatrix) -> SmithDecomposition {
    let (m, n) = (a.rows, a.cols);
    let mut r = Reducer {
        w: a.clone(),
        p: IntMatrix::identity(m),
        p_inv: IntMatrix::identity(m),
        q: IntMatrix::identity(n),
        q_inv: IntMatrix::identity(n),
    };
    for t in 0..m.min(n) {
        loop {
            let Some((pi, pj)) = r.min_pivot(t) else {
                return finish(r);
            };
            r.row_swap(t, pi);
            r.col_swap(t, pj);
            let pivot = r.w.get(t, t).clone();
            let mut clean = true;
            for i in t + 1..m {
                let q = r.w.get(i, t) / &pivot;
                if !q.is_zero() {
                    r.row_add(i, t, &-q);
                }
                clean &= r.w.get(i, t).is_zero();
            }
            for j in t + 1..n {
                let q = r.w.get(t, j) / &pivot;
                if !q.is_zero() {
                    r.col_add(j, t, &-q);
                }
                clean &= r.w.get(t, j).is_zero();
            }
            if !clean {
                continue;
            }
            let bad_row = (t + 1..m).find(|&i| (t + 1..n).any(|j| !r.w.get(i, j).is_multiple_of(&pivot)));
            match bad_row {
                Some(i) => r.row_add(t, i, &BigInt::one()),
                None => break,
            }
        }
        if r.w.get(t, t).is_negative() {
            r.row_negate(t);
        }
    }
    finish(r)
}

fn finish(r: Reducer) -> SmithDecomposition {
    SmithDecomposition { u: r.p_inv, s: r.w, v: r.q_inv, u_inv: r.p, v_inv: r.q }
}

/// Solution set of `A·x = b`: `particular + span(kernel)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Solution {
    pub particular: Vec<BigInt>,
    pub kernel: Vec<Vec<BigInt>>,
}

/// Integer solutions of `A·x = b`, or `None` if there are none.
/// The kernel basis is in Hermite form and the particular solution is
/// reduced against it, so the output does not depend on pivoting details.
pub fn solve(a: &IntMatrix, b: &[BigInt]) -> Option<Solution> {
    assert_eq!(a.rows, b.len(), "right-hand side length mismatch");
    let d = smith_normal_form(a);
    let c = d.u_inv.mul_vec(b);
    let diag = d.diagonal();
    let rank = d.rank();
    let mut y = vec![BigInt::zero(); a.cols];
    for i in 0..a.rows {
        if i < rank {
            let (q, rem) = c[i].div_rem(&diag[i]);
            if !rem.is_zero() {
                return None;
            }
            y[i] = q;
        } else if !c[i].is_zero() {
            return None;
        }
    }
    let x = d.v_inv.mul_vec(&y);
    let kernel = hermite_basis(&(rank..a.cols).map(|j| d.v_inv.column(j)).collect::<Vec<_>>(), a.cols);
    let particular = reduce_by_basis(&x, &kernel);
    Some(Solution { particular, kernel })
}

/// Row-style reduced Hermite basis of the lattice spanned by `gens`:
/// pivots strictly increasing, each pivot positive, entries above a pivot
/// reduced into `[0, pivot)`.
pub fn hermite_basis(gens: &[Vec<BigInt>], dim: usize) -> Vec<Vec<BigInt>> {
    let mut rest: Vec<Vec<BigInt>> = gens.iter().filter(|g| g.iter().any(|x| !x.is_zero())).cloned().collect();
    for g in &rest {
        assert_eq!(g.len(), dim, "generator of wrong length");
    }
    let mut basis: Vec<Vec<BigInt>> = Vec::new();
    let mut pivots = Vec::new();
    for col in 0..dim {
        loop {
            let nonzero: Vec<usize> = (0..rest.len()).filter(|&i| !rest[i][col].is_zero()).collect();
            if nonzero.len() <= 1 {
                if let Some(&i) = nonzero.first() {
                    let mut v = rest.swap_remove(i);
                    if v[col].is_negative() {
                        v.iter_mut().for_each(|x| *x = -&*x);
                    }
                    basis.push(v);
                    pivots.push(col);
                }
                break;
            }
            let &best = nonzero.iter().min_by_key(|&&i| rest[i][col].abs()).unwrap();
            let pv = rest[best].clone();
            for &i in &nonzero {
                if i != best {
                    let q = rest[i][col].div_floor(&pv[col]);
                    for (x, y) in rest[i].iter_mut().zip(&pv) {
                        *x -= &q * y;
                    }
                }
            }
        }
        rest.retain(|g| g.iter().any(|x| !x.is_zero()));
    }
    for k in 0..basis.len() {
        let (pk, hk) = (pivots[k], basis[k][pivots[k]].clone());
        for j in 0..k {
            let q = basis[j][pk].div_floor(&hk);
            if !q.is_zero() {
                let row = basis[k].clone();
                for (x, y) in basis[j].iter_mut().zip(&row) {
                    *x -= &q * y;
                }
            }
        }
    }
    basis
}

fn pivot_of(v: &[BigInt]) -> usize {
    v.iter().position(|x| !x.is_zero()).expect("zero basis vector")
}

/// Reduces `v` modulo a Hermite basis: each pivot coordinate ends in `[0, pivot)`.
pub fn reduce_by_basis(v: &[BigInt], basis: &[Vec<BigInt>]) -> Vec<BigInt> {
    let mut out = v.to_vec();
    for b in basis {
        let p = pivot_of(b);
        let q = out[p].div_floor(&b[p]);
        if !q.is_zero() {
            for (x, y) in out.iter_mut().zip(b) {
                *x -= &q * y;
            }
        }
    }
    out
}

/// Finitely generated abelian group in invariant-factor form:
/// factors `d₁ | d₂ | …` each ≥ 2, followed by zeros for ℤ summands.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct AbelianGroup {
    factors: Vec<BigInt>,
}

impl AbelianGroup {
    pub fn trivial() -> Self {
        AbelianGroup { factors: Vec::new() }
    }

    pub fn free(rank: usize) -> Self {
        AbelianGroup { factors: vec![BigInt::zero(); rank] }
    }

    /// Normalizes an arbitrary product of cyclic groups `ℤ/n₁ × ℤ/n₂ × …`.
    pub fn from_cyclic(orders: &[i64]) -> Self {
        let n = orders.len();
        let d = IntMatrix::diagonal(&bigvec(orders), n, n);
        quotient(n, &d)
    }

    pub fn invariant_factors(&self) -> &[BigInt] {
        &self.factors
    }

    pub fn factors_i64(&self) -> Vec<i64> {
        smallvec(&self.factors)
    }

    pub fn free_rank(&self) -> usize {
        self.factors.iter().filter(|d| d.is_zero()).count()
    }

    pub fn torsion(&self) -> Vec<BigInt> {
        self.factors.iter().filter(|d| !d.is_zero()).cloned().collect()
    }

    pub fn is_trivial(&self) -> bool {
        self.factors.is_empty()
    }

    pub fn is_finite(&self) -> bool {
        self.free_rank() == 0
    }

    pub fn order(&self) -> Option<BigInt> {
        self.is_finite().then(|| self.factors.iter().product())
    }
}

impl fmt::Display for AbelianGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.factors.is_empty() {
            return f.write_str("0");
        }
        for (i, d) in self.factors.iter().enumerate() {
            if i > 0 {
                f.write_str(" x ")?;
            }
            if d.is_zero() {
                f.write_str("Z")?;
            } else {
                write!(f, "Z_{d}")?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for AbelianGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// `ℤⁿ / span(columns of gens)`.
pub fn quotient(n: usize, gens: &IntMatrix) -> AbelianGroup {
    assert_eq!(gens.rows, n, "generator columns must have length n");
    let d = smith_normal_form(gens);
    let diag = d.diagonal();
    let mut torsion = Vec::new();
    let mut free = 0;
    for i in 0..n {
        match diag.get(i) {
            Some(x) if x.is_zero() => free += 1,
            Some(x) if x.is_one() => {}
            Some(x) => torsion.push(x.clone()),
            None => free += 1,
        }
    }
    torsion.extend(std::iter::repeat_n(BigInt::zero(), free));
    AbelianGroup { factors: torsion }
}

/// `base + span(basis)` with the basis in Hermite form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AffineLattice {
    pub base: Vec<BigInt>,
    pub basis: Vec<Vec<BigInt>>,
}

impl AffineLattice {
    pub fn new(base: Vec<BigInt>, generators: &[Vec<BigInt>]) -> Self {
        let basis = hermite_basis(generators, base.len());
        let base = reduce_by_basis(&base, &basis);
        AffineLattice { base, basis }
    }

    pub fn full(dim: usize) -> Self {
        let gens: Vec<Vec<BigInt>> = (0..dim)
            .map(|i| (0..dim).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }).collect())
            .collect();
        AffineLattice::new(vec![BigInt::zero(); dim], &gens)
    }

    pub fn dim(&self) -> usize {
        self.base.len()
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    /// Coordinates of a direction vector in the basis.
    pub fn direction_coordinates(&self, v: &[BigInt]) -> Option<Vec<BigInt>> {
        let cols = IntMatrix::from_columns(&self.basis, self.dim()).ok()?;
        solve(&cols, v).map(|s| s.particular)
    }

    pub fn contains(&self, v: &[BigInt]) -> bool {
        let diff: Vec<BigInt> = v.iter().zip(&self.base).map(|(a, b)| a - b).collect();
        self.direction_coordinates(&diff).is_some()
    }
}

/// Coordinates of a coset: residues on the torsion factors, integers on the free ones.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ClassCoordinates {
    pub torsion: Vec<BigInt>,
    pub free: Vec<BigInt>,
}

/// An affine lattice modulo a sublattice of its directions.
#[derive(Debug, Clone)]
pub struct CosetQuotient {
    lattice: AffineLattice,
    sub_hermite: Vec<Vec<BigInt>>,
    group: AbelianGroup,
    /// `P = U⁻¹` from the Smith form of the sublattice coordinates.
    to_smith: IntMatrix,
    from_smith: IntMatrix,
    diag: Vec<BigInt>,
    torsion_idx: Vec<usize>,
    free_idx: Vec<usize>,
}

pub fn quotient_with_representatives(lattice: &AffineLattice, sub: &[Vec<BigInt>]) -> Result<CosetQuotient, LinalgError> {
    let m = lattice.rank();
    let mut coords = Vec::with_capacity(sub.len());
    for (index, s) in sub.iter().enumerate() {
        if s.len() != lattice.dim() {
            return Err(LinalgError::Dimension(format!("sublattice generator {index} has wrong length")));
        }
        coords.push(lattice.direction_coordinates(s).ok_or(LinalgError::NotContained { index })?);
    }
    let c = IntMatrix::from_columns(&coords, m)?;
    let d = smith_normal_form(&c);
    let diag: Vec<BigInt> = (0..m).map(|i| if i < c.cols { d.s.get(i, i).clone() } else { BigInt::zero() }).collect();
    let torsion_idx: Vec<usize> = (0..m).filter(|&i| !diag[i].is_zero() && !diag[i].is_one()).collect();
    let free_idx: Vec<usize> = (0..m).filter(|&i| diag[i].is_zero()).collect();
    let group = quotient(m, &c);
    Ok(CosetQuotient {
        lattice: lattice.clone(),
        sub_hermite: hermite_basis(sub, lattice.dim()),
        group,
        to_smith: d.u_inv,
        from_smith: d.u,
        diag,
        torsion_idx,
        free_idx,
    })
}

impl CosetQuotient {
    pub fn group(&self) -> &AbelianGroup {
        &self.group
    }

    pub fn lattice(&self) -> &AffineLattice {
        &self.lattice
    }

    /// Lexicographically smallest coset member with pivot coordinates nonnegative.
    pub fn canonical(&self, v: &[BigInt]) -> Vec<BigInt> {
        reduce_by_basis(v, &self.sub_hermite)
    }

    pub fn same_class(&self, u: &[BigInt], v: &[BigInt]) -> Result<bool, LinalgError> {
        if !self.lattice.contains(u) || !self.lattice.contains(v) {
            return Err(LinalgError::NotInLattice);
        }
        Ok(self.canonical(u) == self.canonical(v))
    }

    pub fn coordinates(&self, v: &[BigInt]) -> Result<ClassCoordinates, LinalgError> {
        let diff: Vec<BigInt> = v.iter().zip(&self.lattice.base).map(|(a, b)| a - b).collect();
        let c = self.lattice.direction_coordinates(&diff).ok_or(LinalgError::NotInLattice)?;
        let y = self.to_smith.mul_vec(&c);
        Ok(ClassCoordinates {
            torsion: self.torsion_idx.iter().map(|&i| y[i].mod_floor(&self.diag[i])).collect(),
            free: self.free_idx.iter().map(|&i| y[i].clone()).collect(),
        })
    }

    /// Canonical vector of the class with the given coordinates.
    pub fn element(&self, coords: &ClassCoordinates) -> Vec<BigInt> {
        let mut y = vec![BigInt::zero(); self.lattice.rank()];
        for (&i, k) in self.torsion_idx.iter().zip(&coords.torsion) {
            y[i] = k.clone();
        }
        for (&i, k) in self.free_idx.iter().zip(&coords.free) {
            y[i] = k.clone();
        }
        let c = self.from_smith.mul_vec(&y);
        let mut v = self.lattice.base.clone();
        for (b, k) in self.lattice.basis.iter().zip(&c) {
            for (x, bx) in v.iter_mut().zip(b) {
                *x += k * bx;
            }
        }
        self.canonical(&v)
    }

    /// Canonical representatives of the classes with zero free coordinates, sorted.
    pub fn torsion_representatives(&self) -> Vec<Vec<BigInt>> {
        let orders: Vec<BigInt> = self.torsion_idx.iter().map(|&i| self.diag[i].clone()).collect();
        let free = vec![BigInt::zero(); self.free_idx.len()];
        let mut out = Vec::new();
        let mut k = vec![BigInt::zero(); orders.len()];
        loop {
            out.push(self.element(&ClassCoordinates { torsion: k.clone(), free: free.clone() }));
            let mut pos = 0;
            loop {
                if pos == k.len() {
                    out.sort();
                    return out;
                }
                k[pos] += 1;
                if k[pos] < orders[pos] {
                    break;
                }
                k[pos] = BigInt::zero();
                pos += 1;
            }
        }
    }

    /// One direction per ℤ factor, reduced and with a positive leading entry.
    pub fn free_directions(&self) -> Vec<Vec<BigInt>> {
        self.free_idx
            .iter()
            .map(|&i| {
                let c = self.from_smith.column(i);
                let mut v = vec![BigInt::zero(); self.lattice.dim()];
                for (b, k) in self.lattice.basis.iter().zip(&c) {
                    for (x, bx) in v.iter_mut().zip(b) {
                        *x += k * bx;
                    }
                }
                let v = reduce_by_basis(&v, &self.sub_hermite);
                match v.iter().find(|x| !x.is_zero()) {
                    Some(x) if x.is_negative() => {
                        reduce_by_basis(&v.iter().map(|x| -x).collect::<Vec<_>>(), &self.sub_hermite)
                    }
                    _ => v,
                }
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[Vec<i64>]) -> IntMatrix {
        IntMatrix::from_rows(rows)
    }

    fn check_decomposition(a: &IntMatrix) -> SmithDecomposition {
        let d = smith_normal_form(a);
        assert_eq!(d.u.mul(&d.s).mul(&d.v), *a);
        assert_eq!(d.u.mul(&d.u_inv), IntMatrix::identity(a.rows()));
        assert_eq!(d.v.mul(&d.v_inv), IntMatrix::identity(a.cols()));
        d
    }

    #[test]
    fn smith_examples() {
        let d = check_decomposition(&IntMatrix::identity(2));
        assert_eq!(d.s, IntMatrix::identity(2));
        // by hand: gcd of entries is 2, |det| = 8, so diag(2, 4)
        let d = check_decomposition(&m(&[vec![2, 4], vec![6, 8]]));
        assert_eq!(d.s, m(&[vec![2, 0], vec![0, 4]]));
        let d = check_decomposition(&IntMatrix::zeros(2, 3));
        assert!(d.s.is_zero());
        let d = check_decomposition(&IntMatrix::zeros(0, 3));
        assert_eq!(d.rank(), 0);
    }

    #[test]
    fn solve_examples() {
        assert!(solve(&m(&[vec![2]]), &bigvec(&[3])).is_none());
        let s = solve(&m(&[vec![2]]), &bigvec(&[4])).unwrap();
        assert_eq!(s.particular, bigvec(&[2]));
        assert!(s.kernel.is_empty());
        let s = solve(&m(&[vec![1, 1]]), &bigvec(&[0])).unwrap();
        assert_eq!(s.particular, bigvec(&[0, 0]));
        assert_eq!(s.kernel, vec![bigvec(&[1, -1])]);
    }

    #[test]
    fn quotient_examples() {
        assert_eq!(quotient(1, &m(&[vec![2]])), AbelianGroup::from_cyclic(&[2]));
        assert_eq!(quotient(2, &IntMatrix::zeros(2, 0)).factors_i64(), vec![0, 0]);
        let g = IntMatrix::from_columns(&[bigvec(&[2, 0]), bigvec(&[0, 4])], 2).unwrap();
        assert_eq!(quotient(2, &g).factors_i64(), vec![2, 4]);
        assert_eq!(AbelianGroup::from_cyclic(&[2, 3]).factors_i64(), vec![6]);
        assert_eq!(AbelianGroup::from_cyclic(&[1, 0, 4, 2]).factors_i64(), vec![2, 4, 0]);
        assert_eq!(AbelianGroup::from_cyclic(&[0, 2]).to_string(), "Z_2 x Z");
    }

    #[test]
    fn coset_examples() {
        let q = quotient_with_representatives(&AffineLattice::full(1), &[bigvec(&[2])]).unwrap();
        assert_eq!(q.group().factors_i64(), vec![2]);
        assert_eq!(q.torsion_representatives(), vec![bigvec(&[0]), bigvec(&[1])]);
        assert!(q.same_class(&bigvec(&[5]), &bigvec(&[-1])).unwrap());

        let q = quotient_with_representatives(&AffineLattice::full(2), &[]).unwrap();
        assert_eq!(q.group().factors_i64(), vec![0, 0]);
        assert_eq!(q.free_directions().len(), 2);

        let q = quotient_with_representatives(&AffineLattice::full(3), &[bigvec(&[2, 0, 0])]).unwrap();
        assert_eq!(q.group().factors_i64(), vec![2, 0, 0]);
        assert_eq!(q.torsion_representatives(), vec![bigvec(&[0, 0, 0]), bigvec(&[1, 0, 0])]);
        assert_eq!(q.canonical(&bigvec(&[7, -3, 4])), bigvec(&[1, -3, 4]));

        let even = AffineLattice::new(bigvec(&[0]), &[bigvec(&[2])]);
        assert_eq!(
            quotient_with_representatives(&even, &[bigvec(&[3])]).unwrap_err(),
            LinalgError::NotContained { index: 0 }
        );
    }

    #[test]
    fn determinant_and_inverse() {
        let a = m(&[vec![2, 1], vec![1, 1]]);
        assert_eq!(a.det(), big(1));
        assert_eq!(a.mul(&a.inverse().unwrap()), IntMatrix::identity(2));
        assert!(m(&[vec![2, 0], vec![0, 1]]).inverse().is_none());
        assert_eq!(m(&[vec![0, 1], vec![1, 0]]).det(), big(-1));
    }
}
