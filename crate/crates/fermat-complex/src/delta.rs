//! Finite 2-dimensional Δ-complexes with exact integer boundary operators.
//!
//! A complex stores its cell counts together with ordered face maps: every
//! 2-cell carries the triple (δ²₀, δ²₁, δ²₂) of its edges and every 1-cell the
//! pair (δ¹₀, δ¹₁) of its endpoints. The boundary operators use the fixed
//! convention ∂² = δ²₂ − δ²₁ + δ²₀ and ∂¹ = δ¹₁ − δ¹₀, so the boundary of an
//! edge is endpoint minus startpoint.

use num_bigint::BigInt;
use num_traits::{One, Zero};
use std::fmt;
use thiserror::Error;

/// Reference to a single cell: dimension (0, 1 or 2) plus index within it.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CellId {
    pub dim: u8,
    pub index: usize,
}

impl CellId {
    pub fn new(dim: u8, index: usize) -> Self {
        CellId { dim, index }
    }
}

impl fmt::Display for CellId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}-cell #{}", self.dim, self.index)
    }
}

#[derive(Error, Debug, PartialEq, Eq)]
pub enum DeltaError {
    #[error("boundary operator dimension must be 1 or 2, got {0}")]
    InvalidDimension(usize),
}

/// Optional display names for the cells of a complex, one per cell and
/// dimension, in index order.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CellLabels {
    pub vertices: Vec<String>,
    pub edges: Vec<String>,
    pub faces: Vec<String>,
}

/// One structural defect found by [`DeltaComplex::validate`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    /// A face map points outside the range of the next dimension down.
    FaceOutOfRange {
        cell: CellId,
        slot: usize,
        target: usize,
        limit: usize,
    },
    /// One of the three vertex-compatibility identities fails on a 2-cell:
    /// 0: δ¹₀(δ²₁X) = δ¹₀(δ²₂X), 1: δ¹₁(δ²₂X) = δ¹₀(δ²₀X),
    /// 2: δ¹₁(δ²₁X) = δ¹₁(δ²₀X).
    IncompatibleVertices {
        cell: CellId,
        identity: usize,
        left: usize,
        right: usize,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::FaceOutOfRange {
                cell,
                slot,
                target,
                limit,
            } => write!(
                f,
                "{cell}: face slot {slot} points at index {target}, but only {limit} cells exist below"
            ),
            Violation::IncompatibleVertices {
                cell,
                identity,
                left,
                right,
            } => write!(
                f,
                "{cell}: vertex identity {identity} fails (vertex {left} vs {right})"
            ),
        }
    }
}

/// Outcome of validating a complex; holds the first violation found, if any.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ValidationReport {
    pub violation: Option<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violation.is_none()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.violation {
            None => write!(f, "valid"),
            Some(v) => write!(f, "invalid: {v}"),
        }
    }
}

/// A finite Δ-complex of dimension at most 2.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DeltaComplex {
    n0: usize,
    face1: Vec<[usize; 2]>,
    face2: Vec<[usize; 3]>,
    labels: Option<CellLabels>,
}

impl DeltaComplex {
    /// Builds a complex from raw face maps. `face1[e] = [δ¹₀e, δ¹₁e]` and
    /// `face2[x] = [δ²₀x, δ²₁x, δ²₂x]`. No validation is performed here; call
    /// [`DeltaComplex::validate`] to check the Δ-complex identities.
    pub fn new(n0: usize, face1: Vec<[usize; 2]>, face2: Vec<[usize; 3]>) -> Self {
        DeltaComplex {
            n0,
            face1,
            face2,
            labels: None,
        }
    }

    pub fn with_labels(mut self, labels: CellLabels) -> Self {
        self.labels = Some(labels);
        self
    }

    /// The standard 2-simplex as a Δ-complex: vertices v₀v₁v₂, edges
    /// l₀ = [v₁v₂], l₁ = [v₀v₂], l₂ = [v₀v₁] and a single face.
    pub fn base_triangle() -> Self {
        DeltaComplex::new(3, vec![[1, 2], [0, 2], [0, 1]], vec![[0, 1, 2]]).with_labels(
            CellLabels {
                vertices: vec!["v0".into(), "v1".into(), "v2".into()],
                edges: vec!["l0".into(), "l1".into(), "l2".into()],
                faces: vec!["X".into()],
            },
        )
    }

    pub fn n0(&self) -> usize {
        self.n0
    }

    pub fn n1(&self) -> usize {
        self.face1.len()
    }

    pub fn n2(&self) -> usize {
        self.face2.len()
    }

    pub fn cell_count(&self, dim: usize) -> usize {
        match dim {
            0 => self.n0(),
            1 => self.n1(),
            2 => self.n2(),
            _ => 0,
        }
    }

    pub fn face1(&self) -> &[[usize; 2]] {
        &self.face1
    }

    pub fn face2(&self) -> &[[usize; 3]] {
        &self.face2
    }

    pub fn label(&self, cell: CellId) -> Option<&str> {
        let labels = self.labels.as_ref()?;
        let list = match cell.dim {
            0 => &labels.vertices,
            1 => &labels.edges,
            2 => &labels.faces,
            _ => return None,
        };
        list.get(cell.index).map(String::as_str)
    }

    /// Checks all face-map ranges and the three vertex-compatibility
    /// identities that make the ordered face maps a Δ-complex.
    pub fn validate(&self) -> ValidationReport {
        for (e, ends) in self.face1.iter().enumerate() {
            for (slot, &v) in ends.iter().enumerate() {
                if v >= self.n0 {
                    return ValidationReport {
                        violation: Some(Violation::FaceOutOfRange {
                            cell: CellId::new(1, e),
                            slot,
                            target: v,
                            limit: self.n0,
                        }),
                    };
                }
            }
        }
        let n1 = self.n1();
        for (x, edges) in self.face2.iter().enumerate() {
            for (slot, &e) in edges.iter().enumerate() {
                if e >= n1 {
                    return ValidationReport {
                        violation: Some(Violation::FaceOutOfRange {
                            cell: CellId::new(2, x),
                            slot,
                            target: e,
                            limit: n1,
                        }),
                    };
                }
            }
        }
        for (x, &[e0, e1, e2]) in self.face2.iter().enumerate() {
            let checks = [
                (self.face1[e1][0], self.face1[e2][0]),
                (self.face1[e2][1], self.face1[e0][0]),
                (self.face1[e1][1], self.face1[e0][1]),
            ];
            for (identity, (left, right)) in checks.into_iter().enumerate() {
                if left != right {
                    return ValidationReport {
                        violation: Some(Violation::IncompatibleVertices {
                            cell: CellId::new(2, x),
                            identity,
                            left,
                            right,
                        }),
                    };
                }
            }
        }
        ValidationReport { violation: None }
    }

    /// The boundary operator ∂_dim as an integer matrix mapping dim-chains to
    /// (dim−1)-chains: ∂² has shape n1 × n2, ∂¹ has shape n0 × n1. Repeated
    /// incidences accumulate, so entries may exceed ±1.
    pub fn boundary_matrix(&self, dim: usize) -> Result<IntegerMatrix, DeltaError> {
        match dim {
            1 => {
                let mut m = IntegerMatrix::zeros(self.n0(), self.n1());
                for (e, &[start, end]) in self.face1.iter().enumerate() {
                    m.add_to_entry(end, e, 1);
                    m.add_to_entry(start, e, -1);
                }
                Ok(m)
            }
            2 => {
                let mut m = IntegerMatrix::zeros(self.n1(), self.n2());
                for (x, &[e0, e1, e2]) in self.face2.iter().enumerate() {
                    m.add_to_entry(e2, x, 1);
                    m.add_to_entry(e1, x, -1);
                    m.add_to_entry(e0, x, 1);
                }
                Ok(m)
            }
            other => Err(DeltaError::InvalidDimension(other)),
        }
    }

    /// Euler characteristic from cell counts: n0 − n1 + n2.
    pub fn euler_characteristic(&self) -> i64 {
        self.n0() as i64 - self.n1() as i64 + self.n2() as i64
    }
}

/// Dense matrix of arbitrary-precision integers, row-major.
#[derive(Clone, PartialEq, Eq)]
pub struct IntegerMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<BigInt>,
}

impl IntegerMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntegerMatrix {
            rows,
            cols,
            entries: vec![BigInt::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = IntegerMatrix::zeros(n, n);
        for i in 0..n {
            m.set(i, i, BigInt::one());
        }
        m
    }

    pub fn from_rows(rows: &[Vec<i64>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        let mut m = IntegerMatrix::zeros(r, c);
        for (i, row) in rows.iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                m.set(i, j, BigInt::from(v));
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    fn idx(&self, r: usize, c: usize) -> usize {
        debug_assert!(r < self.rows && c < self.cols);
        r * self.cols + c
    }

    pub fn get(&self, r: usize, c: usize) -> &BigInt {
        &self.entries[self.idx(r, c)]
    }

    pub fn set(&mut self, r: usize, c: usize, v: BigInt) {
        let i = self.idx(r, c);
        self.entries[i] = v;
    }

    pub fn add_to_entry(&mut self, r: usize, c: usize, v: i64) {
        let i = self.idx(r, c);
        self.entries[i] += v;
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(Zero::is_zero)
    }

    pub fn diagonal(&self) -> Vec<BigInt> {
        (0..self.rows.min(self.cols))
            .map(|i| self.get(i, i).clone())
            .collect()
    }

    pub fn mul(&self, rhs: &IntegerMatrix) -> IntegerMatrix {
        assert_eq!(self.cols, rhs.rows, "shape mismatch in matrix product");
        let mut out = IntegerMatrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let b = rhs.get(k, j);
                    if b.is_zero() {
                        continue;
                    }
                    let t = a * b;
                    out.entries[i * rhs.cols + j] += t;
                }
            }
        }
        out
    }

    pub fn transpose(&self) -> IntegerMatrix {
        let mut out = IntegerMatrix::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                out.set(c, r, self.get(r, c).clone());
            }
        }
        out
    }

    /// Exact determinant by fraction-free (Bareiss) elimination.
    pub fn determinant(&self) -> BigInt {
        assert_eq!(self.rows, self.cols, "determinant of non-square matrix");
        let n = self.rows;
        if n == 0 {
            return BigInt::one();
        }
        let mut a: Vec<Vec<BigInt>> = (0..n)
            .map(|r| (0..n).map(|c| self.get(r, c).clone()).collect())
            .collect();
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..n - 1 {
            if a[k][k].is_zero() {
                let Some(swap) = (k + 1..n).find(|&i| !a[i][k].is_zero()) else {
                    return BigInt::zero();
                };
                a.swap(k, swap);
                sign = -sign;
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let num = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                    a[i][j] = num / &prev;
                }
            }
            prev = a[k][k].clone();
        }
        sign * a[n - 1][n - 1].clone()
    }

    pub fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.entries.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    pub fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for r in 0..self.rows {
            self.entries.swap(r * self.cols + a, r * self.cols + b);
        }
    }

    /// row[dst] += c · row[src]
    pub fn add_scaled_row(&mut self, dst: usize, src: usize, c: &BigInt) {
        assert_ne!(dst, src);
        for j in 0..self.cols {
            let t = self.get(src, j) * c;
            if t.is_zero() {
                continue;
            }
            self.entries[dst * self.cols + j] += t;
        }
    }

    /// col[dst] += c · col[src]
    pub fn add_scaled_col(&mut self, dst: usize, src: usize, c: &BigInt) {
        assert_ne!(dst, src);
        for r in 0..self.rows {
            let t = self.get(r, src) * c;
            if t.is_zero() {
                continue;
            }
            self.entries[r * self.cols + dst] += t;
        }
    }

    pub fn negate_row(&mut self, r: usize) {
        for j in 0..self.cols {
            let i = r * self.cols + j;
            let v = std::mem::take(&mut self.entries[i]);
            self.entries[i] = -v;
        }
    }
}

impl fmt::Debug for IntegerMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "IntegerMatrix {}x{} {}", self.rows, self.cols, self)
    }
}

impl fmt::Display for IntegerMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "[")?;
        for r in 0..self.rows {
            write!(f, "  [")?;
            for c in 0..self.cols {
                if c > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{}", self.get(r, c))?;
            }
            writeln!(f, "]")?;
        }
        write!(f, "]")
    }
}
