//! Dense exact linear algebra over ℚ(ζ_k).

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::field::{CycloNum, FieldError, FieldSpec};

pub mod modular;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LinalgError {
    #[error("shape error: {0}")]
    Shape(String),
    #[error(transparent)]
    Field(#[from] FieldError),
}

/// A dense row-major matrix of cyclotomic numbers.
#[derive(Clone, PartialEq, Eq)]
pub struct Matrix {
    field: Arc<FieldSpec>,
    rows: usize,
    cols: usize,
    entries: Vec<CycloNum>,
}

impl Matrix {
    pub fn zeros(field: &Arc<FieldSpec>, rows: usize, cols: usize) -> Self {
        Self {
            field: Arc::clone(field),
            rows,
            cols,
            entries: vec![CycloNum::zero(field); rows * cols],
        }
    }

    pub fn identity(field: &Arc<FieldSpec>, n: usize) -> Self {
        Self::scalar(field, n, &CycloNum::one(field))
    }

    /// `value · I_n`.
    pub fn scalar(field: &Arc<FieldSpec>, n: usize, value: &CycloNum) -> Self {
        let mut m = Self::zeros(field, n, n);
        for i in 0..n {
            m[(i, i)] = value.clone();
        }
        m
    }

    pub fn from_rows(
        field: &Arc<FieldSpec>,
        rows: Vec<Vec<CycloNum>>,
    ) -> Result<Self, LinalgError> {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, Vec::len);
        if let Some(bad) = rows.iter().position(|r| r.len() != ncols) {
            return Err(LinalgError::Shape(format!(
                "row {} has {} entries, expected {ncols}",
                bad + 1,
                rows[bad].len()
            )));
        }
        let entries: Vec<CycloNum> = rows.into_iter().flatten().collect();
        if let Some(e) = entries
            .iter()
            .find(|e| e.field().conductor() != field.conductor())
        {
            return Err(FieldError::Mismatch {
                left: field.conductor(),
                right: e.field().conductor(),
            }
            .into());
        }
        Ok(Self {
            field: Arc::clone(field),
            rows: nrows,
            cols: ncols,
            entries,
        })
    }

    /// Integer matrix convenience constructor.
    pub fn from_ints(field: &Arc<FieldSpec>, rows: &[&[i64]]) -> Self {
        let rows = rows
            .iter()
            .map(|r| r.iter().map(|&x| CycloNum::from_int(field, x)).collect())
            .collect();
        Self::from_rows(field, rows).expect("ragged integer matrix")
    }

    pub fn field(&self) -> &Arc<FieldSpec> {
        &self.field
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn row(&self, i: usize) -> &[CycloNum] {
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<CycloNum> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(CycloNum::is_zero)
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(&self.field, self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    pub fn is_skew_symmetric(&self) -> bool {
        self.is_square() && *self == -&self.transpose()
    }

    pub fn is_symmetric(&self) -> bool {
        self.is_square() && *self == self.transpose()
    }

    pub fn is_diagonal(&self) -> bool {
        self.is_square()
            && (0..self.rows).all(|i| (0..self.cols).all(|j| i == j || self[(i, j)].is_zero()))
    }

    pub fn diagonal(&self) -> Vec<CycloNum> {
        (0..self.rows.min(self.cols))
            .map(|i| self[(i, i)].clone())
            .collect()
    }

    pub fn trace(&self) -> CycloNum {
        self.diagonal()
            .iter()
            .fold(CycloNum::zero(&self.field), |acc, x| acc + x)
    }

    pub fn scale(&self, c: &CycloNum) -> Self {
        Self {
            field: Arc::clone(&self.field),
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(|e| e * c).collect(),
        }
    }

    fn same_shape(&self, other: &Self, op: &str) -> Result<(), LinalgError> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(LinalgError::Shape(format!(
                "cannot {op} {}x{} and {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(())
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self, LinalgError> {
        self.same_shape(other, "add")?;
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a.checked_add(b))
            .collect::<Result<_, _>>()?;
        Ok(Self {
            entries,
            ..self.clone()
        })
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self, LinalgError> {
        self.checked_add(&-other)
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self, LinalgError> {
        if self.cols != other.rows {
            return Err(LinalgError::Shape(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Self::zeros(&self.field, self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = &other[(k, j)];
                    if !b.is_zero() {
                        out[(i, j)] = out[(i, j)].checked_add(&a.checked_mul(b)?)?;
                    }
                }
            }
        }
        Ok(out)
    }

    /// Matrix–vector product.
    pub fn apply(&self, v: &[CycloNum]) -> Result<Vec<CycloNum>, LinalgError> {
        if v.len() != self.cols {
            return Err(LinalgError::Shape(format!(
                "vector of length {} for {}x{} matrix",
                v.len(),
                self.rows,
                self.cols
            )));
        }
        (0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .try_fold(CycloNum::zero(&self.field), |acc, (a, x)| {
                        acc.checked_add(&a.checked_mul(x)?)
                    })
                    .map_err(LinalgError::from)
            })
            .collect()
    }

    fn require_square(&self, op: &str) -> Result<(), LinalgError> {
        if self.is_square() {
            Ok(())
        } else {
            Err(LinalgError::Shape(format!(
                "{op} needs a square matrix, got {}x{}",
                self.rows, self.cols
            )))
        }
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.entries.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    /// `row[target] -= factor * row[source]`, starting at column `from`.
    fn eliminate(&mut self, target: usize, source: usize, factor: &CycloNum, from: usize) {
        for j in from..self.cols {
            let s = &self.entries[source * self.cols + j];
            if s.is_zero() {
                continue;
            }
            let delta = factor * s;
            let t = &mut self.entries[target * self.cols + j];
            *t = &*t - &delta;
        }
    }
}

impl std::ops::Index<(usize, usize)> for Matrix {
    type Output = CycloNum;
    fn index(&self, (i, j): (usize, usize)) -> &CycloNum {
        &self.entries[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut CycloNum {
        &mut self.entries[i * self.cols + j]
    }
}

impl std::ops::Neg for &Matrix {
    type Output = Matrix;
    fn neg(self) -> Matrix {
        Matrix {
            entries: self.entries.iter().map(|e| -e).collect(),
            ..self.clone()
        }
    }
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Matrix[k={}]({self})", self.field.conductor())
    }
}

/// Same text format the CLI parses: `a, b; c, d`.
impl fmt::Display for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            if i > 0 {
                f.write_str("; ")?;
            }
            for (j, e) in self.row(i).iter().enumerate() {
                if j > 0 {
                    f.write_str(", ")?;
                }
                write!(f, "{e}")?;
            }
        }
        Ok(())
    }
}

/// Result of Gauss–Jordan elimination.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rref {
    pub matrix: Matrix,
    pub rank: usize,
    pub pivots: Vec<usize>,
}

/// Reduced row echelon form. Pivots are the first nonzero entry found in
/// each column.
pub fn rref(m: &Matrix) -> Rref {
    let mut a = m.clone();
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..a.cols {
        if row == a.rows {
            break;
        }
        let Some(p) = (row..a.rows).find(|&r| !a[(r, col)].is_zero()) else {
            continue;
        };
        a.swap_rows(row, p);
        let inv = a[(row, col)].inv().expect("pivot is nonzero");
        for j in col..a.cols {
            a[(row, j)] = &a[(row, j)] * &inv;
        }
        for r in 0..a.rows {
            if r != row && !a[(r, col)].is_zero() {
                let factor = a[(r, col)].clone();
                a.eliminate(r, row, &factor, col);
            }
        }
        pivots.push(col);
        row += 1;
    }
    Rref {
        rank: pivots.len(),
        matrix: a,
        pivots,
    }
}

pub fn rank(m: &Matrix) -> usize {
    rref(m).rank
}

/// A basis of `{v : M v = 0}`, one vector per free column; empty iff `M` is
/// injective.
pub fn nullspace(m: &Matrix) -> Vec<Vec<CycloNum>> {
    let Rref {
        matrix: r, pivots, ..
    } = rref(m);
    let field = m.field();
    let mut is_pivot = vec![false; m.cols];
    for &p in &pivots {
        is_pivot[p] = true;
    }
    (0..m.cols)
        .filter(|&c| !is_pivot[c])
        .map(|free| {
            let mut v = vec![CycloNum::zero(field); m.cols];
            v[free] = CycloNum::one(field);
            for (row, &p) in pivots.iter().enumerate() {
                v[p] = -&r[(row, free)];
            }
            v
        })
        .collect()
}

/// Determinant by Gaussian elimination.
pub fn det(m: &Matrix) -> Result<CycloNum, LinalgError> {
    m.require_square("det")?;
    let mut a = m.clone();
    let n = a.rows;
    let mut acc = CycloNum::one(m.field());
    for col in 0..n {
        let Some(p) = (col..n).find(|&r| !a[(r, col)].is_zero()) else {
            return Ok(CycloNum::zero(m.field()));
        };
        if p != col {
            a.swap_rows(col, p);
            acc = -acc;
        }
        let pivot = a[(col, col)].clone();
        let inv = pivot.inv()?;
        for r in col + 1..n {
            if !a[(r, col)].is_zero() {
                let factor = &a[(r, col)] * &inv;
                a.eliminate(r, col, &factor, col);
            }
        }
        acc = &acc * &pivot;
    }
    Ok(acc)
}

/// `M^s`, with `M^0 = I`.
pub fn matrix_power(m: &Matrix, s: u32) -> Result<Matrix, LinalgError> {
    m.require_square("matrix_power")?;
    let mut acc = Matrix::identity(m.field(), m.rows);
    let mut base = m.clone();
    let mut e = s;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc.checked_mul(&base)?;
        }
        e >>= 1;
        if e > 0 {
            base = base.checked_mul(&base)?;
        }
    }
    Ok(acc)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Nilpotency {
    pub nilpotent: bool,
    /// Least `s ≥ 1` with `M^s = 0`.
    pub index: Option<u32>,
}

/// Decides nilpotency by checking `M^s = 0` for `s ≤ n` (Cayley–Hamilton).
pub fn is_nilpotent(m: &Matrix) -> Result<Nilpotency, LinalgError> {
    m.require_square("is_nilpotent")?;
    let n = m.rows;
    let mut power = m.clone();
    for s in 1..=n.max(1) {
        if power.is_zero() {
            return Ok(Nilpotency {
                nilpotent: true,
                index: Some(s as u32),
            });
        }
        if s < n {
            power = power.checked_mul(m)?;
        }
    }
    Ok(Nilpotency {
        nilpotent: false,
        index: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gauss() -> Arc<FieldSpec> {
        FieldSpec::new(4).unwrap()
    }

    fn example_57(f: &Arc<FieldSpec>) -> Matrix {
        let i = CycloNum::imaginary_unit(f).unwrap();
        let z = CycloNum::zero(f);
        let one = CycloNum::one(f);
        Matrix::from_rows(
            f,
            vec![
                vec![z.clone(), z.clone(), -&one],
                vec![z.clone(), z.clone(), -&i],
                vec![one.clone(), i.clone(), z],
            ],
        )
        .unwrap()
    }

    #[test]
    fn rref_examples() {
        let f = gauss();
        let id = Matrix::identity(&f, 3);
        let r = rref(&id);
        assert_eq!((r.matrix, r.rank), (id, 3));
        let z = Matrix::zeros(&f, 2, 2);
        let r = rref(&z);
        assert_eq!((r.matrix, r.rank), (z, 0));
        let m = Matrix::from_ints(&f, &[&[1, 1], &[-1, 1]]);
        let r = rref(&m);
        assert_eq!(r.matrix, Matrix::identity(&f, 2));
        assert_eq!(r.pivots, vec![0, 1]);
    }

    #[test]
    fn nullspace_examples() {
        let f = gauss();
        assert!(nullspace(&Matrix::identity(&f, 3)).is_empty());
        assert_eq!(nullspace(&Matrix::zeros(&f, 2, 2)).len(), 2);
        let m = Matrix::from_ints(&f, &[&[0, 0, 0], &[0, 0, -1], &[0, 1, 0]]);
        let ns = nullspace(&m);
        assert_eq!(ns.len(), 1);
        let expect: Vec<CycloNum> = [1, 0, 0]
            .iter()
            .map(|&x| CycloNum::from_int(&f, x))
            .collect();
        assert_eq!(ns[0], expect);
    }

    #[test]
    fn determinant_examples() {
        let f = gauss();
        assert!(det(&Matrix::identity(&f, 4)).unwrap().is_one());
        let m = Matrix::from_ints(&f, &[&[1, 1], &[-1, 1]]);
        assert_eq!(det(&m).unwrap(), CycloNum::from_int(&f, 2));
        let rot = Matrix::from_ints(&f, &[&[0, -1], &[1, 0]]);
        assert!(det(&rot).unwrap().is_one());
        let rect = Matrix::zeros(&f, 2, 3);
        assert!(matches!(det(&rect), Err(LinalgError::Shape(_))));
    }

    #[test]
    fn powers_and_nilpotency() {
        let f = gauss();
        let m = Matrix::from_ints(&f, &[&[2, 3], &[5, 7]]);
        assert_eq!(matrix_power(&m, 0).unwrap(), Matrix::identity(&f, 2));
        let strict = Matrix::from_ints(&f, &[&[0, 1], &[0, 0]]);
        assert!(matrix_power(&strict, 2).unwrap().is_zero());

        let e57 = example_57(&f);
        assert!(matrix_power(&e57, 3).unwrap().is_zero());
        assert!(!matrix_power(&e57, 2).unwrap().is_zero());
        assert_eq!(
            is_nilpotent(&e57).unwrap(),
            Nilpotency {
                nilpotent: true,
                index: Some(3)
            }
        );
        assert_eq!(
            is_nilpotent(&Matrix::zeros(&f, 3, 3)).unwrap(),
            Nilpotency {
                nilpotent: true,
                index: Some(1)
            }
        );
        let rot = Matrix::from_ints(&f, &[&[0, 0, 0], &[0, 0, -1], &[0, 1, 0]]);
        assert_eq!(
            is_nilpotent(&rot).unwrap(),
            Nilpotency {
                nilpotent: false,
                index: None
            }
        );
        assert!(is_nilpotent(&Matrix::zeros(&f, 2, 3)).is_err());
    }

    #[test]
    fn skew_and_display() {
        let f = gauss();
        let e57 = example_57(&f);
        assert!(e57.is_skew_symmetric());
        assert_eq!(e57.to_string(), "0, 0, -1; 0, 0, -w; 1, w, 0");
    }
}
