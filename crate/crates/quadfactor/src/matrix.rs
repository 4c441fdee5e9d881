//! Dense exact integer matrices, defective identities and permutation helpers.
//!
//! Degenerate shapes (zero rows or zero columns) are first-class values, and
//! products involving them follow the usual conventions. All arithmetic is
//! exact; overflow panics instead of wrapping.

use std::fmt;

#[derive(Clone, PartialEq, Eq)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<i64>,
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix {
            rows,
            cols,
            data: vec![0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::rect_identity(n, n)
    }

    /// The rectangular identity `I_{rows,cols}`: ones on the main diagonal.
    pub fn rect_identity(rows: usize, cols: usize) -> Self {
        let mut m = Self::zeros(rows, cols);
        for i in 0..rows.min(cols) {
            m.set(i, i, 1);
        }
        m
    }

    /// Builds a matrix from row vectors. All rows must have the same length;
    /// an empty list yields the 0x0 matrix.
    pub fn from_rows(rows: Vec<Vec<i64>>) -> Self {
        let cols = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(rows.len() * cols);
        for row in &rows {
            assert_eq!(row.len(), cols, "ragged rows in IntMatrix::from_rows");
            data.extend_from_slice(row);
        }
        IntMatrix {
            rows: rows.len(),
            cols,
            data,
        }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> i64) -> Self {
        let mut m = Self::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m.set(i, j, f(i, j));
            }
        }
        m
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> i64 {
        assert!(r < self.rows && c < self.cols, "index out of bounds");
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: i64) {
        assert!(r < self.rows && c < self.cols, "index out of bounds");
        self.data[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[i64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i))
    }

    pub fn mul(&self, rhs: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, rhs.rows, "shape mismatch in matrix product");
        Self::from_fn(self.rows, rhs.cols, |i, j| {
            let mut acc: i64 = 0;
            for k in 0..self.cols {
                acc = acc
                    .checked_add(self.get(i, k).checked_mul(rhs.get(k, j)).expect("overflow"))
                    .expect("overflow");
            }
            acc
        })
    }

    pub fn mul_vec(&self, v: &[i64]) -> Vec<i64> {
        assert_eq!(self.cols, v.len(), "shape mismatch in matrix-vector product");
        (0..self.rows)
            .map(|i| {
                let mut acc: i64 = 0;
                for k in 0..self.cols {
                    acc = acc
                        .checked_add(self.get(i, k).checked_mul(v[k]).expect("overflow"))
                        .expect("overflow");
                }
                acc
            })
            .collect()
    }

    /// Extracts the `h` x `w` block whose top-left corner is `(r0, c0)`.
    pub fn block(&self, r0: usize, c0: usize, h: usize, w: usize) -> IntMatrix {
        assert!(r0 + h <= self.rows && c0 + w <= self.cols, "block out of bounds");
        Self::from_fn(h, w, |i, j| self.get(r0 + i, c0 + j))
    }

    /// Multiplies row `i` by `signs[i]`.
    pub fn scaled_rows(&self, signs: &[i64]) -> IntMatrix {
        assert_eq!(signs.len(), self.rows);
        Self::from_fn(self.rows, self.cols, |i, j| signs[i] * self.get(i, j))
    }

    /// Multiplies column `j` by `signs[j]`.
    pub fn scaled_cols(&self, signs: &[i64]) -> IntMatrix {
        assert_eq!(signs.len(), self.cols);
        Self::from_fn(self.rows, self.cols, |i, j| signs[j] * self.get(i, j))
    }

    pub fn is_lower_triangular(&self) -> bool {
        (0..self.rows).all(|i| (i + 1..self.cols).all(|j| self.get(i, j) == 0))
    }

    pub fn is_upper_triangular(&self) -> bool {
        (0..self.rows).all(|i| (0..i.min(self.cols)).all(|j| self.get(i, j) == 0))
    }

    pub fn diagonal(&self) -> Vec<i64> {
        (0..self.rows.min(self.cols)).map(|i| self.get(i, i)).collect()
    }

    pub fn max_abs(&self) -> i64 {
        self.data.iter().map(|v| v.abs()).max().unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&v| v == 0)
    }

    pub fn to_rows(&self) -> Vec<Vec<i64>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "IntMatrix {}x{}", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "  [")?;
            for j in 0..self.cols {
                if j > 0 {
                    write!(f, " ")?;
                }
                write!(f, "{:2}", self.get(i, j))?;
            }
            writeln!(f, "]")?;
        }
        Ok(())
    }
}

/// Glues four blocks into `[[a, b], [c, d]]`. Shapes must agree.
pub fn block2x2(a: &IntMatrix, b: &IntMatrix, c: &IntMatrix, d: &IntMatrix) -> IntMatrix {
    assert_eq!(a.rows(), b.rows());
    assert_eq!(c.rows(), d.rows());
    assert_eq!(a.cols(), c.cols());
    assert_eq!(b.cols(), d.cols());
    let (n, m) = (a.rows(), a.cols());
    IntMatrix::from_fn(n + c.rows(), m + b.cols(), |i, j| match (i < n, j < m) {
        (true, true) => a.get(i, j),
        (true, false) => b.get(i, j - m),
        (false, true) => c.get(i - n, j),
        (false, false) => d.get(i - n, j - m),
    })
}

/// Block-diagonal matrix with the given blocks in order.
pub fn block_diag(blocks: &[&IntMatrix]) -> IntMatrix {
    let rows = blocks.iter().map(|b| b.rows()).sum();
    let cols = blocks.iter().map(|b| b.cols()).sum();
    let mut m = IntMatrix::zeros(rows, cols);
    let (mut r0, mut c0) = (0, 0);
    for b in blocks {
        for i in 0..b.rows() {
            for j in 0..b.cols() {
                m.set(r0 + i, c0 + j, b.get(i, j));
            }
        }
        r0 += b.rows();
        c0 += b.cols();
    }
    m
}

/// A 0/1 matrix obtained from an identity matrix by deleting rows and
/// columns: at most one unit per row and per column, and the unit positions
/// form a staircase (strictly increasing in both coordinates).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DefectiveIdentity {
    rows: usize,
    cols: usize,
    units: Vec<(usize, usize)>,
}

impl DefectiveIdentity {
    /// `I_{rows,cols}` with units all along the main diagonal.
    pub fn rect(rows: usize, cols: usize) -> Self {
        let units = (0..rows.min(cols)).map(|i| (i, i)).collect();
        DefectiveIdentity { rows, cols, units }
    }

    /// Builds from explicit unit positions; `None` if they do not form a
    /// staircase within the given shape.
    pub fn from_units(rows: usize, cols: usize, mut units: Vec<(usize, usize)>) -> Option<Self> {
        units.sort_unstable();
        for &(r, c) in &units {
            if r >= rows || c >= cols {
                return None;
            }
        }
        for pair in units.windows(2) {
            let ((r0, c0), (r1, c1)) = (pair[0], pair[1]);
            if r0 >= r1 || c0 >= c1 {
                return None;
            }
        }
        Some(DefectiveIdentity { rows, cols, units })
    }

    pub fn from_matrix(m: &IntMatrix) -> Option<Self> {
        let mut units = Vec::new();
        for i in 0..m.rows() {
            for j in 0..m.cols() {
                match m.get(i, j) {
                    0 => {}
                    1 => units.push((i, j)),
                    _ => return None,
                }
            }
        }
        Self::from_units(m.rows(), m.cols(), units)
    }

    pub fn to_matrix(&self) -> IntMatrix {
        let mut m = IntMatrix::zeros(self.rows, self.cols);
        for &(r, c) in &self.units {
            m.set(r, c, 1);
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn units(&self) -> &[(usize, usize)] {
        &self.units
    }

    /// Number of unit entries, which is also the rank.
    pub fn rank(&self) -> usize {
        self.units.len()
    }

    pub fn transpose(&self) -> Self {
        let units = self.units.iter().map(|&(r, c)| (c, r)).collect();
        DefectiveIdentity {
            rows: self.cols,
            cols: self.rows,
            units,
        }
    }

    pub fn unit_col_for_row(&self, row: usize) -> Option<usize> {
        self.units.iter().find(|&&(r, _)| r == row).map(|&(_, c)| c)
    }

    /// Rows carrying no unit entry.
    pub fn zero_rows(&self) -> Vec<usize> {
        let with_unit: Vec<usize> = self.units.iter().map(|&(r, _)| r).collect();
        (0..self.rows).filter(|r| !with_unit.contains(r)).collect()
    }

    /// Offsets all units by `(dr, dc)` into a larger shape.
    pub fn shifted(&self, dr: usize, dc: usize, rows: usize, cols: usize) -> Self {
        let units: Vec<_> = self.units.iter().map(|&(r, c)| (r + dr, c + dc)).collect();
        Self::from_units(rows, cols, units).expect("shift preserves the staircase")
    }
}

pub fn is_defective_identity(m: &IntMatrix) -> bool {
    DefectiveIdentity::from_matrix(m).is_some()
}

pub fn is_permutation(perm: &[usize]) -> bool {
    let mut seen = vec![false; perm.len()];
    for &p in perm {
        if p >= perm.len() || seen[p] {
            return false;
        }
        seen[p] = true;
    }
    true
}

/// Sign of a permutation given in one-line notation.
pub fn permutation_sign(perm: &[usize]) -> i64 {
    debug_assert!(is_permutation(perm));
    let mut seen = vec![false; perm.len()];
    let mut sign = 1i64;
    for start in 0..perm.len() {
        if seen[start] {
            continue;
        }
        let mut len = 0;
        let mut at = start;
        while !seen[at] {
            seen[at] = true;
            at = perm[at];
            len += 1;
        }
        if len % 2 == 0 {
            sign = -sign;
        }
    }
    sign
}
