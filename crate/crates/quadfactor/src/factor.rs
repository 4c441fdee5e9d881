//! The L·D·U factorization of black-to-white matrices.
//!
//! Every factor entry lands in {-1, 0, 1}: cut-and-paste surgery shrinks the
//! disk, the excised squares are relabeled to the front, and a block identity
//! peels the corresponding rows and columns off while leaving the smaller
//! disk's matrix in the lower-right corner. Recursion does the rest. All
//! internal identities are verified exactly and violations abort with a
//! diagnostic.

use std::collections::HashMap;
use std::fmt;

use crate::disk::{Bicoloring, Color, QuadDisk, SquareId};
use crate::matrix::{block2x2, block_diag, DefectiveIdentity, IntMatrix};
use crate::surgery::{self, PlanSide, SurgeryResult};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FactorError {
    ShapeMismatch(&'static str),
    HypothesisFailed,
}

impl fmt::Display for FactorError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FactorError::ShapeMismatch(what) => write!(f, "shape mismatch: {what}"),
            FactorError::HypothesisFailed => write!(f, "block coupling hypothesis fails"),
        }
    }
}

impl std::error::Error for FactorError {}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BlockVariant {
    /// Requires `n' <= n` and `M11 N = M12`.
    Right,
    /// Requires `n' >= n` and `N M11 = M21`.
    Left,
}

/// Block decomposition of an `(n+m) x (n'+m')` matrix into triangular factors
/// around a rectangular identity. The product is verified exactly before
/// returning.
pub fn block_ldu(
    m: &IntMatrix,
    n: usize,
    n_prime: usize,
    coupling: &IntMatrix,
    variant: BlockVariant,
) -> Result<(IntMatrix, IntMatrix, IntMatrix), FactorError> {
    if n > m.rows() || n_prime > m.cols() {
        return Err(FactorError::ShapeMismatch("split exceeds matrix shape"));
    }
    let m_lower = m.rows() - n;
    let m_right = m.cols() - n_prime;
    let m11 = m.block(0, 0, n, n_prime);
    let m12 = m.block(0, n_prime, n, m_right);
    let m21 = m.block(n, 0, m_lower, n_prime);
    let m22 = m.block(n, n_prime, m_lower, m_right);

    let (lower, middle, upper) = match variant {
        BlockVariant::Right => {
            if n_prime > n {
                return Err(FactorError::ShapeMismatch("right variant needs n' <= n"));
            }
            if coupling.rows() != n_prime || coupling.cols() != m_right {
                return Err(FactorError::ShapeMismatch("coupling must be n' x m'"));
            }
            if m11.mul(coupling) != m12 {
                return Err(FactorError::HypothesisFailed);
            }
            let pad = IntMatrix::rect_identity(n_prime, n);
            let lower = block2x2(
                &m11.mul(&pad),
                &IntMatrix::zeros(n, m_lower),
                &m21.mul(&pad),
                &IntMatrix::identity(m_lower),
            );
            let schur = sub(&m22, &m21.mul(coupling));
            let middle = block2x2(
                &IntMatrix::rect_identity(n, n_prime),
                &IntMatrix::zeros(n, m_right),
                &IntMatrix::zeros(m_lower, n_prime),
                &schur,
            );
            let upper = block2x2(
                &IntMatrix::identity(n_prime),
                coupling,
                &IntMatrix::zeros(m_right, n_prime),
                &IntMatrix::identity(m_right),
            );
            (lower, middle, upper)
        }
        BlockVariant::Left => {
            if n_prime < n {
                return Err(FactorError::ShapeMismatch("left variant needs n' >= n"));
            }
            if coupling.rows() != m_lower || coupling.cols() != n {
                return Err(FactorError::ShapeMismatch("coupling must be m x n"));
            }
            if coupling.mul(&m11) != m21 {
                return Err(FactorError::HypothesisFailed);
            }
            let lower = block2x2(
                &IntMatrix::identity(n),
                &IntMatrix::zeros(n, m_lower),
                coupling,
                &IntMatrix::identity(m_lower),
            );
            let schur = sub(&m22, &coupling.mul(&m12));
            let middle = block2x2(
                &IntMatrix::rect_identity(n, n_prime),
                &IntMatrix::zeros(n, m_right),
                &IntMatrix::zeros(m_lower, n_prime),
                &schur,
            );
            let pad = IntMatrix::rect_identity(n_prime, n);
            let upper = block2x2(
                &pad.mul(&m11),
                &pad.mul(&m12),
                &IntMatrix::zeros(m_right, n_prime),
                &IntMatrix::identity(m_right),
            );
            (lower, middle, upper)
        }
    };
    assert_eq!(lower.mul(&middle).mul(&upper), *m, "block identity is exact");
    Ok((lower, middle, upper))
}

fn sub(a: &IntMatrix, b: &IntMatrix) -> IntMatrix {
    assert_eq!((a.rows(), a.cols()), (b.rows(), b.cols()));
    IntMatrix::from_fn(a.rows(), a.cols(), |i, j| a.get(i, j) - b.get(i, j))
}

/// The adjacency matrix of `disk` with rows and columns taken in the given
/// square orders.
pub(crate) fn relabeled_matrix(
    disk: &QuadDisk,
    rows: &[SquareId],
    cols: &[SquareId],
) -> IntMatrix {
    IntMatrix::from_fn(rows.len(), cols.len(), |i, j| {
        i64::from(disk.squares_adjacent(rows[i], cols[j]))
    })
}

/// One inductive step, relabeled so the excised squares come first in
/// diagonal order. The four blocks, the coupling matrix and the sign vectors
/// live in the frame whose rows are the diagonal-colored squares; when the
/// diagonal is white the computation runs on the transpose and `lower`,
/// `middle`, `upper` are transposed back.
#[derive(Clone, Debug)]
pub struct StepFactors {
    pub diagonal_color: Color,
    /// k: excised rows of the frame matrix.
    pub rows_excised: usize,
    /// k': excised columns of the frame matrix.
    pub cols_excised: usize,
    pub b11: IntMatrix,
    pub b12: IntMatrix,
    pub b21: IntMatrix,
    pub b22: IntMatrix,
    /// N with entries 0/-1, nonzero at `(i, kept_flank_cols[i] - k')`.
    pub coupling: IntMatrix,
    /// Frame column positions of the kept flank squares `s^r_1 .. s^r_{k-1}`.
    pub kept_flank_cols: Vec<usize>,
    pub row_signs: Vec<i64>,
    pub col_signs: Vec<i64>,
    /// `B22 - B21 N`, cross-checked against the matrix built directly from
    /// the surgery components.
    pub delta_prime: IntMatrix,
    /// Factors in the black-rows frame: `lower * middle * upper` equals the
    /// relabeled black-to-white matrix.
    pub lower: IntMatrix,
    pub middle: IntMatrix,
    pub upper: IntMatrix,
    pub black_order: Vec<SquareId>,
    pub white_order: Vec<SquareId>,
}

/// Original squares of each component, indexed by component-local id, plus
/// the inherited colorings.
fn component_data(
    coloring: &Bicoloring,
    surgery: &SurgeryResult,
) -> (Vec<Vec<SquareId>>, Vec<Bicoloring>) {
    let mut comp_orig: Vec<Vec<SquareId>> = surgery
        .components
        .iter()
        .map(|c| vec![SquareId(0); c.num_squares()])
        .collect();
    for (orig, slot) in surgery.relabel.iter().enumerate() {
        if let Some((comp, idx)) = slot {
            comp_orig[*comp][idx.idx()] = SquareId(orig as u32);
        }
    }
    let colorings = comp_orig
        .iter()
        .map(|originals| {
            Bicoloring::from_colors(originals.iter().map(|&s| coloring.color(s)).collect())
        })
        .collect();
    (comp_orig, colorings)
}

/// Step factors with the default survivor order: component by component, in
/// component square order.
pub fn step_factor(
    disk: &QuadDisk,
    coloring: &Bicoloring,
    surgery: &SurgeryResult,
) -> StepFactors {
    let (comp_orig, _) = component_data(coloring, surgery);
    let mut black_tail = Vec::new();
    let mut white_tail = Vec::new();
    for originals in &comp_orig {
        for &orig in originals {
            match coloring.color(orig) {
                Color::Black => black_tail.push(orig),
                Color::White => white_tail.push(orig),
            }
        }
    }
    step_factor_with_tails(disk, coloring, surgery, &black_tail, &white_tail)
}

/// Step factors with caller-chosen survivor orders (the recursion feeds the
/// orders coming back from the sub-factorizations). Tails must be grouped by
/// component, components in order.
fn step_factor_with_tails(
    disk: &QuadDisk,
    coloring: &Bicoloring,
    surgery: &SurgeryResult,
    black_tail: &[SquareId],
    white_tail: &[SquareId],
) -> StepFactors {
    let plan = &surgery.plan;
    let diagonal_color = coloring.color(surgery.removed_diagonal[0]);
    let (excised_black, excised_white) = match diagonal_color {
        Color::Black => (&surgery.removed_diagonal, &surgery.removed_flank),
        Color::White => (&surgery.removed_flank, &surgery.removed_diagonal),
    };
    let black_order: Vec<SquareId> = excised_black
        .iter()
        .chain(black_tail.iter())
        .copied()
        .collect();
    let white_order: Vec<SquareId> = excised_white
        .iter()
        .chain(white_tail.iter())
        .copied()
        .collect();
    let b_rel = relabeled_matrix(disk, &black_order, &white_order);

    // Work in the frame whose rows carry the diagonal squares.
    let (frame, frame_rows, frame_cols) = match diagonal_color {
        Color::Black => (b_rel.clone(), &black_order, &white_order),
        Color::White => (b_rel.transpose(), &white_order, &black_order),
    };
    let k = plan.k;
    let k_prime = plan.k_prime;

    let col_pos: HashMap<SquareId, usize> = frame_cols
        .iter()
        .enumerate()
        .map(|(i, &s)| (s, i))
        .collect();
    let kept_flank_cols: Vec<usize> = plan
        .kept_flank
        .iter()
        .map(|s| col_pos[s])
        .collect();
    for &j in &kept_flank_cols {
        assert!(j >= k_prime, "kept flank squares sit past the excised columns");
    }

    let sign_of = |s: SquareId| match plan.side[s.idx()] {
        Some(PlanSide::Right) => -1,
        Some(PlanSide::Left) => 1,
        None => 1, // excised squares occupy the identity blocks
    };
    let row_signs: Vec<i64> = frame_rows.iter().map(|&s| sign_of(s)).collect();
    let col_signs: Vec<i64> = frame_cols.iter().map(|&s| sign_of(s)).collect();

    let signed = frame.scaled_rows(&row_signs).scaled_cols(&col_signs);
    let b11 = frame.block(0, 0, k, k_prime);
    for i in 0..k {
        for j in 0..k_prime {
            let expected = i64::from(j == i || j + 1 == i);
            assert_eq!(
                b11.get(i, j),
                expected,
                "diagonal-to-flank adjacency is bidiagonal"
            );
        }
    }

    let m_right = frame.cols() - k_prime;
    let mut coupling = IntMatrix::zeros(k_prime, m_right);
    for (i, &j) in kept_flank_cols.iter().enumerate() {
        coupling.set(i, j - k_prime, -1);
    }

    let (l_signed, middle, u_signed) = block_ldu(&signed, k, k_prime, &coupling, BlockVariant::Right)
        .unwrap_or_else(|e| panic!("step factorization identity failed: {e}"));

    let mut lower = l_signed.scaled_rows(&row_signs);
    let unbalanced = k_prime + 1 == k;
    if unbalanced {
        for i in 0..lower.rows() {
            assert_eq!(lower.get(i, k - 1), 0, "padded column is zero before the fix");
        }
        lower.set(k - 1, k - 1, 1);
    } else {
        assert_eq!(k_prime, k);
    }
    let upper = u_signed.scaled_cols(&col_signs);

    let delta_prime = middle.block(k, k_prime, frame.rows() - k, m_right);

    // Independent cross-check: the Schur block must match the black-to-white
    // matrices of the surgery components, block by block.
    {
        let to_local = |tail: &[SquareId]| -> Vec<Vec<SquareId>> {
            let mut by_comp: Vec<Vec<SquareId>> = vec![Vec::new(); surgery.components.len()];
            let mut last_comp = 0;
            for &orig in tail {
                let (comp, idx) = surgery.relabel[orig.idx()].expect("tail squares survive");
                assert!(comp >= last_comp, "tails are grouped by component");
                last_comp = comp;
                by_comp[comp].push(idx);
            }
            by_comp
        };
        let blacks_by_comp = to_local(black_tail);
        let whites_by_comp = to_local(white_tail);
        let blocks: Vec<IntMatrix> = surgery
            .components
            .iter()
            .enumerate()
            .map(|(c, comp)| {
                let m = relabeled_matrix(comp, &blacks_by_comp[c], &whites_by_comp[c]);
                match diagonal_color {
                    Color::Black => m,
                    Color::White => m.transpose(),
                }
            })
            .collect();
        let refs: Vec<&IntMatrix> = blocks.iter().collect();
        assert_eq!(
            delta_prime,
            block_diag(&refs),
            "Schur block equals the surgery components' matrix"
        );
    }

    let frame_middle = {
        let top = IntMatrix::rect_identity(k, k_prime);
        block2x2(
            &top,
            &IntMatrix::zeros(k, m_right),
            &IntMatrix::zeros(frame.rows() - k, k_prime),
            &delta_prime,
        )
    };
    assert_eq!(lower.mul(&frame_middle).mul(&upper), frame, "step identity");

    let blocks = (
        frame.block(0, k_prime, k, m_right),
        frame.block(k, 0, frame.rows() - k, k_prime),
        frame.block(k, k_prime, frame.rows() - k, m_right),
    );

    let (lower, middle_out, upper) = match diagonal_color {
        Color::Black => (lower, frame_middle, upper),
        Color::White => (upper.transpose(), frame_middle.transpose(), lower.transpose()),
    };

    StepFactors {
        diagonal_color,
        rows_excised: k,
        cols_excised: k_prime,
        b11,
        b12: blocks.0,
        b21: blocks.1,
        b22: blocks.2,
        coupling,
        kept_flank_cols,
        row_signs,
        col_signs,
        delta_prime,
        lower,
        middle: middle_out,
        upper,
        black_order,
        white_order,
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum VerifyFailure {
    ShapeMismatch,
    BadPermutation,
    NotLowerTriangular,
    NotUpperTriangular,
    DiagonalNotUnit,
    EntryOutOfBounds,
    NotDefectiveIdentity,
    ProductMismatch,
}

impl fmt::Display for VerifyFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let reason = match self {
            VerifyFailure::ShapeMismatch => "factor shapes do not match the matrix",
            VerifyFailure::BadPermutation => "row or column relabeling is not a permutation",
            VerifyFailure::NotLowerTriangular => "L is not lower triangular",
            VerifyFailure::NotUpperTriangular => "U is not upper triangular",
            VerifyFailure::DiagonalNotUnit => "a triangular factor has a diagonal entry not in {-1,1}",
            VerifyFailure::EntryOutOfBounds => "a factor entry lies outside {-1,0,1}",
            VerifyFailure::NotDefectiveIdentity => "the middle factor is not a defective identity",
            VerifyFailure::ProductMismatch => "P_b B P_w differs from L D U",
        };
        write!(f, "{reason}")
    }
}

impl std::error::Error for VerifyFailure {}

/// A complete factorization `P_b B P_w = L D U` where `P_b`, `P_w` relabel
/// the user's black and white squares, `L`/`U` are triangular with diagonal
/// entries in {-1,1}, and `D` is a defective identity.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LduFactorization {
    /// Row `i` of the relabeled matrix is user black row `black_perm[i]`.
    pub black_perm: Vec<usize>,
    /// Column `j` of the relabeled matrix is user white column `white_perm[j]`.
    pub white_perm: Vec<usize>,
    pub lower: IntMatrix,
    pub middle: DefectiveIdentity,
    pub upper: IntMatrix,
}

impl LduFactorization {
    pub fn black_count(&self) -> usize {
        self.black_perm.len()
    }

    pub fn white_count(&self) -> usize {
        self.white_perm.len()
    }

    /// `L D U`, i.e. the black-to-white matrix in the relabeled basis.
    pub fn relabeled_product(&self) -> IntMatrix {
        self.lower.mul(&self.middle.to_matrix()).mul(&self.upper)
    }

    /// Undoes the relabeling, recovering the matrix in user labels.
    pub fn reconstructed_matrix(&self) -> IntMatrix {
        let rel = self.relabeled_product();
        let mut out = IntMatrix::zeros(rel.rows(), rel.cols());
        for i in 0..rel.rows() {
            for j in 0..rel.cols() {
                out.set(self.black_perm[i], self.white_perm[j], rel.get(i, j));
            }
        }
        out
    }
}

/// Full verification against raw factor matrices.
pub fn verify_parts(
    b: &IntMatrix,
    black_perm: &[usize],
    white_perm: &[usize],
    lower: &IntMatrix,
    middle: &IntMatrix,
    upper: &IntMatrix,
) -> Result<(), VerifyFailure> {
    let (rows, cols) = (b.rows(), b.cols());
    if black_perm.len() != rows
        || white_perm.len() != cols
        || lower.rows() != rows
        || lower.cols() != rows
        || middle.rows() != rows
        || middle.cols() != cols
        || upper.rows() != cols
        || upper.cols() != cols
    {
        return Err(VerifyFailure::ShapeMismatch);
    }
    if !crate::matrix::is_permutation(black_perm) || !crate::matrix::is_permutation(white_perm) {
        return Err(VerifyFailure::BadPermutation);
    }
    if !lower.is_lower_triangular() {
        return Err(VerifyFailure::NotLowerTriangular);
    }
    if !upper.is_upper_triangular() {
        return Err(VerifyFailure::NotUpperTriangular);
    }
    if lower.diagonal().iter().any(|d| d.abs() != 1)
        || upper.diagonal().iter().any(|d| d.abs() != 1)
    {
        return Err(VerifyFailure::DiagonalNotUnit);
    }
    if lower.max_abs() > 1 || upper.max_abs() > 1 || middle.max_abs() > 1 {
        return Err(VerifyFailure::EntryOutOfBounds);
    }
    if !crate::matrix::is_defective_identity(middle) {
        return Err(VerifyFailure::NotDefectiveIdentity);
    }
    let relabeled = IntMatrix::from_fn(rows, cols, |i, j| b.get(black_perm[i], white_perm[j]));
    if relabeled != lower.mul(middle).mul(upper) {
        return Err(VerifyFailure::ProductMismatch);
    }
    Ok(())
}

pub fn verify_factorization(b: &IntMatrix, f: &LduFactorization) -> Result<(), VerifyFailure> {
    verify_parts(
        b,
        &f.black_perm,
        &f.white_perm,
        &f.lower,
        &f.middle.to_matrix(),
        &f.upper,
    )
}

pub use crate::matrix::is_defective_identity;

struct RecFactors {
    black_order: Vec<SquareId>,
    white_order: Vec<SquareId>,
    lower: IntMatrix,
    middle: DefectiveIdentity,
    upper: IntMatrix,
}

fn ldu_rec(disk: &QuadDisk, coloring: &Bicoloring, verify: bool) -> RecFactors {
    let plan = surgery::pipeline_plan(disk);
    let result = surgery::cut_and_paste(disk, &plan);
    let diagonal_color = coloring.color(result.removed_diagonal[0]);

    let (comp_orig, comp_colorings) = component_data(coloring, &result);
    let recs: Vec<RecFactors> = result
        .components
        .iter()
        .zip(comp_colorings.iter())
        .map(|(comp, comp_coloring)| ldu_rec(comp, comp_coloring, verify))
        .collect();

    let mut black_tail = Vec::new();
    let mut white_tail = Vec::new();
    for (c, rec) in recs.iter().enumerate() {
        black_tail.extend(rec.black_order.iter().map(|s| comp_orig[c][s.idx()]));
        white_tail.extend(rec.white_order.iter().map(|s| comp_orig[c][s.idx()]));
    }
    let step = step_factor_with_tails(disk, coloring, &result, &black_tail, &white_tail);

    // Fold the component factorizations into the step factors; in the white
    // frame the component factors transpose.
    let (k_rows, k_cols, comp_lowers, comp_uppers, comp_middles): (
        usize,
        usize,
        Vec<IntMatrix>,
        Vec<IntMatrix>,
        Vec<DefectiveIdentity>,
    ) = match diagonal_color {
        Color::Black => (
            step.rows_excised,
            step.cols_excised,
            recs.iter().map(|r| r.lower.clone()).collect(),
            recs.iter().map(|r| r.upper.clone()).collect(),
            recs.iter().map(|r| r.middle.clone()).collect(),
        ),
        Color::White => (
            step.rows_excised,
            step.cols_excised,
            recs.iter().map(|r| r.upper.transpose()).collect(),
            recs.iter().map(|r| r.lower.transpose()).collect(),
            recs.iter().map(|r| r.middle.transpose()).collect(),
        ),
    };

    let (frame, frame_lower, frame_upper) = match diagonal_color {
        Color::Black => (
            relabeled_matrix(disk, &step.black_order, &step.white_order),
            step.lower.clone(),
            step.upper.clone(),
        ),
        Color::White => (
            relabeled_matrix(disk, &step.black_order, &step.white_order).transpose(),
            step.upper.transpose(),
            step.lower.transpose(),
        ),
    };

    let lc_refs: Vec<&IntMatrix> = comp_lowers.iter().collect();
    let uc_refs: Vec<&IntMatrix> = comp_uppers.iter().collect();
    let lc = block_diag(&lc_refs);
    let uc = block_diag(&uc_refs);
    let lower = frame_lower.mul(&block2x2(
        &IntMatrix::identity(k_rows),
        &IntMatrix::zeros(k_rows, lc.rows()),
        &IntMatrix::zeros(lc.rows(), k_rows),
        &lc,
    ));
    let upper = block2x2(
        &IntMatrix::identity(k_cols),
        &IntMatrix::zeros(k_cols, uc.cols()),
        &IntMatrix::zeros(uc.rows(), k_cols),
        &uc,
    )
    .mul(&frame_upper);

    let mut units: Vec<(usize, usize)> = (0..k_cols.min(k_rows)).map(|i| (i, i)).collect();
    let (mut row_off, mut col_off) = (k_rows, k_cols);
    for dm in &comp_middles {
        units.extend(dm.units().iter().map(|&(r, c)| (row_off + r, col_off + c)));
        row_off += dm.rows();
        col_off += dm.cols();
    }
    let middle = DefectiveIdentity::from_units(frame.rows(), frame.cols(), units)
        .expect("assembled middle factor is a staircase");

    if verify {
        let product = lower.mul(&middle.to_matrix()).mul(&upper);
        if product != frame
            || !lower.is_lower_triangular()
            || !upper.is_upper_triangular()
            || lower.max_abs() > 1
            || upper.max_abs() > 1
        {
            panic!(
                "factorization step is inconsistent on:\n{}",
                disk.to_complex_text()
            );
        }
    }

    let (lower, middle, upper) = match diagonal_color {
        Color::Black => (lower, middle, upper),
        Color::White => (upper.transpose(), middle.transpose(), lower.transpose()),
    };
    RecFactors {
        black_order: step.black_order,
        white_order: step.white_order,
        lower,
        middle,
        upper,
    }
}

/// Factorization with the default coloring; internal identities verified.
pub fn ldu(disk: &QuadDisk) -> LduFactorization {
    ldu_with(disk, &disk.bicolor(), true)
}

/// Factorization with a caller-chosen coloring. `verify` re-checks every
/// internal identity; disabling it only skips the redundant checks, the
/// result is the same.
pub fn ldu_with(disk: &QuadDisk, coloring: &Bicoloring, verify: bool) -> LduFactorization {
    let rec = ldu_rec(disk, coloring, verify);
    let black_perm: Vec<usize> = rec
        .black_order
        .iter()
        .map(|&s| coloring.black_index(s).expect("black order lists black squares"))
        .collect();
    let white_perm: Vec<usize> = rec
        .white_order
        .iter()
        .map(|&s| coloring.white_index(s).expect("white order lists white squares"))
        .collect();
    let f = LduFactorization {
        black_perm,
        white_perm,
        lower: rec.lower,
        middle: rec.middle,
        upper: rec.upper,
    };
    if verify {
        let b = disk.black_to_white_matrix(coloring);
        verify_factorization(&b, &f).unwrap_or_else(|e| {
            panic!(
                "factorization verification failed ({e}) on:\n{}",
                disk.to_complex_text()
            )
        });
    }
    f
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::disk::QuadDisk;
    use crate::surgery::{cut_and_paste, plan_surgery};

    fn parse(text: &str) -> QuadDisk {
        QuadDisk::parse_board(text).unwrap()
    }

    fn rows(m: &IntMatrix) -> Vec<Vec<i64>> {
        m.to_rows()
    }

    #[test]
    fn block_ldu_identity_case() {
        let m = IntMatrix::identity(2);
        let n = IntMatrix::zeros(1, 1);
        let (l, d, u) = block_ldu(&m, 1, 1, &n, BlockVariant::Right).unwrap();
        assert_eq!(l, IntMatrix::identity(2));
        assert_eq!(d, IntMatrix::identity(2));
        assert_eq!(u, IntMatrix::identity(2));
    }

    #[test]
    fn block_ldu_all_ones() {
        let m = IntMatrix::from_rows(vec![vec![1, 1], vec![1, 1]]);
        let n = IntMatrix::from_rows(vec![vec![1]]);
        let (l, d, u) = block_ldu(&m, 1, 1, &n, BlockVariant::Right).unwrap();
        assert_eq!(rows(&l), vec![vec![1, 0], vec![1, 1]]);
        assert_eq!(rows(&d), vec![vec![1, 0], vec![0, 0]]);
        assert_eq!(rows(&u), vec![vec![1, 1], vec![0, 1]]);
    }

    #[test]
    fn block_ldu_hypothesis_rejected() {
        let m = IntMatrix::from_rows(vec![vec![1, 1], vec![1, 1]]);
        let n = IntMatrix::from_rows(vec![vec![0]]);
        assert_eq!(
            block_ldu(&m, 1, 1, &n, BlockVariant::Right).unwrap_err(),
            FactorError::HypothesisFailed
        );
    }

    /// 5x6 matrices with an engineered coupling block, both variants.
    #[test]
    fn block_ldu_random_engineered() {
        let mut state = 0x5eed5eed5eedu64;
        let mut next = move || {
            state = state
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            ((state >> 33) % 7) as i64 - 3
        };
        for _ in 0..25 {
            let (n, m, np, mp) = (3usize, 2usize, 2usize, 4usize);
            let m11 = IntMatrix::from_fn(n, np, |_, _| next());
            let m21 = IntMatrix::from_fn(m, np, |_, _| next());
            let m22 = IntMatrix::from_fn(m, mp, |_, _| next());
            let coupling = IntMatrix::from_fn(np, mp, |_, _| next());
            let m12 = m11.mul(&coupling);
            let full = crate::matrix::block2x2(&m11, &m12, &m21, &m22);
            let (l, d, u) = block_ldu(&full, n, np, &coupling, BlockVariant::Right).unwrap();
            assert_eq!(l.mul(&d).mul(&u), full);

            // Left variant with the mirrored hypothesis.
            let (n, np) = (2usize, 3usize);
            let m11 = IntMatrix::from_fn(n, np, |_, _| next());
            let m12 = IntMatrix::from_fn(n, mp - 1, |_, _| next());
            let coupling = IntMatrix::from_fn(m, n, |_, _| next());
            let m21 = coupling.mul(&m11);
            let m22 = IntMatrix::from_fn(m, mp - 1, |_, _| next());
            let full = crate::matrix::block2x2(&m11, &m12, &m21, &m22);
            let (l, d, u) = block_ldu(&full, n, np, &coupling, BlockVariant::Left).unwrap();
            assert_eq!(l.mul(&d).mul(&u), full);
        }
    }

    #[test]
    fn step_factor_two_by_three_balanced() {
        let d = parse("###\n###");
        let coloring = d.bicolor();
        let origin = d.vertex_by_name("0,0").unwrap();
        let diag = crate::diagonal::trace_diagonal(&d, origin).unwrap();
        let plan = plan_surgery(&d, &diag).unwrap();
        let result = cut_and_paste(&d, &plan);
        let step = step_factor(&d, &coloring, &result);
        assert_eq!(rows(&step.b11), vec![vec![1, 0], vec![1, 1]]);
        assert_eq!(rows(&step.delta_prime), vec![vec![1]]);
        // Full step identity in user terms.
        let b_rel = relabeled_matrix(&d, &step.black_order, &step.white_order);
        assert_eq!(step.lower.mul(&step.middle).mul(&step.upper), b_rel);
    }

    #[test]
    fn step_factor_two_by_two_unbalanced() {
        let d = parse("##\n##");
        let coloring = d.bicolor();
        let plan = surgery::pipeline_plan(&d);
        let result = cut_and_paste(&d, &plan);
        let step = step_factor(&d, &coloring, &result);
        assert_eq!((step.rows_excised, step.cols_excised), (2, 1));
        assert_eq!(rows(&step.b11), vec![vec![1], vec![1]]);
        let b_rel = relabeled_matrix(&d, &step.black_order, &step.white_order);
        assert_eq!(step.lower.mul(&step.middle).mul(&step.upper), b_rel);
        // Exactly one unit survives in the middle factor.
        let ones = (0..step.middle.rows())
            .flat_map(|i| (0..step.middle.cols()).map(move |j| (i, j)))
            .filter(|&(i, j)| step.middle.get(i, j) != 0)
            .count();
        assert_eq!(ones, 1);
    }

    #[test]
    fn ldu_domino() {
        let d = parse("##");
        let f = ldu(&d);
        assert_eq!(f.black_perm, vec![0]);
        assert_eq!(f.white_perm, vec![0]);
        assert_eq!(rows(&f.lower), vec![vec![1]]);
        assert_eq!(rows(&f.upper), vec![vec![1]]);
        assert_eq!(f.middle.rank(), 1);
    }

    #[test]
    fn ldu_single_square() {
        let d = parse("#");
        let f = ldu(&d);
        assert_eq!((f.black_count(), f.white_count()), (1, 0));
        assert_eq!(rows(&f.lower), vec![vec![1]]);
        assert_eq!(f.upper.rows(), 0);
        assert_eq!(f.middle.rank(), 0);
    }

    #[test]
    fn ldu_two_by_two_rank_one() {
        let d = parse("##\n##");
        let f = ldu(&d);
        assert_eq!(f.middle.rank(), 1);
        let b = d.black_to_white_matrix(&d.bicolor());
        verify_factorization(&b, &f).unwrap();
    }

    #[test]
    fn ldu_deterministic() {
        let d = parse("###\n.##\n.#.");
        assert_eq!(ldu(&d), ldu(&d));
    }

    #[test]
    fn ldu_on_non_board_disk() {
        let spiral = crate::disk::tests::spiral_disk();
        let coloring = spiral.bicolor();
        let f = ldu_with(&spiral, &coloring, true);
        let b = spiral.black_to_white_matrix(&coloring);
        verify_factorization(&b, &f).unwrap();
    }

    #[test]
    fn ldu_exhaustive_small_boards() {
        for cells in crate::enumerate::enumerate_cell_sets(6) {
            let d = QuadDisk::from_cells(&cells);
            let coloring = d.bicolor();
            let f = ldu_with(&d, &coloring, true);
            let b = d.black_to_white_matrix(&coloring);
            verify_factorization(&b, &f).unwrap();
        }
    }

    // The printed 6x7 fixture: a black-to-white matrix together with its
    // published factorization.
    pub(crate) fn fixture_matrix() -> IntMatrix {
        IntMatrix::from_rows(vec![
            vec![1, 1, 0, 1, 0, 0, 0],
            vec![0, 1, 1, 0, 1, 1, 0],
            vec![0, 0, 1, 0, 0, 1, 0],
            vec![1, 1, 0, 0, 0, 0, 1],
            vec![0, 0, 0, 0, 1, 1, 0],
            vec![0, 1, 1, 0, 0, 0, 1],
        ])
    }

    pub(crate) fn fixture_lower() -> IntMatrix {
        IntMatrix::from_rows(vec![
            vec![1, 0, 0, 0, 0, 0],
            vec![0, 1, 0, 0, 0, 0],
            vec![0, 0, 1, 0, 0, 0],
            vec![1, 0, 0, -1, 0, 0],
            vec![0, 0, 0, 0, 1, 0],
            vec![0, 1, 0, 0, -1, 1],
        ])
    }

    pub(crate) fn fixture_middle() -> IntMatrix {
        let units = vec![(0, 0), (1, 1), (2, 2), (3, 3), (4, 4), (5, 6)];
        DefectiveIdentity::from_units(6, 7, units).unwrap().to_matrix()
    }

    pub(crate) fn fixture_upper() -> IntMatrix {
        IntMatrix::from_rows(vec![
            vec![1, 1, 0, 1, 0, 0, 0],
            vec![0, 1, 1, 0, 1, 1, 0],
            vec![0, 0, 1, 0, 0, 1, 0],
            vec![0, 0, 0, 1, 0, 0, -1],
            vec![0, 0, 0, 0, 1, 1, 0],
            vec![0, 0, 0, 0, 0, 1, 0],
            vec![0, 0, 0, 0, 0, 0, 1],
        ])
    }

    #[test]
    fn fixture_factorization_verifies() {
        let b = fixture_matrix();
        let id6: Vec<usize> = (0..6).collect();
        let id7: Vec<usize> = (0..7).collect();
        verify_parts(
            &b,
            &id6,
            &id7,
            &fixture_lower(),
            &fixture_middle(),
            &fixture_upper(),
        )
        .unwrap();
        assert!(is_defective_identity(&fixture_middle()));
        assert_eq!(
            DefectiveIdentity::from_matrix(&fixture_middle()).unwrap().rank(),
            6
        );
    }

    #[test]
    fn fixture_detects_flipped_entry() {
        let b = fixture_matrix();
        let id6: Vec<usize> = (0..6).collect();
        let id7: Vec<usize> = (0..7).collect();
        let mut bad_upper = fixture_upper();
        bad_upper.set(3, 6, 1);
        assert_eq!(
            verify_parts(&b, &id6, &id7, &fixture_lower(), &fixture_middle(), &bad_upper),
            Err(VerifyFailure::ProductMismatch)
        );
    }

    #[test]
    fn fixture_detects_entry_bound() {
        let b = fixture_matrix();
        let id6: Vec<usize> = (0..6).collect();
        let id7: Vec<usize> = (0..7).collect();
        let mut bad_lower = fixture_lower();
        bad_lower.set(3, 0, 2);
        assert_eq!(
            verify_parts(&b, &id6, &id7, &bad_lower, &fixture_middle(), &fixture_upper()),
            Err(VerifyFailure::EntryOutOfBounds)
        );
    }
}
