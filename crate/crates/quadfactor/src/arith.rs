//! Consumer arithmetic on top of the factorization, plus independent
//! brute-force oracles.
//!
//! The oracles (fraction-free determinant, exact rank, signed matching
//! enumeration, Smith normal form) deliberately share no code with the
//! factorization pipeline: they exist to catch its bugs.

use std::fmt;

use crate::factor::LduFactorization;
use crate::matrix::{permutation_sign, IntMatrix};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ArithError {
    NonSquare { rows: usize, cols: usize },
    TooLarge { n: usize, max: usize },
    ShapeMismatch,
}

impl fmt::Display for ArithError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ArithError::NonSquare { rows, cols } => {
                write!(f, "matrix is {rows}x{cols}, expected square")
            }
            ArithError::TooLarge { n, max } => {
                write!(f, "instance size {n} exceeds the enumeration cap {max}")
            }
            ArithError::ShapeMismatch => write!(f, "vector length does not match the matrix"),
        }
    }
}

impl std::error::Error for ArithError {}

/// Determinant read off the factorization: permutation parities, triangular
/// diagonals, and whether the middle factor has full rank.
pub fn det_via_ldu(f: &LduFactorization) -> Result<i64, ArithError> {
    let (b, w) = (f.black_count(), f.white_count());
    if b != w {
        return Err(ArithError::NonSquare { rows: b, cols: w });
    }
    if f.middle.rank() < b {
        return Ok(0);
    }
    let mut det = permutation_sign(&f.black_perm) * permutation_sign(&f.white_perm);
    for d in f.lower.diagonal() {
        det *= d;
    }
    for d in f.upper.diagonal() {
        det *= d;
    }
    Ok(det)
}

/// Rank is the number of unit entries of the middle factor; the triangular
/// factors are invertible over the integers, so this is also the rank over
/// the rationals and over every prime field.
pub fn rank_via_ldu(f: &LduFactorization) -> usize {
    f.middle.rank()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SolveOutcome {
    Solution(Vec<i64>),
    /// Certificate of rational inconsistency: a zero row of the middle factor
    /// where the transformed right-hand side does not vanish.
    NoSolution { zero_row: usize, residual: i64 },
}

impl SolveOutcome {
    pub fn solution(&self) -> Option<&[i64]> {
        match self {
            SolveOutcome::Solution(x) => Some(x),
            SolveOutcome::NoSolution { .. } => None,
        }
    }
}

/// Solves `B x = v` in integers through the factorization. Free coordinates
/// of the lift are set to zero; the returned vector always satisfies the
/// system exactly.
pub fn solve_integer(f: &LduFactorization, v: &[i64]) -> Result<SolveOutcome, ArithError> {
    let b = f.black_count();
    if v.len() != b {
        return Err(ArithError::ShapeMismatch);
    }
    // Permute, then forward-substitute through L (diagonal entries are +-1,
    // so division is exact by construction).
    let permuted: Vec<i64> = f.black_perm.iter().map(|&i| v[i]).collect();
    let mut y = vec![0i64; b];
    for i in 0..b {
        let mut acc = permuted[i];
        for j in 0..i {
            acc -= f.lower.get(i, j) * y[j];
        }
        y[i] = acc * f.lower.get(i, i);
    }
    for zero_row in f.middle.zero_rows() {
        if y[zero_row] != 0 {
            return Ok(SolveOutcome::NoSolution {
                zero_row,
                residual: y[zero_row],
            });
        }
    }
    let w = f.white_count();
    let mut z = vec![0i64; w];
    for &(r, c) in f.middle.units() {
        z[c] = y[r];
    }
    let mut x_rel = vec![0i64; w];
    for j in (0..w).rev() {
        let mut acc = z[j];
        for j2 in j + 1..w {
            acc -= f.upper.get(j, j2) * x_rel[j2];
        }
        x_rel[j] = acc * f.upper.get(j, j);
    }
    let mut x = vec![0i64; w];
    for (j, &user) in f.white_perm.iter().enumerate() {
        x[user] = x_rel[j];
    }
    let check = f.reconstructed_matrix().mul_vec(&x);
    assert_eq!(check, v, "solver output satisfies the system exactly");
    Ok(SolveOutcome::Solution(x))
}

/// Fraction-free (Bareiss) determinant, an independent oracle.
pub fn det_oracle(b: &IntMatrix) -> Result<i64, ArithError> {
    if b.rows() != b.cols() {
        return Err(ArithError::NonSquare {
            rows: b.rows(),
            cols: b.cols(),
        });
    }
    let n = b.rows();
    let mut a: Vec<Vec<i128>> = (0..n)
        .map(|i| b.row(i).iter().map(|&v| v as i128).collect())
        .collect();
    let mut sign = 1i128;
    let mut prev = 1i128;
    for k in 0..n {
        if a[k][k] == 0 {
            match (k + 1..n).find(|&r| a[r][k] != 0) {
                Some(r) => {
                    a.swap(k, r);
                    sign = -sign;
                }
                None => return Ok(0),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) / prev;
            }
            a[i][k] = 0;
        }
        prev = a[k][k];
    }
    let det = if n == 0 { 1 } else { sign * a[n - 1][n - 1] };
    Ok(i64::try_from(det).expect("determinant fits in i64"))
}

/// Exact rank over the rationals (`modulus = 0`) or over GF(p).
pub fn rank_oracle(b: &IntMatrix, modulus: u64) -> usize {
    if modulus == 0 {
        rank_rational(b)
    } else {
        rank_modular(b, modulus)
    }
}

fn rank_rational(b: &IntMatrix) -> usize {
    // Fraction-free elimination with full pivoting; column swaps do not
    // change the rank and keep the Bareiss divisions exact.
    let (rows, cols) = (b.rows(), b.cols());
    let mut a: Vec<Vec<i128>> = (0..rows)
        .map(|i| b.row(i).iter().map(|&v| v as i128).collect())
        .collect();
    let mut prev = 1i128;
    let mut rank = 0usize;
    for k in 0..rows.min(cols) {
        let pivot = (k..rows)
            .flat_map(|i| (k..cols).map(move |j| (i, j)))
            .find(|&(i, j)| a[i][j] != 0);
        let (pi, pj) = match pivot {
            Some(p) => p,
            None => break,
        };
        a.swap(k, pi);
        for row in a.iter_mut() {
            row.swap(k, pj);
        }
        for i in k + 1..rows {
            for j in k + 1..cols {
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) / prev;
            }
            a[i][k] = 0;
        }
        prev = a[k][k];
        rank += 1;
    }
    rank
}

fn rank_modular(b: &IntMatrix, p: u64) -> usize {
    let p = p as i128;
    let (rows, cols) = (b.rows(), b.cols());
    let mut a: Vec<Vec<i128>> = (0..rows)
        .map(|i| b.row(i).iter().map(|&v| (v as i128).rem_euclid(p)).collect())
        .collect();
    let mut rank = 0usize;
    let mut row = 0usize;
    for col in 0..cols {
        let pivot = (row..rows).find(|&i| a[i][col] % p != 0);
        let pi = match pivot {
            Some(i) => i,
            None => continue,
        };
        a.swap(row, pi);
        let inv = mod_inverse(a[row][col].rem_euclid(p), p);
        for j in col..cols {
            a[row][j] = a[row][j] * inv % p;
        }
        for i in 0..rows {
            if i != row && a[i][col] % p != 0 {
                let factor = a[i][col].rem_euclid(p);
                for j in col..cols {
                    a[i][j] = (a[i][j] - factor * a[row][j]).rem_euclid(p);
                }
            }
        }
        rank += 1;
        row += 1;
        if row == rows {
            break;
        }
    }
    rank
}

fn mod_inverse(a: i128, p: i128) -> i128 {
    // Extended Euclid; p is prime and a nonzero mod p.
    let (mut old_r, mut r) = (a, p);
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
    }
    assert_eq!(old_r.abs(), 1, "inverse exists modulo a prime");
    (old_s * old_r.signum()).rem_euclid(p)
}

/// True when `B x = v` has a rational solution (rank comparison against the
/// augmented matrix).
pub fn rationally_solvable(b: &IntMatrix, v: &[i64]) -> bool {
    assert_eq!(b.rows(), v.len());
    let augmented = IntMatrix::from_fn(b.rows(), b.cols() + 1, |i, j| {
        if j < b.cols() {
            b.get(i, j)
        } else {
            v[i]
        }
    });
    rank_oracle(b, 0) == rank_oracle(&augmented, 0)
}

/// Hard cap on signed matching enumeration; beyond this the backtracking
/// blows up factorially.
pub const MATCHING_CAP: usize = 14;

/// Sum of permutation signs over perfect matchings of the 0/1 matrix; equals
/// the determinant by definition, computed without any elimination.
pub fn signed_matchings(b: &IntMatrix) -> Result<i64, ArithError> {
    if b.rows() != b.cols() {
        return Err(ArithError::NonSquare {
            rows: b.rows(),
            cols: b.cols(),
        });
    }
    let n = b.rows();
    if n > MATCHING_CAP {
        return Err(ArithError::TooLarge {
            n,
            max: MATCHING_CAP,
        });
    }
    let mut chosen: Vec<usize> = Vec::with_capacity(n);
    let mut used = vec![false; n];
    let mut total = 0i64;
    fn recurse(
        b: &IntMatrix,
        row: usize,
        chosen: &mut Vec<usize>,
        used: &mut Vec<bool>,
        parity: u32,
        total: &mut i64,
    ) {
        let n = b.rows();
        if row == n {
            *total += if parity % 2 == 0 { 1 } else { -1 };
            return;
        }
        for col in 0..n {
            if used[col] || b.get(row, col) == 0 {
                continue;
            }
            let inversions = chosen.iter().filter(|&&c| c > col).count() as u32;
            used[col] = true;
            chosen.push(col);
            recurse(b, row + 1, chosen, used, parity + inversions, total);
            chosen.pop();
            used[col] = false;
        }
    }
    recurse(b, 0, &mut chosen, &mut used, 0, &mut total);
    Ok(total)
}

/// Invariant factors of the Smith normal form (nonzero diagonal).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SnfReport {
    pub invariant_factors: Vec<i64>,
}

/// Smith normal form by exact row/column reduction.
pub fn smith_normal_form(b: &IntMatrix) -> SnfReport {
    let (rows, cols) = (b.rows(), b.cols());
    let mut a: Vec<Vec<i128>> = (0..rows)
        .map(|i| b.row(i).iter().map(|&v| v as i128).collect())
        .collect();
    let mut factors = Vec::new();
    let mut t = 0usize;
    'outer: while t < rows.min(cols) {
        // Find a pivot of minimal absolute value in the remaining block.
        let mut pivot: Option<(usize, usize)> = None;
        for i in t..rows {
            for j in t..cols {
                if a[i][j] != 0
                    && pivot.map_or(true, |(pi, pj)| a[i][j].abs() < a[pi][pj].abs())
                {
                    pivot = Some((i, j));
                }
            }
        }
        let (pi, pj) = match pivot {
            Some(p) => p,
            None => break,
        };
        a.swap(t, pi);
        for row in a.iter_mut() {
            row.swap(t, pj);
        }

        // Clear the pivot column.
        for i in t + 1..rows {
            if a[i][t] != 0 {
                let q = a[i][t] / a[t][t];
                for j in t..cols {
                    a[i][j] -= q * a[t][j];
                }
                if a[i][t] != 0 {
                    a.swap(t, i);
                    continue 'outer;
                }
            }
        }
        // Clear the pivot row.
        for j in t + 1..cols {
            if a[t][j] != 0 {
                let q = a[t][j] / a[t][t];
                for row in a.iter_mut().skip(t) {
                    row[j] -= q * row[t];
                }
                if a[t][j] != 0 {
                    for row in a.iter_mut() {
                        row.swap(t, j);
                    }
                    continue 'outer;
                }
            }
        }
        // Divisibility: the pivot must divide every remaining entry.
        for i in t + 1..rows {
            for j in t + 1..cols {
                if a[i][j] % a[t][t] != 0 {
                    for jj in t..cols {
                        let add = a[i][jj];
                        a[t][jj] += add;
                    }
                    continue 'outer;
                }
            }
        }
        factors.push(a[t][t].abs());
        t += 1;
    }
    let invariant_factors = factors
        .into_iter()
        .map(|f| i64::try_from(f).expect("invariant factor fits in i64"))
        .collect();
    SnfReport { invariant_factors }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::disk::QuadDisk;
    use crate::factor::{ldu, tests as factor_tests};

    fn parse(text: &str) -> QuadDisk {
        QuadDisk::parse_board(text).unwrap()
    }

    #[test]
    fn det_examples() {
        let f = ldu(&parse("##"));
        assert_eq!(det_via_ldu(&f).unwrap(), 1);

        let f = ldu(&parse("##\n##"));
        assert_eq!(det_via_ldu(&f).unwrap(), 0);

        let f = ldu(&parse("###\n###"));
        assert_eq!(det_via_ldu(&f).unwrap().abs(), 1);

        let f = ldu(&parse("#"));
        assert!(matches!(det_via_ldu(&f), Err(ArithError::NonSquare { .. })));
    }

    #[test]
    fn rank_examples() {
        assert_eq!(rank_via_ldu(&ldu(&parse("##"))), 1);
        assert_eq!(rank_via_ldu(&ldu(&parse("##\n##"))), 1);
    }

    #[test]
    fn solve_examples() {
        let f = ldu(&parse("##"));
        assert_eq!(
            solve_integer(&f, &[5]).unwrap(),
            SolveOutcome::Solution(vec![5])
        );

        let d = parse("##\n##");
        let f = ldu(&d);
        assert!(matches!(
            solve_integer(&f, &[1, 0]).unwrap(),
            SolveOutcome::NoSolution { .. }
        ));
        let b = d.black_to_white_matrix(&d.bicolor());
        match solve_integer(&f, &[2, 2]).unwrap() {
            SolveOutcome::Solution(x) => assert_eq!(b.mul_vec(&x), vec![2, 2]),
            other => panic!("expected a solution, got {other:?}"),
        }
    }

    #[test]
    fn det_oracle_examples() {
        let all_ones = IntMatrix::from_rows(vec![vec![1, 1], vec![1, 1]]);
        assert_eq!(det_oracle(&all_ones).unwrap(), 0);
        assert_eq!(det_oracle(&IntMatrix::identity(3)).unwrap(), 1);
        assert_eq!(det_oracle(&IntMatrix::identity(0)).unwrap(), 1);
    }

    /// Naive cofactor expansion, the oracle for the oracle.
    fn det_cofactor(m: &IntMatrix) -> i64 {
        let n = m.rows();
        if n == 0 {
            return 1;
        }
        let mut det = 0;
        for j in 0..n {
            if m.get(0, j) == 0 {
                continue;
            }
            let minor = IntMatrix::from_fn(n - 1, n - 1, |r, c| {
                m.get(r + 1, if c < j { c } else { c + 1 })
            });
            let sign = if j % 2 == 0 { 1 } else { -1 };
            det += sign * m.get(0, j) * det_cofactor(&minor);
        }
        det
    }

    #[test]
    fn det_oracle_matches_cofactor_on_random_sign_matrices() {
        let mut state = 0xfeedu64;
        let mut next = move || {
            state = state
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            if (state >> 33) % 2 == 0 {
                1i64
            } else {
                -1i64
            }
        };
        for _ in 0..40 {
            let m = IntMatrix::from_fn(5, 5, |_, _| next());
            assert_eq!(det_oracle(&m).unwrap(), det_cofactor(&m));
        }
    }

    #[test]
    fn rank_oracle_examples() {
        let all_ones = IntMatrix::from_rows(vec![vec![1, 1], vec![1, 1]]);
        assert_eq!(rank_oracle(&all_ones, 0), 1);
        assert_eq!(rank_oracle(&all_ones, 2), 1);
        let b = factor_tests::fixture_matrix();
        assert_eq!(rank_oracle(&b, 0), 6);
        assert_eq!(rank_oracle(&b, 2), 6);
        assert_eq!(rank_oracle(&b, 3), 6);
    }

    #[test]
    fn signed_matchings_examples() {
        let all_ones = IntMatrix::from_rows(vec![vec![1, 1], vec![1, 1]]);
        assert_eq!(signed_matchings(&all_ones).unwrap(), 0);
        assert_eq!(
            signed_matchings(&IntMatrix::from_rows(vec![vec![1]])).unwrap(),
            1
        );
        let big = IntMatrix::identity(MATCHING_CAP + 1);
        assert!(matches!(
            signed_matchings(&big),
            Err(ArithError::TooLarge { .. })
        ));
    }

    /// Unsigned matching count, enumeration only used by this test.
    fn count_matchings(b: &IntMatrix) -> usize {
        fn recurse(b: &IntMatrix, row: usize, used: &mut Vec<bool>) -> usize {
            if row == b.rows() {
                return 1;
            }
            let mut total = 0;
            for col in 0..b.cols() {
                if !used[col] && b.get(row, col) == 1 {
                    used[col] = true;
                    total += recurse(b, row + 1, used);
                    used[col] = false;
                }
            }
            total
        }
        recurse(b, 0, &mut vec![false; b.cols()])
    }

    #[test]
    fn two_by_three_signed_vs_unsigned() {
        let d = parse("###\n###");
        let b = d.black_to_white_matrix(&d.bicolor());
        // Three tilings, signed count collapses to +-1.
        assert_eq!(count_matchings(&b), 3);
        assert_eq!(signed_matchings(&b).unwrap().abs(), 1);
        assert_eq!(signed_matchings(&b).unwrap(), det_oracle(&b).unwrap());
    }

    #[test]
    fn snf_examples() {
        let report = smith_normal_form(&IntMatrix::rect_identity(2, 3));
        assert_eq!(report.invariant_factors, vec![1, 1]);
        let report = smith_normal_form(&IntMatrix::from_rows(vec![vec![2]]));
        assert_eq!(report.invariant_factors, vec![2]);
        let report = smith_normal_form(&factor_tests::fixture_matrix());
        assert_eq!(report.invariant_factors, vec![1, 1, 1, 1, 1, 1]);
        let report = smith_normal_form(&IntMatrix::zeros(2, 2));
        assert!(report.invariant_factors.is_empty());
        // Divisibility chain on a matrix with nontrivial factors.
        let m = IntMatrix::from_rows(vec![vec![2, 0], vec![0, 6]]);
        let report = smith_normal_form(&m);
        assert_eq!(report.invariant_factors, vec![2, 6]);
        let m = IntMatrix::from_rows(vec![vec![2, 0], vec![0, 3]]);
        let report = smith_normal_form(&m);
        assert_eq!(report.invariant_factors, vec![1, 6]);
    }

    #[test]
    fn rational_solvability() {
        let all_ones = IntMatrix::from_rows(vec![vec![1, 1], vec![1, 1]]);
        assert!(!rationally_solvable(&all_ones, &[1, 0]));
        assert!(rationally_solvable(&all_ones, &[2, 2]));
    }
}
