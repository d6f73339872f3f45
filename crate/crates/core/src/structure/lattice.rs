//! Integer kernels of integer matrices through column Hermite reduction.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

/// Column-style Hermite reduction `M·U = [H | 0]` with `U` unimodular.
#[derive(Debug, Clone)]
pub struct ColumnHermite {
    /// `M·U`, row-major.
    pub reduced: Vec<Vec<BigInt>>,
    /// The unimodular transform, row-major `ncols × ncols`.
    pub transform: Vec<Vec<BigInt>>,
    pub rank: usize,
}

fn column_op(m: &mut [Vec<BigInt>], a: usize, b: usize, coeffs: [&BigInt; 4]) {
    // (col a, col b) ← (s·a + t·b, u·a + w·b)
    let [s, t, u, w] = coeffs;
    for row in m.iter_mut() {
        let (xa, xb) = (row[a].clone(), row[b].clone());
        row[a] = s * &xa + t * &xb;
        row[b] = u * &xa + w * &xb;
    }
}

fn negate_column(m: &mut [Vec<BigInt>], a: usize) {
    for row in m.iter_mut() {
        row[a] = -row[a].clone();
    }
}

/// Reduces an `r × n` integer matrix by unimodular column operations.
pub fn column_hermite(matrix: &[Vec<BigInt>], ncols: usize) -> ColumnHermite {
    let mut m: Vec<Vec<BigInt>> = matrix.to_vec();
    let mut u: Vec<Vec<BigInt>> = (0..ncols)
        .map(|i| (0..ncols).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }).collect())
        .collect();
    let mut pivot = 0;
    for i in 0..m.len() {
        if pivot == ncols {
            break;
        }
        for c in pivot + 1..ncols {
            if m[i][c].is_zero() {
                continue;
            }
            let (x, y) = (m[i][pivot].clone(), m[i][c].clone());
            let e = x.extended_gcd(&y);
            let (g, s, t) = (e.gcd, e.x, e.y);
            let (minus_y_g, x_g) = (-(&y / &g), &x / &g);
            column_op(&mut m, pivot, c, [&s, &t, &minus_y_g, &x_g]);
            column_op(&mut u, pivot, c, [&s, &t, &minus_y_g, &x_g]);
        }
        if !m[i][pivot].is_zero() {
            if m[i][pivot].is_negative() {
                negate_column(&mut m, pivot);
                negate_column(&mut u, pivot);
            }
            pivot += 1;
        }
    }
    ColumnHermite {
        reduced: m,
        transform: u,
        rank: pivot,
    }
}

/// A basis of `{m ∈ Z^n : M m = 0}`, one vector per entry.
pub fn integer_kernel(matrix: &[Vec<BigInt>], ncols: usize) -> Vec<Vec<BigInt>> {
    let h = column_hermite(matrix, ncols);
    (h.rank..ncols)
        .map(|c| h.transform.iter().map(|row| row[c].clone()).collect())
        .collect()
}
