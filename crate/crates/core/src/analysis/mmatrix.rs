//! Dense square matrices, the M-matrix test, and the comparison matrix built
//! from coefficient bounds of a linear delay system.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest dimension the M-matrix test accepts.
pub const MAX_DIM: usize = 12;

/// Square row-major matrix.
#[derive(Clone, PartialEq, Serialize, Deserialize)]
pub struct Matrix {
    n: usize,
    data: Vec<f64>,
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.rows()).finish()
    }
}

impl Matrix {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![0.0; n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * n);
        for r in rows {
            let r = r.as_ref();
            if r.len() != n {
                return Err(Error::Precondition(format!(
                    "matrix must be square: row of length {} in a {n}-row matrix",
                    r.len()
                )));
            }
            data.extend_from_slice(r);
        }
        Ok(Self { n, data })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.data.chunks(self.n.max(1)).take(self.n)
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        self.rows().map(<[f64]>::to_vec).collect()
    }

    /// Leading `k x k` block.
    pub fn leading(&self, k: usize) -> Self {
        let mut m = Self::zeros(k);
        for i in 0..k {
            for j in 0..k {
                m[(i, j)] = self[(i, j)];
            }
        }
        m
    }

    /// Determinant by Gaussian elimination with partial pivoting.
    pub fn det(&self) -> f64 {
        let n = self.n;
        let mut a = self.data.clone();
        let mut det = 1.0;
        for col in 0..n {
            let pivot = (col..n)
                .max_by(|&i, &j| a[i * n + col].abs().total_cmp(&a[j * n + col].abs()))
                .unwrap();
            if a[pivot * n + col] == 0.0 {
                return 0.0;
            }
            if pivot != col {
                for j in 0..n {
                    a.swap(col * n + j, pivot * n + j);
                }
                det = -det;
            }
            let d = a[col * n + col];
            det *= d;
            for i in col + 1..n {
                let factor = a[i * n + col] / d;
                if factor != 0.0 {
                    for j in col..n {
                        a[i * n + j] -= factor * a[col * n + j];
                    }
                }
            }
        }
        det
    }

    /// Inverse by Gauss-Jordan elimination; `None` when singular.
    pub fn inverse(&self) -> Option<Self> {
        let n = self.n;
        let mut a = self.data.clone();
        let mut inv = Self::identity(n).data;
        let scale = a.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        for col in 0..n {
            let pivot = (col..n)
                .max_by(|&i, &j| a[i * n + col].abs().total_cmp(&a[j * n + col].abs()))
                .unwrap();
            if a[pivot * n + col].abs() <= 1e-14 * scale {
                return None;
            }
            if pivot != col {
                for j in 0..n {
                    a.swap(col * n + j, pivot * n + j);
                    inv.swap(col * n + j, pivot * n + j);
                }
            }
            let d = a[col * n + col];
            for j in 0..n {
                a[col * n + j] /= d;
                inv[col * n + j] /= d;
            }
            for i in 0..n {
                if i == col {
                    continue;
                }
                let factor = a[i * n + col];
                if factor != 0.0 {
                    for j in 0..n {
                        a[i * n + j] -= factor * a[col * n + j];
                        inv[i * n + j] -= factor * inv[col * n + j];
                    }
                }
            }
        }
        Some(Self { n, data: inv })
    }

    /// Off-diagonal entries are all `<= 0`.
    pub fn is_z_matrix(&self) -> bool {
        self.first_positive_off_diagonal().is_none()
    }

    fn first_positive_off_diagonal(&self) -> Option<(usize, usize)> {
        (0..self.n)
            .flat_map(|i| (0..self.n).map(move |j| (i, j)))
            .find(|&(i, j)| i != j && self[(i, j)] > 0.0)
    }
}

impl std::ops::Index<(usize, usize)> for Matrix {
    type Output = f64;

    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.n + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.n + j]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "reason", rename_all = "snake_case")]
pub enum MMatrixFailure {
    /// Entry `(row, col)` off the diagonal is positive.
    NotZMatrix { row: usize, col: usize },
    /// The leading principal minor of this order is not positive.
    NonPositiveMinor { order: usize, value: f64 },
}

/// Outcome of [`is_m_matrix`], with both characterizations recorded.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MMatrixCheck {
    pub is_m_matrix: bool,
    pub failure: Option<MMatrixFailure>,
    /// Leading principal minors of orders `1..=n`.
    pub minors: Vec<f64>,
    /// The inverse exists and is entrywise `>= 0`.
    pub inverse_nonnegative: bool,
    /// For a Z-matrix, the minors test and the inverse test disagree. This
    /// can only come from rounding on a nearly singular matrix.
    pub disagreement: bool,
}

/// M-matrix test: nonpositive off-diagonals and all leading principal
/// minors `> 0`.
pub fn is_m_matrix(m: &Matrix) -> Result<MMatrixCheck> {
    is_m_matrix_with_margin(m, 0.0)
}

/// As [`is_m_matrix`], requiring every leading minor to exceed `margin`.
pub fn is_m_matrix_with_margin(m: &Matrix, margin: f64) -> Result<MMatrixCheck> {
    let n = m.dim();
    if n == 0 || n > MAX_DIM {
        return Err(Error::Precondition(format!(
            "M-matrix test supports 1 <= n <= {MAX_DIM}, got {n}"
        )));
    }
    if m.data.iter().any(|v| !v.is_finite()) {
        return Err(Error::Precondition("matrix entries must be finite".into()));
    }
    let minors: Vec<f64> = (1..=n).map(|k| m.leading(k).det()).collect();
    let inverse_nonnegative = m.inverse().is_some_and(|inv| {
        let scale = inv.data.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        inv.data.iter().all(|&v| v >= -1e-12 * scale)
    });
    let z = m.first_positive_off_diagonal();
    let minors_positive = minors.iter().all(|&d| d > 0.0);
    let failure = match z {
        Some((row, col)) => Some(MMatrixFailure::NotZMatrix { row, col }),
        None => {
            minors
                .iter()
                .position(|&d| d <= margin)
                .map(|k| MMatrixFailure::NonPositiveMinor {
                    order: k + 1,
                    value: minors[k],
                })
        }
    };
    Ok(MMatrixCheck {
        is_m_matrix: failure.is_none(),
        failure,
        minors,
        inverse_nonnegative,
        disagreement: z.is_none() && minors_positive != inverse_nonnegative,
    })
}

/// Comparison matrix built from coefficient bounds of
/// `x_i' = -a_ii(t) x_i + sum_{j != i} a_ij(t) x_j + sum_j f_ij(t, x_j(h_ij(t)))`
/// with `|f_ij(t, u)| <= b_ij(t) |u|`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonMatrix {
    pub matrix: Matrix,
    /// `a_i <= inf a_ii(t)`.
    pub diagonal_lower: Vec<f64>,
    /// `A_ij = sup |a_ij(t)|`, `i != j`; diagonal ignored.
    pub coupling_sup: Matrix,
    /// `B_ij = sup |b_ij(t)|`.
    pub delayed_sup: Matrix,
}

/// Entries `b_ii = a_i - B_ii`, `b_ij = -A_ij - B_ij` (`i != j`). If the
/// result is an M-matrix, every solution of the bounded system tends to 0.
pub fn comparison_matrix(
    diagonal_lower: &[f64],
    coupling_sup: &Matrix,
    delayed_sup: &Matrix,
) -> Result<ComparisonMatrix> {
    let n = diagonal_lower.len();
    if coupling_sup.dim() != n || delayed_sup.dim() != n {
        return Err(Error::Precondition(format!(
            "bounds must all be of dimension {n}"
        )));
    }
    if let Some(a) = diagonal_lower
        .iter()
        .find(|&&a| !(a > 0.0 && a.is_finite()))
    {
        return Err(Error::Precondition(format!(
            "diagonal lower bounds must be > 0, got {a}"
        )));
    }
    for i in 0..n {
        for j in 0..n {
            let off = if i != j { coupling_sup[(i, j)] } else { 0.0 };
            if !(off >= 0.0 && delayed_sup[(i, j)] >= 0.0) {
                return Err(Error::Precondition(format!(
                    "sup bounds must be >= 0 (entry {i},{j})"
                )));
            }
        }
    }
    let mut matrix = Matrix::zeros(n);
    for i in 0..n {
        for j in 0..n {
            matrix[(i, j)] = if i == j {
                diagonal_lower[i] - delayed_sup[(i, i)]
            } else {
                -coupling_sup[(i, j)] - delayed_sup[(i, j)]
            };
        }
    }
    Ok(ComparisonMatrix {
        matrix,
        diagonal_lower: diagonal_lower.to_vec(),
        coupling_sup: coupling_sup.clone(),
        delayed_sup: delayed_sup.clone(),
    })
}
