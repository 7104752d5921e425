//! Direct solvers for tridiagonal and general banded systems.

use crate::error::{domain, BurgersError, Result};

/// Pivots smaller than this multiple of the original row's largest entry are
/// treated as zero.
pub const PIVOT_TOLERANCE: f64 = 1e-14;

/// True for pivots below the relative tolerance, and for NaN.
fn negligible(pivot: f64, scale: f64) -> bool {
    let tol = PIVOT_TOLERANCE * scale;
    pivot.is_nan() || tol.is_nan() || pivot.abs() <= tol
}

fn check_finite(name: &str, xs: &[f64]) -> Result<()> {
    match xs.iter().position(|v| !v.is_finite()) {
        Some(i) => domain(format!("non-finite entry in {name} at index {i}")),
        None => Ok(()),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TridiagonalSystem {
    pub lower: Vec<f64>,
    pub diag: Vec<f64>,
    pub upper: Vec<f64>,
    pub rhs: Vec<f64>,
}

impl TridiagonalSystem {
    pub fn new(lower: Vec<f64>, diag: Vec<f64>, upper: Vec<f64>, rhs: Vec<f64>) -> Result<Self> {
        let n = diag.len();
        if n == 0 {
            return domain("empty tridiagonal system");
        }
        if lower.len() != n - 1 || upper.len() != n - 1 || rhs.len() != n {
            return domain(format!(
                "inconsistent tridiagonal lengths: lower {}, diag {n}, upper {}, rhs {}",
                lower.len(),
                upper.len(),
                rhs.len()
            ));
        }
        check_finite("lower", &lower)?;
        check_finite("diag", &diag)?;
        check_finite("upper", &upper)?;
        check_finite("rhs", &rhs)?;
        Ok(Self {
            lower,
            diag,
            upper,
            rhs,
        })
    }

    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    /// `A x`
    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let n = self.len();
        (0..n)
            .map(|i| {
                let mut v = self.diag[i] * x[i];
                if i > 0 {
                    v += self.lower[i - 1] * x[i - 1];
                }
                if i + 1 < n {
                    v += self.upper[i] * x[i + 1];
                }
                v
            })
            .collect()
    }

    fn row_scale(&self, i: usize) -> f64 {
        let mut s = self.diag[i].abs();
        if i > 0 {
            s = s.max(self.lower[i - 1].abs());
        }
        if i + 1 < self.len() {
            s = s.max(self.upper[i].abs());
        }
        s
    }
}

/// Thomas algorithm (no pivoting).
pub fn solve_tridiagonal(sys: &TridiagonalSystem) -> Result<Vec<f64>> {
    let n = sys.len();
    let mut c = vec![0.0; n];
    let mut d = vec![0.0; n];
    let mut prev_c = 0.0;
    let mut prev_d = 0.0;
    for i in 0..n {
        let sub = if i > 0 { sys.lower[i - 1] } else { 0.0 };
        let pivot = sys.diag[i] - sub * prev_c;
        let scale = sys.row_scale(i);
        if negligible(pivot, scale) {
            return Err(BurgersError::Singular {
                row: i,
                pivot,
                scale,
            });
        }
        c[i] = if i + 1 < n { sys.upper[i] / pivot } else { 0.0 };
        d[i] = (sys.rhs[i] - sub * prev_d) / pivot;
        prev_c = c[i];
        prev_d = d[i];
    }
    for i in (0..n.saturating_sub(1)).rev() {
        d[i] -= c[i] * d[i + 1];
    }
    Ok(d)
}

/// Square matrix with `kl` sub-diagonals and `ku` super-diagonals, stored row
/// by row: row `i` holds columns `i - kl ..= i + ku`.
#[derive(Debug, Clone, PartialEq)]
pub struct BandedMatrix {
    n: usize,
    kl: usize,
    ku: usize,
    data: Vec<f64>,
}

impl BandedMatrix {
    pub fn zeros(n: usize, kl: usize, ku: usize) -> Self {
        Self {
            n,
            kl,
            ku,
            data: vec![0.0; n * (kl + ku + 1)],
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn kl(&self) -> usize {
        self.kl
    }

    pub fn ku(&self) -> usize {
        self.ku
    }

    fn in_band(&self, i: usize, j: usize) -> bool {
        i < self.n && j < self.n && j + self.kl >= i && j <= i + self.ku
    }

    fn slot(&self, i: usize, j: usize) -> usize {
        i * (self.kl + self.ku + 1) + (j + self.kl - i)
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        if self.in_band(i, j) {
            self.data[self.slot(i, j)]
        } else {
            0.0
        }
    }

    /// Panics if `(i, j)` lies outside the band.
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        assert!(
            self.in_band(i, j),
            "({i}, {j}) outside band ({}, {})",
            self.kl,
            self.ku
        );
        let k = self.slot(i, j);
        self.data[k] = v;
    }

    /// Panics if `(i, j)` lies outside the band.
    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        assert!(
            self.in_band(i, j),
            "({i}, {j}) outside band ({}, {})",
            self.kl,
            self.ku
        );
        let k = self.slot(i, j);
        self.data[k] += v;
    }

    fn columns(&self, i: usize) -> std::ops::Range<usize> {
        i.saturating_sub(self.kl)..(i + self.ku + 1).min(self.n)
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        (0..self.n)
            .map(|i| self.columns(i).map(|j| self.get(i, j) * x[j]).sum())
            .collect()
    }

    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        (0..self.n)
            .map(|i| (0..self.n).map(|j| self.get(i, j)).collect())
            .collect()
    }

    /// LU factorisation with partial pivoting restricted to the `kl` rows below
    /// the diagonal; fill-in widens the upper band to `kl + ku`.
    pub fn solve(&self, rhs: &[f64]) -> Result<Vec<f64>> {
        let n = self.n;
        if rhs.len() != n {
            return domain(format!(
                "rhs length {} does not match dimension {n}",
                rhs.len()
            ));
        }
        check_finite("band", &self.data)?;
        check_finite("rhs", rhs)?;
        let (kl, ku) = (self.kl, self.ku);
        // Working rows cover columns i - kl ..= i + kl + ku.
        let width = 2 * kl + ku + 1;
        let mut w = vec![0.0; n * width];
        let at = |i: usize, j: usize| i * width + (j + kl - i);
        let mut scale = vec![0.0f64; n];
        for i in 0..n {
            for j in self.columns(i) {
                let v = self.get(i, j);
                w[at(i, j)] = v;
                scale[i] = scale[i].max(v.abs());
            }
        }
        let mut b = rhs.to_vec();

        for k in 0..n {
            let last_row = (k + kl).min(n - 1);
            let mut piv = k;
            let mut best = w[at(k, k)].abs();
            for r in k + 1..=last_row {
                let v = w[at(r, k)].abs();
                if v > best {
                    best = v;
                    piv = r;
                }
            }
            let last_col = (k + kl + ku).min(n - 1);
            if piv != k {
                for j in k..=last_col {
                    let (x, y) = (at(k, j), at(piv, j));
                    w.swap(x, y);
                }
                b.swap(k, piv);
                scale.swap(k, piv);
            }
            let pivot = w[at(k, k)];
            if negligible(pivot, scale[k]) {
                return Err(BurgersError::Singular {
                    row: k,
                    pivot,
                    scale: scale[k],
                });
            }
            for r in k + 1..=last_row {
                let factor = w[at(r, k)] / pivot;
                if factor == 0.0 {
                    continue;
                }
                w[at(r, k)] = 0.0;
                for j in k + 1..=last_col {
                    w[at(r, j)] -= factor * w[at(k, j)];
                }
                b[r] -= factor * b[k];
            }
        }

        let mut x = vec![0.0; n];
        for i in (0..n).rev() {
            let last_col = (i + kl + ku).min(n - 1);
            let mut acc = b[i];
            for j in i + 1..=last_col {
                acc -= w[at(i, j)] * x[j];
            }
            x[i] = acc / w[at(i, i)];
        }
        Ok(x)
    }
}

/// A banded matrix together with its right-hand side.
#[derive(Debug, Clone, PartialEq)]
pub struct BandedSystem {
    pub matrix: BandedMatrix,
    pub rhs: Vec<f64>,
}

pub fn solve_banded(sys: &BandedSystem) -> Result<Vec<f64>> {
    sys.matrix.solve(&sys.rhs)
}
