//! Dense row-major matrices and the column-pivoted Householder QR used by
//! the linear models and weight initialization.

use serde::{Deserialize, Serialize};

/// Row-major dense matrix of `f64`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Mat {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Mat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Mat { rows, cols, data: vec![0.0; rows * cols] }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut m = Mat::zeros(rows, cols);
        for r in 0..rows {
            for c in 0..cols {
                m.data[r * cols + c] = f(r, c);
            }
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<f64>>) -> Self {
        let nr = rows.len();
        let nc = rows.first().map_or(0, |r| r.len());
        debug_assert!(rows.iter().all(|r| r.len() == nc));
        Mat { rows: nr, cols: nc, data: rows.into_iter().flatten().collect() }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: f64) {
        self.data[r * self.cols + c] = v;
    }

    #[inline]
    pub fn row(&self, r: usize) -> &[f64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    #[inline]
    pub fn row_mut(&mut self, r: usize) -> &mut [f64] {
        &mut self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    /// `A x` for a vector of length `cols`.
    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        debug_assert_eq!(x.len(), self.cols);
        (0..self.rows).map(|r| dot(self.row(r), x)).collect()
    }

    /// `Aᵀ x` for a vector of length `rows`.
    pub fn tr_matvec(&self, x: &[f64]) -> Vec<f64> {
        debug_assert_eq!(x.len(), self.rows);
        let mut out = vec![0.0; self.cols];
        for r in 0..self.rows {
            let row = self.row(r);
            let xr = x[r];
            for c in 0..self.cols {
                out[c] += row[c] * xr;
            }
        }
        out
    }

    /// `self += scale · u vᵀ` (outer-product accumulation).
    pub fn add_outer(&mut self, u: &[f64], v: &[f64], scale: f64) {
        debug_assert_eq!(u.len(), self.rows);
        debug_assert_eq!(v.len(), self.cols);
        for r in 0..self.rows {
            let s = scale * u[r];
            let row = self.row_mut(r);
            for c in 0..v.len() {
                row[c] += s * v[c];
            }
        }
    }

    pub fn fill(&mut self, v: f64) {
        self.data.fill(v);
    }
}

#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Least-squares solution of `A x ≈ b` with rank handling.
#[derive(Clone, Debug)]
pub struct LeastSquares {
    /// Full-length solution; dropped columns carry weight 0.
    pub solution: Vec<f64>,
    /// Original indices of columns removed by the pivot-magnitude policy.
    pub dropped: Vec<usize>,
    pub rank: usize,
}

/// Minimum-norm-ish least squares via Householder QR with column pivoting.
///
/// Columns whose pivot magnitude falls below `rel_tol` times the largest
/// pivot are dropped from the solve and reported in `dropped`.
pub fn lstsq(a: &Mat, b: &[f64], rel_tol: f64) -> LeastSquares {
    let n = a.rows();
    let p = a.cols();
    debug_assert_eq!(b.len(), n);

    // Work on column-major copies so reflections touch contiguous memory.
    let mut cols: Vec<Vec<f64>> = (0..p).map(|c| (0..n).map(|r| a.get(r, c)).collect()).collect();
    let mut rhs = b.to_vec();
    let mut perm: Vec<usize> = (0..p).collect();
    let kmax = n.min(p);

    let mut norms_sq: Vec<f64> = cols.iter().map(|c| dot(c, c)).collect();
    let norms_orig = norms_sq.clone();

    let mut diag = vec![0.0_f64; kmax];
    let mut reflectors: Vec<Vec<f64>> = Vec::with_capacity(kmax);
    let mut effective = 0usize;

    for k in 0..kmax {
        // Pivot: the trailing column with the largest residual norm, ties to
        // the lowest index.
        let mut best = k;
        for j in (k + 1)..p {
            if norms_sq[j] > norms_sq[best] {
                best = j;
            }
        }
        if best != k {
            cols.swap(k, best);
            perm.swap(k, best);
            norms_sq.swap(k, best);
        }

        // Householder vector for rows k.. of column k.
        let x0 = cols[k][k];
        let norm_x: f64 = cols[k][k..].iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm_x == 0.0 {
            diag[k] = 0.0;
            reflectors.push(Vec::new());
            effective = k + 1;
            continue;
        }
        let alpha = if x0 >= 0.0 { -norm_x } else { norm_x };
        let mut v: Vec<f64> = cols[k][k..].to_vec();
        v[0] -= alpha;
        let vtv = dot(&v, &v);
        diag[k] = alpha;

        if vtv > 0.0 {
            for col in cols.iter_mut().take(p).skip(k) {
                let tail = &mut col[k..];
                let c = 2.0 * dot(&v, tail) / vtv;
                if c != 0.0 {
                    for (t, vi) in tail.iter_mut().zip(&v) {
                        *t -= c * vi;
                    }
                }
            }
            let tail = &mut rhs[k..];
            let c = 2.0 * dot(&v, tail) / vtv;
            for (t, vi) in tail.iter_mut().zip(&v) {
                *t -= c * vi;
            }
        }
        reflectors.push(v);
        effective = k + 1;

        // Downdate trailing norms; recompute when cancellation bites.
        for j in (k + 1)..p {
            let a_kj = cols[j][k];
            norms_sq[j] -= a_kj * a_kj;
            if norms_sq[j] < 1e-12 * norms_orig[perm[j]].max(1.0) {
                norms_sq[j] = cols[j][(k + 1)..].iter().map(|v| v * v).sum();
            }
        }
    }

    // Rank: first pivot below rel_tol × the largest pivot magnitude.
    let max_piv = diag[..effective].iter().fold(0.0_f64, |m, d| m.max(d.abs()));
    let mut rank = 0;
    while rank < effective && diag[rank].abs() > rel_tol * max_piv && diag[rank].abs() > 0.0 {
        rank += 1;
    }

    // Back-substitution on the leading rank×rank triangle. R[i][j] lives in
    // cols[j][i] for i ≤ j after the reflections.
    let mut xr = vec![0.0_f64; rank];
    for i in (0..rank).rev() {
        let mut s = rhs[i];
        for j in (i + 1)..rank {
            s -= cols[j][i] * xr[j];
        }
        xr[i] = s / diag[i];
    }

    let mut solution = vec![0.0_f64; p];
    for (k, &x) in xr.iter().enumerate() {
        solution[perm[k]] = x;
    }
    let mut dropped: Vec<usize> = perm[rank..].to_vec();
    dropped.sort_unstable();

    let _ = reflectors;
    LeastSquares { solution, dropped, rank }
}
