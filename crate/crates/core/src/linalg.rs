//! Extended-precision dense linear algebra: symmetric storage, Cholesky,
//! and a cyclic Jacobi eigensolver.
//!
//! Jacobi is slower than QR-type methods but trivially correct in
//! non-native arithmetic, which is what matters at dimension <= 25.

use rug::{ops::Pow, Float};

use crate::error::{Error, Result};
use crate::precision::PrecisionContext;

/// Default cap on Jacobi sweeps before reporting failure.
pub const DEFAULT_MAX_SWEEPS: usize = 100;

/// Symmetric matrix with the upper triangle stored row-wise.
#[derive(Debug, Clone)]
pub struct SymmetricMatrix {
    dim: usize,
    upper: Vec<Float>,
}

impl SymmetricMatrix {
    /// Build from a function of (row, col), evaluated on the upper triangle.
    pub fn from_fn<F>(dim: usize, mut entry: F) -> Self
    where
        F: FnMut(usize, usize) -> Float,
    {
        assert!(dim > 0, "dimension must be positive");
        let mut upper = Vec::with_capacity(dim * (dim + 1) / 2);
        for i in 0..dim {
            for j in i..dim {
                upper.push(entry(i, j));
            }
        }
        Self { dim, upper }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    fn index(&self, i: usize, j: usize) -> usize {
        let (r, c) = if i <= j { (i, j) } else { (j, i) };
        r * self.dim - r * (r + 1) / 2 + c
    }

    pub fn get(&self, i: usize, j: usize) -> &Float {
        &self.upper[self.index(i, j)]
    }

    pub fn to_dense(&self) -> Vec<Vec<Float>> {
        (0..self.dim)
            .map(|i| (0..self.dim).map(|j| self.get(i, j).clone()).collect())
            .collect()
    }

    /// Largest |entry|, as a scale reference.
    pub fn max_abs(&self, prec: u32) -> Float {
        let mut m = Float::with_val(prec, 0);
        for v in &self.upper {
            let a = Float::with_val(prec, v.abs_ref());
            if a > m {
                m = a;
            }
        }
        m
    }
}

/// Cholesky factor L (lower triangular, row-wise dense) of a positive
/// definite matrix. Fails with `IllConditioned` when a pivot is not
/// strictly positive at working precision.
pub fn cholesky(matrix: &SymmetricMatrix, ctx: &PrecisionContext) -> Result<Vec<Vec<Float>>> {
    let prec = ctx.prec_bits();
    let n = matrix.dim();
    let mut lower: Vec<Vec<Float>> = (0..n)
        .map(|i| (0..=i).map(|_| Float::with_val(prec, 0)).collect())
        .collect();
    for i in 0..n {
        for j in 0..=i {
            let mut sum = Float::with_val(prec, matrix.get(i, j));
            for k in 0..j {
                sum -= Float::with_val(prec, &lower[i][k] * &lower[j][k]);
            }
            if i == j {
                if !(sum > 0) {
                    return Err(Error::IllConditioned {
                        index: i,
                        detail: format!("Cholesky pivot {:e}", sum),
                    });
                }
                lower[i][j] = sum.sqrt();
            } else {
                lower[i][j] = sum / &lower[j][j];
            }
        }
    }
    Ok(lower)
}

/// Rough condition estimate of the factored matrix: (max diag L / min diag L)^2.
pub fn condition_estimate(lower: &[Vec<Float>], prec: u32) -> Float {
    let mut lo: Option<Float> = None;
    let mut hi: Option<Float> = None;
    for (i, row) in lower.iter().enumerate() {
        let d = Float::with_val(prec, row[i].abs_ref());
        if lo.as_ref().map_or(true, |v| d < *v) {
            lo = Some(d.clone());
        }
        if hi.as_ref().map_or(true, |v| d > *v) {
            hi = Some(d);
        }
    }
    match (lo, hi) {
        (Some(lo), Some(hi)) => Float::with_val(prec, hi / lo).square(),
        _ => Float::with_val(prec, 1),
    }
}

/// Forward substitution: overwrite each column b of `rhs` with L^-1 b.
fn forward_substitute(lower: &[Vec<Float>], rhs: &mut [Vec<Float>], prec: u32) {
    let n = lower.len();
    let cols = rhs[0].len();
    for c in 0..cols {
        for i in 0..n {
            let mut sum = Float::with_val(prec, &rhs[i][c]);
            for k in 0..i {
                sum -= Float::with_val(prec, &lower[i][k] * &rhs[k][c]);
            }
            rhs[i][c] = sum / &lower[i][i];
        }
    }
}

/// Eigenvalues of a dense symmetric matrix by cyclic Jacobi rotations,
/// ascending. The iteration stops once the off-diagonal Frobenius norm
/// falls below ~10^-(digits+3) of the matrix scale.
pub fn jacobi_eigenvalues(
    mut a: Vec<Vec<Float>>,
    ctx: &PrecisionContext,
    max_sweeps: usize,
) -> Result<Vec<Float>> {
    let prec = ctx.prec_bits();
    let n = a.len();
    if n == 1 {
        return Ok(vec![a[0][0].clone()]);
    }

    let mut scale = Float::with_val(prec, 0);
    for row in &a {
        for v in row {
            scale += Float::with_val(prec, v * v);
        }
    }
    let scale = scale.sqrt();
    let threshold = {
        let eps = Float::with_val(prec, 10).pow(-(ctx.decimal_digits() as i32) - 3);
        Float::with_val(prec, &scale * &eps)
    };
    if scale.is_zero() {
        return Ok((0..n).map(|_| Float::with_val(prec, 0)).collect());
    }

    let off_norm = |a: &Vec<Vec<Float>>| {
        let mut off = Float::with_val(prec, 0);
        for p in 0..n {
            for q in (p + 1)..n {
                off += Float::with_val(prec, &a[p][q] * &a[p][q]);
            }
        }
        off.sqrt()
    };

    let sorted_diagonal = |a: &Vec<Vec<Float>>| {
        let mut eigs: Vec<Float> = (0..n).map(|i| a[i][i].clone()).collect();
        eigs.sort_by(|x, y| x.partial_cmp(y).unwrap());
        eigs
    };

    let one = Float::with_val(prec, 1);
    for _sweep in 0..max_sweeps {
        if off_norm(&a) <= threshold {
            return Ok(sorted_diagonal(&a));
        }

        for p in 0..n {
            for q in (p + 1)..n {
                let apq = Float::with_val(prec, &a[p][q]);
                if apq.is_zero() {
                    continue;
                }
                // Rotation angle from tan(2θ) = 2a_pq / (a_qq - a_pp).
                let diff = Float::with_val(prec, &a[q][q] - &a[p][p]);
                let theta = Float::with_val(prec, &diff / &apq) / 2u32;
                let t = if theta.is_zero() {
                    one.clone()
                } else {
                    let mag = Float::with_val(prec, theta.abs_ref());
                    let root = Float::with_val(prec, &mag * &mag) + &one;
                    let denom = Float::with_val(prec, mag + root.sqrt());
                    let t = Float::with_val(prec, &one / denom);
                    if theta < 0 {
                        -t
                    } else {
                        t
                    }
                };
                let c = {
                    let t2 = Float::with_val(prec, &t * &t);
                    let root = Float::with_val(prec, t2 + &one).sqrt();
                    Float::with_val(prec, &one / root)
                };
                let s = Float::with_val(prec, &t * &c);
                let tau = Float::with_val(prec, &s / Float::with_val(prec, &one + &c));

                let delta = Float::with_val(prec, &t * &apq);
                a[p][p] -= &delta;
                a[q][q] += &delta;
                a[p][q] = Float::with_val(prec, 0);
                a[q][p] = Float::with_val(prec, 0);

                for r in 0..n {
                    if r == p || r == q {
                        continue;
                    }
                    let arp = Float::with_val(prec, &a[r][p]);
                    let arq = Float::with_val(prec, &a[r][q]);
                    let new_rp =
                        Float::with_val(prec, &arp - &s * Float::with_val(prec, &arq + &tau * &arp));
                    let new_rq =
                        Float::with_val(prec, &arq + &s * Float::with_val(prec, &arp - &tau * &arq));
                    a[r][p] = new_rp.clone();
                    a[p][r] = new_rp;
                    a[r][q] = new_rq.clone();
                    a[q][r] = new_rq;
                }
            }
        }
    }

    if off_norm(&a) <= threshold {
        return Ok(sorted_diagonal(&a));
    }
    Err(Error::NoConvergence {
        sweeps: max_sweeps,
        off_norm: format!("{:e}", off_norm(&a)),
    })
}

/// Eigenvalues of the pencil (H, S) with S positive definite: Cholesky
/// S = LL^T, then Jacobi on L^-1 H L^-T.
pub fn generalized_eigenvalues(
    h: &SymmetricMatrix,
    s: &SymmetricMatrix,
    ctx: &PrecisionContext,
    max_sweeps: usize,
) -> Result<Vec<Float>> {
    if h.dim() != s.dim() {
        return Err(Error::InvalidInput(format!(
            "dimension mismatch: H is {}, S is {}",
            h.dim(),
            s.dim()
        )));
    }
    let prec = ctx.prec_bits();
    let lower = cholesky(s, ctx)?;
    let n = h.dim();

    // Y = L^-1 H  (columns of H solved in place)
    let mut y = h.to_dense();
    forward_substitute(&lower, &mut y, prec);
    // G = Y L^-T = (L^-1 Y^T)^T; Y^T columns are rows of Y.
    let mut yt: Vec<Vec<Float>> = (0..n)
        .map(|i| (0..n).map(|j| y[j][i].clone()).collect())
        .collect();
    forward_substitute(&lower, &mut yt, prec);
    let mut g: Vec<Vec<Float>> = (0..n)
        .map(|i| (0..n).map(|j| yt[j][i].clone()).collect())
        .collect();
    // G is symmetric up to roundoff; average to keep Jacobi exact.
    for i in 0..n {
        for j in (i + 1)..n {
            let avg = Float::with_val(prec, &g[i][j] + &g[j][i]) / 2u32;
            g[i][j] = avg.clone();
            g[j][i] = avg;
        }
    }
    jacobi_eigenvalues(g, ctx, max_sweeps)
}
