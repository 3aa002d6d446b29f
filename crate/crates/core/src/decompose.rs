//! Constructive convex decompositions of PSD matrices.
//!
//! [`horn_vectors`] writes a density matrix as a uniform mixture of `d` pure states.
//! [`szarek_split`] writes a PSD two-by-two block matrix as the midpoint of two matrices of
//! rank at most the block size, with the same diagonal blocks. Applied to a Choi matrix
//! with a qubit output this splits a channel into two generalized extreme points.
//! [`verify_ar4`] checks supplied block-column candidates for the general problem.

use serde::Serialize;

use crate::channels::ChoiMatrix;
use crate::numerics::{
    self, c64, herm_eig_unchecked, max_dist, numerical_rank, psd_eig, psd_power_tol, swap_legs, ComplexMatrix,
    ComplexVector, RANK_TOL,
};
use crate::{Error, Result};

/// Verdict tolerance of [`verify_ar4`].
pub const AR4_TOL: f64 = 1e-8;
/// Off-diagonal mass outside the diagonal-block supports tolerated by [`szarek_split`].
pub const SUPPORT_TOL: f64 = 1e-8;

const SUM_TOL: f64 = 1e-10;

/// Unitary `R` with `R·diag(λ)·R†` having constant diagonal `1/d`.
///
/// Repeatedly rotates the largest remaining diagonal entry against the smallest; each real
/// rotation sets the larger one exactly to `1/d`, so at most `d − 1` rotations are used.
pub fn schur_horn_equalize(lambda: &[f64], d: usize) -> Result<ComplexMatrix> {
    if lambda.len() != d || d == 0 {
        return Err(Error::shape(format!("spectrum has length {}, expected {d}", lambda.len())));
    }
    let sum: f64 = lambda.iter().sum();
    if lambda.iter().any(|&l| !(l >= -SUM_TOL)) || (sum - 1.0).abs() > SUM_TOL {
        return Err(Error::param(format!("spectrum must be nonnegative and sum to 1 (sum {sum})")));
    }
    let t = 1.0 / d as f64;
    let mut m = numerics::real_diag(lambda);
    let mut r = numerics::identity(d);
    let mut open: Vec<usize> = (0..d).collect();
    for _ in 0..d.saturating_sub(1) {
        let diag = |k: usize| m[(k, k)].re;
        let i = *open.iter().max_by(|&&a, &&b| diag(a).total_cmp(&diag(b))).unwrap();
        let j = *open.iter().min_by(|&&a, &&b| diag(a).total_cmp(&diag(b))).unwrap();
        let (ai, aj) = (diag(i), diag(j));
        if ai - aj <= 1e-15 || i == j {
            break;
        }
        let c2 = ((t - aj) / (ai - aj)).clamp(0.0, 1.0);
        let (c, s) = (c2.sqrt(), (1.0 - c2).sqrt());
        let mut g = numerics::identity(d);
        g[(i, i)] = c64::new(c, 0.0);
        g[(j, j)] = c64::new(c, 0.0);
        g[(i, j)] = c64::new(-s, 0.0);
        g[(j, i)] = c64::new(s, 0.0);
        m = &g * m * g.transpose();
        r = &g * r;
        m[(i, i)] = c64::new(t, 0.0);
        open.retain(|&k| k != i);
    }
    Ok(r)
}

fn check_density(a: &ComplexMatrix) -> Result<numerics::EigenDecomposition> {
    let eig = psd_eig(a)?;
    let tr: f64 = eig.eigenvalues.iter().sum();
    if (tr - 1.0).abs() > SUM_TOL {
        return Err(Error::param(format!("matrix has trace {tr}, expected 1")));
    }
    Ok(eig)
}

/// Unit vectors `x_m` with `A = (1/d) Σ x_m x_m†`.
pub fn horn_vectors(a: &ComplexMatrix) -> Result<Vec<ComplexVector>> {
    let eig = check_density(a)?;
    let d = a.nrows();
    let total: f64 = eig.eigenvalues.iter().sum();
    let lambda: Vec<f64> = eig.eigenvalues.iter().map(|l| l / total).collect();
    let r = schur_horn_equalize(&lambda, d)?;
    let u = &eig.eigenvectors * r.adjoint();
    let sqrt_lambda = numerics::real_diag(&eig.eigenvalues.iter().map(|l| l.sqrt()).collect::<Vec<_>>());
    let b = &r * sqrt_lambda * r.adjoint();
    let ub = (u * b).scale((d as f64).sqrt());
    Ok((0..d).map(|m| ub.column(m).into_owned()).collect())
}

/// PSD matrix of `d2 × d2` blocks, each `d1 × d1`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BlockMatrix {
    pub d1: usize,
    pub d2: usize,
    #[serde(with = "numerics::json")]
    pub matrix: ComplexMatrix,
    /// `M = Σ_j A_jj`.
    #[serde(with = "numerics::json")]
    pub diagonal_block_sum: ComplexMatrix,
}

fn block_sum(m: &ComplexMatrix, d1: usize, d2: usize) -> ComplexMatrix {
    (0..d2).fold(ComplexMatrix::zeros(d1, d1), |acc, j| acc + m.view((j * d1, j * d1), (d1, d1)))
}

impl BlockMatrix {
    pub fn new(matrix: ComplexMatrix, d1: usize) -> Result<Self> {
        let n = matrix.nrows();
        if d1 == 0 || !matrix.is_square() || !n.is_multiple_of(d1) {
            return Err(Error::shape(format!("a {}x{} matrix has no {d1}x{d1} block structure", n, matrix.ncols())));
        }
        psd_eig(&matrix)?;
        let d2 = n / d1;
        let diagonal_block_sum = block_sum(&matrix, d1, d2);
        Ok(Self { d1, d2, matrix, diagonal_block_sum })
    }

    /// Choi matrix with legs swapped to output ⊗ input, so blocks are indexed by output
    /// and the diagonal block sum is `I/d_in`.
    pub fn from_choi(choi: &ChoiMatrix) -> Result<Self> {
        Self::new(swap_legs(&choi.matrix, (choi.d_in, choi.d_out)), choi.d_in)
    }

    pub fn block(&self, j: usize, k: usize) -> ComplexMatrix {
        self.matrix.view((j * self.d1, k * self.d1), (self.d1, self.d1)).into_owned()
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Residuals {
    /// `max |Σ w_m T_m − A|`.
    pub reconstruction: f64,
    pub term_ranks: Vec<usize>,
    /// Worst deviation of a term's diagonal blocks from those of `A`.
    pub diagonal_blocks: f64,
    pub within_tolerance: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct Decomposition {
    pub kind: &'static str,
    pub d1: usize,
    pub d2: usize,
    pub weights: Vec<f64>,
    #[serde(with = "numerics::json::vec")]
    pub terms: Vec<ComplexMatrix>,
    pub rank_bound: usize,
    pub residuals: Residuals,
}

impl Decomposition {
    fn assemble(kind: &'static str, a: &BlockMatrix, terms: Vec<ComplexMatrix>, rank_bound: usize, compare_blocks: bool) -> Self {
        let weights = vec![1.0 / terms.len() as f64; terms.len()];
        let sum = terms.iter().zip(&weights).fold(ComplexMatrix::zeros(a.matrix.nrows(), a.matrix.ncols()), |acc, (t, w)| acc + t.scale(*w));
        let reconstruction = max_dist(&sum, &a.matrix);
        let term_ranks: Vec<usize> = terms.iter().map(|t| numerical_rank(t, RANK_TOL)).collect();
        let diagonal_blocks = if compare_blocks {
            terms
                .iter()
                .flat_map(|t| (0..a.d2).map(move |j| (t, j)))
                .map(|(t, j)| {
                    let v = t.view((j * a.d1, j * a.d1), (a.d1, a.d1)).into_owned();
                    max_dist(&v, &a.block(j, j))
                })
                .fold(0.0, f64::max)
        } else {
            0.0
        };
        let within_tolerance = reconstruction < 1e-9 && diagonal_blocks < 1e-9 && term_ranks.iter().all(|&r| r <= rank_bound);
        Decomposition {
            kind,
            d1: a.d1,
            d2: a.d2,
            weights,
            terms,
            rank_bound,
            residuals: Residuals { reconstruction, term_ranks, diagonal_blocks, within_tolerance },
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("decomposition serializes")
    }
}

/// [`horn_vectors`] packaged as a decomposition into the rank-one terms `x_m x_m†`.
pub fn horn_decomposition(a: &ComplexMatrix) -> Result<Decomposition> {
    let xs = horn_vectors(a)?;
    let block = BlockMatrix::new(a.clone(), 1)?;
    let terms = xs.iter().map(numerics::projector).collect();
    Ok(Decomposition::assemble("horn", &block, terms, 1, false))
}

/// Splits `A = [[A11, A12], [A12†, A22]]` into `(B1 + B2)/2` with each `B_m` of rank at
/// most `d1` and diagonal blocks `A11`, `A22`.
pub fn szarek_split(a: &BlockMatrix) -> Result<Decomposition> {
    if a.d2 != 2 {
        return Err(Error::shape(format!("two-block split needs d2 = 2, got {}", a.d2)));
    }
    let d1 = a.d1;
    let (a11, a12, a22) = (a.block(0, 0), a.block(0, 1), a.block(1, 1));
    let scale = numerics::max_abs(&a.matrix).max(f64::MIN_POSITIVE);
    let p1 = psd_power_tol(&a11, 0.0, RANK_TOL)?;
    let p2 = psd_power_tol(&a22, 0.0, RANK_TOL)?;
    let leak = max_dist(&(&p1 * &a12 * &p2), &a12);
    if leak > SUPPORT_TOL * scale {
        return Err(Error::Numerical(format!("off-diagonal block leaves the diagonal-block supports by {leak:.3e}")));
    }
    let w = psd_power_tol(&a11, -0.5, RANK_TOL)? * &a12 * psd_power_tol(&a22, -0.5, RANK_TOL)?;
    let s = numerics::svd(&w);
    let h11 = psd_power_tol(&a11, 0.5, RANK_TOL)?;
    let h22 = psd_power_tol(&a22, 0.5, RANK_TOL)?;
    let terms = [1.0, -1.0]
        .iter()
        .map(|&sign| {
            let phases: Vec<c64> = s
                .singulars
                .iter()
                .map(|&sig| {
                    let theta = sig.clamp(0.0, 1.0).acos();
                    c64::from_polar(1.0, sign * theta)
                })
                .collect();
            let wm = &s.left * ComplexMatrix::from_diagonal(&ComplexVector::from_vec(phases)) * &s.right.adjoint();
            let off = &h11 * wm * &h22;
            let mut b = ComplexMatrix::zeros(2 * d1, 2 * d1);
            b.view_mut((0, 0), (d1, d1)).copy_from(&a11);
            b.view_mut((d1, d1), (d1, d1)).copy_from(&a22);
            b.view_mut((0, d1), (d1, d1)).copy_from(&off);
            b.view_mut((d1, 0), (d1, d1)).copy_from(&off.adjoint());
            b
        })
        .collect();
    Ok(Decomposition::assemble("szarek", a, terms, d1, true))
}

#[derive(Debug, Clone, Serialize)]
pub struct ChoiSplit {
    pub first: ChoiMatrix,
    pub second: ChoiMatrix,
    pub decomposition: Decomposition,
}

/// Writes a channel with qubit output as the midpoint of two channels of Choi rank at most
/// `d_in`. The decomposition terms are in output ⊗ input order; `first` and `second` are
/// ordinary Choi matrices.
pub fn split_choi(choi: &ChoiMatrix) -> Result<ChoiSplit> {
    if choi.d_out != 2 {
        return Err(Error::shape(format!("channel split needs a qubit output, got d_out = {}", choi.d_out)));
    }
    let block = BlockMatrix::from_choi(choi)?;
    let decomposition = szarek_split(&block)?;
    let back = |t: &ComplexMatrix| {
        let m = swap_legs(t, (choi.d_out, choi.d_in));
        ChoiMatrix::new(choi.d_in, choi.d_out, (&m + m.adjoint()).scale(0.5))
    };
    let first = back(&decomposition.terms[0])?;
    let second = back(&decomposition.terms[1])?;
    Ok(ChoiSplit { first, second, decomposition })
}

/// Block columns `X` with `X X† = B` and `d1` columns, from the top eigenvectors of `B`.
pub fn block_column(b: &ComplexMatrix, d1: usize) -> Result<ComplexMatrix> {
    let eig = psd_eig(b)?;
    let rank = numerical_rank(b, RANK_TOL);
    if rank > d1 {
        return Err(Error::param(format!("term has rank {rank} > {d1} and has no block-column form")));
    }
    Ok(ComplexMatrix::from_fn(b.nrows(), d1, |i, k| eig.eigenvectors[(i, k)] * eig.eigenvalues[k].sqrt()))
}

#[derive(Debug, Clone, Serialize)]
pub struct Ar4Report {
    pub reconstruction: f64,
    /// `max |Σ_k X_km X_km† − M|` per candidate.
    pub constraint: Vec<f64>,
    pub ranks: Vec<usize>,
    pub rank_bound: usize,
    /// Candidate with the largest constraint residual.
    pub worst_term: usize,
    pub verified: bool,
}

/// Checks `A = Σ_m (1/d2) X_m X_m†` with `Σ_k X_km X_km† = M` and `rank X_m ≤ rank_bound`,
/// where `X_km` is the k-th `d1 × d1` block of the block column `X_m`.
pub fn verify_ar4(a: &BlockMatrix, candidates: &[ComplexMatrix], rank_bound: usize) -> Result<Ar4Report> {
    let (d1, d2) = (a.d1, a.d2);
    if candidates.len() != d2 {
        return Err(Error::shape(format!("expected {d2} candidates, got {}", candidates.len())));
    }
    if let Some(x) = candidates.iter().find(|x| x.shape() != (d1 * d2, d1)) {
        return Err(Error::shape(format!("candidate is {}x{}, expected {}x{d1}", x.nrows(), x.ncols(), d1 * d2)));
    }
    let n = d1 * d2;
    let mut sum = ComplexMatrix::zeros(n, n);
    let mut constraint = Vec::with_capacity(d2);
    let mut ranks = Vec::with_capacity(d2);
    for x in candidates {
        let b = x * x.adjoint();
        sum += b.unscale(d2 as f64);
        constraint.push(max_dist(&block_sum(&b, d1, d2), &a.diagonal_block_sum));
        ranks.push(numerical_rank(x, RANK_TOL));
    }
    let reconstruction = max_dist(&sum, &a.matrix);
    let worst_term = (0..d2).max_by(|&i, &j| constraint[i].total_cmp(&constraint[j])).unwrap_or(0);
    let verified =
        reconstruction < AR4_TOL && constraint.iter().all(|&c| c < AR4_TOL) && ranks.iter().all(|&r| r <= rank_bound);
    Ok(Ar4Report { reconstruction, constraint, ranks, rank_bound, worst_term, verified })
}

/// Horn vectors as `d × 1` block columns for [`verify_ar4`] with `d1 = 1`.
pub fn horn_candidates(a: &ComplexMatrix) -> Result<(BlockMatrix, Vec<ComplexMatrix>)> {
    let xs = horn_vectors(a)?;
    let block = BlockMatrix::new(a.clone(), 1)?;
    Ok((block, xs.into_iter().map(|x| ComplexMatrix::from_column_slice(x.len(), 1, x.as_slice())).collect()))
}

/// Two-block split converted to block columns for [`verify_ar4`] with `d2 = 2`.
pub fn szarek_candidates(a: &BlockMatrix) -> Result<Vec<ComplexMatrix>> {
    szarek_split(a)?.terms.iter().map(|t| block_column(t, a.d1)).collect()
}

/// Smallest eigenvalue of a Hermitian matrix.
pub fn min_eigenvalue(m: &ComplexMatrix) -> f64 {
    herm_eig_unchecked(m).eigenvalues.last().copied().unwrap_or(0.0)
}
