//! Dense complex linear algebra kernel.
//!
//! Matrices are `nalgebra::DMatrix<Complex64>`. Everything here is a pure function of
//! its inputs. Eigen- and singular-value routines return descending spectra with
//! eigenvectors canonicalized so that repeated runs on the same input are bit-identical.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::{Error, Result};

#[allow(non_camel_case_types)]
pub type c64 = nalgebra::Complex<f64>;

pub type ComplexMatrix = DMatrix<c64>;
pub type ComplexVector = DVector<c64>;

/// Relative singular-value threshold used for numerical rank and supports.
pub const RANK_TOL: f64 = 1e-8;
/// Relative window in which slightly negative eigenvalues of PSD inputs are clamped to 0.
pub const PSD_CLAMP: f64 = 1e-12;
/// Relative Hermiticity tolerance.
pub const HERMITIAN_TOL: f64 = 1e-12;

const PHASE_EPS: f64 = 1e-10;

#[derive(Debug, Clone)]
pub struct EigenDecomposition {
    /// Descending.
    pub eigenvalues: Vec<f64>,
    /// Unitary, eigenvectors as columns.
    pub eigenvectors: ComplexMatrix,
}

impl EigenDecomposition {
    pub fn reconstruct(&self) -> ComplexMatrix {
        let diag = ComplexMatrix::from_diagonal(&DVector::from_iterator(
            self.eigenvalues.len(),
            self.eigenvalues.iter().map(|&l| c64::new(l, 0.0)),
        ));
        &self.eigenvectors * diag * self.eigenvectors.adjoint()
    }

    pub fn vector(&self, k: usize) -> ComplexVector {
        self.eigenvectors.column(k).into_owned()
    }

    /// Spectral function applied eigenvalue-wise: `V f(Λ) V†`.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> ComplexMatrix {
        let v = &self.eigenvectors;
        let n = v.nrows();
        let mut scaled = v.clone();
        for (k, &l) in self.eigenvalues.iter().enumerate() {
            let s = f(l);
            for i in 0..n {
                scaled[(i, k)] *= s;
            }
        }
        scaled * v.adjoint()
    }
}

#[derive(Debug, Clone)]
pub struct SvdDecomposition {
    pub left: ComplexMatrix,
    /// Descending, nonnegative.
    pub singulars: Vec<f64>,
    pub right: ComplexMatrix,
}

impl SvdDecomposition {
    pub fn reconstruct(&self) -> ComplexMatrix {
        let k = self.singulars.len();
        let mut us = self.left.columns(0, k).into_owned();
        for (j, &s) in self.singulars.iter().enumerate() {
            us.column_mut(j).scale_mut(s);
        }
        us * self.right.columns(0, k).adjoint()
    }
}

pub fn max_abs(m: &ComplexMatrix) -> f64 {
    m.iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

/// Max-entry distance.
pub fn max_dist(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    assert_eq!(a.shape(), b.shape(), "max_dist shape mismatch");
    a.iter().zip(b.iter()).fold(0.0, |acc, (x, y)| acc.max((x - y).norm()))
}

pub fn hermitian_residual(m: &ComplexMatrix) -> f64 {
    max_dist(m, &m.adjoint())
}

pub fn is_hermitian(m: &ComplexMatrix) -> bool {
    m.is_square() && hermitian_residual(m) <= HERMITIAN_TOL * max_abs(m).max(f64::MIN_POSITIVE)
}

pub fn trace(m: &ComplexMatrix) -> c64 {
    m.diagonal().iter().sum()
}

pub fn identity(d: usize) -> ComplexMatrix {
    ComplexMatrix::identity(d, d)
}

pub fn real_diag(values: &[f64]) -> ComplexMatrix {
    ComplexMatrix::from_diagonal(&DVector::from_iterator(
        values.len(),
        values.iter().map(|&x| c64::new(x, 0.0)),
    ))
}

/// `|ψ⟩⟨ψ|` for a (not necessarily normalized) vector.
pub fn projector(psi: &ComplexVector) -> ComplexMatrix {
    psi * psi.adjoint()
}

/// Basis vector `|e_j⟩` in dimension `d`.
pub fn basis(d: usize, j: usize) -> ComplexVector {
    let mut v = ComplexVector::zeros(d);
    v[j] = c64::new(1.0, 0.0);
    v
}

/// `|e_j⟩⟨e_k|`.
pub fn matrix_unit(d: usize, j: usize, k: usize) -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(d, d);
    m[(j, k)] = c64::new(1.0, 0.0);
    m
}

/// Maximally entangled vector `(1/√d) Σ_j |e_j⟩⊗|e_j⟩`.
pub fn max_entangled(d: usize) -> ComplexVector {
    let mut v = ComplexVector::zeros(d * d);
    let a = 1.0 / (d as f64).sqrt();
    for j in 0..d {
        v[j * d + j] = c64::new(a, 0.0);
    }
    v
}

fn canonical_phase(v: &mut ComplexMatrix, col: usize) {
    let n = v.nrows();
    let scale = (0..n).fold(0.0f64, |a, i| a.max(v[(i, col)].norm()));
    if scale == 0.0 {
        return;
    }
    if let Some(i) = (0..n).find(|&i| v[(i, col)].norm() > PHASE_EPS * scale) {
        let z = v[(i, col)];
        let phase = z.conj() / z.norm();
        for r in 0..n {
            v[(r, col)] *= phase;
        }
    }
}

/// Eigendecomposition of a Hermitian matrix with descending eigenvalues.
///
/// Each eigenvector is rotated so that its first non-negligible component is real and
/// positive; together with the stable descending sort this makes the output a
/// deterministic function of the input.
pub fn herm_eig(m: &ComplexMatrix) -> Result<EigenDecomposition> {
    if !m.is_square() {
        return Err(Error::shape(format!("herm_eig needs a square matrix, got {}x{}", m.nrows(), m.ncols())));
    }
    let res = hermitian_residual(m);
    if res > HERMITIAN_TOL * max_abs(m).max(f64::MIN_POSITIVE) {
        return Err(Error::NotHermitian(res));
    }
    Ok(herm_eig_unchecked(m))
}

/// As [`herm_eig`] but symmetrizes instead of checking.
pub(crate) fn herm_eig_unchecked(m: &ComplexMatrix) -> EigenDecomposition {
    let n = m.nrows();
    if n == 0 {
        return EigenDecomposition { eigenvalues: vec![], eigenvectors: ComplexMatrix::zeros(0, 0) };
    }
    let sym = (m + m.adjoint()).scale(0.5);
    let eig = SymmetricEigen::new(sym);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let eigenvalues = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let mut eigenvectors = ComplexMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        eigenvectors.set_column(dst, &eig.eigenvectors.column(src));
        canonical_phase(&mut eigenvectors, dst);
    }
    EigenDecomposition { eigenvalues, eigenvectors }
}

/// Thin singular value decomposition with descending singular values.
pub fn svd(m: &ComplexMatrix) -> SvdDecomposition {
    let (r, c) = m.shape();
    if r == 0 || c == 0 {
        return SvdDecomposition {
            left: ComplexMatrix::zeros(r, 0),
            singulars: vec![],
            right: ComplexMatrix::zeros(c, 0),
        };
    }
    // nalgebra's complex SVD loses accuracy on rank-deficient input; faer's does not
    let a = faer::Mat::<c64>::from_fn(r, c, |i, j| m[(i, j)]);
    let dec = a.thin_svd().expect("SVD of a finite matrix converges");
    let (u, v) = (dec.U(), dec.V());
    let values: Vec<f64> = dec.S().column_vector().iter().map(|z| z.re.max(0.0)).collect();
    let k = values.len();
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&a, &b| values[b].total_cmp(&values[a]));
    let left = ComplexMatrix::from_fn(r, k, |i, j| u[(i, order[j])]);
    let right = ComplexMatrix::from_fn(c, k, |i, j| v[(i, order[j])]);
    let singulars = order.iter().map(|&j| values[j]).collect();
    SvdDecomposition { left, singulars, right }
}

/// Number of singular values above `rel_tol` times the largest one.
pub fn numerical_rank(m: &ComplexMatrix, rel_tol: f64) -> usize {
    let s = svd(m).singulars;
    match s.first() {
        Some(&top) if top > 0.0 => s.iter().filter(|&&x| x > rel_tol * top).count(),
        _ => 0,
    }
}

/// Clamped eigenvalues of a PSD matrix; fails if an eigenvalue is below the clamp window.
pub fn psd_eig(m: &ComplexMatrix) -> Result<EigenDecomposition> {
    let mut eig = herm_eig(m)?;
    clamp_psd(&mut eig)?;
    Ok(eig)
}

pub(crate) fn clamp_psd(eig: &mut EigenDecomposition) -> Result<()> {
    let top = eig.eigenvalues.first().copied().unwrap_or(0.0).max(0.0);
    let bottom = eig.eigenvalues.last().copied().unwrap_or(0.0);
    // absolute floor covers the all-zero (or numerically zero) matrix
    if bottom < -(PSD_CLAMP * top).max(1e-15) {
        return Err(Error::NotPsd(bottom));
    }
    for l in eig.eigenvalues.iter_mut() {
        *l = l.max(0.0);
    }
    Ok(())
}

/// Spectral power with the default support tolerance, see [`psd_power_tol`].
pub fn psd_power(m: &ComplexMatrix, exponent: f64) -> Result<ComplexMatrix> {
    psd_power_tol(m, exponent, RANK_TOL)
}

/// Spectral power on the support: eigenvalues at or below `rel_tol·λ_max` map to 0 for
/// every exponent (so negative exponents give pseudo-inverse powers).
pub fn psd_power_tol(m: &ComplexMatrix, exponent: f64, rel_tol: f64) -> Result<ComplexMatrix> {
    let eig = psd_eig(m)?;
    Ok(power_of(&eig, exponent, rel_tol))
}

pub(crate) fn power_of(eig: &EigenDecomposition, exponent: f64, rel_tol: f64) -> ComplexMatrix {
    let top = eig.eigenvalues.first().copied().unwrap_or(0.0);
    let cut = rel_tol * top;
    eig.map(|l| if l > cut && l > 0.0 { l.powf(exponent) } else { 0.0 })
}

/// Projector onto the eigenvectors with eigenvalue above `rel_tol·λ_max`.
pub fn support_projector(m: &ComplexMatrix, rel_tol: f64) -> Result<ComplexMatrix> {
    let eig = psd_eig(m)?;
    Ok(power_of(&eig, 0.0, rel_tol))
}

pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    a.kronecker(b)
}

pub fn kron_vec(a: &ComplexVector, b: &ComplexVector) -> ComplexVector {
    a.kronecker(b)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Subsystem {
    A,
    B,
}

/// Partial trace of an operator on `C^dA ⊗ C^dB`, keeping subsystem `keep`.
pub fn partial_trace(m: &ComplexMatrix, dims: (usize, usize), keep: Subsystem) -> Result<ComplexMatrix> {
    let (da, db) = dims;
    if m.nrows() != da * db || m.ncols() != da * db {
        return Err(Error::shape(format!(
            "partial_trace: {}x{} is not compatible with {da}x{db}",
            m.nrows(),
            m.ncols()
        )));
    }
    Ok(match keep {
        Subsystem::A => ComplexMatrix::from_fn(da, da, |i, j| (0..db).map(|k| m[(i * db + k, j * db + k)]).sum()),
        Subsystem::B => ComplexMatrix::from_fn(db, db, |i, j| (0..da).map(|k| m[(k * db + i, k * db + j)]).sum()),
    })
}

/// Swap the two tensor legs: an operator on `A⊗B` becomes one on `B⊗A`.
pub fn swap_legs(m: &ComplexMatrix, dims: (usize, usize)) -> ComplexMatrix {
    let (da, db) = dims;
    ComplexMatrix::from_fn(da * db, da * db, |r, c| {
        let (rb, ra) = (r / da, r % da);
        let (cb, ca) = (c / da, c % da);
        m[(ra * db + rb, ca * db + cb)]
    })
}

/// Schatten p-(quasi)norm `(Σ λ_k^p)^{1/p}` of a PSD matrix over its support.
pub fn schatten_p(m: &ComplexMatrix, p: f64) -> Result<f64> {
    if !(p > 0.0) {
        return Err(Error::param(format!("schatten_p needs p > 0, got {p}")));
    }
    let eig = psd_eig(m)?;
    Ok(trace_power_of(&eig.eigenvalues, p, RANK_TOL).powf(1.0 / p))
}

/// `Σ λ^p` over eigenvalues above `rel_tol·λ_max`.
pub fn trace_power_of(eigenvalues: &[f64], p: f64, rel_tol: f64) -> f64 {
    let top = eigenvalues.iter().copied().fold(0.0, f64::max);
    let cut = rel_tol * top;
    eigenvalues.iter().filter(|&&l| l > cut && l > 0.0).map(|&l| l.powf(p)).sum()
}

/// Clamped spectrum of a PSD matrix, descending.
pub fn psd_spectrum(m: &ComplexMatrix) -> Result<Vec<f64>> {
    Ok(psd_eig(m)?.eigenvalues)
}

/// Hilbert–Schmidt inner product `Tr(X† Y)`.
pub fn hs_inner(x: &ComplexMatrix, y: &ComplexMatrix) -> c64 {
    x.iter().zip(y.iter()).map(|(a, b)| a.conj() * b).sum()
}

/// Column-stacking vectorization.
pub fn vectorize(m: &ComplexMatrix) -> ComplexVector {
    ComplexVector::from_iterator(m.len(), m.iter().copied())
}

/// JSON encoding: nested row-major arrays of `[re, im]` pairs.
pub mod json {
    use super::*;

    pub fn encode(m: &ComplexMatrix) -> Vec<Vec<[f64; 2]>> {
        (0..m.nrows())
            .map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect())
            .collect()
    }

    pub fn decode(rows: &[Vec<[f64; 2]>]) -> Result<ComplexMatrix> {
        let r = rows.len();
        if r == 0 {
            return Err(Error::Parse("matrix has no rows".into()));
        }
        let c = rows[0].len();
        if c == 0 || rows.iter().any(|row| row.len() != c) {
            return Err(Error::Parse("matrix rows are empty or ragged".into()));
        }
        Ok(ComplexMatrix::from_fn(r, c, |i, j| c64::new(rows[i][j][0], rows[i][j][1])))
    }

    pub fn serialize<S: Serializer>(m: &ComplexMatrix, s: S) -> std::result::Result<S::Ok, S::Error> {
        encode(m).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<ComplexMatrix, D::Error> {
        let rows = Vec::<Vec<[f64; 2]>>::deserialize(d)?;
        decode(&rows).map_err(D::Error::custom)
    }

    pub mod vec {
        use super::*;

        pub fn serialize<S: Serializer>(ms: &[ComplexMatrix], s: S) -> std::result::Result<S::Ok, S::Error> {
            ms.iter().map(encode).collect::<Vec<_>>().serialize(s)
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Vec<ComplexMatrix>, D::Error> {
            let all = Vec::<Vec<Vec<[f64; 2]>>>::deserialize(d)?;
            all.iter().map(|rows| decode(rows).map_err(D::Error::custom)).collect()
        }
    }

    /// Vectors encode as a flat list of `[re, im]` pairs.
    pub mod vector {
        use super::*;

        pub fn serialize<S: Serializer>(v: &ComplexVector, s: S) -> std::result::Result<S::Ok, S::Error> {
            v.iter().map(|z| [z.re, z.im]).collect::<Vec<_>>().serialize(s)
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<ComplexVector, D::Error> {
            let pairs = Vec::<[f64; 2]>::deserialize(d)?;
            Ok(ComplexVector::from_iterator(pairs.len(), pairs.iter().map(|p| c64::new(p[0], p[1]))))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sample;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> c64 {
        c64::new(re, im)
    }

    #[test]
    fn pauli_y_spectrum() {
        let y = ComplexMatrix::from_row_slice(2, 2, &[c(0., 0.), c(0., -1.), c(0., 1.), c(0., 0.)]);
        let eig = herm_eig(&y).unwrap();
        assert!((eig.eigenvalues[0] - 1.0).abs() < 1e-14);
        assert!((eig.eigenvalues[1] + 1.0).abs() < 1e-14);
    }

    #[test]
    fn identity_spectrum_and_canonical_vectors() {
        let eig = herm_eig(&identity(3)).unwrap();
        assert_eq!(eig.eigenvalues, vec![1.0, 1.0, 1.0]);
        for k in 0..3 {
            let v = eig.vector(k);
            let first = v.iter().find(|z| z.norm() > 1e-10).unwrap();
            assert!(first.im.abs() < 1e-15 && first.re > 0.0);
        }
    }

    #[test]
    fn eig_rejects_bad_input() {
        assert!(matches!(herm_eig(&ComplexMatrix::zeros(2, 3)), Err(Error::Shape(_))));
        let m = ComplexMatrix::from_row_slice(2, 2, &[c(0., 0.), c(1., 0.), c(0., 0.), c(0., 0.)]);
        assert!(matches!(herm_eig(&m), Err(Error::NotHermitian(_))));
    }

    #[test]
    fn random_hermitian_reconstruction() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let h = sample::hermitian(&mut rng, 6);
        let eig = herm_eig(&h).unwrap();
        assert!(max_dist(&eig.reconstruct(), &h) < 1e-10 * max_abs(&h));
        let v = &eig.eigenvectors;
        assert!(max_dist(&(v.adjoint() * v), &identity(6)) < 1e-10);
        assert!(eig.eigenvalues.windows(2).all(|w| w[0] >= w[1]));
    }

    #[test]
    fn svd_examples() {
        let z = svd(&ComplexMatrix::zeros(2, 3));
        assert_eq!(z.singulars, vec![0.0, 0.0]);

        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let u = sample::haar_unitary(&mut rng, 4);
        assert!(svd(&u).singulars.iter().all(|s| (s - 1.0).abs() < 1e-12));

        let m = sample::ginibre(&mut rng, 3, 5);
        let dec = svd(&m);
        assert!(max_dist(&dec.reconstruct(), &m) < 1e-10 * dec.singulars[0]);
        assert!(dec.singulars.windows(2).all(|w| w[0] >= w[1]));
    }

    #[test]
    fn contraction_from_psd_blocks() {
        // W = A11^{-1/2} A12 A22^{-1/2} of a PSD block matrix is a contraction
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let a = sample::psd(&mut rng, 8, 8);
        let a11 = a.view((0, 0), (4, 4)).into_owned();
        let a12 = a.view((0, 4), (4, 4)).into_owned();
        let a22 = a.view((4, 4), (4, 4)).into_owned();
        let w = psd_power(&a11, -0.5).unwrap() * a12 * psd_power(&a22, -0.5).unwrap();
        assert!(svd(&w).singulars.iter().all(|&s| s <= 1.0 + 1e-12));
    }

    #[test]
    fn psd_power_examples() {
        let r = psd_power(&real_diag(&[4.0, 1.0]), 0.5).unwrap();
        assert!(max_dist(&r, &real_diag(&[2.0, 1.0])) < 1e-14);

        let r = psd_power(&real_diag(&[0.5, 0.5, 0.0]), 4.0).unwrap();
        assert!(max_dist(&r, &real_diag(&[1.0 / 16.0, 1.0 / 16.0, 0.0])) < 1e-15);

        let r = psd_power(&real_diag(&[0.25, 0.75, 0.0]), -0.5).unwrap();
        assert!(max_dist(&r, &real_diag(&[2.0, 1.0 / 0.75f64.sqrt(), 0.0])) < 1e-14);

        assert!(matches!(psd_power(&real_diag(&[1.0, -0.1]), 0.5), Err(Error::NotPsd(_))));
        // within the clamp window
        assert!(psd_power(&real_diag(&[1.0, -1e-14]), 0.5).is_ok());
    }

    #[test]
    fn kron_examples() {
        assert_eq!(kron(&identity(2), &identity(2)), identity(4));
        let a = real_diag(&[1.0, 0.0]);
        let b = real_diag(&[0.0, 1.0]);
        assert_eq!(kron(&a, &b), real_diag(&[0.0, 1.0, 0.0, 0.0]));

        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let (a, b) = (sample::ginibre(&mut rng, 3, 3), sample::ginibre(&mut rng, 3, 3));
        let (x, y) = (sample::pure_state(&mut rng, 3), sample::pure_state(&mut rng, 3));
        let lhs = kron(&a, &b) * kron_vec(&x, &y);
        let rhs = kron_vec(&(&a * &x), &(&b * &y));
        assert!((lhs - rhs).norm() < 1e-13);
    }

    #[test]
    fn partial_trace_examples() {
        let beta = projector(&max_entangled(2));
        let r = partial_trace(&beta, (2, 2), Subsystem::A).unwrap();
        assert!(max_dist(&r, &identity(2).scale(0.5)) < 1e-15);

        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let x = sample::ginibre(&mut rng, 3, 3);
        let y = sample::ginibre(&mut rng, 2, 2);
        let r = partial_trace(&kron(&x, &y), (3, 2), Subsystem::A).unwrap();
        assert!(max_dist(&r, &(&x * trace(&y))) < 1e-12);
        let r = partial_trace(&kron(&x, &y), (3, 2), Subsystem::B).unwrap();
        assert!(max_dist(&r, &(&y * trace(&x))) < 1e-12);

        let rho = sample::density(&mut rng, 12, 12);
        for keep in [Subsystem::A, Subsystem::B] {
            let r = partial_trace(&rho, (4, 3), keep).unwrap();
            assert!((trace(&r).re - 1.0).abs() < 1e-12);
            assert!(psd_eig(&r).is_ok());
        }
        assert!(partial_trace(&rho, (5, 3), Subsystem::A).is_err());
    }

    #[test]
    fn swap_legs_matches_kron_order() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let x = sample::ginibre(&mut rng, 2, 2);
        let y = sample::ginibre(&mut rng, 3, 3);
        assert!(max_dist(&swap_legs(&kron(&x, &y), (2, 3)), &kron(&y, &x)) < 1e-15);
    }

    #[test]
    fn rank_examples() {
        assert_eq!(numerical_rank(&real_diag(&[1.0, 1e-16]), RANK_TOL), 1);
        assert_eq!(numerical_rank(&ComplexMatrix::zeros(3, 3), RANK_TOL), 0);
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let w = sample::haar_unitary(&mut rng, 3);
        let mut big = identity(6);
        big.view_mut((0, 3), (3, 3)).copy_from(&w);
        big.view_mut((3, 0), (3, 3)).copy_from(&w.adjoint());
        assert_eq!(numerical_rank(&big, RANK_TOL), 3);
    }

    #[test]
    fn schatten_examples() {
        let v = schatten_p(&real_diag(&[0.5, 0.5, 0.0]), 5.0).unwrap();
        assert!((v - 2f64.powf(-0.8)).abs() < 1e-14);
        assert!((v - 0.5743492).abs() < 1e-7);
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let rho = sample::density(&mut rng, 4, 2);
        assert!((schatten_p(&rho, 1.0).unwrap() - 1.0).abs() < 1e-12);
        let v = schatten_p(&identity(5).scale(0.2), 2.0).unwrap();
        assert!((v - 5f64.powf(-0.5)).abs() < 1e-14);
        assert!(schatten_p(&rho, 0.0).is_err());
    }

    #[test]
    fn matrix_json_layout() {
        let m = ComplexMatrix::from_row_slice(1, 2, &[c(1.0, -2.0), c(0.5, 0.0)]);
        let text = serde_json::to_string(&json::encode(&m)).unwrap();
        assert_eq!(text, "[[[1.0,-2.0],[0.5,0.0]]]");
        let back: Vec<Vec<[f64; 2]>> = serde_json::from_str(&text).unwrap();
        assert_eq!(json::decode(&back).unwrap(), m);
        assert!(json::decode(&[vec![[0.0, 0.0]], vec![]]).is_err());
    }
}
