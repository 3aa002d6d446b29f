//! Seeded random matrices, states and channels.
//!
//! All samplers take an explicit RNG; [`stream`] derives independent reproducible
//! streams from a `(seed, index)` pair.

use nalgebra::QR;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::channels::KrausChannel;
use crate::numerics::{c64, projector, ComplexMatrix, ComplexVector};

/// RNG for restart `index` under `seed`; independent of scheduling order.
pub fn stream(seed: u64, index: u64) -> ChaCha8Rng {
    use rand::SeedableRng;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> c64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    c64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

/// Matrix of i.i.d. standard complex Gaussians.
pub fn ginibre<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols, |_, _| gaussian(rng))
}

pub fn hermitian<R: Rng + ?Sized>(rng: &mut R, d: usize) -> ComplexMatrix {
    let g = ginibre(rng, d, d);
    (&g + g.adjoint()).scale(0.5)
}

/// Haar-distributed isometry `rows × cols` (`rows ≥ cols`), via phase-corrected QR.
pub fn haar_isometry<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> ComplexMatrix {
    assert!(rows >= cols, "isometry needs rows >= cols");
    let qr = QR::new(ginibre(rng, rows, cols));
    let r = qr.r();
    let mut q = qr.q();
    for j in 0..cols {
        let z = r[(j, j)];
        if z.norm() > 0.0 {
            let phase = z / z.norm();
            for i in 0..rows {
                q[(i, j)] *= phase;
            }
        }
    }
    q
}

pub fn haar_unitary<R: Rng + ?Sized>(rng: &mut R, d: usize) -> ComplexMatrix {
    haar_isometry(rng, d, d)
}

/// Random PSD matrix `G G†` of the given rank (unnormalized).
pub fn psd<R: Rng + ?Sized>(rng: &mut R, d: usize, rank: usize) -> ComplexMatrix {
    let g = ginibre(rng, d, rank);
    &g * g.adjoint()
}

/// Random density matrix of the given rank (induced measure).
pub fn density<R: Rng + ?Sized>(rng: &mut R, d: usize, rank: usize) -> ComplexMatrix {
    let m = psd(rng, d, rank);
    let t = m.trace().re;
    m.unscale(t)
}

/// Random real (symmetric) density matrix.
pub fn real_density<R: Rng + ?Sized>(rng: &mut R, d: usize, rank: usize) -> ComplexMatrix {
    let g = ComplexMatrix::from_fn(d, rank, |_, _| c64::new(rng.sample(StandardNormal), 0.0));
    let m = &g * g.transpose();
    let t = m.trace().re;
    m.unscale(t)
}

/// Haar-random unit vector.
pub fn pure_state<R: Rng + ?Sized>(rng: &mut R, d: usize) -> ComplexVector {
    let v = ComplexVector::from_fn(d, |_, _| gaussian(rng));
    let n = v.norm();
    v.unscale(n)
}

pub fn pure_density<R: Rng + ?Sized>(rng: &mut R, d: usize) -> ComplexMatrix {
    projector(&pure_state(rng, d))
}

/// Random channel with `k` Kraus operators cut from a Haar isometry
/// `C^{d_in} → C^k ⊗ C^{d_out}`; needs `k·d_out ≥ d_in`.
pub fn channel<R: Rng + ?Sized>(rng: &mut R, d_in: usize, d_out: usize, k: usize) -> KrausChannel {
    let v = haar_isometry(rng, k * d_out, d_in);
    let kraus = (0..k).map(|j| v.view((j * d_out, 0), (d_out, d_in)).into_owned()).collect();
    KrausChannel::new_unchecked(d_in, d_out, kraus)
}
