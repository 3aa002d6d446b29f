//! Entropies and purities of channel outputs, in nats.
//!
//! Rényi entropies use `S^p(γ) = log(Tr γ^p)/(1 − p)`, so `S^p(I/d) = log d`,
//! `S^0 = log rank` and `S^1` is the von Neumann entropy.

use serde::Serialize;

use crate::channels::{complement, KrausChannel};
use crate::numerics::{self, numerical_rank, psd_eig, ComplexMatrix, RANK_TOL};
use crate::optimize::{self, OptimizerConfig};
use crate::{Error, Result};

/// Orders with `|p − 1|` below this are evaluated as von Neumann.
pub const VN_WINDOW: f64 = 1e-9;

const TRACE_TOL: f64 = 1e-10;

fn density_spectrum(rho: &ComplexMatrix) -> Result<Vec<f64>> {
    let eig = psd_eig(rho)?;
    let tr: f64 = eig.eigenvalues.iter().sum();
    if (tr - 1.0).abs() > TRACE_TOL {
        return Err(Error::param(format!("density matrix has trace {tr}")));
    }
    Ok(eig.eigenvalues)
}

/// `−Σ λ log λ` of a spectrum over its support.
pub fn shannon(spectrum: &[f64]) -> f64 {
    let top = spectrum.iter().copied().fold(0.0, f64::max);
    -spectrum
        .iter()
        .filter(|&&l| l > RANK_TOL * top && l > 0.0)
        .map(|&l| l * l.ln())
        .sum::<f64>()
}

pub fn von_neumann(rho: &ComplexMatrix) -> Result<f64> {
    Ok(shannon(&density_spectrum(rho)?))
}

/// Rényi entropy of a spectrum, see the module docs for the convention.
pub fn renyi_of_spectrum(spectrum: &[f64], p: f64) -> Result<f64> {
    if !(p >= 0.0) {
        return Err(Error::param(format!("Rényi order must be >= 0, got {p}")));
    }
    let top = spectrum.iter().copied().fold(0.0, f64::max);
    if p == 0.0 {
        let rank = spectrum.iter().filter(|&&l| l > RANK_TOL * top).count();
        return Ok((rank as f64).ln());
    }
    if (p - 1.0).abs() < VN_WINDOW {
        return Ok(shannon(spectrum));
    }
    let tp = numerics::trace_power_of(spectrum, p, RANK_TOL);
    Ok(tp.ln() / (1.0 - p))
}

pub fn renyi(rho: &ComplexMatrix, p: f64) -> Result<f64> {
    if p == 0.0 {
        density_spectrum(rho)?;
        return Ok((numerical_rank(rho, RANK_TOL) as f64).ln());
    }
    renyi_of_spectrum(&density_spectrum(rho)?, p)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OutputPurity {
    /// `‖Φ(ρ)‖_p`.
    pub pnorm: f64,
    /// `Tr Φ(ρ)^p`.
    pub trace_power: f64,
}

pub fn output_purity(ch: &KrausChannel, rho: &ComplexMatrix, p: f64) -> Result<OutputPurity> {
    if !(p > 0.0) {
        return Err(Error::param(format!("p must be > 0, got {p}")));
    }
    let out = ch.apply(rho)?;
    let eig = psd_eig(&out)?;
    let trace_power = numerics::trace_power_of(&eig.eigenvalues, p, RANK_TOL);
    Ok(OutputPurity { pnorm: trace_power.powf(1.0 / p), trace_power })
}

/// `S(Φ(ρ)) − S(Φ^C(ρ))`.
pub fn coherent_information(ch: &KrausChannel, rho: &ComplexMatrix) -> Result<f64> {
    let out = ch.apply(rho)?;
    let env = complement(ch).apply(rho)?;
    Ok(von_neumann(&out)? - von_neumann(&env)?)
}

#[derive(Debug, Clone, Serialize)]
pub struct MinRankReport {
    /// Smallest output rank seen; an upper bound on the true minimum.
    pub min_rank: usize,
    pub restarts: usize,
    #[serde(with = "numerics::json::vector")]
    pub best_input: numerics::ComplexVector,
}

/// Order used as a proxy for p = 0 when searching for low-rank outputs.
pub const RANK_PROXY_P: f64 = 0.05;

/// Minimum numerical output rank over a multistart pure-state search driven by the
/// small-p fixed-point iteration.
pub fn min_output_rank(ch: &KrausChannel, restarts: usize, seed: u64) -> Result<MinRankReport> {
    let config = OptimizerConfig { p: RANK_PROXY_P, restarts: restarts.max(1), seed, ..OptimizerConfig::default() };
    let report = optimize::estimate_nu_p(ch, &config)?;
    let mut best = (usize::MAX, report.best_input.clone());
    for psi in report.finals.iter().chain(std::iter::once(&report.best_input)) {
        let r = numerical_rank(&ch.apply_pure(psi), RANK_TOL);
        if r < best.0 {
            best = (r, psi.clone());
        }
    }
    Ok(MinRankReport { min_rank: best.0, restarts: config.restarts, best_input: best.1 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{identity, real_diag};
    use crate::{sample, zoo};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn von_neumann_examples() {
        assert!((von_neumann(&identity(3).scale(1.0 / 3.0)).unwrap() - 3f64.ln()).abs() < 1e-14);
        assert!((von_neumann(&identity(3).scale(1.0 / 3.0)).unwrap() - 1.0986123).abs() < 1e-7);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert!(von_neumann(&sample::pure_density(&mut rng, 4)).unwrap().abs() < 1e-12);
        let v = von_neumann(&real_diag(&[2.0 / 3.0, 1.0 / 3.0, 0.0])).unwrap();
        assert!((v - (3f64.ln() - 2.0 / 3.0 * 2f64.ln())).abs() < 1e-14);
        assert!((v - 0.6365142).abs() < 1e-7);
        assert!(von_neumann(&real_diag(&[0.5, 0.2])).is_err());
    }

    #[test]
    fn renyi_examples() {
        assert!((renyi(&real_diag(&[0.5, 0.5, 0.0]), 2.0).unwrap() - 2f64.ln()).abs() < 1e-14);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let rho = sample::density(&mut rng, 5, 3);
        assert!((renyi(&rho, 0.0).unwrap() - 3f64.ln()).abs() < 1e-14);
        for p in [0.0, 0.3, 1.0, 2.0, 7.5] {
            assert!((renyi(&identity(4).scale(0.25), p).unwrap() - 4f64.ln()).abs() < 1e-12);
        }
        assert!(renyi(&rho, -1.0).is_err());
    }

    #[test]
    fn output_purity_examples() {
        let w = zoo::werner_holevo(3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let rho = sample::pure_density(&mut rng, 3);
        let op = output_purity(&w, &rho, 5.0).unwrap();
        assert!((op.pnorm - 2f64.powf(-0.8)).abs() < 1e-12);
        assert!((op.pnorm.powf(5.0) - op.trace_power).abs() < 1e-15);

        let op = output_purity(&zoo::identity(3), &rho, 3.3).unwrap();
        assert!((op.pnorm - 1.0).abs() < 1e-12);

        let ww = crate::channels::tensor(&w, &w);
        let beta = numerics::projector(&numerics::max_entangled(3));
        let op = output_purity(&ww, &beta, 5.0).unwrap();
        let expected = (1.0f64 / 3.0).powi(5) + 8.0 * (1.0f64 / 12.0).powi(5);
        assert!((op.trace_power - expected).abs() < 1e-15);
        assert!((op.trace_power - 4.1474e-3).abs() < 1e-7);
    }

    #[test]
    fn coherent_information_examples() {
        let half = identity(2).scale(0.5);
        assert!((coherent_information(&zoo::identity(2), &half).unwrap() - 2f64.ln()).abs() < 1e-12);
        let ci = coherent_information(&zoo::completely_depolarizing(2), &half).unwrap();
        assert!((ci + 2f64.ln()).abs() < 1e-12);
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let ch = sample::channel(&mut rng, 3, 3, 4);
        let psi = sample::pure_density(&mut rng, 3);
        assert!(coherent_information(&ch, &psi).unwrap().abs() < 1e-9);
    }

    #[test]
    fn min_output_rank_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let u = zoo::unitary(sample::haar_unitary(&mut rng, 3)).unwrap();
        assert_eq!(min_output_rank(&u, 3, 1).unwrap().min_rank, 1);
        assert_eq!(min_output_rank(&zoo::werner_holevo(3).unwrap(), 5, 1).unwrap().min_rank, 2);
    }
}
