//! Output p-norm optimization.
//!
//! The core is a fixed-point iteration on pure inputs: for `γ = |ψ_k⟩⟨ψ_k|`, the next
//! input is the extreme eigenvector of `Ω̂[Ω(γ)^{p−1}]` (largest eigenvalue for p > 1,
//! smallest for p < 1). Each step moves `Tr Ω(γ)^p` monotonically: up for p > 1 and down
//! for p < 1. Multistart drivers build on it to estimate the maximal output p-norm, the
//! minimal output Rényi entropy, and to test multiplicativity on tensor products.

use serde::Serialize;

use crate::channels::{adjoint, tensor, AdjointMap, KrausChannel};
use crate::entropy::{self, renyi_of_spectrum, shannon, VN_WINDOW};
use crate::numerics::{
    self, herm_eig_unchecked, kron_vec, max_entangled, ComplexMatrix, ComplexVector,
};
use crate::{sample, Error, Result};

/// Relative threshold separating a genuine multiplicativity violation from optimizer noise.
pub const VIOLATION_TOL: f64 = 1e-7;
/// Default restart budgets.
pub const SINGLE_RESTARTS: usize = 50;
pub const TENSOR_RESTARTS: usize = 200;
/// Default cap on the input dimension of tensor-product searches.
pub const TENSOR_CAP: usize = 256;
/// Bisection target width for threshold localization.
pub const THRESHOLD_WIDTH: f64 = 0.01;

/// Output spectra come from the singular values `σ` of `[A_1ψ … A_Kψ]` (`λ = σ²`), which
/// resolve small eigenvalues far below the rounding level of a Hermitian eigensolver; for
/// p < 1 that matters because `λ^p` magnifies them. Singular values at or below
/// `SIGMA_FLOOR·σ_max` are treated as exact zeros in `Tr γ^p`.
const SIGMA_FLOOR: f64 = 1e-15;
/// Eigenvalues at or below `STEP_CUT·λ_max` form the kernel of the pseudo-power in the step.
const STEP_CUT: f64 = 1e-13;

/// Null-space threshold for the support-restricted step (eigenvalues of `Ω̂(P_ker)`).
const RESTRICT_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Serialize)]
pub struct OptimizerConfig {
    pub p: f64,
    pub max_iters: usize,
    /// Convergence threshold on the change of `Tr Φ(ρ)^p`.
    pub value_tol: f64,
    /// Haar-random starts; basis and entangled seeds come on top of these.
    pub restarts: usize,
    pub seed: u64,
    pub include_entangled_seeds: bool,
    pub tensor_restarts: usize,
    pub tensor_cap: usize,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self {
            p: 2.0,
            max_iters: 10_000,
            value_tol: 1e-12,
            restarts: SINGLE_RESTARTS,
            seed: 0,
            include_entangled_seeds: true,
            tensor_restarts: TENSOR_RESTARTS,
            tensor_cap: TENSOR_CAP,
        }
    }
}

impl OptimizerConfig {
    pub fn with_p(p: f64) -> Self {
        Self { p, ..Self::default() }
    }

    fn validate(&self) -> Result<()> {
        check_p(self.p)?;
        if self.restarts == 0 {
            return Err(Error::param("restarts must be >= 1"));
        }
        Ok(())
    }
}

fn check_p(p: f64) -> Result<()> {
    if !(p > 0.0) || (p - 1.0).abs() < VN_WINDOW {
        return Err(Error::param(format!("iteration needs p > 0 and p != 1, got {p}")));
    }
    Ok(())
}

/// `+1` when the iteration maximizes (p > 1), `−1` when it minimizes (p < 1).
fn direction(p: f64) -> f64 {
    if p > 1.0 {
        1.0
    } else {
        -1.0
    }
}

/// Eigenvalues (descending) and eigenvectors of `Φ(|ψ⟩⟨ψ|)` on its numerical range.
struct OutputSpectrum {
    values: Vec<f64>,
    vectors: ComplexMatrix,
}

impl OutputSpectrum {
    fn of(ch: &KrausChannel, psi: &ComplexVector) -> Self {
        let cols: Vec<ComplexVector> = ch.kraus.iter().map(|a| a * psi).collect();
        let s = numerics::svd(&ComplexMatrix::from_columns(&cols));
        let top = s.singulars.first().copied().unwrap_or(0.0);
        let keep = s.singulars.iter().take_while(|&&x| x > SIGMA_FLOOR * top).count();
        Self { values: s.singulars[..keep].iter().map(|x| x * x).collect(), vectors: s.left.columns(0, keep).into_owned() }
    }

    fn trace_power(&self, p: f64) -> f64 {
        self.values.iter().map(|l| l.powf(p)).sum()
    }

    /// `Σ f(λ) u u†` over the kept eigenvalues.
    fn map(&self, f: impl Fn(f64) -> f64) -> ComplexMatrix {
        let mut scaled = self.vectors.clone();
        for (k, &l) in self.values.iter().enumerate() {
            scaled.column_mut(k).scale_mut(f(l));
        }
        scaled * self.vectors.adjoint()
    }
}

/// `Tr Φ(|ψ⟩⟨ψ|)^p`.
pub fn objective(ch: &KrausChannel, psi: &ComplexVector, p: f64) -> f64 {
    OutputSpectrum::of(ch, psi).trace_power(p)
}

#[derive(Debug, Clone)]
pub struct Step {
    pub psi: ComplexVector,
    /// The full-space candidate was rejected and the support-restricted one used.
    pub restricted: bool,
}

fn extreme_vector(m: &ComplexMatrix, p: f64) -> ComplexVector {
    let eig = herm_eig_unchecked(m);
    let k = if p > 1.0 { 0 } else { eig.eigenvalues.len() - 1 };
    eig.vector(k)
}

fn normalized(v: ComplexVector) -> ComplexVector {
    let n = v.norm();
    v.unscale(n)
}

/// Bottom eigenvector of `Ω̂[B^{p−1}]` restricted to inputs whose outputs stay on `supp B`.
fn restricted_step(adj: &AdjointMap, support: &ComplexMatrix, weighted: &ComplexMatrix) -> Option<ComplexVector> {
    let kernel = numerics::identity(support.nrows()) - support;
    let leak = herm_eig_unchecked(&adj.apply(&kernel));
    let basis: Vec<usize> = (0..leak.eigenvalues.len()).filter(|&k| leak.eigenvalues[k] <= RESTRICT_TOL).collect();
    if basis.is_empty() {
        return None;
    }
    let q = ComplexMatrix::from_columns(&basis.iter().map(|&k| leak.eigenvectors.column(k)).collect::<Vec<_>>());
    let compressed = q.adjoint() * weighted * &q;
    let y = extreme_vector(&compressed, 0.5);
    Some(normalized(q * y))
}

fn step_with(ch: &KrausChannel, adj: &AdjointMap, psi: &ComplexVector, p: f64) -> Result<Step> {
    let out = OutputSpectrum::of(ch, psi);
    let top = match out.values.first() {
        Some(&l) if l > 0.0 => l,
        _ => return Err(Error::Numerical("channel output is zero".into())),
    };
    let cut = if p > 1.0 { 0.0 } else { STEP_CUT * top };
    let weighted = adj.apply(&out.map(|l| if l > cut { l.powf(p - 1.0) } else { 0.0 }));
    let candidate = normalized(extreme_vector(&weighted, p));
    if p > 1.0 {
        return Ok(Step { psi: candidate, restricted: false });
    }
    let before = out.trace_power(p);
    if objective(ch, &candidate, p) <= before {
        return Ok(Step { psi: candidate, restricted: false });
    }
    // kernel directions of the pseudo-power attracted the full-space candidate
    let support = out.map(|l| if l > cut { 1.0 } else { 0.0 });
    match restricted_step(adj, &support, &weighted) {
        Some(psi1) => Ok(Step { psi: psi1, restricted: true }),
        None => Ok(Step { psi: psi.clone(), restricted: true }),
    }
}

/// One fixed-point step from the unit vector `psi`.
pub fn opt2_step(ch: &KrausChannel, psi: &ComplexVector, p: f64) -> Result<Step> {
    check_p(p)?;
    if psi.len() != ch.d_in {
        return Err(Error::shape(format!("input vector has length {}, channel expects {}", psi.len(), ch.d_in)));
    }
    step_with(ch, &adjoint(ch), &normalized(psi.clone()), p)
}

#[derive(Debug, Clone, Serialize)]
pub struct RunTrace {
    #[serde(with = "numerics::json::vector")]
    pub psi: ComplexVector,
    /// `‖Φ(ψψ†)‖_p` at the final iterate.
    pub value: f64,
    /// `Tr Φ(ψ_k ψ_k†)^p` for every visited iterate, starting with the input.
    pub trace_powers: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
    /// Accepted steps that moved `Tr Φ^p` the wrong way by more than `value_tol`.
    pub monotonicity_violations: usize,
    pub restricted_steps: usize,
}

/// Iterates [`opt2_step`] until the objective changes by less than `value_tol`.
pub fn opt2_run(ch: &KrausChannel, psi0: &ComplexVector, config: &OptimizerConfig) -> Result<RunTrace> {
    config.validate()?;
    let p = config.p;
    let adj = adjoint(ch);
    let dir = direction(p);
    let mut psi = normalized(psi0.clone());
    let mut trace = vec![objective(ch, &psi, p)];
    let (mut violations, mut restricted, mut converged) = (0, 0, false);
    let mut iterations = 0;
    while iterations < config.max_iters {
        let step = step_with(ch, &adj, &psi, p)?;
        iterations += 1;
        restricted += step.restricted as usize;
        let prev = *trace.last().expect("trace starts non-empty");
        let next = objective(ch, &step.psi, p);
        let gain = dir * (next - prev);
        if gain < -config.value_tol {
            // keep the better iterate and stop
            violations += 1;
            converged = true;
            break;
        }
        psi = step.psi;
        trace.push(next);
        if gain.abs() < config.value_tol {
            converged = true;
            break;
        }
    }
    let value = trace.last().copied().unwrap_or(0.0).powf(1.0 / p);
    Ok(RunTrace { psi, value, trace_powers: trace, iterations, converged, monotonicity_violations: violations, restricted_steps: restricted })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum StartKind {
    Basis,
    Entangled,
    Product,
    Random,
}

#[derive(Debug, Clone, Serialize)]
pub struct OptimizerReport {
    pub p: f64,
    #[serde(with = "numerics::json::vector")]
    pub best_input: ComplexVector,
    /// `‖Φ(ρ)‖_p` at `best_input`: the largest found for p > 1, the smallest for p < 1.
    pub best_value: f64,
    pub best_trace_power: f64,
    pub best_start: usize,
    pub start_kinds: Vec<StartKind>,
    pub iterations_per_restart: Vec<usize>,
    pub converged: Vec<bool>,
    pub monotonicity_violations: usize,
    #[serde(skip)]
    pub finals: Vec<ComplexVector>,
}

/// `(1/√m) Σ_{j<m} |e_j⟩⊗|e_j⟩` across `C^a ⊗ C^b`, `m = min(a, b)`.
pub fn entangled_seed(a: usize, b: usize) -> ComplexVector {
    if a == b {
        return max_entangled(a);
    }
    let m = a.min(b);
    let mut v = ComplexVector::zeros(a * b);
    for j in 0..m {
        v[j * b + j] = numerics::c64::new(1.0 / (m as f64).sqrt(), 0.0);
    }
    v
}

fn square_root(d: usize) -> Option<usize> {
    let r = (d as f64).sqrt().round() as usize;
    (r * r == d && r > 1).then_some(r)
}

fn starts(d_in: usize, config: &OptimizerConfig, factorization: Option<(usize, usize)>, extra: &[ComplexVector]) -> Vec<(StartKind, ComplexVector)> {
    let mut out: Vec<(StartKind, ComplexVector)> = extra.iter().map(|v| (StartKind::Product, v.clone())).collect();
    out.extend((0..d_in).map(|j| (StartKind::Basis, numerics::basis(d_in, j))));
    if config.include_entangled_seeds {
        let fact = factorization.or_else(|| square_root(d_in).map(|r| (r, r)));
        if let Some((a, b)) = fact {
            out.push((StartKind::Entangled, entangled_seed(a, b)));
        }
    }
    for i in 0..config.restarts {
        let mut rng = sample::stream(config.seed, i as u64);
        out.push((StartKind::Random, sample::pure_state(&mut rng, d_in)));
    }
    out
}

#[cfg(feature = "parallel")]
fn run_all(ch: &KrausChannel, starts: &[(StartKind, ComplexVector)], config: &OptimizerConfig) -> Result<Vec<RunTrace>> {
    use rayon::prelude::*;
    starts.par_iter().map(|(_, v)| opt2_run(ch, v, config)).collect()
}

#[cfg(not(feature = "parallel"))]
fn run_all(ch: &KrausChannel, starts: &[(StartKind, ComplexVector)], config: &OptimizerConfig) -> Result<Vec<RunTrace>> {
    starts.iter().map(|(_, v)| opt2_run(ch, v, config)).collect()
}

fn estimate_with(
    ch: &KrausChannel,
    config: &OptimizerConfig,
    factorization: Option<(usize, usize)>,
    extra: &[ComplexVector],
) -> Result<OptimizerReport> {
    config.validate()?;
    let starts = starts(ch.d_in, config, factorization, extra);
    let runs = run_all(ch, &starts, config)?;
    let dir = direction(config.p);
    let mut best = 0;
    for (i, r) in runs.iter().enumerate() {
        // strict improvement keeps the lowest index on ties
        if dir * (r.trace_powers.last().unwrap() - runs[best].trace_powers.last().unwrap()) > 0.0 {
            best = i;
        }
    }
    let winner = &runs[best];
    Ok(OptimizerReport {
        p: config.p,
        best_input: winner.psi.clone(),
        best_value: winner.value,
        best_trace_power: *winner.trace_powers.last().unwrap(),
        best_start: best,
        start_kinds: starts.iter().map(|(k, _)| *k).collect(),
        iterations_per_restart: runs.iter().map(|r| r.iterations).collect(),
        converged: runs.iter().map(|r| r.converged).collect(),
        monotonicity_violations: runs.iter().map(|r| r.monotonicity_violations).sum(),
        finals: runs.into_iter().map(|r| r.psi).collect(),
    })
}

/// Multistart estimate of the optimal output p-norm (a lower bound on `ν_p` for p > 1).
pub fn estimate_nu_p(ch: &KrausChannel, config: &OptimizerConfig) -> Result<OptimizerReport> {
    estimate_with(ch, config, None, &[])
}

#[derive(Debug, Clone, Serialize)]
pub struct SminReport {
    pub p: f64,
    pub smin: f64,
    #[serde(with = "numerics::json::vector")]
    pub argmin: ComplexVector,
    pub method: &'static str,
    /// Midpoint of `S^{0.99}` and `S^{1.01}` when p = 1.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub extrapolated: Option<f64>,
}

/// Minimal output Rényi entropy `S^p_min`, searched over pure inputs.
pub fn estimate_smin_p(ch: &KrausChannel, p: f64, config: &OptimizerConfig) -> Result<SminReport> {
    if !(p >= 0.0) {
        return Err(Error::param(format!("Rényi order must be >= 0, got {p}")));
    }
    if p == 0.0 {
        let r = entropy::min_output_rank(ch, config.restarts, config.seed)?;
        return Ok(SminReport { p, smin: (r.min_rank as f64).ln(), argmin: r.best_input, method: "min_output_rank", extrapolated: None });
    }
    let spectrum = |psi: &ComplexVector| herm_eig_unchecked(&ch.apply_pure(psi)).eigenvalues;
    if (p - 1.0).abs() < VN_WINDOW {
        let mut candidates = Vec::new();
        let mut ends = Vec::new();
        for q in [0.99, 1.01] {
            let rep = estimate_nu_p(ch, &OptimizerConfig { p: q, ..config.clone() })?;
            ends.push(renyi_of_spectrum(&spectrum(&rep.best_input), q)?);
            candidates.push(rep.best_input.clone());
            candidates.extend(rep.finals);
        }
        let (smin, argmin) = candidates
            .into_iter()
            .map(|psi| (shannon(&spectrum(&psi)), psi))
            .fold(None::<(f64, ComplexVector)>, |acc, cur| match acc {
                Some(a) if a.0 <= cur.0 => Some(a),
                _ => Some(cur),
            })
            .expect("at least one candidate");
        return Ok(SminReport { p, smin, argmin, method: "von_neumann_at_p_neighbours", extrapolated: Some(0.5 * (ends[0] + ends[1])) });
    }
    let rep = estimate_nu_p(ch, &OptimizerConfig { p, ..config.clone() })?;
    let smin = renyi_of_spectrum(&spectrum(&rep.best_input), p)?;
    Ok(SminReport { p, smin, argmin: rep.best_input, method: "fixed_point", extrapolated: None })
}

#[derive(Debug, Clone, Serialize)]
pub struct MultReport {
    pub p: f64,
    pub nu_a: f64,
    pub nu_b: f64,
    pub nu_product_lb: f64,
    pub product_of_singles: f64,
    /// `log nu_product_lb − log nu_a − log nu_b`.
    pub gap: f64,
    pub violated: bool,
    #[serde(with = "numerics::json::vector")]
    pub certificate_input: ComplexVector,
    pub monotonicity_violations: usize,
}

fn check_tensor_cap(a: &KrausChannel, b: &KrausChannel, cap: usize) -> Result<()> {
    let d = a.d_in * b.d_in;
    if d > cap {
        return Err(Error::param(format!(
            "tensor input dimension {d} exceeds the cap {cap}; raise --tensor-cap or use smaller channels"
        )));
    }
    Ok(())
}

/// Compares the optimal output p-norm of `a ⊗ b` with the product of the single-channel
/// optima. The product search always includes the product of the single certificates and
/// maximally entangled seeds, so for p > 1 `nu_product_lb ≥ product_of_singles` up to
/// rounding. A reported violation ships its certifying input.
pub fn mult_check(a: &KrausChannel, b: &KrausChannel, p: f64, config: &OptimizerConfig) -> Result<MultReport> {
    check_tensor_cap(a, b, config.tensor_cap)?;
    let cfg = OptimizerConfig { p, ..config.clone() };
    let ra = estimate_nu_p(a, &cfg)?;
    let rb = estimate_nu_p(b, &cfg)?;
    let ab = tensor(a, b);
    let tensor_cfg = OptimizerConfig { restarts: config.tensor_restarts.max(1), include_entangled_seeds: true, ..cfg };
    let product_seed = kron_vec(&ra.best_input, &rb.best_input);
    let rab = estimate_with(&ab, &tensor_cfg, Some((a.d_in, b.d_in)), &[product_seed])?;
    let product = ra.best_value * rb.best_value;
    let lb = rab.best_value;
    let violated = if p > 1.0 { lb > product * (1.0 + VIOLATION_TOL) } else { lb < product * (1.0 - VIOLATION_TOL) };
    Ok(MultReport {
        p,
        nu_a: ra.best_value,
        nu_b: rb.best_value,
        nu_product_lb: lb,
        product_of_singles: product,
        gap: lb.ln() - ra.best_value.ln() - rb.best_value.ln(),
        violated,
        certificate_input: rab.best_input,
        monotonicity_violations: ra.monotonicity_violations + rb.monotonicity_violations + rab.monotonicity_violations,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct Threshold {
    /// Bracket `[lo, hi]` around the violation flip after bisection.
    pub lo: f64,
    pub hi: f64,
    pub estimate: f64,
    /// Whether `lo` is the violating side.
    pub violated_below: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct ScanReport {
    pub reports: Vec<MultReport>,
    pub thresholds: Vec<Threshold>,
}

/// [`mult_check`] over a grid of p; each flip of the violation flag between neighbouring
/// grid points is bisected down to a bracket of width [`THRESHOLD_WIDTH`].
pub fn mult_scan(a: &KrausChannel, b: &KrausChannel, p_grid: &[f64], config: &OptimizerConfig) -> Result<ScanReport> {
    check_tensor_cap(a, b, config.tensor_cap)?;
    let reports = p_grid.iter().map(|&p| mult_check(a, b, p, config)).collect::<Result<Vec<_>>>()?;
    let mut thresholds = Vec::new();
    for pair in reports.windows(2) {
        let (l, r) = (&pair[0], &pair[1]);
        if l.violated == r.violated || (l.p - 1.0) * (r.p - 1.0) < 0.0 {
            continue;
        }
        let (mut lo, mut hi) = (l.p, r.p);
        while (hi - lo).abs() > THRESHOLD_WIDTH {
            let mid = 0.5 * (lo + hi);
            if (mid - 1.0).abs() < VN_WINDOW {
                break;
            }
            if mult_check(a, b, mid, config)?.violated == l.violated {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        thresholds.push(Threshold { lo, hi, estimate: 0.5 * (lo + hi), violated_below: l.violated });
    }
    Ok(ScanReport { reports, thresholds })
}

/// Change of `‖Φ(ψψ†)‖_p` after one step from `psi`; zero at critical points.
pub fn step_shift(ch: &KrausChannel, psi: &ComplexVector, p: f64) -> Result<f64> {
    let psi = normalized(psi.clone());
    let next = opt2_step(ch, &psi, p)?;
    Ok((objective(ch, &next.psi, p).powf(1.0 / p) - objective(ch, &psi, p).powf(1.0 / p)).abs())
}

/// Parses `start:stop:step` with inclusive endpoints (within 1e-12).
pub fn parse_grid(spec: &str) -> Result<Vec<f64>> {
    let parts: Vec<f64> = spec
        .split(':')
        .map(|s| s.trim().parse::<f64>().map_err(|_| Error::Parse(format!("bad grid number '{s}'"))))
        .collect::<Result<_>>()?;
    match parts.as_slice() {
        [x] => Ok(vec![*x]),
        [start, stop, step] => {
            if !(*step > 0.0) || stop < start {
                return Err(Error::Parse(format!("grid '{spec}' needs step > 0 and stop >= start")));
            }
            let n = ((stop - start) / step + 1e-12).floor() as usize;
            let mut grid: Vec<f64> = (0..=n).map(|k| start + k as f64 * step).collect();
            if let Some(last) = grid.last_mut() {
                if (*last - stop).abs() <= 1e-12 {
                    *last = *stop;
                }
            }
            Ok(grid)
        }
        _ => Err(Error::Parse(format!("grid '{spec}' must be start:stop:step"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::zoo;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn quick(p: f64) -> OptimizerConfig {
        OptimizerConfig { p, restarts: 8, tensor_restarts: 8, seed: 3, ..OptimizerConfig::default() }
    }

    #[test]
    fn unitary_fixed_point() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let u = zoo::unitary(sample::haar_unitary(&mut rng, 3)).unwrap();
        let psi = sample::pure_state(&mut rng, 3);
        let run = opt2_run(&u, &psi, &quick(2.5)).unwrap();
        assert!((run.value - 1.0).abs() < 1e-12);
        assert!(run.converged);
    }

    #[test]
    fn identity_converges_in_one_step() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let psi = sample::pure_state(&mut rng, 4);
        let run = opt2_run(&zoo::identity(4), &psi, &quick(3.0)).unwrap();
        assert_eq!(run.iterations, 1);
    }

    #[test]
    fn wh_converges_to_closed_form() {
        let w = zoo::werner_holevo(3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let run = opt2_run(&w, &sample::pure_state(&mut rng, 3), &quick(5.0)).unwrap();
        assert!((run.value - 2f64.powf(-0.8)).abs() < 1e-10);
        assert!(run.iterations <= 50);
        assert!(run.trace_powers.windows(2).all(|t| t[1] >= t[0] - 1e-12));
    }

    #[test]
    fn depolarizing_every_state_is_fixed() {
        let dep = zoo::completely_depolarizing(3);
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let psi = sample::pure_state(&mut rng, 3);
        let step = opt2_step(&dep, &psi, 2.0).unwrap();
        assert!((objective(&dep, &step.psi, 2.0) - objective(&dep, &psi, 2.0)).abs() < 1e-15);
        // deterministic tie-break
        let again = opt2_step(&dep, &psi, 2.0).unwrap();
        assert_eq!(step.psi, again.psi);
    }

    #[test]
    fn step_rejects_p_one() {
        let psi = numerics::basis(2, 0);
        assert!(opt2_step(&zoo::identity(2), &psi, 1.0).is_err());
        assert!(opt2_step(&zoo::identity(2), &numerics::basis(3, 0), 2.0).is_err());
    }

    #[test]
    fn wh_tensor_bell_is_fixed_point() {
        let w = zoo::werner_holevo(3).unwrap();
        let ww = tensor(&w, &w);
        let run = opt2_run(&ww, &max_entangled(3), &quick(5.0)).unwrap();
        let expected = (1.0f64 / 3.0).powi(5) + 8.0 * (1.0f64 / 12.0).powi(5);
        assert!((run.trace_powers.last().unwrap() - expected).abs() < 1e-12);
        assert!(step_shift(&ww, &max_entangled(3), 5.0).unwrap() < 1e-9);
    }

    #[test]
    fn nu_p_examples() {
        let w = zoo::werner_holevo(3).unwrap();
        let rep = estimate_nu_p(&w, &quick(2.0)).unwrap();
        assert!((rep.best_value - 0.5f64.sqrt()).abs() < 1e-10);
        assert_eq!(rep.monotonicity_violations, 0);
        let rep = estimate_nu_p(&zoo::identity(3), &quick(4.0)).unwrap();
        assert!((rep.best_value - 1.0).abs() < 1e-12);
    }

    #[test]
    fn nu_p_is_deterministic() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let ch = sample::channel(&mut rng, 3, 3, 3);
        let a = estimate_nu_p(&ch, &quick(2.5)).unwrap();
        let b = estimate_nu_p(&ch, &quick(2.5)).unwrap();
        assert_eq!(a.best_value.to_bits(), b.best_value.to_bits());
        assert_eq!(a.best_input, b.best_input);
    }

    #[test]
    fn smin_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let u = zoo::unitary(sample::haar_unitary(&mut rng, 3)).unwrap();
        assert!(estimate_smin_p(&u, 1.0, &quick(1.0)).unwrap().smin.abs() < 1e-9);
        let dep = zoo::completely_depolarizing(3);
        assert!((estimate_smin_p(&dep, 2.0, &quick(2.0)).unwrap().smin - 3f64.ln()).abs() < 1e-10);
        let s = estimate_smin_p(&zoo::fss_psi(), 1.0, &quick(1.0)).unwrap();
        assert!((s.smin - (3f64.ln() - 2.0 / 3.0 * 2f64.ln())).abs() < 1e-6);
    }

    #[test]
    fn mult_check_identity_has_zero_gap() {
        let rep = mult_check(&zoo::identity(2), &zoo::identity(2), 2.0, &quick(2.0)).unwrap();
        assert!(rep.gap.abs() < 1e-12);
        assert!(!rep.violated);
    }

    #[test]
    fn mult_check_respects_cap() {
        let w = zoo::werner_holevo(3).unwrap();
        let cfg = OptimizerConfig { tensor_cap: 8, ..quick(2.0) };
        assert!(mult_check(&w, &w, 2.0, &cfg).is_err());
    }

    #[test]
    fn grid_parsing() {
        let g = parse_grid("4:5.5:0.25").unwrap();
        assert_eq!(g.len(), 7);
        assert_eq!(*g.last().unwrap(), 5.5);
        assert_eq!(parse_grid("2").unwrap(), vec![2.0]);
        assert!(parse_grid("1:0:0.1").is_err());
        assert!(parse_grid("a:b:c").is_err());
        assert_eq!(parse_grid("0.1:0.3:0.1").unwrap().len(), 3);
    }
}
