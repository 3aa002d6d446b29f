//! Channel representations and the operations defined on them.
//!
//! Conventions:
//! - Kraus form `Φ(ρ) = Σ_k A_k ρ A_k†` with `Σ_k A_k† A_k = I_{d_in}`.
//! - Choi matrix `J(Φ) = (id ⊗ Φ)(|β⟩⟨β|)` on `C^{d_in} ⊗ C^{d_out}` (input leg first),
//!   normalized to unit trace. A minimal Kraus set is recovered from its eigenvectors
//!   scaled by `√(d_in·λ)`.

use serde::{Deserialize, Serialize};

use crate::numerics::{
    self, c64, herm_eig, identity, kron, max_dist, numerical_rank, partial_trace, psd_eig, vectorize,
    ComplexMatrix, ComplexVector, Subsystem, RANK_TOL,
};
use crate::{sample, Error, Result};

/// Trace-preservation tolerance on `‖Σ A†A − I‖_max`.
pub const TP_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KrausChannel {
    pub d_in: usize,
    pub d_out: usize,
    #[serde(with = "numerics::json::vec")]
    pub kraus: Vec<ComplexMatrix>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ValidationReport {
    pub kraus_count: usize,
    pub shapes_consistent: bool,
    /// `‖Σ A_k† A_k − I‖_max`.
    pub tp_residual: f64,
    pub trace_preserving: bool,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.shapes_consistent && self.trace_preserving
    }
}

impl KrausChannel {
    /// Checked constructor: shapes must agree and the Kraus set must be trace preserving.
    pub fn new(d_in: usize, d_out: usize, kraus: Vec<ComplexMatrix>) -> Result<Self> {
        let ch = Self { d_in, d_out, kraus };
        let report = validate_cpt(&ch)?;
        if !report.trace_preserving {
            return Err(Error::NotTracePreserving(report.tp_residual));
        }
        Ok(ch)
    }

    pub fn new_unchecked(d_in: usize, d_out: usize, kraus: Vec<ComplexMatrix>) -> Self {
        Self { d_in, d_out, kraus }
    }

    pub fn len(&self) -> usize {
        self.kraus.len()
    }

    pub fn is_empty(&self) -> bool {
        self.kraus.is_empty()
    }

    /// Parse the channel JSON schema; `validate = false` skips the CPT check.
    pub fn from_json(text: &str, validate: bool) -> Result<Self> {
        let ch: KrausChannel = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        let report = validate_cpt(&ch)?;
        if validate && !report.trace_preserving {
            return Err(Error::NotTracePreserving(report.tp_residual));
        }
        Ok(ch)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("channel serialization cannot fail")
    }

    pub fn apply(&self, rho: &ComplexMatrix) -> Result<ComplexMatrix> {
        if rho.nrows() != self.d_in || rho.ncols() != self.d_in {
            return Err(Error::shape(format!(
                "channel input is {0}x{0}, got {1}x{2}",
                self.d_in,
                rho.nrows(),
                rho.ncols()
            )));
        }
        Ok(self.apply_unchecked(rho))
    }

    pub(crate) fn apply_unchecked(&self, rho: &ComplexMatrix) -> ComplexMatrix {
        let mut out = ComplexMatrix::zeros(self.d_out, self.d_out);
        for a in &self.kraus {
            out += a * rho * a.adjoint();
        }
        out
    }

    /// Output on the pure input `|ψ⟩⟨ψ|`.
    pub fn apply_pure(&self, psi: &ComplexVector) -> ComplexMatrix {
        let mut out = ComplexMatrix::zeros(self.d_out, self.d_out);
        for a in &self.kraus {
            let v = a * psi;
            out += &v * v.adjoint();
        }
        out
    }

    pub fn choi(&self) -> ChoiMatrix {
        kraus_to_choi(self)
    }

    /// Minimal (Choi-Kraus) realization of the same channel.
    pub fn minimal(&self) -> Result<KrausChannel> {
        choi_to_kraus(&self.choi())
    }

    pub fn meta(&self) -> Result<ChannelMeta> {
        let rank = choi_rank(self);
        let ext = is_extreme(self)?;
        Ok(ChannelMeta {
            choi_rank: rank,
            is_extreme: ext.extreme,
            is_generalized_extreme: rank <= self.d_in,
        })
    }
}

/// Shape consistency and the trace-preservation residual. CP holds by construction.
pub fn validate_cpt(ch: &KrausChannel) -> Result<ValidationReport> {
    if ch.kraus.is_empty() {
        return Err(Error::shape("empty Kraus list"));
    }
    if ch.d_in == 0 || ch.d_out == 0 {
        return Err(Error::shape("channel dimensions must be positive"));
    }
    if let Some((k, a)) = ch.kraus.iter().enumerate().find(|(_, a)| a.shape() != (ch.d_out, ch.d_in)) {
        return Err(Error::shape(format!(
            "Kraus operator {k} is {}x{}, expected {}x{}",
            a.nrows(),
            a.ncols(),
            ch.d_out,
            ch.d_in
        )));
    }
    let sum = ch.kraus.iter().fold(ComplexMatrix::zeros(ch.d_in, ch.d_in), |acc, a| acc + a.adjoint() * a);
    let tp_residual = max_dist(&sum, &identity(ch.d_in));
    Ok(ValidationReport {
        kraus_count: ch.kraus.len(),
        shapes_consistent: true,
        tp_residual,
        trace_preserving: tp_residual <= TP_TOL,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChoiMatrix {
    pub d_in: usize,
    pub d_out: usize,
    #[serde(with = "numerics::json")]
    pub matrix: ComplexMatrix,
}

impl ChoiMatrix {
    /// Checked constructor: PSD, unit trace and `Tr_out J = I/d_in`.
    pub fn new(d_in: usize, d_out: usize, matrix: ComplexMatrix) -> Result<Self> {
        let n = d_in * d_out;
        if matrix.shape() != (n, n) {
            return Err(Error::shape(format!("Choi matrix must be {n}x{n}")));
        }
        psd_eig(&matrix)?;
        let reduced = partial_trace(&matrix, (d_in, d_out), Subsystem::A)?;
        let residual = max_dist(&reduced, &identity(d_in).unscale(d_in as f64));
        if residual > TP_TOL {
            return Err(Error::NotTracePreserving(residual));
        }
        Ok(Self { d_in, d_out, matrix })
    }

    pub fn rank(&self) -> usize {
        numerical_rank(&self.matrix, RANK_TOL)
    }
}

pub fn kraus_to_choi(ch: &KrausChannel) -> ChoiMatrix {
    let n = ch.d_in * ch.d_out;
    let mut j = ComplexMatrix::zeros(n, n);
    for a in &ch.kraus {
        // v = Σ_j e_j ⊗ A e_j
        let v = ComplexVector::from_fn(n, |idx, _| a[(idx % ch.d_out, idx / ch.d_out)]);
        j += &v * v.adjoint();
    }
    ChoiMatrix { d_in: ch.d_in, d_out: ch.d_out, matrix: j.unscale(ch.d_in as f64) }
}

/// Minimal Kraus set from the eigenvectors of the Choi matrix with eigenvalues above the
/// rank tolerance.
pub fn choi_to_kraus(choi: &ChoiMatrix) -> Result<KrausChannel> {
    let (d_in, d_out) = (choi.d_in, choi.d_out);
    let checked = ChoiMatrix::new(d_in, d_out, choi.matrix.clone())?;
    let eig = psd_eig(&checked.matrix)?;
    let top = eig.eigenvalues[0];
    let mut kraus = Vec::new();
    for (k, &l) in eig.eigenvalues.iter().enumerate() {
        if l <= RANK_TOL * top {
            break;
        }
        let s = (d_in as f64 * l).sqrt();
        let w = eig.eigenvectors.column(k);
        kraus.push(ComplexMatrix::from_fn(d_out, d_in, |i, j| w[j * d_out + i] * s));
    }
    Ok(KrausChannel::new_unchecked(d_in, d_out, kraus))
}

/// Convex combination of channels with equal dimensions, realized minimally.
pub fn convex_mix(parts: &[(f64, &KrausChannel)]) -> Result<KrausChannel> {
    let (_, first) = parts.first().ok_or_else(|| Error::param("convex_mix of nothing"))?;
    let (d_in, d_out) = (first.d_in, first.d_out);
    let total: f64 = parts.iter().map(|(w, _)| w).sum();
    if parts.iter().any(|(w, _)| *w < 0.0) || (total - 1.0).abs() > 1e-12 {
        return Err(Error::param("convex weights must be nonnegative and sum to 1"));
    }
    let mut j = ComplexMatrix::zeros(d_in * d_out, d_in * d_out);
    for (w, ch) in parts {
        if (ch.d_in, ch.d_out) != (d_in, d_out) {
            return Err(Error::shape("convex_mix of channels with different dimensions"));
        }
        if *w > 0.0 {
            j += kraus_to_choi(ch).matrix.scale(*w);
        }
    }
    choi_to_kraus(&ChoiMatrix { d_in, d_out, matrix: j })
}

pub fn choi_rank(ch: &KrausChannel) -> usize {
    ch.choi().rank()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ChannelMeta {
    pub choi_rank: usize,
    pub is_extreme: bool,
    pub is_generalized_extreme: bool,
}

/// The Hilbert–Schmidt adjoint `Ω̂(X) = Σ A_k† X A_k`, a unital CP map `M_{d_out} → M_{d_in}`.
#[derive(Debug, Clone)]
pub struct AdjointMap {
    pub d_in: usize,
    pub d_out: usize,
    pub kraus: Vec<ComplexMatrix>,
}

impl AdjointMap {
    /// `x` is `d_out × d_out`; result is `d_in × d_in`.
    pub fn apply(&self, x: &ComplexMatrix) -> ComplexMatrix {
        let mut out = ComplexMatrix::zeros(self.d_in, self.d_in);
        for a in &self.kraus {
            out += a.adjoint() * x * a;
        }
        out
    }
}

pub fn adjoint(ch: &KrausChannel) -> AdjointMap {
    AdjointMap { d_in: ch.d_in, d_out: ch.d_out, kraus: ch.kraus.clone() }
}

/// `a ⊗ b` with Kraus operators `A_j ⊗ B_k`.
pub fn tensor(a: &KrausChannel, b: &KrausChannel) -> KrausChannel {
    let kraus = a.kraus.iter().flat_map(|x| b.kraus.iter().map(move |y| kron(x, y))).collect();
    KrausChannel::new_unchecked(a.d_in * b.d_in, a.d_out * b.d_out, kraus)
}

/// `outer ∘ inner`.
pub fn compose(outer: &KrausChannel, inner: &KrausChannel) -> Result<KrausChannel> {
    if outer.d_in != inner.d_out {
        return Err(Error::shape(format!(
            "cannot compose: outer input {} != inner output {}",
            outer.d_in, inner.d_out
        )));
    }
    let kraus = outer.kraus.iter().flat_map(|x| inner.kraus.iter().map(move |m| x * m)).collect();
    Ok(KrausChannel::new_unchecked(inner.d_in, outer.d_out, kraus))
}

/// Complementary channel `[Φ^C(ρ)]_{jk} = Tr(A_j ρ A_k†)`, output dimension = Kraus count.
pub fn complement(ch: &KrausChannel) -> KrausChannel {
    let k = ch.kraus.len();
    // F_i = Σ_j |j⟩⟨e_i| A_j
    let kraus = (0..ch.d_out)
        .map(|i| ComplexMatrix::from_fn(k, ch.d_in, |j, c| ch.kraus[j][(i, c)]))
        .collect();
    KrausChannel::new_unchecked(ch.d_in, k, kraus)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ExtremalityReport {
    pub extreme: bool,
    /// Number of minimal Kraus operators `K`.
    pub kraus_count: usize,
    /// Numerical rank of the span of `{A_j† A_k}`.
    pub product_rank: usize,
    /// `K² − product_rank`.
    pub rank_deficit: usize,
}

/// Extremality test on the minimal Kraus set: `{A_j†A_k}` must be linearly independent.
pub fn is_extreme(ch: &KrausChannel) -> Result<ExtremalityReport> {
    let min = ch.minimal()?;
    Ok(extremality_of_kraus(&min.kraus, ch.d_in))
}

fn extremality_of_kraus(kraus: &[ComplexMatrix], d_in: usize) -> ExtremalityReport {
    let k = kraus.len();
    let needed = k * k;
    if k > d_in {
        // K² products cannot be independent in a d_in²-dimensional space
        let rank = products_rank(kraus, d_in);
        return ExtremalityReport { extreme: false, kraus_count: k, product_rank: rank, rank_deficit: needed - rank };
    }
    let rank = products_rank(kraus, d_in);
    ExtremalityReport { extreme: rank == needed, kraus_count: k, product_rank: rank, rank_deficit: needed - rank }
}

fn products_rank(kraus: &[ComplexMatrix], d_in: usize) -> usize {
    let k = kraus.len();
    let mut rows = ComplexMatrix::zeros(k * k, d_in * d_in);
    for (j, aj) in kraus.iter().enumerate() {
        for (l, al) in kraus.iter().enumerate() {
            let v = vectorize(&(aj.adjoint() * al));
            rows.set_row(j * k + l, &v.transpose());
        }
    }
    numerical_rank(&rows, RANK_TOL)
}

#[derive(Debug, Clone)]
pub struct PerturbOutcome {
    pub channel: KrausChannel,
    /// ε at which the returned channel was accepted (0 for the no-op cases).
    pub epsilon: f64,
    /// Input was already extreme; nothing was changed.
    pub already_extreme: bool,
    /// Every ε tried, largest first.
    pub tried: Vec<f64>,
    /// Max-entry distance between the Choi matrices of output and input.
    pub choi_distance: f64,
}

/// Reference extreme channel with `d_in` Kraus operators from a seeded Haar isometry.
pub fn reference_extreme(d_in: usize, d_out: usize, seed: u64) -> Result<KrausChannel> {
    for attempt in 0..8 {
        let mut rng = sample::stream(seed, attempt);
        let b = sample::channel(&mut rng, d_in, d_out, d_in);
        if extremality_of_kraus(&b.kraus, d_in).extreme {
            return Ok(b);
        }
    }
    Err(Error::SearchExhausted(format!("no extreme reference channel with {d_in} Kraus operators into d_out = {d_out}")))
}

/// `C_k(ε) S(ε)^{-1/2}` with `C_k = A_k + εB_k`; `None` if `S(ε)` is not positive definite.
pub fn perturbed_channel(padded: &[ComplexMatrix], reference: &KrausChannel, eps: f64) -> Option<KrausChannel> {
    let (d_in, d_out) = (reference.d_in, reference.d_out);
    let c: Vec<ComplexMatrix> = padded.iter().zip(&reference.kraus).map(|(a, b)| a + b.scale(eps)).collect();
    let s = c.iter().fold(ComplexMatrix::zeros(d_in, d_in), |acc, x| acc + x.adjoint() * x);
    let eig = herm_eig(&s).ok()?;
    let bottom = *eig.eigenvalues.last()?;
    if bottom <= 1e-12 * eig.eigenvalues[0].abs() {
        return None;
    }
    let s_inv_half = eig.map(|l| l.powf(-0.5));
    let kraus = c.iter().map(|x| x * &s_inv_half).collect();
    Some(KrausChannel::new_unchecked(d_in, d_out, kraus))
}

/// Pad a minimal Kraus set with zero operators up to `d_in` entries.
pub fn pad_kraus(min: &KrausChannel) -> Result<Vec<ComplexMatrix>> {
    if min.len() > min.d_in {
        return Err(Error::param(format!(
            "Choi rank {} exceeds d_in = {}; channel is not a generalized extreme point",
            min.len(),
            min.d_in
        )));
    }
    let mut padded = min.kraus.clone();
    padded.resize(min.d_in, ComplexMatrix::zeros(min.d_out, min.d_in));
    Ok(padded)
}

/// Moves a non-extreme channel of Choi rank ≤ d_in onto a nearby extreme point.
///
/// Searches ε = ε₀, ε₀/2, ε₀/4, … until `S(ε)` is invertible and the renormalized channel
/// passes [`is_extreme`]. ε₀ = 0 returns the input unchanged.
pub fn perturb_to_extreme(ch: &KrausChannel, epsilon0: f64, seed: u64) -> Result<PerturbOutcome> {
    if !(epsilon0 >= 0.0) {
        return Err(Error::param("epsilon0 must be nonnegative"));
    }
    let min = ch.minimal()?;
    let unchanged = |already_extreme| PerturbOutcome {
        channel: ch.clone(),
        epsilon: 0.0,
        already_extreme,
        tried: vec![],
        choi_distance: 0.0,
    };
    if extremality_of_kraus(&min.kraus, ch.d_in).extreme {
        return Ok(unchanged(true));
    }
    let padded = pad_kraus(&min)?;
    if epsilon0 == 0.0 {
        return Ok(unchanged(false));
    }
    let reference = reference_extreme(ch.d_in, ch.d_out, seed)?;
    let base = ch.choi();
    let mut tried = Vec::new();
    let mut eps = epsilon0;
    while eps > 1e-12 {
        tried.push(eps);
        if let Some(cand) = perturbed_channel(&padded, &reference, eps) {
            if extremality_of_kraus(&cand.kraus, ch.d_in).extreme {
                let choi_distance = max_dist(&cand.choi().matrix, &base.matrix);
                return Ok(PerturbOutcome { channel: cand, epsilon: eps, already_extreme: false, tried, choi_distance });
            }
        }
        eps *= 0.5;
    }
    Err(Error::SearchExhausted(format!("no extreme perturbation down to eps = {:.3e}", tried.last().unwrap_or(&epsilon0))))
}

/// Max-entry distance between `Choi(X∘M)` and `Choi(N^C)`; `≤ 1e-8` counts as verified.
pub fn verify_degrading(x: &KrausChannel, m: &KrausChannel, n: &KrausChannel) -> Result<f64> {
    if m.d_in != n.d_in {
        return Err(Error::shape(format!("M and N inputs differ: {} vs {}", m.d_in, n.d_in)));
    }
    let xm = compose(x, m)?;
    let nc = complement(n);
    if xm.d_out != nc.d_out {
        return Err(Error::shape(format!(
            "X∘M outputs dimension {} but N^C outputs {}",
            xm.d_out, nc.d_out
        )));
    }
    Ok(max_dist(&xm.choi().matrix, &nc.choi().matrix))
}

/// Verification threshold for [`verify_degrading`].
pub const DEGRADING_TOL: f64 = 1e-8;

/// The trace map `ρ ↦ Tr ρ` as a channel into `C^1`.
pub fn trace_map(d: usize) -> KrausChannel {
    let kraus = (0..d).map(|j| ComplexMatrix::from_fn(1, d, |_, c| if c == j { c64::new(1.0, 0.0) } else { c64::new(0.0, 0.0) })).collect();
    KrausChannel::new_unchecked(d, 1, kraus)
}
