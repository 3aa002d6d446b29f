//! Constructors for the concrete channel families.

use serde::{Deserialize, Serialize};

use crate::channels::{convex_mix, validate_cpt, KrausChannel};
use crate::numerics::{self, c64, max_dist, ComplexMatrix, ComplexVector};
use crate::{sample, Error, Result};

const UNITARY_TOL: f64 = 1e-10;

fn real(x: f64) -> c64 {
    c64::new(x, 0.0)
}

fn checked(ch: KrausChannel) -> Result<KrausChannel> {
    let r = validate_cpt(&ch)?;
    if !r.trace_preserving {
        return Err(Error::NotTracePreserving(r.tp_residual));
    }
    Ok(ch)
}

pub fn identity_channel(d: usize) -> KrausChannel {
    KrausChannel::new_unchecked(d, d, vec![numerics::identity(d)])
}

pub use identity_channel as identity;

fn eye(d: usize) -> ComplexMatrix {
    numerics::identity(d)
}

fn is_unitary(u: &ComplexMatrix) -> bool {
    u.is_square() && max_dist(&(u.adjoint() * u), &numerics::identity(u.nrows())) <= UNITARY_TOL
}

/// `ρ ↦ UρU†`.
pub fn unitary(u: ComplexMatrix) -> Result<KrausChannel> {
    if !is_unitary(&u) {
        return Err(Error::param("matrix is not unitary"));
    }
    let d = u.nrows();
    Ok(KrausChannel::new_unchecked(d, d, vec![u]))
}

/// Cyclic shift `X|e_j⟩ = |e_{j+1 mod d}⟩`.
pub fn shift(d: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(d, d, |i, j| if i == (j + 1) % d { real(1.0) } else { real(0.0) })
}

/// Clock `Z|e_j⟩ = ω^j |e_j⟩`.
pub fn clock(d: usize) -> ComplexMatrix {
    let w = 2.0 * std::f64::consts::PI / d as f64;
    ComplexMatrix::from_fn(d, d, |i, j| if i == j { c64::from_polar(1.0, w * i as f64) } else { real(0.0) })
}

/// `ρ ↦ (Tr ρ) I/d`, with the `d²` Weyl operators `X^a Z^b / d` as Kraus operators
/// (normalized Paulis for d = 2).
pub fn completely_depolarizing(d: usize) -> KrausChannel {
    let (x, z) = (shift(d), clock(d));
    let mut kraus = Vec::with_capacity(d * d);
    let mut xa = eye(d);
    for _ in 0..d {
        let mut zb = eye(d);
        for _ in 0..d {
            kraus.push((&xa * &zb).unscale(d as f64));
            zb = &zb * &z;
        }
        xa = &xa * &x;
    }
    KrausChannel::new_unchecked(d, d, kraus)
}

/// `x·id + (1−x)·(completely depolarizing)`.
pub fn depolarizing(d: usize, x: f64) -> Result<KrausChannel> {
    check_unit_interval("x", x)?;
    convex_mix(&[(x, &identity_channel(d)), (1.0 - x, &completely_depolarizing(d))])
}

fn check_unit_interval(name: &str, x: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::param(format!("{name} = {x} outside [0, 1]")));
    }
    Ok(())
}

/// Werner–Holevo channel `W(ρ) = ((Tr ρ) I − ρᵀ)/(d−1)`, realized by the antisymmetric
/// generators `(|e_j⟩⟨e_k| − |e_k⟩⟨e_j|)/√(d−1)`, `j < k`.
pub fn werner_holevo(d: usize) -> Result<KrausChannel> {
    if d < 2 {
        return Err(Error::param(format!("Werner-Holevo needs d >= 2, got {d}")));
    }
    let s = 1.0 / ((d - 1) as f64).sqrt();
    let mut kraus = Vec::with_capacity(d * (d - 1) / 2);
    for j in 0..d {
        for k in j + 1..d {
            let mut e = ComplexMatrix::zeros(d, d);
            e[(j, k)] = real(s);
            e[(k, j)] = real(-s);
            kraus.push(e);
        }
    }
    checked(KrausChannel::new_unchecked(d, d, kraus))
}

/// Direct evaluation of the Werner–Holevo formula.
pub fn werner_holevo_formula(rho: &ComplexMatrix) -> ComplexMatrix {
    let d = rho.nrows();
    (eye(d) * numerics::trace(rho) - rho.transpose()).unscale((d - 1) as f64)
}

/// `Φ_x = x·id + (1−x)·W`.
pub fn depolarized_wh(d: usize, x: f64) -> Result<KrausChannel> {
    check_unit_interval("x", x)?;
    let w = werner_holevo(d)?;
    convex_mix(&[(x, &identity_channel(d)), (1.0 - x, &w)])
}

/// The four vectors `ψ_0..ψ_3` (entries ±1/√3) of the qutrit channel Ψ.
pub fn fss_vectors() -> [ComplexVector; 4] {
    let s = 1.0 / 3f64.sqrt();
    [[1., 1., 1.], [1., -1., -1.], [1., -1., 1.], [1., 1., -1.]]
        .map(|v| ComplexVector::from_iterator(3, v.iter().map(|&x| real(x * s))))
}

/// Ψ with the rank-one Kraus operators `(√3/2)|ψ_k⟩⟨ψ_k|`.
///
/// Note: with these real vectors the channel acts as `ρ ↦ (I + ρ + ρᵀ − 2·diag ρ)/3`,
/// which differs from `depolarized_wh(3, 1/3)` on the imaginary antisymmetric part.
pub fn fss_psi() -> KrausChannel {
    let c = 3f64.sqrt() / 2.0;
    let kraus = fss_vectors().iter().map(|v| numerics::projector(v).scale(c)).collect();
    KrausChannel::new_unchecked(3, 3, kraus)
}

/// `X^k [U 0; 0 0] X^{-k}` for a `(d−1)×(d−1)` block `U`.
fn shifted_block(d: usize, k: usize, u: &ComplexMatrix) -> ComplexMatrix {
    let mut block = ComplexMatrix::zeros(d, d);
    block.view_mut((0, 0), (d - 1, d - 1)).copy_from(u);
    let xk = shift(d).pow(k as u32);
    &xk * block * xk.adjoint()
}

/// Sub-unitary shift channel with Kraus operators `c · X^k [U_k 0; 0 0] X^{-k}`, `k = 0..d−1`,
/// for an arbitrary prefactor `c` (no trace-preservation check). A single unitary is
/// replicated to all `k`.
pub fn shift_kraus_with_prefactor(d: usize, unitaries: &[ComplexMatrix], c: f64) -> Result<KrausChannel> {
    if d < 2 {
        return Err(Error::param("shift channel needs d >= 2"));
    }
    if unitaries.len() != 1 && unitaries.len() != d {
        return Err(Error::param(format!("expected 1 or {d} unitaries, got {}", unitaries.len())));
    }
    for (k, u) in unitaries.iter().enumerate() {
        if u.shape() != (d - 1, d - 1) {
            return Err(Error::shape(format!("unitary {k} must be {0}x{0}", d - 1)));
        }
        if !is_unitary(u) {
            return Err(Error::param(format!("block {k} is not unitary")));
        }
    }
    let kraus = (0..d)
        .map(|k| shifted_block(d, k, &unitaries[if unitaries.len() == 1 { 0 } else { k }]).scale(c))
        .collect();
    Ok(KrausChannel::new_unchecked(d, d, kraus))
}

/// Sub-unitary shift channel with the trace-preserving prefactor `1/√(d−1)`.
pub fn shift_subunitary(d: usize, unitaries: &[ComplexMatrix]) -> Result<KrausChannel> {
    checked(shift_kraus_with_prefactor(d, unitaries, 1.0 / ((d - 1) as f64).sqrt())?)
}

/// Sub-unitary channel from `d` cycles of length `d−1` on the labels `1..=d`: each Kraus
/// operator is `(1/√(d−1)) Σ_a |e_σ(a)⟩⟨e_a|` over the cycle's support. Every label must
/// be left out by exactly one cycle.
pub fn cycle_subunitary(d: usize, cycles: &[Vec<usize>]) -> Result<KrausChannel> {
    if d < 2 || cycles.len() != d {
        return Err(Error::param(format!("expected {d} cycles")));
    }
    let s = 1.0 / ((d - 1) as f64).sqrt();
    let mut kraus = Vec::with_capacity(d);
    for cyc in cycles {
        let mut seen = vec![false; d];
        if cyc.len() != d - 1 {
            return Err(Error::param(format!("cycle {cyc:?} must have length {}", d - 1)));
        }
        for &a in cyc {
            if a == 0 || a > d || std::mem::replace(&mut seen[a - 1], true) {
                return Err(Error::param(format!("cycle {cyc:?} has a bad or repeated label")));
            }
        }
        let mut p = ComplexMatrix::zeros(d, d);
        for (i, &a) in cyc.iter().enumerate() {
            let b = cyc[(i + 1) % cyc.len()];
            p[(b - 1, a - 1)] = real(s);
        }
        kraus.push(p);
    }
    checked(KrausChannel::new_unchecked(d, d, kraus))
}

/// The d = 4 permutations (123), (134), (142), (243).
pub fn permutation_example_cycles() -> Vec<Vec<usize>> {
    vec![vec![1, 2, 3], vec![1, 3, 4], vec![1, 4, 2], vec![2, 4, 3]]
}

fn orthonormal_pair(name: &str, pair: &[ComplexVector; 2]) -> Result<()> {
    let g = |a: &ComplexVector, b: &ComplexVector| a.dotc(b);
    let (a, b) = (&pair[0], &pair[1]);
    if a.len() != b.len()
        || (g(a, a).re - 1.0).abs() > UNITARY_TOL
        || (g(b, b).re - 1.0).abs() > UNITARY_TOL
        || g(a, b).norm() > UNITARY_TOL
    {
        return Err(Error::param(format!("{name} is not an orthonormal pair")));
    }
    Ok(())
}

/// Qubit-input channel of Choi rank ≤ 2:
/// `A₁ = Σ α_j |v_j⟩⟨u_j|`, `A₂ = Σ √(1−α_j²) |w_j⟩⟨u_j|`.
pub fn qubit_generalized_extreme(
    alpha: [f64; 2],
    u: [ComplexVector; 2],
    v: [ComplexVector; 2],
    w: [ComplexVector; 2],
) -> Result<KrausChannel> {
    for a in alpha {
        check_unit_interval("alpha", a)?;
    }
    orthonormal_pair("u", &u)?;
    orthonormal_pair("v", &v)?;
    orthonormal_pair("w", &w)?;
    if u[0].len() != 2 {
        return Err(Error::shape("u vectors must live in C^2"));
    }
    let d_out = v[0].len();
    if w[0].len() != d_out {
        return Err(Error::shape("v and w must have the same dimension"));
    }
    let mut a1 = ComplexMatrix::zeros(d_out, 2);
    let mut a2 = ComplexMatrix::zeros(d_out, 2);
    for j in 0..2 {
        a1 += (&v[j] * u[j].adjoint()).scale(alpha[j]);
        a2 += (&w[j] * u[j].adjoint()).scale((1.0 - alpha[j] * alpha[j]).sqrt());
    }
    checked(KrausChannel::new_unchecked(2, d_out, vec![a1, a2]))
}

#[derive(Debug, Clone)]
pub struct NearDepolarizing {
    pub channel: KrausChannel,
    /// Weight of the random channel inside `M_ε`.
    pub delta: f64,
    /// Largest `‖M_ε(ψ) − I/d‖_max` seen on the probe states.
    pub probe_max: f64,
    /// ε was too small for a nonzero δ; `M_ε` is exactly depolarizing.
    pub exact_depolarizing: bool,
}

/// Default number of pure probe states for [`near_depolarizing`].
pub const PROBE_SAMPLES: usize = 1000;

/// `Φ_{x,ε} = x·id + (1−x)·M_ε` with `M_ε = (1−δ)·depolarizing + δ·R` for a seeded random
/// channel `R`. δ is set to half of `ε / m`, where `m` is the largest max-entry deviation of
/// `R(ψ)` from `I/d` over `probe_samples` random pure states.
pub fn near_depolarizing(d: usize, epsilon: f64, x: f64, seed: u64, probe_samples: usize) -> Result<NearDepolarizing> {
    if !(epsilon >= 0.0) {
        return Err(Error::param("epsilon must be nonnegative"));
    }
    check_unit_interval("x", x)?;
    let dep = completely_depolarizing(d);
    let mut rng = sample::stream(seed, 0);
    let r = sample::channel(&mut rng, d, d, d);
    let mixed = eye(d).unscale(d as f64);
    let mut probe_rng = sample::stream(seed, 1);
    let r_dev = (0..probe_samples.max(1))
        .map(|_| max_dist(&r.apply_pure(&sample::pure_state(&mut probe_rng, d)), &mixed))
        .fold(0.0, f64::max);
    let delta = if r_dev > 0.0 { (0.5 * epsilon / r_dev).min(1.0) } else { 1.0 };
    let exact_depolarizing = !(delta > 0.0) || epsilon == 0.0;
    let m_eps = if exact_depolarizing { dep.clone() } else { convex_mix(&[(1.0 - delta, &dep), (delta, &r)])? };
    let channel = if x == 0.0 { m_eps } else { convex_mix(&[(x, &identity_channel(d)), (1.0 - x, &m_eps)])? };
    Ok(NearDepolarizing {
        channel,
        delta: if exact_depolarizing { 0.0 } else { delta },
        probe_max: if exact_depolarizing { 0.0 } else { delta * r_dev },
        exact_depolarizing,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    Identity,
    Depolarizing,
    WernerHolevo,
    DepolarizedWh,
    FssPsi,
    ShiftSubunitary,
    QubitGeneralizedExtreme,
    NearDepolarizing,
}

impl std::str::FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        serde_json::from_value(serde_json::Value::String(s.to_string()))
            .map_err(|_| Error::param(format!("unknown channel family '{s}'")))
    }
}

/// Serializable description of a channel from the zoo.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ChannelSpec {
    pub family: Family,
    #[serde(default)]
    pub dim: Option<usize>,
    #[serde(default)]
    pub x: Option<f64>,
    #[serde(default)]
    pub epsilon: Option<f64>,
    /// `(d−1)×(d−1)` unitary blocks for the shift family.
    #[serde(default, with = "opt_matrices", skip_serializing_if = "Option::is_none")]
    pub unitaries: Option<Vec<ComplexMatrix>>,
    /// Alternative to `unitaries`: cycles on the labels `1..=d`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cycles: Option<Vec<Vec<usize>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<[f64; 2]>,
    /// `u`, `v`, `w` pairs for the qubit family, each vector as `[re, im]` pairs.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub u: Option<[Vec<[f64; 2]>; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub v: Option<[Vec<[f64; 2]>; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub w: Option<[Vec<[f64; 2]>; 2]>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub probe_samples: Option<usize>,
}

mod opt_matrices {
    use super::*;
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &Option<Vec<ComplexMatrix>>, s: S) -> std::result::Result<S::Ok, S::Error> {
        v.as_ref().map(|ms| ms.iter().map(numerics::json::encode).collect::<Vec<_>>()).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Option<Vec<ComplexMatrix>>, D::Error> {
        use serde::de::Error as _;
        let raw = Option::<Vec<Vec<Vec<[f64; 2]>>>>::deserialize(d)?;
        raw.map(|all| all.iter().map(|m| numerics::json::decode(m).map_err(D::Error::custom)).collect()).transpose()
    }
}

fn vector_pair(name: &str, raw: &Option<[Vec<[f64; 2]>; 2]>, default: [ComplexVector; 2]) -> Result<[ComplexVector; 2]> {
    match raw {
        None => Ok(default),
        Some(pair) => {
            let conv = |v: &Vec<[f64; 2]>| ComplexVector::from_iterator(v.len(), v.iter().map(|p| c64::new(p[0], p[1])));
            if pair[0].is_empty() {
                return Err(Error::param(format!("{name} vectors are empty")));
            }
            Ok([conv(&pair[0]), conv(&pair[1])])
        }
    }
}

impl ChannelSpec {
    pub fn new(family: Family) -> Self {
        Self {
            family,
            dim: None,
            x: None,
            epsilon: None,
            unitaries: None,
            cycles: None,
            alpha: None,
            u: None,
            v: None,
            w: None,
            seed: 0,
            probe_samples: None,
        }
    }

    pub fn with_dim(mut self, d: usize) -> Self {
        self.dim = Some(d);
        self
    }

    fn dim_or(&self, default: usize) -> usize {
        self.dim.unwrap_or(default)
    }

    pub fn build(&self) -> Result<KrausChannel> {
        let need_dim = || self.dim.ok_or_else(|| Error::param(format!("family {:?} needs a dimension", self.family)));
        match self.family {
            Family::Identity => Ok(identity_channel(need_dim()?)),
            Family::Depolarizing => depolarizing(need_dim()?, self.x.unwrap_or(0.0)),
            Family::WernerHolevo => werner_holevo(need_dim()?),
            Family::DepolarizedWh => {
                depolarized_wh(need_dim()?, self.x.ok_or_else(|| Error::param("depolarized_wh needs x"))?)
            }
            Family::FssPsi => {
                if self.dim.is_some_and(|d| d != 3) {
                    return Err(Error::param("fss_psi is fixed to d = 3"));
                }
                Ok(fss_psi())
            }
            Family::ShiftSubunitary => {
                let d = need_dim()?;
                match (&self.unitaries, &self.cycles) {
                    (Some(us), None) => shift_subunitary(d, us),
                    (None, Some(cs)) => cycle_subunitary(d, cs),
                    (None, None) => {
                        let mut rng = sample::stream(self.seed, 0);
                        let us: Vec<_> = (0..d).map(|_| sample::haar_unitary(&mut rng, d - 1)).collect();
                        shift_subunitary(d, &us)
                    }
                    (Some(_), Some(_)) => Err(Error::param("give either unitaries or cycles, not both")),
                }
            }
            Family::QubitGeneralizedExtreme => {
                let d_out = self.dim_or(2);
                let e = |j| numerics::basis(d_out, j);
                let u = vector_pair("u", &self.u, [numerics::basis(2, 0), numerics::basis(2, 1)])?;
                let v = vector_pair("v", &self.v, [e(0), e(1 % d_out)])?;
                let w = vector_pair("w", &self.w, [e(0), e(1 % d_out)])?;
                qubit_generalized_extreme(self.alpha.unwrap_or([1.0, 1.0]), u, v, w)
            }
            Family::NearDepolarizing => Ok(near_depolarizing(
                need_dim()?,
                self.epsilon.unwrap_or(0.0),
                self.x.unwrap_or(0.0),
                self.seed,
                self.probe_samples.unwrap_or(PROBE_SAMPLES),
            )?
            .channel),
        }
    }
}
