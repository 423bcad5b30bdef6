//! Per-eigenphase simulation of the block-encoded state preparation and its
//! amplitude amplification.
//!
//! `U′` is diagonal, so the whole circuit acts on each `|x⟩` through a 4×4
//! unitary on the two ancillae: `A` (which parity block) and `B` (the QSP
//! qubit). Ancilla basis index is `2·a + b`; `|00⟩` is index 0.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::laurent::LaurentPoly;
use crate::mat2::Mat2;
use crate::phasefn::{parity_components, FourierTruncation};
use crate::synthesis::{
    check_eta, reconstruct_unchecked, rescale_to_admissible, sup_bound, synthesize,
    RotationSequence, MAX_SYNTHESIS_DEGREE,
};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

pub type Mat4 = [[Complex64; 4]; 4];
pub type Ancillae = [Complex64; 4];

/// The sampling instance `c : X -> [0, 1)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleTable {
    values: Vec<f64>,
    /// Bits of precision of the oracle's output.
    bits: u32,
}

impl OracleTable {
    pub fn new(values: Vec<f64>, bits: u32) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::param("values", "need at least one element"));
        }
        if let Some(v) = values.iter().find(|v| !(**v >= 0.0 && **v < 1.0)) {
            return Err(Error::param("values", format!("{v} is not in [0, 1)")));
        }
        Ok(OracleTable { values, bits })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    /// `c̄`, the average value.
    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }

    /// `c(x) / Σ c`.
    pub fn target_distribution(&self) -> Result<Vec<f64>> {
        let total: f64 = self.values.iter().sum();
        if total <= 0.0 {
            return Err(Error::ZeroSuccess);
        }
        Ok(self.values.iter().map(|v| v / total).collect())
    }
}

/// `⌊√c · 2^m⌋`, the `m`-bit truncation of `√c` as an integer.
pub fn truncated_sqrt_bits(c: f64, m: u32) -> u64 {
    (c.sqrt() * (m as f64).exp2()).floor() as u64
}

/// `⌊√c · 2^m⌋ / 2^m`.
pub fn truncated_sqrt(c: f64, m: u32) -> f64 {
    truncated_sqrt_bits(c, m) as f64 / (m as f64).exp2()
}

/// Eigenphases `θ_x = π·√c̃(x)/2` of the phase oracle `U′`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigenphaseEnsemble {
    phases: Vec<f64>,
    truncation_bits: u32,
}

impl EigenphaseEnsemble {
    pub fn phases(&self) -> &[f64] {
        &self.phases
    }

    pub fn truncation_bits(&self) -> u32 {
        self.truncation_bits
    }

    pub fn len(&self) -> usize {
        self.phases.len()
    }

    pub fn is_empty(&self) -> bool {
        self.phases.is_empty()
    }
}

/// Exact model of the controlled-phase ladder: bit `j` of `√c̃` (weight
/// `2^-j`) contributes `e^{iπ/2^{j+1}}`, and the contributions add up to
/// `π·√c̃/2`.
pub fn phase_oracle_model(table: &OracleTable, m_prime: u32) -> Result<EigenphaseEnsemble> {
    if !(1..=52).contains(&m_prime) {
        return Err(Error::param(
            "m_prime",
            format!("{m_prime} is not in 1..=52"),
        ));
    }
    Ok(EigenphaseEnsemble {
        phases: table
            .values
            .iter()
            .map(|&c| PI * truncated_sqrt(c, m_prime) / 2.0)
            .collect(),
        truncation_bits: m_prime,
    })
}

/// The QSP unitary at eigenphase `θ`: `reconstruct(seq, e^{iθ})`.
pub fn qet_apply(seq: &RotationSequence, theta: f64) -> Mat2 {
    reconstruct_unchecked(seq, Complex64::from_polar(1.0, theta))
}

/// `|0⟩_A`-branch amplitude of H – select(U0, U1) – H on `|0⟩_A|0⟩_B`,
/// i.e. `(f0 + f1)/2` at `e^{iθ}`.
pub fn sum_block_encoding(
    seq0: &RotationSequence,
    seq1: &RotationSequence,
    theta: f64,
) -> Complex64 {
    (qet_apply(seq0, theta).0[0][0] + qet_apply(seq1, theta).0[0][0]) / 2.0
}

/// `(H ⊗ 1)(|0⟩⟨0| ⊗ U0 + |1⟩⟨1| ⊗ U1)(H ⊗ 1)` on the two ancillae.
pub fn ancilla_unitary(u0: &Mat2, u1: &Mat2) -> Mat4 {
    let mut m = [[ZERO; 4]; 4];
    for a in 0..2 {
        for b in 0..2 {
            for a2 in 0..2 {
                for b2 in 0..2 {
                    let sign = if (a + a2) % 2 == 1 { -1.0 } else { 1.0 };
                    m[2 * a + b][2 * a2 + b2] = (u0.0[b][b2] + u1.0[b][b2] * sign) / 2.0;
                }
            }
        }
    }
    m
}

fn mat4_apply(m: &Mat4, v: &Ancillae) -> Ancillae {
    let mut out = [ZERO; 4];
    for (r, o) in out.iter_mut().enumerate() {
        *o = (0..4).map(|c| m[r][c] * v[c]).sum();
    }
    out
}

fn mat4_apply_adjoint(m: &Mat4, v: &Ancillae) -> Ancillae {
    let mut out = [ZERO; 4];
    for (r, o) in out.iter_mut().enumerate() {
        *o = (0..4).map(|c| m[c][r].conj() * v[c]).sum();
    }
    out
}

/// Rotation sequences for `2s·S0` and `2s·S1`, the two parity blocks of a
/// truncation, with a common scale `s = (1-η)/max(1, sup|2S0|, sup|2S1|)`.
/// The LCU amplitude is then `s·S̄(e^{iθ})`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ParityPair {
    pub seq0: RotationSequence,
    pub seq1: RotationSequence,
    pub scale: f64,
    pub eta: f64,
    /// Worst round-trip residual of the two syntheses.
    pub residual: f64,
}

impl ParityPair {
    pub fn synthesize(trunc: &FourierTruncation, eta: f64) -> Result<Self> {
        if trunc.degree > MAX_SYNTHESIS_DEGREE {
            return Err(Error::SynthesisDegree {
                degree: trunc.degree,
                cap: MAX_SYNTHESIS_DEGREE,
            });
        }
        let (s0, s1) = parity_components(trunc);
        let (t0, t1) = (s0.scale_real(2.0), s1.scale_real(2.0));
        check_eta(eta)?;
        let sup = sup_bound(&t0)?.max(sup_bound(&t1)?).max(1.0);
        let scale = (1.0 - eta) / sup;
        let syn0 = synthesize(&t0.scale_real(scale))?;
        let syn1 = synthesize(&t1.scale_real(scale))?;
        Ok(ParityPair {
            seq0: syn0.sequence,
            seq1: syn1.sequence,
            scale,
            eta,
            residual: syn0.residual.max(syn1.residual),
        })
    }

    /// `U′` calls per application: the summed degrees of both sequences.
    pub fn u_prime_calls(&self) -> usize {
        self.seq0.degree() + self.seq1.degree()
    }
}

/// The state preparation `S`, stored as one ancilla unitary per element.
#[derive(Debug, Clone)]
pub struct StatePrep {
    blocks: Vec<Mat4>,
}

impl StatePrep {
    pub fn new(
        ensemble: &EigenphaseEnsemble,
        seq0: &RotationSequence,
        seq1: &RotationSequence,
    ) -> Self {
        let blocks = ensemble
            .phases
            .iter()
            .map(|&theta| ancilla_unitary(&qet_apply(seq0, theta), &qet_apply(seq1, theta)))
            .collect();
        StatePrep { blocks }
    }

    /// A preparation from explicit per-element ancilla unitaries.
    pub fn from_blocks(blocks: Vec<Mat4>) -> Result<Self> {
        if blocks.is_empty() {
            return Err(Error::param("blocks", "need at least one element"));
        }
        for m in &blocks {
            let mut defect: f64 = 0.0;
            for r in 0..4 {
                for c in 0..4 {
                    let dot: Complex64 = (0..4).map(|k| m[k][r].conj() * m[k][c]).sum();
                    let want = if r == c { 1.0 } else { 0.0 };
                    defect = defect.max((dot - want).norm());
                }
            }
            if defect > 1e-10 {
                return Err(Error::NotUnitary(defect));
            }
        }
        Ok(StatePrep { blocks })
    }

    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    pub fn blocks(&self) -> &[Mat4] {
        &self.blocks
    }

    /// `|Ψ⟩ = |00⟩ ⊗ |+⟩^{⊗n}` (uniform over the elements).
    pub fn initial_state(&self) -> Vec<Ancillae> {
        let amp = Complex64::new(1.0 / (self.blocks.len() as f64).sqrt(), 0.0);
        vec![[amp, ZERO, ZERO, ZERO]; self.blocks.len()]
    }

    pub fn apply(&self, state: &mut [Ancillae]) {
        for (v, m) in state.iter_mut().zip(&self.blocks) {
            *v = mat4_apply(m, v);
        }
    }

    pub fn apply_adjoint(&self, state: &mut [Ancillae]) {
        for (v, m) in state.iter_mut().zip(&self.blocks) {
            *v = mat4_apply_adjoint(m, v);
        }
    }

    /// `S|Ψ⟩`.
    pub fn prepare(&self) -> BlockEncodedState {
        let mut state = self.initial_state();
        self.apply(&mut state);
        BlockEncodedState { state }
    }
}

/// A full state of ancillae ⊗ system, one 4-vector per element.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockEncodedState {
    state: Vec<Ancillae>,
}

impl BlockEncodedState {
    pub fn from_state(state: Vec<Ancillae>) -> Self {
        BlockEncodedState { state }
    }

    pub fn state(&self) -> &[Ancillae] {
        &self.state
    }

    pub fn ancilla_dim(&self) -> usize {
        4
    }

    /// Amplitudes of the `|00⟩` branch, one per element.
    pub fn success_amplitudes(&self) -> Vec<Complex64> {
        self.state.iter().map(|v| v[0]).collect()
    }

    pub fn success_probability(&self) -> f64 {
        self.state.iter().map(|v| v[0].norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.state
            .iter()
            .flat_map(|v| v.iter())
            .map(|c| c.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// `|amp_x|² / P(00)`, the distribution of `x` given success.
    pub fn conditional_distribution(&self) -> Result<Vec<f64>> {
        let p = self.success_probability();
        if p <= 0.0 {
            return Err(Error::ZeroSuccess);
        }
        Ok(self.state.iter().map(|v| v[0].norm_sqr() / p).collect())
    }
}

/// `apply_to_uniform`: `S|Ψ⟩` for the given parity sequences.
pub fn apply_to_uniform(
    ensemble: &EigenphaseEnsemble,
    seq0: &RotationSequence,
    seq1: &RotationSequence,
) -> BlockEncodedState {
    StatePrep::new(ensemble, seq0, seq1).prepare()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AmplificationMethod {
    ExactRotation,
    ErfQsvt,
}

/// Parameters of the odd erf step `(erf(k(x-c)) + erf(k(x+c)))/2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ErfParams {
    pub sharpness: f64,
    pub center: f64,
    /// Degree of the odd polynomial approximation.
    pub degree: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AmplificationPlan {
    pub sigma: f64,
    pub iterations: usize,
    pub method: AmplificationMethod,
    pub erf: Option<ErfParams>,
}

fn check_sigma(sigma: f64) -> Result<f64> {
    if sigma == 0.0 {
        return Err(Error::ZeroSuccess);
    }
    if !(sigma > 0.0 && sigma <= 1.0 + 1e-12) {
        return Err(Error::param("sigma", format!("{sigma} is not in (0, 1]")));
    }
    Ok(sigma.min(1.0))
}

/// Generalized Grover iterations for a single singular value `σ`: each one
/// rotates by `2·arcsin σ`, so `k = round((π/2)/(2·arcsin σ) - 1/2)`.
pub fn plan_amplification(sigma: f64) -> Result<AmplificationPlan> {
    let sigma = check_sigma(sigma)?;
    let iterations = ((PI / 2.0) / (2.0 * sigma.asin()) - 0.5).round().max(0.0) as usize;
    Ok(AmplificationPlan {
        sigma,
        iterations,
        method: AmplificationMethod::ExactRotation,
        erf: None,
    })
}

/// `sin²((2k+1)·arcsin σ)`.
pub fn amplified_probability(sigma: f64, iterations: usize) -> f64 {
    ((2 * iterations + 1) as f64 * sigma.asin()).sin().powi(2)
}

/// Runs the planned iterations of `-S R_Ψ S† R_Π′` on `S|Ψ⟩`.
pub fn amplify(prep: &StatePrep, plan: &AmplificationPlan) -> BlockEncodedState {
    let mut state = prep.prepare().state;
    let psi = prep.initial_state();
    for _ in 0..plan.iterations {
        for v in state.iter_mut() {
            v[0] = -v[0];
        }
        prep.apply_adjoint(&mut state);
        let overlap: Complex64 = state
            .iter()
            .zip(&psi)
            .map(|(v, p)| p[0].conj() * v[0])
            .sum();
        for (v, p) in state.iter_mut().zip(&psi) {
            v[0] -= p[0] * overlap * 2.0;
        }
        prep.apply(&mut state);
        for v in state.iter_mut() {
            for c in v.iter_mut() {
                *c = -*c;
            }
        }
    }
    BlockEncodedState { state }
}

/// The odd step function `(erf(k(x-c)) + erf(k(x+c)))/2`.
pub fn erf_step(x: f64, sharpness: f64, center: f64) -> f64 {
    0.5 * (libm::erf(sharpness * (x - center)) + libm::erf(sharpness * (x + center)))
}

/// Chebyshev coefficients of `f` on `[-1, 1]` up to degree `degree`, from
/// interpolation at `nodes` Chebyshev points.
fn chebyshev_coeffs(f: impl Fn(f64) -> f64, degree: usize, nodes: usize) -> Vec<f64> {
    let samples: Vec<(f64, f64)> = (0..nodes)
        .map(|m| {
            let t = PI * (m as f64 + 0.5) / nodes as f64;
            (t, f(t.cos()))
        })
        .collect();
    (0..=degree)
        .map(|j| {
            let s: f64 = samples.iter().map(|(t, v)| v * (j as f64 * t).cos()).sum();
            let w = if j == 0 { 1.0 } else { 2.0 };
            w * s / nodes as f64
        })
        .collect()
}

/// Erf-based QSVT amplification: an odd real polynomial `P` close to the
/// erf step, synthesized as X-rotations. Its top-left entry at
/// `cos θ = σ` is the amplified amplitude.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ErfAmplifier {
    pub plan: AmplificationPlan,
    pub sequence: RotationSequence,
    pub angles: Vec<f64>,
    /// `|P(σ)|²` from the synthesized sequence.
    pub success_probability: f64,
}

/// Builds the erf amplifier for singular value `σ`, with sharpness `4/σ`,
/// centre `σ/2`, and the smallest odd degree approximating the step to
/// `tol` on `[-1, 1]`.
pub fn plan_erf_amplification(sigma: f64, tol: f64, eta: f64) -> Result<ErfAmplifier> {
    let sigma = check_sigma(sigma)?;
    let sharpness = 4.0 / sigma;
    let center = sigma / 2.0;
    let f = |x: f64| erf_step(x, sharpness, center);
    let nodes = 4 * MAX_SYNTHESIS_DEGREE;
    let coeffs = chebyshev_coeffs(f, MAX_SYNTHESIS_DEGREE, nodes);
    let check: Vec<f64> = (0..=2000).map(|i| -1.0 + i as f64 / 1000.0).collect();
    let eval = |deg: usize, x: f64| -> f64 {
        let t = x.clamp(-1.0, 1.0).acos();
        (1..=deg)
            .step_by(2)
            .map(|j| coeffs[j] * (j as f64 * t).cos())
            .sum()
    };
    let degree = (1..=MAX_SYNTHESIS_DEGREE)
        .step_by(2)
        .find(|&deg| check.iter().all(|&x| (eval(deg, x) - f(x)).abs() <= tol))
        .ok_or(Error::SynthesisDegree {
            degree: MAX_SYNTHESIS_DEGREE + 1,
            cap: MAX_SYNTHESIS_DEGREE,
        })?;
    // T_j(cos θ) = (w^j + w^-j)/2 at w = e^{iθ}.
    let d = degree as i64;
    let poly = LaurentPoly::from_fn(-d, d, |k| {
        let j = k.unsigned_abs() as usize;
        if j % 2 == 1 {
            Complex64::new(coeffs[j] / 2.0, 0.0)
        } else {
            ZERO
        }
    });
    let target = rescale_to_admissible(&poly, eta)?;
    let syn = synthesize(&target)?;
    let angles = syn.sequence.x_angles(1e-8)?;
    let amp = qet_apply(&syn.sequence, sigma.acos()).0[0][0];
    Ok(ErfAmplifier {
        plan: AmplificationPlan {
            sigma,
            iterations: 1,
            method: AmplificationMethod::ErfQsvt,
            erf: Some(ErfParams {
                sharpness,
                center,
                degree,
            }),
        },
        sequence: syn.sequence,
        angles,
        success_probability: amp.norm_sqr(),
    })
}

/// Query accounting for one trial of the amplified sampler.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct QueryCount {
    /// `U′` calls per application of `S` (summed sequence degrees).
    pub u_prime_per_application: usize,
    pub amplification_iterations: usize,
    /// `(2k+1)` applications of `S` or `S†`.
    pub applications: usize,
    /// Two oracle calls per `U′`.
    pub oracle_calls_per_trial: usize,
}

impl QueryCount {
    pub fn new(pair: &ParityPair, iterations: usize) -> Self {
        let u = pair.u_prime_calls();
        let applications = 2 * iterations + 1;
        QueryCount {
            u_prime_per_application: u,
            amplification_iterations: iterations,
            applications,
            oracle_calls_per_trial: applications * u * 2,
        }
    }
}

/// U′ calls of one sequence application.
pub fn sequence_u_prime_calls(seq: &RotationSequence) -> usize {
    seq.degree()
}
