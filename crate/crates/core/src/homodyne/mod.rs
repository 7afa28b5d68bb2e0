//! Homodyne (quadrature) measurement of the triplet with sign binning.
//!
//! Convention: `X(θ) = a e^{-iθ} + a† e^{iθ}`, so the vacuum quadrature
//! variance is 1 and `ψ₀(x) = (2π)^{-1/4} e^{-x²/4}`. Quadrature eigenstates
//! carry `⟨x|_θ n⟩ = e^{-inθ} ψₙ(x)`.
//!
//! The one-photon wavefunction is taken as `ψ₁(x) = −x ψ₀(x)`. With this
//! phase for `|1⟩` a positive quadrature ("1") corresponds to the phase
//! `θ + π`, the same label the binary phase measurement gives to `μ = 1`,
//! so both measurement models share one sign convention for every
//! correlation. Sign-binned probabilities are independent of the
//! quadrature scale, so the variance convention does not affect them.

mod efficiency;
mod sampling;

pub use efficiency::{
    efficiency_threshold, f_at_efficiency, smeared_octants, EfficiencyModel, LossModel, Threshold,
    THRESHOLD_TOLERANCE,
};
pub use sampling::{
    estimate_f, sample_shots, MonteCarloF, ShotRecord, ShotSampler, ShotSummary, BLOCK_LEN,
};

use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fock::TripletState;
use crate::measurement::{AngleAssignment, Outcome, OutcomeTable};
use crate::quadrature::GaussLegendre;

/// Fixed quadrature convention `X(θ) = a e^{-iθ} + a† e^{iθ}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct QuadratureConvention;

impl QuadratureConvention {
    pub const VACUUM_VARIANCE: f64 = 1.0;
    /// Half-width of the integration box, in vacuum standard deviations.
    pub const CUTOFF: f64 = 8.0;
}

/// Sign of `ψ₁(x)/x`; see the module docs.
pub const ONE_PHOTON_SIGN: f64 = -1.0;

/// `(2/π)^{3/2}`: how much sign binning shrinks the triple correlation.
pub fn sign_binning_factor() -> f64 {
    libm::pow(2.0 / PI, 1.5)
}

/// Vacuum wavefunction.
pub fn psi0(x: f64) -> f64 {
    libm::pow(2.0 * PI, -0.25) * libm::exp(-x * x / 4.0)
}

/// One-photon wavefunction.
pub fn psi1(x: f64) -> f64 {
    ONE_PHOTON_SIGN * x * psi0(x)
}

/// `⟨x|_θ n⟩` for `n ∈ {0, 1}`.
pub fn quadrature_wavefunction(n: usize, theta: f64, x: f64) -> Result<Complex64> {
    let (re, phase) = match n {
        0 => (psi0(x), 0.0),
        1 => (psi1(x), -theta),
        _ => return Err(Error::UnsupportedFockLevel { n }),
    };
    Ok(Complex64::from_polar(1.0, phase) * re)
}

/// `⟨x₁ x₂ x₃|Ψ⟩` at local-oscillator phases `angles`.
pub fn joint_amplitude(t: &TripletState, angles: &AngleAssignment, x: [f64; 3]) -> Complex64 {
    let w = |mode: usize, n: usize| {
        quadrature_wavefunction(n, angles.theta[mode], x[mode]).expect("levels 0 and 1")
    };
    t.c0() * w(0, 0) * w(1, 0) * w(2, 1) + t.c1() * w(0, 1) * w(1, 1) * w(2, 0)
}

/// Joint quadrature density `|⟨x₁ x₂ x₃|Ψ⟩|²`.
pub fn joint_density(t: &TripletState, angles: &AngleAssignment, x: [f64; 3]) -> f64 {
    joint_amplitude(t, angles, x).norm_sqr()
}

/// Binary label of a quadrature outcome; `x = 0` reads "0".
pub fn classify(x: f64) -> Outcome {
    if x > 0.0 {
        Outcome::One
    } else {
        Outcome::Zero
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocalOscillator {
    epsilon: f64,
    theta: f64,
}

impl LocalOscillator {
    pub fn new(epsilon: f64, theta: f64) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon.is_finite()) {
            return Err(Error::InvalidParameter("oscillator amplitude must be positive"));
        }
        Ok(LocalOscillator { epsilon, theta })
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    /// Difference photocurrent `ε·x` in the strong-oscillator limit.
    pub fn photocurrent(&self, x: f64) -> f64 {
        self.epsilon * x
    }
}

pub fn photocurrent(lo: &LocalOscillator, x: f64) -> f64 {
    lo.photocurrent(x)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum QuadratureMethod {
    #[default]
    ClosedForm,
    /// Numerical integration of the joint density.
    Quadrature,
}

/// Target accuracy of the numerical octant integrals.
pub const QUADRATURE_TOLERANCE: f64 = 1e-11;

/// Sign-octant probabilities, indexed like any [`OutcomeTable`].
pub fn octant_probabilities(
    t: &TripletState,
    angles: &AngleAssignment,
    method: QuadratureMethod,
) -> Result<OutcomeTable> {
    match method {
        QuadratureMethod::ClosedForm => Ok(closed_form_octants(t, angles, 1.0)),
        QuadratureMethod::Quadrature => tensor_octants(t, angles),
    }
}

/// `1/8 + (1/4)(2/π)^{3/2} g |c₀c₁| cos[(μ₁+μ₂−μ₃)π + ψ₀ − arg(c₁/c₀)]`,
/// with `g` the loss factor on the interference term.
pub(crate) fn closed_form_octants(
    t: &TripletState,
    angles: &AngleAssignment,
    cross_scale: f64,
) -> OutcomeTable {
    let k = 0.25 * sign_binning_factor() * t.coherence() * cross_scale;
    let arg = angles.psi0() - t.relative_phase();
    let mut probs = [0.0; 8];
    for (i, p) in probs.iter_mut().enumerate() {
        let [m1, m2, m3] = OutcomeTable::bits(i);
        let shift = (m1 as f64 + m2 as f64 - m3 as f64) * PI;
        *p = 0.125 + k * libm::cos(shift + arg);
    }
    OutcomeTable::from_raw(probs)
}

/// Expectation of the product of the three sign outcomes,
/// `−2|c₀c₁|(2/π)^{3/2} cos(ψ₀ − arg(c₁/c₀))`.
pub fn homodyne_triple_product(t: &TripletState, angles: &AngleAssignment) -> f64 {
    closed_form_octants(t, angles, 1.0).correlation()
}

const RULE_ORDER: usize = 10;
const MAX_HALF_PANELS: usize = 32;

/// Integrates the joint density over each octant of `[-L, L]³` on a tensor
/// Gauss–Legendre grid, doubling panels until successive tables agree.
fn tensor_octants(t: &TripletState, angles: &AngleAssignment) -> Result<OutcomeTable> {
    let rule = GaussLegendre::new(RULE_ORDER);
    let mut panels = 4;
    let mut prev = tensor_octants_at(t, angles, &rule, panels);
    loop {
        panels *= 2;
        let next = tensor_octants_at(t, angles, &rule, panels);
        let err = next.max_abs_diff(&prev);
        if err <= QUADRATURE_TOLERANCE {
            next.validate()?;
            return Ok(next);
        }
        if panels >= MAX_HALF_PANELS {
            return Err(Error::Accuracy {
                estimate: err,
                tolerance: QUADRATURE_TOLERANCE,
            });
        }
        prev = next;
    }
}

fn tensor_octants_at(
    t: &TripletState,
    angles: &AngleAssignment,
    rule: &GaussLegendre,
    half_panels: usize,
) -> OutcomeTable {
    let l = QuadratureConvention::CUTOFF;
    let (pos, w) = rule.composite(0.0, l, half_panels);
    // Node k < m lies on the negative half-line, node m + k on the positive one.
    let m = pos.len();
    let xs: Vec<f64> = pos.iter().map(|x| -x).chain(pos.iter().copied()).collect();
    let ws: Vec<f64> = w.iter().chain(w.iter()).copied().collect();
    let side = |k: usize| usize::from(k >= m);

    let table = |mode: usize| -> Vec<[Complex64; 2]> {
        xs.iter()
            .map(|&x| {
                [0, 1].map(|n| {
                    quadrature_wavefunction(n, angles.theta[mode], x).expect("levels 0 and 1")
                })
            })
            .collect()
    };
    let (a1, a2, a3) = (table(0), table(1), table(2));
    let (c0, c1) = (t.c0(), t.c1());

    let mut probs = [0.0; 8];
    for (i, wi) in ws.iter().enumerate() {
        for (j, wj) in ws.iter().enumerate() {
            let u0 = c0 * a1[i][0] * a2[j][0];
            let u1 = c1 * a1[i][1] * a2[j][1];
            let mut acc = [0.0; 2];
            for (k, wk) in ws.iter().enumerate() {
                let amp = u0 * a3[k][1] + u1 * a3[k][0];
                acc[side(k)] += wk * amp.norm_sqr();
            }
            let wij = wi * wj;
            for (mu3, v) in acc.iter().enumerate() {
                probs[OutcomeTable::index([side(i), side(j), mu3])] += wij * v;
            }
        }
    }
    OutcomeTable::from_raw(probs)
}
