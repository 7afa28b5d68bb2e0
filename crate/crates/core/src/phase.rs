//! Pegg–Barnett discrete phase measurement of the triplet.
//!
//! For truncation `s + 1` the phase states are
//! `|θ_μ⟩ = (s+1)^{-1/2} Σₙ e^{i n θ_μ} |n⟩` with `θ_μ = θ₀ + 2πμ/(s+1)`.
//! With `s = 1` each mode gives a binary result directly; for larger `s`
//! the `s + 1` outcomes are binned into two sets.

use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fock::{StateVector, TripletState};
use crate::measurement::{AngleAssignment, Outcome, OutcomeTable};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseConfig {
    s: usize,
    theta0: f64,
}

impl PhaseConfig {
    pub fn new(s: usize, theta0: f64) -> Result<Self> {
        if s == 0 {
            return Err(Error::InvalidParameter("s must be at least 1"));
        }
        if !theta0.is_finite() {
            return Err(Error::InvalidParameter("reference phase must be finite"));
        }
        Ok(PhaseConfig { s, theta0 })
    }

    pub fn binary(theta0: f64) -> Result<Self> {
        Self::new(1, theta0)
    }

    pub fn s(&self) -> usize {
        self.s
    }

    pub fn theta0(&self) -> f64 {
        self.theta0
    }

    pub fn dim(&self) -> usize {
        self.s + 1
    }

    pub fn phase_value(&self, mu: usize) -> f64 {
        self.theta0 + 2.0 * PI * mu as f64 / (self.s + 1) as f64
    }

    /// The phase state `|θ_μ⟩` on a single mode of dimension `s + 1`.
    pub fn phase_state(&self, mu: usize) -> Result<StateVector> {
        if mu > self.s {
            return Err(Error::PhaseIndexOutOfRange { mu, s: self.s });
        }
        let theta = self.phase_value(mu);
        let norm = 1.0 / libm::sqrt(self.dim() as f64);
        let amps = (0..self.dim())
            .map(|n| Complex64::from_polar(norm, n as f64 * theta))
            .collect();
        StateVector::from_amplitudes(&[self.dim()], amps)
    }
}

pub fn phase_state(cfg: &PhaseConfig, mu: usize) -> Result<StateVector> {
    cfg.phase_state(mu)
}

/// Assignment of each phase index `μ ∈ {0..s}` to a binary outcome.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Binning {
    map: Vec<Outcome>,
}

impl Binning {
    /// `map[μ]` must be 0 or 1 and both bins must be used.
    pub fn new(map: &[usize]) -> Result<Self> {
        if map.len() < 2 {
            return Err(Error::InvalidBinning("needs at least two phase states"));
        }
        if map.iter().any(|&b| b > 1) {
            return Err(Error::InvalidBinning("bins are labelled 0 and 1"));
        }
        if !map.contains(&0) || !map.contains(&1) {
            return Err(Error::InvalidBinning("both bins must be non-empty"));
        }
        Ok(Binning {
            map: map.iter().map(|&b| Outcome::from_bit(b)).collect(),
        })
    }

    /// `μ ↦ μ` for `s = 1`.
    pub fn identity() -> Self {
        Binning {
            map: alloc::vec![Outcome::Zero, Outcome::One],
        }
    }

    /// Lower half of the phase indices to "0", upper half to "1". Needs odd `s`.
    pub fn contiguous_halves(s: usize) -> Result<Self> {
        if s == 0 || s % 2 == 0 {
            return Err(Error::InvalidBinning("contiguous halves need odd s"));
        }
        let half = (s + 1) / 2;
        let map: Vec<usize> = (0..=s).map(|mu| usize::from(mu >= half)).collect();
        Self::new(&map)
    }

    pub fn s(&self) -> usize {
        self.map.len() - 1
    }

    pub fn outcome(&self, mu: usize) -> Outcome {
        self.map[mu]
    }
}

/// Joint table from the closed form
/// `P = 1/8 + (1/4)|c₀c₁| cos[(μ₁+μ₂−μ₃)π + ψ₀ − arg(c₁/c₀)]`.
pub fn joint_phase_table(t: &TripletState, angles: &AngleAssignment) -> OutcomeTable {
    let k = 0.25 * t.coherence();
    let arg = angles.psi0() - t.relative_phase();
    let mut probs = [0.0; 8];
    for (i, p) in probs.iter_mut().enumerate() {
        let [m1, m2, m3] = OutcomeTable::bits(i);
        let shift = (m1 as f64 + m2 as f64 - m3 as f64) * PI;
        *p = 0.125 + k * libm::cos(shift + arg);
    }
    OutcomeTable::from_raw(probs)
}

/// Joint `s = 1` table by explicit projection `|⟨Ψ|θ_{μ₁}θ_{μ₂}θ_{μ₃}⟩|²`.
pub fn projected_phase_table(t: &TripletState, angles: &AngleAssignment) -> Result<OutcomeTable> {
    let cfgs = [
        PhaseConfig::binary(angles.theta[0])?,
        PhaseConfig::binary(angles.theta[1])?,
        PhaseConfig::binary(angles.theta[2])?,
    ];
    let id = Binning::identity();
    binned_phase_table(t, &cfgs, [&id, &id, &id])
}

/// Projects the triplet onto every phase-state triple and sums the bins.
pub fn binned_phase_table(
    t: &TripletState,
    cfgs: &[PhaseConfig; 3],
    binnings: [&Binning; 3],
) -> Result<OutcomeTable> {
    for (cfg, b) in cfgs.iter().zip(binnings) {
        if b.s() != cfg.s() {
            return Err(Error::InvalidBinning("binning does not cover {0..s}"));
        }
    }
    let dims = [cfgs[0].dim(), cfgs[1].dim(), cfgs[2].dim()];
    let psi = t.embed_in(&dims)?;
    let states: Vec<Vec<StateVector>> = cfgs
        .iter()
        .map(|c| (0..c.dim()).map(|mu| c.phase_state(mu)).collect())
        .collect::<Result<_>>()?;

    let mut probs = [0.0; 8];
    for (m1, a) in states[0].iter().enumerate() {
        for (m2, b) in states[1].iter().enumerate() {
            let ab = a.tensor(b);
            for (m3, c) in states[2].iter().enumerate() {
                let amp = psi.inner(&ab.tensor(c))?;
                let idx = OutcomeTable::index([
                    binnings[0].outcome(m1).bit(),
                    binnings[1].outcome(m2).bit(),
                    binnings[2].outcome(m3).bit(),
                ]);
                probs[idx] += amp.norm_sqr();
            }
        }
    }
    OutcomeTable::new(probs)
}

/// `s`-state phase measurement on every mode with the same binning.
pub fn uniform_binned_table(
    t: &TripletState,
    angles: &AngleAssignment,
    s: usize,
    binning: &Binning,
) -> Result<OutcomeTable> {
    let cfgs = [
        PhaseConfig::new(s, angles.theta[0])?,
        PhaseConfig::new(s, angles.theta[1])?,
        PhaseConfig::new(s, angles.theta[2])?,
    ];
    binned_phase_table(t, &cfgs, [binning, binning, binning])
}

/// `P₁ − P₀` for one mode of the binary phase measurement.
pub fn spin(t: &TripletState, angles: &AngleAssignment, mode: usize) -> Result<f64> {
    if mode >= 3 {
        return Err(Error::ModeOutOfRange { mode, modes: 3 });
    }
    Ok(joint_phase_table(t, angles).spin(mode))
}

/// Expectation of the product of the three binary spins, `−2|c₀c₁|cos(ψ₀ − arg(c₁/c₀))`.
pub fn triple_spin_product(t: &TripletState, angles: &AngleAssignment) -> f64 {
    joint_phase_table(t, angles).correlation()
}
