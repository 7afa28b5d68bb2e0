//! Finite detection efficiency and the efficiency needed for a violation.

use libm::{erfc, sqrt};
use num_complex::Complex64;

use super::{closed_form_octants, psi0, psi1, QuadratureConvention, QuadratureMethod};
use crate::error::{Error, Result};
use crate::fock::TripletState;
use crate::ghz::{evaluate_f, Arrangement, GhzResult};
use crate::measurement::{AngleAssignment, OutcomeTable};
use crate::quadrature::GaussLegendre;

/// How a detector with efficiency `η < 1` degrades a quadrature outcome.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LossModel {
    /// Beamsplitter loss: `x ↦ √η x + √(1−η) v` with `v` vacuum noise.
    #[default]
    Beamsplitter,
    /// With probability `1 − η` the detector misses and the recorded value is
    /// pure vacuum noise, so the sign is a fair coin.
    DetectorFailure,
}

impl LossModel {
    pub fn name(self) -> &'static str {
        match self {
            LossModel::Beamsplitter => "beamsplitter",
            LossModel::DetectorFailure => "detector-failure",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EfficiencyModel {
    eta: f64,
    loss: LossModel,
}

impl EfficiencyModel {
    pub fn new(eta: f64, loss: LossModel) -> Result<Self> {
        if !(eta > 0.0 && eta <= 1.0) {
            return Err(Error::InvalidEfficiency { eta });
        }
        Ok(EfficiencyModel { eta, loss })
    }

    pub fn ideal() -> Self {
        EfficiencyModel {
            eta: 1.0,
            loss: LossModel::Beamsplitter,
        }
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    pub fn loss(&self) -> LossModel {
        self.loss
    }

    pub fn is_ideal(&self) -> bool {
        self.eta == 1.0
    }

    /// Probability of reading "1" given the lossless quadrature `x`.
    pub fn one_probability(&self, x: f64) -> f64 {
        let step = if x > 0.0 { 1.0 } else { 0.0 };
        if self.is_ideal() {
            return step;
        }
        match self.loss {
            LossModel::Beamsplitter => {
                let z = sqrt(self.eta) * x / sqrt(2.0 * (1.0 - self.eta));
                0.5 * erfc(-z)
            }
            LossModel::DetectorFailure => self.eta * step + 0.5 * (1.0 - self.eta),
        }
    }

    /// Factor on the three-mode interference term. Each mode contributes
    /// `√η` for beamsplitter loss and `η` for detector failure.
    pub fn cross_term_scale(&self) -> f64 {
        match self.loss {
            LossModel::Beamsplitter => libm::pow(self.eta, 1.5),
            LossModel::DetectorFailure => self.eta * self.eta * self.eta,
        }
    }
}

/// Sign-octant probabilities of the degraded outcomes.
///
/// The quadrature path integrates the joint density against each mode's
/// response `P(outcome | x)`. The density is a sum of products of
/// single-mode factors `ψₙψₙ'`, so the triple integral splits into
/// one-dimensional integrals that are done adaptively on each half-line.
pub fn smeared_octants(
    t: &TripletState,
    angles: &AngleAssignment,
    model: &EfficiencyModel,
    method: QuadratureMethod,
) -> Result<OutcomeTable> {
    match method {
        QuadratureMethod::ClosedForm => Ok(closed_form_octants(t, angles, model.cross_term_scale())),
        QuadratureMethod::Quadrature => separable_octants(t, angles, model),
    }
}

const SMEARED_TOLERANCE: f64 = 1e-13;

/// `m[n][n'][μ] = ∫ ψₙ(x) ψₙ'(x) P(μ | x) dx`.
fn response_moments(model: &EfficiencyModel) -> Result<[[[f64; 2]; 2]; 2]> {
    let rule = GaussLegendre::new(12);
    let l = QuadratureConvention::CUTOFF;
    let wf = |n: usize, x: f64| if n == 0 { psi0(x) } else { psi1(x) };
    let mut m = [[[0.0; 2]; 2]; 2];
    for (n, row) in m.iter_mut().enumerate() {
        for (k, cell) in row.iter_mut().enumerate() {
            let one = |x: f64| wf(n, x) * wf(k, x) * model.one_probability(x);
            let all = |x: f64| wf(n, x) * wf(k, x);
            let p1 = rule.integrate_adaptive(one, -l, 0.0, SMEARED_TOLERANCE)?.value
                + rule.integrate_adaptive(one, 0.0, l, SMEARED_TOLERANCE)?.value;
            let total = rule.integrate_adaptive(all, -l, 0.0, SMEARED_TOLERANCE)?.value
                + rule.integrate_adaptive(all, 0.0, l, SMEARED_TOLERANCE)?.value;
            *cell = [total - p1, p1];
        }
    }
    Ok(m)
}

fn separable_octants(
    t: &TripletState,
    angles: &AngleAssignment,
    model: &EfficiencyModel,
) -> Result<OutcomeTable> {
    let m = response_moments(model)?;
    let kets: [([usize; 3], Complex64); 2] = [([0, 0, 1], t.c0()), ([1, 1, 0], t.c1())];
    let mut probs = [0.0; 8];
    for (i, p) in probs.iter_mut().enumerate() {
        let mu = OutcomeTable::bits(i);
        let mut acc = Complex64::new(0.0, 0.0);
        for (nb, cb) in &kets {
            for (nk, ck) in &kets {
                let mut term = cb * ck.conj();
                for mode in 0..3 {
                    let dn = nb[mode] as f64 - nk[mode] as f64;
                    term *= Complex64::from_polar(1.0, -dn * angles.theta[mode])
                        * m[nb[mode]][nk[mode]][mu[mode]];
                }
                acc += term;
            }
        }
        *p = acc.re;
    }
    let table = OutcomeTable::from_raw(probs);
    table.validate()?;
    Ok(table)
}

/// `F` for an arrangement with every mode read through `model`.
pub fn f_at_efficiency(
    t: &TripletState,
    arrangement: &Arrangement,
    model: &EfficiencyModel,
    method: QuadratureMethod,
) -> Result<GhzResult> {
    evaluate_f(arrangement, |a| {
        Ok(smeared_octants(t, a, model, method)?.correlation())
    })
}

/// Bisection stops once the bracket is narrower than this.
pub const THRESHOLD_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Threshold {
    /// Smallest efficiency with `F > 2`.
    Found {
        eta_star: f64,
        ideal_f: f64,
        iterations: u32,
    },
    /// The lossless measurement already satisfies `F ≤ 2`.
    NoViolation { ideal_f: f64 },
}

impl Threshold {
    pub fn eta_star(&self) -> Option<f64> {
        match self {
            Threshold::Found { eta_star, .. } => Some(*eta_star),
            Threshold::NoViolation { .. } => None,
        }
    }

    pub fn ideal_f(&self) -> f64 {
        match self {
            Threshold::Found { ideal_f, .. } | Threshold::NoViolation { ideal_f } => *ideal_f,
        }
    }
}

/// Solves `F(η) = 2` by bisection on `(0, 1]`.
pub fn efficiency_threshold(
    t: &TripletState,
    arrangement: &Arrangement,
    loss: LossModel,
    method: QuadratureMethod,
) -> Result<Threshold> {
    let f = |eta: f64| -> Result<f64> {
        let model = EfficiencyModel::new(eta, loss)?;
        Ok(f_at_efficiency(t, arrangement, &model, method)?.f)
    };
    let ideal_f = f(1.0)?;
    if ideal_f <= 2.0 {
        return Ok(Threshold::NoViolation { ideal_f });
    }
    // F vanishes as η → 0, so the root is bracketed by (0, 1].
    let (mut lo, mut hi) = (0.0, 1.0);
    let mut iterations = 0;
    while hi - lo > THRESHOLD_TOLERANCE {
        let mid = 0.5 * (lo + hi);
        if f(mid)? > 2.0 {
            hi = mid;
        } else {
            lo = mid;
        }
        iterations += 1;
    }
    Ok(Threshold::Found {
        eta_star: 0.5 * (lo + hi),
        ideal_f,
        iterations,
    })
}
