//! Angle settings and binary outcome tables shared by both measurement models.

use core::f64::consts::PI;

use crate::error::{Error, Result};

/// Tolerance on the sum of an outcome table.
pub const TABLE_TOLERANCE: f64 = 1e-12;

/// Reduces an angle to `(-π, π]`.
pub fn wrap_angle(a: f64) -> f64 {
    let two_pi = 2.0 * PI;
    let mut r = a - two_pi * libm::floor(a / two_pi);
    if r > PI {
        r -= two_pi;
    }
    r
}

/// One angle per mode in (signal, idler, pump) order. For discrete phase
/// measurement these are the reference phases θ₀,ᵢ; for homodyne they are the
/// local-oscillator phases θᵢ.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AngleAssignment {
    pub theta: [f64; 3],
}

impl AngleAssignment {
    pub fn new(theta: [f64; 3]) -> Self {
        AngleAssignment { theta }
    }

    /// Puts the whole phase on the signal mode.
    pub fn from_psi0(psi0: f64) -> Self {
        AngleAssignment {
            theta: [psi0, 0.0, 0.0],
        }
    }

    /// `θ₁ + θ₂ − θ₃` wrapped to `(-π, π]`.
    pub fn psi0(&self) -> f64 {
        wrap_angle(self.theta[0] + self.theta[1] - self.theta[2])
    }

    pub fn shifted(&self, offsets: [f64; 3]) -> Self {
        AngleAssignment {
            theta: [
                self.theta[0] + offsets[0],
                self.theta[1] + offsets[1],
                self.theta[2] + offsets[2],
            ],
        }
    }

    /// Exchanges the signal and idler angles.
    pub fn swap_signal_idler(&self) -> Self {
        AngleAssignment {
            theta: [self.theta[1], self.theta[0], self.theta[2]],
        }
    }
}

/// Binary outcome of one mode: `One` is read as spin +1, `Zero` as −1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Outcome {
    Zero,
    One,
}

impl Outcome {
    pub fn spin(self) -> i32 {
        match self {
            Outcome::Zero => -1,
            Outcome::One => 1,
        }
    }

    pub fn bit(self) -> usize {
        match self {
            Outcome::Zero => 0,
            Outcome::One => 1,
        }
    }

    pub fn from_bit(b: usize) -> Self {
        if b == 0 {
            Outcome::Zero
        } else {
            Outcome::One
        }
    }
}

/// Joint probabilities `P[μ₁μ₂μ₃]`, stored at index `4μ₁ + 2μ₂ + μ₃`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OutcomeTable {
    probs: [f64; 8],
}

impl OutcomeTable {
    pub fn new(probs: [f64; 8]) -> Result<Self> {
        let t = OutcomeTable { probs };
        t.validate()?;
        Ok(t)
    }

    /// Builds a table without range checks; callers validate later.
    pub(crate) fn from_raw(probs: [f64; 8]) -> Self {
        OutcomeTable { probs }
    }

    pub fn index(mu: [usize; 3]) -> usize {
        4 * mu[0] + 2 * mu[1] + mu[2]
    }

    pub fn bits(index: usize) -> [usize; 3] {
        [(index >> 2) & 1, (index >> 1) & 1, index & 1]
    }

    /// Product of the three spins for the outcome at `index`.
    pub fn spin_product(index: usize) -> f64 {
        let b = Self::bits(index);
        let ones = b.iter().sum::<usize>();
        if (3 - ones) % 2 == 0 {
            1.0
        } else {
            -1.0
        }
    }

    pub fn get(&self, mu: [usize; 3]) -> f64 {
        self.probs[Self::index(mu)]
    }

    pub fn probs(&self) -> &[f64; 8] {
        &self.probs
    }

    pub fn total(&self) -> f64 {
        self.probs.iter().sum()
    }

    pub fn validate(&self) -> Result<()> {
        let slack = TABLE_TOLERANCE;
        if self
            .probs
            .iter()
            .any(|p| !p.is_finite() || *p < -slack || *p > 1.0 + slack)
        {
            return Err(Error::InvalidParameter("outcome probability outside [0, 1]"));
        }
        if (self.total() - 1.0).abs() > slack {
            return Err(Error::NotNormalized {
                norm_sqr: self.total(),
            });
        }
        Ok(())
    }

    /// Probability that `mode` reads `outcome`.
    pub fn marginal(&self, mode: usize, outcome: Outcome) -> f64 {
        self.probs
            .iter()
            .enumerate()
            .filter(|(i, _)| Self::bits(*i)[mode] == outcome.bit())
            .map(|(_, p)| p)
            .sum()
    }

    /// `P₁ − P₀` for a single mode.
    pub fn spin(&self, mode: usize) -> f64 {
        self.marginal(mode, Outcome::One) - self.marginal(mode, Outcome::Zero)
    }

    /// Expectation of the product of the three ±1 outcomes.
    pub fn correlation(&self) -> f64 {
        self.probs
            .iter()
            .enumerate()
            .map(|(i, p)| Self::spin_product(i) * p)
            .sum()
    }

    pub fn max_abs_diff(&self, other: &OutcomeTable) -> f64 {
        self.probs
            .iter()
            .zip(&other.probs)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}
