//! Nondegenerate parametric oscillation with a single pump photon.
//!
//! `H = iχ (c† a b − c a† b†)` with ħ = 1 on the truncated
//! (signal, idler, pump) space. Starting from `|0,0,1⟩` the evolution stays in
//! `span{|0,0,1⟩, |1,1,0⟩}` with `c₀ = cos χt`, `c₁ = −sin χt`.

use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fock::{flat_index, unflatten, Ladder, StateVector, TripletState, IDLER, PUMP, SIGNAL};

/// Evolved states must keep unit norm to this tolerance.
pub const NORM_DRIFT_TOLERANCE: f64 = 1e-10;

/// Weight outside the triplet span above which a projection is flagged.
pub const LEAKAGE_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OscillatorParams {
    pub chi: f64,
    pub t: f64,
    pub dims: [usize; 3],
}

impl OscillatorParams {
    /// `χ = 1`, so `t` is the dimensionless `χt`.
    pub fn at(chi_t: f64) -> Self {
        OscillatorParams {
            chi: 1.0,
            t: chi_t,
            dims: [2, 2, 2],
        }
    }

    pub fn new(chi: f64, t: f64, dims: [usize; 3]) -> Result<Self> {
        let p = OscillatorParams { chi, t, dims };
        p.validate()?;
        Ok(p)
    }

    pub fn with_dims(mut self, dims: [usize; 3]) -> Self {
        self.dims = dims;
        self
    }

    pub fn chi_t(&self) -> f64 {
        self.chi * self.t
    }

    fn validate(&self) -> Result<()> {
        if !self.chi_t().is_finite() {
            return Err(Error::InvalidParameter("chi * t must be finite"));
        }
        if self.dims.iter().any(|&d| d < 2) {
            return Err(Error::TruncationTooSmall { min: 2 });
        }
        Ok(())
    }
}

/// Interaction Hamiltonian on the truncated space, row-major basis order.
pub fn build_hamiltonian(chi: f64, dims: [usize; 3]) -> Result<DMatrix<Complex64>> {
    if dims.iter().any(|&d| d < 2) {
        return Err(Error::TruncationTooSmall { min: 2 });
    }
    let n: usize = dims.iter().product();
    // A = c† a b, truncated to the retained levels.
    let mut a = DMatrix::<Complex64>::zeros(n, n);
    for col in 0..n {
        let occ = unflatten(&dims, col);
        let steps = [
            (SIGNAL, Ladder::Lower),
            (IDLER, Ladder::Lower),
            (PUMP, Ladder::Raise),
        ];
        let mut target = occ.clone();
        let mut amp = 1.0;
        let mut alive = true;
        for (mode, op) in steps {
            match op.act(target[mode]) {
                Some((m, k)) if m < dims[mode] => {
                    target[mode] = m;
                    amp *= k;
                }
                _ => {
                    alive = false;
                    break;
                }
            }
        }
        if alive {
            let row = flat_index(&dims, &target)?;
            a[(row, col)] = Complex64::new(amp, 0.0);
        }
    }
    let i_chi = Complex64::new(0.0, chi);
    Ok((&a - a.adjoint()) * i_chi)
}

/// `e^{-iHt}` through the eigendecomposition of the Hermitian `H`.
#[derive(Debug, Clone)]
pub struct Propagator {
    dims: [usize; 3],
    eigenvalues: DVector<f64>,
    eigenvectors: DMatrix<Complex64>,
}

impl Propagator {
    pub fn new(chi: f64, dims: [usize; 3]) -> Result<Self> {
        let h = build_hamiltonian(chi, dims)?;
        let eig = h.symmetric_eigen();
        Ok(Propagator {
            dims,
            eigenvalues: eig.eigenvalues,
            eigenvectors: eig.eigenvectors,
        })
    }

    pub fn unitary(&self, t: f64) -> DMatrix<Complex64> {
        let phases = self
            .eigenvalues
            .map(|l| Complex64::from_polar(1.0, -l * t));
        &self.eigenvectors * DMatrix::from_diagonal(&phases) * self.eigenvectors.adjoint()
    }

    pub fn evolve(&self, initial: &StateVector, t: f64) -> Result<StateVector> {
        if initial.dims() != self.dims {
            return Err(Error::DimensionMismatch {
                left: self.dims.iter().product(),
                right: initial.len(),
            });
        }
        if !initial.is_normalized() {
            return Err(Error::NotNormalized {
                norm_sqr: initial.norm_sqr(),
            });
        }
        let psi = DVector::from_column_slice(initial.amplitudes());
        let out = self.unitary(t) * psi;
        let state = StateVector::from_amplitudes(&self.dims, out.iter().copied().collect())?;
        let drift = (state.norm() - 1.0).abs();
        if drift > NORM_DRIFT_TOLERANCE {
            return Err(Error::Accuracy {
                estimate: drift,
                tolerance: NORM_DRIFT_TOLERANCE,
            });
        }
        Ok(state)
    }
}

/// `e^{-iHt}|initial⟩`.
pub fn evolve(initial: &StateVector, p: &OscillatorParams) -> Result<StateVector> {
    p.validate()?;
    Propagator::new(p.chi, p.dims)?.evolve(initial, p.t)
}

/// The pump photon `|0,0,1⟩` on the given truncation.
pub fn pump_photon(dims: [usize; 3]) -> Result<StateVector> {
    StateVector::basis(&dims, &[0, 0, 1])
}

/// Evolves `|0,0,1⟩` for `χt` and projects onto the triplet span.
pub fn generate_triplet(p: &OscillatorParams) -> Result<TripletProjection> {
    extract_triplet(&evolve(&pump_photon(p.dims)?, p)?)
}

/// Projection of a state onto `span{|0,0,1⟩, |1,1,0⟩}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TripletProjection {
    pub c0: Complex64,
    pub c1: Complex64,
    /// Norm of the part outside the span.
    pub residual: f64,
}

impl TripletProjection {
    pub fn leaked(&self) -> bool {
        self.residual > LEAKAGE_TOLERANCE
    }

    /// The in-span part, renormalized.
    pub fn triplet(&self) -> Result<TripletState> {
        let n = libm::sqrt(self.c0.norm_sqr() + self.c1.norm_sqr());
        if n == 0.0 {
            return Err(Error::ZeroVector);
        }
        TripletState::new(self.c0 / n, self.c1 / n)
    }
}

pub fn extract_triplet(s: &StateVector) -> Result<TripletProjection> {
    if s.modes() != 3 || s.dims().iter().any(|&d| d < 2) {
        return Err(Error::InvalidParameter("expected a 3-mode state with dims >= 2"));
    }
    let i0 = s.index_of(&[0, 0, 1])?;
    let i1 = s.index_of(&[1, 1, 0])?;
    let amps = s.amplitudes();
    let residual = libm::sqrt(
        amps.iter()
            .enumerate()
            .filter(|(i, _)| *i != i0 && *i != i1)
            .map(|(_, a)| a.norm_sqr())
            .sum::<f64>(),
    );
    Ok(TripletProjection {
        c0: amps[i0],
        c1: amps[i1],
        residual,
    })
}

/// `|⟨a|b⟩|`, which ignores global phase.
pub fn overlap_magnitude(a: &StateVector, b: &StateVector) -> Result<f64> {
    Ok(a.inner(b)?.norm())
}

/// Amplitudes of `e^{-iHt}|0,0,1⟩` over a time grid, sharing one eigendecomposition.
pub fn pump_trajectory(chi: f64, dims: [usize; 3], times: &[f64]) -> Result<Vec<StateVector>> {
    let prop = Propagator::new(chi, dims)?;
    let init = pump_photon(dims)?;
    times.iter().map(|&t| prop.evolve(&init, t)).collect()
}
