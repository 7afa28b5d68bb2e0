//! Truncated multimode Fock space.
//!
//! Basis kets are indexed row-major with mode order (signal, idler, pump),
//! so for dims `(d0, d1, d2)` the ket `|n0, n1, n2⟩` sits at
//! `(n0 * d1 + n1) * d2 + n2`.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Tolerance used when checking that amplitudes are normalized.
pub const NORM_TOLERANCE: f64 = 1e-12;

pub const SIGNAL: usize = 0;
pub const IDLER: usize = 1;
pub const PUMP: usize = 2;

/// Occupation numbers, one per mode.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FockIndex(pub Vec<usize>);

impl FockIndex {
    pub fn occupations(&self) -> &[usize] {
        &self.0
    }
}

impl From<&[usize]> for FockIndex {
    fn from(occ: &[usize]) -> Self {
        FockIndex(occ.to_vec())
    }
}

impl<const N: usize> From<[usize; N]> for FockIndex {
    fn from(occ: [usize; N]) -> Self {
        FockIndex(occ.to_vec())
    }
}

impl fmt::Display for FockIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("|")?;
        for (i, n) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{n}")?;
        }
        f.write_str("⟩")
    }
}

/// Single-mode ladder action.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Ladder {
    Lower,
    Raise,
    Number,
}

impl Ladder {
    /// Target level and matrix element for acting on `|n⟩`, ignoring truncation.
    /// `None` when the result vanishes.
    pub fn act(self, n: usize) -> Option<(usize, f64)> {
        match self {
            Ladder::Lower if n == 0 => None,
            Ladder::Lower => Some((n - 1, libm::sqrt(n as f64))),
            Ladder::Raise => Some((n + 1, libm::sqrt((n + 1) as f64))),
            Ladder::Number if n == 0 => None,
            Ladder::Number => Some((n, n as f64)),
        }
    }
}

/// Complex amplitudes over a truncated multimode Fock basis.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    dims: Vec<usize>,
    amps: Vec<Complex64>,
}

impl StateVector {
    pub fn zeros(dims: &[usize]) -> Result<Self> {
        if dims.is_empty() || dims.iter().any(|&d| d == 0) {
            return Err(Error::TruncationTooSmall { min: 1 });
        }
        let len = dims.iter().product();
        Ok(StateVector {
            dims: dims.to_vec(),
            amps: vec![Complex64::new(0.0, 0.0); len],
        })
    }

    /// The basis ket with the given occupations.
    pub fn basis(dims: &[usize], occ: &[usize]) -> Result<Self> {
        let mut s = Self::zeros(dims)?;
        let i = s.index_of(occ)?;
        s.amps[i] = Complex64::new(1.0, 0.0);
        Ok(s)
    }

    pub fn from_amplitudes(dims: &[usize], amps: Vec<Complex64>) -> Result<Self> {
        let s = Self::zeros(dims)?;
        if amps.len() != s.amps.len() {
            return Err(Error::DimensionMismatch {
                left: s.amps.len(),
                right: amps.len(),
            });
        }
        Ok(StateVector {
            dims: s.dims,
            amps,
        })
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn modes(&self) -> usize {
        self.dims.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn len(&self) -> usize {
        self.amps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amps.is_empty()
    }

    pub fn index_of(&self, occ: &[usize]) -> Result<usize> {
        flat_index(&self.dims, occ)
    }

    pub fn occupations(&self, index: usize) -> FockIndex {
        FockIndex(unflatten(&self.dims, index))
    }

    pub fn amplitude(&self, occ: &[usize]) -> Result<Complex64> {
        Ok(self.amps[self.index_of(occ)?])
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        libm::sqrt(self.norm_sqr())
    }

    pub fn is_normalized(&self) -> bool {
        (self.norm_sqr() - 1.0).abs() <= NORM_TOLERANCE
    }

    pub fn normalize(&self) -> Result<Self> {
        let n = self.norm();
        if n == 0.0 {
            return Err(Error::ZeroVector);
        }
        Ok(self.scale(Complex64::new(1.0 / n, 0.0)))
    }

    pub fn scale(&self, k: Complex64) -> Self {
        StateVector {
            dims: self.dims.clone(),
            amps: self.amps.iter().map(|a| a * k).collect(),
        }
    }

    /// `⟨self|other⟩`, conjugate-linear in `self`.
    pub fn inner(&self, other: &StateVector) -> Result<Complex64> {
        if self.dims != other.dims {
            return Err(Error::DimensionMismatch {
                left: self.amps.len(),
                right: other.amps.len(),
            });
        }
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// Tensor product `self ⊗ other`; modes of `other` follow those of `self`.
    pub fn tensor(&self, other: &StateVector) -> StateVector {
        let mut dims = self.dims.clone();
        dims.extend_from_slice(&other.dims);
        let mut amps = Vec::with_capacity(self.amps.len() * other.amps.len());
        for a in &self.amps {
            amps.extend(other.amps.iter().map(|b| a * b));
        }
        StateVector { dims, amps }
    }

    /// Applies a ladder operator to one mode. The result is not renormalized.
    ///
    /// Raising fails if the top retained level of `mode` carries amplitude,
    /// since that part of the state would leave the truncated space.
    pub fn apply_ladder(&self, mode: usize, op: Ladder) -> Result<StateVector> {
        if mode >= self.dims.len() {
            return Err(Error::ModeOutOfRange {
                mode,
                modes: self.dims.len(),
            });
        }
        let dim = self.dims[mode];
        let stride: usize = self.dims[mode + 1..].iter().product();
        let mut out = vec![Complex64::new(0.0, 0.0); self.amps.len()];
        for (i, a) in self.amps.iter().enumerate() {
            if *a == Complex64::new(0.0, 0.0) {
                continue;
            }
            let n = (i / stride) % dim;
            let Some((m, k)) = op.act(n) else { continue };
            if m >= dim {
                return Err(Error::Truncation { mode });
            }
            let j = i + m * stride - n * stride;
            out[j] += a * k;
        }
        Ok(StateVector {
            dims: self.dims.clone(),
            amps: out,
        })
    }
}

/// `⟨a|b⟩` for two states on the same space.
pub fn inner_product(a: &StateVector, b: &StateVector) -> Result<Complex64> {
    a.inner(b)
}

pub(crate) fn flat_index(dims: &[usize], occ: &[usize]) -> Result<usize> {
    if occ.len() != dims.len() {
        return Err(Error::ModeOutOfRange {
            mode: occ.len(),
            modes: dims.len(),
        });
    }
    let mut idx = 0;
    for (mode, (&n, &d)) in occ.iter().zip(dims).enumerate() {
        if n >= d {
            return Err(Error::OccupationOutOfRange {
                mode,
                occupation: n,
                dim: d,
            });
        }
        idx = idx * d + n;
    }
    Ok(idx)
}

pub(crate) fn unflatten(dims: &[usize], mut index: usize) -> Vec<usize> {
    let mut occ = vec![0; dims.len()];
    for (slot, &d) in occ.iter_mut().zip(dims).rev() {
        *slot = index % d;
        index /= d;
    }
    occ
}

/// `c0 |0,0,1⟩ + c1 |1,1,0⟩` in (signal, idler, pump) order.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TripletState {
    c0: Complex64,
    c1: Complex64,
}

impl TripletState {
    pub fn new(c0: Complex64, c1: Complex64) -> Result<Self> {
        let norm_sqr = c0.norm_sqr() + c1.norm_sqr();
        if !norm_sqr.is_finite() || (norm_sqr - 1.0).abs() > NORM_TOLERANCE {
            return Err(Error::NotNormalized { norm_sqr });
        }
        Ok(TripletState { c0, c1 })
    }

    pub fn from_real(c0: f64, c1: f64) -> Result<Self> {
        Self::new(Complex64::new(c0, 0.0), Complex64::new(c1, 0.0))
    }

    /// Real state with `c1 = sqrt(1 - c0²)`.
    pub fn from_c0(c0: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&c0) {
            return Err(Error::InvalidParameter("c0 must lie in [0, 1]"));
        }
        Self::from_real(c0, libm::sqrt((1.0 - c0 * c0).max(0.0)))
    }

    /// Equal superposition, `c0 = c1 = 1/√2`.
    pub fn maximal() -> Self {
        let r = core::f64::consts::FRAC_1_SQRT_2;
        TripletState {
            c0: Complex64::new(r, 0.0),
            c1: Complex64::new(r, 0.0),
        }
    }

    pub fn c0(&self) -> Complex64 {
        self.c0
    }

    pub fn c1(&self) -> Complex64 {
        self.c1
    }

    /// `|c0 c1|`, the weight of every interference term.
    pub fn coherence(&self) -> f64 {
        self.c0.norm() * self.c1.norm()
    }

    /// `arg(c1) - arg(c0)`; closed forms absorb it into ψ₀.
    pub fn relative_phase(&self) -> f64 {
        (self.c1 * self.c0.conj()).arg()
    }

    /// Embeds into the `(2, 2, 2)` space.
    pub fn embed(&self) -> StateVector {
        self.embed_in(&[2, 2, 2])
            .expect("(2,2,2) holds the triplet")
    }

    /// Embeds into a larger truncation; every mode needs dimension ≥ 2.
    pub fn embed_in(&self, dims: &[usize]) -> Result<StateVector> {
        if dims.len() != 3 {
            return Err(Error::InvalidParameter("triplet lives in a 3-mode space"));
        }
        if dims.iter().any(|&d| d < 2) {
            return Err(Error::TruncationTooSmall { min: 2 });
        }
        let mut s = StateVector::zeros(dims)?;
        let i0 = s.index_of(&[0, 0, 1])?;
        let i1 = s.index_of(&[1, 1, 0])?;
        s.amps[i0] = self.c0;
        s.amps[i1] = self.c1;
        Ok(s)
    }
}

/// Validating wrapper over [`TripletState::embed`].
pub fn embed_triplet(c0: Complex64, c1: Complex64) -> Result<StateVector> {
    Ok(TripletState::new(c0, c1)?.embed())
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::FRAC_1_SQRT_2;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn embed_places_amplitudes() {
        let t = TripletState::from_real(1.0, 0.0).unwrap();
        let s = t.embed();
        assert_eq!(s.len(), 8);
        assert_eq!(s.amplitude(&[0, 0, 1]).unwrap(), c(1.0));
        assert_eq!(s.norm_sqr(), 1.0);

        let s = TripletState::maximal().embed();
        assert_eq!(s.amplitudes()[1], c(FRAC_1_SQRT_2));
        assert_eq!(s.amplitudes()[6], c(FRAC_1_SQRT_2));
        for i in [0, 2, 3, 4, 5, 7] {
            assert_eq!(s.amplitudes()[i], c(0.0));
        }

        let s = TripletState::from_real(0.6, 0.8).unwrap().embed();
        assert!((s.norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn unnormalized_triplet_rejected() {
        assert!(matches!(
            embed_triplet(c(0.6), c(0.6)),
            Err(Error::NotNormalized { .. })
        ));
        assert!(TripletState::from_c0(1.5).is_err());
    }

    #[test]
    fn inner_products() {
        let t = TripletState::from_real(0.6, 0.8).unwrap();
        let psi = t.embed();
        let k001 = StateVector::basis(&[2, 2, 2], &[0, 0, 1]).unwrap();
        let k110 = StateVector::basis(&[2, 2, 2], &[1, 1, 0]).unwrap();
        assert_eq!(inner_product(&k001, &psi).unwrap(), c(0.6));
        assert!((inner_product(&psi, &psi).unwrap() - c(1.0)).norm() < 1e-15);
        assert_eq!(inner_product(&k110, &k001).unwrap(), c(0.0));

        let other = StateVector::zeros(&[2, 2]).unwrap();
        assert!(matches!(
            inner_product(&psi, &other),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn ladder_actions() {
        let one = StateVector::basis(&[2], &[1]).unwrap();
        let zero = StateVector::basis(&[2], &[0]).unwrap();
        assert_eq!(one.apply_ladder(0, Ladder::Lower).unwrap(), zero);
        assert_eq!(zero.apply_ladder(0, Ladder::Raise).unwrap(), one);
        assert!(matches!(
            one.apply_ladder(0, Ladder::Raise),
            Err(Error::Truncation { mode: 0 })
        ));

        let t = TripletState::from_real(0.6, 0.8).unwrap();
        let n = t.embed().apply_ladder(PUMP, Ladder::Number).unwrap();
        assert_eq!(n.amplitude(&[0, 0, 1]).unwrap(), c(0.6));
        assert_eq!(n.amplitude(&[1, 1, 0]).unwrap(), c(0.0));

        assert!(matches!(
            t.embed().apply_ladder(3, Ladder::Lower),
            Err(Error::ModeOutOfRange { .. })
        ));
    }

    #[test]
    fn raise_matrix_element_uses_sqrt() {
        let s = StateVector::basis(&[4], &[2]).unwrap();
        let up = s.apply_ladder(0, Ladder::Raise).unwrap();
        assert!((up.amplitude(&[3]).unwrap().re - 3f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn row_major_indexing() {
        let s = StateVector::zeros(&[2, 3, 4]).unwrap();
        assert_eq!(s.index_of(&[1, 2, 3]).unwrap(), 23);
        assert_eq!(s.occupations(23), FockIndex::from([1, 2, 3]));
        assert!(s.index_of(&[0, 3, 0]).is_err());
    }

    #[test]
    fn tensor_orders_modes() {
        let a = StateVector::basis(&[2], &[1]).unwrap();
        let b = StateVector::basis(&[3], &[2]).unwrap();
        let ab = a.tensor(&b);
        assert_eq!(ab.dims(), &[2, 3]);
        assert_eq!(ab.amplitude(&[1, 2]).unwrap(), c(1.0));
    }

    #[test]
    fn normalize_zero_vector_fails() {
        let z = StateVector::zeros(&[2, 2]).unwrap();
        assert_eq!(z.normalize(), Err(Error::ZeroVector));
    }
}
