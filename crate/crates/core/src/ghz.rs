//! Mermin-type four-term GHZ inequalities.
//!
//! Each term multiplies three local ±1 results taken at an `x` or `y` setting;
//! local realism bounds the signed sum by 2 while the triplet reaches 4 with
//! binary phase measurement.

use alloc::vec::Vec;
use core::f64::consts::FRAC_PI_2;
use core::fmt;

use crate::error::{Error, Result};
use crate::fock::TripletState;
use crate::measurement::AngleAssignment;

/// Slack allowed on `|E| ≤ 1` for floating-point correlations.
pub const CORRELATION_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Setting {
    X,
    Y,
}

impl Setting {
    fn index(self) -> usize {
        match self {
            Setting::X => 0,
            Setting::Y => 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Term {
    pub settings: [Setting; 3],
    pub sign: i8,
}

impl Term {
    pub const fn new(settings: [Setting; 3], sign: i8) -> Self {
        Term { settings, sign }
    }

    pub fn label(&self) -> [char; 3] {
        self.settings.map(|s| match s {
            Setting::X => 'x',
            Setting::Y => 'y',
        })
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a, b, c] = self.label();
        let s = if self.sign >= 0 { '+' } else { '-' };
        write!(f, "{s}{a}{b}{c}")
    }
}

/// Which of the two standard four-term forms an arrangement is.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArrangementKind {
    /// `xxx − yyx − yxy − xyy`
    Mermin,
    /// `yyx − xxx − yxy − xyy`, adapted to the asymmetric triplet.
    Triplet,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Arrangement {
    terms: [Term; 4],
    x_angle: f64,
    y_angle: f64,
}

use Setting::{X, Y};

impl Arrangement {
    pub fn new(terms: [Term; 4]) -> Result<Self> {
        if terms.iter().any(|t| t.sign != 1 && t.sign != -1) {
            return Err(Error::InvalidParameter("term signs must be +1 or -1"));
        }
        Ok(Arrangement {
            terms,
            x_angle: 0.0,
            y_angle: FRAC_PI_2,
        })
    }

    pub fn mermin() -> Self {
        Arrangement {
            terms: [
                Term::new([X, X, X], 1),
                Term::new([Y, Y, X], -1),
                Term::new([Y, X, Y], -1),
                Term::new([X, Y, Y], -1),
            ],
            x_angle: 0.0,
            y_angle: FRAC_PI_2,
        }
    }

    pub fn triplet() -> Self {
        Arrangement {
            terms: [
                Term::new([Y, Y, X], 1),
                Term::new([X, X, X], -1),
                Term::new([Y, X, Y], -1),
                Term::new([X, Y, Y], -1),
            ],
            x_angle: 0.0,
            y_angle: FRAC_PI_2,
        }
    }

    pub fn of_kind(kind: ArrangementKind) -> Self {
        match kind {
            ArrangementKind::Mermin => Self::mermin(),
            ArrangementKind::Triplet => Self::triplet(),
        }
    }

    /// Overrides the angles that `x` and `y` settings map to.
    pub fn with_angles(mut self, x_angle: f64, y_angle: f64) -> Self {
        self.x_angle = x_angle;
        self.y_angle = y_angle;
        self
    }

    pub fn kind(&self) -> Option<ArrangementKind> {
        [ArrangementKind::Mermin, ArrangementKind::Triplet]
            .into_iter()
            .find(|k| Self::of_kind(*k).terms == self.terms)
    }

    pub fn terms(&self) -> &[Term; 4] {
        &self.terms
    }

    pub fn x_angle(&self) -> f64 {
        self.x_angle
    }

    pub fn y_angle(&self) -> f64 {
        self.y_angle
    }

    fn angle(&self, s: Setting) -> f64 {
        match s {
            Setting::X => self.x_angle,
            Setting::Y => self.y_angle,
        }
    }

    /// Per-mode angles for one term.
    pub fn assignment(&self, term: usize) -> AngleAssignment {
        let t = &self.terms[term];
        AngleAssignment::new(t.settings.map(|s| self.angle(s)))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GhzResult {
    /// Unsigned correlation of each term, in arrangement order.
    pub terms: [f64; 4],
    /// Signed sum of the terms.
    pub signed: f64,
    pub f: f64,
}

impl GhzResult {
    pub fn from_terms(arrangement: &Arrangement, terms: [f64; 4]) -> Self {
        let signed = arrangement
            .terms
            .iter()
            .zip(terms)
            .map(|(t, v)| f64::from(t.sign) * v)
            .sum::<f64>();
        GhzResult {
            terms,
            signed,
            f: signed.abs(),
        }
    }

    pub fn violates_local_bound(&self) -> bool {
        self.f > 2.0
    }
}

/// Evaluates `F` by calling `correlation` once per term at that term's angles.
pub fn evaluate_f<C>(arrangement: &Arrangement, mut correlation: C) -> Result<GhzResult>
where
    C: FnMut(&AngleAssignment) -> Result<f64>,
{
    let mut terms = [0.0; 4];
    for (i, slot) in terms.iter_mut().enumerate() {
        let e = correlation(&arrangement.assignment(i))?;
        if !e.is_finite() || e.abs() > 1.0 + CORRELATION_SLACK {
            return Err(Error::CorrelationOutOfRange { value: e });
        }
        *slot = e;
    }
    Ok(GhzResult::from_terms(arrangement, terms))
}

/// A deterministic local strategy: `values[mode][setting]` is the ±1 result.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LocalStrategy {
    pub values: [[i8; 2]; 3],
}

impl LocalStrategy {
    /// Decodes strategy `k ∈ 0..64`; bit `2·mode + setting` set means −1.
    pub fn from_index(k: u8) -> Self {
        let mut values = [[1i8; 2]; 3];
        for (mode, v) in values.iter_mut().enumerate() {
            for (setting, slot) in v.iter_mut().enumerate() {
                if k >> (2 * mode + setting) & 1 == 1 {
                    *slot = -1;
                }
            }
        }
        LocalStrategy { values }
    }

    pub fn term_value(&self, term: &Term) -> i32 {
        term.settings
            .iter()
            .enumerate()
            .map(|(mode, s)| i32::from(self.values[mode][s.index()]))
            .product()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LhvOptimum {
    pub f_max: i32,
    pub strategy: LocalStrategy,
    pub terms: [i32; 4],
}

/// Maximizes `|signed sum|` over all 64 deterministic local strategies.
/// Mixtures of strategies cannot do better, so this is the local bound.
pub fn lhv_optimum(arrangement: &Arrangement) -> LhvOptimum {
    let mut best: Option<LhvOptimum> = None;
    for k in 0..64u8 {
        let strategy = LocalStrategy::from_index(k);
        let terms = arrangement.terms.map(|t| strategy.term_value(&t));
        let f = arrangement
            .terms
            .iter()
            .zip(terms)
            .map(|(t, v)| i32::from(t.sign) * v)
            .sum::<i32>()
            .abs();
        if best.is_none_or(|b| f > b.f_max) {
            best = Some(LhvOptimum {
                f_max: f,
                strategy,
                terms,
            });
        }
    }
    best.expect("64 strategies enumerated")
}

pub fn lhv_max_f(arrangement: &Arrangement) -> i32 {
    lhv_optimum(arrangement).f_max
}

/// Cartesian grid of `c0` values and per-mode angle offsets, `c0` outermost.
#[derive(Debug, Clone, PartialEq)]
pub struct ScanGrid {
    pub c0: Vec<f64>,
    pub offsets: Vec<[f64; 3]>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanPoint {
    pub c0: f64,
    pub offsets: [f64; 3],
}

impl ScanGrid {
    pub fn over_c0(c0: Vec<f64>) -> Self {
        ScanGrid {
            c0,
            offsets: alloc::vec![[0.0; 3]],
        }
    }

    /// `count` evenly spaced values from `start` to `stop` inclusive.
    pub fn linspace(start: f64, stop: f64, count: usize) -> Vec<f64> {
        match count {
            0 => Vec::new(),
            1 => alloc::vec![start],
            _ => (0..count)
                .map(|i| start + (stop - start) * i as f64 / (count - 1) as f64)
                .collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.c0.len() * self.offsets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn points(&self) -> impl Iterator<Item = ScanPoint> + '_ {
        self.c0.iter().flat_map(move |&c0| {
            self.offsets
                .iter()
                .map(move |&offsets| ScanPoint { c0, offsets })
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanRow {
    pub point: ScanPoint,
    pub state: TripletState,
    pub result: GhzResult,
}

/// Evaluates one grid point; `correlation` sees the state and the shifted angles.
pub fn scan_point<C>(arrangement: &Arrangement, point: ScanPoint, correlation: &C) -> Result<ScanRow>
where
    C: Fn(&TripletState, &AngleAssignment) -> Result<f64>,
{
    let state = TripletState::from_c0(point.c0)?;
    let result = evaluate_f(arrangement, |a| correlation(&state, &a.shifted(point.offsets)))?;
    Ok(ScanRow {
        point,
        state,
        result,
    })
}

/// Rows in grid order.
pub fn scan_f<C>(arrangement: &Arrangement, grid: &ScanGrid, correlation: C) -> Result<Vec<ScanRow>>
where
    C: Fn(&TripletState, &AngleAssignment) -> Result<f64>,
{
    if grid.is_empty() {
        return Err(Error::EmptyGrid);
    }
    grid.points()
        .map(|p| scan_point(arrangement, p, &correlation))
        .collect()
}
