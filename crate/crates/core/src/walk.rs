//! Walk states and their evolution under `U = S·C`.
//!
//! The coin acts first (on every vertex), then the shift. States are dense
//! coin-major vectors of length `d·n`. Norms are not renormalized between
//! steps, so a non-unitary shift shows up directly in the trajectory.

use std::fmt::Write as _;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::qop::{basis_index, CoinOperator, QopError, ShiftOperator, StateOperator};
use crate::FORMAT_VERSION;

/// Tolerance on the squared norm of a freshly normalized state.
pub const INIT_TOLERANCE: f64 = 1e-12;

/// Accumulated tolerance on squared norms over long unitary runs.
pub const NORM_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum WalkError {
    #[error("initial support is empty")]
    EmptySupport,
    #[error("initial amplitudes sum to the zero vector")]
    ZeroNorm,
    #[error("support entry (label {label}, vertex {vertex}) out of range for n={n}, d={d}")]
    OutOfRange { label: usize, vertex: usize, n: usize, d: usize },
    #[error(transparent)]
    Operator(#[from] QopError),
}

#[derive(Debug, Clone, PartialEq)]
pub struct WalkState {
    n: usize,
    d: usize,
    amps: Vec<Complex64>,
    step: usize,
}

/// Normalized state from `(label, vertex, amplitude)` triples (0-based).
/// Repeated entries add.
pub fn init_state(n: usize, d: usize, support: &[(usize, usize, Complex64)]) -> Result<WalkState, WalkError> {
    if support.is_empty() {
        return Err(WalkError::EmptySupport);
    }
    let mut amps = vec![Complex64::new(0.0, 0.0); n * d];
    for &(label, vertex, a) in support {
        if label >= d || vertex >= n {
            return Err(WalkError::OutOfRange { label, vertex, n, d });
        }
        amps[basis_index(n, label, vertex)] += a;
    }
    let norm2: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
    if norm2 == 0.0 || !norm2.is_finite() {
        return Err(WalkError::ZeroNorm);
    }
    let scale = 1.0 / norm2.sqrt();
    amps.iter_mut().for_each(|a| *a *= scale);
    Ok(WalkState { n, d, amps, step: 0 })
}

impl WalkState {
    /// Equal amplitude on all `d·n` basis states.
    pub fn uniform(n: usize, d: usize) -> WalkState {
        let a = Complex64::new(1.0 / ((n * d) as f64).sqrt(), 0.0);
        WalkState { n, d, amps: vec![a; n * d], step: 0 }
    }

    /// Unit mass on `(label, vertex)`.
    pub fn basis(n: usize, d: usize, label: usize, vertex: usize) -> WalkState {
        let mut amps = vec![Complex64::new(0.0, 0.0); n * d];
        amps[basis_index(n, label, vertex)] = Complex64::new(1.0, 0.0);
        WalkState { n, d, amps, step: 0 }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn step_count(&self) -> usize {
        self.step
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn amplitude(&self, label: usize, vertex: usize) -> Complex64 {
        self.amps[basis_index(self.n, label, vertex)]
    }

    pub fn norm2(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub(crate) fn with_amplitudes(&self, amps: Vec<Complex64>) -> WalkState {
        WalkState { n: self.n, d: self.d, amps, step: self.step }
    }
}

/// Per-vertex probability: sum over coin labels of `|amplitude|²`.
pub fn distribution(state: &WalkState) -> Vec<f64> {
    let n = state.n;
    let mut p = vec![0.0; n];
    for chunk in state.amps.chunks_exact(n) {
        for (pv, a) in p.iter_mut().zip(chunk) {
            *pv += a.norm_sqr();
        }
    }
    p
}

/// One application of `U = S·C`.
pub fn step(state: &WalkState, coin: &CoinOperator, shift: &ShiftOperator) -> Result<WalkState, WalkError> {
    let coined = coin.apply_to(state)?;
    let mut next = shift.apply_to(&coined)?;
    next.step = state.step + 1;
    Ok(next)
}

/// `U† = C†·S†`: undoes [`step`] when the shift is unitary.
pub fn inverse_step(state: &WalkState, coin: &CoinOperator, shift: &ShiftOperator) -> Result<WalkState, WalkError> {
    let back = shift.apply_adjoint_slice(&state.amps)?;
    let amps = coin.adjoint().apply_slice(state.n, &back)?;
    Ok(WalkState { n: state.n, d: state.d, amps, step: state.step.saturating_sub(1) })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepRecord {
    pub step: usize,
    pub probabilities: Vec<f64>,
    pub norm2: f64,
}

impl StepRecord {
    fn of(state: &WalkState) -> Self {
        StepRecord { step: state.step, probabilities: distribution(state), norm2: state.norm2() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WalkTrajectory {
    pub version: String,
    pub n: usize,
    pub d: usize,
    pub records: Vec<StepRecord>,
}

/// Runs `t` steps, recording the initial state and every step after it.
pub fn run(state: &WalkState, coin: &CoinOperator, shift: &ShiftOperator, t: usize) -> Result<WalkTrajectory, WalkError> {
    let mut records = Vec::with_capacity(t + 1);
    records.push(StepRecord::of(state));
    let mut cur = state.clone();
    for _ in 0..t {
        cur = step(&cur, coin, shift)?;
        records.push(StepRecord::of(&cur));
    }
    Ok(WalkTrajectory { version: FORMAT_VERSION.into(), n: state.n, d: state.d, records })
}

impl WalkTrajectory {
    pub fn norms(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.norm2).collect()
    }

    /// `step,vertex,probability,norm2`, one row per step and vertex,
    /// vertices 1-based.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("step,vertex,probability,norm2\n");
        for r in &self.records {
            for (v, p) in r.probabilities.iter().enumerate() {
                let _ = writeln!(s, "{},{},{:e},{:e}", r.step, v + 1, p, r.norm2);
            }
        }
        s
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("trajectory serializes")
    }
}
