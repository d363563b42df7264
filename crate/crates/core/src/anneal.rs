//! Trotterized adiabatic evolution under driver, data and control families.
//!
//! The time-dependent Hamiltonian is
//! `H(t) = s_driver(t)·H_driver + s_data(t)·H_data + s_control(t)·H_control`
//! with `H_driver = -Σ_q X_q`. The evolution is split into `R` steps; step
//! `r` holds the strengths fixed at `t = r/R` for a duration `τ/R`, which is
//! itself cut into `n_T` first-order Trotter slices.

use serde::{Deserialize, Serialize};

use crate::model::TrainingLayout;
use crate::tensor::{
    data_marginal, pauli, CompiledGate, Complex64, Distribution, HermitianEigen, LocalOperator,
    StateVector, Term, WeightedTermList, DEFAULT_MAX_QUBITS, HARD_MAX_QUBITS,
};
use crate::{Error, Result};

/// Resolution and length of an anneal.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnnealConfig {
    /// Annealing steps `R`.
    pub steps: usize,
    /// Trotter slices `n_T` per step.
    pub trotter: usize,
    /// Total evolution time `τ`.
    pub total_time: f64,
    /// Largest register the anneal will allocate.
    pub max_qubits: usize,
}

impl Default for AnnealConfig {
    fn default() -> Self {
        Self {
            steps: 100,
            trotter: 30,
            total_time: 20.0,
            max_qubits: DEFAULT_MAX_QUBITS,
        }
    }
}

impl AnnealConfig {
    pub fn new(steps: usize, trotter: usize, total_time: f64) -> Self {
        Self {
            steps,
            trotter,
            total_time,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.steps == 0 || self.trotter == 0 {
            return Err(Error::InvalidArgument("R and n_T must be at least 1".into()));
        }
        if !(self.total_time.is_finite() && self.total_time > 0.0) {
            return Err(Error::InvalidArgument(format!("τ = {}", self.total_time)));
        }
        if self.max_qubits > HARD_MAX_QUBITS {
            return Err(Error::QubitCap {
                requested: self.max_qubits,
                cap: HARD_MAX_QUBITS,
            });
        }
        for (name, v) in [("R", self.steps), ("n_T", self.trotter)] {
            if !(5..=150).contains(&v) {
                log::warn!("{name} = {v} is outside the tested range 5..=150");
            }
        }
        Ok(())
    }
}

/// Piecewise-linear strength curve on `[0, 1]`, given by `(t, s)` breakpoints.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<(f64, f64)>", into = "Vec<(f64, f64)>")]
pub struct Curve(Vec<(f64, f64)>);

impl Curve {
    /// Breakpoints must start at `t = 0`, end at `t = 1`, and have
    /// non-decreasing times.
    pub fn new(points: Vec<(f64, f64)>) -> Result<Self> {
        let bad = |m: &str| Err(Error::InvalidSchedule(m.to_string()));
        if points.len() < 2 {
            return bad("a curve needs at least two breakpoints");
        }
        if points.iter().any(|(t, s)| !t.is_finite() || !s.is_finite()) {
            return bad("non-finite breakpoint");
        }
        if points[0].0 != 0.0 || points[points.len() - 1].0 != 1.0 {
            return bad("breakpoints must span t = 0 to t = 1");
        }
        if points.windows(2).any(|w| w[1].0 < w[0].0) {
            return bad("breakpoint times must be non-decreasing");
        }
        Ok(Self(points))
    }

    pub fn points(&self) -> &[(f64, f64)] {
        &self.0
    }

    /// Value at `t`; at a repeated breakpoint time the later value wins.
    pub fn at(&self, t: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&t) {
            return Err(Error::TimeOutOfRange(t));
        }
        let p = &self.0;
        let i = p.partition_point(|&(ti, _)| ti <= t);
        if i == p.len() {
            return Ok(p[p.len() - 1].1);
        }
        let (t0, s0) = p[i - 1];
        let (t1, s1) = p[i];
        Ok(s0 + (s1 - s0) * (t - t0) / (t1 - t0))
    }
}

impl TryFrom<Vec<(f64, f64)>> for Curve {
    type Error = Error;

    fn try_from(v: Vec<(f64, f64)>) -> Result<Self> {
        Curve::new(v)
    }
}

impl From<Curve> for Vec<(f64, f64)> {
    fn from(c: Curve) -> Self {
        c.0
    }
}

/// Strength curves of the three term families.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnnealSchedule {
    pub driver: Curve,
    pub data: Curve,
    pub control: Curve,
}

impl Default for AnnealSchedule {
    /// Driver held at 1 until `t = 1/8` then ramped to 0; data ramped to 1/4
    /// by `t = 1/8` then to 1; control off until `t = 1/8` then ramped to 1.
    fn default() -> Self {
        let c = |p: &[(f64, f64)]| Curve::new(p.to_vec()).expect("valid default curve");
        Self {
            driver: c(&[(0.0, 1.0), (0.125, 1.0), (1.0, 0.0)]),
            data: c(&[(0.0, 0.0), (0.125, 0.25), (1.0, 1.0)]),
            control: c(&[(0.0, 0.0), (0.125, 0.0), (1.0, 1.0)]),
        }
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ScheduleOverride {
    driver: Option<Curve>,
    data: Option<Curve>,
    control: Option<Curve>,
}

impl AnnealSchedule {
    /// Reads `{"driver": [[t, s], ...], "data": ..., "control": ...}`;
    /// families left out keep their default curve.
    pub fn from_json(text: &str) -> Result<Self> {
        let o: ScheduleOverride = serde_json::from_str(text)?;
        let d = Self::default();
        Ok(Self {
            driver: o.driver.unwrap_or(d.driver),
            data: o.data.unwrap_or(d.data),
            control: o.control.unwrap_or(d.control),
        })
    }
}

/// Family strengths at normalized time `t`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Strengths {
    pub driver: f64,
    pub data: f64,
    pub control: f64,
}

pub fn schedule_strengths(schedule: &AnnealSchedule, t: f64) -> Result<Strengths> {
    Ok(Strengths {
        driver: schedule.driver.at(t)?,
        data: schedule.data.at(t)?,
        control: schedule.control.at(t)?,
    })
}

/// `|+⟩^{⊗n}`, the ground state of the driver.
pub fn initial_state(n: usize) -> Result<StateVector> {
    StateVector::uniform(n)
}

/// `H_driver = -Σ_q X_q` on `n` qubits.
pub fn driver_hamiltonian(n: usize) -> WeightedTermList {
    let mut h = WeightedTermList::new();
    for q in 0..n {
        let x = LocalOperator::hermitian(pauli::x(), vec![q]).expect("X is Hermitian");
        h.push(Term::new(-1.0, x)).expect("valid driver term");
    }
    h
}

/// A term with its local eigendecomposition cached, so that the gate for
/// any angle is a cheap rebuild.
struct PreparedTerm {
    coefficient: f64,
    controls: Vec<(usize, bool)>,
    targets: Vec<usize>,
    eig: Option<HermitianEigen>,
}

impl PreparedTerm {
    fn new(t: &Term) -> Self {
        Self {
            coefficient: t.coefficient,
            controls: t.controls.clone(),
            targets: t.targets().to_vec(),
            eig: t.operator.as_ref().map(|o| HermitianEigen::new(o.matrix())),
        }
    }

    /// Gate `exp(-i θ a (P ⊗ h))`, i.e. `P ⊗ exp(-iθah) + (1 - P) ⊗ 1`.
    fn gate(&self, n: usize, theta: f64) -> CompiledGate {
        let angle = theta * self.coefficient;
        let u = match &self.eig {
            Some(e) => e.exp_i(angle),
            None => nalgebra::DMatrix::from_element(1, 1, Complex64::from_polar(1.0, -angle)),
        };
        CompiledGate::new(n, &self.controls, &self.targets, &u)
    }
}

fn prepare(h: &WeightedTermList) -> Vec<PreparedTerm> {
    h.terms()
        .iter()
        .filter(|t| t.coefficient != 0.0)
        .map(PreparedTerm::new)
        .collect()
}

/// First-order Trotter evolution `ψ ← (Π_k e^{-i a_k h_k t/n})^n ψ` under a
/// time-independent Hamiltonian, terms applied in list order.
pub fn trotter_evolve(state: &mut StateVector, h: &WeightedTermList, time: f64, slices: usize) -> Result<()> {
    if slices == 0 {
        return Err(Error::InvalidArgument("need at least one Trotter slice".into()));
    }
    let n = state.n_qubits();
    state.check_qubits(h.terms().iter().flat_map(|t| t.support()))?;
    let dt = time / slices as f64;
    let gates: Vec<CompiledGate> = prepare(h).iter().map(|t| t.gate(n, dt)).collect();
    let amps = state.amplitudes_mut();
    for _ in 0..slices {
        for g in &gates {
            g.apply(amps);
        }
    }
    Ok(())
}

/// Final state of an anneal.
#[derive(Debug, Clone, PartialEq)]
pub struct AnnealResult {
    pub state: StateVector,
}

impl AnnealResult {
    /// Distribution of the given register (e.g. the data vertices).
    pub fn distribution(&self, qubits: &[usize]) -> Result<Distribution> {
        data_marginal(&self.state, qubits)
    }

    pub fn control_statistics(&self, layout: &TrainingLayout) -> Result<ControlStatistics> {
        control_statistics(&self.state, layout)
    }
}

/// Evolves `|+⟩^{⊗N}` under the three families. Terms are applied driver
/// first, then data, then control, each in list order. The data family is
/// used exactly as given, so a bonus `-δΠ` must be passed already signed.
pub fn run_anneal(
    driver: &WeightedTermList,
    data: &WeightedTermList,
    control: &WeightedTermList,
    config: &AnnealConfig,
    schedule: &AnnealSchedule,
) -> Result<AnnealResult> {
    config.validate()?;
    let n = [driver, data, control]
        .iter()
        .map(|h| h.min_qubits())
        .max()
        .unwrap_or(0);
    if n > config.max_qubits {
        return Err(Error::QubitCap {
            requested: n,
            cap: config.max_qubits,
        });
    }
    let mut state = initial_state(n)?;
    let families = [prepare(driver), prepare(data), prepare(control)];
    let step = config.total_time / config.steps as f64;
    let dt = step / config.trotter as f64;
    let amps = state.amplitudes_mut();
    for r in 1..=config.steps {
        let s = schedule_strengths(schedule, r as f64 / config.steps as f64)?;
        let gates: Vec<CompiledGate> = families
            .iter()
            .zip([s.driver, s.data, s.control])
            .filter(|(_, strength)| *strength != 0.0)
            .flat_map(|(family, strength)| family.iter().map(move |t| t.gate(n, strength * dt)))
            .collect();
        for _ in 0..config.trotter {
            for g in &gates {
                g.apply(amps);
            }
        }
    }
    let dev = (state.norm_sqr() - 1.0).abs();
    if dev > 1e-7 {
        return Err(Error::Numerical(format!("anneal lost norm: {dev:e}")));
    }
    Ok(AnnealResult { state })
}

/// Control-register measurement statistics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ControlStatistics {
    /// `p(|1⟩)` of each control qubit, in register order.
    pub qubit_p: Vec<f64>,
    /// Probability that each term instance is switched on: its control
    /// qubit reads 1 (per-term) or its group reads its pattern (qudit).
    pub term_p: Vec<f64>,
    /// Joint distribution of the control register (the block probabilities).
    pub blocks: Distribution,
}

pub fn control_statistics(state: &StateVector, layout: &TrainingLayout) -> Result<ControlStatistics> {
    if state.n_qubits() != layout.n_qubits() {
        return Err(Error::DimensionMismatch(format!(
            "state has {} qubits, layout needs {}",
            state.n_qubits(),
            layout.n_qubits()
        )));
    }
    let controls = layout.control_qubits();
    let blocks = data_marginal(state, &controls)?;
    let w = controls.len();
    let mut qubit_p = vec![0.0; w];
    let mut term_p = vec![0.0; layout.n_terms];
    for (v, &p) in blocks.probs().iter().enumerate() {
        if p == 0.0 {
            continue;
        }
        let bits: Vec<bool> = (0..w).map(|b| (v >> (w - 1 - b)) & 1 == 1).collect();
        for (b, &on) in bits.iter().enumerate() {
            if on {
                qubit_p[b] += p;
            }
        }
        for t in layout.active_terms(&bits) {
            term_p[t] += p;
        }
    }
    Ok(ControlStatistics {
        qubit_p,
        term_p,
        blocks,
    })
}
