//! Variational quantum power method.
//!
//! Each iteration prepares a product ansatz `⊗_j R_y(θ_j)|0⟩`, applies one
//! power step `(I+U)` (the `|0⟩` branch of a Hadamard test on `U`), reads the
//! per-qubit marginals at finite precision and feeds them back: qubits whose
//! marginal is decisively away from 1/2 are frozen to a classical bit, the
//! rest are re-rotated so the ansatz reproduces the measured marginal.
//!
//! [`run_exact_power`] carries the full state between steps with no
//! rounding or freezing and serves as the reference power iteration.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::error::{Result, VqpmError};
use crate::par;
use crate::qubo::{bit_of, Bitstring, ScaledProblem};
use crate::spectrum::{build_oracle, DiagonalOracle};
use crate::state::StateVector;

/// State of one register qubit in the ansatz.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Qubit {
    /// `R_y(θ)|0⟩ = cos θ|0⟩ + sin θ|1⟩`, with θ in `[0, π/2]`.
    Free(f64),
    Frozen(bool),
}

#[derive(Clone, Debug, PartialEq)]
pub struct AnsatzState {
    qubits: Vec<Qubit>,
}

impl AnsatzState {
    pub fn new(qubits: Vec<Qubit>) -> Self {
        AnsatzState { qubits }
    }

    /// Every qubit free at `θ = π/4`, i.e. the equal superposition.
    pub fn uniform(n: usize) -> Self {
        AnsatzState {
            qubits: vec![Qubit::Free(std::f64::consts::FRAC_PI_4); n],
        }
    }

    pub fn n(&self) -> usize {
        self.qubits.len()
    }

    pub fn qubits(&self) -> &[Qubit] {
        &self.qubits
    }

    pub fn frozen_mask(&self) -> Vec<bool> {
        self.qubits
            .iter()
            .map(|q| matches!(q, Qubit::Frozen(_)))
            .collect()
    }

    pub fn frozen_count(&self) -> usize {
        self.qubits
            .iter()
            .filter(|q| matches!(q, Qubit::Frozen(_)))
            .count()
    }

    pub fn all_frozen(&self) -> bool {
        self.frozen_count() == self.n()
    }

    /// True when basis index `index` agrees with every frozen bit.
    pub fn admits(&self, index: usize) -> bool {
        let n = self.n();
        self.qubits.iter().enumerate().all(|(j, q)| match q {
            Qubit::Frozen(b) => bit_of(index, n, j) == *b,
            Qubit::Free(_) => true,
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Variational,
    Exact,
}

impl FromStr for Mode {
    type Err = VqpmError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "variational" => Ok(Mode::Variational),
            "exact" => Ok(Mode::Exact),
            other => Err(VqpmError::Argument(format!("unknown mode {other:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct VqpmConfig {
    /// Measurement precision: marginals are rounded to multiples of this.
    pub gamma: f64,
    /// Freeze threshold on `|P(1) - P(0)|`.
    pub p_diff: f64,
    pub max_iters: usize,
    pub mode: Mode,
    pub success_threshold: f64,
}

impl Default for VqpmConfig {
    fn default() -> Self {
        VqpmConfig {
            gamma: 1e-4,
            p_diff: 1e-3,
            max_iters: 100,
            mode: Mode::Variational,
            success_threshold: 0.5,
        }
    }
}

impl VqpmConfig {
    pub fn validate(&self) -> Result<()> {
        let open_unit = |v: f64| v > 0.0 && v < 1.0;
        if !open_unit(self.gamma) {
            return Err(VqpmError::Argument(format!("gamma must be in (0, 1), got {}", self.gamma)));
        }
        if !open_unit(self.p_diff) {
            return Err(VqpmError::Argument(format!("p_diff must be in (0, 1), got {}", self.p_diff)));
        }
        if self.max_iters < 1 {
            return Err(VqpmError::Argument("max_iters must be at least 1".into()));
        }
        if !(self.success_threshold > 0.0 && self.success_threshold <= 1.0) {
            return Err(VqpmError::Argument(format!(
                "success_threshold must be in (0, 1], got {}",
                self.success_threshold
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct IterationRecord {
    /// 1-based.
    pub iteration: usize,
    pub p0: f64,
    /// Marginals after rounding (exact mode: unrounded).
    pub marginals: Vec<f64>,
    /// Frozen qubits after this iteration's update.
    pub frozen: Vec<bool>,
    /// Probability of the reference bitstring in the post-step state.
    pub success_prob: Option<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Termination {
    AllFrozen,
    MaxIters,
    SuccessThreshold,
}

impl fmt::Display for Termination {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Termination::AllFrozen => "all-frozen",
            Termination::MaxIters => "max-iters",
            Termination::SuccessThreshold => "success-threshold",
        })
    }
}

#[derive(Clone, Debug)]
pub struct VqpmResult {
    pub found: Bitstring,
    /// Objective of `found` on the unscaled problem.
    pub found_objective: f64,
    pub iterations: usize,
    pub termination: Termination,
    pub trace: Vec<IterationRecord>,
    /// Last post-step state.
    pub final_state: StateVector,
}

pub fn prepare_state(a: &AnsatzState) -> StateVector {
    let n = a.n();
    // per-qubit (amplitude of |0⟩, amplitude of |1⟩)
    let factors: Vec<(f64, f64)> = a
        .qubits()
        .iter()
        .map(|q| match *q {
            Qubit::Free(theta) => (theta.cos(), theta.sin()),
            Qubit::Frozen(false) => (1.0, 0.0),
            Qubit::Frozen(true) => (0.0, 1.0),
        })
        .collect();
    let mut amps = vec![Complex64::new(0.0, 0.0); 1 << n];
    par::fill_indexed(&mut amps, |index| {
        let mut a = 1.0;
        for (j, &(zero, one)) in factors.iter().enumerate() {
            a *= if bit_of(index, n, j) { one } else { zero };
            if a == 0.0 {
                break;
            }
        }
        Complex64::new(a, 0.0)
    });
    StateVector::from_amplitudes(n, amps).expect("ansatz dimension")
}

/// Applies `(I+U)` and normalizes. Returns the new state and
/// `P0 = ||(I+U)v||² / 4`.
pub fn power_step(v: &StateVector, o: &DiagonalOracle) -> Result<(StateVector, f64)> {
    VqpmError::check_dim(o.dim(), v.dim())?;
    let gain = o.plus_identity();
    let mut out = v.clone();
    par::for_each_indexed(out.amplitudes_mut(), |j, a| *a *= gain[j]);
    let norm_sqr = out.norm_sqr();
    out.normalize();
    Ok((out, norm_sqr / 4.0))
}

/// Measurement probabilities of the Hadamard-test control qubit:
/// `P0 = ||(I+U)v||²/4`, `P1 = ||(I-U)v||²/4`.
pub fn hadamard_branches(v: &StateVector, o: &DiagonalOracle) -> Result<(f64, f64)> {
    VqpmError::check_dim(o.dim(), v.dim())?;
    let phases = o.phases();
    let parts = par::map_chunks(v.amplitudes(), |offset, chunk| {
        let (mut plus, mut minus) = (0.0, 0.0);
        for (k, a) in chunk.iter().enumerate() {
            let u = Complex64::from_polar(1.0, phases[offset + k]);
            plus += (a + a * u).norm_sqr();
            minus += (a - a * u).norm_sqr();
        }
        (plus, minus)
    });
    let plus = par::ordered_sum(parts.iter().map(|p| p.0));
    let minus = par::ordered_sum(parts.iter().map(|p| p.1));
    Ok((plus / 4.0, minus / 4.0))
}

pub fn marginals(v: &StateVector) -> Vec<f64> {
    v.marginals()
}

/// Nearest multiple of `gamma` (half away from zero), clamped to `[0, 1]`.
pub fn round_to_precision(p: f64, gamma: f64) -> f64 {
    let steps = (1.0 / gamma).round();
    let rounded = if (steps * gamma - 1.0).abs() < 1e-12 {
        // γ = 1/k: divide by the integer k so decimal grids land exactly
        (p * steps).round() / steps
    } else {
        (p / gamma).round() * gamma
    };
    rounded.clamp(0.0, 1.0)
}

/// Freezes free qubits whose rounded marginal satisfies `|2m - 1| ≥ p_diff`
/// and re-rotates the others to `θ = arcsin(√m)`.
pub fn update_ansatz(a: &AnsatzState, rounded_marginals: &[f64], cfg: &VqpmConfig) -> AnsatzState {
    let qubits = a
        .qubits()
        .iter()
        .zip(rounded_marginals)
        .map(|(q, &m)| match q {
            Qubit::Frozen(_) => *q,
            Qubit::Free(_) if (2.0 * m - 1.0).abs() >= cfg.p_diff => Qubit::Frozen(m > 0.5),
            Qubit::Free(_) => Qubit::Free(m.sqrt().asin()),
        })
        .collect();
    AnsatzState { qubits }
}

/// Runs the configured mode on a scaled problem.
///
/// `reference` is bookkeeping only: when given, each record carries its
/// probability and the variational loop stops once it reaches
/// `cfg.success_threshold`.
pub fn run(s: &ScaledProblem, cfg: &VqpmConfig, reference: Option<&Bitstring>) -> Result<VqpmResult> {
    cfg.validate()?;
    if let Some(r) = reference {
        VqpmError::check_dim(s.n(), r.len())?;
    }
    let oracle = build_oracle(s)?;
    let mut result = match cfg.mode {
        Mode::Variational => run_variational_on(&oracle, cfg, reference)?,
        Mode::Exact => run_exact_on(&oracle, cfg, reference)?,
    };
    result.found_objective = s.raw_objective(&result.found)?;
    Ok(result)
}

/// Exact power iteration on `(I+U)` from the uniform state.
pub fn run_exact_power(s: &ScaledProblem, cfg: &VqpmConfig) -> Result<VqpmResult> {
    let cfg = VqpmConfig {
        mode: Mode::Exact,
        ..cfg.clone()
    };
    run(s, &cfg, None)
}

/// Variational loop on an explicit oracle. `found_objective` is left NaN
/// since the oracle carries no raw problem.
pub fn run_variational_on(
    oracle: &DiagonalOracle,
    cfg: &VqpmConfig,
    reference: Option<&Bitstring>,
) -> Result<VqpmResult> {
    cfg.validate()?;
    let mut ansatz = AnsatzState::uniform(oracle.n());
    let mut trace = Vec::new();
    let mut last = None;
    let mut termination = Termination::MaxIters;

    for iteration in 1..=cfg.max_iters {
        let prepared = prepare_state(&ansatz);
        let (post, p0) = power_step(&prepared, oracle)?;
        let rounded: Vec<f64> = marginals(&post)
            .into_iter()
            .map(|m| round_to_precision(m, cfg.gamma))
            .collect();
        let success_prob = reference.map(|r| post.probability(r.index()));
        let was_all_frozen = ansatz.all_frozen();
        if !was_all_frozen {
            ansatz = update_ansatz(&ansatz, &rounded, cfg);
        }
        trace.push(IterationRecord {
            iteration,
            p0,
            marginals: rounded,
            frozen: ansatz.frozen_mask(),
            success_prob,
        });
        last = Some(post);

        if success_prob.is_some_and(|p| p >= cfg.success_threshold) {
            termination = Termination::SuccessThreshold;
            break;
        }
        if was_all_frozen {
            termination = Termination::AllFrozen;
            break;
        }
    }

    let final_state = last.expect("at least one iteration");
    // frozen bits are fixed in the readout
    let index = final_state
        .argmax_where(|i| ansatz.admits(i))
        .unwrap_or_else(|| final_state.argmax());
    Ok(VqpmResult {
        found: Bitstring::from_index(oracle.n(), index),
        found_objective: f64::NAN,
        iterations: trace.len(),
        termination,
        trace,
        final_state,
    })
}

/// Exact power iteration on an explicit oracle. Stops once the largest
/// basis-state probability reaches `cfg.success_threshold`.
pub fn run_exact_on(
    oracle: &DiagonalOracle,
    cfg: &VqpmConfig,
    reference: Option<&Bitstring>,
) -> Result<VqpmResult> {
    cfg.validate()?;
    let n = oracle.n();
    let mut state = StateVector::uniform(n);
    let mut trace = Vec::new();
    let mut termination = Termination::MaxIters;

    for iteration in 1..=cfg.max_iters {
        let (post, p0) = power_step(&state, oracle)?;
        state = post;
        trace.push(IterationRecord {
            iteration,
            p0,
            marginals: marginals(&state),
            frozen: vec![false; n],
            success_prob: reference.map(|r| state.probability(r.index())),
        });
        if state.probability(state.argmax()) >= cfg.success_threshold {
            termination = Termination::SuccessThreshold;
            break;
        }
    }

    Ok(VqpmResult {
        found: Bitstring::from_index(n, state.argmax()),
        found_objective: f64::NAN,
        iterations: trace.len(),
        termination,
        trace,
        final_state: state,
    })
}
