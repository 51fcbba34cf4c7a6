//! The diagonal phase unitary of a scaled problem.
//!
//! Two independent constructions are provided: [`build_oracle`] evaluates
//! the shifted eigenphase of every basis state directly, while
//! [`build_gate_list`] / [`apply_gate_list`] compose single-qubit and
//! controlled phase gates. They agree to rounding error.

use num_complex::Complex64;

use crate::error::{Result, VqpmError};
use crate::par;
use crate::qubo::{bit_of, Bitstring, ScaledProblem, MAX_ENUMERATION_QUBITS};
use crate::state::StateVector;

/// Shifted eigenphase `λ̃ = objective(scaled, x) + π/4`.
pub fn eigenphase(s: &ScaledProblem, x: &Bitstring) -> Result<f64> {
    Ok(s.base.objective(x)? + s.phase_shift)
}

/// Diagonal unitary `U = diag(e^{iλ̃_j})`, indexed with `x_0` as the most
/// significant bit.
#[derive(Clone, Debug)]
pub struct DiagonalOracle {
    n: usize,
    phases: Vec<f64>,
    // 1 + e^{iλ̃_j}, cached for the power step
    plus_identity: Vec<Complex64>,
}

impl DiagonalOracle {
    pub fn from_phases(n: usize, phases: Vec<f64>) -> Result<Self> {
        if n > MAX_ENUMERATION_QUBITS {
            return Err(VqpmError::Capacity {
                n,
                limit: MAX_ENUMERATION_QUBITS,
            });
        }
        VqpmError::check_dim(1 << n, phases.len())?;
        let mut plus_identity = vec![Complex64::new(0.0, 0.0); phases.len()];
        par::fill_indexed(&mut plus_identity, |j| {
            Complex64::new(1.0, 0.0) + Complex64::from_polar(1.0, phases[j])
        });
        Ok(DiagonalOracle {
            n,
            phases,
            plus_identity,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.phases.len()
    }

    pub fn phases(&self) -> &[f64] {
        &self.phases
    }

    pub fn phase(&self, x: &Bitstring) -> f64 {
        self.phases[x.index()]
    }

    /// Diagonal of `I + U`.
    pub fn plus_identity(&self) -> &[Complex64] {
        &self.plus_identity
    }

    /// Multiplies `v` elementwise by `e^{iλ̃_j}`.
    pub fn apply(&self, v: &StateVector) -> Result<StateVector> {
        VqpmError::check_dim(self.dim(), v.dim())?;
        let mut out = v.clone();
        par::for_each_indexed(out.amplitudes_mut(), |j, a| {
            *a *= Complex64::from_polar(1.0, self.phases[j])
        });
        Ok(out)
    }
}

pub fn build_oracle(s: &ScaledProblem) -> Result<DiagonalOracle> {
    let n = s.n();
    if n > MAX_ENUMERATION_QUBITS {
        return Err(VqpmError::Capacity {
            n,
            limit: MAX_ENUMERATION_QUBITS,
        });
    }
    let dense = s.base.dense();
    let mut phases = vec![0.0; 1 << n];
    par::fill_indexed(&mut phases, |j| dense.eval_index(j) + s.phase_shift);
    DiagonalOracle::from_phases(n, phases)
}

/// Difference between the two smallest entries of the phase sequence.
/// A repeated minimum gives zero.
pub fn eigengap(o: &DiagonalOracle) -> f64 {
    let (mut lo, mut second) = (f64::INFINITY, f64::INFINITY);
    for &p in o.phases() {
        if p < lo {
            second = lo;
            lo = p;
        } else if p < second {
            second = p;
        }
    }
    second - lo
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Gate {
    /// `diag(1, e^{i·angle})` on `target`.
    Phase { target: usize, angle: f64 },
    /// Phase gate on `target` applied when `control` is 1.
    ControlledPhase {
        control: usize,
        target: usize,
        angle: f64,
    },
    GlobalPhase(f64),
}

#[derive(Clone, Debug, PartialEq)]
pub struct GateList {
    pub n: usize,
    pub gates: Vec<Gate>,
}

impl GateList {
    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    pub fn count_phase(&self) -> usize {
        self.gates.iter().filter(|g| matches!(g, Gate::Phase { .. })).count()
    }

    pub fn count_controlled(&self) -> usize {
        self.gates
            .iter()
            .filter(|g| matches!(g, Gate::ControlledPhase { .. }))
            .count()
    }
}

/// One phase gate per qubit, one controlled phase per nonzero `q_ij`
/// (control `i`, target `j`), then the global phase.
pub fn build_gate_list(s: &ScaledProblem) -> GateList {
    let mut gates: Vec<Gate> = s
        .base
        .linear()
        .iter()
        .enumerate()
        .map(|(target, &angle)| Gate::Phase { target, angle })
        .collect();
    gates.extend(
        s.base
            .quadratic()
            .iter()
            .filter(|(_, &v)| v != 0.0)
            .map(|(&(control, target), &angle)| Gate::ControlledPhase {
                control,
                target,
                angle,
            }),
    );
    gates.push(Gate::GlobalPhase(s.phase_shift));
    GateList { n: s.n(), gates }
}

pub fn apply_gate_list(g: &GateList, v: &StateVector) -> Result<StateVector> {
    VqpmError::check_dim(g.n, v.n())?;
    let n = g.n;
    let mut out = v.clone();
    for gate in &g.gates {
        match *gate {
            Gate::Phase { target, angle } => {
                let f = Complex64::from_polar(1.0, angle);
                par::for_each_indexed(out.amplitudes_mut(), |j, a| {
                    if bit_of(j, n, target) {
                        *a *= f;
                    }
                });
            }
            Gate::ControlledPhase {
                control,
                target,
                angle,
            } => {
                let f = Complex64::from_polar(1.0, angle);
                par::for_each_indexed(out.amplitudes_mut(), |j, a| {
                    if bit_of(j, n, control) && bit_of(j, n, target) {
                        *a *= f;
                    }
                });
            }
            Gate::GlobalPhase(angle) => {
                let f = Complex64::from_polar(1.0, angle);
                par::for_each_indexed(out.amplitudes_mut(), |_, a| *a *= f);
            }
        }
    }
    Ok(out)
}
