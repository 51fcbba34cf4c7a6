//! Dense state vector over `2^n` computational basis states.

use num_complex::Complex64;

use crate::error::{Result, VqpmError};
use crate::par;
use crate::qubo::{bit_of, Bitstring, MAX_ENUMERATION_QUBITS};

#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    n: usize,
    amplitudes: Vec<Complex64>,
}

impl StateVector {
    pub fn from_amplitudes(n: usize, amplitudes: Vec<Complex64>) -> Result<Self> {
        if n > MAX_ENUMERATION_QUBITS {
            return Err(VqpmError::Capacity {
                n,
                limit: MAX_ENUMERATION_QUBITS,
            });
        }
        VqpmError::check_dim(1 << n, amplitudes.len())?;
        Ok(StateVector { n, amplitudes })
    }

    /// Computational basis state `|x⟩`.
    pub fn basis(x: &Bitstring) -> Self {
        let n = x.len();
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); 1 << n];
        amplitudes[x.index()] = Complex64::new(1.0, 0.0);
        StateVector { n, amplitudes }
    }

    /// Equal superposition over all basis states.
    pub fn uniform(n: usize) -> Self {
        let dim = 1usize << n;
        let a = Complex64::new(1.0 / (dim as f64).sqrt(), 0.0);
        StateVector {
            n,
            amplitudes: vec![a; dim],
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn amplitudes_mut(&mut self) -> &mut [Complex64] {
        &mut self.amplitudes
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amplitudes
    }

    pub fn probability(&self, index: usize) -> f64 {
        self.amplitudes[index].norm_sqr()
    }

    pub fn norm_sqr(&self) -> f64 {
        par::ordered_sum(par::map_chunks(&self.amplitudes, |_, c| {
            c.iter().map(|a| a.norm_sqr()).sum::<f64>()
        }))
    }

    /// Scales to unit norm. A zero vector is left unchanged.
    pub fn normalize(&mut self) {
        let norm = self.norm_sqr().sqrt();
        if norm > 0.0 {
            let inv = 1.0 / norm;
            par::for_each_indexed(&mut self.amplitudes, |_, a| *a *= inv);
        }
    }

    /// Number of basis states with nonzero amplitude.
    pub fn support_size(&self) -> usize {
        self.amplitudes.iter().filter(|a| a.norm_sqr() > 0.0).count()
    }

    /// Per-qubit probability of reading 1; entry `j` sums `|a_x|²` over `x_j = 1`.
    pub fn marginals(&self) -> Vec<f64> {
        let n = self.n;
        let parts = par::map_chunks(&self.amplitudes, |offset, chunk| {
            let mut acc = vec![0.0; n];
            for (k, a) in chunk.iter().enumerate() {
                let p = a.norm_sqr();
                let index = offset + k;
                for (j, slot) in acc.iter_mut().enumerate() {
                    if bit_of(index, n, j) {
                        *slot += p;
                    }
                }
            }
            acc
        });
        let mut total = vec![0.0; n];
        for part in parts {
            for (t, v) in total.iter_mut().zip(part) {
                *t += v;
            }
        }
        total
    }

    /// Basis index of largest probability; ties go to the smallest index.
    pub fn argmax(&self) -> usize {
        self.argmax_where(|_| true).expect("state vector is non-empty")
    }

    /// Like [`StateVector::argmax`] restricted to indices passing `keep`.
    pub fn argmax_where(&self, keep: impl Fn(usize) -> bool + Sync + Send) -> Option<usize> {
        let parts = par::map_chunks(&self.amplitudes, |offset, chunk| {
            let mut best: Option<(usize, f64)> = None;
            for (k, a) in chunk.iter().enumerate() {
                let index = offset + k;
                if !keep(index) {
                    continue;
                }
                let p = a.norm_sqr();
                if best.is_none_or(|(_, bp)| p > bp) {
                    best = Some((index, p));
                }
            }
            best
        });
        parts
            .into_iter()
            .flatten()
            .fold(None, |best: Option<(usize, f64)>, cand| match best {
                Some((_, bp)) if cand.1 <= bp => best,
                _ => Some(cand),
            })
            .map(|(i, _)| i)
    }

    /// Largest deviation between amplitudes of two equal-size states.
    pub fn max_deviation(&self, other: &StateVector) -> Result<f64> {
        VqpmError::check_dim(self.dim(), other.dim())?;
        Ok(self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }
}
