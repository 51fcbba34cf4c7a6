//! QUBO instances: representation, scaling, random generation, the problem
//! file format, and an exhaustive reference solver.
//!
//! The objective is `f(x) = Σ c_i x_i + Σ_{i<j} q_ij x_i x_j` over
//! `x ∈ {0,1}^n`. Basis indices put `x_0` in the most significant bit, so
//! the bitstring `0011` is index 3 for `n = 4`.

use std::collections::BTreeMap;
use std::f64::consts::FRAC_PI_4;
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Result, VqpmError};
use crate::par;

/// Largest `n` for anything that enumerates all `2^n` basis states.
pub const MAX_ENUMERATION_QUBITS: usize = 26;

/// Assignment `x_0 … x_{n-1}` of the binary parameters.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Bitstring(Vec<bool>);

impl Bitstring {
    pub fn new(bits: Vec<bool>) -> Self {
        Bitstring(bits)
    }

    pub fn zeros(n: usize) -> Self {
        Bitstring(vec![false; n])
    }

    /// Decodes a basis index with `x_0` as the most significant bit.
    pub fn from_index(n: usize, index: usize) -> Self {
        Bitstring((0..n).map(|j| bit_of(index, n, j)).collect())
    }

    /// Basis index with `x_0` as the most significant bit.
    pub fn index(&self) -> usize {
        self.0.iter().fold(0, |acc, &b| (acc << 1) | b as usize)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn bits(&self) -> &[bool] {
        &self.0
    }

    pub fn get(&self, j: usize) -> bool {
        self.0[j]
    }
}

impl fmt::Display for Bitstring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.0 {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl FromStr for Bitstring {
    type Err = VqpmError;

    fn from_str(s: &str) -> Result<Self> {
        s.chars()
            .map(|ch| match ch {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(VqpmError::Parse(format!("invalid bit character {other:?}"))),
            })
            .collect::<Result<Vec<_>>>()
            .map(Bitstring)
    }
}

/// Value of qubit `j` in basis index `index` of an `n`-qubit register.
#[inline]
pub fn bit_of(index: usize, n: usize, j: usize) -> bool {
    (index >> (n - 1 - j)) & 1 == 1
}

/// A quadratic unconstrained binary optimization problem.
#[derive(Clone, PartialEq, Debug)]
pub struct QuboInstance {
    n: usize,
    linear: Vec<f64>,
    quadratic: BTreeMap<(usize, usize), f64>,
}

impl QuboInstance {
    /// Builds an instance, checking index bounds, ordering and finiteness.
    pub fn new(
        n: usize,
        linear: Vec<f64>,
        quadratic: BTreeMap<(usize, usize), f64>,
    ) -> Result<Self> {
        if n == 0 {
            return Err(VqpmError::Argument("n must be at least 1".into()));
        }
        if linear.len() != n {
            return Err(VqpmError::Argument(format!(
                "expected {n} linear coefficients, got {}",
                linear.len()
            )));
        }
        if let Some((i, v)) = linear.iter().enumerate().find(|(_, v)| !v.is_finite()) {
            return Err(VqpmError::Argument(format!("c[{i}] = {v} is not finite")));
        }
        for (&(i, j), v) in &quadratic {
            if i >= j {
                return Err(VqpmError::Argument(format!("lower-triangular key ({i}, {j})")));
            }
            if j >= n {
                return Err(VqpmError::Argument(format!("index out of range: ({i}, {j}) with n = {n}")));
            }
            if !v.is_finite() {
                return Err(VqpmError::Argument(format!("q[({i}, {j})] = {v} is not finite")));
            }
        }
        Ok(QuboInstance {
            n,
            linear,
            quadratic,
        })
    }

    /// Builds an instance from an upper-triangular matrix whose diagonal
    /// holds the linear terms. Zero off-diagonal entries are dropped.
    pub fn from_upper_matrix(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        let mut linear = Vec::with_capacity(n);
        let mut quadratic = BTreeMap::new();
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(VqpmError::Argument(format!("row {i} has {} entries, expected {n}", row.len())));
            }
            linear.push(row[i]);
            for (j, &v) in row.iter().enumerate() {
                if j < i && v != 0.0 {
                    return Err(VqpmError::Argument(format!("lower-triangular key ({i}, {j})")));
                }
                if j > i && v != 0.0 {
                    quadratic.insert((i, j), v);
                }
            }
        }
        Self::new(n, linear, quadratic)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn linear(&self) -> &[f64] {
        &self.linear
    }

    pub fn quadratic(&self) -> &BTreeMap<(usize, usize), f64> {
        &self.quadratic
    }

    pub fn q(&self, i: usize, j: usize) -> f64 {
        let key = if i < j { (i, j) } else { (j, i) };
        self.quadratic.get(&key).copied().unwrap_or(0.0)
    }

    /// Σ|c_i| + Σ|q_ij|.
    pub fn abs_coefficient_sum(&self) -> f64 {
        self.linear.iter().map(|v| v.abs()).sum::<f64>()
            + self.quadratic.values().map(|v| v.abs()).sum::<f64>()
    }

    /// Returns a copy with every coefficient multiplied by `factor`.
    pub fn scaled_by(&self, factor: f64) -> QuboInstance {
        QuboInstance {
            n: self.n,
            linear: self.linear.iter().map(|v| v * factor).collect(),
            quadratic: self.quadratic.iter().map(|(&k, v)| (k, v * factor)).collect(),
        }
    }

    /// Evaluates the objective for `x`.
    pub fn objective(&self, x: &Bitstring) -> Result<f64> {
        VqpmError::check_dim(self.n, x.len())?;
        let lin: f64 = self
            .linear
            .iter()
            .zip(x.bits())
            .filter(|(_, &b)| b)
            .fold(0.0, |acc, (c, _)| acc + c);
        let quad: f64 = self
            .quadratic
            .iter()
            .filter(|(&(i, j), _)| x.get(i) && x.get(j))
            .fold(0.0, |acc, (_, v)| acc + v);
        Ok(lin + quad)
    }

    /// Change in the objective when bit `k` of `x` is flipped from 0 to 1.
    pub fn flip_gain(&self, x: &Bitstring, k: usize) -> f64 {
        let mut gain = self.linear[k];
        for i in 0..self.n {
            if i != k && x.get(i) {
                gain += self.q(i, k);
            }
        }
        gain
    }

    pub(crate) fn dense(&self) -> DenseQubo {
        let n = self.n;
        let mut upper = vec![0.0; n * n];
        for (&(i, j), &v) in &self.quadratic {
            upper[i * n + j] = v;
        }
        DenseQubo {
            n,
            linear: self.linear.clone(),
            upper,
        }
    }
}

/// Row-major upper-triangular coefficient table for per-index evaluation.
pub(crate) struct DenseQubo {
    n: usize,
    linear: Vec<f64>,
    upper: Vec<f64>,
}

impl DenseQubo {
    /// Objective at basis index `index`.
    pub(crate) fn eval_index(&self, index: usize) -> f64 {
        let n = self.n;
        let mut y = 0.0;
        for i in 0..n {
            if !bit_of(index, n, i) {
                continue;
            }
            y += self.linear[i];
            let row = &self.upper[i * n..(i + 1) * n];
            for (j, &q) in row.iter().enumerate().skip(i + 1) {
                if bit_of(index, n, j) {
                    y += q;
                }
            }
        }
        y
    }
}

/// A problem scaled so every objective value lies in `[-π/4, π/4]`, plus the
/// global phase shift that maps it into `[0, π/2]`.
#[derive(Clone, PartialEq, Debug)]
pub struct ScaledProblem {
    pub base: QuboInstance,
    pub original: QuboInstance,
    pub scale_factor: f64,
    pub phase_shift: f64,
}

impl ScaledProblem {
    pub fn n(&self) -> usize {
        self.base.n()
    }

    /// Objective of `x` on the unscaled problem.
    pub fn raw_objective(&self, x: &Bitstring) -> Result<f64> {
        self.original.objective(x)
    }
}

/// Multiplies every coefficient by `π/4 / Σ|coefficients|`.
pub fn scale_problem(p: &QuboInstance) -> Result<ScaledProblem> {
    let total = p.abs_coefficient_sum();
    if total == 0.0 {
        return Err(VqpmError::DegenerateProblem);
    }
    let scale_factor = FRAC_PI_4 / total;
    Ok(ScaledProblem {
        base: p.scaled_by(scale_factor),
        original: p.clone(),
        scale_factor,
        phase_shift: FRAC_PI_4,
    })
}

/// Draws every `c_i` and every `q_ij` (dense upper triangle) i.i.d. from
/// U[-1, 1]. Linear terms are drawn first, then `q_ij` in row-major order.
pub fn generate_random(n: usize, seed: u64) -> Result<QuboInstance> {
    if n < 1 {
        return Err(VqpmError::Argument("n must be at least 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let linear = (0..n).map(|_| rng.random_range(-1.0..=1.0)).collect();
    let mut quadratic = BTreeMap::new();
    for i in 0..n {
        for j in i + 1..n {
            quadratic.insert((i, j), rng.random_range(-1.0..=1.0));
        }
    }
    QuboInstance::new(n, linear, quadratic)
}

/// Exhaustive minimization. Ties go to the smallest basis index.
///
/// The search walks the Gray code in fixed blocks, updating the objective
/// incrementally per flipped bit; the winner is re-evaluated exactly.
pub fn brute_force_solve(p: &QuboInstance) -> Result<(Bitstring, f64)> {
    let n = p.n();
    if n > MAX_ENUMERATION_QUBITS {
        return Err(VqpmError::Capacity {
            n,
            limit: MAX_ENUMERATION_QUBITS,
        });
    }
    let dense = p.dense();
    // symmetric coupling rows so a flip of bit k reads one row
    let mut coupling = vec![0.0; n * n];
    for (&(i, j), &v) in p.quadratic() {
        coupling[i * n + j] = v;
        coupling[j * n + i] = v;
    }
    let tol = 1e-12 * p.abs_coefficient_sum().max(1.0);
    let better = |cand: (f64, usize), best: (f64, usize)| {
        cand.0 < best.0 - tol || (cand.0 <= best.0 + tol && cand.1 < best.1)
    };

    let size = 1usize << n;
    let block_best = par::map_index_blocks(size, |range| {
        let gray = |g: usize| g ^ (g >> 1);
        let mut index = gray(range.start);
        let mut value = dense.eval_index(index);
        let mut best = (value, index);
        for g in range.start + 1..range.end {
            // bit flipped between gray(g-1) and gray(g), as a register position
            let pos = g.trailing_zeros() as usize;
            let k = n - 1 - pos;
            let row = &coupling[k * n..(k + 1) * n];
            let mut delta = dense.linear[k];
            for (i, &q) in row.iter().enumerate() {
                if q != 0.0 && bit_of(index, n, i) {
                    delta += q;
                }
            }
            if bit_of(index, n, k) {
                value -= delta;
            } else {
                value += delta;
            }
            index ^= 1 << pos;
            if better((value, index), best) {
                best = (value, index);
            }
        }
        best
    });

    let mut best = block_best[0];
    for &cand in &block_best[1..] {
        if better(cand, best) {
            best = cand;
        }
    }
    let x = Bitstring::from_index(n, best.1);
    let value = p.objective(&x)?;
    Ok((x, value))
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ProblemFile {
    n: usize,
    c: Vec<f64>,
    q: Vec<QuadraticEntry>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct QuadraticEntry {
    i: usize,
    j: usize,
    value: f64,
}

/// Parses a problem file (JSON object with `n`, `c`, `q`).
pub fn parse_problem(text: &str) -> Result<QuboInstance> {
    let file: ProblemFile =
        serde_json::from_str(text).map_err(|e| VqpmError::Parse(e.to_string()))?;
    if file.n == 0 {
        return Err(VqpmError::Parse("n must be at least 1".into()));
    }
    if file.c.len() != file.n {
        return Err(VqpmError::Parse(format!(
            "c has {} entries but n = {}",
            file.c.len(),
            file.n
        )));
    }
    let mut quadratic = BTreeMap::new();
    for (k, entry) in file.q.iter().enumerate() {
        let (i, j) = (entry.i, entry.j);
        if i >= file.n || j >= file.n {
            return Err(VqpmError::Parse(format!(
                "q[{k}]: index out of range ({i}, {j}) for n = {}",
                file.n
            )));
        }
        if i >= j {
            return Err(VqpmError::Parse(format!("q[{k}]: lower-triangular key ({i}, {j})")));
        }
        if quadratic.insert((i, j), entry.value).is_some() {
            return Err(VqpmError::Parse(format!("q[{k}]: duplicate key ({i}, {j})")));
        }
    }
    QuboInstance::new(file.n, file.c, quadratic).map_err(|e| match e {
        VqpmError::Argument(msg) => VqpmError::Parse(msg),
        other => other,
    })
}

/// Serializes to the problem file format. Floats are written in shortest
/// round-trip form, so parsing the output reproduces the instance exactly.
pub fn serialize_problem(p: &QuboInstance) -> String {
    let file = ProblemFile {
        n: p.n,
        c: p.linear.clone(),
        q: p
            .quadratic
            .iter()
            .map(|(&(i, j), &value)| QuadraticEntry { i, j, value })
            .collect(),
    };
    let mut text = serde_json::to_string_pretty(&file).expect("problem serializes");
    text.push('\n');
    text
}
