//! Emulation of the mean-field multi-copy nonlinear solver.
//!
//! The dynamical value x is carried by N identical two-component copies
//! (1, x). An interaction operator couples the copies so that its projection
//! onto any single copy, with all spectators contracted against e0 = (1, 0),
//! reproduces the nonlinear forward-Euler update exactly on product states.
//! Repeated steps entangle the copies and accumulate mean-field error, which
//! shrinks as the number of copies grows.
//!
//! The same evolution can be phrased as one block lower-bidiagonal linear
//! system over the whole history of the integration; forward substitution is
//! its exact inverse, and [`residual`] checks the two formulations against
//! each other.

use rand::Rng;

use crate::error::{Error, Result};
use crate::ode::OdeSpec;
use crate::rng;

/// Streaming evolution cap: tensors up to 2^20 entries.
pub const MAX_COPIES: usize = 20;
/// Entry budget for the explicit block system: (T+1)·2^N ≤ 2^24.
pub const BLOCK_SYSTEM_BUDGET: u64 = 1 << 24;

/// Encode a scalar as a two-component copy vector (1, x).
///
/// Component 0 is the reference amplitude, component 1 carries the value.
pub fn encode_copy(x: f64) -> [f64; 2] {
    [1.0, x]
}

/// Real tensor-product state of N two-component copies.
///
/// Indexing follows the register convention of [`crate::qubit`]: the tensor
/// index is a big-endian bit string with copy 0 as the most significant bit.
#[derive(Debug, Clone, PartialEq)]
pub struct CopyEnsembleState {
    n_copies: usize,
    tensor: Vec<f64>,
}

impl CopyEnsembleState {
    pub fn from_tensor(n_copies: usize, tensor: Vec<f64>) -> Result<Self> {
        check_copies(n_copies)?;
        if tensor.len() != 1 << n_copies {
            return Err(Error::Domain(format!(
                "expected {} tensor entries for {} copies, got {}",
                1u64 << n_copies,
                n_copies,
                tensor.len()
            )));
        }
        Ok(CopyEnsembleState { n_copies, tensor })
    }

    pub fn n_copies(&self) -> usize {
        self.n_copies
    }

    pub fn tensor(&self) -> &[f64] {
        &self.tensor
    }

    fn copy_bit(&self, copy_index: usize) -> usize {
        1 << (self.n_copies - 1 - copy_index)
    }
}

fn check_copies(n_copies: usize) -> Result<()> {
    if n_copies == 0 {
        return Err(Error::Domain("n_copies must be positive".into()));
    }
    if n_copies > MAX_COPIES {
        return Err(Error::Resource {
            required: 1u64 << n_copies,
            budget: 1u64 << MAX_COPIES,
        });
    }
    Ok(())
}

/// Tensor the copy vector (1, x) with itself N times.
pub fn encode_ensemble(x: f64, n_copies: usize) -> Result<CopyEnsembleState> {
    check_copies(n_copies)?;
    let dim = 1usize << n_copies;
    let copy = encode_copy(x);
    let mut tensor = vec![0.0; dim];
    for (idx, slot) in tensor.iter_mut().enumerate() {
        let mut v = 1.0;
        for c in 0..n_copies {
            v *= copy[(idx >> (n_copies - 1 - c)) & 1];
        }
        *slot = v;
    }
    Ok(CopyEnsembleState { n_copies, tensor })
}

/// The copy-coupling operator.
///
/// F̂ = λ Σᵢ n̂ᵢ − (α / P) Σᵢ Σ_{j<k, j,k≠i} n̂ᵢ σ⁻ⱼ σ⁻ₖ with n̂ = |1⟩⟨1|,
/// σ⁻ = |0⟩⟨1| and P = (N−1)(N−2)/2 the number of spectator pairs per copy.
/// Terms are summed in ascending (i, j, k) order, so results are bitwise
/// reproducible.
#[derive(Debug, Clone, PartialEq)]
pub struct InteractionOperator {
    n_copies: usize,
    linear_weight: f64,
    cubic_weight: f64,
}

impl InteractionOperator {
    pub fn n_copies(&self) -> usize {
        self.n_copies
    }

    pub fn linear_weight(&self) -> f64 {
        self.linear_weight
    }

    pub fn cubic_weight(&self) -> f64 {
        self.cubic_weight
    }

    /// Spectator pairs per copy: C(N−1, 2).
    pub fn pair_count(&self) -> usize {
        (self.n_copies - 1) * (self.n_copies - 2) / 2
    }

    /// Number of structural terms (linear, cubic).
    pub fn term_counts(&self) -> (usize, usize) {
        let cubic = if self.cubic_weight != 0.0 {
            self.n_copies * self.pair_count()
        } else {
            0
        };
        (self.n_copies, cubic)
    }

    /// Apply F̂ to a raw tensor, term by term, without materialising the
    /// dense matrix.
    pub fn apply(&self, tensor: &[f64]) -> Result<Vec<f64>> {
        let n = self.n_copies;
        let dim = 1usize << n;
        if tensor.len() != dim {
            return Err(Error::Domain(format!(
                "tensor length {} does not match {} copies",
                tensor.len(),
                n
            )));
        }
        let mut out = vec![0.0; dim];

        // Σᵢ n̂ᵢ keeps the entry and counts the set copy bits. Summing the
        // i-terms in ascending order collapses to one integer multiply.
        for (idx, slot) in out.iter_mut().enumerate() {
            *slot = self.linear_weight * (idx.count_ones() as f64) * tensor[idx];
        }

        if self.cubic_weight != 0.0 {
            let coeff = -self.cubic_weight / self.pair_count() as f64;
            for i in 0..n {
                let bit_i = 1usize << (n - 1 - i);
                for j in 0..n {
                    if j == i {
                        continue;
                    }
                    for k in (j + 1)..n {
                        if k == i {
                            continue;
                        }
                        let bit_j = 1usize << (n - 1 - j);
                        let bit_k = 1usize << (n - 1 - k);
                        let pair = bit_j | bit_k;
                        // n̂ᵢ σ⁻ⱼ σ⁻ₖ: rows with copy i up and copies j,k
                        // down read from the column with j,k up.
                        for idx in 0..dim {
                            if idx & bit_i != 0 && idx & pair == 0 {
                                out[idx] += coeff * tensor[idx | pair];
                            }
                        }
                    }
                }
            }
        }
        Ok(out)
    }
}

/// Construct the interaction operator matching an ODE's coefficients.
pub fn build_interaction(ode: &OdeSpec, n_copies: usize) -> Result<InteractionOperator> {
    ode.validate()?;
    check_copies(n_copies)?;
    if ode.cubic_coeff != 0.0 && n_copies < 3 {
        return Err(Error::Config(format!(
            "the cubic term needs at least 3 copies (one active, two spectators); got {n_copies}"
        )));
    }
    Ok(InteractionOperator {
        n_copies,
        linear_weight: ode.linear_coeff,
        cubic_weight: ode.cubic_coeff,
    })
}

/// One forward-Euler step in copy space: (1 + dt·F̂)·state.
pub fn step(state: &CopyEnsembleState, op: &InteractionOperator, dt: f64) -> Result<CopyEnsembleState> {
    if op.n_copies != state.n_copies {
        return Err(Error::Domain(format!(
            "operator on {} copies applied to state with {}",
            op.n_copies, state.n_copies
        )));
    }
    let image = op.apply(&state.tensor)?;
    let tensor = state
        .tensor
        .iter()
        .zip(&image)
        .map(|(v, f)| v + dt * f)
        .collect();
    Ok(CopyEnsembleState {
        n_copies: state.n_copies,
        tensor,
    })
}

/// Two-component marginal of one copy, spectators contracted with e0 = (1, 0).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Marginal {
    pub s0: f64,
    pub s1: f64,
    pub x_est: f64,
}

const READOUT_TOL: f64 = 1e-14;

/// Contract all spectator copies with e0 and read the remaining copy.
pub fn marginal(state: &CopyEnsembleState, copy_index: usize) -> Result<Marginal> {
    if copy_index >= state.n_copies {
        return Err(Error::Domain(format!(
            "copy index {} out of range for {} copies",
            copy_index, state.n_copies
        )));
    }
    // e0 selects component 0 of every spectator, so only two entries survive.
    let s0 = state.tensor[0];
    let s1 = state.tensor[state.copy_bit(copy_index)];
    if s0.abs() < READOUT_TOL {
        return Err(Error::ReadoutSingular(format!(
            "reference amplitude {s0} vanishes; x cannot be read out"
        )));
    }
    Ok(Marginal {
        s0,
        s1,
        x_est: s1 / s0,
    })
}

/// The copy-space states at every time step.
#[derive(Debug, Clone, PartialEq)]
pub struct HistoryState {
    pub blocks: Vec<CopyEnsembleState>,
}

impl HistoryState {
    /// Marginal readout of copy 0 at every step.
    pub fn trajectory(&self, dt: f64) -> Result<Vec<(f64, f64)>> {
        self.blocks
            .iter()
            .enumerate()
            .map(|(k, b)| Ok((k as f64 * dt, marginal(b, 0)?.x_est)))
            .collect()
    }
}

/// Evolve the encoded initial state through all T steps.
///
/// Equivalent to inverting the block history system by forward substitution;
/// blocks are generated one step at a time and the dense system is never
/// built.
pub fn solve_history(ode: &OdeSpec, n_copies: usize) -> Result<HistoryState> {
    let op = build_interaction(ode, n_copies)?;
    let mut blocks = Vec::with_capacity(ode.steps + 1);
    blocks.push(encode_ensemble(ode.x0, n_copies)?);
    for _ in 0..ode.steps {
        let next = step(blocks.last().expect("nonempty"), &op, ode.dt)?;
        blocks.push(next);
    }
    Ok(HistoryState { blocks })
}

/// Explicit sparse form of the history-state linear system.
///
/// Diagonal blocks are the identity; every subdiagonal block is
/// −(1 + Δt·F̂), stored as sorted (row, col, value) triplets. The right-hand
/// side is the encoded initial tensor followed by zero blocks.
#[derive(Debug, Clone)]
pub struct BlockHistorySystem {
    pub block_dim: usize,
    pub n_blocks: usize,
    /// Sparse entries of the subdiagonal block, sorted by (row, col).
    pub subdiagonal: Vec<(usize, usize, f64)>,
    /// First block of the right-hand side; the remaining blocks are zero.
    pub rhs_first_block: Vec<f64>,
}

/// Build the explicit block system, subject to the entry budget.
pub fn assemble_block_system(ode: &OdeSpec, n_copies: usize) -> Result<BlockHistorySystem> {
    assemble_block_system_with_budget(ode, n_copies, BLOCK_SYSTEM_BUDGET)
}

pub fn assemble_block_system_with_budget(
    ode: &OdeSpec,
    n_copies: usize,
    budget: u64,
) -> Result<BlockHistorySystem> {
    let op = build_interaction(ode, n_copies)?;
    let dim = 1usize << n_copies;
    let required = (ode.steps as u64 + 1) * dim as u64;
    if required > budget {
        return Err(Error::Resource { required, budget });
    }

    let mut entries: std::collections::BTreeMap<(usize, usize), f64> =
        std::collections::BTreeMap::new();
    // -(1 + dt·λ·n̂-count) on the block diagonal.
    for idx in 0..dim {
        entries.insert(
            (idx, idx),
            -(1.0 + ode.dt * op.linear_weight() * idx.count_ones() as f64),
        );
    }
    if op.cubic_weight() != 0.0 {
        let n = n_copies;
        let coeff = ode.dt * op.cubic_weight() / op.pair_count() as f64;
        for i in 0..n {
            let bit_i = 1usize << (n - 1 - i);
            for j in 0..n {
                if j == i {
                    continue;
                }
                for k in (j + 1)..n {
                    if k == i {
                        continue;
                    }
                    let pair = (1usize << (n - 1 - j)) | (1usize << (n - 1 - k));
                    for row in 0..dim {
                        if row & bit_i != 0 && row & pair == 0 {
                            *entries.entry((row, row | pair)).or_insert(0.0) += coeff;
                        }
                    }
                }
            }
        }
    }

    Ok(BlockHistorySystem {
        block_dim: dim,
        n_blocks: ode.steps + 1,
        subdiagonal: entries.into_iter().map(|((r, c), v)| (r, c, v)).collect(),
        rhs_first_block: encode_ensemble(ode.x0, n_copies)?.tensor,
    })
}

impl BlockHistorySystem {
    fn apply_subdiagonal(&self, block: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.block_dim];
        for &(r, c, v) in &self.subdiagonal {
            out[r] += v * block[c];
        }
        out
    }
}

/// Euclidean norm of (matrix·candidate − rhs).
pub fn residual(system: &BlockHistorySystem, candidate: &HistoryState) -> Result<f64> {
    if candidate.blocks.len() != system.n_blocks {
        return Err(Error::Domain(format!(
            "candidate has {} blocks, system has {}",
            candidate.blocks.len(),
            system.n_blocks
        )));
    }
    for b in &candidate.blocks {
        if b.tensor.len() != system.block_dim {
            return Err(Error::Domain("block dimension mismatch".into()));
        }
    }

    let mut sq = 0.0;
    // Row block 0: x_0 − x_ini.
    for (v, r) in candidate.blocks[0]
        .tensor
        .iter()
        .zip(&system.rhs_first_block)
    {
        sq += (v - r) * (v - r);
    }
    // Row block k: −(1 + Δt·F̂)x_{k−1} + x_k.
    for k in 1..system.n_blocks {
        let prev = system.apply_subdiagonal(&candidate.blocks[k - 1].tensor);
        for (p, v) in prev.iter().zip(&candidate.blocks[k].tensor) {
            sq += (p + v) * (p + v);
        }
    }
    Ok(sq.sqrt())
}

/// Born-sample one copy's marginal and estimate |x| from outcome frequencies.
///
/// The sign of x is not recoverable: sampling sees only squared amplitudes.
pub fn sample_readout(
    state: &CopyEnsembleState,
    copy_index: usize,
    shots: u64,
    seed: u64,
) -> Result<f64> {
    if shots == 0 {
        return Err(Error::Domain("shots must be at least 1".into()));
    }
    let m = marginal(state, copy_index)?;
    let norm_sq = m.s0 * m.s0 + m.s1 * m.s1;
    let p1 = m.s1 * m.s1 / norm_sq;

    let mut rng = rng::seeded(seed);
    let mut ones = 0u64;
    for _ in 0..shots {
        if rng.gen::<f64>() < p1 {
            ones += 1;
        }
    }
    let zeros = shots - ones;
    if zeros == 0 {
        return Err(Error::ReadoutSingular(
            "no reference outcomes observed; |x| estimate diverges".into(),
        ));
    }
    Ok((ones as f64 / zeros as f64).sqrt())
}

/// Per-step absolute deviation of the copy-solver readout from classical
/// forward Euler.
pub fn deviation_profile(ode: &OdeSpec, n_copies: usize) -> Result<Vec<(usize, f64)>> {
    let op = build_interaction(ode, n_copies)?;
    let mut state = encode_ensemble(ode.x0, n_copies)?;
    let mut x_euler = ode.x0;
    let mut profile = Vec::with_capacity(ode.steps + 1);
    profile.push((0, (marginal(&state, 0)?.x_est - x_euler).abs()));
    for k in 1..=ode.steps {
        state = step(&state, &op, ode.dt)?;
        x_euler += ode.dt * ode.rhs(x_euler);
        profile.push((k, (marginal(&state, 0)?.x_est - x_euler).abs()));
    }
    Ok(profile)
}
