//! Minimal statevector simulator: basis states, unitary gates, Born-rule
//! measurement, Bloch coordinates, and a two-qubit product-state test.
//!
//! Amplitude ordering is big-endian: the basis index is the bit string of the
//! register with qubit 0 as the most significant bit, so a two-qubit register
//! lists amplitudes in the order |00⟩, |01⟩, |10⟩, |11⟩.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::io::Write;

use num_complex::Complex64;
use rand::Rng;

use crate::error::{Error, Result};
use crate::rng;

const NORM_TOL: f64 = 1e-10;
const UNITARY_TOL: f64 = 1e-12;

/// Complex amplitudes of an n-qubit register.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    n_qubits: usize,
    amplitudes: Vec<Complex64>,
}

impl StateVector {
    /// Build a state from raw amplitudes, checking length and normalisation.
    pub fn new(n_qubits: usize, amplitudes: Vec<Complex64>) -> Result<Self> {
        if n_qubits == 0 {
            return Err(Error::Domain("n_qubits must be positive".into()));
        }
        if amplitudes.len() != 1 << n_qubits {
            return Err(Error::Domain(format!(
                "expected {} amplitudes for {} qubits, got {}",
                1u64 << n_qubits,
                n_qubits,
                amplitudes.len()
            )));
        }
        let state = StateVector {
            n_qubits,
            amplitudes,
        };
        if (state.norm() - 1.0).abs() > NORM_TOL {
            return Err(Error::Validation(format!(
                "state norm {} is not 1",
                state.norm()
            )));
        }
        Ok(state)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes
            .iter()
            .map(|a| a.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// Probability of observing basis index `i`.
    pub fn probability(&self, i: usize) -> f64 {
        self.amplitudes[i].norm_sqr()
    }

    /// Serialize as CSV rows `index,re,im` in ascending index order.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "index,re,im")?;
        for (i, a) in self.amplitudes.iter().enumerate() {
            writeln!(w, "{},{},{}", i, a.re, a.im)?;
        }
        Ok(())
    }
}

/// Computational basis state |index⟩ of an n-qubit register.
pub fn basis_state(n_qubits: usize, index: usize) -> Result<StateVector> {
    if n_qubits == 0 {
        return Err(Error::Domain("n_qubits must be positive".into()));
    }
    let dim = 1usize << n_qubits;
    if index >= dim {
        return Err(Error::Domain(format!(
            "basis index {index} out of range for {n_qubits} qubits"
        )));
    }
    let mut amplitudes = vec![Complex64::new(0.0, 0.0); dim];
    amplitudes[index] = Complex64::new(1.0, 0.0);
    Ok(StateVector {
        n_qubits,
        amplitudes,
    })
}

/// A one- or two-qubit unitary.
#[derive(Debug, Clone)]
pub struct Gate {
    arity: usize,
    matrix: Vec<Complex64>, // row-major, 2^arity x 2^arity
}

impl Gate {
    /// Build a gate from a row-major matrix, checking unitarity.
    pub fn new(arity: usize, matrix: Vec<Complex64>) -> Result<Self> {
        if arity != 1 && arity != 2 {
            return Err(Error::Domain(format!("gate arity {arity} not supported")));
        }
        let dim = 1 << arity;
        if matrix.len() != dim * dim {
            return Err(Error::Domain(format!(
                "expected {}x{} matrix, got {} entries",
                dim,
                dim,
                matrix.len()
            )));
        }
        let gate = Gate { arity, matrix };
        // U·U† must be the identity, elementwise within tolerance.
        for r in 0..dim {
            for c in 0..dim {
                let mut acc = Complex64::new(0.0, 0.0);
                for k in 0..dim {
                    acc += gate.entry(r, k) * gate.entry(c, k).conj();
                }
                let expected = if r == c { 1.0 } else { 0.0 };
                if (acc - expected).norm() > UNITARY_TOL {
                    return Err(Error::Validation("gate matrix is not unitary".into()));
                }
            }
        }
        Ok(gate)
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    fn entry(&self, r: usize, c: usize) -> Complex64 {
        self.matrix[r * (1 << self.arity) + c]
    }

    /// Pauli-X (bit flip).
    pub fn x() -> Gate {
        let z = Complex64::new(0.0, 0.0);
        let o = Complex64::new(1.0, 0.0);
        Gate {
            arity: 1,
            matrix: vec![z, o, o, z],
        }
    }

    /// Hadamard.
    pub fn h() -> Gate {
        let s = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        Gate {
            arity: 1,
            matrix: vec![s, s, s, -s],
        }
    }

    /// Single-qubit identity.
    pub fn identity() -> Gate {
        let z = Complex64::new(0.0, 0.0);
        let o = Complex64::new(1.0, 0.0);
        Gate {
            arity: 1,
            matrix: vec![o, z, z, o],
        }
    }

    /// Controlled-X; the first target is the control.
    pub fn cx() -> Gate {
        let z = Complex64::new(0.0, 0.0);
        let o = Complex64::new(1.0, 0.0);
        #[rustfmt::skip]
        let matrix = vec![
            o, z, z, z,
            z, o, z, z,
            z, z, z, o,
            z, z, o, z,
        ];
        Gate { arity: 2, matrix }
    }
}

/// Apply `gate` to the listed target qubits, identity elsewhere.
///
/// `targets[0]` is the gate's most significant input, matching the register's
/// big-endian index convention.
pub fn apply_gate(state: &StateVector, gate: &Gate, targets: &[usize]) -> Result<StateVector> {
    if targets.len() != gate.arity() {
        return Err(Error::Domain(format!(
            "gate arity {} does not match {} targets",
            gate.arity(),
            targets.len()
        )));
    }
    for (i, &t) in targets.iter().enumerate() {
        if t >= state.n_qubits {
            return Err(Error::Domain(format!("target qubit {t} out of range")));
        }
        if targets[..i].contains(&t) {
            return Err(Error::Domain(format!("repeated target qubit {t}")));
        }
    }

    let n = state.n_qubits;
    let dim = 1 << n;
    let gdim = 1 << gate.arity();
    // Bit position of qubit q within a basis index.
    let shifts: Vec<usize> = targets.iter().map(|&t| n - 1 - t).collect();
    let target_mask: usize = shifts.iter().map(|&s| 1usize << s).sum();

    let mut out = vec![Complex64::new(0.0, 0.0); dim];
    for base in 0..dim {
        if base & target_mask != 0 {
            continue;
        }
        // Gather the amplitudes of the gate's 2^arity subspace at this base.
        let offset = |sub: usize| -> usize {
            let mut idx = base;
            for (pos, &shift) in shifts.iter().enumerate() {
                if sub >> (gate.arity() - 1 - pos) & 1 == 1 {
                    idx |= 1 << shift;
                }
            }
            idx
        };
        for r in 0..gdim {
            let mut acc = Complex64::new(0.0, 0.0);
            for c in 0..gdim {
                acc += gate.entry(r, c) * state.amplitudes[offset(c)];
            }
            out[offset(r)] = acc;
        }
    }
    Ok(StateVector {
        n_qubits: n,
        amplitudes: out,
    })
}

/// Hadamard on qubit 0 followed by controlled-X (control 0, target 1) on |00⟩.
pub fn bell_circuit() -> StateVector {
    let state = basis_state(2, 0).expect("|00> is valid");
    let state = apply_gate(&state, &Gate::h(), &[0]).expect("H on qubit 0");
    apply_gate(&state, &Gate::cx(), &[0, 1]).expect("CX on qubits 0,1")
}

/// Outcome counts from repeated Born-rule sampling of a state.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MeasurementRecord {
    pub shots: u64,
    pub counts: BTreeMap<usize, u64>,
}

impl MeasurementRecord {
    pub fn count(&self, index: usize) -> u64 {
        self.counts.get(&index).copied().unwrap_or(0)
    }
}

/// Sample `shots` measurements in the computational basis.
///
/// Deterministic for a fixed seed; parallel shot batches must carry explicit
/// sub-seeds (see [`crate::rng::substream`]).
pub fn measure(state: &StateVector, shots: u64, seed: u64) -> Result<MeasurementRecord> {
    if shots == 0 {
        return Err(Error::Domain("shots must be at least 1".into()));
    }
    // Cumulative distribution over basis indices.
    let mut cdf = Vec::with_capacity(state.amplitudes.len());
    let mut acc = 0.0;
    for a in &state.amplitudes {
        acc += a.norm_sqr();
        cdf.push(acc);
    }
    let total = acc;

    let mut rng = rng::seeded(seed);
    let mut counts: BTreeMap<usize, u64> = BTreeMap::new();
    for _ in 0..shots {
        let u: f64 = rng.gen::<f64>() * total;
        let idx = cdf.partition_point(|&c| c <= u).min(cdf.len() - 1);
        *counts.entry(idx).or_insert(0) += 1;
    }
    Ok(MeasurementRecord { shots, counts })
}

/// Bloch-sphere angles (θ, φ) of a single-qubit state.
///
/// The global phase is fixed so the |0⟩ amplitude is real and non-negative.
/// Returns θ ∈ [0, π] and φ ∈ [0, 2π); φ = 0 when the |1⟩ amplitude vanishes.
pub fn bloch_coords(state: &StateVector) -> Result<(f64, f64)> {
    if state.n_qubits != 1 {
        return Err(Error::Domain(format!(
            "bloch_coords requires a single qubit, got {}",
            state.n_qubits
        )));
    }
    let a = state.amplitudes[0];
    let b = state.amplitudes[1];
    // Rotate the global phase so that the |0> amplitude is real >= 0.
    let phase = if a.norm() > 1e-15 {
        a.conj() / a.norm()
    } else {
        // alpha = 0: use the |1> amplitude's phase instead.
        b.conj() / b.norm()
    };
    let a = (a * phase).re.clamp(-1.0, 1.0);
    let b = b * phase;
    let theta = 2.0 * a.clamp(0.0, 1.0).acos();
    let phi = if b.norm() > 1e-15 {
        let p = b.arg();
        if p < 0.0 {
            p + 2.0 * PI
        } else {
            p
        }
    } else {
        0.0
    };
    Ok((theta, phi % (2.0 * PI)))
}

/// Determinant test for two-qubit product states.
///
/// Returns |c1·c4 − c2·c3| in the expansion c1|0⟩⊗|0⟩ + c2|1⟩⊗|0⟩ +
/// c3|0⟩⊗|1⟩ + c4|1⟩⊗|1⟩. The value is zero exactly when the state factors
/// into a product of single-qubit states.
pub fn product_test(state: &StateVector) -> Result<f64> {
    if state.n_qubits != 2 {
        return Err(Error::Domain(format!(
            "product_test requires two qubits, got {}",
            state.n_qubits
        )));
    }
    let c1 = state.amplitudes[0]; // |00>
    let c2 = state.amplitudes[2]; // |10>
    let c3 = state.amplitudes[1]; // |01>
    let c4 = state.amplitudes[3]; // |11>
    Ok((c1 * c4 - c2 * c3).norm())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn basis_state_places_unit_amplitude() {
        let s = basis_state(1, 0).unwrap();
        assert_eq!(s.amplitudes(), &[c(1.0, 0.0), c(0.0, 0.0)]);

        let s = basis_state(2, 0).unwrap();
        assert_eq!(s.amplitudes()[0], c(1.0, 0.0));
        assert!(s.amplitudes()[1..].iter().all(|a| a.norm() == 0.0));

        let s = basis_state(2, 3).unwrap();
        assert_eq!(s.amplitudes()[3], c(1.0, 0.0));
    }

    #[test]
    fn basis_state_rejects_out_of_range_index() {
        assert!(matches!(basis_state(2, 4), Err(Error::Domain(_))));
        assert!(matches!(basis_state(0, 0), Err(Error::Domain(_))));
    }

    #[test]
    fn hadamard_makes_plus_state() {
        let s = apply_gate(&basis_state(1, 0).unwrap(), &Gate::h(), &[0]).unwrap();
        let r = std::f64::consts::FRAC_1_SQRT_2;
        assert_abs_diff_eq!(s.amplitudes()[0].re, r, epsilon = 1e-15);
        assert_abs_diff_eq!(s.amplitudes()[1].re, r, epsilon = 1e-15);
    }

    #[test]
    fn x_flips_basis_state() {
        let s = apply_gate(&basis_state(1, 0).unwrap(), &Gate::x(), &[0]).unwrap();
        assert_eq!(s.amplitudes()[1], c(1.0, 0.0));
    }

    #[test]
    fn identity_preserves_state() {
        let s = bell_circuit();
        let t = apply_gate(&s, &Gate::identity(), &[0]).unwrap();
        for (a, b) in s.amplitudes().iter().zip(t.amplitudes()) {
            assert_abs_diff_eq!((a - b).norm(), 0.0, epsilon = 1e-15);
        }
    }

    #[test]
    fn apply_gate_rejects_bad_targets() {
        let s = basis_state(2, 0).unwrap();
        assert!(matches!(
            apply_gate(&s, &Gate::cx(), &[0, 0]),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            apply_gate(&s, &Gate::x(), &[5]),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            apply_gate(&s, &Gate::x(), &[0, 1]),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn non_unitary_gate_rejected() {
        let m = vec![c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)];
        assert!(matches!(Gate::new(1, m), Err(Error::Validation(_))));
    }

    #[test]
    fn bell_circuit_amplitudes() {
        let s = bell_circuit();
        let r = std::f64::consts::FRAC_1_SQRT_2;
        assert_abs_diff_eq!(s.amplitudes()[0].re, r, epsilon = 1e-12);
        assert_abs_diff_eq!(s.amplitudes()[1].norm(), 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(s.amplitudes()[2].norm(), 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(s.amplitudes()[3].re, r, epsilon = 1e-12);
        assert_abs_diff_eq!(s.norm(), 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(product_test(&s).unwrap(), 0.5, epsilon = 1e-12);
    }

    #[test]
    fn measure_deterministic_state() {
        let s = basis_state(1, 1).unwrap();
        let rec = measure(&s, 100, 7).unwrap();
        assert_eq!(rec.count(1), 100);
        assert_eq!(rec.count(0), 0);
    }

    #[test]
    fn measure_zero_shots_rejected() {
        let s = basis_state(1, 0).unwrap();
        assert!(matches!(measure(&s, 0, 0), Err(Error::Domain(_))));
    }

    #[test]
    fn measure_plus_state_within_binomial_bound() {
        let s = apply_gate(&basis_state(1, 0).unwrap(), &Gate::h(), &[0]).unwrap();
        let rec = measure(&s, 10_000, 42).unwrap();
        // binomial 3-sigma bound at p = 0.5: 5000 +- 150
        let zeros = rec.count(0) as f64;
        assert!((zeros - 5000.0).abs() <= 150.0, "count {zeros}");
    }

    #[test]
    fn measure_bell_never_hits_middle_outcomes() {
        let rec = measure(&bell_circuit(), 10_000, 3).unwrap();
        assert_eq!(rec.count(1), 0);
        assert_eq!(rec.count(2), 0);
        assert_eq!(rec.count(0) + rec.count(3), 10_000);
    }

    #[test]
    fn measure_same_seed_same_record() {
        let s = bell_circuit();
        assert_eq!(measure(&s, 1000, 9).unwrap(), measure(&s, 1000, 9).unwrap());
    }

    #[test]
    fn bloch_poles_and_equator() {
        let (theta, phi) = bloch_coords(&basis_state(1, 0).unwrap()).unwrap();
        assert_abs_diff_eq!(theta, 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(phi, 0.0, epsilon = 1e-12);

        let (theta, phi) = bloch_coords(&basis_state(1, 1).unwrap()).unwrap();
        assert_abs_diff_eq!(theta, PI, epsilon = 1e-12);
        assert_abs_diff_eq!(phi, 0.0, epsilon = 1e-12);

        let plus = apply_gate(&basis_state(1, 0).unwrap(), &Gate::h(), &[0]).unwrap();
        let (theta, phi) = bloch_coords(&plus).unwrap();
        assert_abs_diff_eq!(theta, PI / 2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(phi, 0.0, epsilon = 1e-12);
    }

    #[test]
    fn bloch_rejects_multi_qubit_state() {
        assert!(matches!(
            bloch_coords(&bell_circuit()),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn bloch_roundtrip_recovers_state() {
        // random-ish normalized single-qubit states
        let cases = [
            (c(0.6, 0.0), c(0.0, 0.8)),
            (c(0.28, -0.21), c(0.53, 0.77)),
            (c(0.0, 1.0), c(0.0, 0.0)),
        ];
        for (a, b) in cases {
            let norm = (a.norm_sqr() + b.norm_sqr()).sqrt();
            let s = StateVector::new(1, vec![a / norm, b / norm]).unwrap();
            let (theta, phi) = bloch_coords(&s).unwrap();
            let ra = c((theta / 2.0).cos(), 0.0);
            let rb = Complex64::from_polar((theta / 2.0).sin(), phi);
            // compare up to global phase via the cross amplitude
            let cross = s.amplitudes()[0] * rb - s.amplitudes()[1] * ra;
            assert_abs_diff_eq!(cross.norm(), 0.0, epsilon = 1e-10);
        }
    }

    #[test]
    fn product_test_on_product_states() {
        assert_abs_diff_eq!(
            product_test(&basis_state(2, 0).unwrap()).unwrap(),
            0.0,
            epsilon = 1e-12
        );
        // |+> (x) |->
        let s = basis_state(2, 0).unwrap();
        let s = apply_gate(&s, &Gate::h(), &[0]).unwrap();
        let s = apply_gate(&s, &Gate::x(), &[1]).unwrap();
        let s = apply_gate(&s, &Gate::h(), &[1]).unwrap();
        assert_abs_diff_eq!(product_test(&s).unwrap(), 0.0, epsilon = 1e-10);
    }

    #[test]
    fn product_test_rejects_wrong_arity() {
        assert!(matches!(
            product_test(&basis_state(1, 0).unwrap()),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn state_csv_dump() {
        let mut buf = Vec::new();
        basis_state(1, 1).unwrap().write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text, "index,re,im\n0,0,0\n1,1,0\n");
    }
}
