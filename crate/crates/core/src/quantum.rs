//! Dense statevector simulation of the layered `R_y` + CNOT-chain ansatz,
//! computational-basis sampling, and energy estimation of diagonal QUBO
//! Hamiltonians.
//!
//! Qubit `i` is bit `i` of the amplitude index and variable `i` of the
//! block (see [`crate::bits`]).

use std::collections::BTreeMap;

use num_complex::Complex64;
use rand::Rng;

use crate::bits::{lex_key, Bitstring};
use crate::error::{Error, Result};
use crate::qubo::{BitEnergy, MAX_DIM};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct AnsatzSpec {
    pub num_qubits: usize,
    /// Number of rotation+entangler layers before the final rotation layer.
    pub reps: usize,
}

impl AnsatzSpec {
    pub fn new(num_qubits: usize, reps: usize) -> Self {
        AnsatzSpec { num_qubits, reps }
    }

    pub fn parameter_count(&self) -> usize {
        self.num_qubits * (self.reps + 1)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Statevector {
    num_qubits: usize,
    amplitudes: Vec<Complex64>,
}

impl Statevector {
    /// `|0…0⟩`.
    pub fn zero(num_qubits: usize) -> Result<Self> {
        if num_qubits > MAX_DIM {
            return Err(Error::DimensionOverCap {
                dim: num_qubits,
                cap: MAX_DIM,
            });
        }
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); 1 << num_qubits];
        amplitudes[0] = Complex64::new(1.0, 0.0);
        Ok(Statevector {
            num_qubits,
            amplitudes,
        })
    }

    pub fn from_amplitudes(amplitudes: Vec<Complex64>) -> Result<Self> {
        let len = amplitudes.len();
        if !len.is_power_of_two() {
            return Err(Error::InvalidArgument(format!(
                "amplitude vector length {len} is not a power of two"
            )));
        }
        Ok(Statevector {
            num_qubits: len.trailing_zeros() as usize,
            amplitudes,
        })
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
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

    pub fn apply_ry(&mut self, qubit: usize, theta: f64) {
        let (s, c) = (0.5 * theta).sin_cos();
        let stride = 1usize << qubit;
        for block in self.amplitudes.chunks_exact_mut(stride << 1) {
            let (lo, hi) = block.split_at_mut(stride);
            for (a0, a1) in lo.iter_mut().zip(hi.iter_mut()) {
                let (x0, x1) = (*a0, *a1);
                *a0 = x0 * c - x1 * s;
                *a1 = x0 * s + x1 * c;
            }
        }
    }

    pub fn apply_cnot(&mut self, control: usize, target: usize) {
        assert_ne!(control, target, "control and target must differ");
        let (cbit, tbit) = (1usize << control, 1usize << target);
        for idx in 0..self.amplitudes.len() {
            if idx & cbit != 0 && idx & tbit == 0 {
                self.amplitudes.swap(idx, idx | tbit);
            }
        }
    }
}

/// Prepares `U(θ)|0…0⟩`: `reps` layers of `R_y` on every qubit followed by
/// CNOT(i, i+1) for `i = 0..m-2`, then one final `R_y` layer. Parameter
/// `l * m + i` drives qubit `i` in layer `l`.
pub fn prepare_state(spec: &AnsatzSpec, theta: &[f64]) -> Result<Statevector> {
    if theta.len() != spec.parameter_count() {
        return Err(Error::LengthMismatch {
            expected: spec.parameter_count(),
            actual: theta.len(),
        });
    }
    let m = spec.num_qubits;
    let mut state = Statevector::zero(m)?;
    for layer in 0..=spec.reps {
        for q in 0..m {
            state.apply_ry(q, theta[layer * m + q]);
        }
        if layer < spec.reps {
            for q in 0..m.saturating_sub(1) {
                state.apply_cnot(q, q + 1);
            }
        }
    }
    Ok(state)
}

/// Basis-state weights summing to one.
pub trait Weighted {
    fn num_qubits(&self) -> usize;
    /// `(basis index, weight)` pairs with nonzero weight.
    fn nonzero(&self) -> Vec<(usize, f64)>;
}

/// Exact measurement distribution, indexed by basis index.
#[derive(Clone, Debug, PartialEq)]
pub struct Distribution {
    num_qubits: usize,
    probs: Vec<f64>,
}

impl Distribution {
    pub fn probabilities(&self) -> &[f64] {
        &self.probs
    }

    pub fn probability(&self, z: &Bitstring) -> f64 {
        self.probs[z.to_index()]
    }

    pub fn to_map(&self) -> BTreeMap<Bitstring, f64> {
        self.probs
            .iter()
            .enumerate()
            .map(|(i, &p)| (Bitstring::from_index(i, self.num_qubits), p))
            .collect()
    }
}

impl Weighted for Distribution {
    fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    fn nonzero(&self) -> Vec<(usize, f64)> {
        self.probs
            .iter()
            .enumerate()
            .filter(|(_, &p)| p > 0.0)
            .map(|(i, &p)| (i, p))
            .collect()
    }
}

pub fn exact_distribution(state: &Statevector) -> Distribution {
    Distribution {
        num_qubits: state.num_qubits,
        probs: state.amplitudes.iter().map(|a| a.norm_sqr()).collect(),
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SampleCounts {
    num_qubits: usize,
    shots: u64,
    counts: BTreeMap<usize, u64>,
}

impl SampleCounts {
    pub fn shots(&self) -> u64 {
        self.shots
    }

    pub fn count(&self, z: &Bitstring) -> u64 {
        self.counts.get(&z.to_index()).copied().unwrap_or(0)
    }

    /// Counts keyed by basis index.
    pub fn by_index(&self) -> &BTreeMap<usize, u64> {
        &self.counts
    }

    pub fn to_map(&self) -> BTreeMap<Bitstring, u64> {
        self.counts
            .iter()
            .map(|(&i, &c)| (Bitstring::from_index(i, self.num_qubits), c))
            .collect()
    }
}

impl Weighted for SampleCounts {
    fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    fn nonzero(&self) -> Vec<(usize, f64)> {
        let shots = self.shots as f64;
        self.counts
            .iter()
            .map(|(&i, &c)| (i, c as f64 / shots))
            .collect()
    }
}

/// Cumulative table for repeated multinomial draws from one distribution.
pub struct Sampler {
    num_qubits: usize,
    cdf: Vec<f64>,
}

impl Sampler {
    pub fn new(dist: &Distribution) -> Self {
        let mut acc = 0.0;
        let cdf = dist
            .probs
            .iter()
            .map(|&p| {
                acc += p;
                acc
            })
            .collect();
        Sampler {
            num_qubits: dist.num_qubits,
            cdf,
        }
    }

    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let total = *self.cdf.last().expect("nonempty register");
        let u = rng.random::<f64>() * total;
        self.cdf
            .partition_point(|&c| c <= u)
            .min(self.cdf.len() - 1)
    }

    pub fn sample<R: Rng + ?Sized>(&self, shots: u64, rng: &mut R) -> SampleCounts {
        let mut counts = BTreeMap::new();
        for _ in 0..shots {
            *counts.entry(self.draw(rng)).or_insert(0) += 1;
        }
        SampleCounts {
            num_qubits: self.num_qubits,
            shots,
            counts,
        }
    }
}

/// Draws `shots` measurement outcomes of `state` from `rng`.
pub fn sample<R: Rng + ?Sized>(
    state: &Statevector,
    shots: u64,
    rng: &mut R,
) -> Result<SampleCounts> {
    if shots == 0 {
        return Err(Error::InvalidArgument("shots must be at least 1".into()));
    }
    Ok(Sampler::new(&exact_distribution(state)).sample(shots, rng))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EnergyEstimate {
    /// Weighted mean energy.
    pub mean: f64,
    /// Weighted (population) standard deviation of the energy.
    pub std_dev: f64,
    /// Lowest-energy basis index carrying weight, ties lexicographic.
    pub best_index: usize,
    pub best_energy: f64,
}

impl EnergyEstimate {
    pub fn best_bitstring(&self, dim: usize) -> Bitstring {
        Bitstring::from_index(self.best_index, dim)
    }
}

/// Expected energy `Σ_z p(z) E(z)` and the best supported bitstring.
pub fn estimate_energy<W, E>(weights: &W, energy: &E) -> Result<EnergyEstimate>
where
    W: Weighted + ?Sized,
    E: BitEnergy + ?Sized,
{
    if weights.num_qubits() != energy.dim() {
        return Err(Error::LengthMismatch {
            expected: energy.dim(),
            actual: weights.num_qubits(),
        });
    }
    let dim = energy.dim();
    let entries = weights.nonzero();
    let mut mean = 0.0;
    let mut best: Option<(f64, usize, usize)> = None;
    for &(idx, p) in &entries {
        let e = energy.energy_at(idx);
        mean += p * e;
        let key = lex_key(idx, dim);
        let replace = match best {
            None => true,
            Some((be, bk, _)) => e < be || (e == be && key < bk),
        };
        if replace {
            best = Some((e, key, idx));
        }
    }
    let (best_energy, _, best_index) =
        best.ok_or_else(|| Error::InvalidArgument("distribution has no support".into()))?;
    let variance = entries
        .iter()
        .map(|&(idx, p)| p * (energy.energy_at(idx) - mean).powi(2))
        .sum::<f64>();
    Ok(EnergyEstimate {
        mean,
        std_dev: variance.max(0.0).sqrt(),
        best_index,
        best_energy,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qubo::tests::triangle_qubo;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::{FRAC_1_SQRT_2, PI};

    fn close(a: Complex64, re: f64) -> bool {
        (a.re - re).abs() < 1e-12 && a.im.abs() < 1e-12
    }

    /// Uniform superposition over `m` qubits built directly.
    fn uniform(m: usize) -> Statevector {
        let amp = Complex64::new((1.0 / (1u64 << m) as f64).sqrt(), 0.0);
        Statevector::from_amplitudes(vec![amp; 1 << m]).unwrap()
    }

    #[test]
    fn single_qubit_rotations() {
        let s = prepare_state(&AnsatzSpec::new(1, 0), &[0.0]).unwrap();
        assert!(close(s.amplitudes()[0], 1.0) && close(s.amplitudes()[1], 0.0));
        let s = prepare_state(&AnsatzSpec::new(1, 0), &[PI]).unwrap();
        assert!(close(s.amplitudes()[0], 0.0));
        assert!((s.amplitudes()[1].norm() - 1.0).abs() < 1e-12);
        let s = prepare_state(&AnsatzSpec::new(1, 0), &[PI / 2.0]).unwrap();
        assert!(close(s.amplitudes()[0], FRAC_1_SQRT_2) && close(s.amplitudes()[1], FRAC_1_SQRT_2));
    }

    #[test]
    fn cnot_chain_propagates_a_flip() {
        // Layer 0 flips qubit 0 (index 1), CNOT(0,1) then maps it to
        // index 3 = |11⟩.
        let s = prepare_state(&AnsatzSpec::new(2, 1), &[PI, 0.0, 0.0, 0.0]).unwrap();
        let a = s.amplitudes();
        assert!(close(a[0], 0.0) && close(a[1], 0.0) && close(a[2], 0.0));
        assert!((a[3].norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn zero_parameters_give_the_zero_state() {
        for (m, reps) in [(3, 0), (4, 1), (6, 3)] {
            let spec = AnsatzSpec::new(m, reps);
            let s = prepare_state(&spec, &vec![0.0; spec.parameter_count()]).unwrap();
            assert_eq!(s, Statevector::zero(m).unwrap());
        }
    }

    #[test]
    fn parameter_count_is_checked() {
        let spec = AnsatzSpec::new(3, 1);
        assert_eq!(spec.parameter_count(), 6);
        assert!(matches!(
            prepare_state(&spec, &[0.0; 5]),
            Err(Error::LengthMismatch {
                expected: 6,
                actual: 5
            })
        ));
    }

    #[test]
    fn distributions() {
        let d = exact_distribution(&Statevector::zero(3).unwrap());
        assert_eq!(d.probabilities()[0], 1.0);
        assert_eq!(d.nonzero(), vec![(0, 1.0)]);

        let d = exact_distribution(&uniform(2));
        for p in d.probabilities() {
            assert!((p - 0.25).abs() < 1e-10);
        }
        let spec = AnsatzSpec::new(2, 0);
        let d = exact_distribution(&prepare_state(&spec, &[PI / 2.0, PI / 2.0]).unwrap());
        for p in d.probabilities() {
            assert!((p - 0.25).abs() < 1e-10);
        }
        assert_eq!(d.to_map().len(), 4);
    }

    #[test]
    fn sampling_basis_state_and_determinism() {
        let spec = AnsatzSpec::new(3, 0);
        let s = prepare_state(&spec, &[PI, 0.0, PI]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let counts = sample(&s, 500, &mut rng).unwrap();
        assert_eq!(counts.count(&"101".parse().unwrap()), 500);
        assert_eq!(counts.shots(), 500);

        let u = uniform(2);
        let a = sample(&u, 4000, &mut ChaCha8Rng::seed_from_u64(9)).unwrap();
        let b = sample(&u, 4000, &mut ChaCha8Rng::seed_from_u64(9)).unwrap();
        assert_eq!(a, b);
        let sigma = (4000.0f64 * 0.25 * 0.75).sqrt();
        for idx in 0..4 {
            let c = a.by_index().get(&idx).copied().unwrap_or(0) as f64;
            assert!((c - 1000.0).abs() < 5.0 * sigma, "count {c}");
        }
        assert_eq!(a.by_index().values().sum::<u64>(), 4000);
        assert!(sample(&u, 0, &mut rng).is_err());
    }

    #[test]
    fn zero_probability_states_are_never_drawn() {
        let amps = vec![
            Complex64::new(0.0, 0.0),
            Complex64::new(FRAC_1_SQRT_2, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(0.0, -FRAC_1_SQRT_2),
        ];
        let s = Statevector::from_amplitudes(amps).unwrap();
        let counts = sample(&s, 2000, &mut ChaCha8Rng::seed_from_u64(3)).unwrap();
        assert!(counts.by_index().keys().all(|&k| k == 1 || k == 3));
    }

    #[test]
    fn estimates() {
        let q = triangle_qubo();
        // Point mass on 1101 (index 0b1011).
        let point = Distribution {
            num_qubits: 4,
            probs: (0..16)
                .map(|i| if i == 0b1011 { 1.0 } else { 0.0 })
                .collect(),
        };
        let e = estimate_energy(&point, &q).unwrap();
        assert_eq!(
            (e.mean, e.best_energy, e.best_index, e.std_dev),
            (2.0, 2.0, 0b1011, 0.0)
        );

        let d = exact_distribution(&uniform(4));
        let e = estimate_energy(&d, &q).unwrap();
        let mean: f64 = (0..16).map(|i| q.energy_at(i)).sum::<f64>() / 16.0;
        assert!((e.mean - mean).abs() < 1e-10);
        assert_eq!(e.best_bitstring(4).to_string(), "1101");

        let small = exact_distribution(&uniform(3));
        assert!(matches!(
            estimate_energy(&small, &q),
            Err(Error::LengthMismatch { .. })
        ));
    }

    #[test]
    fn shot_estimate_tracks_exact_expectation() {
        let q = triangle_qubo();
        let spec = AnsatzSpec::new(4, 1);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mut inside = 0;
        for _ in 0..20 {
            let theta: Vec<f64> = (0..spec.parameter_count())
                .map(|_| rng.random::<f64>() * 2.0 * PI)
                .collect();
            let s = prepare_state(&spec, &theta).unwrap();
            let exact = estimate_energy(&exact_distribution(&s), &q).unwrap();
            let shots = estimate_energy(&sample(&s, 1000, &mut rng).unwrap(), &q).unwrap();
            if (shots.mean - exact.mean).abs() < 5.0 * exact.std_dev / 1000f64.sqrt() + 1e-12 {
                inside += 1;
            }
        }
        assert!(inside >= 19, "{inside}/20");
    }

    #[test]
    fn norm_is_preserved() {
        let spec = AnsatzSpec::new(6, 2);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..200 {
            let theta: Vec<f64> = (0..spec.parameter_count())
                .map(|_| rng.random::<f64>() * 4.0 * PI - 2.0 * PI)
                .collect();
            let s = prepare_state(&spec, &theta).unwrap();
            assert!((s.norm() - 1.0).abs() < 1e-10);
        }
    }
}
