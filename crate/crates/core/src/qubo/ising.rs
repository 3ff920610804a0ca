//! Binary-to-spin change of variables.
//!
//! Convention: `x = (1 - s) / 2`, so `x = 1` maps to `s = -1` and `x = 0`
//! to `s = +1`. The spin energy is
//! `E(s) = constant + Σ_i h_i s_i + Σ_{i<j} J_ij s_i s_j`.

use super::CableQubo;

#[derive(Clone, Debug, PartialEq)]
pub struct IsingModel {
    pub h: Vec<f64>,
    /// Symmetric, zero diagonal, row-major `n × n`.
    pub j: Vec<f64>,
    pub constant: f64,
}

impl IsingModel {
    pub fn num_spins(&self) -> usize {
        self.h.len()
    }

    pub fn coupling(&self, a: usize, b: usize) -> f64 {
        self.j[a * self.h.len() + b]
    }

    /// Energy of a spin configuration with entries in `{-1, +1}`.
    pub fn energy(&self, spins: &[i8]) -> f64 {
        let n = self.h.len();
        assert_eq!(spins.len(), n, "spin vector length");
        let mut total = self.constant;
        for a in 0..n {
            let sa = f64::from(spins[a]);
            total += self.h[a] * sa;
            for (b, &sb) in spins.iter().enumerate().skip(a + 1) {
                total += self.j[a * n + b] * sa * f64::from(sb);
            }
        }
        total
    }
}

/// Spin image of a bitstring under the fixed convention.
pub fn spins_of(bits: &[bool]) -> Vec<i8> {
    bits.iter().map(|&x| if x { -1 } else { 1 }).collect()
}

pub fn to_ising(q: &CableQubo) -> IsingModel {
    let n = q.dim();
    let mut h = vec![0.0; n];
    let mut j = vec![0.0; n * n];
    let mut constant = q.offset;
    for a in 0..n {
        let diag = q.entry(a, a);
        h[a] -= 0.5 * diag;
        constant += 0.5 * diag;
        for b in a + 1..n {
            // 2 Q_ab x_a x_b = (Q_ab / 2)(1 - s_a - s_b + s_a s_b)
            let qab = q.entry(a, b);
            constant += 0.5 * qab;
            h[a] -= 0.5 * qab;
            h[b] -= 0.5 * qab;
            j[a * n + b] = 0.5 * qab;
            j[b * n + a] = 0.5 * qab;
        }
    }
    IsingModel { h, j, constant }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bits::Bitstring;
    use crate::instance::bundled_layouts;
    use crate::instance::parse_instance;
    use crate::qubo::tests::triangle_qubo;
    use crate::qubo::{build_cable_qubo, default_penalties, qubo_energy, PenaltyWeights};

    fn single_variable(a: f64) -> CableQubo {
        // A two-node, one-segment layout with zero penalties has a 1x1 block
        // holding just the segment cost.
        let inst = parse_instance(&format!(
            r#"{{"name": "one", "nodes": [{{"id": "a"}}, {{"id": "b"}}],
                "segments": [{{"id": "ab", "u": "a", "v": "b", "length": 1}}],
                "cables": [{{"id": "c", "source": "a", "terminal": "b", "alpha": {a}}}]}}"#
        ))
        .unwrap();
        let zero = PenaltyWeights {
            eta1: 0.0,
            eta2: 0.0,
            eta3: 0.0,
            eta4: 0.0,
            w1: 0.0,
            w2: 0.0,
            w3: 0.0,
            kappa: 1.0,
        };
        build_cable_qubo(&inst, &inst.cables()[0], &zero).unwrap()
    }

    #[test]
    fn one_variable_two_point_check() {
        let q = single_variable(3.5);
        assert_eq!(q.dim(), 1);
        let m = to_ising(&q);
        assert_eq!(m.energy(&[1]), 0.0);
        assert_eq!(m.energy(&[-1]), 3.5);
    }

    #[test]
    fn zero_matrix_maps_to_constant() {
        let q = single_variable(0.0);
        let m = to_ising(&q);
        assert_eq!(m.h, vec![0.0]);
        assert_eq!(m.j, vec![0.0]);
        assert_eq!(m.constant, q.offset);
    }

    #[test]
    fn triangle_spin_energies_match() {
        let q = triangle_qubo();
        let m = to_ising(&q);
        for idx in 0..16 {
            let z = Bitstring::from_index(idx, 4);
            let e = qubo_energy(&q, &z).unwrap();
            assert!((m.energy(&spins_of(z.bits())) - e).abs() < 1e-9);
        }
        for a in 0..4 {
            assert_eq!(m.coupling(a, a), 0.0);
        }
    }

    #[test]
    fn layout_block_sampled_equivalence() {
        let l = &bundled_layouts()[1];
        let c = &l.cables()[2];
        let q = build_cable_qubo(l, c, &default_penalties(l, c)).unwrap();
        let m = to_ising(&q);
        for idx in (0..1usize << q.dim()).step_by(97) {
            let z = Bitstring::from_index(idx, q.dim());
            let e = qubo_energy(&q, &z).unwrap();
            assert!((m.energy(&spins_of(z.bits())) - e).abs() < 1e-9);
        }
    }
}
