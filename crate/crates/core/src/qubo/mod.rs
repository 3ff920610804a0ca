//! Per-cable QUBO blocks with exact-penalty weights.
//!
//! A block lives in the variables `z = (x, b)`: one `x` per segment (in
//! instance order) followed by one `b` per internal node (sorted by node
//! id). Its energy is `zᵀQz + offset`, where the offset carries the two
//! constants of the squared start and terminal penalties, so a feasible
//! assignment's energy is exactly its routing cost.

mod export;
mod ising;

use serde::Serialize;

use crate::bits::Bitstring;
use crate::error::{Error, Result};
use crate::instance::{Cable, Instance};

pub use export::{ExportDocument, ExportKind, ExportTerm};
pub use ising::{spins_of, to_ising, IsingModel};

/// Largest block that may be enumerated or simulated.
pub const MAX_DIM: usize = 24;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PenaltyWeights {
    /// Start: exactly one used segment at the source.
    pub eta1: f64,
    /// Terminal: exactly one used segment at the terminal.
    pub eta2: f64,
    /// Flow continuity at internal nodes.
    pub eta3: f64,
    /// Selection consistency `x_s <= b_k`.
    pub eta4: f64,
    pub w1: f64,
    pub w2: f64,
    pub w3: f64,
    pub kappa: f64,
}

impl PenaltyWeights {
    pub fn etas(&self) -> [f64; 4] {
        [self.eta1, self.eta2, self.eta3, self.eta4]
    }

    fn from_sums(w1: f64, w2: f64, w3: f64) -> Self {
        PenaltyWeights {
            eta1: 1.0 + w1,
            eta2: 1.0 + w2,
            eta3: 1.0 + w3,
            eta4: 1.0,
            w1,
            w2,
            w3,
            kappa: 1.0,
        }
    }
}

/// Which penalty bounds to use: the cable's own sums or the maxima taken
/// across all cables of the instance.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum PenaltyMode {
    #[default]
    PerCable,
    Global,
}

fn incident_cost(instance: &Instance, cable: &Cable, node: usize) -> f64 {
    instance
        .incident_by_index(node)
        .iter()
        .map(|&s| cable.costs[s])
        .sum()
}

fn weight_sums(instance: &Instance, cable: &Cable) -> (f64, f64, f64) {
    let w1 = incident_cost(instance, cable, cable.source_index());
    let w2 = incident_cost(instance, cable, cable.terminal_index());
    let w3 = instance
        .internal_nodes(cable)
        .into_iter()
        .map(|k| incident_cost(instance, cable, k))
        .fold(0.0, f64::max);
    (w1, w2, w3)
}

/// Baseline weights at the lower bounds: `eta_i = 1 + W_i` for the three
/// degree constraints and `eta4 = 1`.
pub fn default_penalties(instance: &Instance, cable: &Cable) -> PenaltyWeights {
    let (w1, w2, w3) = weight_sums(instance, cable);
    PenaltyWeights::from_sums(w1, w2, w3)
}

/// Baseline weights from the cross-cable maxima of each sum.
pub fn global_penalties(instance: &Instance) -> PenaltyWeights {
    let (w1, w2, w3) = instance
        .cables()
        .iter()
        .map(|c| weight_sums(instance, c))
        .fold((0.0, 0.0, 0.0), |(a, b, c), (x, y, z)| {
            (f64::max(a, x), f64::max(b, y), f64::max(c, z))
        });
    PenaltyWeights::from_sums(w1, w2, w3)
}

pub fn penalties_for(instance: &Instance, cable: &Cable, mode: PenaltyMode) -> PenaltyWeights {
    match mode {
        PenaltyMode::PerCable => default_penalties(instance, cable),
        PenaltyMode::Global => global_penalties(instance),
    }
}

/// Multiplies every eta by `kappa`; the W record is kept.
pub fn scale_penalties(p: &PenaltyWeights, kappa: f64) -> Result<PenaltyWeights> {
    if !(kappa.is_finite() && kappa > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "penalty scaling must be positive, got {kappa}"
        )));
    }
    Ok(PenaltyWeights {
        eta1: p.eta1 * kappa,
        eta2: p.eta2 * kappa,
        eta3: p.eta3 * kappa,
        eta4: p.eta4 * kappa,
        kappa: p.kappa * kappa,
        ..*p
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SegmentVar {
    pub id: String,
    pub u: String,
    pub v: String,
    pub length: f64,
    pub cost: f64,
}

/// Decoding key of a block: what each variable position stands for, plus
/// the cable's endpoints.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VariableMap {
    pub source: String,
    pub terminal: String,
    /// Positions `0..d`.
    pub segment_vars: Vec<SegmentVar>,
    /// Positions `d..d+p`, internal node ids in sorted order.
    pub node_vars: Vec<String>,
    pub max_length: Option<f64>,
}

impl VariableMap {
    pub fn new(instance: &Instance, cable: &Cable) -> Self {
        VariableMap {
            source: cable.source.clone(),
            terminal: cable.terminal.clone(),
            segment_vars: instance
                .segments()
                .iter()
                .zip(&cable.costs)
                .map(|(s, &cost)| SegmentVar {
                    id: s.id.clone(),
                    u: s.u.clone(),
                    v: s.v.clone(),
                    length: s.length,
                    cost,
                })
                .collect(),
            node_vars: instance
                .internal_nodes(cable)
                .into_iter()
                .map(|k| instance.nodes()[k].id.clone())
                .collect(),
            max_length: cable.max_length,
        }
    }

    pub fn len(&self) -> usize {
        self.segment_vars.len() + self.node_vars.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn num_segments(&self) -> usize {
        self.segment_vars.len()
    }

    /// `x:<segment>` for segment variables, `b:<node>` for node variables.
    pub fn labels(&self) -> Vec<String> {
        self.segment_vars
            .iter()
            .map(|s| format!("x:{}", s.id))
            .chain(self.node_vars.iter().map(|k| format!("b:{k}")))
            .collect()
    }

    /// Routing cost of the segments selected by `z`.
    pub fn objective(&self, z: &Bitstring) -> f64 {
        self.segment_vars
            .iter()
            .enumerate()
            .filter(|&(i, _)| z.get(i))
            .map(|(_, s)| s.cost)
            .sum()
    }

    pub fn routed_length(&self, z: &Bitstring) -> f64 {
        self.segment_vars
            .iter()
            .enumerate()
            .filter(|&(i, _)| z.get(i))
            .map(|(_, s)| s.length)
            .sum()
    }
}

/// Something that assigns an energy to every basis index of a register.
pub trait BitEnergy {
    fn dim(&self) -> usize;
    fn energy_at(&self, index: usize) -> f64;
}

/// One cable's QUBO block.
#[derive(Clone, Debug, PartialEq)]
pub struct CableQubo {
    pub cable_id: String,
    pub instance_name: String,
    dim: usize,
    q: Vec<f64>,
    pub offset: f64,
    pub vmap: VariableMap,
    pub penalties: PenaltyWeights,
}

impl CableQubo {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entry(&self, i: usize, j: usize) -> f64 {
        self.q[i * self.dim + j]
    }

    /// Row-major `dim × dim` matrix.
    pub fn matrix(&self) -> &[f64] {
        &self.q
    }

    pub fn energy(&self, z: &Bitstring) -> Result<f64> {
        qubo_energy(self, z)
    }

    /// Energies of all `2^dim` basis indices.
    pub fn energy_table(&self) -> Result<EnergyTable> {
        if self.dim > MAX_DIM {
            return Err(Error::DimensionOverCap {
                dim: self.dim,
                cap: MAX_DIM,
            });
        }
        let energies = (0..1usize << self.dim)
            .map(|idx| self.energy_at(idx))
            .collect();
        Ok(EnergyTable {
            dim: self.dim,
            energies,
        })
    }

    /// Largest asymmetry `|Q_ij - Q_ji|`.
    pub fn asymmetry(&self) -> f64 {
        let n = self.dim;
        (0..n)
            .flat_map(|i| (0..n).map(move |j| (i, j)))
            .map(|(i, j)| (self.q[i * n + j] - self.q[j * n + i]).abs())
            .fold(0.0, f64::max)
    }
}

impl BitEnergy for CableQubo {
    fn dim(&self) -> usize {
        self.dim
    }

    fn energy_at(&self, index: usize) -> f64 {
        quadratic_form(&self.q, self.dim, index) + self.offset
    }
}

/// `zᵀQz` for the assignment encoded by `index`, summed over set bits in
/// row order.
fn quadratic_form(q: &[f64], dim: usize, index: usize) -> f64 {
    let mut total = 0.0;
    let mut rows = index;
    while rows != 0 {
        let i = rows.trailing_zeros() as usize;
        rows &= rows - 1;
        let row = &q[i * dim..(i + 1) * dim];
        let mut cols = index;
        while cols != 0 {
            let j = cols.trailing_zeros() as usize;
            cols &= cols - 1;
            total += row[j];
        }
    }
    total
}

#[derive(Clone, Debug)]
pub struct EnergyTable {
    dim: usize,
    energies: Vec<f64>,
}

impl EnergyTable {
    pub fn energies(&self) -> &[f64] {
        &self.energies
    }
}

impl BitEnergy for EnergyTable {
    fn dim(&self) -> usize {
        self.dim
    }

    fn energy_at(&self, index: usize) -> f64 {
        self.energies[index]
    }
}

/// Dense symmetric accumulator.
struct Builder {
    dim: usize,
    q: Vec<f64>,
}

impl Builder {
    fn add(&mut self, i: usize, j: usize, value: f64) {
        self.q[i * self.dim + j] += value;
    }

    /// Adds `value` to both `(i, j)` and `(j, i)`.
    fn add_pair(&mut self, i: usize, j: usize, value: f64) {
        self.add(i, j, value);
        self.add(j, i, value);
    }

    /// `eta * (E_k - 2 D_k)` over the incident segment set `sigma`.
    fn degree_one_penalty(&mut self, sigma: &[usize], eta: f64) {
        for &s in sigma {
            for &t in sigma {
                self.add(s, t, eta);
            }
            self.add(s, s, -2.0 * eta);
        }
    }

    fn finish(mut self) -> Vec<f64> {
        let n = self.dim;
        for i in 0..n {
            for j in i + 1..n {
                let avg = 0.5 * (self.q[i * n + j] + self.q[j * n + i]);
                self.q[i * n + j] = avg;
                self.q[j * n + i] = avg;
            }
        }
        self.q
    }
}

/// Assembles `Q_c` = routing cost + start/terminal + flow + selection
/// penalties.
pub fn build_cable_qubo(
    instance: &Instance,
    cable: &Cable,
    penalties: &PenaltyWeights,
) -> Result<CableQubo> {
    let etas = penalties.etas();
    if etas.iter().any(|e| !(e.is_finite() && *e >= 0.0)) {
        return Err(Error::InvalidArgument(format!(
            "penalty weights must be nonnegative, got {etas:?}"
        )));
    }
    let d = instance.segments().len();
    let internal = instance.internal_nodes(cable);
    let dim = d + internal.len();
    let mut b = Builder {
        dim,
        q: vec![0.0; dim * dim],
    };

    for (s, &alpha) in cable.costs.iter().enumerate() {
        b.add(s, s, alpha);
    }

    b.degree_one_penalty(
        instance.incident_by_index(cable.source_index()),
        penalties.eta1,
    );
    b.degree_one_penalty(
        instance.incident_by_index(cable.terminal_index()),
        penalties.eta2,
    );

    for (pos, &k) in internal.iter().enumerate() {
        let node_var = d + pos;
        let sigma = instance.incident_by_index(k);
        // eta3 * (sum_s x_s - 2 b_k)^2
        for &s in sigma {
            for &t in sigma {
                b.add(s, t, penalties.eta3);
            }
            b.add_pair(s, node_var, -2.0 * penalties.eta3);
        }
        b.add(node_var, node_var, 4.0 * penalties.eta3);
        // eta4 * sum_s (x_s - x_s b_k)
        for &s in sigma {
            b.add(s, s, penalties.eta4);
            b.add_pair(s, node_var, -0.5 * penalties.eta4);
        }
    }

    Ok(CableQubo {
        cable_id: cable.id.clone(),
        instance_name: instance.name().to_string(),
        dim,
        q: b.finish(),
        offset: penalties.eta1 + penalties.eta2,
        vmap: VariableMap::new(instance, cable),
        penalties: *penalties,
    })
}

/// `zᵀQz + offset`.
pub fn qubo_energy(q: &CableQubo, z: &Bitstring) -> Result<f64> {
    if z.len() != q.dim {
        return Err(Error::LengthMismatch {
            expected: q.dim,
            actual: z.len(),
        });
    }
    if q.dim < usize::BITS as usize {
        return Ok(q.energy_at(z.to_index()));
    }
    let ones: Vec<usize> = (0..q.dim).filter(|&i| z.get(i)).collect();
    let mut total = 0.0;
    for &i in &ones {
        for &j in &ones {
            total += q.entry(i, j);
        }
    }
    Ok(total + q.offset)
}

/// Block-diagonal assembly of several cable blocks.
#[derive(Clone, Debug)]
pub struct GlobalQubo {
    pub instance_name: String,
    dim: usize,
    q: Vec<f64>,
    pub offset: f64,
    /// `cable/label` per global variable.
    pub variables: Vec<String>,
    /// Half-open variable range of each block.
    pub blocks: Vec<(String, std::ops::Range<usize>)>,
}

impl GlobalQubo {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entry(&self, i: usize, j: usize) -> f64 {
        self.q[i * self.dim + j]
    }

    /// Energy by direct summation over the dense global matrix.
    pub fn energy(&self, z: &Bitstring) -> Result<f64> {
        if z.len() != self.dim {
            return Err(Error::LengthMismatch {
                expected: self.dim,
                actual: z.len(),
            });
        }
        let ones: Vec<usize> = (0..self.dim).filter(|&i| z.get(i)).collect();
        let mut total = 0.0;
        for &i in &ones {
            for &j in &ones {
                total += self.entry(i, j);
            }
        }
        Ok(total + self.offset)
    }

    /// Minimum energy by exhaustive enumeration of the dense global matrix.
    pub fn brute_force_energy(&self) -> Result<f64> {
        if self.dim > MAX_DIM {
            return Err(Error::DimensionOverCap {
                dim: self.dim,
                cap: MAX_DIM,
            });
        }
        use rayon::prelude::*;
        let min = (0..1usize << self.dim)
            .into_par_iter()
            .map(|idx| quadratic_form(&self.q, self.dim, idx))
            .reduce(|| f64::INFINITY, f64::min);
        Ok(min + self.offset)
    }
}

pub fn assemble_global(blocks: &[CableQubo]) -> Result<GlobalQubo> {
    let first = blocks
        .first()
        .ok_or_else(|| Error::InvalidArgument("no blocks to assemble".into()))?;
    if let Some(other) = blocks
        .iter()
        .find(|b| b.instance_name != first.instance_name)
    {
        return Err(Error::MixedInstances(
            first.instance_name.clone(),
            other.instance_name.clone(),
        ));
    }
    let dim: usize = blocks.iter().map(|b| b.dim).sum();
    let mut q = vec![0.0; dim * dim];
    let mut variables = Vec::with_capacity(dim);
    let mut ranges = Vec::with_capacity(blocks.len());
    let mut start = 0;
    for block in blocks {
        for i in 0..block.dim {
            for j in 0..block.dim {
                q[(start + i) * dim + start + j] = block.entry(i, j);
            }
        }
        variables.extend(
            block
                .vmap
                .labels()
                .into_iter()
                .map(|l| format!("{}/{l}", block.cable_id)),
        );
        ranges.push((block.cable_id.clone(), start..start + block.dim));
        start += block.dim;
    }
    Ok(GlobalQubo {
        instance_name: first.instance_name.clone(),
        dim,
        q,
        offset: blocks.iter().map(|b| b.offset).sum(),
        variables,
        blocks: ranges,
    })
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::instance::tests::triangle;
    use crate::instance::{bundled_layouts, parse_instance};

    pub(crate) fn triangle_qubo() -> CableQubo {
        let t = triangle();
        let c = &t.cables()[0];
        build_cable_qubo(&t, c, &default_penalties(&t, c)).unwrap()
    }

    /// Triangle where AC costs 3 instead of the alpha*length default.
    fn priced_triangle() -> Instance {
        parse_instance(
            &crate::instance::tests::TRIANGLE
                .replace(r#""alpha": 1.0"#, r#""costs": {"AB": 1, "BC": 1, "AC": 3}"#),
        )
        .unwrap()
    }

    /// Penalties evaluated straight from the constraint expressions.
    pub(crate) fn direct_energy(
        instance: &Instance,
        cable: &Cable,
        p: &PenaltyWeights,
        z: &Bitstring,
    ) -> f64 {
        let d = instance.segments().len();
        let internal = instance.internal_nodes(cable);
        let x = |s: usize| f64::from(u8::from(z.get(s)));
        let degree =
            |k: usize| -> f64 { instance.incident_by_index(k).iter().map(|&s| x(s)).sum() };
        let objective: f64 = (0..d).map(|s| cable.costs[s] * x(s)).sum();
        let start = (degree(cable.source_index()) - 1.0).powi(2);
        let term = (degree(cable.terminal_index()) - 1.0).powi(2);
        let mut flow = 0.0;
        let mut selection = 0.0;
        for (pos, &k) in internal.iter().enumerate() {
            let bk = f64::from(u8::from(z.get(d + pos)));
            flow += (degree(k) - 2.0 * bk).powi(2);
            for &s in instance.incident_by_index(k) {
                selection += x(s) - x(s) * bk;
            }
        }
        objective + p.eta1 * start + p.eta2 * term + p.eta3 * flow + p.eta4 * selection
    }

    #[test]
    fn triangle_penalties() {
        let t = priced_triangle();
        let p = default_penalties(&t, &t.cables()[0]);
        assert_eq!((p.w1, p.w2, p.w3), (4.0, 4.0, 2.0));
        assert_eq!(p.etas(), [5.0, 5.0, 3.0, 1.0]);
        assert_eq!(p.kappa, 1.0);
    }

    #[test]
    fn zero_costs_give_unit_penalties() {
        let t = parse_instance(
            &crate::instance::tests::TRIANGLE.replace(r#""alpha": 1.0"#, r#""alpha": 0.0"#),
        )
        .unwrap();
        assert_eq!(default_penalties(&t, &t.cables()[0]).etas(), [1.0; 4]);
    }

    #[test]
    fn layout_one_penalties_match_incidence_sums() {
        let l = &bundled_layouts()[0];
        let c = &l.cables()[0];
        // c1 prices alpha=1 times length; n1 touches s12 (4) and s61 (3),
        // n4 touches s34 (3) and s45 (4.5), the busiest internal node n2
        // touches s12, s23, s25 (4 + 5 + 3.5).
        let p = default_penalties(l, c);
        assert_eq!((p.w1, p.w2, p.w3), (7.0, 7.5, 12.5));
        let brute_w3 = l
            .nodes()
            .iter()
            .filter(|n| n.id != c.source && n.id != c.terminal)
            .map(|n| {
                l.segments()
                    .iter()
                    .zip(&c.costs)
                    .filter(|(s, _)| s.u == n.id || s.v == n.id)
                    .map(|(_, &a)| a)
                    .sum::<f64>()
            })
            .fold(0.0, f64::max);
        assert_eq!(p.w3, brute_w3);
    }

    #[test]
    fn global_penalties_take_maxima() {
        let l = &bundled_layouts()[1];
        let g = global_penalties(l);
        for c in l.cables() {
            let p = default_penalties(l, c);
            assert!(g.w1 >= p.w1 && g.w2 >= p.w2 && g.w3 >= p.w3);
        }
        assert!(l
            .cables()
            .iter()
            .any(|c| default_penalties(l, c).w1 == g.w1));
        assert_eq!(penalties_for(l, &l.cables()[0], PenaltyMode::Global), g);
    }

    #[test]
    fn scaling() {
        let t = priced_triangle();
        let p = default_penalties(&t, &t.cables()[0]);
        let s = scale_penalties(&p, 2.0).unwrap();
        assert_eq!(s.etas(), [10.0, 10.0, 6.0, 2.0]);
        assert_eq!((s.w1, s.w2, s.w3, s.kappa), (p.w1, p.w2, p.w3, 2.0));
        assert_eq!(scale_penalties(&p, 1.0).unwrap(), p);
        let quarter = scale_penalties(&p, 0.25).unwrap();
        assert!(quarter.eta1 < 1.0 + quarter.w1);
        assert!(scale_penalties(&p, 0.0).is_err());
        assert!(scale_penalties(&p, -1.0).is_err());
        assert!(scale_penalties(&p, f64::NAN).is_err());
    }

    #[test]
    fn triangle_block_minimum_by_enumeration() {
        let t = priced_triangle();
        let c = &t.cables()[0];
        let q = build_cable_qubo(&t, c, &default_penalties(&t, c)).unwrap();
        assert_eq!(q.dim(), 4);
        let (best, energy) = (0..16usize)
            .map(|i| (i, q.energy_at(i)))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .unwrap();
        assert_eq!(Bitstring::from_index(best, 4).to_string(), "1101");
        assert_eq!(energy, 2.0);
        assert_eq!(q.offset, 10.0);
        assert_eq!(qubo_energy(&q, &Bitstring::zeros(4)).unwrap(), 10.0);
    }

    #[test]
    fn selection_violation_costs_at_least_eta4() {
        // x_AB = x_BC = 1 with b_B = 0 violates selection twice and flow
        // once at B; the repaired assignment sets b_B = 1.
        let q = triangle_qubo();
        let broken = qubo_energy(&q, &"1100".parse().unwrap()).unwrap();
        let repaired = qubo_energy(&q, &"1101".parse().unwrap()).unwrap();
        assert!(broken - repaired >= q.penalties.eta4);
        // One violated pair on a degree-one internal node: x_AB only, b_B
        // toggled. With b_B = 0 the flow term is 1 and selection adds 1;
        // with b_B = 1 the flow term is 1 and selection adds 0.
        let one_pair = qubo_energy(&q, &"1000".parse().unwrap()).unwrap();
        let one_pair_fixed = qubo_energy(&q, &"1001".parse().unwrap()).unwrap();
        assert_eq!(one_pair - one_pair_fixed, q.penalties.eta4);
    }

    #[test]
    fn energy_matches_direct_evaluation_exhaustively_on_triangle() {
        let t = priced_triangle();
        let c = &t.cables()[0];
        let p = scale_penalties(&default_penalties(&t, c), 0.75).unwrap();
        let q = build_cable_qubo(&t, c, &p).unwrap();
        for idx in 0..16 {
            let z = Bitstring::from_index(idx, 4);
            assert!((qubo_energy(&q, &z).unwrap() - direct_energy(&t, c, &p, &z)).abs() < 1e-12);
        }
    }

    #[test]
    fn length_mismatch_is_an_error() {
        let q = triangle_qubo();
        assert!(matches!(
            qubo_energy(&q, &Bitstring::zeros(3)),
            Err(Error::LengthMismatch {
                expected: 4,
                actual: 3
            })
        ));
    }

    #[test]
    fn negative_penalties_are_rejected() {
        let t = triangle();
        let c = &t.cables()[0];
        let mut p = default_penalties(&t, c);
        p.eta3 = -1.0;
        assert!(build_cable_qubo(&t, c, &p).is_err());
    }

    #[test]
    fn blocks_are_symmetric_with_expected_offset() {
        for l in bundled_layouts() {
            for c in l.cables() {
                let p = default_penalties(&l, c);
                let q = build_cable_qubo(&l, c, &p).unwrap();
                assert!(q.asymmetry() <= 1e-12);
                assert_eq!(q.offset, p.eta1 + p.eta2);
                assert_eq!(q.dim(), l.block_dim());
                assert_eq!(q.vmap.len(), q.dim());
            }
        }
    }

    #[test]
    fn global_assembly() {
        let l = &bundled_layouts()[0];
        let blocks: Vec<_> = l
            .cables()
            .iter()
            .map(|c| build_cable_qubo(l, c, &default_penalties(l, c)).unwrap())
            .collect();
        let g = assemble_global(&blocks).unwrap();
        assert_eq!(g.dim(), 44);
        assert_eq!(g.variables.len(), 44);
        assert_eq!(g.variables[0], "c1/x:s12");
        assert_eq!(g.blocks[1].1, 11..22);
        assert_eq!(g.offset, blocks.iter().map(|b| b.offset).sum::<f64>());

        let single = assemble_global(&blocks[..1]).unwrap();
        assert_eq!(single.dim(), 11);
        for i in 0..11 {
            for j in 0..11 {
                assert_eq!(single.entry(i, j), blocks[0].entry(i, j));
            }
        }

        let other = triangle_qubo();
        assert!(matches!(
            assemble_global(&[blocks[0].clone(), other]),
            Err(Error::MixedInstances(..))
        ));
        assert!(assemble_global(&[]).is_err());
    }
}
