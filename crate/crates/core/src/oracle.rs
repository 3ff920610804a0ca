//! Classical ground truth: a literal feasibility check of the routing
//! constraints, exhaustive block minimization, and a shortest-path optimum.

use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashMap};

use rayon::prelude::*;
use serde::Serialize;

use crate::bits::{lex_key, Bitstring};
use crate::error::{Error, Result};
use crate::instance::{Cable, Instance};
use crate::qubo::{
    build_cable_qubo, default_penalties, qubo_energy, BitEnergy, CableQubo, VariableMap, MAX_DIM,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ConstraintKind {
    Start,
    Terminal,
    Flow,
    Selection,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Violation {
    pub constraint: ConstraintKind,
    /// Node id, or `node:segment` for selection pairs.
    pub location: String,
    /// Degree for start/terminal, `degree - 2 b` for flow, 1 per pair for
    /// selection.
    pub measured: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FeasibilityReport {
    /// Start, terminal, flow and selection constraints all hold.
    pub feasible_model: bool,
    /// Model-feasible and the used segments form exactly one simple
    /// source-terminal path.
    pub feasible_path: bool,
    pub violations: Vec<Violation>,
    pub route: Option<Vec<String>>,
    /// Post-hoc length-cap verdict, when the cable has a cap.
    pub within_length_cap: Option<bool>,
}

pub fn check_feasibility(
    instance: &Instance,
    cable: &Cable,
    z: &Bitstring,
) -> Result<FeasibilityReport> {
    check_block(&VariableMap::new(instance, cable), z)
}

/// Same check driven by a block's variable map.
pub fn check_block(vmap: &VariableMap, z: &Bitstring) -> Result<FeasibilityReport> {
    if z.len() != vmap.len() {
        return Err(Error::LengthMismatch {
            expected: vmap.len(),
            actual: z.len(),
        });
    }
    let d = vmap.num_segments();
    let mut degree: HashMap<&str, usize> = HashMap::new();
    for (s, seg) in vmap.segment_vars.iter().enumerate() {
        if z.get(s) {
            *degree.entry(&seg.u).or_default() += 1;
            *degree.entry(&seg.v).or_default() += 1;
        }
    }
    let deg = |k: &str| degree.get(k).copied().unwrap_or(0);

    let mut violations = Vec::new();
    for (kind, node) in [
        (ConstraintKind::Start, &vmap.source),
        (ConstraintKind::Terminal, &vmap.terminal),
    ] {
        if deg(node) != 1 {
            violations.push(Violation {
                constraint: kind,
                location: node.clone(),
                measured: deg(node) as f64,
            });
        }
    }
    for (pos, k) in vmap.node_vars.iter().enumerate() {
        let b = z.get(d + pos);
        let residual = deg(k) as i64 - 2 * i64::from(b);
        if residual != 0 {
            violations.push(Violation {
                constraint: ConstraintKind::Flow,
                location: k.clone(),
                measured: residual as f64,
            });
        }
    }
    for (pos, k) in vmap.node_vars.iter().enumerate() {
        if z.get(d + pos) {
            continue;
        }
        for (s, seg) in vmap.segment_vars.iter().enumerate() {
            if z.get(s) && (seg.u == *k || seg.v == *k) {
                violations.push(Violation {
                    constraint: ConstraintKind::Selection,
                    location: format!("{k}:{}", seg.id),
                    measured: 1.0,
                });
            }
        }
    }

    let feasible_model = violations.is_empty();
    let route = if feasible_model {
        walk_route(vmap, z)
    } else {
        None
    };
    let within_length_cap = vmap.max_length.map(|cap| vmap.routed_length(z) <= cap);
    Ok(FeasibilityReport {
        feasible_model,
        feasible_path: route.is_some(),
        violations,
        route,
        within_length_cap,
    })
}

/// Follows used segments from the source. Returns the node sequence when
/// the walk reaches the terminal and consumes every used segment.
fn walk_route(vmap: &VariableMap, z: &Bitstring) -> Option<Vec<String>> {
    let used: Vec<usize> = (0..vmap.num_segments()).filter(|&s| z.get(s)).collect();
    let mut taken = vec![false; vmap.num_segments()];
    let mut route = vec![vmap.source.clone()];
    let mut current = vmap.source.as_str();
    while current != vmap.terminal {
        let next = used.iter().copied().find(|&s| {
            let seg = &vmap.segment_vars[s];
            !taken[s] && (seg.u == current || seg.v == current)
        })?;
        taken[next] = true;
        let seg = &vmap.segment_vars[next];
        current = if seg.u == current { &seg.v } else { &seg.u };
        route.push(current.to_string());
    }
    (route.len() - 1 == used.len()).then_some(route)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OracleSolution {
    pub bitstring: Bitstring,
    pub energy: f64,
    /// Routing cost of the chosen segments.
    pub objective: f64,
    /// Node sequence when the bitstring is a feasible path.
    pub route: Option<Vec<String>>,
}

fn better(a: (f64, usize), b: (f64, usize)) -> bool {
    match a.0.total_cmp(&b.0) {
        Ordering::Less => true,
        Ordering::Equal => a.1 < b.1,
        Ordering::Greater => false,
    }
}

/// Exhaustive minimum over all `2^dim` assignments; ties go to the
/// lexicographically smallest bitstring.
pub fn brute_force_min(q: &CableQubo) -> Result<OracleSolution> {
    let dim = q.dim();
    if dim > MAX_DIM {
        return Err(Error::DimensionOverCap { dim, cap: MAX_DIM });
    }
    let (energy, key, index) = (0..1usize << dim)
        .into_par_iter()
        .map(|idx| (q.energy_at(idx), lex_key(idx, dim), idx))
        .reduce(
            || (f64::INFINITY, usize::MAX, 0),
            |a, b| if better((b.0, b.1), (a.0, a.1)) { b } else { a },
        );
    debug_assert!(key != usize::MAX);
    let bitstring = Bitstring::from_index(index, dim);
    let report = check_block(&q.vmap, &bitstring)?;
    Ok(OracleSolution {
        objective: q.vmap.objective(&bitstring),
        energy,
        route: report.route,
        bitstring,
    })
}

#[derive(Clone, Copy, PartialEq)]
struct Label {
    cost: f64,
    node: usize,
}

impl Eq for Label {}

impl Ord for Label {
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .cost
            .total_cmp(&self.cost)
            .then_with(|| other.node.cmp(&self.node))
    }
}

impl PartialOrd for Label {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Minimum-cost simple path by label-setting search over the cable's
/// nonnegative segment costs. `energy` is evaluated on the baseline block.
pub fn shortest_path_opt(instance: &Instance, cable: &Cable) -> Result<OracleSolution> {
    let n = instance.nodes().len();
    let (src, dst) = (cable.source_index(), cable.terminal_index());
    let mut dist = vec![f64::INFINITY; n];
    let mut via: Vec<Option<usize>> = vec![None; n];
    let mut done = vec![false; n];
    let mut heap = BinaryHeap::from([Label {
        cost: 0.0,
        node: src,
    }]);
    dist[src] = 0.0;
    while let Some(Label { cost, node }) = heap.pop() {
        if done[node] {
            continue;
        }
        done[node] = true;
        if node == dst {
            break;
        }
        for &s in instance.incident_by_index(node) {
            let (u, v) = instance.endpoints(s);
            let other = if u == node { v } else { u };
            let next = cost + cable.costs[s];
            if !done[other] && next < dist[other] {
                dist[other] = next;
                via[other] = Some(s);
                heap.push(Label {
                    cost: next,
                    node: other,
                });
            }
        }
    }
    if !done[dst] {
        return Err(Error::validation(
            "disconnected",
            format!("cable '{}' terminal is unreachable", cable.id),
        ));
    }

    let d = instance.segments().len();
    let internal = instance.internal_nodes(cable);
    let mut bits = Bitstring::zeros(d + internal.len());
    let mut route = vec![dst];
    let mut node = dst;
    while let Some(s) = via[node] {
        bits.set(s, true);
        let (u, v) = instance.endpoints(s);
        node = if u == node { v } else { u };
        route.push(node);
    }
    route.reverse();
    for &k in &route[1..route.len() - 1] {
        let pos = internal
            .iter()
            .position(|&i| i == k)
            .expect("interior nodes are internal");
        bits.set(d + pos, true);
    }

    let q = build_cable_qubo(instance, cable, &default_penalties(instance, cable))?;
    Ok(OracleSolution {
        energy: qubo_energy(&q, &bits)?,
        objective: q.vmap.objective(&bits),
        route: Some(
            route
                .iter()
                .map(|&k| instance.nodes()[k].id.clone())
                .collect(),
        ),
        bitstring: bits,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::tests::triangle;
    use crate::instance::{bundled_layouts, parse_instance};
    use crate::qubo::tests::triangle_qubo;
    use crate::qubo::PenaltyWeights;

    fn bits(s: &str) -> Bitstring {
        s.parse().unwrap()
    }

    /// Simple source-terminal paths by depth-first enumeration.
    fn simple_paths(instance: &Instance, cable: &Cable) -> Vec<Vec<usize>> {
        fn dfs(
            inst: &Instance,
            at: usize,
            dst: usize,
            seen: &mut Vec<bool>,
            path: &mut Vec<usize>,
            out: &mut Vec<Vec<usize>>,
        ) {
            if at == dst {
                out.push(path.clone());
                return;
            }
            for &s in inst.incident_by_index(at) {
                let (u, v) = inst.endpoints(s);
                let next = if u == at { v } else { u };
                if !seen[next] {
                    seen[next] = true;
                    path.push(s);
                    dfs(inst, next, dst, seen, path, out);
                    path.pop();
                    seen[next] = false;
                }
            }
        }
        let mut seen = vec![false; instance.nodes().len()];
        seen[cable.source_index()] = true;
        let mut out = Vec::new();
        dfs(
            instance,
            cable.source_index(),
            cable.terminal_index(),
            &mut seen,
            &mut Vec::new(),
            &mut out,
        );
        out
    }

    #[test]
    fn triangle_reports() {
        let t = triangle();
        let c = &t.cables()[0];
        let r = check_feasibility(&t, c, &bits("1101")).unwrap();
        assert!(r.feasible_path && r.feasible_model && r.violations.is_empty());
        assert_eq!(r.route.unwrap(), vec!["A", "B", "C"]);

        let r = check_feasibility(&t, c, &bits("0010")).unwrap();
        assert!(r.feasible_path);
        assert_eq!(r.route.unwrap(), vec!["A", "C"]);

        let r = check_feasibility(&t, c, &bits("1000")).unwrap();
        assert!(!r.feasible_model && !r.feasible_path);
        let kinds: Vec<_> = r
            .violations
            .iter()
            .map(|v| (v.constraint, v.location.as_str(), v.measured))
            .collect();
        assert_eq!(
            kinds,
            vec![
                (ConstraintKind::Terminal, "C", 0.0),
                (ConstraintKind::Flow, "B", 1.0),
                (ConstraintKind::Selection, "B:AB", 1.0),
            ]
        );

        assert!(matches!(
            check_feasibility(&t, c, &bits("110")),
            Err(Error::LengthMismatch { .. })
        ));
    }

    #[test]
    fn path_plus_disjoint_cycle_is_model_feasible_only() {
        // Route n1 -> n8 directly over s81 while the square n2-n3-n6-n7
        // (s23, s36, s67, s27) forms a separate cycle.
        let text = include_str!("../data/layout-2.json").replace(
            r#""source": "n1", "terminal": "n5""#,
            r#""source": "n1", "terminal": "n8""#,
        );
        let inst = parse_instance(&text).unwrap();
        let c = &inst.cables()[0];
        assert_eq!(c.terminal, "n8");
        let vmap = VariableMap::new(&inst, c);
        let mut z = Bitstring::zeros(vmap.len());
        for id in ["s81", "s23", "s36", "s67", "s27"] {
            z.set(
                vmap.segment_vars.iter().position(|s| s.id == id).unwrap(),
                true,
            );
        }
        for k in ["n2", "n3", "n6", "n7"] {
            z.set(
                vmap.num_segments() + vmap.node_vars.iter().position(|n| n == k).unwrap(),
                true,
            );
        }
        let r = check_block(&vmap, &z).unwrap();
        assert!(r.feasible_model);
        assert!(!r.feasible_path);
        assert!(r.route.is_none());
    }

    #[test]
    fn length_cap_is_reported_post_hoc() {
        let l = &bundled_layouts()[0];
        let c = &l.cables()[0];
        let opt = shortest_path_opt(l, c).unwrap();
        let r = check_feasibility(l, c, &opt.bitstring).unwrap();
        assert_eq!(r.within_length_cap, Some(true));
        assert_eq!(
            check_feasibility(
                l,
                &l.cables()[1],
                &shortest_path_opt(l, &l.cables()[1]).unwrap().bitstring
            )
            .unwrap()
            .within_length_cap,
            None
        );
    }

    #[test]
    fn brute_force_on_triangle_and_zero_matrix() {
        let sol = brute_force_min(&triangle_qubo()).unwrap();
        assert_eq!(sol.bitstring.to_string(), "1101");
        assert_eq!(sol.energy, 2.0);
        assert_eq!(sol.objective, 2.0);
        assert_eq!(sol.route.unwrap(), vec!["A", "B", "C"]);

        let t = parse_instance(
            &crate::instance::tests::TRIANGLE.replace(r#""alpha": 1.0"#, r#""alpha": 0.0"#),
        )
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
        let q = build_cable_qubo(&t, &t.cables()[0], &zero).unwrap();
        let sol = brute_force_min(&q).unwrap();
        assert_eq!(sol.bitstring, Bitstring::zeros(4));
        assert_eq!(sol.energy, 0.0);
    }

    #[test]
    fn shortest_path_on_triangle_and_single_edge() {
        let t = triangle();
        let sol = shortest_path_opt(&t, &t.cables()[0]).unwrap();
        assert_eq!(sol.route.as_deref().unwrap(), ["A", "B", "C"]);
        assert_eq!(sol.objective, 2.0);
        assert_eq!(sol.energy, 2.0);
        assert_eq!(sol.bitstring.to_string(), "1101");

        let one = parse_instance(
            r#"{"name": "one", "nodes": [{"id": "a"}, {"id": "b"}],
                "segments": [{"id": "ab", "u": "a", "v": "b", "length": 2.5}],
                "cables": [{"id": "c", "source": "b", "terminal": "a", "alpha": 2}]}"#,
        )
        .unwrap();
        let sol = shortest_path_opt(&one, &one.cables()[0]).unwrap();
        assert_eq!(sol.objective, 5.0);
        assert_eq!(sol.route.unwrap(), vec!["b", "a"]);
    }

    #[test]
    fn bundled_cables_have_alternatives_and_unique_optima() {
        for l in bundled_layouts() {
            for c in l.cables() {
                let paths = simple_paths(&l, c);
                assert!(paths.len() >= 2, "{} {}", l.name(), c.id);
                let mut costs: Vec<f64> = paths
                    .iter()
                    .map(|p| p.iter().map(|&s| c.costs[s]).sum())
                    .collect();
                costs.sort_by(f64::total_cmp);
                assert!(costs[1] > costs[0], "{} {} has tied optima", l.name(), c.id);
                let sp = shortest_path_opt(&l, c).unwrap();
                assert_eq!(sp.objective, costs[0]);
                let r = check_feasibility(&l, c, &sp.bitstring).unwrap();
                assert!(r.feasible_path && r.violations.is_empty());
                assert_eq!(sp.energy, sp.objective);
            }
        }
    }

    #[test]
    fn dimension_cap() {
        // 26 variables: a 14-node ring has 14 segments and 12 internal nodes.
        let n = 14;
        let nodes: Vec<String> = (0..n).map(|i| format!(r#"{{"id": "v{i:02}"}}"#)).collect();
        let segs: Vec<String> = (0..n)
            .map(|i| {
                format!(
                    r#"{{"id": "e{i}", "u": "v{i:02}", "v": "v{:02}", "length": 1}}"#,
                    (i + 1) % n
                )
            })
            .collect();
        let text = format!(
            r#"{{"name": "ring", "nodes": [{}], "segments": [{}],
                "cables": [{{"id": "c", "source": "v00", "terminal": "v07", "alpha": 1}}]}}"#,
            nodes.join(","),
            segs.join(",")
        );
        let inst = parse_instance(&text).unwrap();
        let c = &inst.cables()[0];
        let q = build_cable_qubo(&inst, c, &default_penalties(&inst, c)).unwrap();
        assert_eq!(q.dim(), 26);
        assert!(matches!(
            brute_force_min(&q),
            Err(Error::DimensionOverCap { dim: 26, cap: 24 })
        ));
        assert_eq!(shortest_path_opt(&inst, c).unwrap().objective, 7.0);
    }
}
