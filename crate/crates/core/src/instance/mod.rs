//! Routing layouts: an undirected graph of segments and the cables laid
//! over it.
//!
//! An [`Instance`] only exists in validated form. Segment order as it
//! appears in the document is the variable order used everywhere
//! downstream.

mod bundled;

use std::collections::{BTreeMap, HashMap, HashSet, VecDeque};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use bundled::{bundled_layout, bundled_layouts, BUNDLED_NAMES};

#[derive(Clone, Debug, PartialEq)]
pub struct Node {
    pub id: String,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Segment {
    pub id: String,
    pub u: String,
    pub v: String,
    /// Length in meters.
    pub length: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Cable {
    pub id: String,
    pub source: String,
    pub terminal: String,
    /// Per-segment cost, indexed like [`Instance::segments`]. A scalar cost
    /// rate in the document is expanded to `alpha * length` at parse time.
    pub costs: Vec<f64>,
    pub max_length: Option<f64>,
    source_idx: usize,
    terminal_idx: usize,
}

impl Cable {
    pub fn source_index(&self) -> usize {
        self.source_idx
    }

    pub fn terminal_index(&self) -> usize {
        self.terminal_idx
    }
}

/// Validated, immutable routing layout.
#[derive(Clone, Debug, PartialEq)]
pub struct Instance {
    name: String,
    nodes: Vec<Node>,
    segments: Vec<Segment>,
    cables: Vec<Cable>,
    node_index: HashMap<String, usize>,
    endpoints: Vec<(usize, usize)>,
    incidence: Vec<Vec<usize>>,
}

impl Instance {
    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    pub fn cables(&self) -> &[Cable] {
        &self.cables
    }

    pub fn cable(&self, id: &str) -> Result<&Cable> {
        self.cables
            .iter()
            .find(|c| c.id == id)
            .ok_or_else(|| Error::UnknownCable(id.to_string()))
    }

    pub fn cable_position(&self, id: &str) -> Result<usize> {
        self.cables
            .iter()
            .position(|c| c.id == id)
            .ok_or_else(|| Error::UnknownCable(id.to_string()))
    }

    pub fn node_index(&self, id: &str) -> Result<usize> {
        self.node_index
            .get(id)
            .copied()
            .ok_or_else(|| Error::UnknownNode(id.to_string()))
    }

    /// Node indices of a segment's two endpoints.
    pub fn endpoints(&self, segment: usize) -> (usize, usize) {
        self.endpoints[segment]
    }

    /// Indices of all segments touching `node`, in segment order.
    pub fn incident_segments(&self, node: &str) -> Result<&[usize]> {
        let k = self.node_index(node)?;
        Ok(&self.incidence[k])
    }

    pub fn incident_by_index(&self, node: usize) -> &[usize] {
        &self.incidence[node]
    }

    /// Node indices of the internal set (all nodes but source and terminal),
    /// ordered by node id.
    pub fn internal_nodes(&self, cable: &Cable) -> Vec<usize> {
        let mut internal: Vec<usize> = (0..self.nodes.len())
            .filter(|&k| k != cable.source_idx && k != cable.terminal_idx)
            .collect();
        internal.sort_by(|&a, &b| self.nodes[a].id.cmp(&self.nodes[b].id));
        internal
    }

    /// Number of binary variables in one cable block: segments plus
    /// internal nodes.
    pub fn block_dim(&self) -> usize {
        self.segments.len() + self.nodes.len() - 2
    }
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct InstanceDoc {
    name: String,
    nodes: Vec<NodeDoc>,
    segments: Vec<SegmentDoc>,
    cables: Vec<CableDoc>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct NodeDoc {
    id: String,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SegmentDoc {
    id: String,
    u: String,
    v: String,
    length: f64,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CableDoc {
    id: String,
    source: String,
    terminal: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    alpha: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    costs: Option<BTreeMap<String, f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    max_length: Option<f64>,
}

/// Parses and validates an instance document.
pub fn parse_instance(text: &str) -> Result<Instance> {
    let doc: InstanceDoc = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    from_doc(doc)
}

/// Renders an instance as a document; cable costs are always written in
/// per-segment form.
pub fn render_instance(instance: &Instance) -> String {
    let doc = InstanceDoc {
        name: instance.name.clone(),
        nodes: instance
            .nodes
            .iter()
            .map(|n| NodeDoc { id: n.id.clone() })
            .collect(),
        segments: instance
            .segments
            .iter()
            .map(|s| SegmentDoc {
                id: s.id.clone(),
                u: s.u.clone(),
                v: s.v.clone(),
                length: s.length,
            })
            .collect(),
        cables: instance
            .cables
            .iter()
            .map(|c| CableDoc {
                id: c.id.clone(),
                source: c.source.clone(),
                terminal: c.terminal.clone(),
                alpha: None,
                costs: Some(
                    instance
                        .segments
                        .iter()
                        .zip(&c.costs)
                        .map(|(s, &a)| (s.id.clone(), a))
                        .collect(),
                ),
                max_length: c.max_length,
            })
            .collect(),
    };
    serde_json::to_string_pretty(&doc).expect("instance documents always serialize")
}

fn nonnegative(value: f64) -> bool {
    value.is_finite() && value >= 0.0
}

fn from_doc(doc: InstanceDoc) -> Result<Instance> {
    if doc.nodes.is_empty() {
        return Err(Error::validation("empty-nodes", "instance has no nodes"));
    }
    let mut node_index = HashMap::new();
    for (k, n) in doc.nodes.iter().enumerate() {
        if n.id.is_empty() {
            return Err(Error::validation(
                "empty-id",
                format!("node #{k} has an empty id"),
            ));
        }
        if node_index.insert(n.id.clone(), k).is_some() {
            return Err(Error::validation(
                "duplicate-id",
                format!("duplicate node id '{}'", n.id),
            ));
        }
    }

    let mut segment_index = HashMap::new();
    let mut pairs = HashSet::new();
    let mut endpoints = Vec::with_capacity(doc.segments.len());
    let mut incidence = vec![Vec::new(); doc.nodes.len()];
    for (s, seg) in doc.segments.iter().enumerate() {
        if seg.id.is_empty() {
            return Err(Error::validation(
                "empty-id",
                format!("segment #{s} has an empty id"),
            ));
        }
        if segment_index.insert(seg.id.clone(), s).is_some() {
            return Err(Error::validation(
                "duplicate-id",
                format!("duplicate segment id '{}'", seg.id),
            ));
        }
        let lookup = |id: &str| {
            node_index.get(id).copied().ok_or_else(|| {
                Error::validation(
                    "dangling-node",
                    format!("segment '{}' references unknown node '{id}'", seg.id),
                )
            })
        };
        let (u, v) = (lookup(&seg.u)?, lookup(&seg.v)?);
        if u == v {
            return Err(Error::validation(
                "self-loop",
                format!("segment '{}' connects node '{}' to itself", seg.id, seg.u),
            ));
        }
        if !pairs.insert((u.min(v), u.max(v))) {
            return Err(Error::validation(
                "parallel-segment",
                format!(
                    "segment '{}' duplicates the node pair ('{}', '{}')",
                    seg.id, seg.u, seg.v
                ),
            ));
        }
        if !nonnegative(seg.length) {
            return Err(Error::validation(
                "negative-length",
                format!("segment '{}' has invalid length {}", seg.id, seg.length),
            ));
        }
        endpoints.push((u, v));
        incidence[u].push(s);
        incidence[v].push(s);
    }

    let component = components(doc.nodes.len(), &endpoints);
    if component.iter().any(|&c| c != 0) {
        let k = component.iter().position(|&c| c != 0).unwrap_or(0);
        return Err(Error::validation(
            "disconnected",
            format!(
                "layout graph is not connected (node '{}' unreachable)",
                doc.nodes[k].id
            ),
        ));
    }

    if doc.cables.is_empty() {
        return Err(Error::validation("no-cables", "instance has no cables"));
    }
    let mut cable_ids = HashSet::new();
    let mut cables = Vec::with_capacity(doc.cables.len());
    for cd in doc.cables {
        if cd.id.is_empty() {
            return Err(Error::validation("empty-id", "cable with an empty id"));
        }
        if !cable_ids.insert(cd.id.clone()) {
            return Err(Error::validation(
                "duplicate-id",
                format!("duplicate cable id '{}'", cd.id),
            ));
        }
        let lookup = |role: &str, id: &str| {
            node_index.get(id).copied().ok_or_else(|| {
                Error::validation(
                    "dangling-node",
                    format!("cable '{}' {role} references unknown node '{id}'", cd.id),
                )
            })
        };
        let source_idx = lookup("source", &cd.source)?;
        let terminal_idx = lookup("terminal", &cd.terminal)?;
        if source_idx == terminal_idx {
            return Err(Error::validation(
                "source-equals-terminal",
                format!("cable '{}' starts and ends at '{}'", cd.id, cd.source),
            ));
        }
        if component[source_idx] != component[terminal_idx] {
            return Err(Error::validation(
                "disconnected",
                format!("cable '{}' source and terminal are not connected", cd.id),
            ));
        }
        let costs = match (cd.alpha, cd.costs) {
            (Some(alpha), None) => {
                if !nonnegative(alpha) {
                    return Err(Error::validation(
                        "negative-cost",
                        format!("cable '{}' has invalid alpha {alpha}", cd.id),
                    ));
                }
                doc.segments.iter().map(|s| alpha * s.length).collect()
            }
            (None, Some(map)) => {
                if let Some(unknown) = map.keys().find(|k| !segment_index.contains_key(*k)) {
                    return Err(Error::validation(
                        "dangling-segment",
                        format!("cable '{}' prices unknown segment '{unknown}'", cd.id),
                    ));
                }
                let mut costs = Vec::with_capacity(doc.segments.len());
                for s in &doc.segments {
                    let a = *map.get(&s.id).ok_or_else(|| {
                        Error::validation(
                            "incomplete-costs",
                            format!("cable '{}' has no cost for segment '{}'", cd.id, s.id),
                        )
                    })?;
                    if !nonnegative(a) {
                        return Err(Error::validation(
                            "negative-cost",
                            format!("cable '{}' has invalid cost {a} on '{}'", cd.id, s.id),
                        ));
                    }
                    costs.push(a);
                }
                costs
            }
            _ => {
                return Err(Error::validation(
                    "cost-model",
                    format!("cable '{}' needs exactly one of 'alpha' or 'costs'", cd.id),
                ))
            }
        };
        if let Some(m) = cd.max_length {
            if !nonnegative(m) {
                return Err(Error::validation(
                    "negative-length",
                    format!("cable '{}' has invalid max_length {m}", cd.id),
                ));
            }
        }
        cables.push(Cable {
            id: cd.id,
            source: cd.source,
            terminal: cd.terminal,
            costs,
            max_length: cd.max_length,
            source_idx,
            terminal_idx,
        });
    }

    Ok(Instance {
        name: doc.name,
        nodes: doc.nodes.into_iter().map(|n| Node { id: n.id }).collect(),
        segments: doc
            .segments
            .into_iter()
            .map(|s| Segment {
                id: s.id,
                u: s.u,
                v: s.v,
                length: s.length,
            })
            .collect(),
        cables,
        node_index,
        endpoints,
        incidence,
    })
}

/// Component label per node, labels assigned in order of first appearance.
fn components(n: usize, endpoints: &[(usize, usize)]) -> Vec<usize> {
    let mut adj = vec![Vec::new(); n];
    for &(u, v) in endpoints {
        adj[u].push(v);
        adj[v].push(u);
    }
    let mut label = vec![usize::MAX; n];
    let mut next = 0;
    for start in 0..n {
        if label[start] != usize::MAX {
            continue;
        }
        label[start] = next;
        let mut queue = VecDeque::from([start]);
        while let Some(k) = queue.pop_front() {
            for &w in &adj[k] {
                if label[w] == usize::MAX {
                    label[w] = next;
                    queue.push_back(w);
                }
            }
        }
        next += 1;
    }
    label
}
