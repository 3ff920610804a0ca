//! Interchange document for a block in QUBO or Ising form.
//!
//! Terms are upper-triangular (`i <= j`) and zero entries are omitted.
//! QUBO: the diagonal holds the linear coefficient `Q_ii`; an
//! off-diagonal term holds the full coupling `2 Q_ij`, so
//! `E(z) = offset + Σ_{i<=j} value_ij z_i z_j` equals `zᵀQz + offset`.
//! Ising: the diagonal holds `h_i` and off-diagonal terms hold `J_ij`, so
//! `E(s) = offset + Σ_i value_ii s_i + Σ_{i<j} value_ij s_i s_j` with
//! `s = 1 - 2z`.

use serde::{Deserialize, Serialize};

use super::{ising::to_ising, CableQubo};
use crate::error::{Error, Result};

pub const QUBO_FORM: &str = "E(z) = offset + sum_{i<=j} value_ij * z_i * z_j, z in {0,1}";
pub const ISING_FORM: &str =
    "E(s) = offset + sum_i value_ii * s_i + sum_{i<j} value_ij * s_i * s_j, s = 1 - 2z in {-1,+1}";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ExportKind {
    Qubo,
    Ising,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExportTerm {
    pub i: usize,
    pub j: usize,
    pub value: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExportDocument {
    pub kind: ExportKind,
    pub form: String,
    pub cable_id: String,
    pub dim: usize,
    pub offset: f64,
    pub variables: Vec<String>,
    pub terms: Vec<ExportTerm>,
}

impl ExportDocument {
    pub fn qubo(q: &CableQubo) -> Self {
        let n = q.dim();
        let mut terms = Vec::new();
        for i in 0..n {
            for j in i..n {
                let value = if i == j {
                    q.entry(i, i)
                } else {
                    2.0 * q.entry(i, j)
                };
                if value != 0.0 {
                    terms.push(ExportTerm { i, j, value });
                }
            }
        }
        ExportDocument {
            kind: ExportKind::Qubo,
            form: QUBO_FORM.into(),
            cable_id: q.cable_id.clone(),
            dim: n,
            offset: q.offset,
            variables: q.vmap.labels(),
            terms,
        }
    }

    pub fn ising(q: &CableQubo) -> Self {
        let m = to_ising(q);
        let n = m.num_spins();
        let mut terms = Vec::new();
        for i in 0..n {
            for j in i..n {
                let value = if i == j { m.h[i] } else { m.coupling(i, j) };
                if value != 0.0 {
                    terms.push(ExportTerm { i, j, value });
                }
            }
        }
        ExportDocument {
            kind: ExportKind::Ising,
            form: ISING_FORM.into(),
            cable_id: q.cable_id.clone(),
            dim: n,
            offset: m.constant,
            variables: q.vmap.labels(),
            terms,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("export documents always serialize")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: ExportDocument =
            serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        if doc.variables.len() != doc.dim {
            return Err(Error::Schema(format!(
                "{} variable labels for dim {}",
                doc.variables.len(),
                doc.dim
            )));
        }
        if let Some(t) = doc.terms.iter().find(|t| t.i > t.j || t.j >= doc.dim) {
            return Err(Error::Schema(format!(
                "term ({}, {}) out of range",
                t.i, t.j
            )));
        }
        Ok(doc)
    }

    /// Energy of a binary assignment, evaluated from the document alone.
    pub fn energy(&self, z: &[bool]) -> f64 {
        assert_eq!(z.len(), self.dim, "assignment length");
        let value_of = |x: bool| match self.kind {
            ExportKind::Qubo => f64::from(u8::from(x)),
            ExportKind::Ising => {
                if x {
                    -1.0
                } else {
                    1.0
                }
            }
        };
        self.terms.iter().fold(self.offset, |acc, t| {
            if t.i == t.j {
                acc + t.value * value_of(z[t.i])
            } else {
                acc + t.value * value_of(z[t.i]) * value_of(z[t.j])
            }
        })
    }
}
