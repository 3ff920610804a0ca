//! Binary assignments and the index convention shared by every module.
//!
//! Variable `i` of a block is qubit `i` of the ansatz, bit `i` of a basis
//! index (little-endian), and character `i` of the rendered bitstring.

use std::fmt;
use std::str::FromStr;

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Bitstring(Vec<bool>);

impl Bitstring {
    pub fn zeros(len: usize) -> Self {
        Bitstring(vec![false; len])
    }

    pub fn from_bits(bits: Vec<bool>) -> Self {
        Bitstring(bits)
    }

    /// Decodes a basis index of a `len`-bit register.
    pub fn from_index(index: usize, len: usize) -> Self {
        Bitstring((0..len).map(|i| index >> i & 1 == 1).collect())
    }

    pub fn to_index(&self) -> usize {
        self.0
            .iter()
            .enumerate()
            .fold(0, |acc, (i, &b)| acc | (usize::from(b) << i))
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

    pub fn get(&self, i: usize) -> bool {
        self.0[i]
    }

    pub fn set(&mut self, i: usize, value: bool) {
        self.0[i] = value;
    }

    pub fn flip(&mut self, i: usize) {
        self.0[i] = !self.0[i];
    }

    pub fn count_ones(&self) -> usize {
        self.0.iter().filter(|&&b| b).count()
    }

    pub fn concat<'a>(parts: impl IntoIterator<Item = &'a Bitstring>) -> Self {
        Bitstring(
            parts
                .into_iter()
                .flat_map(|p| p.0.iter().copied())
                .collect(),
        )
    }
}

/// Ordering key under which smaller keys are lexicographically smaller
/// bitstrings (character 0 most significant).
pub fn lex_key(index: usize, len: usize) -> usize {
    if len == 0 {
        return 0;
    }
    index.reverse_bits() >> (usize::BITS as usize - len)
}

impl fmt::Display for Bitstring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.0 {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl Serialize for Bitstring {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl FromStr for Bitstring {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        s.chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(Error::Parse(format!("invalid bit character '{other}'"))),
            })
            .collect::<Result<Vec<_>>>()
            .map(Bitstring)
    }
}
