//! The two bundled layouts.
//!
//! layout-1: 6 nodes, 7 segments, 4 cables (11 variables per cable).
//!
//! ```text
//!   n1 --s12-- n2 --s23-- n3
//!   |          |          |
//!  s61        s25        s34
//!   |          |          |
//!   n6 --s56-- n5 --s45-- n4
//! ```
//!
//! layout-2: 8 nodes, 10 segments, 4 cables (16 variables per cable).
//!
//! ```text
//!   n1 --s12-- n2 --s23-- n3 --s34-- n4
//!   |          |          |          |
//!  s81        s27        s36        s45
//!   |          |          |          |
//!   n8 --s78-- n7 --s67-- n6 --s56-- n5
//! ```
//!
//! Lengths and costs are multiples of 1/4 so block arithmetic is exact in
//! binary floating point. Every cable has several source-terminal paths
//! and a unique cheapest one.

use super::{parse_instance, Instance};

const LAYOUT_1: &str = include_str!("../../data/layout-1.json");
const LAYOUT_2: &str = include_str!("../../data/layout-2.json");

pub const BUNDLED_NAMES: [&str; 2] = ["layout-1", "layout-2"];

pub fn bundled_layouts() -> Vec<Instance> {
    [LAYOUT_1, LAYOUT_2]
        .iter()
        .map(|text| parse_instance(text).expect("bundled layouts are valid"))
        .collect()
}

pub fn bundled_layout(name: &str) -> Option<Instance> {
    bundled_layouts().into_iter().find(|l| l.name() == name)
}
