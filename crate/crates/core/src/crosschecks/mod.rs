//! Independent routes to quantities the recursion computes: a Pfaffian
//! formula for the largest eigenvalue, the odd/even inter-ensemble identity,
//! the Tricomi form of the smallest-eigenvalue density, Monte Carlo
//! samplers, and direct numerical integration for small `N`.

pub mod bruteforce;
pub mod ks;
pub mod oese;
pub mod pfaffian;
pub mod quad;
pub mod sampling;
pub mod tricomi;

use serde::Serialize;

/// Outcome of one comparison.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckRecord {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl CheckRecord {
    pub fn new(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Self {
        Self { name: name.into(), passed, detail: detail.into() }
    }
}
