//! JSON file format for algebras and subalgebra candidates.
//!
//! ```json
//! { "name": "chain3", "size": 3, "leq": [[1,1,1],[0,1,1],[0,0,1]], "inv": [2,1,0] }
//! ```
//!
//! Only the order and the involution are stored; every operation table is
//! recomputed at load time.

use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::algebra::{HIAlgebra, HiOps};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlgebraFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub size: usize,
    pub leq: Vec<Vec<u8>>,
    pub inv: Vec<usize>,
}

/// `{"power": n, "members": [tuple encodings]}`
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SubalgebraFile {
    pub power: usize,
    pub members: Vec<usize>,
}

/// Either kind of candidate accepted by the injectivity command.
#[derive(Clone, Debug, PartialEq, Eq, Deserialize)]
#[serde(untagged)]
pub enum CandidateFile {
    Subalgebra(SubalgebraFile),
    Algebra(AlgebraFile),
}

impl AlgebraFile {
    pub fn from_algebra(a: &HIAlgebra) -> Self {
        let n = a.size();
        AlgebraFile {
            name: a.name().map(str::to_owned),
            size: n,
            leq: (0..n).map(|i| (0..n).map(|j| a.leq(i, j) as u8).collect()).collect(),
            inv: a.involution().to_vec(),
        }
    }

    pub fn into_algebra(self) -> Result<HIAlgebra> {
        let n = self.size;
        if self.leq.len() != n {
            return Err(Error::Malformed(format!(
                "size is {n} but leq has {} rows",
                self.leq.len()
            )));
        }
        let mut rows = Vec::with_capacity(n);
        for (i, row) in self.leq.into_iter().enumerate() {
            if row.len() != n {
                return Err(Error::Malformed(format!("leq row {i} has length {}", row.len())));
            }
            let row: Result<Vec<bool>> = row
                .into_iter()
                .map(|v| match v {
                    0 => Ok(false),
                    1 => Ok(true),
                    other => Err(Error::Malformed(format!("leq entry {other} is not 0 or 1"))),
                })
                .collect();
            rows.push(row?);
        }
        let a = HIAlgebra::from_order(rows, self.inv)?;
        Ok(match self.name {
            Some(name) => a.with_name(name),
            None => a,
        })
    }

    /// Pretty form with one order row per line.
    pub fn to_json(&self) -> String {
        let mut out = String::from("{\n");
        if let Some(name) = &self.name {
            let _ = writeln!(out, "  \"name\": {},", serde_json::to_string(name).unwrap());
        }
        let _ = writeln!(out, "  \"size\": {},", self.size);
        out.push_str("  \"leq\": [\n");
        for (i, row) in self.leq.iter().enumerate() {
            let cells: Vec<String> = row.iter().map(u8::to_string).collect();
            let sep = if i + 1 < self.leq.len() { "," } else { "" };
            let _ = writeln!(out, "    [{}]{sep}", cells.join(", "));
        }
        out.push_str("  ],\n");
        let inv: Vec<String> = self.inv.iter().map(usize::to_string).collect();
        let _ = writeln!(out, "  \"inv\": [{}]", inv.join(", "));
        out.push_str("}\n");
        out
    }
}

pub fn parse_algebra(src: &str) -> Result<HIAlgebra> {
    serde_json::from_str::<AlgebraFile>(src)?.into_algebra()
}

pub fn algebra_to_json(a: &HIAlgebra) -> String {
    AlgebraFile::from_algebra(a).to_json()
}

pub fn load_algebra(path: impl AsRef<Path>) -> Result<HIAlgebra> {
    parse_algebra(&std::fs::read_to_string(path)?)
}

pub fn parse_candidate(src: &str) -> Result<CandidateFile> {
    Ok(serde_json::from_str(src)?)
}
