//! JSON interchange for frames and polarity contexts, and DOT export of
//! cover graphs.
//!
//! The JSON conventions are fixed so identical inputs always serialize to
//! identical bytes: struct fields are declared in lexicographic order, maps
//! are sorted, and no value is ever a float.

use std::fmt;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::lattice::{FiniteLattice, Frame, LatticeError};
use crate::polarity::Polarity;

/// A finite partial order in JSON: unique labels and a list of `[i, j]`
/// pairs meaning element `i ≤ j`. Reflexivity and transitivity are supplied
/// automatically; antisymmetry, lattice structure and the frame law are
/// validated on load.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FrameSpec {
    pub labels: Vec<String>,
    pub leq: Vec<(usize, usize)>,
}

/// Why a [`FrameSpec`] or [`ContextSpec`] failed to load.
#[derive(Debug)]
pub enum LoadError {
    /// The file was unreadable or the data malformed (bad JSON, indices out
    /// of range).
    Input(String),
    /// The order loaded but is not a lattice, or not a frame.
    Lattice(LatticeError),
}

impl fmt::Display for LoadError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LoadError::Input(message) => write!(f, "{message}"),
            LoadError::Lattice(e) => write!(f, "{e}"),
        }
    }
}

impl FrameSpec {
    /// Dump a frame back out in the interchange format. The `leq` list holds
    /// the cover pairs — the smallest relation whose reflexive-transitive
    /// closure restores the order.
    pub fn from_frame(frame: &Frame) -> Self {
        let lat = frame.lattice();
        let mut leq = Vec::new();
        for a in 0..lat.n() {
            for b in 0..lat.n() {
                if lat.covers(a, b) {
                    leq.push((a, b));
                }
            }
        }
        FrameSpec {
            labels: (0..lat.n()).map(|a| lat.label(a).to_string()).collect(),
            leq,
        }
    }

    /// Reconstruct the order and validate it all the way to a frame.
    pub fn into_frame(self) -> Result<Frame, LoadError> {
        let n = self.labels.len();
        if n == 0 {
            return Err(LoadError::Input("the frame needs at least one element".into()));
        }
        if n > 64 {
            return Err(LoadError::Input(format!(
                "{n} elements exceed the supported 64"
            )));
        }
        let mut leq = vec![vec![false; n]; n];
        for (i, row) in leq.iter_mut().enumerate() {
            row[i] = true;
        }
        for &(i, j) in &self.leq {
            if i >= n || j >= n {
                return Err(LoadError::Input(format!(
                    "leq pair [{i}, {j}] is out of range for {n} labels"
                )));
            }
            leq[i][j] = true;
        }
        for k in 0..n {
            for i in 0..n {
                if leq[i][k] {
                    for j in 0..n {
                        if leq[k][j] {
                            leq[i][j] = true;
                        }
                    }
                }
            }
        }
        let lat = FiniteLattice::from_order(self.labels, |a, b| leq[a][b])
            .map_err(LoadError::Lattice)?;
        Frame::new(lat).map_err(LoadError::Lattice)
    }
}

/// Load a frame from a JSON file in the [`FrameSpec`] format.
pub fn load_frame(path: &Path) -> Result<Frame, LoadError> {
    let text = fs::read_to_string(path)
        .map_err(|e| LoadError::Input(format!("cannot read {}: {e}", path.display())))?;
    let spec: FrameSpec = serde_json::from_str(&text)
        .map_err(|e| LoadError::Input(format!("{} is not a frame spec: {e}", path.display())))?;
    spec.into_frame()
}

/// A polarity context in JSON: carrier sizes and the related `[x, y]` pairs.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ContextSpec {
    pub pairs: Vec<(usize, usize)>,
    pub x: usize,
    pub y: usize,
}

impl ContextSpec {
    pub fn into_polarity(self) -> Result<Polarity, LoadError> {
        let mut rel = vec![vec![false; self.y]; self.x.max(1)];
        for &(i, j) in &self.pairs {
            if i >= self.x || j >= self.y {
                return Err(LoadError::Input(format!(
                    "pair [{i}, {j}] is out of range for a {}×{} context",
                    self.x, self.y
                )));
            }
            rel[i][j] = true;
        }
        Polarity::new(self.x, self.y, |i, j| rel[i][j])
            .map_err(|e| LoadError::Input(e.to_string()))
    }
}

/// Load a polarity context from a JSON file in the [`ContextSpec`] format.
pub fn load_context(path: &Path) -> Result<ContextSpec, LoadError> {
    let text = fs::read_to_string(path)
        .map_err(|e| LoadError::Input(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| LoadError::Input(format!("{} is not a context spec: {e}", path.display())))
}

/// Render the cover graph of a lattice as DOT, drawn bottom-up. Output is
/// deterministic: nodes and edges in element order.
pub fn dot(lat: &FiniteLattice, graph: &str) -> String {
    use fmt::Write as _;
    let mut out = String::new();
    writeln!(out, "digraph {graph} {{").unwrap();
    writeln!(out, "  rankdir=BT;").unwrap();
    writeln!(out, "  node [shape=box];").unwrap();
    for a in 0..lat.n() {
        writeln!(out, "  n{a} [label=\"{}\"];", dot_escape(lat.label(a))).unwrap();
    }
    for a in 0..lat.n() {
        for b in 0..lat.n() {
            if lat.covers(a, b) {
                writeln!(out, "  n{a} -> n{b};").unwrap();
            }
        }
    }
    out.push_str("}\n");
    out
}

fn dot_escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}
