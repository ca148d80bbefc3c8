//! Communication topology: adjacency matrices, derived spectra and the
//! structural predicates (spanning tree / balanced / k-regular) that gate the
//! stability theorems.
//!
//! Edge direction follows information flow: `a[i][j] > 0` means agent j's
//! state reaches agent i.

use ndarray::Array2;
use num_complex::Complex64;
use serde::Deserialize;
use thiserror::Error;

use crate::linalg;

#[derive(Debug, Error)]
pub enum TopologyError {
    #[error("adjacency matrix must be square, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("need at least 2 agents, got {0}")]
    TooFewAgents(usize),
    #[error("matrix too large for desk-scale eigensolvers: n = {0} > 64")]
    TooLarge(usize),
    #[error("diagonal entry ({0},{0}) must be zero")]
    NonzeroDiagonal(usize),
    #[error("negative weight at ({0},{1})")]
    NegativeWeight(usize, usize),
    #[error("edge index ({0},{1}) out of range for n = {2}")]
    EdgeOutOfRange(usize, usize, usize),
    #[error("agent {0} has no in-neighbors (zero row sum)")]
    ZeroRowSum(usize),
    #[error("failed to parse graph JSON: {0}")]
    Parse(String),
    #[error(transparent)]
    Eigen(#[from] linalg::LinalgError),
}

/// Directed weighted communication graph over `n` agents.
#[derive(Debug, Clone, PartialEq)]
pub struct Topology {
    n: usize,
    adjacency: Array2<f64>,
}

/// Row-normalized adjacency, degree matrix and spectrum.
#[derive(Debug, Clone)]
pub struct DerivedMatrices {
    /// Row-stochastic normalization: entries a_ij / (row sum).
    pub normalized: Array2<f64>,
    /// Diagonal matrix of row sums.
    pub degree: Array2<f64>,
    /// Spectrum of the normalized matrix.
    pub eigenvalues: Vec<Complex64>,
}

/// Structural classification of the graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GraphClass {
    /// Some vertex reaches every other along the direction of information flow.
    pub has_spanning_tree: bool,
    /// In-degree equals out-degree at every vertex.
    pub balanced: bool,
    /// Regular degree when the graph is k-regular with integer k.
    pub k_regular: Option<u64>,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum GraphJson {
    Edges { n: usize, edges: Vec<(usize, usize, f64)> },
    Matrix { matrix: Vec<Vec<f64>> },
}

impl Topology {
    /// Validate and wrap an adjacency matrix.
    pub fn new(adjacency: Array2<f64>) -> Result<Self, TopologyError> {
        let (rows, cols) = adjacency.dim();
        if rows != cols {
            return Err(TopologyError::NotSquare { rows, cols });
        }
        if rows < 2 {
            return Err(TopologyError::TooFewAgents(rows));
        }
        if rows > 64 {
            return Err(TopologyError::TooLarge(rows));
        }
        for i in 0..rows {
            if adjacency[[i, i]] != 0.0 {
                return Err(TopologyError::NonzeroDiagonal(i));
            }
            for j in 0..cols {
                let w = adjacency[[i, j]];
                if !(w >= 0.0) || !w.is_finite() {
                    return Err(TopologyError::NegativeWeight(i, j));
                }
            }
        }
        Ok(Self { n: rows, adjacency })
    }

    /// Build from an edge list; `(i, j, w)` places weight w on a_ij, meaning
    /// j's state flows to i.
    pub fn from_edges(n: usize, edges: &[(usize, usize, f64)]) -> Result<Self, TopologyError> {
        let mut a = Array2::zeros((n.max(1), n.max(1)));
        for &(i, j, w) in edges {
            if i >= n || j >= n {
                return Err(TopologyError::EdgeOutOfRange(i, j, n));
            }
            a[[i, j]] = w;
        }
        Self::new(a)
    }

    /// Parse either `{"n": .., "edges": [[i, j, w], ..]}` or
    /// `{"matrix": [[..], ..]}`.
    pub fn from_json(text: &str) -> Result<Self, TopologyError> {
        let parsed: GraphJson =
            serde_json::from_str(text).map_err(|e| TopologyError::Parse(e.to_string()))?;
        match parsed {
            GraphJson::Edges { n, edges } => Self::from_edges(n, &edges),
            GraphJson::Matrix { matrix } => {
                let n = matrix.len();
                if matrix.iter().any(|row| row.len() != n) {
                    return Err(TopologyError::Parse("matrix rows must all have length n".into()));
                }
                let mut a = Array2::zeros((n.max(1), n.max(1)));
                for (i, row) in matrix.iter().enumerate() {
                    for (j, &w) in row.iter().enumerate() {
                        a[[i, j]] = w;
                    }
                }
                Self::new(a)
            }
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn adjacency(&self) -> &Array2<f64> {
        &self.adjacency
    }

    /// In-degree of each vertex (row sums).
    pub fn row_sums(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.adjacency.row(i).sum()).collect()
    }

    /// Out-degree of each vertex (column sums).
    pub fn col_sums(&self) -> Vec<f64> {
        (0..self.n).map(|j| self.adjacency.column(j).sum()).collect()
    }

    /// Row-normalize the adjacency and compute its spectrum.
    pub fn normalize(&self) -> Result<DerivedMatrices, TopologyError> {
        let sums = self.row_sums();
        if let Some(i) = sums.iter().position(|&s| s <= 0.0) {
            return Err(TopologyError::ZeroRowSum(i));
        }
        let mut normalized = self.adjacency.clone();
        let mut degree = Array2::zeros((self.n, self.n));
        for i in 0..self.n {
            degree[[i, i]] = sums[i];
            for j in 0..self.n {
                normalized[[i, j]] /= sums[i];
            }
        }
        let eigenvalues = linalg::spectrum(&normalized)?;
        Ok(DerivedMatrices {
            normalized,
            degree,
            eigenvalues,
        })
    }

    /// Structural predicates per the graph-theoretic definitions.
    pub fn classify(&self) -> GraphClass {
        let tol = 1e-9;
        let rows = self.row_sums();
        let cols = self.col_sums();
        let balanced = rows
            .iter()
            .zip(cols.iter())
            .all(|(r, c)| (r - c).abs() <= tol * (1.0 + r.abs().max(c.abs())));
        let k_regular = if balanced {
            let k = rows[0];
            let regular = rows.iter().all(|&r| (r - k).abs() <= tol * (1.0 + k.abs()));
            if regular && (k - k.round()).abs() <= tol && k.round() >= 0.0 {
                Some(k.round() as u64)
            } else {
                None
            }
        } else {
            None
        };
        GraphClass {
            has_spanning_tree: self.has_spanning_tree(),
            balanced,
            k_regular,
        }
    }

    fn has_spanning_tree(&self) -> bool {
        // root r reaches v along information flow when a path of edges
        // (j -> i) exists; successors of v are the i with a[i][v] > 0.
        (0..self.n).any(|root| {
            let mut seen = vec![false; self.n];
            let mut stack = vec![root];
            seen[root] = true;
            let mut count = 1;
            while let Some(v) = stack.pop() {
                for i in 0..self.n {
                    if !seen[i] && self.adjacency[[i, v]] > 0.0 {
                        seen[i] = true;
                        count += 1;
                        stack.push(i);
                    }
                }
            }
            count == self.n
        })
    }
}

/// Spectrum of an arbitrary real square matrix (desk scale, n ≤ 64).
pub fn spectrum(matrix: &Array2<f64>) -> Result<Vec<Complex64>, TopologyError> {
    let n = matrix.nrows();
    if n > 64 {
        return Err(TopologyError::TooLarge(n));
    }
    Ok(linalg::spectrum(matrix)?)
}

/// The 4-agent ring used throughout the tests: every node receives from both
/// ring neighbors with unit weights (2-regular, balanced).
pub fn ring4() -> Topology {
    Topology::from_edges(
        4,
        &[
            (0, 1, 1.0),
            (0, 3, 1.0),
            (1, 0, 1.0),
            (1, 2, 1.0),
            (2, 1, 1.0),
            (2, 3, 1.0),
            (3, 2, 1.0),
            (3, 0, 1.0),
        ],
    )
    .expect("static graph")
}

/// The 5-agent directed graph with a spanning tree but unbalanced degrees.
pub fn directed5() -> Topology {
    let a = ndarray::array![
        [0.0, 1.0, 0.0, 1.0, 0.0],
        [1.0, 0.0, 1.0, 0.0, 0.0],
        [0.0, 1.0, 0.0, 1.0, 1.0],
        [0.0, 0.0, 0.0, 0.0, 1.0],
        [0.0, 0.0, 0.0, 1.0, 0.0]
    ];
    Topology::new(a).expect("static graph")
}
