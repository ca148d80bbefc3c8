//! Agent dynamics: the velocity saturation, the four delayed control laws and
//! the stacked 2n-state linear delay system they induce.

use ndarray::Array2;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::topology::Topology;

#[derive(Debug, Error)]
pub enum PlantError {
    #[error("saturation bound must be positive, got {0}")]
    NonPositiveDelta(f64),
    #[error("delays must be nonnegative finite, got ({0}, {1})")]
    InvalidDelays(f64, f64),
    #[error("tau1 = {0} exceeds tau2 = {1}; the theorems require tau1 <= tau2")]
    DelayOrderViolation(f64, f64),
    #[error("agent {0} has no in-neighbors (zero row sum)")]
    ZeroRowSum(usize),
}

/// Symmetric saturation with bound Δ. `Δ = f64::INFINITY` disables clipping.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Saturation {
    delta: f64,
}

impl Saturation {
    pub fn new(delta: f64) -> Result<Self, PlantError> {
        if delta > 0.0 {
            Ok(Self { delta })
        } else {
            Err(PlantError::NonPositiveDelta(delta))
        }
    }

    /// Unbounded actuator, useful when probing the linear element alone.
    pub fn unbounded() -> Self {
        Self { delta: f64::INFINITY }
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    /// Clamp to [-Δ, Δ].
    pub fn apply(&self, value: f64) -> f64 {
        value.clamp(-self.delta, self.delta)
    }
}

/// The four consensus control laws under study.
///
/// U1/U2 divide the neighbor sum by the in-degree (row-stochastic coupling);
/// U3/U4 use the raw weights. U2/U4 additionally couple neighbor velocities.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ControlLaw {
    U1,
    U2,
    U3,
    U4,
}

impl ControlLaw {
    pub const ALL: [ControlLaw; 4] = [ControlLaw::U1, ControlLaw::U2, ControlLaw::U3, ControlLaw::U4];

    /// Whether the law divides by the row sum.
    pub fn normalized(&self) -> bool {
        matches!(self, ControlLaw::U1 | ControlLaw::U2)
    }

    /// Whether the law couples neighbor velocities.
    pub fn uses_neighbor_velocity(&self) -> bool {
        matches!(self, ControlLaw::U2 | ControlLaw::U4)
    }
}

impl std::str::FromStr for ControlLaw {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "u1" => Ok(ControlLaw::U1),
            "u2" => Ok(ControlLaw::U2),
            "u3" => Ok(ControlLaw::U3),
            "u4" => Ok(ControlLaw::U4),
            other => Err(format!("unknown control law '{other}' (expected u1|u2|u3|u4)")),
        }
    }
}

impl std::fmt::Display for ControlLaw {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ControlLaw::U1 => write!(f, "u1"),
            ControlLaw::U2 => write!(f, "u2"),
            ControlLaw::U3 => write!(f, "u3"),
            ControlLaw::U4 => write!(f, "u4"),
        }
    }
}

/// Input delay τ₁ (own state) and communication delay τ₂ (neighbor states).
///
/// Construction permits τ₁ > τ₂ because simulating that regime is still
/// physically meaningful; theorem-facing code calls [`DelayPair::require_ordered`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DelayPair {
    pub tau1: f64,
    pub tau2: f64,
}

impl DelayPair {
    pub fn new(tau1: f64, tau2: f64) -> Result<Self, PlantError> {
        if tau1 >= 0.0 && tau2 >= 0.0 && tau1.is_finite() && tau2.is_finite() {
            Ok(Self { tau1, tau2 })
        } else {
            Err(PlantError::InvalidDelays(tau1, tau2))
        }
    }

    pub fn require_ordered(&self) -> Result<(), PlantError> {
        if self.tau1 <= self.tau2 {
            Ok(())
        } else {
            Err(PlantError::DelayOrderViolation(self.tau1, self.tau2))
        }
    }
}

/// Stacked linear delay system Ẋ(t) = A₀X(t) + A₁X(t-τ₁) + A₂X(t-τ₂)
/// with X = [positions; velocities].
#[derive(Debug, Clone)]
pub struct DelayedSystem {
    pub a0: Array2<f64>,
    pub a1: Array2<f64>,
    pub a2: Array2<f64>,
    pub delays: DelayPair,
    pub law: ControlLaw,
    pub topology: Topology,
}

/// Assemble the stacked block matrices for the chosen law.
pub fn stack_system(
    topology: &Topology,
    law: ControlLaw,
    delays: DelayPair,
) -> Result<DelayedSystem, PlantError> {
    let n = topology.n();
    let sums = topology.row_sums();
    if law.normalized() {
        if let Some(i) = sums.iter().position(|&s| s <= 0.0) {
            return Err(PlantError::ZeroRowSum(i));
        }
    }
    let mut a0 = Array2::zeros((2 * n, 2 * n));
    for i in 0..n {
        a0[[i, n + i]] = 1.0;
    }
    let mut a1 = Array2::zeros((2 * n, 2 * n));
    let mut a2 = Array2::zeros((2 * n, 2 * n));
    // position-coupling block of A1 and the A2 blocks, per law
    match law {
        ControlLaw::U1 | ControlLaw::U2 => {
            for i in 0..n {
                a1[[n + i, i]] = -1.0;
                a1[[n + i, n + i]] = -1.0;
                for j in 0..n {
                    let nij = topology.adjacency()[[i, j]] / sums[i];
                    a2[[n + i, j]] = nij;
                    if law.uses_neighbor_velocity() {
                        a2[[n + i, n + j]] = nij;
                    }
                }
            }
        }
        ControlLaw::U3 | ControlLaw::U4 => {
            for i in 0..n {
                a1[[n + i, i]] = -sums[i];
                a1[[n + i, n + i]] = if law.uses_neighbor_velocity() { -sums[i] } else { -1.0 };
                for j in 0..n {
                    let aij = topology.adjacency()[[i, j]];
                    a2[[n + i, j]] = aij;
                    if law.uses_neighbor_velocity() {
                        a2[[n + i, n + j]] = aij;
                    }
                }
            }
        }
    }
    Ok(DelayedSystem {
        a0,
        a1,
        a2,
        delays,
        law,
        topology: topology.clone(),
    })
}

/// Evaluate agent i's control input from one row of the adjacency matrix.
///
/// `x_tau1`/`v_tau1` are the full state vectors delayed by τ₁ (only entry i is
/// read); `x_tau2`/`v_tau2` are delayed by τ₂ (only in-neighbor entries are
/// read). `row_sum` must be the precomputed in-degree for normalized laws.
pub fn control_input_row(
    law: ControlLaw,
    row: &[f64],
    row_sum: f64,
    i: usize,
    x_tau1: &[f64],
    v_tau1: &[f64],
    x_tau2: &[f64],
    v_tau2: &[f64],
) -> Result<f64, PlantError> {
    if law.normalized() && row_sum <= 0.0 {
        return Err(PlantError::ZeroRowSum(i));
    }
    let xi = x_tau1[i];
    let vi = v_tau1[i];
    let mut acc = 0.0;
    for (j, &w) in row.iter().enumerate() {
        if w == 0.0 {
            continue;
        }
        acc += w * (x_tau2[j] - xi);
        if law.uses_neighbor_velocity() {
            acc += w * (v_tau2[j] - vi);
        }
    }
    let u = match law {
        ControlLaw::U1 => -vi + acc / row_sum,
        ControlLaw::U2 => acc / row_sum,
        ControlLaw::U3 => -vi + acc,
        ControlLaw::U4 => acc,
    };
    Ok(u)
}

/// Control input of agent i given delayed state snapshots of the whole team.
pub fn control_input(
    law: ControlLaw,
    topology: &Topology,
    i: usize,
    x_tau1: &[f64],
    v_tau1: &[f64],
    x_tau2: &[f64],
    v_tau2: &[f64],
) -> Result<f64, PlantError> {
    let row: Vec<f64> = topology.adjacency().row(i).to_vec();
    let row_sum: f64 = row.iter().sum();
    control_input_row(law, &row, row_sum, i, x_tau1, v_tau1, x_tau2, v_tau2)
}

/// Block-averaging matrix Φ₀₁ (per-half mean projector).
pub fn phi01(n: usize) -> Array2<f64> {
    let mut m = Array2::zeros((2 * n, 2 * n));
    let inv = 1.0 / n as f64;
    for i in 0..n {
        for j in 0..n {
            m[[i, j]] = inv;
            m[[n + i, n + j]] = inv;
        }
    }
    m
}

/// Disagreement projector E = I₂ₙ - Φ₀₁.
pub fn disagreement_projector(n: usize) -> Array2<f64> {
    let mut e = phi01(n);
    e.mapv_inplace(|x| -x);
    for i in 0..2 * n {
        e[[i, i]] += 1.0;
    }
    e
}

/// Disagreement vector Ψ = E·X: mean-centered positions then velocities.
pub fn disagreement(state: &[f64]) -> Vec<f64> {
    let n2 = state.len();
    assert!(n2 % 2 == 0, "state must stack positions and velocities");
    let n = n2 / 2;
    let mut psi = vec![0.0; n2];
    let mean_x: f64 = state[..n].iter().sum::<f64>() / n as f64;
    let mean_v: f64 = state[n..].iter().sum::<f64>() / n as f64;
    for i in 0..n {
        psi[i] = state[i] - mean_x;
        psi[n + i] = state[n + i] - mean_v;
    }
    psi
}

/// Euclidean norm of the disagreement vector.
pub fn disagreement_norm(state: &[f64]) -> f64 {
    disagreement(state).iter().map(|p| p * p).sum::<f64>().sqrt()
}
