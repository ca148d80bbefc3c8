//! Describing function of the saturation and harmonic-balance prediction of
//! limit cycles from the loop's phase-crossing magnitude.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::nyquist::MarginResult;

#[derive(Debug, Error)]
pub enum HarmonicError {
    #[error("saturation bound must be positive, got {0}")]
    NonPositiveDelta(f64),
    #[error("amplitude {amplitude} below saturation bound {delta}; the element is linear there (N = 1)")]
    AmplitudeBelowDelta { amplitude: f64, delta: f64 },
    #[error("target gain {0} outside (0, 1]")]
    TargetOutOfRange(f64),
}

/// Describing function N(A) of a symmetric saturation with bound Δ.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DescribingFunction {
    delta: f64,
}

/// Harmonic-balance prediction at a phase crossing.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LimitCyclePrediction {
    /// Whether the balance N(A)·|G(jω̄)| = 1 has a solution (|G| ≥ 1).
    pub exists: bool,
    /// Predicted amplitude of the fundamental harmonic of the velocity
    /// channel entering the saturation; present iff `exists`.
    pub amplitude: Option<f64>,
    /// Oscillation frequency ω̄ in rad/s.
    pub frequency: f64,
    /// |G(jω̄)| used for the balance.
    pub magnitude_at_crossing: f64,
}

impl DescribingFunction {
    pub fn new(delta: f64) -> Result<Self, HarmonicError> {
        if delta > 0.0 && delta.is_finite() {
            Ok(Self { delta })
        } else {
            Err(HarmonicError::NonPositiveDelta(delta))
        }
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    /// Equivalent gain N(A) = (2/π)[asin(Δ/A) + (Δ/A)√(1-Δ²/A²)] for A ≥ Δ.
    pub fn evaluate(&self, amplitude: f64) -> Result<f64, HarmonicError> {
        if amplitude < self.delta {
            return Err(HarmonicError::AmplitudeBelowDelta {
                amplitude,
                delta: self.delta,
            });
        }
        let r = self.delta / amplitude;
        Ok((2.0 / std::f64::consts::PI) * (r.asin() + r * (1.0 - r * r).sqrt()))
    }

    /// Solve N(A) = target for the unique A ≥ Δ by bisection on the strictly
    /// decreasing N.
    pub fn invert(&self, target: f64) -> Result<f64, HarmonicError> {
        if !(target > 0.0 && target <= 1.0) {
            return Err(HarmonicError::TargetOutOfRange(target));
        }
        if target == 1.0 {
            return Ok(self.delta);
        }
        // N(A) ~ 4Δ/(πA) for large A gives an upper bracket
        let mut lo = self.delta;
        let mut hi = (8.0 * self.delta / (std::f64::consts::PI * target)).max(2.0 * self.delta);
        while self.evaluate(hi)? > target {
            hi *= 2.0;
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            let val = self.evaluate(mid)?;
            if (val - target).abs() < 1e-10 && (hi - lo) < 1e-9 * self.delta.max(1.0) {
                return Ok(mid);
            }
            if val > target {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi - lo < f64::EPSILON * hi {
                break;
            }
        }
        Ok(0.5 * (lo + hi))
    }
}

/// Predict limit-cycle existence, amplitude and frequency from the worst
/// phase crossing of the linear element.
///
/// A crossing magnitude of at least one means the -1/N(A) locus, which covers
/// (-∞, -1], intersects the Nyquist locus; the balance then fixes the
/// amplitude through N(A) = 1/|G(jω̄)|.
pub fn predict_limit_cycle(
    margin: &MarginResult,
    df: &DescribingFunction,
) -> Result<LimitCyclePrediction, HarmonicError> {
    let mag = margin.magnitude;
    if mag >= 1.0 {
        let amplitude = df.invert(1.0 / mag)?;
        Ok(LimitCyclePrediction {
            exists: true,
            amplitude: Some(amplitude),
            frequency: margin.omega_bar,
            magnitude_at_crossing: mag,
        })
    } else {
        Ok(LimitCyclePrediction {
            exists: false,
            amplitude: None,
            frequency: margin.omega_bar,
            magnitude_at_crossing: mag,
        })
    }
}

/// Quadrature oracle for the fundamental Fourier sine coefficient of
/// sat(A sin θ)/A, exposed for the verification suite.
///
/// Splits at the saturation onset angle and integrates each smooth piece with
/// Gauss-Legendre nodes, staying independent of the closed form above.
pub fn fourier_gain_oracle(delta: f64, amplitude: f64) -> f64 {
    assert!(amplitude >= delta && delta > 0.0);
    let theta_star = (delta / amplitude).min(1.0).asin();
    let half_pi = 0.5 * std::f64::consts::PI;
    // b1 = (4/π) ∫_0^{π/2} sat(A sin θ) sin θ dθ / A
    let linear_part = gauss_legendre(0.0, theta_star, |th| amplitude * th.sin() * th.sin());
    let clipped_part = gauss_legendre(theta_star, half_pi, |th| delta * th.sin());
    (4.0 / std::f64::consts::PI) * (linear_part + clipped_part) / amplitude
}

/// 64-point Gauss-Legendre quadrature over [a, b] built from the 32 positive
/// nodes by symmetry; the nodes are generated by Newton refinement of the
/// Legendre polynomial roots.
fn gauss_legendre<F: Fn(f64) -> f64>(a: f64, b: f64, f: F) -> f64 {
    const N: usize = 64;
    let mut nodes = [0.0f64; N / 2];
    let mut weights = [0.0f64; N / 2];
    for i in 0..N / 2 {
        // Chebyshev-like initial guess
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (N as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (p, dp) = legendre(N, x);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        let (_, dp) = legendre(N, x);
        nodes[i] = x;
        weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut acc = 0.0;
    for i in 0..N / 2 {
        acc += weights[i] * (f(mid + half * nodes[i]) + f(mid - half * nodes[i]));
    }
    acc * half
}

/// Legendre polynomial P_n and its derivative at x by recurrence.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let pk = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
        p0 = p1;
        p1 = pk;
    }
    let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gain_at_bound_is_one() {
        let df = DescribingFunction::new(1.0).unwrap();
        assert!((df.evaluate(1.0).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn gain_at_twice_bound_closed_form() {
        // N(2Δ) = 1/3 + √3/(2π)
        let df = DescribingFunction::new(0.7).unwrap();
        let want = 1.0 / 3.0 + 3.0f64.sqrt() / (2.0 * std::f64::consts::PI);
        assert!((df.evaluate(1.4).unwrap() - want).abs() < 1e-14);
        assert!((want - 0.60900).abs() < 5e-6);
    }

    #[test]
    fn gain_vanishes_for_huge_amplitude() {
        let df = DescribingFunction::new(1.0).unwrap();
        let n = df.evaluate(1e6).unwrap();
        assert!(n > 0.0 && n < 2e-6);
        assert!((n - fourier_gain_oracle(1.0, 1e6)).abs() < 1e-9);
    }

    #[test]
    fn below_bound_is_error() {
        let df = DescribingFunction::new(1.0).unwrap();
        assert!(matches!(
            df.evaluate(0.5),
            Err(HarmonicError::AmplitudeBelowDelta { .. })
        ));
    }

    #[test]
    fn quadrature_oracle_agrees() {
        let df = DescribingFunction::new(2.5).unwrap();
        for ratio in [1.0, 1.0001, 1.3, 2.0, 5.0, 37.0, 1e3] {
            let a = 2.5 * ratio;
            let closed = df.evaluate(a).unwrap();
            let oracle = fourier_gain_oracle(2.5, a);
            assert!(
                (closed - oracle).abs() < 1e-9,
                "A/Δ = {ratio}: {closed} vs {oracle}"
            );
        }
    }

    #[test]
    fn inversion_round_trips() {
        let df = DescribingFunction::new(1.0).unwrap();
        assert_eq!(df.invert(1.0).unwrap(), 1.0);
        let a = df.invert(0.60900).unwrap();
        assert!((a - 2.0).abs() < 1e-4, "a = {a}");
        // pairing with |G| = 1.002 from the margin tables
        let a = df.invert(1.0 / 1.002).unwrap();
        assert!(a > 1.0 && a < 1.2, "a = {a}");
        for ratio in [1.0, 1.01, 1.5, 3.0, 100.0, 1e4] {
            let n = df.evaluate(ratio).unwrap();
            let back = df.invert(n).unwrap();
            assert!(
                (back - ratio).abs() <= 1e-6 * ratio,
                "ratio {ratio} -> N {n} -> {back}"
            );
        }
    }

    #[test]
    fn invalid_targets_rejected() {
        let df = DescribingFunction::new(1.0).unwrap();
        assert!(df.invert(0.0).is_err());
        assert!(df.invert(1.1).is_err());
        assert!(df.invert(-0.3).is_err());
    }

    #[test]
    fn monotone_decreasing_on_grid() {
        let df = DescribingFunction::new(1.0).unwrap();
        let mut prev = f64::INFINITY;
        for k in 0..10_000 {
            let a = 10f64.powf(4.0 * k as f64 / 9_999.0);
            let n = df.evaluate(a).unwrap();
            assert!(n <= prev + 1e-15);
            assert!(n > 0.0 && n <= 1.0);
            prev = n;
        }
    }

    #[test]
    fn prediction_boundary_case() {
        // |G| = 1 exactly grazes the locus: amplitude collapses to Δ
        let margin = MarginResult {
            stable: false,
            omega_bar: 2.0,
            magnitude: 1.0,
            critical_lambda: num_complex::Complex64::new(-1.0, 0.0),
        };
        let df = DescribingFunction::new(3.0).unwrap();
        let p = predict_limit_cycle(&margin, &df).unwrap();
        assert!(p.exists);
        assert_eq!(p.amplitude, Some(3.0));
        assert_eq!(p.frequency, 2.0);
    }
}
