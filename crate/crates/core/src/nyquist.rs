//! Frequency-domain delay-margin analysis for the normalized control laws:
//! phase crossings of the per-eigenvalue loop transfer, the magnitude
//! stability test, maximum stable communication delay and τ₁-τ₂ region
//! sweeps.
//!
//! The loop for eigenvalue λ̃ of the row-normalized adjacency is
//!   G(s) = -λ̃ e^(-sτ₂) / (s² + (s+1) e^(-sτ₁))
//! with an extra (s+1) numerator factor when neighbor velocities are coupled.

use num_complex::Complex64;
use rayon::prelude::*;
use std::io::Write;
use thiserror::Error;

use crate::plant::{ControlLaw, DelayPair, PlantError};
use crate::topology::{Topology, TopologyError};

/// Eigenvalues with modulus below this are skipped (the loop degenerates).
const LAMBDA_EPS: f64 = 1e-9;
/// Default upper end of the frequency search in rad/s.
pub const DEFAULT_OMEGA_MAX: f64 = 100.0;
/// Number of grid points in the phase-crossing scan.
pub const SCAN_POINTS: usize = 10_000;
/// Communication delays are searched up to this bound; a margin that survives
/// it is reported as unbounded.
pub const TAU2_CAP: f64 = 20.0;

#[derive(Debug, Error)]
pub enum NyquistError {
    #[error("frequency-domain conditions cover only the normalized laws u1/u2, got {0}")]
    UnsupportedLaw(ControlLaw),
    #[error("loop eigenvalue must be nonzero")]
    LambdaZero,
    #[error("no phase crossing below omega_max = {0} rad/s")]
    NoCrossing(f64),
    #[error(transparent)]
    Topology(#[from] TopologyError),
    #[error(transparent)]
    Plant(#[from] PlantError),
}

/// Loop transfer of one eigenvalue mode.
#[derive(Debug, Clone, Copy)]
pub struct LoopTransfer {
    pub law: ControlLaw,
    pub lambda: Complex64,
    pub delays: DelayPair,
}

/// Worst phase crossing over all nonzero eigenvalues.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MarginResult {
    /// True iff every crossing of every nonzero eigenvalue has |G| < 1.
    pub stable: bool,
    /// Frequency of the worst crossing (0 when no crossing exists).
    pub omega_bar: f64,
    /// |G| at the worst crossing (0 when no crossing exists).
    pub magnitude: f64,
    /// Eigenvalue attaining the worst crossing.
    pub critical_lambda: Complex64,
}

/// Maximum stable τ₂ per τ₁ grid point.
#[derive(Debug, Clone)]
pub struct RegionSweep {
    pub law: ControlLaw,
    /// `(tau1, max stable tau2)`; `None` when even τ₂ = τ₁ is unstable,
    /// `f64::INFINITY` when the margin survives the search cap.
    pub entries: Vec<(f64, Option<f64>)>,
}

impl RegionSweep {
    /// CSV rows `tau1,tau2_max`; unstable entries leave the field empty and
    /// unbounded margins print `inf`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "tau1,tau2_max")?;
        for (tau1, tau2) in &self.entries {
            match tau2 {
                Some(t) if t.is_infinite() => writeln!(w, "{tau1:.4},inf")?,
                Some(t) => writeln!(w, "{tau1:.4},{t:.4}")?,
                None => writeln!(w, "{tau1:.4},")?,
            }
        }
        Ok(())
    }
}

fn wrap_to_pi(angle: f64) -> f64 {
    let mut a = angle % (2.0 * std::f64::consts::PI);
    if a > std::f64::consts::PI {
        a -= 2.0 * std::f64::consts::PI;
    } else if a < -std::f64::consts::PI {
        a += 2.0 * std::f64::consts::PI;
    }
    a
}

impl LoopTransfer {
    pub fn new(law: ControlLaw, lambda: Complex64, delays: DelayPair) -> Result<Self, NyquistError> {
        if !matches!(law, ControlLaw::U1 | ControlLaw::U2) {
            return Err(NyquistError::UnsupportedLaw(law));
        }
        if lambda.norm() <= LAMBDA_EPS {
            return Err(NyquistError::LambdaZero);
        }
        Ok(Self { law, lambda, delays })
    }

    /// Denominator s² + (s+1)e^(-sτ₁) at s = jω.
    fn denominator(&self, omega: f64) -> Complex64 {
        let (s1, c1) = (omega * self.delays.tau1).sin_cos();
        Complex64::new(
            -omega * omega + c1 + omega * s1,
            omega * c1 - s1,
        )
    }

    /// |G(jω)| via the closed-form magnitude expressions.
    pub fn magnitude(&self, omega: f64) -> f64 {
        let t1 = self.delays.tau1;
        let denom_sq = (omega.powi(4) - 2.0 * omega.powi(3) * (omega * t1).sin()
            + omega * omega * (1.0 - 2.0 * (omega * t1).cos())
            + 1.0)
            .max(0.0);
        let mut mag = self.lambda.norm() / denom_sq.sqrt();
        if self.law.uses_neighbor_velocity() {
            mag *= (1.0 + omega * omega).sqrt();
        }
        mag
    }

    /// G(jω) as a complex number (for locus plots).
    pub fn response(&self, omega: f64) -> Complex64 {
        let rot2 = Complex64::from_polar(1.0, -omega * self.delays.tau2);
        let mut num = -self.lambda * rot2;
        if self.law.uses_neighbor_velocity() {
            num *= Complex64::new(1.0, omega);
        }
        num / self.denominator(omega)
    }

    /// Phase of G(jω) with the denominator angle unwrapped continuously in ω
    /// from its zero-frequency anchor arg(d(0)) = 0.
    fn phase_from(&self, omega: f64, anchor_omega: f64, anchor_arg_d: f64) -> f64 {
        // march the denominator angle from the anchor in bounded steps
        let mut arg_d = anchor_arg_d;
        let mut prev_raw = self.denominator(anchor_omega).arg();
        let span = omega - anchor_omega;
        let steps = (span.abs() / 5e-3).ceil().max(1.0) as usize;
        for k in 1..=steps {
            let w = anchor_omega + span * (k as f64) / (steps as f64);
            let raw = self.denominator(w).arg();
            arg_d += wrap_to_pi(raw - prev_raw);
            prev_raw = raw;
        }
        self.phase_given_arg_d(omega, arg_d)
    }

    fn phase_given_arg_d(&self, omega: f64, arg_d: f64) -> f64 {
        let mut phase = -omega * self.delays.tau2 + (-self.lambda).arg() - arg_d;
        if self.law.uses_neighbor_velocity() {
            phase += omega.atan();
        }
        phase
    }

    /// (|G|, unwrapped phase) at ω > 0.
    pub fn gain_phase(&self, omega: f64) -> (f64, f64) {
        (self.magnitude(omega), self.phase_from(omega, 0.0, 0.0))
    }

    /// All frequencies in (0, omega_max] where the locus crosses the negative
    /// real axis: sign-change scan on the grid, then bisection.
    pub fn phase_crossings(&self, omega_max: f64) -> Result<Vec<f64>, NyquistError> {
        let crossings = self.phase_crossings_impl(omega_max);
        if crossings.is_empty() {
            Err(NyquistError::NoCrossing(omega_max))
        } else {
            Ok(crossings)
        }
    }

    fn phase_crossings_impl(&self, omega_max: f64) -> Vec<f64> {
        let n = SCAN_POINTS;
        let step = omega_max / n as f64;
        // one continuous sweep of the unwrapped phase
        let mut phases = Vec::with_capacity(n);
        let mut omegas = Vec::with_capacity(n);
        let mut arg_ds = Vec::with_capacity(n);
        let mut arg_d = 0.0;
        let mut prev_raw = 0.0; // arg d(0) = atan2(0, 1)
        for i in 1..=n {
            let w = step * i as f64;
            let raw = self.denominator(w).arg();
            arg_d += wrap_to_pi(raw - prev_raw);
            prev_raw = raw;
            omegas.push(w);
            arg_ds.push(arg_d);
            phases.push(self.phase_given_arg_d(w, arg_d));
        }
        let (lo, hi) = phases
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), &p| (l.min(p), h.max(p)));
        // odd multiples of pi inside the observed phase range
        let pi = std::f64::consts::PI;
        let k_lo = ((lo - pi) / (2.0 * pi)).floor() as i64;
        let k_hi = ((hi + pi) / (2.0 * pi)).ceil() as i64;
        let mut found = Vec::new();
        for k in k_lo..=k_hi {
            let level = (2 * k + 1) as f64 * pi;
            for i in 1..phases.len() {
                let fa = phases[i - 1] - level;
                let fb = phases[i] - level;
                // an exact grid hit counts as the crossing of its left cell
                if (fa > 0.0) != (fb > 0.0) {
                    let root = self.bisect_phase(
                        omegas[i - 1],
                        arg_ds[i - 1],
                        phases[i - 1],
                        omegas[i],
                        phases[i],
                        level,
                    );
                    found.push(root);
                }
            }
        }
        found.sort_by(|a, b| a.partial_cmp(b).unwrap());
        found.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
        found
    }

    fn bisect_phase(
        &self,
        mut lo: f64,
        mut lo_arg_d: f64,
        mut f_lo: f64,
        mut hi: f64,
        mut f_hi: f64,
        level: f64,
    ) -> f64 {
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            // continue arg d from the left endpoint (the cell is narrow)
            let raw_lo = self.denominator(lo).arg();
            let raw_mid = self.denominator(mid).arg();
            let mid_arg_d = lo_arg_d + wrap_to_pi(raw_mid - raw_lo);
            let f_mid = self.phase_given_arg_d(mid, mid_arg_d);
            if (f_mid - level).abs() < 1e-10 || (hi - lo) < f64::EPSILON * hi.max(1.0) {
                return mid;
            }
            if (f_lo - level > 0.0) != (f_mid - level > 0.0) {
                hi = mid;
                f_hi = f_mid;
            } else {
                lo = mid;
                lo_arg_d = mid_arg_d;
                f_lo = f_mid;
            }
        }
        let _ = f_hi;
        0.5 * (lo + hi)
    }

    /// Sampled Nyquist locus for plotting: `points` values of
    /// (ω, G(jω)) spaced uniformly over (0, omega_max].
    pub fn locus(&self, omega_max: f64, points: usize) -> Vec<(f64, Complex64)> {
        (1..=points)
            .map(|i| {
                let w = omega_max * i as f64 / points as f64;
                (w, self.response(w))
            })
            .collect()
    }
}

/// Write a sampled locus as CSV rows `omega,re,im`.
pub fn write_locus_csv<W: Write>(locus: &[(f64, Complex64)], mut w: W) -> std::io::Result<()> {
    writeln!(w, "omega,re,im")?;
    for (omega, g) in locus {
        writeln!(w, "{omega:.8e},{:.8e},{:.8e}", g.re, g.im)?;
    }
    Ok(())
}

fn check_law(law: ControlLaw) -> Result<(), NyquistError> {
    if matches!(law, ControlLaw::U1 | ControlLaw::U2) {
        Ok(())
    } else {
        Err(NyquistError::UnsupportedLaw(law))
    }
}

/// Stability of the disagreement dynamics for all nonzero eigenvalues.
fn is_stable_for_lambdas(
    lambdas: &[Complex64],
    law: ControlLaw,
    delays: DelayPair,
    omega_max: f64,
) -> Result<MarginResult, NyquistError> {
    check_law(law)?;
    delays.require_ordered()?;
    let mut worst: Option<(f64, f64, Complex64)> = None;
    for &lambda in lambdas {
        if lambda.norm() <= LAMBDA_EPS {
            continue;
        }
        // a complex eigenvalue belongs to a real mode pair whose negative
        // frequencies show up as positive-frequency crossings of the
        // conjugate loop, so scan both
        let parts = if lambda.im == 0.0 {
            vec![lambda]
        } else {
            vec![lambda, lambda.conj()]
        };
        for part in parts {
            let loop_tf = LoopTransfer::new(law, part, delays)?;
            for omega in loop_tf.phase_crossings_impl(omega_max) {
                let mag = loop_tf.magnitude(omega);
                let better = match worst {
                    None => true,
                    Some((wo, wm, _)) => mag > wm || (mag == wm && omega < wo),
                };
                if better {
                    worst = Some((omega, mag, lambda));
                }
            }
        }
    }
    Ok(match worst {
        Some((omega_bar, magnitude, critical_lambda)) => MarginResult {
            stable: magnitude < 1.0,
            omega_bar,
            magnitude,
            critical_lambda,
        },
        None => MarginResult {
            stable: true,
            omega_bar: 0.0,
            magnitude: 0.0,
            critical_lambda: lambdas
                .iter()
                .copied()
                .max_by(|a, b| a.norm().partial_cmp(&b.norm()).unwrap())
                .unwrap_or(Complex64::new(0.0, 0.0)),
        },
    })
}

/// Delay-dependent stability test for the normalized laws.
pub fn is_stable(
    topology: &Topology,
    law: ControlLaw,
    delays: DelayPair,
) -> Result<MarginResult, NyquistError> {
    check_law(law)?;
    let derived = topology.normalize()?;
    is_stable_for_lambdas(&derived.eigenvalues, law, delays, DEFAULT_OMEGA_MAX)
}

fn max_tau2_for_lambdas(
    lambdas: &[Complex64],
    law: ControlLaw,
    tau1: f64,
    omega_max: f64,
) -> Result<Option<f64>, NyquistError> {
    let stable_at = |tau2: f64| -> Result<bool, NyquistError> {
        let delays = DelayPair::new(tau1, tau2).map_err(NyquistError::Plant)?;
        Ok(is_stable_for_lambdas(lambdas, law, delays, omega_max)?.stable)
    };
    if !stable_at(tau1)? {
        return Ok(None);
    }
    // coarse scan in 0.01 s steps, then bisection to 1e-4 s
    let mut lo = tau1;
    let mut hi = None;
    let mut t = tau1;
    while t < TAU2_CAP {
        t += 0.01;
        if stable_at(t)? {
            lo = t;
        } else {
            hi = Some(t);
            break;
        }
    }
    let Some(mut hi) = hi else {
        return Ok(Some(f64::INFINITY));
    };
    while hi - lo > 1e-4 {
        let mid = 0.5 * (lo + hi);
        if stable_at(mid)? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(Some(lo))
}

/// Largest stable τ₂ ≥ τ₁ (None when τ₂ = τ₁ is already unstable,
/// `f64::INFINITY` when the cap is reached).
pub fn max_tau2(
    topology: &Topology,
    law: ControlLaw,
    tau1: f64,
) -> Result<Option<f64>, NyquistError> {
    check_law(law)?;
    let derived = topology.normalize()?;
    max_tau2_for_lambdas(&derived.eigenvalues, law, tau1, DEFAULT_OMEGA_MAX)
}

/// Largest τ with both delays equal that keeps the system stable.
pub fn equal_delay_margin(
    topology: &Topology,
    law: ControlLaw,
) -> Result<Option<f64>, NyquistError> {
    check_law(law)?;
    let derived = topology.normalize()?;
    equal_delay_margin_for_lambdas(&derived.eigenvalues, law, DEFAULT_OMEGA_MAX)
}

fn equal_delay_margin_for_lambdas(
    lambdas: &[Complex64],
    law: ControlLaw,
    omega_max: f64,
) -> Result<Option<f64>, NyquistError> {
    if lambdas.iter().all(|l| l.norm() <= LAMBDA_EPS) {
        // no loop to destabilize
        return Ok(Some(f64::INFINITY));
    }
    let stable_at = |tau: f64| -> Result<bool, NyquistError> {
        let delays = DelayPair::new(tau, tau).map_err(NyquistError::Plant)?;
        Ok(is_stable_for_lambdas(lambdas, law, delays, omega_max)?.stable)
    };
    if !stable_at(0.0)? {
        return Ok(None);
    }
    let mut lo = 0.0;
    let mut hi = None;
    let mut t = 0.0;
    while t < TAU2_CAP {
        t += 0.01;
        if stable_at(t)? {
            lo = t;
        } else {
            hi = Some(t);
            break;
        }
    }
    let Some(mut hi) = hi else {
        return Ok(Some(f64::INFINITY));
    };
    while hi - lo > 1e-4 {
        let mid = 0.5 * (lo + hi);
        if stable_at(mid)? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(Some(lo))
}

/// Maximum stable τ₂ for each grid τ₁; grid must be sorted ascending.
pub fn sweep_region(
    topology: &Topology,
    law: ControlLaw,
    tau1_grid: &[f64],
) -> Result<RegionSweep, NyquistError> {
    check_law(law)?;
    let derived = topology.normalize()?;
    let entries: Vec<(f64, Option<f64>)> = tau1_grid
        .par_iter()
        .map(|&tau1| {
            max_tau2_for_lambdas(&derived.eigenvalues, law, tau1, DEFAULT_OMEGA_MAX)
                .map(|m| (tau1, m))
        })
        .collect::<Result<_, _>>()?;
    // the paper's tables are non-increasing in tau1; flag exceptions
    for w in entries.windows(2) {
        if let (Some(a), Some(b)) = (w[0].1, w[1].1) {
            if b > a + 1e-6 {
                eprintln!(
                    "warning: max tau2 increased from {a:.4} at tau1={:.3} to {b:.4} at tau1={:.3}",
                    w[0].0, w[1].0
                );
            }
        }
    }
    Ok(RegionSweep {
        law,
        entries,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::topology::{directed5, ring4};

    fn lambda() -> Complex64 {
        Complex64::new(-1.0, 0.0)
    }

    fn loop_u1(tau1: f64, tau2: f64) -> LoopTransfer {
        LoopTransfer::new(ControlLaw::U1, lambda(), DelayPair::new(tau1, tau2).unwrap()).unwrap()
    }

    #[test]
    fn magnitude_is_exactly_one_at_unit_frequency_without_input_delay() {
        let lt = loop_u1(0.0, 0.5);
        assert_eq!(lt.magnitude(1.0), 1.0);
    }

    #[test]
    fn closed_form_crossing_at_pi_over_two() {
        // tau1 = 0, tau2 = pi/2: phase hits -pi exactly at omega = 1
        let lt = loop_u1(0.0, std::f64::consts::FRAC_PI_2);
        let crossings = lt.phase_crossings(10.0).unwrap();
        assert!(
            crossings.iter().any(|w| (w - 1.0).abs() < 1e-8),
            "crossings: {crossings:?}"
        );
    }

    #[test]
    fn margin_table_row_values() {
        // published numerical rows for the dominant eigenvalue -1
        let cases = [
            (0.79, 1.375, 0.841),
            (1.03, 1.249, 0.997),
            (1.04, 1.244, 1.002),
        ];
        for (tau2, want_omega, want_mag) in cases {
            let lt = loop_u1(0.2, tau2);
            let crossings = lt.phase_crossings(DEFAULT_OMEGA_MAX).unwrap();
            let (omega, mag) = crossings
                .iter()
                .map(|&w| (w, lt.magnitude(w)))
                .max_by(|a, b| a.1.partial_cmp(&b.1).unwrap())
                .unwrap();
            assert!(
                (omega - want_omega).abs() < 1e-3,
                "tau2={tau2}: omega {omega} vs {want_omega}"
            );
            assert!(
                (mag - want_mag).abs() < 1e-3,
                "tau2={tau2}: mag {mag} vs {want_mag}"
            );
        }
    }

    #[test]
    fn stability_flips_around_published_boundary() {
        for topo in [ring4(), directed5()] {
            let ok = is_stable(&topo, ControlLaw::U1, DelayPair::new(0.4, 0.47).unwrap()).unwrap();
            assert!(ok.stable, "0.47 should be stable");
            let bad = is_stable(&topo, ControlLaw::U1, DelayPair::new(0.4, 0.49).unwrap()).unwrap();
            assert!(!bad.stable, "0.49 should be unstable");
        }
    }

    #[test]
    fn zero_delay_is_stable() {
        for topo in [ring4(), directed5()] {
            let m = is_stable(&topo, ControlLaw::U1, DelayPair::new(0.0, 0.0).unwrap()).unwrap();
            assert!(m.stable);
        }
    }

    #[test]
    fn unstable_case_reports_magnitude() {
        let m = is_stable(&directed5(), ControlLaw::U1, DelayPair::new(0.2, 1.04).unwrap()).unwrap();
        assert!(!m.stable);
        assert!((m.magnitude - 1.002).abs() < 2e-3, "mag {}", m.magnitude);
        assert!((m.critical_lambda - lambda()).norm() < 1e-9);
    }

    #[test]
    fn closed_form_margin_anchor() {
        // tau1 = 0 with dominant eigenvalue -1: boundary is exactly pi/2
        let margin = max_tau2(&ring4(), ControlLaw::U1, 0.0).unwrap().unwrap();
        assert!(
            (margin - std::f64::consts::FRAC_PI_2).abs() < 1e-4,
            "margin {margin}"
        );
    }

    #[test]
    fn published_margins_u1_u2() {
        let topo = ring4();
        let m = max_tau2(&topo, ControlLaw::U2, 0.5).unwrap().unwrap();
        assert!((m - 0.541).abs() < 0.005, "u2 tau1=0.5: {m}");
        assert_eq!(max_tau2(&topo, ControlLaw::U1, 0.6).unwrap(), None);
    }

    #[test]
    fn equal_delay_margins() {
        let topo = ring4();
        let u1 = equal_delay_margin(&topo, ControlLaw::U1).unwrap().unwrap();
        assert!((u1 - 0.421).abs() < 0.005, "u1: {u1}");
        let u2 = equal_delay_margin(&topo, ControlLaw::U2).unwrap().unwrap();
        assert!((u2 - 0.520).abs() < 0.005, "u2: {u2}");
    }

    #[test]
    fn no_nonzero_eigenvalue_margin_unbounded() {
        let m = equal_delay_margin_for_lambdas(&[Complex64::new(0.0, 0.0)], ControlLaw::U1, 10.0)
            .unwrap();
        assert_eq!(m, Some(f64::INFINITY));
    }

    #[test]
    fn conjugate_pairs_share_margins() {
        let l = Complex64::new(-0.3, 0.55);
        let delays = DelayPair::new(0.15, 0.6).unwrap();
        let worst = |lambda: Complex64| {
            is_stable_for_lambdas(&[lambda], ControlLaw::U1, delays, DEFAULT_OMEGA_MAX).unwrap()
        };
        let a = worst(l);
        let b = worst(l.conj());
        assert!((a.magnitude - b.magnitude).abs() < 1e-9);
        assert!((a.omega_bar - b.omega_bar).abs() < 1e-7);
        assert_eq!(a.stable, b.stable);
    }

    #[test]
    fn boundary_magnitude_close_to_one() {
        let topo = ring4();
        for law in [ControlLaw::U1, ControlLaw::U2] {
            let m = max_tau2(&topo, law, 0.2).unwrap().unwrap();
            let at = is_stable(&topo, law, DelayPair::new(0.2, m).unwrap()).unwrap();
            assert!(
                (at.magnitude - 1.0).abs() < 1e-3,
                "law {law}: |G| = {} at margin {m}",
                at.magnitude
            );
        }
    }

    #[test]
    fn sweep_matches_pointwise_and_rejects_u3() {
        let topo = ring4();
        let grid = [0.0, 0.2, 0.4];
        let sweep = sweep_region(&topo, ControlLaw::U1, &grid).unwrap();
        for (tau1, entry) in &sweep.entries {
            let direct = max_tau2(&topo, ControlLaw::U1, *tau1).unwrap();
            match (entry, direct) {
                (Some(a), Some(b)) => assert!((a - b).abs() < 1e-9),
                (None, None) => {}
                other => panic!("mismatch {other:?}"),
            }
        }
        assert!(matches!(
            sweep_region(&topo, ControlLaw::U3, &grid),
            Err(NyquistError::UnsupportedLaw(_))
        ));
        let empty = sweep_region(&topo, ControlLaw::U1, &[]).unwrap();
        assert!(empty.entries.is_empty());
    }

    #[test]
    fn locus_csv_format() {
        let lt = loop_u1(0.4, 0.45);
        let pts = lt.locus(10.0, 16);
        let mut buf = Vec::new();
        write_locus_csv(&pts, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("omega,re,im\n"));
        assert_eq!(text.lines().count(), 17);
    }

    #[test]
    fn response_matches_gain_phase() {
        let lt = LoopTransfer::new(
            ControlLaw::U2,
            Complex64::new(-0.8, 0.1),
            DelayPair::new(0.3, 0.9).unwrap(),
        )
        .unwrap();
        for &w in &[0.3, 0.9, 1.7, 4.2] {
            let g = lt.response(w);
            let (mag, phase) = lt.gain_phase(w);
            assert!((g.norm() - mag).abs() < 1e-12);
            let diff = wrap_to_pi(g.arg() - phase);
            assert!(diff.abs() < 1e-9, "w={w}: {} vs {}", g.arg(), phase);
        }
    }
}
