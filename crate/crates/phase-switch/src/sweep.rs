//! Parameter-grid evaluation of the nonlinear response and noise curves
//! (amplitude ratio and coherent/noise fractions versus the scaled input
//! intensity) and β-scans of the linear response.
//!
//! The intensity axis is `log₁₀[4|b_in|²/Γ]`, matching the response-curve
//! abscissa. Rows are emitted in grid order and the evaluation is
//! deterministic: identical inputs serialize byte-identically.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::core::{self, AtomParams};
use crate::error::{Error, Result};

/// Axis of a sweep grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum GridAxis {
    /// `log₁₀[4|b_in|²/Γ]`
    Log10ScaledIntensity,
    /// Spontaneous-emission ratio `β ∈ (0, 1]`.
    Beta,
}

/// Uniform grid in the declared axis coordinate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    axis: GridAxis,
    min: f64,
    max: f64,
    points: usize,
}

impl Grid {
    pub fn new(axis: GridAxis, min: f64, max: f64, points: usize) -> Result<Self> {
        if !(min.is_finite() && max.is_finite() && min < max) {
            return Err(Error::Domain(format!(
                "grid bounds must be finite with min < max, got [{min}, {max}]"
            )));
        }
        if points < 2 {
            return Err(Error::Domain(format!("grid needs at least 2 points, got {points}")));
        }
        Ok(Self { axis, min, max, points })
    }

    pub fn axis(&self) -> GridAxis {
        self.axis
    }

    pub fn points(&self) -> usize {
        self.points
    }

    /// Grid values, endpoints exact.
    pub fn values(&self) -> impl Iterator<Item = f64> + '_ {
        let span = self.max - self.min;
        let denom = (self.points - 1) as f64;
        (0..self.points).map(move |i| {
            if i + 1 == self.points {
                self.max
            } else {
                self.min + (i as f64 * span) / denom
            }
        })
    }
}

/// One grid point of the response/noise curves.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    /// Grid coordinate `log₁₀[4|b_in|²/Γ]`.
    pub axis_value: f64,
    /// Scaled intensity `x = |b_in|²/Γ`.
    pub x: f64,
    pub amplitude_ratio: f64,
    pub coherent_fraction: f64,
    pub noise_fraction: f64,
    pub sigma_z: f64,
    pub sigma_minus_mag: f64,
}

/// One grid point of a β-scan of the linear response.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BetaRow {
    pub beta: f64,
    /// Weak-drive amplitude ratio `1 − 2β`.
    pub linear_ratio: f64,
}

/// Evaluates the steady-state response over a log-intensity grid. Works for
/// lossy atoms too; for `γ = 0` the amplitude ratio coincides with the
/// closed-form `(4x − 1)/(4x + 1)`.
pub fn response_sweep(params: &AtomParams, grid: &Grid) -> Result<Vec<SweepRow>> {
    if grid.axis != GridAxis::Log10ScaledIntensity {
        return Err(Error::Usage(
            "response_sweep requires a log10-scaled-intensity grid".into(),
        ));
    }
    let big_gamma = params.big_gamma();
    grid.values()
        .map(|axis_value| {
            let x = 10f64.powf(axis_value) / 4.0;
            let intensity = x * big_gamma;
            let b_in = Complex64::new(intensity.sqrt(), 0.0);
            let sol = core::steady_state(params, b_in)?;
            Ok(SweepRow {
                axis_value,
                x,
                amplitude_ratio: sol.b_out.re / b_in.re,
                coherent_fraction: sol.b_out.norm_sqr() / intensity,
                noise_fraction: sol.p_noise / intensity,
                sigma_z: sol.state.sigma_z,
                sigma_minus_mag: sol.state.sigma_minus.norm(),
            })
        })
        .collect()
}

/// Scans the linear response `1 − 2β` over a β grid; `γ` is back-computed as
/// `2Γ(1/β − 1)` for each point.
pub fn beta_sweep(grid: &Grid, big_gamma: f64) -> Result<Vec<BetaRow>> {
    if grid.axis != GridAxis::Beta {
        return Err(Error::Usage("beta_sweep requires a beta grid".into()));
    }
    grid.values()
        .map(|beta| {
            let params = AtomParams::from_beta(big_gamma, beta)?;
            Ok(BetaRow { beta, linear_ratio: core::linear_response(&params) })
        })
        .collect()
}

/// CSV form of a response sweep with the fixed header
/// `axis_value,x,amplitude_ratio,coherent_fraction,noise_fraction,sigma_z,sigma_minus_mag`.
pub fn response_sweep_to_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from(
        "axis_value,x,amplitude_ratio,coherent_fraction,noise_fraction,sigma_z,sigma_minus_mag\n",
    );
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            r.axis_value,
            r.x,
            r.amplitude_ratio,
            r.coherent_fraction,
            r.noise_fraction,
            r.sigma_z,
            r.sigma_minus_mag
        ));
    }
    out
}

/// CSV form of a β-scan with header `beta,linear_ratio`.
pub fn beta_sweep_to_csv(rows: &[BetaRow]) -> String {
    let mut out = String::from("beta,linear_ratio\n");
    for r in rows {
        out.push_str(&format!("{},{}\n", r.beta, r.linear_ratio));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lossless() -> AtomParams {
        AtomParams::lossless(1.0).unwrap()
    }

    fn default_grid() -> Grid {
        Grid::new(GridAxis::Log10ScaledIntensity, -2.0, 2.0, 201).unwrap()
    }

    #[test]
    fn grid_validation_and_values() {
        assert!(Grid::new(GridAxis::Beta, 1.0, 1.0, 5).is_err());
        assert!(Grid::new(GridAxis::Beta, 0.1, 1.0, 1).is_err());
        let g = Grid::new(GridAxis::Beta, 0.0, 1.0, 2).unwrap();
        let v: Vec<f64> = g.values().collect();
        assert_eq!(v, vec![0.0, 1.0]);
        // midpoint of the default grid is exactly zero
        let mid: Vec<f64> = default_grid().values().collect();
        assert_eq!(mid[100], 0.0);
        assert_eq!(mid[0], -2.0);
        assert_eq!(mid[200], 2.0);
    }

    #[test]
    fn response_sweep_switching_row() {
        let rows = response_sweep(&lossless(), &default_grid()).unwrap();
        assert_eq!(rows.len(), 201);
        let mid = &rows[100];
        assert_eq!(mid.axis_value, 0.0);
        assert!((mid.x - 0.25).abs() < 1e-15);
        assert!(mid.amplitude_ratio.abs() <= 1e-12);
        assert!((mid.noise_fraction - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn response_sweep_endpoints_near_asymptotes() {
        let rows = response_sweep(&lossless(), &default_grid()).unwrap();
        assert!((rows[0].amplitude_ratio + 1.0).abs() < 0.02);
        assert!((rows[200].amplitude_ratio - 1.0).abs() < 0.02);
    }

    #[test]
    fn response_sweep_matches_closed_form() {
        let rows = response_sweep(&lossless(), &default_grid()).unwrap();
        for r in &rows {
            let expected = core::response_ratio(r.x).unwrap();
            assert!((r.amplitude_ratio - expected).abs() <= 1e-12);
            // lossless rows: coherent fraction is the squared ratio
            assert!((r.coherent_fraction - r.amplitude_ratio * r.amplitude_ratio).abs() <= 1e-12);
            assert!((r.coherent_fraction + r.noise_fraction - 1.0).abs() <= 1e-12);
        }
    }

    #[test]
    fn response_sweep_monotone_with_single_sign_change() {
        let rows = response_sweep(&lossless(), &default_grid()).unwrap();
        let mut sign_changes = Vec::new();
        for (i, pair) in rows.windows(2).enumerate() {
            assert!(pair[1].amplitude_ratio > pair[0].amplitude_ratio);
            if pair[0].amplitude_ratio < 0.0 && pair[1].amplitude_ratio >= 0.0 {
                sign_changes.push(i);
            }
        }
        // exactly one crossing, bracketed by the grid points around axis 0
        assert_eq!(sign_changes.len(), 1);
        let i = sign_changes[0];
        assert!(rows[i].axis_value <= 0.0 && rows[i + 1].axis_value >= 0.0);
        assert!(rows[100].amplitude_ratio.abs() <= 1e-12);
    }

    #[test]
    fn response_sweep_noise_peak_at_switching() {
        let rows = response_sweep(&lossless(), &default_grid()).unwrap();
        let peak = rows
            .iter()
            .max_by(|a, b| a.noise_fraction.partial_cmp(&b.noise_fraction).unwrap())
            .unwrap();
        assert_eq!(peak.axis_value, 0.0);
        assert!((peak.noise_fraction - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn response_sweep_two_point_grid() {
        let grid = Grid::new(GridAxis::Log10ScaledIntensity, -1.0, 1.0, 2).unwrap();
        let rows = response_sweep(&lossless(), &grid).unwrap();
        assert_eq!(rows.len(), 2);
        assert_eq!(rows[0].axis_value, -1.0);
        assert_eq!(rows[1].axis_value, 1.0);
    }

    #[test]
    fn response_sweep_supports_losses() {
        let p = AtomParams::from_beta(1.0, 0.7).unwrap();
        let rows = response_sweep(&p, &default_grid()).unwrap();
        // weak-drive end approaches the linear response 1 − 2β = −0.4
        assert!((rows[0].amplitude_ratio - core::linear_response(&p)).abs() < 0.03);
    }

    #[test]
    fn response_sweep_rejects_beta_axis() {
        let grid = Grid::new(GridAxis::Beta, 0.1, 1.0, 5).unwrap();
        assert!(matches!(response_sweep(&lossless(), &grid), Err(Error::Usage(_))));
    }

    #[test]
    fn beta_sweep_examples() {
        let grid = Grid::new(GridAxis::Beta, 0.5, 1.0, 6).unwrap();
        let rows = beta_sweep(&grid, 1.0).unwrap();
        assert_eq!(rows.len(), 6);
        assert!((rows[0].linear_ratio).abs() < 1e-15); // β = 0.5 → 0
        assert!((rows[2].linear_ratio + 0.4).abs() < 1e-12); // β = 0.7 → −0.4
        assert_eq!(rows[5].linear_ratio, -1.0); // β = 1 → −1
    }

    #[test]
    fn beta_sweep_rejects_out_of_range() {
        let grid = Grid::new(GridAxis::Beta, 0.0, 1.0, 3).unwrap();
        assert!(beta_sweep(&grid, 1.0).is_err());
        let grid = Grid::new(GridAxis::Beta, 0.5, 1.5, 3).unwrap();
        assert!(beta_sweep(&grid, 1.0).is_err());
        let wrong_axis = Grid::new(GridAxis::Log10ScaledIntensity, 0.1, 1.0, 3).unwrap();
        assert!(matches!(beta_sweep(&wrong_axis, 1.0), Err(Error::Usage(_))));
    }

    #[test]
    fn csv_serialization_deterministic() {
        let rows = response_sweep(&lossless(), &default_grid()).unwrap();
        let a = response_sweep_to_csv(&rows);
        let b = response_sweep_to_csv(&response_sweep(&lossless(), &default_grid()).unwrap());
        assert_eq!(a, b);
        assert!(a.starts_with(
            "axis_value,x,amplitude_ratio,coherent_fraction,noise_fraction,sigma_z,sigma_minus_mag\n"
        ));
        assert_eq!(a.lines().count(), 202);
    }
}
