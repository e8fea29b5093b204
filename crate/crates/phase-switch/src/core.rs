//! Domain types and closed-form physics of the two-level atom in a
//! one-sided cavity.
//!
//! Conventions: amplitudes are normalized so `|b|²` is a photon current
//! (photons per unit time). `Γ` is the cavity-mediated dipole decay rate,
//! `γ` the transverse decay rate to non-cavity modes. The rotating frame is
//! resonant, so all stationary quantities are real up to the phase of the
//! drive.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Numerical slack on the Bloch-vector bound `|σ₋|² + σ_z² ≤ 1/4`.
///
/// Integrator round-off must not trigger spurious invariant failures.
pub const BLOCH_SLACK: f64 = 1e-9;

/// Relative tolerance of the bisection locating the lossy switching point.
pub const SWITCHING_BISECTION_TOL: f64 = 1e-10;

/// Decay rates of the atom: cavity-mediated `Γ` and non-cavity loss `γ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AtomParams {
    big_gamma: f64,
    gamma_loss: f64,
}

impl AtomParams {
    /// Validated constructor; `big_gamma > 0`, `gamma_loss ≥ 0`.
    pub fn new(big_gamma: f64, gamma_loss: f64) -> Result<Self> {
        if !(big_gamma.is_finite() && big_gamma > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "big_gamma must be positive and finite, got {big_gamma}"
            )));
        }
        if !(gamma_loss.is_finite() && gamma_loss >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "gamma_loss must be non-negative and finite, got {gamma_loss}"
            )));
        }
        Ok(Self { big_gamma, gamma_loss })
    }

    /// Atom with no loss to non-cavity modes (`γ = 0`).
    pub fn lossless(big_gamma: f64) -> Result<Self> {
        Self::new(big_gamma, 0.0)
    }

    /// Construct from the spontaneous-emission ratio `β = Γ/(Γ + γ/2)`,
    /// back-computing `γ = 2Γ(1/β − 1)`. Requires `β ∈ (0, 1]`.
    pub fn from_beta(big_gamma: f64, beta: f64) -> Result<Self> {
        if !(beta.is_finite() && beta > 0.0 && beta <= 1.0) {
            return Err(Error::Domain(format!("beta must lie in (0, 1], got {beta}")));
        }
        Self::new(big_gamma, 2.0 * big_gamma * (1.0 / beta - 1.0))
    }

    pub fn big_gamma(&self) -> f64 {
        self.big_gamma
    }

    pub fn gamma_loss(&self) -> f64 {
        self.gamma_loss
    }

    /// Fraction of spontaneous emission exiting through the cavity,
    /// `β = Γ/(Γ + γ/2)`; lies in `(0, 1]`.
    pub fn beta(&self) -> f64 {
        self.big_gamma / (self.big_gamma + self.gamma_loss / 2.0)
    }

    /// Dipole decay rate `Γ' = Γ + γ/2`.
    pub fn dipole_decay(&self) -> f64 {
        self.big_gamma + self.gamma_loss / 2.0
    }

    /// Inversion decay rate `2Γ + γ`.
    pub fn inversion_decay(&self) -> f64 {
        2.0 * self.big_gamma + self.gamma_loss
    }
}

/// Bare cavity-QED parameters of the bad-cavity reduction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CavityParams {
    g: f64,
    kappa: f64,
}

impl CavityParams {
    pub fn new(g: f64, kappa: f64) -> Result<Self> {
        if !(g.is_finite() && g > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "g must be positive and finite, got {g}"
            )));
        }
        if !(kappa.is_finite() && kappa > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "kappa must be positive and finite, got {kappa}"
            )));
        }
        Ok(Self { g, kappa })
    }

    pub fn g(&self) -> f64 {
        self.g
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }
}

/// Result of the bad-cavity parameter reduction `Γ = g²/κ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EffectiveGamma {
    /// Effective dipole damping rate `g²/κ`.
    pub big_gamma: f64,
    /// Validity diagnostic `g/κ`; the adiabatic elimination requires `κ ≫ g`.
    pub coupling_ratio: f64,
    /// True when `g/κ ≤ 0.1`, the regime where the reduction is trusted.
    pub bad_cavity_ok: bool,
}

/// Bad-cavity reduction: `Γ = g²/κ` with validity diagnostics.
pub fn effective_gamma(cavity: CavityParams) -> EffectiveGamma {
    let ratio = cavity.g / cavity.kappa;
    EffectiveGamma {
        big_gamma: cavity.g * cavity.g / cavity.kappa,
        coupling_ratio: ratio,
        bad_cavity_ok: ratio <= 0.1,
    }
}

/// Expectation values of the two-level atom: dipole `⟨σ₋⟩` and
/// inversion `⟨σ_z⟩`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlochState {
    pub sigma_minus: Complex64,
    pub sigma_z: f64,
}

impl BlochState {
    /// Validated constructor; enforces the Bloch bound within [`BLOCH_SLACK`].
    pub fn new(sigma_minus: Complex64, sigma_z: f64) -> Result<Self> {
        let state = Self { sigma_minus, sigma_z };
        state.validate()?;
        Ok(state)
    }

    /// Ground state `(0, −1/2)`.
    pub fn ground() -> Self {
        Self { sigma_minus: Complex64::new(0.0, 0.0), sigma_z: -0.5 }
    }

    /// Fully excited state `(0, +1/2)`.
    pub fn excited() -> Self {
        Self { sigma_minus: Complex64::new(0.0, 0.0), sigma_z: 0.5 }
    }

    /// Squared Bloch-vector length `|σ₋|² + σ_z²`.
    pub fn bloch_norm_sq(&self) -> f64 {
        self.sigma_minus.norm_sqr() + self.sigma_z * self.sigma_z
    }

    /// Checks `|σ₋|² + σ_z² ≤ 1/4` and `−1/2 ≤ σ_z ≤ 1/2` within slack.
    pub fn validate(&self) -> Result<()> {
        if !(self.sigma_minus.re.is_finite()
            && self.sigma_minus.im.is_finite()
            && self.sigma_z.is_finite())
        {
            return Err(Error::InvalidState("non-finite Bloch state".into()));
        }
        if self.bloch_norm_sq() > 0.25 + BLOCH_SLACK {
            return Err(Error::InvalidState(format!(
                "Bloch bound violated: |sigma_minus|^2 + sigma_z^2 = {} > 1/4",
                self.bloch_norm_sq()
            )));
        }
        if self.sigma_z < -0.5 - BLOCH_SLACK || self.sigma_z > 0.5 + BLOCH_SLACK {
            return Err(Error::InvalidState(format!(
                "sigma_z = {} outside [-1/2, 1/2]",
                self.sigma_z
            )));
        }
        Ok(())
    }
}

/// Stationary solution of the driven atom together with the reflected field.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SteadyStateSolution {
    pub state: BlochState,
    /// Coherent reflected amplitude `b_in + √(2Γ)⟨σ₋⟩`.
    pub b_out: Complex64,
    /// Incoherent (random-phase) emission power through the cavity.
    pub p_noise: f64,
}

/// Stationary solution of the (loss-extended) Bloch equations under a
/// constant drive `b_in`.
///
/// With `Γ' = Γ + γ/2`:
///
/// ```text
/// σ_z = −Γ'² / (2Γ'² + 8Γ|b_in|²)
/// σ₋  = 2√(2Γ) b_in σ_z / Γ'
/// ```
///
/// For `γ = 0` this reduces to the lossless stationary solution with
/// `b_out/b_in = (4x − 1)/(4x + 1)` at `x = |b_in|²/Γ`.
pub fn steady_state(params: &AtomParams, b_in: Complex64) -> Result<SteadyStateSolution> {
    if !(b_in.re.is_finite() && b_in.im.is_finite()) {
        return Err(Error::InvalidParameter(format!("b_in must be finite, got {b_in}")));
    }
    let big_gamma = params.big_gamma();
    let gp = params.dipole_decay();
    let intensity = b_in.norm_sqr();

    let sigma_z = -gp * gp / (2.0 * gp * gp + 8.0 * big_gamma * intensity);
    let root = (2.0 * big_gamma).sqrt();
    let sigma_minus = 2.0 * root * b_in * sigma_z / gp;
    let state = BlochState { sigma_minus, sigma_z };

    let b_out = b_in + root * sigma_minus;
    let p_noise = 2.0 * big_gamma * (sigma_z + 0.5 - sigma_minus.norm_sqr());
    Ok(SteadyStateSolution { state, b_out, p_noise })
}

/// Lossless steady-state amplitude ratio `b_out/b_in = (4x − 1)/(4x + 1)`
/// at scaled intensity `x = |b_in|²/Γ`.
pub fn response_ratio(x: f64) -> Result<f64> {
    check_scaled_intensity(x)?;
    if x.is_infinite() {
        return Ok(1.0);
    }
    Ok((4.0 * x - 1.0) / (4.0 * x + 1.0))
}

/// Incoherent emission power `2Γ(σ_z + 1/2 − |σ₋|²)`.
///
/// Non-negative for every state satisfying the Bloch bound, since
/// `σ_z + 1/2 − |σ₋|² ≥ (σ_z + 1/2)²` there.
pub fn noise_power(params: &AtomParams, state: &BlochState) -> Result<f64> {
    state.validate()?;
    Ok(2.0 * params.big_gamma() * (state.sigma_z + 0.5 - state.sigma_minus.norm_sqr()))
}

/// Lower bound on the incoherent emission, `2Γ(σ_z + 1/2)²`, attained when
/// the Bloch vector is maximal at the given inversion.
pub fn noise_lower_bound(params: &AtomParams, sigma_z: f64) -> Result<f64> {
    if !(sigma_z.is_finite() && (-0.5..=0.5).contains(&sigma_z)) {
        return Err(Error::Domain(format!(
            "sigma_z must lie in [-1/2, 1/2], got {sigma_z}"
        )));
    }
    let excitation = sigma_z + 0.5;
    Ok(2.0 * params.big_gamma() * excitation * excitation)
}

/// Reflected amplitude from input-output theory: `b_in + √(2Γ)⟨σ₋⟩`.
pub fn output_amplitude(
    params: &AtomParams,
    b_in: Complex64,
    state: &BlochState,
) -> Result<Complex64> {
    state.validate()?;
    if !(b_in.re.is_finite() && b_in.im.is_finite()) {
        return Err(Error::InvalidParameter(format!("b_in must be finite, got {b_in}")));
    }
    Ok(b_in + (2.0 * params.big_gamma()).sqrt() * state.sigma_minus)
}

/// Relative contributions of coherent response and incoherent noise to the
/// total output intensity in the lossless case:
///
/// ```text
/// coherent = (4x − 1)² / (4x + 1)²
/// noise    = 16x / (4x + 1)²
/// ```
///
/// The two fractions sum to one identically.
pub fn intensity_fractions(x: f64) -> Result<(f64, f64)> {
    check_scaled_intensity(x)?;
    if x.is_infinite() {
        return Ok((1.0, 0.0));
    }
    let denom = (4.0 * x + 1.0) * (4.0 * x + 1.0);
    let coherent = (4.0 * x - 1.0) * (4.0 * x - 1.0) / denom;
    let noise = 16.0 * x / denom;
    Ok((coherent, noise))
}

/// Linear (weak-drive) amplitude ratio `1 − 2β` with `β = Γ/(Γ + γ/2)`.
pub fn linear_response(params: &AtomParams) -> f64 {
    1.0 - 2.0 * params.beta()
}

/// Location of the phase-switching point, if the steady-state response
/// crosses zero.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum SwitchingIntensity {
    /// Input intensity `|b_in|²` at which the coherent output vanishes.
    Crossing { intensity: f64 },
    /// The response never changes sign (linear response already ≥ 0,
    /// i.e. `β ≤ 1/2`).
    NoCrossing,
}

impl SwitchingIntensity {
    pub fn intensity(&self) -> Option<f64> {
        match self {
            Self::Crossing { intensity } => Some(*intensity),
            Self::NoCrossing => None,
        }
    }
}

/// Input intensity where the coherent reflected amplitude crosses zero.
///
/// Lossless case: exactly `Γ/4`. With losses the zero of the generalized
/// steady-state response is located by bisection on log-intensity over
/// `x ∈ [10⁻⁴, 10⁴]` to relative tolerance [`SWITCHING_BISECTION_TOL`];
/// when the response has no sign change (β ≤ 1/2) an explicit no-crossing
/// indicator is returned.
pub fn switching_intensity(params: &AtomParams) -> SwitchingIntensity {
    let big_gamma = params.big_gamma();
    if params.gamma_loss() == 0.0 {
        return SwitchingIntensity::Crossing { intensity: big_gamma / 4.0 };
    }

    let ratio_at = |x: f64| -> f64 {
        let b_in = Complex64::new((x * big_gamma).sqrt(), 0.0);
        let sol = steady_state(params, b_in).expect("finite drive");
        sol.b_out.re / b_in.re
    };

    let (mut lo, mut hi) = (1e-4_f64, 1e4_f64);
    let (r_lo, r_hi) = (ratio_at(lo), ratio_at(hi));
    if r_lo.signum() == r_hi.signum() {
        return SwitchingIntensity::NoCrossing;
    }
    // bisect on log10(x); response is monotone increasing in x
    while (hi - lo) / (0.5 * (hi + lo)) > SWITCHING_BISECTION_TOL {
        let mid = 10f64.powf(0.5 * (lo.log10() + hi.log10()));
        if ratio_at(mid).signum() == r_lo.signum() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    SwitchingIntensity::Crossing { intensity: 0.5 * (lo + hi) * big_gamma }
}

/// Outcome of the two-photon pulse feasibility check.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PulseCheck {
    /// Average intensity `2/T` of a two-photon pulse of duration `T`.
    pub average_intensity: f64,
    /// Lossless switching intensity `Γ/4`.
    pub switching_intensity: f64,
    /// Strict comparison `2/T > Γ/4`; the boundary `T = 8/Γ` reports false.
    pub exceeds: bool,
}

/// Checks whether a two-photon pulse of the given duration exceeds the
/// switching intensity, i.e. whether `T < 8/Γ` (strict).
pub fn two_photon_pulse_check(params: &AtomParams, duration: f64) -> Result<PulseCheck> {
    if !(duration.is_finite() && duration > 0.0) {
        return Err(Error::Domain(format!(
            "pulse duration must be positive, got {duration}"
        )));
    }
    let average_intensity = 2.0 / duration;
    let switching = params.big_gamma() / 4.0;
    Ok(PulseCheck {
        average_intensity,
        switching_intensity: switching,
        exceeds: average_intensity > switching,
    })
}

fn check_scaled_intensity(x: f64) -> Result<()> {
    if x.is_nan() || x < 0.0 {
        return Err(Error::Domain(format!("scaled intensity must be >= 0, got {x}")));
    }
    Ok(())
}
