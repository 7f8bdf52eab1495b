//! Causal magneto-dielectric response models (Drude–Lorentz pole sums) and
//! numerical verification of the generalized dispersion integrals that the
//! quantization machinery relies on.
//!
//! Each identity equates a half-line frequency integral of the loss spectrum
//! against a closed form in ε_ω or 1/μ_ω. The η → 0⁺ kernels are evaluated by
//! Plemelj splitting (see [`crate::quad`]); the delta terms are carried
//! analytically so the quadrature only ever sees smooth integrands.

use serde_json::json;
use std::f64::consts::PI;

use crate::constants::Constants;
use crate::error::{Error, Result};
use crate::quad::{self, QuadraturePolicy};
use crate::report::CheckReport;
use crate::{Complex, I};

/// One Lorentz oscillator contribution to a susceptibility,
/// χ_ω += strength / (resonance² − ω² − i·damping·ω).
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct PoleTerm {
    /// Squared plasma frequency (units of ω²); ≥ 0.
    pub strength: f64,
    /// Resonance frequency ω₀ ≥ 0.
    pub resonance: f64,
    /// Damping rate γ > 0; keeps the pole pair strictly below the real axis.
    pub damping: f64,
}

impl PoleTerm {
    pub fn new(strength: f64, resonance: f64, damping: f64) -> Result<Self> {
        let p = PoleTerm { strength, resonance, damping };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if self.strength < 0.0 || self.resonance < 0.0 || !(self.damping > 0.0) {
            return Err(Error::InvalidInput(format!(
                "pole term requires strength ≥ 0, resonance ≥ 0, damping > 0; got {self:?}"
            )));
        }
        Ok(())
    }
}

/// Causal response model: ε_ω = 1 + Σ electric poles, μ_ω = 1 + Σ magnetic
/// poles. An empty model is vacuum.
#[derive(Debug, Clone, Default, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct ResponseModel {
    pub electric_poles: Vec<PoleTerm>,
    pub magnetic_poles: Vec<PoleTerm>,
}

/// Which response function φ a dispersion identity addresses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Channel {
    /// φ_ω = ε_ω.
    Electric,
    /// φ_ω = 1/μ_ω.
    InverseMu,
}

impl Channel {
    pub fn label(&self) -> &'static str {
        match self {
            Channel::Electric => "electric",
            Channel::InverseMu => "inverse-mu",
        }
    }
}

fn pole_sum(poles: &[PoleTerm], omega: Complex) -> Complex {
    poles
        .iter()
        .map(|p| p.strength / (p.resonance * p.resonance - omega * omega - I * p.damping * omega))
        .sum()
}

impl ResponseModel {
    pub fn new(electric: Vec<PoleTerm>, magnetic: Vec<PoleTerm>) -> Result<Self> {
        for p in electric.iter().chain(magnetic.iter()) {
            p.validate()?;
        }
        Ok(ResponseModel { electric_poles: electric, magnetic_poles: magnetic })
    }

    /// Vacuum: no poles, ε = μ = 1 identically.
    pub fn vacuum() -> Self {
        ResponseModel::default()
    }

    pub fn is_vacuum(&self) -> bool {
        self.electric_poles.is_empty() && self.magnetic_poles.is_empty()
    }

    /// ε_ω and μ_ω at complex ω in the closed upper half-plane, where the
    /// pole sums are holomorphic.
    pub fn eval(&self, omega: Complex) -> Result<(Complex, Complex)> {
        if omega.im < 0.0 {
            return Err(Error::InvalidInput(format!(
                "response evaluation restricted to Im ω ≥ 0; got ω = {omega}"
            )));
        }
        Ok(self.eval_unchecked(omega))
    }

    /// ε_ω and μ_ω without the half-plane guard (used internally where ω is
    /// known real).
    pub(crate) fn eval_unchecked(&self, omega: Complex) -> (Complex, Complex) {
        (
            1.0 + pole_sum(&self.electric_poles, omega),
            1.0 + pole_sum(&self.magnetic_poles, omega),
        )
    }

    /// ε_ω and μ_ω on the real axis.
    pub fn eval_real(&self, omega: f64) -> (Complex, Complex) {
        self.eval_unchecked(Complex::new(omega, 0.0))
    }

    /// The channel function φ_ω at real ω.
    pub fn phi(&self, channel: Channel, omega: f64) -> Complex {
        let (eps, mu) = self.eval_real(omega);
        match channel {
            Channel::Electric => eps,
            Channel::InverseMu => 1.0 / mu,
        }
    }

    /// True if the given channel carries any loss.
    pub fn has_loss(&self, channel: Channel) -> bool {
        match channel {
            Channel::Electric => self.electric_poles.iter().any(|p| p.strength > 0.0),
            Channel::InverseMu => self.magnetic_poles.iter().any(|p| p.strength > 0.0),
        }
    }

    /// Single-pole model tuned so that ε at the given real frequency equals
    /// the prescribed complex value (μ = 1). Convenient for building test
    /// structures with definite local optical constants while keeping the
    /// model causal and passive.
    pub fn with_eps_at(eps: Complex, omega: f64) -> Result<Self> {
        Ok(ResponseModel {
            electric_poles: vec![fit_pole(eps - 1.0, omega)?],
            magnetic_poles: vec![],
        })
    }

    /// Two-pole model hitting prescribed ε and μ at one real frequency.
    pub fn with_eps_mu_at(eps: Complex, mu: Complex, omega: f64) -> Result<Self> {
        let electric = if eps == Complex::new(1.0, 0.0) {
            vec![]
        } else {
            vec![fit_pole(eps - 1.0, omega)?]
        };
        let magnetic = if mu == Complex::new(1.0, 0.0) {
            vec![]
        } else {
            vec![fit_pole(mu - 1.0, omega)?]
        };
        Ok(ResponseModel { electric_poles: electric, magnetic_poles: magnetic })
    }
}

/// Solves for one Lorentz pole with χ(ω) equal to a prescribed susceptibility
/// at one real frequency: χ = s/(ω₀² − ω² − iγω) with fixed γ, so the ratio
/// Im χ/Re χ pins ω₀² and the modulus pins s.
fn fit_pole(chi: Complex, omega: f64) -> Result<PoleTerm> {
    if !(omega > 0.0) {
        return Err(Error::InvalidInput("pole fitting requires ω > 0".into()));
    }
    if chi.im < 0.0 {
        return Err(Error::InvalidInput(format!(
            "passive fitting requires Im χ ≥ 0; got χ = {chi}"
        )));
    }
    if chi.im == 0.0 {
        // Lossless target: a resonance far above ω with negligible damping.
        if chi.re < 0.0 {
            return Err(Error::InvalidInput(format!(
                "lossless fitting requires χ ≥ 0 below resonance; got χ = {chi}"
            )));
        }
        let w0 = 100.0 * omega;
        return PoleTerm::new(chi.re * (w0 * w0 - omega * omega), w0, 1e-9 * omega);
    }
    // χ = s·(A + iB)/(A² + B²) with A = ω₀² − ω², B = γω.
    let gamma = 0.3 * omega;
    let b = gamma * omega;
    let a = b * chi.re / chi.im;
    let s = chi.im * (a * a + b * b) / b;
    let w0sq = a + omega * omega;
    if w0sq < 0.0 {
        return Err(Error::InvalidInput(format!(
            "no passive single-pole realization of χ = {chi} at ω = {omega}"
        )));
    }
    PoleTerm::new(s, w0sq.sqrt(), gamma)
}

/// The real coupling amplitudes entering the field–reservoir Hamiltonian:
/// α_ω = sqrt((2ε₀/π)·ω·Im ε_ω), β_ω = sqrt((2/πμ₀)·ω·Im(−1/μ_ω)).
/// Both are real and finite for passive models at ω > 0.
pub fn coupling_coefficients(
    model: &ResponseModel,
    constants: &Constants,
    omega: f64,
) -> Result<(f64, f64)> {
    if !(omega > 0.0) {
        return Err(Error::InvalidInput("coupling coefficients require ω > 0".into()));
    }
    let (eps, mu) = model.eval_real(omega);
    let im_eps = eps.im;
    let im_inv_mu_neg = (-1.0 / mu).im;
    let alpha_sq = (2.0 * constants.eps0 / PI) * omega * im_eps;
    let beta_sq = (2.0 / (PI * constants.mu0())) * omega * im_inv_mu_neg;
    // Passivity guarantees non-negativity; clamp roundoff.
    Ok((alpha_sq.max(0.0).sqrt(), beta_sq.max(0.0).sqrt()))
}

/// Kramers–Kronig check:
/// (2/π)∫₀^∞ dΩ Ω·Im φ_Ω/(Ω² − (ω+i0⁺)²) = φ_ω − 1.
pub fn kk_check(
    model: &ResponseModel,
    channel: Channel,
    omega: f64,
    policy: &QuadraturePolicy,
) -> Result<CheckReport> {
    if !(omega > 0.0) {
        return Err(Error::InvalidInput("kk_check requires ω > 0".into()));
    }
    let params = json!({ "channel": channel.label(), "omega": omega });
    let name = "kramers-kronig";
    let anchor = "dispersion/fundamental-1";
    let f = |om: f64| Complex::new(om * model.phi(channel, om).im, 0.0);
    let lhs = match quad::single_pole_integral(&f, omega, 1, policy) {
        Ok(r) => r,
        Err(e) => return Ok(CheckReport::failed(name, anchor, params, &e.to_string())),
    };
    let rhs = model.phi(channel, omega) - 1.0;
    Ok(CheckReport::compare(name, anchor, params, lhs.value * (2.0 / PI), rhs, 1e-8)
        .with_meta("quadrature", json!({ "evaluations": lhs.evaluations, "error": lhs.error })))
}

/// Runs every generalized dispersion identity at the given frequency pair
/// and returns one report per identity:
/// the double-pole fundamental integral (both channels, at the requested
/// n, σ, σ′), both single-pole coupling integrals, the mixed integral (both
/// channels), and both double-pole coupling integrals.
#[allow(clippy::too_many_arguments)]
pub fn dispersion_suite(
    model: &ResponseModel,
    constants: &Constants,
    n: u8,
    sigma: i32,
    sigma_prime: i32,
    omega: f64,
    omega_prime: f64,
    policy: &QuadraturePolicy,
) -> Result<Vec<CheckReport>> {
    if !(omega > 0.0) || !(omega_prime > 0.0) {
        return Err(Error::InvalidInput("dispersion_suite requires ω, ω′ > 0".into()));
    }
    if !(n == 0 || n == 1) {
        return Err(Error::InvalidInput("dispersion_suite requires n ∈ {0, 1}".into()));
    }
    if !(sigma == 1 || sigma == -1) || !(sigma_prime == 1 || sigma_prime == -1) {
        return Err(Error::InvalidInput("σ, σ′ must be ±1".into()));
    }
    if omega == omega_prime {
        return Err(Error::CoincidentFrequencies(
            "dispersion_suite requires ω ≠ ω′ (difference quotients degenerate)".into(),
        ));
    }
    constants.validate()?;
    let mut reports = Vec::with_capacity(8);
    for channel in [Channel::Electric, Channel::InverseMu] {
        reports.push(fundamental_double(
            model, channel, n, sigma, sigma_prime, omega, omega_prime, policy,
        ));
    }
    reports.push(coupling_single(model, constants, Channel::Electric, omega, policy));
    reports.push(coupling_single(model, constants, Channel::InverseMu, omega, policy));
    for channel in [Channel::Electric, Channel::InverseMu] {
        reports.push(mixed_double(model, channel, sigma_prime, omega, omega_prime, policy));
    }
    reports.push(coupling_double(
        model, constants, Channel::Electric, sigma_prime, omega, omega_prime, policy,
    ));
    reports.push(coupling_double(
        model, constants, Channel::InverseMu, sigma_prime, omega, omega_prime, policy,
    ));
    Ok(reports)
}

/// φ at signed frequency σω on the real axis, using φ_{−ω} = φ_ω*.
fn phi_signed(model: &ResponseModel, channel: Channel, sigma: i32, omega: f64) -> Complex {
    let phi = model.phi(channel, omega);
    if sigma >= 0 {
        phi
    } else {
        phi.conj()
    }
}

/// Double-pole fundamental integral:
/// (2/π)∫₀^∞ dΩ Ω^{2n+1} Im φ_Ω / [(Ω²−(ω+iσ0⁺)²)(Ω²−(ω′+iσ′0⁺)²)]
///   = [ω^{2n}(φ_{σω}−1) − ω′^{2n}(φ_{σ′ω′}−1)] / (ω² − ω′²).
#[allow(clippy::too_many_arguments)]
fn fundamental_double(
    model: &ResponseModel,
    channel: Channel,
    n: u8,
    sigma: i32,
    sigma_prime: i32,
    omega: f64,
    omega_prime: f64,
    policy: &QuadraturePolicy,
) -> CheckReport {
    let name = format!("dispersion-fundamental-{}", channel.label());
    let anchor = "dispersion/fundamental-2";
    let params = json!({
        "channel": channel.label(), "n": n, "sigma": sigma, "sigma_prime": sigma_prime,
        "omega": omega, "omega_prime": omega_prime,
    });
    let pw = 2 * n as i32 + 1;
    let f = |om: f64| Complex::new(om.powi(pw) * model.phi(channel, om).im, 0.0);
    let lhs = match quad::double_pole_integral(&f, omega, sigma, omega_prime, sigma_prime, policy) {
        Ok(r) => r,
        Err(e) => return CheckReport::failed(&name, anchor, params, &e.to_string()),
    };
    let wn = omega.powi(2 * n as i32);
    let wpn = omega_prime.powi(2 * n as i32);
    let rhs = (wn * (phi_signed(model, channel, sigma, omega) - 1.0)
        - wpn * (phi_signed(model, channel, sigma_prime, omega_prime) - 1.0))
        / (omega * omega - omega_prime * omega_prime);
    CheckReport::compare(&name, anchor, params, lhs.value * (2.0 / PI), rhs, 1e-7)
        .with_meta("quadrature", json!({ "evaluations": lhs.evaluations, "error": lhs.error }))
}

/// Squared coupling amplitude entering the single- and double-pole coupling
/// integrals: α_Ω² for the electric channel, β_Ω² for the magnetic one.
fn coupling_sq(model: &ResponseModel, constants: &Constants, channel: Channel, om: f64) -> f64 {
    let (eps, mu) = model.eval_real(om);
    match channel {
        Channel::Electric => (2.0 * constants.eps0 / PI) * om * eps.im,
        Channel::InverseMu => (2.0 / (PI * constants.mu0())) * om * (-1.0 / mu).im,
    }
}

/// Single-pole coupling integral:
/// ∫₀^∞ dΩ α_Ω²/(Ω²−(ω+i0⁺)²) = ε₀(ε_ω − 1), and with β_Ω² the analog
/// (1/μ₀)(1 − 1/μ_ω).
fn coupling_single(
    model: &ResponseModel,
    constants: &Constants,
    channel: Channel,
    omega: f64,
    policy: &QuadraturePolicy,
) -> CheckReport {
    let name = format!("dispersion-coupling-single-{}", channel.label());
    let anchor = "dispersion/coupling-1";
    let params = json!({ "channel": channel.label(), "omega": omega });
    let f = |om: f64| Complex::new(coupling_sq(model, constants, channel, om), 0.0);
    let lhs = match quad::single_pole_integral(&f, omega, 1, policy) {
        Ok(r) => r,
        Err(e) => return CheckReport::failed(&name, anchor, params, &e.to_string()),
    };
    let rhs = match channel {
        Channel::Electric => constants.eps0 * (model.phi(Channel::Electric, omega) - 1.0),
        Channel::InverseMu => {
            (1.0 - model.phi(Channel::InverseMu, omega)) / constants.mu0()
        }
    };
    CheckReport::compare(&name, anchor, params, lhs.value, rhs, 1e-7)
        .with_meta("quadrature", json!({ "evaluations": lhs.evaluations, "error": lhs.error }))
}

/// Mixed double-pole integral with opposite η prescriptions:
/// (2/π)(ω+σ′ω′)∫₀^∞ dΩ Ω·Im φ_Ω/[(Ω²−(ω−i0⁺)²)(Ω²−(ω′+iσ′0⁺)²)]
///   = (φ_ω* − φ_{ω′}*)/(ω+ω′)   for σ′ = −1,
///   = (φ_ω* − φ_{ω′})/(ω−ω′)    for σ′ = +1.
fn mixed_double(
    model: &ResponseModel,
    channel: Channel,
    sigma_prime: i32,
    omega: f64,
    omega_prime: f64,
    policy: &QuadraturePolicy,
) -> CheckReport {
    let name = format!("dispersion-mixed-{}", channel.label());
    let anchor = "dispersion/mixed";
    let params = json!({
        "channel": channel.label(), "sigma_prime": sigma_prime,
        "omega": omega, "omega_prime": omega_prime,
    });
    let f = |om: f64| Complex::new(om * model.phi(channel, om).im, 0.0);
    let lhs = match quad::double_pole_integral(&f, omega, -1, omega_prime, sigma_prime, policy) {
        Ok(r) => r,
        Err(e) => return CheckReport::failed(&name, anchor, params, &e.to_string()),
    };
    let prefactor = (2.0 / PI) * (omega + sigma_prime as f64 * omega_prime);
    let phi_w = model.phi(channel, omega);
    let phi_wp = model.phi(channel, omega_prime);
    let rhs = if sigma_prime == -1 {
        (phi_w.conj() - phi_wp.conj()) / (omega + omega_prime)
    } else {
        (phi_w.conj() - phi_wp) / (omega - omega_prime)
    };
    CheckReport::compare(&name, anchor, params, lhs.value * prefactor, rhs, 1e-7)
        .with_meta("quadrature", json!({ "evaluations": lhs.evaluations, "error": lhs.error }))
}

/// Double-pole coupling integral:
/// ∫₀^∞ dΩ (Ω²−σ′ωω′)·α_Ω²/[(Ω²−(ω+i0⁺)²)(Ω²−(ω′+iσ′0⁺)²)]
///   = ε₀[(ωε_ω − ω′ε_{ω′}*)/(ω−ω′) − 1]   for σ′ = −1,
///   = ε₀[(ωε_ω + ω′ε_{ω′})/(ω+ω′) − 1]    for σ′ = +1,
/// with the β_Ω² analog replacing ε by −1/μ and ε₀ by 1/μ₀ with flipped
/// signs on both terms.
fn coupling_double(
    model: &ResponseModel,
    constants: &Constants,
    channel: Channel,
    sigma_prime: i32,
    omega: f64,
    omega_prime: f64,
    policy: &QuadraturePolicy,
) -> CheckReport {
    let name = format!("dispersion-coupling-double-{}", channel.label());
    let anchor = "dispersion/coupling-2";
    let params = json!({
        "channel": channel.label(), "sigma_prime": sigma_prime,
        "omega": omega, "omega_prime": omega_prime,
    });
    let s = sigma_prime as f64;
    let f = |om: f64| {
        Complex::new(
            (om * om - s * omega * omega_prime) * coupling_sq(model, constants, channel, om),
            0.0,
        )
    };
    let lhs = match quad::double_pole_integral(&f, omega, 1, omega_prime, sigma_prime, policy) {
        Ok(r) => r,
        Err(e) => return CheckReport::failed(&name, anchor, params, &e.to_string()),
    };
    let rhs = match channel {
        Channel::Electric => {
            let eps_w = model.phi(Channel::Electric, omega);
            let eps_wp = model.phi(Channel::Electric, omega_prime);
            if sigma_prime == -1 {
                constants.eps0
                    * ((omega * eps_w - omega_prime * eps_wp.conj()) / (omega - omega_prime) - 1.0)
            } else {
                constants.eps0
                    * ((omega * eps_w + omega_prime * eps_wp) / (omega + omega_prime) - 1.0)
            }
        }
        Channel::InverseMu => {
            let im_w = model.phi(Channel::InverseMu, omega);
            let im_wp = model.phi(Channel::InverseMu, omega_prime);
            if sigma_prime == -1 {
                ((-omega * im_w + omega_prime * im_wp.conj()) / (omega - omega_prime) + 1.0)
                    / constants.mu0()
            } else {
                ((-omega * im_w - omega_prime * im_wp) / (omega + omega_prime) + 1.0)
                    / constants.mu0()
            }
        }
    };
    CheckReport::compare(&name, anchor, params, lhs.value, rhs, 1e-7)
        .with_meta("quadrature", json!({ "evaluations": lhs.evaluations, "error": lhs.error }))
}

/// The single-Lorentz-pole models used throughout the test suite:
/// electric (1, 2, 0.1) and magnetic (0.5, 1, 0.05). Generic, with no
/// accidental symmetry between the two channels.
pub fn standard_model() -> ResponseModel {
    ResponseModel {
        electric_poles: vec![PoleTerm { strength: 1.0, resonance: 2.0, damping: 0.1 }],
        magnetic_poles: vec![PoleTerm { strength: 0.5, resonance: 1.0, damping: 0.05 }],
    }
}
