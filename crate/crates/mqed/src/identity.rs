//! The 1D noise-current kernels and the completeness identity tying the
//! imaginary part of the Green's function to the scattering-mode sum plus
//! the medium absorption integrals:
//!
//!   Im g_ω(x,x′) = (1/4k)·Σ_σ F_ω(x|σ)F_ω*(x′|σ)
//!                + k²·∫dz Im ε_ω(z)·g_ω(x,z)g_ω*(x′,z)
//!                + ∫dz Im(−1/μ_ω(z))·∂_z g_ω(x,z)[∂_z g_ω(x′,z)]*
//!
//! together with the equal-frequency field-commutator spectrum it implies,
//! the medium-only version that survives for an absorber filling all space,
//! and the far-field amplitude relation between g and the scattering modes.
//!
//! The layered solver measures length in axis units with c = 1, so the
//! vacuum wavenumber is k = ω throughout; ħ and ε₀ stay symbolic where they
//! appear (the kernel normalizations).

use serde_json::json;
use std::f64::consts::PI;

use crate::constants::Constants;
use crate::error::{Error, Result};
use crate::layered::{homogeneous_green, refractive_index, uniform_grid, Green1D, Structure1D};
use crate::lin::symmetric_eigen;
use crate::quad::{composite_gauss_legendre, integrate, QuadraturePolicy};
use crate::report::CheckReport;
use crate::response::ResponseModel;
use crate::{Complex, I};

/// The three kernels of the 1D noise-current expansion at one frequency:
/// a scattering kernel proportional to the mode functions and electric and
/// magnetic medium kernels proportional to the Green's function and its
/// source-side derivative, weighted by the local absorption.
pub struct KernelSet1D {
    pub omega: f64,
    /// Vacuum wavenumber k = ω (axis units with c = 1).
    pub k: f64,
    pub constants: Constants,
    structure: Structure1D,
    green: Green1D,
}

impl KernelSet1D {
    pub fn new(structure: &Structure1D, omega: f64, constants: Constants) -> Result<Self> {
        constants.validate()?;
        if (constants.c - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidInput(
                "the 1D solver fixes c = 1 by its choice of axis units; rescale ω instead".into(),
            ));
        }
        let green = Green1D::new(structure, omega)?;
        Ok(KernelSet1D {
            omega,
            k: green.k,
            constants,
            structure: structure.clone(),
            green,
        })
    }

    pub fn green(&self) -> &Green1D {
        &self.green
    }

    /// The scattering normalization constant C_s = ħk/(4πε₀), pinned by the
    /// vacuum limit of the completeness identity.
    pub fn scattering_constant(&self) -> f64 {
        self.constants.hbar * self.k / (4.0 * PI * self.constants.eps0)
    }

    /// sqrt(C_s)·F_ω(x|σ).
    pub fn scattering(&self, x: f64, sigma: i32) -> Result<Complex> {
        let mode = match sigma {
            1 => &self.green.psi_plus,
            -1 => &self.green.psi_minus,
            _ => return Err(Error::InvalidInput("σ must be ±1".into())),
        };
        Ok(self.scattering_constant().sqrt() * mode.field(x))
    }

    /// Local absorption pair (Im ε, Im(−1/μ)) at z; both vanish in vacuum.
    fn loss_at(&self, z: f64) -> (f64, f64) {
        let (eps, mu) = self.structure.eval_at(z, self.omega);
        (eps.im.max(0.0), (-1.0 / mu).im.max(0.0))
    }

    /// i·sqrt((ħk⁴/πε₀)·Im ε_ω(z))·g_ω(x,z).
    pub fn electric(&self, x: f64, z: f64) -> Complex {
        let (im_eps, _) = self.loss_at(z);
        let k = self.k;
        let pref = self.constants.hbar * k.powi(4) / (PI * self.constants.eps0);
        I * (pref * im_eps).sqrt() * self.green.eval(x, z)
    }

    /// −(1/k)·sqrt((ħk⁴/πε₀)·Im(−1/μ_ω(z)))·∂_z g_ω(x,z).
    pub fn magnetic(&self, x: f64, z: f64) -> Complex {
        let (_, im_inv_mu) = self.loss_at(z);
        let k = self.k;
        let pref = self.constants.hbar * k.powi(4) / (PI * self.constants.eps0);
        -(1.0 / k) * (pref * im_inv_mu).sqrt() * self.green.eval_dz(x, z)
    }
}

/// The four terms of the completeness identity at one (x, x′) pair, with
/// every constant divided out.
#[derive(Debug, Clone, Copy)]
pub struct CompletenessBreakdown {
    /// Im g_ω(x,x′).
    pub lhs: f64,
    /// (1/4k)·Σ_σ F_ω(x|σ)F_ω*(x′|σ).
    pub scattering: Complex,
    /// k²·∫dz Im ε·g g*.
    pub electric: Complex,
    /// ∫dz Im(−1/μ)·∂_z g (∂_z g)*.
    pub magnetic: Complex,
    /// Quadrature nodes used for the medium integrals.
    pub nodes: usize,
}

impl CompletenessBreakdown {
    pub fn rhs(&self) -> Complex {
        self.scattering + self.electric + self.magnetic
    }

    /// LHS minus the medium terms alone — the part that only the scattering
    /// sum can account for. Nonzero for any finite structure: truncating the
    /// expansion to medium oscillators misses exactly this much.
    pub fn medium_only_defect(&self) -> Complex {
        Complex::new(self.lhs, 0.0) - self.electric - self.magnetic
    }
}

/// Interface-aligned composite Gauss–Legendre rule over the structure
/// layers, with extra panel breaks at the observation points (where g has a
/// derivative kink) and panel counts following the local optical phase.
struct ZRule {
    nodes: Vec<f64>,
    weights: Vec<f64>,
    im_eps: Vec<f64>,
    im_inv_mu: Vec<f64>,
}

fn z_rule(
    structure: &Structure1D,
    omega: f64,
    extra_breaks: &[f64],
    scale: usize,
    order: usize,
) -> ZRule {
    let k = omega;
    let mut rule = ZRule {
        nodes: Vec::new(),
        weights: Vec::new(),
        im_eps: Vec::new(),
        im_inv_mu: Vec::new(),
    };
    for layer in structure.layers() {
        let (eps, mu) = layer.response.eval_real(omega);
        let im_eps = eps.im.max(0.0);
        let im_inv_mu = (-1.0 / mu).im.max(0.0);
        if im_eps == 0.0 && im_inv_mu == 0.0 {
            continue;
        }
        let kn = (refractive_index(eps, mu) * k).norm();
        let mut breaks = vec![layer.x_min, layer.x_max];
        for &b in extra_breaks {
            if b > layer.x_min && b < layer.x_max {
                breaks.push(b);
            }
        }
        breaks.sort_by(f64::total_cmp);
        for seg in breaks.windows(2) {
            let (a, b) = (seg[0], seg[1]);
            if b - a < 1e-14 {
                continue;
            }
            // One panel per ~π of phase of the doubled-frequency products.
            let panels = (((b - a) * (2.0 * kn + 1.0) / PI).ceil() as usize).max(1) * scale;
            let (xs, ws) = composite_gauss_legendre(a, b, panels, order);
            for (x, w) in xs.into_iter().zip(ws) {
                rule.nodes.push(x);
                rule.weights.push(w);
                rule.im_eps.push(im_eps);
                rule.im_inv_mu.push(im_inv_mu);
            }
        }
    }
    rule
}

fn breakdown_with(
    green: &Green1D,
    structure: &Structure1D,
    x: f64,
    x_prime: f64,
    scale: usize,
    order: usize,
) -> CompletenessBreakdown {
    let k = green.k;
    let lhs = green.eval(x, x_prime).im;
    let scattering = (green.psi_plus.field(x) * green.psi_plus.field(x_prime).conj()
        + green.psi_minus.field(x) * green.psi_minus.field(x_prime).conj())
        / (4.0 * k);
    let rule = z_rule(structure, green.omega, &[x, x_prime], scale, order);
    let mut electric = Complex::new(0.0, 0.0);
    let mut magnetic = Complex::new(0.0, 0.0);
    for i in 0..rule.nodes.len() {
        let z = rule.nodes[i];
        let w = rule.weights[i];
        if rule.im_eps[i] > 0.0 {
            electric += w * rule.im_eps[i] * green.eval(x, z) * green.eval(x_prime, z).conj();
        }
        if rule.im_inv_mu[i] > 0.0 {
            magnetic +=
                w * rule.im_inv_mu[i] * green.eval_dz(x, z) * green.eval_dz(x_prime, z).conj();
        }
    }
    electric *= k * k;
    CompletenessBreakdown {
        lhs,
        scattering,
        electric,
        magnetic,
        nodes: rule.nodes.len(),
    }
}

/// Evaluates all terms of the completeness identity at one point pair with
/// an explicit quadrature resolution (`scale` multiplies the panel count;
/// `order` is the Gauss–Legendre order per panel). Used directly by
/// convergence studies; `completeness_1d` wraps it with sensible defaults.
pub fn completeness_breakdown(
    structure: &Structure1D,
    omega: f64,
    x: f64,
    x_prime: f64,
    scale: usize,
    order: usize,
) -> Result<CompletenessBreakdown> {
    let green = Green1D::new(structure, omega)?;
    Ok(breakdown_with(&green, structure, x, x_prime, scale, order))
}

/// Checks the completeness identity at one (x, x′) pair. The medium
/// integrals are evaluated at two resolutions; the finer value is compared
/// against Im g and the resolution difference is recorded as the quadrature
/// error estimate.
pub fn completeness_1d(
    structure: &Structure1D,
    omega: f64,
    x: f64,
    x_prime: f64,
    policy: &QuadraturePolicy,
) -> CheckReport {
    let params = json!({ "omega": omega, "x": x, "x_prime": x_prime });
    let name = "completeness-1d";
    let anchor = "green-1d/completeness";
    if let Err(e) = policy.validate() {
        return CheckReport::failed(name, anchor, params, &e.to_string());
    }
    let green = match Green1D::new(structure, omega) {
        Ok(g) => g,
        Err(e) => return CheckReport::failed(name, anchor, params, &e.to_string()),
    };
    let coarse = breakdown_with(&green, structure, x, x_prime, 1, 10);
    let fine = breakdown_with(&green, structure, x, x_prime, 2, 10);
    let quad_est = (fine.rhs() - coarse.rhs()).norm();
    CheckReport::compare(
        name,
        anchor,
        params,
        Complex::new(fine.lhs, 0.0),
        fine.rhs(),
        1e-6,
    )
    .with_meta("nodes", json!(fine.nodes))
    .with_meta("quadrature_estimate", json!(quad_est))
    .with_meta(
        "terms",
        json!({
            "scattering": [fine.scattering.re, fine.scattering.im],
            "electric": [fine.electric.re, fine.electric.im],
            "magnetic": [fine.magnetic.re, fine.magnetic.im],
        }),
    )
}

/// The equal-frequency field-commutator spectral density (ħk²/πε₀)·Im g, in
/// units ħ = ε₀ = 1. The report checks the value against the kernel-sum
/// representation, the Hermitian symmetry of that representation, and
/// positive semidefiniteness of the density sampled on a position grid.
pub fn commutator_spectrum(
    structure: &Structure1D,
    omega: f64,
    x: f64,
    x_prime: f64,
) -> Result<(Complex, CheckReport)> {
    let green = Green1D::new(structure, omega)?;
    let k = green.k;
    let pref = k * k / PI;
    let value = Complex::new(pref * green.eval(x, x_prime).im, 0.0);
    let params = json!({ "omega": omega, "x": x, "x_prime": x_prime });
    let name = "commutator-spectrum";
    let anchor = "green-1d/commutator";

    let fwd = breakdown_with(&green, structure, x, x_prime, 2, 10);
    let rev = breakdown_with(&green, structure, x_prime, x, 2, 10);
    let rhs = pref * fwd.rhs();
    let sym_err = (fwd.rhs() - rev.rhs().conj()).norm();
    let sym_scale = fwd.rhs().norm().max(1e-300);

    // Positive semidefiniteness of the sampled density matrix.
    let (x0, x1) = structure.extent().unwrap_or((0.0, 0.0));
    let grid = uniform_grid(x0 - 2.0, x1 + 2.0, 9);
    let n = grid.len();
    let mut m = nalgebra::DMatrix::<f64>::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let v = pref * green.eval(grid[i], grid[j]).im;
            m[(i, j)] = v;
            m[(j, i)] = v;
        }
    }
    let (eigs, _) = symmetric_eigen(&m)?;
    let max_eig = eigs.iter().fold(0.0f64, |a, &b| a.max(b.abs()));
    let min_eig = eigs.min();
    let psd_ok = min_eig >= -1e-10 * max_eig.max(1e-300);

    let mut report = CheckReport::compare(name, anchor, params, value, rhs, 1e-6)
        .with_meta("symmetry_error", json!(sym_err))
        .with_meta("min_eigenvalue", json!(min_eig))
        .with_meta("max_eigenvalue", json!(max_eig));
    if sym_err > 1e-10 * sym_scale || !psd_ok {
        report.pass = false;
    }
    Ok((value, report))
}

/// Checks the medium-only completeness identity — no scattering term — for
/// a homogeneous absorber filling all space, using the closed-form g. The
/// z-integral is truncated to [−T, T]; the leftover tail decays like
/// e^{−2·Im(kn)·T}, which is recorded in the report metadata.
pub fn unbounded_lnf_identity(
    model: &ResponseModel,
    omega: f64,
    x: f64,
    x_prime: f64,
    truncation: f64,
    policy: &QuadraturePolicy,
) -> Result<CheckReport> {
    if !(omega > 0.0) {
        return Err(Error::InvalidInput("unbounded identity requires ω > 0".into()));
    }
    if !(truncation > x.abs().max(x_prime.abs())) {
        return Err(Error::InvalidInput(
            "truncation window must contain both observation points".into(),
        ));
    }
    policy.validate()?;
    let k = omega;
    let (eps, mu) = model.eval_real(omega);
    let kn = refractive_index(eps, mu) * k;
    if kn.im <= 0.0 {
        return Err(Error::InvalidInput(
            "the medium-only identity requires absorption (Im kn > 0)".into(),
        ));
    }
    let im_eps = eps.im.max(0.0);
    let im_inv_mu = (-1.0 / mu).im.max(0.0);

    let g = |a: f64, z: f64| homogeneous_green(model, omega, a, z);
    // ∂_z of iμ·e^{ikn|z−a|}/(2kn) = ikn·sign(z−a)·g.
    let dg = |a: f64, z: f64| I * kn * (z - a).signum() * g(a, z);

    let lhs = g(x, x_prime).im;
    let (lo, hi) = (x.min(x_prime), x.max(x_prime));
    let segments = [(-truncation, lo), (lo, hi), (hi, truncation)];
    let mut electric = Complex::new(0.0, 0.0);
    let mut magnetic = Complex::new(0.0, 0.0);
    let mut evals = 0usize;
    for &(a, b) in &segments {
        if b - a < 1e-14 {
            continue;
        }
        if im_eps > 0.0 {
            let r = integrate(&|z| g(x, z) * g(x_prime, z).conj(), a, b, policy)?;
            electric += r.value;
            evals += r.evaluations;
        }
        if im_inv_mu > 0.0 {
            let r = integrate(&|z| dg(x, z) * dg(x_prime, z).conj(), a, b, policy)?;
            magnetic += r.value;
            evals += r.evaluations;
        }
    }
    let rhs = k * k * im_eps * electric + im_inv_mu * magnetic;
    let tail_bound = (-2.0 * kn.im * truncation).exp();
    Ok(CheckReport::compare(
        "unbounded-medium-completeness",
        "green-homogeneous/medium-only",
        json!({ "omega": omega, "x": x, "x_prime": x_prime, "truncation": truncation }),
        Complex::new(lhs, 0.0),
        rhs,
        1e-6,
    )
    .with_meta("tail_bound", json!(tail_bound))
    .with_meta("evaluations", json!(evals)))
}

/// Checks the far-field relation between the Green's function and the
/// scattering mode incident from the far side:
///   g(x_far, x′)·e^{−ik·x_far} → (i/2k)·F_ω(x′|−1) as x_far → +∞,
/// and the mirrored relation with F_ω(x′|+1) as x_far → −∞. The far point
/// must lie at least five wavelengths outside the structure.
pub fn asymptotic_amplitude_check(
    structure: &Structure1D,
    omega: f64,
    x_prime: f64,
    x_far: f64,
) -> Result<CheckReport> {
    if !(omega > 0.0) {
        return Err(Error::InvalidInput("asymptotic check requires ω > 0".into()));
    }
    let green = Green1D::new(structure, omega)?;
    let k = green.k;
    let lambda = 2.0 * PI / k;
    let (x0, x1) = structure.extent().unwrap_or((0.0, 0.0));
    let (lhs, rhs, side) = if x_far >= x1 + 5.0 * lambda {
        (
            green.eval(x_far, x_prime) * (-I * k * x_far).exp(),
            I / (2.0 * k) * green.psi_minus.field(x_prime),
            "+inf",
        )
    } else if x_far <= x0 - 5.0 * lambda {
        (
            green.eval(x_far, x_prime) * (I * k * x_far).exp(),
            I / (2.0 * k) * green.psi_plus.field(x_prime),
            "-inf",
        )
    } else {
        return Err(Error::InvalidInput(format!(
            "x_far = {x_far} is within five wavelengths of the structure [{x0}, {x1}]"
        )));
    };
    Ok(CheckReport::compare(
        "asymptotic-amplitude",
        "green-1d/far-field",
        json!({ "omega": omega, "x_prime": x_prime, "x_far": x_far, "side": side }),
        lhs,
        rhs,
        1e-8,
    ))
}
