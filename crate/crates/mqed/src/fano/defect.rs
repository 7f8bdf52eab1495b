//! Span defect of the material-only mode family.
//!
//! For an absorber that fills all space the material polariton family
//! {f̂_ωe, f̂_ωm} is complete, but for a finite object it misses the
//! scattering sector and spans only part of the normal-mode space. The
//! defect quantifies this: every exact normal mode b_m in the probed
//! frequency band is projected onto the span of the supplied material rows
//! under the symplectic (J-) inner product ⟨v, w⟩ = [v̂, ŵ†], and
//!
//!   defect = 1 − mean_m σ_m,   σ_m = h_m† G⁺ h_m,
//!
//! with overlaps h_m[i] = [v̂_i, b_m†], Gram G[i,j] = [v̂_i, v̂_j†], and G⁺
//! the eigenvalue-truncated pseudo-inverse. Since [b_m, b_m†] = 1, σ_m is
//! the symplectic-norm fraction of mode m captured by the family: 1 when
//! b_m lies in the span, 0 when it is orthogonal to it.

use nalgebra::{DMatrix, DVector};
use serde_json::json;

use super::diag::BogoliubovModes;
use super::model::PhaseSpaceModel;
use super::polariton::{bracket_cross, PolaritonVectors};
use crate::error::{Error, Result};
use crate::lin::hermitian_eigen;
use crate::report::CheckReport;
use crate::Complex;

/// Fraction of the in-band normal-mode space missed by a family of
/// polariton rows (usually the material-only family).
///
/// The probed band is the frequency range covered by the supplied rows,
/// padded by half a bath spacing on each side; normal modes outside it are
/// not scored. An empty family spans nothing: the defect is exactly 1 (the
/// no-medium case). A band containing no normal modes is rejected.
///
/// The returned report checks well-posedness of the projection rather than
/// a physics threshold: every σ_m must lie in [0, 1] up to roundoff, and
/// the indefinite part of the Gram (creation-sector leakage of the rows)
/// must stay small against its largest eigenvalue. The defect itself and
/// the σ_m statistics ride along as metadata for the caller to judge.
pub fn lnf_defect(
    model: &PhaseSpaceModel,
    modes: &BogoliubovModes,
    vectors: &PolaritonVectors,
) -> Result<(f64, CheckReport)> {
    let name = "material-span-defect";
    let anchor = "mode-span/material-only";
    if vectors.entries.is_empty() {
        let report = CheckReport::from_error(
            name,
            anchor,
            json!({"n_vectors": 0, "n_modes_in_band": 0}),
            0.0,
            1.0,
            1e-12,
        )
        .with_meta("defect", json!(1.0))
        .with_meta("note", json!("no material rows: nothing is spanned"));
        return Ok((1.0, report));
    }
    if vectors.dim != 2 * model.n_q() {
        return Err(Error::InvalidInput(
            "polariton rows and model have mismatched phase-space dimensions".into(),
        ));
    }

    let omega_lo = vectors.entries.iter().map(|e| e.omega).fold(f64::INFINITY, f64::min);
    let omega_hi = vectors.entries.iter().map(|e| e.omega).fold(0.0f64, f64::max);
    let pad = if model.n_bath() > 1 {
        0.5 * (model.bath_nodes[model.n_bath() - 1] - model.bath_nodes[0])
            / (model.n_bath() - 1) as f64
    } else {
        0.0
    };
    let band = (omega_lo - pad, omega_hi + pad);
    let in_band: Vec<usize> = (0..modes.n_modes())
        .filter(|&m| modes.frequencies[m] >= band.0 && modes.frequencies[m] <= band.1)
        .collect();
    if in_band.is_empty() {
        return Err(Error::InvalidInput(format!(
            "no normal modes inside the probed band [{:.4}, {:.4}]",
            band.0, band.1
        )));
    }

    let hbar = model.constants.hbar;
    let n_vec = vectors.entries.len();

    // Symplectic Gram of the rows and their overlaps with each in-band mode.
    let mut gram = DMatrix::<Complex>::zeros(n_vec, n_vec);
    for i in 0..n_vec {
        for j in 0..n_vec {
            gram[(i, j)] =
                bracket_cross(hbar, &vectors.entries[i].row, &vectors.entries[j].row);
        }
    }
    let mode_rows: Vec<DVector<Complex>> =
        in_band.iter().map(|&m| modes.rows.row(m).transpose()).collect();
    let mut overlaps = DMatrix::<Complex>::zeros(n_vec, in_band.len());
    for i in 0..n_vec {
        for (mc, row) in mode_rows.iter().enumerate() {
            overlaps[(i, mc)] = bracket_cross(hbar, &vectors.entries[i].row, row);
        }
    }

    // Pseudo-inverse of the Gram: keep the well-conditioned positive part.
    // Negative eigenvalues measure creation-sector content of the rows
    // (the J-product is indefinite there) and are excluded from the span.
    let (evals, evecs) = hermitian_eigen(&gram)?;
    let lam_max = evals.iter().cloned().fold(0.0f64, f64::max);
    if lam_max <= 0.0 {
        return Err(Error::Singular("material Gram has no positive part".into()));
    }
    let cutoff = 1e-10 * lam_max;
    let neg_mass = evals.iter().filter(|&&l| l < 0.0).map(|l| -l).fold(0.0f64, f64::max);

    // σ_m = Σ_k |u_k† h_m|² / λ_k over the kept eigenpairs.
    let mut sigma = Vec::with_capacity(in_band.len());
    for mc in 0..in_band.len() {
        let h = overlaps.column(mc);
        let mut s = 0.0;
        for k in 0..n_vec {
            if evals[k] <= cutoff {
                continue;
            }
            let proj: Complex = evecs.column(k).iter().zip(h.iter()).map(|(u, v)| u.conj() * v).sum();
            s += proj.norm_sqr() / evals[k];
        }
        sigma.push(s);
    }
    let overshoot = sigma.iter().map(|s| (s - 1.0).max(0.0)).fold(0.0f64, f64::max);
    let clamped: Vec<f64> = sigma.iter().map(|s| s.clamp(0.0, 1.0)).collect();
    let mean = clamped.iter().sum::<f64>() / clamped.len() as f64;
    let defect = 1.0 - mean;

    // Well-posedness: σ ∈ [0, 1] up to discretization roundoff and the
    // Gram's indefinite part is subdominant.
    let err = overshoot.max(neg_mass / lam_max);
    let report = CheckReport::from_error(
        name,
        anchor,
        json!({
            "n_vectors": n_vec,
            "n_modes_in_band": in_band.len(),
            "band": [band.0, band.1],
        }),
        err,
        1.0,
        1e-6,
    )
    .with_meta("defect", json!(defect))
    .with_meta("sigma_mean", json!(mean))
    .with_meta(
        "sigma_min",
        json!(clamped.iter().cloned().fold(f64::INFINITY, f64::min)),
    )
    .with_meta("sigma_max", json!(clamped.iter().cloned().fold(0.0f64, f64::max)))
    .with_meta("gram_negative_fraction", json!(neg_mass / lam_max));
    Ok((defect, report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constants::Constants;
    use crate::fano::{build_model, diagonalize, polariton_vectors, BathSpec, PolaritonKind};
    use crate::layered::Structure1D;
    use crate::quad::QuadraturePolicy;
    use crate::response::ResponseModel;
    use crate::Complex;

    fn policy() -> QuadraturePolicy {
        QuadraturePolicy::default()
    }

    #[test]
    fn vacuum_has_defect_one() {
        let bath = BathSpec { omega_min: 0.5, omega_max: 2.0, n_bath: 2 };
        let model =
            build_model(&Structure1D::vacuum(), 3.0, 64, &bath, &Constants::natural()).unwrap();
        let modes = diagonalize(&model).unwrap();
        // A vacuum model has no reservoirs, hence no material rows at all.
        let vectors = PolaritonVectors { entries: Vec::new(), dim: 2 * model.n_q() };
        let (defect, report) = lnf_defect(&model, &modes, &vectors).unwrap();
        assert_eq!(defect, 1.0);
        assert!(report.pass);
    }

    #[test]
    fn material_rows_span_reservoir_modes_partially() {
        // A thin absorbing slab in a much larger box: the material family
        // captures the reservoir-dominated modes but not the scattering
        // sector, so the spanned fraction sits strictly between 0 and 1,
        // and adding the scattering rows increases it.
        let resp = ResponseModel::with_eps_at(Complex::new(2.0, 0.8), 1.0).unwrap();
        let structure = Structure1D::slab(-0.4, 0.4, resp).unwrap();
        let bath = BathSpec { omega_min: 0.6, omega_max: 1.8, n_bath: 7 };
        let model =
            build_model(&structure, 4.0, 64, &bath, &Constants::natural()).unwrap();
        let modes = diagonalize(&model).unwrap();
        let mut material = PolaritonVectors { entries: Vec::new(), dim: 2 * model.n_q() };
        let mut full = PolaritonVectors { entries: Vec::new(), dim: 2 * model.n_q() };
        for j in 0..model.n_bath() {
            let batch =
                polariton_vectors(&model, &structure, model.bath_nodes[j], &policy()).unwrap();
            let mut mat = batch.clone();
            mat.entries.retain(|e| !matches!(e.kind, PolaritonKind::Scattering(_)));
            material.merge(mat).unwrap();
            full.merge(batch).unwrap();
        }
        let (defect_material, report) = lnf_defect(&model, &modes, &material).unwrap();
        assert!(report.pass, "projection ill-posed: {}", report.abs_err);
        assert!(
            defect_material > 0.05 && defect_material < 0.95,
            "unexpected material defect {defect_material}"
        );
        let (defect_full, _) = lnf_defect(&model, &modes, &full).unwrap();
        assert!(
            defect_full < defect_material,
            "adding scattering rows did not improve the span: {defect_full} vs {defect_material}"
        );
    }

    #[test]
    fn empty_band_rejected() {
        let resp = ResponseModel::with_eps_at(Complex::new(2.0, 0.8), 1.0).unwrap();
        let structure = Structure1D::slab(-0.4, 0.4, resp).unwrap();
        let bath = BathSpec { omega_min: 0.6, omega_max: 1.8, n_bath: 3 };
        let model =
            build_model(&structure, 4.0, 64, &bath, &Constants::natural()).unwrap();
        let modes = diagonalize(&model).unwrap();
        let batch = polariton_vectors(&model, &structure, 1.0, &policy()).unwrap();
        let mut synthetic = PolaritonVectors { entries: Vec::new(), dim: batch.dim };
        let mut entry = batch.entries[0].clone();
        // A frequency far above every normal mode leaves the band empty.
        entry.omega = 1e6;
        synthetic.entries.push(entry);
        assert!(lnf_defect(&model, &modes, &synthetic).is_err());
    }
}
