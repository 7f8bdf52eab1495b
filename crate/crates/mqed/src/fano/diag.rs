//! Symplectic (Bogoliubov) diagonalization of the quadratic Hamiltonian.
//!
//! Standard reduction via the matrix square root: with M = S², S symmetric
//! PSD, the dynamical flow ż = JMz becomes ẇ = Aw in w = Sz coordinates,
//! where A = SJS is real antisymmetric. Eigenvectors of A with Au = −iωu
//! (equivalently eigenvalue +ω of the Hermitian iA) yield annihilation rows
//! r_m = u_m†S/sqrt(ħω_m), so that b_m = r_m·z satisfies [b_m, b_n†] = δ_mn,
//! [b_m, b_n] = 0 and H = Σ_m ħω_m (b_m†b_m + ½) on the non-degenerate
//! sector. Directions with ω below the noise floor (free-particle/gauge
//! modes such as the k = 0 vector-potential mode of the periodic box) are
//! segregated and counted, not normalized.

use nalgebra::{DMatrix, DVector};

use super::model::{j_mul_left, PhaseSpaceModel};
use crate::error::{Error, Result};
use crate::lin::{hermitian_eigen, symmetric_eigen};
use crate::Complex;

/// Normal-mode frequencies and the transform to annihilation coordinates.
#[derive(Debug, Clone)]
pub struct BogoliubovModes {
    /// Positive mode frequencies, ascending, one per annihilation operator.
    pub frequencies: Vec<f64>,
    /// Annihilation rows r_m (n_modes × dim): b_m = r_m·z.
    pub rows: DMatrix<Complex>,
    /// Number of phase-space dimensions segregated as zero modes.
    pub zero_dims: usize,
    /// ħ used in the normalization.
    pub hbar: f64,
}

impl BogoliubovModes {
    pub fn n_modes(&self) -> usize {
        self.frequencies.len()
    }

    /// Full transform T = [r_1; …; r_N; r̄_1; …; r̄_N] to
    /// annihilation/creation coordinates.
    pub fn transform(&self) -> DMatrix<Complex> {
        let n = self.n_modes();
        let dim = self.rows.ncols();
        let mut t = DMatrix::zeros(2 * n, dim);
        for m in 0..n {
            for c in 0..dim {
                t[(m, c)] = self.rows[(m, c)];
                t[(n + m, c)] = self.rows[(m, c)].conj();
            }
        }
        t
    }

    /// Maximum deviation of the mode brackets from the canonical form:
    /// max(|[b_m, b_n†] − δ_mn|, |[b_m, b_n]|) over all pairs, which is the
    /// max-norm residual of T·J·Tᵀ against the commutator normal form.
    pub fn symplectic_residual(&self) -> f64 {
        let n = self.n_modes();
        if n == 0 {
            return 0.0;
        }
        let dim = self.rows.ncols();
        let mut x = DMatrix::<f64>::zeros(n, dim);
        let mut y = DMatrix::<f64>::zeros(n, dim);
        for m in 0..n {
            for c in 0..dim {
                x[(m, c)] = self.rows[(m, c)].re;
                y[(m, c)] = self.rows[(m, c)].im;
            }
        }
        // J applied to columns of the transposes: (J v)_q = v_p, (J v)_p = −v_q.
        let jxt = j_mul_left(&x.transpose());
        let jyt = j_mul_left(&y.transpose());
        let p1 = &x * &jxt; // X J Xᵀ
        let p2 = &y * &jyt; // Y J Yᵀ
        let p3 = &x * &jyt; // X J Yᵀ
        let p4 = &y * &jxt; // Y J Xᵀ
        let h = self.hbar;
        // [b, b†] = ħ(P3 − P4) + iħ(P1 + P2), must equal the identity.
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                let re = h * (p3[(i, j)] - p4[(i, j)]) - if i == j { 1.0 } else { 0.0 };
                let im = h * (p1[(i, j)] + p2[(i, j)]);
                worst = worst.max(re.hypot(im));
                // [b, b] = iħ(P1 − P2) − ħ(P3 + P4), must vanish.
                let re2 = -h * (p3[(i, j)] + p4[(i, j)]);
                let im2 = h * (p1[(i, j)] - p2[(i, j)]);
                worst = worst.max(re2.hypot(im2));
            }
        }
        worst
    }

    /// Reconstruction Σ_m ħω_m (r̄_mᵀr_m + r_mᵀr̄_m) of the Hamiltonian
    /// matrix from the normal modes; equals M exactly on the non-zero-mode
    /// sector (the congruence-diagonalization invariant).
    pub fn reconstruct_m(&self) -> DMatrix<f64> {
        let n = self.n_modes();
        let dim = self.rows.ncols();
        let mut xs = DMatrix::<f64>::zeros(n, dim);
        let mut ys = DMatrix::<f64>::zeros(n, dim);
        for m in 0..n {
            let s = (self.hbar * self.frequencies[m]).sqrt();
            for c in 0..dim {
                xs[(m, c)] = s * self.rows[(m, c)].re;
                ys[(m, c)] = s * self.rows[(m, c)].im;
            }
        }
        2.0 * (xs.transpose() * &xs + ys.transpose() * &ys)
    }
}

/// Diagonalizes H = ½ zᵀMz symplectically.
pub fn diagonalize(model: &PhaseSpaceModel) -> Result<BogoliubovModes> {
    williamson(&model.m, model.constants.hbar)
}

/// The Williamson reduction of a real symmetric PSD quadratic form.
pub(crate) fn williamson(m: &DMatrix<f64>, hbar: f64) -> Result<BogoliubovModes> {
    let dim = m.nrows();
    if dim == 0 || dim % 2 != 0 || m.ncols() != dim {
        return Err(Error::InvalidInput(
            "Hamiltonian matrix must be square with even dimension".into(),
        ));
    }
    let scale = m.amax().max(1.0);
    if (m - m.transpose()).amax() > 1e-10 * scale {
        return Err(Error::InvalidInput("Hamiltonian matrix must be symmetric".into()));
    }

    // S = M^{1/2} via the spectral decomposition.
    let (mut lam, v) = symmetric_eigen(m)?;
    let lam_max = lam.amax();
    if lam.min() < -1e-10 * lam_max {
        return Err(Error::InvalidInput(format!(
            "Hamiltonian matrix is not positive semidefinite: min eigenvalue {:.3e}",
            lam.min()
        )));
    }
    for l in lam.iter_mut() {
        *l = l.max(0.0);
    }
    let mut vs = v.clone();
    for (c, l) in lam.iter().enumerate() {
        let s = l.sqrt();
        for r in 0..dim {
            vs[(r, c)] *= s;
        }
    }
    let s_mat = &vs * v.transpose();

    // A = S·J·S (antisymmetric); K = A·Aᵀ = −A² (symmetric PSD, eigenvalues ω²).
    let a_mat = &s_mat * j_mul_left(&s_mat);
    let k_mat = {
        let k = &a_mat * a_mat.transpose();
        0.5 * (&k + k.transpose())
    };
    let (om2, v2) = symmetric_eigen(&k_mat)?;
    let om2_max = om2.amax();
    // Noise floor of the squared frequencies: the dense eigensolve carries
    // O(ε)·‖K‖ absolute error, so genuinely zero modes surface at this scale.
    let zero_tol = 1e-10 * om2_max.max(1e-300);

    // Partition ascending eigenvalues into zero sector and degenerate
    // clusters. The gap is generous: merging distinct but nearby modes is
    // harmless (the in-cluster Hermitian eigenproblem separates them
    // exactly), while splitting a near-degenerate group would inherit the
    // O(ε‖K‖/gap) eigenvector mixing of the dense solve.
    let mut zero_dims = 0;
    let mut clusters: Vec<(usize, usize)> = Vec::new(); // [start, end)
    let mut start = None;
    for i in 0..dim {
        if om2[i] <= zero_tol {
            zero_dims += 1;
            continue;
        }
        match start {
            None => start = Some(i),
            Some(s0) => {
                if om2[i] - om2[i - 1] > 1e-7 * om2_max {
                    clusters.push((s0, i));
                    start = Some(i);
                }
            }
        }
    }
    if let Some(s0) = start {
        clusters.push((s0, dim));
    }

    // Within each cluster, restrict A and split ±iω eigenpairs of the
    // Hermitian iA; eigenvalue −ω selects annihilation vectors.
    let mut freq_and_u: Vec<(f64, DVector<Complex>)> = Vec::new();
    for &(c0, c1) in &clusters {
        let width = c1 - c0;
        if width % 2 != 0 {
            return Err(Error::Singular(format!(
                "frequency cluster of odd dimension {width}; clustering tolerance failed"
            )));
        }
        let vc = v2.columns(c0, width).into_owned();
        let b = {
            let bb = vc.transpose() * (&a_mat * &vc);
            0.5 * (&bb - bb.transpose())
        };
        let mut hb = DMatrix::<Complex>::zeros(width, width);
        for r in 0..width {
            for c in 0..width {
                hb[(r, c)] = Complex::new(0.0, b[(r, c)]);
            }
        }
        let (ev, u) = hermitian_eigen(&hb)?;
        for k in 0..width {
            if ev[k] > 0.0 {
                let omega = ev[k];
                let uc = u.column(k);
                let mut u_full = DVector::<Complex>::zeros(dim);
                for r in 0..dim {
                    let mut acc = Complex::new(0.0, 0.0);
                    for c in 0..width {
                        acc += Complex::new(vc[(r, c)], 0.0) * uc[c];
                    }
                    u_full[r] = acc;
                }
                freq_and_u.push((omega, u_full));
            }
        }
    }
    freq_and_u.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());

    let n_modes = freq_and_u.len();
    if 2 * n_modes + zero_dims != dim {
        return Err(Error::Singular(format!(
            "mode count mismatch: {n_modes} modes + {zero_dims} zero dims ≠ dim {dim}"
        )));
    }

    // r_m = u_m† S / sqrt(ħω_m); batched as S·ū per mode via real matmuls.
    let mut ur = DMatrix::<f64>::zeros(dim, n_modes);
    let mut ui = DMatrix::<f64>::zeros(dim, n_modes);
    for (mcol, (_, u)) in freq_and_u.iter().enumerate() {
        for r in 0..dim {
            ur[(r, mcol)] = u[r].re;
            ui[(r, mcol)] = -u[r].im; // conjugate
        }
    }
    let sr = &s_mat * &ur;
    let si = &s_mat * &ui;
    let mut rows = DMatrix::<Complex>::zeros(n_modes, dim);
    let mut frequencies = Vec::with_capacity(n_modes);
    for (mrow, (omega, _)) in freq_and_u.iter().enumerate() {
        let norm = (hbar * omega).sqrt();
        for c in 0..dim {
            rows[(mrow, c)] = Complex::new(sr[(c, mrow)] / norm, si[(c, mrow)] / norm);
        }
        frequencies.push(*omega);
    }

    Ok(BogoliubovModes { frequencies, rows, zero_dims, hbar })
}
