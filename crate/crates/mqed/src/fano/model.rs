//! Assembly of the discrete field–reservoir phase space and its Hamiltonian
//! matrix.
//!
//! Canonical pairs, in (q, p) ordering with J = [[0, I], [−I, 0]]:
//!   - (A_i, p_i) at every grid site, with p_i = dx·Π_A(x_i) so that each
//!     pair is canonically normalized, [A_i, p_i] = iħ;
//!   - (X̃_ij, P̃_ij) at electrically lossy sites, X̃_ij = sqrt(w_j dx)·X^{Ω_j}(x_i),
//!     one oscillator per bath node Ω_j with quadrature weight w_j;
//!   - (Ỹ_ij, P̃_{Y,ij}) at magnetically lossy sites, same scaling.
//!
//! With these scalings the continuum Hamiltonian density integrates to
//!   H = Σ_i (1/2ε₀dx)(p_i + Σ_j a_ij X̃_ij)²
//!     + Σ_i [(dx/2μ₀)(DA)_i² − (DA)_i Σ_j b_ij Ỹ_ij]
//!     + ½ Σ_ij (P̃_ij² + Ω_j² X̃_ij²) + ½ Σ_ij (P̃_{Y,ij}² + Ω_j² Ỹ_ij²),
//! where a_ij = sqrt(w_j dx)·α_{Ω_j}(x_i), b_ij = sqrt(w_j dx)·β_{Ω_j}(x_i)
//! are the weighted coupling amplitudes and D is the centered difference on
//! the periodic box. Note the magnetic coupling is linear in Ỹ; positivity of
//! the total form is guaranteed by the sum rule ∫dΩ β_Ω²/Ω² = (1/μ₀)(1 − 1/μ(0)) < 1/μ₀.

use nalgebra::{DMatrix, DVector};

use crate::constants::Constants;
use crate::error::{Error, Result};
use crate::layered::Structure1D;
use crate::Complex;

use std::f64::consts::PI;

/// Classification threshold for attaching a reservoir to a site: the local
/// Im ε (or Im(−1/μ)) at the bath mid-frequency must exceed this.
const LOSS_THRESHOLD: f64 = 1e-12;

/// Uniform reservoir frequency grid on [omega_min, omega_max].
#[derive(Debug, Clone, Copy)]
pub struct BathSpec {
    pub omega_min: f64,
    pub omega_max: f64,
    pub n_bath: usize,
}

impl BathSpec {
    /// Bath nodes and trapezoid quadrature weights.
    pub fn nodes_and_weights(&self) -> (Vec<f64>, Vec<f64>) {
        let n = self.n_bath;
        if n == 1 {
            return (
                vec![0.5 * (self.omega_min + self.omega_max)],
                vec![self.omega_max - self.omega_min],
            );
        }
        let d = (self.omega_max - self.omega_min) / (n - 1) as f64;
        let nodes: Vec<f64> = (0..n).map(|j| self.omega_min + j as f64 * d).collect();
        let weights: Vec<f64> = (0..n)
            .map(|j| if j == 0 || j == n - 1 { 0.5 * d } else { d })
            .collect();
        (nodes, weights)
    }

    fn validate(&self) -> Result<()> {
        if self.n_bath == 0 {
            return Err(Error::InvalidInput("bath requires n_bath ≥ 1".into()));
        }
        if !(self.omega_min > 0.0 && self.omega_max > self.omega_min) {
            return Err(Error::InvalidInput(
                "bath requires 0 < omega_min < omega_max".into(),
            ));
        }
        Ok(())
    }
}

/// The discrete phase space: labels, grid geometry, reservoir layout, the
/// Hamiltonian matrix M (H = ½ zᵀMz), and the symplectic form J.
#[derive(Debug, Clone)]
pub struct PhaseSpaceModel {
    /// One label per canonical pair, in coordinate order.
    pub labels: Vec<String>,
    /// Grid step.
    pub dx: f64,
    /// Half-width X of the periodic box [−X, X].
    pub box_half: f64,
    /// Site centers x_i = −X + (i + ½)dx.
    pub sites: Vec<f64>,
    /// Bath node frequencies Ω_j.
    pub bath_nodes: Vec<f64>,
    /// Trapezoid weights w_j.
    pub bath_weights: Vec<f64>,
    /// Site indices carrying electric reservoirs.
    pub e_sites: Vec<usize>,
    /// Site indices carrying magnetic reservoirs.
    pub m_sites: Vec<usize>,
    /// α_{Ω_j}(x_i) for i ∈ e_sites (row = reservoir index, column = bath node).
    pub alpha: DMatrix<f64>,
    /// β_{Ω_j}(x_i) for i ∈ m_sites.
    pub beta: DMatrix<f64>,
    /// Real symmetric Hamiltonian matrix, H = ½ zᵀMz.
    pub m: DMatrix<f64>,
    pub constants: Constants,
}

impl PhaseSpaceModel {
    pub fn n_sites(&self) -> usize {
        self.sites.len()
    }

    pub fn n_bath(&self) -> usize {
        self.bath_nodes.len()
    }

    /// Number of canonical coordinates (= number of momenta).
    pub fn n_q(&self) -> usize {
        self.n_sites() + (self.e_sites.len() + self.m_sites.len()) * self.n_bath()
    }

    /// Phase-space dimension 2·n_q.
    pub fn dim(&self) -> usize {
        2 * self.n_q()
    }

    /// Coordinate index of A_i.
    pub fn idx_a(&self, i: usize) -> usize {
        i
    }

    /// Coordinate index of X̃ for the ei-th electric reservoir, bath node j.
    pub fn idx_x(&self, ei: usize, j: usize) -> usize {
        self.n_sites() + ei * self.n_bath() + j
    }

    /// Coordinate index of Ỹ for the mi-th magnetic reservoir, bath node j.
    pub fn idx_y(&self, mi: usize, j: usize) -> usize {
        self.n_sites() + (self.e_sites.len() + mi) * self.n_bath() + j
    }

    /// Momentum index conjugate to coordinate q.
    pub fn idx_p(&self, q: usize) -> usize {
        q + self.n_q()
    }

    /// The dense symplectic form J = [[0, I], [−I, 0]].
    pub fn j_matrix(&self) -> DMatrix<f64> {
        let n = self.n_q();
        let mut j = DMatrix::zeros(2 * n, 2 * n);
        for k in 0..n {
            j[(k, n + k)] = 1.0;
            j[(n + k, k)] = -1.0;
        }
        j
    }

    /// Applies J to a complex phase-space vector: (Jz)_q = z_p, (Jz)_p = −z_q.
    pub fn apply_j(&self, z: &DVector<Complex>) -> DVector<Complex> {
        apply_j(z)
    }

    /// Wraps an arbitrary quadratic form H = ½ zᵀMz with trivial labels and
    /// no grid/reservoir structure; for small hand-built systems.
    pub fn from_quadratic_form(m: DMatrix<f64>, constants: Constants) -> Result<Self> {
        constants.validate()?;
        if m.nrows() != m.ncols() || m.nrows() % 2 != 0 || m.nrows() == 0 {
            return Err(Error::InvalidInput(
                "quadratic form must be square with even dimension".into(),
            ));
        }
        let scale = m.amax();
        if (&m - m.transpose()).amax() > 1e-12 * scale.max(1.0) {
            return Err(Error::InvalidInput("quadratic form must be symmetric".into()));
        }
        let n = m.nrows() / 2;
        Ok(PhaseSpaceModel {
            labels: (0..n).map(|k| format!("q[{k}]")).collect(),
            dx: 1.0,
            box_half: 0.5 * n as f64,
            sites: Vec::new(),
            bath_nodes: Vec::new(),
            bath_weights: Vec::new(),
            e_sites: Vec::new(),
            m_sites: Vec::new(),
            alpha: DMatrix::zeros(0, 0),
            beta: DMatrix::zeros(0, 0),
            m,
            constants,
        })
    }
}

/// Applies J = [[0, I], [−I, 0]] to a complex vector.
pub(crate) fn apply_j(z: &DVector<Complex>) -> DVector<Complex> {
    let n2 = z.len();
    let n = n2 / 2;
    let mut out = DVector::zeros(n2);
    for k in 0..n {
        out[k] = z[n + k];
        out[n + k] = -z[k];
    }
    out
}

/// Applies J from the left to a real matrix: rows 0..n ← rows n..2n,
/// rows n..2n ← −rows 0..n.
pub(crate) fn j_mul_left(s: &DMatrix<f64>) -> DMatrix<f64> {
    let n2 = s.nrows();
    let n = n2 / 2;
    let mut out = DMatrix::zeros(n2, s.ncols());
    for r in 0..n {
        for c in 0..s.ncols() {
            out[(r, c)] = s[(n + r, c)];
            out[(n + r, c)] = -s[(r, c)];
        }
    }
    out
}

/// Builds the discrete field–reservoir model for a structure embedded in the
/// periodic box [−X, X] with n_sites grid sites and the given bath grid.
///
/// A is periodic on the box; reservoirs are attached only at sites whose
/// layer is lossy in the corresponding channel, with couplings
/// α_{Ω_j}(x_i) = sqrt((2ε₀/π)·Ω_j·Im ε) and β_{Ω_j}(x_i) = sqrt((2/πμ₀)·Ω_j·Im(−1/μ))
/// evaluated from the local response at each bath node.
pub fn build_model(
    structure: &Structure1D,
    box_half: f64,
    n_sites: usize,
    bath: &BathSpec,
    constants: &Constants,
) -> Result<PhaseSpaceModel> {
    constants.validate()?;
    bath.validate()?;
    if !(box_half > 0.0) {
        return Err(Error::InvalidInput("box half-width must be positive".into()));
    }
    if n_sites < 64 {
        return Err(Error::InvalidInput(format!(
            "box discretization requires n_sites ≥ 64; got {n_sites}"
        )));
    }
    if let Some((x0, x1)) = structure.extent() {
        if x0 < -box_half || x1 > box_half {
            return Err(Error::InvalidInput(format!(
                "structure extent [{x0}, {x1}] exceeds box [−{box_half}, {box_half}]"
            )));
        }
    }

    let dx = 2.0 * box_half / n_sites as f64;
    let sites: Vec<f64> = (0..n_sites)
        .map(|i| -box_half + (i as f64 + 0.5) * dx)
        .collect();
    let (bath_nodes, bath_weights) = bath.nodes_and_weights();
    let n_bath = bath_nodes.len();
    let omega_probe = 0.5 * (bath.omega_min + bath.omega_max);

    // Classify sites by the loss channels of the local response.
    let mut e_sites = Vec::new();
    let mut m_sites = Vec::new();
    for (i, &x) in sites.iter().enumerate() {
        let (eps, mu) = structure.eval_at(x, omega_probe);
        if eps.im > LOSS_THRESHOLD {
            e_sites.push(i);
        }
        if (-1.0 / mu).im > LOSS_THRESHOLD {
            m_sites.push(i);
        }
    }

    // Coupling amplitudes at every (lossy site, bath node) pair.
    let eps0 = constants.eps0;
    let mu0 = constants.mu0();
    let mut alpha = DMatrix::zeros(e_sites.len(), n_bath);
    for (ei, &i) in e_sites.iter().enumerate() {
        for (j, &w) in bath_nodes.iter().enumerate() {
            let (eps, _) = structure.eval_at(sites[i], w);
            alpha[(ei, j)] = ((2.0 * eps0 / PI) * w * eps.im).max(0.0).sqrt();
        }
    }
    let mut beta = DMatrix::zeros(m_sites.len(), n_bath);
    for (mi, &i) in m_sites.iter().enumerate() {
        for (j, &w) in bath_nodes.iter().enumerate() {
            let (_, mu) = structure.eval_at(sites[i], w);
            beta[(mi, j)] = ((2.0 / (PI * mu0)) * w * (-1.0 / mu).im).max(0.0).sqrt();
        }
    }

    let mut model = PhaseSpaceModel {
        labels: Vec::new(),
        dx,
        box_half,
        sites,
        bath_nodes,
        bath_weights,
        e_sites,
        m_sites,
        alpha,
        beta,
        m: DMatrix::zeros(0, 0),
        constants: *constants,
    };
    model.labels = make_labels(&model);
    model.m = assemble_m(&model);
    Ok(model)
}

fn make_labels(model: &PhaseSpaceModel) -> Vec<String> {
    let mut labels = Vec::with_capacity(model.n_q());
    for i in 0..model.n_sites() {
        labels.push(format!("A[site={i}]"));
    }
    for &i in &model.e_sites {
        for j in 0..model.n_bath() {
            labels.push(format!("X[site={i},bath={j}]"));
        }
    }
    for &i in &model.m_sites {
        for j in 0..model.n_bath() {
            labels.push(format!("Y[site={i},bath={j}]"));
        }
    }
    labels
}

fn assemble_m(model: &PhaseSpaceModel) -> DMatrix<f64> {
    let n_sites = model.n_sites();
    let n_bath = model.n_bath();
    let dim = model.dim();
    let dx = model.dx;
    let eps0 = model.constants.eps0;
    let mu0 = model.constants.mu0();
    let mut m = DMatrix::zeros(dim, dim);

    // Electric term (1/2ε₀dx)(p_i + Σ_j a_ij X̃_ij)² at every site.
    let e_lookup: std::collections::HashMap<usize, usize> = model
        .e_sites
        .iter()
        .enumerate()
        .map(|(ei, &i)| (i, ei))
        .collect();
    for i in 0..n_sites {
        let pi = model.idx_p(model.idx_a(i));
        m[(pi, pi)] += 1.0 / (eps0 * dx);
        if let Some(&ei) = e_lookup.get(&i) {
            for j in 0..n_bath {
                let a_ij = (model.bath_weights[j] * dx).sqrt() * model.alpha[(ei, j)];
                let xj = model.idx_x(ei, j);
                m[(pi, xj)] += a_ij / (eps0 * dx);
                m[(xj, pi)] += a_ij / (eps0 * dx);
                for j2 in 0..n_bath {
                    let a_ij2 = (model.bath_weights[j2] * dx).sqrt() * model.alpha[(ei, j2)];
                    m[(xj, model.idx_x(ei, j2))] += a_ij * a_ij2 / (eps0 * dx);
                }
            }
        }
    }

    // Magnetic term (dx/2μ₀)(DA)² with the periodic centered difference
    // D_il = (δ_{l,i+1} − δ_{l,i−1})/(2dx): DᵀD contributions per site i.
    let c4 = dx / (mu0 * 4.0 * dx * dx);
    for i in 0..n_sites {
        let ip = (i + 1) % n_sites;
        let im = (i + n_sites - 1) % n_sites;
        m[(ip, ip)] += c4;
        m[(im, im)] += c4;
        m[(ip, im)] -= c4;
        m[(im, ip)] -= c4;
    }

    // Linear magnetic coupling −Σ_i (DA)_i Σ_j b_ij Ỹ_ij.
    for (mi, &i) in model.m_sites.iter().enumerate() {
        let ip = (i + 1) % n_sites;
        let im = (i + n_sites - 1) % n_sites;
        for j in 0..n_bath {
            let b_ij = (model.bath_weights[j] * dx).sqrt() * model.beta[(mi, j)];
            let yj = model.idx_y(mi, j);
            m[(ip, yj)] -= b_ij / (2.0 * dx);
            m[(yj, ip)] -= b_ij / (2.0 * dx);
            m[(im, yj)] += b_ij / (2.0 * dx);
            m[(yj, im)] += b_ij / (2.0 * dx);
        }
    }

    // Free reservoir terms ½(P̃² + Ω²X̃²) and ½(P̃_Y² + Ω²Ỹ²).
    for (ei, _) in model.e_sites.iter().enumerate() {
        for j in 0..n_bath {
            let q = model.idx_x(ei, j);
            m[(q, q)] += model.bath_nodes[j] * model.bath_nodes[j];
            m[(model.idx_p(q), model.idx_p(q))] += 1.0;
        }
    }
    for (mi, _) in model.m_sites.iter().enumerate() {
        for j in 0..n_bath {
            let q = model.idx_y(mi, j);
            m[(q, q)] += model.bath_nodes[j] * model.bath_nodes[j];
            m[(model.idx_p(q), model.idx_p(q))] += 1.0;
        }
    }

    m
}
