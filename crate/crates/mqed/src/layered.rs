//! Transfer-matrix solver for piecewise-homogeneous 1D media embedded in
//! vacuum: scattering modes with plane-wave-plus-scattered asymptotics and
//! the outgoing Green's function of L = −d/dx[(1/μ_ω)d/dx] − k²ε_ω.
//!
//! Conventions: normal incidence; fields continuous together with (1/μ)F′;
//! refractive index n = sqrt(εμ) on the principal branch with Im n ≥ 0.
//! All signs are pinned by the vacuum Green's function
//! g(x,x′) = i·e^{ik|x−x′|}/(2k).

use serde_json::json;

use crate::error::{Error, Result};
use crate::report::CheckReport;
use crate::response::ResponseModel;
use crate::{Complex, I};

/// Exponent threshold |Im(kn)|·thickness beyond which plain transfer-matrix
/// recursion would overflow and scattering-matrix (star-product) composition
/// is used instead.
const STAR_PRODUCT_THRESHOLD: f64 = 20.0;

/// One homogeneous slab of material.
#[derive(Debug, Clone)]
pub struct Layer {
    pub x_min: f64,
    pub x_max: f64,
    pub response: ResponseModel,
}

impl Layer {
    pub fn new(x_min: f64, x_max: f64, response: ResponseModel) -> Result<Self> {
        if !(x_min < x_max) {
            return Err(Error::InvalidInput(format!(
                "layer requires x_min < x_max; got [{x_min}, {x_max}]"
            )));
        }
        Ok(Layer { x_min, x_max, response })
    }
}

/// An ordered sequence of non-overlapping layers with vacuum outside and in
/// any gaps between them.
#[derive(Debug, Clone, Default)]
pub struct Structure1D {
    layers: Vec<Layer>,
}

impl Structure1D {
    pub fn new(mut layers: Vec<Layer>) -> Result<Self> {
        layers.sort_by(|a, b| a.x_min.total_cmp(&b.x_min));
        for w in layers.windows(2) {
            if w[0].x_max > w[1].x_min {
                return Err(Error::InvalidInput(format!(
                    "layers overlap: [{}, {}] and [{}, {}]",
                    w[0].x_min, w[0].x_max, w[1].x_min, w[1].x_max
                )));
            }
        }
        Ok(Structure1D { layers })
    }

    /// All-vacuum structure (no layers).
    pub fn vacuum() -> Self {
        Structure1D::default()
    }

    /// A single uniform slab.
    pub fn slab(x_min: f64, x_max: f64, response: ResponseModel) -> Result<Self> {
        Structure1D::new(vec![Layer::new(x_min, x_max, response)?])
    }

    pub fn layers(&self) -> &[Layer] {
        &self.layers
    }

    /// [x_min of first layer, x_max of last layer], or None for vacuum.
    pub fn extent(&self) -> Option<(f64, f64)> {
        match (self.layers.first(), self.layers.last()) {
            (Some(a), Some(b)) => Some((a.x_min, b.x_max)),
            _ => None,
        }
    }

    /// ε and μ at position x and frequency ω (vacuum outside all layers).
    pub fn eval_at(&self, x: f64, omega: f64) -> (Complex, Complex) {
        for layer in &self.layers {
            if x >= layer.x_min && x < layer.x_max {
                return layer.response.eval_real(omega);
            }
        }
        (Complex::new(1.0, 0.0), Complex::new(1.0, 0.0))
    }

    /// Every material interface position, sorted.
    pub fn interfaces(&self) -> Vec<f64> {
        let mut xs = Vec::new();
        for layer in &self.layers {
            if xs.last() != Some(&layer.x_min) {
                xs.push(layer.x_min);
            }
            xs.push(layer.x_max);
        }
        xs
    }
}

/// Principal-branch refractive index with Im n ≥ 0 (no growing internal
/// exponentials for passive media).
pub fn refractive_index(eps: Complex, mu: Complex) -> Complex {
    let n = (eps * mu).sqrt();
    if n.im < 0.0 {
        -n
    } else {
        n
    }
}

/// 2×2 complex matrix in row-major order, used for transfer matrices.
#[derive(Debug, Clone, Copy)]
pub struct Matrix2 {
    pub m: [[Complex; 2]; 2],
}

impl Matrix2 {
    pub fn identity() -> Self {
        let o = Complex::new(0.0, 0.0);
        let l = Complex::new(1.0, 0.0);
        Matrix2 { m: [[l, o], [o, l]] }
    }

    /// self ∘ rhs (apply rhs first).
    pub fn compose(&self, rhs: &Matrix2) -> Matrix2 {
        let mut out = [[Complex::new(0.0, 0.0); 2]; 2];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, cell) in row.iter_mut().enumerate() {
                *cell = self.m[i][0] * rhs.m[0][j] + self.m[i][1] * rhs.m[1][j];
            }
        }
        Matrix2 { m: out }
    }

    pub fn det(&self) -> Complex {
        self.m[0][0] * self.m[1][1] - self.m[0][1] * self.m[1][0]
    }

    /// Free propagation over thickness d at complex wavenumber kn, in the
    /// locally-referenced amplitude basis: diag(e^{iknd}, e^{−iknd}).
    pub fn propagation(kn: Complex, d: f64) -> Matrix2 {
        let o = Complex::new(0.0, 0.0);
        Matrix2 { m: [[(I * kn * d).exp(), o], [o, (-I * kn * d).exp()]] }
    }

    /// Interface between admittances y₁ = n₁/μ₁ and y₂ = n₂/μ₂, matching F
    /// and (1/μ)F′.
    pub fn interface(y1: Complex, y2: Complex) -> Matrix2 {
        let p = y1 / y2;
        let half = Complex::new(0.5, 0.0);
        Matrix2 {
            m: [
                [half * (1.0 + p), half * (1.0 - p)],
                [half * (1.0 - p), half * (1.0 + p)],
            ],
        }
    }
}

/// One homogeneous piece of the partition of the axis at frequency ω.
#[derive(Debug, Clone, Copy)]
struct Piece {
    x_lo: f64,
    x_hi: f64,
    mu: Complex,
    /// Complex wavenumber kn in this piece.
    kn: Complex,
    /// Admittance n/μ.
    y: Complex,
}

/// Interior pieces (layers and vacuum gaps) between the structure edges.
fn interior_pieces(structure: &Structure1D, omega: f64, k: f64) -> Vec<Piece> {
    let mut pieces = Vec::new();
    let mut cursor = match structure.extent() {
        Some((lo, _)) => lo,
        None => return pieces,
    };
    for layer in structure.layers() {
        if layer.x_min > cursor {
            // Vacuum gap.
            pieces.push(Piece {
                x_lo: cursor,
                x_hi: layer.x_min,
                mu: Complex::new(1.0, 0.0),
                kn: Complex::new(k, 0.0),
                y: Complex::new(1.0, 0.0),
            });
        }
        let (eps, mu) = layer.response.eval_real(omega);
        let n = refractive_index(eps, mu);
        pieces.push(Piece {
            x_lo: layer.x_min,
            x_hi: layer.x_max,
            mu,
            kn: n * k,
            y: n / mu,
        });
        cursor = layer.x_max;
    }
    pieces
}

/// Total transfer matrix of the structure at frequency ω: maps the
/// locally-referenced amplitude pair (coefficients of e^{±ik(x−x_min)}) just
/// left of the extent to the pair (coefficients of e^{±ik(x−x_max)}) just
/// right of it. A vacuum gap of length L is diag(e^{ikL}, e^{−ikL}).
pub fn transfer_matrix(structure: &Structure1D, omega: f64) -> Result<Matrix2> {
    if !(omega > 0.0) {
        return Err(Error::InvalidInput("transfer_matrix requires ω > 0".into()));
    }
    let k = omega; // vacuum wavenumber in units c = 1 of the axis; see note below
    let pieces = interior_pieces(structure, omega, k);
    let vac = Complex::new(1.0, 0.0);
    let mut m = Matrix2::identity();
    let mut y_prev = vac;
    for p in &pieces {
        m = Matrix2::interface(y_prev, p.y).compose(&m);
        m = Matrix2::propagation(p.kn, p.x_hi - p.x_lo).compose(&m);
        y_prev = p.y;
    }
    m = Matrix2::interface(y_prev, vac).compose(&m);
    Ok(m)
}

/// Scattering matrix of a section in locally-referenced amplitudes:
/// [b_out(left); a_out(right)] = [[r_ll, t_rl],[t_lr, r_rr]]·[a_in(left); b_in(right)].
#[derive(Debug, Clone, Copy)]
struct SMatrix {
    r_ll: Complex,
    t_rl: Complex,
    t_lr: Complex,
    r_rr: Complex,
}

impl SMatrix {
    fn identity() -> Self {
        let o = Complex::new(0.0, 0.0);
        let l = Complex::new(1.0, 0.0);
        SMatrix { r_ll: o, t_rl: l, t_lr: l, r_rr: o }
    }

    fn from_transfer(m: &Matrix2) -> Result<SMatrix> {
        let m11 = m.m[1][1];
        if m11.norm() < 1e-300 {
            return Err(Error::Singular("transfer matrix not invertible to S-matrix".into()));
        }
        Ok(SMatrix {
            r_ll: -m.m[1][0] / m11,
            t_rl: 1.0 / m11,
            t_lr: m.det() / m11,
            r_rr: m.m[0][1] / m11,
        })
    }

    /// Redheffer star product: self is the left section, rhs the right one.
    fn star(&self, rhs: &SMatrix) -> SMatrix {
        let denom = 1.0 - self.r_rr * rhs.r_ll;
        SMatrix {
            r_ll: self.r_ll + self.t_rl * rhs.r_ll * self.t_lr / denom,
            t_rl: self.t_rl * rhs.t_rl / denom,
            t_lr: rhs.t_lr * self.t_lr / denom,
            r_rr: rhs.r_rr + rhs.t_lr * self.r_rr * rhs.t_rl / denom,
        }
    }
}

/// Scattering solution at one frequency and incidence direction, with a
/// piecewise-analytic field representation.
#[derive(Debug, Clone)]
pub struct ModeSolution {
    /// +1: incident from −∞ (rightward); −1: incident from +∞.
    pub sigma: i32,
    pub omega: f64,
    /// Vacuum wavenumber k = ω/c (the solver works in c = 1 axis units; a
    /// non-unit c only rescales k and is applied by callers via Constants).
    pub k: f64,
    /// Reflection amplitude in the global basis e^{±ikx}.
    pub r: Complex,
    /// Transmission amplitude in the global basis e^{±ikx}.
    pub t: Complex,
    /// Homogeneous pieces with globally-referenced amplitudes:
    /// F(x) = a·e^{ikn·x} + b·e^{−ikn·x} within each piece.
    pieces: Vec<(Piece, Complex, Complex)>,
    /// Sampled field and derivative on the caller's grid.
    pub grid: Vec<f64>,
    pub field_samples: Vec<Complex>,
    pub dfield_samples: Vec<Complex>,
}

impl ModeSolution {
    /// F_ω(x|σ).
    pub fn field(&self, x: f64) -> Complex {
        let (p, a, b) = self.piece_at(x);
        a * (I * p.kn * x).exp() + b * (-I * p.kn * x).exp()
    }

    /// dF/dx.
    pub fn dfield(&self, x: f64) -> Complex {
        let (p, a, b) = self.piece_at(x);
        I * p.kn * (a * (I * p.kn * x).exp() - b * (-I * p.kn * x).exp())
    }

    /// μ at x (needed for the conserved flux (1/μ)F′).
    pub fn mu(&self, x: f64) -> Complex {
        self.piece_at(x).0.mu
    }

    fn piece_at(&self, x: f64) -> (&Piece, Complex, Complex) {
        for (p, a, b) in &self.pieces {
            if x >= p.x_lo && x < p.x_hi {
                return (p, *a, *b);
            }
        }
        // x beyond the last piece boundary: belongs to the final vacuum.
        let (p, a, b) = self.pieces.last().expect("pieces nonempty");
        (p, *a, *b)
    }
}

/// Solves the scattering boundary-value problem at frequency ω for incidence
/// direction σ and samples the solution on the given grid.
///
/// Asymptotics: F → e^{iσkx} + r·e^{−iσkx} on the incidence side and
/// F → t·e^{iσkx} on the far side.
pub fn scattering_mode(
    structure: &Structure1D,
    omega: f64,
    sigma: i32,
    grid: &[f64],
) -> Result<ModeSolution> {
    if !(omega > 0.0) {
        return Err(Error::InvalidInput("scattering_mode requires ω > 0".into()));
    }
    if sigma != 1 && sigma != -1 {
        return Err(Error::InvalidInput("σ must be ±1".into()));
    }
    let k = omega;
    let vac = Complex::new(1.0, 0.0);
    let (x0, x1) = structure.extent().unwrap_or((0.0, 0.0));
    let interior = interior_pieces(structure, omega, k);

    // Elementary sections from left vacuum to right vacuum, with the
    // amplitude pair locally referenced at each section edge.
    let mut sections: Vec<Matrix2> = Vec::new();
    let mut y_prev = vac;
    let mut needs_star = false;
    for p in &interior {
        sections.push(Matrix2::interface(y_prev, p.y));
        sections.push(Matrix2::propagation(p.kn, p.x_hi - p.x_lo));
        if p.kn.im.abs() * (p.x_hi - p.x_lo) > STAR_PRODUCT_THRESHOLD {
            needs_star = true;
        }
        y_prev = p.y;
    }
    sections.push(Matrix2::interface(y_prev, vac));

    // Full axis partition: left vacuum, interior pieces, right vacuum.
    let far = 1e30;
    let vac_piece = |lo: f64, hi: f64| Piece {
        x_lo: lo,
        x_hi: hi,
        mu: vac,
        kn: Complex::new(k, 0.0),
        y: vac,
    };
    let mut pieces: Vec<Piece> = Vec::with_capacity(interior.len() + 2);
    pieces.push(vac_piece(-far, x0));
    pieces.extend(interior.iter().copied());
    pieces.push(vac_piece(x1, far));

    // Globally-referenced amplitudes per piece.
    let mut amps: Vec<(Complex, Complex)> = vec![(Complex::new(0.0, 0.0), Complex::new(0.0, 0.0)); pieces.len()];
    let (r, t);
    if !needs_star {
        // Plain transfer recursion in the global basis.
        let m = transfer_matrix(structure, omega)?;
        let (m01, m10, m11) = (m.m[0][1], m.m[1][0], m.m[1][1]);
        if m11.norm() < 1e-12 {
            return Err(Error::Singular(format!(
                "transfer matrix near-singular at ω = {omega} (|M11| = {:.3e})",
                m11.norm()
            )));
        }
        if sigma == 1 {
            r = -(m10 / m11) * (2.0 * I * k * x0).exp();
            t = (m.det() / m11) * (I * k * (x0 - x1)).exp();
            amps[0] = (vac, r);
        } else {
            t = (I * k * (x0 - x1)).exp() / m11;
            r = (m01 / m11) * (-2.0 * I * k * x1).exp();
            amps[0] = (Complex::new(0.0, 0.0), t);
        }
        // March the state across each interface, converting between the
        // global phase references of adjacent pieces.
        for j in 0..pieces.len() - 1 {
            let (a1, b1) = amps[j];
            let (p1, p2) = (&pieces[j], &pieces[j + 1]);
            let xi = p1.x_hi;
            let e1 = (I * p1.kn * xi).exp();
            let e2 = (I * p2.kn * xi).exp();
            let p = p1.y / p2.y;
            let a2 = 0.5 * ((1.0 + p) * a1 * e1 + (1.0 - p) * b1 / e1) / e2;
            let b2 = 0.5 * ((1.0 - p) * a1 * e1 + (1.0 + p) * b1 / e1) * e2;
            amps[j + 1] = (a2, b2);
        }
    } else {
        // Star-product composition: compute prefix/suffix scattering
        // matrices so every piece's amplitudes come from a stable solve.
        let n_sec = sections.len();
        let mut prefix = vec![SMatrix::identity(); n_sec + 1];
        for (i, sec) in sections.iter().enumerate() {
            prefix[i + 1] = prefix[i].star(&SMatrix::from_transfer(sec)?);
        }
        let mut suffix = vec![SMatrix::identity(); n_sec + 1];
        for (i, sec) in sections.iter().enumerate().rev() {
            suffix[i] = SMatrix::from_transfer(sec)?.star(&suffix[i + 1]);
        }
        let total = prefix[n_sec];
        // Local amplitudes at the left edge of interior piece i sit after
        // section 2i+1 (its entry interface).
        if sigma == 1 {
            let a_in = (I * k * x0).exp();
            r = total.r_ll * a_in * (I * k * x0).exp();
            t = total.t_lr * a_in * (-I * k * x1).exp();
            amps[0] = (vac, r);
            for (i, p) in interior.iter().enumerate() {
                let cut = 2 * i + 1;
                let (left, right) = (&prefix[cut], &suffix[cut]);
                let a_cut = left.t_lr * a_in / (1.0 - left.r_rr * right.r_ll);
                let b_cut = right.r_ll * a_cut;
                amps[i + 1] = (a_cut * (-I * p.kn * p.x_lo).exp(), b_cut * (I * p.kn * p.x_lo).exp());
            }
            let last = pieces.len() - 1;
            amps[last] = (t, Complex::new(0.0, 0.0));
        } else {
            let b_in = (-I * k * x1).exp();
            r = total.r_rr * b_in * (-I * k * x1).exp();
            t = total.t_rl * b_in * (I * k * x0).exp();
            amps[0] = (Complex::new(0.0, 0.0), t);
            for (i, p) in interior.iter().enumerate() {
                let cut = 2 * i + 1;
                let (left, right) = (&prefix[cut], &suffix[cut]);
                let b_cut = right.t_rl * b_in / (1.0 - right.r_ll * left.r_rr);
                let a_cut = left.r_rr * b_cut;
                amps[i + 1] = (a_cut * (-I * p.kn * p.x_lo).exp(), b_cut * (I * p.kn * p.x_lo).exp());
            }
            let last = pieces.len() - 1;
            amps[last] = (r, vac);
        }
    }

    let mut mode = ModeSolution {
        sigma,
        omega,
        k,
        r,
        t,
        pieces: pieces.iter().copied().zip(amps.iter().copied()).map(|(p, (a, b))| (p, a, b)).collect(),
        grid: grid.to_vec(),
        field_samples: Vec::with_capacity(grid.len()),
        dfield_samples: Vec::with_capacity(grid.len()),
    };
    for &x in grid {
        mode.field_samples.push(mode.field(x));
        mode.dfield_samples.push(mode.dfield(x));
    }
    Ok(mode)
}

/// Outgoing Green's function of L = −d/dx[(1/μ)d/dx] − k²ε, represented by
/// the two one-sided-outgoing solutions and their conserved Wronskian
/// weight W̃ = (1/μ)(ψ₋ψ₊′ − ψ₋′ψ₊).
#[derive(Debug, Clone)]
pub struct Green1D {
    pub omega: f64,
    pub k: f64,
    /// ∝ e^{−ikx} as x → −∞ (the σ = −1 scattering mode).
    pub psi_minus: ModeSolution,
    /// ∝ e^{+ikx} as x → +∞ (the σ = +1 scattering mode).
    pub psi_plus: ModeSolution,
    pub wronskian_weight: Complex,
}

impl Green1D {
    /// Builds the Green's function for a structure at frequency ω.
    pub fn new(structure: &Structure1D, omega: f64) -> Result<Green1D> {
        let psi_plus = scattering_mode(structure, omega, 1, &[])?;
        let psi_minus = scattering_mode(structure, omega, -1, &[])?;
        let (_, x1) = structure.extent().unwrap_or((0.0, 0.0));
        let x_eval = x1 + 1.0;
        let w = (psi_minus.field(x_eval) * psi_plus.dfield(x_eval)
            - psi_minus.dfield(x_eval) * psi_plus.field(x_eval))
            / psi_plus.mu(x_eval);
        if w.norm() < 1e-12 * omega {
            return Err(Error::Singular(format!(
                "Wronskian weight |W̃| = {:.3e} below threshold at ω = {omega}",
                w.norm()
            )));
        }
        Ok(Green1D { omega, k: psi_plus.k, psi_minus, psi_plus, wronskian_weight: w })
    }

    /// g_ω(x, x′) = −ψ₋(x_<)ψ₊(x_>)/W̃.
    pub fn eval(&self, x: f64, x_prime: f64) -> Complex {
        let (lo, hi) = if x <= x_prime { (x, x_prime) } else { (x_prime, x) };
        -self.psi_minus.field(lo) * self.psi_plus.field(hi) / self.wronskian_weight
    }

    /// ∂_z g_ω(x, z), the derivative in the second (source) argument.
    /// At z = x the one-sided limits differ by the jump −μ(z); the mean of
    /// the two limits is returned there.
    pub fn eval_dz(&self, x: f64, z: f64) -> Complex {
        if z < x {
            -self.psi_minus.dfield(z) * self.psi_plus.field(x) / self.wronskian_weight
        } else if z > x {
            -self.psi_minus.field(x) * self.psi_plus.dfield(z) / self.wronskian_weight
        } else {
            -0.5 * (self.psi_minus.dfield(z) * self.psi_plus.field(x)
                + self.psi_minus.field(x) * self.psi_plus.dfield(z))
                / self.wronskian_weight
        }
    }

    /// Checks constancy of W̃ across sample positions (a defect report, not
    /// an assertion: passive media cannot produce true degeneracies).
    pub fn wronskian_constancy(&self, positions: &[f64]) -> CheckReport {
        let mut worst = 0.0f64;
        for &x in positions {
            let w = (self.psi_minus.field(x) * self.psi_plus.dfield(x)
                - self.psi_minus.dfield(x) * self.psi_plus.field(x))
                / self.psi_plus.mu(x);
            worst = worst.max((w - self.wronskian_weight).norm());
        }
        CheckReport::from_error(
            "wronskian-constancy",
            "green-1d/structure",
            json!({ "omega": self.omega, "positions": positions.len() }),
            worst,
            self.wronskian_weight.norm(),
            1e-10,
        )
    }
}

/// Closed-form Green's function of a homogeneous absorber filling all space:
/// g = iμ·e^{ikn|x−x′|}/(2kn) with n = sqrt(εμ), Im n > 0.
pub fn homogeneous_green(model: &ResponseModel, omega: f64, x: f64, x_prime: f64) -> Complex {
    let (eps, mu) = model.eval_real(omega);
    let n = refractive_index(eps, mu);
    let k = omega;
    I * mu * (I * k * n * (x - x_prime).abs()).exp() / (2.0 * k * n)
}

/// Uniform grid helper with n points from a to b inclusive.
pub fn uniform_grid(a: f64, b: f64, n: usize) -> Vec<f64> {
    assert!(n >= 2);
    (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect()
}
