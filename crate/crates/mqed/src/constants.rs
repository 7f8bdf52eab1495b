/// Physical constants threaded through every formula.
///
/// Defaults to natural units ħ = ε₀ = c = 1, but all prefactors are kept
/// symbolic so dimensional runs are possible. μ₀ is derived from ε₀ and c.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Constants {
    /// Reduced Planck constant ħ.
    pub hbar: f64,
    /// Vacuum permittivity ε₀.
    pub eps0: f64,
    /// Speed of light in vacuum c.
    pub c: f64,
}

impl Constants {
    /// Natural units: ħ = ε₀ = c = 1.
    pub const fn natural() -> Self {
        Constants { hbar: 1.0, eps0: 1.0, c: 1.0 }
    }

    /// Vacuum permeability μ₀ = 1/(ε₀ c²).
    pub fn mu0(&self) -> f64 {
        1.0 / (self.eps0 * self.c * self.c)
    }

    /// Validates strict positivity of all constants.
    pub fn validate(&self) -> crate::error::Result<()> {
        if self.hbar > 0.0 && self.eps0 > 0.0 && self.c > 0.0 {
            Ok(())
        } else {
            Err(crate::Error::InvalidInput(
                "constants must be strictly positive".into(),
            ))
        }
    }
}

impl Default for Constants {
    fn default() -> Self {
        Constants::natural()
    }
}
