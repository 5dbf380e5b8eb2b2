//! Cross-model shear-thinning viscosity.

use crate::error::ParameterError;

/// Default floor applied to the shear magnitude in the Newton coefficient.
pub const DEFAULT_EPS_REG: f64 = 1e-8;

/// Parameters of `nu(d) = nu_inf + (nu_0 - nu_inf) / (1 + K d^(2 - r))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CrossModel {
    pub nu_inf: f64,
    pub nu_0: f64,
    pub k: f64,
    pub r: f64,
    pub eps_reg: f64,
}

impl CrossModel {
    pub fn new(nu_inf: f64, nu_0: f64, k: f64, r: f64) -> Result<Self, ParameterError> {
        Self::with_regularization(nu_inf, nu_0, k, r, DEFAULT_EPS_REG)
    }

    pub fn with_regularization(
        nu_inf: f64,
        nu_0: f64,
        k: f64,
        r: f64,
        eps_reg: f64,
    ) -> Result<Self, ParameterError> {
        let fail = |msg: String| Err(ParameterError::Viscosity(msg));
        if !(nu_inf > 0.0 && nu_inf.is_finite()) {
            return fail(format!("nu_inf must be positive, got {nu_inf}"));
        }
        if !(nu_0 >= nu_inf && nu_0.is_finite()) {
            return fail(format!("nu_0 = {nu_0} must be at least nu_inf = {nu_inf}"));
        }
        if !(k > 0.0 && k.is_finite()) {
            return fail(format!("K must be positive, got {k}"));
        }
        if !(r > 1.0 && r.is_finite()) {
            return fail(format!("exponent r must exceed 1, got {r}"));
        }
        if !(eps_reg >= 0.0 && eps_reg.is_finite()) {
            return fail(format!("eps_reg must be non-negative, got {eps_reg}"));
        }
        Ok(Self {
            nu_inf,
            nu_0,
            k,
            r,
            eps_reg,
        })
    }

    /// Newtonian limit: the viscosity does not depend on the shear rate.
    pub fn is_linear(&self) -> bool {
        self.r == 2.0 || self.nu_0 == self.nu_inf
    }

    /// `d^(2-r)` with the convention `0^0 = 1`.
    fn shear_power(&self, d: f64) -> f64 {
        if self.r == 2.0 {
            1.0
        } else {
            d.powf(2.0 - self.r)
        }
    }

    pub fn nu(&self, d: f64) -> f64 {
        debug_assert!(d >= 0.0);
        self.nu_inf + (self.nu_0 - self.nu_inf) / (1.0 + self.k * self.shear_power(d))
    }

    /// `nu'(d) / d`, the scalar in front of `D (D : D(w))` in the Gateaux
    /// derivative of `nu(|D|) D`. Evaluated at `max(d, eps_reg)`.
    pub fn nu_prime_coeff(&self, d: f64) -> f64 {
        if self.r == 2.0 {
            return 0.0;
        }
        let d = d.max(self.eps_reg);
        let denom = 1.0 + self.k * d.powf(2.0 - self.r);
        (self.r - 2.0) * (self.nu_0 - self.nu_inf) * self.k / (denom * denom * d.powf(self.r))
    }
}
