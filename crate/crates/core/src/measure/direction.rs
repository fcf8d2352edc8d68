use num_complex::Complex64;

use super::MeasureError;
use crate::algebraic::PisotContext;
use crate::hp::{CBall, Precision};

/// Largest accepted `||z| − 1|` for a direction.
pub const UNIT_TOLERANCE: f64 = 1e-14;

/// A unit complex number `z`, kept as a ball so that the special directions
/// `η^k = (θ̄/|θ|)^k` stay exact.
#[derive(Clone, Debug)]
pub struct UnitDirection {
    ball: CBall,
    approx: Complex64,
}

impl UnitDirection {
    pub fn from_angle(angle: f64, prec: Precision) -> Result<Self, MeasureError> {
        if !angle.is_finite() {
            return Err(MeasureError::InvalidInput(format!("angle {angle} is not finite")));
        }
        Self::from_complex(Complex64::from_polar(1.0, angle), prec)
    }

    pub fn from_complex(z: Complex64, prec: Precision) -> Result<Self, MeasureError> {
        if !((z.norm() - 1.0).abs() <= UNIT_TOLERANCE) {
            return Err(MeasureError::InvalidInput(format!(
                "direction {z} is not a unit vector (|z| = {})",
                z.norm()
            )));
        }
        Ok(Self {
            ball: CBall::from_c64(z, prec),
            approx: z,
        })
    }

    /// `η^k` with `η = θ̄/|θ|`.
    pub fn pisot(ctx: &PisotContext, k: u32) -> Result<Self, MeasureError> {
        let inv_abs = ctx
            .theta_abs()
            .recip()
            .ok_or_else(|| MeasureError::InvalidInput("|θ| not separated from zero".into()))?;
        let eta = ctx.theta().conj().mul_real(&inv_abs);
        let ball = eta.powi(k as u64);
        let approx = ball.to_c64();
        Ok(Self { ball, approx })
    }

    pub fn ball(&self) -> &CBall {
        &self.ball
    }

    pub fn to_c64(&self) -> Complex64 {
        self.approx
    }

    pub fn angle(&self) -> f64 {
        self.approx.arg().rem_euclid(std::f64::consts::TAU)
    }

    /// `z^⊥ = e^{−iπ/2} z`.
    pub fn perp(&self) -> Complex64 {
        Complex64::new(self.approx.im, -self.approx.re)
    }
}
