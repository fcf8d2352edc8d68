use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use super::{MeasureError, UnitDirection};
use crate::fourier::FourierEvaluator;
use crate::hp::up;

/// Trapezoid estimate of `(1/2M) ∫_{−M}^{M} |ft|²`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct WienerEstimate {
    pub m: f64,
    pub value: f64,
    /// `L h / 4` with `L = 2 · support_diameter` bounding `(|ft|²)'`.
    pub quadrature_error: f64,
    /// Propagated from the error bounds reported by `ft`.
    pub evaluation_error: f64,
    pub step: f64,
    pub nodes: usize,
}

impl WienerEstimate {
    pub fn error(&self) -> f64 {
        up(self.quadrature_error + self.evaluation_error)
    }
}

/// `ft` returns a value and a bound on its error. The step is rejected when
/// it exceeds `π / (2 · support_diameter)`, so that the fastest oscillation of
/// `|ft|²` is sampled at least four times per period.
pub fn wiener_statistic<F>(
    ft: F,
    m: f64,
    quad_step: f64,
    support_diameter: f64,
) -> Result<WienerEstimate, MeasureError>
where
    F: Fn(f64) -> (Complex64, f64) + Sync,
{
    if !(m > 0.0) || !m.is_finite() {
        return Err(MeasureError::InvalidInput(format!("M must be positive, got {m}")));
    }
    if !(support_diameter >= 0.0) || !support_diameter.is_finite() {
        return Err(MeasureError::InvalidInput(format!(
            "support diameter must be finite and nonnegative, got {support_diameter}"
        )));
    }
    if !(quad_step > 0.0) {
        return Err(MeasureError::InvalidInput(format!("step must be positive, got {quad_step}")));
    }
    let required = if support_diameter > 0.0 {
        std::f64::consts::PI / (2.0 * support_diameter)
    } else {
        f64::INFINITY
    };
    if quad_step > required {
        return Err(MeasureError::StepTooCoarse {
            step: quad_step,
            required,
        });
    }
    let intervals = (2.0 * m / quad_step).ceil().max(1.0) as usize;
    let h = 2.0 * m / intervals as f64;
    let samples: Vec<(f64, f64)> = (0..=intervals)
        .into_par_iter()
        .map(|i| {
            let t = -m + i as f64 * h;
            let (v, e) = ft(t);
            let a = v.norm();
            let w = if i == 0 || i == intervals { 0.5 } else { 1.0 };
            (w * a * a, w * (2.0 * a * e + e * e))
        })
        .collect();
    let (sum, err) = samples
        .iter()
        .fold((0.0, 0.0), |(s, e), (a, b)| (s + a, e + b));
    let lipschitz = 2.0 * support_diameter;
    Ok(WienerEstimate {
        m,
        value: sum * h / (2.0 * m),
        quadrature_error: up(lipschitz * h / 4.0),
        evaluation_error: up(err * h / (2.0 * m) + sum * h / (2.0 * m) * (intervals as f64) * f64::EPSILON),
        step: h,
        nodes: intervals + 1,
    })
}

/// Wiener statistic of the projection `P_z μ`, using `ℱ(P_z μ)(r) = ℱμ(r z)`.
/// The support diameter is taken as `2R`.
pub fn projection_wiener(
    ev: &FourierEvaluator,
    z: &UnitDirection,
    m: f64,
    quad_step: f64,
) -> Result<WienerEstimate, MeasureError> {
    let zc = z.to_c64();
    let r = ev.config().attractor_radius();
    wiener_statistic(
        |t| {
            let s = ev.transform(zc * t);
            // Rounding r·z moves ξ by ≤ 2ε|t|; ℱμ is R-Lipschitz.
            (s.value, up(s.error + r * 2.0 * f64::EPSILON * t.abs()))
        },
        m,
        quad_step,
        2.0 * r,
    )
}

/// Compares the projection statistic at two cutoffs. A larger value at the
/// larger cutoff is flagged as a failure to decay.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DecayCheck {
    pub small: WienerEstimate,
    pub large: WienerEstimate,
    pub non_decay: bool,
}

pub fn wiener_decay_check(
    ev: &FourierEvaluator,
    z: &UnitDirection,
    m_small: f64,
    m_large: f64,
    quad_step: f64,
) -> Result<DecayCheck, MeasureError> {
    if !(m_small < m_large) {
        return Err(MeasureError::InvalidInput(format!(
            "need M_small < M_large, got {m_small} and {m_large}"
        )));
    }
    let small = projection_wiener(ev, z, m_small, quad_step)?;
    let large = projection_wiener(ev, z, m_large, quad_step)?;
    Ok(DecayCheck {
        small,
        large,
        non_decay: large.value > small.value,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_atom() {
        for m in [1.0, 10.0, 1234.5] {
            let w = wiener_statistic(|_| (Complex64::new(1.0, 0.0), 0.0), m, 0.1, 0.0).unwrap();
            assert!((w.value - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn two_atoms_against_closed_form() {
        // |ℱ|² = ½(1 + cos t), so the statistic is ½ + sin(M)/(2M).
        let ft = |t: f64| (Complex64::new(0.5, 0.0) + Complex64::from_polar(0.5, t), 0.0);
        for m in [100.0, 1000.0, 10000.0] {
            let w = wiener_statistic(ft, m, 0.01, 1.0).unwrap();
            let exact = 0.5 + m.sin() / (2.0 * m);
            assert!((w.value - exact).abs() <= w.error(), "M={m}: {} vs {exact}", w.value);
            assert!((w.value - exact).abs() < 1e-5);
        }
    }

    #[test]
    fn coarse_step_reports_requirement() {
        let err = wiener_statistic(|_| (Complex64::new(1.0, 0.0), 0.0), 10.0, 1.0, 2.0).unwrap_err();
        match err {
            MeasureError::StepTooCoarse { required, .. } => {
                assert!((required - std::f64::consts::PI / 4.0).abs() < 1e-15)
            }
            e => panic!("{e}"),
        }
        assert!(wiener_statistic(|_| (Complex64::new(1.0, 0.0), 0.0), 0.0, 0.1, 1.0).is_err());
    }
}
