use num_complex::Complex64;
use serde::Serialize;

use super::FourierError;
use crate::construction::IfsConfig;
use crate::hp::{pi, up, CBall, RBall};

/// Factors whose cosine argument exceeds this in magnitude are reduced in
/// ball arithmetic instead of double precision.
const HP_ARGUMENT_THRESHOLD: f64 = 65536.0;
const TABLE_LEN: usize = 320;

pub const DEFAULT_TAIL_TOL: f64 = 1e-12;

#[derive(Clone, Debug)]
struct Scale {
    ball: CBall,
    approx: Complex64,
    abs: f64,
    err: f64,
}

impl Scale {
    fn new(ball: CBall) -> Self {
        let approx = ball.to_c64();
        let abs = ball.abs_upper();
        let err = up(ball.rad() + approx.norm() * f64::EPSILON);
        Self {
            ball,
            approx,
            abs,
            err,
        }
    }
}

/// Evaluates `ℱμ(ξ) = ∏_{n≥0} ½(cos Re(λ^n a_1 ξ̄) + cos Re(λ^n a_2 ξ̄))`.
#[derive(Clone, Debug)]
pub struct FourierEvaluator {
    cfg: IfsConfig,
    tail_tol: f64,
    c0: f64,
    m_cut: u32,
    table: Vec<[Scale; 2]>,
    lam: CBall,
    lam_abs: f64,
    a_abs: [f64; 2],
    two_pi: RBall,
    four_pi: RBall,
}

/// `value` approximates `ℱμ(xi)`; the exact value is within `error` of it.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FrequencySample {
    pub xi: Complex64,
    pub value: Complex64,
    pub error: f64,
    /// Number of product factors evaluated.
    pub factors: usize,
}

impl FrequencySample {
    pub fn modulus(&self) -> f64 {
        self.value.norm()
    }

    /// Certified lower bound on `|ℱμ(xi)|`.
    pub fn modulus_lower(&self) -> f64 {
        (self.value.norm() * (1.0 - 2.0 * f64::EPSILON) - self.error).max(0.0)
    }

    pub fn modulus_upper(&self) -> f64 {
        up(self.value.norm() + self.error)
    }
}

impl FourierEvaluator {
    pub fn new(cfg: IfsConfig, tail_tol: f64) -> Result<Self, FourierError> {
        if !(tail_tol > 0.0 && tail_tol < 1.0) {
            return Err(FourierError::InvalidInput(format!(
                "tail_tol must lie in (0, 1), got {tail_tol}"
            )));
        }
        let ctx = cfg.context();
        let prec = ctx.precision();
        let lam = ctx.lambda().clone();
        let lam_abs = lam.abs_upper();
        let (a1, a2) = (cfg.a1(), cfg.a2());
        let rho = ctx.rho();
        let kmax = a1.k().max(a2.k()) as f64;
        let lmax = a1.l().max(a2.l()) as i32;
        let c0 = up(2.0 * std::f64::consts::PI * ctx.decay_constant() * kmax * rho.powi(-lmax));
        let mut m_cut = 1u32;
        while c0 * rho.powi(m_cut as i32) >= 1.0 {
            m_cut += 1;
        }
        let mut table = Vec::with_capacity(TABLE_LEN);
        let mut w = [a1.value().clone(), a2.value().clone()];
        for _ in 0..TABLE_LEN {
            table.push([Scale::new(w[0].clone()), Scale::new(w[1].clone())]);
            w = [&w[0] * &lam, &w[1] * &lam];
        }
        let p = pi(prec);
        let two_pi = p.mul_int(&2.into());
        let four_pi = p.mul_int(&4.into());
        let a_abs = [a1.value().abs_upper(), a2.value().abs_upper()];
        Ok(Self {
            cfg,
            tail_tol,
            c0,
            m_cut,
            table,
            lam,
            lam_abs,
            a_abs,
            two_pi,
            four_pi,
        })
    }

    pub fn config(&self) -> &IfsConfig {
        &self.cfg
    }

    pub fn tail_tol(&self) -> f64 {
        self.tail_tol
    }

    /// `C_0 = 2πC · max k_j · ρ^{−max l_j}`.
    pub fn c0(&self) -> f64 {
        self.c0
    }

    /// First `M ≥ 1` with `C_0 ρ^M < 1`.
    pub fn m_cut(&self) -> u32 {
        self.m_cut
    }

    /// `4π θ̄^N` as a ball.
    pub fn pisot_frequency(&self, n: i64) -> CBall {
        self.cfg.context().theta_pow(n).conj().mul_real(&self.four_pi)
    }

    fn scale(&self, n: usize) -> [Scale; 2] {
        if n < self.table.len() {
            return self.table[n].clone();
        }
        let extra = self.cfg.context().lambda().powi((n - self.table.len() + 1) as u64);
        let last = &self.table[self.table.len() - 1];
        [
            Scale::new(&last[0].ball * &extra),
            Scale::new(&last[1].ball * &extra),
        ]
    }

    /// Cosine argument `Re(w ξ̄)` reduced to about `[−π, π]`, with error bound.
    fn argument(&self, w: &Scale, xi: Complex64, xi_err: f64, xi_ball: Option<&CBall>) -> (f64, f64) {
        let xi_abs = xi.norm();
        if w.abs * xi_abs <= HP_ARGUMENT_THRESHOLD {
            let x = w.approx.re * xi.re + w.approx.im * xi.im;
            let err = up(w.abs * xi_abs * 4.0 * f64::EPSILON + w.abs * xi_err + (xi_abs + xi_err) * w.err);
            return (x, err);
        }
        let owned;
        let xb = match xi_ball {
            Some(b) => b,
            None => {
                owned = CBall::from_c64(xi, w.ball.precision());
                &owned
            }
        };
        let x = (&w.ball * &xb.conj()).re();
        let q = x.round_div(&self.two_pi);
        let r = &x - &self.two_pi.mul_int(&q);
        let v = r.mid_f64();
        (v, up(r.rad() + v.abs() * f64::EPSILON))
    }

    fn evaluate(&self, xi: Complex64, xi_err: f64, xi_ball: Option<&CBall>) -> FrequencySample {
        let xi_abs = up(xi.norm() + xi_err);
        if xi_abs == 0.0 {
            return FrequencySample {
                xi,
                value: Complex64::new(1.0, 0.0),
                error: 0.0,
                factors: 0,
            };
        }
        let lam2 = self.lam_abs * self.lam_abs;
        let amp = up((self.a_abs[0].powi(2) + self.a_abs[1].powi(2)) * xi_abs * xi_abs / 4.0 / (1.0 - lam2));
        // Tail after index N: amp · |λ|^{2(N+1)}.
        let mut n_star = 0usize;
        let mut tail = amp * lam2;
        while tail >= self.tail_tol {
            n_star += 1;
            tail *= lam2;
        }
        let tail = up(tail);

        let mut prod = 1.0f64;
        let mut prod_hi = 1.0f64;
        for n in 0..=n_star {
            let w = self.scale(n);
            let (x1, e1) = self.argument(&w[0], xi, xi_err, xi_ball);
            let (x2, e2) = self.argument(&w[1], xi, xi_err, xi_ball);
            let f = 0.5 * (x1.cos() + x2.cos());
            let e = up(0.5 * (e1 + e2) + 2.0 * f64::EPSILON);
            prod *= f;
            prod_hi = up(prod_hi * (f.abs() + e));
        }
        let p = prod.abs();
        let rounding = (n_star as f64 + 2.0) * 2.0 * f64::EPSILON * p;
        let trunc_err = up((prod_hi - p).max(0.0) + rounding);
        let error = up(trunc_err + (p + trunc_err) * tail);
        FrequencySample {
            xi,
            value: Complex64::new(prod, 0.0),
            error,
            factors: n_star + 1,
        }
    }

    pub fn transform(&self, xi: Complex64) -> FrequencySample {
        self.evaluate(xi, 0.0, None)
    }

    /// Same as [`transform`](Self::transform) for a frequency known only as a ball,
    /// typically an exact `4π θ̄^N`.
    pub fn transform_ball(&self, xi: &CBall) -> FrequencySample {
        let approx = xi.to_c64();
        let err = up(xi.rad() + approx.norm() * f64::EPSILON);
        self.evaluate(approx, err, Some(xi))
    }

    /// One factor `½(cos Re(a_1 ξ̄) + cos Re(a_2 ξ̄))` of the product, in double precision.
    pub fn first_factor(&self, xi: Complex64) -> f64 {
        let w = &self.table[0];
        let x1 = w[0].approx.re * xi.re + w[0].approx.im * xi.im;
        let x2 = w[1].approx.re * xi.re + w[1].approx.im * xi.im;
        0.5 * (x1.cos() + x2.cos())
    }

    pub fn lambda(&self) -> &CBall {
        &self.lam
    }

}

/// Free-function form of [`FourierEvaluator::transform`].
pub fn transform(ev: &FourierEvaluator, xi: Complex64) -> FrequencySample {
    ev.transform(xi)
}
