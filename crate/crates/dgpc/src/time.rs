//! Third-order TVD Runge-Kutta time stepping.
//!
//! The step count is chosen so the integration lands exactly on the final
//! time: `n_steps = ceil(T / dt_nominal)` with every step of equal size
//! `T / n_steps`, never a trailing partial step.

use crate::error::{Error, Result};

/// State vectors advanced by the Runge-Kutta loop.
pub trait OdeState: Clone {
    /// Weighted sum `Σ w_i x_i` of states of identical shape.
    fn linear_comb(terms: &[(f64, &Self)]) -> Self;

    /// False as soon as any entry is NaN or infinite.
    fn all_finite(&self) -> bool;
}

impl OdeState for Vec<f64> {
    fn linear_comb(terms: &[(f64, &Self)]) -> Self {
        let len = terms[0].1.len();
        let mut out = vec![0.0; len];
        for (w, x) in terms {
            for i in 0..len {
                out[i] += w * x[i];
            }
        }
        out
    }

    fn all_finite(&self) -> bool {
        self.iter().all(|v| v.is_finite())
    }
}

/// Time-step selection rule, keyed to the spatial degree.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DtRule {
    /// `Δt = cfl · Δx / λ_max`
    P1,
    /// `Δt = cfl · Δx^{5/3} / λ_max`
    P2,
    /// `Δt = cfl · Δx^{(k+1)/3} / λ_max` for degrees beyond the tabulated
    /// cases; an extrapolation, not a tuned rule.
    Extended { k: usize },
}

impl DtRule {
    pub fn for_degree(k: usize) -> Self {
        match k {
            0 | 1 => DtRule::P1,
            2 => DtRule::P2,
            _ => DtRule::Extended { k },
        }
    }

    fn dt_nominal(&self, h: f64, lambda_max: f64, cfl: f64) -> f64 {
        let h_pow = match self {
            DtRule::P1 => h,
            DtRule::P2 => h.powf(5.0 / 3.0),
            DtRule::Extended { k } => h.powf((*k as f64 + 1.0) / 3.0),
        };
        cfl * h_pow / lambda_max
    }
}

/// A fixed-step schedule reaching `t_final` exactly.
#[derive(Debug, Clone, Copy)]
pub struct TimePlan {
    pub t_final: f64,
    pub cfl: f64,
    pub dt_rule: DtRule,
    pub lambda_max: f64,
    pub n_steps: usize,
    pub dt: f64,
}

/// Build the step schedule for final time `t`, mesh width `h`, maximal
/// characteristic speed and spatial degree `k`.
pub fn make_time_plan(t: f64, h: f64, lambda_max: f64, k: usize, cfl: f64) -> Result<TimePlan> {
    if !(t > 0.0) || !(h > 0.0) || !(cfl > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "time plan needs positive T, h and CFL (got T={t}, h={h}, cfl={cfl})"
        )));
    }
    if !(lambda_max > 0.0) {
        return Err(Error::DegenerateSystem(
            "all characteristic speeds vanish; nothing to integrate".into(),
        ));
    }
    let dt_rule = DtRule::for_degree(k);
    let dt_nominal = dt_rule.dt_nominal(h, lambda_max, cfl);
    let n_steps = (t / dt_nominal).ceil() as usize;
    let n_steps = n_steps.max(1);
    Ok(TimePlan { t_final: t, cfl, dt_rule, lambda_max, n_steps, dt: t / n_steps as f64 })
}

/// One third-order TVD Runge-Kutta step:
///
/// `S¹ = Sⁿ + Δt R(Sⁿ)`
/// `S² = ¾ Sⁿ + ¼ S¹ + ¼ Δt R(S¹)`
/// `Sⁿ⁺¹ = ⅓ Sⁿ + ⅔ S² + ⅔ Δt R(S²)`
pub fn rk3_step<S, F>(state: &S, dt: f64, rhs: &F) -> Result<S>
where
    S: OdeState,
    F: Fn(&S) -> Result<S>,
{
    let r0 = rhs(state)?;
    let s1 = S::linear_comb(&[(1.0, state), (dt, &r0)]);
    let r1 = rhs(&s1)?;
    let s2 = S::linear_comb(&[(0.75, state), (0.25, &s1), (0.25 * dt, &r1)]);
    let r2 = rhs(&s2)?;
    Ok(S::linear_comb(&[(1.0 / 3.0, state), (2.0 / 3.0, &s2), (2.0 / 3.0 * dt, &r2)]))
}

/// Advance `state` to `plan.t_final`, failing with the step index if the
/// state stops being finite.
pub fn integrate<S, F>(state: S, plan: &TimePlan, rhs: &F) -> Result<S>
where
    S: OdeState,
    F: Fn(&S) -> Result<S>,
{
    let mut s = state;
    for step in 0..plan.n_steps {
        s = rk3_step(&s, plan.dt, rhs)?;
        if !s.all_finite() {
            return Err(Error::Instability { step: step + 1, n_steps: plan.n_steps });
        }
    }
    Ok(s)
}
