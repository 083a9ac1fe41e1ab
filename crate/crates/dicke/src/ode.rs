//! Explicit ODE steppers shared by the cumulant and master-equation solvers.
//!
//! Two interchangeable strategies sit behind the [`Stepper`] trait: an
//! adaptive Dormand-Prince 5(4) embedded pair (the default) and a fixed-step
//! classical RK4 for bitwise-reproducible runs. Both operate on flat `f64`
//! state vectors; complex states are viewed as interleaved re/im pairs.

use crate::{Error, Result};

/// Right-hand side of `dy/dt = f(t, y)`.
pub trait OdeSystem {
    fn rhs(&self, t: f64, y: &[f64], dydt: &mut [f64]);
}

impl<F: Fn(f64, &[f64], &mut [f64])> OdeSystem for F {
    fn rhs(&self, t: f64, y: &[f64], dydt: &mut [f64]) {
        self(t, y, dydt)
    }
}

/// Why an integration run ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopReason {
    /// Reached `t_final`.
    Completed,
    /// The divergence guard fired; the run carries a partial trajectory.
    Diverged,
}

/// Observer invoked after every accepted step (and once at `t0`).
pub type Observer<'a> = &'a mut dyn FnMut(f64, &[f64]);

/// Guard invoked after every accepted step; returning `true` stops the run
/// with [`StopReason::Diverged`].
pub type DivergenceGuard<'a> = &'a dyn Fn(&[f64]) -> bool;

pub struct IntegrationRun<'a> {
    pub t0: f64,
    pub t_final: f64,
    /// Local error tolerance, used as both absolute and relative tolerance.
    pub tol: f64,
    pub observer: Option<Observer<'a>>,
    pub guard: Option<DivergenceGuard<'a>>,
}

/// A time-stepping strategy. Implementations are stateless and selected by
/// name through [`stepper_by_name`].
pub trait Stepper: Sync {
    fn name(&self) -> &'static str;

    /// Integrates in place; `y` holds the final state on return.
    fn integrate(&self, sys: &dyn OdeSystem, y: &mut Vec<f64>, run: IntegrationRun)
        -> Result<StopReason>;
}

/// Adaptive Dormand-Prince 5(4) embedded pair.
pub struct DormandPrince54;

/// Classical fixed-step RK4. `dt` is shrunk to divide the interval exactly.
pub struct FixedRk4 {
    pub dt: f64,
}

const REGISTRY: &[&dyn Stepper] = &[&DormandPrince54, &FixedRk4 { dt: 1e-2 }];

/// Looks up a stepper by its registered name (`"dp54"`, `"rk4"`).
pub fn stepper_by_name(name: &str) -> Result<&'static dyn Stepper> {
    REGISTRY
        .iter()
        .copied()
        .find(|s| s.name() == name)
        .ok_or_else(|| Error::Config(format!("unknown stepper '{name}'")))
}

pub fn stepper_names() -> Vec<&'static str> {
    REGISTRY.iter().map(|s| s.name()).collect()
}

// Dormand-Prince tableau.
const C: [f64; 6] = [1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [&[f64]; 6] = [
    &[1.0 / 5.0],
    &[3.0 / 40.0, 9.0 / 40.0],
    &[44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0],
    &[19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0],
    &[9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0],
    &[35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const B5: [f64; 7] = [
    35.0 / 384.0,
    0.0,
    500.0 / 1113.0,
    125.0 / 192.0,
    -2187.0 / 6784.0,
    11.0 / 84.0,
    0.0,
];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

impl Stepper for DormandPrince54 {
    fn name(&self) -> &'static str {
        "dp54"
    }

    fn integrate(
        &self,
        sys: &dyn OdeSystem,
        y: &mut Vec<f64>,
        run: IntegrationRun,
    ) -> Result<StopReason> {
        let IntegrationRun { t0, t_final, tol, mut observer, guard } = run;
        let dim = y.len();
        let span = t_final - t0;
        assert!(span > 0.0, "t_final must exceed t0");
        let tol = tol.max(1e-15);

        let mut k: Vec<Vec<f64>> = (0..7).map(|_| vec![0.0; dim]).collect();
        let mut y_stage = vec![0.0; dim];
        let mut y_new = vec![0.0; dim];

        let mut t = t0;
        if let Some(obs) = observer.as_deref_mut() {
            obs(t, y);
        }
        sys.rhs(t, y, &mut k[0]);

        // Initial step from the crude slope estimate.
        let y_norm = rms(y).max(1e-8);
        let f_norm = rms(&k[0]).max(1e-8);
        let mut dt = (0.01 * y_norm / f_norm).min(span / 10.0).max(span * 1e-10);

        let dt_min = span * 1e-14;
        loop {
            if t + dt > t_final {
                dt = t_final - t;
            }
            // FSAL: k[0] already holds f(t, y).
            for stage in 1..7 {
                let coeffs = A[stage - 1];
                y_stage.copy_from_slice(y);
                for (j, &a) in coeffs.iter().enumerate() {
                    if a != 0.0 {
                        axpy(&mut y_stage, dt * a, &k[j]);
                    }
                }
                let (done, rest) = k.split_at_mut(stage);
                let _ = done;
                sys.rhs(t + C[stage - 1] * dt, &y_stage, &mut rest[0]);
            }

            y_new.copy_from_slice(y);
            for (j, &b) in B5.iter().enumerate() {
                if b != 0.0 {
                    axpy(&mut y_new, dt * b, &k[j]);
                }
            }

            // Scaled RMS of the 5th-vs-4th order difference.
            let mut err_acc = 0.0;
            for i in 0..dim {
                let mut e = 0.0;
                for (j, (&b5, &b4)) in B5.iter().zip(B4.iter()).enumerate() {
                    e += (b5 - b4) * k[j][i];
                }
                e *= dt;
                let scale = tol + tol * y[i].abs().max(y_new[i].abs());
                let r = e / scale;
                err_acc += r * r;
            }
            let err = (err_acc / dim as f64).sqrt();

            if err <= 1.0 {
                t += dt;
                std::mem::swap(y, &mut y_new);
                if let Some(g) = guard {
                    if g(y) {
                        if let Some(obs) = observer.as_deref_mut() {
                            obs(t, y);
                        }
                        return Ok(StopReason::Diverged);
                    }
                }
                if let Some(obs) = observer.as_deref_mut() {
                    obs(t, y);
                }
                if t >= t_final {
                    return Ok(StopReason::Completed);
                }
                // FSAL: last stage of the accepted step is f(t, y).
                let last = k.len() - 1;
                k.swap(0, last);
            }

            let factor = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
            dt *= factor;
            if dt < dt_min {
                return Err(Error::StepSizeUnderflow { t, dt });
            }
        }
    }
}

impl Stepper for FixedRk4 {
    fn name(&self) -> &'static str {
        "rk4"
    }

    fn integrate(
        &self,
        sys: &dyn OdeSystem,
        y: &mut Vec<f64>,
        run: IntegrationRun,
    ) -> Result<StopReason> {
        let IntegrationRun { t0, t_final, mut observer, guard, .. } = run;
        let dim = y.len();
        let span = t_final - t0;
        let n_steps = (span / self.dt).ceil().max(1.0) as usize;
        let dt = span / n_steps as f64;

        let mut k1 = vec![0.0; dim];
        let mut k2 = vec![0.0; dim];
        let mut k3 = vec![0.0; dim];
        let mut k4 = vec![0.0; dim];
        let mut tmp = vec![0.0; dim];

        let mut t = t0;
        if let Some(obs) = observer.as_deref_mut() {
            obs(t, y);
        }
        for _ in 0..n_steps {
            sys.rhs(t, y, &mut k1);
            stage(&mut tmp, y, 0.5 * dt, &k1);
            sys.rhs(t + 0.5 * dt, &tmp, &mut k2);
            stage(&mut tmp, y, 0.5 * dt, &k2);
            sys.rhs(t + 0.5 * dt, &tmp, &mut k3);
            stage(&mut tmp, y, dt, &k3);
            sys.rhs(t + dt, &tmp, &mut k4);
            for i in 0..dim {
                y[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
            }
            t += dt;
            if let Some(g) = guard {
                if g(y) {
                    if let Some(obs) = observer.as_deref_mut() {
                        obs(t, y);
                    }
                    return Ok(StopReason::Diverged);
                }
            }
            if let Some(obs) = observer.as_deref_mut() {
                obs(t, y);
            }
        }
        Ok(StopReason::Completed)
    }
}

fn stage(out: &mut [f64], y: &[f64], h: f64, k: &[f64]) {
    for i in 0..y.len() {
        out[i] = y[i] + h * k[i];
    }
}

fn axpy(y: &mut [f64], a: f64, x: &[f64]) {
    for i in 0..y.len() {
        y[i] += a * x[i];
    }
}

fn rms(v: &[f64]) -> f64 {
    (v.iter().map(|x| x * x).sum::<f64>() / v.len() as f64).sqrt()
}
