//! Numeric steady state of the cumulant equations by damped Newton iteration.

use nalgebra::{DMatrix, DVector};

use super::{evolve_moments, moment_derivatives, MomentVector, DIM};
use crate::{Error, ModelParams, Result};

const RESIDUAL_TOL: f64 = 1e-10;
const MAX_NEWTON_ITERS: usize = 200;

fn residual(p: &ModelParams, y: &[f64; DIM]) -> [f64; DIM] {
    moment_derivatives(&MomentVector::from_array(y), p).as_array()
}

fn inf_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |a, x| a.max(x.abs()))
}

/// Forward-difference Jacobian of the derivative field.
fn jacobian(p: &ModelParams, y: &[f64; DIM], f0: &[f64; DIM]) -> DMatrix<f64> {
    let mut jac = DMatrix::zeros(DIM, DIM);
    for col in 0..DIM {
        let h = 1e-7 * y[col].abs().max(1.0);
        let mut yp = *y;
        yp[col] += h;
        let fp = residual(p, &yp);
        for row in 0..DIM {
            jac[(row, col)] = (fp[row] - f0[row]) / h;
        }
    }
    jac
}

fn newton(p: &ModelParams, start: &[f64; DIM]) -> Option<[f64; DIM]> {
    let mut y = *start;
    let mut f = residual(p, &y);
    let mut norm = inf_norm(&f);
    for _ in 0..MAX_NEWTON_ITERS {
        if norm < RESIDUAL_TOL {
            return Some(y);
        }
        let jac = jacobian(p, &y, &f);
        let rhs = DVector::from_row_slice(&f);
        let step = jac.lu().solve(&rhs)?;
        // Backtracking line search on the residual norm.
        let mut lambda = 1.0;
        let mut improved = false;
        for _ in 0..30 {
            let mut y_trial = y;
            for i in 0..DIM {
                y_trial[i] -= lambda * step[i];
            }
            let f_trial = residual(p, &y_trial);
            let norm_trial = inf_norm(&f_trial);
            if norm_trial < norm || (lambda == 1.0 && norm_trial < RESIDUAL_TOL) {
                y = y_trial;
                f = f_trial;
                norm = norm_trial;
                improved = true;
                break;
            }
            lambda *= 0.5;
        }
        if !improved {
            return None;
        }
    }
    (norm < RESIDUAL_TOL).then_some(y)
}

fn physical(m: &MomentVector) -> bool {
    m.n >= -1e-9 && (-1.0 - 1e-9..=1e-9).contains(&m.sz)
}

/// Finds a root of `moment_derivatives = 0` by damped Newton iteration seeded
/// at `guess`, falling back to long-time relaxation when Newton stalls.
///
/// Returns [`Error::NoRoot`] when no *physical* fixed point
/// (`⟨n̂⟩ ≥ 0`, `⟨σ̂_z⟩ ∈ [−1, 0]`) exists within the iteration budget —
/// the signature of the non-stationary breakdown regime.
pub fn steady_state_numeric(p: &ModelParams, guess: &MomentVector) -> Result<MomentVector> {
    p.validate()?;

    // Seeds, in order of preference: the caller's guess, then the closed-form
    // solution sets (above the SPT the normal-branch continuation that a
    // ground-state guess converges to turns unphysical, so the superradiant
    // branch must be offered explicitly), then the asymptotic large-N branch.
    let mut seeds: Vec<[f64; DIM]> = vec![guess.as_array()];
    if p.kappa == 0.0 {
        if let Ok(sols) = super::closed_form::steady_state_closed_form(p) {
            seeds.extend(sols.iter().filter(|s| s.physical).map(|s| s.moments.as_array()));
        }
    }
    if let Ok(sol) = super::closed_form::large_n_physical_branch(p) {
        seeds.push(sol.moments.as_array());
    }

    let mut unphysical: Option<MomentVector> = None;
    for seed in &seeds {
        if let Some(y) = newton(p, seed) {
            let m = MomentVector::from_array(&y);
            if physical(&m) {
                return Ok(m);
            }
            unphysical.get_or_insert(m);
        }
    }

    // Relaxation fallback: integrate toward the attractor, then polish.
    let m0 = if guess.validate().is_ok() {
        *guess
    } else {
        MomentVector { sz: -1.0, czz: 1.0, ..Default::default() }
    };
    if let Ok(traj) = evolve_moments(&m0, p, 2000.0 / p.omega0, 1e-10) {
        if !traj.diverged {
            let (_, m_end) = traj.last();
            if let Some(y) = newton(p, &m_end.as_array()) {
                let m = MomentVector::from_array(&y);
                if physical(&m) {
                    return Ok(m);
                }
                unphysical.get_or_insert(m);
            }
        }
    }

    match unphysical {
        Some(m) => Err(Error::NoRoot(format!(
            "fixed point is unphysical (n = {:.3e}, sz = {:.3e})",
            m.n, m.sz
        ))),
        None => Err(Error::NoRoot("Newton iteration and relaxation both stalled".into())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cumulant::{initial_moments, InitialState};
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    #[test]
    fn single_particle_values() {
        let p = ModelParams::resonant(1, 0.5, 0.1).unwrap();
        let guess = initial_moments(&p, InitialState::Ground).unwrap();
        let m = steady_state_numeric(&p, &guess).unwrap();
        assert_relative_eq!(m.sz, -0.75, max_relative = 1e-9);
        assert_abs_diff_eq!(m.n, 0.0425, epsilon = 1e-9);
        let d = moment_derivatives(&m, &p);
        assert!(d.as_array().iter().all(|v| v.abs() < 1e-10));
    }

    #[test]
    fn no_physical_root_beyond_pole() {
        let p = ModelParams::resonant(1, 1.2, 0.1).unwrap();
        let guess = initial_moments(&p, InitialState::Ground).unwrap();
        match steady_state_numeric(&p, &guess) {
            Err(Error::NoRoot(_)) => {}
            other => panic!("expected NoRoot, got {other:?}"),
        }
    }

    #[test]
    fn fixed_point_is_stationary_under_evolution() {
        let p = ModelParams::resonant(2, 0.4, 0.1).unwrap();
        let guess = initial_moments(&p, InitialState::Ground).unwrap();
        let m = steady_state_numeric(&p, &guess).unwrap();
        let traj = crate::cumulant::evolve_moments(&m, &p, 100.0, 1e-12).unwrap();
        let (_, m_end) = traj.last();
        assert!(m.max_abs_diff(&m_end) < 1e-8);
    }
}
