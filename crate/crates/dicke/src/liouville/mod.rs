//! Full Lindblad master equation on the permutation-symmetric spin sector ⊗
//! truncated oscillator, with a brute-force reference at small `N` and
//! breakdown detection via Fock-cutoff dependence.

pub mod basis;
pub mod brute;
pub mod coupling;
pub mod generator;
pub mod state;

use num_complex::Complex64;
use serde::Serialize;

use crate::ode::{DormandPrince54, IntegrationRun, Stepper};
use crate::{Error, ModelParams, Result};

pub use basis::{build_dicke_basis, DickeBasis, SpinBlock};
pub use brute::{brute_force_generator, full_to_symmetric, symmetric_to_full, BruteForceGenerator};
pub use generator::{build_generator, SymmetricGenerator};
pub use state::{observables, DensityState, Observables};

/// Reinterprets interleaved `re, im` pairs as complex coefficients.
/// `Complex64` is a `repr(C)` pair of `f64`, so layout and alignment match.
pub(crate) fn complex_view(y: &[f64]) -> &[Complex64] {
    debug_assert!(y.len() % 2 == 0);
    unsafe { std::slice::from_raw_parts(y.as_ptr().cast(), y.len() / 2) }
}

pub(crate) fn complex_view_mut(y: &mut [f64]) -> &mut [Complex64] {
    debug_assert!(y.len() % 2 == 0);
    unsafe { std::slice::from_raw_parts_mut(y.as_mut_ptr().cast(), y.len() / 2) }
}

pub(crate) fn to_interleaved(z: &[Complex64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(2 * z.len());
    for c in z {
        out.push(c.re);
        out.push(c.im);
    }
    out
}

/// Evolution controls beyond the time span and tolerance.
pub struct EvolveOptions<'a> {
    /// Strictly increasing snapshot times; the initial time is always
    /// reported first.
    pub sample_times: Vec<f64>,
    /// Keep a full state copy per sample (memory heavy); the final state is
    /// always kept.
    pub keep_snapshots: bool,
    pub stepper: &'a dyn Stepper,
}

impl EvolveOptions<'_> {
    pub fn sampled(t0: f64, t_final: f64, samples: usize) -> Self {
        let samples = samples.max(2);
        let sample_times = (0..samples)
            .map(|i| t0 + (t_final - t0) * i as f64 / (samples - 1) as f64)
            .collect();
        EvolveOptions { sample_times, keep_snapshots: false, stepper: &DormandPrince54 }
    }
}

/// Time series of snapshots and their observables.
#[derive(Debug)]
pub struct DensityTrajectory {
    pub times: Vec<f64>,
    pub observables: Vec<Observables>,
    /// Populated only when snapshots were requested.
    pub snapshots: Vec<DensityState>,
    pub final_state: DensityState,
    /// Worst `|trace − 1|` over all reported snapshots.
    pub max_trace_drift: f64,
    /// Worst Hermiticity violation over all reported snapshots.
    pub max_hermiticity_error: f64,
}

const TRACE_ABORT: f64 = 1e-6;

/// Propagates `dρ/dt = Lρ` from `rho0` to `t_final`, sampling 33 snapshots.
pub fn evolve_density(
    rho0: &DensityState,
    p: &ModelParams,
    t_final: f64,
    tol: f64,
) -> Result<DensityTrajectory> {
    let opts = EvolveOptions::sampled(rho0.time, t_final, 33);
    evolve_density_with(rho0, p, t_final, tol, opts)
}

/// Propagation with explicit sampling and stepper choice. Trace and
/// Hermiticity drift are monitored and reported, never corrected; drift of
/// `|trace − 1| > 10⁻⁶` aborts.
pub fn evolve_density_with(
    rho0: &DensityState,
    p: &ModelParams,
    t_final: f64,
    tol: f64,
    opts: EvolveOptions<'_>,
) -> Result<DensityTrajectory> {
    p.validate()?;
    if !(t_final > rho0.time) {
        return Err(Error::InvalidParams("t_final must exceed the initial time".into()));
    }
    if !(tol > 0.0) {
        return Err(Error::InvalidParams("tol must be positive".into()));
    }
    let gen = build_generator(p, rho0.n_max)?;
    if !gen.matches(rho0) {
        return Err(Error::InvalidParams("state does not match the generator basis".into()));
    }

    let mut sample_times: Vec<f64> = opts
        .sample_times
        .iter()
        .copied()
        .filter(|&t| t > rho0.time && t <= t_final)
        .collect();
    sample_times.sort_by(f64::total_cmp);
    sample_times.dedup();
    if sample_times.last().copied() != Some(t_final) {
        sample_times.push(t_final);
    }

    let sys = |_t: f64, y: &[f64], dy: &mut [f64]| {
        gen.apply(complex_view(y), complex_view_mut(dy));
    };
    let guard = |y: &[f64]| y.iter().any(|v| !v.is_finite());
    let mut y = to_interleaved(&rho0.data);

    let mut traj = DensityTrajectory {
        times: vec![rho0.time],
        observables: vec![observables(rho0)],
        snapshots: if opts.keep_snapshots { vec![rho0.clone()] } else { Vec::new() },
        final_state: rho0.clone(),
        max_trace_drift: (rho0.trace() - 1.0).abs(),
        max_hermiticity_error: rho0.hermiticity_error(),
    };

    let mut t_prev = rho0.time;
    for &t in &sample_times {
        let run = IntegrationRun {
            t0: t_prev,
            t_final: t,
            tol,
            observer: None,
            guard: Some(&guard),
        };
        match opts.stepper.integrate(&sys, &mut y, run)? {
            crate::ode::StopReason::Completed => {}
            crate::ode::StopReason::Diverged => {
                return Err(Error::Numerical(format!(
                    "density evolution produced non-finite values near t = {t:.3}"
                )));
            }
        }
        t_prev = t;

        let mut snap = rho0.clone();
        snap.time = t;
        snap.data.copy_from_slice(complex_view(&y));
        let drift = (snap.trace() - 1.0).abs();
        traj.max_trace_drift = traj.max_trace_drift.max(drift);
        if drift > TRACE_ABORT {
            return Err(Error::TraceDrift { t, drift });
        }
        traj.max_hermiticity_error = traj.max_hermiticity_error.max(snap.hermiticity_error());
        traj.times.push(t);
        traj.observables.push(observables(&snap));
        if opts.keep_snapshots {
            traj.snapshots.push(snap.clone());
        }
        traj.final_state = snap;
    }
    Ok(traj)
}

/// Outcome of the Fock-cutoff dependence scan.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Classification {
    Steady,
    Breakdown,
    Inconclusive,
}

impl std::fmt::Display for Classification {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Classification::Steady => "steady",
            Classification::Breakdown => "breakdown",
            Classification::Inconclusive => "inconclusive",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct BreakdownReport {
    pub cutoffs: Vec<usize>,
    /// Mean phonon number at `t_final` per cutoff.
    pub n_final: Vec<f64>,
    /// Mean inversion at `t_final` per cutoff.
    pub sz_final: Vec<f64>,
    /// Probability in the top 10% of Fock bins at `t_final` per cutoff.
    pub top_bin_mass: Vec<f64>,
    /// Late-time `d⟨n̂⟩/dt` at the largest cutoff.
    pub growth_rate: f64,
    pub classification: Classification,
    /// Top-bin mass above 10⁻³ at the largest cutoff: the truncation is felt
    /// and the classification must not be read as converged.
    pub cutoff_unconverged: bool,
}

fn slope(times: &[f64], values: &[f64]) -> f64 {
    let n = times.len() as f64;
    let tm = times.iter().sum::<f64>() / n;
    let vm = values.iter().sum::<f64>() / n;
    let mut num = 0.0;
    let mut den = 0.0;
    for (&t, &v) in times.iter().zip(values) {
        num += (t - tm) * (v - vm);
        den += (t - tm) * (t - tm);
    }
    num / den
}

/// Runs [`evolve_density`] from the ground product state once per cutoff and
/// classifies the point from the cutoff dependence of `⟨n̂⟩`:
/// breakdown when `⟨n̂⟩(t_final)` rises by more than 20% between the two
/// largest cutoffs and still grows faster than `10⁻³ ω₀`; steady when the top
/// two cutoffs agree within 2% and the growth rate is below `10⁻⁴ ω₀`.
pub fn detect_breakdown(
    p: &ModelParams,
    cutoffs: &[usize],
    t_final: f64,
    tol: f64,
) -> Result<BreakdownReport> {
    p.validate()?;
    if cutoffs.len() < 2 {
        return Err(Error::InvalidParams("need at least two Fock cutoffs".into()));
    }
    if !cutoffs.windows(2).all(|w| w[0] < w[1]) {
        return Err(Error::InvalidParams("cutoffs must be strictly increasing".into()));
    }
    let mut n_final = Vec::new();
    let mut sz_final = Vec::new();
    let mut top_bin_mass = Vec::new();
    let mut growth_rate = 0.0;
    for (ci, &n_max) in cutoffs.iter().enumerate() {
        let rho0 = DensityState::ground(p.n_spins, n_max)?;
        let traj = evolve_density(&rho0, p, t_final, tol)?;
        let last = traj.observables.last().expect("nonempty trajectory");
        n_final.push(last.n);
        sz_final.push(last.sz);
        let f = n_max + 1;
        let top = f - f.div_ceil(10);
        top_bin_mass.push(last.fock_distribution[top..].iter().sum());
        if ci == cutoffs.len() - 1 {
            // Late-time slope over the final quarter of the samples.
            let cut = traj.times.len() * 3 / 4;
            let ns: Vec<f64> = traj.observables[cut..].iter().map(|o| o.n).collect();
            growth_rate = slope(&traj.times[cut..], &ns);
        }
    }
    let k = cutoffs.len() - 1;
    let rel = (n_final[k] - n_final[k - 1]) / n_final[k - 1].abs().max(1e-12);
    let classification = if rel > 0.20 && growth_rate > 1e-3 * p.omega0 {
        Classification::Breakdown
    } else if rel.abs() <= 0.02 && growth_rate.abs() < 1e-4 * p.omega0 {
        Classification::Steady
    } else {
        Classification::Inconclusive
    };
    let cutoff_unconverged = *top_bin_mass.last().expect("nonempty") > 1e-3;
    Ok(BreakdownReport {
        cutoffs: cutoffs.to_vec(),
        n_final,
        sz_final,
        top_bin_mass,
        growth_rate,
        classification,
        cutoff_unconverged,
    })
}

#[cfg(test)]
pub(crate) mod testutil {
    use super::state::DensityState;
    use num_complex::Complex64;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// Random positive Hermitian symmetric state (`ρ_block = A A†` per block,
    /// globally normalized), deterministic in `seed`.
    pub(crate) fn random_symmetric_state(n_spins: usize, n_max: usize, seed: u64) -> DensityState {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut rho = DensityState::zero(n_spins, n_max).unwrap();
        let f = n_max + 1;
        let blocks = rho.basis.blocks.clone();
        for (bi, blk) in blocks.iter().enumerate() {
            let d = blk.dim * f;
            let a: Vec<Complex64> = (0..d * d)
                .map(|_| Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5))
                .collect();
            for s in 0..blk.dim {
                for sp in 0..blk.dim {
                    for n in 0..f {
                        for np in 0..f {
                            let r = s * f + n;
                            let c = sp * f + np;
                            let mut acc = Complex64::new(0.0, 0.0);
                            for k in 0..d {
                                acc += a[r * d + k] * a[c * d + k].conj();
                            }
                            *rho.coeff_mut(bi, s, sp, n, np) = acc;
                        }
                    }
                }
            }
        }
        let tr = rho.trace();
        for c in rho.data.iter_mut() {
            *c /= tr;
        }
        rho
    }
}
