//! Closed-form steady-state solutions of the cumulant equations (κ = 0).
//!
//! The published solution sets carry two internal ambiguities which we do not
//! try to second-guess:
//!
//! * the polarization prefactor appears once as `1/(8g²)` and once as
//!   `1/(8(N−1)g²)` — both normalizations are produced here and each solution
//!   carries a residual self-check against [`moment_derivatives`] that flags
//!   which variant is actually stationary;
//! * the exact discriminant radicand goes negative at small coupling for
//!   `N > 1`; this is reported as a complex discriminant, never truncated.
//!
//! The numeric root-solve ([`steady_state_numeric`]) is the source of truth;
//! everything here is a cross-check and a fast large-`N` limit.
//!
//! [`steady_state_numeric`]: super::steady_state_numeric

use serde::Serialize;

use super::{moment_derivatives, MomentVector};
use crate::{Error, ModelParams, Result};

/// Residual threshold below which a closed-form solution is considered an
/// actual fixed point of the moment equations.
pub const CONSISTENCY_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Branch {
    Plus,
    Minus,
    /// The unique `N = 1` solution.
    Single,
}

/// Which polarization prefactor a solution set uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Normalization {
    /// `1/(8g²)` prefactor.
    PerCoupling,
    /// `1/(8(N−1)g²)` prefactor.
    PerParticle,
}

/// The exact and small-γ discriminants separating the solution pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Discriminant {
    /// Radicand of the exact form (may be negative).
    pub radicand: f64,
    /// `sqrt(radicand)` when the radicand is nonnegative.
    pub exact: Option<f64>,
    /// Small-γ approximation `|ω ω₀,γ − 4Ng²|`.
    pub approx: f64,
    /// True when the exact form is complex as printed.
    pub complex: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct ClosedFormSolution {
    pub branch: Branch,
    pub normalization: Normalization,
    pub moments: MomentVector,
    /// Discriminant value entering this solution (0 for `N = 1`).
    pub discriminant: f64,
    /// `⟨n̂⟩ ≥ 0` and `⟨σ̂_z⟩ ∈ [−1, 0]`.
    pub physical: bool,
    /// Inf-norm of `moment_derivatives` at the solution.
    pub residual: f64,
    /// True when the residual confirms an actual fixed point.
    pub consistent: bool,
}

fn is_physical(m: &MomentVector) -> bool {
    m.n >= -1e-12 && (-1.0 - 1e-12..=1e-12).contains(&m.sz)
}

fn finish(
    p: &ModelParams,
    branch: Branch,
    normalization: Normalization,
    moments: MomentVector,
    discriminant: f64,
) -> ClosedFormSolution {
    let residual = moment_derivatives(&moments, p)
        .as_array()
        .iter()
        .fold(0.0f64, |a, v| a.max(v.abs()));
    ClosedFormSolution {
        branch,
        normalization,
        physical: is_physical(&moments),
        consistent: residual < CONSISTENCY_TOL,
        moments,
        discriminant,
        residual,
    }
}

/// Exact discriminant (requires `N ≥ 2`) plus its small-γ approximation.
pub fn discriminant(p: &ModelParams) -> Result<Discriminant> {
    p.validate()?;
    if p.n_spins < 2 {
        return Err(Error::Unsupported("discriminant requires N ≥ 2".into()));
    }
    let e = (p.n_spins - 1) as f64;
    let g2 = p.g * p.g;
    let w = p.omega * p.derived().omega0_gamma;
    let radicand = 16.0 * e * e * (g2 - p.omega * p.omega0) * p.derived().omega0_gamma
        / p.omega0
        + (w + 4.0 * e * g2) * (w + 4.0 * e * g2);
    let approx = (w - 4.0 * p.n_spins as f64 * g2).abs();
    Ok(Discriminant {
        radicand,
        exact: (radicand >= 0.0).then(|| radicand.sqrt()),
        approx,
        complex: radicand < 0.0,
    })
}

/// The unique `N = 1` steady-state solution.
fn single_particle(p: &ModelParams) -> MomentVector {
    let ModelParams { omega0: w0, omega: w, g, gamma, .. } = *p;
    let w0g = p.derived().omega0_gamma;
    let g2 = g * g;
    let u = w * w0 - g2;
    MomentVector {
        sz: g2 / (w * w0) - 1.0,
        n: (w * w + w0 * w0g) / (4.0 * u) - 0.5 * (1.0 + g2 / (w * w)),
        r: g2 / (2.0 * w * w),
        s: 0.0,
        qx: -g / w,
        px: 0.0,
        qy: gamma * g / (2.0 * w * w0),
        py: -g / w0,
        cxx: 2.0 * g2 * u / (w * w * w0 * w0g),
        cyy: gamma * gamma * g2 * u / (2.0 * w * w * w0 * w0 * w0 * w0g),
        czz: u * u / (w * w * w0 * w0),
        cxy: -gamma * g2 * u / (w * w * w0 * w0 * w0g),
    }
}

/// One branch of the exact `N ≥ 2` solution set, as printed, for a given
/// polarization normalization.
fn many_particle(
    p: &ModelParams,
    sign: f64,
    d: f64,
    normalization: Normalization,
) -> MomentVector {
    let ModelParams { omega0: w0, omega: w, g, gamma, .. } = *p;
    let nn = p.n_spins as f64;
    let e = nn - 1.0;
    let w0g = p.derived().omega0_gamma;
    let g2 = g * g;
    let big_w = w * w0g;
    let pole = w * w0 - g2;

    let sz_denominator = match normalization {
        Normalization::PerCoupling => 8.0 * g2,
        Normalization::PerParticle => 8.0 * e * g2,
    };
    let sz = (sign * d - (big_w + 4.0 * e * g2)) / sz_denominator;

    let n = -sign
        * ((w * w + w0 * w0g) / (8.0 * w * w0g) + w0 / (16.0 * e * w * g2)
            - w0 / (16.0 * w * g2))
        * d
        + w0 * w0g / (16.0 * e * g2)
        + e * ((w * w + w0 * w0g) / pole * w0 / (2.0 * w0g)
            - (2.0 * w * w + w0 * w0g) / (4.0 * w * w0g))
        + (w * w + w0 * w0g) / pole * (w0g / (8.0 * w0g))
        + 4.0 * w0 / w
        - w0 * w0g / g2
        - 0.5;

    let bracket_minus = sign * d - (big_w - 4.0 * e * g2);
    let bracket_plus = sign * d - (big_w + 4.0 * e * g2);
    let spin_bracket = bracket_plus * w * w0 + 8.0 * e * pole * g2;

    MomentVector {
        sz,
        n,
        r: nn / (16.0 * e * w * g2) * bracket_plus,
        s: 0.0,
        qx: -w0 / (16.0 * e * g2) * bracket_minus,
        px: 0.0,
        qy: gamma / (16.0 * e * g2) * bracket_minus,
        py: -g / w0,
        cxx: spin_bracket / (16.0 * e * e * g2 * g2),
        cyy: (gamma / 2.0) * (gamma / 2.0) * spin_bracket / (16.0 * e * e * w0 * g2 * g2),
        cxy: -(gamma / 2.0) * spin_bracket / (16.0 * e * e * w0 * g2 * g2),
        czz: -(sign * (w * w0 + 4.0 * e * g2) * w0 * d - 16.0 * e * e * w0 * g2 * g2
            + 8.0 * e * w0g
            + w * w * w0 * w0g * w0g)
            / (32.0 * e * e * w0 * g2 * g2),
    }
}

/// Closed-form steady states at κ = 0.
///
/// `N = 1` yields the single solution; `N ≥ 2` yields both ± branches in both
/// polarization normalizations, each carrying its own physicality flag and
/// fixed-point residual. Branches are omitted when the exact discriminant is
/// complex (flagged through [`discriminant`]).
pub fn steady_state_closed_form(p: &ModelParams) -> Result<Vec<ClosedFormSolution>> {
    p.validate()?;
    if p.kappa != 0.0 {
        return Err(Error::Unsupported("closed forms are derived at κ = 0".into()));
    }
    if p.g == 0.0 {
        // Decoupled fixed point, unique for every N.
        let m = MomentVector { sz: -1.0, czz: 1.0, ..Default::default() };
        return Ok(vec![finish(p, Branch::Single, Normalization::PerParticle, m, 0.0)]);
    }
    if p.n_spins == 1 {
        let m = single_particle(p);
        return Ok(vec![finish(p, Branch::Single, Normalization::PerParticle, m, 0.0)]);
    }

    let disc = discriminant(p)?;
    let mut out = Vec::new();
    if let Some(d) = disc.exact {
        for (branch, sign) in [(Branch::Plus, 1.0), (Branch::Minus, -1.0)] {
            for norm in [Normalization::PerParticle, Normalization::PerCoupling] {
                let m = many_particle(p, sign, d, norm);
                out.push(finish(p, branch, norm, m, d));
            }
        }
    }
    Ok(out)
}

/// One branch of the large-`N` solution set with the small-γ discriminant
/// and the per-particle polarization normalization.
pub fn steady_state_large_n(p: &ModelParams, branch: Branch) -> Result<ClosedFormSolution> {
    p.validate()?;
    if p.g == 0.0 || matches!(branch, Branch::Single) {
        return Err(Error::Unsupported("large-N limit needs g > 0 and a ± branch".into()));
    }
    let ModelParams { omega0: w0, omega: w, g, gamma, .. } = *p;
    let nn = p.n_spins as f64;
    let g2 = g * g;
    let ng2 = nn * g2;
    let w0g = p.derived().omega0_gamma;
    let big_w = w * w0g;
    let d = (big_w - 4.0 * ng2).abs();
    let sign = if matches!(branch, Branch::Plus) { 1.0 } else { -1.0 };

    let minus = sign * d - 4.0 * ng2 - big_w;
    let plus = sign * d + 4.0 * ng2 - big_w;

    let moments = MomentVector {
        sz: minus / (8.0 * ng2),
        n: nn * w0 / (16.0 * nn * w * g2) * plus,
        r: nn * w0 / (16.0 * nn * w * g2) * plus,
        s: 0.0,
        qx: -w0 / (8.0 * ng2.powf(1.5)) * plus,
        px: 0.0,
        qy: gamma / (16.0 * ng2.powf(1.5)) * plus,
        py: -g / w0,
        cxx: w * w0 / (16.0 * nn * nn * g2 * g2) * plus,
        cxy: -gamma * w / (32.0 * nn * nn * g2 * g2) * plus,
        cyy: w * gamma * gamma / (64.0 * w0 * nn * nn * g2 * g2) * plus,
        czz: (-sign * d * (4.0 * ng2 + big_w) + 16.0 * ng2 * ng2 + big_w * big_w)
            / (32.0 * nn * nn * g2 * g2),
    };
    let residual = f64::NAN; // asymptotic set; not a finite-N fixed point
    Ok(ClosedFormSolution {
        branch,
        normalization: Normalization::PerParticle,
        physical: is_physical(&moments),
        consistent: false,
        moments,
        discriminant: d,
        residual,
    })
}

/// The thermodynamic-limit branch selected by physicality, with ties broken
/// toward the branch continuous with the `g → 0` normal phase (the `+`
/// branch: it reproduces `⟨σ̂_z⟩ = −1`, `⟨n̂⟩ = 0` below the critical
/// coupling and rises smoothly above it).
pub fn large_n_physical_branch(p: &ModelParams) -> Result<ClosedFormSolution> {
    let plus = steady_state_large_n(p, Branch::Plus)?;
    if plus.physical {
        return Ok(plus);
    }
    let minus = steady_state_large_n(p, Branch::Minus)?;
    if minus.physical {
        return Ok(minus);
    }
    Err(Error::NoRoot("neither large-N branch is physical".into()))
}
