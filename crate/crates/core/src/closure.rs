//! Pair-closure relations and the two expanded forms of the
//! total-population rate.
//!
//! The lattice relations
//!
//! ```text
//! gamma N_p = xi_p N_pp - lambda1 N_pd
//! gamma N_d = xi_d N_dd + lambda2 nu N_dp
//! ```
//!
//! are used to eliminate cross and predator pair counts. Both expanded
//! forms are evaluated exactly as written, including any algebra slips;
//! disagreements are surfaced by [`form_consistency_report`] and
//! [`closure_residuals`], never corrected.

use std::io::Write;

use crate::error::{RateForm, Result};
use crate::format::fmt_sig;
use crate::model::{InteractionParams, PairCounts, PopulationState};

/// Mass-action pair densities: `N_pp = N_p²`, `N_dd = N_d²`, `N_pd = N_p N_d`.
pub fn pair_counts_mass_action(state: &PopulationState) -> PairCounts {
    let (np, nd) = (state.n_p(), state.n_d());
    PairCounts {
        n_pp: np * np,
        n_dd: nd * nd,
        n_pd: np * nd,
    }
}

/// Cross pairs from the prey relation: `(xi_p/lambda1) N_pp - (gamma/lambda1) N_p`.
pub fn n_dp_from_prey(n_p: f64, n_pp: f64, params: &InteractionParams) -> Result<f64> {
    if params.lambda1 == 0.0 {
        return Err(crate::Error::SingularForm {
            form: RateForm::Prey,
            zero: vec![crate::Denominator::Lambda1],
        });
    }
    let g = params.gamma_f64();
    Ok(params.xi_p / params.lambda1 * n_pp - g / params.lambda1 * n_p)
}

/// Predator pairs expressed through prey quantities:
/// `(gamma/xi_d) N_T - (gamma/xi_d)(1 + lambda2 nu/lambda1) N_p - (lambda2 nu xi_p)/(lambda1 xi_d) N_pp`.
///
/// The `+` inside the second term is kept as written; substituting back into
/// the predator relation leaves a residual of `-2 gamma (lambda2 nu/lambda1) N_p`
/// (see [`closure_residuals`]).
pub fn n_dd_from_prey(n_p: f64, n_pp: f64, n_t: f64, params: &InteractionParams) -> Result<f64> {
    params.require_form(RateForm::Prey)?;
    let g = params.gamma_f64();
    let l2nu = params.lambda2 * params.nu;
    Ok(g / params.xi_d * n_t
        - g / params.xi_d * (1.0 + l2nu / params.lambda1) * n_p
        - l2nu * params.xi_p / (params.lambda1 * params.xi_d) * n_pp)
}

/// Coefficients of an expanded rate `total * N_T + role * N + pair * N_pair`,
/// where `N`/`N_pair` are prey or predator quantities depending on the form.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateCoefficients {
    pub total: f64,
    pub role: f64,
    pub pair: f64,
}

impl RateCoefficients {
    #[inline]
    pub fn eval(&self, n: f64, n_pair: f64, n_t: f64) -> f64 {
        self.total * n_t + self.role * n + self.pair * n_pair
    }
}

/// Prey-form coefficients (requires `lambda1 != 0`, `xi_d != 0`).
pub fn prey_form_coefficients(params: &InteractionParams) -> Result<RateCoefficients> {
    params.require_form(RateForm::Prey)?;
    let p = params;
    let g = p.gamma_f64();
    let l2nu = p.lambda2 * p.nu;
    let total = p.eps_d + g * p.alpha_dd / (p.beta_p * p.xi_d);
    let role = (p.eps_p - p.eps_d)
        + g / p.beta_p * (2.0 * p.alpha_pd / p.lambda1 - p.alpha_dd / p.xi_d * (1.0 - l2nu / p.lambda1));
    let pair =
        -(p.xi_p / (p.beta_p * p.lambda1) * (2.0 * p.alpha_pd + p.alpha_dd * l2nu / p.xi_d) - p.alpha_pp / p.beta_p);
    Ok(RateCoefficients { total, role, pair })
}

/// Predator-form coefficients (requires `lambda2 nu != 0`, `xi_p != 0`).
pub fn predator_form_coefficients(params: &InteractionParams) -> Result<RateCoefficients> {
    params.require_form(RateForm::Predator)?;
    let p = params;
    let g = p.gamma_f64();
    let l2nu = p.lambda2 * p.nu;
    let total = p.eps_p + g * p.alpha_pp / (p.beta_d * p.xi_p);
    let role =
        (p.eps_d - p.eps_p) + g / p.beta_d * (p.alpha_pp / p.xi_p * (p.lambda1 / l2nu - 1.0) - 2.0 * p.alpha_pd / l2nu);
    let pair = (p.alpha_dd + p.xi_d / l2nu * (2.0 * p.alpha_pd - p.alpha_pp * p.lambda1 / p.xi_p)) / p.beta_d;
    Ok(RateCoefficients { total, role, pair })
}

/// Total-population rate written in prey quantities.
pub fn psi_prey_form(n_p: f64, n_pp: f64, n_t: f64, params: &InteractionParams) -> Result<f64> {
    Ok(prey_form_coefficients(params)?.eval(n_p, n_pp, n_t))
}

/// Total-population rate written in predator quantities.
pub fn psi_predator_form(n_d: f64, n_dd: f64, n_t: f64, params: &InteractionParams) -> Result<f64> {
    Ok(predator_form_coefficients(params)?.eval(n_d, n_dd, n_t))
}

/// How far the derived pair counts are from satisfying the lattice relations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClosureResiduals {
    /// `gamma N_p - (xi_p N_pp - lambda1 N_dp)`.
    pub prey: f64,
    /// `gamma N_d - (xi_d N_dd + lambda2 nu N_dp)`.
    pub predator: f64,
}

pub fn closure_residuals(n_p: f64, n_pp: f64, n_t: f64, params: &InteractionParams) -> Result<ClosureResiduals> {
    let n_dp = n_dp_from_prey(n_p, n_pp, params)?;
    let n_dd = n_dd_from_prey(n_p, n_pp, n_t, params)?;
    let g = params.gamma_f64();
    let n_d = n_t - n_p;
    Ok(ClosureResiduals {
        prey: g * n_p - (params.xi_p * n_pp - params.lambda1 * n_dp),
        predator: g * n_d - (params.xi_d * n_dd + params.lambda2 * params.nu * n_dp),
    })
}

/// One row of the prey-form vs predator-form comparison.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FormConsistency {
    pub n_p: f64,
    pub n_d: f64,
    pub psi_prey: f64,
    pub psi_pred: f64,
    pub abs_diff: f64,
    pub rel_diff: f64,
}

/// Relative difference `|a - b| / max(|a|, |b|)`, zero when both vanish.
pub fn relative_difference(a: f64, b: f64) -> f64 {
    let scale = a.abs().max(b.abs());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).abs() / scale
    }
}

/// Evaluates both expanded forms on one state. Prey pairs are mass-action
/// products; predator pairs come from [`n_dd_from_prey`]. Agreement is
/// measured, not asserted.
pub fn form_consistency_report(state: &PopulationState, params: &InteractionParams) -> Result<FormConsistency> {
    params.require_form(RateForm::Prey)?;
    params.require_form(RateForm::Predator)?;
    let pairs = pair_counts_mass_action(state);
    let n_dd = n_dd_from_prey(state.n_p(), pairs.n_pp, state.n_t(), params)?;
    let psi_prey = psi_prey_form(state.n_p(), pairs.n_pp, state.n_t(), params)?;
    let psi_pred = psi_predator_form(state.n_d(), n_dd, state.n_t(), params)?;
    Ok(FormConsistency {
        n_p: state.n_p(),
        n_d: state.n_d(),
        psi_prey,
        psi_pred,
        abs_diff: (psi_prey - psi_pred).abs(),
        rel_diff: relative_difference(psi_prey, psi_pred),
    })
}

/// `n_p,n_d,psi_prey,psi_pred,abs_diff,rel_diff`.
pub fn write_consistency_csv<W: Write>(mut w: W, rows: &[FormConsistency]) -> Result<()> {
    writeln!(w, "n_p,n_d,psi_prey,psi_pred,abs_diff,rel_diff")?;
    for r in rows {
        writeln!(
            w,
            "{},{},{},{},{},{}",
            fmt_sig(r.n_p),
            fmt_sig(r.n_d),
            fmt_sig(r.psi_prey),
            fmt_sig(r.psi_pred),
            fmt_sig(r.abs_diff),
            fmt_sig(r.rel_diff)
        )?;
    }
    Ok(())
}
