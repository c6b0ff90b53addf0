//! Lattice mean-field treatment of prey-predator associations.
//!
//! The crate covers generalized Lotka-Volterra dynamics with a fixed-step
//! RK4 integrator, the pair-closure relations that eliminate pair counts
//! from the total-population rate, Weiss-style mean-field estimation, the
//! Bragg-Williams long-range-order energy `psi(L)`, and a deterministic
//! parallel sweep engine that emits plot-ready CSV.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bragg_williams;
pub mod closure;
pub mod dynamics;
pub mod error;
pub mod format;
pub mod meanfield;
pub mod model;
pub mod sweep;

pub use bragg_williams::{
    bw_coefficients, bw_coefficients_admissible, bw_coefficients_predator, bw_extremum, bw_roots, bw_singular_terms,
    bw_vs_substitution_check, order_to_populations, psi_bw, DomainMode, Extremum, OrderParameter, RootReport,
    SubstitutionReport,
};
pub use closure::{
    closure_residuals, form_consistency_report, n_dd_from_prey, n_dp_from_prey, pair_counts_mass_action,
    psi_predator_form, psi_prey_form, FormConsistency,
};
pub use dynamics::{conserved_quantity, integrate, lv_rhs, total_population_rate, Trajectory};
pub use error::{Denominator, Error, RateForm, Result};
pub use meanfield::{
    estimate_omega, frozen_field_solution, mean_field_rate, mean_field_summary, t_eff, FrozenField, MeanFieldSummary,
    OmegaEstimate,
};
pub use model::{
    bundled_scenarios, load_scenario_table, serengeti_constants, validate_params, GlobalConstants, InteractionParams,
    PairCounts, PopulationState, QuadraticForm, SpeciesSet, ValidatedParams,
};
pub use sweep::{growth_rates_from_gestation, run_sweep, LRange, Pairing, Preset, SweepSpec, SweepTable};
