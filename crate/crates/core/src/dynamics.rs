//! Generalized Lotka-Volterra right-hand side, the two-role
//! total-population rate, a fixed-step RK4 integrator and the classical
//! first integral of the two-species system.

use std::io::Write;

use crate::error::{Error, Result};
use crate::format::fmt_sig;
use crate::model::{InteractionParams, PopulationState, SpeciesSet};

/// Populations below `-NEGATIVE_TOLERANCE` abort an integration.
pub const NEGATIVE_TOLERANCE: f64 = 1e-12;

/// `rate_i = eps_i N_i + (1/beta_i) sum_j alpha(j, i) N_j N_i`, summed over
/// the `kappa` neighbours of `i`.
pub fn lv_rhs(populations: &[f64], system: &SpeciesSet) -> Result<Vec<f64>> {
    if populations.len() != system.count() {
        return Err(Error::DimensionMismatch {
            expected: system.count(),
            actual: populations.len(),
        });
    }
    let mut rates = vec![0.0; populations.len()];
    rhs_into(populations, system, &mut rates);
    Ok(rates)
}

fn rhs_into(n: &[f64], system: &SpeciesSet, out: &mut [f64]) {
    let eps = system.eps();
    let beta = system.beta();
    for (i, rate) in out.iter_mut().enumerate() {
        let encounters: f64 = system
            .neighbors(i)
            .iter()
            .map(|&j| system.alpha(j, i) * n[j] * n[i])
            .sum();
        *rate = eps[i] * n[i] + encounters / beta[i];
    }
}

/// Rate of change of the total population in the two-role model,
/// `eps_p N_p + eps_d N_d + (alpha_pp N_p² + alpha_dd N_d² - 2 alpha_pd N_p N_d) / beta_p`.
///
/// The sum over the coordination number that encloses this expression is
/// notational; no factor of `gamma` is applied.
pub fn total_population_rate(state: &PopulationState, params: &InteractionParams) -> f64 {
    let (np, nd) = (state.n_p(), state.n_d());
    params.eps_p * np
        + params.eps_d * nd
        + (params.alpha_pp * np * np + params.alpha_dd * nd * nd - 2.0 * params.alpha_pd * np * nd) / params.beta_p
}

/// Sampled solution of a species system.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<Vec<f64>>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Population of one species at every sample.
    pub fn column(&self, species: usize) -> Vec<f64> {
        self.states.iter().map(|s| s[species]).collect()
    }

    /// Sum over species at every sample.
    pub fn totals(&self) -> Vec<f64> {
        self.states.iter().map(|s| s.iter().sum()).collect()
    }

    pub fn last(&self) -> Option<(f64, &[f64])> {
        Some((*self.times.last()?, self.states.last()?.as_slice()))
    }

    /// `t,N_1,...,N_k`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        let k = self.states.first().map_or(0, Vec::len);
        let mut header = String::from("t");
        for i in 1..=k {
            header.push_str(&format!(",N_{i}"));
        }
        writeln!(w, "{header}")?;
        for (t, s) in self.times.iter().zip(&self.states) {
            let mut line = fmt_sig(*t);
            for x in s {
                line.push(',');
                line.push_str(&fmt_sig(*x));
            }
            writeln!(w, "{line}")?;
        }
        Ok(())
    }

    /// `t,N_p,N_d,N_T` for a two-role trajectory.
    pub fn write_two_role_csv<W: Write>(&self, mut w: W) -> Result<()> {
        if self.states.first().is_some_and(|s| s.len() != 2) {
            return Err(Error::DimensionMismatch {
                expected: 2,
                actual: self.states[0].len(),
            });
        }
        writeln!(w, "t,N_p,N_d,N_T")?;
        for (t, s) in self.times.iter().zip(&self.states) {
            writeln!(
                w,
                "{},{},{},{}",
                fmt_sig(*t),
                fmt_sig(s[0]),
                fmt_sig(s[1]),
                fmt_sig(s[0] + s[1])
            )?;
        }
        Ok(())
    }
}

fn rk4_step(system: &SpeciesSet, y: &[f64], h: f64, scratch: &mut Rk4Scratch) -> Vec<f64> {
    let n = y.len();
    let Rk4Scratch { k1, k2, k3, k4, tmp } = scratch;
    rhs_into(y, system, k1);
    for i in 0..n {
        tmp[i] = y[i] + 0.5 * h * k1[i];
    }
    rhs_into(tmp, system, k2);
    for i in 0..n {
        tmp[i] = y[i] + 0.5 * h * k2[i];
    }
    rhs_into(tmp, system, k3);
    for i in 0..n {
        tmp[i] = y[i] + h * k3[i];
    }
    rhs_into(tmp, system, k4);
    (0..n)
        .map(|i| y[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]))
        .collect()
}

struct Rk4Scratch {
    k1: Vec<f64>,
    k2: Vec<f64>,
    k3: Vec<f64>,
    k4: Vec<f64>,
    tmp: Vec<f64>,
}

impl Rk4Scratch {
    fn new(n: usize) -> Self {
        Self {
            k1: vec![0.0; n],
            k2: vec![0.0; n],
            k3: vec![0.0; n],
            k4: vec![0.0; n],
            tmp: vec![0.0; n],
        }
    }
}

fn check_state(t: f64, y: &[f64]) -> Result<()> {
    if y.iter().any(|x| !x.is_finite()) {
        return Err(Error::NonFiniteState { t });
    }
    if let Some((species, &value)) = y.iter().enumerate().find(|(_, &x)| x < -NEGATIVE_TOLERANCE) {
        return Err(Error::NegativePopulation { t, species, value });
    }
    Ok(())
}

/// Classical fourth-order Runge-Kutta with a fixed step, sampled at every
/// step from `t = 0` to `t_end`. The final step is shortened so the last
/// sample lands on `t_end`. Negative excursions are reported, never clamped.
pub fn integrate(system: &SpeciesSet, initial: &[f64], t_end: f64, step: f64) -> Result<Trajectory> {
    if !(step > 0.0 && step.is_finite()) {
        return Err(Error::InvalidArgument(format!("step must be positive, got {step}")));
    }
    if !(t_end > 0.0 && t_end.is_finite()) {
        return Err(Error::InvalidArgument(format!("t_end must be positive, got {t_end}")));
    }
    if initial.len() != system.count() {
        return Err(Error::DimensionMismatch {
            expected: system.count(),
            actual: initial.len(),
        });
    }
    if let Some((species, &value)) = initial.iter().enumerate().find(|(_, &x)| !(x >= 0.0)) {
        return Err(Error::NegativePopulation { t: 0.0, species, value });
    }
    check_state(0.0, initial)?;

    // Snap to whole steps when t_end/step is an integer up to rounding.
    let ratio = t_end / step;
    let steps = if (ratio - ratio.round()).abs() < 1e-9 * ratio.max(1.0) {
        ratio.round() as usize
    } else {
        ratio.ceil() as usize
    };

    let mut times = Vec::with_capacity(steps + 1);
    let mut states = Vec::with_capacity(steps + 1);
    times.push(0.0);
    states.push(initial.to_vec());

    let mut scratch = Rk4Scratch::new(initial.len());
    let mut y = initial.to_vec();
    let mut t_prev = 0.0;
    for k in 1..=steps {
        let t = if k == steps { t_end } else { k as f64 * step };
        let h = t - t_prev;
        y = rk4_step(system, &y, h, &mut scratch);
        check_state(t, &y)?;
        times.push(t);
        states.push(y.clone());
        t_prev = t;
    }
    Ok(Trajectory { times, states })
}

/// First integral of the classic two-species system
/// `x' = a x - b x y`, `y' = -c y + d x y`:
/// `V = d x - c ln x + b y - a ln y`.
///
/// Species 0 must be the prey (`eps > 0`), species 1 the predator
/// (`eps < 0`), with no self-interaction and predators harming prey.
pub fn conserved_quantity(state: [f64; 2], system: &SpeciesSet) -> Result<f64> {
    let (a, b, c, d) = classic_coefficients(system)?;
    for (species, &value) in state.iter().enumerate() {
        if !(value > 0.0) {
            return Err(Error::NonPositivePopulation { species, value });
        }
    }
    let [x, y] = state;
    Ok(d * x - c * x.ln() + b * y - a * y.ln())
}

/// Interior fixed point `(c/d, a/b)` of the classic two-species system.
pub fn classic_fixed_point(system: &SpeciesSet) -> Result<[f64; 2]> {
    let (a, b, c, d) = classic_coefficients(system)?;
    Ok([c / d, a / b])
}

fn classic_coefficients(system: &SpeciesSet) -> Result<(f64, f64, f64, f64)> {
    if system.count() != 2 {
        return Err(Error::NotClassicForm("exactly two species required"));
    }
    if system.kappa() != 2 {
        return Err(Error::NotClassicForm("both species must interact (kappa = 2)"));
    }
    if system.alpha(0, 0) != 0.0 || system.alpha(1, 1) != 0.0 {
        return Err(Error::NotClassicForm("self-interaction must be zero"));
    }
    let a = system.eps()[0];
    let c = -system.eps()[1];
    let b = -system.alpha(1, 0) / system.beta()[0];
    let d = system.alpha(0, 1) / system.beta()[1];
    if !(a > 0.0 && c > 0.0) {
        return Err(Error::NotClassicForm("prey must grow and predator decay"));
    }
    if !(b > 0.0 && d > 0.0) {
        return Err(Error::NotClassicForm("predator must reduce prey"));
    }
    Ok((a, b, c, d))
}
