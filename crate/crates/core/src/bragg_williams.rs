//! Long-range-order energy `psi(L)`.
//!
//! With `N_p / N_T = (L + 1)/2` and no short-range order beyond what `L`
//! implies, the prey pair density is `N_pp = N_T gamma (L + 1)² / 8`, and the
//! total-population rate becomes `N_T (a L² + b L + c)`.

use std::io::Write;

use crate::closure::{predator_form_coefficients, psi_prey_form, relative_difference};
use crate::error::{Denominator, Error, RateForm, Result};
use crate::format::fmt_sig;
use crate::model::{InteractionParams, QuadraticForm};

/// Relative deviation above which the closed form and the substitution
/// route are reported as disagreeing.
pub const SUBSTITUTION_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DomainMode {
    /// `-1 <= L <= 1`.
    Theoretical,
    /// Any finite `L`.
    #[default]
    Extended,
}

impl std::str::FromStr for DomainMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "theoretical" => Ok(Self::Theoretical),
            "extended" => Ok(Self::Extended),
            other => Err(Error::InvalidArgument(format!(
                "domain must be `theoretical` or `extended`, got `{other}`"
            ))),
        }
    }
}

/// Long-range order `l` with the short-range order it implies.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrderParameter {
    l: f64,
    sigma: f64,
    domain: DomainMode,
}

impl OrderParameter {
    pub fn new(l: f64, domain: DomainMode) -> Result<Self> {
        if !l.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "order parameter must be finite, got {l}"
            )));
        }
        if domain == DomainMode::Theoretical && !(-1.0..=1.0).contains(&l) {
            return Err(Error::RangeViolation {
                field: "L",
                value: l,
                constraint: "-1 <= L <= 1 in theoretical mode",
            });
        }
        // (sigma + 1)/2 = ((L + 1)/2)²
        let sigma = 0.5 * (l + 1.0) * (l + 1.0) - 1.0;
        Ok(Self { l, sigma, domain })
    }

    pub fn l(&self) -> f64 {
        self.l
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn domain(&self) -> DomainMode {
        self.domain
    }

    pub fn exceeds_theoretical(&self) -> bool {
        !(-1.0..=1.0).contains(&self.l)
    }
}

/// `(n_p, n_pp)` for order `l`: `n_p = n_t (l + 1)/2`,
/// `n_pp = n_t [gamma l²/8 + (gamma/4)(l + 1) - gamma/8]`.
pub fn order_to_populations(l: f64, n_t: f64, gamma: u32) -> (f64, f64) {
    let g = f64::from(gamma);
    let n_p = n_t * (l + 1.0) / 2.0;
    let n_pp = n_t * (g * l * l / 8.0 + g / 4.0 * (l + 1.0) - g / 8.0);
    (n_p, n_pp)
}

/// Every zero denominator in the closed-form grouping, including the
/// removable `lambda2 nu`.
pub fn bw_singular_terms(params: &InteractionParams) -> Vec<Denominator> {
    let mut zero = Vec::new();
    if params.lambda1 == 0.0 {
        zero.push(Denominator::Lambda1);
    }
    if params.xi_d == 0.0 {
        zero.push(Denominator::XiD);
    }
    if params.lambda2 * params.nu == 0.0 {
        zero.push(Denominator::Lambda2Nu);
    }
    zero
}

/// Closed-form per-capita coefficients of `psi(L)`, derived from the prey
/// form.
///
/// The `L` coefficient contains `(alpha_dd lambda2 nu / 2)(1 - lambda1/(lambda2 nu) - ...)`;
/// the `lambda2 nu` division cancels, so it is evaluated multiplied out and
/// `lambda2 nu = 0` is not an error. `lambda1 = 0` or `xi_d = 0` is.
pub fn bw_coefficients(params: &InteractionParams) -> Result<QuadraticForm> {
    params.require_form(RateForm::Prey)?;
    let p = params;
    let g = p.gamma_f64();
    let l2nu = p.lambda2 * p.nu;
    let (l1, xp, xd) = (p.lambda1, p.xi_p, p.xi_d);

    let a = g / p.beta_p * (p.alpha_pp / 8.0 - xp / l1 * (p.alpha_pd / 4.0 - p.alpha_dd * l2nu / (8.0 * xd)));

    let dd_term = p.alpha_dd * l2nu / 2.0 * (1.0 - xp / 2.0) - p.alpha_dd * l1 / 2.0;
    let b = (p.eps_p - p.eps_d) / 2.0
        + g / (p.beta_p * l1) * (p.alpha_pd * (1.0 - xp / 2.0) + (dd_term + p.alpha_pp * l1 * xd / 4.0) / xd);

    let c = ((p.eps_p - p.eps_d) / 2.0 + p.eps_d)
        + g / p.beta_p
            * (3.0 * p.alpha_pp / 8.0
                + p.alpha_dd / xd * (0.5 + l2nu / (2.0 * l1) - xp * l2nu / l1)
                + p.alpha_pd / l1 * (1.0 - xp / 4.0));

    Ok(QuadraticForm { a, b, c })
}

/// Quadratic obtained from the predator form with the mirrored relations
/// `N_d = N_T (1 - L)/2`, `N_dd = N_T gamma (1 - L)²/8`.
pub fn bw_coefficients_predator(params: &InteractionParams) -> Result<QuadraticForm> {
    let k = predator_form_coefficients(params)?;
    let g = params.gamma_f64();
    Ok(QuadraticForm {
        a: k.pair * g / 8.0,
        b: -k.role / 2.0 - k.pair * g / 4.0,
        c: k.total + k.role / 2.0 + k.pair * g / 8.0,
    })
}

/// Prey-form closed form when admissible, otherwise the predator-form
/// quadratic. Fails only when both forms are singular.
pub fn bw_coefficients_admissible(params: &InteractionParams) -> Result<(RateForm, QuadraticForm)> {
    match bw_coefficients(params) {
        Ok(q) => Ok((RateForm::Prey, q)),
        Err(prey_err) => match bw_coefficients_predator(params) {
            Ok(q) => Ok((RateForm::Predator, q)),
            Err(_) => Err(prey_err),
        },
    }
}

#[inline]
pub fn psi_bw(l: f64, n_t: f64, form: &QuadraticForm) -> f64 {
    form.psi(l, n_t)
}

/// Zeros of `a L² + b L + c`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RootReport {
    /// `a = b = 0`: no root unless the polynomial vanishes identically.
    Degenerate {
        identically_zero: bool,
    },
    Linear {
        root: f64,
    },
    RealDistinct {
        discriminant: f64,
        roots: [f64; 2],
    },
    RealDouble {
        discriminant: f64,
        root: f64,
    },
    ComplexPair {
        discriminant: f64,
        re: f64,
        im: f64,
    },
}

impl RootReport {
    pub fn kind(&self) -> &'static str {
        match self {
            RootReport::Degenerate { .. } => "degenerate",
            RootReport::Linear { .. } => "linear",
            RootReport::RealDistinct { .. } => "real-distinct",
            RootReport::RealDouble { .. } => "real-double",
            RootReport::ComplexPair { .. } => "complex-conjugate",
        }
    }

    pub fn is_complex(&self) -> bool {
        matches!(self, RootReport::ComplexPair { .. })
    }

    pub fn discriminant(&self) -> Option<f64> {
        match *self {
            RootReport::RealDistinct { discriminant, .. }
            | RootReport::RealDouble { discriminant, .. }
            | RootReport::ComplexPair { discriminant, .. } => Some(discriminant),
            _ => None,
        }
    }

    pub fn real_roots(&self) -> Vec<f64> {
        match *self {
            RootReport::Linear { root } | RootReport::RealDouble { root, .. } => vec![root],
            RootReport::RealDistinct { roots, .. } => roots.to_vec(),
            _ => Vec::new(),
        }
    }

    /// Roots as text: `r1;r2` for real roots, `re+imi;re-imi` for a complex pair.
    pub fn roots_text(&self) -> String {
        match *self {
            RootReport::ComplexPair { re, im, .. } => {
                format!("{}+{}i;{}-{}i", fmt_sig(re), fmt_sig(im), fmt_sig(re), fmt_sig(im))
            }
            _ => self
                .real_roots()
                .iter()
                .map(|r| fmt_sig(*r))
                .collect::<Vec<_>>()
                .join(";"),
        }
    }
}

pub fn bw_roots(form: &QuadraticForm) -> RootReport {
    let QuadraticForm { a, b, c } = *form;
    if a == 0.0 {
        if b == 0.0 {
            return RootReport::Degenerate {
                identically_zero: c == 0.0,
            };
        }
        return RootReport::Linear { root: -c / b };
    }
    let discriminant = b * b - 4.0 * a * c;
    if discriminant > 0.0 {
        // q avoids cancellation between -b and the square root.
        let q = -0.5 * (b + discriminant.sqrt().copysign(b));
        let r0 = q / a;
        let r1 = if q != 0.0 { c / q } else { -r0 };
        RootReport::RealDistinct {
            discriminant,
            roots: [r0.min(r1), r0.max(r1)],
        }
    } else if discriminant == 0.0 {
        RootReport::RealDouble {
            discriminant,
            root: -b / (2.0 * a),
        }
    } else {
        RootReport::ComplexPair {
            discriminant,
            re: -b / (2.0 * a),
            im: (-discriminant).sqrt() / (2.0 * a).abs(),
        }
    }
}

/// Interior extremum of `psi` in `L`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Extremum {
    /// `a < 0`.
    Maximum { l: f64, psi: f64 },
    /// `a > 0`; `psi` is unbounded above.
    Minimum { l: f64, psi: f64 },
    /// `a = 0`: no interior extremum.
    Linear,
}

impl Extremum {
    pub fn unbounded_above(&self) -> bool {
        !matches!(self, Extremum::Maximum { .. })
    }
}

pub fn bw_extremum(form: &QuadraticForm, n_t: f64) -> Extremum {
    if form.a == 0.0 {
        return Extremum::Linear;
    }
    let l = -form.b / (2.0 * form.a);
    let psi = n_t * (form.c - form.b * form.b / (4.0 * form.a));
    if form.a < 0.0 {
        Extremum::Maximum { l, psi }
    } else {
        Extremum::Minimum { l, psi }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SubstitutionRow {
    pub l: f64,
    pub closed_form: f64,
    pub substitution: f64,
    pub abs_diff: f64,
}

/// Closed form against direct substitution into the prey-form rate.
#[derive(Debug, Clone, PartialEq)]
pub struct SubstitutionReport {
    pub n_t: f64,
    pub rows: Vec<SubstitutionRow>,
    pub max_abs: f64,
    pub max_rel: f64,
    pub closed: QuadraticForm,
    /// Least-squares quadratic through the substitution route, per capita.
    /// `None` when `n_t = 0` or the grid has fewer than three points.
    pub fitted: Option<QuadraticForm>,
}

impl SubstitutionReport {
    pub fn disagrees(&self) -> bool {
        self.max_rel > SUBSTITUTION_TOLERANCE
    }

    /// `fitted - closed`, coefficient by coefficient.
    pub fn deltas(&self) -> Option<QuadraticForm> {
        self.fitted.map(|f| QuadraticForm {
            a: f.a - self.closed.a,
            b: f.b - self.closed.b,
            c: f.c - self.closed.c,
        })
    }

    /// `L,psi_closed_form,psi_substitution,abs_diff`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "L,psi_closed_form,psi_substitution,abs_diff")?;
        for r in &self.rows {
            writeln!(
                w,
                "{},{},{},{}",
                fmt_sig(r.l),
                fmt_sig(r.closed_form),
                fmt_sig(r.substitution),
                fmt_sig(r.abs_diff)
            )?;
        }
        Ok(())
    }

    /// `#`-prefixed `key = value` lines.
    pub fn write_summary<W: Write>(&self, mut w: W) -> Result<()> {
        let verdict = if self.disagrees() { "disagree" } else { "agree" };
        writeln!(w, "# n_t = {}", fmt_sig(self.n_t))?;
        writeln!(w, "# max_abs_diff = {}", fmt_sig(self.max_abs))?;
        writeln!(w, "# max_rel_diff = {}", fmt_sig(self.max_rel))?;
        writeln!(w, "# tolerance = {}", fmt_sig(SUBSTITUTION_TOLERANCE))?;
        writeln!(w, "# verdict = {verdict}")?;
        let q = self.closed;
        writeln!(
            w,
            "# closed_form = {}, {}, {}",
            fmt_sig(q.a),
            fmt_sig(q.b),
            fmt_sig(q.c)
        )?;
        if let (Some(f), Some(d)) = (self.fitted, self.deltas()) {
            writeln!(
                w,
                "# substitution_fit = {}, {}, {}",
                fmt_sig(f.a),
                fmt_sig(f.b),
                fmt_sig(f.c)
            )?;
            writeln!(w, "# delta_a = {}", fmt_sig(d.a))?;
            writeln!(w, "# delta_b = {}", fmt_sig(d.b))?;
            writeln!(w, "# delta_c = {}", fmt_sig(d.c))?;
        }
        Ok(())
    }
}

/// Evaluates `psi` on `l_grid` two ways: the closed-form coefficients, and
/// the prey-form rate fed with `order_to_populations`. Reports pointwise
/// deviations and the per-coefficient deltas of a quadratic fit.
pub fn bw_vs_substitution_check(params: &InteractionParams, l_grid: &[f64], n_t: f64) -> Result<SubstitutionReport> {
    let closed = bw_coefficients(params)?;
    let mut rows = Vec::with_capacity(l_grid.len());
    let mut max_abs = 0.0f64;
    let mut max_rel = 0.0f64;
    for &l in l_grid {
        let route_a = psi_bw(l, n_t, &closed);
        let (n_p, n_pp) = order_to_populations(l, n_t, params.gamma);
        let route_b = psi_prey_form(n_p, n_pp, n_t, params)?;
        let abs_diff = (route_a - route_b).abs();
        max_abs = max_abs.max(abs_diff);
        max_rel = max_rel.max(relative_difference(route_a, route_b));
        rows.push(SubstitutionRow {
            l,
            closed_form: route_a,
            substitution: route_b,
            abs_diff,
        });
    }
    let fitted = if n_t != 0.0 {
        let ys: Vec<f64> = rows.iter().map(|r| r.substitution / n_t).collect();
        fit_quadratic(l_grid, &ys)
    } else {
        None
    };
    Ok(SubstitutionReport {
        n_t,
        rows,
        max_abs,
        max_rel,
        closed,
        fitted,
    })
}

/// Least-squares `a x² + b x + c` through the points, on centred and scaled
/// abscissae.
pub fn fit_quadratic(xs: &[f64], ys: &[f64]) -> Option<QuadraticForm> {
    if xs.len() != ys.len() || xs.len() < 3 {
        return None;
    }
    let lo = xs.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mid = 0.5 * (lo + hi);
    let half = 0.5 * (hi - lo);
    if !(half > 0.0) {
        return None;
    }
    let mut m = [[0.0f64; 4]; 3];
    for (&x, &y) in xs.iter().zip(ys) {
        let u = (x - mid) / half;
        let basis = [u * u, u, 1.0];
        for r in 0..3 {
            for c in 0..3 {
                m[r][c] += basis[r] * basis[c];
            }
            m[r][3] += basis[r] * y;
        }
    }
    let [ua, ub, uc] = solve3(m)?;
    // p(u) with u = (x - mid)/half, expanded back into x.
    let a = ua / (half * half);
    let b = ub / half - 2.0 * mid * a;
    let c = uc - ub * mid / half + a * mid * mid;
    Some(QuadraticForm { a, b, c })
}

#[allow(clippy::needless_range_loop)]
fn solve3(mut m: [[f64; 4]; 3]) -> Option<[f64; 3]> {
    for col in 0..3 {
        let pivot = (col..3).max_by(|&i, &j| m[i][col].abs().total_cmp(&m[j][col].abs()))?;
        if m[pivot][col] == 0.0 {
            return None;
        }
        m.swap(col, pivot);
        for row in (col + 1)..3 {
            let f = m[row][col] / m[col][col];
            for k in col..4 {
                m[row][k] -= f * m[col][k];
            }
        }
    }
    let mut x = [0.0; 3];
    for row in (0..3).rev() {
        let tail: f64 = ((row + 1)..3).map(|k| m[row][k] * x[k]).sum();
        x[row] = (m[row][3] - tail) / m[row][row];
    }
    Some(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::bundled_scenarios;
    use proptest::prelude::*;

    fn row3() -> InteractionParams {
        bundled_scenarios()[2]
    }

    fn no_interaction() -> InteractionParams {
        let mut p = row3();
        p.alpha_pp = 0.0;
        p.alpha_dd = 0.0;
        p.alpha_pd = 0.0;
        p
    }

    /// Closed-form coefficients typed out with the grouping exactly as
    /// written, including the `lambda1/(lambda2 nu)` division.
    fn closed_form_by_hand(p: &InteractionParams) -> (f64, f64, f64) {
        let g = p.gamma as f64;
        let (ep, ed, bp) = (p.eps_p, p.eps_d, p.beta_p);
        let (app, add, apd) = (p.alpha_pp, p.alpha_dd, p.alpha_pd);
        let (l1, l2, nu, xp, xd) = (p.lambda1, p.lambda2, p.nu, p.xi_p, p.xi_d);
        let a = (g / bp) * (app / 8.0 - (xp / l1) * (apd / 4.0 - add * l2 * nu / (8.0 * xd)));
        let b = (ep - ed) / 2.0
            + (g / (bp * l1))
                * ((apd * (1.0 - xp / 2.0))
                    + (1.0 / xd) * ((add * l2 * nu / 2.0) * (1.0 - l1 / (l2 * nu) - xp / 2.0) + app * l1 * xd / 4.0));
        let c = ((ep - ed) / 2.0 + ed)
            + (g / bp)
                * (3.0 * app / 8.0
                    + (add / xd) * (1.0 / 2.0 + l2 * nu / (2.0 * l1) - xp * l2 * nu / l1)
                    + (apd / l1) * (1.0 - xp / 4.0));
        (a, b, c)
    }

    fn rel(a: f64, b: f64) -> f64 {
        relative_difference(a, b)
    }

    #[test]
    fn saturation_and_empty_lattice() {
        for g in 1..=5 {
            let (np, npp) = order_to_populations(1.0, 4.1, g);
            assert_eq!(np, 4.1);
            assert_eq!(npp, g as f64 * 4.1 / 2.0);
            assert_eq!(order_to_populations(-1.0, 4.1, g), (0.0, 0.0));
        }
    }

    #[test]
    fn disordered_lattice_hand_substitution() {
        let (np, npp) = order_to_populations(0.0, 4.1, 3);
        assert!((np - 2.05).abs() < 1e-15);
        assert!((npp - 1.5375).abs() < 1e-15);
    }

    #[test]
    fn order_parameter_domains() {
        assert!(OrderParameter::new(1.5, DomainMode::Theoretical).is_err());
        let o = OrderParameter::new(30.0, DomainMode::Extended).unwrap();
        assert!(o.exceeds_theoretical());
        let o = OrderParameter::new(1.0, DomainMode::Theoretical).unwrap();
        assert_eq!(o.sigma(), 1.0);
        assert_eq!(
            OrderParameter::new(-1.0, DomainMode::Theoretical).unwrap().sigma(),
            -1.0
        );
        assert!(OrderParameter::new(f64::NAN, DomainMode::Extended).is_err());
    }

    #[test]
    fn zero_interaction_coefficients() {
        let q = bw_coefficients(&no_interaction()).unwrap();
        assert_eq!(q.a, 0.0);
        assert!((q.b - 0.023).abs() < 1e-15);
        assert!((q.c - 0.317).abs() < 1e-15);
        let mut p = no_interaction();
        p.eps_d = p.eps_p;
        let q = bw_coefficients(&p).unwrap();
        assert_eq!((q.a, q.b, q.c), (0.0, 0.0, p.eps_p));
    }

    #[test]
    fn row_three_matches_grouping_as_written() {
        for g in 1..=5 {
            let p = row3().with_gamma(g);
            let q = bw_coefficients(&p).unwrap();
            let (a, b, c) = closed_form_by_hand(&p);
            assert!(rel(q.a, a) < 1e-12 && rel(q.b, b) < 1e-12 && rel(q.c, c) < 1e-12);
        }
        // frozen from an exact rational evaluation
        let q = bw_coefficients(&row3()).unwrap();
        assert!(rel(q.a, 30.204460966542747) < 1e-12);
        assert!(rel(q.b, -130.08852416356885) < 1e-12);
        assert!(rel(q.c, 368.5790817843866) < 1e-12);
    }

    #[test]
    fn singular_coefficients() {
        let last = bundled_scenarios()[4];
        match bw_coefficients(&last) {
            Err(Error::SingularForm { zero, .. }) => {
                assert_eq!(zero, vec![Denominator::Lambda1, Denominator::XiD])
            }
            other => panic!("{other:?}"),
        }
        assert_eq!(bw_singular_terms(&last), vec![Denominator::Lambda1, Denominator::XiD]);
        let first = bundled_scenarios()[0];
        assert_eq!(bw_singular_terms(&first), vec![Denominator::Lambda2Nu]);
        // removable: finite coefficients, and they match the grouping in the
        // limit lambda2 -> 0
        let q = bw_coefficients(&first).unwrap();
        let mut near = first;
        near.lambda2 = 1e-9;
        let (a, b, c) = closed_form_by_hand(&near);
        assert!((q.a - a).abs() < 1e-6 && (q.b - b).abs() < 1e-4 && (q.c - c).abs() < 1e-4);
    }

    #[test]
    fn admissible_form_selection() {
        let (f, _) = bw_coefficients_admissible(&bundled_scenarios()[0]).unwrap();
        assert_eq!(f, RateForm::Prey);
        let (f, _) = bw_coefficients_admissible(&bundled_scenarios()[4]).unwrap();
        assert_eq!(f, RateForm::Predator);
        let mut both = bundled_scenarios()[4];
        both.xi_p = 0.0;
        assert!(bw_coefficients_admissible(&both).is_err());
    }

    #[test]
    fn predator_quadratic_reproduces_predator_form() {
        let p = row3();
        let q = bw_coefficients_predator(&p).unwrap();
        for &l in &[-1.0, -0.3, 0.0, 0.5, 1.0, 7.0] {
            let n_t = 41.0;
            let n_d = n_t * (1.0 - l) / 2.0;
            let n_dd = n_t * 3.0 * (1.0 - l) * (1.0 - l) / 8.0;
            let direct = crate::closure::psi_predator_form(n_d, n_dd, n_t, &p).unwrap();
            assert!((psi_bw(l, n_t, &q) - direct).abs() <= 1e-10 * direct.abs().max(1.0));
        }
    }

    #[test]
    fn psi_evaluation() {
        let q = QuadraticForm::new(0.0, 0.023, 0.317);
        assert!((psi_bw(0.0, 4.1, &q) - 1.2997).abs() < 1e-14);
        assert_eq!(psi_bw(12.0, 0.0, &q), 0.0);
        let q = QuadraticForm::new(-2.0, 3.0, 1.0);
        let v = -q.b / (2.0 * q.a);
        let want = 5.0 * (q.c - q.b * q.b / (4.0 * q.a));
        assert!((psi_bw(v, 5.0, &q) - want).abs() < 1e-12);
    }

    #[test]
    fn root_classification() {
        match bw_roots(&QuadraticForm::new(1.0, 0.0, 1.0)) {
            RootReport::ComplexPair { re, im, discriminant } => {
                assert_eq!((re, im, discriminant), (0.0, 1.0, -4.0))
            }
            other => panic!("{other:?}"),
        }
        match bw_roots(&QuadraticForm::new(0.0, 0.023, 0.317)) {
            RootReport::Linear { root } => assert!((root + 13.782608695652174).abs() < 1e-12),
            other => panic!("{other:?}"),
        }
        assert!(matches!(
            bw_roots(&QuadraticForm::new(1.0, -2.0, 1.0)),
            RootReport::RealDouble { root, .. } if root == 1.0
        ));
        assert!(matches!(
            bw_roots(&QuadraticForm::new(1.0, -3.0, 2.0)),
            RootReport::RealDistinct { roots, .. } if roots == [1.0, 2.0]
        ));
        assert!(matches!(
            bw_roots(&QuadraticForm::new(0.0, 0.0, 0.0)),
            RootReport::Degenerate { identically_zero: true }
        ));
        assert!(matches!(
            bw_roots(&QuadraticForm::new(0.0, 0.0, 2.0)),
            RootReport::Degenerate {
                identically_zero: false
            }
        ));
    }

    #[test]
    fn extremum_cases() {
        assert_eq!(
            bw_extremum(&QuadraticForm::new(-1.0, 2.0, 0.0), 1.0),
            Extremum::Maximum { l: 1.0, psi: 1.0 }
        );
        assert_eq!(bw_extremum(&QuadraticForm::new(0.0, 3.0, 1.0), 1.0), Extremum::Linear);
        assert!(bw_extremum(&QuadraticForm::new(1.0, 0.0, 0.0), 1.0).unbounded_above());
    }

    #[test]
    fn row_three_vertex_matches_grid_scan() {
        let q = bw_coefficients(&row3()).unwrap();
        let n_t = 4.1;
        let ext = bw_extremum(&q, n_t);
        let step = 1e-3;
        let grid = (0..=100_000).map(|k| -50.0 + k as f64 * step);
        let Extremum::Minimum { l, psi } = ext else {
            panic!("row 3 opens upward: {ext:?}");
        };
        let (best_l, best_psi) = grid
            .map(|x| (x, psi_bw(x, n_t, &q)))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .unwrap();
        assert!((best_l - l).abs() <= step, "{best_l} vs {l}");
        assert!(best_psi >= psi - 1e-9);
    }

    #[test]
    fn zero_interaction_substitution_agrees() {
        let grid: Vec<f64> = (0..=200).map(|k| -1.0 + k as f64 * 0.01).collect();
        let r = bw_vs_substitution_check(&no_interaction(), &grid, 4.1).unwrap();
        assert!(r.max_rel < 1e-12, "{}", r.max_rel);
        assert!(!r.disagrees());
        let r = bw_vs_substitution_check(&row3(), &grid, 0.0).unwrap();
        assert_eq!(r.max_abs, 0.0);
        assert!(r.fitted.is_none());
    }

    #[test]
    fn fit_recovers_exact_quadratic() {
        let xs: Vec<f64> = (0..=500).map(|k| k as f64 * 0.1).collect();
        let ys: Vec<f64> = xs.iter().map(|x| 2.5 * x * x - 130.0 * x + 368.0).collect();
        let q = fit_quadratic(&xs, &ys).unwrap();
        assert!(rel(q.a, 2.5) < 1e-10 && rel(q.b, -130.0) < 1e-10 && rel(q.c, 368.0) < 1e-10);
        assert!(fit_quadratic(&xs[..2], &ys[..2]).is_none());
    }

    proptest! {
        #[test]
        fn order_map_is_polynomial(l in -60.0f64..60.0, n_t in 0.0f64..500.0, g in 1u32..=5) {
            let (np, npp) = order_to_populations(l, n_t, g);
            let gf = g as f64;
            prop_assert!((np - n_t * (l + 1.0) / 2.0).abs() <= 1e-12 * n_t.max(1.0) * (l.abs() + 1.0));
            let want = n_t * gf * (l + 1.0) * (l + 1.0) / 8.0;
            prop_assert!((npp - want).abs() <= 1e-12 * want.abs().max(n_t * gf * (l * l + 1.0)).max(1.0));
        }

        #[test]
        fn psi_linear_in_population(
            a in -100.0f64..100.0, b in -100.0f64..100.0, c in -100.0f64..100.0,
            l in -50.0f64..50.0, n_t in 0.0f64..500.0,
        ) {
            let q = QuadraticForm::new(a, b, c);
            prop_assert_eq!(psi_bw(l, 2.0 * n_t, &q), 2.0 * psi_bw(l, n_t, &q));
        }

        #[test]
        fn real_roots_are_zeros(
            a in -10.0f64..10.0, b in -10.0f64..10.0, c in -10.0f64..10.0,
        ) {
            let q = QuadraticForm::new(a, b, c);
            for r in bw_roots(&q).real_roots() {
                prop_assert!(psi_bw(r, 1.0, &q).abs() < 1e-9 * c.abs().max(1.0) * (1.0 + r.abs()));
            }
        }

        #[test]
        fn vertex_is_on_the_right_side(
            a in prop_oneof![-10.0f64..-1e-3, 1e-3f64..10.0], b in -10.0f64..10.0, c in -10.0f64..10.0,
        ) {
            let q = QuadraticForm::new(a, b, c);
            match bw_extremum(&q, 1.0) {
                Extremum::Maximum { l, psi } => {
                    prop_assert!(psi_bw(l + 1e-3, 1.0, &q) <= psi);
                    prop_assert!(psi_bw(l - 1e-3, 1.0, &q) <= psi);
                }
                Extremum::Minimum { l, psi } => {
                    prop_assert!(psi_bw(l + 1e-3, 1.0, &q) >= psi);
                    prop_assert!(psi_bw(l - 1e-3, 1.0, &q) >= psi);
                }
                Extremum::Linear => prop_assert!(false),
            }
        }
    }
}
