//! Domain types shared by every other module: the ecological parameter set,
//! population and pair-count states, the generalized multi-species system,
//! and the quadratic form of the long-range-order energy.
//!
//! Also hosts the loaders for the scenario table and the global constants
//! file, plus the bundled Serengeti data.

use std::io::Read;

use serde::{Deserialize, Serialize};

use crate::error::{Denominator, Error, RateForm, Result};

/// Bundled scenario table (five rows of interaction coefficients).
pub const BUNDLED_TABLE: &str = include_str!("../data/table1.csv");

/// Bundled Serengeti constants in `key = value` form.
pub const BUNDLED_SERENGETI: &str = include_str!("../data/serengeti.params");

/// Ecological parameter set for the two-role (prey/predator) association.
///
/// The predator-on-prey coefficient `alpha_dp` is never stored; it is always
/// read back as `-alpha_pd`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InteractionParams {
    /// Ecological coordination number (biological proximity).
    pub gamma: u32,
    pub alpha_pp: f64,
    pub alpha_dd: f64,
    pub alpha_pd: f64,
    /// Volterra numbers.
    pub beta_p: f64,
    pub beta_d: f64,
    /// Hunting efficiency / escape ability.
    pub lambda1: f64,
    pub lambda2: f64,
    /// Same-role encounter factors.
    pub xi_p: f64,
    pub xi_d: f64,
    /// Prey-to-predator conversion factor.
    pub nu: f64,
    /// Non-ideal encounter fraction. Informational only: `lambda1` and
    /// `lambda2` are independent fields.
    pub phi: f64,
    /// Growth rates, 1/month.
    pub eps_p: f64,
    pub eps_d: f64,
}

impl InteractionParams {
    #[inline]
    pub fn alpha_dp(&self) -> f64 {
        -self.alpha_pd
    }

    #[inline]
    pub fn gamma_f64(&self) -> f64 {
        f64::from(self.gamma)
    }

    /// Same parameters with a different coordination number.
    pub fn with_gamma(mut self, gamma: u32) -> Self {
        self.gamma = gamma;
        self
    }

    /// Zero denominators that make the prey-form rate undefined.
    pub fn prey_form_singularities(&self) -> Vec<Denominator> {
        let mut zero = Vec::new();
        if self.lambda1 == 0.0 {
            zero.push(Denominator::Lambda1);
        }
        if self.xi_d == 0.0 {
            zero.push(Denominator::XiD);
        }
        zero
    }

    /// Zero denominators that make the predator-form rate undefined.
    pub fn predator_form_singularities(&self) -> Vec<Denominator> {
        let mut zero = Vec::new();
        if self.lambda2 * self.nu == 0.0 {
            zero.push(Denominator::Lambda2Nu);
        }
        if self.xi_p == 0.0 {
            zero.push(Denominator::XiP);
        }
        zero
    }

    pub fn singularities(&self, form: RateForm) -> Vec<Denominator> {
        match form {
            RateForm::Prey => self.prey_form_singularities(),
            RateForm::Predator => self.predator_form_singularities(),
        }
    }

    /// `Ok(())` when `form` can be evaluated, otherwise `SingularForm`.
    pub fn require_form(&self, form: RateForm) -> Result<()> {
        let zero = self.singularities(form);
        if zero.is_empty() {
            Ok(())
        } else {
            Err(Error::SingularForm { form, zero })
        }
    }
}

/// Parameters that passed range validation, annotated with which expanded
/// rate forms can be evaluated.
#[derive(Debug, Clone, PartialEq)]
pub struct ValidatedParams {
    params: InteractionParams,
    prey_singular: Vec<Denominator>,
    predator_singular: Vec<Denominator>,
}

impl ValidatedParams {
    pub fn params(&self) -> &InteractionParams {
        &self.params
    }

    pub fn into_inner(self) -> InteractionParams {
        self.params
    }

    pub fn prey_admissible(&self) -> bool {
        self.prey_singular.is_empty()
    }

    pub fn predator_admissible(&self) -> bool {
        self.predator_singular.is_empty()
    }

    pub fn singular(&self, form: RateForm) -> &[Denominator] {
        match form {
            RateForm::Prey => &self.prey_singular,
            RateForm::Predator => &self.predator_singular,
        }
    }
}

fn check_finite(field: &'static str, value: f64) -> Result<()> {
    if value.is_finite() {
        Ok(())
    } else {
        Err(Error::RangeViolation {
            field,
            value,
            constraint: "finite",
        })
    }
}

fn check_unit(field: &'static str, value: f64) -> Result<()> {
    if (0.0..=1.0).contains(&value) {
        Ok(())
    } else {
        Err(Error::RangeViolation {
            field,
            value,
            constraint: "0 <= x <= 1",
        })
    }
}

fn check_positive(field: &'static str, value: f64) -> Result<()> {
    if value > 0.0 && value.is_finite() {
        Ok(())
    } else {
        Err(Error::RangeViolation {
            field,
            value,
            constraint: "x > 0",
        })
    }
}

fn check_non_negative(field: &'static str, value: f64) -> Result<()> {
    if value >= 0.0 && value.is_finite() {
        Ok(())
    } else {
        Err(Error::RangeViolation {
            field,
            value,
            constraint: "x >= 0",
        })
    }
}

/// Checks every range invariant, in declaration order, and reports the first
/// violation. Singular rate forms are annotations, not failures.
pub fn validate_params(raw: InteractionParams) -> Result<ValidatedParams> {
    if raw.gamma < 1 {
        return Err(Error::RangeViolation {
            field: "gamma",
            value: f64::from(raw.gamma),
            constraint: "gamma >= 1",
        });
    }
    check_non_negative("alpha_pp", raw.alpha_pp)?;
    check_non_negative("alpha_dd", raw.alpha_dd)?;
    check_finite("alpha_pd", raw.alpha_pd)?;
    check_positive("beta_p", raw.beta_p)?;
    check_positive("beta_d", raw.beta_d)?;
    check_unit("lambda1", raw.lambda1)?;
    check_unit("lambda2", raw.lambda2)?;
    check_unit("xi_p", raw.xi_p)?;
    check_unit("xi_d", raw.xi_d)?;
    check_unit("nu", raw.nu)?;
    check_unit("phi", raw.phi)?;
    check_finite("eps_p", raw.eps_p)?;
    check_finite("eps_d", raw.eps_d)?;

    Ok(ValidatedParams {
        prey_singular: raw.prey_form_singularities(),
        predator_singular: raw.predator_form_singularities(),
        params: raw,
    })
}

/// Prey/predator densities, individuals per km². The total is derived.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PopulationState {
    n_p: f64,
    n_d: f64,
}

impl PopulationState {
    pub fn new(n_p: f64, n_d: f64) -> Result<Self> {
        if !(n_p >= 0.0 && n_p.is_finite()) {
            return Err(Error::RangeViolation {
                field: "n_p",
                value: n_p,
                constraint: "finite and >= 0",
            });
        }
        if !(n_d >= 0.0 && n_d.is_finite()) {
            return Err(Error::RangeViolation {
                field: "n_d",
                value: n_d,
                constraint: "finite and >= 0",
            });
        }
        Ok(Self { n_p, n_d })
    }

    #[inline]
    pub fn n_p(&self) -> f64 {
        self.n_p
    }

    #[inline]
    pub fn n_d(&self) -> f64 {
        self.n_d
    }

    #[inline]
    pub fn n_t(&self) -> f64 {
        self.n_p + self.n_d
    }

    /// Converts densities to counts over `area` km².
    pub fn scaled(&self, area: f64) -> Result<Self> {
        Self::new(self.n_p * area, self.n_d * area)
    }
}

/// Same-role and cross-role pair densities.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairCounts {
    pub n_pp: f64,
    pub n_dd: f64,
    pub n_pd: f64,
}

/// Per-capita coefficients of the long-range-order energy,
/// `psi(L) = n_t * (a L² + b L + c)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadraticForm {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

impl QuadraticForm {
    pub fn new(a: f64, b: f64, c: f64) -> Self {
        Self { a, b, c }
    }

    #[inline]
    pub fn per_capita(&self, l: f64) -> f64 {
        self.a * l * l + self.b * l + self.c
    }

    #[inline]
    pub fn psi(&self, l: f64, n_t: f64) -> f64 {
        n_t * (self.a * l * l + self.b * l + self.c)
    }
}

/// Generalized multi-species Lotka-Volterra system.
///
/// `alpha(from, to)` is the effect of species `from` on species `to`. The
/// matrix is antisymmetric off the diagonal; diagonal entries are zero unless
/// set with [`SpeciesSet::with_self_interaction`].
///
/// Weiss truncation keeps, for species `i`, only the first `kappa` entries of
/// its proximity ranking. The default ranking is by ring distance in index
/// space, the species itself first, ties broken by lower index.
#[derive(Debug, Clone, PartialEq)]
pub struct SpeciesSet {
    eps: Vec<f64>,
    alpha: Vec<f64>,
    beta: Vec<f64>,
    kappa: usize,
    proximity: Vec<Vec<usize>>,
}

impl SpeciesSet {
    /// `alpha[from][to]` row-major. Requires exact antisymmetry including a
    /// zero diagonal.
    pub fn new(eps: Vec<f64>, alpha: Vec<Vec<f64>>, beta: Vec<f64>, kappa: usize) -> Result<Self> {
        let count = eps.len();
        if count == 0 {
            return Err(Error::InvalidArgument("species set must be non-empty".into()));
        }
        if beta.len() != count {
            return Err(Error::DimensionMismatch {
                expected: count,
                actual: beta.len(),
            });
        }
        if alpha.len() != count {
            return Err(Error::DimensionMismatch {
                expected: count,
                actual: alpha.len(),
            });
        }
        let mut flat = Vec::with_capacity(count * count);
        for row in &alpha {
            if row.len() != count {
                return Err(Error::DimensionMismatch {
                    expected: count,
                    actual: row.len(),
                });
            }
            flat.extend_from_slice(row);
        }
        for i in 0..count {
            for j in i..count {
                if flat[i * count + j] != -flat[j * count + i] {
                    return Err(Error::AntisymmetryViolation { i, j });
                }
            }
        }
        for &b in &beta {
            if !(b > 0.0 && b.is_finite()) {
                return Err(Error::RangeViolation {
                    field: "beta",
                    value: b,
                    constraint: "x > 0",
                });
            }
        }
        if eps.iter().chain(flat.iter()).any(|x| !x.is_finite()) {
            return Err(Error::InvalidArgument("non-finite coefficient".into()));
        }
        if kappa < 1 || kappa > count {
            return Err(Error::RangeViolation {
                field: "kappa",
                value: kappa as f64,
                constraint: "1 <= kappa <= count",
            });
        }
        let proximity = (0..count).map(|i| ring_ranking(i, count)).collect();
        Ok(Self {
            eps,
            alpha: flat,
            beta,
            kappa,
            proximity,
        })
    }

    /// Two-role system equivalent to `params`: species 0 is prey, 1 predator.
    pub fn two_role(params: &InteractionParams) -> Result<Self> {
        let set = Self::new(
            vec![params.eps_p, params.eps_d],
            vec![vec![0.0, params.alpha_pd], vec![params.alpha_dp(), 0.0]],
            vec![params.beta_p, params.beta_d],
            2,
        )?;
        Ok(set
            .with_self_interaction(0, params.alpha_pp)
            .with_self_interaction(1, params.alpha_dd))
    }

    /// Overrides a diagonal (same-role) coefficient.
    pub fn with_self_interaction(mut self, species: usize, value: f64) -> Self {
        let n = self.count();
        self.alpha[species * n + species] = value;
        self
    }

    /// Replaces the proximity ranking of `species`. The ranking must be a
    /// permutation of all species indices.
    pub fn with_proximity(mut self, species: usize, ranking: Vec<usize>) -> Result<Self> {
        let n = self.count();
        if species >= n {
            return Err(Error::IndexOutOfRange {
                index: species,
                count: n,
            });
        }
        let mut seen = vec![false; n];
        if ranking.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                actual: ranking.len(),
            });
        }
        for &j in &ranking {
            if j >= n || seen[j] {
                return Err(Error::InvalidArgument(format!(
                    "proximity ranking for species {species} is not a permutation"
                )));
            }
            seen[j] = true;
        }
        self.proximity[species] = ranking;
        Ok(self)
    }

    pub fn with_kappa(mut self, kappa: usize) -> Result<Self> {
        if kappa < 1 || kappa > self.count() {
            return Err(Error::RangeViolation {
                field: "kappa",
                value: kappa as f64,
                constraint: "1 <= kappa <= count",
            });
        }
        self.kappa = kappa;
        Ok(self)
    }

    #[inline]
    pub fn count(&self) -> usize {
        self.eps.len()
    }

    #[inline]
    pub fn kappa(&self) -> usize {
        self.kappa
    }

    #[inline]
    pub fn eps(&self) -> &[f64] {
        &self.eps
    }

    #[inline]
    pub fn beta(&self) -> &[f64] {
        &self.beta
    }

    /// Effect of species `from` on species `to`.
    #[inline]
    pub fn alpha(&self, from: usize, to: usize) -> f64 {
        self.alpha[from * self.count() + to]
    }

    /// The `kappa` species that act on `species`.
    #[inline]
    pub fn neighbors(&self, species: usize) -> &[usize] {
        &self.proximity[species][..self.kappa]
    }
}

fn ring_ranking(i: usize, n: usize) -> Vec<usize> {
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&j| {
        let d = i.abs_diff(j);
        (d.min(n - d), j)
    });
    order
}

/// Six per-scenario columns of the scenario table.
#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
struct ScenarioRow {
    alpha_pp: f64,
    alpha_dd: f64,
    lambda1: f64,
    lambda2: f64,
    xi_p: f64,
    xi_d: f64,
}

const SCENARIO_COLUMNS: [&str; 6] = ["alpha_pp", "alpha_dd", "lambda1", "lambda2", "xi_p", "xi_d"];

/// Values shared by every scenario row, read from a `key = value` file.
#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GlobalConstants {
    pub beta_p: f64,
    /// Falls back to `beta_p` when absent.
    #[serde(default)]
    pub beta_d: Option<f64>,
    pub alpha_pd: f64,
    pub nu: f64,
    #[serde(default)]
    pub phi: f64,
    pub eps_p: f64,
    pub eps_d: f64,
    pub gamma: u32,
    /// Observed prey density, when the file carries one.
    #[serde(default)]
    pub n_p: Option<f64>,
    /// Observed predator density, when the file carries one.
    #[serde(default)]
    pub n_d: Option<f64>,
}

impl GlobalConstants {
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| {
            let line = e
                .span()
                .map(|s| text[..s.start.min(text.len())].matches('\n').count() + 1)
                .unwrap_or(0);
            Error::Parse {
                line,
                message: e.message().to_string(),
            }
        })
    }

    pub fn beta_d(&self) -> f64 {
        self.beta_d.unwrap_or(self.beta_p)
    }

    /// Observed densities, when both are present.
    pub fn observed_state(&self) -> Option<Result<PopulationState>> {
        match (self.n_p, self.n_d) {
            (Some(p), Some(d)) => Some(PopulationState::new(p, d)),
            _ => None,
        }
    }
}

/// The bundled Serengeti constants.
pub fn serengeti_constants() -> GlobalConstants {
    GlobalConstants::parse(BUNDLED_SERENGETI).expect("bundled constants parse")
}

/// The bundled scenario table merged with the Serengeti constants.
pub fn bundled_scenarios() -> Vec<InteractionParams> {
    load_scenario_table(BUNDLED_TABLE.as_bytes(), &serengeti_constants()).expect("bundled table parses")
}

fn merge(row: ScenarioRow, k: &GlobalConstants) -> InteractionParams {
    InteractionParams {
        gamma: k.gamma,
        alpha_pp: row.alpha_pp,
        alpha_dd: row.alpha_dd,
        alpha_pd: k.alpha_pd,
        beta_p: k.beta_p,
        beta_d: k.beta_d(),
        lambda1: row.lambda1,
        lambda2: row.lambda2,
        xi_p: row.xi_p,
        xi_d: row.xi_d,
        nu: k.nu,
        phi: k.phi,
        eps_p: k.eps_p,
        eps_d: k.eps_d,
    }
}

/// Reads the scenario table (header plus one comma-separated row per
/// scenario) and merges each row with `constants`. Row order is preserved.
pub fn load_scenario_table<R: Read>(source: R, constants: &GlobalConstants) -> Result<Vec<InteractionParams>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(source);

    let headers = reader.headers().map_err(csv_error)?.clone();
    if headers.is_empty() {
        return Ok(Vec::new());
    }
    let mut index = [0usize; 6];
    for (slot, name) in index.iter_mut().zip(SCENARIO_COLUMNS) {
        *slot = headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::MissingColumn(name.to_string()))?;
    }

    let mut out = Vec::new();
    for record in reader.records() {
        let record = record.map_err(csv_error)?;
        let line = record.position().map(|p| p.line() as usize).unwrap_or(0);
        let mut values = [0.0f64; 6];
        for (value, (&col, name)) in values.iter_mut().zip(index.iter().zip(SCENARIO_COLUMNS)) {
            let field = record.get(col).ok_or_else(|| Error::Parse {
                line,
                message: format!("missing value for `{name}`"),
            })?;
            *value = field.parse().map_err(|_| Error::Parse {
                line,
                message: format!("`{field}` is not a number ({name})"),
            })?;
        }
        let row = ScenarioRow {
            alpha_pp: values[0],
            alpha_dd: values[1],
            lambda1: values[2],
            lambda2: values[3],
            xi_p: values[4],
            xi_d: values[5],
        };
        out.push(merge(row, constants));
    }
    Ok(out)
}

fn csv_error(e: csv::Error) -> Error {
    let line = e.position().map(|p| p.line() as usize).unwrap_or(0);
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        csv::ErrorKind::UnequalLengths { expected_len, len, .. } => Error::Parse {
            line,
            message: format!("expected {expected_len} columns, found {len}"),
        },
        other => Error::Parse {
            line,
            message: format!("{other:?}"),
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row3() -> InteractionParams {
        bundled_scenarios()[2]
    }

    #[test]
    fn table_row_three_is_valid_with_both_forms() {
        let p = row3();
        assert_eq!(p.alpha_pp, 0.6);
        assert_eq!(p.gamma, 3);
        assert_eq!(p.beta_p, 0.006456);
        assert_eq!(p.alpha_pd, 0.05);
        assert_eq!(p.nu, 0.05);
        let v = validate_params(p).unwrap();
        assert!(v.prey_admissible());
        assert!(v.predator_admissible());
    }

    #[test]
    fn last_row_flags_prey_form_singular() {
        let p = bundled_scenarios()[4];
        let v = validate_params(p).unwrap();
        assert!(!v.prey_admissible());
        assert_eq!(v.singular(RateForm::Prey), &[Denominator::Lambda1, Denominator::XiD]);
        assert!(v.predator_admissible());
    }

    #[test]
    fn out_of_range_lambda_rejected() {
        let mut p = row3();
        p.lambda1 = 1.5;
        match validate_params(p) {
            Err(Error::RangeViolation { field, .. }) => assert_eq!(field, "lambda1"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn first_violation_is_reported() {
        let mut p = row3();
        p.xi_d = -0.1;
        p.nu = 2.0;
        match validate_params(p) {
            Err(Error::RangeViolation { field, .. }) => assert_eq!(field, "xi_d"),
            other => panic!("unexpected {other:?}"),
        }
        let mut p = row3();
        p.gamma = 0;
        assert!(matches!(
            validate_params(p),
            Err(Error::RangeViolation { field: "gamma", .. })
        ));
        let mut p = row3();
        p.beta_d = 0.0;
        assert!(matches!(
            validate_params(p),
            Err(Error::RangeViolation { field: "beta_d", .. })
        ));
    }

    #[test]
    fn validation_is_idempotent() {
        for p in bundled_scenarios() {
            let once = validate_params(p).unwrap();
            let twice = validate_params(once.clone().into_inner()).unwrap();
            assert_eq!(once, twice);
        }
    }

    #[test]
    fn cross_coefficient_is_antisymmetric() {
        for p in bundled_scenarios() {
            assert_eq!(p.alpha_dp(), -p.alpha_pd);
            let set = SpeciesSet::two_role(&p).unwrap();
            assert_eq!(set.alpha(1, 0), -set.alpha(0, 1));
            assert_eq!(set.alpha(0, 0), p.alpha_pp);
            assert_eq!(set.alpha(1, 1), p.alpha_dd);
        }
    }

    #[test]
    fn bundled_table_has_five_rows_in_order() {
        let rows = bundled_scenarios();
        let app: Vec<f64> = rows.iter().map(|p| p.alpha_pp).collect();
        assert_eq!(app, vec![0.0, 0.2, 0.6, 0.8, 1.0]);
        for p in &rows {
            assert_eq!(p.beta_d, p.beta_p);
        }
    }

    #[test]
    fn bundled_table_role_factors() {
        let rows = bundled_scenarios();
        for p in &rows {
            assert!((p.xi_p + p.xi_d - 1.0).abs() < 1e-15);
        }
        // lambda1 = 1 - xi_p on every row except the third, which lists
        // lambda1 = xi_p = 0.6.
        for (i, p) in rows.iter().enumerate() {
            let holds = (p.lambda1 - (1.0 - p.xi_p)).abs() < 1e-15;
            assert_eq!(holds, i != 2, "row {}", i + 1);
        }
    }

    #[test]
    fn empty_stream_gives_empty_table() {
        let k = serengeti_constants();
        assert!(load_scenario_table("".as_bytes(), &k).unwrap().is_empty());
    }

    #[test]
    fn short_row_is_a_parse_error() {
        let k = serengeti_constants();
        let text = "alpha_pp,alpha_dd,lambda1,lambda2,xi_p,xi_d\n0.6,0.4,0.6,0.4,0.6,0.4\n0.2,0.2,0.8,0.8,0.2\n";
        match load_scenario_table(text.as_bytes(), &k) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn missing_column_is_reported() {
        let k = serengeti_constants();
        let text = "alpha_pp,alpha_dd,lambda1,lambda2,xi_p,xi_x\n0.6,0.4,0.6,0.4,0.6,0.4\n";
        assert!(matches!(
            load_scenario_table(text.as_bytes(), &k),
            Err(Error::MissingColumn(c)) if c == "xi_d"
        ));
    }

    #[test]
    fn non_numeric_field_is_a_parse_error() {
        let k = serengeti_constants();
        let text = "alpha_pp,alpha_dd,lambda1,lambda2,xi_p,xi_d\n0.6,0.4,x,0.4,0.6,0.4\n";
        assert!(matches!(
            load_scenario_table(text.as_bytes(), &k),
            Err(Error::Parse { line: 2, .. })
        ));
    }

    #[test]
    fn constants_file_parses_and_defaults() {
        let k = serengeti_constants();
        assert_eq!(k.beta_p, 0.006456);
        assert_eq!(k.beta_d(), 0.006456);
        assert_eq!(k.eps_p, 0.34);
        assert_eq!(k.eps_d, 0.294);
        assert_eq!(k.phi, 0.0);
        let s = k.observed_state().unwrap().unwrap();
        assert_eq!((s.n_p(), s.n_d()), (3.0, 1.1));
    }

    #[test]
    fn constants_file_errors_carry_line() {
        let text = "beta_p = 0.1\nalpha_pd = 0.05\nnu = oops\n";
        match GlobalConstants::parse(text) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("unexpected {other:?}"),
        }
        let text = "beta_p = 0.1\nbogus = 1\n";
        assert!(matches!(GlobalConstants::parse(text), Err(Error::Parse { .. })));
    }

    #[test]
    fn population_state_total_and_guards() {
        let s = PopulationState::new(3.0, 1.1).unwrap();
        assert_eq!(s.n_t(), 3.0 + 1.1);
        assert!(PopulationState::new(-1.0, 0.0).is_err());
        assert!(PopulationState::new(0.0, f64::NAN).is_err());
        let counts = s.scaled(10.0).unwrap();
        assert_eq!(counts.n_p(), 30.0);
    }

    #[test]
    fn species_set_rejects_asymmetric_alpha() {
        let err = SpeciesSet::new(vec![1.0, -1.0], vec![vec![0.0, 1.0], vec![1.0, 0.0]], vec![1.0, 1.0], 2);
        assert!(matches!(err, Err(Error::AntisymmetryViolation { i: 0, j: 1 })));
        let err = SpeciesSet::new(
            vec![1.0, -1.0],
            vec![vec![0.5, 1.0], vec![-1.0, 0.0]],
            vec![1.0, 1.0],
            2,
        );
        assert!(matches!(err, Err(Error::AntisymmetryViolation { i: 0, j: 0 })));
    }

    #[test]
    fn species_set_kappa_bounds() {
        let mk = |k| {
            SpeciesSet::new(
                vec![1.0, -1.0],
                vec![vec![0.0, 1.0], vec![-1.0, 0.0]],
                vec![1.0, 1.0],
                k,
            )
        };
        assert!(mk(0).is_err());
        assert!(mk(3).is_err());
        assert!(mk(1).is_ok());
    }

    #[test]
    fn default_proximity_starts_with_self() {
        let set = SpeciesSet::new(vec![0.0; 5], vec![vec![0.0; 5]; 5], vec![1.0; 5], 3).unwrap();
        assert_eq!(set.neighbors(0), &[0, 1, 4]);
        assert_eq!(set.neighbors(2), &[2, 1, 3]);
        assert!(set.clone().with_proximity(0, vec![0, 0, 1, 2, 3]).is_err());
        let custom = set.with_proximity(0, vec![4, 3, 2, 1, 0]).unwrap();
        assert_eq!(custom.neighbors(0), &[4, 3, 2]);
    }

    #[test]
    fn quadratic_form_is_plain_polynomial() {
        let q = QuadraticForm::new(2.0, -3.0, 0.5);
        assert_eq!(q.psi(1.5, 4.0), 4.0 * (2.0 * 1.5 * 1.5 - 3.0 * 1.5 + 0.5));
    }
}
