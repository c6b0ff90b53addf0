//! Parameter sweeps of `psi(L)` over scenarios, `gamma` and `N_T`.

use std::io::Write;
use std::str::FromStr;

use rayon::prelude::*;
use serde::Deserialize;

use crate::bragg_williams::{bw_coefficients, psi_bw, DomainMode};
use crate::error::{Error, Result};
use crate::format::fmt_sig;
use crate::model::{InteractionParams, QuadraticForm};

/// Scenario row (1-based) used by every preset except `fig4`.
pub const DEFAULT_SCENARIO: usize = 3;

/// `start:stop:step`, inclusive of `stop` when it lies on the grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LRange {
    pub start: f64,
    pub stop: f64,
    pub step: f64,
}

impl LRange {
    pub fn new(start: f64, stop: f64, step: f64) -> Result<Self> {
        let r = Self { start, stop, step };
        r.validate()?;
        Ok(r)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.start.is_finite() && self.stop.is_finite() && self.step.is_finite()) {
            return Err(Error::InvalidArgument("L range must be finite".into()));
        }
        if self.step <= 0.0 {
            return Err(Error::RangeViolation {
                field: "step",
                value: self.step,
                constraint: "step > 0",
            });
        }
        if self.start >= self.stop {
            return Err(Error::RangeViolation {
                field: "start",
                value: self.start,
                constraint: "start < stop",
            });
        }
        Ok(())
    }

    /// `start + k step` for `k = 0..=n`; each point is computed afresh so no
    /// rounding accumulates along the grid.
    pub fn points(&self) -> Vec<f64> {
        let n = ((self.stop - self.start) / self.step + 1e-9).floor() as usize;
        (0..=n).map(|k| self.start + k as f64 * self.step).collect()
    }
}

impl Default for LRange {
    fn default() -> Self {
        Self {
            start: 0.0,
            stop: 50.0,
            step: 0.1,
        }
    }
}

impl FromStr for LRange {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        let [a, b, c] = parts.as_slice() else {
            return Err(Error::InvalidArgument(format!(
                "L range must be `start:stop:step`, got `{s}`"
            )));
        };
        let num = |t: &str| {
            t.trim()
                .parse::<f64>()
                .map_err(|_| Error::InvalidArgument(format!("`{t}` in L range is not a number")))
        };
        Self::new(num(a)?, num(b)?, num(c)?)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Pairing {
    /// Every `gamma` with every `N_T`.
    #[default]
    Cartesian,
    /// `gamma_values[k]` with `n_t_values[k]`.
    Zipped,
}

impl FromStr for Pairing {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "cartesian" => Ok(Self::Cartesian),
            "zipped" => Ok(Self::Zipped),
            other => Err(Error::InvalidArgument(format!(
                "pairing must be `cartesian` or `zipped`, got `{other}`"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub l_range: LRange,
    pub gamma_values: Vec<u32>,
    pub n_t_values: Vec<f64>,
    /// 1-based rows of the scenario table.
    pub scenario_indices: Vec<usize>,
    pub pairing: Pairing,
    pub domain: DomainMode,
    /// Adds a `psi_per_capita` column.
    pub per_capita: bool,
}

impl SweepSpec {
    pub fn validate(&self, scenario_count: usize) -> Result<()> {
        self.l_range.validate()?;
        if self.domain == DomainMode::Theoretical && (self.l_range.start < -1.0 || self.l_range.stop > 1.0) {
            return Err(Error::InvalidArgument(format!(
                "L range {}:{} leaves [-1, 1] in theoretical mode",
                self.l_range.start, self.l_range.stop
            )));
        }
        if self.gamma_values.is_empty() {
            return Err(Error::InvalidArgument("gamma list is empty".into()));
        }
        if self.n_t_values.is_empty() {
            return Err(Error::InvalidArgument("N_T list is empty".into()));
        }
        if self.scenario_indices.is_empty() {
            return Err(Error::InvalidArgument("scenario list is empty".into()));
        }
        if let Some(&g) = self.gamma_values.iter().find(|&&g| g < 1) {
            return Err(Error::RangeViolation {
                field: "gamma",
                value: f64::from(g),
                constraint: "gamma >= 1",
            });
        }
        if let Some(&n) = self.n_t_values.iter().find(|n| !(n.is_finite() && **n >= 0.0)) {
            return Err(Error::RangeViolation {
                field: "n_t",
                value: n,
                constraint: "finite and >= 0",
            });
        }
        if let Some(&i) = self.scenario_indices.iter().find(|&&i| i == 0 || i > scenario_count) {
            return Err(Error::IndexOutOfRange {
                index: i,
                count: scenario_count,
            });
        }
        if self.pairing == Pairing::Zipped && self.gamma_values.len() != self.n_t_values.len() {
            return Err(Error::DimensionMismatch {
                expected: self.gamma_values.len(),
                actual: self.n_t_values.len(),
            });
        }
        Ok(())
    }

    /// `(gamma, N_T)` pairs in emission order.
    pub fn pairs(&self) -> Vec<(u32, f64)> {
        match self.pairing {
            Pairing::Cartesian => self
                .gamma_values
                .iter()
                .flat_map(|&g| self.n_t_values.iter().map(move |&n| (g, n)))
                .collect(),
            Pairing::Zipped => self
                .gamma_values
                .iter()
                .copied()
                .zip(self.n_t_values.iter().copied())
                .collect(),
        }
    }

    /// Reads a TOML sweep description. Missing keys take the `fig1` values.
    pub fn from_toml(text: &str) -> Result<Self> {
        let file: SweepFile = toml::from_str(text).map_err(|e| Error::Parse {
            line: e
                .span()
                .map_or(0, |s| text[..s.start.min(text.len())].matches('\n').count() + 1),
            message: e.message().to_string(),
        })?;
        let mut spec = Preset::Fig1.spec();
        if let Some(r) = file.l_range {
            spec.l_range = r.parse()?;
        }
        if let Some(g) = file.gamma {
            spec.gamma_values = g;
        }
        if let Some(n) = file.n_t {
            spec.n_t_values = n;
        }
        if let Some(s) = file.scenarios {
            spec.scenario_indices = s;
        }
        if let Some(p) = file.pairing {
            spec.pairing = p;
        }
        if let Some(d) = file.domain {
            spec.domain = d.parse()?;
        }
        if let Some(pc) = file.per_capita {
            spec.per_capita = pc;
        }
        Ok(spec)
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SweepFile {
    l_range: Option<String>,
    gamma: Option<Vec<u32>>,
    n_t: Option<Vec<f64>>,
    scenarios: Option<Vec<usize>>,
    pairing: Option<Pairing>,
    domain: Option<String>,
    per_capita: Option<bool>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    Fig1,
    Fig2,
    Fig3a,
    Fig3b,
    Fig4,
}

impl Preset {
    pub const ALL: [Preset; 5] = [Preset::Fig1, Preset::Fig2, Preset::Fig3a, Preset::Fig3b, Preset::Fig4];

    pub fn name(&self) -> &'static str {
        match self {
            Preset::Fig1 => "fig1",
            Preset::Fig2 => "fig2",
            Preset::Fig3a => "fig3a",
            Preset::Fig3b => "fig3b",
            Preset::Fig4 => "fig4",
        }
    }

    pub fn spec(&self) -> SweepSpec {
        let base = SweepSpec {
            l_range: LRange::default(),
            gamma_values: vec![3],
            n_t_values: vec![4.1],
            scenario_indices: vec![DEFAULT_SCENARIO],
            pairing: Pairing::Cartesian,
            domain: DomainMode::Extended,
            per_capita: false,
        };
        let falling_n_t = vec![410.0, 317.75, 225.5, 133.25, 41.0];
        match self {
            Preset::Fig1 => SweepSpec {
                gamma_values: (1..=5).collect(),
                ..base
            },
            Preset::Fig2 => SweepSpec {
                n_t_values: (1..=10).map(|k| 41.0 * k as f64).collect(),
                per_capita: true,
                ..base
            },
            Preset::Fig3a => SweepSpec {
                gamma_values: (1..=5).collect(),
                n_t_values: falling_n_t,
                pairing: Pairing::Zipped,
                ..base
            },
            Preset::Fig3b => SweepSpec {
                gamma_values: (1..=5).rev().collect(),
                n_t_values: falling_n_t,
                pairing: Pairing::Zipped,
                ..base
            },
            Preset::Fig4 => SweepSpec {
                n_t_values: vec![41.0],
                scenario_indices: (1..=5).collect(),
                ..base
            },
        }
    }
}

impl FromStr for Preset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Preset::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown preset `{s}`")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    /// 1-based.
    pub scenario: usize,
    pub gamma: u32,
    pub n_t: f64,
    pub l: f64,
    pub psi: f64,
    pub psi_per_capita: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SkippedScenario {
    /// 1-based.
    pub scenario: usize,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepTable {
    pub rows: Vec<SweepRow>,
    pub skipped: Vec<SkippedScenario>,
    pub per_capita: bool,
}

impl SweepTable {
    /// `scenario,gamma,n_t,L,psi`, plus `psi_per_capita` when requested.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        if self.per_capita {
            writeln!(w, "scenario,gamma,n_t,L,psi,psi_per_capita")?;
        } else {
            writeln!(w, "scenario,gamma,n_t,L,psi")?;
        }
        for r in &self.rows {
            write!(
                w,
                "{},{},{},{},{}",
                r.scenario,
                r.gamma,
                fmt_sig(r.n_t),
                fmt_sig(r.l),
                fmt_sig(r.psi)
            )?;
            if self.per_capita {
                write!(w, ",{}", fmt_sig(r.psi_per_capita))?;
            }
            writeln!(w)?;
        }
        Ok(())
    }
}

/// Evaluates `psi` on every `(scenario, gamma, N_T, L)` combination.
///
/// Scenarios whose closed form is singular are listed in `skipped` once and
/// contribute no rows. Rows come out in scenario, gamma, `N_T`, `L` order for
/// any `workers`.
pub fn run_sweep(spec: &SweepSpec, scenarios: &[InteractionParams], workers: usize) -> Result<SweepTable> {
    spec.validate(scenarios.len())?;
    if workers == 0 {
        return Err(Error::InvalidArgument("worker count must be at least 1".into()));
    }
    let grid = spec.l_range.points();
    let pairs = spec.pairs();

    let mut curves: Vec<(usize, u32, f64, QuadraticForm)> = Vec::new();
    let mut skipped = Vec::new();
    for &index in &spec.scenario_indices {
        let base = scenarios[index - 1];
        let mut forms = Vec::with_capacity(pairs.len());
        let mut failure = None;
        for &(g, n_t) in &pairs {
            match bw_coefficients(&base.with_gamma(g)) {
                Ok(q) => forms.push((index, g, n_t, q)),
                Err(e) => {
                    failure = Some(e);
                    break;
                }
            }
        }
        match failure {
            Some(e) => skipped.push(SkippedScenario {
                scenario: index,
                reason: e.to_string(),
            }),
            None => curves.extend(forms),
        }
    }

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::InvalidArgument(format!("thread pool: {e}")))?;
    let n_l = grid.len();
    let rows = pool.install(|| {
        (0..curves.len() * n_l)
            .into_par_iter()
            .map(|k| {
                let (scenario, gamma, n_t, q) = curves[k / n_l];
                let l = grid[k % n_l];
                SweepRow {
                    scenario,
                    gamma,
                    n_t,
                    l,
                    psi: psi_bw(l, n_t, &q),
                    psi_per_capita: q.per_capita(l),
                }
            })
            .collect()
    });
    Ok(SweepTable {
        rows,
        skipped,
        per_capita: spec.per_capita,
    })
}

/// `eps = sum 1/tau_i` over the gestation periods of the neighbourhood.
pub fn growth_rates_from_gestation(taus: &[f64]) -> Result<f64> {
    if taus.is_empty() {
        return Err(Error::InvalidArgument("no gestation periods given".into()));
    }
    for (index, &value) in taus.iter().enumerate() {
        if !(value > 0.0) || !value.is_finite() {
            return Err(Error::NonPositiveGestation { index, value });
        }
    }
    Ok(taus.iter().map(|t| 1.0 / t).sum())
}
