//! Weiss-style mean fields.
//!
//! Each species feels an effective field `T_eff_i = sum_j alpha(j, i) N_j`
//! over its `kappa` neighbours. Holding the field fixed over an interval
//! decouples the dynamics into exponentials `N_i(t) = N_i(0) exp[(eps_i + Omega_i) t]`,
//! and inverting that relation on observed series gives the field estimator
//! `Omega~ = ln(N(t1)/N(t0)) / (t1 - t0) - eps`.

use std::io::{Read, Write};

use crate::error::{Error, Result};
use crate::format::fmt_sig;
use crate::model::SpeciesSet;

/// Per-species fields at one instant.
#[derive(Debug, Clone, PartialEq)]
pub struct MeanFieldSummary {
    /// `sum_j alpha(j, i) N_j` over neighbours, 1/month per unit beta.
    pub t_eff: Vec<f64>,
    /// `eps_i + t_eff_i / beta_i`.
    pub t_cm: Vec<f64>,
    /// Weiss field `t_eff_i / beta_i`, so that `eps_i + omega_i = t_cm_i`.
    pub omega: Vec<f64>,
    /// `sum_i omega_i`.
    pub omega_total: f64,
}

fn check_len(populations: &[f64], system: &SpeciesSet) -> Result<()> {
    if populations.len() != system.count() {
        return Err(Error::DimensionMismatch {
            expected: system.count(),
            actual: populations.len(),
        });
    }
    Ok(())
}

fn t_eff_unchecked(i: usize, n: &[f64], system: &SpeciesSet) -> f64 {
    system.neighbors(i).iter().map(|&j| system.alpha(j, i) * n[j]).sum()
}

/// Effective interaction field on `species`.
pub fn t_eff(species: usize, populations: &[f64], system: &SpeciesSet) -> Result<f64> {
    if species >= system.count() {
        return Err(Error::IndexOutOfRange {
            index: species,
            count: system.count(),
        });
    }
    check_len(populations, system)?;
    Ok(t_eff_unchecked(species, populations, system))
}

pub fn mean_field_summary(populations: &[f64], system: &SpeciesSet) -> Result<MeanFieldSummary> {
    check_len(populations, system)?;
    let t_eff: Vec<f64> = (0..system.count())
        .map(|i| t_eff_unchecked(i, populations, system))
        .collect();
    let omega: Vec<f64> = t_eff.iter().zip(system.beta()).map(|(t, b)| t / b).collect();
    let t_cm = system.eps().iter().zip(&omega).map(|(e, o)| e + o).collect();
    let omega_total = omega.iter().sum();
    Ok(MeanFieldSummary {
        t_eff,
        t_cm,
        omega,
        omega_total,
    })
}

/// `rate_i = T_cm_i N_i`. The total-population rate is the sum of the
/// returned vector.
pub fn mean_field_rate(populations: &[f64], system: &SpeciesSet) -> Result<Vec<f64>> {
    let summary = mean_field_summary(populations, system)?;
    Ok(summary.t_cm.iter().zip(populations).map(|(t, n)| t * n).collect())
}

/// Growth rate and field held constant over an interval.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrozenField {
    pub eps: f64,
    pub omega: f64,
}

/// `N_i(t) = N_i(0) exp[(eps_i + omega_i) t]`. Pass a single entry for the
/// association-level total.
pub fn frozen_field_solution(initial: &[f64], fields: &[FrozenField], t: f64) -> Result<Vec<f64>> {
    if fields.len() != initial.len() {
        return Err(Error::DimensionMismatch {
            expected: initial.len(),
            actual: fields.len(),
        });
    }
    if !(t >= 0.0) {
        return Err(Error::InvalidArgument(format!("time must be >= 0, got {t}")));
    }
    Ok(initial
        .iter()
        .zip(fields)
        .map(|(n0, f)| n0 * ((f.eps + f.omega) * t).exp())
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OmegaInterval {
    pub t_start: f64,
    pub t_end: f64,
    pub omega: f64,
}

/// Per-interval field estimates and their arithmetic mean.
#[derive(Debug, Clone, PartialEq)]
pub struct OmegaEstimate {
    pub intervals: Vec<OmegaInterval>,
    pub mean: f64,
}

impl OmegaEstimate {
    /// `t_start,t_end,omega_hat`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "t_start,t_end,omega_hat")?;
        for iv in &self.intervals {
            writeln!(w, "{},{},{}", fmt_sig(iv.t_start), fmt_sig(iv.t_end), fmt_sig(iv.omega))?;
        }
        Ok(())
    }
}

/// Field estimate on every consecutive pair of samples.
pub fn estimate_omega(times: &[f64], counts: &[f64], eps: f64) -> Result<OmegaEstimate> {
    if times.len() != counts.len() {
        return Err(Error::DimensionMismatch {
            expected: times.len(),
            actual: counts.len(),
        });
    }
    if times.len() < 2 {
        return Err(Error::FewerThanTwoSamples);
    }
    if let Some((&t, &value)) = times.iter().zip(counts).find(|(_, &n)| !(n > 0.0)) {
        return Err(Error::NonPositiveCount { t, value });
    }
    let mut intervals = Vec::with_capacity(times.len() - 1);
    for k in 0..times.len() - 1 {
        let (t0, t1) = (times[k], times[k + 1]);
        let dt = t1 - t0;
        if !(dt > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "sample times must increase strictly (t = {t0}, {t1})"
            )));
        }
        let growth = (counts[k + 1] / counts[k]).ln() / dt;
        intervals.push(OmegaInterval {
            t_start: t0,
            t_end: t1,
            omega: growth - eps,
        });
    }
    let mean = intervals.iter().map(|iv| iv.omega).sum::<f64>() / intervals.len() as f64;
    Ok(OmegaEstimate { intervals, mean })
}

/// Association-level growth rate used for the total series: the
/// population-weighted mean of the role growth rates at the first sample.
pub fn default_total_eps(eps_p: f64, eps_d: f64, n_p0: f64, n_d0: f64) -> f64 {
    let n_t = n_p0 + n_d0;
    if n_t > 0.0 {
        (eps_p * n_p0 + eps_d * n_d0) / n_t
    } else {
        0.5 * (eps_p + eps_d)
    }
}

/// Columns of a time-series CSV (`t,N` or `t,N_p,N_d,N_T`).
#[derive(Debug, Clone, PartialEq)]
pub struct SeriesTable {
    pub times: Vec<f64>,
    pub columns: Vec<(String, Vec<f64>)>,
}

impl SeriesTable {
    pub fn column(&self, name: &str) -> Option<&[f64]> {
        self.columns.iter().find(|(n, _)| n == name).map(|(_, v)| v.as_slice())
    }
}

pub fn read_series_csv<R: Read>(source: R) -> Result<SeriesTable> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(source);
    let headers = reader
        .headers()
        .map_err(|e| Error::Parse {
            line: 1,
            message: e.to_string(),
        })?
        .clone();
    let names: Vec<&str> = headers.iter().collect();
    let expected: &[&[&str]] = &[&["t", "N"], &["t", "N_p", "N_d", "N_T"]];
    if !expected.contains(&names.as_slice()) {
        return Err(Error::Parse {
            line: 1,
            message: format!("expected header `t,N` or `t,N_p,N_d,N_T`, found `{}`", names.join(",")),
        });
    }
    let mut times = Vec::new();
    let mut cols: Vec<Vec<f64>> = vec![Vec::new(); names.len() - 1];
    for record in reader.records() {
        let record = record.map_err(|e| Error::Parse {
            line: e.position().map(|p| p.line() as usize).unwrap_or(0),
            message: e.to_string(),
        })?;
        let line = record.position().map(|p| p.line() as usize).unwrap_or(0);
        let parse = |s: &str| {
            s.parse::<f64>().map_err(|_| Error::Parse {
                line,
                message: format!("`{s}` is not a number"),
            })
        };
        times.push(parse(&record[0])?);
        for (c, col) in cols.iter_mut().enumerate() {
            col.push(parse(&record[c + 1])?);
        }
    }
    Ok(SeriesTable {
        times,
        columns: names[1..].iter().map(|s| s.to_string()).zip(cols).collect(),
    })
}
