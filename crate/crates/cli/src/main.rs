use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde::Deserialize;

use ecolattice::closure::write_consistency_csv;
use ecolattice::format::fmt_sig;
use ecolattice::meanfield::{default_total_eps, read_series_csv};
use ecolattice::model::BUNDLED_TABLE;
use ecolattice::sweep::DEFAULT_SCENARIO;
use ecolattice::{
    bw_coefficients, bw_coefficients_admissible, bw_extremum, bw_roots, bw_vs_substitution_check, estimate_omega,
    form_consistency_report, integrate, load_scenario_table, psi_bw, run_sweep, serengeti_constants, validate_params,
    DomainMode, Extremum, GlobalConstants, InteractionParams, LRange, PopulationState, Preset, SpeciesSet, SweepSpec,
};

#[derive(Parser)]
#[command(
    name = "ecolattice",
    version,
    about = "Lattice mean-field prey-predator model and psi(L) sweeps"
)]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    /// Constants file (`key = value` lines); defaults to the bundled Serengeti values.
    #[arg(long, global = true, value_name = "FILE")]
    params: Option<PathBuf>,
    /// Scenario table CSV; defaults to the bundled table.
    #[arg(long, global = true, value_name = "FILE")]
    scenarios: Option<PathBuf>,
    /// Output file; standard output when absent.
    #[arg(long, global = true, value_name = "FILE")]
    out: Option<PathBuf>,
    /// Worker threads for sweeps.
    #[arg(long, global = true, value_name = "N")]
    workers: Option<usize>,
    /// `theoretical` restricts L to [-1, 1].
    #[arg(long, global = true, value_parser = parse_domain)]
    domain: Option<DomainMode>,
}

#[derive(Subcommand)]
enum Command {
    /// One psi(L) curve.
    Psi(PsiArgs),
    /// Parameter sweep from a preset or a spec file.
    Sweep(SweepArgs),
    /// Integrate the Lotka-Volterra system.
    Simulate(SimulateArgs),
    /// Estimate the mean field from a time series.
    Estimate(EstimateArgs),
    /// Consistency reports.
    #[command(subcommand)]
    Check(CheckCommand),
    /// Print the loaded scenario table.
    Scenarios,
}

#[derive(Args)]
struct PsiArgs {
    /// Scenario row, 1-based.
    #[arg(long, default_value_t = DEFAULT_SCENARIO)]
    scenario: usize,
    /// Defaults to the constants file value.
    #[arg(long)]
    gamma: Option<u32>,
    #[arg(long, default_value_t = 4.1)]
    nt: f64,
    #[arg(long = "L-range", value_parser = parse_l_range)]
    l_range: Option<LRange>,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long, value_parser = parse_preset, conflicts_with = "spec", required_unless_present = "spec")]
    preset: Option<Preset>,
    /// TOML sweep description.
    #[arg(long, value_name = "FILE")]
    spec: Option<PathBuf>,
    #[arg(long = "L-range", value_parser = parse_l_range)]
    l_range: Option<LRange>,
    #[arg(long, value_delimiter = ',')]
    gamma: Option<Vec<u32>>,
    #[arg(long, value_delimiter = ',')]
    nt: Option<Vec<f64>>,
    /// Scenario rows, 1-based.
    #[arg(long, value_delimiter = ',')]
    rows: Option<Vec<usize>>,
    /// Add a `psi_per_capita` column.
    #[arg(long)]
    per_capita: bool,
}

#[derive(Args)]
struct SimulateArgs {
    /// TOML file with `eps`, `alpha`, `beta`, `initial` and optional `kappa`.
    #[arg(long, value_name = "FILE", conflicts_with_all = ["scenario", "np", "nd"])]
    system: Option<PathBuf>,
    #[arg(long)]
    scenario: Option<usize>,
    /// Initial prey density; defaults to the constants file value.
    #[arg(long)]
    np: Option<f64>,
    /// Initial predator density; defaults to the constants file value.
    #[arg(long)]
    nd: Option<f64>,
    #[arg(long, default_value_t = 12.0)]
    t_end: f64,
    #[arg(long, default_value_t = 1e-3)]
    step: f64,
}

#[derive(Args)]
struct EstimateArgs {
    /// Series CSV with header `t,N` or `t,N_p,N_d,N_T`.
    #[arg(long = "in", value_name = "FILE")]
    input: PathBuf,
    /// Column to analyse; `N` or `N_T` by default.
    #[arg(long)]
    column: Option<String>,
    /// Growth rate subtracted from the log-slope; overrides the role defaults.
    #[arg(long)]
    eps: Option<f64>,
    #[arg(long)]
    eps_p: Option<f64>,
    #[arg(long)]
    eps_d: Option<f64>,
    /// Growth rate for `N_T`; defaults to the population-weighted role mean.
    #[arg(long)]
    eps_t: Option<f64>,
}

#[derive(Subcommand)]
enum CheckCommand {
    /// Prey form against predator form along `N_p + N_d = N_T`.
    Consistency {
        #[arg(long, default_value_t = 2)]
        scenario: usize,
        #[arg(long, default_value_t = 41.0)]
        nt: f64,
        #[arg(long, default_value_t = 10)]
        points: usize,
    },
    /// Closed-form psi(L) against substitution into the prey form.
    Substitution {
        #[arg(long, default_value_t = DEFAULT_SCENARIO)]
        scenario: usize,
        #[arg(long)]
        gamma: Option<u32>,
        #[arg(long, default_value_t = 4.1)]
        nt: f64,
        #[arg(long = "L-range", value_parser = parse_l_range)]
        l_range: Option<LRange>,
    },
    /// Root classification of psi(L) per scenario.
    Roots {
        #[arg(long, value_delimiter = ',', default_values_t = [1usize, 5])]
        rows: Vec<usize>,
        #[arg(long)]
        gamma: Option<u32>,
        #[arg(long, default_value_t = 4.1)]
        nt: f64,
    },
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SystemFile {
    eps: Vec<f64>,
    alpha: Vec<Vec<f64>>,
    beta: Vec<f64>,
    initial: Vec<f64>,
    kappa: Option<usize>,
}

fn parse_domain(s: &str) -> std::result::Result<DomainMode, String> {
    s.parse().map_err(|e: ecolattice::Error| e.to_string())
}

fn parse_l_range(s: &str) -> std::result::Result<LRange, String> {
    s.parse().map_err(|e: ecolattice::Error| e.to_string())
}

fn parse_preset(s: &str) -> std::result::Result<Preset, String> {
    s.parse().map_err(|e: ecolattice::Error| e.to_string())
}

struct App {
    constants: GlobalConstants,
    scenarios: Vec<InteractionParams>,
    global: Global,
}

impl App {
    fn load(global: Global) -> Result<Self> {
        let constants = match &global.params {
            Some(path) => GlobalConstants::parse(&read(path)?).with_context(|| format!("in {}", path.display()))?,
            None => serengeti_constants(),
        };
        let raw = match &global.scenarios {
            Some(path) => {
                let file = File::open(path).with_context(|| format!("cannot open {}", path.display()))?;
                load_scenario_table(file, &constants).with_context(|| format!("in {}", path.display()))?
            }
            None => load_scenario_table(BUNDLED_TABLE.as_bytes(), &constants)?,
        };
        let mut scenarios = Vec::with_capacity(raw.len());
        for (k, p) in raw.into_iter().enumerate() {
            let v = validate_params(p).with_context(|| format!("scenario {}", k + 1))?;
            scenarios.push(v.into_inner());
        }
        Ok(Self {
            constants,
            scenarios,
            global,
        })
    }

    fn scenario(&self, index: usize) -> Result<InteractionParams> {
        if index == 0 || index > self.scenarios.len() {
            bail!("scenario {index} is outside 1..={}", self.scenarios.len());
        }
        Ok(self.scenarios[index - 1])
    }

    fn domain(&self) -> DomainMode {
        self.global.domain.unwrap_or_default()
    }

    fn workers(&self) -> usize {
        self.global
            .workers
            .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
    }

    fn sink(&self) -> Result<Box<dyn Write>> {
        Ok(match &self.global.out {
            Some(path) => Box::new(BufWriter::new(
                File::create(path).with_context(|| format!("cannot create {}", path.display()))?,
            )),
            None => Box::new(BufWriter::new(io::stdout().lock())),
        })
    }

    /// L grid for single-curve commands: the explicit range, or the default
    /// range of the selected domain.
    fn l_grid(&self, explicit: Option<LRange>, theoretical_default: &str) -> Result<Vec<f64>> {
        let domain = self.domain();
        let range = match explicit {
            Some(r) => r,
            None if domain == DomainMode::Theoretical => theoretical_default.parse()?,
            None => LRange::default(),
        };
        if domain == DomainMode::Theoretical && (range.start < -1.0 || range.stop > 1.0) {
            bail!(
                "L range {}:{} leaves [-1, 1] in theoretical mode",
                range.start,
                range.stop
            );
        }
        Ok(range.points())
    }
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    let ctx = App::load(cli.global)?;
    match cli.command {
        Command::Psi(a) => psi(&ctx, a),
        Command::Sweep(a) => sweep(&ctx, a),
        Command::Simulate(a) => simulate(&ctx, a),
        Command::Estimate(a) => estimate(&ctx, a),
        Command::Check(c) => check(&ctx, c),
        Command::Scenarios => scenarios(&ctx),
    }
}

fn psi(ctx: &App, a: PsiArgs) -> Result<()> {
    let p = ctx
        .scenario(a.scenario)?
        .with_gamma(a.gamma.unwrap_or(ctx.constants.gamma));
    let (form, q) = bw_coefficients_admissible(&p)?;
    eprintln!(
        "scenario {}: {form} form, a = {}, b = {}, c = {}",
        a.scenario,
        fmt_sig(q.a),
        fmt_sig(q.b),
        fmt_sig(q.c)
    );
    let grid = ctx.l_grid(a.l_range, "-1:1:0.01")?;
    let mut w = ctx.sink()?;
    writeln!(w, "L,psi")?;
    for l in grid {
        writeln!(w, "{},{}", fmt_sig(l), fmt_sig(psi_bw(l, a.nt, &q)))?;
    }
    w.flush()?;
    Ok(())
}

fn sweep(ctx: &App, a: SweepArgs) -> Result<()> {
    let mut spec = match (&a.preset, &a.spec) {
        (Some(p), _) => p.spec(),
        (None, Some(path)) => SweepSpec::from_toml(&read(path)?).with_context(|| format!("in {}", path.display()))?,
        (None, None) => unreachable!("clap requires one of --preset and --spec"),
    };
    if let Some(r) = a.l_range {
        spec.l_range = r;
    }
    if let Some(g) = a.gamma {
        spec.gamma_values = g;
    }
    if let Some(n) = a.nt {
        spec.n_t_values = n;
    }
    if let Some(r) = a.rows {
        spec.scenario_indices = r;
    }
    if let Some(d) = ctx.global.domain {
        spec.domain = d;
    }
    spec.per_capita |= a.per_capita;

    let table = run_sweep(&spec, &ctx.scenarios, ctx.workers())?;
    for s in &table.skipped {
        eprintln!("skipped scenario {}: {}", s.scenario, s.reason);
    }
    let mut w = ctx.sink()?;
    table.write_csv(&mut w)?;
    w.flush()?;
    Ok(())
}

fn simulate(ctx: &App, a: SimulateArgs) -> Result<()> {
    if let Some(path) = &a.system {
        let f: SystemFile = toml::from_str(&read(path)?).with_context(|| format!("in {}", path.display()))?;
        let kappa = f.kappa.unwrap_or(f.eps.len());
        let set = SpeciesSet::new(f.eps, f.alpha, f.beta, kappa)?;
        let tr = integrate(&set, &f.initial, a.t_end, a.step)?;
        let mut w = ctx.sink()?;
        tr.write_csv(&mut w)?;
        w.flush()?;
        return Ok(());
    }
    let p = ctx.scenario(a.scenario.unwrap_or(DEFAULT_SCENARIO))?;
    let observed = ctx.constants.observed_state().transpose()?;
    let n_p =
        a.np.or(observed.map(|s| s.n_p()))
            .context("no initial prey density (--np)")?;
    let n_d =
        a.nd.or(observed.map(|s| s.n_d()))
            .context("no initial predator density (--nd)")?;
    let start = PopulationState::new(n_p, n_d)?;
    let set = SpeciesSet::two_role(&p)?;
    let tr = integrate(&set, &[start.n_p(), start.n_d()], a.t_end, a.step)?;
    let mut w = ctx.sink()?;
    tr.write_two_role_csv(&mut w)?;
    w.flush()?;
    Ok(())
}

fn estimate(ctx: &App, a: EstimateArgs) -> Result<()> {
    let file = File::open(&a.input).with_context(|| format!("cannot open {}", a.input.display()))?;
    let series = read_series_csv(file).with_context(|| format!("in {}", a.input.display()))?;
    let name = match &a.column {
        Some(c) => c.clone(),
        None if series.column("N").is_some() => "N".to_string(),
        None => "N_T".to_string(),
    };
    let counts = series
        .column(&name)
        .with_context(|| format!("no column `{name}` in {}", a.input.display()))?;
    let eps_p = a.eps_p.unwrap_or(ctx.constants.eps_p);
    let eps_d = a.eps_d.unwrap_or(ctx.constants.eps_d);
    let eps = match (a.eps, name.as_str()) {
        (Some(e), _) => e,
        (None, "N_p") => eps_p,
        (None, "N_d") => eps_d,
        (None, "N_T") => match a.eps_t {
            Some(e) => e,
            None => {
                let np = series
                    .column("N_p")
                    .context("N_T needs N_p and N_d columns, or --eps-t")?;
                let nd = series
                    .column("N_d")
                    .context("N_T needs N_p and N_d columns, or --eps-t")?;
                default_total_eps(eps_p, eps_d, np[0], nd[0])
            }
        },
        (None, other) => bail!("no default growth rate for column `{other}`; pass --eps"),
    };
    let est = estimate_omega(&series.times, counts, eps)?;
    eprintln!(
        "column {name}: eps = {}, mean omega = {}",
        fmt_sig(eps),
        fmt_sig(est.mean)
    );
    let mut w = ctx.sink()?;
    est.write_csv(&mut w)?;
    w.flush()?;
    Ok(())
}

fn check(ctx: &App, c: CheckCommand) -> Result<()> {
    match c {
        CheckCommand::Consistency { scenario, nt, points } => {
            let p = ctx.scenario(scenario)?;
            if points == 0 {
                bail!("--points must be at least 1");
            }
            let mut rows = Vec::with_capacity(points);
            for k in 0..points {
                let n_p = nt * k as f64 / points as f64;
                rows.push(form_consistency_report(&PopulationState::new(n_p, nt - n_p)?, &p)?);
            }
            let mut w = ctx.sink()?;
            write_consistency_csv(&mut w, &rows)?;
            w.flush()?;
        }
        CheckCommand::Substitution {
            scenario,
            gamma,
            nt,
            l_range,
        } => {
            let p = ctx.scenario(scenario)?.with_gamma(gamma.unwrap_or(ctx.constants.gamma));
            let grid = match l_range {
                Some(r) => r.points(),
                None => "-1:1:0.01".parse::<LRange>()?.points(),
            };
            let report = bw_vs_substitution_check(&p, &grid, nt)?;
            if report.disagrees() {
                eprintln!(
                    "closed form and substitution disagree: max relative deviation {}",
                    fmt_sig(report.max_rel)
                );
            }
            let mut w = ctx.sink()?;
            report.write_csv(&mut w)?;
            report.write_summary(&mut w)?;
            w.flush()?;
        }
        CheckCommand::Roots { rows, gamma, nt } => {
            let mut w = ctx.sink()?;
            writeln!(
                w,
                "scenario,form,gamma,a,b,c,discriminant,classification,roots,extremum,L_extremum"
            )?;
            let mut complex = Vec::new();
            for index in rows {
                let p = ctx.scenario(index)?.with_gamma(gamma.unwrap_or(ctx.constants.gamma));
                let (form, q) = bw_coefficients_admissible(&p)?;
                let r = bw_roots(&q);
                if r.is_complex() {
                    complex.push(index);
                }
                let (kind, at) = match bw_extremum(&q, nt) {
                    Extremum::Maximum { l, .. } => ("maximum", fmt_sig(l)),
                    Extremum::Minimum { l, .. } => ("minimum", fmt_sig(l)),
                    Extremum::Linear => ("none", String::new()),
                };
                writeln!(
                    w,
                    "{index},{form},{},{},{},{},{},{},{},{kind},{at}",
                    p.gamma,
                    fmt_sig(q.a),
                    fmt_sig(q.b),
                    fmt_sig(q.c),
                    r.discriminant().map(fmt_sig).unwrap_or_default(),
                    r.kind(),
                    r.roots_text()
                )?;
            }
            let listed: Vec<String> = complex.iter().map(|k| k.to_string()).collect();
            writeln!(w, "# complex_roots_in = [{}]", listed.join(", "))?;
            w.flush()?;
        }
    }
    Ok(())
}

fn scenarios(ctx: &App) -> Result<()> {
    let mut w = ctx.sink()?;
    writeln!(
        w,
        "scenario,alpha_pp,alpha_dd,lambda1,lambda2,xi_p,xi_d,alpha_pd,beta_p,beta_d,nu,eps_p,eps_d,gamma,prey_form,predator_form"
    )?;
    for (k, p) in ctx.scenarios.iter().enumerate() {
        let prey = if bw_coefficients(p).is_ok() { "ok" } else { "singular" };
        let pred = if p.predator_form_singularities().is_empty() {
            "ok"
        } else {
            "singular"
        };
        writeln!(
            w,
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{prey},{pred}",
            k + 1,
            fmt_sig(p.alpha_pp),
            fmt_sig(p.alpha_dd),
            fmt_sig(p.lambda1),
            fmt_sig(p.lambda2),
            fmt_sig(p.xi_p),
            fmt_sig(p.xi_d),
            fmt_sig(p.alpha_pd),
            fmt_sig(p.beta_p),
            fmt_sig(p.beta_d),
            fmt_sig(p.nu),
            fmt_sig(p.eps_p),
            fmt_sig(p.eps_d),
            p.gamma
        )?;
    }
    w.flush()?;
    Ok(())
}
