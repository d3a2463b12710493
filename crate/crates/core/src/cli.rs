//! Command-line front end. `run` returns the process exit code.

use std::ffi::OsString;
use std::fmt;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_rational::Ratio;
use serde::Serialize;

use crate::catalysis::{
    fig5_rows, regime_map, simple_perm_report, solve_catalyst_state, stationary_catalyst,
    RegimeGrid, SimplePermSpec,
};
use crate::coherence::coherence_suite;
use crate::error::Error;
use crate::lp::{lp_work_upper_bound, LpStatus};
use crate::output::{fmt_opt, fmt_sig, to_json};
use crate::perm::{apply_permutation, optimal_noncatalytic, otto_swap, qubit_table, Objective, PermutationMap};
use crate::rational::{rationalize, MAX_DIM};
use crate::thermo::{
    gibbs_populations, gibbs_product, stroke_report, CycleReport, InverseTemperaturePair, Spectrum,
    TOL,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_NO_REGIME: i32 = 3;
pub const EXIT_GUARD: i32 = 4;

#[derive(Parser, Debug)]
#[command(name = "twostroke", version, about = "Two-stroke heat engines with and without a catalyst")]
struct Cli {
    /// Write the result here instead of stdout.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    /// Seed for randomized suites.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Work, heats, efficiency and modes of one stroke.
    Report {
        #[command(flatten)]
        phys: PhysArgs,
        #[arg(long)]
        catalyst_dim: Option<usize>,
        #[command(flatten)]
        perm: PermArgs,
    },
    /// All 24 two-qubit permutations.
    Table24 {
        #[command(flatten)]
        phys: PhysArgs,
    },
    /// Best permutation without a catalyst.
    Optimize {
        #[command(flatten)]
        phys: PhysArgs,
        #[arg(long, value_enum, default_value_t = ObjectiveArg::Efficiency)]
        objective: ObjectiveArg,
        /// Hot levels, comma separated; overrides the qubit gap.
        #[arg(long, value_delimiter = ',')]
        hot_levels: Option<Vec<f64>>,
        /// Cold levels, comma separated; overrides the qubit gap.
        #[arg(long, value_delimiter = ',')]
        cold_levels: Option<Vec<f64>>,
    },
    /// Operating regions over (beta_c/beta_h, omega_c/omega_h).
    RegimeMap {
        #[arg(long, default_value_t = 1.0)]
        beta_ratio_min: f64,
        #[arg(long, default_value_t = 5.0)]
        beta_ratio_max: f64,
        #[arg(long, default_value_t = 0.05)]
        freq_ratio_min: f64,
        #[arg(long, default_value_t = 4.0)]
        freq_ratio_max: f64,
        #[arg(long, default_value_t = 200)]
        resolution: usize,
        /// Catalytic ratios d/n; each is realized in lowest terms.
        #[arg(long, value_delimiter = ',', default_value = "2.2,3.2,4")]
        d_over_n: Vec<f64>,
    },
    /// Catalytic work against the number of cold swaps.
    Fig5 {
        #[arg(long, default_value_t = 30)]
        d: usize,
        #[arg(long, default_value_t = 0.5)]
        bh_wh: f64,
        /// beta_c*omega_c / (beta_h*omega_h).
        #[arg(long, default_value_t = 8.0)]
        ratio: f64,
        /// omega_c / omega_h.
        #[arg(long, default_value_t = 0.9)]
        freq_ratio: f64,
    },
    /// LP upper bound on catalytic work.
    LpBound {
        #[command(flatten)]
        phys: PhysArgs,
        #[arg(long, default_value_t = 2)]
        catalyst_dim: usize,
        /// Initial catalyst populations; defaults to the stationary state
        /// of the simple permutation with one cold swap, else uniform.
        #[arg(long, value_delimiter = ',')]
        catalyst: Option<Vec<f64>>,
    },
    /// Randomized check that catalyst coherence does not change heats.
    CoherenceCheck {
        #[arg(long, default_value_t = 200)]
        instances: usize,
    },
}

#[derive(Args, Debug)]
struct PhysArgs {
    #[arg(long)]
    beta_h: Option<f64>,
    #[arg(long)]
    beta_c: Option<f64>,
    #[arg(long)]
    omega_h: Option<f64>,
    #[arg(long)]
    omega_c: Option<f64>,
    /// beta_h*omega_h with omega_h = 1.
    #[arg(long)]
    bh_wh: Option<f64>,
    /// beta_c*omega_c with omega_h = 1.
    #[arg(long)]
    bc_wc: Option<f64>,
}

#[derive(Args, Debug)]
#[group(multiple = false)]
struct PermArgs {
    #[arg(long)]
    otto: bool,
    /// m,n
    #[arg(long, value_delimiter = ',', num_args = 1)]
    simple: Option<Vec<usize>>,
    /// `identity` or a comma separated image list.
    #[arg(long)]
    perm: Option<String>,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum ObjectiveArg {
    Efficiency,
    Work,
}

/// Physical parameters after validation.
#[derive(Debug, Clone, Copy)]
pub struct Physical {
    pub omega_h: f64,
    pub omega_c: f64,
    pub beta: InverseTemperaturePair,
}

#[derive(Debug)]
struct Failure {
    code: i32,
    message: String,
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

fn config(message: impl Into<String>) -> Failure {
    Failure {
        code: EXIT_CONFIG,
        message: message.into(),
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::InvalidSpectrum(_)
            | Error::InvalidTemperatures(_)
            | Error::InvalidDistribution(_)
            | Error::ShapeMismatch(_)
            | Error::InvalidPermutation(_)
            | Error::InvalidSimplePerm(_)
            | Error::OutsideWindow { .. }
            | Error::Overflow => EXIT_CONFIG,
            Error::InfeasibleCatalyst { .. }
            | Error::Singular
            | Error::DegeneratePoint
            | Error::CyclicityViolated(_)
            | Error::Inconsistent(_) => EXIT_NO_REGIME,
            Error::EnumerationTooLarge(_) => EXIT_GUARD,
            _ => EXIT_FAILURE,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

impl PhysArgs {
    fn resolve(&self) -> Result<Physical, Failure> {
        let (omega_h, omega_c, beta_h, beta_c) = if self.bh_wh.is_some() || self.bc_wc.is_some() {
            if self.beta_h.is_some() || self.beta_c.is_some() {
                return Err(config("give either --beta-h/--beta-c or --bh-wh/--bc-wc"));
            }
            if self.omega_h.is_some_and(|w| w != 1.0) {
                return Err(config("--bh-wh/--bc-wc fix omega_h = 1"));
            }
            let (Some(bh_wh), Some(bc_wc)) = (self.bh_wh, self.bc_wc) else {
                return Err(config("--bh-wh and --bc-wc go together"));
            };
            let omega_c = self.omega_c.ok_or_else(|| config("missing --omega-c"))?;
            (1.0, omega_c, bh_wh, bc_wc / omega_c)
        } else {
            let get = |v: Option<f64>, name: &str| v.ok_or_else(|| config(format!("missing --{name}")));
            (
                get(self.omega_h, "omega-h")?,
                get(self.omega_c, "omega-c")?,
                get(self.beta_h, "beta-h")?,
                get(self.beta_c, "beta-c")?,
            )
        };
        if !(omega_h > 0.0 && omega_c > 0.0 && omega_h.is_finite() && omega_c.is_finite()) {
            return Err(config("frequencies must be positive and finite"));
        }
        Ok(Physical {
            omega_h,
            omega_c,
            beta: InverseTemperaturePair::new(beta_h, beta_c)?,
        })
    }
}

#[derive(Serialize)]
struct CatalystOut {
    p: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    delta_p: Option<f64>,
}

#[derive(Serialize)]
struct ReportOut {
    #[serde(flatten)]
    report: CycleReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    catalyst: Option<CatalystOut>,
}

fn parse_perm(s: &str, n: usize) -> Result<PermutationMap, Failure> {
    if s.trim() == "identity" {
        return Ok(PermutationMap::identity(n));
    }
    let image = s
        .split(',')
        .map(|t| t.trim().parse::<usize>())
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| config(format!("bad --perm: {e}")))?;
    if image.len() != n {
        return Err(config(format!("--perm needs {n} entries, got {}", image.len())));
    }
    Ok(PermutationMap::new(image)?)
}

fn cmd_report(phys: Physical, catalyst_dim: Option<usize>, perm: &PermArgs) -> Result<String, Failure> {
    let (hh, hc) = (Spectrum::qubit(phys.omega_h)?, Spectrum::qubit(phys.omega_c)?);
    if let Some(mn) = &perm.simple {
        let [m, n] = mn[..] else {
            return Err(config("--simple takes m,n"));
        };
        let spec = SimplePermSpec::new(m, n)?;
        if catalyst_dim.is_some_and(|d| d != spec.d()) {
            return Err(config(format!("--simple {m},{n} needs catalyst dimension {}", spec.d())));
        }
        let r = simple_perm_report(spec, phys.omega_h, phys.omega_c, phys.beta)?;
        return Ok(to_json(&ReportOut {
            report: r.report,
            catalyst: Some(CatalystOut {
                p: r.catalyst.p,
                delta_p: Some(r.catalyst.delta_p),
            }),
        }));
    }
    let d_s = catalyst_dim.unwrap_or(1);
    if d_s == 0 {
        return Err(config("catalyst dimension must be at least 1"));
    }
    let map = match &perm.perm {
        Some(s) => parse_perm(s, 4 * d_s)?,
        None => {
            if d_s != 1 {
                return Err(config("--otto acts without a catalyst"));
            }
            otto_swap()
        }
    };
    let hot = gibbs_populations(&hh, phys.beta.beta_h())?;
    let cold = gibbs_populations(&hc, phys.beta.beta_c())?;
    let p = if d_s == 1 {
        vec![1.0]
    } else {
        stationary_catalyst(&map, d_s, &hot, &cold)?
    };
    let initial = gibbs_product(&p, &hh, &hc, phys.beta)?;
    let report = stroke_report(&initial, &apply_permutation(&initial, &map)?, &hh, &hc)?;
    if perm.perm.is_none() && report.work <= TOL {
        return Err(Failure {
            code: EXIT_NO_REGIME,
            message: "no engine regime".into(),
        });
    }
    Ok(to_json(&ReportOut {
        report,
        catalyst: (d_s > 1).then_some(CatalystOut { p, delta_p: None }),
    }))
}

fn cmd_table24(phys: Physical) -> Result<String, Failure> {
    let rows = qubit_table(phys.beta.beta_h(), phys.omega_h, phys.beta.beta_c(), phys.omega_c)?;
    let mut w = csv::Writer::from_writer(Vec::new());
    let csv_err = |e: csv::Error| Failure {
        code: EXIT_FAILURE,
        message: e.to_string(),
    };
    w.write_record(["perm_index", "image", "work", "efficiency"]).map_err(csv_err)?;
    for r in rows {
        w.write_record([
            r.perm_index.to_string(),
            r.image.to_label(),
            fmt_sig(r.work),
            fmt_opt(r.efficiency),
        ])
        .map_err(csv_err)?;
    }
    finish_csv(w)
}

fn finish_csv(w: csv::Writer<Vec<u8>>) -> Result<String, Failure> {
    let bytes = w.into_inner().map_err(|e| Failure {
        code: EXIT_FAILURE,
        message: e.to_string(),
    })?;
    Ok(String::from_utf8(bytes).expect("CSV output is UTF-8"))
}

fn cmd_optimize(
    phys: Physical,
    objective: ObjectiveArg,
    hot_levels: Option<Vec<f64>>,
    cold_levels: Option<Vec<f64>>,
) -> Result<(String, bool), Failure> {
    let hh = match hot_levels {
        Some(l) => Spectrum::new(l)?,
        None => Spectrum::qubit(phys.omega_h)?,
    };
    let hc = match cold_levels {
        Some(l) => Spectrum::new(l)?,
        None => Spectrum::qubit(phys.omega_c)?,
    };
    let objective = match objective {
        ObjectiveArg::Efficiency => Objective::Efficiency,
        ObjectiveArg::Work => Objective::Work,
    };
    let r = optimal_noncatalytic(&hh, &hc, phys.beta, objective)?;
    Ok((to_json(&r), r.engine_regime))
}

fn cmd_regime_map(
    beta_ratio: (f64, f64),
    freq_ratio: (f64, f64),
    resolution: usize,
    d_over_n: &[f64],
) -> Result<String, Failure> {
    if !(beta_ratio.0 > 0.0 && beta_ratio.0 <= beta_ratio.1 && freq_ratio.0 > 0.0 && freq_ratio.0 <= freq_ratio.1) {
        return Err(config("ranges must be positive and ordered"));
    }
    let mut qs: Vec<Ratio<u64>> = Vec::with_capacity(d_over_n.len());
    for &x in d_over_n {
        let q = rationalize(x, MAX_DIM)
            .filter(|q| (crate::rational::to_f64(*q) - x).abs() <= 1e-9 * x.abs().max(1.0))
            .ok_or_else(|| config(format!("d/n = {x} is not a ratio with d <= {MAX_DIM}")))?;
        if *q.denom() == 0 || q.numer() < q.denom() {
            return Err(config(format!("d/n = {x} must be at least 1")));
        }
        qs.push(q);
    }
    let cells = regime_map(
        &qs,
        RegimeGrid {
            beta_ratio,
            freq_ratio,
            resolution: (resolution, resolution),
        },
    );
    let mut out = format!("# units beta_h = omega_h = 1; d/n realized in lowest terms with d <= {MAX_DIM}\n");
    let mut w = csv::Writer::from_writer(Vec::new());
    let csv_err = |e: csv::Error| Failure {
        code: EXIT_FAILURE,
        message: e.to_string(),
    };
    w.write_record(["beta_ratio", "freq_ratio", "d_over_n", "feasible", "region_label"])
        .map_err(csv_err)?;
    for c in cells {
        w.write_record([
            fmt_sig(c.beta_ratio),
            fmt_sig(c.freq_ratio),
            c.d_over_n.map(|q| format!("{}/{}", q.numer(), q.denom())).unwrap_or_default(),
            c.feasible.to_string(),
            c.label.as_str().to_string(),
        ])
        .map_err(csv_err)?;
    }
    out.push_str(&finish_csv(w)?);
    Ok(out)
}

fn cmd_fig5(d: usize, bh_wh: f64, ratio: f64, freq_ratio: f64) -> Result<String, Failure> {
    let rows = fig5_rows(d, bh_wh, ratio * bh_wh, freq_ratio)?;
    let mut w = csv::Writer::from_writer(Vec::new());
    let csv_err = |e: csv::Error| Failure {
        code: EXIT_FAILURE,
        message: e.to_string(),
    };
    w.write_record(["n", "W_catalytic", "W_noncatalytic_baseline", "efficiency"])
        .map_err(csv_err)?;
    for r in rows {
        w.write_record([
            r.n.to_string(),
            fmt_sig(r.w_catalytic),
            fmt_sig(r.w_noncatalytic_baseline),
            fmt_opt(r.efficiency),
        ])
        .map_err(csv_err)?;
    }
    finish_csv(w)
}

fn cmd_lp_bound(phys: Physical, d_s: usize, catalyst: Option<Vec<f64>>) -> Result<(String, LpStatus), Failure> {
    if d_s == 0 {
        return Err(config("catalyst dimension must be at least 1"));
    }
    let (hh, hc) = (Spectrum::qubit(phys.omega_h)?, Spectrum::qubit(phys.omega_c)?);
    let p = match catalyst {
        Some(p) if p.len() != d_s => {
            return Err(config(format!("--catalyst needs {d_s} entries, got {}", p.len())))
        }
        Some(p) => p,
        None if d_s == 1 => vec![1.0],
        None => {
            let a_h = (-phys.beta.beta_h() * phys.omega_h).exp();
            let a_c = (-phys.beta.beta_c() * phys.omega_c).exp();
            SimplePermSpec::ladder(d_s)
                .and_then(|spec| solve_catalyst_state(spec, a_h, a_c))
                .map(|c| c.p)
                .unwrap_or_else(|_| vec![1.0 / d_s as f64; d_s])
        }
    };
    let initial = gibbs_product(&p, &hh, &hc, phys.beta)?;
    let h = Spectrum::tensor_sum(&[&Spectrum::trivial(d_s), &hh, &hc]);
    let sol = lp_work_upper_bound(&h, &initial, d_s)?;
    Ok((to_json(&sol), sol.status))
}

#[derive(Serialize)]
struct CoherenceOut {
    #[serde(flatten)]
    suite: crate::coherence::CoherenceSuiteReport,
    max_residual: f64,
}

fn cmd_coherence(seed: u64, instances: usize) -> Result<(String, bool), Failure> {
    let suite = coherence_suite(seed, instances)?;
    let max_residual = suite
        .max_heat_gap
        .max(suite.max_work_gap)
        .max(suite.max_catalyst_drift);
    let ok = suite.failures == 0 && max_residual <= 1e-10;
    Ok((to_json(&CoherenceOut { suite, max_residual }), ok))
}

fn dispatch(cli: &Cli) -> Result<(String, i32), Failure> {
    let ok = |s: String| Ok((s, EXIT_OK));
    match &cli.command {
        Command::Report {
            phys,
            catalyst_dim,
            perm,
        } => ok(cmd_report(phys.resolve()?, *catalyst_dim, perm)?),
        Command::Table24 { phys } => ok(cmd_table24(phys.resolve()?)?),
        Command::Optimize {
            phys,
            objective,
            hot_levels,
            cold_levels,
        } => {
            let (s, engine) = cmd_optimize(phys.resolve()?, *objective, hot_levels.clone(), cold_levels.clone())?;
            Ok((s, if engine { EXIT_OK } else { EXIT_NO_REGIME }))
        }
        Command::RegimeMap {
            beta_ratio_min,
            beta_ratio_max,
            freq_ratio_min,
            freq_ratio_max,
            resolution,
            d_over_n,
        } => ok(cmd_regime_map(
            (*beta_ratio_min, *beta_ratio_max),
            (*freq_ratio_min, *freq_ratio_max),
            *resolution,
            d_over_n,
        )?),
        Command::Fig5 {
            d,
            bh_wh,
            ratio,
            freq_ratio,
        } => ok(cmd_fig5(*d, *bh_wh, *ratio, *freq_ratio)?),
        Command::LpBound {
            phys,
            catalyst_dim,
            catalyst,
        } => {
            let (s, status) = cmd_lp_bound(phys.resolve()?, *catalyst_dim, catalyst.clone())?;
            let code = match status {
                LpStatus::Optimal => EXIT_OK,
                LpStatus::Infeasible => EXIT_NO_REGIME,
                LpStatus::GuardExceeded => EXIT_GUARD,
            };
            Ok((s, code))
        }
        Command::CoherenceCheck { instances } => {
            let (s, pass) = cmd_coherence(cli.seed, *instances)?;
            Ok((s, if pass { EXIT_OK } else { EXIT_FAILURE }))
        }
    }
}

fn emit(text: &str, path: Option<&PathBuf>) -> std::io::Result<()> {
    match path {
        Some(p) => std::fs::write(p, text),
        None => std::io::stdout().lock().write_all(text.as_bytes()),
    }
}

/// Parses `args` (program name first), runs the command and returns the
/// exit code. Output goes to stdout or `--output`; diagnostics to stderr.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
        }
    };
    match dispatch(&cli) {
        Ok((text, code)) => {
            if let Err(e) = emit(&text, cli.output.as_ref()) {
                eprintln!("error: {e}");
                return EXIT_FAILURE;
            }
            code
        }
        Err(f) => {
            eprintln!("error: {f}");
            f.code
        }
    }
}
