use crate::output::{self, float, SampleFile};
use clap::{Args, Parser, Subcommand, ValueEnum};
use idemconc::constants::{constants_table, minimize_scalar, SeriesKind};
use idemconc::constructions::{dirichlet, dirichlet_grid_product};
use idemconc::grids::{grid_ratio, predicted_grid_limit};
use idemconc::pipeline::{
    build_peaking_idempotent, concentrate_with_polynomial, l2_gap_bound, random_concentration_trial,
    PeakingOptions, PipelineConfig, Route,
};
use idemconc::trigpoly::{IntervalUnion, QuadratureSpec};
use serde::Serialize;
use std::path::{Path, PathBuf};

/// Default seed, used whenever `--seed` is omitted.
pub const DEFAULT_SEED: u64 = 7;

#[derive(Debug, Parser)]
#[command(name = "idemconc", version, about = "Concentrating idempotent trigonometric polynomials")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct Common {
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Relative tolerance of the adaptive quadrature.
    #[arg(long, global = true, default_value_t = 1e-9)]
    pub tol: f64,
    /// Output file (standard output when omitted).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Write `(x, |S(x)|^p)` samples to this CSV file.
    #[arg(long, global = true)]
    pub emit_samples: Option<PathBuf>,
    #[arg(long, global = true, default_value_t = 4096)]
    pub samples: u64,
    #[arg(long, global = true, conflicts_with = "csv")]
    pub json: bool,
    /// Tabular output for `constants`, `grid-scan` and `l2gap`.
    #[arg(long, global = true)]
    pub csv: bool,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum PeakPoint {
    #[value(name = "0", alias = "zero")]
    Zero,
    #[value(name = "half", alias = "0.5")]
    Half,
}

impl PeakPoint {
    fn value(self) -> f64 {
        match self {
            PeakPoint::Zero => 0.0,
            PeakPoint::Half => 0.5,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum RouteArg {
    Open,
    Measurable,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Table of the extremal constants.
    Constants,
    /// Gap-peaking idempotent at 0 or 1/2.
    Peak {
        #[arg(long, value_enum)]
        a: PeakPoint,
        #[arg(long)]
        p: f64,
        #[arg(long, default_value_t = 0.5)]
        epsilon: f64,
        #[arg(long, default_value_t = 0.25)]
        delta: f64,
        #[arg(long, default_value_t = 10)]
        gap: u64,
        #[arg(long, default_value_t = idemconc::pipeline::DEFAULT_PEAK_DEGREE_BUDGET)]
        max_degree: u64,
    },
    /// Idempotent concentrating on a symmetric union of intervals.
    Concentrate {
        /// JSON file: `{"intervals": [[a, b], ...], "symmetric": true}` or a
        /// bare list of arcs, which is symmetrized.
        #[arg(long, required_unless_present = "arc")]
        set: Option<PathBuf>,
        /// Arc `a:b`, symmetrized; repeatable.
        #[arg(long, value_parser = parse_arc)]
        arc: Vec<(f64, f64)>,
        #[arg(long)]
        p: f64,
        #[arg(long, default_value_t = 0.02)]
        target: f64,
        #[arg(long, default_value_t = 0)]
        gap: u64,
        #[arg(long, default_value_t = 0.6)]
        epsilon: f64,
        #[arg(long, default_value_t = 0.3)]
        delta: f64,
        #[arg(long, default_value_t = 0.05)]
        eta: f64,
        #[arg(long, default_value_t = 10.0)]
        theta: f64,
        #[arg(long)]
        j: Option<u32>,
        #[arg(long)]
        r: Option<u64>,
        #[arg(long)]
        l: Option<u32>,
        #[arg(long, value_enum, default_value = "measurable")]
        route: RouteArg,
        #[arg(long, default_value_t = 2_000_000)]
        max_degree: u64,
    },
    /// Grid ratios of Dirichlet grid products against their limits.
    GridScan {
        #[arg(long, value_delimiter = ',', default_values_t = [101u64, 401])]
        q: Vec<u64>,
        #[arg(long, default_value_t = 4.0)]
        p: f64,
        #[arg(long, default_value_t = 1)]
        l: u32,
        #[arg(long)]
        star: bool,
        /// Kernel length; defaults to the minimizer of the limit.
        #[arg(long)]
        r: Option<u64>,
    },
    /// Randomized grid concentration trials.
    Random {
        #[arg(long, default_value_t = 401)]
        q: u64,
        #[arg(long, default_value_t = 100)]
        r: u64,
        #[arg(long, default_value_t = 2)]
        l: u32,
        #[arg(long, default_value_t = 4.0)]
        p: f64,
        /// Success threshold relative to the deterministic base ratio.
        #[arg(long, default_value_t = 0.8)]
        k_factor: f64,
        #[arg(long, default_value_t = 200)]
        trials: u32,
    },
    /// `L²` concentration of dilated Dirichlet kernels versus the gap bound.
    L2gap {
        #[arg(long, default_value_t = 0.01)]
        half_width: f64,
        #[arg(long, default_value_t = 3)]
        n: u64,
        #[arg(long, value_delimiter = ',', default_values_t = [10u64, 100, 1000])]
        m: Vec<u64>,
    },
}

fn parse_arc(s: &str) -> Result<(f64, f64), String> {
    let (a, b) = s.split_once(':').ok_or("expected a:b")?;
    let a: f64 = a.trim().parse().map_err(|e| format!("{e}"))?;
    let b: f64 = b.trim().parse().map_err(|e| format!("{e}"))?;
    Ok((a, b))
}

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Library(idemconc::Error),
    Io(std::io::Error),
}

impl From<idemconc::Error> for CliError {
    fn from(e: idemconc::Error) -> Self {
        CliError::Library(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Io(e.into())
    }
}

type CliResult<T> = Result<T, CliError>;

pub fn run(cli: &Cli) -> CliResult<()> {
    let c = &cli.common;
    let quadrature = QuadratureSpec::with_rel_tol(c.tol);
    quadrature.validate()?;
    let tabular = matches!(cli.command, Command::Constants | Command::GridScan { .. } | Command::L2gap { .. });
    if c.csv && !tabular {
        return Err(CliError::Usage("--csv is only available for constants, grid-scan and l2gap".into()));
    }
    if c.emit_samples.is_some() && !matches!(cli.command, Command::Concentrate { .. } | Command::Peak { .. }) {
        return Err(CliError::Usage("--emit-samples applies to concentrate and peak".into()));
    }
    let out = c.out.as_deref();
    match &cli.command {
        Command::Constants => constants(c.csv, out),
        Command::Peak {
            a,
            p,
            epsilon,
            delta,
            gap,
            max_degree,
        } => {
            let mut o = PeakingOptions::new(*epsilon, *delta, *gap);
            o.max_degree = *max_degree;
            o.quadrature = quadrature;
            let t = build_peaking_idempotent(a.value(), *p, &o)?;
            let samples = match &c.emit_samples {
                Some(path) => Some(output::write_samples(path, c.samples, |x| t.modulus(x).powf(*p))?),
                None => None,
            };
            let result = PeakOutput {
                a: t.peak_point,
                p: *p,
                family: t.family.map(|f| format!("{f:?}")),
                depth: t.depth,
                base: t.base,
                peak_mass: t.peak_mass,
                marginal_mass: t.marginal_mass,
                envelope: t.envelope,
                polynomial: t.poly.descriptor(),
                samples,
            };
            output::write_json(&output::envelope("peak", &result)?, out)?;
            Ok(())
        }
        Command::Concentrate {
            set,
            arc,
            p,
            target,
            gap,
            epsilon,
            delta,
            eta,
            theta,
            j,
            r,
            l,
            route,
            max_degree,
        } => {
            let set = load_set(set.as_deref(), arc)?;
            let config = PipelineConfig {
                p: *p,
                target_c: *target,
                gap_n: *gap,
                epsilon: *epsilon,
                delta: *delta,
                eta: *eta,
                theta: *theta,
                j: *j,
                r: *r,
                l: *l,
                seed: c.seed,
                route: match route {
                    RouteArg::Open => Route::Open,
                    RouteArg::Measurable => Route::Measurable,
                },
                max_degree: *max_degree,
                quadrature,
                ..PipelineConfig::default()
            };
            let conc = concentrate_with_polynomial(&set, &config)?;
            let samples = match &c.emit_samples {
                Some(path) => Some(output::write_samples(path, c.samples, |x| conc.form.evaluate(x).norm().powf(*p))?),
                None => None,
            };
            let result = ConcentrateOutput {
                report: conc.report,
                samples,
            };
            output::write_json(&output::envelope("concentrate", &result)?, out)?;
            Ok(())
        }
        Command::GridScan { q, p, l, star, r } => grid_scan(q, *p, *l, *star, *r, c.csv, out),
        Command::Random {
            q,
            r,
            l,
            p,
            k_factor,
            trials,
        } => {
            let base = random_concentration_trial(*q, *r, *l, *p, 0.0, 0, c.seed)?;
            let rep = random_concentration_trial(*q, *r, *l, *p, k_factor * base.base_ratio, *trials, c.seed)?;
            output::write_json(&output::envelope("random", &rep)?, out)?;
            Ok(())
        }
        Command::L2gap { half_width, n, m } => l2gap(*half_width, *n, m, c.csv, out),
    }
}

#[derive(Serialize)]
struct PeakOutput {
    a: f64,
    p: f64,
    family: Option<String>,
    depth: u32,
    base: u64,
    peak_mass: f64,
    marginal_mass: Option<f64>,
    envelope: Option<idemconc::pipeline::Envelope>,
    polynomial: idemconc::trigpoly::PolyDescriptor,
    samples: Option<SampleFile>,
}

#[derive(Serialize)]
struct ConcentrateOutput {
    report: idemconc::pipeline::ConcentrationReport,
    samples: Option<SampleFile>,
}

fn load_set(path: Option<&Path>, arcs: &[(f64, f64)]) -> CliResult<IntervalUnion> {
    if let Some(path) = path {
        let text = std::fs::read_to_string(path)?;
        let value: serde_json::Value = serde_json::from_str(&text)?;
        if value.is_array() {
            let arcs: Vec<(f64, f64)> = serde_json::from_value(value)?;
            return Ok(IntervalUnion::symmetrize(&arcs)?);
        }
        return serde_json::from_value(value).map_err(|e| {
            CliError::Library(idemconc::Error::InvalidInput(format!("set file: {e}")))
        });
    }
    Ok(IntervalUnion::symmetrize(arcs)?)
}

fn constants(csv: bool, out: Option<&Path>) -> CliResult<()> {
    let t = constants_table()?;
    if csv {
        let rows = [
            ("c2", t.c2),
            ("two_c2", t.two_c2),
            ("min_a2", t.min_a2),
            ("min_a2_argmin", t.min_a2_argmin),
            ("c4_lower", t.c4_lower),
            ("c4_argmax", t.c4_argmax),
            ("beta_0225", t.beta_0225),
            ("two_over_beta", t.two_over_beta),
        ]
        .iter()
        .map(|(k, v)| vec![k.to_string(), float(*v)])
        .collect::<Vec<_>>();
        output::write_csv(&["name", "value"], &rows, out)?;
    } else {
        output::write_json(&output::envelope("constants", &t)?, out)?;
    }
    Ok(())
}

#[derive(Serialize)]
struct GridRow {
    q: u64,
    r: u64,
    l: u32,
    p: f64,
    star: bool,
    ratio: f64,
    predicted: f64,
    relative_difference: f64,
}

fn grid_scan(qs: &[u64], p: f64, l: u32, star: bool, r: Option<u64>, csv: bool, out: Option<&Path>) -> CliResult<()> {
    let kind = if star { SeriesKind::A } else { SeriesKind::B };
    let t = match r {
        Some(_) => 0.0,
        None => minimize_scalar(kind, l as f64 * p, 1e-6)?.argmin,
    };
    let mut rows = Vec::new();
    for &q in qs {
        let scale = if star { 2 * q } else { q } as f64;
        let len = r.unwrap_or_else(|| ((scale * t).round() as u64).clamp(1, q.saturating_sub(1).max(1)));
        let poly = dirichlet_grid_product(len, q, l, star)?;
        let ratio = grid_ratio(&poly, p, q, 1, star)?.ratio;
        let predicted = predicted_grid_limit(len, q, l, p, star)?;
        rows.push(GridRow {
            q,
            r: len,
            l,
            p,
            star,
            ratio,
            predicted,
            relative_difference: (ratio - predicted).abs() / predicted,
        });
    }
    if csv {
        let body: Vec<Vec<String>> = rows
            .iter()
            .map(|g| {
                vec![
                    g.q.to_string(),
                    g.r.to_string(),
                    g.l.to_string(),
                    float(g.p),
                    g.star.to_string(),
                    float(g.ratio),
                    float(g.predicted),
                    float(g.relative_difference),
                ]
            })
            .collect();
        output::write_csv(
            &["q", "r", "l", "p", "star", "ratio", "predicted", "relative_difference"],
            &body,
            out,
        )?;
    } else {
        output::write_json(&output::envelope("grid-scan", &rows)?, out)?;
    }
    Ok(())
}

fn l2gap(half_width: f64, n: u64, ms: &[u64], csv: bool, out: Option<&Path>) -> CliResult<()> {
    let kernel = dirichlet(n)?;
    let mut rows = Vec::new();
    for &m in ms {
        let f = kernel.dilate(m)?;
        rows.push((m, l2_gap_bound(half_width, &f, m)?));
    }
    if csv {
        let body: Vec<Vec<String>> = rows
            .iter()
            .map(|(m, b)| vec![m.to_string(), float(b.half_width), float(b.measured_ratio), float(b.bound)])
            .collect();
        output::write_csv(&["dilation", "half_width", "measured_ratio", "bound"], &body, out)?;
    } else {
        let results: Vec<_> = rows.into_iter().map(|(_, b)| b).collect();
        output::write_json(&output::envelope("l2gap", &results)?, out)?;
    }
    Ok(())
}
