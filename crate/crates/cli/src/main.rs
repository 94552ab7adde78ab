use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Deserializer, Serialize};
use serde_json::{json, Map, Value};

use vervaat::distributions::{DistributionKind, DistributionSpec, ValidatedSpec};
use vervaat::harness::{self, DriftSource, ExperimentConfig, ExperimentReport, Statistic};
use vervaat::ladder::{self, DConvention};
use vervaat::limits;
use vervaat::seed;
use vervaat::walk::{build_walk, eval_processes, Grid};

const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Parser, Debug)]
#[command(name = "vervaat", version, about = "Renewal-process Vervaat experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Dump all processes of one walk on a uniform grid as CSV.
    Path(PathArgs),
    /// Check the exact representations of the Vervaat integral over many walks.
    CheckRepr(CheckReprArgs),
    /// Estimate the ladder drift mu_D / mu_H from independent cycles.
    Ladder(LadderArgs),
    /// Compare a rescaled statistic with its limit law (two-sample KS).
    Limit(LimitArgs),
    /// Rate scan of sup |n V_n - (n/2) barS^2 - drift t| across scales.
    Rates(RatesArgs),
    /// Growth diagnostic for the sup-norm of the standardized remainder.
    BkGrowth(BkGrowthArgs),
    /// Draw samples from a limit law.
    LimitSample(LimitSampleArgs),
}

/// A distribution given as shorthand (`exp:1`) or as a JSON object.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(transparent)]
struct DistArg(DistributionSpec);

impl std::str::FromStr for DistArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        s.parse().map(DistArg).map_err(|e: vervaat::Error| e.to_string())
    }
}

impl<'de> Deserialize<'de> for DistArg {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        match Value::deserialize(d)? {
            Value::String(s) => s.parse().map_err(serde::de::Error::custom),
            v => DistributionSpec::deserialize(v)
                .map(DistArg)
                .map_err(serde::de::Error::custom),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
enum DriftArg {
    Zero,
    Estimated,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
enum ConventionArg {
    InnerSum,
    Shifted,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
enum LimitStatistic {
    Bk,
    Vervaat,
    Verror,
    VervaatSup,
    Zn,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
enum Law {
    Bk,
    Verror,
    Vervaat,
    SupHalfNorm,
}

#[derive(Args, Debug, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
struct PathArgs {
    #[arg(long)]
    dist: Option<DistArg>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Grid size K; rows are t = k/K for k = 0..=K.
    #[arg(long)]
    grid: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    threads: Option<usize>,
    /// JSON file with the same keys as the flags; its values win.
    #[arg(long)]
    #[serde(skip)]
    config: Option<PathBuf>,
}

#[derive(Args, Debug, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
struct CheckReprArgs {
    #[arg(long)]
    dist: Option<DistArg>,
    #[arg(long)]
    n: Option<usize>,
    /// Number of walks.
    #[arg(long)]
    seeds: Option<usize>,
    /// Grid size K; points t = k/K for k = 1..=K.
    #[arg(long)]
    grid: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Exit with status 2 if any residual exceeds this tolerance.
    #[arg(long = "assert")]
    #[serde(rename = "assert")]
    assert_tol: Option<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    threads: Option<usize>,
    #[arg(long)]
    #[serde(skip)]
    config: Option<PathBuf>,
}

#[derive(Args, Debug, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
struct LadderArgs {
    #[arg(long)]
    dist: Option<DistArg>,
    #[arg(long)]
    cycles: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, value_enum)]
    convention: Option<ConventionArg>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    threads: Option<usize>,
    #[arg(long)]
    #[serde(skip)]
    config: Option<PathBuf>,
}

#[derive(Args, Debug, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
struct LimitArgs {
    #[arg(long, value_enum)]
    statistic: Option<LimitStatistic>,
    #[arg(long)]
    dist: Option<DistArg>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    reps: Option<usize>,
    #[arg(long)]
    t: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, value_enum)]
    drift: Option<DriftArg>,
    #[arg(long)]
    drift_cycles: Option<usize>,
    /// Grid size for `vervaat-sup`.
    #[arg(long)]
    grid: Option<usize>,
    /// Exit with status 2 if the KS distance exceeds this value.
    #[arg(long)]
    assert_ks: Option<f64>,
    /// Write the sorted replicate statistics as one-column CSV.
    #[arg(long)]
    samples_out: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    threads: Option<usize>,
    #[arg(long)]
    #[serde(skip)]
    config: Option<PathBuf>,
}

#[derive(Args, Debug, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
struct RatesArgs {
    #[arg(long)]
    dist: Option<DistArg>,
    /// Comma-separated geometric grid of scales.
    #[arg(long, value_delimiter = ',')]
    n_grid: Option<Vec<usize>>,
    #[arg(long)]
    reps: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, value_enum)]
    drift: Option<DriftArg>,
    #[arg(long)]
    drift_cycles: Option<usize>,
    #[arg(long)]
    grid: Option<usize>,
    /// Exit with status 2 unless the medians decrease, halve, and the slope is in range.
    #[arg(long = "assert", num_args = 0..=1, default_missing_value = "true")]
    #[serde(rename = "assert")]
    assert_pass: Option<bool>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    threads: Option<usize>,
    #[arg(long)]
    #[serde(skip)]
    config: Option<PathBuf>,
}

#[derive(Args, Debug, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
struct BkGrowthArgs {
    #[arg(long)]
    dist: Option<DistArg>,
    #[arg(long, value_delimiter = ',')]
    n_grid: Option<Vec<usize>>,
    #[arg(long)]
    reps: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Exit with status 2 unless growth >= 1.15 and the normalized change < 20%.
    #[arg(long = "assert", num_args = 0..=1, default_missing_value = "true")]
    #[serde(rename = "assert")]
    assert_pass: Option<bool>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    threads: Option<usize>,
    #[arg(long)]
    #[serde(skip)]
    config: Option<PathBuf>,
}

#[derive(Args, Debug, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
struct LimitSampleArgs {
    #[arg(long, value_enum)]
    law: Option<Law>,
    /// Take sigma and mu from this distribution.
    #[arg(long)]
    dist: Option<DistArg>,
    #[arg(long)]
    sigma: Option<f64>,
    #[arg(long)]
    mu: Option<f64>,
    #[arg(long)]
    drift: Option<f64>,
    #[arg(long)]
    t: Option<f64>,
    #[arg(long)]
    count: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    threads: Option<usize>,
    #[arg(long)]
    #[serde(skip)]
    config: Option<PathBuf>,
}

/// Overlays the JSON config file on the flags; config values win.
fn merge<T: Serialize + DeserializeOwned>(flags: T, config: Option<&Path>) -> anyhow::Result<T> {
    let Some(path) = config else {
        return Ok(flags);
    };
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading config {}", path.display()))?;
    let de = &mut serde_json::Deserializer::from_str(&text);
    let parsed: T = serde_path_to_error::deserialize(de).map_err(|e| {
        let field = e.path().to_string();
        anyhow::anyhow!("config {}: field `{field}`: {}", path.display(), e.inner())
    })?;
    let mut merged = match serde_json::to_value(&flags)? {
        Value::Object(m) => m,
        _ => Map::new(),
    };
    if let Value::Object(cfg) = serde_json::to_value(&parsed)? {
        for (key, value) in cfg {
            if value.is_null() {
                continue;
            }
            if let Some(old) = merged.get(&key) {
                if !old.is_null() && *old != value {
                    eprintln!("warning: --{key} {old} overridden by config value {value}");
                }
            }
            merged.insert(key, value);
        }
    }
    Ok(serde_json::from_value(Value::Object(merged))?)
}

fn require<T>(value: Option<T>, flag: &str) -> anyhow::Result<T> {
    value.ok_or_else(|| anyhow::anyhow!("missing required field `{flag}` (flag --{flag})"))
}

fn validate(dist: &Option<DistArg>) -> anyhow::Result<ValidatedSpec> {
    let d = require(dist.clone(), "dist")?;
    d.0.validate().context("field `dist`")
}

fn drift_source(drift: Option<DriftArg>, cycles: Option<usize>) -> DriftSource {
    match drift.unwrap_or(DriftArg::Zero) {
        DriftArg::Zero => DriftSource::ExactZero,
        DriftArg::Estimated => DriftSource::Estimated {
            cycles: cycles.unwrap_or(100_000),
        },
    }
}

fn configure_threads(threads: Option<usize>) -> anyhow::Result<()> {
    if let Some(k) = threads {
        if k == 0 {
            bail!("field `threads`: must be at least 1");
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(k)
            .build_global()
            .context("configuring the thread pool")?;
    }
    Ok(())
}

fn open_out(out: &Option<PathBuf>) -> anyhow::Result<Box<dyn Write>> {
    Ok(match out {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).with_context(|| format!("creating {}", p.display()))?,
        )),
        None => Box::new(BufWriter::new(io::stdout())),
    })
}

fn write_json(out: &Option<PathBuf>, value: &Value) -> anyhow::Result<()> {
    let mut w = open_out(out)?;
    serde_json::to_writer_pretty(&mut w, value)?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}

struct Run {
    /// Merged configuration as written into every output.
    config: Value,
    outputs: Vec<PathBuf>,
    assert_failed: Option<String>,
}

fn cmd_path(args: PathArgs) -> anyhow::Result<Run> {
    let spec = validate(&args.dist)?;
    let n = require(args.n, "n")?;
    let seed = args.seed.unwrap_or(0);
    let k = args.grid.unwrap_or(64);
    let config = json!({
        "dist": spec.spec, "n": n, "seed": seed, "grid": k, "version": VERSION,
    });
    let path = build_walk(&spec, n, seed)?;
    let grid = Grid::uniform(k)?;
    let processes = eval_processes(&path, &grid, true)?;
    let mut w = open_out(&args.out)?;
    writeln!(w, "# vervaat path {}", serde_json::to_string(&config)?)?;
    processes.write_csv(&mut w)?;
    w.flush()?;
    Ok(Run {
        config,
        outputs: args.out.into_iter().collect(),
        assert_failed: None,
    })
}

fn cmd_check_repr(args: CheckReprArgs) -> anyhow::Result<Run> {
    let spec = validate(&args.dist)?;
    let n = require(args.n, "n")?;
    let seeds = args.seeds.unwrap_or(100);
    let grid = args.grid.unwrap_or(33);
    let seed = args.seed.unwrap_or(0);
    let sweep = harness::repr_sweep(&spec, n, seeds, grid, seed)?;
    let config = json!({
        "dist": spec.spec, "n": n, "seeds": seeds, "grid": grid, "seed": seed,
        "assert": args.assert_tol, "version": VERSION,
    });
    let r = &sweep.residuals;
    write_json(
        &args.out,
        &json!({
            "config": config,
            "max_abs_residual_repr": r.max_abs_residual_repr,
            "max_abs_residual_ordinary": r.max_abs_residual_ordinary,
            "max_abs_residual_identity": r.max_abs_residual_identity,
            "seed_rule": seed::SEED_RULE,
        }),
    )?;
    let worst = r
        .max_abs_residual_repr
        .max(r.max_abs_residual_identity)
        .max(r.max_abs_residual_ordinary.unwrap_or(0.0));
    let assert_failed = args
        .assert_tol
        .filter(|&tol| !(worst <= tol))
        .map(|tol| format!("max residual {worst:e} exceeds {tol:e}"));
    Ok(Run {
        config,
        outputs: args.out.into_iter().collect(),
        assert_failed,
    })
}

fn cmd_ladder(args: LadderArgs) -> anyhow::Result<Run> {
    let spec = validate(&args.dist)?;
    let cycles = args.cycles.unwrap_or(100_000);
    let seed = args.seed.unwrap_or(0);
    let convention_arg = args.convention.unwrap_or(ConventionArg::InnerSum);
    let convention = match convention_arg {
        ConventionArg::InnerSum => DConvention::InnerSum,
        ConventionArg::Shifted => DConvention::Shifted,
    };
    let est = ladder::estimate_drift_ratio_with(&spec, cycles, seed, convention)?;
    let oracle = match spec.kind() {
        DistributionKind::TwoPoint { a, b, p } if convention == DConvention::InnerSum => {
            ladder::two_point_ladder_oracle(a, b, p, ladder::DEFAULT_ORACLE_DEPTH).ok()
        }
        _ => None,
    };
    let config = json!({
        "dist": spec.spec, "cycles": cycles, "seed": seed, "convention": convention_arg,
        "version": VERSION,
    });
    write_json(
        &args.out,
        &json!({
            "config": config,
            "spec": spec.spec,
            "cycles": est.cycles,
            "mu_D_hat": est.mu_d_hat,
            "mu_H_hat": est.mu_h_hat,
            "ratio_hat": est.ratio_hat,
            "std_err_mu_D": est.std_err_mu_d,
            "std_err_mu_H": est.std_err_mu_h,
            "std_err_ratio": est.std_err_ratio,
            "mean_epoch": est.mean_epoch,
            "oracle": oracle,
            "seed": seed,
        }),
    )?;
    Ok(Run {
        config,
        outputs: args.out.into_iter().collect(),
        assert_failed: None,
    })
}

fn report_value(report: &ExperimentReport) -> anyhow::Result<Value> {
    let mut v = serde_json::to_value(report)?;
    if let Value::Object(m) = &mut v {
        m.insert("version".into(), json!(VERSION));
    }
    Ok(v)
}

fn cmd_limit(args: LimitArgs) -> anyhow::Result<Run> {
    let spec = validate(&args.dist)?;
    let statistic = match require(args.statistic, "statistic")? {
        LimitStatistic::Bk => Statistic::BkPoint,
        LimitStatistic::Vervaat => Statistic::VervaatPoint,
        LimitStatistic::Verror => Statistic::VerrorPoint,
        LimitStatistic::VervaatSup => Statistic::VervaatPathSup,
        LimitStatistic::Zn => Statistic::ZnPoint,
    };
    let cfg = ExperimentConfig::pointwise(
        spec.spec,
        statistic,
        require(args.n, "n")?,
        args.reps.unwrap_or(2000),
        args.t.unwrap_or(1.0),
        args.seed.unwrap_or(0),
    )
    .with_drift(drift_source(args.drift, args.drift_cycles))
    .with_grid(args.grid.unwrap_or(harness::DEFAULT_GRID));
    let report = harness::run_pointwise_experiment(&cfg)?;
    let mut outputs: Vec<PathBuf> = args.out.iter().cloned().collect();
    if let Some(p) = &args.samples_out {
        let w = BufWriter::new(File::create(p).with_context(|| format!("creating {}", p.display()))?);
        report.write_samples_csv(w)?;
        outputs.push(p.clone());
    }
    write_json(&args.out, &report_value(&report)?)?;
    let d = report.ks.map(|k| k.d).unwrap_or(f64::NAN);
    let assert_failed = args
        .assert_ks
        .filter(|&tol| !(d <= tol))
        .map(|tol| format!("KS distance {d} exceeds {tol}"));
    Ok(Run {
        config: serde_json::to_value(&cfg)?,
        outputs,
        assert_failed,
    })
}

fn cmd_rates(args: RatesArgs) -> anyhow::Result<Run> {
    let spec = validate(&args.dist)?;
    let n_grid = args.n_grid.clone().unwrap_or_else(|| (8..=15).map(|k| 1 << k).collect());
    let cfg = ExperimentConfig::scan(
        spec.spec,
        Statistic::RateScan,
        n_grid,
        args.reps.unwrap_or(200),
        args.seed.unwrap_or(0),
    )
    .with_drift(drift_source(args.drift, args.drift_cycles))
    .with_grid(args.grid.unwrap_or(harness::DEFAULT_GRID));
    let report = harness::rate_scan(&cfg)?;
    write_json(&args.out, &report_value(&report)?)?;
    let summary = report.rate.expect("rate scan summary");
    let assert_failed = (args.assert_pass.unwrap_or(false) && !summary.passes()).then(|| {
        format!(
            "rate scan failed: decreasing {}, final/initial {}, slope {}",
            summary.strictly_decreasing, summary.final_over_initial, summary.slope
        )
    });
    Ok(Run {
        config: serde_json::to_value(&cfg)?,
        outputs: args.out.into_iter().collect(),
        assert_failed,
    })
}

fn cmd_bk_growth(args: BkGrowthArgs) -> anyhow::Result<Run> {
    let spec = validate(&args.dist)?;
    let n_grid = args
        .n_grid
        .clone()
        .unwrap_or_else(|| vec![1 << 9, 1 << 11, 1 << 13, 1 << 15]);
    let cfg = ExperimentConfig::scan(
        spec.spec,
        Statistic::BkGrowth,
        n_grid,
        args.reps.unwrap_or(400),
        args.seed.unwrap_or(0),
    );
    let report = harness::bk_growth_diagnostic(&cfg)?;
    write_json(&args.out, &report_value(&report)?)?;
    let g = report.growth.expect("growth summary");
    let assert_failed = (args.assert_pass.unwrap_or(false) && !g.passes()).then(|| {
        format!(
            "growth diagnostic failed: growth {}, normalized change {}",
            g.growth_ratio, g.normalized_change
        )
    });
    Ok(Run {
        config: serde_json::to_value(&cfg)?,
        outputs: args.out.into_iter().collect(),
        assert_failed,
    })
}

fn cmd_limit_sample(args: LimitSampleArgs) -> anyhow::Result<Run> {
    use rayon::prelude::*;

    let law = require(args.law, "law")?;
    let (sigma, mu) = match &args.dist {
        Some(_) => {
            if args.sigma.is_some() || args.mu.is_some() {
                bail!("field `dist`: give either a distribution or sigma/mu, not both");
            }
            let spec = validate(&args.dist)?;
            (spec.sigma(), spec.mu)
        }
        None => (args.sigma.unwrap_or(1.0), args.mu.unwrap_or(1.0)),
    };
    if !(sigma > 0.0 && mu > 0.0) {
        bail!("field `sigma`/`mu`: both must be positive");
    }
    let t = args.t.unwrap_or(1.0);
    let drift = args.drift.unwrap_or(0.0);
    let count = args.count.unwrap_or(1000);
    let seed = args.seed.unwrap_or(0);
    if count == 0 {
        bail!("field `count`: must be at least 1");
    }
    let draws: Vec<f64> = (0..count as u64)
        .into_par_iter()
        .map(|i| {
            let s = seed::reference_seed(seed, i);
            match law {
                Law::Bk => limits::sample_limit_bk(t, sigma, mu, s),
                Law::Verror => limits::sample_limit_verror(t, sigma, mu, s),
                Law::Vervaat => limits::sample_limit_vervaat(t, sigma, mu, drift, s),
                Law::SupHalfNorm => limits::sup_half_norm_reference(sigma, mu, s),
            }
        })
        .collect::<vervaat::Result<_>>()?;
    let law_name = serde_json::to_value(law)?;
    let header = match law {
        Law::Vervaat => format!(
            "{}(t={t};sigma={sigma};mu={mu};drift={drift};seed={seed})",
            law_name.as_str().unwrap_or("law")
        ),
        Law::SupHalfNorm => format!(
            "{}(sigma={sigma};mu={mu};seed={seed})",
            law_name.as_str().unwrap_or("law")
        ),
        _ => format!(
            "{}(t={t};sigma={sigma};mu={mu};seed={seed})",
            law_name.as_str().unwrap_or("law")
        ),
    };
    let mut w = open_out(&args.out)?;
    harness::write_samples_csv(&mut w, &header, &draws)?;
    w.flush()?;
    Ok(Run {
        config: json!({
            "law": law, "sigma": sigma, "mu": mu, "t": t, "drift": drift,
            "count": count, "seed": seed, "version": VERSION,
        }),
        outputs: args.out.into_iter().collect(),
        assert_failed: None,
    })
}

macro_rules! prepare {
    ($args:expr) => {{
        let config = $args.config.clone();
        let merged = merge($args, config.as_deref())?;
        configure_threads(merged.threads)?;
        (merged, config)
    }};
}

fn dispatch(cli: Cli) -> anyhow::Result<(&'static str, Option<PathBuf>, Run)> {
    Ok(match cli.command {
        Command::Path(a) => {
            let (a, c) = prepare!(a);
            ("path", c, cmd_path(a)?)
        }
        Command::CheckRepr(a) => {
            let (a, c) = prepare!(a);
            ("check-repr", c, cmd_check_repr(a)?)
        }
        Command::Ladder(a) => {
            let (a, c) = prepare!(a);
            ("ladder", c, cmd_ladder(a)?)
        }
        Command::Limit(a) => {
            let (a, c) = prepare!(a);
            ("limit", c, cmd_limit(a)?)
        }
        Command::Rates(a) => {
            let (a, c) = prepare!(a);
            ("rates", c, cmd_rates(a)?)
        }
        Command::BkGrowth(a) => {
            let (a, c) = prepare!(a);
            ("bk-growth", c, cmd_bk_growth(a)?)
        }
        Command::LimitSample(a) => {
            let (a, c) = prepare!(a);
            ("limit-sample", c, cmd_limit_sample(a)?)
        }
    })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let started = Instant::now();
    match dispatch(cli) {
        Ok((subcommand, config_path, run)) => {
            let manifest = json!({
                "subcommand": subcommand,
                "config_path": config_path,
                "config": run.config,
                "outputs": run.outputs,
                "version": VERSION,
                "wall_time_s": started.elapsed().as_secs_f64(),
            });
            eprintln!("{manifest}");
            match run.assert_failed {
                Some(msg) => {
                    eprintln!("assertion failed: {msg}");
                    ExitCode::from(2)
                }
                None => ExitCode::SUCCESS,
            }
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
