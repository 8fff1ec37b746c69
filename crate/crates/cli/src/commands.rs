//! Subcommand implementations. Each returns the finished result in memory;
//! nothing is written until the whole computation has succeeded.

use anyhow::Result;
use clap::{Args, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;

use tlv_core::analytics::{
    decode_failure_bound, lightcone_bound, logical_fail_prob, sparse_params, survival_bound_finite,
};
use tlv_core::ca::{enumerate_fixed_points, measure_eroder};
use tlv_core::circuit2d::{row_netlist, run_circuit_sim, DepthPolicy};
use tlv_core::noise_sim::{
    estimate_pdec, estimate_tff, geometric_gof, mean_stderr, trial_rng, validate_sparse_bound,
    ExperimentConfig, FfMode, SparseConfig, TmaxPolicy, DEFAULT_FF_CAP,
};
use tlv_core::{BoundaryMode, RuleFamily, RuleSet};

use crate::grid::{parse_lengths, parse_probs};
use crate::{Common, Report, UsageError};

fn usage<T>(r: Result<T>) -> Result<T> {
    r.map_err(|e| UsageError(format!("{e:#}")).into())
}

fn parse<T: std::str::FromStr<Err = tlv_core::Error>>(s: &str) -> Result<T> {
    s.parse::<T>().map_err(|e| UsageError(e.to_string()).into())
}

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn csv_bytes<R: Serialize>(rows: &[R]) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r)?;
    }
    Ok(w.into_inner()?)
}

fn data_name(common: &Common) -> String {
    common
        .out
        .as_ref()
        .map(|p| p.display().to_string())
        .unwrap_or_else(|| "results.csv".into())
}

fn log_plot(
    common: &Common,
    title: &str,
    x: usize,
    y: usize,
    xlabel: &str,
    ylabel: &str,
    logy: bool,
) -> Option<String> {
    common.gnuplot_hints.then(|| {
        format!(
            "set datafile separator ','\nset key autotitle columnhead\nset title '{title}'\nset xlabel '{xlabel}'\nset ylabel '{ylabel}'\n{}plot '{}' using {x}:{y} with linespoints\n",
            if logy { "set logscale y\n" } else { "" },
            data_name(common)
        )
    })
}

#[derive(Args, Debug, Serialize)]
pub struct DecodeArgs {
    /// Chain lengths: `a:b:step`, `a:b:+` (even squares) or a comma list.
    #[arg(long = "L-grid", default_value = "16:784:+")]
    pub l_grid: String,
    /// Noise strengths: `a:b:step`, `a:b:+` (step 0.025) or a comma list.
    #[arg(long = "p0-grid", default_value = "0.3:0.5:+")]
    pub p0_grid: String,
    #[arg(long, default_value_t = 1_000_000)]
    pub trials: u64,
    /// Step budget: unbounded, linear[:c], pow:k or const:T.
    #[arg(long, default_value = "unbounded")]
    pub tmax: String,
    /// Bin width of the decoding-time histogram.
    #[arg(long, default_value_t = 10)]
    pub hist_bin: u64,
    /// Emit the decoding-time histogram instead of the summary.
    #[arg(long)]
    pub histogram: bool,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Serialize)]
struct DecodeRow {
    #[serde(rename = "L")]
    len: usize,
    p0: f64,
    tmax_policy: String,
    trials: u64,
    p_fail: f64,
    p_fail_stderr: f64,
    cycle_frac: f64,
    mean_tdec: String,
    median_tdec: String,
}

#[derive(Serialize)]
struct HistRow {
    #[serde(rename = "L")]
    len: usize,
    p0: f64,
    tdec_start: u64,
    count: u64,
}

pub fn decode(a: &DecodeArgs) -> Result<Report> {
    let config = ExperimentConfig {
        lengths: usage(parse_lengths(&a.l_grid))?,
        p0s: usage(parse_probs(&a.p0_grid))?,
        trials: a.trials,
        tmax: parse::<TmaxPolicy>(&a.tmax)?,
        seed: a.common.seed,
        hist_bin: a.hist_bin,
        ..Default::default()
    };
    config.validate().map_err(|e| UsageError(e.to_string()))?;
    let stats = estimate_pdec(&config)?;
    let (schema, body, hints) = if a.histogram {
        let rows: Vec<HistRow> = stats
            .points
            .iter()
            .flat_map(|p| {
                p.tdec_hist.iter().map(|b| HistRow {
                    len: p.len,
                    p0: p.p0,
                    tdec_start: b.start,
                    count: b.count,
                })
            })
            .collect();
        (
            "decode-hist/v1",
            csv_bytes(&rows)?,
            log_plot(&a.common, "decoding times", 3, 4, "t_dec", "count", true),
        )
    } else {
        let rows: Vec<DecodeRow> = stats
            .points
            .iter()
            .map(|p| DecodeRow {
                len: p.len,
                p0: p.p0,
                tmax_policy: p.tmax.to_string(),
                trials: p.trials,
                p_fail: p.p_fail,
                p_fail_stderr: p.p_fail_stderr,
                cycle_frac: p.cycle_frac,
                mean_tdec: opt(p.mean_tdec),
                median_tdec: opt(p.median_tdec),
            })
            .collect();
        (
            "decode/v1",
            csv_bytes(&rows)?,
            log_plot(&a.common, "decoding failure", 1, 5, "L", "P_fail", true),
        )
    };
    Ok(Report {
        subcommand: "decode",
        schema,
        body,
        seed: Some(a.common.seed),
        config: serde_json::to_value(&config)?,
        hints,
    })
}

#[derive(Args, Debug, Serialize)]
pub struct FfArgs {
    #[arg(long = "L-grid", default_value = "10,50,100,210")]
    pub l_grid: String,
    #[arg(long = "p0-grid", default_value = "0.125")]
    pub p0_grid: String,
    #[arg(long, default_value_t = 1000)]
    pub trials: u64,
    /// Correction after each noise round: tlv1d, global or none.
    #[arg(long, default_value = "tlv1d")]
    pub mode: String,
    /// Step cap; runs that reach it are censored.
    #[arg(long, default_value_t = DEFAULT_FF_CAP)]
    pub cap: u64,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Serialize)]
struct FfRow {
    #[serde(rename = "L")]
    len: usize,
    p0: f64,
    mode: String,
    trials: u64,
    cap: u64,
    censored: u64,
    censored_frac: f64,
    mean_tff: String,
    mean_tff_stderr: String,
    restricted_mean: f64,
    restricted_stderr: f64,
    /// `1/P` of one global majority vote, for the global mode.
    model_mean: String,
}

pub fn ff(a: &FfArgs) -> Result<Report> {
    let config = ExperimentConfig {
        lengths: usage(parse_lengths(&a.l_grid))?,
        p0s: usage(parse_probs(&a.p0_grid))?,
        trials: a.trials,
        seed: a.common.seed,
        mode: parse::<FfMode>(&a.mode)?,
        ff_cap: a.cap,
        ..Default::default()
    };
    config.validate().map_err(|e| UsageError(e.to_string()))?;
    let stats = estimate_tff(&config)?;
    let rows = stats
        .points
        .iter()
        .map(|p| {
            let model = match p.mode {
                FfMode::GlobalEachStep => Some(1.0 / logical_fail_prob(p.len as u64, p.p0)?),
                _ => None,
            };
            Ok(FfRow {
                len: p.len,
                p0: p.p0,
                mode: p.mode.to_string(),
                trials: p.trials,
                cap: p.cap,
                censored: p.censored,
                censored_frac: p.censored_frac,
                mean_tff: opt(p.mean_tff),
                mean_tff_stderr: opt(p.mean_tff_stderr),
                restricted_mean: p.restricted_mean,
                restricted_stderr: p.restricted_stderr,
                model_mean: opt(model),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Report {
        subcommand: "ff",
        schema: "ff/v1",
        body: csv_bytes(&rows)?,
        seed: Some(a.common.seed),
        config: serde_json::to_value(&config)?,
        hints: log_plot(&a.common, "first majority flip", 1, 10, "L", "<T_ff>", true),
    })
}

#[derive(Args, Debug, Serialize)]
pub struct CircuitArgs {
    #[arg(long = "L-grid", default_value = "100")]
    pub l_grid: String,
    #[arg(long = "p0-grid", default_value = "0.2")]
    pub p0_grid: String,
    /// Circuit depth: const:D, pow:k or linear[:c].
    #[arg(long, default_value = "const:10")]
    pub depth: String,
    /// Independent circuit runs per point.
    #[arg(long, default_value_t = 1000)]
    pub runs: u64,
    /// Noise batches per run before it counts as survived.
    #[arg(long, default_value_t = 1_000_000)]
    pub horizon: u64,
    /// Print the gate netlist of one circuit row (needs a single L) instead
    /// of simulating.
    #[arg(long)]
    pub emit_netlist: bool,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Serialize)]
struct CircuitRow {
    #[serde(rename = "L")]
    len: usize,
    p0: f64,
    depth_policy: String,
    depth: usize,
    runs: u64,
    survived: u64,
    mean_ttff: String,
    ttff_stderr: String,
    fail_rate: f64,
    fail_rate_stderr: f64,
    gof_chi2: String,
    gof_dof: String,
    gof_p_value: String,
}

pub fn circuit(a: &CircuitArgs) -> Result<Report> {
    let lengths = usage(parse_lengths(&a.l_grid))?;
    if a.emit_netlist {
        let [len] = lengths[..] else {
            return Err(UsageError("--emit-netlist needs exactly one chain length".into()).into());
        };
        let net = row_netlist(len).map_err(|e| UsageError(e.to_string()))?;
        return Ok(Report {
            subcommand: "circuit",
            schema: "netlist/v1",
            body: net.to_text().into_bytes(),
            seed: None,
            config: serde_json::to_value(a)?,
            hints: None,
        });
    }
    let p0s = usage(parse_probs(&a.p0_grid))?;
    let policy: DepthPolicy = parse(&a.depth)?;
    if a.runs == 0 || a.horizon == 0 {
        return Err(UsageError("runs and horizon must be positive".into()).into());
    }
    let mut rows = Vec::new();
    for (idx, (len, p0)) in lengths
        .iter()
        .flat_map(|&l| p0s.iter().map(move |&p| (l, p)))
        .enumerate()
    {
        let depth = policy.resolve(len);
        let reports = (0..a.runs)
            .into_par_iter()
            .map(|r| {
                let mut rng = trial_rng(a.common.seed, idx as u64, r);
                run_circuit_sim(len, depth, p0, a.horizon, false, &mut rng)
            })
            .collect::<tlv_core::Result<Vec<_>>>()
            .map_err(|e| match e {
                tlv_core::Error::Invariant(_) => anyhow::Error::from(e),
                other => UsageError(other.to_string()).into(),
            })?;
        let times: Vec<u64> = reports.iter().filter_map(|r| r.first_failure).collect();
        let survived = a.runs - times.len() as u64;
        let batches: u64 = reports.iter().map(|r| r.batches).sum();
        let failures: u64 = reports.iter().map(|r| r.failures).sum();
        let rate = failures as f64 / batches as f64;
        let ms = mean_stderr(&times.iter().map(|&t| t as f64).collect::<Vec<_>>());
        let gof = if survived == 0 {
            geometric_gof(&times).ok()
        } else {
            None
        };
        rows.push(CircuitRow {
            len,
            p0,
            depth_policy: policy.to_string(),
            depth,
            runs: a.runs,
            survived,
            mean_ttff: opt(ms.map(|m| m.0)),
            ttff_stderr: opt(ms.map(|m| m.1)),
            fail_rate: rate,
            fail_rate_stderr: (rate * (1.0 - rate) / batches as f64).sqrt(),
            gof_chi2: opt(gof.map(|g| g.chi2)),
            gof_dof: opt(gof.map(|g| g.dof)),
            gof_p_value: opt(gof.map(|g| g.p_value)),
        });
    }
    Ok(Report {
        subcommand: "circuit",
        schema: "circuit/v1",
        body: csv_bytes(&rows)?,
        seed: Some(a.common.seed),
        config: serde_json::to_value(a)?,
        hints: log_plot(
            &a.common,
            "circuit failure rate",
            1,
            9,
            "L",
            "failure rate",
            true,
        ),
    })
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
pub enum Preset {
    /// Radius-4 two-line voting with eroder constant 1.
    Tlv,
}

#[derive(Args, Debug, Serialize)]
pub struct BoundsArgs {
    #[arg(long, value_enum, default_value = "tlv")]
    pub preset: Preset,
    #[arg(long, default_value_t = 1e-7)]
    pub p0: f64,
    #[arg(long = "L", default_value_t = 1_000_000)]
    pub len: u64,
    /// Time for the finite-chain survival bound.
    #[arg(long, default_value_t = 1000)]
    pub t: u64,
    /// Exponent of the decoding-time budget `L^kappa`.
    #[arg(long, default_value_t = 0.5)]
    pub kappa: f64,
    /// Decoder radius for the light-cone bound.
    #[arg(long, default_value_t = 5)]
    pub d: u64,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Serialize)]
struct BoundRow {
    quantity: &'static str,
    value: f64,
    clamped: String,
}

pub fn bounds(a: &BoundsArgs) -> Result<Report> {
    let (r, m) = match a.preset {
        Preset::Tlv => (4, 1),
    };
    let bad = |e: tlv_core::Error| UsageError(e.to_string());
    let p = sparse_params(r, m, a.p0).map_err(bad)?;
    if a.len == 0 {
        return Err(UsageError("--L must be positive".into()).into());
    }
    let exact = |quantity, value| BoundRow {
        quantity,
        value,
        clamped: String::new(),
    };
    let bound = |quantity, b: tlv_core::analytics::Bound| BoundRow {
        quantity,
        value: b.raw,
        clamped: b.clamped.to_string(),
    };
    let survival = survival_bound_finite(a.len, a.t, &p);
    let decode = decode_failure_bound(a.len as f64, a.kappa, &p).map_err(bad)?;
    let cone = lightcone_bound(a.len, a.d, a.p0.min(0.5)).map_err(bad)?;
    let rows = vec![
        exact("radius", r as f64),
        exact("eroder_m", m as f64),
        exact("k", p.k as f64),
        exact("p_tilde_c", p.p_tilde_c),
        exact("p_tilde_c_inv", p.p_tilde_c_inv as f64),
        exact("a", p.a),
        exact("a_inv", p.a_inv as f64),
        exact("beta", p.beta),
        exact("alpha", p.alpha),
        exact("gamma", p.gamma),
        bound("survival_bound", survival),
        bound("decode_failure_bound", decode),
        BoundRow {
            quantity: "lightcone_bound",
            value: cone,
            clamped: cone.clamp(0.0, 1.0).to_string(),
        },
        exact(
            "global_fail_prob",
            logical_fail_prob(a.len, a.p0).map_err(bad)?,
        ),
    ];
    Ok(Report {
        subcommand: "bounds",
        schema: "bounds/v1",
        body: csv_bytes(&rows)?,
        seed: None,
        config: serde_json::to_value(a)?,
        hints: None,
    })
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
pub enum Boundary {
    Mirrored,
    Periodic,
}

#[derive(Args, Debug, Serialize)]
pub struct FixedPointsArgs {
    #[arg(long = "L")]
    pub len: usize,
    #[arg(long, value_enum, default_value = "mirrored")]
    pub boundary: Boundary,
    #[command(flatten)]
    pub common: Common,
}

pub fn fixed_points(a: &FixedPointsArgs) -> Result<Report> {
    let mode = match a.boundary {
        Boundary::Mirrored => BoundaryMode::Mirrored,
        Boundary::Periodic => BoundaryMode::Periodic,
    };
    let states = enumerate_fixed_points(a.len, &RuleSet::tlv(mode))
        .map_err(|e| UsageError(e.to_string()))?;
    let mut body = String::from("state\n");
    for s in states {
        body.push_str(&s.to_string());
        body.push('\n');
    }
    Ok(Report {
        subcommand: "fixed-points",
        schema: "fixed-points/v1",
        body: body.into_bytes(),
        seed: None,
        config: serde_json::to_value(a)?,
        hints: None,
    })
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
pub enum Family {
    Tlv,
    Gkl,
}

#[derive(Args, Debug, Serialize)]
pub struct EroderArgs {
    /// Largest cluster size.
    #[arg(long, default_value_t = 64)]
    pub lmax: usize,
    #[arg(long, value_enum, default_value = "tlv")]
    pub family: Family,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Serialize)]
struct EroderRowOut {
    l: usize,
    t_dec: u64,
    bound: u64,
}

pub fn eroder(a: &EroderArgs) -> Result<Report> {
    let family = match a.family {
        Family::Tlv => RuleFamily::Tlv,
        Family::Gkl => RuleFamily::Gkl,
    };
    let table = measure_eroder(family, a.lmax).map_err(|e| UsageError(e.to_string()))?;
    if let Family::Tlv = a.family {
        table.check_bounds()?;
    }
    let rows: Vec<_> = table
        .rows
        .iter()
        .map(|r| EroderRowOut {
            l: r.l,
            t_dec: r.t_dec,
            bound: (3 * r.l / 4) as u64 + 1,
        })
        .collect();
    Ok(Report {
        subcommand: "eroder",
        schema: "eroder/v1",
        body: csv_bytes(&rows)?,
        seed: None,
        config: serde_json::to_value(a)?,
        hints: log_plot(
            &a.common,
            "erosion time",
            1,
            2,
            "cluster size l",
            "t_dec",
            false,
        ),
    })
}

#[derive(Args, Debug, Serialize)]
pub struct SparseArgs {
    /// Windows cover sites `1-h ..= h`.
    #[arg(long, default_value_t = 64)]
    pub half_width: usize,
    #[arg(long, default_value_t = 0.01)]
    pub p0: f64,
    #[arg(long, default_value_t = 8)]
    pub k: u64,
    #[arg(long, default_value_t = 10_000)]
    pub windows: u64,
    #[arg(long, default_value_t = 16)]
    pub max_level: u64,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Serialize)]
struct SparseRow {
    level: u64,
    uncovered_sites: u64,
    fraction: f64,
    stderr: f64,
    bound_raw: f64,
    bound_clamped: f64,
}

pub fn sparse(a: &SparseArgs) -> Result<Report> {
    let config = SparseConfig {
        half_width: a.half_width,
        p0: a.p0,
        k: a.k,
        windows: a.windows,
        max_level: a.max_level,
        seed: a.common.seed,
    };
    let table = validate_sparse_bound(&config).map_err(|e| UsageError(e.to_string()))?;
    let rows: Vec<_> = table
        .iter()
        .map(|r| SparseRow {
            level: r.level,
            uncovered_sites: r.uncovered_sites,
            fraction: r.fraction,
            stderr: r.stderr,
            bound_raw: r.bound.raw,
            bound_clamped: r.bound.clamped,
        })
        .collect();
    Ok(Report {
        subcommand: "sparse",
        schema: "sparse/v1",
        body: csv_bytes(&rows)?,
        seed: Some(a.common.seed),
        config: serde_json::to_value(&config)?,
        hints: log_plot(
            &a.common,
            "uncovered sites",
            1,
            3,
            "level l",
            "fraction",
            true,
        ),
    })
}
