//! Command-line interface definition and dispatch.

use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use dmic_core::builtin::{self, builtin_channel};
use dmic_core::transform::{solve_degradation_table, weak_alt_gap_surface};
use dmic_core::{
    achievable_region_mixed, achievable_region_zic, bc_outer_bound, check_degraded, classify,
    classify_one_sided, factorize_weak, grid_oracle, marginal_channels, maximize_product_input,
    mi_condition_report, mixed_objective, sumrate_mixed, sumrate_weak_zic, weak_zic_objective,
    ClassificationReport, Condition, Dmic, GaussianKind, OptResult, OptimizerConfig, RateRegion,
    Y2Map,
};
use serde::Serialize;
use serde_json::json;

use crate::error::{CliError, CliResult};
use crate::formats::{emit_region_csv, parse_channel_spec, parse_map_file, ChannelSpecFile};

#[derive(Debug, Parser)]
#[command(
    name = "dmic",
    version,
    about = "Classify discrete memoryless interference channels and compute their sum rates and rate regions"
)]
pub struct Cli {
    #[command(flatten)]
    pub opts: GlobalOpts,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalOpts {
    /// Print a JSON document with full-precision numbers.
    #[arg(long, global = true)]
    pub json: bool,
    /// Seed for the randomized parts of the optimizers.
    #[arg(long, global = true, env = "DMIC_SEED")]
    pub seed: Option<u64>,
    /// Lattice spacing of the optimizer's coarse pass.
    #[arg(long, global = true)]
    pub grid_step: Option<f64>,
    /// Random starts of the local search.
    #[arg(long, global = true)]
    pub multistarts: Option<usize>,
    /// Tolerance for structural tests and condition verdicts.
    #[arg(long, global = true, default_value_t = 1e-9)]
    pub tol: f64,
}

impl GlobalOpts {
    pub fn optimizer(&self) -> CliResult<OptimizerConfig> {
        let mut cfg = OptimizerConfig::default();
        if let Some(s) = self.seed {
            cfg.rng_seed = s;
        }
        if let Some(g) = self.grid_step {
            cfg.grid_step = g;
        }
        if let Some(m) = self.multistarts {
            cfg.multistarts = m;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Debug, Clone, Args)]
pub struct ChannelArg {
    /// JSON channel file.
    pub file: Option<PathBuf>,
    /// Built-in channel such as `example5` or `example2(0.1)`.
    #[arg(long, conflicts_with = "file")]
    pub builtin: Option<String>,
}

impl ChannelArg {
    pub fn load(&self) -> CliResult<(String, Dmic)> {
        match (&self.file, &self.builtin) {
            (Some(path), None) => Ok((path.display().to_string(), parse_channel_spec(path)?)),
            (None, Some(name)) => Ok((name.clone(), builtin_channel(name)?)),
            _ => Err(CliError::Input(
                "give a channel file or --builtin NAME".into(),
            )),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Auto,
    WeakZic,
    Mixed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Objective {
    Auto,
    WeakZic,
    Mixed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum KindArg {
    OneSidedWeak,
    Mixed,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Structural tests and mutual-information conditions.
    Classify(ChannelArg),
    /// Sum-rate capacity of a one-sided weak or a mixed channel.
    Sumrate {
        #[command(flatten)]
        channel: ChannelArg,
        #[arg(long, value_enum, default_value = "auto")]
        mode: Mode,
    },
    /// Achievable rate region.
    Region {
        #[command(flatten)]
        channel: ChannelArg,
        /// Random auxiliary laws on top of the directional search.
        #[arg(long, default_value_t = 256)]
        samples: usize,
        /// Write the vertices as CSV.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Broadcast-channel outer bound.
    Outerbound {
        #[command(flatten)]
        channel: ChannelArg,
        /// `bijection` or `table:PATH` with a JSON map file.
        #[arg(long, default_value = "bijection")]
        map: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compares the local optimizer with an exhaustive lattice search.
    Oracle {
        #[command(flatten)]
        channel: ChannelArg,
        #[arg(long, default_value_t = 0.001)]
        step: f64,
        #[arg(long, value_enum, default_value = "auto")]
        objective: Objective,
    },
    /// Channel that satisfies the weak inequality without being degraded.
    Counterexample {
        #[arg(long, default_value_t = 0.001)]
        step: f64,
    },
    /// Closed-form Gaussian sum rates.
    Gaussian {
        #[arg(long, value_enum)]
        kind: KindArg,
        #[arg(long)]
        p1: f64,
        #[arg(long)]
        p2: f64,
        #[arg(long)]
        a: f64,
        #[arg(long, default_value_t = 0.0)]
        b: f64,
    },
    /// Writes a built-in channel as a JSON channel file.
    Export {
        #[arg(long)]
        builtin: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn f6(v: f64) -> String {
    format!("{v:.6}")
}

fn vec6(v: &[f64]) -> String {
    let parts: Vec<String> = v.iter().map(|&x| f6(x)).collect();
    format!("[{}]", parts.join(", "))
}

fn to_json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("plain data serializes");
    s.push('\n');
    s
}

fn yes(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

/// Runs one command and returns what it prints on stdout.
pub fn run(cli: &Cli) -> CliResult<String> {
    let o = &cli.opts;
    match &cli.command {
        Command::Classify(ch) => cmd_classify(o, ch),
        Command::Sumrate { channel, mode } => cmd_sumrate(o, channel, *mode),
        Command::Region {
            channel,
            samples,
            out,
        } => cmd_region(o, channel, *samples, out.as_ref()),
        Command::Outerbound { channel, map, out } => cmd_outerbound(o, channel, map, out.as_ref()),
        Command::Oracle {
            channel,
            step,
            objective,
        } => cmd_oracle(o, channel, *step, *objective),
        Command::Counterexample { step } => cmd_counterexample(o, *step),
        Command::Gaussian { kind, p1, p2, a, b } => cmd_gaussian(o, *kind, *p1, *p2, *a, *b),
        Command::Export { builtin, out } => cmd_export(builtin, out.as_ref()),
    }
}

#[derive(Serialize)]
struct ClassifyJson<'a> {
    channel: &'a str,
    #[serde(flatten)]
    report: &'a ClassificationReport,
    labels: Vec<&'static str>,
}

fn cmd_classify(o: &GlobalOpts, ch: &ChannelArg) -> CliResult<String> {
    let (name, c) = ch.load()?;
    let report = classify(&c, &o.optimizer()?, o.tol)?;
    if o.json {
        return Ok(to_json(&ClassifyJson {
            channel: &name,
            report: &report,
            labels: report.labels(),
        }));
    }
    let mut s = String::new();
    let _ = writeln!(s, "channel: {name}");
    let _ = writeln!(s, "one-sided: {}", yes(report.one_sided));
    let _ = writeln!(
        s,
        "weak factorization: {}",
        yes(report.weak_factorization.is_some())
    );
    let _ = writeln!(s, "degraded: {}", yes(report.degraded));
    let _ = writeln!(
        s,
        "{:<14} {:>10}  {:<5}  witness (p1; p2)",
        "condition", "min gap", "holds"
    );
    for r in &report.conditions {
        let _ = writeln!(
            s,
            "{:<14} {:>10}  {:<5}  {}; {}",
            r.condition.id(),
            f6(r.min_gap),
            yes(r.holds),
            vec6(r.witness.p1.values()),
            vec6(r.witness.p2.values())
        );
    }
    let labels = report.labels();
    let _ = writeln!(
        s,
        "labels: {}",
        if labels.is_empty() {
            "none".to_string()
        } else {
            labels.join(", ")
        }
    );
    Ok(s)
}

/// Picks the sum-rate formula that applies to `c`.
fn pick_mode(c: &Dmic, cfg: &OptimizerConfig, tol: f64) -> CliResult<Mode> {
    if classify_one_sided(c, tol) && factorize_weak(c, tol)?.is_some() {
        return Ok(Mode::WeakZic);
    }
    if check_degraded(c, tol) && mi_condition_report(c, Condition::MixedMi, cfg, tol)?.holds {
        return Ok(Mode::Mixed);
    }
    Err(CliError::Precondition(
        "no sum-rate formula applies: the channel is not a one-sided channel with the weak factorization, and not degraded with mixed interference".into(),
    ))
}

fn mode_name(m: Mode) -> &'static str {
    match m {
        Mode::Auto => "auto",
        Mode::WeakZic => "weak-zic",
        Mode::Mixed => "mixed",
    }
}

fn cmd_sumrate(o: &GlobalOpts, ch: &ChannelArg, mode: Mode) -> CliResult<String> {
    let (name, c) = ch.load()?;
    let cfg = o.optimizer()?;
    let mode = match mode {
        Mode::Auto => pick_mode(&c, &cfg, o.tol)?,
        m => m,
    };
    let r: OptResult = match mode {
        Mode::WeakZic => sumrate_weak_zic(&c, &cfg)?,
        _ => sumrate_mixed(&c, &cfg)?,
    };
    if o.json {
        return Ok(to_json(&json!({
            "channel": name,
            "mode": mode_name(mode),
            "sum_rate": r.value,
            "p1": r.argopt[0].values(),
            "p2": r.argopt[1].values(),
            "iterations": r.iterations,
            "certified_grid_step": r.certified_grid_step,
        })));
    }
    Ok(format!(
        "channel: {name}\nmode: {}\nsum rate: {}\np1: {}\np2: {}\n",
        mode_name(mode),
        f6(r.value),
        vec6(r.argopt[0].values()),
        vec6(r.argopt[1].values())
    ))
}

fn region_output(
    o: &GlobalOpts,
    name: &str,
    kind: &str,
    region: &RateRegion,
    out: Option<&PathBuf>,
) -> CliResult<String> {
    if let Some(path) = out {
        emit_region_csv(region, path)?;
    }
    if o.json {
        return Ok(to_json(&json!({
            "channel": name,
            "region": kind,
            "vertices": region.vertices(),
            "sampling_tolerance": region.sampling_tolerance(),
            "max_sum": region.max_sum(),
        })));
    }
    let mut s = format!(
        "channel: {name}\nregion: {kind}\nsampling tolerance: {}\nmax sum: {}\nvertices (r1, r2):\n",
        f6(region.sampling_tolerance()),
        f6(region.max_sum())
    );
    for v in region.vertices() {
        let _ = writeln!(s, "{} {}", f6(v.r1), f6(v.r2));
    }
    Ok(s)
}

fn cmd_region(
    o: &GlobalOpts,
    ch: &ChannelArg,
    samples: usize,
    out: Option<&PathBuf>,
) -> CliResult<String> {
    let (name, c) = ch.load()?;
    let cfg = o.optimizer()?;
    let (kind, region) = if classify_one_sided(&c, o.tol) {
        ("one-sided", achievable_region_zic(&c, &cfg, samples)?)
    } else if matches!(pick_mode(&c, &cfg, o.tol), Ok(Mode::Mixed)) {
        ("mixed", achievable_region_mixed(&c, &cfg, samples)?)
    } else {
        return Err(CliError::Precondition(
            "no achievable region is implemented for this channel: it is neither one-sided nor mixed".into(),
        ));
    };
    region_output(o, &name, kind, &region, out)
}

fn cmd_outerbound(
    o: &GlobalOpts,
    ch: &ChannelArg,
    map: &str,
    out: Option<&PathBuf>,
) -> CliResult<String> {
    let (name, c) = ch.load()?;
    let map = if map == "bijection" {
        Y2Map::bijection(c.nx1(), c.ny2())?
    } else if let Some(path) = map.strip_prefix("table:") {
        parse_map_file(path.as_ref())?
    } else {
        return Err(CliError::Input(format!(
            "unknown map {map:?} (expected bijection or table:PATH)"
        )));
    };
    let region = bc_outer_bound(&c, &map, &o.optimizer()?)?;
    region_output(o, &name, "broadcast outer bound", &region, out)
}

fn cmd_oracle(
    o: &GlobalOpts,
    ch: &ChannelArg,
    step: f64,
    objective: Objective,
) -> CliResult<String> {
    let (name, c) = ch.load()?;
    let cfg = o.optimizer()?;
    let objective = match objective {
        Objective::Auto if classify_one_sided(&c, o.tol) => Objective::WeakZic,
        Objective::Auto => Objective::Mixed,
        other => other,
    };
    let dims = [c.nx1(), c.nx2()];
    let (label, local, grid) = match objective {
        Objective::WeakZic => (
            "weak-zic",
            maximize_product_input(weak_zic_objective(&c), &dims, &cfg)?,
            grid_oracle(weak_zic_objective(&c), &dims, step)?,
        ),
        _ => (
            "mixed",
            maximize_product_input(mixed_objective(&c), &dims, &cfg)?,
            grid_oracle(mixed_objective(&c), &dims, step)?,
        ),
    };
    let diff = local.value - grid.value;
    if o.json {
        return Ok(to_json(&json!({
            "channel": name,
            "objective": label,
            "optimizer": local.value,
            "grid": grid.value,
            "grid_step": grid.certified_grid_step,
            "difference": diff,
            "optimizer_argopt": local.argopt,
            "grid_argopt": grid.argopt,
        })));
    }
    Ok(format!(
        "channel: {name}\nobjective: {label}\noptimizer: {}\ngrid (step {}): {}\ndifference: {}\n",
        f6(local.value),
        grid.certified_grid_step,
        f6(grid.value),
        f6(diff)
    ))
}

fn cmd_counterexample(o: &GlobalOpts, step: f64) -> CliResult<String> {
    let c = builtin::appendix();
    let (py1, _) = marginal_channels(&c);
    let py2 = dmic_core::channel::y2_given_x2(&c);
    let table = solve_degradation_table(&py1, &py2)?;
    let (x1, y2, y1, value) = table.min_position();
    let surface = weak_alt_gap_surface(&c, step)?;
    let degraded = check_degraded(&c, o.tol);
    if o.json {
        return Ok(to_json(&json!({
            "channel": "appendix",
            "table": table,
            "offending": { "x1": x1, "y2": y2, "y1": y1, "value": value },
            "feasible": table.feasible,
            "weak_alt_min_gap": surface.min_gap,
            "weak_alt_argmin": [surface.argmin.0, surface.argmin.1],
            "surface_step": surface.step,
            "degraded": degraded,
        })));
    }
    let mut s = String::from("solved p(y1=1|x1,y2):\n");
    for a in 0..table.nx1 {
        for b in 0..table.ny2 {
            let _ = writeln!(s, "  x1={a} y2={b}: {}", f6(table.get(a, b, 1)));
        }
    }
    let _ = writeln!(
        s,
        "offending entry: p(y1={y1}|x1={x1},y2={y2}) = {}",
        f6(value)
    );
    let _ = writeln!(s, "feasible: {}", table.feasible);
    let _ = writeln!(
        s,
        "weak-alt min gap (step {}): {} at p1={}, p2={}",
        surface.step,
        f6(surface.min_gap),
        f6(surface.argmin.0),
        f6(surface.argmin.1)
    );
    let _ = writeln!(s, "degraded: {degraded}");
    Ok(s)
}

fn cmd_gaussian(
    o: &GlobalOpts,
    kind: KindArg,
    p1: f64,
    p2: f64,
    a: f64,
    b: f64,
) -> CliResult<String> {
    let kind = match kind {
        KindArg::OneSidedWeak => GaussianKind::OneSidedWeak,
        KindArg::Mixed => GaussianKind::Mixed,
    };
    let v = dmic_core::gaussian_reference(p1, p2, a, b, kind)?;
    if o.json {
        return Ok(to_json(&json!({
            "kind": kind, "p1": p1, "p2": p2, "a": a, "b": b, "sum_rate": v,
        })));
    }
    Ok(format!("sum rate: {}\n", f6(v)))
}

fn cmd_export(name: &str, out: Option<&PathBuf>) -> CliResult<String> {
    let c = builtin_channel(name)?;
    let text = ChannelSpecFile::from_dmic(&c, Some(name), None).to_json();
    match out {
        Some(path) => {
            std::fs::write(path, &text).map_err(|e| CliError::io(path, e))?;
            Ok(String::new())
        }
        None => Ok(text),
    }
}
