use std::path::PathBuf;

use anyhow::Result;
use clap::{Args, ValueEnum};
use serde_json::{json, Value};

use ruin_core::montecarlo::DEFAULT_GRID_POINTS;
use ruin_core::{
    classify, convergence_study, critical_points, estimate_ruin_multi, log_rate_and, peak_constants,
    pi_and_asym, pi_and_exact_h1, pi_sim_asym, pickands, piterbarg_for_crossing, piterbarg_h_half,
    piterbarg_simulated, ConvergenceOptions, Estimator, EstimatorChoice, FormulaConstants, Grid, LogRateOptions,
    NormalizedParams, PickandsEstimator, PickandsOptions, PiterbargOptions, RegimeTag, RuinQuery, RuinType,
};

use crate::config::ModelArgs;
use crate::output::{csv_bytes, emit, json_bytes, object, to_value, Format};
use crate::plot::{render, Panel, Series};
use crate::{Cli, Command, Usage};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RuinArg {
    Simultaneous,
    Joint,
    AtLeastOne,
}

impl From<RuinArg> for RuinType {
    fn from(r: RuinArg) -> Self {
        match r {
            RuinArg::Simultaneous => RuinType::Simultaneous,
            RuinArg::Joint => RuinType::Joint,
            RuinArg::AtLeastOne => RuinType::AtLeastOne,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum EstimatorArg {
    Plain,
    Shifted,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ChoiceArg {
    Auto,
    Plain,
    Shifted,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PickandsEstimatorArg {
    Ratio,
    Truncated,
}

#[derive(Debug, Args)]
pub struct AsymArgs {
    #[arg(long, value_enum, default_value_t = RuinArg::Joint)]
    pub ruin: RuinArg,
    /// Pickands constant, needed when H is neither 1/2 nor 1
    #[arg(long)]
    pub pickands: Option<f64>,
    /// Piterbarg constant; computed from the model when omitted
    #[arg(long)]
    pub piterbarg: Option<f64>,
    /// Values of N at which to evaluate (default: the model's N)
    #[arg(long = "n-list", value_delimiter = ',')]
    pub n_list: Vec<f64>,
}

#[derive(Debug, Args)]
pub struct LogasymArgs {
    /// Points per axis of the coarse scan
    #[arg(long, default_value_t = 200)]
    pub grid: usize,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(long, value_enum, default_value_t = RuinArg::Joint)]
    pub ruin: RuinArg,
    #[arg(long, value_enum, default_value_t = EstimatorArg::Plain)]
    pub estimator: EstimatorArg,
    #[arg(long, default_value_t = 100_000)]
    pub reps: u64,
    #[arg(long = "grid-points", default_value_t = DEFAULT_GRID_POINTS)]
    pub grid_points: usize,
    /// Several N on common paths (default: the model's N)
    #[arg(long = "n-list", value_delimiter = ',')]
    pub n_list: Vec<f64>,
}

#[derive(Debug, Args)]
pub struct PickandsArgs {
    /// Simulate even where the constant is known exactly
    #[arg(long)]
    pub simulate: bool,
    #[arg(long = "truncation-t", default_value_t = 10.0)]
    pub truncation_t: f64,
    #[arg(long, default_value_t = 0.005)]
    pub delta: f64,
    #[arg(long, default_value_t = 100_000)]
    pub reps: u64,
    #[arg(long, value_enum, default_value_t = PickandsEstimatorArg::Ratio)]
    pub estimator: PickandsEstimatorArg,
}

#[derive(Debug, Args)]
pub struct PiterbargArgs {
    /// Drift slope on t < 0 (default: from the model's crossing point)
    #[arg(long = "beta-neg")]
    pub beta_neg: Option<f64>,
    /// Drift slope on t >= 0
    #[arg(long = "beta-pos")]
    pub beta_pos: Option<f64>,
    /// Estimate by simulation instead of the closed form
    #[arg(long)]
    pub simulate: bool,
    #[arg(long = "truncation-t", default_value_t = 15.0)]
    pub truncation_t: f64,
    #[arg(long, default_value_t = 0.005)]
    pub delta: f64,
    #[arg(long, default_value_t = 100_000)]
    pub reps: u64,
}

#[derive(Debug, Args)]
pub struct ConvergenceArgs {
    #[arg(long, value_enum, default_value_t = RuinArg::Joint)]
    pub ruin: RuinArg,
    #[arg(long = "n-list", value_delimiter = ',', default_values_t = [1.0, 2.0, 4.0, 8.0])]
    pub n_list: Vec<f64>,
    #[arg(long, value_enum, default_value_t = ChoiceArg::Auto)]
    pub estimator: ChoiceArg,
    #[arg(long, default_value_t = 100_000)]
    pub reps: u64,
    #[arg(long = "grid-points", default_value_t = DEFAULT_GRID_POINTS)]
    pub grid_points: usize,
    #[arg(long)]
    pub pickands: Option<f64>,
    #[arg(long)]
    pub piterbarg: Option<f64>,
}

fn model_args(cli: &Cli) -> Result<ModelArgs> {
    let flags = cli.model.clone();
    Ok(match &cli.config {
        Some(path) => flags.over(ModelArgs::load(path)?),
        None => flags,
    })
}

fn json_only(cli: &Cli, name: &str) -> Result<()> {
    if cli.format == Format::Csv {
        return Err(Usage(format!("{name} output is nested; use --format json")).into());
    }
    Ok(())
}

fn write(cli: &Cli, records: &[Value], summary: &str) -> Result<()> {
    let bytes = match cli.format {
        Format::Json if records.len() == 1 => json_bytes(&records[0])?,
        Format::Json => json_bytes(&Value::Array(records.to_vec()))?,
        Format::Csv => csv_bytes(records)?,
    };
    emit(cli.out.as_deref(), &bytes, summary)
}

pub fn run(cli: &Cli) -> Result<()> {
    if cli.plot && !matches!(cli.command, Command::Convergence(_)) {
        return Err(Usage("--plot is only available for convergence".into()).into());
    }
    match &cli.command {
        Command::Classify => cmd_classify(cli),
        Command::Asym(a) => cmd_asym(cli, a),
        Command::Logasym(a) => cmd_logasym(cli, a),
        Command::Simulate(a) => cmd_simulate(cli, a),
        Command::Pickands(a) => cmd_pickands(cli, a),
        Command::Piterbarg(a) => cmd_piterbarg(cli, a),
        Command::Convergence(a) => cmd_convergence(cli, a),
    }
}

fn constants_for(p: &NormalizedParams, pickands: Option<f64>, piterbarg: Option<f64>) -> FormulaConstants {
    let mut c = FormulaConstants { pickands, piterbarg };
    if c.piterbarg.is_none() && classify(p).tag == RegimeTag::InteriorHalf {
        if let Ok(k) = peak_constants(p, &critical_points(p)) {
            c.piterbarg = piterbarg_for_crossing(critical_points(p).t_star, k.a1, k.a2).ok().map(|e| e.value);
        }
    }
    c
}

fn cmd_classify(cli: &Cli) -> Result<()> {
    json_only(cli, "classify")?;
    let (raw, p) = model_args(cli)?.model()?;
    let regime = classify(&p);
    let cp = regime.detail;
    let peak = peak_constants(&p, &cp);
    let tag = regime.tag;
    let mut warnings = Vec::new();
    if p.swapped {
        warnings.push("companies were relabeled so that c1 > c2".to_string());
    }
    if tag == RegimeTag::BeyondHorizon {
        warnings.push("t* >= T: the two-company exact asymptotics do not apply; use Monte Carlo or the logarithmic rate".into());
    }
    if let Err(e) = &peak {
        warnings.push(format!("peak constants unavailable: {e}"));
    }
    let two_dim = !matches!(tag, RegimeTag::Degenerate | RegimeTag::BeyondHorizon) && !p.h.is_one();
    let applicability = object([
        ("simultaneous_exact", json!(two_dim)),
        ("joint_exact", json!(two_dim && matches!(tag, RegimeTag::SimCaseI | RegimeTag::SimCaseV))),
        ("joint_log_rate", json!(true)),
        ("h1_exact", json!(p.h.is_one())),
        ("needs_pickands", json!(two_dim && !p.h.is_half())),
        ("needs_piterbarg", json!(tag == RegimeTag::InteriorHalf)),
    ]);
    let v = object([
        ("input", to_value(&raw)?),
        ("normalized", to_value(&p)?),
        ("critical_points", to_value(&cp)?),
        ("peak_constants", match &peak { Ok(k) => to_value(k)?, Err(_) => Value::Null }),
        ("regime", json!(tag.to_string())),
        ("description", json!(regime.describe())),
        ("applicability", applicability),
        ("warnings", json!(warnings)),
    ]);
    write(cli, &[v], &format!("regime {tag}"))
}

fn cmd_asym(cli: &Cli, a: &AsymArgs) -> Result<()> {
    json_only(cli, "asym")?;
    let (_, p) = model_args(cli)?.model()?;
    let regime = classify(&p);
    let ruin: RuinType = a.ruin.into();
    let flags = cli.flags();
    let constants = constants_for(&p, a.pickands, a.piterbarg);
    let value = if p.h.is_one() && ruin != RuinType::AtLeastOne {
        pi_and_exact_h1(&p, flags)?.as_asymptotic()
    } else {
        match ruin {
            RuinType::Simultaneous => pi_sim_asym(&p, &regime, &constants, flags)?,
            RuinType::Joint => pi_and_asym(&p, &regime, &constants, flags)?,
            RuinType::AtLeastOne => {
                return Err(Usage("no asymptotic formula for at-least-one ruin".into()).into())
            }
        }
    };
    let ns = if a.n_list.is_empty() { vec![p.n_businesses] } else { a.n_list.clone() };
    let evaluations: Vec<Value> = ns
        .iter()
        .map(|&n| {
            object([
                ("n", json!(n)),
                ("value", json!(value.evaluate(n))),
                ("log_value", json!(value.log_evaluate(n))),
                ("leading", json!(value.evaluate_leading(n))),
            ])
        })
        .collect();
    let v = object([
        ("ruin_type", json!(ruin.name())),
        ("regime", json!(regime.tag.to_string())),
        ("form", json!(value.form)),
        ("log_prefactor", json!(value.log_prefactor)),
        ("n_power", json!(value.n_power)),
        ("rate", json!(value.rate)),
        ("sign", json!(value.sign)),
        ("tail", to_value(&value.tail)?),
        ("constants", to_value(&constants)?),
        ("evaluations", json!(evaluations)),
    ]);
    write(cli, &[v], &format!("{} rate {}", value.form, crate::output::round12(value.rate)))
}

fn cmd_logasym(cli: &Cli, a: &LogasymArgs) -> Result<()> {
    let (_, p) = model_args(cli)?.model()?;
    if a.grid < 2 {
        return Err(Usage("--grid must be at least 2".into()).into());
    }
    let r = log_rate_and(&p, LogRateOptions { grid: a.grid, ..Default::default() });
    let v = object([
        ("ruin_type", json!("joint")),
        ("regime", json!(classify(&p).tag.to_string())),
        ("rate", json!(r.rate)),
        ("argmin_s", json!(r.argmin_s)),
        ("argmin_t", json!(r.argmin_t)),
        ("objective_at_argmin", json!(r.objective_at_argmin)),
        ("grid", json!(a.grid)),
    ]);
    write(cli, &[v], &format!("log rate {}", crate::output::round12(r.rate)))
}

fn cmd_simulate(cli: &Cli, a: &SimulateArgs) -> Result<()> {
    let (_, p) = model_args(cli)?.model()?;
    let estimator = match a.estimator {
        EstimatorArg::Plain => Estimator::Plain,
        EstimatorArg::Shifted => Estimator::Shifted,
    };
    let q = RuinQuery::new(p, a.ruin.into(), Grid::new(p.horizon, a.grid_points)?, a.reps, cli.seed, estimator)?;
    let ns = if a.n_list.is_empty() { vec![p.n_businesses] } else { a.n_list.clone() };
    let results = estimate_ruin_multi(&q, &ns, &[estimator])?;
    let mut records = Vec::new();
    for e in results.into_iter().flatten() {
        if let Some(w) = &e.warning {
            eprintln!("warning: N = {}: {w}", e.n_businesses);
        }
        records.push(match cli.format {
            Format::Csv => object([
                ("ruin_type", json!(e.ruin_type.name())),
                ("N", json!(e.n_businesses)),
                ("estimator", json!(e.estimator.name())),
                ("p_hat", json!(e.p_hat)),
                ("std_error", json!(e.std_error)),
                ("replications", json!(e.replications)),
                ("grid_n", json!(e.grid_n)),
                ("seed", json!(e.seed)),
            ]),
            Format::Json => to_value(&e)?,
        });
    }
    write(cli, &records, &format!("{} estimate(s)", records.len()))
}

fn cmd_pickands(cli: &Cli, a: &PickandsArgs) -> Result<()> {
    let h = model_args(cli)?.hurst()?;
    let opts = PickandsOptions {
        truncation_t: a.truncation_t,
        grid_delta: a.delta,
        replications: a.reps,
        seed: cli.seed,
        estimator: match a.estimator {
            PickandsEstimatorArg::Ratio => PickandsEstimator::Ratio,
            PickandsEstimatorArg::Truncated => PickandsEstimator::Truncated,
        },
        force_simulated: a.simulate,
    };
    let e = pickands(h, opts)?;
    write(cli, &[to_value(&e)?], &format!("Pickands constant {}", crate::output::round12(e.value)))
}

fn cmd_piterbarg(cli: &Cli, a: &PiterbargArgs) -> Result<()> {
    let (beta_neg, beta_pos) = match (a.beta_neg, a.beta_pos) {
        (Some(n), Some(p)) => (n, p),
        (None, None) => {
            let (_, p) = model_args(cli)?.model()?;
            let cp = critical_points(&p);
            let k = peak_constants(&p, &cp)?;
            (1.0 + 2.0 * cp.t_star * k.a2, 1.0 + 2.0 * cp.t_star * k.a1)
        }
        _ => return Err(Usage("give both --beta-neg and --beta-pos, or neither".into()).into()),
    };
    let e = if a.simulate {
        let opts = PiterbargOptions {
            truncation_t: a.truncation_t,
            grid_delta: a.delta,
            replications: a.reps,
            seed: cli.seed,
        };
        piterbarg_simulated(beta_neg, beta_pos, opts)?
    } else {
        piterbarg_h_half(beta_neg, beta_pos)?
    };
    write(cli, &[to_value(&e)?], &format!("Piterbarg constant {}", crate::output::round12(e.value)))
}

fn svg_path(cli: &Cli) -> PathBuf {
    match &cli.out {
        Some(p) => p.with_extension("svg"),
        None => PathBuf::from("convergence.svg"),
    }
}

fn cmd_convergence(cli: &Cli, a: &ConvergenceArgs) -> Result<()> {
    let (_, p) = model_args(cli)?.model()?;
    let opts = ConvergenceOptions {
        grid_points: a.grid_points,
        replications: a.reps,
        seed: cli.seed,
        estimator: match a.estimator {
            ChoiceArg::Auto => EstimatorChoice::Auto,
            ChoiceArg::Plain => EstimatorChoice::Plain,
            ChoiceArg::Shifted => EstimatorChoice::Shifted,
        },
        constants: constants_for(&p, a.pickands, a.piterbarg),
        flags: cli.flags(),
    };
    let table = convergence_study(&p, a.ruin.into(), &a.n_list, opts)?;
    if let Some(note) = &table.note {
        eprintln!("note: {note}");
    }
    let rows: Vec<Value> = table
        .rows
        .iter()
        .map(|r| {
            object([
                ("N", json!(r.n)),
                ("mc_estimate", json!(r.mc_estimate)),
                ("mc_stderr", json!(r.mc_stderr)),
                ("estimator", json!(r.estimator.name())),
                ("asym_value", json!(r.asym_value)),
                ("ratio", json!(r.ratio)),
                ("log_mc_over_n", json!(r.log_mc_over_n)),
                ("log_slope", json!(r.log_slope)),
                ("log_rate", json!(r.log_rate)),
            ])
        })
        .collect();
    match cli.format {
        Format::Csv => write(cli, &rows, &format!("{} rows", rows.len()))?,
        Format::Json => {
            let v = object([
                ("ruin_type", json!(table.ruin_type.name())),
                ("regime", json!(table.regime.to_string())),
                ("reference", json!(table.reference)),
                ("note", json!(table.note)),
                ("seed", json!(cli.seed)),
                ("replications", json!(a.reps)),
                ("grid_n", json!(a.grid_points)),
                ("rows", json!(rows)),
            ]);
            write(cli, &[v], &format!("{} rows", rows.len()))?;
        }
    }
    if cli.plot {
        let pts = |f: &dyn Fn(&ruin_core::ConvergenceRow) -> Option<f64>| -> Vec<(f64, f64)> {
            table.rows.iter().filter_map(|r| f(r).map(|y| (r.n, y))).collect()
        };
        let mut left = vec![Series { label: "MC / asymptotic", color: "#1f77b4", points: pts(&|r| r.ratio), dashed: false }];
        if left[0].points.is_empty() {
            left = vec![Series { label: "MC estimate", color: "#1f77b4", points: pts(&|r| Some(r.mc_estimate)), dashed: false }];
        } else {
            left.push(Series { label: "1", color: "#888888", points: pts(&|r| r.ratio.map(|_| 1.0)), dashed: true });
        }
        let mut right = vec![Series { label: "-ln(MC) / N", color: "#d62728", points: pts(&|r| Some(r.log_mc_over_n)), dashed: false }];
        let rate = pts(&|r| r.log_rate);
        if !rate.is_empty() {
            right.push(Series { label: "limiting rate", color: "#888888", points: rate, dashed: true });
        }
        let svg = render(&[
            Panel { title: "ratio", x_label: "N", series: left },
            Panel { title: "log-slope", x_label: "N", series: right },
        ]);
        let path = svg_path(cli);
        std::fs::write(&path, svg)?;
        println!("chart -> {}", path.display());
    }
    Ok(())
}
