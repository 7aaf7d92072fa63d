//! Command-line front end: parameter sweeps written as CSV or JSON.
//!
//! Every command except `region` sweeps exactly one axis. SNR sweeps hold
//! the power `P` fixed and set the noise to `P / SNR`. Records come out in
//! sweep order with the inputs echoed, every distortion in natural units and
//! as `-10 log10` dB.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::bounds::{combined_outer, outer_bound_1, outer_bound_2};
use crate::cognitive::{
    classify_regime, coexistence, inner_region, outer_region, FrontierKind, RegimeTag, RegionGrid,
};
use crate::error::{Error, Result};
use crate::estimators::analog_params;
use crate::mc::{simulate_linear_mmse, simulate_scheme_idealized, Estimate, McConfig};
use crate::mismatch::{
    degraded_distortion, design_allocation, digital_dpc_mismatch, hda_mismatch,
    mi_refinement_digital, mi_refinement_hda,
};
use crate::model::{
    db_to_linear, distortion_db, linear_to_db, Allocation, ChannelSpec, CognitiveConfig, Scheme,
    SourceModel,
};
use crate::schemes::{digital_dpc_distortion, optimize_scheme, scheme_distortion};

/// Environment variable naming the default output directory.
pub const OUT_DIR_ENV: &str = "JSCC_OUT_DIR";

#[derive(Parser, Debug, Clone, Serialize)]
#[command(
    name = "jscc",
    version,
    about = "Distortion bounds and schemes for sources sent over channels with correlated interference"
)]
pub struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Csv, global = true)]
    pub format: Format,
    /// Output file. Defaults to `$JSCC_OUT_DIR/<command>.<format>` when the
    /// variable is set, standard output otherwise.
    #[arg(long, global = true)]
    #[serde(skip)]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    fn extension(&self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

#[derive(Subcommand, Debug, Clone, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    /// Outer bounds on the point-to-point distortion.
    #[command(allow_negative_numbers = true)]
    Bounds(BoundsArgs),
    /// Distortion of the coding schemes, optimized or at a fixed allocation.
    #[command(allow_negative_numbers = true)]
    Schemes(SchemesArgs),
    /// Digital-DPC and HDA under SNR mismatch.
    #[command(allow_negative_numbers = true)]
    Mismatch(MismatchArgs),
    /// Inner and outer distortion regions of the cognitive radio channel.
    #[command(allow_negative_numbers = true)]
    Region(RegionArgs),
    /// Secondary distortion under the coexistence constraint.
    #[command(allow_negative_numbers = true)]
    Coexist(CoexistArgs),
    /// Monte-Carlo check of the closed forms.
    #[command(allow_negative_numbers = true)]
    Verify(VerifyArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Bounds(_) => "bounds",
            Command::Schemes(_) => "schemes",
            Command::Mismatch(_) => "mismatch",
            Command::Region(_) => "region",
            Command::Coexist(_) => "coexist",
            Command::Verify(_) => "verify",
        }
    }
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct SourceArgs {
    #[arg(long, default_value_t = 1.0)]
    pub sigma_v2: f64,
    #[arg(long, default_value_t = 1.0)]
    pub sigma_s2: f64,
    /// Correlation of source and interference (when not swept).
    #[arg(long)]
    pub rho: Option<f64>,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct ChannelArgs {
    /// Transmit power.
    #[arg(long, default_value_t = 1.0)]
    pub p: f64,
    /// Noise variance (when the SNR is not swept).
    #[arg(long, default_value_t = 1.0)]
    pub n: f64,
}

/// Sweep flags; each command accepts a subset of the axes.
#[derive(Args, Debug, Clone, Default, Serialize)]
pub struct SweepArgs {
    #[arg(long)]
    pub rho_from: Option<f64>,
    #[arg(long)]
    pub rho_to: Option<f64>,
    /// Linear SNR `P/N`.
    #[arg(long)]
    pub snr_from: Option<f64>,
    #[arg(long)]
    pub snr_to: Option<f64>,
    #[arg(long)]
    pub snr_db_from: Option<f64>,
    #[arg(long)]
    pub snr_db_to: Option<f64>,
    /// Analog power `P_a`.
    #[arg(long)]
    pub pa_from: Option<f64>,
    #[arg(long)]
    pub pa_to: Option<f64>,
    /// Number of sweep points, ends included.
    #[arg(long, default_value_t = 41)]
    pub points: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum AxisKind {
    Rho,
    Snr,
    Pa,
    ActualSnr,
}

impl AxisKind {
    fn flag(&self) -> &'static str {
        match self {
            AxisKind::Rho => "--rho-from/--rho-to",
            AxisKind::Snr => "--snr-from/--snr-to or --snr-db-from/--snr-db-to",
            AxisKind::Pa => "--pa-from/--pa-to",
            AxisKind::ActualSnr => "--actual-snr-db-from/--actual-snr-db-to",
        }
    }
}

/// Resolved sweep. SNR values are linear.
#[derive(Debug, Clone)]
struct Sweep {
    kind: AxisKind,
    values: Vec<f64>,
}

fn range(
    name: &'static str,
    from: Option<f64>,
    to: Option<f64>,
    points: usize,
    map: fn(f64) -> f64,
) -> Result<Option<Vec<f64>>> {
    match (from, to) {
        (None, None) => Ok(None),
        (None, Some(_)) => Err(Error::invalid(
            "sweep",
            format!("{name}-to given without {name}-from"),
        )),
        (Some(a), to) => {
            let b = to.unwrap_or(a);
            if !(a.is_finite() && b.is_finite()) {
                return Err(Error::invalid(
                    "sweep",
                    format!("{name} bounds must be finite"),
                ));
            }
            if a == b {
                return Ok(Some(vec![map(a)]));
            }
            if points < 2 {
                return Err(Error::invalid(
                    "sweep",
                    format!("--points {points} cannot span {a}..{b}"),
                ));
            }
            Ok(Some(
                crate::optimizer::linspace(a, b, points)
                    .into_iter()
                    .map(map)
                    .collect(),
            ))
        }
    }
}

fn identity(x: f64) -> f64 {
    x
}

fn resolve_sweep(
    sweep: &SweepArgs,
    actual: Option<(Option<f64>, Option<f64>)>,
    allowed: &[AxisKind],
) -> Result<Sweep> {
    let n = sweep.points;
    let mut found: Vec<(AxisKind, Vec<f64>)> = Vec::new();
    if let Some(v) = range("--rho", sweep.rho_from, sweep.rho_to, n, identity)? {
        found.push((AxisKind::Rho, v));
    }
    if let Some(v) = range("--snr", sweep.snr_from, sweep.snr_to, n, identity)? {
        found.push((AxisKind::Snr, v));
    }
    if let Some(v) = range(
        "--snr-db",
        sweep.snr_db_from,
        sweep.snr_db_to,
        n,
        db_to_linear,
    )? {
        found.push((AxisKind::Snr, v));
    }
    if let Some(v) = range("--pa", sweep.pa_from, sweep.pa_to, n, identity)? {
        found.push((AxisKind::Pa, v));
    }
    if let Some((from, to)) = actual {
        if let Some(v) = range("--actual-snr-db", from, to, n, db_to_linear)? {
            found.push((AxisKind::ActualSnr, v));
        }
    }
    let options = allowed
        .iter()
        .map(AxisKind::flag)
        .collect::<Vec<_>>()
        .join(", ");
    match found.len() {
        1 => {
            let (kind, values) = found.pop().unwrap();
            if allowed.contains(&kind) {
                Ok(Sweep { kind, values })
            } else {
                Err(Error::invalid(
                    "sweep",
                    format!(
                        "{} is not a sweep axis of this command (use {options})",
                        kind.flag()
                    ),
                ))
            }
        }
        0 => Err(Error::invalid(
            "sweep",
            format!("exactly one sweep axis required: {options}"),
        )),
        _ => Err(Error::invalid(
            "sweep",
            "exactly one sweep axis allowed per request",
        )),
    }
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct BoundsArgs {
    #[command(flatten)]
    pub source: SourceArgs,
    #[command(flatten)]
    pub channel: ChannelArgs,
    #[command(flatten)]
    pub sweep: SweepArgs,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SchemeChoice {
    Uncoded,
    NaiveDpc,
    DigitalDpc,
    Hda,
    All,
}

impl SchemeChoice {
    fn schemes(&self) -> Vec<Scheme> {
        match self {
            SchemeChoice::Uncoded => vec![Scheme::Uncoded],
            SchemeChoice::NaiveDpc => vec![Scheme::NaiveDpc],
            SchemeChoice::DigitalDpc => vec![Scheme::DigitalDpc],
            SchemeChoice::Hda => vec![Scheme::Hda],
            SchemeChoice::All => Scheme::ALL.to_vec(),
        }
    }
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct SchemesArgs {
    #[command(flatten)]
    pub source: SourceArgs,
    #[command(flatten)]
    pub channel: ChannelArgs,
    #[command(flatten)]
    pub sweep: SweepArgs,
    #[arg(long, value_enum, default_value_t = SchemeChoice::All)]
    pub scheme: SchemeChoice,
    /// Minimize over `(γ, P_a)`. Implied unless `--pa` is given.
    #[arg(long, conflicts_with_all = ["gamma", "pa"])]
    pub optimize: bool,
    /// Fixed mixing coefficient.
    #[arg(long)]
    pub gamma: Option<f64>,
    /// Fixed analog power.
    #[arg(long)]
    pub pa: Option<f64>,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct MismatchArgs {
    #[command(flatten)]
    pub source: SourceArgs,
    #[arg(long, default_value_t = 1.0)]
    pub p: f64,
    #[arg(long, default_value_t = 10.0)]
    pub design_snr_db: f64,
    /// Actual SNR when sweeping `P_a`.
    #[arg(long)]
    pub actual_snr_db: Option<f64>,
    #[arg(long)]
    pub actual_snr_db_from: Option<f64>,
    #[arg(long)]
    pub actual_snr_db_to: Option<f64>,
    /// Mixing coefficient used with `--pa` or a `P_a` sweep.
    #[arg(long)]
    pub gamma: Option<f64>,
    /// Analog power overriding the design optimum.
    #[arg(long)]
    pub pa: Option<f64>,
    #[command(flatten)]
    pub sweep: SweepArgs,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum RegimeChoice {
    Weak,
    VeryStrong,
}

impl RegimeChoice {
    fn tag(&self) -> RegimeTag {
        match self {
            RegimeChoice::Weak => RegimeTag::Weak,
            RegimeChoice::VeryStrong => RegimeTag::VeryStrong,
        }
    }

    fn default_gain(&self) -> f64 {
        match self {
            RegimeChoice::Weak => 0.5,
            RegimeChoice::VeryStrong => 1.5,
        }
    }
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct CognitiveArgs {
    #[arg(long, value_enum)]
    pub regime: RegimeChoice,
    /// Gain from the primary transmitter to the secondary receiver
    /// (default 0.5 weak, 1.5 very strong).
    #[arg(long)]
    pub h1: Option<f64>,
    /// Gain from the secondary transmitter to the primary receiver.
    #[arg(long)]
    pub h2: Option<f64>,
    #[arg(long, default_value_t = 1.0)]
    pub p1: f64,
    #[arg(long, default_value_t = 1.0)]
    pub p2: f64,
    #[arg(long, default_value_t = 1.0)]
    pub n1: f64,
    #[arg(long, default_value_t = 1.0)]
    pub n2: f64,
    #[arg(long, default_value_t = 1.0)]
    pub sigma_v1_2: f64,
    #[arg(long, default_value_t = 1.0)]
    pub sigma_v2_2: f64,
    /// Grid resolution: `γ` points.
    #[arg(long, default_value_t = 64)]
    pub gamma_points: usize,
    /// Grid resolution: `P_a` points.
    #[arg(long, default_value_t = 64)]
    pub pa_points: usize,
    /// `D_1` levels solved on the inner frontier.
    #[arg(long, default_value_t = 64)]
    pub levels: usize,
    #[arg(long, default_value_t = 1024)]
    pub rho_x_points: usize,
    #[arg(long, default_value_t = 256)]
    pub splits: usize,
}

impl CognitiveArgs {
    fn config(&self, rho: f64) -> Result<CognitiveConfig> {
        let h1 = self.h1.unwrap_or(self.regime.default_gain());
        let h2 = self.h2.unwrap_or(self.regime.default_gain());
        let cfg = CognitiveConfig::new(self.p1, self.p2, h1, h2, rho)?
            .with_noise(self.n1, self.n2)?
            .with_source_variances(self.sigma_v1_2, self.sigma_v2_2)?;
        let found = classify_regime(&cfg);
        if found != self.regime.tag() {
            return Err(Error::Regime {
                expected: self.regime.tag().name(),
                found: found.name(),
            });
        }
        Ok(cfg)
    }

    fn grid(&self) -> RegionGrid {
        RegionGrid {
            gamma_points: self.gamma_points,
            pa_points: self.pa_points,
            levels: self.levels,
            rho_x_points: self.rho_x_points,
            splits: self.splits,
            ..Default::default()
        }
    }
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct RegionArgs {
    #[command(flatten)]
    pub cognitive: CognitiveArgs,
    #[arg(long, default_value_t = 0.0)]
    pub rho: f64,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct CoexistArgs {
    #[command(flatten)]
    pub cognitive: CognitiveArgs,
    #[command(flatten)]
    pub sweep: SweepArgs,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub source: SourceArgs,
    #[command(flatten)]
    pub channel: ChannelArgs,
    #[command(flatten)]
    pub sweep: SweepArgs,
    #[arg(long, default_value_t = 1.0)]
    pub gamma: f64,
    #[arg(long, default_value_t = 0.0)]
    pub pa: f64,
    /// Base seed; sweep point `i` uses `seed + i`.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 1_000_000)]
    pub samples: usize,
    /// Agreement threshold in standard errors.
    #[arg(long, default_value_t = 3.0)]
    pub k: f64,
}

/// A value in an output record.
#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Text(String),
    Flag(bool),
    Empty,
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Num(x)
    }
}

impl From<Option<f64>> for Cell {
    fn from(x: Option<f64>) -> Self {
        x.map_or(Cell::Empty, Cell::Num)
    }
}

impl From<bool> for Cell {
    fn from(x: bool) -> Self {
        Cell::Flag(x)
    }
}

impl From<&str> for Cell {
    fn from(x: &str) -> Self {
        Cell::Text(x.to_string())
    }
}

fn format_num(x: f64) -> String {
    // Folds -0 into 0.
    let x = x + 0.0;
    if x.is_finite() {
        format!("{x:.16e}")
    } else if x.is_nan() {
        "nan".into()
    } else if x > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Num(x) => format_num(*x),
            Cell::Text(s) => s.clone(),
            Cell::Flag(b) => b.to_string(),
            Cell::Empty => String::new(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Num(x) if x.is_finite() => json!(x + 0.0),
            Cell::Num(x) => Value::String(format_num(*x)),
            Cell::Text(s) => Value::String(s.clone()),
            Cell::Flag(b) => Value::Bool(*b),
            Cell::Empty => Value::Null,
        }
    }
}

/// One output record, columns in order.
#[derive(Debug, Clone, Default)]
pub struct Record(Vec<(String, Cell)>);

impl Record {
    fn push(&mut self, name: impl Into<String>, value: impl Into<Cell>) -> &mut Self {
        self.0.push((name.into(), value.into()));
        self
    }

    /// A distortion and its dB sibling.
    fn distortion(&mut self, name: &str, d: f64) -> &mut Self {
        self.push(name, d);
        self.push(format!("{name}_db"), distortion_db(d))
    }

    pub fn get(&self, name: &str) -> Option<&Cell> {
        self.0.iter().find(|(k, _)| k == name).map(|(_, v)| v)
    }
}

/// Records produced by one request.
#[derive(Debug, Clone)]
pub struct Table {
    pub request: Value,
    pub records: Vec<Record>,
}

impl Table {
    pub fn columns(&self) -> Vec<&str> {
        self.records
            .first()
            .map(|r| r.0.iter().map(|(k, _)| k.as_str()).collect())
            .unwrap_or_default()
    }

    pub fn to_csv(&self) -> String {
        let mut out = self.columns().join(",");
        out.push('\n');
        for record in &self.records {
            let line: Vec<String> = record.0.iter().map(|(_, v)| v.csv()).collect();
            let _ = writeln!(out, "{}", line.join(","));
        }
        out
    }

    pub fn to_json(&self) -> String {
        let records: Vec<Value> = self
            .records
            .iter()
            .map(|r| {
                Value::Object(
                    r.0.iter()
                        .map(|(k, v)| (k.clone(), v.json()))
                        .collect::<Map<_, _>>(),
                )
            })
            .collect();
        let mut out =
            serde_json::to_string_pretty(&json!({ "request": self.request, "records": records }))
                .expect("records serialize");
        out.push('\n');
        out
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Csv => self.to_csv(),
            Format::Json => self.to_json(),
        }
    }
}

fn source_model(args: &SourceArgs, rho: Option<f64>) -> Result<SourceModel> {
    SourceModel::new(
        args.sigma_v2,
        args.sigma_s2,
        rho.or(args.rho).unwrap_or(0.0),
    )
}

fn reject_fixed_rho(args: &SourceArgs, sweep: &Sweep) -> Result<()> {
    if sweep.kind == AxisKind::Rho && args.rho.is_some() {
        Err(Error::invalid("sweep", "--rho conflicts with a rho sweep"))
    } else {
        Ok(())
    }
}

/// Model and channel for one sweep point of the point-to-point commands.
fn point_setup(
    source: &SourceArgs,
    channel: &ChannelArgs,
    kind: AxisKind,
    x: f64,
) -> Result<(SourceModel, ChannelSpec)> {
    let model = source_model(source, (kind == AxisKind::Rho).then_some(x))?;
    let ch = if kind == AxisKind::Snr {
        ChannelSpec::new(channel.p, channel.p / x)?
    } else {
        ChannelSpec::new(channel.p, channel.n)?
    };
    Ok((model, ch))
}

fn echo_point(r: &mut Record, model: &SourceModel, ch: &ChannelSpec) {
    r.push("sigma_v2", model.sigma_v2())
        .push("sigma_s2", model.sigma_s2())
        .push("rho", model.rho())
        .push("p", ch.p())
        .push("n", ch.n_design())
        .push("snr_db", ch.design_snr_db());
}

fn sweep_records<F>(values: &[f64], f: F) -> Result<Vec<Record>>
where
    F: Fn(usize, f64) -> Result<Record> + Sync,
{
    values
        .par_iter()
        .enumerate()
        .map(|(i, &x)| f(i, x))
        .collect()
}

fn bounds(args: &BoundsArgs) -> Result<Vec<Record>> {
    let sweep = resolve_sweep(&args.sweep, None, &[AxisKind::Snr, AxisKind::Rho])?;
    reject_fixed_rho(&args.source, &sweep)?;
    sweep_records(&sweep.values, |_, x| {
        let (model, ch) = point_setup(&args.source, &args.channel, sweep.kind, x)?;
        let mut r = Record::default();
        echo_point(&mut r, &model, &ch);
        r.distortion("d_ob1", outer_bound_1(&model, &ch))
            .distortion("d_ob2", outer_bound_2(&model, &ch))
            .distortion("d_ob", combined_outer(&model, &ch));
        Ok(r)
    })
}

fn column_name(scheme: Scheme) -> String {
    scheme.name().replace('-', "_")
}

fn schemes(args: &SchemesArgs) -> Result<Vec<Record>> {
    let sweep = resolve_sweep(
        &args.sweep,
        None,
        &[AxisKind::Rho, AxisKind::Snr, AxisKind::Pa],
    )?;
    reject_fixed_rho(&args.source, &sweep)?;
    let fixed = args.pa.is_some() || args.gamma.is_some() || sweep.kind == AxisKind::Pa;
    if fixed && args.pa.is_none() && sweep.kind != AxisKind::Pa {
        return Err(Error::invalid(
            "pa out of range",
            "--gamma needs --pa (or a pa sweep)",
        ));
    }
    if sweep.kind == AxisKind::Pa && args.pa.is_some() {
        return Err(Error::invalid("sweep", "--pa conflicts with a pa sweep"));
    }
    let list = args.scheme.schemes();
    sweep_records(&sweep.values, |_, x| {
        let (model, ch) = point_setup(&args.source, &args.channel, sweep.kind, x)?;
        let mut r = Record::default();
        echo_point(&mut r, &model, &ch);
        if fixed {
            let pa = if sweep.kind == AxisKind::Pa {
                x
            } else {
                args.pa.unwrap_or(0.0)
            };
            let alloc = Allocation::for_channel(args.gamma.unwrap_or(1.0), pa, &ch)?;
            r.push("gamma", alloc.gamma()).push("pa", alloc.pa());
            for &scheme in &list {
                let d = scheme_distortion(&model, &ch, &alloc, scheme)?;
                r.distortion(&format!("d_{}", column_name(scheme)), d);
            }
        } else {
            for &scheme in &list {
                let res = optimize_scheme(&model, &ch, scheme)?;
                let name = column_name(scheme);
                r.distortion(&format!("d_{name}"), res.best.distortion);
                if scheme.has_allocation() {
                    r.push(format!("gamma_{name}"), res.best.allocation.gamma())
                        .push(format!("pa_{name}"), res.best.allocation.pa())
                        .push(format!("gamma_one_optimal_{name}"), res.gamma_one_optimal);
                }
            }
        }
        r.distortion("d_ob", combined_outer(&model, &ch));
        Ok(r)
    })
}

fn mismatch(args: &MismatchArgs) -> Result<Vec<Record>> {
    let sweep = resolve_sweep(
        &args.sweep,
        Some((args.actual_snr_db_from, args.actual_snr_db_to)),
        &[AxisKind::ActualSnr, AxisKind::Pa],
    )?;
    let model = source_model(&args.source, None)?;
    let design = ChannelSpec::from_snr_db(args.p, args.design_snr_db)?;
    let base_alloc = match (sweep.kind, args.pa) {
        (AxisKind::Pa, Some(_)) => {
            return Err(Error::invalid("sweep", "--pa conflicts with a pa sweep"))
        }
        (AxisKind::Pa, None) => None,
        (_, Some(pa)) => Some(Allocation::for_channel(
            args.gamma.unwrap_or(1.0),
            pa,
            &design,
        )?),
        (_, None) => {
            if args.gamma.is_some() {
                return Err(Error::invalid(
                    "pa out of range",
                    "--gamma needs --pa (or a pa sweep)",
                ));
            }
            Some(design_allocation(&model, &design)?)
        }
    };
    let fixed_actual = match (sweep.kind, args.actual_snr_db) {
        (AxisKind::Pa, Some(db)) => Some(db_to_linear(db)),
        (AxisKind::Pa, None) => {
            return Err(Error::invalid("sweep", "a pa sweep needs --actual-snr-db"));
        }
        (_, Some(_)) => {
            return Err(Error::invalid(
                "sweep",
                "--actual-snr-db conflicts with an actual SNR sweep",
            ));
        }
        _ => None,
    };
    let independent = model.rho() == 0.0;

    sweep_records(&sweep.values, |_, x| {
        let (alloc, actual_snr) = match sweep.kind {
            AxisKind::Pa => (
                Allocation::for_channel(args.gamma.unwrap_or(1.0), x, &design)?,
                fixed_actual.unwrap(),
            ),
            _ => (base_alloc.unwrap(), x),
        };
        let ch = design.with_actual_noise(design.p() / actual_snr)?;
        let decodable = ch.n_actual() <= ch.n_design();
        let d_design = digital_dpc_distortion(&model, &design, &alloc)?;
        let (d_digital, d_hda) = if decodable {
            (
                digital_dpc_mismatch(&model, &ch, &alloc)?,
                hda_mismatch(&model, &ch, &alloc)?,
            )
        } else {
            let d = degraded_distortion(&model, &ch, &alloc)?;
            (d, d)
        };
        let mut r = Record::default();
        r.push("sigma_v2", model.sigma_v2())
            .push("sigma_s2", model.sigma_s2())
            .push("rho", model.rho())
            .push("p", ch.p())
            .push("design_snr_db", ch.design_snr_db())
            .push("actual_snr_db", linear_to_db(actual_snr))
            .push("n_design", ch.n_design())
            .push("n_actual", ch.n_actual())
            .push("gamma", alloc.gamma())
            .push("pa", alloc.pa())
            .push("decodable", decodable)
            .distortion("d_design", d_design)
            .distortion("d_digital", d_digital)
            .distortion("d_hda", d_hda);
        if independent {
            let (mi_t, mi_u) = if decodable {
                (
                    Some(mi_refinement_digital(&model, &ch, &alloc, d_design)?),
                    Some(mi_refinement_hda(&model, &ch, &alloc)?),
                )
            } else {
                (None, None)
            };
            r.push("mi_digital_bits", mi_t).push("mi_hda_bits", mi_u);
        }
        Ok(r)
    })
}

fn region(args: &RegionArgs) -> Result<Vec<Record>> {
    let cfg = args.cognitive.config(args.rho)?;
    let grid = args.cognitive.grid();
    let outer = outer_region(&cfg, &grid)?;
    let inner = inner_region(&cfg, &grid)?;
    let mut records = Vec::new();
    for frontier in [&inner, &outer] {
        let kind = match frontier.kind {
            FrontierKind::Inner => "inner",
            FrontierKind::Outer => "outer",
        };
        for p in &frontier.points {
            let mut r = Record::default();
            r.push("regime", classify_regime(&cfg).name())
                .push("h1", cfg.h1())
                .push("h2", cfg.h2())
                .push("p1", cfg.p1())
                .push("p2", cfg.p2())
                .push("rho", cfg.rho())
                .push("kind", kind)
                .distortion("d1", p.d1)
                .distortion("d2", p.d2)
                .push("gamma", p.gamma)
                .push("pa", p.pa)
                .push("rho_x", p.rho_x);
            records.push(r);
        }
    }
    Ok(records)
}

fn coexist(args: &CoexistArgs) -> Result<Vec<Record>> {
    let sweep = resolve_sweep(&args.sweep, None, &[AxisKind::Rho])?;
    let grid = args.cognitive.grid();
    sweep_records(&sweep.values, |_, rho| {
        let cfg = args.cognitive.config(rho)?;
        let co = coexistence(&cfg, &grid)?;
        let mut r = Record::default();
        r.push("regime", classify_regime(&cfg).name())
            .push("h1", cfg.h1())
            .push("h2", cfg.h2())
            .push("p1", cfg.p1())
            .push("p2", cfg.p2())
            .push("rho", rho)
            .distortion("threshold", co.threshold)
            .distortion("outer", co.outer)
            .distortion("achievable", co.achievable)
            .push("gamma", co.allocation.gamma)
            .push("pa", co.allocation.pa)
            .push("d1", co.allocation.d1);
        Ok(r)
    })
}

fn push_check(r: &mut Record, name: &str, analytic: f64, e: &Estimate, k: f64) -> bool {
    let z = e.z_score(analytic);
    r.push(name, analytic)
        .push(format!("{name}_mc"), e.mean)
        .push(format!("{name}_se"), e.std_error)
        .push(format!("{name}_z"), z);
    z <= k
}

fn verify(args: &VerifyArgs) -> Result<Vec<Record>> {
    let sweep = resolve_sweep(
        &args.sweep,
        None,
        &[AxisKind::Rho, AxisKind::Snr, AxisKind::Pa],
    )?;
    reject_fixed_rho(&args.source, &sweep)?;
    let base = McConfig::new(args.seed, args.samples)?.with_confidence(args.k)?;
    // Points run one after another; each simulation is already sharded.
    sweep
        .values
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let (model, ch) = point_setup(&args.source, &args.channel, sweep.kind, x)?;
            let pa = if sweep.kind == AxisKind::Pa {
                x
            } else {
                args.pa
            };
            let alloc = Allocation::for_channel(args.gamma, pa, &ch)?;
            let mc = base.with_seed(args.seed.wrapping_add(i as u64));
            let mut r = Record::default();
            echo_point(&mut r, &model, &ch);
            r.push("gamma", alloc.gamma())
                .push("pa", alloc.pa())
                .push("seed", mc.seed as f64)
                .push("samples", mc.samples as f64);
            let d_star = analog_params(&model, &ch, &alloc)?.d_star;
            let mut ok = push_check(
                &mut r,
                "d_star",
                d_star,
                &simulate_linear_mmse(&model, &ch, &alloc, &mc)?,
                args.k,
            );
            for scheme in [Scheme::DigitalDpc, Scheme::Hda] {
                let analytic = scheme_distortion(&model, &ch, &alloc, scheme)?;
                let e = simulate_scheme_idealized(&model, &ch, &alloc, scheme, &mc)?;
                ok &= push_check(
                    &mut r,
                    &format!("d_{}", column_name(scheme)),
                    analytic,
                    &e,
                    args.k,
                );
            }
            r.push("agree", ok);
            Ok(r)
        })
        .collect()
}

/// Computes the records of a parsed request.
pub fn execute(cli: &Cli) -> Result<Table> {
    let records = match &cli.command {
        Command::Bounds(a) => bounds(a)?,
        Command::Schemes(a) => schemes(a)?,
        Command::Mismatch(a) => mismatch(a)?,
        Command::Region(a) => region(a)?,
        Command::Coexist(a) => coexist(a)?,
        Command::Verify(a) => verify(a)?,
    };
    for r in &records {
        if let Some((name, _)) =
            r.0.iter()
                .find(|(_, c)| matches!(c, Cell::Num(x) if x.is_nan()))
        {
            return Err(Error::Precondition(format!(
                "column {name} evaluated to NaN"
            )));
        }
    }
    let request = json!({
        "command": cli.command.name(),
        "format": cli.format,
        "args": serde_json::to_value(&cli.command).expect("request serializes"),
    });
    Ok(Table { request, records })
}

/// Failure of a command-line invocation.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Run(Error),
    Io(String),
}

impl CliError {
    /// `error: <kind>: <message>` on one line.
    pub fn line(&self) -> String {
        let (kind, msg) = match self {
            CliError::Usage(m) => ("usage", m.clone()),
            CliError::Run(e) => (e.kind(), e.to_string()),
            CliError::Io(m) => ("io", m.clone()),
        };
        format!("error: {kind}: {}", msg.replace(['\n', '\r'], " "))
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            _ => 1,
        }
    }
}

fn parse<I, T>(args: I) -> std::result::Result<Cli, clap::Error>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    Cli::try_parse_from(args)
}

fn usage(e: &clap::Error) -> CliError {
    let text = e.to_string();
    let first = text.lines().next().unwrap_or("invalid arguments");
    CliError::Usage(first.trim_start_matches("error: ").to_string())
}

/// Parses and executes, returning the rendered output without writing it.
pub fn render<I, T>(args: I) -> std::result::Result<String, CliError>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = parse(args).map_err(|e| usage(&e))?;
    let table = execute(&cli).map_err(CliError::Run)?;
    Ok(table.render(cli.format))
}

/// Entry point of the binary; returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match parse(args) {
        Ok(cli) => cli,
        Err(e)
            if matches!(
                e.kind(),
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion
            ) =>
        {
            print!("{e}");
            return 0;
        }
        Err(e) => {
            let err = usage(&e);
            eprintln!("{}", err.line());
            return err.exit_code();
        }
    };
    match execute(&cli)
        .map_err(CliError::Run)
        .and_then(|t| write_output(&cli, &t))
    {
        Ok(()) => 0,
        Err(err) => {
            eprintln!("{}", err.line());
            err.exit_code()
        }
    }
}

fn write_output(cli: &Cli, table: &Table) -> std::result::Result<(), CliError> {
    let text = table.render(cli.format);
    let path = cli.out.clone().or_else(|| {
        std::env::var_os(OUT_DIR_ENV).map(|dir| {
            PathBuf::from(dir).join(format!("{}.{}", cli.command.name(), cli.format.extension()))
        })
    });
    match path {
        Some(path) => {
            if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
                std::fs::create_dir_all(parent)
                    .map_err(|e| CliError::Io(format!("{}: {e}", parent.display())))?;
            }
            std::fs::write(&path, text)
                .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
        }
        None => {
            print!("{text}");
            Ok(())
        }
    }
}
