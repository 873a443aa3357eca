use std::path::PathBuf;

use chrono::NaiveDate;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use tensornet_core::centrality::{Orientation, Scope};

fn parse_scope(s: &str) -> Result<Scope, tensornet_core::Error> {
    s.parse()
}

fn parse_period(s: &str) -> Result<NaiveDate, chrono::ParseError> {
    NaiveDate::parse_from_str(s.trim(), "%Y-%m-%d")
}

fn parse_orientation(s: &str) -> Result<Orientation, tensornet_core::Error> {
    s.parse()
}

#[derive(Debug, Parser)]
#[command(name = "tensornet", version, about = "Multilayer interbank exposure network analytics")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build network bundles from exposure and capital CSV files.
    Build(BuildArgs),
    /// Compute centrality measures on a bundle.
    Centrality(CentralityArgs),
    /// Calibrate the capital surcharge that restores stability.
    Surcharge(SurchargeArgs),
    /// Integrate diffusion on the supra-Laplacian.
    Diffusion(DiffusionArgs),
    /// Centrality ranking stability across aggregation windows.
    Timescale(TimescaleArgs),
    /// Factor PCA and per-layer regressions.
    Factors(FactorsArgs),
    /// Generate synthetic networks.
    Generate(GenerateArgs),
    /// Export a bundle as JSON, GraphML, DOT or CSV.
    Export(ExportArgs),
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct OutputArgs {
    /// Overwrite existing outputs.
    #[arg(long)]
    pub force: bool,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct BuildArgs {
    #[arg(long)]
    pub exposures: PathBuf,
    #[arg(long)]
    pub capitals: Option<PathBuf>,
    /// Period to build (YYYY-MM-DD); required with --out when the file holds several.
    #[arg(long, value_parser = parse_period, conflicts_with = "out_dir")]
    pub period: Option<NaiveDate>,
    /// Multiplex coupling weight between a bank's layer replicas.
    #[arg(long, default_value_t = 0.0)]
    pub omega: f64,
    /// Additional layer names beyond the canonical ten.
    #[arg(long, value_delimiter = ',')]
    pub extra_layers: Vec<String>,
    /// Sign rule overrides as LAYER=nonnegative|long|short|absolute.
    #[arg(long = "sign-rule", value_delimiter = ',')]
    pub sign_rules: Vec<String>,
    /// Bundle file for a single period.
    #[arg(long, conflicts_with = "out_dir", required_unless_present = "out_dir")]
    pub out: Option<PathBuf>,
    /// Directory receiving one `<period>.json` per period, on a shared bank registry.
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
    #[command(flatten)]
    #[serde(skip)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Model {
    Er,
    Cp,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct GenerateArgs {
    #[arg(long, value_enum, default_value_t = Model::Er)]
    pub model: Model,
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = 1)]
    pub l: usize,
    /// Edge probability (er).
    #[arg(long, default_value_t = 0.1)]
    pub p: f64,
    /// Core banks (cp); defaults to a fifth of the banks, at least one.
    #[arg(long)]
    pub core_size: Option<usize>,
    #[arg(long, default_value_t = 0.8)]
    pub p_core: f64,
    #[arg(long, default_value_t = 0.2)]
    pub p_cross: f64,
    #[arg(long, default_value_t = 0.02)]
    pub p_periph: f64,
    #[arg(long, default_value_t = 0.0)]
    pub mu: f64,
    #[arg(long, default_value_t = 1.0)]
    pub sigma: f64,
    #[arg(long, default_value_t = 0.0)]
    pub omega: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value = "2013-06-30", value_parser = parse_period)]
    pub period: NaiveDate,
    /// Number of quarterly snapshots.
    #[arg(long, default_value_t = 1)]
    pub snapshots: usize,
    /// Bundle JSON (one snapshot) or directory of `<period>.json` (several).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Long-form exposures CSV covering every snapshot.
    #[arg(long)]
    pub exposures_out: Option<PathBuf>,
    #[arg(long)]
    pub capitals_out: Option<PathBuf>,
    #[command(flatten)]
    #[serde(skip)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SpectralArgs {
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
    #[arg(long, default_value_t = 10_000)]
    pub max_iter: usize,
    /// Uniform teleport weight for eigencentrality.
    #[arg(long)]
    pub teleport: Option<f64>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct CentralityArgs {
    #[arg(long)]
    pub network: PathBuf,
    /// Measure names, comma separated.
    #[arg(long, value_delimiter = ',', required = true)]
    pub measure: Vec<String>,
    /// projected, multilayer or layer:<k>.
    #[arg(long, default_value = "projected", value_parser = parse_scope)]
    pub scope: Scope,
    /// out, in or total.
    #[arg(long, default_value = "out", value_parser = parse_orientation)]
    pub orientation: Orientation,
    /// Katz attenuation.
    #[arg(long, default_value_t = 0.1)]
    pub a: f64,
    #[arg(long, default_value_t = 0.85)]
    pub damping: f64,
    #[command(flatten)]
    pub spectral: SpectralArgs,
    /// Divide exposures by the holder's capital first.
    #[arg(long)]
    pub capital_relative: bool,
    /// Add a Borda composite of the requested measures.
    #[arg(long)]
    pub composite: bool,
    /// `.json` report or `.csv` table.
    #[arg(long)]
    pub out: PathBuf,
    /// Per-layer scores of multilayer spectral measures (CSV).
    #[arg(long)]
    pub layer_scores_out: Option<PathBuf>,
    #[command(flatten)]
    #[serde(skip)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum VectorKind {
    Eigencentrality,
    Katz,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SurchargeArgs {
    #[arg(long)]
    pub network: PathBuf,
    /// Capitals CSV replacing any capitals stored in the bundle.
    #[arg(long)]
    pub capitals: Option<PathBuf>,
    #[arg(long, default_value_t = 1.0)]
    pub threshold: f64,
    #[arg(long, value_enum, default_value_t = VectorKind::Eigencentrality)]
    pub vector: VectorKind,
    /// Katz attenuation when --vector katz.
    #[arg(long, default_value_t = 0.1)]
    pub a: f64,
    #[arg(long, default_value = "projected", value_parser = parse_scope)]
    pub scope: Scope,
    #[arg(long, default_value_t = 1e-8)]
    pub tol_lambda: f64,
    #[arg(long, default_value_t = 1e-6)]
    pub tol_c: f64,
    /// First upper bracket for the budget; defaults to total capital.
    #[arg(long)]
    pub c_max: Option<f64>,
    /// Recompute the targeting vector on surcharged capitals until it settles.
    #[arg(long)]
    pub recompute: bool,
    #[command(flatten)]
    pub spectral: SpectralArgs,
    #[arg(long)]
    pub out: PathBuf,
    #[command(flatten)]
    #[serde(skip)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct DiffusionArgs {
    #[arg(long)]
    pub network: PathBuf,
    /// Interlayer coupling strength.
    #[arg(long, default_value_t = 1.0)]
    pub dx: f64,
    #[arg(long, default_value_t = 10.0)]
    pub t_end: f64,
    /// Step size; defaults to the stability bound 0.5 / max diagonal.
    #[arg(long)]
    pub dt: Option<f64>,
    #[arg(long, default_value_t = 1)]
    pub sample_every: usize,
    /// `strength` (replica strength), `uniform`, `bank:<id>` (unit mass on
    /// each replica of one bank) or a CSV of `node,value` rows with
    /// `bank@layer` nodes.
    #[arg(long, default_value = "strength")]
    pub initial: String,
    /// Trajectory as `.csv`, or `.json` report with the spectral summary.
    #[arg(long)]
    pub out: PathBuf,
    #[command(flatten)]
    #[serde(skip)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct TimescaleArgs {
    /// Snapshot bundles (any order; sorted by period).
    #[arg(long, num_args = 1.., conflicts_with = "exposures")]
    pub networks: Vec<PathBuf>,
    /// Multi-period exposures CSV, built on a shared bank registry.
    #[arg(long)]
    pub exposures: Option<PathBuf>,
    #[arg(long, default_value_t = 0.0)]
    pub omega: f64,
    #[arg(long, value_delimiter = ',', default_value = "strength")]
    pub measure: Vec<String>,
    #[arg(long, value_delimiter = ',', default_value = "1")]
    pub windows: Vec<usize>,
    #[arg(long, default_value_t = 5)]
    pub k: usize,
    #[arg(long, default_value = "projected", value_parser = parse_scope)]
    pub scope: Scope,
    #[arg(long, default_value = "out", value_parser = parse_orientation)]
    pub orientation: Orientation,
    #[arg(long, default_value_t = 0.1)]
    pub a: f64,
    #[arg(long, default_value_t = 0.85)]
    pub damping: f64,
    #[command(flatten)]
    pub spectral: SpectralArgs,
    #[arg(long)]
    pub out: PathBuf,
    #[command(flatten)]
    #[serde(skip)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct FactorsArgs {
    /// Long-form `period,factor_name,value`.
    #[arg(long)]
    pub factors: PathBuf,
    /// Exposures whose per-layer totals are regressed on the components.
    #[arg(long)]
    pub exposures: Option<PathBuf>,
    #[arg(long, default_value_t = 0.9)]
    pub variance: f64,
    /// Fixed number of components, overriding --variance.
    #[arg(long)]
    pub components: Option<usize>,
    /// JSON report.
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub loadings_out: Option<PathBuf>,
    #[command(flatten)]
    #[serde(skip)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ExportArgs {
    #[arg(long)]
    pub network: PathBuf,
    /// json, graphml, dot or csv.
    #[arg(long)]
    pub format: String,
    #[arg(long)]
    pub out: PathBuf,
    /// With --format csv, also write the capitals CSV here.
    #[arg(long)]
    pub capitals_out: Option<PathBuf>,
    #[command(flatten)]
    #[serde(skip)]
    pub output: OutputArgs,
}
