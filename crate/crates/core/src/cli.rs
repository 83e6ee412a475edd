//! Command-line front end.
//!
//! ```text
//! hpsim solve-params --n 3
//! hpsim simulate --scenario three_qubit --alpha 5 --eta-sq 0.6667 --trials 100000
//! hpsim sweep --scenario two_qubit --nbar 0:10:0.25 --gamma 0,0.2,0.5 --eta-sq 0.6667
//! hpsim density --scenario two_qubit --alpha 3 --out density.csv
//! ```
//!
//! Exit codes: 0 on success, 2 for usage errors, 3 for numerical failures.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::cavity::{principal_arg, solve_params_for_phase, CavityParams, ReflectionPair};
use crate::error::{Error, Result};
use crate::homodyne::{
    integration_window, Coherence, DecisionRule, PhaseConvention, ProjectionModel, Quadrature,
    Scenario,
};
use crate::hybrid_state::MAX_QUBITS;
use crate::metrics::{
    closed_form_two_qubit, evaluate_classes, monte_carlo_estimate, parse_range, prepare, sweep,
    write_density_csv, write_sweep_csv, ClassResult, DensityRow, SweepConfig,
};

pub const MODEL_VERSION: &str = concat!("hpsim ", env!("CARGO_PKG_VERSION"), " model 1");

/// Attached to every report that involves spontaneous emission.
pub const GAMMA_MODEL_NOTE: &str = "gamma/kappa enters through the full atom-cavity reflection \
coefficient at the lossless phase settings; reflection losses |r| < 1 feed one environment mode \
per gate and decohere the atomic branches. Curves for gamma > 0 are a model choice and are only \
qualitatively comparable with published figures.";

#[derive(Debug, Parser)]
#[command(
    name = "hpsim",
    version,
    about = "Hybrid parity gate entanglement simulator"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Cavity detunings and coupling that give phases (pi/n, -pi/n).
    SolveParams {
        /// Qubit count.
        #[arg(long)]
        n: usize,
        /// Spontaneous emission rate in units of kappa used for the phase check.
        #[arg(long, default_value_t = 0.0)]
        gamma: f64,
        /// Print JSON instead of a table.
        #[arg(long)]
        json: bool,
    },
    /// Success probabilities and fidelities at one parameter point, as JSON.
    Simulate {
        #[command(flatten)]
        point: PointArgs,
        #[command(flatten)]
        model: ModelArgs,
        /// Monte Carlo trials; 0 reports quadrature results only.
        #[arg(long, default_value_t = 0)]
        trials: u64,
        #[arg(long, env = "HPSIM_DEFAULT_SEED", default_value_t = 0)]
        seed: u64,
        /// Write the report here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Results over a grid of mean photon numbers and emission rates, as CSV.
    Sweep {
        /// two_qubit, three_qubit, gsum or n_qubit.
        #[arg(long)]
        scenario: String,
        /// Qubit count for gsum and n_qubit.
        #[arg(long)]
        n: Option<usize>,
        /// Mean photon numbers as start:stop:step.
        #[arg(long)]
        nbar: String,
        /// Channel energy transmission eta^2.
        #[arg(long, default_value_t = 1.0)]
        eta_sq: f64,
        /// Comma-separated gamma/kappa values.
        #[arg(long, value_delimiter = ',', default_value = "0")]
        gamma: Vec<f64>,
        #[command(flatten)]
        model: ModelArgs,
        /// Monte Carlo trials per grid point; 0 skips sampling.
        #[arg(long, default_value_t = 0)]
        trials: u64,
        #[arg(long, env = "HPSIM_DEFAULT_SEED", default_value_t = 0)]
        seed: u64,
        /// Worker threads; 0 uses every core.
        #[arg(long, default_value_t = 0)]
        jobs: usize,
        /// Write the CSV here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Homodyne outcome density and per-class components, as CSV.
    Density {
        #[command(flatten)]
        point: PointArgs,
        /// Quadrature to plot; defaults to the one the scenario measures.
        #[arg(long)]
        quadrature: Option<String>,
        /// Grid points across the plotted range.
        #[arg(long, default_value_t = 401)]
        points: usize,
        /// Write the CSV here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Args)]
struct PointArgs {
    /// two_qubit, three_qubit, gsum or n_qubit.
    #[arg(long)]
    scenario: String,
    /// Qubit count for gsum and n_qubit.
    #[arg(long)]
    n: Option<usize>,
    /// Input coherent amplitude.
    #[arg(long, conflicts_with = "nbar", required_unless_present = "nbar")]
    alpha: Option<f64>,
    /// Input mean photon number alpha^2.
    #[arg(long)]
    nbar: Option<f64>,
    /// Channel energy transmission eta^2.
    #[arg(long, default_value_t = 1.0)]
    eta_sq: f64,
    /// Spontaneous emission rate in units of kappa.
    #[arg(long, default_value_t = 0.0)]
    gamma: f64,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum PhaseArg {
    Exact,
    Literal,
    Suppressed,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum CoherenceArg {
    Traced,
    Ignored,
}

#[derive(Debug, Args)]
struct ModelArgs {
    /// How the outcome-dependent phase of G' targets is computed.
    #[arg(long, value_enum, default_value = "exact")]
    phase: PhaseArg,
    /// Whether environment modes decohere the atomic branches.
    #[arg(long, value_enum, default_value = "traced")]
    coherence: CoherenceArg,
}

impl ModelArgs {
    fn model(&self) -> ProjectionModel {
        ProjectionModel {
            phase: match self.phase {
                PhaseArg::Exact => PhaseConvention::Exact,
                PhaseArg::Literal => PhaseConvention::Literal,
                PhaseArg::Suppressed => PhaseConvention::Suppressed,
            },
            coherence: match self.coherence {
                CoherenceArg::Traced => Coherence::Traced,
                CoherenceArg::Ignored => Coherence::Ignored,
            },
        }
    }
}

fn resolve_scenario(name: &str, n: Option<usize>) -> Result<Scenario> {
    let scenario = Scenario::parse(name, n.unwrap_or(3))?;
    if let Some(n) = n {
        if n != scenario.n() {
            return Err(Error::InvalidParameter(format!(
                "scenario {name} has {} qubits, got --n {n}",
                scenario.n()
            )));
        }
        if n > MAX_QUBITS {
            return Err(Error::InvalidParameter(format!(
                "n must be at most {MAX_QUBITS}"
            )));
        }
    }
    Ok(scenario)
}

impl PointArgs {
    fn resolve(&self) -> Result<(Scenario, f64)> {
        let scenario = resolve_scenario(&self.scenario, self.n)?;
        let alpha = match (self.alpha, self.nbar) {
            (Some(a), _) => a,
            (None, Some(nb)) if nb >= 0.0 => nb.sqrt(),
            (None, Some(nb)) => {
                return Err(Error::InvalidParameter(format!(
                    "mean photon number must be nonnegative, got {nb}"
                )))
            }
            (None, None) => {
                return Err(Error::InvalidParameter(
                    "--alpha or --nbar is required".into(),
                ))
            }
        };
        Ok((scenario, alpha))
    }
}

#[derive(Serialize)]
struct ComplexJson {
    re: f64,
    im: f64,
}

#[derive(Serialize)]
struct CavityJson {
    delta1: f64,
    delta2: f64,
    g: f64,
    kappa: f64,
    gamma: f64,
    r0: ComplexJson,
    r1: ComplexJson,
    phi0: f64,
    phi1: f64,
}

impl CavityJson {
    fn new(params: &CavityParams, pair: &ReflectionPair) -> Self {
        CavityJson {
            delta1: params.delta1,
            delta2: params.delta2,
            g: params.g,
            kappa: params.kappa,
            gamma: params.gamma,
            r0: ComplexJson {
                re: pair.r0.re,
                im: pair.r0.im,
            },
            r1: ComplexJson {
                re: pair.r1.re,
                im: pair.r1.im,
            },
            phi0: pair.phi0,
            phi1: pair.phi1,
        }
    }
}

#[derive(Serialize)]
struct ClassJson {
    parity: String,
    target: String,
    weights: Vec<usize>,
    /// `null` stands for minus infinity.
    lower: Option<f64>,
    /// `null` stands for plus infinity.
    upper: Option<f64>,
    mean: f64,
    needs_second_gate: bool,
}

#[derive(Serialize)]
struct RuleJson {
    quadrature: String,
    thresholds: Vec<f64>,
    classes: Vec<ClassJson>,
}

impl From<&DecisionRule> for RuleJson {
    fn from(rule: &DecisionRule) -> Self {
        let finite = |x: f64| x.is_finite().then_some(x);
        RuleJson {
            quadrature: rule.quadrature.to_string(),
            thresholds: rule.thresholds.clone(),
            classes: rule
                .classes
                .iter()
                .map(|c| ClassJson {
                    parity: c.parity.to_string(),
                    target: c.target_name(),
                    weights: c.weights.clone(),
                    lower: finite(c.lower),
                    upper: finite(c.upper),
                    mean: c.mean,
                    needs_second_gate: c.needs_second_gate,
                })
                .collect(),
        }
    }
}

#[derive(Serialize)]
struct ConfigJson {
    scenario: String,
    n: usize,
    quadrature: String,
    alpha: f64,
    mean_photon_number: f64,
    eta_sq: f64,
    gamma_over_kappa: f64,
    trials: u64,
    seed: u64,
    phase_convention: PhaseConvention,
    coherence: Coherence,
}

#[derive(Serialize)]
struct ClosedFormJson {
    success_prob: f64,
    fidelity: f64,
}

#[derive(Serialize)]
struct Report {
    model_version: &'static str,
    gamma_model: &'static str,
    config: ConfigJson,
    cavity: CavityJson,
    rule: RuleJson,
    results: Vec<ClassResult>,
    #[serde(skip_serializing_if = "Option::is_none")]
    closed_form: Option<ClosedFormJson>,
}

fn emit(out: &Option<PathBuf>, bytes: &[u8], stdout: &mut dyn Write) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, bytes)?,
        None => stdout.write_all(bytes)?,
    }
    Ok(())
}

fn solve_params(n: usize, gamma: f64, json: bool, stdout: &mut dyn Write) -> Result<()> {
    let params = solve_params_for_phase(n)?.with_gamma(gamma)?;
    let pair = ReflectionPair::from_params(&params)?;
    if json {
        let mut text = serde_json::to_string_pretty(&CavityJson::new(&params, &pair))?;
        text.push('\n');
        stdout.write_all(text.as_bytes())?;
        return Ok(());
    }
    let target = 180.0 / n as f64;
    writeln!(stdout, "n       = {n}")?;
    writeln!(stdout, "delta1  = {:.9} kappa", params.delta1)?;
    writeln!(stdout, "delta2  = {:.9} kappa", params.delta2)?;
    writeln!(stdout, "g       = {:.9} kappa", params.g)?;
    writeln!(stdout, "g^2     = {:.9} kappa^2", params.g * params.g)?;
    writeln!(stdout, "gamma   = {} kappa", params.gamma)?;
    writeln!(
        stdout,
        "phi0    = {:+.6} deg (target {:+.6})",
        principal_arg(pair.r0).to_degrees(),
        target
    )?;
    writeln!(
        stdout,
        "phi1    = {:+.6} deg (target {:+.6})",
        principal_arg(pair.r1).to_degrees(),
        -target
    )?;
    writeln!(stdout, "|r0|    = {:.9}", pair.r0.norm())?;
    writeln!(stdout, "|r1|    = {:.9}", pair.r1.norm())?;
    Ok(())
}

fn simulate(
    point: &PointArgs,
    model: ProjectionModel,
    trials: u64,
    seed: u64,
    out: &Option<PathBuf>,
    stdout: &mut dyn Write,
) -> Result<()> {
    let (scenario, alpha) = point.resolve()?;
    let p = prepare(scenario, alpha, point.eta_sq, point.gamma)?;
    let mut results = evaluate_classes(&p.state, &p.rule, model)?;
    if trials > 0 {
        results.extend(monte_carlo_estimate(
            &p.state, &p.rule, trials, seed, model,
        )?);
    }
    let closed_form = (scenario == Scenario::TwoQubitX && p.pair.is_lossless())
        .then(|| closed_form_two_qubit(alpha, point.eta_sq.sqrt()))
        .transpose()?
        .map(|(success_prob, fidelity)| ClosedFormJson {
            success_prob,
            fidelity,
        });
    let report = Report {
        model_version: MODEL_VERSION,
        gamma_model: GAMMA_MODEL_NOTE,
        config: ConfigJson {
            scenario: scenario.name().to_string(),
            n: scenario.n(),
            quadrature: scenario.quadrature().to_string(),
            alpha,
            mean_photon_number: alpha * alpha,
            eta_sq: point.eta_sq,
            gamma_over_kappa: point.gamma,
            trials,
            seed,
            phase_convention: model.phase,
            coherence: model.coherence,
        },
        cavity: CavityJson::new(&p.params, &p.pair),
        rule: RuleJson::from(&p.rule),
        results,
        closed_form,
    };
    let mut text = serde_json::to_string_pretty(&report)?;
    text.push('\n');
    emit(out, text.as_bytes(), stdout)
}

fn density(
    point: &PointArgs,
    quadrature: &Option<String>,
    points: usize,
    out: &Option<PathBuf>,
    stdout: &mut dyn Write,
) -> Result<()> {
    let (scenario, alpha) = point.resolve()?;
    let mut p = prepare(scenario, alpha, point.eta_sq, point.gamma)?;
    if let Some(q) = quadrature {
        p.rule.quadrature = q.parse::<Quadrature>()?;
    }
    let (lo, hi) = integration_window(&p.state, p.rule.quadrature);
    let rows = DensityRow::curve(&p.state, &p.rule, lo, hi, points)?;
    let mut buf = Vec::new();
    write_density_csv(&mut buf, &p.rule, &rows)?;
    emit(out, &buf, stdout)
}

fn dispatch(cli: Cli, stdout: &mut dyn Write) -> Result<()> {
    match cli.command {
        Command::SolveParams { n, gamma, json } => solve_params(n, gamma, json, stdout),
        Command::Simulate {
            point,
            model,
            trials,
            seed,
            out,
        } => simulate(&point, model.model(), trials, seed, &out, stdout),
        Command::Sweep {
            scenario,
            n,
            nbar,
            eta_sq,
            gamma,
            model,
            trials,
            seed,
            jobs,
            out,
        } => {
            let scenario = resolve_scenario(&scenario, n)?;
            let cfg = SweepConfig {
                scenario,
                nbar: parse_range(&nbar)?,
                gammas: gamma,
                eta_sq,
                trials,
                seed,
                model: model.model(),
            };
            let points = sweep(&cfg, jobs)?;
            let mut buf = Vec::new();
            write_sweep_csv(&mut buf, scenario, &points)?;
            emit(&out, &buf, stdout)
        }
        Command::Density {
            point,
            quadrature,
            points,
            out,
        } => density(&point, &quadrature, points, &out, stdout),
    }
}

/// Parses `args` (program name first), runs the command and returns the
/// process exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let rendered = e.render().to_string();
            return if e.use_stderr() {
                let _ = stderr.write_all(rendered.as_bytes());
                2
            } else {
                let _ = stdout.write_all(rendered.as_bytes());
                0
            };
        }
    };
    match dispatch(cli, stdout) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn call(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let mut full = vec!["hpsim"];
        full.extend_from_slice(args);
        let code = run(full, &mut out, &mut err);
        (
            code,
            String::from_utf8(out).unwrap(),
            String::from_utf8(err).unwrap(),
        )
    }

    #[test]
    fn solve_params_n2() {
        let (code, out, _) = call(&["solve-params", "--n", "2"]);
        assert_eq!(code, 0);
        assert!(out.contains("delta1  = 0.500000000 kappa"), "{out}");
        assert!(out.contains("g       = 0.707106781 kappa"));
        assert!(out.contains("phi0    = +90.000000 deg"));
        assert!(out.contains("phi1    = -90.000000 deg"));
    }

    #[test]
    fn solve_params_rejects_one_qubit() {
        let (code, _, err) = call(&["solve-params", "--n", "1"]);
        assert_eq!(code, 2);
        assert!(err.contains("error"));
    }

    #[test]
    fn usage_errors_exit_2() {
        assert_eq!(call(&["simulate", "--scenario", "two_qubit"]).0, 2);
        assert_eq!(
            call(&["simulate", "--scenario", "nope", "--alpha", "1"]).0,
            2
        );
        assert_eq!(
            call(&[
                "simulate",
                "--scenario",
                "two_qubit",
                "--alpha",
                "1",
                "--eta-sq",
                "2"
            ])
            .0,
            2
        );
        assert_eq!(
            call(&["sweep", "--scenario", "two_qubit", "--nbar", "3:1:1"]).0,
            2
        );
        assert_eq!(call(&["bogus"]).0, 2);
    }

    #[test]
    fn degenerate_rule_exits_3() {
        let (code, _, err) = call(&[
            "simulate",
            "--scenario",
            "n_qubit",
            "--n",
            "6",
            "--alpha",
            "2",
        ]);
        assert_eq!(code, 3, "{err}");
    }

    #[test]
    fn help_goes_to_stdout() {
        let (code, out, _) = call(&["--help"]);
        assert_eq!(code, 0);
        assert!(out.contains("simulate"));
    }
}
