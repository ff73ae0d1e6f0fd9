use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};

use mixent_core::entropy::{mc_entropy, mixed_entropy, EntropyOptions};
use mixent_core::estimators::{nn_differential_entropy, plugin_discrete_entropy, EstimatorOptions, StandardError};
use mixent_core::goodness::goodness_check;
use mixent_core::processes::{
    ctmc_entropy_rate, finite_horizon_ctmc_entropy, finite_horizon_poisson_entropy, order_statistics_entropy,
    poisson_entropy_rate, simulate_poisson, split_entropy_experiment, splitting_identity, CtmcSpec,
    OrderStatsMethod, SplitExperimentOptions,
};
use mixent_core::rng::{seeded, stream};
use mixent_core::{DensitySpec, Error, MixedPairDistribution, MixedPairMap, VERSION};

const IDENTITY_TOL: f64 = 1e-12;
const Z_LIMIT: f64 = 4.0;
const BOUND_SIGMAS: f64 = 3.0;
const ORDER_STATS_QUAD_TOL: f64 = 1e-4;

#[derive(Parser)]
#[command(name = "mixent", version, about = "Entropy of mixed discrete-continuous variables, bijections and point processes")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    #[arg(long, global = true, value_enum, default_value_t = Format::Human)]
    format: Format,

    /// Seed for every stochastic computation.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Absolute quadrature tolerance per atom term.
    #[arg(long, global = true)]
    tol: Option<f64>,

    #[arg(long, global = true, default_value_t = 1.0)]
    epsilon: f64,

    #[arg(long, global = true, default_value_t = 1.0)]
    delta: f64,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Human,
    Csv,
    Structured,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Method {
    Quadrature,
    MonteCarlo,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Estimator {
    NearestNeighbor,
    PlugIn,
}

#[derive(Subcommand)]
enum Command {
    /// Mixed entropy of a distribution file.
    Entropy {
        #[arg(long, visible_alias = "dist")]
        spec: PathBuf,
        /// Evaluate even when the goodness conditions do not verify.
        #[arg(long)]
        allow_uncertified: bool,
        #[arg(long, value_enum, default_value_t = Method::Quadrature)]
        method: Method,
        /// Monte Carlo sample count.
        #[arg(long, default_value_t = 200_000)]
        samples: usize,
    },
    /// Goodness certificate and magnitude bound.
    Check {
        #[arg(long, visible_alias = "dist")]
        spec: PathBuf,
    },
    /// Pushes a distribution through a map and checks entropy preservation.
    Transform {
        #[arg(long, visible_alias = "spec")]
        dist: PathBuf,
        #[arg(long)]
        map: PathBuf,
    },
    /// Entropy rate of a Poisson-clocked Markov chain.
    CtmcRate {
        #[arg(long)]
        chain: PathBuf,
    },
    /// Exact path entropy over `[0, T]`.
    Horizon {
        #[arg(long, conflicts_with = "lambda", required_unless_present = "lambda")]
        chain: Option<PathBuf>,
        #[arg(long)]
        lambda: Option<f64>,
        #[arg(long = "T")]
        horizon: f64,
    },
    /// Line-by-line check of the Poisson splitting identity.
    SplitIdentity {
        #[arg(long)]
        lambda: f64,
        #[arg(long)]
        p: f64,
    },
    /// Simulated thinning with nearest-neighbour rate estimates.
    SplitExperiment {
        #[arg(long)]
        lambda: f64,
        #[arg(long)]
        p: f64,
        #[arg(long = "T")]
        horizon: f64,
        #[arg(long, default_value_t = 1)]
        trials: usize,
        #[arg(long, default_value_t = 3)]
        k: usize,
        #[arg(long, default_value_t = 200)]
        bootstrap: usize,
        /// Writes the first trial's parent path as CSV.
        #[arg(long)]
        export: Option<PathBuf>,
    },
    /// Entropy of sorted against unsorted i.i.d. samples.
    OrderStats {
        #[arg(long)]
        n: usize,
        /// Single-atom distribution file giving the base density; uniform[0, 1] if absent.
        #[arg(long)]
        spec: Option<PathBuf>,
        /// Forces Monte Carlo with this many samples.
        #[arg(long)]
        samples: Option<usize>,
    },
    /// Entropy estimate from a sample file with one value per line.
    Estimate {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_enum, default_value_t = Estimator::NearestNeighbor)]
        method: Estimator,
        #[arg(long, default_value_t = 3)]
        k: usize,
        #[arg(long, default_value_t = 200)]
        bootstrap: usize,
        /// Asymptotic standard error instead of the bootstrap.
        #[arg(long)]
        asymptotic: bool,
    },
}

struct Report {
    command: &'static str,
    inputs: Map<String, Value>,
    results: Value,
    diagnostics: Vec<String>,
    claim_holds: bool,
}

impl Report {
    fn new(command: &'static str) -> Self {
        let mut inputs = Map::new();
        inputs.insert("version".into(), json!(VERSION));
        Report {
            command,
            inputs,
            results: Value::Null,
            diagnostics: Vec::new(),
            claim_holds: true,
        }
    }

    fn input(&mut self, key: &str, v: impl Into<Value>) {
        self.inputs.insert(key.into(), v.into());
    }

    fn fail(&mut self, why: impl Into<String>) {
        self.claim_holds = false;
        self.diagnostics.push(why.into());
    }
}

/// Raised for anything that prevents the computation from running.
struct InputError(String);

impl From<Error> for InputError {
    fn from(e: Error) -> Self {
        InputError(e.to_string())
    }
}

type Run = std::result::Result<Report, InputError>;

fn with_path<T>(path: &Path, r: mixent_core::Result<T>) -> std::result::Result<T, InputError> {
    r.map_err(|e| InputError(format!("{}: {e}", path.display())))
}

fn to_value<T: serde::Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("report serializes")
}

fn require_seed(seed: Option<u64>, what: &str) -> std::result::Result<u64, InputError> {
    seed.ok_or_else(|| InputError(format!("{what} is stochastic; pass --seed")))
}

fn entropy_options(cli: &Cli) -> EntropyOptions {
    EntropyOptions {
        tol: cli.tol.unwrap_or(EntropyOptions::default().tol),
        epsilon: cli.epsilon,
        delta: cli.delta,
        ..EntropyOptions::default()
    }
}

fn not_certified_note(eps: f64, delta: f64) -> String {
    format!(
        "not certified: the sufficient goodness conditions did not verify at (epsilon, delta) = ({eps}, {delta}); \
         this does not show the entropy is undefined"
    )
}

fn run(cli: &Cli) -> Run {
    match &cli.command {
        Command::Entropy {
            spec,
            allow_uncertified,
            method,
            samples,
        } => {
            let mut r = Report::new("entropy");
            r.input("spec", spec.display().to_string());
            let dist = with_path(spec, MixedPairDistribution::from_path(spec))?;
            let opts = EntropyOptions {
                allow_uncertified: *allow_uncertified,
                ..entropy_options(cli)
            };
            match method {
                Method::MonteCarlo => {
                    let seed = require_seed(cli.seed, "Monte Carlo entropy")?;
                    r.input("seed", seed);
                    r.input("samples", *samples);
                    r.results = to_value(&mc_entropy(&dist, *samples, &mut seeded(seed))?);
                    r.diagnostics.push("Monte Carlo estimate; goodness not checked".into());
                }
                Method::Quadrature => {
                    r.input("epsilon", cli.epsilon);
                    r.input("delta", cli.delta);
                    r.input("tol", opts.tol);
                    match mixed_entropy(&dist, &opts) {
                        Ok(h) => {
                            if !h.certified {
                                r.diagnostics.push(not_certified_note(cli.epsilon, cli.delta));
                            }
                            r.results = to_value(&h);
                        }
                        Err(Error::NotCertified(why)) => {
                            r.results = json!({ "certified": false, "reason": why });
                            r.fail(not_certified_note(cli.epsilon, cli.delta));
                        }
                        Err(e) => return Err(e.into()),
                    }
                }
            }
            Ok(r)
        }
        Command::Check { spec } => {
            let mut r = Report::new("check");
            r.input("spec", spec.display().to_string());
            r.input("epsilon", cli.epsilon);
            r.input("delta", cli.delta);
            let dist = with_path(spec, MixedPairDistribution::from_path(spec))?;
            let g = goodness_check(&dist, cli.epsilon, cli.delta)?;
            if !g.passed {
                r.fail(not_certified_note(cli.epsilon, cli.delta));
            }
            r.results = to_value(&g);
            Ok(r)
        }
        Command::Transform { dist, map } => {
            let mut r = Report::new("transform");
            r.input("dist", dist.display().to_string());
            r.input("map", map.display().to_string());
            let d = with_path(dist, MixedPairDistribution::from_path(dist))?;
            let m = with_path(map, MixedPairMap::from_path(map))?;
            let opts = entropy_options(cli);
            r.input("tol", opts.tol);
            let rep = m.preservation_report(&d, &opts)?;
            if !rep.bijectivity.bijective {
                r.fail(format!(
                    "not a bijection: {}",
                    rep.bijectivity.reason.as_deref().unwrap_or("check failed")
                ));
            } else if !rep.derivative.certified {
                r.fail(format!(
                    "not certified entropy-preserving: |F'| = {} deviates from 1 on the probe grid",
                    rep.derivative.worst_derivative
                ));
            }
            let mut results = to_value(&rep);
            if let Some(diff) = rep.difference {
                let atoms = d.len() + m.pushforward(&d).map(|p| p.len()).unwrap_or(0);
                let allowed = 2.0 * opts.tol * atoms as f64;
                let preserved = diff.abs() <= allowed;
                results["preserved_within_tolerance"] = json!(preserved);
                results["tolerance"] = json!(allowed);
                if rep.certified && !preserved {
                    r.fail(format!("entropy changed by {diff} under a certified map"));
                }
            }
            r.results = results;
            Ok(r)
        }
        Command::CtmcRate { chain } => {
            let mut r = Report::new("ctmc-rate");
            r.input("chain", chain.display().to_string());
            let spec = with_path(chain, CtmcSpec::from_path(chain))?;
            let pi = spec.stationary_distribution()?;
            let back = spec.transitions().left_multiply(&pi);
            let residual = pi.iter().zip(&back).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
            r.results = json!({
                "entropy_rate": ctmc_entropy_rate(&spec)?,
                "poisson_rate": poisson_entropy_rate(spec.lambda())?,
                "transition_entropy": spec.transition_entropy()?,
                "stationary": pi,
                "stationary_residual": residual,
            });
            Ok(r)
        }
        Command::Horizon { chain, lambda, horizon } => {
            let mut r = Report::new("horizon");
            r.input("T", *horizon);
            match (chain, lambda) {
                (Some(path), _) => {
                    r.input("chain", path.display().to_string());
                    let spec = with_path(path, CtmcSpec::from_path(path))?;
                    let h = finite_horizon_ctmc_entropy(&spec, *horizon)?;
                    let rate = ctmc_entropy_rate(&spec)?;
                    let mut v = to_value(&h);
                    v["per_unit_time"] = json!(h.total / horizon);
                    v["entropy_rate"] = json!(rate);
                    v["rate_gap"] = json!(h.total / horizon - rate);
                    r.results = v;
                }
                (None, Some(l)) => {
                    r.input("lambda", *l);
                    let h = finite_horizon_poisson_entropy(*l, *horizon)?;
                    let mut v = to_value(&h);
                    v["per_unit_time"] = json!(h.total / horizon);
                    v["entropy_rate"] = json!(poisson_entropy_rate(*l)?);
                    r.results = v;
                }
                (None, None) => return Err(InputError("pass --chain or --lambda".into())),
            }
            Ok(r)
        }
        Command::SplitIdentity { lambda, p } => {
            let mut r = Report::new("split-identity");
            r.input("lambda", *lambda);
            r.input("p", *p);
            let s = splitting_identity(*lambda, *p)?;
            let allowed = IDENTITY_TOL * lambda.max(1.0);
            if s.max_discrepancy > allowed {
                r.fail(format!("lines disagree by {} > {allowed}", s.max_discrepancy));
            }
            r.results = to_value(&s);
            Ok(r)
        }
        Command::SplitExperiment {
            lambda,
            p,
            horizon,
            trials,
            k,
            bootstrap,
            export,
        } => {
            let mut r = Report::new("split-experiment");
            let seed = require_seed(cli.seed, "split-experiment")?;
            r.input("lambda", *lambda);
            r.input("p", *p);
            r.input("T", *horizon);
            r.input("trials", *trials);
            r.input("seed", seed);
            r.input("k", *k);
            r.input("bootstrap", *bootstrap);
            let opts = SplitExperimentOptions {
                lambda: *lambda,
                p: *p,
                horizon: *horizon,
                trials: *trials,
                seed,
                estimator: EstimatorOptions {
                    k: *k,
                    bootstrap: *bootstrap,
                    seed,
                    ..EstimatorOptions::default()
                },
            };
            let rep = split_entropy_experiment(&opts)?;
            for (name, b) in [("heads", &rep.heads), ("tails", &rep.tails)] {
                let z = b.z_score();
                if z.abs() > Z_LIMIT {
                    r.fail(format!("{name}: estimate {} is {z:.2} standard errors from {}", b.estimate, b.expected));
                }
                if !b.respects_poisson_bound(BOUND_SIGMAS) {
                    r.fail(format!("{name}: estimate exceeds the Poisson bound by more than {BOUND_SIGMAS} standard errors"));
                }
            }
            if !rep.merge_matches_parent {
                r.fail("merged baby processes differ from the parent");
            }
            if let Some(path) = export {
                let parent = simulate_poisson(*lambda, *horizon, &mut stream(seed, 0))?;
                std::fs::write(path, parent.to_csv()).map_err(|e| InputError(format!("{}: {e}", path.display())))?;
                r.input("export", path.display().to_string());
            }
            let mut v = to_value(&rep);
            for b in ["heads", "tails"] {
                let z = (v[b]["estimate"].as_f64().unwrap() - v[b]["expected"].as_f64().unwrap())
                    / v[b]["standard_error"].as_f64().unwrap();
                v[b]["z_score"] = json!(z);
            }
            r.results = v;
            Ok(r)
        }
        Command::OrderStats { n, spec, samples } => {
            let mut r = Report::new("order-stats");
            r.input("n", *n);
            let density = match spec {
                Some(path) => {
                    r.input("spec", path.display().to_string());
                    let d = with_path(path, MixedPairDistribution::from_path(path))?;
                    if d.len() != 1 {
                        return Err(InputError(format!("{}: need a single-atom distribution", path.display())));
                    }
                    d.conditional_density(0)?.clone()
                }
                None => DensitySpec::unit_uniform(),
            };
            let method = match samples {
                Some(s) => Some(*s),
                None if *n > mixent_core::vector::MAX_QUADRATURE_DIM => Some(EntropyOptions::default().mc_samples),
                None => None,
            };
            let method = match method {
                Some(samples) => {
                    let seed = require_seed(cli.seed, "Monte Carlo order statistics")?;
                    r.input("seed", seed);
                    r.input("samples", samples);
                    OrderStatsMethod::MonteCarlo { samples, seed }
                }
                None => OrderStatsMethod::Quadrature,
            };
            let rep = order_statistics_entropy(&density, *n, method)?;
            let gap = (rep.difference - rep.expected_difference).abs();
            let allowed = match method {
                OrderStatsMethod::MonteCarlo { .. } => 4.0 * rep.error_estimate,
                _ => ORDER_STATS_QUAD_TOL + rep.error_estimate,
            };
            if gap > allowed {
                r.fail(format!("difference misses -log n! by {gap} > {allowed}"));
            }
            r.results = to_value(&rep);
            Ok(r)
        }
        Command::Estimate {
            input,
            method,
            k,
            bootstrap,
            asymptotic,
        } => {
            let mut r = Report::new("estimate");
            r.input("input", input.display().to_string());
            let seed = if *asymptotic {
                cli.seed.unwrap_or(0)
            } else {
                require_seed(cli.seed, "the bootstrap standard error")?
            };
            r.input("seed", seed);
            let opts = EstimatorOptions {
                k: *k,
                bootstrap: *bootstrap,
                seed,
                standard_error: if *asymptotic {
                    StandardError::Asymptotic
                } else {
                    StandardError::Bootstrap
                },
            };
            let lines = read_samples(input, *method == Estimator::NearestNeighbor)?;
            let res = match method {
                Estimator::NearestNeighbor => {
                    let mut xs = Vec::with_capacity(lines.len());
                    for (line, text) in &lines {
                        xs.push(text.parse::<f64>().map_err(|_| {
                            InputError(format!("{}:{line}: cannot parse {text:?} as a number", input.display()))
                        })?);
                    }
                    nn_differential_entropy(&xs, &opts)?
                }
                Estimator::PlugIn => {
                    let labels: Vec<&str> = lines.iter().map(|(_, t)| t.as_str()).collect();
                    plugin_discrete_entropy(&labels, &opts)?
                }
            };
            if res.jittered > 0 {
                r.diagnostics.push(format!("{} tied samples jittered", res.jittered));
            }
            r.results = to_value(&res);
            Ok(r)
        }
    }
}

/// Non-empty lines with their 1-based line numbers. For numeric input a
/// first line that is not a number is taken as a header.
fn read_samples(path: &Path, numeric: bool) -> std::result::Result<Vec<(usize, String)>, InputError> {
    let text = std::fs::read_to_string(path).map_err(|e| InputError(format!("{}: {e}", path.display())))?;
    let mut out: Vec<(usize, String)> = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim().to_string()))
        .filter(|(_, l)| !l.is_empty())
        .collect();
    if numeric && out.first().is_some_and(|(i, l)| *i == 1 && l.parse::<f64>().is_err() && out.len() > 1) {
        out.remove(0);
    }
    if out.is_empty() {
        return Err(InputError(format!("{}: no samples", path.display())));
    }
    Ok(out)
}

fn flatten(prefix: &str, v: &Value, out: &mut Vec<(String, Value)>) {
    let key = |k: &str| if prefix.is_empty() { k.to_string() } else { format!("{prefix}.{k}") };
    match v {
        Value::Object(m) => {
            for (k, x) in m {
                flatten(&key(k), x, out);
            }
        }
        Value::Array(a) if a.iter().any(|x| x.is_object() || x.is_array()) => {
            for (i, x) in a.iter().enumerate() {
                flatten(&key(&i.to_string()), x, out);
            }
        }
        _ => out.push((prefix.to_string(), v.clone())),
    }
}

/// Nine significant digits.
fn sig9(v: f64) -> String {
    if v == 0.0 || !v.is_finite() {
        return format!("{v}");
    }
    let e = v.abs().log10().floor() as i32;
    if (-5..9).contains(&e) {
        format!("{:.*}", (8 - e).max(0) as usize, v)
    } else {
        format!("{v:.8e}")
    }
}

fn human(v: &Value) -> String {
    match v {
        Value::Number(n) if n.is_f64() => sig9(n.as_f64().unwrap()),
        Value::Null => "n/a".into(),
        Value::String(s) => s.clone(),
        Value::Array(a) => format!("[{}]", a.iter().map(human).collect::<Vec<_>>().join(", ")),
        other => other.to_string(),
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn csv_value(v: &Value) -> String {
    match v {
        Value::String(s) => csv_field(s),
        Value::Array(a) => csv_field(&a.iter().map(csv_value).collect::<Vec<_>>().join(";")),
        other => other.to_string(),
    }
}

fn render(r: &Report, format: Format) -> String {
    let mut out = String::new();
    match format {
        Format::Structured => {
            let doc = json!({
                "command": r.command,
                "inputs": r.inputs,
                "results": r.results,
                "diagnostics": r.diagnostics,
            });
            out = serde_json::to_string_pretty(&doc).expect("report serializes");
            out.push('\n');
        }
        Format::Human => {
            let mut rows = Vec::new();
            flatten("", &r.results, &mut rows);
            let width = rows.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
            let _ = writeln!(out, "{}", r.command);
            for (k, v) in &rows {
                let _ = writeln!(out, "  {k:width$}  {}", human(v));
            }
            for d in &r.diagnostics {
                let _ = writeln!(out, "note: {d}");
            }
        }
        Format::Csv => {
            out.push_str("section,key,value\n");
            let mut rows = Vec::new();
            flatten("", &Value::Object(r.inputs.clone()), &mut rows);
            for (k, v) in rows {
                let _ = writeln!(out, "inputs,{},{}", csv_field(&k), csv_value(&v));
            }
            let mut rows = Vec::new();
            flatten("", &r.results, &mut rows);
            for (k, v) in rows {
                let _ = writeln!(out, "results,{},{}", csv_field(&k), csv_value(&v));
            }
            for (i, d) in r.diagnostics.iter().enumerate() {
                let _ = writeln!(out, "diagnostics,{i},{}", csv_field(d));
            }
        }
    }
    out
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(report) => {
            print!("{}", render(&report, cli.format));
            if report.claim_holds {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(InputError(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
