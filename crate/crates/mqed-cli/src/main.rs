//! Batch runner for the identity-check suites.
//!
//! `mqed check <config>` executes the suites described by a flat key-value
//! configuration file and writes machine-readable reports; `mqed list`
//! prints the check registry; `mqed demo-defect` runs the material-span
//! defect sweep against the absorber filling fraction; `mqed version`
//! prints build information.
//!
//! Exit codes: 0 every check passed, 1 at least one check failed,
//! 2 usage or configuration error (including I/O failures).

use std::collections::BTreeMap;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use clap::{Parser, Subcommand};
use mqed::nalgebra::Vector3;
use serde_json::json;

use mqed::constants::Constants;
use mqed::fano::{
    build_model, diagonalize, lnf_defect, maxwell_ampere_check, polariton_vectors, BathSpec,
    PolaritonKind, PolaritonVectors,
};
use mqed::identity::{asymptotic_amplitude_check, completeness_1d};
use mqed::kvfmt::{self, Section};
use mqed::layered::{Layer, Structure1D};
use mqed::quad::QuadraturePolicy;
use mqed::report::CheckReport;
use mqed::response::{dispersion_suite, kk_check, Channel, PoleTerm, ResponseModel};
use mqed::vacuum3d::{angular_completeness, jones_check, plemelj_limit_check, SphereQuadrature};
use mqed::Complex;

#[derive(Parser)]
#[command(name = "mqed", version, about = "Batch runner for the mqed identity-check suites")]
struct Cli {
    /// Output directory (overrides the config's output_dir)
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads (overrides the config's parallelism)
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Multiply every tolerance by this factor (exploratory runs)
    #[arg(long, global = true, default_value_t = 1.0)]
    tol_scale: f64,
    /// Seed for randomized point sampling (overrides the config's seed)
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the suites described by a configuration file
    Check { config: PathBuf },
    /// Print the available check names with their identity anchors
    List,
    /// Run the material-span defect sweep against absorber filling
    DemoDefect,
    /// Print build information
    Version,
}

/// Registry row: check name, identity anchor, how to invoke it.
const REGISTRY: &[(&str, &str, &str)] = &[
    ("kramers-kronig", "dispersion/fundamental-1", "suite: kramers-kronig"),
    ("dispersion-fundamental-electric", "dispersion/fundamental-2", "suite: dispersion-suite"),
    ("dispersion-fundamental-inverse-mu", "dispersion/fundamental-2", "suite: dispersion-suite"),
    ("dispersion-coupling-single", "dispersion/coupling-1", "suite: dispersion-suite"),
    ("dispersion-mixed-double", "dispersion/mixed", "suite: dispersion-suite"),
    ("dispersion-coupling-double", "dispersion/coupling-2", "suite: dispersion-suite"),
    ("wronskian-constancy", "green-1d/structure", "library: Green1D::wronskian_constancy"),
    ("completeness-1d", "green-1d/completeness", "suite: completeness-1d"),
    ("commutator-spectrum", "field-commutators/equal-frequency", "library: commutator_spectrum"),
    ("unbounded-medium-completeness", "green-homogeneous/medium-only", "library: unbounded_lnf_identity"),
    ("asymptotic-amplitude", "green-1d/far-field", "suite: asymptotic-amplitude"),
    ("angular-completeness", "vacuum3d/mode-completeness", "suite: angular-completeness"),
    ("jones-lemma", "vacuum3d/asymptotic-integrals", "suite: jones-lemma"),
    ("plemelj-limit", "vacuum3d/distributional", "suite: plemelj-limit"),
    ("maxwell-ampere-residual", "spectral-fields/ampere-maxwell", "suite: maxwell-ampere"),
    ("polariton-gg-diagonal", "polariton-map/bosonicity", "library: bosonicity_check"),
    ("polariton-ffe-diagonal", "polariton-map/bosonicity", "library: bosonicity_check"),
    ("polariton-ffm-diagonal", "polariton-map/bosonicity", "library: bosonicity_check"),
    ("polariton-gg-cross", "polariton-map/bosonicity", "library: bosonicity_check"),
    ("polariton-gf-cross", "polariton-map/bosonicity", "library: bosonicity_check"),
    ("polariton-ff-cross-channel", "polariton-map/bosonicity", "library: bosonicity_check"),
    ("polariton-ff-cross-site", "polariton-map/bosonicity", "library: bosonicity_check"),
    ("polariton-annihilation-pairs", "polariton-map/bosonicity", "library: bosonicity_check"),
    ("polariton-smeared-window-orthogonality", "polariton-map/bosonicity", "library: bosonicity_check"),
    ("material-span-defect", "mode-span/material-only", "command: demo-defect"),
];

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(all_passed) => {
            if all_passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<bool, String> {
    match &cli.command {
        Command::Version => {
            println!("mqed {} ({} profile)", env!("CARGO_PKG_VERSION"), profile_name());
            Ok(true)
        }
        Command::List => {
            for (name, anchor, how) in REGISTRY {
                println!("{name:<42} anchor={anchor:<38} {how}");
            }
            Ok(true)
        }
        Command::DemoDefect => demo_defect(&cli),
        Command::Check { config } => check(&cli, config),
    }
}

fn profile_name() -> &'static str {
    if cfg!(debug_assertions) {
        "dev"
    } else {
        "release"
    }
}

// ---------------------------------------------------------------------------
// Configuration

struct RunConfig {
    models: BTreeMap<String, ResponseModel>,
    structures: BTreeMap<String, Structure1D>,
    suites: Vec<(String, Section)>,
    output_dir: PathBuf,
    parallelism: usize,
    seed: u64,
}

fn load_config(path: &Path, cli: &Cli) -> Result<RunConfig, String> {
    let text = fs::read_to_string(path)
        .map_err(|e| format!("cannot read config '{}': {e}", path.display()))?;
    let sections = kvfmt::parse(&text).map_err(|e| e.to_string())?;

    let mut models = BTreeMap::new();
    let mut structures = BTreeMap::new();
    let mut suites = Vec::new();
    let mut output_dir = PathBuf::from("mqed-out");
    let mut parallelism = 1usize;
    let mut seed = 0u64;

    for section in &sections {
        let mut words = section.name.splitn(2, ' ');
        let kind = words.next().unwrap_or("");
        let label = words.next().unwrap_or("").trim();
        match kind {
            "run" => {
                if let Some(v) = section.get("output_dir") {
                    output_dir = PathBuf::from(v);
                }
                if section.get("parallelism").is_some() {
                    parallelism = section.require_usize("parallelism").map_err(|e| e.to_string())?;
                }
                if section.get("seed").is_some() {
                    seed = section.require_usize("seed").map_err(|e| e.to_string())? as u64;
                }
            }
            "model" => {
                if label.is_empty() {
                    return Err(format!("section [{}] needs a model name", section.name));
                }
                models.insert(label.to_string(), parse_model(section)?);
            }
            "structure" => {
                if label.is_empty() {
                    return Err(format!("section [{}] needs a structure name", section.name));
                }
                structures.insert(label.to_string(), parse_structure(section, &models)?);
            }
            "suite" => {
                if label.is_empty() {
                    return Err(format!("section [{}] needs a suite name", section.name));
                }
                suites.push((label.to_string(), section.clone()));
            }
            other => return Err(format!("unknown section kind '{other}' in [{}]", section.name)),
        }
    }
    if suites.is_empty() {
        return Err("config defines no [suite ...] sections".into());
    }
    let mut config = RunConfig { models, structures, suites, output_dir, parallelism, seed };
    if let Some(out) = &cli.out {
        config.output_dir = out.clone();
    }
    if let Some(jobs) = cli.jobs {
        config.parallelism = jobs.max(1);
    }
    if let Some(seed) = cli.seed {
        config.seed = seed;
    }
    Ok(config)
}

fn parse_model(section: &Section) -> Result<ResponseModel, String> {
    let terms = |key: &str| -> Result<Vec<PoleTerm>, String> {
        section
            .get_all(key)
            .into_iter()
            .map(|v| {
                let f = kvfmt::parse_f64_fields(&section.name, key, v).map_err(|e| e.to_string())?;
                if f.len() != 3 {
                    return Err(format!(
                        "section [{}] key '{key}': expected 'strength resonance damping'",
                        section.name
                    ));
                }
                PoleTerm::new(f[0], f[1], f[2]).map_err(|e| e.to_string())
            })
            .collect()
    };
    ResponseModel::new(terms("electric")?, terms("magnetic")?).map_err(|e| e.to_string())
}

fn parse_structure(
    section: &Section,
    models: &BTreeMap<String, ResponseModel>,
) -> Result<Structure1D, String> {
    let mut layers = Vec::new();
    for v in section.get_all("layer") {
        let mut fields = v.split_whitespace();
        let (x_min, x_max, model_name) = match (fields.next(), fields.next(), fields.next()) {
            (Some(a), Some(b), Some(m)) if fields.next().is_none() => (a, b, m),
            _ => {
                return Err(format!(
                    "section [{}]: layer entries take 'x_min x_max model'",
                    section.name
                ))
            }
        };
        let x_min: f64 = x_min
            .parse()
            .map_err(|_| format!("section [{}]: bad layer bound '{x_min}'", section.name))?;
        let x_max: f64 = x_max
            .parse()
            .map_err(|_| format!("section [{}]: bad layer bound '{x_max}'", section.name))?;
        let model = models.get(model_name).ok_or_else(|| {
            format!("section [{}] references undefined model '{model_name}'", section.name)
        })?;
        layers.push(Layer::new(x_min, x_max, model.clone()).map_err(|e| e.to_string())?);
    }
    Structure1D::new(layers).map_err(|e| e.to_string())
}

/// `lo:hi:n` linear grid, or a single number.
fn parse_grid(section: &Section, key: &str) -> Result<Vec<f64>, String> {
    let v = section.require(key).map_err(|e| e.to_string())?;
    if let Some((lo, rest)) = v.split_once(':') {
        let (hi, n) = rest
            .split_once(':')
            .ok_or_else(|| format!("section [{}] key '{key}': expected lo:hi:n", section.name))?;
        let lo: f64 = lo.parse().map_err(|_| grid_err(section, key, v))?;
        let hi: f64 = hi.parse().map_err(|_| grid_err(section, key, v))?;
        let n: usize = n.parse().map_err(|_| grid_err(section, key, v))?;
        if n < 1 || hi <= lo {
            return Err(grid_err(section, key, v));
        }
        if n == 1 {
            return Ok(vec![lo]);
        }
        Ok((0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect())
    } else {
        Ok(vec![v.parse().map_err(|_| grid_err(section, key, v))?])
    }
}

fn grid_err(section: &Section, key: &str, v: &str) -> String {
    format!("section [{}] key '{key}': malformed grid '{v}'", section.name)
}

// ---------------------------------------------------------------------------
// Suite execution

/// One unit of work: evaluates to the reports of a single parameter point.
type Job = Box<dyn Fn() -> Vec<CheckReport> + Send + Sync>;

fn check(cli: &Cli, config_path: &Path) -> Result<bool, String> {
    let started = Instant::now();
    let config = load_config(config_path, cli)?;
    let constants = Constants::natural();
    let policy = QuadraturePolicy::default();

    // Expand every suite into an ordered list of jobs.
    let mut jobs: Vec<(String, usize, Job)> = Vec::new();
    for (suite_name, section) in &config.suites {
        let expanded = expand_suite(suite_name, section, &config, &constants, &policy)?;
        for (idx, job) in expanded.into_iter().enumerate() {
            jobs.push((suite_name.clone(), idx, job));
        }
    }

    // Run them on a dedicated pool; indices restore deterministic order.
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.parallelism)
        .build()
        .map_err(|e| format!("cannot build thread pool: {e}"))?;
    let mut results: Vec<(String, usize, Vec<CheckReport>)> = pool.install(|| {
        use rayon::prelude::*;
        jobs.par_iter().map(|(suite, idx, job)| (suite.clone(), *idx, job())).collect()
    });
    let order: BTreeMap<&str, usize> = config
        .suites
        .iter()
        .enumerate()
        .map(|(i, (name, _))| (name.as_str(), i))
        .collect();
    results.sort_by_key(|(suite, idx, _)| (order[suite.as_str()], *idx));

    // Apply the global tolerance scale.
    if cli.tol_scale != 1.0 {
        if !(cli.tol_scale > 0.0) {
            return Err("--tol-scale must be positive".into());
        }
        for (_, _, reports) in &mut results {
            for r in reports {
                r.tol *= cli.tol_scale;
                r.pass = r.rel_err <= r.tol;
            }
        }
    }

    write_outputs(&config, &results)?;

    // Summary.
    let mut total = 0usize;
    let mut passed = 0usize;
    let mut worst: Option<(String, f64)> = None;
    for (_, _, reports) in &results {
        for r in reports {
            total += 1;
            if r.pass {
                passed += 1;
            }
            if r.rel_err.is_finite() && worst.as_ref().map_or(true, |(_, w)| r.rel_err > *w) {
                worst = Some((r.name.clone(), r.rel_err));
            }
        }
    }
    let summary = json!({
        "total": total,
        "passed": passed,
        "failed": total - passed,
        "worst": worst.as_ref().map(|(n, e)| json!({"name": n, "rel_err": e})),
        "wall_time_s": started.elapsed().as_secs_f64(),
    });
    println!("{summary}");
    Ok(passed == total)
}

fn write_outputs(
    config: &RunConfig,
    results: &[(String, usize, Vec<CheckReport>)],
) -> Result<(), String> {
    fs::create_dir_all(&config.output_dir)
        .map_err(|e| format!("cannot create '{}': {e}", config.output_dir.display()))?;
    let jsonl_path = config.output_dir.join("reports.jsonl");
    let mut jsonl = fs::File::create(&jsonl_path)
        .map_err(|e| format!("cannot write '{}': {e}", jsonl_path.display()))?;
    // The timestamp is isolated on its own line so the remaining report
    // stream is byte-identical across reruns with the same config and seed.
    let ts = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
    writeln!(jsonl, "{}", json!({"run_started_unix": ts}))
        .map_err(|e| format!("write failure: {e}"))?;
    for (suite, idx, reports) in results {
        for r in reports {
            let mut line: serde_json::Value =
                serde_json::from_str(&r.to_json_line()).expect("report is valid JSON");
            line["suite"] = json!(suite);
            line["param_index"] = json!(idx);
            writeln!(jsonl, "{line}").map_err(|e| format!("write failure: {e}"))?;
        }
    }

    // One CSV per suite with the scalar report columns.
    let mut by_suite: BTreeMap<&str, Vec<&CheckReport>> = BTreeMap::new();
    for (suite, _, reports) in results {
        by_suite.entry(suite.as_str()).or_default().extend(reports.iter());
    }
    for (suite, reports) in by_suite {
        let path = config.output_dir.join(format!("{suite}.csv"));
        let mut csv = fs::File::create(&path)
            .map_err(|e| format!("cannot write '{}': {e}", path.display()))?;
        writeln!(csv, "name,abs_err,rel_err,tol,pass").map_err(|e| format!("write failure: {e}"))?;
        for r in reports {
            writeln!(csv, "{},{:e},{:e},{:e},{}", r.name, r.abs_err, r.rel_err, r.tol, r.pass)
                .map_err(|e| format!("write failure: {e}"))?;
        }
    }
    Ok(())
}

fn expand_suite(
    suite_name: &str,
    section: &Section,
    config: &RunConfig,
    constants: &Constants,
    policy: &QuadraturePolicy,
) -> Result<Vec<Job>, String> {
    let kind = section.require("check").map_err(|e| e.to_string())?;
    let get_model = |key: &str| -> Result<ResponseModel, String> {
        let name = section.require(key).map_err(|e| e.to_string())?;
        config
            .models
            .get(name)
            .cloned()
            .ok_or_else(|| format!("suite '{suite_name}' references undefined model '{name}'"))
    };
    let get_structure = |key: &str| -> Result<Structure1D, String> {
        let name = section.require(key).map_err(|e| e.to_string())?;
        config
            .structures
            .get(name)
            .cloned()
            .ok_or_else(|| format!("suite '{suite_name}' references undefined structure '{name}'"))
    };

    let mut jobs: Vec<Job> = Vec::new();
    match kind {
        "kramers-kronig" => {
            let model = get_model("model")?;
            let omegas = parse_grid(section, "omega")?;
            let policy = policy.clone();
            for omega in omegas {
                for channel in [Channel::Electric, Channel::InverseMu] {
                    let model = model.clone();
                    let policy = policy.clone();
                    jobs.push(Box::new(move || {
                        vec![kk_check(&model, channel, omega, &policy)
                            .unwrap_or_else(|e| report_error("kramers-kronig", &e.to_string()))]
                    }));
                }
            }
        }
        "dispersion-suite" => {
            let model = get_model("model")?;
            let omegas = parse_grid(section, "omega")?;
            let ratio = match section.get("ratio") {
                Some(_) => section.require_f64("ratio").map_err(|e| e.to_string())?,
                None => 1.7,
            };
            let constants = *constants;
            for omega in omegas {
                let model = model.clone();
                let policy = policy.clone();
                jobs.push(Box::new(move || {
                    dispersion_suite(&model, &constants, 0, 1, 1, omega, ratio * omega, &policy)
                        .unwrap_or_else(|e| vec![report_error("dispersion-suite", &e.to_string())])
                }));
            }
        }
        "completeness-1d" => {
            let structure = get_structure("structure")?;
            let omegas = parse_grid(section, "omega")?;
            let points = match section.get("points") {
                Some(_) => section.require_usize("points").map_err(|e| e.to_string())?,
                None => 6,
            };
            let (x0, x1) = structure.extent().unwrap_or((-0.5, 0.5));
            let pad = 0.5 * (x1 - x0).max(0.5);
            let xs: Vec<f64> = (0..points)
                .map(|i| x0 - pad + (x1 - x0 + 2.0 * pad) * i as f64 / (points - 1).max(1) as f64)
                .collect();
            for omega in omegas {
                let structure = structure.clone();
                let policy = policy.clone();
                let xs = xs.clone();
                jobs.push(Box::new(move || {
                    let mut out = Vec::new();
                    for &x in &xs {
                        for &xp in &xs {
                            out.push(completeness_1d(&structure, omega, x, xp, &policy));
                        }
                    }
                    out
                }));
            }
        }
        "asymptotic-amplitude" => {
            let structure = get_structure("structure")?;
            let omegas = parse_grid(section, "omega")?;
            let x_prime = section.require_f64("x_prime").map_err(|e| e.to_string())?;
            let x_far = section.require_f64("x_far").map_err(|e| e.to_string())?;
            for omega in omegas {
                let structure = structure.clone();
                jobs.push(Box::new(move || {
                    vec![asymptotic_amplitude_check(&structure, omega, x_prime, x_far)
                        .unwrap_or_else(|e| report_error("asymptotic-amplitude", &e.to_string()))]
                }));
            }
        }
        "angular-completeness" => {
            let omega = section.require_f64("omega").map_err(|e| e.to_string())?;
            let pairs = match section.get("pairs") {
                Some(_) => section.require_usize("pairs").map_err(|e| e.to_string())?,
                None => 20,
            };
            let k_sep_max = match section.get("k_separation_max") {
                Some(_) => section.require_f64("k_separation_max").map_err(|e| e.to_string())?,
                None => 6.0,
            };
            let order = match section.get("order") {
                Some(_) => section.require_usize("order").map_err(|e| e.to_string())?,
                None => 24,
            };
            let constants = *constants;
            let mut rng = SplitMix64::new(config.seed);
            for _ in 0..pairs {
                let (r, rp) = random_pair(&mut rng, omega / constants.c, k_sep_max);
                jobs.push(Box::new(move || {
                    let quad = match SphereQuadrature::new(order) {
                        Ok(q) => q,
                        Err(e) => return vec![report_error("angular-completeness", &e.to_string())],
                    };
                    vec![angular_completeness(omega, &r, &rp, &quad, &constants)]
                }));
            }
        }
        "jones-lemma" => {
            let omega = section.require_f64("omega").map_err(|e| e.to_string())?;
            // The grid gives the kr range; the slope fit wants the radii
            // phase-aligned (kr = 2πm + π/4) so the beating endpoint terms
            // keep a fixed relative phase and the defect decays cleanly.
            let kr_grid = parse_grid(section, "radii")?;
            let k = omega / constants.c;
            let tau = std::f64::consts::TAU;
            let mut radii: Vec<f64> = kr_grid
                .iter()
                .map(|kr| (((kr / tau).round().max(1.0)) * tau + 0.25 * std::f64::consts::PI) / k)
                .collect();
            radii.dedup_by(|a, b| (*a - *b).abs() < 1e-9);
            let constants = *constants;
            jobs.push(Box::new(move || {
                // Quadratic test function of the direction vector.
                let f = |n: &Vector3<f64>| Complex::new(1.0 + n.x * n.x - 0.5 * n.y * n.z, 0.0);
                vec![jones_check(omega, &Vector3::z(), f, &radii, &constants)
                    .unwrap_or_else(|e| report_error("jones-lemma", &e.to_string()))]
            }));
        }
        "plemelj-limit" => {
            let radius = section.require_f64("radius").map_err(|e| e.to_string())?;
            let sigma = section.require_f64("sigma").map_err(|e| e.to_string())? as i32;
            let policy = policy.clone();
            jobs.push(Box::new(move || {
                // Gaussian test function on the frequency line.
                let f = |k: f64| Complex::new((-k * k).exp(), 0.0);
                vec![plemelj_limit_check(&[radius], sigma, f, &policy)
                    .unwrap_or_else(|e| report_error("plemelj-limit", &e.to_string()))]
            }));
        }
        "maxwell-ampere" => {
            let structure = get_structure("structure")?;
            let omegas = parse_grid(section, "omega")?;
            let pts = match section.get("pts_per_lambda") {
                Some(_) => section.require_usize("pts_per_lambda").map_err(|e| e.to_string())?,
                None => 64,
            };
            let constants = *constants;
            for omega in omegas {
                let structure = structure.clone();
                jobs.push(Box::new(move || {
                    vec![maxwell_ampere_check(&structure, omega, pts, &constants)
                        .unwrap_or_else(|e| report_error("maxwell-ampere-residual", &e.to_string()))]
                }));
            }
        }
        other => {
            return Err(format!(
                "suite '{suite_name}': unknown check '{other}' (see `mqed list`)"
            ))
        }
    }
    if jobs.is_empty() {
        return Err(format!("suite '{suite_name}' expanded to an empty parameter grid"));
    }
    Ok(jobs)
}

fn report_error(name: &str, why: &str) -> CheckReport {
    CheckReport::failed(name, "runner/error", json!({}), why)
}

// ---------------------------------------------------------------------------
// Randomized sampling (deterministic in the seed)

/// SplitMix64: tiny deterministic generator for sampling points.
struct SplitMix64(u64);

impl SplitMix64 {
    fn new(seed: u64) -> Self {
        SplitMix64(seed)
    }

    fn next_u64(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9e3779b97f4a7c15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
        z ^ (z >> 31)
    }

    /// Uniform in [0, 1).
    fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 / (1u64 << 53) as f64
    }
}

/// A random pair of points with k-scaled separation at most `k_sep_max`.
fn random_pair(rng: &mut SplitMix64, k: f64, k_sep_max: f64) -> (Vector3<f64>, Vector3<f64>) {
    let r = Vector3::new(rng.next_f64() - 0.5, rng.next_f64() - 0.5, rng.next_f64() - 0.5);
    // Random direction and length for the separation.
    let dir = loop {
        let v = Vector3::new(
            2.0 * rng.next_f64() - 1.0,
            2.0 * rng.next_f64() - 1.0,
            2.0 * rng.next_f64() - 1.0,
        );
        let n = v.norm();
        if n > 1e-3 && n <= 1.0 {
            break v / n;
        }
    };
    let sep = rng.next_f64() * k_sep_max / k;
    (r, r + dir * sep)
}

// ---------------------------------------------------------------------------
// Defect demo

fn demo_defect(cli: &Cli) -> Result<bool, String> {
    let out_dir = cli.out.clone().unwrap_or_else(|| PathBuf::from("mqed-out"));
    fs::create_dir_all(&out_dir)
        .map_err(|e| format!("cannot create '{}': {e}", out_dir.display()))?;
    let path = out_dir.join("defect_vs_filling.csv");
    let mut csv =
        fs::File::create(&path).map_err(|e| format!("cannot write '{}': {e}", path.display()))?;
    writeln!(csv, "filling,defect,n_vectors,n_modes_in_band")
        .map_err(|e| format!("write failure: {e}"))?;

    let constants = Constants::natural();
    let policy = QuadraturePolicy::default();
    let x_half = 2.0;
    let bath = BathSpec { omega_min: 0.25, omega_max: 3.25, n_bath: 7 };
    let resp = ResponseModel::with_eps_at(Complex::new(2.0, 0.8), 1.0)
        .map_err(|e| e.to_string())?;

    println!("material-span defect vs absorber filling fraction (box half-width {x_half})");
    let mut last = f64::INFINITY;
    let mut monotone = true;
    for filling in [0.25, 0.5, 0.75, 1.0] {
        let half = filling * x_half;
        let structure =
            Structure1D::slab(-half, half, resp.clone()).map_err(|e| e.to_string())?;
        let model = build_model(&structure, x_half, 64, &bath, &constants)
            .map_err(|e| e.to_string())?;
        let modes = diagonalize(&model).map_err(|e| e.to_string())?;
        let mut material = PolaritonVectors { entries: Vec::new(), dim: 2 * model.n_q() };
        for j in 0..model.n_bath() {
            let batch = polariton_vectors(&model, &structure, model.bath_nodes[j], &policy)
                .map_err(|e| e.to_string())?;
            let mut mat = batch;
            mat.entries.retain(|e| !matches!(e.kind, PolaritonKind::Scattering(_)));
            material.merge(mat).map_err(|e| e.to_string())?;
        }
        let n_vec = material.entries.len();
        let (defect, report) = lnf_defect(&model, &modes, &material).map_err(|e| e.to_string())?;
        let n_modes = report.params["n_modes_in_band"].as_u64().unwrap_or(0);
        writeln!(csv, "{filling},{defect:.6},{n_vec},{n_modes}")
            .map_err(|e| format!("write failure: {e}"))?;
        println!("  filling {filling:>4}: defect {defect:.4} ({n_vec} rows, {n_modes} modes)");
        monotone &= defect <= last + 1e-12;
        last = defect;
    }
    println!("wrote {}", path.display());
    if !monotone {
        eprintln!("warning: defect did not decrease monotonically with filling");
    }
    Ok(monotone)
}
