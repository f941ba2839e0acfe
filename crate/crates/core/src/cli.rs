//! The `netiv` command line: simulate, table, estimate, gen-network and
//! diagnose-xi.
//!
//! Every setting can come from a flag, from a TOML file passed with
//! `--config`, or from its default, in that order of precedence. The config
//! file uses the long flag names as keys, either at top level or under a
//! table named after the subcommand (which wins over top level). Each run
//! writes `manifest.json` with the merged settings next to its outputs.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fmt::Display;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use clap::parser::ValueSource;
use clap::{Arg, ArgAction, ArgMatches, Command};
use serde::Serialize;

use crate::empirical::{estimate_columns, load_dataset, EmpiricalOptions, LoadOptions, PanelDataset};
use crate::error::Error;
use crate::graph_model::{GraphonSpec, SparsityRate};
use crate::mediator::{estimate_var_xi, XiOptions};
use crate::montecarlo::{reproduce_table, simulate, Dgp, SimConfig, TableId, TableOptions};
use crate::outcome::{Confounder, Noise};

pub const MANIFEST_SCHEMA_VERSION: u32 = 1;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug)]
enum CliError {
    Usage(String),
    Failure(Error),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        Self::Failure(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        Self::Failure(e.into())
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

fn opt(name: &'static str, default: &'static str, help: &'static str) -> Arg {
    Arg::new(name).long(name).default_value(default).help(help)
}

fn list(name: &'static str, default: &'static str, help: &'static str) -> Arg {
    opt(name, default, help).value_delimiter(',').action(ArgAction::Append)
}

fn config_arg() -> Arg {
    Arg::new("config").long("config").value_name("FILE").help("TOML file with default settings")
}

fn model_args() -> Vec<Arg> {
    vec![
        opt("design", "sbm3", "sbm3, homophily-d2, beta or homophily-d4"),
        opt("n", "200", "network size"),
        opt("q", "n^-0.5", "sparsity: n^<e>, loglog or const:<v>"),
        opt("pi", "0.5", "treatment probability"),
        opt("seed", "0", "base seed"),
    ]
}

fn outcome_args() -> Vec<Arg> {
    vec![
        opt("dgp", "endogenous", "exogenous or endogenous; sets the defaults of the outcome flags"),
        Arg::new("beta0").long("beta0").help("intercept [default: 1]"),
        Arg::new("beta1").long("beta1").help("direct effect [default: 1]"),
        Arg::new("beta2").long("beta2").help("spillover effect [default: 0.5]"),
        Arg::new("lambda").long("lambda").help("confounder map: zero or half-w [default: from --dgp]"),
        Arg::new("noise").long("noise").help("uniform:<lo>:<hi>, normal:<sd> or none [default: from --dgp]"),
    ]
}

fn cli_command() -> Command {
    Command::new("netiv")
        .version(env!("CARGO_PKG_VERSION"))
        .about("Direct and spillover effects with shift-share instruments on changing networks")
        .subcommand_required(true)
        .arg_required_else_help(true)
        .subcommand(
            Command::new("simulate")
                .about("Monte Carlo study of the estimators under one design")
                .args(model_args())
                .args(outcome_args())
                .args([
                    list("estimator", "ols,ssiv,denoised-ssiv", "ols, ols-pre, ssiv, normalized-ssiv, denoised-ssiv"),
                    opt("rank", "design", "denoising rank: an integer, auto, or design"),
                    opt("reps", "1000", "replications"),
                    opt("jobs", "0", "worker threads (0: all cores)"),
                    opt("level", "0.95", "confidence level"),
                    opt("variance", "default", "default or naive-hc"),
                    opt("mediator", "fraction", "fraction, count or any"),
                    opt("oracle-reps", "0", "replications for the population estimand oracle (0: skip)"),
                    opt("max-failures", "0.01", "tolerated share of failed replications per estimator"),
                    opt("out", "netiv-out", "output directory"),
                    config_arg(),
                ]),
        )
        .subcommand(
            Command::new("table")
                .about("Reproduce a published simulation table")
                .args([
                    opt("id", "1", "table: 1, 2, 3, 4 or 6"),
                    opt("scale", "0.2", "fraction of the published 5000 replications"),
                    Arg::new("reps").long("reps").help("replications (overrides --scale)"),
                    list("designs", "1,2,3,4", "designs to run"),
                    opt("seed", "0", "base seed"),
                    opt("jobs", "0", "worker threads (0: all cores)"),
                    opt("out", "netiv-out", "output directory"),
                    config_arg(),
                ]),
        )
        .subcommand(
            Command::new("estimate")
                .about("Fit the estimator battery to panel-network data")
                .args([
                    Arg::new("units").long("units").help("units CSV: id, t, outcome columns"),
                    Arg::new("pre").long("pre").help("pre-intervention edge list"),
                    Arg::new("post").long("post").help("post-intervention edge list"),
                    Arg::new("outcome").long("outcome").value_delimiter(',').action(ArgAction::Append).help(
                        "outcome columns [default: all]",
                    ),
                    list("estimator", "ols,ols-pre,ssiv,normalized-ssiv,denoised-ssiv", "estimators to fit"),
                    opt("rank", "auto", "denoising rank: an integer or auto"),
                    opt("level", "0.95", "confidence level"),
                    opt("variance", "default", "default or naive-hc"),
                    opt("mediator", "fraction", "fraction, count or any"),
                    Arg::new("pi").long("pi").help("declared treatment probability [default: sample share]"),
                    opt("edge-header", "false", "edge files start with a header row"),
                    opt("jobs", "0", "worker threads (0: all cores)"),
                    opt("out", "netiv-out", "output directory"),
                    config_arg(),
                ]),
        )
        .subcommand(
            Command::new("gen-network")
                .about("Draw one dataset from a design and write it as panel files")
                .args(model_args())
                .args(outcome_args())
                .args([opt("out", "netiv-out", "output directory"), config_arg()]),
        )
        .subcommand(
            Command::new("diagnose-xi")
                .about("Estimate the variance of the limiting treated-neighbor share")
                .args([
                    opt("design", "sbm3", "sbm3, homophily-d2, beta or homophily-d4"),
                    opt("reps", "1000", "outer draws of the focal unit"),
                    opt("inner-draws", "10000", "draws of prospective neighbors per estimate"),
                    opt("pi", "0.5", "treatment probability"),
                    opt("seed", "0", "base seed"),
                    opt("out", "netiv-out", "output directory"),
                    config_arg(),
                ]),
        )
}

/// Settings after merging flags, config file and defaults.
#[derive(Debug, Clone, Serialize)]
struct Settings {
    command: String,
    values: BTreeMap<String, String>,
}

fn toml_to_string(v: &toml::Value) -> Option<String> {
    Some(match v {
        toml::Value::String(s) => s.clone(),
        toml::Value::Integer(i) => i.to_string(),
        toml::Value::Float(f) => f.to_string(),
        toml::Value::Boolean(b) => b.to_string(),
        toml::Value::Array(a) => a.iter().map(toml_to_string).collect::<Option<Vec<_>>>()?.join(","),
        _ => return None,
    })
}

fn read_config(path: &Path, command: &str, known: &[String]) -> CliResult<BTreeMap<String, String>> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
    let table: toml::Table = text.parse().map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
    let mut out = BTreeMap::new();
    let mut section = None;
    for (k, v) in &table {
        if let toml::Value::Table(t) = v {
            if k == command {
                section = Some(t);
            }
            continue;
        }
        out.insert(k.clone(), v);
    }
    if let Some(t) = section {
        out.extend(t.iter().map(|(k, v)| (k.clone(), v)));
    }
    out.into_iter()
        .map(|(k, v)| {
            if !known.contains(&k) || k == "config" {
                return Err(CliError::Usage(format!("{}: unknown setting `{k}` for {command}", path.display())));
            }
            let s = toml_to_string(v)
                .ok_or_else(|| CliError::Usage(format!("{}: setting `{k}` has an unsupported type", path.display())))?;
            Ok((k, s))
        })
        .collect()
}

fn merge(command: &str, m: &ArgMatches) -> CliResult<Settings> {
    let def = cli_command();
    let ids: Vec<String> = def
        .find_subcommand(command)
        .expect("dispatched subcommand exists")
        .get_arguments()
        .map(|a| a.get_id().as_str().to_string())
        .filter(|id| id != "help")
        .collect();
    let config = match m.get_one::<String>("config") {
        Some(p) => read_config(Path::new(p), command, &ids)?,
        None => BTreeMap::new(),
    };
    let mut values = BTreeMap::new();
    for id in &ids {
        if id == "config" {
            continue;
        }
        let raw = || -> Option<String> {
            if !m.contains_id(id) {
                return None;
            }
            let vals: Vec<String> = m.get_raw(id)?.map(|v| v.to_string_lossy().into_owned()).collect();
            Some(vals.join(","))
        };
        let value = match m.value_source(id) {
            Some(ValueSource::CommandLine) => raw(),
            _ => config.get(id).cloned().or_else(raw),
        };
        if let Some(v) = value {
            values.insert(id.clone(), v);
        }
    }
    if let Some(p) = m.get_one::<String>("config") {
        values.insert("config".into(), p.clone());
    }
    Ok(Settings { command: command.to_string(), values })
}

impl Settings {
    fn raw(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str).filter(|s| !s.is_empty())
    }

    fn get<T: FromStr>(&self, key: &str) -> CliResult<T>
    where
        T::Err: Display,
    {
        let v = self.raw(key).ok_or_else(|| CliError::Usage(format!("--{key} is required")))?;
        v.parse().map_err(|e| CliError::Usage(format!("--{key} `{v}`: {e}")))
    }

    fn get_opt<T: FromStr>(&self, key: &str) -> CliResult<Option<T>>
    where
        T::Err: Display,
    {
        self.raw(key).map(|_| self.get(key)).transpose()
    }

    fn list<T: FromStr>(&self, key: &str) -> CliResult<Vec<T>>
    where
        T::Err: Display,
    {
        self.raw(key)
            .map(|v| {
                v.split(',')
                    .map(|s| s.trim().parse().map_err(|e| CliError::Usage(format!("--{key} `{s}`: {e}"))))
                    .collect()
            })
            .unwrap_or_else(|| Ok(Vec::new()))
    }

    fn jobs(&self) -> CliResult<Option<usize>> {
        Ok(self.get_opt::<usize>("jobs")?.filter(|&j| j > 0))
    }

    fn out(&self) -> CliResult<PathBuf> {
        Ok(PathBuf::from(self.get::<String>("out")?))
    }
}

fn usage<E: Display>(e: E) -> CliError {
    CliError::Usage(e.to_string())
}

fn sim_config(s: &Settings) -> CliResult<SimConfig> {
    let design: GraphonSpec = s.get("design")?;
    let q: SparsityRate = s.get("q")?;
    let dgp: Dgp = s.get("dgp")?;
    let mut cfg = SimConfig::new(design, s.get("n")?, q, dgp).with_seed(s.get("seed")?);
    cfg.pi = s.get("pi")?;
    for (k, key) in ["beta0", "beta1", "beta2"].into_iter().enumerate() {
        if let Some(b) = s.get_opt::<f64>(key)? {
            cfg.outcome.beta[k] = b;
        }
    }
    if let Some(c) = s.get_opt::<Confounder>("lambda")? {
        cfg.outcome.confounder = c;
    }
    if let Some(nz) = s.get_opt::<Noise>("noise")? {
        cfg.outcome.noise = nz;
    }
    Ok(cfg)
}

#[derive(Serialize)]
struct Manifest<'a> {
    schema_version: u32,
    netiv_version: &'static str,
    command: &'a str,
    argv: Vec<String>,
    settings: &'a BTreeMap<String, String>,
    outputs: Vec<String>,
    elapsed_secs: f64,
}

fn write_manifest(out: &Path, s: &Settings, argv: &[String], outputs: &[PathBuf], start: Instant) -> CliResult<PathBuf> {
    let m = Manifest {
        schema_version: MANIFEST_SCHEMA_VERSION,
        netiv_version: env!("CARGO_PKG_VERSION"),
        command: &s.command,
        argv: argv.to_vec(),
        settings: &s.values,
        outputs: outputs.iter().map(|p| p.display().to_string()).collect(),
        elapsed_secs: start.elapsed().as_secs_f64(),
    };
    let path = out.join("manifest.json");
    fs::write(&path, serde_json::to_string_pretty(&m).map_err(Error::from)?)?;
    Ok(path)
}

fn write(out: &Path, name: &str, body: &str) -> CliResult<PathBuf> {
    let p = out.join(name);
    fs::write(&p, body)?;
    Ok(p)
}

fn json<T: Serialize>(v: &T) -> CliResult<String> {
    Ok(serde_json::to_string_pretty(v).map_err(Error::from)?)
}

fn run_simulate(s: &Settings) -> CliResult<(Vec<PathBuf>, Option<Error>)> {
    let mut cfg = sim_config(s)?;
    cfg.estimators = s.list("estimator")?;
    cfg.rank = match s.get::<String>("rank")?.as_str() {
        "design" => None,
        other => Some(other.parse().map_err(usage)?),
    };
    cfg.reps = s.get("reps")?;
    cfg.jobs = s.jobs()?;
    cfg.level = s.get("level")?;
    cfg.variance = s.get("variance")?;
    cfg.mediator = s.get("mediator")?;
    cfg.oracle_reps = s.get_opt::<usize>("oracle-reps")?.filter(|&r| r > 0);
    cfg.max_failure_fraction = s.get("max-failures")?;
    cfg.validate().map_err(usage)?;
    let out = s.out()?;
    fs::create_dir_all(&out)?;
    let report = simulate(&cfg)?;
    let files = vec![write(&out, "simulation.json", &json(&report)?)?, write(&out, "simulation.csv", &report.to_csv()?)?];
    println!(
        "{} n={} q={} reps={} seed={}: mediator mean {:.3}, std {:.3} ({:.1} s)",
        report.design, report.n, report.q_post, report.reps, report.seed, report.mediator_mean, report.mediator_std,
        report.elapsed_secs
    );
    for e in &report.estimators {
        let c = &e.coefficients;
        let cov = |k: usize| c[k].coverage.map_or("-".to_string(), |v| format!("{v:.3}"));
        println!(
            "  {:<16} beta1 {:.3} (sd {:.3}, cov {})  beta2 {:.3} (sd {:.3}, cov {})  failures {}",
            e.estimator.to_string(),
            c[1].mean,
            c[1].std,
            cov(1),
            c[2].mean,
            c[2].std,
            cov(2),
            e.failures
        );
    }
    if let Some(o) = &report.oracle {
        println!("  oracle: ToE {:.4}  DE {:.4}  IE {:.4}  SE {:.4}", o.toe, o.de, o.ie, o.se);
    }
    Ok((files, report.check_failures(cfg.max_failure_fraction).err()))
}

fn run_table(s: &Settings) -> CliResult<(Vec<PathBuf>, Option<Error>)> {
    let id: TableId = s.get("id")?;
    let opts = TableOptions {
        scale: s.get("scale")?,
        reps: s.get_opt("reps")?,
        seed: s.get("seed")?,
        jobs: s.jobs()?,
        designs: s.list("designs")?,
    };
    if !(opts.scale > 0.0) || opts.reps == Some(0) {
        return Err(CliError::Usage("replication count must be positive".into()));
    }
    let out = s.out()?;
    let report = reproduce_table(id, &opts)?;
    let (csv, md) = report.write(&out)?;
    let checked = report.checked().count();
    let ok = report.checked().filter(|c| c.within == Some(true)).count();
    println!(
        "table {}: {ok} of {checked} checked cells within tolerance ({} reps, {:.1} s)",
        report.table, report.reps, report.elapsed_secs
    );
    let failure = report.runs.iter().find_map(|r| r.check_failures(crate::montecarlo::DEFAULT_MAX_FAILURE_FRACTION).err());
    Ok((vec![csv, md], failure))
}

fn run_estimate(s: &Settings) -> CliResult<(Vec<PathBuf>, Option<Error>)> {
    let path = |k: &str| s.get::<String>(k).map(PathBuf::from);
    let (units, pre, post) = (path("units")?, path("pre")?, path("post")?);
    let load = LoadOptions { pi: s.get_opt("pi")?, edge_header: s.get("edge-header")? };
    let opts = EmpiricalOptions {
        estimators: s.list("estimator")?,
        rank: s.get("rank")?,
        level: s.get("level")?,
        variance: s.get("variance")?,
        mediator: s.get("mediator")?,
        pi: None,
    };
    crate::variance::critical_value(opts.level).map_err(usage)?;
    let out = s.out()?;
    let ds = load_dataset(&units, &pre, &post, &load)?;
    let outcomes: Vec<String> = match s.list::<String>("outcome")? {
        o if o.is_empty() => ds.outcomes.iter().map(|(n, _)| n.clone()).collect(),
        o => o,
    };
    let results = with_jobs(s.jobs()?, || estimate_columns(&ds, &outcomes, &opts))?;
    let tables = results.into_iter().collect::<Result<Vec<_>, _>>()?;
    fs::create_dir_all(&out)?;
    let t = ds.turnover();
    let mut md = format!(
        "# Estimates\n\n{} units; links: {} pre, {} post ({} kept, {} broken, {} formed).\n\n",
        ds.n(),
        t.pre,
        t.post,
        t.kept,
        t.broken,
        t.formed
    );
    let mut csv = String::new();
    for (k, table) in tables.iter().enumerate() {
        md.push_str(&table.to_markdown());
        md.push('\n');
        let body = table.to_csv()?;
        csv.push_str(if k == 0 { &body } else { body.split_once('\n').map_or("", |x| x.1) });
    }
    print!("{md}");
    let files = vec![
        write(&out, "estimates.md", &md)?,
        write(&out, "estimates.csv", &csv)?,
        write(&out, "estimates.json", &json(&tables)?)?,
    ];
    Ok((files, None))
}

fn with_jobs<T: Send>(jobs: Option<usize>, f: impl FnOnce() -> T + Send) -> CliResult<T> {
    match jobs {
        Some(j) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(j)
                .build()
                .map_err(|e| CliError::Failure(Error::InvalidConfig(e.to_string())))?;
            Ok(pool.install(f))
        }
        None => Ok(f()),
    }
}

fn run_gen_network(s: &Settings) -> CliResult<(Vec<PathBuf>, Option<Error>)> {
    let cfg = sim_config(s)?;
    cfg.validate().map_err(usage)?;
    let out = s.out()?;
    let ds = PanelDataset::from_simulation(&cfg, 0)?;
    let files = ds.save_dir(&out)?;
    let t = ds.turnover();
    println!(
        "{} n={} q={}: {} pre links, {} post links ({} kept, {} broken, {} formed), {} treated",
        cfg.design,
        cfg.n,
        cfg.q_post,
        t.pre,
        t.post,
        t.kept,
        t.broken,
        t.formed,
        ds.t.iter().filter(|&&x| x == 1).count()
    );
    Ok((files.to_vec(), None))
}

fn run_diagnose_xi(s: &Settings) -> CliResult<(Vec<PathBuf>, Option<Error>)> {
    let design: GraphonSpec = s.get("design")?;
    let opts = XiOptions {
        reps: s.get("reps")?,
        inner_draws: s.get("inner-draws")?,
        pi: s.get("pi")?,
        seed: s.get("seed")?,
        ..XiOptions::default()
    };
    let out = s.out()?;
    let d = estimate_var_xi(&design, &opts).map_err(|e| match e {
        Error::InvalidConfig(m) => CliError::Usage(m),
        e => CliError::Failure(e),
    })?;
    fs::create_dir_all(&out)?;
    println!(
        "{design}: Var(xi) = {:.3e} (raw {:.3e}, s.e. {:.1e}), mean xi {:.4}: {}",
        d.var_xi_estimate, d.raw_estimate, d.mc_std_error, d.mean_xi, d.case_label
    );
    Ok((vec![write(&out, "xi.json", &json(&d)?)?], None))
}

/// Parses `argv` (program name first), runs the subcommand and returns the
/// process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let _ = env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).try_init();
    let argv: Vec<OsString> = argv.into_iter().map(Into::into).collect();
    let matches = match cli_command().try_get_matches_from(&argv) {
        Ok(m) => m,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    let (name, sub) = matches.subcommand().expect("subcommand required");
    let start = Instant::now();
    let result = merge(name, sub).and_then(|settings| {
        let (files, failure) = match name {
            "simulate" => run_simulate(&settings),
            "table" => run_table(&settings),
            "estimate" => run_estimate(&settings),
            "gen-network" => run_gen_network(&settings),
            "diagnose-xi" => run_diagnose_xi(&settings),
            _ => unreachable!("clap rejects unknown subcommands"),
        }?;
        let out = settings.out()?;
        let argv: Vec<String> = argv.iter().map(|a| a.to_string_lossy().into_owned()).collect();
        let manifest = write_manifest(&out, &settings, &argv, &files, start)?;
        eprintln!("wrote {} files and {}", files.len(), manifest.display());
        failure.map_or(Ok(()), |e| Err(CliError::Failure(e)))
    });
    match result {
        Ok(()) => EXIT_OK,
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            EXIT_USAGE
        }
        Err(CliError::Failure(e)) => {
            eprintln!("error: {e}");
            EXIT_FAILURE
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::estimators::EstimatorKind;

    fn settings(args: &[&str]) -> CliResult<Settings> {
        let m = cli_command().try_get_matches_from(args).map_err(usage)?;
        let (name, sub) = m.subcommand().unwrap();
        merge(name, sub)
    }

    #[test]
    fn command_definition_is_consistent() {
        cli_command().debug_assert();
    }

    #[test]
    fn flags_beat_config_beat_defaults() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = dir.path().join("c.toml");
        fs::write(&cfg, "n = 400\nreps = 7\nbeta2 = 0.25\n[simulate]\nreps = 9\nestimator = [\"ols\", \"ssiv\"]\n")
            .unwrap();
        let s = settings(&["netiv", "simulate", "--config", cfg.to_str().unwrap(), "--n", "300"]).unwrap();
        assert_eq!(s.get::<usize>("n").unwrap(), 300);
        assert_eq!(s.get::<usize>("reps").unwrap(), 9);
        assert_eq!(s.list::<EstimatorKind>("estimator").unwrap(), vec![EstimatorKind::Ols, EstimatorKind::Ssiv]);
        assert_eq!(s.get::<f64>("level").unwrap(), 0.95);
        assert_eq!(s.get_opt::<f64>("beta2").unwrap(), Some(0.25));
        assert_eq!(s.get_opt::<f64>("beta1").unwrap(), None);
    }

    #[test]
    fn unknown_config_key_is_usage_error() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = dir.path().join("c.toml");
        fs::write(&cfg, "colour = 3\n").unwrap();
        assert!(matches!(
            settings(&["netiv", "simulate", "--config", cfg.to_str().unwrap()]),
            Err(CliError::Usage(_))
        ));
    }

    #[test]
    fn exit_codes() {
        assert_eq!(run(["netiv", "simulate", "--bogus"]), EXIT_USAGE);
        assert_eq!(run(["netiv", "simulate", "--design", "nope"]), EXIT_USAGE);
        assert_eq!(run(["netiv", "--help"]), EXIT_OK);
        let dir = tempfile::tempdir().unwrap();
        let missing = dir.path().join("none.csv");
        let m = missing.to_str().unwrap();
        assert_eq!(
            run(["netiv", "estimate", "--units", m, "--pre", m, "--post", m, "--out", dir.path().to_str().unwrap()]),
            EXIT_FAILURE
        );
    }
}
