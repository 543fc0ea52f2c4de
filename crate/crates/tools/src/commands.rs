use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use rateq_core::bounds::{self, bound_table};
use rateq_core::dists::{make_environment, verify_env, ConverseFamily, EnvSpec, DEFAULT_GRID_STEP};
use rateq_core::sim::{aggregate, SlotRecord, Trajectory};

use crate::config::{Config, EnvironmentConfig, PolicyConfig};
use crate::error::{CliError, Result};
use crate::output::{self, fmt_f64};
use crate::parallel;

/// Command-line overrides applied on top of a loaded config.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub seeds: Option<Vec<u64>>,
    pub horizon: Option<u64>,
    pub stride: Option<u64>,
}

impl Overrides {
    pub fn apply(&self, cfg: &mut Config) -> Result<()> {
        if let Some(s) = &self.seeds {
            cfg.seeds = s.clone();
        }
        if let Some(h) = self.horizon {
            cfg.horizon = h;
        }
        if let Some(s) = self.stride {
            cfg.record_stride = s;
        }
        cfg.validate().map_err(CliError::Usage)
    }
}

pub fn load_config(path: &Path, overrides: &Overrides) -> Result<Config> {
    let mut cfg = Config::load(path)?;
    overrides.apply(&mut cfg)?;
    Ok(cfg)
}

#[derive(Debug, Clone)]
pub struct SimulateOptions {
    pub out: PathBuf,
    pub threads: usize,
    pub per_seed: bool,
}

/// Runs every seed of `cfg` and writes `aggregate.csv`, `trajectories/`,
/// `phases.csv` (phased policies only), `summary.txt` and `config.toml`.
pub fn simulate(cfg: &Config, opts: &SimulateOptions, log: &mut dyn Write) -> Result<()> {
    let env_cfg = cfg
        .environment
        .as_ref()
        .ok_or_else(|| CliError::Usage("config has no [environment] section".into()))?;
    let policy_cfg = cfg
        .policy
        .as_ref()
        .ok_or_else(|| CliError::Usage("config has no [policy] section".into()))?;
    let env = env_cfg.build()?;
    let spec = policy_cfg.resolve(&env)?;
    let sim = cfg.sim_config()?;
    let trajectories = parallel::replicate(&env, &spec, &sim, &cfg.seeds, opts.threads)?;
    for tr in &trajectories {
        tr.replay()?;
    }
    let agg = aggregate(&trajectories)?;

    output::create_dir(&opts.out.join("trajectories"))?;
    output::write_aggregate(&opts.out.join("aggregate.csv"), &agg, opts.per_seed)?;
    for tr in &trajectories {
        output::write_trajectory(&output::trajectory_path(&opts.out, tr.seed), &tr.records)?;
    }
    if trajectories.iter().any(|t| !t.phases.is_empty()) {
        output::write_phases(&opts.out.join("phases.csv"), &trajectories)?;
    }
    output::write_text(&opts.out.join("config.toml"), &cfg.to_toml())?;

    let last = agg.last().expect("horizon >= 1");
    let mut s = String::new();
    let _ = writeln!(s, "environment = {}", env_cfg.describe());
    let _ = writeln!(s, "lambda = {}", fmt_f64(env.lambda));
    let _ = writeln!(s, "g_star = {}", fmt_f64(env.g_star));
    let _ = writeln!(s, "slack = {}", fmt_f64(env.slack));
    let _ = writeln!(s, "policy = {}", policy_cfg.name());
    let _ = writeln!(s, "resolved_policy = {spec:?}");
    let _ = writeln!(s, "horizon = {}", cfg.horizon);
    let _ = writeln!(s, "seeds = {}", cfg.seeds.len());
    let _ = writeln!(s, "mean_time_avg_q = {}", fmt_f64(last.mean));
    let _ = writeln!(s, "se = {}", fmt_f64(last.se));
    for tr in &trajectories {
        let _ = writeln!(
            s,
            "seed {}: time_avg_q = {}, max_q = {}, final_q = {}",
            tr.seed,
            fmt_f64(tr.summary.time_avg_q),
            fmt_f64(tr.summary.max_q),
            fmt_f64(tr.summary.final_q)
        );
    }
    output::write_text(&opts.out.join("summary.txt"), &s)?;
    writeln!(
        log,
        "{} on {}: mean time-average queue at H={} is {:.6} (se {:.3e}) over {} seeds; wrote {}",
        policy_cfg.name(),
        env_cfg.describe(),
        cfg.horizon,
        last.mean,
        last.se,
        cfg.seeds.len(),
        opts.out.display()
    )
    .map_err(CliError::io("<stdout>"))
}

pub const SWEEP_HEADER: [&str; 13] = [
    "epsilon",
    "k",
    "policy",
    "horizon",
    "seeds",
    "mean_time_avg_q",
    "se",
    "known_eps_bound",
    "tuned_bound",
    "tuned_limit",
    "lower_bound",
    "within_known_eps_bound",
    "resolved_policy",
];

/// One row per `(epsilon, policy)` cell of `[sweep]`, written to `sweep.csv`.
pub fn sweep(cfg: &Config, out: &Path, threads: usize, log: &mut dyn Write) -> Result<()> {
    let sw = cfg
        .sweep
        .as_ref()
        .ok_or_else(|| CliError::Usage("config has no [sweep] section".into()))?;
    if sw.k == 0 {
        return Err(CliError::Usage("sweep.k must be at least 1".into()));
    }
    let mut cells = Vec::new();
    let mut labels: Vec<(f64, &PolicyConfig)> = Vec::new();
    for e in &sw.epsilons {
        let epsilon = e
            .value()
            .map_err(|m| CliError::Usage(format!("sweep.epsilons: {m}")))?;
        let env = make_environment(&EnvSpec::Converse { epsilon, k: sw.k })?;
        for p in &sw.policies {
            let spec = p.resolve(&env)?;
            cells.push((env.clone(), spec));
            labels.push((epsilon, p));
        }
    }
    let sim = cfg.sim_config()?;
    let results = parallel::run_cells(&cells, &sim, &cfg.seeds, threads)?;

    output::create_dir(out)?;
    let path = out.join("sweep.csv");
    let mut w = csv::Writer::from_path(&path).map_err(CliError::csv(&path))?;
    w.write_record(SWEEP_HEADER).map_err(CliError::csv(&path))?;
    let mut failed = 0;
    for ((trs, (epsilon, p)), (_, spec)) in results.iter().zip(&labels).zip(&cells) {
        for tr in trs {
            tr.replay()?;
        }
        let agg = aggregate(trs)?;
        let last = agg.last().expect("horizon >= 1");
        let known = bounds::known_eps_bound(*epsilon)?;
        let within = last.mean <= known;
        failed += usize::from(!within);
        let lower = bounds::lower_bound(*epsilon)
            .map(fmt_f64)
            .unwrap_or_default();
        w.write_record([
            fmt_f64(*epsilon),
            sw.k.to_string(),
            p.name().to_string(),
            cfg.horizon.to_string(),
            cfg.seeds.len().to_string(),
            fmt_f64(last.mean),
            fmt_f64(last.se),
            fmt_f64(known),
            fmt_f64(bounds::tuned_bound(*epsilon)?),
            fmt_f64(bounds::tuned_limit(*epsilon)?),
            lower,
            if within { "pass" } else { "fail" }.to_string(),
            format!("{spec:?}"),
        ])
        .map_err(CliError::csv(&path))?;
    }
    w.flush().map_err(CliError::io(&path))?;
    output::write_text(&out.join("config.toml"), &cfg.to_toml())?;
    writeln!(
        log,
        "{} cells x {} seeds; {} above known_eps_bound; wrote {}",
        cells.len(),
        cfg.seeds.len(),
        failed,
        path.display()
    )
    .map_err(CliError::io("<stdout>"))
}

/// What `verify-env` checks.
#[derive(Debug, Clone)]
pub enum VerifyTarget {
    /// The whole worst-case family at this slack: construction claims, then
    /// every environment `0..=K`.
    Family(f64),
    Configured(EnvironmentConfig),
}

/// Prints one line per check. Fails with a check error if any check fails.
pub fn verify(target: &VerifyTarget, grid_step: f64, log: &mut dyn Write) -> Result<()> {
    let io = CliError::io("<stdout>");
    let mut lines = String::new();
    let mut failures = 0usize;
    let mut report = |scope: &str, name: &str, passed: bool, detail: &str| {
        failures += usize::from(!passed);
        let _ = writeln!(
            lines,
            "{} {scope} {name}: {detail}",
            if passed { "PASS" } else { "FAIL" }
        );
    };
    let summary = match target {
        VerifyTarget::Family(epsilon) => {
            let fam = ConverseFamily::new(*epsilon)?;
            for c in fam.check_claims() {
                report("family", c.name, c.passed, &c.detail);
            }
            for k in 0..=fam.k_max() {
                let env = make_environment(&EnvSpec::Converse {
                    epsilon: *epsilon,
                    k,
                })?;
                let r = verify_env(&env, grid_step)?;
                for c in &r.checks {
                    report(&format!("env{k}"), c.name, c.passed, &c.detail);
                }
            }
            format!("K={}", fam.k_max())
        }
        VerifyTarget::Configured(env_cfg) => {
            let env = env_cfg.build()?;
            let r = verify_env(&env, grid_step)?;
            for c in &r.checks {
                report("env", c.name, c.passed, &c.detail);
            }
            if let EnvSpec::Converse { epsilon, .. } = env_cfg.spec()? {
                if epsilon <= 1.0 / 144.0 {
                    for c in ConverseFamily::new(epsilon)?.check_claims() {
                        report("family", c.name, c.passed, &c.detail);
                    }
                }
            }
            format!(
                "{}: g* = {:.12} at r* = {:.12}, slack = {:.6e}",
                env_cfg.describe(),
                env.g_star,
                env.r_star,
                env.slack
            )
        }
    };
    log.write_all(lines.as_bytes()).map_err(io)?;
    if failures == 0 {
        writeln!(log, "{summary}, all claims pass").map_err(CliError::io("<stdout>"))?;
        Ok(())
    } else {
        writeln!(log, "{summary}, {failures} checks failed").map_err(CliError::io("<stdout>"))?;
        Err(CliError::Check(format!(
            "{failures} environment checks failed"
        )))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TableFormat {
    Csv,
    Text,
}

pub fn bounds_table(epsilons: &[f64], format: TableFormat, out: &mut dyn Write) -> Result<()> {
    if epsilons.is_empty() {
        return Err(CliError::Usage("no epsilon given".into()));
    }
    let rows = epsilons
        .iter()
        .map(|&e| Ok((e, bound_table(e)?)))
        .collect::<Result<Vec<_>>>()?;
    match format {
        TableFormat::Csv => output::write_bounds_csv(out, &rows),
        TableFormat::Text => out
            .write_all(output::bounds_text(&rows).as_bytes())
            .map_err(CliError::io("<stdout>")),
    }
}

fn same_bits(a: &[SlotRecord], b: &[SlotRecord]) -> bool {
    a.len() == b.len()
        && a.iter().zip(b).all(|(x, y)| {
            x.t == y.t
                && x.ack == y.ack
                && [x.rate, x.arrival, x.q, x.q_next, x.time_avg_q]
                    .iter()
                    .zip([y.rate, y.arrival, y.q, y.q_next, y.time_avg_q])
                    .all(|(u, v)| u.to_bits() == v.to_bits())
        })
}

fn seed_of(path: &Path) -> Option<u64> {
    path.file_stem()?
        .to_str()?
        .strip_prefix("seed_")?
        .parse()
        .ok()
}

/// Replays trajectory CSVs through the queue recursion. `input` is one CSV
/// or a `simulate` output directory; for a directory with `config.toml` each
/// seed is also re-simulated and compared bit for bit.
pub fn replay(input: &Path, threads: usize, log: &mut dyn Write) -> Result<()> {
    let (files, config) = if input.is_dir() {
        let dir = input.join("trajectories");
        let mut files: Vec<PathBuf> = std::fs::read_dir(&dir)
            .map_err(CliError::io(&dir))?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.extension().is_some_and(|x| x == "csv"))
            .collect();
        files.sort();
        let cfg_path = input.join("config.toml");
        let cfg = if cfg_path.exists() {
            Some(Config::load(&cfg_path)?)
        } else {
            None
        };
        (files, cfg)
    } else {
        (vec![input.to_owned()], None)
    };
    if files.is_empty() {
        return Err(CliError::Usage(format!(
            "no trajectory CSVs under {}",
            input.display()
        )));
    }
    let mut rows = 0usize;
    let mut recorded = Vec::new();
    for f in &files {
        let records = output::read_trajectory(f)?;
        rateq_core::sim::replay_rows(&records)
            .map_err(|e| CliError::Check(format!("{}: {e}", f.display())))?;
        rows += records.len();
        recorded.push((f, records));
    }
    let mut resimulated = 0;
    if let Some(cfg) = config {
        let env_cfg = cfg
            .environment
            .as_ref()
            .ok_or_else(|| CliError::Usage("config.toml has no [environment]".into()))?;
        let env = env_cfg.build()?;
        let spec = cfg
            .policy
            .as_ref()
            .ok_or_else(|| CliError::Usage("config.toml has no [policy]".into()))?
            .resolve(&env)?;
        let seeds: Vec<u64> = recorded
            .iter()
            .map(|(f, _)| {
                seed_of(f).ok_or_else(|| {
                    CliError::Usage(format!("{}: file name is not seed_<n>.csv", f.display()))
                })
            })
            .collect::<Result<_>>()?;
        let fresh: Vec<Trajectory> =
            parallel::replicate(&env, &spec, &cfg.sim_config()?, &seeds, threads)?;
        for ((f, rec), tr) in recorded.iter().zip(&fresh) {
            if !same_bits(rec, &tr.records) {
                return Err(CliError::Check(format!(
                    "{}: re-simulation of seed {} differs from the recorded rows",
                    f.display(),
                    tr.seed
                )));
            }
        }
        resimulated = fresh.len();
    }
    writeln!(
        log,
        "replayed {rows} rows from {} files; {resimulated} seeds re-simulated bit-exactly",
        files.len()
    )
    .map_err(CliError::io("<stdout>"))
}

pub fn default_grid_step() -> f64 {
    DEFAULT_GRID_STEP
}
