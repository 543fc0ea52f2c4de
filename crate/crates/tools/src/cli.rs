use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::commands::{self, Overrides, SimulateOptions, TableFormat, VerifyTarget};
use crate::config::parse_real;
use crate::error::{CliError, Result};
use crate::parallel::default_threads;

#[derive(Debug, Parser)]
#[command(
    name = "rateq",
    version,
    about = "Rate adaptation over an unknown capacity law"
)]
pub struct Cli {
    /// Worker threads for replications (default: all cores).
    #[arg(long, global = true, env = "RATEQ_THREADS")]
    pub threads: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run one environment/policy pair over all seeds.
    Simulate {
        #[command(flatten)]
        run: RunArgs,
        /// Add one time-average column per seed to aggregate.csv.
        #[arg(long)]
        per_seed: bool,
    },
    /// Run every (epsilon, policy) cell of the [sweep] section.
    Sweep {
        #[command(flatten)]
        run: RunArgs,
    },
    /// Check the structural claims of an environment or of a whole family.
    VerifyEnv {
        #[arg(long, required_unless_present = "epsilon", conflicts_with = "epsilon")]
        config: Option<PathBuf>,
        /// Verify the worst-case family at this slack, e.g. 1/144.
        #[arg(long, value_parser = parse_real)]
        epsilon: Option<f64>,
        #[arg(long, default_value_t = commands::default_grid_step())]
        grid_step: f64,
    },
    /// Print every closed-form bound for a list of slacks.
    Bounds {
        #[arg(long = "epsilon", required = true, value_delimiter = ',', value_parser = parse_real)]
        epsilons: Vec<f64>,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Re-run trajectory CSVs through the queue recursion.
    Replay {
        /// A simulate output directory or a single trajectory CSV.
        #[arg(long)]
        input: PathBuf,
    },
}

#[derive(Debug, Args)]
pub struct RunArgs {
    #[arg(long)]
    pub config: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    /// Comma-separated seeds, replacing the config's list.
    #[arg(long, value_delimiter = ',')]
    pub seeds: Option<Vec<u64>>,
    #[arg(long)]
    pub horizon: Option<u64>,
    /// Record every n-th slot.
    #[arg(long)]
    pub stride: Option<u64>,
}

impl RunArgs {
    fn overrides(&self) -> Overrides {
        Overrides {
            seeds: self.seeds.clone(),
            horizon: self.horizon,
            stride: self.stride,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Format {
    Csv,
    Text,
}

impl Cli {
    pub fn execute(&self, out: &mut dyn Write) -> Result<()> {
        let threads = match self.threads {
            Some(0) => return Err(CliError::Usage("--threads must be at least 1".into())),
            Some(n) => n,
            None => default_threads(),
        };
        match &self.command {
            Command::Simulate { run, per_seed } => {
                let cfg = commands::load_config(&run.config, &run.overrides())?;
                let opts = SimulateOptions {
                    out: run.out.clone(),
                    threads,
                    per_seed: *per_seed,
                };
                commands::simulate(&cfg, &opts, out)
            }
            Command::Sweep { run } => {
                let cfg = commands::load_config(&run.config, &run.overrides())?;
                commands::sweep(&cfg, &run.out, threads, out)
            }
            Command::VerifyEnv {
                config,
                epsilon,
                grid_step,
            } => {
                let target = match (config, epsilon) {
                    (_, Some(e)) => VerifyTarget::Family(*e),
                    (Some(path), None) => {
                        let cfg = crate::config::Config::load(path)?;
                        VerifyTarget::Configured(cfg.environment.ok_or_else(|| {
                            CliError::Usage(format!("{}: no [environment] section", path.display()))
                        })?)
                    }
                    (None, None) => unreachable!("clap requires one of them"),
                };
                commands::verify(&target, *grid_step, out)
            }
            Command::Bounds { epsilons, format } => {
                let format = match format {
                    Format::Csv => TableFormat::Csv,
                    Format::Text => TableFormat::Text,
                };
                commands::bounds_table(epsilons, format, out)
            }
            Command::Replay { input } => commands::replay(input, threads, out),
        }
    }
}

/// Parses `args`, runs the command and returns the process exit code.
pub fn run_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = err.write_all(text.as_bytes());
                2
            } else {
                let _ = out.write_all(text.as_bytes());
                0
            };
        }
    };
    match cli.execute(out) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

pub fn main_with<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with(args, &mut stdout.lock(), &mut stderr.lock())
}

#[cfg(test)]
mod tests {
    use std::path::{Path, PathBuf};

    use super::run_with;

    struct Output {
        code: i32,
        stdout: Vec<u8>,
        stderr: Vec<u8>,
    }

    fn rateq(args: &[&str]) -> Output {
        let (mut stdout, mut stderr) = (Vec::new(), Vec::new());
        let argv = std::iter::once("rateq").chain(args.iter().copied());
        let code = run_with(argv, &mut stdout, &mut stderr);
        Output {
            code,
            stdout,
            stderr,
        }
    }

    fn code(out: &Output) -> i32 {
        out.code
    }

    fn stdout(out: &Output) -> String {
        String::from_utf8_lossy(&out.stdout).into_owned()
    }

    const SMALL: &str = r#"schema = 1
    horizon = 3000
    seeds = [7, 8, 9]
    record_stride = 1

    [environment]
    family = "converse"
    epsilon = "1/16"
    k = 1

    [policy]
    kind = "phased-ucb"
    c = 0.5
    delta = "1/6"
    "#;

    fn write_config(dir: &Path, name: &str, text: &str) -> PathBuf {
        let path = dir.join(name);
        std::fs::write(&path, text).unwrap();
        path
    }

    #[test]
    fn simulate_then_replay() {
        let tmp = tempfile::tempdir().unwrap();
        let cfg = write_config(tmp.path(), "run.toml", SMALL);
        let out = tmp.path().join("out");
        let res = rateq(&[
            "simulate",
            "--config",
            cfg.to_str().unwrap(),
            "--out",
            out.to_str().unwrap(),
        ]);
        assert_eq!(code(&res), 0, "{}", String::from_utf8_lossy(&res.stderr));
        for f in [
            "aggregate.csv",
            "phases.csv",
            "summary.txt",
            "config.toml",
            "trajectories/seed_8.csv",
        ] {
            assert!(out.join(f).exists(), "{f} missing");
        }
        let agg = std::fs::read_to_string(out.join("aggregate.csv")).unwrap();
        assert_eq!(agg.lines().next().unwrap(), "t,mean_time_avg_q,se");
        assert_eq!(agg.lines().count(), 3001);
        let phases = std::fs::read_to_string(out.join("phases.csv")).unwrap();
        assert!(phases.starts_with("seed,l,T_l,d_l,slots_played,arm_counts\n7,1,8,"));

        let res = rateq(&["replay", "--input", out.to_str().unwrap()]);
        assert_eq!(code(&res), 0);
        assert!(stdout(&res).contains("3 seeds re-simulated bit-exactly"));

        // a flipped ACK breaks the recursion
        let path = out.join("trajectories/seed_9.csv");
        let text = std::fs::read_to_string(&path).unwrap();
        let mut lines: Vec<String> = text.lines().map(String::from).collect();
        let mut fields: Vec<String> = lines[100].split(',').map(String::from).collect();
        fields[2] = if fields[2] == "1" {
            "0".into()
        } else {
            "1".into()
        };
        lines[100] = fields.join(",");
        std::fs::write(&path, lines.join("\n") + "\n").unwrap();
        let res = rateq(&["replay", "--input", path.to_str().unwrap()]);
        assert_eq!(code(&res), 1);
    }

    #[test]
    fn overrides_apply() {
        let tmp = tempfile::tempdir().unwrap();
        let cfg = write_config(tmp.path(), "run.toml", SMALL);
        let out = tmp.path().join("out");
        let res = rateq(&[
            "simulate",
            "--config",
            cfg.to_str().unwrap(),
            "--out",
            out.to_str().unwrap(),
            "--seeds",
            "1,2",
            "--horizon",
            "100",
            "--stride",
            "10",
            "--per-seed",
            "--threads",
            "2",
        ]);
        assert_eq!(code(&res), 0);
        let agg = std::fs::read_to_string(out.join("aggregate.csv")).unwrap();
        assert_eq!(
            agg.lines().next().unwrap(),
            "t,mean_time_avg_q,se,seed_1,seed_2"
        );
        assert_eq!(agg.lines().count(), 11);
        let saved = std::fs::read_to_string(out.join("config.toml")).unwrap();
        assert!(saved.contains("horizon = 100"));
    }

    #[test]
    fn usage_and_config_errors_exit_two() {
        let tmp = tempfile::tempdir().unwrap();
        let missing = tmp.path().join("missing.toml");
        let out = tmp.path().join("out");
        let res = rateq(&[
            "simulate",
            "--config",
            missing.to_str().unwrap(),
            "--out",
            out.to_str().unwrap(),
        ]);
        assert_eq!(code(&res), 2);

        let cfg = write_config(
            tmp.path(),
            "h0.toml",
            &SMALL.replace("horizon = 3000", "horizon = 0"),
        );
        let res = rateq(&[
            "simulate",
            "--config",
            cfg.to_str().unwrap(),
            "--out",
            out.to_str().unwrap(),
        ]);
        assert_eq!(code(&res), 2);
        assert!(String::from_utf8_lossy(&res.stderr).contains("horizon"));

        let cfg = write_config(
            tmp.path(),
            "typo.toml",
            &SMALL.replace("delta =", "dleta ="),
        );
        let res = rateq(&[
            "simulate",
            "--config",
            cfg.to_str().unwrap(),
            "--out",
            out.to_str().unwrap(),
        ]);
        assert_eq!(code(&res), 2);

        assert_eq!(code(&rateq(&["frobnicate"])), 2);
        assert_eq!(code(&rateq(&["bounds", "--epsilon", "2"])), 2);
    }

    #[test]
    fn sweep_writes_one_row_per_cell() {
        let tmp = tempfile::tempdir().unwrap();
        let text = r#"schema = 1
    horizon = 2000
    seeds = [1, 2]
    record_stride = 100

    [sweep]
    epsilons = ["1/8", "1/16", "1/32"]
    policies = [{ kind = "ucb1-known-eps" }, { kind = "oracle-grid" }]
    "#;
        let cfg = write_config(tmp.path(), "sweep.toml", text);
        let out = tmp.path().join("out");
        let res = rateq(&[
            "sweep",
            "--config",
            cfg.to_str().unwrap(),
            "--out",
            out.to_str().unwrap(),
        ]);
        assert_eq!(code(&res), 0, "{}", String::from_utf8_lossy(&res.stderr));
        let csv = std::fs::read_to_string(out.join("sweep.csv")).unwrap();
        let rows: Vec<&str> = csv.lines().skip(1).collect();
        assert_eq!(rows.len(), 6);
        assert!(rows.iter().all(|r| r.contains(",pass,")));

        let empty = write_config(
            tmp.path(),
            "empty.toml",
            &text.replace(r#"["1/8", "1/16", "1/32"]"#, "[]"),
        );
        let res = rateq(&[
            "sweep",
            "--config",
            empty.to_str().unwrap(),
            "--out",
            out.to_str().unwrap(),
        ]);
        assert_eq!(code(&res), 2);
    }

    #[test]
    fn verify_env_reports_family() {
        let res = rateq(&["verify-env", "--epsilon", "1/144"]);
        assert_eq!(code(&res), 0);
        let text = stdout(&res);
        assert!(text.trim_end().ends_with("K=5, all claims pass"), "{text}");
        assert!(!text.contains("FAIL"));

        let tmp = tempfile::tempdir().unwrap();
        let cfg = write_config(tmp.path(), "run.toml", SMALL);
        let res = rateq(&["verify-env", "--config", cfg.to_str().unwrap()]);
        assert_eq!(code(&res), 0);
        assert!(stdout(&res).contains("all claims pass"));

        assert_eq!(code(&rateq(&["verify-env", "--epsilon", "1/16"])), 2);
    }

    #[test]
    fn bounds_table() {
        let res = rateq(&["bounds", "--epsilon", "1", "--format", "csv"]);
        assert_eq!(code(&res), 0);
        let text = stdout(&res);
        assert!(text.contains("tuned_bound,1.6847111000000000e7"), "{text}");

        let res = rateq(&["bounds", "--epsilon", "1/144,1/16"]);
        assert_eq!(code(&res), 0);
        let text = stdout(&res);
        assert!(text.contains("converse_horizon"));
        assert_eq!(
            text.lines().filter(|l| l.contains("lower_bound")).count(),
            1
        );
    }
}
