//! CSV and text artifacts. Floats are written with 17 significant digits so
//! every value reads back bit-exactly.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use rateq_core::bounds::BoundReport;
use rateq_core::sim::{AggregateResult, SlotRecord, Trajectory};

use crate::error::{CliError, Result};

pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

fn parse_f64(s: &str, path: &Path, line: u64, column: &str) -> Result<f64> {
    s.trim().parse().map_err(|_| {
        CliError::Check(format!(
            "{}:{line}: column {column}: `{s}` is not a number",
            path.display()
        ))
    })
}

fn writer(path: &Path) -> Result<csv::Writer<fs::File>> {
    csv::Writer::from_path(path).map_err(CliError::csv(path))
}

pub fn create_dir(path: &Path) -> Result<()> {
    fs::create_dir_all(path).map_err(CliError::io(path))
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(CliError::io(path))
}

pub const TRAJECTORY_HEADER: [&str; 7] =
    ["t", "rate", "ack", "arrival", "q", "q_next", "time_avg_q"];

pub fn trajectory_path(dir: &Path, seed: u64) -> PathBuf {
    dir.join("trajectories").join(format!("seed_{seed}.csv"))
}

pub fn write_trajectory(path: &Path, records: &[SlotRecord]) -> Result<()> {
    let mut w = writer(path)?;
    let err = CliError::csv;
    w.write_record(TRAJECTORY_HEADER).map_err(err(path))?;
    for r in records {
        w.write_record([
            r.t.to_string(),
            fmt_f64(r.rate),
            u8::from(r.ack).to_string(),
            fmt_f64(r.arrival),
            fmt_f64(r.q),
            fmt_f64(r.q_next),
            fmt_f64(r.time_avg_q),
        ])
        .map_err(err(path))?;
    }
    w.flush().map_err(CliError::io(path))
}

pub fn read_trajectory(path: &Path) -> Result<Vec<SlotRecord>> {
    let mut rdr = csv::Reader::from_path(path).map_err(CliError::csv(path))?;
    let header = rdr.headers().map_err(CliError::csv(path))?.clone();
    if header.iter().ne(TRAJECTORY_HEADER) {
        return Err(CliError::Check(format!(
            "{}: expected header {}",
            path.display(),
            TRAJECTORY_HEADER.join(",")
        )));
    }
    let mut out = Vec::new();
    for (i, row) in rdr.records().enumerate() {
        let row = row.map_err(CliError::csv(path))?;
        let line = i as u64 + 2;
        let f = |c: usize| parse_f64(&row[c], path, line, TRAJECTORY_HEADER[c]);
        let t = row[0].trim().parse::<u64>().map_err(|_| {
            CliError::Check(format!("{}:{line}: bad slot `{}`", path.display(), &row[0]))
        })?;
        let ack = match row[2].trim() {
            "1" => true,
            "0" => false,
            other => {
                return Err(CliError::Check(format!(
                    "{}:{line}: ack must be 0 or 1, found `{other}`",
                    path.display()
                )))
            }
        };
        out.push(SlotRecord {
            t,
            rate: f(1)?,
            ack,
            arrival: f(3)?,
            q: f(4)?,
            q_next: f(5)?,
            time_avg_q: f(6)?,
        });
    }
    Ok(out)
}

pub fn write_aggregate(path: &Path, agg: &AggregateResult, per_seed: bool) -> Result<()> {
    let mut w = writer(path)?;
    let err = CliError::csv;
    let mut header = vec!["t".to_string(), "mean_time_avg_q".into(), "se".into()];
    if per_seed {
        header.extend(agg.seeds.iter().map(|s| format!("seed_{s}")));
    }
    w.write_record(&header).map_err(err(path))?;
    for p in &agg.points {
        let mut row = vec![p.t.to_string(), fmt_f64(p.mean), fmt_f64(p.se)];
        if per_seed {
            row.extend(p.per_seed.iter().map(|&x| fmt_f64(x)));
        }
        w.write_record(&row).map_err(err(path))?;
    }
    w.flush().map_err(CliError::io(path))
}

/// One row per phase per seed; `arm_counts` is `;`-separated by level.
pub fn write_phases(path: &Path, trajectories: &[Trajectory]) -> Result<()> {
    let mut w = writer(path)?;
    let err = CliError::csv;
    w.write_record(["seed", "l", "T_l", "d_l", "slots_played", "arm_counts"])
        .map_err(err(path))?;
    for tr in trajectories {
        for ph in &tr.phases {
            let counts: Vec<String> = ph.counts.iter().map(u64::to_string).collect();
            w.write_record([
                tr.seed.to_string(),
                ph.phase.to_string(),
                ph.length.to_string(),
                ph.levels.to_string(),
                ph.counts.iter().sum::<u64>().to_string(),
                counts.join(";"),
            ])
            .map_err(err(path))?;
        }
    }
    w.flush().map_err(CliError::io(path))
}

pub fn write_bounds_csv(out: &mut dyn Write, rows: &[(f64, Vec<BoundReport>)]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let err = |e| CliError::Csv {
        path: "<stdout>".into(),
        source: e,
    };
    w.write_record(["epsilon", "bound", "value", "valid_for"])
        .map_err(err)?;
    for (eps, reports) in rows {
        for r in reports {
            w.write_record([
                fmt_f64(*eps),
                r.name.into(),
                fmt_f64(r.value),
                r.validity.into(),
            ])
            .map_err(err)?;
        }
    }
    w.flush().map_err(CliError::io("<stdout>"))
}

pub fn bounds_text(rows: &[(f64, Vec<BoundReport>)]) -> String {
    let mut s = String::new();
    s.push_str(&format!(
        "{:<24} {:<18} {:>24}  {}\n",
        "epsilon", "bound", "value", "valid for"
    ));
    for (eps, reports) in rows {
        for r in reports {
            s.push_str(&format!(
                "{:<24} {:<18} {:>24}  {}\n",
                format!("{eps}"),
                r.name,
                format!("{:.10e}", r.value),
                r.validity
            ));
        }
    }
    s
}
