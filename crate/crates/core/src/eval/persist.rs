//! Result files of a grid run.
//!
//! * `config.json`: the resolved experiment spec.
//! * `realizations.csv`: `dataset,method,realization,data_seed,algo_seed,accuracy,error`,
//!   one row per (cell, realization). `accuracy` is empty for a failed
//!   realization and `error` holds the message.
//! * `summary.csv`: `dataset,method,realizations,failures,mean,std`, recomputed
//!   from `realizations.csv`.
//! * `timings.csv`: `dataset,method,wall_seconds`. Kept apart so the other
//!   files are byte-identical across runs.
//!
//! Floats are written in shortest round-trip form.

use std::collections::{HashMap, HashSet};
use std::fs::{self, File, OpenOptions};
use std::io::{BufWriter, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::par::Execution;

use super::runner::{run_dataset, CellResult, ExperimentResult, RealizationResult};
use super::spec::{ExperimentSpec, MethodSpec};

pub const CONFIG_FILE: &str = "config.json";
pub const REALIZATIONS_FILE: &str = "realizations.csv";
pub const SUMMARY_FILE: &str = "summary.csv";
pub const TIMINGS_FILE: &str = "timings.csv";

const REALIZATION_HEADER: [&str; 7] = ["dataset", "method", "realization", "data_seed", "algo_seed", "accuracy", "error"];

fn fmt_f64(v: f64) -> String {
    if v.is_nan() {
        "NaN".into()
    } else {
        format!("{v:?}")
    }
}

fn realization_rows(cell: &CellResult) -> impl Iterator<Item = [String; 7]> + '_ {
    cell.realizations.iter().map(move |r| {
        [
            cell.dataset.clone(),
            cell.method.clone(),
            r.realization.to_string(),
            r.data_seed.to_string(),
            r.algo_seed.to_string(),
            r.accuracy.map(fmt_f64).unwrap_or_default(),
            r.error.clone().unwrap_or_default(),
        ]
    })
}

pub fn write_realizations<W: Write>(cells: &[CellResult], w: W) -> Result<()> {
    let mut wr = csv::Writer::from_writer(w);
    wr.write_record(REALIZATION_HEADER)?;
    for c in cells {
        for row in realization_rows(c) {
            wr.write_record(&row)?;
        }
    }
    wr.flush()?;
    Ok(())
}

pub fn write_summary<W: Write>(cells: &[CellResult], w: W) -> Result<()> {
    let mut wr = csv::Writer::from_writer(w);
    wr.write_record(["dataset", "method", "realizations", "failures", "mean", "std"])?;
    for c in cells {
        wr.write_record([
            c.dataset.clone(),
            c.method.clone(),
            c.realizations.len().to_string(),
            c.failures().to_string(),
            fmt_f64(c.mean()),
            fmt_f64(c.std()),
        ])?;
    }
    wr.flush()?;
    Ok(())
}

pub fn write_timings<W: Write>(cells: &[CellResult], w: W) -> Result<()> {
    let mut wr = csv::Writer::from_writer(w);
    wr.write_record(["dataset", "method", "wall_seconds"])?;
    for c in cells {
        wr.write_record([c.dataset.clone(), c.method.clone(), format!("{:.6}", c.wall_seconds)])?;
    }
    wr.flush()?;
    Ok(())
}

fn bad(detail: impl Into<String>) -> Error {
    Error::Format {
        what: "realizations file",
        detail: detail.into(),
    }
}

/// Cells in file order; wall times are zero.
pub fn read_realizations<R: std::io::Read>(r: R) -> Result<Vec<CellResult>> {
    parse_realizations(r, true)
}

/// With `strict = false`, stops quietly at the first malformed row (a torn
/// write) and returns what came before it.
fn parse_realizations<R: std::io::Read>(r: R, strict: bool) -> Result<Vec<CellResult>> {
    let mut rd = csv::Reader::from_reader(r);
    if rd.headers()?.iter().ne(REALIZATION_HEADER) {
        return Err(bad(format!("unexpected header {:?}", rd.headers()?)));
    }
    let mut cells: Vec<CellResult> = Vec::new();
    for rec in rd.records() {
        match parse_row(rec) {
            Ok((dataset, method, row)) => match cells.last_mut() {
                Some(c) if c.dataset == dataset && c.method == method => c.realizations.push(row),
                _ => cells.push(CellResult {
                    dataset,
                    method,
                    realizations: vec![row],
                    wall_seconds: 0.0,
                }),
            },
            Err(e) if strict => return Err(e),
            Err(_) => break,
        }
    }
    Ok(cells)
}

fn parse_row(rec: csv::Result<csv::StringRecord>) -> Result<(String, String, RealizationResult)> {
    let rec = rec?;
    let field = |i: usize| rec.get(i).unwrap_or("");
    let num = |i: usize| field(i).parse::<u64>().map_err(|e| bad(format!("{:?}: {e}", field(i))));
    let accuracy = match field(5) {
        "" => None,
        s => Some(s.parse::<f64>().map_err(|e| bad(format!("{s:?}: {e}")))?),
    };
    let error = Some(field(6).to_string()).filter(|s| !s.is_empty());
    if accuracy.is_none() && error.is_none() {
        return Err(bad("row has neither accuracy nor error"));
    }
    let row = RealizationResult {
        realization: num(2)? as usize,
        data_seed: num(3)?,
        algo_seed: num(4)?,
        accuracy,
        error,
    };
    Ok((field(0).to_string(), field(1).to_string(), row))
}

fn read_timings(path: &Path) -> Result<HashMap<(String, String), f64>> {
    let mut out = HashMap::new();
    if !path.exists() {
        return Ok(out);
    }
    let mut rd = csv::Reader::from_path(path)?;
    for rec in rd.records() {
        let rec = rec?;
        if let (Some(d), Some(m), Some(t)) = (rec.get(0), rec.get(1), rec.get(2)) {
            out.insert((d.to_string(), m.to_string()), t.parse().unwrap_or(0.0));
        }
    }
    Ok(out)
}

fn write_file(path: &Path, f: impl FnOnce(&mut BufWriter<File>) -> Result<()>) -> Result<()> {
    let tmp = path.with_extension("tmp");
    let file = File::create(&tmp).map_err(|e| Error::file(&tmp, e))?;
    let mut w = BufWriter::new(file);
    f(&mut w)?;
    w.flush().map_err(|e| Error::file(&tmp, e))?;
    drop(w);
    fs::rename(&tmp, path).map_err(|e| Error::file(path, e))
}

/// Run the grid, writing into `dir`. Cells already complete in `dir` (from
/// an interrupted run of the same config) are kept and skipped. Each dataset
/// cell's rows are appended as soon as it finishes. On return the files
/// hold every cell in config order.
pub fn run_grid_to_dir(
    spec: &ExperimentSpec,
    dir: impl AsRef<Path>,
    exec: Execution,
    mut progress: impl FnMut(&CellResult),
) -> Result<ExperimentResult> {
    spec.validate()?;
    let dir = dir.as_ref();
    fs::create_dir_all(dir).map_err(|e| Error::file(dir, e))?;

    let config = spec.to_json()? + "\n";
    let config_path = dir.join(CONFIG_FILE);
    if config_path.exists() {
        let old = fs::read_to_string(&config_path).map_err(|e| Error::file(&config_path, e))?;
        if old != config {
            return Err(Error::param(format!(
                "{} holds results of a different config; use an empty output directory",
                dir.display()
            )));
        }
    } else {
        write_file(&config_path, |w| Ok(w.write_all(config.as_bytes())?))?;
    }

    let real_path = dir.join(REALIZATIONS_FILE);
    let timing_path = dir.join(TIMINGS_FILE);
    let expected: HashSet<(String, String)> = spec
        .datasets
        .iter()
        .flat_map(|d| spec.methods.iter().map(move |m| (d.key(), m.name.clone())))
        .collect();
    let mut done: HashMap<(String, String), CellResult> = HashMap::new();
    if real_path.exists() {
        let file = File::open(&real_path).map_err(|e| Error::file(&real_path, e))?;
        // Everything before a torn final row is kept.
        let old = parse_realizations(file, false)?;
        let timings = read_timings(&timing_path)?;
        for mut c in old {
            let key = (c.dataset.clone(), c.method.clone());
            let complete = c.realizations.len() == spec.realizations
                && c.realizations.iter().enumerate().all(|(i, r)| r.realization == i);
            if complete && expected.contains(&key) {
                c.wall_seconds = timings.get(&key).copied().unwrap_or(0.0);
                done.insert(key, c);
            }
        }
    }
    // Keep only complete cells, then append.
    let kept: Vec<CellResult> = spec
        .datasets
        .iter()
        .flat_map(|d| spec.methods.iter().map(move |m| (d.key(), m.name.clone())))
        .filter_map(|k| done.get(&k).cloned())
        .collect();
    write_file(&real_path, |w| write_realizations(&kept, w))?;
    write_file(&timing_path, |w| write_timings(&kept, w))?;

    for cell in &spec.datasets {
        let key = cell.key();
        let pending: Vec<&MethodSpec> = spec
            .methods
            .iter()
            .filter(|m| !done.contains_key(&(key.clone(), m.name.clone())))
            .collect();
        if pending.is_empty() {
            continue;
        }
        let results = run_dataset(spec, cell, &pending, exec);
        append(&real_path, &timing_path, &results)?;
        for c in results {
            progress(&c);
            done.insert((c.dataset.clone(), c.method.clone()), c);
        }
    }

    let cells: Vec<CellResult> = spec
        .datasets
        .iter()
        .flat_map(|d| spec.methods.iter().map(move |m| (d.key(), m.name.clone())))
        .map(|k| done.remove(&k).expect("every cell ran"))
        .collect();
    write_file(&real_path, |w| write_realizations(&cells, w))?;
    write_file(&dir.join(SUMMARY_FILE), |w| write_summary(&cells, w))?;
    write_file(&timing_path, |w| write_timings(&cells, w))?;
    Ok(ExperimentResult { cells })
}

fn append(real_path: &Path, timing_path: &Path, cells: &[CellResult]) -> Result<()> {
    let open = |p: &Path| OpenOptions::new().append(true).open(p).map_err(|e| Error::file(p, e));
    let mut wr = csv::Writer::from_writer(BufWriter::new(open(real_path)?));
    for c in cells {
        for row in realization_rows(c) {
            wr.write_record(&row)?;
        }
    }
    wr.flush()?;
    let mut wr = csv::Writer::from_writer(BufWriter::new(open(timing_path)?));
    for c in cells {
        wr.write_record([c.dataset.clone(), c.method.clone(), format!("{:.6}", c.wall_seconds)])?;
    }
    wr.flush()?;
    Ok(())
}
