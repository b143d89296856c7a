use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::config::{OutputFormat, RunConfig};
use super::pipeline::{ConvergenceRow, ConvergenceTable, SolveReport, ZScanResult, ZScanRow};
use super::svg::entropy_plot;
use crate::error::{Error, Result};

/// Column names of `zscan.csv`.
pub const ZSCAN_HEADER: &[&str] = &[
    "z",
    "inv_z",
    "state",
    "energy",
    "s_linear",
    "s_von_neumann",
    "target_weight",
    "dominant_weight",
    "ambiguous",
    "r_max",
    "box_converged",
    "l_max",
    "n_max",
    "order",
    "n_splines",
    "grid",
    "error",
];

/// Column names of `solve.csv`.
pub const SOLVE_HEADER: &[&str] = &[
    "z",
    "state",
    "l_max",
    "n_max",
    "order",
    "n_splines",
    "r_max",
    "grid",
    "dimension",
    "energy",
    "s_linear",
    "s_von_neumann",
    "xi",
    "purity",
    "target_weight",
    "dominant",
    "dominant_weight",
    "ambiguous",
];

/// Column names of `converge.csv`.
pub const CONVERGE_HEADER: &[&str] = &[
    "l_max",
    "n_max",
    "state",
    "dimension",
    "energy",
    "s_linear",
    "s_von_neumann",
    "ambiguous",
];

/// Run metadata kept apart from the results so that those stay
/// byte-identical between runs.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Metadata {
    pub program: String,
    pub version: String,
    pub unix_time: u64,
}

impl Metadata {
    pub fn now() -> Self {
        Metadata {
            program: env!("CARGO_PKG_NAME").into(),
            version: env!("CARGO_PKG_VERSION").into(),
            unix_time: std::time::SystemTime::now()
                .duration_since(std::time::UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0),
        }
    }
}

#[derive(Serialize)]
struct JsonDoc<'a, T: Serialize> {
    metadata: Metadata,
    #[serde(flatten)]
    body: &'a T,
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    File::create(path).map(BufWriter::new).map_err(|e| Error::io(path, e))
}

fn csv_err(path: &Path) -> impl Fn(csv::Error) -> Error + '_ {
    move |e| Error::Parse {
        what: path.display().to_string(),
        msg: e.to_string(),
    }
}

fn write_json<T: Serialize>(path: &Path, body: &T) -> Result<()> {
    let mut w = create(path)?;
    let doc = JsonDoc {
        metadata: Metadata::now(),
        body,
    };
    serde_json::to_writer_pretty(&mut w, &doc).map_err(|e| Error::Parse {
        what: path.display().to_string(),
        msg: e.to_string(),
    })?;
    writeln!(w).and_then(|_| w.flush()).map_err(|e| Error::io(path, e))
}

fn write_rows<T: Serialize>(path: &Path, header: &[&str], rows: &[T]) -> Result<()> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(create(path)?);
    w.write_record(header).map_err(csv_err(path))?;
    for r in rows {
        w.serialize(r).map_err(csv_err(path))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

fn prepare(config: &RunConfig) -> Result<&Path> {
    std::fs::create_dir_all(&config.out_dir).map_err(|e| Error::io(&config.out_dir, e))?;
    Ok(&config.out_dir)
}

/// Writes a zscan as `zscan.csv`, `zscan.json` and `zscan.svg`, as
/// requested by the config. Returns the paths written.
pub fn write_zscan(scan: &ZScanResult) -> Result<Vec<PathBuf>> {
    let dir = prepare(&scan.config)?;
    let mut out = Vec::new();
    if scan.config.wants(OutputFormat::Csv) {
        let p = dir.join("zscan.csv");
        write_zscan_csv(create(&p)?, &scan.rows).map_err(|e| match e {
            Error::Parse { msg, .. } => Error::Parse {
                what: p.display().to_string(),
                msg,
            },
            e => e,
        })?;
        out.push(p);
    }
    if scan.config.wants(OutputFormat::Json) {
        let p = dir.join("zscan.json");
        write_json(&p, scan)?;
        out.push(p);
    }
    if scan.config.wants(OutputFormat::Svg) {
        let p = dir.join("zscan.svg");
        std::fs::write(&p, entropy_plot(scan)).map_err(|e| Error::io(&p, e))?;
        out.push(p);
    }
    Ok(out)
}

/// CSV form of zscan rows with the documented header.
pub fn write_zscan_csv<W: Write>(out: W, rows: &[ZScanRow]) -> Result<()> {
    let err = |e: csv::Error| Error::Parse {
        what: "zscan csv".into(),
        msg: e.to_string(),
    };
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    w.write_record(ZSCAN_HEADER).map_err(err)?;
    for r in rows {
        w.serialize(r).map_err(err)?;
    }
    w.flush().map_err(|e| Error::io("zscan csv", e))
}

/// Reads rows written by [`write_zscan_csv`]; the header must match.
pub fn read_zscan_csv<R: Read>(input: R) -> Result<Vec<ZScanRow>> {
    let err = |e: csv::Error| Error::Parse {
        what: "zscan csv".into(),
        msg: e.to_string(),
    };
    let mut r = csv::Reader::from_reader(input);
    let header = r.headers().map_err(err)?.clone();
    if header.iter().ne(ZSCAN_HEADER.iter().copied()) {
        return Err(Error::Parse {
            what: "zscan csv".into(),
            msg: format!("unexpected header `{}`", header.iter().collect::<Vec<_>>().join(",")),
        });
    }
    r.deserialize().map(|row| row.map_err(err)).collect()
}

#[derive(Serialize)]
struct SolveRow<'a> {
    z: f64,
    state: String,
    l_max: u32,
    n_max: u32,
    order: usize,
    n_splines: usize,
    r_max: f64,
    grid: String,
    dimension: usize,
    energy: f64,
    s_linear: f64,
    s_von_neumann: f64,
    xi: f64,
    purity: f64,
    target_weight: f64,
    dominant: &'a str,
    dominant_weight: f64,
    ambiguous: bool,
}

/// Writes `solve.csv` (plus `spectrum.csv`, the occupation spectrum) and
/// `solve.json`. SVG is not produced for a single solve.
pub fn write_solve(report: &SolveReport) -> Result<Vec<PathBuf>> {
    let dir = prepare(&report.config)?;
    let mut out = Vec::new();
    let (b, r) = (&report.basis, &report.result);
    if report.config.wants(OutputFormat::Csv) {
        let p = dir.join("solve.csv");
        let row = SolveRow {
            z: b.z,
            state: r.state.to_string(),
            l_max: b.l_max,
            n_max: b.n_max,
            order: b.order,
            n_splines: b.n_splines,
            r_max: b.r_max,
            grid: b.grid.to_string(),
            dimension: r.dimension,
            energy: r.energy,
            s_linear: r.entropies.linear,
            s_von_neumann: r.entropies.von_neumann,
            xi: r.entropies.xi,
            purity: r.entropies.purity,
            target_weight: r.target_weight,
            dominant: &r.dominant,
            dominant_weight: r.dominant_weight,
            ambiguous: r.ambiguous,
        };
        write_rows(&p, SOLVE_HEADER, &[row])?;
        out.push(p);
        if let Some(spec) = &r.spectrum {
            let p = dir.join("spectrum.csv");
            spec.write_csv(create(&p)?)?;
            out.push(p);
        }
    }
    if report.config.wants(OutputFormat::Json) {
        let p = dir.join("solve.json");
        write_json(&p, report)?;
        out.push(p);
    }
    Ok(out)
}

/// Writes `converge.csv` and `converge.json`.
pub fn write_convergence(table: &ConvergenceTable) -> Result<Vec<PathBuf>> {
    let dir = prepare(&table.config)?;
    let mut out = Vec::new();
    if table.config.wants(OutputFormat::Csv) {
        let p = dir.join("converge.csv");
        write_rows::<ConvergenceRow>(&p, CONVERGE_HEADER, &table.rows)?;
        out.push(p);
    }
    if table.config.wants(OutputFormat::Json) {
        let p = dir.join("converge.json");
        write_json(&p, table)?;
        out.push(p);
    }
    Ok(out)
}

/// Convergence table laid out as text: one row per `n_max`, one column per
/// `l_max`, showing the chosen quantity.
pub fn format_convergence(table: &ConvergenceTable, value: impl Fn(&ConvergenceRow) -> f64) -> String {
    let mut ls: Vec<u32> = table.rows.iter().map(|r| r.l_max).collect();
    let mut ns: Vec<u32> = table.rows.iter().map(|r| r.n_max).collect();
    ls.sort_unstable();
    ls.dedup();
    ns.sort_unstable();
    ns.dedup();
    let mut s = format!("{:>6}", "n_max");
    for l in &ls {
        s.push_str(&format!(" {:>12}", format!("l_max={l}")));
    }
    s.push('\n');
    for n in &ns {
        s.push_str(&format!("{n:>6}"));
        for &l in &ls {
            match table.get(l, *n) {
                Some(r) => s.push_str(&format!(" {:>12.7}", value(r))),
                None => s.push_str(&format!(" {:>12}", "-")),
            }
        }
        s.push('\n');
    }
    s
}
