//! File formats: versioned JSON for graphs, databases and cases; CSV for
//! result rows, sample distributions and ratio histograms.
//!
//! Every JSON document carries a top-level `"schema_version"`. Writes go to a
//! temporary file in the destination directory that is then renamed over the
//! target, so readers never observe a partial file.

use std::fs;
use std::io::Write;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::WeightedGraph;
use crate::gw::HISTOGRAM_BINS;
use crate::maxcut::CutAssignment;
use crate::powerflow::PowerFlowCase;
use crate::simulator::SampleDistribution;
use crate::transfer::Database;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
struct Versioned<T> {
    schema_version: u32,
    #[serde(flatten)]
    payload: T,
}

#[derive(Deserialize)]
struct Header {
    schema_version: Option<u32>,
}

fn json_error(path: &Path, text: &str, e: &serde_json::Error) -> Error {
    let (line, column) = (e.line(), e.column());
    let offset = text
        .split_inclusive('\n')
        .take(line.saturating_sub(1))
        .map(str::len)
        .sum::<usize>()
        + column.saturating_sub(1);
    Error::Json {
        path: path.to_path_buf(),
        offset,
        line,
        column,
        message: e.to_string(),
    }
}

/// Parses a versioned document; `path` is only used in error messages.
pub fn from_json_str<T: DeserializeOwned>(text: &str, path: &Path) -> Result<T> {
    let header: Header = serde_json::from_str(text).map_err(|e| json_error(path, text, &e))?;
    match header.schema_version {
        Some(SCHEMA_VERSION) => {}
        Some(found) => {
            return Err(Error::SchemaVersion {
                path: path.to_path_buf(),
                expected: SCHEMA_VERSION,
                found,
            })
        }
        None => {
            return Err(Error::InvalidInput(format!(
                "{}: missing schema_version (expected {SCHEMA_VERSION})",
                path.display()
            )))
        }
    }
    let doc: Versioned<T> = serde_json::from_str(text).map_err(|e| json_error(path, text, &e))?;
    Ok(doc.payload)
}

pub fn to_json_string<T: Serialize>(value: &T) -> Result<String> {
    let doc = Versioned {
        schema_version: SCHEMA_VERSION,
        payload: value,
    };
    serde_json::to_string_pretty(&doc).map_err(|e| Error::InvalidInput(format!("cannot serialize: {e}")))
}

pub fn read_json<T: DeserializeOwned>(path: impl AsRef<Path>) -> Result<T> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    from_json_str(&text, path)
}

pub fn write_json<T: Serialize>(path: impl AsRef<Path>, value: &T) -> Result<()> {
    let mut text = to_json_string(value)?;
    text.push('\n');
    write_atomic(path.as_ref(), text.as_bytes())
}

/// Writes `bytes` to a sibling temporary file and renames it over `path`.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| Error::io(dir, e))?;
    tmp.write_all(bytes).map_err(|e| Error::io(tmp.path(), e))?;
    tmp.as_file().sync_all().map_err(|e| Error::io(tmp.path(), e))?;
    tmp.persist(path).map_err(|e| Error::io(path, e.error))?;
    Ok(())
}

pub fn read_graph(path: impl AsRef<Path>) -> Result<WeightedGraph> {
    read_json(path)
}

pub fn write_graph(path: impl AsRef<Path>, g: &WeightedGraph) -> Result<()> {
    write_json(path, g)
}

pub fn read_database(path: impl AsRef<Path>) -> Result<Database> {
    read_json(path)
}

pub fn write_database(path: impl AsRef<Path>, db: &Database) -> Result<()> {
    write_json(path, db)
}

pub fn read_case(path: impl AsRef<Path>) -> Result<PowerFlowCase> {
    read_json(path)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Method {
    #[serde(rename = "transfer")]
    Transfer,
    #[serde(rename = "transfer+refine")]
    TransferRefine,
    #[serde(rename = "random")]
    Random,
    #[serde(rename = "gw")]
    Gw,
    #[serde(rename = "noisy")]
    Noisy,
}

/// One line of a campaign result CSV. Columns appear in field order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub graph_ref: String,
    pub density: f64,
    pub p: usize,
    pub method: Method,
    pub mean_ratio: f64,
    pub best_ratio: f64,
    pub shots: u64,
    pub seed: u64,
    /// Seconds.
    pub wall_time: f64,
}

pub const RESULT_COLUMNS: [&str; 9] = [
    "graph_ref",
    "density",
    "p",
    "method",
    "mean_ratio",
    "best_ratio",
    "shots",
    "seed",
    "wall_time",
];

fn csv_bytes<R: Serialize>(rows: impl IntoIterator<Item = R>, header: Option<&[&str]>) -> Result<Vec<u8>> {
    let mut w = csv::WriterBuilder::new()
        .has_headers(header.is_none())
        .from_writer(Vec::new());
    if let Some(h) = header {
        w.write_record(h)?;
    }
    for row in rows {
        w.serialize(row)?;
    }
    w.into_inner()
        .map_err(|e| Error::InvalidInput(format!("cannot finish CSV: {e}")))
}

pub fn results_csv_string(rows: &[ResultRow]) -> Result<String> {
    Ok(String::from_utf8(csv_bytes(rows, None)?).expect("CSV output is UTF-8"))
}

pub fn write_results_csv(path: impl AsRef<Path>, rows: &[ResultRow]) -> Result<()> {
    let bytes = if rows.is_empty() {
        format!("{}\n", RESULT_COLUMNS.join(",")).into_bytes()
    } else {
        csv_bytes(rows, None)?
    };
    write_atomic(path.as_ref(), &bytes)
}

pub fn read_results_csv(path: impl AsRef<Path>) -> Result<Vec<ResultRow>> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_results_csv(&text)
}

pub fn parse_results_csv(text: &str) -> Result<Vec<ResultRow>> {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    let header: Vec<String> = r.headers()?.iter().map(String::from).collect();
    if header != RESULT_COLUMNS {
        return Err(Error::InvalidInput(format!("unexpected result columns {header:?}")));
    }
    Ok(r.deserialize().collect::<std::result::Result<_, _>>()?)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutcomeRow {
    pub outcome: u64,
    pub bitstring: String,
    pub count: u64,
    pub probability: f64,
}

/// Rows of a sampled distribution in increasing outcome order.
pub fn outcome_rows(dist: &SampleDistribution) -> Vec<OutcomeRow> {
    dist.counts
        .iter()
        .map(|(&k, &c)| OutcomeRow {
            outcome: k,
            bitstring: CutAssignment::from_index(k, dist.n).bitstring(),
            count: c,
            probability: c as f64 / dist.n_shots as f64,
        })
        .collect()
}

/// `outcome,bitstring,count,probability`, one row per observed outcome.
pub fn write_histogram_csv(path: impl AsRef<Path>, dist: &SampleDistribution) -> Result<()> {
    write_atomic(path.as_ref(), &csv_bytes(outcome_rows(dist), None)?)
}

/// Ratio histograms side by side: `bin_lo,bin_hi,<name>...`, one row per
/// 0.01-wide bin, each column holding the fraction of that series in the bin.
pub fn ratio_histograms_csv(series: &[(&str, &[u64])]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["bin_lo".to_string(), "bin_hi".to_string()];
    header.extend(series.iter().map(|s| s.0.to_string()));
    w.write_record(&header)?;
    let totals: Vec<f64> = series.iter().map(|s| s.1.iter().sum::<u64>().max(1) as f64).collect();
    for b in 0..HISTOGRAM_BINS {
        let width = 1.0 / HISTOGRAM_BINS as f64;
        let mut row = vec![(b as f64 * width).to_string(), ((b + 1) as f64 * width).to_string()];
        row.extend(
            series
                .iter()
                .zip(&totals)
                .map(|(s, t)| (s.1.get(b).copied().unwrap_or(0) as f64 / t).to_string()),
        );
        w.write_record(&row)?;
    }
    let bytes = w
        .into_inner()
        .map_err(|e| Error::InvalidInput(format!("cannot finish CSV: {e}")))?;
    Ok(String::from_utf8(bytes).expect("CSV output is UTF-8"))
}

pub fn write_ratio_histograms_csv(path: impl AsRef<Path>, series: &[(&str, &[u64])]) -> Result<()> {
    write_atomic(path.as_ref(), ratio_histograms_csv(series)?.as_bytes())
}
