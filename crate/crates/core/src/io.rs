//! Artifact formats written and read by the `polyan` binary.
//!
//! JSON artifacts share one envelope, `{schema, kind, config, data}`. CSV artifacts start
//! with two `#` comment lines carrying the schema string and the run configuration as
//! JSON, followed by a header row. Floats are printed in shortest round-trip form, so an
//! identical configuration reproduces byte-identical files.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::approx::ApproxRecord;
use crate::decompose::{CircleSamples, CoefficientTable};
use crate::dynkin::{ExtensionField, Grid2D};
use crate::error::{Error, Result};
use crate::expansion::{BlockExpansion, Certificate};
use crate::poly::{ComplexScalar, NAnalyticPoly};

/// Version tag embedded in every artifact.
pub const SCHEMA_VERSION: &str = "polyan/1";

/// Everything needed to reproduce a run.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub command: String,
    /// Command-specific flags, by name.
    pub parameters: BTreeMap<String, String>,
    pub grid: Option<usize>,
    pub tol: Option<f64>,
    pub seed: u64,
    pub out: Option<String>,
}

impl RunConfig {
    pub fn new(command: impl Into<String>) -> Self {
        RunConfig { command: command.into(), ..RunConfig::default() }
    }

    pub fn with(mut self, key: &str, value: impl ToString) -> Self {
        self.parameters.insert(key.to_string(), value.to_string());
        self
    }
}

/// JSON wrapper shared by all JSON artifacts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Envelope<T> {
    pub schema: String,
    pub kind: String,
    pub config: RunConfig,
    pub data: T,
}

pub fn write_json<T: Serialize>(mut w: impl Write, kind: &str, config: &RunConfig, data: &T) -> Result<()> {
    let env = Envelope { schema: SCHEMA_VERSION.to_string(), kind: kind.to_string(), config: config.clone(), data };
    serde_json::to_writer_pretty(&mut w, &env)?;
    w.write_all(b"\n")?;
    Ok(())
}

/// Reads an envelope and checks its schema and kind.
pub fn read_json<T: DeserializeOwned>(r: impl Read, kind: &str) -> Result<Envelope<T>> {
    let env: Envelope<T> = serde_json::from_reader(r)?;
    if env.schema != SCHEMA_VERSION {
        return Err(Error::Parse(format!("unsupported schema `{}`, expected `{SCHEMA_VERSION}`", env.schema)));
    }
    if env.kind != kind {
        return Err(Error::Parse(format!("expected a `{kind}` artifact, found `{}`", env.kind)));
    }
    Ok(env)
}

/// Creates a file (and its parent directories) for writing.
pub fn create(path: &Path) -> Result<BufWriter<File>> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(parent)?;
    }
    Ok(BufWriter::new(File::create(path)?))
}

pub fn open(path: &Path) -> Result<File> {
    Ok(File::open(path)?)
}

fn csv_writer(mut w: impl Write, config: &RunConfig, header: &[&str]) -> Result<csv::Writer<impl Write>> {
    writeln!(w, "# schema: {SCHEMA_VERSION}")?;
    writeln!(w, "# config: {}", serde_json::to_string(config)?)?;
    let mut out = csv::Writer::from_writer(w);
    out.write_record(header)?;
    Ok(out)
}

fn csv_reader(r: impl Read, header: &[&str]) -> Result<csv::Reader<impl Read>> {
    let mut rd = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(r);
    let found: Vec<String> = rd.headers()?.iter().map(str::to_string).collect();
    if found != header {
        return Err(Error::Parse(format!("expected CSV header {header:?}, found {found:?}")));
    }
    Ok(rd)
}

fn field<T: std::str::FromStr>(rec: &csv::StringRecord, i: usize) -> Result<T> {
    let raw = rec.get(i).ok_or_else(|| Error::Parse(format!("missing column {i}")))?;
    raw.trim().parse().map_err(|_| Error::Parse(format!("cannot parse `{raw}` in column {i}")))
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// Coefficient CSV: `component,power,re,im`, one row per nonzero coefficient, and a final
/// zero row at `(N-1, Q)` when needed so that the table shape survives the round trip.
pub fn write_coefficients_csv(w: impl Write, table: &CoefficientTable, config: &RunConfig) -> Result<()> {
    let mut out = csv_writer(w, config, &["component", "power", "re", "im"])?;
    let (last_p, last_q) = (table.order() - 1, table.q_max());
    let mut wrote_corner = false;
    for (p, q, c) in table.nonzero() {
        wrote_corner |= (p, q) == (last_p, last_q);
        out.write_record([p.to_string(), q.to_string(), c.re.to_string(), c.im.to_string()])?;
    }
    if !wrote_corner {
        out.write_record([last_p.to_string(), last_q.to_string(), "0".into(), "0".into()])?;
    }
    out.flush()?;
    Ok(())
}

pub fn read_coefficients_csv(r: impl Read) -> Result<CoefficientTable> {
    let mut rd = csv_reader(r, &["component", "power", "re", "im"])?;
    let mut entries: Vec<(usize, usize, ComplexScalar)> = Vec::new();
    for rec in rd.records() {
        let rec = rec?;
        entries.push((field(&rec, 0)?, field(&rec, 1)?, ComplexScalar::new(field(&rec, 2)?, field(&rec, 3)?)));
    }
    if entries.is_empty() {
        return Err(Error::Parse("coefficient file has no rows".into()));
    }
    let order = entries.iter().map(|e| e.0).max().expect("nonempty") + 1;
    let q_max = entries.iter().map(|e| e.1).max().expect("nonempty");
    let mut table = CoefficientTable::zeros(order, q_max)?;
    for (p, q, c) in entries {
        table.set(p, q, c)?;
    }
    Ok(table)
}

/// Sidecar of a sample file.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SamplesSidecar {
    pub radius: f64,
    #[serde(rename = "M")]
    pub m: usize,
}

/// Sample CSV `theta_index,re,im`; the radius goes to the sidecar.
pub fn write_samples_csv(w: impl Write, samples: &CircleSamples, config: &RunConfig) -> Result<()> {
    let mut out = csv_writer(w, config, &["theta_index", "re", "im"])?;
    for (j, v) in samples.values.iter().enumerate() {
        out.write_record([j.to_string(), v.re.to_string(), v.im.to_string()])?;
    }
    out.flush()?;
    Ok(())
}

pub fn samples_sidecar(samples: &CircleSamples) -> SamplesSidecar {
    SamplesSidecar { radius: samples.radius, m: samples.len() }
}

pub fn read_samples(csv: impl Read, sidecar: &SamplesSidecar) -> Result<CircleSamples> {
    let mut rd = csv_reader(csv, &["theta_index", "re", "im"])?;
    let mut values = vec![None; sidecar.m];
    for rec in rd.records() {
        let rec = rec?;
        let j: usize = field(&rec, 0)?;
        let slot = values
            .get_mut(j)
            .ok_or_else(|| Error::Parse(format!("theta_index {j} outside 0..{}", sidecar.m)))?;
        *slot = Some(ComplexScalar::new(field(&rec, 1)?, field(&rec, 2)?));
    }
    let values = values
        .into_iter()
        .enumerate()
        .map(|(j, v)| v.ok_or_else(|| Error::Parse(format!("missing sample {j}"))))
        .collect::<Result<Vec<_>>>()?;
    Ok(CircleSamples { radius: sidecar.radius, values })
}

/// Writes `<stem>.csv` and its sidecar `<stem>.json` into `dir`.
pub fn write_samples(dir: &Path, stem: &str, samples: &CircleSamples, config: &RunConfig) -> Result<()> {
    let mut w = create(&dir.join(format!("{stem}.csv")))?;
    write_samples_csv(&mut w, samples, config)?;
    w.flush()?;
    let mut w = create(&dir.join(format!("{stem}.json")))?;
    write_json(&mut w, "samples", config, &samples_sidecar(samples))?;
    w.flush()?;
    Ok(())
}

/// Reads every `*.csv` in `dir` with its `*.json` sidecar, sorted by increasing radius.
pub fn read_samples_dir(dir: &Path) -> Result<Vec<CircleSamples>> {
    let mut paths: Vec<_> = std::fs::read_dir(dir)?
        .map(|e| e.map(|e| e.path()))
        .collect::<std::io::Result<Vec<_>>>()?
        .into_iter()
        .filter(|p| p.extension().is_some_and(|x| x == "csv"))
        .collect();
    paths.sort();
    if paths.is_empty() {
        return Err(Error::InvalidInput(format!("no sample files in {}", dir.display())));
    }
    let mut out = paths
        .iter()
        .map(|p| {
            let sidecar: Envelope<SamplesSidecar> = read_json(open(&p.with_extension("json"))?, "samples")?;
            read_samples(open(p)?, &sidecar.data)
        })
        .collect::<Result<Vec<_>>>()?;
    out.sort_by(|a, b| a.radius.total_cmp(&b.radius));
    Ok(out)
}

/// Expansion artifact `{k, N, R, C, delta, blocks}`; the full certificate rides along.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExpansionDoc {
    pub k: f64,
    #[serde(rename = "N")]
    pub order: usize,
    #[serde(rename = "R")]
    pub r: Option<f64>,
    #[serde(rename = "C")]
    pub c: Option<f64>,
    pub delta: Option<f64>,
    pub certificate: Option<Certificate>,
    pub blocks: Vec<NAnalyticPoly>,
}

impl From<&BlockExpansion> for ExpansionDoc {
    fn from(exp: &BlockExpansion) -> Self {
        let cert = exp.cert.as_ref();
        ExpansionDoc {
            k: exp.k,
            order: exp.order,
            r: cert.map(|c| c.r),
            c: cert.map(|c| c.c),
            delta: cert.map(|c| c.delta),
            certificate: exp.cert.clone(),
            blocks: exp.blocks.clone(),
        }
    }
}

impl TryFrom<ExpansionDoc> for BlockExpansion {
    type Error = Error;
    fn try_from(doc: ExpansionDoc) -> Result<Self> {
        let mut exp = BlockExpansion::new(doc.k, doc.order, doc.blocks)?;
        exp.cert = doc.certificate;
        Ok(exp)
    }
}

/// Header of an extension-field artifact; the samples go to a CSV next to it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExtensionHeader {
    pub grid: Grid2D,
    #[serde(rename = "N")]
    pub order: usize,
    pub k: f64,
    #[serde(rename = "A")]
    pub a: f64,
    pub support_radius: f64,
    pub truncation_radius: f64,
}

impl From<&ExtensionField> for ExtensionHeader {
    fn from(f: &ExtensionField) -> Self {
        ExtensionHeader {
            grid: f.grid,
            order: f.order,
            k: f.k,
            a: f.a,
            support_radius: f.support_radius,
            truncation_radius: f.truncation_radius,
        }
    }
}

/// Field CSV `ix,iy,re,im,dbar_re,dbar_im`, row-major in `iy`.
pub fn write_extension_csv(w: impl Write, field: &ExtensionField, config: &RunConfig) -> Result<()> {
    let mut out = csv_writer(w, config, &["ix", "iy", "re", "im", "dbar_re", "dbar_im"])?;
    let m = field.grid.resolution;
    for iy in 0..m {
        for ix in 0..m {
            let (v, d) = (field.value_at(ix, iy), field.dbar_n_at(ix, iy));
            out.write_record([
                ix.to_string(),
                iy.to_string(),
                v.re.to_string(),
                v.im.to_string(),
                d.re.to_string(),
                d.im.to_string(),
            ])?;
        }
    }
    out.flush()?;
    Ok(())
}

pub fn read_extension(header: &ExtensionHeader, csv: impl Read) -> Result<ExtensionField> {
    let mut rd = csv_reader(csv, &["ix", "iy", "re", "im", "dbar_re", "dbar_im"])?;
    let m = header.grid.resolution;
    let zero = ComplexScalar::new(0.0, 0.0);
    let (mut values, mut dbar_n) = (vec![zero; m * m], vec![zero; m * m]);
    let mut seen = 0;
    for rec in rd.records() {
        let rec = rec?;
        let (ix, iy): (usize, usize) = (field(&rec, 0)?, field(&rec, 1)?);
        if ix >= m || iy >= m {
            return Err(Error::Parse(format!("node ({ix}, {iy}) outside a {m}x{m} grid")));
        }
        values[iy * m + ix] = ComplexScalar::new(field(&rec, 2)?, field(&rec, 3)?);
        dbar_n[iy * m + ix] = ComplexScalar::new(field(&rec, 4)?, field(&rec, 5)?);
        seen += 1;
    }
    if seen != m * m {
        return Err(Error::Parse(format!("expected {} nodes, found {seen}", m * m)));
    }
    Ok(ExtensionField {
        grid: header.grid,
        order: header.order,
        k: header.k,
        a: header.a,
        support_radius: header.support_radius,
        truncation_radius: header.truncation_radius,
        values,
        dbar_n,
    })
}

/// Approximation CSV `n,method,e_value,bound,flag` (empty `bound` for minimax rows).
pub fn write_approx_csv(w: impl Write, records: &[ApproxRecord], config: &RunConfig) -> Result<()> {
    let mut out = csv_writer(w, config, &["n", "method", "e_value", "bound", "flag"])?;
    for r in records {
        out.write_record([
            r.n.to_string(),
            r.method.as_str().to_string(),
            r.e_value.to_string(),
            fmt_opt(r.bound),
            r.flag.as_str().to_string(),
        ])?;
    }
    out.flush()?;
    Ok(())
}

/// One row of an approximation CSV.
#[derive(Debug, Clone, PartialEq)]
pub struct ApproxRow {
    pub n: usize,
    pub method: String,
    pub e_value: f64,
    pub bound: Option<f64>,
    pub flag: String,
}

pub fn read_approx_csv(r: impl Read) -> Result<Vec<ApproxRow>> {
    let mut rd = csv_reader(r, &["n", "method", "e_value", "bound", "flag"])?;
    rd.records()
        .map(|rec| {
            let rec = rec?;
            let bound = match rec.get(3).map(str::trim) {
                None | Some("") => None,
                Some(_) => Some(field(&rec, 3)?),
            };
            Ok(ApproxRow {
                n: field(&rec, 0)?,
                method: field(&rec, 1)?,
                e_value: field(&rec, 2)?,
                bound,
                flag: field(&rec, 4)?,
            })
        })
        .collect()
}
