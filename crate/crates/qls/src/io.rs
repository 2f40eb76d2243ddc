//! Output files: atomic writes, CSV tables, manifests and input loaders.

use std::io::Write;
use std::path::{Path, PathBuf};

use qls_core::metrology::{BudgetRow, CombLock, Ion, MeasurementSet, RowKind};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

/// Writes `bytes` to `dir/name` through a temporary file in the same
/// directory, so readers never see a partial file.
pub fn write_atomic(dir: &Path, name: &str, bytes: &[u8]) -> CliResult<PathBuf> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    let path = dir.join(name);
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| CliError::io(dir, e))?;
    tmp.write_all(bytes).map_err(|e| CliError::io(&path, e))?;
    tmp.as_file().sync_all().map_err(|e| CliError::io(&path, e))?;
    tmp.persist(&path).map_err(|e| CliError::io(&path, e.error))?;
    Ok(path)
}

/// Formats a float so that identical values always give identical text.
pub fn num(v: f64) -> String {
    if v == 0.0 {
        "0".into()
    } else {
        format!("{v:.12e}")
    }
}

/// An in-memory CSV table with a unit-bearing header.
#[derive(Debug, Clone)]
pub struct Table {
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Self {
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn to_bytes(&self) -> CliResult<Vec<u8>> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let err = |e| CliError::csv("<table>", e);
        w.write_record(&self.header).map_err(err)?;
        for r in &self.rows {
            w.write_record(r).map_err(err)?;
        }
        w.into_inner()
            .map_err(|e| CliError::io("<table>", std::io::Error::other(e.to_string())))
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Manifest<'a> {
    pub tool: &'a str,
    pub version: &'a str,
    pub subcommand: &'a str,
    pub seed: u64,
    pub config_sha256: String,
    pub files: Vec<String>,
}

impl Manifest<'_> {
    pub fn render(&self) -> String {
        let mut s = String::new();
        s.push_str(&format!("tool {}\n", self.tool));
        s.push_str(&format!("version {}\n", self.version));
        s.push_str(&format!("subcommand {}\n", self.subcommand));
        s.push_str(&format!("seed {}\n", self.seed));
        s.push_str(&format!("config_sha256 {}\n", self.config_sha256));
        for f in &self.files {
            s.push_str(&format!("file {f}\n"));
        }
        s
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct BudgetRecord {
    label: String,
    ion: String,
    shift_hz: f64,
    uncertainty_hz: f64,
    #[serde(default)]
    kind: Option<String>,
}

pub const BUDGET_HEADER: [&str; 5] = ["label", "ion", "shift_hz", "uncertainty_hz", "kind"];

fn parse_ion(s: &str) -> Option<Ion> {
    match s.trim().to_ascii_lowercase().as_str() {
        "ca" | "ca+" => Some(Ion::Ca),
        "al" | "al+" => Some(Ion::Al),
        _ => None,
    }
}

pub fn ion_name(ion: Ion) -> &'static str {
    match ion {
        Ion::Ca => "Ca",
        Ion::Al => "Al",
    }
}

pub fn kind_name(kind: RowKind) -> &'static str {
    match kind {
        RowKind::Correction => "correction",
        RowKind::Bound => "bound",
    }
}

pub fn read_budget(path: &Path) -> CliResult<Vec<BudgetRow>> {
    let mut r = csv::Reader::from_path(path).map_err(|e| CliError::csv(path, e))?;
    let mut rows = Vec::new();
    for rec in r.deserialize::<BudgetRecord>() {
        let rec = rec.map_err(|e| CliError::csv(path, e))?;
        let ion = parse_ion(&rec.ion)
            .ok_or_else(|| CliError::Config(format!("{}: unknown ion {:?}", path.display(), rec.ion)))?;
        let row = match rec.kind.as_deref().map(str::trim) {
            None | Some("") | Some("correction") => BudgetRow::new(&rec.label, ion, rec.shift_hz, rec.uncertainty_hz),
            Some("bound") => {
                if rec.shift_hz != 0.0 {
                    return Err(CliError::Config(format!(
                        "{}: bound row {:?} carries a shift",
                        path.display(),
                        rec.label
                    )));
                }
                BudgetRow::bound(&rec.label, ion, rec.uncertainty_hz)
            }
            Some(other) => {
                return Err(CliError::Config(format!(
                    "{}: unknown row kind {other:?}",
                    path.display()
                )))
            }
        };
        rows.push(row);
    }
    Ok(rows)
}

pub fn budget_table(rows: &[BudgetRow]) -> Table {
    let mut t = Table::new(&BUDGET_HEADER);
    for r in rows {
        t.push(vec![
            r.label.clone(),
            ion_name(r.ion).into(),
            num(r.shift),
            num(r.uncertainty),
            kind_name(r.kind).into(),
        ]);
    }
    t
}

/// One row of a campaign file.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CampaignRecord {
    pub set_id: String,
    pub s_pm: i8,
    pub ramsey_t_s: f64,
    pub al_offset_hz: f64,
    pub al_sigma_hz: f64,
    pub ca_plus_hz: f64,
    pub ca_minus_hz: f64,
    pub ca_sigma_hz: f64,
    pub b_sigma_gauss: f64,
    pub comb_lock: String,
    pub timestamp_s: f64,
}

impl CampaignRecord {
    pub fn from_set(s: &MeasurementSet) -> Self {
        Self {
            set_id: s.set_id.clone(),
            s_pm: s.s_pm,
            ramsey_t_s: s.ramsey_t,
            al_offset_hz: s.al_offset,
            al_sigma_hz: s.al_sigma,
            ca_plus_hz: s.ca_plus,
            ca_minus_hz: s.ca_minus,
            ca_sigma_hz: s.ca_sigma,
            b_sigma_gauss: s.b_sigma,
            comb_lock: s.comb_lock.name().into(),
            timestamp_s: s.timestamp,
        }
    }

    pub fn to_set(&self) -> CliResult<MeasurementSet> {
        let lock = CombLock::parse(&self.comb_lock)
            .ok_or_else(|| CliError::Config(format!("set {}: unknown comb_lock {:?}", self.set_id, self.comb_lock)))?;
        Ok(MeasurementSet {
            set_id: self.set_id.clone(),
            s_pm: self.s_pm,
            ramsey_t: self.ramsey_t_s,
            al_offset: self.al_offset_hz,
            al_sigma: self.al_sigma_hz,
            ca_plus: self.ca_plus_hz,
            ca_minus: self.ca_minus_hz,
            ca_sigma: self.ca_sigma_hz,
            b_sigma: self.b_sigma_gauss,
            comb_lock: lock,
            timestamp: self.timestamp_s,
        })
    }
}

pub fn read_campaign(path: &Path) -> CliResult<Vec<MeasurementSet>> {
    let mut r = csv::Reader::from_path(path).map_err(|e| CliError::csv(path, e))?;
    r.deserialize::<CampaignRecord>()
        .map(|rec| rec.map_err(|e| CliError::csv(path, e))?.to_set())
        .collect()
}

pub fn campaign_bytes(sets: &[MeasurementSet]) -> CliResult<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for s in sets {
        w.serialize(CampaignRecord::from_set(s))
            .map_err(|e| CliError::csv("<campaign>", e))?;
    }
    w.into_inner()
        .map_err(|e| CliError::io("<campaign>", std::io::Error::other(e.to_string())))
}
