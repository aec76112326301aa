//! CSV artifacts with a `#`-prefixed comment header.
//!
//! Every file starts with the tool version, the schema name and version, the
//! SHA-256 of the effective configuration and the units of each column,
//! followed by an RFC-4180 body whose first record is the column list.

use std::fs;
use std::path::Path;

use crate::error::CliError;

pub const TOOL_VERSION: &str = concat!("magdimer ", env!("CARGO_PKG_VERSION"));

#[derive(Debug, PartialEq, Eq)]
pub struct Schema {
    pub name: &'static str,
    pub version: u32,
    pub columns: &'static [&'static str],
    pub units: &'static str,
}

pub const STEADY: Schema = Schema {
    name: "steady",
    version: 1,
    columns: &[
        "P_d",
        "J",
        "index",
        "class",
        "stability",
        "n_mL",
        "n_mR",
        "n_aL",
        "n_aR",
        "Z",
        "max_Re_eig",
        "Re_mL",
        "Im_mL",
        "Re_mR",
        "Im_mR",
        "Re_aL",
        "Im_aL",
        "Re_aR",
        "Im_aR",
    ],
    units: "P_d mW; J in kappa_a; eigenvalues rad/s; amplitudes sqrt(quanta)",
};

pub const BRANCH: Schema = Schema {
    name: "branch",
    version: 1,
    columns: &[
        "branch",
        "P_d",
        "n_mL",
        "n_mR",
        "n_aL",
        "n_aR",
        "Z",
        "max_Re_eig",
        "class",
        "fold_flag",
    ],
    units: "P_d mW; eigenvalues rad/s; fold_flag 0 sample, 1 saddle-node, 2 symmetric branch point",
};

pub const PHASE_DIAGRAM: Schema = Schema {
    name: "phase-diagram",
    version: 1,
    columns: &["P_d", "J", "region", "n_stable", "max_abs_Z", "hopf_flag"],
    units: "P_d mW; J in kappa_a",
};

pub const TRAJECTORY: Schema = Schema {
    name: "trajectory",
    version: 1,
    columns: &[
        "t", "Re_aL", "Im_aL", "Re_mL", "Im_mL", "Re_aR", "Im_aR", "Re_mR", "Im_mR", "n_mL", "n_mR",
    ],
    units: "t s, quench at t = 0; amplitudes sqrt(quanta)",
};

pub const QUENCH_SCAN: Schema = Schema {
    name: "quench-scan",
    version: 1,
    columns: &["P_final", "delta", "tau", "converged", "final_class"],
    units: "P_final mW; delta = |P_final - P_c| mW; tau s",
};

pub const FLUCT: Schema = Schema {
    name: "fluct",
    version: 1,
    columns: &[
        "P_d",
        "class_a",
        "class_b",
        "pairing",
        "fidelity",
        "infidelity",
        "mutual_information",
        "E_N",
        "nu_plus",
        "nu_minus",
        "lyapunov_residual",
    ],
    units: "P_d mW; mutual_information and E_N in nats; cross rows leave per-state columns empty",
};

pub const SCHEMAS: [&Schema; 6] = [
    &STEADY,
    &BRANCH,
    &PHASE_DIAGRAM,
    &TRAJECTORY,
    &QUENCH_SCAN,
    &FLUCT,
];

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub schema: &'static Schema,
    /// Extra `key: value` header lines.
    pub notes: Vec<(String, String)>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(schema: &'static Schema) -> Self {
        Table {
            schema,
            notes: Vec::new(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.schema.columns.len());
        self.rows.push(row);
    }

    pub fn note(&mut self, key: &str, value: impl ToString) {
        self.notes.push((key.to_string(), value.to_string()));
    }

    pub fn render(&self, config_hash: &str) -> Result<String, CliError> {
        let s = self.schema;
        let mut out = format!(
            "# {TOOL_VERSION}\n# schema: {} v{}\n# config_sha256: {config_hash}\n# units: {}\n",
            s.name, s.version, s.units
        );
        for (k, v) in &self.notes {
            out.push_str(&format!("# {k}: {v}\n"));
        }
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::CRLF)
            .from_writer(Vec::new());
        let csv_err = |e: csv::Error| CliError::Schema(e.to_string());
        w.write_record(s.columns).map_err(csv_err)?;
        for r in &self.rows {
            w.write_record(r).map_err(csv_err)?;
        }
        let body = w
            .into_inner()
            .map_err(|e| CliError::Schema(e.to_string()))?;
        out.push_str(std::str::from_utf8(&body).expect("CSV fields are UTF-8"));
        Ok(out)
    }

    pub fn write(&self, path: &Path, config_hash: &str) -> Result<(), CliError> {
        let text = self.render(config_hash)?;
        fs::write(path, text).map_err(|e| CliError::io(path.display().to_string(), e))
    }
}

/// Computed quantity: shortest exponent form that round-trips.
pub fn num(x: f64) -> String {
    format!("{x:e}")
}

/// Grid coordinate: shortest decimal form that round-trips.
pub fn coord(x: f64) -> String {
    format!("{x}")
}

pub fn flag(b: bool) -> String {
    if b { "1" } else { "0" }.to_string()
}

pub fn opt_num(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

/// A CSV artifact read back from disk.
#[derive(Debug, Clone, PartialEq)]
pub struct Artifact {
    pub schema: &'static Schema,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Artifact {
    pub fn parse(text: &str) -> Result<Artifact, CliError> {
        let name = text
            .lines()
            .take_while(|l| l.starts_with('#'))
            .find_map(|l| l.strip_prefix("# schema: "))
            .and_then(|rest| rest.split_whitespace().next())
            .ok_or_else(|| CliError::Schema("no `# schema:` header line".into()))?;
        let schema = SCHEMAS
            .into_iter()
            .find(|s| s.name == name)
            .ok_or_else(|| CliError::Schema(format!("unknown schema `{name}`")))?;
        let mut rdr = csv::ReaderBuilder::new()
            .comment(Some(b'#'))
            .from_reader(text.as_bytes());
        let csv_err = |e: csv::Error| CliError::Schema(e.to_string());
        let columns: Vec<String> = rdr
            .headers()
            .map_err(csv_err)?
            .iter()
            .map(str::to_string)
            .collect();
        let rows = rdr
            .records()
            .map(|r| r.map(|r| r.iter().map(str::to_string).collect()))
            .collect::<Result<Vec<Vec<String>>, _>>()
            .map_err(csv_err)?;
        Ok(Artifact {
            schema,
            columns,
            rows,
        })
    }

    /// Index of `name`, or a schema error naming the missing column.
    pub fn column(&self, name: &str) -> Result<usize, CliError> {
        self.columns.iter().position(|c| c == name).ok_or_else(|| {
            CliError::Schema(format!(
                "{} artifact lacks column `{name}`",
                self.schema.name
            ))
        })
    }

    pub fn f64_at(&self, row: usize, col: usize) -> Result<f64, CliError> {
        let cell = &self.rows[row][col];
        cell.parse().map_err(|_| {
            CliError::Schema(format!(
                "column `{}` row {}: `{cell}` is not a number",
                self.columns[col],
                row + 1
            ))
        })
    }
}

/// The CSV body with the comment header removed.
pub fn body(text: &str) -> &str {
    let mut rest = text;
    while rest.starts_with('#') {
        rest = rest.split_once('\n').map_or("", |(_, r)| r);
    }
    rest
}
