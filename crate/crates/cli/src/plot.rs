//! Gnuplot-ready text from CSV artifacts.
//!
//! Curves become whitespace-separated column blocks separated by two blank
//! lines, so `index N` selects one of them. Phase diagrams become
//! nonuniform-matrix blocks: a first row holding the column count and the
//! power grid, then one row per tunneling value.

use std::collections::BTreeMap;

use crate::error::CliError;
use crate::table::Artifact;

pub fn emit_plot_data(csv_text: &str) -> Result<String, CliError> {
    let a = Artifact::parse(csv_text)?;
    match a.schema.name {
        "branch" => grouped(
            &a,
            &["branch"],
            &["P_d", "n_mL", "n_mR", "Z", "max_Re_eig", "fold_flag"],
        ),
        "fluct" => grouped(
            &a,
            &["class_a", "class_b", "pairing"],
            &["P_d", "fidelity", "infidelity", "mutual_information", "E_N"],
        ),
        "steady" => grouped(&a, &["class"], &["n_mL", "n_mR", "Z", "max_Re_eig"]),
        "trajectory" => grouped(&a, &[], &["t", "n_mL", "n_mR"]),
        "quench-scan" => log_log(&a),
        "phase-diagram" => matrix(&a),
        other => Err(CliError::Schema(format!("no plot layout for `{other}`"))),
    }
}

/// One block per distinct key, in order of first appearance.
fn grouped(a: &Artifact, keys: &[&str], cols: &[&str]) -> Result<String, CliError> {
    let key_idx = keys
        .iter()
        .map(|k| a.column(k))
        .collect::<Result<Vec<_>, _>>()?;
    let col_idx = cols
        .iter()
        .map(|c| a.column(c))
        .collect::<Result<Vec<_>, _>>()?;
    let mut order: Vec<String> = Vec::new();
    let mut blocks: BTreeMap<String, Vec<String>> = BTreeMap::new();
    for row in &a.rows {
        let key = key_idx
            .iter()
            .zip(keys)
            .map(|(&i, k)| format!("{k}={}", row[i]))
            .collect::<Vec<_>>()
            .join(" ");
        let line = col_idx
            .iter()
            .map(|&i| if row[i].is_empty() { "NaN" } else { &row[i] })
            .collect::<Vec<_>>()
            .join(" ");
        blocks
            .entry(key.clone())
            .or_insert_with(|| {
                order.push(key);
                Vec::new()
            })
            .push(line);
    }
    let header = format!("# {}", cols.join(" "));
    let parts: Vec<String> = order
        .iter()
        .map(|k| {
            let mut s = String::new();
            if !k.is_empty() {
                s.push_str(&format!("# {k}\n"));
            }
            s.push_str(&header);
            s.push('\n');
            for l in &blocks[k] {
                s.push_str(l);
                s.push('\n');
            }
            s
        })
        .collect();
    Ok(parts.join("\n\n"))
}

/// `(delta, tau)` pairs of converged quenches with their base-10 logs.
fn log_log(a: &Artifact) -> Result<String, CliError> {
    let (d, t, c) = (a.column("delta")?, a.column("tau")?, a.column("converged")?);
    let mut s = String::from("# delta tau log10_delta log10_tau\n");
    for (i, row) in a.rows.iter().enumerate() {
        if row[c] != "1" {
            continue;
        }
        let (dv, tv) = (a.f64_at(i, d)?, a.f64_at(i, t)?);
        s.push_str(&format!("{dv:e} {tv:e} {} {}\n", dv.log10(), tv.log10()));
    }
    Ok(s)
}

/// Numeric code of a region label for colour maps.
pub fn region_code(label: &str) -> Option<u8> {
    match label {
        "other" => Some(0),
        "1S" => Some(1),
        "2S" => Some(2),
        "2S-2AS" => Some(4),
        _ => None,
    }
}

fn matrix(a: &Artifact) -> Result<String, CliError> {
    let (pc, jc) = (a.column("P_d")?, a.column("J")?);
    let (rc, zc, hc) = (
        a.column("region")?,
        a.column("max_abs_Z")?,
        a.column("hopf_flag")?,
    );
    let mut p: Vec<f64> = Vec::new();
    let mut j: Vec<f64> = Vec::new();
    for i in 0..a.rows.len() {
        let (pv, jv) = (a.f64_at(i, pc)?, a.f64_at(i, jc)?);
        if !p.contains(&pv) {
            p.push(pv);
        }
        if !j.contains(&jv) {
            j.push(jv);
        }
    }
    if p.len() * j.len() != a.rows.len() {
        return Err(CliError::Schema(format!(
            "phase-diagram rows do not form a {}x{} grid",
            p.len(),
            j.len()
        )));
    }
    let value = |i: usize, col: usize| -> Result<String, CliError> {
        if col == rc {
            region_code(&a.rows[i][rc])
                .map(|c| c.to_string())
                .ok_or_else(|| {
                    CliError::Schema(format!(
                        "column `region` row {}: unknown label `{}`",
                        i + 1,
                        a.rows[i][rc]
                    ))
                })
        } else {
            a.f64_at(i, col).map(|v| format!("{v}"))
        }
    };
    let mut blocks = Vec::new();
    for (name, col) in [("region", rc), ("max_abs_Z", zc), ("hopf_flag", hc)] {
        let mut s = format!(
            "# {name}: nonuniform matrix, rows J ({}), columns P_d ({})\n{}",
            j.len(),
            p.len(),
            p.len()
        );
        for pv in &p {
            s.push_str(&format!(" {pv}"));
        }
        s.push('\n');
        for (jj, jv) in j.iter().enumerate() {
            s.push_str(&format!("{jv}"));
            for pi in 0..p.len() {
                s.push(' ');
                s.push_str(&value(jj * p.len() + pi, col)?);
            }
            s.push('\n');
        }
        blocks.push(s);
    }
    Ok(blocks.join("\n\n"))
}
