use std::io::Write;
use std::path::Path;

use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::comm_rates::RatePoint;
use crate::config::watts_to_dbm;
use crate::error::{JrcError, Result};
use crate::scenarios::{CpiCurve, SweepAxis};

/// Provenance written above every table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Metadata {
    pub version: String,
    pub command: String,
    pub config: String,
    pub config_sha256: String,
    pub seed: u64,
    pub trials: usize,
    pub k_rad_policy: String,
    pub schemes: String,
    pub sweep: String,
    /// Unix seconds; `None` under `--reproducible`.
    pub timestamp: Option<u64>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Text(String),
    Empty,
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Num(x) => format!("{x:.11e}"),
            Cell::Text(s) => s.clone(),
            Cell::Empty => String::new(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Num(x) => serde_json::Number::from_f64(*x)
                .map(Value::Number)
                .unwrap_or(Value::Null),
            Cell::Text(s) => Value::String(s.clone()),
            Cell::Empty => Value::Null,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

/// One row per point; `axis` names the swept quantity, if any.
pub fn region_table(points: &[RatePoint], axis: Option<SweepAxis>, with_mc: bool) -> Table {
    let mut columns: Vec<String> = [
        "scheme",
        "axis",
        "axis_value",
        "axis_dbm",
        "p_rad_w",
        "p_dl_w",
        "p_ul_w",
        "t_c_s",
        "r_dl",
        "r_ul",
        "r_theta",
        "r_dist",
        "r_vel",
        "k_rad_resolved",
        "k_rad_star",
        "i_dl_dl",
        "i_dl_rad",
        "i_dl_ul",
        "i_ul_ul",
        "i_ul_dl",
        "i_ul_rad",
        "sigma_z2",
        "sigma_bar2",
    ]
    .iter()
    .map(|s| s.to_string())
    .collect();
    if with_mc {
        columns.extend(
            ["mc_r_dl", "mc_r_dl_se", "mc_r_ul", "mc_r_ul_se"]
                .iter()
                .map(|s| s.to_string()),
        );
    }
    let rows = points
        .iter()
        .map(|p| {
            let (name, value, dbm) = match axis {
                Some(a) => {
                    let v = match a {
                        SweepAxis::PUl => p.p_ul,
                        SweepAxis::PDl => p.p_dl,
                        SweepAxis::PRad => p.p_rad,
                        SweepAxis::Tc => p.t_c,
                    };
                    let dbm = if a.is_power() {
                        Cell::Num(watts_to_dbm(v))
                    } else {
                        Cell::Empty
                    };
                    (Cell::Text(a.name().into()), Cell::Num(v), dbm)
                }
                None => (Cell::Text("none".into()), Cell::Empty, Cell::Empty),
            };
            let l = &p.ledger;
            let mut row = vec![
                Cell::Text(p.scheme.clone()),
                name,
                value,
                dbm,
                Cell::Num(p.p_rad),
                Cell::Num(p.p_dl),
                Cell::Num(p.p_ul),
                Cell::Num(p.t_c),
                Cell::Num(p.r_dl),
                Cell::Num(p.r_ul),
                Cell::Num(p.r_theta),
                Cell::Num(p.r_dist),
                Cell::Num(p.r_vel),
                Cell::Num(p.k_rad_resolved),
                p.k_rad_star.map_or(Cell::Empty, Cell::Num),
                Cell::Num(l.dl_dl),
                Cell::Num(l.dl_rad),
                Cell::Num(l.dl_ul),
                Cell::Num(l.ul_ul),
                Cell::Num(l.ul_dl),
                Cell::Num(l.ul_rad),
                Cell::Num(p.sigma_z2),
                Cell::Num(p.sigma_bar2),
            ];
            if with_mc {
                match &p.mc {
                    Some(mc) => row.extend([
                        Cell::Num(mc.r_dl.mean),
                        Cell::Num(mc.r_dl.std_err),
                        Cell::Num(mc.r_ul.mean),
                        Cell::Num(mc.r_ul.std_err),
                    ]),
                    None => row.extend(std::iter::repeat_n(Cell::Empty, 4)),
                }
            }
            row
        })
        .collect();
    Table { columns, rows }
}

pub fn cpi_table(curve: &CpiCurve) -> Table {
    let columns = [
        "scheme",
        "t_c_s",
        "info_theta",
        "info_dist",
        "info_vel",
        "r_theta",
        "r_dist",
        "r_vel",
    ]
    .iter()
    .map(|s| s.to_string())
    .collect();
    let rows = curve
        .points
        .iter()
        .map(|p| {
            let mut row = vec![Cell::Text(curve.scheme.clone())];
            row.extend(
                [
                    p.t_c,
                    p.info_theta,
                    p.info_dist,
                    p.info_vel,
                    p.r_theta,
                    p.r_dist,
                    p.r_vel,
                ]
                .map(Cell::Num),
            );
            row
        })
        .collect();
    Table { columns, rows }
}

fn io_err(path: &Path) -> impl Fn(std::io::Error) -> JrcError + '_ {
    move |source| JrcError::Io {
        path: path.display().to_string(),
        source,
    }
}

/// Write `#` metadata lines, a header row and one line per row.
pub fn emit_csv(table: &Table, meta: &Metadata, path: &Path) -> Result<()> {
    let mut text = String::new();
    text.push_str(&format!("# fdjrc {}\n", meta.version));
    text.push_str(&format!("# command: {}\n", meta.command));
    text.push_str(&format!(
        "# config: {} sha256={}\n",
        meta.config, meta.config_sha256
    ));
    text.push_str(&format!("# seed: {}\n", meta.seed));
    text.push_str(&format!("# trials: {}\n", meta.trials));
    text.push_str(&format!("# k_rad_policy: {}\n", meta.k_rad_policy));
    if !meta.schemes.is_empty() {
        text.push_str(&format!("# schemes: {}\n", meta.schemes));
    }
    if !meta.sweep.is_empty() {
        text.push_str(&format!("# sweep: {}\n", meta.sweep));
    }
    if let Some(ts) = meta.timestamp {
        text.push_str(&format!("# generated_unix: {ts}\n"));
    }
    text.push_str(&table.columns.join(","));
    text.push('\n');
    for row in &table.rows {
        let cells: Vec<String> = row.iter().map(Cell::csv).collect();
        text.push_str(&cells.join(","));
        text.push('\n');
    }
    let mut f = std::fs::File::create(path).map_err(io_err(path))?;
    f.write_all(text.as_bytes()).map_err(io_err(path))
}

/// JSON sidecar with the same metadata and rows.
pub fn emit_json(table: &Table, meta: &Metadata, path: &Path) -> Result<()> {
    let rows: Vec<Value> = table
        .rows
        .iter()
        .map(|row| {
            let mut obj = Map::new();
            for (c, v) in table.columns.iter().zip(row) {
                obj.insert(c.clone(), v.json());
            }
            Value::Object(obj)
        })
        .collect();
    let doc = json!({ "metadata": meta, "columns": table.columns, "rows": rows });
    let mut text = serde_json::to_string_pretty(&doc).map_err(|e| JrcError::Io {
        path: path.display().to_string(),
        source: std::io::Error::other(e),
    })?;
    text.push('\n');
    std::fs::write(path, text).map_err(io_err(path))
}
