use std::io::Write;
use std::path::Path;

use serde::Serialize;

use super::sweep::TrajectoryPoint;
use super::table::ReportRow;
use crate::error::{Error, Result};

pub const REPORT_HEADER: [&str; 6] = [
    "scenario",
    "pattern",
    "p_up_dbm",
    "p_down_dbm",
    "phase_up_deg",
    "phase_down_deg",
];
pub const TRAJECTORY_HEADER: [&str; 5] = ["voltage_v", "re_up", "im_up", "re_down", "im_down"];
pub const PATTERN_MAP_HEADER: [&str; 5] = ["label", "re_up", "im_up", "re_down", "im_down"];

/// Writes through a temporary file in the target directory and renames it
/// into place, so readers never see a partial file.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| Error::io(path, e))?;
    tmp.write_all(bytes).map_err(|e| Error::io(path, e))?;
    tmp.flush().map_err(|e| Error::io(path, e))?;
    tmp.persist(path).map_err(|e| Error::io(path, e.error))?;
    Ok(())
}

fn num(x: f64) -> String {
    format!("{x}")
}

fn csv_text<I>(header: &[&str], records: I) -> String
where
    I: IntoIterator<Item = Vec<String>>,
{
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("in-memory CSV write");
    for r in records {
        w.write_record(&r).expect("in-memory CSV write");
    }
    String::from_utf8(w.into_inner().expect("in-memory CSV flush")).expect("CSV output is UTF-8")
}

fn json_text<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report values serialise");
    s.push('\n');
    s
}

/// Report CSV. Missing phases are written as `NA`, a null channel's power as `-inf`.
pub fn report_csv(rows: &[ReportRow]) -> String {
    let opt = |p: Option<f64>| p.map_or("NA".to_string(), num);
    csv_text(
        &REPORT_HEADER,
        rows.iter().map(|r| {
            vec![
                r.scenario.clone(),
                r.pattern.as_str().to_string(),
                num(r.p_up_dbm),
                num(r.p_down_dbm),
                opt(r.phase_up_deg),
                opt(r.phase_down_deg),
            ]
        }),
    )
}

/// Report JSON: an array of objects with the CSV field names. Missing phases
/// and `-inf` powers become `null`.
pub fn report_json(rows: &[ReportRow]) -> String {
    json_text(&rows)
}

#[derive(Serialize)]
struct TrajectoryRecord {
    voltage_v: f64,
    re_up: f64,
    im_up: f64,
    re_down: f64,
    im_down: f64,
}

fn trajectory_records(points: &[TrajectoryPoint]) -> Vec<TrajectoryRecord> {
    points
        .iter()
        .map(|p| TrajectoryRecord {
            voltage_v: p.voltage,
            re_up: p.h_up.re,
            im_up: p.h_up.im,
            re_down: p.h_down.re,
            im_down: p.h_down.im,
        })
        .collect()
}

pub fn trajectory_csv(points: &[TrajectoryPoint]) -> String {
    csv_text(
        &TRAJECTORY_HEADER,
        trajectory_records(points)
            .iter()
            .map(|r| vec![num(r.voltage_v), num(r.re_up), num(r.im_up), num(r.re_down), num(r.im_down)]),
    )
}

pub fn trajectory_json(points: &[TrajectoryPoint]) -> String {
    json_text(&trajectory_records(points))
}

fn is_json(path: &Path) -> bool {
    path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json"))
}

/// JSON when the path ends in `.json`, CSV otherwise.
pub fn save_report(rows: &[ReportRow], path: &Path) -> Result<()> {
    let text = if is_json(path) { report_json(rows) } else { report_csv(rows) };
    write_atomic(path, text.as_bytes())
}

pub fn save_trajectory(points: &[TrajectoryPoint], path: &Path) -> Result<()> {
    let text = if is_json(path) {
        trajectory_json(points)
    } else {
        trajectory_csv(points)
    };
    write_atomic(path, text.as_bytes())
}

/// Complex-plane data with one uplink and one downlink series.
#[derive(Debug, Clone, Copy)]
pub enum PlotData<'a> {
    Trajectory(&'a [TrajectoryPoint]),
    /// One point per report row, labelled `scenario/pattern`.
    PatternMap(&'a [ReportRow]),
}

pub fn plotdata_csv(data: PlotData<'_>) -> Result<String> {
    match data {
        PlotData::Trajectory(points) => {
            if points.is_empty() {
                return Err(Error::Argument("refusing to write an empty trajectory".into()));
            }
            Ok(trajectory_csv(points))
        }
        PlotData::PatternMap(rows) => {
            if rows.is_empty() {
                return Err(Error::Argument("refusing to write an empty pattern map".into()));
            }
            Ok(csv_text(
                &PATTERN_MAP_HEADER,
                rows.iter().map(|r| {
                    vec![
                        format!("{}/{}", r.scenario, r.pattern.as_str()),
                        num(r.h_up.re),
                        num(r.h_up.im),
                        num(r.h_down.re),
                        num(r.h_down.im),
                    ]
                }),
            ))
        }
    }
}

pub fn emit_plotdata(data: PlotData<'_>, path: &Path) -> Result<()> {
    write_atomic(path, plotdata_csv(data)?.as_bytes())
}

#[cfg(test)]
mod tests {
    use num_complex::Complex64;

    use super::*;
    use crate::pattern::PatternKind;

    fn point(v: f64) -> TrajectoryPoint {
        TrajectoryPoint {
            voltage: v,
            h_up: Complex64::new(v, -v),
            h_down: Complex64::new(v, -v),
        }
    }

    #[test]
    fn trajectory_schema() {
        let text = plotdata_csv(PlotData::Trajectory(&[point(0.0), point(0.5), point(1.0)])).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 4);
        assert_eq!(lines[0], "voltage_v,re_up,im_up,re_down,im_down");
        assert!(lines[1..].iter().all(|l| l.split(',').count() == 5));
        assert_eq!(lines[2], "0.5,0.5,-0.5,0.5,-0.5");
    }

    #[test]
    fn empty_inputs_refused() {
        assert!(plotdata_csv(PlotData::Trajectory(&[])).is_err());
        assert!(plotdata_csv(PlotData::PatternMap(&[])).is_err());
    }

    #[test]
    fn report_null_and_na() {
        let row = ReportRow {
            scenario: "x".into(),
            pattern: PatternKind::Stripe,
            p_up_dbm: f64::NEG_INFINITY,
            p_down_dbm: -50.25,
            phase_up_deg: None,
            phase_down_deg: None,
            setup: String::new(),
            h_up: Complex64::new(0.0, 0.0),
            h_down: Complex64::new(0.0, 0.0),
        };
        let csv = report_csv(std::slice::from_ref(&row));
        assert_eq!(csv.lines().nth(1).unwrap(), "x,stripe,-inf,-50.25,NA,NA");
        let json: serde_json::Value = serde_json::from_str(&report_json(&[row])).unwrap();
        assert_eq!(json[0]["p_up_dbm"], serde_json::Value::Null);
        assert_eq!(json[0]["phase_up_deg"], serde_json::Value::Null);
        assert_eq!(json[0]["pattern"], "stripe");
    }

    #[test]
    fn atomic_write_replaces_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("out.csv");
        write_atomic(&path, b"one").unwrap();
        write_atomic(&path, b"two").unwrap();
        assert_eq!(std::fs::read_to_string(&path).unwrap(), "two");
        assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
        assert!(write_atomic(&dir.path().join("missing/out.csv"), b"x").is_err());
    }
}
