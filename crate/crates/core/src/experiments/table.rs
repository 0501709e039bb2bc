use num_complex::Complex64;
use serde::Serialize;

use super::scenario::Scenario;
use crate::channel::{evaluate_link, received_power, Direction};
use crate::error::Result;
use crate::pattern::{PatternKind, PatternSpec};

/// One (scenario, pattern) measurement in both directions.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportRow {
    pub scenario: String,
    pub pattern: PatternKind,
    pub p_up_dbm: f64,
    pub p_down_dbm: f64,
    /// `None` when the scenario does not report phase.
    pub phase_up_deg: Option<f64>,
    pub phase_down_deg: Option<f64>,
    #[serde(skip)]
    pub setup: String,
    #[serde(skip)]
    pub h_up: Complex64,
    #[serde(skip)]
    pub h_down: Complex64,
}

/// Human-readable measurement setup, in the order the bench notes list it.
pub fn setup_label(s: &Scenario) -> String {
    let g = &s.geometry;
    format!(
        "Pt={} dBm, f={} GHz, d1={} m, θ1={}°, d2={} m, θ2={}°",
        g.pt_dbm,
        g.f_hz / 1e9,
        g.d1_m,
        g.theta1_deg,
        g.d2_m,
        g.theta2_deg
    )
}

/// One row per (scenario, pattern), in input order.
pub fn pattern_table(items: &[(Scenario, Vec<PatternSpec>)]) -> Result<Vec<ReportRow>> {
    let mut rows = Vec::new();
    for (scenario, patterns) in items {
        let setup = setup_label(scenario);
        for spec in patterns {
            let scene = scenario.scene_with(spec)?;
            let h_up = evaluate_link(&scene, Direction::Uplink)?.h_total;
            let h_down = evaluate_link(&scene, Direction::Downlink)?.h_total;
            let phase = |h: Complex64| scenario.report_phase.then(|| h.arg().to_degrees());
            rows.push(ReportRow {
                scenario: scenario.id.clone(),
                pattern: spec.kind(),
                p_up_dbm: received_power(scenario.geometry.pt_dbm, h_up),
                p_down_dbm: received_power(scenario.geometry.pt_dbm, h_down),
                phase_up_deg: phase(h_up),
                phase_down_deg: phase(h_down),
                setup: setup.clone(),
                h_up,
                h_down,
            });
        }
    }
    Ok(rows)
}

fn power_cell(p: f64) -> String {
    if p == f64::NEG_INFINITY {
        "-inf".to_string()
    } else {
        format!("{p:.1}")
    }
}

fn phase_cell(p: Option<f64>) -> String {
    p.map_or("NA".to_string(), |d| format!("{d:.0}"))
}

/// Plain-text table: scenario and setup printed once per group of rows,
/// then pattern, `up / down` power in dBm (0.1 dB) and `up / down` phase in
/// degrees (1°), or `NA`.
pub fn render_table(rows: &[ReportRow]) -> String {
    let header = [
        "RIS".to_string(),
        "Measurement setup".to_string(),
        "RIS coding pattern".to_string(),
        "Received signal power (dBm) up / down".to_string(),
        "Received signal phase (°) up / down".to_string(),
    ];
    let mut body: Vec<[String; 5]> = Vec::with_capacity(rows.len());
    for (i, r) in rows.iter().enumerate() {
        let first = i == 0 || rows[i - 1].scenario != r.scenario;
        body.push([
            if first { r.scenario.clone() } else { String::new() },
            if first { r.setup.clone() } else { String::new() },
            r.pattern.as_str().to_string(),
            format!("{} / {}", power_cell(r.p_up_dbm), power_cell(r.p_down_dbm)),
            if r.phase_up_deg.is_none() && r.phase_down_deg.is_none() {
                "NA".to_string()
            } else {
                format!("{} / {}", phase_cell(r.phase_up_deg), phase_cell(r.phase_down_deg))
            },
        ]);
    }
    let mut widths = [0usize; 5];
    for line in std::iter::once(&header).chain(&body) {
        for (w, cell) in widths.iter_mut().zip(line) {
            *w = (*w).max(cell.chars().count());
        }
    }
    let mut out = String::new();
    for (i, line) in std::iter::once(&header).chain(&body).enumerate() {
        let cells: Vec<String> = line
            .iter()
            .zip(widths)
            .map(|(c, w)| format!("{c}{}", " ".repeat(w - c.chars().count())))
            .collect();
        out.push_str(cells.join(" | ").trim_end());
        out.push('\n');
        if i == 0 {
            let rule: Vec<String> = widths.iter().map(|w| "-".repeat(*w)).collect();
            out.push_str(&rule.join("-+-"));
            out.push('\n');
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiments::scenario::load_fixture;

    fn ris1() -> Vec<(Scenario, Vec<PatternSpec>)> {
        ["ris1-a", "ris1-b"]
            .iter()
            .map(|id| {
                (
                    load_fixture(id).unwrap(),
                    vec![PatternSpec::Identical { value: 0.0 }, PatternSpec::Gradient { step_deg: 90.0 }],
                )
            })
            .collect()
    }

    #[test]
    fn passive_rows_are_reciprocal() {
        let rows = pattern_table(&ris1()).unwrap();
        assert_eq!(rows.len(), 4);
        for r in &rows {
            assert_eq!(r.p_up_dbm, r.p_down_dbm);
            assert_eq!(r.phase_up_deg, r.phase_down_deg);
        }
    }

    #[test]
    fn power_difference_matches_channel_ratio() {
        let rows = pattern_table(&ris1()).unwrap();
        let diff = rows[1].p_up_dbm - rows[0].p_up_dbm;
        let want = 20.0 * (rows[1].h_up.norm() / rows[0].h_up.norm()).log10();
        assert!((diff - want).abs() < 1e-12);
    }

    #[test]
    fn ris2_phases_are_na() {
        let items: Vec<_> = ["ris2-a", "ris2-b"]
            .iter()
            .map(|id| (load_fixture(id).unwrap(), vec![PatternSpec::Identical { value: 0.0 }, PatternSpec::Stripe]))
            .collect();
        let rows = pattern_table(&items).unwrap();
        assert_eq!(rows.len(), 4);
        assert!(rows.iter().all(|r| r.phase_up_deg.is_none()));
        let text = render_table(&rows);
        assert_eq!(text.lines().count(), 6);
        assert!(text.lines().nth(2).unwrap().ends_with("| NA"));
        assert!(text.contains("f=27 GHz, d1=1 m, θ1=35°"));
    }
}
