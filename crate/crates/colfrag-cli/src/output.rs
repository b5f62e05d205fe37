//! Rendering run and study outcomes as CSV or JSON.
//!
//! All formatting is fixed-precision with no locale, environment, or thread
//! dependence, so rendering the same outcome twice yields identical bytes.

use serde::Serialize;

use crate::single::SingleOutcome;
use crate::study::StudyOutcome;

/// Study table: one row per level. The error column starts on the second
/// row (it compares a level to its predecessor) and the order column on the
/// third; absent entries render as "-" in CSV and null in JSON.
pub fn study_csv(outcome: &StudyOutcome) -> String {
    let r = &outcome.report;
    let mut out = String::from("cells,total_number,error,eoc\n");
    for (i, level) in outcome.levels.iter().enumerate() {
        let error = if i >= 1 {
            format!("{:.3e}", r.errors[i - 1])
        } else {
            "-".to_string()
        };
        let eoc = if i >= 2 {
            format!("{:.4}", r.eoc[i - 2])
        } else {
            "-".to_string()
        };
        out.push_str(&format!(
            "{},{:.12e},{},{}\n",
            level.cells, level.total_number, error, eoc
        ));
    }
    out
}

#[derive(Serialize)]
struct StudyRowJson {
    cells: usize,
    total_number: f64,
    error: Option<f64>,
    eoc: Option<f64>,
}

#[derive(Serialize)]
struct StudyJson {
    rows: Vec<StudyRowJson>,
}

pub fn study_json(outcome: &StudyOutcome) -> String {
    let r = &outcome.report;
    let rows = outcome
        .levels
        .iter()
        .enumerate()
        .map(|(i, level)| StudyRowJson {
            cells: level.cells,
            total_number: level.total_number,
            error: (i >= 1).then(|| r.errors[i - 1]),
            eoc: (i >= 2).then(|| r.eoc[i - 2]),
        })
        .collect();
    let mut s = serde_json::to_string_pretty(&StudyJson { rows }).expect("plain floats and ints");
    s.push('\n');
    s
}

/// Single-run table: one row per observed instant.
pub fn single_csv(outcome: &SingleOutcome) -> String {
    let mut out = String::from("time,total_number,total_mass,min_concentration,budget_usage\n");
    for row in &outcome.rows {
        out.push_str(&format!(
            "{:.6e},{:.12e},{:.12e},{:.6e},{:.4}\n",
            row.time, row.total_number, row.total_mass, row.min_concentration, row.budget_usage
        ));
    }
    out
}

#[derive(Serialize)]
struct SingleRowJson {
    time: f64,
    total_number: f64,
    total_mass: f64,
    min_concentration: f64,
    budget_usage: f64,
}

#[derive(Serialize)]
struct SingleJson {
    rows: Vec<SingleRowJson>,
    steps: u64,
    clamped: u64,
}

pub fn single_json(outcome: &SingleOutcome) -> String {
    let rows = outcome
        .rows
        .iter()
        .map(|r| SingleRowJson {
            time: r.time,
            total_number: r.total_number,
            total_mass: r.total_mass,
            min_concentration: r.min_concentration,
            budget_usage: r.budget_usage,
        })
        .collect();
    let mut s = serde_json::to_string_pretty(&SingleJson {
        rows,
        steps: outcome.steps,
        clamped: outcome.clamped,
    })
    .expect("plain floats and ints");
    s.push('\n');
    s
}
