use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::plot::{boxplot, interval_chart, reliability_chart};
use crate::uq::IntervalRow;

use super::scenario::{RepeatStatus, ScenarioReport, UqSummary};

/// Column order of `metrics.csv`, one row per scenario repeat.
pub const METRICS_COLUMNS: [&str; 6] = ["repeat", "seed", "baseline_metric", "scenario_metric", "percent_change", "status"];

fn status_name(s: &RepeatStatus) -> &'static str {
    match s {
        RepeatStatus::Ok => "ok",
        RepeatStatus::Flagged => "flagged",
        RepeatStatus::Failed => "failed",
    }
}

fn opt(v: Option<f64>) -> String {
    v.map_or_else(String::new, |v| v.to_string())
}

fn csv_string(w: csv::Writer<Vec<u8>>) -> Result<String> {
    let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

pub fn results_json(report: &ScenarioReport) -> Result<String> {
    let mut text = serde_json::to_string_pretty(report)?;
    text.push('\n');
    Ok(text)
}

pub fn metrics_csv(report: &ScenarioReport) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(METRICS_COLUMNS)?;
    for rec in &report.repeats {
        let baseline = report.ideal_repeats.get(rec.repeat).and_then(|b| b.metric);
        w.write_record([
            rec.repeat.to_string(),
            rec.seed.to_string(),
            opt(baseline),
            opt(rec.metric),
            opt(rec.percent_change),
            status_name(&rec.status).to_owned(),
        ])?;
    }
    csv_string(w)
}

fn intervals_csv(scenario: &[IntervalRow], ideal: &[IntervalRow]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["backend", "index", "truth", "mean", "lo", "hi"])?;
    for (label, rows) in [("scenario", scenario), ("ideal", ideal)] {
        for r in rows {
            w.write_record([
                label.to_owned(),
                r.index.to_string(),
                r.truth.to_string(),
                r.mean.to_string(),
                r.lo.to_string(),
                r.hi.to_string(),
            ])?;
        }
    }
    csv_string(w)
}

/// Write `results.json`, `metrics.csv` and `boxplot.svg` into `out_dir`,
/// plus interval or reliability tables and charts when the report carries
/// UQ results. Returns the written paths in creation order.
pub fn emit_report(report: &ScenarioReport, out_dir: impl AsRef<Path>) -> Result<Vec<PathBuf>> {
    let dir = out_dir.as_ref();
    std::fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    let mut put = |name: &str, body: String| -> Result<()> {
        let path = dir.join(name);
        std::fs::write(&path, body)?;
        written.push(path);
        Ok(())
    };
    put("results.json", results_json(report)?)?;
    put("metrics.csv", metrics_csv(report)?)?;
    let groups = vec![
        ("ideal".to_owned(), report.ideal_percent_changes()),
        (report.scenario.to_string(), report.percent_changes()),
    ];
    let title = format!("{} {} on {}", report.scenario, report.model_name, report.config.profile.name);
    put("boxplot.svg", boxplot(&groups, &title, "% change from ideal"))?;

    if let Some(uq) = &report.uq {
        match (&uq.scenario, &uq.ideal) {
            (UqSummary::Regression(s), UqSummary::Regression(i)) => {
                put("uq_intervals.csv", intervals_csv(&s.intervals, &i.intervals)?)?;
                put("uq_intervals.svg", interval_chart(&s.intervals, &format!("{} prediction intervals", report.scenario)))?;
                put("uq_intervals_ideal.svg", interval_chart(&i.intervals, "ideal prediction intervals"))?;
            }
            (UqSummary::Classification(s), UqSummary::Classification(i)) => {
                put("uq_reliability.csv", s.reliability.to_csv()?)?;
                put("uq_reliability_ideal.csv", i.reliability.to_csv()?)?;
                put("uq_reliability.svg", reliability_chart(&s.reliability, &format!("{} reliability", report.scenario)))?;
                put("uq_reliability_ideal.svg", reliability_chart(&i.reliability, "ideal reliability"))?;
            }
            _ => return Err(Error::Validation("UQ summaries disagree on the task".into())),
        }
    }
    Ok(written)
}

/// Parse a `results.json` written by [`emit_report`].
pub fn load_report(path: impl AsRef<Path>) -> Result<ScenarioReport> {
    Ok(serde_json::from_str(&std::fs::read_to_string(path)?)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::{generate_dataset, run_scenario, DatasetKind, ScenarioConfig, ScenarioId, UqSettings};
    use crate::noise::NoiseProfile;

    fn report(id: ScenarioId) -> ScenarioReport {
        let split = generate_dataset(DatasetKind::Classification4, 40, 1, 0.0).unwrap();
        let mut config = ScenarioConfig::new(id, NoiseProfile::depolarizing(4, 0.01, 0.03), 8);
        config.repeats = 3;
        if id.requires_uq() {
            config.uq = Some(UqSettings::Bootstrap { resamples: 8 });
        }
        run_scenario(&config, &split, &DatasetKind::Classification4.default_model()).unwrap()
    }

    #[test]
    fn files_without_uq() {
        let r = report(ScenarioId::C1_2);
        let dir = tempfile::tempdir().unwrap();
        let files = emit_report(&r, dir.path()).unwrap();
        let names: Vec<_> = files.iter().map(|p| p.file_name().unwrap().to_str().unwrap().to_owned()).collect();
        assert_eq!(names, ["results.json", "metrics.csv", "boxplot.svg"]);
        let csv = std::fs::read_to_string(dir.path().join("metrics.csv")).unwrap();
        assert_eq!(csv.lines().count(), 1 + 3);
        assert!(csv.starts_with("repeat,seed,baseline_metric,scenario_metric,percent_change,status"));
        assert_eq!(load_report(dir.path().join("results.json")).unwrap(), r);
    }

    #[test]
    fn reemission_is_byte_identical_and_uq_files_appear() {
        let r = report(ScenarioId::C3_1);
        let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
        let files = emit_report(&r, a.path()).unwrap();
        emit_report(&r, b.path()).unwrap();
        assert!(files.iter().any(|p| p.ends_with("uq_reliability.svg")));
        for f in &files {
            let name = f.file_name().unwrap();
            assert_eq!(std::fs::read(f).unwrap(), std::fs::read(b.path().join(name)).unwrap());
        }
    }
}
