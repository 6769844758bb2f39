//! Minimal deterministic SVG charts for reports.
//!
//! Coordinates are written with two decimals so identical inputs always
//! produce byte-identical files.

use std::fmt::Write;

use crate::uq::{IntervalRow, ReliabilityDiagram};

const W: f64 = 640.0;
const H: f64 = 400.0;
const M: f64 = 50.0;

struct Frame {
    x0: f64,
    x1: f64,
    y0: f64,
    y1: f64,
    top: f64,
    bottom: f64,
}

impl Frame {
    fn new(x0: f64, x1: f64, y0: f64, y1: f64, top: f64, bottom: f64) -> Self {
        let pad = |lo: f64, hi: f64| if hi > lo { (lo, hi) } else { (lo - 0.5, hi + 0.5) };
        let (x0, x1) = pad(x0, x1);
        let (y0, y1) = pad(y0, y1);
        Self { x0, x1, y0, y1, top, bottom }
    }

    fn x(&self, v: f64) -> f64 {
        M + (v - self.x0) / (self.x1 - self.x0) * (W - 2.0 * M)
    }

    fn y(&self, v: f64) -> f64 {
        self.bottom - (v - self.y0) / (self.y1 - self.y0) * (self.bottom - self.top)
    }

    fn axes(&self, out: &mut String) {
        let _ = write!(
            out,
            r#"<line x1="{M}" y1="{b:.2}" x2="{r:.2}" y2="{b:.2}" stroke="black"/><line x1="{M}" y1="{t:.2}" x2="{M}" y2="{b:.2}" stroke="black"/>"#,
            b = self.bottom,
            t = self.top,
            r = W - M
        );
        for k in 0..=4 {
            let v = self.y0 + (self.y1 - self.y0) * k as f64 / 4.0;
            let _ = write!(
                out,
                r#"<text x="{x:.2}" y="{y:.2}" font-size="10" text-anchor="end">{v:.3}</text>"#,
                x = M - 4.0,
                y = self.y(v) + 3.0
            );
        }
    }
}

fn open(title: &str) -> String {
    format!(
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}"><rect width="{W}" height="{H}" fill="white"/><text x="{cx}" y="20" font-size="14" text-anchor="middle">{t}</text>"#,
        cx = W / 2.0,
        t = escape(title)
    )
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn finite_range(values: impl Iterator<Item = f64>) -> (f64, f64) {
    values
        .filter(|v| v.is_finite())
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)))
}

/// Box plot (quartiles, whiskers at extremes) per named group.
pub fn boxplot(groups: &[(String, Vec<f64>)], title: &str, y_label: &str) -> String {
    let (lo, hi) = finite_range(groups.iter().flat_map(|(_, v)| v.iter().copied()));
    let (lo, hi) = if lo.is_finite() { (lo, hi) } else { (0.0, 1.0) };
    let f = Frame::new(0.0, groups.len().max(1) as f64, lo, hi, 40.0, H - M);
    let mut out = open(title);
    f.axes(&mut out);
    let _ = write!(
        out,
        r#"<text x="14" y="{y}" font-size="11" transform="rotate(-90 14 {y})" text-anchor="middle">{l}</text>"#,
        y = H / 2.0,
        l = escape(y_label)
    );
    for (g, (name, values)) in groups.iter().enumerate() {
        let cx = f.x(g as f64 + 0.5);
        let _ = write!(
            out,
            r#"<text x="{cx:.2}" y="{y:.2}" font-size="11" text-anchor="middle">{n}</text>"#,
            y = H - M + 16.0,
            n = escape(name)
        );
        let mut v: Vec<f64> = values.iter().copied().filter(|x| x.is_finite()).collect();
        if v.is_empty() {
            continue;
        }
        v.sort_by(f64::total_cmp);
        let q = |p: f64| crate::uq::quantile(&v, p);
        let (q1, med, q3) = (q(0.25), q(0.5), q(0.75));
        let half = 0.2 * (f.x(1.0) - f.x(0.0));
        let _ = write!(
            out,
            r#"<line x1="{cx:.2}" y1="{a:.2}" x2="{cx:.2}" y2="{b:.2}" stroke="black"/><rect x="{l:.2}" y="{t:.2}" width="{w:.2}" height="{h:.2}" fill="steelblue" fill-opacity="0.4" stroke="black"/><line x1="{l:.2}" y1="{m:.2}" x2="{r:.2}" y2="{m:.2}" stroke="black" stroke-width="2"/>"#,
            a = f.y(v[0]),
            b = f.y(v[v.len() - 1]),
            l = cx - half,
            r = cx + half,
            t = f.y(q3),
            w = 2.0 * half,
            h = (f.y(q1) - f.y(q3)).max(0.5),
            m = f.y(med)
        );
    }
    out.push_str("</svg>\n");
    out
}

/// Prediction intervals sorted by true value: shaded band, truth line, and
/// mean dots.
pub fn interval_chart(rows: &[IntervalRow], title: &str) -> String {
    let mut sorted = rows.to_vec();
    sorted.sort_by(|a, b| a.truth.total_cmp(&b.truth).then(a.index.cmp(&b.index)));
    let (lo, hi) = finite_range(sorted.iter().flat_map(|r| [r.truth, r.lo, r.hi, r.mean]));
    let (lo, hi) = if lo.is_finite() { (lo, hi) } else { (0.0, 1.0) };
    let f = Frame::new(0.0, sorted.len().saturating_sub(1).max(1) as f64, lo, hi, 40.0, H - M);
    let mut out = open(title);
    f.axes(&mut out);
    let mut band = String::new();
    for (i, r) in sorted.iter().enumerate() {
        let _ = write!(band, "{:.2},{:.2} ", f.x(i as f64), f.y(r.hi));
    }
    for (i, r) in sorted.iter().enumerate().rev() {
        let _ = write!(band, "{:.2},{:.2} ", f.x(i as f64), f.y(r.lo));
    }
    let _ = write!(out, r#"<polygon points="{}" fill="orange" fill-opacity="0.3"/>"#, band.trim_end());
    let line: Vec<String> = sorted
        .iter()
        .enumerate()
        .map(|(i, r)| format!("{:.2},{:.2}", f.x(i as f64), f.y(r.truth)))
        .collect();
    let _ = write!(out, r#"<polyline points="{}" fill="none" stroke="black"/>"#, line.join(" "));
    for (i, r) in sorted.iter().enumerate() {
        let _ = write!(
            out,
            r#"<circle cx="{:.2}" cy="{:.2}" r="2.5" fill="steelblue"/>"#,
            f.x(i as f64),
            f.y(r.mean)
        );
    }
    out.push_str("</svg>\n");
    out
}

/// Reliability curve against the diagonal (upper panel) over a histogram of
/// predicted confidences (lower panel).
pub fn reliability_chart(diagram: &ReliabilityDiagram, title: &str) -> String {
    let top = Frame::new(0.0, 1.0, 0.0, 1.0, 40.0, 250.0);
    let max_count = diagram.bins.iter().map(|b| b.count).max().unwrap_or(0).max(1) as f64;
    let hist = Frame::new(0.0, 1.0, 0.0, max_count, 280.0, H - M + 10.0);
    let mut out = open(title);
    top.axes(&mut out);
    let _ = write!(
        out,
        r#"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="gray" stroke-dasharray="4"/>"#,
        top.x(0.0),
        top.y(0.0),
        top.x(1.0),
        top.y(1.0)
    );
    let points: Vec<String> = diagram
        .bins
        .iter()
        .filter_map(|b| Some(format!("{:.2},{:.2}", top.x(b.mean_confidence?), top.y(b.observed_frequency?))))
        .collect();
    let _ = write!(out, r#"<polyline points="{}" fill="none" stroke="crimson"/>"#, points.join(" "));
    for p in &points {
        let (x, y) = p.split_once(',').expect("formatted as x,y");
        let _ = write!(out, r#"<circle cx="{x}" cy="{y}" r="3" fill="crimson"/>"#);
    }
    for b in &diagram.bins {
        let _ = write!(
            out,
            r#"<rect x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}" fill="steelblue" fill-opacity="0.6"/>"#,
            hist.x(b.lo),
            hist.y(b.count as f64),
            hist.x(b.hi) - hist.x(b.lo),
            hist.y(0.0) - hist.y(b.count as f64)
        );
    }
    out.push_str("</svg>\n");
    out
}
