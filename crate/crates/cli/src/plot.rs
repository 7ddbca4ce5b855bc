use std::fmt::Write;

use crate::report::RunReport;

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 400.0;
const PAD: f64 = 50.0;

/// A static scatter of every row: observed value as a dot (red when the row fails) and its
/// bound as a grey tick, against the case index.
pub fn svg(report: &RunReport) -> String {
    let finite = |v: f64| v.is_finite().then_some(v);
    let values: Vec<f64> = report
        .rows
        .iter()
        .flat_map(|r| [finite(r.bound), finite(r.observed)])
        .flatten()
        .collect();
    let (mut lo, mut hi) = values
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| {
            (a.min(v), b.max(v))
        });
    if !(lo < hi) {
        (lo, hi) = if lo.is_finite() {
            (lo - 1.0, lo + 1.0)
        } else {
            (0.0, 1.0)
        };
    }
    let n = report.rows.len().max(2) as f64;
    let x = |i: usize| PAD + (WIDTH - 2.0 * PAD) * i as f64 / (n - 1.0);
    let y = |v: f64| HEIGHT - PAD - (HEIGHT - 2.0 * PAD) * (v - lo) / (hi - lo);

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<text x="{PAD}" y="20">{} ({} rows, {})</text>"#,
        report.experiment,
        report.rows.len(),
        if report.pass { "pass" } else { "FAIL" }
    );
    let _ = writeln!(
        s,
        r#"<path d="M{PAD} {top} V{bottom} H{right}" stroke="black" fill="none"/>"#,
        top = PAD,
        bottom = HEIGHT - PAD,
        right = WIDTH - PAD
    );
    let _ = writeln!(s, r#"<text x="5" y="{}">{hi:.4e}</text>"#, PAD);
    let _ = writeln!(s, r#"<text x="5" y="{}">{lo:.4e}</text>"#, HEIGHT - PAD);
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}">case</text>"#,
        WIDTH / 2.0,
        HEIGHT - 15.0
    );
    for (i, row) in report.rows.iter().enumerate() {
        if let Some(b) = finite(row.bound) {
            let _ = writeln!(
                s,
                r##"<path d="M{:.2} {:.2} h6" stroke="#999" transform="translate(-3 0)"/>"##,
                x(i),
                y(b)
            );
        }
        if let Some(o) = finite(row.observed) {
            let color = if row.pass { "#1f5fbf" } else { "#d62728" };
            let _ = writeln!(
                s,
                r#"<circle cx="{:.2}" cy="{:.2}" r="2" fill="{color}"/>"#,
                x(i),
                y(o)
            );
        }
    }
    s.push_str("</svg>\n");
    s
}
