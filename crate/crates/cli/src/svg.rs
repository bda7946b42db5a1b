//! Minimal SVG heatmaps of a sweep: channels down, noise levels across.

use std::fmt::Write;

use mmfpls::security::{Side, Snr, SweepReport};

const CELL_W: f64 = 28.0;
const CELL_H: f64 = 9.0;
const LEFT: f64 = 60.0;
const TOP: f64 = 40.0;
const LEGEND_W: f64 = 120.0;

// Perceptually ordered stops, dark to bright.
const STOPS: [(f64, [u8; 3]); 5] = [
    (0.00, [68, 1, 84]),
    (0.25, [59, 82, 139]),
    (0.50, [33, 145, 140]),
    (0.75, [94, 201, 98]),
    (1.00, [253, 231, 37]),
];

fn color(t: f64) -> String {
    let t = t.clamp(0.0, 1.0);
    let k = STOPS.windows(2).position(|w| t <= w[1].0).unwrap_or(STOPS.len() - 2);
    let (t0, c0) = STOPS[k];
    let (t1, c1) = STOPS[k + 1];
    let f = if t1 > t0 { (t - t0) / (t1 - t0) } else { 0.0 };
    let mix = |i: usize| (c0[i] as f64 + f * (c1[i] as f64 - c0[i] as f64)).round() as u8;
    format!("#{:02x}{:02x}{:02x}", mix(0), mix(1), mix(2))
}

/// dB range shared by both sides so the two maps are comparable.
pub fn db_range(report: &SweepReport) -> (f64, f64) {
    let values = report.bob_snr.iter().chain(&report.eve_snr).flatten().filter_map(Snr::db);
    let (lo, hi) = values.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
    if !lo.is_finite() {
        (0.0, 1.0)
    } else if hi - lo < 1e-9 {
        (lo - 0.5, hi + 0.5)
    } else {
        (lo, hi)
    }
}

pub fn heatmap(report: &SweepReport, side: Side, range: (f64, f64)) -> String {
    let rows = report.channels.len();
    let cols = report.noise_levels.len();
    let width = LEFT + cols as f64 * CELL_W + LEGEND_W;
    let height = TOP + rows as f64 * CELL_H + 40.0;
    let (lo, hi) = range;
    let grid = report.snr(side);
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="9">"#
    );
    s.push_str(
        r##"<defs><pattern id="failed" width="6" height="6" patternUnits="userSpaceOnUse" patternTransform="rotate(45)"><rect width="6" height="6" fill="#d9d9d9"/><line x1="0" y1="0" x2="0" y2="6" stroke="#b00000" stroke-width="2"/></pattern></defs>
"##,
    );
    let _ = writeln!(
        s,
        r#"<text x="{LEFT}" y="16" font-size="12">{} mean SNR (dB), {} trials per cell</text>"#,
        match side {
            Side::Bob => "Bob",
            Side::Eve => "Eve",
        },
        report.trials_per_cell
    );
    for (ci, &channel) in report.channels.iter().enumerate() {
        let y = TOP + ci as f64 * CELL_H;
        for (li, cell) in grid[ci].iter().enumerate() {
            let x = LEFT + li as f64 * CELL_W;
            let fill = match cell {
                Snr::Db(v) => color((v - lo) / (hi - lo)),
                Snr::Failed => "url(#failed)".to_string(),
            };
            let label = match cell {
                Snr::Db(v) => format!("{v:.3} dB"),
                Snr::Failed => "FAILED".into(),
            };
            let _ = writeln!(
                s,
                r#"<rect x="{x}" y="{y}" width="{CELL_W}" height="{CELL_H}" fill="{fill}"><title>channel {} level {}: {label}</title></rect>"#,
                channel + 1,
                report.noise_levels[li]
            );
        }
        if channel == 0 || (channel + 1) % 5 == 0 {
            let _ = writeln!(
                s,
                r#"<text x="{}" y="{}" text-anchor="end">{}</text>"#,
                LEFT - 4.0,
                y + CELL_H - 1.0,
                channel + 1
            );
        }
    }
    let bottom = TOP + rows as f64 * CELL_H;
    for (li, level) in report.noise_levels.iter().enumerate() {
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{}" text-anchor="middle">{:.0}%</text>"#,
            LEFT + (li as f64 + 0.5) * CELL_W,
            bottom + 12.0,
            level * 100.0
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" text-anchor="middle">artificial noise level</text>"#,
        LEFT + cols as f64 * CELL_W / 2.0,
        bottom + 28.0
    );
    let _ = writeln!(
        s,
        r#"<text x="14" y="{}" transform="rotate(-90 14 {})" text-anchor="middle">mode channel</text>"#,
        TOP + rows as f64 * CELL_H / 2.0,
        TOP + rows as f64 * CELL_H / 2.0
    );

    // Color bar plus the FAILED swatch.
    let lx = LEFT + cols as f64 * CELL_W + 20.0;
    let steps = 40;
    let bar_h = 200.0;
    for k in 0..steps {
        let t = 1.0 - k as f64 / (steps - 1) as f64;
        let _ = writeln!(
            s,
            r#"<rect x="{lx}" y="{}" width="14" height="{}" fill="{}"/>"#,
            TOP + k as f64 * bar_h / steps as f64,
            bar_h / steps as f64 + 0.5,
            color(t)
        );
    }
    let _ = writeln!(s, r#"<text x="{}" y="{}">{hi:.1} dB</text>"#, lx + 18.0, TOP + 8.0);
    let _ = writeln!(s, r#"<text x="{}" y="{}">{lo:.1} dB</text>"#, lx + 18.0, TOP + bar_h);
    let fy = TOP + bar_h + 20.0;
    let _ = writeln!(s, r##"<rect x="{lx}" y="{fy}" width="14" height="14" fill="url(#failed)" stroke="#000" stroke-width="0.5"/>"##);
    let _ = writeln!(s, r#"<text x="{}" y="{}">FAILED</text>"#, lx + 18.0, fy + 11.0);
    s.push_str("</svg>\n");
    s
}
