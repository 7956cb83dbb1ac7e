//! Static SVG line and box plots with no external assets.

use std::fmt::Write;

const W: f64 = 720.0;
const H: f64 = 480.0;
const MARGIN: f64 = 60.0;
const COLORS: [&str; 6] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b",
];

pub struct Series {
    pub label: String,
    pub points: Vec<(f64, f64)>,
}

pub struct BoxGlyph {
    pub x: f64,
    pub min: f64,
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
    pub max: f64,
}

#[derive(Default)]
pub struct Chart {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub series: Vec<Series>,
    pub boxes: Vec<BoxGlyph>,
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

struct Frame {
    x0: f64,
    x1: f64,
    y0: f64,
    y1: f64,
}

impl Frame {
    fn px(&self, x: f64) -> f64 {
        MARGIN + (x - self.x0) / (self.x1 - self.x0) * (W - 2.0 * MARGIN)
    }

    fn py(&self, y: f64) -> f64 {
        H - MARGIN - (y - self.y0) / (self.y1 - self.y0) * (H - 2.0 * MARGIN)
    }
}

fn span(lo: f64, hi: f64) -> (f64, f64) {
    if !lo.is_finite() || !hi.is_finite() {
        return (0.0, 1.0);
    }
    if hi > lo {
        (lo, hi)
    } else {
        (lo - 0.5, hi + 0.5)
    }
}

impl Chart {
    fn frame(&self) -> Frame {
        let xs = self
            .series
            .iter()
            .flat_map(|s| s.points.iter().map(|p| p.0))
            .chain(self.boxes.iter().map(|b| b.x));
        let ys = self
            .series
            .iter()
            .flat_map(|s| s.points.iter().map(|p| p.1))
            .chain(self.boxes.iter().flat_map(|b| [b.min, b.max]));
        let (x0, x1) = xs.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), x| {
            (a.min(x), b.max(x))
        });
        let (y0, y1) = ys.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), y| {
            (a.min(y), b.max(y))
        });
        let (x0, x1) = span(x0, x1);
        let (y0, y1) = span(y0, y1);
        Frame { x0, x1, y0, y1 }
    }

    pub fn render(&self) -> String {
        let f = self.frame();
        let mut s = String::new();
        writeln!(
            s,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}" font-family="sans-serif" font-size="12">"#
        )
        .unwrap();
        writeln!(s, r#"<rect width="{W}" height="{H}" fill="white"/>"#).unwrap();
        writeln!(
            s,
            r#"<text x="{}" y="24" text-anchor="middle" font-size="15">{}</text>"#,
            W / 2.0,
            escape(&self.title)
        )
        .unwrap();
        // axes
        let (left, right, top, bottom) = (MARGIN, W - MARGIN, MARGIN, H - MARGIN);
        writeln!(
            s,
            r#"<path d="M{left} {top} L{left} {bottom} L{right} {bottom}" fill="none" stroke="black"/>"#
        )
        .unwrap();
        for (v, anchor, x) in [(f.x0, "start", left), (f.x1, "end", right)] {
            writeln!(
                s,
                r#"<text x="{x}" y="{}" text-anchor="{anchor}">{}</text>"#,
                bottom + 16.0,
                fmt_num(v)
            )
            .unwrap();
        }
        for (v, y) in [(f.y0, bottom), (f.y1, top)] {
            writeln!(
                s,
                r#"<text x="{}" y="{y}" text-anchor="end">{}</text>"#,
                left - 4.0,
                fmt_num(v)
            )
            .unwrap();
        }
        writeln!(
            s,
            r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#,
            W / 2.0,
            H - 16.0,
            escape(&self.x_label)
        )
        .unwrap();
        writeln!(
            s,
            r#"<text x="16" y="{}" text-anchor="middle" transform="rotate(-90 16 {})">{}</text>"#,
            H / 2.0,
            H / 2.0,
            escape(&self.y_label)
        )
        .unwrap();

        let half = if self.boxes.len() > 1 {
            0.3 * (right - left) / self.boxes.len() as f64
        } else {
            10.0
        };
        for b in &self.boxes {
            let x = f.px(b.x);
            let (ymin, yq1, ymed, yq3, ymax) = (
                f.py(b.min),
                f.py(b.q1),
                f.py(b.median),
                f.py(b.q3),
                f.py(b.max),
            );
            writeln!(
                s,
                r##"<g class="box"><line x1="{x:.2}" y1="{ymin:.2}" x2="{x:.2}" y2="{ymax:.2}" stroke="#555"/><rect x="{:.2}" y="{yq3:.2}" width="{:.2}" height="{:.2}" fill="#cfe0f3" stroke="#1f77b4"/><line x1="{:.2}" y1="{ymed:.2}" x2="{:.2}" y2="{ymed:.2}" stroke="#d62728"/></g>"##,
                x - half,
                2.0 * half,
                (yq1 - yq3).max(0.5),
                x - half,
                x + half
            )
            .unwrap();
        }
        for (i, series) in self.series.iter().enumerate() {
            let color = COLORS[i % COLORS.len()];
            let pts: Vec<String> = series
                .points
                .iter()
                .map(|&(x, y)| format!("{:.2},{:.2}", f.px(x), f.py(y)))
                .collect();
            writeln!(
                s,
                r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="1.5"/>"#,
                pts.join(" ")
            )
            .unwrap();
            writeln!(
                s,
                r#"<text x="{}" y="{}" fill="{color}">{}</text>"#,
                right - 120.0,
                top + 14.0 * (i as f64 + 1.0),
                escape(&series.label)
            )
            .unwrap();
        }
        s.push_str("</svg>\n");
        s
    }
}

fn fmt_num(v: f64) -> String {
    if v != 0.0 && (v.abs() < 1e-2 || v.abs() >= 1e4) {
        format!("{v:.2e}")
    } else {
        format!("{v:.3}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn renders_one_polyline_per_series() {
        let chart = Chart {
            title: "a < b & c".into(),
            series: vec![
                Series {
                    label: "one".into(),
                    points: vec![(0.0, 1.0), (1.0, 2.0)],
                },
                Series {
                    label: "two".into(),
                    points: vec![(0.0, 0.0)],
                },
            ],
            boxes: vec![BoxGlyph {
                x: 0.5,
                min: 0.0,
                q1: 0.5,
                median: 1.0,
                q3: 1.5,
                max: 2.0,
            }],
            ..Chart::default()
        };
        let s = chart.render();
        assert_eq!(s.matches("<polyline").count(), 2);
        assert_eq!(s.matches(r#"class="box""#).count(), 1);
        assert!(s.contains("a &lt; b &amp; c"));
        assert!(!s.contains("NaN"));
    }
}
