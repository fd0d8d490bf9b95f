//! Minimal self-contained SVG line plots. Output bytes depend only on the data.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::LabError;
use crate::record::Series;

const W: f64 = 720.0;
const H: f64 = 450.0;
const LEFT: f64 = 80.0;
const RIGHT: f64 = 160.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 60.0;
const COLORS: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];

struct Axis {
    lo: f64,
    hi: f64,
    log: bool,
}

impl Axis {
    fn fit(values: impl Iterator<Item = f64>, log: bool) -> Option<Axis> {
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for v in values {
            let v = if log { v.log10() } else { v };
            lo = lo.min(v);
            hi = hi.max(v);
        }
        if !lo.is_finite() {
            return None;
        }
        if hi - lo < 1e-12 * (1.0 + lo.abs()) {
            lo -= 0.5;
            hi += 0.5;
        }
        if log {
            lo = lo.floor();
            hi = hi.ceil();
        } else {
            let pad = 0.05 * (hi - lo);
            lo -= pad;
            hi += pad;
        }
        Some(Axis { lo, hi, log })
    }

    fn frac(&self, v: f64) -> f64 {
        let v = if self.log { v.log10() } else { v };
        (v - self.lo) / (self.hi - self.lo)
    }

    /// Tick positions in data units with labels.
    fn ticks(&self) -> Vec<(f64, String)> {
        if self.log {
            let span = (self.hi - self.lo) as i64;
            let step = ((span + 7) / 8).max(1);
            (self.lo as i64..=self.hi as i64).step_by(step as usize).map(|e| (10f64.powi(e as i32), format!("1e{e}"))).collect()
        } else {
            let raw = (self.hi - self.lo) / 5.0;
            let mag = 10f64.powf(raw.log10().floor());
            let step = [1.0, 2.0, 5.0, 10.0].iter().map(|m| m * mag).find(|s| *s >= raw).unwrap_or(10.0 * mag);
            let first = (self.lo / step).ceil() as i64;
            let last = (self.hi / step).floor() as i64;
            (first..=last).map(|k| (k as f64 * step, fmt_tick(k as f64 * step))).collect()
        }
    }
}

fn fmt_tick(v: f64) -> String {
    if v == 0.0 {
        return "0".into();
    }
    let a = v.abs();
    if (1e-3..1e4).contains(&a) {
        let s = format!("{v:.4}");
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        format!("{v:.1e}")
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn usable(v: f64, log: bool) -> bool {
    v.is_finite() && (!log || v > 0.0)
}

pub fn render_svg(series: &Series, title: &str) -> Result<String, LabError> {
    if series.rows.is_empty() || series.columns.len() < 2 {
        return Err(LabError::Config(format!("plot `{title}` needs a nonempty series with at least two columns")));
    }
    let ok = |r: &Vec<f64>, j: usize| usable(r[0], series.log_x) && usable(r[j], series.log_y);
    let ncols = series.columns.len();
    let xs = series.rows.iter().filter(|r| (1..ncols).any(|j| ok(r, j))).map(|r| r[0]);
    let ys = series.rows.iter().flat_map(|r| (1..ncols).filter(move |&j| ok(r, j)).map(move |j| r[j]));
    let (Some(ax), Some(ay)) = (Axis::fit(xs, series.log_x), Axis::fit(ys, series.log_y)) else {
        return Err(LabError::Config(format!("plot `{title}` has no drawable points")));
    };
    let pw = W - LEFT - RIGHT;
    let ph = H - TOP - BOTTOM;
    let px = |x: f64| LEFT + ax.frac(x) * pw;
    let py = |y: f64| TOP + (1.0 - ay.frac(y)) * ph;

    let mut s = String::new();
    let _ = writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}" font-family="sans-serif" font-size="12">"#);
    let _ = writeln!(s, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
    let _ = writeln!(s, r#"<text x="{:.1}" y="24" text-anchor="middle" font-size="14">{}</text>"#, LEFT + pw / 2.0, escape(title));
    let _ = writeln!(s, r#"<rect x="{LEFT}" y="{TOP}" width="{pw}" height="{ph}" fill="none" stroke="black"/>"#);
    for (v, label) in ax.ticks() {
        let x = px(v);
        let _ = writeln!(s, r##"<line x1="{x:.2}" y1="{:.2}" x2="{x:.2}" y2="{:.2}" stroke="#ddd"/>"##, TOP, TOP + ph);
        let _ = writeln!(s, r#"<text x="{x:.2}" y="{:.2}" text-anchor="middle">{}</text>"#, TOP + ph + 18.0, escape(&label));
    }
    for (v, label) in ay.ticks() {
        let y = py(v);
        let _ = writeln!(s, r##"<line x1="{LEFT}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}" stroke="#ddd"/>"##, LEFT + pw);
        let _ = writeln!(s, r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"#, LEFT - 6.0, y + 4.0, escape(&label));
    }
    let xlabel = if series.log_x { format!("{} (log)", series.columns[0]) } else { series.columns[0].clone() };
    let _ = writeln!(s, r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{}</text>"#, LEFT + pw / 2.0, H - 16.0, escape(&xlabel));
    if series.log_y {
        let _ = writeln!(s, r#"<text x="16" y="{:.1}" transform="rotate(-90 16 {:.1})" text-anchor="middle">log scale</text>"#, TOP + ph / 2.0, TOP + ph / 2.0);
    }
    for j in 1..ncols {
        let color = COLORS[(j - 1) % COLORS.len()];
        let pts: Vec<String> = series.rows.iter().filter(|r| ok(r, j)).map(|r| format!("{:.2},{:.2}", px(r[0]), py(r[j]))).collect();
        if pts.len() > 1 {
            let _ = writeln!(s, r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#, pts.join(" "));
        }
        for p in pts.iter().filter(|_| series.rows.len() <= 40) {
            let (x, y) = p.split_once(',').expect("point pair");
            let _ = writeln!(s, r#"<circle cx="{x}" cy="{y}" r="2.5" fill="{color}"/>"#);
        }
        let ly = TOP + 16.0 * j as f64;
        let _ = writeln!(s, r#"<line x1="{:.1}" y1="{ly:.1}" x2="{:.1}" y2="{ly:.1}" stroke="{color}" stroke-width="2"/>"#, W - RIGHT + 12.0, W - RIGHT + 32.0);
        let _ = writeln!(s, r#"<text x="{:.1}" y="{:.1}">{}</text>"#, W - RIGHT + 38.0, ly + 4.0, escape(&series.columns[j]));
    }
    s.push_str("</svg>\n");
    Ok(s)
}

pub fn emit_plot(series: &Series, title: &str, path: &Path) -> Result<(), LabError> {
    let svg = render_svg(series, title)?;
    std::fs::write(path, svg).map_err(|e| LabError::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tail() -> Series {
        let mut s = Series::new(&["ln_p", "p2_xi", "fit"]);
        for k in 0..200 {
            let t = k as f64 * 0.05;
            s.push(vec![t, (1.0 * t).sin(), (1.0 * t).sin() * 0.99]);
        }
        s
    }

    #[test]
    fn deterministic_and_well_formed() {
        let a = render_svg(&tail(), "Danilov tail").unwrap();
        let b = render_svg(&tail(), "Danilov tail").unwrap();
        assert_eq!(a, b);
        assert!(a.starts_with("<svg") && a.ends_with("</svg>\n"));
        assert_eq!(a.matches("<polyline").count(), 2);
    }

    #[test]
    fn log_axes_drop_nonpositive_points() {
        let mut s = Series::new(&["p_max", "norm"]).log(true, true);
        s.push(vec![1e2, 0.0]);
        s.push(vec![1e3, 10.0]);
        s.push(vec![1e4, 20.0]);
        let svg = render_svg(&s, "ladder").unwrap();
        assert!(svg.contains("1e3") && svg.contains("(log)"));
        assert_eq!(svg.matches("<circle").count(), 2);
    }

    #[test]
    fn empty_series_rejected() {
        assert!(render_svg(&Series::new(&["x", "y"]), "empty").is_err());
    }
}
