//! Minimal SVG line charts: axes, ticks, legend and translucent bands.

use std::fmt::Write as _;
use std::path::Path;

use anyhow::{bail, Context, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FigureKind {
    Path,
    ErrorVsIter,
    SparsityVsIter,
    F1VsParam,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub name: String,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    /// Half-width of a band drawn around `y`.
    pub band: Option<Vec<f64>>,
}

impl Series {
    pub fn new(name: impl Into<String>, x: Vec<f64>, y: Vec<f64>) -> Self {
        Self { name: name.into(), x, y, band: None }
    }

    pub fn with_band(mut self, band: Vec<f64>) -> Self {
        self.band = Some(band);
        self
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FigureSpec {
    pub kind: FigureKind,
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub series: Vec<Series>,
    pub log_y: bool,
    pub filename: String,
}

impl FigureSpec {
    pub fn new(kind: FigureKind, title: &str, x_label: &str, y_label: &str, filename: &str) -> Self {
        Self {
            kind,
            title: title.into(),
            x_label: x_label.into(),
            y_label: y_label.into(),
            series: Vec::new(),
            log_y: kind == FigureKind::ErrorVsIter,
            filename: filename.into(),
        }
    }

    pub fn push(&mut self, series: Series) {
        self.series.push(series);
    }

    pub fn validate(&self) -> Result<()> {
        if self.series.is_empty() {
            bail!("figure {} has no series", self.filename);
        }
        for s in &self.series {
            if s.x.is_empty() || s.x.len() != s.y.len() {
                bail!("series `{}` of {} has {} x and {} y values", s.name, self.filename, s.x.len(), s.y.len());
            }
            if !s.x.windows(2).all(|w| w[1] > w[0]) {
                bail!("series `{}` of {} has x values that are not strictly increasing", s.name, self.filename);
            }
            if s.band.as_ref().is_some_and(|b| b.len() != s.y.len()) {
                bail!("series `{}` of {} has a band of the wrong length", s.name, self.filename);
            }
        }
        Ok(())
    }

    pub fn render(&self) -> Result<String> {
        self.validate()?;
        Ok(render(self))
    }

    pub fn write(&self, dir: &Path) -> Result<()> {
        let path = dir.join(&self.filename);
        std::fs::write(&path, self.render()?).with_context(|| format!("writing {}", path.display()))
    }
}

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 460.0;
const LEFT: f64 = 80.0;
const RIGHT: f64 = 190.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 60.0;
const LOG_FLOOR: f64 = 1e-16;
const PALETTE: [&str; 10] = ["#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"];

struct Axis {
    lo: f64,
    hi: f64,
    log: bool,
}

impl Axis {
    fn fit(values: impl Iterator<Item = f64>, log: bool) -> Self {
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for v in values.filter(|v| v.is_finite()) {
            let v = if log { v.max(LOG_FLOOR).log10() } else { v };
            lo = lo.min(v);
            hi = hi.max(v);
        }
        if !lo.is_finite() {
            (lo, hi) = (0.0, 1.0);
        }
        if hi - lo < 1e-12 {
            (lo, hi) = (lo - 0.5, hi + 0.5);
        }
        if log {
            (lo, hi) = (lo.floor(), hi.ceil());
        } else {
            let pad = 0.05 * (hi - lo);
            (lo, hi) = (lo - pad, hi + pad);
        }
        Self { lo, hi, log }
    }

    fn unit(&self, v: f64) -> f64 {
        let v = if self.log { v.max(LOG_FLOOR).log10() } else { v };
        ((v - self.lo) / (self.hi - self.lo)).clamp(-0.05, 1.05)
    }

    fn ticks(&self) -> Vec<(f64, String)> {
        if self.log {
            let step = ((self.hi - self.lo) / 8.0).ceil().max(1.0);
            let mut e = self.lo;
            let mut out = Vec::new();
            while e <= self.hi + 1e-9 {
                out.push((10f64.powf(e), format!("1e{}", e as i64)));
                e += step;
            }
            return out;
        }
        let raw = (self.hi - self.lo) / 6.0;
        let mag = 10f64.powf(raw.log10().floor());
        let step = [1.0, 2.0, 5.0, 10.0].iter().map(|m| m * mag).find(|s| *s >= raw).unwrap_or(raw);
        let mut v = (self.lo / step).ceil() * step;
        let mut out = Vec::new();
        while v <= self.hi + 1e-9 * step {
            let label = if step >= 1.0 { format!("{}", v.round()) } else { format!("{:.*}", (-step.log10().floor()) as usize, v) };
            out.push((v, label));
            v += step;
        }
        out
    }
}

fn esc(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn render(fig: &FigureSpec) -> String {
    let xs = Axis::fit(fig.series.iter().flat_map(|s| s.x.iter().copied()), false);
    let band_pts = fig.series.iter().flat_map(|s| {
        let b = s.band.clone().unwrap_or_else(|| vec![0.0; s.y.len()]);
        s.y.iter().zip(b).flat_map(|(y, h)| [y - h, y + h]).collect::<Vec<_>>()
    });
    let ys = Axis::fit(band_pts, fig.log_y);
    let pw = WIDTH - LEFT - RIGHT;
    let ph = HEIGHT - TOP - BOTTOM;
    let px = |x: f64| LEFT + xs.unit(x) * pw;
    let py = |y: f64| TOP + (1.0 - ys.unit(y)) * ph;

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(s, r#"<text x="{}" y="24" text-anchor="middle" font-size="15">{}</text>"#, LEFT + pw / 2.0, esc(&fig.title));
    for (v, label) in xs.ticks() {
        let x = px(v);
        let _ = writeln!(s, r##"<line x1="{x:.2}" y1="{TOP}" x2="{x:.2}" y2="{:.2}" stroke="#eee"/>"##, TOP + ph);
        let _ = writeln!(s, r#"<text x="{x:.2}" y="{:.2}" text-anchor="middle">{}</text>"#, TOP + ph + 16.0, esc(&label));
    }
    for (v, label) in ys.ticks() {
        let y = py(v);
        let _ = writeln!(s, r##"<line x1="{LEFT}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}" stroke="#eee"/>"##, LEFT + pw);
        let _ = writeln!(s, r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"#, LEFT - 6.0, y + 4.0, esc(&label));
    }
    let _ = writeln!(s, r#"<rect x="{LEFT}" y="{TOP}" width="{pw}" height="{ph}" fill="none" stroke="black"/>"#);
    let _ = writeln!(s, r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#, LEFT + pw / 2.0, HEIGHT - 18.0, esc(&fig.x_label));
    let _ = writeln!(
        s,
        r#"<text x="18" y="{0}" text-anchor="middle" transform="rotate(-90 18 {0})">{1}</text>"#,
        TOP + ph / 2.0,
        esc(&fig.y_label)
    );

    for (i, series) in fig.series.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        if let Some(band) = &series.band {
            let upper = series.x.iter().zip(&series.y).zip(band).map(|((x, y), h)| format!("{:.2},{:.2}", px(*x), py(y + h)));
            let lower = series.x.iter().zip(&series.y).zip(band).rev().map(|((x, y), h)| format!("{:.2},{:.2}", px(*x), py(y - h)));
            let pts: Vec<String> = upper.chain(lower).collect();
            let _ = writeln!(s, r#"<polygon points="{}" fill="{color}" fill-opacity="0.18" stroke="none"/>"#, pts.join(" "));
        }
        let pts: Vec<String> = series.x.iter().zip(&series.y).map(|(x, y)| format!("{:.2},{:.2}", px(*x), py(*y))).collect();
        let _ = writeln!(s, r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="1.6"/>"#, pts.join(" "));
        if series.x.len() <= 12 {
            for p in &pts {
                let (cx, cy) = p.split_once(',').unwrap_or(("0", "0"));
                let _ = writeln!(s, r#"<circle cx="{cx}" cy="{cy}" r="2.5" fill="{color}"/>"#);
            }
        }
        let ly = TOP + 14.0 + 18.0 * i as f64;
        let lx = LEFT + pw + 14.0;
        let _ = writeln!(s, r#"<line x1="{lx}" y1="{ly}" x2="{}" y2="{ly}" stroke="{color}" stroke-width="2"/>"#, lx + 22.0);
        let _ = writeln!(s, r#"<text x="{}" y="{}">{}</text>"#, lx + 28.0, ly + 4.0, esc(&series.name));
    }
    s.push_str("</svg>\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fig() -> FigureSpec {
        let mut f = FigureSpec::new(FigureKind::F1VsParam, "F1 <n>", "n", "F1", "f.svg");
        f.push(Series::new("irksn", vec![10.0, 30.0, 50.0], vec![0.2, 0.5, 0.9]).with_band(vec![0.1, 0.05, 0.0]));
        f
    }

    #[test]
    fn renders_lines_bands_and_legend() {
        let svg = fig().render().unwrap();
        assert!(svg.starts_with("<svg") && svg.trim_end().ends_with("</svg>"));
        assert_eq!(svg.matches("<polyline").count(), 1);
        assert_eq!(svg.matches("<polygon").count(), 1);
        assert!(svg.contains(">irksn<") && svg.contains("F1 &lt;n&gt;"));
    }

    #[test]
    fn rejects_bad_series() {
        let mut f = fig();
        f.series[0].x = vec![1.0, 1.0, 2.0];
        assert!(f.render().is_err());
        let empty = FigureSpec::new(FigureKind::Path, "t", "x", "y", "e.svg");
        assert!(empty.render().is_err());
    }

    #[test]
    fn log_axis_handles_zero() {
        let mut f = FigureSpec::new(FigureKind::ErrorVsIter, "e", "t", "err", "e.svg");
        f.push(Series::new("a", vec![1.0, 2.0, 3.0], vec![1.0, 1e-3, 0.0]));
        let svg = f.render().unwrap();
        assert!(svg.contains("1e0") && !svg.contains("NaN"));
    }
}
