//! Static SVG plots with a fixed canvas and palette, so that identical
//! reports give byte-identical files.

use std::fmt::Write;
use std::str::FromStr;

use bangbang::levy::SamplePath;
use bangbang::montecarlo::BatteryReport;

use crate::error::CliError;
use crate::report::{Report, SolveResult, TaskResult};

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 400.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 20.0;
const TOP: f64 = 30.0;
const BOTTOM: f64 = 50.0;

const PALETTE: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"];
const LOW: (u8, u8, u8) = (0xf7, 0xfb, 0xff);
const HIGH: (u8, u8, u8) = (0x08, 0x30, 0x6b);
const STOP: &str = "#d62728";
const CONTINUE: &str = "#c6dbef";
const AXIS: &str = "#333333";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PlotKind {
    /// Snell envelope `V(n, z)` as a heat map.
    ValueHeatmap,
    /// Stop (red) and continue (blue) states over `(n, z)`.
    StopRegion,
    /// Paired differences with 95% intervals, one bar per rule.
    BatteryBars,
    /// Sample paths with their running maxima.
    Paths,
}

impl PlotKind {
    pub fn file_name(self) -> &'static str {
        match self {
            PlotKind::ValueHeatmap => "value_heatmap.svg",
            PlotKind::StopRegion => "stop_region.svg",
            PlotKind::BatteryBars => "battery_bars.svg",
            PlotKind::Paths => "paths.svg",
        }
    }

    /// The plots a report of this kind supports.
    pub fn for_report(report: &Report) -> Vec<PlotKind> {
        match &report.result {
            TaskResult::Solve(_) => vec![PlotKind::ValueHeatmap, PlotKind::StopRegion],
            TaskResult::Battery(_) => vec![PlotKind::BatteryBars],
            TaskResult::Simulate(s) if !s.sample_paths.is_empty() => vec![PlotKind::Paths],
            _ => vec![],
        }
    }
}

impl FromStr for PlotKind {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        match s {
            "value_heatmap" => Ok(PlotKind::ValueHeatmap),
            "stop_region" => Ok(PlotKind::StopRegion),
            "battery_bars" => Ok(PlotKind::BatteryBars),
            "paths" => Ok(PlotKind::Paths),
            other => Err(bangbang::Error::Argument(format!(
                "unknown plot kind '{other}' (value_heatmap, stop_region, battery_bars, paths)"
            ))
            .into()),
        }
    }
}

/// Renders `kind` from `report`; the report must be of a matching task.
pub fn emit_plots(report: &Report, kind: PlotKind) -> Result<String, CliError> {
    let mismatch = || -> CliError {
        bangbang::Error::Argument(format!("a {} report cannot be drawn as {kind:?}", report.task)).into()
    };
    match (&report.result, kind) {
        (TaskResult::Solve(s), PlotKind::ValueHeatmap) => Ok(value_heatmap(s)),
        (TaskResult::Solve(s), PlotKind::StopRegion) => Ok(stop_region(s)),
        (TaskResult::Battery(b), PlotKind::BatteryBars) => Ok(battery_bars(b)),
        (TaskResult::Simulate(s), PlotKind::Paths) if !s.sample_paths.is_empty() => Ok(paths(&s.sample_paths, s.horizon)),
        _ => Err(mismatch()),
    }
}

fn num(x: f64) -> String {
    let s = format!("{x:.2}");
    if s == "-0.00" {
        "0.00".to_string()
    } else {
        s
    }
}

fn label(x: f64) -> String {
    let s = format!("{x:.3}");
    if s == "-0.000" {
        "0.000".to_string()
    } else {
        s
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

fn lerp_color(t: f64) -> String {
    let t = if t.is_finite() { t.clamp(0.0, 1.0) } else { 0.0 };
    let mix = |a: u8, b: u8| (a as f64 + (b as f64 - a as f64) * t).round() as u8;
    format!("#{:02x}{:02x}{:02x}", mix(LOW.0, HIGH.0), mix(LOW.1, HIGH.1), mix(LOW.2, HIGH.2))
}

/// Linear map of `[lo, hi]` onto a pixel range; a flat range maps to its middle.
#[derive(Clone, Copy)]
struct Scale {
    lo: f64,
    hi: f64,
    a: f64,
    b: f64,
}

impl Scale {
    fn new(lo: f64, hi: f64, a: f64, b: f64) -> Self {
        if hi > lo {
            Scale { lo, hi, a, b }
        } else {
            Scale { lo: lo - 0.5, hi: lo + 0.5, a, b }
        }
    }

    fn at(&self, x: f64) -> f64 {
        self.a + (x - self.lo) / (self.hi - self.lo) * (self.b - self.a)
    }
}

struct Svg {
    buf: String,
}

impl Svg {
    fn new(title: &str) -> Self {
        let mut buf = String::new();
        writeln!(
            buf,
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\" viewBox=\"0 0 {w} {h}\" font-family=\"sans-serif\" font-size=\"11\">",
            w = WIDTH,
            h = HEIGHT
        )
        .unwrap();
        writeln!(buf, "<rect x=\"0\" y=\"0\" width=\"{WIDTH}\" height=\"{HEIGHT}\" fill=\"#ffffff\"/>").unwrap();
        writeln!(buf, "<text x=\"{}\" y=\"18\" text-anchor=\"middle\" font-size=\"13\">{}</text>", num(WIDTH / 2.0), escape(title)).unwrap();
        Svg { buf }
    }

    fn rect(&mut self, x: f64, y: f64, w: f64, h: f64, fill: &str) {
        writeln!(self.buf, "<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"{fill}\"/>", num(x), num(y), num(w), num(h)).unwrap();
    }

    fn line(&mut self, x1: f64, y1: f64, x2: f64, y2: f64, stroke: &str, dash: bool) {
        let d = if dash { " stroke-dasharray=\"4 3\"" } else { "" };
        writeln!(
            self.buf,
            "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"{stroke}\"{d}/>",
            num(x1),
            num(y1),
            num(x2),
            num(y2)
        )
        .unwrap();
    }

    fn polyline(&mut self, pts: &[(f64, f64)], stroke: &str, dash: bool) {
        let d = if dash { " stroke-dasharray=\"4 3\"" } else { "" };
        let p: Vec<String> = pts.iter().map(|(x, y)| format!("{},{}", num(*x), num(*y))).collect();
        writeln!(self.buf, "<polyline points=\"{}\" fill=\"none\" stroke=\"{stroke}\"{d}/>", p.join(" ")).unwrap();
    }

    fn text(&mut self, x: f64, y: f64, anchor: &str, s: &str) {
        writeln!(self.buf, "<text x=\"{}\" y=\"{}\" text-anchor=\"{anchor}\">{}</text>", num(x), num(y), escape(s)).unwrap();
    }

    /// Frame plus axis labels and end-point ticks.
    fn axes(&mut self, xs: Option<Scale>, ys: Scale, xlabel: &str, ylabel: &str) {
        let (x0, x1, y0, y1) = (LEFT, WIDTH - RIGHT, HEIGHT - BOTTOM, TOP);
        self.line(x0, y0, x1, y0, AXIS, false);
        self.line(x0, y0, x0, y1, AXIS, false);
        if let Some(xs) = xs {
            self.text(x0, y0 + 15.0, "middle", &label(xs.lo));
            self.text(x1, y0 + 15.0, "middle", &label(xs.hi));
        }
        self.text(x0 - 5.0, y0, "end", &label(ys.lo));
        self.text(x0 - 5.0, y1 + 4.0, "end", &label(ys.hi));
        self.text((x0 + x1) / 2.0, HEIGHT - 12.0, "middle", xlabel);
        writeln!(
            self.buf,
            "<text x=\"16\" y=\"{}\" text-anchor=\"middle\" transform=\"rotate(-90 16 {})\">{}</text>",
            num((y0 + y1) / 2.0),
            num((y0 + y1) / 2.0),
            escape(ylabel)
        )
        .unwrap();
    }

    fn finish(mut self) -> String {
        self.buf.push_str("</svg>\n");
        self.buf
    }
}

/// Cells of a `(n, z)` raster: `n` across, `z` up.
fn raster(s: &SolveResult, title: &str, fill: impl Fn(&crate::report::SolveRow) -> String) -> String {
    let zmax = s.rows.iter().map(|r| r.z).max().unwrap_or(0);
    let xs = Scale::new(0.0, s.horizon as f64 + 1.0, LEFT, WIDTH - RIGHT);
    let ys = Scale::new(0.0, zmax as f64 + 1.0, HEIGHT - BOTTOM, TOP);
    let mut svg = Svg::new(title);
    let cw = xs.at(1.0) - xs.at(0.0);
    let ch = ys.at(0.0) - ys.at(1.0);
    for r in &s.rows {
        svg.rect(xs.at(r.n as f64), ys.at(r.z as f64 + 1.0), cw, ch, &fill(r));
    }
    svg.axes(Some(xs), ys, "n (time)", "z (drawdown, lattice units)");
    svg.finish()
}

fn value_heatmap(s: &SolveResult) -> String {
    let finite = s.rows.iter().map(|r| r.value).filter(|v| v.is_finite());
    let lo = finite.clone().fold(f64::INFINITY, f64::min);
    let hi = finite.fold(f64::NEG_INFINITY, f64::max);
    let span = if hi > lo { hi - lo } else { 1.0 };
    let title = format!("V(n, z), value {} (range {} .. {})", label(s.value), label(lo), label(hi));
    raster(s, &title, |r| lerp_color((r.value - lo) / span))
}

fn stop_region(s: &SolveResult) -> String {
    raster(s, "stop region (red: stop, blue: continue)", |r| if r.stop { STOP } else { CONTINUE }.to_string())
}

fn battery_bars(b: &BatteryReport) -> String {
    let n = b.rows.len().max(1) as f64;
    let lo = b.rows.iter().map(|r| r.difference.ci95.0).fold(0.0f64, f64::min);
    let hi = b.rows.iter().map(|r| r.difference.ci95.1).fold(0.0f64, f64::max);
    let pad = 0.05 * (hi - lo).max(1e-12);
    let xs = Scale::new(0.0, n, LEFT, WIDTH - RIGHT);
    let ys = Scale::new(lo - pad, hi + pad, HEIGHT - BOTTOM, TOP);
    let mut svg = Svg::new(&format!("designated {} minus each rule (95% CI)", b.designation.rule.label()));
    svg.line(LEFT, ys.at(0.0), WIDTH - RIGHT, ys.at(0.0), AXIS, true);
    for (i, r) in b.rows.iter().enumerate() {
        let x = xs.at(i as f64 + 0.5);
        let w = 0.6 * (xs.at(1.0) - xs.at(0.0));
        let (y0, y1) = (ys.at(0.0), ys.at(r.difference.mean));
        let color = if r.pass { PALETTE[0] } else { PALETTE[1] };
        svg.rect(x - w / 2.0, y0.min(y1), w, (y0 - y1).abs(), color);
        svg.line(x, ys.at(r.difference.ci95.0), x, ys.at(r.difference.ci95.1), AXIS, false);
        svg.line(x - w / 4.0, ys.at(r.difference.ci95.0), x + w / 4.0, ys.at(r.difference.ci95.0), AXIS, false);
        svg.line(x - w / 4.0, ys.at(r.difference.ci95.1), x + w / 4.0, ys.at(r.difference.ci95.1), AXIS, false);
        svg.text(x, HEIGHT - BOTTOM + 28.0, "middle", &format!("#{}", i + 1));
    }
    svg.axes(None, ys, "rule (see battery.csv for labels)", "paired difference");
    svg.finish()
}

fn paths(ps: &[SamplePath], horizon: f64) -> String {
    let lo = ps.iter().flat_map(|p| p.values.iter()).fold(0.0f64, |a, v| a.min(*v));
    let hi = ps.iter().flat_map(|p| p.running_max.iter()).fold(0.0f64, |a, v| a.max(*v));
    let xs = Scale::new(0.0, horizon, LEFT, WIDTH - RIGHT);
    let ys = Scale::new(lo, hi, HEIGHT - BOTTOM, TOP);
    let mut svg = Svg::new("sample paths X (solid) and running maxima M (dashed)");
    for (i, p) in ps.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        svg.polyline(&steps(&p.times, &p.values, xs, ys), color, false);
        svg.polyline(&steps(&p.times, &p.running_max, xs, ys), color, true);
    }
    svg.axes(Some(xs), ys, "t", "level");
    svg.finish()
}

/// A right-continuous step function through the epochs.
fn steps(t: &[f64], v: &[f64], xs: Scale, ys: Scale) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(2 * t.len());
    for i in 0..t.len() {
        if i > 0 {
            out.push((xs.at(t[i]), ys.at(v[i - 1])));
        }
        out.push((xs.at(t[i]), ys.at(v[i])));
    }
    out
}
