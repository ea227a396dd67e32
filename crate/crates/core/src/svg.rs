//! SVG figures of plane tropical curves: the curve with edge lengths next to
//! its dual subdivision, an optional amoeba overlay and region shading.

use std::fmt::Write as _;

use crate::localization::regions::near_dominant;
use crate::localization::{log_terms, CutoffParams, PointCloud};
use crate::monodromy::lattice_length;
use crate::report::rational_string;
use crate::subdivision::RegularSubdivision;
use crate::tropical::TropicalComplex;

pub const UNIT: f64 = 40.0;

#[derive(Debug, Clone)]
pub struct PlotOptions<'a> {
    /// Half-width of the square clip box.
    pub clip: f64,
    pub amoeba: Option<&'a PointCloud>,
    pub regions: Option<CutoffParams>,
    /// Raster step for region shading, in tropical units.
    pub region_step: f64,
}

impl Default for PlotOptions<'_> {
    fn default() -> Self {
        PlotOptions { clip: 20.0, amoeba: None, regions: None, region_step: 0.025 }
    }
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
#[error("plots need ambient dimension 2, got {0}")]
pub struct UnsupportedDimension(pub usize);

struct Frame {
    clip: f64,
}

impl Frame {
    fn px(&self, x: f64, y: f64) -> (f64, f64) {
        ((x + self.clip) * UNIT, (self.clip - y) * UNIT)
    }
}

/// Liang–Barsky clip of `p + t d`, `t ∈ [t0, t1]`, to the box.
fn clip_segment(p: [f64; 2], d: [f64; 2], mut t0: f64, mut t1: f64, c: f64) -> Option<([f64; 2], [f64; 2])> {
    for k in 0..2 {
        if d[k] == 0.0 {
            if p[k].abs() > c {
                return None;
            }
            continue;
        }
        let (a, b) = ((-c - p[k]) / d[k], (c - p[k]) / d[k]);
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        t0 = t0.max(lo);
        t1 = t1.min(hi);
    }
    (t0 <= t1).then(|| ([p[0] + t0 * d[0], p[1] + t0 * d[1]], [p[0] + t1 * d[0], p[1] + t1 * d[1]]))
}

fn fmt(v: f64) -> String {
    let s = format!("{v:.2}");
    s.trim_end_matches('0').trim_end_matches('.').to_string()
}

fn region_layer(out: &mut String, complex: &TropicalComplex, params: &CutoffParams, f: &Frame, step: f64) {
    let cells: Vec<_> = complex.dense_cells().collect();
    let n = (2.0 * f.clip / step).round() as usize;
    out.push_str("<g id=\"regions\" stroke=\"none\" opacity=\"0.6\">\n");
    for row in 0..n {
        let y = f.clip - (row as f64 + 0.5) * step;
        let mut run: Option<(usize, usize)> = None;
        let flush = |run: Option<(usize, usize)>, end: usize, out: &mut String| {
            if let Some((start, dim)) = run {
                let color = if dim == 0 { "#e8a0a0" } else { "#a0c4e8" };
                let (x, yy) = f.px(-f.clip + start as f64 * step, y + step / 2.0);
                let _ = writeln!(
                    out,
                    "<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"{color}\"/>",
                    fmt(x),
                    fmt(yy),
                    fmt((end - start) as f64 * step * UNIT),
                    fmt(step * UNIT)
                );
            }
        };
        for col in 0..n {
            let x = -f.clip + (col as f64 + 0.5) * step;
            let logs = log_terms(&complex.poly, &[x, y]);
            let near = near_dominant(&logs, params.c0);
            let here = if near.len() < 2 { None } else { cells.iter().find(|c| c.dominant_set == near).map(|c| c.dim) };
            let same = match (run, here) {
                (Some((_, d)), Some(h)) => d == h,
                (None, None) => true,
                _ => false,
            };
            if !same {
                flush(run, col, out);
                run = here.map(|h| (col, h));
            }
        }
        flush(run, n, out);
    }
    out.push_str("</g>\n");
}

fn curve_layer(out: &mut String, complex: &TropicalComplex, f: &Frame) {
    out.push_str("<g id=\"curve\" stroke=\"#202020\" stroke-width=\"2\" fill=\"none\">\n");
    let mut labels = String::new();
    for cell in complex.dense_cells().filter(|c| c.dim == 1) {
        let a = cell.vertices[0].to_f64();
        let (d, t1) = if cell.bounded {
            let b = cell.vertices[1].to_f64();
            ([b[0] - a[0], b[1] - a[1]], 1.0)
        } else {
            let r = &cell.rays[0];
            ([r[0] as f64, r[1] as f64], f64::INFINITY)
        };
        let Some((p, q)) = clip_segment([a[0], a[1]], d, 0.0, t1, f.clip) else { continue };
        let (x1, y1) = f.px(p[0], p[1]);
        let (x2, y2) = f.px(q[0], q[1]);
        let _ = writeln!(out, "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\"/>", fmt(x1), fmt(y1), fmt(x2), fmt(y2));
        if cell.bounded {
            if let Ok(len) = lattice_length(cell) {
                let (mx, my) = ((x1 + x2) / 2.0 + 6.0, (y1 + y2) / 2.0 - 6.0);
                let _ = writeln!(labels, "<text x=\"{}\" y=\"{}\">{}</text>", fmt(mx), fmt(my), rational_string(&len));
            }
        }
    }
    out.push_str("</g>\n<g id=\"vertices\" fill=\"#202020\">\n");
    for v in complex.dense_cells().filter(|c| c.dim == 0) {
        let p = v.vertices[0].to_f64();
        if p.iter().all(|c| c.abs() <= f.clip) {
            let (x, y) = f.px(p[0], p[1]);
            let _ = writeln!(out, "<circle cx=\"{}\" cy=\"{}\" r=\"3\"/>", fmt(x), fmt(y));
        }
    }
    out.push_str("</g>\n<g id=\"lengths\" font-family=\"sans-serif\" font-size=\"14\" fill=\"#b02020\">\n");
    out.push_str(&labels);
    out.push_str("</g>\n");
}

fn amoeba_layer(out: &mut String, cloud: &PointCloud, f: &Frame) {
    out.push_str("<g id=\"amoeba\" fill=\"#3050c0\" opacity=\"0.5\">\n");
    for p in &cloud.points {
        if p.log_r.iter().all(|c| c.abs() <= f.clip) {
            let (x, y) = f.px(p.log_r[0], p.log_r[1]);
            let _ = writeln!(out, "<circle cx=\"{}\" cy=\"{}\" r=\"1\"/>", fmt(x), fmt(y));
        }
    }
    out.push_str("</g>\n");
}

fn subdivision_layer(out: &mut String, subdiv: &RegularSubdivision, x0: f64, size: f64) {
    let pts: Vec<[f64; 2]> = subdiv.points.iter().map(|p| [p[0] as f64, p[1] as f64]).collect();
    let lo = [0, 1].map(|k| pts.iter().map(|p| p[k]).fold(f64::INFINITY, f64::min));
    let hi = [0, 1].map(|k| pts.iter().map(|p| p[k]).fold(f64::NEG_INFINITY, f64::max));
    let span = (hi[0] - lo[0]).max(hi[1] - lo[1]).max(1.0);
    let margin = size * 0.1;
    let scale = (size - 2.0 * margin) / span;
    let px = |p: [f64; 2]| (x0 + margin + (p[0] - lo[0]) * scale, margin + (hi[1] - p[1]) * scale);
    let _ = writeln!(out, "<g id=\"subdivision\" stroke=\"#202020\" stroke-width=\"2\">");
    for e in subdiv.cells.get(1).into_iter().flatten() {
        let (a, b) = (px(pts[e[0]]), px(pts[e[1]]));
        let _ = writeln!(out, "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\"/>", fmt(a.0), fmt(a.1), fmt(b.0), fmt(b.1));
    }
    out.push_str("</g>\n<g id=\"support\" fill=\"#202020\" font-family=\"sans-serif\" font-size=\"12\">\n");
    for (i, p) in pts.iter().enumerate() {
        let (x, y) = px(*p);
        let _ = writeln!(out, "<circle cx=\"{}\" cy=\"{}\" r=\"4\"/>", fmt(x), fmt(y));
        let _ = writeln!(out, "<text x=\"{}\" y=\"{}\">{}</text>", fmt(x + 6.0), fmt(y - 6.0), subdiv.points[i]);
    }
    out.push_str("</g>\n");
}

/// The curve in the box `[-clip, clip]²` on the left, the subdivision on the right.
pub fn render(
    complex: &TropicalComplex,
    subdiv: &RegularSubdivision,
    opts: &PlotOptions,
) -> Result<String, UnsupportedDimension> {
    if complex.ambient_dim != 2 {
        return Err(UnsupportedDimension(complex.ambient_dim));
    }
    let f = Frame { clip: opts.clip };
    let size = 2.0 * opts.clip * UNIT;
    let mut out = String::new();
    let _ = writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\" viewBox=\"0 0 {w} {h}\">",
        w = fmt(2.0 * size),
        h = fmt(size)
    );
    let _ = writeln!(out, "<rect x=\"0\" y=\"0\" width=\"{}\" height=\"{}\" fill=\"white\"/>", fmt(2.0 * size), fmt(size));
    if let Some(params) = &opts.regions {
        region_layer(&mut out, complex, params, &f, opts.region_step);
    }
    let (ox, oy) = f.px(0.0, 0.0);
    let _ = writeln!(
        out,
        "<g id=\"axes\" stroke=\"#c0c0c0\" stroke-width=\"1\"><line x1=\"0\" y1=\"{oy}\" x2=\"{size}\" y2=\"{oy}\"/><line x1=\"{ox}\" y1=\"0\" x2=\"{ox}\" y2=\"{size}\"/></g>",
        oy = fmt(oy),
        ox = fmt(ox),
        size = fmt(size)
    );
    if let Some(cloud) = opts.amoeba {
        amoeba_layer(&mut out, cloud, &f);
    }
    curve_layer(&mut out, complex, &f);
    subdivision_layer(&mut out, subdiv, size, size);
    out.push_str("</svg>\n");
    Ok(out)
}
