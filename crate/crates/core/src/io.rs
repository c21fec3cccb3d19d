//! File formats: CSV matrices and point clouds, whitespace-separated edge
//! lists, barcode CSV, and minimal SVG plots.
//!
//! Floating-point values are written in the shortest form that parses back to
//! the same `f64`, so matrices round-trip bit for bit.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::cloud::PointCloud;
use crate::error::{Error, Result};
use crate::graph::NeighbourhoodGraph;
use crate::matrix::Matrix;
use crate::mds::{Embedding, ResidualProfile};
use crate::persistence::{Barcode, Interval};

/// Prefix marking point-cloud CSV columns that hold intrinsic coordinates.
pub const INTRINSIC_PREFIX: &str = "intrinsic_";

pub fn format_f64(v: f64) -> String {
    let a = v.abs();
    if v.is_finite() && a != 0.0 && !(1e-5..1e16).contains(&a) {
        format!("{v:e}")
    } else {
        format!("{v}")
    }
}

fn malformed(path: &Path, line: usize, column: usize, message: impl Into<String>) -> Error {
    Error::MalformedInput {
        path: path.to_path_buf(),
        line,
        column,
        message: message.into(),
    }
}

fn csv_error(path: &Path, e: csv::Error) -> Error {
    let line = e.position().map_or(0, |p| p.line() as usize);
    match e.into_kind() {
        csv::ErrorKind::Io(source) => Error::io(path, source),
        csv::ErrorKind::UnequalLengths { expected_len, len, .. } => malformed(
            path,
            line,
            len as usize + 1,
            format!("expected {expected_len} fields, found {len}"),
        ),
        other => malformed(path, line, 0, format!("{other:?}")),
    }
}

/// Header plus numeric rows.
fn read_numeric_csv(path: &Path) -> Result<(Vec<String>, Vec<Vec<f64>>)> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| csv_error(path, e))?;
    let header: Vec<String> = reader
        .headers()
        .map_err(|e| csv_error(path, e))?
        .iter()
        .map(str::to_owned)
        .collect();
    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| csv_error(path, e))?;
        let line = record.position().map_or(0, |p| p.line() as usize);
        let row = record
            .iter()
            .enumerate()
            .map(|(c, field)| {
                field
                    .parse::<f64>()
                    .ok()
                    .filter(|v| v.is_finite())
                    .ok_or_else(|| malformed(path, line, c + 1, format!("not a finite number: {field:?}")))
            })
            .collect::<Result<Vec<f64>>>()?;
        rows.push(row);
    }
    Ok((header, rows))
}

fn write_csv(path: &Path, header: &[String], rows: impl Iterator<Item = Vec<String>>) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| csv_error(path, e))?;
    w.write_record(header).map_err(|e| csv_error(path, e))?;
    for row in rows {
        w.write_record(&row).map_err(|e| csv_error(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn write_matrix_csv(path: impl AsRef<Path>, m: &Matrix) -> Result<()> {
    let header: Vec<String> = (0..m.cols()).map(|j| j.to_string()).collect();
    let rows = (0..m.rows()).map(|i| m.row(i).iter().map(|&v| format_f64(v)).collect());
    write_csv(path.as_ref(), &header, rows)
}

pub fn read_matrix_csv(path: impl AsRef<Path>) -> Result<Matrix> {
    let path = path.as_ref();
    let (header, rows) = read_numeric_csv(path)?;
    if rows.is_empty() {
        return Ok(Matrix::zeros(0, header.len()));
    }
    Matrix::from_rows(&rows)
}

/// Reads a point cloud with one point per row. Columns whose header starts
/// with `intrinsic_` hold intrinsic coordinates; all others are ambient.
pub fn read_pointcloud_csv(path: impl AsRef<Path>) -> Result<PointCloud> {
    let path = path.as_ref();
    let (header, rows) = read_numeric_csv(path)?;
    if rows.is_empty() {
        return Err(malformed(path, 2, 1, "no points"));
    }
    let intrinsic_cols: Vec<bool> = header.iter().map(|h| h.starts_with(INTRINSIC_PREFIX)).collect();
    let pick = |want: bool| -> Vec<Vec<f64>> {
        rows.iter()
            .map(|r| {
                r.iter()
                    .zip(&intrinsic_cols)
                    .filter(|(_, &c)| c == want)
                    .map(|(v, _)| *v)
                    .collect()
            })
            .collect()
    };
    let cloud = PointCloud::new(pick(false))?;
    if intrinsic_cols.iter().any(|&c| c) {
        cloud.with_intrinsic(pick(true))
    } else {
        Ok(cloud)
    }
}

pub fn write_pointcloud_csv(path: impl AsRef<Path>, cloud: &PointCloud) -> Result<()> {
    let mut header: Vec<String> = (0..cloud.dim()).map(|j| format!("x{j}")).collect();
    let k = cloud.intrinsic_dim().unwrap_or(0);
    header.extend((0..k).map(|j| format!("{INTRINSIC_PREFIX}{j}")));
    let rows = (0..cloud.len()).map(|i| {
        cloud
            .point(i)
            .iter()
            .chain(cloud.intrinsic(i).unwrap_or(&[]))
            .map(|&v| format_f64(v))
            .collect()
    });
    write_csv(path.as_ref(), &header, rows)
}

/// Reads an edge list: one `i j [weight]` per line, 0-based, whitespace
/// separated. `#` starts a comment. A `# nodes <N>` line fixes the node count
/// (needed for isolated trailing nodes); otherwise it is one more than the
/// largest index.
pub fn read_edgelist(path: impl AsRef<Path>) -> Result<NeighbourhoodGraph> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_edgelist(&text, path)
}

fn parse_edgelist(text: &str, path: &Path) -> Result<NeighbourhoodGraph> {
    let mut declared = None;
    let mut edges = Vec::new();
    for (ln, raw) in text.lines().enumerate() {
        let line = ln + 1;
        let (body, comment) = match raw.find('#') {
            Some(p) => (&raw[..p], Some(&raw[p + 1..])),
            None => (raw, None),
        };
        if let Some(c) = comment {
            let mut words = c.split_whitespace();
            if words.next() == Some("nodes") {
                let n = words
                    .next()
                    .and_then(|w| w.parse::<usize>().ok())
                    .ok_or_else(|| malformed(path, line, 1, "expected `# nodes <count>`"))?;
                declared = Some(n);
            }
        }
        let mut fields = Vec::new();
        let mut rest = body;
        while let Some(start) = rest.find(|c: char| !c.is_whitespace()) {
            let len = rest[start..].find(char::is_whitespace).unwrap_or(rest.len() - start);
            let col = body.len() - rest.len() + start + 1;
            fields.push((col, &rest[start..start + len]));
            rest = &rest[start + len..];
        }
        if fields.is_empty() {
            continue;
        }
        if fields.len() > 3 || fields.len() < 2 {
            return Err(malformed(
                path,
                line,
                fields.last().map_or(1, |f| f.0),
                format!("expected `i j [weight]`, found {} fields", fields.len()),
            ));
        }
        let index = |(col, s): (usize, &str)| {
            s.parse::<usize>()
                .map_err(|_| malformed(path, line, col, format!("not a node index: {s:?}")))
        };
        let i = index(fields[0])?;
        let j = index(fields[1])?;
        let w = match fields.get(2) {
            Some(&(col, s)) => Some(
                s.parse::<f64>()
                    .ok()
                    .filter(|w| w.is_finite() && *w > 0.0)
                    .ok_or_else(|| malformed(path, line, col, format!("not a positive weight: {s:?}")))?,
            ),
            None => None,
        };
        edges.push((line, i, j, w));
    }
    let n = declared.unwrap_or_else(|| edges.iter().map(|e| e.1.max(e.2) + 1).max().unwrap_or(0));
    let weighted = edges.first().is_some_and(|e| e.3.is_some());
    if let Some(e) = edges.iter().find(|e| e.3.is_some() != weighted) {
        return Err(malformed(path, e.0, 3, "every edge or none must carry a weight"));
    }
    if let Some(e) = edges.iter().find(|e| e.1 >= n || e.2 >= n) {
        return Err(malformed(
            path,
            e.0,
            1,
            format!("node index out of range for {n} nodes"),
        ));
    }
    if let Some(e) = edges.iter().find(|e| e.1 == e.2) {
        return Err(malformed(path, e.0, 1, format!("self-loop on node {}", e.1)));
    }
    NeighbourhoodGraph::from_edge_list(n, edges.into_iter().map(|e| (e.1, e.2, e.3)))
}

pub fn write_edgelist(path: impl AsRef<Path>, g: &NeighbourhoodGraph) -> Result<()> {
    let path = path.as_ref();
    let mut out = format!("# nodes {}\n", g.n_nodes());
    for (i, j, w) in g.weighted_edges() {
        match w {
            Some(w) => writeln!(out, "{i} {j} {}", format_f64(w)),
            None => writeln!(out, "{i} {j}"),
        }
        .expect("writing to a string");
    }
    fs::write(path, out).map_err(|e| Error::io(path, e))
}

/// Barcode CSV with columns `dim,birth,death`; infinite deaths are written as
/// `inf`.
pub fn write_barcode(path: impl AsRef<Path>, b: &Barcode) -> Result<()> {
    let header = ["dim", "birth", "death"].map(String::from);
    let rows = b
        .intervals
        .iter()
        .map(|i| vec![i.dim.to_string(), format_f64(i.birth), format_f64(i.death)]);
    write_csv(path.as_ref(), &header, rows)
}

pub fn read_barcode(path: impl AsRef<Path>) -> Result<Barcode> {
    let path = path.as_ref();
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| csv_error(path, e))?;
    let mut intervals = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| csv_error(path, e))?;
        let line = record.position().map_or(0, |p| p.line() as usize);
        if record.len() != 3 {
            return Err(malformed(path, line, 1, "expected dim,birth,death"));
        }
        let dim = record[0]
            .parse::<usize>()
            .map_err(|_| malformed(path, line, 1, "dimension is not an integer"))?;
        let birth = record[1]
            .parse::<f64>()
            .ok()
            .filter(|v| v.is_finite())
            .ok_or_else(|| malformed(path, line, 2, "birth is not a finite number"))?;
        let death = record[2]
            .parse::<f64>()
            .ok()
            .filter(|v| !v.is_nan() && *v >= birth)
            .ok_or_else(|| malformed(path, line, 3, "death is not a number at least the birth"))?;
        intervals.push(Interval { dim, birth, death });
    }
    let max_dim = intervals.iter().map(|i| i.dim).max().unwrap_or(0);
    Ok(Barcode::new(max_dim, intervals))
}

pub fn write_residual_csv(path: impl AsRef<Path>, profile: &ResidualProfile) -> Result<()> {
    let header = ["p", "residual_variance"].map(String::from);
    let rows = profile
        .residuals
        .iter()
        .enumerate()
        .map(|(p, r)| vec![(p + 1).to_string(), format_f64(*r)]);
    write_csv(path.as_ref(), &header, rows)
}

pub fn write_embedding_csv(path: impl AsRef<Path>, emb: &Embedding) -> Result<()> {
    let header: Vec<String> = (0..emb.dim()).map(|j| format!("y{j}")).collect();
    let rows = (0..emb.len()).map(|i| emb.coords.row(i).iter().map(|&v| format_f64(v)).collect());
    write_csv(path.as_ref(), &header, rows)
}

/// A generic CSV table of numbers.
pub fn write_table_csv(path: impl AsRef<Path>, header: &[&str], rows: &[Vec<f64>]) -> Result<()> {
    let header: Vec<String> = header.iter().map(|s| s.to_string()).collect();
    write_csv(
        path.as_ref(),
        &header,
        rows.iter().map(|r| r.iter().map(|&v| format_f64(v)).collect()),
    )
}

/// A CSV table of preformatted fields.
pub fn write_rows(path: impl AsRef<Path>, header: &[&str], rows: Vec<Vec<String>>) -> Result<()> {
    let header: Vec<String> = header.iter().map(|s| s.to_string()).collect();
    write_csv(path.as_ref(), &header, rows.into_iter())
}

const SVG_W: f64 = 640.0;
const SVG_H: f64 = 400.0;
const MARGIN: f64 = 48.0;
const PALETTE: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"];

fn svg_open(title: &str) -> String {
    format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{SVG_W}\" height=\"{SVG_H}\" viewBox=\"0 0 {SVG_W} {SVG_H}\">\n\
         <rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n\
         <text x=\"{}\" y=\"20\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"14\">{}</text>\n",
        SVG_W / 2.0,
        escape(title)
    )
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn axes(out: &mut String, x_label: &str, y_label: &str, x: (f64, f64), y: (f64, f64)) {
    let (x0, y0, x1, y1) = (MARGIN, SVG_H - MARGIN, SVG_W - MARGIN / 2.0, MARGIN);
    let _ = writeln!(
        out,
        "<path d=\"M{x0} {y1} L{x0} {y0} L{x1} {y0}\" stroke=\"black\" fill=\"none\"/>\n\
         <text x=\"{}\" y=\"{}\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">{}</text>\n\
         <text x=\"14\" y=\"{}\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\" transform=\"rotate(-90 14 {})\">{}</text>",
        (x0 + x1) / 2.0,
        SVG_H - 12.0,
        escape(x_label),
        (y0 + y1) / 2.0,
        (y0 + y1) / 2.0,
        escape(y_label)
    );
    for (v, px, anchor, py) in [(x.0, x0, "start", y0 + 16.0), (x.1, x1, "end", y0 + 16.0)] {
        let _ = writeln!(
            out,
            "<text x=\"{px}\" y=\"{py}\" text-anchor=\"{anchor}\" font-family=\"sans-serif\" font-size=\"10\">{}</text>",
            short(v)
        );
    }
    for (v, py) in [(y.0, y0), (y.1, y1)] {
        let _ = writeln!(
            out,
            "<text x=\"{}\" y=\"{py}\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"10\">{}</text>",
            x0 - 4.0,
            short(v)
        );
    }
}

fn short(v: f64) -> String {
    format!("{:.3}", v)
        .trim_end_matches('0')
        .trim_end_matches('.')
        .to_string()
}

fn map(v: f64, lo: f64, hi: f64, a: f64, b: f64) -> f64 {
    if hi > lo {
        a + (v - lo) / (hi - lo) * (b - a)
    } else {
        (a + b) / 2.0
    }
}

/// Barcode plot: one horizontal bar per interval, grouped by dimension.
/// Infinite bars run to the right edge.
pub fn barcode_svg(b: &Barcode, title: &str) -> String {
    let finite_max = b
        .intervals
        .iter()
        .flat_map(|i| [i.birth, i.death])
        .filter(|v| v.is_finite())
        .fold(0.0f64, f64::max);
    let hi = if finite_max > 0.0 { finite_max * 1.05 } else { 1.0 };
    let mut out = svg_open(title);
    axes(&mut out, "filtration value", "bars by dimension", (0.0, hi), (0.0, 0.0));
    let rows = b.intervals.len().max(1) as f64;
    let step = (SVG_H - 2.0 * MARGIN) / rows;
    for (k, i) in b.intervals.iter().enumerate() {
        let y = MARGIN + (k as f64 + 0.5) * step;
        let xa = map(i.birth, 0.0, hi, MARGIN, SVG_W - MARGIN / 2.0);
        let xb = if i.is_infinite() {
            SVG_W - MARGIN / 2.0
        } else {
            map(i.death, 0.0, hi, MARGIN, SVG_W - MARGIN / 2.0)
        };
        let _ = writeln!(
            out,
            "<line x1=\"{xa:.2}\" y1=\"{y:.2}\" x2=\"{:.2}\" y2=\"{y:.2}\" stroke=\"{}\" stroke-width=\"{:.2}\"/>",
            xb.max(xa + 0.5),
            PALETTE[i.dim % PALETTE.len()],
            (0.7 * step).clamp(0.5, 4.0)
        );
    }
    out.push_str("</svg>\n");
    out
}

/// Line plot of named series over a shared x axis.
pub fn line_plot_svg(title: &str, x_label: &str, y_label: &str, series: &[(String, Vec<(f64, f64)>)]) -> String {
    let pts = series
        .iter()
        .flat_map(|s| s.1.iter())
        .filter(|p| p.0.is_finite() && p.1.is_finite());
    let (mut xl, mut xh, mut yl, mut yh) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for &(x, y) in pts {
        xl = xl.min(x);
        xh = xh.max(x);
        yl = yl.min(y);
        yh = yh.max(y);
    }
    if !xl.is_finite() {
        (xl, xh, yl, yh) = (0.0, 1.0, 0.0, 1.0);
    }
    yl = yl.min(0.0);
    let mut out = svg_open(title);
    axes(&mut out, x_label, y_label, (xl, xh), (yl, yh));
    for (k, (name, s)) in series.iter().enumerate() {
        let colour = PALETTE[k % PALETTE.len()];
        let path: Vec<String> = s
            .iter()
            .map(|&(x, y)| {
                format!(
                    "{:.2},{:.2}",
                    map(x, xl, xh, MARGIN, SVG_W - MARGIN / 2.0),
                    map(y, yl, yh, SVG_H - MARGIN, MARGIN)
                )
            })
            .collect();
        let _ = writeln!(
            out,
            "<polyline points=\"{}\" fill=\"none\" stroke=\"{colour}\" stroke-width=\"1.5\"/>\n\
             <text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"11\" fill=\"{colour}\">{}</text>",
            path.join(" "),
            SVG_W - MARGIN / 2.0 - 150.0,
            MARGIN + 14.0 * (k as f64 + 1.0),
            escape(name)
        );
    }
    out.push_str("</svg>\n");
    out
}

/// Orthographic view of the first two embedding coordinates.
pub fn scatter_svg(title: &str, points: &[(f64, f64)]) -> String {
    let (mut xl, mut xh, mut yl, mut yh) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for &(x, y) in points {
        xl = xl.min(x);
        xh = xh.max(x);
        yl = yl.min(y);
        yh = yh.max(y);
    }
    if points.is_empty() {
        (xl, xh, yl, yh) = (0.0, 1.0, 0.0, 1.0);
    }
    let mut out = svg_open(title);
    axes(&mut out, "coordinate 1", "coordinate 2", (xl, xh), (yl, yh));
    for &(x, y) in points {
        let _ = writeln!(
            out,
            "<circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"1.5\" fill=\"{}\"/>",
            map(x, xl, xh, MARGIN, SVG_W - MARGIN / 2.0),
            map(y, yl, yh, SVG_H - MARGIN, MARGIN),
            PALETTE[0]
        );
    }
    out.push_str("</svg>\n");
    out
}

pub fn write_text(path: impl AsRef<Path>, text: &str) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, text).map_err(|e| Error::io(path, e))
}
