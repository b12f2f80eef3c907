//! CSV, JSON and SVG emission. Every file is written to a temporary file in
//! the target directory and renamed into place.

use serde_json::{Map, Value};
use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(i64),
    Text(String),
    Empty,
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Num(x) => fmt_f64(*x),
            Cell::Int(k) => k.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Empty => String::new(),
        }
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Num(x)
    }
}

impl From<usize> for Cell {
    fn from(k: usize) -> Self {
        Cell::Int(k as i64)
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.to_string())
    }
}

impl From<Option<f64>> for Cell {
    fn from(x: Option<f64>) -> Self {
        x.map_or(Cell::Empty, Cell::Num)
    }
}

/// 17 significant digits, enough to round-trip any `f64`.
pub fn fmt_f64(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else if x.is_nan() {
        "NaN".into()
    } else if x > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

#[derive(Debug, Clone, Default)]
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: &[&'static str]) -> Self {
        Table {
            columns: columns.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut s = self.columns.join(",");
        s.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(Cell::render).collect();
            s.push_str(&cells.join(","));
            s.push('\n');
        }
        s
    }
}

/// Recursively rebuild every object with its keys in lexicographic order.
pub fn canonical(v: Value) -> Value {
    match v {
        Value::Object(m) => {
            let mut entries: Vec<(String, Value)> = m.into_iter().collect();
            entries.sort_by(|a, b| a.0.cmp(&b.0));
            let mut out = Map::new();
            for (k, v) in entries {
                out.insert(k, canonical(v));
            }
            Value::Object(out)
        }
        Value::Array(a) => Value::Array(a.into_iter().map(canonical).collect()),
        other => other,
    }
}

pub fn to_json(v: Value) -> String {
    let mut s =
        serde_json::to_string_pretty(&canonical(v)).expect("serializing a JSON value cannot fail");
    s.push('\n');
    s
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LayerKind {
    /// Open polyline.
    Line,
    /// Closed polyline.
    Loop,
    /// Markers of the given radius in world units.
    Points(f64),
    /// Square cells of the given side, colored by the sign of the value.
    Cells(f64),
}

#[derive(Debug, Clone)]
pub struct Layer {
    pub name: String,
    pub kind: LayerKind,
    pub color: &'static str,
    pub pts: Vec<(f64, f64)>,
    /// Per-point value (cells only).
    pub values: Vec<f64>,
}

impl Layer {
    pub fn new(
        name: impl Into<String>,
        kind: LayerKind,
        color: &'static str,
        pts: Vec<(f64, f64)>,
    ) -> Self {
        Layer {
            name: name.into(),
            kind,
            color,
            pts,
            values: Vec::new(),
        }
    }
}

/// A figure on the square `[-r, r]^2` of the complex plane.
#[derive(Debug, Clone)]
pub struct Plot {
    pub radius: f64,
    pub layers: Vec<Layer>,
}

const SIZE: f64 = 800.0;

impl Plot {
    fn px(&self, x: f64, y: f64) -> (f64, f64) {
        let s = SIZE / (2.0 * self.radius);
        ((x + self.radius) * s, (self.radius - y) * s)
    }

    pub fn to_svg(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
        let _ = writeln!(
            s,
            r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{SIZE}" height="{SIZE}" viewBox="0 0 {SIZE} {SIZE}">"#
        );
        let _ = writeln!(s, r#"<rect width="{SIZE}" height="{SIZE}" fill="white"/>"#);
        let (ox, oy) = self.px(0.0, 0.0);
        let _ = writeln!(
            s,
            r##"<path d="M0 {oy:.3}H{SIZE}M{ox:.3} 0V{SIZE}" stroke="#cccccc" stroke-width="1"/>"##
        );
        let scale = SIZE / (2.0 * self.radius);
        for layer in &self.layers {
            let _ = writeln!(s, r#"<g id="{}">"#, layer.name);
            match layer.kind {
                LayerKind::Line | LayerKind::Loop => {
                    let pts: Vec<String> = layer
                        .pts
                        .iter()
                        .map(|&(x, y)| {
                            let (a, b) = self.px(x, y);
                            format!("{a:.3},{b:.3}")
                        })
                        .collect();
                    let tag = if layer.kind == LayerKind::Loop {
                        "polygon"
                    } else {
                        "polyline"
                    };
                    let _ = writeln!(
                        s,
                        r#"<{tag} points="{}" fill="none" stroke="{}" stroke-width="1.5"/>"#,
                        pts.join(" "),
                        layer.color
                    );
                }
                LayerKind::Points(r) => {
                    for &(x, y) in &layer.pts {
                        let (a, b) = self.px(x, y);
                        let _ = writeln!(
                            s,
                            r#"<circle cx="{a:.3}" cy="{b:.3}" r="{:.3}" fill="{}"/>"#,
                            (r * scale).max(2.0),
                            layer.color
                        );
                    }
                }
                LayerKind::Cells(side) => {
                    let w = side * scale;
                    for (&(x, y), &v) in layer.pts.iter().zip(&layer.values) {
                        let fill = if v > 0.0 {
                            "#f4a582"
                        } else if v < 0.0 {
                            "#92c5de"
                        } else {
                            "#eeeeee"
                        };
                        let (a, b) = self.px(x, y);
                        let _ = writeln!(
                            s,
                            r#"<rect x="{:.3}" y="{:.3}" width="{w:.3}" height="{w:.3}" fill="{fill}"/>"#,
                            a - 0.5 * w,
                            b - 0.5 * w
                        );
                    }
                }
            }
            let _ = writeln!(s, "</g>");
        }
        s.push_str("</svg>\n");
        s
    }

    /// Exactly the plotted samples.
    pub fn sidecar(&self) -> Table {
        let mut t = Table::new(&["layer", "index", "x", "y", "value"]);
        for layer in &self.layers {
            for (i, &(x, y)) in layer.pts.iter().enumerate() {
                t.push(vec![
                    layer.name.as_str().into(),
                    i.into(),
                    x.into(),
                    y.into(),
                    layer.values.get(i).copied().into(),
                ]);
            }
        }
        t
    }
}

/// Write `contents` to `dir/name` through a temporary file and a rename.
pub fn write_atomic(dir: &Path, name: &str, contents: &str) -> std::io::Result<PathBuf> {
    std::fs::create_dir_all(dir)?;
    let path = dir.join(name);
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(contents.as_bytes())?;
    tmp.as_file().sync_all()?;
    let file = tmp.persist(&path).map_err(|e| e.error)?;
    // Temporary files are created private; give the result the usual mode.
    #[cfg(unix)]
    {
        use std::os::unix::fs::PermissionsExt;
        file.set_permissions(std::fs::Permissions::from_mode(0o644))?;
    }
    #[cfg(not(unix))]
    drop(file);
    Ok(path)
}
