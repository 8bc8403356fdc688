//! Input documents (JSON), grayscale image ingestion (PGM) and tabular
//! output (JSON, CSV).

use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};

use crate::complex::{CellId, GridComplex, GridRegion, SimplicialSet};
use crate::error::{Error, Result};
use crate::function::{ConstructibleFunction, PLFunction};

#[derive(Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
enum RawDocument {
    GridFunction {
        breakpoints: Vec<Vec<f64>>,
        values: Vec<f64>,
    },
    GridRegion {
        breakpoints: Vec<Vec<f64>>,
        cells: Vec<Vec<usize>>,
    },
    SimplicialSet {
        dimension: usize,
        vertices: Vec<Vec<f64>>,
        cells: Vec<Vec<usize>>,
        #[serde(default)]
        closed: bool,
    },
    SimplicialFunction {
        dimension: usize,
        vertices: Vec<Vec<f64>>,
        cells: Vec<Vec<usize>>,
        #[serde(default)]
        closed: bool,
        values: Vec<f64>,
    },
}

/// A parsed and validated input document.
#[derive(Debug, Clone, PartialEq)]
pub enum Document {
    GridFunction(ConstructibleFunction),
    GridRegion(GridRegion),
    SimplicialSet(SimplicialSet),
    SimplicialFunction(PLFunction),
}

/// Parse error reading "line L column C: message" when serde knows the
/// position (it does not for fields missing from a tagged document).
pub(crate) fn json_error(e: serde_json::Error) -> Error {
    let text = e.to_string();
    if e.line() == 0 {
        return Error::Parse(text);
    }
    let suffix = format!(" at line {} column {}", e.line(), e.column());
    let message = text.strip_suffix(&suffix).unwrap_or(&text);
    Error::Parse(format!("line {} column {}: {message}", e.line(), e.column()))
}

impl Document {
    pub fn kind(&self) -> &'static str {
        match self {
            Document::GridFunction(_) => "grid-function",
            Document::GridRegion(_) => "grid-region",
            Document::SimplicialSet(_) => "simplicial-set",
            Document::SimplicialFunction(_) => "simplicial-function",
        }
    }

    pub fn parse(text: &str) -> Result<Document> {
        let raw: RawDocument = serde_json::from_str(text)
            .map_err(json_error)?;
        match raw {
            RawDocument::GridFunction { breakpoints, values } => {
                let complex = GridComplex::new(breakpoints)?;
                Ok(Document::GridFunction(ConstructibleFunction::new(complex, values)?))
            }
            RawDocument::GridRegion { breakpoints, cells } => {
                let complex = GridComplex::new(breakpoints)?;
                Ok(Document::GridRegion(GridRegion::new(complex, cells.into_iter().map(CellId))?))
            }
            RawDocument::SimplicialSet { dimension, vertices, cells, closed } => {
                Ok(Document::SimplicialSet(simplicial(dimension, vertices, cells, closed)?))
            }
            RawDocument::SimplicialFunction { dimension, vertices, cells, closed, values } => {
                let set = simplicial(dimension, vertices, cells, closed)?;
                Ok(Document::SimplicialFunction(PLFunction::new(set, values)?))
            }
        }
    }

    pub fn load(path: &Path) -> Result<Document> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        Document::parse(&text)
    }

    pub fn to_json(&self) -> String {
        let raw = match self {
            Document::GridFunction(h) => RawDocument::GridFunction {
                breakpoints: h.complex().breakpoints().to_vec(),
                values: h.values().to_vec(),
            },
            Document::GridRegion(r) => RawDocument::GridRegion {
                breakpoints: r.complex().breakpoints().to_vec(),
                cells: r.cells().map(|c| c.0).collect(),
            },
            Document::SimplicialSet(s) => RawDocument::SimplicialSet {
                dimension: s.ambient_dim(),
                vertices: s.vertices().to_vec(),
                cells: s.cells().to_vec(),
                closed: false,
            },
            Document::SimplicialFunction(h) => RawDocument::SimplicialFunction {
                dimension: h.ambient_dim(),
                vertices: h.set().vertices().to_vec(),
                cells: h.set().cells().to_vec(),
                closed: false,
                values: h.values().to_vec(),
            },
        };
        serde_json::to_string_pretty(&raw).expect("serializable") + "\n"
    }
}

fn simplicial(n: usize, vertices: Vec<Vec<f64>>, cells: Vec<Vec<usize>>, closed: bool) -> Result<SimplicialSet> {
    if closed {
        SimplicialSet::closed(n, vertices, &cells)
    } else {
        SimplicialSet::new(n, vertices, cells)
    }
}

/// Value given to grid cells below dimension 2 when ingesting an image.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Skeleton {
    /// Maximum of the adjacent pixels (upper semicontinuous result).
    Max,
    /// Minimum of the adjacent pixels (lower semicontinuous result).
    Min,
}

struct PgmReader<'a> {
    data: &'a [u8],
    pos: usize,
}

impl PgmReader<'_> {
    fn skip_space_and_comments(&mut self) {
        while self.pos < self.data.len() {
            match self.data[self.pos] {
                b'#' => {
                    while self.pos < self.data.len() && self.data[self.pos] != b'\n' {
                        self.pos += 1;
                    }
                }
                c if c.is_ascii_whitespace() => self.pos += 1,
                _ => break,
            }
        }
    }

    fn token(&mut self, what: &str) -> Result<&str> {
        self.skip_space_and_comments();
        let start = self.pos;
        while self.pos < self.data.len() && !self.data[self.pos].is_ascii_whitespace() && self.data[self.pos] != b'#' {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(Error::Parse(format!("PGM: missing {what} at byte {start}")));
        }
        std::str::from_utf8(&self.data[start..self.pos]).map_err(|_| Error::Parse(format!("PGM: bad {what}")))
    }

    fn number(&mut self, what: &str) -> Result<usize> {
        let at = self.pos;
        let t = self.token(what)?;
        t.parse().map_err(|_| Error::Parse(format!("PGM: {what} {t:?} at byte {at} is not an integer")))
    }
}

/// Pixel grid of a binary (P5) or ASCII (P2) PGM file: (width, height,
/// maxval, row-major samples).
pub fn parse_pgm(data: &[u8]) -> Result<(usize, usize, usize, Vec<usize>)> {
    let mut r = PgmReader { data, pos: 0 };
    let magic = r.token("magic number")?.to_string();
    let binary = match magic.as_str() {
        "P5" => true,
        "P2" => false,
        other => return Err(Error::Parse(format!("PGM: unknown magic number {other:?}"))),
    };
    let width = r.number("width")?;
    let height = r.number("height")?;
    let maxval = r.number("maxval")?;
    if width == 0 || height == 0 {
        return Err(Error::Parse("PGM: empty image".into()));
    }
    if maxval == 0 || maxval > 65535 {
        return Err(Error::Parse(format!("PGM: maxval {maxval} outside 1..=65535")));
    }
    let count = width * height;
    let mut pixels = Vec::with_capacity(count);
    if binary {
        // exactly one whitespace byte separates the header from the raster
        let start = r.pos + 1;
        let bytes = if maxval < 256 { 1 } else { 2 };
        let need = count * bytes;
        if data.len() < start + need {
            return Err(Error::Parse(format!(
                "PGM: truncated raster ({} of {need} bytes)",
                data.len().saturating_sub(start)
            )));
        }
        for i in 0..count {
            let p = start + i * bytes;
            pixels.push(if bytes == 1 { data[p] as usize } else { (data[p] as usize) << 8 | data[p + 1] as usize });
        }
    } else {
        for i in 0..count {
            let v = r.number(&format!("pixel {i}")).map_err(|e| match e {
                Error::Parse(m) if m.contains("missing") => Error::Parse(format!("PGM: truncated raster ({i} of {count} pixels)")),
                other => other,
            })?;
            pixels.push(v);
        }
    }
    if let Some(i) = pixels.iter().position(|&p| p > maxval) {
        return Err(Error::Parse(format!("PGM: pixel {i} exceeds maxval {maxval}")));
    }
    Ok((width, height, maxval, pixels))
}

/// Image as a grid function: the pixel in column i, row j (row 0 first in
/// the file) takes value p/maxval on the open square (i, i+1) × (j, j+1);
/// edges and vertices take the max or min over adjacent pixels.
pub fn ingest_image(data: &[u8], skeleton: Skeleton) -> Result<ConstructibleFunction> {
    let (width, height, maxval, pixels) = parse_pgm(data)?;
    let complex = GridComplex::new(vec![
        (0..=width).map(|x| x as f64).collect(),
        (0..=height).map(|y| y as f64).collect(),
    ])?;
    let pixel = |i: usize, j: usize| pixels[j * width + i] as f64 / maxval as f64;
    let values = complex
        .cells()
        .map(|cell| {
            // pixels whose closed square contains this cell
            let cols = adjacent(cell.0[0], width);
            let rows = adjacent(cell.0[1], height);
            let mut acc: Option<f64> = None;
            for &j in &rows {
                for &i in &cols {
                    let v = pixel(i, j);
                    acc = Some(match (acc, skeleton) {
                        (None, _) => v,
                        (Some(a), Skeleton::Max) => a.max(v),
                        (Some(a), Skeleton::Min) => a.min(v),
                    });
                }
            }
            acc.expect("every cell touches a pixel")
        })
        .collect();
    ConstructibleFunction::new(complex, values)
}

/// Pixel indices along one axis whose closed interval contains the cell
/// with parity index `p`.
fn adjacent(p: usize, len: usize) -> Vec<usize> {
    if p % 2 == 1 {
        vec![p / 2]
    } else {
        let v = p / 2;
        let mut out = Vec::with_capacity(2);
        if v > 0 {
            out.push(v - 1);
        }
        if v < len {
            out.push(v);
        }
        out
    }
}

pub fn load_image(path: &Path, skeleton: Skeleton) -> Result<ConstructibleFunction> {
    let data = std::fs::read(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    ingest_image(&data, skeleton)
}

/// Output format of a command.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
}

/// Renders a command result. Objects with a `rows` array become one CSV
/// line per row; other objects become a single line of their scalar
/// fields. Field order follows insertion order.
pub fn render(value: &Value, format: Format) -> Result<String> {
    let value = &positive_zeros(value.clone());
    match format {
        Format::Json => Ok(serde_json::to_string_pretty(value).expect("serializable") + "\n"),
        Format::Csv => {
            let obj = value.as_object().ok_or_else(|| Error::Unsupported("CSV needs an object".into()))?;
            match obj.get("rows").and_then(Value::as_array) {
                Some(rows) => {
                    let objects: Vec<&Map<String, Value>> = rows.iter().filter_map(Value::as_object).collect();
                    let header: Vec<&String> = objects.first().map(|o| o.keys().collect()).unwrap_or_default();
                    let mut out = String::new();
                    csv_line(&mut out, header.iter().map(|h| h.as_str().to_string()));
                    for o in objects {
                        csv_line(&mut out, header.iter().map(|h| scalar(o.get(*h).unwrap_or(&Value::Null))));
                    }
                    Ok(out)
                }
                None => {
                    let fields: Vec<(&String, &Value)> = obj.iter().filter(|(_, v)| !v.is_array() && !v.is_object()).collect();
                    let mut out = String::new();
                    csv_line(&mut out, fields.iter().map(|(k, _)| k.to_string()));
                    csv_line(&mut out, fields.iter().map(|(_, v)| scalar(v)));
                    Ok(out)
                }
            }
        }
    }
}

/// Replaces -0.0 by 0.0 so that equal results print identically.
fn positive_zeros(v: Value) -> Value {
    match v {
        Value::Number(n) if n.as_f64() == Some(0.0) && n.is_f64() => json!(0.0),
        Value::Array(a) => Value::Array(a.into_iter().map(positive_zeros).collect()),
        Value::Object(m) => Value::Object(m.into_iter().map(|(k, v)| (k, positive_zeros(v))).collect()),
        other => other,
    }
}

fn scalar(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

fn csv_line(out: &mut String, fields: impl Iterator<Item = String>) {
    let quoted: Vec<String> = fields
        .map(|f| {
            if f.contains([',', '"', '\n']) {
                format!("\"{}\"", f.replace('"', "\"\""))
            } else {
                f
            }
        })
        .collect();
    let _ = writeln!(out, "{}", quoted.join(","));
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn documents_round_trip() {
        let text = r#"{"kind": "grid-function", "breakpoints": [[0, 1, 2]], "values": [0, 1, 2, 1, 0]}"#;
        let doc = Document::parse(text).unwrap();
        assert_eq!(Document::parse(&doc.to_json()).unwrap(), doc);
        let text = r#"{"kind": "simplicial-function", "dimension": 1, "vertices": [[-1], [0], [1]],
                       "cells": [[0, 1], [1, 2]], "closed": true, "values": [0, 1, 0]}"#;
        let Document::SimplicialFunction(h) = Document::parse(text).unwrap() else { panic!() };
        assert_eq!(h.set().cells().len(), 5);
        let text = r#"{"kind": "grid-region", "breakpoints": [[0, 2]], "cells": [[1]]}"#;
        let Document::GridRegion(r) = Document::parse(text).unwrap() else { panic!() };
        assert_eq!(r.euler_characteristic(), -1);
    }

    #[test]
    fn document_errors() {
        let e = Document::parse("{\n\"kind\": \"grid-function\",\n\"values\": [1]\n}").unwrap_err();
        assert!(matches!(e, Error::Parse(ref m) if m.contains("breakpoints")), "{e}");
        let e = Document::parse("{\n\"kind\": \"grid-region\",\n\"cells\": [1,]}").unwrap_err();
        assert!(matches!(e, Error::Parse(ref m) if m.starts_with("line 3 column")), "{e}");
        let e = Document::parse(r#"{"kind": "blob"}"#).unwrap_err();
        assert!(matches!(e, Error::Parse(_)));
        let e = Document::parse(r#"{"kind": "grid-function", "breakpoints": [[0, 1]], "values": [1]}"#).unwrap_err();
        assert!(matches!(e, Error::InvalidFunction(_)));
        let e = Document::parse(r#"{"kind": "grid-region", "breakpoints": [[1, 0]], "cells": []}"#).unwrap_err();
        assert!(matches!(e, Error::InvalidComplex(_)));
    }

    #[test]
    fn pgm_ingestion() {
        let one = ingest_image(b"P2\n1 1\n255\n255\n", Skeleton::Max).unwrap();
        assert!(one.values().iter().all(|&v| v == 1.0));
        let two = ingest_image(b"P2 2 1 9 9 0", Skeleton::Max).unwrap();
        let shared = CellId(vec![2, 1]);
        assert_eq!(two.value(&shared), 1.0);
        assert_eq!(two.value(&CellId(vec![3, 1])), 0.0);
        let two = ingest_image(b"P2 2 1 9 9 0", Skeleton::Min).unwrap();
        assert_eq!(two.value(&shared), 0.0);
        assert_eq!(two.value(&CellId(vec![0, 0])), 1.0);
        let mut bin = b"P5\n# comment\n2 1\n65535\n".to_vec();
        bin.extend_from_slice(&[0xff, 0xff, 0x80, 0x00]);
        let b = ingest_image(&bin, Skeleton::Max).unwrap();
        assert_eq!(b.value(&CellId(vec![3, 1])), 32768.0 / 65535.0);
        assert!(matches!(ingest_image(b"P5\n2 2\n255\n\x01\x02", Skeleton::Max), Err(Error::Parse(_))));
        assert!(matches!(ingest_image(b"P2 2 2 255 1 2 3", Skeleton::Max), Err(Error::Parse(_))));
        assert!(matches!(ingest_image(b"P3 1 1 255 0", Skeleton::Max), Err(Error::Parse(_))));
        assert!(matches!(ingest_image(b"P2 1 1 70000 0", Skeleton::Max), Err(Error::Parse(_))));
    }

    #[test]
    fn csv_rendering() {
        let v = json!({"command": "mu", "value": 1.5, "rows": [{"k": 0, "mu": 1.0}, {"k": 1, "mu": 2.5}]});
        assert_eq!(render(&v, Format::Csv).unwrap(), "k,mu\n0,1.0\n1,2.5\n");
        let v = json!({"command": "chi", "value": -1, "note": "a,b"});
        assert_eq!(render(&v, Format::Csv).unwrap(), "command,value,note\nchi,-1,\"a,b\"\n");
        assert_eq!(render(&json!({"x": -0.0}), Format::Csv).unwrap(), "x\n0.0\n");
    }
}
