//! Flat-file formats for graphs and labelings.
//!
//! Graph files start with `utsw <n> <seed>` followed by one `<u> <v> <L|R>`
//! line per edge, `u < v`, sorted. Label files are CSV with header
//! `vertex,x,y`, one row per vertex in id order, empty coordinates for
//! unlabeled vertices. Writing a parsed file reproduces it byte for byte.

use std::io::{BufRead, Write};

use crate::error::{Error, Result};
use crate::labeling::Labeling;
use crate::model::{EdgeKind, UtswGraph, VertexId};
use crate::torus::{Position, TorusSize};

const GRAPH_MAGIC: &str = "utsw";
const LABEL_HEADER: [&str; 3] = ["vertex", "x", "y"];

pub fn write_graph<W: Write>(g: &UtswGraph, mut out: W) -> Result<()> {
    writeln!(out, "{GRAPH_MAGIC} {} {}", g.size(), g.seed())?;
    for (u, v, kind) in g.typed_edges() {
        writeln!(out, "{u} {v} {}", kind.code())?;
    }
    out.flush()?;
    Ok(())
}

pub fn graph_to_string(g: &UtswGraph) -> String {
    let mut buf = Vec::new();
    write_graph(g, &mut buf).expect("writing to memory");
    String::from_utf8(buf).expect("ascii output")
}

fn field<'a, T: std::str::FromStr>(fields: &mut impl Iterator<Item = &'a str>, line: usize, what: &str) -> Result<T> {
    let raw = fields
        .next()
        .ok_or_else(|| Error::parse(line, format!("missing {what}")))?;
    raw.parse()
        .map_err(|_| Error::parse(line, format!("invalid {what} {raw:?}")))
}

/// Reads the next `\n`-terminated line; `None` at end of input.
fn next_line<R: BufRead>(input: &mut R, line: usize, buf: &mut Vec<u8>) -> Result<Option<String>> {
    buf.clear();
    if input.read_until(b'\n', buf)? == 0 {
        return Ok(None);
    }
    if buf.pop() != Some(b'\n') {
        return Err(Error::parse(line, "missing final newline"));
    }
    let text = std::str::from_utf8(buf).map_err(|_| Error::parse(line, "not UTF-8"))?;
    Ok(Some(text.to_owned()))
}

/// Parses a graph file. Lines must be canonical: single spaces, `u < v`,
/// strictly increasing edge order and a trailing newline on every line.
pub fn read_graph<R: BufRead>(mut input: R) -> Result<UtswGraph> {
    let mut buf = Vec::new();
    let header = next_line(&mut input, 1, &mut buf)?.ok_or_else(|| Error::parse(1, "empty input"))?;
    let mut fields = header.split(' ');
    if fields.next() != Some(GRAPH_MAGIC) {
        return Err(Error::parse(1, format!("expected `{GRAPH_MAGIC} <n> <seed>`")));
    }
    let side: u32 = field(&mut fields, 1, "size")?;
    let seed: u64 = field(&mut fields, 1, "seed")?;
    if fields.next().is_some() {
        return Err(Error::parse(1, "trailing fields in header"));
    }
    if side < 3 {
        return Err(Error::parse(1, format!("size {side} is below 3")));
    }
    let n = TorusSize::new(side).map_err(|e| Error::parse(1, e.to_string()))?;
    let count = n.vertex_count() as u64;

    let mut edges: Vec<(VertexId, VertexId, EdgeKind)> = Vec::new();
    let mut line = 1;
    loop {
        line += 1;
        let Some(text) = next_line(&mut input, line, &mut buf)? else {
            break;
        };
        if text.is_empty() {
            return Err(Error::parse(line, "blank line"));
        }
        let mut fields = text.split(' ');
        let u: u64 = field(&mut fields, line, "vertex")?;
        let v: u64 = field(&mut fields, line, "vertex")?;
        let kind = match fields.next() {
            Some("L") => EdgeKind::Local,
            Some("R") => EdgeKind::LongRange,
            Some(other) => return Err(Error::parse(line, format!("invalid edge kind {other:?}"))),
            None => return Err(Error::parse(line, "missing edge kind")),
        };
        if fields.next().is_some() {
            return Err(Error::parse(line, "trailing fields"));
        }
        for w in [u, v] {
            if w >= count {
                return Err(Error::parse(
                    line,
                    format!("vertex {w} out of range for {count} vertices"),
                ));
            }
        }
        if u >= v {
            return Err(Error::parse(line, "edge endpoints must satisfy u < v"));
        }
        let (u, v) = (u as VertexId, v as VertexId);
        if let Some(&(pu, pv, _)) = edges.last() {
            if (pu, pv) >= (u, v) {
                return Err(Error::parse(line, "edges must be strictly increasing"));
            }
        }
        edges.push((u, v, kind));
    }
    UtswGraph::from_edges(n, seed, edges)
}

pub fn write_labels<W: Write>(labeling: &Labeling, out: W) -> Result<()> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    w.write_record(LABEL_HEADER)?;
    for (v, label) in labeling.labels().iter().enumerate() {
        match label {
            Some(p) => w.write_record([v.to_string(), p.x.to_string(), p.y.to_string()])?,
            None => w.write_record([v.to_string(), String::new(), String::new()])?,
        }
    }
    w.flush()?;
    Ok(())
}

pub fn labels_to_string(labeling: &Labeling) -> String {
    let mut buf = Vec::new();
    write_labels(labeling, &mut buf).expect("writing to memory");
    String::from_utf8(buf).expect("ascii output")
}

/// Parses a label file for a torus of side `n`. Rows must list every vertex
/// once, in id order.
pub fn read_labels<R: std::io::Read>(n: TorusSize, input: R) -> Result<Labeling> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .from_reader(input);
    let mut records = reader.records();
    let header = records.next().ok_or_else(|| Error::parse(1, "empty input"))??;
    if header.iter().ne(LABEL_HEADER) {
        return Err(Error::parse(1, "expected header `vertex,x,y`"));
    }
    let mut labels = Vec::with_capacity(n.vertex_count());
    for record in records {
        let record = record?;
        let line = record.position().map_or(0, |p| p.line() as usize);
        if record.len() != 3 {
            return Err(Error::parse(line, format!("expected 3 fields, found {}", record.len())));
        }
        let vertex: usize = record[0]
            .parse()
            .map_err(|_| Error::parse(line, format!("invalid vertex {:?}", &record[0])))?;
        if vertex != labels.len() {
            return Err(Error::parse(
                line,
                format!("expected vertex {}, found {vertex}", labels.len()),
            ));
        }
        if vertex >= n.vertex_count() {
            return Err(Error::parse(line, format!("vertex {vertex} out of range")));
        }
        let label = match (&record[1], &record[2]) {
            ("", "") => None,
            (x, y) => {
                let coord = |s: &str| {
                    s.parse::<u32>()
                        .ok()
                        .filter(|&c| c < n.get())
                        .ok_or_else(|| Error::parse(line, format!("invalid coordinate {s:?}")))
                };
                Some(Position::new(coord(x)?, coord(y)?))
            }
        };
        labels.push(label);
    }
    if labels.len() != n.vertex_count() {
        return Err(Error::parse(
            labels.len() + 2,
            format!("expected {} rows, found {}", n.vertex_count(), labels.len()),
        ));
    }
    Labeling::from_labels(n, labels)
}
