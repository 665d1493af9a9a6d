//! Lenient JSON readers for the shapes accepted on the command line.
//!
//! A polygon may be given as a bare `[[x, y], ...]` array, as
//! `{"vertices": [...]}`, or as any object with a `polygon` field (a
//! dataset record). Graphs are `{"n", "lower_tri"}` objects or records
//! carrying `vis_graph`; triangulations are `{"n", "diagonals"}` or records
//! carrying `tri_graph`.

use std::fs;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde_json::Value;

use crate::error::{Error, Result};
use crate::geom::Polygon;
use crate::triangulate::{cdt, Triangulation};
use crate::visibility::{visibility_graph, VisGraph};

fn from_value<T: DeserializeOwned>(v: Value) -> Result<T> {
    serde_json::from_value(v).map_err(Error::from)
}

pub fn polygon_from_value(v: Value) -> Result<Polygon> {
    match v {
        Value::Array(_) => from_value(v),
        Value::Object(mut m) => {
            if let Some(p) = m.remove("polygon").or_else(|| m.remove("vertices")) {
                polygon_from_value(p)
            } else {
                Err(Error::Format("expected a vertex array or an object with `polygon`/`vertices`".into()))
            }
        }
        _ => Err(Error::Format("expected a polygon".into())),
    }
}

/// Graph from a graph object, a record's `vis_graph`, or failing those,
/// the visibility graph of a polygon.
pub fn graph_from_value(v: Value) -> Result<VisGraph> {
    if let Value::Object(m) = &v {
        if m.contains_key("lower_tri") {
            return from_value(v);
        }
        if let Some(g) = m.get("vis_graph") {
            return from_value(g.clone());
        }
        if let Some(g) = m.get("target") {
            return graph_from_value(g.clone());
        }
    }
    visibility_graph(&polygon_from_value(v)?)
}

/// Triangulation object, a record's `tri_graph`, or the constrained
/// Delaunay triangulation of a polygon.
pub fn triangulation_from_value(v: Value) -> Result<Triangulation> {
    if let Value::Object(m) = &v {
        if m.contains_key("diagonals") {
            return from_value(v);
        }
        if let Some(t) = m.get("tri_graph") {
            return from_value(t.clone());
        }
    }
    cdt(&polygon_from_value(v)?)
}

pub fn parse_polygon(s: &str) -> Result<Polygon> {
    polygon_from_value(first_value(s)?)
}

pub fn parse_graph(s: &str) -> Result<VisGraph> {
    graph_from_value(first_value(s)?)
}

pub fn parse_triangulation(s: &str) -> Result<Triangulation> {
    triangulation_from_value(first_value(s)?)
}

/// The whole text as one JSON value, or else its first non-empty line.
fn first_value(s: &str) -> Result<Value> {
    match serde_json::from_str(s) {
        Ok(v) => Ok(v),
        Err(e) => match s.lines().find(|l| !l.trim().is_empty()) {
            Some(l) if l.len() < s.trim_end().len() => serde_json::from_str(l).map_err(Error::from),
            _ => Err(e.into()),
        },
    }
}

/// A JSON array, or one value per non-empty line.
pub fn parse_values(s: &str) -> Result<Vec<Value>> {
    if let Ok(Value::Array(items)) = serde_json::from_str::<Value>(s) {
        if items.first().is_some_and(|v| !v.is_array() || v.as_array().is_some_and(|a| a.first().is_some_and(Value::is_array))) {
            return Ok(items);
        }
    }
    s.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(k, l)| serde_json::from_str(l).map_err(|e| Error::Format(format!("line {}: {e}", k + 1))))
        .collect()
}

pub fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

#[cfg(test)]
mod tests {
    use super::*;

    const SQ: &str = "[[0,0],[1,0],[1,1],[0,1]]";

    #[test]
    fn polygon_shapes() {
        let p = parse_polygon(SQ).unwrap();
        assert_eq!(p.len(), 4);
        assert_eq!(parse_polygon(&format!("{{\"vertices\": {SQ}}}")).unwrap(), p);
        assert_eq!(parse_polygon(&format!("{{\"id\": \"x\", \"polygon\": {SQ}}}")).unwrap(), p);
        assert!(parse_polygon("{\"foo\": 1}").is_err());
    }

    #[test]
    fn graph_shapes() {
        let g = parse_graph(SQ).unwrap();
        assert_eq!(g, VisGraph::complete(4));
        let enc = serde_json::to_string(&g).unwrap();
        assert_eq!(parse_graph(&enc).unwrap(), g);
        assert_eq!(parse_graph(&format!("{{\"vis_graph\": {enc}}}")).unwrap(), g);
    }

    #[test]
    fn triangulation_shapes() {
        let t = parse_triangulation(SQ).unwrap();
        assert_eq!(t.diagonals().collect::<Vec<_>>(), vec![(0, 2)]);
        assert_eq!(parse_triangulation("{\"n\": 4, \"diagonals\": [[1, 3]]}").unwrap().diagonals().next(), Some((1, 3)));
    }

    #[test]
    fn value_lists() {
        assert_eq!(parse_values(&format!("{SQ}\n\n{SQ}\n")).unwrap().len(), 2);
        assert_eq!(parse_values(&format!("[{SQ}, {SQ}]")).unwrap().len(), 2);
        assert_eq!(parse_values("[{\"a\":1},{\"a\":2}]").unwrap().len(), 2);
        // a single bare polygon on one line is one value
        assert_eq!(parse_values(SQ).unwrap().len(), 1);
    }
}
