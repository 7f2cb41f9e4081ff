//! DOT and GraphML emitters.
//!
//! Callers supply per-vertex and per-edge attribute lists; the emitters only
//! handle layout and escaping.

use std::fmt::Write;

use crate::length;
use crate::metric::{Space, Vertex};

pub type Attrs = Vec<(&'static str, String)>;

/// Default vertex attributes of a bare space.
pub fn space_vertex_attrs(space: &Space, v: Vertex) -> Attrs {
    vec![
        ("lattice", space.in_lattice(v).to_string()),
        ("basepoint", (space.basepoint() == v).to_string()),
    ]
}

fn dot_escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

pub fn to_dot(
    space: &Space,
    vattrs: impl Fn(Vertex) -> Attrs,
    eattrs: impl Fn(Vertex, Vertex) -> Attrs,
) -> String {
    let mut out = String::new();
    writeln!(out, "graph \"{}\" {{", dot_escape(space.name())).unwrap();
    for v in space.vertices() {
        write!(out, "  \"{}\"", dot_escape(space.id(v))).unwrap();
        let attrs = vattrs(v);
        if !attrs.is_empty() {
            let body: Vec<String> = attrs
                .iter()
                .map(|(k, val)| format!("{k}=\"{}\"", dot_escape(val)))
                .collect();
            write!(out, " [{}]", body.join(", ")).unwrap();
        }
        out.push_str(";\n");
    }
    for (u, v, len) in space.edges() {
        let mut attrs = vec![("length", length::fmt(&len))];
        attrs.extend(eattrs(u, v));
        let body: Vec<String> = attrs
            .iter()
            .map(|(k, val)| format!("{k}=\"{}\"", dot_escape(val)))
            .collect();
        writeln!(
            out,
            "  \"{}\" -- \"{}\" [{}];",
            dot_escape(space.id(u)),
            dot_escape(space.id(v)),
            body.join(", ")
        )
        .unwrap();
    }
    out.push_str("}\n");
    out
}

pub fn to_graphml(
    space: &Space,
    vattrs: impl Fn(Vertex) -> Attrs,
    eattrs: impl Fn(Vertex, Vertex) -> Attrs,
) -> String {
    let vrows: Vec<Attrs> = space.vertices().map(&vattrs).collect();
    let erows: Vec<(Vertex, Vertex, Attrs)> = space
        .edges()
        .map(|(u, v, len)| {
            let mut a = vec![("length", length::fmt(&len))];
            a.extend(eattrs(u, v));
            (u, v, a)
        })
        .collect();
    let mut vkeys: Vec<&str> = vrows.iter().flatten().map(|(k, _)| *k).collect();
    vkeys.sort_unstable();
    vkeys.dedup();
    let mut ekeys: Vec<&str> = erows.iter().flat_map(|(_, _, a)| a.iter().map(|(k, _)| *k)).collect();
    ekeys.sort_unstable();
    ekeys.dedup();

    let mut out = String::new();
    out.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    out.push_str("<graphml xmlns=\"http://graphml.graphdrawing.org/xmlns\">\n");
    for k in &vkeys {
        writeln!(out, "  <key id=\"v_{k}\" for=\"node\" attr.name=\"{k}\" attr.type=\"string\"/>").unwrap();
    }
    for k in &ekeys {
        writeln!(out, "  <key id=\"e_{k}\" for=\"edge\" attr.name=\"{k}\" attr.type=\"string\"/>").unwrap();
    }
    writeln!(out, "  <graph id=\"{}\" edgedefault=\"undirected\">", xml_escape(space.name())).unwrap();
    for (v, attrs) in space.vertices().zip(&vrows) {
        writeln!(out, "    <node id=\"{}\">", xml_escape(space.id(v))).unwrap();
        for (k, val) in attrs {
            writeln!(out, "      <data key=\"v_{k}\">{}</data>", xml_escape(val)).unwrap();
        }
        out.push_str("    </node>\n");
    }
    for (u, v, attrs) in &erows {
        writeln!(
            out,
            "    <edge source=\"{}\" target=\"{}\">",
            xml_escape(space.id(*u)),
            xml_escape(space.id(*v))
        )
        .unwrap();
        for (k, val) in attrs {
            writeln!(out, "      <data key=\"e_{k}\">{}</data>", xml_escape(val)).unwrap();
        }
        out.push_str("    </edge>\n");
    }
    out.push_str("  </graph>\n</graphml>\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::tests::path_graph;

    #[test]
    fn dot_lists_every_edge() {
        let s = path_graph(3);
        let dot = to_dot(&s, |v| space_vertex_attrs(&s, v), |_, _| vec![]);
        assert!(dot.contains("\"0\" -- \"1\" [length=\"1\"]"));
        assert!(dot.contains("\"0\" [lattice=\"true\", basepoint=\"true\"]"));
    }

    #[test]
    fn graphml_declares_keys() {
        let s = path_graph(2);
        let xml = to_graphml(&s, |v| space_vertex_attrs(&s, v), |_, _| vec![("kind", "base".into())]);
        assert!(xml.contains("attr.name=\"kind\""));
        assert!(xml.contains("<data key=\"e_kind\">base</data>"));
        assert_eq!(xml.matches("<node ").count(), 2);
    }
}
