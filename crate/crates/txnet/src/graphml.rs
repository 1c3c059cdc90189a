//! GraphML export and import.
//!
//! Nodes carry an `address` string key, edges carry `amount_btc` (double) and
//! `timestamp_ms` (long). Amounts are written as fixed-point 8-decimal
//! strings, which are valid doubles and survive the round-trip exactly.

use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use quick_xml::escape::escape;
use quick_xml::events::Event;
use quick_xml::Reader;

use crate::amount::Btc;
use crate::graph::{GraphArc, GraphError, TxGraph};

#[derive(Debug, thiserror::Error)]
pub enum GraphmlError {
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error("XML error: {0}")]
    Xml(String),
    #[error("invalid GraphML: {0}")]
    Invalid(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

impl From<quick_xml::Error> for GraphmlError {
    fn from(e: quick_xml::Error) -> GraphmlError {
        GraphmlError::Xml(e.to_string())
    }
}

pub fn export_graphml<P: AsRef<Path>>(g: &TxGraph, path: P) -> Result<(), GraphmlError> {
    let mut w = BufWriter::new(File::create(path)?);
    export_graphml_to(g, &mut w)?;
    w.flush()?;
    Ok(())
}

pub fn export_graphml_to<W: Write>(g: &TxGraph, w: &mut W) -> Result<(), GraphmlError> {
    writeln!(w, r#"<?xml version="1.0" encoding="UTF-8"?>"#)?;
    writeln!(w, r#"<graphml xmlns="http://graphml.graphdrawing.org/xmlns">"#)?;
    writeln!(w, r#"  <key id="d0" for="node" attr.name="address" attr.type="string"/>"#)?;
    writeln!(w, r#"  <key id="d1" for="edge" attr.name="amount_btc" attr.type="double"/>"#)?;
    writeln!(w, r#"  <key id="d2" for="edge" attr.name="timestamp_ms" attr.type="long"/>"#)?;
    let default = if g.is_directed() { "directed" } else { "undirected" };
    writeln!(w, r#"  <graph id="G" edgedefault="{default}">"#)?;
    for (id, addr) in g.addresses().iter().enumerate() {
        writeln!(
            w,
            r#"    <node id="n{id}"><data key="d0">{}</data></node>"#,
            escape(addr.as_str())
        )?;
    }
    for a in g.arcs() {
        writeln!(
            w,
            r#"    <edge source="n{}" target="n{}"><data key="d1">{}</data><data key="d2">{}</data></edge>"#,
            a.source, a.target, a.amount_btc, a.timestamp_ms
        )?;
    }
    writeln!(w, "  </graph>")?;
    writeln!(w, "</graphml>")?;
    Ok(())
}

pub fn import_graphml<P: AsRef<Path>>(path: P) -> Result<TxGraph, GraphmlError> {
    import_graphml_from(BufReader::new(File::open(path)?))
}

pub fn import_graphml_from<R: BufRead>(reader: R) -> Result<TxGraph, GraphmlError> {
    let mut xml = Reader::from_reader(reader);
    let mut buf = Vec::new();

    // key id -> attr.name
    let mut key_names: std::collections::HashMap<String, String> = std::collections::HashMap::new();
    // node element id -> dense index
    let mut node_ids: std::collections::HashMap<String, u32> = std::collections::HashMap::new();
    let mut addresses: Vec<String> = Vec::new();
    let mut arcs: Vec<GraphArc> = Vec::new();
    let mut directed = true;

    enum Scope {
        None,
        Node { idx: u32 },
        Edge { source: String, target: String, amount: Btc, ts: u64 },
    }
    let mut scope = Scope::None;
    let mut data_key: Option<String> = None;
    let mut text = String::new();

    let attr_of = |e: &quick_xml::events::BytesStart<'_>, name: &[u8]| -> Result<Option<String>, GraphmlError> {
        for attr in e.attributes() {
            let attr = attr.map_err(|e| GraphmlError::Xml(e.to_string()))?;
            if attr.key.as_ref() == name {
                let v = attr
                    .normalized_value(quick_xml::XmlVersion::Implicit1_0)
                    .map_err(|e| GraphmlError::Xml(e.to_string()))?;
                return Ok(Some(v.into_owned()));
            }
        }
        Ok(None)
    };

    loop {
        let event = xml
            .read_event_into(&mut buf)
            .map_err(|e| GraphmlError::Xml(e.to_string()))?;
        match event {
            Event::Start(ref e) | Event::Empty(ref e) => {
                let empty = matches!(event, Event::Empty(_));
                match e.name().as_ref() {
                    b"key" => {
                        if let (Some(id), Some(name)) = (attr_of(e, b"id")?, attr_of(e, b"attr.name")?) {
                            key_names.insert(id, name);
                        }
                    }
                    b"graph" => {
                        if let Some(d) = attr_of(e, b"edgedefault")? {
                            directed = d != "undirected";
                        }
                    }
                    b"node" => {
                        let id = attr_of(e, b"id")?
                            .ok_or_else(|| GraphmlError::Invalid("node without id".into()))?;
                        let idx = addresses.len() as u32;
                        // default address = element id, overridden by data
                        addresses.push(id.clone());
                        node_ids.insert(id, idx);
                        if !empty {
                            scope = Scope::Node { idx };
                        }
                    }
                    b"edge" => {
                        let source = attr_of(e, b"source")?
                            .ok_or_else(|| GraphmlError::Invalid("edge without source".into()))?;
                        let target = attr_of(e, b"target")?
                            .ok_or_else(|| GraphmlError::Invalid("edge without target".into()))?;
                        let edge = Scope::Edge {
                            source,
                            target,
                            amount: Btc::ZERO,
                            ts: 0,
                        };
                        if empty {
                            push_arc(edge, &node_ids, &mut arcs)?;
                        } else {
                            scope = edge;
                        }
                    }
                    b"data" => {
                        data_key = attr_of(e, b"key")?;
                        text.clear();
                    }
                    _ => {}
                }
            }
            Event::Text(t) => {
                text.push_str(
                    &t.decode()
                        .map_err(|e| GraphmlError::Xml(e.to_string()))?,
                );
            }
            Event::CData(t) => {
                text.push_str(
                    &t.decode()
                        .map_err(|e| GraphmlError::Xml(e.to_string()))?,
                );
            }
            // entity references inside text come through as separate events
            Event::GeneralRef(r) => {
                if let Some(ch) = r
                    .resolve_char_ref()
                    .map_err(|e| GraphmlError::Xml(e.to_string()))?
                {
                    text.push(ch);
                } else {
                    let name = r.decode().map_err(|e| GraphmlError::Xml(e.to_string()))?;
                    match name.as_ref() {
                        "amp" => text.push('&'),
                        "lt" => text.push('<'),
                        "gt" => text.push('>'),
                        "quot" => text.push('"'),
                        "apos" => text.push('\''),
                        other => {
                            return Err(GraphmlError::Invalid(format!(
                                "unsupported entity &{other};"
                            )))
                        }
                    }
                }
            }
            Event::End(ref e) => match e.name().as_ref() {
                b"data" => {
                    let key = data_key.take().unwrap_or_default();
                    let name = key_names.get(&key).map(String::as_str).unwrap_or(&key);
                    let value = text.trim();
                    match (&mut scope, name) {
                        (Scope::Node { idx }, "address") => {
                            addresses[*idx as usize] = value.to_string();
                        }
                        (Scope::Edge { amount, .. }, "amount_btc") => {
                            *amount = parse_amount(value)?;
                        }
                        (Scope::Edge { ts, .. }, "timestamp_ms") => {
                            *ts = value.parse().map_err(|_| {
                                GraphmlError::Invalid(format!("bad timestamp_ms {value:?}"))
                            })?;
                        }
                        _ => {}
                    }
                    text.clear();
                }
                b"node" => {
                    scope = Scope::None;
                }
                b"edge" => {
                    let done = std::mem::replace(&mut scope, Scope::None);
                    push_arc(done, &node_ids, &mut arcs)?;
                }
                _ => {}
            },
            Event::Eof => break,
            _ => {}
        }
        buf.clear();
    }

    fn push_arc(
        scope: Scope,
        node_ids: &std::collections::HashMap<String, u32>,
        arcs: &mut Vec<GraphArc>,
    ) -> Result<(), GraphmlError> {
        if let Scope::Edge { source, target, amount, ts } = scope {
            let lookup = |id: &str| {
                node_ids
                    .get(id)
                    .copied()
                    .ok_or_else(|| GraphmlError::Invalid(format!("edge references unknown node {id:?}")))
            };
            arcs.push(GraphArc {
                source: lookup(&source)?,
                target: lookup(&target)?,
                amount_btc: amount,
                timestamp_ms: ts,
            });
        }
        Ok(())
    }

    Ok(TxGraph::from_parts(addresses, arcs, directed)?)
}

fn parse_amount(value: &str) -> Result<Btc, GraphmlError> {
    if let Ok(b) = value.parse::<Btc>() {
        return Ok(b);
    }
    // fall back to general double syntax from foreign files
    let f: f64 = value
        .parse()
        .map_err(|_| GraphmlError::Invalid(format!("bad amount_btc {value:?}")))?;
    if !(0.0..=u64::MAX as f64 / 1e8).contains(&f) {
        return Err(GraphmlError::Invalid(format!("bad amount_btc {value:?}")));
    }
    Ok(Btc::from_sat((f * 1e8).round() as u64))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::Edge;
    use crate::ledger::EdgeList;

    fn graph(pairs: &[(&str, &str)]) -> TxGraph {
        let edges = pairs
            .iter()
            .enumerate()
            .map(|(i, &(s, t))| Edge {
                source: s.into(),
                target: t.into(),
                amount_btc: Btc::from_sat((i as u64 + 1) * 25_000_000),
                timestamp_ms: i as u64 * 100,
            })
            .collect();
        TxGraph::build(&EdgeList::from_edges(edges).unwrap()).unwrap()
    }

    fn roundtrip(g: &TxGraph) -> TxGraph {
        let mut buf = Vec::new();
        export_graphml_to(g, &mut buf).unwrap();
        import_graphml_from(&buf[..]).unwrap()
    }

    #[test]
    fn export_counts_elements() {
        let g = graph(&[("A", "B"), ("A", "C")]);
        let mut buf = Vec::new();
        export_graphml_to(&g, &mut buf).unwrap();
        let xml = String::from_utf8(buf).unwrap();
        assert_eq!(xml.matches("<node ").count(), 3);
        assert_eq!(xml.matches("<edge ").count(), 2);
    }

    #[test]
    fn empty_graph_is_valid() {
        let g = graph(&[]);
        let back = roundtrip(&g);
        assert_eq!(back.node_count(), 0);
        assert_eq!(back.arc_count(), 0);
    }

    #[test]
    fn parallel_arcs_survive() {
        let g = graph(&[("A", "B"), ("A", "B")]);
        let back = roundtrip(&g);
        assert_eq!(back.arc_count(), 2);
    }

    #[test]
    fn roundtrip_preserves_structure_and_attributes() {
        let g = graph(&[("1Abc", "3X<y>&\"z", ), ("3X<y>&\"z", "1Abc"), ("1Abc", "bc1q")]);
        let back = roundtrip(&g);
        assert_eq!(back.node_count(), g.node_count());
        assert_eq!(back.arc_count(), g.arc_count());
        let triple = |g: &TxGraph| -> Vec<(String, String, Btc)> {
            let mut v: Vec<_> = g
                .arcs()
                .iter()
                .map(|a| {
                    (
                        g.address(a.source).to_string(),
                        g.address(a.target).to_string(),
                        a.amount_btc,
                    )
                })
                .collect();
            v.sort();
            v
        };
        assert_eq!(triple(&back), triple(&g));
        assert_eq!(
            back.arcs().iter().map(|a| a.timestamp_ms).collect::<Vec<_>>(),
            g.arcs().iter().map(|a| a.timestamp_ms).collect::<Vec<_>>()
        );
    }
}
