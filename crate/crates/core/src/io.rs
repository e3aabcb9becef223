//! Plain-text formats.
//!
//! All formats are line based; `#` starts a comment and blank lines are
//! ignored.
//!
//! * Graph: optional `n <count>` header, then one `u v` edge per line.
//!   Without a header the vertex count is one more than the largest id.
//!   A line with a single id declares an isolated vertex.
//! * Order: `v parent` or `v -` for a root.
//! * Model: `m <side>`, then `v row col` with 1-based cells.
//! * Ports: `v j1,j2,...` with 1-based port indices.
//! * Sequences: see [`KdSequence::parse`].

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::graph::{Graph, VertexId};
use crate::grid_minor::MinorModel;
use crate::orders::TreeOrder;
use crate::sequences::{KdSequence, PortMap};

fn lines(text: &str) -> impl Iterator<Item = (usize, Vec<&str>)> {
    text.lines().enumerate().filter_map(|(i, raw)| {
        let line = raw.split('#').next().unwrap_or("").trim();
        (!line.is_empty()).then(|| (i + 1, line.split_whitespace().collect()))
    })
}

fn num(line: usize, tok: &str) -> Result<usize> {
    tok.parse().map_err(|_| Error::Parse {
        line,
        msg: format!("expected a non-negative integer, got {tok:?}"),
    })
}

pub fn parse_graph(text: &str) -> Result<Graph> {
    let mut n: Option<usize> = None;
    let mut edges = Vec::new();
    let mut isolated = Vec::new();
    let mut seen_edge = false;
    for (line, toks) in lines(text) {
        match toks.as_slice() {
            ["n", c] => {
                if n.is_some() || seen_edge {
                    return Err(Error::Parse {
                        line,
                        msg: "the n header must come first and only once".into(),
                    });
                }
                n = Some(num(line, c)?);
            }
            [v] => {
                seen_edge = true;
                isolated.push((line, num(line, v)?));
            }
            [u, v] => {
                seen_edge = true;
                let (u, v) = (num(line, u)?, num(line, v)?);
                if u == v {
                    return Err(Error::SelfLoop(u));
                }
                edges.push((line, u, v));
            }
            _ => {
                return Err(Error::Parse {
                    line,
                    msg: "expected `u v`, `v` or `n <count>`".into(),
                })
            }
        }
    }
    let max_id = edges
        .iter()
        .flat_map(|&(_, u, v)| [u, v])
        .chain(isolated.iter().map(|&(_, v)| v))
        .max();
    let count = match (n, max_id) {
        (Some(n), Some(m)) if m >= n => {
            let line = edges
                .iter()
                .find(|e| e.1 >= n || e.2 >= n)
                .map(|e| e.0)
                .or_else(|| isolated.iter().find(|x| x.1 >= n).map(|x| x.0))
                .unwrap_or(0);
            return Err(Error::Parse {
                line,
                msg: format!("vertex {m} out of range for n = {n}"),
            });
        }
        (Some(n), _) => n,
        (None, Some(m)) => m + 1,
        (None, None) => 0,
    };
    Graph::from_edges(count, edges.into_iter().map(|(_, u, v)| (u, v)))
}

pub fn write_graph(g: &Graph) -> String {
    let mut out = format!("n {}\n", g.capacity());
    for (u, v) in g.edges() {
        let _ = writeln!(out, "{u} {v}");
    }
    out
}

pub fn parse_order(text: &str) -> Result<TreeOrder> {
    let mut pairs = Vec::new();
    let mut seen = BTreeSet::new();
    for (line, toks) in lines(text) {
        let [v, p] = toks.as_slice() else {
            return Err(Error::Parse {
                line,
                msg: "expected `v parent` or `v -`".into(),
            });
        };
        let v = num(line, v)?;
        if !seen.insert(v) {
            return Err(Error::Parse {
                line,
                msg: format!("vertex {v} listed twice"),
            });
        }
        let p = if *p == "-" { None } else { Some(num(line, p)?) };
        pairs.push((v, p));
    }
    let vs: BTreeSet<VertexId> = pairs.iter().map(|p| p.0).collect();
    if let Some(&(v, Some(p))) = pairs.iter().find(|(_, p)| p.is_some_and(|p| !vs.contains(&p))) {
        return Err(Error::InvalidOrder(format!("parent {p} of {v} is not in the order")));
    }
    let o = TreeOrder::from_parents(pairs);
    // Every vertex must reach a root.
    for v in o.vertices() {
        let mut cur = v;
        for _ in 0..=o.len() {
            match o.parent(cur) {
                Some(p) => cur = p,
                None => break,
            }
        }
        if o.parent(cur).is_some() {
            return Err(Error::InvalidOrder(format!("cycle through {v}")));
        }
    }
    Ok(o)
}

pub fn write_order(o: &TreeOrder) -> String {
    let mut out = String::new();
    for (v, p) in o.pairs() {
        match p {
            Some(p) => writeln!(out, "{v} {p}"),
            None => writeln!(out, "{v} -"),
        }
        .expect("writing to a String");
    }
    out
}

pub fn parse_model(text: &str) -> Result<MinorModel> {
    let mut m = None;
    let mut cell = BTreeMap::new();
    for (line, toks) in lines(text) {
        match toks.as_slice() {
            ["m", side] if m.is_none() && cell.is_empty() => m = Some(num(line, side)?),
            [v, r, c] => {
                let side = m.ok_or(Error::Parse {
                    line,
                    msg: "model lines before `m <side>`".into(),
                })?;
                let (v, r, c) = (num(line, v)?, num(line, r)?, num(line, c)?);
                if r == 0 || c == 0 || r > side || c > side {
                    return Err(Error::Parse {
                        line,
                        msg: format!("cell ({r}, {c}) outside 1..={side}"),
                    });
                }
                if cell.insert(v, (r, c)).is_some() {
                    return Err(Error::Parse {
                        line,
                        msg: format!("vertex {v} assigned twice"),
                    });
                }
            }
            _ => {
                return Err(Error::Parse {
                    line,
                    msg: "expected `m <side>` or `v row col`".into(),
                })
            }
        }
    }
    let m = m.ok_or(Error::Parse {
        line: 0,
        msg: "missing `m <side>`".into(),
    })?;
    Ok(MinorModel::new(m, cell))
}

pub fn write_model(mm: &MinorModel) -> String {
    let mut out = format!("m {}\n", mm.m);
    for (v, (r, c)) in &mm.cell {
        let _ = writeln!(out, "{v} {r} {c}");
    }
    out
}

pub fn parse_ports(text: &str) -> Result<PortMap> {
    let mut out = PortMap::new();
    for (line, toks) in lines(text) {
        let [v, js] = toks.as_slice() else {
            return Err(Error::Parse {
                line,
                msg: "expected `v j1,j2,...`".into(),
            });
        };
        let v = num(line, v)?;
        let set = out.entry(v).or_default();
        for j in js.split(',').filter(|s| !s.is_empty()) {
            let j = num(line, j)?;
            if j == 0 {
                return Err(Error::Parse {
                    line,
                    msg: "port indices start at 1".into(),
                });
            }
            set.insert(j);
        }
    }
    Ok(out)
}

pub fn write_ports(ports: &PortMap) -> String {
    let mut out = String::new();
    for (v, js) in ports {
        let list: Vec<String> = js.iter().map(ToString::to_string).collect();
        let _ = writeln!(out, "{v} {}", list.join(","));
    }
    out
}

pub fn parse_sequence(text: &str) -> Result<KdSequence> {
    KdSequence::parse(text)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn graph_round_trip() {
        let g = Graph::grid(3, 4);
        assert_eq!(parse_graph(&write_graph(&g)).unwrap(), g);
    }

    #[test]
    fn graph_errors_carry_lines() {
        assert_eq!(parse_graph("0 1\n1 1\n"), Err(Error::SelfLoop(1)));
        match parse_graph("n 3\n0 1\n# c\n2 7\n") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 4),
            other => panic!("{other:?}"),
        }
        assert!(parse_graph("0 x\n").is_err());
        assert_eq!(parse_graph("n 4\n0 1\n").unwrap().num_vertices(), 4);
        assert_eq!(parse_graph("5\n").unwrap().num_vertices(), 6);
    }

    #[test]
    fn order_round_trip_and_cycles() {
        let o = parse_order("0 -\n1 0\n2 1\n").unwrap();
        assert_eq!(o.depth_of(2), 2);
        assert_eq!(parse_order(&write_order(&o)).unwrap(), o);
        assert!(parse_order("0 1\n1 0\n").is_err());
        assert!(parse_order("0 5\n").is_err());
    }

    #[test]
    fn model_and_ports() {
        let mm = MinorModel::identity(3);
        assert_eq!(parse_model(&write_model(&mm)).unwrap(), mm);
        assert!(parse_model("m 2\n0 3 1\n").is_err());
        let p = parse_ports("0 1,2\n4 3\n").unwrap();
        assert_eq!(parse_ports(&write_ports(&p)).unwrap(), p);
        assert!(parse_ports("0 0\n").is_err());
    }
}
