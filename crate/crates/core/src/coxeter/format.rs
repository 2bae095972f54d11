//! Plain-text diagram files.
//!
//! ```text
//! diagram S1_4
//! vertices 5
//! edge 1 2 m=4
//! edge 4 5 dotted w=sqrt(5)/2
//! edge 5 6 dotted w=?
//! ```
//!
//! Node names other than the default numbering are kept in comments of the
//! form `# node 8 5'` so that files stay within the plain grammar.

use std::collections::BTreeSet;

use super::gram::cos_pi_over;
use super::{CoxeterDiagram, EdgeKind, Weight};
use crate::error::{Error, Result};
use crate::exact::{parse_expr, TowerBuilder};

enum RawEdge {
    Label(u64),
    Heavy,
    Dotted(Option<(String, usize)>),
}

struct Line<'a> {
    number: usize,
    text: &'a str,
}

impl Line<'_> {
    fn column_of(&self, token: &str) -> usize {
        // Tokens are subslices of the line, so pointer arithmetic is exact.
        token.as_ptr() as usize - self.text.as_ptr() as usize + 1
    }

    fn err(&self, token: &str, msg: impl Into<String>) -> Error {
        Error::parse(self.number, self.column_of(token), msg)
    }
}

fn parse_index(line: &Line<'_>, tok: &str, n: usize) -> Result<usize> {
    let i: usize = tok
        .parse()
        .map_err(|_| line.err(tok, format!("expected a node number, found '{tok}'")))?;
    if i == 0 || i > n {
        return Err(line.err(tok, format!("node {i} outside 1..={n}")));
    }
    Ok(i - 1)
}

pub fn parse_diagram(text: &str) -> Result<CoxeterDiagram> {
    let mut name = None;
    let mut n: Option<usize> = None;
    let mut names: Vec<(usize, String)> = Vec::new();
    let mut raw: Vec<(usize, usize, RawEdge, usize)> = Vec::new();
    let mut seen = BTreeSet::new();

    for (k, text_line) in text.lines().enumerate() {
        let line = Line {
            number: k + 1,
            text: text_line,
        };
        let trimmed = text_line.trim_start();
        if let Some(rest) = trimmed.strip_prefix('#') {
            let toks: Vec<&str> = rest.split_whitespace().collect();
            if toks.len() == 3 && toks[0] == "node" {
                if let (Some(n), Ok(i)) = (n, toks[1].parse::<usize>()) {
                    if (1..=n).contains(&i) {
                        names.push((i - 1, toks[2].to_string()));
                    }
                }
            }
            continue;
        }
        let toks: Vec<&str> = text_line.split_whitespace().collect();
        let Some(&head) = toks.first() else { continue };
        match head {
            "diagram" => {
                if toks.len() != 2 {
                    return Err(line.err(head, "expected 'diagram NAME'"));
                }
                name = Some(toks[1].to_string());
            }
            "vertices" => {
                if n.is_some() {
                    return Err(line.err(head, "duplicate 'vertices' line"));
                }
                let tok = toks.get(1).ok_or_else(|| line.err(head, "expected 'vertices N'"))?;
                if toks.len() != 2 {
                    return Err(line.err(toks[2], "unexpected token"));
                }
                n = Some(
                    tok.parse()
                        .map_err(|_| line.err(tok, format!("expected a count, found '{tok}'")))?,
                );
            }
            "edge" => {
                let nn = n.ok_or_else(|| line.err(head, "'edge' before 'vertices'"))?;
                if toks.len() < 4 {
                    return Err(line.err(head, "expected 'edge I J m=M' or 'edge I J dotted w=EXPR'"));
                }
                let i = parse_index(&line, toks[1], nn)?;
                let j = parse_index(&line, toks[2], nn)?;
                if i == j {
                    return Err(line.err(toks[2], "self-edge"));
                }
                if !seen.insert((i.min(j), i.max(j))) {
                    return Err(line.err(head, format!("duplicate edge {} {}", i + 1, j + 1)));
                }
                let kind = if let Some(m) = toks[3].strip_prefix("m=") {
                    if toks.len() != 4 {
                        return Err(line.err(toks[4], "unexpected token"));
                    }
                    if m == "inf" {
                        RawEdge::Heavy
                    } else {
                        let m: u64 = m
                            .parse()
                            .map_err(|_| line.err(toks[3], format!("bad label '{m}'")))?;
                        if m < 3 {
                            return Err(line.err(toks[3], format!("label m={m} must be at least 3")));
                        }
                        RawEdge::Label(m)
                    }
                } else if toks[3] == "dotted" {
                    let w = toks
                        .get(4)
                        .and_then(|t| t.strip_prefix("w="))
                        .ok_or_else(|| line.err(toks[3], "expected 'w=EXPR' after 'dotted'"))?;
                    if toks.len() != 5 {
                        return Err(line.err(toks[5], "unexpected token"));
                    }
                    if w == "?" {
                        RawEdge::Dotted(None)
                    } else {
                        RawEdge::Dotted(Some((w.to_string(), line.column_of(w))))
                    }
                } else {
                    return Err(line.err(toks[3], format!("unknown edge kind '{}'", toks[3])));
                };
                raw.push((i, j, kind, line.number));
            }
            other => return Err(line.err(other, format!("unknown directive '{other}'"))),
        }
    }

    let n = n.ok_or_else(|| Error::parse(1, 1, "missing 'vertices' line"))?;
    let mut d = CoxeterDiagram::new(n);
    d.name = name;
    for (i, s) in names {
        d.set_node_name(i, s);
    }

    // Labels first so their radicals come first in the tower.
    let mut b = TowerBuilder::new(d.tower.clone());
    for (_, _, e, _) in &raw {
        if let RawEdge::Label(m) = e {
            cos_pi_over(&mut b, *m)?;
        }
    }
    for (i, j, e, number) in raw {
        let kind = match e {
            RawEdge::Label(m) => EdgeKind::Label(m),
            RawEdge::Heavy => EdgeKind::Heavy,
            RawEdge::Dotted(None) => EdgeKind::Dotted(None),
            RawEdge::Dotted(Some((src, col))) => {
                let relocate = |e: Error| match e {
                    Error::Parse { column, message, .. } => Error::Parse {
                        line: number,
                        column: col + column - 1,
                        message,
                    },
                    other => Error::parse(number, col, other.to_string()),
                };
                let value = parse_expr(&src).and_then(|x| x.eval(&mut b)).map_err(relocate)?;
                EdgeKind::Dotted(Some(Weight { value, source: src }))
            }
        };
        d.adopt_tower(b.tower())?;
        d.set_edge(i, j, kind).map_err(|e| match e {
            Error::InvalidDiagram(msg) => Error::parse(number, 1, msg),
            other => other,
        })?;
    }
    d.adopt_tower(b.tower())?;
    Ok(d)
}

pub fn serialize_diagram(d: &CoxeterDiagram) -> String {
    let mut out = String::new();
    if let Some(name) = &d.name {
        out.push_str(&format!("diagram {name}\n"));
    }
    out.push_str(&format!("vertices {}\n", d.n()));
    for (i, name) in d.nodes.iter().enumerate() {
        if *name != (i + 1).to_string() {
            out.push_str(&format!("# node {} {}\n", i + 1, name));
        }
    }
    for ((i, j), e) in d.edges() {
        let kind = match e {
            EdgeKind::Label(m) => format!("m={m}"),
            EdgeKind::Heavy => "m=inf".to_string(),
            EdgeKind::Dotted(None) => "dotted w=?".to_string(),
            EdgeKind::Dotted(Some(w)) => format!("dotted w={}", w.source),
        };
        out.push_str(&format!("edge {} {} {}\n", i + 1, j + 1, kind));
    }
    out
}
