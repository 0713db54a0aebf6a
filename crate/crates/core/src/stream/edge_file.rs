// SPDX-License-Identifier: Apache-2.0

use std::fs::File;
use std::io::{BufRead, BufReader, Lines, Write};
use std::path::Path;

use super::TimestampedEdge;
use crate::error::{Error, Result};
use crate::types::NodeId;

/// Streaming reader for edge files: `u v` or `u v ts` per line,
/// whitespace-separated, `#` lines are comments. A missing timestamp is the
/// 0-based index of the data line. Self-loops are skipped and counted.
pub struct EdgeReader<R> {
    lines: Lines<R>,
    line_no: usize,
    data_index: u64,
    skipped_self_loops: usize,
    header_n: Option<u64>,
}

impl<R: BufRead> EdgeReader<R> {
    pub fn new(reader: R) -> Self {
        EdgeReader {
            lines: reader.lines(),
            line_no: 0,
            data_index: 0,
            skipped_self_loops: 0,
            header_n: None,
        }
    }

    pub fn skipped_self_loops(&self) -> usize {
        self.skipped_self_loops
    }

    /// Node count from a `# n=<n>` header, if one has been read so far.
    pub fn header_n(&self) -> Option<u64> {
        self.header_n
    }

    fn parse_line(&mut self, line: &str) -> Result<Option<TimestampedEdge>> {
        let t = line.trim();
        if t.is_empty() {
            return Ok(None);
        }
        if let Some(rest) = t.strip_prefix('#') {
            for tok in rest.split_whitespace() {
                if let Some(v) = tok.strip_prefix("n=") {
                    self.header_n = v.parse().ok();
                }
            }
            return Ok(None);
        }
        let line_no = self.line_no;
        let bad = |msg: String| Error::Parse {
            line: line_no,
            message: msg,
        };
        let toks: Vec<&str> = t.split_whitespace().collect();
        if !(2..=3).contains(&toks.len()) {
            return Err(bad(format!("expected `u v` or `u v ts`, got {} fields", toks.len())));
        }
        let node = |s: &str| s.parse::<NodeId>().map_err(|_| bad(format!("invalid node id {s:?}")));
        let u = node(toks[0])?;
        let v = node(toks[1])?;
        let ts = match toks.get(2) {
            Some(s) => s.parse::<u64>().map_err(|_| bad(format!("invalid timestamp {s:?}")))?,
            None => self.data_index,
        };
        self.data_index += 1;
        if u == v {
            self.skipped_self_loops += 1;
            log::warn!("line {line_no}: skipping self-loop on node {u}");
            return Ok(None);
        }
        Ok(Some(TimestampedEdge::new(u, v, ts)))
    }
}

impl<R: BufRead> Iterator for EdgeReader<R> {
    type Item = Result<TimestampedEdge>;

    fn next(&mut self) -> Option<Self::Item> {
        loop {
            let line = match self.lines.next()? {
                Ok(l) => l,
                Err(e) => return Some(Err(e.into())),
            };
            self.line_no += 1;
            match self.parse_line(&line) {
                Ok(Some(e)) => return Some(Ok(e)),
                Ok(None) => continue,
                Err(e) => return Some(Err(e)),
            }
        }
    }
}

/// A fully parsed edge file.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ParsedStream {
    pub edges: Vec<TimestampedEdge>,
    pub skipped_self_loops: usize,
    pub header_n: Option<u64>,
}

pub fn parse_edge_file(reader: impl BufRead) -> Result<ParsedStream> {
    let mut it = EdgeReader::new(reader);
    let edges = it.by_ref().collect::<Result<Vec<_>>>()?;
    Ok(ParsedStream {
        edges,
        skipped_self_loops: it.skipped_self_loops,
        header_n: it.header_n,
    })
}

pub fn read_edge_file(path: impl AsRef<Path>) -> Result<ParsedStream> {
    parse_edge_file(BufReader::new(File::open(path)?))
}

/// Writes `u v ts` lines after the given comment lines (without `#`).
pub fn write_edge_stream<'a, W: Write>(
    mut w: W,
    header: impl IntoIterator<Item = &'a str>,
    edges: &[TimestampedEdge],
) -> Result<()> {
    for h in header {
        writeln!(w, "# {h}")?;
    }
    for e in edges {
        writeln!(w, "{} {} {}", e.u, e.v, e.ts)?;
    }
    w.flush()?;
    Ok(())
}
