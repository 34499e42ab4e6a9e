//! Text formats: edge lists, degree sequences and matching files.

use std::collections::HashSet;
use std::fmt::Write as _;

use crate::configmodel::DegreeSequence;
use crate::error::{invalid, Result};
use crate::multigraph::MultiGraph;

/// `n m` followed by `m` lines `u v` (0-based). Parallel lines are allowed, loops are not.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EdgeList {
    pub n: usize,
    pub pairs: Vec<(usize, usize)>,
}

fn parse_pair(line: &str, lineno: usize) -> Result<(usize, usize)> {
    let mut it = line.split_whitespace().map(|t| t.parse::<usize>());
    match (it.next(), it.next(), it.next()) {
        (Some(Ok(a)), Some(Ok(b)), None) => Ok((a, b)),
        _ => Err(invalid(format!("line {lineno}: expected two non-negative integers, got {line:?}"))),
    }
}

fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

impl EdgeList {
    pub fn from_graph_pairs(n: usize, pairs: Vec<(usize, usize)>) -> Self {
        EdgeList { n, pairs }
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = content_lines(text);
        let (lineno, header) = lines.next().ok_or_else(|| invalid("empty edge list"))?;
        let (n, m) = parse_pair(header, lineno)?;
        let mut pairs = Vec::with_capacity(m);
        for (lineno, line) in lines {
            let (u, v) = parse_pair(line, lineno)?;
            if u >= n || v >= n {
                return Err(invalid(format!("line {lineno}: vertex out of range 0..{n}")));
            }
            if u == v {
                return Err(invalid(format!("line {lineno}: loop at vertex {u}")));
            }
            pairs.push((u, v));
        }
        if pairs.len() != m {
            return Err(invalid(format!("header announces {m} edges, found {}", pairs.len())));
        }
        Ok(EdgeList { n, pairs })
    }

    pub fn to_text(&self) -> String {
        let mut out = String::with_capacity(12 * (self.pairs.len() + 1));
        let _ = writeln!(out, "{} {}", self.n, self.pairs.len());
        for (u, v) in &self.pairs {
            let _ = writeln!(out, "{u} {v}");
        }
        out
    }

    pub fn to_graph(&self) -> Result<MultiGraph> {
        MultiGraph::build(self.n, &self.pairs)
    }
}

/// One degree per line.
pub fn parse_degree_sequence(text: &str) -> Result<DegreeSequence> {
    let mut d = Vec::new();
    for (lineno, line) in content_lines(text) {
        let x = line
            .parse::<u32>()
            .map_err(|_| invalid(format!("line {lineno}: expected a degree, got {line:?}")))?;
        d.push(x);
    }
    let d = DegreeSequence::new(d);
    d.validate()?;
    Ok(d)
}

pub fn degree_sequence_text(d: &DegreeSequence) -> String {
    d.as_slice().iter().map(|x| format!("{x}\n")).collect()
}

/// Matched pairs of input vertices, with the deficiency ledger in a header comment.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MatchingFile {
    pub kappa: usize,
    pub r0: usize,
    pub r2b: usize,
    pub pairs: Vec<(usize, usize)>,
}

impl MatchingFile {
    pub fn to_text(&self) -> String {
        let mut out = format!("# kappa={} r0={} r2b={}\n", self.kappa, self.r0, self.r2b);
        for (u, v) in &self.pairs {
            let _ = writeln!(out, "{u} {v}");
        }
        out
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut header = None;
        for line in text.lines().map(str::trim) {
            if let Some(rest) = line.strip_prefix('#') {
                header = Some(rest.to_owned());
                break;
            }
            if !line.is_empty() {
                break;
            }
        }
        let header = header.ok_or_else(|| invalid("matching file lacks its header comment"))?;
        let mut fields = [None; 3];
        for tok in header.split_whitespace() {
            let Some((k, v)) = tok.split_once('=') else { continue };
            let slot = match k {
                "kappa" => 0,
                "r0" => 1,
                "r2b" => 2,
                _ => continue,
            };
            fields[slot] = Some(v.parse::<usize>().map_err(|_| invalid(format!("bad header value {tok:?}")))?);
        }
        let [Some(kappa), Some(r0), Some(r2b)] = fields else {
            return Err(invalid("matching header needs kappa, r0 and r2b"));
        };
        let pairs = content_lines(text).map(|(i, l)| parse_pair(l, i)).collect::<Result<_>>()?;
        Ok(MatchingFile { kappa, r0, r2b, pairs })
    }

    /// Checks that the pairs are vertex-disjoint edges of `input` and that the
    /// header's κ equals the number of uncovered vertices.
    pub fn verify(&self, input: &EdgeList) -> Result<()> {
        let edges: HashSet<(usize, usize)> = input.pairs.iter().map(|&(a, b)| (a.min(b), a.max(b))).collect();
        let mut covered = vec![false; input.n];
        for &(u, v) in &self.pairs {
            if !edges.contains(&(u.min(v), u.max(v))) {
                return Err(invalid(format!("pair {u} {v} is not an edge of the input")));
            }
            for x in [u, v] {
                if std::mem::replace(&mut covered[x], true) {
                    return Err(invalid(format!("vertex {x} is matched twice")));
                }
            }
        }
        let uncovered = input.n - 2 * self.pairs.len();
        if uncovered != self.kappa {
            return Err(invalid(format!("header kappa={} but {uncovered} vertices are uncovered", self.kappa)));
        }
        if self.r0 + self.r2b > self.kappa {
            return Err(invalid("header r0 + r2b exceeds kappa"));
        }
        Ok(())
    }
}
