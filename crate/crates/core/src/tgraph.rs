//! Temporal graph data model and the plain-text edge list format.
//!
//! A temporal edge `(u, v, t, λ)` leaves `u` at time `t` and arrives at `v`
//! at time `t + λ`. The graph is a multiset of such edges over dense vertex
//! ids `0..n`.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::io::{self, BufRead, Write};
use std::str::FromStr;

use thiserror::Error;

/// Dense id of a vertex in the temporal graph.
pub type VertexId = u32;

/// Time instants and durations.
pub type Time = u64;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EdgeError {
    #[error("zero traversal time")]
    ZeroTraversalTime,
    #[error("arrival time overflows the time domain")]
    TimeOverflow,
    #[error("vertex id {0} out of range for {1} vertices")]
    VertexOutOfRange(VertexId, usize),
}

#[derive(Debug, Error)]
pub enum ParseError {
    #[error("line {line}: {message}")]
    Malformed { line: usize, message: String },
    #[error("line {line}: {source}")]
    Edge { line: usize, source: EdgeError },
    #[error(transparent)]
    Io(#[from] io::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TemporalEdge {
    pub u: VertexId,
    pub v: VertexId,
    pub t: Time,
    pub lambda: Time,
}

impl TemporalEdge {
    pub fn new(u: VertexId, v: VertexId, t: Time, lambda: Time) -> Result<Self, EdgeError> {
        if lambda == 0 {
            return Err(EdgeError::ZeroTraversalTime);
        }
        if t.checked_add(lambda).is_none() {
            return Err(EdgeError::TimeOverflow);
        }
        Ok(Self { u, v, t, lambda })
    }

    #[inline]
    pub fn arrival(&self) -> Time {
        self.t + self.lambda
    }
}

impl fmt::Display for TemporalEdge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {} {}", self.u, self.v, self.t, self.lambda)
    }
}

/// Counts reported by the `stats` command.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct GraphStats {
    pub vertices: usize,
    pub edges: usize,
    /// Largest number of temporal edges between one ordered pair.
    pub max_multiplicity: usize,
    /// Distinct instants among all start and arrival times.
    pub time_instants: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TemporalGraph {
    num_vertices: usize,
    edges: Vec<TemporalEdge>,
}

impl TemporalGraph {
    pub fn new(num_vertices: usize) -> Self {
        Self {
            num_vertices,
            edges: Vec::new(),
        }
    }

    /// Builds a graph over `num_vertices` vertices, validating every edge.
    pub fn from_edges(
        num_vertices: usize,
        edges: impl IntoIterator<Item = TemporalEdge>,
    ) -> Result<Self, EdgeError> {
        let mut g = Self::new(num_vertices);
        for e in edges {
            g.push_checked(e)?;
        }
        Ok(g)
    }

    fn push_checked(&mut self, e: TemporalEdge) -> Result<(), EdgeError> {
        let e = TemporalEdge::new(e.u, e.v, e.t, e.lambda)?;
        for id in [e.u, e.v] {
            if id as usize >= self.num_vertices {
                return Err(EdgeError::VertexOutOfRange(id, self.num_vertices));
            }
        }
        self.edges.push(e);
        Ok(())
    }

    /// Appends an edge, growing the vertex set to cover its endpoints.
    pub fn add_edge(&mut self, e: TemporalEdge) -> Result<(), EdgeError> {
        let needed = e.u.max(e.v) as usize + 1;
        if needed > self.num_vertices {
            self.num_vertices = needed;
        }
        self.push_checked(e)
    }

    pub fn num_vertices(&self) -> usize {
        self.num_vertices
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[TemporalEdge] {
        &self.edges
    }

    /// Π(u, v): indices of the temporal edges from `u` to `v`, per ordered pair.
    pub fn pair_groups(&self) -> HashMap<(VertexId, VertexId), Vec<usize>> {
        let mut groups: HashMap<_, Vec<usize>> = HashMap::new();
        for (i, e) in self.edges.iter().enumerate() {
            groups.entry((e.u, e.v)).or_default().push(i);
        }
        groups
    }

    /// π(u, v).
    pub fn multiplicity(&self, u: VertexId, v: VertexId) -> usize {
        self.edges.iter().filter(|e| e.u == u && e.v == v).count()
    }

    /// π, the maximum of π(u, v) over all pairs.
    pub fn max_multiplicity(&self) -> usize {
        self.pair_groups().values().map(Vec::len).max().unwrap_or(0)
    }

    pub fn out_degree(&self, u: VertexId) -> usize {
        self.edges.iter().filter(|e| e.u == u).count()
    }

    pub fn in_degree(&self, v: VertexId) -> usize {
        self.edges.iter().filter(|e| e.v == v).count()
    }

    pub fn stats(&self) -> GraphStats {
        let instants: BTreeSet<Time> = self
            .edges
            .iter()
            .flat_map(|e| [e.t, e.arrival()])
            .collect();
        GraphStats {
            vertices: self.num_vertices,
            edges: self.edges.len(),
            max_multiplicity: self.max_multiplicity(),
            time_instants: instants.len(),
        }
    }

    /// Writes the graph in the edge list format, with a `# vertices N` header.
    pub fn write_edge_list<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "# vertices {}", self.num_vertices)?;
        for e in &self.edges {
            writeln!(w, "{e}")?;
        }
        Ok(())
    }
}

fn parse_u64(tok: &str, line: usize, what: &str) -> Result<u64, ParseError> {
    tok.parse::<u64>().map_err(|_| ParseError::Malformed {
        line,
        message: format!("invalid {what} `{tok}`"),
    })
}

/// Parses one `u v t lambda` record. `line` is used for error reporting only.
pub fn parse_edge_line(text: &str, line: usize) -> Result<TemporalEdge, ParseError> {
    let toks: Vec<&str> = text.split_whitespace().collect();
    if toks.len() != 4 {
        return Err(ParseError::Malformed {
            line,
            message: format!("expected `u v t lambda`, found {} fields", toks.len()),
        });
    }
    let u = parse_u64(toks[0], line, "vertex id")?;
    let v = parse_u64(toks[1], line, "vertex id")?;
    let id = |x: u64| {
        VertexId::try_from(x).map_err(|_| ParseError::Malformed {
            line,
            message: format!("vertex id {x} too large"),
        })
    };
    let (u, v) = (id(u)?, id(v)?);
    let t = parse_u64(toks[2], line, "start time")?;
    let lambda = parse_u64(toks[3], line, "traversal time")?;
    TemporalEdge::new(u, v, t, lambda).map_err(|source| ParseError::Edge { line, source })
}

/// Reads an edge list: optional `# vertices N` header, `#` comments, one
/// `u v t lambda` record per line.
pub fn parse_edge_list<R: BufRead>(reader: R) -> Result<TemporalGraph, ParseError> {
    let mut declared: Option<usize> = None;
    let mut edges = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line_no = i + 1;
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        if let Some(comment) = trimmed.strip_prefix('#') {
            let mut toks = comment.split_whitespace();
            if toks.next() == Some("vertices") {
                let n = toks.next().ok_or_else(|| ParseError::Malformed {
                    line: line_no,
                    message: "missing count in `# vertices` header".into(),
                })?;
                declared = Some(parse_u64(n, line_no, "vertex count")? as usize);
            }
            continue;
        }
        edges.push((line_no, parse_edge_line(trimmed, line_no)?));
    }

    let max_id = edges.iter().map(|(_, e)| e.u.max(e.v) as usize + 1).max();
    let n = match (declared, max_id) {
        (Some(n), Some(m)) if m > n => {
            let (line, e) = edges
                .iter()
                .find(|(_, e)| e.u.max(e.v) as usize >= n)
                .expect("an edge exceeds the declared count");
            return Err(ParseError::Edge {
                line: *line,
                source: EdgeError::VertexOutOfRange(e.u.max(e.v), n),
            });
        }
        (Some(n), _) => n,
        (None, m) => m.unwrap_or(0),
    };
    let mut g = TemporalGraph::new(n);
    g.edges = edges.into_iter().map(|(_, e)| e).collect();
    Ok(g)
}

impl FromStr for TemporalGraph {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_edge_list(s.as_bytes())
    }
}

/// The running example used throughout the tests: vertices a, b, c, d as
/// ids 0..4.
pub fn example_graph() -> TemporalGraph {
    let edges = [
        (0, 1, 1, 1),
        (0, 1, 2, 1),
        (1, 3, 4, 1),
        (0, 2, 4, 1),
        (2, 3, 5, 1),
        (2, 0, 6, 1),
    ];
    TemporalGraph::from_edges(
        4,
        edges
            .iter()
            .map(|&(u, v, t, l)| TemporalEdge::new(u, v, t, l).unwrap()),
    )
    .unwrap()
}
