//! Text index format, version 1.
//!
//! ```text
//! TOPCHAIN-INDEX v1
//! HEADER
//! originals 4
//! ...
//! VERTICES        id original time in|out chain y
//! EDGES           u v
//! CHAINS          chain rank owner|- ids...
//! LABELS          id out <set> in <set>
//! TOPO            id level sigma1 sigma2
//! END
//! ```
//!
//! A label set is `x:y` codes, `@p` for the set of partner `p`, or `*` for
//! the vertex's own code alone. Output is fully determined by the index, so
//! saving a loaded index reproduces the file byte for byte.

use std::fmt::Display;
use std::fs::File;
use std::io::{self, BufWriter, Read, Write};
use std::path::Path;
use std::str::FromStr;

use thiserror::Error;
use topchain_core::chains::CoverKind;
use topchain_core::dag::{Dag, NodeId};
use topchain_core::labels::{IndexLabels, LabelSource, TopoLabels};
use topchain_core::transform::{DagVertex, Kind};
use topchain_core::{ChainCode, ChainCover, CodeMode, Index, IndexConfig, TransformedGraph, VertexId};

pub const MAGIC: &str = "TOPCHAIN-INDEX v1";

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("index line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("inconsistent index file: {0}")]
    Inconsistent(String),
    #[error(transparent)]
    Io(#[from] io::Error),
}

pub fn save<W: Write>(index: &Index, mut w: W) -> io::Result<()> {
    let g = index.graph();
    let cover = index.cover();
    let labels = index.labels();
    let config = index.config();
    let n = g.num_vertices();

    writeln!(w, "{MAGIC}")?;
    writeln!(w, "HEADER")?;
    writeln!(w, "originals {}", g.num_originals())?;
    writeln!(w, "vertices {n}")?;
    writeln!(w, "edges {}", g.num_edges())?;
    writeln!(w, "k {}", config.k)?;
    writeln!(w, "codes {}", config.codes.as_str())?;
    writeln!(w, "cover {}", config.cover)?;
    writeln!(w, "cover_kind {}", kind_name(cover.kind()))?;
    writeln!(w, "rank {}", config.rank)?;
    writeln!(w, "seed {}", config.seed)?;
    writeln!(w, "reduce {}", u8::from(config.reduce))?;
    writeln!(w, "reduced {}", u8::from(labels.is_reduced()))?;
    writeln!(w, "topo {}", u8::from(config.topo))?;
    writeln!(w, "topo_state {}", if index.topo_fresh() { "fresh" } else { "stale" })?;

    writeln!(w, "VERTICES")?;
    for v in 0..n as NodeId {
        let d = g.vertex(v);
        let code = labels.code(v);
        writeln!(w, "{v} {} {} {} {} {}", d.original, d.time, d.kind.as_str(), cover.chain_of(v), code.y)?;
    }

    writeln!(w, "EDGES")?;
    for v in 0..n as NodeId {
        for &s in g.successors(v) {
            writeln!(w, "{v} {s}")?;
        }
    }

    writeln!(w, "CHAINS")?;
    for (c, chain) in cover.chains().iter().enumerate() {
        write!(w, "{c} {}", cover.rank(c))?;
        match cover.owner(c) {
            Some(o) => write!(w, " {o}")?,
            None => write!(w, " -")?,
        }
        for id in chain {
            write!(w, " {id}")?;
        }
        writeln!(w)?;
    }

    writeln!(w, "LABELS")?;
    for v in 0..n as NodeId {
        write!(w, "{v} out")?;
        write_set(&mut w, labels.out_source(v), labels.l_out(v))?;
        write!(w, " in")?;
        write_set(&mut w, labels.in_source(v), labels.l_in(v))?;
        writeln!(w)?;
    }

    writeln!(w, "TOPO")?;
    let topo = index.topo();
    for v in 0..n {
        let get = |t: &[u32]| t.get(v).copied().unwrap_or(0);
        writeln!(w, "{v} {} {} {}", get(&topo.level), get(&topo.sigma1), get(&topo.sigma2))?;
    }
    writeln!(w, "END")
}

fn write_set<W: Write>(w: &mut W, src: LabelSource, set: &[ChainCode]) -> io::Result<()> {
    match src {
        LabelSource::Owned => {
            for c in set {
                write!(w, " {}:{}", c.x, c.y)?;
            }
            Ok(())
        }
        LabelSource::Partner(p) => write!(w, " @{p}"),
        LabelSource::Singleton => write!(w, " *"),
    }
}

fn kind_name(kind: CoverKind) -> &'static str {
    match kind {
        CoverKind::Temporal => "temporal",
        CoverKind::General => "general",
    }
}

pub fn save_to_path(index: &Index, path: &Path) -> io::Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    save(index, &mut w)?;
    w.flush()
}

pub fn load_from_path(path: &Path) -> Result<Index, FormatError> {
    let mut text = String::new();
    File::open(path)?.read_to_string(&mut text)?;
    load(&text)
}

struct Cursor<'a> {
    lines: std::str::Lines<'a>,
    line: usize,
}

impl<'a> Cursor<'a> {
    fn err(&self, message: impl Into<String>) -> FormatError {
        FormatError::Syntax {
            line: self.line,
            message: message.into(),
        }
    }

    fn next(&mut self) -> Result<&'a str, FormatError> {
        self.line += 1;
        self.lines.next().ok_or_else(|| self.err("unexpected end of file"))
    }

    fn expect(&mut self, tag: &str) -> Result<(), FormatError> {
        let got = self.next()?;
        if got != tag {
            return Err(self.err(format!("expected `{tag}`, found `{got}`")));
        }
        Ok(())
    }

    fn field(&mut self, key: &str) -> Result<&'a str, FormatError> {
        let line = self.next()?;
        match line.split_once(' ') {
            Some((k, value)) if k == key => Ok(value),
            _ => Err(self.err(format!("expected header field `{key}`"))),
        }
    }

    fn num<T: FromStr>(&self, token: Option<&str>, what: &str) -> Result<T, FormatError>
    where
        T::Err: Display,
    {
        let token = token.ok_or_else(|| self.err(format!("missing {what}")))?;
        token.parse().map_err(|e| self.err(format!("bad {what} `{token}`: {e}")))
    }

    fn value<T: FromStr>(&mut self, key: &str) -> Result<T, FormatError>
    where
        T::Err: Display,
    {
        let token = self.field(key)?;
        self.num(Some(token), key)
    }

    fn flag(&mut self, key: &str) -> Result<bool, FormatError> {
        match self.field(key)? {
            "0" => Ok(false),
            "1" => Ok(true),
            other => Err(self.err(format!("bad {key} flag `{other}`"))),
        }
    }

    fn row_id(&self, token: Option<&str>, expected: usize) -> Result<(), FormatError> {
        let id: usize = self.num(token, "row id")?;
        if id != expected {
            return Err(self.err(format!("row {id} out of order, expected {expected}")));
        }
        Ok(())
    }
}

pub fn load(text: &str) -> Result<Index, FormatError> {
    let mut cur = Cursor {
        lines: text.lines(),
        line: 0,
    };
    cur.expect(MAGIC)?;
    cur.expect("HEADER")?;
    let originals: usize = cur.value("originals")?;
    let n: usize = cur.value("vertices")?;
    let m: usize = cur.value("edges")?;
    let k: usize = cur.value("k")?;
    let codes: CodeMode = cur.value("codes")?;
    let cover_name = cur.field("cover")?.to_string();
    let cover_kind = match cur.field("cover_kind")? {
        "temporal" => CoverKind::Temporal,
        "general" => CoverKind::General,
        other => return Err(cur.err(format!("unknown cover kind `{other}`"))),
    };
    let rank_name = cur.field("rank")?.to_string();
    let seed: u64 = cur.value("seed")?;
    let reduce = cur.flag("reduce")?;
    let reduced = cur.flag("reduced")?;
    let topo_on = cur.flag("topo")?;
    let topo_fresh = match cur.field("topo_state")? {
        "fresh" => true,
        "stale" => false,
        other => return Err(cur.err(format!("unknown topo state `{other}`"))),
    };
    if !(1..=u8::MAX as usize).contains(&k) {
        return Err(cur.err(format!("k = {k} out of range")));
    }

    cur.expect("VERTICES")?;
    let mut vertices = Vec::with_capacity(n.min(1 << 20));
    let mut chain_col = Vec::with_capacity(n.min(1 << 20));
    let mut ys = Vec::with_capacity(n.min(1 << 20));
    for v in 0..n {
        let line = cur.next()?;
        let mut t = line.split_whitespace();
        cur.row_id(t.next(), v)?;
        let original: VertexId = cur.num(t.next(), "original vertex")?;
        let time = cur.num(t.next(), "time")?;
        let kind = match t.next() {
            Some("in") => Kind::In,
            Some("out") => Kind::Out,
            other => return Err(cur.err(format!("bad vertex kind {other:?}"))),
        };
        if original as usize >= originals {
            return Err(cur.err(format!("original vertex {original} out of range")));
        }
        vertices.push(DagVertex { original, time, kind });
        chain_col.push(cur.num::<usize>(t.next(), "chain")?);
        ys.push(cur.num::<u64>(t.next(), "code")?);
    }

    cur.expect("EDGES")?;
    let mut edges = Vec::with_capacity(m.min(1 << 22));
    for _ in 0..m {
        let line = cur.next()?;
        let mut t = line.split_whitespace();
        let a: NodeId = cur.num(t.next(), "edge tail")?;
        let b: NodeId = cur.num(t.next(), "edge head")?;
        if a as usize >= n || b as usize >= n {
            return Err(cur.err(format!("edge {a} {b} out of range")));
        }
        edges.push((a, b));
    }

    cur.expect("CHAINS")?;
    let (mut chains, mut owners, mut ranks) = (Vec::new(), Vec::new(), Vec::new());
    loop {
        let line = cur.next()?;
        if line == "LABELS" {
            break;
        }
        let mut t = line.split_whitespace();
        cur.row_id(t.next(), chains.len())?;
        ranks.push(cur.num::<u32>(t.next(), "rank")?);
        owners.push(match t.next() {
            Some("-") => None,
            token => Some(cur.num::<VertexId>(token, "owner")?),
        });
        let mut chain = Vec::new();
        for token in t {
            let id: NodeId = cur.num(Some(token), "chain member")?;
            if id as usize >= n || chain_col[id as usize] != chains.len() {
                return Err(cur.err(format!("vertex {id} does not belong to chain {}", chains.len())));
            }
            chain.push(id);
        }
        chains.push(chain);
    }
    let cover = ChainCover::from_ranked_chains(cover_kind, chains, owners, ranks, n)
        .map_err(|e| FormatError::Inconsistent(e.to_string()))?;
    let own: Vec<ChainCode> = (0..n)
        .map(|v| ChainCode::new(cover.rank(chain_col[v]), ys[v]))
        .collect();

    let (mut out, mut inn) = (Vec::with_capacity(n), Vec::with_capacity(n));
    for v in 0..n {
        let line = cur.next()?;
        let mut t = line.split_whitespace();
        cur.row_id(t.next(), v)?;
        if t.next() != Some("out") {
            return Err(cur.err("expected `out`"));
        }
        let tokens: Vec<&str> = t.collect();
        let split = tokens
            .iter()
            .position(|&s| s == "in")
            .ok_or_else(|| cur.err("expected `in`"))?;
        out.push(parse_set(&cur, &tokens[..split], n)?);
        inn.push(parse_set(&cur, &tokens[split + 1..], n)?);
    }

    cur.expect("TOPO")?;
    let mut topo = TopoLabels {
        level: Vec::with_capacity(n),
        sigma1: Vec::with_capacity(n),
        sigma2: Vec::with_capacity(n),
    };
    for v in 0..n {
        let line = cur.next()?;
        let mut t = line.split_whitespace();
        cur.row_id(t.next(), v)?;
        topo.level.push(cur.num(t.next(), "level")?);
        topo.sigma1.push(cur.num(t.next(), "sigma1")?);
        topo.sigma2.push(cur.num(t.next(), "sigma2")?);
    }
    cur.expect("END")?;

    let labels = IndexLabels::from_parts(k, own, out, inn);
    if labels.is_reduced() != reduced {
        return Err(FormatError::Inconsistent("reduced flag does not match the label sources".into()));
    }
    let graph = TransformedGraph::from_parts(originals, vertices, &edges);
    let config = IndexConfig {
        k,
        cover: cover_name,
        rank: rank_name,
        codes,
        reduce,
        topo: topo_on,
        seed,
    };
    Index::from_parts(config, graph, cover, labels, topo, topo_fresh)
        .map_err(|e| FormatError::Inconsistent(e.to_string()))
}

fn parse_set(cur: &Cursor, tokens: &[&str], n: usize) -> Result<(LabelSource, Vec<ChainCode>), FormatError> {
    match tokens {
        ["*"] => Ok((LabelSource::Singleton, Vec::new())),
        [p] if p.starts_with('@') => {
            let p: NodeId = cur.num(Some(&p[1..]), "partner")?;
            if p as usize >= n {
                return Err(cur.err(format!("partner {p} out of range")));
            }
            Ok((LabelSource::Partner(p), Vec::new()))
        }
        _ => {
            let mut set = Vec::with_capacity(tokens.len());
            for token in tokens {
                let (x, y) = token
                    .split_once(':')
                    .ok_or_else(|| cur.err(format!("bad label code `{token}`")))?;
                set.push(ChainCode::new(cur.num(Some(x), "chain rank")?, cur.num(Some(y), "code")?));
            }
            Ok((LabelSource::Owned, set))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use topchain_core::tgraph::example_graph;

    fn round_trip(index: &Index) -> (Vec<u8>, Index) {
        let mut bytes = Vec::new();
        save(index, &mut bytes).unwrap();
        let loaded = load(std::str::from_utf8(&bytes).unwrap()).unwrap();
        (bytes, loaded)
    }

    #[test]
    fn save_load_save_is_stable() {
        for config in [
            IndexConfig::default(),
            IndexConfig::for_variant("tc1").unwrap(),
            IndexConfig::for_variant("tc2").unwrap(),
        ] {
            let index = Index::build(&example_graph(), config).unwrap();
            let (first, loaded) = round_trip(&index);
            let (second, _) = round_trip(&loaded);
            assert_eq!(first, second);
            assert_eq!(loaded.config(), index.config());
            assert_eq!(loaded.topo(), index.topo());
            for v in 0..index.graph().num_vertices() as NodeId {
                assert_eq!(loaded.labels().l_out(v), index.labels().l_out(v));
                assert_eq!(loaded.labels().l_in(v), index.labels().l_in(v));
                assert_eq!(loaded.graph().successors(v), index.graph().successors(v));
            }
        }
    }

    #[test]
    fn header_layout() {
        let index = Index::build(&example_graph(), IndexConfig::default()).unwrap();
        let mut bytes = Vec::new();
        save(&index, &mut bytes).unwrap();
        let text = String::from_utf8(bytes).unwrap();
        let head: Vec<&str> = text.lines().take(5).collect();
        assert_eq!(head, [MAGIC, "HEADER", "originals 4", "vertices 12", "edges 13"]);
        assert!(text.ends_with("END\n"));
    }

    #[test]
    fn rejects_damaged_files() {
        let index = Index::build(&example_graph(), IndexConfig::default()).unwrap();
        let mut bytes = Vec::new();
        save(&index, &mut bytes).unwrap();
        let text = String::from_utf8(bytes).unwrap();

        let truncated = &text[..text.len() / 2];
        assert!(matches!(load(truncated), Err(FormatError::Syntax { .. })));
        let wrong_magic = text.replacen("v1", "v9", 1);
        assert!(matches!(load(&wrong_magic), Err(FormatError::Syntax { line: 1, .. })));
        let bad_edge = text.replacen("EDGES\n", "EDGES\n99 0\n", 1);
        assert!(load(&bad_edge).is_err());
    }
}
