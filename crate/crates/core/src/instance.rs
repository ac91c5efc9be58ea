//! Problem instances: vertices with capacities, an ordered hyperedge stream,
//! the objective data and an optional matroid, plus the text format used to
//! store them on disk.
//!
//! Edges are addressed internally by a zero-based [`EdgeId`] equal to their
//! position in the stream. The file format uses one-based *ordinals*
//! (`ordinal = id + 1`).

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::io::Read;

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::matroids::{GraphicMatroid, Matroid, MatroidError, PartitionMatroid, UniformMatroid};
use crate::objectives::{CoverageObjective, CutObjective, LinearObjective, Objective, ObjectiveError};

pub type VertexId = usize;

/// Zero-based position of an edge in the stream.
pub type EdgeId = usize;

#[derive(Debug, Clone, PartialEq)]
pub struct HyperEdge {
    /// One-based arrival index.
    pub index: usize,
    pub endpoints: Vec<VertexId>,
    pub weight: f64,
}

impl HyperEdge {
    pub fn id(&self) -> EdgeId {
        self.index - 1
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ObjectiveSpec {
    Linear,
    Coverage {
        items: BTreeMap<u64, f64>,
        /// Items covered by each edge, indexed by [`EdgeId`].
        covers: Vec<Vec<u64>>,
    },
    Cut {
        /// Unordered edge pairs `(a, b)` with `a < b` and their interaction weight.
        pairs: BTreeMap<(EdgeId, EdgeId), f64>,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub enum MatroidSpec {
    Uniform {
        rank: usize,
    },
    Partition {
        /// Part label of each edge, indexed by [`EdgeId`].
        part_of: Vec<u64>,
        caps: BTreeMap<u64, usize>,
    },
    Graphic {
        aux_n: usize,
        /// Auxiliary-graph endpoints of each edge, indexed by [`EdgeId`].
        ends: Vec<(usize, usize)>,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    pub n: usize,
    pub k: usize,
    pub capacities: Vec<usize>,
    pub edges: Vec<HyperEdge>,
    pub objective: ObjectiveSpec,
    pub matroid: Option<MatroidSpec>,
}

#[derive(Debug, Error, PartialEq)]
pub enum InstanceError {
    #[error("line {line}: {reason}")]
    MalformedLine { line: usize, reason: String },
    #[error("edge {edge} is a self-loop")]
    SelfLoop { edge: usize },
    #[error("line {line}: vertex {vertex} is outside [0, n)")]
    UnknownVertex { line: usize, vertex: usize },
    #[error("line {line}: capacity of vertex {vertex} given twice")]
    DuplicateCapacity { line: usize, vertex: usize },
    #[error("line {line}: expected {expected} endpoints, found {found}")]
    UniformityMismatch { line: usize, expected: usize, found: usize },
    #[error("header declares {declared} edges but {found} were given")]
    EdgeCountMismatch { declared: usize, found: usize },
    #[error("line {line}: edge ordinal {edge} does not exist")]
    UnknownEdge { line: usize, edge: usize },
    #[error("item {item} is referenced but never declared")]
    UnknownItem { item: u64 },
    #[error("conflicting objective data: {0}")]
    ConflictingObjective(String),
    #[error("invalid matroid data: {0}")]
    InvalidMatroid(String),
    #[error("invalid generator parameters: {0}")]
    InvalidParams(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl From<ObjectiveError> for InstanceError {
    fn from(e: ObjectiveError) -> Self {
        match e {
            ObjectiveError::UnknownItem { item } => InstanceError::UnknownItem { item },
            other => InstanceError::ConflictingObjective(other.to_string()),
        }
    }
}

impl From<MatroidError> for InstanceError {
    fn from(e: MatroidError) -> Self {
        InstanceError::InvalidMatroid(e.to_string())
    }
}

impl Instance {
    pub fn m(&self) -> usize {
        self.edges.len()
    }

    pub fn weights(&self) -> Vec<f64> {
        self.edges.iter().map(|e| e.weight).collect()
    }

    /// Builds the objective oracle described by the instance.
    pub fn objective(&self) -> Result<Box<dyn Objective>, InstanceError> {
        Ok(match &self.objective {
            ObjectiveSpec::Linear => Box::new(LinearObjective::new(self.weights())),
            ObjectiveSpec::Coverage { items, covers } => {
                Box::new(CoverageObjective::new(items.clone(), covers.clone())?)
            }
            ObjectiveSpec::Cut { pairs } => {
                Box::new(CutObjective::new(self.m(), pairs.iter().map(|(&(a, b), &w)| (a, b, w)))?)
            }
        })
    }

    /// Builds the matroid oracle, if the instance carries one.
    pub fn matroid(&self) -> Result<Option<Box<dyn Matroid>>, InstanceError> {
        let Some(spec) = &self.matroid else {
            return Ok(None);
        };
        let m: Box<dyn Matroid> = match spec {
            MatroidSpec::Uniform { rank } => Box::new(UniformMatroid::new(*rank)),
            MatroidSpec::Partition { part_of, caps } => {
                // Parts are relabelled densely in label order.
                let labels: Vec<u64> = caps.keys().copied().collect();
                let dense: BTreeMap<u64, usize> = labels.iter().enumerate().map(|(i, &l)| (l, i)).collect();
                let parts = part_of
                    .iter()
                    .map(|l| {
                        dense
                            .get(l)
                            .copied()
                            .ok_or_else(|| InstanceError::InvalidMatroid(format!("part {l} has no capacity")))
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                Box::new(PartitionMatroid::new(parts, caps.values().copied().collect())?)
            }
            MatroidSpec::Graphic { aux_n, ends } => Box::new(GraphicMatroid::new(*aux_n, ends.clone())?),
        };
        Ok(Some(m))
    }

    /// Ratio between the largest and the smallest nonzero edge weight.
    pub fn weight_spread(&self) -> Option<f64> {
        let nz = self.edges.iter().map(|e| e.weight).filter(|&w| w > 0.0);
        let (lo, hi) = nz.fold((f64::INFINITY, 0.0f64), |(lo, hi), w| (lo.min(w), hi.max(w)));
        (hi > 0.0).then(|| hi / lo)
    }
}

fn malformed(line: usize, reason: impl Into<String>) -> InstanceError {
    InstanceError::MalformedLine { line, reason: reason.into() }
}

fn num<T: std::str::FromStr>(tok: Option<&str>, line: usize, what: &str) -> Result<T, InstanceError> {
    let tok = tok.ok_or_else(|| malformed(line, format!("missing {what}")))?;
    tok.parse::<T>().map_err(|_| malformed(line, format!("bad {what} `{tok}`")))
}

fn weight(tok: Option<&str>, line: usize) -> Result<f64, InstanceError> {
    let w: f64 = num(tok, line, "weight")?;
    if !w.is_finite() || w < 0.0 {
        return Err(malformed(line, format!("weight must be finite and non-negative, got {w}")));
    }
    Ok(w)
}

fn no_trailing<'a>(mut toks: impl Iterator<Item = &'a str>, line: usize) -> Result<(), InstanceError> {
    match toks.next() {
        Some(t) => Err(malformed(line, format!("unexpected trailing token `{t}`"))),
        None => Ok(()),
    }
}

#[derive(Default)]
struct Pending {
    items: BTreeMap<u64, f64>,
    covers: BTreeMap<usize, Vec<u64>>,
    cut: BTreeMap<(EdgeId, EdgeId), f64>,
    matroid_kind: Option<(usize, String, usize)>,
    parts: BTreeMap<usize, u64>,
    pcaps: BTreeMap<u64, usize>,
    aux: BTreeMap<usize, (usize, usize)>,
    // Lines referencing edge ordinals are validated once m is known.
    edge_refs: Vec<(usize, usize)>,
}

/// Parses an instance from its text form.
pub fn parse_instance(text: &str) -> Result<Instance, InstanceError> {
    let mut header: Option<(usize, usize, usize)> = None;
    let mut caps: BTreeMap<usize, usize> = BTreeMap::new();
    let mut edges: Vec<HyperEdge> = Vec::new();
    let mut pending = Pending::default();

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("");
        let mut toks = content.split_whitespace();
        let Some(kind) = toks.next() else { continue };

        if kind == "p" {
            if header.is_some() {
                return Err(malformed(line, "duplicate header"));
            }
            match toks.next() {
                Some("bmatching") => {}
                other => return Err(malformed(line, format!("unknown problem kind {other:?}"))),
            }
            let n: usize = num(toks.next(), line, "n")?;
            let m: usize = num(toks.next(), line, "m")?;
            let k: usize = num(toks.next(), line, "k")?;
            no_trailing(toks, line)?;
            if k < 2 {
                return Err(malformed(line, "uniformity k must be at least 2"));
            }
            header = Some((n, m, k));
            continue;
        }
        let Some((n, _, k)) = header else {
            return Err(malformed(line, "header line `p bmatching n m k` must come first"));
        };

        match kind {
            "c" => {
                let v: usize = num(toks.next(), line, "vertex")?;
                let b: usize = num(toks.next(), line, "capacity")?;
                no_trailing(toks, line)?;
                if v >= n {
                    return Err(InstanceError::UnknownVertex { line, vertex: v });
                }
                if b == 0 {
                    return Err(malformed(line, "capacity must be positive"));
                }
                if caps.insert(v, b).is_some() {
                    return Err(InstanceError::DuplicateCapacity { line, vertex: v });
                }
            }
            "e" => {
                let toks: Vec<&str> = toks.collect();
                if toks.len() != k + 1 {
                    return Err(InstanceError::UniformityMismatch {
                        line,
                        expected: k,
                        found: toks.len().saturating_sub(1),
                    });
                }
                let mut endpoints = Vec::with_capacity(k);
                for t in &toks[..k] {
                    let v: usize = num(Some(t), line, "vertex")?;
                    if v >= n {
                        return Err(InstanceError::UnknownVertex { line, vertex: v });
                    }
                    endpoints.push(v);
                }
                let w = weight(Some(toks[k]), line)?;
                let index = edges.len() + 1;
                let distinct: BTreeSet<_> = endpoints.iter().collect();
                if distinct.len() != endpoints.len() {
                    return Err(InstanceError::SelfLoop { edge: index });
                }
                edges.push(HyperEdge { index, endpoints, weight: w });
            }
            "i" => {
                let item: u64 = num(toks.next(), line, "item id")?;
                let w = weight(toks.next(), line)?;
                no_trailing(toks, line)?;
                if pending.items.insert(item, w).is_some() {
                    return Err(malformed(line, format!("item {item} declared twice")));
                }
            }
            "g" => {
                let e: usize = num(toks.next(), line, "edge ordinal")?;
                pending.edge_refs.push((line, e));
                let items = toks.map(|t| num::<u64>(Some(t), line, "item id")).collect::<Result<Vec<_>, _>>()?;
                pending.covers.entry(e).or_default().extend(items);
            }
            "x" => {
                let a: usize = num(toks.next(), line, "edge ordinal")?;
                let b: usize = num(toks.next(), line, "edge ordinal")?;
                let w = weight(toks.next(), line)?;
                no_trailing(toks, line)?;
                if a == b {
                    return Err(malformed(line, "interaction pair needs two distinct edges"));
                }
                pending.edge_refs.push((line, a));
                pending.edge_refs.push((line, b));
                if a == 0 || b == 0 {
                    return Err(InstanceError::UnknownEdge { line, edge: 0 });
                }
                let key = (a.min(b) - 1, a.max(b) - 1);
                *pending.cut.entry(key).or_insert(0.0) += w;
            }
            "m" => {
                if pending.matroid_kind.is_some() {
                    return Err(malformed(line, "matroid declared twice"));
                }
                let what = toks.next().ok_or_else(|| malformed(line, "missing matroid kind"))?;
                let arg = match what {
                    "uniform" => num(toks.next(), line, "rank")?,
                    "graphic" => num(toks.next(), line, "auxiliary vertex count")?,
                    "partition" => 0,
                    other => return Err(malformed(line, format!("unknown matroid kind `{other}`"))),
                };
                no_trailing(toks, line)?;
                pending.matroid_kind = Some((line, what.to_string(), arg));
            }
            "part" => {
                let e: usize = num(toks.next(), line, "edge ordinal")?;
                let p: u64 = num(toks.next(), line, "part id")?;
                no_trailing(toks, line)?;
                pending.edge_refs.push((line, e));
                if pending.parts.insert(e, p).is_some() {
                    return Err(malformed(line, format!("edge {e} assigned to two parts")));
                }
            }
            "pcap" => {
                let p: u64 = num(toks.next(), line, "part id")?;
                let c: usize = num(toks.next(), line, "part capacity")?;
                no_trailing(toks, line)?;
                if pending.pcaps.insert(p, c).is_some() {
                    return Err(malformed(line, format!("part {p} capacity given twice")));
                }
            }
            "aux" => {
                let e: usize = num(toks.next(), line, "edge ordinal")?;
                let u: usize = num(toks.next(), line, "auxiliary vertex")?;
                let v: usize = num(toks.next(), line, "auxiliary vertex")?;
                no_trailing(toks, line)?;
                pending.edge_refs.push((line, e));
                if pending.aux.insert(e, (u, v)).is_some() {
                    return Err(malformed(line, format!("edge {e} has two auxiliary edges")));
                }
            }
            other => return Err(malformed(line, format!("unknown line kind `{other}`"))),
        }
    }

    let Some((n, m, k)) = header else {
        return Err(malformed(0, "missing header line"));
    };
    if edges.len() != m {
        return Err(InstanceError::EdgeCountMismatch { declared: m, found: edges.len() });
    }
    if let Some(&(line, edge)) = pending.edge_refs.iter().find(|&&(_, e)| e == 0 || e > m) {
        return Err(InstanceError::UnknownEdge { line, edge });
    }

    let capacities = (0..n).map(|v| caps.get(&v).copied().unwrap_or(1)).collect();
    let objective = build_objective_spec(&pending, m)?;
    let matroid = build_matroid_spec(&pending, m)?;
    Ok(Instance { n, k, capacities, edges, objective, matroid })
}

fn build_objective_spec(p: &Pending, m: usize) -> Result<ObjectiveSpec, InstanceError> {
    let coverage = !p.items.is_empty() || !p.covers.is_empty();
    let cut = !p.cut.is_empty();
    match (coverage, cut) {
        (true, true) => {
            Err(InstanceError::ConflictingObjective("both coverage (i/g) and cut (x) lines present".into()))
        }
        (true, false) => {
            let mut covers = vec![Vec::new(); m];
            for (&e, items) in &p.covers {
                let mut items = items.clone();
                items.sort_unstable();
                items.dedup();
                if let Some(&item) = items.iter().find(|i| !p.items.contains_key(i)) {
                    return Err(InstanceError::UnknownItem { item });
                }
                covers[e - 1] = items;
            }
            Ok(ObjectiveSpec::Coverage { items: p.items.clone(), covers })
        }
        (false, true) => Ok(ObjectiveSpec::Cut { pairs: p.cut.clone() }),
        (false, false) => Ok(ObjectiveSpec::Linear),
    }
}

fn build_matroid_spec(p: &Pending, m: usize) -> Result<Option<MatroidSpec>, InstanceError> {
    let Some((line, kind, arg)) = &p.matroid_kind else {
        if !p.parts.is_empty() || !p.pcaps.is_empty() || !p.aux.is_empty() {
            return Err(InstanceError::InvalidMatroid("matroid data given without an `m` line".into()));
        }
        return Ok(None);
    };
    let stray = |what: &str| {
        Err(InstanceError::InvalidMatroid(format!(
            "`{what}` lines do not belong to a {kind} matroid (declared on line {line})"
        )))
    };
    match kind.as_str() {
        "uniform" => {
            if !p.parts.is_empty() || !p.pcaps.is_empty() || !p.aux.is_empty() {
                return stray("part/pcap/aux");
            }
            Ok(Some(MatroidSpec::Uniform { rank: *arg }))
        }
        "partition" => {
            if !p.aux.is_empty() {
                return stray("aux");
            }
            let mut part_of = Vec::with_capacity(m);
            for e in 1..=m {
                let part = p
                    .parts
                    .get(&e)
                    .copied()
                    .ok_or_else(|| InstanceError::InvalidMatroid(format!("edge {e} has no part")))?;
                if !p.pcaps.contains_key(&part) {
                    return Err(InstanceError::InvalidMatroid(format!("part {part} has no capacity")));
                }
                part_of.push(part);
            }
            Ok(Some(MatroidSpec::Partition { part_of, caps: p.pcaps.clone() }))
        }
        "graphic" => {
            if !p.parts.is_empty() || !p.pcaps.is_empty() {
                return stray("part/pcap");
            }
            let aux_n = *arg;
            let mut ends = Vec::with_capacity(m);
            for e in 1..=m {
                let (u, v) = p
                    .aux
                    .get(&e)
                    .copied()
                    .ok_or_else(|| InstanceError::InvalidMatroid(format!("edge {e} has no auxiliary edge")))?;
                if u >= aux_n || v >= aux_n {
                    return Err(InstanceError::InvalidMatroid(format!("auxiliary edge of {e} leaves [0, {aux_n})")));
                }
                ends.push((u, v));
            }
            Ok(Some(MatroidSpec::Graphic { aux_n, ends }))
        }
        _ => unreachable!("matroid kind validated while parsing"),
    }
}

/// Reads and parses an instance from any reader.
pub fn read_instance<R: Read>(mut reader: R) -> Result<Instance, InstanceError> {
    let mut text = String::new();
    reader.read_to_string(&mut text).map_err(|e| InstanceError::Io(e.to_string()))?;
    parse_instance(&text)
}

impl fmt::Display for Instance {
    /// Canonical text form; parses back to an equal instance.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "p bmatching {} {} {}", self.n, self.m(), self.k)?;
        for (v, &b) in self.capacities.iter().enumerate() {
            if b != 1 {
                writeln!(f, "c {v} {b}")?;
            }
        }
        for e in &self.edges {
            write!(f, "e")?;
            for v in &e.endpoints {
                write!(f, " {v}")?;
            }
            writeln!(f, " {}", e.weight)?;
        }
        match &self.objective {
            ObjectiveSpec::Linear => {}
            ObjectiveSpec::Coverage { items, covers } => {
                for (item, w) in items {
                    writeln!(f, "i {item} {w}")?;
                }
                for (e, items) in covers.iter().enumerate() {
                    if items.is_empty() {
                        continue;
                    }
                    write!(f, "g {}", e + 1)?;
                    for i in items {
                        write!(f, " {i}")?;
                    }
                    writeln!(f)?;
                }
            }
            ObjectiveSpec::Cut { pairs } => {
                for (&(a, b), w) in pairs {
                    writeln!(f, "x {} {} {w}", a + 1, b + 1)?;
                }
            }
        }
        match &self.matroid {
            None => {}
            Some(MatroidSpec::Uniform { rank }) => writeln!(f, "m uniform {rank}")?,
            Some(MatroidSpec::Partition { part_of, caps }) => {
                writeln!(f, "m partition")?;
                for (p, c) in caps {
                    writeln!(f, "pcap {p} {c}")?;
                }
                for (e, p) in part_of.iter().enumerate() {
                    writeln!(f, "part {} {p}", e + 1)?;
                }
            }
            Some(MatroidSpec::Graphic { aux_n, ends }) => {
                writeln!(f, "m graphic {aux_n}")?;
                for (e, (u, v)) in ends.iter().enumerate() {
                    writeln!(f, "aux {} {u} {v}", e + 1)?;
                }
            }
        }
        Ok(())
    }
}

/// Generates a seeded random linear-objective instance.
///
/// Endpoints are drawn as a uniform `k`-subset of the vertices (in random
/// order), weights are integers in `[1, w_max]` and capacities integers in
/// `[1, b_max]`.
pub fn generate_random(
    seed: u64,
    n: usize,
    m: usize,
    k: usize,
    b_max: usize,
    w_max: u64,
) -> Result<Instance, InstanceError> {
    if k < 2 {
        return Err(InstanceError::InvalidParams(format!("k = {k} < 2")));
    }
    if n < k {
        return Err(InstanceError::InvalidParams(format!("n = {n} < k = {k}")));
    }
    if b_max == 0 || w_max == 0 {
        return Err(InstanceError::InvalidParams("b_max and w_max must be positive".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let capacities = (0..n).map(|_| rng.gen_range(1..=b_max)).collect();
    let edges = (0..m)
        .map(|t| HyperEdge {
            index: t + 1,
            endpoints: index::sample(&mut rng, n, k).into_vec(),
            weight: rng.gen_range(1..=w_max) as f64,
        })
        .collect();
    Ok(Instance { n, k, capacities, edges, objective: ObjectiveSpec::Linear, matroid: None })
}

/// Replaces the objective with a random weighted coverage function over
/// `items` items; every edge covers between 1 and `max_cover` of them.
pub fn attach_random_coverage(
    inst: &mut Instance,
    seed: u64,
    items: usize,
    max_cover: usize,
    max_item_weight: u64,
) -> Result<(), InstanceError> {
    if items == 0 || max_cover == 0 || max_item_weight == 0 {
        return Err(InstanceError::InvalidParams("coverage parameters must be positive".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xC0FE);
    let item_weights: BTreeMap<u64, f64> =
        (0..items as u64).map(|i| (i, rng.gen_range(1..=max_item_weight) as f64)).collect();
    let covers = (0..inst.m())
        .map(|_| {
            let c = rng.gen_range(1..=max_cover.min(items));
            let mut v: Vec<u64> = index::sample(&mut rng, items, c).into_iter().map(|i| i as u64).collect();
            v.sort_unstable();
            v
        })
        .collect();
    inst.objective = ObjectiveSpec::Coverage { items: item_weights, covers };
    Ok(())
}

/// Replaces the objective with a random cut function: each unordered edge
/// pair interacts with probability `density`, with integer weight in
/// `[1, max_weight]`.
pub fn attach_random_cut(inst: &mut Instance, seed: u64, density: f64, max_weight: u64) -> Result<(), InstanceError> {
    if !(0.0..=1.0).contains(&density) || max_weight == 0 {
        return Err(InstanceError::InvalidParams("cut density must lie in [0, 1]".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xC07);
    let mut pairs = BTreeMap::new();
    for a in 0..inst.m() {
        for b in a + 1..inst.m() {
            if rng.gen_bool(density) {
                pairs.insert((a, b), rng.gen_range(1..=max_weight) as f64);
            }
        }
    }
    inst.objective = ObjectiveSpec::Cut { pairs };
    Ok(())
}

/// Attaches a random partition matroid with `parts` parts and capacities in
/// `[0, max_cap]`.
pub fn attach_random_partition(
    inst: &mut Instance,
    seed: u64,
    parts: usize,
    max_cap: usize,
) -> Result<(), InstanceError> {
    if parts == 0 {
        return Err(InstanceError::InvalidParams("need at least one part".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xBA57);
    let part_of = (0..inst.m()).map(|_| rng.gen_range(0..parts as u64)).collect();
    let caps = (0..parts as u64).map(|p| (p, rng.gen_range(0..=max_cap))).collect();
    inst.matroid = Some(MatroidSpec::Partition { part_of, caps });
    Ok(())
}

/// Attaches a random graphic matroid on `aux_n` auxiliary vertices.
pub fn attach_random_graphic(inst: &mut Instance, seed: u64, aux_n: usize) -> Result<(), InstanceError> {
    if aux_n < 2 {
        return Err(InstanceError::InvalidParams("graphic matroid needs two vertices".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x6AA9);
    let ends = (0..inst.m())
        .map(|_| {
            let s = index::sample(&mut rng, aux_n, 2);
            (s.index(0), s.index(1))
        })
        .collect();
    inst.matroid = Some(MatroidSpec::Graphic { aux_n, ends });
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) const APPENDIX_EXAMPLE: &str = "\
# four vertices, v1 has capacity 2
p bmatching 4 3 2
c 0 2
e 0 1 2
e 0 2 7
e 0 3 4
";

    #[test]
    fn minimal_file() {
        let inst = parse_instance("p bmatching 2 1 2\nc 0 1\nc 1 1\ne 0 1 5.0\n").unwrap();
        assert_eq!(inst.m(), 1);
        assert_eq!(inst.edges[0].endpoints, vec![0, 1]);
        assert_eq!(inst.edges[0].weight, 5.0);
        assert_eq!(inst.capacities, vec![1, 1]);
        assert_eq!(inst.objective, ObjectiveSpec::Linear);
        assert!(inst.matroid.is_none());
    }

    #[test]
    fn worked_example_file() {
        let inst = parse_instance(APPENDIX_EXAMPLE).unwrap();
        assert_eq!(inst.capacities, vec![2, 1, 1, 1]);
        let w: Vec<f64> = inst.edges.iter().map(|e| e.weight).collect();
        assert_eq!(w, vec![2.0, 7.0, 4.0]);
        assert_eq!(inst.edges.iter().map(|e| e.index).collect::<Vec<_>>(), vec![1, 2, 3]);
    }

    #[test]
    fn self_loop_rejected() {
        let err = parse_instance("p bmatching 2 1 2\ne 0 0 1.0\n").unwrap_err();
        assert_eq!(err, InstanceError::SelfLoop { edge: 1 });
    }

    #[test]
    fn error_kinds() {
        let cases = [
            ("p bmatching 2 1 2\ne 0 5 1\n", "UnknownVertex"),
            ("p bmatching 2 0 2\nc 0 1\nc 0 2\n", "DuplicateCapacity"),
            ("p bmatching 3 1 2\ne 0 1 2 1\n", "UniformityMismatch"),
            ("p bmatching 3 2 2\ne 0 1 1\n", "EdgeCountMismatch"),
            ("p bmatching 3 1 2\nq 1\n", "MalformedLine"),
            ("e 0 1 1\n", "MalformedLine"),
            ("p bmatching 3 1 2\ne 0 1 -1\n", "MalformedLine"),
            ("p bmatching 3 1 2\ne 0 1 1\ng 1 4\n", "UnknownItem"),
            ("p bmatching 3 1 2\ne 0 1 1\nx 1 2 3\n", "UnknownEdge"),
            ("p bmatching 3 1 1\n", "MalformedLine"),
            ("p bmatching 3 1 2\ne 0 1 1\nm partition\n", "InvalidMatroid"),
        ];
        for (text, expected) in cases {
            let err = parse_instance(text).unwrap_err();
            assert!(format!("{err:?}").starts_with(expected), "{text:?} gave {err:?}");
        }
    }

    #[test]
    fn malformed_line_reports_line_number() {
        let err = parse_instance("p bmatching 2 1 2\n# comment\ne 0 1 abc\n").unwrap_err();
        assert!(matches!(err, InstanceError::MalformedLine { line: 3, .. }));
    }

    #[test]
    fn full_format_round_trip() {
        let text = "\
p bmatching 4 3 2
c 1 3
e 0 1 1.5
e 1 2 2
e 2 3 0
i 7 2.5
i 9 1
g 1 7 9
g 3 9
m partition
pcap 0 1
pcap 1 2
part 1 0
part 2 1
part 3 1
";
        let inst = parse_instance(text).unwrap();
        let again = parse_instance(&inst.to_string()).unwrap();
        assert_eq!(inst, again);
        assert!(matches!(inst.objective, ObjectiveSpec::Coverage { .. }));
        assert_eq!(inst.matroid().unwrap().unwrap().rank(), 3);
    }

    #[test]
    fn generator_empty_stream() {
        let inst = generate_random(1, 5, 0, 2, 2, 10).unwrap();
        assert_eq!(inst.m(), 0);
        assert_eq!(inst.n, 5);
    }

    #[test]
    fn generator_is_deterministic() {
        let a = generate_random(42, 9, 15, 2, 3, 20).unwrap();
        let b = generate_random(42, 9, 15, 2, 3, 20).unwrap();
        assert_eq!(a, b);
        let c = generate_random(43, 9, 15, 2, 3, 20).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn generator_three_uniform_round_trip() {
        let inst = generate_random(7, 8, 12, 3, 2, 20).unwrap();
        assert_eq!(inst.k, 3);
        for e in &inst.edges {
            let d: BTreeSet<_> = e.endpoints.iter().collect();
            assert_eq!(d.len(), 3);
            assert!((1.0..=20.0).contains(&e.weight) && e.weight.fract() == 0.0);
        }
        assert!(inst.capacities.iter().all(|&b| (1..=2).contains(&b)));
        assert_eq!(parse_instance(&inst.to_string()).unwrap(), inst);
    }

    #[test]
    fn generator_rejects_bad_params() {
        assert!(matches!(generate_random(1, 2, 3, 3, 1, 1), Err(InstanceError::InvalidParams(_))));
        assert!(matches!(generate_random(1, 4, 3, 2, 0, 1), Err(InstanceError::InvalidParams(_))));
    }
}
