//! Alternating link diagrams from PD codes.
//!
//! A PD code is a list of 4-tuples of strand labels, one tuple per crossing,
//! quadrants listed counterclockwise starting from the incoming under-strand.
//! Parsing recovers the 4-valent plane graph G(D) with its rotation system,
//! traces faces, checkerboard-colors them, splits the strands into link
//! components and computes the diagram statistics (twist number, bigon
//! edges, primality) that the certification theorems consume.

use crate::angle::{rat, Rat};
use serde::Serialize;
use std::collections::{BTreeMap, BTreeSet};

/// A dart is one end of an edge: crossing `vertex`, quadrant `slot` (0..4,
/// counterclockwise, slot 0 = incoming under-strand).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct Dart {
    pub vertex: usize,
    pub slot: u8,
}

impl Dart {
    pub fn id(&self) -> usize {
        self.vertex * 4 + self.slot as usize
    }

    /// Under-strand occupies slots 0 and 2.
    pub fn is_under(&self) -> bool {
        self.slot % 2 == 0
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Edge {
    pub label: u64,
    /// The two ends. Order is not meaningful.
    pub ends: [Dart; 2],
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum FaceColor {
    Black,
    White,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Default)]
pub struct DiagramFlags {
    pub connected: bool,
    pub alternating: bool,
    pub reduced: bool,
    pub prime: bool,
}

/// Witnesses backing the flags of [`analyze`].
#[derive(Debug, Clone, Serialize, Default)]
pub struct AnalysisWitness {
    /// A crossing meeting fewer than four distinct faces, if any.
    pub non_reduced_crossing: Option<usize>,
    /// An edge pair whose separating two-point curve has crossings on both
    /// sides, if any.
    pub non_prime_edge_pair: Option<(usize, usize)>,
    /// An edge violating the over/under alternation, if any.
    pub non_alternating_edge: Option<usize>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Analysis {
    pub flags: DiagramFlags,
    pub witness: AnalysisWitness,
}

#[derive(Debug, Clone)]
pub struct Diagram {
    pub edges: Vec<Edge>,
    vertex_count: usize,
    /// dart id -> edge index
    dart_edge: Vec<usize>,
    /// Faces as cyclic dart sequences; the dart for edge e in a face marks
    /// the side of e bounding that face.
    pub faces: Vec<Vec<Dart>>,
    face_of_dart: Vec<usize>,
    pub face_colors: Vec<FaceColor>,
    /// edge index -> link component index
    pub edge_component: Vec<usize>,
    pub component_count: usize,
    pub flags: DiagramFlags,
    pub witness: AnalysisWitness,
}

#[derive(Debug, Clone, thiserror::Error, PartialEq, Eq)]
pub enum DiagramError {
    #[error("malformed PD code: {0}")]
    MalformedCode(String),
    #[error("not planar: face trace gives V - E + F = {chi}, expected 2")]
    NonPlanar { chi: i64 },
}

/// Twist statistics of a connected diagram.
#[derive(Debug, Clone, Serialize)]
pub struct TwistStats {
    /// Edge indices lying on some bigon region.
    pub bigon_edges: Vec<usize>,
    /// Twists: maximal bigon-edge-connected subgraphs, as vertex sets.
    /// A vertex incident to no bigon edge forms a twist on its own.
    pub twists: Vec<Vec<usize>>,
    /// t(D): half the number of non-bigon edges. Always an integer.
    pub t_d: u64,
    /// t(K,D) per link component, exact (may be half-integral).
    #[serde(skip)]
    pub t_k: Vec<Rat>,
    /// e(K,D): number of edges on each component.
    pub e_k: Vec<usize>,
}

pub fn parse_pd(text: &str) -> Result<Diagram, DiagramError> {
    let crossings = tokenize(text)?;
    if crossings.is_empty() {
        return Err(DiagramError::MalformedCode("no crossings".into()));
    }
    Diagram::from_crossings(&crossings)
}

/// Splits "X[1,4,2,5] X[3,6,4,1] ..." (parentheses also accepted) into
/// 4-tuples of positive labels.
fn tokenize(text: &str) -> Result<Vec<[u64; 4]>, DiagramError> {
    let mut out = Vec::new();
    let mut rest = text;
    while let Some(pos) = rest.find(['X', 'x']) {
        rest = &rest[pos + 1..];
        let open = rest
            .chars()
            .next()
            .filter(|c| *c == '[' || *c == '(')
            .ok_or_else(|| DiagramError::MalformedCode("expected [ or ( after X".into()))?;
        let close = if open == '[' { ']' } else { ')' };
        let end = rest
            .find(close)
            .ok_or_else(|| DiagramError::MalformedCode("unclosed crossing tuple".into()))?;
        let body = &rest[1..end];
        rest = &rest[end + 1..];
        let parts: Vec<&str> = body.split(',').map(str::trim).collect();
        if parts.len() != 4 {
            return Err(DiagramError::MalformedCode(format!(
                "crossing tuple with {} entries",
                parts.len()
            )));
        }
        let mut tuple = [0u64; 4];
        for (i, p) in parts.iter().enumerate() {
            tuple[i] = p
                .parse::<u64>()
                .ok()
                .filter(|&v| v > 0)
                .ok_or_else(|| DiagramError::MalformedCode(format!("bad label `{p}`")))?;
        }
        out.push(tuple);
    }
    if out.is_empty() && !text.trim().is_empty() {
        return Err(DiagramError::MalformedCode("no crossing tuples found".into()));
    }
    Ok(out)
}

impl Diagram {
    pub fn from_crossings(crossings: &[[u64; 4]]) -> Result<Diagram, DiagramError> {
        let v = crossings.len();

        // Pair darts by label.
        let mut by_label: std::collections::BTreeMap<u64, Vec<Dart>> = Default::default();
        for (vi, tuple) in crossings.iter().enumerate() {
            for (s, &label) in tuple.iter().enumerate() {
                by_label
                    .entry(label)
                    .or_default()
                    .push(Dart { vertex: vi, slot: s as u8 });
            }
        }
        let mut edges = Vec::with_capacity(by_label.len());
        let mut dart_edge = vec![usize::MAX; 4 * v];
        for (label, darts) in &by_label {
            if darts.len() != 2 {
                return Err(DiagramError::MalformedCode(format!(
                    "label {label} occurs {} times, expected 2",
                    darts.len()
                )));
            }
            let idx = edges.len();
            edges.push(Edge { label: *label, ends: [darts[0], darts[1]] });
            dart_edge[darts[0].id()] = idx;
            dart_edge[darts[1].id()] = idx;
        }
        let e = edges.len(); // = 2V

        // Face trace: next(d) = sigma(alpha(d)) with sigma the ccw rotation.
        let alpha = |d: Dart| -> Dart {
            let eidx = dart_edge[d.id()];
            let ends = edges[eidx].ends;
            if ends[0] == d {
                ends[1]
            } else {
                ends[0]
            }
        };
        let mut face_of_dart = vec![usize::MAX; 4 * v];
        let mut faces: Vec<Vec<Dart>> = Vec::new();
        for start in 0..4 * v {
            if face_of_dart[start] != usize::MAX {
                continue;
            }
            let mut face = Vec::new();
            let mut d = Dart { vertex: start / 4, slot: (start % 4) as u8 };
            loop {
                face_of_dart[d.id()] = faces.len();
                face.push(d);
                let a = alpha(d);
                d = Dart { vertex: a.vertex, slot: (a.slot + 1) % 4 };
                if d.id() == start {
                    break;
                }
            }
            faces.push(face);
        }
        // Planarity: every connected piece of G must satisfy V - E + F = 2
        // for its own vertices, edges and traced faces.
        let mut vcomp = vec![usize::MAX; v];
        let mut nvcomp = 0;
        for start in 0..v {
            if vcomp[start] != usize::MAX {
                continue;
            }
            vcomp[start] = nvcomp;
            let mut stack = vec![start];
            while let Some(vi) = stack.pop() {
                for s in 0..4u8 {
                    let other = alpha(Dart { vertex: vi, slot: s }).vertex;
                    if vcomp[other] == usize::MAX {
                        vcomp[other] = nvcomp;
                        stack.push(other);
                    }
                }
            }
            nvcomp += 1;
        }
        for cc in 0..nvcomp {
            let vc = vcomp.iter().filter(|&&c| c == cc).count() as i64;
            let ec = edges
                .iter()
                .filter(|e| vcomp[e.ends[0].vertex] == cc)
                .count() as i64;
            let fc = faces
                .iter()
                .filter(|f| vcomp[f[0].vertex] == cc)
                .count() as i64;
            let chi = vc - ec + fc;
            if chi != 2 {
                return Err(DiagramError::NonPlanar { chi });
            }
        }

        // Checkerboard coloring: opposite colors across every edge.
        let f = faces.len();
        let mut face_colors = vec![None; f];
        let mut stack = vec![0usize];
        face_colors[0] = Some(FaceColor::Black);
        while let Some(fi) = stack.pop() {
            let color = face_colors[fi].unwrap();
            let other = match color {
                FaceColor::Black => FaceColor::White,
                FaceColor::White => FaceColor::Black,
            };
            for d in &faces[fi] {
                let nf = face_of_dart[alpha(*d).id()];
                match face_colors[nf] {
                    None => {
                        face_colors[nf] = Some(other);
                        stack.push(nf);
                    }
                    Some(c) if c != other => {
                        return Err(DiagramError::MalformedCode(
                            "faces admit no checkerboard coloring".into(),
                        ))
                    }
                    _ => {}
                }
            }
        }
        // Disconnected diagrams leave some faces uncolored; color each
        // remaining patch from an arbitrary seed.
        for fi in 0..f {
            if face_colors[fi].is_none() {
                face_colors[fi] = Some(FaceColor::Black);
                let mut stack = vec![fi];
                while let Some(g) = stack.pop() {
                    let other = match face_colors[g].unwrap() {
                        FaceColor::Black => FaceColor::White,
                        FaceColor::White => FaceColor::Black,
                    };
                    for d in &faces[g] {
                        let nf = face_of_dart[alpha(*d).id()];
                        if face_colors[nf].is_none() {
                            face_colors[nf] = Some(other);
                            stack.push(nf);
                        }
                    }
                }
            }
        }
        let face_colors: Vec<FaceColor> = face_colors.into_iter().map(Option::unwrap).collect();

        // Link components: the strand continues through slot pairs (0,2)
        // and (1,3).
        let mut edge_component = vec![usize::MAX; e];
        let mut component_count = 0;
        for start in 0..e {
            if edge_component[start] != usize::MAX {
                continue;
            }
            let comp = component_count;
            component_count += 1;
            let mut stack = vec![start];
            while let Some(ei) = stack.pop() {
                if edge_component[ei] != usize::MAX {
                    continue;
                }
                edge_component[ei] = comp;
                for d in edges[ei].ends {
                    let cont = Dart { vertex: d.vertex, slot: (d.slot + 2) % 4 };
                    stack.push(dart_edge[cont.id()]);
                }
            }
        }

        // Consecutive-labels invariant per component.
        check_label_runs(crossings, &edges, &dart_edge, &edge_component, component_count)?;

        let mut diagram = Diagram {
            edges,
            vertex_count: v,
            dart_edge,
            faces,
            face_of_dart,
            face_colors,
            edge_component,
            component_count,
            flags: DiagramFlags::default(),
            witness: AnalysisWitness::default(),
        };
        let analysis = analyze(&diagram);
        diagram.flags = analysis.flags;
        diagram.witness = analysis.witness;
        Ok(diagram)
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn face_count(&self) -> usize {
        self.faces.len()
    }

    pub fn edge_at(&self, d: Dart) -> usize {
        self.dart_edge[d.id()]
    }

    pub fn face_of(&self, d: Dart) -> usize {
        self.face_of_dart[d.id()]
    }

    pub fn other_end(&self, edge: usize, d: Dart) -> Dart {
        let ends = self.edges[edge].ends;
        if ends[0] == d {
            ends[1]
        } else {
            ends[0]
        }
    }

    /// The two faces flanking an edge (may coincide).
    pub fn edge_faces(&self, edge: usize) -> [usize; 2] {
        let ends = self.edges[edge].ends;
        [self.face_of(ends[0]), self.face_of(ends[1])]
    }

    /// Faces with exactly two edge-sides.
    pub fn bigon_faces(&self) -> Vec<usize> {
        (0..self.faces.len())
            .filter(|&fi| self.faces[fi].len() == 2)
            .collect()
    }

    /// JSON dump with a stable schema.
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "vertices": self.vertex_count,
            "edges": self.edges.iter().map(|e| serde_json::json!({
                "label": e.label,
                "ends": e.ends.iter().map(|d| serde_json::json!({
                    "vertex": d.vertex, "slot": d.slot, "role": if d.is_under() { "under" } else { "over" },
                })).collect::<Vec<_>>(),
            })).collect::<Vec<_>>(),
            "faces": self.faces.iter().enumerate().map(|(i, f)| serde_json::json!({
                "color": format!("{:?}", self.face_colors[i]),
                "sides": f.iter().map(|d| serde_json::json!({
                    "edge": self.edge_at(*d), "vertex": d.vertex, "slot": d.slot,
                })).collect::<Vec<_>>(),
            })).collect::<Vec<_>>(),
            "components": self.edge_component,
            "flags": {
                "connected": self.flags.connected,
                "alternating": self.flags.alternating,
                "reduced": self.flags.reduced,
                "prime": self.flags.prime,
            },
        })
    }
}

fn check_label_runs(
    crossings: &[[u64; 4]],
    edges: &[Edge],
    dart_edge: &[usize],
    edge_component: &[usize],
    component_count: usize,
) -> Result<(), DiagramError> {
    let _ = crossings;
    for comp in 0..component_count {
        let members: Vec<usize> = (0..edges.len())
            .filter(|&ei| edge_component[ei] == comp)
            .collect();
        let mut labels: Vec<u64> = members.iter().map(|&ei| edges[ei].label).collect();
        labels.sort_unstable();
        let n = labels.len() as u64;
        let ok = labels
            .iter()
            .enumerate()
            .all(|(i, &l)| l == labels[0] + i as u64);
        if !ok {
            return Err(DiagramError::MalformedCode(format!(
                "component labels {labels:?} are not consecutive"
            )));
        }
        // Walk the strand and require labels to step by 1 mod n in one of
        // the two directions.
        let start = *members
            .iter()
            .min_by_key(|&&ei| edges[ei].label)
            .unwrap();
        let base = labels[0];
        let mut ok_dir = false;
        for dir in 0..2 {
            let mut ei = start;
            let mut arrive = edges[ei].ends[dir];
            let mut expected = edges[ei].label;
            let mut good = true;
            for _ in 0..members.len() {
                if edges[ei].label != expected {
                    good = false;
                    break;
                }
                expected = base + (expected - base + 1) % n;
                let cont = Dart { vertex: arrive.vertex, slot: (arrive.slot + 2) % 4 };
                ei = dart_edge[cont.id()];
                arrive = if edges[ei].ends[0] == cont {
                    edges[ei].ends[1]
                } else {
                    edges[ei].ends[0]
                };
            }
            if good {
                ok_dir = true;
                break;
            }
        }
        if !ok_dir {
            return Err(DiagramError::MalformedCode(format!(
                "component labels starting at {base} are not consecutive along the strand"
            )));
        }
    }
    Ok(())
}

/// Computes the diagram flags with witnesses. Primality is decided by the
/// edge-pair scan: a two-point simple closed curve crosses exactly two
/// distinct edges sharing two faces, so the diagram is prime iff every such
/// pair leaves one side crossing-free.
pub fn analyze(d: &Diagram) -> Analysis {
    let mut flags = DiagramFlags::default();
    let mut witness = AnalysisWitness::default();

    // Connectivity of G(D).
    let v = d.vertex_count;
    let mut seen = vec![false; v.max(1)];
    let mut stack = vec![0usize];
    seen[0] = true;
    let mut count = 1;
    while let Some(vi) = stack.pop() {
        for s in 0..4u8 {
            let e = d.edge_at(Dart { vertex: vi, slot: s });
            let other = d.other_end(e, Dart { vertex: vi, slot: s });
            if !seen[other.vertex] {
                seen[other.vertex] = true;
                count += 1;
                stack.push(other.vertex);
            }
        }
    }
    flags.connected = count == v;

    // Alternating: every edge has one under end and one over end.
    flags.alternating = true;
    for (ei, e) in d.edges.iter().enumerate() {
        if e.ends[0].is_under() == e.ends[1].is_under() {
            flags.alternating = false;
            witness.non_alternating_edge = Some(ei);
            break;
        }
    }

    // Reduced: the four corners of every crossing lie in distinct faces.
    flags.reduced = true;
    for vi in 0..v {
        let fs: BTreeSet<usize> = (0..4u8)
            .map(|s| d.face_of(Dart { vertex: vi, slot: s }))
            .collect();
        if fs.len() != 4 {
            flags.reduced = false;
            witness.non_reduced_crossing = Some(vi);
            break;
        }
    }

    // Primality scan.
    flags.prime = true;
    'scan: for e1 in 0..d.edges.len() {
        for e2 in e1 + 1..d.edges.len() {
            let f1: BTreeSet<usize> = d.edge_faces(e1).into_iter().collect();
            let f2: BTreeSet<usize> = d.edge_faces(e2).into_iter().collect();
            let common: Vec<usize> = f1.intersection(&f2).copied().collect();
            if common.len() < 2 {
                continue;
            }
            if let Some((a, b)) = split_sides(d, e1, e2) {
                if a > 0 && b > 0 {
                    flags.prime = false;
                    witness.non_prime_edge_pair = Some((e1, e2));
                    break 'scan;
                }
            }
        }
    }

    Analysis { flags, witness }
}

/// Vertex counts on the two sides of the separating curve through edges
/// `e1` and `e2`. Returns None when the side assignment is inconsistent
/// (no such curve).
fn split_sides(d: &Diagram, e1: usize, e2: usize) -> Option<(usize, usize)> {
    let v = d.vertex_count;
    // Components of G - {e1, e2}.
    let mut comp = vec![usize::MAX; v];
    let mut ncomp = 0;
    for start in 0..v {
        if comp[start] != usize::MAX {
            continue;
        }
        comp[start] = ncomp;
        let mut stack = vec![start];
        while let Some(vi) = stack.pop() {
            for s in 0..4u8 {
                let e = d.edge_at(Dart { vertex: vi, slot: s });
                if e == e1 || e == e2 {
                    continue;
                }
                let other = d.other_end(e, Dart { vertex: vi, slot: s }).vertex;
                if comp[other] == usize::MAX {
                    comp[other] = ncomp;
                    stack.push(other);
                }
            }
        }
        ncomp += 1;
    }
    // Sides: endpoints of each cut edge lie on opposite sides.
    let mut side = vec![None; ncomp];
    let [u1, v1] = d.edges[e1].ends.map(|dd| dd.vertex);
    let [u2, v2] = d.edges[e2].ends.map(|dd| dd.vertex);
    side[comp[u1]] = Some(0u8);
    let constraints = [(u1, v1), (u2, v2)];
    // Propagate the opposite-side constraints to a fixed point.
    for _ in 0..3 {
        for (a, b) in constraints {
            match (side[comp[a]], side[comp[b]]) {
                (Some(x), Some(y)) => {
                    if x == y {
                        return None;
                    }
                }
                (Some(x), None) => side[comp[b]] = Some(1 - x),
                (None, Some(y)) => side[comp[a]] = Some(1 - y),
                (None, None) => {}
            }
        }
    }
    if side.iter().any(Option::is_none) {
        return None;
    }
    let mut counts = (0usize, 0usize);
    for vi in 0..v {
        if side[comp[vi]] == Some(0) {
            counts.0 += 1;
        } else {
            counts.1 += 1;
        }
    }
    Some(counts)
}

pub fn twist_stats(d: &Diagram) -> TwistStats {
    let bigon_faces = d.bigon_faces();
    let mut is_bigon_edge = vec![false; d.edges.len()];
    for &fi in &bigon_faces {
        for dart in &d.faces[fi] {
            is_bigon_edge[d.edge_at(*dart)] = true;
        }
    }
    let bigon_edges: Vec<usize> = (0..d.edges.len()).filter(|&e| is_bigon_edge[e]).collect();
    let non_bigon = d.edges.len() - bigon_edges.len();
    assert!(non_bigon % 2 == 0, "non-bigon edge count must be even");

    // Twists: components of the bigon-edge subgraph, plus isolated vertices.
    let v = d.vertex_count;
    let mut comp = vec![usize::MAX; v];
    let mut ncomp = 0;
    for start in 0..v {
        if comp[start] != usize::MAX {
            continue;
        }
        comp[start] = ncomp;
        let mut stack = vec![start];
        while let Some(vi) = stack.pop() {
            for s in 0..4u8 {
                let e = d.edge_at(Dart { vertex: vi, slot: s });
                if !is_bigon_edge[e] {
                    continue;
                }
                let other = d.other_end(e, Dart { vertex: vi, slot: s }).vertex;
                if comp[other] == usize::MAX {
                    comp[other] = ncomp;
                    stack.push(other);
                }
            }
        }
        ncomp += 1;
    }
    let mut twists: Vec<Vec<usize>> = vec![Vec::new(); ncomp];
    for vi in 0..v {
        twists[comp[vi]].push(vi);
    }

    let mut t_k = vec![Rat::from_integer(0.into()); d.component_count];
    let mut e_k = vec![0usize; d.component_count];
    for (ei, _) in d.edges.iter().enumerate() {
        let k = d.edge_component[ei];
        e_k[k] += 1;
        if !is_bigon_edge[ei] {
            t_k[k] += rat(1, 2);
        }
    }

    TwistStats {
        bigon_edges,
        twists,
        t_d: (non_bigon / 2) as u64,
        t_k,
        e_k,
    }
}

/// Standard PD codes used across the test suites.
/// PD code of a braid closure. Letters are nonzero: +i is the crossing
/// of strands i, i+1 (1-based) with the left strand passing over, -i the
/// mirror. Arc labels are renumbered consecutively along each link
/// component, as the parser requires. Every strand must meet a crossing.
pub fn braid_closure_pd(strands: usize, word: &[i32]) -> String {
    assert!(strands >= 2);
    let mut next = 0usize;
    let mut fresh = || {
        next += 1;
        next - 1
    };
    let init: Vec<usize> = (0..strands).map(|_| fresh()).collect();
    let mut cur = init.clone();
    let mut succ: BTreeMap<usize, usize> = BTreeMap::new();
    // Quadrant tokens [SE/SW-in first], filled per crossing below.
    let mut crossings: Vec<[usize; 4]> = Vec::new();
    let mut touched = vec![false; strands];
    for &g in word {
        let i = g.unsigned_abs() as usize;
        assert!(1 <= i && i < strands, "letter {g} out of range");
        touched[i - 1] = true;
        touched[i] = true;
        let (a, b) = (cur[i - 1], cur[i]); // SW, SE inputs
        let c = fresh(); // NW output
        let d = fresh(); // NE output
        if g > 0 {
            // Left strand over: under strand runs SE -> NW. Quadrants
            // counterclockwise from the incoming under end.
            crossings.push([b, d, c, a]);
            succ.insert(b, c);
            succ.insert(a, d);
        } else {
            // Right strand over: under strand runs SW -> NE.
            crossings.push([a, b, d, c]);
            succ.insert(a, d);
            succ.insert(b, c);
        }
        cur[i - 1] = c;
        cur[i] = d;
    }
    assert!(touched.iter().all(|&t| t), "every strand must meet a crossing");
    // Closing the braid identifies each strand's last segment with its
    // first: those tokens are the same arc.
    let mut parent: Vec<usize> = (0..next).collect();
    fn find(p: &mut Vec<usize>, x: usize) -> usize {
        if p[x] != x {
            let r = find(p, p[x]);
            p[x] = r;
        }
        p[x]
    }
    for s in 0..strands {
        let (a, b) = (find(&mut parent, cur[s]), find(&mut parent, init[s]));
        parent[a] = b;
    }
    let succ: BTreeMap<usize, usize> = succ
        .into_iter()
        .map(|(a, b)| (find(&mut parent, a), find(&mut parent, b)))
        .collect();
    // Renumber arcs consecutively along each component.
    let mut label: BTreeMap<usize, u64> = BTreeMap::new();
    let mut n = 1u64;
    for start in succ.keys().copied().collect::<Vec<_>>() {
        if label.contains_key(&start) {
            continue;
        }
        let mut a = start;
        loop {
            label.insert(a, n);
            n += 1;
            a = succ[&a];
            if a == start {
                break;
            }
        }
    }
    let resolved: Vec<u64> = (0..next).map(|t| label[&find(&mut parent, t)]).collect();
    crossings
        .iter()
        .map(|c| {
            format!(
                "X[{},{},{},{}]",
                resolved[c[0]], resolved[c[1]], resolved[c[2]], resolved[c[3]]
            )
        })
        .collect::<Vec<_>>()
        .join(" ")
}

/// Assembles a PD string from crossings given as arc tokens in
/// counterclockwise order with the under-strand at slots 0 and 2 (the
/// in/out roles of the under ends may be swapped; they are fixed here).
/// Every token must occur exactly twice. Walks each strand, orients it,
/// rotates tuples so slot 0 is the incoming under end, and relabels arcs
/// consecutively along each component.
fn assemble_pd(crossings: &[[usize; 4]]) -> Result<String, DiagramError> {
    let mut ends: BTreeMap<usize, Vec<(usize, usize)>> = BTreeMap::new();
    for (c, tuple) in crossings.iter().enumerate() {
        for (s, &t) in tuple.iter().enumerate() {
            ends.entry(t).or_default().push((c, s));
        }
    }
    for (t, e) in &ends {
        if e.len() != 2 {
            return Err(DiagramError::MalformedCode(format!(
                "arc token {t} occurs {} times, expected 2",
                e.len()
            )));
        }
    }
    let other_end = |t: usize, c: usize, s: usize| -> (usize, usize) {
        let e = &ends[&t];
        if e[0] == (c, s) {
            e[1]
        } else {
            e[0]
        }
    };
    // Walk strands; each dart (crossing, slot) is an arrival point.
    let mut rotate = vec![false; crossings.len()];
    let mut label: BTreeMap<usize, u64> = BTreeMap::new();
    let mut visited = vec![[false; 4]; crossings.len()];
    let mut n = 1u64;
    for c0 in 0..crossings.len() {
        for s0 in 0..4 {
            if visited[c0][s0] {
                continue;
            }
            // Traverse the component through (c0, s0) arriving at (c0, s0).
            let (mut c, mut s) = (c0, s0);
            loop {
                visited[c][s] = true;
                if s == 2 {
                    rotate[c] = true;
                }
                // Leave through the opposite slot; that arc is traversed
                // next and gets the next label.
                let out = (s + 2) % 4;
                visited[c][out] = true;
                let t = crossings[c][out];
                if label.insert(t, n).is_some() {
                    return Err(DiagramError::MalformedCode(format!(
                        "arc token {t} traversed twice"
                    )));
                }
                n += 1;
                let (nc, ns) = other_end(t, c, out);
                (c, s) = (nc, ns);
                if (c, s) == (c0, s0) {
                    break;
                }
            }
        }
    }
    let out: Vec<String> = crossings
        .iter()
        .enumerate()
        .map(|(c, tuple)| {
            let l = |s: usize| label[&tuple[(s + if rotate[c] { 2 } else { 0 }) % 4]];
            format!("X[{},{},{},{}]", l(0), l(1), l(2), l(3))
        })
        .collect();
    Ok(out.join(" "))
}

/// Standard alternating diagram of the rational link with continued
/// fraction [a1, a2, ...]: a1 crossings twisted into the right side of
/// the tangle, a2 into the bottom, alternating, then the closure joining
/// top ends and bottom ends. All entries must be positive.
pub fn rational_pd(parts: &[u32]) -> Result<String, DiagramError> {
    assert!(!parts.is_empty() && parts.iter().all(|&a| a > 0));
    assert!(parts.iter().map(|&a| a as usize).sum::<usize>() >= 2, "need at least two crossings");
    let mut next = 0usize;
    let mut fresh = || {
        next += 1;
        next - 1
    };
    let (nw, mut ne, mut sw, mut se) = (fresh(), fresh(), fresh(), fresh());
    // 0-tangle: nw--ne and sw--se are single arcs.
    let mut parent: Vec<usize> = Vec::new();
    let mut unions: Vec<(usize, usize)> = vec![(nw, ne), (sw, se)];
    let mut crossings: Vec<[usize; 4]> = Vec::new();
    for (i, &a) in parts.iter().enumerate() {
        for _ in 0..a {
            if i % 2 == 0 {
                // Twist the two right-hand ends: box with NW, SW attached.
                let (bne, bse) = (fresh(), fresh());
                // Under strand SW -> NE: counterclockwise from SW.
                crossings.push([se, bse, bne, ne]);
                ne = bne;
                se = bse;
            } else {
                // Twist the two bottom ends: box with NW, NE attached.
                let (bsw, bse) = (fresh(), fresh());
                // Under strand NE -> SW: counterclockwise from NE.
                crossings.push([se, sw, bsw, bse]);
                sw = bsw;
                se = bse;
            }
        }
    }
    // Close the tangle on the side matching the last twist region: after an
    // odd number of regions the open ends sit left/right (numerator closure),
    // after an even number they sit top/bottom (denominator closure).
    if parts.len() % 2 == 1 {
        unions.push((nw, ne));
        unions.push((sw, se));
    } else {
        unions.push((nw, sw));
        unions.push((ne, se));
    }
    parent.extend(0..next);
    fn find(p: &mut Vec<usize>, x: usize) -> usize {
        if p[x] != x {
            let r = find(p, p[x]);
            p[x] = r;
        }
        p[x]
    }
    for (a, b) in unions {
        let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
        parent[ra] = rb;
    }
    let resolved: Vec<[usize; 4]> = crossings
        .iter()
        .map(|t| {
            [
                find(&mut parent, t[0]),
                find(&mut parent, t[1]),
                find(&mut parent, t[2]),
                find(&mut parent, t[3]),
            ]
        })
        .collect();
    assemble_pd(&resolved)
}

/// Connect sum of two diagrams: cuts one arc in each and joins the loose
/// ends across. The two ways of pairing the ends differ by orientation;
/// the one giving a consistently labelled diagram is returned.
pub fn connect_sum_pd(a: &str, b: &str) -> Result<String, DiagramError> {
    let ta = tokenize(a)?;
    let tb = tokenize(b)?;
    let amax = ta.iter().flatten().copied().max().unwrap_or(0) as usize;
    // Tokens: diagram A arcs keep their labels, diagram B arcs shifted.
    let mut crossings: Vec<[usize; 4]> = Vec::new();
    for t in &ta {
        crossings.push([t[0] as usize, t[1] as usize, t[2] as usize, t[3] as usize]);
    }
    for t in &tb {
        crossings.push([
            t[0] as usize + amax,
            t[1] as usize + amax,
            t[2] as usize + amax,
            t[3] as usize + amax,
        ]);
    }
    // Cut arc 1 of A (ends e0, e1) and arc 1 of B (ends f0, f1): the sum
    // replaces them by two arcs joining A and B. Pairing e0-f0/e1-f1 or
    // e0-f1/e1-f0: exactly one respects the strand orientations.
    let occurrences = |cr: &[[usize; 4]], tok: usize| -> Vec<(usize, usize)> {
        let mut v = Vec::new();
        for (c, t) in cr.iter().enumerate() {
            for (s, &x) in t.iter().enumerate() {
                if x == tok {
                    v.push((c, s));
                }
            }
        }
        v
    };
    let ea = occurrences(&crossings, 1);
    let eb = occurrences(&crossings, 1 + amax);
    assert_eq!(ea.len(), 2);
    assert_eq!(eb.len(), 2);
    let fresh1 = crossings.iter().flatten().max().unwrap() + 1;
    let fresh2 = fresh1 + 1;
    let mut fallback = None;
    for swap in [false, true] {
        let mut cand = crossings.clone();
        let (f0, f1) = if swap { (eb[1], eb[0]) } else { (eb[0], eb[1]) };
        cand[ea[0].0][ea[0].1] = fresh1;
        cand[f0.0][f0.1] = fresh1;
        cand[ea[1].0][ea[1].1] = fresh2;
        cand[f1.0][f1.1] = fresh2;
        if let Ok(pd) = assemble_pd(&cand) {
            if let Ok(d) = parse_pd(&pd) {
                // Of the two pairings, prefer the one keeping under/over
                // parity consistent across the junction.
                if d.flags.connected && d.flags.alternating {
                    return Ok(pd);
                }
                fallback = Some(pd);
            }
        }
    }
    fallback.ok_or_else(|| DiagramError::MalformedCode("connect sum did not assemble".into()))
}

#[doc(hidden)]
pub fn assemble_pd_for_tests(crossings: &[[usize; 4]]) -> Result<String, DiagramError> {
    assemble_pd(crossings)
}

pub mod codes {
    pub const TREFOIL: &str = "X[1,4,2,5] X[3,6,4,1] X[5,2,6,3]";
    pub const FIGURE_EIGHT: &str = "X[8,6,1,5] X[4,2,5,1] X[2,7,3,8] X[6,3,7,4]";
    pub const VIRTUAL_TREFOIL: &str = "X[1,3,2,4] X[2,4,3,1]";
    pub const ONE_CROSSING_UNKNOT: &str = "X[1,2,2,1]";
    /// Closure of (s1 s2^-1)^3; see braid_closure_pd.
    pub const BORROMEAN: &str =
        "X[5,2,6,1] X[2,9,3,10] X[10,7,11,6] X[7,3,8,4] X[4,12,1,11] X[12,8,9,5]";
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::angle::rat;

    #[test]
    fn trefoil_counts() {
        let d = parse_pd(codes::TREFOIL).unwrap();
        assert_eq!(d.vertex_count(), 3);
        assert_eq!(d.edge_count(), 6);
        assert_eq!(d.face_count(), 5);
        assert_eq!(d.component_count, 1);
        assert!(d.flags.connected && d.flags.alternating && d.flags.reduced && d.flags.prime);
    }

    #[test]
    fn figure_eight_counts() {
        let d = parse_pd(codes::FIGURE_EIGHT).unwrap();
        assert_eq!(d.vertex_count(), 4);
        assert_eq!(d.edge_count(), 8);
        assert_eq!(d.face_count(), 6);
        assert!(d.flags.alternating && d.flags.prime);
    }

    #[test]
    fn virtual_trefoil_is_non_planar() {
        match parse_pd(codes::VIRTUAL_TREFOIL) {
            Err(DiagramError::NonPlanar { chi }) => assert_ne!(chi, 2),
            other => panic!("expected NonPlanar, got {other:?}"),
        }
    }

    #[test]
    fn one_crossing_unknot_not_reduced() {
        let d = parse_pd(codes::ONE_CROSSING_UNKNOT).unwrap();
        assert!(!d.flags.reduced);
        assert_eq!(d.witness.non_reduced_crossing, Some(0));
    }

    #[test]
    fn bad_tokens_rejected() {
        assert!(matches!(
            parse_pd("X[1,2,3]"),
            Err(DiagramError::MalformedCode(_))
        ));
        assert!(matches!(
            parse_pd("X[1,2"),
            Err(DiagramError::MalformedCode(_))
        ));
    }

    #[test]
    fn disjoint_curls_parse_as_disconnected() {
        let d = parse_pd("X[1,1,2,2] X[3,3,4,4]").unwrap();
        assert!(!d.flags.connected);
        assert_eq!(d.component_count, 2);
    }

    #[test]
    fn label_multiplicity_enforced() {
        // Label 1 appears three times.
        assert!(matches!(
            parse_pd("X[1,1,1,2] X[2,3,3,4]"),
            Err(DiagramError::MalformedCode(_))
        ));
    }

    #[test]
    fn figure_eight_twist_stats() {
        let d = parse_pd(codes::FIGURE_EIGHT).unwrap();
        let ts = twist_stats(&d);
        assert_eq!(ts.t_d, 2);
        assert_eq!(ts.bigon_edges.len(), 4);
        assert_eq!(ts.t_k, vec![rat(2, 1)]);
        assert_eq!(ts.e_k, vec![8]);
    }

    #[test]
    fn trefoil_twist_number_zero() {
        let d = parse_pd(codes::TREFOIL).unwrap();
        let ts = twist_stats(&d);
        assert_eq!(ts.t_d, 0);
        assert_eq!(ts.t_k, vec![rat(0, 1)]);
        // The whole (2,3) diagram is one twist.
        assert_eq!(ts.twists.len(), 1);
    }

    #[test]
    fn checkerboard_coloring_is_proper() {
        for code in [codes::TREFOIL, codes::FIGURE_EIGHT] {
            let d = parse_pd(code).unwrap();
            for e in 0..d.edge_count() {
                let [f1, f2] = d.edge_faces(e);
                assert_ne!(d.face_colors[f1], d.face_colors[f2]);
            }
        }
    }

    #[test]
    fn twist_stats_survives_relabeling() {
        // Shift every label by 10.
        let d1 = parse_pd(codes::FIGURE_EIGHT).unwrap();
        let shifted = "X[18,16,11,15] X[14,12,15,11] X[12,17,13,18] X[16,13,17,14]";
        let d2 = parse_pd(shifted).unwrap();
        let (t1, t2) = (twist_stats(&d1), twist_stats(&d2));
        assert_eq!(t1.t_d, t2.t_d);
        assert_eq!(t1.t_k, t2.t_k);
        assert_eq!(t1.e_k, t2.e_k);
    }
    #[test]
    fn braid_closures_reproduce_invariants() {
        // sigma_1^3: the standard trefoil diagram.
        let pd = braid_closure_pd(2, &[1, 1, 1]);
        let d = parse_pd(&pd).unwrap();
        assert_eq!(d.vertex_count, 3);
        assert_eq!(d.component_count, 1);
        assert!(d.flags.alternating && d.flags.reduced && d.flags.prime);
        // (sigma_1 sigma_2^-1)^2: a 4-crossing knot with t(D) = 2.
        let pd = braid_closure_pd(3, &[1, -2, 1, -2]);
        let d = parse_pd(&pd).unwrap();
        assert_eq!((d.vertex_count, d.component_count), (4, 1));
        assert!(d.flags.alternating && d.flags.reduced && d.flags.prime);
        assert_eq!(twist_stats(&d).t_d, 2);
        // (sigma_1 sigma_2^-1)^3: three components, each of twist number 2.
        let pd = braid_closure_pd(3, &[1, -2, 1, -2, 1, -2]);
        assert_eq!(pd, codes::BORROMEAN);
        let d = parse_pd(&pd).unwrap();
        assert_eq!((d.vertex_count, d.component_count), (6, 3));
        assert!(d.flags.alternating && d.flags.reduced && d.flags.prime);
        let ts = twist_stats(&d);
        assert_eq!(ts.t_d, 6);
        assert_eq!(ts.t_k, vec![rat(2, 1), rat(2, 1), rat(2, 1)]);
        assert_eq!(ts.e_k, vec![4, 4, 4]);
    }

    #[test]
    fn rational_diagrams_have_expected_shape() {
        for (parts, crossings, comps, t_d) in [
            (vec![3u32], 3, 1, 0),
            (vec![2], 2, 2, 0),
            (vec![5], 5, 1, 0),
            (vec![2, 2], 4, 1, 2),
            (vec![3, 2], 5, 1, 2),
            (vec![2, 1, 2], 5, 2, 3),
            (vec![3, 1, 2], 6, 1, 3),
            (vec![3, 3, 2], 8, 1, 3),
        ] {
            let pd = rational_pd(&parts).unwrap();
            let d = parse_pd(&pd).unwrap_or_else(|e| panic!("{parts:?}: {e} ({pd})"));
            assert_eq!(d.vertex_count(), crossings, "{parts:?}");
            assert_eq!(d.component_count, comps, "{parts:?}");
            assert!(d.flags.connected && d.flags.alternating, "{parts:?} ({pd})");
            assert!(d.flags.reduced && d.flags.prime, "{parts:?} ({pd})");
            assert_eq!(twist_stats(&d).t_d, t_d, "{parts:?}");
        }
    }

    #[test]
    fn connect_sum_is_composite() {
        let granny = connect_sum_pd(codes::TREFOIL, codes::TREFOIL).unwrap();
        let d = parse_pd(&granny).unwrap();
        assert_eq!(d.vertex_count(), 6);
        assert_eq!(d.component_count, 1);
        assert!(d.flags.connected && d.flags.alternating && d.flags.reduced);
        assert!(!d.flags.prime);
        assert!(d.witness.non_prime_edge_pair.is_some());
    }
}
