//! Sphere patterns on 0-handle boundaries and normal-curve combinatorics.
//!
//! A sphere pattern is a cell decomposition of a 2-sphere into regions
//! (surface pieces), gates (1-handle bands, each carrying an exterior
//! angle) and gaps (boundary discs). Curves are stored combinatorially as
//! cyclic event sequences; isotopy classes are keyed by the event word up
//! to rotation and reflection. Enumeration and minimum-area search run on
//! a shared slot-refined walk engine: every crossing point gets a slot on
//! its gate band or corner segment, slot order reverses across a band, and
//! embeddedness is exactly "the chords are non-crossing in every region
//! and gap".

use crate::angle::{rat_int, AreaValue, Rat};
use crate::diagram::{Dart, Diagram};
use num_traits::{Signed, Zero};
use serde::Serialize;
use std::collections::BTreeMap;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ItemRef {
    pub region: usize,
    pub item: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Item {
    Gate { gate: usize, side: u8 },
    Corner { gap: usize, corner: usize },
}

#[derive(Debug, Clone, Serialize)]
pub struct Region {
    /// Cyclic boundary, strictly alternating gate-sides and gap-corners.
    pub items: Vec<Item>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Gate {
    /// Exterior angle in units of pi, in (0, 1).
    #[serde(serialize_with = "crate::angle::serialize_rat")]
    pub exterior: Rat,
    /// Where each side of the band sits: sides[k] is side k.
    pub sides: [ItemRef; 2],
}

#[derive(Debug, Clone, Serialize)]
pub struct Gap {
    /// Corner segments in cyclic order around the gap disc.
    pub corners: Vec<ItemRef>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SpherePattern {
    pub f0_regions: Vec<Region>,
    pub gates: Vec<Gate>,
    pub gaps: Vec<Gap>,
}

#[derive(Debug, Clone, thiserror::Error, PartialEq, Eq)]
pub enum PatternError {
    #[error("angle out of range: edge {edge} exterior angle {value} not in (0, pi)")]
    AngleOutOfRange { edge: usize, value: String },
    #[error("diagram hypothesis violated: {0}")]
    DiagramHypothesisViolated(String),
    #[error("bad rotation data: {0}")]
    BadRotation(String),
    #[error("cell complex is not a sphere: Euler count {chi}")]
    NotASphere { chi: i64 },
    #[error("dangling reference: {0}")]
    DanglingReference(String),
}

/// Events an unoriented closed curve performs, in cyclic order. A gate
/// event crosses the band from `from_side`; a gap arc runs across a gap
/// disc between two of its corner segments.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub enum CurveEvent {
    Gate { gate: usize, from_side: u8 },
    GapArc { gap: usize, corner_in: usize, corner_out: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NormalCurve {
    pub events: Vec<CurveEvent>,
}

impl NormalCurve {
    pub fn gap_arc_count(&self) -> usize {
        self.events
            .iter()
            .filter(|e| matches!(e, CurveEvent::GapArc { .. }))
            .count()
    }

    pub fn gate_count(&self) -> usize {
        self.events.len() - self.gap_arc_count()
    }

    /// Canonical key: the event word with crossing directions erased,
    /// minimized over rotation and reflection (reflection reverses the
    /// word and swaps each arc's corners).
    pub fn canonical_key(&self) -> Vec<(u8, usize, usize, usize)> {
        let fwd: Vec<(u8, usize, usize, usize)> = self
            .events
            .iter()
            .map(|e| match *e {
                CurveEvent::Gate { gate, .. } => (0, gate, 0, 0),
                CurveEvent::GapArc { gap, corner_in, corner_out } => (1, gap, corner_in, corner_out),
            })
            .collect();
        let rev: Vec<(u8, usize, usize, usize)> = fwd
            .iter()
            .rev()
            .map(|&(t, a, cin, cout)| (t, a, cout, cin))
            .collect();
        let mut best: Option<Vec<(u8, usize, usize, usize)>> = None;
        for word in [fwd, rev].iter_mut() {
            for _ in 0..word.len().max(1) {
                word.rotate_left(1);
                if best.as_ref().map_or(true, |b| &*word < b) {
                    best = Some(word.clone());
                }
            }
        }
        best.unwrap_or_default()
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "events": self.events.iter().map(|e| match e {
                CurveEvent::Gate { gate, from_side } =>
                    serde_json::json!({"gate": gate, "from_side": from_side}),
                CurveEvent::GapArc { gap, corner_in, corner_out } =>
                    serde_json::json!({"gap": gap, "corner_in": corner_in, "corner_out": corner_out}),
            }).collect::<Vec<_>>(),
        })
    }
}

/// Input for the pattern builder: a connected graph with a rotation
/// system. `vertex_ends[v]` lists the incident edge-ends counterclockwise;
/// each (edge, end) pair must occur exactly once overall.
pub struct RotationMap {
    pub vertex_ends: Vec<Vec<(usize, u8)>>,
    pub exteriors: Vec<Rat>,
}

impl SpherePattern {
    pub fn from_rotation(map: &RotationMap) -> Result<SpherePattern, PatternError> {
        let ne = map.exteriors.len();
        for (e, x) in map.exteriors.iter().enumerate() {
            if !x.is_positive() || *x >= rat_int(1) {
                return Err(PatternError::AngleOutOfRange { edge: e, value: x.to_string() });
            }
        }
        // Locate both ends of every edge.
        let mut end_pos = vec![[None::<(usize, usize)>; 2]; ne];
        for (v, ends) in map.vertex_ends.iter().enumerate() {
            for (p, &(e, k)) in ends.iter().enumerate() {
                if e >= ne || k > 1 {
                    return Err(PatternError::BadRotation(format!("edge end ({e}, {k})")));
                }
                if end_pos[e][k as usize].is_some() {
                    return Err(PatternError::BadRotation(format!(
                        "edge end ({e}, {k}) listed twice"
                    )));
                }
                end_pos[e][k as usize] = Some((v, p));
            }
        }
        let mut ends = vec![[(0usize, 0usize); 2]; ne];
        for e in 0..ne {
            for k in 0..2 {
                ends[e][k] = end_pos[e][k]
                    .ok_or_else(|| PatternError::BadRotation(format!("edge end ({e}, {k}) missing")))?;
            }
        }

        let nv = map.vertex_ends.len();
        let deg: Vec<usize> = map.vertex_ends.iter().map(Vec::len).collect();
        let dart_base: Vec<usize> = deg
            .iter()
            .scan(0usize, |acc, d| {
                let b = *acc;
                *acc += d;
                Some(b)
            })
            .collect();
        let total_darts: usize = deg.iter().sum();
        let alpha = |v: usize, p: usize| -> (usize, usize) {
            let (e, k) = map.vertex_ends[v][p];
            ends[e][1 - k as usize]
        };

        // Trace faces: next = rotate(alpha(dart)).
        let mut face_of = vec![usize::MAX; total_darts];
        let mut regions: Vec<Region> = Vec::new();
        let mut gates: Vec<Gate> = (0..ne)
            .map(|e| Gate {
                exterior: map.exteriors[e].clone(),
                sides: [ItemRef { region: usize::MAX, item: usize::MAX }; 2],
            })
            .collect();
        let mut side_seen = vec![0u8; ne];
        let mut gap_corner_ref: Vec<Vec<ItemRef>> = deg
            .iter()
            .map(|&d| vec![ItemRef { region: usize::MAX, item: usize::MAX }; d])
            .collect();

        for v0 in 0..nv {
            for p0 in 0..deg[v0] {
                if face_of[dart_base[v0] + p0] != usize::MAX {
                    continue;
                }
                let rid = regions.len();
                let mut items = Vec::new();
                let (mut v, mut p) = (v0, p0);
                loop {
                    face_of[dart_base[v] + p] = rid;
                    let (e, _) = map.vertex_ends[v][p];
                    let side = side_seen[e];
                    if side > 1 {
                        return Err(PatternError::BadRotation(format!(
                            "edge {e} traced more than twice"
                        )));
                    }
                    side_seen[e] += 1;
                    gates[e].sides[side as usize] = ItemRef { region: rid, item: items.len() };
                    items.push(Item::Gate { gate: e, side });
                    let (av, ap) = alpha(v, p);
                    // Corner between positions ap and ap+1 at vertex av.
                    gap_corner_ref[av][ap] = ItemRef { region: rid, item: items.len() };
                    items.push(Item::Corner { gap: av, corner: ap });
                    v = av;
                    p = (ap + 1) % deg[av];
                    if (v, p) == (v0, p0) {
                        break;
                    }
                }
                regions.push(Region { items });
            }
        }

        let gaps: Vec<Gap> = gap_corner_ref.into_iter().map(|corners| Gap { corners }).collect();
        let chi = nv as i64 - ne as i64 + regions.len() as i64;
        if chi != 2 {
            return Err(PatternError::NotASphere { chi });
        }
        Ok(SpherePattern { f0_regions: regions, gates, gaps })
    }

    pub fn interior(&self, gate: usize) -> Rat {
        rat_int(1) - &self.gates[gate].exterior
    }

    /// Resolves one event to its (entry, exit) boundary items.
    fn event_ends(&self, e: &CurveEvent) -> Result<(ItemRef, ItemRef), PatternError> {
        match *e {
            CurveEvent::Gate { gate, from_side } => {
                let g = self
                    .gates
                    .get(gate)
                    .ok_or_else(|| PatternError::DanglingReference(format!("gate {gate}")))?;
                if from_side > 1 {
                    return Err(PatternError::DanglingReference(format!("gate side {from_side}")));
                }
                Ok((g.sides[from_side as usize], g.sides[1 - from_side as usize]))
            }
            CurveEvent::GapArc { gap, corner_in, corner_out } => {
                let g = self
                    .gaps
                    .get(gap)
                    .ok_or_else(|| PatternError::DanglingReference(format!("gap {gap}")))?;
                let a = *g
                    .corners
                    .get(corner_in)
                    .ok_or_else(|| PatternError::DanglingReference(format!("corner {corner_in}")))?;
                let b = *g
                    .corners
                    .get(corner_out)
                    .ok_or_else(|| PatternError::DanglingReference(format!("corner {corner_out}")))?;
                Ok((a, b))
            }
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "regions": self.f0_regions.iter().map(|r| serde_json::json!({
                "items": r.items.iter().map(|it| match it {
                    Item::Gate { gate, side } => serde_json::json!({"gate": gate, "side": side}),
                    Item::Corner { gap, corner } => serde_json::json!({"gap": gap, "corner": corner}),
                }).collect::<Vec<_>>(),
            })).collect::<Vec<_>>(),
            "gates": self.gates.iter().map(|g| serde_json::json!({
                "exterior": crate::angle::RatJson::from(&g.exterior),
                "sides": g.sides.iter().map(|s| serde_json::json!({"region": s.region, "item": s.item})).collect::<Vec<_>>(),
            })).collect::<Vec<_>>(),
            "gaps": self.gaps.iter().map(|g| serde_json::json!({
                "corners": g.corners.iter().map(|s| serde_json::json!({"region": s.region, "item": s.item})).collect::<Vec<_>>(),
            })).collect::<Vec<_>>(),
        })
    }
}

/// a(N) = sum of crossed exterior angles - 2pi + pi * (gap arcs), in units
/// of pi.
pub fn curve_area(pat: &SpherePattern, curve: &NormalCurve) -> Result<AreaValue, PatternError> {
    let mut total = rat_int(-2);
    for e in &curve.events {
        pat.event_ends(e)?;
        match e {
            CurveEvent::Gate { gate, .. } => total += &pat.gates[*gate].exterior,
            CurveEvent::GapArc { .. } => total += rat_int(1),
        }
    }
    Ok(AreaValue(total))
}

/// a(H) for a 0-handle of a normal surface: the boundary area plus 3pi for
/// each free arc of the boundary.
pub fn handle_area(
    pat: &SpherePattern,
    handle_boundary: &[CurveEvent],
    free_arc_count: usize,
) -> Result<AreaValue, PatternError> {
    let mut total = rat_int(-2) + rat_int(3 * free_arc_count as i64);
    for e in handle_boundary {
        pat.event_ends(e)?;
        match e {
            CurveEvent::Gate { gate, .. } => total += &pat.gates[*gate].exterior,
            CurveEvent::GapArc { .. } => total += rat_int(1),
        }
    }
    Ok(AreaValue(total))
}

/// Normality violations, in the order they are checked.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum NormalityViolation {
    /// The event word is inconsistent or references missing cells.
    Malformed(String),
    /// (ii) empty curve.
    Empty,
    /// (iii) a surface-piece chord returns to the same or an adjacent
    /// boundary component.
    ChordTooShort { region: usize, item_a: usize, item_b: usize },
    /// (iv) a gap arc with both endpoints on one corner segment.
    ArcSameCorner { gap: usize, corner: usize },
    /// (v) more than one crossing of a gate.
    GateMultiplicity { gate: usize, count: usize },
    /// (vi) more than one arc in a gap.
    GapMultiplicity { gap: usize, count: usize },
    /// Chords cannot be realized disjointly.
    NotEmbedded { region: Option<usize>, gap: Option<usize> },
}

/// Checks conditions (ii)-(vi) and embeddedness. Condition (i) (respecting
/// the product structure of the bands) is implicit in the event encoding.
/// Returns all violations, ordered; empty means normal.
pub fn is_normal(pat: &SpherePattern, curve: &NormalCurve) -> Vec<NormalityViolation> {
    let mut out = Vec::new();
    if curve.events.is_empty() {
        return vec![NormalityViolation::Empty];
    }
    let mut ends = Vec::new();
    for e in &curve.events {
        match pat.event_ends(e) {
            Ok(pair) => ends.push(pair),
            Err(err) => return vec![NormalityViolation::Malformed(err.to_string())],
        }
    }
    // Walk consistency: each chord joins consecutive events inside one region.
    let n = ends.len();
    for i in 0..n {
        let exit = ends[i].1;
        let entry = ends[(i + 1) % n].0;
        if exit.region != entry.region {
            return vec![NormalityViolation::Malformed(format!(
                "events {i} and {} do not share a region",
                (i + 1) % n
            ))];
        }
        let m = pat.f0_regions[exit.region].items.len();
        let diff = (exit.item + m - entry.item) % m;
        let dist = diff.min(m - diff);
        if dist < 2 {
            out.push(NormalityViolation::ChordTooShort {
                region: exit.region,
                item_a: exit.item,
                item_b: entry.item,
            });
        }
    }
    let mut gate_counts: BTreeMap<usize, usize> = BTreeMap::new();
    let mut gap_counts: BTreeMap<usize, usize> = BTreeMap::new();
    for e in &curve.events {
        match *e {
            CurveEvent::Gate { gate, .. } => *gate_counts.entry(gate).or_default() += 1,
            CurveEvent::GapArc { gap, corner_in, corner_out } => {
                if corner_in == corner_out {
                    out.push(NormalityViolation::ArcSameCorner { gap, corner: corner_in });
                }
                *gap_counts.entry(gap).or_default() += 1;
            }
        }
    }
    for (&gate, &count) in &gate_counts {
        if count > 1 {
            out.push(NormalityViolation::GateMultiplicity { gate, count });
        }
    }
    for (&gap, &count) in &gap_counts {
        if count > 1 {
            out.push(NormalityViolation::GapMultiplicity { gap, count });
        }
    }
    if !out.is_empty() {
        return out;
    }
    // Multiplicities are all 1, so chord endpoints sit at bare item
    // positions and embeddedness is a non-crossing check per circle.
    let mut region_chords: BTreeMap<usize, Vec<(usize, usize)>> = BTreeMap::new();
    for i in 0..n {
        let exit = ends[i].1;
        let entry = ends[(i + 1) % n].0;
        region_chords
            .entry(exit.region)
            .or_default()
            .push((exit.item, entry.item));
    }
    for (&r, chords) in &region_chords {
        if !non_crossing(chords) {
            out.push(NormalityViolation::NotEmbedded { region: Some(r), gap: None });
        }
    }
    let mut gap_chords: BTreeMap<usize, Vec<(usize, usize)>> = BTreeMap::new();
    for e in &curve.events {
        if let CurveEvent::GapArc { gap, corner_in, corner_out } = *e {
            gap_chords.entry(gap).or_default().push((corner_in, corner_out));
        }
    }
    for (&g, chords) in &gap_chords {
        if !non_crossing(chords) {
            out.push(NormalityViolation::NotEmbedded { region: None, gap: Some(g) });
        }
    }
    out
}

/// Do the chords form a non-crossing matching on a circle? Positions are
/// compared by circular order only, so any consistent labelling works.
fn non_crossing(chords: &[(usize, usize)]) -> bool {
    for (i, &(a, b)) in chords.iter().enumerate() {
        for &(c, d) in &chords[i + 1..] {
            // Walk the circle from a to b the short way through increasing
            // labels; crossing iff exactly one of (c, d) is strictly
            // inside the arc (a, b).
            let inside = |x: usize| -> bool {
                let (lo, hi) = (a.min(b), a.max(b));
                x > lo && x < hi
            };
            if inside(c) != inside(d) {
                return false;
            }
        }
    }
    true
}

// ---------------------------------------------------------------------------
// Walk engine

#[derive(Debug, Clone, Copy)]
struct SearchConfig {
    /// Slots per item; every curve touching each item at most `bound`
    /// times is reachable.
    bound: usize,
    /// Per-gate crossing cap.
    max_gate: usize,
    /// Per-gap arc cap; 0 forbids gap arcs entirely.
    max_gap: usize,
    stop_after_first: bool,
    /// Shrink the weight cap to the best emitted weight (minimum search).
    shrink_cap: bool,
    /// Keep curves whose weight equals the cap (prune only strictly above).
    cap_inclusive: bool,
}

struct Walker<'a> {
    pat: &'a SpherePattern,
    cfg: SearchConfig,
    /// Global corner ids: corner_id[gap][corner index].
    corner_id: Vec<Vec<usize>>,
    /// Per region: (gate, side) entries and (gap, corner, corner id) entries.
    region_gates: Vec<Vec<(usize, u8)>>,
    region_corners: Vec<Vec<(usize, usize, usize)>>,

    gate_slot_used: Vec<Vec<bool>>,
    gate_count: Vec<usize>,
    corner_slot_used: Vec<Vec<bool>>,
    gap_count: Vec<usize>,
    region_chords: Vec<Vec<(usize, usize)>>,
    gap_chords: Vec<Vec<(usize, usize)>>,

    events: Vec<CurveEvent>,
    weight: Rat,
    cap: Option<Rat>,
    /// Maintain the running weight (needed only when a cap prunes).
    track: bool,
    start_key: (u8, usize),
    start_entry: (usize, usize), // (region, position)
    cur_exit: (usize, usize),
    done: bool,
    results: BTreeMap<Vec<(u8, usize, usize, usize)>, (Rat, NormalCurve)>,
}

impl<'a> Walker<'a> {
    fn new(pat: &'a SpherePattern, cfg: SearchConfig, cap: Option<Rat>) -> Walker<'a> {
        let mut corner_id: Vec<Vec<usize>> = Vec::new();
        let mut next = 0usize;
        for g in &pat.gaps {
            corner_id.push((0..g.corners.len()).map(|i| next + i).collect());
            next += g.corners.len();
        }
        let nr = pat.f0_regions.len();
        let mut region_gates = vec![Vec::new(); nr];
        for (gi, g) in pat.gates.iter().enumerate() {
            for side in 0..2u8 {
                region_gates[g.sides[side as usize].region].push((gi, side));
            }
        }
        let mut region_corners = vec![Vec::new(); nr];
        for (gi, g) in pat.gaps.iter().enumerate() {
            for (ci, r) in g.corners.iter().enumerate() {
                region_corners[r.region].push((gi, ci, corner_id[gi][ci]));
            }
        }
        Walker {
            pat,
            cfg,
            gate_slot_used: vec![vec![false; cfg.bound]; pat.gates.len()],
            gate_count: vec![0; pat.gates.len()],
            corner_slot_used: vec![vec![false; cfg.bound]; next],
            gap_count: vec![0; pat.gaps.len()],
            region_chords: vec![Vec::new(); nr],
            gap_chords: vec![Vec::new(); pat.gaps.len()],
            corner_id,
            region_gates,
            region_corners,
            events: Vec::new(),
            weight: Rat::zero(),
            track: cap.is_some() || cfg.shrink_cap,
            cap,
            start_key: (0, 0),
            start_entry: (0, 0),
            cur_exit: (0, 0),
            done: false,
            results: BTreeMap::new(),
        }
    }

    fn item_of(&self, _region: usize, pos: usize) -> usize {
        pos / self.cfg.bound
    }

    /// Does adding up to weight `w` overshoot the cap?
    fn over_cap(&self, w: &Rat, cap: &Rat) -> bool {
        if self.cfg.cap_inclusive {
            w > cap
        } else {
            w >= cap
        }
    }

    /// Total exterior weight of the current event list.
    fn event_weight(&self) -> Rat {
        self.events.iter().fold(Rat::zero(), |acc, e| match e {
            CurveEvent::Gate { gate, .. } => acc + &self.pat.gates[*gate].exterior,
            CurveEvent::GapArc { .. } => acc + rat_int(1),
        })
    }

    /// Chord admissible in `region` from pos `a` to pos `b`: condition
    /// (iii) at item granularity plus non-crossing against placed chords.
    fn chord_ok(&self, region: usize, a: usize, b: usize) -> bool {
        let m = self.pat.f0_regions[region].items.len();
        let (ia, ib) = (self.item_of(region, a), self.item_of(region, b));
        let diff = (ia + m - ib) % m;
        if diff.min(m - diff) < 2 {
            return false;
        }
        for &(c, d) in &self.region_chords[region] {
            let inside = |x: usize| {
                let (lo, hi) = (a.min(b), a.max(b));
                x > lo && x < hi
            };
            if inside(c) != inside(d) {
                return false;
            }
        }
        true
    }

    fn gap_chord_ok(&self, gap: usize, a: usize, b: usize) -> bool {
        for &(c, d) in &self.gap_chords[gap] {
            let inside = |x: usize| {
                let (lo, hi) = (a.min(b), a.max(b));
                x > lo && x < hi
            };
            if inside(c) != inside(d) {
                return false;
            }
        }
        true
    }

    fn run(&mut self) {
        let b = self.cfg.bound;
        // Start nodes: gates entered from side 0, or gap arcs with
        // corner_in < corner_out; every unoriented curve admits an
        // orientation and starting event of this shape at its minimal key.
        for g in 0..self.pat.gates.len() {
            if self.done {
                return;
            }
            self.start_key = (0, g);
            for slot in 0..b {
                let entry = self.gate_pos(g, 0, slot);
                let exit = self.gate_pos(g, 1, slot);
                if let Some(cap) = &self.cap {
                    if self.over_cap(&self.pat.gates[g].exterior, cap) {
                        continue;
                    }
                }
                self.gate_slot_used[g][slot] = true;
                self.gate_count[g] = 1;
                if self.track {
                    self.weight = self.pat.gates[g].exterior.clone();
                }
                self.events.push(CurveEvent::Gate { gate: g, from_side: 0 });
                self.start_entry = entry;
                self.cur_exit = exit;
                self.extend();
                self.events.pop();
                self.gate_count[g] = 0;
                self.gate_slot_used[g][slot] = false;
            }
        }
        if self.cfg.max_gap == 0 {
            return;
        }
        for gap in 0..self.pat.gaps.len() {
            if self.done {
                return;
            }
            self.start_key = (1, gap);
            let nc = self.pat.gaps[gap].corners.len();
            for cin in 0..nc {
                for cout in cin + 1..nc {
                    for sin in 0..b {
                        for sout in 0..b {
                            if let Some(cap) = &self.cap {
                                if self.over_cap(&rat_int(1), cap) {
                                    continue;
                                }
                            }
                            let gp_in = cin * b + sin;
                            let gp_out = cout * b + sout;
                            let (cid_in, cid_out) =
                                (self.corner_id[gap][cin], self.corner_id[gap][cout]);
                            self.corner_slot_used[cid_in][sin] = true;
                            self.corner_slot_used[cid_out][sout] = true;
                            self.gap_count[gap] = 1;
                            self.gap_chords[gap].push((gp_in, gp_out));
                            if self.track {
                                self.weight = rat_int(1);
                            }
                            self.events.push(CurveEvent::GapArc {
                                gap,
                                corner_in: cin,
                                corner_out: cout,
                            });
                            self.start_entry = self.corner_pos(gap, cin, sin);
                            self.cur_exit = self.corner_pos(gap, cout, sout);
                            self.extend();
                            self.events.pop();
                            self.gap_chords[gap].pop();
                            self.gap_count[gap] = 0;
                            self.corner_slot_used[cid_out][sout] = false;
                            self.corner_slot_used[cid_in][sin] = false;
                        }
                    }
                }
            }
        }
    }

    /// Region-circle position of the crossing point of gate `g`, band slot
    /// `slot`, as seen from `side`. Slot order reverses across the band.
    fn gate_pos(&self, g: usize, side: u8, slot: usize) -> (usize, usize) {
        let b = self.cfg.bound;
        let r = self.pat.gates[g].sides[side as usize];
        let sub = if side == 0 { slot } else { b - 1 - slot };
        (r.region, r.item * b + sub)
    }

    /// Region-circle position of a corner point; `slot` indexes the
    /// gap-side order, which reverses on the region side.
    fn corner_pos(&self, gap: usize, corner: usize, slot: usize) -> (usize, usize) {
        let b = self.cfg.bound;
        let r = self.pat.gaps[gap].corners[corner];
        (r.region, r.item * b + (b - 1 - slot))
    }

    fn try_close(&mut self) {
        if self.cur_exit.0 != self.start_entry.0 {
            return;
        }
        let region = self.cur_exit.0;
        if !self.chord_ok(region, self.cur_exit.1, self.start_entry.1) {
            return;
        }
        let curve = NormalCurve { events: self.events.clone() };
        let key = curve.canonical_key();
        let w = if self.track { self.weight.clone() } else { self.event_weight() };
        self.results.entry(key).or_insert_with(|| (w.clone(), curve));
        if self.cfg.shrink_cap {
            let shrink = self.cap.as_ref().map_or(true, |c| &w < c);
            if shrink {
                self.cap = Some(w);
            }
        }
        if self.cfg.stop_after_first {
            self.done = true;
        }
    }

    fn extend(&mut self) {
        self.try_close();
        if self.done {
            return;
        }
        let b = self.cfg.bound;
        let (region, from_pos) = self.cur_exit;

        // Next event: cross a gate bordering this region.
        for idx in 0..self.region_gates[region].len() {
            let (g, side) = self.region_gates[region][idx];
            if (0, g) < self.start_key || self.gate_count[g] >= self.cfg.max_gate {
                continue;
            }
            let new_weight = if self.track {
                let w = &self.weight + &self.pat.gates[g].exterior;
                if let Some(cap) = &self.cap {
                    if self.over_cap(&w, cap) {
                        continue;
                    }
                }
                Some(w)
            } else {
                None
            };
            for slot in 0..b {
                if self.gate_slot_used[g][slot] {
                    continue;
                }
                let entry = self.gate_pos(g, side, slot);
                debug_assert_eq!(entry.0, region);
                if !self.chord_ok(region, from_pos, entry.1) {
                    continue;
                }
                let exit = self.gate_pos(g, 1 - side, slot);
                let saved_exit = self.cur_exit;
                let saved_weight = if self.track { Some(self.weight.clone()) } else { None };
                self.gate_slot_used[g][slot] = true;
                self.gate_count[g] += 1;
                self.region_chords[region].push((from_pos, entry.1));
                self.events.push(CurveEvent::Gate { gate: g, from_side: side });
                if let Some(w) = &new_weight {
                    self.weight = w.clone();
                }
                self.cur_exit = exit;
                self.extend();
                self.cur_exit = saved_exit;
                if let Some(w) = saved_weight {
                    self.weight = w;
                }
                self.events.pop();
                self.region_chords[region].pop();
                self.gate_count[g] -= 1;
                self.gate_slot_used[g][slot] = false;
                if self.done {
                    return;
                }
            }
        }

        if self.cfg.max_gap == 0 {
            return;
        }
        // Next event: enter a gap through one of this region's corners.
        let new_weight = if self.track {
            let w = &self.weight + rat_int(1);
            if let Some(cap) = &self.cap {
                if self.over_cap(&w, cap) {
                    return;
                }
            }
            Some(w)
        } else {
            None
        };
        for idx in 0..self.region_corners[region].len() {
            let (gap, cin, cid_in) = self.region_corners[region][idx];
            if (1, gap) < self.start_key || self.gap_count[gap] >= self.cfg.max_gap {
                continue;
            }
            let nc = self.pat.gaps[gap].corners.len();
            for sin in 0..b {
                if self.corner_slot_used[cid_in][sin] {
                    continue;
                }
                let entry = self.corner_pos(gap, cin, sin);
                debug_assert_eq!(entry.0, region);
                if !self.chord_ok(region, from_pos, entry.1) {
                    continue;
                }
                for cout in 0..nc {
                    if cout == cin {
                        continue;
                    }
                    let cid_out = self.corner_id[gap][cout];
                    for sout in 0..b {
                        if self.corner_slot_used[cid_out][sout] {
                            continue;
                        }
                        let gp_in = cin * b + sin;
                        let gp_out = cout * b + sout;
                        if !self.gap_chord_ok(gap, gp_in, gp_out) {
                            continue;
                        }
                        let exit = self.corner_pos(gap, cout, sout);
                        let saved_exit = self.cur_exit;
                        let saved_weight = if self.track { Some(self.weight.clone()) } else { None };
                        self.corner_slot_used[cid_in][sin] = true;
                        self.corner_slot_used[cid_out][sout] = true;
                        self.gap_count[gap] += 1;
                        self.gap_chords[gap].push((gp_in, gp_out));
                        self.region_chords[region].push((from_pos, entry.1));
                        self.events.push(CurveEvent::GapArc {
                            gap,
                            corner_in: cin,
                            corner_out: cout,
                        });
                        if let Some(w) = &new_weight {
                            self.weight = w.clone();
                        }
                        self.cur_exit = exit;
                        self.extend();
                        self.cur_exit = saved_exit;
                        if let Some(w) = saved_weight {
                            self.weight = w;
                        }
                        self.events.pop();
                        self.region_chords[region].pop();
                        self.gap_chords[gap].pop();
                        self.gap_count[gap] -= 1;
                        self.corner_slot_used[cid_out][sout] = false;
                        self.corner_slot_used[cid_in][sin] = false;
                        if self.done {
                            return;
                        }
                    }
                }
            }
        }
    }
}

/// All normal curves up to isotopy, sorted by (area, canonical key).
pub fn enumerate_normal_curves(pat: &SpherePattern) -> Vec<NormalCurve> {
    let cfg = SearchConfig {
        bound: 1,
        max_gate: 1,
        max_gap: 1,
        stop_after_first: false,
        shrink_cap: false,
        cap_inclusive: false,
    };
    let mut w = Walker::new(pat, cfg, None);
    w.run();
    let mut out: Vec<(Rat, Vec<(u8, usize, usize, usize)>, NormalCurve)> = w
        .results
        .into_iter()
        .map(|(k, (wt, c))| (wt, k, c))
        .collect();
    out.sort_by(|a, b| (&a.0, &a.1).cmp(&(&b.0, &b.1)));
    out.into_iter().map(|(_, _, c)| c).collect()
}

/// Global minimum of a(N) over normal curves, with a witness; None when
/// the pattern carries no normal curve at all.
pub fn min_normal_area(pat: &SpherePattern) -> Option<(AreaValue, NormalCurve)> {
    let cfg = SearchConfig {
        bound: 1,
        max_gate: 1,
        max_gap: 1,
        stop_after_first: false,
        shrink_cap: true,
        cap_inclusive: false,
    };
    let mut w = Walker::new(pat, cfg, None);
    w.run();
    w.results
        .into_iter()
        .map(|(_, (wt, c))| (AreaValue(wt - rat_int(2)), c))
        .min_by(|a, b| a.0 .0.cmp(&b.0 .0))
}

/// Closed admissible curves with per-gate and per-gap multiplicity at most
/// `bound` (1 or 2): conditions (ii)-(iv) plus embeddedness, with (v) and
/// (vi) relaxed to the bound.
pub fn enumerate_admissible_bounded(pat: &SpherePattern, bound: usize) -> Vec<NormalCurve> {
    assert!((1..=2).contains(&bound), "bound must be 1 or 2");
    let cfg = SearchConfig {
        bound,
        max_gate: bound,
        max_gap: bound,
        stop_after_first: false,
        shrink_cap: false,
        cap_inclusive: false,
    };
    let mut w = Walker::new(pat, cfg, None);
    w.run();
    let mut out: Vec<(Rat, Vec<(u8, usize, usize, usize)>, NormalCurve)> = w
        .results
        .into_iter()
        .map(|(k, (wt, c))| (wt, k, c))
        .collect();
    out.sort_by(|a, b| (&a.0, &a.1).cmp(&(&b.0, &b.1)));
    out.into_iter().map(|(_, _, c)| c).collect()
}

/// Curves violating the area law at multiplicity `bound`: area < 0, or
/// area = 0 without being normal. Any such curve has total weight at most
/// 2pi, so a capped search over the same admissible family is exhaustive
/// for violations without enumerating the (much larger) full curve list.
pub fn admissible_area_violations(
    pat: &SpherePattern,
    bound: usize,
) -> Vec<(AreaValue, NormalCurve)> {
    assert!((1..=2).contains(&bound), "bound must be 1 or 2");
    let cfg = SearchConfig {
        bound,
        max_gate: bound,
        max_gap: bound,
        stop_after_first: false,
        shrink_cap: false,
        cap_inclusive: true,
    };
    let mut w = Walker::new(pat, cfg, Some(rat_int(2)));
    w.run();
    let mut out: Vec<(AreaValue, Vec<(u8, usize, usize, usize)>, NormalCurve)> = w
        .results
        .into_iter()
        .filter_map(|(k, (wt, c))| {
            let area = AreaValue(wt - rat_int(2));
            if area.is_negative() || (area.is_zero() && !is_normal(pat, &c).is_empty()) {
                Some((area, k, c))
            } else {
                None
            }
        })
        .collect();
    out.sort_by(|a, b| (&a.0 .0, &a.1).cmp(&(&b.0 .0, &b.1)));
    out.into_iter().map(|(a, _, c)| (a, c)).collect()
}

/// Is there a normal curve of negative area? Only weights below 2pi can
/// give a < 0, so the search caps partial weights at 2pi.
fn find_negative_curve(pat: &SpherePattern) -> Option<(AreaValue, NormalCurve)> {
    let cfg = SearchConfig {
        bound: 1,
        max_gate: 1,
        max_gap: 1,
        stop_after_first: true,
        shrink_cap: false,
        cap_inclusive: false,
    };
    let mut w = Walker::new(pat, cfg, Some(rat_int(2)));
    w.run();
    w.results
        .into_iter()
        .map(|(_, (wt, c))| (AreaValue(wt - rat_int(2)), c))
        .next()
}

// ---------------------------------------------------------------------------
// Spine presentations

#[derive(Debug, Clone, Serialize)]
pub struct SpinePresentation {
    pub patterns: Vec<SpherePattern>,
    /// 2-handle groups of (pattern, gate) references.
    pub two_handles: Vec<Vec<(usize, usize)>>,
}

impl SpinePresentation {
    pub fn handle_interior_sum(&self, h: usize) -> Rat {
        self.two_handles[h]
            .iter()
            .fold(Rat::zero(), |acc, &(p, g)| acc + self.patterns[p].interior(g))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum SpineVerdict {
    Ok,
    NegativeCurve { pattern: usize, area: AreaValue, witness: NormalCurve },
    HandleSumViolation { handle: usize, sum: crate::angle::RatJson },
}

impl SpineVerdict {
    pub fn is_ok(&self) -> bool {
        matches!(self, SpineVerdict::Ok)
    }
}

/// Angled-spine test: every 2-handle's interior angles sum to exactly 2pi
/// and no pattern carries a normal curve of negative combinatorial area.
pub fn verify_angled_spine(pres: &SpinePresentation) -> SpineVerdict {
    for h in 0..pres.two_handles.len() {
        let sum = pres.handle_interior_sum(h);
        if sum != rat_int(2) {
            return SpineVerdict::HandleSumViolation { handle: h, sum: (&sum).into() };
        }
    }
    for (pi, pat) in pres.patterns.iter().enumerate() {
        if let Some((area, witness)) = find_negative_curve(pat) {
            return SpineVerdict::NegativeCurve { pattern: pi, area, witness };
        }
    }
    SpineVerdict::Ok
}

/// Builds the two 0-handle boundary patterns dual to a connected
/// alternating diagram: regions correspond to faces of G(D), gates to
/// edges (carrying the exterior angles), gaps to crossings. The top
/// pattern uses the diagram's rotation system, the bottom its mirror. The
/// 2-handle at each crossing collects the top gates of the two under-strand
/// ends and the bottom gates of the two over-strand ends.
pub fn build_sphere_patterns(
    diagram: &Diagram,
    edge_angles: &[Rat],
) -> Result<SpinePresentation, PatternError> {
    if !diagram.flags.connected {
        return Err(PatternError::DiagramHypothesisViolated("diagram not connected".into()));
    }
    if !diagram.flags.alternating {
        return Err(PatternError::DiagramHypothesisViolated("diagram not alternating".into()));
    }
    if diagram.vertex_count() < 2 {
        return Err(PatternError::DiagramHypothesisViolated(
            "diagram must have more than one crossing".into(),
        ));
    }
    if edge_angles.len() != diagram.edge_count() {
        return Err(PatternError::DiagramHypothesisViolated(format!(
            "expected {} edge angles, got {}",
            diagram.edge_count(),
            edge_angles.len()
        )));
    }

    let mut vertex_ends_top = Vec::with_capacity(diagram.vertex_count());
    for v in 0..diagram.vertex_count() {
        let mut ends = Vec::with_capacity(4);
        for s in 0..4u8 {
            let dart = Dart { vertex: v, slot: s };
            let e = diagram.edge_at(dart);
            let k = if diagram.edges[e].ends[0] == dart { 0 } else { 1 };
            ends.push((e, k));
        }
        vertex_ends_top.push(ends);
    }
    let vertex_ends_bottom: Vec<Vec<(usize, u8)>> = vertex_ends_top
        .iter()
        .map(|ends| {
            let mut rev = ends.clone();
            rev[1..].reverse();
            rev
        })
        .collect();

    let top = SpherePattern::from_rotation(&RotationMap {
        vertex_ends: vertex_ends_top,
        exteriors: edge_angles.to_vec(),
    })?;
    let bottom = SpherePattern::from_rotation(&RotationMap {
        vertex_ends: vertex_ends_bottom,
        exteriors: edge_angles.to_vec(),
    })?;

    let mut two_handles = Vec::with_capacity(diagram.vertex_count());
    for v in 0..diagram.vertex_count() {
        let mut group = Vec::with_capacity(4);
        for s in 0..4u8 {
            let dart = Dart { vertex: v, slot: s };
            let e = diagram.edge_at(dart);
            // Gates of both patterns are indexed by diagram edge.
            group.push(if dart.is_under() { (0, e) } else { (1, e) });
        }
        two_handles.push(group);
    }
    Ok(SpinePresentation { patterns: vec![top, bottom], two_handles })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum Prop53Verdict {
    Ok,
    NotReduced { crossing: usize },
    VertexSum { crossing: usize, sum: crate::angle::RatJson },
    SmallCurve { total: crate::angle::RatJson, witness: NormalCurve },
}

impl Prop53Verdict {
    pub fn is_ok(&self) -> bool {
        matches!(self, Prop53Verdict::Ok)
    }
}

/// The fast angled-spine test for diagram spines: (i) the diagram is
/// reduced, (ii) the exterior angles around every crossing sum to 2pi,
/// (iii) every embedded closed curve crossing each edge at most once has
/// total exterior angle at least 2pi. The verdict agrees with
/// [`verify_angled_spine`] on the built presentation.
pub fn check_prop53(diagram: &Diagram, edge_angles: &[Rat]) -> Result<Prop53Verdict, PatternError> {
    if !diagram.flags.connected || !diagram.flags.alternating {
        return Err(PatternError::DiagramHypothesisViolated(
            "prop53 check needs a connected alternating diagram".into(),
        ));
    }
    if edge_angles.len() != diagram.edge_count() {
        return Err(PatternError::DiagramHypothesisViolated(format!(
            "expected {} edge angles, got {}",
            diagram.edge_count(),
            edge_angles.len()
        )));
    }
    for (e, x) in edge_angles.iter().enumerate() {
        if !x.is_positive() || *x >= rat_int(1) {
            return Err(PatternError::AngleOutOfRange { edge: e, value: x.to_string() });
        }
    }
    if let Some(c) = diagram.witness.non_reduced_crossing {
        return Ok(Prop53Verdict::NotReduced { crossing: c });
    }
    if !diagram.flags.reduced {
        return Ok(Prop53Verdict::NotReduced { crossing: 0 });
    }
    for v in 0..diagram.vertex_count() {
        let sum: Rat = (0..4u8)
            .map(|s| edge_angles[diagram.edge_at(Dart { vertex: v, slot: s })].clone())
            .fold(Rat::zero(), |a, b| a + b);
        if sum != rat_int(2) {
            return Ok(Prop53Verdict::VertexSum { crossing: v, sum: (&sum).into() });
        }
    }
    // Hunt a violating curve on the plane map of G(D): gates only, each at
    // most once, partial sums capped at 2pi.
    let pres = build_sphere_patterns(diagram, edge_angles)?;
    let cfg = SearchConfig {
        bound: 1,
        max_gate: 1,
        max_gap: 0,
        stop_after_first: true,
        shrink_cap: false,
        cap_inclusive: false,
    };
    let mut w = Walker::new(&pres.patterns[0], cfg, Some(rat_int(2)));
    w.run();
    if let Some((_, (wt, c))) = w.results.into_iter().next() {
        // Checkerboard parity: a closed curve crosses evenly many edges.
        debug_assert!(c.gate_count() % 2 == 0);
        return Ok(Prop53Verdict::SmallCurve { total: (&wt).into(), witness: c });
    }
    Ok(Prop53Verdict::Ok)
}

/// The boundary pattern of a single ideal tetrahedron: 4 regions (faces),
/// 6 gates (edges), 4 gaps (vertices). `angles` are the interior dihedral
/// angles of the opposite-edge pairs {01|23}, {02|13}, {03|12} in units of
/// pi; each gate's exterior angle is pi minus its pair's angle.
pub fn tetrahedron_pattern(angles: &[Rat; 3]) -> Result<SpherePattern, PatternError> {
    // Edge order: 01, 02, 03, 12, 13, 23; pair index of edge {i,j} equals
    // pair index of its opposite.
    const EDGES: [(usize, usize); 6] = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];
    const PAIR: [usize; 6] = [0, 1, 2, 2, 1, 0];
    let exteriors: Vec<Rat> = (0..6).map(|e| rat_int(1) - &angles[PAIR[e]]).collect();
    // Plane rotation system of the tetrahedron skeleton: vertices 1, 2, 3
    // around a central vertex 0.
    let neighbor_order: [[usize; 3]; 4] = [[1, 2, 3], [0, 3, 2], [0, 1, 3], [0, 2, 1]];
    let mut vertex_ends = Vec::new();
    for (v, nbrs) in neighbor_order.iter().enumerate() {
        let mut ends = Vec::new();
        for &u in nbrs {
            let (a, b) = (v.min(u), v.max(u));
            let e = EDGES.iter().position(|&p| p == (a, b)).unwrap();
            ends.push((e, if v == a { 0u8 } else { 1u8 }));
        }
        vertex_ends.push(ends);
    }
    SpherePattern::from_rotation(&RotationMap { vertex_ends, exteriors })
}

/// Index of the opposite-edge pair of tetrahedron edge {i,j}.
pub fn tet_edge_pair(i: usize, j: usize) -> usize {
    match (i.min(j), i.max(j)) {
        (0, 1) | (2, 3) => 0,
        (0, 2) | (1, 3) => 1,
        (0, 3) | (1, 2) => 2,
        _ => panic!("not a tetrahedron edge"),
    }
}

/// Gate index of tetrahedron edge {i,j} in `tetrahedron_pattern` order.
pub fn tet_edge_index(i: usize, j: usize) -> usize {
    match (i.min(j), i.max(j)) {
        (0, 1) => 0,
        (0, 2) => 1,
        (0, 3) => 2,
        (1, 2) => 3,
        (1, 3) => 4,
        (2, 3) => 5,
        _ => panic!("not a tetrahedron edge"),
    }
}
