//! Ideal triangulations: gluing data, exact angle structures, cusp
//! triangulations and the combinatorial slope-length lower bound.
//!
//! Gluing files are plain text: the first non-comment line is the
//! tetrahedron count, then one line per glued face pair,
//!
//! ```text
//! t f  t' f'  PERM
//! ```
//!
//! where faces are numbered by their opposite vertex and PERM is a
//! 4-character vertex permutation mapping tet t into tet t' (so PERM[f] =
//! f'). Every face must be glued; each pairing may be listed from either
//! side or both (consistently). All permutations must be odd, which makes
//! the glued manifold oriented.

use crate::angle::{rat_int, Rat};
use crate::exact::{simplex_max, solve, LpResult};
use crate::pattern::{
    curve_area, is_normal, tet_edge_index, tet_edge_pair, tetrahedron_pattern, CurveEvent, Item,
    NormalCurve, SpherePattern, SpinePresentation,
};
use num_traits::{Signed, Zero};
use serde::Serialize;
use std::collections::{BTreeMap, BinaryHeap};

#[derive(Debug, Clone)]
pub struct GluingData {
    pub tet_count: usize,
    /// gluings[t][f] = (t', f', perm) with perm[f] = f'.
    pub gluings: Vec<[(usize, usize, [u8; 4]); 4]>,
}

#[derive(Debug, Clone, thiserror::Error, PartialEq, Eq)]
pub enum TriError {
    #[error("malformed triangulation data: {0}")]
    Malformed(String),
    #[error("bad permutation `{0}`")]
    BadPermutation(String),
    #[error("face ({tet}, {face}) is not glued consistently to exactly one partner")]
    UnpairedFace { tet: usize, face: usize },
    #[error("gluing of ({tet}, {face}) is orientation inconsistent")]
    OrientationInconsistent { tet: usize, face: usize },
    #[error("vertex sums violated at tetrahedron vertex {vertex}")]
    VertexSumViolation { vertex: usize },
    #[error("cusp {cusp} is not a torus: Euler characteristic {chi}")]
    NonTorusLink { cusp: usize, chi: i64 },
}

/// Angles (a, b, c) per tetrahedron for the opposite-edge pairs
/// {01|23}, {02|13}, {03|12}, in units of pi.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AngleAssignment {
    pub tets: Vec<[crate::angle::RatJson; 3]>,
}

impl AngleAssignment {
    pub fn new(tets: Vec<[Rat; 3]>) -> AngleAssignment {
        AngleAssignment {
            tets: tets
                .into_iter()
                .map(|t| [(&t[0]).into(), (&t[1]).into(), (&t[2]).into()])
                .collect(),
        }
    }

    pub fn angle(&self, tet: usize, pair: usize) -> &Rat {
        &self.tets[tet][pair].0
    }

    /// Dihedral angle of tet edge {i, j}.
    pub fn edge_angle(&self, tet: usize, i: usize, j: usize) -> &Rat {
        self.angle(tet, tet_edge_pair(i, j))
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct EdgeClass {
    /// (tet, (i, j)) incidences with i < j; degree is the length.
    pub incidences: Vec<(usize, (usize, usize))>,
}

pub fn parse_triangulation(text: &str) -> Result<GluingData, TriError> {
    let mut lines = text
        .lines()
        .map(|l| l.split('#').next().unwrap_or("").trim())
        .filter(|l| !l.is_empty());
    let tet_count: usize = lines
        .next()
        .ok_or_else(|| TriError::Malformed("empty file".into()))?
        .parse()
        .map_err(|_| TriError::Malformed("first line must be the tetrahedron count".into()))?;
    if tet_count == 0 {
        return Err(TriError::Malformed("tetrahedron count is zero".into()));
    }
    let mut glue: Vec<[Option<(usize, usize, [u8; 4])>; 4]> = vec![[None; 4]; tet_count];
    for line in lines {
        let tok: Vec<&str> = line.split_whitespace().collect();
        if tok.len() != 5 {
            return Err(TriError::Malformed(format!("bad line `{line}`")));
        }
        let t: usize = tok[0].parse().map_err(|_| TriError::Malformed(line.into()))?;
        let f: usize = tok[1].parse().map_err(|_| TriError::Malformed(line.into()))?;
        let t2: usize = tok[2].parse().map_err(|_| TriError::Malformed(line.into()))?;
        let f2: usize = tok[3].parse().map_err(|_| TriError::Malformed(line.into()))?;
        if t >= tet_count || t2 >= tet_count || f > 3 || f2 > 3 {
            return Err(TriError::Malformed(format!("indices out of range in `{line}`")));
        }
        let ps = tok[4];
        if ps.len() != 4 {
            return Err(TriError::BadPermutation(ps.into()));
        }
        let mut perm = [0u8; 4];
        let mut seen = [false; 4];
        for (i, ch) in ps.chars().enumerate() {
            let v = ch.to_digit(10).ok_or_else(|| TriError::BadPermutation(ps.into()))? as usize;
            if v > 3 || seen[v] {
                return Err(TriError::BadPermutation(ps.into()));
            }
            seen[v] = true;
            perm[i] = v as u8;
        }
        if perm[f] as usize != f2 {
            return Err(TriError::BadPermutation(format!(
                "{ps} does not map face {f} to face {f2}"
            )));
        }
        let entry = (t2, f2, perm);
        match &glue[t][f] {
            None => glue[t][f] = Some(entry),
            Some(prev) if *prev == entry => {}
            Some(_) => return Err(TriError::UnpairedFace { tet: t, face: f }),
        }
        // Record the inverse pairing; tolerate it being listed explicitly.
        let mut inv = [0u8; 4];
        for i in 0..4 {
            inv[perm[i] as usize] = i as u8;
        }
        let back = (t, f, inv);
        match &glue[t2][f2] {
            None => glue[t2][f2] = Some(back),
            Some(prev) if *prev == back => {}
            Some(_) => return Err(TriError::UnpairedFace { tet: t2, face: f2 }),
        }
    }
    let mut gluings = Vec::with_capacity(tet_count);
    for (t, faces) in glue.into_iter().enumerate() {
        let mut row = [(0usize, 0usize, [0u8; 4]); 4];
        for (f, g) in faces.into_iter().enumerate() {
            let g = g.ok_or(TriError::UnpairedFace { tet: t, face: f })?;
            if !is_odd_perm(&g.2) {
                return Err(TriError::OrientationInconsistent { tet: t, face: f });
            }
            row[f] = g;
        }
        gluings.push(row);
    }
    Ok(GluingData { tet_count, gluings })
}

fn is_odd_perm(p: &[u8; 4]) -> bool {
    let mut inv = 0;
    for i in 0..4 {
        for j in i + 1..4 {
            if p[i] > p[j] {
                inv += 1;
            }
        }
    }
    inv % 2 == 1
}

impl GluingData {
    /// Edge classes: orbits of tetrahedron edges under the face gluings,
    /// ordered by their least incidence.
    pub fn edge_classes(&self) -> Vec<EdgeClass> {
        let idx = |t: usize, i: usize, j: usize| t * 6 + tet_edge_index(i, j);
        let mut parent: Vec<usize> = (0..self.tet_count * 6).collect();
        fn find(p: &mut Vec<usize>, x: usize) -> usize {
            if p[x] != x {
                let r = find(p, p[x]);
                p[x] = r;
            }
            p[x]
        }
        for t in 0..self.tet_count {
            for f in 0..4 {
                let (t2, _, perm) = self.gluings[t][f];
                let verts: Vec<usize> = (0..4).filter(|&v| v != f).collect();
                for a in 0..3 {
                    for b in a + 1..3 {
                        let (i, j) = (verts[a], verts[b]);
                        let (i2, j2) = (perm[i] as usize, perm[j] as usize);
                        let (x, y) = (find(&mut parent, idx(t, i, j)), find(&mut parent, idx(t2, i2, j2)));
                        parent[x] = y;
                    }
                }
            }
        }
        let mut classes: BTreeMap<usize, Vec<(usize, (usize, usize))>> = BTreeMap::new();
        const EDGES: [(usize, usize); 6] = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];
        for t in 0..self.tet_count {
            for (e, &(i, j)) in EDGES.iter().enumerate() {
                let root = find(&mut parent, t * 6 + e);
                classes.entry(root).or_default().push((t, (i, j)));
            }
        }
        classes.into_values().map(|incidences| EdgeClass { incidences }).collect()
    }

    /// Ideal vertex classes as (tet, vertex) orbit lists.
    pub fn vertex_classes(&self) -> Vec<Vec<(usize, usize)>> {
        let mut parent: Vec<usize> = (0..self.tet_count * 4).collect();
        fn find(p: &mut Vec<usize>, x: usize) -> usize {
            if p[x] != x {
                let r = find(p, p[x]);
                p[x] = r;
            }
            p[x]
        }
        for t in 0..self.tet_count {
            for f in 0..4 {
                let (t2, _, perm) = self.gluings[t][f];
                for v in 0..4 {
                    if v == f {
                        continue;
                    }
                    let (x, y) = (
                        find(&mut parent, t * 4 + v),
                        find(&mut parent, t2 * 4 + perm[v] as usize),
                    );
                    parent[x] = y;
                }
            }
        }
        let mut classes: BTreeMap<usize, Vec<(usize, usize)>> = BTreeMap::new();
        for t in 0..self.tet_count {
            for v in 0..4 {
                let root = find(&mut parent, t * 4 + v);
                classes.entry(root).or_default().push((t, v));
            }
        }
        classes.into_values().collect()
    }
}

/// Recovers (a, b, c) from six per-edge angles of one tetrahedron. The
/// four vertex sums (= 1 each) force opposite edges to carry equal angles.
/// Input order: 01, 02, 03, 12, 13, 23.
pub fn reduce_six_angles(six: &[Rat; 6]) -> Result<(Rat, Rat, Rat), TriError> {
    // Edges incident to each vertex, in the order above.
    const AT_VERTEX: [[usize; 3]; 4] = [[0, 1, 2], [0, 3, 4], [1, 3, 5], [2, 4, 5]];
    for (v, edges) in AT_VERTEX.iter().enumerate() {
        let sum: Rat = edges.iter().map(|&e| six[e].clone()).fold(Rat::zero(), |a, b| a + b);
        if sum != rat_int(1) {
            return Err(TriError::VertexSumViolation { vertex: v });
        }
    }
    // Opposite pairs: (01,23), (02,13), (03,12).
    assert_eq!(six[0], six[5]);
    assert_eq!(six[1], six[4]);
    assert_eq!(six[2], six[3]);
    Ok((six[0].clone(), six[1].clone(), six[2].clone()))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum AngleViolation {
    TetSum { tet: usize, sum: crate::angle::RatJson },
    AngleRange { tet: usize, pair: usize },
    EdgeClassSum { class: usize, total: crate::angle::RatJson },
}

/// Exact angle-structure test: per-tet sums 1, angles in (0,1), per-class
/// totals 2, all in units of pi.
pub fn verify_angles(gluing: &GluingData, angles: &AngleAssignment) -> Vec<AngleViolation> {
    let mut out = Vec::new();
    if angles.tets.len() != gluing.tet_count {
        out.push(AngleViolation::TetSum { tet: usize::MAX, sum: (&rat_int(0)).into() });
        return out;
    }
    for t in 0..gluing.tet_count {
        for pair in 0..3 {
            let a = angles.angle(t, pair);
            if !a.is_positive() || *a >= rat_int(1) {
                out.push(AngleViolation::AngleRange { tet: t, pair });
            }
        }
        let sum = angles.angle(t, 0) + angles.angle(t, 1) + angles.angle(t, 2);
        if sum != rat_int(1) {
            out.push(AngleViolation::TetSum { tet: t, sum: (&sum).into() });
        }
    }
    for (ci, class) in gluing.edge_classes().iter().enumerate() {
        let total: Rat = class
            .incidences
            .iter()
            .map(|&(t, (i, j))| angles.edge_angle(t, i, j).clone())
            .fold(Rat::zero(), |a, b| a + b);
        if total != rat_int(2) {
            out.push(AngleViolation::EdgeClassSum { class: ci, total: (&total).into() });
        }
    }
    out
}

/// Solves for a strictly interior angle structure by maximizing the
/// minimum slack with an exact rational LP. Returns None when no interior
/// structure exists (t* <= 0 or infeasible).
pub fn solve_angle_structure(gluing: &GluingData) -> Option<AngleAssignment> {
    let nt = gluing.tet_count;
    let classes = gluing.edge_classes();
    // Variables: x[0..3nt] angles, x[3nt] = t, then slacks s (3nt) for
    // x_i - t - s_i = 0 and u (3nt) for x_i + t + u_i = 1.
    let nx = 3 * nt;
    let tv = nx;
    let total = nx + 1 + 3 * nt + 3 * nt;
    let mut a: Vec<Vec<Rat>> = Vec::new();
    let mut b: Vec<Rat> = Vec::new();
    for i in 0..nx {
        let mut row = vec![Rat::zero(); total];
        row[i] = rat_int(1);
        row[tv] = rat_int(-1);
        row[nx + 1 + i] = rat_int(-1);
        a.push(row);
        b.push(Rat::zero());
        let mut row = vec![Rat::zero(); total];
        row[i] = rat_int(1);
        row[tv] = rat_int(1);
        row[nx + 1 + 3 * nt + i] = rat_int(1);
        a.push(row);
        b.push(rat_int(1));
    }
    for t in 0..nt {
        let mut row = vec![Rat::zero(); total];
        for pair in 0..3 {
            row[3 * t + pair] = rat_int(1);
        }
        a.push(row);
        b.push(rat_int(1));
    }
    for class in &classes {
        let mut row = vec![Rat::zero(); total];
        for &(t, (i, j)) in &class.incidences {
            row[3 * t + tet_edge_pair(i, j)] += rat_int(1);
        }
        a.push(row);
        b.push(rat_int(2));
    }
    let mut c = vec![Rat::zero(); total];
    c[tv] = rat_int(1);
    match simplex_max(&a, &b, &c) {
        LpResult::Optimal { value, point } if value.is_positive() => {
            let tets: Vec<[Rat; 3]> = (0..nt)
                .map(|t| {
                    [
                        point[3 * t].clone(),
                        point[3 * t + 1].clone(),
                        point[3 * t + 2].clone(),
                    ]
                })
                .collect();
            let out = AngleAssignment::new(tets);
            debug_assert!(verify_angles(gluing, &out).is_empty());
            Some(out)
        }
        _ => None,
    }
}

// ---------------------------------------------------------------------------
// Cusp triangulations

/// One triangle of a cusp cross-section: the vertex link of `vertex` in
/// `tet`. Corner k sits on tet edge {vertex, other[k]}; side k is cut out
/// by tet face `other[k]` and joins the two corners with index != k.
#[derive(Debug, Clone, Serialize)]
pub struct CuspTriangle {
    pub tet: usize,
    pub vertex: usize,
    /// The three other tet vertices, ascending.
    pub other: [usize; 3],
    /// Corner angles in units of pi, indexed like `other`.
    pub corner_angles: [crate::angle::RatJson; 3],
}

#[derive(Debug, Clone, Serialize)]
pub struct CuspEdge {
    /// The (triangle, side) occurrences glued into this edge.
    pub sides: [(usize, usize); 2],
    /// Endpoints in the cusp 1-skeleton (corner-class ids).
    pub ends: (usize, usize),
    #[serde(serialize_with = "crate::angle::serialize_rat")]
    pub length: Rat,
    /// Homology cocycle weights on the reference direction ends.0->ends.1.
    pub weights: [crate::angle::RatJson; 2],
}

/// A step of a walk: edge index and direction (+1 along ends.0->ends.1).
pub type WalkStep = (usize, i8);

#[derive(Debug, Clone, Serialize)]
pub struct CuspTriangulation {
    pub cusp: usize,
    pub triangles: Vec<CuspTriangle>,
    pub edges: Vec<CuspEdge>,
    pub vertex_count: usize,
    /// Root vertex of the spanning tree and two closed walks through it
    /// realizing the homology basis (signatures (1,0) and (0,1)).
    pub root: usize,
    pub basis_loops: [Vec<WalkStep>; 2],
}

impl CuspTriangulation {
    pub fn euler_characteristic(&self) -> i64 {
        self.vertex_count as i64 - self.edges.len() as i64 + self.triangles.len() as i64
    }

    pub fn min_edge_length(&self) -> Rat {
        self.edges.iter().map(|e| e.length.clone()).min().unwrap()
    }

    pub fn max_weight(&self) -> Rat {
        self.edges
            .iter()
            .flat_map(|e| e.weights.iter().map(|w| w.0.abs()))
            .max()
            .unwrap()
    }

    /// Cocycle signature of a closed walk.
    pub fn walk_signature(&self, walk: &[WalkStep]) -> (Rat, Rat) {
        let mut s = (Rat::zero(), Rat::zero());
        for &(e, dir) in walk {
            let d = rat_int(dir as i64);
            s.0 += &d * &self.edges[e].weights[0].0;
            s.1 += &d * &self.edges[e].weights[1].0;
        }
        s
    }

    pub fn walk_length(&self, walk: &[WalkStep]) -> Rat {
        walk.iter().map(|&(e, _)| self.edges[e].length.clone()).fold(Rat::zero(), |a, b| a + b)
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).unwrap()
    }
}

/// Builds one cusp triangulation per ideal-vertex class. Requires a
/// verified angle assignment; every cusp must be a torus.
pub fn cusp_triangulation(
    gluing: &GluingData,
    angles: &AngleAssignment,
) -> Result<Vec<CuspTriangulation>, TriError> {
    assert!(verify_angles(gluing, angles).is_empty(), "angle assignment must verify");
    let vclasses = gluing.vertex_classes();
    let mut out = Vec::new();
    for (cusp, class) in vclasses.iter().enumerate() {
        out.push(build_cusp(gluing, angles, cusp, class)?);
    }
    Ok(out)
}

fn build_cusp(
    gluing: &GluingData,
    angles: &AngleAssignment,
    cusp: usize,
    members: &[(usize, usize)],
) -> Result<CuspTriangulation, TriError> {
    let tri_id: BTreeMap<(usize, usize), usize> =
        members.iter().enumerate().map(|(i, &m)| (m, i)).collect();
    let mut triangles = Vec::new();
    for &(t, v) in members {
        let other: Vec<usize> = (0..4).filter(|&x| x != v).collect();
        let other: [usize; 3] = [other[0], other[1], other[2]];
        let corner_angles = [
            angles.edge_angle(t, v, other[0]).into(),
            angles.edge_angle(t, v, other[1]).into(),
            angles.edge_angle(t, v, other[2]).into(),
        ];
        triangles.push(CuspTriangle { tet: t, vertex: v, other, corner_angles });
    }

    // A side of triangle (t, v) cut by face f != v is glued via the face
    // gluing to the side of (t', perm[v]) cut by f'.
    let side_partner = |tri: usize, k: usize| -> (usize, usize) {
        let tr = &triangles[tri];
        let f = tr.other[k];
        let (t2, f2, perm) = gluing.gluings[tr.tet][f];
        let v2 = perm[tr.vertex] as usize;
        let tri2 = tri_id[&(t2, v2)];
        let k2 = triangles[tri2].other.iter().position(|&x| x == f2).unwrap();
        (tri2, k2)
    };

    // Edges: orbits (pairs) of sides under the involution.
    let mut side_edge: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    let mut edge_sides: Vec<[(usize, usize); 2]> = Vec::new();
    for tri in 0..triangles.len() {
        for k in 0..3 {
            if side_edge.contains_key(&(tri, k)) {
                continue;
            }
            let p = side_partner(tri, k);
            let id = edge_sides.len();
            side_edge.insert((tri, k), id);
            side_edge.insert(p, id);
            edge_sides.push([(tri, k), p]);
        }
    }

    // Cusp vertices: corner classes. Corner (tri, c) lies on tet edge
    // {vertex, other[c]} and is shared across the two sides k != c.
    let ncorner = 3 * triangles.len();
    let mut parent: Vec<usize> = (0..ncorner).collect();
    fn find(p: &mut Vec<usize>, x: usize) -> usize {
        if p[x] != x {
            let r = find(p, p[x]);
            p[x] = r;
        }
        p[x]
    }
    for tri in 0..triangles.len() {
        for k in 0..3 {
            let (tri2, k2) = side_partner(tri, k);
            let tr = &triangles[tri];
            let f = tr.other[k];
            let (_, _, perm) = gluing.gluings[tr.tet][f];
            for c in 0..3 {
                if c == k {
                    continue;
                }
                let x2 = perm[tr.other[c]] as usize;
                let c2 = triangles[tri2].other.iter().position(|&x| x == x2).unwrap();
                debug_assert_ne!(c2, k2);
                let (a, b) = (find(&mut parent, tri * 3 + c), find(&mut parent, tri2 * 3 + c2));
                parent[a] = b;
            }
        }
    }
    let mut vmap: BTreeMap<usize, usize> = BTreeMap::new();
    let mut corner_class = vec![0usize; ncorner];
    for c in 0..ncorner {
        let r = find(&mut parent, c);
        let n = vmap.len();
        let id = *vmap.entry(r).or_insert(n);
        corner_class[c] = id;
    }
    let vertex_count = vmap.len();

    let chi = vertex_count as i64 - edge_sides.len() as i64 + triangles.len() as i64;
    if chi != 0 {
        return Err(TriError::NonTorusLink { cusp, chi });
    }

    // Assemble edges with endpoints and lengths.
    let mut edges = Vec::new();
    for sides in &edge_sides {
        let (tri, k) = sides[0];
        let cs: Vec<usize> = (0..3).filter(|&c| c != k).collect();
        let ends = (corner_class[tri * 3 + cs[0]], corner_class[tri * 3 + cs[1]]);
        // min of the six corner angles of the two incident triangles, / 2.
        let mut six = Vec::new();
        for &(tr, _) in sides {
            for c in 0..3 {
                six.push(triangles[tr].corner_angles[c].0.clone());
            }
        }
        let length = six.into_iter().min().unwrap() / rat_int(2);
        edges.push(CuspEdge { sides: *sides, ends, length, weights: [(&Rat::zero()).into(), (&Rat::zero()).into()] });
    }

    let (root, basis_loops) = homology_basis(&corner_class, vertex_count, &mut edges)?;

    Ok(CuspTriangulation { cusp, triangles, edges, vertex_count, root, basis_loops })
}

/// Builds the homology basis: a spanning tree of the 1-skeleton, a cotree
/// in the dual, the two leftover edges' fundamental loops through the
/// root, and closed rational cocycles c1, c2 with c_i(loop_j) = delta_ij.
/// Writes the cocycle weights into the edges.
fn homology_basis(
    corner_class: &[usize],
    vertex_count: usize,
    edge_list: &mut Vec<CuspEdge>,
) -> Result<(usize, [Vec<WalkStep>; 2]), TriError> {
    let ne = edge_list.len();
    let nf = 2 * ne / 3;
    // Spanning tree of the 1-skeleton.
    let mut adj: Vec<Vec<(usize, usize)>> = vec![Vec::new(); vertex_count]; // (edge, other end)
    for (ei, e) in edge_list.iter().enumerate() {
        adj[e.ends.0].push((ei, e.ends.1));
        adj[e.ends.1].push((ei, e.ends.0));
    }
    let root = 0usize;
    let mut tree_edge = vec![false; ne];
    let mut parent_edge: Vec<Option<(usize, i8)>> = vec![None; vertex_count]; // step toward root
    let mut seen = vec![false; vertex_count];
    let mut queue = std::collections::VecDeque::from([root]);
    seen[root] = true;
    while let Some(v) = queue.pop_front() {
        for &(ei, u) in &adj[v] {
            if !seen[u] {
                seen[u] = true;
                tree_edge[ei] = true;
                // Direction of the step u -> v.
                let dir = if edge_list[ei].ends == (u, v) { 1 } else { -1 };
                parent_edge[u] = Some((ei, dir));
                queue.push_back(u);
            }
        }
    }
    if seen.iter().any(|s| !s) {
        return Err(TriError::Malformed("cusp 1-skeleton is disconnected".into()));
    }

    // Face boundaries as directed edge lists (+1 = along ends.0->ends.1).
    let mut face_boundary: Vec<Vec<(usize, i8)>> = Vec::with_capacity(nf);
    let side_edge: BTreeMap<(usize, usize), usize> = edge_list
        .iter()
        .enumerate()
        .flat_map(|(ei, e)| e.sides.iter().map(move |&s| (s, ei)))
        .collect();
    for tri in 0..nf {
        // Boundary cycle corner 0 -> 1 -> 2 -> 0; side k joins the two
        // corners != k.
        let mut cyc = Vec::new();
        for (a, b, k) in [(0usize, 1usize, 2usize), (1, 2, 0), (2, 0, 1)] {
            let ei = side_edge[&(tri, k)];
            let (u, v) = (corner_class[tri * 3 + a], corner_class[tri * 3 + b]);
            let dir = if edge_list[ei].ends == (u, v) {
                1
            } else {
                debug_assert_eq!(edge_list[ei].ends, (v, u));
                -1
            };
            cyc.push((ei, dir));
        }
        face_boundary.push(cyc);
    }

    // Cotree in the dual graph on faces, using only non-tree edges.
    let mut cotree_edge = vec![false; ne];
    let mut fseen = vec![false; nf];
    let mut fqueue = std::collections::VecDeque::from([0usize]);
    fseen[0] = true;
    let edge_faces: Vec<[usize; 2]> = edge_list.iter().map(|e| [e.sides[0].0, e.sides[1].0]).collect();
    while let Some(f) = fqueue.pop_front() {
        for (ei, faces) in edge_faces.iter().enumerate() {
            if tree_edge[ei] || cotree_edge[ei] || !faces.contains(&f) {
                continue;
            }
            let g = if faces[0] == f { faces[1] } else { faces[0] };
            if !fseen[g] {
                fseen[g] = true;
                cotree_edge[ei] = true;
                fqueue.push_back(g);
            }
        }
    }
    let leftover: Vec<usize> = (0..ne).filter(|&e| !tree_edge[e] && !cotree_edge[e]).collect();
    if leftover.len() != 2 {
        return Err(TriError::Malformed(format!(
            "tree-cotree leftover count {} != 2",
            leftover.len()
        )));
    }

    // Fundamental loops through the root.
    let path_to_root = |mut v: usize| -> Vec<(usize, i8)> {
        let mut steps = Vec::new();
        while v != root {
            let (ei, dir) = parent_edge[v].unwrap();
            steps.push((ei, dir));
            let e = &edge_list[ei];
            v = if dir == 1 { e.ends.1 } else { e.ends.0 };
        }
        steps
    };
    let mut loops = Vec::new();
    for &le in &leftover {
        let (u, v) = edge_list[le].ends;
        // root -> u, edge u->v, v -> root.
        let mut walk: Vec<(usize, i8)> =
            path_to_root(u).into_iter().rev().map(|(e, d)| (e, -d)).collect();
        walk.push((le, 1));
        walk.extend(path_to_root(v));
        loops.push(walk);
    }

    // Solve for closed cocycles with c_i(loop_j) = delta_ij.
    let mut rows: Vec<Vec<Rat>> = Vec::new();
    let mut rhs1: Vec<Rat> = Vec::new();
    let mut rhs2: Vec<Rat> = Vec::new();
    for cyc in &face_boundary {
        let mut row = vec![Rat::zero(); ne];
        for &(e, d) in cyc {
            row[e] += rat_int(d as i64);
        }
        rows.push(row);
        rhs1.push(Rat::zero());
        rhs2.push(Rat::zero());
    }
    for (j, walk) in loops.iter().enumerate() {
        let mut row = vec![Rat::zero(); ne];
        for &(e, d) in walk {
            row[e] += rat_int(d as i64);
        }
        rows.push(row);
        rhs1.push(if j == 0 { rat_int(1) } else { Rat::zero() });
        rhs2.push(if j == 1 { rat_int(1) } else { Rat::zero() });
    }
    let c1 = solve(&rows, &rhs1)
        .ok_or_else(|| TriError::Malformed("cocycle system unsolvable".into()))?;
    let c2 = solve(&rows, &rhs2)
        .ok_or_else(|| TriError::Malformed("cocycle system unsolvable".into()))?;
    for (ei, e) in edge_list.iter_mut().enumerate() {
        e.weights = [(&c1[ei]).into(), (&c2[ei]).into()];
    }
    Ok((root, [loops.remove(0), loops.remove(0)]))
}

// ---------------------------------------------------------------------------
// Slope length bounds

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct SlopeClass {
    pub p: i64,
    pub q: i64,
}

impl SlopeClass {
    pub fn new(p: i64, q: i64) -> SlopeClass {
        assert!((p, q) != (0, 0), "slope (0,0) is not a slope");
        assert_eq!(gcd(p.unsigned_abs(), q.unsigned_abs()), 1, "slope must be primitive");
        // (p, q) and (-p, -q) are the same class; normalize.
        if p < 0 || (p == 0 && q < 0) {
            SlopeClass { p: -p, q: -q }
        } else {
            SlopeClass { p, q }
        }
    }
}

pub fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct LengthBound {
    pub slope: SlopeClass,
    #[serde(serialize_with = "crate::angle::serialize_rat")]
    pub lower_bound: Rat,
    pub witness_walk: Vec<WalkStep>,
}

/// Minimum total edge length of a closed walk in the cusp 1-skeleton with
/// cocycle signature (p, q): Dijkstra in the Z^2-cover from every start
/// vertex, pruned by an initial upper bound from the basis loops and by
/// the signature-distance potential eps_min * |remaining| / w_max.
pub fn slope_length_bound(cusp: &CuspTriangulation, slope: SlopeClass) -> LengthBound {
    let target = (rat_int(slope.p), rat_int(slope.q));
    let eps_min = cusp.min_edge_length();
    let w_max = cusp.max_weight();
    assert!(w_max.is_positive(), "cocycle weights are all zero");

    // Upper bound: |p| copies of basis loop 1 then |q| of loop 2, both
    // closed at the root.
    let mut upper = Rat::zero();
    let mut witness: Vec<WalkStep> = Vec::new();
    for (i, n) in [(0usize, slope.p), (1, slope.q)] {
        let l = &cusp.basis_loops[i];
        let len = cusp.walk_length(l);
        for _ in 0..n.unsigned_abs() {
            upper += &len;
            if n >= 0 {
                witness.extend(l.iter().copied());
            } else {
                witness.extend(l.iter().rev().map(|&(e, d)| (e, -d)));
            }
        }
    }
    debug_assert_eq!(cusp.walk_signature(&witness), target);

    let mut adj: Vec<Vec<(usize, i8, usize)>> = vec![Vec::new(); cusp.vertex_count];
    for (ei, e) in cusp.edges.iter().enumerate() {
        adj[e.ends.0].push((ei, 1, e.ends.1));
        adj[e.ends.1].push((ei, -1, e.ends.0));
    }

    type Sig = (Rat, Rat);
    for source in 0..cusp.vertex_count {
        let mut dist: BTreeMap<(usize, Sig), (Rat, Option<((usize, Sig), WalkStep)>)> =
            BTreeMap::new();
        let start = (source, (Rat::zero(), Rat::zero()));
        dist.insert(start.clone(), (Rat::zero(), None));
        // Max-heap on Reverse(length).
        let mut heap: BinaryHeap<std::cmp::Reverse<(Rat, usize, Sig)>> = BinaryHeap::new();
        heap.push(std::cmp::Reverse((Rat::zero(), source, start.1.clone())));
        while let Some(std::cmp::Reverse((d, v, sig))) = heap.pop() {
            let key = (v, sig.clone());
            match dist.get(&key) {
                Some((best, _)) if *best < d => continue,
                None => continue,
                _ => {}
            }
            if v == source && sig == target && d.is_positive() {
                if d < upper {
                    upper = d.clone();
                    // Reconstruct the witness walk.
                    let mut walk = Vec::new();
                    let mut cur = key.clone();
                    while let Some((prev, step)) = dist[&cur].1.clone() {
                        walk.push(step);
                        cur = prev;
                    }
                    walk.reverse();
                    witness = walk;
                }
                continue;
            }
            for &(ei, dir, u) in &adj[v] {
                let e = &cusp.edges[ei];
                let nd = &d + &e.length;
                let dd = rat_int(dir as i64);
                let nsig = (&sig.0 + &dd * &e.weights[0].0, &sig.1 + &dd * &e.weights[1].0);
                // Potential: every further edge moves each signature
                // coordinate by at most w_max and costs at least eps_min.
                let gap0 = (&target.0 - &nsig.0).abs();
                let gap1 = (&target.1 - &nsig.1).abs();
                let need = if gap0 > gap1 { gap0 } else { gap1 };
                if &nd + &(&eps_min * &need) / &w_max > upper {
                    continue;
                }
                let nkey = (u, nsig.clone());
                let better = match dist.get(&nkey) {
                    Some((best, _)) => nd < *best,
                    None => true,
                };
                if better {
                    dist.insert(nkey, (nd.clone(), Some((key.clone(), (ei, dir)))));
                    heap.push(std::cmp::Reverse((nd, u, nsig)));
                }
            }
        }
    }

    debug_assert_eq!(cusp.walk_signature(&witness), target);
    debug_assert_eq!(cusp.walk_length(&witness), upper);
    LengthBound { slope, lower_bound: upper, witness_walk: witness }
}

/// All primitive slope classes whose length bound is at most `threshold`
/// (default 2pi): the search window |p| + |q| <= 2 * w_max * threshold /
/// eps_min is exhaustive because a walk of signature (p, q) crosses the
/// cocycles at least (|p| + |q|) / (2 w_max) times.
pub fn short_slopes(cusp: &CuspTriangulation, threshold: &Rat) -> Vec<(SlopeClass, LengthBound)> {
    assert!(threshold.is_positive());
    let eps_min = cusp.min_edge_length();
    let w_max = cusp.max_weight();
    let limit_rat = rat_int(2) * &w_max * threshold / &eps_min;
    let limit = limit_rat.floor().to_integer();
    let limit: i64 = limit.try_into().unwrap_or(i64::MAX);
    let mut out = Vec::new();
    for p in 0..=limit {
        for q in -limit..=limit {
            if p.checked_add(q.abs()).map_or(true, |s| s > limit) {
                continue;
            }
            if (p, q) == (0, 0) || (p == 0 && q < 0) || gcd(p.unsigned_abs(), q.unsigned_abs()) != 1 {
                continue;
            }
            let slope = SlopeClass::new(p, q);
            let bound = slope_length_bound(cusp, slope);
            if bound.lower_bound <= *threshold {
                out.push((slope, bound));
            }
        }
    }
    out.sort_by(|a, b| (&a.1.lower_bound, a.0).cmp(&(&b.1.lower_bound, b.0)));
    out
}

// ---------------------------------------------------------------------------
// Dual spine presentation and vertex-link checks

/// The spine presentation dual to an angled ideal triangulation: one
/// tetrahedron boundary pattern per tet, one 2-handle group per edge
/// class.
pub fn triangulation_presentation(
    gluing: &GluingData,
    angles: &AngleAssignment,
) -> SpinePresentation {
    let patterns: Vec<SpherePattern> = (0..gluing.tet_count)
        .map(|t| {
            tetrahedron_pattern(&[
                angles.angle(t, 0).clone(),
                angles.angle(t, 1).clone(),
                angles.angle(t, 2).clone(),
            ])
            .expect("valid tetrahedron angles")
        })
        .collect();
    let two_handles = gluing
        .edge_classes()
        .into_iter()
        .map(|class| {
            class
                .incidences
                .into_iter()
                .map(|(t, (i, j))| (t, tet_edge_index(i, j)))
                .collect()
        })
        .collect();
    SpinePresentation { patterns, two_handles }
}

/// The boundary-bigon curve around `gate`: two gap arcs hugging the
/// gate's ends, zero combinatorial area.
pub fn boundary_bigon(pat: &SpherePattern, gate: usize) -> NormalCurve {
    let corner_at = |side: u8, offset: i64| -> (usize, usize) {
        let r = pat.gates[gate].sides[side as usize];
        let items = &pat.f0_regions[r.region].items;
        let m = items.len() as i64;
        let idx = ((r.item as i64 + offset).rem_euclid(m)) as usize;
        match items[idx] {
            Item::Corner { gap, corner } => (gap, corner),
            Item::Gate { .. } => unreachable!("items alternate"),
        }
    };
    let (gap_a, a0) = corner_at(0, -1);
    let (_gap_a2, a1) = {
        // The corner of gap_a adjacent to the gate on side 1.
        let (g_prev, c_prev) = corner_at(1, -1);
        let (g_next, c_next) = corner_at(1, 1);
        if g_prev == gap_a {
            (g_prev, c_prev)
        } else {
            debug_assert_eq!(g_next, gap_a);
            (g_next, c_next)
        }
    };
    let (gap_b, b0) = corner_at(0, 1);
    let (_gap_b2, b1) = {
        let (g_prev, c_prev) = corner_at(1, -1);
        let (g_next, c_next) = corner_at(1, 1);
        if g_prev == gap_b {
            (g_prev, c_prev)
        } else {
            debug_assert_eq!(g_next, gap_b);
            (g_next, c_next)
        }
    };
    NormalCurve {
        events: vec![
            CurveEvent::GapArc { gap: gap_a, corner_in: a1, corner_out: a0 },
            CurveEvent::GapArc { gap: gap_b, corner_in: b0, corner_out: b1 },
        ],
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct VertexLinkReport {
    /// Per cusp: number of link triangles and their total area (always 0).
    pub cusp_triangles: Vec<usize>,
    pub cusp_link_areas: Vec<crate::angle::RatJson>,
    /// Gauss-Bonnet identity values per cusp: -2 pi chi + 2 pi * 0.
    pub cusp_chi: Vec<i64>,
    /// The annulus around 2-handle group 0: its boundary bigons and area.
    pub annulus_edge_class: usize,
    pub annulus_bigon_count: usize,
    pub annulus_area: crate::angle::RatJson,
    /// A normal 2-sphere would need total area -4 pi; the minimum curve
    /// area of every pattern is >= this value.
    pub sphere_area_required: crate::angle::RatJson,
    pub min_curve_areas: Vec<crate::angle::RatJson>,
}

/// Assembles the vertex-link surfaces from triangle curves and checks the
/// combinatorial Gauss-Bonnet identities: links are tori of area 0, the
/// 2-handle annulus has area 0, and no pattern carries a negative curve
/// (so no normal 2-sphere, which would need area -4 pi).
pub fn vertex_link_check(gluing: &GluingData, angles: &AngleAssignment) -> VertexLinkReport {
    assert!(verify_angles(gluing, angles).is_empty());
    let pres = triangulation_presentation(gluing, angles);
    let cusps = cusp_triangulation(gluing, angles).expect("torus cusps");

    let mut cusp_triangles = Vec::new();
    let mut cusp_link_areas = Vec::new();
    let mut cusp_chi = Vec::new();
    for cusp in &cusps {
        let mut total = Rat::zero();
        for tri in &cusp.triangles {
            // The link triangle of vertex v crosses the three gates at v.
            let pat = &pres.patterns[tri.tet];
            let events: Vec<CurveEvent> = walk_triangle(pat, tri.vertex);
            let curve = NormalCurve { events };
            assert!(is_normal(pat, &curve).is_empty());
            total += curve_area(pat, &curve).unwrap().0;
        }
        assert!(total.is_zero(), "vertex link area must vanish");
        // a(F) = -2 pi chi(F) + 2 pi Length(bd F - bd M) with Length 0.
        assert_eq!(cusp.euler_characteristic(), 0);
        cusp_triangles.push(cusp.triangles.len());
        cusp_link_areas.push((&total).into());
        cusp_chi.push(cusp.euler_characteristic());
    }

    // Annulus around the first 2-handle: one boundary bigon per gate in
    // the group, each of area 0.
    let group = &pres.two_handles[0];
    let mut annulus_area = Rat::zero();
    for &(pi, gate) in group {
        let pat = &pres.patterns[pi];
        let bigon = boundary_bigon(pat, gate);
        assert!(is_normal(pat, &bigon).is_empty());
        annulus_area += curve_area(pat, &bigon).unwrap().0;
    }
    assert!(annulus_area.is_zero());

    let min_curve_areas: Vec<crate::angle::RatJson> = pres
        .patterns
        .iter()
        .map(|p| {
            let (a, _) = crate::pattern::min_normal_area(p).expect("patterns carry curves");
            assert!(!a.0.is_negative());
            (&a.0).into()
        })
        .collect();

    VertexLinkReport {
        cusp_triangles,
        cusp_link_areas,
        cusp_chi,
        annulus_edge_class: 0,
        annulus_bigon_count: group.len(),
        annulus_area: (&annulus_area).into(),
        sphere_area_required: (&rat_int(-4)).into(),
        min_curve_areas,
    }
}

/// The triangle curve around gap `v` of a tetrahedron pattern, crossing
/// its three gates in the gap's cyclic order.
fn walk_triangle(pat: &SpherePattern, v: usize) -> Vec<CurveEvent> {
    // Gates incident to gap v, in an order forming a closed walk: cross
    // each gate from the side whose region contains the previous gate.
    let mut gates: Vec<usize> = Vec::new();
    for g in 0..pat.gates.len() {
        let is_end = pat.gaps[v].corners.iter().any(|c| {
            let items = &pat.f0_regions[c.region].items;
            let m = items.len();
            [(c.item + 1) % m, (c.item + m - 1) % m]
                .iter()
                .any(|&i| matches!(items[i], Item::Gate { gate, .. } if gate == g))
        });
        if is_end {
            gates.push(g);
        }
    }
    assert_eq!(gates.len(), 3);
    // Order the gates so consecutive ones share a region, and pick
    // crossing sides making the walk consistent: brute-force the tiny
    // arrangement.
    let perms = [[0, 1, 2], [0, 2, 1]];
    for perm in perms {
        'sides: for mask in 0..8u8 {
            let evs: Vec<CurveEvent> = (0..3)
                .map(|k| CurveEvent::Gate {
                    gate: gates[perm[k]],
                    from_side: (mask >> k) & 1,
                })
                .collect();
            let curve = NormalCurve { events: evs.clone() };
            if !is_normal(pat, &curve).is_empty() {
                continue 'sides;
            }
            return evs;
        }
    }
    panic!("no triangle walk around gap {v}");
}

/// Parses an angle file: one line "t a b c" per tetrahedron with exact
/// rationals in units of pi.
pub fn parse_angles(text: &str, tet_count: usize) -> Result<AngleAssignment, TriError> {
    let mut tets = vec![None; tet_count];
    for line in text
        .lines()
        .map(|l| l.split('#').next().unwrap_or("").trim())
        .filter(|l| !l.is_empty())
    {
        let tok: Vec<&str> = line.split_whitespace().collect();
        if tok.len() != 4 {
            return Err(TriError::Malformed(format!("bad angle line `{line}`")));
        }
        let t: usize = tok[0].parse().map_err(|_| TriError::Malformed(line.into()))?;
        if t >= tet_count {
            return Err(TriError::Malformed(format!("tetrahedron {t} out of range")));
        }
        let mut vals = Vec::new();
        for s in &tok[1..] {
            vals.push(
                crate::angle::parse_rat(s)
                    .ok_or_else(|| TriError::Malformed(format!("bad rational `{s}`")))?,
            );
        }
        tets[t] = Some([vals[0].clone(), vals[1].clone(), vals[2].clone()]);
    }
    let tets: Option<Vec<[Rat; 3]>> = tets.into_iter().collect();
    let tets = tets.ok_or_else(|| TriError::Malformed("missing tetrahedron angles".into()))?;
    Ok(AngleAssignment::new(tets))
}

#[cfg(test)]
pub(crate) const TWO_TET: &str = include_str!("../../../corpus/fig8.tri");

#[cfg(test)]
mod tests {
    use super::TWO_TET;
    use super::*;
    use crate::angle::rat;

    #[test]
    fn reduce_six_symmetric() {
        let six = [rat(1, 3), rat(1, 3), rat(1, 3), rat(1, 3), rat(1, 3), rat(1, 3)];
        assert_eq!(reduce_six_angles(&six).unwrap(), (rat(1, 3), rat(1, 3), rat(1, 3)));
    }

    #[test]
    fn reduce_six_mixed() {
        // 01:1/2, 02:1/4, 03:1/4, 12:1/4, 13:1/4, 23:1/2.
        let six = [rat(1, 2), rat(1, 4), rat(1, 4), rat(1, 4), rat(1, 4), rat(1, 2)];
        assert_eq!(reduce_six_angles(&six).unwrap(), (rat(1, 2), rat(1, 4), rat(1, 4)));
    }

    #[test]
    fn reduce_six_rejects_bad_vertex_sum() {
        let six = [rat(1, 2), rat(1, 4), rat(1, 4), rat(1, 4), rat(1, 4), rat(1, 4)];
        assert!(matches!(
            reduce_six_angles(&six),
            Err(TriError::VertexSumViolation { .. })
        ));
    }

    #[test]
    fn bad_permutation_rejected() {
        let text = "1\n0 0 0 1 0012\n";
        assert!(matches!(parse_triangulation(text), Err(TriError::BadPermutation(_))));
    }

    #[test]
    fn slope_class_normalization() {
        assert_eq!(SlopeClass::new(-1, 2), SlopeClass::new(1, -2));
        assert_eq!(SlopeClass::new(0, -1), SlopeClass::new(0, 1));
    }

    const DEGREE_TWO: &str = "1\n0 0 0 1 1230\n0 2 0 3 1230\n";

    fn uniform_third(n: usize) -> AngleAssignment {
        AngleAssignment::new(vec![[rat(1, 3), rat(1, 3), rat(1, 3)]; n])
    }

    #[test]
    fn two_tet_combinatorics() {
        let g = parse_triangulation(TWO_TET).unwrap();
        let classes = g.edge_classes();
        assert_eq!(classes.len(), 2);
        assert!(classes.iter().all(|c| c.incidences.len() == 6));
        assert_eq!(g.vertex_classes().len(), 1);
    }

    #[test]
    fn two_tet_uniform_third_verifies() {
        let g = parse_triangulation(TWO_TET).unwrap();
        assert!(verify_angles(&g, &uniform_third(2)).is_empty());
        let half = AngleAssignment::new(vec![[rat(1, 2), rat(1, 4), rat(1, 4)]; 2]);
        assert!(!verify_angles(&g, &half).is_empty());
    }

    #[test]
    fn two_tet_lp_feasible() {
        let g = parse_triangulation(TWO_TET).unwrap();
        let a = solve_angle_structure(&g).unwrap();
        assert!(verify_angles(&g, &a).is_empty());
    }

    #[test]
    fn degree_two_class_infeasible() {
        let g = parse_triangulation(DEGREE_TWO).unwrap();
        assert!(g.edge_classes().iter().any(|c| c.incidences.len() == 2));
        assert!(solve_angle_structure(&g).is_none());
    }

    #[test]
    fn two_tet_cusp_shape() {
        let g = parse_triangulation(TWO_TET).unwrap();
        let cusps = cusp_triangulation(&g, &uniform_third(2)).unwrap();
        assert_eq!(cusps.len(), 1);
        let c = &cusps[0];
        assert_eq!(c.triangles.len(), 8);
        assert_eq!(c.edges.len(), 12);
        assert_eq!(c.vertex_count, 4);
        assert_eq!(c.euler_characteristic(), 0);
        assert!(c.edges.iter().all(|e| e.length == rat(1, 6)));
        // The basis loops really have unit signatures.
        assert_eq!(c.walk_signature(&c.basis_loops[0]), (rat_int(1), rat_int(0)));
        assert_eq!(c.walk_signature(&c.basis_loops[1]), (rat_int(0), rat_int(1)));
    }

    fn one_vertex_torus() -> CuspTriangulation {
        let dummy = [(0, 0), (0, 0)];
        CuspTriangulation {
            cusp: 0,
            triangles: Vec::new(),
            edges: vec![
                CuspEdge {
                    sides: dummy,
                    ends: (0, 0),
                    length: rat(1, 2),
                    weights: [(&rat_int(1)).into(), (&rat_int(0)).into()],
                },
                CuspEdge {
                    sides: dummy,
                    ends: (0, 0),
                    length: rat(7, 10),
                    weights: [(&rat_int(0)).into(), (&rat_int(1)).into()],
                },
            ],
            vertex_count: 1,
            root: 0,
            basis_loops: [vec![(0, 1)], vec![(1, 1)]],
        }
    }

    #[test]
    fn synthetic_torus_slope_bounds() {
        let c = one_vertex_torus();
        assert_eq!(slope_length_bound(&c, SlopeClass::new(1, 0)).lower_bound, rat(1, 2));
        assert_eq!(slope_length_bound(&c, SlopeClass::new(1, 1)).lower_bound, rat(6, 5));
        assert_eq!(slope_length_bound(&c, SlopeClass::new(2, 1)).lower_bound, rat(17, 10));
        let w = slope_length_bound(&c, SlopeClass::new(2, 1)).witness_walk;
        assert_eq!(c.walk_length(&w), rat(17, 10));
        assert_eq!(c.walk_signature(&w), (rat_int(2), rat_int(1)));
    }

    #[test]
    fn short_slopes_synthetic() {
        let c = one_vertex_torus();
        let list = short_slopes(&c, &rat(6, 5));
        let slopes: Vec<(i64, i64)> = list.iter().map(|(s, _)| (s.p, s.q)).collect();
        assert!(slopes.contains(&(1, 0)));
        assert!(slopes.contains(&(0, 1)));
        assert!(slopes.contains(&(1, 1)));
        assert!(slopes.contains(&(1, -1)));
        assert!(!slopes.contains(&(2, 1)));
        // Sorted by bound; (1,0) is shortest.
        assert_eq!(slopes[0], (1, 0));
    }

    #[test]
    fn two_tet_vertex_links() {
        let g = parse_triangulation(TWO_TET).unwrap();
        let report = vertex_link_check(&g, &uniform_third(2));
        assert_eq!(report.cusp_triangles, vec![8]);
        assert_eq!(report.cusp_chi, vec![0]);
        assert_eq!(report.annulus_bigon_count, 6);
        assert!(report.cusp_link_areas.iter().all(|a| a.0.is_zero()));
    }

    #[test]
    fn two_tet_spine_presentation_ok() {
        let g = parse_triangulation(TWO_TET).unwrap();
        let pres = triangulation_presentation(&g, &uniform_third(2));
        assert!(crate::pattern::verify_angled_spine(&pres).is_ok());
    }
}
