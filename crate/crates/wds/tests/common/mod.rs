#![allow(dead_code)]

//! Shared helpers for the integration suites: corpus loading, randomized
//! inputs, and independent oracles kept deliberately naive.

use std::collections::BTreeMap;
use std::path::PathBuf;

use num_traits::Signed;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use wds::angle::{rat, rat_int, Rat};
use wds::cusp_geom::CuspLattice;
use wds::diagram::{parse_pd, Dart, Diagram};
use wds::exact::nullspace;
use wds::triangulation::{CuspEdge, CuspTriangulation};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn workspace_root() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../..").canonicalize().unwrap()
}

pub fn corpus_dir() -> PathBuf {
    workspace_root().join("corpus")
}

fn strip_comments(text: &str) -> String {
    text.lines().filter(|l| !l.trim_start().starts_with('#')).collect::<Vec<_>>().join("\n")
}

/// Every bundled diagram, by case name.
pub fn corpus_diagrams() -> Vec<(String, Diagram)> {
    let mut out = Vec::new();
    for entry in std::fs::read_dir(corpus_dir()).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().and_then(|e| e.to_str()) != Some("pd") {
            continue;
        }
        let name = path.file_stem().unwrap().to_str().unwrap().to_string();
        let text = std::fs::read_to_string(&path).unwrap();
        out.push((name, parse_pd(&strip_comments(&text)).unwrap()));
    }
    out.sort_by(|a, b| a.0.cmp(&b.0));
    out
}

pub fn fig8_gluing() -> wds::triangulation::GluingData {
    let text = std::fs::read_to_string(corpus_dir().join("fig8.tri")).unwrap();
    wds::triangulation::parse_triangulation(&text).unwrap()
}

/// A one-tetrahedron gluing whose edge classes have degrees 2 and 4, so no
/// positive angle structure exists (a class of degree 2 would need two
/// angles summing to 2 pi).
pub const DEGREE_TWO_GLUING: &str = "1\n0 0 0 1 1230\n0 2 0 3 1230\n";

/// Random per-edge diagram angles in (0, pi) whose four angles at every
/// crossing sum to exactly 2 pi: the uniform pi/2 point plus a random
/// element of the incidence matrix's kernel, scaled to stay interior.
pub fn random_balanced_edge_angles(d: &Diagram, rng: &mut ChaCha8Rng) -> Vec<Rat> {
    let ne = d.edge_count();
    let mut incidence = vec![vec![rat_int(0); ne]; d.vertex_count()];
    for v in 0..d.vertex_count() {
        for slot in 0..4u8 {
            let e = d.edge_at(Dart { vertex: v, slot });
            incidence[v][e] += rat_int(1);
        }
    }
    let kernel = nullspace(&incidence);
    let mut delta = vec![rat_int(0); ne];
    for basis in &kernel {
        let c = rat_int(rng.gen_range(-3i64..=3));
        for (d_e, b_e) in delta.iter_mut().zip(basis) {
            *d_e += &c * b_e;
        }
    }
    let max = delta.iter().map(|x| x.abs()).max().unwrap_or_else(|| rat_int(0));
    let scale = if max > rat_int(0) { rat(1, 4) / max } else { rat_int(0) };
    delta.iter().map(|x| rat(1, 2) + x * &scale).collect()
}

/// Random positive rational triple summing to 1.
pub fn random_tet_triple(rng: &mut ChaCha8Rng) -> [Rat; 3] {
    let d = rng.gen_range(5i64..=60);
    let a = rng.gen_range(1..=d - 2);
    let b = rng.gen_range(1..=d - 1 - a);
    [rat(a, d), rat(b, d), rat(d - a - b, d)]
}

pub fn random_lattice(rng: &mut ChaCha8Rng) -> CuspLattice {
    loop {
        let f = |r: &mut ChaCha8Rng| r.gen_range(-4.0f64..4.0);
        if let Ok(l) = CuspLattice::new((f(rng), f(rng)), (f(rng), f(rng))) {
            if l.area() > 0.05 {
                return l;
            }
        }
    }
}

/// The two-loop one-vertex torus graph with edge lengths 1/2 and 7/10.
pub fn synthetic_two_loop_cusp() -> CuspTriangulation {
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

/// Independent shortest-closed-walk oracle: label-correcting dynamic
/// program over (vertex, signature) states for walks of at most `max_steps`
/// edges, run from every start vertex. Deliberately shares nothing with the
/// library's search.
pub fn shortest_walk_oracle(
    cusp: &CuspTriangulation,
    p: i64,
    q: i64,
    max_steps: usize,
) -> Option<Rat> {
    let clip = rat_int(p.abs() + q.abs() + 3);
    let target = (rat_int(p), rat_int(q));
    let mut best: Option<Rat> = None;
    for start in 0..cusp.vertex_count {
        let mut frontier: BTreeMap<(usize, Rat, Rat), Rat> = BTreeMap::new();
        frontier.insert((start, rat_int(0), rat_int(0)), rat_int(0));
        for _ in 0..max_steps {
            let mut next = frontier.clone();
            for ((v, s1, s2), len) in &frontier {
                for e in &cusp.edges {
                    for (from, to, dir) in
                        [(e.ends.0, e.ends.1, 1i64), (e.ends.1, e.ends.0, -1)]
                    {
                        if from != *v {
                            continue;
                        }
                        let n1 = s1 + rat_int(dir) * &e.weights[0].0;
                        let n2 = s2 + rat_int(dir) * &e.weights[1].0;
                        if n1.abs() > clip || n2.abs() > clip {
                            continue;
                        }
                        let nlen = len + &e.length;
                        if let Some(b) = &best {
                            if nlen >= *b {
                                continue;
                            }
                        }
                        let key = (to, n1, n2);
                        if next.get(&key).map_or(true, |old| nlen < *old) {
                            next.insert(key, nlen);
                        }
                    }
                }
            }
            frontier = next;
            if let Some(len) = frontier.get(&(start, target.0.clone(), target.1.clone())) {
                if best.as_ref().map_or(true, |b| len < b) {
                    best = Some(len.clone());
                }
            }
        }
    }
    best
}
