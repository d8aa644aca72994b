//! Certificates for Dehn surgery descriptions. Each certifier checks the
//! hypotheses of one sufficient criterion and a per-slope length bound
//! against its threshold. Verdicts are one-sided: NOT_CERTIFIED records
//! why the criterion did not apply or the bound was not met, and never
//! claims anything about the filled manifold.

use crate::angle::{rat_int, RatJson};
use crate::cusp_geom::CuspLattice;
use crate::diagram::{twist_stats, Diagram};
use crate::triangulation::{
    cusp_triangulation, slope_length_bound, verify_angles, AngleAssignment, GluingData, SlopeClass,
};
use num_traits::Signed;
use serde::Serialize;
use sha2::{Digest, Sha256};

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// One surgery coefficient p/q in lowest terms; q = 0 means "unfilled"
/// (and then p must be 1).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Coefficient {
    pub p: i64,
    pub q: i64,
}

#[derive(Debug, Clone, thiserror::Error, PartialEq, Eq)]
pub enum CertifyError {
    #[error("no surgery coefficient for component {component}")]
    MissingCoefficient { component: usize },
    #[error("coefficient {p}/{q} is not in lowest terms")]
    UnreducedFraction { p: i64, q: i64 },
    #[error("{slopes} slopes given for {cusps} cusps")]
    SlopeCuspMismatch { slopes: usize, cusps: usize },
}

impl Coefficient {
    pub fn new(p: i64, q: i64) -> Result<Coefficient, CertifyError> {
        let g = crate::triangulation::gcd(p.unsigned_abs(), q.unsigned_abs());
        if g != 1 {
            return Err(CertifyError::UnreducedFraction { p, q });
        }
        Ok(Coefficient { p, q })
    }

    /// Parses "p/q" or a bare integer (denominator 1).
    pub fn parse(s: &str) -> Result<Coefficient, CertifyError> {
        let bad = || CertifyError::UnreducedFraction { p: 0, q: 0 };
        match s.split_once('/') {
            Some((p, q)) => Coefficient::new(
                p.trim().parse().map_err(|_| bad())?,
                q.trim().parse().map_err(|_| bad())?,
            ),
            None => Coefficient::new(s.trim().parse().map_err(|_| bad())?, 1),
        }
    }
}

/// Per-component surgery coefficients, indexed like the diagram's link
/// components.
#[derive(Debug, Clone, Serialize)]
pub struct SurgerySpec {
    pub coefficients: Vec<Coefficient>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Verdict {
    #[serde(rename = "CERTIFIED")]
    Certified,
    #[serde(rename = "NOT_CERTIFIED")]
    NotCertified,
}

#[derive(Debug, Clone, Serialize)]
pub struct Hypothesis {
    pub name: String,
    pub passed: bool,
    pub witness: String,
}

/// A length bound and its threshold, either exact in units of pi or
/// Euclidean floating point.
#[derive(Debug, Clone, Serialize)]
#[serde(tag = "kind", content = "value")]
pub enum BoundValue {
    PiUnits(RatJson),
    Euclidean(f64),
}

#[derive(Debug, Clone, Serialize)]
pub struct PerSlope {
    pub slope: String,
    pub bound: BoundValue,
    pub threshold: BoundValue,
    pub verdict: Verdict,
}

#[derive(Debug, Clone, Serialize)]
pub struct Certificate {
    pub theorem: String,
    pub hypotheses: Vec<Hypothesis>,
    pub per_slope: Vec<PerSlope>,
    pub overall: Verdict,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
    pub tool_version: String,
    pub input_digest: String,
}

impl Certificate {
    fn finish(mut self) -> Certificate {
        let ok = self.hypotheses.iter().all(|h| h.passed)
            && self.per_slope.iter().all(|s| s.verdict == Verdict::Certified);
        self.overall = if ok { Verdict::Certified } else { Verdict::NotCertified };
        self
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).unwrap()
    }
}

fn digest(parts: &[String]) -> String {
    let mut h = Sha256::new();
    for p in parts {
        h.update(p.as_bytes());
        h.update([0u8]);
    }
    format!("{:x}", h.finalize())
}

fn hyp(name: &str, passed: bool, witness: String) -> Hypothesis {
    Hypothesis { name: name.into(), passed, witness }
}

/// Canonical form of a diagram for digesting: the crossing labels after
/// normalizing to the parser's internal order.
fn diagram_canonical(d: &Diagram) -> String {
    let mut lines = Vec::new();
    for v in 0..d.vertex_count() {
        let labels: Vec<String> = (0..4)
            .map(|s| d.edges[d.edge_at(crate::diagram::Dart { vertex: v, slot: s as u8 })].label.to_string())
            .collect();
        lines.push(format!("X[{}]", labels.join(",")));
    }
    lines.join(" ")
}

/// Criterion for surgery on an alternating link: the diagram must be
/// connected, prime, alternating and not a single twist region, and each
/// filled component needs |q| * t(K,D) > 8. The reported per-slope bound
/// is the combinatorial length bound |q| * t(K,D) * pi / 4 against the
/// threshold 2 pi, which is the same strict inequality.
pub fn certify_alternating(d: &Diagram, surgery: &SurgerySpec) -> Result<Certificate, CertifyError> {
    if surgery.coefficients.len() < d.component_count {
        return Err(CertifyError::MissingCoefficient {
            component: surgery.coefficients.len(),
        });
    }
    if surgery.coefficients.len() != d.component_count {
        return Err(CertifyError::SlopeCuspMismatch {
            slopes: surgery.coefficients.len(),
            cusps: d.component_count,
        });
    }
    for c in &surgery.coefficients {
        let g = crate::triangulation::gcd(c.p.unsigned_abs(), c.q.unsigned_abs());
        if g != 1 {
            return Err(CertifyError::UnreducedFraction { p: c.p, q: c.q });
        }
    }
    let ts = twist_stats(d);
    let mut hypotheses = vec![
        hyp("connected", d.flags.connected, format!("{} link components, one diagram piece", d.component_count)),
        hyp("alternating", d.flags.alternating, match d.witness.non_alternating_edge {
            Some(e) => format!("edge {e} has two ends of the same kind"),
            None => "every edge joins an under-end to an over-end".into(),
        }),
        hyp("prime", d.flags.prime, match d.witness.non_prime_edge_pair {
            Some((a, b)) => format!("edges {a}, {b} disconnect the diagram"),
            None => "no edge pair separates crossings from crossings".into(),
        }),
        hyp("more than one crossing", d.vertex_count() > 1, format!("{} crossings", d.vertex_count())),
    ];
    for (k, t) in ts.t_k.iter().enumerate() {
        if surgery.coefficients[k].q == 0 {
            continue;
        }
        hypotheses.push(hyp(
            &format!("positive twist number, component {k}"),
            t.is_positive(),
            format!("t(K,D) = {t}"),
        ));
    }
    let mut per_slope = Vec::new();
    for (k, c) in surgery.coefficients.iter().enumerate() {
        if c.q == 0 {
            continue;
        }
        let t = &ts.t_k[k];
        // |q| * t / 4 in units of pi, threshold 2.
        let bound = rat_int(c.q.abs()) * t / rat_int(4);
        per_slope.push(PerSlope {
            slope: format!("K{k}={}/{}", c.p, c.q),
            verdict: if bound > rat_int(2) { Verdict::Certified } else { Verdict::NotCertified },
            bound: BoundValue::PiUnits((&bound).into()),
            threshold: BoundValue::PiUnits((&rat_int(2)).into()),
        });
    }
    let input_digest = digest(&[
        diagram_canonical(d),
        serde_json::to_string(&surgery.coefficients).unwrap(),
    ]);
    Ok(Certificate {
        theorem: "alternating-surgery".into(),
        hypotheses,
        per_slope,
        overall: Verdict::NotCertified,
        notes: vec![
            "a connected prime alternating diagram with more than one crossing has \
             irreducible, atoroidal exterior; recorded, not re-proved"
                .into(),
        ],
        tool_version: TOOL_VERSION.into(),
        input_digest,
    }
    .finish())
}

/// Criterion for filling an angled ideal triangulation: every filled
/// slope must have combinatorial length more than 2 pi in its cusp
/// triangulation.
pub fn certify_triangulated(
    gluing: &GluingData,
    angles: &AngleAssignment,
    slopes: &[SlopeClass],
) -> Result<Certificate, CertifyError> {
    let violations = verify_angles(gluing, angles);
    let mut hypotheses = vec![hyp(
        "angle structure",
        violations.is_empty(),
        if violations.is_empty() {
            "all tetrahedron and edge-class sums verify exactly".into()
        } else {
            format!("{} violations", violations.len())
        },
    )];
    let mut per_slope = Vec::new();
    if violations.is_empty() {
        let cusps = cusp_triangulation(gluing, angles).map_err(|_| {
            CertifyError::SlopeCuspMismatch { slopes: slopes.len(), cusps: 0 }
        })?;
        if slopes.len() != cusps.len() {
            return Err(CertifyError::SlopeCuspMismatch {
                slopes: slopes.len(),
                cusps: cusps.len(),
            });
        }
        hypotheses.push(hyp(
            "angled ideal triangulation",
            true,
            "an angle structure makes the exterior irreducible, atoroidal and not \
             Seifert fibred; recorded, not re-proved"
                .into(),
        ));
        for (cusp, slope) in cusps.iter().zip(slopes) {
            let b = slope_length_bound(cusp, *slope);
            per_slope.push(PerSlope {
                slope: format!("cusp{}=({},{})", cusp.cusp, slope.p, slope.q),
                verdict: if b.lower_bound > rat_int(2) {
                    Verdict::Certified
                } else {
                    Verdict::NotCertified
                },
                bound: BoundValue::PiUnits((&b.lower_bound).into()),
                threshold: BoundValue::PiUnits((&rat_int(2)).into()),
            });
        }
    }
    let input_digest = digest(&[
        format!("{:?}", gluing.gluings),
        serde_json::to_string(angles).unwrap(),
        format!("{slopes:?}"),
    ]);
    Ok(Certificate {
        theorem: "triangulated-surgery".into(),
        hypotheses,
        per_slope,
        overall: Verdict::NotCertified,
        notes: Vec::new(),
        tool_version: TOOL_VERSION.into(),
        input_digest,
    }
    .finish())
}

/// Criterion for filling geometric cusps: every slope must have Euclidean
/// length more than 6 on its horoball cross-section. The horoball
/// hypothesis (lattices come from an embedded neighbourhood of a
/// finite-volume hyperbolic structure) is caller-attested.
pub fn certify_metric_cusps(
    lattices: &[CuspLattice],
    slopes: &[(i64, i64)],
) -> Result<Certificate, CertifyError> {
    if lattices.len() != slopes.len() {
        return Err(CertifyError::SlopeCuspMismatch {
            slopes: slopes.len(),
            cusps: lattices.len(),
        });
    }
    let hypotheses = vec![hyp(
        "embedded horoball neighbourhood",
        true,
        "caller-attested; not checked by this tool".into(),
    )];
    let mut per_slope = Vec::new();
    for (i, (lat, &(p, q))) in lattices.iter().zip(slopes).enumerate() {
        let len = crate::cusp_geom::slope_length(lat, p, q)
            .map_err(|_| CertifyError::SlopeCuspMismatch { slopes: slopes.len(), cusps: lattices.len() })?;
        per_slope.push(PerSlope {
            slope: format!("cusp{i}=({p},{q})"),
            verdict: if len > 6.0 { Verdict::Certified } else { Verdict::NotCertified },
            bound: BoundValue::Euclidean(len),
            threshold: BoundValue::Euclidean(6.0),
        });
    }
    let mut notes = Vec::new();
    if lattices.len() == 1 {
        notes.push(
            "single cusp: at most 12 slope classes can fail the length-6 test on any \
             cross-section of area at least 3.35"
                .into(),
        );
    }
    let input_digest = digest(&[format!("{lattices:?}"), format!("{slopes:?}")]);
    Ok(Certificate {
        theorem: "metric-cusp-surgery".into(),
        hypotheses,
        per_slope,
        overall: Verdict::NotCertified,
        notes,
        tool_version: TOOL_VERSION.into(),
        input_digest,
    }
    .finish())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::angle::rat;
    use crate::diagram::{codes, parse_pd};
    use crate::triangulation::parse_triangulation;

    fn surgery(coeffs: &[(i64, i64)]) -> SurgerySpec {
        SurgerySpec {
            coefficients: coeffs.iter().map(|&(p, q)| Coefficient::new(p, q).unwrap()).collect(),
        }
    }

    #[test]
    fn figure_eight_thresholds() {
        let d = parse_pd(codes::FIGURE_EIGHT).unwrap();
        let c = certify_alternating(&d, &surgery(&[(1, 5)])).unwrap();
        assert_eq!(c.overall, Verdict::Certified);
        assert_eq!(
            match &c.per_slope[0].bound {
                BoundValue::PiUnits(r) => r.0.clone(),
                _ => unreachable!(),
            },
            rat(5, 2)
        );
        let c = certify_alternating(&d, &surgery(&[(7, 4)])).unwrap();
        assert_eq!(c.overall, Verdict::NotCertified);
        assert_eq!(c.per_slope[0].verdict, Verdict::NotCertified);
    }

    #[test]
    fn trefoil_twist_zero() {
        let d = parse_pd(codes::TREFOIL).unwrap();
        let c = certify_alternating(&d, &surgery(&[(1, 100)])).unwrap();
        assert_eq!(c.overall, Verdict::NotCertified);
        let h = c
            .hypotheses
            .iter()
            .find(|h| h.name.starts_with("positive twist"))
            .unwrap();
        assert!(!h.passed);
        assert!(h.witness.contains("t(K,D) = 0"));
    }

    #[test]
    fn borromean_certified() {
        let d = parse_pd(codes::BORROMEAN).unwrap();
        let c = certify_alternating(&d, &surgery(&[(1, 5), (1, 5), (1, 5)])).unwrap();
        assert_eq!(c.overall, Verdict::Certified);
        assert_eq!(c.per_slope.len(), 3);
    }

    #[test]
    fn unfilled_component_excluded() {
        let d = parse_pd(codes::BORROMEAN).unwrap();
        let c = certify_alternating(&d, &surgery(&[(1, 5), (1, 0), (1, 5)])).unwrap();
        assert_eq!(c.overall, Verdict::Certified);
        assert_eq!(c.per_slope.len(), 2);
    }

    #[test]
    fn coefficient_errors() {
        let d = parse_pd(codes::FIGURE_EIGHT).unwrap();
        assert!(matches!(
            certify_alternating(&d, &SurgerySpec { coefficients: vec![] }),
            Err(CertifyError::MissingCoefficient { component: 0 })
        ));
        assert_eq!(Coefficient::new(2, 4), Err(CertifyError::UnreducedFraction { p: 2, q: 4 }));
        assert_eq!(Coefficient::parse("1/5"), Ok(Coefficient { p: 1, q: 5 }));
        assert_eq!(Coefficient::parse("-3"), Ok(Coefficient { p: -3, q: 1 }));
    }

    #[test]
    fn monotone_in_q() {
        let d = parse_pd(codes::FIGURE_EIGHT).unwrap();
        for q in 5..40 {
            let c = certify_alternating(&d, &surgery(&[(1, q)])).unwrap();
            assert_eq!(c.overall, Verdict::Certified, "q = {q}");
        }
    }

    #[test]
    fn triangulated_two_tet_not_certified() {
        let g = parse_triangulation(crate::triangulation::TWO_TET).unwrap();
        let angles = AngleAssignment::new(vec![[rat(1, 3), rat(1, 3), rat(1, 3)]; 2]);
        let c = certify_triangulated(&g, &angles, &[SlopeClass::new(1, 0)]).unwrap();
        assert_eq!(c.overall, Verdict::NotCertified);
        // The bound is still reported.
        assert!(matches!(c.per_slope[0].bound, BoundValue::PiUnits(_)));
        assert!(matches!(
            certify_triangulated(&g, &angles, &[]),
            Err(CertifyError::SlopeCuspMismatch { slopes: 0, cusps: 1 })
        ));
    }

    #[test]
    fn metric_cusp_thresholds() {
        let big = CuspLattice::new((6.2, 0.0), (0.0, 6.2)).unwrap();
        let c = certify_metric_cusps(&[big], &[(1, 0)]).unwrap();
        assert_eq!(c.overall, Verdict::Certified);
        assert!(!c.notes.is_empty());
        let thin = CuspLattice::new((1.0, 0.0), (0.0, 40.0)).unwrap();
        let c = certify_metric_cusps(&[thin], &[(1, 0)]).unwrap();
        assert_eq!(c.overall, Verdict::NotCertified);
        let rect = CuspLattice::new((4.0, 0.0), (0.0, 5.0)).unwrap();
        let c = certify_metric_cusps(&[rect], &[(1, 1)]).unwrap();
        assert_eq!(c.overall, Verdict::Certified); // sqrt(41) > 6
    }

    #[test]
    fn certificate_roundtrip() {
        let d = parse_pd(codes::FIGURE_EIGHT).unwrap();
        let c = certify_alternating(&d, &surgery(&[(1, 5)])).unwrap();
        let j = c.to_json();
        assert_eq!(j["overall"], "CERTIFIED");
        assert_eq!(j["tool_version"], TOOL_VERSION);
        assert_eq!(j["input_digest"].as_str().unwrap().len(), 64);
    }

    #[test]
    fn digest_stable_under_relabeling() {
        // Same diagram, shifted labels: verdict body identical.
        let a = parse_pd(codes::FIGURE_EIGHT).unwrap();
        let b = parse_pd("X[18,16,11,15] X[14,12,15,11] X[12,17,13,18] X[16,13,17,14]").unwrap();
        let ca = certify_alternating(&a, &surgery(&[(1, 5)])).unwrap();
        let cb = certify_alternating(&b, &surgery(&[(1, 5)])).unwrap();
        assert_eq!(
            serde_json::to_string(&ca.per_slope.iter().map(|s| &s.bound).collect::<Vec<_>>())
                .unwrap(),
            serde_json::to_string(&cb.per_slope.iter().map(|s| &s.bound).collect::<Vec<_>>())
                .unwrap()
        );
        assert_eq!(ca.overall, cb.overall);
    }
}
