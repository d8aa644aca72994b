//! Euclidean geometry of cusp cross-sections and the extremal horoball
//! packing profile. This is the one floating-point module: the quantities
//! here (lengths, areas, the profile integral) are irrational, so exact
//! arithmetic buys nothing. Comparison tolerance defaults to 1e-9.

use serde::Serialize;

pub const DEFAULT_TOL: f64 = 1e-9;

/// Meridian/longitude translation basis of a cusp torus.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct CuspLattice {
    pub m: (f64, f64),
    pub l: (f64, f64),
}

#[derive(Debug, Clone, thiserror::Error, PartialEq)]
pub enum GeomError {
    #[error("degenerate lattice: |det| = {0}")]
    DegenerateLattice(f64),
    #[error("slope (0, 0) is not a slope")]
    ZeroSlope,
    #[error("slopes are equal as classes")]
    EqualSlopes,
    #[error("height {0} below the packing threshold sqrt(3)/2")]
    DomainError(f64),
}

impl CuspLattice {
    pub fn new(m: (f64, f64), l: (f64, f64)) -> Result<CuspLattice, GeomError> {
        let lat = CuspLattice { m, l };
        let d = lat.det();
        if d.abs() < DEFAULT_TOL {
            return Err(GeomError::DegenerateLattice(d));
        }
        Ok(lat)
    }

    pub fn det(&self) -> f64 {
        self.m.0 * self.l.1 - self.m.1 * self.l.0
    }

    pub fn area(&self) -> f64 {
        self.det().abs()
    }
}

/// Length of the slope p*m + q*l on the cusp torus.
pub fn slope_length(lat: &CuspLattice, p: i64, q: i64) -> Result<f64, GeomError> {
    if (p, q) == (0, 0) {
        return Err(GeomError::ZeroSlope);
    }
    let x = p as f64 * lat.m.0 + q as f64 * lat.l.0;
    let y = p as f64 * lat.m.1 + q as f64 * lat.l.1;
    Ok(x.hypot(y))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DeltaBound {
    pub delta: u64,
    pub bound: f64,
    pub holds: bool,
}

/// Geometric intersection number of two slopes together with the upper
/// bound Length(s1) * Length(s2) / Area. The inequality is a theorem;
/// `holds` only audits floating-point round-off.
pub fn delta_with_bound(
    lat: &CuspLattice,
    s1: (i64, i64),
    s2: (i64, i64),
) -> Result<DeltaBound, GeomError> {
    if s1 == s2 || s1 == (-s2.0, -s2.1) {
        return Err(GeomError::EqualSlopes);
    }
    let delta = (s1.0 * s2.1 - s2.0 * s1.1).unsigned_abs();
    let bound = slope_length(lat, s1.0, s1.1)? * slope_length(lat, s2.0, s2.1)? / lat.area();
    let holds = delta as f64 <= bound + DEFAULT_TOL;
    Ok(DeltaBound { delta, bound, holds })
}

/// All primitive slope classes of length at most `bound`, identified
/// under negation and normalized like the combinatorial slopes. The
/// search window comes from the dual basis: |p| = |det(v, l)| / Area
/// <= |v| * |l| / Area.
pub fn short_slopes_euclidean(lat: &CuspLattice, bound: f64) -> Vec<((i64, i64), f64)> {
    assert!(bound > 0.0);
    let area = lat.area();
    let lm = slope_length(lat, 1, 0).unwrap();
    let ll = slope_length(lat, 0, 1).unwrap();
    let p_max = (bound * ll / area).floor() as i64 + 1;
    let q_max = (bound * lm / area).floor() as i64 + 1;
    let mut out = Vec::new();
    for p in 0..=p_max {
        for q in -q_max..=q_max {
            if (p, q) == (0, 0) || (p == 0 && q < 0) {
                continue;
            }
            if crate::triangulation::gcd(p.unsigned_abs(), q.unsigned_abs()) != 1 {
                continue;
            }
            let len = slope_length(lat, p, q).unwrap();
            if len <= bound + DEFAULT_TOL {
                out.push(((p, q), len));
            }
        }
    }
    out.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap().then(a.0.cmp(&b.0)));
    out
}

/// Cross-section of the extremal horoball configuration at height z:
/// circle radius R and gap D between adjacent circles, in the induced
/// metric on the horizontal plane (so centre spacing is 1/z). Below
/// height 1 the equidistant hemispheres cut circles of Euclidean radius
/// sqrt(1 - z^2), giving R = sqrt(1 - z^2)/z after rescaling; the circles
/// become tangent at z = sqrt(3)/2 and vanish at z = 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HoroballProfile {
    pub z: f64,
    pub radius: f64,
    pub gap: f64,
}

pub const Z_MIN: f64 = 0.8660254037844386; // sqrt(3)/2

pub fn horoball_profile(z: f64) -> Result<HoroballProfile, GeomError> {
    if z < Z_MIN - DEFAULT_TOL {
        return Err(GeomError::DomainError(z));
    }
    let z = z.max(Z_MIN);
    if z >= 1.0 {
        return Ok(HoroballProfile { z, radius: 0.0, gap: 1.0 / z });
    }
    let radius = (1.0 - z * z).sqrt() / z;
    Ok(HoroballProfile { z, radius, gap: 1.0 / z - 2.0 * radius })
}

/// Adaptive Simpson quadrature to absolute tolerance `tol`.
fn adaptive_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    fn simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64) -> f64 {
        (b - a) / 6.0 * (f(a) + 4.0 * f(0.5 * (a + b)) + f(b))
    }
    fn rec(f: &dyn Fn(f64) -> f64, a: f64, b: f64, whole: f64, tol: f64, depth: u32) -> f64 {
        let m = 0.5 * (a + b);
        let left = simpson(f, a, m);
        let right = simpson(f, m, b);
        if depth == 0 || (left + right - whole).abs() <= 15.0 * tol {
            left + right + (left + right - whole) / 15.0
        } else {
            rec(f, a, m, left, tol / 2.0, depth - 1) + rec(f, m, b, right, tol / 2.0, depth - 1)
        }
    }
    rec(f, a, b, simpson(f, a, b), tol, 40)
}

/// Numeric head of integral of D(z)/z over [sqrt(3)/2, 1].
pub fn profile_integral_head() -> f64 {
    let f = |z: f64| horoball_profile(z).unwrap().gap / z;
    adaptive_simpson(&f, Z_MIN, 1.0, 1e-10)
}

/// Integral of D(z)/z over [sqrt(3)/2, inf): closed-form tail
/// (integral of z^-2 over [1, inf) = 1) plus the quadrature head. The
/// value is pi/3, which cross-checks the profile's closed forms.
pub fn ideal_triangle_third_integral() -> f64 {
    1.0 + profile_integral_head()
}

#[cfg(test)]
mod tests {
    use super::*;

    const UNIT: CuspLattice = CuspLattice { m: (1.0, 0.0), l: (0.0, 1.0) };

    #[test]
    fn slope_length_pythagoras() {
        assert!((slope_length(&UNIT, 3, 4).unwrap() - 5.0).abs() < 1e-12);
        assert!((slope_length(&UNIT, 1, 0).unwrap() - 1.0).abs() < 1e-12);
        let lat = CuspLattice::new((4.0, 0.0), (0.0, 5.0)).unwrap();
        assert!((slope_length(&lat, 1, 1).unwrap() - 41f64.sqrt()).abs() < 1e-12);
        assert_eq!(slope_length(&UNIT, 0, 0), Err(GeomError::ZeroSlope));
    }

    #[test]
    fn slope_length_homogeneous() {
        let lat = CuspLattice::new((1.3, 0.4), (-0.2, 2.1)).unwrap();
        let base = slope_length(&lat, 2, -3).unwrap();
        assert!((slope_length(&lat, -6, 9).unwrap() - 3.0 * base).abs() < 1e-9);
    }

    #[test]
    fn delta_orthonormal_equality() {
        let d = delta_with_bound(&UNIT, (1, 0), (0, 1)).unwrap();
        assert_eq!(d.delta, 1);
        assert!((d.bound - 1.0).abs() < 1e-12);
        assert!(d.holds);
        let lat = CuspLattice::new((6.1, 0.0), (0.0, 6.1)).unwrap();
        let d = delta_with_bound(&lat, (1, 0), (0, 1)).unwrap();
        assert_eq!(d.delta, 1);
        assert!((d.bound - 1.0).abs() < 1e-12);
    }

    #[test]
    fn delta_rejects_equal_classes() {
        assert_eq!(delta_with_bound(&UNIT, (1, 2), (-1, -2)), Err(GeomError::EqualSlopes));
    }

    #[test]
    fn short_slopes_doubled_square() {
        let lat = CuspLattice::new((2.0, 0.0), (0.0, 2.0)).unwrap();
        let got: Vec<(i64, i64)> =
            short_slopes_euclidean(&lat, 6.0).into_iter().map(|(s, _)| s).collect();
        let mut want =
            vec![(1, 0), (0, 1), (1, 1), (1, -1), (2, 1), (1, 2), (2, -1), (1, -2)];
        want.sort();
        let mut got_sorted = got.clone();
        got_sorted.sort();
        assert_eq!(got_sorted, want);
    }

    #[test]
    fn short_slopes_below_shortest_vector_empty() {
        let lat = CuspLattice::new((2.0, 0.0), (0.0, 3.0)).unwrap();
        assert!(short_slopes_euclidean(&lat, 1.5).is_empty());
    }

    #[test]
    fn profile_junction_and_tail() {
        let p = horoball_profile(1.0).unwrap();
        assert!(p.radius.abs() < 1e-12 && (p.gap - 1.0).abs() < 1e-12);
        let p = horoball_profile(2.0).unwrap();
        assert!((p.gap - 0.5).abs() < 1e-12);
        let p = horoball_profile(Z_MIN).unwrap();
        assert!(p.gap.abs() < 1e-9);
        assert_eq!(horoball_profile(0.5), Err(GeomError::DomainError(0.5)));
    }

    #[test]
    fn profile_identity_on_head() {
        for k in 0..=100 {
            let z = Z_MIN + (1.0 - Z_MIN) * k as f64 / 100.0;
            let p = horoball_profile(z).unwrap();
            assert!((2.0 * p.radius + p.gap - 1.0 / z).abs() < 1e-12);
        }
    }

    #[test]
    fn third_integral() {
        let head = profile_integral_head();
        assert!((head - (std::f64::consts::PI / 3.0 - 1.0)).abs() < 1e-6, "head = {head}");
        let v = ideal_triangle_third_integral();
        assert!((v - std::f64::consts::PI / 3.0).abs() < 1e-6, "v = {v}");
    }
}
