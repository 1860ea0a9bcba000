//! Exact convex-polygon primitives shared by the polygon and map modules:
//! half-plane intersection, clipping, areas, and counter-clockwise ordering.

use std::cmp::Ordering;

use crate::exact::{LatticeVector, PlanePoint, QuadraticNumber};

/// The closed half-plane a*x + b*y >= c.
#[derive(Clone, Debug)]
pub struct HalfPlane {
    pub a: QuadraticNumber,
    pub b: QuadraticNumber,
    pub c: QuadraticNumber,
}

impl HalfPlane {
    pub fn new(a: QuadraticNumber, b: QuadraticNumber, c: QuadraticNumber) -> Self {
        HalfPlane { a, b, c }
    }

    pub fn from_int_normal(n: LatticeVector, c: QuadraticNumber) -> Self {
        HalfPlane::new(
            QuadraticNumber::from_int(n.x),
            QuadraticNumber::from_int(n.y),
            c,
        )
    }

    /// a*x + b*y - c; nonnegative inside.
    pub fn eval(&self, p: &PlanePoint) -> QuadraticNumber {
        &(&self.a * &p.x) + &(&self.b * &p.y) - &self.c
    }

    pub fn contains(&self, p: &PlanePoint) -> bool {
        self.eval(p).sign() != Ordering::Less
    }
}

/// Intersection point of the two boundary lines, if they are not parallel.
pub fn line_intersection(h1: &HalfPlane, h2: &HalfPlane) -> Option<PlanePoint> {
    let det = &(&h1.a * &h2.b) - &(&h1.b * &h2.a);
    if det.is_zero() {
        return None;
    }
    let x = (&(&h1.c * &h2.b) - &(&h1.b * &h2.c)).checked_div(&det).ok()?;
    let y = (&(&h1.a * &h2.c) - &(&h1.c * &h2.a)).checked_div(&det).ok()?;
    Some(PlanePoint::new(x, y))
}

pub fn dedup_points(points: &mut Vec<PlanePoint>) {
    let mut out: Vec<PlanePoint> = Vec::with_capacity(points.len());
    for p in points.drain(..) {
        if !out.contains(&p) {
            out.push(p);
        }
    }
    *points = out;
}

fn centroid(points: &[PlanePoint]) -> PlanePoint {
    let n = points.len() as i64;
    let mut sx = QuadraticNumber::zero();
    let mut sy = QuadraticNumber::zero();
    for p in points {
        sx = &sx + &p.x;
        sy = &sy + &p.y;
    }
    PlanePoint::new(sx.div_int(n), sy.div_int(n))
}

/// Order the points of a convex set counter-clockwise around their centroid.
pub fn sort_ccw(points: &mut [PlanePoint]) {
    if points.len() < 3 {
        return;
    }
    let c = centroid(points);
    let lower = |p: &PlanePoint| -> bool {
        let (dx, dy) = p.sub(&c);
        match dy.sign() {
            Ordering::Less => true,
            Ordering::Greater => false,
            Ordering::Equal => dx.sign() == Ordering::Less,
        }
    };
    points.sort_by(|p, q| {
        let (lp, lq) = (lower(p), lower(q));
        if lp != lq {
            return if lp { Ordering::Greater } else { Ordering::Less };
        }
        let (px, py) = p.sub(&c);
        let (qx, qy) = q.sub(&c);
        let cross = &(&px * &qy) - &(&py * &qx);
        match cross.sign() {
            Ordering::Greater => Ordering::Less,
            Ordering::Less => Ordering::Greater,
            Ordering::Equal => Ordering::Equal,
        }
    });
}

/// Vertices of the intersection of closed half-planes, counter-clockwise.
/// The result may be empty, a single point, or a segment when the region
/// is degenerate.
pub fn vertices_from_halfplanes(hs: &[HalfPlane]) -> Vec<PlanePoint> {
    let mut vertices = Vec::new();
    for i in 0..hs.len() {
        for j in (i + 1)..hs.len() {
            let Some(p) = line_intersection(&hs[i], &hs[j]) else {
                continue;
            };
            if hs.iter().all(|h| h.contains(&p)) {
                vertices.push(p);
            }
        }
    }
    dedup_points(&mut vertices);
    sort_ccw(&mut vertices);
    vertices
}

/// The half-planes bounding a counter-clockwise convex polygon.
pub fn edges_as_halfplanes(poly: &[PlanePoint]) -> Vec<HalfPlane> {
    let n = poly.len();
    (0..n)
        .map(|i| {
            let p = &poly[i];
            let q = &poly[(i + 1) % n];
            let (dx, dy) = q.sub(p);
            // inward normal of a counter-clockwise edge is the left normal
            let a = -dy;
            let b = dx;
            let c = &(&a * &p.x) + &(&b * &p.y);
            HalfPlane::new(a, b, c)
        })
        .collect()
}

/// Twice the signed area (shoelace); positive for counter-clockwise.
pub fn area2(poly: &[PlanePoint]) -> QuadraticNumber {
    let n = poly.len();
    let mut acc = QuadraticNumber::zero();
    if n < 3 {
        return acc;
    }
    for i in 0..n {
        let p = &poly[i];
        let q = &poly[(i + 1) % n];
        acc = &acc + &(&(&p.x * &q.y) - &(&p.y * &q.x));
    }
    acc
}

/// Sutherland-Hodgman clip of a counter-clockwise convex polygon by closed
/// half-planes; exact, result counter-clockwise (possibly degenerate).
pub fn clip(subject: &[PlanePoint], hs: &[HalfPlane]) -> Vec<PlanePoint> {
    let mut poly: Vec<PlanePoint> = subject.to_vec();
    for h in hs {
        if poly.is_empty() {
            break;
        }
        let mut out: Vec<PlanePoint> = Vec::new();
        let n = poly.len();
        for i in 0..n {
            let cur = &poly[i];
            let nxt = &poly[(i + 1) % n];
            let vc = h.eval(cur);
            let vn = h.eval(nxt);
            let cur_in = vc.sign() != Ordering::Less;
            let nxt_in = vn.sign() != Ordering::Less;
            if cur_in {
                out.push(cur.clone());
            }
            if cur_in != nxt_in {
                let denom = &vc - &vn;
                let t = vc.checked_div(&denom).expect("crossing edge has nonzero span");
                let (dx, dy) = nxt.sub(cur);
                out.push(PlanePoint::new(&cur.x + &(&t * &dx), &cur.y + &(&t * &dy)));
            }
        }
        dedup_points(&mut out);
        poly = out;
    }
    poly
}

/// Exact area (doubled) of the overlap of two counter-clockwise convex
/// polygons; zero when interiors are disjoint.
pub fn overlap_area2(p: &[PlanePoint], q: &[PlanePoint]) -> QuadraticNumber {
    if p.len() < 3 || q.len() < 3 {
        return QuadraticNumber::zero();
    }
    let inter = clip(p, &edges_as_halfplanes(q));
    area2(&inter)
}

pub fn midpoint(p: &PlanePoint, q: &PlanePoint) -> PlanePoint {
    PlanePoint::new(
        (&p.x + &q.x).div_int(2),
        (&p.y + &q.y).div_int(2),
    )
}

/// Deterministic low-discrepancy rational in [0, 1): the van der Corput
/// radical inverse of i in the given base.
pub fn van_der_corput(mut i: u64, base: u64) -> num_rational::BigRational {
    use num_bigint::BigInt;
    let mut num = BigInt::from(0);
    let mut den = BigInt::from(1);
    while i > 0 {
        num = num * base + BigInt::from(i % base);
        den *= base;
        i /= base;
    }
    num_rational::BigRational::new(num, den)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(s: &str) -> QuadraticNumber {
        s.parse().unwrap()
    }

    fn pt(x: &str, y: &str) -> PlanePoint {
        PlanePoint::new(q(x), q(y))
    }

    fn unit_square() -> Vec<PlanePoint> {
        vec![pt("0", "0"), pt("1", "0"), pt("1", "1"), pt("0", "1")]
    }

    #[test]
    fn halfplane_intersection_recovers_square() {
        let hs = edges_as_halfplanes(&unit_square());
        let mut vs = vertices_from_halfplanes(&hs);
        sort_ccw(&mut vs);
        assert_eq!(vs.len(), 4);
        assert_eq!(area2(&vs), q("2"));
    }

    #[test]
    fn clip_square_by_diagonal() {
        let hs = [HalfPlane::new(q("1"), q("1"), q("1"))]; // x + y >= 1
        let out = clip(&unit_square(), &hs);
        assert_eq!(area2(&out), q("1")); // half of the doubled area 2
    }

    #[test]
    fn overlap_of_disjoint_is_zero() {
        let a = unit_square();
        let b: Vec<_> = unit_square()
            .into_iter()
            .map(|p| PlanePoint::new(&p.x + &q("1"), p.y))
            .collect();
        assert!(overlap_area2(&a, &b).is_zero());
    }

    #[test]
    fn van_der_corput_is_low_discrepancy_prefix() {
        let v: Vec<_> = (0..4).map(|i| van_der_corput(i, 2)).collect();
        let expect: Vec<num_rational::BigRational> = vec![
            num_rational::BigRational::new(0.into(), 1.into()),
            num_rational::BigRational::new(1.into(), 2.into()),
            num_rational::BigRational::new(1.into(), 4.into()),
            num_rational::BigRational::new(3.into(), 4.into()),
        ];
        assert_eq!(v, expect);
    }
}
