//! Delzant polygons with the integral affine height function (distance to
//! the boundary), the ridge where it is maximal, level curves of the inner
//! parallel body, and their exact lattice lengths.
//!
//! The level-length computation here is pure offset geometry and serves as
//! the independent oracle for the closed-form length function elsewhere.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exact::{
    primitive_decompose, ExactError, LatticeVector, PlanePoint, QuadraticNumber,
};
use crate::geom::{vertices_from_halfplanes, HalfPlane};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PolygonError {
    #[error("a polygon needs at least 3 vertices")]
    TooFewVertices,
    #[error("degenerate vertex {0}: repeated or collinear points")]
    DegenerateVertex(usize),
    #[error("polygon is not convex counter-clockwise at vertex {0}")]
    NotConvex(usize),
    #[error("edge {0} does not have a lattice-rational direction")]
    IrrationalEdge(usize),
    #[error("point lies outside the polygon")]
    OutsidePolygon,
    #[error("height is at or above the ridge")]
    AboveRidge,
    #[error("height is negative")]
    NegativeHeight,
    #[error("exact arithmetic: {0}")]
    Exact(#[from] ExactError),
}

#[derive(Clone, Debug)]
struct Edge {
    dir: LatticeVector,
    normal: LatticeVector,
    support: QuadraticNumber,
}

/// The maximum-height set: a single point or a lattice-rational segment.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RidgeSet {
    Point(PlanePoint),
    Segment(PlanePoint, PlanePoint),
}

/// Ridge data: the maximal height, the set where it is attained, and the
/// integral affine length of that set (the width).
#[derive(Clone, Debug)]
pub struct Ridge {
    pub max_height: QuadraticNumber,
    pub set: RidgeSet,
    pub width: QuadraticNumber,
}

/// Per-vertex determinants of the adjacent primitive edge directions; the
/// polygon is Delzant exactly when every determinant is +1 or -1.
#[derive(Clone, Debug, Serialize)]
pub struct ValidationReport {
    pub vertex_dets: Vec<i64>,
    pub passes: bool,
}

/// One level set of the height function: a closed counter-clockwise chain
/// of lattice-rational segments.
#[derive(Clone, Debug)]
pub struct LevelCurve {
    pub height: QuadraticNumber,
    pub segments: Vec<(PlanePoint, PlanePoint)>,
}

/// A convex polygon with counter-clockwise vertices whose edge directions
/// are lattice-rational. Vertices may have irrational coordinates as long
/// as every edge direction stays rational.
#[derive(Clone, Debug)]
pub struct DelzantPolygon {
    vertices: Vec<PlanePoint>,
    edges: Vec<Edge>,
    ridge: Ridge,
}

/// On-disk form: vertex coordinate pairs in the exact literal grammar.
#[derive(Serialize, Deserialize)]
pub struct PolygonFile {
    pub vertices: Vec<[QuadraticNumber; 2]>,
    pub d: u64,
}

impl DelzantPolygon {
    pub fn new(vertices: Vec<PlanePoint>) -> Result<Self, PolygonError> {
        let n = vertices.len();
        if n < 3 {
            return Err(PolygonError::TooFewVertices);
        }
        let mut edges = Vec::with_capacity(n);
        for i in 0..n {
            let p = &vertices[i];
            let q = &vertices[(i + 1) % n];
            let (dir, _) = primitive_decompose(p, q).map_err(|e| match e {
                ExactError::DegenerateSegment => PolygonError::DegenerateVertex(i),
                ExactError::IrrationalDirection => PolygonError::IrrationalEdge(i),
                other => PolygonError::Exact(other),
            })?;
            let normal = dir.perp_left();
            let support = QuadraticNumber::from_int(normal.x) * p.x.clone()
                + QuadraticNumber::from_int(normal.y) * p.y.clone();
            edges.push(Edge {
                dir,
                normal,
                support,
            });
        }
        for i in 0..n {
            let prev = &edges[(i + n - 1) % n];
            let cur = &edges[i];
            let det = prev.dir.det(&cur.dir);
            match det.cmp(&0) {
                Ordering::Equal => return Err(PolygonError::DegenerateVertex(i)),
                Ordering::Less => return Err(PolygonError::NotConvex(i)),
                Ordering::Greater => {}
            }
        }
        let ridge = compute_ridge(&edges)?;
        Ok(DelzantPolygon {
            vertices,
            edges,
            ridge,
        })
    }

    pub fn from_file(file: &PolygonFile) -> Result<Self, PolygonError> {
        let verts = file
            .vertices
            .iter()
            .map(|[x, y]| PlanePoint::new(x.clone(), y.clone()))
            .collect();
        Self::new(verts)
    }

    pub fn vertices(&self) -> &[PlanePoint] {
        &self.vertices
    }

    /// An axis-aligned rectangle [0, a] x [0, b].
    pub fn rectangle(a: &QuadraticNumber, b: &QuadraticNumber) -> Result<Self, PolygonError> {
        let zero = QuadraticNumber::zero;
        Self::new(vec![
            PlanePoint::new(zero(), zero()),
            PlanePoint::new(a.clone(), zero()),
            PlanePoint::new(a.clone(), b.clone()),
            PlanePoint::new(zero(), b.clone()),
        ])
    }

    /// Per-vertex determinant report for the smoothness condition: at every
    /// vertex the two primitive edge directions pointing away from it must
    /// span the lattice.
    pub fn delzant_check(&self) -> ValidationReport {
        let n = self.edges.len();
        let mut dets = Vec::with_capacity(n);
        for i in 0..n {
            let away_next = self.edges[i].dir;
            let away_prev = -self.edges[(i + n - 1) % n].dir;
            dets.push(away_next.det(&away_prev));
        }
        let passes = dets.iter().all(|d| *d == 1 || *d == -1);
        ValidationReport {
            vertex_dets: dets,
            passes,
        }
    }

    /// Integral affine distance from x to the boundary: the minimum of the
    /// inward edge functionals. Zero exactly on the boundary.
    pub fn height(&self, x: &PlanePoint) -> Result<QuadraticNumber, PolygonError> {
        let mut best: Option<QuadraticNumber> = None;
        for e in &self.edges {
            let v = HalfPlane::from_int_normal(e.normal, e.support.clone()).eval(x);
            if v.sign() == Ordering::Less {
                return Err(PolygonError::OutsidePolygon);
            }
            best = Some(match best {
                Some(b) if b <= v => b,
                _ => v,
            });
        }
        Ok(best.expect("polygon has edges"))
    }

    pub fn ridge(&self) -> &Ridge {
        &self.ridge
    }

    pub fn max_height(&self) -> &QuadraticNumber {
        &self.ridge.max_height
    }

    fn offset_halfplanes(&self, h: &QuadraticNumber) -> Vec<HalfPlane> {
        self.edges
            .iter()
            .map(|e| HalfPlane::from_int_normal(e.normal, &e.support + h))
            .collect()
    }

    /// Boundary chain of the inner parallel body at offset h, oriented
    /// counter-clockwise; the boundary itself at h = 0.
    pub fn level_curve(&self, h: &QuadraticNumber) -> Result<LevelCurve, PolygonError> {
        if h.is_negative() {
            return Err(PolygonError::NegativeHeight);
        }
        if *h >= self.ridge.max_height {
            return Err(PolygonError::AboveRidge);
        }
        let verts = vertices_from_halfplanes(&self.offset_halfplanes(h));
        debug_assert!(verts.len() >= 3, "inner body below the ridge is full");
        let n = verts.len();
        let segments = (0..n)
            .map(|i| (verts[i].clone(), verts[(i + 1) % n].clone()))
            .collect();
        Ok(LevelCurve {
            height: h.clone(),
            segments,
        })
    }

    /// Integral affine length of the level curve: the sum of primitive
    /// lattice lengths of its segments.
    pub fn level_length(&self, h: &QuadraticNumber) -> Result<QuadraticNumber, PolygonError> {
        let curve = self.level_curve(h)?;
        let mut total = QuadraticNumber::zero();
        for (p, q) in &curve.segments {
            let (_, t) = primitive_decompose(p, q)?;
            total = &total + &t;
        }
        Ok(total)
    }
}

/// Exact maximization of the height function by enumerating candidate
/// active sets: pairs of opposite edges and triples of edges in general
/// position. The argmax set is then reconstructed from the offset
/// half-planes at the optimum.
fn compute_ridge(edges: &[Edge]) -> Result<Ridge, PolygonError> {
    let n = edges.len();
    let mut best: Option<QuadraticNumber> = None;
    let mut consider = |t: QuadraticNumber, feasible: bool| {
        if feasible {
            best = Some(match best.take() {
                Some(b) if b >= t => b,
                _ => t,
            });
        }
    };

    // opposite-edge pairs: t is forced to -(c_i + c_j)/2, feasibility is a
    // one-dimensional interval along the shared line
    for i in 0..n {
        for j in (i + 1)..n {
            if edges[j].normal != -edges[i].normal {
                continue;
            }
            let t = (&edges[i].support + &edges[j].support).div_int(-2);
            let feasible = !segment_at_offset(edges, i, &t).is_empty();
            consider(t, feasible);
        }
    }

    // triples in general position
    for i in 0..n {
        for j in (i + 1)..n {
            for k in (j + 1)..n {
                let (ni, nj, nk) = (edges[i].normal, edges[j].normal, edges[k].normal);
                // unknowns (x, y, t), rows n.x * x + n.y * y - t = c
                let det = det3i(
                    [ni.x, ni.y, -1],
                    [nj.x, nj.y, -1],
                    [nk.x, nk.y, -1],
                );
                if det == 0 {
                    continue;
                }
                let (ci, cj, ck) = (
                    edges[i].support.clone(),
                    edges[j].support.clone(),
                    edges[k].support.clone(),
                );
                let dx = det3_col1(&ci, &cj, &ck, [ni.y, nj.y, nk.y]);
                let dy = det3_col2([ni.x, nj.x, nk.x], &ci, &cj, &ck);
                let dt = det3_col3([ni.x, nj.x, nk.x], [ni.y, nj.y, nk.y], &ci, &cj, &ck);
                let x = dx.div_int(det);
                let y = dy.div_int(det);
                let t = dt.div_int(det);
                let p = PlanePoint::new(x, y);
                let feasible = edges.iter().all(|e| {
                    HalfPlane::from_int_normal(e.normal, &e.support + &t).contains(&p)
                });
                consider(t, feasible);
            }
        }
    }

    let max_height = best.ok_or(PolygonError::TooFewVertices)?;
    let hs: Vec<HalfPlane> = edges
        .iter()
        .map(|e| HalfPlane::from_int_normal(e.normal, &e.support + &max_height))
        .collect();
    let mut pts = vertices_from_halfplanes(&hs);
    // the argmax set of a concave piecewise-linear function is a point or a
    // segment; its extreme points each activate two independent constraints
    debug_assert!(!pts.is_empty() && pts.len() <= 2);
    let (set, width) = if pts.len() >= 2 {
        let q = pts.pop().expect("two points");
        let p = pts.pop().expect("two points");
        let (_, w) = primitive_decompose(&p, &q)?;
        (RidgeSet::Segment(p, q), w)
    } else {
        let p = pts.pop().ok_or(PolygonError::TooFewVertices)?;
        (RidgeSet::Point(p), QuadraticNumber::zero())
    };
    Ok(Ridge {
        max_height,
        set,
        width,
    })
}

/// Feasible parameter interval along the line where edge i is tight at
/// offset t; returns the endpoints (empty when infeasible).
fn segment_at_offset(edges: &[Edge], i: usize, t: &QuadraticNumber) -> Vec<PlanePoint> {
    let e = &edges[i];
    let rhs = &e.support + t;
    let base = if e.normal.x != 0 {
        PlanePoint::new(
            rhs.div_int(e.normal.x),
            QuadraticNumber::zero(),
        )
    } else {
        PlanePoint::new(
            QuadraticNumber::zero(),
            rhs.div_int(e.normal.y),
        )
    };
    let dir = LatticeVector::new(-e.normal.y, e.normal.x);
    let mut lo: Option<QuadraticNumber> = None;
    let mut hi: Option<QuadraticNumber> = None;
    for f in edges {
        let coef = f.normal.dot(&dir);
        let val = HalfPlane::from_int_normal(f.normal, &f.support + t).eval(&base);
        if coef == 0 {
            if val.sign() == Ordering::Less {
                return Vec::new();
            }
            continue;
        }
        let bound = (-&val).div_int(coef);
        if coef > 0 {
            if lo.as_ref().is_none_or(|l| bound > *l) {
                lo = Some(bound);
            }
        } else if hi.as_ref().is_none_or(|h| bound < *h) {
            hi = Some(bound);
        }
    }
    match (lo, hi) {
        (Some(l), Some(h)) if l <= h => {
            let at = |s: &QuadraticNumber| {
                PlanePoint::new(
                    &base.x + &s.mul_int(dir.x),
                    &base.y + &s.mul_int(dir.y),
                )
            };
            vec![at(&l), at(&h)]
        }
        _ => Vec::new(),
    }
}

fn det3i(r0: [i64; 3], r1: [i64; 3], r2: [i64; 3]) -> i64 {
    r0[0] * (r1[1] * r2[2] - r1[2] * r2[1]) - r0[1] * (r1[0] * r2[2] - r1[2] * r2[0])
        + r0[2] * (r1[0] * r2[1] - r1[1] * r2[0])
}

// Cramer numerators for the system (n.x, n.y, -1) * (x, y, t) = c with the
// indicated column replaced by the exact right-hand sides.
fn det3_col1(
    c0: &QuadraticNumber,
    c1: &QuadraticNumber,
    c2: &QuadraticNumber,
    ny: [i64; 3],
) -> QuadraticNumber {
    // | c0 ny0 -1 ; c1 ny1 -1 ; c2 ny2 -1 |
    c0.mul_int(-ny[1] + ny[2]) + c1.mul_int(ny[0] - ny[2]) + c2.mul_int(-ny[0] + ny[1])
}

fn det3_col2(
    nx: [i64; 3],
    c0: &QuadraticNumber,
    c1: &QuadraticNumber,
    c2: &QuadraticNumber,
) -> QuadraticNumber {
    // | nx0 c0 -1 ; nx1 c1 -1 ; nx2 c2 -1 |
    c0.mul_int(nx[1] - nx[2]) + c1.mul_int(nx[2] - nx[0]) + c2.mul_int(nx[0] - nx[1])
}

fn det3_col3(
    nx: [i64; 3],
    ny: [i64; 3],
    c0: &QuadraticNumber,
    c1: &QuadraticNumber,
    c2: &QuadraticNumber,
) -> QuadraticNumber {
    // | nx0 ny0 c0 ; nx1 ny1 c1 ; nx2 ny2 c2 |
    c0.mul_int(nx[1] * ny[2] - nx[2] * ny[1])
        + c1.mul_int(nx[2] * ny[0] - nx[0] * ny[2])
        + c2.mul_int(nx[0] * ny[1] - nx[1] * ny[0])
}
