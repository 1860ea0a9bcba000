//! Piecewise unimodular-affine maps on chart domains, the translation
//! action along level circles, and the construction and verification of
//! the isomorphism that rotates every level set clockwise by twice its
//! distance to the ridge.
//!
//! The map is built per height chunk of the domain outside the excluded
//! neighbourhoods: a global shear with linear part [[1, 2], [0, 1]] moves
//! every level by -2(M - h); the overflow past the seam is cut off and
//! carried back by the level-circumference deck translation, whose linear
//! part on a chunk with g(h) = A + Bh is [[1, mB], [0, 1]] for an m-fold
//! wrap. Every piece is a convex polygon and every linear part is
//! unimodular; the defining property is checked by `verify_iso`.

use std::cmp::Ordering;

use num_bigint::BigInt;
use serde::Serialize;
use thiserror::Error;

use crate::canonical::CanonicalType;
use crate::chart::NodalChart;
use crate::exact::{monodromy, PlanePoint, QuadraticNumber, UnimodularMatrix};
use crate::geom::{
    area2, clip, edges_as_halfplanes, midpoint, overlap_area2, van_der_corput,
    vertices_from_halfplanes, HalfPlane,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MapError {
    #[error("height lies in an excluded neighbourhood")]
    InExcludedSet,
    #[error("height out of range: {0}")]
    OutOfRange(&'static str),
    #[error("composition domains do not match")]
    DomainMismatch,
    #[error("invalid canonical data: {0}")]
    InvalidType(String),
    #[error("exact arithmetic: {0}")]
    Exact(#[from] crate::exact::ExactError),
}

impl From<crate::canonical::CanonicalError> for MapError {
    fn from(e: crate::canonical::CanonicalError) -> Self {
        MapError::InvalidType(e.to_string())
    }
}

impl From<crate::chart::ChartError> for MapError {
    fn from(e: crate::chart::ChartError) -> Self {
        MapError::InvalidType(e.to_string())
    }
}

/// One affine piece: a convex region, an integer unimodular linear part,
/// and an exact translation.
#[derive(Clone, Debug)]
pub struct Piece {
    pub region: Vec<PlanePoint>,
    pub linear: UnimodularMatrix,
    pub shift: (QuadraticNumber, QuadraticNumber),
}

impl Piece {
    pub fn apply(&self, p: &PlanePoint) -> PlanePoint {
        let (x, y) = self.linear.apply(&p.x, &p.y);
        PlanePoint::new(&x + &self.shift.0, &y + &self.shift.1)
    }

    pub fn contains(&self, p: &PlanePoint) -> bool {
        edges_as_halfplanes(&self.region).iter().all(|h| h.contains(p))
    }

    /// Image polygon, counter-clockwise (an orientation-reversing linear
    /// part flips the vertex order).
    pub fn image(&self) -> Vec<PlanePoint> {
        let mut out: Vec<PlanePoint> = self.region.iter().map(|p| self.apply(p)).collect();
        if self.linear.det() < 0 {
            out.reverse();
        }
        out
    }

    fn inverse(&self) -> Piece {
        let inv = self.linear.inverse();
        let (sx, sy) = inv.apply(&self.shift.0, &self.shift.1);
        Piece {
            region: self.image(),
            linear: inv,
            shift: (-sx, -sy),
        }
    }
}

/// A piecewise unimodular-affine map with declared domain and codomain
/// (lists of convex chunks the pieces must tile).
#[derive(Clone, Debug)]
pub struct PiecewiseUnimodularMap {
    pub pieces: Vec<Piece>,
    pub domain: Vec<Vec<PlanePoint>>,
    pub codomain: Vec<Vec<PlanePoint>>,
}

impl PiecewiseUnimodularMap {
    /// Evaluate at a point of the domain: the first piece whose closed
    /// region contains it decides. On a seam two pieces disagree by a deck
    /// translation only, so the choice is immaterial modulo the level
    /// circumference.
    pub fn apply(&self, p: &PlanePoint) -> Option<PlanePoint> {
        self.pieces
            .iter()
            .find(|piece| piece.contains(p))
            .map(|piece| piece.apply(p))
    }

    pub fn inverse(&self) -> PiecewiseUnimodularMap {
        PiecewiseUnimodularMap {
            pieces: self.pieces.iter().map(Piece::inverse).collect(),
            domain: self.codomain.clone(),
            codomain: self.domain.clone(),
        }
    }

    /// outer after inner, on the common refinement of the pieces.
    pub fn compose(
        outer: &PiecewiseUnimodularMap,
        inner: &PiecewiseUnimodularMap,
    ) -> Result<PiecewiseUnimodularMap, MapError> {
        if outer.domain != inner.codomain {
            return Err(MapError::DomainMismatch);
        }
        let mut pieces = Vec::new();
        for pin in &inner.pieces {
            let inv = pin.linear.inverse();
            let (bx, by) = inv.apply(&pin.shift.0, &pin.shift.1);
            for pout in &outer.pieces {
                // pull the outer region back through the inner affine map:
                // x -> L^{-1} x - L^{-1} s
                let mut pulled: Vec<PlanePoint> = pout
                    .region
                    .iter()
                    .map(|p| {
                        let (x, y) = inv.apply(&p.x, &p.y);
                        PlanePoint::new(&x - &bx, &y - &by)
                    })
                    .collect();
                if inv.det() < 0 {
                    pulled.reverse();
                }
                let region = clip(&pin.region, &edges_as_halfplanes(&pulled));
                if area2(&region).sign() != Ordering::Greater {
                    continue;
                }
                let linear = pout.linear.mul(&pin.linear);
                let (ix, iy) = pout.linear.apply(&pin.shift.0, &pin.shift.1);
                let shift = (&ix + &pout.shift.0, &iy + &pout.shift.1);
                pieces.push(Piece {
                    region,
                    linear,
                    shift,
                });
            }
        }
        Ok(PiecewiseUnimodularMap {
            pieces,
            domain: inner.domain.clone(),
            codomain: outer.codomain.clone(),
        })
    }
}

/// Translation along the level circle at height h by integral affine
/// distance t, clockwise (decreasing chart coordinate), wrapped into the
/// fundamental domain.
pub fn translate_along_level(
    chart: &NodalChart,
    u: &QuadraticNumber,
    h: &QuadraticNumber,
    t: &QuadraticNumber,
) -> Result<QuadraticNumber, MapError> {
    let ctype = chart.ctype();
    if h.is_negative() || h >= ctype.max_height() {
        return Err(MapError::OutOfRange("height must lie in [0, M)"));
    }
    if ctype.excluded_set().contains(h) {
        return Err(MapError::InExcludedSet);
    }
    let g = chart.width_at(h)?;
    Ok((u - t).rem_euclid(&g)?)
}

/// The circle translation induced at one height: circumference g(h) and a
/// normalized clockwise offset.
#[derive(Clone, Debug)]
pub struct CircleAction {
    pub h: QuadraticNumber,
    pub circumference: QuadraticNumber,
    pub offset: QuadraticNumber,
}

impl CircleAction {
    pub fn new(
        chart: &NodalChart,
        h: &QuadraticNumber,
        t: &QuadraticNumber,
    ) -> Result<Self, MapError> {
        let circumference = chart.width_at(h)?;
        let offset = t.rem_euclid(&circumference)?;
        Ok(CircleAction {
            h: h.clone(),
            circumference,
            offset,
        })
    }

    pub fn apply(&self, u: &QuadraticNumber) -> QuadraticNumber {
        (u - &self.offset)
            .rem_euclid(&self.circumference)
            .expect("positive circumference")
    }
}

/// The domain chunks of a type: for each maximal height interval outside
/// the excluded set, the trapezoid {0 <= u <= g(h)} (g is affine there).
pub fn domain_chunks(ctype: &CanonicalType) -> Result<Vec<Vec<PlanePoint>>, MapError> {
    let mut chunks = Vec::new();
    for (lo, hi) in ctype.excluded_set().complement_intervals() {
        let g_lo = ctype.level_length(&lo)?;
        let g_hi = ctype.level_length(&hi)?;
        chunks.push(vec![
            PlanePoint::new(QuadraticNumber::zero(), lo.clone()),
            PlanePoint::new(g_lo, lo),
            PlanePoint::new(g_hi, hi.clone()),
            PlanePoint::new(QuadraticNumber::zero(), hi),
        ]);
    }
    Ok(chunks)
}

struct RawPiece {
    region: Vec<PlanePoint>,
    wraps: i64,
    intercept: QuadraticNumber,
    slope: i64,
}

/// Enumerate the convex pieces of the level translation: on every chunk,
/// one region per wrap count m, cut out by 0 <= u - 2(M - h) + m g(h) < g(h).
fn raw_translation_pieces(ctype: &CanonicalType) -> Result<Vec<RawPiece>, MapError> {
    let two_m = ctype.max_height().mul_int(2);
    let mut out = Vec::new();
    for piece_data in chunk_lines(ctype)? {
        let ChunkLine {
            lo,
            hi,
            intercept: a,
            slope: b,
        } = piece_data;
        // wraps needed: m(u, h) = ceil((2(M - h) - u) / g(h)); extremal at
        // the corners because the ratio of affine functions is monotone
        let needed = |h: &QuadraticNumber| -> Result<BigInt, MapError> {
            let g = ctype.level_length(h)?;
            Ok((&two_m - &h.mul_int(2)).checked_div(&g)?.ceil_int())
        };
        let m_max = needed(&lo)?.max(needed(&hi)?);
        let mut m = BigInt::from(0);
        while m <= m_max {
            let mi =
                i64::try_from(m.clone()).map_err(|_| crate::exact::ExactError::LatticeOverflow)?;
            // constraints: h in [lo, hi], 0 <= u <= g(h),
            //   0 <= u - 2(M - h) + m g(h) <= g(h)
            let hs = vec![
                HalfPlane::new(QuadraticNumber::zero(), QuadraticNumber::one(), lo.clone()),
                HalfPlane::new(
                    QuadraticNumber::zero(),
                    QuadraticNumber::from_int(-1),
                    -hi.clone(),
                ),
                HalfPlane::new(
                    QuadraticNumber::one(),
                    QuadraticNumber::zero(),
                    QuadraticNumber::zero(),
                ),
                HalfPlane::new(
                    QuadraticNumber::from_int(-1),
                    QuadraticNumber::from_int(b),
                    -a.clone(),
                ),
                HalfPlane::new(
                    QuadraticNumber::one(),
                    QuadraticNumber::from_int(2 + mi * b),
                    &two_m - &a.mul_int(mi),
                ),
                HalfPlane::new(
                    QuadraticNumber::from_int(-1),
                    QuadraticNumber::from_int(-(2 + (mi - 1) * b)),
                    -(&two_m - &a.mul_int(mi - 1)),
                ),
            ];
            let region = vertices_from_halfplanes(&hs);
            if area2(&region).sign() == Ordering::Greater {
                out.push(RawPiece {
                    region,
                    wraps: mi,
                    intercept: a.clone(),
                    slope: b,
                });
            }
            m += 1;
        }
    }
    Ok(out)
}

/// Build the level-translation isomorphism of a canonical type: clockwise
/// by 2(M - h) on each level circle, as a piecewise map on the domain
/// chunks. Piece linear parts are [[1, 2 + mB], [0, 1]] where B is the
/// slope of g on the chunk and m the wrap count.
pub fn build_level_translation(ctype: &CanonicalType) -> Result<PiecewiseUnimodularMap, MapError> {
    let chunks = domain_chunks(ctype)?;
    let two_m = ctype.max_height().mul_int(2);
    let pieces = raw_translation_pieces(ctype)?
        .into_iter()
        .map(|raw| {
            let linear = UnimodularMatrix::new([[1, 2 + raw.wraps * raw.slope], [0, 1]])
                .expect("upper triangular with unit diagonal");
            let shift = (
                &raw.intercept.mul_int(raw.wraps) - &two_m,
                QuadraticNumber::zero(),
            );
            Piece {
                region: raw.region,
                linear,
                shift,
            }
        })
        .collect();
    Ok(PiecewiseUnimodularMap {
        pieces,
        domain: chunks.clone(),
        codomain: chunks,
    })
}

/// The translation factored as reglue after shear: the shear is a single
/// affine piece per chunk with the linear part [[1, 2], [0, 1]] and shift
/// -2M; the reglue pieces carry the seam wraparound, adding m times the
/// level circumference. Composing reglue after shear reproduces the
/// translation map exactly, and each reglue linear part is the axis-swap
/// conjugate of a power of the cut shear [[1, 0], [-1, 1]].
pub struct TranslationFactorization {
    pub shear: PiecewiseUnimodularMap,
    pub reglue: PiecewiseUnimodularMap,
}

pub fn translation_factorization(ctype: &CanonicalType) -> Result<TranslationFactorization, MapError> {
    let chunks = domain_chunks(ctype)?;
    let two_m = ctype.max_height().mul_int(2);
    let shear_linear = UnimodularMatrix::upper_shear(2);
    let shear_shift = (-two_m.clone(), QuadraticNumber::zero());
    let shear_pieces: Vec<Piece> = chunks
        .iter()
        .map(|chunk| Piece {
            region: chunk.clone(),
            linear: shear_linear,
            shift: shear_shift.clone(),
        })
        .collect();
    let sheared_chunks: Vec<Vec<PlanePoint>> =
        shear_pieces.iter().map(Piece::image).collect();
    let shear = PiecewiseUnimodularMap {
        pieces: shear_pieces,
        domain: chunks.clone(),
        codomain: sheared_chunks.clone(),
    };
    let shear_one = Piece {
        region: Vec::new(),
        linear: shear_linear,
        shift: shear_shift,
    };
    let reglue_pieces: Vec<Piece> = raw_translation_pieces(ctype)?
        .into_iter()
        .map(|raw| {
            let mut region: Vec<PlanePoint> =
                raw.region.iter().map(|p| shear_one.apply(p)).collect();
            if shear_linear.det() < 0 {
                region.reverse();
            }
            let linear = UnimodularMatrix::new([[1, raw.wraps * raw.slope], [0, 1]])
                .expect("upper triangular with unit diagonal");
            let shift = (raw.intercept.mul_int(raw.wraps), QuadraticNumber::zero());
            Piece {
                region,
                linear,
                shift,
            }
        })
        .collect();
    let reglue = PiecewiseUnimodularMap {
        pieces: reglue_pieces,
        domain: sheared_chunks,
        codomain: chunks,
    };
    Ok(TranslationFactorization { shear, reglue })
}

struct ChunkLine {
    lo: QuadraticNumber,
    hi: QuadraticNumber,
    intercept: QuadraticNumber,
    slope: i64,
}

/// The affine data of g restricted to each domain chunk (every chunk lies
/// inside a single linearity piece because breakpoints are excluded).
fn chunk_lines(ctype: &CanonicalType) -> Result<Vec<ChunkLine>, MapError> {
    let pieces = ctype.pieces();
    let mut out = Vec::new();
    for (lo, hi) in ctype.excluded_set().complement_intervals() {
        let line = pieces
            .iter()
            .find(|p| p.lo <= lo && hi <= p.hi)
            .ok_or(MapError::OutOfRange(
                "domain chunk spans a breakpoint of the length function",
            ))?;
        out.push(ChunkLine {
            lo,
            hi,
            intercept: line.intercept.clone(),
            slope: line.slope,
        });
    }
    Ok(out)
}

/// Outcome of one verification check.
#[derive(Clone, Debug, Serialize)]
pub struct CheckOutcome {
    pub name: String,
    pub passed: bool,
    pub detail: Option<String>,
}

/// A full verification report; passes when every check does.
#[derive(Clone, Debug, Serialize)]
pub struct VerificationReport {
    pub checks: Vec<CheckOutcome>,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    fn push(&mut self, name: &str, passed: bool, detail: Option<String>) {
        self.checks.push(CheckOutcome {
            name: name.to_string(),
            passed,
            detail,
        });
    }
}

/// Verify that a piecewise map realizes the clockwise translation by
/// 2(M - h) on the chart: (a) unimodular linear parts; (b) pieces tile the
/// domain and images tile the codomain; (c) seam compatibility — adjacent
/// maps agree on shared edges up to the deck translation, or up to the cut
/// monodromy on a branch-cut edge; (d) height preservation and (e) exact
/// agreement with the translation action on deterministic samples plus all
/// piece vertices and edge midpoints.
pub fn verify_iso(
    map: &PiecewiseUnimodularMap,
    chart: &NodalChart,
    samples: usize,
) -> VerificationReport {
    let mut report = VerificationReport { checks: Vec::new() };
    let ctype = chart.ctype();

    // (a) unimodularity
    let bad = map
        .pieces
        .iter()
        .enumerate()
        .find(|(_, p)| p.linear.det().abs() != 1);
    report.push(
        "unimodular-linear-parts",
        bad.is_none(),
        bad.map(|(i, p)| format!("piece {i} has determinant {}", p.linear.det())),
    );

    // (b) tiling of the domain and the codomain
    for (name, polys) in [
        (
            "pieces-tile-domain",
            map.pieces.iter().map(|p| p.region.clone()).collect::<Vec<_>>(),
        ),
        (
            "images-tile-codomain",
            map.pieces.iter().map(Piece::image).collect::<Vec<_>>(),
        ),
    ] {
        let chunks = if name == "pieces-tile-domain" {
            &map.domain
        } else {
            &map.codomain
        };
        report.push(name, check_tiling(&polys, chunks), None);
    }

    // (c) seam compatibility
    let mut seam_fail: Option<String> = None;
    'outer: for i in 0..map.pieces.len() {
        for j in (i + 1)..map.pieces.len() {
            let (pi, pj) = (&map.pieces[i], &map.pieces[j]);
            let inter = clip(&pi.region, &edges_as_halfplanes(&pj.region));
            if inter.len() != 2 || !area2(&inter).is_zero() {
                continue; // disjoint, a single touching point, or overlap
            }
            let mid = midpoint(&inter[0], &inter[1]);
            let (yi, yj) = (pi.apply(&mid), pj.apply(&mid));
            // the two germs must define the same point of the level circle
            let compatible = (|| -> Result<bool, MapError> {
                if yi.y != yj.y {
                    return Ok(false);
                }
                let g = chart.width_at(&mid.y)?;
                let diff = (&yi.x - &yj.x).rem_euclid(&g)?;
                if !diff.is_zero() {
                    return Ok(false);
                }
                // on a branch-cut seam the linear parts may additionally
                // differ by the cut monodromy; elsewhere by a deck power
                let q = pi.linear.mul(&pj.linear.inverse());
                let rows = q.rows();
                let deck_like = rows[0][0] == 1 && rows[1][0] == 0 && rows[1][1] == 1;
                if deck_like {
                    return Ok(true);
                }
                let cut_node = chart
                    .nodes()
                    .iter()
                    .find(|n| inter[0].x == n.u && inter[1].x == n.u && mid.y <= n.h);
                let Some(node) = cut_node else {
                    return Ok(false);
                };
                let m = monodromy(&node.eigen).expect("primitive eigen");
                Ok(q == m || q == m.inverse())
            })()
            .unwrap_or(false);
            if !compatible {
                seam_fail = Some(format!("pieces {i} and {j} disagree across their seam"));
                break 'outer;
            }
        }
    }
    report.push("seam-compatibility", seam_fail.is_none(), seam_fail);

    // (d) + (e) pointwise checks
    let mut points: Vec<PlanePoint> = Vec::new();
    for piece in &map.pieces {
        points.extend(piece.region.iter().cloned());
        let n = piece.region.len();
        for i in 0..n {
            points.push(midpoint(&piece.region[i], &piece.region[(i + 1) % n]));
        }
    }
    let chunk_data: Vec<(QuadraticNumber, QuadraticNumber)> = map
        .domain
        .iter()
        .map(|c| (c[0].y.clone(), c[3].y.clone()))
        .collect();
    if !chunk_data.is_empty() {
        for i in 0..samples as u64 {
            let (lo, hi) = &chunk_data[(i % chunk_data.len() as u64) as usize];
            let th = QuadraticNumber::from_rational(van_der_corput(i + 1, 2));
            let tu = QuadraticNumber::from_rational(van_der_corput(i + 1, 3));
            let h = lo + &(&(hi - lo) * &th);
            let g = match chart.width_at(&h) {
                Ok(g) => g,
                Err(_) => continue,
            };
            points.push(PlanePoint::new(&g * &tu, h));
        }
    }
    let mut height_fail: Option<String> = None;
    let mut action_fail: Option<String> = None;
    let mut evaluated = 0usize;
    for p in &points {
        // vertices at the very ridge or outside the declared domain are not
        // part of the certified region
        if p.y.is_negative() || p.y >= *ctype.max_height() || ctype.excluded_set().contains(&p.y) {
            continue;
        }
        let Some(image) = map.apply(p) else {
            action_fail = Some(format!("no piece contains {p}"));
            break;
        };
        evaluated += 1;
        if image.y != p.y {
            height_fail = Some(format!("height changes at {p}"));
            break;
        }
        let t = (ctype.max_height() - &p.y).mul_int(2);
        let expect = match translate_along_level(chart, &p.x, &p.y, &t) {
            Ok(u) => u,
            Err(_) => continue,
        };
        let g = chart.width_at(&p.y).expect("height is admissible");
        let diff = (&image.x - &expect)
            .rem_euclid(&g)
            .expect("positive circumference");
        if !diff.is_zero() {
            action_fail = Some(format!(
                "at {p}: image u = {} but the translation gives {expect}",
                image.x
            ));
            break;
        }
    }
    report.push("height-preserved", height_fail.is_none(), height_fail);
    report.push(
        "translation-by-twice-ridge-distance",
        action_fail.is_none() && evaluated > 0,
        action_fail.or(if evaluated == 0 {
            Some("no admissible sample points".to_string())
        } else {
            None
        }),
    );
    report
}

/// Pieces tile the chunks: each piece sits inside one chunk, interiors are
/// pairwise disjoint, and per chunk the areas add up exactly.
fn check_tiling(polys: &[Vec<PlanePoint>], chunks: &[Vec<PlanePoint>]) -> bool {
    let mut per_chunk: Vec<QuadraticNumber> =
        chunks.iter().map(|_| QuadraticNumber::zero()).collect();
    for poly in polys {
        let hs: Vec<usize> = chunks
            .iter()
            .enumerate()
            .filter(|(_, chunk)| {
                let planes = edges_as_halfplanes(chunk);
                poly.iter().all(|p| planes.iter().all(|h| h.contains(p)))
            })
            .map(|(i, _)| i)
            .collect();
        let [only] = hs.as_slice() else {
            return false;
        };
        per_chunk[*only] = &per_chunk[*only] + &area2(poly);
    }
    for i in 0..polys.len() {
        for j in (i + 1)..polys.len() {
            if !overlap_area2(&polys[i], &polys[j]).is_zero() {
                return false;
            }
        }
    }
    per_chunk
        .iter()
        .zip(chunks)
        .all(|(sum, chunk)| *sum == area2(chunk))
}
