//! Canonical classifying data for a construction instance: hat class with
//! its length constant, ridge height and width, parked-node heights, and
//! the excluded neighbourhoods. Provides the closed-form level-length
//! function g, rotation numbers of the induced circle translations, and
//! exact enumeration of the heights with rational rotation number.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::One;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exact::{ExactError, QuadraticNumber};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CanonicalError {
    #[error("height out of range: {0}")]
    OutOfRange(&'static str),
    #[error("level length is not positive at height {0}")]
    NonpositiveLength(QuadraticNumber),
    #[error("invalid canonical data: {0}")]
    InvalidType(String),
    #[error("the ridge itself carries no rotation number")]
    AtRidge,
    #[error("exact arithmetic: {0}")]
    Exact(#[from] ExactError),
}

/// The four hat classes and their level-length constants.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum HatClass {
    B,
    C,
    D,
    E,
}

impl HatClass {
    /// The constant k in the level-length function.
    pub fn k(self) -> i64 {
        match self {
            HatClass::B | HatClass::C => 8,
            HatClass::D => 7,
            HatClass::E => 6,
        }
    }

    pub fn from_label(s: &str) -> Option<Self> {
        match s {
            "B" => Some(HatClass::B),
            "C" => Some(HatClass::C),
            "D" => Some(HatClass::D),
            "E" => Some(HatClass::E),
            _ => None,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            HatClass::B => "B",
            HatClass::C => "C",
            HatClass::D => "D",
            HatClass::E => "E",
        }
    }
}

/// How many nodes point into a ridge end.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EndType {
    TwoNodes,
    ThreeNodes,
}

impl EndType {
    pub fn node_count(self) -> usize {
        match self {
            EndType::TwoNodes => 2,
            EndType::ThreeNodes => 3,
        }
    }

    pub fn from_label(s: &str) -> Option<Self> {
        match s {
            "Two" => Some(EndType::TwoNodes),
            "Three" => Some(EndType::ThreeNodes),
            _ => None,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            EndType::TwoNodes => "Two",
            EndType::ThreeNodes => "Three",
        }
    }
}

/// The union of open neighbourhoods of the ridge height and the parked
/// heights; all nodal activity projects into this set, so dynamics is only
/// certified outside it.
#[derive(Clone, Debug)]
pub struct ExcludedSet {
    /// Disjoint open intervals (lo, hi), sorted; the ridge interval is
    /// (M - eps, M] and is treated as containing its right endpoint.
    intervals: Vec<(QuadraticNumber, QuadraticNumber)>,
    max_height: QuadraticNumber,
}

impl ExcludedSet {
    pub fn contains(&self, h: &QuadraticNumber) -> bool {
        if *h == self.max_height {
            return true;
        }
        self.intervals
            .iter()
            .any(|(lo, hi)| h > lo && h < hi)
    }

    pub fn intervals(&self) -> &[(QuadraticNumber, QuadraticNumber)] {
        &self.intervals
    }

    /// Maximal closed intervals of [0, M] outside the excluded set, in
    /// increasing order, degenerate ones dropped.
    pub fn complement_intervals(&self) -> Vec<(QuadraticNumber, QuadraticNumber)> {
        let mut out = Vec::new();
        let mut cursor = QuadraticNumber::zero();
        for (lo, hi) in &self.intervals {
            if *lo > cursor {
                out.push((cursor.clone(), lo.clone()));
            }
            if *hi > cursor {
                cursor = hi.clone();
            }
        }
        if cursor < self.max_height {
            out.push((cursor, self.max_height.clone()));
        }
        out.retain(|(lo, hi)| lo < hi);
        out
    }
}

/// One maximal interval on which the level-length function is affine.
#[derive(Clone, Debug)]
pub struct LinearPiece {
    pub lo: QuadraticNumber,
    pub hi: QuadraticNumber,
    /// g(h) = intercept + slope * h on [lo, hi].
    pub intercept: QuadraticNumber,
    pub slope: i64,
}

/// Classifying data of a construction instance.
#[derive(Clone, Debug, PartialEq)]
pub struct CanonicalType {
    hat: HatClass,
    end_types: (EndType, EndType),
    max_height: QuadraticNumber,
    width: QuadraticNumber,
    /// Parked-node heights, sorted descending; ties allowed and summed.
    parked_heights: Vec<QuadraticNumber>,
    d: u64,
    eps: QuadraticNumber,
}

/// On-disk form of a canonical type, all numbers in the exact literal
/// grammar.
#[derive(Serialize, Deserialize)]
pub struct CanonicalTypeFile {
    pub hat_class: String,
    #[serde(rename = "M")]
    pub max_height: QuadraticNumber,
    pub w: QuadraticNumber,
    pub alphas: Vec<QuadraticNumber>,
    pub d: u64,
    pub epsilon: QuadraticNumber,
    pub end_types: [String; 2],
}

impl CanonicalType {
    pub fn new(
        hat: HatClass,
        end_types: (EndType, EndType),
        max_height: QuadraticNumber,
        width: QuadraticNumber,
        mut parked_heights: Vec<QuadraticNumber>,
        d: u64,
        eps: QuadraticNumber,
    ) -> Result<Self, CanonicalError> {
        if !crate::exact::is_valid_radicand(d) {
            return Err(CanonicalError::InvalidType(format!(
                "d = {d} is not a squarefree integer at least 2"
            )));
        }
        let fits = |x: &QuadraticNumber| x.radicand().is_none_or(|r| r == d);
        if !fits(&max_height)
            || !fits(&width)
            || !fits(&eps)
            || !parked_heights.iter().all(fits)
        {
            return Err(CanonicalError::InvalidType(
                "a coefficient mentions a radicand other than the declared d".into(),
            ));
        }
        if !max_height.is_positive() {
            return Err(CanonicalError::InvalidType("M must be positive".into()));
        }
        if width.is_negative() {
            return Err(CanonicalError::InvalidType("w must be nonnegative".into()));
        }
        if !eps.is_positive() || eps >= max_height {
            return Err(CanonicalError::InvalidType(
                "epsilon must satisfy 0 < epsilon < M".into(),
            ));
        }
        parked_heights.sort_by(|a, b| b.cmp(a));
        let two_eps = eps.mul_int(2);
        for (i, alpha) in parked_heights.iter().enumerate() {
            if !alpha.is_positive() || *alpha >= max_height {
                return Err(CanonicalError::InvalidType(format!(
                    "alpha[{i}] = {alpha} violates 0 < alpha < M"
                )));
            }
            if &max_height - alpha < two_eps {
                return Err(CanonicalError::InvalidType(format!(
                    "alpha[{i}] = {alpha} is closer than 2*epsilon to the ridge; \
                     its neighbourhood would meet the hat"
                )));
            }
        }
        let t = CanonicalType {
            hat,
            end_types,
            max_height,
            width,
            parked_heights,
            d,
            eps,
        };
        // the level length must be positive strictly below the ridge; it is
        // piecewise linear, so the piece endpoints decide
        let mut probes: Vec<QuadraticNumber> = vec![QuadraticNumber::zero()];
        probes.extend(t.parked_heights.iter().cloned());
        for h in probes {
            let val = t.level_length_unchecked(&h);
            if val.sign() != Ordering::Greater {
                return Err(CanonicalError::NonpositiveLength(h));
            }
        }
        Ok(t)
    }

    pub fn from_file(file: &CanonicalTypeFile) -> Result<Self, CanonicalError> {
        let hat = HatClass::from_label(&file.hat_class).ok_or_else(|| {
            CanonicalError::InvalidType(format!("unknown hat class {:?}", file.hat_class))
        })?;
        let parse_end = |s: &String| {
            EndType::from_label(s).ok_or_else(|| {
                CanonicalError::InvalidType(format!("unknown end type {s:?} (use Two or Three)"))
            })
        };
        let ends = (parse_end(&file.end_types[0])?, parse_end(&file.end_types[1])?);
        Self::new(
            hat,
            ends,
            file.max_height.clone(),
            file.w.clone(),
            file.alphas.clone(),
            file.d,
            file.epsilon.clone(),
        )
    }

    pub fn to_file(&self) -> CanonicalTypeFile {
        CanonicalTypeFile {
            hat_class: self.hat.label().to_string(),
            max_height: self.max_height.clone(),
            w: self.width.clone(),
            alphas: self.parked_heights.clone(),
            d: self.d,
            epsilon: self.eps.clone(),
            end_types: [
                self.end_types.0.label().to_string(),
                self.end_types.1.label().to_string(),
            ],
        }
    }

    pub fn hat(&self) -> HatClass {
        self.hat
    }

    pub fn k(&self) -> i64 {
        self.hat.k()
    }

    pub fn end_types(&self) -> (EndType, EndType) {
        self.end_types
    }

    pub fn max_height(&self) -> &QuadraticNumber {
        &self.max_height
    }

    pub fn width(&self) -> &QuadraticNumber {
        &self.width
    }

    pub fn parked_heights(&self) -> &[QuadraticNumber] {
        &self.parked_heights
    }

    pub fn radicand(&self) -> u64 {
        self.d
    }

    pub fn eps(&self) -> &QuadraticNumber {
        &self.eps
    }

    fn level_length_unchecked(&self, h: &QuadraticNumber) -> QuadraticNumber {
        let mut g = self.width.mul_int(2) + (&self.max_height - h).mul_int(self.k());
        for alpha in &self.parked_heights {
            let corr = h - alpha;
            if corr.is_negative() {
                g = &g + &corr;
            }
        }
        g
    }

    /// The level-length function g(h) = 2w + k(M - h) + sum_i min(h - a_i, 0)
    /// on [0, M]. Positive below the ridge for a valid type; g(M) = 2w.
    pub fn level_length(&self, h: &QuadraticNumber) -> Result<QuadraticNumber, CanonicalError> {
        if h.is_negative() || *h > self.max_height {
            return Err(CanonicalError::OutOfRange("height must lie in [0, M]"));
        }
        let g = self.level_length_unchecked(h);
        if *h < self.max_height && g.sign() != Ordering::Greater {
            return Err(CanonicalError::NonpositiveLength(h.clone()));
        }
        Ok(g)
    }

    /// Maximal affine pieces of g, in increasing height order, with exact
    /// breakpoints at the distinct parked heights.
    pub fn pieces(&self) -> Vec<LinearPiece> {
        let mut cuts: Vec<QuadraticNumber> = vec![QuadraticNumber::zero()];
        let mut asc: Vec<QuadraticNumber> = self.parked_heights.clone();
        asc.reverse();
        for a in asc {
            if cuts.last() != Some(&a) {
                cuts.push(a);
            }
        }
        cuts.push(self.max_height.clone());
        let mut out = Vec::new();
        for w in cuts.windows(2) {
            let (lo, hi) = (&w[0], &w[1]);
            if lo >= hi {
                continue;
            }
            let above = self
                .parked_heights
                .iter()
                .filter(|a| *a >= hi)
                .count() as i64;
            let slope = -self.k() + above;
            let g_lo = self.level_length_unchecked(lo);
            let intercept = &g_lo - &lo.mul_int(slope);
            out.push(LinearPiece {
                lo: lo.clone(),
                hi: hi.clone(),
                intercept,
                slope,
            });
        }
        out
    }

    /// The excluded neighbourhoods: (M - eps, M] and (a_i - eps, a_i + eps),
    /// overlapping parked intervals merged.
    pub fn excluded_set(&self) -> ExcludedSet {
        let mut raw: Vec<(QuadraticNumber, QuadraticNumber)> = self
            .parked_heights
            .iter()
            .map(|a| (a - &self.eps, a + &self.eps))
            .collect();
        raw.push((&self.max_height - &self.eps, self.max_height.clone()));
        raw.sort_by(|x, y| x.0.cmp(&y.0));
        let mut merged: Vec<(QuadraticNumber, QuadraticNumber)> = Vec::new();
        for (lo, hi) in raw {
            match merged.last_mut() {
                Some((_, last_hi)) if lo <= *last_hi => {
                    if hi > *last_hi {
                        *last_hi = hi;
                    }
                }
                _ => merged.push((lo, hi)),
            }
        }
        ExcludedSet {
            intervals: merged,
            max_height: self.max_height.clone(),
        }
    }

    /// Normalized rotation number of the level translation at height h:
    /// 2(M - h) / g(h), reduced mod 1 into [0, 1). Rational exactly when
    /// the fiber is periodic.
    pub fn rotation_number(&self, h: &QuadraticNumber) -> Result<QuadraticNumber, CanonicalError> {
        if *h == self.max_height {
            return Err(CanonicalError::AtRidge);
        }
        if h.is_negative() || *h > self.max_height {
            return Err(CanonicalError::OutOfRange("height must lie in [0, M)"));
        }
        let g = self.level_length(h)?;
        let raw = (&self.max_height - h)
            .mul_int(2)
            .checked_div(&g)?;
        let frac = &raw - &QuadraticNumber::from_bigint(raw.floor_int());
        Ok(frac)
    }

    /// All heights in [0, M) whose rotation number is rational with reduced
    /// denominator at most q_max, solved exactly piece by piece. A piece on
    /// which the rotation number is constant and rational is returned as a
    /// whole interval instead of a point list.
    pub fn recurrent_heights(&self, q_max: u64) -> Result<RecurrentHeights, CanonicalError> {
        if q_max < 1 {
            return Err(CanonicalError::OutOfRange("q_max must be at least 1"));
        }
        let two_m = self.max_height.mul_int(2);
        let mut intervals: Vec<(QuadraticNumber, QuadraticNumber, BigRational)> = Vec::new();
        let mut points: Vec<(QuadraticNumber, BigRational)> = Vec::new();
        for piece in self.pieces() {
            // rho_raw = 2(M - h) / (intercept + slope * h) is monotone on the
            // piece; bracket it by the endpoint values. At the ridge both the
            // numerator and a zero-width denominator vanish together, and the
            // ratio extends continuously to -2/slope.
            let val = |h: &QuadraticNumber| -> Option<QuadraticNumber> {
                let g = &piece.intercept + &h.mul_int(piece.slope);
                if g.sign() != Ordering::Greater {
                    if *h == self.max_height && g.is_zero() && piece.slope != 0 {
                        return Some(QuadraticNumber::ratio(-2, piece.slope));
                    }
                    return None;
                }
                (&two_m - &h.mul_int(2)).checked_div(&g).ok()
            };
            let (Some(v_lo), Some(v_hi)) = (val(&piece.lo), val(&piece.hi)) else {
                continue;
            };
            let (min_v, max_v) = if v_lo <= v_hi {
                (v_lo, v_hi)
            } else {
                (v_hi, v_lo)
            };
            for q in 1..=q_max {
                let qi = BigInt::from(q);
                let p_lo = {
                    let b = min_v.mul_bigint(&qi);
                    let mut p = b.ceil_int();
                    if p < BigInt::one() {
                        p = BigInt::one();
                    }
                    p
                };
                let p_hi = max_v.mul_bigint(&qi).floor_int();
                let mut p = p_lo;
                while p <= p_hi {
                    if p.clone().gcd(&qi) == BigInt::one() {
                        let r = BigRational::new(p.clone(), qi.clone());
                        self.solve_on_piece(&piece, &r, &two_m, &mut intervals, &mut points);
                    }
                    p += 1;
                }
            }
        }
        points.sort_by(|x, y| x.0.cmp(&y.0));
        points.dedup_by(|a, b| a.0 == b.0);
        // drop points swallowed by a constant interval
        points.retain(|(h, _)| {
            !intervals
                .iter()
                .any(|(lo, hi, _)| h >= lo && h <= hi)
        });
        Ok(RecurrentHeights { intervals, points })
    }

    fn solve_on_piece(
        &self,
        piece: &LinearPiece,
        r: &BigRational,
        two_m: &QuadraticNumber,
        intervals: &mut Vec<(QuadraticNumber, QuadraticNumber, BigRational)>,
        points: &mut Vec<(QuadraticNumber, BigRational)>,
    ) {
        // solve 2(M - h) = r * (intercept + slope * h) for h on the piece
        let rq = QuadraticNumber::from_rational(r.clone());
        let lhs_const = two_m.clone();
        let rhs_const = &rq * &piece.intercept;
        let denom = QuadraticNumber::from_int(2) + rq.mul_int(piece.slope);
        if denom.is_zero() {
            if lhs_const == rhs_const {
                // identically satisfied: the whole piece rotates rationally
                intervals.push((piece.lo.clone(), piece.hi.clone(), fractional(r)));
            }
            return;
        }
        let h = (&lhs_const - &rhs_const).checked_div(&denom).expect("nonzero denom");
        if h < piece.lo || h > piece.hi || h >= self.max_height || h.is_negative() {
            return;
        }
        points.push((h, fractional(r)));
    }
}

fn fractional(r: &BigRational) -> BigRational {
    r - r.floor()
}

/// The heights with rational rotation number up to a denominator bound:
/// isolated solutions, plus whole intervals where the rotation number is
/// constant (then every height in the interval is periodic).
#[derive(Clone, Debug)]
pub struct RecurrentHeights {
    pub intervals: Vec<(QuadraticNumber, QuadraticNumber, BigRational)>,
    pub points: Vec<(QuadraticNumber, BigRational)>,
}

impl RecurrentHeights {
    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty() && self.points.is_empty()
    }

    pub fn contains_point(&self, h: &QuadraticNumber, rho: &BigRational) -> bool {
        self.points.iter().any(|(ph, pr)| ph == h && pr == rho)
            || self
                .intervals
                .iter()
                .any(|(lo, hi, r)| h >= lo && h <= hi && r == rho)
    }
}

impl fmt::Display for HatClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}
