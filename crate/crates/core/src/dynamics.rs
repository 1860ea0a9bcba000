//! Recurrence verdicts per fiber height: a height is non-recurrent when
//! its rotation number is irrational (certified by a periodic continued
//! fraction, with a quantitative best-return witness up to a horizon), and
//! periodic otherwise (certified by exact iteration of the translation).
//! Also three-gap orbit diagnostics and height scans.

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::canonical::CanonicalType;
use crate::chart::NodalChart;
use crate::exact::{
    continued_fraction, min_return_distance, ContinuedFraction, ExactError, QuadraticNumber,
};
use crate::maps::CircleAction;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DynamicsError {
    #[error("height lies in an excluded neighbourhood")]
    InExcludedSet,
    #[error("argument out of range: {0}")]
    OutOfRange(&'static str),
    #[error("invalid canonical data: {0}")]
    InvalidType(String),
    #[error("exact return at the claimed period failed (internal inconsistency)")]
    ReturnMismatch,
    #[error("exact arithmetic: {0}")]
    Exact(#[from] ExactError),
}

impl From<crate::canonical::CanonicalError> for DynamicsError {
    fn from(e: crate::canonical::CanonicalError) -> Self {
        DynamicsError::InvalidType(e.to_string())
    }
}

impl From<crate::chart::ChartError> for DynamicsError {
    fn from(e: crate::chart::ChartError) -> Self {
        DynamicsError::InvalidType(e.to_string())
    }
}

impl From<crate::maps::MapError> for DynamicsError {
    fn from(e: crate::maps::MapError) -> Self {
        match e {
            crate::maps::MapError::InExcludedSet => DynamicsError::InExcludedSet,
            crate::maps::MapError::OutOfRange(m) => DynamicsError::OutOfRange(m),
            other => DynamicsError::InvalidType(other.to_string()),
        }
    }
}

/// The certified outcome at one height.
#[derive(Clone, Debug)]
pub enum Outcome {
    /// Irrational rotation number: the fiber never returns, for every
    /// iterate. The continued fraction is the irrationality certificate;
    /// the pair is the closest approach (iterate, distance) up to the
    /// requested horizon, always positive.
    NonRecurrent {
        cf: ContinuedFraction,
        min_return: (u64, QuadraticNumber),
    },
    /// Rational rotation number p/q in lowest terms: the fiber returns
    /// exactly at iterate q and at no earlier one.
    Periodic { period: u64 },
}

/// A verdict: the height, its rotation number reduced into [0, 1), and
/// the certified outcome.
#[derive(Clone, Debug)]
pub struct RecurrenceVerdict {
    pub h: QuadraticNumber,
    pub rho: QuadraticNumber,
    pub outcome: Outcome,
}

impl RecurrenceVerdict {
    pub fn is_recurrent(&self) -> bool {
        matches!(self.outcome, Outcome::Periodic { .. })
    }
}

/// Certify one height outside the excluded set. `horizon` only sizes the
/// quantitative witness for the non-recurrent case; the claim itself is
/// horizon-free because irrationality is decided exactly.
pub fn verdict(
    ctype: &CanonicalType,
    h: &QuadraticNumber,
    horizon: u64,
) -> Result<RecurrenceVerdict, DynamicsError> {
    if horizon < 1 {
        return Err(DynamicsError::OutOfRange("horizon must be at least 1"));
    }
    if h.is_negative() || h > ctype.max_height() {
        return Err(DynamicsError::OutOfRange("height must lie in [0, M]"));
    }
    if ctype.excluded_set().contains(h) {
        return Err(DynamicsError::InExcludedSet);
    }
    let rho = ctype.rotation_number(h)?;
    let chart = NodalChart::natural(ctype)?;
    let outcome = match rho.as_rational() {
        Some(r) => {
            let period = u64::try_from(r.denom().clone())
                .map_err(|_| DynamicsError::OutOfRange("period exceeds the machine range"))?;
            verify_exact_return(&chart, h, period)?;
            Outcome::Periodic { period }
        }
        None => {
            let cf = continued_fraction(&rho, 1 << 16)?;
            debug_assert!(!cf.is_rational());
            let min_return = min_return_distance(&rho, horizon)?;
            debug_assert!(min_return.1.is_positive());
            Outcome::NonRecurrent { cf, min_return }
        }
    };
    Ok(RecurrenceVerdict {
        h: h.clone(),
        rho,
        outcome,
    })
}

/// Iterate the clockwise translation by 2(M - h) exactly `period` times:
/// the start point must return then and at no earlier step.
fn verify_exact_return(
    chart: &NodalChart,
    h: &QuadraticNumber,
    period: u64,
) -> Result<(), DynamicsError> {
    let t = (chart.ctype().max_height() - h).mul_int(2);
    let action = CircleAction::new(chart, h, &t)?;
    let start = QuadraticNumber::zero();
    let mut u = start.clone();
    for step in 1..=period {
        u = action.apply(&u);
        if u == start {
            if step == period {
                return Ok(());
            }
            return Err(DynamicsError::ReturnMismatch);
        }
    }
    Err(DynamicsError::ReturnMismatch)
}

/// Circular gaps of the orbit {i * rho mod 1 : 0 <= i < n}, sorted
/// ascending. By the three-distance theorem at most three distinct values
/// occur (duplicated orbit points of a small rational rho contribute zero
/// gaps). Exact arithmetic throughout, on cleared denominators.
pub fn orbit_gaps(rho: &QuadraticNumber, n: u64) -> Result<Vec<QuadraticNumber>, DynamicsError> {
    if n < 1 {
        return Err(DynamicsError::OutOfRange("n must be at least 1"));
    }
    if !rho.is_positive() || *rho >= QuadraticNumber::from_int(1) {
        return Err(DynamicsError::OutOfRange("rho must lie strictly in (0, 1)"));
    }
    // rho = (p + b sqrt(d)) / r with r > 0; the orbit point i is
    // (i p - f_i r + i b sqrt(d)) / r with f_i = floor(i rho)
    let a = rho.rational_part();
    let b = rho.radical_coeff();
    let d = rho.radicand().unwrap_or(2);
    let r = a.denom() * b.denom();
    let p = a.numer() * b.denom();
    let bc = b.numer() * a.denom();
    let mut scaled: Vec<(BigInt, BigInt)> = Vec::with_capacity(n as usize);
    for i in 0..n {
        let ip = &p * i;
        let ib = &bc * i;
        let f = crate::exact::floor_scaled(&ip, &ib, d, &r);
        scaled.push((ip - f * &r, ib));
    }
    scaled.sort_by(|x, y| int_quad_cmp(&x.0, &x.1, &y.0, &y.1, d));
    let to_q = |(num, rad): &(BigInt, BigInt)| -> QuadraticNumber {
        let base = QuadraticNumber::from_bigint(num.clone());
        let irr = if rad.is_zero() {
            QuadraticNumber::zero()
        } else {
            QuadraticNumber::sqrt(d).expect("valid radicand").mul_bigint(rad)
        };
        (base + irr).div_bigint(&r)
    };
    let mut gaps: Vec<QuadraticNumber> = Vec::with_capacity(n as usize);
    for w in scaled.windows(2) {
        let lo = to_q(&w[0]);
        let hi = to_q(&w[1]);
        gaps.push(&hi - &lo);
    }
    let first = to_q(&scaled[0]);
    let last = to_q(&scaled[scaled.len() - 1]);
    gaps.push(&(&QuadraticNumber::from_int(1) - &last) + &first);
    gaps.sort();
    Ok(gaps)
}

/// Compare (a1 + b1 sqrt(d)) with (a2 + b2 sqrt(d)) over a common positive
/// denominator, by exact integer case analysis.
fn int_quad_cmp(
    a1: &BigInt,
    b1: &BigInt,
    a2: &BigInt,
    b2: &BigInt,
    d: u64,
) -> std::cmp::Ordering {
    use std::cmp::Ordering;
    let da = a1 - a2;
    let db = b1 - b2;
    if db.is_zero() {
        return da.cmp(&BigInt::zero());
    }
    if da.is_zero() {
        return db.cmp(&BigInt::zero());
    }
    let dd = BigInt::from(d);
    match (da.is_positive(), db.is_positive()) {
        (true, true) => Ordering::Greater,
        (false, false) => Ordering::Less,
        (true, false) => (&da * &da).cmp(&(&db * &db * dd)),
        (false, true) => (&db * &db * dd).cmp(&(&da * &da)),
    }
}

/// One scanned height in a report.
#[derive(Clone, Debug, Serialize)]
pub struct ScanEntry {
    pub h: QuadraticNumber,
    pub rho: QuadraticNumber,
    pub outcome: String,
    pub witness: String,
}

/// Summary counts plus the exact recurrent-height inventory.
#[derive(Clone, Debug, Serialize)]
pub struct ScanSummary {
    pub non_recurrent_count: usize,
    pub periodic_count: usize,
    pub recurrent_points: Vec<(QuadraticNumber, String)>,
    pub recurrent_intervals: Vec<(QuadraticNumber, QuadraticNumber, String)>,
    /// "finite": at most finitely many recurrent heights per denominator;
    /// "interval": some whole interval is periodic; "none": none found up
    /// to the denominator bound.
    pub recurrent_set_kind: String,
}

/// Verdicts on evenly spaced heights outside the excluded set, plus the
/// exact recurrent-height list up to the denominator bound.
#[derive(Clone, Debug, Serialize)]
pub struct ScanReport {
    pub entries: Vec<ScanEntry>,
    pub summary: ScanSummary,
}

/// Scan `resolution` evenly spaced heights of [0, M], nudging any height
/// that lands in the excluded set to a nearby admissible one (heights with
/// no admissible nudge are dropped). The witness horizon sizes the
/// non-recurrence witnesses; q_max bounds the recurrent-height search.
pub fn scan(
    ctype: &CanonicalType,
    resolution: u64,
    horizon: u64,
    q_max: u64,
) -> Result<ScanReport, DynamicsError> {
    if resolution < 1 {
        return Err(DynamicsError::OutOfRange("resolution must be at least 1"));
    }
    let excluded = ctype.excluded_set();
    let m = ctype.max_height();
    let spacing = m.div_bigint(&BigInt::from(resolution + 1));
    let mut entries = Vec::new();
    for i in 1..=resolution {
        let base = spacing.mul_bigint(&BigInt::from(i));
        let mut chosen: Option<QuadraticNumber> = None;
        'nudge: for j in 0..=(2 * resolution) {
            for sign in [-1i64, 1] {
                let delta = spacing
                    .mul_int(sign * j as i64)
                    .div_bigint(&BigInt::from(2 * resolution));
                let h = &base + &delta;
                if h.is_negative() || h >= *m || excluded.contains(&h) {
                    continue;
                }
                chosen = Some(h);
                break 'nudge;
            }
        }
        let Some(h) = chosen else { continue };
        let v = verdict(ctype, &h, horizon)?;
        let (outcome, witness) = match &v.outcome {
            Outcome::Periodic { period } => (
                format!("Periodic({period})"),
                format!("exact return after {period} iterates"),
            ),
            Outcome::NonRecurrent { cf, min_return } => (
                "NonRecurrent".to_string(),
                format!(
                    "cf period length {}; closest approach {} at iterate {}",
                    cf.period.len(),
                    min_return.1,
                    min_return.0
                ),
            ),
        };
        entries.push(ScanEntry {
            h: v.h,
            rho: v.rho,
            outcome,
            witness,
        });
    }
    entries.sort_by(|x, y| x.h.cmp(&y.h));
    entries.dedup_by(|x, y| x.h == y.h);
    let recurrent = ctype.recurrent_heights(q_max)?;
    let non_recurrent_count = entries
        .iter()
        .filter(|e| e.outcome == "NonRecurrent")
        .count();
    let periodic_count = entries.len() - non_recurrent_count;
    let kind = if !recurrent.intervals.is_empty() {
        "interval"
    } else if recurrent.points.is_empty() {
        "none"
    } else {
        "finite"
    };
    Ok(ScanReport {
        entries,
        summary: ScanSummary {
            non_recurrent_count,
            periodic_count,
            recurrent_points: recurrent
                .points
                .iter()
                .map(|(h, r)| (h.clone(), r.to_string()))
                .collect(),
            recurrent_intervals: recurrent
                .intervals
                .iter()
                .map(|(lo, hi, r)| (lo.clone(), hi.clone(), r.to_string()))
                .collect(),
            recurrent_set_kind: kind.to_string(),
        },
    })
}
