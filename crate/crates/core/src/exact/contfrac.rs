//! Simple continued fractions with exact eventual-periodicity detection
//! for quadratic irrationals, convergents, and the best-approximation
//! return-distance search.
//!
//! Periodicity is detected by repetition of the algebraic remainder state
//! (P + sqrt(D))/Q with cleared denominators, never by floating point, so
//! "irrational" is a certificate, not a guess.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::quad::{ExactError, QuadraticNumber};

/// A simple continued fraction [a0; a1, a2, ...]. The expansion is finite
/// (empty period) exactly when the number is rational; a quadratic
/// irrational has a nonempty period.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ContinuedFraction {
    pub preperiod: Vec<BigInt>,
    pub period: Vec<BigInt>,
}

impl ContinuedFraction {
    pub fn is_rational(&self) -> bool {
        self.period.is_empty()
    }

    /// Terms of the expansion, cycling through the period; empty period
    /// yields exactly the finite preperiod.
    pub fn terms(&self) -> impl Iterator<Item = BigInt> + '_ {
        self.preperiod
            .iter()
            .cloned()
            .chain(self.period.iter().cycle().cloned())
    }

    /// The first `count` convergents p_k/q_k (fewer for a short rational
    /// expansion).
    pub fn convergents(&self, count: usize) -> Vec<(BigInt, BigInt)> {
        let mut out = Vec::new();
        let (mut p1, mut p2) = (BigInt::one(), BigInt::zero());
        let (mut q1, mut q2) = (BigInt::zero(), BigInt::one());
        for a in self.terms().take(count) {
            let p = &a * &p1 + &p2;
            let q = &a * &q1 + &q2;
            out.push((p.clone(), q.clone()));
            p2 = std::mem::replace(&mut p1, p);
            q2 = std::mem::replace(&mut q1, q);
        }
        out
    }
}

fn rational_expansion(x: &BigRational, max_terms: usize) -> Result<Vec<BigInt>, ExactError> {
    let mut terms = Vec::new();
    let mut r = x.clone();
    loop {
        let a = r.floor().to_integer();
        terms.push(a.clone());
        if terms.len() > max_terms {
            return Err(ExactError::PeriodNotFoundWithin(max_terms));
        }
        let frac = &r - BigRational::from_integer(a);
        if frac.is_zero() {
            return Ok(terms);
        }
        r = frac.recip();
    }
}

/// Exact simple continued fraction of x. Rational input gives a finite
/// expansion; quadratic irrational input gives an eventually periodic one,
/// found by state repetition. Errs only when `max_terms` is too small to
/// reach the repetition.
pub fn continued_fraction(
    x: &QuadraticNumber,
    max_terms: usize,
) -> Result<ContinuedFraction, ExactError> {
    if max_terms < 1 {
        return Err(ExactError::OutOfRange("max_terms must be at least 1"));
    }
    if let Some(r) = x.as_rational() {
        return Ok(ContinuedFraction {
            preperiod: rational_expansion(r, max_terms)?,
            period: Vec::new(),
        });
    }
    let d = x.radicand().expect("irrational input carries a radicand");
    // x = (p0 + b0*sqrt(d)) / q0 with integer entries, q0 > 0
    let a = x.rational_part();
    let b = x.radical_coeff();
    let q0 = a.denom() * b.denom();
    let p0 = a.numer() * b.denom();
    let b0 = b.numer() * a.denom();
    // absorb |b0| into the radical: value = (p + sqrt(dd)) / q
    let dd0 = BigInt::from(d) * &b0 * &b0;
    let (mut p, mut q) = if b0.is_negative() {
        (-p0, -q0)
    } else {
        (p0, q0)
    };
    let mut dd = dd0;
    // ensure q divides dd - p^2 so the recursion stays integral
    if !((&dd - &p * &p) % &q).is_zero() {
        let qa = q.abs();
        p *= &qa;
        dd *= &qa * &qa;
        q *= &qa;
    }
    let mut terms: Vec<BigInt> = Vec::new();
    let mut seen: HashMap<(BigInt, BigInt), usize> = HashMap::new();
    loop {
        if let Some(&start) = seen.get(&(p.clone(), q.clone())) {
            let period = terms.split_off(start);
            return Ok(ContinuedFraction {
                preperiod: terms,
                period,
            });
        }
        if terms.len() >= max_terms {
            return Err(ExactError::PeriodNotFoundWithin(max_terms));
        }
        seen.insert((p.clone(), q.clone()), terms.len());
        let a = floor_surd(&p, &dd, &q);
        let p_next = &a * &q - &p;
        let num = &dd - &p_next * &p_next;
        debug_assert!((&num % &q).is_zero());
        let q_next = num / &q;
        terms.push(a);
        p = p_next;
        q = q_next;
    }
}

/// Exact floor of (p + sqrt(dd)) / q for a positive non-square dd and
/// q != 0 of either sign.
fn floor_surd(p: &BigInt, dd: &BigInt, q: &BigInt) -> BigInt {
    let s = dd.sqrt();
    if q.is_positive() {
        (p + &s).div_floor(q)
    } else {
        // (p + sqrt(dd))/q = (-p - sqrt(dd))/(-q); the numerator lies in the
        // open interval (-p - s - 1, -p - s)
        (-p - &s - BigInt::one()).div_floor(&-q)
    }
}

/// Distance from v to the nearest integer, exactly.
fn dist_to_nearest(v: &QuadraticNumber) -> QuadraticNumber {
    let half = QuadraticNumber::ratio(1, 2);
    let n = (v + &half).floor_int();
    (v - &QuadraticNumber::from_bigint(n)).abs()
}

/// Minimum of ||n * rho|| (distance to the nearest integer) over
/// 1 <= n <= n_max, with the minimizing n. Exact: the minimum is attained
/// at a continued-fraction convergent denominator, so only those are
/// scanned. The distance is zero exactly when rho = p/q with q <= n_max.
pub fn min_return_distance(
    rho: &QuadraticNumber,
    n_max: u64,
) -> Result<(u64, QuadraticNumber), ExactError> {
    if n_max < 1 {
        return Err(ExactError::OutOfRange("n_max must be at least 1"));
    }
    if !rho.is_positive() || *rho >= QuadraticNumber::one() {
        return Err(ExactError::OutOfRange("rho must lie strictly in (0, 1)"));
    }
    if let Some(r) = rho.as_rational() {
        let q = r.denom();
        if *q <= BigInt::from(n_max) {
            let n = u64::try_from(q.clone()).expect("denominator fits u64");
            return Ok((n, QuadraticNumber::zero()));
        }
    }
    let cf = continued_fraction(rho, 4096)?;
    let limit = BigInt::from(n_max);
    let mut candidates: Vec<u64> = Vec::new();
    let (mut q1, mut q2) = (BigInt::zero(), BigInt::one());
    for a in cf.terms() {
        let q = &a * &q1 + &q2;
        if q > limit {
            break;
        }
        if q.is_positive() {
            candidates.push(u64::try_from(q.clone()).expect("bounded by n_max"));
        }
        q2 = std::mem::replace(&mut q1, q);
    }
    if candidates.is_empty() {
        candidates.push(1);
    }
    let mut best: Option<(u64, QuadraticNumber)> = None;
    for n in candidates {
        let v = rho.mul_bigint(&BigInt::from(n));
        let dist = dist_to_nearest(&v);
        match &best {
            Some((_, d)) if *d <= dist => {}
            _ => best = Some((n, dist)),
        }
    }
    Ok(best.expect("at least one candidate"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::cmp::Ordering;

    fn q(s: &str) -> QuadraticNumber {
        s.parse().unwrap()
    }

    fn big(n: i64) -> BigInt {
        BigInt::from(n)
    }

    #[test]
    fn sqrt_two_expansion() {
        let cf = continued_fraction(&q("1*sqrt(2)"), 64).unwrap();
        assert_eq!(cf.preperiod, vec![big(1)]);
        assert_eq!(cf.period, vec![big(2)]);
    }

    #[test]
    fn rational_expansion_is_finite() {
        let cf = continued_fraction(&q("7/3"), 64).unwrap();
        assert_eq!(cf.preperiod, vec![big(2), big(3)]);
        assert!(cf.is_rational());
    }

    #[test]
    fn golden_style_and_negative_inputs() {
        // (1 + sqrt(5))/2 is purely periodic with period [1]
        let cf = continued_fraction(&q("1/2 + 1/2*sqrt(5)"), 64).unwrap();
        assert!(cf.preperiod.is_empty());
        assert_eq!(cf.period, vec![big(1)]);
        // negative irrational: -sqrt(2) = [-2; 1, 1, 2, 2, 2, ...]
        let cf = continued_fraction(&q("-1*sqrt(2)"), 64).unwrap();
        assert_eq!(cf.preperiod[0], big(-2));
        assert!(!cf.period.is_empty());
    }

    #[test]
    fn period_not_found_when_budget_too_small() {
        assert_eq!(
            continued_fraction(&q("1*sqrt(2)"), 1).unwrap_err(),
            ExactError::PeriodNotFoundWithin(1)
        );
    }

    /// Oracle: run the algorithm, then check |q*sqrt(2) - p| strictly
    /// decreases along convergents 1, 3/2, 7/5, 17/12.
    #[test]
    fn sqrt_two_convergents_improve_monotonically() {
        let x = q("1*sqrt(2)");
        let cf = continued_fraction(&x, 64).unwrap();
        let conv = cf.convergents(4);
        assert_eq!(
            conv,
            vec![
                (big(1), big(1)),
                (big(3), big(2)),
                (big(7), big(5)),
                (big(17), big(12)),
            ]
        );
        let mut last: Option<QuadraticNumber> = None;
        for (p, qd) in conv {
            let err = (x.mul_bigint(&qd) - QuadraticNumber::from_bigint(p)).abs();
            if let Some(prev) = last {
                assert!(err < prev);
            }
            last = Some(err);
        }
    }

    #[test]
    fn min_return_hits_exact_period() {
        let (n, dist) = min_return_distance(&q("1/3"), 10).unwrap();
        assert_eq!(n, 3);
        assert!(dist.is_zero());
    }

    /// Frozen from the brute-force oracle below: among n = 1..5 the
    /// closest return of n*(sqrt(2)-1) to an integer is n = 5, at
    /// distance 5*sqrt(2) - 7.
    #[test]
    fn min_return_for_silver_ratio_horizon_five() {
        let rho = q("-1 + 1*sqrt(2)");
        let expect = brute_force_min(&rho, 5);
        assert_eq!(expect.0, 5);
        assert_eq!(expect.1, q("-7 + 5*sqrt(2)"));
        assert_eq!(min_return_distance(&rho, 5).unwrap(), expect);
    }

    #[test]
    fn irrational_distance_is_always_positive() {
        let rho = q("-1 + 1*sqrt(2)");
        for n_max in [1, 2, 10, 100, 1000] {
            let (_, dist) = min_return_distance(&rho, n_max).unwrap();
            assert_eq!(dist.sign(), Ordering::Greater);
        }
    }

    fn brute_force_min(rho: &QuadraticNumber, n_max: u64) -> (u64, QuadraticNumber) {
        let mut best: Option<(u64, QuadraticNumber)> = None;
        for n in 1..=n_max {
            let dist = dist_to_nearest(&rho.mul_bigint(&BigInt::from(n)));
            match &best {
                Some((_, d)) if *d <= dist => {}
                _ => best = Some((n, dist)),
            }
        }
        best.unwrap()
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        /// Rational rho: the expansion terminates, and the first exact
        /// return is the reduced denominator.
        #[test]
        fn rational_return_at_reduced_denominator(p in 1i64..=60, den in 2i64..=61) {
            prop_assume!(p < den);
            let rho = QuadraticNumber::ratio(p, den);
            let cf = continued_fraction(&rho, 256).unwrap();
            prop_assert!(cf.is_rational());
            let reduced = rho.as_rational().unwrap().denom().clone();
            let (n, dist) = min_return_distance(&rho, den as u64).unwrap();
            prop_assert!(dist.is_zero());
            prop_assert_eq!(BigInt::from(n), reduced.clone());
            prop_assert!((BigInt::from(den) % reduced).is_zero());
        }

        /// Agreement with the brute-force scan for moderate horizons.
        #[test]
        fn matches_brute_force(num in 1i64..=40, den in 41i64..=97, n_max in 1u64..=60) {
            let rho = QuadraticNumber::ratio(num, den);
            prop_assert_eq!(min_return_distance(&rho, n_max).unwrap(), brute_force_min(&rho, n_max));
        }

        #[test]
        fn matches_brute_force_quadratic(pnum in 0i64..=3, qnum in 1i64..=5, n_max in 1u64..=40) {
            // rho = (pnum + qnum*sqrt(2)) / r scaled into (0, 1)
            let raw = QuadraticNumber::from_int(pnum)
                + q("1*sqrt(2)").mul_int(qnum);
            let scale = raw.floor_int() + 1;
            let rho = raw.checked_div(&QuadraticNumber::from_bigint(scale)).unwrap();
            prop_assume!(rho.is_positive() && rho < QuadraticNumber::one());
            prop_assert_eq!(min_return_distance(&rho, n_max).unwrap(), brute_force_min(&rho, n_max));
        }
    }

    /// Long-horizon agreement with brute force, as a plain test so the
    /// horizon can be the full 1000.
    #[test]
    fn brute_force_agreement_horizon_1000() {
        for rho in [
            q("-1 + 1*sqrt(2)"),
            q("1/3 + 1/7*sqrt(2)"),
            q("355/1130"),
            q("1/2 - 1/10*sqrt(3)"),
        ] {
            assert_eq!(
                min_return_distance(&rho, 1000).unwrap(),
                brute_force_min(&rho, 1000),
                "disagreement for rho = {rho}"
            );
        }
    }
}
