//! Acceptance suite: one test per exit criterion, each printing a single
//! PASS line (visible with `cargo test -- --nocapture`). Every assertion
//! is exact; stated runtime bounds are asserted alongside.

use std::time::Instant;

use num_bigint::BigInt;
use num_rational::BigRational;

use ridgeline::canonical::{CanonicalType, EndType, HatClass};
use ridgeline::chart::NodalChart;
use ridgeline::dynamics::{orbit_gaps, verdict, Outcome};
use ridgeline::exact::{min_return_distance, PlanePoint, QuadraticNumber, UnimodularMatrix};
use ridgeline::geom::van_der_corput;
use ridgeline::maps::{
    build_level_translation, translation_factorization, translate_along_level, verify_iso, PiecewiseUnimodularMap,
};
use ridgeline::polygon::DelzantPolygon;

fn q(s: &str) -> QuadraticNumber {
    s.parse().unwrap()
}

fn ctype(
    hat: HatClass,
    ends: (EndType, EndType),
    m: &str,
    w: &str,
    alphas: &[&str],
    eps: &str,
) -> CanonicalType {
    CanonicalType::new(
        hat,
        ends,
        q(m),
        q(w),
        alphas.iter().map(|s| q(s)).collect(),
        2,
        q(eps),
    )
    .unwrap()
}

fn two_two() -> (EndType, EndType) {
    (EndType::TwoNodes, EndType::TwoNodes)
}

/// Criterion 1: the offset geometry of the (2M+w) x 2M rectangle gives the
/// level length 2w + 8(M - h), exactly, across rational and quadratic
/// parameters and 100 rational heights each.
#[test]
fn acceptance_1_level_length_identity() {
    let start = Instant::now();
    for (m, w) in [("1", "1"), ("1", "0 + 1*sqrt(2)"), ("3/2", "2/5")] {
        let (m, w) = (q(m), q(w));
        let a = &m.mul_int(2) + &w;
        let b = m.mul_int(2);
        let rect = DelzantPolygon::rectangle(&a, &b).unwrap();
        for j in 0..100i64 {
            let h = m.mul_int(j).div_int(100);
            let got = rect.level_length(&h).unwrap();
            let expect = &w.mul_int(2) + &(&m - &h).mul_int(8);
            assert_eq!(got, expect, "M = {m}, w = {w}, h = {h}");
        }
    }
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 1.0, "took {elapsed:?}");
    println!("ACCEPTANCE 1 level-length identity: PASS ({elapsed:?})");
}

/// Criterion 2: the wedge-subtraction oracle agrees with the closed-form
/// length function (with the additive ridge term) for every hat class and
/// zero, one and two parked nodes — the sign-resolution gate.
#[test]
fn acceptance_2_length_formula_oracle() {
    let start = Instant::now();
    let mut compared = 0usize;
    for hat in [HatClass::B, HatClass::C, HatClass::D, HatClass::E] {
        for alphas in [vec![], vec!["5/8"], vec!["5/8", "1/3"]] {
            let ty = ctype(
                hat,
                (EndType::ThreeNodes, EndType::TwoNodes),
                "1",
                "1/2 + 1/3*sqrt(2)",
                &alphas,
                "1/64",
            );
            let chart = NodalChart::natural(&ty).unwrap();
            let excluded = ty.excluded_set();
            let mut done = 0;
            let mut j = 0i64;
            while done < 50 {
                let h = q("1").mul_int(j).div_int(80);
                j += 1;
                assert!(j <= 80, "ran out of admissible heights");
                if excluded.contains(&h) || h >= q("1") {
                    continue;
                }
                let wedge = chart.wedge_level_length(&h).unwrap();
                let formula = ty.level_length(&h).unwrap();
                assert_eq!(
                    wedge, formula,
                    "oracle disagreement: class {hat:?}, n = {}, h = {h}",
                    alphas.len()
                );
                done += 1;
                compared += 1;
            }
        }
    }
    assert_eq!(compared, 4 * 3 * 50);
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 1.0, "took {elapsed:?}");
    println!("ACCEPTANCE 2 length-formula oracle: PASS ({compared} comparisons, {elapsed:?})");
}

/// Criterion 3: the hat-class constants.
#[test]
fn acceptance_3_class_constant_table() {
    assert_eq!(HatClass::B.k(), 8);
    assert_eq!(HatClass::C.k(), 8);
    assert_eq!(HatClass::D.k(), 7);
    assert_eq!(HatClass::E.k(), 6);
    println!("ACCEPTANCE 3 class constant table: PASS (B, C, D, E -> 8, 8, 7, 6)");
}

/// Criterion 4: the built level-translation map passes full verification
/// (unimodular pieces, tiling both ways, seam compatibility, height
/// preservation, and exact clockwise translation by 2(M - h)) on the
/// quadratic product-of-spheres instance and three general ones, with at
/// least 1000 sample points each.
#[test]
fn acceptance_4_translation_isomorphism() {
    let start = Instant::now();
    let instances = vec![
        ctype(HatClass::B, two_two(), "1", "0 + 1*sqrt(2)", &[], "1/100"),
        ctype(HatClass::B, two_two(), "1", "1", &[], "1/100"),
        ctype(
            HatClass::D,
            (EndType::ThreeNodes, EndType::TwoNodes),
            "3/2",
            "2/5",
            &["3/4"],
            "1/50",
        ),
        ctype(
            HatClass::E,
            (EndType::ThreeNodes, EndType::ThreeNodes),
            "1",
            "1/2 + 1/2*sqrt(2)",
            &["1/2", "1/3"],
            "1/100",
        ),
    ];
    for ty in &instances {
        let chart = NodalChart::natural(ty).unwrap();
        let translation = build_level_translation(ty).unwrap();
        let report = verify_iso(&translation, &chart, 1000);
        for check in &report.checks {
            assert!(
                check.passed,
                "instance {:?}: {} failed: {:?}",
                ty.hat(),
                check.name,
                check.detail
            );
        }
    }
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 10.0, "took {elapsed:?}");
    println!(
        "ACCEPTANCE 4 translation isomorphism: PASS ({} instances, 1000 samples each, {elapsed:?})",
        instances.len()
    );
}

/// Criterion 5: the roundtrip factorization. The translation map factors
/// exactly as the seam reglue after the global shear with linear part
/// [[1, 2], [0, 1]]; each reglue linear part is the axis-swap conjugate of
/// a power of the cut shear [[1, 0], [-1, 1]]; and composing the inverse
/// translation with the factored map is the identity on all piece vertices
/// and 500 interior samples.
#[test]
fn acceptance_5_roundtrip_factorization() {
    let ty = ctype(HatClass::B, two_two(), "1", "0 + 1*sqrt(2)", &[], "1/100");
    let translation = build_level_translation(&ty).unwrap();
    let fact = translation_factorization(&ty).unwrap();

    // the named matrices appear exactly
    let shear_expected = UnimodularMatrix::upper_shear(2);
    for piece in &fact.shear.pieces {
        assert_eq!(piece.linear, shear_expected);
    }
    let swap = UnimodularMatrix::swap_axes();
    let cut_shear = UnimodularMatrix::new([[1, 0], [-1, 1]]).unwrap();
    for piece in &fact.reglue.pieces {
        let rows = piece.linear.rows();
        assert_eq!(rows[0][0], 1);
        assert_eq!(rows[1][0], 0);
        assert_eq!(rows[1][1], 1);
        let power = -rows[0][1];
        assert!(power >= 0, "wrap pieces shear against the orientation");
        let conjugate = swap.mul(&cut_shear.pow(power as u32)).mul(&swap);
        assert_eq!(piece.linear, conjugate);
    }

    // reglue after shear equals the translation map on vertices and samples
    let composite = PiecewiseUnimodularMap::compose(&fact.reglue, &fact.shear).unwrap();
    let roundtrip = PiecewiseUnimodularMap::compose(&translation.inverse(), &composite).unwrap();
    let mut points: Vec<PlanePoint> = Vec::new();
    for piece in &translation.pieces {
        points.extend(piece.region.iter().cloned());
    }
    let excluded = ty.excluded_set();
    let chunk_ranges: Vec<(QuadraticNumber, QuadraticNumber)> =
        excluded.complement_intervals();
    for i in 0..500u64 {
        let (lo, hi) = &chunk_ranges[(i % chunk_ranges.len() as u64) as usize];
        let h = lo + &(&(hi - lo) * &QuadraticNumber::from_rational(van_der_corput(i + 1, 2)));
        let g = ty.level_length(&h).unwrap();
        let u = &g * &QuadraticNumber::from_rational(van_der_corput(i + 1, 3));
        points.push(PlanePoint::new(u, h));
    }
    let mut checked = 0usize;
    for p in &points {
        if p.y.is_negative() || p.y >= *ty.max_height() || excluded.contains(&p.y) {
            continue;
        }
        let g = ty.level_length(&p.y).unwrap();
        let via_translation = translation.apply(p).expect("the translation covers the domain");
        let via_fact = composite.apply(p).expect("factorization covers the domain");
        assert_eq!(via_translation.y, via_fact.y);
        assert!((&via_translation.x - &via_fact.x).rem_euclid(&g).unwrap().is_zero());
        let back = roundtrip.apply(p).expect("roundtrip covers the domain");
        assert_eq!(back.y, p.y, "roundtrip must preserve height at {p}");
        assert!(
            (&back.x - &p.x).rem_euclid(&g).unwrap().is_zero(),
            "roundtrip is not the identity at {p}"
        );
        checked += 1;
    }
    assert!(checked >= 500, "only {checked} points were admissible");
    println!("ACCEPTANCE 5 roundtrip factorization: PASS ({checked} points exact)");
}

/// Criterion 6: with irrational width every sampled height is certified
/// non-recurrent; the best-return witness at horizon 10^4 is positive and
/// the horizon-10^3 minimum matches a brute-force scan exactly.
#[test]
fn acceptance_6_non_recurrence_certificates() {
    let start = Instant::now();
    let ty = ctype(HatClass::B, two_two(), "1", "0 + 1*sqrt(2)", &[], "1/100");
    for j in 1..=50i64 {
        let h = QuadraticNumber::ratio(j, 51);
        let v = verdict(&ty, &h, 10_000).unwrap();
        match &v.outcome {
            Outcome::NonRecurrent { cf, min_return } => {
                assert!(!cf.is_rational());
                assert!(min_return.1.is_positive(), "witness distance at h = {h}");
            }
            Outcome::Periodic { .. } => panic!("h = {h} must be non-recurrent"),
        }
        // horizon-1000 value against brute force
        let rho = v.rho.clone();
        let (n_star, dist) = min_return_distance(&rho, 1000).unwrap();
        let mut best: Option<(u64, QuadraticNumber)> = None;
        let half = QuadraticNumber::ratio(1, 2);
        for n in 1..=1000u64 {
            let v = rho.mul_bigint(&BigInt::from(n));
            let nearest = (&v + &half).floor_int();
            let d = (&v - &QuadraticNumber::from_bigint(nearest)).abs();
            match &best {
                Some((_, b)) if *b <= d => {}
                _ => best = Some((n, d)),
            }
        }
        let (bn, bd) = best.unwrap();
        assert_eq!((n_star, dist), (bn, bd), "brute-force mismatch at h = {h}");
    }
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 10.0, "took {elapsed:?}");
    println!("ACCEPTANCE 6 non-recurrence certificates: PASS (50 heights, {elapsed:?})");
}

/// Criterion 7: periodicity certificates. Unit width at half height has
/// period six exactly, no earlier return, and appears in the exact
/// recurrent-height inventory; zero width is constant one-quarter at
/// twenty heights.
#[test]
fn acceptance_7_periodicity_certificates() {
    let ty = ctype(HatClass::B, two_two(), "1", "1", &[], "1/100");
    let v = verdict(&ty, &q("1/2"), 100).unwrap();
    match v.outcome {
        Outcome::Periodic { period } => assert_eq!(period, 6),
        _ => panic!("expected a periodic verdict at h = 1/2"),
    }
    // explicit no-earlier-return iteration
    let chart = NodalChart::natural(&ty).unwrap();
    let h = q("1/2");
    let t = q("1");
    let start_u = q("1/5");
    let mut u = start_u.clone();
    for step in 1..=6 {
        u = translate_along_level(&chart, &u, &h, &t).unwrap();
        assert_eq!(u == start_u, step == 6, "return exactly at step six");
    }
    let rec = ty.recurrent_heights(12).unwrap();
    let sixth = BigRational::new(BigInt::from(1), BigInt::from(6));
    assert!(rec.contains_point(&q("1/2"), &sixth));

    let flat = ctype(HatClass::B, two_two(), "1", "0", &[], "1/100");
    for j in 1..=20i64 {
        let h = QuadraticNumber::ratio(j, 25);
        let v = verdict(&flat, &h, 10).unwrap();
        assert_eq!(v.rho, q("1/4"), "constant rotation number at h = {h}");
        match v.outcome {
            Outcome::Periodic { period } => assert_eq!(period, 4),
            _ => panic!("zero width must be periodic everywhere"),
        }
    }
    println!("ACCEPTANCE 7 periodicity certificates: PASS (period 6 at h = 1/2; constant 1/4 at w = 0)");
}

/// Criterion 8: the three-distance property, exactly, for twenty quadratic
/// irrationals and orbit sizes 10, 100 and 10^4.
#[test]
fn acceptance_8_three_distance() {
    let start = Instant::now();
    // deterministic congruential stream of quadratic irrationals in (0, 1)
    let mut state = 0x2545f4914f6cdd1du64;
    let mut next = move || {
        state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        state >> 33
    };
    for case in 0..20 {
        let p = (next() % 19) as i64 + 1;
        let qd = (next() % 23) as i64 + 2;
        let r = (next() % 40) as i64 + 7;
        let raw = QuadraticNumber::ratio(p, qd)
            + QuadraticNumber::sqrt(2).unwrap().div_int(r);
        let rho = &raw - &QuadraticNumber::from_bigint(raw.floor_int());
        assert!(!rho.is_rational() && rho.is_positive());
        for n in [10u64, 100, 10_000] {
            let gaps = orbit_gaps(&rho, n).unwrap();
            assert_eq!(gaps.len() as u64, n);
            let mut distinct = gaps;
            distinct.dedup();
            assert!(
                distinct.len() <= 3,
                "case {case}, n = {n}: {} distinct gaps",
                distinct.len()
            );
        }
    }
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 20.0, "took {elapsed:?}");
    println!("ACCEPTANCE 8 three-distance property: PASS (20 rotations x 3 orbit sizes, {elapsed:?})");
}
