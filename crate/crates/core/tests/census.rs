use heegner_core::analytic::SmoothTestFunction;
use heegner_core::census::*;
use heegner_core::heegner::Rational;
use proptest::prelude::*;

fn r(p: u64, q: u64) -> Rational {
    Rational::new(p, q)
}

fn total(d: u64, y: Rational, k: u64, m: Method) -> u64 {
    vertical_census(d, y, k, m).unwrap().total
}

#[test]
fn methods_agree_on_small_ranges() {
    for k in [3, 5] {
        for y in [r(1, 2), r(1, 1), r(5, 2), r(4, 1)] {
            for big_d in [30, 200, 777, 2000] {
                let a = total(big_d, y, k, Method::Direct);
                let b = total(big_d, y, k, Method::Tuples);
                assert_eq!(a, b, "D={big_d} Y={y} k={k}");
            }
        }
    }
}

#[test]
fn ideal_sets_match_scan_at_ten_thousand() {
    let y = r(2, 1);
    let direct = direct_ideal_set(10_000, y, 3).unwrap();
    let tuples = tuple_ideal_set(10_000, y, 3).unwrap();
    let scan = scan_ideal_set(10_000, y, 3).unwrap();
    assert_eq!(direct, scan);
    assert_eq!(tuples, scan);
    assert_eq!(direct.len() as u64, tuple_count(10_000, y, 3).unwrap());
}

#[test]
fn records_are_consistent() {
    let c = vertical_census(3000, r(3, 1), 3, Method::Direct).unwrap();
    let mut sum = 0;
    for rec in &c.records {
        let classes = rec.torsion_count[&3];
        assert!(classes > 0 && classes % 2 == 0);
        assert_eq!(rec.h % 3, 0);
        for hit in &rec.ideal_hits {
            assert_eq!(hit.order, 3);
            assert!(rec.ideal_hits.iter().any(|o| o.n == hit.n && o.b == -hit.b));
        }
        sum += rec.ideal_hits.len() as u64;
    }
    assert_eq!(sum, c.total);
}

#[test]
fn monotone_in_d_and_y() {
    let mut prev = 0;
    for big_d in (500..=5000).step_by(500) {
        let t = total(big_d, r(1, 1), 3, Method::Tuples);
        assert!(t >= prev);
        prev = t;
    }
    let mut prev = 0;
    for q in 1..=12 {
        let t = total(4000, r(q, 4), 3, Method::Direct);
        assert!(t >= prev);
        prev = t;
    }
}

#[test]
fn horizontal_sums_are_real_and_conjugate() {
    let y = r(3, 1);
    let vert = total(5000, y, 3, Method::Direct);
    for f in [1i64, 2, 3, 7] {
        let a = horizontal_census(5000, y, f, Method::Direct).unwrap();
        let b = horizontal_census(5000, y, -f, Method::Tuples).unwrap();
        assert_eq!(a.count, vert);
        assert_eq!(b.count, vert);
        assert!(a.total.im.abs() <= 1e-9 * a.count as f64);
        assert!((a.total - b.total.conj()).norm() <= 1e-9 * a.count as f64);
        assert!(a.total.norm() <= a.count as f64);
    }
}

#[test]
fn equidist_partition_and_mirror() {
    let edges = [0.25, 0.5, 1.0, 2.0, 4.0];
    let grid = EquidistGrid::centered(8, &edges).unwrap();
    let h = equidist_histogram(6000, r(4, 1), &grid, Method::Direct).unwrap();
    let inside: u64 = h.cells.iter().map(|c| c.count).sum();
    assert_eq!(inside + h.outside, h.total);
    assert_eq!(h.total, total(6000, r(4, 1), 3, Method::Tuples));
    for i in 0..h.cells.len() {
        let j = grid.mirror_of(i).unwrap();
        assert_eq!(h.cells[i].count, h.cells[j].count);
    }
    let coarse_grid = EquidistGrid::centered(8, &[0.25, 1.0, 4.0]).unwrap();
    let coarse = equidist_histogram(6000, r(4, 1), &coarse_grid, Method::Tuples).unwrap();
    for (ci, c) in coarse.cells.iter().enumerate() {
        let fine: u64 = h
            .cells
            .iter()
            .filter(|f| f.cell.x_center == c.cell.x_center && f.cell.y0 >= c.cell.y0 && f.cell.y1 <= c.cell.y1)
            .map(|f| f.count)
            .sum();
        assert_eq!(fine, c.count, "coarse cell {ci}");
        let vol: f64 = h
            .cells
            .iter()
            .filter(|f| f.cell.x_center == c.cell.x_center && f.cell.y0 >= c.cell.y0 && f.cell.y1 <= c.cell.y1)
            .map(|f| f.model)
            .sum();
        assert!((vol - c.model).abs() <= 1e-9 * c.model);
    }
}

#[test]
fn sharp_smoothing_reduces_to_vertical_count() {
    let sharp = SmoothTestFunction::sharp();
    for (big_d, y) in [(1000, r(1, 1)), (2500, r(5, 2)), (4000, r(7, 3))] {
        let s = smoothed_census(big_d, y, 3, &sharp, &sharp, SmoothOptions::default()).unwrap();
        assert_eq!(s.value, total(big_d, y, 3, Method::Direct) as f64);
        assert_eq!(s.tail_bound, 0.0);
    }
}

#[test]
fn dual_identity_with_two_weights() {
    for phi in [SmoothTestFunction::bump_on(1.0, 2.0).unwrap(), SmoothTestFunction::bump_on(0.25, 1.0).unwrap()] {
        let rep = dual_identity_check(1500, &phi, 1e-13).unwrap();
        assert!(rep.pass, "{rep:?}");
        assert!(rep.lhs > 0.0);
    }
}

#[test]
fn rejects_bad_parameters() {
    assert!(vertical_census(1000, r(1, 1), 4, Method::Direct).is_err());
    assert!(vertical_census(1000, r(1, 1), 1, Method::Tuples).is_err());
    assert!(horizontal_census(1000, r(1, 1), 0, Method::Direct).is_err());
    assert!(EquidistGrid::centered(8, &[1.0, 0.5]).is_err());
    assert!(matches!(
        tuple_count(1500, r(19, 1), 7),
        Err(heegner_core::error::Error::Resource(_))
    ));
    assert!(vertical_census(1500, r(19, 1), 7, Method::Direct).is_ok());
    let bad = EquidistGrid::centered(8, &[0.1, 1.0]).unwrap();
    assert!(equidist_histogram(1000, r(4, 1), &bad, Method::Direct).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn direct_equals_tuples(
        big_d in 10u64..1500,
        (k, p) in prop::sample::select(vec![(3u64, 20u64), (5, 8), (7, 3)]).prop_flat_map(|(k, pm)| (Just(k), 1..pm)),
        q in 1u64..5,
    ) {
        let y = r(p, q);
        prop_assert_eq!(direct_ideal_set(big_d, y, k).unwrap(), tuple_ideal_set(big_d, y, k).unwrap());
    }

    #[test]
    fn count_grows_with_y(big_d in 100u64..1500, p in 1u64..12, q in 1u64..4) {
        let lo = tuple_count(big_d, r(p, q), 3).unwrap();
        let hi = tuple_count(big_d, r(p + 1, q), 3).unwrap();
        prop_assert!(lo <= hi);
    }
}
