use std::collections::BTreeMap;

use num_rational::Rational64;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use spherical_buildings::coarse::{
    apartment_map_from_isometry, controlled_fit, dominates, hausdorff_distance, induced_end_map, perturbed_samples,
    shuffled_apartment_map, vertex_map_samples, ApartmentMap, EndMapOutcome, SampledMap, FIT_TOLERANCE,
};
use spherical_buildings::cone::{cone_distance, random_cone_point, ConePoint};
use spherical_buildings::geometry::{fano_plane, gq22};
use spherical_buildings::rtree::{random_automorphism, regular_truncation, tree_automorphisms, Length, MetricTree, TreePoint};
use spherical_buildings::{Building, CoxeterSystem, ElementTable, SphericalChart};

fn systems() -> Vec<ElementTable> {
    [
        vec![vec![1, 3], vec![3, 1]],
        vec![vec![1, 4], vec![4, 1]],
        vec![vec![1, 6], vec![6, 1]],
        vec![vec![1, 3, 2], vec![3, 1, 4], vec![2, 4, 1]],
        vec![vec![1, 5, 2], vec![5, 1, 3], vec![2, 3, 1]],
    ]
    .into_iter()
    .map(|m| ElementTable::enumerate(&CoxeterSystem::new(m).unwrap(), 10_000).unwrap())
    .collect()
}

fn arb_tree() -> impl Strategy<Value = MetricTree> {
    (2usize..12)
        .prop_flat_map(|n| {
            let parents: Vec<_> = (1..n).map(|i| (0..i, 1i64..5)).collect();
            parents
        })
        .prop_map(|edges| {
            let n = edges.len() + 1;
            let names = (0..n).map(|i| format!("v{i}")).collect();
            let edges: Vec<_> = edges
                .into_iter()
                .enumerate()
                .map(|(k, (p, l))| (p, k + 1, Length::from_integer(l)))
                .collect();
            let mut degree = vec![0; n];
            for &(u, v, _) in &edges {
                degree[u] += 1;
                degree[v] += 1;
            }
            let ends = (0..n).filter(|&v| degree[v] == 1).collect();
            MetricTree::new(names, edges, ends).unwrap()
        })
}

fn pick_point(t: &MetricTree, selector: (usize, i64)) -> TreePoint {
    let (k, quarter) = selector;
    let e = k % (t.num_vertices() + t.edges().len());
    if e < t.num_vertices() {
        TreePoint::Vertex(e)
    } else {
        let idx = e - t.num_vertices();
        let (_, _, l) = t.edges()[idx];
        t.point_on_edge(idx, l * Rational64::new(quarter.rem_euclid(3) + 1, 4)).unwrap()
    }
}

fn tree_with_points(count: usize) -> impl Strategy<Value = (MetricTree, Vec<TreePoint>)> {
    (arb_tree(), proptest::collection::vec((0usize..1000, 0i64..3), count)).prop_map(|(t, sel)| {
        let pts = sel.into_iter().map(|s| pick_point(&t, s)).collect();
        (t, pts)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn coxeter_lengths_change_by_one(sys in 0usize..5, w in 0usize..10_000, s in 0usize..3) {
        let tables = systems();
        let t = &tables[sys];
        let w = w % t.len();
        let s = s % t.rank();
        let ws = t.mul_gen(w, s);
        prop_assert_eq!(t.length(ws).abs_diff(t.length(w)), 1);
        prop_assert_eq!(t.is_right_descent(w, s), t.length(ws) < t.length(w));
        prop_assert_eq!(t.length(t.inverse(w)), t.length(w));
        prop_assert_eq!(t.mul(t.longest(), t.longest()), t.identity());
        prop_assert_eq!(t.length(t.mul(w, t.longest())), t.length(t.longest()) - t.length(w));
    }

    #[test]
    fn tree_metric_axioms((t, p) in tree_with_points(4)) {
        let d = |a: TreePoint, b: TreePoint| t.distance(a, b);
        prop_assert_eq!(d(p[0], p[0]), Length::from_integer(0));
        prop_assert_eq!(d(p[0], p[1]), d(p[1], p[0]));
        prop_assert!(d(p[0], p[2]) <= d(p[0], p[1]) + d(p[1], p[2]));
        prop_assert_eq!(t.geodesic(p[0], p[1]).length, d(p[0], p[1]));
        let mut sums = [
            d(p[0], p[1]) + d(p[2], p[3]),
            d(p[0], p[2]) + d(p[1], p[3]),
            d(p[0], p[3]) + d(p[1], p[2]),
        ];
        sums.sort();
        prop_assert_eq!(sums[1], sums[2]);
    }

    #[test]
    fn medians_lie_on_all_three_geodesics((t, p) in tree_with_points(3)) {
        let m = t.median(p[0], p[1], p[2]);
        prop_assert!(t.lies_on(m, p[0], p[1]));
        prop_assert!(t.lies_on(m, p[1], p[2]));
        prop_assert!(t.lies_on(m, p[0], p[2]));
        prop_assert_eq!(m, t.median(p[2], p[0], p[1]));
    }

    #[test]
    fn apartment_projection_is_closest((t, p) in tree_with_points(2)) {
        for a in t.apartments() {
            let proj = t.project_to_apartment(&a, p[0]);
            let (u, v) = (TreePoint::Vertex(a.ends.0), TreePoint::Vertex(a.ends.1));
            prop_assert!(t.lies_on(proj, u, v));
            let dist = t.distance(p[0], proj);
            prop_assert_eq!(t.distance_to_apartment(&a, p[0]), dist);
            let on = t.project_to_apartment(&a, p[1]);
            prop_assert!(dist <= t.distance(p[0], on));
        }
    }

    #[test]
    fn automorphisms_are_isometries(t in arb_tree(), seed in any::<u64>()) {
        let group = tree_automorphisms(&t);
        for g in &group.generators {
            prop_assert!(t.is_automorphism(g));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = random_automorphism(&t, &mut rng);
        for u in 0..t.num_vertices() {
            for v in 0..t.num_vertices() {
                prop_assert_eq!(t.vertex_distance(g[u], g[v]), t.vertex_distance(u, v));
            }
            prop_assert_eq!(t.is_end(g[u]), t.is_end(u));
        }
    }

    #[test]
    fn hausdorff_is_a_pseudometric((t, p) in tree_with_points(9), r in 0i64..8) {
        let (a, b, c) = (&p[0..3], &p[3..6], &p[6..9]);
        let h = |x: &[TreePoint], y: &[TreePoint]| hausdorff_distance(&t, x, y).unwrap();
        prop_assert_eq!(h(a, a), Length::from_integer(0));
        prop_assert_eq!(h(a, b), h(b, a));
        prop_assert!(h(a, c) <= h(a, b) + h(b, c));
        let r = Rational64::new(r, 2);
        prop_assert!(dominates(&t, a, a, Length::from_integer(0)));
        if dominates(&t, a, b, r) {
            prop_assert!(dominates(&t, a, b, r + Length::from_integer(1)));
        }
    }

    #[test]
    fn cone_distance_is_a_metric(seed in any::<u64>()) {
        let b = Building::from_incidence(&fano_plane()).unwrap();
        let chart = SphericalChart::new(b.system()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = random_cone_point(&b, 3.0, &mut rng);
        let q = random_cone_point(&b, 3.0, &mut rng);
        let r = random_cone_point(&b, 3.0, &mut rng);
        let d = |x: &ConePoint, y: &ConePoint| cone_distance(&b, &chart, x, y);
        prop_assert!(d(&p, &p).abs() < 1e-9);
        prop_assert!((d(&p, &q) - d(&q, &p)).abs() < 1e-12);
        prop_assert!(d(&p, &r) <= d(&p, &q) + d(&q, &r) + 1e-9);
        prop_assert_eq!(d(&ConePoint::apex(), &p), p.radius());
        prop_assert!(d(&p, &q) <= p.radius() + q.radius() + 1e-9);
        prop_assert!(d(&p, &q) >= (p.radius() - q.radius()).abs() - 1e-9);
    }

    #[test]
    fn induced_end_maps_compose(seed in any::<u64>()) {
        let t = regular_truncation(3, 3, Length::from_integer(1));
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = random_automorphism(&t, &mut rng);
        let h = random_automorphism(&t, &mut rng);
        let gh: Vec<usize> = (0..t.num_vertices()).map(|v| h[g[v]]).collect();
        let end_map = |perm: &[usize]| induced_end_map(&t, &t, &apartment_map_from_isometry(&t, perm)).unwrap().1.unwrap();
        let (eg, eh, egh) = (end_map(&g), end_map(&h), end_map(&gh));
        let composed: BTreeMap<usize, usize> = eg.iter().map(|(&u, &v)| (u, eh[&v])).collect();
        prop_assert_eq!(egh, composed);
    }

    #[test]
    fn shuffled_apartment_maps_are_certified(seed in any::<u64>()) {
        let t = regular_truncation(3, 2, Length::from_integer(1));
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m: ApartmentMap = shuffled_apartment_map(&t, &mut rng);
        let (outcome, map) = induced_end_map(&t, &t, &m).unwrap();
        match (outcome, map) {
            (EndMapOutcome::Bijection(_), Some(ends)) => {
                for (&(u, v), &img) in &m {
                    let (x, y) = (ends[&u], ends[&v]);
                    prop_assert_eq!((x.min(y), x.max(y)), (img.0.min(img.1), img.0.max(img.1)));
                }
            }
            (EndMapOutcome::Failure(_), None) => {}
            other => prop_assert!(false, "inconsistent outcome {:?}", other),
        }
    }

    #[test]
    fn fit_constants_compose(seed in any::<u64>(), scale in 1i64..4) {
        let t = regular_truncation(3, 3, Length::from_integer(1));
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = random_automorphism(&t, &mut rng);
        let f1 = perturbed_samples(&t, &vertex_map_samples(&g), Rational64::new(1, 4), &mut rng);
        let h = random_automorphism(&t, &mut rng);
        let scaled = regular_truncation(3, 3, Length::from_integer(scale));
        let f2 = SampledMap::new(
            f1.pairs().iter().map(|&(_, q)| (q, t.map_point(&h, q))).collect(),
        ).unwrap();
        let f3 = SampledMap::new(
            (0..t.num_vertices()).map(|v| (TreePoint::Vertex(v), TreePoint::Vertex(v))).collect(),
        ).unwrap();
        let fit1 = controlled_fit(&t, &t, &f1).unwrap();
        let fit2 = controlled_fit(&t, &t, &f2).unwrap();
        let fit3 = controlled_fit(&t, &scaled, &f3).unwrap();
        prop_assert!(fit1.violations.is_empty() && fit2.violations.is_empty() && fit3.violations.is_empty());
        prop_assert!((fit3.c - scale as f64).abs() < FIT_TOLERANCE && fit3.d.abs() < FIT_TOLERANCE);
        let comp = controlled_fit(&t, &t, &f1.then(&f2).unwrap()).unwrap();
        prop_assert!(comp.c <= fit1.c * fit2.c + FIT_TOLERANCE);
        let f13 = SampledMap::new(
            (0..t.num_vertices()).map(|v| (TreePoint::Vertex(v), TreePoint::Vertex(g[v]))).collect(),
        ).unwrap();
        let comp = controlled_fit(&t, &scaled, &f13.then(&f3).unwrap()).unwrap();
        prop_assert!(comp.c <= fit3.c + FIT_TOLERANCE);
    }
}

#[test]
fn gq_projections_are_gated() {
    let b = Building::from_incidence(&gq22()).unwrap();
    for s in b.all_panels() {
        for c in b.chambers() {
            let p = b.project_chamber(s, c).unwrap();
            for x in b.residue_of(s) {
                assert_eq!(b.distance(c, x), b.distance(c, p) + b.distance(p, x));
            }
        }
    }
}
