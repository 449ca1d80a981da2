//! Acceptance suite: one line per criterion, nonzero exit if any fails.

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use num_rational::Rational64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use spherical_buildings::building::{rank_one, ThicknessMode, DEFAULT_APARTMENT_CAP};
use spherical_buildings::coarse::{
    apartment_map_from_isometry, induced_end_map, morse_match, perturbed_samples, vertex_map_samples, ApartmentMap,
    EndMapCertificate, EndMapOutcome,
};
use spherical_buildings::cone::{cone_distance, random_cone_point, random_point_at, ConePoint};
use spherical_buildings::geometry::{digon, fano_plane, gq22, ordinary_polygon};
use spherical_buildings::nerve::verify_round_trip;
use spherical_buildings::projectivity::{compose_path, knarr_projectivity, projectivity_group, slide_chain};
use spherical_buildings::rtree::{
    cone_tree, h_tree, random_automorphism, regular_truncation, structure_report, verify_recovery_criteria, TreeClass,
};
use spherical_buildings::{Building, CoxeterSystem, SimplexRef, SphericalChart};

type Outcome = Result<String, String>;

fn check(cond: bool, ok: impl Into<String>, fail: impl Into<String>) -> Outcome {
    if cond {
        Ok(ok.into())
    } else {
        Err(fail.into())
    }
}

fn fano() -> Building {
    Building::from_incidence(&fano_plane()).unwrap()
}

fn gq() -> Building {
    Building::from_incidence(&gq22()).unwrap()
}

fn round_trip() -> Outcome {
    let mut notes = Vec::new();
    for (name, b, apartments) in [("Fano", fano(), Some(28)), ("GQ(2,2)", gq(), None)] {
        let start = Instant::now();
        let rep = verify_round_trip(&b).map_err(|e| format!("{name}: {e}"))?;
        let elapsed = start.elapsed();
        if let Some(n) = apartments {
            let found = b.enumerate_apartments(DEFAULT_APARTMENT_CAP).unwrap().len();
            if found != n {
                return Err(format!("{name}: {found} apartments, expected {n}"));
            }
        }
        if !rep.is_success() || rep.reconstructed_chambers != b.num_chambers() {
            return Err(format!("{name}: reconstruction is not isomorphic ({rep:?})"));
        }
        if elapsed > Duration::from_secs(10) {
            return Err(format!("{name}: took {elapsed:?}"));
        }
        notes.push(format!("{name} {} chambers in {:.0?}", rep.reconstructed_chambers, elapsed));
    }
    Ok(notes.join(", "))
}

fn knarr() -> Outcome {
    let start = Instant::now();
    let mut panels = 0;
    let mut triples = 0;
    for (name, b) in [("Fano", fano()), ("GQ(2,2)", gq())] {
        for r in b.all_panels() {
            let g = projectivity_group(&b, r, 4).map_err(|e| format!("{name}: {e}"))?;
            if !g.is_two_transitive() {
                return Err(format!("{name}: group of {r:?} is not 2-transitive"));
            }
            panels += 1;
            let res = b.residue_of(r);
            for &a in &res {
                for &b1 in &res {
                    for &b2 in &res {
                        if a == b1 || a == b2 || b1 == b2 {
                            continue;
                        }
                        let p = knarr_projectivity(&b, r, a, b1, b2).map_err(|e| format!("{name}: {e}"))?;
                        if p.apply(a) != Some(a) || p.apply(b1) != Some(b2) {
                            return Err(format!("{name}: Knarr map for ({a},{b1},{b2}) misbehaves"));
                        }
                        triples += 1;
                    }
                }
            }
        }
    }
    let elapsed = start.elapsed();
    check(
        elapsed < Duration::from_secs(60),
        format!("{panels} panels 2-transitive, {triples} triples in {elapsed:.0?}"),
        format!("took {elapsed:?}"),
    )
}

fn thickness() -> Outcome {
    let thick = [
        ("Fano", fano()),
        ("GQ(2,2)", gq()),
        ("digon(3,3)", Building::from_incidence(&digon(3, 3)).unwrap()),
        ("Fano x A1(3)", fano().join(&rank_one(3).unwrap()).unwrap()),
    ];
    let thin = [
        ("A2", Building::coxeter_complex(&CoxeterSystem::dihedral(3).unwrap()).unwrap()),
        ("B2", Building::coxeter_complex(&CoxeterSystem::dihedral(4).unwrap()).unwrap()),
        ("A1xA1", Building::coxeter_complex(&CoxeterSystem::dihedral(2).unwrap()).unwrap()),
        ("A3", Building::coxeter_complex(&CoxeterSystem::new(vec![vec![1, 3, 2], vec![3, 1, 3], vec![2, 3, 1]]).unwrap()).unwrap()),
        ("pentagon", Building::from_incidence(&ordinary_polygon(5)).unwrap()),
    ];
    let mut checked = 0;
    for (name, b) in &thick {
        let direct = b.thickness_report(ThicknessMode::Direct).unwrap().is_thick;
        for apt in b.enumerate_apartments(DEFAULT_APARTMENT_CAP).unwrap() {
            let single = b.thickness_report(ThicknessMode::SingleApartment(&apt)).unwrap().is_thick;
            if single != direct {
                return Err(format!("{name}: apartment verdict {single}, direct {direct}"));
            }
            checked += 1;
        }
    }
    for (name, b) in &thin {
        for apt in b.enumerate_apartments(DEFAULT_APARTMENT_CAP).unwrap() {
            if b.thickness_report(ThicknessMode::SingleApartment(&apt)).unwrap().is_thick {
                return Err(format!("{name}: thin complex passes the apartment criterion"));
            }
            checked += 1;
        }
    }
    Ok(format!("{checked} apartments, 0 disagreements"))
}

fn local_surjectivity() -> Outcome {
    let f = fano();
    let geo = fano_plane();
    let sigma = Building::coxeter_complex(f.system()).unwrap();
    let apt = f.apartment_containing(0, 0).unwrap();
    let mut suite: Vec<(String, Building, Building, Vec<usize>, Option<Vec<usize>>)> = Vec::new();
    let id: Vec<usize> = f.chambers().collect();
    suite.push(("identity".into(), f.clone(), f.clone(), id, None));
    for (k, perm) in [
        (0..7).map(|i| (i + 1) % 7).collect::<Vec<_>>(),
        (0..7).map(|i| (2 * i) % 7).collect(),
        (0..7).map(|i| (4 * i + 3) % 7).collect(),
    ]
    .into_iter()
    .enumerate()
    {
        suite.push((format!("collineation {k}"), f.clone(), f.clone(), geo.collineation_flags(&perm).unwrap(), None));
    }
    let (pl, lp) = spherical_buildings::geometry::fano_polarity();
    suite.push(("polarity".into(), f.clone(), f.clone(), geo.correlation_flags(&pl, &lp).unwrap(), Some(vec![1, 0])));
    let inclusion: Vec<usize> = sigma.chambers().map(|w| apt.chamber_at(w)).collect();
    suite.push(("apartment inclusion".into(), sigma.clone(), f.clone(), inclusion, None));
    for c in [0, 7] {
        let retraction: Vec<usize> = f.chambers().map(|x| f.delta(c, x)).collect();
        suite.push((format!("retraction at {c}"), f.clone(), sigma.clone(), retraction, None));
    }
    let a3 = rank_one(3).unwrap();
    let a2 = rank_one(2).unwrap();
    let big = a3.join(&a3).unwrap();
    let small = a3.join(&a2).unwrap();
    let fold: Vec<usize> = big.chambers().map(|c| (c / 3) * 2 + (c % 3).min(1)).collect();
    suite.push(("join projection onto A1(3) x A1(2)".into(), big.clone(), small.clone(), fold, None));
    let collapse: Vec<usize> = big.chambers().map(|c| (c / 3) * 2).collect();
    suite.push(("join collapse".into(), big.clone(), small, collapse, None));
    let hex = Building::from_incidence(&ordinary_polygon(3)).unwrap();
    let constant = vec![0; hex.num_chambers()];
    suite.push(("constant on hexagon".into(), hex.clone(), hex, constant, None));
    let thin_fold: Vec<usize> = sigma.chambers().map(|w| if sigma.table().length(w) % 2 == 0 { 0 } else { 1 }).collect();
    suite.push(("thin fold".into(), sigma.clone(), sigma.clone(), thin_fold, None));

    let mut morphisms = 0;
    for (name, src, dst, map, types) in &suite {
        let rep = src.check_morphism(dst, map, types.as_deref()).map_err(|e| format!("{name}: {e}"))?;
        if !rep.is_morphism {
            continue;
        }
        morphisms += 1;
        let image: BTreeSet<usize> = map.iter().copied().collect();
        let brute = image.len() == dst.num_chambers();
        if rep.is_epimorphism != brute {
            return Err(format!("{name}: panel criterion {} vs image {brute}", rep.is_epimorphism));
        }
    }
    check(morphisms >= 10, format!("{morphisms} morphisms, 0 disagreements"), format!("only {morphisms} morphisms"))
}

fn cone_metric() -> Outcome {
    let b = fano();
    let chart = SphericalChart::new(b.system()).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for _ in 0..200 {
        let p = random_cone_point(&b, 5.0, &mut rng);
        if cone_distance(&b, &chart, &ConePoint::apex(), &p) != p.radius() {
            return Err("apex distance differs from radius".into());
        }
        if let Some(x) = p.point() {
            let q = ConePoint::new(x.clone(), 1.75).unwrap();
            if (cone_distance(&b, &chart, &p, &q) - (p.radius() - 1.75).abs()).abs() > 1e-9 {
                return Err("same-ray distance differs from |s - t|".into());
            }
        }
    }
    let apartments = b.enumerate_apartments(DEFAULT_APARTMENT_CAP).unwrap();
    let mut worst_flat: f64 = 0.0;
    for k in 0..10_000 {
        let apt = &apartments[k % apartments.len()];
        let pick = |rng: &mut ChaCha8Rng| {
            let c = apt.chambers()[rand::Rng::gen_range(rng, 0..apt.chambers().len())];
            let r = rand::Rng::gen_range(rng, 0.0..4.0);
            ConePoint::new(random_point_at(&b, c, rng), r).unwrap()
        };
        let (p, q) = (pick(&mut rng), pick(&mut rng));
        let euclid = (p.embed(&b, &chart, apt).unwrap() - q.embed(&b, &chart, apt).unwrap()).norm();
        worst_flat = worst_flat.max((cone_distance(&b, &chart, &p, &q) - euclid).abs());
    }
    if worst_flat > 1e-9 {
        return Err(format!("apartment flatness off by {worst_flat:e}"));
    }
    let mut worst_triangle: f64 = 0.0;
    for _ in 0..10_000 {
        let p = random_cone_point(&b, 4.0, &mut rng);
        let q = random_cone_point(&b, 4.0, &mut rng);
        let r = random_cone_point(&b, 4.0, &mut rng);
        let excess = cone_distance(&b, &chart, &p, &r) - cone_distance(&b, &chart, &p, &q) - cone_distance(&b, &chart, &q, &r);
        worst_triangle = worst_triangle.max(excess);
    }
    check(
        worst_triangle <= 1e-9,
        format!("flatness error {worst_flat:.1e}, worst triangle excess {worst_triangle:.1e}"),
        format!("triangle inequality violated by {worst_triangle:e}"),
    )
}

fn classification() -> Outcome {
    let one = Rational64::from_integer(1);
    for k in 2..=8 {
        let labels: Vec<String> = (0..k).map(|i| format!("e{i}")).collect();
        let class = structure_report(&cone_tree(&labels, one).unwrap()).class;
        let expected = if k == 2 { TreeClass::Line } else { TreeClass::Cone };
        if class != expected {
            return Err(format!("cone_tree({k}) classified as {class}"));
        }
    }
    for depth in 2..=4 {
        let class = structure_report(&regular_truncation(3, depth, one)).class;
        if class != (TreeClass::Simplicial { edge_length: "1".into() }) {
            return Err(format!("3-regular depth {depth} classified as {class}"));
        }
    }
    let h = structure_report(&h_tree()).class;
    check(matches!(h, TreeClass::Inconsistent { .. }), "cones, lines, regular trees and H-tree as expected", format!("H-tree classified as {h}"))
}

fn recovery() -> Outcome {
    let mut notes = Vec::new();
    for depth in [3, 4] {
        let rep = verify_recovery_criteria(&regular_truncation(3, depth, Rational64::from_integer(1)));
        if rep.interior_pairs.is_empty() || rep.disagreements != 0 {
            return Err(format!("depth {depth}: {} disagreements of {}", rep.disagreements, rep.interior_pairs.len()));
        }
        if !rep.isolation_matches_branch_points {
            return Err(format!("depth {depth}: isolated vertices differ from branch points"));
        }
        notes.push(format!("depth {depth}: {}/{} pairs", rep.agreements, rep.interior_pairs.len()));
    }
    Ok(notes.join(", "))
}

fn morse() -> Outcome {
    let t = regular_truncation(3, 4, Rational64::from_integer(1));
    let eps = Rational64::new(1, 4);
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let apartments = t.apartments();
    let mut worst = Rational64::from_integer(0);
    for trial in 0..100 {
        let g = random_automorphism(&t, &mut rng);
        let f = perturbed_samples(&t, &vertex_map_samples(&g), eps, &mut rng);
        for a in &apartments {
            let rep = morse_match(&t, &t, &f, a).map_err(|e| e.to_string())?;
            let image = (g[a.ends.0].min(g[a.ends.1]), g[a.ends.0].max(g[a.ends.1]));
            if !rep.is_unique() || rep.best[0].unordered_ends() != image {
                return Err(format!("trial {trial}: apartment {:?} matched {:?}", a.ends, rep.best));
            }
            if rep.distance > eps {
                return Err(format!("trial {trial}: distance {}", rep.distance));
            }
            worst = worst.max(rep.distance);
        }
    }
    Ok(format!("100 isometries x {} apartments, worst distance {worst}", apartments.len()))
}

fn end_maps() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for t in [regular_truncation(3, 3, Rational64::from_integer(1)), h_tree(), cone_tree(&["a".into(), "b".into(), "c".into(), "d".into()], Rational64::from_integer(1)).unwrap()] {
        for _ in 0..10 {
            let g = random_automorphism(&t, &mut rng);
            let (outcome, map) = induced_end_map(&t, &t, &apartment_map_from_isometry(&t, &g)).map_err(|e| e.to_string())?;
            let map = map.ok_or(format!("isometry rejected: {outcome:?}"))?;
            if t.end_leaves().iter().any(|&e| map[&e] != g[e]) {
                return Err("end map differs from the isometry".into());
            }
        }
    }
    let h = h_tree();
    let mut m: ApartmentMap = apartment_map_from_isometry(&h, &(0..6).collect::<Vec<_>>());
    let (u, v, w, z) = (2, 3, 4, 5);
    m.insert((u, w), (u, v));
    m.insert((u, v), (u, w));
    m.insert((u, z), (w, z));
    m.insert((w, z), (u, z));
    let (outcome, _) = induced_end_map(&h, &h, &m).map_err(|e| e.to_string())?;
    check(
        matches!(outcome, EndMapOutcome::Failure(EndMapCertificate::SharedEnd { .. })),
        "isometries recovered; H-tree counterexample certified",
        format!("H-tree counterexample accepted: {outcome:?}"),
    )
}

fn slides() -> Outcome {
    let b = fano();
    let panels = b.all_panels();
    let opposite: Vec<Vec<SimplexRef>> =
        panels.iter().map(|&p| panels.iter().copied().filter(|&q| b.are_opposite(p, q)).collect()).collect();
    let idx = |s: SimplexRef| panels.iter().position(|&p| p == s).unwrap();
    let mut paths: Vec<Vec<SimplexRef>> = Vec::new();
    for (k, &a0) in panels.iter().enumerate() {
        for &a1 in &opposite[k] {
            paths.push(vec![a0, a1, a0]);
            for &a2 in &opposite[idx(a1)] {
                for &a3 in &opposite[idx(a2)] {
                    if opposite[k].contains(&a3) {
                        paths.push(vec![a0, a1, a2, a3, a0]);
                    }
                }
            }
        }
    }
    for path in &paths {
        let chain = slide_chain(&b, path).map_err(|e| e.to_string())?;
        let proj = compose_path(&b, path).map_err(|e| e.to_string())?;
        for x in b.residue_of(path[0]) {
            if chain.apply(x) != proj.apply(x) {
                return Err(format!("path {path:?}: chamber {x} disagrees"));
            }
        }
    }
    Ok(format!("{} closed paths, 0 disagreements", paths.len()))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("round-trip reconstruction", round_trip),
        ("Knarr 2-transitivity", knarr),
        ("thickness criterion", thickness),
        ("local surjectivity", local_surjectivity),
        ("cone metric identities", cone_metric),
        ("tree classification", classification),
        ("recovery criteria", recovery),
        ("Morse matching", morse),
        ("induced end map", end_maps),
        ("slide/projectivity compatibility", slides),
    ];
    let mut failed = 0;
    for (k, (name, f)) in criteria.iter().enumerate() {
        match f() {
            Ok(detail) => println!("criterion {:>2} PASS  {name}: {detail}", k + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name}: {detail}", k + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
