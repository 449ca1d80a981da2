//! Quasi-isometry constants and apartment matching between trees.

use num_rational::Rational64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use spherical_buildings::coarse::{
    apartment_map_from_isometry, controlled_fit, induced_end_map, morse_match, perturbed_samples,
    vertex_map_samples, EndMapOutcome,
};
use spherical_buildings::rtree::{random_automorphism, regular_truncation};

fn main() -> spherical_buildings::Result<()> {
    let t = regular_truncation(3, 3, Rational64::from_integer(1));
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let g = random_automorphism(&t, &mut rng);
    let f = perturbed_samples(&t, &vertex_map_samples(&g), Rational64::new(1, 4), &mut rng);
    let fit = controlled_fit(&t, &t, &f)?;
    println!("fitted constants: c = {}, d = {} over {} pairs", fit.c, fit.d, fit.pairs);

    let a = &t.apartments()[0];
    let m = morse_match(&t, &t, &f, a)?;
    println!(
        "apartment ({}, {}) goes to ({}, {}) at distance {}, margin {}",
        t.name(a.ends.0),
        t.name(a.ends.1),
        t.name(m.best[0].ends.0),
        t.name(m.best[0].ends.1),
        m.distance,
        m.margin().map_or("unbounded".to_string(), |x| x.to_string())
    );

    match induced_end_map(&t, &t, &apartment_map_from_isometry(&t, &g))?.0 {
        EndMapOutcome::Bijection(pairs) => println!("end map: {pairs:?}"),
        EndMapOutcome::Failure(cert) => println!("no end map: {cert:?}"),
    }
    Ok(())
}
