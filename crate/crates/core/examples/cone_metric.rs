//! Distances in the Euclidean cone over the Fano building.

use num_rational::Rational64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use spherical_buildings::cone::{apex_is_unique_thick_point, cone_distance, cone_wall_tree, random_cone_point, ConePoint};
use spherical_buildings::geometry::fano_plane;
use spherical_buildings::rtree::structure_report;
use spherical_buildings::{Building, SphericalChart};

fn main() -> spherical_buildings::Result<()> {
    let b = Building::from_incidence(&fano_plane())?;
    let chart = SphericalChart::new(b.system())?;
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..3 {
        let p = random_cone_point(&b, 2.0, &mut rng);
        let q = random_cone_point(&b, 2.0, &mut rng);
        println!(
            "|p| = {:.3}, |q| = {:.3}, d(p, q) = {:.3}, d(o, p) = {:.3}",
            p.radius(),
            q.radius(),
            cone_distance(&b, &chart, &p, &q),
            cone_distance(&b, &chart, &ConePoint::apex(), &p)
        );
    }
    let apex = apex_is_unique_thick_point(&b, 20, &mut rng)?;
    println!("apex thick: {}, unique thick point: {}", apex.apex_thick, apex.unique_thick_point);

    let panels = b.all_panels();
    let a = panels[0];
    let opp = panels.iter().copied().find(|&q| b.are_opposite(a, q)).unwrap();
    let tree = cone_wall_tree(&b, a, opp, Rational64::from_integer(1))?;
    println!("wall tree: {} ends, {}", tree.end_leaves().len(), structure_report(&tree).class);
    Ok(())
}
