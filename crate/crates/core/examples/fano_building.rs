//! The flag complex of the Fano plane as a building.

use spherical_buildings::building::{ThicknessMode, DEFAULT_APARTMENT_CAP};
use spherical_buildings::geometry::fano_plane;
use spherical_buildings::Building;

fn main() -> spherical_buildings::Result<()> {
    let b = Building::from_incidence(&fano_plane())?;
    println!("chambers: {}", b.num_chambers());
    let apartments = b.enumerate_apartments(DEFAULT_APARTMENT_CAP)?;
    println!("apartments: {}", apartments.len());
    let (c, d) = (0, b.opposite_chambers(0)[0]);
    println!(
        "{} and {} are opposite, delta = {:?}",
        b.chamber_name(c),
        b.chamber_name(d),
        b.table().word(b.delta(c, d))
    );
    let hull = b.hull_apartment(c, d)?;
    let names: Vec<&str> = hull.chambers().iter().map(|&x| b.chamber_name(x)).collect();
    println!("their apartment: {names:?}");
    let point = b.vertex_of(c, 0);
    println!("projection of {} onto the star of point 0: {}", b.chamber_name(d), b.chamber_name(b.project_chamber(point, d)?));
    let thick = b.thickness_report(ThicknessMode::SingleApartment(&apartments[0]))?;
    println!("thick from one apartment: {}", thick.is_thick);
    Ok(())
}
