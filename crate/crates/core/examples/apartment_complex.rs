//! Rebuild a building from the nerve of its apartment families.

use spherical_buildings::geometry::{fano_plane, gq22};
use spherical_buildings::nerve::{apartment_complex, reconstruct_building, verify_round_trip};
use spherical_buildings::Building;

fn main() -> spherical_buildings::Result<()> {
    let b = Building::from_incidence(&fano_plane())?;
    let complex = apartment_complex(&b)?;
    println!(
        "Fano: {} apartments, {} vertex families, {} maximal families",
        complex.apartments.len(),
        complex.vertex_families.len(),
        complex.nerve.maximal_families().len()
    );
    let rebuilt = reconstruct_building(&complex.nerve)?;
    println!("reconstructed {} chambers", rebuilt.building.num_chambers());

    for (name, g) in [("Fano", fano_plane()), ("GQ(2,2)", gq22())] {
        let report = verify_round_trip(&Building::from_incidence(&g)?)?;
        println!(
            "{name}: isomorphic {}, apartment labels preserved {}, type map {:?}",
            report.is_success(),
            report.apartment_labels_match,
            report.type_map
        );
    }
    Ok(())
}
