//! Projectivity groups of panels and the Knarr construction.

use spherical_buildings::geometry::{fano_plane, gq22};
use spherical_buildings::projectivity::{knarr_projectivity, projectivity_group};
use spherical_buildings::Building;

fn main() -> spherical_buildings::Result<()> {
    for (name, g) in [("Fano plane", fano_plane()), ("GQ(2,2)", gq22())] {
        let b = Building::from_incidence(&g)?;
        let r = b.all_panels()[0];
        let group = projectivity_group(&b, r, 4)?;
        println!(
            "{name}: panel of {} chambers, group order {}, even order {}, 2-transitive {}",
            group.residue.len(),
            group.order,
            group.even_order,
            group.is_two_transitive()
        );
        let res = b.residue_of(r);
        let p = knarr_projectivity(&b, r, res[0], res[1], res[2])?;
        println!(
            "  Knarr map through {} panels fixes {} and sends {} to {}",
            p.len(),
            b.chamber_name(res[0]),
            b.chamber_name(res[1]),
            b.chamber_name(p.apply(res[1]).unwrap())
        );
    }
    Ok(())
}
