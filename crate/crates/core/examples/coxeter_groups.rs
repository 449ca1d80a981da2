//! Enumerate a few finite Coxeter groups and their longest elements.

use spherical_buildings::{CoxeterSystem, ElementTable, SphericalChart};

fn main() -> spherical_buildings::Result<()> {
    let systems = [
        ("A2", vec![vec![1, 3], vec![3, 1]]),
        ("B2", vec![vec![1, 4], vec![4, 1]]),
        ("G2", vec![vec![1, 6], vec![6, 1]]),
        ("A3", vec![vec![1, 3, 2], vec![3, 1, 3], vec![2, 3, 1]]),
        ("H3", vec![vec![1, 5, 2], vec![5, 1, 3], vec![2, 3, 1]]),
    ];
    for (name, matrix) in systems {
        let system = CoxeterSystem::new(matrix)?;
        let table = ElementTable::enumerate(&system, 10_000)?;
        let w0 = table.longest();
        println!(
            "{name}: diagram {:?}, |W| = {}, longest word {:?}, opposition {:?}",
            system.classify().labels(),
            table.len(),
            table.word(w0),
            table.opposition_involution()
        );
        let chart = SphericalChart::new(&system)?;
        println!("  cos of angle between the first two roots: {:.4}", chart.gram()[(0, 1)]);
    }
    Ok(())
}
