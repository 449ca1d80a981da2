//! Classify metric trees and test the vertex recovery criteria.

use num_rational::Rational64;
use spherical_buildings::rtree::{
    cone_tree, h_tree, regular_truncation, structure_report, tree_automorphisms, verify_recovery_criteria,
};

fn main() -> spherical_buildings::Result<()> {
    let one = Rational64::from_integer(1);
    let labels: Vec<String> = ["a", "b", "c", "d"].iter().map(|s| s.to_string()).collect();
    let trees = [
        ("cone over 4 points", cone_tree(&labels, one)?),
        ("line", cone_tree(&labels[..2], one)?),
        ("3-regular, depth 3", regular_truncation(3, 3, one)),
        ("H-tree", h_tree()),
    ];
    for (name, t) in &trees {
        let report = structure_report(t);
        println!("{name}: {}, |Aut| = {}", report.class, tree_automorphisms(t).order);
    }
    let rec = verify_recovery_criteria(&trees[2].1);
    println!(
        "recovery on the 3-regular tree: {} agreements, {} disagreements",
        rec.agreements, rec.disagreements
    );
    Ok(())
}
