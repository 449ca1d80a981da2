//! Command-line front end. [`run`] parses arguments and returns the exit code
//! with the text to print, so it can be tested without a process.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::building::{BuildingDump, SimplexRef, ThicknessMode, DEFAULT_APARTMENT_CAP};
use crate::coarse::{controlled_fit, morse_match, TreeMapSpec};
use crate::cone::{apex_is_unique_thick_point, cone_distance, cone_wall_tree, ConePointSpec};
use crate::coxeter::{SphericalChart, TypeSet};
use crate::error::{Error, Result};
use crate::geometry::{GeometrySpec, IncidenceGeometry};
use crate::nerve::{reconstruct_building, verify_round_trip, Nerve, NerveSpec};
use crate::projectivity::projectivity_group;
use crate::rtree::{
    parse_length, structure_report, tree_automorphisms, verify_recovery_criteria, Length, MetricTree, TreeSpec,
};
use crate::Building;

/// Exit code for domain errors.
pub const EXIT_DOMAIN: i32 = 1;
/// Exit code for usage errors.
pub const EXIT_USAGE: i32 = 2;

/// Largest opposition graph written by `export`.
pub const DOT_PANEL_CAP: usize = 2_000;

#[derive(Debug, Parser)]
#[command(name = "buildings", version, about = "Spherical buildings, projectivities, metric trees and cones")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Build a building from a geometry or Coxeter spec and print it.
    Build {
        file: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Chamber count, diagram, thickness and apartments.
    Inspect {
        file: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Projectivity group of a panel.
    Proj {
        file: PathBuf,
        /// `point:K`, `line:K`, `TYPE:INDEX` (a vertex) or `panel:TYPE:INDEX`.
        #[arg(long)]
        panel: String,
        #[arg(long, default_value_t = 4)]
        bound: usize,
        #[arg(long)]
        json: bool,
    },
    /// Round trip through the apartment complex, or rebuild from a nerve.
    Reconstruct {
        file: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Metric tree reports.
    Tree {
        file: PathBuf,
        #[arg(long)]
        classify: bool,
        #[arg(long)]
        recover: bool,
        #[arg(long)]
        automorphisms: bool,
        #[arg(long)]
        json: bool,
    },
    /// Cone over a building: apex report, wall tree, point distances.
    Cone {
        file: PathBuf,
        /// Panel spanning the wall tree with its least opposite panel.
        #[arg(long)]
        panel: Option<String>,
        #[arg(long, default_value = "1")]
        radius: String,
        /// JSON list of cone points; pairwise distances are printed.
        #[arg(long)]
        points: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        json: bool,
    },
    /// Controlled fit and apartment matching for a sampled tree map.
    Coarse {
        file: PathBuf,
        /// `U,V`: match only this apartment.
        #[arg(long)]
        apartment: Option<String>,
        #[arg(long)]
        json: bool,
    },
    /// DOT export of the chamber or opposition graph.
    Export {
        file: PathBuf,
        /// Output file; standard output when absent.
        #[arg(long)]
        dot: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = GraphKind::Chamber)]
        kind: GraphKind,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum GraphKind {
    Chamber,
    Opposition,
}

/// A building file: an incidence geometry or a chamber-system dump.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum BuildingInput {
    Geometry(GeometrySpec),
    Dump(BuildingDump),
}

impl BuildingInput {
    pub fn build(&self) -> Result<Building> {
        match self {
            BuildingInput::Geometry(g) => Building::from_incidence(&IncidenceGeometry::from_spec(g)?),
            BuildingInput::Dump(d) => Building::from_dump(d),
        }
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
enum ReconstructInput {
    Nerve(NerveSpec),
    Building(BuildingInput),
}

/// Runs the tool on `argv` (program name first).
pub fn run<I, T>(argv: I) -> (i32, String)
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            return (code, e.render().to_string());
        }
    };
    match execute(cli.command) {
        Ok(out) => (0, out),
        Err(e) => (EXIT_DOMAIN, format!("error: {e}\n")),
    }
}

fn read<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

pub fn load_building(path: &Path) -> Result<Building> {
    read::<BuildingInput>(path)?.build()
}

pub fn load_tree(path: &Path) -> Result<MetricTree> {
    MetricTree::from_spec(&read::<TreeSpec>(path)?)
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("reports serialize");
    s.push('\n');
    s
}

/// Resolves `point:K`, `line:K`, `TYPE:INDEX` and `panel:TYPE:INDEX`.
/// `TYPE` is a type label or number; a bare `TYPE:INDEX` names the
/// `INDEX`-th vertex of that type, `panel:` the `INDEX`-th panel of that type.
pub fn parse_selector(b: &Building, sel: &str) -> Result<SimplexRef> {
    let bad = || Error::Parse(format!("bad selector `{sel}`"));
    let parts: Vec<&str> = sel.split(':').collect();
    let type_of = |s: &str| -> Result<usize> {
        b.system()
            .labels()
            .iter()
            .position(|l| l == s)
            .or_else(|| s.parse::<usize>().ok().filter(|&i| i < b.rank()))
            .ok_or_else(|| Error::Parse(format!("unknown type `{s}`")))
    };
    match parts.as_slice() {
        ["panel", t, k] => {
            let i = type_of(t)?;
            let k: usize = k.parse().map_err(|_| bad())?;
            let p = b
                .panels_of_type(i)
                .get(k)
                .ok_or_else(|| Error::Parse(format!("no {i}-panel with index {k}")))?;
            Ok(b.simplex(p[0], TypeSet::single(i)))
        }
        [t, k] => {
            let i = type_of(t)?;
            let k: usize = k.parse().map_err(|_| bad())?;
            b.vertices_of_type(i).get(k).copied().ok_or_else(|| Error::Parse(format!("no vertex of type {t} with index {k}")))
        }
        _ => Err(bad()),
    }
}

fn describe_simplex(b: &Building, s: SimplexRef) -> String {
    let types: Vec<String> = b.vertex_types(s).iter().map(|i| b.system().labels()[i].clone()).collect();
    format!("{}[{}]", b.chamber_name(s.chamber), types.join(","))
}

fn execute(cmd: Command) -> Result<String> {
    match cmd {
        Command::Build { file, json } => {
            let b = load_building(&file)?;
            if json {
                return Ok(to_json(&b.dump()));
            }
            let diagram = b.system().classify().labels().join(" x ");
            Ok(format!("chambers={}\nrank={}\ndiagram={diagram}\n", b.num_chambers(), b.rank()))
        }
        Command::Inspect { file, json } => inspect(&load_building(&file)?, json),
        Command::Proj { file, panel, bound, json } => {
            let b = load_building(&file)?;
            let r = parse_selector(&b, &panel)?;
            let rep = projectivity_group(&b, r, bound)?;
            if json {
                return Ok(to_json(&json!({
                    "panel": describe_simplex(&b, r),
                    "residue": rep.residue.iter().map(|&c| b.chamber_name(c)).collect::<Vec<_>>(),
                    "bound": bound,
                    "order": rep.order,
                    "even_order": rep.even_order,
                    "two_transitive": rep.is_two_transitive(),
                    "even_two_transitive": rep.even_is_two_transitive(),
                    "transitivity": rep.transitivity,
                    "productive_lengths": rep.productive_lengths,
                    "knarr_seeds": rep.knarr_seeds,
                    "generators": rep.generators,
                })));
            }
            Ok(format!(
                "panel={}\nresidue={}\nbound={bound}\norder={}\neven_order={}\n2-transitive={}\neven 2-transitive={}\n",
                describe_simplex(&b, r),
                rep.residue.len(),
                rep.order,
                rep.even_order,
                rep.is_two_transitive(),
                rep.even_is_two_transitive()
            ))
        }
        Command::Reconstruct { file, json } => match read::<ReconstructInput>(&file)? {
            ReconstructInput::Nerve(spec) => {
                let rec = reconstruct_building(&Nerve::from_spec(&spec)?)?;
                let b = &rec.building;
                let diagram = b.system().classify().labels().join(" x ");
                if json {
                    return Ok(to_json(&json!({
                        "vertices": rec.families.len(),
                        "chambers": b.num_chambers(),
                        "diagram": diagram,
                        "building": b.dump(),
                    })));
                }
                Ok(format!("vertices={}\nchambers={}\ndiagram={diagram}\n", rec.families.len(), b.num_chambers()))
            }
            ReconstructInput::Building(input) => {
                let b = input.build()?;
                let rep = verify_round_trip(&b)?;
                if json {
                    return Ok(to_json(&json!({
                        "success": rep.is_success(),
                        "report": rep,
                    })));
                }
                Ok(format!(
                    "vertices={} -> {}\nchambers={} -> {}\nisomorphic={}\nlabels_match={}\ntype_preserving={}\n",
                    rep.source_vertices,
                    rep.reconstructed_vertices,
                    rep.source_chambers,
                    rep.reconstructed_chambers,
                    rep.dictionary_is_isomorphism && rep.search_isomorphism.is_some(),
                    rep.apartment_labels_match,
                    rep.type_preserving
                ))
            }
        },
        Command::Tree { file, classify, recover, automorphisms, json } => {
            let t = load_tree(&file)?;
            let classify = classify || !(recover || automorphisms);
            let mut out = String::new();
            let mut obj = serde_json::Map::new();
            if classify {
                let rep = structure_report(&t);
                if json {
                    obj.insert("structure".into(), serde_json::to_value(&rep).expect("serializable"));
                } else {
                    let _ = writeln!(out, "class={}", rep.class);
                    let _ = writeln!(out, "branch_points={}", rep.branch_points.join(","));
                    let _ = writeln!(out, "ends={}", rep.ends.join(","));
                    if !rep.boundary_leaves.is_empty() {
                        let _ = writeln!(out, "boundary_leaves={}", rep.boundary_leaves.join(","));
                    }
                }
            }
            if automorphisms {
                let g = tree_automorphisms(&t);
                if json {
                    obj.insert("automorphisms".into(), json!({ "order": g.order.to_string(), "generators": g.generators.len() }));
                } else {
                    let _ = writeln!(out, "automorphism_order={}", g.order);
                    let _ = writeln!(out, "generators={}", g.generators.len());
                }
            }
            if recover {
                let rep = verify_recovery_criteria(&t);
                if json {
                    obj.insert("recovery".into(), serde_json::to_value(&rep).expect("serializable"));
                } else {
                    let _ = writeln!(out, "interior_pairs={}", rep.interior_pairs.len());
                    let _ = writeln!(out, "agreements={}", rep.agreements);
                    let _ = writeln!(out, "disagreements={}", rep.disagreements);
                    let _ = writeln!(out, "isolated_equals_branch={}", rep.isolation_matches_branch_points);
                    if rep.vacuous {
                        let _ = writeln!(out, "vacuous=true (no branch points)");
                    }
                    let _ = writeln!(out, "note: {}", rep.caveat);
                }
            }
            Ok(if json { to_json(&obj) } else { out })
        }
        Command::Cone { file, panel, radius, points, seed, json } => cone(&file, panel, &radius, points, seed, json),
        Command::Coarse { file, apartment, json } => coarse(&file, apartment, json),
        Command::Export { file, dot, kind } => {
            let b = load_building(&file)?;
            let text = export_dot(&b, kind)?;
            match dot {
                Some(path) => {
                    fs::write(&path, &text).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
                    Ok(format!("wrote {}\n", path.display()))
                }
                None => Ok(text),
            }
        }
    }
}

fn inspect(b: &Building, json: bool) -> Result<String> {
    let thick = b.thickness_report(ThicknessMode::Direct)?;
    let apartments = b.enumerate_apartments(DEFAULT_APARTMENT_CAP).map(|a| a.len());
    let factors = b.diagram_factorization();
    let diagram = b.system().classify().labels().join(" x ");
    if json {
        return Ok(to_json(&json!({
            "chambers": b.num_chambers(),
            "rank": b.rank(),
            "types": b.system().labels(),
            "diagram": diagram,
            "thick": thick.is_thick,
            "min_panel": thick.min_panel,
            "max_panel": thick.max_panel,
            "apartments": apartments.as_ref().ok(),
            "factors": factors.iter().map(|f| json!({"label": f.label, "types": f.types, "thin": f.thin, "thick": f.thick})).collect::<Vec<_>>(),
        })));
    }
    let mut out = String::new();
    let _ = writeln!(out, "chambers={}", b.num_chambers());
    let _ = writeln!(out, "rank={}", b.rank());
    let _ = writeln!(out, "diagram={diagram}");
    let _ = writeln!(out, "thick={}", thick.is_thick);
    let _ = writeln!(out, "panel sizes={}..{}", thick.min_panel, thick.max_panel);
    match apartments {
        Ok(n) => {
            let _ = writeln!(out, "apartments={n}");
        }
        Err(e) => {
            let _ = writeln!(out, "apartments=? ({e})");
        }
    }
    for f in factors {
        let kind = if f.thick { "thick" } else if f.thin { "thin" } else { "mixed" };
        let _ = writeln!(out, "factor {} on types {:?}: {kind}", f.label, f.types);
    }
    Ok(out)
}

fn cone(file: &Path, panel: Option<String>, radius: &str, points: Option<PathBuf>, seed: u64, json: bool) -> Result<String> {
    let b = load_building(file)?;
    let chart = SphericalChart::new(b.system())?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = String::new();
    let mut obj = serde_json::Map::new();
    let apex = apex_is_unique_thick_point(&b, 8, &mut rng)?;
    if json {
        obj.insert("apex".into(), serde_json::to_value(&apex).expect("serializable"));
    } else {
        let _ = writeln!(out, "apex_thick={}", apex.apex_thick);
        let _ = writeln!(out, "unique_thick_point={}", apex.unique_thick_point);
    }
    if let Some(sel) = panel {
        let a = parse_selector(&b, &sel)?;
        let r: Length = parse_length(radius)?;
        let opp = b
            .all_panels()
            .into_iter()
            .find(|&s| b.are_opposite(a, s))
            .ok_or(Error::NotOpposite)?;
        let tree = cone_wall_tree(&b, a, opp, r)?;
        let rep = structure_report(&tree);
        if json {
            obj.insert(
                "wall_tree".into(),
                json!({ "panels": [describe_simplex(&b, a), describe_simplex(&b, opp)], "tree": tree.to_spec(), "class": rep.class.to_string() }),
            );
        } else {
            let _ = writeln!(out, "wall tree {} | {}: {} ends, {}", describe_simplex(&b, a), describe_simplex(&b, opp), rep.ends.len(), rep.class);
        }
    }
    if let Some(path) = points {
        let specs: Vec<ConePointSpec> = read(&path)?;
        let pts = specs.iter().map(|s| s.resolve(&b)).collect::<Result<Vec<_>>>()?;
        let mut rows = Vec::new();
        for i in 0..pts.len() {
            for j in i + 1..pts.len() {
                rows.push((i, j, cone_distance(&b, &chart, &pts[i], &pts[j])));
            }
        }
        if json {
            obj.insert("distances".into(), json!(rows));
        } else {
            for (i, j, d) in rows {
                let _ = writeln!(out, "d({i},{j})={d:.12}");
            }
        }
    }
    Ok(if json { to_json(&obj) } else { out })
}

fn coarse(file: &Path, apartment: Option<String>, json: bool) -> Result<String> {
    let spec: TreeMapSpec = read(file)?;
    let dir = file.parent().unwrap_or(Path::new("."));
    let t1 = load_tree(&dir.join(&spec.source))?;
    let t2 = load_tree(&dir.join(&spec.target))?;
    let f = spec.resolve(&t1, &t2)?;
    let fit = controlled_fit(&t1, &t2, &f)?;
    let apartments = match apartment {
        Some(sel) => {
            let names: Vec<&str> = sel.split(',').collect();
            let [u, v] = names.as_slice() else {
                return Err(Error::Parse(format!("bad apartment `{sel}`, expected U,V")));
            };
            let find = |n: &str| t1.vertex_by_name(n).ok_or_else(|| Error::Parse(format!("unknown vertex {n}")));
            vec![t1.apartment(find(u)?, find(v)?)?]
        }
        None => t1.apartments(),
    };
    let mut out = String::new();
    let mut matches = Vec::new();
    let _ = writeln!(out, "fit: c={} d={} over {} pairs", fit.c, fit.d, fit.pairs);
    for a in &apartments {
        let rep = morse_match(&t1, &t2, &f, a)?;
        let name = |t: &MetricTree, e: (usize, usize)| format!("({},{})", t.name(e.0), t.name(e.1));
        let best: Vec<String> = rep.best.iter().map(|b| name(&t2, b.ends)).collect();
        let margin = rep.margin().map_or("inf".to_string(), |m| m.to_string());
        let _ = writeln!(out, "{} -> {} at {} (margin {margin})", name(&t1, a.ends), best.join(" | "), rep.distance);
        matches.push(json!({
            "apartment": name(&t1, a.ends),
            "best": best,
            "distance": rep.distance.to_string(),
            "margin": margin,
        }));
    }
    Ok(if json { to_json(&json!({ "fit": fit, "matches": matches })) } else { out })
}

const COLORS: [&str; 6] = ["red", "blue", "darkgreen", "orange", "purple", "brown"];

/// DOT text of the chamber graph (edges labelled by panel type) or of the
/// opposition graph on panels.
pub fn export_dot(b: &Building, kind: GraphKind) -> Result<String> {
    let mut out = String::from("graph G {\n");
    match kind {
        GraphKind::Chamber => {
            for c in b.chambers() {
                let _ = writeln!(out, "  c{c} [label=\"{}\"];", b.chamber_name(c));
            }
            for i in 0..b.rank() {
                let label = &b.system().labels()[i];
                for p in b.panels_of_type(i) {
                    for (k, &x) in p.iter().enumerate() {
                        for &y in &p[k + 1..] {
                            let _ = writeln!(out, "  c{x} -- c{y} [label=\"{label}\", color={}];", COLORS[i % COLORS.len()]);
                        }
                    }
                }
            }
        }
        GraphKind::Opposition => {
            let panels = b.all_panels();
            if panels.len() > DOT_PANEL_CAP {
                return Err(Error::Precondition(format!("{} panels exceed the export cap {DOT_PANEL_CAP}", panels.len())));
            }
            for (k, &p) in panels.iter().enumerate() {
                let _ = writeln!(out, "  p{k} [label=\"{}\"];", describe_simplex(b, p));
            }
            for (k, &p) in panels.iter().enumerate() {
                for (l, &q) in panels.iter().enumerate().skip(k + 1) {
                    if b.are_opposite(p, q) {
                        let _ = writeln!(out, "  p{k} -- p{l};");
                    }
                }
            }
        }
    }
    out.push_str("}\n");
    Ok(out)
}
