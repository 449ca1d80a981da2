//! Finite Coxeter systems: validation, the finite-type classification,
//! element enumeration in shortlex normal form, the opposition involution and
//! the spherical (Tits) representation.

use std::collections::HashMap;
use std::fmt;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::building::Building;
use crate::error::{Error, Result};

/// Matrix entry used for `m(i,j) = ∞`.
pub const INFINITE: u32 = 0;

/// Default cap on the number of enumerated group elements.
pub const DEFAULT_ELEMENT_CAP: usize = 100_000;

/// Tolerance for every floating-point check on the spherical representation.
pub const CHART_TOLERANCE: f64 = 1e-9;

/// A set of generator types, stored as a bitmask (rank ≤ 64).
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize)]
pub struct TypeSet(pub u64);

impl TypeSet {
    pub const EMPTY: TypeSet = TypeSet(0);

    pub fn full(rank: usize) -> Self {
        if rank >= 64 {
            TypeSet(u64::MAX)
        } else {
            TypeSet((1u64 << rank) - 1)
        }
    }

    pub fn single(i: usize) -> Self {
        TypeSet(1 << i)
    }

    pub fn from_types<I: IntoIterator<Item = usize>>(types: I) -> Self {
        TypeSet(types.into_iter().fold(0, |acc, i| acc | (1 << i)))
    }

    pub fn contains(self, i: usize) -> bool {
        self.0 >> i & 1 == 1
    }

    pub fn insert(&mut self, i: usize) {
        self.0 |= 1 << i;
    }

    pub fn union(self, other: TypeSet) -> TypeSet {
        TypeSet(self.0 | other.0)
    }

    pub fn intersection(self, other: TypeSet) -> TypeSet {
        TypeSet(self.0 & other.0)
    }

    /// Complement inside `{0, …, rank-1}`.
    pub fn complement(self, rank: usize) -> TypeSet {
        TypeSet(!self.0 & TypeSet::full(rank).0)
    }

    pub fn is_subset(self, other: TypeSet) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn iter(self) -> impl Iterator<Item = usize> {
        (0..64).filter(move |&i| self.contains(i))
    }

    /// Image of the set under a permutation of types.
    pub fn map(self, perm: &[usize]) -> TypeSet {
        TypeSet::from_types(self.iter().map(|i| perm[i]))
    }
}

impl fmt::Debug for TypeSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

/// A Coxeter system `(W, I)` given by its Coxeter matrix.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoxeterSystem {
    labels: Vec<String>,
    matrix: Vec<Vec<u32>>,
}

impl CoxeterSystem {
    /// Validates a Coxeter matrix; [`INFINITE`] (0) encodes `∞`.
    pub fn new(matrix: Vec<Vec<u32>>) -> Result<Self> {
        let labels = (0..matrix.len()).map(|i| format!("s{i}")).collect();
        Self::with_labels(labels, matrix)
    }

    pub fn with_labels(labels: Vec<String>, matrix: Vec<Vec<u32>>) -> Result<Self> {
        let n = matrix.len();
        if n > 64 {
            return Err(Error::CoxeterMatrix("rank above 64 is not supported".into()));
        }
        if labels.len() != n {
            return Err(Error::CoxeterMatrix(format!(
                "{} labels for a {n}x{n} matrix",
                labels.len()
            )));
        }
        for (i, row) in matrix.iter().enumerate() {
            if row.len() != n {
                return Err(Error::CoxeterMatrix(format!("row {i} has length {}", row.len())));
            }
            if row[i] != 1 {
                return Err(Error::CoxeterMatrix(format!("diagonal entry m({i},{i}) = {}", row[i])));
            }
            for (j, &m) in row.iter().enumerate() {
                if m != matrix[j][i] {
                    return Err(Error::CoxeterMatrix(format!("m({i},{j}) != m({j},{i})")));
                }
                if i != j && m != INFINITE && m < 2 {
                    return Err(Error::CoxeterMatrix(format!(
                        "off-diagonal entry m({i},{j}) = {m} must be at least 2"
                    )));
                }
            }
        }
        Ok(Self { labels, matrix })
    }

    /// Dihedral system `I2(m)` with generators `s0, s1`.
    pub fn dihedral(m: u32) -> Result<Self> {
        Self::new(vec![vec![1, m], vec![m, 1]])
    }

    /// Rank-one system `A1`.
    pub fn a1() -> Self {
        Self::new(vec![vec![1]]).expect("A1 is valid")
    }

    pub fn rank(&self) -> usize {
        self.matrix.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn matrix(&self) -> &[Vec<u32>] {
        &self.matrix
    }

    /// `m(i,j)`, or `None` for `∞`.
    pub fn order(&self, i: usize, j: usize) -> Option<u32> {
        match self.matrix[i][j] {
            INFINITE => None,
            m => Some(m),
        }
    }

    /// A type is isolated when it commutes with every other generator.
    pub fn is_isolated(&self, i: usize) -> bool {
        (0..self.rank()).all(|j| j == i || self.matrix[i][j] == 2)
    }

    /// Generators joined to `i` by an edge of the Coxeter diagram.
    pub fn neighbors(&self, i: usize) -> Vec<usize> {
        (0..self.rank()).filter(|&j| j != i && self.matrix[i][j] != 2).collect()
    }

    /// Connected components of the Coxeter diagram, each sorted, ordered by
    /// their least generator.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let n = self.rank();
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        for start in 0..n {
            if seen[start] {
                continue;
            }
            let mut comp = vec![start];
            seen[start] = true;
            let mut k = 0;
            while k < comp.len() {
                for j in self.neighbors(comp[k]) {
                    if !seen[j] {
                        seen[j] = true;
                        comp.push(j);
                    }
                }
                k += 1;
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }

    /// The subsystem on the types of `types`, in increasing order.
    pub fn restrict(&self, types: TypeSet) -> CoxeterSystem {
        let idx: Vec<usize> = types.iter().filter(|&i| i < self.rank()).collect();
        let labels = idx.iter().map(|&i| self.labels[i].clone()).collect();
        let matrix = idx
            .iter()
            .map(|&i| idx.iter().map(|&j| self.matrix[i][j]).collect())
            .collect();
        CoxeterSystem { labels, matrix }
    }

    /// Direct product: block-diagonal matrix with `m = 2` across the blocks.
    pub fn product(&self, other: &CoxeterSystem) -> CoxeterSystem {
        let (a, b) = (self.rank(), other.rank());
        let mut matrix = vec![vec![2; a + b]; a + b];
        for i in 0..a + b {
            for j in 0..a + b {
                matrix[i][j] = match (i < a, j < a) {
                    (true, true) => self.matrix[i][j],
                    (false, false) => other.matrix[i - a][j - a],
                    _ => 2,
                };
            }
        }
        let mut labels = self.labels.clone();
        for l in &other.labels {
            labels.push(if self.labels.contains(l) { format!("{l}'") } else { l.clone() });
        }
        CoxeterSystem { labels, matrix }
    }

    /// Whether a permutation of the types preserves the Coxeter matrix.
    pub fn is_diagram_automorphism(&self, perm: &[usize]) -> bool {
        let n = self.rank();
        perm.len() == n
            && (0..n).all(|i| (0..n).all(|j| self.matrix[perm[i]][perm[j]] == self.matrix[i][j]))
    }

    /// Finiteness via the classification of irreducible finite Coxeter diagrams.
    pub fn classify(&self) -> SphericalReport {
        let mut components = Vec::new();
        let mut spherical = true;
        for comp in self.components() {
            let label = classify_component(self, &comp);
            spherical &= label.is_some();
            components.push(DiagramComponent {
                types: comp,
                label: label.unwrap_or_else(|| "infinite".into()),
            });
        }
        SphericalReport { spherical, components }
    }

    pub fn is_spherical(&self) -> bool {
        self.classify().spherical
    }

    /// Gram matrix entry `-cos(π/m(i,j))`, with `-1` for `∞`.
    pub fn gram_entry(&self, i: usize, j: usize) -> f64 {
        if i == j {
            return 1.0;
        }
        match self.order(i, j) {
            None => -1.0,
            Some(m) => -(std::f64::consts::PI / m as f64).cos(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DiagramComponent {
    pub types: Vec<usize>,
    pub label: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SphericalReport {
    pub spherical: bool,
    pub components: Vec<DiagramComponent>,
}

impl SphericalReport {
    pub fn labels(&self) -> Vec<String> {
        self.components.iter().map(|c| c.label.clone()).collect()
    }
}

fn classify_component(w: &CoxeterSystem, comp: &[usize]) -> Option<String> {
    let n = comp.len();
    if n == 1 {
        return Some("A1".into());
    }
    let mut edges = Vec::new();
    for (a, &i) in comp.iter().enumerate() {
        for (b, &j) in comp.iter().enumerate().skip(a + 1) {
            match w.order(i, j) {
                None => return None,
                Some(2) => {}
                Some(m) => edges.push((a, b, m)),
            }
        }
    }
    if n == 2 {
        let m = edges[0].2;
        return Some(match m {
            3 => "A2".into(),
            4 => "B2".into(),
            6 => "G2".into(),
            m => format!("I2({m})"),
        });
    }
    if edges.len() != n - 1 || edges.iter().any(|e| e.2 > 5) {
        return None;
    }
    let mut adj = vec![Vec::new(); n];
    for &(a, b, m) in &edges {
        adj[a].push((b, m));
        adj[b].push((a, m));
    }
    let max_deg = adj.iter().map(Vec::len).max().unwrap_or(0);
    if max_deg <= 2 {
        // Walk the path from one end to read the label sequence.
        let start = (0..n).find(|&v| adj[v].len() == 1)?;
        let mut seq = Vec::with_capacity(n - 1);
        let (mut prev, mut cur) = (usize::MAX, start);
        loop {
            let next = adj[cur].iter().find(|&&(v, _)| v != prev);
            match next {
                Some(&(v, m)) => {
                    seq.push(m);
                    prev = cur;
                    cur = v;
                }
                None => break,
            }
        }
        let special: Vec<(usize, u32)> =
            seq.iter().copied().enumerate().filter(|&(_, m)| m != 3).collect();
        let at_end = |k: usize| k == 0 || k == seq.len() - 1;
        return match special.as_slice() {
            [] => Some(format!("A{n}")),
            [(k, 4)] if at_end(*k) => Some(format!("B{n}")),
            [(1, 4)] if n == 4 => Some("F4".into()),
            [(k, 5)] if at_end(*k) && n <= 4 => Some(format!("H{n}")),
            _ => None,
        };
    }
    if max_deg == 3 && edges.iter().all(|e| e.2 == 3) {
        let branches: Vec<usize> = (0..n).filter(|&v| adj[v].len() == 3).collect();
        if branches.len() != 1 {
            return None;
        }
        let center = branches[0];
        let mut arms: Vec<usize> = adj[center]
            .iter()
            .map(|&(first, _)| {
                let (mut prev, mut cur, mut len) = (center, first, 1);
                while let Some(&(v, _)) = adj[cur].iter().find(|&&(v, _)| v != prev) {
                    prev = cur;
                    cur = v;
                    len += 1;
                }
                len
            })
            .collect();
        arms.sort_unstable();
        return match (arms[0], arms[1], arms[2]) {
            (1, 1, k) => Some(format!("D{}", k + 3)),
            (1, 2, 2) => Some("E6".into()),
            (1, 2, 3) => Some("E7".into()),
            (1, 2, 4) => Some("E8".into()),
            _ => None,
        };
    }
    None
}

/// Index of a group element inside an [`ElementTable`].
pub type Element = usize;

/// All elements of a finite Coxeter group, indexed in shortlex order of their
/// normal forms. Element `0` is the identity.
#[derive(Clone, Debug)]
pub struct ElementTable {
    rank: usize,
    words: Vec<Vec<u8>>,
    lengths: Vec<usize>,
    supports: Vec<TypeSet>,
    right: Vec<Element>,
    longest: Element,
}

impl ElementTable {
    /// Breadth-first closure from the identity under right multiplication by
    /// generators. Elements are identified through the (faithful) Tits
    /// representation; each one keeps the shortlex-least reduced word.
    pub fn enumerate(system: &CoxeterSystem, cap: usize) -> Result<Self> {
        let n = system.rank();
        let refl: Vec<Vec<f64>> = (0..n)
            .map(|i| {
                // column-major: s_i(e_j) = e_j - 2 G(i,j) e_i
                let mut m = identity(n);
                for j in 0..n {
                    m[j * n + i] -= 2.0 * system.gram_entry(i, j);
                }
                m
            })
            .collect();
        let key = |m: &[f64]| -> Vec<i64> { m.iter().map(|x| (x * 1e6).round() as i64).collect() };

        let mut mats = vec![identity(n)];
        let mut words: Vec<Vec<u8>> = vec![vec![]];
        let mut lengths = vec![0usize];
        let mut index: HashMap<Vec<i64>, Element> = HashMap::new();
        index.insert(key(&mats[0]), 0);
        let mut right = vec![usize::MAX; n];

        let mut layer = vec![0usize];
        let mut depth = 0;
        while !layer.is_empty() {
            let mut next = Vec::new();
            for &w in &layer {
                for s in 0..n {
                    let prod = mat_mul(&mats[w], &refl[s], n);
                    let k = key(&prod);
                    let target = match index.get(&k) {
                        Some(&t) => t,
                        None => {
                            let t = mats.len();
                            if t >= cap {
                                return Err(Error::EnumerationCap(cap));
                            }
                            index.insert(k, t);
                            mats.push(prod);
                            let mut word = words[w].clone();
                            word.push(s as u8);
                            words.push(word);
                            lengths.push(depth + 1);
                            right.extend(std::iter::repeat_n(usize::MAX, n));
                            next.push(t);
                            t
                        }
                    };
                    right[w * n + s] = target;
                }
            }
            layer = next;
            depth += 1;
        }
        let max_len = *lengths.iter().max().unwrap_or(&0);
        let longest: Vec<Element> = (0..lengths.len()).filter(|&w| lengths[w] == max_len).collect();
        if longest.len() != 1 {
            return Err(Error::NotSpherical);
        }
        let supports = words
            .iter()
            .map(|w| TypeSet::from_types(w.iter().map(|&s| s as usize)))
            .collect();
        Ok(Self { rank: n, words, lengths, supports, right, longest: longest[0] })
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn identity(&self) -> Element {
        0
    }

    pub fn generator(&self, s: usize) -> Element {
        self.right[s]
    }

    pub fn longest(&self) -> Element {
        self.longest
    }

    pub fn length(&self, w: Element) -> usize {
        self.lengths[w]
    }

    /// Generators occurring in any (equivalently every) reduced word of `w`.
    pub fn support(&self, w: Element) -> TypeSet {
        self.supports[w]
    }

    /// Shortlex-least reduced word.
    pub fn word(&self, w: Element) -> &[u8] {
        &self.words[w]
    }

    pub fn mul_gen(&self, w: Element, s: usize) -> Element {
        self.right[w * self.rank + s]
    }

    pub fn left_mul_gen(&self, s: usize, w: Element) -> Element {
        self.mul(self.generator(s), w)
    }

    pub fn mul(&self, a: Element, b: Element) -> Element {
        self.words[b].iter().fold(a, |acc, &s| self.mul_gen(acc, s as usize))
    }

    pub fn inverse(&self, w: Element) -> Element {
        self.words[w].iter().rev().fold(0, |acc, &s| self.mul_gen(acc, s as usize))
    }

    /// Element represented by an arbitrary word.
    pub fn from_word(&self, word: &[usize]) -> Element {
        word.iter().fold(0, |acc, &s| self.mul_gen(acc, s))
    }

    /// Whether `s` is a right descent of `w`, i.e. `ℓ(ws) < ℓ(w)`.
    pub fn is_right_descent(&self, w: Element, s: usize) -> bool {
        self.length(self.mul_gen(w, s)) < self.length(w)
    }

    /// The type of `w0 s_i w0` for every generator `i`.
    pub fn opposition_involution(&self) -> Vec<usize> {
        let w0 = self.longest;
        (0..self.rank)
            .map(|i| {
                let conj = self.mul(self.mul(w0, self.generator(i)), w0);
                (0..self.rank)
                    .find(|&j| self.generator(j) == conj)
                    .expect("w0 conjugates generators to generators")
            })
            .collect()
    }
}

fn identity(n: usize) -> Vec<f64> {
    let mut m = vec![0.0; n * n];
    for i in 0..n {
        m[i * n + i] = 1.0;
    }
    m
}

// Column-major n x n product.
fn mat_mul(a: &[f64], b: &[f64], n: usize) -> Vec<f64> {
    let mut out = vec![0.0; n * n];
    for col in 0..n {
        for k in 0..n {
            let bk = b[col * n + k];
            if bk == 0.0 {
                continue;
            }
            for row in 0..n {
                out[col * n + row] += a[k * n + row] * bk;
            }
        }
    }
    out
}

/// Enumerates the group of a spherical system with the default cap.
pub fn enumerate_elements(system: &CoxeterSystem, cap: Option<usize>) -> Result<ElementTable> {
    if cap.is_none() && !system.is_spherical() {
        return Err(Error::NotSpherical);
    }
    ElementTable::enumerate(system, cap.unwrap_or(DEFAULT_ELEMENT_CAP))
}

/// The thin building `Σ(W, I)`: chambers are group elements, `i`-adjacency is
/// right multiplication by `s_i`.
pub fn coxeter_complex(system: &CoxeterSystem) -> Result<Building> {
    if !system.is_spherical() {
        return Err(Error::NotSpherical);
    }
    Building::coxeter_complex(system)
}

/// `i ↦ type of w0 s_i w0`.
pub fn opposition_involution(system: &CoxeterSystem) -> Result<Vec<usize>> {
    Ok(enumerate_elements(system, None)?.opposition_involution())
}

/// The spherical realization of `W` on `ℝⁿ` in an orthonormal frame.
///
/// Simple roots `r_i` are unit vectors with `r_i · r_j = -cos(π/m(i,j))`; the
/// fundamental chamber is `{x : r_i · x ≥ 0}` and its type-`i` vertex is the
/// unit vector orthogonal to every `r_j`, `j ≠ i`.
#[derive(Clone, Debug)]
pub struct SphericalChart {
    gram: DMatrix<f64>,
    roots: Vec<DVector<f64>>,
    reflections: Vec<DMatrix<f64>>,
    vertices: Vec<DVector<f64>>,
}

impl SphericalChart {
    pub fn new(system: &CoxeterSystem) -> Result<Self> {
        let n = system.rank();
        let gram = DMatrix::from_fn(n, n, |i, j| system.gram_entry(i, j));
        let chol = gram.clone().cholesky().ok_or(Error::NotSpherical)?;
        let l = chol.l();
        if (0..n).any(|i| l[(i, i)] < CHART_TOLERANCE) {
            return Err(Error::NotSpherical);
        }
        let roots: Vec<DVector<f64>> = (0..n).map(|i| l.row(i).transpose()).collect();
        let reflections = roots
            .iter()
            .map(|r| DMatrix::identity(n, n) - 2.0 * r * r.transpose())
            .collect();
        let root_mat = DMatrix::from_fn(n, n, |i, j| roots[i][j]);
        let inv = root_mat.try_inverse().ok_or(Error::NotSpherical)?;
        let vertices = (0..n)
            .map(|i| {
                let v = inv.column(i).into_owned();
                let norm = v.norm();
                v / norm
            })
            .collect();
        let chart = Self { gram, roots, reflections, vertices };
        chart.check()?;
        Ok(chart)
    }

    fn check(&self) -> Result<()> {
        let n = self.gram.nrows();
        for (i, s) in self.reflections.iter().enumerate() {
            let sq = s * s;
            if (sq - DMatrix::identity(n, n)).amax() > CHART_TOLERANCE {
                return Err(Error::CoxeterMatrix(format!("reflection {i} is not an involution")));
            }
            if (s.transpose() * s - DMatrix::identity(n, n)).amax() > CHART_TOLERANCE {
                return Err(Error::CoxeterMatrix(format!("reflection {i} is not orthogonal")));
            }
        }
        for (i, v) in self.vertices.iter().enumerate() {
            for (j, r) in self.roots.iter().enumerate() {
                let d = r.dot(v);
                if (i == j && d <= CHART_TOLERANCE) || (i != j && d.abs() > CHART_TOLERANCE) {
                    return Err(Error::NotSpherical);
                }
            }
        }
        Ok(())
    }

    pub fn rank(&self) -> usize {
        self.roots.len()
    }

    pub fn gram(&self) -> &DMatrix<f64> {
        &self.gram
    }

    pub fn roots(&self) -> &[DVector<f64>] {
        &self.roots
    }

    pub fn reflections(&self) -> &[DMatrix<f64>] {
        &self.reflections
    }

    /// Unit vertices of the fundamental chamber, indexed by type.
    pub fn chamber_vertices(&self) -> &[DVector<f64>] {
        &self.vertices
    }

    /// Matrix of `w` as the product of reflections along its normal form.
    pub fn element_matrix(&self, table: &ElementTable, w: Element) -> DMatrix<f64> {
        let n = self.rank();
        table
            .word(w)
            .iter()
            .fold(DMatrix::identity(n, n), |acc, &s| acc * &self.reflections[s as usize])
    }

    /// Type-`i` vertex of the chamber `w(C)`.
    pub fn vertex_of(&self, table: &ElementTable, w: Element, i: usize) -> DVector<f64> {
        self.element_matrix(table, w) * &self.vertices[i]
    }
}

/// Convenience wrapper mirroring [`SphericalChart::new`].
pub fn spherical_chart(system: &CoxeterSystem) -> Result<SphericalChart> {
    SphericalChart::new(system)
}
