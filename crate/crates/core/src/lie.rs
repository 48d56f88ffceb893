//! Graded Lie algebras `⊕ H_i/H_{i+1}` of N-series and their Cayley graphs.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::fmt::{self, Write as _};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, Subspace};
use crate::quotients::{
    dimension_series, faithful_flags, lower_central_series, named_elements, LevelQuotient,
    PermSubgroup, RelativeCoords, SeriesKind, SubgroupChain, DEFAULT_BUDGET,
};
use crate::tree::Portrait;
use crate::vn::{component_preimage, v_basis};

/// A basis vector of a homogeneous component, with a representative.
#[derive(Clone, Debug)]
pub struct LieBasisElement {
    pub word: String,
    pub element: Portrait,
}

/// `L_i = H_i/H_{i+1}` with a chosen basis.
#[derive(Clone, Debug)]
pub struct LieLayer {
    pub degree: usize,
    pub basis: Vec<LieBasisElement>,
    coords: RelativeCoords,
    rows: Vec<Vec<u8>>,
}

impl LieLayer {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// Coordinates of `g H_{i+1}` in the chosen basis; `None` outside `H_i`.
    pub fn coordinates(&self, g: &Portrait, p: u8) -> Option<Vec<u8>> {
        let c = self.coords.coords(g)?;
        linalg::coordinates(p, &self.rows, &c)
    }
}

#[derive(Clone, Debug)]
pub struct LieOptions {
    pub degree_limit: usize,
    /// Include the `p`-power map (dimension series).
    pub restricted: bool,
    /// Generators, used for degree-one vectors and for bracket words.
    pub generators: Vec<(String, Portrait)>,
    /// Preferred basis vectors; each is placed in the degree where it
    /// first becomes nonzero.
    pub named: Vec<(String, Portrait)>,
}

/// Bracket and power tables of `⊕_{i ≤ D} H_i/H_{i+1}` over `F_p`.
#[derive(Clone, Debug)]
pub struct GradedLieAlgebra {
    pub p: u8,
    pub restricted: bool,
    pub layers: Vec<LieLayer>,
    brackets: HashMap<(usize, usize, usize, usize), Vec<u8>>,
    powers: HashMap<(usize, usize), Vec<u8>>,
}

fn layer_degree(terms: &[PermSubgroup], g: &Portrait) -> Option<usize> {
    if g.is_identity() || !terms[0].contains(g) {
        return None;
    }
    (1..terms.len()).find(|&i| !terms[i].contains(g))
}

pub fn build_graded_lie(chain: &SubgroupChain, options: &LieOptions) -> Result<GradedLieAlgebra> {
    let p = chain.p;
    let limit = options.degree_limit;
    let terms: Vec<PermSubgroup> = (1..=limit + 1).map(|i| chain.term(i)).collect();
    let mut placed: BTreeMap<usize, Vec<(String, Portrait)>> = BTreeMap::new();
    for (w, g) in &options.named {
        if let Some(d) = layer_degree(&terms, g) {
            placed.entry(d).or_default().push((w.clone(), g.clone()));
        }
    }
    let mut layers: Vec<LieLayer> = Vec::with_capacity(limit);
    for i in 1..=limit {
        let coords = RelativeCoords::new(&terms[i - 1], &terms[i]);
        if !coords.is_elementary_abelian() {
            return Err(Error::NotElementaryAbelian(i));
        }
        let mut candidates: Vec<(String, Portrait)> = placed.remove(&i).unwrap_or_default();
        if i == 1 {
            candidates.extend(options.generators.iter().cloned());
        } else {
            for b in &layers[i - 2].basis {
                for (s, g) in &options.generators {
                    candidates.push((format!("[{},{s}]", b.word), b.element.commutator(g)));
                }
            }
        }
        if options.restricted && i % p as usize == 0 {
            for b in &layers[i / p as usize - 1].basis {
                candidates.push((format!("({})^{p}", b.word), b.element.pow(p as u64)));
            }
        }
        for (j, g) in coords.basis().into_iter().enumerate() {
            candidates.push((format!("r{i}_{}", j + 1), g));
        }
        let mut span = Subspace::zero(p, coords.dim());
        let mut basis = Vec::new();
        let mut rows = Vec::new();
        for (word, g) in candidates {
            let Some(c) = coords.coords(&g) else {
                return Err(Error::NotNSeries(format!("`{word}` is not in H_{i}")));
            };
            if span.insert(&c) {
                basis.push(LieBasisElement { word, element: g });
                rows.push(c);
            }
            if span.dim() == coords.dim() {
                break;
            }
        }
        layers.push(LieLayer {
            degree: i,
            basis,
            coords,
            rows,
        });
    }
    let mut algebra = GradedLieAlgebra {
        p,
        restricted: options.restricted,
        layers,
        brackets: HashMap::new(),
        powers: HashMap::new(),
    };
    let mut pairs = Vec::new();
    for i in 1..=limit {
        for k in 1..=limit - i {
            for j in 0..algebra.dim(i) {
                for l in 0..algebra.dim(k) {
                    pairs.push((i, j, k, l));
                }
            }
        }
    }
    let table: Result<Vec<_>> = pairs
        .par_iter()
        .map(|&(i, j, k, l)| {
            let g = algebra.element(i, j).commutator(algebra.element(k, l));
            algebra.layers[i + k - 1]
                .coordinates(&g, p)
                .map(|c| ((i, j, k, l), c))
                .ok_or_else(|| {
                    Error::NotNSeries(format!("[H_{i}, H_{k}] is not contained in H_{}", i + k))
                })
        })
        .collect();
    algebra.brackets = table?.into_iter().collect();
    if options.restricted {
        let pu = p as usize;
        for i in 1..=limit / pu {
            for j in 0..algebra.dim(i) {
                let g = algebra.element(i, j).pow(p as u64);
                let c = algebra.layers[pu * i - 1]
                    .coordinates(&g, p)
                    .ok_or_else(|| {
                        Error::NotNSeries(format!("H_{i}^{p} is not contained in H_{}", pu * i))
                    })?;
                algebra.powers.insert((i, j), c);
            }
        }
    }
    Ok(algebra)
}

impl GradedLieAlgebra {
    pub fn degree_limit(&self) -> usize {
        self.layers.len()
    }

    /// `dim L_i`, zero outside `1..=degree_limit`.
    pub fn dim(&self, i: usize) -> usize {
        if i == 0 {
            return 0;
        }
        self.layers.get(i - 1).map_or(0, |l| l.dim())
    }

    pub fn dims(&self) -> Vec<usize> {
        self.layers.iter().map(|l| l.dim()).collect()
    }

    pub fn element(&self, i: usize, j: usize) -> &Portrait {
        &self.layers[i - 1].basis[j].element
    }

    pub fn word(&self, i: usize, j: usize) -> &str {
        &self.layers[i - 1].basis[j].word
    }

    /// Finds a basis vector by its word.
    pub fn find(&self, word: &str) -> Option<(usize, usize)> {
        self.layers.iter().find_map(|l| {
            l.basis
                .iter()
                .position(|b| b.word == word)
                .map(|j| (l.degree, j))
        })
    }

    /// `[ℓ_{i,j}, ℓ_{k,l}]` in degree `i + k`; `None` past the degree limit.
    pub fn bracket_basis(&self, i: usize, j: usize, k: usize, l: usize) -> Option<&[u8]> {
        self.brackets.get(&(i, j, k, l)).map(|v| v.as_slice())
    }

    /// Bilinear extension of the bracket table.
    pub fn bracket(&self, i: usize, u: &[u8], k: usize, w: &[u8]) -> Option<Vec<u8>> {
        if i + k > self.degree_limit() {
            return None;
        }
        let p = self.p as u32;
        let mut out = vec![0u32; self.dim(i + k)];
        for (j, &a) in u.iter().enumerate().filter(|(_, &a)| a != 0) {
            for (l, &b) in w.iter().enumerate().filter(|(_, &b)| b != 0) {
                let t = self.bracket_basis(i, j, k, l)?;
                for (o, &c) in out.iter_mut().zip(t) {
                    *o = (*o + a as u32 * b as u32 * c as u32) % p;
                }
            }
        }
        Some(out.into_iter().map(|x| x as u8).collect())
    }

    /// `ℓ_{i,j}^{[p]}` in degree `p i`.
    pub fn power_basis(&self, i: usize, j: usize) -> Option<&[u8]> {
        self.powers.get(&(i, j)).map(|v| v.as_slice())
    }

    fn unit(&self, i: usize, j: usize) -> Vec<u8> {
        let mut v = vec![0; self.dim(i)];
        v[j] = 1;
        v
    }

    fn add(&self, a: &[u8], b: &[u8]) -> Vec<u8> {
        a.iter().zip(b).map(|(x, y)| (x + y) % self.p).collect()
    }

    /// Alternation and antisymmetry of the bracket table.
    pub fn check_antisymmetry(&self) -> Vec<String> {
        let mut bad = Vec::new();
        for (&(i, j, k, l), v) in &self.brackets {
            let other = self.bracket_basis(k, l, i, j).expect("symmetric range");
            if self.add(v, other).iter().any(|&x| x != 0) {
                bad.push(format!(
                    "[{}, {}] ≠ -[{}, {}]",
                    self.word(i, j),
                    self.word(k, l),
                    self.word(k, l),
                    self.word(i, j)
                ));
            }
            if (i, j) == (k, l) && v.iter().any(|&x| x != 0) {
                bad.push(format!("[{0}, {0}] ≠ 0", self.word(i, j)));
            }
        }
        bad.sort();
        bad
    }

    /// `[[u,v],w] + [[v,w],u] + [[w,u],v] = 0` on basis triples.
    pub fn check_jacobi(&self) -> Vec<String> {
        let d = self.degree_limit();
        let mut triples = Vec::new();
        for i in 1..=d {
            for k in 1..=d {
                for m in 1..=d {
                    if i + k + m > d {
                        continue;
                    }
                    for j in 0..self.dim(i) {
                        for l in 0..self.dim(k) {
                            for n in 0..self.dim(m) {
                                triples.push(((i, j), (k, l), (m, n)));
                            }
                        }
                    }
                }
            }
        }
        let mut bad: Vec<String> = triples
            .par_iter()
            .filter_map(|&((i, j), (k, l), (m, n))| {
                let (u, v, w) = (self.unit(i, j), self.unit(k, l), self.unit(m, n));
                let t1 = self.bracket(i + k, &self.bracket(i, &u, k, &v)?, m, &w)?;
                let t2 = self.bracket(k + m, &self.bracket(k, &v, m, &w)?, i, &u)?;
                let t3 = self.bracket(m + i, &self.bracket(m, &w, i, &u)?, k, &v)?;
                let sum = self.add(&self.add(&t1, &t2), &t3);
                sum.iter().any(|&x| x != 0).then(|| {
                    format!(
                        "Jacobi fails on {}, {}, {}",
                        self.word(i, j),
                        self.word(k, l),
                        self.word(m, n)
                    )
                })
            })
            .collect();
        bad.sort();
        bad
    }

    /// `ad(v^{[p]}) = ad(v)^p` on basis pairs, and `(λ v)^{[p]} = λ^p v^{[p]}`
    /// on scalings of basis representatives.
    pub fn check_restricted(&self) -> Vec<String> {
        let mut bad = Vec::new();
        if !self.restricted {
            return bad;
        }
        let (p, pu, d) = (self.p, self.p as usize, self.degree_limit());
        for (&(i, j), pw) in &self.powers {
            for k in 1..=d.saturating_sub(pu * i) {
                for l in 0..self.dim(k) {
                    let lhs = self.bracket(pu * i, pw, k, &self.unit(k, l));
                    let v = self.unit(i, j);
                    let mut rhs = Some(self.unit(k, l));
                    let mut deg = k;
                    for _ in 0..pu {
                        rhs = rhs.and_then(|r| self.bracket(i, &v, deg, &r));
                        deg += i;
                    }
                    if lhs != rhs {
                        bad.push(format!(
                            "ad({}^[p]) ≠ ad({})^p on {}",
                            self.word(i, j),
                            self.word(i, j),
                            self.word(k, l)
                        ));
                    }
                }
            }
            for lambda in 2..p {
                let g = self.element(i, j).pow(lambda as u64).pow(p as u64);
                let got = self.layers[pu * i - 1].coordinates(&g, p);
                // λ^p = λ in F_p
                let want: Vec<u8> = pw
                    .iter()
                    .map(|&x| ((x as u32 * lambda as u32) % p as u32) as u8)
                    .collect();
                if got.as_deref() != Some(&want[..]) {
                    bad.push(format!(
                        "({lambda}·{})^[p] ≠ {lambda}^p·{}^[p]",
                        self.word(i, j),
                        self.word(i, j)
                    ));
                }
            }
        }
        bad.sort();
        bad
    }
}

/// Named basis vectors for the built-in groups: `a, b, d, c, x, [a,d], x²`
/// and `x_m^r = α⁻¹(v_m^r)`, `z_m^r` (squares) for the Grigorchuk group;
/// `a, bt, ct, dt, x, y, [a,ct], x²`, `x_m^r`, `y_m^r`, `z_m^r` for the
/// overgroup; `i, j, -1` for the quaternion group.
pub fn named_basis_candidates(q: &LevelQuotient) -> Result<Vec<(String, Portrait)>> {
    let fam = q.family();
    let n = q.level();
    let gen = |s: &str| q.generator(s).cloned().expect("built-in generator");
    let mut out: Vec<(String, Portrait)> = Vec::new();
    match fam.name.as_str() {
        "quaternion" => {
            let i = gen("i");
            out.push(("i".into(), i.clone()));
            out.push(("j".into(), gen("j")));
            out.push(("-1".into(), i.pow(2)));
            return Ok(out);
        }
        "grigorchuk" => {
            for s in ["a", "b", "d", "c"] {
                out.push((s.into(), gen(s)));
            }
        }
        "overgroup" => {
            for s in ["a", "bt", "ct", "dt"] {
                out.push((s.into(), gen(s)));
            }
        }
        _ => return Ok(out),
    }
    let named = named_elements(fam)?;
    let x = named.x.portrait(n);
    out.push(("x".into(), x.clone()));
    let third = if let Some(y) = &named.y {
        out.push(("y".into(), y.portrait(n)));
        "ct"
    } else {
        "d"
    };
    out.push((format!("[a,{third}]"), gen("a").commutator(&gen(third))));
    out.push(("x^2".into(), x.pow(2)));
    let x2 = named.x_squared();
    let mut families = vec![("x", named.x.clone())];
    if let Some(y) = &named.y {
        families.push(("y", y.clone()));
    }
    families.push(("z", x2));
    for m in 1..n {
        for (name, c) in &families {
            for r in 0..1usize << m {
                let v = v_basis(2, m, r)?;
                out.push((format!("{name}_{m}^{r}"), component_preimage(c, &v, n)?));
            }
        }
    }
    Ok(out)
}

/// The Lie algebra of the lower central series (`restricted = false`) or of
/// the dimension series (`restricted = true`) of a quotient, checking that
/// the requested degrees lie in the faithful range.
pub fn lie_algebra_of(
    q: &LevelQuotient,
    kind: SeriesKind,
    degree_limit: usize,
    restricted: bool,
) -> Result<GradedLieAlgebra> {
    let deeper = LevelQuotient::new(q.family(), q.level() + 1)?;
    let (chain, next) = match kind {
        SeriesKind::LowerCentral => (lower_central_series(q), lower_central_series(&deeper)),
        SeriesKind::Dimension => (
            dimension_series(q, DEFAULT_BUDGET)?,
            dimension_series(&deeper, DEFAULT_BUDGET)?,
        ),
        other => {
            return Err(Error::InvalidArgument(format!(
                "no canonical Lie algebra for {other:?} chains"
            )))
        }
    };
    let faithful = faithful_flags(&chain, &next)
        .iter()
        .take_while(|&&b| b)
        .count();
    if degree_limit > faithful {
        return Err(Error::FaithfulRange(format!(
            "degree {degree_limit} requested, level {} is faithful up to degree {faithful}",
            q.level()
        )));
    }
    build_graded_lie(
        &chain,
        &LieOptions {
            degree_limit,
            restricted,
            generators: q.generators().to_vec(),
            named: named_basis_candidates(q)?,
        },
    )
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LieVertex {
    pub degree: usize,
    /// 1-based position in the degree's basis.
    pub index: usize,
    pub word: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LieEdge {
    pub from: [usize; 2],
    pub to: [usize; 2],
    pub label: String,
    pub weight: u8,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PowerEdge {
    pub from: [usize; 2],
    pub to: [usize; 2],
    pub weight: u8,
}

/// Vertices `(i, j)` for basis vectors, an edge `(i,j) → (i+1,k)` labelled
/// `s` with weight `⟨[ℓ_{i,j}, s] | ℓ_{i+1,k}⟩`, and dashed edges
/// `(i,j) → (pi,k)` with weight `⟨ℓ_{i,j}^{[p]} | ℓ_{pi,k}⟩`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LieCayleyGraph {
    pub p: u8,
    pub labels: Vec<String>,
    pub vertices: Vec<LieVertex>,
    pub edges: Vec<LieEdge>,
    pub power_edges: Vec<PowerEdge>,
}

pub fn cayley_graph(l: &GradedLieAlgebra, s: &[(String, Portrait)]) -> Result<LieCayleyGraph> {
    let p = l.p;
    let images: Vec<(String, Vec<u8>)> = s
        .iter()
        .map(|(name, g)| {
            l.layers
                .first()
                .and_then(|layer| layer.coordinates(g, p))
                .map(|c| (name.clone(), c))
                .ok_or_else(|| Error::InvalidArgument(format!("`{name}` is not of degree one")))
        })
        .collect::<Result<_>>()?;
    let mut vertices = Vec::new();
    let mut edges = Vec::new();
    let mut power_edges = Vec::new();
    for layer in &l.layers {
        let i = layer.degree;
        for (j, b) in layer.basis.iter().enumerate() {
            vertices.push(LieVertex {
                degree: i,
                index: j + 1,
                word: b.word.clone(),
            });
            let u = l.unit(i, j);
            for (name, img) in &images {
                let Some(v) = l.bracket(i, &u, 1, img) else {
                    continue;
                };
                for (k, &w) in v.iter().enumerate().filter(|(_, &w)| w != 0) {
                    edges.push(LieEdge {
                        from: [i, j + 1],
                        to: [i + 1, k + 1],
                        label: name.clone(),
                        weight: w,
                    });
                }
            }
            if let Some(pw) = l.power_basis(i, j) {
                for (k, &w) in pw.iter().enumerate().filter(|(_, &w)| w != 0) {
                    power_edges.push(PowerEdge {
                        from: [i, j + 1],
                        to: [p as usize * i, k + 1],
                        weight: w,
                    });
                }
            }
        }
    }
    Ok(LieCayleyGraph {
        p,
        labels: images.into_iter().map(|(n, _)| n).collect(),
        vertices,
        edges,
        power_edges,
    })
}

impl LieCayleyGraph {
    pub fn vertex_counts(&self) -> Vec<usize> {
        let top = self.vertices.iter().map(|v| v.degree).max().unwrap_or(0);
        let mut counts = vec![0; top];
        for v in &self.vertices {
            counts[v.degree - 1] += 1;
        }
        counts
    }

    pub fn find(&self, word: &str) -> Option<[usize; 2]> {
        self.vertices
            .iter()
            .find(|v| v.word == word)
            .map(|v| [v.degree, v.index])
    }

    /// The coordinates of `[ℓ_from, s]` in degree `from.0 + 1`, read off
    /// the edges.
    pub fn s_action(&self, label: &str, from: [usize; 2]) -> Vec<u8> {
        let dim = self
            .vertices
            .iter()
            .filter(|v| v.degree == from[0] + 1)
            .count();
        let mut out = vec![0; dim];
        for e in self
            .edges
            .iter()
            .filter(|e| e.label == label && e.from == from)
        {
            out[e.to[1] - 1] = e.weight;
        }
        out
    }

    /// Labels of the edges `from → to`.
    pub fn labels_between(&self, from: [usize; 2], to: [usize; 2]) -> BTreeSet<String> {
        self.edges
            .iter()
            .filter(|e| e.from == from && e.to == to)
            .map(|e| e.label.clone())
            .collect()
    }

    pub fn has_power_edge(&self, from: [usize; 2], to: [usize; 2]) -> bool {
        self.power_edges
            .iter()
            .any(|e| e.from == from && e.to == to)
    }

    /// Connectivity of the underlying undirected graph.
    pub fn is_connected(&self) -> bool {
        if self.vertices.is_empty() {
            return true;
        }
        let index: HashMap<[usize; 2], usize> = self
            .vertices
            .iter()
            .enumerate()
            .map(|(n, v)| ([v.degree, v.index], n))
            .collect();
        let mut adj = vec![Vec::new(); self.vertices.len()];
        let pairs = self
            .edges
            .iter()
            .map(|e| (e.from, e.to))
            .chain(self.power_edges.iter().map(|e| (e.from, e.to)));
        for (a, b) in pairs {
            if let (Some(&x), Some(&y)) = (index.get(&a), index.get(&b)) {
                adj[x].push(y);
                adj[y].push(x);
            }
        }
        let mut seen = vec![false; self.vertices.len()];
        let mut queue = VecDeque::from([0]);
        seen[0] = true;
        while let Some(x) = queue.pop_front() {
            for &y in &adj[x] {
                if !seen[y] {
                    seen[y] = true;
                    queue.push_back(y);
                }
            }
        }
        seen.into_iter().all(|b| b)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("serializable")
    }
}

fn dot_escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

/// Deterministic DOT text: vertices `d<i>_<j>` labelled by their words,
/// edges labelled by generator names, power edges dashed.
pub fn export_dot(graph: &LieCayleyGraph) -> String {
    let mut out = String::from("digraph lie {\n  rankdir=LR;\n  node [shape=plaintext];\n");
    for v in &graph.vertices {
        writeln!(
            out,
            "  d{}_{} [label=\"{}\"];",
            v.degree,
            v.index,
            dot_escape(&v.word)
        )
        .unwrap();
    }
    let weight = |w: u8| {
        if w == 1 {
            String::new()
        } else {
            format!(" ({w})")
        }
    };
    for e in &graph.edges {
        writeln!(
            out,
            "  d{}_{} -> d{}_{} [label=\"{}{}\"];",
            e.from[0],
            e.from[1],
            e.to[0],
            e.to[1],
            dot_escape(&e.label),
            weight(e.weight)
        )
        .unwrap();
    }
    for e in &graph.power_edges {
        let label = if e.weight == 1 {
            String::new()
        } else {
            format!(", label=\"{}\"", e.weight)
        };
        writeln!(
            out,
            "  d{}_{} -> d{}_{} [style=dashed{label}];",
            e.from[0], e.from[1], e.to[0], e.to[1]
        )
        .unwrap();
    }
    out.push_str("}\n");
    out
}

/// A letter or a braced set of alternative letters.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Symbol {
    Letter(String),
    Choice(Vec<String>),
}

/// A word over generator names with braced choices, written like
/// `a{b|c}a` or `a bt a`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChoiceWord(pub Vec<Symbol>);

impl ChoiceWord {
    /// Parses a word over `alphabet`; letters may be separated by spaces
    /// and are matched greedily against the alphabet.
    pub fn parse(text: &str, alphabet: &[&str]) -> Result<ChoiceWord> {
        let mut names: Vec<&str> = alphabet.to_vec();
        names.sort_by_key(|n| std::cmp::Reverse(n.len()));
        let letter = |rest: &str| -> Result<(String, usize)> {
            names
                .iter()
                .find(|n| rest.starts_with(**n))
                .map(|n| (n.to_string(), n.len()))
                .ok_or_else(|| {
                    Error::InvalidArgument(format!("letter outside the alphabet at `{rest}`"))
                })
        };
        let mut out = Vec::new();
        let mut rest = text.trim_start();
        while !rest.is_empty() {
            if let Some(inner) = rest.strip_prefix('{') {
                let end = inner
                    .find('}')
                    .ok_or_else(|| Error::InvalidArgument(format!("unclosed brace in `{text}`")))?;
                let mut choice = Vec::new();
                for part in inner[..end]
                    .split(['|', ' ', ','])
                    .filter(|s| !s.is_empty())
                {
                    let (l, len) = letter(part)?;
                    if len != part.len() {
                        return Err(Error::InvalidArgument(format!("`{part}` is not a letter")));
                    }
                    choice.push(l);
                }
                out.push(Symbol::Choice(choice));
                rest = &inner[end + 1..];
            } else {
                let (l, len) = letter(rest)?;
                out.push(Symbol::Letter(l));
                rest = &rest[len..];
            }
            rest = rest.trim_start();
        }
        Ok(ChoiceWord(out))
    }

    /// The letters realizable at each position.
    pub fn choices(&self) -> Vec<BTreeSet<String>> {
        self.0
            .iter()
            .map(|s| match s {
                Symbol::Letter(l) => BTreeSet::from([l.clone()]),
                Symbol::Choice(c) => c.iter().cloned().collect(),
            })
            .collect()
    }
}

impl fmt::Display for ChoiceWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let multi = self
            .0
            .iter()
            .any(|s| matches!(s, Symbol::Letter(l) if l.len() > 1));
        for (n, s) in self.0.iter().enumerate() {
            if multi && n > 0 {
                write!(f, " ")?;
            }
            match s {
                Symbol::Letter(l) => write!(f, "{l}")?,
                Symbol::Choice(c) => write!(f, "{{{}}}", c.join("|"))?,
            }
        }
        Ok(())
    }
}

/// The substitutions `σ` (Grigorchuk group) and `σ̃` (overgroup).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Substitution {
    Sigma,
    SigmaTilde,
}

impl Substitution {
    pub fn alphabet(self) -> &'static [&'static str] {
        match self {
            Substitution::Sigma => &["a", "b", "c", "d"],
            Substitution::SigmaTilde => &["a", "bt", "ct", "dt"],
        }
    }

    fn image(self, letter: &str) -> Vec<Symbol> {
        let l = |s: &str| Symbol::Letter(s.to_string());
        match (self, letter) {
            (Substitution::Sigma, "a") => {
                vec![l("a"), Symbol::Choice(vec!["b".into(), "c".into()]), l("a")]
            }
            (Substitution::Sigma, "b") => vec![l("d")],
            (Substitution::Sigma, "c") => vec![l("b")],
            (Substitution::Sigma, "d") => vec![l("c")],
            (Substitution::SigmaTilde, "a") => vec![l("a"), l("bt"), l("a")],
            (Substitution::SigmaTilde, "bt") => vec![l("dt")],
            (Substitution::SigmaTilde, "ct") => vec![l("bt")],
            (Substitution::SigmaTilde, "dt") => vec![l("ct")],
            _ => unreachable!("checked by caller"),
        }
    }
}

/// Applies the substitution `iterations` times; a choice maps to the set
/// of images of its letters.
pub fn sigma_substitute(
    word: &ChoiceWord,
    which: Substitution,
    iterations: usize,
) -> Result<ChoiceWord> {
    let alphabet = which.alphabet();
    let check = |l: &String| {
        if alphabet.contains(&l.as_str()) {
            Ok(())
        } else {
            Err(Error::InvalidArgument(format!(
                "`{l}` is outside the alphabet"
            )))
        }
    };
    let mut current = word.clone();
    for _ in 0..iterations {
        let mut next = Vec::new();
        for s in &current.0 {
            match s {
                Symbol::Letter(l) => {
                    check(l)?;
                    next.extend(which.image(l));
                }
                Symbol::Choice(c) => {
                    let mut set = BTreeSet::new();
                    for l in c {
                        check(l)?;
                        match which.image(l).as_slice() {
                            [Symbol::Letter(x)] => {
                                set.insert(x.clone());
                            }
                            _ => {
                                return Err(Error::InvalidArgument(format!(
                                    "`{l}` inside a choice has a word as image"
                                )))
                            }
                        }
                    }
                    next.push(Symbol::Choice(set.into_iter().collect()));
                }
            }
        }
        current = ChoiceWord(next);
    }
    for s in &current.0 {
        if let Symbol::Letter(l) = s {
            check(l)?;
        }
    }
    Ok(current)
}

/// An edge drawn in a diagram: `from → to` labelled by `labels`, or a
/// power map when `power` is set.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TheoremEdge {
    pub from: String,
    pub to: String,
    pub labels: Vec<String>,
    pub power: bool,
    /// Drawn explicitly, as opposed to generated from a labelling rule.
    pub explicit: bool,
}

fn edge(from: &str, labels: &[&str], to: &str) -> TheoremEdge {
    TheoremEdge {
        from: from.into(),
        to: to.into(),
        labels: labels.iter().map(|s| s.to_string()).collect(),
        power: false,
        explicit: true,
    }
}

fn power(from: &str, to: &str) -> TheoremEdge {
    TheoremEdge {
        power: true,
        ..edge(from, &[], to)
    }
}

/// The edges of the Cayley graph diagrams of the built-in groups, followed
/// by those generated from the labelling rules for `m ≤ max_m`.
pub fn theorem_edges(group: &str, restricted: bool, max_m: usize) -> Result<Vec<TheoremEdge>> {
    let mut out = match (group, restricted) {
        ("grigorchuk", false) => vec![
            edge("b", &["a"], "x"),
            edge("a", &["b", "c"], "x"),
            edge("a", &["c", "d"], "[a,d]"),
            edge("d", &["a"], "[a,d]"),
            edge("x", &["a", "b", "c"], "x^2"),
            edge("x", &["c", "d"], "x_1^0"),
            edge("[a,d]", &["b", "c"], "x_1^0"),
            edge("x_1^0", &["a"], "x_1^1"),
            edge("x_1^1", &["c", "d"], "z_1^0"),
            edge("x_1^1", &["b", "c"], "x_2^0"),
            edge("z_1^0", &["a"], "z_1^1"),
            edge("x_2^0", &["a"], "x_2^1"),
            edge("x_2^1", &["b", "c"], "x_2^2"),
            edge("x_2^2", &["a"], "x_2^3"),
            edge("x_2^3", &["b", "c"], "z_2^0"),
            edge("x_2^3", &["b", "d"], "x_3^0"),
        ],
        ("grigorchuk", true) => vec![
            edge("b", &["a"], "x"),
            edge("a", &["b", "c"], "x"),
            edge("a", &["c", "d"], "[a,d]"),
            edge("d", &["a"], "[a,d]"),
            edge("x", &["c", "d"], "x_1^0"),
            power("x", "x^2"),
            edge("[a,d]", &["b", "c"], "x_1^0"),
            edge("x_1^0", &["a"], "x_1^1"),
            edge("x_1^1", &["b", "c"], "x_2^0"),
            edge("x_2^0", &["a"], "x_2^1"),
            edge("x_2^1", &["b", "c"], "x_2^2"),
            edge("x_2^2", &["a"], "x_2^3"),
            edge("x_2^3", &["b", "d"], "x_3^0"),
        ],
        ("overgroup", false) => vec![
            edge("bt", &["a"], "x"),
            edge("dt", &["a"], "y"),
            edge("ct", &["a"], "[a,ct]"),
            edge("a", &["dt"], "y"),
            edge("a", &["ct"], "[a,ct]"),
            edge("a", &["bt"], "x"),
            edge("x", &["a", "bt"], "x^2"),
            edge("x", &["dt"], "x_1^0"),
            edge("x", &["ct"], "y_1^0"),
            edge("y", &["bt"], "x_1^0"),
            edge("[a,ct]", &["bt"], "y_1^0"),
            edge("x_1^0", &["a"], "x_1^1"),
            edge("x_1^1", &["bt", "dt"], "z_1^0"),
            edge("x_1^1", &["ct"], "x_2^0"),
            edge("x_1^1", &["bt"], "y_2^0"),
            edge("y_1^0", &["a"], "y_1^1"),
            edge("y_1^1", &["dt"], "x_2^0"),
            edge("z_1^0", &["a"], "z_1^1"),
            edge("x_2^0", &["a"], "x_2^1"),
            edge("x_2^1", &["bt"], "x_2^2"),
            edge("x_2^2", &["a"], "x_2^3"),
            edge("x_2^3", &["ct", "dt"], "z_2^0"),
            edge("x_2^3", &["bt"], "x_3^0"),
            edge("x_2^3", &["dt"], "y_3^0"),
            edge("y_2^0", &["a"], "y_2^1"),
            edge("y_2^1", &["bt"], "y_2^2"),
            edge("y_2^2", &["a"], "y_2^3"),
            edge("y_2^3", &["ct"], "x_3^0"),
        ],
        ("overgroup", true) => vec![
            edge("bt", &["a"], "x"),
            edge("dt", &["a"], "y"),
            edge("a", &["dt"], "y"),
            edge("a", &["ct"], "[a,ct]"),
            edge("a", &["bt"], "x"),
            edge("ct", &["a"], "[a,ct]"),
            edge("x", &["dt"], "x_1^0"),
            edge("x", &["ct"], "y_1^0"),
            power("x", "x^2"),
            edge("y", &["bt"], "x_1^0"),
            edge("[a,ct]", &["bt"], "y_1^0"),
            edge("x_1^0", &["a"], "x_1^1"),
            edge("x_1^1", &["bt"], "x_2^0"),
            edge("x_2^0", &["a"], "x_2^1"),
            edge("x_2^1", &["bt"], "x_2^2"),
            edge("x_2^2", &["a"], "x_2^3"),
            edge("x_2^3", &["dt"], "x_3^0"),
            edge("y_1^0", &["a"], "y_1^1"),
            edge("y_1^1", &["bt"], "y_2^0"),
            edge("y_2^0", &["a"], "y_2^1"),
            edge("y_2^1", &["bt"], "y_2^2"),
            edge("y_2^2", &["a"], "y_2^3"),
            edge("y_2^3", &["dt"], "y_3^0"),
        ],
        (other, _) => return Err(Error::UnknownGroup(other.to_string())),
    };
    // z_m^r sits in degree 2·deg(x_m^r) of the restricted algebra, so the
    // z-edges only apply to the lower central series.
    let (sub, families): (Substitution, &[&str]) = match (group, restricted) {
        ("grigorchuk", false) => (Substitution::Sigma, &["x", "z"]),
        ("grigorchuk", true) => (Substitution::Sigma, &["x"]),
        (_, false) => (Substitution::SigmaTilde, &["x", "y", "z"]),
        (_, true) => (Substitution::SigmaTilde, &["x", "y"]),
    };
    let alphabet = sub.alphabet();
    let labels = |text: &str, m: usize| -> Result<Vec<String>> {
        let w = sigma_substitute(&ChoiceWord::parse(text, alphabet)?, sub, m)?;
        Ok(w.choices()
            .into_iter()
            .flatten()
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect())
    };
    let rule = |from: String, labels: Vec<String>, to: String| TheoremEdge {
        from,
        to,
        labels,
        power: false,
        explicit: false,
    };
    for m in 1..=max_m {
        let last = (1usize << m) - 1;
        if group == "grigorchuk" {
            out.push(rule(
                format!("x_{m}^{last}"),
                labels("{c|d}", m)?,
                format!("x_{}^0", m + 1),
            ));
            if !restricted {
                out.push(rule(
                    format!("x_{m}^{last}"),
                    labels("{b|d}", m)?,
                    format!("z_{m}^0"),
                ));
            }
        } else {
            out.push(rule(
                format!("x_{m}^{last}"),
                labels("dt", m)?,
                format!("x_{}^0", m + 1),
            ));
            out.push(rule(
                format!("x_{m}^{last}"),
                labels("ct", m)?,
                format!("y_{}^0", m + 1),
            ));
            if !restricted {
                let mut z = labels("bt", m)?;
                z.extend(labels("ct", m)?);
                out.push(rule(format!("x_{m}^{last}"), z, format!("z_{m}^0")));
            }
            out.push(rule(
                format!("y_{m}^{last}"),
                labels("bt", m)?,
                format!("x_{}^0", m + 1),
            ));
        }
        let path = sigma_substitute(&ChoiceWord::parse("a", alphabet)?, sub, m - 1)?.choices();
        for f in families {
            for (r, set) in path.iter().enumerate() {
                out.push(rule(
                    format!("{f}_{m}^{r}"),
                    set.iter().cloned().collect(),
                    format!("{f}_{m}^{}", r + 1),
                ));
            }
            if restricted && *f == "x" {
                for r in 0..=last {
                    out.push(TheoremEdge {
                        power: true,
                        ..rule(format!("x_{m}^{r}"), vec![], format!("z_{m}^{r}"))
                    });
                }
            }
        }
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum LabelStatus {
    /// Some stated label carries nonzero weight.
    Pass,
    Fail,
    /// An endpoint is outside the computed degrees.
    OutOfRange,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LabelCheck {
    pub edge: TheoremEdge,
    pub computed: Vec<String>,
    pub status: LabelStatus,
    /// The computed label set equals the stated one.
    pub exact: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LabelReport {
    pub checks: Vec<LabelCheck>,
}

impl LabelReport {
    /// No explicitly drawn edge in range fails.
    pub fn explicit_pass(&self) -> bool {
        self.checks
            .iter()
            .filter(|c| c.edge.explicit)
            .all(|c| c.status != LabelStatus::Fail)
    }

    pub fn checked_explicit(&self) -> usize {
        self.checks
            .iter()
            .filter(|c| c.edge.explicit && c.status != LabelStatus::OutOfRange)
            .count()
    }

    pub fn failures(&self) -> Vec<&LabelCheck> {
        self.checks
            .iter()
            .filter(|c| c.status == LabelStatus::Fail)
            .collect()
    }
}

/// Compares the labels realized in `graph` with the diagram edges.
pub fn match_theorem_labels(graph: &LieCayleyGraph, edges: &[TheoremEdge]) -> LabelReport {
    let checks = edges
        .iter()
        .map(|e| {
            let (Some(from), Some(to)) = (graph.find(&e.from), graph.find(&e.to)) else {
                return LabelCheck {
                    edge: e.clone(),
                    computed: vec![],
                    status: LabelStatus::OutOfRange,
                    exact: false,
                };
            };
            if e.power {
                let ok = graph.has_power_edge(from, to);
                return LabelCheck {
                    edge: e.clone(),
                    computed: vec![],
                    status: if ok {
                        LabelStatus::Pass
                    } else {
                        LabelStatus::Fail
                    },
                    exact: ok,
                };
            }
            let computed: Vec<String> = graph.labels_between(from, to).into_iter().collect();
            let stated: BTreeSet<&String> = e.labels.iter().collect();
            let realized = computed.iter().any(|c| stated.contains(c));
            LabelCheck {
                edge: e.clone(),
                exact: computed.iter().collect::<BTreeSet<_>>() == stated,
                computed,
                status: if realized {
                    LabelStatus::Pass
                } else {
                    LabelStatus::Fail
                },
            }
        })
        .collect();
    LabelReport { checks }
}
