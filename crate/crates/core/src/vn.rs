//! The permutation modules `V_n = F_p[Σ^n]` with monomial basis
//! `X_1^{σ_1} … X_n^{σ_n} ↔ σ`, the filtration `V_n^r`, and the
//! identification of `N_m/N_{m+1}` with sums of such modules.

use std::collections::HashSet;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{self, Subspace};
use crate::quotients::{named_elements, named_subgroup, LevelQuotient, RelativeCoords};
use crate::tree::{Automaton, GeneratorFamily, Portrait};

/// A subspace of `V_n`, in reduced echelon form.
pub type VnSubspace = Subspace;

/// An element of `V_n`: coordinates indexed by vertex value, first letter
/// most significant.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct VnElement {
    p: u8,
    n: usize,
    coeffs: Vec<u8>,
}

impl VnElement {
    pub fn zero(p: u8, n: usize) -> VnElement {
        VnElement {
            p,
            n,
            coeffs: vec![0; (p as usize).pow(n as u32)],
        }
    }

    pub fn from_coeffs(p: u8, n: usize, coeffs: Vec<u8>) -> Result<VnElement> {
        if coeffs.len() != (p as usize).pow(n as u32) {
            return Err(Error::Malformed(format!(
                "V_{n} over F_{p} needs {} coordinates, got {}",
                (p as usize).pow(n as u32),
                coeffs.len()
            )));
        }
        let coeffs = coeffs.into_iter().map(|c| c % p).collect();
        Ok(VnElement { p, n, coeffs })
    }

    /// The monomial of the vertex with value `sigma`.
    pub fn monomial(p: u8, n: usize, sigma: usize) -> VnElement {
        let mut v = VnElement::zero(p, n);
        v.coeffs[sigma] = 1;
        v
    }

    pub fn arity(&self) -> u8 {
        self.p
    }

    pub fn level(&self) -> usize {
        self.n
    }

    pub fn coeffs(&self) -> &[u8] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }

    pub fn add(&self, other: &VnElement) -> VnElement {
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| (a + b) % self.p)
            .collect();
        VnElement { coeffs, ..*self }
    }

    pub fn sub(&self, other: &VnElement) -> VnElement {
        let p = self.p;
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| (a + p - b) % p)
            .collect();
        VnElement { coeffs, ..*self }
    }

    /// Indices and values of the nonzero coordinates.
    pub fn support(&self) -> impl Iterator<Item = (usize, u8)> + '_ {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, &c)| c != 0)
            .map(|(i, &c)| (i, c))
    }
}

fn binomial_mod(k: usize, j: usize, p: u8) -> u8 {
    let mut c: u64 = 1;
    for i in 0..j {
        c = c * (k - i) as u64 / (i + 1) as u64;
    }
    (c % p as u64) as u8
}

/// `v_n^r = (1 - X_1)^{r_1} … (1 - X_n)^{r_n}` where `r = r_n … r_1` in base
/// `p`, so `r_1` is the least significant digit.
pub fn v_basis(p: u8, n: usize, r: usize) -> Result<VnElement> {
    let size = (p as usize).pow(n as u32);
    if r >= size {
        return Err(Error::InvalidArgument(format!(
            "v_{n}^{r} needs r < {size}"
        )));
    }
    let pu = p as usize;
    // factor[i][j]: coefficient of X_i^j in (1 - X_i)^{r_i}
    let factors: Vec<Vec<u8>> = (0..n)
        .map(|i| {
            let digit = (r / pu.pow(i as u32)) % pu;
            (0..pu)
                .map(|j| {
                    if j > digit {
                        return 0;
                    }
                    let c = binomial_mod(digit, j, p);
                    if j % 2 == 1 {
                        (p - c) % p
                    } else {
                        c
                    }
                })
                .collect()
        })
        .collect();
    let coeffs = (0..size)
        .map(|sigma| {
            // letter sigma_i sits at weight p^{n-i}
            (1..=n).fold(1u32, |acc, i| {
                let letter = (sigma / pu.pow((n - i) as u32)) % pu;
                acc * factors[i - 1][letter] as u32 % p as u32
            }) as u8
        })
        .collect();
    Ok(VnElement { p, n, coeffs })
}

/// `V_n^r = ⟨v_n^r, …, v_n^{p^n - 1}⟩`, zero once `r ≥ p^n`.
pub fn filtration(p: u8, n: usize, r: usize) -> VnSubspace {
    let size = (p as usize).pow(n as u32);
    let mut space = Subspace::zero(p, size);
    for s in r..size {
        space.insert(v_basis(p, n, s).expect("in range").coeffs());
    }
    space
}

fn check_action(g: &Portrait, v: &VnElement) -> Result<()> {
    if g.arity() != v.p {
        return Err(Error::AlphabetMismatch {
            left: g.arity(),
            right: v.p,
        });
    }
    if g.level() < v.n {
        return Err(Error::LevelTooSmall {
            level: g.level(),
            reason: format!("acting on V_{} needs a portrait of depth {}", v.n, v.n),
        });
    }
    Ok(())
}

/// `g · v`, permuting monomials by the action of `g` on level `n`.
pub fn g_action(g: &Portrait, v: &VnElement) -> Result<VnElement> {
    check_action(g, v)?;
    let perm = g.truncate(v.n).leaf_permutation();
    let mut coeffs = vec![0; v.coeffs.len()];
    for (sigma, &c) in v.coeffs.iter().enumerate() {
        coeffs[perm[sigma] as usize] = c;
    }
    Ok(VnElement { coeffs, ..*v })
}

/// Action of an automaton, through its portrait of depth `n`.
pub fn automaton_action(g: &Automaton, v: &VnElement) -> Result<VnElement> {
    g_action(&g.portrait(v.n), v)
}

/// `[g, v] = v - g · v`.
pub fn lie_action(g: &Portrait, v: &VnElement) -> Result<VnElement> {
    Ok(v.sub(&g_action(g, v)?))
}

fn vec_of(p: u8, n: usize, coeffs: Vec<u8>) -> VnElement {
    VnElement { p, n, coeffs }
}

fn level_of(p: u8, dim: usize) -> usize {
    let mut n = 0;
    let mut d = 1;
    while d < dim {
        d *= p as usize;
        n += 1;
    }
    n
}

/// `[G, W]`: the span of `w - s w` over generators `s` and `w` in the
/// submodule generated by `W`.
pub fn bracket_span(gens: &[Portrait], w: &VnSubspace) -> Result<VnSubspace> {
    let p = w.characteristic();
    let n = level_of(p, w.ambient_dim());
    // saturate W under the generators
    let mut module = w.clone();
    let mut queue: Vec<Vec<u8>> = module.basis();
    while let Some(b) = queue.pop() {
        let v = vec_of(p, n, b);
        for s in gens {
            let image = g_action(s, &v)?;
            if module.insert(image.coeffs()) {
                queue.push(image.coeffs);
            }
        }
    }
    let mut out = Subspace::zero(p, w.ambient_dim());
    for b in module.basis() {
        let v = vec_of(p, n, b);
        for s in gens {
            out.insert(lie_action(s, &v)?.coeffs());
        }
    }
    Ok(out)
}

/// `dim V_n^r / [G, V_n^r]` for `r = 0, …, p^n - 1`.
pub fn corank_profile(gens: &[Portrait], p: u8, n: usize) -> Result<Vec<usize>> {
    let size = (p as usize).pow(n as u32);
    (0..size)
        .into_par_iter()
        .map(|r| {
            let v = filtration(p, n, r);
            Ok(v.dim() - bracket_span(gens, &v)?.dim())
        })
        .collect()
}

/// Indices `r` with `[G, V_n^r] ≠ V_n^{r+1}`.
pub fn uniseriality_failures(gens: &[Portrait], p: u8, n: usize) -> Result<Vec<usize>> {
    let size = (p as usize).pow(n as u32);
    let fails: Result<Vec<Option<usize>>> = (0..size)
        .into_par_iter()
        .map(|r| {
            let span = bracket_span(gens, &filtration(p, n, r))?;
            let next = filtration(p, n, r + 1);
            Ok((span != next).then_some(r))
        })
        .collect();
    Ok(fails?.into_iter().flatten().collect())
}

/// A word for an element `g_m` with `g_m(0^m) = 0^{m-1}1` that fixes `σx`
/// for every other `σ` of length `m - 1`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GmWitness {
    pub m: usize,
    pub word: String,
}

fn is_gm(g: &Portrait, m: usize) -> bool {
    let p = g.arity() as usize;
    (0..m - 1).all(|i| g.label(i, 0) == 0)
        && g.label(m - 1, 0) == 1
        && (1..p.pow((m - 1) as u32)).all(|v| g.label(m - 1, v) == 0)
}

/// Breadth-first search over the level-`m` quotient for an element of the
/// `g_m` shape, returning the first word found.
pub fn find_gm_witness(
    family: &GeneratorFamily,
    m: usize,
    budget: usize,
) -> Result<Option<GmWitness>> {
    if m == 0 {
        return Err(Error::InvalidArgument("g_m needs m ≥ 1".into()));
    }
    let q = LevelQuotient::new(family, m)?;
    let mut letters: Vec<(String, Portrait)> = Vec::new();
    for (name, g) in q.generators() {
        letters.push((name.clone(), g.clone()));
        let inv = g.inverse();
        if &inv != g {
            letters.push((format!("{name}^-1"), inv));
        }
    }
    let id = Portrait::identity(q.arity(), m);
    let mut seen = HashSet::from([id.clone()]);
    let mut frontier = vec![(id, String::new())];
    while !frontier.is_empty() {
        let mut next = Vec::new();
        for (g, w) in &frontier {
            for (name, s) in &letters {
                let h = g.mul(s);
                if !seen.insert(h.clone()) {
                    continue;
                }
                let word = if w.is_empty() {
                    name.clone()
                } else {
                    format!("{w} {name}")
                };
                if is_gm(&h, m) {
                    return Ok(Some(GmWitness { m, word }));
                }
                if seen.len() > budget {
                    return Err(Error::BudgetExceeded {
                        what: "g_m search".into(),
                        budget,
                    });
                }
                next.push((h, word));
            }
        }
        frontier = next;
    }
    Ok(None)
}

/// One summand of `N_m/N_{m+1}`: copies of `element` placed below the
/// vertices of length `m - shift`.
#[derive(Clone, Debug)]
pub struct Component {
    pub name: &'static str,
    pub element: Automaton,
    pub shift: usize,
}

/// `α ⊕ β` (`x`, `x²`) for the Grigorchuk group and `α ⊕ β ⊕ γ`
/// (`x`, `y`, `x²`) for the overgroup.
pub fn components(family: &GeneratorFamily) -> Result<Vec<Component>> {
    let named = named_elements(family)?;
    let mut out = vec![Component {
        name: "alpha",
        element: named.x.clone(),
        shift: 0,
    }];
    if let Some(y) = &named.y {
        out.push(Component {
            name: "beta",
            element: y.clone(),
            shift: 0,
        });
    }
    out.push(Component {
        name: if named.y.is_some() { "gamma" } else { "beta" },
        element: named.x_squared(),
        shift: 1,
    });
    Ok(out)
}

/// `∏_σ (1, …, c, …, 1)^{v_σ}` with `c` below the vertex `σ` of length
/// `v.level()`, inside the level-`n` quotient.
pub fn component_preimage(c: &Automaton, v: &VnElement, n: usize) -> Result<Portrait> {
    let depth = v.n;
    if depth >= n {
        return Err(Error::LevelTooSmall {
            level: n,
            reason: format!("placing elements below depth {depth}"),
        });
    }
    let inner = c.portrait(n - depth);
    let mut acc = Portrait::identity(v.p, n);
    for (sigma, k) in v.support() {
        acc = acc.mul(&Portrait::embed(depth, sigma, &inner, n).pow(k as u64));
    }
    Ok(acc)
}

/// The section `N_m/N_{m+1}` with coordinates split along the components.
#[derive(Clone, Debug)]
pub struct Section {
    pub m: usize,
    coords: RelativeCoords,
    rows: Vec<Vec<u8>>,
    dims: Vec<usize>,
    shifts: Vec<usize>,
    p: u8,
}

impl Section {
    pub fn new(q: &LevelQuotient, m: usize) -> Result<Section> {
        let upper = named_subgroup(q, &format!("N_{m}"))?;
        let lower = named_subgroup(q, &format!("N_{}", m + 1))?;
        let coords = RelativeCoords::new(&upper, &lower);
        let p = q.arity();
        let mut rows = Vec::new();
        let mut dims = Vec::new();
        let mut shifts = Vec::new();
        for c in components(q.family())? {
            let depth = m - c.shift;
            let size = (p as usize).pow(depth as u32);
            dims.push(size);
            shifts.push(c.shift);
            for sigma in 0..size {
                let g = component_preimage(
                    &c.element,
                    &VnElement::monomial(p, depth, sigma),
                    q.level(),
                )?;
                let row = coords.coords(&g).ok_or_else(|| {
                    Error::InvalidArgument(format!(
                        "{} at depth {depth} lies outside N_{m}",
                        c.name
                    ))
                })?;
                rows.push(row);
            }
        }
        Ok(Section {
            m,
            coords,
            rows,
            dims,
            shifts,
            p,
        })
    }

    /// `log_p |N_m : N_{m+1}|`.
    pub fn dim(&self) -> usize {
        self.coords.dim()
    }

    /// Dimensions of the component modules, `p^m` or `p^{m-1}` each.
    pub fn component_dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn is_elementary_abelian(&self) -> bool {
        self.coords.is_elementary_abelian()
    }

    pub fn is_bijective(&self) -> bool {
        let total: usize = self.dims.iter().sum();
        total == self.dim() && linalg::rank(self.p, self.dim(), &self.rows) == total
    }

    /// Component coordinates of `g N_{m+1}`; `None` outside `N_m` or when
    /// the coset is not in the span of the components.
    pub fn decompose(&self, g: &Portrait) -> Option<Vec<u8>> {
        let c = self.coords.coords(g)?;
        linalg::coordinates(self.p, &self.rows, &c)
    }

    /// Splits a concatenated coordinate vector into component vectors.
    pub fn split(&self, v: &[u8]) -> Vec<VnElement> {
        let mut out = Vec::new();
        let mut start = 0;
        for (&d, &shift) in self.dims.iter().zip(&self.shifts) {
            out.push(vec_of(self.p, self.m - shift, v[start..start + d].to_vec()));
            start += d;
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IsoReport {
    pub m: usize,
    pub level: usize,
    pub section_dim: usize,
    pub component_dims: Vec<usize>,
    pub elementary_abelian: bool,
    pub bijective: bool,
    pub equivariant: bool,
}

impl IsoReport {
    pub fn passed(&self) -> bool {
        self.elementary_abelian && self.bijective && self.equivariant
    }
}

/// Verifies that the component map `N_m/N_{m+1} → ⊕ V` is a well-defined
/// linear bijection commuting with conjugation by the generators.
pub fn iso_check(q: &LevelQuotient, m: usize) -> Result<IsoReport> {
    if m == 0 {
        return Err(Error::InvalidArgument("N_m needs m ≥ 1".into()));
    }
    let section = Section::new(q, m)?;
    let comps = components(q.family())?;
    let n = q.level();
    let mut equivariant = section.is_bijective();
    'outer: for (name, g) in q.generators() {
        let auto = q.family().get(name).expect("generator");
        for c in &comps {
            let depth = m - c.shift;
            for sigma in 0..(q.arity() as usize).pow(depth as u32) {
                let mono = VnElement::monomial(q.arity(), depth, sigma);
                let e = component_preimage(&c.element, &mono, n)?;
                let lhs = section.decompose(&e.conjugate_by(g));
                let moved = automaton_action(auto, &mono)?;
                let rhs = section.decompose(&component_preimage(&c.element, &moved, n)?);
                if lhs.is_none() || lhs != rhs {
                    equivariant = false;
                    break 'outer;
                }
            }
        }
    }
    Ok(IsoReport {
        m,
        level: n,
        section_dim: section.dim(),
        component_dims: section.component_dims().to_vec(),
        elementary_abelian: section.is_elementary_abelian(),
        bijective: section.is_bijective(),
        equivariant,
    })
}

/// Outcome of one squaring statement over all `r`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SquareLine {
    pub statement: String,
    pub checked: usize,
    /// Cases where the square equals the target in `N_{m+1}/N_{m+2}`.
    pub exact: usize,
    /// Cases where they agree on the target's component.
    pub on_component: usize,
}

impl SquareLine {
    pub fn holds(&self) -> bool {
        self.exact == self.checked
    }

    pub fn holds_on_component(&self) -> bool {
        self.on_component == self.checked
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SquareReport {
    pub m: usize,
    pub level: usize,
    pub lines: Vec<SquareLine>,
}

/// Squares of preimages of the `v^r`, compared in `N_{m+1}/N_{m+2}` with
/// the images predicted by the squaring lemmas:
///
/// * `(α⁻¹ v_m^r)² = (x²-component)⁻¹(v_m^r)`,
/// * `(β⁻¹ v_m^r)² = 1` for the overgroup,
/// * `((x²-component)⁻¹ v_{m-1}^r)² = (x²-component)⁻¹(v_m^{r + p^{m-1}})`.
pub fn square_map_check(q: &LevelQuotient, m: usize) -> Result<SquareReport> {
    if m == 0 {
        return Err(Error::InvalidArgument("N_m needs m ≥ 1".into()));
    }
    let p = q.arity();
    let n = q.level();
    let next = Section::new(q, m + 1)?;
    let comps = components(q.family())?;
    let sq = comps.last().expect("x² component");
    let sq_index = comps.len() - 1;
    let mut lines = Vec::new();
    let mut run = |statement: String, cases: Vec<(Portrait, Option<(usize, VnElement)>)>| {
        let mut line = SquareLine {
            statement,
            checked: 0,
            exact: 0,
            on_component: 0,
        };
        for (base, target) in cases {
            line.checked += 1;
            let square = base.mul(&base);
            let got = next.decompose(&square);
            let want = match &target {
                Some((_, v)) => {
                    next.decompose(&component_preimage(&sq.element, v, n).expect("depth"))
                }
                None => Some(vec![0; next.dim()]),
            };
            let (Some(got), Some(want)) = (got, want) else {
                continue;
            };
            if got == want {
                line.exact += 1;
            }
            let idx = target.as_ref().map_or(0, |(i, _)| *i);
            if next.split(&got)[idx] == next.split(&want)[idx] {
                line.on_component += 1;
            }
        }
        lines.push(line);
    };
    for c in &comps[..sq_index] {
        let cases = (0..(p as usize).pow(m as u32))
            .map(|r| {
                let v = v_basis(p, m, r).expect("in range");
                let base = component_preimage(&c.element, &v, n).expect("depth");
                let target = (c.name == "alpha").then_some((sq_index, v));
                (base, target)
            })
            .collect();
        let statement = if c.name == "alpha" {
            format!("({}^-1 v_{m}^r)^2 = {}^-1(v_{m}^r)", c.name, sq.name)
        } else {
            format!("({}^-1 v_{m}^r)^2 = 1", c.name)
        };
        run(statement, cases);
    }
    if m >= 1 {
        let shift = (p as usize).pow((m - 1) as u32);
        let cases = (0..shift)
            .map(|r| {
                let v = v_basis(p, m - 1, r).expect("in range");
                let base = component_preimage(&sq.element, &v, n).expect("depth");
                let target = v_basis(p, m, r + shift * (p as usize - 1)).expect("in range");
                (base, Some((sq_index, target)))
            })
            .collect();
        run(
            format!(
                "({0}^-1 v_{1}^r)^2 = {0}^-1(v_{m}^(r+{2}))",
                sq.name,
                m - 1,
                shift * (p as usize - 1)
            ),
            cases,
        );
    }
    Ok(SquareReport { m, level: n, lines })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tree::grigorchuk_generators;

    #[test]
    fn basis_examples() {
        assert_eq!(v_basis(2, 1, 0).unwrap().coeffs(), &[1, 0]);
        assert_eq!(v_basis(2, 1, 1).unwrap().coeffs(), &[1, 1]);
        // 1 - X_2: monomials 1 (vertex 00) and X_2 (vertex 01)
        assert_eq!(v_basis(2, 2, 2).unwrap().coeffs(), &[1, 1, 0, 0]);
        assert_eq!(v_basis(2, 2, 1).unwrap().coeffs(), &[1, 0, 1, 0]);
        assert!(v_basis(2, 2, 4).is_err());
        // (1 - X)^2 = 1 - 2X + X^2 over F_3
        assert_eq!(v_basis(3, 1, 2).unwrap().coeffs(), &[1, 1, 1]);
    }

    #[test]
    fn filtration_dimensions() {
        for n in 0..=4 {
            for r in 0..=(1 << n) {
                assert_eq!(filtration(2, n, r).dim(), (1 << n) - r);
            }
        }
    }

    #[test]
    fn generator_a_on_v1() {
        let a = grigorchuk_generators().get("a").unwrap().portrait(1);
        let one = v_basis(2, 1, 0).unwrap();
        assert_eq!(g_action(&a, &one).unwrap().coeffs(), &[0, 1]);
        assert_eq!(lie_action(&a, &one).unwrap(), v_basis(2, 1, 1).unwrap());
        assert!(lie_action(&a, &v_basis(2, 1, 1).unwrap())
            .unwrap()
            .is_zero());
    }
}
