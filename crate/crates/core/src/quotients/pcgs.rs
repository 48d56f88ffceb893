use std::sync::Arc;

use num_bigint::BigUint;

use crate::error::{Error, Result};
use crate::linalg::inv_mod;
use crate::tree::Portrait;

/// A linear order on the vertices of length `< level` in which every vertex
/// comes after its ancestors.
///
/// For such an order the sets `S_i = {g : g_v = 0 for the first i vertices}`
/// form a chain of subgroups with `S_{i+1} ⊴ S_i` of index `p`, and
/// `g ↦ g_{v_i}` is a homomorphism `S_i → C_p`. Subgroups are stored by an
/// induced polycyclic sequence along this chain.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VertexOrder {
    p: u8,
    level: usize,
    positions: Vec<u32>,
}

impl VertexOrder {
    /// Vertices level by level, lexicographically within a level.
    pub fn level_order(p: u8, level: usize) -> VertexOrder {
        let n = Portrait::vertex_count(p, level);
        VertexOrder {
            p,
            level,
            positions: (0..n as u32).collect(),
        }
    }

    /// Vertices outside the subtree `(depth, value)` first (level order),
    /// then the subtree. The tail of a subgroup's sequence then consists of
    /// its elements supported on that subtree.
    pub fn subtree_last(p: u8, level: usize, depth: usize, value: usize) -> VertexOrder {
        let pu = p as usize;
        let inside = |l: usize, v: usize| l >= depth && v / pu.pow((l - depth) as u32) == value;
        let mut outside = Vec::new();
        let mut below = Vec::new();
        for l in 0..level {
            let off = Portrait::level_offset(p, l);
            for v in 0..pu.pow(l as u32) {
                if inside(l, v) {
                    below.push((off + v) as u32);
                } else {
                    outside.push((off + v) as u32);
                }
            }
        }
        outside.extend(below);
        VertexOrder {
            p,
            level,
            positions: outside,
        }
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    /// Vertex index (canonical portrait index) at `position`.
    pub fn vertex(&self, position: usize) -> usize {
        self.positions[position] as usize
    }
}

#[derive(Clone, Debug)]
struct Entry {
    elem: Portrait,
    /// `elem^{-e}` for `e = 1, …, p-1`.
    neg_powers: Vec<Portrait>,
}

impl Entry {
    fn new(elem: Portrait) -> Entry {
        let p = elem.arity() as u64;
        let inv = elem.inverse();
        let mut neg_powers = vec![inv.clone()];
        for _ in 2..p {
            let next = neg_powers.last().unwrap().mul(&inv);
            neg_powers.push(next);
        }
        Entry { elem, neg_powers }
    }
}

/// A subgroup of the level-`n` quotient of `Aut(Σ*)`, i.e. of the Sylow
/// `p`-subgroup of `Sym(p^n)` acting on the leaves.
///
/// The subgroup is kept as an induced polycyclic sequence relative to a
/// [`VertexOrder`]: at most one element per position, each with leading
/// label 1. Every element has a unique normal form `∏ h_i^{e_i}` (in
/// position order), so the order is `p^len`, membership is sifting, and
/// equality of subgroups reduces to comparing orders plus one inclusion.
#[derive(Clone, Debug)]
pub struct PermSubgroup {
    p: u8,
    level: usize,
    order: Arc<VertexOrder>,
    slots: Vec<Option<Entry>>,
    len: usize,
}

impl PermSubgroup {
    pub fn trivial(p: u8, level: usize) -> PermSubgroup {
        Self::trivial_with_order(Arc::new(VertexOrder::level_order(p, level)))
    }

    pub fn trivial_with_order(order: Arc<VertexOrder>) -> PermSubgroup {
        PermSubgroup {
            p: order.p,
            level: order.level,
            slots: vec![None; order.len()],
            order,
            len: 0,
        }
    }

    pub fn generated(p: u8, level: usize, gens: &[Portrait]) -> PermSubgroup {
        let mut g = Self::trivial(p, level);
        g.extend(gens.iter().cloned());
        g
    }

    /// The same subgroup, re-sequenced along another vertex order.
    pub fn with_order(&self, order: Arc<VertexOrder>) -> PermSubgroup {
        assert_eq!((order.p, order.level), (self.p, self.level));
        let mut g = Self::trivial_with_order(order);
        g.extend(self.generators());
        g
    }

    pub fn arity(&self) -> u8 {
        self.p
    }

    pub fn level(&self) -> usize {
        self.level
    }

    pub fn vertex_order(&self) -> &Arc<VertexOrder> {
        &self.order
    }

    /// `log_p` of the order.
    pub fn log_order(&self) -> usize {
        self.len
    }

    pub fn order(&self) -> BigUint {
        BigUint::from(self.p).pow(self.len as u32)
    }

    pub fn is_trivial(&self) -> bool {
        self.len == 0
    }

    /// The polycyclic sequence, in position order.
    pub fn generators(&self) -> Vec<Portrait> {
        self.slots
            .iter()
            .flatten()
            .map(|e| e.elem.clone())
            .collect()
    }

    /// `(position, element)` pairs of the sequence.
    pub fn sequence(&self) -> impl Iterator<Item = (usize, &Portrait)> {
        self.slots
            .iter()
            .enumerate()
            .filter_map(|(i, e)| e.as_ref().map(|e| (i, &e.elem)))
    }

    /// Sifts `g` through the sequence. Returns the remainder, the position
    /// where sifting stopped (`None` if the remainder is the identity) and
    /// the exponents used so far.
    fn sift_full(&self, g: &Portrait) -> (Portrait, Option<usize>, Vec<u8>) {
        debug_assert_eq!((g.arity(), g.level()), (self.p, self.level));
        let mut g = g.clone();
        let mut exps = vec![0u8; self.slots.len()];
        for pos in 0..self.slots.len() {
            let e = g.labels()[self.order.vertex(pos)];
            if e == 0 {
                continue;
            }
            match &self.slots[pos] {
                Some(entry) => {
                    g = entry.neg_powers[e as usize - 1].mul(&g);
                    exps[pos] = e;
                }
                None => return (g, Some(pos), exps),
            }
        }
        (g, None, exps)
    }

    pub fn contains(&self, g: &Portrait) -> bool {
        self.sift_full(g).1.is_none()
    }

    /// Exponents of `g` in the normal form `∏ h_i^{e_i}`, indexed by
    /// position; `None` if `g` is not in the subgroup.
    pub fn exponents(&self, g: &Portrait) -> Option<Vec<u8>> {
        let (_, stop, exps) = self.sift_full(g);
        stop.is_none().then_some(exps)
    }

    /// Adds `g` and closes up; returns whether the subgroup grew.
    pub fn insert(&mut self, g: Portrait) -> bool {
        let p = self.p;
        let mut grew = false;
        let mut queue = vec![g];
        while let Some(c) = queue.pop() {
            let (r, stop, _) = self.sift_full(&c);
            let Some(pos) = stop else { continue };
            let lead = r.labels()[self.order.vertex(pos)];
            let r = r.pow(inv_mod(lead, p) as u64);
            let r_inv = r.inverse();
            queue.push(r.pow(p as u64));
            for (j, slot) in self.slots.iter().enumerate() {
                let Some(h) = slot else { continue };
                // conjugate the deeper element by the shallower one
                if j < pos {
                    queue.push(h.elem.mul(&r).mul(&h.neg_powers[0]));
                } else {
                    queue.push(r.mul(&h.elem).mul(&r_inv));
                }
            }
            self.slots[pos] = Some(Entry::new(r));
            self.len += 1;
            grew = true;
        }
        grew
    }

    pub fn extend(&mut self, gens: impl IntoIterator<Item = Portrait>) -> bool {
        let mut grew = false;
        for g in gens {
            grew |= self.insert(g);
        }
        grew
    }

    pub fn is_subgroup_of(&self, other: &PermSubgroup) -> bool {
        self.len <= other.len && self.sequence().all(|(_, g)| other.contains(g))
    }

    pub fn same_as(&self, other: &PermSubgroup) -> bool {
        self.len == other.len && self.is_subgroup_of(other)
    }

    /// `⟨self, other⟩`.
    pub fn join(&self, other: &PermSubgroup) -> PermSubgroup {
        let mut g = self.clone();
        g.extend(other.generators());
        g
    }

    /// Closes under conjugation by `ambient`.
    pub fn normalize_under(&mut self, ambient: &[Portrait]) {
        let inverses: Vec<Portrait> = ambient.iter().map(|g| g.inverse()).collect();
        loop {
            let mut grew = false;
            for h in self.generators() {
                for (g, gi) in ambient.iter().zip(&inverses) {
                    grew |= self.insert(g.mul(&h).mul(gi));
                }
            }
            if !grew {
                break;
            }
        }
    }

    /// Normal closure of `seeds` under the group generated by `ambient`.
    pub fn normal_closure(
        p: u8,
        level: usize,
        ambient: &[Portrait],
        seeds: &[Portrait],
    ) -> PermSubgroup {
        let mut g = Self::generated(p, level, seeds);
        g.normalize_under(ambient);
        g
    }

    /// `[A, B]` for subgroups normalized by `ambient`: the normal closure of
    /// the commutators of generators.
    pub fn commutator(a: &[Portrait], b: &PermSubgroup, ambient: &[Portrait]) -> PermSubgroup {
        let mut g = Self::trivial(b.p, b.level);
        let bg = b.generators();
        for x in a {
            for y in &bg {
                g.insert(x.commutator(y));
            }
        }
        g.normalize_under(ambient);
        g
    }

    /// Frattini subgroup `Φ(H) = H^p [H, H]`, the normal closure in `H` of
    /// `p`-th powers and commutators of the sequence.
    pub fn frattini(&self) -> PermSubgroup {
        let gens = self.generators();
        let mut f = Self::trivial(self.p, self.level);
        for (i, x) in gens.iter().enumerate() {
            f.insert(x.pow(self.p as u64));
            for y in &gens[i + 1..] {
                f.insert(x.commutator(y));
            }
        }
        f.normalize_under(&gens);
        f
    }

    /// `H^p = ⟨h^p : h ∈ H⟩`. For `p = 2` this is `Φ(H)`, since every
    /// commutator is a product of squares; for odd `p` the elements are
    /// enumerated within `budget`.
    pub fn power_subgroup(&self, budget: usize) -> Result<PermSubgroup> {
        if self.p == 2 {
            return Ok(self.frattini());
        }
        let mut out = Self::trivial(self.p, self.level);
        for g in self.elements(budget)? {
            out.insert(g.pow(self.p as u64));
        }
        Ok(out)
    }

    /// All elements, in normal-form order.
    pub fn elements(&self, budget: usize) -> Result<Vec<Portrait>> {
        let too_big = (self.len as f64) * (self.p as f64).log2() > (budget as f64).log2();
        if too_big {
            return Err(Error::BudgetExceeded {
                what: format!("enumerating a group of order {}^{}", self.p, self.len),
                budget,
            });
        }
        let mut out = vec![Portrait::identity(self.p, self.level)];
        for entry in self.slots.iter().rev().flatten() {
            let mut next = Vec::with_capacity(out.len() * self.p as usize);
            let mut power = Portrait::identity(self.p, self.level);
            for _ in 0..self.p {
                next.extend(out.iter().map(|g| power.mul(g)));
                power = power.mul(&entry.elem);
            }
            out = next;
        }
        Ok(out)
    }

    /// Image under truncation to a smaller level.
    pub fn truncate(&self, level: usize) -> PermSubgroup {
        Self::generated(
            self.p,
            level,
            &self
                .generators()
                .iter()
                .map(|g| g.truncate(level))
                .collect::<Vec<_>>(),
        )
    }

    /// The elements whose labels vanish at the first `position` vertices of
    /// the order (a tail of the sequence).
    pub fn tail(&self, position: usize) -> PermSubgroup {
        let mut g = Self::trivial_with_order(self.order.clone());
        for (i, slot) in self.slots.iter().enumerate().skip(position) {
            if let Some(e) = slot {
                g.slots[i] = Some(e.clone());
                g.len += 1;
            }
        }
        g
    }

    /// `log_p |self : sub|` for a subgroup `sub`.
    pub fn log_index(&self, sub: &PermSubgroup) -> usize {
        debug_assert!(sub.is_subgroup_of(self));
        self.len - sub.len
    }
}

/// Coordinates on an elementary abelian section `H/K` with `K ⊴ H`.
///
/// The sequence of `K` is extended by generators of `H`; the positions not
/// coming from `K` carry a basis of `H/K`, and the exponents at those
/// positions are the coordinates of a coset.
#[derive(Clone, Debug)]
pub struct RelativeCoords {
    combined: PermSubgroup,
    new_positions: Vec<usize>,
}

impl RelativeCoords {
    pub fn new(upper: &PermSubgroup, lower: &PermSubgroup) -> RelativeCoords {
        let mut combined = lower.clone();
        let before: Vec<bool> = combined.slots.iter().map(|s| s.is_some()).collect();
        combined.extend(upper.generators());
        let new_positions = combined
            .slots
            .iter()
            .enumerate()
            .filter(|(i, s)| s.is_some() && !before[*i])
            .map(|(i, _)| i)
            .collect();
        RelativeCoords {
            combined,
            new_positions,
        }
    }

    pub fn dim(&self) -> usize {
        self.new_positions.len()
    }

    /// Representatives of the basis cosets.
    pub fn basis(&self) -> Vec<Portrait> {
        self.new_positions
            .iter()
            .map(|&i| self.combined.slots[i].as_ref().unwrap().elem.clone())
            .collect()
    }

    /// Coordinates of `g K`; `None` if `g` is outside `H`.
    pub fn coords(&self, g: &Portrait) -> Option<Vec<u8>> {
        let e = self.combined.exponents(g)?;
        Some(self.new_positions.iter().map(|&i| e[i]).collect())
    }

    /// Whether the basis elements have order `p` and commute modulo `K`.
    pub fn is_elementary_abelian(&self) -> bool {
        let basis = self.basis();
        let p = self.combined.p as u64;
        let zero = |g: &Portrait| self.coords(g).is_some_and(|c| c.iter().all(|&x| x == 0));
        basis
            .iter()
            .enumerate()
            .all(|(i, x)| zero(&x.pow(p)) && basis[i + 1..].iter().all(|y| zero(&x.commutator(y))))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tree::grigorchuk_generators;

    fn grigorchuk_level(n: usize) -> Vec<Portrait> {
        grigorchuk_generators()
            .generators
            .iter()
            .map(|(_, g)| g.portrait(n))
            .collect()
    }

    #[test]
    fn orders_of_small_levels() {
        for (n, log) in [(1, 1), (2, 3), (3, 7), (4, 12), (5, 22)] {
            let g = PermSubgroup::generated(2, n, &grigorchuk_level(n));
            assert_eq!(g.log_order(), log, "level {n}");
        }
    }

    #[test]
    fn enumeration_matches_order() {
        let g = PermSubgroup::generated(2, 3, &grigorchuk_level(3));
        let elems = g.elements(1 << 10).unwrap();
        let set: std::collections::HashSet<_> = elems.iter().cloned().collect();
        assert_eq!(set.len(), 128);
        assert!(elems.iter().all(|e| g.contains(e)));
    }

    #[test]
    fn reordering_preserves_subgroup() {
        let g = PermSubgroup::generated(2, 4, &grigorchuk_level(4));
        let h = g.with_order(Arc::new(VertexOrder::subtree_last(2, 4, 1, 1)));
        assert!(g.same_as(&h) && h.same_as(&g));
    }

    #[test]
    fn ternary_wreath_product() {
        // ε at the root and at the vertex 1 generate C_3 ≀ C_3
        let eps =
            crate::tree::Automaton::from_table(3, &[(1, vec![1, 1, 1]), (0, vec![1, 1, 1])], 0)
                .unwrap();
        let root = eps.portrait(2);
        let below = Portrait::embed(1, 1, &eps.portrait(1), 2);
        let sub = PermSubgroup::generated(3, 2, &[below, root.pow(2)]);
        assert_eq!(sub.log_order(), 4);
        for (pos, h) in sub.sequence() {
            assert_eq!(h.labels()[sub.vertex_order().vertex(pos)], 1);
        }
        assert_eq!(sub.elements(100).unwrap().len(), 81);
    }
}
