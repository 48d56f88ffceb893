use std::fmt;

/// An element of the level-`n` quotient of `Aut(Σ*)`, i.e. of the iterated
/// wreath product of `n` copies of `C_p`, stored as the labels (exponents of
/// ε) of all vertices of length `< n`.
///
/// Vertices are indexed level by level; within a level a vertex `σ₁…σ_L` has
/// value `σ₁ p^{L-1} + … + σ_L`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Portrait {
    p: u8,
    level: u8,
    labels: Box<[u8]>,
}

impl fmt::Debug for Portrait {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Portrait[")?;
        let mut start = 0;
        for l in 0..self.level as usize {
            let width = (self.p as usize).pow(l as u32);
            if l > 0 {
                write!(f, "|")?;
            }
            for x in &self.labels[start..start + width] {
                write!(f, "{x}")?;
            }
            start += width;
        }
        write!(f, "]")
    }
}

impl Portrait {
    pub fn vertex_count(p: u8, level: usize) -> usize {
        let p = p as usize;
        (p.pow(level as u32) - 1) / (p - 1)
    }

    /// Index of the first vertex of `level`.
    pub fn level_offset(p: u8, level: usize) -> usize {
        Self::vertex_count(p, level)
    }

    pub(crate) fn from_labels(p: u8, level: usize, labels: Vec<u8>) -> Portrait {
        debug_assert_eq!(labels.len(), Self::vertex_count(p, level));
        Portrait {
            p,
            level: level as u8,
            labels: labels.into_boxed_slice(),
        }
    }

    pub fn identity(p: u8, level: usize) -> Portrait {
        Self::from_labels(p, level, vec![0; Self::vertex_count(p, level)])
    }

    pub fn arity(&self) -> u8 {
        self.p
    }

    pub fn level(&self) -> usize {
        self.level as usize
    }

    pub fn labels(&self) -> &[u8] {
        &self.labels
    }

    pub fn label(&self, level: usize, value: usize) -> u8 {
        self.labels[Self::level_offset(self.p, level) + value]
    }

    pub fn is_identity(&self) -> bool {
        self.labels.iter().all(|&x| x == 0)
    }

    /// Images of all vertices of length `< level` (as canonical indices) and
    /// the permutation of the `p^level` leaves.
    fn images(&self) -> (Vec<u32>, Vec<u32>) {
        let p = self.p as usize;
        let n = self.level as usize;
        let mut all = Vec::with_capacity(self.labels.len());
        let mut current: Vec<u32> = vec![0];
        let mut offset = 0usize;
        for l in 0..n {
            all.extend(current.iter().map(|&v| (offset + v as usize) as u32));
            let mut next = vec![0u32; current.len() * p];
            for (v, &img) in current.iter().enumerate() {
                let k = self.labels[offset + v] as usize;
                for x in 0..p {
                    next[v * p + x] = (img as usize * p + (x + k) % p) as u32;
                }
            }
            offset += p.pow(l as u32);
            current = next;
        }
        (all, current)
    }

    /// Permutation of the leaves `Σ^level` (leaf values as above).
    pub fn leaf_permutation(&self) -> Vec<u32> {
        self.images().1
    }

    /// `self ∘ other`: `(gh)_v = g_{h(v)} + h_v`.
    pub fn mul(&self, other: &Portrait) -> Portrait {
        debug_assert_eq!((self.p, self.level), (other.p, other.level));
        let p = self.p;
        let (img, _) = other.images();
        let labels = img
            .iter()
            .zip(other.labels.iter())
            .map(|(&hv, &h)| (self.labels[hv as usize] + h) % p)
            .collect();
        Portrait {
            p,
            level: self.level,
            labels,
        }
    }

    pub fn inverse(&self) -> Portrait {
        let p = self.p;
        let (img, _) = self.images();
        let mut labels = vec![0u8; self.labels.len()].into_boxed_slice();
        for (v, &gv) in img.iter().enumerate() {
            labels[gv as usize] = (p - self.labels[v]) % p;
        }
        Portrait {
            p,
            level: self.level,
            labels,
        }
    }

    pub fn pow(&self, k: u64) -> Portrait {
        let mut acc = Portrait::identity(self.p, self.level());
        let mut base = self.clone();
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            k >>= 1;
        }
        acc
    }

    /// Order of the element; always a power of `p`.
    pub fn order(&self) -> u64 {
        let mut g = self.clone();
        let mut k = 1;
        while !g.is_identity() {
            g = g.pow(self.p as u64);
            k *= self.p as u64;
        }
        k
    }

    /// `[g, h] = g h g⁻¹ h⁻¹`.
    pub fn commutator(&self, other: &Portrait) -> Portrait {
        self.mul(other).mul(&self.inverse()).mul(&other.inverse())
    }

    /// `h g h⁻¹`.
    pub fn conjugate_by(&self, h: &Portrait) -> Portrait {
        h.mul(self).mul(&h.inverse())
    }

    pub fn truncate(&self, level: usize) -> Portrait {
        assert!(level <= self.level());
        let labels = self.labels[..Self::vertex_count(self.p, level)].to_vec();
        Self::from_labels(self.p, level, labels)
    }

    /// The element acting as `g` on the subtree below the vertex
    /// `(depth, value)` and trivially elsewhere; `g` must have level
    /// `total_level - depth`.
    pub fn embed(depth: usize, value: usize, g: &Portrait, total_level: usize) -> Portrait {
        assert_eq!(g.level() + depth, total_level);
        let p = g.p as usize;
        let mut labels = vec![0u8; Self::vertex_count(g.p, total_level)];
        for l in 0..g.level() {
            let width = p.pow(l as u32);
            let src = Self::level_offset(g.p, l);
            let dst = Self::level_offset(g.p, depth + l) + value * width;
            labels[dst..dst + width].copy_from_slice(&g.labels[src..src + width]);
        }
        Self::from_labels(g.p, total_level, labels)
    }

    /// Recovers the portrait of a permutation of `Σ^level` that preserves the
    /// tree structure and acts at every vertex by a power of ε.
    pub fn from_leaf_permutation(p: u8, level: usize, perm: &[u32]) -> Option<Portrait> {
        let pu = p as usize;
        if perm.len() != pu.pow(level as u32) {
            return None;
        }
        let mut labels = Vec::with_capacity(Self::vertex_count(p, level));
        for l in 0..level {
            let below = pu.pow((level - l - 1) as u32);
            for v in 0..pu.pow(l as u32) {
                // leaves under child x of v start at (v*p + x) * below
                let image_of = |x: usize| perm[(v * pu + x) * below] as usize / below;
                let base = image_of(0);
                let k = base % pu;
                for x in 0..pu {
                    let img = image_of(x);
                    if img / pu != base / pu || img % pu != (x + k) % pu {
                        return None;
                    }
                }
                labels.push(k as u8);
            }
        }
        let portrait = Self::from_labels(p, level, labels);
        if portrait.leaf_permutation().as_slice() == perm {
            Some(portrait)
        } else {
            None
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn root_flip(level: usize) -> Portrait {
        let mut labels = vec![0; Portrait::vertex_count(2, level)];
        labels[0] = 1;
        Portrait::from_labels(2, level, labels)
    }

    #[test]
    fn vertex_counts() {
        assert_eq!(Portrait::vertex_count(2, 0), 0);
        assert_eq!(Portrait::vertex_count(2, 5), 31);
        assert_eq!(Portrait::vertex_count(3, 3), 13);
    }

    #[test]
    fn root_flip_swaps_halves() {
        let a = root_flip(2);
        assert_eq!(a.leaf_permutation(), vec![2, 3, 0, 1]);
        assert!(a.mul(&a).is_identity());
    }

    #[test]
    fn inverse_and_permutation_roundtrip() {
        let g = Portrait::from_labels(2, 3, vec![1, 0, 1, 1, 0, 0, 1]);
        assert!(g.mul(&g.inverse()).is_identity());
        let perm = g.leaf_permutation();
        assert_eq!(Portrait::from_leaf_permutation(2, 3, &perm), Some(g));
    }

    #[test]
    fn composition_is_left_action() {
        let g = Portrait::from_labels(2, 2, vec![1, 0, 0]);
        let h = Portrait::from_labels(2, 2, vec![0, 1, 0]);
        let pg = g.leaf_permutation();
        let ph = h.leaf_permutation();
        let gh = g.mul(&h).leaf_permutation();
        for x in 0..4 {
            assert_eq!(gh[x], pg[ph[x] as usize]);
        }
    }

    #[test]
    fn non_tree_permutation_rejected() {
        assert_eq!(Portrait::from_leaf_permutation(2, 2, &[1, 2, 0, 3]), None);
    }
}
