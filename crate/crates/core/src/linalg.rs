//! Linear algebra over `F_p`: subspaces in reduced row echelon form, with a
//! bit-packed representation for `p = 2`.

/// Inverse of `a` modulo the prime `p`.
pub fn inv_mod(a: u8, p: u8) -> u8 {
    debug_assert!(!a.is_multiple_of(p));
    let (a, p) = (a as u32, p as u32);
    let mut r = 1u32;
    let mut base = a % p;
    let mut e = p - 2;
    while e > 0 {
        if e & 1 == 1 {
            r = r * base % p;
        }
        base = base * base % p;
        e >>= 1;
    }
    r as u8
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Rows {
    Bits(Vec<Vec<u64>>),
    Bytes(Vec<Vec<u8>>),
}

/// A subspace of `F_p^n`, kept in reduced row echelon form so that equal
/// subspaces have identical representations.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Subspace {
    p: u8,
    n: usize,
    pivots: Vec<usize>,
    rows: Rows,
}

fn pack(v: &[u8]) -> Vec<u64> {
    let mut w = vec![0u64; v.len().div_ceil(64)];
    for (i, &x) in v.iter().enumerate() {
        if x & 1 == 1 {
            w[i / 64] |= 1 << (i % 64);
        }
    }
    w
}

fn unpack(w: &[u64], n: usize) -> Vec<u8> {
    (0..n)
        .map(|i| ((w[i / 64] >> (i % 64)) & 1) as u8)
        .collect()
}

fn bit(w: &[u64], i: usize) -> bool {
    (w[i / 64] >> (i % 64)) & 1 == 1
}

fn xor_into(dst: &mut [u64], src: &[u64]) {
    for (d, s) in dst.iter_mut().zip(src) {
        *d ^= s;
    }
}

/// `dst -= c · src` over `F_p`.
fn axpy(dst: &mut [u8], c: u8, src: &[u8], p: u8) {
    if c == 0 {
        return;
    }
    let neg = (p - c) as u16;
    for (d, &s) in dst.iter_mut().zip(src) {
        *d = ((*d as u16 + neg * s as u16) % p as u16) as u8;
    }
}

impl Subspace {
    pub fn zero(p: u8, n: usize) -> Subspace {
        let rows = if p == 2 {
            Rows::Bits(Vec::new())
        } else {
            Rows::Bytes(Vec::new())
        };
        Subspace {
            p,
            n,
            pivots: Vec::new(),
            rows,
        }
    }

    pub fn full(p: u8, n: usize) -> Subspace {
        let mut s = Subspace::zero(p, n);
        for i in 0..n {
            let mut v = vec![0; n];
            v[i] = 1;
            s.insert(&v);
        }
        s
    }

    pub fn span<'a>(p: u8, n: usize, vectors: impl IntoIterator<Item = &'a [u8]>) -> Subspace {
        let mut s = Subspace::zero(p, n);
        for v in vectors {
            s.insert(v);
        }
        s
    }

    pub fn characteristic(&self) -> u8 {
        self.p
    }

    pub fn ambient_dim(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.pivots.len()
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    /// Basis rows in reduced echelon form, ordered by pivot column.
    pub fn basis(&self) -> Vec<Vec<u8>> {
        match &self.rows {
            Rows::Bits(rows) => rows.iter().map(|r| unpack(r, self.n)).collect(),
            Rows::Bytes(rows) => rows.clone(),
        }
    }

    /// Remainder of `v` after elimination against the basis; zero iff
    /// `v` lies in the subspace.
    pub fn reduce(&self, v: &[u8]) -> Vec<u8> {
        assert_eq!(v.len(), self.n);
        match &self.rows {
            Rows::Bits(rows) => {
                let mut w = pack(v);
                for (row, &pv) in rows.iter().zip(&self.pivots) {
                    if bit(&w, pv) {
                        xor_into(&mut w, row);
                    }
                }
                unpack(&w, self.n)
            }
            Rows::Bytes(rows) => {
                let mut w: Vec<u8> = v.iter().map(|&x| x % self.p).collect();
                for (row, &pv) in rows.iter().zip(&self.pivots) {
                    let c = w[pv];
                    axpy(&mut w, c, row, self.p);
                }
                w
            }
        }
    }

    pub fn contains(&self, v: &[u8]) -> bool {
        self.reduce(v).iter().all(|&x| x == 0)
    }

    pub fn contains_subspace(&self, other: &Subspace) -> bool {
        other.basis().iter().all(|v| self.contains(v))
    }

    /// Adds `v`; returns whether the dimension grew.
    pub fn insert(&mut self, v: &[u8]) -> bool {
        let p = self.p;
        let n = self.n;
        match &mut self.rows {
            Rows::Bits(rows) => {
                let mut w = pack(v);
                for (row, &pv) in rows.iter().zip(&self.pivots) {
                    if bit(&w, pv) {
                        xor_into(&mut w, row);
                    }
                }
                let Some(pv) = (0..n).find(|&i| bit(&w, i)) else {
                    return false;
                };
                for row in rows.iter_mut() {
                    if bit(row, pv) {
                        xor_into(row, &w);
                    }
                }
                let at = self.pivots.partition_point(|&q| q < pv);
                self.pivots.insert(at, pv);
                rows.insert(at, w);
                true
            }
            Rows::Bytes(rows) => {
                let mut w: Vec<u8> = v.iter().map(|&x| x % p).collect();
                for (row, &pv) in rows.iter().zip(&self.pivots) {
                    let c = w[pv];
                    axpy(&mut w, c, row, p);
                }
                let Some(pv) = w.iter().position(|&x| x != 0) else {
                    return false;
                };
                let inv = inv_mod(w[pv], p);
                for x in w.iter_mut() {
                    *x = ((*x as u16 * inv as u16) % p as u16) as u8;
                }
                for row in rows.iter_mut() {
                    let c = row[pv];
                    axpy(row, c, &w, p);
                }
                let at = self.pivots.partition_point(|&q| q < pv);
                self.pivots.insert(at, pv);
                rows.insert(at, w);
                true
            }
        }
    }

    pub fn sum(&self, other: &Subspace) -> Subspace {
        let mut s = self.clone();
        for v in other.basis() {
            s.insert(&v);
        }
        s
    }
}

/// Coordinates of `v` in the (independent) family `basis`, or `None` if `v`
/// is outside its span.
pub fn coordinates(p: u8, basis: &[Vec<u8>], v: &[u8]) -> Option<Vec<u8>> {
    let n = v.len();
    let k = basis.len();
    // augmented rows [b_i | e_i]; reduce v alongside
    let mut rows: Vec<(Vec<u8>, Vec<u8>)> = Vec::new();
    let mut pivots: Vec<usize> = Vec::new();
    for (i, b) in basis.iter().enumerate() {
        let mut w = b.iter().map(|&x| x % p).collect::<Vec<_>>();
        let mut tag = vec![0u8; k];
        tag[i] = 1;
        for ((r, t), &pv) in rows.iter().zip(&pivots) {
            let c = w[pv];
            axpy(&mut w, c, r, p);
            axpy(&mut tag, c, t, p);
        }
        let pv = w.iter().position(|&x| x != 0)?;
        let inv = inv_mod(w[pv], p);
        for x in w.iter_mut().chain(tag.iter_mut()) {
            *x = ((*x as u16 * inv as u16) % p as u16) as u8;
        }
        rows.push((w, tag));
        pivots.push(pv);
    }
    let mut w: Vec<u8> = v.iter().map(|&x| x % p).collect();
    let mut coords = vec![0u8; k];
    for ((r, t), &pv) in rows.iter().zip(&pivots) {
        let c = w[pv];
        if c != 0 {
            axpy(&mut w, c, r, p);
            // coords += c · t
            axpy(&mut coords, (p - c) % p, t, p);
        }
    }
    debug_assert_eq!(w.len(), n);
    if w.iter().all(|&x| x == 0) {
        Some(coords)
    } else {
        None
    }
}

/// Rank of a family of vectors.
pub fn rank(p: u8, n: usize, vectors: &[Vec<u8>]) -> usize {
    Subspace::span(p, n, vectors.iter().map(|v| v.as_slice())).dim()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn gf2_basics() {
        let mut s = Subspace::zero(2, 4);
        assert!(s.insert(&[1, 1, 0, 0]));
        assert!(s.insert(&[0, 1, 1, 0]));
        assert!(!s.insert(&[1, 0, 1, 0]));
        assert_eq!(s.dim(), 2);
        assert!(s.contains(&[1, 0, 1, 0]));
        assert!(!s.contains(&[0, 0, 0, 1]));
        assert_eq!(s.basis(), vec![vec![1, 0, 1, 0], vec![0, 1, 1, 0]]);
    }

    #[test]
    fn f3_coordinates() {
        let basis = vec![vec![1, 2, 0], vec![0, 1, 1]];
        // 2·b0 + b1 = (2, 4+1, 1) = (2, 2, 1)
        assert_eq!(coordinates(3, &basis, &[2, 2, 1]), Some(vec![2, 1]));
        assert_eq!(coordinates(3, &basis, &[0, 0, 1]), None);
        assert_eq!(inv_mod(2, 3), 2);
        assert_eq!(inv_mod(3, 7), 5);
    }

    fn vecs(p: u8, n: usize) -> impl Strategy<Value = Vec<Vec<u8>>> {
        prop::collection::vec(prop::collection::vec(0..p, n), 0..8)
    }

    proptest! {
        #[test]
        fn echelon_form_is_canonical(vs in vecs(2, 70), seed in 0usize..8) {
            let a = Subspace::span(2, 70, vs.iter().map(|v| v.as_slice()));
            let mut rotated = vs.clone();
            let len = rotated.len().max(1);
            rotated.rotate_left(seed % len);
            let b = Subspace::span(2, 70, rotated.iter().map(|v| v.as_slice()));
            prop_assert_eq!(&a, &b);
            for v in &vs {
                prop_assert!(a.contains(v));
            }
        }

        #[test]
        fn bit_and_byte_paths_agree(vs in vecs(2, 20)) {
            let bits = Subspace::span(2, 20, vs.iter().map(|v| v.as_slice()));
            let mut bytes = Subspace { p: 2, n: 20, pivots: vec![], rows: Rows::Bytes(vec![]) };
            for v in &vs {
                bytes.insert(v);
            }
            prop_assert_eq!(bits.basis(), bytes.basis());
        }

        #[test]
        fn coordinates_recover_combination(vs in vecs(5, 6), cs in prop::collection::vec(0u8..5, 8)) {
            let basis: Vec<Vec<u8>> = {
                let mut s = Subspace::zero(5, 6);
                vs.iter().filter(|v| s.insert(v)).cloned().collect()
            };
            let mut v = vec![0u8; 6];
            for (b, &c) in basis.iter().zip(&cs) {
                for (x, &y) in v.iter_mut().zip(b) {
                    *x = (*x + c * y) % 5;
                }
            }
            let got = coordinates(5, &basis, &v).unwrap();
            prop_assert_eq!(&got[..], &cs[..basis.len()]);
        }
    }
}
