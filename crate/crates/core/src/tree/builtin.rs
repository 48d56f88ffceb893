use crate::error::{Error, Result};
use crate::tree::{Automaton, Portrait};

/// A named, ordered generating set of tree automorphisms.
#[derive(Clone, Debug)]
pub struct GeneratorFamily {
    pub name: String,
    pub p: u8,
    pub generators: Vec<(String, Automaton)>,
}

impl GeneratorFamily {
    pub fn new(name: &str, generators: Vec<(String, Automaton)>) -> Result<GeneratorFamily> {
        let p = generators
            .first()
            .map(|(_, g)| g.arity())
            .ok_or_else(|| Error::InvalidArgument("empty generator family".into()))?;
        if let Some((_, g)) = generators.iter().find(|(_, g)| g.arity() != p) {
            return Err(Error::AlphabetMismatch {
                left: p,
                right: g.arity(),
            });
        }
        Ok(GeneratorFamily {
            name: name.to_string(),
            p,
            generators,
        })
    }

    pub fn get(&self, name: &str) -> Option<&Automaton> {
        self.generators
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, g)| g)
    }

    pub fn names(&self) -> Vec<&str> {
        self.generators.iter().map(|(n, _)| n.as_str()).collect()
    }

    /// Resolves `grigorchuk`, `overgroup` and `quaternion`.
    pub fn builtin(name: &str) -> Result<GeneratorFamily> {
        match name {
            "grigorchuk" => Ok(grigorchuk_generators()),
            "overgroup" => Ok(overgroup_generators()),
            "quaternion" => Ok(quaternion_generators()),
            other => Err(Error::UnknownGroup(other.to_string())),
        }
    }
}

// unit quaternions as (negative, unit) with units 1, i, j, k = 0, 1, 2, 3
fn quaternion_mul(x: (bool, u8), y: (bool, u8)) -> (bool, u8) {
    let (u, w) = (x.1, y.1);
    let (neg, unit) = match (u, w) {
        (0, w) => (false, w),
        (u, 0) => (false, u),
        (u, w) if u == w => (true, 0),
        // ij = k, jk = i, ki = j
        (u, w) if w == u % 3 + 1 => (false, 6 - u - w),
        (u, w) => (true, 6 - u - w),
    };
    (x.0 ^ y.0 ^ neg, unit)
}

/// The quaternion group `Q_8 = ⟨i, j⟩` acting regularly on the 8 leaves of
/// the binary tree of depth 3. The leaf `b a c` is the element
/// `j^b i^a (-1)^c`, so that cosets of `⟨i⟩` and `⟨-1⟩` are subtrees.
pub fn quaternion_generators() -> GeneratorFamily {
    let leaf = |v: usize| {
        let j = if v & 4 != 0 { (false, 2) } else { (false, 0) };
        let i = if v & 2 != 0 { (false, 1) } else { (false, 0) };
        let s = (v & 1 != 0, 0);
        quaternion_mul(quaternion_mul(j, i), s)
    };
    let leaves: Vec<(bool, u8)> = (0..8).map(leaf).collect();
    let generator = |g: (bool, u8)| {
        let perm: Vec<u32> = leaves
            .iter()
            .map(|&h| {
                let image = quaternion_mul(g, h);
                leaves.iter().position(|&l| l == image).unwrap() as u32
            })
            .collect();
        let portrait = Portrait::from_leaf_permutation(2, 3, &perm).expect("blocks are subtrees");
        Automaton::from_portrait(&portrait)
    };
    GeneratorFamily::new(
        "quaternion",
        vec![
            ("i".to_string(), generator((false, 1))),
            ("j".to_string(), generator((false, 2))),
        ],
    )
    .expect("binary")
}

// state table: 0 = e, 1 = a, 2 = b, 3 = c, 4 = d
fn grigorchuk_table() -> Vec<(u8, Vec<usize>)> {
    vec![
        (0, vec![0, 0]),
        (1, vec![0, 0]),
        (0, vec![1, 3]),
        (0, vec![1, 4]),
        (0, vec![0, 2]),
    ]
}

/// `a`, `b = (a, c)`, `c = (a, d)`, `d = (1, b)`.
pub fn grigorchuk_generators() -> GeneratorFamily {
    let table = grigorchuk_table();
    let gens = ["a", "b", "c", "d"]
        .iter()
        .enumerate()
        .map(|(i, n)| {
            let g = Automaton::from_table(2, &table, i + 1).expect("static table");
            (n.to_string(), g)
        })
        .collect();
    GeneratorFamily::new("grigorchuk", gens).expect("static family")
}

/// `a`, `bt = (a, ct)`, `ct = (1, dt)`, `dt = (1, bt)`: the overgroup
/// containing the Grigorchuk group via `b = dt·bt`, `c = bt·ct`, `d = ct·dt`.
pub fn overgroup_generators() -> GeneratorFamily {
    let table = vec![
        (0, vec![0, 0]),
        (1, vec![0, 0]),
        (0, vec![1, 3]),
        (0, vec![0, 4]),
        (0, vec![0, 2]),
    ];
    let gens = ["a", "bt", "ct", "dt"]
        .iter()
        .enumerate()
        .map(|(i, n)| {
            let g = Automaton::from_table(2, &table, i + 1).expect("static table");
            (n.to_string(), g)
        })
        .collect();
    GeneratorFamily::new("overgroup", gens).expect("static family")
}
