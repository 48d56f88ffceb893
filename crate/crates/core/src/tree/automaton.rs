use std::collections::{HashMap, VecDeque};
use std::fmt;

use crate::error::{Error, Result};
use crate::tree::{Portrait, TreeAlphabet, VertexWord};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub(crate) struct State {
    pub(crate) perm: u8,
    pub(crate) children: Vec<u32>,
}

/// A finite-state automorphism of the rooted `p`-ary tree, given by its
/// wreath recursion `g = ε^k (g_0, …, g_{p-1})`, where `g_x` is the section
/// at the subtree `xΣ*`:
///
/// `g(xσ) = ε^k(x) g_x(σ)`.
///
/// State 0 is the initial state. Values are normalized on construction: only
/// reachable states are kept and states with identical `(perm, children)`
/// are merged until a fixpoint.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Automaton {
    p: u8,
    states: Vec<State>,
}

impl fmt::Debug for Automaton {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Automaton(p={}; ", self.p)?;
        for (i, s) in self.states.iter().enumerate() {
            write!(f, "{i}:{}{:?} ", s.perm, s.children)?;
        }
        write!(f, ")")
    }
}

impl Automaton {
    pub fn identity(p: u8) -> Automaton {
        Automaton {
            p,
            states: vec![State {
                perm: 0,
                children: vec![0; p as usize],
            }],
        }
    }

    /// Builds an automaton from a raw state table `(perm, children)`;
    /// `initial` selects the initial state.
    pub fn from_table(p: u8, table: &[(u8, Vec<usize>)], initial: usize) -> Result<Automaton> {
        TreeAlphabet::new(p as u32)?;
        if initial >= table.len() {
            return Err(Error::DanglingReference(format!("#{initial}")));
        }
        let mut states = Vec::with_capacity(table.len());
        for (perm, children) in table {
            if *perm >= p {
                return Err(Error::PermOutOfRange {
                    perm: *perm as i64,
                    p,
                });
            }
            if children.len() != p as usize {
                return Err(Error::Malformed(format!(
                    "state has {} children, expected {p}",
                    children.len()
                )));
            }
            if let Some(&c) = children.iter().find(|&&c| c >= table.len()) {
                return Err(Error::DanglingReference(format!("#{c}")));
            }
            states.push(State {
                perm: *perm,
                children: children.iter().map(|&c| c as u32).collect(),
            });
        }
        Ok(normalize(p, &states, initial))
    }

    /// The automorphism acting as `g` on the first `g.level()` letters and
    /// trivially below.
    pub fn from_portrait(g: &Portrait) -> Automaton {
        let (p, n) = (g.arity(), g.level());
        let pu = p as usize;
        let trivial = Portrait::vertex_count(p, n);
        let mut table = Vec::with_capacity(trivial + 1);
        for l in 0..n {
            for v in 0..pu.pow(l as u32) {
                let children = (0..pu)
                    .map(|x| {
                        if l + 1 < n {
                            Portrait::level_offset(p, l + 1) + v * pu + x
                        } else {
                            trivial
                        }
                    })
                    .collect();
                table.push((g.label(l, v), children));
            }
        }
        table.push((0, vec![trivial; pu]));
        Automaton::from_table(p, &table, 0).expect("portrait labels are in range")
    }

    /// `ε^perm (children[0], …, children[p-1])`.
    pub fn from_wreath(perm: u8, children: &[Automaton]) -> Result<Automaton> {
        let p = children
            .first()
            .map(|c| c.p)
            .ok_or_else(|| Error::Malformed("wreath recursion needs p sections".into()))?;
        if children.len() != p as usize {
            return Err(Error::Malformed(format!(
                "wreath recursion has {} sections, expected {p}",
                children.len()
            )));
        }
        for c in children {
            check_same(p, c.p)?;
        }
        if perm >= p {
            return Err(Error::PermOutOfRange {
                perm: perm as i64,
                p,
            });
        }
        let mut states = vec![State {
            perm,
            children: Vec::with_capacity(p as usize),
        }];
        for c in children {
            let offset = states.len() as u32;
            states[0].children.push(offset);
            states.extend(c.states.iter().map(|s| State {
                perm: s.perm,
                children: s.children.iter().map(|&k| k + offset).collect(),
            }));
        }
        Ok(normalize(p, &states, 0))
    }

    pub fn arity(&self) -> u8 {
        self.p
    }

    pub fn num_states(&self) -> usize {
        self.states.len()
    }

    pub fn root_power(&self) -> u8 {
        self.states[0].perm
    }

    pub fn is_identity(&self) -> bool {
        self.states.iter().all(|s| s.perm == 0)
    }

    pub(crate) fn states(&self) -> &[State] {
        &self.states
    }

    /// Product `self ∘ other`, i.e. `(gh)(σ) = g(h(σ))`.
    pub fn compose(&self, other: &Automaton) -> Result<Automaton> {
        check_same(self.p, other.p)?;
        let p = self.p as usize;
        let mut index: HashMap<(u32, u32), u32> = HashMap::new();
        let mut order = vec![(0u32, 0u32)];
        index.insert((0, 0), 0);
        let mut states = Vec::new();
        let mut next = 0;
        while next < order.len() {
            let (i, j) = order[next];
            next += 1;
            let g = &self.states[i as usize];
            let h = &other.states[j as usize];
            let mut children = Vec::with_capacity(p);
            for x in 0..p {
                let moved = (x + h.perm as usize) % p;
                let key = (g.children[moved], h.children[x]);
                let id = *index.entry(key).or_insert_with(|| {
                    order.push(key);
                    (order.len() - 1) as u32
                });
                children.push(id);
            }
            states.push(State {
                perm: ((g.perm as usize + h.perm as usize) % p) as u8,
                children,
            });
        }
        Ok(normalize(self.p, &states, 0))
    }

    pub fn inverse(&self) -> Automaton {
        let p = self.p as usize;
        let states: Vec<State> = self
            .states
            .iter()
            .map(|s| State {
                perm: ((p - s.perm as usize) % p) as u8,
                children: (0..p)
                    .map(|x| s.children[(x + p - s.perm as usize) % p])
                    .collect(),
            })
            .collect();
        normalize(self.p, &states, 0)
    }

    pub fn pow(&self, k: i64) -> Automaton {
        let base = if k < 0 { self.inverse() } else { self.clone() };
        let mut acc = Automaton::identity(self.p);
        for _ in 0..k.unsigned_abs() {
            acc = acc.compose(&base).expect("same arity");
        }
        acc
    }

    /// `[g, h] = g h g⁻¹ h⁻¹`.
    pub fn commutator(&self, other: &Automaton) -> Result<Automaton> {
        self.compose(other)?
            .compose(&self.inverse())?
            .compose(&other.inverse())
    }

    /// `g^h = h g h⁻¹`.
    pub fn conjugate_by(&self, h: &Automaton) -> Result<Automaton> {
        h.compose(self)?.compose(&h.inverse())
    }

    pub fn act(&self, v: &VertexWord) -> Result<VertexWord> {
        check_same(self.p, v.arity())?;
        let p = self.p as usize;
        let mut state = 0usize;
        let mut out = Vec::with_capacity(v.len());
        for &x in v.letters() {
            let s = &self.states[state];
            out.push(((x as usize + s.perm as usize) % p) as u8);
            state = s.children[x as usize] as usize;
        }
        Ok(VertexWord::from_letters_unchecked(self.p, out))
    }

    /// Decides `g = h` on all of Σ* by exploring reachable state pairs.
    pub fn equals(&self, other: &Automaton) -> Result<bool> {
        check_same(self.p, other.p)?;
        let mut seen = std::collections::HashSet::new();
        let mut queue = VecDeque::from([(0u32, 0u32)]);
        seen.insert((0, 0));
        while let Some((i, j)) = queue.pop_front() {
            let g = &self.states[i as usize];
            let h = &other.states[j as usize];
            if g.perm != h.perm {
                return Ok(false);
            }
            for x in 0..self.p as usize {
                let pair = (g.children[x], h.children[x]);
                if seen.insert(pair) {
                    queue.push_back(pair);
                }
            }
        }
        Ok(true)
    }

    /// Root permutation exponent and the `p` sections.
    pub fn wreath_decompose(&self) -> (u8, Vec<Automaton>) {
        let root = &self.states[0];
        let sections = root
            .children
            .iter()
            .map(|&c| normalize(self.p, &self.states, c as usize))
            .collect();
        (root.perm, sections)
    }

    /// Section of `self` at the vertex `v`.
    pub fn section(&self, v: &VertexWord) -> Result<Automaton> {
        check_same(self.p, v.arity())?;
        let mut state = 0usize;
        for &x in v.letters() {
            state = self.states[state].children[x as usize] as usize;
        }
        Ok(normalize(self.p, &self.states, state))
    }

    /// The automorphism acting as `g` on `vΣ*` and trivially elsewhere.
    pub fn embed_at_vertex(v: &VertexWord, g: &Automaton) -> Result<Automaton> {
        check_same(v.arity(), g.p)?;
        let mut acc = g.clone();
        for &x in v.letters().iter().rev() {
            let mut children = vec![Automaton::identity(g.p); g.p as usize];
            children[x as usize] = acc;
            acc = Automaton::from_wreath(0, &children)?;
        }
        Ok(acc)
    }

    /// Truncation to the first `level` levels: the label of every vertex of
    /// length `< level`.
    pub fn portrait(&self, level: usize) -> Portrait {
        let p = self.p as usize;
        let mut labels = Vec::with_capacity(Portrait::vertex_count(self.p, level));
        let mut frontier = vec![0u32];
        for _ in 0..level {
            let mut next = Vec::with_capacity(frontier.len() * p);
            for &s in &frontier {
                let st = &self.states[s as usize];
                labels.push(st.perm);
                next.extend_from_slice(&st.children);
            }
            frontier = next;
        }
        Portrait::from_labels(self.p, level, labels)
    }
}

fn check_same(left: u8, right: u8) -> Result<()> {
    if left == right {
        Ok(())
    } else {
        Err(Error::AlphabetMismatch { left, right })
    }
}

/// Prunes unreachable states, merges identical states to a fixpoint and
/// renumbers in breadth-first order from `initial`.
fn normalize(p: u8, states: &[State], initial: usize) -> Automaton {
    let mut class: Vec<u32> = (0..states.len() as u32).collect();
    let mut count = states.len();
    loop {
        let mut ids: HashMap<(u8, Vec<u32>), u32> = HashMap::new();
        let next: Vec<u32> = states
            .iter()
            .map(|s| {
                let key = (
                    s.perm,
                    s.children.iter().map(|&c| class[c as usize]).collect(),
                );
                let n = ids.len() as u32;
                *ids.entry(key).or_insert(n)
            })
            .collect();
        let merged = ids.len();
        class = next;
        if merged == count {
            break;
        }
        count = merged;
    }
    // representative state per class
    let mut rep = vec![u32::MAX; count];
    for (i, &c) in class.iter().enumerate() {
        if rep[c as usize] == u32::MAX {
            rep[c as usize] = i as u32;
        }
    }
    let mut number = vec![u32::MAX; count];
    let mut order = vec![class[initial]];
    number[class[initial] as usize] = 0;
    let mut out = Vec::new();
    let mut next = 0;
    while next < order.len() {
        let c = order[next];
        next += 1;
        let s = &states[rep[c as usize] as usize];
        let children = s
            .children
            .iter()
            .map(|&child| {
                let cc = class[child as usize];
                if number[cc as usize] == u32::MAX {
                    number[cc as usize] = order.len() as u32;
                    order.push(cc);
                }
                number[cc as usize]
            })
            .collect();
        out.push(State {
            perm: s.perm,
            children,
        });
    }
    debug_assert!(out.len() <= count);
    Automaton { p, states: out }
}
