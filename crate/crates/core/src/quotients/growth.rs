use std::collections::{HashMap, HashSet};

use crate::error::{Error, Result};
use crate::tree::{Automaton, Portrait};

const FINGERPRINT_DEPTH: usize = 8;

fn symmetrize(gens: &[Automaton]) -> Result<Vec<Automaton>> {
    let mut out: Vec<Automaton> = Vec::new();
    for g in gens.iter().flat_map(|g| [g.clone(), g.inverse()]) {
        let mut dup = false;
        for h in &out {
            if h.equals(&g)? {
                dup = true;
                break;
            }
        }
        if !dup && !g.is_identity() {
            out.push(g);
        }
    }
    Ok(out)
}

/// Ball sizes `γ^S(0), …, γ^S(radius)` of the group generated by `gens`
/// (closed under inverses), deciding equality of elements exactly.
///
/// Elements are bucketed by their portrait to a fixed depth and compared
/// with the automaton word-problem solver inside a bucket.
pub fn automaton_growth(gens: &[Automaton], radius: usize, budget: usize) -> Result<Vec<usize>> {
    let p = gens
        .first()
        .map(|g| g.arity())
        .ok_or_else(|| Error::InvalidArgument("no generators".into()))?;
    let s = symmetrize(gens)?;
    let identity = Automaton::identity(p);
    let mut buckets: HashMap<Portrait, Vec<usize>> = HashMap::new();
    let mut elements = vec![identity.clone()];
    buckets.insert(identity.portrait(FINGERPRINT_DEPTH), vec![0]);
    let mut frontier = vec![0usize];
    let mut sizes = vec![1usize];
    for _ in 0..radius {
        let mut next = Vec::new();
        for &i in &frontier {
            for g in &s {
                let h = elements[i].compose(g)?;
                let key = h.portrait(FINGERPRINT_DEPTH);
                let bucket = buckets.entry(key).or_default();
                let mut known = false;
                for &j in bucket.iter() {
                    if elements[j].equals(&h)? {
                        known = true;
                        break;
                    }
                }
                if !known {
                    bucket.push(elements.len());
                    next.push(elements.len());
                    elements.push(h);
                    if elements.len() > budget {
                        return Err(Error::BudgetExceeded {
                            what: "growth ball".into(),
                            budget,
                        });
                    }
                }
            }
        }
        sizes.push(elements.len());
        frontier = next;
    }
    Ok(sizes)
}

/// Ball sizes in a finite quotient given by portraits.
pub fn quotient_growth(gens: &[Portrait], radius: usize) -> Vec<usize> {
    let Some(first) = gens.first() else {
        return vec![1; radius + 1];
    };
    let mut s: Vec<Portrait> = gens.iter().flat_map(|g| [g.clone(), g.inverse()]).collect();
    s.sort();
    s.dedup();
    let id = Portrait::identity(first.arity(), first.level());
    let mut seen = HashSet::from([id.clone()]);
    let mut frontier = vec![id];
    let mut sizes = vec![1];
    for _ in 0..radius {
        let mut next = Vec::new();
        for g in &frontier {
            for t in &s {
                let h = g.mul(t);
                if seen.insert(h.clone()) {
                    next.push(h);
                }
            }
        }
        sizes.push(seen.len());
        frontier = next;
    }
    sizes
}
