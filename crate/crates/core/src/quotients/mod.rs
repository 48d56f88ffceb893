//! Finite quotients `G/stab_G(n)` of tree groups and their subgroups.

mod growth;
mod named;
mod pcgs;
mod series;

pub use growth::{automaton_growth, quotient_growth};
pub use named::{named_elements, named_subgroup, rist_level, rist_vertex, NamedElements};
pub use pcgs::{PermSubgroup, RelativeCoords, VertexOrder};
pub use series::{
    dimension_series, faithful_flags, lower_central_series, rank_sequence, verify_n_series,
    NSeriesReport, RankSequence, SeriesKind, SeriesRow, SubgroupChain,
};

use std::collections::HashSet;

use crate::error::{Error, Result};
use crate::tree::{Automaton, GeneratorFamily, Portrait};

/// Default cap on the number of leaves `p^n` of a level quotient.
pub const DEFAULT_DEGREE_LIMIT: usize = 1 << 20;

/// Default element budget for explicit enumeration.
pub const DEFAULT_BUDGET: usize = 1 << 22;

/// The image of a generated group on level `n` of the tree.
#[derive(Clone, Debug)]
pub struct LevelQuotient {
    family: GeneratorFamily,
    level: usize,
    generators: Vec<(String, Portrait)>,
    group: PermSubgroup,
}

impl LevelQuotient {
    pub fn new(family: &GeneratorFamily, level: usize) -> Result<LevelQuotient> {
        Self::with_degree_limit(family, level, DEFAULT_DEGREE_LIMIT)
    }

    pub fn with_degree_limit(
        family: &GeneratorFamily,
        level: usize,
        limit: usize,
    ) -> Result<LevelQuotient> {
        check_degree(family.p, level, limit)?;
        let generators: Vec<(String, Portrait)> = family
            .generators
            .iter()
            .map(|(n, g)| (n.clone(), g.portrait(level)))
            .collect();
        let gens: Vec<Portrait> = generators.iter().map(|(_, g)| g.clone()).collect();
        let group = PermSubgroup::generated(family.p, level, &gens);
        Ok(LevelQuotient {
            family: family.clone(),
            level,
            generators,
            group,
        })
    }

    pub fn family(&self) -> &GeneratorFamily {
        &self.family
    }

    pub fn arity(&self) -> u8 {
        self.family.p
    }

    pub fn level(&self) -> usize {
        self.level
    }

    pub fn degree(&self) -> usize {
        (self.family.p as usize).pow(self.level as u32)
    }

    pub fn generators(&self) -> &[(String, Portrait)] {
        &self.generators
    }

    pub fn generator_portraits(&self) -> Vec<Portrait> {
        self.generators.iter().map(|(_, g)| g.clone()).collect()
    }

    pub fn generator(&self, name: &str) -> Option<&Portrait> {
        self.generators
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, g)| g)
    }

    /// Point images of a generator on the `p^n` leaves.
    pub fn permutation(&self, name: &str) -> Option<Vec<u32>> {
        self.generator(name).map(|g| g.leaf_permutation())
    }

    /// The whole quotient.
    pub fn group(&self) -> &PermSubgroup {
        &self.group
    }

    /// Truncation of an arbitrary automorphism to this level.
    pub fn image(&self, g: &Automaton) -> Result<Portrait> {
        if g.arity() != self.arity() {
            return Err(Error::AlphabetMismatch {
                left: self.arity(),
                right: g.arity(),
            });
        }
        Ok(g.portrait(self.level))
    }

    /// Evaluates a whitespace-separated word over generator names, with an
    /// optional `^-1` suffix per letter.
    pub fn word(&self, text: &str) -> Result<Portrait> {
        let mut acc = Portrait::identity(self.arity(), self.level);
        for tok in text.split_whitespace() {
            let (name, inv) = match tok.strip_suffix("^-1") {
                Some(n) => (n, true),
                None => (tok, false),
            };
            let g = self
                .generator(name)
                .ok_or_else(|| Error::InvalidArgument(format!("unknown generator `{name}`")))?;
            acc = acc.mul(&if inv { g.inverse() } else { g.clone() });
        }
        Ok(acc)
    }
}

pub(crate) fn check_degree(p: u8, level: usize, limit: usize) -> Result<()> {
    let degree = (p as u128).checked_pow(level as u32);
    match degree {
        Some(d) if d <= limit as u128 && level < 255 => Ok(()),
        _ => Err(Error::DegreeOverflow { level, limit }),
    }
}

/// Breadth-first closure of `gens` under right multiplication by generators,
/// with frontier order canonical per depth. Independent of the polycyclic
/// machinery; intended for small quotients and as a cross-check.
pub fn enumerate(gens: &[Portrait], budget: usize) -> Result<Vec<Portrait>> {
    let first = gens
        .first()
        .ok_or_else(|| Error::InvalidArgument("no generators".into()))?;
    let identity = Portrait::identity(first.arity(), first.level());
    let mut seen: HashSet<Portrait> = HashSet::from([identity.clone()]);
    let mut all = vec![identity.clone()];
    let mut frontier = vec![identity];
    while !frontier.is_empty() {
        let mut next: Vec<Portrait> = Vec::new();
        for g in &frontier {
            for s in gens {
                let h = g.mul(s);
                if !seen.contains(&h) {
                    seen.insert(h.clone());
                    next.push(h);
                    if seen.len() > budget {
                        return Err(Error::BudgetExceeded {
                            what: "breadth-first enumeration".into(),
                            budget,
                        });
                    }
                }
            }
        }
        next.sort();
        all.extend(next.iter().cloned());
        frontier = next;
    }
    Ok(all)
}
