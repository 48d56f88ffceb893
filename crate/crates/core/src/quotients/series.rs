use std::fmt::Write as _;

use serde::Serialize;

use crate::error::Result;
use crate::quotients::{LevelQuotient, PermSubgroup};
use crate::tree::Portrait;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SeriesKind {
    LowerCentral,
    Dimension,
    NSeries,
    Custom,
}

/// A descending chain `H_1 ⊇ H_2 ⊇ …` of subgroups, ending in the trivial
/// group, inside the group generated by `ambient`.
#[derive(Clone, Debug)]
pub struct SubgroupChain {
    pub kind: SeriesKind,
    pub p: u8,
    pub ambient: Vec<Portrait>,
    pub terms: Vec<PermSubgroup>,
}

impl SubgroupChain {
    /// `γ_1 = G`, `γ_{k+1} = [G, γ_k]`.
    pub fn lower_central(p: u8, level: usize, gens: &[Portrait]) -> SubgroupChain {
        let mut terms = vec![PermSubgroup::generated(p, level, gens)];
        loop {
            let last = terms.last().unwrap();
            if last.is_trivial() {
                break;
            }
            let next = PermSubgroup::commutator(gens, last, gens);
            if next.log_order() == last.log_order() {
                // not nilpotent; cannot happen for p-groups
                break;
            }
            terms.push(next);
        }
        SubgroupChain {
            kind: SeriesKind::LowerCentral,
            p,
            ambient: gens.to_vec(),
            terms,
        }
    }

    /// `G_1 = G`, `G_n = [G, G_{n-1}] · G_{⌈n/p⌉}^p`.
    pub fn dimension(
        p: u8,
        level: usize,
        gens: &[Portrait],
        budget: usize,
    ) -> Result<SubgroupChain> {
        let mut terms = vec![PermSubgroup::generated(p, level, gens)];
        let mut powers: Vec<Option<PermSubgroup>> = vec![None];
        let pu = p as usize;
        loop {
            let n = terms.len() + 1;
            let last = terms.last().unwrap();
            if last.is_trivial() {
                break;
            }
            let k = n.div_ceil(pu);
            if powers[k - 1].is_none() {
                powers[k - 1] = Some(terms[k - 1].power_subgroup(budget)?);
            }
            let comm = PermSubgroup::commutator(gens, last, gens);
            let next = comm.join(powers[k - 1].as_ref().unwrap());
            if next.log_order() == last.log_order() {
                break;
            }
            terms.push(next);
            powers.push(None);
        }
        Ok(SubgroupChain {
            kind: SeriesKind::Dimension,
            p,
            ambient: gens.to_vec(),
            terms,
        })
    }

    pub fn custom(p: u8, ambient: Vec<Portrait>, terms: Vec<PermSubgroup>) -> SubgroupChain {
        SubgroupChain {
            kind: SeriesKind::Custom,
            p,
            ambient,
            terms,
        }
    }

    /// `H_i` for `i ≥ 1`; the trivial group past the end.
    pub fn term(&self, i: usize) -> PermSubgroup {
        assert!(i >= 1);
        match self.terms.get(i - 1) {
            Some(t) => t.clone(),
            None => {
                let t = &self.terms[0];
                PermSubgroup::trivial(t.arity(), t.level())
            }
        }
    }

    /// `log_p |H_1 : H_i|` for `i = 1, …, len`.
    pub fn log_indices(&self) -> Vec<usize> {
        let top = self.terms[0].log_order();
        self.terms.iter().map(|t| top - t.log_order()).collect()
    }

    fn log_index_at(&self, i: usize) -> usize {
        let li = self.log_indices();
        li.get(i - 1).copied().unwrap_or(self.terms[0].log_order())
    }
}

/// Ranks `b_i = d(H_i/H_{i+1})` together with `log_p |H_i : H_{i+1}|`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RankSequence {
    pub p: u8,
    pub ranks: Vec<usize>,
    pub log_indices: Vec<usize>,
}

/// Minimal generator counts of the successive quotients, via the Burnside
/// basis theorem: `d(H/K) = log_p |H : K Φ(H)|`.
pub fn rank_sequence(chain: &SubgroupChain) -> RankSequence {
    let mut ranks = Vec::new();
    let mut log_indices = Vec::new();
    for w in chain.terms.windows(2) {
        let (h, k) = (&w[0], &w[1]);
        let kf = k.join(&h.frattini());
        ranks.push(h.log_order() - kf.log_order());
        log_indices.push(h.log_order() - k.log_order());
    }
    RankSequence {
        p: chain.p,
        ranks,
        log_indices,
    }
}

pub fn lower_central_series(q: &LevelQuotient) -> SubgroupChain {
    SubgroupChain::lower_central(q.arity(), q.level(), &q.generator_portraits())
}

pub fn dimension_series(q: &LevelQuotient, budget: usize) -> Result<SubgroupChain> {
    SubgroupChain::dimension(q.arity(), q.level(), &q.generator_portraits(), budget)
}

/// Flags, per rank index `k`, whether the chain computed at a level agrees
/// with the same chain computed one level deeper on `log_p |H_1 : H_j|` for
/// every `j ≤ k + 1`. A flag stays false once an earlier index disagrees.
pub fn faithful_flags(chain: &SubgroupChain, deeper: &SubgroupChain) -> Vec<bool> {
    let ranks = chain.terms.len().saturating_sub(1);
    let mut ok = true;
    (1..=ranks)
        .map(|k| {
            for j in [k, k + 1] {
                ok &= chain.log_index_at(j) == deeper.log_index_at(j);
            }
            ok
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SeriesRow {
    pub index: usize,
    pub log_index: usize,
    pub rank: usize,
    pub faithful: bool,
}

impl SeriesRow {
    pub fn table(ranks: &RankSequence, flags: &[bool]) -> Vec<SeriesRow> {
        ranks
            .ranks
            .iter()
            .zip(&ranks.log_indices)
            .enumerate()
            .map(|(i, (&rank, &log_index))| SeriesRow {
                index: i + 1,
                log_index,
                rank,
                faithful: flags.get(i).copied().unwrap_or(false),
            })
            .collect()
    }

    pub fn to_tsv(rows: &[SeriesRow]) -> String {
        let mut out = String::from("index\tlog_index\trank\tfaithful\n");
        for r in rows {
            writeln!(
                out,
                "{}\t{}\t{}\t{}",
                r.index, r.log_index, r.rank, r.faithful
            )
            .unwrap();
        }
        out
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct NSeriesReport {
    pub checked: usize,
    pub violations: Vec<String>,
}

impl NSeriesReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks `H_{i+1} ≤ H_i`, normality in the ambient group and
/// `[H_m, H_n] ≤ H_{m+n}`; for dimension series also `H_n^p ≤ H_{pn}`.
pub fn verify_n_series(chain: &SubgroupChain, budget: usize) -> NSeriesReport {
    let mut report = NSeriesReport::default();
    let len = chain.terms.len();
    let gens: Vec<Vec<Portrait>> = chain.terms.iter().map(|t| t.generators()).collect();
    for i in 1..len {
        report.checked += 1;
        if !chain.terms[i].is_subgroup_of(&chain.terms[i - 1]) {
            report
                .violations
                .push(format!("H_{} is not contained in H_{}", i + 1, i));
        }
    }
    for (i, t) in chain.terms.iter().enumerate() {
        report.checked += 1;
        let normal = gens[i]
            .iter()
            .all(|h| chain.ambient.iter().all(|g| t.contains(&h.conjugate_by(g))));
        if !normal {
            report.violations.push(format!("H_{} is not normal", i + 1));
        }
    }
    for m in 1..=len {
        for n in m..=len {
            let target = chain.term(m + n);
            report.checked += 1;
            let ok = gens[m - 1].iter().all(|x| {
                gens[n - 1]
                    .iter()
                    .all(|y| target.contains(&x.commutator(y)))
            });
            if !ok {
                report
                    .violations
                    .push(format!("[H_{m}, H_{n}] is not contained in H_{}", m + n));
            }
        }
    }
    if chain.kind == SeriesKind::Dimension {
        let p = chain.p as usize;
        for n in 1..=len {
            let target = chain.term(p * n);
            report.checked += 1;
            match chain.terms[n - 1].power_subgroup(budget) {
                Ok(pw) if pw.is_subgroup_of(&target) => {}
                Ok(_) => report
                    .violations
                    .push(format!("H_{n}^{p} is not contained in H_{}", p * n)),
                Err(e) => report.violations.push(format!("H_{n}^{p}: {e}")),
            }
        }
    }
    report
}
