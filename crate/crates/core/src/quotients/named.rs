use std::sync::Arc;

use crate::error::{Error, Result};
use crate::quotients::{
    check_degree, dimension_series, lower_central_series, LevelQuotient, PermSubgroup, VertexOrder,
    DEFAULT_BUDGET, DEFAULT_DEGREE_LIMIT,
};
use crate::tree::{Automaton, GeneratorFamily, Portrait};

/// Distinguished elements of the built-in groups.
///
/// For the Grigorchuk group `x = [a, b]` and `K = ⟨x⟩^G`; for the overgroup
/// `x = [a, bt]`, `y = [a, dt]` and `K = ⟨x, y⟩^G`. In both cases
/// `T = ⟨x²⟩^G`.
#[derive(Clone, Debug)]
pub struct NamedElements {
    pub x: Automaton,
    pub y: Option<Automaton>,
}

impl NamedElements {
    pub fn x_squared(&self) -> Automaton {
        self.x.compose(&self.x).expect("same arity")
    }

    /// Normal generators of `K`.
    pub fn k_seeds(&self) -> Vec<Automaton> {
        let mut v = vec![self.x.clone()];
        v.extend(self.y.clone());
        v
    }
}

pub fn named_elements(family: &GeneratorFamily) -> Result<NamedElements> {
    let get = |n: &str| {
        family
            .get(n)
            .ok_or_else(|| Error::UnknownGroup(family.name.clone()))
    };
    match family.name.as_str() {
        "grigorchuk" => Ok(NamedElements {
            x: get("a")?.commutator(get("b")?)?,
            y: None,
        }),
        "overgroup" => Ok(NamedElements {
            x: get("a")?.commutator(get("bt")?)?,
            y: Some(get("a")?.commutator(get("dt")?)?),
        }),
        other => Err(Error::UnknownSubgroup(format!(
            "K, T and N are only defined for the built-in groups, not `{other}`"
        ))),
    }
}

fn normal_closure_of(q: &LevelQuotient, seeds: &[Automaton], level: usize) -> Result<PermSubgroup> {
    let gens: Vec<Portrait> = q
        .family()
        .generators
        .iter()
        .map(|(_, g)| g.portrait(level))
        .collect();
    let seeds: Vec<Portrait> = seeds.iter().map(|s| s.portrait(level)).collect();
    Ok(PermSubgroup::normal_closure(
        q.arity(),
        level,
        &gens,
        &seeds,
    ))
}

/// `Q_m = Q × … × Q` (`p^m` copies, one below each vertex of length `m`),
/// where `Q` is the normal closure of `seeds`.
fn product_at_level(q: &LevelQuotient, seeds: &[Automaton], m: usize) -> Result<PermSubgroup> {
    let n = q.level();
    if m >= n {
        return Err(Error::LevelTooSmall {
            level: n,
            reason: format!("a product at depth {m} needs level > {m}"),
        });
    }
    let inner = normal_closure_of(q, seeds, n - m)?;
    let p = q.arity();
    let mut out = PermSubgroup::trivial(p, n);
    let gens = inner.generators();
    for v in 0..(p as usize).pow(m as u32) {
        for g in &gens {
            out.insert(Portrait::embed(m, v, g, n));
        }
    }
    Ok(out)
}

/// Image in `q` of the elements of the group acting trivially outside the
/// subtree of the vertex `(depth, value)`.
///
/// Computed as the set of elements of the level `n + lookahead` quotient
/// with trivial labels outside the subtree, truncated to level `n`. This
/// contains the true image and shrinks to it as `lookahead` grows.
pub fn rist_vertex(
    q: &LevelQuotient,
    depth: usize,
    value: usize,
    lookahead: usize,
) -> Result<PermSubgroup> {
    let n = q.level();
    let deep = n + lookahead;
    check_degree(q.arity(), deep, DEFAULT_DEGREE_LIMIT)?;
    let deep_q = LevelQuotient::new(q.family(), deep)?;
    let order = Arc::new(VertexOrder::subtree_last(q.arity(), deep, depth, value));
    let reordered = deep_q.group().with_order(order);
    let outside =
        Portrait::vertex_count(q.arity(), deep) - Portrait::vertex_count(q.arity(), deep - depth);
    Ok(reordered.tail(outside).truncate(n))
}

/// `rist(m) = ⟨rist(σ) : |σ| = m⟩`.
pub fn rist_level(q: &LevelQuotient, m: usize, lookahead: usize) -> Result<PermSubgroup> {
    let mut out = PermSubgroup::trivial(q.arity(), q.level());
    for v in 0..(q.arity() as usize).pow(m as u32) {
        out = out.join(&rist_vertex(q, m, v, lookahead)?);
    }
    Ok(out)
}

fn parse_index(s: &str, spec: &str) -> Result<usize> {
    s.parse()
        .map_err(|_| Error::UnknownSubgroup(spec.to_string()))
}

/// Builds a subgroup from its name: `G`, `K`, `T`, `K_m`, `T_m`, `N_m`,
/// `gamma_k`, `dim_k`, `rist(m)` or `rist_v(σ)` (a vertex such as `1 0`).
/// `K`, `T` and `N_m` refer to the built-in groups' distinguished
/// subgroups.
pub fn named_subgroup(q: &LevelQuotient, spec: &str) -> Result<PermSubgroup> {
    let s = spec.trim();
    let unknown = || Error::UnknownSubgroup(spec.to_string());
    if s == "G" {
        return Ok(q.group().clone());
    }
    if let Some(inner) = s.strip_prefix("rist_v(").and_then(|r| r.strip_suffix(')')) {
        let v = crate::tree::VertexWord::parse(q.arity(), inner)?;
        return rist_vertex(q, v.len(), v.value(), 2);
    }
    if let Some(inner) = s.strip_prefix("rist(").and_then(|r| r.strip_suffix(')')) {
        return rist_level(q, parse_index(inner, spec)?, 2);
    }
    if let Some(k) = s.strip_prefix("gamma_") {
        let k = parse_index(k, spec)?;
        if k == 0 {
            return Err(unknown());
        }
        return Ok(lower_central_series(q).term(k));
    }
    if let Some(k) = s.strip_prefix("dim_") {
        let k = parse_index(k, spec)?;
        if k == 0 {
            return Err(unknown());
        }
        return Ok(dimension_series(q, DEFAULT_BUDGET)?.term(k));
    }
    let (head, index) = match s.split_once('_') {
        Some((h, i)) => (h, Some(parse_index(i, spec)?)),
        None => (s, None),
    };
    let named = named_elements(q.family())?;
    let k_seeds = named.k_seeds();
    let t_seeds = vec![named.x_squared()];
    match (head, index) {
        ("K", None) => normal_closure_of(q, &k_seeds, q.level()),
        ("T", None) => normal_closure_of(q, &t_seeds, q.level()),
        ("K", Some(0)) => normal_closure_of(q, &k_seeds, q.level()),
        ("T", Some(0)) => normal_closure_of(q, &t_seeds, q.level()),
        ("K", Some(m)) => product_at_level(q, &k_seeds, m),
        ("T", Some(m)) => product_at_level(q, &t_seeds, m),
        ("N", Some(m)) if m >= 1 => {
            let k = product_at_level(q, &k_seeds, m)?;
            let t = if m == 1 {
                normal_closure_of(q, &t_seeds, q.level())?
            } else {
                product_at_level(q, &t_seeds, m - 1)?
            };
            Ok(k.join(&t))
        }
        _ => Err(unknown()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tree::{grigorchuk_generators, overgroup_generators};

    #[test]
    fn index_of_k() {
        for n in 4..=6 {
            let q = LevelQuotient::new(&grigorchuk_generators(), n).unwrap();
            let k = named_subgroup(&q, "K").unwrap();
            assert_eq!(q.group().log_index(&k), 4, "level {n}");
        }
    }

    #[test]
    fn parse_errors() {
        let q = LevelQuotient::new(&grigorchuk_generators(), 3).unwrap();
        for bad in ["Q", "K_x", "gamma_0", "N_0", "dim_"] {
            assert!(
                matches!(named_subgroup(&q, bad), Err(Error::UnknownSubgroup(_))),
                "{bad}"
            );
        }
        assert!(matches!(
            named_subgroup(&q, "K_3"),
            Err(Error::LevelTooSmall { .. })
        ));
    }

    #[test]
    fn overgroup_named_elements() {
        let n = named_elements(&overgroup_generators()).unwrap();
        assert!(n.y.is_some());
        assert_eq!(n.k_seeds().len(), 2);
    }
}
