//! JSON text format for automata:
//!
//! ```json
//! {"p": 2, "initial": "b",
//!  "states": {"b": {"perm": 0, "children": ["a", "c"]}, ...}}
//! ```
//!
//! A generator family lists several initial states instead:
//! `{"p": 3, "generators": ["a", "t"], "states": {...}}`.

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tree::{Automaton, GeneratorFamily};

#[derive(Serialize, Deserialize)]
struct StateText {
    perm: i64,
    children: Vec<String>,
}

#[derive(Serialize, Deserialize)]
struct AutomatonText {
    p: u32,
    #[serde(skip_serializing_if = "Option::is_none")]
    initial: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    generators: Option<Vec<String>>,
    states: BTreeMap<String, StateText>,
}

struct Table {
    p: u8,
    rows: Vec<(u8, Vec<usize>)>,
    index: HashMap<String, usize>,
}

fn read_table(doc: &AutomatonText) -> Result<Table> {
    let p = crate::tree::TreeAlphabet::new(doc.p)?.arity();
    let index: HashMap<String, usize> = doc
        .states
        .keys()
        .enumerate()
        .map(|(i, k)| (k.clone(), i))
        .collect();
    let mut rows = Vec::with_capacity(doc.states.len());
    for (name, st) in &doc.states {
        if st.perm < 0 || st.perm >= p as i64 {
            return Err(Error::PermOutOfRange { perm: st.perm, p });
        }
        if st.children.len() != p as usize {
            return Err(Error::Malformed(format!(
                "state `{name}` has {} children, expected {p}",
                st.children.len()
            )));
        }
        let children = st
            .children
            .iter()
            .map(|c| {
                index
                    .get(c)
                    .copied()
                    .ok_or_else(|| Error::DanglingReference(c.clone()))
            })
            .collect::<Result<Vec<_>>>()?;
        rows.push((st.perm as u8, children));
    }
    Ok(Table { p, rows, index })
}

fn parse_doc(text: &str) -> Result<AutomatonText> {
    serde_json::from_str(text).map_err(|e| Error::Malformed(e.to_string()))
}

pub fn parse_automaton(text: &str) -> Result<Automaton> {
    let doc = parse_doc(text)?;
    let table = read_table(&doc)?;
    let initial = doc
        .initial
        .as_ref()
        .ok_or_else(|| Error::Malformed("missing `initial`".into()))?;
    let start = *table
        .index
        .get(initial)
        .ok_or_else(|| Error::DanglingReference(initial.clone()))?;
    Automaton::from_table(table.p, &table.rows, start)
}

/// Parses a family document (`generators`), or a single automaton whose
/// initial state becomes the only generator.
pub fn parse_family(name: &str, text: &str) -> Result<GeneratorFamily> {
    let doc = parse_doc(text)?;
    let table = read_table(&doc)?;
    let names: Vec<String> = match (&doc.generators, &doc.initial) {
        (Some(g), _) => g.clone(),
        (None, Some(i)) => vec![i.clone()],
        (None, None) => return Err(Error::Malformed("missing `generators`".into())),
    };
    let gens = names
        .into_iter()
        .map(|n| {
            let start = *table
                .index
                .get(&n)
                .ok_or_else(|| Error::DanglingReference(n.clone()))?;
            Ok((n, Automaton::from_table(table.p, &table.rows, start)?))
        })
        .collect::<Result<Vec<_>>>()?;
    GeneratorFamily::new(name, gens)
}

fn states_text(prefix: &str, g: &Automaton, out: &mut BTreeMap<String, StateText>) -> String {
    let name = |i: usize| {
        if i == 0 {
            prefix.to_string()
        } else {
            format!("{prefix}_{i}")
        }
    };
    for (i, s) in g.states().iter().enumerate() {
        out.insert(
            name(i),
            StateText {
                perm: s.perm as i64,
                children: s.children.iter().map(|&c| name(c as usize)).collect(),
            },
        );
    }
    name(0)
}

pub fn to_json(g: &Automaton) -> String {
    let mut states = BTreeMap::new();
    let initial = states_text("s", g, &mut states);
    let doc = AutomatonText {
        p: g.arity() as u32,
        initial: Some(initial),
        generators: None,
        states,
    };
    serde_json::to_string_pretty(&doc).expect("serializable")
}

pub fn family_to_json(family: &GeneratorFamily) -> String {
    let mut states = BTreeMap::new();
    let generators = family
        .generators
        .iter()
        .map(|(n, g)| states_text(n, g, &mut states))
        .collect();
    let doc = AutomatonText {
        p: family.p as u32,
        initial: None,
        generators: Some(generators),
        states,
    };
    serde_json::to_string_pretty(&doc).expect("serializable")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tree::{grigorchuk_generators, VertexWord};

    #[test]
    fn builtin_d_roundtrip() {
        let g = grigorchuk_generators();
        let d = g.get("d").unwrap();
        let parsed = parse_automaton(&to_json(d)).unwrap();
        assert!(parsed.equals(d).unwrap());
    }

    #[test]
    fn spec_text_for_b() {
        let text = r#"{"p": 2, "initial": "b", "states": {
            "b": {"perm": 0, "children": ["a", "c"]},
            "c": {"perm": 0, "children": ["a", "d"]},
            "d": {"perm": 0, "children": ["e", "b"]},
            "a": {"perm": 1, "children": ["e", "e"]},
            "e": {"perm": 0, "children": ["e", "e"]}}}"#;
        let b = parse_automaton(text).unwrap();
        assert!(b.equals(grigorchuk_generators().get("b").unwrap()).unwrap());
    }

    #[test]
    fn dangling_reference_rejected() {
        let text = r#"{"p": 2, "initial": "x", "states": {
            "x": {"perm": 1, "children": ["x", "nowhere"]}}}"#;
        let err = parse_automaton(text).unwrap_err();
        assert_eq!(err, Error::DanglingReference("nowhere".into()));
        assert!(err.to_string().contains("dangling reference"));
    }

    #[test]
    fn perm_out_of_range_rejected() {
        let text = r#"{"p": 2, "initial": "x", "states": {
            "x": {"perm": 2, "children": ["x", "x"]}}}"#;
        assert!(matches!(
            parse_automaton(text),
            Err(Error::PermOutOfRange { perm: 2, .. })
        ));
        assert!(matches!(
            parse_automaton("{not json"),
            Err(Error::Malformed(_))
        ));
    }

    #[test]
    fn ternary_t_is_spherically_transitive() {
        // t = (a, 1, t) with a = ε at the root
        let text = r#"{"p": 3, "generators": ["a", "t"], "states": {
            "a": {"perm": 1, "children": ["e", "e", "e"]},
            "t": {"perm": 0, "children": ["a", "e", "t"]},
            "e": {"perm": 0, "children": ["e", "e", "e"]}}}"#;
        let fam = parse_family("at", text).unwrap();
        assert_eq!(fam.p, 3);
        let gens: Vec<_> = fam.generators.iter().map(|(_, g)| g.clone()).collect();
        for level in 1..=4 {
            // orbit of 0^level under the generated group
            let start = VertexWord::new(3, vec![0; level]).unwrap();
            let mut seen = std::collections::HashSet::from([start.clone()]);
            let mut stack = vec![start];
            while let Some(v) = stack.pop() {
                for g in &gens {
                    let w = g.act(&v).unwrap();
                    if seen.insert(w.clone()) {
                        stack.push(w);
                    }
                }
            }
            assert_eq!(seen.len(), 3usize.pow(level as u32));
        }
    }

    #[test]
    fn family_roundtrip() {
        let fam = grigorchuk_generators();
        let back = parse_family("g", &family_to_json(&fam)).unwrap();
        assert_eq!(back.names(), fam.names());
        for ((_, x), (_, y)) in back.generators.iter().zip(&fam.generators) {
            assert!(x.equals(y).unwrap());
        }
    }
}
