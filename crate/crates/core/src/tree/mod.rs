//! Finite-state automorphisms of the rooted `p`-ary tree `Σ*`.
//!
//! Groups act on the left: `(gh)(σ) = g(h(σ))`. Commutators are
//! `[x, y] = x y x⁻¹ y⁻¹` and conjugates `x^y = y x y⁻¹`.

mod automaton;
mod builtin;
mod parse;
mod portrait;

pub use automaton::Automaton;
pub use builtin::{
    grigorchuk_generators, overgroup_generators, quaternion_generators, GeneratorFamily,
};
pub use parse::{family_to_json, parse_automaton, parse_family, to_json};
pub use portrait::Portrait;

use std::fmt;

use crate::error::{Error, Result};

/// Tree arity. The vertex action is always a power of `ε = (0 1 … p-1)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct TreeAlphabet {
    p: u8,
}

impl TreeAlphabet {
    pub fn new(p: u32) -> Result<TreeAlphabet> {
        if !(2..=251).contains(&p) || !(2..p).take_while(|d| d * d <= p).all(|d| !p.is_multiple_of(d)) {
            return Err(Error::NotPrime(p));
        }
        Ok(TreeAlphabet { p: p as u8 })
    }

    pub fn arity(self) -> u8 {
        self.p
    }

    /// `ε^k(x)`.
    pub fn cycle(self, k: u8, x: u8) -> u8 {
        ((k as u16 + x as u16) % self.p as u16) as u8
    }
}

/// A vertex of `Σ*`: a word over `{0, …, p-1}`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VertexWord {
    p: u8,
    letters: Vec<u8>,
}

impl VertexWord {
    pub fn new(p: u8, letters: Vec<u8>) -> Result<VertexWord> {
        if let Some(&bad) = letters.iter().find(|&&x| x >= p) {
            return Err(Error::LetterOutOfRange {
                letter: bad as u32,
                p,
            });
        }
        Ok(VertexWord { p, letters })
    }

    pub(crate) fn from_letters_unchecked(p: u8, letters: Vec<u8>) -> VertexWord {
        VertexWord { p, letters }
    }

    pub fn root(p: u8) -> VertexWord {
        VertexWord {
            p,
            letters: Vec::new(),
        }
    }

    /// Parses `"1 0"`, `"10"` or `""` (the root).
    pub fn parse(p: u8, text: &str) -> Result<VertexWord> {
        let letters = text
            .chars()
            .filter(|c| !c.is_whitespace() && *c != ',')
            .map(|c| {
                c.to_digit(36)
                    .map(|d| d as u8)
                    .ok_or_else(|| Error::InvalidArgument(format!("bad letter `{c}`")))
            })
            .collect::<Result<Vec<u8>>>()?;
        VertexWord::new(p, letters)
    }

    /// The vertex of length `level` with base-`p` value `value` (first letter
    /// most significant).
    pub fn from_value(p: u8, level: usize, mut value: usize) -> VertexWord {
        let mut letters = vec![0u8; level];
        for slot in letters.iter_mut().rev() {
            *slot = (value % p as usize) as u8;
            value /= p as usize;
        }
        VertexWord { p, letters }
    }

    pub fn value(&self) -> usize {
        self.letters
            .iter()
            .fold(0, |acc, &x| acc * self.p as usize + x as usize)
    }

    pub fn arity(&self) -> u8 {
        self.p
    }

    pub fn letters(&self) -> &[u8] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }
}

impl fmt::Debug for VertexWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "\"{self}\"")
    }
}

impl fmt::Display for VertexWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.letters.iter().map(|x| x.to_string()).collect();
        write!(f, "{}", parts.join(" "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn alphabet_requires_prime() {
        assert!(TreeAlphabet::new(2).is_ok());
        assert!(TreeAlphabet::new(7).is_ok());
        assert_eq!(TreeAlphabet::new(4), Err(Error::NotPrime(4)));
        assert_eq!(TreeAlphabet::new(1), Err(Error::NotPrime(1)));
    }

    #[test]
    fn vertex_word_value_roundtrip() {
        let v = VertexWord::parse(3, "2 0 1").unwrap();
        assert_eq!(v.value(), 19);
        assert_eq!(VertexWord::from_value(3, 3, 19), v);
        assert!(VertexWord::parse(2, "1 2").is_err());
    }
}
