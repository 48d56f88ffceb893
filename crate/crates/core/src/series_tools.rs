//! Exact truncated power series: Jennings' product, augmentation ideals of
//! finite group algebras, and Golod–Shafarevich bounds.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::Subspace;
use crate::quotients::{
    enumerate, quotient_growth, LevelQuotient, PermSubgroup, SeriesKind, SubgroupChain,
};
use crate::tree::Portrait;

/// `c_0 + c_1 t + … + c_D t^D` with exact integer coefficients.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TruncatedIntSeries {
    coeffs: Vec<BigInt>,
}

impl TruncatedIntSeries {
    /// Pads or truncates `coeffs` to degree `degree`.
    pub fn new(mut coeffs: Vec<BigInt>, degree: usize) -> TruncatedIntSeries {
        coeffs.resize(degree + 1, BigInt::zero());
        TruncatedIntSeries { coeffs }
    }

    pub fn from_i64(coeffs: &[i64], degree: usize) -> TruncatedIntSeries {
        Self::new(coeffs.iter().map(|&c| c.into()).collect(), degree)
    }

    pub fn zero(degree: usize) -> TruncatedIntSeries {
        Self::new(vec![], degree)
    }

    pub fn one(degree: usize) -> TruncatedIntSeries {
        Self::new(vec![BigInt::one()], degree)
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeff(&self, n: usize) -> &BigInt {
        &self.coeffs[n]
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    fn check(&self, other: &Self) -> Result<()> {
        if self.degree() == other.degree() {
            Ok(())
        } else {
            Err(Error::InvalidArgument(format!(
                "truncation degrees differ ({} and {})",
                self.degree(),
                other.degree()
            )))
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        Ok(Self {
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a + b)
                .collect(),
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        Ok(Self {
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a - b)
                .collect(),
        })
    }

    /// Product truncated at the common degree.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let d = self.degree();
        let mut out = vec![BigInt::zero(); d + 1];
        for (i, a) in self.coeffs.iter().enumerate().filter(|(_, a)| !a.is_zero()) {
            for (j, b) in other.coeffs[..=d - i].iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Ok(Self { coeffs: out })
    }

    /// `e_n ≤ f_n` for all `n`.
    pub fn le(&self, other: &Self) -> Result<bool> {
        self.check(other)?;
        Ok(self.coeffs.iter().zip(&other.coeffs).all(|(a, b)| a <= b))
    }

    /// `Σ c_n`.
    pub fn sum(&self) -> BigInt {
        self.coeffs.iter().sum()
    }

    /// Value at a rational point.
    pub fn eval(&self, xi: &BigRational) -> BigRational {
        let mut acc = BigRational::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * xi + BigRational::from_integer(c.clone());
        }
        acc
    }

    /// `n\tc_n` lines.
    pub fn to_tsv(&self) -> String {
        let mut out = String::from("n\tcoefficient\n");
        for (n, c) in self.coeffs.iter().enumerate() {
            out.push_str(&format!("{n}\t{c}\n"));
        }
        out
    }
}

impl fmt::Display for TruncatedIntSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.coeffs.iter().map(|c| c.to_string()).collect();
        write!(f, "{}", parts.join(","))
    }
}

impl Serialize for TruncatedIntSeries {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let v: Vec<String> = self.coeffs.iter().map(|c| c.to_string()).collect();
        v.serialize(s)
    }
}

fn binomial(n: &BigUint, k: usize) -> BigInt {
    if BigUint::from(k) > *n {
        return BigInt::zero();
    }
    let mut acc = BigUint::one();
    for i in 0..k {
        acc = acc * (n - BigUint::from(i)) / BigUint::from(i + 1);
    }
    acc.into()
}

/// Characteristic of the ground field.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Characteristic {
    Zero,
    Prime(u8),
}

/// `∏_n ((1 − t^{pn})/(1 − t^n))^{b_n}` in characteristic `p`, and
/// `∏_n (1 − t^n)^{−b_n}` in characteristic zero; `b[0]` is `b_1`.
pub fn jennings_product(
    b: &[u64],
    characteristic: Characteristic,
    degree: usize,
) -> TruncatedIntSeries {
    let mut acc = TruncatedIntSeries::one(degree);
    for (idx, &bn) in b.iter().enumerate() {
        let n = idx + 1;
        if bn == 0 || n > degree {
            continue;
        }
        let big = BigUint::from(bn);
        // (1 − t^n)^{−b} = Σ_k C(b+k−1, k) t^{nk}
        let mut inv = vec![BigInt::zero(); degree + 1];
        for k in 0..=degree / n {
            inv[n * k] = binomial(&(&big + BigUint::from(k) - 1u32), k);
        }
        let mut factor = TruncatedIntSeries::new(inv, degree);
        if let Characteristic::Prime(p) = characteristic {
            // (1 − t^{pn})^b
            let step = p as usize * n;
            let mut num = vec![BigInt::zero(); degree + 1];
            for k in 0..=degree / step {
                let c = binomial(&big, k);
                num[step * k] = if k % 2 == 0 { c } else { -c };
            }
            factor = factor
                .mul(&TruncatedIntSeries::new(num, degree))
                .expect("same degree");
        }
        acc = acc.mul(&factor).expect("same degree");
    }
    acc
}

/// A finite group given by left multiplication by generators, with
/// element 0 the identity.
#[derive(Clone, Debug)]
pub struct FiniteGroup {
    pub p: u8,
    order: usize,
    /// `left[s][g] = s·g`.
    left: Vec<Vec<u32>>,
    elements: Option<Vec<Portrait>>,
}

impl FiniteGroup {
    /// Enumerates the quotient, refusing more than `budget` elements.
    pub fn from_quotient(q: &LevelQuotient, budget: usize) -> Result<FiniteGroup> {
        let gens = q.generator_portraits();
        let elements = enumerate(&gens, budget)?;
        let index: HashMap<&Portrait, u32> = elements
            .iter()
            .enumerate()
            .map(|(i, g)| (g, i as u32))
            .collect();
        let left = gens
            .iter()
            .map(|s| elements.iter().map(|g| index[&s.mul(g)]).collect())
            .collect();
        Ok(FiniteGroup {
            p: q.arity(),
            order: elements.len(),
            left,
            elements: Some(elements),
        })
    }

    /// A group from its multiplication table `table[g][h] = g·h` (identity
    /// at index 0) and generator indices.
    pub fn from_table(p: u8, table: &[Vec<usize>], generators: &[usize]) -> Result<FiniteGroup> {
        let n = table.len();
        if n == 0
            || table
                .iter()
                .any(|row| row.len() != n || row.iter().any(|&x| x >= n))
        {
            return Err(Error::Malformed(
                "multiplication table is not square".into(),
            ));
        }
        if (0..n).any(|g| table[0][g] != g || table[g][0] != g) {
            return Err(Error::Malformed("index 0 is not the identity".into()));
        }
        if let Some(&s) = generators.iter().find(|&&s| s >= n) {
            return Err(Error::Malformed(format!("generator {s} out of range")));
        }
        let left = generators
            .iter()
            .map(|&s| (0..n).map(|g| table[s][g] as u32).collect())
            .collect();
        Ok(FiniteGroup {
            p,
            order: n,
            left,
            elements: None,
        })
    }

    /// `C_n` generated by 1.
    pub fn cyclic(p: u8, n: usize) -> FiniteGroup {
        let table: Vec<Vec<usize>> = (0..n)
            .map(|g| (0..n).map(|h| (g + h) % n).collect())
            .collect();
        Self::from_table(p, &table, &[1 % n]).expect("valid table")
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn elements(&self) -> Option<&[Portrait]> {
        self.elements.as_deref()
    }

    /// All elements as products of generators, reached breadth first.
    fn reach(&self) -> Vec<usize> {
        let mut seen = vec![false; self.order];
        seen[0] = true;
        let mut order = vec![0];
        let mut i = 0;
        while i < order.len() {
            let g = order[i];
            for l in &self.left {
                let h = l[g] as usize;
                if !seen[h] {
                    seen[h] = true;
                    order.push(h);
                }
            }
            i += 1;
        }
        order
    }

    fn unit(&self, g: usize) -> Vec<u8> {
        let mut v = vec![0; self.order];
        v[g] = 1;
        v
    }

    /// `g − 1` in `F_p[Q]`.
    fn minus_one(&self, g: usize) -> Vec<u8> {
        let mut v = self.unit(g);
        if g != 0 {
            v[0] = self.p - 1;
        }
        v
    }

    /// `Δ^1 ⊇ Δ^2 ⊇ …` up to `Δ^{degree+1}` or the first zero power, using
    /// `Δ^{n+1} = Σ_s (s − 1) Δ^n`.
    pub fn augmentation_powers(&self, degree: usize) -> Result<Vec<Subspace>> {
        if self.reach().len() != self.order {
            return Err(Error::InvalidArgument(
                "generators do not generate the group".into(),
            ));
        }
        let p = self.p;
        let n = self.order;
        let first = Subspace::span(
            p,
            n,
            (1..n)
                .map(|g| self.minus_one(g))
                .collect::<Vec<_>>()
                .iter()
                .map(|v| v.as_slice()),
        );
        let mut powers = vec![first];
        while powers.len() <= degree && powers.last().unwrap().dim() > 0 {
            let prev = powers.last().unwrap().basis();
            let vectors: Vec<Vec<u8>> = self
                .left
                .par_iter()
                .flat_map_iter(|l| {
                    prev.iter().map(move |v| {
                        let mut w: Vec<u8> = v.iter().map(|&x| (p - x) % p).collect();
                        for (g, &x) in v.iter().enumerate() {
                            let h = l[g] as usize;
                            w[h] = (w[h] + x) % p;
                        }
                        w
                    })
                })
                .collect();
            let mut next = Subspace::zero(p, n);
            for v in &vectors {
                next.insert(v);
            }
            powers.push(next);
        }
        Ok(powers)
    }
}

/// Dimensions `a_n = dim Δ^n/Δ^{n+1}`, with `a_0 = 1`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AugmentationFiltration {
    pub p: u8,
    pub order: usize,
    pub dims: Vec<usize>,
}

impl AugmentationFiltration {
    pub fn total(&self) -> usize {
        self.dims.iter().sum()
    }

    pub fn as_series(&self, degree: usize) -> TruncatedIntSeries {
        TruncatedIntSeries::new(self.dims.iter().map(|&d| d.into()).collect(), degree)
    }
}

pub fn augmentation_dims(group: &FiniteGroup, degree: usize) -> Result<AugmentationFiltration> {
    let powers = group.augmentation_powers(degree)?;
    let mut dims = vec![1];
    for (n, w) in powers.windows(2).enumerate() {
        if n + 1 > degree {
            break;
        }
        dims.push(w[0].dim() - w[1].dim());
    }
    if powers.len() <= degree {
        // the last power is zero
        dims.push(0);
    }
    while dims.len() > 1 && dims.last() == Some(&0) {
        dims.pop();
    }
    Ok(AugmentationFiltration {
        p: group.p,
        order: group.order,
        dims,
    })
}

/// `G_n = {g | g − 1 ∈ Δ^n}` as sets of element indices, for
/// `n = 1, …` until the group is trivial or `degree` is reached.
pub fn ideal_dimension_subgroups(group: &FiniteGroup, degree: usize) -> Result<Vec<Vec<usize>>> {
    let powers = group.augmentation_powers(degree)?;
    let mut out = Vec::new();
    for w in &powers {
        let members: Vec<usize> = (0..group.order)
            .filter(|&g| g == 0 || w.contains(&group.minus_one(g)))
            .collect();
        let done = members.len() == 1;
        out.push(members);
        if done {
            break;
        }
    }
    Ok(out)
}

/// The dimension series of a quotient computed from ideal membership.
pub fn dimension_subgroups_from_ideal(
    q: &LevelQuotient,
    budget: usize,
    degree: usize,
) -> Result<SubgroupChain> {
    let group = FiniteGroup::from_quotient(q, budget)?;
    let elements = group.elements().expect("quotient elements");
    let terms = ideal_dimension_subgroups(&group, degree)?
        .into_iter()
        .map(|members| {
            let gens: Vec<Portrait> = members.iter().map(|&g| elements[g].clone()).collect();
            PermSubgroup::generated(q.arity(), q.level(), &gens)
        })
        .collect();
    let mut chain = SubgroupChain::custom(q.arity(), q.generator_portraits(), terms);
    chain.kind = SeriesKind::Dimension;
    Ok(chain)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GrowthBoundRow {
    pub n: usize,
    pub a: usize,
    pub gamma: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GrowthBoundReport {
    pub rows: Vec<GrowthBoundRow>,
}

impl GrowthBoundReport {
    pub fn holds(&self) -> bool {
        self.rows.iter().all(|r| r.a <= r.gamma)
    }
}

/// `a_n(Q) ≤ γ_Q^S(n)` for `n ≤ radius`, with `S` the generators of `q`
/// (closed under inverses).
pub fn growth_bound_check(
    q: &LevelQuotient,
    radius: usize,
    budget: usize,
) -> Result<GrowthBoundReport> {
    let group = FiniteGroup::from_quotient(q, budget)?;
    let a = augmentation_dims(&group, radius)?;
    let gamma = quotient_growth(&q.generator_portraits(), radius);
    Ok(compare_growth(&a.dims, &gamma))
}

/// Row-wise comparison; `a_n` is zero past its stored length.
pub fn compare_growth(a: &[usize], gamma: &[usize]) -> GrowthBoundReport {
    GrowthBoundReport {
        rows: gamma
            .iter()
            .enumerate()
            .map(|(n, &g)| GrowthBoundRow {
                n,
                a: a.get(n).copied().unwrap_or(0),
                gamma: g,
            })
            .collect(),
    }
}

/// Relator counts `r_1, r_2, …`, finitely many values followed by an
/// optional constant tail. Written `0^7,1*`: `v^k` repeats `v` k times, a
/// bare `v` occurs once, and a final `v*` repeats forever.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RelatorProfile {
    pub prefix: Vec<BigInt>,
    pub tail: Option<BigInt>,
}

impl FromStr for RelatorProfile {
    type Err = Error;

    fn from_str(s: &str) -> Result<RelatorProfile> {
        let bad = |m: &str| Error::Malformed(format!("relator profile `{s}`: {m}"));
        let mut prefix = Vec::new();
        let mut tail = None;
        let items: Vec<&str> = s
            .split(',')
            .map(str::trim)
            .filter(|t| !t.is_empty())
            .collect();
        for (i, item) in items.iter().enumerate() {
            let parse = |t: &str| {
                t.parse::<BigInt>()
                    .ok()
                    .filter(|v| !v.is_negative())
                    .ok_or_else(|| bad(&format!("`{t}` is not a nonnegative integer")))
            };
            if let Some(v) = item.strip_suffix('*') {
                if i + 1 != items.len() {
                    return Err(bad("a repeating item must come last"));
                }
                tail = Some(parse(v)?);
            } else if let Some((v, k)) = item.split_once('^') {
                let k: usize = k.parse().map_err(|_| bad(&format!("bad count `{k}`")))?;
                let v = parse(v)?;
                prefix.extend(std::iter::repeat_n(v, k));
            } else {
                prefix.push(parse(item)?);
            }
        }
        Ok(RelatorProfile { prefix, tail })
    }
}

impl fmt::Display for RelatorProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut items: Vec<String> = Vec::new();
        let mut i = 0;
        while i < self.prefix.len() {
            let v = &self.prefix[i];
            let run = self.prefix[i..].iter().take_while(|w| *w == v).count();
            items.push(if run > 1 {
                format!("{v}^{run}")
            } else {
                v.to_string()
            });
            i += run;
        }
        if let Some(t) = &self.tail {
            items.push(format!("{t}*"));
        }
        write!(f, "{}", items.join(","))
    }
}

impl RelatorProfile {
    /// `r_k = 0` for `k < p³` and `r_k = 1` afterwards.
    pub fn golod(p: u8) -> RelatorProfile {
        let start = (p as usize).pow(3);
        RelatorProfile {
            prefix: vec![BigInt::zero(); start - 1],
            tail: Some(BigInt::one()),
        }
    }

    pub fn r(&self, n: usize) -> BigInt {
        if n == 0 {
            return BigInt::zero();
        }
        self.prefix
            .get(n - 1)
            .cloned()
            .or_else(|| self.tail.clone())
            .unwrap_or_default()
    }

    /// `H_R(t)` truncated at `degree`.
    pub fn series(&self, degree: usize) -> TruncatedIntSeries {
        TruncatedIntSeries::new((0..=degree).map(|n| self.r(n)).collect(), degree)
    }
}

/// The minimal nonnegative `c` with `c_0 = 1` and
/// `c(t)(1 − dt + H_R(t)) ≥ 1` coefficientwise:
/// `c_n = max(0, d c_{n−1} − Σ_{i≥1} r_i c_{n−i})`.
pub fn gs_bound_series(
    d: u64,
    r: &TruncatedIntSeries,
    degree: usize,
) -> Result<TruncatedIntSeries> {
    if d == 0 {
        return Err(Error::InvalidArgument("d must be at least 1".into()));
    }
    if !r.coeff(0).is_zero() {
        return Err(Error::InvalidArgument("relators of degree 0".into()));
    }
    if r.coeffs().iter().any(|c| c.is_negative()) {
        return Err(Error::InvalidArgument("negative relator count".into()));
    }
    let d = BigInt::from(d);
    let mut c = vec![BigInt::one()];
    for n in 1..=degree {
        let mut v = &d * &c[n - 1];
        for i in 1..=n.min(r.degree()) {
            v -= r.coeff(i) * &c[n - i];
        }
        c.push(v.max(BigInt::zero()));
    }
    Ok(TruncatedIntSeries::new(c, degree))
}

/// `c(t)(1 − dt + H_R(t)) − 1`, whose coefficients are all nonnegative for
/// a Hilbert series bounded by Golod–Shafarevich.
pub fn gs_defect(
    d: u64,
    r: &TruncatedIntSeries,
    c: &TruncatedIntSeries,
) -> Result<TruncatedIntSeries> {
    let mut f = r.clone();
    f.coeffs[0] += 1;
    if f.degree() >= 1 {
        f.coeffs[1] -= d;
    }
    c.mul(&f)?.sub(&TruncatedIntSeries::one(c.degree()))
}

/// `n` with `c_n ≥ (num/den)^n` failing, checked on exact integers.
pub fn exponential_lower_bound_failures(
    c: &TruncatedIntSeries,
    num: u64,
    den: u64,
    range: std::ops::RangeInclusive<usize>,
) -> Vec<usize> {
    range
        .filter(|&n| {
            let lhs = c.coeff(n) * BigInt::from(den).pow(n as u32);
            lhs < BigInt::from(num).pow(n as u32)
        })
        .collect()
}

/// Exact value of `1 − dξ + Σ_{n ≤ D} r_n ξ^n`, and the closed form
/// `1 − dξ + Σ_{n<k} r_n ξ^n + r ξ^k/(1 − ξ)` of the full series when the
/// profile is eventually constant.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GsWitness {
    pub partial: BigRational,
    pub closed_form: Option<BigRational>,
}

impl GsWitness {
    /// The full series value is negative (closed form when available).
    pub fn is_negative(&self) -> bool {
        self.closed_form
            .as_ref()
            .unwrap_or(&self.partial)
            .is_negative()
    }
}

pub fn gs_numeric_witness(
    d: u64,
    r: &RelatorProfile,
    xi: &BigRational,
    degree: usize,
) -> Result<GsWitness> {
    if xi.is_negative() || *xi >= BigRational::one() {
        return Err(Error::InvalidArgument(format!("ξ = {xi} is not in [0, 1)")));
    }
    let base = BigRational::one() - BigRational::from_integer(d.into()) * xi;
    let partial = base.clone() + r.series(degree).eval(xi);
    let closed_form = r.tail.as_ref().map(|t| {
        let k = r.prefix.len() + 1;
        let head = r.series(k - 1).eval(xi);
        let tail = BigRational::from_integer(t.clone()) * num_traits::pow(xi.clone(), k)
            / (BigRational::one() - xi);
        base + head + tail
    });
    Ok(GsWitness {
        partial,
        closed_form,
    })
}

/// A homogeneous noncommutative polynomial over `F_p` in `x1 … xd`, stored
/// as `(monomial, coefficient)` with monomials as letter lists (0-based).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Relator {
    pub degree: usize,
    pub terms: Vec<(Vec<usize>, u8)>,
}

impl Relator {
    /// Parses `x1x2 - x2x1`, `2 x1 x1 + x2x2`, … over `F_p`.
    pub fn parse(text: &str, d: usize, p: u8) -> Result<Relator> {
        let bad = |m: String| Error::Malformed(format!("relator `{text}`: {m}"));
        let mut terms: HashMap<Vec<usize>, u32> = HashMap::new();
        let mut sign = 1u32;
        let mut rest = text.trim();
        let mut degree = None;
        while !rest.is_empty() {
            let end = rest[1..].find(['+', '-']).map_or(rest.len(), |i| i + 1);
            let (term, tail) = rest.split_at(end);
            let mut term = term.trim();
            if let Some(t) = term.strip_prefix('-') {
                sign = p as u32 - 1;
                term = t.trim();
            } else if let Some(t) = term.strip_prefix('+') {
                sign = 1;
                term = t.trim();
            }
            let digits: String = term.chars().take_while(|c| c.is_ascii_digit()).collect();
            let coeff: u32 = if digits.is_empty() {
                1
            } else {
                digits.parse().map_err(|_| bad(digits.clone()))?
            };
            let mut mono = Vec::new();
            let body = term[digits.len()..].trim_start_matches([' ', '*']);
            for tok in body.split('x').skip(1) {
                let i: usize = tok
                    .trim()
                    .parse()
                    .map_err(|_| bad(format!("bad letter `x{tok}`")))?;
                if i == 0 || i > d {
                    return Err(bad(format!("letter x{i} outside x1..x{d}")));
                }
                mono.push(i - 1);
            }
            if !body.is_empty() && !body.starts_with('x') {
                return Err(bad(format!("cannot read `{body}`")));
            }
            match degree {
                None => degree = Some(mono.len()),
                Some(k) if k != mono.len() => {
                    return Err(Error::InvalidArgument(format!(
                        "relator `{text}` is not homogeneous"
                    )))
                }
                _ => {}
            }
            let e = terms.entry(mono).or_insert(0);
            *e = (*e + sign * coeff) % p as u32;
            sign = 1;
            rest = tail.trim();
        }
        let degree = degree.ok_or_else(|| bad("empty".into()))?;
        if degree == 0 {
            return Err(Error::InvalidArgument(format!(
                "relator `{text}` has degree 0"
            )));
        }
        let mut terms: Vec<(Vec<usize>, u8)> = terms
            .into_iter()
            .filter(|(_, c)| *c != 0)
            .map(|(m, c)| (m, c as u8))
            .collect();
        terms.sort();
        Ok(Relator { degree, terms })
    }

    fn vector(&self, d: usize, p: u8) -> Vec<u8> {
        let mut v = vec![0; d.pow(self.degree as u32)];
        for (m, c) in &self.terms {
            v[monomial_index(m, d)] = (v[monomial_index(m, d)] + c) % p;
        }
        v
    }
}

/// Length-lexicographic position among monomials of the same length: the
/// first letter is most significant.
fn monomial_index(m: &[usize], d: usize) -> usize {
    m.iter().fold(0, |acc, &x| acc * d + x)
}

/// `dim B_n` for `B = F_p⟨x1 … xd⟩ / (relators)`, `n ≤ degree`, via
/// `I_n = Σ_s x_s I_{n−1} + Σ_s I_{n−1} x_s + R_n`.
pub fn graded_quotient_dims(
    d: usize,
    relators: &[Relator],
    p: u8,
    degree: usize,
    budget: usize,
) -> Result<TruncatedIntSeries> {
    if d == 0 {
        return Err(Error::InvalidArgument("no generators".into()));
    }
    let mut dims = vec![BigInt::one()];
    let mut ideal = Subspace::zero(p, 1);
    for n in 1..=degree {
        let size = d
            .checked_pow(n as u32)
            .filter(|&s| s <= budget)
            .ok_or_else(|| Error::BudgetExceeded {
                what: format!("degree-{n} monomials"),
                budget,
            })?;
        let prev = ideal.basis();
        let below = size / d;
        let mut vectors: Vec<Vec<u8>> = (0..d)
            .into_par_iter()
            .flat_map_iter(|s| {
                prev.iter().flat_map(move |v| {
                    let mut left = vec![0u8; size];
                    let mut right = vec![0u8; size];
                    for (i, &c) in v.iter().enumerate().filter(|(_, &c)| c != 0) {
                        left[s * below + i] = c;
                        right[i * d + s] = c;
                    }
                    [left, right]
                })
            })
            .collect();
        vectors.extend(
            relators
                .iter()
                .filter(|r| r.degree == n)
                .map(|r| r.vector(d, p)),
        );
        let mut next = Subspace::zero(p, size);
        for v in &vectors {
            next.insert(v);
        }
        dims.push((size - next.dim()).into());
        ideal = next;
    }
    Ok(TruncatedIntSeries::new(dims, degree))
}

/// Relator counts by degree.
pub fn relator_degree_counts(relators: &[Relator], degree: usize) -> TruncatedIntSeries {
    let mut c = vec![BigInt::zero(); degree + 1];
    for r in relators.iter().filter(|r| r.degree <= degree) {
        c[r.degree] += 1;
    }
    TruncatedIntSeries::new(c, degree)
}

/// Finite-window growth rates `max_n ln(a_n)/n`, `max_n ln(b_n)/n`
/// (informational), and the exact termwise comparison `a_n ≥ b_n`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LimsupProbe {
    pub window: usize,
    pub a_rate: f64,
    pub b_rate: f64,
    pub a_dominates_b: bool,
}

pub fn limsup_probe(a: &TruncatedIntSeries, b: &[u64]) -> LimsupProbe {
    let window = a.degree();
    let rate = |v: &BigInt, n: usize| -> f64 {
        if v.is_positive() {
            // ln via bit length keeps huge coefficients finite
            let bits = v.bits();
            let shift = bits.saturating_sub(53);
            let mant = (v >> shift).to_f64().unwrap_or(f64::MAX);
            (mant.ln() + shift as f64 * std::f64::consts::LN_2) / n as f64
        } else {
            0.0
        }
    };
    let mut a_rate: f64 = 0.0;
    let mut b_rate: f64 = 0.0;
    let mut dominates = true;
    for n in 1..=window {
        a_rate = a_rate.max(rate(a.coeff(n), n));
        let bn = BigInt::from(b.get(n - 1).copied().unwrap_or(0));
        b_rate = b_rate.max(rate(&bn, n));
        dominates &= *a.coeff(n) >= bn;
    }
    LimsupProbe {
        window,
        a_rate,
        b_rate,
        a_dominates_b: dominates,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn jennings_small_cases() {
        assert_eq!(
            jennings_product(&[], Characteristic::Prime(2), 4),
            TruncatedIntSeries::one(4)
        );
        assert_eq!(
            jennings_product(&[2, 1], Characteristic::Prime(2), 6),
            TruncatedIntSeries::from_i64(&[1, 2, 2, 2, 1], 6)
        );
        assert_eq!(
            jennings_product(&[1], Characteristic::Zero, 5),
            TruncatedIntSeries::from_i64(&[1; 6], 5)
        );
        // (1 + t + t²)² in characteristic 3
        assert_eq!(
            jennings_product(&[2], Characteristic::Prime(3), 5),
            TruncatedIntSeries::from_i64(&[1, 2, 3, 2, 1], 5)
        );
    }

    #[test]
    fn profile_roundtrip() {
        let r: RelatorProfile = "0^7,1*".parse().unwrap();
        assert_eq!(r, RelatorProfile::golod(2));
        assert_eq!(r.to_string(), "0^7,1*");
        assert_eq!(r.r(7), BigInt::zero());
        assert_eq!(r.r(8), BigInt::one());
        assert!("1*,0".parse::<RelatorProfile>().is_err());
        assert!("-1".parse::<RelatorProfile>().is_err());
    }

    #[test]
    fn relator_parsing() {
        let r = Relator::parse("x1x2 - x2x1", 2, 2).unwrap();
        assert_eq!(r.degree, 2);
        assert_eq!(r.terms, vec![(vec![0, 1], 1), (vec![1, 0], 1)]);
        let r = Relator::parse("x1 x2 - x2 x1", 2, 3).unwrap();
        assert_eq!(r.terms, vec![(vec![0, 1], 1), (vec![1, 0], 2)]);
        assert!(Relator::parse("x1x2 - x1", 2, 2).is_err());
        assert!(Relator::parse("x3", 2, 2).is_err());
        assert!(Relator::parse("x1x1 - x1x1", 2, 2)
            .unwrap()
            .terms
            .is_empty());
    }
}
