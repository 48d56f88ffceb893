//! End-to-end acceptance checks. Every criterion runs, prints one line,
//! and the test fails afterwards if any of them failed.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use branchlie::lie::*;
use branchlie::quotients::*;
use branchlie::series_tools::*;
use branchlie::tree::{grigorchuk_generators, overgroup_generators, GeneratorFamily};
use branchlie::vn::{iso_check, uniseriality_failures};
use num_bigint::BigInt;
use num_rational::BigRational;

mod common;

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn family(name: &str) -> GeneratorFamily {
    GeneratorFamily::builtin(name).unwrap()
}

fn quotient(f: &GeneratorFamily, level: usize) -> LevelQuotient {
    LevelQuotient::new(f, level).unwrap()
}

fn within(start: Instant, limit: Duration) -> Result<(), String> {
    let t = start.elapsed();
    ensure(t <= limit, format!("took {t:.1?}, target {limit:?}"))
}

/// Faithful prefix of the dimension series at `level` and its ranks.
fn faithful_dimension_ranks(f: &GeneratorFamily, level: usize) -> (usize, Vec<usize>) {
    let c = dimension_series(&quotient(f, level), DEFAULT_BUDGET).unwrap();
    let d = dimension_series(&quotient(f, level + 1), DEFAULT_BUDGET).unwrap();
    let k = faithful_flags(&c, &d).iter().take_while(|&&b| b).count();
    (k, rank_sequence(&c).ranks[..k].to_vec())
}

fn dimension_ranks(
    f: &GeneratorFamily,
    first: usize,
    even: usize,
    odd: usize,
    limit: u64,
) -> Outcome {
    let start = Instant::now();
    let (k, ranks) = faithful_dimension_ranks(f, 5);
    let expected: Vec<usize> = (1..=k)
        .map(|i| {
            if i == 1 {
                first
            } else if i % 2 == 0 {
                even
            } else {
                odd
            }
        })
        .collect();
    ensure(
        ranks == expected,
        format!("ranks {ranks:?}, expected {expected:?}"),
    )?;
    ensure(
        k >= 9,
        format!("only {k} faithful indices at level 5: {ranks:?}"),
    )?;
    within(start, Duration::from_secs(limit))?;
    Ok(format!("{k} faithful indices {ranks:?}"))
}

fn criterion_1() -> Outcome {
    dimension_ranks(&grigorchuk_generators(), 3, 2, 1, 60)
}

fn criterion_2() -> Outcome {
    dimension_ranks(&overgroup_generators(), 4, 3, 2, 120)
}

fn criterion_3() -> Outcome {
    for f in [grigorchuk_generators(), overgroup_generators()] {
        let q = quotient(&f, 5);
        for m in 1..=2 {
            let gamma = named_subgroup(&q, &format!("gamma_{}", (1 << m) + 1)).unwrap();
            let n = named_subgroup(&q, &format!("N_{m}")).unwrap();
            ensure(
                gamma.same_as(&n),
                format!("{}: gamma_{} ≠ N_{m}", f.name, (1 << m) + 1),
            )?;
        }
    }
    Ok("gamma_3 = N_1, gamma_5 = N_2 for both groups".into())
}

fn criterion_4() -> Outcome {
    let mut failed = Vec::new();
    let mut total = 0;
    for (group, suite) in [
        ("grigorchuk", common::grigorchuk_identities()),
        ("overgroup", common::overgroup_identities()),
    ] {
        for id in suite {
            total += 1;
            if !id.holds_as_stated() {
                failed.push(format!("{group}: {}", id.name));
            }
        }
    }
    ensure(
        failed.is_empty(),
        format!("{} of {total} fail as stated: {failed:?}", failed.len()),
    )?;
    Ok(format!("{total} identities hold"))
}

fn criterion_5() -> Outcome {
    for (name, expected) in [("grigorchuk", [4, 2, 3]), ("overgroup", [5, 3, 4])] {
        let q = quotient(&family(name), 6);
        let sub = |s: &str| named_subgroup(&q, s).unwrap();
        let k = sub("K");
        let got = [
            q.group().log_index(&k),
            k.log_index(&sub("K_1")),
            q.group().log_index(&sub("gamma_2")),
        ];
        ensure(
            got == expected,
            format!("{name}: log2 indices {got:?}, expected {expected:?}"),
        )?;
    }
    Ok("[G:K], [K:K×K], [G:G'] = 16, 4, 8 and 32, 8, 16".into())
}

fn criterion_6() -> Outcome {
    let start = Instant::now();
    for f in [grigorchuk_generators(), overgroup_generators()] {
        for n in 1..=4 {
            let gens = quotient(&f, n).generator_portraits();
            let fails = uniseriality_failures(&gens, 2, n).unwrap();
            ensure(
                fails.is_empty(),
                format!("{} n={n}: r in {fails:?}", f.name),
            )?;
        }
    }
    within(start, Duration::from_secs(30))?;
    Ok("[G, V_n^r] = V_n^(r+1) for n ≤ 4".into())
}

fn criterion_7() -> Outcome {
    let mut dims = Vec::new();
    for (name, want) in [("grigorchuk", 3), ("overgroup", 5)] {
        let q = quotient(&family(name), 6);
        for m in 1..=2 {
            let r = iso_check(&q, m).unwrap();
            ensure(r.passed(), format!("{name} m={m}: {r:?}"))?;
            if m == 1 {
                ensure(
                    r.section_dim == want,
                    format!("{name}: dim N_1/N_2 = {}", r.section_dim),
                )?;
            }
            dims.push(r.section_dim);
        }
    }
    Ok(format!("section dims {dims:?}"))
}

fn criterion_8() -> Outcome {
    let mut totals = Vec::new();
    for name in ["grigorchuk", "quaternion"] {
        let q = quotient(&family(name), 3);
        let group = FiniteGroup::from_quotient(&q, 1 << 13).unwrap();
        let a = augmentation_dims(&group, 400).unwrap();
        ensure(
            a.total() == group.order(),
            format!("{name}: Σ a_n = {} ≠ |Q|", a.total()),
        )?;
        let b: Vec<u64> = rank_sequence(&dimension_series(&q, DEFAULT_BUDGET).unwrap())
            .ranks
            .iter()
            .map(|&r| r as u64)
            .collect();
        let top = a.dims.len() + 1;
        let j = jennings_product(&b, Characteristic::Prime(2), top);
        ensure(
            a.as_series(top) == j,
            format!("{name}: {:?} vs {j}", a.dims),
        )?;
        if name == "quaternion" {
            ensure(
                a.dims == [1, 2, 2, 2, 1],
                format!("quaternion: {:?}", a.dims),
            )?;
        }
        totals.push(format!("{name} {:?}", a.dims));
    }
    Ok(totals.join(", "))
}

fn criterion_9() -> Outcome {
    let mut checked = 0;
    for (name, levels) in [
        ("grigorchuk", 1..=9),
        ("overgroup", 1..=9),
        ("quaternion", 1..=9),
    ] {
        let f = family(name);
        for n in levels {
            let q = quotient(&f, n);
            if q.group().log_order() > 10 {
                break;
            }
            let ideal = dimension_subgroups_from_ideal(&q, 1 << 10, 64).unwrap();
            let rec = dimension_series(&q, DEFAULT_BUDGET).unwrap();
            let len = ideal.terms.len().max(rec.terms.len());
            for i in 1..=len {
                ensure(
                    ideal.term(i).same_as(&rec.term(i)),
                    format!("{name} level {n}, term {i}"),
                )?;
            }
            checked += 1;
        }
    }
    Ok(format!("{checked} quotients agree"))
}

fn criterion_10() -> Outcome {
    for name in ["grigorchuk", "overgroup"] {
        let report = growth_bound_check(&quotient(&family(name), 3), 16, 1 << 10).unwrap();
        ensure(report.holds(), format!("{name}: {:?}", report.rows))?;
    }
    Ok("a_n ≤ γ(n) on level-3 quotients".into())
}

fn criterion_11() -> Outcome {
    let r = |a: i64, b: i64| BigRational::new(a.into(), b.into());
    let xi = r(3, 4);
    let mut pow8 = r(1, 1);
    for _ in 0..8 {
        pow8 *= &xi;
    }
    let oracle = r(1, 1) - r(2, 1) * &xi + pow8 / (r(1, 1) - &xi);
    let w = gs_numeric_witness(2, &"0^7,1*".parse().unwrap(), &xi, 64).unwrap();
    ensure(
        w.closed_form.as_ref() == Some(&oracle),
        format!("{:?} vs {oracle}", w.closed_form),
    )?;
    ensure(oracle < r(0, 1), format!("{oracle} is not negative"))?;
    ensure(w.is_negative(), "witness not negative")?;
    let profile = RelatorProfile::golod(2);
    let c = gs_bound_series(2, &profile.series(64), 64).unwrap();
    let fails = exponential_lower_bound_failures(&c, 4, 3, 8..=64);
    ensure(fails.is_empty(), format!("c_n < (4/3)^n at {fails:?}"))?;
    let n = 64u32;
    ensure(
        c.coeff(64) * BigInt::from(3).pow(n) >= BigInt::from(4).pow(n),
        "c_64 < (4/3)^64",
    )?;
    Ok(format!("witness {oracle}, c_n ≥ (4/3)^n for 8 ≤ n ≤ 64"))
}

fn criterion_12() -> Outcome {
    let mut problems = Vec::new();
    let q = quotient(&family("quaternion"), 3);
    let l = lie_algebra_of(&q, SeriesKind::LowerCentral, 2, false).unwrap();
    let dot = export_dot(&cayley_graph(&l, q.generators()).unwrap());
    if dot != include_str!("fixtures/quaternion.dot") {
        problems.push("quaternion graph differs from the fixture".to_string());
    }
    let mut summary = Vec::new();
    for (name, restricted, level) in [
        ("grigorchuk", false, 6),
        ("grigorchuk", true, 6),
        ("overgroup", false, 7),
        ("overgroup", true, 6),
    ] {
        let tag = format!("{name}{}", if restricted { " restricted" } else { "" });
        let q = quotient(&family(name), level);
        let (kind, chain) = if restricted {
            (
                SeriesKind::Dimension,
                dimension_series(&q, DEFAULT_BUDGET).unwrap(),
            )
        } else {
            (SeriesKind::LowerCentral, lower_central_series(&q))
        };
        let l = lie_algebra_of(&q, kind, 9, restricted).unwrap();
        let g = cayley_graph(&l, q.generators()).unwrap();
        let ranks = rank_sequence(&chain).ranks[..9].to_vec();
        if g.vertex_counts() != ranks {
            problems.push(format!(
                "{tag}: vertex counts {:?} vs ranks {ranks:?}",
                g.vertex_counts()
            ));
        }
        for v in l.check_antisymmetry().into_iter().chain(l.check_jacobi()) {
            problems.push(format!("{tag}: {v}"));
        }
        let report = match_theorem_labels(&g, &theorem_edges(name, restricted, 3).unwrap());
        for c in report.failures().into_iter().filter(|c| c.edge.explicit) {
            problems.push(format!(
                "{tag}: edge {} -> {} drawn {:?}, computed {:?}",
                c.edge.from, c.edge.to, c.edge.labels, c.computed
            ));
        }
        summary.push(format!("{tag} {} drawn edges", report.checked_explicit()));
    }
    ensure(problems.is_empty(), problems.join("; "))?;
    Ok(summary.join(", "))
}

#[test]
fn acceptance() {
    let criteria: [fn() -> Outcome; 12] = [
        criterion_1,
        criterion_2,
        criterion_3,
        criterion_4,
        criterion_5,
        criterion_6,
        criterion_7,
        criterion_8,
        criterion_9,
        criterion_10,
        criterion_11,
        criterion_12,
    ];
    // start on a fresh line after the harness prefix
    println!();
    let mut failed = Vec::new();
    for (i, run) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome =
            catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|_| Err("panicked".to_string()));
        let t = start.elapsed();
        match outcome {
            Ok(detail) => println!("criterion {}: PASS ({t:.1?}) {detail}", i + 1),
            Err(why) => {
                println!("criterion {}: FAIL ({t:.1?}) {why}", i + 1);
                failed.push(i + 1);
            }
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
