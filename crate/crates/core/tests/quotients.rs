use branchlie::quotients::*;
use branchlie::tree::{grigorchuk_generators, overgroup_generators, GeneratorFamily};

fn sub(q: &LevelQuotient, name: &str) -> PermSubgroup {
    named_subgroup(q, name).unwrap()
}

#[test]
fn quotient_orders() {
    let expect = [
        (grigorchuk_generators(), [7, 12, 22, 42]),
        (overgroup_generators(), [7, 15, 28, 54]),
    ];
    for (f, logs) in expect {
        for (n, &l) in (3..=6).zip(&logs) {
            let q = LevelQuotient::new(&f, n).unwrap();
            assert_eq!(q.group().log_order(), l, "{} level {n}", f.name);
        }
    }
}

#[test]
fn structural_indices() {
    for n in 5..=6 {
        let q = LevelQuotient::new(&grigorchuk_generators(), n).unwrap();
        assert_eq!(q.group().log_index(&sub(&q, "K")), 4);
        assert_eq!(sub(&q, "K").log_index(&sub(&q, "K_1")), 2);
        assert_eq!(q.group().log_index(&sub(&q, "gamma_2")), 3);
        let q = LevelQuotient::new(&overgroup_generators(), n).unwrap();
        assert_eq!(q.group().log_index(&sub(&q, "K")), 5);
        assert_eq!(sub(&q, "K").log_index(&sub(&q, "K_1")), 3);
        assert_eq!(q.group().log_index(&sub(&q, "gamma_2")), 4);
    }
}

#[test]
fn lower_central_terms_are_n_subgroups() {
    for f in [grigorchuk_generators(), overgroup_generators()] {
        let q = LevelQuotient::new(&f, 6).unwrap();
        assert!(sub(&q, "gamma_3").same_as(&sub(&q, "N_1")), "{}", f.name);
        assert!(sub(&q, "gamma_5").same_as(&sub(&q, "N_2")), "{}", f.name);
    }
}

#[test]
fn normal_closure_of_x_squared_is_smaller_than_k_squared() {
    let q = LevelQuotient::new(&grigorchuk_generators(), 6).unwrap();
    let k = sub(&q, "K");
    let t = sub(&q, "T");
    let squares = k.power_subgroup(DEFAULT_BUDGET).unwrap();
    assert!(t.is_subgroup_of(&squares));
    assert_eq!(squares.log_index(&t), 1);
}

#[test]
fn rigid_stabilizers_of_grigorchuk_group() {
    let q = LevelQuotient::new(&grigorchuk_generators(), 6).unwrap();
    for m in 2..=3 {
        let rist = rist_level(&q, m, 2).unwrap();
        assert!(rist.same_as(&sub(&q, &format!("K_{m}"))), "m={m}");
        assert!(!rist.same_as(&sub(&q, &format!("K_{}", m - 2))), "m={m}");
    }
    // the rigid stabilizer of a vertex is supported below it
    let r = sub(&q, "rist_v(1 0)");
    assert!(!r.is_trivial());
    for g in r.generators() {
        assert_eq!(g.label(0, 0), 0);
        assert_eq!(g.label(1, 1), 0);
        assert_eq!(g.label(2, 0), 0);
        assert_eq!(g.label(2, 1), 0);
        assert_eq!(g.label(2, 3), 0);
    }
}

fn faithful_count(f: &GeneratorFamily, n: usize, dim: bool) -> (usize, Vec<usize>) {
    let chain = |level| {
        let q = LevelQuotient::new(f, level).unwrap();
        if dim {
            dimension_series(&q, DEFAULT_BUDGET).unwrap()
        } else {
            lower_central_series(&q)
        }
    };
    let (c, d) = (chain(n), chain(n + 1));
    let flags = faithful_flags(&c, &d);
    let ranks = rank_sequence(&c).ranks;
    let k = flags.iter().take_while(|&&b| b).count();
    (k, ranks[..k].to_vec())
}

#[test]
fn faithful_prefixes_grow_with_level() {
    let f = grigorchuk_generators();
    let (k4, _) = faithful_count(&f, 4, true);
    let (k5, ranks) = faithful_count(&f, 5, true);
    assert!(k5 > k4);
    assert_eq!(ranks, vec![3, 2, 1, 2, 1, 2, 1, 2, 1]);
    let (_, lcs) = faithful_count(&f, 5, false);
    assert_eq!(lcs, vec![3, 2, 2, 1, 2, 2, 1, 1]);
}

#[test]
fn overgroup_dimension_ranks_at_level_six() {
    let (k, ranks) = faithful_count(&overgroup_generators(), 6, true);
    assert!(k >= 9, "{k}");
    let expected: Vec<usize> = (1..=k)
        .map(|i| {
            if i == 1 {
                4
            } else if i % 2 == 0 {
                3
            } else {
                2
            }
        })
        .collect();
    assert_eq!(ranks, expected);
}

#[test]
fn series_are_n_series() {
    for f in [grigorchuk_generators(), overgroup_generators()] {
        let q = LevelQuotient::new(&f, 5).unwrap();
        assert!(verify_n_series(&lower_central_series(&q), DEFAULT_BUDGET).passed());
        assert!(verify_n_series(
            &dimension_series(&q, DEFAULT_BUDGET).unwrap(),
            DEFAULT_BUDGET
        )
        .passed());
    }
}

#[test]
fn series_table_format() {
    let q = LevelQuotient::new(&grigorchuk_generators(), 3).unwrap();
    let q4 = LevelQuotient::new(&grigorchuk_generators(), 4).unwrap();
    let c = lower_central_series(&q);
    let flags = faithful_flags(&c, &lower_central_series(&q4));
    let rows = SeriesRow::table(&rank_sequence(&c), &flags);
    let tsv = SeriesRow::to_tsv(&rows);
    assert!(tsv.starts_with("index\tlog_index\trank\tfaithful\n1\t3\t3\ttrue\n"));
}

#[test]
fn ball_sizes_match_the_quotient_at_small_radius() {
    let f = grigorchuk_generators();
    let autos: Vec<_> = f.generators.iter().map(|(_, g)| g.clone()).collect();
    let balls = automaton_growth(&autos, 6, 1 << 16).unwrap();
    let q = LevelQuotient::new(&f, 8).unwrap();
    // words of length ≤ 6 are already separated at level 8
    assert_eq!(quotient_growth(&q.generator_portraits(), 6), balls);
}
