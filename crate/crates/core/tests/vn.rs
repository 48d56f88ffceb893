use branchlie::linalg::Subspace;
use branchlie::quotients::LevelQuotient;
use branchlie::tree::{
    grigorchuk_generators, overgroup_generators, parse_family, Automaton, GeneratorFamily,
    Portrait, VertexWord,
};
use branchlie::vn::*;
use proptest::prelude::*;

fn gens(f: &GeneratorFamily, n: usize) -> Vec<Portrait> {
    f.generators.iter().map(|(_, g)| g.portrait(n)).collect()
}

/// `f · (1 - X_n)^{p-1}` for `f ∈ V_{n-1}`.
fn times_last_factor(f: &VnElement) -> VnElement {
    let p = f.arity();
    let n = f.level() + 1;
    let top = v_basis(p, 1, p as usize - 1).unwrap();
    let coeffs = (0..(p as usize).pow(n as u32))
        .map(|s| {
            let (head, last) = (s / p as usize, s % p as usize);
            ((f.coeffs()[head] as u32 * top.coeffs()[last] as u32) % p as u32) as u8
        })
        .collect();
    VnElement::from_coeffs(p, n, coeffs).unwrap()
}

#[test]
fn top_of_filtration_is_a_copy_of_the_previous_module() {
    for (p, n) in [(2u8, 1usize), (2, 3), (3, 1), (3, 2)] {
        let size = (p as usize).pow(n as u32);
        let offset = size - size / p as usize;
        let image = filtration(p, n, offset);
        let mut span = Subspace::zero(p, size);
        for r in 0..size / p as usize {
            let m = times_last_factor(&v_basis(p, n - 1, r).unwrap());
            assert_eq!(m, v_basis(p, n, r + offset).unwrap());
            span.insert(m.coeffs());
        }
        assert_eq!(span, image);
    }
}

#[test]
fn filtration_dimensions_drop_by_one() {
    assert_eq!(filtration(2, 2, 3).dim(), 1);
    for r in 0..=9 {
        assert_eq!(filtration(3, 2, r).dim(), 9 - r);
    }
}

#[test]
fn uniserial_for_both_groups() {
    for f in [grigorchuk_generators(), overgroup_generators()] {
        for n in 1..=4 {
            assert!(uniseriality_failures(&gens(&f, n), 2, n)
                .unwrap()
                .is_empty());
            assert!(corank_profile(&gens(&f, n), 2, n)
                .unwrap()
                .iter()
                .all(|&c| c == 1));
        }
    }
}

#[test]
fn cyclic_subgroup_is_not_uniserial() {
    let a = grigorchuk_generators().get("a").unwrap().portrait(2);
    let fails = uniseriality_failures(&[a], 2, 2).unwrap();
    assert!(!fails.is_empty());
    for r in fails {
        let span = bracket_span(
            &[grigorchuk_generators().get("a").unwrap().portrait(2)],
            &filtration(2, 2, r),
        )
        .unwrap();
        assert!(filtration(2, 2, r + 1).contains_subspace(&span));
    }
}

#[test]
fn trivial_group_coranks() {
    let id = Portrait::identity(2, 3);
    let profile = corank_profile(&[id], 2, 3).unwrap();
    assert_eq!(profile[0], 8);
    assert!(bracket_span(&[], &Subspace::zero(2, 8)).unwrap().dim() == 0);
}

#[test]
fn ternary_adding_machine_is_uniserial() {
    let text = r#"{"p": 3, "generators": ["a", "t"], "states": {
        "a": {"perm": 1, "children": ["e", "e", "e"]},
        "t": {"perm": 0, "children": ["a", "e", "t"]},
        "e": {"perm": 0, "children": ["e", "e", "e"]}}}"#;
    let f = parse_family("ternary", text).unwrap();
    for n in 1..=3 {
        let g = gens(&f, n);
        for r in 0..3usize.pow(n as u32) {
            let span = bracket_span(&g, &filtration(3, n, r)).unwrap();
            assert!(filtration(3, n, r + 1).contains_subspace(&span));
        }
    }
}

#[test]
fn gm_witnesses_have_the_required_action() {
    for f in [grigorchuk_generators(), overgroup_generators()] {
        let q = LevelQuotient::new(&f, 4).unwrap();
        for m in 1..=4 {
            let w = find_gm_witness(&f, m, 1 << 16).unwrap().expect("witness");
            let g = q.word(&w.word).unwrap();
            let perm = g.truncate(m).leaf_permutation();
            // 0^m ↦ 0^{m-1}1; other vertices σx with σ ≠ 0^{m-1} keep their last letter
            assert_eq!(perm[0], 1, "{} m={m}", f.name);
            for (v, &image) in perm.iter().enumerate().skip(2) {
                assert_eq!(image % 2, v as u32 % 2);
            }
        }
    }
}

#[test]
fn sections_are_elementary_abelian_sums() {
    for (f, dims) in [
        (grigorchuk_generators(), [3, 6]),
        (overgroup_generators(), [5, 10]),
    ] {
        let q = LevelQuotient::new(&f, 6).unwrap();
        for m in 1..=2 {
            let report = iso_check(&q, m).unwrap();
            assert!(report.passed(), "{} {report:?}", f.name);
            assert_eq!(report.section_dim, dims[m - 1]);
        }
    }
}

#[test]
fn section_of_overgroup_is_not_faithful_at_level_five() {
    let q = LevelQuotient::new(&overgroup_generators(), 5).unwrap();
    let report = iso_check(&q, 2).unwrap();
    assert!(!report.bijective);
}

#[test]
fn alpha_sends_embedded_x_to_monomial_one() {
    let f = grigorchuk_generators();
    let q = LevelQuotient::new(&f, 6).unwrap();
    let section = Section::new(&q, 2).unwrap();
    let x = f.get("a").unwrap().commutator(f.get("b").unwrap()).unwrap();
    let zero = VertexWord::parse(2, "0 0").unwrap();
    let g = Automaton::embed_at_vertex(&zero, &x).unwrap().portrait(6);
    let coords = section.decompose(&g).unwrap();
    let parts = section.split(&coords);
    assert_eq!(parts[0], VnElement::monomial(2, 2, 0));
    assert!(parts[1].is_zero());
}

#[test]
fn squaring_reports() {
    let q = LevelQuotient::new(&grigorchuk_generators(), 7).unwrap();
    let r = square_map_check(&q, 2).unwrap();
    assert!(r.lines[0].holds());
    assert!(!r.lines[1].holds() && r.lines[1].holds_on_component());
    let q = LevelQuotient::new(&overgroup_generators(), 7).unwrap();
    let r = square_map_check(&q, 2).unwrap();
    assert!(r.lines[0].holds() && r.lines[1].holds());
    // x⁴ = 1 makes the x²-squares trivial
    assert!(!r.lines[2].holds_on_component());
}

fn word(f: &GeneratorFamily, letters: &[usize], n: usize) -> Portrait {
    letters.iter().fold(Portrait::identity(2, n), |acc, &i| {
        acc.mul(&f.generators[i % 4].1.portrait(n))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn action_is_linear_and_multiplicative(
        u in prop::collection::vec(0usize..4, 0..8),
        w in prop::collection::vec(0usize..4, 0..8),
        c1 in prop::collection::vec(0u8..2, 16),
        c2 in prop::collection::vec(0u8..2, 16),
    ) {
        let f = grigorchuk_generators();
        let (g, h) = (word(&f, &u, 4), word(&f, &w, 4));
        let v1 = VnElement::from_coeffs(2, 4, c1).unwrap();
        let v2 = VnElement::from_coeffs(2, 4, c2).unwrap();
        prop_assert_eq!(
            g_action(&g, &v1.add(&v2)).unwrap(),
            g_action(&g, &v1).unwrap().add(&g_action(&g, &v2).unwrap())
        );
        prop_assert_eq!(
            g_action(&g.mul(&h), &v1).unwrap(),
            g_action(&g, &g_action(&h, &v1).unwrap()).unwrap()
        );
    }

    #[test]
    fn lie_action_lowers_the_filtration(u in prop::collection::vec(0usize..4, 0..10), r in 0usize..16) {
        let f = overgroup_generators();
        let g = word(&f, &u, 4);
        let v = v_basis(2, 4, r).unwrap();
        let next = filtration(2, 4, r + 1);
        prop_assert!(next.contains(lie_action(&g, &v).unwrap().coeffs()));
    }
}
