use std::fmt::Write as _;
use std::path::Path;

use branchlie::lie::{
    cayley_graph, export_dot, lie_algebra_of, match_theorem_labels, theorem_edges,
};
use branchlie::quotients::{
    automaton_growth, dimension_series, faithful_flags, lower_central_series, quotient_growth,
    rank_sequence, verify_n_series, LevelQuotient, SeriesKind, SeriesRow,
};
use branchlie::series_tools::{
    gs_bound_series, gs_defect, gs_numeric_witness, jennings_product, Characteristic,
    RelatorProfile,
};
use branchlie::tree::{parse_family, GeneratorFamily};
use branchlie::vn::{corank_profile, uniseriality_failures};
use branchlie::{Error, Result};
use num_rational::BigRational;
use serde_json::{json, Value};

use crate::{CayleyArgs, Format, GrowthArgs, GsArgs, JenningsArgs, Kind, SeriesArgs, VnArgs};

const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Output text plus invariant violations; any violation means exit 1.
pub struct Outcome {
    pub text: String,
    pub problems: Vec<String>,
}

impl Outcome {
    fn ok(text: String) -> Outcome {
        Outcome {
            text,
            problems: vec![],
        }
    }
}

pub fn exit_code(e: &Error) -> u8 {
    match e {
        Error::BudgetExceeded { .. } | Error::DegreeOverflow { .. } => 3,
        Error::NotNSeries(_) | Error::NotElementaryAbelian(_) => 1,
        _ => 2,
    }
}

fn load_group(spec: &str) -> Result<GeneratorFamily> {
    let path = Path::new(spec);
    if path.is_file() {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::InvalidArgument(format!("cannot read {spec}: {e}")))?;
        let name = path.file_stem().and_then(|s| s.to_str()).unwrap_or(spec);
        return parse_family(name, &text);
    }
    GeneratorFamily::builtin(spec)
}

fn with_version(mut v: Value) -> String {
    v["version"] = json!(VERSION);
    let mut s = serde_json::to_string_pretty(&v).expect("serializable");
    s.push('\n');
    s
}

fn reject_dot(format: Format) -> Result<()> {
    if format == Format::Dot {
        Err(Error::InvalidArgument(
            "dot output is only available for cayley".into(),
        ))
    } else {
        Ok(())
    }
}

pub fn series(args: &SeriesArgs, format: Format, budget: usize) -> Result<Outcome> {
    reject_dot(format)?;
    let spec = args
        .group
        .as_deref()
        .ok_or_else(|| Error::InvalidArgument("--group is required".into()))?;
    let family = load_group(spec)?;
    if args.level == 0 {
        return Err(Error::InvalidArgument("level must be at least 1".into()));
    }
    let q = LevelQuotient::new(&family, args.level)?;
    let deeper = LevelQuotient::new(&family, args.level + 1)?;
    let (chain, next) = match args.kind {
        Kind::Lcs => (lower_central_series(&q), lower_central_series(&deeper)),
        Kind::Dim => (
            dimension_series(&q, budget)?,
            dimension_series(&deeper, budget)?,
        ),
    };
    let ranks = rank_sequence(&chain);
    let rows = SeriesRow::table(&ranks, &faithful_flags(&chain, &next));
    let report = verify_n_series(&chain, budget);
    let text = match format {
        Format::Json => with_version(json!({
            "group": family.name,
            "kind": if args.kind == Kind::Lcs { "lcs" } else { "dim" },
            "level": args.level,
            "rows": rows,
            "n_series_checks": report.checked,
        })),
        _ => SeriesRow::to_tsv(&rows),
    };
    Ok(Outcome {
        text,
        problems: report.violations,
    })
}

pub fn cayley(args: &CayleyArgs, format: Format) -> Result<Outcome> {
    if format == Format::Tsv {
        return Err(Error::InvalidArgument("cayley writes dot or json".into()));
    }
    let family = load_group(&args.group)?;
    let (kind, restricted) = match args.series {
        Kind::Lcs => (SeriesKind::LowerCentral, false),
        Kind::Dim => (SeriesKind::Dimension, true),
    };
    let levels: Vec<usize> = match args.level {
        Some(l) => vec![l],
        None => (3..=8).collect(),
    };
    let mut found = None;
    for &level in &levels {
        let q = LevelQuotient::new(&family, level)?;
        match lie_algebra_of(&q, kind, args.degrees, restricted) {
            Ok(l) => {
                found = Some((q, l));
                break;
            }
            Err(Error::FaithfulRange(_)) if args.level.is_none() && level < 8 => continue,
            Err(e) => return Err(e),
        }
    }
    let (q, l) = found.expect("loop returns or finds");
    let graph = cayley_graph(&l, q.generators())?;
    let mut problems = Vec::new();
    if !graph.is_connected() {
        problems.push("Cayley graph is not connected".into());
    }
    problems.extend(l.check_antisymmetry());
    problems.extend(l.check_jacobi());
    problems.extend(l.check_restricted());
    if args.check_labels {
        let edges = theorem_edges(&family.name, restricted, 3)?;
        let report = match_theorem_labels(&graph, &edges);
        for c in report.failures().into_iter().filter(|c| c.edge.explicit) {
            problems.push(format!(
                "edge {} -> {}: drawn {:?}, computed {:?}",
                c.edge.from, c.edge.to, c.edge.labels, c.computed
            ));
        }
    }
    let text = match format {
        Format::Json => {
            let mut v = serde_json::to_value(&graph).expect("serializable");
            v["group"] = json!(family.name);
            v["level"] = json!(q.level());
            with_version(v)
        }
        _ => export_dot(&graph),
    };
    Ok(Outcome { text, problems })
}

pub fn growth(args: &GrowthArgs, format: Format, budget: usize) -> Result<Outcome> {
    reject_dot(format)?;
    let family = load_group(&args.group)?;
    let sizes = match args.level {
        Some(level) => {
            let q = LevelQuotient::new(&family, level)?;
            quotient_growth(&q.generator_portraits(), args.radius)
        }
        None => {
            let gens: Vec<_> = family.generators.iter().map(|(_, g)| g.clone()).collect();
            automaton_growth(&gens, args.radius, budget)?
        }
    };
    let mut problems = Vec::new();
    if sizes.first() != Some(&1) {
        problems.push("γ(0) ≠ 1".into());
    }
    if sizes.windows(2).any(|w| w[0] > w[1]) {
        problems.push("ball sizes are not monotone".into());
    }
    let text = match format {
        Format::Json => with_version(json!({
            "group": family.name,
            "level": args.level,
            "gamma": sizes,
        })),
        _ => {
            let mut s = String::from("n\tgamma\n");
            for (n, g) in sizes.iter().enumerate() {
                writeln!(s, "{n}\t{g}").unwrap();
            }
            s
        }
    };
    Ok(Outcome { text, problems })
}

pub fn vn(args: &VnArgs, format: Format) -> Result<Outcome> {
    reject_dot(format)?;
    if !args.profile && !args.check_dec1 {
        return Err(Error::InvalidArgument(
            "pass --profile or --check-dec1".into(),
        ));
    }
    let family = load_group(&args.group)?;
    let p = family.p;
    let gens_at = |n: usize| -> Result<Vec<_>> {
        let q = LevelQuotient::new(&family, n)?;
        Ok(q.generator_portraits())
    };
    let mut problems = Vec::new();
    let mut rows = Vec::new();
    if args.profile {
        let profile = corank_profile(&gens_at(args.level)?, p, args.level)?;
        for (r, c) in profile.iter().enumerate() {
            rows.push(json!({"n": args.level, "r": r, "corank": c}));
        }
    } else {
        for n in 1..=args.level {
            let fails = uniseriality_failures(&gens_at(n)?, p, n)?;
            for r in 0..(p as usize).pow(n as u32) {
                let pass = !fails.contains(&r);
                if !pass {
                    problems.push(format!("[G, V_{n}^{r}] ≠ V_{n}^{}", r + 1));
                }
                rows.push(json!({"n": n, "r": r, "pass": pass}));
            }
        }
    }
    let text = match format {
        Format::Json => with_version(json!({ "group": family.name, "rows": rows })),
        _ => {
            let key = if args.profile { "corank" } else { "pass" };
            let mut s = format!("n\tr\t{key}\n");
            for row in &rows {
                writeln!(s, "{}\t{}\t{}", row["n"], row["r"], row[key]).unwrap();
            }
            s
        }
    };
    Ok(Outcome { text, problems })
}

pub fn gs(args: &GsArgs, format: Format) -> Result<Outcome> {
    reject_dot(format)?;
    let profile: RelatorProfile = args.relators_profile.parse()?;
    let r = profile.series(args.degree);
    let c = gs_bound_series(args.d, &r, args.degree)?;
    let defect = gs_defect(args.d, &r, &c)?;
    let mut problems = Vec::new();
    if let Some(n) = defect.coeffs().iter().position(|x| x < &0.into()) {
        problems.push(format!(
            "bound series violates the inequality at degree {n}"
        ));
    }
    let witness = match &args.xi {
        Some(text) => {
            let xi: BigRational = text.parse().map_err(|_| {
                Error::InvalidArgument(format!("`{text}` is not a rational number"))
            })?;
            Some(gs_numeric_witness(args.d, &profile, &xi, args.degree)?)
        }
        None => None,
    };
    let text = match format {
        Format::Json => with_version(json!({
            "d": args.d,
            "relators_profile": profile.to_string(),
            "xi": args.xi,
            "partial": witness.as_ref().map(|w| w.partial.to_string()),
            "closed_form": witness.as_ref().and_then(|w| w.closed_form.as_ref().map(|c| c.to_string())),
            "negative": witness.as_ref().map(|w| w.is_negative()),
            "r": r,
            "c": c,
        })),
        _ => {
            let mut s = String::new();
            if let Some(w) = &witness {
                writeln!(s, "# partial\t{}", w.partial).unwrap();
                if let Some(cf) = &w.closed_form {
                    writeln!(s, "# closed_form\t{cf}").unwrap();
                }
                writeln!(s, "# negative\t{}", w.is_negative()).unwrap();
            }
            s.push_str("n\tr\tc\n");
            for n in 0..=args.degree {
                writeln!(s, "{n}\t{}\t{}", r.coeff(n), c.coeff(n)).unwrap();
            }
            s
        }
    };
    Ok(Outcome { text, problems })
}

pub fn jennings(args: &JenningsArgs, format: Format) -> Result<Outcome> {
    reject_dot(format)?;
    let characteristic = match args.p {
        0 => Characteristic::Zero,
        p if (2..p).all(|k| p % k != 0) && p > 1 => Characteristic::Prime(p),
        p => return Err(Error::NotPrime(p as u32)),
    };
    let a = jennings_product(&args.b, characteristic, args.degree);
    let text = match format {
        Format::Json => with_version(json!({ "b": args.b, "p": args.p, "a": a })),
        _ => {
            let mut s = String::from("n\ta\n");
            for (n, x) in a.coeffs().iter().enumerate() {
                writeln!(s, "{n}\t{x}").unwrap();
            }
            s
        }
    };
    Ok(Outcome::ok(text))
}
