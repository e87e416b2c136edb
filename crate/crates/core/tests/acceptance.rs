//! The twelve acceptance criteria, each timed against its budget.
//!
//! Three criteria cannot hold as worded. Their lines print FAIL and the test
//! asserts the failure is exactly the analyzed one:
//! - 5: one row of the transcribed witness table does not preserve its union.
//! - 6, 7: scalar matrices fix every 1-space, so no stabilizer of a union of
//!   1-spaces in GL(2,p) is smaller than 4(p - 1); at p = 13 the named pair
//!   of direction sets also leaves an extra factor of 3.

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use twoclosed_core::certify::{
    certify_not_digraph_group, certify_q17, certify_two_closed, Evidence, UnionCoverage, WitnessKind, WitnessSource,
};
use twoclosed_core::clique::{lemma, verify_clique_axioms, CheckMode, MuConfig, DEFAULT_SEED};
use twoclosed_core::cross_ratio::{verify_lambda_cross_ratios, verify_table1};
use twoclosed_core::digraph::{orbital_union_set, preserves_set};
use twoclosed_core::group::{
    format_labels, g0_contains, lambda_classes, nontrivial_labels, rank_of, suborbit_elements, LinPart, SuborbitLabel,
    SuborbitPartition,
};
use twoclosed_core::matrix::gl2_order;
use twoclosed_core::obstruction::{integer_obstructions, scan_primes};
use twoclosed_core::stabilizer::StabilizerSummary;
use twoclosed_core::witness_table::P13;
use twoclosed_core::{Matrix, PrimeModulus, VertexSpace};

/// The p = 13 witness table as originally stated, one row uncorrected,
/// kept apart from the certifier's manifest.
const TABLE_Q13: [(&[&str], [[i64; 2]; 2]); 15] = [
    (&["L1"], [[1, 2], [2, 1]]),
    (&["L2"], [[1, 1], [5, -5]]),
    (&["L3"], [[1, 1], [5, -5]]),
    (&["L5"], [[1, 1], [1, -1]]),
    (&["L1", "L2"], [[1, 4], [4, -1]]),
    (&["L1", "L3"], [[1, 0], [0, 4]]),
    (&["L1", "L5"], [[1, 0], [0, 5]]),
    (&["L2", "L3"], [[1, 1], [5, -5]]),
    (&["L2", "L5"], [[1, 0], [0, 4]]),
    (&["L3", "L5"], [[1, 2], [2, 1]]),
    (&["L1", "L2", "L3"], [[1, 0], [0, 2]]),
    (&["L1", "L2", "L5"], [[1, 4], [4, -1]]),
    (&["L1", "L3", "L5"], [[1, 2], [2, 1]]),
    (&["L2", "L3", "L5"], [[1, 1], [1, -1]]),
    (&["L1", "L2", "L3", "L5"], [[1, 0], [0, 2]]),
];

type Check = Result<String, String>;

fn gf(p: u32) -> PrimeModulus {
    PrimeModulus::new(p).unwrap()
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn coverage(ev: &Evidence) -> &UnionCoverage {
    match ev {
        Evidence::NotDigraphGroup(u) => u,
        other => panic!("unexpected evidence {other:?}"),
    }
}

fn c1_rank() -> Check {
    let got: Vec<usize> = [5, 7, 13].map(|p| rank_of(gf(p))).to_vec();
    ensure(got == [5, 5, 7], || format!("ranks {got:?}"))?;
    Ok(format!("ranks {got:?}"))
}

fn c2_lambda_classes() -> Check {
    let got: BTreeSet<BTreeSet<u32>> = lambda_classes(gf(13))
        .into_iter()
        .map(|c| c.members.iter().map(|e| e.value()).collect())
        .collect();
    let want: BTreeSet<BTreeSet<u32>> = [&[1, 12][..], &[2, 6, 7, 11], &[3, 4, 9, 10], &[5, 8]]
        .iter()
        .map(|s| s.iter().copied().collect())
        .collect();
    ensure(got == want, || format!("classes {got:?}"))?;
    Ok("4 classes".into())
}

fn c3_suborbits() -> Check {
    for p in [5, 7, 13] {
        let space = VertexSpace::new(2, gf(p)).unwrap();
        let part = SuborbitPartition::new(space);
        let mut seen = vec![false; space.size() as usize];
        let mut total = 0u64;
        for &label in part.labels() {
            let members = suborbit_elements(label, &space);
            ensure(members.len() == part.size(label), || {
                format!("{label} size mismatch at {p}")
            })?;
            for x in members {
                ensure(!seen[x as usize], || format!("vertex {x} in two suborbits at {p}"))?;
                ensure(part.label_of(x) == label, || format!("vertex {x} mislabelled at {p}"))?;
                seen[x as usize] = true;
                total += 1;
            }
        }
        ensure(total == u64::from(p).pow(4), || format!("sizes sum to {total} at {p}"))?;
    }
    Ok("disjoint, sizes sum to p^4".into())
}

fn check_linear_witness(p: u32, union: &[&str], rows: [[i64; 2]; 2], part: &SuborbitPartition) -> Result<(), String> {
    let f = gf(p);
    let labels: Vec<SuborbitLabel> = union.iter().map(|s| SuborbitLabel::parse(s, f).unwrap()).collect();
    let set = orbital_union_set(&labels, part).unwrap();
    let lin = LinPart::on_v(Matrix::from_rows(f, &rows), 2).unwrap();
    ensure(preserves_set(&lin, &set).unwrap(), || {
        format!("{rows:?} fails to preserve {union:?}")
    })?;
    ensure(!g0_contains(&lin), || format!("{rows:?} lies in G0"))
}

fn c4_theorem_q5() -> Check {
    let part = SuborbitPartition::new(VertexSpace::new(2, gf(5)).unwrap());
    for (union, rows) in [
        (&["A", "L1"][..], [[1, 1], [1, -1]]),
        (&["A", "L2"], [[1, 2], [2, 1]]),
        (&["L1", "L2"], [[1, 0], [0, 2]]),
    ] {
        check_linear_witness(5, union, rows, &part)?;
    }
    let cert = certify_not_digraph_group(5, 2).map_err(|e| e.to_string())?;
    let cov = coverage(&cert.evidence);
    ensure(cov.proper_unions == 14, || format!("{} unions", cov.proper_unions))?;
    Ok(format!("14 unions, kinds {:?}", cov.kind_counts))
}

fn q13_coverage() -> Result<String, String> {
    let cert = certify_not_digraph_group(13, 2).map_err(|e| e.to_string())?;
    let cov = coverage(&cert.evidence);
    ensure(cov.proper_unions == 62, || format!("{} unions", cov.proper_unions))?;
    let distinct: BTreeSet<String> = cov.witnesses.iter().map(|w| format_labels(&w.union)).collect();
    ensure(distinct.len() == 62, || "duplicate unions".into())?;
    let b_aug = cov
        .witnesses
        .iter()
        .filter(|w| w.source == WitnessSource::BAugmented)
        .count();
    let comp = cov
        .witnesses
        .iter()
        .filter(|w| w.kind == WitnessKind::ComplementRef)
        .count();
    ensure(b_aug == 15 && comp == 30, || {
        format!("{b_aug} B-augmented, {comp} complements")
    })?;
    Ok(format!("62 unions, kinds {:?}", cov.kind_counts))
}

fn q13_failing_rows() -> Vec<&'static [&'static str]> {
    let part = SuborbitPartition::new(VertexSpace::new(2, gf(13)).unwrap());
    TABLE_Q13
        .iter()
        .filter(|(union, rows)| check_linear_witness(13, union, *rows, &part).is_err())
        .map(|(union, _)| *union)
        .collect()
}

fn c5_theorem_q13() -> Check {
    let bad = q13_failing_rows();
    let covered = q13_coverage()?;
    ensure(bad.is_empty(), || {
        format!("table rows failing: {bad:?}; with corrected manifest: {covered}")
    })?;
    Ok(covered)
}

fn c5_as_analyzed() -> bool {
    let part = SuborbitPartition::new(VertexSpace::new(2, gf(13)).unwrap());
    let bad = q13_failing_rows();
    let fixed = P13.linear.iter().find(|e| e.union == ["L1", "L2", "L3"]).unwrap();
    bad == [&["L1", "L2", "L3"][..]]
        && check_linear_witness(13, fixed.union, fixed.rows, &part).is_ok()
        && P13
            .linear
            .iter()
            .all(|e| check_linear_witness(13, e.union, e.rows, &part).is_ok())
        && q13_coverage().is_ok()
}

/// The order-8 reading of criteria 6 and 7.
fn literal_order_eight(s: &StabilizerSummary) -> bool {
    s.order == 8 && s.equals_d8
}

fn c6_two_closed() -> Check {
    let mut orders = Vec::new();
    let mut literal = true;
    for (p, size) in [(5, 480u64), (7, 2016), (13, 26208)] {
        ensure(gl2_order(gf(p)) == size, || format!("GL(2,{p}) order"))?;
        let cert = certify_two_closed(p, 2, DEFAULT_SEED).map_err(|e| e.to_string())?;
        let Evidence::TwoClosed(ev) = &cert.evidence else {
            unreachable!()
        };
        literal &= literal_order_eight(&ev.pair_intersection);
        orders.push((p, ev.pair_intersection.order, ev.intersection.order));
    }
    ensure(literal, || format!("(p, pair order, all-suborbit order) = {orders:?}"))?;
    Ok(format!("{orders:?}"))
}

fn c6_as_analyzed() -> bool {
    [5u32, 7, 13].iter().all(|&p| {
        let cert = certify_two_closed(p, 2, DEFAULT_SEED).unwrap();
        let Evidence::TwoClosed(ev) = &cert.evidence else {
            return false;
        };
        let all = &ev.intersection;
        let pair = &ev.pair_intersection;
        let pair_ok = if p == 13 {
            pair.order == 144 && pair.contains_d8 && !pair.within_scalar_d8
        } else {
            pair == all
        };
        pair_ok && all.equals_scalar_d8 && all.contains_d8 && all.is_subgroup && all.order as u32 == 4 * (p - 1)
    })
}

fn c7_q17() -> Check {
    ensure(gl2_order(gf(17)) == 78336, || "GL(2,17) order".into())?;
    let cert = certify_q17(2, DEFAULT_SEED).map_err(|e| e.to_string())?;
    let Evidence::Rigidity(ev) = &cert.evidence else {
        unreachable!()
    };
    ensure(literal_order_eight(&ev.stabilizer), || {
        format!(
            "stabilizer order {}, equals scalar D8: {}",
            ev.stabilizer.order, ev.stabilizer.equals_scalar_d8
        )
    })?;
    Ok("order 8".into())
}

fn c7_as_analyzed() -> bool {
    let cert = certify_q17(2, DEFAULT_SEED).unwrap();
    let Evidence::Rigidity(ev) = &cert.evidence else {
        return false;
    };
    ev.stabilizer.equals_scalar_d8 && ev.stabilizer.order == 64 && ev.slopes_match_union
}

fn c8_census() -> Check {
    let mut out = Vec::new();
    for (p, mus, size, count) in [(5, &[1u64, 2, 3, 4][..], 25, 100), (7, &[2, 3, 4, 5], 49, 196)] {
        let cfg = MuConfig::from_values(mus, 2, gf(p)).unwrap();
        let r = verify_clique_axioms(&cfg, DEFAULT_SEED).map_err(|e| e.to_string())?;
        let c = r.census.ok_or("census not run")?;
        ensure(
            c.target_size == size && c.cliques_found == count && c.all_are_cosets,
            || format!("p = {p}: {c:?}"),
        )?;
        out.push(format!("p={p}: {count} of size {size}"));
    }
    Ok(out.join(", "))
}

fn c9_clique_lemmas() -> Check {
    let wanted = [lemma::ADJACENCY, lemma::INTERSECTION, lemma::PARALLEL, lemma::LINEARITY];
    let mut out = Vec::new();
    for (p, mus) in [
        (5, &[1u64, 2, 3, 4][..]),
        (7, &[2, 3, 4, 5]),
        (13, &[2, 6, 7, 11]),
        (17, &[1, 2, 8, 9, 15, 16]),
    ] {
        let cfg = MuConfig::from_values(mus, 2, gf(p)).unwrap();
        let r = verify_clique_axioms(&cfg, DEFAULT_SEED).map_err(|e| e.to_string())?;
        let want_mode = if p <= 7 {
            CheckMode::Exhaustive
        } else {
            CheckMode::Sampled
        };
        for name in wanted {
            let l = r
                .lemmas
                .iter()
                .find(|l| l.lemma == name)
                .ok_or(format!("{name} missing"))?;
            ensure(l.mode == want_mode && l.status == "verified", || {
                format!("p = {p}: {l:?}")
            })?;
            if want_mode == CheckMode::Sampled {
                ensure(l.instances_checked >= 100_000, || format!("p = {p}: {l:?}"))?;
            }
        }
        out.push(format!("p={p} {:?}", r.mode));
    }
    Ok(out.join(", "))
}

fn c10_cross_ratio() -> Check {
    let mut checks = 0;
    for p in [5, 7, 11, 13] {
        let r = verify_table1(gf(p)).map_err(|e| e.to_string())?;
        let q = u64::from(p) + 1;
        ensure(
            r.quads == q * (q - 1) * (q - 2) * (q - 3) && r.permutations == 24,
            || format!("{r:?}"),
        )?;
        checks += r.checks;
    }
    let mut lambdas = 0;
    for p in [5, 7, 13, 17] {
        lambdas += verify_lambda_cross_ratios(gf(p))
            .map_err(|e| e.to_string())?
            .lambdas_checked;
    }
    Ok(format!("{checks} permuted quads, {lambdas} lambdas"))
}

fn c11_scan() -> Check {
    let r = scan_primes(500).map_err(|e| e.to_string())?;
    ensure(r.both_obstructed == [7, 13], || format!("{:?}", r.both_obstructed))?;
    ensure(integer_obstructions(2) == [17, 41, -7, 481], || {
        "lambda = 2 values".into()
    })?;
    ensure(integer_obstructions(4) == [257, 353, 161, 69121], || {
        "lambda = 4 values".into()
    })?;
    Ok(format!(
        "{} primes, both obstructed at {:?}",
        r.primes_scanned, r.both_obstructed
    ))
}

fn c12_connectivity() -> Check {
    let mut n = 0;
    for p in [5, 7, 13] {
        let part = SuborbitPartition::new(VertexSpace::new(2, gf(p)).unwrap());
        for label in nontrivial_labels(gf(p)) {
            let set = orbital_union_set(&[label], &part).unwrap();
            ensure(set.is_connected(), || format!("{label} disconnected at {p}"))?;
            n += 1;
        }
    }
    Ok(format!("{n} orbital digraphs connected"))
}

struct Criterion {
    id: u32,
    name: &'static str,
    budget: Duration,
    run: fn() -> Check,
    /// Unattainable as stated; holds when the failure is exactly the
    /// analyzed one.
    analyzed_failure: Option<fn() -> bool>,
}

/// Runs without the libtest harness so the per-criterion lines always print.
fn main() {
    let secs = Duration::from_secs;
    let criteria = [
        Criterion {
            id: 1,
            name: "rank",
            budget: secs(1),
            run: c1_rank,
            analyzed_failure: None,
        },
        Criterion {
            id: 2,
            name: "lambda classes at 13",
            budget: secs(1),
            run: c2_lambda_classes,
            analyzed_failure: None,
        },
        Criterion {
            id: 3,
            name: "suborbit partition",
            budget: secs(10),
            run: c3_suborbits,
            analyzed_failure: None,
        },
        Criterion {
            id: 4,
            name: "q=5 unions",
            budget: secs(10),
            run: c4_theorem_q5,
            analyzed_failure: None,
        },
        Criterion {
            id: 5,
            name: "q=13 table and unions",
            budget: secs(120),
            run: c5_theorem_q13,
            analyzed_failure: Some(c5_as_analyzed),
        },
        Criterion {
            id: 6,
            name: "2-closure stabilizers order 8",
            budget: secs(30),
            run: c6_two_closed,
            analyzed_failure: Some(c6_as_analyzed),
        },
        Criterion {
            id: 7,
            name: "q=17 stabilizer order 8",
            budget: secs(60),
            run: c7_q17,
            analyzed_failure: Some(c7_as_analyzed),
        },
        Criterion {
            id: 8,
            name: "clique census",
            budget: secs(120),
            run: c8_census,
            analyzed_failure: None,
        },
        Criterion {
            id: 9,
            name: "clique lemmas",
            budget: secs(300),
            run: c9_clique_lemmas,
            analyzed_failure: None,
        },
        Criterion {
            id: 10,
            name: "cross-ratio table",
            budget: secs(30),
            run: c10_cross_ratio,
            analyzed_failure: None,
        },
        Criterion {
            id: 11,
            name: "prime scan",
            budget: secs(1),
            run: c11_scan,
            analyzed_failure: None,
        },
        Criterion {
            id: 12,
            name: "connectivity",
            budget: secs(60),
            run: c12_connectivity,
            analyzed_failure: None,
        },
    ];
    let mut unexpected = Vec::new();
    for c in &criteria {
        let start = Instant::now();
        let result = (c.run)();
        let elapsed = start.elapsed();
        let in_budget = elapsed <= c.budget;
        let pass = result.is_ok() && in_budget;
        let detail = match &result {
            Ok(s) if in_budget => s.clone(),
            Ok(s) => format!("{s}; over budget"),
            Err(e) => e.clone(),
        };
        println!(
            "criterion {:>2} {:<32} {:<15} ({} ms / {} ms) {}",
            c.id,
            c.name,
            match (pass, c.analyzed_failure) {
                (true, _) => "PASS",
                (false, None) => "FAIL",
                (false, Some(_)) => "FAIL (analyzed)",
            },
            elapsed.as_millis(),
            c.budget.as_millis(),
            detail
        );
        match (pass, c.analyzed_failure) {
            (true, None) => {}
            (true, Some(_)) => unexpected.push(format!("criterion {} passed but was analyzed as unattainable", c.id)),
            (false, None) => unexpected.push(format!("criterion {}: {detail}", c.id)),
            (false, Some(check)) => {
                if !(in_budget && check()) {
                    unexpected.push(format!("criterion {} failed differently from the analysis", c.id));
                }
            }
        }
    }
    if !unexpected.is_empty() {
        eprintln!("unexpected acceptance outcomes: {unexpected:#?}");
        std::process::exit(1);
    }
    println!("acceptance: all criteria match their expected outcome");
}
