//! Report assembly and deterministic serialization.

use std::fmt::Write as _;

use serde::Serialize;
use sha2::{Digest, Sha256};
use twoclosed_core::certify::{Certificate, Evidence, Parameters, Status};
use twoclosed_core::group::format_labels;

use crate::commands::ResolvedConfig;

pub const TOOL_VERSION: &str = concat!(env!("CARGO_PKG_NAME"), " ", env!("CARGO_PKG_VERSION"));

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Summary {
    pub verified: usize,
    pub refuted: usize,
    pub skipped: usize,
    pub total: usize,
    /// Claim of the first certificate that is not verified.
    pub first_failure: Option<String>,
}

impl Summary {
    pub fn of(certs: &[Certificate]) -> Self {
        let mut s = Summary {
            total: certs.len(),
            ..Summary::default()
        };
        for c in certs {
            match c.status {
                Status::Verified => s.verified += 1,
                Status::Refuted => s.refuted += 1,
                Status::Skipped => s.skipped += 1,
            }
        }
        s.first_failure = certs
            .iter()
            .find(|c| c.status != Status::Verified)
            .map(|c| c.claim.clone());
        s
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub tool_version: &'static str,
    /// Absent when no command produced the report.
    pub run_config: Option<ResolvedConfig>,
    pub certificates: Vec<Certificate>,
    pub summary: Summary,
    /// SHA-256 of the report with this field empty and every `elapsed_ms`
    /// zeroed, so timing runs hash like plain ones.
    pub content_hash: String,
}

impl Report {
    pub fn new(rc: &ResolvedConfig, certs: Vec<Certificate>) -> Self {
        Self::build(Some(rc.clone()), certs)
    }

    pub fn build(run_config: Option<ResolvedConfig>, certificates: Vec<Certificate>) -> Self {
        let summary = Summary::of(&certificates);
        let mut r = Report {
            tool_version: TOOL_VERSION,
            run_config,
            certificates,
            summary,
            content_hash: String::new(),
        };
        r.content_hash = r.hash();
        r
    }

    fn hash(&self) -> String {
        let mut canon = self.clone();
        canon.content_hash.clear();
        for c in &mut canon.certificates {
            c.elapsed_ms = 0;
        }
        let bytes =
            serde_json::to_vec(&serde_json::to_value(&canon).expect("report is plain data")).expect("value serializes");
        format!("sha256:{}", hex::encode(Sha256::digest(&bytes)))
    }

    pub fn first_failure(&self) -> Option<&Certificate> {
        self.certificates.iter().find(|c| c.status != Status::Verified)
    }
}

/// Pretty JSON with keys sorted at every level.
pub fn to_json(r: &Report) -> serde_json::Result<String> {
    // `Value` objects are ordered maps, so the round trip sorts keys.
    let mut s = serde_json::to_string_pretty(&serde_json::to_value(r)?)?;
    s.push('\n');
    Ok(s)
}

pub fn status_name(s: Status) -> &'static str {
    match s {
        Status::Verified => "verified",
        Status::Refuted => "refuted",
        Status::Skipped => "skipped",
    }
}

fn describe_params(p: &Parameters) -> String {
    let mut out = Vec::new();
    if let Some(v) = p.p {
        out.push(format!("p={v}"));
    }
    if let Some(v) = p.m {
        out.push(format!("m={v}"));
    }
    if let Some(v) = &p.mus {
        let mus: Vec<String> = v.iter().map(u64::to_string).collect();
        out.push(format!("mu={}", mus.join(",")));
    }
    if let Some(v) = p.max_prime {
        out.push(format!("max-prime={v}"));
    }
    if let Some(v) = p.seed {
        out.push(format!("seed={v}"));
    }
    out.join(" ")
}

fn headline(e: &Evidence) -> Vec<String> {
    match e {
        Evidence::Rank { rank, labels, .. } => vec![rank.to_string(), format!("orbitals: 0,{}", format_labels(labels))],
        Evidence::Suborbits { sizes, total, .. } => {
            let parts: Vec<String> = sizes.iter().map(|(k, v)| format!("{k}:{v}")).collect();
            vec![format!("{} (total {total})", parts.join(" "))]
        }
        Evidence::Scan(s) => vec![format!(
            "{} primes scanned, both obstructed at {:?}",
            s.primes_scanned, s.both_obstructed
        )],
        Evidence::CliqueAxioms(r) => {
            let mut v: Vec<String> = r
                .lemmas
                .iter()
                .map(|l| format!("{} {:?} x{}", l.lemma, l.mode, l.instances_checked))
                .collect();
            if let Some(c) = &r.census {
                v.push(format!("census: {} cliques of size {}", c.cliques_found, c.target_size));
            }
            if let Some(l) = &r.limitation {
                v.push(format!("limitation: {l}"));
            }
            v
        }
        Evidence::CrossRatio { table, lambda } => {
            let mut v = vec![format!("{} quads x {} reorderings", table.quads, table.permutations)];
            v.extend(
                lambda
                    .iter()
                    .map(|l| format!("{} lambdas match the closed form", l.lambdas_checked)),
            );
            v
        }
        Evidence::TwoClosed(t) => vec![
            format!("clique union {}", format_labels(&t.clique_union)),
            format!(
                "stabilizer intersection over {} direction sets: order {} of {}",
                t.direction_sets.len(),
                t.intersection.order,
                t.gl2_order
            ),
            format!(
                "pair {} alone: order {}",
                format_labels(&t.pair),
                t.pair_intersection.order
            ),
        ],
        Evidence::NotDigraphGroup(u) => {
            let kinds: Vec<String> = u.kind_counts.iter().map(|(k, v)| format!("{k}:{v}")).collect();
            vec![format!(
                "{} proper unions witnessed ({})",
                u.proper_unions,
                kinds.join(" ")
            )]
        }
        Evidence::Rigidity(r) => vec![format!(
            "stabilizer order {} of {}, union {}",
            r.stabilizer.order,
            r.gl2_order,
            format_labels(&r.expected_union)
        )],
        Evidence::Failure { error } => vec![error.clone()],
    }
}

/// Human-readable summary. Not a stable format; use JSON for tooling.
pub fn to_text(r: &Report) -> String {
    let mut out = String::new();
    match &r.run_config {
        Some(rc) => writeln!(out, "{}: {}", r.tool_version, rc.command),
        None => writeln!(out, "{}", r.tool_version),
    }
    .expect("string write");
    for c in &r.certificates {
        let mut line = format!(
            "[{}] {} {}",
            status_name(c.status),
            c.claim,
            describe_params(&c.parameters)
        );
        if r.run_config.as_ref().is_some_and(|rc| rc.timings) {
            write!(line, " ({} ms)", c.elapsed_ms).expect("string write");
        }
        writeln!(out, "{}", line.trim_end()).expect("string write");
        for h in headline(&c.evidence) {
            writeln!(out, "    {h}").expect("string write");
        }
    }
    let s = &r.summary;
    writeln!(
        out,
        "summary: {} verified, {} refuted, {} skipped",
        s.verified, s.refuted, s.skipped
    )
    .expect("string write");
    writeln!(out, "content hash: {}", r.content_hash).expect("string write");
    out
}
