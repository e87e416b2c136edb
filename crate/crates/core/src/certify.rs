//! Certificates for the 2-closure, digraph-representability and rigidity
//! claims, assembled from the lower-level checks.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use serde::Serialize;

use crate::clique::{verify_clique_axioms, CliqueAxiomReport, MuConfig};
use crate::cross_ratio::{LambdaCrossRatioReport, Table1Report};
use crate::digraph::{hamming_check, hamming_witness, orbital_union_set, preserves_set, HammingWitnessSummary};
use crate::error::{Error, Result};
use crate::field::PrimeModulus;
use crate::group::{
    format_labels, g0_contains, label_directions, nontrivial_labels, LinPart, SuborbitLabel, SuborbitPartition,
};
use crate::matrix::{gl2_order, Matrix};
use crate::obstruction::ScanReport;
use crate::stabilizer::{intersect, setwise_stabilizer_gl2, summarize, DirectionSet, StabilizerSummary};
use crate::tensor::{ProjPoint, VertexSpace};
use crate::witness_table::{manifest, WitnessManifest, Q17_LABELS, Q17_MUS};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Verified,
    Refuted,
    Skipped,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Parameters {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub z: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mus: Option<Vec<u64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_prime: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

#[derive(Clone, Debug, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Evidence {
    TwoClosed(TwoClosedEvidence),
    NotDigraphGroup(UnionCoverage),
    Rigidity(RigidityEvidence),
    Scan(ScanReport),
    CliqueAxioms(CliqueAxiomReport),
    CrossRatio {
        table: Table1Report,
        lambda: Vec<LambdaCrossRatioReport>,
    },
    Rank {
        p: u32,
        rank: usize,
        labels: Vec<SuborbitLabel>,
    },
    Suborbits {
        p: u32,
        m: usize,
        sizes: BTreeMap<String, usize>,
        total: u64,
    },
    Failure {
        error: String,
    },
}

#[derive(Clone, Debug, Serialize)]
pub struct Certificate {
    pub claim: String,
    pub parameters: Parameters,
    pub status: Status,
    pub evidence: Evidence,
    /// Filled in by the caller; the core has no clock.
    pub elapsed_ms: u64,
}

impl Certificate {
    pub fn verified(claim: impl Into<String>, parameters: Parameters, evidence: Evidence) -> Self {
        Self {
            claim: claim.into(),
            parameters,
            status: Status::Verified,
            evidence,
            elapsed_ms: 0,
        }
    }

    pub fn refuted(claim: impl Into<String>, parameters: Parameters, error: &Error) -> Self {
        Self {
            claim: claim.into(),
            parameters,
            status: Status::Refuted,
            evidence: Evidence::Failure {
                error: error.to_string(),
            },
            elapsed_ms: 0,
        }
    }
}

pub mod claim {
    pub const TWO_CLOSED: &str = "two-closed";
    pub const NOT_DIGRAPH_GROUP: &str = "not-a-digraph-automorphism-group";
    pub const Q17: &str = "q17-rigid-union";
    pub const SCAN: &str = "prime-scan";
    pub const CLIQUES: &str = "clique-axioms";
    pub const CROSS_RATIO: &str = "cross-ratio-table";
    pub const RANK: &str = "rank";
    pub const SUBORBITS: &str = "suborbits";
}

fn fail(stage: &str, detail: impl core::fmt::Display) -> Error {
    Error::CertificationFailed(format!("{stage}: {detail}"))
}

fn parse_labels(names: &[&str], p: PrimeModulus) -> Result<Vec<SuborbitLabel>> {
    let mut out = names
        .iter()
        .map(|s| SuborbitLabel::parse(s, p))
        .collect::<Result<Vec<_>>>()?;
    out.sort();
    Ok(out)
}

fn direction_set_of(labels: &[SuborbitLabel], p: PrimeModulus) -> Result<DirectionSet> {
    DirectionSet::new(labels.iter().flat_map(|&l| label_directions(l, p)), p)
}

fn slope_points(mus: &[u64], p: PrimeModulus) -> Vec<ProjPoint> {
    let mut v: Vec<ProjPoint> = mus.iter().map(|&mu| ProjPoint::Finite(p.elem(mu))).collect();
    v.sort();
    v
}

/// One direction set and its stabilizer.
#[derive(Clone, Debug, Serialize)]
pub struct DirectionStabilizer {
    pub label: SuborbitLabel,
    pub directions: Vec<ProjPoint>,
    pub stabilizer: StabilizerSummary,
}

#[derive(Clone, Debug, Serialize)]
pub struct TwoClosedEvidence {
    pub clique_union: Vec<SuborbitLabel>,
    pub clique_axioms: CliqueAxiomReport,
    pub gl2_order: u64,
    pub direction_sets: Vec<DirectionStabilizer>,
    /// Intersection over the two singled-out direction sets alone.
    pub pair: [SuborbitLabel; 2],
    pub pair_intersection: StabilizerSummary,
    /// Intersection over every nontrivial direction set; this is the bound
    /// on the linear part of a point stabilizer of the 2-closure.
    pub intersection: StabilizerSummary,
    /// Scalars `kI` act on V⊗W like `I ∘ kI`, so they already lie in G.
    pub scalars_absorbed_into_g: bool,
}

/// Clique structure for the manifest's μ-union, then the stabilizers of the
/// direction sets of all nontrivial suborbits, whose intersection must be D₈
/// up to scalars.
pub fn certify_two_closed(p: u32, m: usize, seed: u64) -> Result<Certificate> {
    let w = manifest(p).ok_or_else(|| fail("configuration", format!("no 2-closure recipe for p = {p}")))?;
    let f = PrimeModulus::new(p)?;
    let cfg = MuConfig::from_values(w.two_closed_mus, m, f)?;
    let clique_union = union_of_slopes(w.two_closed_mus, f)?;
    let clique_axioms = verify_clique_axioms(&cfg, seed).map_err(|e| fail("clique axioms", e))?;

    let pair_labels = parse_labels(&w.two_closed_pair, f)?;
    let pair = [pair_labels[0], pair_labels[1]];
    let mut direction_sets = Vec::new();
    let mut stabs = Vec::new();
    let mut pair_stabs = Vec::new();
    for label in nontrivial_labels(f).into_iter().filter(|&l| l != SuborbitLabel::B) {
        let ds = direction_set_of(&[label], f)?;
        let stab = setwise_stabilizer_gl2(&ds)?;
        let summary = summarize(&stab, f);
        if !summary.contains_d8 || !summary.is_subgroup {
            return Err(fail(
                "direction stabilizer",
                format!("{label} directions are not D8-invariant"),
            ));
        }
        direction_sets.push(DirectionStabilizer {
            label,
            directions: ds.points().iter().copied().collect(),
            stabilizer: summary,
        });
        if pair.contains(&label) {
            pair_stabs.push(stab.clone());
        }
        stabs.push(stab);
    }
    let pair_intersection = summarize(&intersect(&pair_stabs), f);
    let intersection = summarize(&intersect(&stabs), f);
    if !intersection.equals_scalar_d8 {
        return Err(fail(
            "stabilizer intersection",
            format!("order {} is not D8 up to scalars", intersection.order),
        ));
    }
    Ok(Certificate::verified(
        claim::TWO_CLOSED,
        Parameters {
            p: Some(p),
            m: Some(m),
            mus: Some(w.two_closed_mus.to_vec()),
            seed: Some(seed),
            ..Parameters::default()
        },
        Evidence::TwoClosed(TwoClosedEvidence {
            clique_union,
            clique_axioms,
            gl2_order: gl2_order(f),
            direction_sets,
            pair,
            pair_intersection,
            intersection,
            scalars_absorbed_into_g: true,
        }),
    ))
}

/// The suborbits whose directions are exactly the given slopes.
fn union_of_slopes(mus: &[u64], p: PrimeModulus) -> Result<Vec<SuborbitLabel>> {
    let target = slope_points(mus, p);
    let labels: Vec<SuborbitLabel> = nontrivial_labels(p)
        .into_iter()
        .filter(|&l| label_directions(l, p).iter().any(|d| target.contains(d)))
        .collect();
    let mut covered: Vec<ProjPoint> = labels.iter().flat_map(|&l| label_directions(l, p)).collect();
    covered.sort();
    if covered != target {
        return Err(fail(
            "configuration",
            "slopes are not a union of suborbit direction sets",
        ));
    }
    Ok(labels)
}

#[derive(Clone, Debug, Serialize)]
pub struct RigidityEvidence {
    pub mus: Vec<u64>,
    pub expected_union: Vec<SuborbitLabel>,
    pub slopes_match_union: bool,
    pub clique_axioms: CliqueAxiomReport,
    pub gl2_order: u64,
    pub stabilizer: StabilizerSummary,
}

/// The p = 17 union of the two smallest λ-classes: its direction set has
/// stabilizer D₈ up to scalars.
pub fn certify_q17(m: usize, seed: u64) -> Result<Certificate> {
    certify_q17_with(&Q17_MUS, m, seed)
}

/// As [`certify_q17`] with arbitrary slopes, for corruption tests.
pub fn certify_q17_with(mus: &[u64], m: usize, seed: u64) -> Result<Certificate> {
    let f = PrimeModulus::new(17)?;
    // The stabilizer stage runs first: it is defined for any slope set,
    // while the clique stage needs four or six slopes.
    let ds = DirectionSet::new(slope_points(mus, f), f)?;
    let stabilizer = summarize(&setwise_stabilizer_gl2(&ds)?, f);
    if !stabilizer.equals_scalar_d8 {
        return Err(fail(
            "stabilizer",
            format!(
                "order {} (contains D8: {}, within scalar D8: {})",
                stabilizer.order, stabilizer.contains_d8, stabilizer.within_scalar_d8
            ),
        ));
    }
    let expected_union = parse_labels(&Q17_LABELS, f)?;
    let mut expected: Vec<ProjPoint> = expected_union.iter().flat_map(|&l| label_directions(l, f)).collect();
    expected.sort();
    let slopes_match_union = expected == ds.points().iter().copied().collect::<Vec<_>>();
    if !slopes_match_union {
        return Err(fail("configuration", "slopes differ from the L1, L2 directions"));
    }
    let cfg = MuConfig::from_values(mus, m, f)?;
    let clique_axioms = verify_clique_axioms(&cfg, seed).map_err(|e| fail("clique axioms", e))?;
    Ok(Certificate::verified(
        claim::Q17,
        Parameters {
            p: Some(17),
            m: Some(m),
            z: Some(mus.len()),
            mus: Some(mus.to_vec()),
            seed: Some(seed),
            ..Parameters::default()
        },
        Evidence::Rigidity(RigidityEvidence {
            mus: mus.to_vec(),
            expected_union,
            slopes_match_union,
            clique_axioms,
            gl2_order: gl2_order(f),
            stabilizer,
        }),
    ))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum WitnessKind {
    #[serde(rename = "linear")]
    Linear,
    #[serde(rename = "hamming")]
    Hamming,
    #[serde(rename = "glgl-on-B")]
    GlGlOnB,
    #[serde(rename = "complement-ref")]
    ComplementRef,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum WitnessSource {
    Manifest,
    /// Reuses the witness of the union without B.
    BAugmented,
    AnyInvertiblePair,
    Complement,
}

/// How one union is to be certified, decided from the manifest alone.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Plan {
    Linear {
        matrix: Matrix,
        kind: WitnessKind,
        source: WitnessSource,
    },
    Hamming {
        x: ProjPoint,
        y: ProjPoint,
    },
    ComplementRef {
        of: u32,
        matrix: Option<Matrix>,
    },
}

#[derive(Clone, Debug)]
pub struct UnionTask {
    pub mask: u32,
    pub labels: Vec<SuborbitLabel>,
    pub plan: Plan,
}

#[derive(Clone, Debug, Serialize)]
pub struct UnionWitness {
    pub union: Vec<SuborbitLabel>,
    pub out_degree: usize,
    pub kind: WitnessKind,
    pub source: WitnessSource,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub matrix: Option<Matrix>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub refers_to: Option<Vec<SuborbitLabel>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub hamming: Option<HammingWitnessSummary>,
    /// A linear map was checked against this union itself.
    pub checked_directly: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct UnionCoverage {
    pub p: u32,
    pub m: usize,
    pub nontrivial_orbitals: usize,
    pub proper_unions: usize,
    /// Empty and full arc sets have automorphism group Sym of the vertices.
    pub trivial_unions: [&'static str; 2],
    pub kind_counts: BTreeMap<String, usize>,
    pub witnesses: Vec<UnionWitness>,
}

fn labels_of(mask: u32, labels: &[SuborbitLabel]) -> Vec<SuborbitLabel> {
    labels
        .iter()
        .enumerate()
        .filter(|(k, _)| mask >> k & 1 == 1)
        .map(|(_, &l)| l)
        .collect()
}

fn mask_of(names: &[SuborbitLabel], labels: &[SuborbitLabel]) -> Result<u32> {
    names.iter().try_fold(0u32, |acc, l| {
        let k = labels
            .iter()
            .position(|x| x == l)
            .ok_or_else(|| Error::InvalidLabel(format!("{l}")))?;
        Ok(acc | 1 << k)
    })
}

/// Assigns a witness strategy to every proper nonempty union.
///
/// Order: manifest linear, Hamming single, any-pair on B, B-augmented,
/// complement.
pub fn plan_unions(w: &WitnessManifest) -> Result<Vec<UnionTask>> {
    let f = PrimeModulus::new(w.p)?;
    let labels = nontrivial_labels(f);
    let full = (1u32 << labels.len()) - 1;
    let b_mask = mask_of(&[SuborbitLabel::B], &labels)?;
    let mut direct: BTreeMap<u32, Plan> = BTreeMap::new();
    for e in w.linear {
        let mask = mask_of(&parse_labels(e.union, f)?, &labels)?;
        let prev = direct.insert(
            mask,
            Plan::Linear {
                matrix: Matrix::from_rows(f, &e.rows),
                kind: WitnessKind::Linear,
                source: WitnessSource::Manifest,
            },
        );
        if prev.is_some() {
            return Err(fail(
                "manifest",
                format!("duplicate entry for {}", format_labels(&labels_of(mask, &labels))),
            ));
        }
    }
    for h in w.hamming {
        let mask = mask_of(&parse_labels(&[h.label], f)?, &labels)?;
        let pt = |s: Option<u64>| s.map_or(ProjPoint::Infinity, |v| ProjPoint::Finite(f.elem(v)));
        direct.entry(mask).or_insert(Plan::Hamming { x: pt(h.x), y: pt(h.y) });
    }
    direct.entry(b_mask).or_insert(Plan::Linear {
        matrix: Matrix::from_rows(f, &w.glgl_on_b),
        kind: WitnessKind::GlGlOnB,
        source: WitnessSource::AnyInvertiblePair,
    });
    let linear_seeds: Vec<(u32, Matrix)> = direct
        .iter()
        .filter_map(|(&mask, plan)| match plan {
            Plan::Linear {
                matrix,
                source: WitnessSource::Manifest,
                ..
            } if mask & b_mask == 0 => Some((mask, matrix.clone())),
            _ => None,
        })
        .collect();
    for (mask, matrix) in linear_seeds {
        direct.entry(mask | b_mask).or_insert(Plan::Linear {
            matrix,
            kind: WitnessKind::Linear,
            source: WitnessSource::BAugmented,
        });
    }
    let mut tasks = Vec::new();
    for mask in 1..full {
        let plan = match direct.get(&mask) {
            Some(plan) => plan.clone(),
            None => match direct.get(&(full ^ mask)) {
                Some(other) => Plan::ComplementRef {
                    of: full ^ mask,
                    matrix: match other {
                        Plan::Linear { matrix, .. } => Some(matrix.clone()),
                        _ => None,
                    },
                },
                None => {
                    return Err(fail(
                        "coverage",
                        format!("no witness for union {}", format_labels(&labels_of(mask, &labels))),
                    ))
                }
            },
        };
        tasks.push(UnionTask {
            mask,
            labels: labels_of(mask, &labels),
            plan,
        });
    }
    Ok(tasks)
}

fn check_linear(matrix: &Matrix, m: usize, set: &crate::digraph::ConnectionSet) -> Result<()> {
    let lin = LinPart::on_v(matrix.clone(), m)?;
    if g0_contains(&lin) {
        return Err(fail("witness", format!("{:?} lies in G0", matrix.to_rows())));
    }
    if !preserves_set(&lin, set)? {
        return Err(fail(
            "witness",
            format!(
                "{:?} does not preserve {}",
                matrix.to_rows(),
                format_labels(set.labels())
            ),
        ));
    }
    Ok(())
}

/// Machine-checks one planned union.
pub fn check_union(task: &UnionTask, partition: &SuborbitPartition) -> Result<UnionWitness> {
    let space = *partition.space();
    let all = nontrivial_labels(space.modulus());
    let set = orbital_union_set(&task.labels, partition)?;
    let mut out = UnionWitness {
        union: task.labels.clone(),
        out_degree: set.len(),
        kind: WitnessKind::ComplementRef,
        source: WitnessSource::Complement,
        matrix: None,
        refers_to: None,
        hamming: None,
        checked_directly: false,
    };
    match &task.plan {
        Plan::Linear { matrix, kind, source } => {
            check_linear(matrix, space.m(), &set).map_err(|e| fail(&format_labels(&task.labels), e))?;
            out.kind = *kind;
            out.source = *source;
            out.matrix = Some(matrix.clone());
            out.checked_directly = true;
        }
        Plan::Hamming { x, y } => {
            if !hamming_check(&set, *x, *y)? {
                return Err(fail(&format_labels(&task.labels), "not isomorphic to H(2, p^m)"));
            }
            let hw = hamming_witness(*x, *y, space)?;
            out.kind = WitnessKind::Hamming;
            out.source = WitnessSource::Manifest;
            out.hamming = Some(hw.summary(&space));
        }
        Plan::ComplementRef { of, matrix } => {
            out.refers_to = Some(labels_of(*of, &all));
            if let Some(matrix) = matrix {
                // Linear witnesses are cheap to recheck on this side too.
                check_linear(matrix, space.m(), &set).map_err(|e| fail(&format_labels(&task.labels), e))?;
                out.matrix = Some(matrix.clone());
                out.checked_directly = true;
            }
        }
    }
    Ok(out)
}

/// Certifies that no union of nontrivial orbitals has automorphism group G.
pub fn certify_not_digraph_group(p: u32, m: usize) -> Result<Certificate> {
    certify_not_digraph_group_by(p, m, |tasks, check| tasks.iter().map(check).collect())
}

/// As [`certify_not_digraph_group`], with `run` deciding how the independent
/// per-union checks are scheduled. Results must come back in task order.
pub fn certify_not_digraph_group_by<R>(p: u32, m: usize, run: R) -> Result<Certificate>
where
    R: FnOnce(&[UnionTask], &(dyn Fn(&UnionTask) -> Result<UnionWitness> + Sync)) -> Vec<Result<UnionWitness>>,
{
    let w = manifest(p).ok_or_else(|| fail("configuration", format!("no witness manifest for p = {p}")))?;
    let f = PrimeModulus::new(p)?;
    let space = VertexSpace::new(m, f)?;
    let partition = SuborbitPartition::new(space);
    let tasks = plan_unions(w)?;
    let check = |t: &UnionTask| check_union(t, &partition);
    let witnesses = run(&tasks, &check).into_iter().collect::<Result<Vec<_>>>()?;
    let r = nontrivial_labels(f).len();
    if witnesses.len() != (1usize << r) - 2 {
        return Err(fail(
            "coverage",
            format!("{} witnesses for rank {}", witnesses.len(), r + 1),
        ));
    }
    let mut kind_counts = BTreeMap::new();
    for wit in &witnesses {
        let key = serde_kind(wit.kind);
        *kind_counts.entry(key.to_string()).or_insert(0) += 1;
    }
    Ok(Certificate::verified(
        claim::NOT_DIGRAPH_GROUP,
        Parameters {
            p: Some(p),
            m: Some(m),
            ..Parameters::default()
        },
        Evidence::NotDigraphGroup(UnionCoverage {
            p,
            m,
            nontrivial_orbitals: r,
            proper_unions: witnesses.len(),
            trivial_unions: ["empty", "full"],
            kind_counts,
            witnesses,
        }),
    ))
}

fn serde_kind(k: WitnessKind) -> &'static str {
    match k {
        WitnessKind::Linear => "linear",
        WitnessKind::Hamming => "hamming",
        WitnessKind::GlGlOnB => "glgl-on-B",
        WitnessKind::ComplementRef => "complement-ref",
    }
}
