//! Config validation and dispatch to the core certificate builders.

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{anyhow, bail, Context};
use rayon::prelude::*;
use serde::Serialize;
use twoclosed_core::certify::{
    certify_not_digraph_group_by, certify_q17, certify_q17_with, certify_two_closed, claim, Certificate, Evidence,
    Parameters, Status,
};
use twoclosed_core::clique::{lemma, verify_clique_axioms, MuConfig, DEFAULT_SEED};
use twoclosed_core::cross_ratio::{verify_lambda_cross_ratios, verify_table1};
use twoclosed_core::group::{nontrivial_labels, rank_of, SuborbitPartition};
use twoclosed_core::obstruction::scan_primes;
use twoclosed_core::witness_table::{manifest, Q17_MUS};
use twoclosed_core::{Error, PrimeModulus, VertexSpace};

use crate::report::{self, Report};
use crate::Format;

pub const DEFAULT_M: usize = 2;
pub const DEFAULT_MAX_PRIME: u64 = 500;
/// Primes covered by `verify cross-ratio-table` when `--p` is absent.
pub const CROSS_RATIO_PRIMES: [u32; 5] = [5, 7, 11, 13, 17];

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Command {
    Rank,
    Suborbits,
    Scan,
    Verify(VerifyTarget),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum VerifyTarget {
    Lemma(String),
    UnionCoverage(u32),
    TwoClosed,
    Q17,
    CrossRatioTable,
    Cliques,
}

impl Command {
    pub fn name(&self) -> String {
        match self {
            Command::Rank => "rank".into(),
            Command::Suborbits => "suborbits".into(),
            Command::Scan => "scan".into(),
            Command::Verify(t) => match t {
                VerifyTarget::Lemma(n) => format!("verify lemma {n}"),
                VerifyTarget::UnionCoverage(p) => format!("verify theorem-q{p}"),
                VerifyTarget::TwoClosed => "verify two-closed".into(),
                VerifyTarget::Q17 => "verify q17".into(),
                VerifyTarget::CrossRatioTable => "verify cross-ratio-table".into(),
                VerifyTarget::Cliques => "verify cliques".into(),
            },
        }
    }
}

#[derive(Clone, Debug)]
pub struct RunConfig {
    pub command: Command,
    pub p: Option<u32>,
    pub m: Option<usize>,
    pub z: Option<usize>,
    pub mus: Option<Vec<u64>>,
    pub max_prime: Option<u64>,
    pub seed: Option<u64>,
    pub jobs: Option<usize>,
    pub format: Format,
    pub output_path: Option<PathBuf>,
    pub timings: bool,
}

/// The result-relevant part of a config with defaults filled in, echoed
/// into the report. Worker count and output destination are left out.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ResolvedConfig {
    pub command: String,
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
    pub seed: u64,
    pub timings: bool,
}

fn require_p(cfg: &RunConfig) -> anyhow::Result<u32> {
    let p = cfg
        .p
        .ok_or_else(|| anyhow!("invalid config: `{}` needs --p", cfg.command.name()))?;
    PrimeModulus::new(p).map_err(|e| anyhow!("invalid config: {e}"))?;
    Ok(p)
}

fn fixed_p(cfg: &RunConfig, p: u32) -> anyhow::Result<u32> {
    match cfg.p {
        Some(q) if q != p => bail!("invalid config: `{}` runs at p = {p}, got --p {q}", cfg.command.name()),
        _ => Ok(p),
    }
}

fn reject(cfg: &RunConfig, flag: &str, present: bool) -> anyhow::Result<()> {
    if present {
        bail!("invalid config: `{}` does not take {flag}", cfg.command.name());
    }
    Ok(())
}

/// Rejects inconsistent flag combinations and fills in defaults.
pub fn resolve(cfg: &RunConfig) -> anyhow::Result<ResolvedConfig> {
    if cfg.jobs == Some(0) {
        bail!("invalid config: --jobs must be at least 1");
    }
    if let (Some(z), Some(mus)) = (cfg.z, &cfg.mus) {
        if z != mus.len() {
            bail!("invalid config: --z {z} but --mu lists {} slopes", mus.len());
        }
    }
    if cfg.z.is_some() && cfg.mus.is_none() {
        bail!("invalid config: --z needs --mu");
    }
    if cfg.m.is_some_and(|m| m < 2) {
        bail!("invalid config: --m must be at least 2");
    }
    let m = Some(cfg.m.unwrap_or(DEFAULT_M));
    let takes_mus = matches!(
        cfg.command,
        Command::Verify(VerifyTarget::Lemma(_) | VerifyTarget::Cliques | VerifyTarget::Q17)
    );
    reject(cfg, "--mu", cfg.mus.is_some() && !takes_mus)?;
    reject(
        cfg,
        "--max-prime",
        cfg.max_prime.is_some() && cfg.command != Command::Scan,
    )?;
    let base = ResolvedConfig {
        command: cfg.command.name(),
        p: None,
        m: None,
        z: None,
        mus: None,
        max_prime: None,
        seed: cfg.seed.unwrap_or(DEFAULT_SEED),
        timings: cfg.timings,
    };
    let with_mus = |p: u32, base: ResolvedConfig| -> anyhow::Result<ResolvedConfig> {
        let mus = match &cfg.mus {
            Some(mus) => mus.clone(),
            None => manifest(p)
                .map(|w| w.two_closed_mus.to_vec())
                .ok_or_else(|| anyhow!("invalid config: no default slopes at p = {p}; pass --mu"))?,
        };
        Ok(ResolvedConfig {
            p: Some(p),
            m,
            z: Some(mus.len()),
            mus: Some(mus),
            ..base
        })
    };
    Ok(match &cfg.command {
        Command::Rank => {
            reject(cfg, "--m", cfg.m.is_some())?;
            ResolvedConfig {
                p: Some(require_p(cfg)?),
                ..base
            }
        }
        Command::Suborbits => ResolvedConfig {
            p: Some(require_p(cfg)?),
            m,
            ..base
        },
        Command::Scan => {
            reject(cfg, "--p", cfg.p.is_some())?;
            ResolvedConfig {
                max_prime: Some(cfg.max_prime.unwrap_or(DEFAULT_MAX_PRIME)),
                ..base
            }
        }
        Command::Verify(VerifyTarget::Lemma(name)) => {
            if !lemma::ALL.contains(&name.as_str()) {
                bail!(
                    "invalid config: unknown lemma `{name}`; expected one of {}",
                    lemma::ALL.join(", ")
                );
            }
            with_mus(require_p(cfg)?, base)?
        }
        Command::Verify(VerifyTarget::Cliques) => with_mus(require_p(cfg)?, base)?,
        Command::Verify(VerifyTarget::UnionCoverage(p)) => ResolvedConfig {
            p: Some(fixed_p(cfg, *p)?),
            m,
            ..base
        },
        Command::Verify(VerifyTarget::TwoClosed) => {
            let p = require_p(cfg)?;
            if manifest(p).is_none() {
                bail!("invalid config: two-closed is certified for p in {{5, 7, 13}}, got {p}");
            }
            ResolvedConfig { p: Some(p), m, ..base }
        }
        Command::Verify(VerifyTarget::Q17) => {
            let mus = cfg.mus.clone().unwrap_or_else(|| Q17_MUS.to_vec());
            ResolvedConfig {
                p: Some(fixed_p(cfg, 17)?),
                m,
                z: Some(mus.len()),
                mus: Some(mus),
                ..base
            }
        }
        Command::Verify(VerifyTarget::CrossRatioTable) => {
            reject(cfg, "--m", cfg.m.is_some())?;
            ResolvedConfig {
                p: cfg.p.map(|_| require_p(cfg)).transpose()?,
                ..base
            }
        }
    })
}

fn params(rc: &ResolvedConfig) -> Parameters {
    Parameters {
        p: rc.p,
        m: rc.m,
        z: rc.z,
        mus: rc.mus.clone(),
        max_prime: rc.max_prime,
        seed: Some(rc.seed),
    }
}

/// Times `f` and turns an error into a refuted certificate.
fn attempt(
    claim: &str,
    parameters: Parameters,
    timings: bool,
    f: impl FnOnce() -> Result<Certificate, Error>,
) -> Certificate {
    let start = Instant::now();
    let mut cert = f().unwrap_or_else(|e| Certificate::refuted(claim, parameters.clone(), &e));
    // Core builders fill only the parameters they use; the echo is uniform.
    cert.parameters = parameters;
    if timings {
        cert.elapsed_ms = start.elapsed().as_millis() as u64;
    }
    cert
}

fn gf(p: u32) -> Result<PrimeModulus, Error> {
    PrimeModulus::new(p)
}

fn rank_cert(p: u32) -> Result<Certificate, Error> {
    let f = gf(p)?;
    let labels = nontrivial_labels(f);
    Ok(Certificate::verified(
        claim::RANK,
        Parameters::default(),
        Evidence::Rank {
            p,
            rank: rank_of(f),
            labels,
        },
    ))
}

fn suborbits_cert(p: u32, m: usize) -> Result<Certificate, Error> {
    let space = VertexSpace::new(m, gf(p)?)?;
    let n = u64::from(space.size());
    let part = SuborbitPartition::new(space);
    let sizes: BTreeMap<String, usize> = part.labels().iter().map(|&l| (l.to_string(), part.size(l))).collect();
    // The partition assigns each vertex one label, so disjointness is by
    // construction; coverage is what can fail.
    let total: u64 = sizes.values().map(|&s| s as u64).sum();
    if total != n || sizes.values().any(|&s| s == 0) {
        return Err(Error::CertificationFailed(format!(
            "suborbit sizes sum to {total}, expected {n}"
        )));
    }
    Ok(Certificate::verified(
        claim::SUBORBITS,
        Parameters::default(),
        Evidence::Suborbits { p, m, sizes, total },
    ))
}

fn cliques_cert(rc: &ResolvedConfig, only: Option<&str>) -> Result<Certificate, Error> {
    let p = rc.p.expect("resolved");
    let cfg = MuConfig::from_values(rc.mus.as_deref().expect("resolved"), rc.m.expect("resolved"), gf(p)?)?;
    let mut report = verify_clique_axioms(&cfg, rc.seed)?;
    let mut status = Status::Verified;
    if let Some(name) = only {
        report.lemmas.retain(|l| l.lemma == name);
        if name != lemma::CENSUS {
            report.census = None;
        }
        if report.lemmas.is_empty() {
            status = Status::Skipped;
        }
    }
    let claim = match only {
        Some(name) => format!("lemma:{name}"),
        None => claim::CLIQUES.to_string(),
    };
    let mut cert = Certificate::verified(claim, Parameters::default(), Evidence::CliqueAxioms(report));
    cert.status = status;
    Ok(cert)
}

fn cross_ratio_cert(p: u32) -> Result<Certificate, Error> {
    let f = gf(p)?;
    let table = verify_table1(f)?;
    let lambda = vec![verify_lambda_cross_ratios(f)?];
    Ok(Certificate::verified(
        claim::CROSS_RATIO,
        Parameters::default(),
        Evidence::CrossRatio { table, lambda },
    ))
}

fn scan_cert(max_prime: u64) -> Result<Certificate, Error> {
    Ok(Certificate::verified(
        claim::SCAN,
        Parameters::default(),
        Evidence::Scan(scan_primes(max_prime)?),
    ))
}

fn dispatch(rc: &ResolvedConfig, command: &Command) -> Vec<Certificate> {
    let t = rc.timings;
    let p = rc.p.unwrap_or(0);
    let m = rc.m.unwrap_or(DEFAULT_M);
    match command {
        Command::Rank => vec![attempt(claim::RANK, params(rc), t, || rank_cert(p))],
        Command::Suborbits => vec![attempt(claim::SUBORBITS, params(rc), t, || suborbits_cert(p, m))],
        Command::Scan => {
            let max = rc.max_prime.expect("resolved");
            vec![attempt(claim::SCAN, params(rc), t, || scan_cert(max))]
        }
        Command::Verify(target) => match target {
            VerifyTarget::Lemma(name) => {
                let claim = format!("lemma:{name}");
                vec![attempt(&claim, params(rc), t, || cliques_cert(rc, Some(name)))]
            }
            VerifyTarget::Cliques => vec![attempt(claim::CLIQUES, params(rc), t, || cliques_cert(rc, None))],
            VerifyTarget::UnionCoverage(_) => vec![attempt(claim::NOT_DIGRAPH_GROUP, params(rc), t, || {
                certify_not_digraph_group_by(p, m, |tasks, check| tasks.par_iter().map(check).collect())
            })],
            VerifyTarget::TwoClosed => {
                vec![attempt(claim::TWO_CLOSED, params(rc), t, || {
                    certify_two_closed(p, m, rc.seed)
                })]
            }
            VerifyTarget::Q17 => vec![attempt(claim::Q17, params(rc), t, || match &rc.mus {
                Some(mus) if mus[..] != Q17_MUS[..] => certify_q17_with(mus, m, rc.seed),
                _ => certify_q17(m, rc.seed),
            })],
            VerifyTarget::CrossRatioTable => {
                let primes: Vec<u32> = match rc.p {
                    Some(p) => vec![p],
                    None => CROSS_RATIO_PRIMES.to_vec(),
                };
                primes
                    .par_iter()
                    .map(|&q| {
                        let pr = Parameters {
                            p: Some(q),
                            ..params(rc)
                        };
                        attempt(claim::CROSS_RATIO, pr, t, || cross_ratio_cert(q))
                    })
                    .collect()
            }
        },
    }
}

/// Validates, runs, writes the report and maps the outcome to an exit code:
/// 0 when every certificate verified, 1 otherwise. Config errors surface as
/// `Err` and are mapped to 2 by the caller.
pub fn run(cfg: &RunConfig) -> anyhow::Result<ExitCode> {
    let rc = resolve(cfg)?;
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(j) = cfg.jobs {
        builder = builder.num_threads(j);
    }
    let pool = builder.build().context("building worker pool")?;
    let certs = pool.install(|| dispatch(&rc, &cfg.command));
    let report = Report::new(&rc, certs);
    let doc = match cfg.format {
        Format::Json => report::to_json(&report)?,
        Format::Text => report::to_text(&report),
    };
    match &cfg.output_path {
        Some(path) => std::fs::write(path, &doc).with_context(|| format!("writing {}", path.display()))?,
        None => print!("{doc}"),
    }
    match report.first_failure() {
        None => Ok(ExitCode::SUCCESS),
        Some(c) => {
            eprintln!("not verified: {} ({})", c.claim, report::status_name(c.status));
            Ok(ExitCode::from(1))
        }
    }
}
