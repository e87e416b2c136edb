//! Cross-ratios on the projective line PG(1,p) and how they move when the
//! four points are reordered.
//!
//! The parameter `λ` names the point `⟨e1 + λ e2⟩` and `∞` names `⟨e2⟩`.
//! Differences `C - A` are evaluated as determinants of spanning vectors, so
//! the conventions for `∞` need no case split.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::{Fp, PrimeModulus};
use crate::group::d8_elements;
use crate::matrix::Matrix;
use crate::tensor::ProjPoint;

/// A point of PG(1,p) by parameter.
pub type ProjValue = ProjPoint;

/// Four pairwise-distinct points `(P, Q, R, S)`.
pub type ProjQuad = [ProjValue; 4];

/// Images `σ(P), σ(Q), σ(R), σ(S)` as indices 0..4.
pub type LabelPerm = [u8; 4];

const LABELS: [char; 4] = ['P', 'Q', 'R', 'S'];

fn det(a: ProjValue, b: ProjValue, p: PrimeModulus) -> Fp {
    let (u, v) = (a.vector(p), b.vector(p));
    u[0] * v[1] - u[1] * v[0]
}

fn ratio(num: Fp, den: Fp) -> ProjValue {
    match den.inv() {
        Ok(inv) => ProjPoint::Finite(num * inv),
        Err(_) => ProjPoint::Infinity,
    }
}

/// `((C - A)(D - B)) / ((C - B)(D - A))`.
pub fn cross_ratio(q: ProjQuad, p: PrimeModulus) -> Result<ProjValue> {
    for i in 0..4 {
        for j in i + 1..4 {
            if q[i] == q[j] {
                return Err(Error::DegenerateQuad);
            }
        }
    }
    let [a, b, c, d] = q;
    Ok(ratio(det(a, c, p) * det(b, d, p), det(b, c, p) * det(a, d, p)))
}

/// The six values a cross-ratio takes under reordering.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum CrossRatioFormula {
    #[serde(rename = "r")]
    Same,
    #[serde(rename = "r/(r-1)")]
    ROverRMinusOne,
    #[serde(rename = "1-r")]
    OneMinusR,
    #[serde(rename = "1/r")]
    Reciprocal,
    #[serde(rename = "1/(1-r)")]
    OneOverOneMinusR,
    #[serde(rename = "(r-1)/r")]
    RMinusOneOverR,
}

impl CrossRatioFormula {
    pub const ALL: [CrossRatioFormula; 6] = [
        CrossRatioFormula::Same,
        CrossRatioFormula::ROverRMinusOne,
        CrossRatioFormula::OneMinusR,
        CrossRatioFormula::Reciprocal,
        CrossRatioFormula::OneOverOneMinusR,
        CrossRatioFormula::RMinusOneOverR,
    ];

    /// Evaluates at a finite `r`; a vanishing denominator gives `∞`.
    pub fn eval(self, r: Fp) -> ProjValue {
        let one = r.modulus().one();
        match self {
            CrossRatioFormula::Same => ProjPoint::Finite(r),
            CrossRatioFormula::ROverRMinusOne => ratio(r, r - one),
            CrossRatioFormula::OneMinusR => ProjPoint::Finite(one - r),
            CrossRatioFormula::Reciprocal => ratio(one, r),
            CrossRatioFormula::OneOverOneMinusR => ratio(one, one - r),
            CrossRatioFormula::RMinusOneOverR => ratio(r - one, r),
        }
    }
}

/// Reordering table as cycle notation, one row per resulting formula.
const TABLE1: [(CrossRatioFormula, [&str; 4]); 6] = [
    (CrossRatioFormula::Same, ["()", "(PQ)(RS)", "(PR)(QS)", "(PS)(QR)"]),
    (CrossRatioFormula::ROverRMinusOne, ["(PR)", "(QS)", "(PQRS)", "(PSRQ)"]),
    (CrossRatioFormula::OneMinusR, ["(PS)", "(QR)", "(PQSR)", "(PRSQ)"]),
    (CrossRatioFormula::Reciprocal, ["(PQ)", "(RS)", "(PRQS)", "(PSQR)"]),
    (
        CrossRatioFormula::OneOverOneMinusR,
        ["(PQS)", "(PRQ)", "(PSR)", "(QRS)"],
    ),
    (CrossRatioFormula::RMinusOneOverR, ["(PQR)", "(PRS)", "(PSQ)", "(QSR)"]),
];

/// Parses products of disjoint cycles over `P, Q, R, S`.
pub fn parse_cycles(s: &str) -> Result<LabelPerm> {
    let bad = || Error::TableViolation(format!("malformed cycle notation `{s}`"));
    let mut perm: LabelPerm = [0, 1, 2, 3];
    let mut used = [false; 4];
    let mut rest = s.trim();
    while !rest.is_empty() {
        let body = rest.strip_prefix('(').ok_or_else(bad)?;
        let close = body.find(')').ok_or_else(bad)?;
        let cycle: Vec<u8> = body[..close]
            .chars()
            .map(|c| LABELS.iter().position(|&l| l == c).map(|i| i as u8))
            .collect::<Option<_>>()
            .ok_or_else(bad)?;
        for (k, &from) in cycle.iter().enumerate() {
            if core::mem::replace(&mut used[from as usize], true) {
                return Err(bad());
            }
            perm[from as usize] = cycle[(k + 1) % cycle.len()];
        }
        rest = body[close + 1..].trim_start();
    }
    Ok(perm)
}

pub fn format_cycles(perm: LabelPerm) -> String {
    let mut out = String::new();
    let mut seen = [false; 4];
    for start in 0..4u8 {
        if seen[start as usize] || perm[start as usize] == start {
            continue;
        }
        out.push('(');
        let mut k = start;
        while !seen[k as usize] {
            seen[k as usize] = true;
            out.push(LABELS[k as usize]);
            k = perm[k as usize];
        }
        out.push(')');
    }
    if out.is_empty() {
        out.push_str("()");
    }
    out
}

/// All 24 permutations in lexicographic order of their image arrays.
pub fn all_perms() -> Vec<LabelPerm> {
    let mut out = Vec::with_capacity(24);
    for a in 0..4u8 {
        for b in (0..4u8).filter(|&b| b != a) {
            for c in (0..4u8).filter(|&c| c != a && c != b) {
                let d = 6 - a - b - c;
                out.push([a, b, c, d]);
            }
        }
    }
    out
}

/// Reordering by `σ` and then by `τ`, as a single reordering.
pub fn compose(sigma: LabelPerm, tau: LabelPerm) -> LabelPerm {
    tau.map(|k| sigma[k as usize])
}

/// Lookup from permutation to formula, checked for coverage and against
/// the two generating identities: transpositions `(PQ)` and `(PS)` give
/// `1/r` and `1 - r`, and the lookup respects composition.
#[derive(Clone, Debug)]
pub struct Table1 {
    rows: Vec<(LabelPerm, CrossRatioFormula)>,
}

impl Table1 {
    pub fn build() -> Result<Self> {
        let mut rows = Vec::with_capacity(24);
        for (formula, cycles) in TABLE1 {
            for c in cycles {
                rows.push((parse_cycles(c)?, formula));
            }
        }
        rows.sort();
        let perms: Vec<LabelPerm> = rows.iter().map(|(s, _)| *s).collect();
        if perms != all_perms() {
            return Err(Error::TableViolation(
                "rows do not cover the 24 permutations exactly once".into(),
            ));
        }
        let table = Self { rows };
        if table.formula(parse_cycles("(PQ)")?) != CrossRatioFormula::Reciprocal
            || table.formula(parse_cycles("(PS)")?) != CrossRatioFormula::OneMinusR
        {
            return Err(Error::TableViolation("generator rows disagree".into()));
        }
        // Composition check at a generic point of a field large enough that
        // the six values are distinct.
        let big = PrimeModulus::new(101).expect("prime");
        let r = big.elem(7);
        for (s, fs) in &table.rows {
            for (t, ft) in &table.rows {
                let f = table.formula(compose(*s, *t));
                let via = match fs.eval(r) {
                    ProjPoint::Finite(v) => ft.eval(v),
                    ProjPoint::Infinity => ProjPoint::Infinity,
                };
                if f.eval(r) != via {
                    return Err(Error::TableViolation(format!(
                        "{} then {} is not {f:?}",
                        format_cycles(*s),
                        format_cycles(*t)
                    )));
                }
            }
        }
        Ok(table)
    }

    pub fn formula(&self, sigma: LabelPerm) -> CrossRatioFormula {
        self.rows
            .iter()
            .find(|(s, _)| *s == sigma)
            .map(|(_, f)| *f)
            .expect("table covers every permutation")
    }

    pub fn rows(&self) -> &[(LabelPerm, CrossRatioFormula)] {
        &self.rows
    }
}

/// The cross-ratio of `(σ(P), σ(Q); σ(R), σ(S))` in terms of `r`.
pub fn permuted_cross_ratio(sigma: LabelPerm, r: ProjValue) -> Result<ProjValue> {
    let ProjPoint::Finite(v) = r else {
        return Err(Error::TableViolation("r must be finite".into()));
    };
    Ok(Table1::build()?.formula(sigma).eval(v))
}

pub fn permute_quad(q: ProjQuad, sigma: LabelPerm) -> ProjQuad {
    sigma.map(|k| q[k as usize])
}

pub fn klein_four_classifier(sigma: LabelPerm) -> bool {
    ["()", "(PQ)(RS)", "(PR)(QS)", "(PS)(QR)"]
        .iter()
        .any(|c| parse_cycles(c).expect("static notation") == sigma)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Table1Report {
    pub p: u32,
    pub quads: u64,
    pub permutations: u32,
    pub checks: u64,
}

/// Every ordered quadruple of distinct points under all 24 reorderings.
pub fn verify_table1(p: PrimeModulus) -> Result<Table1Report> {
    if p.get() < 5 {
        return Err(Error::DegenerateConfig("the reordering table needs p >= 5".into()));
    }
    let table = Table1::build()?;
    let points: Vec<ProjValue> = p
        .elements()
        .map(ProjPoint::Finite)
        .chain([ProjPoint::Infinity])
        .collect();
    let (mut quads, mut checks) = (0u64, 0u64);
    for &a in &points {
        for &b in points.iter().filter(|&&b| b != a) {
            for &c in points.iter().filter(|&&c| c != a && c != b) {
                for &d in points.iter().filter(|&&d| d != a && d != b && d != c) {
                    let q = [a, b, c, d];
                    let ProjPoint::Finite(r) = cross_ratio(q, p)? else {
                        return Err(Error::TableViolation(format!("infinite cross-ratio for {q:?}")));
                    };
                    for (sigma, formula) in table.rows() {
                        let direct = cross_ratio(permute_quad(q, *sigma), p)?;
                        if direct != formula.eval(r) {
                            return Err(Error::TableViolation(format!(
                                "{} on ({a}, {b}, {c}, {d}) over GF({p}): got {direct}, table says {}",
                                format_cycles(*sigma),
                                formula.eval(r)
                            )));
                        }
                        checks += 1;
                    }
                    quads += 1;
                }
            }
        }
    }
    Ok(Table1Report {
        p: p.get(),
        quads,
        permutations: 24,
        checks,
    })
}

/// `(λ, -λ, λ⁻¹, -λ⁻¹)`, defined when `λ⁴ ∉ {0, 1}`.
pub fn lambda_quad(l: Fp) -> Result<ProjQuad> {
    let l4 = l.pow(4);
    if l4.is_zero() || l4.value() == 1 {
        return Err(Error::DegenerateLambda);
    }
    let inv = l.inv()?;
    Ok([l, -l, inv, -inv].map(ProjPoint::Finite))
}

/// `(λ² - 1)² / (λ² + 1)²`.
pub fn lambda_cross_ratio(l: Fp) -> Result<Fp> {
    lambda_quad(l)?;
    let one = l.modulus().one();
    let s = l * l;
    let num = (s - one) * (s - one);
    let den = (s + one) * (s + one);
    Ok(num * den.inv()?)
}

/// The collineations inducing each Klein-four reordering of
/// `(λ, -λ, λ⁻¹, -λ⁻¹)`.
pub fn klein_four_collineations(p: PrimeModulus) -> [(LabelPerm, Matrix); 4] {
    let perm = |s: &str| parse_cycles(s).expect("static notation");
    [
        (perm("()"), Matrix::from_rows(p, &[[1, 0], [0, 1]])),
        (perm("(PQ)(RS)"), Matrix::from_rows(p, &[[1, 0], [0, -1]])),
        (perm("(PR)(QS)"), Matrix::from_rows(p, &[[0, 1], [1, 0]])),
        (perm("(PS)(QR)"), Matrix::from_rows(p, &[[0, -1], [1, 0]])),
    ]
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LambdaCrossRatioReport {
    pub p: u32,
    pub lambdas_checked: u32,
    pub collineation_rows_checked: u32,
}

/// For every admissible λ: the closed form for `r(λ)` matches the direct
/// cross-ratio, and each Klein-four collineation lies in D₈ and induces its
/// reordering.
pub fn verify_lambda_cross_ratios(p: PrimeModulus) -> Result<LambdaCrossRatioReport> {
    let d8 = d8_elements(p);
    let rows = klein_four_collineations(p);
    for (sigma, m) in &rows {
        if !d8.contains(m) || !klein_four_classifier(*sigma) {
            return Err(Error::TableViolation(format!(
                "{m:?} is not a Klein-four collineation in D8"
            )));
        }
    }
    let (mut lambdas, mut row_checks) = (0u32, 0u32);
    for l in p.units() {
        let Ok(quad) = lambda_quad(l) else { continue };
        let direct = cross_ratio(quad, p)?;
        if direct != ProjPoint::Finite(lambda_cross_ratio(l)?) {
            return Err(Error::TableViolation(format!(
                "closed form fails at lambda = {l} over GF({p})"
            )));
        }
        for (sigma, m) in &rows {
            let moved = quad.map(|pt| pt.apply(m));
            if moved != permute_quad(quad, *sigma) {
                return Err(Error::TableViolation(format!(
                    "{m:?} does not induce {} at lambda = {l}",
                    format_cycles(*sigma)
                )));
            }
            row_checks += 1;
        }
        lambdas += 1;
    }
    Ok(LambdaCrossRatioReport {
        p: p.get(),
        lambdas_checked: lambdas,
        collineation_rows_checked: row_checks,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn gf(p: u32) -> PrimeModulus {
        PrimeModulus::new(p).unwrap()
    }

    fn fin(p: PrimeModulus, v: u64) -> ProjValue {
        ProjPoint::Finite(p.elem(v))
    }

    // Textbook evaluation with the limit convention spelled out, as an
    // independent oracle for finite-or-infinite parameters.
    fn oracle(q: [Option<u64>; 4], p: u32) -> Option<u64> {
        let pm = u64::from(p);
        let diff = |x: Option<u64>, y: Option<u64>| -> Option<u64> {
            match (x, y) {
                (Some(x), Some(y)) => Some((x + pm - y) % pm),
                _ => None,
            }
        };
        let [a, b, c, d] = q;
        let factors = [diff(c, a), diff(d, b), diff(c, b), diff(d, a)];
        // A factor containing ∞ cancels against its partner with the same ∞.
        let (mut num, mut den) = (1u64, 1u64);
        for (k, f) in factors.iter().enumerate() {
            if let Some(v) = f {
                if k < 2 {
                    num = num * v % pm;
                } else {
                    den = den * v % pm;
                }
            }
        }
        if den == 0 {
            return None;
        }
        let inv = (1..pm).find(|i| den * i % pm == 1).unwrap();
        Some(num * inv % pm)
    }

    #[test]
    fn examples() {
        let p = gf(7);
        assert_eq!(
            cross_ratio([fin(p, 0), fin(p, 1), fin(p, 2), fin(p, 3)], p).unwrap(),
            fin(p, 6)
        );
        for t in 2..7 {
            let q = [ProjPoint::Infinity, fin(p, 0), fin(p, 1), fin(p, t)];
            assert_eq!(cross_ratio(q, p).unwrap(), fin(p, t));
        }
        assert_eq!(
            cross_ratio([fin(p, 1), fin(p, 1), fin(p, 2), fin(p, 3)], p),
            Err(Error::DegenerateQuad)
        );
    }

    #[test]
    fn matches_limit_convention_oracle_at_p11() {
        let p = gf(11);
        let pts: Vec<Option<u64>> = (0..11).map(Some).chain([None]).collect();
        let to_pv = |x: Option<u64>| x.map_or(ProjPoint::Infinity, |v| fin(p, v));
        for &a in &pts {
            for &b in &pts {
                for &c in &pts {
                    for &d in &pts {
                        let q = [a, b, c, d];
                        if (0..4).any(|i| (i + 1..4).any(|j| q[i] == q[j])) {
                            continue;
                        }
                        let got = cross_ratio(q.map(to_pv), p).unwrap();
                        assert_eq!(got, to_pv(oracle(q, 11)), "{q:?}");
                    }
                }
            }
        }
    }

    #[test]
    fn table_lookup_examples() {
        let p = gf(13);
        let r = fin(p, 5);
        let id = parse_cycles("()").unwrap();
        assert_eq!(permuted_cross_ratio(id, r).unwrap(), r);
        let pq = parse_cycles("(PQ)").unwrap();
        assert_eq!(
            permuted_cross_ratio(pq, r).unwrap(),
            ProjPoint::Finite(p.elem(5).inv().unwrap())
        );
        let pqs = parse_cycles("(PQS)").unwrap();
        assert_eq!(
            permuted_cross_ratio(pqs, r).unwrap(),
            ProjPoint::Finite((p.one() - p.elem(5)).inv().unwrap())
        );
    }

    #[test]
    fn composition_matches_repeated_reordering() {
        let p = gf(7);
        let q = [fin(p, 0), fin(p, 1), fin(p, 2), ProjPoint::Infinity];
        for s in all_perms() {
            for t in all_perms() {
                assert_eq!(permute_quad(permute_quad(q, s), t), permute_quad(q, compose(s, t)));
            }
        }
    }

    #[test]
    fn cycle_notation_roundtrip() {
        for s in all_perms() {
            assert_eq!(parse_cycles(&format_cycles(s)).unwrap(), s);
        }
        assert_eq!(parse_cycles("(PQS)").unwrap(), [1, 3, 2, 0]);
        assert!(parse_cycles("(PP)").is_err());
        assert!(parse_cycles("(PX)").is_err());
    }

    #[test]
    fn klein_four_members() {
        let v4: Vec<LabelPerm> = all_perms().into_iter().filter(|s| klein_four_classifier(*s)).collect();
        assert_eq!(v4.len(), 4);
        assert!(klein_four_classifier([0, 1, 2, 3]));
        assert!(klein_four_classifier(parse_cycles("(PQ)(RS)").unwrap()));
        assert!(!klein_four_classifier(parse_cycles("(PQ)").unwrap()));
        // V₄ is exactly the set of reorderings fixing every cross-ratio.
        let table = Table1::build().unwrap();
        for s in all_perms() {
            assert_eq!(klein_four_classifier(s), table.formula(s) == CrossRatioFormula::Same);
        }
    }

    #[test]
    fn table1_exhaustive() {
        for q in [5, 7, 11, 13] {
            let report = verify_table1(gf(q)).unwrap();
            let n = u64::from(q) + 1;
            assert_eq!(report.quads, n * (n - 1) * (n - 2) * (n - 3));
            assert_eq!(report.checks, report.quads * 24);
        }
        assert_eq!(verify_table1(gf(5)).unwrap().quads, 360);
    }

    #[test]
    fn lambda_closed_form_and_collineations() {
        for q in [5, 7, 13, 17] {
            let report = verify_lambda_cross_ratios(gf(q)).unwrap();
            let admissible = (1..q).filter(|l| {
                let l4 = (u64::from(*l).pow(4)) % u64::from(q);
                l4 != 1
            });
            assert_eq!(report.lambdas_checked as usize, admissible.count());
        }
        assert_eq!(lambda_quad(gf(5).elem(2)), Err(Error::DegenerateLambda));
    }

    #[test]
    fn projectivities_preserve_cross_ratio() {
        let p = gf(13);
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let pts: Vec<ProjValue> = p
            .elements()
            .map(ProjPoint::Finite)
            .chain([ProjPoint::Infinity])
            .collect();
        let mut done = 0;
        while done < 1000 {
            let q: ProjQuad = [0; 4].map(|_| pts[rng.gen_range(0..pts.len())]);
            let Ok(r) = cross_ratio(q, p) else { continue };
            let e = (0..4).map(|_| p.elem(rng.gen_range(0..13))).collect();
            let a = Matrix::new(2, 2, e, p).unwrap();
            if !a.is_invertible() {
                continue;
            }
            assert_eq!(cross_ratio(q.map(|x| x.apply(&a)), p).unwrap(), r);
            done += 1;
        }
    }

    #[test]
    fn six_value_orbit() {
        let p = gf(17);
        for v in 2..17 {
            let mut orbit = alloc::collections::BTreeSet::from([v as u32]);
            let mut frontier = alloc::vec![p.elem(v)];
            while let Some(r) = frontier.pop() {
                for f in [CrossRatioFormula::Reciprocal, CrossRatioFormula::OneMinusR] {
                    if let ProjPoint::Finite(s) = f.eval(r) {
                        if s.value() > 1 && orbit.insert(s.value()) {
                            frontier.push(s);
                        }
                    }
                }
            }
            assert!(orbit.len() <= 6);
            let table_values: alloc::collections::BTreeSet<u32> = CrossRatioFormula::ALL
                .iter()
                .filter_map(|f| f.eval(p.elem(v)).finite().map(|x| x.value()))
                .collect();
            assert_eq!(orbit, table_values);
        }
    }
}
