//! The point stabilizer G₀ = D₈∘GL(m,p), the affine group built on it, and
//! the classification of V⊗W into G₀-orbits.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::{Fp, PrimeModulus};
use crate::matrix::Matrix;
use crate::tensor::{tensor_apply, IndexAction, ProjPoint, Tensor, VertexSpace};

/// The dihedral group of order 8 generated by `diag(1, -1)` and the
/// coordinate swap. Elements are kept in a fixed sorted order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct D8Group {
    elements: Vec<Matrix>,
    modulus: PrimeModulus,
}

impl D8Group {
    pub fn generators(p: PrimeModulus) -> [Matrix; 2] {
        [
            Matrix::from_rows(p, &[[1, 0], [0, -1]]),
            Matrix::from_rows(p, &[[0, 1], [1, 0]]),
        ]
    }

    pub fn elements(&self) -> &[Matrix] {
        &self.elements
    }

    pub fn modulus(&self) -> PrimeModulus {
        self.modulus
    }

    pub fn contains(&self, a: &Matrix) -> bool {
        self.elements.contains(a)
    }

    /// True iff `a` is a nonzero scalar multiple of an element, i.e. `A∘B`
    /// lies in G₀ for every B.
    pub fn contains_up_to_scalar(&self, a: &Matrix) -> bool {
        self.scalar_witness(a).is_some()
    }

    /// `(k, M)` with `a = k·M` and `M ∈ D₈`.
    pub fn scalar_witness(&self, a: &Matrix) -> Option<(Fp, &Matrix)> {
        self.elements.iter().find_map(|m| scalar_ratio(a, m).map(|k| (k, m)))
    }
}

/// `k` with `a = k·b`, if one exists and is nonzero.
fn scalar_ratio(a: &Matrix, b: &Matrix) -> Option<Fp> {
    let pos = b.entries().iter().position(|e| !e.is_zero())?;
    let k = a.entries()[pos] * b.entries()[pos].inv().ok()?;
    if k.is_zero() {
        return None;
    }
    a.entries()
        .iter()
        .zip(b.entries())
        .all(|(&x, &y)| x == k * y)
        .then_some(k)
}

pub fn d8_elements(p: PrimeModulus) -> D8Group {
    let gens = D8Group::generators(p);
    let mut elements = vec![Matrix::identity(2, p)];
    let mut frontier = elements.clone();
    while let Some(g) = frontier.pop() {
        for h in &gens {
            let prod = g.mul(h).expect("2x2 matrices over one field");
            if !elements.contains(&prod) {
                elements.push(prod.clone());
                frontier.push(prod);
            }
        }
    }
    elements.sort_by_key(Matrix::to_rows);
    D8Group { elements, modulus: p }
}

/// Simultaneous D₈-orbit of a tuple of row vectors in V.
pub fn orbit_under_d8(p: PrimeModulus, vectors: &[[Fp; 2]]) -> Vec<Vec<[Fp; 2]>> {
    let d8 = d8_elements(p);
    let mut orbit: Vec<Vec<[Fp; 2]>> = d8
        .elements()
        .iter()
        .map(|m| {
            vectors
                .iter()
                .map(|v| {
                    let img = m.left_apply(v).expect("length 2");
                    [img[0], img[1]]
                })
                .collect()
        })
        .collect();
    orbit.sort_by_key(|t: &Vec<[Fp; 2]>| t.iter().map(|v| (v[0].value(), v[1].value())).collect::<Vec<_>>());
    orbit.dedup();
    orbit
}

/// An invertible pair `(A, B)` acting as `A∘B`, compared up to
/// `(A, B) ~ (kA, k⁻¹B)`.
#[derive(Clone, Debug, Serialize)]
pub struct LinPart {
    a: Matrix,
    b: Matrix,
}

impl LinPart {
    pub fn new(a: Matrix, b: Matrix) -> Result<Self> {
        if a.rows() != 2 || a.cols() != 2 || !b.is_square() || b.rows() < 2 {
            return Err(Error::DimensionMismatch("A must be 2x2 and B square with m >= 2"));
        }
        if a.modulus() != b.modulus() {
            return Err(Error::ModulusMismatch);
        }
        if !a.is_invertible() || !b.is_invertible() {
            return Err(Error::Singular);
        }
        Ok(Self { a, b })
    }

    /// `A∘I`.
    pub fn on_v(a: Matrix, m: usize) -> Result<Self> {
        let p = a.modulus();
        Self::new(a, Matrix::identity(m, p))
    }

    pub fn identity(m: usize, p: PrimeModulus) -> Self {
        Self {
            a: Matrix::identity(2, p),
            b: Matrix::identity(m, p),
        }
    }

    pub fn a(&self) -> &Matrix {
        &self.a
    }

    pub fn b(&self) -> &Matrix {
        &self.b
    }

    pub fn m(&self) -> usize {
        self.b.rows()
    }

    pub fn modulus(&self) -> PrimeModulus {
        self.a.modulus()
    }

    pub fn apply(&self, x: &Tensor) -> Result<Tensor> {
        tensor_apply(&self.a, &self.b, x)
    }

    pub fn index_action(&self, space: VertexSpace) -> Result<IndexAction> {
        IndexAction::new(space, &self.a, &self.b)
    }

    /// `self` followed by `other`.
    pub fn then(&self, other: &LinPart) -> Result<LinPart> {
        LinPart::new(self.a.mul(&other.a)?, self.b.mul(&other.b)?)
    }

    pub fn inverse(&self) -> Result<LinPart> {
        LinPart::new(self.a.inv()?, self.b.inv()?)
    }
}

impl PartialEq for LinPart {
    fn eq(&self, other: &Self) -> bool {
        if self.m() != other.m() || self.modulus() != other.modulus() {
            return false;
        }
        match scalar_ratio(&self.a, &other.a) {
            Some(k) => {
                let k_inv = k.inv().expect("ratio is nonzero");
                self.b == other.b.scale(k_inv)
            }
            None => false,
        }
    }
}

impl Eq for LinPart {}

/// `x ↦ x^(A∘B) + translation`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AffineElem {
    pub translation: Tensor,
    pub linear: LinPart,
}

impl AffineElem {
    pub fn new(translation: Tensor, linear: LinPart) -> Result<Self> {
        if translation.m() != linear.m() || translation.modulus() != linear.modulus() {
            return Err(Error::DimensionMismatch("translation and linear part disagree"));
        }
        Ok(Self { translation, linear })
    }

    pub fn apply(&self, x: &Tensor) -> Result<Tensor> {
        Ok(self.linear.apply(x)?.add(&self.translation))
    }

    /// Membership in G(m,p): the linear part must lie in G₀.
    pub fn in_group(&self) -> bool {
        g0_contains(&self.linear)
    }
}

pub fn g0_contains(lin: &LinPart) -> bool {
    d8_elements(lin.modulus()).contains_up_to_scalar(lin.a())
}

/// A G₀-orbit on V⊗W. `Lambda` always carries the canonical representative.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum SuborbitLabel {
    Zero,
    A,
    B,
    Lambda(Fp),
}

impl SuborbitLabel {
    pub fn lambda(l: Fp) -> Result<Self> {
        Ok(SuborbitLabel::Lambda(canonical_lambda(l)?))
    }

    /// Parses `zero`, `A`, `B` or `L<k>`.
    pub fn parse(s: &str, p: PrimeModulus) -> Result<Self> {
        match s {
            "zero" => Ok(SuborbitLabel::Zero),
            "A" => Ok(SuborbitLabel::A),
            "B" => Ok(SuborbitLabel::B),
            _ => {
                let k: u64 = s
                    .strip_prefix('L')
                    .and_then(|d| d.parse().ok())
                    .filter(|&k| k > 0 && k < u64::from(p.get()))
                    .ok_or_else(|| Error::InvalidLabel(s.to_string()))?;
                SuborbitLabel::lambda(p.elem(k))
            }
        }
    }

    fn sort_key(&self) -> (u8, u32) {
        match self {
            SuborbitLabel::Zero => (0, 0),
            SuborbitLabel::A => (1, 0),
            SuborbitLabel::B => (2, 0),
            SuborbitLabel::Lambda(l) => (3, l.value()),
        }
    }
}

impl PartialOrd for SuborbitLabel {
    fn partial_cmp(&self, other: &Self) -> Option<core::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for SuborbitLabel {
    fn cmp(&self, other: &Self) -> core::cmp::Ordering {
        self.sort_key().cmp(&other.sort_key())
    }
}

impl fmt::Display for SuborbitLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SuborbitLabel::Zero => f.write_str("zero"),
            SuborbitLabel::A => f.write_str("A"),
            SuborbitLabel::B => f.write_str("B"),
            SuborbitLabel::Lambda(l) => write!(f, "L{l}"),
        }
    }
}

impl Serialize for SuborbitLabel {
    fn serialize<S: serde::Serializer>(&self, s: S) -> core::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// Comma-joined labels, e.g. `A,L1`.
pub fn format_labels(labels: &[SuborbitLabel]) -> String {
    labels.iter().map(|l| l.to_string()).collect::<Vec<_>>().join(",")
}

/// Sorted `{λ, -λ, λ⁻¹, -λ⁻¹}`.
pub fn lambda_class(l: Fp) -> Vec<Fp> {
    let inv = l.inv().expect("lambda is nonzero");
    let set: BTreeSet<u32> = [l, -l, inv, -inv].iter().map(|e| e.value()).collect();
    set.into_iter().map(|v| l.modulus().elem(u64::from(v))).collect()
}

pub fn canonical_lambda(l: Fp) -> Result<Fp> {
    if l.is_zero() {
        return Err(Error::ZeroLambda);
    }
    Ok(lambda_class(l)[0])
}

/// One cell `{±λ, ±λ⁻¹}` of the partition of the nonzero residues.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LambdaClass {
    pub key: Fp,
    pub members: Vec<Fp>,
}

pub fn lambda_classes(p: PrimeModulus) -> Vec<LambdaClass> {
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for l in p.units() {
        if seen.contains(&l.value()) {
            continue;
        }
        let members = lambda_class(l);
        seen.extend(members.iter().map(|e| e.value()));
        out.push(LambdaClass {
            key: members[0],
            members,
        });
    }
    out
}

pub fn rank_of(p: PrimeModulus) -> usize {
    3 + lambda_classes(p).len()
}

/// Every nontrivial label in order `A, B, L..`.
pub fn nontrivial_labels(p: PrimeModulus) -> Vec<SuborbitLabel> {
    let mut out = vec![SuborbitLabel::A, SuborbitLabel::B];
    out.extend(lambda_classes(p).into_iter().map(|c| SuborbitLabel::Lambda(c.key)));
    out
}

pub fn classify_tensor(x: &Tensor) -> SuborbitLabel {
    if x.is_zero() {
        return SuborbitLabel::Zero;
    }
    match x.direction().expect("nonzero tensor") {
        None => SuborbitLabel::B,
        Some(ProjPoint::Infinity) => SuborbitLabel::A,
        Some(ProjPoint::Finite(mu)) if mu.is_zero() => SuborbitLabel::A,
        Some(ProjPoint::Finite(mu)) => SuborbitLabel::Lambda(canonical_lambda(mu).expect("nonzero slope")),
    }
}

/// The directions whose punctured m-spaces make up a simple-tensor suborbit.
pub fn label_directions(label: SuborbitLabel, p: PrimeModulus) -> Vec<ProjPoint> {
    match label {
        SuborbitLabel::Zero | SuborbitLabel::B => Vec::new(),
        SuborbitLabel::A => vec![ProjPoint::Finite(p.zero()), ProjPoint::Infinity],
        SuborbitLabel::Lambda(l) => lambda_class(l).into_iter().map(ProjPoint::Finite).collect(),
    }
}

/// The full vertex set of one suborbit, sorted.
pub fn suborbit_elements(label: SuborbitLabel, space: &VertexSpace) -> Vec<u32> {
    match label {
        SuborbitLabel::Zero => vec![0],
        SuborbitLabel::B => space
            .vertices()
            .filter(|&i| classify_tensor(&space.decode(i)) == SuborbitLabel::B)
            .collect(),
        simple => {
            let mut out: Vec<u32> = label_directions(simple, space.modulus())
                .into_iter()
                .flat_map(|d| crate::tensor::direction_space(space, d))
                .collect();
            out.sort_unstable();
            out
        }
    }
}

/// The label of every vertex, computed once.
#[derive(Clone, Debug)]
pub struct SuborbitPartition {
    space: VertexSpace,
    labels: Vec<SuborbitLabel>,
    class_of: Vec<u16>,
}

impl SuborbitPartition {
    pub fn new(space: VertexSpace) -> Self {
        let p = space.modulus();
        let mut labels = vec![SuborbitLabel::Zero];
        labels.extend(nontrivial_labels(p));
        let index_of = |l: SuborbitLabel| labels.iter().position(|&x| x == l).expect("every label listed") as u16;
        let class_of = space
            .vertices()
            .map(|i| index_of(classify_tensor(&space.decode(i))))
            .collect();
        Self {
            space,
            labels,
            class_of,
        }
    }

    pub fn space(&self) -> &VertexSpace {
        &self.space
    }

    /// Zero first, then the nontrivial labels.
    pub fn labels(&self) -> &[SuborbitLabel] {
        &self.labels
    }

    pub fn label_of(&self, idx: u32) -> SuborbitLabel {
        self.labels[self.class_of[idx as usize] as usize]
    }

    pub fn members(&self, label: SuborbitLabel) -> impl Iterator<Item = u32> + '_ {
        self.space.vertices().filter(move |&i| self.label_of(i) == label)
    }

    pub fn size(&self, label: SuborbitLabel) -> usize {
        self.members(label).count()
    }
}

/// Extends independent rows to a basis of GF(p)^m with standard vectors.
fn complete_basis(rows: &[Vec<Fp>], m: usize, p: PrimeModulus) -> Result<Matrix> {
    let mut basis: Vec<Vec<Fp>> = rows.to_vec();
    let rank_of_rows = |b: &[Vec<Fp>]| {
        Matrix::new(b.len(), m, b.concat(), p)
            .map(|mat| mat.rank())
            .unwrap_or(0)
    };
    if rank_of_rows(&basis) != basis.len() {
        return Err(Error::Singular);
    }
    for j in 0..m {
        if basis.len() == m {
            break;
        }
        let mut e = vec![p.zero(); m];
        e[j] = p.one();
        basis.push(e);
        if rank_of_rows(&basis) != basis.len() {
            basis.pop();
        }
    }
    Matrix::new(m, m, basis.concat(), p)
}

/// An invertible `B` with `src[i]·B = dst[i]` for each i.
pub fn basis_change(src: &[Vec<Fp>], dst: &[Vec<Fp>], m: usize, p: PrimeModulus) -> Result<Matrix> {
    if src.len() != dst.len() || src.iter().chain(dst).any(|r| r.len() != m) {
        return Err(Error::DimensionMismatch(
            "basis change needs matching row lists of length m",
        ));
    }
    let r = complete_basis(src, m, p)?;
    let s = complete_basis(dst, m, p)?;
    r.inv()?.mul(&s)
}

/// A linear element of G₀ carrying `x` to `y`, built by basis completion.
/// `None` iff the two tensors lie in different suborbits.
pub fn find_g0_element(x: &Tensor, y: &Tensor) -> Result<Option<LinPart>> {
    let (m, p) = (x.m(), x.modulus());
    if classify_tensor(x) != classify_tensor(y) {
        return Ok(None);
    }
    let found = match classify_tensor(x) {
        SuborbitLabel::Zero => Some(LinPart::identity(m, p)),
        SuborbitLabel::B => {
            let b = basis_change(
                &[x.row(0).to_vec(), x.row(1).to_vec()],
                &[y.row(0).to_vec(), y.row(1).to_vec()],
                m,
                p,
            )?;
            Some(LinPart::new(Matrix::identity(2, p), b)?)
        }
        _ => {
            let (vx, wx) = x.factorize()?.expect("simple");
            let (vy, wy) = y.factorize()?.expect("simple");
            let dy = ProjPoint::from_vector(vy).expect("nonzero");
            let d8 = d8_elements(p);
            let mut hit = None;
            for mat in d8.elements() {
                let img = mat.left_apply(&vx)?;
                let img = [img[0], img[1]];
                if ProjPoint::from_vector(img) != Some(dy) {
                    continue;
                }
                // img = c·vy, so the W-factor must absorb c⁻¹.
                let pivot = if vy[0].is_zero() { 1 } else { 0 };
                let c_inv = (img[pivot] * vy[pivot].inv()?).inv()?;
                let target: Vec<Fp> = wy.iter().map(|&e| e * c_inv).collect();
                let b = basis_change(core::slice::from_ref(&wx), &[target], m, p)?;
                hit = Some(LinPart::new(mat.clone(), b)?);
                break;
            }
            hit
        }
    };
    if let Some(lin) = &found {
        if lin.apply(x)? != *y {
            return Err(Error::CertificationFailed(format!(
                "G0 transport {x:?} -> {y:?} misfired"
            )));
        }
    }
    Ok(found)
}
