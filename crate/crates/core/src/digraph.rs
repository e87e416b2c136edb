//! Cayley digraphs on the additive group of V⊗W. An arc runs from x to y
//! iff `x - y` lies in the connection set.

use alloc::collections::VecDeque;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use fixedbitset::FixedBitSet;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::group::{nontrivial_labels, LinPart, SuborbitLabel, SuborbitPartition};
use crate::tensor::{direction_space, IndexAction, ProjPoint, Tensor, VertexSpace};

/// A negation-closed set of nonzero vertices.
#[derive(Clone, Debug)]
pub struct ConnectionSet {
    space: VertexSpace,
    bits: FixedBitSet,
    list: Vec<u32>,
    labels: Vec<SuborbitLabel>,
}

impl ConnectionSet {
    pub fn from_members(
        space: VertexSpace,
        members: impl IntoIterator<Item = u32>,
        labels: Vec<SuborbitLabel>,
    ) -> Result<Self> {
        let mut bits = FixedBitSet::with_capacity(space.size() as usize);
        for x in members {
            if x >= space.size() {
                return Err(Error::IndexOutOfRange(x as usize));
            }
            bits.insert(x as usize);
        }
        if bits.contains(0) {
            return Err(Error::DimensionMismatch("connection sets exclude the zero tensor"));
        }
        let list: Vec<u32> = bits.ones().map(|i| i as u32).collect();
        if list.iter().any(|&x| !bits.contains(space.neg(x) as usize)) {
            return Err(Error::NotNegationClosed);
        }
        Ok(Self {
            space,
            bits,
            list,
            labels,
        })
    }

    pub fn space(&self) -> &VertexSpace {
        &self.space
    }

    /// The suborbit labels this set was built from; empty for ad hoc sets.
    pub fn labels(&self) -> &[SuborbitLabel] {
        &self.labels
    }

    #[inline]
    pub fn contains(&self, x: u32) -> bool {
        self.bits.contains(x as usize)
    }

    /// Members in increasing index order.
    pub fn members(&self) -> &[u32] {
        &self.list
    }

    pub fn len(&self) -> usize {
        self.list.len()
    }

    pub fn is_empty(&self) -> bool {
        self.list.is_empty()
    }

    pub fn bits(&self) -> &FixedBitSet {
        &self.bits
    }

    #[inline]
    pub fn is_arc(&self, x: u32, y: u32) -> bool {
        self.contains(self.space.sub(x, y))
    }

    /// Every nonzero vertex outside the set. Labels are complemented within
    /// the nontrivial labels when the set carries any.
    pub fn complement(&self) -> ConnectionSet {
        let members = (1..self.space.size()).filter(|&x| !self.contains(x));
        let labels = if self.labels.is_empty() {
            Vec::new()
        } else {
            nontrivial_labels(self.space.modulus())
                .into_iter()
                .filter(|l| !self.labels.contains(l))
                .collect()
        };
        ConnectionSet::from_members(self.space, members, labels).expect("complement of a negation-closed set")
    }

    /// Breadth-first reachability of every vertex from 0.
    pub fn is_connected(&self) -> bool {
        let n = self.space.size() as usize;
        let mut seen = FixedBitSet::with_capacity(n);
        let mut queue = VecDeque::from([0u32]);
        seen.insert(0);
        let mut count = 1usize;
        while let Some(x) = queue.pop_front() {
            for &s in &self.list {
                let y = self.space.add(x, s);
                if !seen.put(y as usize) {
                    count += 1;
                    if count == n {
                        return true;
                    }
                    queue.push_back(y);
                }
            }
        }
        count == n
    }

    pub fn out_degree(&self) -> usize {
        self.list.len()
    }
}

/// Union of the named suborbits.
pub fn orbital_union_set(labels: &[SuborbitLabel], partition: &SuborbitPartition) -> Result<ConnectionSet> {
    if labels.is_empty() {
        return Err(Error::EmptyUnion);
    }
    if let Some(bad) = labels
        .iter()
        .find(|l| **l == SuborbitLabel::Zero || !partition.labels().contains(l))
    {
        return Err(Error::InvalidLabel(format!("{bad}")));
    }
    let mut sorted = labels.to_vec();
    sorted.sort();
    sorted.dedup();
    let space = *partition.space();
    let members: Vec<u32> = space
        .vertices()
        .filter(|&x| sorted.contains(&partition.label_of(x)))
        .collect();
    ConnectionSet::from_members(space, members, sorted)
}

/// True iff `x ↦ x^(A∘B)` maps the set onto itself.
pub fn preserves_set(lin: &LinPart, set: &ConnectionSet) -> Result<bool> {
    let act = lin.index_action(*set.space())?;
    Ok(preserves_set_by(&act, set))
}

pub fn preserves_set_by(act: &IndexAction, set: &ConnectionSet) -> bool {
    // A bijection mapping a finite set into itself maps it onto itself.
    set.members().iter().all(|&s| set.contains(act.apply(s)))
}

/// A bijection of the vertex set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VertexPermutation {
    mapping: Vec<u32>,
}

impl VertexPermutation {
    pub fn from_mapping(mapping: Vec<u32>) -> Result<Self> {
        let n = mapping.len();
        let mut seen = FixedBitSet::with_capacity(n);
        for &y in &mapping {
            if y as usize >= n || seen.put(y as usize) {
                return Err(Error::DimensionMismatch("mapping is not a permutation"));
            }
        }
        Ok(Self { mapping })
    }

    pub fn identity(n: u32) -> Self {
        Self {
            mapping: (0..n).collect(),
        }
    }

    pub fn from_action(space: &VertexSpace, act: &IndexAction) -> Self {
        Self {
            mapping: space.vertices().map(|x| act.apply(x)).collect(),
        }
    }

    #[inline]
    pub fn apply(&self, x: u32) -> u32 {
        self.mapping[x as usize]
    }

    pub fn mapping(&self) -> &[u32] {
        &self.mapping
    }

    pub fn len(&self) -> usize {
        self.mapping.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mapping.is_empty()
    }

    /// `self` followed by `other`.
    pub fn then(&self, other: &VertexPermutation) -> VertexPermutation {
        VertexPermutation {
            mapping: self.mapping.iter().map(|&y| other.apply(y)).collect(),
        }
    }

    pub fn inverse(&self) -> VertexPermutation {
        let mut inv = vec![0u32; self.mapping.len()];
        for (x, &y) in self.mapping.iter().enumerate() {
            inv[y as usize] = x as u32;
        }
        VertexPermutation { mapping: inv }
    }

    /// Exhaustive arc check: every arc `(x + s, x)` maps to an arc. For a
    /// bijection of a finite digraph this already forces non-arcs to
    /// non-arcs.
    pub fn is_automorphism(&self, set: &ConnectionSet) -> bool {
        self.first_broken_arc(set).is_none()
    }

    pub fn first_broken_arc(&self, set: &ConnectionSet) -> Option<(u32, u32)> {
        let space = set.space();
        for x in space.vertices() {
            let fx = self.apply(x);
            for &s in set.members() {
                let y = space.add(x, s);
                if !set.contains(space.sub(self.apply(y), fx)) {
                    return Some((y, x));
                }
            }
        }
        None
    }

    /// A pair `(u, v)` with `f(u + v) ≠ f(u) + f(v) - f(0)`, proving the map
    /// is not affine.
    pub fn non_affine_witness(&self, space: &VertexSpace) -> Option<(u32, u32)> {
        let f0 = self.apply(0);
        for u in space.vertices() {
            let fu = space.sub(self.apply(u), f0);
            for v in space.vertices() {
                let lhs = self.apply(space.add(u, v));
                let rhs = space.add(fu, self.apply(v));
                if lhs != rhs {
                    return Some((u, v));
                }
            }
        }
        None
    }
}

/// Coordinates of V⊗W = (X⊗W) ⊕ (Y⊗W) for two distinct directions, with each
/// W-component numbered by its index among the p^m vectors of W.
#[derive(Clone, Debug)]
pub struct HammingFrame {
    space: VertexSpace,
    x_dir: ProjPoint,
    y_dir: ProjPoint,
    coords: Vec<(u32, u32)>,
    back: Vec<u32>,
}

impl HammingFrame {
    pub fn new(space: VertexSpace, x_dir: ProjPoint, y_dir: ProjPoint) -> Result<Self> {
        if x_dir == y_dir {
            return Err(Error::DegenerateConfig(format!(
                "directions {x_dir} and {y_dir} coincide"
            )));
        }
        let n = space.w_size();
        let mut coords = Vec::with_capacity(space.size() as usize);
        let mut back = vec![u32::MAX; space.size() as usize];
        for idx in space.vertices() {
            let (a, b) = space.decode(idx).decompose(x_dir, y_dir)?;
            let c = (space.w_index(&a), space.w_index(&b));
            let slot = &mut back[(c.0 * n + c.1) as usize];
            if *slot != u32::MAX {
                return Err(Error::BadDecomposition);
            }
            *slot = idx;
            coords.push(c);
        }
        Ok(Self {
            space,
            x_dir,
            y_dir,
            coords,
            back,
        })
    }

    #[inline]
    pub fn coords(&self, idx: u32) -> (u32, u32) {
        self.coords[idx as usize]
    }

    #[inline]
    pub fn vertex(&self, a: u32, b: u32) -> u32 {
        self.back[(a * self.space.w_size() + b) as usize]
    }

    /// `(X ∪ Y) ⊗ W ∖ {0}`.
    pub fn punctured_union(&self) -> Vec<u32> {
        let mut out = direction_space(&self.space, self.x_dir);
        out.extend(direction_space(&self.space, self.y_dir));
        out.sort_unstable();
        out
    }
}

/// Checks that the direct-sum coordinates are an isomorphism onto the
/// Hamming graph H(2, p^m).
pub fn hamming_check(set: &ConnectionSet, x_dir: ProjPoint, y_dir: ProjPoint) -> Result<bool> {
    let frame = HammingFrame::new(*set.space(), x_dir, y_dir)?;
    if frame.punctured_union() != set.members() {
        return Err(Error::BadDecomposition);
    }
    let space = set.space();
    for x in space.vertices() {
        let (a, b) = frame.coords(x);
        for &s in set.members() {
            let (c, d) = frame.coords(space.add(x, s));
            // Exactly one coordinate changes along every arc; with the
            // degree equal to 2(p^m - 1) this gives adjacency in both
            // directions.
            if (a == c) == (b == d) {
                return Ok(false);
            }
        }
    }
    Ok(set.len() as u64 == 2 * (u64::from(space.w_size()) - 1))
}

/// A verified automorphism of a Hamming-type orbital digraph that is not
/// affine.
#[derive(Clone, Debug)]
pub struct HammingWitness {
    pub x_dir: ProjPoint,
    pub y_dir: ProjPoint,
    pub permutation: VertexPermutation,
    pub arcs_checked: u64,
    pub non_affine_pair: (u32, u32),
}

#[derive(Clone, Debug, Serialize)]
pub struct HammingWitnessSummary {
    pub x_direction: ProjPoint,
    pub y_direction: ProjPoint,
    pub swapped_w_vectors: [Vec<u32>; 2],
    pub arcs_checked: u64,
    pub non_affine_pair: [Tensor; 2],
}

impl HammingWitness {
    pub fn summary(&self, space: &VertexSpace) -> HammingWitnessSummary {
        let w = |i: u32| space.w_vector(i).iter().map(|e| e.value()).collect();
        HammingWitnessSummary {
            x_direction: self.x_dir,
            y_direction: self.y_dir,
            swapped_w_vectors: [w(1), w(2)],
            arcs_checked: self.arcs_checked,
            non_affine_pair: [
                space.decode(self.non_affine_pair.0),
                space.decode(self.non_affine_pair.1),
            ],
        }
    }
}

/// Swaps the W-components `f1` and `2f1` in the X-coordinate only and
/// certifies the result against `(X ∪ Y) ⊗ W ∖ {0}`.
pub fn hamming_witness(x_dir: ProjPoint, y_dir: ProjPoint, space: VertexSpace) -> Result<HammingWitness> {
    let frame = HammingFrame::new(space, x_dir, y_dir)?;
    // f1 and 2f1 have W-indices 1 and 2.
    let sigma = |a: u32| match a {
        1 => 2,
        2 => 1,
        other => other,
    };
    let mapping = space
        .vertices()
        .map(|x| {
            let (a, b) = frame.coords(x);
            frame.vertex(sigma(a), b)
        })
        .collect();
    let permutation = VertexPermutation::from_mapping(mapping)?;
    let set = ConnectionSet::from_members(space, frame.punctured_union(), Vec::new())?;
    if let Some((y, x)) = permutation.first_broken_arc(&set) {
        return Err(Error::CertificationFailed(format!(
            "Hamming witness breaks arc {:?} -> {:?}",
            space.decode(y),
            space.decode(x)
        )));
    }
    let non_affine_pair = permutation
        .non_affine_witness(&space)
        .ok_or_else(|| Error::CertificationFailed("Hamming witness is affine".into()))?;
    Ok(HammingWitness {
        x_dir,
        y_dir,
        permutation,
        arcs_checked: u64::from(space.size()) * set.len() as u64,
        non_affine_pair,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::PrimeModulus;
    use crate::group::{d8_elements, suborbit_elements};
    use crate::matrix::Matrix;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn gf(p: u32) -> PrimeModulus {
        PrimeModulus::new(p).unwrap()
    }

    fn setup(p: u32) -> (VertexSpace, SuborbitPartition) {
        let space = VertexSpace::new(2, gf(p)).unwrap();
        (space, SuborbitPartition::new(space))
    }

    fn label(s: &str, p: u32) -> SuborbitLabel {
        SuborbitLabel::parse(s, gf(p)).unwrap()
    }

    #[test]
    fn union_sizes_and_complement() {
        let (space, part) = setup(5);
        let s = orbital_union_set(&[label("L1", 5)], &part).unwrap();
        assert_eq!(s.len(), 48);
        let all = orbital_union_set(&nontrivial_labels(gf(5)), &part).unwrap();
        assert_eq!(all.len() as u32, space.size() - 1);
        assert!(all.complement().is_empty());
        let a1 = orbital_union_set(&[label("A", 5), label("L1", 5)], &part).unwrap();
        let comp = a1.complement();
        assert_eq!(comp.labels(), &[label("B", 5), label("L2", 5)]);
        assert_eq!(
            comp.members(),
            orbital_union_set(comp.labels(), &part).unwrap().members()
        );
        assert_eq!(orbital_union_set(&[], &part).unwrap_err(), Error::EmptyUnion);
        assert!(orbital_union_set(&[SuborbitLabel::Zero], &part).is_err());
    }

    #[test]
    fn arcs_follow_differences() {
        let (space, part) = setup(5);
        let a = orbital_union_set(&[label("A", 5)], &part).unwrap();
        let e1f1 = space.encode(&Tensor::from_coords(2, gf(5), &[1, 0, 0, 0]).unwrap());
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..200 {
            let x = rng.gen_range(0..space.size());
            assert!(!a.is_arc(x, x));
            let y = rng.gen_range(0..space.size());
            assert_eq!(a.is_arc(x, y), a.is_arc(y, x));
            assert!(a.is_arc(space.add(x, e1f1), x));
        }
    }

    #[test]
    fn rejects_bad_sets() {
        let space = VertexSpace::new(2, gf(5)).unwrap();
        assert_eq!(
            ConnectionSet::from_members(space, [1], Vec::new()).unwrap_err(),
            Error::NotNegationClosed
        );
        assert!(ConnectionSet::from_members(space, [0], Vec::new()).is_err());
    }

    #[test]
    fn orbital_digraphs_are_connected_and_a_line_is_not() {
        for p in [5, 7] {
            let (space, part) = setup(p);
            for l in nontrivial_labels(gf(p)) {
                assert!(orbital_union_set(&[l], &part).unwrap().is_connected(), "{l} at {p}");
            }
            let x = space.encode(&Tensor::from_coords(2, gf(p), &[1, 2, 0, 1]).unwrap());
            let line = ConnectionSet::from_members(space, [x, space.neg(x)], Vec::new()).unwrap();
            assert!(!line.is_connected());
        }
    }

    #[test]
    fn stated_linear_witnesses_preserve_their_unions_at_p5() {
        let (_, part) = setup(5);
        let p = gf(5);
        let theta = LinPart::on_v(Matrix::from_rows(p, &[[1, 1], [1, -1]]), 2).unwrap();
        let s = orbital_union_set(&[label("A", 5), label("L1", 5)], &part).unwrap();
        assert!(preserves_set(&theta, &s).unwrap());
        let diag = LinPart::on_v(Matrix::from_rows(p, &[[1, 0], [0, 2]]), 2).unwrap();
        let s12 = orbital_union_set(&[label("L1", 5), label("L2", 5)], &part).unwrap();
        assert!(preserves_set(&diag, &s12).unwrap());
        assert!(preserves_set(&LinPart::identity(2, p), &s12).unwrap());
        // diag(1,2) does not fix {A, L1}: it sends slope 1 to slope 2.
        assert!(!preserves_set(&diag, &s).unwrap());
    }

    #[test]
    fn g0_preserves_every_orbital() {
        let p = gf(7);
        let (_, part) = setup(7);
        let mut rng = ChaCha8Rng::seed_from_u64(22);
        let sets: Vec<ConnectionSet> = nontrivial_labels(p)
            .into_iter()
            .map(|l| orbital_union_set(&[l], &part).unwrap())
            .collect();
        for a in d8_elements(p).elements() {
            let b = loop {
                let e = (0..4).map(|_| p.elem(rng.gen_range(0..7))).collect();
                let m = Matrix::new(2, 2, e, p).unwrap();
                if m.is_invertible() {
                    break m;
                }
            };
            let lin = LinPart::new(a.clone(), b).unwrap();
            for s in &sets {
                assert!(preserves_set(&lin, s).unwrap());
            }
        }
    }

    #[test]
    fn hamming_checks_at_p5_and_p13() {
        for q in [5u32, 13] {
            let p = gf(q);
            let (space, part) = setup(q);
            let a = orbital_union_set(&[label("A", q)], &part).unwrap();
            assert!(hamming_check(&a, ProjPoint::Finite(p.zero()), ProjPoint::Infinity).unwrap());
            let l1 = orbital_union_set(&[label("L1", q)], &part).unwrap();
            assert!(hamming_check(&l1, ProjPoint::Finite(p.one()), ProjPoint::Finite(-p.one())).unwrap());
            let i = p.sqrt_minus_one().unwrap();
            let li = orbital_union_set(&[SuborbitLabel::lambda(i).unwrap()], &part).unwrap();
            assert!(hamming_check(&li, ProjPoint::Finite(i), ProjPoint::Finite(-i)).unwrap());
            for x in space.vertices().step_by(17) {
                let degree = a.members().iter().filter(|&&s| a.is_arc(space.add(x, s), x)).count();
                assert_eq!(degree, 2 * (space.w_size() as usize - 1));
            }
            assert_eq!(
                hamming_check(&l1, ProjPoint::Finite(p.zero()), ProjPoint::Infinity),
                Err(Error::BadDecomposition)
            );
        }
    }

    #[test]
    fn hamming_witness_is_a_non_affine_involution_fixing_zero() {
        let p = gf(5);
        let space = VertexSpace::new(2, p).unwrap();
        let w = hamming_witness(ProjPoint::Finite(p.zero()), ProjPoint::Infinity, space).unwrap();
        assert_eq!(w.permutation.apply(0), 0);
        assert_eq!(
            w.permutation.then(&w.permutation),
            VertexPermutation::identity(space.size())
        );
        let a = ConnectionSet::from_members(space, suborbit_elements(SuborbitLabel::A, &space), Vec::new()).unwrap();
        assert!(w.permutation.is_automorphism(&a));
        assert!(w.permutation.non_affine_witness(&space).is_some());
        let lin = LinPart::on_v(Matrix::from_rows(p, &[[1, 1], [1, -1]]), 2).unwrap();
        let perm = VertexPermutation::from_action(&space, &lin.index_action(space).unwrap());
        assert_eq!(perm.non_affine_witness(&space), None);
    }

    #[test]
    fn complement_duality_on_small_instances() {
        let p = gf(5);
        let (space, part) = setup(5);
        let labels = nontrivial_labels(p);
        let hw = hamming_witness(ProjPoint::Finite(p.zero()), ProjPoint::Infinity, space).unwrap();
        let lin = VertexPermutation::from_action(
            &space,
            &LinPart::on_v(Matrix::from_rows(p, &[[1, 1], [1, -1]]), 2)
                .unwrap()
                .index_action(space)
                .unwrap(),
        );
        for mask in 1u32..(1 << labels.len()) - 1 {
            let chosen: Vec<SuborbitLabel> = (0..labels.len())
                .filter(|b| mask >> b & 1 == 1)
                .map(|b| labels[b])
                .collect();
            let s = orbital_union_set(&chosen, &part).unwrap();
            let c = s.complement();
            for perm in [&hw.permutation, &lin] {
                assert_eq!(perm.is_automorphism(&s), perm.is_automorphism(&c));
            }
        }
    }

    #[test]
    fn permutation_algebra() {
        assert!(VertexPermutation::from_mapping(vec![0, 0]).is_err());
        let f = VertexPermutation::from_mapping(vec![2, 0, 1]).unwrap();
        assert_eq!(f.then(&f.inverse()), VertexPermutation::identity(3));
        assert_eq!(f.then(&f).then(&f), VertexPermutation::identity(3));
    }
}
