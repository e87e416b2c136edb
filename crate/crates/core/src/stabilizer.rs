//! Setwise stabilizers in GL(2,p) of unions of 1-spaces of V.

use alloc::collections::BTreeSet;
use alloc::vec::Vec;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::{Fp, PrimeModulus};
use crate::group::d8_elements;
use crate::matrix::{gl2_enumerate, Matrix};
use crate::tensor::ProjPoint;

/// A nonempty set of 1-spaces of V, realized as the union of those spaces
/// minus the origin.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DirectionSet {
    points: BTreeSet<ProjPoint>,
    #[serde(skip)]
    p: PrimeModulus,
}

impl DirectionSet {
    pub fn new(points: impl IntoIterator<Item = ProjPoint>, p: PrimeModulus) -> Result<Self> {
        let points: BTreeSet<ProjPoint> = points.into_iter().collect();
        if points.is_empty() {
            return Err(Error::DegenerateConfig("direction set is empty".into()));
        }
        if points
            .iter()
            .any(|pt| matches!(pt, ProjPoint::Finite(mu) if mu.modulus() != p))
        {
            return Err(Error::ModulusMismatch);
        }
        Ok(Self { points, p })
    }

    /// `⟨e1 + μ e2⟩` for each slope; `None` stands for `⟨e2⟩`.
    pub fn from_slopes(slopes: &[Option<u64>], p: PrimeModulus) -> Result<Self> {
        Self::new(
            slopes
                .iter()
                .map(|s| s.map_or(ProjPoint::Infinity, |v| ProjPoint::Finite(p.elem(v)))),
            p,
        )
    }

    pub fn points(&self) -> &BTreeSet<ProjPoint> {
        &self.points
    }

    pub fn modulus(&self) -> PrimeModulus {
        self.p
    }

    /// Every nonzero vector on one of the 1-spaces, sorted.
    pub fn realized(&self) -> Vec<[Fp; 2]> {
        let mut out: Vec<[Fp; 2]> = self
            .points
            .iter()
            .flat_map(|pt| {
                let v = pt.vector(self.p);
                self.p.units().map(move |k| [v[0] * k, v[1] * k])
            })
            .collect();
        out.sort_by_key(|v| (v[0].value(), v[1].value()));
        out
    }

    pub fn maps_onto_itself(&self, a: &Matrix) -> bool {
        self.points.iter().all(|pt| self.points.contains(&pt.apply(a)))
    }
}

/// All `A ∈ GL(2,p)` with `realized^A = realized`, by enumeration.
pub fn setwise_stabilizer_gl2(ds: &DirectionSet) -> Result<Vec<Matrix>> {
    Ok(gl2_enumerate(ds.p)?.filter(|a| ds.maps_onto_itself(a)).collect())
}

/// The same stabilizer computed on realized vectors rather than 1-spaces.
pub fn setwise_stabilizer_gl2_realized(ds: &DirectionSet) -> Result<Vec<Matrix>> {
    let realized = ds.realized();
    let members: BTreeSet<(u32, u32)> = realized.iter().map(|v| (v[0].value(), v[1].value())).collect();
    Ok(gl2_enumerate(ds.p)?
        .filter(|a| {
            realized.iter().all(|v| {
                let img = a.left_apply(v).expect("length 2");
                members.contains(&(img[0].value(), img[1].value()))
            })
        })
        .collect())
}

/// Matrices common to every list.
pub fn intersect(lists: &[Vec<Matrix>]) -> Vec<Matrix> {
    let Some((first, rest)) = lists.split_first() else {
        return Vec::new();
    };
    first
        .iter()
        .filter(|a| rest.iter().all(|l| l.contains(a)))
        .cloned()
        .collect()
}

/// Closed under products and inverses, and nonempty.
pub fn is_subgroup(elems: &[Matrix]) -> bool {
    !elems.is_empty()
        && elems.iter().all(|g| {
            g.inv().is_ok_and(|gi| elems.contains(&gi))
                && elems.iter().all(|h| g.mul(h).is_ok_and(|gh| elems.contains(&gh)))
        })
}

/// `{k·M : k ≠ 0, M ∈ D₈}`, of order 4(p - 1).
pub fn scalar_d8(p: PrimeModulus) -> Vec<Matrix> {
    let d8 = d8_elements(p);
    let set: BTreeSet<Vec<Vec<u32>>> = p
        .units()
        .flat_map(|k| d8.elements().iter().map(move |m| m.scale(k).to_rows()))
        .collect();
    set.into_iter()
        .map(|rows| {
            let entries = rows.concat().into_iter().map(|v| p.elem(u64::from(v))).collect();
            Matrix::new(2, 2, entries, p).expect("2x2")
        })
        .collect()
}

/// How a stabilizer compares with D₈.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StabilizerSummary {
    pub order: usize,
    pub is_subgroup: bool,
    pub contains_d8: bool,
    /// Every element is a scalar multiple of an element of D₈.
    pub within_scalar_d8: bool,
    /// Equal as a set to the scalar closure of D₈.
    pub equals_scalar_d8: bool,
    /// Equal as a set to the eight matrices of D₈ themselves.
    pub equals_d8: bool,
}

pub fn summarize(stab: &[Matrix], p: PrimeModulus) -> StabilizerSummary {
    let d8 = d8_elements(p);
    let zd8 = scalar_d8(p);
    let set: BTreeSet<Vec<Vec<u32>>> = stab.iter().map(Matrix::to_rows).collect();
    let zd8_set: BTreeSet<Vec<Vec<u32>>> = zd8.iter().map(Matrix::to_rows).collect();
    let d8_set: BTreeSet<Vec<Vec<u32>>> = d8.elements().iter().map(Matrix::to_rows).collect();
    StabilizerSummary {
        order: stab.len(),
        is_subgroup: is_subgroup(stab),
        contains_d8: d8_set.is_subset(&set),
        within_scalar_d8: set.is_subset(&zd8_set),
        equals_scalar_d8: set == zd8_set,
        equals_d8: set == d8_set,
    }
}
