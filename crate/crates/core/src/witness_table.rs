//! Witness manifest: for each prime, the linear maps and Hamming frames that
//! exhibit an automorphism outside G for unions of nontrivial orbitals.
//!
//! Entries are transcribed data. Every one of them is machine-checked by the
//! certifier, so a bad entry fails loudly.

/// `matrix ∘ I` preserves the union of the listed suborbits.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LinearEntry {
    pub union: &'static [&'static str],
    pub rows: [[i64; 2]; 2],
}

/// A single suborbit whose directions are `⟨e1 + x e2⟩` and `⟨e1 + y e2⟩`,
/// with `None` for `⟨e2⟩`, so the digraph is H(2, p^m).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct HammingEntry {
    pub label: &'static str,
    pub x: Option<u64>,
    pub y: Option<u64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct WitnessManifest {
    pub p: u32,
    pub linear: &'static [LinearEntry],
    pub hamming: &'static [HammingEntry],
    /// Any invertible `A ∘ I` preserves the rank-2 suborbit; this one is
    /// outside D₈ up to scalars.
    pub glgl_on_b: [[i64; 2]; 2],
    /// Two suborbits whose direction sets are singled out in the 2-closure
    /// argument. Only reported; the certificate intersects every direction
    /// set.
    pub two_closed_pair: [&'static str; 2],
    /// Slopes for the clique-structure union used in the 2-closure argument.
    pub two_closed_mus: &'static [u64],
}

const MINUS_PAIR: [[i64; 2]; 2] = [[1, 1], [1, -1]];

const A: HammingEntry = HammingEntry {
    label: "A",
    x: Some(0),
    y: None,
};

pub const P5: WitnessManifest = WitnessManifest {
    p: 5,
    linear: &[
        LinearEntry {
            union: &["A", "L1"],
            rows: [[1, 1], [1, -1]],
        },
        LinearEntry {
            union: &["A", "L2"],
            rows: [[1, 2], [2, 1]],
        },
        LinearEntry {
            union: &["L1", "L2"],
            rows: [[1, 0], [0, 2]],
        },
    ],
    hamming: &[
        A,
        HammingEntry {
            label: "L1",
            x: Some(1),
            y: Some(4),
        },
        // 2 is a square root of -1 here.
        HammingEntry {
            label: "L2",
            x: Some(2),
            y: Some(3),
        },
    ],
    glgl_on_b: MINUS_PAIR,
    two_closed_pair: ["L1", "L2"],
    two_closed_mus: &[1, 2, 3, 4],
};

pub const P7: WitnessManifest = WitnessManifest {
    p: 7,
    linear: &[
        // [[1, 2], [2, 1]] sends slope 3 to ⟨e2⟩ and so only works once A
        // is in the union.
        LinearEntry {
            union: &["L2"],
            rows: [[1, 1], [1, -1]],
        },
        LinearEntry {
            union: &["A", "L1"],
            rows: [[1, 1], [1, -1]],
        },
        LinearEntry {
            union: &["A", "L2"],
            rows: [[1, 2], [2, 1]],
        },
        LinearEntry {
            union: &["L1", "L2"],
            rows: [[1, 0], [0, 2]],
        },
    ],
    hamming: &[
        A,
        HammingEntry {
            label: "L1",
            x: Some(1),
            y: Some(6),
        },
    ],
    glgl_on_b: MINUS_PAIR,
    two_closed_pair: ["A", "L1"],
    two_closed_mus: &[2, 3, 4, 5],
};

pub const P13: WitnessManifest = WitnessManifest {
    p: 13,
    linear: &[
        LinearEntry {
            union: &["L1"],
            rows: [[1, 2], [2, 1]],
        },
        LinearEntry {
            union: &["L2"],
            rows: [[1, 1], [5, -5]],
        },
        LinearEntry {
            union: &["L3"],
            rows: [[1, 1], [5, -5]],
        },
        LinearEntry {
            union: &["L5"],
            rows: [[1, 1], [1, -1]],
        },
        LinearEntry {
            union: &["L1", "L2"],
            rows: [[1, 4], [4, -1]],
        },
        LinearEntry {
            union: &["L1", "L3"],
            rows: [[1, 0], [0, 4]],
        },
        LinearEntry {
            union: &["L1", "L5"],
            rows: [[1, 0], [0, 5]],
        },
        LinearEntry {
            union: &["L2", "L3"],
            rows: [[1, 1], [5, -5]],
        },
        LinearEntry {
            union: &["L2", "L5"],
            rows: [[1, 0], [0, 4]],
        },
        LinearEntry {
            union: &["L3", "L5"],
            rows: [[1, 2], [2, 1]],
        },
        // diag(1, 2) sends slope 4 to 8, outside this union.
        LinearEntry {
            union: &["L1", "L2", "L3"],
            rows: [[1, 5], [5, 1]],
        },
        LinearEntry {
            union: &["L1", "L2", "L5"],
            rows: [[1, 4], [4, -1]],
        },
        LinearEntry {
            union: &["L1", "L3", "L5"],
            rows: [[1, 2], [2, 1]],
        },
        LinearEntry {
            union: &["L2", "L3", "L5"],
            rows: [[1, 1], [1, -1]],
        },
        LinearEntry {
            union: &["L1", "L2", "L3", "L5"],
            rows: [[1, 0], [0, 2]],
        },
    ],
    hamming: &[A],
    glgl_on_b: MINUS_PAIR,
    two_closed_pair: ["L2", "L3"],
    two_closed_mus: &[2, 6, 7, 11],
};

pub fn manifest(p: u32) -> Option<&'static WitnessManifest> {
    [&P5, &P7, &P13].into_iter().find(|w| w.p == p)
}

/// Slopes for the union of the two smallest λ-classes at p = 17.
pub const Q17_MUS: [u64; 6] = [1, 2, 8, 9, 15, 16];

pub const Q17_LABELS: [&str; 2] = ["L1", "L2"];

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lookup() {
        assert_eq!(manifest(13).unwrap().linear.len(), 15);
        assert!(manifest(11).is_none());
    }

    #[test]
    fn every_linear_matrix_is_invertible() {
        for w in [P5, P7, P13] {
            for e in w.linear.iter().map(|e| e.rows).chain([w.glgl_on_b]) {
                let det = (e[0][0] * e[1][1] - e[0][1] * e[1][0]).rem_euclid(i64::from(w.p));
                assert_ne!(det, 0, "{e:?} at {}", w.p);
            }
        }
    }
}
