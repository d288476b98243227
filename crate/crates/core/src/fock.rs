//! Bosonic number basis for `N` atoms on `M` lattice sites.
//!
//! Basis states are occupation vectors `(n_1, ..., n_M)` with `sum n_j = N`,
//! enumerated in lexicographically descending order so that ordering is
//! deterministic and ranking/unranking is pure arithmetic. Two occupation
//! vectors scatter identically when they share the same pair-correlation
//! signature `g[d] = sum_j n_j n_{j+d}`; [`equivalence_classes`] groups the
//! basis by that signature.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

/// Default cap on the basis dimension before [`FockBasis::enumerate`] bails
/// out instead of exhausting memory.
pub const DEFAULT_BASIS_CAP: u64 = 5_000_000;

/// Occupation numbers of one number-basis state, one entry per lattice site.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct OccupationVector {
    occ: Vec<u32>,
}

impl OccupationVector {
    pub fn new(occ: Vec<u32>) -> Self {
        assert!(!occ.is_empty(), "occupation vector must have at least one site");
        Self { occ }
    }

    pub fn sites(&self) -> usize {
        self.occ.len()
    }

    pub fn atoms(&self) -> u32 {
        self.occ.iter().sum()
    }

    pub fn as_slice(&self) -> &[u32] {
        &self.occ
    }

    /// Pair-correlation signature `g[d] = sum_{j=1}^{M-d} n_j n_{j+d}`.
    ///
    /// `g[0]` is the sum of squared occupations; entries for `d >= 1` count
    /// correlated pairs at site distance `d`. States with equal signatures
    /// produce identical scattering distributions.
    pub fn signature(&self) -> PairCorrelationSignature {
        let m = self.occ.len();
        let mut g = vec![0u64; m];
        for (d, slot) in g.iter_mut().enumerate() {
            *slot = (0..m - d)
                .map(|j| u64::from(self.occ[j]) * u64::from(self.occ[j + d]))
                .sum();
        }
        PairCorrelationSignature { g }
    }

    /// Site-reversed copy; reversal preserves the signature.
    pub fn reversed(&self) -> Self {
        let mut occ = self.occ.clone();
        occ.reverse();
        Self { occ }
    }
}

impl fmt::Display for OccupationVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        // Compact digit string ("201") when unambiguous, dash-separated otherwise.
        if self.occ.iter().all(|&n| n < 10) {
            for &n in &self.occ {
                write!(f, "{n}")?;
            }
            Ok(())
        } else {
            let mut first = true;
            for &n in &self.occ {
                if !first {
                    write!(f, "-")?;
                }
                write!(f, "{n}")?;
                first = false;
            }
            Ok(())
        }
    }
}

/// Integer-valued class key: equal signatures imply equal `|f(theta)|^2`
/// for every angle.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PairCorrelationSignature {
    g: Vec<u64>,
}

impl PairCorrelationSignature {
    pub fn as_slice(&self) -> &[u64] {
        &self.g
    }
}

impl fmt::Display for PairCorrelationSignature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for &v in &self.g {
            if !first {
                write!(f, " ")?;
            }
            write!(f, "{v}")?;
            first = false;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FockError {
    /// `M` or `N` is zero.
    InvalidDimensions { sites: usize, atoms: u32 },
    /// The basis dimension exceeds the configured cap.
    BasisTooLarge { size: u128, cap: u64 },
}

impl fmt::Display for FockError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FockError::InvalidDimensions { sites, atoms } => write!(
                f,
                "invalid basis dimensions: need at least one site and one atom, got M={sites}, N={atoms}"
            ),
            FockError::BasisTooLarge { size, cap } => {
                write!(f, "basis dimension {size} exceeds the cap of {cap} states")
            }
        }
    }
}

impl core::error::Error for FockError {}

/// Number basis `{|n_1 ... n_M>}` in lexicographically descending order,
/// with arithmetic (combinatorial-ranking) index lookup.
#[derive(Debug, Clone)]
pub struct FockBasis {
    sites: usize,
    atoms: u32,
    states: Vec<OccupationVector>,
    /// Pascal triangle up to row N+M, used by the ranking formula.
    binomial: Vec<Vec<u64>>,
}

impl FockBasis {
    /// Number of states, `C(N+M-1, N)`, or `None` on u128 overflow.
    pub fn dimension(sites: usize, atoms: u32) -> Option<u128> {
        if sites == 0 {
            return Some(0);
        }
        // multiplicative binomial, exact at every step
        let n = atoms as u128 + sites as u128 - 1;
        let k = (atoms as u128).min(sites as u128 - 1);
        let mut acc: u128 = 1;
        for i in 0..k {
            acc = acc.checked_mul(n - i)?;
            acc /= i + 1;
        }
        Some(acc)
    }

    pub fn enumerate(sites: usize, atoms: u32) -> Result<Self, FockError> {
        Self::enumerate_with_cap(sites, atoms, DEFAULT_BASIS_CAP)
    }

    pub fn enumerate_with_cap(sites: usize, atoms: u32, cap: u64) -> Result<Self, FockError> {
        if sites == 0 || atoms == 0 {
            return Err(FockError::InvalidDimensions { sites, atoms });
        }
        let size = Self::dimension(sites, atoms).unwrap_or(u128::MAX);
        if size > u128::from(cap) {
            return Err(FockError::BasisTooLarge { size, cap });
        }
        let size = size as usize;

        let mut states = Vec::with_capacity(size);
        let mut occ = vec![0u32; sites];
        occ[0] = atoms;
        loop {
            states.push(OccupationVector::new(occ.clone()));
            if !next_descending(&mut occ) {
                break;
            }
        }
        debug_assert_eq!(states.len(), size);

        let rows = sites + atoms as usize + 1;
        let mut binomial = vec![vec![0u64; rows]; rows];
        for i in 0..rows {
            binomial[i][0] = 1;
            for j in 1..=i {
                binomial[i][j] = binomial[i - 1][j - 1] + binomial[i - 1].get(j).copied().unwrap_or(0);
            }
        }

        Ok(Self { sites, atoms, states, binomial })
    }

    pub fn sites(&self) -> usize {
        self.sites
    }

    pub fn atoms(&self) -> u32 {
        self.atoms
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn state(&self, index: usize) -> &OccupationVector {
        &self.states[index]
    }

    pub fn states(&self) -> &[OccupationVector] {
        &self.states
    }

    pub fn iter(&self) -> core::slice::Iter<'_, OccupationVector> {
        self.states.iter()
    }

    /// Rank of `occ` in descending lexicographic order, or `None` when the
    /// vector does not belong to this basis.
    ///
    /// The rank counts states that come first, i.e. states whose occupation
    /// vector is lexicographically larger. With `R_j` atoms left for sites
    /// `j..M`, the states sharing the prefix but holding more than `n_j`
    /// atoms at site `j` number `C(R_{j+1} - 1 + M - j, M - j)`.
    pub fn index_of(&self, occ: &OccupationVector) -> Option<usize> {
        if occ.sites() != self.sites || occ.atoms() != self.atoms {
            return None;
        }
        let m = self.sites;
        let mut rank = 0u64;
        let mut remaining = u64::from(self.atoms);
        for j in 0..m - 1 {
            let here = u64::from(occ.occ[j]);
            let after = remaining - here;
            let slots = (m - 1 - j) as u64;
            if after >= 1 {
                rank += self.binomial[(after - 1 + slots) as usize][slots as usize];
            }
            remaining = after;
        }
        Some(rank as usize)
    }
}

impl<'a> IntoIterator for &'a FockBasis {
    type Item = &'a OccupationVector;
    type IntoIter = core::slice::Iter<'a, OccupationVector>;

    fn into_iter(self) -> Self::IntoIter {
        self.states.iter()
    }
}

/// Advance `occ` to its successor in descending lexicographic order.
/// Returns `false` when `occ` is already the last state `(0, ..., 0, N)`.
fn next_descending(occ: &mut [u32]) -> bool {
    let m = occ.len();
    let Some(pivot) = (0..m - 1).rev().find(|&j| occ[j] > 0) else {
        return false;
    };
    occ[pivot] -= 1;
    let moved: u32 = occ[pivot + 1..].iter().sum::<u32>() + 1;
    for slot in occ[pivot + 1..].iter_mut() {
        *slot = 0;
    }
    occ[pivot + 1] = moved;
    true
}

/// One scattering-equivalence class: all basis states sharing a signature.
#[derive(Debug, Clone)]
pub struct ScatteringClass {
    pub signature: PairCorrelationSignature,
    /// Basis indices of the members, ascending.
    pub members: Vec<usize>,
}

/// Partition of a [`FockBasis`] by pair-correlation signature.
///
/// Classes are ordered by their first member's basis index, which is
/// deterministic given the basis ordering.
#[derive(Debug, Clone)]
pub struct EquivalenceClasses {
    classes: Vec<ScatteringClass>,
    class_of: Vec<u32>,
}

impl EquivalenceClasses {
    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    pub fn classes(&self) -> &[ScatteringClass] {
        &self.classes
    }

    pub fn class(&self, id: usize) -> &ScatteringClass {
        &self.classes[id]
    }

    /// Class id of a basis index.
    pub fn class_of(&self, state_index: usize) -> usize {
        self.class_of[state_index] as usize
    }

    pub fn class_map(&self) -> &[u32] {
        &self.class_of
    }
}

/// Group every basis state by its pair-correlation signature.
pub fn equivalence_classes(basis: &FockBasis) -> EquivalenceClasses {
    let mut by_signature: BTreeMap<PairCorrelationSignature, Vec<usize>> = BTreeMap::new();
    for (i, occ) in basis.iter().enumerate() {
        by_signature.entry(occ.signature()).or_default().push(i);
    }
    let mut classes: Vec<ScatteringClass> = by_signature
        .into_iter()
        .map(|(signature, members)| ScatteringClass { signature, members })
        .collect();
    classes.sort_by_key(|c| c.members[0]);

    let mut class_of = vec![0u32; basis.len()];
    for (id, class) in classes.iter().enumerate() {
        for &member in &class.members {
            class_of[member] = id as u32;
        }
    }
    EquivalenceClasses { classes, class_of }
}
