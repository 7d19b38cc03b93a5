//! Conley-Zehnder indices of iterated elliptic symplectic paths, their
//! loop/short-path decomposition, and superadditivity-extremal partitions.
//!
//! An elliptic path is described by its tuple of rotation numbers
//! `ρ = (ρ_1, …, ρ_n)`, one per two-dimensional invariant block, measured in
//! half-turns (so the time-one map of block `i` rotates by `π·ρ_i`). All
//! quantities here are exact:
//!
//! - [`cz_index`]: `μ(Φ^k) = Σ_i (2⌊k·ρ_i/2⌋ + 1)`, defined whenever no
//!   `k·ρ_i` is an even integer (no block of the iterate has eigenvalue 1);
//! - [`mean_index`]: `μ̂(Φ^k) = k·Σ_i ρ_i`, defined for every iterate;
//! - [`decompose`]: the splitting `k·ρ_i = 2m_i + λ_i` with `λ_i ∈ (-1,1)\{0}`,
//!   separating a full-loop part from a short path;
//! - [`is_extremal`] / [`extremal_defect`]: partitions `k = k_1 + … + k_r`
//!   where the index superadditivity bound
//!   `Σ_j μ(Φ^{k_j}) - μ(Φ^k) ≤ (r-1)·n` is attained with equality.

use crate::rat::{floor_int, is_even_integer, times_int, Rat};
use num_traits::Zero;

/// Errors for index computations on elliptic paths.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum IndexError {
    /// Some block of the requested iterate has eigenvalue 1 (`k·ρ_i ∈ 2ℤ`),
    /// so the index of that iterate is undefined.
    #[error("iterate {k} is degenerate: block {block} has k*rho in 2Z (eigenvalue 1)")]
    DegenerateIterate { block: usize, k: u64 },
    /// Some block of the requested iterate has eigenvalue -1 (`k·ρ_i` an odd
    /// integer). The index itself is still defined, but no short angle in the
    /// open interval `(-1, 1)` represents the block, so the loop/short-path
    /// splitting is not.
    #[error("iterate {k} has k*rho an odd integer in block {block} (eigenvalue -1); \
             no short angle in (-1, 1) exists")]
    BoundaryAngle { block: usize, k: u64 },
    /// A rotation-number tuple must have at least one block.
    #[error("a rotation path needs at least one block")]
    EmptyPath,
    /// A partition must have at least one part and all parts positive.
    #[error("a partition needs at least one part, all parts positive")]
    InvalidPartition,
}

/// Rotation numbers of an elliptic symplectic path, one rational per
/// two-dimensional block, in half-turn units.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RotationNumbers {
    rho: Vec<Rat>,
}

impl RotationNumbers {
    /// Wraps a nonempty tuple of rotation numbers.
    pub fn new(rho: Vec<Rat>) -> Result<Self, IndexError> {
        if rho.is_empty() {
            return Err(IndexError::EmptyPath);
        }
        Ok(RotationNumbers { rho })
    }

    /// Half the dimension of the underlying symplectic vector space: the
    /// number of two-dimensional blocks.
    pub fn half_dim(&self) -> usize {
        self.rho.len()
    }

    /// The rotation numbers themselves.
    pub fn rho(&self) -> &[Rat] {
        &self.rho
    }

    /// True when the `k`-th iterate is nondegenerate: no `k·ρ_i` lies in 2ℤ.
    pub fn is_nondegenerate(&self, k: u64) -> bool {
        self.check_nondegenerate(k).is_ok()
    }

    /// Errs with the first offending block when the `k`-th iterate is
    /// degenerate.
    pub fn check_nondegenerate(&self, k: u64) -> Result<(), IndexError> {
        assert!(k >= 1, "iterate count must be positive");
        for (block, r) in self.rho.iter().enumerate() {
            if is_even_integer(&times_int(r, k as i64)) {
                return Err(IndexError::DegenerateIterate { block, k });
            }
        }
        Ok(())
    }
}

/// The Conley-Zehnder index of the `k`-th iterate, in half-turn units:
/// `μ(Φ^k) = Σ_i (2⌊k·ρ_i/2⌋ + 1)`.
///
/// Defined exactly when the iterate is nondegenerate. The result always has
/// the parity of the number of blocks, and differs from [`mean_index`] by
/// strictly less than the number of blocks.
///
/// ```
/// use maslov::rat::rat;
/// use maslov::{cz_index, RotationNumbers};
///
/// let path = RotationNumbers::new(vec![rat(1, 3)]).unwrap();
/// assert_eq!(cz_index(&path, 7).unwrap(), 3);
/// ```
pub fn cz_index(path: &RotationNumbers, k: u64) -> Result<i64, IndexError> {
    path.check_nondegenerate(k)?;
    let two = Rat::from_integer(2);
    let mut total = 0i64;
    for r in path.rho() {
        let a = times_int(r, k as i64);
        total += 2 * floor_int(&(a / two)) + 1;
    }
    Ok(total)
}

/// The mean index of the `k`-th iterate: `μ̂(Φ^k) = k·Σ_i ρ_i`. Linear in `k`
/// and defined for every iterate, degenerate or not.
pub fn mean_index(path: &RotationNumbers, k: u64) -> Rat {
    assert!(k >= 1, "iterate count must be positive");
    let sum: Rat = path.rho().iter().sum();
    times_int(&sum, k as i64)
}

/// Loop/short-path splitting of an iterate: per block,
/// `k·ρ_i = 2·m_i + λ_i` with `λ_i ∈ (-1, 1) \ {0}`.
///
/// The integer windings `m_i` make up the full-loop part (which contributes
/// `2·Σ m_i` to the index) and the short angles `λ_i` describe the remaining
/// short path.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IndexDecomposition {
    winding: Vec<i64>,
    short_angles: Vec<Rat>,
}

impl IndexDecomposition {
    /// Integer windings `m_i`.
    pub fn winding(&self) -> &[i64] {
        &self.winding
    }

    /// Short angles `λ_i`, each in `(-1, 1) \ {0}`.
    pub fn short_angles(&self) -> &[Rat] {
        &self.short_angles
    }

    /// Index contribution of the loop part: `2·Σ_i m_i`.
    pub fn loop_total(&self) -> i64 {
        2 * self.winding.iter().sum::<i64>()
    }

    /// The short path itself, as a rotation-number tuple.
    pub fn short_path(&self) -> RotationNumbers {
        RotationNumbers::new(self.short_angles.clone()).expect("short path is nonempty")
    }
}

/// Splits the `k`-th iterate into loop and short parts.
///
/// Errs with [`IndexError::DegenerateIterate`] when some `k·ρ_i` is an even
/// integer, and with [`IndexError::BoundaryAngle`] when some `k·ρ_i` is an
/// odd integer (eigenvalue -1: the index exists but no short angle in the
/// open interval does).
///
/// ```
/// use maslov::rat::rat;
/// use maslov::{decompose, RotationNumbers};
///
/// let path = RotationNumbers::new(vec![rat(-1, 100)]).unwrap();
/// let d = decompose(&path, 199).unwrap();
/// assert_eq!(d.winding(), &[-1]);
/// assert_eq!(d.short_angles(), &[rat(1, 100)]);
/// ```
pub fn decompose(path: &RotationNumbers, k: u64) -> Result<IndexDecomposition, IndexError> {
    assert!(k >= 1, "iterate count must be positive");
    let two = Rat::from_integer(2);
    let mut winding = Vec::with_capacity(path.half_dim());
    let mut short_angles = Vec::with_capacity(path.half_dim());
    for (block, r) in path.rho().iter().enumerate() {
        let a = times_int(r, k as i64);
        if a.is_integer() {
            let e = a.to_integer();
            if e % 2 == 0 {
                return Err(IndexError::DegenerateIterate { block, k });
            }
            return Err(IndexError::BoundaryAngle { block, k });
        }
        // m = ⌊(a+1)/2⌋ is the unique integer with a - 2m in (-1, 1).
        let m = floor_int(&((a + Rat::from_integer(1)) / two));
        let lambda = a - times_int(&Rat::from_integer(1), 2 * m);
        debug_assert!(lambda > Rat::from_integer(-1) && lambda < Rat::from_integer(1));
        debug_assert!(!lambda.is_zero());
        winding.push(m);
        short_angles.push(lambda);
    }
    Ok(IndexDecomposition {
        winding,
        short_angles,
    })
}

/// Checks the iteration identity `μ(Φ^k) = k·loop(Φ) + μ(ξ^k)`, where
/// `ξ` is the short path of `Φ` itself and `loop(Φ)` the loop contribution
/// of its splitting.
///
/// This holds identically whenever both sides are defined; the check is kept
/// executable as a sanity instrument rather than assumed. Errs when `Φ`
/// cannot be split (degenerate or eigenvalue -1 at `k = 1`) or when the
/// `k`-th iterate of either path is degenerate.
pub fn iteration_identity_check(path: &RotationNumbers, k: u64) -> Result<bool, IndexError> {
    let base = decompose(path, 1)?;
    let lhs = cz_index(path, k)?;
    let rhs = (k as i64) * base.loop_total() + cz_index(&base.short_path(), k)?;
    Ok(lhs == rhs)
}

/// An unordered partition `k = k_1 + … + k_r` with positive parts, stored in
/// ascending order.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Partition {
    parts: Vec<u64>,
}

impl Partition {
    /// Wraps a nonempty list of positive parts (order is normalized).
    pub fn new(mut parts: Vec<u64>) -> Result<Self, IndexError> {
        if parts.is_empty() || parts.contains(&0) {
            return Err(IndexError::InvalidPartition);
        }
        parts.sort_unstable();
        Ok(Partition { parts })
    }

    /// The one-part partition of `k`.
    pub fn singleton(k: u64) -> Result<Self, IndexError> {
        Partition::new(vec![k])
    }

    /// `r` equal parts of size `part` (partitioning `r·part`).
    pub fn uniform(r: u64, part: u64) -> Result<Self, IndexError> {
        if r == 0 {
            return Err(IndexError::InvalidPartition);
        }
        Partition::new(vec![part; r as usize])
    }

    /// Parts in ascending order.
    pub fn parts(&self) -> &[u64] {
        &self.parts
    }

    /// The partitioned total `k`.
    pub fn total(&self) -> u64 {
        self.parts.iter().sum()
    }

    /// Number of parts `r`.
    pub fn len(&self) -> usize {
        self.parts.len()
    }

    /// True for the (impossible, by construction) empty partition; present to
    /// keep clippy's `len`-without-`is_empty` convention honest.
    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    /// All partitions of `k`, in lexicographic order of their ascending part
    /// lists. Partition counts grow sub-exponentially but fast; keep `k`
    /// modest (the count is 627 at `k = 20`, about 2·10^5 at `k = 50`).
    pub fn all_of(k: u64) -> Vec<Partition> {
        fn extend(remaining: u64, min_part: u64, prefix: &mut Vec<u64>, out: &mut Vec<Partition>) {
            if remaining == 0 {
                out.push(Partition {
                    parts: prefix.clone(),
                });
                return;
            }
            for part in min_part..=remaining {
                prefix.push(part);
                extend(remaining - part, part, prefix, out);
                prefix.pop();
            }
        }
        assert!(k >= 1, "cannot partition zero");
        let mut out = Vec::new();
        extend(k, 1, &mut Vec::new(), &mut out);
        out
    }

    /// Replaces the part at `index` by the parts of `sub` (which must
    /// partition exactly that part). Used to state refinement closure.
    pub fn refine(&self, index: usize, sub: &Partition) -> Option<Partition> {
        let &part = self.parts.get(index)?;
        if sub.total() != part {
            return None;
        }
        let mut parts: Vec<u64> = self
            .parts
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != index)
            .map(|(_, &p)| p)
            .collect();
        parts.extend_from_slice(sub.parts());
        Some(Partition::new(parts).expect("parts stay positive"))
    }
}

impl std::fmt::Display for Partition {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let mut first = true;
        for p in &self.parts {
            if !first {
                write!(f, "+")?;
            }
            write!(f, "{p}")?;
            first = false;
        }
        Ok(())
    }
}

/// True when the partition attains the superadditivity bound with equality:
/// `Σ_j μ(Φ^{k_j}) - μ(Φ^k) = (r-1)·n` for `k` the partitioned total.
///
/// Requires every `Φ^{k_j}` and `Φ^k` to be nondegenerate. Equivalent to the
/// vanishing of [`extremal_defect`], which evaluates per-block floors instead
/// of indices; the two routes are kept separate so they can check each other.
///
/// ```
/// use maslov::rat::rat;
/// use maslov::{is_extremal, Partition, RotationNumbers};
///
/// let path = RotationNumbers::new(vec![rat(2, 5)]).unwrap();
/// let halves = Partition::new(vec![1, 1]).unwrap();
/// assert!(is_extremal(&path, &halves).unwrap());
///
/// let fast = RotationNumbers::new(vec![rat(6, 5)]).unwrap();
/// assert!(!is_extremal(&fast, &halves).unwrap());
/// ```
pub fn is_extremal(path: &RotationNumbers, partition: &Partition) -> Result<bool, IndexError> {
    let n = path.half_dim() as i64;
    let k = partition.total();
    let r = partition.len() as i64;
    let mut sum_parts = 0i64;
    for &kj in partition.parts() {
        sum_parts += cz_index(path, kj)?;
    }
    let whole = cz_index(path, k)?;
    Ok(sum_parts - whole == (r - 1) * n)
}

/// The superadditivity defect of a partition, via per-block floors:
/// `Σ_i (⌊k·ρ_i/2⌋ - Σ_j ⌊k_j·ρ_i/2⌋)`.
///
/// Always nonnegative; zero exactly when the partition [`is_extremal`].
/// Nondegeneracy of all iterates involved is required, matching
/// [`is_extremal`]'s domain.
pub fn extremal_defect(path: &RotationNumbers, partition: &Partition) -> Result<i64, IndexError> {
    path.check_nondegenerate(partition.total())?;
    for &kj in partition.parts() {
        path.check_nondegenerate(kj)?;
    }
    let two = Rat::from_integer(2);
    let k = partition.total();
    let mut defect = 0i64;
    for r in path.rho() {
        let whole = floor_int(&(times_int(r, k as i64) / two));
        let mut parts = 0i64;
        for &kj in partition.parts() {
            parts += floor_int(&(times_int(r, kj as i64) / two));
        }
        defect += whole - parts;
    }
    Ok(defect)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::rat;
    use num_traits::Signed;
    use proptest::prelude::*;

    fn path(rho: &[(i64, i64)]) -> RotationNumbers {
        RotationNumbers::new(rho.iter().map(|&(p, q)| rat(p, q)).collect()).unwrap()
    }

    /// Independent single-block index oracle: walks the even-integer level
    /// ladder along `t ↦ a·t` on a uniform grid with pure i64 comparisons
    /// (no rational floor), counting signed rung crossings. The final level
    /// `ℓ` satisfies `ℓ ≤ a < ℓ+2`, and the block index is `ℓ + 1`.
    fn oracle_block_index(a: &Rat, steps: i64) -> i64 {
        let p = *a.numer();
        let q = *a.denom();
        let d = q * steps; // sample j has value (p*j)/d versus level ℓ = (ℓ*d)/d
        let mut level = 0i64;
        for j in 1..=steps {
            let num = p * j;
            while num >= (level + 2) * d {
                level += 2;
            }
            while num < level * d {
                level -= 2;
            }
        }
        level + 1
    }

    /// Independent splitting oracle built on the same level walk:
    /// returns `(m, λ)` with `a = 2m + λ`, or None at an integer `a`.
    fn oracle_split(a: &Rat) -> Option<(i64, Rat)> {
        if a.is_integer() {
            return None;
        }
        let steps = 128;
        let level = oracle_block_index(a, steps) - 1;
        let c = a - Rat::from_integer(level);
        if c < Rat::from_integer(1) {
            Some((level / 2, c))
        } else {
            Some((level / 2 + 1, c - Rat::from_integer(2)))
        }
    }

    #[test]
    fn index_worked_examples() {
        assert_eq!(cz_index(&path(&[(1, 3)]), 7).unwrap(), 3);
        assert_eq!(cz_index(&path(&[(-1, 2), (3, 2)]), 1).unwrap(), 0);
        assert_eq!(cz_index(&path(&[(-1, 100)]), 199).unwrap(), -1);
        assert_eq!(cz_index(&path(&[(1, 2)]), 1).unwrap(), 1);
        assert_eq!(cz_index(&path(&[(-1, 100)]), 1).unwrap(), -1);
    }

    #[test]
    fn index_matches_level_walk_oracle_on_lattice() {
        for p in -12..=12i64 {
            for q in 1..=8i64 {
                let r = rat(p, q);
                let rho = RotationNumbers::new(vec![r]).unwrap();
                for k in 1..=25u64 {
                    let a = times_int(&r, k as i64);
                    if is_even_integer(&a) {
                        assert!(cz_index(&rho, k).is_err());
                        continue;
                    }
                    assert_eq!(
                        cz_index(&rho, k).unwrap(),
                        oracle_block_index(&a, 10_000),
                        "rho={r}, k={k}"
                    );
                }
            }
        }
    }

    #[test]
    fn degenerate_iterate_is_rejected_with_block() {
        let rho = path(&[(1, 3), (1, 4)]);
        assert_eq!(
            cz_index(&rho, 6),
            Err(IndexError::DegenerateIterate { block: 0, k: 6 })
        );
        // 8·(1/3) = 8/3 is fine, so with k = 8 it is block 1 that trips.
        assert_eq!(
            cz_index(&rho, 8),
            Err(IndexError::DegenerateIterate { block: 1, k: 8 })
        );
    }

    #[test]
    fn eigenvalue_minus_one_keeps_index_but_not_splitting() {
        let rho = path(&[(1, 2)]);
        assert_eq!(cz_index(&rho, 2).unwrap(), 1); // 2·(1/2) = 1: ⌊1/2⌋ = 0
        assert_eq!(
            decompose(&rho, 2),
            Err(IndexError::BoundaryAngle { block: 0, k: 2 })
        );
        assert_eq!(
            decompose(&rho, 4),
            Err(IndexError::DegenerateIterate { block: 0, k: 4 })
        );
    }

    #[test]
    fn decompose_worked_example() {
        let d = decompose(&path(&[(-1, 100)]), 199).unwrap();
        assert_eq!(d.winding(), &[-1]);
        assert_eq!(d.short_angles(), &[rat(1, 100)]);
        assert_eq!(d.loop_total(), -2);
    }

    #[test]
    fn decompose_matches_split_oracle_on_lattice() {
        for p in -15..=15i64 {
            for q in 1..=9i64 {
                let r = rat(p, q);
                let rho = RotationNumbers::new(vec![r]).unwrap();
                for k in 1..=20u64 {
                    let a = times_int(&r, k as i64);
                    match oracle_split(&a) {
                        None => assert!(decompose(&rho, k).is_err(), "rho={r}, k={k}"),
                        Some((m, lambda)) => {
                            let d = decompose(&rho, k).unwrap();
                            assert_eq!(d.winding(), &[m], "rho={r}, k={k}");
                            assert_eq!(d.short_angles(), &[lambda], "rho={r}, k={k}");
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn mean_index_examples_and_linearity() {
        let rho = path(&[(1, 3)]);
        assert_eq!(mean_index(&rho, 7), rat(7, 3));
        let two_block = path(&[(-1, 100), (-3, 200)]);
        assert_eq!(mean_index(&two_block, 1), rat(-1, 40));
        for k in 1..=10u64 {
            assert_eq!(
                mean_index(&two_block, k),
                times_int(&mean_index(&two_block, 1), k as i64)
            );
        }
    }

    #[test]
    fn extremality_worked_examples() {
        let halves = Partition::new(vec![1, 1]).unwrap();
        assert!(is_extremal(&path(&[(2, 5)]), &halves).unwrap());
        assert!(!is_extremal(&path(&[(6, 5)]), &halves).unwrap());
        assert_eq!(extremal_defect(&path(&[(2, 5)]), &halves).unwrap(), 0);
        assert_eq!(extremal_defect(&path(&[(6, 5)]), &halves).unwrap(), 1);
    }

    #[test]
    fn singleton_partitions_are_extremal() {
        let rho = path(&[(2, 7), (-3, 5)]);
        for k in 1..=12u64 {
            if !rho.is_nondegenerate(k) {
                continue;
            }
            let p = Partition::singleton(k).unwrap();
            assert!(is_extremal(&rho, &p).unwrap());
            assert_eq!(extremal_defect(&rho, &p).unwrap(), 0);
        }
    }

    #[test]
    fn partition_construction_and_enumeration() {
        assert_eq!(Partition::new(vec![]), Err(IndexError::InvalidPartition));
        assert_eq!(
            Partition::new(vec![3, 0, 1]),
            Err(IndexError::InvalidPartition)
        );
        let p = Partition::new(vec![3, 1, 2]).unwrap();
        assert_eq!(p.parts(), &[1, 2, 3]);
        assert_eq!(p.total(), 6);
        assert_eq!(p.len(), 3);
        assert_eq!(p.to_string(), "1+2+3");

        // Partition counts p(1..10) = 1, 2, 3, 5, 7, 11, 15, 22, 30, 42.
        let counts: Vec<usize> = (1..=10).map(|k| Partition::all_of(k).len()).collect();
        assert_eq!(counts, vec![1, 2, 3, 5, 7, 11, 15, 22, 30, 42]);
        for part in Partition::all_of(9) {
            assert_eq!(part.total(), 9);
        }
    }

    #[test]
    fn refinement_closure_on_small_grid() {
        // If a partition of k is extremal and one of its parts is replaced by
        // an extremal partition of that part, the refinement stays extremal.
        let mut checked = 0u32;
        for p in [-7i64, -3, -1, 1, 2, 3, 5, 8] {
            for q in [1i64, 2, 3, 4, 5] {
                let rho = path(&[(p, q)]);
                for k in 2..=8u64 {
                    for part in Partition::all_of(k) {
                        let Ok(true) = is_extremal(&rho, &part) else {
                            continue;
                        };
                        for (i, &piece) in part.parts().iter().enumerate() {
                            if piece < 2 {
                                continue;
                            }
                            for sub in Partition::all_of(piece) {
                                let Ok(true) = is_extremal(&rho, &sub) else {
                                    continue;
                                };
                                let refined = part.refine(i, &sub).unwrap();
                                assert!(
                                    is_extremal(&rho, &refined).unwrap(),
                                    "rho={p}/{q}, {part} refined at {i} by {sub}"
                                );
                                checked += 1;
                            }
                        }
                    }
                }
            }
        }
        assert!(checked > 500, "grid produced only {checked} refinement cases");
    }

    fn rho_strategy() -> impl Strategy<Value = RotationNumbers> {
        prop::collection::vec(
            (-40i64..=40, 1i64..=12).prop_map(|(p, q)| rat(p, q)),
            1..=4,
        )
        .prop_map(|v| RotationNumbers::new(v).unwrap())
    }

    proptest! {
        #[test]
        fn index_parity_matches_block_count(rho in rho_strategy(), k in 1u64..=60) {
            prop_assume!(rho.is_nondegenerate(k));
            let mu = cz_index(&rho, k).unwrap();
            let n = rho.half_dim() as i64;
            prop_assert_eq!((mu - n).rem_euclid(2), 0);
        }

        #[test]
        fn index_stays_within_open_mean_band(rho in rho_strategy(), k in 1u64..=60) {
            prop_assume!(rho.is_nondegenerate(k));
            let mu = Rat::from_integer(cz_index(&rho, k).unwrap());
            let gap = (mu - mean_index(&rho, k)).abs();
            prop_assert!(gap < Rat::from_integer(rho.half_dim() as i64));
        }

        #[test]
        fn decompose_reconstructs_iterate(rho in rho_strategy(), k in 1u64..=60) {
            prop_assume!(decompose(&rho, k).is_ok());
            let d = decompose(&rho, k).unwrap();
            for (i, r) in rho.rho().iter().enumerate() {
                let rebuilt = Rat::from_integer(2 * d.winding()[i]) + d.short_angles()[i];
                prop_assert_eq!(times_int(r, k as i64), rebuilt);
                prop_assert!(d.short_angles()[i].abs() < Rat::from_integer(1));
                prop_assert!(!d.short_angles()[i].is_zero());
            }
        }

        #[test]
        fn iteration_identity_holds(rho in rho_strategy(), k in 1u64..=40) {
            prop_assume!(decompose(&rho, 1).is_ok());
            prop_assume!(rho.is_nondegenerate(k));
            prop_assert!(iteration_identity_check(&rho, k).unwrap());
        }

        #[test]
        fn superadditivity_defect_is_nonnegative(
            rho in rho_strategy(),
            parts in prop::collection::vec(1u64..=8, 1..=5),
        ) {
            let partition = Partition::new(parts).unwrap();
            let all_ok = rho.is_nondegenerate(partition.total())
                && partition.parts().iter().all(|&kj| rho.is_nondegenerate(kj));
            prop_assume!(all_ok);
            let defect = extremal_defect(&rho, &partition).unwrap();
            prop_assert!(defect >= 0);
            // Index route and floor route agree on the same quantity:
            let n = rho.half_dim() as i64;
            let r = partition.len() as i64;
            let sum: i64 = partition
                .parts()
                .iter()
                .map(|&kj| cz_index(&rho, kj).unwrap())
                .sum();
            let whole = cz_index(&rho, partition.total()).unwrap();
            prop_assert_eq!(whole - sum + (r - 1) * n, 2 * defect);
        }

        #[test]
        fn extremal_iff_defect_vanishes(
            rho in rho_strategy(),
            parts in prop::collection::vec(1u64..=8, 1..=5),
        ) {
            let partition = Partition::new(parts).unwrap();
            let all_ok = rho.is_nondegenerate(partition.total())
                && partition.parts().iter().all(|&kj| rho.is_nondegenerate(kj));
            prop_assume!(all_ok);
            prop_assert_eq!(
                is_extremal(&rho, &partition).unwrap(),
                extremal_defect(&rho, &partition).unwrap() == 0
            );
        }
    }
}
