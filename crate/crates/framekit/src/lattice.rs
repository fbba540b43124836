//! Finite lattices and frames.
//!
//! A [`FiniteLattice`] is built from an arbitrary list of order assertions:
//! the constructor takes the reflexive-transitive closure, rejects cycles,
//! and computes the meet/join tables by scanning for greatest lower / least
//! upper bounds (reporting a concrete witness pair when one is missing).
//!
//! A [`Frame`] is a finite lattice that passed the frame-law check
//! `(⋁A) ∧ b = ⋁{a ∧ b | a ∈ A}`, together with its precomputed Heyting
//! operation `a → b = ⋁{c | a ∧ c ≤ b}` and the carrier masks of the open
//! sublocales `os(a) = {a → b | b ∈ L}`. On a finite lattice the full frame
//! law is equivalent to binary distributivity, so the check is exhaustive
//! over subsets only up to a size threshold and switches to the binary form
//! above it; both forms are cross-tested against each other below the
//! threshold.

use serde::Serialize;

use crate::bitset::{bits, full_mask, submasks, Mask};

/// Index of an element within a lattice carrier.
pub type ElementId = usize;

/// Carriers are subsets of a `u64` mask, so 64 elements is the hard cap.
pub const MAX_ELEMENTS: usize = 64;

/// Exhaustive frame-law checking scans all `2^n` subsets up to this size;
/// larger lattices use the equivalent binary distributivity law.
const EXHAUSTIVE_FRAME_CHECK_MAX: usize = 12;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LatticeError {
    #[error("a lattice needs at least one element")]
    EmptyCarrier,
    #[error("carrier has {n} elements, more than the supported {MAX_ELEMENTS}")]
    TooLarge { n: usize },
    #[error("order is not antisymmetric: `{a}` and `{b}` are distinct but comparable both ways")]
    NotAntisymmetric { a: String, b: String },
    #[error("not a lattice: `{a}` and `{b}` have no greatest lower bound")]
    NoMeet { a: String, b: String },
    #[error("not a lattice: `{a}` and `{b}` have no least upper bound")]
    NoJoin { a: String, b: String },
    #[error("not a frame: {0}")]
    NotAFrame(FrameViolation),
}

/// Witness that the frame law fails: `(⋁ subset) ∧ outer` differs from
/// `⋁ {a ∧ outer | a ∈ subset}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FrameViolation {
    pub lhs: String,
    pub outer: String,
    pub rhs: String,
    pub subset: Vec<String>,
}

impl std::fmt::Display for FrameViolation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "(⋁{{{}}}) ∧ {} = {} but ⋁ of the pointwise meets is {}",
            self.subset.join(", "),
            self.outer,
            self.lhs,
            self.rhs
        )
    }
}

/// A finite bounded lattice with explicit order rows and meet/join tables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteLattice {
    labels: Vec<String>,
    /// `up[a]` = mask of `{b | a ≤ b}`.
    up: Vec<Mask>,
    /// `dn[a]` = mask of `{b | b ≤ a}`.
    dn: Vec<Mask>,
    meet: Vec<Vec<ElementId>>,
    join: Vec<Vec<ElementId>>,
    bottom: ElementId,
    top: ElementId,
}

impl FiniteLattice {
    /// Build a lattice from order assertions `a ≤ b` (indices into `labels`).
    /// The relation is closed under reflexivity and transitivity first.
    pub fn build<L, S>(labels: L, pairs: &[(ElementId, ElementId)]) -> Result<Self, LatticeError>
    where
        L: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        let n = labels.len();
        if n == 0 {
            return Err(LatticeError::EmptyCarrier);
        }
        if n > MAX_ELEMENTS {
            return Err(LatticeError::TooLarge { n });
        }

        let mut up = vec![0 as Mask; n];
        for (a, bit) in up.iter_mut().enumerate() {
            *bit = 1 << a;
        }
        for &(a, b) in pairs {
            assert!(a < n && b < n, "order pair ({a}, {b}) out of range for {n} elements");
            up[a] |= 1 << b;
        }
        // Transitive closure: propagate until stable. n ≤ 64 keeps this cheap.
        loop {
            let mut changed = false;
            for a in 0..n {
                let mut row = up[a];
                for b in bits(up[a]) {
                    row |= up[b];
                }
                if row != up[a] {
                    up[a] = row;
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
        Self::from_up_rows(labels, up)
    }

    /// Build a lattice from a complete order predicate.
    pub fn from_order<L, S>(
        labels: L,
        leq: impl Fn(ElementId, ElementId) -> bool,
    ) -> Result<Self, LatticeError>
    where
        L: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        let n = labels.len();
        if n == 0 {
            return Err(LatticeError::EmptyCarrier);
        }
        if n > MAX_ELEMENTS {
            return Err(LatticeError::TooLarge { n });
        }
        let mut up = vec![0 as Mask; n];
        for a in 0..n {
            for b in 0..n {
                if a == b || leq(a, b) {
                    up[a] |= 1 << b;
                }
            }
        }
        // The predicate is trusted for reflexivity but not transitivity.
        for a in 0..n {
            for b in bits(up[a]) {
                for c in bits(up[b]) {
                    if up[a] & (1 << c) == 0 {
                        panic!(
                            "order predicate is not transitive: {} ≤ {} ≤ {} but not {} ≤ {}",
                            labels[a], labels[b], labels[c], labels[a], labels[c]
                        );
                    }
                }
            }
        }
        Self::from_up_rows(labels, up)
    }

    fn from_up_rows(labels: Vec<String>, up: Vec<Mask>) -> Result<Self, LatticeError> {
        let n = labels.len();
        for a in 0..n {
            for b in bits(up[a]) {
                if a != b && up[b] & (1 << a) != 0 {
                    return Err(LatticeError::NotAntisymmetric {
                        a: labels[a].clone(),
                        b: labels[b].clone(),
                    });
                }
            }
        }

        let mut dn = vec![0 as Mask; n];
        for a in 0..n {
            for b in bits(up[a]) {
                dn[b] |= 1 << a;
            }
        }

        let mut meet = vec![vec![0; n]; n];
        let mut join = vec![vec![0; n]; n];
        for a in 0..n {
            for b in a..n {
                let lower = dn[a] & dn[b];
                let m = bits(lower)
                    .find(|&m| lower & !dn[m] == 0)
                    .ok_or_else(|| LatticeError::NoMeet {
                        a: labels[a].clone(),
                        b: labels[b].clone(),
                    })?;
                let upper = up[a] & up[b];
                let j = bits(upper)
                    .find(|&j| upper & !up[j] == 0)
                    .ok_or_else(|| LatticeError::NoJoin {
                        a: labels[a].clone(),
                        b: labels[b].clone(),
                    })?;
                meet[a][b] = m;
                meet[b][a] = m;
                join[a][b] = j;
                join[b][a] = j;
            }
        }

        // Folding over the whole carrier reaches the global bounds.
        let bottom = (1..n).fold(0, |acc, x| meet[acc][x]);
        let top = (1..n).fold(0, |acc, x| join[acc][x]);

        Ok(Self { labels, up, dn, meet, join, bottom, top })
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.labels.len()
    }

    #[inline]
    pub fn label(&self, a: ElementId) -> &str {
        &self.labels[a]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    #[inline]
    pub fn leq(&self, a: ElementId, b: ElementId) -> bool {
        self.up[a] & (1 << b) != 0
    }

    /// Mask of `{b | a ≤ b}`.
    #[inline]
    pub fn up_mask(&self, a: ElementId) -> Mask {
        self.up[a]
    }

    /// Mask of `{b | b ≤ a}`.
    #[inline]
    pub fn dn_mask(&self, a: ElementId) -> Mask {
        self.dn[a]
    }

    #[inline]
    pub fn meet(&self, a: ElementId, b: ElementId) -> ElementId {
        self.meet[a][b]
    }

    #[inline]
    pub fn join(&self, a: ElementId, b: ElementId) -> ElementId {
        self.join[a][b]
    }

    #[inline]
    pub fn bottom(&self) -> ElementId {
        self.bottom
    }

    #[inline]
    pub fn top(&self) -> ElementId {
        self.top
    }

    /// Meet of a subset; the empty meet is the top element.
    pub fn meet_of(&self, subset: Mask) -> ElementId {
        bits(subset).fold(self.top, |acc, x| self.meet[acc][x])
    }

    /// Join of a subset; the empty join is the bottom element.
    pub fn join_of(&self, subset: Mask) -> ElementId {
        bits(subset).fold(self.bottom, |acc, x| self.join[acc][x])
    }

    /// Mask with every element set.
    #[inline]
    pub fn carrier(&self) -> Mask {
        full_mask(self.n())
    }

    /// `b` covers `a`: `a < b` with nothing strictly between.
    pub fn covers(&self, a: ElementId, b: ElementId) -> bool {
        a != b
            && self.leq(a, b)
            && (self.up[a] & self.dn[b] & !(1 << a) & !(1 << b)) == 0
    }

    /// The same lattice upside down: order reversed, meets and joins swapped.
    pub fn dual(&self) -> FiniteLattice {
        FiniteLattice {
            labels: self.labels.clone(),
            up: self.dn.clone(),
            dn: self.up.clone(),
            meet: self.join.clone(),
            join: self.meet.clone(),
            bottom: self.top,
            top: self.bottom,
        }
    }

    /// Check the frame law `(⋁A) ∧ b = ⋁{a ∧ b | a ∈ A}`.
    ///
    /// Small lattices are checked against every subset `A`; larger ones use
    /// binary distributivity, which is equivalent on a finite lattice.
    pub fn frame_check(&self) -> Result<(), FrameViolation> {
        if self.n() <= EXHAUSTIVE_FRAME_CHECK_MAX {
            self.frame_check_exhaustive()
        } else {
            self.frame_check_binary()
        }
    }

    pub(crate) fn frame_check_exhaustive(&self) -> Result<(), FrameViolation> {
        let n = self.n();
        assert!(n <= EXHAUSTIVE_FRAME_CHECK_MAX, "exhaustive frame check is exponential");
        for subset in submasks(self.carrier()) {
            let join_a = self.join_of(subset);
            for b in 0..n {
                let lhs = self.meet[join_a][b];
                let rhs = bits(subset).fold(self.bottom, |acc, a| self.join[acc][self.meet[a][b]]);
                if lhs != rhs {
                    return Err(self.shrink_violation(subset, b));
                }
            }
        }
        Ok(())
    }

    pub(crate) fn frame_check_binary(&self) -> Result<(), FrameViolation> {
        let n = self.n();
        for a in 0..n {
            for b in 0..n {
                for c in b..n {
                    let lhs = self.meet[a][self.join[b][c]];
                    let rhs = self.join[self.meet[a][b]][self.meet[a][c]];
                    if lhs != rhs {
                        return Err(self.shrink_violation((1 << b) | (1 << c), a));
                    }
                }
            }
        }
        Ok(())
    }

    /// Greedily drop elements from a failing subset while the law still
    /// fails, then package the labels of what is left.
    fn shrink_violation(&self, subset: Mask, outer: ElementId) -> FrameViolation {
        let fails = |s: Mask| {
            let lhs = self.meet[self.join_of(s)][outer];
            let rhs = bits(s).fold(self.bottom, |acc, a| self.join[acc][self.meet[a][outer]]);
            lhs != rhs
        };
        debug_assert!(fails(subset));
        let mut subset = subset;
        while let Some(a) = bits(subset).find(|&a| fails(subset & !(1 << a))) {
            subset &= !(1 << a);
        }
        let lhs = self.meet[self.join_of(subset)][outer];
        let rhs = bits(subset).fold(self.bottom, |acc, a| self.join[acc][self.meet[a][outer]]);
        FrameViolation {
            subset: bits(subset).map(|a| self.labels[a].clone()).collect(),
            outer: self.labels[outer].clone(),
            lhs: self.labels[lhs].clone(),
            rhs: self.labels[rhs].clone(),
        }
    }
}

/// A finite frame: a validated distributive lattice with its Heyting
/// operation and open-sublocale carrier masks precomputed.
#[derive(Debug, Clone)]
pub struct Frame {
    lat: FiniteLattice,
    /// `arrow[a][b]` = `a → b`.
    arrow: Vec<Vec<ElementId>>,
    /// `os[a]` = mask of `os(a) = {a → b | b ∈ L}`.
    os: Vec<Mask>,
}

impl Frame {
    pub fn new(lat: FiniteLattice) -> Result<Self, LatticeError> {
        lat.frame_check().map_err(LatticeError::NotAFrame)?;
        let n = lat.n();

        let mut arrow = vec![vec![0; n]; n];
        for a in 0..n {
            for b in 0..n {
                let candidates: Mask = (0..n)
                    .filter(|&c| lat.leq(lat.meet(c, a), b))
                    .fold(0, |m, c| m | (1 << c));
                let r = lat.join_of(candidates);
                // The defining adjunction c ∧ a ≤ b ⟺ c ≤ a → b must hold
                // exactly; distributivity guarantees it, so any miss here is
                // an internal bug.
                for c in 0..n {
                    assert_eq!(
                        lat.leq(lat.meet(c, a), b),
                        lat.leq(c, r),
                        "Heyting adjunction failed at ({a}, {b}, {c})"
                    );
                }
                arrow[a][b] = r;
            }
        }

        let mut os = vec![0 as Mask; n];
        for a in 0..n {
            let image: Mask = (0..n).fold(0, |m, b| m | (1 << arrow[a][b]));
            let fixpoints: Mask =
                (0..n).filter(|&x| arrow[a][x] == x).fold(0, |m, x| m | (1 << x));
            assert_eq!(
                image, fixpoints,
                "os({a}) as the image of (a → -) differs from its fixpoint set"
            );
            os[a] = image;
        }

        Ok(Self { lat, arrow, os })
    }

    #[inline]
    pub fn lattice(&self) -> &FiniteLattice {
        &self.lat
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.lat.n()
    }

    #[inline]
    pub fn label(&self, a: ElementId) -> &str {
        self.lat.label(a)
    }

    #[inline]
    pub fn leq(&self, a: ElementId, b: ElementId) -> bool {
        self.lat.leq(a, b)
    }

    #[inline]
    pub fn meet(&self, a: ElementId, b: ElementId) -> ElementId {
        self.lat.meet(a, b)
    }

    #[inline]
    pub fn join(&self, a: ElementId, b: ElementId) -> ElementId {
        self.lat.join(a, b)
    }

    #[inline]
    pub fn meet_of(&self, subset: Mask) -> ElementId {
        self.lat.meet_of(subset)
    }

    #[inline]
    pub fn join_of(&self, subset: Mask) -> ElementId {
        self.lat.join_of(subset)
    }

    #[inline]
    pub fn bottom(&self) -> ElementId {
        self.lat.bottom()
    }

    #[inline]
    pub fn top(&self) -> ElementId {
        self.lat.top()
    }

    #[inline]
    pub fn carrier(&self) -> Mask {
        self.lat.carrier()
    }

    /// Heyting implication `a → b = ⋁{c | a ∧ c ≤ b}`.
    #[inline]
    pub fn heyting(&self, a: ElementId, b: ElementId) -> ElementId {
        self.arrow[a][b]
    }

    /// Pseudocomplement `a* = a → 0`.
    #[inline]
    pub fn pseudocomplement(&self, a: ElementId) -> ElementId {
        self.arrow[a][self.lat.bottom()]
    }

    /// Carrier mask of the open sublocale `os(a) = {a → b | b ∈ L}`.
    #[inline]
    pub fn os_mask(&self, a: ElementId) -> Mask {
        self.os[a]
    }

    /// Carrier mask of the closed sublocale `cs(a) = ↑a`.
    #[inline]
    pub fn cs_mask(&self, a: ElementId) -> Mask {
        self.lat.up_mask(a)
    }

    /// Prime elements: `p ≠ 1` with `x ∧ y ≤ p ⟹ x ≤ p or y ≤ p`.
    pub fn primes(&self) -> Vec<ElementId> {
        let n = self.n();
        (0..n)
            .filter(|&p| {
                p != self.top()
                    && (0..n).all(|x| {
                        (0..n).all(|y| {
                            !self.leq(self.meet(x, y), p) || self.leq(x, p) || self.leq(y, p)
                        })
                    })
            })
            .collect()
    }

    /// Meet-irreducible elements: `m ≠ 1` that are not the meet of two
    /// strictly larger elements. In a finite distributive lattice these are
    /// exactly the primes.
    pub fn meet_irreducibles(&self) -> Vec<ElementId> {
        let n = self.n();
        (0..n)
            .filter(|&m| {
                m != self.top()
                    && !(0..n).any(|x| {
                        (0..n).any(|y| x != m && y != m && self.meet(x, y) == m)
                    })
            })
            .collect()
    }
}

/// Search for a lattice isomorphism `a → b`, returned as the image list.
///
/// Backtracking over order-preservation alone is sound: a bijection that
/// preserves and reflects the order automatically preserves all meets and
/// joins. Elements are bucketed by cheap order invariants to prune.
pub fn find_isomorphism(a: &FiniteLattice, b: &FiniteLattice) -> Option<Vec<ElementId>> {
    let n = a.n();
    if n != b.n() {
        return None;
    }
    let sig = |lat: &FiniteLattice, x: ElementId| {
        let below = lat.dn_mask(x).count_ones();
        let above = lat.up_mask(x).count_ones();
        let covers_down = (0..lat.n()).filter(|&y| lat.covers(y, x)).count() as u32;
        let covers_up = (0..lat.n()).filter(|&y| lat.covers(x, y)).count() as u32;
        (below, above, covers_down, covers_up)
    };
    let sig_a: Vec<_> = (0..n).map(|x| sig(a, x)).collect();
    let sig_b: Vec<_> = (0..n).map(|x| sig(b, x)).collect();
    {
        let mut sa = sig_a.clone();
        let mut sb = sig_b.clone();
        sa.sort_unstable();
        sb.sort_unstable();
        if sa != sb {
            return None;
        }
    }

    // Map elements in order of ascending candidate count for cheap failure.
    let mut order: Vec<ElementId> = (0..n).collect();
    order.sort_by_key(|&x| sig_b.iter().filter(|&&s| s == sig_a[x]).count());

    let mut image = vec![usize::MAX; n];
    let mut used = vec![false; n];
    fn assign(
        a: &FiniteLattice,
        b: &FiniteLattice,
        sig_a: &[(u32, u32, u32, u32)],
        sig_b: &[(u32, u32, u32, u32)],
        order: &[ElementId],
        depth: usize,
        image: &mut Vec<ElementId>,
        used: &mut Vec<bool>,
    ) -> bool {
        let Some(&x) = order.get(depth) else {
            return true;
        };
        for y in 0..b.n() {
            if used[y] || sig_a[x] != sig_b[y] {
                continue;
            }
            let consistent = order[..depth].iter().all(|&x2| {
                a.leq(x, x2) == b.leq(y, image[x2]) && a.leq(x2, x) == b.leq(image[x2], y)
            });
            if !consistent {
                continue;
            }
            image[x] = y;
            used[y] = true;
            if assign(a, b, sig_a, sig_b, order, depth + 1, image, used) {
                return true;
            }
            image[x] = usize::MAX;
            used[y] = false;
        }
        false
    }

    if assign(a, b, &sig_a, &sig_b, &order, 0, &mut image, &mut used) {
        debug_assert!((0..n).all(|x| {
            (0..n).all(|y| {
                b.meet(image[x], image[y]) == image[a.meet(x, y)]
                    && b.join(image[x], image[y]) == image[a.join(x, y)]
            })
        }));
        Some(image)
    } else {
        None
    }
}

pub fn are_isomorphic(a: &FiniteLattice, b: &FiniteLattice) -> bool {
    find_isomorphism(a, b).is_some()
}

#[cfg(test)]
pub(crate) mod fixtures {
    use super::*;

    /// Two-element frame 0 < 1.
    pub fn two() -> Frame {
        Frame::new(FiniteLattice::build(["0", "1"], &[(0, 1)]).unwrap()).unwrap()
    }

    /// Three-element chain 0 < m < 1.
    pub fn three() -> Frame {
        Frame::new(FiniteLattice::build(["0", "m", "1"], &[(0, 1), (1, 2)]).unwrap()).unwrap()
    }

    /// Four-element Boolean frame {0, a, b, 1}. Indices: 0, a = 1, b = 2, 1 = 3.
    pub fn b4() -> Frame {
        let lat =
            FiniteLattice::build(["0", "a", "b", "1"], &[(0, 1), (0, 2), (1, 3), (2, 3)]).unwrap();
        Frame::new(lat).unwrap()
    }

    /// One-element frame.
    pub fn trivial() -> Frame {
        Frame::new(FiniteLattice::build(["*"], &[]).unwrap()).unwrap()
    }

    /// The diamond: 0 under three incomparable atoms under 1. A lattice but
    /// not distributive.
    pub fn m3() -> FiniteLattice {
        FiniteLattice::build(
            ["0", "x", "y", "z", "1"],
            &[(0, 1), (0, 2), (0, 3), (1, 4), (2, 4), (3, 4)],
        )
        .unwrap()
    }

    /// The pentagon: 0 < a < b < 1 and 0 < c < 1. A lattice but not
    /// distributive.
    pub fn n5() -> FiniteLattice {
        FiniteLattice::build(
            ["0", "a", "b", "c", "1"],
            &[(0, 1), (1, 2), (2, 4), (0, 3), (3, 4)],
        )
        .unwrap()
    }
}

#[cfg(test)]
mod tests {
    use super::fixtures::*;
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn chain_tables() {
        let f = three();
        assert_eq!(f.bottom(), 0);
        assert_eq!(f.top(), 2);
        assert_eq!(f.meet(1, 2), 1);
        assert_eq!(f.join(1, 0), 1);
        assert_eq!(f.meet_of(0b000), 2, "empty meet is the top");
        assert_eq!(f.join_of(0b000), 0, "empty join is the bottom");
        assert_eq!(f.join_of(0b110), 2);
    }

    #[test]
    fn boolean_four_heyting_table() {
        let f = b4();
        let (zero, a, b, one) = (0, 1, 2, 3);
        assert_eq!(f.heyting(a, zero), b, "a → 0 is the complement b");
        assert_eq!(f.heyting(b, zero), a);
        assert_eq!(f.heyting(a, b), b);
        assert_eq!(f.heyting(one, a), a);
        assert_eq!(f.heyting(zero, a), one);
        assert_eq!(f.heyting(a, a), one);
        assert_eq!(f.pseudocomplement(a), b);
        assert_eq!(f.pseudocomplement(zero), one);
        assert_eq!(f.pseudocomplement(one), zero);
    }

    #[test]
    fn three_chain_heyting() {
        let f = three();
        let (zero, m, one) = (0, 1, 2);
        assert_eq!(f.heyting(m, zero), zero, "m → 0 = 0 in the three-chain");
        assert_eq!(f.pseudocomplement(m), zero);
        assert_eq!(f.pseudocomplement(zero), one);
        assert_eq!(f.heyting(one, m), m);
    }

    #[test]
    fn open_sublocale_masks() {
        let f = three();
        // os(m) = {m → b | b}: m → 0 = 0 and m → m = m → 1 = 1, so {0, 1}.
        assert_eq!(f.os_mask(1), 0b101);
        assert_eq!(f.os_mask(f.top()), f.carrier(), "os(1) is everything");
        assert_eq!(f.os_mask(f.bottom()), 1 << f.top(), "os(0) is the one-point sublocale");

        let f = b4();
        assert_eq!(f.os_mask(1), 0b1100, "os(a) = {{b, 1}}");
        assert_eq!(f.os_mask(2), 0b1010, "os(b) = {{a, 1}}");
    }

    #[test]
    fn closed_sublocale_masks_are_upsets() {
        let f = b4();
        assert_eq!(f.cs_mask(1), 0b1010);
        assert_eq!(f.cs_mask(f.bottom()), f.carrier());
        assert_eq!(f.cs_mask(f.top()), 1 << f.top());
    }

    #[test]
    fn primes_of_fixtures() {
        assert_eq!(two().primes(), vec![0]);
        assert_eq!(three().primes(), vec![0, 1]);
        assert_eq!(b4().primes(), vec![1, 2]);
        assert_eq!(trivial().primes(), Vec::<ElementId>::new(), "the top element is never prime");
    }

    #[test]
    fn primes_are_meet_irreducibles() {
        for f in [two(), three(), b4(), trivial()] {
            assert_eq!(f.primes(), f.meet_irreducibles());
        }
    }

    #[test]
    fn every_element_is_a_meet_of_primes() {
        for f in [two(), three(), b4(), trivial()] {
            let primes = f.primes();
            for x in 0..f.n() {
                let above: Mask = primes
                    .iter()
                    .filter(|&&p| f.leq(x, p))
                    .fold(0, |m, &p| m | (1 << p));
                assert_eq!(f.meet_of(above), x);
            }
        }
    }

    #[test]
    fn diamond_and_pentagon_are_not_frames() {
        for lat in [m3(), n5()] {
            let violation = lat.frame_check().unwrap_err();
            // The witness must actually reproduce.
            let by_label = |l: &str| lat.labels().iter().position(|x| x == l).unwrap();
            let subset: Mask = violation
                .subset
                .iter()
                .fold(0, |m, l| m | (1 << by_label(l)));
            let outer = by_label(&violation.outer);
            let lhs = lat.meet(lat.join_of(subset), outer);
            let rhs = bits(subset).fold(lat.bottom(), |acc, a| lat.join(acc, lat.meet(a, outer)));
            assert_ne!(lhs, rhs);
            assert_eq!(lat.label(lhs), violation.lhs);
            assert_eq!(lat.label(rhs), violation.rhs);
            assert!(Frame::new(lat).is_err());
        }
    }

    #[test]
    fn exhaustive_and_binary_checks_agree_on_fixtures() {
        for lat in [
            two().lattice().clone(),
            three().lattice().clone(),
            b4().lattice().clone(),
            m3(),
            n5(),
        ] {
            assert_eq!(
                lat.frame_check_exhaustive().is_ok(),
                lat.frame_check_binary().is_ok()
            );
        }
    }

    #[test]
    fn antisymmetry_violation_is_rejected() {
        let err = FiniteLattice::build(["a", "b"], &[(0, 1), (1, 0)]).unwrap_err();
        assert!(matches!(err, LatticeError::NotAntisymmetric { .. }));
    }

    #[test]
    fn missing_bounds_are_reported() {
        // Two incomparable points: no meet.
        let err = FiniteLattice::build(["a", "b"], &[]).unwrap_err();
        assert_eq!(
            err,
            LatticeError::NoMeet { a: "a".into(), b: "b".into() }
        );
        // A "V": meets exist, but the two arms have no join.
        let err = FiniteLattice::build(["0", "a", "b"], &[(0, 1), (0, 2)]).unwrap_err();
        assert_eq!(
            err,
            LatticeError::NoJoin { a: "a".into(), b: "b".into() }
        );
        assert!(FiniteLattice::build::<[&str; 0], &str>([], &[]).is_err());
    }

    #[test]
    fn dual_swaps_structure() {
        let f = three();
        let d = f.lattice().dual();
        assert_eq!(d.bottom(), f.top());
        assert_eq!(d.top(), f.bottom());
        assert_eq!(d.meet(0, 1), f.lattice().join(0, 1));
        assert_eq!(&d.dual(), f.lattice());
    }

    #[test]
    fn isomorphism_search_finds_and_refutes() {
        let square = FiniteLattice::from_order(["00", "01", "10", "11"], |a, b| {
            (a & 1) <= (b & 1) && (a >> 1) <= (b >> 1)
        })
        .unwrap();
        let iso = find_isomorphism(b4().lattice(), &square).expect("both are 2×2");
        assert_eq!(iso[0], 0);
        assert_eq!(iso[3], 3);

        let chain4 =
            FiniteLattice::build(["0", "1", "2", "3"], &[(0, 1), (1, 2), (2, 3)]).unwrap();
        assert!(!are_isomorphic(&chain4, b4().lattice()));
        assert!(are_isomorphic(&three().lattice().dual(), three().lattice()));
        assert!(!are_isomorphic(&m3(), &n5()));
    }

    #[test]
    fn from_order_matches_build() {
        let by_pairs = FiniteLattice::build(["0", "m", "1"], &[(0, 1), (1, 2)]).unwrap();
        let by_pred = FiniteLattice::from_order(["0", "m", "1"], |a, b| a <= b).unwrap();
        assert_eq!(by_pairs, by_pred);
    }

    /// Random order assertions over a small carrier. Most samples are not
    /// lattices; the ones that are must satisfy the bound laws, and the two
    /// frame-check variants must agree on them.
    fn arb_order_attempt() -> impl Strategy<Value = (usize, Vec<(usize, usize)>)> {
        (2usize..=6).prop_flat_map(|n| {
            let pairs = proptest::collection::vec((0..n, 0..n), 0..=10);
            (Just(n), pairs)
        })
    }

    proptest! {
        #[test]
        fn random_lattices_satisfy_bound_laws((n, pairs) in arb_order_attempt()) {
            let labels: Vec<String> = (0..n).map(|i| i.to_string()).collect();
            let pairs: Vec<(usize, usize)> =
                pairs.into_iter().filter(|&(a, b)| a != b).collect();
            let Ok(lat) = FiniteLattice::build(labels, &pairs) else {
                return Ok(());
            };
            for a in 0..n {
                for b in 0..n {
                    let m = lat.meet(a, b);
                    prop_assert!(lat.leq(m, a) && lat.leq(m, b));
                    for c in 0..n {
                        if lat.leq(c, a) && lat.leq(c, b) {
                            prop_assert!(lat.leq(c, m));
                        }
                    }
                    let j = lat.join(a, b);
                    prop_assert!(lat.leq(a, j) && lat.leq(b, j));
                    for c in 0..n {
                        if lat.leq(a, c) && lat.leq(b, c) {
                            prop_assert!(lat.leq(j, c));
                        }
                    }
                }
            }
            prop_assert_eq!(
                lat.frame_check_exhaustive().is_ok(),
                lat.frame_check_binary().is_ok()
            );
        }

        #[test]
        fn heyting_adjunction_on_random_frames((n, pairs) in arb_order_attempt()) {
            let labels: Vec<String> = (0..n).map(|i| i.to_string()).collect();
            let pairs: Vec<(usize, usize)> =
                pairs.into_iter().filter(|&(a, b)| a != b).collect();
            let Ok(lat) = FiniteLattice::build(labels, &pairs) else {
                return Ok(());
            };
            let Ok(frame) = Frame::new(lat) else {
                return Ok(());
            };
            for a in 0..n {
                for b in 0..n {
                    for c in 0..n {
                        prop_assert_eq!(
                            frame.leq(frame.meet(c, a), b),
                            frame.leq(c, frame.heyting(a, b))
                        );
                    }
                }
            }
        }
    }
}
