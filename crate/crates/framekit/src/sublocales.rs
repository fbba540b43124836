//! Sublocales of a finite frame and the coframe `Sl(L)`.
//!
//! A sublocale is a subset `S ⊆ L` that is closed under all meets
//! (including the empty one, so `1 ∈ S`) and satisfies `a → s ∈ S` for
//! every `a ∈ L` and `s ∈ S`. Sublocales are represented as element masks.
//!
//! [`SublocaleLattice`] enumerates all of them with the lectic closure walk
//! from [`crate::bitset`] and exposes the lattice structure: meets are
//! intersections, and the join of a family is its least upper bound among
//! sublocales, which works out to the meet-closure of the union. The two
//! distinguished kinds are `os(a) = {a → b | b ∈ L}` (open) and
//! `cs(a) = ↑a` (closed); a prime `p ≠ 1` induces the point sublocale
//! `b(p) = {p, 1}`.
//!
//! Three operators on sublocales matter downstream:
//!
//! * `fit(S) = ⋂{os(a) | S ⊆ os(a)}`, whose fixpoints are the fitted
//!   sublocales;
//! * `cl(S) = ↑(⋀S)`, the least closed sublocale containing `S`;
//! * `sp(S) = ⋁{b(p) | b(p) ⊆ S}`, the spatial interior.
//!
//! The maps `stf(S) = {a | S ⊆ os(a)}` (a filter) and
//! `fts(F) = ⋂_{a∈F} os(a)` (a sublocale) form the adjunction
//! `stf(S) ⊑ F ⟺ S ⊆ fts(F)` connecting this module with
//! [`crate::filters`].

use std::collections::HashMap;

use crate::bitset::{bits, enumerate_closed, submasks, Mask};
use crate::lattice::{ElementId, FiniteLattice, Frame, LatticeError};

/// Sublocale enumeration uses `2^n` closure seeds.
pub const MAX_SUBLOCALE_FRAME: usize = 16;
/// Cap on how many sublocales one frame may have.
pub const MAX_SUBLOCALES: usize = 4096;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SublocaleError {
    #[error("frame has {n} elements; sublocale enumeration is capped at {MAX_SUBLOCALE_FRAME}")]
    FrameTooLarge { n: usize },
    #[error("frame has at least {count} sublocales, more than the {MAX_SUBLOCALES} supported")]
    TooMany { count: usize },
}

/// Why a subset fails to be a sublocale, or `None` if it is one.
pub fn sublocale_violation(frame: &Frame, s: Mask) -> Option<String> {
    if s & (1 << frame.top()) == 0 {
        return Some("misses the empty meet 1".into());
    }
    for x in bits(s) {
        for y in bits(s) {
            let m = frame.meet(x, y);
            if s & (1 << m) == 0 {
                return Some(format!(
                    "not meet-closed: {} ∧ {} = {} is missing",
                    frame.label(x),
                    frame.label(y),
                    frame.label(m)
                ));
            }
        }
        for a in 0..frame.n() {
            let h = frame.heyting(a, x);
            if s & (1 << h) == 0 {
                return Some(format!(
                    "not arrow-closed: {} → {} = {} is missing",
                    frame.label(a),
                    frame.label(x),
                    frame.label(h)
                ));
            }
        }
    }
    None
}

pub fn is_sublocale(frame: &Frame, s: Mask) -> bool {
    sublocale_violation(frame, s).is_none()
}

/// The least sublocale containing `s`.
pub fn sublocale_closure(frame: &Frame, s: Mask) -> Mask {
    let mut m = s | (1 << frame.top());
    loop {
        let mut grown = m;
        for x in bits(m) {
            for y in bits(m) {
                grown |= 1 << frame.meet(x, y);
            }
            for a in 0..frame.n() {
                grown |= 1 << frame.heyting(a, x);
            }
        }
        if grown == m {
            return m;
        }
        m = grown;
    }
}

/// Identifies a member of a [`SublocaleLattice`].
pub type SublocaleId = usize;

/// All sublocales of one frame, with lattice structure and the fit/cl/sp
/// operators.
pub struct SublocaleLattice {
    frame: Frame,
    /// Element masks, ascending by mask value.
    subs: Vec<Mask>,
    index: HashMap<Mask, usize>,
}

impl SublocaleLattice {
    pub fn build(frame: &Frame) -> Result<Self, SublocaleError> {
        let n = frame.n();
        if n > MAX_SUBLOCALE_FRAME {
            return Err(SublocaleError::FrameTooLarge { n });
        }
        let subs128 = enumerate_closed(n, |m| sublocale_closure(frame, m as Mask) as u128);
        if subs128.len() > MAX_SUBLOCALES {
            return Err(SublocaleError::TooMany { count: subs128.len() });
        }
        let subs: Vec<Mask> = subs128.into_iter().map(|m| m as Mask).collect();
        let index = subs.iter().enumerate().map(|(i, &m)| (m, i)).collect();
        Ok(Self { frame: frame.clone(), subs, index })
    }

    /// Brute-force enumeration over all subsets, for cross-checking the
    /// closure walk. Only for tiny frames.
    pub fn bruteforce_masks(frame: &Frame) -> Vec<Mask> {
        assert!(frame.n() <= 10, "brute-force sublocale scan is exponential");
        (0..=frame.carrier()).filter(|&m| is_sublocale(frame, m)).collect()
    }

    #[inline]
    pub fn frame(&self) -> &Frame {
        &self.frame
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.subs.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.subs.is_empty()
    }

    #[inline]
    pub fn members(&self, s: SublocaleId) -> Mask {
        self.subs[s]
    }

    pub fn masks(&self) -> &[Mask] {
        &self.subs
    }

    pub fn index_of(&self, mask: Mask) -> Option<SublocaleId> {
        self.index.get(&mask).copied()
    }

    /// Render a sublocale by its members, e.g. `{m,1}`.
    pub fn label(&self, s: SublocaleId) -> String {
        let names: Vec<&str> = bits(self.subs[s]).map(|x| self.frame.label(x)).collect();
        format!("{{{}}}", names.join(","))
    }

    #[inline]
    pub fn leq(&self, s: SublocaleId, t: SublocaleId) -> bool {
        self.subs[s] & !self.subs[t] == 0
    }

    /// `Emp = {1}`, the bottom.
    pub fn bottom(&self) -> SublocaleId {
        self.index[&(1 << self.frame.top())]
    }

    /// The whole frame, the top.
    pub fn top(&self) -> SublocaleId {
        self.index[&self.frame.carrier()]
    }

    /// Meet: intersection.
    pub fn meet(&self, s: SublocaleId, t: SublocaleId) -> SublocaleId {
        self.index[&(self.subs[s] & self.subs[t])]
    }

    pub fn meet_of(&self, ss: impl IntoIterator<Item = SublocaleId>) -> SublocaleId {
        let mask = ss
            .into_iter()
            .fold(self.frame.carrier(), |acc, s| acc & self.subs[s]);
        self.index[&mask]
    }

    /// Join: the least sublocale containing the union, computed as the
    /// intersection of all upper bounds.
    pub fn join(&self, s: SublocaleId, t: SublocaleId) -> SublocaleId {
        self.join_mask(self.subs[s] | self.subs[t])
    }

    pub fn join_of(&self, ss: impl IntoIterator<Item = SublocaleId>) -> SublocaleId {
        self.join_mask(ss.into_iter().fold(0, |acc, s| acc | self.subs[s]))
    }

    fn join_mask(&self, union: Mask) -> SublocaleId {
        let lub = self
            .subs
            .iter()
            .filter(|&&t| union & !t == 0)
            .fold(self.frame.carrier(), |acc, &t| acc & t);
        self.index[&lub]
    }

    /// The join formula: meets of subsets of the union (including the empty
    /// meet). Used to cross-check [`Self::join`].
    pub fn join_by_meet_closure(&self, s: SublocaleId, t: SublocaleId) -> Mask {
        let union = self.subs[s] | self.subs[t];
        let mut mask = 1 << self.frame.top();
        for m in submasks(union) {
            mask |= 1 << bits(m).fold(self.frame.top(), |acc, x| self.frame.meet(acc, x));
        }
        mask
    }

    /// Open sublocale `os(a)`.
    pub fn os(&self, a: ElementId) -> SublocaleId {
        self.index[&self.frame.os_mask(a)]
    }

    /// Closed sublocale `cs(a) = ↑a`.
    pub fn cs(&self, a: ElementId) -> SublocaleId {
        self.index[&self.frame.cs_mask(a)]
    }

    /// The point sublocale `b(p) = {p, 1}`, when `{p, 1}` is a sublocale
    /// (exactly for primes `p ≠ 1`).
    pub fn point(&self, p: ElementId) -> Option<SublocaleId> {
        if p == self.frame.top() {
            return None;
        }
        self.index_of((1 << p) | (1 << self.frame.top()))
    }

    /// `fit(S) = ⋂{os(a) | S ⊆ os(a)}` on raw masks.
    pub fn fit_mask(&self, s: Mask) -> Mask {
        (0..self.frame.n())
            .map(|a| self.frame.os_mask(a))
            .filter(|&open| s & !open == 0)
            .fold(self.frame.carrier(), |acc, open| acc & open)
    }

    pub fn fit(&self, s: SublocaleId) -> SublocaleId {
        self.index[&self.fit_mask(self.subs[s])]
    }

    /// `cl(S) = ↑(⋀S)`, the closure.
    pub fn cl(&self, s: SublocaleId) -> SublocaleId {
        let bottom = bits(self.subs[s])
            .fold(self.frame.top(), |acc, x| self.frame.meet(acc, x));
        self.cs(bottom)
    }

    /// `sp(S) = ⋁{b(p) | b(p) ⊆ S}`, the spatial interior.
    pub fn sp(&self, s: SublocaleId) -> SublocaleId {
        let points = self
            .frame
            .primes()
            .into_iter()
            .filter_map(|p| self.point(p))
            .filter(|&b| self.leq(b, s));
        self.join_of(points)
    }

    /// The sublocale order as an explicit lattice (at most 64 sublocales).
    pub fn as_lattice(&self) -> Result<FiniteLattice, LatticeError> {
        if self.subs.len() > crate::lattice::MAX_ELEMENTS {
            return Err(LatticeError::TooLarge { n: self.subs.len() });
        }
        let labels: Vec<String> = (0..self.subs.len()).map(|s| self.label(s)).collect();
        FiniteLattice::from_order(labels, |i, j| self.subs[i] & !self.subs[j] == 0)
    }

    /// Indices of the open sublocales `os[L]`.
    pub fn open_class(&self) -> Vec<SublocaleId> {
        self.sorted_class((0..self.frame.n()).map(|a| self.os(a)))
    }

    /// Indices of the closed sublocales `cs[L]`.
    pub fn closed_class(&self) -> Vec<SublocaleId> {
        self.sorted_class((0..self.frame.n()).map(|a| self.cs(a)))
    }

    /// Locally closed sublocales `cs(x) ∩ os(y)`.
    pub fn locally_closed_class(&self) -> Vec<SublocaleId> {
        let mut ids = Vec::new();
        for x in 0..self.frame.n() {
            for y in 0..self.frame.n() {
                ids.push(self.meet(self.cs(x), self.os(y)));
            }
        }
        self.sorted_class(ids)
    }

    /// Point sublocales `b(p)` for primes `p`.
    pub fn point_class(&self) -> Vec<SublocaleId> {
        self.sorted_class(
            self.frame
                .primes()
                .into_iter()
                .map(|p| self.point(p).expect("a prime induces a point sublocale")),
        )
    }

    /// Fitted sublocales, the fixpoints of `fit`.
    pub fn fitted_class(&self) -> Vec<SublocaleId> {
        (0..self.len()).filter(|&s| self.fit(s) == s).collect()
    }

    /// Compact sublocales: every directed `D ⊆ S` whose join *within* `S`
    /// is `1` already contains `1`. (The join within `S` is the meet of the
    /// upper bounds lying in `S`.)
    pub fn compact_class(&self) -> Vec<SublocaleId> {
        (0..self.len()).filter(|&s| self.is_compact(s)).collect()
    }

    fn is_compact(&self, s: SublocaleId) -> bool {
        let top = self.frame.top();
        let without_top = self.subs[s] & !(1 << top);
        submasks(without_top).all(|d| {
            if d == 0 {
                return true;
            }
            let upper = bits(d).fold(self.subs[s], |acc, x| {
                acc & self.frame.lattice().up_mask(x)
            });
            let join_in_s = bits(upper).fold(top, |acc, x| self.frame.meet(acc, x));
            join_in_s != top || !self.is_directed(d)
        })
    }

    fn is_directed(&self, d: Mask) -> bool {
        bits(d).all(|x| {
            bits(d).all(|y| {
                self.frame.lattice().up_mask(x) & self.frame.lattice().up_mask(y) & d != 0
            })
        })
    }

    /// Spatial sublocales, the fixpoints of `sp`.
    pub fn spatial_class(&self) -> Vec<SublocaleId> {
        (0..self.len()).filter(|&s| self.sp(s) == s).collect()
    }

    /// Close a class under all joins; the empty join is `Emp`.
    pub fn join_closure(&self, class: &[SublocaleId]) -> Vec<SublocaleId> {
        let mut seen = vec![false; self.len()];
        seen[self.bottom()] = true;
        for &s in class {
            seen[s] = true;
        }
        loop {
            let current: Vec<SublocaleId> =
                (0..self.len()).filter(|&s| seen[s]).collect();
            let mut grew = false;
            for &s in &current {
                for &t in &current {
                    let j = self.join(s, t);
                    if !seen[j] {
                        seen[j] = true;
                        grew = true;
                    }
                }
            }
            if !grew {
                return (0..self.len()).filter(|&s| seen[s]).collect();
            }
        }
    }

    /// Close a class under fitted joins `(S, T) ↦ fit(S ∨ T)`; the empty
    /// fitted join is `fit(Emp) = Emp`.
    pub fn fitted_join_closure(&self, class: &[SublocaleId]) -> Vec<SublocaleId> {
        let mut seen = vec![false; self.len()];
        seen[self.fit(self.bottom())] = true;
        for &s in class {
            seen[self.fit(s)] = true;
        }
        loop {
            let current: Vec<SublocaleId> =
                (0..self.len()).filter(|&s| seen[s]).collect();
            let mut grew = false;
            for &s in &current {
                for &t in &current {
                    let j = self.fit(self.join(s, t));
                    if !seen[j] {
                        seen[j] = true;
                        grew = true;
                    }
                }
            }
            if !grew {
                return (0..self.len()).filter(|&s| seen[s]).collect();
            }
        }
    }

    /// Apply `fit` to every member of a class.
    pub fn fit_image(&self, class: &[SublocaleId]) -> Vec<SublocaleId> {
        self.sorted_class(class.iter().map(|&s| self.fit(s)))
    }

    fn sorted_class(&self, ids: impl IntoIterator<Item = SublocaleId>) -> Vec<SublocaleId> {
        let mut v: Vec<SublocaleId> = ids.into_iter().collect();
        v.sort_unstable();
        v.dedup();
        v
    }
}

/// `stf(S) = {a | S ⊆ os(a)}` as an element mask; always a filter.
pub fn stf_mask(frame: &Frame, s: Mask) -> Mask {
    (0..frame.n())
        .filter(|&a| s & !frame.os_mask(a) == 0)
        .fold(0, |m, a| m | (1 << a))
}

/// `fts(F) = ⋂_{a∈F} os(a)` as an element mask; always a fitted sublocale.
pub fn fts_mask(frame: &Frame, filter_members: Mask) -> Mask {
    bits(filter_members).fold(frame.carrier(), |acc, a| acc & frame.os_mask(a))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use crate::filters::FilterLattice;
    use crate::lattice::fixtures;
    use proptest::prelude::*;

    #[test]
    fn three_chain_sublocales() {
        let frame = fixtures::three();
        let sl = SublocaleLattice::build(&frame).unwrap();
        // {Emp, {m,1}, {0,1}, Fll} — masks 0b100, 0b110, 0b101, 0b111.
        assert_eq!(sl.masks(), &[0b100, 0b101, 0b110, 0b111]);
        assert_eq!(sl.label(sl.bottom()), "{1}");
        assert_eq!(sl.members(sl.top()), 0b111);

        // b(m) = cs(m) and b(0) = os(m).
        assert_eq!(sl.point(1), Some(sl.cs(1)));
        assert_eq!(sl.point(0), Some(sl.os(1)));
        assert_eq!(sl.members(sl.os(1)), 0b101);
        // fit(cs(m)) is the whole frame: no open contains m except os(1).
        assert_eq!(sl.fit(sl.cs(1)), sl.top());
    }

    #[test]
    fn boolean_four_sublocales() {
        let frame = fixtures::b4();
        let sl = SublocaleLattice::build(&frame).unwrap();
        assert_eq!(sl.len(), 4);
        // {0,1} is not a sublocale of b4: a → 0 = b must be inside.
        assert!(!is_sublocale(&frame, 0b1001));
        assert_eq!(
            sublocale_violation(&frame, 0b1001).unwrap(),
            "not arrow-closed: a → 0 = b is missing"
        );
        // Boolean frames: every sublocale is closed, and os(a) = cs(a → 0).
        let closed = sl.closed_class();
        assert_eq!(closed.len(), 4);
        assert_eq!(sl.os(1), sl.cs(2));
        assert_eq!(sl.fitted_class().len(), 4, "Boolean frames are fit");
    }

    #[test]
    fn chain_sublocales_are_subsets_containing_top() {
        // On a chain every subset containing 1 is a sublocale: 2^(n-1) total.
        let frame = catalog::chain_frame(5);
        let sl = SublocaleLattice::build(&frame).unwrap();
        assert_eq!(sl.len(), 1 << 4);
        for m in 0..=frame.carrier() {
            assert_eq!(is_sublocale(&frame, m), m & (1 << frame.top()) != 0);
        }
    }

    #[test]
    fn closure_walk_matches_bruteforce() {
        for frame in [
            fixtures::three(),
            fixtures::b4(),
            catalog::chain_frame(4),
            catalog::powerset_frame(3),
        ] {
            let sl = SublocaleLattice::build(&frame).unwrap();
            assert_eq!(sl.masks(), SublocaleLattice::bruteforce_masks(&frame).as_slice());
        }
    }

    #[test]
    fn open_closed_laws() {
        for frame in [fixtures::three(), fixtures::b4(), catalog::powerset_frame(3)] {
            let sl = SublocaleLattice::build(&frame).unwrap();
            let n = frame.n();
            assert_eq!(sl.os(frame.top()), sl.top());
            assert_eq!(sl.os(frame.bottom()), sl.bottom());
            assert_eq!(sl.cs(frame.top()), sl.bottom());
            assert_eq!(sl.cs(frame.bottom()), sl.top());
            for a in 0..n {
                assert_eq!(sl.meet(sl.cs(a), sl.os(a)), sl.bottom());
                assert_eq!(sl.join(sl.cs(a), sl.os(a)), sl.top());
                for b in 0..n {
                    assert_eq!(sl.join(sl.os(a), sl.os(b)), sl.os(frame.join(a, b)));
                    assert_eq!(sl.meet(sl.os(a), sl.os(b)), sl.os(frame.meet(a, b)));
                    assert_eq!(sl.meet(sl.cs(a), sl.cs(b)), sl.cs(frame.join(a, b)));
                    assert_eq!(sl.join(sl.cs(a), sl.cs(b)), sl.cs(frame.meet(a, b)));
                }
            }
        }
    }

    #[test]
    fn stf_fts_fixtures() {
        let frame = fixtures::three();
        // stf(cs(a)) = cf(a), stf(os(a)) = ↑a, fts(↑a) = os(a), stf(Fll) = {1}.
        let filt = FilterLattice::build(&frame).unwrap();
        for a in 0..frame.n() {
            assert_eq!(stf_mask(&frame, frame.cs_mask(a)), filt.members(filt.cf(a)));
            assert_eq!(stf_mask(&frame, frame.os_mask(a)), frame.lattice().up_mask(a));
            assert_eq!(fts_mask(&frame, frame.lattice().up_mask(a)), frame.os_mask(a));
        }
        assert_eq!(stf_mask(&frame, frame.carrier()), 1 << frame.top());
        // stf({m,1}) = ↑1: only os(1) contains m.
        assert_eq!(stf_mask(&frame, 0b110), 1 << frame.top());
    }

    #[test]
    fn finite_degeneracies_on_fixtures() {
        for frame in [fixtures::three(), fixtures::b4(), catalog::chain_frame(4)] {
            let sl = SublocaleLattice::build(&frame).unwrap();
            // Fitted = open, every sublocale compact and spatial.
            assert_eq!(sl.fitted_class(), sl.open_class());
            assert_eq!(sl.compact_class(), (0..sl.len()).collect::<Vec<_>>());
            assert_eq!(sl.spatial_class(), (0..sl.len()).collect::<Vec<_>>());
        }
    }

    proptest! {
        /// Joins by upper-bound scan agree with the meet-closure formula.
        #[test]
        fn join_formula_agrees(choice in 0usize..19) {
            let up = catalog::enumerate_posets(3).swap_remove(choice);
            let frame = catalog::downset_frame(3, &up);
            let sl = SublocaleLattice::build(&frame).unwrap();
            for s in 0..sl.len() {
                for t in 0..sl.len() {
                    prop_assert_eq!(
                        sl.members(sl.join(s, t)),
                        sl.join_by_meet_closure(s, t)
                    );
                }
            }
        }

        /// The adjunction `stf(S) ⊑ F ⟺ S ⊆ fts(F)`, i.e.
        /// `F ⊆ stf(S) ⟺ S ⊆ fts(F)`, plus `fts ∘ stf = id` on fitted
        /// sublocales.
        #[test]
        fn stf_fts_adjunction(choice in 0usize..19) {
            let up = catalog::enumerate_posets(3).swap_remove(choice);
            let frame = catalog::downset_frame(3, &up);
            let sl = SublocaleLattice::build(&frame).unwrap();
            let filt = FilterLattice::build(&frame).unwrap();
            for s in 0..sl.len() {
                let stf = stf_mask(&frame, sl.members(s));
                for f in 0..filt.len() {
                    let members = filt.members(f);
                    prop_assert_eq!(
                        members & !stf == 0,
                        sl.members(s) & !fts_mask(&frame, members) == 0
                    );
                }
            }
            for &s in &sl.fitted_class() {
                prop_assert_eq!(fts_mask(&frame, stf_mask(&frame, sl.members(s))), sl.members(s));
            }
        }

        /// `fit` is a closure-like operator upward: `S ⊆ fit(S)`,
        /// idempotent, monotone; and `cl(S)` is the least closed sublocale
        /// above `S`.
        #[test]
        fn fit_and_cl_operators(choice in 0usize..19) {
            let up = catalog::enumerate_posets(3).swap_remove(choice);
            let frame = catalog::downset_frame(3, &up);
            let sl = SublocaleLattice::build(&frame).unwrap();
            for s in 0..sl.len() {
                prop_assert!(sl.leq(s, sl.fit(s)));
                prop_assert_eq!(sl.fit(sl.fit(s)), sl.fit(s));
                prop_assert!(sl.leq(s, sl.cl(s)));
                let closed = sl.closed_class();
                let least = closed.iter().copied().filter(|&c| sl.leq(s, c))
                    .fold(sl.top(), |acc, c| sl.meet(acc, c));
                prop_assert_eq!(sl.cl(s), least);
                for t in 0..sl.len() {
                    if sl.leq(s, t) {
                        prop_assert!(sl.leq(sl.fit(s), sl.fit(t)));
                    }
                }
            }
        }
    }
}
