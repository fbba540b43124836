//! Filters of a finite frame, their coframe, and the distinguished classes.
//!
//! A filter is a nonempty upward-closed subset closed under binary meets;
//! the improper filter (all of `L`) counts. [`FilterLattice`] enumerates all
//! filters of a frame definitionally — no use of the fact that finite
//! filters are principal — and orders them by `F ⊑ G ⟺ G ⊆ F`, so that
//! joins are intersections (`⨆A = ⋂A`, with `⨆∅ = L`), the top is `{1}`,
//! and the bottom is `L` itself. In this order `Filt(L)` is a coframe; its
//! co-Heyting difference is
//!
//! ```text
//! H ∖ G = {a | ∀b ∈ G: b ∨ a ∈ H}
//! ```
//!
//! the least `F` with `H ⊑ G ⊔ F`, and the supplement is `F# = {1} ∖ F`.
//!
//! [`FilterAnalysis`] computes the distinguished classes, each directly from
//! its definition by scanning element subsets with precomputed
//! [`SubsetTables`]:
//!
//! * completely prime (`⋁A ∈ F ⟹ A ∩ F ≠ ∅`, for **all** subsets `A`),
//! * Scott-open (the same, for directed nonempty `A`),
//! * exact (closed under exact meets: `(⋀M) ∨ b = ⋀_{a∈M}(a ∨ b)` for all
//!   `b`),
//! * strongly exact (closed under meets with `⋂_{a∈M} os(a) = os(⋀M)`),
//! * closed (`cf(a) = {x | a ∨ x = 1}`), open/principal (`↑a`), locally
//!   closed (`↑y ∖ ↑x`), and regular (supplements `{1} ∖ F`).

use std::collections::HashMap;

use crate::bitset::{bits, submasks, Mask};
use crate::lattice::{ElementId, FiniteLattice, Frame};

/// Class computations scan all `2^n` element subsets.
pub const MAX_FILTER_FRAME: usize = 16;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FilterError {
    #[error("frame has {n} elements; filter analysis scans subsets and is capped at {MAX_FILTER_FRAME}")]
    FrameTooLarge { n: usize },
    #[error("found {count} filters, more than the 64 supported")]
    TooManyFilters { count: usize },
}

/// Subset-indexed dynamic programming tables for one frame: meets and joins
/// of arbitrary subsets, intersections of open-sublocale carriers, and the
/// distributed meets `⋀_{a∈M}(a ∨ b)` used by the exactness predicates.
pub struct SubsetTables {
    /// `meet[m]` = `⋀ m`.
    pub meet: Vec<u8>,
    /// `join[m]` = `⋁ m`.
    pub join: Vec<u8>,
    /// `os_int[m]` = `⋂_{a∈m} os(a)` as a carrier mask (`os(1)`-like full
    /// mask at `m = 0`).
    pub os_int: Vec<Mask>,
    /// `meetjoin[b][m]` = `⋀_{a∈m} (a ∨ b)`.
    pub meetjoin: Vec<Vec<u8>>,
}

impl SubsetTables {
    pub fn new(frame: &Frame) -> Self {
        let n = frame.n();
        assert!(n <= MAX_FILTER_FRAME, "subset tables are exponential in the frame size");
        let size = 1usize << n;
        let mut meet = vec![frame.top() as u8; size];
        let mut join = vec![frame.bottom() as u8; size];
        let mut os_int = vec![frame.carrier(); size];
        for m in 1..size {
            let low = m.trailing_zeros() as usize;
            let rest = m & (m - 1);
            meet[m] = frame.meet(meet[rest] as usize, low) as u8;
            join[m] = frame.join(join[rest] as usize, low) as u8;
            os_int[m] = os_int[rest] & frame.os_mask(low);
        }
        let meetjoin = (0..n)
            .map(|b| {
                let mut row = vec![frame.top() as u8; size];
                for m in 1..size {
                    let low = m.trailing_zeros() as usize;
                    let rest = m & (m - 1);
                    row[m] = frame.meet(row[rest] as usize, frame.join(low, b)) as u8;
                }
                row
            })
            .collect();
        Self { meet, join, os_int, meetjoin }
    }

    /// `M` is exact: the meet distributes over every join,
    /// `(⋀M) ∨ b = ⋀_{a∈M}(a ∨ b)`.
    pub fn is_exact(&self, frame: &Frame, m: Mask) -> bool {
        (0..frame.n())
            .all(|b| frame.join(self.meet[m as usize] as usize, b) == self.meetjoin[b][m as usize] as usize)
    }

    /// `M` is strongly exact: the open sublocales intersect to an open one,
    /// `⋂_{a∈M} os(a) = os(⋀M)`.
    pub fn is_strongly_exact(&self, frame: &Frame, m: Mask) -> bool {
        self.os_int[m as usize] == frame.os_mask(self.meet[m as usize] as usize)
    }
}

/// All filters of a frame with the `⊑` (reverse inclusion) lattice on them.
pub struct FilterLattice {
    frame: Frame,
    /// Element masks of the filters, ascending by mask value.
    filters: Vec<Mask>,
    index: HashMap<Mask, usize>,
    /// The poset `(Filt, ⊑)` with definitionally computed meets and joins.
    lat: FiniteLattice,
    /// `(Filt, ⊑)^op` validated as a frame — the coframe structure.
    dual_frame: Frame,
}

/// Index of a filter within its [`FilterLattice`].
pub type FilterId = usize;

/// Element masks of all filters of a finite lattice: nonempty upward-closed
/// subsets closed under binary meets, the improper one included.
pub(crate) fn lattice_filter_masks(lat: &FiniteLattice) -> Vec<Mask> {
    (1..=lat.carrier())
        .filter(|&m| {
            bits(m).all(|a| {
                lat.up_mask(a) & !m == 0 && bits(m).all(|b| m & (1 << lat.meet(a, b)) != 0)
            })
        })
        .collect()
}

impl FilterLattice {
    pub fn build(frame: &Frame) -> Result<Self, FilterError> {
        let n = frame.n();
        if n > MAX_FILTER_FRAME {
            return Err(FilterError::FrameTooLarge { n });
        }
        let filters = lattice_filter_masks(frame.lattice());
        if filters.len() > 64 {
            return Err(FilterError::TooManyFilters { count: filters.len() });
        }
        let index: HashMap<Mask, usize> =
            filters.iter().enumerate().map(|(i, &m)| (m, i)).collect();
        let labels: Vec<String> = filters.iter().map(|&m| Self::filter_label(frame, m)).collect();
        let lat = FiniteLattice::from_order(labels, |i, j| filters[j] & !filters[i] == 0)
            .expect("the filters of a frame form a lattice under reverse inclusion");
        let dual_frame = Frame::new(lat.dual())
            .expect("the filter lattice of a frame is a coframe");
        Ok(Self { frame: frame.clone(), filters, index, lat, dual_frame })
    }

    /// Name a filter by its minimal elements; finite filters have exactly
    /// one, so this renders as `↑x`.
    fn filter_label(frame: &Frame, m: Mask) -> String {
        let minimal: Vec<ElementId> = bits(m)
            .filter(|&a| frame.lattice().dn_mask(a) & m == 1 << a)
            .collect();
        match minimal.as_slice() {
            [x] => format!("↑{}", frame.label(*x)),
            xs => format!(
                "↑{{{}}}",
                xs.iter().map(|&x| frame.label(x)).collect::<Vec<_>>().join(",")
            ),
        }
    }

    #[inline]
    pub fn frame(&self) -> &Frame {
        &self.frame
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.filters.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.filters.is_empty()
    }

    /// Element mask of a filter.
    #[inline]
    pub fn members(&self, f: FilterId) -> Mask {
        self.filters[f]
    }

    pub fn filters(&self) -> &[Mask] {
        &self.filters
    }

    pub fn index_of(&self, mask: Mask) -> Option<FilterId> {
        self.index.get(&mask).copied()
    }

    #[inline]
    pub fn contains(&self, f: FilterId, a: ElementId) -> bool {
        self.filters[f] & (1 << a) != 0
    }

    /// The lattice `(Filt, ⊑)`.
    #[inline]
    pub fn lat(&self) -> &FiniteLattice {
        &self.lat
    }

    /// The coframe structure, i.e. `(Filt, ⊑)^op` as a validated frame.
    #[inline]
    pub fn dual_frame(&self) -> &Frame {
        &self.dual_frame
    }

    /// `F ⊑ G`, i.e. `G ⊆ F`.
    #[inline]
    pub fn sqleq(&self, f: FilterId, g: FilterId) -> bool {
        self.lat.leq(f, g)
    }

    /// `⊑`-meet: the filter generated by the union, `{f ∧ g | f ∈ F, g ∈ G}`.
    #[inline]
    pub fn meet(&self, f: FilterId, g: FilterId) -> FilterId {
        self.lat.meet(f, g)
    }

    /// `⊑`-join: the intersection.
    #[inline]
    pub fn join(&self, f: FilterId, g: FilterId) -> FilterId {
        self.lat.join(f, g)
    }

    /// The top `{1}`.
    #[inline]
    pub fn top(&self) -> FilterId {
        self.lat.top()
    }

    /// The bottom, the improper filter `L = ↑0`.
    #[inline]
    pub fn bottom(&self) -> FilterId {
        self.lat.bottom()
    }

    /// Open (principal) filter `↑a`.
    pub fn of(&self, a: ElementId) -> FilterId {
        self.index[&self.frame.lattice().up_mask(a)]
    }

    /// Closed filter `cf(a) = {x | a ∨ x = 1}`.
    pub fn cf(&self, a: ElementId) -> FilterId {
        let mask: Mask = (0..self.frame.n())
            .filter(|&x| self.frame.join(a, x) == self.frame.top())
            .fold(0, |m, x| m | (1 << x));
        *self
            .index
            .get(&mask)
            .expect("cf(a) = {x | a ∨ x = 1} is always a filter")
    }

    /// Co-Heyting difference `H ∖ G = {a | ∀b ∈ G: b ∨ a ∈ H}`, the least
    /// `F` with `H ⊑ G ⊔ F`.
    pub fn difference(&self, h: FilterId, g: FilterId) -> FilterId {
        let mask: Mask = (0..self.frame.n())
            .filter(|&a| {
                bits(self.filters[g]).all(|b| self.contains(h, self.frame.join(b, a)))
            })
            .fold(0, |m, a| m | (1 << a));
        *self
            .index
            .get(&mask)
            .expect("a difference of filters is always a filter")
    }

    /// Supplement `F# = {1} ∖ F`.
    pub fn supplement(&self, f: FilterId) -> FilterId {
        self.difference(self.top(), f)
    }

    /// The generator when the filter is principal (`F = ↑x`).
    pub fn principal_generator(&self, f: FilterId) -> Option<ElementId> {
        let m = self.filters[f];
        bits(m).find(|&x| self.frame.lattice().up_mask(x) == m)
    }
}

/// The distinguished classes of filters, as masks over filter indices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FilterClass {
    All,
    CompletelyPrime,
    ScottOpen,
    Exact,
    StronglyExact,
    Closed,
    Open,
    LocallyClosed,
    Regular,
}

impl FilterClass {
    pub const ALL: [FilterClass; 9] = [
        FilterClass::All,
        FilterClass::CompletelyPrime,
        FilterClass::ScottOpen,
        FilterClass::Exact,
        FilterClass::StronglyExact,
        FilterClass::Closed,
        FilterClass::Open,
        FilterClass::LocallyClosed,
        FilterClass::Regular,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            FilterClass::All => "filt",
            FilterClass::CompletelyPrime => "cp",
            FilterClass::ScottOpen => "so",
            FilterClass::Exact => "ex",
            FilterClass::StronglyExact => "se",
            FilterClass::Closed => "cl",
            FilterClass::Open => "of",
            FilterClass::LocallyClosed => "lcl",
            FilterClass::Regular => "r",
        }
    }

    pub fn parse(s: &str) -> Option<FilterClass> {
        FilterClass::ALL.into_iter().find(|c| c.name() == s)
    }
}

/// A frame's filter lattice together with every distinguished class.
pub struct FilterAnalysis {
    pub filt: FilterLattice,
    pub tables: SubsetTables,
    completely_prime: u64,
    scott_open: u64,
    exact: u64,
    strongly_exact: u64,
    closed: u64,
    open: u64,
    locally_closed: u64,
    regular: u64,
}

impl FilterAnalysis {
    pub fn analyze(frame: &Frame) -> Result<Self, FilterError> {
        let filt = FilterLattice::build(frame)?;
        let tables = SubsetTables::new(frame);
        let n = frame.n();
        let count = filt.len();

        let mut completely_prime = 0u64;
        let mut scott_open = 0u64;
        let mut exact = 0u64;
        let mut strongly_exact = 0u64;
        for f in 0..count {
            let members = filt.members(f);
            let complement = frame.carrier() & !members;

            // Completely prime: no subset of the complement joins into the
            // filter. The empty subset joins to 0, so the improper filter
            // is never completely prime.
            let cp = submasks(complement)
                .all(|a| members & (1 << tables.join[a as usize]) == 0);
            if cp {
                completely_prime |= 1 << f;
            }

            // Scott-open: the same for directed nonempty subsets.
            let so = submasks(complement).all(|a| {
                a == 0
                    || members & (1 << tables.join[a as usize]) == 0
                    || !Self::is_directed(frame, a)
            });
            if so {
                scott_open |= 1 << f;
            }

            // Exact / strongly exact: every subset of the filter whose meet
            // is exact (resp. strongly exact) must keep its meet inside.
            let ex = submasks(members).all(|m| {
                !tables.is_exact(frame, m) || members & (1 << tables.meet[m as usize]) != 0
            });
            if ex {
                exact |= 1 << f;
            }
            let se = submasks(members).all(|m| {
                !tables.is_strongly_exact(frame, m)
                    || members & (1 << tables.meet[m as usize]) != 0
            });
            if se {
                strongly_exact |= 1 << f;
            }
        }

        let mut closed = 0u64;
        let mut open = 0u64;
        for a in 0..n {
            closed |= 1 << filt.cf(a);
            open |= 1 << filt.of(a);
        }

        let mut locally_closed = 0u64;
        for y in 0..n {
            for x in 0..n {
                locally_closed |= 1 << filt.difference(filt.of(y), filt.of(x));
            }
        }

        let mut regular = 0u64;
        for f in 0..count {
            regular |= 1 << filt.supplement(f);
        }

        Ok(Self {
            filt,
            tables,
            completely_prime,
            scott_open,
            exact,
            strongly_exact,
            closed,
            open,
            locally_closed,
            regular,
        })
    }

    /// Nonempty, and every pair has an upper bound inside the set.
    pub(crate) fn is_directed(frame: &Frame, m: Mask) -> bool {
        m != 0
            && bits(m).all(|a| {
                bits(m).all(|b| {
                    frame.lattice().up_mask(a) & frame.lattice().up_mask(b) & m != 0
                })
            })
    }

    /// Mask over filter indices of a class.
    pub fn members(&self, class: FilterClass) -> u64 {
        match class {
            FilterClass::All => {
                if self.filt.len() == 64 {
                    u64::MAX
                } else {
                    (1u64 << self.filt.len()) - 1
                }
            }
            FilterClass::CompletelyPrime => self.completely_prime,
            FilterClass::ScottOpen => self.scott_open,
            FilterClass::Exact => self.exact,
            FilterClass::StronglyExact => self.strongly_exact,
            FilterClass::Closed => self.closed,
            FilterClass::Open => self.open,
            FilterClass::LocallyClosed => self.locally_closed,
            FilterClass::Regular => self.regular,
        }
    }

    pub fn class_indices(&self, class: FilterClass) -> Vec<FilterId> {
        bits(self.members(class)).collect()
    }

    /// Close a set of filters under all intersections; the empty
    /// intersection is the improper filter `L`, so the result always
    /// contains the `⊑`-bottom.
    pub fn int_closure(&self, class: u64) -> u64 {
        let mut result = class | (1 << self.filt.bottom());
        loop {
            let mut grown = result;
            for f in bits(result as Mask) {
                for g in bits(result as Mask) {
                    grown |= 1 << self.filt.join(f, g);
                }
            }
            if grown == result {
                return result;
            }
            result = grown;
        }
    }

    /// Close a set of filters under `⊑`-meets, including the empty meet
    /// (the top `{1}`).
    pub fn meet_closure(&self, class: u64) -> u64 {
        let mut result = class | (1 << self.filt.top());
        loop {
            let mut grown = result;
            for f in bits(result as Mask) {
                for g in bits(result as Mask) {
                    grown |= 1 << self.filt.meet(f, g);
                }
            }
            if grown == result {
                return result;
            }
            result = grown;
        }
    }
}
