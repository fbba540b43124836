//! Extensions of a frame by a class of filters, plus two companion
//! constructions on the filter side.
//!
//! For a class `F ⊆ Filt(L)` the extension is the Galois-closed-set lattice
//! of the membership polarity,
//!
//! ```text
//! L^F = GC(F, L, ∋)
//! ```
//!
//! which comes with two canonical maps: `ε: L → L^F` sending an element to
//! the closed set `{F ∈ F | a ∈ F}`, and `κ: F → L^F` sending a filter to
//! the closure of its singleton. The pair is characterized by two axioms —
//! every member of `L^F` is a join of sets `κ(F) = ⋀ε[F]` and a meet of
//! sets `ε(a)` (density), and `⋀ε[F] ≤ ε(a)` forces `a ∈ F` (separation) —
//! and [`FilterExtension::verify`] checks both from scratch, together with
//! the concrete description: `L^F` is isomorphic to `Int(F)`, the
//! intersection closure of the class inside `Filt(L)`, under `S ↦ ⋂S`, with
//! `ε(a) = ⋂{F ∈ F | a ∈ F}` and `κ` the identity on filters.
//!
//! The behaviour of `ε` is what distinguishes the classes: it always
//! preserves finite meets and `0`, it preserves a meet `⋀M` exactly when
//! every filter of the class is closed under that meet, and it is injective
//! exactly when the class separates elements — equivalently when every
//! principal filter is an intersection of class members. Those
//! characterizations live in [`FilterExtension::basic_properties`],
//! [`FilterExtension::separability`] and
//! [`FilterExtension::meet_preservation`].
//!
//! [`dlat_canonical_extension`] runs the same polarity machinery on the
//! filter–ideal relation `F ∩ I ≠ ∅` of a finite distributive lattice and
//! checks that finiteness collapses the completion, and
//! [`completely_prime_upsets`] identifies `Int(CP)` with the up-set lattice
//! of the points.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bitset::{bits, bits128, full_mask, full_mask128, set_label, Mask};
use crate::filters::{lattice_filter_masks, FilterAnalysis, FilterClass, FilterId};
use crate::lattice::{ElementId, FiniteLattice};
use crate::polarity::{GaloisFamily, Polarity};

/// Subset scans run in full up to `2^SCAN_CAP_BITS` subsets; beyond that a
/// deterministic sample stands in for the powerset.
pub const SCAN_CAP_BITS: usize = 12;

/// Every subset mask of a `size`-element set while `size ≤ SCAN_CAP_BITS`;
/// otherwise the empty set, the full set, all singletons and pairs, and a
/// fixed-seed pseudorandom sample of `2^SCAN_CAP_BITS` further masks.
pub fn subset_scan(size: usize) -> Vec<Mask> {
    if size <= SCAN_CAP_BITS {
        return (0..(1u64 << size)).collect();
    }
    let mut masks: Vec<Mask> = vec![0, full_mask(size)];
    for i in 0..size {
        masks.push(1 << i);
        for j in (i + 1)..size {
            masks.push((1 << i) | (1 << j));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0x5ca9);
    masks.extend((0..(1usize << SCAN_CAP_BITS)).map(|_| rng.gen::<u64>() & full_mask(size)));
    masks.sort_unstable();
    masks.dedup();
    masks
}

/// Verdict of [`FilterExtension::meet_preservation`] for one element subset.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MeetVerdict {
    /// `ε(⋀M) = ⋀ε[M]` in the extension.
    pub preserved: bool,
    /// Every filter of the class containing `M` contains `⋀M`.
    pub filters_closed: bool,
}

/// The four equivalent separability criteria of a filter class.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SeparabilityReport {
    /// `ε` is injective.
    pub eps_injective: bool,
    /// Distinct elements are told apart by some filter of the class.
    pub separable: bool,
    /// The concrete `ε(a) = ⋂{F ∈ F | a ∈ F}` is the principal filter `↑a`.
    pub eps_principal: bool,
    /// Every principal filter lies in `Int(F)`.
    pub int_contains_principal: bool,
}

impl SeparabilityReport {
    pub fn all(&self) -> bool {
        self.eps_injective && self.separable && self.eps_principal && self.int_contains_principal
    }
}

/// The extension `L^F` of a frame by a class of its filters.
pub struct FilterExtension<'a> {
    analysis: &'a FilterAnalysis,
    class: Option<FilterClass>,
    /// Filter indices forming the class, ascending.
    class_filters: Vec<FilterId>,
    /// `GC(F, L, ∋)`: closed sets are masks over `class_filters` positions.
    gc: GaloisFamily,
    /// `ε(a)` as an index into `gc`, per element of `L`.
    eps: Vec<usize>,
    /// `κ(F)` as an index into `gc`, parallel to `class_filters`.
    kappa: Vec<usize>,
    /// The intersection `⋂S` of each closed set, as a filter of `L`.
    concrete: Vec<FilterId>,
    /// `Int(F)` as filter indices, ascending.
    int_filters: Vec<FilterId>,
}

impl<'a> FilterExtension<'a> {
    pub fn build(analysis: &'a FilterAnalysis, class: FilterClass) -> Self {
        Self::from_mask_impl(analysis, analysis.members(class), Some(class))
    }

    /// Extension by an arbitrary set of filters (mask over filter indices).
    pub fn from_mask(analysis: &'a FilterAnalysis, mask: u64) -> Self {
        Self::from_mask_impl(analysis, mask, None)
    }

    fn from_mask_impl(analysis: &'a FilterAnalysis, mask: u64, class: Option<FilterClass>) -> Self {
        let filt = &analysis.filt;
        let n = filt.frame().n();
        let class_filters: Vec<FilterId> = bits(mask as Mask).collect();
        let pol = Polarity::new(class_filters.len(), n, |i, a| filt.contains(class_filters[i], a))
            .expect("a filter class and a frame carrier both fit a polarity");
        let gc = GaloisFamily::new(pol);
        let eps: Vec<usize> = (0..n).map(|a| gc.ye(a)).collect();
        let kappa: Vec<usize> = (0..class_filters.len()).map(|i| gc.xe(i)).collect();
        let concrete: Vec<FilterId> = gc
            .members()
            .iter()
            .map(|&s| {
                let members = bits128(s)
                    .fold(filt.frame().carrier(), |acc, i| acc & filt.members(class_filters[i]));
                filt.index_of(members).expect("an intersection of filters is a filter")
            })
            .collect();
        let int_filters: Vec<FilterId> = bits(analysis.int_closure(mask) as Mask).collect();
        Self { analysis, class, class_filters, gc, eps, kappa, concrete, int_filters }
    }

    #[inline]
    pub fn analysis(&self) -> &FilterAnalysis {
        self.analysis
    }

    #[inline]
    pub fn class(&self) -> Option<FilterClass> {
        self.class
    }

    #[inline]
    pub fn class_filters(&self) -> &[FilterId] {
        &self.class_filters
    }

    #[inline]
    pub fn gc(&self) -> &GaloisFamily {
        &self.gc
    }

    /// Number of elements of `L^F`.
    #[inline]
    pub fn len(&self) -> usize {
        self.gc.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        false
    }

    #[inline]
    pub fn eps(&self, a: ElementId) -> usize {
        self.eps[a]
    }

    /// `κ` at a class position (an index into [`Self::class_filters`]).
    #[inline]
    pub fn kappa(&self, position: usize) -> usize {
        self.kappa[position]
    }

    /// The filter `⋂S` realizing a member of `L^F` inside `Filt(L)`.
    #[inline]
    pub fn concrete(&self, u: usize) -> FilterId {
        self.concrete[u]
    }

    /// `Int(F)`, ascending filter indices.
    #[inline]
    pub fn int_filters(&self) -> &[FilterId] {
        &self.int_filters
    }

    fn class_position(&self, f: FilterId) -> Option<usize> {
        self.class_filters.binary_search(&f).ok()
    }

    fn eps_injective(&self) -> bool {
        let mut seen = self.eps.clone();
        seen.sort_unstable();
        seen.dedup();
        seen.len() == self.eps.len()
    }

    /// Recheck the whole construction: the closed-set family with its two
    /// axioms, and the concrete description inside `Filt(L)`.
    pub fn verify(&self) -> Result<(), String> {
        check_family(self.gc.polarity(), self.gc.members())?;
        self.check_concrete()
    }

    /// `L^F ≅ Int(F)` under `S ↦ ⋂S`, with joins computed as intersections,
    /// `ε(a) = ⋂{F ∈ F | a ∈ F}` and `κ` the identity on filters.
    fn check_concrete(&self) -> Result<(), String> {
        let filt = &self.analysis.filt;
        let mut sorted = self.concrete.clone();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != self.concrete.len() {
            return Err("the intersection map is not injective on L^F".into());
        }
        if sorted != self.int_filters {
            return Err("the image of L^F in Filt(L) is not Int(F)".into());
        }
        for u in 0..self.gc.len() {
            for v in 0..self.gc.len() {
                if self.gc.leq(u, v) != filt.sqleq(self.concrete[u], self.concrete[v]) {
                    return Err("L^F and Int(F) order their elements differently".into());
                }
                if self.concrete[self.gc.join(u, v)] != filt.join(self.concrete[u], self.concrete[v])
                {
                    return Err("a join in L^F is not the intersection of the filters".into());
                }
            }
        }
        let n = filt.frame().n();
        for a in 0..n {
            let direct = self
                .class_filters
                .iter()
                .filter(|&&f| filt.contains(f, a))
                .fold(filt.frame().carrier(), |acc, &f| acc & filt.members(f));
            if filt.members(self.concrete[self.eps[a]]) != direct {
                return Err(format!(
                    "ε({}) does not intersect the class filters containing it",
                    filt.frame().label(a)
                ));
            }
        }
        for (i, &f) in self.class_filters.iter().enumerate() {
            if self.concrete[self.kappa[i]] != f {
                return Err(format!(
                    "κ({}) is not that filter itself in the concrete picture",
                    filt.lat().label(f)
                ));
            }
        }
        Ok(())
    }

    /// The six basic facts about the pair `(κ, ε)`:
    ///
    /// 1. `κ` is monotone, injective and order-reflective;
    /// 2. `κ` preserves the joins and meets available in `(F, ⊑)` — the
    ///    joins of `Filt(L)` that land in the class, and every infimum the
    ///    subposet has;
    /// 3. `ε` is monotone;
    /// 4. `ε` preserves `0`, `1` and binary meets;
    /// 5. if `ε` is injective it is a frame embedding (order-reflective and
    ///    preserving arbitrary joins on top of the finite meets);
    /// 6. `ε` is injective exactly when the class separates elements.
    pub fn basic_properties(&self) -> Result<(), String> {
        let filt = &self.analysis.filt;
        let frame = filt.frame();
        let gc = &self.gc;
        let n = frame.n();
        let k = self.class_filters.len();

        for i in 0..k {
            for j in 0..k {
                if filt.sqleq(self.class_filters[i], self.class_filters[j])
                    != gc.leq(self.kappa[i], self.kappa[j])
                {
                    return Err("κ is not an order-embedding of the class".into());
                }
            }
        }

        for &s in &subset_scan(k) {
            let ambient = bits(s).fold(filt.bottom(), |acc, i| filt.join(acc, self.class_filters[i]));
            if let Some(j) = self.class_position(ambient) {
                if gc.join_of(bits(s).map(|i| self.kappa[i])) != self.kappa[j] {
                    return Err("κ misses a join that the class inherits from Filt(L)".into());
                }
            }
            let lower: Vec<usize> = (0..k)
                .filter(|&j| {
                    bits(s).all(|i| filt.sqleq(self.class_filters[j], self.class_filters[i]))
                })
                .collect();
            let greatest = lower
                .iter()
                .copied()
                .find(|&g| lower.iter().all(|&j| filt.sqleq(self.class_filters[j], self.class_filters[g])));
            if let Some(g) = greatest {
                if gc.meet_of(bits(s).map(|i| self.kappa[i])) != self.kappa[g] {
                    return Err("κ misses an infimum of the class".into());
                }
            }
        }

        for a in 0..n {
            for b in 0..n {
                if frame.leq(a, b) && !gc.leq(self.eps[a], self.eps[b]) {
                    return Err("ε is not monotone".into());
                }
                if gc.meet(self.eps[a], self.eps[b]) != self.eps[frame.meet(a, b)] {
                    return Err("ε does not preserve a binary meet".into());
                }
            }
        }
        if self.eps[frame.bottom()] != gc.bottom() {
            return Err("ε does not send 0 to the bottom".into());
        }
        if self.eps[frame.top()] != gc.top() {
            return Err("ε does not send 1 to the top".into());
        }

        let injective = self.eps_injective();
        if injective {
            for a in 0..n {
                for b in 0..n {
                    if frame.leq(a, b) != gc.leq(self.eps[a], self.eps[b]) {
                        return Err("injective ε fails to reflect the order".into());
                    }
                }
            }
            for &s in &subset_scan(n) {
                let join = self.analysis.tables.join[s as usize] as usize;
                if gc.join_of(bits(s).map(|a| self.eps[a])) != self.eps[join] {
                    return Err(format!(
                        "injective ε does not preserve the join of {}",
                        set_label(s as u128)
                    ));
                }
            }
        }

        let separable = (0..n).all(|a| {
            (0..n).all(|b| {
                a == b
                    || self
                        .class_filters
                        .iter()
                        .any(|&f| filt.contains(f, a) != filt.contains(f, b))
            })
        });
        if injective != separable {
            return Err("injectivity of ε disagrees with separation by the class".into());
        }
        Ok(())
    }

    /// The four-way separability equivalence; errors when the criteria
    /// disagree.
    pub fn separability(&self) -> Result<SeparabilityReport, String> {
        let filt = &self.analysis.filt;
        let n = filt.frame().n();
        let eps_injective = self.eps_injective();
        let separable = (0..n).all(|a| {
            (0..n).all(|b| {
                a == b
                    || self
                        .class_filters
                        .iter()
                        .any(|&f| filt.contains(f, a) != filt.contains(f, b))
            })
        });
        let eps_principal = (0..n).all(|a| self.concrete[self.eps[a]] == filt.of(a));
        let int_contains_principal =
            (0..n).all(|a| self.int_filters.binary_search(&filt.of(a)).is_ok());
        let report =
            SeparabilityReport { eps_injective, separable, eps_principal, int_contains_principal };
        if eps_injective != separable
            || separable != eps_principal
            || eps_principal != int_contains_principal
        {
            return Err(format!("the separability criteria disagree: {report:?}"));
        }
        Ok(report)
    }

    /// Does `ε` preserve `⋀M`, and is the class closed under that meet?
    pub fn meet_preservation(&self, m: Mask) -> MeetVerdict {
        let filt = &self.analysis.filt;
        let meet = self.analysis.tables.meet[m as usize] as usize;
        let preserved = self.gc.meet_of(bits(m).map(|a| self.eps[a])) == self.eps[meet];
        let filters_closed = self.class_filters.iter().all(|&f| {
            bits(m).any(|a| !filt.contains(f, a)) || filt.contains(f, meet)
        });
        MeetVerdict { preserved, filters_closed }
    }

    /// `ε` preserves exactly the meets the class is closed under; for the
    /// strongly exact and exact classes that condition coincides with the
    /// meet being strongly exact resp. exact.
    pub fn meet_preservation_scan(&self) -> Result<(), String> {
        let frame = self.analysis.filt.frame();
        for &m in &subset_scan(frame.n()) {
            let verdict = self.meet_preservation(m);
            if verdict.preserved != verdict.filters_closed {
                return Err(format!(
                    "ε and the class disagree about the meet of {}: {verdict:?}",
                    set_label(m as u128)
                ));
            }
            let expected = match self.class {
                Some(FilterClass::StronglyExact) => {
                    Some(self.analysis.tables.is_strongly_exact(frame, m))
                }
                Some(FilterClass::Exact) => Some(self.analysis.tables.is_exact(frame, m)),
                _ => None,
            };
            if let Some(exactness) = expected {
                if verdict.preserved != exactness {
                    return Err(format!(
                        "ε preserves the meet of {} but its exactness says otherwise",
                        set_label(m as u128)
                    ));
                }
            }
        }
        Ok(())
    }

    /// Preservation facts tied to the Scott-open and completely prime
    /// classes: `ε` preserves directed joins whenever the class is
    /// Scott-open, and is injective whenever the class contains all
    /// Scott-open (resp. completely prime) filters of a pre-spatial
    /// (resp. spatial) frame. Finite frames are spatial, which is asserted
    /// on the way.
    pub fn special_preservation(&self) -> Result<(), String> {
        let analysis = self.analysis;
        let filt = &analysis.filt;
        let frame = filt.frame();
        let n = frame.n();
        let class_mask: u64 = self.class_filters.iter().fold(0, |m, &f| m | (1 << f));
        let so = analysis.members(FilterClass::ScottOpen);
        let cp = analysis.members(FilterClass::CompletelyPrime);
        let principal = analysis.members(FilterClass::Open);

        let spatial = principal & !analysis.int_closure(cp) == 0;
        let pre_spatial = principal & !analysis.int_closure(so) == 0;
        if !spatial || !pre_spatial {
            return Err("a finite frame must be spatial: some principal filter is not an intersection of points".into());
        }

        if class_mask & !so == 0 {
            for &d in &subset_scan(n) {
                if !FilterAnalysis::is_directed(frame, d) {
                    continue;
                }
                let join = analysis.tables.join[d as usize] as usize;
                if self.gc.join_of(bits(d).map(|a| self.eps[a])) != self.eps[join] {
                    return Err(format!(
                        "ε does not preserve the directed join of {}",
                        set_label(d as u128)
                    ));
                }
            }
        }

        let injective = self.eps_injective();
        if so & !class_mask == 0 && !injective {
            return Err("the class contains every Scott-open filter of a pre-spatial frame, yet ε is not injective".into());
        }
        if cp & !class_mask == 0 && !injective {
            return Err("the class contains every point of a spatial frame, yet ε is not injective".into());
        }
        Ok(())
    }
}

/// Check that `closed` is the full, sound Galois-closed family of `pol` and
/// that the two extension axioms hold for it: the singleton closures `κ`
/// and `ε` land in the family with `κ = ⋀ε[F]`, every member is the join of
/// the `κ`-values below it and the meet of the `ε`-values above it, and
/// `⋀ε[F] ≤ ε(a)` holds exactly when the filter relates to the element.
fn check_family(pol: &Polarity, closed: &[u128]) -> Result<(), String> {
    let full = full_mask128(pol.x_size());
    let find = |m: u128| closed.contains(&m);

    for &u in closed {
        if pol.qp(u) != u {
            return Err(format!("{} is not Galois closed", set_label(u)));
        }
    }
    if !find(pol.qp(0)) {
        return Err("the bottom closed set is missing".into());
    }
    if !find(full) {
        return Err("the top closed set (the whole class) is missing".into());
    }
    for &u in closed {
        for &v in closed {
            if !find(u & v) {
                return Err(format!(
                    "the family is not meet-closed at {} ∩ {}",
                    set_label(u),
                    set_label(v)
                ));
            }
            if !find(pol.qp(u | v)) {
                return Err(format!(
                    "the family is not join-closed at {} ∨ {}",
                    set_label(u),
                    set_label(v)
                ));
            }
        }
    }

    let kappa: Vec<u128> = (0..pol.x_size()).map(|i| pol.qp(1 << i)).collect();
    let eps: Vec<u128> = (0..pol.y_size()).map(|a| pol.q(1 << a)).collect();
    for (i, &k) in kappa.iter().enumerate() {
        if !find(k) {
            return Err(format!("κ of class filter #{i} is not in the family"));
        }
        let meet = (0..pol.y_size())
            .filter(|&a| pol.relates(i, a))
            .fold(full, |acc, a| acc & eps[a]);
        if meet != k {
            return Err(format!("κ of class filter #{i} differs from ⋀ ε[F]"));
        }
    }
    for (a, &e) in eps.iter().enumerate() {
        if !find(e) {
            return Err(format!("ε of element #{a} is not in the family"));
        }
    }

    for &u in closed {
        let join_src = kappa.iter().filter(|&&k| k & !u == 0).fold(0u128, |acc, &k| acc | k);
        if pol.qp(join_src) != u {
            return Err(format!("{} is not the join of the κ-values below it", set_label(u)));
        }
        let meet_src = eps.iter().filter(|&&e| u & !e == 0).fold(full, |acc, &e| acc & e);
        if meet_src != u {
            return Err(format!("{} is not the meet of the ε-values above it", set_label(u)));
        }
    }

    for (i, &k) in kappa.iter().enumerate() {
        for (a, &e) in eps.iter().enumerate() {
            if (k & !e == 0) != pol.relates(i, a) {
                return Err(format!(
                    "⋀ε[F] ≤ ε(a) disagrees with membership at filter #{i}, element #{a}"
                ));
            }
        }
    }
    Ok(())
}

/// The canonical extension of a finite distributive lattice.
pub struct CanonicalExtension {
    gc: GaloisFamily,
    /// `e(d)`, the common value of the filter and ideal embeddings.
    e: Vec<usize>,
}

impl CanonicalExtension {
    #[inline]
    pub fn len(&self) -> usize {
        self.gc.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        false
    }

    #[inline]
    pub fn gc(&self) -> &GaloisFamily {
        &self.gc
    }

    #[inline]
    pub fn e(&self, d: ElementId) -> usize {
        self.e[d]
    }
}

/// Build the canonical extension `GC(Filt(D), Idl(D), F ∩ I ≠ ∅)` of a
/// finite distributive lattice, check its two axioms — every element is a
/// join of meets and a meet of joins of `e[D]`, and `⋀e[F] ≤ ⋁e[I]` forces
/// `F ∩ I ≠ ∅` — and check that finiteness collapses the completion:
/// `e: D → D^δ` is an isomorphism.
pub fn dlat_canonical_extension(lat: &FiniteLattice) -> Result<CanonicalExtension, String> {
    if lat.n() > crate::filters::MAX_FILTER_FRAME {
        return Err(format!("lattice has {} elements; filter scans are capped at {}", lat.n(), crate::filters::MAX_FILTER_FRAME));
    }
    let filters = lattice_filter_masks(lat);
    let dual = lat.dual();
    let ideals = lattice_filter_masks(&dual);
    let pol = Polarity::new(filters.len(), ideals.len(), |f, i| filters[f] & ideals[i] != 0)
        .map_err(|e| e.to_string())?;
    let gc = GaloisFamily::new(pol);

    let mut e = Vec::with_capacity(lat.n());
    for d in 0..lat.n() {
        let f = filters
            .iter()
            .position(|&m| m == lat.up_mask(d))
            .expect("every principal up-set is a filter");
        let i = ideals
            .iter()
            .position(|&m| m == lat.dn_mask(d))
            .expect("every principal down-set is an ideal");
        if gc.xe(f) != gc.ye(i) {
            return Err(format!(
                "the filter and ideal embeddings disagree at {}",
                lat.label(d)
            ));
        }
        e.push(gc.xe(f));
    }

    // Density: the filter embedding is the meet of e over the filter, the
    // ideal embedding the join of e over the ideal, and the singleton
    // closures generate everything.
    for (f, &members) in filters.iter().enumerate() {
        if gc.meet_of(bits(members).map(|d| e[d])) != gc.xe(f) {
            return Err("a filter's closed set is not the meet of its elements' images".into());
        }
    }
    for (i, &members) in ideals.iter().enumerate() {
        if gc.join_of(bits(members).map(|d| e[d])) != gc.ye(i) {
            return Err("an ideal's closed set is not the join of its elements' images".into());
        }
    }
    gc.check_items_1_2()?;

    // Separation, as a biconditional.
    for (f, &fm) in filters.iter().enumerate() {
        for (i, &im) in ideals.iter().enumerate() {
            if gc.leq(gc.xe(f), gc.ye(i)) != (fm & im != 0) {
                return Err("⋀e[F] ≤ ⋁e[I] disagrees with F ∩ I ≠ ∅".into());
            }
        }
    }

    // Finiteness collapses the completion: e is an isomorphism onto D^δ.
    if gc.len() != lat.n() {
        return Err(format!(
            "the canonical extension has {} elements, the lattice {}",
            gc.len(),
            lat.n()
        ));
    }
    for a in 0..lat.n() {
        for b in 0..lat.n() {
            if lat.leq(a, b) != gc.leq(e[a], e[b]) {
                return Err("e does not carry the lattice order onto the extension".into());
            }
        }
    }
    Ok(CanonicalExtension { gc, e })
}

/// Sizes reported by [`completely_prime_upsets`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PointReport {
    /// Number of completely prime filters.
    pub points: usize,
    /// Number of up-sets of the point poset, which is `|Int(CP)|`.
    pub upsets: usize,
}

/// `Int(CP(L))` is isomorphic to the up-set lattice of the points under
/// `F ↦ {Q ∈ CP | F ⊆ Q}`, with the improper filter going to the empty
/// up-set. On the way this checks that the points are exactly the filters
/// `{a | a ≰ p}` for primes `p` (ordered dually to the primes) and that
/// every point is completely join-prime in `Filt(L)`.
pub fn completely_prime_upsets(analysis: &FilterAnalysis) -> Result<PointReport, String> {
    let filt = &analysis.filt;
    let frame = filt.frame();
    let n = frame.n();
    let points = analysis.class_indices(FilterClass::CompletelyPrime);
    let p = points.len();
    let point_masks: Vec<Mask> = points.iter().map(|&f| filt.members(f)).collect();

    let primes = frame.primes();
    let prime_masks: Vec<Mask> = primes
        .iter()
        .map(|&q| (0..n).filter(|&a| !frame.leq(a, q)).fold(0, |m, a| m | (1 << a)))
        .collect();
    let mut lhs = prime_masks.clone();
    lhs.sort_unstable();
    let mut rhs = point_masks.clone();
    rhs.sort_unstable();
    if lhs != rhs {
        return Err("the points are not exactly the filters {a | a ≰ p} of the primes".into());
    }
    for i in 0..primes.len() {
        for j in 0..primes.len() {
            if (prime_masks[i] & !prime_masks[j] == 0) != frame.leq(primes[j], primes[i]) {
                return Err("point inclusion is not dual to the prime order".into());
            }
        }
    }

    // Every point is completely join-prime: an intersection of filters only
    // lands inside it when one of them already does.
    for (qi, &qm) in points.iter().zip(&point_masks) {
        for s in 1..(1u64 << filt.len()) {
            let inter = bits(s).fold(frame.carrier(), |acc, f| acc & filt.members(f));
            if inter & !qm == 0 && !bits(s).any(|f| filt.members(f) & !qm == 0) {
                return Err(format!(
                    "{} is not completely join-prime in the filter lattice",
                    filt.lat().label(*qi)
                ));
            }
        }
    }

    let point_leq = |i: usize, j: usize| point_masks[i] & !point_masks[j] == 0;
    let mut upsets: Vec<Mask> = (0..(1u64 << p))
        .filter(|&s| bits(s).all(|i| (0..p).all(|j| !point_leq(i, j) || s & (1 << j) != 0)))
        .collect();
    upsets.sort_unstable();

    let int_cp: Vec<FilterId> =
        bits(analysis.int_closure(analysis.members(FilterClass::CompletelyPrime)) as Mask)
            .collect();
    let images: Vec<Mask> = int_cp
        .iter()
        .map(|&f| {
            (0..p)
                .filter(|&i| filt.members(f) & !point_masks[i] == 0)
                .fold(0, |m, i| m | (1 << i))
        })
        .collect();
    let mut sorted_images = images.clone();
    sorted_images.sort_unstable();
    sorted_images.dedup();
    if sorted_images.len() != images.len() {
        return Err("F ↦ {Q ⊇ F} is not injective on Int(CP)".into());
    }
    if sorted_images != upsets {
        return Err("the image of Int(CP) is not the up-set lattice of the points".into());
    }
    for u in 0..int_cp.len() {
        for v in 0..int_cp.len() {
            if filt.sqleq(int_cp[u], int_cp[v]) != (images[u] & !images[v] == 0) {
                return Err("F ↦ {Q ⊇ F} does not match the two orders".into());
            }
        }
    }
    let improper = int_cp
        .iter()
        .position(|&f| f == filt.bottom())
        .expect("the empty intersection, the improper filter, is always in Int(CP)");
    if images[improper] != 0 {
        return Err("the improper filter does not go to the empty up-set".into());
    }

    Ok(PointReport { points: p, upsets: upsets.len() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use crate::lattice::{are_isomorphic, fixtures};
    use proptest::prelude::*;

    #[test]
    fn principal_class_recovers_the_frame() {
        for frame in [fixtures::two(), fixtures::three(), fixtures::b4(), fixtures::trivial()] {
            let fa = FilterAnalysis::analyze(&frame).unwrap();
            let ext = FilterExtension::build(&fa, FilterClass::Open);
            ext.verify().unwrap();
            ext.basic_properties().unwrap();
            assert_eq!(ext.len(), frame.n());
            assert!(ext.separability().unwrap().all());
            let lat = ext.gc().as_lattice().unwrap();
            assert!(are_isomorphic(&lat, frame.lattice()));
        }
    }

    #[test]
    fn closed_class_on_the_boolean_frame_keeps_everything() {
        let frame = fixtures::b4();
        let fa = FilterAnalysis::analyze(&frame).unwrap();
        let ext = FilterExtension::build(&fa, FilterClass::Closed);
        ext.verify().unwrap();
        ext.basic_properties().unwrap();
        assert_eq!(ext.len(), 4);
        assert!(ext.separability().unwrap().all());
        // Int(Cl) is the regular part, which on a Boolean frame is all of
        // Filt.
        assert_eq!(
            fa.int_closure(fa.members(FilterClass::Closed)),
            fa.members(FilterClass::Regular)
        );
        assert_eq!(ext.int_filters(), &[0, 1, 2, 3]);
    }

    #[test]
    fn closed_class_on_the_three_chain_collapses() {
        let frame = fixtures::three();
        let fa = FilterAnalysis::analyze(&frame).unwrap();
        let ext = FilterExtension::build(&fa, FilterClass::Closed);
        ext.verify().unwrap();
        ext.basic_properties().unwrap();
        assert_eq!(ext.len(), 2);
        let report = ext.separability().unwrap();
        assert!(!report.all());
        assert!(!report.eps_injective);
        // The collapse identifies 0 and m: no closed filter separates them.
        assert_eq!(ext.eps(0), ext.eps(1));
    }

    #[test]
    fn strongly_exact_and_exact_classes_always_embed() {
        for frame in [fixtures::two(), fixtures::three(), fixtures::b4(), fixtures::trivial()] {
            for class in [FilterClass::StronglyExact, FilterClass::Exact] {
                let fa = FilterAnalysis::analyze(&frame).unwrap();
                let ext = FilterExtension::build(&fa, class);
                ext.verify().unwrap();
                ext.basic_properties().unwrap();
                assert!(ext.separability().unwrap().eps_injective);
                ext.meet_preservation_scan().unwrap();
            }
        }
    }

    #[test]
    fn meet_preservation_matches_the_closure_condition() {
        for frame in [fixtures::three(), fixtures::b4()] {
            let fa = FilterAnalysis::analyze(&frame).unwrap();
            for class in FilterClass::ALL {
                let ext = FilterExtension::build(&fa, class);
                ext.meet_preservation_scan().unwrap();
                for a in 0..frame.n() {
                    assert!(ext.meet_preservation(1 << a).preserved, "singleton meets are free");
                }
            }
        }
    }

    #[test]
    fn a_single_improper_separating_filter_collapses_everything() {
        // The artificial class {↑1} keeps only the top filter: ε sends 1 to
        // the top and everything else to the bottom, and the meet
        // characterization still holds verbatim.
        let frame = fixtures::b4();
        let fa = FilterAnalysis::analyze(&frame).unwrap();
        let ext = FilterExtension::from_mask(&fa, 1 << fa.filt.top());
        ext.verify().unwrap();
        ext.basic_properties().unwrap();
        assert_eq!(ext.len(), 2);
        ext.meet_preservation_scan().unwrap();
        let pinched = ext.meet_preservation(0b0110); // M = {a, b}, ⋀M = 0
        assert!(pinched.preserved && pinched.filters_closed);
    }

    #[test]
    fn special_preservation_on_fixtures() {
        // Completely prime classes embed every finite frame — finite
        // frames are spatial.
        for frame in [fixtures::two(), fixtures::three(), fixtures::b4()] {
            let fa = FilterAnalysis::analyze(&frame).unwrap();
            let ext = FilterExtension::build(&fa, FilterClass::CompletelyPrime);
            ext.verify().unwrap();
            ext.special_preservation().unwrap();
            assert!(ext.separability().unwrap().eps_injective);
        }
        // Scott-open classes preserve directed joins.
        let frame = fixtures::b4();
        let fa = FilterAnalysis::analyze(&frame).unwrap();
        let ext = FilterExtension::build(&fa, FilterClass::ScottOpen);
        ext.special_preservation().unwrap();
        // Every class passes on the two-element frame.
        let frame = fixtures::two();
        let fa = FilterAnalysis::analyze(&frame).unwrap();
        for class in FilterClass::ALL {
            FilterExtension::build(&fa, class).special_preservation().unwrap();
        }
    }

    #[test]
    fn canonical_extension_collapses_finitely() {
        let mut lattices = vec![
            fixtures::two().lattice().clone(),
            fixtures::three().lattice().clone(),
            fixtures::b4().lattice().clone(),
            fixtures::trivial().lattice().clone(),
            catalog::chain_frame(5).lattice().clone(),
            catalog::powerset_frame(3).lattice().clone(),
        ];
        for up in catalog::enumerate_posets(3) {
            lattices.push(catalog::downset_frame(3, &up).lattice().clone());
        }
        for lat in lattices {
            let ce = dlat_canonical_extension(&lat).unwrap();
            assert_eq!(ce.len(), lat.n());
            assert!(are_isomorphic(&ce.gc().as_lattice().unwrap(), &lat));
        }
    }

    #[test]
    fn point_upsets_on_fixtures() {
        let expected = [
            (fixtures::three(), 2, 3), // two chained points
            (fixtures::b4(), 2, 4),    // two incomparable points
            (fixtures::two(), 1, 2),
            (fixtures::trivial(), 0, 1),
        ];
        for (frame, points, upsets) in expected {
            let fa = FilterAnalysis::analyze(&frame).unwrap();
            let report = completely_prime_upsets(&fa).unwrap();
            assert_eq!(report, PointReport { points, upsets }, "{}", frame.label(frame.top()));
            assert_eq!(
                bits(fa.int_closure(fa.members(FilterClass::CompletelyPrime)) as Mask).count(),
                upsets
            );
        }
    }

    #[test]
    fn deleting_a_closed_set_breaks_verification() {
        let cases = [
            (fixtures::b4(), FilterClass::Closed),
            (fixtures::three(), FilterClass::All),
        ];
        for (frame, class) in cases {
            let fa = FilterAnalysis::analyze(&frame).unwrap();
            let ext = FilterExtension::build(&fa, class);
            let members = ext.gc().members().to_vec();
            for k in 0..members.len() {
                if k == ext.gc().bottom() || k == ext.gc().top() {
                    continue;
                }
                let mutated: Vec<u128> = members
                    .iter()
                    .enumerate()
                    .filter(|&(i, _)| i != k)
                    .map(|(_, &m)| m)
                    .collect();
                assert!(
                    check_family(ext.gc().polarity(), &mutated).is_err(),
                    "dropping closed set #{k} must be caught"
                );
            }
        }
    }

    #[test]
    fn sampled_subset_scan_is_deterministic_and_covers_small_sets() {
        assert_eq!(subset_scan(3).len(), 8);
        let wide = subset_scan(16);
        assert_eq!(wide, subset_scan(16));
        assert!(wide.contains(&0) && wide.contains(&full_mask(16)));
        for i in 0..16 {
            assert!(wide.contains(&(1 << i)));
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn extensions_verify_on_small_frames(choice in 0usize..19, cidx in 0usize..9) {
            let up = catalog::enumerate_posets(3).swap_remove(choice);
            let frame = catalog::downset_frame(3, &up);
            let fa = FilterAnalysis::analyze(&frame).unwrap();
            let ext = FilterExtension::build(&fa, FilterClass::ALL[cidx]);
            ext.verify().map_err(TestCaseError::fail)?;
            ext.basic_properties().map_err(TestCaseError::fail)?;
            ext.separability().map_err(TestCaseError::fail)?;
            ext.meet_preservation_scan().map_err(TestCaseError::fail)?;
            ext.special_preservation().map_err(TestCaseError::fail)?;
        }

        #[test]
        fn canonical_extensions_on_small_frames(choice in 0usize..19) {
            let up = catalog::enumerate_posets(3).swap_remove(choice);
            let frame = catalog::downset_frame(3, &up);
            let ce = dlat_canonical_extension(frame.lattice()).map_err(TestCaseError::fail)?;
            prop_assert_eq!(ce.len(), frame.n());
        }

        #[test]
        fn point_upsets_on_small_frames(choice in 0usize..19) {
            let up = catalog::enumerate_posets(3).swap_remove(choice);
            let frame = catalog::downset_frame(3, &up);
            let fa = FilterAnalysis::analyze(&frame).unwrap();
            let report = completely_prime_upsets(&fa).map_err(TestCaseError::fail)?;
            // Finite frames are spatial with one point per prime.
            prop_assert_eq!(report.points, frame.primes().len());
        }
    }
}
