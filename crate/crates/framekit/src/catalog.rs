//! A catalog of small finite frames for the verification suite.
//!
//! Four generator families:
//!
//! * `chain:k` — chains with 1 to `k` covering edges (2 to `k+1` elements),
//! * `powerset:k` — Boolean frames `2^1` to `2^k`,
//! * `posets:k` — downset lattices of **every** poset with at most `k`
//!   elements,
//! * `topologies:k` — open-set lattices of every topology on at most `k`
//!   points.
//!
//! The families overlap heavily (every chain is a downset lattice, every
//! finite topology is determined by a preorder, …), so the catalog
//! deduplicates up to lattice isomorphism, keeping the first occurrence and
//! recording the names that merged into it.

use crate::bitset::{bits, full_mask, set_label, submasks, Mask};
use crate::lattice::{find_isomorphism, FiniteLattice, Frame};

/// One frame of the catalog, with the generator names that produced an
/// isomorphic copy later in the stream.
pub struct CatalogEntry {
    pub id: String,
    pub frame: Frame,
    pub merged: Vec<String>,
}

/// A generator family with its size parameter.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    /// Chains with `1..=k` covering edges.
    Chain(usize),
    /// Powerset frames `2^1 ..= 2^k`.
    Powerset(usize),
    /// Downset lattices of all posets with `0..=k` elements.
    Posets(usize),
    /// Open-set lattices of all topologies on `0..=k` points.
    Topologies(usize),
}

impl Family {
    /// Parse `"chain:6"`, `"powerset:3"`, `"posets:4"`, `"topologies:3"`.
    pub fn parse(s: &str) -> Result<Family, String> {
        let (name, arg) = s
            .split_once(':')
            .ok_or_else(|| format!("expected `family:size`, got `{s}`"))?;
        let k: usize = arg
            .parse()
            .map_err(|_| format!("family size must be a number, got `{arg}`"))?;
        match name {
            "chain" if (1..=63).contains(&k) => Ok(Family::Chain(k)),
            "chain" => Err(format!("chain length must be 1..=63, got {k}")),
            "powerset" if (1..=6).contains(&k) => Ok(Family::Powerset(k)),
            "powerset" => Err(format!("powerset size must be 1..=6, got {k}")),
            "posets" if k <= 5 => Ok(Family::Posets(k)),
            "posets" => Err(format!("poset size is capped at 5, got {k}")),
            "topologies" if k <= 4 => Ok(Family::Topologies(k)),
            "topologies" => Err(format!("topology point count is capped at 4, got {k}")),
            _ => Err(format!("unknown family `{name}`")),
        }
    }

    /// All frames of the family, in a fixed deterministic order, already
    /// deduplicated within the family and named.
    pub fn generate(&self) -> Vec<(String, Frame)> {
        match *self {
            Family::Chain(k) => (1..=k)
                .map(|edges| (format!("chain-{}", edges + 1), chain_frame(edges + 1)))
                .collect(),
            Family::Powerset(k) => (1..=k)
                .map(|p| (format!("powerset-{p}"), powerset_frame(p)))
                .collect(),
            Family::Posets(k) => {
                let mut out = Vec::new();
                for n in 0..=k {
                    let mut survivors: Vec<Frame> = Vec::new();
                    for up in enumerate_posets(n) {
                        let frame = downset_frame(n, &up);
                        if !survivors
                            .iter()
                            .any(|s| find_isomorphism(s.lattice(), frame.lattice()).is_some())
                        {
                            out.push((format!("downsets-{n}-{}", survivors.len()), frame.clone()));
                            survivors.push(frame);
                        }
                    }
                }
                out
            }
            Family::Topologies(k) => {
                let mut out = Vec::new();
                for p in 0..=k {
                    let mut survivors: Vec<Frame> = Vec::new();
                    for opens in enumerate_topologies(p) {
                        let frame = open_set_frame(&opens);
                        if !survivors
                            .iter()
                            .any(|s| find_isomorphism(s.lattice(), frame.lattice()).is_some())
                        {
                            out.push((format!("topology-{p}-{}", survivors.len()), frame.clone()));
                            survivors.push(frame);
                        }
                    }
                }
                out
            }
        }
    }
}

/// The family list behind the default catalog.
pub fn default_families() -> Vec<Family> {
    vec![
        Family::Chain(6),
        Family::Powerset(3),
        Family::Posets(4),
        Family::Topologies(3),
    ]
}

/// Generate, merge, and deduplicate the given families.
pub fn build_catalog(families: &[Family]) -> Vec<CatalogEntry> {
    let mut entries: Vec<CatalogEntry> = Vec::new();
    for family in families {
        for (name, frame) in family.generate() {
            let existing = entries.iter_mut().find(|e| {
                e.frame.n() == frame.n()
                    && find_isomorphism(e.frame.lattice(), frame.lattice()).is_some()
            });
            match existing {
                Some(e) => e.merged.push(name),
                None => entries.push(CatalogEntry { id: name, frame, merged: Vec::new() }),
            }
        }
    }
    entries
}

pub fn default_catalog() -> Vec<CatalogEntry> {
    build_catalog(&default_families())
}

pub fn find_entry<'a>(catalog: &'a [CatalogEntry], id: &str) -> Option<&'a CatalogEntry> {
    catalog.iter().find(|e| e.id == id)
}

/// Totally ordered frame with `len` elements labelled by height.
pub fn chain_frame(len: usize) -> Frame {
    let labels: Vec<String> = (0..len).map(|i| i.to_string()).collect();
    let lat = FiniteLattice::from_order(labels, |a, b| a <= b).expect("chains are lattices");
    Frame::new(lat).expect("chains are frames")
}

/// Boolean frame of all subsets of a `points`-element set.
pub fn powerset_frame(points: usize) -> Frame {
    assert!(points <= 6, "powerset frames above 2^6 exceed the element cap");
    let masks: Vec<Mask> = (0..(1u64 << points)).collect();
    subset_inclusion_frame(&masks)
}

/// Downset lattice of the poset given by reflexive up-rows.
pub fn downset_frame(n: usize, up: &[Mask]) -> Frame {
    let mut dn = vec![0 as Mask; n];
    for a in 0..n {
        for b in bits(up[a]) {
            dn[b] |= 1 << a;
        }
    }
    let downsets: Vec<Mask> = submasks(full_mask(n))
        .filter(|&m| bits(m).all(|i| dn[i] & !m == 0))
        .collect();
    subset_inclusion_frame(&downsets)
}

/// Open-set lattice of a topology, given as the list of open sets.
pub fn open_set_frame(opens: &[Mask]) -> Frame {
    subset_inclusion_frame(opens)
}

/// Lattice of an inclusion-closed family of sets (the caller guarantees
/// closure under union and intersection).
fn subset_inclusion_frame(sets: &[Mask]) -> Frame {
    let mut sets = sets.to_vec();
    sets.sort_unstable();
    let labels: Vec<String> = sets.iter().map(|&m| set_label(m as u128)).collect();
    let lat = FiniteLattice::from_order(labels, |a, b| sets[a] & !sets[b] == 0)
        .expect("a ∪/∩-closed set family is a lattice under inclusion");
    Frame::new(lat).expect("set lattices are frames")
}

/// All labelled posets on `n` points, as reflexive up-row vectors.
///
/// Each unordered pair is independently incomparable, `<`, or `>`; the
/// resulting relations are filtered for transitivity. Antisymmetry holds by
/// construction.
pub fn enumerate_posets(n: usize) -> Vec<Vec<Mask>> {
    assert!(n <= 5, "poset enumeration is exponential in the pair count");
    let pairs: Vec<(usize, usize)> =
        (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
    let mut out = Vec::new();
    let mut states = vec![0u8; pairs.len()];
    loop {
        let mut up: Vec<Mask> = (0..n).map(|i| 1 << i).collect();
        for (idx, &(i, j)) in pairs.iter().enumerate() {
            match states[idx] {
                1 => up[i] |= 1 << j,
                2 => up[j] |= 1 << i,
                _ => {}
            }
        }
        let transitive = (0..n).all(|a| bits(up[a]).all(|b| up[b] & !up[a] == 0));
        if transitive {
            out.push(up);
        }
        // Odometer step over base-3 states.
        let mut idx = 0;
        loop {
            if idx == states.len() {
                return out;
            }
            states[idx] += 1;
            if states[idx] < 3 {
                break;
            }
            states[idx] = 0;
            idx += 1;
        }
    }
}

/// All topologies on `points` labelled points, each as its ascending list of
/// open-set masks. Every family containing `∅` and the whole set is tested
/// for closure under union and intersection.
pub fn enumerate_topologies(points: usize) -> Vec<Vec<Mask>> {
    assert!(points <= 4, "topology enumeration is doubly exponential");
    let space = full_mask(points);
    if points == 0 {
        return vec![vec![0]];
    }
    let inner: Vec<Mask> = (1..space).collect();
    let mut out = Vec::new();
    for choice in 0..(1u64 << inner.len()) {
        let mut opens: Vec<Mask> = vec![0];
        opens.extend(bits(choice).map(|i| inner[i]));
        opens.push(space);
        let closed = opens.iter().all(|&u| {
            opens
                .iter()
                .all(|&v| opens.contains(&(u | v)) && opens.contains(&(u & v)))
        });
        if closed {
            out.push(opens);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{are_isomorphic, fixtures};
    use proptest::prelude::*;

    #[test]
    fn labelled_poset_counts() {
        assert_eq!(enumerate_posets(0).len(), 1);
        assert_eq!(enumerate_posets(1).len(), 1);
        assert_eq!(enumerate_posets(2).len(), 3);
        assert_eq!(enumerate_posets(3).len(), 19);
        assert_eq!(enumerate_posets(4).len(), 219);
    }

    #[test]
    fn labelled_topology_counts() {
        assert_eq!(enumerate_topologies(0).len(), 1);
        assert_eq!(enumerate_topologies(1).len(), 1);
        assert_eq!(enumerate_topologies(2).len(), 4);
        assert_eq!(enumerate_topologies(3).len(), 29);
    }

    #[test]
    fn distinct_downset_lattices_match_unlabelled_poset_counts() {
        // Birkhoff duality: downset lattices are isomorphic exactly when the
        // posets are, so the survivor counts are the unlabelled poset counts.
        let per_size = |n: usize| {
            Family::Posets(n)
                .generate()
                .into_iter()
                .filter(|(name, _)| name.starts_with(&format!("downsets-{n}-")))
                .count()
        };
        assert_eq!(per_size(0), 1);
        assert_eq!(per_size(1), 1);
        assert_eq!(per_size(2), 2);
        assert_eq!(per_size(3), 5);
        assert_eq!(per_size(4), 16);
    }

    #[test]
    fn small_generators_hit_the_known_frames() {
        let two_antichain = enumerate_posets(2)
            .into_iter()
            .find(|up| up[0] == 0b01 && up[1] == 0b10)
            .unwrap();
        let frame = downset_frame(2, &two_antichain);
        assert!(are_isomorphic(frame.lattice(), fixtures::b4().lattice()));

        assert!(are_isomorphic(chain_frame(3).lattice(), fixtures::three().lattice()));
        assert!(are_isomorphic(powerset_frame(2).lattice(), fixtures::b4().lattice()));
        assert_eq!(powerset_frame(3).n(), 8);
    }

    #[test]
    fn default_catalog_shape() {
        let catalog = default_catalog();
        assert_eq!(catalog.len(), 27);

        for want in ["chain-2", "chain-7", "powerset-2", "powerset-3", "downsets-0-0"] {
            assert!(find_entry(&catalog, want).is_some(), "missing {want}");
        }
        // The one-element frame arrives via the empty poset.
        assert_eq!(find_entry(&catalog, "downsets-0-0").unwrap().frame.n(), 1);

        // Entries are pairwise non-isomorphic and ids are unique.
        for (i, a) in catalog.iter().enumerate() {
            for b in &catalog[i + 1..] {
                assert_ne!(a.id, b.id);
                assert!(
                    !are_isomorphic(a.frame.lattice(), b.frame.lattice()),
                    "{} and {} are isomorphic",
                    a.id,
                    b.id
                );
            }
        }

        // Overlaps collapse where expected: the two-element chain absorbs the
        // one-point powerset and the smallest nontrivial topologies.
        let two = find_entry(&catalog, "chain-2").unwrap();
        assert!(two.merged.iter().any(|m| m == "powerset-1"));

        // The largest member is the 16-element Boolean frame 2^4.
        let max = catalog.iter().map(|e| e.frame.n()).max().unwrap();
        assert_eq!(max, 16);
    }

    #[test]
    fn family_parsing() {
        assert_eq!(Family::parse("chain:6"), Ok(Family::Chain(6)));
        assert_eq!(Family::parse("posets:4"), Ok(Family::Posets(4)));
        assert!(Family::parse("chain").is_err());
        assert!(Family::parse("powerset:9").is_err());
        assert!(Family::parse("mystery:2").is_err());
    }

    proptest! {
        /// Downset lattices of arbitrary small posets always pass the full
        /// frame law, and the exhaustive and binary checks agree on them.
        #[test]
        fn downset_lattices_are_frames(choice in 0usize..19) {
            let up = enumerate_posets(3).swap_remove(choice);
            let frame = downset_frame(3, &up);
            prop_assert!(frame.lattice().frame_check_exhaustive().is_ok());
            prop_assert!(frame.lattice().frame_check_binary().is_ok());
        }
    }
}
