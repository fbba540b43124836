//! Fixed-width bitset subsets and closure-system enumeration.
//!
//! Every carrier in this crate (lattice elements, filters, sublocales,
//! polarity rows) is indexed `0..n`, and a subset is a mask with bit `i` set
//! for member `i`. Lattice-element subsets use [`Mask`] (`u64`, capacity 64);
//! enumeration of closure systems works over `u128` so that carriers of
//! derived objects (e.g. all sublocales of a chain) still fit.

/// Subset of an indexed carrier, bit `i` = member `i`.
pub type Mask = u64;

/// Mask with bits `0..n` set. Safe for `n == 64`.
#[inline]
pub fn full_mask(n: usize) -> Mask {
    debug_assert!(n <= 64);
    if n == 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

/// Mask with bits `0..n` set, wide variant. Safe for `n == 128`.
#[inline]
pub fn full_mask128(n: usize) -> u128 {
    debug_assert!(n <= 128);
    if n == 128 {
        u128::MAX
    } else {
        (1u128 << n) - 1
    }
}

/// Iterator over the set bit indices of a mask, ascending.
#[inline]
pub fn bits(mask: Mask) -> BitIter {
    BitIter { rest: mask }
}

pub struct BitIter {
    rest: Mask,
}

impl Iterator for BitIter {
    type Item = usize;

    #[inline]
    fn next(&mut self) -> Option<usize> {
        if self.rest == 0 {
            return None;
        }
        let i = self.rest.trailing_zeros() as usize;
        self.rest &= self.rest - 1;
        Some(i)
    }
}

/// Iterator over the set bit indices of a wide mask, ascending.
#[inline]
pub fn bits128(mask: u128) -> Bit128Iter {
    Bit128Iter { rest: mask }
}

pub struct Bit128Iter {
    rest: u128,
}

impl Iterator for Bit128Iter {
    type Item = usize;

    #[inline]
    fn next(&mut self) -> Option<usize> {
        if self.rest == 0 {
            return None;
        }
        let i = self.rest.trailing_zeros() as usize;
        self.rest &= self.rest - 1;
        Some(i)
    }
}

/// Render a subset mask as `∅` or `{0,2,5}`.
pub fn set_label(mask: u128) -> String {
    if mask == 0 {
        return "∅".to_string();
    }
    let elems: Vec<String> = bits128(mask).map(|i| i.to_string()).collect();
    format!("{{{}}}", elems.join(","))
}

/// Iterator over all submasks of `mask`, ascending by value, including `0`
/// and `mask` itself. Uses the carry-ripple step `(s - mask) & mask`.
pub fn submasks(mask: Mask) -> SubmaskIter {
    SubmaskIter {
        set: mask,
        next: Some(0),
    }
}

pub struct SubmaskIter {
    set: Mask,
    next: Option<Mask>,
}

impl Iterator for SubmaskIter {
    type Item = Mask;

    #[inline]
    fn next(&mut self) -> Option<Mask> {
        let cur = self.next?;
        let stepped = cur.wrapping_sub(self.set) & self.set;
        self.next = if stepped == 0 { None } else { Some(stepped) };
        Some(cur)
    }
}

/// All closed sets of a closure operator on an `n`-element carrier, in
/// ascending mask order.
///
/// `close` must be extensive, monotone and idempotent; the enumeration is the
/// lectic-order "next closure" walk, so it visits each closed set exactly once
/// without keeping a seen-set. The result is sorted afterwards so callers get
/// a canonical ascending-by-value order regardless of the walk.
pub fn enumerate_closed(n: usize, mut close: impl FnMut(u128) -> u128) -> Vec<u128> {
    assert!(n <= 128, "carrier too wide for closure enumeration");
    let mut out = Vec::new();
    let mut a = close(0);
    loop {
        out.push(a);
        match next_closed(n, &mut close, a) {
            Some(b) => a = b,
            None => break,
        }
    }
    out.sort_unstable();
    out
}

/// Lectic successor of the closed set `a`, or `None` when `a` is the last.
fn next_closed(n: usize, close: &mut impl FnMut(u128) -> u128, a: u128) -> Option<u128> {
    let mut a = a;
    for i in (0..n).rev() {
        let bit = 1u128 << i;
        if a & bit != 0 {
            a &= !bit;
        } else {
            let b = close(a | bit);
            // Lectic condition: the closure may only add elements >= i.
            if (b & !a) & (bit - 1) == 0 {
                return Some(b);
            }
        }
    }
    None
}

/// Brute-force oracle for [`enumerate_closed`]: test all 2^n subsets for
/// being fixpoints. Only feasible for small carriers.
pub fn enumerate_closed_bruteforce(n: usize, mut close: impl FnMut(u128) -> u128) -> Vec<u128> {
    assert!(n <= 20, "brute-force closed-set oracle limited to small carriers");
    let mut out = Vec::new();
    for m in 0..(1u128 << n) {
        if close(m) == m {
            out.push(m);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn full_mask_handles_word_width() {
        assert_eq!(full_mask(0), 0);
        assert_eq!(full_mask(3), 0b111);
        assert_eq!(full_mask(64), u64::MAX);
        assert_eq!(full_mask128(128), u128::MAX);
    }

    #[test]
    fn bit_iteration_is_ascending() {
        assert_eq!(bits(0b101001).collect::<Vec<_>>(), vec![0, 3, 5]);
        assert_eq!(bits(0).count(), 0);
    }

    #[test]
    fn submask_walk_hits_every_subset_once() {
        let set = 0b10110;
        let all: Vec<Mask> = submasks(set).collect();
        assert_eq!(all.len(), 8);
        let mut sorted = all.clone();
        sorted.sort_unstable();
        sorted.dedup();
        assert_eq!(sorted.len(), 8);
        assert!(all.iter().all(|s| s & !set == 0));
    }

    #[test]
    fn next_closure_agrees_with_bruteforce() {
        // Closure: upward closure in the divisibility order on {1..n} shifted
        // to indices 0..n-1 — a nontrivial closure system.
        let n = 9;
        let close = |m: u128| {
            let mut out = m;
            for i in 0..n {
                if m & (1 << i) != 0 {
                    for j in 0..n {
                        if (j + 1) % (i + 1) == 0 {
                            out |= 1 << j;
                        }
                    }
                }
            }
            out
        };
        assert_eq!(enumerate_closed(n, close), enumerate_closed_bruteforce(n, close));
    }

    #[test]
    fn closure_of_empty_set_is_first() {
        // Constant-top closure system: only one closed set.
        let close = |_m: u128| 0b1111u128;
        assert_eq!(enumerate_closed(4, close), vec![0b1111]);
    }
}
