//! Bit-level combinatorics on the Boolean cube `{0,1}^n`.
//!
//! A [`Vertex`] stores coordinate `i` (1-based) in bit `i - 1`. Textual
//! coordinate strings such as `"10110"` list coordinate 1 first, so
//! `"10110"` is the bitmask `0b01101`. Every enumeration returns vertices in
//! ascending bitmask order.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const MAX_DIM: u32 = 63;

/// A point of `{0,1}^n`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Vertex {
    bits: u64,
    n: u8,
}

impl Vertex {
    pub fn new(bits: u64, n: u32) -> Result<Self> {
        check_dim(n)?;
        if bits & !full_mask(n) != 0 {
            return Err(Error::BitsOutOfRange { bits, n });
        }
        Ok(Self { bits, n: n as u8 })
    }

    pub fn zero(n: u32) -> Result<Self> {
        Self::new(0, n)
    }

    /// Standard unit vector `e_i` for 1-based coordinate `i`.
    pub fn unit(i: u32, n: u32) -> Result<Self> {
        if i == 0 || i > n {
            return Err(Error::Config(format!("coordinate {i} outside 1..={n}")));
        }
        Self::new(1 << (i - 1), n)
    }

    /// Parses a coordinate string (`x_1 x_2 ... x_n`), e.g. `"10110"`.
    pub fn from_coords(s: &str) -> Result<Self> {
        let n = s.len() as u32;
        check_dim(n)?;
        let mut bits = 0u64;
        for (i, c) in s.chars().enumerate() {
            match c {
                '0' => {}
                '1' => bits |= 1 << i,
                _ => return Err(Error::Parse(format!("bad coordinate character {c:?} in {s:?}"))),
            }
        }
        Self::new(bits, n)
    }

    pub fn from_hex(s: &str, n: u32) -> Result<Self> {
        let t = s.trim().trim_start_matches("0x");
        let bits = u64::from_str_radix(t, 16).map_err(|e| Error::Parse(format!("{s:?}: {e}")))?;
        Self::new(bits, n)
    }

    #[inline]
    pub fn bits(self) -> u64 {
        self.bits
    }

    #[inline]
    pub fn dim(self) -> u32 {
        self.n as u32
    }

    /// Hamming weight `|supp(x)|`.
    #[inline]
    pub fn weight(self) -> u32 {
        self.bits.count_ones()
    }

    /// Flips the coordinates in `mask`. The mask must fit the dimension.
    #[inline]
    pub fn flip(self, mask: u64) -> Self {
        debug_assert_eq!(mask & !full_mask(self.dim()), 0);
        Self { bits: self.bits ^ mask, n: self.n }
    }

    #[inline]
    pub(crate) fn with_bits(self, bits: u64) -> Self {
        Self { bits, n: self.n }
    }

    /// Lowercase hex of the bitmask, no prefix.
    pub fn to_hex(self) -> String {
        format!("{:x}", self.bits)
    }

    /// Sort key for lexicographic order of coordinate strings.
    pub fn lex_key(self) -> u64 {
        if self.n == 0 {
            return 0;
        }
        self.bits.reverse_bits() >> (64 - self.n as u32)
    }

    pub fn coord(self, i: u32) -> bool {
        i >= 1 && i <= self.dim() && (self.bits >> (i - 1)) & 1 == 1
    }
}

impl fmt::Display for Vertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.n {
            f.write_str(if (self.bits >> i) & 1 == 1 { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for Vertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Vertex({self})")
    }
}

impl FromStr for Vertex {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::from_coords(s)
    }
}

/// Sorted, strictly increasing list of 1-based coordinates.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct IndexSet(Vec<u32>);

impl IndexSet {
    pub fn from_mask(mask: u64) -> Self {
        Self(BitIter(mask).map(|b| b + 1).collect())
    }

    pub fn as_slice(&self) -> &[u32] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn to_mask(&self) -> u64 {
        self.0.iter().fold(0, |m, &i| m | 1 << (i - 1))
    }
}

impl From<IndexSet> for Vec<u32> {
    fn from(s: IndexSet) -> Self {
        s.0
    }
}

#[inline]
fn check_dim(n: u32) -> Result<()> {
    if n == 0 || n > MAX_DIM {
        Err(Error::InvalidDimension(n))
    } else {
        Ok(())
    }
}

#[inline]
fn same_dim(x: Vertex, y: Vertex) -> Result<()> {
    if x.n == y.n {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { left: x.dim(), right: y.dim() })
    }
}

/// Mask with the low `n` bits set.
#[inline]
pub fn full_mask(n: u32) -> u64 {
    if n >= 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

pub fn hamming(x: Vertex, y: Vertex) -> Result<u32> {
    same_dim(x, y)?;
    Ok((x.bits ^ y.bits).count_ones())
}

pub fn xor(x: Vertex, y: Vertex) -> Result<Vertex> {
    same_dim(x, y)?;
    Ok(x.with_bits(x.bits ^ y.bits))
}

pub fn support(x: Vertex) -> IndexSet {
    IndexSet::from_mask(x.bits)
}

/// All points of the smallest subcube containing `x` and `y`.
pub fn cube_points(x: Vertex, y: Vertex) -> Result<Vec<Vertex>> {
    same_dim(x, y)?;
    let base = x.bits & y.bits;
    Ok(Submasks::new(x.bits ^ y.bits).map(|s| x.with_bits(base | s)).collect())
}

/// `S_r(x)`: vertices at Hamming distance exactly `r`.
pub fn sphere(x: Vertex, r: u32) -> Result<Vec<Vertex>> {
    if r > x.dim() {
        return Err(Error::RadiusTooLarge { r, n: x.dim() });
    }
    let mut out: Vec<Vertex> = MasksOfWeight::new(x.dim(), r).map(|m| x.flip(m)).collect();
    out.sort_unstable();
    Ok(out)
}

/// `B_r(x)`: vertices at Hamming distance at most `r`.
pub fn ball(x: Vertex, r: u32) -> Result<Vec<Vertex>> {
    if r > x.dim() {
        return Err(Error::RadiusTooLarge { r, n: x.dim() });
    }
    let mut out: Vec<Vertex> =
        (0..=r).flat_map(|j| MasksOfWeight::new(x.dim(), j)).map(|m| x.flip(m)).collect();
    out.sort_unstable();
    Ok(out)
}

/// Keeps coordinates `1..=n-d`.
pub fn project(x: Vertex, d: u32) -> Result<Vertex> {
    if d >= x.dim() {
        return Err(Error::ProjectionTooDeep { d, n: x.dim() });
    }
    let m = x.dim() - d;
    Vertex::new(x.bits & full_mask(m), m)
}

/// `xy` avoids `x2y2` when `supp(x^y)` and `supp(x2^y2)` are disjoint.
pub fn avoids(x: Vertex, y: Vertex, x2: Vertex, y2: Vertex) -> Result<bool> {
    same_dim(x, y)?;
    same_dim(x, x2)?;
    same_dim(x, y2)?;
    Ok((x.bits ^ y.bits) & (x2.bits ^ y2.bits) == 0)
}

/// Splits `[m] x [n]` into `n` classes of size `m`, each using every row and
/// no column twice. Class `i` holds `(a, ((a + i - 2) mod n) + 1)`.
pub fn grid_partition(m: u32, n: u32) -> Result<Vec<Vec<(u32, u32)>>> {
    if m == 0 || n == 0 || m > n {
        return Err(Error::GridShape { m, n });
    }
    Ok((1..=n)
        .map(|i| (1..=m).map(|a| (a, (a + i - 2) % n + 1)).collect())
        .collect())
}

/// Binomial coefficient; saturates at `u64::MAX`.
pub fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
        if acc > u64::MAX as u128 {
            return u64::MAX;
        }
    }
    acc as u64
}

/// Set bit positions (0-based) of a mask, low to high.
#[derive(Clone, Copy, Debug)]
pub struct BitIter(pub u64);

impl Iterator for BitIter {
    type Item = u32;

    #[inline]
    fn next(&mut self) -> Option<u32> {
        if self.0 == 0 {
            return None;
        }
        let b = self.0.trailing_zeros();
        self.0 &= self.0 - 1;
        Some(b)
    }
}

/// Submasks of `mask` in ascending order, starting at 0 and ending at `mask`.
#[derive(Clone, Debug)]
pub struct Submasks {
    mask: u64,
    next: Option<u64>,
}

impl Submasks {
    pub fn new(mask: u64) -> Self {
        Self { mask, next: Some(0) }
    }
}

impl Iterator for Submasks {
    type Item = u64;

    #[inline]
    fn next(&mut self) -> Option<u64> {
        let cur = self.next?;
        self.next = if cur == self.mask { None } else { Some(cur.wrapping_sub(self.mask) & self.mask) };
        Some(cur)
    }
}

/// All `n`-bit masks of weight `k`, ascending (Gosper's hack).
#[derive(Clone, Debug)]
pub struct MasksOfWeight {
    limit: u64,
    next: Option<u64>,
}

impl MasksOfWeight {
    pub fn new(n: u32, k: u32) -> Self {
        let next = if k > n {
            None
        } else if k == 0 {
            Some(0)
        } else {
            Some(full_mask(k))
        };
        Self { limit: full_mask(n), next }
    }
}

impl Iterator for MasksOfWeight {
    type Item = u64;

    #[inline]
    fn next(&mut self) -> Option<u64> {
        let cur = self.next?;
        self.next = if cur == 0 {
            None
        } else {
            let c = cur & cur.wrapping_neg();
            let r = cur.wrapping_add(c);
            // r == 0 only when the top bit of a 64-bit word was reached
            if r == 0 {
                None
            } else {
                let nxt = (((r ^ cur) >> 2) / c) | r;
                (nxt & !self.limit == 0).then_some(nxt)
            }
        };
        Some(cur)
    }
}

/// Weight-`k` submasks of `within`, in ascending order.
pub fn submasks_of_weight(within: u64, k: u32) -> impl Iterator<Item = u64> {
    let positions: Vec<u32> = BitIter(within).collect();
    let m = positions.len() as u32;
    MasksOfWeight::new(m.max(1), k).filter(move |_| k <= m).map(move |sel| {
        BitIter(sel).fold(0u64, |acc, j| acc | 1 << positions[j as usize])
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(s: &str) -> Vertex {
        s.parse().unwrap()
    }

    fn set(xs: &[&str]) -> Vec<Vertex> {
        let mut out: Vec<Vertex> = xs.iter().map(|s| v(s)).collect();
        out.sort();
        out
    }

    #[test]
    fn hamming_examples() {
        assert_eq!(hamming(v("000"), v("000")).unwrap(), 0);
        assert_eq!(hamming(v("00000"), v("11100")).unwrap(), 3);
        assert_eq!(hamming(v("0101"), v("1010")).unwrap(), 4);
        assert!(matches!(hamming(v("01"), v("010")), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn xor_examples() {
        assert_eq!(xor(v("011"), v("101")).unwrap(), v("110"));
        assert_eq!(xor(v("1101"), v("0000")).unwrap(), v("1101"));
        assert_eq!(xor(v("11100"), v("00010")).unwrap(), v("11110"));
        assert!(xor(v("1"), v("10")).is_err());
    }

    #[test]
    fn support_examples() {
        assert!(support(v("000")).is_empty());
        assert_eq!(support(v("101")).as_slice(), &[1, 3]);
        assert_eq!(support(v("11100")).as_slice(), &[1, 2, 3]);
    }

    #[test]
    fn cube_points_examples() {
        assert_eq!(cube_points(v("00"), v("11")).unwrap(), set(&["00", "01", "10", "11"]));
        assert_eq!(cube_points(v("01"), v("01")).unwrap(), set(&["01"]));
        // brute-force scan of all 8 points against the coordinate-interval condition
        let (x, y) = (v("000"), v("110"));
        let brute: Vec<Vertex> = (0..8u64)
            .map(|b| Vertex::new(b, 3).unwrap())
            .filter(|z| {
                (1..=3).all(|i| {
                    let (a, b, c) = (x.coord(i), y.coord(i), z.coord(i));
                    a.min(b) <= c && c <= a.max(b)
                })
            })
            .collect();
        assert_eq!(brute, set(&["000", "010", "100", "110"]));
        assert_eq!(cube_points(x, y).unwrap(), brute);
    }

    #[test]
    fn sphere_and_ball_examples() {
        assert_eq!(sphere(v("000"), 0).unwrap(), set(&["000"]));
        assert_eq!(sphere(v("000"), 1).unwrap(), set(&["001", "010", "100"]));
        assert_eq!(sphere(v("0000"), 2).unwrap().len(), 6);
        assert!(matches!(sphere(v("00"), 3), Err(Error::RadiusTooLarge { .. })));
        assert_eq!(ball(v("00"), 0).unwrap(), set(&["00"]));
        assert_eq!(ball(v("000"), 1).unwrap().len(), 4);
        assert_eq!(ball(v("0000"), 4).unwrap().len(), 16);
        assert!(ball(v("0"), 2).is_err());
    }

    #[test]
    fn enumeration_is_ascending() {
        let s = sphere(v("10110"), 2).unwrap();
        assert!(s.windows(2).all(|w| w[0] < w[1]));
        let c = cube_points(v("10010"), v("01110")).unwrap();
        assert!(c.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn project_examples() {
        assert_eq!(project(v("10110"), 2).unwrap(), v("101"));
        assert_eq!(project(v("10110"), 0).unwrap(), v("10110"));
        assert_eq!(project(v("11111"), 4).unwrap(), v("1"));
        assert!(matches!(project(v("111"), 3), Err(Error::ProjectionTooDeep { .. })));
    }

    #[test]
    fn avoids_examples() {
        assert!(avoids(v("00000"), v("11100"), v("00000"), v("00011")).unwrap());
        assert!(!avoids(v("000"), v("110"), v("000"), v("011")).unwrap());
        assert!(avoids(v("101"), v("101"), v("000"), v("111")).unwrap());
    }

    #[test]
    fn grid_partition_examples() {
        assert_eq!(grid_partition(1, 1).unwrap(), vec![vec![(1, 1)]]);
        assert_eq!(
            grid_partition(2, 3).unwrap(),
            vec![vec![(1, 1), (2, 2)], vec![(1, 2), (2, 3)], vec![(1, 3), (2, 1)]]
        );
        assert!(matches!(grid_partition(4, 3), Err(Error::GridShape { .. })));
    }

    /// Checks the three defining properties exhaustively.
    fn check_partition(m: u32, n: u32) {
        let classes = grid_partition(m, n).unwrap();
        assert_eq!(classes.len(), n as usize);
        let mut seen = vec![false; (m * n) as usize];
        for class in &classes {
            assert_eq!(class.len(), m as usize);
            let mut rows: Vec<u32> = class.iter().map(|c| c.0).collect();
            let mut cols: Vec<u32> = class.iter().map(|c| c.1).collect();
            rows.sort();
            rows.dedup();
            cols.sort();
            cols.dedup();
            assert_eq!(rows.len(), m as usize);
            assert_eq!(cols.len(), m as usize);
            for &(a, b) in class {
                assert!((1..=m).contains(&a) && (1..=n).contains(&b));
                let idx = ((a - 1) * n + (b - 1)) as usize;
                assert!(!seen[idx]);
                seen[idx] = true;
            }
        }
        assert!(seen.iter().all(|&s| s));
    }

    #[test]
    fn grid_partition_properties_up_to_50() {
        check_partition(3, 3);
        for n in 1..=50 {
            for m in 1..=n {
                check_partition(m, n);
            }
        }
    }

    #[test]
    fn sphere_counts_match_binomials() {
        for n in 1..=12u32 {
            let x = Vertex::zero(n).unwrap();
            for r in 0..=n {
                assert_eq!(sphere(x, r).unwrap().len() as u64, binomial(n as u64, r as u64));
            }
        }
        // exhaustive at n <= 6: every centre, every radius, against a direct scan
        for n in 1..=6u32 {
            for c in 0..1u64 << n {
                let x = Vertex::new(c, n).unwrap();
                for r in 0..=n {
                    let scan: Vec<Vertex> = (0..1u64 << n)
                        .map(|b| Vertex::new(b, n).unwrap())
                        .filter(|y| hamming(x, *y).unwrap() == r)
                        .collect();
                    assert_eq!(sphere(x, r).unwrap(), scan);
                }
            }
        }
    }

    #[test]
    fn masks_of_weight_edge_cases() {
        assert_eq!(MasksOfWeight::new(3, 0).collect::<Vec<_>>(), vec![0]);
        assert_eq!(MasksOfWeight::new(3, 3).collect::<Vec<_>>(), vec![7]);
        assert_eq!(MasksOfWeight::new(3, 4).count(), 0);
        assert_eq!(MasksOfWeight::new(63, 1).count(), 63);
        assert_eq!(MasksOfWeight::new(63, 62).count(), 63);
        assert_eq!(submasks_of_weight(0b1011010, 2).collect::<Vec<_>>().len(), 6);
        assert_eq!(submasks_of_weight(0b101, 3).count(), 0);
        assert_eq!(submasks_of_weight(0, 0).collect::<Vec<_>>(), vec![0]);
    }

    #[test]
    fn coordinate_strings_round_trip() {
        let x = v("10110");
        assert_eq!(x.bits(), 0b01101);
        assert_eq!(x.to_string(), "10110");
        assert_eq!(Vertex::from_hex(&x.to_hex(), 5).unwrap(), x);
        assert!(Vertex::new(0b1000, 3).is_err());
        assert!(Vertex::from_coords("012").is_err());
        assert!(v("011").lex_key() < v("100").lex_key());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn pair() -> impl Strategy<Value = (Vertex, Vertex)> {
            (1u32..=12).prop_flat_map(|n| {
                (0..1u64 << n, 0..1u64 << n)
                    .prop_map(move |(a, b)| (Vertex::new(a, n).unwrap(), Vertex::new(b, n).unwrap()))
            })
        }

        proptest! {
            #[test]
            fn cube_size_is_power_of_hamming((x, y) in pair()) {
                let h = hamming(x, y).unwrap();
                let pts = cube_points(x, y).unwrap();
                prop_assert_eq!(pts.len() as u64, 1u64 << h);
                prop_assert!(pts.contains(&x) && pts.contains(&y));
            }

            #[test]
            fn hamming_is_support_of_xor((x, y) in pair()) {
                prop_assert_eq!(hamming(x, y).unwrap() as usize, support(xor(x, y).unwrap()).len());
                prop_assert_eq!(hamming(x, y).unwrap(), hamming(y, x).unwrap());
            }

            #[test]
            fn projection_is_contracting((x, y) in pair(), d in 0u32..12) {
                prop_assume!(d < x.dim());
                let px = project(x, d).unwrap();
                let py = project(y, d).unwrap();
                prop_assert!(hamming(px, py).unwrap() <= hamming(x, y).unwrap());
            }
        }
    }
}
