//! Dyadic cubes of [0,1)^d: addressing, ancestry, and the two-point ball.
//!
//! A depth-m address names one cube of the m-th binary subdivision of the
//! unit cube. Cubes are half-open on every axis, so each point of [0,1)^d
//! lies in exactly one cube per depth and addressing never needs a
//! tie-break. The "ball" of two points is the smallest dyadic cube
//! containing both; its measure stands in for their distance everywhere
//! else in the crate.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Extent limits: 4 bits of path per level (one hex digit), 4 words of path.
pub const MAX_DIM: u32 = 4;
/// Deepest supported subdivision level. Beyond 60 levels f64 coordinates
/// carry no information anyway.
pub const MAX_DEPTH: u32 = 60;

const NIBBLES_PER_WORD: u32 = 16;

/// A node of the 2^d-ary subdivision tree of [0,1)^d.
///
/// The path stores one child symbol per level, one bit per coordinate:
/// bit i of the symbol is the next binary digit of coordinate i. Symbols
/// are packed one hex nibble per level for cheap common-prefix arithmetic,
/// which is also the serialized form (`d:m:hex-path`, level 1 first).
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct DyadicAddress {
    dim: u8,
    depth: u8,
    path: [u64; 4],
}

impl DyadicAddress {
    /// The root cube [0,1)^d.
    pub fn root(dim: u32) -> Result<Self> {
        if dim == 0 || dim > MAX_DIM {
            return Err(Error::UnsupportedDimension { dim });
        }
        Ok(DyadicAddress {
            dim: dim as u8,
            depth: 0,
            path: [0; 4],
        })
    }

    #[inline]
    pub fn dim(&self) -> u32 {
        self.dim as u32
    }

    #[inline]
    pub fn depth(&self) -> u32 {
        self.depth as u32
    }

    /// Number of children per node, 2^d.
    #[inline]
    pub fn arity(&self) -> u32 {
        1 << self.dim
    }

    /// Child symbol at a level in 0..depth.
    #[inline]
    pub fn symbol(&self, level: u32) -> u32 {
        debug_assert!(level < self.depth as u32);
        let word = (level / NIBBLES_PER_WORD) as usize;
        let shift = 4 * (level % NIBBLES_PER_WORD);
        ((self.path[word] >> shift) & 0xf) as u32
    }

    /// The depth-(m+1) extension of this cube by one child symbol.
    pub fn child(&self, symbol: u32) -> Result<Self> {
        if symbol >= self.arity() {
            return Err(Error::Contract(format!(
                "child symbol {symbol} out of range for dimension {}",
                self.dim
            )));
        }
        if self.depth as u32 >= MAX_DEPTH {
            return Err(Error::DepthOutOfRange {
                depth: self.depth as u32 + 1,
                max: MAX_DEPTH,
            });
        }
        Ok(self.child_unchecked(symbol))
    }

    #[inline]
    pub(crate) fn child_unchecked(&self, symbol: u32) -> Self {
        let level = self.depth as u32;
        let mut path = self.path;
        let word = (level / NIBBLES_PER_WORD) as usize;
        let shift = 4 * (level % NIBBLES_PER_WORD);
        path[word] |= (symbol as u64) << shift;
        DyadicAddress {
            dim: self.dim,
            depth: self.depth + 1,
            path,
        }
    }

    /// All 2^d children in symbol order.
    pub fn children(&self) -> Result<Vec<DyadicAddress>> {
        if self.depth as u32 >= MAX_DEPTH {
            return Err(Error::DepthOutOfRange {
                depth: self.depth as u32 + 1,
                max: MAX_DEPTH,
            });
        }
        Ok((0..self.arity()).map(|s| self.child_unchecked(s)).collect())
    }

    pub fn parent(&self) -> Option<Self> {
        if self.depth == 0 {
            None
        } else {
            Some(self.ancestor(self.depth as u32 - 1).expect("shallower"))
        }
    }

    /// The depth-m ancestor (path truncation), m ≤ depth.
    pub fn ancestor(&self, depth: u32) -> Result<Self> {
        if depth > self.depth as u32 {
            return Err(Error::Contract(format!(
                "ancestor depth {depth} exceeds node depth {}",
                self.depth
            )));
        }
        let mut path = [0u64; 4];
        let full_words = (depth / NIBBLES_PER_WORD) as usize;
        path[..full_words].copy_from_slice(&self.path[..full_words]);
        let rem = depth % NIBBLES_PER_WORD;
        if rem > 0 {
            path[full_words] = self.path[full_words] & ((1u64 << (4 * rem)) - 1);
        }
        Ok(DyadicAddress {
            dim: self.dim,
            depth: depth as u8,
            path,
        })
    }

    /// Number of leading levels on which the two paths agree.
    pub fn common_prefix_depth(&self, other: &DyadicAddress) -> u32 {
        let limit = (self.depth.min(other.depth)) as u32;
        let mut agree = 0;
        for w in 0..4 {
            let x = self.path[w] ^ other.path[w];
            if x == 0 {
                agree += NIBBLES_PER_WORD;
            } else {
                agree += x.trailing_zeros() / 4;
                break;
            }
        }
        agree.min(limit)
    }

    /// Integer index of this cube along one (0-based) axis: the cube is
    /// `[j·2^−m, (j+1)·2^−m)` on that axis.
    pub fn axis_index(&self, axis: u32) -> u64 {
        debug_assert!(axis < self.dim as u32);
        let mut j = 0u64;
        for level in 0..self.depth as u32 {
            j = (j << 1) | ((self.symbol(level) >> axis) & 1) as u64;
        }
        j
    }

    /// Build an address from per-axis integer indices at a given depth.
    pub fn from_axis_indices(dim: u32, depth: u32, indices: &[u64]) -> Result<Self> {
        let mut a = DyadicAddress::root(dim)?;
        if depth > MAX_DEPTH {
            return Err(Error::DepthOutOfRange {
                depth,
                max: MAX_DEPTH,
            });
        }
        if indices.len() != dim as usize {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: indices.len() as u32,
            });
        }
        for (axis, &j) in indices.iter().enumerate() {
            if depth < 64 && j >= (1u64 << depth) {
                return Err(Error::Contract(format!(
                    "axis {axis} index {j} out of range at depth {depth}"
                )));
            }
        }
        for level in 0..depth {
            let bit = depth - 1 - level;
            let mut sym = 0u32;
            for (axis, &j) in indices.iter().enumerate() {
                sym |= (((j >> bit) & 1) as u32) << axis;
            }
            a = a.child_unchecked(sym);
        }
        Ok(a)
    }

    /// Lower corner of the cube.
    pub fn low_corner(&self) -> Vec<f64> {
        let side = self.side();
        (0..self.dim as u32)
            .map(|ax| self.axis_index(ax) as f64 * side)
            .collect()
    }

    /// Center of the cube.
    pub fn center(&self) -> Vec<f64> {
        let side = self.side();
        (0..self.dim as u32)
            .map(|ax| (self.axis_index(ax) as f64 + 0.5) * side)
            .collect()
    }

    /// Side length 2^−m.
    #[inline]
    pub fn side(&self) -> f64 {
        (-(self.depth as f64)).exp2()
    }

    /// log2 of the Lebesgue measure: −m·d.
    #[inline]
    pub fn log2_lebesgue(&self) -> f64 {
        -((self.depth as u32 * self.dim as u32) as f64)
    }

    /// Lebesgue measure 2^{−md}.
    #[inline]
    pub fn lebesgue(&self) -> f64 {
        self.log2_lebesgue().exp2()
    }

    /// Whether the half-open cube contains the point.
    pub fn contains(&self, p: &Point) -> Result<bool> {
        if p.dim() != self.dim as u32 {
            return Err(Error::DimensionMismatch {
                expected: self.dim as u32,
                found: p.dim(),
            });
        }
        Ok(address_of(p, self.depth as u32)? == *self)
    }
}

impl fmt::Debug for DyadicAddress {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "DyadicAddress({self})")
    }
}

impl fmt::Display for DyadicAddress {
    /// Stable serialized form `d:m:hex-path`, one hex digit per level,
    /// level 1 leftmost; the root path is empty.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:", self.dim, self.depth)?;
        for level in 0..self.depth as u32 {
            write!(f, "{:x}", self.symbol(level))?;
        }
        Ok(())
    }
}

impl FromStr for DyadicAddress {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = |reason: &str| Error::ConfigParse {
            field: "address".into(),
            reason: format!("{reason}: `{s}`"),
        };
        let mut parts = s.splitn(3, ':');
        let dim: u32 = parts
            .next()
            .and_then(|p| p.parse().ok())
            .ok_or_else(|| bad("missing dimension"))?;
        let depth: u32 = parts
            .next()
            .and_then(|p| p.parse().ok())
            .ok_or_else(|| bad("missing depth"))?;
        let hex = parts.next().ok_or_else(|| bad("missing path"))?;
        if depth > MAX_DEPTH {
            return Err(bad("depth out of range"));
        }
        if hex.len() != depth as usize {
            return Err(bad("path length does not match depth"));
        }
        let mut a = DyadicAddress::root(dim)?;
        for ch in hex.chars() {
            let sym = ch.to_digit(16).ok_or_else(|| bad("non-hex path digit"))?;
            a = a.child(sym)?;
        }
        Ok(a)
    }
}

/// A point of [0,1)^d.
#[derive(Clone, Debug, PartialEq)]
pub struct Point {
    coords: Vec<f64>,
}

impl Point {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.is_empty() || coords.len() > MAX_DIM as usize {
            return Err(Error::UnsupportedDimension {
                dim: coords.len() as u32,
            });
        }
        for (axis, &x) in coords.iter().enumerate() {
            if !(0.0..1.0).contains(&x) {
                return Err(Error::CoordinateOutOfRange { axis, value: x });
            }
        }
        Ok(Point { coords })
    }

    #[inline]
    pub fn dim(&self) -> u32 {
        self.coords.len() as u32
    }

    #[inline]
    pub fn coord(&self, axis: usize) -> f64 {
        self.coords[axis]
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }
}

/// The unique depth-m cube containing a point.
///
/// Scaling by 2^m is exact in binary floating point, so the index
/// `floor(x·2^m)` is exactly the half-open cube membership test.
pub fn address_of(p: &Point, depth: u32) -> Result<DyadicAddress> {
    if depth > MAX_DEPTH {
        return Err(Error::DepthOutOfRange {
            depth,
            max: MAX_DEPTH,
        });
    }
    let indices: Vec<u64> = p
        .coords()
        .iter()
        .map(|&x| (x * (depth as f64).exp2()) as u64)
        .collect();
    DyadicAddress::from_axis_indices(p.dim(), depth, &indices)
}

/// The smallest dyadic cube containing both points — the "ball" B(x,y) —
/// with depth capped at `max_depth` so coincident points stay total.
pub fn dyadic_ball(x: &Point, y: &Point, max_depth: u32) -> Result<DyadicAddress> {
    if x.dim() != y.dim() {
        return Err(Error::DimensionMismatch {
            expected: x.dim(),
            found: y.dim(),
        });
    }
    let ax = address_of(x, max_depth)?;
    let ay = address_of(y, max_depth)?;
    let depth = ax.common_prefix_depth(&ay);
    ax.ancestor(depth)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn pt(coords: &[f64]) -> Point {
        Point::new(coords.to_vec()).unwrap()
    }

    /// Brute-force oracle: scan every depth-m cube for the one holding p.
    fn scan_for_cube(p: &Point, depth: u32) -> DyadicAddress {
        let d = p.dim();
        let side = (-(depth as f64)).exp2();
        let per_axis = 1u64 << depth;
        let mut indices = vec![0u64; d as usize];
        loop {
            let hit = (0..d as usize).all(|ax| {
                let lo = indices[ax] as f64 * side;
                p.coord(ax) >= lo && p.coord(ax) < lo + side
            });
            if hit {
                return DyadicAddress::from_axis_indices(d, depth, &indices).unwrap();
            }
            // odometer increment
            let mut ax = 0;
            loop {
                indices[ax] += 1;
                if indices[ax] < per_axis {
                    break;
                }
                indices[ax] = 0;
                ax += 1;
                assert!(ax < d as usize, "point not found in any cube");
            }
        }
    }

    #[test]
    fn address_of_origin_is_all_zero_path() {
        let a = address_of(&pt(&[0.0]), 3).unwrap();
        assert_eq!((a.symbol(0), a.symbol(1), a.symbol(2)), (0, 0, 0));
    }

    #[test]
    fn address_of_point_three_tenths() {
        // 0.3 = 0.0100… in binary; brute-force scan over all 8 depth-3 cells agrees.
        let p = pt(&[0.3]);
        let a = address_of(&p, 3).unwrap();
        assert_eq!((a.symbol(0), a.symbol(1), a.symbol(2)), (0, 1, 0));
        assert_eq!(a.low_corner(), vec![0.25]);
        assert_eq!(a, scan_for_cube(&p, 3));
    }

    #[test]
    fn half_open_boundary_maps_up() {
        let a = address_of(&pt(&[0.5, 0.5]), 1).unwrap();
        assert_eq!(a.symbol(0), 3); // both bits set: the [0.5,1)² quadrant
    }

    #[test]
    fn ball_of_nearby_points() {
        // 0.3 and 0.4 agree on bits (0,1) and split at bit 3 → [0.25, 0.5).
        let b = dyadic_ball(&pt(&[0.3]), &pt(&[0.4]), 60).unwrap();
        assert_eq!(b.depth(), 2);
        assert_eq!(b.low_corner(), vec![0.25]);
        assert_eq!(b.side(), 0.25);
    }

    #[test]
    fn ball_straddling_dyadic_hyperplane_is_large() {
        // Adjacent points either side of 1/4 diverge at the second bit.
        let b = dyadic_ball(&pt(&[0.249]), &pt(&[0.25]), 60).unwrap();
        assert_eq!(b.depth(), 1);
        assert_eq!(b.low_corner(), vec![0.0]);
        assert_eq!(b.side(), 0.5);
    }

    #[test]
    fn ball_of_coincident_points_hits_the_cap() {
        let p = pt(&[0.371, 0.82]);
        let b = dyadic_ball(&p, &p, 17).unwrap();
        assert_eq!(b.depth(), 17);
        assert_eq!(b, address_of(&p, 17).unwrap());
    }

    #[test]
    fn children_partition_the_parent() {
        for dim in 1..=3u32 {
            let root = DyadicAddress::root(dim).unwrap();
            let kids = root.children().unwrap();
            assert_eq!(kids.len(), 1 << dim);
            let total: f64 = kids.iter().map(|k| k.lebesgue()).sum();
            assert!((total - root.lebesgue()).abs() < 1e-15);
            for (i, k) in kids.iter().enumerate() {
                assert_eq!(k.symbol(0), i as u32);
                assert_eq!(k.parent().unwrap(), root);
                for other in &kids[..i] {
                    assert_ne!(k, other);
                }
            }
        }
    }

    #[test]
    fn children_of_d1_root_are_the_two_halves() {
        let kids = DyadicAddress::root(1).unwrap().children().unwrap();
        assert_eq!(kids[0].low_corner(), vec![0.0]);
        assert_eq!(kids[1].low_corner(), vec![0.5]);
        assert_eq!(kids[0].side(), 0.5);
    }

    #[test]
    fn lebesgue_measures() {
        let mut a = DyadicAddress::root(2).unwrap();
        for _ in 0..3 {
            a = a.child(0).unwrap();
        }
        assert_eq!(a.lebesgue(), 2f64.powi(-6));
        assert_eq!(DyadicAddress::root(3).unwrap().lebesgue(), 1.0);
        let mut b = DyadicAddress::root(1).unwrap();
        for _ in 0..10 {
            b = b.child(1).unwrap();
        }
        assert_eq!(b.lebesgue(), 2f64.powi(-10));
    }

    #[test]
    fn deep_partition_sums_to_one() {
        // depth 5 in d=2: 1024 cubes of measure 2^{-10}.
        let mut frontier = vec![DyadicAddress::root(2).unwrap()];
        for _ in 0..5 {
            frontier = frontier
                .iter()
                .flat_map(|a| a.children().unwrap())
                .collect();
        }
        assert_eq!(frontier.len(), 1024);
        let total: f64 = frontier.iter().map(|a| a.lebesgue()).sum();
        assert!((total - 1.0).abs() < 1e-12);
    }

    #[test]
    fn serialization_round_trip_and_format() {
        let a = DyadicAddress::root(2)
            .unwrap()
            .child(0)
            .unwrap()
            .child(2)
            .unwrap()
            .child(1)
            .unwrap();
        assert_eq!(a.to_string(), "2:3:021");
        let back: DyadicAddress = "2:3:021".parse().unwrap();
        assert_eq!(back, a);
        let root: DyadicAddress = "3:0:".parse().unwrap();
        assert_eq!(root, DyadicAddress::root(3).unwrap());
        assert!("2:3:09".parse::<DyadicAddress>().is_err()); // wrong length
        assert!("2:1:7".parse::<DyadicAddress>().is_err()); // symbol ≥ 2^d
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(DyadicAddress::root(0).is_err());
        assert!(DyadicAddress::root(5).is_err());
        assert!(Point::new(vec![1.0]).is_err());
        assert!(Point::new(vec![-0.1]).is_err());
        assert!(address_of(&pt(&[0.5]), 61).is_err());
        let root = DyadicAddress::root(2).unwrap();
        assert!(root.child(4).is_err());
    }

    proptest! {
        #[test]
        fn address_matches_brute_force_scan(x in 0.0f64..1.0, m in 0u32..7) {
            let p = pt(&[x]);
            prop_assert_eq!(address_of(&p, m).unwrap(), scan_for_cube(&p, m));
        }

        #[test]
        fn ball_symmetry_and_nesting(
            x in 0.0f64..1.0, y in 0.0f64..1.0, u in 0.0f64..1.0, v in 0.0f64..1.0,
        ) {
            let (a, b) = (pt(&[x, u]), pt(&[y, v]));
            let ball = dyadic_ball(&a, &b, 40).unwrap();
            prop_assert_eq!(ball, dyadic_ball(&b, &a, 40).unwrap());
            // the ball is an ancestor of both points' addresses at any deeper m
            for m in [ball.depth(), ball.depth() + 3] {
                let m = m.min(40);
                prop_assert_eq!(address_of(&a, m).unwrap().ancestor(ball.depth()).unwrap(), ball);
                prop_assert_eq!(address_of(&b, m).unwrap().ancestor(ball.depth()).unwrap(), ball);
            }
            prop_assert!(ball.contains(&a).unwrap() && ball.contains(&b).unwrap());
        }

        #[test]
        fn ball_depth_is_ultrametric(
            x in 0.0f64..1.0, y in 0.0f64..1.0, z in 0.0f64..1.0,
        ) {
            let (px, py, pz) = (pt(&[x]), pt(&[y]), pt(&[z]));
            let dxz = dyadic_ball(&px, &pz, 50).unwrap().depth();
            let dxy = dyadic_ball(&px, &py, 50).unwrap().depth();
            let dyz = dyadic_ball(&py, &pz, 50).unwrap().depth();
            prop_assert!(dxz >= dxy.min(dyz));
        }

        #[test]
        fn axis_indices_round_trip(j0 in 0u64..256, j1 in 0u64..256) {
            let a = DyadicAddress::from_axis_indices(2, 8, &[j0, j1]).unwrap();
            prop_assert_eq!(a.axis_index(0), j0);
            prop_assert_eq!(a.axis_index(1), j1);
            let s: DyadicAddress = a.to_string().parse().unwrap();
            prop_assert_eq!(s, a);
        }
    }
}
