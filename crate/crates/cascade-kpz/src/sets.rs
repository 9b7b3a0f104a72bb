//! Fractal test sets given as exact cube classifiers.
//!
//! A set is dyadic-native: its classifier answers, for any dyadic cube,
//! whether the cube misses the set, meets it, or lies inside it — exactly,
//! never approximately. That makes uniform-depth covers of these sets exact
//! and estimator calibration analytic. Where the Lebesgue dimension is
//! known in closed form it is exposed via [`SetOracle::analytic_zeta0`].

use std::fmt;

use crate::dyadic::{DyadicAddress, MAX_DEPTH, MAX_DIM};
use crate::error::{Error, Result};

/// Exact three-valued cube-versus-set classification.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CubeClass {
    Disjoint,
    Intersects,
    Contained,
}

#[derive(Clone, Debug, PartialEq)]
enum SetKind {
    /// The whole unit cube.
    FullCube,
    /// Keep a fixed subset of child symbols at every level.
    DyadicCantor { keep: Vec<u32>, keep_mask: u32 },
    /// The hyperplane { x : x_axis = coord }, axis 1-based, coord a dyadic
    /// rational so classification is exact.
    AxisSlice {
        axis: u32,
        coord: f64,
        coord_bits: u64,
    },
    /// One point.
    Singleton {
        point: Vec<f64>,
        point_bits: Vec<u64>,
    },
    /// Finite union of member sets.
    Union { members: Vec<SetOracle> },
}

/// A fractal subset of [0,1)^d with an exact cube classifier.
#[derive(Clone, Debug, PartialEq)]
pub struct SetOracle {
    dim: u32,
    kind: SetKind,
}

fn check_dim(dim: u32) -> Result<()> {
    if dim == 0 || dim > MAX_DIM {
        return Err(Error::UnsupportedDimension { dim });
    }
    Ok(())
}

/// floor(x·2^60) — the depth-60 axis index of a coordinate. Exact: scaling
/// by a power of two does not round.
fn coord_bits(x: f64) -> u64 {
    (x * (MAX_DEPTH as f64).exp2()) as u64
}

impl SetOracle {
    pub fn full_cube(dim: u32) -> Result<Self> {
        check_dim(dim)?;
        Ok(SetOracle {
            dim,
            kind: SetKind::FullCube,
        })
    }

    /// The self-similar set keeping the given child symbols at every level.
    pub fn dyadic_cantor(dim: u32, keep: &[u32]) -> Result<Self> {
        check_dim(dim)?;
        let arity = 1u32 << dim;
        let mut symbols: Vec<u32> = keep.to_vec();
        symbols.sort_unstable();
        symbols.dedup();
        if symbols.is_empty() {
            return Err(Error::Contract("cantor keep-set must be non-empty".into()));
        }
        if symbols.iter().any(|&s| s >= arity) {
            return Err(Error::Contract(format!(
                "cantor keep symbols must be < 2^d = {arity}"
            )));
        }
        let keep_mask = symbols.iter().fold(0u32, |m, &s| m | (1 << s));
        Ok(SetOracle {
            dim,
            kind: SetKind::DyadicCantor {
                keep: symbols,
                keep_mask,
            },
        })
    }

    /// The dyadic hyperplane x_axis = coord (axis 1-based).
    pub fn axis_slice(dim: u32, axis: u32, coord: f64) -> Result<Self> {
        check_dim(dim)?;
        if axis < 1 || axis > dim {
            return Err(Error::Contract(format!(
                "slice axis {axis} out of range 1..={dim}"
            )));
        }
        if !(0.0..1.0).contains(&coord) {
            return Err(Error::CoordinateOutOfRange {
                axis: axis as usize - 1,
                value: coord,
            });
        }
        let scaled = coord * (MAX_DEPTH as f64).exp2();
        if scaled.fract() != 0.0 {
            return Err(Error::Contract(format!(
                "slice coordinate {coord} is not a dyadic rational of depth ≤ {MAX_DEPTH}"
            )));
        }
        Ok(SetOracle {
            dim,
            kind: SetKind::AxisSlice {
                axis,
                coord,
                coord_bits: scaled as u64,
            },
        })
    }

    pub fn singleton(point: &[f64]) -> Result<Self> {
        let dim = point.len() as u32;
        check_dim(dim)?;
        for (axis, &x) in point.iter().enumerate() {
            if !(0.0..1.0).contains(&x) {
                return Err(Error::CoordinateOutOfRange { axis, value: x });
            }
        }
        Ok(SetOracle {
            dim,
            kind: SetKind::Singleton {
                point_bits: point.iter().map(|&x| coord_bits(x)).collect(),
                point: point.to_vec(),
            },
        })
    }

    pub fn union(members: Vec<SetOracle>) -> Result<Self> {
        let dim = match members.first() {
            Some(m) => m.dim,
            None => return Err(Error::Contract("union needs at least one member".into())),
        };
        if let Some(m) = members.iter().find(|m| m.dim != dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: m.dim,
            });
        }
        Ok(SetOracle {
            dim,
            kind: SetKind::Union { members },
        })
    }

    #[inline]
    pub fn dim(&self) -> u32 {
        self.dim
    }

    /// Short kind tag for error messages and CSV columns.
    pub fn kind_name(&self) -> &'static str {
        match self.kind {
            SetKind::FullCube => "fullcube",
            SetKind::DyadicCantor { .. } => "cantor",
            SetKind::AxisSlice { .. } => "slice",
            SetKind::Singleton { .. } => "singleton",
            SetKind::Union { .. } => "union",
        }
    }

    /// Exact classification of a cube against the set.
    ///
    /// `Intersects` means the cube genuinely meets the set but is not inside
    /// it; refinement is monotone (children of Disjoint are Disjoint,
    /// children of Contained are Contained).
    pub fn classify(&self, a: &DyadicAddress) -> Result<CubeClass> {
        if a.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: a.dim(),
            });
        }
        Ok(self.classify_checked(a))
    }

    fn classify_checked(&self, a: &DyadicAddress) -> CubeClass {
        match &self.kind {
            SetKind::FullCube => CubeClass::Contained,
            SetKind::DyadicCantor { keep, keep_mask } => {
                for level in 0..a.depth() {
                    if keep_mask & (1 << a.symbol(level)) == 0 {
                        return CubeClass::Disjoint;
                    }
                }
                if keep.len() as u32 == a.arity() {
                    CubeClass::Contained
                } else {
                    CubeClass::Intersects
                }
            }
            SetKind::AxisSlice {
                axis, coord_bits, ..
            } => {
                // The cube meets the hyperplane iff its axis interval
                // contains the coordinate (half-open convention).
                let m = a.depth();
                if a.axis_index(axis - 1) == coord_bits >> (MAX_DEPTH - m) {
                    CubeClass::Intersects
                } else {
                    CubeClass::Disjoint
                }
            }
            SetKind::Singleton { point_bits, .. } => {
                let m = a.depth();
                let hit = (0..self.dim)
                    .all(|ax| a.axis_index(ax) == point_bits[ax as usize] >> (MAX_DEPTH - m));
                if hit {
                    CubeClass::Intersects
                } else {
                    CubeClass::Disjoint
                }
            }
            SetKind::Union { members } => {
                let mut any_intersects = false;
                for m in members {
                    match m.classify_checked(a) {
                        CubeClass::Contained => return CubeClass::Contained,
                        CubeClass::Intersects => any_intersects = true,
                        CubeClass::Disjoint => {}
                    }
                }
                if any_intersects {
                    CubeClass::Intersects
                } else {
                    CubeClass::Disjoint
                }
            }
        }
    }

    /// The known Lebesgue dimension ζ₀ ∈ \[0,1\], when analytic.
    ///
    /// FullCube → 1; a Cantor set keeping k of 2^d symbols → log2(k)/d;
    /// a hyperplane slice → (d−1)/d; a singleton → 0; a union → the max
    /// over members (absent if any member is unknown).
    pub fn analytic_zeta0(&self) -> Option<f64> {
        match &self.kind {
            SetKind::FullCube => Some(1.0),
            SetKind::DyadicCantor { keep, .. } => {
                Some((keep.len() as f64).log2() / self.dim as f64)
            }
            SetKind::AxisSlice { .. } => Some((self.dim as f64 - 1.0) / self.dim as f64),
            SetKind::Singleton { .. } => Some(0.0),
            SetKind::Union { members } => members
                .iter()
                .map(|m| m.analytic_zeta0())
                .collect::<Option<Vec<f64>>>()
                .map(|zs| zs.into_iter().fold(0.0, f64::max)),
        }
    }

    /// Canonical config-grammar form, e.g. `cantor(keep=[0,3])`.
    pub fn spec_string(&self) -> String {
        match &self.kind {
            SetKind::FullCube => "fullcube".into(),
            SetKind::DyadicCantor { keep, .. } => {
                let syms: Vec<String> = keep.iter().map(|s| s.to_string()).collect();
                format!("cantor(keep=[{}])", syms.join(","))
            }
            SetKind::AxisSlice { axis, coord, .. } => format!("slice(axis={axis},coord={coord})"),
            SetKind::Singleton { point, .. } => {
                let cs: Vec<String> = point.iter().map(|c| c.to_string()).collect();
                format!("singleton({})", cs.join(","))
            }
            SetKind::Union { members } => {
                let ms: Vec<String> = members.iter().map(|m| m.spec_string()).collect();
                format!("union({})", ms.join(","))
            }
        }
    }
}

impl fmt::Display for SetOracle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.spec_string())
    }
}
