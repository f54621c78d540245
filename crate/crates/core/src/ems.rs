//! Empty maximal spaces of a partial packing.
//!
//! An [`EmsSet`] holds every inclusion-maximal empty box of the working bin.
//! Placing a box replaces each intersected space by up to six clipped
//! sub-boxes (the difference process), after which spaces contained in other
//! spaces are dropped. Overlapping, non-nested spaces are all kept.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{BinExtents, Cuboid, Length, OrientedDims, Point3};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EmsError {
    #[error("bin must have positive volume")]
    DegenerateBin,
    #[error("placed box {0:?} lies outside the bin")]
    OutOfBin(Cuboid),
}

/// An axis-aligned empty box `[min, max)` with positive volume.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct EmptyMaximalSpace(Cuboid);

impl EmptyMaximalSpace {
    pub fn new(min: Point3, max: Point3) -> Self {
        Self(Cuboid::new(min, max))
    }

    pub fn min_corner(&self) -> Point3 {
        self.0.min
    }

    pub fn max_corner(&self) -> Point3 {
        self.0.max
    }

    pub fn cuboid(&self) -> &Cuboid {
        &self.0
    }

    pub fn spans(&self) -> [Length; 3] {
        self.0.spans()
    }

    /// Whether a box with these oriented sides fits when placed at the min corner.
    pub fn fits(&self, dims: OrientedDims) -> bool {
        let s = self.spans();
        dims.l <= s[0] && dims.w <= s[1] && dims.h <= s[2]
    }

    /// `min(span − side)` over the three axes, the tie-break slack.
    pub fn slack(&self, dims: OrientedDims) -> Length {
        let s = self.spans();
        (s[0] - dims.l).min(s[1] - dims.w).min(s[2] - dims.h)
    }

    fn key(&self) -> [Length; 6] {
        let (a, b) = (self.0.min, self.0.max);
        [a.z, a.y, a.x, b.z, b.y, b.x]
    }
}

/// Canonical order: bottom first, then back, then left, by min corner and then max corner.
impl Ord for EmptyMaximalSpace {
    fn cmp(&self, other: &Self) -> Ordering {
        self.key().cmp(&other.key())
    }
}

impl PartialOrd for EmptyMaximalSpace {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Set of empty maximal spaces inside a fixed bin, kept in canonical order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EmsSet {
    bin: BinExtents,
    spaces: Vec<EmptyMaximalSpace>,
}

impl EmsSet {
    pub fn bin(&self) -> BinExtents {
        self.bin
    }

    pub fn spaces(&self) -> &[EmptyMaximalSpace] {
        &self.spaces
    }

    pub fn iter(&self) -> impl Iterator<Item = &EmptyMaximalSpace> {
        self.spaces.iter()
    }

    pub fn len(&self) -> usize {
        self.spaces.len()
    }

    pub fn is_empty(&self) -> bool {
        self.spaces.is_empty()
    }

    /// Places `dims` at `origin` and returns the updated set.
    pub fn place_and_split(&self, origin: Point3, dims: OrientedDims) -> Result<EmsSet, EmsError> {
        place_and_split(self, origin, dims)
    }
}

pub fn initial_ems(bin: BinExtents) -> Result<EmsSet, EmsError> {
    if bin.l <= 0 || bin.w <= 0 || bin.h <= 0 {
        return Err(EmsError::DegenerateBin);
    }
    Ok(EmsSet {
        bin,
        spaces: vec![EmptyMaximalSpace(bin.as_cuboid())],
    })
}

pub fn place_and_split(
    ems: &EmsSet,
    origin: Point3,
    dims: OrientedDims,
) -> Result<EmsSet, EmsError> {
    let placed = Cuboid::from_origin_dims(origin, dims);
    if !ems.bin.as_cuboid().contains(&placed) {
        return Err(EmsError::OutOfBin(placed));
    }
    let mut next = Vec::with_capacity(ems.spaces.len() + 6);
    for space in &ems.spaces {
        if space.0.intersects(&placed) {
            difference(&space.0, &placed, &mut next);
        } else {
            next.push(*space);
        }
    }
    Ok(EmsSet {
        bin: ems.bin,
        spaces: prune_inclusions(next),
    })
}

/// Pushes the positive-volume parts of `space` lying on each side of `cut`.
fn difference(space: &Cuboid, cut: &Cuboid, out: &mut Vec<EmptyMaximalSpace>) {
    let (lo, hi) = (space.min.as_array(), space.max.as_array());
    let (clo, chi) = (cut.min.as_array(), cut.max.as_array());
    for axis in 0..3 {
        if clo[axis] > lo[axis] {
            let mut max = hi;
            max[axis] = clo[axis];
            out.push(EmptyMaximalSpace::new(space.min, Point3::from_array(max)));
        }
        if chi[axis] < hi[axis] {
            let mut min = lo;
            min[axis] = chi[axis];
            out.push(EmptyMaximalSpace::new(Point3::from_array(min), space.max));
        }
    }
}

/// Keeps only the inclusion-maximal members, without duplicates, in canonical order.
pub fn prune_inclusions(mut spaces: Vec<EmptyMaximalSpace>) -> Vec<EmptyMaximalSpace> {
    spaces.retain(|s| s.0.has_volume());
    spaces.sort_unstable();
    spaces.dedup();
    let keep: Vec<bool> = spaces
        .iter()
        .enumerate()
        .map(|(i, s)| {
            !spaces
                .iter()
                .enumerate()
                .any(|(j, t)| i != j && t.0.contains(&s.0))
        })
        .collect();
    spaces
        .into_iter()
        .zip(keep)
        .filter_map(|(s, k)| k.then_some(s))
        .collect()
}
