//! Cuboid arithmetic, orientations, bin extents and the solution validator.
//!
//! All lengths are exact integers. Surface areas are reported both as the
//! physical area `2·(LW + LH + WH)` and as the "half area" `LW + LH + WH`,
//! which is the quantity the packing objective minimizes.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Integer length unit used for every coordinate and side.
pub type Length = i64;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GeometryError {
    #[error("item dimensions must be positive, got ({0}, {1}, {2})")]
    NonPositiveDims(Length, Length, Length),
    #[error("bin extents must be positive, got ({0}, {1}, {2})")]
    DegenerateExtents(Length, Length, Length),
    #[error("placement list is empty")]
    EmptyPacking,
    #[error("instance has no items")]
    EmptyInstance,
    #[error("instance has {expected} items but solution has {found} placements")]
    InstanceMismatch { expected: usize, found: usize },
    #[error("placement refers to item {index} but instance has {len} items")]
    ItemOutOfRange { index: usize, len: usize },
    #[error("unknown orientation label `{0}`")]
    UnknownOrientation(String),
}

/// Side lengths of a cuboid item as given in the instance.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawDims", into = "RawDims")]
pub struct ItemDims {
    l: Length,
    w: Length,
    h: Length,
}

#[derive(Serialize, Deserialize)]
struct RawDims {
    l: Length,
    w: Length,
    h: Length,
}

impl TryFrom<RawDims> for ItemDims {
    type Error = GeometryError;

    fn try_from(raw: RawDims) -> Result<Self, Self::Error> {
        ItemDims::new(raw.l, raw.w, raw.h)
    }
}

impl From<ItemDims> for RawDims {
    fn from(d: ItemDims) -> Self {
        RawDims { l: d.l, w: d.w, h: d.h }
    }
}

impl ItemDims {
    pub fn new(l: Length, w: Length, h: Length) -> Result<Self, GeometryError> {
        if l <= 0 || w <= 0 || h <= 0 {
            return Err(GeometryError::NonPositiveDims(l, w, h));
        }
        Ok(Self { l, w, h })
    }

    pub fn l(&self) -> Length {
        self.l
    }

    pub fn w(&self) -> Length {
        self.w
    }

    pub fn h(&self) -> Length {
        self.h
    }

    pub fn as_array(&self) -> [Length; 3] {
        [self.l, self.w, self.h]
    }

    pub fn volume(&self) -> Length {
        self.l * self.w * self.h
    }

    pub fn max_side(&self) -> Length {
        self.l.max(self.w).max(self.h)
    }

    /// `lw + lh + wh` of the item itself.
    pub fn half_surface_area(&self) -> Length {
        self.l * self.w + self.l * self.h + self.w * self.h
    }

    pub fn scaled(&self, factor: Length) -> Result<Self, GeometryError> {
        Self::new(self.l * factor, self.w * factor, self.h * factor)
    }

    pub fn orient(&self, orientation: Orientation) -> OrientedDims {
        orient(*self, orientation)
    }
}

/// The six axis-aligned orientations of a cuboid.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Orientation {
    FrontUp,
    FrontDown,
    SideUp,
    SideDown,
    BottomUp,
    BottomDown,
}

impl Orientation {
    /// All orientations in enum order, which is also the tie-break order.
    pub const ALL: [Orientation; 6] = [
        Orientation::FrontUp,
        Orientation::FrontDown,
        Orientation::SideUp,
        Orientation::SideDown,
        Orientation::BottomUp,
        Orientation::BottomDown,
    ];

    /// Zero-based position in [`Orientation::ALL`].
    pub fn index(self) -> usize {
        self as usize
    }

    pub fn label(self) -> &'static str {
        match self {
            Orientation::FrontUp => "FrontUp",
            Orientation::FrontDown => "FrontDown",
            Orientation::SideUp => "SideUp",
            Orientation::SideDown => "SideDown",
            Orientation::BottomUp => "BottomUp",
            Orientation::BottomDown => "BottomDown",
        }
    }
}

impl fmt::Display for Orientation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for Orientation {
    type Err = GeometryError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Orientation::ALL
            .into_iter()
            .find(|o| o.label() == s)
            .ok_or_else(|| GeometryError::UnknownOrientation(s.to_string()))
    }
}

/// Item sides after applying an orientation, aligned with the x, y, z axes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct OrientedDims {
    pub l: Length,
    pub w: Length,
    pub h: Length,
}

impl OrientedDims {
    pub fn as_array(&self) -> [Length; 3] {
        [self.l, self.w, self.h]
    }

    pub fn volume(&self) -> Length {
        self.l * self.w * self.h
    }
}

/// Permutes `(l, w, h)` according to the orientation.
pub fn orient(dims: ItemDims, orientation: Orientation) -> OrientedDims {
    let ItemDims { l, w, h } = dims;
    let (l, w, h) = match orientation {
        Orientation::FrontUp => (l, w, h),
        Orientation::FrontDown => (l, h, w),
        Orientation::SideUp => (w, l, h),
        Orientation::SideDown => (w, h, l),
        Orientation::BottomUp => (h, l, w),
        Orientation::BottomDown => (h, w, l),
    };
    OrientedDims { l, w, h }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Point3 {
    pub x: Length,
    pub y: Length,
    pub z: Length,
}

impl Point3 {
    pub const ORIGIN: Point3 = Point3 { x: 0, y: 0, z: 0 };

    pub fn new(x: Length, y: Length, z: Length) -> Self {
        Self { x, y, z }
    }

    pub fn as_array(&self) -> [Length; 3] {
        [self.x, self.y, self.z]
    }

    pub fn from_array(a: [Length; 3]) -> Self {
        Self::new(a[0], a[1], a[2])
    }
}

/// Half-open axis-aligned box `[min, max)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Cuboid {
    pub min: Point3,
    pub max: Point3,
}

impl Cuboid {
    pub fn new(min: Point3, max: Point3) -> Self {
        Self { min, max }
    }

    pub fn from_origin_dims(origin: Point3, dims: OrientedDims) -> Self {
        Self {
            min: origin,
            max: Point3::new(origin.x + dims.l, origin.y + dims.w, origin.z + dims.h),
        }
    }

    pub fn spans(&self) -> [Length; 3] {
        [
            self.max.x - self.min.x,
            self.max.y - self.min.y,
            self.max.z - self.min.z,
        ]
    }

    pub fn has_volume(&self) -> bool {
        self.spans().iter().all(|&s| s > 0)
    }

    pub fn volume(&self) -> Length {
        self.spans().iter().product()
    }

    /// True when the interiors share positive volume. Touching faces do not count.
    pub fn intersects(&self, other: &Cuboid) -> bool {
        let (a0, a1) = (self.min.as_array(), self.max.as_array());
        let (b0, b1) = (other.min.as_array(), other.max.as_array());
        (0..3).all(|k| a0[k] < b1[k] && b0[k] < a1[k])
    }

    pub fn contains(&self, other: &Cuboid) -> bool {
        let (a0, a1) = (self.min.as_array(), self.max.as_array());
        let (b0, b1) = (other.min.as_array(), other.max.as_array());
        (0..3).all(|k| a0[k] <= b0[k] && b1[k] <= a1[k])
    }
}

/// One packed item: which item, where its left-bottom-back corner sits, and how it is turned.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Placement {
    pub item_index: usize,
    pub origin: Point3,
    pub orientation: Orientation,
}

impl Placement {
    pub fn cuboid(&self, dims: ItemDims) -> Cuboid {
        Cuboid::from_origin_dims(self.origin, dims.orient(self.orientation))
    }
}

/// Side lengths `(L, W, H)` of a bin.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BinExtents {
    pub l: Length,
    pub w: Length,
    pub h: Length,
}

impl BinExtents {
    pub fn new(l: Length, w: Length, h: Length) -> Result<Self, GeometryError> {
        if l <= 0 || w <= 0 || h <= 0 {
            return Err(GeometryError::DegenerateExtents(l, w, h));
        }
        Ok(Self { l, w, h })
    }

    pub fn cube(side: Length) -> Result<Self, GeometryError> {
        Self::new(side, side, side)
    }

    pub fn as_array(&self) -> [Length; 3] {
        [self.l, self.w, self.h]
    }

    pub fn volume(&self) -> Length {
        self.l * self.w * self.h
    }

    /// Physical surface area `2·(LW + LH + WH)`.
    pub fn surface_area(&self) -> Length {
        2 * self.half_surface_area()
    }

    /// The objective expression `LW + LH + WH`.
    pub fn half_surface_area(&self) -> Length {
        self.l * self.w + self.l * self.h + self.w * self.h
    }

    pub fn as_cuboid(&self) -> Cuboid {
        Cuboid::new(Point3::ORIGIN, Point3::new(self.l, self.w, self.h))
    }
}

pub fn surface_area(extents: BinExtents) -> Length {
    extents.surface_area()
}

/// A packing problem: a named list of items.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "InstanceRepr")]
pub struct Instance {
    pub id: String,
    items: Vec<ItemDims>,
}

#[derive(Deserialize)]
struct InstanceRepr {
    id: String,
    items: Vec<ItemDims>,
}

impl TryFrom<InstanceRepr> for Instance {
    type Error = GeometryError;

    fn try_from(repr: InstanceRepr) -> Result<Self, Self::Error> {
        Instance::new(repr.id, repr.items)
    }
}

impl Instance {
    pub fn new(id: impl Into<String>, items: Vec<ItemDims>) -> Result<Self, GeometryError> {
        if items.is_empty() {
            return Err(GeometryError::EmptyInstance);
        }
        Ok(Self {
            id: id.into(),
            items,
        })
    }

    /// Convenience constructor from raw `(l, w, h)` triples.
    pub fn from_triples(
        id: impl Into<String>,
        triples: &[(Length, Length, Length)],
    ) -> Result<Self, GeometryError> {
        let items = triples
            .iter()
            .map(|&(l, w, h)| ItemDims::new(l, w, h))
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(id, items)
    }

    pub fn items(&self) -> &[ItemDims] {
        &self.items
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn item(&self, index: usize) -> ItemDims {
        self.items[index]
    }

    pub fn total_volume(&self) -> Length {
        self.items.iter().map(ItemDims::volume).sum()
    }

    pub fn max_side(&self) -> Length {
        self.items.iter().map(ItemDims::max_side).max().unwrap_or(0)
    }

    /// Side of the cubic working bin `Σ max(l_i, w_i, h_i)`, large enough for any sequence.
    pub fn working_bin_side(&self) -> Length {
        self.items.iter().map(ItemDims::max_side).sum()
    }

    pub fn working_bin(&self) -> BinExtents {
        BinExtents {
            l: self.working_bin_side(),
            w: self.working_bin_side(),
            h: self.working_bin_side(),
        }
    }

    pub fn scaled(&self, factor: Length) -> Result<Self, GeometryError> {
        let items = self
            .items
            .iter()
            .map(|d| d.scaled(factor))
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(self.id.clone(), items)
    }
}

/// Per-axis maxima of `origin + oriented side` over all placements.
pub fn tight_extents(
    placements: &[Placement],
    instance: &Instance,
) -> Result<BinExtents, GeometryError> {
    if placements.is_empty() {
        return Err(GeometryError::EmptyPacking);
    }
    let mut far = [0 as Length; 3];
    for p in placements {
        if p.item_index >= instance.len() {
            return Err(GeometryError::ItemOutOfRange {
                index: p.item_index,
                len: instance.len(),
            });
        }
        let corner = p.cuboid(instance.item(p.item_index)).max.as_array();
        for k in 0..3 {
            far[k] = far[k].max(corner[k]);
        }
    }
    BinExtents::new(far[0], far[1], far[2])
}

/// A complete packing of one instance.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PackingSolution {
    pub instance_id: String,
    /// Order in which items were packed.
    pub sequence: Vec<usize>,
    /// Placements in packing order.
    pub placements: Vec<Placement>,
    pub extents: BinExtents,
    /// Physical area `2·(LW + LH + WH)` of `extents`.
    pub surface_area: Length,
}

impl PackingSolution {
    /// Builds a solution from placements listed in packing order, computing tight extents.
    pub fn from_placements(
        instance: &Instance,
        placements: Vec<Placement>,
    ) -> Result<Self, GeometryError> {
        let extents = tight_extents(&placements, instance)?;
        Ok(Self {
            instance_id: instance.id.clone(),
            sequence: placements.iter().map(|p| p.item_index).collect(),
            placements,
            extents,
            surface_area: extents.surface_area(),
        })
    }

    pub fn half_surface_area(&self) -> Length {
        self.surface_area / 2
    }

    /// Placement for a given item, if present.
    pub fn placement_of(&self, item: usize) -> Option<&Placement> {
        self.placements.iter().find(|p| p.item_index == item)
    }
}

/// Relative-position indicators of an ordered pair `(i, j)`.
///
/// `s`: i lies entirely before j along x. `u`: along y. `b`: along z.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct RelativePosition {
    pub s: bool,
    pub u: bool,
    pub b: bool,
}

impl RelativePosition {
    pub fn of(first: &Cuboid, second: &Cuboid) -> Self {
        Self {
            s: first.max.x <= second.min.x,
            u: first.max.y <= second.min.y,
            b: first.max.z <= second.min.z,
        }
    }

    pub fn any(&self) -> bool {
        self.s || self.u || self.b
    }
}

/// A separating assignment for an unordered pair, preferring `(i, j)` over `(j, i)` and x over y over z.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SeparationWitness {
    /// Item lying before the other along `axis`.
    pub before: usize,
    pub after: usize,
    /// 0 = x (`s`), 1 = y (`u`), 2 = z (`b`).
    pub axis: usize,
}

pub fn separation_witness(i: usize, a: &Cuboid, j: usize, b: &Cuboid) -> Option<SeparationWitness> {
    let pick = |rel: RelativePosition| {
        if rel.s {
            Some(0)
        } else if rel.u {
            Some(1)
        } else if rel.b {
            Some(2)
        } else {
            None
        }
    };
    if let Some(axis) = pick(RelativePosition::of(a, b)) {
        return Some(SeparationWitness { before: i, after: j, axis });
    }
    pick(RelativePosition::of(b, a)).map(|axis| SeparationWitness { before: j, after: i, axis })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Violation {
    /// Item has no placement, so no orientation is selected.
    MissingItem(usize),
    /// Item placed more than once, so more than one orientation is selected.
    DuplicateItem(usize),
    ItemOutOfRange(usize),
    NegativeCoordinate(usize),
    Overlap(usize, usize),
    OutsideExtents(usize),
    SequenceMismatch,
    AreaMismatch { stored: Length, expected: Length },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::MissingItem(i) => write!(f, "item {i} is not placed"),
            Violation::DuplicateItem(i) => write!(f, "item {i} is placed more than once"),
            Violation::ItemOutOfRange(i) => write!(f, "placement refers to unknown item {i}"),
            Violation::NegativeCoordinate(i) => write!(f, "item {i} has a negative coordinate"),
            Violation::Overlap(i, j) => write!(f, "items {i} and {j} overlap"),
            Violation::OutsideExtents(i) => write!(f, "item {i} exceeds the bin extents"),
            Violation::SequenceMismatch => f.write_str("sequence does not match placement order"),
            Violation::AreaMismatch { stored, expected } => {
                write!(f, "stored surface area {stored} differs from {expected}")
            }
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_pass(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn verdict(&self) -> &'static str {
        if self.is_pass() {
            "PASS"
        } else {
            "FAIL"
        }
    }
}

/// Checks a solution against the packing constraints: one orientation per
/// item, pairwise separation along some axis, and containment in the extents.
pub fn validate_solution(
    instance: &Instance,
    solution: &PackingSolution,
) -> Result<ValidationReport, GeometryError> {
    let n = instance.len();
    if solution.placements.len() != n {
        return Err(GeometryError::InstanceMismatch {
            expected: n,
            found: solution.placements.len(),
        });
    }
    let mut violations = Vec::new();

    let mut seen = vec![0usize; n];
    for p in &solution.placements {
        if p.item_index >= n {
            violations.push(Violation::ItemOutOfRange(p.item_index));
        } else {
            seen[p.item_index] += 1;
        }
    }
    for (i, &count) in seen.iter().enumerate() {
        match count {
            0 => violations.push(Violation::MissingItem(i)),
            1 => {}
            _ => violations.push(Violation::DuplicateItem(i)),
        }
    }
    let order: Vec<usize> = solution.placements.iter().map(|p| p.item_index).collect();
    if order != solution.sequence {
        violations.push(Violation::SequenceMismatch);
    }

    let valid: Vec<(usize, Cuboid)> = solution
        .placements
        .iter()
        .filter(|p| p.item_index < n)
        .map(|p| (p.item_index, p.cuboid(instance.item(p.item_index))))
        .collect();

    let bin = solution.extents.as_cuboid();
    for (i, c) in &valid {
        if c.min.as_array().iter().any(|&v| v < 0) {
            violations.push(Violation::NegativeCoordinate(*i));
        }
        if !bin.contains(c) {
            violations.push(Violation::OutsideExtents(*i));
        }
    }
    for (a, (i, ci)) in valid.iter().enumerate() {
        for (j, cj) in &valid[a + 1..] {
            if separation_witness(*i, ci, *j, cj).is_none() {
                violations.push(Violation::Overlap((*i).min(*j), (*i).max(*j)));
            }
        }
    }

    let expected = solution.extents.surface_area();
    if solution.surface_area != expected {
        violations.push(Violation::AreaMismatch {
            stored: solution.surface_area,
            expected,
        });
    }
    Ok(ValidationReport { violations })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn dims(l: Length, w: Length, h: Length) -> ItemDims {
        ItemDims::new(l, w, h).unwrap()
    }

    #[test]
    fn orient_matches_delta_rows() {
        let d = dims(1, 2, 3);
        let got: Vec<_> = Orientation::ALL.iter().map(|&o| d.orient(o).as_array()).collect();
        assert_eq!(
            got,
            vec![[1, 2, 3], [1, 3, 2], [2, 1, 3], [2, 3, 1], [3, 1, 2], [3, 2, 1]]
        );
        for o in Orientation::ALL {
            assert_eq!(dims(2, 2, 2).orient(o).as_array(), [2, 2, 2]);
        }
    }

    #[test]
    fn surface_area_examples() {
        assert_eq!(surface_area(BinExtents::new(2, 3, 4).unwrap()), 52);
        assert_eq!(surface_area(BinExtents::new(1, 1, 1).unwrap()), 6);
        assert_eq!(surface_area(BinExtents::new(1, 1, 2).unwrap()), 10);
    }

    #[test]
    fn rejects_bad_dims() {
        assert!(ItemDims::new(0, 1, 1).is_err());
        assert!(BinExtents::new(1, -1, 1).is_err());
        assert_eq!(Instance::new("x", vec![]), Err(GeometryError::EmptyInstance));
    }

    fn at(i: usize, x: Length, y: Length, z: Length, o: Orientation) -> Placement {
        Placement {
            item_index: i,
            origin: Point3::new(x, y, z),
            orientation: o,
        }
    }

    #[test]
    fn tight_extents_examples() {
        let one = Instance::from_triples("a", &[(2, 3, 4)]).unwrap();
        let e = tight_extents(&[at(0, 0, 0, 0, Orientation::FrontUp)], &one).unwrap();
        assert_eq!(e.as_array(), [2, 3, 4]);

        let cubes = Instance::from_triples("b", &[(1, 1, 1), (1, 1, 1)]).unwrap();
        let e = tight_extents(
            &[at(0, 0, 0, 0, Orientation::FrontUp), at(1, 0, 0, 1, Orientation::FrontUp)],
            &cubes,
        )
        .unwrap();
        assert_eq!(e.as_array(), [1, 1, 2]);

        let mixed = Instance::from_triples("c", &[(1, 2, 3), (1, 1, 1)]).unwrap();
        let e = tight_extents(
            &[at(0, 0, 0, 0, Orientation::FrontUp), at(1, 0, 2, 0, Orientation::FrontUp)],
            &mixed,
        )
        .unwrap();
        assert_eq!(e.as_array(), [1, 3, 3]);

        assert_eq!(tight_extents(&[], &mixed), Err(GeometryError::EmptyPacking));
    }

    fn solution(instance: &Instance, placements: Vec<Placement>, extents: BinExtents) -> PackingSolution {
        PackingSolution {
            instance_id: instance.id.clone(),
            sequence: placements.iter().map(|p| p.item_index).collect(),
            placements,
            extents,
            surface_area: extents.surface_area(),
        }
    }

    #[test]
    fn validator_flags_identical_boxes() {
        let cubes = Instance::from_triples("b", &[(1, 1, 1), (1, 1, 1)]).unwrap();
        let sol = solution(
            &cubes,
            vec![at(0, 0, 0, 0, Orientation::FrontUp), at(1, 0, 0, 0, Orientation::FrontUp)],
            BinExtents::new(1, 1, 1).unwrap(),
        );
        let report = validate_solution(&cubes, &sol).unwrap();
        assert!(!report.is_pass());
        assert!(report.violations.contains(&Violation::Overlap(0, 1)));
    }

    #[test]
    fn validator_accepts_touching_faces() {
        let cubes = Instance::from_triples("b", &[(1, 1, 1), (1, 1, 1)]).unwrap();
        let sol = solution(
            &cubes,
            vec![at(0, 0, 0, 0, Orientation::FrontUp), at(1, 1, 0, 0, Orientation::FrontUp)],
            BinExtents::new(2, 1, 1).unwrap(),
        );
        assert!(validate_solution(&cubes, &sol).unwrap().is_pass());
        let a = sol.placements[0].cuboid(cubes.item(0));
        let b = sol.placements[1].cuboid(cubes.item(1));
        assert_eq!(
            separation_witness(0, &a, 1, &b),
            Some(SeparationWitness { before: 0, after: 1, axis: 0 })
        );
    }

    #[test]
    fn validator_flags_structure_problems() {
        let cubes = Instance::from_triples("b", &[(1, 1, 1), (1, 1, 1)]).unwrap();
        let short = solution(
            &cubes,
            vec![at(0, 0, 0, 0, Orientation::FrontUp)],
            BinExtents::new(1, 1, 1).unwrap(),
        );
        assert_eq!(
            validate_solution(&cubes, &short),
            Err(GeometryError::InstanceMismatch { expected: 2, found: 1 })
        );

        let dup = solution(
            &cubes,
            vec![at(0, 0, 0, 0, Orientation::FrontUp), at(0, 1, 0, 0, Orientation::FrontUp)],
            BinExtents::new(2, 1, 1).unwrap(),
        );
        let r = validate_solution(&cubes, &dup).unwrap();
        assert!(r.violations.contains(&Violation::DuplicateItem(0)));
        assert!(r.violations.contains(&Violation::MissingItem(1)));

        let outside = solution(
            &cubes,
            vec![at(0, 0, 0, 0, Orientation::FrontUp), at(1, 1, 0, 0, Orientation::FrontUp)],
            BinExtents::new(1, 1, 1).unwrap(),
        );
        let r = validate_solution(&cubes, &outside).unwrap();
        assert_eq!(r.violations, vec![Violation::OutsideExtents(1)]);
    }

    #[test]
    fn instance_json_schema() {
        let inst: Instance =
            serde_json::from_str(r#"{"id":"t","items":[{"l":1,"w":2,"h":3}]}"#).unwrap();
        assert_eq!(inst.item(0).as_array(), [1, 2, 3]);
        assert!(serde_json::from_str::<Instance>(r#"{"id":"t","items":[{"l":0,"w":2,"h":3}]}"#).is_err());
        assert!(serde_json::from_str::<Instance>(r#"{"id":"t","items":[]}"#).is_err());
        let back: Instance = serde_json::from_str(&serde_json::to_string(&inst).unwrap()).unwrap();
        assert_eq!(back, inst);
    }

    proptest! {
        #[test]
        fn orientation_closure_and_coverage(l in 1i64..20, w in 1i64..20, h in 1i64..20) {
            let d = dims(l, w, h);
            let mut sorted = d.as_array();
            sorted.sort_unstable();
            let mut images = std::collections::BTreeSet::new();
            for o in Orientation::ALL {
                let mut r = d.orient(o).as_array();
                images.insert(r);
                r.sort_unstable();
                prop_assert_eq!(r, sorted);
            }
            let perms: std::collections::BTreeSet<[i64; 3]> = [
                [l, w, h], [l, h, w], [w, l, h], [w, h, l], [h, l, w], [h, w, l],
            ].into_iter().collect();
            prop_assert_eq!(images, perms);
        }

        #[test]
        fn scale_equivariance_of_extents(
            triples in proptest::collection::vec((1i64..6, 1i64..6, 1i64..6), 1..5),
            c in 1i64..5,
        ) {
            let inst = Instance::from_triples("p", &triples).unwrap();
            // Stack items along x at FrontUp.
            let mut x = 0;
            let placements: Vec<Placement> = inst.items().iter().enumerate().map(|(i, d)| {
                let p = at(i, x, 0, 0, Orientation::FrontUp);
                x += d.l();
                p
            }).collect();
            let scaled_inst = inst.scaled(c).unwrap();
            let scaled: Vec<Placement> = placements.iter().map(|p| Placement {
                origin: Point3::new(p.origin.x * c, p.origin.y * c, p.origin.z * c),
                ..*p
            }).collect();
            let e = tight_extents(&placements, &inst).unwrap();
            let es = tight_extents(&scaled, &scaled_inst).unwrap();
            prop_assert_eq!(es.as_array(), [e.l * c, e.w * c, e.h * c]);
            prop_assert_eq!(es.surface_area(), e.surface_area() * c * c);
        }
    }
}
