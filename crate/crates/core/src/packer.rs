//! Constructive packing on empty maximal spaces.
//!
//! Placement of a single item follows the least-surface-area rule: try every
//! empty maximal space and orientation, put the item at the space's min
//! corner, and keep the choice whose tight bounding box has the smallest
//! surface area. The full heuristic additionally picks the next item by least
//! wasted volume. [`pack_sequence`] uses only the placement rule and is the
//! reward function for sequence search.

use itertools::Itertools;
use rayon::prelude::*;
use thiserror::Error;

use crate::ems::{initial_ems, EmptyMaximalSpace, EmsError, EmsSet};
use crate::geometry::{
    BinExtents, Cuboid, GeometryError, Instance, Length, OrientedDims, Orientation,
    PackingSolution, Placement, Point3,
};

/// Largest instance the exhaustive oracle accepts by default.
pub const DEFAULT_ORACLE_LIMIT: usize = 8;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PackError {
    #[error("no empty maximal space fits item {0}")]
    NoFit(usize),
    #[error("sequence is not a permutation of 0..{0}")]
    BadSequence(usize),
    #[error("item {0} is not among the remaining items")]
    NotRemaining(usize),
    #[error("no items remain to be packed")]
    NothingRemaining,
    #[error("TooLarge: instance has {n} items, exhaustive search is limited to {limit}")]
    TooLarge { n: usize, limit: usize },
    #[error(transparent)]
    Ems(#[from] EmsError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

/// Where and how to put one item.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PlacementChoice {
    pub item: usize,
    pub ems: EmptyMaximalSpace,
    pub orientation: Orientation,
    pub dims: OrientedDims,
    /// Tight extents of the packing after this placement.
    pub extents: BinExtents,
    /// `min(span − side)` of the chosen space, used to break area ties.
    pub slack: Length,
}

impl PlacementChoice {
    pub fn origin(&self) -> Point3 {
        self.ems.min_corner()
    }

    pub fn surface_area(&self) -> Length {
        self.extents.surface_area()
    }

    pub fn half_surface_area(&self) -> Length {
        self.extents.half_surface_area()
    }

    pub fn placement(&self) -> Placement {
        Placement {
            item_index: self.item,
            origin: self.origin(),
            orientation: self.orientation,
        }
    }
}

/// Result of the least-waste item selection, with both waste measures.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct WasteChoice {
    pub item: usize,
    pub placement: PlacementChoice,
    /// Bounding-box volume minus all packed volume, the ranking key.
    pub waste: Length,
    /// Bounding-box volume minus the candidate's own volume only.
    pub candidate_only_waste: Length,
}

/// A partial packing inside the working bin.
#[derive(Clone, Debug)]
pub struct PackingState<'a> {
    instance: &'a Instance,
    placements: Vec<Placement>,
    ems: EmsSet,
    working_bin: BinExtents,
    remaining: Vec<bool>,
    packed_volume: Length,
    far_corner: [Length; 3],
}

impl<'a> PackingState<'a> {
    pub fn new(instance: &'a Instance) -> Result<Self, PackError> {
        let working_bin = instance.working_bin();
        Ok(Self {
            instance,
            placements: Vec::with_capacity(instance.len()),
            ems: initial_ems(working_bin)?,
            working_bin,
            remaining: vec![true; instance.len()],
            packed_volume: 0,
            far_corner: [0; 3],
        })
    }

    pub fn instance(&self) -> &Instance {
        self.instance
    }

    pub fn placements(&self) -> &[Placement] {
        &self.placements
    }

    pub fn ems(&self) -> &EmsSet {
        &self.ems
    }

    pub fn working_bin(&self) -> BinExtents {
        self.working_bin
    }

    pub fn packed_volume(&self) -> Length {
        self.packed_volume
    }

    pub fn is_remaining(&self, item: usize) -> bool {
        self.remaining.get(item).copied().unwrap_or(false)
    }

    pub fn remaining(&self) -> impl Iterator<Item = usize> + '_ {
        self.remaining
            .iter()
            .enumerate()
            .filter_map(|(i, &r)| r.then_some(i))
    }

    pub fn is_complete(&self) -> bool {
        self.placements.len() == self.instance.len()
    }

    fn extents_with(&self, placed: &Cuboid) -> BinExtents {
        let corner = placed.max.as_array();
        BinExtents {
            l: self.far_corner[0].max(corner[0]),
            w: self.far_corner[1].max(corner[1]),
            h: self.far_corner[2].max(corner[2]),
        }
    }

    /// Commits a choice produced by [`least_surface_area_choice`] on this state.
    pub fn apply(&mut self, choice: &PlacementChoice) -> Result<(), PackError> {
        if !self.is_remaining(choice.item) {
            return Err(PackError::NotRemaining(choice.item));
        }
        self.ems = self.ems.place_and_split(choice.origin(), choice.dims)?;
        let cuboid = Cuboid::from_origin_dims(choice.origin(), choice.dims);
        self.far_corner = self.extents_with(&cuboid).as_array();
        self.placements.push(choice.placement());
        self.remaining[choice.item] = false;
        self.packed_volume += choice.dims.volume();
        Ok(())
    }

    pub fn into_solution(self) -> Result<PackingSolution, PackError> {
        Ok(PackingSolution::from_placements(self.instance, self.placements)?)
    }
}

/// Picks the space and orientation that minimize the tight surface area.
///
/// Area ties go to the smaller slack; remaining ties keep the first candidate
/// in canonical space order, then orientation order.
pub fn least_surface_area_choice(
    state: &PackingState<'_>,
    item: usize,
) -> Result<PlacementChoice, PackError> {
    if !state.is_remaining(item) {
        return Err(PackError::NotRemaining(item));
    }
    let dims = state.instance.item(item);
    let mut best: Option<(Length, PlacementChoice)> = None;
    for space in state.ems.iter() {
        for orientation in Orientation::ALL {
            let oriented = dims.orient(orientation);
            if !space.fits(oriented) {
                continue;
            }
            let extents =
                state.extents_with(&Cuboid::from_origin_dims(space.min_corner(), oriented));
            let area = extents.half_surface_area();
            let slack = space.slack(oriented);
            let better = match &best {
                None => true,
                Some((best_area, best_choice)) => {
                    area < *best_area || (area == *best_area && slack < best_choice.slack)
                }
            };
            if better {
                best = Some((
                    area,
                    PlacementChoice {
                        item,
                        ems: *space,
                        orientation,
                        dims: oriented,
                        extents,
                        slack,
                    },
                ));
            }
        }
    }
    best.map(|(_, c)| c).ok_or(PackError::NoFit(item))
}

/// Picks the remaining item whose best placement wastes the least volume.
pub fn least_waste_space_choice(state: &PackingState<'_>) -> Result<WasteChoice, PackError> {
    let mut best: Option<WasteChoice> = None;
    for item in state.remaining() {
        let placement = least_surface_area_choice(state, item)?;
        let bounding = placement.extents.volume();
        let own = placement.dims.volume();
        let waste = bounding - (state.packed_volume + own);
        if best.is_none_or(|b| waste < b.waste) {
            best = Some(WasteChoice {
                item,
                placement,
                waste,
                candidate_only_waste: bounding - own,
            });
        }
    }
    best.ok_or(PackError::NothingRemaining)
}

/// Index of the item with the largest surface area, smallest index on ties.
fn largest_surface_item(instance: &Instance) -> usize {
    let mut best = 0;
    for (i, d) in instance.items().iter().enumerate() {
        if d.half_surface_area() > instance.item(best).half_surface_area() {
            best = i;
        }
    }
    best
}

/// The full constructive heuristic: largest item first, then least-waste
/// item selection with least-surface-area placement.
pub fn pack_heuristic(instance: &Instance) -> Result<PackingSolution, PackError> {
    let mut state = PackingState::new(instance)?;
    let first = least_surface_area_choice(&state, largest_surface_item(instance))?;
    state.apply(&first)?;
    while !state.is_complete() {
        let next = least_waste_space_choice(&state)?;
        state.apply(&next.placement)?;
    }
    state.into_solution()
}

fn check_permutation(n: usize, sequence: &[usize]) -> Result<(), PackError> {
    if sequence.len() != n {
        return Err(PackError::BadSequence(n));
    }
    let mut seen = vec![false; n];
    for &i in sequence {
        if i >= n || std::mem::replace(&mut seen[i], true) {
            return Err(PackError::BadSequence(n));
        }
    }
    Ok(())
}

/// Packs items in the given order, each by the least-surface-area rule.
pub fn pack_sequence(instance: &Instance, sequence: &[usize]) -> Result<PackingSolution, PackError> {
    check_permutation(instance.len(), sequence)?;
    let mut state = PackingState::new(instance)?;
    for &item in sequence {
        let choice = least_surface_area_choice(&state, item)?;
        state.apply(&choice)?;
    }
    state.into_solution()
}

/// Half area of [`pack_sequence`], the reward used for sequence search.
pub fn sequence_half_area(instance: &Instance, sequence: &[usize]) -> Result<Length, PackError> {
    Ok(pack_sequence(instance, sequence)?.half_surface_area())
}

/// Evaluates every packing order and returns the lexicographically first one
/// with the smallest surface area.
///
/// Optimality is over sequences under the least-surface-area placement rule,
/// not over arbitrary geometric packings.
pub fn exhaustive_optimal_sequence(
    instance: &Instance,
    limit: usize,
) -> Result<(Vec<usize>, PackingSolution), PackError> {
    let n = instance.len();
    if n > limit {
        return Err(PackError::TooLarge { n, limit });
    }
    let per_first: Vec<(Length, Vec<usize>)> = (0..n)
        .into_par_iter()
        .map(|first| -> Result<(Length, Vec<usize>), PackError> {
            let rest: Vec<usize> = (0..n).filter(|&i| i != first).collect();
            let mut best: Option<(Length, Vec<usize>)> = None;
            for tail in rest.iter().copied().permutations(rest.len()) {
                let mut seq = Vec::with_capacity(n);
                seq.push(first);
                seq.extend(tail);
                let area = sequence_half_area(instance, &seq)?;
                if best.as_ref().is_none_or(|(a, _)| area < *a) {
                    best = Some((area, seq));
                }
            }
            Ok(best.expect("at least one permutation"))
        })
        .collect::<Result<_, _>>()?;
    let (_, sequence) = per_first
        .into_iter()
        .min()
        .expect("instance is non-empty");
    let solution = pack_sequence(instance, &sequence)?;
    Ok((sequence, solution))
}
