//! Voxel-grid oracles shared by the integration tests.
#![allow(dead_code)]

pub mod policy_oracle;

use std::collections::BTreeSet;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use surfpack::{generate_instances, initial_ems, BinExtents, Cuboid, EmptyMaximalSpace, Instance, OrientedDims, PackingSolution, Point3};

/// Occupancy grid over `[0, dims)` with unit cells.
pub struct Voxels {
    pub dims: [i64; 3],
    cells: Vec<u32>,
}

impl Voxels {
    pub fn new(dims: [i64; 3]) -> Self {
        let n = (dims[0] * dims[1] * dims[2]) as usize;
        Self { dims, cells: vec![0; n] }
    }

    fn idx(&self, x: i64, y: i64, z: i64) -> usize {
        ((z * self.dims[1] + y) * self.dims[0] + x) as usize
    }

    /// Marks every cell of the box; returns false if any cell lies outside the grid.
    pub fn fill(&mut self, c: &Cuboid) -> bool {
        let mut inside = true;
        for z in c.min.z..c.max.z {
            for y in c.min.y..c.max.y {
                for x in c.min.x..c.max.x {
                    if x < 0 || y < 0 || z < 0 || x >= self.dims[0] || y >= self.dims[1] || z >= self.dims[2] {
                        inside = false;
                        continue;
                    }
                    let i = self.idx(x, y, z);
                    self.cells[i] += 1;
                }
            }
        }
        inside
    }

    pub fn max_occupancy(&self) -> u32 {
        self.cells.iter().copied().max().unwrap_or(0)
    }

    pub fn occupied(&self, x: i64, y: i64, z: i64) -> bool {
        self.cells[self.idx(x, y, z)] > 0
    }

    pub fn box_is_empty(&self, lo: [i64; 3], hi: [i64; 3]) -> bool {
        for z in lo[2]..hi[2] {
            for y in lo[1]..hi[1] {
                for x in lo[0]..hi[0] {
                    if self.occupied(x, y, z) {
                        return false;
                    }
                }
            }
        }
        true
    }

    /// Every inclusion-maximal empty box, as `(min, max)` corner arrays.
    pub fn maximal_empty_boxes(&self) -> BTreeSet<([i64; 3], [i64; 3])> {
        let d = self.dims;
        let mut out = BTreeSet::new();
        for x0 in 0..d[0] {
            for x1 in x0 + 1..=d[0] {
                for y0 in 0..d[1] {
                    for y1 in y0 + 1..=d[1] {
                        for z0 in 0..d[2] {
                            for z1 in z0 + 1..=d[2] {
                                let lo = [x0, y0, z0];
                                let hi = [x1, y1, z1];
                                if !self.box_is_empty(lo, hi) {
                                    continue;
                                }
                                if self.is_maximal(lo, hi) {
                                    out.insert((lo, hi));
                                }
                            }
                        }
                    }
                }
            }
        }
        out
    }

    fn is_maximal(&self, lo: [i64; 3], hi: [i64; 3]) -> bool {
        for axis in 0..3 {
            if lo[axis] > 0 {
                let mut l = lo;
                l[axis] -= 1;
                if self.box_is_empty(l, hi) {
                    return false;
                }
            }
            if hi[axis] < self.dims[axis] {
                let mut h = hi;
                h[axis] += 1;
                if self.box_is_empty(lo, h) {
                    return false;
                }
            }
        }
        true
    }
}

/// Voxel verdict for a solution: every cell covered at most once and every item inside the extents.
pub fn voxel_feasible(instance: &Instance, solution: &PackingSolution) -> bool {
    let e = solution.extents;
    let far = solution
        .placements
        .iter()
        .filter(|p| p.item_index < instance.len())
        .map(|p| p.cuboid(instance.item(p.item_index)).max)
        .fold(Point3::new(e.l, e.w, e.h), |a, b| {
            Point3::new(a.x.max(b.x), a.y.max(b.y), a.z.max(b.z))
        });
    let mut grid = Voxels::new([far.x, far.y, far.z]);
    let mut ok = true;
    let mut seen = vec![0; instance.len()];
    for p in &solution.placements {
        if p.item_index >= instance.len() {
            return false;
        }
        seen[p.item_index] += 1;
        let c = p.cuboid(instance.item(p.item_index));
        if c.min.x < 0 || c.min.y < 0 || c.min.z < 0 {
            ok = false;
            continue;
        }
        grid.fill(&c);
        if c.max.x > e.l || c.max.y > e.w || c.max.z > e.h {
            ok = false;
        }
    }
    ok && grid.max_occupancy() <= 1 && seen.iter().all(|&s| s == 1)
}

pub fn corners(set: &[EmptyMaximalSpace]) -> BTreeSet<([i64; 3], [i64; 3])> {
    set.iter()
        .map(|s| (s.min_corner().as_array(), s.max_corner().as_array()))
        .collect()
}

/// Places random boxes at random positions inside random spaces and compares
/// every intermediate set with brute-force enumeration on the voxel grid.
pub fn ems_random_trial(rng: &mut ChaCha8Rng) -> Result<(), String> {
    let bin = BinExtents::new(rng.gen_range(1..=6), rng.gen_range(1..=6), rng.gen_range(1..=6)).unwrap();
    let mut set = initial_ems(bin).unwrap();
    let mut grid = Voxels::new(bin.as_array());
    let mut placed: Vec<Cuboid> = Vec::new();
    let steps = rng.gen_range(1..=6);
    for _ in 0..steps {
        if set.is_empty() {
            break;
        }
        let space = set.spaces()[rng.gen_range(0..set.len())];
        let spans = space.spans();
        let dims = OrientedDims {
            l: rng.gen_range(1..=spans[0]),
            w: rng.gen_range(1..=spans[1]),
            h: rng.gen_range(1..=spans[2]),
        };
        let lo = space.min_corner();
        let origin = Point3::new(
            rng.gen_range(lo.x..=lo.x + spans[0] - dims.l),
            rng.gen_range(lo.y..=lo.y + spans[1] - dims.w),
            rng.gen_range(lo.z..=lo.z + spans[2] - dims.h),
        );
        set = set.place_and_split(origin, dims).map_err(|e| e.to_string())?;
        let c = Cuboid::from_origin_dims(origin, dims);
        grid.fill(&c);
        placed.push(c);

        for s in set.iter() {
            if placed.iter().any(|p| p.intersects(s.cuboid())) {
                return Err(format!("space {s:?} intersects a placed box"));
            }
        }
        let expected = grid.maximal_empty_boxes();
        let got = corners(set.spaces());
        if got != expected {
            return Err(format!("bin {bin:?} placed {placed:?}\n got {got:?}\n want {expected:?}"));
        }
        let mut sorted = set.spaces().to_vec();
        sorted.sort();
        if sorted != set.spaces() {
            return Err("set not in canonical order".into());
        }
    }
    Ok(())
}

/// Instances behind the MILP golden files, one per size 1, 2, 3 and 8.
pub fn golden_instances() -> Vec<Instance> {
    vec![
        Instance::from_triples("golden-n1", &[(2, 3, 4)]).unwrap(),
        Instance::from_triples("golden-n2", &[(1, 1, 1), (1, 1, 1)]).unwrap(),
        Instance::from_triples("golden-n3", &[(3, 1, 2), (2, 2, 2), (1, 4, 1)]).unwrap(),
        generate_instances(1, 8, 1..=10, 42).unwrap().remove(0),
    ]
}
