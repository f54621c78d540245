mod common;

use common::voxel_feasible;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use surfpack::{
    exhaustive_optimal_sequence, generate_instances, pack_heuristic, pack_sequence, validate_solution, Instance,
    Orientation, PackError, PackingSolution, Point3,
};

fn nudge(solution: &PackingSolution, rng: &mut ChaCha8Rng) -> PackingSolution {
    let mut s = solution.clone();
    let k = rng.gen_range(0..s.placements.len());
    let p = &mut s.placements[k];
    match rng.gen_range(0..3) {
        0 => {
            let a = p.origin.as_array();
            let axis = rng.gen_range(0..3);
            let mut b = a;
            b[axis] += rng.gen_range(-2..=2);
            p.origin = Point3::from_array(b);
        }
        1 => p.orientation = Orientation::ALL[rng.gen_range(0..6)],
        _ => {
            let other = s.placements[rng.gen_range(0..s.placements.len())].origin;
            s.placements[k].origin = other;
        }
    }
    s
}

#[test]
fn heuristic_and_sequence_outputs_validate() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for n in [1, 3, 5, 8, 12] {
        for inst in generate_instances(40, n, 1..=10, 7).unwrap() {
            let h = pack_heuristic(&inst).unwrap();
            assert!(validate_solution(&inst, &h).unwrap().is_pass(), "{}", inst.id);
            assert!(voxel_feasible(&inst, &h));
            let mut seq: Vec<usize> = (0..n).collect();
            rand::seq::SliceRandom::shuffle(seq.as_mut_slice(), &mut rng);
            let s = pack_sequence(&inst, &seq).unwrap();
            assert_eq!(s.sequence, seq);
            assert!(validate_solution(&inst, &s).unwrap().is_pass());
            assert!(voxel_feasible(&inst, &s));
        }
    }
}

#[test]
fn validator_agrees_with_voxels_on_perturbed_solutions() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut rejected = 0;
    for inst in generate_instances(300, 4, 1..=4, 3).unwrap() {
        let base = pack_heuristic(&inst).unwrap();
        for _ in 0..5 {
            let s = nudge(&base, &mut rng);
            let verdict = validate_solution(&inst, &s).unwrap().is_pass();
            assert_eq!(verdict, voxel_feasible(&inst, &s), "{s:?}");
            rejected += usize::from(!verdict);
        }
    }
    assert!(rejected > 100);
}

#[test]
fn heuristic_sequence_replays_exactly() {
    for inst in generate_instances(100, 8, 1..=10, 42).unwrap() {
        let h = pack_heuristic(&inst).unwrap();
        assert_eq!(pack_sequence(&inst, &h.sequence).unwrap(), h);
    }
}

#[test]
fn oracle_dominates_heuristic_and_sequences() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for inst in generate_instances(30, 5, 1..=10, 5).unwrap() {
        let (seq, best) = exhaustive_optimal_sequence(&inst, 8).unwrap();
        assert_eq!(best.sequence, seq);
        assert!(best.half_surface_area() <= pack_heuristic(&inst).unwrap().half_surface_area());
        let mut s: Vec<usize> = (0..5).collect();
        rand::seq::SliceRandom::shuffle(s.as_mut_slice(), &mut rng);
        assert!(best.half_surface_area() <= pack_sequence(&inst, &s).unwrap().half_surface_area());
    }
}

#[test]
fn oracle_refuses_large_instances() {
    let inst = generate_instances(1, 9, 1..=10, 0).unwrap().remove(0);
    assert_eq!(
        exhaustive_optimal_sequence(&inst, 8).unwrap_err(),
        PackError::TooLarge { n: 9, limit: 8 }
    );
}

#[test]
fn scaling_preserves_decisions() {
    for inst in generate_instances(100, 8, 1..=10, 9).unwrap() {
        let a = pack_heuristic(&inst).unwrap();
        let b = pack_heuristic(&inst.scaled(3).unwrap()).unwrap();
        assert_eq!(a.sequence, b.sequence);
        for (p, q) in a.placements.iter().zip(&b.placements) {
            assert_eq!(p.orientation, q.orientation);
            assert_eq!(p.origin.as_array().map(|v| 3 * v), q.origin.as_array());
        }
        assert_eq!(b.half_surface_area(), 9 * a.half_surface_area());
    }
}

fn arb_instance() -> impl Strategy<Value = Instance> {
    proptest::collection::vec((1i64..=8, 1i64..=8, 1i64..=8), 1..=7)
        .prop_map(|t| Instance::from_triples("prop", &t).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn heuristic_is_feasible_and_bounded(inst in arb_instance()) {
        let s = pack_heuristic(&inst).unwrap();
        prop_assert!(validate_solution(&inst, &s).unwrap().is_pass());
        let e = s.extents;
        let bin = inst.working_bin();
        prop_assert!(e.l <= bin.l && e.w <= bin.w && e.h <= bin.h);
        prop_assert!(e.volume() >= inst.total_volume());
        prop_assert_eq!(s.surface_area, 2 * (e.l * e.w + e.l * e.h + e.w * e.h));
    }

    #[test]
    fn any_order_is_feasible(inst in arb_instance(), seed in any::<u64>()) {
        let mut seq: Vec<usize> = (0..inst.len()).collect();
        rand::seq::SliceRandom::shuffle(seq.as_mut_slice(), &mut ChaCha8Rng::seed_from_u64(seed));
        let s = pack_sequence(&inst, &seq).unwrap();
        prop_assert!(validate_solution(&inst, &s).unwrap().is_pass());
        prop_assert!(voxel_feasible(&inst, &s));
    }
}
