//! Solver toolkit for surface-area-minimizing 3D bin packing.
//!
//! Items are cuboids packed orthogonally into a bin whose size is not fixed;
//! the objective is the surface area of the smallest enclosing box. The crate
//! provides:
//!
//! * [`geometry`]: integer cuboid arithmetic, orientations and a solution validator,
//! * [`ems`]: empty-maximal-space bookkeeping,
//! * [`packer`]: the constructive heuristic, sequence packing and an exhaustive oracle,
//! * [`policy`]: a pointer-style sequence policy trained with REINFORCE,
//! * [`milp`]: export of the mixed-integer model in LP text format,
//! * [`harness`]: instance generation and benchmark orchestration.

pub mod ems;
pub mod geometry;
pub mod harness;
pub mod milp;
pub mod packer;
pub mod policy;

pub use ems::{initial_ems, place_and_split, prune_inclusions, EmptyMaximalSpace, EmsError, EmsSet};
pub use geometry::{
    orient, surface_area, tight_extents, validate_solution, BinExtents, Cuboid, GeometryError,
    Instance, ItemDims, Length, OrientedDims, Orientation, PackingSolution, Placement, Point3,
    RelativePosition, ValidationReport, Violation,
};
pub use packer::{
    exhaustive_optimal_sequence, least_surface_area_choice, least_waste_space_choice,
    pack_heuristic, pack_sequence, PackError, PackingState, PlacementChoice, WasteChoice,
    DEFAULT_ORACLE_LIMIT,
};
pub use harness::{
    generate_instances, run_benchmark, BenchmarkConfig, BenchmarkReport, BenchmarkRow,
    HarnessError, Method, MethodSummary,
};
pub use milp::{
    check_model_counts, check_substitution, export_milp, feasible_point, CountReport, Encoding,
    ExportOptions, MilpError, MilpModel, ObjectiveMode,
};
pub use policy::{
    beam_search, greedy_decode, policy_forward, reinforce_gradient, sample_sequence, train,
    update_baseline, BaselineStore, Checkpoint, EpisodeRecord, PolicyError, PolicyParams,
    TrainerConfig, TrainingLog,
};
