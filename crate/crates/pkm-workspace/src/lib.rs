//! Certified dextrous-workspace analysis for two 3-DOF translational
//! parallel kinematic machines.
//!
//! The crate models the Orthoglide (three orthogonal prismatic axes) and
//! the UraneSX (three parallel vertical axes), computes their velocity
//! transmission factors, and uses interval arithmetic to certify boxes of
//! the Cartesian workspace against transmission-factor bounds. On top of
//! the box classifier sit a branch-and-bound search for the largest
//! enclosed axis-aligned cube (square for the UraneSX, whose kinematics are
//! independent of z) and a paving of the whole dextrous workspace.
//!
//! Layering, bottom up:
//!
//! * [`interval`]: outward-safe interval arithmetic and boxes.
//! * [`linalg`]: small fixed-size matrix helpers and the closed-form
//!   symmetric 3x3 eigensolver.
//! * [`kinematics`]: machine geometry, inverse kinematics, Jacobians,
//!   transmission factors, and interval enclosures of the characteristic
//!   polynomial.
//! * [`certify`]: the box classifier (inside / outside / undetermined).
//! * [`search`]: doubling cube growth, branch-and-bound search, paving.
//! * [`report`]: JSON/CSV/SVG rendering of results.

pub mod certify;
pub mod interval;
pub mod kinematics;
pub mod linalg;
pub mod report;
pub mod search;

pub use certify::{
    classify, in_reachable_domain, is_dextrous_point, zero_excluded, BoxVerdict, DextrousSpec,
    DomainStatus, Verdict, ZeroExclusion, DEFAULT_EXCLUSION_BUDGET,
};
pub use interval::{Interval, IntervalBox, IntervalError};
pub use kinematics::{
    JacobianPair, JointCoordinates, KinematicsError, MachineKind, MachineModel, Pose,
    TransmissionFactors,
};
pub use search::{
    find_largest_cube, grow_cube_at, pave_dextrous_workspace, CubeResult, CubeSearchConfig,
    PaveConfig, Paving, SearchStats,
};
