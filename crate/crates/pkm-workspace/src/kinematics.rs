//! Machine geometry, inverse kinematics, Jacobians and velocity
//! transmission factors for the two translational parallel machines.
//!
//! Both machines consist of three prismatic-actuated legs of fixed length
//! `L` joining base points `a_i` (on the joint axes) to platform points
//! `b_i`. Differentiating the leg-length constraint gives `A p_dot = B
//! rho_dot` with `A` rows `(b_i - a_i)^T` and `B = diag(eta_i)`,
//! `eta_i = (b_i - a_i)^T e_i`. The velocity transmission factors are the
//! square roots of the eigenvalues of `J J^T`, `J = A^{-1} B`.

use thiserror::Error;

use crate::interval::{Interval, IntervalBox};
use crate::linalg::{self, Mat3, Vec3};

/// `|det(A)| < SINGULARITY_TOL * L^3` is treated as a parallel singularity.
pub const SINGULARITY_TOL: f64 = 1e-12;

#[derive(Debug, Error, PartialEq)]
pub enum KinematicsError {
    /// Some leg-length radicand is negative: the pose (or the whole box)
    /// cannot be reached.
    #[error("pose outside the reachable domain")]
    OutsideReachableDomain,
    /// The parallel Jacobian A is numerically singular at this pose.
    #[error("parallel singularity: |det A| = {det_a:e}")]
    SingularConfiguration { det_a: f64 },
    #[error("invalid machine geometry: {0}")]
    InvalidGeometry(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MachineKind {
    Orthoglide,
    UraneSx,
}

impl MachineKind {
    pub fn name(&self) -> &'static str {
        match self {
            MachineKind::Orthoglide => "orthoglide",
            MachineKind::UraneSx => "uranesx",
        }
    }
}

/// A Cartesian tool-center-point position.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Pose {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Pose {
    pub fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    pub fn coords(&self) -> Vec3 {
        [self.x, self.y, self.z]
    }
}

impl From<[f64; 3]> for Pose {
    fn from(c: [f64; 3]) -> Self {
        Pose::new(c[0], c[1], c[2])
    }
}

/// Prismatic joint positions, one per leg.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JointCoordinates {
    pub rho: Vec3,
}

/// The parallel Jacobian `A` (rows `(b_i - a_i)^T`) and the diagonal of the
/// serial Jacobian `B`.
#[derive(Debug, Clone, Copy)]
pub struct JacobianPair {
    pub a: Mat3,
    pub b_diag: Vec3,
}

/// Velocity transmission factors `psi` (ascending) and the matching
/// eigenvalues `sigma = psi^2` of `J J^T`.
#[derive(Debug, Clone, Copy)]
pub struct TransmissionFactors {
    pub psi: Vec3,
    pub sigma: Vec3,
}

impl TransmissionFactors {
    pub fn min_sigma(&self) -> f64 {
        self.sigma[0]
    }

    pub fn max_sigma(&self) -> f64 {
        self.sigma[2]
    }
}

/// Geometry and branch conventions for one machine.
///
/// The Orthoglide has its three prismatic axes along x, y and z. The UraneSX
/// has all three axes parallel to z, with base anchors on a circle of radius
/// `R + lambda` at angles 0, 120 and 240 degrees and platform anchors on a
/// concentric circle of radius `r`; only the difference `R + lambda - r`
/// enters the kinematics.
#[derive(Debug, Clone)]
pub struct MachineModel {
    kind: MachineKind,
    leg_length: f64,
    base_radius: f64,
    platform_radius: f64,
    lambda: f64,
    branch_signs: [f64; 3],
    /// UraneSX cylinder centers `(R + lambda - r) * (cos phi_i, sin phi_i)`.
    anchor_offsets: [[f64; 2]; 3],
    l_squared: Interval,
}

impl MachineModel {
    pub fn orthoglide(leg_length: f64) -> Result<Self, KinematicsError> {
        if !(leg_length > 0.0) || !leg_length.is_finite() {
            return Err(KinematicsError::InvalidGeometry(format!(
                "leg length must be positive, got {leg_length}"
            )));
        }
        Ok(Self {
            kind: MachineKind::Orthoglide,
            leg_length,
            base_radius: 0.0,
            platform_radius: 0.0,
            lambda: 0.0,
            branch_signs: [-1.0; 3],
            anchor_offsets: [[0.0; 2]; 3],
            l_squared: squared_interval(leg_length),
        })
    }

    pub fn uranesx(
        leg_length: f64,
        base_radius: f64,
        platform_radius: f64,
        lambda: f64,
    ) -> Result<Self, KinematicsError> {
        if !(leg_length > 0.0) || !leg_length.is_finite() {
            return Err(KinematicsError::InvalidGeometry(format!(
                "leg length must be positive, got {leg_length}"
            )));
        }
        let effective = base_radius + lambda;
        if !(effective > platform_radius && platform_radius > 0.0) {
            return Err(KinematicsError::InvalidGeometry(format!(
                "need R + lambda > r > 0, got R + lambda = {effective}, r = {platform_radius}"
            )));
        }
        let dr = effective - platform_radius;
        if dr >= leg_length {
            return Err(KinematicsError::InvalidGeometry(format!(
                "need R + lambda - r < L to avoid parallel singularities, got {dr} >= {leg_length}"
            )));
        }
        let s3h = 3.0_f64.sqrt() / 2.0;
        Ok(Self {
            kind: MachineKind::UraneSx,
            leg_length,
            base_radius,
            platform_radius,
            lambda,
            branch_signs: [-1.0; 3],
            anchor_offsets: [
                [dr, 0.0],
                [-0.5 * dr, s3h * dr],
                [-0.5 * dr, -s3h * dr],
            ],
            l_squared: squared_interval(leg_length),
        })
    }

    /// Override the IK branch per leg. The default is -1 for every leg,
    /// which reproduces the published workspace locations; +1 selects the
    /// mirrored assembly mode.
    pub fn with_branch_signs(mut self, signs: [i8; 3]) -> Result<Self, KinematicsError> {
        for s in signs {
            if s != 1 && s != -1 {
                return Err(KinematicsError::InvalidGeometry(format!(
                    "branch signs must be +1 or -1, got {s}"
                )));
            }
        }
        self.branch_signs = signs.map(f64::from);
        Ok(self)
    }

    pub fn kind(&self) -> MachineKind {
        self.kind
    }

    pub fn leg_length(&self) -> f64 {
        self.leg_length
    }

    pub fn base_radius(&self) -> Option<f64> {
        matches!(self.kind, MachineKind::UraneSx).then_some(self.base_radius)
    }

    pub fn platform_radius(&self) -> Option<f64> {
        matches!(self.kind, MachineKind::UraneSx).then_some(self.platform_radius)
    }

    pub fn lambda(&self) -> Option<f64> {
        matches!(self.kind, MachineKind::UraneSx).then_some(self.lambda)
    }

    pub fn branch_signs(&self) -> [f64; 3] {
        self.branch_signs
    }

    /// Dimension of the workspace search: 3 for the Orthoglide, 2 for the
    /// UraneSX (its transmission factors do not depend on z).
    pub fn search_dim(&self) -> usize {
        match self.kind {
            MachineKind::Orthoglide => 3,
            MachineKind::UraneSx => 2,
        }
    }

    /// `[-L, L]` on each searched axis; encloses the reachable workspace.
    pub fn default_domain(&self) -> IntervalBox {
        let l = self.leg_length;
        IntervalBox::from_fn(self.search_dim(), |_| Interval::new(-l, l))
    }

    /// Leg-length radicands at a pose; the pose is reachable iff all are
    /// nonnegative.
    pub fn radicands(&self, p: Pose) -> Vec3 {
        let l2 = self.leg_length * self.leg_length;
        match self.kind {
            MachineKind::Orthoglide => [
                l2 - p.y * p.y - p.z * p.z,
                l2 - p.x * p.x - p.z * p.z,
                l2 - p.x * p.x - p.y * p.y,
            ],
            MachineKind::UraneSx => {
                let mut out = [0.0; 3];
                for (i, c) in self.anchor_offsets.iter().enumerate() {
                    let dx = p.x - c[0];
                    let dy = p.y - c[1];
                    out[i] = l2 - dx * dx - dy * dy;
                }
                out
            }
        }
    }

    pub fn is_reachable(&self, p: Pose) -> bool {
        self.radicands(p).iter().all(|&r| r >= 0.0)
    }

    /// Prismatic joint positions solving the leg-length constraints.
    pub fn inverse_kinematics(&self, p: Pose) -> Result<JointCoordinates, KinematicsError> {
        let rad = self.radicands(p);
        if rad.iter().any(|&r| r < 0.0) {
            return Err(KinematicsError::OutsideReachableDomain);
        }
        let roots = [rad[0].sqrt(), rad[1].sqrt(), rad[2].sqrt()];
        let rho = match self.kind {
            MachineKind::Orthoglide => [
                p.x + self.branch_signs[0] * roots[0],
                p.y + self.branch_signs[1] * roots[1],
                p.z + self.branch_signs[2] * roots[2],
            ],
            MachineKind::UraneSx => [
                p.z + self.branch_signs[0] * roots[0],
                p.z + self.branch_signs[1] * roots[1],
                p.z + self.branch_signs[2] * roots[2],
            ],
        };
        Ok(JointCoordinates { rho })
    }

    /// Base and platform attachment points of each leg at a pose.
    pub fn leg_endpoints(&self, p: Pose) -> Result<[(Vec3, Vec3); 3], KinematicsError> {
        let joints = self.inverse_kinematics(p)?;
        let mut out = [([0.0; 3], [0.0; 3]); 3];
        match self.kind {
            MachineKind::Orthoglide => {
                for i in 0..3 {
                    let mut a = [0.0; 3];
                    a[i] = joints.rho[i];
                    out[i] = (a, p.coords());
                }
            }
            MachineKind::UraneSx => {
                for i in 0..3 {
                    let c = self.anchor_offsets[i];
                    // Platform offsets cancel against base offsets; only the
                    // difference survives in b_i - a_i.
                    let a = [c[0], c[1], joints.rho[i]];
                    let b = [p.x, p.y, p.z];
                    out[i] = (a, b);
                }
            }
        }
        Ok(out)
    }

    /// The matrices of `A p_dot = B rho_dot` at a pose.
    pub fn jacobian_pair(&self, p: Pose) -> Result<JacobianPair, KinematicsError> {
        let rad = self.radicands(p);
        if rad.iter().any(|&r| r < 0.0) {
            return Err(KinematicsError::OutsideReachableDomain);
        }
        // eta_i = -s_i * sqrt(rad_i) for both machines.
        let eta = [
            -self.branch_signs[0] * rad[0].sqrt(),
            -self.branch_signs[1] * rad[1].sqrt(),
            -self.branch_signs[2] * rad[2].sqrt(),
        ];
        let a = match self.kind {
            MachineKind::Orthoglide => [
                [eta[0], p.y, p.z],
                [p.x, eta[1], p.z],
                [p.x, p.y, eta[2]],
            ],
            MachineKind::UraneSx => {
                let c = &self.anchor_offsets;
                [
                    [p.x - c[0][0], p.y - c[0][1], eta[0]],
                    [p.x - c[1][0], p.y - c[1][1], eta[1]],
                    [p.x - c[2][0], p.y - c[2][1], eta[2]],
                ]
            }
        };
        Ok(JacobianPair { a, b_diag: eta })
    }

    /// `det(A)` and `det(B)`; the parallel and serial singularity margins.
    pub fn singularity_margins(&self, p: Pose) -> Result<(f64, f64), KinematicsError> {
        let jac = self.jacobian_pair(p)?;
        let det_a = linalg::det3(&jac.a);
        let det_b = jac.b_diag[0] * jac.b_diag[1] * jac.b_diag[2];
        Ok((det_a, det_b))
    }

    /// Velocity transmission factors at a pose: the square roots of the
    /// eigenvalues of `J J^T`, `J = A^{-1} B`, sorted ascending.
    pub fn transmission_factors(&self, p: Pose) -> Result<TransmissionFactors, KinematicsError> {
        let jac = self.jacobian_pair(p)?;
        let det_a = linalg::det3(&jac.a);
        let l3 = self.leg_length.powi(3);
        if det_a.abs() < SINGULARITY_TOL * l3 {
            return Err(KinematicsError::SingularConfiguration { det_a });
        }
        let inv = linalg::inv3(&jac.a)
            .ok_or(KinematicsError::SingularConfiguration { det_a })?;
        // J = A^{-1} B scales the columns of A^{-1}.
        let mut j = inv;
        for row in &mut j {
            for (col, v) in row.iter_mut().enumerate() {
                *v *= jac.b_diag[col];
            }
        }
        let jjt = linalg::mat_mul(&j, &linalg::transpose(&j));
        let mut sigma = linalg::sym_eigenvalues3(&jjt);
        for s in &mut sigma {
            // J J^T is positive semidefinite; scrub eigensolver noise.
            *s = s.max(0.0);
        }
        let psi = sigma.map(f64::sqrt);
        Ok(TransmissionFactors { psi, sigma })
    }

    /// Interval leg-length radicands over a box, clipped at zero.
    /// `None` when some radicand is negative over the whole box.
    fn interval_radicands(&self, b: &IntervalBox) -> Option<[Interval; 3]> {
        self.check_dim(b);
        let l2 = self.l_squared;
        let x = b.axis(0);
        let y = b.axis(1);
        let raw = match self.kind {
            MachineKind::Orthoglide => {
                let z = b.axis(2);
                [
                    l2 - y.pow2() - z.pow2(),
                    l2 - x.pow2() - z.pow2(),
                    l2 - x.pow2() - y.pow2(),
                ]
            }
            MachineKind::UraneSx => {
                let mut out = [Interval::point(0.0); 3];
                for (i, c) in self.anchor_offsets.iter().enumerate() {
                    let dx = x - Interval::point(c[0]);
                    let dy = y - Interval::point(c[1]);
                    out[i] = l2 - dx.pow2() - dy.pow2();
                }
                out
            }
        };
        if raw.iter().any(|r| r.hi() < 0.0) {
            return None;
        }
        Some(raw.map(|r| r.max_lo(0.0)))
    }

    /// Per-leg reachability constraints over a box, un-clipped, for domain
    /// classification: leg `i` is reachable exactly where its radicand is
    /// nonnegative.
    pub(crate) fn interval_radicands_raw(&self, b: &IntervalBox) -> [Interval; 3] {
        self.check_dim(b);
        let l2 = self.l_squared;
        let x = b.axis(0);
        let y = b.axis(1);
        match self.kind {
            MachineKind::Orthoglide => {
                let z = b.axis(2);
                [
                    l2 - y.pow2() - z.pow2(),
                    l2 - x.pow2() - z.pow2(),
                    l2 - x.pow2() - y.pow2(),
                ]
            }
            MachineKind::UraneSx => {
                let mut out = [Interval::point(0.0); 3];
                for (i, c) in self.anchor_offsets.iter().enumerate() {
                    let dx = x - Interval::point(c[0]);
                    let dy = y - Interval::point(c[1]);
                    out[i] = l2 - dx.pow2() - dy.pow2();
                }
                out
            }
        }
    }

    /// Interval rows of `A` and the radicands (`= eta_i^2` exactly) over a
    /// box.
    fn interval_legs(&self, b: &IntervalBox) -> Option<([[Interval; 3]; 3], [Interval; 3])> {
        let rad = self.interval_radicands(b)?;
        let eta = [
            sqrt_signed(rad[0], -self.branch_signs[0]),
            sqrt_signed(rad[1], -self.branch_signs[1]),
            sqrt_signed(rad[2], -self.branch_signs[2]),
        ];
        let x = b.axis(0);
        let y = b.axis(1);
        let rows = match self.kind {
            MachineKind::Orthoglide => {
                let z = b.axis(2);
                [[eta[0], y, z], [x, eta[1], z], [x, y, eta[2]]]
            }
            MachineKind::UraneSx => {
                let c = &self.anchor_offsets;
                [
                    [x - Interval::point(c[0][0]), y - Interval::point(c[0][1]), eta[0]],
                    [x - Interval::point(c[1][0]), y - Interval::point(c[1][1]), eta[1]],
                    [x - Interval::point(c[2][0]), y - Interval::point(c[2][1]), eta[2]],
                ]
            }
        };
        Some((rows, rad))
    }

    /// Guaranteed enclosure of `g_sigma(p) = det(B B^T - sigma A A^T)` for
    /// every pose `p` in the box. Zeros of `g_sigma` coincide with poses
    /// where `sigma` is an eigenvalue of `J J^T`, since
    /// `det(J J^T - sigma I) * det(A)^2 = g_sigma` wherever `A` is
    /// invertible.
    pub fn interval_char_poly_value(
        &self,
        b: &IntervalBox,
        sigma: f64,
    ) -> Result<Interval, KinematicsError> {
        let (rows, rad) = self
            .interval_legs(b)
            .ok_or(KinematicsError::OutsideReachableDomain)?;
        let s = Interval::point(sigma);
        // B B^T = diag(rad_i); the diagonal of A A^T is exactly L^2 by the
        // leg-length constraint, so the diagonal of the pencil is
        // rad_i - sigma L^2. Off-diagonal entries are -sigma (u_i . u_j).
        let mut m = [[Interval::point(0.0); 3]; 3];
        for i in 0..3 {
            m[i][i] = rad[i] - s * self.l_squared;
            for j in (i + 1)..3 {
                let dot = rows[i][0] * rows[j][0]
                    + rows[i][1] * rows[j][1]
                    + rows[i][2] * rows[j][2];
                let v = -(s * dot);
                m[i][j] = v;
                m[j][i] = v;
            }
        }
        Ok(det3_interval(&m))
    }

    /// Guaranteed enclosure of `det(A)` over a box.
    pub fn interval_det_a(&self, b: &IntervalBox) -> Result<Interval, KinematicsError> {
        let (rows, _) = self
            .interval_legs(b)
            .ok_or(KinematicsError::OutsideReachableDomain)?;
        Ok(det3_interval(&rows))
    }

    fn check_dim(&self, b: &IntervalBox) {
        assert_eq!(
            b.dim(),
            self.search_dim(),
            "box dimension does not match machine search dimension"
        );
    }
}

/// `[lo, hi]` containing the exact real square of `l`.
fn squared_interval(l: f64) -> Interval {
    let sq = l * l;
    Interval::new(sq.next_down(), sq.next_up())
}

/// `sign * sqrt(rad)` with `sign` exactly +1 or -1.
fn sqrt_signed(rad: Interval, sign: f64) -> Interval {
    let root = rad.sqrt().expect("radicand clipped nonnegative");
    if sign < 0.0 {
        -root
    } else {
        root
    }
}

fn det3_interval(m: &[[Interval; 3]; 3]) -> Interval {
    let c0 = m[1][1] * m[2][2] - m[1][2] * m[2][1];
    let c1 = m[1][0] * m[2][2] - m[1][2] * m[2][0];
    let c2 = m[1][0] * m[2][1] - m[1][1] * m[2][0];
    m[0][0] * c0 - m[0][1] * c1 + m[0][2] * c2
}

#[cfg(test)]
mod tests {
    use super::*;

    fn orthoglide_plus() -> MachineModel {
        MachineModel::orthoglide(1.0)
            .unwrap()
            .with_branch_signs([1, 1, 1])
            .unwrap()
    }

    fn uranesx_paper() -> MachineModel {
        MachineModel::uranesx(1.0, 7.0 / 13.0, 3.0 / 26.0, 0.0).unwrap()
    }

    #[test]
    fn ik_at_isotropic_point() {
        let m = orthoglide_plus();
        let j = m.inverse_kinematics(Pose::new(0.0, 0.0, 0.0)).unwrap();
        assert_eq!(j.rho, [1.0, 1.0, 1.0]);

        let m = MachineModel::orthoglide(1.0).unwrap();
        let j = m.inverse_kinematics(Pose::new(0.0, 0.0, 0.0)).unwrap();
        assert_eq!(j.rho, [-1.0, -1.0, -1.0]);
    }

    #[test]
    fn ik_outside_reachable_domain() {
        let m = orthoglide_plus();
        let r = m.inverse_kinematics(Pose::new(0.0, 1.0 + 1e-9, 0.0));
        assert_eq!(r, Err(KinematicsError::OutsideReachableDomain));
    }

    #[test]
    fn ik_uranesx_symmetric_axis() {
        let m = uranesx_paper();
        let dr: f64 = 7.0 / 13.0 - 3.0 / 26.0;
        for z in [-0.3, 0.0, 0.7] {
            let j = m.inverse_kinematics(Pose::new(0.0, 0.0, z)).unwrap();
            let expect = z - (1.0 - dr * dr).sqrt();
            for rho in j.rho {
                assert!((rho - expect).abs() < 1e-12, "rho {rho} != {expect}");
            }
        }
    }

    #[test]
    fn ik_leg_length_roundtrip() {
        let models = [orthoglide_plus(), MachineModel::orthoglide(1.0).unwrap(), uranesx_paper()];
        let mut state = 0x9e3779b97f4a7c15_u64;
        let mut next = move || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (state >> 11) as f64 / (1u64 << 53) as f64
        };
        for m in &models {
            let mut tested = 0;
            while tested < 300 {
                let p = Pose::new(next() - 0.5, next() - 0.5, next() - 0.5);
                let Ok(legs) = m.leg_endpoints(p) else { continue };
                tested += 1;
                for (a, b) in legs {
                    let d2 = (0..3).map(|k| (b[k] - a[k]).powi(2)).sum::<f64>();
                    assert!((d2.sqrt() - 1.0).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn jacobian_at_isotropic_point() {
        let m = orthoglide_plus();
        let j = m.jacobian_pair(Pose::new(0.0, 0.0, 0.0)).unwrap();
        for i in 0..3 {
            for k in 0..3 {
                let want = if i == k { -1.0 } else { 0.0 };
                assert_eq!(j.a[i][k], want);
            }
        }
        assert_eq!(j.b_diag, [-1.0, -1.0, -1.0]);
    }

    #[test]
    fn jacobian_rows_have_leg_length_norm() {
        let m = orthoglide_plus();
        let mut state = 42_u64;
        let mut next = move || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (state >> 11) as f64 / (1u64 << 53) as f64
        };
        let mut tested = 0;
        while tested < 1000 {
            let p = Pose::new(next() - 0.5, next() - 0.5, next() - 0.5);
            let Ok(j) = m.jacobian_pair(p) else { continue };
            tested += 1;
            for row in j.a {
                let n = (row[0] * row[0] + row[1] * row[1] + row[2] * row[2]).sqrt();
                assert!((n - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn uranesx_etas_equal_at_center() {
        let m = uranesx_paper();
        let j = m.jacobian_pair(Pose::new(0.0, 0.0, 0.0)).unwrap();
        let dr: f64 = 7.0 / 13.0 - 3.0 / 26.0;
        let expect = (1.0 - dr * dr).sqrt();
        for eta in j.b_diag {
            assert!((eta - expect).abs() < 1e-12);
        }
    }

    #[test]
    fn isotropic_transmission() {
        for m in [MachineModel::orthoglide(1.0).unwrap(), orthoglide_plus()] {
            let tf = m.transmission_factors(Pose::new(0.0, 0.0, 0.0)).unwrap();
            for p in tf.psi {
                assert!((p - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn paper_center_is_dextrous() {
        let m = MachineModel::orthoglide(1.0).unwrap();
        let tf = m
            .transmission_factors(Pose::new(0.086, 0.086, 0.086))
            .unwrap();
        for p in tf.psi {
            assert!((0.5..=2.0).contains(&p), "psi {p} out of bounds");
        }
    }

    #[test]
    fn singularity_margins_at_isotropic_point() {
        let m = orthoglide_plus();
        let (da, db) = m.singularity_margins(Pose::new(0.0, 0.0, 0.0)).unwrap();
        assert_eq!(da, -1.0);
        assert_eq!(db, -1.0);
    }

    #[test]
    fn serial_singularity_at_reach_boundary() {
        let m = orthoglide_plus();
        // Approaching y -> L on the x-cylinder boundary drives eta_1 -> 0.
        let (_, db) = m.singularity_margins(Pose::new(0.0, 0.999999, 0.0)).unwrap();
        assert!(db.abs() < 2e-3);
    }

    #[test]
    fn uranesx_no_parallel_singularity_on_grid() {
        let m = uranesx_paper();
        let mut min_det = f64::INFINITY;
        let n = 60;
        for i in 0..=n {
            for j in 0..=n {
                let x = -0.3 + 0.6 * i as f64 / n as f64;
                let y = -0.3 + 0.6 * j as f64 / n as f64;
                if let Ok((da, _)) = m.singularity_margins(Pose::new(x, y, 0.0)) {
                    min_det = min_det.min(da.abs());
                }
            }
        }
        assert!(min_det > 1e-3, "min |det A| = {min_det}");
    }

    #[test]
    fn char_poly_at_degenerate_origin_box() {
        let m = orthoglide_plus();
        let b = IntervalBox::degenerate(&[0.0, 0.0, 0.0]);
        // sigma = 1 is a triple eigenvalue at the isotropic point.
        let at_one = m.interval_char_poly_value(&b, 1.0).unwrap();
        assert!(at_one.contains_zero());
        assert!(at_one.width() < 1e-12);
        // g_4(origin) = det((1 - 4) I) = -27.
        let at_four = m.interval_char_poly_value(&b, 4.0).unwrap();
        assert!(at_four.contains(-27.0));
        assert!(!at_four.contains_zero());
    }

    #[test]
    fn char_poly_outside_domain_errors() {
        let m = orthoglide_plus();
        let b = IntervalBox::cube(&[0.0, 1.5, 0.0], 0.01);
        assert_eq!(
            m.interval_char_poly_value(&b, 1.0),
            Err(KinematicsError::OutsideReachableDomain)
        );
    }

    #[test]
    fn char_poly_inclusion_isotonicity() {
        let m = MachineModel::orthoglide(1.0).unwrap();
        let outer = IntervalBox::cube(&[0.1, -0.05, 0.2], 0.15);
        let inner = IntervalBox::cube(&[0.12, -0.02, 0.18], 0.05);
        for sigma in [0.25, 1.0, 4.0] {
            let o = m.interval_char_poly_value(&outer, sigma).unwrap();
            let i = m.interval_char_poly_value(&inner, sigma).unwrap();
            assert!(i.is_subset_of(&o), "sigma {sigma}: {i:?} not in {o:?}");
        }
    }

    #[test]
    fn interval_det_a_contains_point_det() {
        let m = MachineModel::orthoglide(1.0).unwrap();
        let b = IntervalBox::cube(&[0.05, 0.1, -0.08], 0.1);
        let enclosure = m.interval_det_a(&b).unwrap();
        let (da, _) = m.singularity_margins(Pose::new(0.05, 0.1, -0.08)).unwrap();
        assert!(enclosure.contains(da));
    }

    #[test]
    fn branch_sign_mirror_identity() {
        // sigma under signs -1 at p equals sigma under signs +1 at -p.
        let minus = MachineModel::orthoglide(1.0).unwrap();
        let plus = orthoglide_plus();
        for p in [
            Pose::new(0.086, 0.086, 0.086),
            Pose::new(0.2, -0.1, 0.3),
            Pose::new(-0.35, 0.15, 0.05),
        ] {
            let a = minus.transmission_factors(p).unwrap();
            let b = plus
                .transmission_factors(Pose::new(-p.x, -p.y, -p.z))
                .unwrap();
            for k in 0..3 {
                assert!((a.sigma[k] - b.sigma[k]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn invalid_geometry_rejected() {
        assert!(MachineModel::orthoglide(0.0).is_err());
        assert!(MachineModel::uranesx(1.0, 0.1, 0.2, 0.0).is_err());
        // R + lambda - r >= L
        assert!(MachineModel::uranesx(1.0, 7.0 / 13.0, 3.0 / 26.0, 0.6).is_err());
    }
}
