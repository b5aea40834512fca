//! Minimal fixed-size linear algebra for 3x3 systems.

use std::f64::consts::PI;

pub type Vec3 = [f64; 3];
pub type Mat3 = [[f64; 3]; 3];

pub fn det3(m: &Mat3) -> f64 {
    m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
        - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
}

/// Inverse via the adjugate; `None` when the determinant is exactly zero.
/// Callers apply their own conditioning tolerance on `det3` first.
pub fn inv3(m: &Mat3) -> Option<Mat3> {
    let det = det3(m);
    if det == 0.0 {
        return None;
    }
    let inv_det = 1.0 / det;
    let mut adj = [[0.0; 3]; 3];
    adj[0][0] = m[1][1] * m[2][2] - m[1][2] * m[2][1];
    adj[0][1] = m[0][2] * m[2][1] - m[0][1] * m[2][2];
    adj[0][2] = m[0][1] * m[1][2] - m[0][2] * m[1][1];
    adj[1][0] = m[1][2] * m[2][0] - m[1][0] * m[2][2];
    adj[1][1] = m[0][0] * m[2][2] - m[0][2] * m[2][0];
    adj[1][2] = m[0][2] * m[1][0] - m[0][0] * m[1][2];
    adj[2][0] = m[1][0] * m[2][1] - m[1][1] * m[2][0];
    adj[2][1] = m[0][1] * m[2][0] - m[0][0] * m[2][1];
    adj[2][2] = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    let mut out = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            out[i][j] = adj[i][j] * inv_det;
        }
    }
    Some(out)
}

pub fn mat_mul(a: &Mat3, b: &Mat3) -> Mat3 {
    let mut out = [[0.0; 3]; 3];
    for (i, row) in out.iter_mut().enumerate() {
        for (j, v) in row.iter_mut().enumerate() {
            *v = a[i][0] * b[0][j] + a[i][1] * b[1][j] + a[i][2] * b[2][j];
        }
    }
    out
}

pub fn transpose(m: &Mat3) -> Mat3 {
    let mut out = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            out[i][j] = m[j][i];
        }
    }
    out
}

/// Eigenvalues of a symmetric 3x3 matrix, ascending, by the closed-form
/// trigonometric solution of the characteristic cubic.
pub fn sym_eigenvalues3(m: &Mat3) -> [f64; 3] {
    // Scale to unit magnitude for conditioning.
    let scale = m
        .iter()
        .flatten()
        .fold(0.0_f64, |acc, &v| acc.max(v.abs()));
    if scale == 0.0 {
        return [0.0; 3];
    }
    let inv = 1.0 / scale;
    let a = [
        [m[0][0] * inv, m[0][1] * inv, m[0][2] * inv],
        [m[1][0] * inv, m[1][1] * inv, m[1][2] * inv],
        [m[2][0] * inv, m[2][1] * inv, m[2][2] * inv],
    ];

    let p1 = a[0][1] * a[0][1] + a[0][2] * a[0][2] + a[1][2] * a[1][2];
    let q = (a[0][0] + a[1][1] + a[2][2]) / 3.0;
    let p2 = (a[0][0] - q).powi(2) + (a[1][1] - q).powi(2) + (a[2][2] - q).powi(2) + 2.0 * p1;
    if p2 <= f64::EPSILON * f64::EPSILON {
        // Scalar multiple of the identity.
        return [q * scale; 3];
    }
    let p = (p2 / 6.0).sqrt();
    let inv_p = 1.0 / p;
    let mut b = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            b[i][j] = (a[i][j] - if i == j { q } else { 0.0 }) * inv_p;
        }
    }
    let r = (det3(&b) / 2.0).clamp(-1.0, 1.0);
    let phi = r.acos() / 3.0;

    let hi = q + 2.0 * p * phi.cos();
    let lo = q + 2.0 * p * (phi + 2.0 * PI / 3.0).cos();
    let mid = 3.0 * q - hi - lo;
    let mut eig = [lo * scale, mid * scale, hi * scale];
    eig.sort_by(|x, y| x.partial_cmp(y).unwrap());
    eig
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn det_and_inverse_roundtrip() {
        let m = [[2.0, 1.0, 0.5], [-1.0, 3.0, 0.0], [0.25, -0.5, 1.5]];
        let inv = inv3(&m).unwrap();
        let id = mat_mul(&m, &inv);
        for i in 0..3 {
            for j in 0..3 {
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((id[i][j] - want).abs() < 1e-12);
            }
        }
        assert!(inv3(&[[1.0, 2.0, 3.0], [2.0, 4.0, 6.0], [0.0, 0.0, 1.0]]).is_none());
    }

    #[test]
    fn eigenvalues_of_diagonal() {
        let m = [[3.0, 0.0, 0.0], [0.0, -1.0, 0.0], [0.0, 0.0, 2.0]];
        let e = sym_eigenvalues3(&m);
        assert!((e[0] + 1.0).abs() < 1e-12);
        assert!((e[1] - 2.0).abs() < 1e-12);
        assert!((e[2] - 3.0).abs() < 1e-12);
    }

    #[test]
    fn eigenvalues_of_known_symmetric() {
        // Eigenvalues of [[2,1,0],[1,2,0],[0,0,5]] are 1, 3, 5.
        let m = [[2.0, 1.0, 0.0], [1.0, 2.0, 0.0], [0.0, 0.0, 5.0]];
        let e = sym_eigenvalues3(&m);
        assert!((e[0] - 1.0).abs() < 1e-12);
        assert!((e[1] - 3.0).abs() < 1e-12);
        assert!((e[2] - 5.0).abs() < 1e-12);
    }

    #[test]
    fn eigenvalues_of_scaled_identity() {
        let m = [[0.75, 0.0, 0.0], [0.0, 0.75, 0.0], [0.0, 0.0, 0.75]];
        assert_eq!(sym_eigenvalues3(&m), [0.75; 3]);
    }

    #[test]
    fn eigenvalue_sum_matches_trace() {
        let m = [[1.3, 0.2, -0.4], [0.2, 2.1, 0.9], [-0.4, 0.9, -0.7]];
        let e = sym_eigenvalues3(&m);
        let trace = m[0][0] + m[1][1] + m[2][2];
        assert!((e.iter().sum::<f64>() - trace).abs() < 1e-12);
        let prod: f64 = e.iter().product();
        assert!((prod - det3(&m)).abs() < 1e-12);
    }
}
