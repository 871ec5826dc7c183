//! Small dense linear algebra over f64 and jets (4x4 throughout).

use crate::error::{Error, Result};
use crate::jet::Jet;

pub type Mat4 = [[f64; 4]; 4];
pub type JetMat4 = [[Jet; 4]; 4];

pub fn mat_mul(a: &Mat4, b: &Mat4) -> Mat4 {
    let mut out = [[0.0; 4]; 4];
    for (i, row) in out.iter_mut().enumerate() {
        for (j, cell) in row.iter_mut().enumerate() {
            *cell = (0..4).map(|k| a[i][k] * b[k][j]).sum();
        }
    }
    out
}

pub fn mat_det(a: &Mat4) -> f64 {
    // cofactor expansion via 2x2 minors
    let m = |r0: usize, r1: usize, c0: usize, c1: usize| a[r0][c0] * a[r1][c1] - a[r0][c1] * a[r1][c0];
    let s0 = m(0, 1, 0, 1);
    let s1 = m(0, 1, 0, 2);
    let s2 = m(0, 1, 0, 3);
    let s3 = m(0, 1, 1, 2);
    let s4 = m(0, 1, 1, 3);
    let s5 = m(0, 1, 2, 3);
    let c5 = m(2, 3, 2, 3);
    let c4 = m(2, 3, 1, 3);
    let c3 = m(2, 3, 1, 2);
    let c2 = m(2, 3, 0, 3);
    let c1 = m(2, 3, 0, 2);
    let c0 = m(2, 3, 0, 1);
    s0 * c5 - s1 * c4 + s2 * c3 + s3 * c2 - s4 * c1 + s5 * c0
}

/// Inverse by Gauss-Jordan with partial pivoting.
pub fn mat_inv(a: &Mat4) -> Result<Mat4> {
    let mut m = *a;
    let mut inv = [[0.0; 4]; 4];
    for (i, row) in inv.iter_mut().enumerate() {
        row[i] = 1.0;
    }
    for col in 0..4 {
        let mut piv = col;
        for r in (col + 1)..4 {
            if m[r][col].abs() > m[piv][col].abs() {
                piv = r;
            }
        }
        if m[piv][col].abs() < 1e-300 {
            return Err(Error::SingularMetric { det: mat_det(a) });
        }
        m.swap(col, piv);
        inv.swap(col, piv);
        let d = m[col][col];
        for j in 0..4 {
            m[col][j] /= d;
            inv[col][j] /= d;
        }
        for r in 0..4 {
            if r != col {
                let f = m[r][col];
                if f != 0.0 {
                    for j in 0..4 {
                        m[r][j] -= f * m[col][j];
                        inv[r][j] -= f * inv[col][j];
                    }
                }
            }
        }
    }
    Ok(inv)
}

/// Inverse of a jet-valued matrix; pivots on the value parts.
pub fn jet_mat_inv(a: &JetMat4, order: usize) -> Result<JetMat4> {
    let mut m = *a;
    let mut inv = std::array::from_fn::<_, 4, _>(|_| std::array::from_fn(|_| Jet::constant(0.0, order)));
    for (i, row) in inv.iter_mut().enumerate() {
        row[i] = Jet::constant(1.0, order);
    }
    for col in 0..4 {
        let mut piv = col;
        for r in (col + 1)..4 {
            if m[r][col].value().abs() > m[piv][col].value().abs() {
                piv = r;
            }
        }
        if m[piv][col].value().abs() < 1e-300 {
            return Err(Error::SingularMetric { det: 0.0 });
        }
        m.swap(col, piv);
        inv.swap(col, piv);
        let d = m[col][col].recip()?;
        for j in 0..4 {
            m[col][j] = m[col][j].mul(&d);
            inv[col][j] = inv[col][j].mul(&d);
        }
        for r in 0..4 {
            if r != col {
                let f = m[r][col];
                if f.value() != 0.0 || f.max_abs_coeff() != 0.0 {
                    for j in 0..4 {
                        m[r][j] = m[r][j].sub(&f.mul(&m[col][j]));
                        inv[r][j] = inv[r][j].sub(&f.mul(&inv[col][j]));
                    }
                }
            }
        }
    }
    Ok(inv)
}

/// Inertia (signs of eigenvalues) of a symmetric matrix by LDL^T pivots.
/// Returns +1/-1 per dimension, sorted is NOT applied (order follows the
/// elimination), so callers should compare as multisets.
pub fn symmetric_inertia(a: &Mat4) -> Result<[i8; 4]> {
    let mut m = *a;
    let mut signs = [0i8; 4];
    for k in 0..4 {
        let d = m[k][k];
        if d.abs() < 1e-14 {
            return Err(Error::SingularMetric { det: mat_det(a) });
        }
        signs[k] = if d > 0.0 { 1 } else { -1 };
        for i in (k + 1)..4 {
            let f = m[i][k] / d;
            for j in k..4 {
                m[i][j] -= f * m[k][j];
            }
        }
    }
    Ok(signs)
}

pub fn max_abs_mat(a: &Mat4) -> f64 {
    a.iter()
        .flat_map(|r| r.iter())
        .fold(0.0f64, |m, &x| m.max(x.abs()))
}

pub fn mat_sub(a: &Mat4, b: &Mat4) -> Mat4 {
    let mut out = [[0.0; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            out[i][j] = a[i][j] - b[i][j];
        }
    }
    out
}
