//! Dense matrix helpers: exponential, logarithm, square root, polar projection.
//!
//! The rotation group gets closed forms (Rodrigues); general matrices go through
//! scaling-and-squaring with a diagonal Pade approximant for `exp` and inverse
//! scaling-and-squaring (repeated square roots plus a Mercator series) for `log`.

use nalgebra::{DMatrix, Matrix3, Vector3};

/// Hat map: the skew-symmetric matrix with `skew3(v) * u == v x u`.
pub fn skew3(v: &Vector3<f64>) -> Matrix3<f64> {
    Matrix3::new(0.0, -v.z, v.y, v.z, 0.0, -v.x, -v.y, v.x, 0.0)
}

/// Inverse of the hat map (takes the skew part as given).
pub fn vee3(m: &Matrix3<f64>) -> Vector3<f64> {
    Vector3::new(m[(2, 1)], m[(0, 2)], m[(1, 0)])
}

/// Rodrigues formula: exponential of the rotation generator with coordinates `xi`.
pub fn so3_exp(xi: &Vector3<f64>) -> Matrix3<f64> {
    let theta2 = xi.norm_squared();
    let theta = theta2.sqrt();
    let k = skew3(xi);
    let (a, b) = if theta < 1e-4 {
        (
            1.0 - theta2 / 6.0 + theta2 * theta2 / 120.0,
            0.5 - theta2 / 24.0 + theta2 * theta2 / 720.0,
        )
    } else {
        (theta.sin() / theta, (1.0 - theta.cos()) / theta2)
    };
    Matrix3::identity() + k * a + k * k * b
}

/// Rotation angle of `r`, in [0, pi].
pub fn so3_angle(r: &Matrix3<f64>) -> f64 {
    ((r.trace() - 1.0) * 0.5).clamp(-1.0, 1.0).acos()
}

/// Closed-form rotation logarithm. Callers enforce the injectivity bound, so the
/// angle stays away from pi and the sine in the denominator is well conditioned.
pub fn so3_log(r: &Matrix3<f64>) -> Vector3<f64> {
    let theta = so3_angle(r);
    let w = vee3(&(r - r.transpose())) * 0.5; // sin(theta) * axis
    if theta < 1e-5 {
        w * (1.0 + theta * theta / 6.0)
    } else {
        w * (theta / theta.sin())
    }
}

/// Projects onto the nearest rotation via the orthogonal polar factor,
/// X <- (X + X^-T)/2 until stationary.
pub fn polar_rotation(r: &Matrix3<f64>) -> Matrix3<f64> {
    let mut x = *r;
    for _ in 0..40 {
        let Some(inv_t) = x.try_inverse() else {
            return x;
        };
        let next = (x + inv_t.transpose()) * 0.5;
        if (next - x).norm() < 1e-15 {
            return next;
        }
        x = next;
    }
    x
}

/// Scaling-and-squaring matrix exponential with a [6/6] Pade approximant.
pub fn expm(a: &DMatrix<f64>) -> DMatrix<f64> {
    let n = a.nrows();
    let norm = a.norm();
    let squarings = if norm > 0.1 {
        (norm / 0.1).log2().ceil().max(0.0) as u32
    } else {
        0
    };
    let scaled = a / 2f64.powi(squarings as i32);

    // Pade [6/6]: exp(A) ~ q(A)^-1 p(A) with p, q built from even/odd powers.
    let mut coeff = [0.0; 7];
    coeff[0] = 1.0;
    for j in 0..6 {
        coeff[j + 1] = coeff[j] * (6 - j) as f64 / ((12 - j) * (j + 1)) as f64;
    }
    let id = DMatrix::identity(n, n);
    let a2 = &scaled * &scaled;
    let a4 = &a2 * &a2;
    let a6 = &a4 * &a2;
    let even = &id * coeff[0] + &a2 * coeff[2] + &a4 * coeff[4] + &a6 * coeff[6];
    let odd_part = &id * coeff[1] + &a2 * coeff[3] + &a4 * coeff[5];
    let odd = &scaled * odd_part;

    let p = &even + &odd;
    let q = &even - &odd;
    let mut result = q
        .lu()
        .solve(&p)
        .unwrap_or_else(|| DMatrix::identity(n, n));
    for _ in 0..squarings {
        result = &result * &result;
    }
    result
}

/// Matrix square root by the Denman-Beavers iteration.
fn sqrtm(a: &DMatrix<f64>) -> Option<DMatrix<f64>> {
    let n = a.nrows();
    let mut y = a.clone();
    let mut z = DMatrix::identity(n, n);
    for _ in 0..60 {
        let y_inv = y.clone().try_inverse()?;
        let z_inv = z.clone().try_inverse()?;
        let y_next = (&y + z_inv) * 0.5;
        let z_next = (&z + y_inv) * 0.5;
        let delta = (&y_next - &y).norm();
        y = y_next;
        z = z_next;
        if delta < 1e-15 {
            break;
        }
    }
    Some(y)
}

/// Principal matrix logarithm by inverse scaling-and-squaring.
///
/// Returns `None` when the square-root iteration fails to drive the argument
/// into the convergence region (no principal logarithm, or too ill-conditioned).
pub fn logm(a: &DMatrix<f64>) -> Option<DMatrix<f64>> {
    let n = a.nrows();
    let id = DMatrix::identity(n, n);
    let mut x = a.clone();
    let mut roots = 0u32;
    while (&x - &id).norm() > 0.25 {
        if roots >= 40 {
            return None;
        }
        x = sqrtm(&x)?;
        roots += 1;
    }
    let y = &x - &id;
    // log(I + Y) via the Mercator series; ||Y|| <= 0.25 so 40 terms are ample.
    let mut sum = DMatrix::zeros(n, n);
    let mut term = y.clone();
    let mut sign = 1.0;
    for m in 1..=40 {
        sum += &term * (sign / m as f64);
        if term.norm() / ((m + 1) as f64) < 1e-18 {
            break;
        }
        term = &term * &y;
        sign = -sign;
    }
    Some(sum * 2f64.powi(roots as i32))
}
