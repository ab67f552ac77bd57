//! Floating-point shear factorisations of rotations: Paeth's three shears in the plane and
//! the Toffoli–Quick `U L U` factorisation of a 3D rotation given by Euler angles.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::exactmat::Side;

/// Below this, `|cos(φ/2)|`, `|cos((α+γ)/2)|` or `|cos(β/2)|` counts as singular.
pub const SINGULAR_TOL: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EulerAngles {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
}

impl EulerAngles {
    pub fn new(alpha: f64, beta: f64, gamma: f64) -> Result<Self> {
        if !(alpha.is_finite() && beta.is_finite() && gamma.is_finite()) {
            return Err(Error::InvalidArgument(format!("non-finite Euler angles ({alpha}, {beta}, {gamma})")));
        }
        Ok(EulerAngles { alpha, beta, gamma })
    }

    /// `|cos((α+γ)/2)|`.
    pub fn outer_cosine(&self) -> f64 {
        ((self.alpha + self.gamma) / 2.0).cos().abs()
    }

    /// `|cos(β/2)|`.
    pub fn inner_cosine(&self) -> f64 {
        (self.beta / 2.0).cos().abs()
    }

    pub fn is_regular(&self, tol: f64) -> bool {
        self.outer_cosine() > tol && self.inner_cosine() > tol
    }
}

#[derive(Clone, Debug)]
pub struct ShearDecomposition {
    pub factors: Vec<(Side, DMatrix<f64>)>,
    pub target: DMatrix<f64>,
    pub max_abs_error: f64,
}

impl ShearDecomposition {
    fn new(factors: Vec<(Side, DMatrix<f64>)>, target: DMatrix<f64>) -> Self {
        let mut d = ShearDecomposition { factors, target, max_abs_error: 0.0 };
        d.max_abs_error = (d.product() - &d.target).amax();
        d
    }

    pub fn product(&self) -> DMatrix<f64> {
        let n = self.target.nrows();
        self.factors.iter().fold(DMatrix::identity(n, n), |acc, (_, f)| acc * f)
    }

    pub fn pattern(&self) -> String {
        self.factors.iter().map(|(s, _)| s.letter()).collect::<Vec<_>>().join(" ")
    }
}

/// `[[cos φ, sin φ], [-sin φ, cos φ]] = U(tan(φ/2)) L(-sin φ) U(tan(φ/2))`.
pub fn paeth2(phi: f64) -> Result<ShearDecomposition> {
    if !phi.is_finite() || (phi / 2.0).cos().abs() <= SINGULAR_TOL {
        return Err(Error::NearSingular(format!("cos(φ/2) vanishes at φ = {phi}")));
    }
    let t = (phi / 2.0).tan();
    let (s, c) = phi.sin_cos();
    let u = DMatrix::from_row_slice(2, 2, &[1.0, t, 0.0, 1.0]);
    let l = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, -s, 1.0]);
    let target = DMatrix::from_row_slice(2, 2, &[c, s, -s, c]);
    Ok(ShearDecomposition::new(vec![(Side::Upper, u.clone()), (Side::Lower, l), (Side::Upper, u)], target))
}

/// The rotation with Euler angles `(α, β, γ)`.
pub fn euler3(e: &EulerAngles) -> DMatrix<f64> {
    let (sa, ca) = e.alpha.sin_cos();
    let (sb, cb) = e.beta.sin_cos();
    let (sc, cc) = e.gamma.sin_cos();
    #[rustfmt::skip]
    let rows = [
        ca * cb * cc - sa * sc, -ca * cb * sc - sa * cc, ca * sb,
        sa * cb * cc + ca * sc, -sa * cb * sc + ca * cc, sa * sb,
        -sb * cc,               sb * sc,                 cb,
    ];
    DMatrix::from_row_slice(3, 3, &rows)
}

/// `euler3(e) = U1 L U2`.
pub fn toffoli_quick3(e: &EulerAngles) -> Result<ShearDecomposition> {
    if !e.is_regular(SINGULAR_TOL) {
        return Err(Error::NearSingular(format!(
            "|cos((α+γ)/2)| = {:e}, |cos(β/2)| = {:e}",
            e.outer_cosine(),
            e.inner_cosine()
        )));
    }
    let (a, b, c) = (e.alpha, e.beta, e.gamma);
    let half_sum = (a + c) / 2.0;
    let half_diff = (a - c) / 2.0;
    let t = half_sum.tan();
    let tb = (b / 2.0).tan();
    let ratio = half_diff.sin() / half_sum.cos();
    #[rustfmt::skip]
    let u1 = DMatrix::from_row_slice(3, 3, &[
        1.0, -t,  a.cos() * tb,
        0.0, 1.0, a.sin() * tb,
        0.0, 0.0, 1.0,
    ]);
    #[rustfmt::skip]
    let l = DMatrix::from_row_slice(3, 3, &[
        1.0,                0.0,               0.0,
        (a + c).sin(),      1.0,               0.0,
        -c.cos() * b.sin(), -ratio * b.sin(),  1.0,
    ]);
    #[rustfmt::skip]
    let u2 = DMatrix::from_row_slice(3, 3, &[
        1.0, -t,  half_diff.cos() / half_sum.cos() * tb,
        0.0, 1.0, -c.sin() * tb,
        0.0, 0.0, 1.0,
    ]);
    Ok(ShearDecomposition::new(vec![(Side::Upper, u1), (Side::Lower, l), (Side::Upper, u2)], euler3(e)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn is_unitriangular(m: &DMatrix<f64>, side: Side) -> bool {
        let n = m.nrows();
        (0..n).all(|i| {
            (0..n).all(|j| {
                let wrong_half = match side {
                    Side::Upper => i > j,
                    Side::Lower => i < j,
                };
                if i == j {
                    (m[(i, j)] - 1.0).abs() < 1e-14
                } else if wrong_half {
                    m[(i, j)] == 0.0
                } else {
                    true
                }
            })
        })
    }

    #[test]
    fn paeth_examples() {
        let d = paeth2(PI / 2.0).unwrap();
        assert!((d.factors[0].1[(0, 1)] - 1.0).abs() < 1e-15);
        assert!(d.max_abs_error < 1e-15);
        assert!((d.product() - DMatrix::from_row_slice(2, 2, &[0.0, 1.0, -1.0, 0.0])).amax() < 1e-15);
        let d = paeth2(0.0).unwrap();
        assert!(d.factors.iter().all(|(_, f)| f == &DMatrix::identity(2, 2)));
        assert!(matches!(paeth2(PI - 1e-16), Err(Error::NearSingular(_))));
        assert!(matches!(paeth2(f64::NAN), Err(Error::NearSingular(_))));
    }

    #[test]
    fn paeth_sweep() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..1000 {
            let phi: f64 = rng.gen_range(-PI..PI);
            let d = paeth2(phi).unwrap();
            assert!(d.max_abs_error <= 1e-12);
            assert_eq!(d.pattern(), "U L U");
            assert_eq!(d.factors[0].1, d.factors[2].1);
        }
    }

    #[test]
    fn euler_examples() {
        let id = euler3(&EulerAngles::new(0.0, 0.0, 0.0).unwrap());
        assert_eq!(id, DMatrix::identity(3, 3));
        let b = 0.7f64;
        let m = euler3(&EulerAngles::new(0.0, b, 0.0).unwrap());
        #[rustfmt::skip]
        let expect = DMatrix::from_row_slice(3, 3, &[
            b.cos(), 0.0, b.sin(),
            0.0, 1.0, 0.0,
            -b.sin(), 0.0, b.cos(),
        ]);
        assert!((m - expect).amax() < 1e-15);
        assert!(EulerAngles::new(f64::INFINITY, 0.0, 0.0).is_err());
    }

    #[test]
    fn toffoli_quick_examples() {
        let d = toffoli_quick3(&EulerAngles::new(0.0, 0.0, 0.0).unwrap()).unwrap();
        assert!(d.factors.iter().all(|(_, f)| (f - DMatrix::identity(3, 3)).amax() == 0.0));
        let d = toffoli_quick3(&EulerAngles::new(0.9, 0.0, -0.9).unwrap()).unwrap();
        assert!(d.factors.iter().all(|(_, f)| (f - DMatrix::identity(3, 3)).amax() < 1e-15));
        assert!(matches!(toffoli_quick3(&EulerAngles::new(PI / 2.0, 0.3, PI / 2.0).unwrap()), Err(Error::NearSingular(_))));
        assert!(matches!(toffoli_quick3(&EulerAngles::new(0.1, PI, 0.2).unwrap()), Err(Error::NearSingular(_))));
    }

    #[test]
    fn toffoli_quick_sweep() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mut done = 0;
        while done < 1000 {
            let e = EulerAngles::new(rng.gen_range(-PI..PI), rng.gen_range(-PI..PI), rng.gen_range(-PI..PI)).unwrap();
            if !e.is_regular(0.1) {
                continue;
            }
            let d = toffoli_quick3(&e).unwrap();
            assert!(d.max_abs_error <= 1e-10, "{e:?}: {}", d.max_abs_error);
            assert_eq!(d.pattern(), "U L U");
            for (side, f) in &d.factors {
                assert!(is_unitriangular(f, *side));
            }
            let g = &d.target;
            assert!((g.transpose() * g - DMatrix::identity(3, 3)).amax() < 1e-12);
            assert!((g.determinant() - 1.0).abs() < 1e-12);
            done += 1;
        }
    }
}
