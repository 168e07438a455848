//! Elements of PSL(2,R): determinant-one 2x2 real matrices up to sign,
//! acting on the extended real line as `z -> (az+b)/(cz+d)`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalar::{s, Scalar};

/// Tolerance for classification boundaries and identity tests.
pub const CLASS_TOL: f64 = 1e-12;

/// Class of a PSL(2,R) element.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum MapClass {
    Identity,
    Elliptic,
    Parabolic,
    Hyperbolic,
}

/// A real Mobius transformation, stored as a determinant-one matrix with a
/// canonical sign: the first coefficient of `(a, b, c, d)` that is not
/// negligible (relative to the largest) is positive. This makes equality in
/// PSL(2,R) testable coefficient-wise.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MoebiusMap<T> {
    a: T,
    b: T,
    c: T,
    d: T,
}

impl<T: Scalar> MoebiusMap<T> {
    /// Build from coefficients of `z -> (az+b)/(cz+d)`; the determinant must
    /// be finite and positive and is normalized to one.
    pub fn new(a: T, b: T, c: T, d: T) -> Result<Self> {
        let det = a * d - b * c;
        if !det.is_finite() || det <= T::zero() {
            return Err(Error::NotProjective {
                det: det.to_f64().unwrap_or(f64::NAN),
            });
        }
        let r = det.sqrt();
        Ok(Self::canonical(a / r, b / r, c / r, d / r))
    }

    fn canonical(a: T, b: T, c: T, d: T) -> Self {
        let m = a.abs().max(b.abs()).max(c.abs()).max(d.abs());
        let thr = m * s::<T>(1e-9);
        let lead = [a, b, c, d]
            .into_iter()
            .find(|x| x.abs() > thr)
            .unwrap_or(a);
        if lead < T::zero() {
            MoebiusMap { a: -a, b: -b, c: -c, d: -d }
        } else {
            MoebiusMap { a, b, c, d }
        }
    }

    pub fn identity() -> Self {
        MoebiusMap { a: T::one(), b: T::zero(), c: T::zero(), d: T::one() }
    }

    /// `z -> lambda*z + kappa`, `lambda > 0`.
    pub fn affine(lambda: T, kappa: T) -> Result<Self> {
        if !(lambda > T::zero()) {
            return Err(Error::PreconditionFailed("affine dilation must be positive".into()));
        }
        let r = lambda.sqrt();
        Ok(Self::canonical(r, kappa / r, T::zero(), T::one() / r))
    }

    /// Rotation by angle `phi` about the point `i` (trace `2 cos(phi/2)`).
    pub fn rotation(phi: T) -> Self {
        let h = phi / s::<T>(2.0);
        Self::canonical(h.cos(), -h.sin(), h.sin(), h.cos())
    }

    pub fn coeffs(&self) -> (T, T, T, T) {
        (self.a, self.b, self.c, self.d)
    }

    pub fn trace(&self) -> T {
        self.a + self.d
    }

    pub fn trace_abs(&self) -> T {
        (self.a + self.d).abs()
    }

    /// Action on the upper half-plane: image of `u + iv` (`v > 0`), as
    /// `(re, im)`. The imaginary part stays positive since det = 1.
    pub fn apply_half_plane(&self, u: T, v: T) -> (T, T) {
        let (a, b, c, d) = self.coeffs();
        let den = (c * u + d) * (c * u + d) + c * v * c * v;
        let re = ((a * u + b) * (c * u + d) + a * v * c * v) / den;
        let im = v / den;
        (re, im)
    }

    /// Evaluate on the extended real line. `x` may be infinite.
    pub fn apply_real(&self, x: T) -> T {
        if x.is_infinite() {
            if self.c.abs() > T::zero() {
                self.a / self.c
            } else {
                T::infinity()
            }
        } else {
            (self.a * x + self.b) / (self.c * x + self.d)
        }
    }

    pub fn compose(&self, other: &Self) -> Self {
        let a = self.a * other.a + self.b * other.c;
        let b = self.a * other.b + self.b * other.d;
        let c = self.c * other.a + self.d * other.c;
        let d = self.c * other.b + self.d * other.d;
        // No determinant renormalization here: the product of det-1 factors
        // has det 1 and rounding drift is a relative 1e-16 per composition,
        // while recomputing det from an ill-conditioned product cancels
        // catastrophically once the coefficients exceed ~1e8.
        Self::canonical(a, b, c, d)
    }

    pub fn inverse(&self) -> Self {
        Self::canonical(self.d, -self.b, -self.c, self.a)
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut acc = Self::identity();
        for _ in 0..n {
            acc = self.compose(&acc);
        }
        acc
    }

    /// `f g f^-1 g^-1`.
    pub fn commutator(&self, g: &Self) -> Self {
        self.compose(g).compose(&self.inverse()).compose(&g.inverse())
    }

    /// Conjugate: `g self g^-1`.
    pub fn conjugate_by(&self, g: &Self) -> Self {
        g.compose(self).compose(&g.inverse())
    }

    pub fn is_identity(&self) -> bool {
        self.psl_distance(&Self::identity()) <= s::<T>(CLASS_TOL)
    }

    /// Sign-minimized Frobenius distance between det-1 representatives;
    /// zero exactly when the two maps agree in PSL(2,R).
    pub fn psl_distance(&self, other: &Self) -> T {
        let diff = |sgn: T| {
            let da = self.a - sgn * other.a;
            let db = self.b - sgn * other.b;
            let dc = self.c - sgn * other.c;
            let dd = self.d - sgn * other.d;
            (da * da + db * db + dc * dc + dd * dd).sqrt()
        };
        diff(T::one()).min(diff(-T::one()))
    }

    /// Classify by trace; the identity is split off first.
    pub fn class(&self) -> MapClass {
        if self.is_identity() {
            return MapClass::Identity;
        }
        let t = self.trace_abs();
        let two = s::<T>(2.0);
        let tol = s::<T>(CLASS_TOL);
        if t < two - tol {
            MapClass::Elliptic
        } else if t > two + tol {
            MapClass::Hyperbolic
        } else {
            MapClass::Parabolic
        }
    }

    /// Classification that refuses to guess on the parabolic boundary.
    pub fn class_strict(&self) -> Result<MapClass> {
        if self.is_identity() {
            return Ok(MapClass::Identity);
        }
        let t = self.trace_abs();
        let tol = s::<T>(CLASS_TOL);
        if (t - s::<T>(2.0)).abs() <= tol {
            return Err(Error::AmbiguousClass {
                trace_abs: t.to_f64().unwrap_or(f64::NAN),
            });
        }
        Ok(self.class())
    }

    /// Spectral norm (largest singular value) of the det-1 representative.
    /// Always `>= 1`; the singular values are `sigma` and `1/sigma`.
    pub fn spectral_norm(&self) -> T {
        let e = self.a * self.a + self.b * self.b + self.c * self.c + self.d * self.d;
        let two = s::<T>(2.0);
        let disc = (e * e - s::<T>(4.0)).max(T::zero());
        ((e + disc.sqrt()) / two).sqrt()
    }

    /// Spectral radius of the det-1 representative: `1` for elliptic and
    /// parabolic maps, `|tr|/2 + sqrt(tr^2/4 - 1)` for hyperbolic ones.
    pub fn spectral_radius(&self) -> T {
        let t = self.trace_abs();
        let two = s::<T>(2.0);
        if t <= two {
            T::one()
        } else {
            let h = t / two;
            h + (h * h - T::one()).sqrt()
        }
    }
}

/// Fixed-point data of a PSL(2,R) element.
#[derive(Debug, Clone, PartialEq)]
pub enum FixedPoints<T> {
    /// The identity fixes everything.
    AllFixed,
    /// One fixed point in the upper half-plane, `x + iy` with `y > 0`.
    Elliptic { x: T, y: T },
    /// One boundary fixed point, as a projective direction angle in `[0, pi)`.
    Parabolic { boundary: T },
    /// Two boundary fixed points (angles) and the derivative at the
    /// repelling one (`> 1`).
    Hyperbolic { attracting: T, repelling: T, multiplier: T },
}

fn direction_angle<T: Scalar>(x: T, y: T) -> T {
    let mut th = y.atan2(x);
    let pi = T::PI();
    while th < T::zero() {
        th = th + pi;
    }
    while th >= pi {
        th = th - pi;
    }
    th
}

impl<T: Scalar> MoebiusMap<T> {
    /// Eigenvector direction for eigenvalue `mu`, as an angle in `[0, pi)`.
    fn eigen_angle(&self, mu: T) -> T {
        // (A - mu I) v = 0 has rows (a-mu, b) and (c, d-mu); take the cross
        // direction from whichever row is better conditioned.
        let r1 = ((self.a - mu) * (self.a - mu) + self.b * self.b).sqrt();
        let r2 = (self.c * self.c + (self.d - mu) * (self.d - mu)).sqrt();
        if r1 >= r2 {
            direction_angle(-self.b, self.a - mu)
        } else {
            direction_angle(mu - self.d, self.c)
        }
    }

    pub fn fixed_points(&self) -> FixedPoints<T> {
        match self.class() {
            MapClass::Identity => FixedPoints::AllFixed,
            MapClass::Elliptic => {
                let t = self.trace();
                let root = (s::<T>(4.0) - t * t).max(T::zero()).sqrt();
                let x = (self.a - self.d) / (s::<T>(2.0) * self.c);
                let y = root / (s::<T>(2.0) * self.c.abs());
                FixedPoints::Elliptic { x, y }
            }
            MapClass::Parabolic => {
                let mu = self.trace() / s::<T>(2.0);
                FixedPoints::Parabolic { boundary: self.eigen_angle(mu) }
            }
            MapClass::Hyperbolic => {
                let t = self.trace();
                let disc = (t * t - s::<T>(4.0)).sqrt();
                let sgn = if t >= T::zero() { T::one() } else { -T::one() };
                let mu_big = (t + sgn * disc) / s::<T>(2.0);
                let mu_small = T::one() / mu_big;
                // derivative at the fixed point with eigenvalue mu is 1/mu^2,
                // so |mu| > 1 marks the attracting fixed point.
                FixedPoints::Hyperbolic {
                    attracting: self.eigen_angle(mu_big),
                    repelling: self.eigen_angle(mu_small),
                    multiplier: mu_big * mu_big,
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    type M = MoebiusMap<f64>;

    fn translation(b: f64) -> M {
        M::new(1.0, b, 0.0, 1.0).unwrap()
    }

    #[test]
    fn classify_examples() {
        // z + 1: |tr| = 2 forced
        assert_eq!(translation(1.0).class(), MapClass::Parabolic);
        // rotation with tr = sqrt(2) < 2
        let r = M::rotation(std::f64::consts::FRAC_PI_2);
        assert!((r.trace_abs() - 2.0_f64.sqrt()).abs() < 1e-12);
        assert_eq!(r.class(), MapClass::Elliptic);
        // z -> 2z + 1: tr = sqrt(2) + 1/sqrt(2) ~ 2.1213
        let g1 = M::affine(2.0, 1.0).unwrap();
        assert!((g1.trace_abs() - 2.1213203435596424).abs() < 1e-12);
        assert_eq!(g1.class(), MapClass::Hyperbolic);
        assert_eq!(M::identity().class(), MapClass::Identity);
    }

    #[test]
    fn strict_mode_rejects_boundary() {
        let p = translation(1.0);
        assert!(matches!(p.class_strict(), Err(Error::AmbiguousClass { .. })));
        let h = M::affine(2.0, 0.0).unwrap();
        assert_eq!(h.class_strict().unwrap(), MapClass::Hyperbolic);
    }

    fn angle_of(x: f64) -> f64 {
        if x.is_infinite() {
            0.0
        } else {
            let mut t = (1.0_f64).atan2(x);
            if t >= std::f64::consts::PI {
                t -= std::f64::consts::PI;
            }
            t
        }
    }

    fn angle_close(a: f64, b: f64, tol: f64) -> bool {
        let pi = std::f64::consts::PI;
        let d = (a - b).rem_euclid(pi);
        d.min(pi - d) < tol
    }

    #[test]
    fn fixed_points_examples() {
        // g3: 5z - 4 -> repelling 1, attracting infinity
        let g3 = M::affine(5.0, -4.0).unwrap();
        match g3.fixed_points() {
            FixedPoints::Hyperbolic { attracting, repelling, multiplier } => {
                assert!(angle_close(attracting, angle_of(f64::INFINITY), 1e-12));
                assert!(angle_close(repelling, angle_of(1.0), 1e-12));
                assert!((multiplier - 5.0).abs() < 1e-9);
            }
            other => panic!("expected hyperbolic, got {other:?}"),
        }
        // z -> a z, a > 1: attracting infinity, repelling 0
        let f = M::affine(3.0, 0.0).unwrap();
        match f.fixed_points() {
            FixedPoints::Hyperbolic { attracting, repelling, .. } => {
                assert!(angle_close(attracting, 0.0, 1e-12));
                assert!(angle_close(repelling, std::f64::consts::FRAC_PI_2, 1e-12));
            }
            other => panic!("{other:?}"),
        }
        // g1: 2z + 1 -> fixed points {-1, inf}, repelling -1
        let g1 = M::affine(2.0, 1.0).unwrap();
        match g1.fixed_points() {
            FixedPoints::Hyperbolic { attracting, repelling, multiplier } => {
                assert!(angle_close(attracting, 0.0, 1e-12));
                assert!(angle_close(repelling, angle_of(-1.0), 1e-12));
                assert!((multiplier - 2.0).abs() < 1e-9);
            }
            other => panic!("{other:?}"),
        }
        assert_eq!(M::identity().fixed_points(), FixedPoints::AllFixed);
    }

    #[test]
    fn elliptic_fixed_point_in_upper_half_plane() {
        let r = M::rotation(0.7);
        match r.fixed_points() {
            FixedPoints::Elliptic { x, y } => {
                assert!(x.abs() < 1e-12);
                assert!((y - 1.0).abs() < 1e-12);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn compose_examples() {
        let g1 = M::affine(2.0, 1.0).unwrap();
        let g3 = M::affine(5.0, -4.0).unwrap();
        let m = M::affine(2.0, 0.0).unwrap();
        assert!(M::identity().compose(&m).psl_distance(&m) < 1e-12);
        let four = m.compose(&m);
        assert!(four.psl_distance(&M::affine(4.0, 0.0).unwrap()) < 1e-12);
        // g3 o g1 = 10z + 1 by substitution 5(2z+1) - 4
        let h = g3.compose(&g1);
        assert!(h.psl_distance(&M::affine(10.0, 1.0).unwrap()) < 1e-12);
    }

    #[test]
    fn commutator_examples() {
        let f = M::affine(2.0, 0.0).unwrap();
        assert!(f.commutator(&f).is_identity());
        // f = 2z, g = z/2 + 1: [f,g] = z + 1 with translation (a-1)d - (c-1)b
        let g = M::affine(0.5, 1.0).unwrap();
        let c = f.commutator(&g);
        assert!(c.psl_distance(&translation(1.0)) < 1e-12);
    }

    #[test]
    fn psl_distance_properties() {
        let m = M::affine(2.0, 1.0).unwrap();
        assert_eq!(m.psl_distance(&m), 0.0);
        let (a, b, c, d) = m.coeffs();
        let neg = MoebiusMap { a: -a, b: -b, c: -c, d: -d };
        assert!(m.psl_distance(&neg) < 1e-15);
    }
}
