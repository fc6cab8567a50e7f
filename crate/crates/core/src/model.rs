//! Normalized physical quantities: dyadics, admittances and structures.
//!
//! Dyadics are stored in `(z, x)` component order, so `zx` is the entry that
//! maps the x-component of the field onto the z-component of the current.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use crate::{Error, Result, C64, J};

/// Speed of light in vacuum (m/s).
pub const C0: f64 = 299_792_458.0;
/// Vacuum permeability (H/m), CODATA 2018.
pub const MU0: f64 = 1.256_637_062_12e-6;

/// Frequency scale of a problem. Only used at I/O boundaries.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Normalization {
    pub k0: f64,
    pub eta0: f64,
    pub lambda0: f64,
}

impl Normalization {
    pub fn from_k0(k0: f64) -> Result<Self> {
        if !(k0 > 0.0 && k0.is_finite()) {
            return Err(Error::Config(format!("k0 must be positive, got {k0}")));
        }
        Ok(Self { k0, eta0: MU0 * C0, lambda0: 2.0 * PI / k0 })
    }

    pub fn from_frequency(hz: f64) -> Result<Self> {
        Self::from_k0(2.0 * PI * hz / C0)
    }

    /// Converts a normalized abscissa `k0 x` to meters.
    pub fn meters(&self, xhat: f64) -> f64 {
        xhat / self.k0
    }
}

/// Which Riemann sheet of `ky = sqrt(1 - kt^2)` is in use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Sheet {
    /// `Im ky <= 0`: fields decay away from the plane.
    #[default]
    Proper,
    Improper,
}

/// A 2x2 complex dyadic in `(z, x)` component order.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Dyadic {
    pub zz: C64,
    pub zx: C64,
    pub xz: C64,
    pub xx: C64,
}

impl Dyadic {
    pub const ZERO: Dyadic = Dyadic {
        zz: C64::new(0.0, 0.0),
        zx: C64::new(0.0, 0.0),
        xz: C64::new(0.0, 0.0),
        xx: C64::new(0.0, 0.0),
    };

    pub const IDENTITY: Dyadic = Dyadic {
        zz: C64::new(1.0, 0.0),
        zx: C64::new(0.0, 0.0),
        xz: C64::new(0.0, 0.0),
        xx: C64::new(1.0, 0.0),
    };

    pub fn new(zz: C64, zx: C64, xz: C64, xx: C64) -> Self {
        Self { zz, zx, xz, xx }
    }

    pub fn diag(zz: C64, xx: C64) -> Self {
        Self { zz, zx: C64::new(0.0, 0.0), xz: C64::new(0.0, 0.0), xx }
    }

    pub fn scalar(v: C64) -> Self {
        Self::diag(v, v)
    }

    pub fn det(&self) -> C64 {
        self.zz * self.xx - self.zx * self.xz
    }

    pub fn trace(&self) -> C64 {
        self.zz + self.xx
    }

    pub fn inverse(&self) -> Result<Self> {
        let d = self.det();
        let scale = self.max_abs();
        if d == C64::new(0.0, 0.0) || !d.is_finite() || d.norm() <= 1e-300 * scale * scale {
            return Err(Error::SingularDyadic("determinant vanishes"));
        }
        Ok(Self { zz: self.xx / d, zx: -self.zx / d, xz: -self.xz / d, xx: self.zz / d })
    }

    pub fn transpose(&self) -> Self {
        Self { zz: self.zz, zx: self.xz, xz: self.zx, xx: self.xx }
    }

    /// Reflection `x -> -x`: the mixed entries change sign.
    pub fn mirrored(&self) -> Self {
        Self { zz: self.zz, zx: -self.zx, xz: -self.xz, xx: self.xx }
    }

    pub fn scale(&self, s: C64) -> Self {
        Self { zz: self.zz * s, zx: self.zx * s, xz: self.xz * s, xx: self.xx * s }
    }

    pub fn matmul(&self, o: &Dyadic) -> Self {
        Self {
            zz: self.zz * o.zz + self.zx * o.xz,
            zx: self.zz * o.zx + self.zx * o.xx,
            xz: self.xz * o.zz + self.xx * o.xz,
            xx: self.xz * o.zx + self.xx * o.xx,
        }
    }

    /// Applies the dyadic to a `(z, x)` vector.
    pub fn apply(&self, v: [C64; 2]) -> [C64; 2] {
        [self.zz * v[0] + self.zx * v[1], self.xz * v[0] + self.xx * v[1]]
    }

    pub fn max_abs(&self) -> f64 {
        self.zz.norm().max(self.zx.norm()).max(self.xz.norm()).max(self.xx.norm())
    }

    pub fn is_finite(&self) -> bool {
        self.zz.is_finite() && self.zx.is_finite() && self.xz.is_finite() && self.xx.is_finite()
    }

    pub fn entries(&self) -> [C64; 4] {
        [self.zz, self.zx, self.xz, self.xx]
    }

    pub fn is_isotropic(&self, tol: f64) -> bool {
        let s = self.max_abs().max(1e-300);
        self.zx.norm() <= tol * s && self.xz.norm() <= tol * s && (self.zz - self.xx).norm() <= tol * s
    }

    /// All entries purely imaginary.
    pub fn is_lossless(&self, tol: f64) -> bool {
        let s = self.max_abs().max(1e-300);
        self.entries().iter().all(|v| v.re.abs() <= tol * s)
    }
}

impl std::ops::Add for Dyadic {
    type Output = Dyadic;
    fn add(self, o: Dyadic) -> Dyadic {
        Dyadic { zz: self.zz + o.zz, zx: self.zx + o.zx, xz: self.xz + o.xz, xx: self.xx + o.xx }
    }
}

impl std::ops::Sub for Dyadic {
    type Output = Dyadic;
    fn sub(self, o: Dyadic) -> Dyadic {
        Dyadic { zz: self.zz - o.zz, zx: self.zx - o.zx, xz: self.xz - o.xz, xx: self.xx - o.xx }
    }
}

/// Wavenumber-dependent admittance, evaluated at `(kx, kz)`.
pub type DispersionFn = Arc<dyn Fn(C64, C64) -> Dyadic + Send + Sync>;

/// Normalized surface admittance `Y eta0` of one half-plane.
///
/// The nominal dyadic is what a local boundary uses everywhere. A spatially
/// dispersive boundary also carries an evaluator over `(kx, kz)`; the nominal
/// dyadic then only serves as the large-`kx` reference.
#[derive(Clone)]
pub struct AdmittanceDyadic {
    nominal: Dyadic,
    dispersion: Option<DispersionFn>,
}

impl fmt::Debug for AdmittanceDyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("AdmittanceDyadic")
            .field("nominal", &self.nominal)
            .field("dispersive", &self.dispersion.is_some())
            .finish()
    }
}

impl PartialEq for AdmittanceDyadic {
    fn eq(&self, o: &Self) -> bool {
        self.nominal == o.nominal && self.dispersion.is_none() && o.dispersion.is_none()
    }
}

impl AdmittanceDyadic {
    pub fn constant(nominal: Dyadic) -> Self {
        Self { nominal, dispersion: None }
    }

    pub fn dispersive(nominal: Dyadic, f: DispersionFn) -> Self {
        Self { nominal, dispersion: Some(f) }
    }

    pub fn nominal(&self) -> &Dyadic {
        &self.nominal
    }

    pub fn is_dispersive(&self) -> bool {
        self.dispersion.is_some()
    }

    pub fn at(&self, kx: C64, kz: C64) -> Dyadic {
        match &self.dispersion {
            Some(f) => f(kx, kz),
            None => self.nominal,
        }
    }

    pub fn yzz(&self) -> C64 {
        self.nominal.zz
    }
    pub fn yzx(&self) -> C64 {
        self.nominal.zx
    }
    pub fn yxz(&self) -> C64 {
        self.nominal.xz
    }
    pub fn yxx(&self) -> C64 {
        self.nominal.xx
    }

    pub fn is_isotropic(&self) -> bool {
        !self.is_dispersive() && self.nominal.is_isotropic(1e-14)
    }

    pub fn is_lossless(&self) -> bool {
        !self.is_dispersive() && self.nominal.is_lossless(1e-14)
    }

    /// Admittance of a scalar impedance `zbar`.
    pub fn isotropic(zbar: C64) -> Result<Self> {
        if zbar.norm() == 0.0 || !zbar.is_finite() {
            return Err(Error::ZeroImpedance);
        }
        Ok(Self::constant(Dyadic::scalar(zbar.inv())))
    }

    /// Inverts a full impedance dyadic.
    pub fn from_impedance(z: Dyadic) -> Result<Self> {
        if z.max_abs() == 0.0 {
            return Err(Error::ZeroImpedance);
        }
        Ok(Self::constant(z.inverse()?))
    }

    /// Axial impedance `zz_imp zz + xx_imp xx`.
    pub fn axial(z_zz: C64, z_xx: C64) -> Result<Self> {
        if z_zz.norm() == 0.0 || z_xx.norm() == 0.0 {
            return Err(Error::SingularDyadic("axial impedance has a zero entry"));
        }
        Self::from_impedance(Dyadic::diag(z_zz, z_xx))
    }

    /// Impedance `zu uu + zv vv` with `u = cos(xi) z + sin(xi) x` and
    /// `v = -sin(xi) z + cos(xi) x`.
    pub fn rotated_axial(zu: C64, zv: C64, xi: f64) -> Result<Self> {
        if zu.norm() == 0.0 || zv.norm() == 0.0 {
            return Err(Error::SingularDyadic("zu * zv = 0"));
        }
        let (s, c) = xi.sin_cos();
        let u = [c, s];
        let v = [-s, c];
        let ent = |i: usize, k: usize| zu * (u[i] * u[k]) + zv * (v[i] * v[k]);
        let z = Dyadic::new(ent(0, 0), ent(0, 1), ent(1, 0), ent(1, 1));
        Self::from_impedance(z)
    }

    pub fn impedance(&self) -> Result<Dyadic> {
        self.nominal.inverse()
    }

    /// Reflection `x -> -x` of the boundary.
    pub fn mirrored(&self) -> Self {
        let nominal = self.nominal.mirrored();
        let dispersion = self.dispersion.clone().map(|f| -> DispersionFn {
            Arc::new(move |kx: C64, kz: C64| f(-kx, kz).mirrored())
        });
        Self { nominal, dispersion }
    }
}

/// Scalar-impedance convenience wrapper around [`AdmittanceDyadic::isotropic`].
pub fn isotropic_admittance(zbar: C64) -> Result<AdmittanceDyadic> {
    AdmittanceDyadic::isotropic(zbar)
}

/// See [`AdmittanceDyadic::rotated_axial`].
pub fn rotated_axial_admittance(zu: C64, zv: C64, xi: f64) -> Result<AdmittanceDyadic> {
    AdmittanceDyadic::rotated_axial(zu, zv, xi)
}

/// Longitudinal wavenumber `kz = beta - j alpha` with its sheet.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SheetWavenumber {
    pub kz_hat: C64,
    pub sheet: Sheet,
}

impl SheetWavenumber {
    pub fn proper(kz_hat: C64) -> Self {
        Self { kz_hat, sheet: Sheet::Proper }
    }

    pub fn beta(&self) -> f64 {
        self.kz_hat.re
    }

    pub fn alpha(&self) -> f64 {
        -self.kz_hat.im
    }

    pub fn is_bound(&self, tol: f64) -> bool {
        self.alpha().abs() <= tol && self.sheet == Sheet::Proper
    }

    pub fn is_proper_leaky(&self, tol: f64) -> bool {
        self.alpha() > tol && self.sheet == Sheet::Proper
    }
}

/// Two half-planes: `y1` for `x < 0`, `y2` for `x > 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct StructureSpec {
    pub y1: AdmittanceDyadic,
    pub y2: AdmittanceDyadic,
}

impl StructureSpec {
    pub fn new(y1: AdmittanceDyadic, y2: AdmittanceDyadic) -> Self {
        Self { y1, y2 }
    }

    /// Two isotropic half-planes given by their normalized impedances.
    pub fn isotropic(z1: C64, z2: C64) -> Result<Self> {
        Ok(Self::new(AdmittanceDyadic::isotropic(z1)?, AdmittanceDyadic::isotropic(z2)?))
    }

    /// Capacitive axial half-plane `-j[(sqrt3 + eps) zz + (sqrt3 - eps) xx]`
    /// for `x < 0` against an inductive `j/sqrt3` for `x > 0`.
    pub fn capacitive_axial(eps: f64) -> Result<Self> {
        let s3 = 3f64.sqrt();
        let y1 = AdmittanceDyadic::axial(-J * (s3 + eps), -J * (s3 - eps))?;
        let y2 = AdmittanceDyadic::isotropic(J / s3)?;
        Ok(Self::new(y1, y2))
    }

    /// Inductive axial half-plane `j[zz/(sqrt3 + eps) + xx/(sqrt3 - eps)]`
    /// for `x < 0` against a capacitive `-j sqrt3` for `x > 0`.
    pub fn inductive_axial(eps: f64) -> Result<Self> {
        let s3 = 3f64.sqrt();
        let y1 = AdmittanceDyadic::axial(J / (s3 + eps), J / (s3 - eps))?;
        let y2 = AdmittanceDyadic::isotropic(-J * s3)?;
        Ok(Self::new(y1, y2))
    }

    /// Capacitive half-plane with principal impedances `-j(sqrt3 + eps)` and
    /// `-j(sqrt3 - eps)` along axes rotated by `xi`, against `j/sqrt3`.
    pub fn rotated_capacitive(eps: f64, xi: f64) -> Result<Self> {
        let s3 = 3f64.sqrt();
        let y1 = AdmittanceDyadic::rotated_axial(-J * (s3 + eps), -J * (s3 - eps), xi)?;
        let y2 = AdmittanceDyadic::isotropic(J / s3)?;
        Ok(Self::new(y1, y2))
    }

    /// Contrast `Y2 - Y1` at a spectral point.
    pub fn contrast_at(&self, kx: C64, kz: C64) -> Dyadic {
        self.y2.at(kx, kz) - self.y1.at(kx, kz)
    }

    /// True when the two half-planes are identical: no line wave exists.
    pub fn has_zero_contrast(&self) -> bool {
        if self.y1.is_dispersive() || self.y2.is_dispersive() {
            return false;
        }
        let d = *self.y2.nominal() - *self.y1.nominal();
        d.max_abs() <= 1e-15 * self.y1.nominal().max_abs().max(self.y2.nominal().max_abs())
    }

    pub fn is_isotropic(&self) -> bool {
        self.y1.is_isotropic() && self.y2.is_isotropic()
    }

    pub fn is_lossless(&self) -> bool {
        self.y1.is_lossless() && self.y2.is_lossless()
    }

    /// The same physical structure seen from the mirror `x -> -x`: the
    /// half-plane previously on the right becomes the extended background.
    pub fn swapped(&self) -> Self {
        Self { y1: self.y2.mirrored(), y2: self.y1.mirrored() }
    }
}
