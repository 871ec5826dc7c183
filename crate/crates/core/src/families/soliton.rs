//! Solitonic distributions and the two solitonic deformation classes.
//!
//! The stationary solitonic equation for eta(x1, theta, phi) is
//!
//! ```text
//! eta.. + eps (eta' + 6 eta eta* + eta***)* = 0
//! ```
//!
//! with `.` = d/d x1, `'` = d/d theta, `*` = d/d phi. Line solitons
//! eta = (c/2) sech^2( sqrt(c) (phi + P theta + Q x1 - shift) / 2 ) solve it
//! exactly when P = -(c + eps Q^2); Q = 0 is the plain one-soliton, Q != 0
//! supplies the x1-dependent profile the mass-polarized family needs.

use super::kerr_sen::KerrSenPrimary;
use super::rotoid::{background_metric, v_pair_from_profile, RotoidParams};
use crate::error::{Error, Result};
use crate::field::{DepMask, Field, Point};
use crate::metric::DMetric;

/// Solitonic distribution parameters.
#[derive(Clone, Copy, Debug)]
pub struct SolitonParams {
    /// Wave speed c > 0 (peak height c/2).
    pub speed: f64,
    /// Phase shift of the traveling argument.
    pub phase: f64,
    /// The +-1 branch of the solitonic equation.
    pub eps_sol: i8,
    /// Transverse slope Q; nonzero makes eta genuinely x1-dependent.
    pub oblique: f64,
}

impl SolitonParams {
    pub fn new(speed: f64, phase: f64, eps_sol: i8) -> Result<SolitonParams> {
        if speed <= 0.0 {
            return Err(Error::Unsupported("soliton speed must be positive".into()));
        }
        Ok(SolitonParams {
            speed,
            phase,
            eps_sol,
            oblique: 0.0,
        })
    }

    pub fn with_oblique(mut self, q: f64) -> SolitonParams {
        self.oblique = q;
        self
    }

    /// Traveling argument z = sqrt(c) (phi + P theta + Q x1 - phase) / 2
    /// with the dispersion P = -(c + eps Q^2).
    fn argument(&self) -> Field {
        let c = self.speed;
        let q = self.oblique;
        let slope_theta = -(c + self.eps_sol as f64 * q * q);
        Field::coord(2)
            .add(&Field::coord(1).scale(slope_theta))
            .add(&Field::coord(0).scale(q))
            .add_scalar(-self.phase)
            .scale(0.5 * c.sqrt())
    }
}

/// The analytic line-soliton distribution eta.
pub fn kdv_soliton(sp: &SolitonParams) -> Field {
    let deps = if sp.oblique == 0.0 {
        DepMask(0b0110)
    } else {
        DepMask(0b0111)
    };
    sp.argument()
        .sech()
        .powi(2)
        .scale(sp.speed / 2.0)
        .with_deps(deps)
}

/// Closed form of eta.. for the line soliton:
/// eta.. = (c^2 Q^2 / 4) (2 s^2 t^2 - s^4) with s = sech z, t = tanh z.
pub fn soliton_ddx(sp: &SolitonParams) -> Field {
    let z = sp.argument();
    let s2 = z.sech().powi(2);
    let t2 = z.tanh().powi(2);
    let c = sp.speed;
    let q = sp.oblique;
    s2.mul(&t2)
        .scale(2.0)
        .sub(&s2.powi(2))
        .scale(c * c * q * q / 4.0)
}

/// Residual of the stationary solitonic equation at a point; needs jets of
/// eta through order 4.
pub fn sol3d_residual(eta: &Field, eps_sol: i8, p: Point) -> Result<f64> {
    let j = eta.jet(p, 4)?;
    let eta_xx = j.partial([2, 0, 0, 0]);
    // bracket = eta' + 6 eta eta* + eta***, assembled at jet order 1
    let bracket = j
        .deriv(1)
        .trim(1)
        .add(&j.trim(1).mul(&j.deriv(2).trim(1)).scale(6.0))
        .add(&j.deriv(2).deriv(2).deriv(2));
    Ok(eta_xx + eps_sol as f64 * bracket.d1(2))
}

/// De Sitter-type metric with solitonically polarized mass: the v-profile is
/// eta.. itself, h4 = eta.., h3 and the N-coefficients from the closed-form
/// bracket pair. Requires an x1-dependent soliton (oblique != 0), otherwise
/// eta.. vanishes identically and the family degenerates.
pub fn soliton_mass_metric(
    ks: &KerrSenPrimary,
    sp: &SolitonParams,
    lambda: f64,
    psi: &Field,
    h0: f64,
) -> Result<DMetric> {
    if sp.oblique == 0.0 {
        return Err(Error::Branch(
            "x1-independent soliton: eta.. = 0 gives a degenerate h4; use an oblique seed"
                .into(),
        ));
    }
    let profile = soliton_ddx(sp);
    let vp = v_pair_from_profile(&profile, lambda, h0, 1, 1)?;
    let g = psi.exp().mul(&ks.g1()).with_deps(DepMask::X);
    Ok(DMetric {
        g: [g.clone(), g],
        h: [vp.h3, vp.h4],
        omega: Field::constant(1.0),
        w: vp.w,
        n: [Field::constant(0.0), Field::constant(0.0)],
        signature: [1, 1, 1, 1],
    })
}

/// Mass polarization mu1 = r (1 - eta..) / 2 recovered from the profile.
pub fn mass_polarization(ks: &KerrSenPrimary, sp: &SolitonParams) -> Field {
    ks.r_field()
        .mul(&Field::constant(1.0).sub(&soliton_ddx(sp)))
        .scale(0.5)
}

/// Rotoid embedded in a solitonic background: v-profile eta (q + eps rho).
pub fn soliton_background_metric(
    ks: &KerrSenPrimary,
    rp: &RotoidParams,
    sp: &SolitonParams,
    lambda: f64,
    psi: &Field,
) -> Result<DMetric> {
    background_metric(ks, rp, &kdv_soliton(sp), lambda, psi)
}
