//! Rotoid (black-ellipsoid) deformations: stationary metrics whose h4 = 0
//! locus is a rotating ellipse with eccentricity eps, plus the shared
//! v-sector builder used by all profile-generated families.

use super::kerr_sen::KerrSenPrimary;
use crate::error::{Error, Result};
use crate::field::{DepMask, Field, Point};
use crate::metric::DMetric;

/// Rotoid deformation data.
#[derive(Clone)]
pub struct RotoidParams {
    /// Eccentricity of the horizon ellipse.
    pub eps: f64,
    /// Mass scale mu0 entering q = 1 - 2 mu0 / r.
    pub mu0: f64,
    /// Radial amplitude q0(r) of the angular modulation; a chart field
    /// (constant 1 by default).
    pub q0: Field,
    /// Angular frequency and phase of the modulation.
    pub omega0: f64,
    pub phi0: f64,
    /// Normalization constant of the bracket function e^{2 phi} =
    /// lambda (h0 - profile).
    pub h0: f64,
}

impl RotoidParams {
    pub fn new(eps: f64, mu0: f64, omega0: f64, phi0: f64) -> RotoidParams {
        RotoidParams {
            eps,
            mu0,
            q0: Field::constant(1.0),
            omega0,
            phi0,
            h0: 2.0,
        }
    }

    /// q(r) = 1 - 2 mu0 / r on the chart.
    pub fn q_under(&self, ks: &KerrSenPrimary) -> Field {
        Field::constant(1.0).sub(&ks.r_field().powf(-1.0).scale(2.0 * self.mu0))
    }

    /// rho(r, phi) = (q0 / 4 mu0^2) sin(omega0 phi + phi0).
    pub fn rho_under(&self) -> Field {
        self.q0
            .scale(1.0 / (4.0 * self.mu0 * self.mu0))
            .mul(&Field::coord(2).scale(self.omega0).add_scalar(self.phi0).sin())
    }

    /// The v-profile q + eps rho.
    pub fn profile(&self, ks: &KerrSenPrimary) -> Field {
        self.q_under(ks).add(&self.rho_under().scale(self.eps))
    }
}

/// Shared v-sector builder: given a positive profile P(x, v), produce the
/// closed-form pair
///   h4 = sign * P,  e^{2 phi} = lambda (h0 - P),
///   h3 = [(sqrt|h4|)*]^2 e^{-2 phi},  w_i = w_sign d_i phi / phi*.
pub(crate) struct VPair {
    pub h3: Field,
    pub h4: Field,
    pub w: [Field; 2],
    pub phi: Field,
}

pub(crate) fn v_pair_from_profile(
    profile: &Field,
    lambda: f64,
    h0: f64,
    sign_h4: i8,
    w_sign: i8,
) -> Result<VPair> {
    if lambda == 0.0 {
        return Err(Error::Unsupported("lambda must be nonzero".into()));
    }
    let h4 = profile.scale(sign_h4 as f64);
    let e2phi = Field::constant(h0).sub(profile).scale(lambda);
    let phi = e2phi.ln().scale(0.5);
    let h3 = h4.abs().sqrt().deriv(2).powi(2).div(&e2phi);
    let phistar = phi.deriv(2);
    let ws = w_sign as f64;
    let w = [
        phi.deriv(0).div(&phistar).scale(ws),
        phi.deriv(1).div(&phistar).scale(ws),
    ];
    Ok(VPair { h3, h4, w, phi })
}

/// Stationary metric with profile eta * (q + eps rho) in the v-sector and
/// e^psi-scaled primary coefficients in the h-sector. `eta = 1` is the
/// plain rotoid.
pub fn background_metric(
    ks: &KerrSenPrimary,
    rp: &RotoidParams,
    eta: &Field,
    lambda: f64,
    psi: &Field,
) -> Result<DMetric> {
    let profile = eta.mul(&rp.profile(ks));
    let vp = v_pair_from_profile(&profile, lambda, rp.h0, -1, 1)?;
    let g = psi.exp().mul(&ks.g1()).with_deps(DepMask::X);
    Ok(DMetric {
        g: [g.clone(), g],
        h: [vp.h3, vp.h4],
        omega: Field::constant(1.0),
        w: vp.w,
        n: [Field::constant(0.0), Field::constant(0.0)],
        signature: [1, 1, 1, -1],
    })
}

/// The rotoid metric itself (unit solitonic background).
pub fn rotoid_metric(
    ks: &KerrSenPrimary,
    rp: &RotoidParams,
    lambda: f64,
    psi: &Field,
) -> Result<DMetric> {
    background_metric(ks, rp, &Field::constant(1.0), lambda, psi)
}

/// Numerically solve the h4 = 0 horizon locus in r at fixed angle phi.
pub fn horizon_radius(ks: &KerrSenPrimary, rp: &RotoidParams, phi: f64) -> Result<f64> {
    let f = |r: f64| -> Result<f64> {
        let q0 = eval_q0(ks, rp, r, phi)?;
        Ok(1.0 - 2.0 * rp.mu0 / r
            + rp.eps * q0 / (4.0 * rp.mu0 * rp.mu0) * (rp.omega0 * phi + rp.phi0).sin())
    };
    // bracket around 2 mu0 and bisect
    let mut lo = 2.0 * rp.mu0 * 0.5;
    let mut hi = 2.0 * rp.mu0 * 1.8;
    let mut flo = f(lo)?;
    let fhi = f(hi)?;
    if flo * fhi > 0.0 {
        return Err(Error::Branch(format!(
            "no h4 = 0 root bracketed in [{lo}, {hi}] at phi = {phi}"
        )));
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let fm = f(mid)?;
        if flo * fm <= 0.0 {
            hi = mid;
        } else {
            lo = mid;
            flo = fm;
        }
        if hi - lo < 1e-13 * rp.mu0 {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Parametric horizon formula r+ = 2 mu0 / (1 + eps (q0/4mu0^2) sin(...)),
/// evaluated with q0 at the supplied radius.
pub fn horizon_parametric(
    ks: &KerrSenPrimary,
    rp: &RotoidParams,
    phi: f64,
    r_for_q0: f64,
) -> Result<f64> {
    let q0 = eval_q0(ks, rp, r_for_q0, phi)?;
    Ok(2.0 * rp.mu0
        / (1.0 + rp.eps * q0 / (4.0 * rp.mu0 * rp.mu0) * (rp.omega0 * phi + rp.phi0).sin()))
}

/// Evaluate q0 near radius r; constant fields skip the chart lookup, and
/// radial fields clamp into the tabulated window (the horizon usually sits
/// below it).
fn eval_q0(ks: &KerrSenPrimary, rp: &RotoidParams, r: f64, phi: f64) -> Result<f64> {
    if rp.q0.deps().0 == 0 {
        return rp.q0.eval(Point::zero());
    }
    let r_lo = ks.params.horizon() * 1.03;
    let xt = ks.xt_of_r(r.max(r_lo))?;
    rp.q0.eval(Point::new(xt, std::f64::consts::FRAC_PI_2, phi, 0.0))
}
