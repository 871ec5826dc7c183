//! Twisted rotating black-hole primary metric (string-frame form) and its
//! diagonalized d-metric data on the radially reparametrized chart.
//!
//! The chart is (x1 = xt, x2 = theta, v = phi, y4 = t) with
//! xt(r) = int dr / sqrt(S0), S0 = r^2 - 2(M - b) r + a^2. The inverse map
//! r(xt) is solved by a table-bracketed Newton iteration; its derivatives
//! follow the closed recursion r' = sqrt(S0), r'' = r - (M - b), r''' = r',
//! r'''' = r'', so jets of r are exact to rounding.

use crate::error::{Error, Result};
use crate::field::{DepMask, Field, Point};
use crate::jet::Jet;
use crate::linalg::JetMat4;
use crate::metric::DMetric;
use crate::quad::integrate;
use crate::solution::PolarizationSet;
use std::sync::Arc;

/// Mass, spin and twist of the primary black hole.
#[derive(Clone, Copy, Debug)]
pub struct KerrSenParams {
    pub mass: f64,
    pub spin: f64,
    pub twist: f64,
}

impl KerrSenParams {
    pub fn new(mass: f64, spin: f64, twist: f64) -> Result<Self> {
        if mass <= 0.0 {
            return Err(Error::Unsupported("mass must be positive".into()));
        }
        if !(0.0..mass).contains(&spin.abs()) && spin != 0.0 {
            return Err(Error::Unsupported(
                "spin must satisfy 0 <= |a| < M for the exterior window".into(),
            ));
        }
        if twist < 0.0 {
            return Err(Error::Unsupported("twist must be nonnegative".into()));
        }
        Ok(KerrSenParams { mass, spin, twist })
    }

    /// Charge Q with twist b = Q^2 / 2M.
    pub fn charge(&self) -> f64 {
        (2.0 * self.mass * self.twist).sqrt()
    }

    /// Angular momentum J = M a.
    pub fn angular_momentum(&self) -> f64 {
        self.mass * self.spin
    }

    /// Magnetic dipole moment Q a.
    pub fn dipole_moment(&self) -> f64 {
        self.charge() * self.spin
    }

    /// Outer root of S0 (the horizon of the radial function).
    pub fn horizon(&self) -> f64 {
        let mb = self.mass - self.twist;
        mb + (mb * mb - self.spin * self.spin).max(0.0).sqrt()
    }

    fn s0(&self, r: f64) -> f64 {
        r * r - 2.0 * (self.mass - self.twist) * r + self.spin * self.spin
    }
}

struct Reparam {
    params: KerrSenParams,
    /// Radial values of the table nodes (uniform in r).
    r_nodes: Vec<f64>,
    /// xt at each node, xt(r_base) = 0.
    xt_nodes: Vec<f64>,
}

impl Reparam {
    fn build(params: KerrSenParams, r_lo: f64, r_hi: f64, r_base: f64) -> Result<Reparam> {
        let n = 512usize;
        let mut r_nodes = Vec::with_capacity(n + 1);
        for k in 0..=n {
            r_nodes.push(r_lo + (r_hi - r_lo) * k as f64 / n as f64);
        }
        let integrand = |r: f64| -> Result<f64> {
            let s = params.s0(r);
            if s <= 0.0 {
                return Err(Error::Branch(format!(
                    "radial chart touches the horizon: S0({r}) = {s}"
                )));
            }
            Ok(1.0 / s.sqrt())
        };
        let mut xt_nodes = vec![0.0; n + 1];
        // cumulative from the left edge, then shift so xt(r_base) = 0
        for k in 1..=n {
            xt_nodes[k] =
                xt_nodes[k - 1] + integrate(&integrand, r_nodes[k - 1], r_nodes[k], 1e-13)?;
        }
        let base = {
            let k = ((r_base - r_lo) / (r_hi - r_lo) * n as f64).floor() as usize;
            let k = k.min(n - 1);
            xt_nodes[k] + integrate(&integrand, r_nodes[k], r_base, 1e-13)?
        };
        for v in xt_nodes.iter_mut() {
            *v -= base;
        }
        Ok(Reparam {
            params,
            r_nodes,
            xt_nodes,
        })
    }

    fn xt_of_r(&self, r: f64) -> Result<f64> {
        let lo = self.r_nodes[0];
        let hi = *self.r_nodes.last().unwrap();
        if !(lo..=hi).contains(&r) {
            return Err(Error::Grid(format!(
                "r = {r} outside the tabulated radial window [{lo}, {hi}]"
            )));
        }
        let n = self.r_nodes.len() - 1;
        let k = (((r - lo) / (hi - lo)) * n as f64).floor() as usize;
        let k = k.min(n - 1);
        let integrand = |rr: f64| -> Result<f64> { Ok(1.0 / self.params.s0(rr).sqrt()) };
        Ok(self.xt_nodes[k] + integrate(&integrand, self.r_nodes[k], r, 1e-13)?)
    }

    fn r_of_xt(&self, xt: f64) -> Result<f64> {
        let first = self.xt_nodes.first().unwrap();
        let last = self.xt_nodes.last().unwrap();
        if xt < *first || xt > *last {
            return Err(Error::Grid(format!(
                "xt = {xt} outside the tabulated window [{first}, {last}]"
            )));
        }
        // bracket by binary search on the monotone table
        let mut lo = 0usize;
        let mut hi = self.xt_nodes.len() - 1;
        while hi - lo > 1 {
            let mid = (lo + hi) / 2;
            if self.xt_nodes[mid] <= xt {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        // initial guess: linear between nodes, then Newton on xt(r) - xt
        let t = (xt - self.xt_nodes[lo]) / (self.xt_nodes[hi] - self.xt_nodes[lo]);
        let mut r = self.r_nodes[lo] * (1.0 - t) + self.r_nodes[hi] * t;
        for _ in 0..60 {
            let f = self.xt_of_r(r)? - xt;
            let step = f * self.params.s0(r).sqrt();
            r -= step;
            if step.abs() < 1e-15 * r.abs().max(1.0) {
                break;
            }
        }
        Ok(r)
    }

    /// Jet of r as a function of the chart coordinate x1 = xt.
    fn r_jet(&self, xt: f64, order: usize) -> Result<Jet> {
        let r0 = self.r_of_xt(xt)?;
        let s = self.params.s0(r0);
        if s <= 0.0 {
            return Err(Error::Branch(format!("S0({r0}) <= 0 inside the chart")));
        }
        let sq = s.sqrt();
        let mb = self.params.mass - self.params.twist;
        // d^k r / d xt^k: [r, sqrt(S0), r - (M-b), sqrt(S0), r - (M-b)]
        let derivs = [r0, sq, r0 - mb, sq, r0 - mb];
        let fact = [1.0, 1.0, 2.0, 6.0, 24.0];
        let mut jet = Jet::constant(0.0, order);
        for (k, d) in derivs.iter().enumerate().take(order + 1) {
            let mut alpha = [0u8; 4];
            alpha[0] = k as u8;
            jet = jet.with_coeff(alpha, d / fact[k]);
        }
        Ok(jet)
    }
}

/// The primary geometry: scalar fields over the (xt, theta, phi, t) chart,
/// both directions of the radial reparametrization, the diagonalized
/// d-metric data and the full coordinate assembly.
#[derive(Clone)]
pub struct KerrSenPrimary {
    pub params: KerrSenParams,
    reparam: Arc<Reparam>,
}

impl KerrSenPrimary {
    /// Build with the default radial window [1.02 r_horizon, 14 M] and
    /// base point xt(3M) = 0.
    pub fn new(params: KerrSenParams) -> Result<KerrSenPrimary> {
        let r_lo = (params.horizon() * 1.02).min(2.5 * params.mass);
        Self::with_window(params, r_lo, 14.0 * params.mass, 3.0 * params.mass)
    }

    pub fn with_window(
        params: KerrSenParams,
        r_lo: f64,
        r_hi: f64,
        r_base: f64,
    ) -> Result<KerrSenPrimary> {
        if r_lo <= params.horizon() {
            return Err(Error::Branch(format!(
                "radial window starts at {r_lo} inside the horizon {}",
                params.horizon()
            )));
        }
        Ok(KerrSenPrimary {
            params,
            reparam: Arc::new(Reparam::build(params, r_lo, r_hi, r_base)?),
        })
    }

    pub fn xt_of_r(&self, r: f64) -> Result<f64> {
        self.reparam.xt_of_r(r)
    }

    pub fn r_of_xt(&self, xt: f64) -> Result<f64> {
        self.reparam.r_of_xt(xt)
    }

    /// r as an exactly differentiable field of x1 = xt.
    pub fn r_field(&self) -> Field {
        let rp = Arc::clone(&self.reparam);
        Field::from_fn(DepMask::slot(0), move |p, order| rp.r_jet(p[0], order))
    }

    /// rho^2 = r^2 + a^2 cos^2 theta.
    pub fn rho2(&self) -> Field {
        let a = self.params.spin;
        let r = self.r_field();
        r.powi(2).add(&Field::coord(1).cos().powi(2).scale(a * a))
    }

    /// rho_b^2 = rho^2 + 2 b r.
    pub fn rhob2(&self) -> Field {
        self.rho2()
            .add(&self.r_field().scale(2.0 * self.params.twist))
    }

    /// S0(r) = r^2 - 2 (M - b) r + a^2.
    pub fn s0(&self) -> Field {
        let p = self.params;
        let r = self.r_field();
        r.powi(2)
            .sub(&r.scale(2.0 * (p.mass - p.twist)))
            .add_scalar(p.spin * p.spin)
    }

    /// Dilaton factor e^Phi = rho^2 / rho_b^2.
    pub fn e_phi(&self) -> Field {
        self.rho2().div(&self.rhob2())
    }

    /// beta = -a sin^2 theta.
    pub fn beta(&self) -> Field {
        Field::coord(1).sin().powi(2).scale(-self.params.spin)
    }

    /// a q = -(r^2 + 2 b r + a^2); finite for every spin.
    pub fn aq(&self) -> Field {
        let p = self.params;
        let r = self.r_field();
        r.powi(2)
            .add(&r.scale(2.0 * p.twist))
            .add_scalar(p.spin * p.spin)
            .neg()
    }

    /// q = -(r^2 + 2 b r + a^2) / a; requires a != 0.
    pub fn q(&self) -> Result<Field> {
        if self.params.spin == 0.0 {
            return Err(Error::Branch("q is undefined at zero spin".into()));
        }
        Ok(self.aq().scale(1.0 / self.params.spin))
    }

    /// Diagonalized d-metric data: g1 = g2 = e^Phi rho_b^2 = rho^2.
    pub fn g1(&self) -> Field {
        self.rho2()
    }

    /// h4 = (rho^2 / rho_b^4)(a^2 sin^2 theta - S0).
    pub fn h4(&self) -> Field {
        let a2 = self.params.spin * self.params.spin;
        let amp = self.rho2().div(&self.rhob2().powi(2));
        amp.mul(
            &Field::coord(1)
                .sin()
                .powi(2)
                .scale(a2)
                .sub(&self.s0()),
        )
    }

    /// h3 = -S0 sin^2 theta e^{2 Phi} / h4 (so h3 h4 = -S0 sin^2 theta e^{2 Phi}).
    pub fn h3(&self) -> Field {
        self.s0()
            .neg()
            .mul(&Field::coord(1).sin().powi(2))
            .mul(&self.e_phi().powi(2))
            .div(&self.h4())
    }

    /// The diagonal d-metric carrying the primary data (w_i = n_i = 0).
    pub fn diagonal_dmetric(&self) -> DMetric {
        DMetric {
            g: [
                self.g1().with_deps(DepMask::X),
                self.g1().with_deps(DepMask::X),
            ],
            h: [self.h3(), self.h4()],
            omega: Field::constant(1.0),
            w: [Field::constant(0.0), Field::constant(0.0)],
            n: [Field::constant(0.0), Field::constant(0.0)],
            signature: [1, 1, 1, -1],
        }
    }

    /// Full coordinate assembly of the primary quadratic element in the
    /// (xt, theta, phi, t) chart, including the frame-dragging phi-t block.
    pub fn coordinate_metric_jets(&self, p: Point, order: usize) -> Result<JetMat4> {
        let g1 = self.g1().jet(p, order)?;
        let a = self.params.spin;
        let amp = self.rho2().div(&self.rhob2().powi(2)).jet(p, order)?;
        let sin2 = Field::coord(1).sin().powi(2).jet(p, order)?;
        let s0 = self.s0().jet(p, order)?;
        let aq = self.aq().jet(p, order)?;
        let beta = self.beta().jet(p, order)?;
        let zero = Jet::constant(0.0, order);
        let mut m = [[zero; 4]; 4];
        m[0][0] = g1;
        m[1][1] = g1;
        // v-block: amp [ a^2 sin^2 (dt + q dphi)^2 - S0 (dt + beta dphi)^2 ],
        // written through the finite products a q and beta = -a sin^2
        m[2][2] = amp.mul(&sin2.mul(&aq.mul(&aq)).sub(&s0.mul(&beta.mul(&beta))));
        m[3][3] = amp.mul(&sin2.scale(a * a).sub(&s0));
        let cross = amp.mul(&sin2.mul(&aq).scale(a).sub(&s0.mul(&beta)));
        m[2][3] = cross;
        m[3][2] = cross;
        Ok(m)
    }

    /// Orthonormal coframe rows (coordinate components of the four 1-forms)
    /// for the polarized geometry, as jets. `wn` supplies the N-elongations
    /// of the deformed metric (w_i, n_i), zero for the primary.
    pub fn coframe_jets(
        &self,
        pol: &PolarizationSet,
        wn: Option<&DMetric>,
        p: Point,
        order: usize,
    ) -> Result<JetMat4> {
        let rho = self.rho2().sqrt().jet(p, order)?;
        let rhob2 = self.rhob2().jet(p, order)?;
        let s0 = self.s0().jet(p, order)?;
        let aq = self.aq().jet(p, order)?;
        let beta = self.beta().jet(p, order)?;
        let sin = Field::coord(1).sin().jet(p, order)?;
        let eta: [Jet; 4] = [
            pol.eta[0].jet(p, order)?,
            pol.eta[1].jet(p, order)?,
            pol.eta[2].jet(p, order)?,
            pol.eta[3].jet(p, order)?,
        ];
        let sqeta: [Jet; 4] = [
            eta[0].abs()?.sqrt()?,
            eta[1].abs()?.sqrt()?,
            eta[2].abs()?.sqrt()?,
            eta[3].abs()?.sqrt()?,
        ];
        let (w, n) = if let Some(m) = wn {
            (
                [m.w[0].jet(p, order)?, m.w[1].jet(p, order)?],
                [m.n[0].jet(p, order)?, m.n[1].jet(p, order)?],
            )
        } else {
            let z = Jet::constant(0.0, order);
            ([z; 2], [z; 2])
        };
        if s0.value() <= 0.0 {
            return Err(Error::Branch(format!("S0 = {} <= 0", s0.value())));
        }
        if sin.value().abs() < 1e-12 {
            return Err(Error::Branch("coframe degenerates on the axis".into()));
        }
        let zero = Jet::constant(0.0, order);
        let mut e = [[zero; 4]; 4];
        // e^1 = rho sqrt|eta1| d xt, e^2 = sqrt|eta2| rho d theta
        e[0][0] = rho.mul(&sqeta[0]);
        e[1][1] = rho.mul(&sqeta[1]);
        // elongated basis 1-forms: et3 = dphi + w_i dx^i, et4 = dt + n_i dx^i
        // e^3 = rho_b^{-2} rho sin (a sqrt|eta4| et4 + (a q) sqrt|eta3| et3)
        // e^4 = rho_b^{-2} rho sqrt|S0| (sqrt|eta4| et4 + beta sqrt|eta3| et3)
        let amp = rho.div(&rhob2)?;
        let legs = [
            // (row, t-leg, phi-leg)
            (
                2usize,
                amp.mul(&sin).scale(self.params.spin).mul(&sqeta[3]),
                amp.mul(&sin).mul(&aq).mul(&sqeta[2]),
            ),
            (
                3usize,
                amp.mul(&s0.sqrt()?).mul(&sqeta[3]),
                amp.mul(&s0.sqrt()?).mul(&beta).mul(&sqeta[2]),
            ),
        ];
        for (row, t_leg, phi_leg) in legs {
            e[row][3] = t_leg;
            e[row][2] = phi_leg;
            for i in 0..2 {
                e[row][i] = t_leg.mul(&n[i]).add(&phi_leg.mul(&w[i]));
            }
        }
        Ok(e)
    }

    /// Orthonormal coframe at a point (value parts only).
    pub fn orthonormal_coframe(
        &self,
        m: &DMetric,
        pol: &PolarizationSet,
        p: Point,
    ) -> Result<[[f64; 4]; 4]> {
        let e = self.coframe_jets(pol, Some(m), p, 0)?;
        let mut out = [[0.0; 4]; 4];
        for (r, row) in e.iter().enumerate() {
            for (c, j) in row.iter().enumerate() {
                out[r][c] = j.value();
            }
        }
        Ok(out)
    }

    /// Reconstruction of the target metric from the coframe:
    /// e1 (x) e1 + e2 (x) e2 + e3 (x) e3 - e4 (x) e4.
    pub fn coframe_reconstruction(
        &self,
        pol: &PolarizationSet,
        wn: Option<&DMetric>,
        p: Point,
    ) -> Result<[[f64; 4]; 4]> {
        let e = self.coframe_jets(pol, wn, p, 0)?;
        let sign = [1.0, 1.0, 1.0, -1.0];
        let mut g = [[0.0; 4]; 4];
        for (al, row) in e.iter().enumerate() {
            for mu in 0..4 {
                for nu in 0..4 {
                    g[mu][nu] += sign[al] * row[mu].value() * row[nu].value();
                }
            }
        }
        Ok(g)
    }
}

/// The diagonalized primary d-metric (the deformation machinery's input
/// data). The spacetime geometry itself, including the frame-dragging
/// cross term, lives in [`KerrSenPrimary::coordinate_metric_jets`].
pub fn kerr_sen_primary(ks: &KerrSenPrimary) -> DMetric {
    ks.diagonal_dmetric()
}

/// Consistency of the two constructions of the primary quadratic element:
/// the direct off-diagonal form against the coframe reconstruction from the
/// diagonalized data, at one point.
pub fn kerr_sen_offdiag_check(ks: &KerrSenPrimary, p: Point) -> Result<f64> {
    let direct = ks.coordinate_metric_jets(p, 0)?;
    let rebuilt = ks.coframe_reconstruction(&PolarizationSet::unit(), None, p)?;
    let mut worst = 0.0f64;
    for mu in 0..4 {
        for nu in 0..4 {
            worst = worst.max((direct[mu][nu].value() - rebuilt[mu][nu]).abs());
        }
    }
    Ok(worst)
}
