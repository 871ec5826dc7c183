//! The anholonomic deformation method: decoupled field-equation residuals,
//! closed-form solution construction from generating functions, Levi-Civita
//! constraint checks and polarization-based deformations.

pub mod poisson;

use crate::error::{Error, Result};
use crate::field::{DepMask, Field, Point};
use crate::jet::Jet;
use crate::metric::DMetric;
use crate::quad::{integrate_jet, REL_TOL};

/// Diagonal N-adapted source: ups^a_b = diag(u2, u2, u4, u4), with u2 a
/// function of (x, v) and u4 of x only. A cosmological constant fills both
/// with -lambda, so that the Einstein condition reads Ric = lambda g.
#[derive(Clone, Debug)]
pub struct SourceSpec {
    pub upsilon2: Field,
    pub upsilon4: Field,
    /// Set when the source is a pure cosmological constant.
    pub lambda: Option<f64>,
}

impl SourceSpec {
    pub fn cosmological(lambda: f64) -> SourceSpec {
        SourceSpec {
            upsilon2: Field::constant(-lambda),
            upsilon4: Field::constant(-lambda),
            lambda: Some(lambda),
        }
    }

    pub fn general(upsilon2: Field, upsilon4: Field) -> SourceSpec {
        SourceSpec {
            upsilon2,
            upsilon4,
            lambda: None,
        }
    }

    pub fn zero() -> SourceSpec {
        SourceSpec::cosmological(0.0)
    }
}

fn check_omega_is_one(m: &DMetric, p: Point) -> Result<()> {
    let om = m.omega.eval(p)?;
    if (om - 1.0).abs() > 1e-14 {
        return Err(Error::Unsupported(format!(
            "decoupled residuals need the omega = 1 ansatz, found omega = {om}"
        )));
    }
    Ok(())
}

/// The four decoupled field-equation residuals at a point: the g-row
/// (h-sector Ricci), the h-row (v-sector Ricci), the w-row and the n-row
/// (the off-diagonal Ricci constraints), each with its source subtracted.
///
/// The rows agree with the corresponding components of the general Ricci
/// engine (mixed Ric^1_1 + u4, Ric^3_3 + u2, Ric_{3k}, Ric_{4k}); the
/// acceptance suite pins that equality on a randomized corpus.
pub fn decoupled_residuals(m: &DMetric, src: &SourceSpec, p: Point) -> Result<[f64; 4]> {
    check_omega_is_one(m, p)?;
    let g1 = m.g[0].jet(p, 2)?;
    let g2 = m.g[1].jet(p, 2)?;
    let h3 = m.h[0].jet(p, 2)?;
    let h4 = m.h[1].jet(p, 2)?;
    let w = [m.w[0].eval(p)?, m.w[1].eval(p)?];
    let n3 = [m.n[0].jet(p, 2)?, m.n[1].jet(p, 2)?];
    if h3.value() == 0.0 || h4.value() == 0.0 {
        return Err(Error::Branch("h3 h4 = 0 at the sample point".into()));
    }
    let (g1v, g2v) = (g1.value(), g2.value());
    let b = |f: &Jet, d: usize| f.d1(d); // first partials
    let d2 = |f: &Jet, i: usize, j: usize| {
        let mut a = [0u8; 4];
        a[i] += 1;
        a[j] += 1;
        f.partial(a)
    };

    // g-row: Ric^1_1 = -(1/2 g1 g2) [ g2'' - g1. g2. / 2g1 - (g2.)^2 / 2g2
    //                                + g1'' - g1' g2' / 2g2 - (g1')^2 / 2g1 ]
    let bracket_g = d2(&g2, 0, 0) - b(&g1, 0) * b(&g2, 0) / (2.0 * g1v)
        - b(&g2, 0) * b(&g2, 0) / (2.0 * g2v)
        + d2(&g1, 1, 1)
        - b(&g1, 1) * b(&g2, 1) / (2.0 * g2v)
        - b(&g1, 1) * b(&g1, 1) / (2.0 * g1v);
    let ric_h = -bracket_g / (2.0 * g1v * g2v);
    let u4 = src.upsilon4.eval(p)?;
    let r_g = ric_h + u4;

    // h-row: Ric^3_3 = -(1/2 h3 h4) [ h4** - (h4*)^2 / 2h4 - h3* h4* / 2h3 ]
    let (h3v, h4v) = (h3.value(), h4.value());
    let h3s = b(&h3, 2);
    let h4s = b(&h4, 2);
    let bracket_v = d2(&h4, 2, 2) - h4s * h4s / (2.0 * h4v) - h3s * h4s / (2.0 * h3v);
    let ric_v = -bracket_v / (2.0 * h3v * h4v);
    let u2 = src.upsilon2.eval(p)?;
    let r_h = ric_v + u2;

    // w-row: Ric_{3k} = (w_k / 2h4) B + (h4*/4h4)(d_k h3/h3 + d_k h4/h4)
    //                 - d_k h4* / 2h4
    let mut r_w = 0.0f64;
    for k in 0..2 {
        let row = w[k] / (2.0 * h4v) * bracket_v
            + h4s / (4.0 * h4v) * (b(&h3, k) / h3v + b(&h4, k) / h4v)
            - d2(&h4, k, 2) / (2.0 * h4v);
        r_w = r_w.max(row.abs());
    }

    // n-row: Ric_{4k} = -(h4 / 2h3) [ n_k** + ((3/2) h4*/h4 - h3*/2h3) n_k* ]
    let gamma = 1.5 * h4s / h4v - 0.5 * h3s / h3v;
    let mut r_n = 0.0f64;
    for k in 0..2 {
        let row = -(h4v / (2.0 * h3v)) * (d2(&n3[k], 2, 2) + gamma * b(&n3[k], 2));
        r_n = r_n.max(row.abs());
    }
    Ok([r_g, r_h, r_w, r_n])
}

/// Residuals of the first-integral form of the decoupled system, written
/// through the bracket function phi = ln |h4* / sqrt|h3 h4||:
/// the psi-Poisson row, the h4* row, the w-row and the n-row.
pub fn eqe1_residuals(m: &DMetric, src: &SourceSpec, p: Point) -> Result<[f64; 4]> {
    check_omega_is_one(m, p)?;
    let g1 = m.g[0].jet(p, 2)?;
    let h3 = m.h[0].jet(p, 2)?;
    let h4 = m.h[1].jet(p, 3)?;
    if h3.value() == 0.0 || h4.value() == 0.0 {
        return Err(Error::Branch("h3 h4 = 0 at the sample point".into()));
    }
    let h4s = h4.d1(2);
    if h4s == 0.0 {
        return Err(Error::Branch(
            "h4* = 0: the bracket function phi is undefined".into(),
        ));
    }
    // psi-row, with psi recovered from g1 = eps1 e^psi
    let eps1 = g1.value().signum();
    let psi = g1.scale(eps1).ln()?;
    let u4 = src.upsilon4.eval(p)?;
    let r_psi = eps1 * psi.partial([2, 0, 0, 0]) + eps1 * psi.partial([0, 2, 0, 0]) - u4;

    // phi = ln |h4* / sqrt|h3 h4||  as a jet (order 2)
    let h4s_jet = h4.deriv(2);
    let ratio = h4s_jet
        .abs()?
        .div(&h3.mul(&h4).abs()?.sqrt()?)?;
    let phi = ratio.ln()?;
    let phis = phi.d1(2);
    if phis == 0.0 {
        return Err(Error::Branch("phi* = 0".into()));
    }
    let u2 = src.upsilon2.eval(p)?;
    let r_h4 = h4s - 2.0 * h3.value() * h4.value() * u2 / phis;

    // w-row: beta w_i - alpha_i with alpha_i = h4* d_i phi, beta = h4* phi*
    let mut r_w = 0.0f64;
    for i in 0..2 {
        let w = m.w[i].eval(p)?;
        r_w = r_w.max((h4s * (phis * w - phi.d1(i))).abs());
    }

    // n-row: n_i** + gamma n_i* with gamma = (3/2) h4*/h4 - (1/2) h3*/h3
    let gamma = 1.5 * h4s / h4.value() - 0.5 * h3.d1(2) / h3.value();
    let mut r_n = 0.0f64;
    for i in 0..2 {
        let n = m.n[i].jet(p, 2)?;
        r_n = r_n.max((n.partial([0, 0, 2, 0]) + gamma * n.d1(2)).abs());
    }
    Ok([r_psi, r_h4, r_w, r_n])
}

/// Generating data for the general off-diagonal solution family.
#[derive(Clone)]
pub struct GeneratingData {
    /// Generating function phi(x, v) with phi* bounded away from zero.
    pub phi: Field,
    /// h-sector exponent psi(x); g_i = eps_i e^psi.
    pub psi: Field,
    /// Integration function underline-h4(x).
    pub h4_under: Field,
    /// Integration functions 1n_k(x).
    pub n1k: [Field; 2],
    /// Optional 2n_k(x); None keeps the v-independent N_i^4 branch.
    pub n2k: Option<[Field; 2]>,
    /// Signs eps_1, eps_2 of the h-block.
    pub eps: [i8; 2],
    /// Branch sign of the h4 integral.
    pub sign_h4: i8,
    /// Sign convention for w_i = sign * d_i phi / phi*.
    pub w_sign: i8,
    /// Base point v0 of the v-integrations (domain edge).
    pub v0: f64,
    /// Reference point used to sample the h4 signature.
    pub ref_point: Point,
}

impl GeneratingData {
    pub fn new(phi: Field, psi: Field, ref_point: Point) -> GeneratingData {
        GeneratingData {
            phi,
            psi,
            h4_under: Field::constant(0.0),
            n1k: [Field::constant(0.0), Field::constant(0.0)],
            n2k: None,
            eps: [1, 1],
            sign_h4: 1,
            w_sign: 1,
            v0: 0.0,
            ref_point,
        }
    }
}

/// A field equal to f with the v coordinate frozen at v0.
fn freeze_v(f: &Field, v0: f64) -> Field {
    let inner = f.clone();
    Field::from_fn(DepMask::X, move |p, order| {
        let q = Point::new(p[0], p[1], v0, p[3]);
        Ok(inner.jet(q, order)?.freeze_dir(2))
    })
}

/// Build the closed-form solution metric from generating data and a
/// diagonal source.
///
/// g_i = eps_i e^psi, h4 from the v-integral of ups2^{-1} (e^{2 phi})*,
/// h3 = [(sqrt|h4|)*]^2 e^{-2 phi}, w_i = d_i phi / phi*,
/// n_k = 1n_k + 2n_k * v-integral of sqrt|h3| / sqrt|h4|^3.
pub fn generate_metric(gen: &GeneratingData, src: &SourceSpec) -> Result<DMetric> {
    let e2phi = gen.phi.scale(2.0).exp();
    let s = gen.sign_h4 as f64;

    // h4 = h4_under +/- int_{v0}^{v} ups2^{-1} (e^{2 phi})* dv'
    let h4: Field = if let Some(lambda) = src.lambda {
        if lambda == 0.0 {
            return Err(Error::Unsupported(
                "vacuum sources are outside the generated family".into(),
            ));
        }
        // constant source ups2 = -lambda: the integral is exact
        let diff = e2phi.sub(&freeze_v(&e2phi, gen.v0));
        gen.h4_under.add(&diff.scale(-s / lambda))
    } else {
        let phi = gen.phi.clone();
        let ups2 = src.upsilon2.clone();
        let v0 = gen.v0;
        let integral = Field::from_fn(DepMask::XV, move |p, order| {
            let f = |vv: f64| -> Result<Jet> {
                let q = Point::new(p[0], p[1], vv, p[3]);
                let e2 = phi.jet(q, order + 1)?.scale(2.0).exp();
                let integrand = e2.deriv(2).div(&ups2.jet(q, order)?)?;
                Ok(integrand.freeze_dir(2))
            };
            let xpart = integrate_jet(&f, v0, p[2], order, REL_TOL)?;
            // v-derivatives come from the integrand at v' = v
            let full = {
                let e2 = phi.jet(p, order + 1)?.scale(2.0).exp();
                e2.deriv(2).div(&ups2.jet(p, order)?)?
            };
            Ok(reattach_v_derivs(&xpart, &full, order))
        });
        gen.h4_under.add(&integral.scale(s))
    };

    let h3 = h4
        .abs()
        .sqrt()
        .deriv(2)
        .powi(2)
        .mul(&gen.phi.scale(-2.0).exp());

    let ws = gen.w_sign as f64;
    let phistar = gen.phi.deriv(2);
    let w1 = gen.phi.deriv(0).div(&phistar).scale(ws);
    let w2 = gen.phi.deriv(1).div(&phistar).scale(ws);

    let (n1, n2) = if let Some(n2k) = &gen.n2k {
        let h3c = h3.clone();
        let h4c = h4.clone();
        let v0 = gen.v0;
        let integral = Field::from_fn(DepMask::XV, move |p, order| {
            let f = |vv: f64| -> Result<Jet> {
                let q = Point::new(p[0], p[1], vv, p[3]);
                let num = h3c.jet(q, order)?.abs()?.sqrt()?;
                let den = h4c.jet(q, order)?.abs()?.powf(1.5)?;
                Ok(num.div(&den)?.freeze_dir(2))
            };
            let xpart = integrate_jet(&f, v0, p[2], order, REL_TOL)?;
            let full = {
                let num = h3c.jet(p, order)?.abs()?.sqrt()?;
                let den = h4c.jet(p, order)?.abs()?.powf(1.5)?;
                num.div(&den)?
            };
            Ok(reattach_v_derivs(&xpart, &full, order))
        });
        (
            gen.n1k[0].add(&n2k[0].mul(&integral)),
            gen.n1k[1].add(&n2k[1].mul(&integral)),
        )
    } else {
        (gen.n1k[0].clone(), gen.n1k[1].clone())
    };

    let h4_ref = h4.eval(gen.ref_point)?;
    if h4_ref == 0.0 {
        return Err(Error::Branch(format!(
            "h4 vanishes at the reference point {:?}",
            gen.ref_point
        )));
    }
    let signature = [gen.eps[0], gen.eps[1], 1, h4_ref.signum() as i8];

    Ok(DMetric {
        g: [
            gen.psi.exp().scale(gen.eps[0] as f64).with_deps(DepMask::X),
            gen.psi.exp().scale(gen.eps[1] as f64).with_deps(DepMask::X),
        ],
        h: [h3, h4],
        omega: Field::constant(1.0),
        w: [w1, w2],
        n: [n1, n2],
        signature,
    })
}

/// Merge pure-x integral jets with the v-derivative tower of the integrand.
/// For I(x, v) = int_{v0}^v f(x, v') dv': coefficients with at least one
/// v-index are Taylor coefficients of f shifted one v-slot up.
fn reattach_v_derivs(xpart: &Jet, integrand_at_v: &Jet, order: usize) -> Jet {
    use crate::jet::multi_indices;
    let mut out = *xpart;
    for alpha in multi_indices(order) {
        if alpha[2] == 0 {
            continue;
        }
        let mut src = alpha;
        src[2] -= 1;
        // d^alpha I = d^(alpha - e_v) f; convert derivative to coefficient
        let deriv = integrand_at_v.partial(src);
        let fact: f64 = alpha.iter().map(|&q| FACT[q as usize]).product();
        out = out.with_coeff(alpha, deriv / fact);
    }
    out
}

const FACT: [f64; 5] = [1.0, 1.0, 2.0, 6.0, 24.0];

/// Residuals of the Levi-Civita (zero-torsion) constraints at a point:
/// [ max_i |w_i* - e_i ln|h4||, |e_1 w_2 - e_2 w_1|, max_i |n_i*|,
///   |d_1 n_2 - d_2 n_1| ].
pub fn lc_condition_residual(m: &DMetric, p: Point) -> Result<[f64; 4]> {
    let c = m.coeff_jets(p, 2)?;
    if c.hv[1].value() == 0.0 {
        return Err(Error::Branch("h4 = 0 at the sample point".into()));
    }
    let lnh4 = c.hv[1].abs()?.ln()?;
    let mut r1 = 0.0f64;
    for i in 0..2 {
        let ws = c.w[i].d1(2);
        let ei = crate::metric::frame_deriv(&lnh4, i, &c).value();
        r1 = r1.max((ws - ei).abs());
    }
    let e1w2 = crate::metric::frame_deriv(&c.w[1], 0, &c).value();
    let e2w1 = crate::metric::frame_deriv(&c.w[0], 1, &c).value();
    let r2 = (e1w2 - e2w1).abs();
    let r3 = c.n[0].d1(2).abs().max(c.n[1].d1(2).abs());
    let r4 = (c.n[1].d1(0) - c.n[0].d1(1)).abs();
    Ok([r1, r2, r3, r4])
}

/// Zero-torsion separable family: phi = phi0(x) exp(v / iota),
/// h4 = sign / lambda * e^{2 phi} (lambda < 0 for a real Lorentzian branch),
/// w_i = d_i phi / phi*, n_k an exact gradient.
pub fn separable_solution(phi0: &Field, iota: f64, lambda: f64) -> Result<DMetric> {
    if iota == 0.0 {
        return Err(Error::Unsupported("iota must be nonzero".into()));
    }
    if lambda >= 0.0 {
        return Err(Error::Unsupported(
            "the pure-exponential separable branch needs lambda < 0".into(),
        ));
    }
    let phi = phi0.mul(&Field::coord(2).scale(1.0 / iota).exp());
    // Liouville h-sector: e^psi = 1 / (1 + lambda s^2 / 4)^2
    let s2 = Field::coord(0).powi(2).add(&Field::coord(1).powi(2));
    let psi = s2
        .scale(lambda / 4.0)
        .add_scalar(1.0)
        .ln()
        .scale(-2.0)
        .with_deps(DepMask::X);
    let h4 = phi.scale(2.0).exp().scale(1.0 / lambda);
    let h3 = h4
        .abs()
        .sqrt()
        .deriv(2)
        .powi(2)
        .mul(&phi.scale(-2.0).exp());
    let phistar = phi.deriv(2);
    let w1 = phi.deriv(0).div(&phistar);
    let w2 = phi.deriv(1).div(&phistar);
    Ok(DMetric {
        g: [
            psi.exp().with_deps(DepMask::X),
            psi.exp().with_deps(DepMask::X),
        ],
        h: [h3, h4],
        omega: Field::constant(1.0),
        w: [w1, w2],
        n: [Field::constant(0.0), Field::constant(0.0)],
        signature: [1, 1, 1, -1],
    })
}

/// Gravitational polarizations: multiplicative deformation of a primary
/// metric, eta_alpha on the diagonal data and eta_i^a on the N-coefficients.
#[derive(Clone)]
pub struct PolarizationSet {
    /// eta_1, eta_2, eta_3, eta_4.
    pub eta: [Field; 4],
    /// eta_i^a multipliers: [[eta_1^3, eta_2^3], [eta_1^4, eta_2^4]].
    pub eta_n: [[Field; 2]; 2],
}

impl PolarizationSet {
    pub fn unit() -> PolarizationSet {
        let one = Field::constant(1.0);
        PolarizationSet {
            eta: [one.clone(), one.clone(), one.clone(), one.clone()],
            eta_n: [[one.clone(), one.clone()], [one.clone(), one]],
        }
    }
}

/// Apply polarizations to a primary metric. No solution property is implied;
/// callers verify residuals on the result.
pub fn apply_polarizations(primary: &DMetric, pol: &PolarizationSet) -> DMetric {
    DMetric {
        g: [
            primary.g[0].mul(&pol.eta[0]).with_deps(DepMask::X),
            primary.g[1].mul(&pol.eta[1]).with_deps(DepMask::X),
        ],
        h: [
            primary.h[0].mul(&pol.eta[2]),
            primary.h[1].mul(&pol.eta[3]),
        ],
        omega: primary.omega.clone(),
        w: [
            primary.w[0].mul(&pol.eta_n[0][0]),
            primary.w[1].mul(&pol.eta_n[0][1]),
        ],
        n: [
            primary.n[0].mul(&pol.eta_n[1][0]),
            primary.n[1].mul(&pol.eta_n[1][1]),
        ],
        signature: primary.signature,
    }
}

/// chi_3 from chi_4: chi_3 = -1 + (lambda h3_prim)^{-1} [(ln sqrt(1 - chi4))*]^2.
/// Errors when chi4 >= 1 (log domain) and flags the chi4* = 0 degeneracy
/// (which would silently produce the zero polarization eta_3 = 0).
pub fn chi3_from_chi4(chi4: &Field, h3_prim: &Field, lambda: f64) -> Result<Field> {
    if lambda == 0.0 {
        return Err(Error::Unsupported("lambda must be nonzero".into()));
    }
    let one_minus = Field::constant(1.0).sub(chi4);
    let dterm = one_minus.sqrt().ln().deriv(2);
    let h3c = h3_prim.clone();
    let out = Field::from_fn(chi4.deps().union(h3_prim.deps()), move |p, order| {
        let d = dterm.jet(p, order)?;
        if d.value() == 0.0 {
            return Err(Error::Branch(
                "chi4* = 0: chi3 = -1 gives a degenerate (eta_3 = 0) deformation".into(),
            ));
        }
        let h3j = h3c.jet(p, order)?;
        let sq = d.mul(&d);
        sq.div(&h3j.scale(lambda))
            .map(|j| j.sub(&Jet::constant(1.0, order)))
    });
    Ok(out)
}
