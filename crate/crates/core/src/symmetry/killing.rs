//! Killing-vector and Stackel-Killing residuals, the wave operator of a
//! connection flavor, and the first-order anomaly coefficients of conformal
//! Killing vectors.

use super::geometry::MatrixMetric;
use crate::connection::{gamma_jets, Flavor, GammaJets};
use crate::error::{Error, Result};
use crate::field::{Field, Point};
use crate::jet::Jet;
use crate::metric::{frame_deriv, CoeffJets, DMetric};
use crate::symmetry::forms::Basis;

/// Vector field by contravariant N-adapted components (for d-metrics the
/// N-adapted and coordinate components of coordinate-invariant vectors like
/// d_t coincide on the v-slots).
pub type VectorField = [Field; 4];

pub fn coordinate_vector(slot: usize) -> VectorField {
    std::array::from_fn(|i| Field::constant(if i == slot { 1.0 } else { 0.0 }))
}

/// Symmetric rank-2 field with covariant components and a basis tag.
#[derive(Clone)]
pub struct SymTensorField {
    pub comps: [[Field; 4]; 4],
    pub basis: Basis,
}

impl SymTensorField {
    pub fn new(comps: [[Field; 4]; 4], basis: Basis) -> SymTensorField {
        SymTensorField { comps, basis }
    }

    pub fn jet_matrix(&self, p: Point, order: usize) -> Result<[[Jet; 4]; 4]> {
        let mut m = [[Jet::constant(0.0, order); 4]; 4];
        for (r, row) in self.comps.iter().enumerate() {
            for (c, f) in row.iter().enumerate() {
                m[r][c] = f.jet(p, order)?;
            }
        }
        Ok(m)
    }

    /// The metric itself as a Stackel-Killing tensor (covariant comps).
    pub fn from_dmetric(m: &DMetric) -> SymTensorField {
        let zero = Field::constant(0.0);
        let om2 = m.omega.powi(2);
        let mut comps: [[Field; 4]; 4] = std::array::from_fn(|_| std::array::from_fn(|_| zero.clone()));
        comps[0][0] = m.g[0].clone();
        comps[1][1] = m.g[1].clone();
        comps[2][2] = m.h[0].mul(&om2);
        comps[3][3] = m.h[1].mul(&om2);
        SymTensorField {
            comps,
            basis: Basis::Coordinate,
        }
    }
}

/// N-adapted inverse-diagonal jets of the d-metric blocks.
fn inv_diag_jets(c: &CoeffJets) -> Result<[Jet; 4]> {
    Ok([
        c.g[0].recip()?,
        c.g[1].recip()?,
        c.hv[0].recip()?,
        c.hv[1].recip()?,
    ])
}

fn diag_jets(c: &CoeffJets) -> [Jet; 4] {
    [c.g[0], c.g[1], c.hv[0], c.hv[1]]
}

/// Max |D_(a K_b)| of a vector field for the chosen connection flavor.
pub fn killing_residual(
    m: &DMetric,
    flavor: Flavor,
    k: &VectorField,
    p: Point,
) -> Result<f64> {
    let c = m.coeff_jets(p, 1)?;
    let diag = diag_jets(&c);
    let gamma = gamma_jets(m, p, flavor, 0)?;
    // lowered components K_b = g_bb K^b as jets
    let mut klow = [Jet::constant(0.0, 1); 4];
    for (b, kl) in klow.iter_mut().enumerate() {
        *kl = diag[b].mul(&k[b].jet(p, 1)?);
    }
    let mut worst = 0.0f64;
    for al in 0..4 {
        for be in 0..4 {
            let mut d_ab = frame_deriv(&klow[be], al, &c).value();
            let mut d_ba = frame_deriv(&klow[al], be, &c).value();
            for rho in 0..4 {
                d_ab -= gamma[rho][be][al].value() * klow[rho].value();
                d_ba -= gamma[rho][al][be].value() * klow[rho].value();
            }
            worst = worst.max(0.5 * (d_ab + d_ba).abs());
        }
    }
    Ok(worst)
}

/// Max |D_(c K_ab)| of a symmetric covariant rank-2 field, N-adapted route.
pub fn sk_residual(
    m: &DMetric,
    flavor: Flavor,
    k: &SymTensorField,
    p: Point,
) -> Result<f64> {
    if k.basis != Basis::Coordinate {
        return Err(Error::BasisMismatch {
            expected: "coordinate/N-adapted components",
            found: "orthonormal",
        });
    }
    let c = m.coeff_jets(p, 1)?;
    let gamma = gamma_jets(m, p, flavor, 0)?;
    let kj = k.jet_matrix(p, 1)?;
    let dk = |ga: usize, al: usize, be: usize| -> f64 {
        let mut v = frame_deriv(&kj[al][be], ga, &c).value();
        for rho in 0..4 {
            v -= gamma[rho][al][ga].value() * kj[rho][be].value();
            v -= gamma[rho][be][ga].value() * kj[al][rho].value();
        }
        v
    };
    let mut worst = 0.0f64;
    for ga in 0..4 {
        for al in 0..4 {
            for be in 0..4 {
                let s = (dk(ga, al, be) + dk(al, be, ga) + dk(be, ga, al)
                    + dk(ga, be, al)
                    + dk(al, ga, be)
                    + dk(be, al, ga))
                    / 6.0;
                worst = worst.max(s.abs());
            }
        }
    }
    Ok(worst)
}

/// Coordinate-geometry variant of the Killing residual (Levi-Civita of a
/// matrix metric; used for geometries outside the d-metric family).
pub fn killing_residual_coord(
    geom: &dyn MatrixMetric,
    k: &VectorField,
    p: Point,
) -> Result<f64> {
    let g = geom.metric_jets(p, 1)?;
    let gamma = geom.christoffel_jets(p, 0)?;
    let mut klow = [Jet::constant(0.0, 1); 4];
    for (b, kl) in klow.iter_mut().enumerate() {
        let mut s = Jet::constant(0.0, 1);
        for nu in 0..4 {
            s = s.add(&g[b][nu].mul(&k[nu].jet(p, 1)?));
        }
        *kl = s;
    }
    let mut worst = 0.0f64;
    for al in 0..4 {
        for be in 0..4 {
            let mut s = klow[be].d1(al) + klow[al].d1(be);
            for rho in 0..4 {
                s -= 2.0 * gamma[rho][be][al].value() * klow[rho].value();
            }
            worst = worst.max(0.5 * s.abs());
        }
    }
    Ok(worst)
}

/// Coordinate-geometry variant of the Stackel-Killing residual.
pub fn sk_residual_coord(
    geom: &dyn MatrixMetric,
    kj_rule: &dyn Fn(Point, usize) -> Result<[[Jet; 4]; 4]>,
    p: Point,
) -> Result<f64> {
    let gamma = geom.christoffel_jets(p, 0)?;
    let kj = kj_rule(p, 1)?;
    let dk = |ga: usize, al: usize, be: usize| -> f64 {
        let mut v = kj[al][be].d1(ga);
        for rho in 0..4 {
            v -= gamma[rho][al][ga].value() * kj[rho][be].value();
            v -= gamma[rho][be][ga].value() * kj[al][rho].value();
        }
        v
    };
    let mut worst = 0.0f64;
    for ga in 0..4 {
        for al in 0..4 {
            for be in 0..4 {
                let s = (dk(ga, al, be) + dk(al, be, ga) + dk(be, ga, al)
                    + dk(ga, be, al)
                    + dk(al, ga, be)
                    + dk(be, al, ga))
                    / 6.0;
                worst = worst.max(s.abs());
            }
        }
    }
    Ok(worst)
}

/// Wave operator of a connection flavor applied to a scalar field:
/// box f = g^{bc} ( e_b e_c f - Gamma^m_{cb} e_m f ).
pub fn klein_gordon(m: &DMetric, flavor: Flavor, f: &Field, p: Point) -> Result<f64> {
    let c = m.coeff_jets(p, 2)?;
    let inv = inv_diag_jets(&c)?;
    let gamma = gamma_jets(m, p, flavor, 0)?;
    let fj = f.jet(p, 2)?;
    // frame first derivatives of f as jets (order 1) and their frame derivs
    let ef: [Jet; 4] = std::array::from_fn(|al| frame_deriv(&fj, al, &c));
    let mut s = 0.0;
    for b in 0..4 {
        let mut t = frame_deriv(&ef[b], b, &c).value();
        for mu in 0..4 {
            t -= gamma[mu][b][b].value() * ef[mu].value();
        }
        s += inv[b].value() * t;
    }
    Ok(s)
}

/// Divergence D_a K^a of a vector field as a scalar field (canonical
/// d-connection).
pub fn divergence_field(m: &DMetric, k: &VectorField) -> Field {
    let m = m.clone();
    let k = k.clone();
    Field::from_fn(crate::field::DepMask::ALL, move |p, order| {
        let c = m.coeff_jets(p, order + 2)?;
        let gamma = canonical_for(&m, p, order)?;
        let mut s = Jet::constant(0.0, order);
        for al in 0..4 {
            let kj = k[al].jet(p, order + 1)?;
            s = s.add(&frame_deriv(&kj, al, &c).trim(order));
            for mu in 0..4 {
                let kmu = k[mu].jet(p, order)?;
                s = s.add(&gamma[al][mu][al].mul(&kmu));
            }
        }
        Ok(s)
    })
}

fn canonical_for(m: &DMetric, p: Point, order: usize) -> Result<GammaJets> {
    gamma_jets(m, p, Flavor::Canonical, order)
}

/// First-order anomaly coefficients of the wave-operator commutator with a
/// conformal Killing flow: C^a = -1/2 D^a D^c K_c and D = 1/2 D_a K^a.
/// Both vanish when K is a true Killing d-vector.
pub fn ckv_anomaly_coeffs(m: &DMetric, k: &VectorField, p: Point) -> Result<([f64; 4], f64)> {
    let div = divergence_field(m, k);
    let c = m.coeff_jets(p, 1)?;
    let inv = inv_diag_jets(&c)?;
    let dj = div.jet(p, 1)?;
    let mut cvec = [0.0; 4];
    for (al, out) in cvec.iter_mut().enumerate() {
        *out = -0.5 * inv[al].value() * frame_deriv(&dj, al, &c).value();
    }
    Ok((cvec, 0.5 * dj.value()))
}
