//! Curvature, Ricci, scalar curvature and Einstein-equation residuals.

use crate::connection::{canonical_gamma_jets, coordinate_gamma_jets, distortion_gamma_jets, Flavor};
use crate::error::Result;
use crate::field::Point;
use crate::jet::Jet;
use crate::metric::{anholonomy_jets, frame_deriv, DMetric};
use crate::solution::SourceSpec;
use crate::tensor::{TensorComponents, Variance};

/// Riemann, Ricci and scalar curvature of one connection flavor at a point.
#[derive(Clone, Debug)]
pub struct CurvatureBlock {
    pub riemann: TensorComponents,
    /// Ricci R_{ab} = R^t_{abt}; generally nonsymmetric for the canonical
    /// d-connection.
    pub ricci: [[f64; 4]; 4],
    pub scalar_h: f64,
    pub scalar_v: f64,
    pub scalar_total: f64,
}

/// Jet-valued Riemann tensor R^a_{bcd} for the given flavor.
///
/// Convention (pinned by the flat, sphere and coordinate-oracle tests):
/// R^a_{bcd} = e_d(G^a_{bc}) - e_c(G^a_{bd})
///           + G^m_{bc} G^a_{md} - G^m_{bd} G^a_{mc} - W^m_{dc} G^a_{bm}.
pub fn riemann_jets(
    m: &DMetric,
    p: Point,
    flavor: Flavor,
    order: usize,
) -> Result<Box<[[[[Jet; 4]; 4]; 4]; 4]>> {
    let c = m.coeff_jets(p, order + 2)?;
    let gamma = match flavor {
        Flavor::Canonical => canonical_gamma_jets(&c, order + 1)?,
        Flavor::Distortion => distortion_gamma_jets(&c, order + 1)?,
        Flavor::LcAdapted => {
            let a = canonical_gamma_jets(&c, order + 1)?;
            let b = distortion_gamma_jets(&c, order + 1)?;
            let mut s = a;
            for ci in 0..4 {
                for bi in 0..4 {
                    for ai in 0..4 {
                        s[ci][bi][ai] = s[ci][bi][ai].add(&b[ci][bi][ai]);
                    }
                }
            }
            s
        }
        Flavor::ChristoffelCoordinate => coordinate_gamma_jets(m, p, order + 1)?,
    };
    let coordinate = matches!(flavor, Flavor::ChristoffelCoordinate);
    let ct = m.coeff_jets(p, order + 1)?;
    let w = if coordinate {
        None
    } else {
        Some(anholonomy_jets(&ct, order))
    };
    let zero = Jet::constant(0.0, order);
    let mut r = Box::new([[[[zero; 4]; 4]; 4]; 4]);
    for al in 0..4 {
        for be in 0..4 {
            for ga in 0..4 {
                for de in 0..4 {
                    let mut s = if coordinate {
                        gamma[al][be][ga]
                            .deriv(de)
                            .trim(order)
                            .sub(&gamma[al][be][de].deriv(ga).trim(order))
                    } else {
                        frame_deriv(&gamma[al][be][ga], de, &ct)
                            .sub(&frame_deriv(&gamma[al][be][de], ga, &ct))
                    };
                    for mu in 0..4 {
                        s = s.add(
                            &gamma[mu][be][ga]
                                .trim(order)
                                .mul(&gamma[al][mu][de].trim(order)),
                        );
                        s = s.sub(
                            &gamma[mu][be][de]
                                .trim(order)
                                .mul(&gamma[al][mu][ga].trim(order)),
                        );
                        if let Some(wj) = &w {
                            s = s.sub(&wj[mu][de][ga].mul(&gamma[al][be][mu].trim(order)));
                        }
                    }
                    r[al][be][ga][de] = s;
                }
            }
        }
    }
    Ok(r)
}

/// Jet-valued Ricci tensor R_{ab} = R^t_{abt}.
pub fn ricci_jets(
    m: &DMetric,
    p: Point,
    flavor: Flavor,
    order: usize,
) -> Result<Box<[[Jet; 4]; 4]>> {
    let r = riemann_jets(m, p, flavor, order)?;
    let zero = Jet::constant(0.0, order);
    let mut ric = Box::new([[zero; 4]; 4]);
    for al in 0..4 {
        for be in 0..4 {
            let mut s = zero;
            for t in 0..4 {
                s = s.add(&r[t][al][be][t]);
            }
            ric[al][be] = s;
        }
    }
    Ok(ric)
}

/// Full curvature block of a flavor at a point.
pub fn curvature(m: &DMetric, p: Point, flavor: Flavor) -> Result<CurvatureBlock> {
    let rj = riemann_jets(m, p, flavor, 0)?;
    let mut riemann = TensorComponents::zeros(&[
        Variance::Contra,
        Variance::Co,
        Variance::Co,
        Variance::Co,
    ]);
    for al in 0..4 {
        for be in 0..4 {
            for ga in 0..4 {
                for de in 0..4 {
                    riemann.set(&[al, be, ga, de], rj[al][be][ga][de].value());
                }
            }
        }
    }
    let mut ricci = [[0.0; 4]; 4];
    for al in 0..4 {
        for be in 0..4 {
            ricci[al][be] = (0..4).map(|t| rj[t][al][be][t].value()).sum();
        }
    }
    let d = m.nadapted_diag(p)?;
    let scalar_h = ricci[0][0] / d[0] + ricci[1][1] / d[1];
    let scalar_v = ricci[2][2] / d[2] + ricci[3][3] / d[3];
    Ok(CurvatureBlock {
        riemann,
        ricci,
        scalar_h,
        scalar_v,
        scalar_total: scalar_h + scalar_v,
    })
}

/// Einstein-equation residual for the canonical d-connection.
///
/// For a cosmological-constant source this is R_{bd} - lambda g_{bd} in the
/// N-adapted frame; for a general diagonal source the trace-reversed form
/// R_{bd} - (Ups_{bd} - 1/2 g_{bd} tr Ups) is used.
pub fn einstein_residual(
    m: &DMetric,
    src: &SourceSpec,
    p: Point,
) -> Result<TensorComponents> {
    let cur = curvature(m, p, Flavor::Canonical)?;
    let d = m.nadapted_diag(p)?;
    let mut t = TensorComponents::zeros(&[Variance::Co, Variance::Co]);
    if let Some(lambda) = src.lambda {
        for al in 0..4 {
            for be in 0..4 {
                let g = if al == be { d[al] } else { 0.0 };
                t.set(&[al, be], cur.ricci[al][be] - lambda * g);
            }
        }
        return Ok(t);
    }
    // general diagonal source: Ups^al_be = diag(u2, u2, u4, u4),
    // R_{bd} = Ups_{bd} - 1/2 g_{bd} (2 u2 + 2 u4)
    let u2 = src.upsilon2.eval(p)?;
    let u4 = src.upsilon4.eval(p)?;
    let mixed = [u2, u2, u4, u4];
    for al in 0..4 {
        for be in 0..4 {
            let g = if al == be { d[al] } else { 0.0 };
            let rhs = if al == be { mixed[al] * g } else { 0.0 } - g * (u2 + u4);
            t.set(&[al, be], cur.ricci[al][be] - rhs);
        }
    }
    Ok(t)
}
