//! Antisymmetric forms, wedge/contraction algebra, the completely
//! antisymmetric torsion 3-forms and the torsion-modified exterior calculus
//! with the closed conformal Killing-Yano checks.

use super::geometry::MatrixMetric;
use crate::error::{Error, Result};
use crate::families::kerr_sen::KerrSenPrimary;
use crate::field::{Field, Point};
use crate::jet::Jet;
use crate::linalg::{mat_inv, Mat4};
use crate::solution::PolarizationSet;
use crate::tensor::TensorComponents;

/// Which basis a form's components refer to.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Basis {
    Coordinate,
    /// The orthonormal coframe with Gram diag(1, 1, 1, -1).
    Orthonormal,
}

/// Antisymmetric tensor of fixed degree with dense components.
#[derive(Clone, Debug)]
pub struct PForm {
    pub degree: usize,
    pub basis: Basis,
    comps: Vec<f64>,
}

fn flat_index(idx: &[usize]) -> usize {
    idx.iter().fold(0, |acc, &i| acc * 4 + i)
}

impl PForm {
    pub fn zero(degree: usize, basis: Basis) -> PForm {
        debug_assert!(degree <= 4);
        PForm {
            degree,
            basis,
            comps: vec![0.0; 4usize.pow(degree as u32)],
        }
    }

    pub fn scalar(v: f64, basis: Basis) -> PForm {
        PForm {
            degree: 0,
            basis,
            comps: vec![v],
        }
    }

    /// A coordinate/coframe basis k-form e^{i1} ^ ... ^ e^{ik} (unit
    /// coefficient), stamped antisymmetrically.
    pub fn basis_form(indices: &[usize], basis: Basis) -> PForm {
        let mut f = PForm::zero(indices.len(), basis);
        f.antisym_set(indices, 1.0);
        f
    }

    pub fn get(&self, idx: &[usize]) -> f64 {
        debug_assert_eq!(idx.len(), self.degree);
        self.comps[flat_index(idx)]
    }

    pub fn set_raw(&mut self, idx: &[usize], v: f64) {
        let k = flat_index(idx);
        self.comps[k] = v;
    }

    /// Set A_{idx} = v and every permutation with its sign.
    pub fn antisym_set(&mut self, idx: &[usize], v: f64) {
        let mut perm: Vec<usize> = (0..self.degree).collect();
        loop {
            let sigma: Vec<usize> = perm.iter().map(|&s| idx[s]).collect();
            self.set_raw(&sigma, perm_sign(&perm) * v);
            if !next_permutation(&mut perm) {
                break;
            }
        }
    }

    pub fn add(&self, o: &PForm) -> PForm {
        debug_assert_eq!(self.degree, o.degree);
        debug_assert_eq!(self.basis, o.basis);
        let mut out = self.clone();
        for (a, b) in out.comps.iter_mut().zip(o.comps.iter()) {
            *a += b;
        }
        out
    }

    pub fn sub(&self, o: &PForm) -> PForm {
        self.add(&o.scale(-1.0))
    }

    pub fn scale(&self, s: f64) -> PForm {
        let mut out = self.clone();
        for a in out.comps.iter_mut() {
            *a *= s;
        }
        out
    }

    pub fn max_abs(&self) -> f64 {
        self.comps.iter().fold(0.0f64, |m, &x| m.max(x.abs()))
    }

    pub fn antisymmetry_defect(&self) -> f64 {
        if self.degree < 2 {
            return 0.0;
        }
        let mut t = TensorComponents::zeros(&vec![crate::tensor::Variance::Co; self.degree]);
        for idx in TensorComponents::indices(self.degree) {
            t.set(&idx, self.get(&idx));
        }
        t.antisymmetry_defect()
    }

    /// Interior product with a vector (components in the same basis).
    pub fn interior(&self, v: &[f64; 4]) -> PForm {
        debug_assert!(self.degree >= 1);
        let mut out = PForm::zero(self.degree - 1, self.basis);
        for idx in TensorComponents::indices(self.degree - 1) {
            let mut s = 0.0;
            for (j, vj) in v.iter().enumerate() {
                if *vj != 0.0 {
                    let mut full = Vec::with_capacity(self.degree);
                    full.push(j);
                    full.extend_from_slice(&idx);
                    s += vj * self.get(&full);
                }
            }
            out.set_raw(&idx, s);
        }
        out
    }

    /// Wedge product over (p, q)-shuffles.
    pub fn wedge(&self, o: &PForm) -> PForm {
        debug_assert_eq!(self.basis, o.basis);
        let (p, q) = (self.degree, o.degree);
        let n = p + q;
        debug_assert!(n <= 4);
        let mut out = PForm::zero(n, self.basis);
        if p == 0 {
            return o.scale(self.comps[0]);
        }
        if q == 0 {
            return self.scale(o.comps[0]);
        }
        for idx in TensorComponents::indices(n) {
            let mut s = 0.0;
            for subset in subsets_of_size(n, p) {
                let mut left = Vec::with_capacity(p);
                let mut right = Vec::with_capacity(q);
                let mut sign = 1.0;
                // shuffle sign: count inversions of the (subset, complement) order
                let mut taken = vec![false; n];
                for &s_i in &subset {
                    taken[s_i] = true;
                }
                let mut crossings = 0usize;
                let mut seen_right = 0usize;
                for (pos, &t) in taken.iter().enumerate() {
                    if t {
                        crossings += seen_right;
                        left.push(idx[pos]);
                    } else {
                        seen_right += 1;
                        right.push(idx[pos]);
                    }
                }
                // crossings counted as right-elements before left-elements
                if crossings % 2 == 1 {
                    sign = -1.0;
                }
                s += sign * self.get(&left) * o.get(&right);
            }
            out.set_raw(&idx, s);
        }
        out
    }

    /// Convert components to the coordinate basis given the coframe rows
    /// C[alpha][mu] (the 1-form components of the orthonormal coframe).
    pub fn to_coordinate(&self, coframe: &Mat4) -> PForm {
        debug_assert_eq!(self.basis, Basis::Orthonormal);
        let mut out = PForm::zero(self.degree, Basis::Coordinate);
        for idx in TensorComponents::indices(self.degree) {
            let mut s = 0.0;
            for src in TensorComponents::indices(self.degree) {
                let mut w = self.get(&src);
                if w == 0.0 {
                    continue;
                }
                for (slot, &mu) in idx.iter().enumerate() {
                    w *= coframe[src[slot]][mu];
                }
                s += w;
            }
            out.set_raw(&idx, s);
        }
        out
    }

    /// Convert coordinate components to the orthonormal basis.
    pub fn to_orthonormal(&self, coframe: &Mat4) -> Result<PForm> {
        debug_assert_eq!(self.basis, Basis::Coordinate);
        // frame rows F[alpha][mu] with sum_mu C[alpha][mu] F[beta][mu] = delta
        let cinv = mat_inv(coframe)?;
        let mut out = PForm::zero(self.degree, Basis::Orthonormal);
        for idx in TensorComponents::indices(self.degree) {
            let mut s = 0.0;
            for src in TensorComponents::indices(self.degree) {
                let mut w = self.get(&src);
                if w == 0.0 {
                    continue;
                }
                for (slot, &al) in idx.iter().enumerate() {
                    w *= cinv[src[slot]][al];
                }
                s += w;
            }
            out.set_raw(&idx, s);
        }
        Ok(out)
    }
}

fn perm_sign(perm: &[usize]) -> f64 {
    let mut inv = 0usize;
    for i in 0..perm.len() {
        for j in (i + 1)..perm.len() {
            if perm[i] > perm[j] {
                inv += 1;
            }
        }
    }
    if inv % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

fn next_permutation(p: &mut [usize]) -> bool {
    let n = p.len();
    if n < 2 {
        return false;
    }
    let mut i = n - 1;
    while i > 0 && p[i - 1] >= p[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = n - 1;
    while p[j] <= p[i - 1] {
        j -= 1;
    }
    p.swap(i - 1, j);
    p[i..].reverse();
    true
}

fn subsets_of_size(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            go(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    go(0, n, k, &mut cur, &mut out);
    out
}

/// k-fold metric contraction wedge: for k = 1,
/// A /\_1 B = sum g^{mn} (i_m A) ^ (i_n B); for k = 2 an extra half times
/// the doubly contracted sum. `ginv` is the inverse metric in the
/// components' basis.
pub fn wedge_contract(a: &PForm, b: &PForm, k: usize, ginv: &Mat4) -> Result<PForm> {
    if a.degree < k || b.degree < k {
        return Err(Error::Unsupported(format!(
            "cannot contract {k} slots of degrees {} and {}",
            a.degree, b.degree
        )));
    }
    debug_assert_eq!(a.basis, b.basis);
    let basis_vec = |m: usize| {
        let mut v = [0.0; 4];
        v[m] = 1.0;
        v
    };
    match k {
        1 => {
            let mut out = PForm::zero(a.degree + b.degree - 2, a.basis);
            for m in 0..4 {
                for n in 0..4 {
                    if ginv[m][n] != 0.0 {
                        let t = a
                            .interior(&basis_vec(m))
                            .wedge(&b.interior(&basis_vec(n)))
                            .scale(ginv[m][n]);
                        out = out.add(&t);
                    }
                }
            }
            Ok(out)
        }
        2 => {
            let mut out = PForm::zero(a.degree + b.degree - 4, a.basis);
            for m in 0..4 {
                for mp in 0..4 {
                    if ginv[m][mp] == 0.0 {
                        continue;
                    }
                    for n in 0..4 {
                        for np in 0..4 {
                            if ginv[n][np] == 0.0 {
                                continue;
                            }
                            // (e_n .| e_m .| A) ^ (e_np .| e_mp .| B)
                            let ia = a.interior(&basis_vec(m)).interior(&basis_vec(n));
                            let ib = b.interior(&basis_vec(mp)).interior(&basis_vec(np));
                            out = out.add(&ia.wedge(&ib).scale(0.5 * ginv[m][mp] * ginv[n][np]));
                        }
                    }
                }
            }
            Ok(out)
        }
        _ => Err(Error::Unsupported(format!("contraction order {k}"))),
    }
}

/// Orthonormal-basis contraction wedge with Gram diag(1, 1, 1, -1).
pub fn wedge_contract_eta(a: &PForm, b: &PForm, k: usize) -> Result<PForm> {
    let eta = [
        [1.0, 0.0, 0.0, 0.0],
        [0.0, 1.0, 0.0, 0.0],
        [0.0, 0.0, 1.0, 0.0],
        [0.0, 0.0, 0.0, -1.0],
    ];
    wedge_contract(a, b, k, &eta)
}

// --------------------------------------------------------- form fields --

/// A form-valued field over the chart: dense coordinate components as jets.
pub struct PFormField {
    pub degree: usize,
    rule: Box<dyn Fn(Point, usize) -> Result<Vec<Jet>> + Sync>,
}

impl PFormField {
    pub fn new<F>(degree: usize, rule: F) -> PFormField
    where
        F: Fn(Point, usize) -> Result<Vec<Jet>> + Sync + 'static,
    {
        PFormField {
            degree,
            rule: Box::new(rule),
        }
    }

    /// A scalar field as a degree-0 form field.
    pub fn from_scalar(f: Field) -> PFormField {
        PFormField::new(0, move |p, order| Ok(vec![f.jet(p, order)?]))
    }

    pub fn comps(&self, p: Point, order: usize) -> Result<Vec<Jet>> {
        (self.rule)(p, order)
    }

    pub fn at(&self, p: Point) -> Result<PForm> {
        let c = self.comps(p, 0)?;
        let mut f = PForm::zero(self.degree, Basis::Coordinate);
        for (k, j) in c.iter().enumerate() {
            f.comps[k] = j.value();
        }
        Ok(f)
    }
}

/// Covariant derivative of a form field along the constant coordinate
/// vector X at p (Levi-Civita of the given geometry).
pub fn covariant_deriv(
    geom: &dyn MatrixMetric,
    x: &[f64; 4],
    psi: &PFormField,
    p: Point,
) -> Result<PForm> {
    let deg = psi.degree;
    let comps = psi.comps(p, 1)?;
    let mut out = PForm::zero(deg, Basis::Coordinate);
    if deg == 0 {
        let mut s = 0.0;
        for (la, xl) in x.iter().enumerate() {
            s += xl * comps[0].d1(la);
        }
        out.comps[0] = s;
        return Ok(out);
    }
    let gamma = geom.christoffel_jets(p, 0)?;
    for idx in TensorComponents::indices(deg) {
        let flat = flat_index(&idx);
        let mut s = 0.0;
        for (la, xl) in x.iter().enumerate() {
            if *xl == 0.0 {
                continue;
            }
            let mut term = comps[flat].d1(la);
            for (slot, &mu) in idx.iter().enumerate() {
                for rho in 0..4 {
                    let mut jdx = idx.clone();
                    jdx[slot] = rho;
                    term -= gamma[rho][mu][la].value() * comps[flat_index(&jdx)].value();
                }
            }
            s += xl * term;
        }
        out.set_raw(&idx, s);
    }
    Ok(out)
}

/// Torsion-modified covariant derivative
/// HD_X Psi = nabla_X Psi + 1/2 (X .| T) /\_1 Psi,
/// with T a completely antisymmetric 3-form (coordinate components) and the
/// contraction taken with the geometry's inverse metric.
pub fn torsion_covariant_derivative(
    geom: &dyn MatrixMetric,
    torsion: &PForm,
    x: &[f64; 4],
    psi: &PFormField,
    p: Point,
) -> Result<PForm> {
    debug_assert_eq!(torsion.basis, Basis::Coordinate);
    let base = covariant_deriv(geom, x, psi, p)?;
    if psi.degree == 0 {
        // contraction of a 2-form against a scalar annihilates
        return Ok(base);
    }
    let ginv = geom.inverse_metric(p)?;
    let xt = torsion.interior(x);
    let corr = wedge_contract(&xt, &psi.at(p)?, 1, &ginv)?;
    Ok(base.add(&corr.scale(0.5)))
}

/// Frame-sum exterior derivative and codifferential with torsion:
/// (H d Psi, H d* Psi) = (sum_mu dx^mu ^ HD_mu Psi,
///                        -sum g^{mn} i_m HD_n Psi).
pub fn torsion_d_star(
    geom: &dyn MatrixMetric,
    torsion: &PForm,
    psi: &PFormField,
    p: Point,
) -> Result<(PForm, PForm)> {
    let ginv = geom.inverse_metric(p)?;
    let mut d = PForm::zero(psi.degree + 1, Basis::Coordinate);
    let mut dstar = if psi.degree == 0 {
        PForm::zero(0, Basis::Coordinate)
    } else {
        PForm::zero(psi.degree - 1, Basis::Coordinate)
    };
    for mu in 0..4 {
        let mut x = [0.0; 4];
        x[mu] = 1.0;
        let hd = torsion_covariant_derivative(geom, torsion, &x, psi, p)?;
        let dxmu = PForm::basis_form(&[mu], Basis::Coordinate);
        d = d.add(&dxmu.wedge(&hd));
        if psi.degree >= 1 {
            for nu in 0..4 {
                if ginv[nu][mu] != 0.0 {
                    let mut e = [0.0; 4];
                    e[nu] = 1.0;
                    dstar = dstar.add(&hd.interior(&e).scale(-ginv[nu][mu]));
                }
            }
        }
    }
    Ok((d, dstar))
}

/// Residual of the closed conformal Killing-Yano condition for a 2-form
/// field h: max over the orthonormal frame directions X of
/// | HD_X h - X_flat ^ xi |, xi = -1/3 Hd*(h).
pub fn cky_residual(
    geom: &dyn MatrixMetric,
    h2: &PFormField,
    torsion: &PForm,
    frame_rows: &Mat4,
    p: Point,
) -> Result<f64> {
    let (_, dstar) = torsion_d_star(geom, torsion, h2, p)?;
    let xi = dstar.scale(-1.0 / 3.0);
    let g = geom.metric(p)?;
    let mut worst = 0.0f64;
    for x in frame_rows.iter() {
        let hd = torsion_covariant_derivative(geom, torsion, x, h2, p)?;
        // X flat
        let mut xf = PForm::zero(1, Basis::Coordinate);
        for mu in 0..4 {
            let mut s = 0.0;
            for (nu, xv) in x.iter().enumerate() {
                s += g[mu][nu] * xv;
            }
            xf.set_raw(&[mu], s);
        }
        let res = hd.sub(&xf.wedge(&xi));
        worst = worst.max(res.max_abs());
    }
    Ok(worst)
}

// ------------------------------------------------------------ H-torsion --

/// The completely antisymmetric torsion candidate of the twisted rotating
/// geometry: HT = tr e^{234} + tl e^{124} in the orthonormal coframe.
#[derive(Clone, Debug)]
pub struct HTorsion {
    /// Coefficient of e^{124}.
    pub t_left: f64,
    /// Coefficient of e^{234}.
    pub t_right: f64,
    pub sign: i8,
    pub as_3form: PForm,
}

/// H-torsion scalars and 3-form at a point of the twisted-black-hole chart.
pub fn h_torsion(ks: &KerrSenPrimary, p: Point, sign: i8) -> Result<HTorsion> {
    let a = ks.params.spin;
    let b = ks.params.twist;
    let theta = p[1];
    if theta.sin().abs() < 1e-12 {
        return Err(Error::Branch("H-torsion is singular on the axis".into()));
    }
    let r = ks.r_of_xt(p[0])?;
    let rho2 = ks.rho2().eval(p)?;
    let rhob2 = ks.rhob2().eval(p)?;
    let s0 = ks.s0().eval(p)?;
    let sg = sign as f64;
    let t_left = -2.0 * a * theta.sin() * (-(r + b) / rhob2 + sg * r / rho2);
    let t_right =
        -2.0 * a * theta.cos() * s0.abs().sqrt() / rho2.sqrt() * (-1.0 / rhob2 + sg / rho2);
    let mut f = PForm::zero(3, Basis::Orthonormal);
    f.antisym_set(&[1, 2, 3], t_right);
    let mut g = PForm::zero(3, Basis::Orthonormal);
    g.antisym_set(&[0, 1, 3], t_left);
    let as_3form = f.add(&g);
    Ok(HTorsion {
        t_left,
        t_right,
        sign,
        as_3form,
    })
}

/// The H-torsion as a coordinate 3-form at a point (converted through the
/// polarized orthonormal coframe).
pub fn h_torsion_coordinate(
    ks: &KerrSenPrimary,
    pol: &PolarizationSet,
    p: Point,
    sign: i8,
) -> Result<PForm> {
    let ht = h_torsion(ks, p, sign)?;
    let e = ks.coframe_jets(pol, None, p, 0)?;
    let mut rows = [[0.0; 4]; 4];
    for (r, row) in rows.iter_mut().enumerate() {
        for (c, cell) in row.iter_mut().enumerate() {
            *cell = e[r][c].value();
        }
    }
    Ok(ht.as_3form.to_coordinate(&rows))
}
