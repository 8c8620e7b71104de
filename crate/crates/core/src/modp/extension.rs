//! The case k = p+3, λ = ±1: matrices of φ and γ in the basis
//! (δ, e/(z·X^{p+1})), the residue criterion and the ψ-cokernel test.

use serde::{Deserialize, Serialize};

use super::line::{delta_coords, CharWitness};
use super::reduce::{ResVec, ResWach};
use crate::error::{Error, Result};
use crate::padic::coeff::Coeff;
use crate::padic::fq::Fq;
use crate::padic::json::mat_to_json;
use crate::padic::ops::{frobenius_phi, psi};
use crate::padic::series::Series;
use crate::{ResMat, ResSeries};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Ramification {
    #[serde(rename = "peu")]
    Peu,
    #[serde(rename = "très")]
    Tres,
}

impl std::fmt::Display for Ramification {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Ramification::Peu => "peu",
            Ramification::Tres => "très",
        })
    }
}

/// The rank-one line on which the cokernel of ψ − 1 is tested: ψ acts by
/// f·δ′ ↦ psi_scale·ψ(f)·δ′.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LineModel {
    pub name: String,
    pub psi_scale: u64,
    /// Initial pole budget B of the truncation window.
    pub pole_budget: i64,
    pub max_windows: usize,
}

impl LineModel {
    /// The δ-line twisted by ω²μ_λ: φ and hence ψ act trivially on δ′.
    pub fn twisted_delta(p: u64) -> Self {
        LineModel {
            name: "delta line twisted by omega^2 mu_lambda".into(),
            psi_scale: 1,
            pole_budget: p as i64 + 2,
            max_windows: 8,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WindowVerdict {
    /// Window [X^{−poles}, X^{upto}).
    pub poles: i64,
    pub upto: i64,
    pub in_image: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CokernelVerdict {
    pub nontrivial: bool,
    pub windows: Vec<WindowVerdict>,
    pub model: LineModel,
}

/// Whether w ≡ (c·ψ − 1)(g) modulo X^upto for some g supported on
/// [X^{−poles}, X^{p·upto}), decided by Gaussian elimination.
pub fn in_psi_image(w: &ResSeries, c: &Fq, poles: i64, upto: i64) -> Result<bool> {
    let f = *w.ctx();
    let p = f.p() as i64;
    if !w.is_zero() && w.low() < -poles {
        return Err(Error::Precision(format!(
            "pole order {} exceeds the window's {poles}",
            -w.low()
        )));
    }
    if upto > w.prec() {
        return Err(Error::Precision(format!(
            "window X^{upto} exceeds the known precision X^{}",
            w.prec()
        )));
    }
    let rows = (upto + poles) as usize;
    let cols = (p * upto + poles) as usize;
    let zero = Fq::zero(&f);
    let mut a = vec![vec![zero; cols + 1]; rows];
    for n in -poles..p * upto {
        let col = (n + poles) as usize;
        if n < upto {
            let r = (n + poles) as usize;
            a[r][col] = a[r][col].minus(&Fq::one(&f));
        }
        // ψ(X^{pm+r}) = (−1)^r X^m
        let m = n.div_euclid(p);
        let r = n.rem_euclid(p);
        if m >= -poles && m < upto {
            let row = (m + poles) as usize;
            let s = if r % 2 == 0 { *c } else { c.negate() };
            a[row][col] = a[row][col].plus(&s);
        }
    }
    for m in -poles..upto {
        a[(m + poles) as usize][cols] = w.coeff(m);
    }
    Ok(consistent(a, cols))
}

/// Row-reduces an augmented matrix and reports whether it is consistent.
fn consistent(mut a: Vec<Vec<Fq>>, cols: usize) -> bool {
    let rows = a.len();
    let mut r = 0;
    for col in 0..cols {
        let Some(piv) = (r..rows).find(|&i| !a[i][col].is_zero()) else {
            continue;
        };
        a.swap(r, piv);
        let inv = a[r][col].inverse().expect("nonzero pivot");
        for j in col..=cols {
            a[r][j] = a[r][j].times(&inv);
        }
        for i in 0..rows {
            if i != r && !a[i][col].is_zero() {
                let fct = a[i][col];
                for j in col..=cols {
                    let t = a[r][j].times(&fct);
                    a[i][j] = a[i][j].minus(&t);
                }
            }
        }
        r += 1;
        if r == rows {
            break;
        }
    }
    a[r..].iter().all(|row| row[cols].is_zero())
}

/// Decides whether −ψ(x_entry) is nonzero in the cokernel of ψ − 1 on the
/// line model, enlarging the window until two consecutive enlargements
/// agree.
pub fn psi_cokernel_witness(x_entry: &ResSeries, model: &LineModel) -> Result<CokernelVerdict> {
    let f = *x_entry.ctx();
    let p = f.p() as i64;
    let c = f.elem(model.psi_scale as i64);
    let w = psi(x_entry)?.scale(&c).neg();
    let wprec = w.prec().min(4 * p * p);
    if wprec < 1 {
        return Err(Error::Precision("ψ(x) is known below X^0 only".into()));
    }
    let mut windows: Vec<WindowVerdict> = Vec::new();
    for t in 0..model.max_windows as i64 {
        let poles = model.pole_budget + t * p;
        let upto = (t + 1).min(wprec);
        let in_image = in_psi_image(&w, &c, poles, upto)?;
        windows.push(WindowVerdict {
            poles,
            upto,
            in_image,
        });
        let n = windows.len();
        if n >= 3 && windows[n - 3..].iter().all(|v| v.in_image == in_image) {
            return Ok(CokernelVerdict {
                nontrivial: !in_image,
                windows,
                model: model.clone(),
            });
        }
    }
    Err(Error::check(
        "psi cokernel",
        format!(
            "inconclusive: verdict not stable over {} windows",
            model.max_windows
        ),
    ))
}

/// ℓ(f) = Σ_{j≥1} (−1)^{j−1}·a_{−j}, a linear form killing the image of ψ − 1.
pub fn pole_functional(f: &ResSeries) -> Fq {
    let field = *f.ctx();
    let mut acc = Fq::zero(&field);
    for j in 1..=(-f.low()).max(0) {
        let a = f.coeff(-j);
        acc = if j % 2 == 1 { acc.plus(&a) } else { acc.minus(&a) };
    }
    acc
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExtensionData {
    pub lambda: Fq,
    /// Matrix of φ in (δ, w), columns are images.
    pub mat_phi: ResMat,
    pub mat_gamma: Vec<(i64, ResMat)>,
    /// Coefficient of X^{−1} in the off-diagonal γ-entries.
    pub residues: Vec<(i64, Fq)>,
    pub ramification: Ramification,
    pub nontrivial: bool,
    pub cokernel: CokernelVerdict,
    pub sub: CharWitness,
}

impl ExtensionData {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "lambda": self.lambda.to_coord_string(),
            "mat_phi": mat_to_json(&self.mat_phi),
            "mat_gamma": self.mat_gamma.iter().map(|(a, m)| serde_json::json!({
                "gamma": a, "matrix": mat_to_json(m)
            })).collect::<Vec<_>>(),
            "residues": self.residues.iter().map(|(a, r)| serde_json::json!({
                "gamma": a, "residue": r.to_coord_string()
            })).collect::<Vec<_>>(),
            "ramification": self.ramification,
            "nontrivial": self.nontrivial,
            "cokernel": self.cokernel,
            "sub": self.sub.to_json(),
        })
    }
}

/// Coordinates (A, B) with v = A·δ + B·w, w = e/(z·X^{p+1}).
struct DwBasis {
    p: i64,
    z: ResSeries,
    x: ResSeries,
}

impl DwBasis {
    fn coords(&self, v: &ResVec) -> Result<[ResSeries; 2]> {
        let a = v[1].mul_x_pow(1).div(&self.z)?;
        let b = v[0]
            .sub(&a.mul(&self.x))
            .mul(&self.z)
            .mul_x_pow(self.p + 1);
        Ok([a, b])
    }
}

fn is_const(s: &ResSeries, c: &Fq) -> bool {
    s.sub(&Series::constant(*c)).is_zero()
}

/// Extension data for k = p+3 and λ = ±1.
pub fn extension_data(res: &ResWach, z: &ResSeries, lambda: &Fq) -> Result<ExtensionData> {
    let p = res.p as i64;
    let f = res.field;
    if res.k as i64 != p + 3 {
        return Err(Error::OutOfScope(format!("extension data needs k = p+3, got {}", res.k)));
    }
    if *lambda != f.elem(1) && *lambda != f.elem(-1) {
        return Err(Error::OutOfScope(format!("extension data needs λ = ±1, got {lambda}")));
    }
    let sub = super::line::delta_line(res, z, lambda)?;
    let delta = delta_coords(z, lambda)?;
    let basis = DwBasis {
        p,
        z: z.clone(),
        x: delta[0].clone(),
    };
    let w_vec: ResVec = [
        z.inverse()?.mul_x_pow(-(p + 1)),
        Series::zero(&f, z.prec()),
    ];
    let lam_inv = lambda.inverse()?;

    // φ(δ) = λδ, φ(w) = A·δ + λ^{−1}w.
    let pd = basis.coords(&res.phi_vec(&delta)?)?;
    let pw = basis.coords(&res.phi_vec(&w_vec)?)?;
    if !is_const(&pd[0], lambda) || !pd[1].is_zero() {
        return Err(Error::check("Mat(phi) column 1", "φ(δ) ≠ λδ"));
    }
    if !is_const(&pw[1], &lam_inv) {
        return Err(Error::check("Mat(phi) diagonal", "φ(w) has w-coordinate ≠ λ^{-1}"));
    }
    let closed = z
        .mul(&frobenius_phi(z)?)
        .mul_x_pow(1)
        .inverse()?;
    if !pw[0].sub(&closed).is_zero() {
        return Err(Error::check(
            "Mat(phi) off-diagonal",
            "entry differs from X^{-1}/(z·φ(z))",
        ));
    }
    if pw[0].valuation() != Some(-1) || pw[0].coeff(-1) != Fq::one(&f) {
        return Err(Error::check(
            "Mat(phi) off-diagonal",
            "leading Laurent coefficient must be 1 at X^{-1}",
        ));
    }
    let mat_phi = ResMat::new(
        Series::constant(*lambda),
        pw[0].clone(),
        Series::zero(&f, pw[1].prec()),
        pw[1].clone(),
    );

    let target = res.mx;
    let mut mat_gamma = Vec::new();
    let mut residues = Vec::new();
    for (a, _) in &res.gbar {
        let om = res.omega(*a).inverse()?;
        let om2 = om.times(&om);
        let gd = basis.coords(&res.gamma_vec(*a, &delta, target)?)?;
        let gw = basis.coords(&res.gamma_vec(*a, &w_vec, target)?)?;
        if !is_const(&gd[0], &om) || !gd[1].is_zero() {
            return Err(Error::check("Mat(gamma) column 1", format!("γ_{a}(δ) ≠ ω^-1·δ")));
        }
        if !is_const(&gw[1], &om2) {
            return Err(Error::check("Mat(gamma) diagonal", format!("γ_{a}(w) has w-coordinate ≠ ω^-2")));
        }
        let v = gw[0].valuation().unwrap_or(gw[0].prec());
        if v < 2 {
            return Err(Error::check(
                "Mat(gamma) off-diagonal",
                format!("X-valuation {v} < 2 for γ_{a}"),
            ));
        }
        residues.push((*a, gw[0].coeff(-1)));
        mat_gamma.push((
            *a,
            ResMat::new(
                gd[0].clone(),
                gw[0].clone(),
                Series::zero(&f, gd[1].prec()),
                gw[1].clone(),
            ),
        ));
    }
    let ramification = if residues.iter().all(|(_, r)| r.is_zero()) {
        Ramification::Peu
    } else {
        Ramification::Tres
    };
    let cokernel = psi_cokernel_witness(&pw[0], &LineModel::twisted_delta(res.p))?;
    Ok(ExtensionData {
        lambda: *lambda,
        mat_phi,
        mat_gamma,
        residues,
        ramification,
        nontrivial: cokernel.nontrivial,
        cokernel,
        sub,
    })
}
