//! The case k = p+2: the matrix Q of φ in the basis (e/X^p, f/X), its
//! trivialization M^{−1}·Q·φ(M) = Q(0), and the scalar action of Γ.

use serde::{Deserialize, Serialize};

use super::reduce::{ResVec, ResWach};
use crate::error::{Error, Result};
use crate::padic::coeff::Coeff;
use crate::padic::fq::{Fq, FqField};
use crate::padic::matrix::{const_det, const_inverse, const_mul};
use crate::padic::ops::{frobenius_phi, gamma_of_x, GammaExp, PowerTable};
use crate::padic::series::{Series, EXACT};
use crate::ResMat;

/// Coordinates in (e/X^p, f/X) of a vector given in (e, f).
fn to_b_basis(v: &ResVec, p: i64) -> ResVec {
    [v[0].mul_x_pow(p), v[1].mul_x_pow(1)]
}

/// Q = [[0, −1], [1, β·u]].
pub fn build_q_kp2(res: &ResWach) -> Result<ResMat> {
    let p = res.p as i64;
    if res.k as i64 != p + 2 {
        return Err(Error::OutOfScope(format!("Q is defined for k = p+2, got k = {}", res.k)));
    }
    let f = &res.field;
    let q = ResMat::new(
        Series::zero(f, EXACT),
        Series::constant(f.elem(-1)),
        Series::one(f),
        res.ubar.scale(&res.beta),
    );
    // Cross-check against φ of the basis vectors computed in (e, f).
    let b1 = [Series::monomial(f.elem(1), -p), Series::zero(f, EXACT)];
    let b2 = [Series::zero(f, EXACT), Series::monomial(f.elem(1), -1)];
    let c1 = to_b_basis(&res.phi_vec(&b1)?, p);
    let c2 = to_b_basis(&res.phi_vec(&b2)?, p);
    let from_phi = ResMat::new(c1[0].clone(), c2[0].clone(), c1[1].clone(), c2[1].clone());
    if !from_phi.same_value(&q) {
        return Err(Error::check("matrix Q", "φ of (e/X^p, f/X) disagrees with Q"));
    }
    let q0 = q.at_zero();
    let want = [f.elem(0), f.elem(-1), f.elem(1), res.beta];
    if q0 != want || const_det(&q0) != f.elem(1) {
        return Err(Error::check("Q(0)", format!("Q(0) = {q0:?}")));
    }
    Ok(q)
}

/// M ∈ 1 + X·M₂(F[[X]]) with Q·φ(M) = M·Q(0), known modulo X^mx, from
/// M_i = (Σ_{j ≤ i/p} Q_{i−pj}·M_j)·Q₀^{−1}.
pub fn dwork_trivialize(q: &ResMat, mx: i64) -> Result<ResMat> {
    let f = *q.ctx();
    let p = f.p() as i64;
    let q0 = q.coeff_at(0);
    let q0_inv = const_inverse(&q0)
        .map_err(|_| Error::NotUnit("det Q(0) is not a unit".into()))?;
    if q.prec() < mx {
        return Err(Error::Precision(format!(
            "Q is known below X^{} only, X^{mx} requested",
            q.prec()
        )));
    }
    let zero = Fq::zero(&f);
    let mut ms: Vec<[Fq; 4]> = vec![[Fq::one(&f), zero, zero, Fq::one(&f)]];
    for i in 1..mx {
        let mut acc = [zero; 4];
        let mut j = 0;
        while p * j <= i {
            let t = const_mul(&q.coeff_at(i - p * j), &ms[j as usize]);
            for (a, b) in acc.iter_mut().zip(t) {
                *a = a.plus(&b);
            }
            j += 1;
        }
        ms.push(const_mul(&acc, &q0_inv));
    }
    let entry = |r: usize| Series::new(&f, 0, ms.iter().map(|m| m[r]).collect(), mx);
    let m = ResMat::new(entry(0), entry(1), entry(2), entry(3));
    let lhs = m.inverse()?.mul_to(&q.mul_to(&phi_mat(&m)?, mx), mx);
    if !lhs.same_value(&ResMat::from_const(&q0).truncate(mx)) {
        return Err(Error::check(
            "Dwork trivialization",
            format!("M^{{-1}}·Q·φ(M) ≠ Q(0) below X^{}", lhs.agreement(&ResMat::from_const(&q0))),
        ));
    }
    Ok(m)
}

fn phi_mat(m: &ResMat) -> Result<ResMat> {
    m.try_map(frobenius_phi)
}

/// Eigen-data of Q(0) = [[0, −1], [1, β]].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConstEigen {
    /// Roots of x² − βx + 1, as coordinate strings in `field_degree`.
    pub lambda: String,
    pub lambda_inv: String,
    pub field_degree: u8,
    pub double_root: bool,
    /// Minimal polynomial of λ over F_p, low degree first.
    pub min_poly: Vec<u64>,
    #[serde(skip)]
    pub roots: Vec<Fq>,
    /// Columns: an eigenvector for λ and either one for λ^{−1} or a
    /// generalized eigenvector when the root is double.
    #[serde(skip)]
    pub basis: [Fq; 4],
}

impl ConstEigen {
    pub fn lambda_value(&self) -> Fq {
        self.roots[0]
    }

    pub fn lambda_inv_value(&self) -> Fq {
        self.roots[1]
    }
}

/// Roots of x² − βx + 1, in F_p when β² − 4 is a square and in F_{p²}
/// otherwise, together with an (generalized) eigenbasis.
pub fn diagonalize_const(q0: &[Fq; 4], beta: &Fq) -> Result<ConstEigen> {
    let p = beta.field().p();
    let f1 = FqField::prime_field(p);
    let want = [f1.elem(0), f1.elem(-1), f1.elem(1), *beta];
    if *q0 != want {
        return Err(Error::InvalidInput(format!("Q(0) = {q0:?} is not [[0,−1],[1,β]]")));
    }
    let roots = Fq::quadratic_roots(beta.negate(), Fq::one(&f1));
    let in_fp = roots.iter().all(|r| r.in_prime_field());
    let field = if in_fp { f1 } else { FqField::quadratic(p) };
    let roots: Vec<Fq> = roots
        .iter()
        .map(|r| if in_fp { f1.elem(r.coords().0 as i64) } else { *r })
        .collect();
    let lambda = roots[0];
    let lambda_inv = lambda.inverse()?;
    let double = roots.len() == 1 || roots[0] == roots[1];
    let one = Fq::one(&field);
    let basis = if double {
        [one, Fq::zero(&field), lambda.negate(), one.negate()]
    } else {
        [one, one, lambda.negate(), lambda_inv.negate()]
    };
    let qf = q0.map(|c| c.embed(field));
    let jordan = if double {
        [lambda, one, Fq::zero(&field), lambda]
    } else {
        [lambda, Fq::zero(&field), Fq::zero(&field), lambda_inv]
    };
    if const_mul(&qf, &basis) != const_mul(&basis, &jordan) {
        return Err(Error::check("eigenbasis of Q(0)", "Q(0)·B ≠ B·J"));
    }
    Ok(ConstEigen {
        lambda: lambda.to_coord_string(),
        lambda_inv: lambda_inv.to_coord_string(),
        field_degree: field.degree(),
        double_root: double,
        min_poly: lambda.min_poly(),
        roots: vec![lambda, lambda_inv],
        basis,
    })
}

/// Outcome of the scalar check for one generator.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScalarCheck {
    pub gamma: i64,
    /// ω(γ)^{−1} as a residue.
    pub scalar: u64,
    pub checked_precision: i64,
}

/// Matrix of γ_a in the basis (e/X^p, f/X).
pub fn gamma_matrix_b(res: &ResWach, a: i64, g: &ResMat) -> Result<ResMat> {
    let f = res.field;
    let p = res.p;
    let mx = res.mx;
    let gx = gamma_of_x::<Fq>(&f, &GammaExp::exact(a), mx + 2)?;
    // r = X/γ(X), a unit.
    let r = gx.inverse_to(mx - 1)?.mul_x_pow(1).truncate(mx);
    let rp = r.pow(p as u32).truncate(mx);
    let shift = p as i64 - 1;
    Ok(ResMat::new(
        g.get(0, 0).mul_to(&rp, mx),
        g.get(0, 1).mul_to(&r, mx).mul_x_pow(shift),
        g.get(1, 0).mul_to(&rp, mx).mul_x_pow(-shift),
        g.get(1, 1).mul_to(&r, mx),
    ))
}

/// In the basis (e/X^p, f/X)·M every generator must act by ω(γ)^{−1}.
pub fn gamma_scalar_check(res: &ResWach, m: &ResMat, eig: &ConstEigen) -> Result<Vec<ScalarCheck>> {
    let f = res.field;
    let mx = res.mx;
    let m_inv = m.inverse()?;
    let mut out = Vec::new();
    for (a, g) in &res.gbar {
        let c = gamma_matrix_b(res, *a, g)?;
        let w = res.omega(*a).inverse()?;
        let c0 = c.truncate(1);
        if !c0.same_value(&ResMat::scalar(w).truncate(1)) {
            return Err(Error::check(
                "gamma constant term",
                format!("C_{a}(0) is not ω(γ)^-1·Id"),
            ));
        }
        let gx = gamma_of_x::<Fq>(&f, &GammaExp::exact(*a), mx + 2)?;
        let table = PowerTable::new(&gx, mx, 0)?;
        let gm = m.try_map(|s| table.apply(s))?;
        let n = m_inv.mul_to(&c.mul_to(&gm, mx), mx);
        let want = ResMat::scalar(w);
        if !n.same_value(&want) {
            return Err(Error::check(
                "gamma scalar",
                format!("γ_{a} is not scalar below X^{}", n.agreement(&want)),
            ));
        }
        // Final basis (e/X^p, f/X)·M·B with B the constant eigenbasis.
        let bf = eig.basis[0].field();
        let nb = n.try_map_to(|s| Ok(s.map(&bf, |c| c.embed(bf))))?;
        let b = ResMat::from_const(&eig.basis);
        let b_inv = ResMat::from_const(&const_inverse(&eig.basis)?);
        let fin = b_inv.mul_to(&nb.mul_to(&b, mx), mx);
        if !fin.same_value(&ResMat::scalar(w.embed(bf))) {
            return Err(Error::check(
                "gamma scalar",
                format!("γ_{a} is not scalar in the eigenbasis"),
            ));
        }
        out.push(ScalarCheck {
            gamma: *a,
            scalar: w.as_prime().unwrap_or(0),
            checked_precision: n.prec(),
        });
    }
    Ok(out)
}

/// Series helper used by tests: M ≡ 1 mod X.
pub fn is_identity_mod_x(m: &ResMat) -> bool {
    let f = *m.ctx();
    m.truncate(1).same_value(&ResMat::identity(&f).truncate(1))
}
