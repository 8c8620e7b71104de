//! α, P, the initial Γ-matrices and the degree-by-degree solve for G_γ.

use num_bigint::BigInt;

use super::params::WachParams;
use crate::error::{Error, Result};
use crate::padic::coeff::Coeff;
use crate::padic::lambda::{lambda_data, LambdaData};
use crate::padic::ol::{OlElem, OlRing};
use crate::padic::ops::{gamma_act_to, gamma_of_x, phi_of_x, q_series, substitute_to, GammaExp, PowerTable};
use crate::padic::series::{Series, EXACT};
use crate::{OlMat, OlSeries};

/// Extra p-adic digits carried by the λ computation (absorbs the denominator
/// shift of (q₁/p)^{k−1}).
const LAMBDA_GUARD: u32 = 3;

/// Per-generator data that does not depend on a_p.
#[derive(Debug, Clone)]
pub struct GammaTables {
    pub gamma: GammaExp,
    pub table: PowerTable<OlElem>,
    /// γ(q^{k−1}) below X^Mx.
    pub gamma_qk: OlSeries,
    /// diag(g₊^{k−1}, g₋^{k−1}) modulo X^{k−1}.
    pub g_init: OlMat,
    /// φ(G_init) below X^Mx.
    pub phi_g_init: OlMat,
}

/// Everything about (p, E, k, Mx, W, generators) that is independent of a_p.
#[derive(Debug, Clone)]
pub struct WachContext {
    pub p: u64,
    pub k: u32,
    pub mx: i64,
    pub working: u32,
    pub n_target: u32,
    pub ring: OlRing,
    pub lam_ring: OlRing,
    pub lambda: LambdaData,
    /// Truncation of (λ₋/λ₊)^{k−1} to degree ≤ k−2, in lam_ring, with shift.
    pub ratio_trunc: OlSeries,
    pub phi_table: PowerTable<OlElem>,
    /// q^{k−1} below X^Mx.
    pub qk: OlSeries,
    pub gammas: Vec<GammaTables>,
    pub budget: u32,
}

fn to_ring(s: &OlSeries, ring: &OlRing) -> Result<OlSeries> {
    s.try_map(ring, |c| c.change_ring(ring))
}

fn mat_to_ring(m: &OlMat, ring: &OlRing) -> Result<OlMat> {
    m.try_map(|s| to_ring(s, ring))
}

/// h(X) = ((1+X)^a − 1)/X below X^target.
fn h_series(ring: &OlRing, a: &GammaExp, target: i64) -> Result<OlSeries> {
    Ok(gamma_of_x::<OlElem>(ring, a, target + 1)?
        .truncate(target + 1)
        .mul_x_pow(-1))
}

/// g₊^{k−1} and g₋^{k−1} modulo X^{k−1}, computed in the λ ring.
///
/// g₊ = λ₊/γ(λ₊). For g₋ the factor q₁/γ(q₁) is rewritten as h(X)/h(φ(X)),
/// which avoids the denominator of q₁/p altogether.
pub fn initial_gamma_diag(
    lam: &LambdaData,
    ring: &OlRing,
    a: &GammaExp,
) -> Result<(OlSeries, OlSeries)> {
    let t = lam.target;
    let k = lam.k;
    let gp = lam
        .lam_plus
        .mul_to(&gamma_act_to(&lam.lam_plus, a, t)?.inverse()?, t);
    let h = h_series(ring, a, t)?;
    let h_phi = substitute_to(&h, &phi_of_x::<OlElem>(ring), t)?;
    let rest = &lam.lam_minus_rest;
    let g_rest = gamma_act_to(rest, a, t)?;
    let gm = h
        .mul_to(&h_phi.inverse()?, t)
        .mul_to(&rest.mul_to(&g_rest.inverse()?, t), t);
    // Cross-check: g₋·γ(q₁)·γ(λ₋′) = q₁·λ₋′.
    let q1 = q_series::<OlElem>(ring, 1, t);
    let lhs = gm.mul_to(&gamma_act_to(&q1.truncate(t), a, t)?, t).mul_to(&g_rest, t);
    let rhs = q1.mul_to(rest, t);
    if !lhs.same_value(&rhs) {
        return Err(Error::check(
            "g_minus identity",
            format!("g₋·γ(λ₋) ≠ λ₋ below X^{t}"),
        ));
    }
    let check_plus = gp.mul_to(&gamma_act_to(&lam.lam_plus, a, t)?, t);
    if !check_plus.same_value(&lam.lam_plus) {
        return Err(Error::check("g_plus identity", "g₊·γ(λ₊) ≠ λ₊"));
    }
    Ok((gp.pow(k - 1).truncate(t), gm.pow(k - 1).truncate(t)))
}

impl WachContext {
    pub fn new(params: &WachParams) -> Result<Self> {
        Self::with_budget(params, 2)
    }

    pub fn with_budget(params: &WachParams, budget: u32) -> Result<Self> {
        let p = params.p;
        let k = params.k;
        let pk = p as u32;
        if k < pk + 2 || k > 2 * pk - 1 {
            return Err(Error::OutOfScope(format!("k = {k} outside [p+2, 2p−1]")));
        }
        let mx = params.mx;
        let working = params.working();
        let ring = params.ring(working)?;
        let lam_ring = params.ring(working + LAMBDA_GUARD)?;
        let t = (k - 1) as i64;
        let lambda = lambda_data(&lam_ring, k, t, budget)?;
        let ratio_trunc = lambda.ratio.truncate(t);

        let phi_table = PowerTable::new(&phi_of_x::<OlElem>(&ring), mx, 0)?;
        let q = q_series::<OlElem>(&ring, 1, mx + 1);
        let qk = q.truncate(mx).pow(k - 1).truncate(mx);

        let mut gammas = Vec::new();
        for a in params.gammas() {
            let g = gamma_of_x::<OlElem>(&ring, &a, mx + 2)?;
            let table = PowerTable::new(&g, mx, 0)?;
            let gamma_qk = table.apply(&qk)?;
            let (gp, gm) = initial_gamma_diag(&lambda, &lam_ring, &a)?;
            let g_init = mat_to_ring(&OlMat::diag(gp.as_exact(), gm.as_exact()), &ring)?;
            let phi_g_init = g_init.try_map(|s| phi_table.apply(&s.truncate(mx)))?;
            gammas.push(GammaTables {
                gamma: a,
                table,
                gamma_qk,
                g_init,
                phi_g_init,
            });
        }
        Ok(WachContext {
            p,
            k,
            mx,
            working,
            n_target: params.n_target,
            ring,
            lam_ring,
            lambda,
            ratio_trunc,
            phi_table,
            qk,
            gammas,
            budget,
        })
    }

    /// Whether this context can serve `params` (everything but a_p agrees).
    pub fn serves(&self, params: &WachParams) -> bool {
        self.p == params.p
            && self.k == params.k
            && self.mx == params.mx
            && self.working == params.working()
            && self.n_target == params.n_target
            && self.ring.eisenstein() == params.eisenstein.as_slice()
            && self.gammas.len() == params.gamma_gens.len()
            && self
                .gammas
                .iter()
                .zip(&params.gamma_gens)
                .all(|(g, &a)| g.gamma.lift == BigInt::from(a))
    }

    /// α = a_p·(λ₋/λ₊)^{k−1} truncated to degree ≤ k−2, in the working ring.
    pub fn build_alpha(&self, ap: &[BigInt]) -> Result<OlSeries> {
        let ap_l = OlElem::from_coords(&self.lam_ring, ap)?;
        let ap_w = OlElem::from_coords(&self.ring, ap)?;
        let num = self.ratio_trunc.scale(&ap_l);
        let alpha = num
            .div_p_pow(num.shift())
            .map_err(|_| {
                Error::Integrality(format!(
                    "a_p·(λ₋/λ₊)^{} has a non-integral coefficient below X^{}",
                    self.k - 1,
                    self.k - 1
                ))
            })?
            .with_shift(0)
            .as_exact();
        let alpha = to_ring(&alpha, &self.ring)?;
        if alpha.eval0() != ap_w {
            return Err(Error::check("alpha(0) = a_p", format!("α(0) = {:?}", alpha.eval0())));
        }
        Ok(alpha)
    }

    /// P = [[0, −1], [q^{k−1}, α]] below X^Mx.
    pub fn build_p(&self, alpha: &OlSeries) -> OlMat {
        let ring = &self.ring;
        OlMat::new(
            Series::zero(ring, EXACT),
            Series::constant(OlElem::one(ring).negate()),
            self.qk.clone(),
            alpha.clone(),
        )
    }

    /// γ(P) for generator `gi`.
    pub fn gamma_p(&self, gi: usize, alpha: &OlSeries) -> Result<OlMat> {
        let gt = &self.gammas[gi];
        let ring = &self.ring;
        let galpha = gt.table.apply(&alpha.truncate(self.mx))?;
        Ok(OlMat::new(
            Series::zero(ring, EXACT),
            Series::constant(OlElem::one(ring).negate()),
            gt.gamma_qk.clone(),
            galpha,
        ))
    }

    /// Newton-slope precondition: x² − α(0)x + p^{k−1} has slopes {1, k−2}.
    pub fn check_slopes(&self, ap: &OlElem) -> Result<()> {
        let v = ap.valuation().exact();
        if v != Some(num_rational::Ratio::from_integer(1)) || self.k < 4 {
            return Err(Error::check(
                "newton slopes",
                format!("val(α(0)) = {:?}, expected slopes 1 and k−2", ap.valuation()),
            ));
        }
        Ok(())
    }

    /// Solve P·φ(G) = G·γ(P) for generator `gi`, starting from G_init.
    pub fn solve_gamma_matrix(&self, gi: usize, p_mat: &OlMat) -> Result<SolveOutcome> {
        let gt = &self.gammas[gi];
        let mx = self.mx;
        let k = self.k;
        let ring = &self.ring;
        let gp = self.gamma_p(gi, p_mat.get(1, 1))?;
        let mut g = gt.g_init.truncate(mx);
        for s in g.e.iter_mut() {
            *s = s.as_exact();
        }
        let mut delta = g.mul_to(&gp, mx).sub(&p_mat.mul_to(&gt.phi_g_init, mx));
        delta = delta.truncate(mx);
        let mut valid = self.working;
        // Defect vanishes below X^{k−1} by construction of G_init.
        for s in &delta.e {
            for n in s.low()..(k as i64 - 1).min(s.end()) {
                if !divisible(&s.coeff(n), valid) {
                    return Err(Error::check(
                        "initial defect",
                        format!("Δ(G_init) has a nonzero X^{n} coefficient"),
                    ));
                }
            }
        }
        let p0: [OlElem; 4] = p_mat.at_zero();
        let adj0 = [p0[3].clone(), p0[1].negate(), p0[2].negate(), p0[0].clone()];
        let cap = 2 * self.working as usize + 10;
        let mut iterations = 0usize;
        for l in (k as i64 - 1)..mx {
            let s0: [OlElem; 4] = [
                delta.e[0].coeff(l),
                delta.e[1].coeff(l),
                delta.e[2].coeff(l),
                delta.e[3].coeff(l),
            ];
            // C = −S₀·adj(P₀)/p^{k−1}
            let num = mat_neg(&mat_mul(&s0, &adj0));
            let c = mat_div_p(&num, k - 1).ok_or_else(|| {
                Error::Divisibility(format!(
                    "−S₀·adj(P₀) not divisible by p^{} at degree {l}",
                    k - 1
                ))
            })?;
            let factor = OlElem::from_bigint(ring, &BigInt::from(self.p).pow((l - k as i64 + 1) as u32));
            let mut h = c.clone();
            let mut converged = false;
            for _ in 0..cap {
                iterations += 1;
                let lin = mat_mul(&mat_mul(&p0, &h), &adj0);
                let next = mat_add(&c, &mat_scale(&lin, &factor));
                if next == h {
                    converged = true;
                    break;
                }
                h = next;
            }
            if !converged {
                return Err(Error::NonConvergence(format!(
                    "inner iteration at degree {l} did not stabilize in {cap} steps"
                )));
            }
            // Δ += X^l·H·γ(P) − P·H·φ(X)^l
            let hm = const_mat(&h);
            let left = hm.mul_to(&gp, mx - l).map(|s| s.mul_x_pow(l));
            let ph = p_mat.mul_to(&hm, mx);
            let phil = self
                .phi_table
                .power(l as usize)
                .ok_or_else(|| Error::Precision("φ table too short".into()))?;
            let right = ph.map(|s| s.mul_to(phil, mx));
            delta = delta.add(&left).sub(&right).truncate(mx);
            g = g.add(&hm.map(|s| s.mul_x_pow(l)));
            valid = valid.saturating_sub(k - 1);
            for s in &delta.e {
                if !divisible(&s.coeff(l), valid) {
                    return Err(Error::check(
                        "defect loop invariant",
                        format!("Δ ≢ 0 mod X^{} after the degree-{l} step", l + 1),
                    ));
                }
            }
        }
        if valid < self.n_target {
            return Err(Error::Precision(format!(
                "only {valid} certified p-adic digits remain, {} requested",
                self.n_target
            )));
        }
        let g = g.map(|s| s.truncate(mx));
        Ok(SolveOutcome {
            g,
            valid_digits: valid,
            iterations,
        })
    }
}

#[derive(Debug, Clone)]
pub struct SolveOutcome {
    pub g: OlMat,
    pub valid_digits: u32,
    pub iterations: usize,
}

fn divisible(c: &OlElem, digits: u32) -> bool {
    digits == 0 || c.div_p_pow(digits.min(c.ring().np())).is_some()
}

type Const = [OlElem; 4];

fn mat_mul(a: &Const, b: &Const) -> Const {
    let ctx = a[0].ring().clone();
    let f = |x: &OlElem, y: &OlElem, z: &OlElem, w: &OlElem| {
        OlElem::sum_of_products(&ctx, [(x, y), (z, w)].into_iter())
    };
    [
        f(&a[0], &b[0], &a[1], &b[2]),
        f(&a[0], &b[1], &a[1], &b[3]),
        f(&a[2], &b[0], &a[3], &b[2]),
        f(&a[2], &b[1], &a[3], &b[3]),
    ]
}

fn mat_add(a: &Const, b: &Const) -> Const {
    [a[0].plus(&b[0]), a[1].plus(&b[1]), a[2].plus(&b[2]), a[3].plus(&b[3])]
}

fn mat_neg(a: &Const) -> Const {
    [a[0].negate(), a[1].negate(), a[2].negate(), a[3].negate()]
}

fn mat_scale(a: &Const, c: &OlElem) -> Const {
    [a[0].times(c), a[1].times(c), a[2].times(c), a[3].times(c)]
}

fn mat_div_p(a: &Const, n: u32) -> Option<Const> {
    Some([
        a[0].div_p_pow(n)?,
        a[1].div_p_pow(n)?,
        a[2].div_p_pow(n)?,
        a[3].div_p_pow(n)?,
    ])
}

fn const_mat(h: &Const) -> OlMat {
    OlMat::new(
        Series::constant(h[0].clone()),
        Series::constant(h[1].clone()),
        Series::constant(h[2].clone()),
        Series::constant(h[3].clone()),
    )
}
