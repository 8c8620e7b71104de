//! Randomized operator identities: ψ∘φ = id, φγ = γφ, the γ cocycle and the
//! q-series relations, over O_L and over the residue fields.

use num_bigint::BigInt;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::padic::coeff::Coeff;
use crate::padic::fq::FqField;
use crate::padic::ol::{EisensteinRing, OlElem, OlRing};
use crate::padic::ops::{frobenius_phi, gamma_act, phi_of_x, psi, q_series, GammaExp};
use crate::padic::series::Series;

/// Coefficient rings the suite runs over.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum SuiteRing {
    Unramified { p: u64, digits: u32 },
    /// E = x² − p.
    Ramified { p: u64, digits: u32 },
    PrimeField { p: u64 },
    Quadratic { p: u64 },
}

impl SuiteRing {
    pub fn p(&self) -> u64 {
        match *self {
            SuiteRing::Unramified { p, .. }
            | SuiteRing::Ramified { p, .. }
            | SuiteRing::PrimeField { p }
            | SuiteRing::Quadratic { p } => p,
        }
    }

    pub fn label(&self) -> String {
        match self {
            SuiteRing::Unramified { p, digits } => format!("Z_{p} mod p^{digits}"),
            SuiteRing::Ramified { p, digits } => format!("Z_{p}[√{p}] mod p^{digits}"),
            SuiteRing::PrimeField { p } => format!("F_{p}"),
            SuiteRing::Quadratic { p } => format!("F_{p}^2"),
        }
    }
}

/// The default configurations: p ∈ {3, 5, 7} over each kind of ring.
pub fn default_rings() -> Vec<SuiteRing> {
    let mut v = Vec::new();
    for p in [3, 5, 7] {
        v.push(SuiteRing::Unramified { p, digits: 5 });
        v.push(SuiteRing::Ramified { p, digits: 4 });
        v.push(SuiteRing::PrimeField { p });
        v.push(SuiteRing::Quadratic { p });
    }
    v
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IdentityReport {
    pub ring: String,
    pub identity: String,
    pub instances: u32,
    pub failures: u32,
    pub first_failure: Option<String>,
}

impl IdentityReport {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

/// Compares two series at their common precision, which must be at least
/// `min_prec` so that a pass is not vacuous.
fn agree<C: Coeff>(a: &Series<C>, b: &Series<C>, min_prec: i64) -> std::result::Result<(), String> {
    let prec = a.prec().min(b.prec());
    if prec < min_prec {
        return Err(format!("compared precision {prec} < {min_prec}"));
    }
    let d = a.agreement(b);
    if d < prec {
        return Err(format!("differ at X^{d} (precision {prec})"));
    }
    Ok(())
}

struct Tally {
    ring: String,
    identity: &'static str,
    instances: u32,
    failures: u32,
    first: Option<String>,
}

impl Tally {
    fn new(ring: &str, identity: &'static str) -> Self {
        Tally {
            ring: ring.into(),
            identity,
            instances: 0,
            failures: 0,
            first: None,
        }
    }

    fn record(&mut self, i: u32, r: Result<std::result::Result<(), String>>) {
        self.instances += 1;
        let msg = match r {
            Ok(Ok(())) => return,
            Ok(Err(m)) => m,
            Err(e) => e.to_string(),
        };
        self.failures += 1;
        if self.first.is_none() {
            self.first = Some(format!("instance {i}: {msg}"));
        }
    }

    fn done(self) -> IdentityReport {
        IdentityReport {
            ring: self.ring,
            identity: self.identity.into(),
            instances: self.instances,
            failures: self.failures,
            first_failure: self.first,
        }
    }
}

fn random_unit_exp(rng: &mut StdRng, p: u64) -> i64 {
    loop {
        let a: i64 = rng.gen_range(-(p as i64 * p as i64)..=(p as i64 * p as i64));
        if a.rem_euclid(p as i64) != 0 {
            return a;
        }
    }
}

fn random_series<C: Coeff>(
    rng: &mut StdRng,
    ctx: &C::Ctx,
    low: i64,
    len: usize,
    prec: i64,
    coeff: &dyn Fn(&mut StdRng) -> C,
) -> Series<C> {
    let cs = (0..len).map(|_| coeff(rng)).collect();
    Series::new(ctx, low, cs, prec)
}

fn run_generic<C: Coeff>(
    ctx: &C::Ctx,
    label: &str,
    instances: u32,
    rng: &mut StdRng,
    prec: i64,
    laurent: bool,
    coeff: &dyn Fn(&mut StdRng) -> C,
) -> Vec<IdentityReport> {
    let p = C::prime(ctx);
    let mut psi_phi = Tally::new(label, "psi(phi(f)) = f");
    let mut phi_gamma = Tally::new(label, "phi(gamma_a(f)) = gamma_a(phi(f))");
    let mut cocycle = Tally::new(label, "gamma_a(gamma_b(f)) = gamma_ab(f)");
    let mut q_ids = Tally::new(label, "q-series: phi(q_n) = q_(n+1), X q_1 = phi(X), q_n(0) = p");
    for i in 0..instances {
        let low = if laurent { -(rng.gen_range(0..3) as i64) } else { 0 };
        let f = random_series(rng, ctx, low, (prec - low) as usize, prec, coeff);
        psi_phi.record(
            i,
            (|| {
                let back = psi(&frobenius_phi(&f)?)?;
                Ok(agree(&back, &f, 2))
            })(),
        );
        let pf = random_series(rng, ctx, 0, prec as usize, prec, coeff);
        let a = GammaExp::exact(random_unit_exp(rng, p));
        let b = GammaExp::exact(random_unit_exp(rng, p));
        phi_gamma.record(
            i,
            (|| {
                let l = frobenius_phi(&gamma_act(&pf, &a)?)?;
                let r = gamma_act(&frobenius_phi(&pf)?, &a)?;
                Ok(agree(&l, &r, prec / 2))
            })(),
        );
        cocycle.record(
            i,
            (|| {
                let l = gamma_act(&gamma_act(&pf, &b)?, &a)?;
                let r = gamma_act(&pf, &a.times(&b))?;
                Ok(agree(&l, &r, prec / 2))
            })(),
        );
        let n = rng.gen_range(1..=3u32);
        let t = rng.gen_range(p as i64 + 2..=prec);
        q_ids.record(
            i,
            (|| {
                let qn = q_series::<C>(ctx, n, t);
                let qn1 = q_series::<C>(ctx, n + 1, t);
                if let Err(m) = agree(&frobenius_phi(&qn)?.truncate(t), &qn1, t.min(2)) {
                    return Ok(Err(format!("phi(q_{n}): {m}")));
                }
                let x = Series::<C>::x(ctx);
                let lhs = q_series::<C>(ctx, 1, t).mul(&x).truncate(t);
                if let Err(m) = agree(&lhs, &phi_of_x::<C>(ctx).truncate(t), t.min(2)) {
                    return Ok(Err(format!("X q_1: {m}")));
                }
                if qn.eval0() != C::from_i64(ctx, p as i64) {
                    return Ok(Err(format!("q_{n}(0) ≠ p")));
                }
                Ok(Ok(()))
            })(),
        );
    }
    vec![psi_phi.done(), phi_gamma.done(), cocycle.done(), q_ids.done()]
}

/// Runs the four identities on `instances` random inputs per ring.
pub fn operator_suite(ring: &SuiteRing, instances: u32, seed: u64) -> Result<Vec<IdentityReport>> {
    let mut rng = StdRng::seed_from_u64(seed ^ ring.p().wrapping_mul(0x9e37_79b9));
    let label = ring.label();
    let p = ring.p();
    Ok(match *ring {
        SuiteRing::Unramified { digits, .. } | SuiteRing::Ramified { digits, .. } => {
            let ol: OlRing = match ring {
                SuiteRing::Unramified { .. } => EisensteinRing::unramified(p, digits)?,
                _ => EisensteinRing::new(p, vec![BigInt::from(-(p as i64)), 0.into(), 1.into()], digits)?,
            };
            let e = ol.e();
            let bound = (p as i64).pow(digits);
            let r2 = ol.clone();
            let coeff = move |rng: &mut StdRng| {
                let cs: Vec<BigInt> = (0..e).map(|_| BigInt::from(rng.gen_range(0..bound))).collect();
                OlElem::from_coords(&r2, &cs).expect("coordinates in range")
            };
            let prec = p as i64 * (digits as i64 + 4);
            run_generic(&ol, &label, instances, &mut rng, prec, false, &coeff)
        }
        SuiteRing::PrimeField { .. } | SuiteRing::Quadratic { .. } => {
            let field = match ring {
                SuiteRing::PrimeField { .. } => FqField::prime_field(p),
                _ => FqField::quadratic(p),
            };
            let coeff = move |rng: &mut StdRng| {
                field.elem2(rng.gen_range(0..p as i64), rng.gen_range(0..p as i64))
            };
            let coeff_prime = move |rng: &mut StdRng| field.elem(rng.gen_range(0..p as i64));
            let prec = 6 * p as i64;
            if field.degree() == 2 {
                run_generic(&field, &label, instances, &mut rng, prec, true, &coeff)
            } else {
                run_generic(&field, &label, instances, &mut rng, prec, true, &coeff_prime)
            }
        }
    })
}
