use num_bigint::BigInt;
use proptest::prelude::*;
use wachlab::classify::{
    canonicalize_rho, classify, complete_pair, CharSymbol, RhoSymbol, Variant,
};
use wachlab::modp::{in_psi_image, pole_functional};
use wachlab::padic::ops::{frobenius_phi, gamma_act, psi, GammaExp};
use wachlab::{Coeff, EisensteinRing, Fq, FqField, OlElem, OlSeries, ResSeries};

const PRIMES: [u64; 5] = [3, 5, 7, 11, 13];

fn prime() -> impl Strategy<Value = u64> {
    prop::sample::select(PRIMES.to_vec())
}

fn unit(f: &FqField, a: u64, b: u64) -> Fq {
    let p = f.p() as i64;
    let x = if f.degree() == 2 {
        f.elem2(a as i64 % p, b as i64 % p)
    } else {
        f.elem(a as i64 % p)
    };
    if x.is_zero() {
        f.elem(1)
    } else {
        x
    }
}

fn char_strategy() -> impl Strategy<Value = CharSymbol> {
    (prime(), 0i64..40, any::<u64>(), any::<u64>(), any::<bool>()).prop_map(|(p, e, a, b, quad)| {
        let f = if quad {
            FqField::quadratic(p)
        } else {
            FqField::prime_field(p)
        };
        CharSymbol::new(e, unit(&f, a, b)).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn canonicalize_is_idempotent_and_orbit_closed(chi in char_strategy(), r in 0u64..13) {
        let r = r % chi.p();
        let rho = RhoSymbol::new(r, chi).unwrap();
        let c = canonicalize_rho(&rho);
        prop_assert_eq!(canonicalize_rho(&c), c);
        for s in rho.orbit() {
            prop_assert_eq!(canonicalize_rho(&s), c);
        }
    }

    #[test]
    fn complete_pair_gives_determinant(chi in char_strategy(), k in 5u32..30) {
        let other = complete_pair(&chi, k);
        prop_assert_eq!(chi.mul(&other), CharSymbol::omega_pow(chi.p(), k as i64 - 1));
    }

    #[test]
    fn classify_split_determinant(p in prime(), dk in 0u32..20, c in 1i64..13) {
        let k = p as u32 + 2 + dk % (p as u32 - 2);
        let c = 1 + (c - 1) % (p as i64 - 1);
        let ring = EisensteinRing::unramified(p, 6).unwrap();
        let r = classify(p, k, &OlElem::from_i64(&ring, c * p as i64)).unwrap();
        let ch = r.variant.characters();
        prop_assert_eq!(ch.len(), 2);
        prop_assert_eq!(ch[0].mul(&ch[1]), CharSymbol::omega_pow(p, k as i64 - 1));
    }

    /// Only a_p/p mod p matters on the val = 1 branch.
    #[test]
    fn classify_depends_on_ap_over_p_mod_p(p in prime(), dk in 0u32..20, c in 1i64..13, t in -50i64..50) {
        let k = p as u32 + 2 + dk % (p as u32 - 2);
        let c = 1 + (c - 1) % (p as i64 - 1);
        let pi = p as i64;
        let ring = EisensteinRing::unramified(p, 8).unwrap();
        let a = classify(p, k, &OlElem::from_i64(&ring, c * pi)).unwrap();
        let b = classify(p, k, &OlElem::from_i64(&ring, c * pi + t * pi * pi)).unwrap();
        prop_assert!(a.variant.same_as(&b.variant));
    }

    /// ψ∘φ = id on Laurent series over F_p and F_{p²}.
    #[test]
    fn psi_phi_identity_residue(p in prime(), quad in any::<bool>(), low in -4i64..3, cs in prop::collection::vec(any::<u64>(), 30)) {
        let f = if quad { FqField::quadratic(p) } else { FqField::prime_field(p) };
        let coeffs: Vec<Fq> = cs.iter().map(|&a| unit(&f, a, a / p)).collect();
        let s = ResSeries::new(&f, low, coeffs, low + 30);
        let back = psi(&frobenius_phi(&s).unwrap()).unwrap();
        prop_assert!(back.prec() >= low + 1);
        prop_assert!(back.same_value(&s));
    }

    /// φγ = γφ over Z_p modulo p^4.
    #[test]
    fn phi_gamma_commute_over_zp(p in prop::sample::select(vec![3u64, 5, 7]), a in 2i64..60, cs in prop::collection::vec(0i64..10_000, 24)) {
        prop_assume!(a % p as i64 != 0);
        let ring = EisensteinRing::unramified(p, 4).unwrap();
        let s = OlSeries::from_i64s(&ring, 0, &cs, 24);
        let g = GammaExp::exact(a);
        let l = frobenius_phi(&gamma_act(&s, &g).unwrap()).unwrap();
        let r = gamma_act(&frobenius_phi(&s).unwrap(), &g).unwrap();
        prop_assert!(l.prec().min(r.prec()) >= 12);
        prop_assert!(l.same_value(&r));
    }

    /// The pole functional is an exact oracle for the image of ψ − 1 on the
    /// window: ℓ(w) = 0 iff w is in the image.
    #[test]
    fn pole_functional_decides_psi_image(p in prop::sample::select(vec![3u64, 5, 7]), poles in 1i64..8, upto in 1i64..3, cs in prop::collection::vec(0u64..50, 40)) {
        let f = FqField::prime_field(p);
        let len = (poles + upto) as usize;
        let coeffs: Vec<Fq> = cs.iter().take(len).map(|&a| f.elem((a % p) as i64)).collect();
        let w = ResSeries::new(&f, -poles, coeffs, upto);
        let one = f.elem(1);
        let in_image = in_psi_image(&w, &one, poles, upto).unwrap();
        prop_assert_eq!(in_image, pole_functional(&w).is_zero());
    }

    /// Images (ψ − 1)(g) are always recognized.
    #[test]
    fn psi_minus_one_images_are_found(p in prop::sample::select(vec![3u64, 5, 7]), low in -6i64..0, cs in prop::collection::vec(0u64..50, 40)) {
        let f = FqField::prime_field(p);
        let coeffs: Vec<Fq> = cs.iter().map(|&a| f.elem((a % p) as i64)).collect();
        let g = ResSeries::new(&f, low, coeffs, low + 40);
        let w = psi(&g).unwrap().sub(&g);
        let upto = 2.min(w.prec());
        let poles = (-w.low()).max(-low).max(1);
        prop_assert!(pole_functional(&w).is_zero());
        prop_assert!(in_psi_image(&w.truncate(upto), &f.elem(1), poles, upto).unwrap());
    }
}

#[test]
fn ramified_half_valuation_grid() {
    for p in [5u64, 7, 11] {
        let ring = EisensteinRing::new(p, vec![BigInt::from(-(p as i64)), 0.into(), 1.into()], 6).unwrap();
        let pi = OlElem::uniformizer(&ring);
        for k in p as u32 + 2..=2 * p as u32 - 1 {
            let r = classify(p, k, &pi).unwrap();
            let Variant::Irreducible(rho) = r.variant else {
                panic!("p={p} k={k}: expected irreducible");
            };
            let closed = RhoSymbol::new(k as u64 - p - 1, CharSymbol::trivial(p)).unwrap();
            assert_eq!(canonicalize_rho(&closed), rho);
        }
    }
}
