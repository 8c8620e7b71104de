//! Integer polynomials written as text: a_p specs ("5", "3*p", "pi",
//! "2*pi + pi^2") and Eisenstein polynomials ("x^2 - 5").

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("cannot parse {input:?}: {msg}")]
pub struct ParseError {
    pub input: String,
    pub msg: String,
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(BigInt),
    Var,
    Prime,
    Plus,
    Minus,
    Star,
    Caret,
}

fn tokenize(s: &str, var: &[&str]) -> Result<Vec<Tok>, String> {
    let chars: Vec<char> = s.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        match c {
            ' ' | '\t' => i += 1,
            '+' => {
                out.push(Tok::Plus);
                i += 1
            }
            '-' | '−' => {
                out.push(Tok::Minus);
                i += 1
            }
            '*' | '·' => {
                out.push(Tok::Star);
                i += 1
            }
            '^' => {
                out.push(Tok::Caret);
                i += 1
            }
            '0'..='9' => {
                let start = i;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                let t: String = chars[start..i].iter().collect();
                out.push(Tok::Num(t.parse().map_err(|e| format!("{e}"))?));
            }
            'π' => {
                out.push(Tok::Var);
                i += 1
            }
            c if c.is_ascii_alphabetic() => {
                let start = i;
                while i < chars.len() && chars[i].is_ascii_alphabetic() {
                    i += 1;
                }
                let w: String = chars[start..i].iter().collect();
                if var.contains(&w.as_str()) {
                    out.push(Tok::Var);
                } else if w == "p" {
                    out.push(Tok::Prime);
                } else {
                    return Err(format!("unknown symbol {w:?}"));
                }
            }
            c => return Err(format!("unexpected character {c:?}")),
        }
    }
    Ok(out)
}

/// Dense polynomial, low degree first.
type Poly = Vec<BigInt>;

fn add_into(acc: &mut Poly, t: &Poly, sign: i32) {
    if acc.len() < t.len() {
        acc.resize(t.len(), BigInt::zero());
    }
    for (a, b) in acc.iter_mut().zip(t) {
        if sign < 0 {
            *a -= b;
        } else {
            *a += b;
        }
    }
}

fn mul(a: &Poly, b: &Poly) -> Poly {
    let mut out = vec![BigInt::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

fn pow(a: &Poly, n: u32) -> Poly {
    let mut r = vec![BigInt::one()];
    for _ in 0..n {
        r = mul(&r, a);
    }
    r
}

struct Parser<'a> {
    toks: &'a [Tok],
    pos: usize,
    p: &'a BigInt,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos)
    }

    fn next(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).cloned();
        self.pos += 1;
        t
    }

    fn expr(&mut self) -> Result<Poly, String> {
        let mut acc = vec![BigInt::zero()];
        let mut sign = 1;
        if matches!(self.peek(), Some(Tok::Minus)) {
            self.next();
            sign = -1;
        } else if matches!(self.peek(), Some(Tok::Plus)) {
            self.next();
        }
        loop {
            let t = self.term()?;
            add_into(&mut acc, &t, sign);
            match self.next() {
                None => return Ok(acc),
                Some(Tok::Plus) => sign = 1,
                Some(Tok::Minus) => sign = -1,
                Some(t) => return Err(format!("unexpected {t:?}")),
            }
        }
    }

    fn term(&mut self) -> Result<Poly, String> {
        let mut acc = self.factor()?;
        loop {
            match self.peek() {
                Some(Tok::Star) => {
                    self.next();
                }
                // Implicit product: "3pi", "2p".
                Some(Tok::Var) | Some(Tok::Prime) | Some(Tok::Num(_)) => {}
                _ => return Ok(acc),
            }
            let f = self.factor()?;
            acc = mul(&acc, &f);
        }
    }

    fn factor(&mut self) -> Result<Poly, String> {
        let base = match self.next() {
            Some(Tok::Num(n)) => vec![n],
            Some(Tok::Prime) => vec![self.p.clone()],
            Some(Tok::Var) => vec![BigInt::zero(), BigInt::one()],
            Some(t) => return Err(format!("unexpected {t:?}")),
            None => return Err("unexpected end of input".into()),
        };
        if matches!(self.peek(), Some(Tok::Caret)) {
            self.next();
            match self.next() {
                Some(Tok::Num(n)) => {
                    let e: u32 = n.try_into().map_err(|_| "exponent too large".to_string())?;
                    return Ok(pow(&base, e));
                }
                _ => return Err("expected an exponent after ^".into()),
            }
        }
        Ok(base)
    }
}

fn parse_poly(input: &str, p: u64, var: &[&str]) -> Result<Poly, ParseError> {
    let err = |msg: String| ParseError {
        input: input.into(),
        msg,
    };
    let toks = tokenize(input, var).map_err(err)?;
    if toks.is_empty() {
        return Err(err("empty input".into()));
    }
    let pb = BigInt::from(p);
    let mut parser = Parser {
        toks: &toks,
        pos: 0,
        p: &pb,
    };
    let mut poly = parser.expr().map_err(err)?;
    while poly.len() > 1 && poly.last().is_some_and(|c| c.is_zero()) {
        poly.pop();
    }
    Ok(poly)
}

/// Eisenstein polynomial in x (or π), low degree first; must be monic.
pub fn parse_eisenstein(input: &str, p: u64) -> Result<Vec<BigInt>, ParseError> {
    let poly = parse_poly(input, p, &["x", "X", "pi", "T"])?;
    if poly.len() < 2 || !poly.last().is_some_and(|c| c.is_one()) {
        return Err(ParseError {
            input: input.into(),
            msg: "expected a monic polynomial of degree ≥ 1".into(),
        });
    }
    Ok(poly)
}

/// The unramified "Eisenstein polynomial" x − p.
pub fn unramified(p: u64) -> Vec<BigInt> {
    vec![BigInt::from(-(p as i64)), BigInt::one()]
}

/// a_p as coordinates in 1, π, …, π^{e−1}, reduced exactly modulo E.
pub fn parse_ap(input: &str, p: u64, eisenstein: &[BigInt]) -> Result<Vec<BigInt>, ParseError> {
    let mut poly = parse_poly(input, p, &["pi"])?;
    let e = eisenstein.len() - 1;
    // π^e = −Σ_{i<e} E_i π^i, E monic.
    for d in (e..poly.len()).rev() {
        let c = std::mem::take(&mut poly[d]);
        if c.is_zero() {
            continue;
        }
        for i in 0..e {
            poly[d - e + i] -= &c * &eisenstein[i];
        }
    }
    poly.resize(e, BigInt::zero());
    Ok(poly)
}

/// Human-readable polynomial, e.g. "x^2+3x+1", from coefficients low first.
pub fn format_poly(coeffs: &[u64], var: &str) -> String {
    let mut parts = Vec::new();
    for (i, &c) in coeffs.iter().enumerate().rev() {
        if c == 0 {
            continue;
        }
        let mono = match i {
            0 => String::new(),
            1 => var.to_string(),
            _ => format!("{var}^{i}"),
        };
        parts.push(match (c, i) {
            (_, 0) => c.to_string(),
            (1, _) => mono,
            _ => format!("{c}{mono}"),
        });
    }
    if parts.is_empty() {
        "0".into()
    } else {
        parts.join("+")
    }
}

/// Largest p-adic valuation among nonzero coefficients (0 if all vanish).
pub fn max_p_val(coords: &[BigInt], p: u64) -> u32 {
    let pb = BigInt::from(p);
    coords
        .iter()
        .filter(|c| !c.is_zero())
        .map(|c| {
            let mut v = 0;
            let mut x = c.abs();
            while (&x % &pb).is_zero() {
                x /= &pb;
                v += 1;
            }
            v
        })
        .max()
        .unwrap_or(0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ints(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn integer_and_multiple_of_p() {
        let e = unramified(5);
        assert_eq!(parse_ap("15", 5, &e).unwrap(), ints(&[15]));
        assert_eq!(parse_ap("3*p", 5, &e).unwrap(), ints(&[15]));
        assert_eq!(parse_ap("-2p", 7, &unramified(7)).unwrap(), ints(&[-14]));
    }

    #[test]
    fn polynomial_in_pi_is_reduced() {
        let e = parse_eisenstein("x^2-5", 5).unwrap();
        assert_eq!(e, ints(&[-5, 0, 1]));
        assert_eq!(parse_ap("pi", 5, &e).unwrap(), ints(&[0, 1]));
        assert_eq!(parse_ap("pi^3 + 2*pi^2 - 1", 5, &e).unwrap(), ints(&[9, 5]));
        assert_eq!(parse_ap("π", 5, &e).unwrap(), ints(&[0, 1]));
    }

    #[test]
    fn pi_means_p_when_unramified() {
        assert_eq!(parse_ap("2*pi", 5, &unramified(5)).unwrap(), ints(&[10]));
    }

    #[test]
    fn rejects_garbage() {
        let e = unramified(5);
        assert!(parse_ap("", 5, &e).is_err());
        assert!(parse_ap("3 +", 5, &e).is_err());
        assert!(parse_ap("y", 5, &e).is_err());
        assert!(parse_ap("2^", 5, &e).is_err());
        assert!(parse_eisenstein("2x^2-5", 5).is_err());
    }

    #[test]
    fn poly_rendering() {
        assert_eq!(format_poly(&[1, 3, 1], "x"), "x^2+3x+1");
        assert_eq!(format_poly(&[4, 1], "x"), "x+4");
    }
}
