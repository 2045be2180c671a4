//! Multivariate polynomials over the rationals (the ring S(t*)) and
//! univariate-in-z polynomials with such coefficients.
//!
//! The two workhorse operations are the substitution ξ ↦ ξ + z·e, which turns
//! a class into a z-polynomial, and total-residue extraction, which sums the
//! residues of a rational function of z over all of its poles by expanding at
//! infinity. Residues are never taken pole by pole: colinear weights produce
//! coinciding poles and the series route sidesteps the fraction field of
//! S(t*) entirely.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::linalg::{hermite_extend, BasisChange};
use crate::rat::{Int, IntVec, Rat};

/// Sparse multivariate polynomial over Q in k variables x1..xk.
/// Invariant: no zero coefficients stored; all exponent vectors have length k.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MultiPoly {
    k: usize,
    terms: BTreeMap<Vec<u32>, Rat>,
    /// Max total degree over stored monomials; None for the zero polynomial.
    degree: Option<usize>,
}

fn term_degree(exp: &[u32]) -> usize {
    exp.iter().map(|&e| e as usize).sum()
}

impl MultiPoly {
    pub fn zero(k: usize) -> Self {
        MultiPoly {
            k,
            terms: BTreeMap::new(),
            degree: None,
        }
    }

    pub fn constant(k: usize, c: Rat) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(vec![0; k], c);
        }
        let degree = if terms.is_empty() { None } else { Some(0) };
        MultiPoly { k, terms, degree }
    }

    pub fn one(k: usize) -> Self {
        Self::constant(k, Rat::one())
    }

    /// The variable x_{i+1} (0-based index).
    pub fn variable(k: usize, i: usize) -> Self {
        assert!(i < k, "variable index out of range");
        let mut exp = vec![0; k];
        exp[i] = 1;
        Self::monomial(k, exp, Rat::one())
    }

    pub fn monomial(k: usize, exp: Vec<u32>, coeff: Rat) -> Self {
        assert_eq!(exp.len(), k);
        let mut terms = BTreeMap::new();
        if !coeff.is_zero() {
            terms.insert(exp, coeff);
        }
        let degree = terms.keys().next().map(|e| term_degree(e));
        MultiPoly { k, terms, degree }
    }

    /// The linear form ⟨w, ξ⟩ = Σ w_i x_{i+1}.
    pub fn linear_form(k: usize, w: &[Int]) -> Self {
        assert_eq!(w.len(), k);
        let mut p = Self::zero(k);
        for (i, c) in w.iter().enumerate() {
            if !c.is_zero() {
                let mut exp = vec![0; k];
                exp[i] = 1;
                p.add_term(exp, Rat::from_integer(c.clone()));
            }
        }
        p.recompute_degree();
        p
    }

    fn add_term(&mut self, exp: Vec<u32>, coeff: Rat) {
        if coeff.is_zero() {
            return;
        }
        match self.terms.entry(exp) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(coeff);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += coeff;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    fn recompute_degree(&mut self) {
        self.degree = self.terms.keys().map(|e| term_degree(e)).max();
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Max total degree; None for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.degree
    }

    pub fn is_homogeneous(&self) -> bool {
        match self.degree {
            None => true,
            Some(d) => self.terms.keys().all(|e| term_degree(e) == d),
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u32>, &Rat)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn homogeneous_part(&self, d: usize) -> MultiPoly {
        let mut p = MultiPoly::zero(self.k);
        for (e, c) in &self.terms {
            if term_degree(e) == d {
                p.terms.insert(e.clone(), c.clone());
            }
        }
        p.recompute_degree();
        p
    }

    /// Some(c) iff the polynomial is constant (zero counts as Some(0)).
    pub fn as_constant(&self) -> Option<Rat> {
        match self.degree {
            None => Some(Rat::zero()),
            Some(0) => Some(self.terms.values().next().unwrap().clone()),
            Some(_) => None,
        }
    }

    pub fn add(&self, other: &MultiPoly) -> MultiPoly {
        assert_eq!(self.k, other.k);
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), c.clone());
        }
        out.recompute_degree();
        out
    }

    pub fn neg(&self) -> MultiPoly {
        let mut out = self.clone();
        for c in out.terms.values_mut() {
            *c = -c.clone();
        }
        out
    }

    pub fn sub(&self, other: &MultiPoly) -> MultiPoly {
        self.add(&other.neg())
    }

    pub fn scale(&self, s: &Rat) -> MultiPoly {
        if s.is_zero() {
            return MultiPoly::zero(self.k);
        }
        let mut out = self.clone();
        for c in out.terms.values_mut() {
            *c *= s;
        }
        out
    }

    pub fn mul(&self, other: &MultiPoly) -> MultiPoly {
        assert_eq!(self.k, other.k);
        let mut out = MultiPoly::zero(self.k);
        for (e1, c1) in &self.terms {
            for (e2, c2) in &other.terms {
                let exp: Vec<u32> = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                out.add_term(exp, c1 * c2);
            }
        }
        out.recompute_degree();
        out
    }

    pub fn pow(&self, e: usize) -> MultiPoly {
        let mut out = MultiPoly::one(self.k);
        for _ in 0..e {
            out = out.mul(self);
        }
        out
    }

    /// Substitutes x_{i+1} ↦ forms[i]; all forms live in a k_out-variable ring.
    pub fn substitute_linear(&self, k_out: usize, forms: &[MultiPoly]) -> MultiPoly {
        assert_eq!(forms.len(), self.k);
        assert!(forms.iter().all(|f| f.k == k_out));
        let mut out = MultiPoly::zero(k_out);
        for (e, c) in &self.terms {
            let mut term = MultiPoly::constant(k_out, c.clone());
            for (i, &a) in e.iter().enumerate() {
                if a > 0 {
                    term = term.mul(&forms[i].pow(a as usize));
                }
            }
            out = out.add(&term);
        }
        out
    }

    /// Evaluates p at ξ + z·e, expanded as a polynomial in z.
    pub fn substitute_line(&self, e: &[Int]) -> Result<ZPoly> {
        if e.len() != self.k {
            return Err(Error::DimensionMismatch {
                context: "substitute_line direction",
                expected: self.k,
                got: e.len(),
            });
        }
        let k = self.k;
        let mut out = ZPoly::zero(k);
        for (exp, c) in &self.terms {
            // Product over variables of (x_i + e_i z)^{a_i}.
            let mut term = ZPoly::from_multi(MultiPoly::constant(k, c.clone()));
            for (i, &a) in exp.iter().enumerate() {
                if a == 0 {
                    continue;
                }
                let lin = ZPoly::new(
                    k,
                    vec![
                        MultiPoly::variable(k, i),
                        MultiPoly::constant(k, Rat::from_integer(e[i].clone())),
                    ],
                );
                for _ in 0..a {
                    term = term.mul(&lin);
                }
            }
            out = out.add(&term);
        }
        Ok(out)
    }
}

impl fmt::Display for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        // Descending by (total degree, exponents) for stable, readable output.
        let mut terms: Vec<(&Vec<u32>, &Rat)> = self.terms.iter().collect();
        terms.sort_by(|a, b| {
            (term_degree(b.0), b.0).cmp(&(term_degree(a.0), a.0))
        });
        for (idx, (exp, coeff)) in terms.iter().enumerate() {
            let neg = coeff.is_negative();
            let mag = coeff.abs();
            if idx == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else if neg {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let vars: Vec<String> = exp
                .iter()
                .enumerate()
                .filter(|(_, &a)| a > 0)
                .map(|(i, &a)| {
                    if a == 1 {
                        format!("x{}", i + 1)
                    } else {
                        format!("x{}^{}", i + 1, a)
                    }
                })
                .collect();
            if vars.is_empty() {
                write!(f, "{}", crate::rat::rat_to_string(&mag))?;
            } else if mag.is_one() {
                write!(f, "{}", vars.join("*"))?;
            } else {
                write!(f, "{}*{}", crate::rat::rat_to_string(&mag), vars.join("*"))?;
            }
        }
        Ok(())
    }
}

/// Polynomial in z with MultiPoly coefficients, ascending powers, trimmed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ZPoly {
    k: usize,
    coeffs: Vec<MultiPoly>,
}

impl ZPoly {
    pub fn new(k: usize, mut coeffs: Vec<MultiPoly>) -> Self {
        while coeffs.last().is_some_and(MultiPoly::is_zero) {
            coeffs.pop();
        }
        assert!(coeffs.iter().all(|c| c.k() == k));
        ZPoly { k, coeffs }
    }

    pub fn zero(k: usize) -> Self {
        ZPoly { k, coeffs: vec![] }
    }

    pub fn from_multi(p: MultiPoly) -> Self {
        let k = p.k();
        Self::new(k, vec![p])
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn z_degree(&self) -> Option<usize> {
        if self.coeffs.is_empty() {
            None
        } else {
            Some(self.coeffs.len() - 1)
        }
    }

    pub fn coeff(&self, i: usize) -> MultiPoly {
        self.coeffs.get(i).cloned().unwrap_or_else(|| MultiPoly::zero(self.k))
    }

    pub fn coeffs(&self) -> &[MultiPoly] {
        &self.coeffs
    }

    pub fn add(&self, other: &ZPoly) -> ZPoly {
        assert_eq!(self.k, other.k);
        let len = self.coeffs.len().max(other.coeffs.len());
        let coeffs: Vec<MultiPoly> = (0..len)
            .map(|i| self.coeff(i).add(&other.coeff(i)))
            .collect();
        ZPoly::new(self.k, coeffs)
    }

    pub fn mul(&self, other: &ZPoly) -> ZPoly {
        assert_eq!(self.k, other.k);
        if self.is_zero() || other.is_zero() {
            return ZPoly::zero(self.k);
        }
        let mut coeffs = vec![MultiPoly::zero(self.k); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                coeffs[i + j] = coeffs[i + j].add(&a.mul(b));
            }
        }
        ZPoly::new(self.k, coeffs)
    }

    pub fn scale(&self, s: &Rat) -> ZPoly {
        ZPoly::new(self.k, self.coeffs.iter().map(|c| c.scale(s)).collect())
    }

    /// Contour translation z ↦ z + s.
    pub fn shift_z(&self, s: &Rat) -> ZPoly {
        let n = self.coeffs.len();
        let mut out = vec![MultiPoly::zero(self.k); n];
        for (i, c) in self.coeffs.iter().enumerate() {
            // c * (z + s)^i contributes C(i, j) s^{i-j} to z^j.
            let mut binom = Rat::one();
            // walk j from i down to 0 maintaining C(i, j) * s^{i-j}
            let mut factor = Rat::one();
            for j in (0..=i).rev() {
                out[j] = out[j].add(&c.scale(&(&binom * &factor)));
                if j > 0 {
                    // C(i, j-1) = C(i, j) * j / (i - j + 1)
                    binom = binom * Rat::from_integer(Int::from(j as i64))
                        / Rat::from_integer(Int::from((i - j + 1) as i64));
                    factor = &factor * s;
                }
            }
        }
        ZPoly::new(self.k, out)
    }
}

/// Evaluates p at ξ + z·e (free-function form of `MultiPoly::substitute_line`).
pub fn substitute_line(p: &MultiPoly, e: &[Int]) -> Result<ZPoly> {
    p.substitute_line(e)
}

/// Truncated power series with MultiPoly coefficients (index = power of t).
fn series_mul(a: &[MultiPoly], b: &[MultiPoly], order: usize, k: usize) -> Vec<MultiPoly> {
    let mut out = vec![MultiPoly::zero(k); order + 1];
    for (i, x) in a.iter().enumerate().take(order + 1) {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            if i + j > order {
                break;
            }
            out[i + j] = out[i + j].add(&x.mul(y));
        }
    }
    out
}

/// Sum of the residues of num / Π factor_i^{mult_i} over all poles in z,
/// computed as minus the residue at infinity: substitute z = 1/t and read off
/// the t-coefficient of order (z-deg num) - (z-deg denom) + 1 of the reversed
/// quotient. Valid because every factor's leading z-coefficient is a nonzero
/// rational constant, which makes the reversed denominator invertible as a
/// power series. The result is exactly a polynomial in ξ.
pub fn total_residue(num: &ZPoly, factors: &[(ZPoly, usize)]) -> Result<MultiPoly> {
    let k = num.k();
    let mut m_total: usize = 0;
    for (f, mult) in factors {
        if f.k() != k {
            return Err(Error::DimensionMismatch {
                context: "total_residue factor",
                expected: k,
                got: f.k(),
            });
        }
        if f.z_degree() != Some(1) {
            return Err(Error::InvalidDenominator(format!(
                "factor has z-degree {:?}, need exactly 1",
                f.z_degree()
            )));
        }
        match f.coeff(1).as_constant() {
            Some(c) if !c.is_zero() => {}
            Some(_) => {
                return Err(Error::InvalidDenominator(
                    "leading z-coefficient is zero".into(),
                ))
            }
            None => {
                return Err(Error::InvalidDenominator(format!(
                    "leading z-coefficient {} is not constant",
                    f.coeff(1)
                )))
            }
        }
        m_total += mult;
    }
    let Some(n_d) = num.z_degree() else {
        return Ok(MultiPoly::zero(k));
    };
    if n_d + 1 < m_total {
        // Degree drop of at least 2: the residue sum vanishes.
        return Ok(MultiPoly::zero(k));
    }
    let order = n_d + 1 - m_total;

    // Reversed numerator: coefficient of t^i is the z^{n_d - i} coefficient.
    let num_rev: Vec<MultiPoly> = (0..=order.min(n_d))
        .map(|i| num.coeff(n_d - i))
        .collect();

    // Reversed denominator as a truncated series: Π (c + a t)^mult.
    let mut denom_rev = vec![MultiPoly::one(k)];
    for (f, mult) in factors {
        let rev = [f.coeff(1), f.coeff(0)];
        for _ in 0..*mult {
            denom_rev = series_mul(&denom_rev, &rev, order, k);
        }
    }

    // Series inverse of denom_rev up to `order`; constant term is a nonzero
    // rational by the factor validation above.
    let c0 = denom_rev[0]
        .as_constant()
        .expect("product of constants is constant");
    debug_assert!(!c0.is_zero());
    let c0_inv = c0.recip();
    let mut inv = vec![MultiPoly::zero(k); order + 1];
    inv[0] = MultiPoly::constant(k, c0_inv.clone());
    for j in 1..=order {
        let mut acc = MultiPoly::zero(k);
        for i in 1..=j {
            if i < denom_rev.len() {
                acc = acc.add(&denom_rev[i].mul(&inv[j - i]));
            }
        }
        inv[j] = acc.scale(&-c0_inv.clone());
    }

    let quotient = series_mul(&num_rev, &inv, order, k);
    Ok(quotient[order].clone())
}

/// Applies a precomputed unimodular change of coordinates so that `e` becomes
/// the last basis direction, checks that the last variable is absent, and
/// returns the polynomial in the first k-1 variables.
pub fn restrict_with(bc: &BasisChange, p: &MultiPoly) -> Result<MultiPoly> {
    let k = p.k();
    assert_eq!(bc.u.len(), k);
    // x_i ↦ Σ_j U[i][j] x'_j
    let forms: Vec<MultiPoly> = (0..k).map(|i| MultiPoly::linear_form(k, &bc.u[i])).collect();
    let q = p.substitute_linear(k, &forms);
    let mut out = MultiPoly::zero(k.saturating_sub(1));
    for (exp, c) in q.terms() {
        if exp[k - 1] != 0 {
            return Err(Error::NotE1Invariant(format!(
                "last variable survives with exponent {} in {}",
                exp[k - 1],
                q
            )));
        }
        out.add_term(exp[..k - 1].to_vec(), c.clone());
    }
    out.recompute_degree();
    Ok(out)
}

/// Restriction of an e-shift-invariant polynomial to the k-1 variable ring
/// transverse to e. Errors with "not e-invariant" when the input shifts.
pub fn restrict_off_direction(p: &MultiPoly, e: &IntVec) -> Result<MultiPoly> {
    if e.len() != p.k() {
        return Err(Error::DimensionMismatch {
            context: "restrict_off_direction direction",
            expected: p.k(),
            got: e.len(),
        });
    }
    let bc = hermite_extend(e)?;
    restrict_with(&bc, p)
}

// ---------------------------------------------------------------------------
// Parsing: terms joined by +/-, term = optional "p/q*" then product of xi^e.

struct Parser<'a> {
    chars: std::iter::Peekable<std::str::Chars<'a>>,
}

impl<'a> Parser<'a> {
    fn new(s: &'a str) -> Self {
        Parser {
            chars: s.chars().peekable(),
        }
    }

    fn skip_ws(&mut self) {
        while self.chars.peek().is_some_and(|c| c.is_whitespace()) {
            self.chars.next();
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.chars.peek().copied()
    }

    fn bump(&mut self) -> Option<char> {
        self.skip_ws();
        self.chars.next()
    }

    fn integer(&mut self) -> Option<Int> {
        self.skip_ws();
        let mut digits = String::new();
        while self.chars.peek().is_some_and(|c| c.is_ascii_digit()) {
            digits.push(self.chars.next().unwrap());
        }
        if digits.is_empty() {
            None
        } else {
            Some(digits.parse().unwrap())
        }
    }
}

fn parse_err(s: &str, message: impl Into<String>) -> Error {
    Error::Invalid {
        field: "class".into(),
        message: format!("{} in {s:?}", message.into()),
    }
}

/// Parses the polynomial grammar "3/2*x1^2*x2 - x3 + 5" into a k-variable
/// polynomial. Whitespace is ignored; a unicode minus is accepted.
pub fn parse_poly(k: usize, input: &str) -> Result<MultiPoly> {
    let normalized: String = input.replace('\u{2212}', "-");
    let mut p = Parser::new(&normalized);
    let mut out = MultiPoly::zero(k);
    let mut first = true;
    loop {
        let sign = match p.peek() {
            None if first => break,
            None => return Err(parse_err(input, "trailing operator")),
            Some('+') => {
                p.bump();
                Rat::one()
            }
            Some('-') => {
                p.bump();
                -Rat::one()
            }
            Some(_) if first => Rat::one(),
            Some(c) => return Err(parse_err(input, format!("expected + or - before '{c}'"))),
        };
        first = false;

        // Optional leading coefficient p or p/q.
        let mut coeff = sign;
        let mut saw_coeff = false;
        if p.peek().is_some_and(|c| c.is_ascii_digit()) {
            let numer = p.integer().unwrap();
            let denom = if p.peek() == Some('/') {
                p.bump();
                let d = p
                    .integer()
                    .ok_or_else(|| parse_err(input, "expected denominator after '/'"))?;
                if d.is_zero() {
                    return Err(parse_err(input, "zero denominator"));
                }
                d
            } else {
                Int::one()
            };
            coeff *= Rat::new(numer, denom);
            saw_coeff = true;
            if p.peek() == Some('*') {
                p.bump();
            }
        }

        // Product of variable powers.
        let mut exp = vec![0u32; k];
        let mut saw_var = false;
        loop {
            match p.peek() {
                Some('x') => {
                    p.bump();
                    let idx = p
                        .integer()
                        .ok_or_else(|| parse_err(input, "expected variable index after 'x'"))?;
                    let idx: usize = idx
                        .try_into()
                        .map_err(|_| parse_err(input, "variable index out of range"))?;
                    if idx == 0 || idx > k {
                        return Err(parse_err(
                            input,
                            format!("variable x{idx} outside x1..x{k}"),
                        ));
                    }
                    let e: u32 = if p.peek() == Some('^') {
                        p.bump();
                        let e = p
                            .integer()
                            .ok_or_else(|| parse_err(input, "expected exponent after '^'"))?;
                        e.try_into()
                            .map_err(|_| parse_err(input, "exponent out of range"))?
                    } else {
                        1
                    };
                    exp[idx - 1] += e;
                    saw_var = true;
                    if p.peek() == Some('*') {
                        p.bump();
                        continue;
                    }
                    break;
                }
                _ if saw_var || saw_coeff => break,
                Some(c) => return Err(parse_err(input, format!("unexpected character '{c}'"))),
                None => return Err(parse_err(input, "empty term")),
            }
        }
        if !saw_var && !saw_coeff {
            return Err(parse_err(input, "empty term"));
        }
        out.add_term(exp, coeff);
        if p.peek().is_none() {
            break;
        }
    }
    out.recompute_degree();
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::{int_vec, rat, rat_int};

    fn xi(k: usize, i: usize) -> MultiPoly {
        MultiPoly::variable(k, i)
    }

    #[test]
    fn substitute_line_examples() {
        // p = x1, e = (1,0) → x1 + z
        let z = xi(2, 0).substitute_line(&int_vec(&[1, 0])).unwrap();
        assert_eq!(z.z_degree(), Some(1));
        assert_eq!(z.coeff(0), xi(2, 0));
        assert_eq!(z.coeff(1), MultiPoly::one(2));

        // p = x1*x2, e = (1,1) → x1*x2 + z(x1+x2) + z^2
        let p = xi(2, 0).mul(&xi(2, 1));
        let z = p.substitute_line(&int_vec(&[1, 1])).unwrap();
        assert_eq!(z.coeff(0), p);
        assert_eq!(z.coeff(1), xi(2, 0).add(&xi(2, 1)));
        assert_eq!(z.coeff(2), MultiPoly::one(2));

        // constants pass through with z-degree 0
        let c = MultiPoly::constant(2, rat_int(5));
        let z = c.substitute_line(&int_vec(&[3, -1])).unwrap();
        assert_eq!(z.z_degree(), Some(0));
        assert_eq!(z.coeff(0), c);

        // dimension mismatch
        assert!(xi(2, 0).substitute_line(&int_vec(&[1])).is_err());
    }

    fn lin_factor(k: usize, w: &[i64], e: &[i64]) -> ZPoly {
        MultiPoly::linear_form(k, &int_vec(w))
            .substitute_line(&int_vec(e))
            .unwrap()
    }

    #[test]
    fn total_residue_examples() {
        // num = 1, factors {(z - 1, 1)} → 1
        let one = ZPoly::from_multi(MultiPoly::one(0));
        let z_minus_1 = ZPoly::new(
            0,
            vec![MultiPoly::constant(0, rat_int(-1)), MultiPoly::one(0)],
        );
        assert_eq!(
            total_residue(&one, &[(z_minus_1, 1)]).unwrap(),
            MultiPoly::one(0)
        );

        // num = 1, factors {(z, 2)} → 0
        let z = ZPoly::new(0, vec![MultiPoly::zero(0), MultiPoly::one(0)]);
        assert_eq!(
            total_residue(&one, &[(z.clone(), 2)]).unwrap(),
            MultiPoly::zero(0)
        );

        // num = z^2, factors {(2z, 3)} → 1/8
        let z2 = ZPoly::new(
            0,
            vec![MultiPoly::zero(0), MultiPoly::zero(0), MultiPoly::one(0)],
        );
        let two_z = z.scale(&rat(2, 1));
        assert_eq!(
            total_residue(&z2, &[(two_z, 3)]).unwrap(),
            MultiPoly::constant(0, rat(1, 8))
        );

        // num = x1 + z, factors {(x1 + z, 1), (x2 + z, 1)} → 1
        let f1 = lin_factor(2, &[1, 0], &[1, 1]);
        let f2 = lin_factor(2, &[0, 1], &[1, 1]);
        let num = f1.clone();
        assert_eq!(
            total_residue(&num, &[(f1, 1), (f2, 1)]).unwrap(),
            MultiPoly::one(2)
        );
    }

    #[test]
    fn total_residue_rejects_bad_factors() {
        // Leading z-coefficient zero: ⟨w, e1⟩ = 0.
        let f = lin_factor(2, &[1, 0], &[0, 1]);
        let num = ZPoly::from_multi(MultiPoly::one(2));
        assert!(matches!(
            total_residue(&num, &[(f, 1)]),
            Err(Error::InvalidDenominator(_))
        ));
        // Non-constant leading coefficient.
        let bad = ZPoly::new(2, vec![MultiPoly::one(2), xi(2, 0)]);
        assert!(total_residue(&num, &[(bad, 1)]).is_err());
        // z-degree ≠ 1.
        let flat = ZPoly::from_multi(MultiPoly::one(2));
        assert!(total_residue(&num, &[(flat, 1)]).is_err());
    }

    #[test]
    fn restrict_examples() {
        // p = x2, e = (1,0) → x1' in one variable
        let p = xi(2, 1);
        let r = restrict_off_direction(&p, &int_vec(&[1, 0])).unwrap();
        assert_eq!(r.k(), 1);
        assert_eq!(r.degree(), Some(1));

        // p = x1 - x2 is (1,1)-invariant
        let p = xi(2, 0).sub(&xi(2, 1));
        let r = restrict_off_direction(&p, &int_vec(&[1, 1])).unwrap();
        assert_eq!(r.k(), 1);
        assert!(!r.is_zero());

        // p = x1 shifts under e = (1,0)
        let p = xi(2, 0);
        assert!(matches!(
            restrict_off_direction(&p, &int_vec(&[1, 0])),
            Err(Error::NotE1Invariant(_))
        ));
    }

    #[test]
    fn shift_z_translates() {
        // (z)^2 shifted by s=3 is z^2 + 6z + 9.
        let z = ZPoly::new(1, vec![MultiPoly::zero(1), MultiPoly::one(1)]);
        let z2 = z.mul(&z);
        let shifted = z2.shift_z(&rat_int(3));
        assert_eq!(shifted.coeff(0), MultiPoly::constant(1, rat_int(9)));
        assert_eq!(shifted.coeff(1), MultiPoly::constant(1, rat_int(6)));
        assert_eq!(shifted.coeff(2), MultiPoly::one(1));
    }

    #[test]
    fn parse_and_render_round_trip() {
        let p = parse_poly(3, "3/2*x1^2*x2 - x3 + 5").unwrap();
        assert_eq!(p.degree(), Some(3));
        assert_eq!(p.num_terms(), 3);
        let rendered = p.to_string();
        let q = parse_poly(3, &rendered).unwrap();
        assert_eq!(p, q);

        assert_eq!(parse_poly(2, "x1 + x1").unwrap(), xi(2, 0).scale(&rat(2, 1)));
        assert_eq!(parse_poly(2, "x1 - x1").unwrap(), MultiPoly::zero(2));
        assert!(parse_poly(2, "x3").is_err());
        assert!(parse_poly(2, "x1 +").is_err());
        assert!(parse_poly(2, "1/0").is_err());
        assert!(parse_poly(1, "y").is_err());
    }

    #[test]
    fn homogeneous_bookkeeping() {
        let p = parse_poly(2, "x1^2 + x1*x2 + x2 - 7").unwrap();
        assert!(!p.is_homogeneous());
        assert_eq!(p.degree(), Some(2));
        let h2 = p.homogeneous_part(2);
        assert_eq!(h2, parse_poly(2, "x1^2 + x1*x2").unwrap());
        assert!(h2.is_homogeneous());
        assert_eq!(p.homogeneous_part(5), MultiPoly::zero(2));
        assert_eq!(
            p.homogeneous_part(0).as_constant().unwrap(),
            rat(-7, 1)
        );
    }
}
