//! Exact scalar types. Every number in the library is an arbitrary-precision
//! integer or rational; no floating point anywhere.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

pub type Int = BigInt;
pub type Rat = BigRational;

/// Vector in t* or t with rational entries.
pub type RatVec = Vec<Rat>;
/// Lattice vector (element of Λ or Λ*).
pub type IntVec = Vec<Int>;

pub fn int(v: i64) -> Int {
    Int::from(v)
}

pub fn rat(p: i64, q: i64) -> Rat {
    Rat::new(Int::from(p), Int::from(q))
}

pub fn rat_int(p: i64) -> Rat {
    Rat::from_integer(Int::from(p))
}

pub fn int_vec(v: &[i64]) -> IntVec {
    v.iter().map(|&x| Int::from(x)).collect()
}

pub fn rat_vec(v: &[i64]) -> RatVec {
    v.iter().map(|&x| rat_int(x)).collect()
}

/// Parses "p/q" or "p" with optional sign. Used for JSON round-trips.
pub fn parse_rat(s: &str) -> Result<Rat> {
    let s = s.trim();
    let invalid = || Error::Invalid {
        field: "rational".into(),
        message: format!("cannot parse {s:?} as p/q"),
    };
    match s.split_once('/') {
        Some((p, q)) => {
            let p: Int = p.trim().parse().map_err(|_| invalid())?;
            let q: Int = q.trim().parse().map_err(|_| invalid())?;
            if q.is_zero() {
                return Err(Error::Invalid {
                    field: "rational".into(),
                    message: format!("zero denominator in {s:?}"),
                });
            }
            Ok(Rat::new(p, q))
        }
        None => {
            let p: Int = s.parse().map_err(|_| invalid())?;
            Ok(Rat::from_integer(p))
        }
    }
}

/// Renders a rational as "p" or "p/q"; `parse_rat` inverts this exactly.
pub fn rat_to_string(r: &Rat) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn rat_vec_to_string(v: &[Rat]) -> String {
    let inner: Vec<String> = v.iter().map(rat_to_string).collect();
    format!("({})", inner.join(", "))
}

pub fn int_vec_to_string(v: &[Int]) -> String {
    let inner: Vec<String> = v.iter().map(|x| x.to_string()).collect();
    format!("({})", inner.join(", "))
}

/// Exact pairing ⟨a, b⟩ of an integer covector with a rational vector.
pub fn pair_ir(a: &[Int], b: &[Rat]) -> Rat {
    debug_assert_eq!(a.len(), b.len());
    let mut acc = Rat::zero();
    for (x, y) in a.iter().zip(b) {
        acc += Rat::from_integer(x.clone()) * y;
    }
    acc
}

pub fn pair_ii(a: &[Int], b: &[Int]) -> Int {
    debug_assert_eq!(a.len(), b.len());
    let mut acc = Int::zero();
    for (x, y) in a.iter().zip(b) {
        acc += x * y;
    }
    acc
}

pub fn pair_rr(a: &[Rat], b: &[Rat]) -> Rat {
    debug_assert_eq!(a.len(), b.len());
    let mut acc = Rat::zero();
    for (x, y) in a.iter().zip(b) {
        acc += x * y;
    }
    acc
}

pub fn is_zero_vec_int(v: &[Int]) -> bool {
    v.iter().all(Zero::is_zero)
}

pub fn is_zero_vec_rat(v: &[Rat]) -> bool {
    v.iter().all(Zero::is_zero)
}

/// Scales a rational vector to a primitive integer vector pointing the same way.
pub fn primitive_from_rational(v: &[Rat]) -> Option<IntVec> {
    if is_zero_vec_rat(v) {
        return None;
    }
    let mut lcm = Int::one();
    for x in v {
        lcm = num_integer::lcm(lcm, x.denom().clone());
    }
    let ints: IntVec = v
        .iter()
        .map(|x| x.numer() * (&lcm / x.denom()))
        .collect();
    let mut g = Int::zero();
    for x in &ints {
        g = num_integer::gcd(g, x.abs());
    }
    Some(ints.iter().map(|x| x / &g).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rational_round_trip() {
        for s in ["3/2", "-7", "0", "22/7", "-5/3"] {
            let r = parse_rat(s).unwrap();
            assert_eq!(parse_rat(&rat_to_string(&r)).unwrap(), r);
        }
        assert_eq!(parse_rat("4/6").unwrap(), rat(2, 3));
        assert!(parse_rat("1/0").is_err());
        assert!(parse_rat("x").is_err());
    }

    #[test]
    fn primitive_scaling() {
        let v = vec![rat(1, 2), rat(-3, 4)];
        assert_eq!(primitive_from_rational(&v).unwrap(), int_vec(&[2, -3]));
        assert_eq!(primitive_from_rational(&[Rat::zero()]), None);
    }
}
