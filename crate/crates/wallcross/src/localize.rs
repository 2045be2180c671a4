//! Closed-form invariant pushforward over spheres for linear torus actions.
//!
//! `sphere_pushforward` is the general residue formula and the layer the
//! wall-crossing engine rests on; `colinear_pushforward` recomputes the
//! colinear special case through a single explicit residue and exists as an
//! independent cross-check of the series route.

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::poly::{total_residue, MultiPoly, ZPoly};
use crate::rat::{pair_ii, Int, IntVec, Rat};
use crate::weights::WeightSystem;

/// The z-linear factor ⟨w, ξ + z·e1⟩ = ⟨w, ξ⟩ + z⟨w, e1⟩.
pub fn weight_factor(k: usize, w: &IntVec, e1: &IntVec) -> ZPoly {
    ZPoly::new(
        k,
        vec![
            MultiPoly::linear_form(k, w),
            MultiPoly::constant(k, Rat::from_integer(pair_ii(w, e1))),
        ],
    )
}

fn precondition(field: &str, message: impl Into<String>) -> Error {
    Error::Invalid {
        field: field.into(),
        message: message.into(),
    }
}

/// (π/T_1)_*[x] for the torus action on the unit sphere of the weight
/// system: the sum of residues of Π⟨x_j, ξ+z e1⟩ / Π⟨w_ν, ξ+z e1⟩^{n_ν}.
/// The result lies in the full k-variable ring and is asserted to be
/// invariant under shifts along e1; callers restrict it off e1 themselves.
pub fn sphere_pushforward(ws: &WeightSystem, x: &MultiPoly, e1: &IntVec) -> Result<MultiPoly> {
    let k = ws.k();
    if e1.len() != k || x.k() != k {
        return Err(Error::DimensionMismatch {
            context: "sphere_pushforward",
            expected: k,
            got: if e1.len() != k { e1.len() } else { x.k() },
        });
    }
    let pos: Vec<&IntVec> = ws
        .entries()
        .iter()
        .filter(|e| e.mult > 0)
        .map(|e| &e.weight)
        .collect();
    for w in &pos {
        if pair_ii(w, e1).is_zero() {
            return Err(precondition(
                "e1",
                format!(
                    "pairs to zero with weight {}",
                    crate::rat::int_vec_to_string(w)
                ),
            ));
        }
    }
    for (i, a) in pos.iter().enumerate() {
        for b in pos.iter().skip(i + 1) {
            if negative_multiples(a, b) {
                return Err(precondition(
                    "weights",
                    format!(
                        "{} and {} are negative multiples of each other",
                        crate::rat::int_vec_to_string(a),
                        crate::rat::int_vec_to_string(b)
                    ),
                ));
            }
        }
    }
    let res = pushforward_core(ws, x, e1)?;
    let shifted = res.substitute_line(e1)?;
    if shifted.z_degree().unwrap_or(0) > 0 {
        return Err(Error::NotE1Invariant(format!(
            "pushforward {res} shifts along {}",
            crate::rat::int_vec_to_string(e1)
        )));
    }
    Ok(res)
}

/// The raw residue computation without precondition or invariance checks;
/// shared with the wall-crossing engine, whose hypotheses hold by
/// construction.
pub(crate) fn pushforward_core(
    ws: &WeightSystem,
    x: &MultiPoly,
    e1: &IntVec,
) -> Result<MultiPoly> {
    let k = ws.k();
    let num = x.substitute_line(e1)?;
    let factors: Vec<(ZPoly, usize)> = ws
        .entries()
        .iter()
        .filter(|e| e.mult > 0)
        .map(|e| (weight_factor(k, &e.weight, e1), e.mult))
        .collect();
    total_residue(&num, &factors)
}

fn negative_multiples(a: &IntVec, b: &IntVec) -> bool {
    let rank = crate::linalg::rank_int(&[a, b]);
    rank == 1 && pair_ii(a, b).is_negative()
}

fn binomial(n: usize, r: usize) -> Rat {
    let mut out = Rat::one();
    for i in 0..r {
        out = out * Rat::new(Int::from((n - i) as i64), Int::from((i + 1) as i64));
    }
    out
}

/// Colinear weight systems only: all weights positive multiples ℓ_ν·w of one
/// primitive w. Computes the same contour integral as a single residue at
/// z = -⟨w,ξ⟩/⟨w,e1⟩ by coefficient extraction in the shifted variable.
/// Used as an independent oracle for `sphere_pushforward`.
pub fn colinear_pushforward(ws: &WeightSystem, x: &MultiPoly, e1: &IntVec) -> Result<MultiPoly> {
    let k = ws.k();
    if e1.len() != k || x.k() != k {
        return Err(Error::DimensionMismatch {
            context: "colinear_pushforward",
            expected: k,
            got: if e1.len() != k { e1.len() } else { x.k() },
        });
    }
    let pos: Vec<(&IntVec, usize)> = ws
        .entries()
        .iter()
        .filter(|e| e.mult > 0)
        .map(|e| (&e.weight, e.mult))
        .collect();
    let n: usize = pos.iter().map(|(_, m)| m).sum();
    if n == 0 {
        return Ok(MultiPoly::zero(k));
    }
    // Primitive common direction.
    let mut g = Int::zero();
    for c in pos[0].0.iter() {
        g = num_integer::gcd(g, c.abs());
    }
    let w0: IntVec = pos[0].0.iter().map(|c| c / &g).collect();
    // Scale factor Π ℓ_ν^{n_ν} and colinearity validation.
    let pivot = (0..k).find(|&i| !w0[i].is_zero()).expect("weights nonzero");
    let mut scale = Rat::one();
    for (w, mult) in &pos {
        let ell = Rat::new(w[pivot].clone(), w0[pivot].clone());
        let consistent = (0..k).all(|i| {
            Rat::from_integer(w[i].clone()) == &ell * Rat::from_integer(w0[i].clone())
        });
        if !consistent || !ell.is_positive() || !ell.denom().is_one() {
            return Err(precondition(
                "weights",
                format!(
                    "{} is not a positive integer multiple of {}",
                    crate::rat::int_vec_to_string(w),
                    crate::rat::int_vec_to_string(&w0)
                ),
            ));
        }
        for _ in 0..*mult {
            scale = scale * &ell;
        }
    }
    let c = pair_ii(&w0, e1);
    if c.is_zero() {
        return Err(precondition("e1", "pairs to zero with the common direction"));
    }
    let c = Rat::from_integer(c);

    // Residue of N(z) / (scale * c^n * (z - z0)^n) at z0 = -⟨w0,ξ⟩/c:
    // the u^{n-1} coefficient of N(u + z0), extracted binomially.
    let num = x.substitute_line(e1)?;
    let z0 = MultiPoly::linear_form(k, &w0).scale(&(-c.clone().recip()));
    let deg = match num.z_degree() {
        None => return Ok(MultiPoly::zero(k)),
        Some(d) => d,
    };
    let mut b = MultiPoly::zero(k);
    for i in (n - 1)..=deg {
        let term = num
            .coeff(i)
            .mul(&z0.pow(i - (n - 1)))
            .scale(&binomial(i, n - 1));
        b = b.add(&term);
    }
    let denom = scale * c.pow(n as i32);
    Ok(b.scale(&denom.recip()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::{int_vec, rat, rat_int};

    #[test]
    fn sphere_pushforward_examples() {
        // {(1,0), (0,1)} mult 1 each, x = 1, e1 = (1,1) → 0 (degree drop 2).
        let ws = WeightSystem::from_raw(2, &[(&[1, 0], 1), (&[0, 1], 1)]).unwrap();
        let e1 = int_vec(&[1, 1]);
        let r = sphere_pushforward(&ws, &MultiPoly::one(2), &e1).unwrap();
        assert!(r.is_zero());

        // x = x1 → 1.
        let x = MultiPoly::variable(2, 0);
        let r = sphere_pushforward(&ws, &x, &e1).unwrap();
        assert_eq!(r, MultiPoly::one(2));

        // k=1, S^3 = {(1) mult 2}, x = ξ → 1.
        let ws = WeightSystem::from_raw(1, &[(&[1], 2)]).unwrap();
        let r = sphere_pushforward(&ws, &MultiPoly::variable(1, 0), &int_vec(&[1])).unwrap();
        assert_eq!(r, MultiPoly::one(1));
    }

    #[test]
    fn sphere_pushforward_preconditions() {
        let ws = WeightSystem::from_raw(2, &[(&[1, 0], 1), (&[0, 1], 1)]).unwrap();
        // e1 pairs to zero with (1,0).
        assert!(sphere_pushforward(&ws, &MultiPoly::one(2), &int_vec(&[0, 1])).is_err());
        // Negative multiples.
        let bad = WeightSystem::from_raw(2, &[(&[1, 1], 1), (&[-2, -2], 1)]).unwrap();
        assert!(sphere_pushforward(&bad, &MultiPoly::one(2), &int_vec(&[1, 0])).is_err());
    }

    #[test]
    fn colinear_examples() {
        // {(1) mult n}, x = ξ^{n-1} → 1.
        for n in 2..6u32 {
            let ws = WeightSystem::from_raw(1, &[(&[1], n as usize)]).unwrap();
            let x = MultiPoly::monomial(1, vec![n - 1], rat_int(1));
            let r = colinear_pushforward(&ws, &x, &int_vec(&[1])).unwrap();
            assert_eq!(r.as_constant().unwrap(), rat_int(1));
        }

        // {(2) mult 2}, x = ξ → 1/4.
        let ws = WeightSystem::from_raw(1, &[(&[2], 2)]).unwrap();
        let r = colinear_pushforward(&ws, &MultiPoly::variable(1, 0), &int_vec(&[1])).unwrap();
        assert_eq!(r.as_constant().unwrap(), rat(1, 4));

        // {(1) mult 2}, x = 1 → 0 (degree defect).
        let ws = WeightSystem::from_raw(1, &[(&[1], 2)]).unwrap();
        let r = colinear_pushforward(&ws, &MultiPoly::one(1), &int_vec(&[1])).unwrap();
        assert!(r.is_zero());

        // Non-colinear input rejected.
        let ws = WeightSystem::from_raw(2, &[(&[1, 0], 1), (&[0, 1], 1)]).unwrap();
        assert!(colinear_pushforward(&ws, &MultiPoly::one(2), &int_vec(&[1, 1])).is_err());
    }

    #[test]
    fn sphere_matches_colinear() {
        // Exact agreement of the two routes on colinear systems.
        let cases: Vec<(usize, Vec<(&[i64], usize)>)> = vec![
            (1, vec![(&[1], 3)]),
            (1, vec![(&[1], 1), (&[2], 2)]),
            (2, vec![(&[1, 1], 2), (&[2, 2], 1)]),
            (2, vec![(&[1, -1], 1), (&[3, -3], 2)]),
        ];
        for (k, raw) in cases {
            let ws = WeightSystem::from_raw(k, &raw).unwrap();
            let e1: Vec<_> = if k == 1 {
                int_vec(&[1])
            } else {
                int_vec(&[1, 0])
            };
            let n = ws.total_multiplicity();
            for d in 0..n {
                let x = MultiPoly::linear_form(k, &ws.entries()[0].weight)
                    .pow(d)
                    .add(&MultiPoly::variable(k, 0).pow(d));
                let a = sphere_pushforward(&ws, &x, &e1).unwrap();
                let b = colinear_pushforward(&ws, &x, &e1).unwrap();
                assert_eq!(a, b, "k={k} d={d}");
            }
        }
    }

    #[test]
    fn e1_flip_negates_top_residue() {
        // On the k=1 closed form, flipping e1 negates the degree-matching
        // pushforward and preserves the vanishing ones.
        for (ells, d) in [(vec![1i64, 1], 1usize), (vec![2, 3], 1), (vec![1, 2, 3], 2)] {
            let raw: Vec<(&[i64], usize)> =
                ells.iter().map(|l| (std::slice::from_ref(l), 1)).collect();
            let ws = WeightSystem::from_raw(1, &raw).unwrap();
            let x = MultiPoly::monomial(1, vec![d as u32], rat_int(1));
            let plus = sphere_pushforward(&ws, &x, &int_vec(&[1])).unwrap();
            let minus = sphere_pushforward(&ws, &x, &int_vec(&[-1])).unwrap();
            assert_eq!(plus, minus.neg());
        }
    }
}
