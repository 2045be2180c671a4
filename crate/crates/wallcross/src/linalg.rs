//! Exact rational and integer linear algebra: rank, solving, cone membership,
//! strict feasibility, lattice normal forms and primitive vectors.
//!
//! Everything here works over arbitrary-precision rationals or integers. The
//! LP-style routines are deliberately small: instances in this library have a
//! handful of variables and constraints, so enumeration of basic solutions and
//! Fourier-Motzkin elimination are both exact and fast enough.

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::rat::{pair_ii, IntVec, Rat, RatVec};
use crate::rat::{Int};

/// Row-reduces a rational matrix in place, returning the pivot columns.
fn row_reduce(rows: &mut Vec<RatVec>) -> Vec<usize> {
    let nrows = rows.len();
    if nrows == 0 {
        return vec![];
    }
    let ncols = rows[0].len();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        let Some(p) = (r..nrows).find(|&i| !rows[i][c].is_zero()) else {
            continue;
        };
        rows.swap(r, p);
        let inv = rows[r][c].recip();
        for x in rows[r].iter_mut() {
            *x *= &inv;
        }
        for i in 0..nrows {
            if i != r && !rows[i][c].is_zero() {
                let f = rows[i][c].clone();
                for c2 in 0..ncols {
                    let d = &rows[r][c2] * &f;
                    rows[i][c2] -= d;
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == nrows {
            break;
        }
    }
    pivots
}

/// Rank of a family of integer vectors.
pub fn rank_int(vectors: &[&IntVec]) -> usize {
    let mut rows: Vec<RatVec> = vectors
        .iter()
        .map(|v| v.iter().map(|x| Rat::from_integer(x.clone())).collect())
        .collect();
    row_reduce(&mut rows).len()
}

/// Solves `A c = target` where the columns of A are the given vectors,
/// assuming the columns are linearly independent. Returns None when
/// inconsistent.
fn solve_independent_columns(columns: &[&IntVec], target: &[Rat]) -> Option<Vec<Rat>> {
    let k = target.len();
    let m = columns.len();
    // Augmented system, rows indexed by ambient coordinate.
    let mut rows: Vec<RatVec> = (0..k)
        .map(|i| {
            let mut row: RatVec = columns
                .iter()
                .map(|v| Rat::from_integer(v[i].clone()))
                .collect();
            row.push(target[i].clone());
            row
        })
        .collect();
    let pivots = row_reduce(&mut rows);
    // Inconsistent iff the augmented column is a pivot.
    if pivots.contains(&m) {
        return None;
    }
    if pivots.len() < m {
        // Columns were dependent; caller filters these out.
        return None;
    }
    let mut c = vec![Rat::zero(); m];
    for (r, &p) in pivots.iter().enumerate() {
        c[p] = rows[r][m].clone();
    }
    Some(c)
}

fn subsets_of_size(n: usize, r: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(r);
    fn rec(start: usize, n: usize, r: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == r {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            if n - i < r - cur.len() {
                break;
            }
            cur.push(i);
            rec(i + 1, n, r, cur, out);
            cur.pop();
        }
    }
    rec(0, n, r, &mut cur, &mut out);
    out
}

/// Exact cone membership with certificate: finds c_i >= 0 with
/// sum c_i v_i = target, or None. By Caratheodory it suffices to scan
/// linearly independent column subsets of size at most the ambient dimension.
pub fn solve_nonneg_combination(
    vectors: &[IntVec],
    target: &[Rat],
) -> Result<Option<Vec<Rat>>> {
    let k = target.len();
    for (i, v) in vectors.iter().enumerate() {
        if v.len() != k {
            return Err(Error::DimensionMismatch {
                context: "solve_nonneg_combination vector",
                expected: k,
                got: vectors[i].len(),
            });
        }
    }
    if target.iter().all(Zero::is_zero) {
        return Ok(Some(vec![Rat::zero(); vectors.len()]));
    }
    let n = vectors.len();
    for r in 1..=k.min(n) {
        for subset in subsets_of_size(n, r) {
            let cols: Vec<&IntVec> = subset.iter().map(|&i| &vectors[i]).collect();
            if rank_int(&cols) != r {
                continue;
            }
            if let Some(c) = solve_independent_columns(&cols, target) {
                if c.iter().all(|x| !x.is_negative()) {
                    let mut full = vec![Rat::zero(); n];
                    for (j, &i) in subset.iter().enumerate() {
                        full[i] = c[j].clone();
                    }
                    return Ok(Some(full));
                }
            }
        }
    }
    Ok(None)
}

/// All strictly positive basic representations of `target`: independent index
/// subsets J together with the unique coefficients, all > 0. Every index set
/// admitting a positive representation contains one of these supports, so
/// quantifiers over "all J with positive coefficients" reduce to this list.
pub fn positive_basic_supports(
    vectors: &[IntVec],
    target: &[Rat],
) -> Vec<(Vec<usize>, Vec<Rat>)> {
    let k = target.len();
    let n = vectors.len();
    let mut out = Vec::new();
    for r in 1..=k.min(n) {
        for subset in subsets_of_size(n, r) {
            let cols: Vec<&IntVec> = subset.iter().map(|&i| &vectors[i]).collect();
            if rank_int(&cols) != r {
                continue;
            }
            if let Some(c) = solve_independent_columns(&cols, target) {
                if c.iter().all(|x| x.is_positive()) {
                    out.push((subset, c));
                }
            }
        }
    }
    out
}

/// One linear constraint `coeffs . x <= rhs`, or `< rhs` when strict.
#[derive(Debug, Clone)]
pub struct Constraint {
    pub coeffs: RatVec,
    pub rhs: Rat,
    pub strict: bool,
}

impl Constraint {
    pub fn new(coeffs: RatVec, rhs: Rat, strict: bool) -> Self {
        Constraint { coeffs, rhs, strict }
    }
}

/// Fourier-Motzkin elimination with strict-inequality tracking. Returns a
/// rational point satisfying every constraint, or None if infeasible.
pub fn fm_feasible_point(constraints: &[Constraint], nvars: usize) -> Option<RatVec> {
    // levels[v] holds the constraints live while variable v is the highest
    // still-uneliminated variable.
    let mut levels: Vec<Vec<Constraint>> = Vec::with_capacity(nvars);
    let mut current: Vec<Constraint> = constraints.to_vec();
    for v in (0..nvars).rev() {
        let mut lower = Vec::new(); // coeff < 0: bound from below
        let mut upper = Vec::new(); // coeff > 0: bound from above
        let mut rest = Vec::new();
        for c in &current {
            if c.coeffs[v].is_zero() {
                rest.push(c.clone());
            } else if c.coeffs[v].is_positive() {
                upper.push(c.clone());
            } else {
                lower.push(c.clone());
            }
        }
        for lo in &lower {
            for up in &upper {
                // Scale so the v-coefficients cancel.
                let a = -lo.coeffs[v].clone(); // > 0
                let b = up.coeffs[v].clone(); // > 0
                let mut coeffs = vec![Rat::zero(); nvars];
                for j in 0..nvars {
                    coeffs[j] = &lo.coeffs[j] * &b + &up.coeffs[j] * &a;
                }
                let rhs = &lo.rhs * &b + &up.rhs * &a;
                rest.push(Constraint::new(coeffs, rhs, lo.strict || up.strict));
            }
        }
        levels.push(current);
        current = rest;
    }
    // All variables eliminated: constraints are constant.
    for c in &current {
        if c.strict {
            if !c.rhs.is_positive() {
                return None;
            }
        } else if c.rhs.is_negative() {
            return None;
        }
    }
    // Back-substitute from the first-eliminated (last) variable backwards.
    let mut point = vec![Rat::zero(); nvars];
    for v in 0..nvars {
        let level = &levels[nvars - 1 - v];
        let mut lo: Option<(Rat, bool)> = None;
        let mut hi: Option<(Rat, bool)> = None;
        for c in level {
            if c.coeffs[v].is_zero() {
                continue;
            }
            // Substitute already-chosen higher variables (> v).
            let mut rem = c.rhs.clone();
            for j in (v + 1)..nvars {
                rem -= &c.coeffs[j] * &point[j];
            }
            let bound = rem / &c.coeffs[v];
            if c.coeffs[v].is_positive() {
                // x_v <= bound (or <)
                if hi.as_ref().map_or(true, |(b, s)| {
                    bound < *b || (bound == *b && c.strict && !*s)
                }) {
                    hi = Some((bound, c.strict));
                }
            } else {
                // x_v >= bound (or >)
                if lo.as_ref().map_or(true, |(b, s)| {
                    bound > *b || (bound == *b && c.strict && !*s)
                }) {
                    lo = Some((bound, c.strict));
                }
            }
        }
        point[v] = match (&lo, &hi) {
            (None, None) => Rat::zero(),
            (Some((l, ls)), None) => {
                if *ls {
                    l + Rat::one()
                } else {
                    l.clone()
                }
            }
            (None, Some((h, hs))) => {
                if *hs {
                    h - Rat::one()
                } else {
                    h.clone()
                }
            }
            (Some((l, ls)), Some((h, hs))) => {
                if l < h {
                    (l + h) / Rat::from_integer(Int::from(2))
                } else {
                    // Elimination guarantees l <= h, and l == h only when
                    // both bounds are weak.
                    debug_assert!(l == h && !*ls && !*hs);
                    l.clone()
                }
            }
        };
    }
    debug_assert!(constraints.iter().all(|c| {
        let lhs: Rat = c
            .coeffs
            .iter()
            .zip(&point)
            .map(|(a, x)| a * x)
            .sum();
        if c.strict { lhs < c.rhs } else { lhs <= c.rhs }
    }));
    Some(point)
}

/// Unimodular change of basis: `u` has the prescribed vector as last column,
/// `u_inv` is its exact inverse.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BasisChange {
    pub u: Vec<IntVec>,
    pub u_inv: Vec<IntVec>,
}

fn identity_int(k: usize) -> Vec<IntVec> {
    (0..k)
        .map(|i| {
            (0..k)
                .map(|j| if i == j { Int::one() } else { Int::zero() })
                .collect()
        })
        .collect()
}

/// Integer determinant by cofactor expansion; matrices here are tiny.
pub fn det_int(m: &[IntVec]) -> Int {
    let n = m.len();
    if n == 0 {
        return Int::one();
    }
    if n == 1 {
        return m[0][0].clone();
    }
    let mut det = Int::zero();
    for j in 0..n {
        if m[0][j].is_zero() {
            continue;
        }
        let minor: Vec<IntVec> = (1..n)
            .map(|i| {
                (0..n)
                    .filter(|&c| c != j)
                    .map(|c| m[i][c].clone())
                    .collect()
            })
            .collect();
        let cof = &m[0][j] * det_int(&minor);
        if j % 2 == 0 {
            det += cof;
        } else {
            det -= cof;
        }
    }
    det
}

/// Extends a primitive lattice vector to a lattice basis: returns a
/// unimodular integer matrix whose last column is `v` (with its inverse).
/// Row-reduces `v` to the last standard basis vector by elementary integer
/// operations, tracking the inverse alongside.
pub fn hermite_extend(v: &IntVec) -> Result<BasisChange> {
    let k = v.len();
    if k == 0 || v.iter().all(Zero::is_zero) {
        return Err(Error::Invalid {
            field: "hermite_extend.v".into(),
            message: "vector must be nonzero".into(),
        });
    }
    let mut g = Int::zero();
    for x in v {
        g = num_integer::gcd(g, x.abs());
    }
    if !g.is_one() {
        return Err(Error::Invalid {
            field: "hermite_extend.v".into(),
            message: format!("vector is not primitive (entry gcd {g})"),
        });
    }
    // m * v = work throughout; m_inv = m^{-1}.
    let mut work = v.clone();
    let mut m = identity_int(k);
    let mut m_inv = identity_int(k);

    // row_j -= q * row_i on m; col_i += q * col_j on m_inv.
    let add_op = |m: &mut Vec<IntVec>, m_inv: &mut Vec<IntVec>, work: &mut IntVec, i: usize, j: usize, q: &Int| {
        for c in 0..k {
            let d = q * &m[i][c];
            m[j][c] -= d;
        }
        for r in 0..k {
            let d = q * &m_inv[r][j];
            m_inv[r][i] += d;
        }
        let d = q * &work[i];
        work[j] -= d;
    };

    loop {
        let nz: Vec<usize> = (0..k).filter(|&i| !work[i].is_zero()).collect();
        if nz.len() == 1 {
            break;
        }
        let &i = nz
            .iter()
            .min_by_key(|&&i| work[i].abs())
            .expect("at least two nonzero entries");
        for &j in &nz {
            if j == i {
                continue;
            }
            let q = &work[j] / &work[i];
            if !q.is_zero() {
                add_op(&mut m, &mut m_inv, &mut work, i, j, &q);
            }
        }
        // If every other entry became zero we are done; otherwise the
        // minimum strictly decreased and the loop terminates.
    }

    let pos = (0..k).find(|&i| !work[i].is_zero()).unwrap();
    if pos != k - 1 {
        m.swap(pos, k - 1);
        work.swap(pos, k - 1);
        for row in m_inv.iter_mut() {
            row.swap(pos, k - 1);
        }
    }
    if work[k - 1].is_negative() {
        for c in 0..k {
            m[k - 1][c] = -m[k - 1][c].clone();
        }
        for r in 0..k {
            m_inv[r][k - 1] = -m_inv[r][k - 1].clone();
        }
        work[k - 1] = -work[k - 1].clone();
    }
    debug_assert!(work[k - 1].is_one());
    debug_assert_eq!(det_int(&m_inv).abs(), Int::one());
    debug_assert!((0..k).all(|i| m_inv[i][k - 1] == v[i]));
    Ok(BasisChange { u: m_inv, u_inv: m })
}

/// Primitive integer normal of the hyperplane spanned by rank-(k-1) vectors.
/// Sign is canonical: first nonzero entry positive. Callers flip it to match
/// a crossing direction.
pub fn primitive_normal(span_vectors: &[IntVec], k: usize) -> Result<IntVec> {
    let refs: Vec<&IntVec> = span_vectors.iter().collect();
    for v in span_vectors {
        if v.len() != k {
            return Err(Error::DimensionMismatch {
                context: "primitive_normal span vector",
                expected: k,
                got: v.len(),
            });
        }
    }
    let r = rank_int(&refs);
    if r + 1 != k {
        return Err(Error::Invalid {
            field: "primitive_normal.span_vectors".into(),
            message: format!("rank is {r}, need {}", k - 1),
        });
    }
    // Rational kernel of the (N x k) matrix of span vectors.
    let mut rows: Vec<RatVec> = span_vectors
        .iter()
        .map(|v| v.iter().map(|x| Rat::from_integer(x.clone())).collect())
        .collect();
    let pivots = row_reduce(&mut rows);
    let free: usize = (0..k).find(|c| !pivots.contains(c)).expect("kernel is 1-dim");
    let mut kernel = vec![Rat::zero(); k];
    kernel[free] = Rat::one();
    for (r, &p) in pivots.iter().enumerate() {
        kernel[p] = -rows[r][free].clone();
    }
    let mut e = crate::rat::primitive_from_rational(&kernel).expect("kernel vector nonzero");
    if let Some(first) = e.iter().find(|x| !x.is_zero()) {
        if first.is_negative() {
            for x in e.iter_mut() {
                *x = -x.clone();
            }
        }
    }
    debug_assert!(span_vectors.iter().all(|v| pair_ii(v, &e).is_zero()));
    Ok(e)
}

/// True iff the integer span of the vectors is all of Z^k: the gcd of the
/// maximal minors (the k-th determinantal divisor) must be 1.
pub fn lattice_generates(vectors: &[IntVec], k: usize) -> bool {
    if k == 0 {
        return true;
    }
    if vectors.len() < k {
        return false;
    }
    let mut g = Int::zero();
    for subset in subsets_of_size(vectors.len(), k) {
        let m: Vec<IntVec> = subset.iter().map(|&i| vectors[i].clone()).collect();
        g = num_integer::gcd(g, det_int(&m).abs());
        if g.is_one() {
            return true;
        }
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::{int_vec, rat, rat_vec};

    #[test]
    fn nonneg_combination_coordinate_case() {
        let vs = vec![int_vec(&[1, 0]), int_vec(&[0, 1])];
        let c = solve_nonneg_combination(&vs, &rat_vec(&[1, 1]))
            .unwrap()
            .unwrap();
        assert_eq!(c, rat_vec(&[1, 1]));
        assert_eq!(
            solve_nonneg_combination(&vs, &rat_vec(&[-1, 0])).unwrap(),
            None
        );
    }

    #[test]
    fn nonneg_combination_mixed() {
        let vs = vec![int_vec(&[1, 1]), int_vec(&[1, -1])];
        let c = solve_nonneg_combination(&vs, &rat_vec(&[2, 1]))
            .unwrap()
            .unwrap();
        assert_eq!(c, vec![rat(3, 2), rat(1, 2)]);
        // Re-multiplication reproduces the target exactly.
        let t0 = &c[0] * rat(1, 1) + &c[1] * rat(1, 1);
        let t1 = &c[0] * rat(1, 1) + &c[1] * rat(-1, 1);
        assert_eq!((t0, t1), (rat(2, 1), rat(1, 1)));
    }

    #[test]
    fn nonneg_combination_dimension_mismatch() {
        let vs = vec![int_vec(&[1, 0, 0])];
        assert!(solve_nonneg_combination(&vs, &rat_vec(&[1, 1])).is_err());
    }

    #[test]
    fn hermite_extend_cases() {
        let id = hermite_extend(&int_vec(&[0, 1])).unwrap();
        assert_eq!(id.u[0][1], Int::from(0));
        assert_eq!(id.u[1][1], Int::from(1));

        for v in [
            int_vec(&[1, 1]),
            int_vec(&[2, 3]),
            int_vec(&[3, -5]),
            int_vec(&[2, 3, 5]),
            int_vec(&[6, 10, 15]),
        ] {
            let bc = hermite_extend(&v).unwrap();
            let k = v.len();
            assert_eq!(det_int(&bc.u).abs(), Int::from(1));
            for i in 0..k {
                assert_eq!(bc.u[i][k - 1], v[i]);
            }
            // u * u_inv = identity
            for i in 0..k {
                for j in 0..k {
                    let mut s = Int::from(0);
                    for l in 0..k {
                        s += &bc.u[i][l] * &bc.u_inv[l][j];
                    }
                    assert_eq!(s, Int::from(if i == j { 1 } else { 0 }));
                }
            }
        }
        assert!(hermite_extend(&int_vec(&[2, 4])).is_err());
        assert!(hermite_extend(&int_vec(&[0, 0])).is_err());
    }

    #[test]
    fn primitive_normal_cases() {
        assert_eq!(
            primitive_normal(&[int_vec(&[1, 0])], 2).unwrap(),
            int_vec(&[0, 1])
        );
        assert_eq!(
            primitive_normal(&[int_vec(&[1, 1])], 2).unwrap(),
            int_vec(&[1, -1])
        );
        assert_eq!(
            primitive_normal(&[int_vec(&[1, 0, 0]), int_vec(&[0, 1, 0])], 3).unwrap(),
            int_vec(&[0, 0, 1])
        );
        // k = 1: empty span, kernel is everything, canonical (1).
        assert_eq!(primitive_normal(&[], 1).unwrap(), int_vec(&[1]));
        assert!(primitive_normal(&[int_vec(&[1, 0]), int_vec(&[0, 1])], 2).is_err());
    }

    #[test]
    fn lattice_generation() {
        assert!(lattice_generates(
            &[int_vec(&[1, 0]), int_vec(&[0, 1])],
            2
        ));
        assert!(!lattice_generates(
            &[int_vec(&[2, 0]), int_vec(&[0, 1])],
            2
        ));
        assert!(!lattice_generates(
            &[int_vec(&[1, 1]), int_vec(&[1, -1])],
            2
        ));
        assert!(lattice_generates(
            &[int_vec(&[2, 0]), int_vec(&[3, 0]), int_vec(&[0, 1])],
            2
        ));
        assert!(!lattice_generates(&[int_vec(&[1, 1])], 2));
    }

    #[test]
    fn fm_strict_feasibility() {
        // x < 0, y < 0 feasible.
        let cs = vec![
            Constraint::new(rat_vec(&[1, 0]), rat(0, 1), true),
            Constraint::new(rat_vec(&[0, 1]), rat(0, 1), true),
        ];
        let p = fm_feasible_point(&cs, 2).unwrap();
        assert!(p[0].is_negative() && p[1].is_negative());

        // x <= -1 and x >= 1 infeasible.
        let cs = vec![
            Constraint::new(rat_vec(&[1]), rat(-1, 1), false),
            Constraint::new(rat_vec(&[-1]), rat(-1, 1), false),
        ];
        assert!(fm_feasible_point(&cs, 1).is_none());

        // x < 0 and x > 0 infeasible.
        let cs = vec![
            Constraint::new(rat_vec(&[1]), rat(0, 1), true),
            Constraint::new(rat_vec(&[-1]), rat(0, 1), true),
        ];
        assert!(fm_feasible_point(&cs, 1).is_none());

        // Equality-style sandwich: 2x <= 3, -2x <= -3 forces x = 3/2.
        let cs = vec![
            Constraint::new(rat_vec(&[2]), rat(3, 1), false),
            Constraint::new(rat_vec(&[-2]), rat(-3, 1), false),
        ];
        assert_eq!(fm_feasible_point(&cs, 1).unwrap(), vec![rat(3, 2)]);
    }
}
