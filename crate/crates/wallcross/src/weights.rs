//! Weight systems and their chamber structure: properness, regularity,
//! super-regularity, wall enumeration, level classification, and generic
//! path planning with crossing detection.
//!
//! Walls follow the completed-cone convention: a wall is the cone over *all*
//! weights lying on a hyperplane that is spanned by weights, so membership in
//! a wall means membership in that cone. Entries with multiplicity 0 take
//! part in the wall geometry but drop out of every residue denominator.

use num_traits::{One, Signed, Zero};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::linalg::{
    fm_feasible_point, positive_basic_supports, primitive_normal, rank_int,
    solve_nonneg_combination, Constraint,
};
use crate::rat::{is_zero_vec_rat, pair_ir, Int, IntVec, Rat, RatVec};

/// One character: a nonzero weight vector with a nonnegative multiplicity
/// (the complex dimension of the space it acts on).
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct WeightEntry {
    pub weight: IntVec,
    pub mult: usize,
}

/// A linear torus action: rank k and a list of weighted characters.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct WeightSystem {
    k: usize,
    entries: Vec<WeightEntry>,
}

impl WeightSystem {
    pub fn new(k: usize, entries: Vec<WeightEntry>) -> Result<Self> {
        for (i, e) in entries.iter().enumerate() {
            if e.weight.len() != k {
                return Err(Error::DimensionMismatch {
                    context: "weight entry",
                    expected: k,
                    got: e.weight.len(),
                });
            }
            if e.weight.iter().all(Zero::is_zero) {
                return Err(Error::Invalid {
                    field: format!("weights[{i}].w"),
                    message: "weight vectors must be nonzero".into(),
                });
            }
        }
        Ok(WeightSystem { k, entries })
    }

    pub fn from_raw(k: usize, raw: &[(&[i64], usize)]) -> Result<Self> {
        let entries = raw
            .iter()
            .map(|(w, m)| WeightEntry {
                weight: w.iter().map(|&x| Int::from(x)).collect(),
                mult: *m,
            })
            .collect();
        Self::new(k, entries)
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn entries(&self) -> &[WeightEntry] {
        &self.entries
    }

    /// n = Σ n_ν, the complex dimension of V.
    pub fn total_multiplicity(&self) -> usize {
        self.entries.iter().map(|e| e.mult).sum()
    }

    pub fn is_empty_system(&self) -> bool {
        self.entries.iter().all(|e| e.mult == 0)
    }

    /// Weights of entries with positive multiplicity (the moment-map image
    /// is their cone).
    pub fn positive_weights(&self) -> Vec<IntVec> {
        self.entries
            .iter()
            .filter(|e| e.mult > 0)
            .map(|e| e.weight.clone())
            .collect()
    }

    pub fn all_weights(&self) -> Vec<IntVec> {
        self.entries.iter().map(|e| e.weight.clone()).collect()
    }

    /// Rank of the full collection; quotients are empty unless this is k.
    pub fn spans(&self) -> bool {
        let refs: Vec<&IntVec> = self.entries.iter().map(|e| &e.weight).collect();
        rank_int(&refs) == self.k
    }

    /// Entries sorted for use as a memo key.
    pub fn canonical_entries(&self) -> Vec<WeightEntry> {
        let mut v = self.entries.clone();
        v.sort();
        v
    }
}

/// A codimension-one complete cone: every entry whose weight lies on the
/// spanned hyperplane is in the index set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Wall {
    pub index_set: Vec<usize>,
    pub normal: IntVec,
}

impl Wall {
    /// Exact membership of τ in the wall's cone.
    pub fn cone_contains(&self, ws: &WeightSystem, tau: &[Rat]) -> Result<bool> {
        let vectors: Vec<IntVec> = self
            .index_set
            .iter()
            .map(|&i| ws.entries()[i].weight.clone())
            .collect();
        Ok(solve_nonneg_combination(&vectors, tau)?.is_some())
    }
}

/// All distinct walls: for every (k-1)-subset of rank k-1 take the spanned
/// hyperplane, complete the index set with all weights on it, deduplicate by
/// primitive normal. For k = 1 this yields the single origin wall with empty
/// index set.
pub fn enumerate_walls(ws: &WeightSystem) -> Result<Vec<Wall>> {
    let k = ws.k();
    if k == 0 {
        return Ok(vec![]);
    }
    let n = ws.entries().len();
    let mut walls: Vec<Wall> = Vec::new();
    let mut seen: Vec<IntVec> = Vec::new();

    for subset in subsets_of_size(n, k - 1) {
        let span: Vec<IntVec> = subset
            .iter()
            .map(|&i| ws.entries()[i].weight.clone())
            .collect();
        let refs: Vec<&IntVec> = span.iter().collect();
        if rank_int(&refs) + 1 != k {
            continue;
        }
        let normal = primitive_normal(&span, k)?;
        if seen.contains(&normal) {
            continue;
        }
        let index_set: Vec<usize> = (0..n)
            .filter(|&i| crate::rat::pair_ii(&ws.entries()[i].weight, &normal).is_zero())
            .collect();
        seen.push(normal.clone());
        walls.push(Wall { index_set, normal });
    }
    walls.sort_by(|a, b| a.normal.cmp(&b.normal));
    Ok(walls)
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

/// Strict properness certificate: ξ with ⟨w_ν, ξ⟩ < 0 for every entry with
/// positive multiplicity, or None.
pub fn check_proper(ws: &WeightSystem) -> Option<RatVec> {
    let pos = ws.positive_weights();
    if pos.is_empty() {
        return Some(vec![Rat::zero(); ws.k()]);
    }
    let constraints: Vec<Constraint> = pos
        .iter()
        .map(|w| {
            Constraint::new(
                w.iter().map(|x| Rat::from_integer(x.clone())).collect(),
                Rat::zero(),
                true,
            )
        })
        .collect();
    fm_feasible_point(&constraints, ws.k())
}

/// Classification of a level τ relative to the chamber structure.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LevelClass {
    /// Outside the moment cone: the quotient is empty.
    OutsideCone,
    /// On a wall: τ is not a regular value.
    OnWall(Wall),
    /// Regular with finite isotropy only; the quotient may be an orbifold.
    Regular,
    /// Every positive representation uses a Z-generating set: free action.
    SuperRegular,
}

impl LevelClass {
    pub fn is_regular(&self) -> bool {
        matches!(self, LevelClass::Regular | LevelClass::SuperRegular)
    }

    pub fn label(&self) -> String {
        match self {
            LevelClass::OutsideCone => "outside_cone".into(),
            LevelClass::OnWall(w) => {
                let idx: Vec<String> =
                    w.index_set.iter().map(|i| (i + 1).to_string()).collect();
                format!("on_wall I={{{}}}", idx.join(","))
            }
            LevelClass::Regular => "regular".into(),
            LevelClass::SuperRegular => "super_regular".into(),
        }
    }
}

/// Classifies τ: outside the moment cone, on a wall, regular, or
/// super-regular. Super-regularity reduces to the basic positive supports:
/// every index set with a positive representation contains such a support,
/// and Z-generation is monotone under enlarging the index set.
pub fn classify_level(ws: &WeightSystem, tau: &[Rat]) -> Result<LevelClass> {
    if tau.len() != ws.k() {
        return Err(Error::DimensionMismatch {
            context: "classify_level tau",
            expected: ws.k(),
            got: tau.len(),
        });
    }
    if solve_nonneg_combination(&ws.positive_weights(), tau)?.is_none() {
        return Ok(LevelClass::OutsideCone);
    }
    for wall in enumerate_walls(ws)? {
        if wall.cone_contains(ws, tau)? {
            return Ok(LevelClass::OnWall(wall));
        }
    }
    let all = ws.all_weights();
    let supports = positive_basic_supports(&all, tau);
    let k = ws.k();
    let super_regular = supports.iter().all(|(subset, _)| {
        let vs: Vec<IntVec> = subset.iter().map(|&i| all[i].clone()).collect();
        vs.len() == k && crate::linalg::lattice_generates(&vs, k)
    });
    Ok(if super_regular {
        LevelClass::SuperRegular
    } else {
        LevelClass::Regular
    })
}

/// A signed transversal crossing of a wall by a path.
#[derive(Debug, Clone)]
pub struct CrossingEvent {
    /// Position along the segment, in (0, 1).
    pub parameter: Rat,
    pub wall: Wall,
    /// The crossing point τ_0; lies in the wall's cone and in no other wall.
    pub point: RatVec,
    /// Primitive normal, sign-fixed so the path crosses in the +e1 direction.
    pub e1: IntVec,
    /// Always +1: every crossing is traversed in the +η direction.
    pub sign: i8,
}

/// Plans a straight generic segment from a perturbed point outside the
/// moment cone to τ, returning the outside endpoint and the ordered wall
/// crossings. Genericity is enforced by rejection: re-perturb while any
/// crossing point lies in two walls, two events share a parameter, the
/// segment meets a wall hyperplane non-transversally, or an endpoint ends up
/// on a wall. The perturbation denominator grows with each retry.
pub fn plan_path(
    ws: &WeightSystem,
    tau: &[Rat],
    seed: u64,
    retries: usize,
) -> Result<(RatVec, Vec<CrossingEvent>)> {
    if !classify_level(ws, tau)?.is_regular() {
        return Err(Error::NonRegularTau(format!(
            "cannot plan a path to {}",
            crate::rat::rat_vec_to_string(tau)
        )));
    }
    let xi_proper = check_proper(ws).ok_or(Error::ImproperSystem)?;
    let k = ws.k();
    // Base endpoint: -Σ n_ν w_ν, guaranteed strictly outside the cone.
    let mut base = vec![Rat::zero(); k];
    for e in ws.entries() {
        for (j, x) in e.weight.iter().enumerate() {
            base[j] -= Rat::from_integer(x.clone() * Int::from(e.mult as i64));
        }
    }
    let amp: Rat = base
        .iter()
        .map(|x| x.abs())
        .max()
        .unwrap_or_else(Rat::one)
        .max(Rat::one())
        / Rat::from_integer(Int::from(4));
    let walls = enumerate_walls(ws)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    'attempt: for attempt in 0..retries {
        let denom: i64 = 16i64 << attempt.min(24);
        let tau_out: RatVec = base
            .iter()
            .map(|b| {
                let numer = rng.gen_range(-denom..=denom);
                b + &amp * Rat::new(Int::from(numer), Int::from(denom))
            })
            .collect();
        // Strictly outside the moment cone.
        if !pair_ir_rat(&xi_proper, &tau_out).is_positive() {
            continue 'attempt;
        }
        // Endpoints off every wall.
        for wall in &walls {
            if wall.cone_contains(ws, &tau_out)? {
                continue 'attempt;
            }
        }
        let eta: RatVec = tau
            .iter()
            .zip(&tau_out)
            .map(|(a, b)| a - b)
            .collect();
        let mut events: Vec<CrossingEvent> = Vec::new();
        for wall in &walls {
            let a = pair_ir(&wall.normal, &tau_out);
            let b = pair_ir(&wall.normal, &eta);
            if b.is_zero() {
                if a.is_zero() {
                    // Segment inside the wall's hyperplane: not transversal.
                    continue 'attempt;
                }
                continue;
            }
            let t = -a / &b;
            if !t.is_positive() || t >= Rat::one() {
                continue;
            }
            let point: RatVec = tau_out
                .iter()
                .zip(&eta)
                .map(|(o, d)| o + &t * d)
                .collect();
            if !wall.cone_contains(ws, &point)? {
                continue;
            }
            let mut e1 = wall.normal.clone();
            if pair_ir(&e1, &eta).is_negative() {
                for x in e1.iter_mut() {
                    *x = -x.clone();
                }
            }
            events.push(CrossingEvent {
                parameter: t,
                wall: wall.clone(),
                point,
                e1,
                sign: 1,
            });
        }
        // Each crossing point must lie in exactly one wall.
        for ev in &events {
            for wall in &walls {
                if wall.normal != ev.wall.normal && wall.cone_contains(ws, &ev.point)? {
                    continue 'attempt;
                }
            }
        }
        events.sort_by(|a, b| a.parameter.cmp(&b.parameter));
        if events.windows(2).any(|w| w[0].parameter == w[1].parameter) {
            continue 'attempt;
        }
        return Ok((tau_out, events));
    }
    Err(Error::PathPlanningFailed(retries))
}

fn pair_ir_rat(a: &[Rat], b: &[Rat]) -> Rat {
    crate::rat::pair_rr(a, b)
}

/// True iff τ is the zero level (never regular: it lies in the closure of
/// every wall).
pub fn is_zero_level(tau: &[Rat]) -> bool {
    is_zero_vec_rat(tau)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::{int_vec, rat, rat_vec};

    fn standard_ws() -> WeightSystem {
        WeightSystem::from_raw(2, &[(&[1, 0], 1), (&[0, 1], 1), (&[1, 1], 1)]).unwrap()
    }

    #[test]
    fn properness_examples() {
        let ws = standard_ws();
        let xi = check_proper(&ws).unwrap();
        for e in ws.entries() {
            assert!(pair_ir(&e.weight, &xi).is_negative());
        }

        let opp = WeightSystem::from_raw(1, &[(&[1], 1), (&[-1], 1)]).unwrap();
        assert!(check_proper(&opp).is_none());

        let ws2 = WeightSystem::from_raw(2, &[(&[1, 2], 1), (&[2, 1], 1)]).unwrap();
        let xi = check_proper(&ws2).unwrap();
        for e in ws2.entries() {
            assert!(pair_ir(&e.weight, &xi).is_negative());
        }
    }

    #[test]
    fn wall_enumeration() {
        let ws = standard_ws();
        let walls = enumerate_walls(&ws).unwrap();
        assert_eq!(walls.len(), 3);
        for w in &walls {
            assert_eq!(w.index_set.len(), 1);
        }

        // k=1: single origin wall with empty index set.
        let ws1 = WeightSystem::from_raw(1, &[(&[1], 3)]).unwrap();
        let walls = enumerate_walls(&ws1).unwrap();
        assert_eq!(walls.len(), 1);
        assert!(walls[0].index_set.is_empty());
        assert_eq!(walls[0].normal, int_vec(&[1]));

        // Colinear weights grouped on one hyperplane.
        let ws3 = WeightSystem::from_raw(2, &[(&[1, 0], 1), (&[2, 0], 1), (&[0, 1], 1)]).unwrap();
        let walls = enumerate_walls(&ws3).unwrap();
        assert_eq!(walls.len(), 2);
        let by_len: Vec<usize> = walls.iter().map(|w| w.index_set.len()).collect();
        assert!(by_len.contains(&2) && by_len.contains(&1));
    }

    #[test]
    fn classification_examples() {
        let ws = standard_ws();
        match classify_level(&ws, &rat_vec(&[1, 1])).unwrap() {
            LevelClass::OnWall(w) => assert_eq!(w.index_set, vec![2]),
            other => panic!("expected on_wall, got {other:?}"),
        }
        assert_eq!(
            classify_level(&ws, &rat_vec(&[2, 1])).unwrap(),
            LevelClass::SuperRegular
        );
        assert_eq!(
            classify_level(&ws, &rat_vec(&[-1, 0])).unwrap(),
            LevelClass::OutsideCone
        );
        // Weighted projective line: regular but not super-regular.
        let wp = WeightSystem::from_raw(1, &[(&[1], 1), (&[2], 1)]).unwrap();
        assert_eq!(
            classify_level(&wp, &rat_vec(&[1])).unwrap(),
            LevelClass::Regular
        );
        // Scale invariance of the classification.
        for lambda in [rat(1, 3), rat(7, 2)] {
            let tau: Vec<Rat> = rat_vec(&[2, 1]).iter().map(|x| x * &lambda).collect();
            assert_eq!(classify_level(&ws, &tau).unwrap(), LevelClass::SuperRegular);
        }
    }

    #[test]
    fn zero_multiplicity_moves_tau_outside() {
        // Weights with multiplicity 0 keep their wall geometry but do not
        // contribute to the moment cone.
        let ws =
            WeightSystem::from_raw(2, &[(&[1, 0], 2), (&[0, 1], 0), (&[1, 1], 0)]).unwrap();
        assert_eq!(
            classify_level(&ws, &rat_vec(&[2, 1])).unwrap(),
            LevelClass::OutsideCone
        );
        assert_eq!(enumerate_walls(&ws).unwrap().len(), 3);
    }

    #[test]
    fn path_planning_crossings() {
        // k=1: one crossing at the origin wall.
        let ws = WeightSystem::from_raw(1, &[(&[1], 3)]).unwrap();
        let (tau_out, events) = plan_path(&ws, &rat_vec(&[1]), 0, 64).unwrap();
        assert!(tau_out[0].is_negative());
        assert_eq!(events.len(), 1);
        assert_eq!(events[0].e1, int_vec(&[1]));
        assert!(events[0].point[0].is_zero());

        // Product of projective lines: both coordinate rays crossed.
        let ws = WeightSystem::from_raw(2, &[(&[1, 0], 2), (&[0, 1], 2)]).unwrap();
        let (_, events) = plan_path(&ws, &rat_vec(&[1, 1]), 0, 64).unwrap();
        assert_eq!(events.len(), 2);
        for ev in &events {
            assert!(ev.parameter.is_positive() && ev.parameter < Rat::one());
            // Point re-verifies membership in exactly its own wall.
            assert!(ev.wall.cone_contains(&ws, &ev.point).unwrap());
        }

        // Standard example at a regular super-regular point.
        let ws = standard_ws();
        for seed in 0..5 {
            let (tau_out, events) = plan_path(&ws, &rat_vec(&[2, 1]), seed, 64).unwrap();
            assert!(!events.is_empty());
            let xi = check_proper(&ws).unwrap();
            assert!(crate::rat::pair_rr(&xi, &tau_out).is_positive());
        }
    }

    #[test]
    fn plan_path_rejects_non_regular() {
        let ws = standard_ws();
        assert!(matches!(
            plan_path(&ws, &rat_vec(&[1, 1]), 0, 8),
            Err(Error::NonRegularTau(_))
        ));
    }
}
