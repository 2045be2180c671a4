//! The central recursion: χ^{V,τ} computed by telescoping wall crossings
//! from a chamber outside the moment cone to the chamber of τ. Each crossing
//! reduces to a (k-1)-dimensional toric problem via the total-residue
//! pushforward; the k = 1 base case is a single residue at the origin wall,
//! with the overall sign pinned so that projective space integrates its top
//! power to +1.

use std::collections::HashMap;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use num_traits::{Signed, Zero};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::linalg::hermite_extend;
use crate::localize::{pushforward_core, weight_factor};
use crate::poly::{restrict_with, total_residue, MultiPoly};
use crate::rat::{int_vec_to_string, pair_ir, rat_to_string, rat_vec_to_string, Int, IntVec, Rat, RatVec};
use crate::weights::{
    check_proper, classify_level, enumerate_walls, is_zero_level, plan_path, CrossingEvent,
    LevelClass, Wall, WeightEntry, WeightSystem,
};

/// A toric integration problem: weight system and a level to reduce at.
#[derive(Debug, Clone)]
pub struct ToricProblem {
    pub ws: WeightSystem,
    pub tau: RatVec,
    /// Bookkeeping for the pinned global orientation convention; the
    /// recursion derives every other sign from the crossing direction.
    pub orientation_sign: i8,
}

impl ToricProblem {
    pub fn new(ws: WeightSystem, tau: RatVec) -> Result<Self> {
        if tau.len() != ws.k() {
            return Err(Error::DimensionMismatch {
                context: "ToricProblem tau",
                expected: ws.k(),
                got: tau.len(),
            });
        }
        Ok(ToricProblem {
            ws,
            tau,
            orientation_sign: 1,
        })
    }
}

/// The (k-1)-dimensional problem a crossing reduces to.
#[derive(Debug, Clone)]
pub struct ReducedProblem {
    pub crossing: CrossingEvent,
    pub child: ToricProblem,
    pub pushed_class: MultiPoly,
}

#[derive(Hash, PartialEq, Eq)]
struct MemoKey {
    entries: Vec<WeightEntry>,
    tau: RatVec,
    class: Vec<(Vec<u32>, Rat)>,
}

impl MemoKey {
    fn new(ws: &WeightSystem, tau: &[Rat], class: &MultiPoly) -> Self {
        MemoKey {
            entries: ws.canonical_entries(),
            tau: tau.to_vec(),
            class: class.terms().map(|(e, c)| (e.clone(), c.clone())).collect(),
        }
    }
}

/// Evaluation statistics; `invariance_checks` counts every e1-shift
/// invariance assertion that ran (each one either passed or errored hard).
#[derive(Debug, Clone, Copy, Default)]
pub struct EvalStats {
    pub invariance_checks: usize,
}

/// Evaluator with seed, retry budget, optional data-parallel crossing
/// evaluation, and a per-instance memo table with read-or-compute semantics.
pub struct Evaluator {
    seed: u64,
    retries: usize,
    parallel: bool,
    memo: Mutex<HashMap<MemoKey, Rat>>,
    invariance_checks: AtomicUsize,
}

impl Evaluator {
    pub fn new(seed: u64) -> Self {
        Evaluator {
            seed,
            retries: 64,
            parallel: false,
            memo: Mutex::new(HashMap::new()),
            invariance_checks: AtomicUsize::new(0),
        }
    }

    pub fn with_retries(mut self, retries: usize) -> Self {
        self.retries = retries;
        self
    }

    /// Evaluates sibling crossings through rayon when the `parallel` feature
    /// is compiled in; results are identical regardless of scheduling.
    pub fn with_parallel(mut self, parallel: bool) -> Self {
        self.parallel = parallel;
        self
    }

    pub fn stats(&self) -> EvalStats {
        EvalStats {
            invariance_checks: self.invariance_checks.load(Ordering::Relaxed),
        }
    }

    /// χ^{V,τ}(x): extracts the selection-degree part of x and runs the
    /// wall-crossing recursion. Non-homogeneous inputs are projected
    /// silently; off-degree classes integrate to zero.
    pub fn euler_class(&self, problem: &ToricProblem, x: &MultiPoly) -> Result<Rat> {
        let prep = match self.prepare(problem, x)? {
            Prepared::Shortcut(v) => return Ok(v),
            Prepared::Run(p) => p,
        };
        let key = MemoKey::new(&problem.ws, &problem.tau, &prep.class);
        if let Some(v) = self.memo.lock().unwrap().get(&key) {
            return Ok(v.clone());
        }
        let val = self.run(problem, &prep)?;
        self.memo.lock().unwrap().insert(key, val.clone());
        Ok(val)
    }

    /// Like `euler_class` but additionally returns the crossing tree as
    /// JSON. Runs sequentially and without the memo so the tree is
    /// deterministic for a fixed (input, seed).
    pub fn euler_class_traced(&self, problem: &ToricProblem, x: &MultiPoly) -> Result<(Rat, Value)> {
        self.eval_traced(problem, x)
    }

    fn prepare(&self, problem: &ToricProblem, x: &MultiPoly) -> Result<Prepared> {
        let ws = &problem.ws;
        let k = ws.k();
        if x.k() != k {
            return Err(Error::DimensionMismatch {
                context: "euler_class class",
                expected: k,
                got: x.k(),
            });
        }
        if k == 0 {
            // Rank-zero problem over a point: evaluation of the constant part.
            return Ok(Prepared::Shortcut(
                x.homogeneous_part(0).as_constant().expect("degree-0 part"),
            ));
        }
        if is_zero_level(&problem.tau) {
            return Err(Error::NonRegularTau(
                "tau = 0 lies in the closure of every wall".into(),
            ));
        }
        let n = ws.total_multiplicity();
        if n < k {
            return Ok(Prepared::Shortcut(Rat::zero()));
        }
        let m = n - k;
        let class = x.homogeneous_part(m);
        if class.is_zero() {
            return Ok(Prepared::Shortcut(Rat::zero()));
        }
        match classify_level(ws, &problem.tau)? {
            LevelClass::OutsideCone => return Ok(Prepared::Shortcut(Rat::zero())),
            LevelClass::OnWall(w) => {
                return Err(Error::NonRegularTau(format!(
                    "{} lies on wall I={:?}",
                    rat_vec_to_string(&problem.tau),
                    w.index_set.iter().map(|i| i + 1).collect::<Vec<_>>()
                )))
            }
            LevelClass::Regular | LevelClass::SuperRegular => {}
        }
        if !ws.spans() {
            return Err(Error::NonRegularTau(
                "weights do not span t*; every level in the cone is singular".into(),
            ));
        }
        Ok(Prepared::Run(RunData { class }))
    }

    fn run(&self, problem: &ToricProblem, prep: &RunData) -> Result<Rat> {
        let ws = &problem.ws;
        let val = if ws.k() == 1 {
            self.base_case(ws, &problem.tau, &prep.class)?
        } else {
            let (_tau_out, events) = plan_path(ws, &problem.tau, self.seed, self.retries)?;
            let contributions = self.map_events(&events, |ev| {
                let rp = self.reduce(ws, ev, &prep.class)?;
                self.euler_class(&rp.child, &rp.pushed_class)
            })?;
            contributions.into_iter().sum()
        };
        Ok(apply_sign(val, problem.orientation_sign))
    }

    #[cfg(feature = "parallel")]
    fn map_events<F>(&self, events: &[CrossingEvent], f: F) -> Result<Vec<Rat>>
    where
        F: Fn(&CrossingEvent) -> Result<Rat> + Sync + Send,
    {
        if self.parallel {
            use rayon::prelude::*;
            events.par_iter().map(f).collect()
        } else {
            events.iter().map(f).collect()
        }
    }

    #[cfg(not(feature = "parallel"))]
    fn map_events<F>(&self, events: &[CrossingEvent], f: F) -> Result<Vec<Rat>>
    where
        F: Fn(&CrossingEvent) -> Result<Rat>,
    {
        let _ = self.parallel;
        events.iter().map(f).collect()
    }

    /// Closed-form k = 1 base case: one crossing of the origin wall, e1
    /// pointing into the cone, a single total residue. For {weight (1),
    /// mult n} at τ > 0 this maps ξ^{n-1} to +1, which pins every sign.
    fn base_case(&self, ws: &WeightSystem, tau: &[Rat], class: &MultiPoly) -> Result<Rat> {
        check_proper(ws).ok_or(Error::ImproperSystem)?;
        let s: i64 = if tau[0].is_positive() { 1 } else { -1 };
        let e1: IntVec = vec![Int::from(s)];
        let res = pushforward_core(ws, class, &e1)?;
        self.invariance_checks.fetch_add(1, Ordering::Relaxed);
        match res.as_constant() {
            Some(c) => Ok(c),
            None => Err(Error::NotE1Invariant(format!(
                "base-case residue {res} is not constant"
            ))),
        }
    }

    /// Builds the reduced (k-1)-dimensional problem of one crossing: residue
    /// pushforward of the class, exact e1-invariance assertion, unimodular
    /// restriction of class, weights and τ_0 off the e1 direction, and the
    /// runtime properness assertion on the reduced system.
    pub fn reduce(
        &self,
        ws: &WeightSystem,
        event: &CrossingEvent,
        x: &MultiPoly,
    ) -> Result<ReducedProblem> {
        let k = ws.k();
        let e1 = &event.e1;
        let num = x.substitute_line(e1)?;
        let in_wall: Vec<bool> = {
            let mut v = vec![false; ws.entries().len()];
            for &i in &event.wall.index_set {
                v[i] = true;
            }
            v
        };
        let factors: Vec<_> = ws
            .entries()
            .iter()
            .enumerate()
            .filter(|(i, e)| !in_wall[*i] && e.mult > 0)
            .map(|(_, e)| (weight_factor(k, &e.weight, e1), e.mult))
            .collect();
        let res = total_residue(&num, &factors)?;

        self.invariance_checks.fetch_add(1, Ordering::Relaxed);
        let shifted = res.substitute_line(e1)?;
        if shifted.z_degree().unwrap_or(0) > 0 {
            return Err(Error::NotE1Invariant(format!(
                "reduced class {res} shifts along {}",
                int_vec_to_string(e1)
            )));
        }

        let bc = hermite_extend(e1)?;
        let pushed_class = restrict_with(&bc, &res)?;

        let mut reduced_entries = Vec::with_capacity(event.wall.index_set.len());
        for &i in &event.wall.index_set {
            let entry = &ws.entries()[i];
            let transformed = transform_covector_int(&entry.weight, &bc.u);
            if !transformed[k - 1].is_zero() {
                return Err(Error::Internal(format!(
                    "wall weight {} does not vanish on e1",
                    int_vec_to_string(&entry.weight)
                )));
            }
            reduced_entries.push(WeightEntry {
                weight: transformed[..k - 1].to_vec(),
                mult: entry.mult,
            });
        }
        let tau0_t = transform_covector_rat(&event.point, &bc.u);
        if !tau0_t[k - 1].is_zero() {
            return Err(Error::Internal(
                "crossing point does not lie on the wall hyperplane".into(),
            ));
        }
        let reduced_ws = WeightSystem::new(k - 1, reduced_entries)?;
        if check_proper(&reduced_ws).is_none() {
            return Err(Error::ReducedImproper);
        }
        let child = ToricProblem::new(reduced_ws, tau0_t[..k - 1].to_vec())?;
        Ok(ReducedProblem {
            crossing: event.clone(),
            child,
            pushed_class,
        })
    }

    fn eval_traced(&self, problem: &ToricProblem, x: &MultiPoly) -> Result<(Rat, Value)> {
        let ws = &problem.ws;
        let k = ws.k();
        let n = ws.total_multiplicity();
        let mut node = json!({
            "k": k,
            "n": n,
            "weights": ws.entries().iter().map(|e| json!({
                "w": e.weight.iter().map(|x| x.to_string()).collect::<Vec<_>>(),
                "mult": e.mult,
            })).collect::<Vec<_>>(),
            "tau": problem.tau.iter().map(rat_to_string).collect::<Vec<_>>(),
        });
        let obj = node.as_object_mut().unwrap();
        let prep = match self.prepare(problem, x)? {
            Prepared::Shortcut(v) => {
                obj.insert("value".into(), Value::String(rat_to_string(&v)));
                obj.insert("crossings".into(), Value::Array(vec![]));
                return Ok((v, node));
            }
            Prepared::Run(p) => p,
        };
        obj.insert("selection_degree".into(), json!(n - k));
        obj.insert("class".into(), Value::String(prep.class.to_string()));
        obj.insert(
            "classification".into(),
            Value::String(classify_level(ws, &problem.tau)?.label()),
        );
        let mut total = Rat::zero();
        let mut crossings = Vec::new();
        if k == 1 {
            total = self.base_case(ws, &problem.tau, &prep.class)?;
            obj.insert("base_case".into(), Value::Bool(true));
        } else {
            let (tau_out, events) = plan_path(ws, &problem.tau, self.seed, self.retries)?;
            obj.insert(
                "tau_out".into(),
                json!(tau_out.iter().map(rat_to_string).collect::<Vec<_>>()),
            );
            for ev in &events {
                let rp = self.reduce(ws, ev, &prep.class)?;
                let (sub, child_node) = self.eval_traced(&rp.child, &rp.pushed_class)?;
                crossings.push(json!({
                    "parameter": rat_to_string(&ev.parameter),
                    "wall_index_set": ev.wall.index_set.iter().map(|i| i + 1).collect::<Vec<_>>(),
                    "tau0": ev.point.iter().map(rat_to_string).collect::<Vec<_>>(),
                    "e1": ev.e1.iter().map(|x| x.to_string()).collect::<Vec<_>>(),
                    "sign": ev.sign,
                    "reduced_weights": rp.child.ws.entries().iter().map(|e| json!({
                        "w": e.weight.iter().map(|x| x.to_string()).collect::<Vec<_>>(),
                        "mult": e.mult,
                    })).collect::<Vec<_>>(),
                    "reduced_class": rp.pushed_class.to_string(),
                    "subtotal": rat_to_string(&sub),
                    "child": child_node,
                }));
                total += sub;
            }
        }
        total = apply_sign(total, problem.orientation_sign);
        obj.insert("value".into(), Value::String(rat_to_string(&total)));
        obj.insert("crossings".into(), Value::Array(crossings));
        Ok((total, node))
    }
}

enum Prepared {
    Shortcut(Rat),
    Run(RunData),
}

struct RunData {
    class: MultiPoly,
}

fn apply_sign(v: Rat, sign: i8) -> Rat {
    if sign < 0 {
        -v
    } else {
        v
    }
}

/// w ↦ w·U, the covector in the new basis (columns of U are the new basis).
fn transform_covector_int(w: &IntVec, u: &[IntVec]) -> IntVec {
    let k = w.len();
    (0..k)
        .map(|j| {
            let mut acc = Int::zero();
            for i in 0..k {
                acc += &w[i] * &u[i][j];
            }
            acc
        })
        .collect()
}

fn transform_covector_rat(w: &[Rat], u: &[IntVec]) -> RatVec {
    let k = w.len();
    (0..k)
        .map(|j| {
            let mut acc = Rat::zero();
            for i in 0..k {
                acc += &w[i] * Rat::from_integer(u[i][j].clone());
            }
            acc
        })
        .collect()
}

/// One-shot χ^{V,τ}(x) with a fresh evaluator.
pub fn euler_class(problem: &ToricProblem, x: &MultiPoly, seed: u64) -> Result<Rat> {
    Evaluator::new(seed).euler_class(problem, x)
}

/// χ^{V^I,τ_0}(x_0) for one explicit crossing: the exact difference of Euler
/// classes on the two sides of the wall at τ_0 in direction η.
pub fn wall_crossing_difference(
    ws: &WeightSystem,
    wall: &Wall,
    tau0: &[Rat],
    eta: &[Rat],
    x: &MultiPoly,
    seed: u64,
) -> Result<Rat> {
    let k = ws.k();
    if tau0.len() != k || eta.len() != k {
        return Err(Error::DimensionMismatch {
            context: "wall_crossing_difference",
            expected: k,
            got: if tau0.len() != k { tau0.len() } else { eta.len() },
        });
    }
    let walls = enumerate_walls(ws)?;
    let containing: Vec<&Wall> = {
        let mut v = Vec::new();
        for w in &walls {
            if w.cone_contains(ws, tau0)? {
                v.push(w);
            }
        }
        v
    };
    if containing.len() != 1 {
        return Err(Error::WallCountAtPoint(containing.len()));
    }
    if containing[0].normal != wall.normal {
        return Err(Error::Invalid {
            field: "tau0".into(),
            message: "does not lie in the given wall's cone".into(),
        });
    }
    let b = pair_ir(&wall.normal, eta);
    if b.is_zero() {
        return Err(Error::EtaTangent);
    }
    let mut e1 = wall.normal.clone();
    if b.is_negative() {
        for x in e1.iter_mut() {
            *x = -x.clone();
        }
    }
    let event = CrossingEvent {
        parameter: crate::rat::rat(1, 2),
        wall: wall.clone(),
        point: tau0.to_vec(),
        e1,
        sign: 1,
    };
    let evaluator = Evaluator::new(seed);
    let rp = evaluator.reduce(ws, &event, x)?;
    evaluator.euler_class(&rp.child, &rp.pushed_class)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::parse_poly;
    use crate::rat::{rat, rat_int, rat_vec};

    fn problem(k: usize, raw: &[(&[i64], usize)], tau: &[i64]) -> ToricProblem {
        ToricProblem::new(WeightSystem::from_raw(k, raw).unwrap(), rat_vec(tau)).unwrap()
    }

    #[test]
    fn projective_spaces() {
        for n in 2..=6usize {
            let p = problem(1, &[(&[1], n)], &[1]);
            let x = MultiPoly::monomial(1, vec![(n - 1) as u32], rat_int(1));
            assert_eq!(euler_class(&p, &x, 0).unwrap(), rat_int(1), "CP^{}", n - 1);
        }
    }

    #[test]
    fn weighted_projective_line() {
        // weights {1, 2}, τ = 1, x = ξ → 1/2.
        let p = problem(1, &[(&[1], 1), (&[2], 1)], &[1]);
        let x = MultiPoly::variable(1, 0);
        assert_eq!(euler_class(&p, &x, 0).unwrap(), rat(1, 2));
    }

    #[test]
    fn product_of_lines() {
        let p = problem(2, &[(&[1, 0], 2), (&[0, 1], 2)], &[1, 1]);
        let x = parse_poly(2, "x1*x2").unwrap();
        assert_eq!(euler_class(&p, &x, 0).unwrap(), rat_int(1));
        let x = parse_poly(2, "x1^2").unwrap();
        assert_eq!(euler_class(&p, &x, 0).unwrap(), rat_int(0));
    }

    #[test]
    fn degree_mismatch_is_zero() {
        let p = problem(1, &[(&[1], 3)], &[1]);
        let x = MultiPoly::variable(1, 0); // degree 1 ≠ 2
        assert_eq!(euler_class(&p, &x, 0).unwrap(), rat_int(0));
    }

    #[test]
    fn non_regular_and_degenerate_levels() {
        let p = problem(2, &[(&[1, 0], 1), (&[0, 1], 1), (&[1, 1], 1)], &[1, 1]);
        let x = MultiPoly::variable(2, 0);
        assert!(matches!(
            euler_class(&p, &x, 0),
            Err(Error::NonRegularTau(_))
        ));

        let p = problem(1, &[(&[1], 2)], &[0]);
        assert!(matches!(
            euler_class(&p, &MultiPoly::variable(1, 0), 0),
            Err(Error::NonRegularTau(_))
        ));

        // Empty system at τ ≠ 0: zero.
        let p = problem(1, &[(&[1], 0)], &[1]);
        assert_eq!(
            euler_class(&p, &MultiPoly::one(1), 0).unwrap(),
            rat_int(0)
        );

        // Improper k=1 system with τ inside the (full-line) cone and a class
        // of the selection degree.
        let p = problem(1, &[(&[1], 1), (&[-1], 1)], &[1]);
        let r = euler_class(&p, &MultiPoly::variable(1, 0), 0);
        assert!(matches!(r, Err(Error::ImproperSystem)));
    }

    #[test]
    fn outside_cone_is_zero() {
        let p = problem(2, &[(&[1, 0], 2), (&[0, 1], 2)], &[-1, 1]);
        let x = parse_poly(2, "x1*x2").unwrap();
        assert_eq!(euler_class(&p, &x, 0).unwrap(), rat_int(0));
    }

    #[test]
    fn crossing_identity_k1() {
        // k=1, {(1) mult n}: the single origin crossing carries all of χ.
        for n in 2..=4usize {
            let ws = WeightSystem::from_raw(1, &[(&[1], n)]).unwrap();
            let wall = enumerate_walls(&ws).unwrap().into_iter().next().unwrap();
            let x = MultiPoly::monomial(1, vec![(n - 1) as u32], rat_int(1));
            let diff =
                wall_crossing_difference(&ws, &wall, &rat_vec(&[0]), &rat_vec(&[1]), &x, 0)
                    .unwrap();
            assert_eq!(diff, rat_int(1));
        }
    }

    #[test]
    fn crossing_identity_two_lines() {
        // {(1,0) m2, (0,1) m2}, wall = ray(1,0), τ_0 = (1,0), η = (0,1):
        // χ(1, ε) − χ(1, −ε) = 1 − 0 = 1 on x = ξ1ξ2.
        let ws = WeightSystem::from_raw(2, &[(&[1, 0], 2), (&[0, 1], 2)]).unwrap();
        let walls = enumerate_walls(&ws).unwrap();
        let wall = walls
            .iter()
            .find(|w| w.cone_contains(&ws, &rat_vec(&[1, 0])).unwrap())
            .unwrap();
        let x = parse_poly(2, "x1*x2").unwrap();
        let diff =
            wall_crossing_difference(&ws, wall, &rat_vec(&[1, 0]), &rat_vec(&[0, 1]), &x, 0)
                .unwrap();
        assert_eq!(diff, rat_int(1));

        let plus = euler_class(
            &ToricProblem::new(ws.clone(), vec![rat_int(1), rat(1, 8)]).unwrap(),
            &x,
            0,
        )
        .unwrap();
        let minus = euler_class(
            &ToricProblem::new(ws.clone(), vec![rat_int(1), rat(-1, 8)]).unwrap(),
            &x,
            0,
        )
        .unwrap();
        assert_eq!(plus - minus, diff);
    }

    #[test]
    fn crossing_errors() {
        let ws = WeightSystem::from_raw(2, &[(&[1, 0], 2), (&[0, 1], 2)]).unwrap();
        let walls = enumerate_walls(&ws).unwrap();
        let x = parse_poly(2, "x1*x2").unwrap();
        // τ_0 at the origin lies in both wall cones.
        assert!(matches!(
            wall_crossing_difference(&ws, &walls[0], &rat_vec(&[0, 0]), &rat_vec(&[0, 1]), &x, 0),
            Err(Error::WallCountAtPoint(2))
        ));
        // η tangent to the wall.
        let wall = walls
            .iter()
            .find(|w| w.cone_contains(&ws, &rat_vec(&[1, 0])).unwrap())
            .unwrap();
        assert!(matches!(
            wall_crossing_difference(&ws, wall, &rat_vec(&[1, 0]), &rat_vec(&[1, 0]), &x, 0),
            Err(Error::EtaTangent)
        ));
    }

    #[test]
    fn memo_and_stats() {
        let p = problem(2, &[(&[1, 0], 2), (&[0, 1], 2)], &[1, 1]);
        let x = parse_poly(2, "x1*x2").unwrap();
        let ev = Evaluator::new(3);
        let v1 = ev.euler_class(&p, &x).unwrap();
        let v2 = ev.euler_class(&p, &x).unwrap();
        assert_eq!(v1, v2);
        assert!(ev.stats().invariance_checks > 0);
    }

    #[test]
    fn trace_shape() {
        let p = problem(2, &[(&[1, 0], 2), (&[0, 1], 2)], &[1, 1]);
        let x = parse_poly(2, "x1*x2").unwrap();
        let (v, tree) = Evaluator::new(0).euler_class_traced(&p, &x).unwrap();
        assert_eq!(v, rat_int(1));
        assert_eq!(tree["value"], "1");
        let crossings = tree["crossings"].as_array().unwrap();
        assert!(!crossings.is_empty());
        for c in crossings {
            assert!(c["child"]["value"].is_string());
        }
    }
}
