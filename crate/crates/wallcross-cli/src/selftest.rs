//! Built-in invariant suites for the `selftest` command. Each suite prints
//! one pass/fail line; the command exits 3 when any suite fails.

use num_traits::{One, Zero};

use wallcross::poly::{parse_poly, total_residue, MultiPoly, ZPoly};
use wallcross::rat::{rat_int, Rat, RatVec};
use wallcross::{
    classify_level, enumerate_walls, euler_class, wall_crossing_difference, Evaluator, Int,
    LevelClass, ToricProblem, WeightSystem,
};

/// Small deterministic generator (splitmix64) so the suites need no RNG
/// dependency and reproduce exactly.
struct Gen(u64);

impl Gen {
    fn next_u64(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9e3779b97f4a7c15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
        z ^ (z >> 31)
    }

    /// Uniform in [lo, hi].
    fn range(&mut self, lo: i64, hi: i64) -> i64 {
        lo + (self.next_u64() % (hi - lo + 1) as u64) as i64
    }

    fn rat(&mut self, max_abs: i64, max_den: i64) -> Rat {
        let d = self.range(1, max_den);
        Rat::new(Int::from(self.range(-max_abs, max_abs)), Int::from(d))
    }
}

pub fn run(seed: u64) -> (String, bool) {
    let mut lines = Vec::new();
    let mut ok = true;
    for (name, result) in [
        ("projective_ladder", projective_ladder()),
        ("residue_oracle", residue_oracle(seed)),
        ("crossing_identity", crossing_identity(seed)),
        ("path_independence", path_independence(seed)),
        ("classification_grid", classification_grid()),
    ] {
        match result {
            Ok(()) => lines.push(format!("selftest {name}: PASS")),
            Err(msg) => {
                ok = false;
                lines.push(format!("selftest {name}: FAIL ({msg})"));
            }
        }
    }
    lines.push(if ok {
        "selftest: all suites passed".into()
    } else {
        "selftest: FAILURES".into()
    });
    (lines.join("\n"), ok)
}

fn projective_ladder() -> Result<(), String> {
    for n in 2..=6usize {
        let ws = WeightSystem::from_raw(1, &[(&[1], n)]).map_err(|e| e.to_string())?;
        let p = ToricProblem::new(ws, vec![rat_int(1)]).map_err(|e| e.to_string())?;
        let x = MultiPoly::monomial(1, vec![(n - 1) as u32], rat_int(1));
        let v = euler_class(&p, &x, 0).map_err(|e| e.to_string())?;
        if v != rat_int(1) {
            return Err(format!("CP^{} gave {}", n - 1, v));
        }
    }
    // Weighted projective line {1, 2}: 1/2.
    let ws = WeightSystem::from_raw(1, &[(&[1], 1), (&[2], 1)]).map_err(|e| e.to_string())?;
    let p = ToricProblem::new(ws, vec![rat_int(1)]).map_err(|e| e.to_string())?;
    let v = euler_class(&p, &MultiPoly::variable(1, 0), 0).map_err(|e| e.to_string())?;
    if v != Rat::new(Int::from(1), Int::from(2)) {
        return Err(format!("weighted line gave {v}"));
    }
    Ok(())
}

// --- independent univariate partial-fraction oracle -----------------------

/// Dense univariate polynomial over Q, ascending powers.
type UniPoly = Vec<Rat>;

fn uni_trim(p: &mut UniPoly) {
    while p.last().is_some_and(Zero::is_zero) {
        p.pop();
    }
}

/// Taylor shift: p(u + s), ascending coefficients in u.
fn uni_shift(p: &[Rat], s: &Rat) -> UniPoly {
    let mut out = vec![Rat::zero(); p.len()];
    for (i, c) in p.iter().enumerate() {
        // c * (u + s)^i
        let mut binom = Rat::one();
        let mut pw = Rat::one();
        for j in (0..=i).rev() {
            out[j] += c * &binom * &pw;
            if j > 0 {
                binom = binom * Rat::from_integer(Int::from(j as i64))
                    / Rat::from_integer(Int::from((i - j + 1) as i64));
                pw = &pw * s;
            }
        }
    }
    uni_trim(&mut out);
    out
}

fn uni_mul_trunc(a: &[Rat], b: &[Rat], order: usize) -> UniPoly {
    let mut out = vec![Rat::zero(); order + 1];
    for (i, x) in a.iter().enumerate().take(order + 1) {
        for (j, y) in b.iter().enumerate() {
            if i + j > order {
                break;
            }
            out[i + j] += x * y;
        }
    }
    out
}

fn uni_series_inv(d: &[Rat], order: usize) -> UniPoly {
    let c0 = d[0].clone();
    let c0_inv = c0.recip();
    let mut inv = vec![Rat::zero(); order + 1];
    inv[0] = c0_inv.clone();
    for j in 1..=order {
        let mut acc = Rat::zero();
        for i in 1..=j.min(d.len() - 1) {
            acc += &d[i] * &inv[j - i];
        }
        inv[j] = -&c0_inv * acc;
    }
    inv
}

/// Sum of residues of num / Π (c_i z + a_i)^{m_i} over the (distinct) poles
/// −a_i/c_i, each computed by an explicit local expansion.
fn partial_fraction_residue_sum(num: &[Rat], factors: &[(Rat, Rat, usize)]) -> Rat {
    let mut total = Rat::zero();
    for (i, (a_i, c_i, m_i)) in factors.iter().enumerate() {
        let pole = -(a_i / c_i);
        // Shift: f(u + pole) = N(u+pole) / [c_i^{m_i} u^{m_i} * Π_{j≠i} (...)]
        let shifted_num = uni_shift(num, &pole);
        let order = m_i - 1;
        let mut rest = vec![Rat::one()];
        for (j, (a_j, c_j, m_j)) in factors.iter().enumerate() {
            if j == i {
                continue;
            }
            let base = vec![c_j * &pole + a_j, c_j.clone()];
            for _ in 0..*m_j {
                rest = uni_mul_trunc(&rest, &base, order);
            }
        }
        let inv = uni_series_inv(&rest, order);
        let series = uni_mul_trunc(&shifted_num, &inv, order);
        let c_pow = {
            let mut p = Rat::one();
            for _ in 0..*m_i {
                p = p * c_i;
            }
            p
        };
        total += &series[order] / c_pow;
    }
    total
}

fn residue_oracle(seed: u64) -> Result<(), String> {
    let mut gen = Gen(seed.wrapping_mul(0xabcd_1234).wrapping_add(7));
    for case in 0..100 {
        let npoles = gen.range(1, 4) as usize;
        // Distinct rational poles via distinct (a, c) with distinct -a/c.
        let mut factors: Vec<(Rat, Rat, usize)> = Vec::new();
        while factors.len() < npoles {
            let c = {
                let mut c = gen.rat(4, 3);
                while c.is_zero() {
                    c = gen.rat(4, 3);
                }
                c
            };
            let a = gen.rat(4, 3);
            let pole = -(&a / &c);
            if factors.iter().any(|(fa, fc, _)| -(fa / fc) == pole) {
                continue;
            }
            let mult = gen.range(1, 3) as usize;
            factors.push((a, c, mult));
        }
        let total_mult: usize = factors.iter().map(|f| f.2).sum();
        let deg = gen.range(0, total_mult as i64 + 1) as usize;
        let mut num: Vec<Rat> = (0..=deg).map(|_| gen.rat(5, 2)).collect();
        if num[deg].is_zero() {
            num[deg] = Rat::one();
        }

        let expected = partial_fraction_residue_sum(&num, &factors);

        // Engine route over the 0-variable ring.
        let num_z = ZPoly::new(
            0,
            num.iter().map(|c| MultiPoly::constant(0, c.clone())).collect(),
        );
        let engine_factors: Vec<(ZPoly, usize)> = factors
            .iter()
            .map(|(a, c, m)| {
                (
                    ZPoly::new(
                        0,
                        vec![
                            MultiPoly::constant(0, a.clone()),
                            MultiPoly::constant(0, c.clone()),
                        ],
                    ),
                    *m,
                )
            })
            .collect();
        let got = total_residue(&num_z, &engine_factors)
            .map_err(|e| e.to_string())?
            .as_constant()
            .ok_or("non-constant residue over the empty ring")?;
        if got != expected {
            return Err(format!("case {case}: engine {got} vs oracle {expected}"));
        }
    }
    Ok(())
}

fn crossing_identity(seed: u64) -> Result<(), String> {
    let ws = WeightSystem::from_raw(2, &[(&[1, 0], 1), (&[0, 1], 1), (&[1, 1], 1)])
        .map_err(|e| e.to_string())?;
    let walls = enumerate_walls(&ws).map_err(|e| e.to_string())?;
    let eps = Rat::new(Int::from(1), Int::from(8));
    for wall in &walls {
        // A point inside the wall's ray and a transverse direction.
        let tau0: RatVec = ws.entries()[wall.index_set[0]]
            .weight
            .iter()
            .map(|x| Rat::from_integer(x.clone()))
            .collect();
        let eta: RatVec = if wall.normal[0].is_zero() {
            vec![rat_int(0), rat_int(1)]
        } else {
            vec![rat_int(1), rat_int(0)]
        };
        for x in [parse_poly(2, "x1").unwrap(), parse_poly(2, "x2").unwrap()] {
            let diff = wall_crossing_difference(&ws, wall, &tau0, &eta, &x, seed)
                .map_err(|e| e.to_string())?;
            let plus: RatVec = tau0.iter().zip(&eta).map(|(t, e)| t + e * &eps).collect();
            let minus: RatVec = tau0.iter().zip(&eta).map(|(t, e)| t - e * &eps).collect();
            let vp = euler_class(
                &ToricProblem::new(ws.clone(), plus).unwrap(),
                &x,
                seed,
            )
            .map_err(|e| e.to_string())?;
            let vm = euler_class(
                &ToricProblem::new(ws.clone(), minus).unwrap(),
                &x,
                seed,
            )
            .map_err(|e| e.to_string())?;
            if &vp - &vm != diff {
                return Err(format!(
                    "wall {:?}: {vp} - {vm} != {diff} on {x}",
                    wall.index_set
                ));
            }
        }
    }
    Ok(())
}

fn path_independence(seed: u64) -> Result<(), String> {
    let systems: Vec<(usize, Vec<(&[i64], usize)>, Vec<i64>)> = vec![
        (2, vec![(&[1, 0], 2), (&[0, 1], 2)], vec![1, 1]),
        (2, vec![(&[1, 0], 1), (&[0, 1], 1), (&[1, 1], 1)], vec![3, 1]),
        (2, vec![(&[1, 2], 1), (&[2, 1], 1), (&[1, 1], 2)], vec![5, 4]),
        (3, vec![(&[1, 0, 0], 1), (&[0, 1, 0], 1), (&[0, 0, 1], 1), (&[1, 1, 1], 1)], vec![2, 3, 4]),
    ];
    for (k, raw, tau_i) in systems {
        let ws = WeightSystem::from_raw(k, &raw).map_err(|e| e.to_string())?;
        let tau: RatVec = tau_i.iter().map(|&x| rat_int(x)).collect();
        let n = ws.total_multiplicity();
        let m = (n - k) as u32;
        let mut exp = vec![0u32; k];
        exp[0] = m;
        let x = MultiPoly::monomial(k, exp, rat_int(1));
        let problem = ToricProblem::new(ws, tau).map_err(|e| e.to_string())?;
        let reference = Evaluator::new(seed)
            .euler_class(&problem, &x)
            .map_err(|e| e.to_string())?;
        for s in 1..6u64 {
            let v = Evaluator::new(seed.wrapping_add(s * 7919))
                .euler_class(&problem, &x)
                .map_err(|e| e.to_string())?;
            if v != reference {
                return Err(format!("seed {s}: {v} != {reference}"));
            }
        }
    }
    Ok(())
}

fn classification_grid() -> Result<(), String> {
    let ws = WeightSystem::from_raw(2, &[(&[1, 0], 1), (&[0, 1], 1), (&[1, 1], 1)])
        .map_err(|e| e.to_string())?;
    let walls = enumerate_walls(&ws).map_err(|e| e.to_string())?;
    let half = Rat::new(Int::from(1), Int::from(2));
    for i in -4i64..6 {
        for j in -4i64..6 {
            let tau = vec![&half * rat_int(i), &half * rat_int(j)];
            let class = classify_level(&ws, &tau).map_err(|e| e.to_string())?;
            let mut on_union = false;
            for w in &walls {
                if w.cone_contains(&ws, &tau).map_err(|e| e.to_string())? {
                    on_union = true;
                    break;
                }
            }
            let classified_on_wall = matches!(class, LevelClass::OnWall(_));
            // The outside check runs first in classify_level; a cone point of
            // a wall that is outside the moment cone reports outside_cone.
            let outside = class == LevelClass::OutsideCone;
            if classified_on_wall != (on_union && !outside) {
                return Err(format!(
                    "tau = ({i}/2, {j}/2): classify {class:?} vs union membership {on_union}"
                ));
            }
        }
    }
    Ok(())
}
