//! Translation of a linear torus action on C^N plus a degree κ into the
//! toric data of the genus-zero vortex moduli space, and the vortex
//! invariant Ψ = χ^{V,τ}(α · Π w_ν^{m_ν}). For genus ≥ 1 only the moduli
//! description (toric fiber over the Jacobian torus) is reported; no
//! invariant formula exists over the base.

use num_traits::{Signed, Zero};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::euler::{Evaluator, ToricProblem};
use crate::poly::MultiPoly;
use crate::rat::{pair_ii, rat_to_string, Int, IntVec, Rat, RatVec};
use crate::weights::{check_proper, classify_level, LevelClass, WeightEntry, WeightSystem};

/// A vortex computation request: action weights (multiplicity 1 each), level
/// τ, degree κ, class α, genus.
#[derive(Debug, Clone)]
pub struct VortexProblem {
    pub target: WeightSystem,
    pub tau: RatVec,
    pub kappa: IntVec,
    pub class: MultiPoly,
    pub genus: usize,
}

impl VortexProblem {
    pub fn new(
        target: WeightSystem,
        tau: RatVec,
        kappa: IntVec,
        class: MultiPoly,
        genus: usize,
    ) -> Result<Self> {
        let k = target.k();
        for (i, e) in target.entries().iter().enumerate() {
            if e.mult != 1 {
                return Err(Error::Invalid {
                    field: format!("weights[{i}].mult"),
                    message: "vortex targets are C^N: every entry has multiplicity 1 \
                              (enter repeated weights as separate entries)"
                        .into(),
                });
            }
        }
        if tau.len() != k || kappa.len() != k || class.k() != k {
            return Err(Error::DimensionMismatch {
                context: "VortexProblem",
                expected: k,
                got: *[tau.len(), kappa.len(), class.k()]
                    .iter()
                    .find(|&&l| l != k)
                    .unwrap_or(&k),
            });
        }
        if check_proper(&target).is_none() {
            return Err(Error::ImproperSystem);
        }
        if !target.spans() {
            return Err(Error::Invalid {
                field: "weights".into(),
                message: "target weights do not span t*".into(),
            });
        }
        if let LevelClass::OnWall(w) = classify_level(&target, &tau)? {
            return Err(Error::NonRegularTau(format!(
                "tau lies on wall I={:?}",
                w.index_set.iter().map(|i| i + 1).collect::<Vec<_>>()
            )));
        }
        Ok(VortexProblem {
            target,
            tau,
            kappa,
            class,
            genus,
        })
    }
}

/// Dimension and index bookkeeping of the vortex moduli space.
#[derive(Debug, Clone)]
pub struct ModuliReport {
    pub genus: usize,
    /// d_ν = ⟨w_ν, κ⟩.
    pub degrees: Vec<Int>,
    /// n_ν = dim of the holomorphic-section space per weight.
    pub n_mult: Vec<usize>,
    /// m_ν = dim of the obstruction space per weight.
    pub m_mult: Vec<usize>,
    /// Real dimension 2(Σn_ν − k) of the toric moduli (the fiber, for g ≥ 1).
    pub moduli_dim: Int,
    /// Real index (N−k)·(2−2g) + 2Σd_ν.
    pub index: Int,
    /// Level is regular but not super-regular: quotient has orbifold points.
    pub orbifold: bool,
    /// Σn_ν < k or τ outside the moduli moment cone.
    pub empty_moduli: bool,
    /// 2gk for genus ≥ 1.
    pub jacobian_dim: Option<usize>,
    /// Degree-window admissibility for genus ≥ 1 (always true in emitted
    /// reports; inadmissible degrees are a hard error).
    pub degree_window_ok: Option<bool>,
}

impl ModuliReport {
    pub fn to_json(&self) -> Value {
        json!({
            "genus": self.genus,
            "degrees": self.degrees.iter().map(|d| d.to_string()).collect::<Vec<_>>(),
            "n": self.n_mult,
            "m": self.m_mult,
            "moduli_dim": self.moduli_dim.to_string(),
            "index": self.index.to_string(),
            "orbifold": self.orbifold,
            "empty_moduli": self.empty_moduli,
            "jacobian_dim": self.jacobian_dim,
            "degree_window_ok": self.degree_window_ok,
        })
    }
}

fn max0(x: &Int) -> usize {
    if x.is_positive() {
        usize::try_from(x.clone()).expect("multiplicity fits usize")
    } else {
        0
    }
}

/// Computes degrees, multiplicities, dimension and index, plus the toric
/// problem the genus-zero invariant integrates over. For genus ≥ 1 the
/// degrees must avoid the window [0, 2g−2] (where the section-space
/// dimension jumps with the connection); the toric data then describes the
/// fiber over the Jacobian torus and no invariant is emitted.
pub fn moduli_data(vp: &VortexProblem) -> Result<(ModuliReport, Option<ToricProblem>)> {
    let k = vp.target.k();
    let g = vp.genus;
    let big_n = vp.target.entries().len();
    let degrees: Vec<Int> = vp
        .target
        .entries()
        .iter()
        .map(|e| pair_ii(&e.weight, &vp.kappa))
        .collect();

    if g >= 1 {
        let offenders: Vec<String> = degrees
            .iter()
            .filter(|d| !d.is_negative() && **d <= Int::from(2 * g as i64 - 2))
            .map(|d| format!("d={d}"))
            .collect();
        if !offenders.is_empty() {
            return Err(Error::GenusWindow(offenders.join(", ")));
        }
    }

    let gi = Int::from(g as i64);
    let n_mult: Vec<usize> = degrees
        .iter()
        .map(|d| max0(&(Int::from(1) - &gi + d)))
        .collect();
    let m_mult: Vec<usize> = degrees
        .iter()
        .map(|d| max0(&(&gi - Int::from(1) - d)))
        .collect();

    // Riemann-Roch bookkeeping: Σn − Σm = N(1−g) + Σd.
    let sum_n: i64 = n_mult.iter().map(|&x| x as i64).sum();
    let sum_m: i64 = m_mult.iter().map(|&x| x as i64).sum();
    let sum_d: Int = degrees.iter().sum();
    assert_eq!(
        Int::from(sum_n - sum_m),
        Int::from(big_n as i64 * (1 - g as i64)) + &sum_d,
        "Riemann-Roch bookkeeping identity"
    );

    let moduli_ws = WeightSystem::new(
        k,
        vp.target
            .entries()
            .iter()
            .zip(&n_mult)
            .map(|(e, &n)| WeightEntry {
                weight: e.weight.clone(),
                mult: n,
            })
            .collect(),
    )?;
    let classification = classify_level(&moduli_ws, &vp.tau)?;
    let outside = classification == LevelClass::OutsideCone;
    let report = ModuliReport {
        genus: g,
        degrees: degrees.clone(),
        n_mult,
        m_mult,
        moduli_dim: Int::from(2 * (sum_n - k as i64)),
        index: Int::from((big_n as i64 - k as i64) * (2 - 2 * g as i64))
            + Int::from(2) * &sum_d,
        orbifold: classification == LevelClass::Regular,
        empty_moduli: sum_n < k as i64 || outside,
        jacobian_dim: (g >= 1).then_some(2 * g * k),
        degree_window_ok: (g >= 1).then_some(true),
    };
    let toric = if g == 0 {
        Some(ToricProblem::new(moduli_ws, vp.tau.clone())?)
    } else {
        None
    };
    Ok((report, toric))
}

/// The genus-zero vortex invariant Ψ^{ρ,τ}_κ(α) = χ^{V,τ}(α · Π w_ν^{m_ν}),
/// as an exact rational, together with the moduli report.
pub fn vortex_invariant_with_evaluator(
    vp: &VortexProblem,
    evaluator: &Evaluator,
) -> Result<(Rat, ModuliReport)> {
    if vp.genus != 0 {
        return Err(Error::Invalid {
            field: "genus".into(),
            message: "invariants are emitted for genus 0 only; higher genus yields a \
                      moduli report"
                .into(),
        });
    }
    let (report, toric) = moduli_data(vp)?;
    let toric = toric.expect("genus 0 yields a toric problem");
    if report.empty_moduli {
        return Ok((Rat::zero(), report));
    }
    let mut total = vp.class.clone();
    for (e, &m) in vp.target.entries().iter().zip(&report.m_mult) {
        if m > 0 {
            total = total.mul(&MultiPoly::linear_form(vp.target.k(), &e.weight).pow(m));
        }
    }
    let value = evaluator.euler_class(&toric, &total)?;
    Ok((value, report))
}

pub fn vortex_invariant(vp: &VortexProblem, seed: u64) -> Result<(Rat, ModuliReport)> {
    vortex_invariant_with_evaluator(vp, &Evaluator::new(seed))
}

/// Renders the invariant and report as one JSON object.
pub fn vortex_json(value: Option<&Rat>, report: &ModuliReport) -> Value {
    let mut v = report.to_json();
    if let Some(val) = value {
        v.as_object_mut()
            .unwrap()
            .insert("invariant".into(), Value::String(rat_to_string(val)));
    }
    v
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::parse_poly;
    use crate::rat::{int_vec, rat_int, rat_vec};

    fn cp1_target() -> WeightSystem {
        WeightSystem::from_raw(1, &[(&[1], 1), (&[1], 1)]).unwrap()
    }

    #[test]
    fn moduli_examples() {
        // CP^1 target, κ = 1: d = (1,1), n = (2,2), m = (0,0), moduli = CP^3.
        let vp = VortexProblem::new(
            cp1_target(),
            rat_vec(&[1]),
            int_vec(&[1]),
            MultiPoly::one(1),
            0,
        )
        .unwrap();
        let (report, toric) = moduli_data(&vp).unwrap();
        assert_eq!(report.degrees, int_vec(&[1, 1]));
        assert_eq!(report.n_mult, vec![2, 2]);
        assert_eq!(report.m_mult, vec![0, 0]);
        assert_eq!(report.moduli_dim, Int::from(6));
        assert_eq!(report.index, Int::from(6));
        assert!(!report.empty_moduli);
        assert_eq!(toric.unwrap().ws.total_multiplicity(), 4);

        // {(1),(2)} target, κ = −1: d = (−1,−2), n = (0,0), m = (0,1).
        let target = WeightSystem::from_raw(1, &[(&[1], 1), (&[2], 1)]).unwrap();
        let vp = VortexProblem::new(
            target,
            rat_vec(&[1]),
            int_vec(&[-1]),
            MultiPoly::one(1),
            0,
        )
        .unwrap();
        let (report, _) = moduli_data(&vp).unwrap();
        assert_eq!(report.n_mult, vec![0, 0]);
        assert_eq!(report.m_mult, vec![0, 1]);
        assert!(report.empty_moduli);

        // {(1,0),(0,1),(1,1)}, κ = (3,−2): d = (3,−2,1), n = (4,0,2), m = (0,1,0).
        let target =
            WeightSystem::from_raw(2, &[(&[1, 0], 1), (&[0, 1], 1), (&[1, 1], 1)]).unwrap();
        let vp = VortexProblem::new(
            target,
            rat_vec(&[2, 1]),
            int_vec(&[3, -2]),
            MultiPoly::one(2),
            0,
        )
        .unwrap();
        let (report, _) = moduli_data(&vp).unwrap();
        assert_eq!(report.degrees, int_vec(&[3, -2, 1]));
        assert_eq!(report.n_mult, vec![4, 0, 2]);
        assert_eq!(report.m_mult, vec![0, 1, 0]);
    }

    #[test]
    fn vortex_invariants_cp1() {
        // κ = 0, α = ξ → 1 (moduli CP^1); κ = 1, α = ξ^3 → 1 (moduli CP^3).
        for (kappa, d) in [(0i64, 1u32), (1, 3)] {
            let vp = VortexProblem::new(
                cp1_target(),
                rat_vec(&[1]),
                int_vec(&[kappa]),
                MultiPoly::monomial(1, vec![d], rat_int(1)),
                0,
            )
            .unwrap();
            let (v, _) = vortex_invariant(&vp, 0).unwrap();
            assert_eq!(v, rat_int(1));
        }
        // κ = −1: empty moduli, any α → 0.
        let vp = VortexProblem::new(
            cp1_target(),
            rat_vec(&[1]),
            int_vec(&[-1]),
            parse_poly(1, "x1^4 + x1").unwrap(),
            0,
        )
        .unwrap();
        assert_eq!(vortex_invariant(&vp, 0).unwrap().0, rat_int(0));
    }

    #[test]
    fn vortex_tau_outside_moduli_cone() {
        // κ = (1,−2) leaves V supported on ray(1,0) only; τ = (2,1) is
        // outside the moduli moment cone.
        let target =
            WeightSystem::from_raw(2, &[(&[1, 0], 1), (&[0, 1], 1), (&[1, 1], 1)]).unwrap();
        let vp = VortexProblem::new(
            target,
            rat_vec(&[2, 1]),
            int_vec(&[1, -2]),
            MultiPoly::one(2),
            0,
        )
        .unwrap();
        let (v, report) = vortex_invariant(&vp, 0).unwrap();
        assert!(report.empty_moduli);
        assert_eq!(v, rat_int(0));
    }

    #[test]
    fn genus_window() {
        // g = 1, d = 0 falls in [0, 0]: hard error.
        let vp = VortexProblem::new(
            cp1_target(),
            rat_vec(&[1]),
            int_vec(&[0]),
            MultiPoly::one(1),
            1,
        )
        .unwrap();
        assert!(matches!(moduli_data(&vp), Err(Error::GenusWindow(_))));

        // g = 1, κ = 2: admissible, fiber data plus Jacobian dimension.
        let vp = VortexProblem::new(
            cp1_target(),
            rat_vec(&[1]),
            int_vec(&[2]),
            MultiPoly::one(1),
            1,
        )
        .unwrap();
        let (report, toric) = moduli_data(&vp).unwrap();
        assert!(toric.is_none());
        assert_eq!(report.n_mult, vec![2, 2]);
        assert_eq!(report.jacobian_dim, Some(2));
        assert_eq!(report.degree_window_ok, Some(true));
        assert!(vortex_invariant(&vp, 0).is_err());
    }

    #[test]
    fn target_validation() {
        // Multiplicities other than 1 rejected.
        let bad = WeightSystem::from_raw(1, &[(&[1], 2)]).unwrap();
        assert!(VortexProblem::new(
            bad,
            rat_vec(&[1]),
            int_vec(&[0]),
            MultiPoly::one(1),
            0
        )
        .is_err());
        // Non-regular τ rejected.
        let target =
            WeightSystem::from_raw(2, &[(&[1, 0], 1), (&[0, 1], 1), (&[1, 1], 1)]).unwrap();
        assert!(matches!(
            VortexProblem::new(
                target,
                rat_vec(&[1, 1]),
                int_vec(&[0, 0]),
                MultiPoly::one(2),
                0
            ),
            Err(Error::NonRegularTau(_))
        ));
    }
}
