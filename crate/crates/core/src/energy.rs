//! Lennard-Jones pair potential, total configuration energy, analytic
//! forces, and minimum-distance constraint checks.

use crate::error::{Error, Result};
use crate::forward::AtomConfiguration;

/// Pair separations below this are treated as a singularity rather than
/// evaluated; the r^-12 term would otherwise produce astronomically large
/// values that poison every downstream sum.
pub const SINGULARITY_GUARD: f64 = 1e-9;

/// Lennard-Jones pair potential parameters.
///
/// `r_m = 2^(1/6) * sigma` (the separation of the potential minimum) is
/// always derived, never stored.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LJParams {
    /// Depth of the potential well.
    pub epsilon: f64,
    /// Separation at which the potential crosses zero.
    pub sigma: f64,
    /// Cutoff separation beyond which the potential is identically zero.
    pub r_cut: f64,
}

impl LJParams {
    pub fn new(epsilon: f64, sigma: f64, r_cut: f64) -> Result<Self> {
        if !(epsilon > 0.0) || !(sigma > 0.0) || !(r_cut > 0.0) {
            return Err(Error::invalid(format!(
                "LJ parameters must be positive (epsilon={epsilon}, sigma={sigma}, r_cut={r_cut})"
            )));
        }
        Ok(LJParams { epsilon, sigma, r_cut })
    }

    /// Separation of the potential minimum, `2^(1/6) * sigma`.
    pub fn r_m(&self) -> f64 {
        2f64.powf(1.0 / 6.0) * self.sigma
    }
}

/// Minimum pairwise-distance constraint: configurations are feasible when
/// every unordered pair is strictly farther apart than `r_min`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConstraintSpec {
    pub r_min: f64,
}

impl ConstraintSpec {
    pub fn new(r_min: f64, params: &LJParams) -> Result<Self> {
        if !(r_min > 0.0) || r_min >= params.r_m() {
            return Err(Error::invalid(format!(
                "r_min must lie in (0, r_m); got {r_min} with r_m = {}",
                params.r_m()
            )));
        }
        Ok(ConstraintSpec { r_min })
    }
}

/// Pair potential: `4 eps [(sigma/r)^12 - (sigma/r)^6]` for `r < r_cut`,
/// exactly zero for `r >= r_cut`. No shift is applied at the cutoff, so the
/// potential has a jump of size `vlj(r_cut^-)` there.
pub fn vlj(r: f64, params: &LJParams) -> Result<f64> {
    if !(r > 0.0) {
        return Err(Error::invalid(format!("pair separation must be positive, got {r}")));
    }
    if r >= params.r_cut {
        return Ok(0.0);
    }
    let s6 = (params.sigma / r).powi(6);
    Ok(4.0 * params.epsilon * (s6 * s6 - s6))
}

fn pair_distance(a: [f64; 2], b: [f64; 2]) -> f64 {
    let dx = a[0] - b[0];
    let dy = a[1] - b[1];
    (dx * dx + dy * dy).sqrt()
}

/// Total energy: sum of `vlj` over unordered pairs i > j, in fixed
/// lexicographic order so the floating-point sum is reproducible.
pub fn vtot(config: &AtomConfiguration, params: &LJParams) -> Result<f64> {
    let pos = config.positions();
    let mut total = 0.0;
    for i in 1..pos.len() {
        for j in 0..i {
            let r = pair_distance(pos[i], pos[j]);
            if r < SINGULARITY_GUARD {
                return Err(Error::invalid(format!(
                    "atoms {j} and {i} are (near-)coincident: separation {r:e}"
                )));
            }
            total += vlj(r, params)?;
        }
    }
    Ok(total)
}

/// Total energy that reports singular or out-of-range states as `+inf`
/// instead of an error. Used by relaxation and derivative-free descent,
/// where a trial state only needs to be rejected, not reported.
pub(crate) fn vtot_or_inf(positions: &[[f64; 2]], params: &LJParams) -> f64 {
    let mut total = 0.0;
    for i in 1..positions.len() {
        for j in 0..i {
            let r = pair_distance(positions[i], positions[j]);
            if r < SINGULARITY_GUARD {
                return f64::INFINITY;
            }
            if r < params.r_cut {
                let s6 = (params.sigma / r).powi(6);
                total += 4.0 * params.epsilon * (s6 * s6 - s6);
            }
        }
    }
    total
}

/// Force on every atom (the negative energy gradient). Pairs separated by
/// `r >= r_cut` contribute nothing to each other.
pub fn vtot_forces(config: &AtomConfiguration, params: &LJParams) -> Result<Vec<[f64; 2]>> {
    forces_on(config.positions(), params)
}

pub(crate) fn forces_on(positions: &[[f64; 2]], params: &LJParams) -> Result<Vec<[f64; 2]>> {
    let mut forces = vec![[0.0; 2]; positions.len()];
    for i in 1..positions.len() {
        for j in 0..i {
            let dx = positions[i][0] - positions[j][0];
            let dy = positions[i][1] - positions[j][1];
            let r = (dx * dx + dy * dy).sqrt();
            if r < SINGULARITY_GUARD {
                return Err(Error::invalid(format!(
                    "atoms {j} and {i} are (near-)coincident: separation {r:e}"
                )));
            }
            if r >= params.r_cut {
                continue;
            }
            // -dV/dr = 24 eps (2 (sigma/r)^12 - (sigma/r)^6) / r, directed along r.
            let s6 = (params.sigma / r).powi(6);
            let magnitude_over_r = 24.0 * params.epsilon * (2.0 * s6 * s6 - s6) / (r * r);
            let fx = magnitude_over_r * dx;
            let fy = magnitude_over_r * dy;
            forces[i][0] += fx;
            forces[i][1] += fy;
            forces[j][0] -= fx;
            forces[j][1] -= fy;
        }
    }
    Ok(forces)
}

/// True iff every unordered pair of atoms is strictly farther apart than
/// `spec.r_min`.
pub fn satisfies_min_distance(config: &AtomConfiguration, spec: &ConstraintSpec) -> bool {
    let pos = config.positions();
    for i in 1..pos.len() {
        for j in 0..i {
            if pair_distance(pos[i], pos[j]) <= spec.r_min {
                return false;
            }
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    fn params(sigma: f64) -> LJParams {
        LJParams::new(0.4, sigma, 0.4).unwrap()
    }

    fn config(points: &[[f64; 2]]) -> AtomConfiguration {
        AtomConfiguration::new(points.to_vec()).unwrap()
    }

    #[test]
    fn vlj_zero_at_sigma() {
        let p = params(0.15);
        assert_eq!(vlj(0.15, &p).unwrap(), 0.0);
    }

    #[test]
    fn vlj_minimum_at_r_m() {
        let p = params(0.15);
        assert_relative_eq!(vlj(p.r_m(), &p).unwrap(), -p.epsilon, max_relative = 1e-14);
    }

    #[test]
    fn vlj_zero_at_and_beyond_cutoff() {
        // Interstitial parameter row: eps 0.4, sigma 0.15, r_cut 0.4.
        let p = params(0.15);
        assert_eq!(vlj(0.4, &p).unwrap(), 0.0);
        assert_eq!(vlj(0.5, &p).unwrap(), 0.0);
        // Just below the cutoff the potential is still active.
        assert!(vlj(0.4 - 1e-12, &p).unwrap() < 0.0);
    }

    #[test]
    fn vlj_rejects_nonpositive_separation() {
        let p = params(0.15);
        assert!(vlj(0.0, &p).is_err());
        assert!(vlj(-1.0, &p).is_err());
    }

    #[test]
    fn vlj_sign_structure() {
        let p = params(0.15);
        for r in [0.08, 0.1, 0.12, 0.14] {
            assert!(vlj(r, &p).unwrap() > 0.0, "repulsive below sigma, r={r}");
        }
        for r in [0.16, 0.2, 0.3, 0.39] {
            assert!(vlj(r, &p).unwrap() < 0.0, "attractive between sigma and cutoff, r={r}");
        }
    }

    #[test]
    fn vtot_empty_and_single() {
        let p = params(0.15);
        assert_eq!(vtot(&AtomConfiguration::empty(), &p).unwrap(), 0.0);
        assert_eq!(vtot(&config(&[[0.5, 0.5]]), &p).unwrap(), 0.0);
    }

    #[test]
    fn vtot_two_atoms_at_minimum() {
        let p = params(0.15);
        let rm = p.r_m();
        let c = config(&[[0.3, 0.5], [0.3 + rm, 0.5]]);
        assert_relative_eq!(vtot(&c, &p).unwrap(), -p.epsilon, max_relative = 1e-14);
    }

    #[test]
    fn vtot_three_collinear_matches_direct_sum() {
        let p = params(0.15);
        let rm = p.r_m();
        // 2 r_m ~ 0.337 is still inside the 0.4 cutoff, so the far pair counts.
        assert!(2.0 * rm < p.r_cut);
        let c = config(&[[0.2, 0.5], [0.2 + rm, 0.5], [0.2 + 2.0 * rm, 0.5]]);
        let expected = 2.0 * vlj(rm, &p).unwrap() + vlj(2.0 * rm, &p).unwrap();
        assert_relative_eq!(vtot(&c, &p).unwrap(), expected, max_relative = 1e-12);
        assert!(vlj(2.0 * rm, &p).unwrap() != 0.0);
    }

    #[test]
    fn vtot_rejects_coincident_atoms() {
        let p = params(0.15);
        let c = config(&[[0.5, 0.5], [0.5, 0.5]]);
        assert!(vtot(&c, &p).is_err());
        assert!(vtot_forces(&c, &p).is_err());
    }

    #[test]
    fn forces_vanish_at_pair_minimum() {
        let p = params(0.15);
        let rm = p.r_m();
        let c = config(&[[0.3, 0.5], [0.3 + rm, 0.5]]);
        let f = vtot_forces(&c, &p).unwrap();
        for atom in f {
            assert_abs_diff_eq!(atom[0], 0.0, epsilon = 1e-12);
            assert_abs_diff_eq!(atom[1], 0.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn forces_sum_to_zero() {
        let p = params(0.14);
        let c = config(&[
            [0.30, 0.31],
            [0.45, 0.29],
            [0.38, 0.44],
            [0.55, 0.42],
            [0.47, 0.56],
        ]);
        let f = vtot_forces(&c, &p).unwrap();
        let net = f.iter().fold([0.0, 0.0], |acc, v| [acc[0] + v[0], acc[1] + v[1]]);
        assert_abs_diff_eq!(net[0], 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(net[1], 0.0, epsilon = 1e-12);
    }

    #[test]
    fn energy_invariant_under_rigid_motions() {
        let p = params(0.14);
        let base = [[0.30, 0.31], [0.45, 0.29], [0.38, 0.44], [0.50, 0.45]];
        let e0 = vtot(&config(&base), &p).unwrap();

        let shifted: Vec<[f64; 2]> =
            base.iter().map(|&[x, y]| [x + 0.07, y - 0.05]).collect();
        let e_shift = vtot(&config(&shifted), &p).unwrap();
        assert_relative_eq!(e_shift, e0, max_relative = 1e-10);

        let (s, c) = (0.3f64.sin(), 0.3f64.cos());
        let rotated: Vec<[f64; 2]> = base
            .iter()
            .map(|&[x, y]| {
                let (dx, dy) = (x - 0.4, y - 0.4);
                [0.4 + c * dx - s * dy, 0.4 + s * dx + c * dy]
            })
            .collect();
        let e_rot = vtot(&config(&rotated), &p).unwrap();
        assert_relative_eq!(e_rot, e0, max_relative = 1e-10);
    }

    #[test]
    fn min_distance_trivial_cases() {
        let p = params(0.15);
        let spec = ConstraintSpec::new(0.7 * p.r_m(), &p).unwrap();
        assert!(satisfies_min_distance(&AtomConfiguration::empty(), &spec));
        assert!(satisfies_min_distance(&config(&[[0.5, 0.5]]), &spec));
    }

    #[test]
    fn min_distance_is_strict_at_boundary() {
        let p = params(0.15);
        let r_min = 0.7 * p.r_m();
        let spec = ConstraintSpec::new(r_min, &p).unwrap();
        let c = config(&[[0.3, 0.5], [0.3 + r_min, 0.5]]);
        assert!(!satisfies_min_distance(&c, &spec));
        let c2 = config(&[[0.3, 0.5], [0.3 + r_min + 1e-9, 0.5]]);
        assert!(satisfies_min_distance(&c2, &spec));
    }

    #[test]
    fn constraint_spec_requires_r_min_below_r_m() {
        let p = params(0.15);
        assert!(ConstraintSpec::new(p.r_m(), &p).is_err());
        assert!(ConstraintSpec::new(0.0, &p).is_err());
        assert!(ConstraintSpec::new(0.7 * p.r_m(), &p).is_ok());
    }
}
