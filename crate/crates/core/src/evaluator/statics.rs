//! Quasi-static force bookkeeping: contact-force distribution, joint reactions and
//! joint torques.

use nalgebra::{Matrix3, Matrix6, Vector3, Vector6};

use crate::error::{Error, Result};
use crate::robot::{leg_points, JointState, HipMount, LegModel, LegPoints, GRAVITY, jacobian_from_points};

/// Balance tolerance for forces (N) and moments (N m).
pub const BALANCE_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub struct ContactSolution {
    pub forces: Vec<Vector3<f64>>,
    /// Balanced with non-negative normal components.
    pub balanced: bool,
    pub force_residual: f64,
    pub moment_residual: f64,
}

fn skew(a: &Vector3<f64>) -> Matrix3<f64> {
    Matrix3::new(0.0, -a.z, a.y, a.z, 0.0, -a.x, -a.y, a.x, 0.0)
}

/// Minimum-norm forces on `loaded` feet that cancel the weight and its moment about the
/// CoM. Returns `None` if the normal matrix is singular.
fn min_norm(arms: &[Vector3<f64>], loaded: u32, weight: f64, exact: bool) -> Option<Vec<Vector3<f64>>> {
    let mut g = Matrix6::<f64>::zeros();
    for (i, a) in arms.iter().enumerate() {
        if loaded & (1 << i) == 0 {
            continue;
        }
        let s = skew(a);
        // B = [I; S], so B B^T = [[I, S^T], [S, S S^T]]
        let sst = s * s.transpose();
        for r in 0..3 {
            g[(r, r)] += 1.0;
            for c in 0..3 {
                g[(3 + r, c)] += s[(r, c)];
                g[(c, 3 + r)] += s[(r, c)];
                g[(3 + r, 3 + c)] += sst[(r, c)];
            }
        }
    }
    let rhs = Vector6::new(0.0, 0.0, weight, 0.0, 0.0, 0.0);
    // fewer than three feet leave the system rank deficient even when Cholesky succeeds
    let solved = g.cholesky().map(|ch| ch.solve(&rhs)).filter(|nu| {
        loaded.count_ones() >= 3 && (g * nu - rhs).norm() <= 1e-9 * weight.max(1.0)
    });
    let nu = match solved {
        Some(nu) => nu,
        None if exact => return None,
        None => g.svd(true, true).solve(&rhs, 1e-10 * g.norm()).ok()?,
    };
    let (nf, nm) = (nu.fixed_rows::<3>(0).into_owned(), nu.fixed_rows::<3>(3).into_owned());
    Some(
        arms.iter()
            .enumerate()
            .map(|(i, a)| if loaded & (1 << i) == 0 { Vector3::zeros() } else { nf + nm.cross(a) })
            .collect(),
    )
}

pub fn balance_residuals(feet: &[Vector3<f64>], com: &Vector3<f64>, weight: f64, forces: &[Vector3<f64>]) -> (f64, f64) {
    let mut total = Vector3::new(0.0, 0.0, -weight);
    let mut moment = Vector3::zeros();
    for (p, f) in feet.iter().zip(forces) {
        total += f;
        moment += (p - com).cross(f);
    }
    (total.norm(), moment.norm())
}

/// Unconstrained minimum-norm (least-squares) forces, reported as unbalanced.
pub(crate) fn least_squares_contact(feet: &[Vector3<f64>], com: &Vector3<f64>, weight: f64) -> ContactSolution {
    let arms: Vec<Vector3<f64>> = feet.iter().map(|p| p - com).collect();
    let all = (1u32 << feet.len()) - 1;
    let forces = min_norm(&arms, all, weight, false).unwrap_or_else(|| vec![Vector3::zeros(); feet.len()]);
    let (fr, mr) = balance_residuals(feet, com, weight, &forces);
    ContactSolution {
        forces,
        balanced: false,
        force_residual: fr,
        moment_residual: mr,
    }
}

/// Distributes the robot weight over the stance feet. The minimum-norm balanced set is
/// used when all normal components are non-negative; otherwise the smallest-norm
/// balanced set over subsets of feet with non-negative normals is chosen. If none exists
/// the unconstrained least-squares forces are returned with `balanced = false`.
pub fn distribute_contact_forces(
    feet: &[Vector3<f64>],
    com: &Vector3<f64>,
    weight: f64,
    normals: &[Vector3<f64>],
) -> Result<ContactSolution> {
    if feet.is_empty() {
        return Err(Error::Structural("no stance feet to carry the load".into()));
    }
    if feet.len() != normals.len() || feet.len() > 32 {
        return Err(Error::Structural("one normal per stance foot is required".into()));
    }
    let arms: Vec<Vector3<f64>> = feet.iter().map(|p| p - com).collect();
    let all = (1u32 << feet.len()) - 1;
    let evaluate = |forces: Vec<Vector3<f64>>| {
        let (fr, mr) = balance_residuals(feet, com, weight, &forces);
        let pushing = forces.iter().zip(normals).all(|(f, n)| f.dot(n) >= -1e-12);
        (forces, fr, mr, pushing && fr < BALANCE_TOLERANCE && mr < BALANCE_TOLERANCE)
    };

    let full = min_norm(&arms, all, weight, false).unwrap_or_else(|| vec![Vector3::zeros(); feet.len()]);
    let (forces, fr, mr, ok) = evaluate(full);
    if ok {
        return Ok(ContactSolution {
            forces,
            balanced: true,
            force_residual: fr,
            moment_residual: mr,
        });
    }

    let mut best: Option<(f64, Vec<Vector3<f64>>, f64, f64)> = None;
    for subset in (1..all).rev() {
        if subset.count_ones() < 3 {
            continue;
        }
        let Some(candidate) = min_norm(&arms, subset, weight, true) else {
            continue;
        };
        let (cand, cfr, cmr, cok) = evaluate(candidate);
        if !cok {
            continue;
        }
        let norm: f64 = cand.iter().map(|f| f.norm_squared()).sum();
        if best.as_ref().map_or(true, |b| norm < b.0) {
            best = Some((norm, cand, cfr, cmr));
        }
    }
    Ok(match best {
        Some((_, forces, fr, mr)) => ContactSolution {
            forces,
            balanced: true,
            force_residual: fr,
            moment_residual: mr,
        },
        None => ContactSolution {
            forces,
            balanced: false,
            force_residual: fr,
            moment_residual: mr,
        },
    })
}

/// Force transmitted through each joint (yaw, hip, knee): the foot force plus the weight
/// of every link beyond that joint.
pub fn joint_reaction_forces(leg: &LegModel, contact_force: &Vector3<f64>) -> [Vector3<f64>; 3] {
    let [coxa, thigh, shank] = leg.link_masses_kg;
    let down = Vector3::new(0.0, 0.0, -GRAVITY);
    [
        contact_force + (coxa + thigh + shank) * down,
        contact_force + (thigh + shank) * down,
        contact_force + shank * down,
    ]
}

/// Actuator torques holding the leg against the ground force `contact_force` (body
/// frame, acting on the foot) and gravity on the link point masses.
pub fn joint_torques(leg: &LegModel, q: &JointState, mount: &HipMount, contact_force: &Vector3<f64>) -> Vector3<f64> {
    torques_from_points(leg, &leg_points(leg, q, mount), contact_force)
}

pub(crate) fn torques_from_points(leg: &LegModel, pts: &LegPoints, contact_force: &Vector3<f64>) -> Vector3<f64> {
    let jac = jacobian_from_points(pts);
    let mut tau = -(jac.transpose() * contact_force);
    // gravity: tau_j = sum over distal links of m g dz_c/dq_j; the yaw axis is vertical
    let w = pts.pitch_axis();
    let [_, c_thigh, c_shank] = pts.link_centroids();
    let [_, m_thigh, m_shank] = leg.link_masses_kg;
    let dz = |pivot: &Vector3<f64>, c: &Vector3<f64>| w.cross(&(c - pivot)).z;
    tau[1] += GRAVITY * (m_thigh * dz(&pts.pitch, &c_thigh) + m_shank * dz(&pts.pitch, &c_shank));
    tau[2] += GRAVITY * m_shank * dz(&pts.knee, &c_shank);
    tau
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::robot::{forward_kinematics, RobotModel};
    use nalgebra::Matrix3;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn up(n: usize) -> Vec<Vector3<f64>> {
        vec![Vector3::z(); n]
    }

    #[test]
    fn symmetric_four_feet_share_equally() {
        let feet = [(1.0, 1.0), (1.0, -1.0), (-1.0, 1.0), (-1.0, -1.0)].map(|(x, y)| Vector3::new(x * 0.3, y * 0.2, 0.0));
        let com = Vector3::new(0.0, 0.0, 0.2);
        let sol = distribute_contact_forces(&feet, &com, 40.0, &up(4)).unwrap();
        assert!(sol.balanced);
        for f in &sol.forces {
            assert!((f - Vector3::new(0.0, 0.0, 10.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn single_foot_under_com_carries_everything() {
        let feet = [Vector3::new(0.1, 0.2, 0.0)];
        let com = Vector3::new(0.1, 0.2, 0.3);
        let sol = distribute_contact_forces(&feet, &com, 39.24, &up(1)).unwrap();
        assert!((sol.forces[0] - Vector3::new(0.0, 0.0, 39.24)).norm() < 1e-12);
    }

    #[test]
    fn three_feet_match_direct_moment_solve() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let mut checked = 0;
        while checked < 200 {
            let feet: Vec<Vector3<f64>> = (0..3)
                .map(|_| Vector3::new(rng.gen_range(-0.5..0.5), rng.gen_range(-0.5..0.5), 0.0))
                .collect();
            // CoM inside via random barycentric weights
            let mut w = [rng.gen::<f64>(), rng.gen::<f64>(), rng.gen::<f64>()];
            let s: f64 = w.iter().sum();
            w.iter_mut().for_each(|x| *x /= s);
            let c = feet[0] * w[0] + feet[1] * w[1] + feet[2] * w[2];
            let com = Vector3::new(c.x, c.y, 0.25);
            let m = Matrix3::new(
                1.0, 1.0, 1.0, //
                feet[0].x - com.x, feet[1].x - com.x, feet[2].x - com.x, //
                feet[0].y - com.y, feet[1].y - com.y, feet[2].y - com.y,
            );
            if m.determinant().abs() < 1e-3 {
                continue;
            }
            let weight = 50.0;
            let fz = m.lu().solve(&Vector3::new(weight, 0.0, 0.0)).unwrap();
            let sol = distribute_contact_forces(&feet, &com, weight, &up(3)).unwrap();
            assert!(sol.balanced);
            for i in 0..3 {
                assert!((sol.forces[i] - Vector3::new(0.0, 0.0, fz[i])).norm() < 1e-9);
            }
            checked += 1;
        }
    }

    #[test]
    fn com_outside_support_is_flagged() {
        let feet = [Vector3::new(0.0, 0.0, 0.0), Vector3::new(0.2, 0.0, 0.0), Vector3::new(0.0, 0.2, 0.0)];
        let com = Vector3::new(0.5, 0.5, 0.2);
        let sol = distribute_contact_forces(&feet, &com, 10.0, &up(3)).unwrap();
        assert!(!sol.balanced);
    }

    #[test]
    fn no_feet_is_an_error() {
        assert!(distribute_contact_forces(&[], &Vector3::zeros(), 1.0, &[]).is_err());
    }

    #[test]
    fn balanced_solutions_have_small_residuals() {
        let mut rng = ChaCha8Rng::seed_from_u64(32);
        for _ in 0..500 {
            let n = rng.gen_range(3..=6);
            let feet: Vec<Vector3<f64>> = (0..n)
                .map(|_| Vector3::new(rng.gen_range(-0.4..0.4), rng.gen_range(-0.4..0.4), rng.gen_range(0.0..0.1)))
                .collect();
            let com = Vector3::new(rng.gen_range(-0.2..0.2), rng.gen_range(-0.2..0.2), 0.25);
            let sol = distribute_contact_forces(&feet, &com, 58.86, &up(n)).unwrap();
            if sol.balanced {
                let (fr, mr) = balance_residuals(&feet, &com, 58.86, &sol.forces);
                assert!(fr < 1e-6 && mr < 1e-6);
                assert!(sol.forces.iter().all(|f| f.z >= -1e-12));
            }
        }
    }

    fn leg() -> LegModel {
        RobotModel::quad().legs[0].clone()
    }

    #[test]
    fn massless_reactions_equal_contact() {
        let mut leg = leg();
        leg.link_masses_kg = [0.0; 3];
        let f = Vector3::new(1.0, -2.0, 9.0);
        for r in joint_reaction_forces(&leg, &f) {
            assert_eq!(r, f);
        }
    }

    #[test]
    fn swing_reactions_are_distal_weight() {
        let leg = leg();
        let r = joint_reaction_forces(&leg, &Vector3::zeros());
        assert!((r[2].z + GRAVITY * leg.link_masses_kg[2]).abs() < 1e-12);
        assert!((r[1].z + GRAVITY * (leg.link_masses_kg[1] + leg.link_masses_kg[2])).abs() < 1e-12);
    }

    #[test]
    fn hip_reaction_sums_contact_and_all_links() {
        let mut rng = ChaCha8Rng::seed_from_u64(33);
        for _ in 0..100 {
            let mut leg = leg();
            leg.link_masses_kg = [rng.gen(), rng.gen(), rng.gen()];
            let f = Vector3::new(rng.gen(), rng.gen(), rng.gen::<f64>() * 30.0);
            let mut oracle = f;
            for m in leg.link_masses_kg {
                oracle.z -= m * GRAVITY;
            }
            assert!((joint_reaction_forces(&leg, &f)[0] - oracle).norm() < 1e-12);
        }
    }

    #[test]
    fn force_through_hip_pitch_axis_costs_no_hip_torque() {
        let mut leg = leg();
        leg.link_masses_kg = [0.0; 3];
        let mount = HipMount::new(0.0, 0.0, 0.0);
        let q = leg.joint_state([0.2, 0.5, 1.0]);
        let pts = leg_points(&leg, &q, &mount);
        let f = 7.0 * (pts.foot - pts.pitch).normalize();
        let tau = joint_torques(&leg, &q, &mount, &f);
        assert!(tau[1].abs() < 1e-12);
    }

    #[test]
    fn horizontal_reach_vertical_load() {
        let mut leg = leg();
        leg.link_masses_kg = [0.0; 3];
        leg.coxa_length_m = 0.0;
        let mount = HipMount::new(0.0, 0.0, 0.0);
        let q = leg.joint_state([0.0, 0.0, 0.0]);
        let tau = joint_torques(&leg, &q, &mount, &Vector3::new(0.0, 0.0, 10.0));
        assert!((tau[1] - 10.0 * leg.leg_length()).abs() < 1e-12);
    }

    /// Potential of the leg: link weights minus the work of the constant foot force.
    fn potential(leg: &LegModel, q: &JointState, mount: &HipMount, f: &Vector3<f64>) -> f64 {
        let pts = leg_points(leg, q, mount);
        let gravity: f64 = pts
            .link_centroids()
            .iter()
            .zip(&leg.link_masses_kg)
            .map(|(c, m)| m * GRAVITY * c.z)
            .sum();
        gravity - f.dot(&forward_kinematics(leg, q, mount))
    }

    #[test]
    fn torques_match_virtual_work() {
        let mut rng = ChaCha8Rng::seed_from_u64(34);
        let robot = RobotModel::hex();
        let h = 1e-6;
        for _ in 0..200 {
            let i = rng.gen_range(0..6);
            let (leg, mount) = (&robot.legs[i], &robot.mounts[i]);
            let q = leg.joint_state([rng.gen_range(-1.5..1.5), rng.gen_range(-2.0..2.0), rng.gen_range(0.0..2.7)]);
            let f = Vector3::new(rng.gen_range(-5.0..5.0), rng.gen_range(-5.0..5.0), rng.gen_range(0.0..30.0));
            let tau = joint_torques(leg, &q, mount, &f);
            for j in 0..3 {
                let (mut plus, mut minus) = (q, q);
                plus.angles[j] += h;
                minus.angles[j] -= h;
                let fd = (potential(leg, &plus, mount, &f) - potential(leg, &minus, mount, &f)) / (2.0 * h);
                assert!((tau[j] - fd).abs() < 1e-6, "joint {j}: {} vs {fd}", tau[j]);
            }
        }
    }
}
