//! Forward and inverse kinematics of one quadruped leg, plus static torques.

use gaitopt::evaluator::joint_torques;
use gaitopt::robot::{forward_kinematics, inverse_kinematics, leg_jacobian, RobotModel};
use nalgebra::Vector3;

fn main() {
    let robot = RobotModel::quad();
    let (leg, mount) = (&robot.legs[0], &robot.mounts[0]);
    println!("leg length {:.3} m, mass {:.2} kg", leg.leg_length(), leg.mass());

    let q = leg.joint_state([0.2, -0.4, 1.1]);
    let foot = forward_kinematics(leg, &q, mount);
    println!("foot at ({:.4}, {:.4}, {:.4})", foot.x, foot.y, foot.z);

    let back = inverse_kinematics(leg, &foot, mount).expect("reachable");
    println!("ik angles {:?}", back.angles);

    let j = leg_jacobian(leg, &q, mount);
    println!("jacobian det {:.5}", j.determinant());

    // a foot carrying a quarter of the body weight
    let f = Vector3::new(0.0, 0.0, robot.total_weight() / 4.0);
    let tau = joint_torques(leg, &q, mount, &f);
    println!("torques {:.3} {:.3} {:.3} Nm (limit {})", tau[0], tau[1], tau[2], leg.torque_limit_nm);

    let far = mount.position + Vector3::new(1.0, 0.0, -0.1);
    println!("1 m away reachable: {}", inverse_kinematics(leg, &far, mount).is_some());
}
