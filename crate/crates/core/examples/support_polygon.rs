//! Support polygon, stability margin and the minimum-norm contact forces.

use gaitopt::evaluator::{balance_residuals, distribute_contact_forces, Point2, SupportPolygon};
use nalgebra::Vector3;

fn main() -> gaitopt::Result<()> {
    let feet = [
        Vector3::new(0.3, 0.2, 0.0),
        Vector3::new(0.3, -0.2, 0.0),
        Vector3::new(-0.3, 0.2, 0.0),
        Vector3::new(-0.3, -0.2, 0.0),
    ];
    let ground: Vec<Point2> = feet.iter().map(|p| p.xy()).collect();
    let polygon = SupportPolygon::from_feet(&ground)?;
    println!("area {:.3} m^2", polygon.area());

    let normals = vec![Vector3::z(); feet.len()];
    let weight = 4.0 * 9.81;
    for com_x in [0.0, 0.15, 0.29, 0.4] {
        let com = Vector3::new(com_x, 0.0, 0.15);
        let margin = polygon.signed_distance(&com.xy());
        let sol = distribute_contact_forces(&feet, &com, weight, &normals)?;
        let (fr, mr) = balance_residuals(&feet, &com, weight, &sol.forces);
        let normals: Vec<String> = sol.forces.iter().map(|f| format!("{:6.2}", f.z)).collect();
        println!(
            "com x {com_x:.2}: margin {margin:+.3} m, balanced {}, normals [{}], residuals {fr:.1e} {mr:.1e}",
            sol.balanced,
            normals.join(" ")
        );
    }
    Ok(())
}
