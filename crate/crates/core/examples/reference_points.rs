//! Das-Dennis reference points and the population sizes they imply.

use gaitopt::nsga3::{divisions_for_population, generate_reference_points, reference_point_count};

fn main() -> gaitopt::Result<()> {
    for (m, p) in [(2, 4), (3, 4), (3, 12), (5, 6)] {
        println!("M={m} p={p}: {} points", reference_point_count(m, p));
    }

    let refs = generate_reference_points(3, 4)?;
    for w in refs.points() {
        println!("{:.2} {:.2} {:.2}", w[0], w[1], w[2]);
    }

    // the default population of 91 is exactly the 3-objective, 12-division simplex
    let p = divisions_for_population(3, 91)?;
    println!("population 91 -> {p} divisions");
    Ok(())
}
