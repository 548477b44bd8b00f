//! Load a run configuration, apply an environment-style override and print the
//! canonical form and its hash.

use gaitopt::config::RunConfig;

const TEXT: &str = r#"
morphology = "hex"
gait = "wave"
seed = 9

[terrain]
kind = "slope"
angle_deg = 8.0

[optimizer]
population_size = 28
generations = 20
"#;

fn main() -> gaitopt::Result<()> {
    let cfg = RunConfig::parse(TEXT, [])?;
    println!("{}", cfg.to_toml());
    println!("hash {}", cfg.hash());

    // what GAITOPT_OPTIMIZER__GENERATIONS=40 does
    let tweaked = RunConfig::parse(TEXT, [("OPTIMIZER__GENERATIONS".to_string(), "40".to_string())])?;
    println!("generations {} -> {}", cfg.optimizer.generations, tweaked.optimizer.generations);
    println!("hash {}", tweaked.hash());

    let err = RunConfig::parse("morphology = \"quad\"\ngait = \"tripod\"\n", [])?
        .validate()
        .unwrap_err();
    println!("rejected: {err}");
    Ok(())
}
