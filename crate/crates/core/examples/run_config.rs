//! Load a TOML run configuration and produce the `green` table in memory.

use wspectral::commands::{run_command, Command};
use wspectral::config::RunConfig;

const HEAT: &str = include_str!("configs/heat.toml");

pub fn run_example() -> wspectral::Result<String> {
    let cfg = RunConfig::from_toml_str(HEAT)?;
    let out = run_command(Command::Green, &cfg)?;
    Ok(out.table.map(|t| t.to_csv()).unwrap_or_default())
}

#[allow(dead_code)]
fn main() -> wspectral::Result<()> {
    print!("{}", run_example()?);
    Ok(())
}
