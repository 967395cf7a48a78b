//! Classification of the two-player game across sensing costs, as CSV.

use sensegame::cli::{alpha_sweep, reference_config};
use sensegame::config::SweepSpec;
use sensegame::efficiency::EfficiencyModel;
use sensegame::oneshot::NetworkConfig;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let network = NetworkConfig::symmetric(2, 1.0, 1.0, 0.1, 1.0)?.with_processing_gain(10.0)?;
    let cfg = reference_config(network, EfficiencyModel::exp_ratio(0.5)?);
    let alphas = SweepSpec { from: 0.0, to: 0.3, steps: 13 }.values();
    print!("{}", alpha_sweep(&cfg, &alphas)?.to_csv()?);
    Ok(())
}
