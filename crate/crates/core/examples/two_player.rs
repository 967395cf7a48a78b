//! The 2x2 sensing game on either side of the three-equilibria threshold.

use sensegame::efficiency::EfficiencyModel;
use sensegame::oneshot::NetworkConfig;
use sensegame::two_player::{alpha_threshold_three_eq, build_matrix, classify_equilibria};

fn main() -> sensegame::Result<()> {
    let cfg = NetworkConfig::symmetric(2, 1.0, 1.0, 0.1, 1.0)?;
    let model = EfficiencyModel::exp_ratio(0.5)?;
    println!("threshold = {:.6}", alpha_threshold_three_eq(&model)?);
    for alpha in [0.05, 0.125, 0.2] {
        let report = classify_equilibria(&build_matrix(&cfg, &model, alpha)?);
        println!("alpha = {alpha}: {:?}", report.classification);
        for e in &report.pure {
            println!("  pure {:?} -> ({:.4}, {:.4})", e.actions, e.utilities[0], e.utilities[1]);
        }
        if let Some(m) = &report.mixed {
            println!("  mixed P(NS) = ({:.4}, {:.4}) -> ({:.4}, {:.4})", m.not_sense[0], m.not_sense[1], m.values[0], m.values[1]);
        }
    }
    Ok(())
}
