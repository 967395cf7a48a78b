//! Merging sensing and power into one move makes everyone worse off.

use sensegame::efficiency::EfficiencyModel;
use sensegame::hybrid::{paradox_report, GridSpec};
use sensegame::oneshot::NetworkConfig;

fn main() -> sensegame::Result<()> {
    let cfg = NetworkConfig::symmetric(2, 1.0, 1.0, 0.1, 1.0)?.with_sensing_cost(0.05)?;
    let model = EfficiencyModel::exp_ratio(0.5)?;
    let r = paradox_report(&cfg, &model, 0.05, &GridSpec::default())?;

    println!("sensing strictly dominated: {} (min margin {:.3e})", r.dominance.strict, r.dominance.min_margin);
    for e in &r.hybrid_equilibria {
        println!(
            "grid NE: ({:?} {:.5} W, {:?} {:.5} W) -> ({:.4}, {:.4})",
            e.actions[0].sense, e.actions[0].power, e.actions[1].sense, e.actions[1].power, e.utilities[0], e.utilities[1]
        );
    }
    for o in &r.two_stage {
        println!("{:>10}: ({:.4}, {:.4}) {:?}", o.name, o.utilities[0], o.utilities[1], o.verdict);
    }
    println!("paradox = {}", r.paradox);
    Ok(())
}
