//! Leader and follower operating points next to the Nash point.

use sensegame::efficiency::EfficiencyModel;
use sensegame::hierarchy::stackelberg_outcome;
use sensegame::oneshot::{nash_powers, utility, NetworkConfig};

fn main() -> sensegame::Result<()> {
    let cfg = NetworkConfig::symmetric(2, 1.0, 1.0, 0.1, 1.0)?.with_sensing_cost(0.05)?;
    let model = EfficiencyModel::exp_ratio(0.5)?;
    let p = nash_powers(&cfg, &model)?;
    println!("Nash: p = {:.6} W, u = {:.4} bit/J", p.0[0], utility(&cfg, &model, &p, 0)?);
    for i in 0..cfg.k() {
        let s = stackelberg_outcome(&cfg, &model, i)?;
        println!(
            "player {i} leads: p_L = {:.6} W u_L = {:.4}; p_F = {:.6} W u_F = {:.4} (beta {:.4}, gamma {:.4})",
            s.leader_power, s.leader_utility, s.follower_power, s.follower_utility, s.beta, s.gamma
        );
    }
    Ok(())
}
