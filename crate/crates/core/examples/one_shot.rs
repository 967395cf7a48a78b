//! Closed-form Nash powers against best-response dynamics on an asymmetric
//! three-user uplink.

use sensegame::efficiency::EfficiencyModel;
use sensegame::oneshot::{br_dynamics, nash_powers, sinr, utility, NetworkConfig, PowerVector};

fn main() -> sensegame::Result<()> {
    let cfg = NetworkConfig::new(vec![1.0, 0.6, 1.4], vec![1.0, 2.0, 1.0], 0.05, vec![5.0; 3])?;
    let model = EfficiencyModel::exp_ratio(0.3)?;

    let p = nash_powers(&cfg, &model)?;
    let br = br_dynamics(&cfg, &model, &PowerVector(vec![0.01; 3]), 1e-13, 10_000)?;
    println!("best response converged = {} after {} rounds", br.converged, br.iterations);
    for i in 0..cfg.k() {
        println!(
            "user {i}: p* = {:.6} W, p_BR = {:.6} W, SINR = {:.6}, u = {:.4} bit/J",
            p.0[i],
            br.powers.0[i],
            sinr(&cfg, &p, i)?,
            utility(&cfg, &model, &p, i)?
        );
    }
    Ok(())
}
