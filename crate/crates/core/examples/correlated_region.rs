//! Correlated equilibria of the 2x2 sensing game: the λ-mixtures and the
//! utility region traced by the LP.

use sensegame::correlated::{ce_utility_region, is_correlated_equilibrium, lambda_mixture, optimize_over_ce, weighted_objective};
use sensegame::efficiency::EfficiencyModel;
use sensegame::oneshot::NetworkConfig;
use sensegame::two_player::build_matrix;

fn main() -> sensegame::Result<()> {
    let cfg = NetworkConfig::symmetric(2, 1.0, 1.0, 0.1, 1.0)?;
    let model = EfficiencyModel::exp_ratio(0.5)?;
    let game = build_matrix(&cfg, &model, 0.05)?.to_game()?;

    for lambda in [0.0, 0.25, 0.5, 1.0] {
        let d = lambda_mixture(&game, lambda)?;
        let (ok, _) = is_correlated_equilibrium(&game, &d, 1e-12)?;
        println!("lambda = {lambda}: CE = {ok}, utilities {:?}", d.expected_utilities(&game));
    }

    let best = optimize_over_ce(&game, &weighted_objective(&game, &[1.0, 1.0]))?;
    println!("max welfare over CE = {:.6} bit/J", best.value);

    let region = ce_utility_region(&game, 36)?;
    println!("region hull ({} vertices):", region.hull.len());
    for v in &region.hull {
        println!("  ({:.4}, {:.4})", v[0], v[1]);
    }
    Ok(())
}
