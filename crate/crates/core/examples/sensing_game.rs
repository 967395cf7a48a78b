//! Four-player sensing game: potential checks and pure equilibria.

use sensegame::efficiency::EfficiencyModel;
use sensegame::game::enumerate_pure_equilibria;
use sensegame::hierarchy::GammaIndexing;
use sensegame::oneshot::NetworkConfig;
use sensegame::sensing_game::{
    check_exact_potential, check_weighted_potential, profile_of, sensing_game_from_units, PotentialTable,
    UnitUtilities,
};

fn main() -> sensegame::Result<()> {
    let model = EfficiencyModel::exp_ratio(0.2)?;
    let cfg = NetworkConfig::new(vec![1.0, 0.8, 1.2, 0.5], vec![1.0; 4], 0.1, vec![2.0; 4])?
        .with_sensing_cost(0.05)?
        .with_processing_gain(16.0)?;
    let units = UnitUtilities::compute(&cfg, &model, GammaIndexing::Verbatim)?;
    let game = sensing_game_from_units(&cfg, &units)?;

    let exact = check_exact_potential(&game, 1e-9);
    let weighted = check_weighted_potential(&game, &cfg.weights(), 1e-9)?;
    println!("exact potential: {} (max cycle {:.2e})", exact.passed, exact.max_cycle);
    println!("weighted potential: {} (max error {:.2e})", weighted.passed, weighted.max_deviation_error);

    for idx in enumerate_pure_equilibria(&game, 1e-12)? {
        println!("NE {:?} -> {:?}", game.label_tuple(idx), game.payoffs_at(idx));
    }

    // equal weights: the potential maximizers are exactly the NE profiles
    let sym = NetworkConfig::symmetric(4, 1.0, 1.0, 0.1, 2.0)?.with_sensing_cost(0.05)?.with_processing_gain(16.0)?;
    let u = UnitUtilities::compute(&sym, &model, GammaIndexing::Verbatim)?;
    let g = sensing_game_from_units(&sym, &u)?;
    let argmax = PotentialTable::from_units(&u, sym.weights()).argmax(1e-12);
    let first = enumerate_pure_equilibria(&g, 1e-12)?[0];
    println!("symmetric game: argmax profiles {argmax:?}, first NE profile {:?}", profile_of(&g, first));
    Ok(())
}
