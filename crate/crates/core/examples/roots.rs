//! SINR targets for the exponential-ratio efficiency over a few values of `a`.

use sensegame::efficiency::{solve_beta, solve_gamma, solve_gamma_l, EfficiencyModel, DEFAULT_ROOT_TOL};

fn main() -> sensegame::Result<()> {
    println!("{:>6} {:>12} {:>12} {:>12}", "a", "beta*", "gamma*(K=2)", "a/(1+a^2)");
    for a in [0.1, 0.25, 0.5, 0.75, 0.9] {
        let m = EfficiencyModel::exp_ratio(a)?;
        let beta = solve_beta(&m, DEFAULT_ROOT_TOL)?;
        let gamma = solve_gamma(&m, 2, DEFAULT_ROOT_TOL)?;
        println!("{a:>6.2} {:>12.9} {:>12.9} {:>12.9}", beta.value, gamma.value, a / (1.0 + a * a));
    }

    // profile roots of a 3-player game with processing gain 64
    let m = EfficiencyModel::goodman(80)?;
    for l in 1..=3 {
        let r = solve_gamma_l(&m, 3, 64.0, l, DEFAULT_ROOT_TOL)?;
        println!("Goodman M=80, L={l}: eps = {:.6}, gamma_L = {:.6} (residual {:.1e})", r.epsilon, r.root.value, r.root.residual);
    }
    Ok(())
}
