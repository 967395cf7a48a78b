//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Runs as a plain binary (`harness = false`) so the verdict lines are always
//! printed. Criteria listed in `KNOWN_RED` are reported as FAIL without
//! failing the process; any other failure exits non-zero.

use std::path::Path;
use std::process::Command;

use nalgebra::{Matrix2, Matrix4, Vector2, Vector4};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use sensegame::correlated::{
    ce_utility_region, is_correlated_equilibrium, lambda_mixture, optimize_over_ce, weighted_objective,
    CorrelatedDistribution,
};
use sensegame::efficiency::{solve_beta, solve_gamma, solve_gamma_l, EfficiencyModel, DEFAULT_ROOT_TOL};
use sensegame::game::{enumerate_pure_equilibria, FiniteGame};
use sensegame::hierarchy::GammaIndexing;
use sensegame::hybrid::{
    build_hybrid_game, dominance_check, hybrid_equilibria, paradox_report, GridSpec, Verdict,
};
use sensegame::oneshot::{br_dynamics, nash_powers, sinr, NetworkConfig, PowerVector};
use sensegame::sensing_game::{
    check_exact_potential, check_weighted_potential, profile_of, sensing_game_from_units, PotentialTable,
    UnitUtilities,
};
use sensegame::two_player::{
    build_matrix, classify_equilibria, matrix_from_roots, mixed_closed_form, mixed_equilibrium, Classification,
    SensingMatrix2x2, TwoPlayerRoots,
};
use sensegame::Error;

/// Criteria whose literal statement cannot hold; see the README.
const KNOWN_RED: &[(u32, &str)] = &[(
    8,
    "on any grid holding p* and a point q above it, (q, q) is a second grid equilibrium",
)];

struct Outcome {
    ok: bool,
    detail: String,
}

type Criterion = (u32, &'static str, fn() -> Outcome);

fn check(ok: bool, detail: impl Into<String>) -> Outcome {
    Outcome { ok, detail: detail.into() }
}

fn reference_network() -> NetworkConfig {
    NetworkConfig::symmetric(2, 1.0, 1.0, 0.1, 1.0).unwrap()
}

fn half() -> EfficiencyModel {
    EfficiencyModel::exp_ratio(0.5).unwrap()
}

fn criterion_1() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let (mut worst_beta, mut worst_gamma, mut worst_res) = (0.0f64, 0.0f64, 0.0f64);
    for _ in 0..50 {
        let a = rng.gen_range(0.05..0.95);
        let m = EfficiencyModel::exp_ratio(a).unwrap();
        let beta = solve_beta(&m, DEFAULT_ROOT_TOL).unwrap();
        let gamma = solve_gamma(&m, 2, DEFAULT_ROOT_TOL).unwrap();
        worst_beta = worst_beta.max((beta.value - a).abs());
        worst_gamma = worst_gamma.max((gamma.value - a / (1.0 + a * a)).abs());
        worst_res = worst_res.max(beta.residual.abs()).max(gamma.residual.abs());
        // profile roots of a 3-player sensing game with ample processing gain
        for l in 1..=4 {
            let r = solve_gamma_l(&m, 3, 20.0, l, DEFAULT_ROOT_TOL).unwrap();
            worst_res = worst_res.max(r.root.residual.abs());
        }
    }
    check(
        worst_beta <= 1e-9 && worst_gamma <= 1e-9 && worst_res <= 1e-10,
        format!("max |β*-a| = {worst_beta:.2e}, max |γ*-a/(1+a²)| = {worst_gamma:.2e}, max residual = {worst_res:.2e}"),
    )
}

fn criterion_2() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let (mut accepted, mut failures) = (0, 0);
    let (mut worst_p, mut worst_sinr) = (0.0f64, 0.0f64);
    while accepted < 100 {
        let k = rng.gen_range(2..=6);
        let a = rng.gen_range(0.05..0.95 / (k - 1) as f64);
        let model = EfficiencyModel::exp_ratio(a).unwrap();
        let gains: Vec<f64> = (0..k).map(|_| rng.gen_range(0.2..2.0)).collect();
        let rates: Vec<f64> = (0..k).map(|_| rng.gen_range(0.5..2.0)).collect();
        let caps: Vec<f64> = (0..k).map(|_| rng.gen_range(1.0..10.0)).collect();
        let cfg = NetworkConfig::new(gains, rates, rng.gen_range(0.01..1.0), caps).unwrap();
        let p = match nash_powers(&cfg, &model) {
            Ok(p) => p,
            Err(Error::Saturated { .. }) => continue,
            Err(e) => panic!("unexpected error on a feasible draw: {e}"),
        };
        accepted += 1;
        let br = br_dynamics(&cfg, &model, &PowerVector(cfg.max_power.clone()), 1e-14, 200_000).unwrap();
        if !br.converged || br.saturated {
            failures += 1;
        }
        for i in 0..k {
            worst_p = worst_p.max((br.powers.0[i] - p.0[i]).abs());
            worst_sinr = worst_sinr.max((sinr(&cfg, &p, i).unwrap() - a).abs());
        }
    }
    check(
        failures == 0 && worst_p <= 1e-6 && worst_sinr <= 1e-9,
        format!("{failures} non-converged, max |p_BR - p*| = {worst_p:.2e} W, max |SINR - β*| = {worst_sinr:.2e}"),
    )
}

fn random_sensing_config(rng: &mut ChaCha8Rng, k: usize, equal: bool) -> (NetworkConfig, EfficiencyModel) {
    let a = rng.gen_range(0.05..0.95);
    let n = rng.gen_range(k as f64 * a + 1.0..50.0);
    let (h, r) = (rng.gen_range(0.2..2.0), rng.gen_range(0.5..2.0));
    let gains = (0..k).map(|_| if equal { h } else { rng.gen_range(0.2..2.0) }).collect();
    let rates = (0..k).map(|_| if equal { r } else { rng.gen_range(0.5..2.0) }).collect();
    let cfg = NetworkConfig::new(gains, rates, rng.gen_range(0.01..1.0), vec![10.0; k])
        .unwrap()
        .with_processing_gain(n)
        .unwrap();
    (cfg, EfficiencyModel::exp_ratio(a).unwrap())
}

fn criterion_3() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let (mut bad_weighted, mut bad_equal, mut skipped) = (0, 0, 0);
    let mut worst = 0.0f64;
    let mut done = 0;
    while done < 100 {
        let k = rng.gen_range(2..=6);
        let (cfg, model) = random_sensing_config(&mut rng, k, false);
        let Ok(units) = UnitUtilities::compute(&cfg, &model, GammaIndexing::Verbatim) else {
            skipped += 1;
            continue;
        };
        done += 1;
        let game = sensing_game_from_units(&cfg, &units).unwrap();
        let w = check_weighted_potential(&game, &cfg.weights(), 1e-9).unwrap();
        worst = worst.max(w.max_deviation_error).max(w.normalized.max_cycle);
        if !(w.passed && w.max_deviation_error <= 1e-9) {
            bad_weighted += 1;
        }
        let (eq_cfg, eq_model) = random_sensing_config(&mut rng, k, true);
        if let Ok(eq_units) = UnitUtilities::compute(&eq_cfg, &eq_model, GammaIndexing::Verbatim) {
            let g = sensing_game_from_units(&eq_cfg, &eq_units).unwrap();
            if !check_exact_potential(&g, 1e-9).passed {
                bad_equal += 1;
            }
        }
    }
    check(
        bad_weighted == 0 && bad_equal == 0,
        format!(
            "{bad_weighted} weighted failures, {bad_equal} equal-weight failures, worst scaled error {worst:.2e} ({skipped} infeasible draws resampled)"
        ),
    )
}

fn criterion_4() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let (mut mismatches, mut done) = (0, 0);
    while done < 50 {
        let k = rng.gen_range(2..=8);
        let (cfg, model) = random_sensing_config(&mut rng, k, true);
        let Ok(units) = UnitUtilities::compute(&cfg, &model, GammaIndexing::Verbatim) else { continue };
        done += 1;
        let game = sensing_game_from_units(&cfg, &units).unwrap();
        let mut enumerated: Vec<usize> = enumerate_pure_equilibria(&game, 1e-12)
            .unwrap()
            .into_iter()
            .map(|idx| profile_of(&game, idx).sensing)
            .collect();
        enumerated.sort_unstable();
        enumerated.dedup();
        let mut argmax: Vec<usize> = PotentialTable::from_units(&units, cfg.weights())
            .argmax(1e-12)
            .into_iter()
            .map(|p| p.sensing)
            .collect();
        argmax.sort_unstable();
        if enumerated != argmax {
            mismatches += 1;
        }
    }
    check(mismatches == 0, format!("{mismatches}/50 instances with differing profile sets"))
}

fn classify_at(roots: TwoPlayerRoots, alpha: f64) -> Classification {
    classify_equilibria(&matrix_from_roots([10.0, 10.0], alpha, roots)).classification
}

fn criterion_5() -> Outcome {
    let roots = TwoPlayerRoots::solve(&half()).unwrap();
    let t = roots.three_equilibria_threshold();
    let below = [0.0, 0.05, 0.1, 0.125 - 2e-6].iter().all(|&a| classify_at(roots, a) == Classification::Three);
    let above = [0.125 + 2e-6, 0.2, 0.5, 0.9].iter().all(|&a| classify_at(roots, a) == Classification::Unique);
    let boundary = classify_at(roots, t) == Classification::Continuum;
    let (mut lo, mut hi) = (0.0, 0.3);
    while hi - lo > 1e-8 {
        let mid = 0.5 * (lo + hi);
        if classify_at(roots, mid) == Classification::Three {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let flip = 0.5 * (lo + hi);

    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut disagreements = 0;
    for _ in 0..1000 {
        let a = rng.gen_range(0.05..0.95);
        let alpha = rng.gen_range(0.0..0.6);
        let r = TwoPlayerRoots::solve(&EfficiencyModel::exp_ratio(a).unwrap()).unwrap();
        let m = matrix_from_roots([1.0, 1.0], alpha, r);
        let (nash, lead, follow) = (m.payoffs[0][0][0], m.payoffs[0][0][1], m.payoffs[0][1][0]);
        if (alpha < r.three_equilibria_threshold()) != (nash < follow) {
            disagreements += 1;
        }
        if (alpha < r.follow_vs_lead_threshold()) != (follow > lead) {
            disagreements += 1;
        }
    }
    check(
        below && above && boundary && (flip - t).abs() <= 1e-6 && disagreements == 0,
        format!(
            "threshold {t:.9}, bisected flip {flip:.9}, boundary CONTINUUM = {boundary}, {disagreements} threshold/payoff disagreements in 1000 draws"
        ),
    )
}

/// Independent 2x2 indifference solve for `player`: returns the opponent's
/// NS probability and the common value, from a 2x2 linear system in `(y, v)`.
fn indifference(m: &SensingMatrix2x2, player: usize) -> (f64, f64) {
    // own payoffs indexed [own action][other action]
    let u = |own: usize, other: usize| {
        if player == 0 {
            m.payoffs[0][own][other]
        } else {
            m.payoffs[1][other][own]
        }
    };
    // u(own, NS) y + u(own, S) (1 - y) = v for own in {NS, S}
    let a = Matrix2::new(u(0, 0) - u(0, 1), -1.0, u(1, 0) - u(1, 1), -1.0);
    let b = Vector2::new(-u(0, 1), -u(1, 1));
    let s = a.lu().solve(&b).expect("nonsingular indifference system");
    (s[0], s[1])
}

fn criterion_6() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut worst = 0.0f64;
    let mut tested = 0;
    while tested < 200 {
        let a = rng.gen_range(0.05..0.95);
        let r = TwoPlayerRoots::solve(&EfficiencyModel::exp_ratio(a).unwrap()).unwrap();
        let alpha = rng.gen_range(0.0..r.three_equilibria_threshold());
        let m = matrix_from_roots([1.0, 1.0], alpha, r);
        let Ok(mp) = mixed_equilibrium(&m) else { continue };
        tested += 1;
        let (x, delta) = mixed_closed_form(&r, alpha);
        worst = worst.max((mp.not_sense[0] - x).abs()).max((mp.not_sense[1] - x).abs());
        worst = worst.max((mp.values[0] - delta).abs()).max((mp.values[1] - delta).abs());
    }
    let m = build_matrix(&reference_network(), &half(), 0.05).unwrap();
    let mp = mixed_equilibrium(&m).unwrap();
    // y: player 2's NS weight from player 1's indifference; x symmetric
    let (y, v1) = indifference(&m, 0);
    let (x, v2) = indifference(&m, 1);
    let independent = (x - mp.not_sense[0]).abs() <= 1e-9
        && (y - mp.not_sense[1]).abs() <= 1e-9
        && (v1 - mp.values[0]).abs() <= 1e-9
        && (v2 - mp.values[1]).abs() <= 1e-9;
    // the quoted figures carry three decimals; one unit in the last place
    let reference = (mp.not_sense[0] - 0.508).abs() <= 1e-3
        && (mp.not_sense[1] - 0.508).abs() <= 1e-3
        && (mp.values[0] - 3.749).abs() <= 1e-3
        && (mp.values[1] - 3.749).abs() <= 1e-3;
    check(
        worst <= 1e-9 && independent && reference,
        format!(
            "max closed-form gap {worst:.2e} over {tested} draws; independent solve agrees = {independent}; reference profile ({:.4}, {:.4}), value {:.4}",
            mp.not_sense[0], mp.not_sense[1], mp.values[0]
        ),
    )
}

/// Maximum of `c·q` over the CE polytope of a 2x2 game by enumerating
/// vertices: three active inequalities plus `Σq = 1`.
fn vertex_enumeration_max(game: &FiniteGame, c: &[f64]) -> f64 {
    let u = |p: usize, r: usize, s: usize| game.payoff(game.index_of(&[r, s]), p);
    let mut rows: Vec<[f64; 4]> = Vec::new();
    // joint index order (r, s): 0=(0,0) 1=(0,1) 2=(1,0) 3=(1,1)
    for a in 0..2 {
        let b = 1 - a;
        let mut row = [0.0; 4];
        for s in 0..2 {
            row[2 * a + s] = u(0, a, s) - u(0, b, s);
        }
        rows.push(row);
        let mut row = [0.0; 4];
        for r in 0..2 {
            row[2 * r + a] = u(1, r, a) - u(1, r, b);
        }
        rows.push(row);
    }
    for j in 0..4 {
        let mut row = [0.0; 4];
        row[j] = 1.0;
        rows.push(row);
    }
    let scale = game.payoff_scale().max(1.0);
    let mut best = f64::NEG_INFINITY;
    for i in 0..rows.len() {
        for j in i + 1..rows.len() {
            for k in j + 1..rows.len() {
                let m = Matrix4::from_rows(&[
                    rows[i].into(),
                    rows[j].into(),
                    rows[k].into(),
                    [1.0; 4].into(),
                ]);
                let Some(q) = m.lu().solve(&Vector4::new(0.0, 0.0, 0.0, 1.0)) else { continue };
                if q.iter().any(|v| !v.is_finite()) {
                    continue;
                }
                let feasible = rows
                    .iter()
                    .all(|r| r.iter().zip(q.iter()).map(|(a, b)| a * b).sum::<f64>() >= -1e-10 * scale);
                if feasible {
                    best = best.max(c.iter().zip(q.iter()).map(|(a, b)| a * b).sum());
                }
            }
        }
    }
    best
}

fn criterion_7() -> Outcome {
    let matrix = build_matrix(&reference_network(), &half(), 0.05).unwrap();
    let game = matrix.to_game().unwrap();
    let lambdas_ok = (0..=100).all(|k| {
        let d = lambda_mixture(&game, k as f64 / 100.0).unwrap();
        is_correlated_equilibrium(&game, &d, 1e-12).unwrap().0
    });
    let pure = enumerate_pure_equilibria(&game, 1e-12).unwrap();
    let masses_ok = pure.iter().all(|&idx| {
        let d = CorrelatedDistribution::point_mass(&game, idx).unwrap();
        is_correlated_equilibrium(&game, &d, 1e-12).unwrap().0
    });
    let welfare = weighted_objective(&game, &[1.0, 1.0]);
    let lp_welfare = optimize_over_ce(&game, &welfare).unwrap().value;
    let mixed = mixed_equilibrium(&matrix).unwrap();
    let best_ne = pure
        .iter()
        .map(|&i| welfare[i])
        .chain(std::iter::once(mixed.values[0] + mixed.values[1]))
        .fold(f64::NEG_INFINITY, f64::max);
    let welfare_ok = lp_welfare >= best_ne - 1e-9;

    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst_gap = 0.0f64;
    let labels = || [vec!["A".to_string(), "B".to_string()], vec!["A".to_string(), "B".to_string()]];
    for n in 0..200 {
        let g = if n % 2 == 0 {
            let row: Vec<Vec<f64>> = (0..2).map(|_| (0..2).map(|_| rng.gen_range(-1.0..1.0)).collect()).collect();
            let col: Vec<Vec<f64>> = (0..2).map(|_| (0..2).map(|_| rng.gen_range(-1.0..1.0)).collect()).collect();
            FiniteGame::bimatrix(labels(), &row, &col).unwrap()
        } else {
            let r = TwoPlayerRoots::solve(&EfficiencyModel::exp_ratio(rng.gen_range(0.05..0.95)).unwrap()).unwrap();
            let w = [rng.gen_range(0.5..20.0), rng.gen_range(0.5..20.0)];
            matrix_from_roots(w, rng.gen_range(0.0..0.5), r).to_game().unwrap()
        };
        let theta: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
        let c = weighted_objective(&g, &[theta.cos(), theta.sin()]);
        let lp = optimize_over_ce(&g, &c).unwrap().value;
        let oracle = vertex_enumeration_max(&g, &c);
        worst_gap = worst_gap.max((lp - oracle).abs());
    }

    let unique = build_matrix(&reference_network(), &half(), 0.2).unwrap();
    let ug = unique.to_game().unwrap();
    let region = ce_utility_region(&ug, 72).unwrap();
    let radius = region.radius_about([unique.payoffs[0][0][0], unique.payoffs[1][0][0]]);
    check(
        lambdas_ok && masses_ok && welfare_ok && worst_gap <= 1e-9 && radius <= 1e-6,
        format!(
            "λ grid ok = {lambdas_ok}, NE point masses ok = {masses_ok}, LP welfare {lp_welfare:.6} vs best NE {best_ne:.6}, LP vs vertex enumeration max gap {worst_gap:.2e}, UNIQUE-regime region radius {radius:.2e}"
        ),
    )
}

fn criterion_8() -> Outcome {
    let cfg = reference_network().with_sensing_cost(0.05).unwrap();
    let grid = GridSpec::default();
    let hg = build_hybrid_game(&cfg, &half(), &grid).unwrap();
    let dom = dominance_check(&hg);
    let dominance_ok = dom.strict && dom.max_identity_error <= 1e-12;
    let eq = hybrid_equilibria(&hg).unwrap();
    let p_star = nash_powers(&cfg, &half()).unwrap();
    let k: Vec<usize> = (0..2)
        .map(|i| {
            (0..hg.grids[i].len())
                .min_by(|&a, &b| (hg.grids[i][a] - p_star.0[i]).abs().total_cmp(&(hg.grids[i][b] - p_star.0[i]).abs()))
                .unwrap()
        })
        .collect();
    let nearest = hg.game.index_of(&[k[0], k[1]]);
    let nearest_is_ne = eq.iter().any(|e| e.joint == nearest);
    let unique = eq.len() == 1 && nearest_is_ne;
    let report = paradox_report(&cfg, &half(), 0.05, &grid).unwrap();
    let sn = report.two_stage.iter().find(|o| o.name == "(S,NS)").unwrap();
    let hyb = report.reference.utilities;
    let pareto = sn.verdict == Verdict::ParetoDominates
        && (sn.utilities[0] - 3.994).abs() < 5e-4
        && (sn.utilities[1] - 3.820).abs() < 5e-4
        && (hyb[0] - 3.679).abs() < 5e-4
        && (hyb[1] - 3.679).abs() < 5e-4;
    let others: Vec<String> = eq
        .iter()
        .filter(|e| e.joint != nearest)
        .map(|e| format!("(NS,{:.5}),(NS,{:.5}) margin {:.2e}", e.actions[0].power, e.actions[1].power, e.min_deviation_loss))
        .collect();
    check(
        dominance_ok && unique && pareto,
        format!(
            "dominance strict = {}, identity error {:.2e}; {} grid equilibria, nearest-grid Nash pair is NE = {nearest_is_ne}, unique = {unique}{}; two-stage (S,NS) = ({:.3}, {:.3}) vs hybrid ({:.3}, {:.3}) Pareto = {pareto}",
            dom.strict,
            dom.max_identity_error,
            eq.len(),
            if others.is_empty() { String::new() } else { format!(" [extra: {}]", others.join("; ")) },
            sn.utilities[0],
            sn.utilities[1],
            hyb[0],
            hyb[1],
        ),
    )
}

fn run_cli(config: &Path, out: &Path) -> Vec<(String, Vec<u8>)> {
    let commands = [
        "roots",
        "one-shot",
        "stackelberg",
        "sensing-game",
        "two-player",
        "correlated-region",
        "hybrid-paradox",
        "alpha-sweep",
    ];
    for c in commands {
        let status = Command::new(env!("CARGO_BIN_EXE_sensegame"))
            .args([c, "--config"])
            .arg(config)
            .arg("--out")
            .arg(out)
            .status()
            .expect("binary runs");
        assert!(status.success(), "{c} failed");
    }
    let mut files: Vec<(String, Vec<u8>)> = std::fs::read_dir(out)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (e.file_name().to_string_lossy().into_owned(), std::fs::read(e.path()).unwrap())
        })
        .collect();
    files.sort();
    files
}

fn criterion_9() -> Outcome {
    let config = Path::new(env!("CARGO_MANIFEST_DIR")).join("configs/reference.json");
    let dir = tempfile::tempdir().unwrap();
    let first = run_cli(&config, &dir.path().join("a"));
    let second = run_cli(&config, &dir.path().join("b"));
    let bytes: usize = first.iter().map(|(_, b)| b.len()).sum();
    check(
        first == second && first.len() >= 8,
        format!("{} output files, {bytes} bytes, identical = {}", first.len(), first == second),
    )
}

fn main() {
    let criteria: [Criterion; 9] = [
        (1, "root solvers", criterion_1),
        (2, "Nash powers vs best-response dynamics", criterion_2),
        (3, "weighted potential", criterion_3),
        (4, "potential maximizers = pure equilibria", criterion_4),
        (5, "two-player classification and thresholds", criterion_5),
        (6, "mixed equilibrium", criterion_6),
        (7, "correlated equilibria", criterion_7),
        (8, "hybrid game paradox", criterion_8),
        (9, "CLI determinism", criterion_9),
    ];
    let mut unexpected = 0;
    for (n, name, f) in criteria {
        let v = f();
        let known = KNOWN_RED.iter().find(|(k, _)| *k == n);
        let tag = if v.ok { "PASS" } else { "FAIL" };
        println!("{tag} criterion {n} ({name}): {}", v.detail);
        match (v.ok, known) {
            (false, Some((_, why))) => println!("     known red: {why}"),
            (false, None) => unexpected += 1,
            (true, Some(_)) => println!("     listed as known red but passed; update KNOWN_RED"),
            (true, None) => {}
        }
    }
    if unexpected > 0 {
        eprintln!("{unexpected} acceptance criteria failed");
        std::process::exit(1);
    }
}
