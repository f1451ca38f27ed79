//! Acceptance suite: one test per criterion, each printing a PASS/FAIL line.
//!
//! Run with `cargo test -p amisc --test acceptance -- --nocapture` to see the
//! per-criterion lines.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::OnceLock;
use std::time::Instant;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use amisc::adaptive::{
    amisc_run, sparse_grid_run, update_coefficients, AdaptiveOptions, MiscDriver, MiscSurrogate,
    SparseGridDriver, TraceRow,
};
use amisc::combi::{
    combination_coefficients, isotropic_index_set, sparse_eval, sparse_points, CombinationWeights,
    IndexSet,
};
use amisc::index::MultiIndex;
use amisc::models::{
    advection_diffusion_ensemble, cosine_ladder, AdvectionDiffusionConfig, Cosine2d, CosineLadder,
    ModelEnsemble, Multilevel, Pinned,
};
use amisc::pce::{component_to_pce, gauss_legendre, PceExpansion};
use amisc::rules::cc_growth;
use amisc::studio::{relative_linf_error, sample_unit_cube, trace_csv};
use amisc::tensor::TensorComponent;

fn criterion(number: u32, name: &str, ok: bool, detail: &str) {
    let verdict = if ok { "PASS" } else { "FAIL" };
    println!("criterion {number:02} {name}: {verdict} | {detail}");
    assert!(ok, "criterion {number:02} {name} failed: {detail}");
}

fn uniform_points(seed: u64, n: usize, dim: usize) -> Vec<Vec<f64>> {
    sample_unit_cube(seed, n, dim)
}

/// Validation points and truth values of the desk-scale advection-diffusion
/// model at its finest level (4,4,4); shared between criteria 6 and 8.
fn desk_reference() -> &'static (Vec<Vec<f64>>, Vec<f64>) {
    static REFERENCE: OnceLock<(Vec<Vec<f64>>, Vec<f64>)> = OnceLock::new();
    REFERENCE.get_or_init(|| {
        let model = advection_diffusion_ensemble(AdvectionDiffusionConfig::desk()).unwrap();
        let validation = sample_unit_cube(17, 1000, 4);
        let truth: Vec<f64> = validation
            .iter()
            .map(|z| model.evaluate(&[4, 4, 4], z).unwrap()[0])
            .collect();
        (validation, truth)
    })
}

fn surrogate_error(surrogate: &MiscSurrogate, validation: &[Vec<f64>], truth: &[f64]) -> f64 {
    let values: Vec<f64> = validation
        .iter()
        .map(|z| surrogate.eval(z).unwrap()[0])
        .collect();
    relative_linf_error(truth, &values).unwrap()
}

/// Geometric work-checkpoint collector mirroring the studio schedule.
struct Checkpoints<'a> {
    validation: &'a [Vec<f64>],
    truth: &'a [f64],
    ratio: f64,
    next: Option<f64>,
    rows: Vec<(f64, f64)>, // (work, error)
}

impl<'a> Checkpoints<'a> {
    fn new(validation: &'a [Vec<f64>], truth: &'a [f64]) -> Self {
        Checkpoints {
            validation,
            truth,
            ratio: std::f64::consts::SQRT_2.sqrt(),
            next: None,
            rows: Vec::new(),
        }
    }

    fn on_step(&mut self, row: &TraceRow, surrogate: &MiscSurrogate) {
        let due = match self.next {
            None => true,
            Some(next) => row.work >= next,
        };
        if due {
            let e = surrogate_error(surrogate, self.validation, self.truth);
            self.rows.push((row.work, e));
            self.next = Some(row.work * self.ratio);
        }
    }

    fn first_crossing(&self, threshold: f64) -> Option<f64> {
        self.rows
            .iter()
            .find(|(_, e)| *e <= threshold)
            .map(|(w, _)| *w)
    }
}

#[test]
fn criterion_01_sparse_grid_counts() {
    let start = Instant::now();
    let expected = [(2usize, 13usize), (5, 61), (10, 221), (20, 841), (40, 3281)];
    let mut detail = String::new();
    let mut ok = true;
    for (d, want) in expected {
        let set = isotropic_index_set(2, d);
        let got = sparse_points(&set).unwrap().points.len();
        ok &= got == want;
        detail.push_str(&format!("d={d}: {got} (want {want}); "));
    }
    let elapsed = start.elapsed();
    ok &= elapsed.as_secs() < 10;
    detail.push_str(&format!("runtime {elapsed:?}"));
    criterion(1, "sparse-grid point counts", ok, &detail);
}

#[test]
fn criterion_02_incremental_coefficients_match_batch() {
    let mut rng = ChaCha8Rng::seed_from_u64(20_240);
    let mut sequences = 0usize;
    let mut insertions = 0usize;
    let mut ok = true;
    'outer: for trial in 0..1000 {
        let dim = 1 + (trial % 5);
        let mut accepted = IndexSet::new(dim);
        let mut weights = CombinationWeights::new();
        let mut count = 0;
        let mut attempts = 0;
        while count < 30 && attempts < 200 {
            attempts += 1;
            let cand = if accepted.is_empty() {
                MultiIndex::zeros(dim)
            } else {
                let members: Vec<MultiIndex> = accepted.iter().cloned().collect();
                let pick = &members[(rng.random::<f64>() * members.len() as f64) as usize];
                let k = (rng.random::<f64>() * dim as f64) as usize;
                pick.forward(k)
            };
            if accepted.contains(&cand) {
                continue;
            }
            let admissible = (0..dim).all(|j| match cand.backward(j) {
                Some(b) => accepted.contains(&b),
                None => true,
            });
            if !admissible {
                continue;
            }
            weights = update_coefficients(&weights, &accepted, &cand).unwrap();
            accepted.insert(cand).unwrap();
            count += 1;
            insertions += 1;
            let batch = combination_coefficients(&accepted).unwrap();
            if !weights.same_combination(&batch) {
                ok = false;
                break 'outer;
            }
        }
        sequences += 1;
    }
    criterion(
        2,
        "incremental coefficients equal batch formula",
        ok,
        &format!("{sequences} sequences, {insertions} insertions checked exactly"),
    );
}

#[test]
fn criterion_03_polynomial_exactness() {
    let set = isotropic_index_set(3, 3);
    let weights = combination_coefficients(&set).unwrap();
    // union of the per-index monomial boxes (degree <= m(level) - 1)
    let cap = |l: u32| cc_growth(l) - 1;
    let mut monomials: BTreeSet<Vec<usize>> = BTreeSet::new();
    for beta in set.iter() {
        let caps: Vec<usize> = beta.entries().iter().map(|&l| cap(l)).collect();
        let mut p = vec![0usize; 3];
        loop {
            monomials.insert(p.clone());
            let mut dim = 2usize;
            loop {
                p[dim] += 1;
                if p[dim] <= caps[dim] {
                    break;
                }
                p[dim] = 0;
                if dim == 0 {
                    break;
                }
                dim -= 1;
            }
            if p.iter().all(|&x| x == 0) {
                break;
            }
        }
    }
    let points = uniform_points(303, 100, 3);
    let mut worst = 0.0f64;
    for p in &monomials {
        let f = |z: &[f64]| -> f64 {
            z.iter()
                .zip(p)
                .map(|(&zi, &pi)| zi.powi(pi as i32))
                .product()
        };
        let mut components = BTreeMap::new();
        for beta in set.iter() {
            let mut comp = TensorComponent::new(&[], beta.clone(), 1);
            comp.populate(|z| Ok(vec![f(z)])).unwrap();
            components.insert(beta.clone(), comp);
        }
        for z in &points {
            let v = sparse_eval(&weights, &components, z).unwrap()[0];
            worst = worst.max((v - f(z)).abs());
        }
    }
    criterion(
        3,
        "sparse interpolant reproduces constituent monomials",
        worst <= 1e-10,
        &format!("{} monomials, worst deviation {worst:.3e}", monomials.len()),
    );
}

#[test]
fn criterion_04_pce_fidelity() {
    let mut comp = TensorComponent::new(&[], MultiIndex::new(vec![4, 4]), 1);
    comp.populate(|z| Ok(vec![Cosine2d::value(z)])).unwrap();

    let mut expansion = PceExpansion::new(2, 1);
    expansion.accumulate(1.0, &component_to_pce(&comp).unwrap());

    let points = uniform_points(404, 1000, 2);
    let mut worst_eval = 0.0f64;
    for z in &points {
        let s = comp.eval(z).unwrap()[0];
        let p = expansion.eval(z)[0];
        worst_eval = worst_eval.max((s - p).abs());
    }

    let mean_gap = (comp.mean().unwrap()[0] - expansion.mean()[0]).abs();

    // quadrature-ANOVA oracle on the surrogate itself
    let (gx, gw) = gauss_legendre(48);
    let surrogate = |z: &[f64]| comp.eval(z).unwrap()[0];
    let quad1 =
        |f: &dyn Fn(f64) -> f64| -> f64 { gx.iter().zip(&gw).map(|(&x, &w)| 0.5 * w * f(x)).sum() };
    let mean = quad1(&|x1| quad1(&|x2| surrogate(&[x1, x2])));
    let f1 = |x1: f64| quad1(&|x2| surrogate(&[x1, x2])) - mean;
    let f2 = |x2: f64| quad1(&|x1| surrogate(&[x1, x2])) - mean;
    let v1 = quad1(&|x1| f1(x1) * f1(x1));
    let v2 = quad1(&|x2| f2(x2) * f2(x2));
    let total = quad1(&|x1| {
        quad1(&|x2| {
            let d = surrogate(&[x1, x2]) - mean;
            d * d
        })
    });
    let v12 = total - v1 - v2;

    let sobol = expansion
        .sobol_indices(&[vec![0], vec![1], vec![0, 1]])
        .unwrap();
    let gap0 = (sobol[&vec![0usize]][0] - v1 / total).abs();
    let gap1 = (sobol[&vec![1usize]][0] - v2 / total).abs();
    let gap01 = (sobol[&vec![0usize, 1]][0] - v12 / total).abs();
    let sobol_sum: f64 = sobol.values().map(|v| v[0]).sum();

    let ok = worst_eval <= 1e-10
        && mean_gap <= 1e-12
        && gap0 <= 1e-6
        && gap1 <= 1e-6
        && gap01 <= 1e-6
        && (sobol_sum - 1.0).abs() <= 1e-10;
    criterion(
        4,
        "pce matches surrogate, mean, and ANOVA oracle",
        ok,
        &format!(
            "eval gap {worst_eval:.2e}, mean gap {mean_gap:.2e}, sobol gaps {gap0:.2e}/{gap1:.2e}/{gap01:.2e}, sum-1 {:.2e}",
            sobol_sum - 1.0
        ),
    );
}

#[test]
fn criterion_05_solver_convergence_orders() {
    let start = Instant::now();
    let model = advection_diffusion_ensemble(AdvectionDiffusionConfig::desk()).unwrap();
    let z = vec![0.0; 4];
    let mut detail = String::new();
    let mut ok = true;
    let expected = [2.0f64, 2.0, 1.0];
    for dim in 0..3 {
        // three successive refinements, the other parameters at their finest
        let qs: Vec<f64> = (1..=4u32)
            .map(|level| {
                let mut alpha = [4u32, 4, 4];
                alpha[dim] = level;
                model.evaluate(&alpha, &z).unwrap()[0]
            })
            .collect();
        let diffs: Vec<f64> = qs.windows(2).map(|w| (w[1] - w[0]).abs()).collect();
        let orders: Vec<f64> = diffs.windows(2).map(|w| (w[0] / w[1]).log2()).collect();
        detail.push_str(&format!("dim {dim} orders {orders:.3?}; "));
        for order in &orders {
            ok &= (order - expected[dim]).abs() <= 0.3;
        }
    }
    let elapsed = start.elapsed();
    ok &= elapsed.as_secs() < 300;
    detail.push_str(&format!("runtime {elapsed:?}"));
    criterion(5, "discretization convergence orders", ok, &detail);
}

#[test]
fn criterion_06_multifidelity_speedup() {
    let start = Instant::now();
    let (validation, truth) = desk_reference();
    let cfg = AdvectionDiffusionConfig::desk();

    // single-fidelity adaptive run on the finest model
    let single_base = advection_diffusion_ensemble(cfg.clone()).unwrap();
    let pinned = Pinned::at_top(single_base);
    let opts_single = AdaptiveOptions {
        kappa: 1.0,
        w_max: Some(600.0),
        max_level: 10,
        ..Default::default()
    };
    let mut checkpoints_single = Checkpoints::new(validation, truth);
    let mut driver = SparseGridDriver::new(&pinned, opts_single).unwrap();
    driver
        .run_with_observer(&mut |row, s| checkpoints_single.on_step(row, s))
        .unwrap();
    let single_cross = checkpoints_single.first_crossing(1e-3);

    // the multi-index run over the full discretization lattice
    let multi = advection_diffusion_ensemble(cfg).unwrap();
    let opts_multi = AdaptiveOptions {
        kappa: 1.0,
        w_max: Some(12.0),
        max_level: 10,
        ..Default::default()
    };
    let mut checkpoints_multi = Checkpoints::new(validation, truth);
    let mut driver = MiscDriver::new(&multi, opts_multi).unwrap();
    driver
        .run_with_observer(&mut |row, s| checkpoints_multi.on_step(row, s))
        .unwrap();
    let multi_cross = checkpoints_multi.first_crossing(1e-3);

    let ok = match (multi_cross, single_cross) {
        (Some(wm), Some(ws)) => wm <= ws / 10.0,
        _ => false,
    };
    criterion(
        6,
        "multi-index reaches 1e-3 at a tenth of single-fidelity work",
        ok,
        &format!(
            "multi-index crossing {multi_cross:?}, single crossing {single_cross:?}, runtime {:?}",
            start.elapsed()
        ),
    );
}

#[test]
fn criterion_07_cosine_ladder_behavior() {
    let ladder = cosine_ladder(&[0.2, 0.1, 0.05]).unwrap();
    let opts = AdaptiveOptions {
        kappa: 0.5,
        w_max: Some(25.0),
        max_level: 10,
        ..Default::default()
    };
    let result = amisc_run(&ladder, &opts).unwrap();
    let surrogate = &result.surrogate;

    let mut rng = ChaCha8Rng::seed_from_u64(707);
    let zs: Vec<f64> = (0..1000).map(|_| rng.random::<f64>() * 2.0 - 1.0).collect();
    let truth: Vec<f64> = zs.iter().map(|&z| CosineLadder::truth(z)).collect();

    let mut misc_err = 0.0f64;
    for (&z, &t) in zs.iter().zip(&truth) {
        misc_err = misc_err.max((surrogate.eval(&[z]).unwrap()[0] - t).abs());
    }
    let mut min_constituent = f64::INFINITY;
    for idx in surrogate.accepted().iter() {
        let comp = surrogate.component(idx).unwrap();
        let mut err = 0.0f64;
        for (&z, &t) in zs.iter().zip(&truth) {
            err = err.max((comp.eval(&[z]).unwrap()[0] - t).abs());
        }
        min_constituent = min_constituent.min(err);
    }

    let profile = surrogate.allocation_profile();
    let monotone = profile.windows(2).all(|w| w[0].points >= w[1].points);
    let counts: Vec<usize> = profile.iter().map(|e| e.points).collect();

    let ok = misc_err < min_constituent && monotone && profile.len() >= 2;
    criterion(
        7,
        "combined surrogate beats every constituent; allocation monotone",
        ok,
        &format!(
            "misc error {misc_err:.3e}, best constituent {min_constituent:.3e}, counts {counts:?}"
        ),
    );
}

#[test]
fn criterion_08_multilevel_vs_multiindex() {
    let start = Instant::now();
    let (validation, truth) = desk_reference();
    let mut cfg = AdvectionDiffusionConfig::desk();
    cfg.max_level = 3; // both strategies top out at (3,3,3); truth is (4,4,4)

    let opts = AdaptiveOptions {
        kappa: 1.0,
        w_max: Some(120.0),
        max_level: 10,
        ..Default::default()
    };

    let multi_base = advection_diffusion_ensemble(cfg.clone()).unwrap();
    let mut checkpoints_mi = Checkpoints::new(validation, truth);
    let mut driver = MiscDriver::new(&multi_base, opts.clone()).unwrap();
    driver
        .run_with_observer(&mut |row, s| checkpoints_mi.on_step(row, s))
        .unwrap();
    let final_mi = surrogate_error(driver.surrogate(), validation, truth);

    let ml_base = advection_diffusion_ensemble(cfg).unwrap();
    let hierarchy = amisc::adaptive::multilevel_model_set(4, 3);
    let multilevel = Multilevel::new(ml_base, hierarchy).unwrap();
    let mut checkpoints_ml = Checkpoints::new(validation, truth);
    let mut driver = MiscDriver::new(&multilevel, opts).unwrap();
    driver
        .run_with_observer(&mut |row, s| checkpoints_ml.on_step(row, s))
        .unwrap();
    let final_ml = surrogate_error(driver.surrogate(), validation, truth);

    let plateau = final_mi.max(final_ml);
    let within_factor_two = plateau / final_mi.min(final_ml) <= 2.0;
    let threshold = 10.0 * plateau;
    let cross_mi = checkpoints_mi.first_crossing(threshold);
    let cross_ml = checkpoints_ml.first_crossing(threshold);
    let no_more_work = match (cross_mi, cross_ml) {
        (Some(a), Some(b)) => a <= b,
        _ => false,
    };

    criterion(
        8,
        "multilevel and multi-index plateau together",
        within_factor_two && no_more_work,
        &format!(
            "plateaus {final_mi:.3e}/{final_ml:.3e}, 10x crossings {cross_mi:?}/{cross_ml:?}, runtime {:?}",
            start.elapsed()
        ),
    );
}

#[test]
fn criterion_09_single_model_reduction() {
    // one-dimensional case: the ladder pinned at a fixed discretization
    let ladder = cosine_ladder(&[0.2, 0.1, 0.05]).unwrap();
    let pinned = Pinned::new(ladder, vec![1]).unwrap();
    let opts = AdaptiveOptions {
        kappa: 0.5,
        w_max: Some(120.0),
        max_level: 8,
        ..Default::default()
    };
    let a = amisc_run(&pinned, &opts).unwrap();
    let b = sparse_grid_run(&pinned, &opts).unwrap();
    let csv_a = trace_csv(&a.trace, 1);
    let csv_b = trace_csv(&b.trace, 1);
    let same_accepted = a
        .surrogate
        .accepted()
        .iter()
        .eq(b.surrogate.accepted().iter());
    let rows_1d = csv_a.lines().count() - 1;
    let ok_1d = csv_a == csv_b && same_accepted && rows_1d >= 5;

    // two-dimensional case with plenty of indicator ties
    let cosine = amisc::models::cosine_2d();
    let opts = AdaptiveOptions {
        kappa: 0.5,
        w_max: Some(500.0),
        max_level: 6,
        ..Default::default()
    };
    let a = amisc_run(&cosine, &opts).unwrap();
    let b = sparse_grid_run(&cosine, &opts).unwrap();
    let csv_a2 = trace_csv(&a.trace, 1);
    let csv_b2 = trace_csv(&b.trace, 1);
    let rows_2d = csv_a2.lines().count() - 1;
    let ok_2d = csv_a2 == csv_b2 && rows_2d >= 20;

    criterion(
        9,
        "pinned multi-index run equals dedicated sparse-grid run bitwise",
        ok_1d && ok_2d,
        &format!("{rows_1d} + {rows_2d} trace rows, identical bytes in both runs"),
    );
}

#[test]
fn criterion_10_study_determinism() {
    use std::fs;
    use std::process::Command;

    let bin = env!("CARGO_BIN_EXE_amisc");
    let base = std::env::temp_dir().join(format!("amisc-determinism-{}", std::process::id()));
    let _ = fs::remove_dir_all(&base);
    fs::create_dir_all(&base).unwrap();

    let ladder_cfg = base.join("ladder.json");
    fs::write(
        &ladder_cfg,
        r#"{
            "model": {"kind": "cosine_ladder"},
            "strategy": "multiindex",
            "kappa": 0.5,
            "w_max": 40.0,
            "max_level": 8,
            "validation_samples": 300,
            "seed": 5,
            "out_dir": "unused"
        }"#,
    )
    .unwrap();
    let cos_cfg = base.join("cos2d.json");
    fs::write(
        &cos_cfg,
        r#"{
            "model": {"kind": "cosine_2d"},
            "strategy": "single",
            "kappa": 0.5,
            "w_max": 700.0,
            "max_level": 6,
            "validation_samples": 300,
            "density_samples": 20000,
            "seed": 11,
            "out_dir": "unused"
        }"#,
    )
    .unwrap();

    let run = |args: &[&str]| {
        let output = Command::new(bin).args(args).output().unwrap();
        assert!(
            output.status.success(),
            "command {:?} failed: {}",
            args,
            String::from_utf8_lossy(&output.stderr)
        );
    };

    let ladder_cfg = ladder_cfg.to_str().unwrap().to_owned();
    let cos_cfg = cos_cfg.to_str().unwrap().to_owned();
    let dir_a = base.join("a");
    let dir_b = base.join("b");
    for (dir, tag) in [(&dir_a, "a"), (&dir_b, "b")] {
        let out = dir.to_str().unwrap();
        run(&["run", "--config", &ladder_cfg, "--out", out]);
        run(&[
            "compare",
            "--config",
            &ladder_cfg,
            "--strategies",
            "multiindex,single",
            "--out",
            out,
        ]);
        run(&["sobol", "--config", &cos_cfg, "--out", out]);
        run(&["density", "--config", &cos_cfg, "--out", out]);
        let _ = tag;
    }

    let artifacts = [
        "trace.csv",
        "convergence.csv",
        "allocation.csv",
        "accepted.txt",
        "compare.csv",
        "sobol.csv",
        "density.csv",
    ];
    let mut ok = true;
    let mut detail = String::new();
    for name in artifacts {
        let a = fs::read(dir_a.join(name)).unwrap();
        let b = fs::read(dir_b.join(name)).unwrap();
        let same = a == b;
        ok &= same;
        detail.push_str(&format!(
            "{name}: {}; ",
            if same { "identical" } else { "DIFFERS" }
        ));
    }
    let _ = fs::remove_dir_all(&base);
    criterion(
        10,
        "byte-identical artifacts for identical configs",
        ok,
        &detail,
    );
}
