//! Acceptance suite: every criterion prints one pass/fail line and the whole
//! file must stay green. Numbered groups: (1) exact fixtures, (2) seeded
//! projection runs, (3) deterministic property suites.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use gmelab::estimator;
use gmelab::gilbert::{self, GilbertConfig};
use gmelab::negativity;
use gmelab::operator::{hermitian_eig, hs_inner, ComplexMatrix};
use gmelab::partition::{Bipartition, Grouping, PartySpec, SeparabilityClass};
use gmelab::states::{self, StateName};
use gmelab::witness;

struct Gate {
    failures: Vec<String>,
}

impl Gate {
    fn new() -> Self {
        Self {
            failures: Vec::new(),
        }
    }

    fn check(&mut self, name: &str, ok: bool, detail: String) {
        if ok {
            println!("PASS {name} ({detail})");
        } else {
            println!("FAIL {name} ({detail})");
            self.failures.push(format!("{name}: {detail}"));
        }
    }

    fn finish(self) {
        assert!(self.failures.is_empty(), "failed: {:#?}", self.failures);
    }
}

fn max_elementwise_dev(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    let mut dev: f64 = 0.0;
    for i in 0..a.dim() {
        for j in 0..a.dim() {
            dev = dev.max((a.get(i, j) - b.get(i, j)).norm());
        }
    }
    dev
}

#[test]
fn criterion_1_exact_fixtures() {
    let mut gate = Gate::new();

    // 1a: merge pipeline output at θ = 0 against its reference matrix.
    let (rho3, _) = states::rho3_with_prob(0.0).unwrap();
    let mut expected = ComplexMatrix::zeros(8);
    expected.set(0, 0, num_complex::Complex64::new(8.0 / 9.0, 0.0));
    expected.set(0, 7, num_complex::Complex64::new(2.0 / 9.0, 0.0));
    expected.set(7, 0, num_complex::Complex64::new(2.0 / 9.0, 0.0));
    expected.set(7, 7, num_complex::Complex64::new(1.0 / 9.0, 0.0));
    let dev = max_elementwise_dev(rho3.matrix(), &expected);
    gate.check("1a rho3(0) pipeline matrix", dev < 1e-12, format!("max dev {dev:.2e}"));

    // 1b: Bell-pair merge pipeline against its reference 16x16 matrix.
    let (rho4, _) = states::rho4_with_prob().unwrap();
    let pp = [0usize, 3, 12, 15];
    let qq = [0usize, 6, 9, 15];
    let pq = [0usize, 15];
    let mut expected4 = ComplexMatrix::zeros(16);
    for set in [&pp[..], &qq[..]] {
        for &i in set {
            for &j in set {
                let v = expected4.get(i, j);
                expected4.set(i, j, v + num_complex::Complex64::new(1.0 / 12.0, 0.0));
            }
        }
    }
    for &i in &pq {
        for &j in &pq {
            let v = expected4.get(i, j);
            expected4.set(i, j, v + num_complex::Complex64::new(2.0 / 12.0, 0.0));
        }
    }
    let dev4 = max_elementwise_dev(rho4.matrix(), &expected4);
    gate.check("1b rho4 pipeline matrix", dev4 < 1e-12, format!("max dev {dev4:.2e}"));

    // 1c: φ₄ negativities per party and the tripartite mean.
    let phi4 = states::build_state(StateName::Phi4).unwrap();
    let rho_phi = phi4.density().unwrap();
    let spec = &phi4.spec;
    let nv = |cut: &str| {
        negativity::negativity(&rho_phi, &Bipartition::parse(cut, spec).unwrap(), spec).unwrap()
    };
    let (na, nb, nc) = (nv("A|BC"), nv("B|AC"), nv("C|AB"));
    gate.check(
        "1c phi4 negativities",
        (na - 1.0).abs() < 1e-12 && (nb - 3.0).abs() < 1e-12 && (nc - 1.0).abs() < 1e-12,
        format!("A|BC {na:.12} B|AC {nb:.12} C|AB {nc:.12}"),
    );
    let tri = negativity::tripartite_negativity(&rho_phi, spec)
        .unwrap()
        .combined
        .unwrap();
    gate.check(
        "1c phi4 tripartite negativity",
        (tri - 3f64.cbrt()).abs() < 1e-10,
        format!("{tri:.12} vs {:.12}", 3f64.cbrt()),
    );

    // 1d: protocol probabilities and output fidelities.
    let w2g = states::protocol_w_to_ghz().unwrap();
    let g2w = states::protocol_ghz_to_w().unwrap();
    gate.check(
        "1d W->GHZ probability 2/9",
        (w2g.success_prob - 2.0 / 9.0).abs() < 1e-12,
        format!("{:.15}", w2g.success_prob),
    );
    gate.check(
        "1d GHZ->W probability 3/8",
        (g2w.success_prob - 3.0 / 8.0).abs() < 1e-12,
        format!("{:.15}", g2w.success_prob),
    );
    let min_fid = w2g
        .branches
        .iter()
        .chain(&g2w.branches)
        .map(|b| b.fidelity)
        .fold(f64::INFINITY, f64::min);
    gate.check(
        "1d protocol output fidelities",
        (min_fid - 1.0).abs() < 1e-12,
        format!("min fidelity {min_fid:.15}"),
    );

    // 1e: GHZ witness mean on rho4 and the closed-form scaling.
    let mean = witness::ghz_witness_mean(&rho4).unwrap();
    gate.check(
        "1e ghz witness mean of rho4",
        (mean - 1.0 / 6.0).abs() < 1e-12
            && (mean - witness::ghz_scaling_mean(4)).abs() < 1e-12,
        format!("{mean:.15}"),
    );
    gate.check(
        "1e scaling mean at N=6",
        (witness::ghz_scaling_mean(6) + 0.1).abs() < 1e-12 && witness::ghz_scaling_mean(6) < 0.0,
        format!("{:.15}", witness::ghz_scaling_mean(6)),
    );

    gate.finish();
}

#[test]
fn criterion_2a_rho3_biseparable_run() {
    let mut gate = Gate::new();
    let state = states::build_state(StateName::Rho3(0.0)).unwrap();
    let rho = state.density().unwrap();
    let config = GilbertConfig {
        max_corrections: 3500,
        max_trials: 2_000_000,
        rng_seed: 11,
        ..Default::default()
    };
    let run = gilbert::run(&rho, &SeparabilityClass::Biseparable, &state.spec, &config).unwrap();
    gate.check(
        "2a rho3(0) d_last in [0.2376, 0.27]",
        (0.2376..=0.27).contains(&run.d_last),
        format!("d_last {:.5}", run.d_last),
    );
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let report = witness::build_witness(&run, 200, &mut rng).unwrap();
    gate.check(
        "2a rho3(0) d_wit in [0.20, 0.2376]",
        (0.20..=0.2376).contains(&report.d_wit),
        format!("d_wit {:.5}", report.d_wit),
    );

    // Leading witness eigenvector stays close to the three-qubit GHZ state.
    let (_, vecs) = hermitian_eig(&report.witness).unwrap();
    let leading = vecs.last().unwrap();
    let ghz = states::ghz_ket(3).unwrap();
    let fid = leading.inner(&ghz).unwrap().norm_sqr();
    gate.check(
        "2a witness leading eigenvector near GHZ3",
        fid >= 0.99,
        format!("fidelity {fid:.5}"),
    );
    gate.finish();
}

#[test]
fn criterion_2b_rho4_separable_run() {
    let mut gate = Gate::new();
    let (rho4, _) = states::rho4_with_prob().unwrap();
    let spec = PartySpec::single_qubits(4).unwrap();
    let config = GilbertConfig {
        max_corrections: 7250,
        max_trials: 4_000_000,
        rng_seed: 7,
        ..Default::default()
    };
    let run = gilbert::run(&rho4, &SeparabilityClass::FullySeparable, &spec, &config).unwrap();
    let reference = 0.53969;
    gate.check(
        "2b rho4 d_last within [0.98, 1.08] of reference",
        (reference * 0.98..=reference * 1.08).contains(&run.d_last),
        format!("d_last {:.5}", run.d_last),
    );
    let diff = rho4.matrix().sub(run.css.matrix()).unwrap();
    let overlap = hs_inner(rho4.matrix(), &diff).unwrap();
    gate.check(
        "2b Tr rho4(rho4 - css) in [0.34, 0.38]",
        (0.34..=0.38).contains(&overlap),
        format!("{overlap:.5}"),
    );
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let report = witness::build_witness(&run, 200, &mut rng).unwrap();
    gate.check(
        "2b rho4 d_wit positive",
        report.d_wit > 0.0,
        format!("d_wit {:.5}", report.d_wit),
    );
    gate.finish();
}

#[test]
fn criterion_2c_lambda_table_against_reference() {
    let mut gate = Gate::new();
    let (rho4, _) = states::rho4_with_prob().unwrap();
    let spec = PartySpec::single_qubits(4).unwrap();
    let m = rho4.matrix().sub(&states::rho4_css_approx()).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(40);
    let (_, table) = witness::lambda_max(
        &m,
        &SeparabilityClass::Biseparable,
        &spec,
        200,
        &mut rng,
        80,
        1e-11,
    )
    .unwrap();
    let reference = [
        ("A|BCD", 0.19201),
        ("B|ACD", 0.19172),
        ("C|ABD", 0.19160),
        ("D|ABC", 0.19172),
        ("AB|CD", 0.35169),
        ("AC|BD", 0.17030),
        ("AD|BC", 0.35182),
    ];
    let mut worst = 0.0f64;
    let mut by_cut = std::collections::BTreeMap::new();
    for (cut, value) in &table {
        by_cut.insert(cut.to_string(), *value);
    }
    let mut all_found = true;
    for (cut, expected) in reference {
        match by_cut.get(cut) {
            Some(&got) => worst = worst.max((got - expected).abs()),
            None => all_found = false,
        }
    }
    gate.check(
        "2c lambda table matches reference within 0.02",
        all_found && worst <= 0.02,
        format!("worst deviation {worst:.4}"),
    );
    let mut sorted: Vec<(String, f64)> = by_cut.clone().into_iter().collect();
    sorted.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap());
    let top_two: Vec<&str> = sorted[..2].iter().map(|(c, _)| c.as_str()).collect();
    let smallest = sorted.last().unwrap().0.as_str();
    gate.check(
        "2c AB|CD and AD|BC largest, AC|BD smallest",
        top_two.contains(&"AB|CD") && top_two.contains(&"AD|BC") && smallest == "AC|BD",
        format!("top {top_two:?}, smallest {smallest}"),
    );
    gate.finish();
}

#[test]
fn criterion_2d_separable_control() {
    let mut gate = Gate::new();
    let rho = states::separable_control();
    let spec = PartySpec::single_qubits(2).unwrap();
    let config = GilbertConfig {
        max_corrections: 5000,
        max_trials: 2_000_000,
        rng_seed: 3,
        target_distance: Some(0.008),
        ..Default::default()
    };
    let run = gilbert::run(&rho, &SeparabilityClass::FullySeparable, &spec, &config).unwrap();
    gate.check(
        "2d control d_last below 0.01 within 5000 corrections",
        run.d_last < 0.01 && run.corrections_done <= 5000,
        format!("d_last {:.5} after {} corrections", run.d_last, run.corrections_done),
    );
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let report = witness::build_witness(&run, 200, &mut rng).unwrap();
    gate.check(
        "2d control d_wit is zero",
        report.d_wit == 0.0,
        format!("d_wit {:.2e}", report.d_wit),
    );
    gate.finish();
}

#[test]
fn criterion_2e_theta_sweep_certifies_everywhere() {
    let mut gate = Gate::new();
    let mut min_d_wit = f64::INFINITY;
    let mut all_positive = true;
    for i in 0..16 {
        let theta = std::f64::consts::FRAC_PI_2 * i as f64 / 15.0;
        let state = states::build_state(StateName::Rho3(theta)).unwrap();
        let rho = state.density().unwrap();
        let config = GilbertConfig {
            max_corrections: 2600,
            max_trials: 400_000,
            rng_seed: 2026 ^ (i as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15),
            ..Default::default()
        };
        let run =
            gilbert::run(&rho, &SeparabilityClass::Biseparable, &state.spec, &config).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(config.rng_seed + 1);
        let report = witness::build_witness(&run, 120, &mut rng).unwrap();
        min_d_wit = min_d_wit.min(report.d_wit);
        all_positive &= report.d_wit > 0.0;
    }
    gate.check(
        "2e d_wit positive at all 16 sweep points",
        all_positive,
        format!("min d_wit {min_d_wit:.5}"),
    );
    gate.finish();
}

#[test]
fn criterion_3a_property_suite() {
    let mut gate = Gate::new();

    // History monotonicity on a fresh biseparable run.
    let state = states::build_state(StateName::Rho3(0.5)).unwrap();
    let rho = state.density().unwrap();
    let config = GilbertConfig {
        max_corrections: 400,
        max_trials: 300_000,
        rng_seed: 31,
        record_interval: 1,
        ..Default::default()
    };
    let run = gilbert::run(&rho, &SeparabilityClass::Biseparable, &state.spec, &config).unwrap();
    let monotone = run.history.windows(2).all(|w| w[1].1 <= w[0].1);
    gate.check(
        "3a gilbert history non-increasing",
        monotone,
        format!("{} entries", run.history.len()),
    );

    // See-saw monotonicity across sweeps on a random Hermitian operator.
    let spec3 = PartySpec::single_qubits(3).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut seesaw_monotone = true;
    for _ in 0..5 {
        let trial = gilbert::random_trial(&SeparabilityClass::FullySeparable, &spec3, &mut rng)
            .unwrap();
        let m = rho.matrix().clone();
        let mut last = f64::NEG_INFINITY;
        for sweeps in [1u32, 2, 4, 8, 16] {
            let (_, v) = gilbert::seesaw_maximize(
                &m,
                gilbert::SeesawScope::Full,
                &spec3,
                &trial.ket,
                sweeps,
                1e-14,
            )
            .unwrap();
            seesaw_monotone &= v >= last - 1e-11;
            last = v;
        }
    }
    gate.check("3a seesaw value monotone in sweeps", seesaw_monotone, String::new());

    // d_wit ≤ d_last on every report produced here.
    let mut rng2 = ChaCha8Rng::seed_from_u64(6);
    let report = witness::build_witness(&run, 150, &mut rng2).unwrap();
    gate.check(
        "3a d_wit bounded by d_last",
        report.d_wit <= report.d_last,
        format!("{:.5} <= {:.5}", report.d_wit, report.d_last),
    );

    // Witness non-positivity over 10^4 sampled biproduct states; a violation
    // is a raised flag, not a silent pass.
    let mut rng3 = ChaCha8Rng::seed_from_u64(7);
    let violation = witness::sample_biproduct_violation(
        &report.witness,
        &SeparabilityClass::Biseparable,
        &state.spec,
        10_000,
        &mut rng3,
        1e-9,
    )
    .unwrap();
    gate.check(
        "3a witness non-positive on 10^4 biproduct samples",
        violation.is_none(),
        format!("{violation:?}"),
    );
    gate.finish();
}

#[test]
fn criterion_3b_estimator_recovers_synthetic_offset() {
    let mut gate = Gate::new();
    let history: Vec<(u64, f64)> = (1..=100)
        .map(|k| (50 * k, 0.04 + 1.0 / (50.0 * k as f64)))
        .collect();
    let est = estimator::estimate(&history).unwrap();
    gate.check(
        "3b synthetic decay offset recovered within 1%",
        (est.d_est - 0.2).abs() / 0.2 < 0.01,
        format!("d_est {:.6}, r {:.6}", est.d_est, est.r_star),
    );
    gate.finish();
}

#[test]
fn criterion_3c_phi4_grouping_contrast() {
    let mut gate = Gate::new();
    let state = states::build_state(StateName::Phi4).unwrap();
    let rho = state.density().unwrap();

    // Per-particle reading: the cut AB1|B2C admits the state exactly.
    let pp = state.spec.with_grouping(Grouping::PerParticle);
    let cut = Bipartition::parse("AB1|B2C", &pp).unwrap();
    let config = GilbertConfig {
        max_corrections: 200,
        max_trials: 100_000,
        rng_seed: 5,
        target_distance: Some(5e-5),
        ..Default::default()
    };
    let run = gilbert::run(&rho, &SeparabilityClass::SingleCut(cut), &pp, &config).unwrap();
    gate.check(
        "3c per-particle cut reaches d_last < 1e-4 within 200 corrections",
        run.d_last < 1e-4 && run.corrections_done <= 200,
        format!("d_last {:.2e} after {} corrections", run.d_last, run.corrections_done),
    );

    // Per-party reading: no biseparable decomposition exists.
    let config2 = GilbertConfig {
        max_corrections: 2000,
        max_trials: 1_000_000,
        rng_seed: 5,
        ..Default::default()
    };
    let run2 =
        gilbert::run(&rho, &SeparabilityClass::Biseparable, &state.spec, &config2).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let report = witness::build_witness(&run2, 150, &mut rng).unwrap();
    gate.check(
        "3c per-party biseparable run certifies d_wit > 0",
        report.d_wit > 0.0,
        format!("d_wit {:.5}", report.d_wit),
    );
    gate.finish();
}
