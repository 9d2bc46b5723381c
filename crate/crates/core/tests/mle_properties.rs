use popdist::bernstein::BernsteinMatrix;
use popdist::estimators::{em_solve, MleConfig};
use popdist::simulate::{sample_counts, sample_population, Truth};
use popdist::{expected_fingerprint, fingerprint_of, kl_divergence, AtomicDistribution};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_instance(rng: &mut ChaCha8Rng) -> (AtomicDistribution, popdist::ObservationSet) {
    let atoms = rng.gen_range(1..=4);
    let truth = AtomicDistribution::normalized(
        (0..atoms).map(|_| (rng.gen::<f64>(), rng.gen_range(0.1..1.0))),
    )
    .unwrap();
    let n = rng.gen_range(20..=1000);
    let t = rng.gen_range(1..=10);
    let seed = rng.gen();
    let p = sample_population(&Truth::Custom(truth.clone()), n, seed).unwrap();
    (truth, sample_counts(&p, t, seed).unwrap())
}

#[test]
fn em_properties_on_random_instances() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let m = 100;
    for case in 0..40 {
        let (truth, obs) = random_instance(&mut rng);
        let h = fingerprint_of(&obs);
        let basis = BernsteinMatrix::new(obs.t(), m).unwrap();
        let cfg = MleConfig {
            grid_size: m,
            record_trace: true,
            ..MleConfig::default()
        };
        let init_a: Vec<f64> = (0..=m).map(|_| rng.gen_range(0.01..1.0)).collect();
        let init_b: Vec<f64> = (0..=m).map(|_| rng.gen_range(0.01..1.0)).collect();
        let a = em_solve(h.fractions(), &basis, &init_a, &cfg).unwrap();
        let b = em_solve(h.fractions(), &basis, &init_b, &cfg).unwrap();
        for w in a.objectives.windows(2) {
            assert!(w[1] <= w[0] + 1e-12, "case {case}: {} -> {}", w[0], w[1]);
        }
        let snapped = AtomicDistribution::normalized(
            truth.atoms().map(|(x, w)| ((x * m as f64).round() / m as f64, w)),
        )
        .unwrap();
        let kl_truth = kl_divergence(&h, &expected_fingerprint(&snapped, obs.t()).unwrap()).unwrap();
        assert!(a.objective <= kl_truth + 1e-8, "case {case}");
        let va = basis.apply(&a.weights);
        let vb = basis.apply(&b.weights);
        let l1: f64 = va.iter().zip(&vb).map(|(x, y)| (x - y).abs()).sum();
        assert!(l1 <= 1e-6, "case {case}: starts disagree by {l1:e}");
        assert!(a.max_gradient_ratio <= 1.0 + 1e-8, "case {case}: not stationary");
    }
}
