use qlslab::datagen::{generate, DatasetSpec};
use qlslab::problem::{Encoding, InstanceKind, SpinConvention};

// The manifest's ground energy and degeneracy, checked by direct enumeration
// of the least-squares residual rather than through the Ising encoding.
#[test]
fn manifest_agrees_with_residual_enumeration() {
    let spec = DatasetSpec {
        n_values: vec![3, 5, 7],
        problems_per_n: 6,
        master_seed: 99,
        ..DatasetSpec::default()
    };
    for g in generate(&spec).unwrap() {
        let inst = &g.instance;
        let residuals: Vec<f64> = (0..1usize << g.n)
            .map(|z| inst.residual_sq(&SpinConvention::variables_of_index(z, g.n)))
            .collect();
        let best = residuals.iter().cloned().fold(f64::INFINITY, f64::min);
        let tol = 1e-9 * (1.0 + best.abs());
        let ties = residuals.iter().filter(|&&r| r <= best + tol).count();
        assert_eq!(ties, g.n_ground_states, "{}", g.id);
        let enc = Encoding::of(inst);
        assert!((enc.residual_sq_from_energy(g.ground_energy) - best).abs() < 1e-9, "{}", g.id);
        if inst.kind == InstanceKind::Consistent {
            assert!(best < 1e-9, "{}: consistent instance has residual {best}", g.id);
        }
    }
}
