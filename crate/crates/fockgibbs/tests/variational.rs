use std::sync::Arc;

use fockgibbs::fock::{BlockState, StateSector};
use fockgibbs::linalg::symmetric_eigen;
use fockgibbs::model::{CutoffProfile, ModelParams};
use fockgibbs::qgibbs::{build_gibbs, cutoff_relative_partition, variational_functional};
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn perturbed(state: &BlockState, rng: &mut ChaCha8Rng, size: f64) -> BlockState {
    let mut raw = Vec::new();
    for s in state.sectors().iter().filter(|s| s.mass() > 0.0) {
        let dim = s.dim();
        let r = DMatrix::from_fn(dim, dim, |_, _| rng.gen_range(-1.0..1.0));
        let noise = &r * r.transpose() / dim as f64;
        let scale = s.mass() * rng.gen_range(0.5..1.5);
        let (values, vectors) = symmetric_eigen(&(s.density() / s.mass() * scale + noise * (size * scale))).unwrap();
        raw.push((s.basis().clone(), vectors, values.iter().map(|x| x.max(0.0)).collect::<Vec<_>>()));
    }
    let total: f64 = raw.iter().map(|r| r.2.iter().sum::<f64>()).sum();
    let sectors = raw
        .into_iter()
        .map(|(b, v, w)| StateSector::new(Arc::clone(&b), Some(v), w.iter().map(|x| x / total).collect()).unwrap())
        .collect();
    BlockState::new(state.k_max(), sectors).unwrap()
}

#[test]
fn gibbs_state_minimizes_free_energy() {
    let params = ModelParams::new(10.0, 0.5, 0.1, 1.0, 1).unwrap();
    let cutoff = CutoffProfile::smooth(1.0, 0.1).unwrap();
    let gibbs = build_gibbs(&params, true, &cutoff).unwrap().state().unwrap();
    let reference = build_gibbs(&params, false, &cutoff).unwrap().state().unwrap();

    let at_min = variational_functional(&gibbs, &reference, &params).unwrap();
    let ratio = cutoff_relative_partition(&params, &cutoff).unwrap();
    assert!((at_min + ratio.ln()).abs() < 1e-8, "{at_min} vs {}", -ratio.ln());

    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for trial in 0..20 {
        let size = [1e-3, 1e-2, 1e-1, 1.0][trial % 4];
        let other = perturbed(&gibbs, &mut rng, size);
        let value = variational_functional(&other, &reference, &params).unwrap();
        assert!(value > at_min, "trial {trial}: {value} <= {at_min}");
    }
}
