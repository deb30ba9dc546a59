use fockgibbs::cgibbs::{hartree_energy, FieldSample};
use fockgibbs::fock::{assemble_interaction, enumerate_sector};
use fockgibbs::model::KernelSpec;
use nalgebra::DVector;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn factorial(m: u32) -> f64 {
    (1..=m).map(f64::from).product()
}

#[test]
fn three_particle_product_state_reproduces_hartree_energy() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for (k_max, kernel, eps) in [
        (1, KernelSpec::default(), 0.5),
        (2, KernelSpec::box_kernel(0.3).unwrap(), 0.2),
        (2, KernelSpec::custom(vec![0.0, 0.2, 0.4], vec![1.0, 0.6, 0.0]).unwrap(), 0.7),
    ] {
        let basis = enumerate_sector(k_max, 3, 10_000).unwrap();
        let w = assemble_interaction(&basis, &kernel, eps).matrix;
        for _ in 0..5 {
            let u: Vec<Complex64> = (0..2 * k_max + 1)
                .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                .collect();
            // Occupation amplitudes of u⊗u⊗u.
            let psi: Vec<Complex64> = basis
                .states()
                .iter()
                .map(|s| {
                    let norm = (6.0 / s.counts().iter().map(|&m| factorial(m)).product::<f64>()).sqrt();
                    s.counts().iter().zip(&u).map(|(&m, c)| c.powu(m)).product::<Complex64>() * norm
                })
                .collect();
            let re = DVector::from_iterator(psi.len(), psi.iter().map(|c| c.re));
            let im = DVector::from_iterator(psi.len(), psi.iter().map(|c| c.im));
            let quadratic = (re.dot(&(&w * &re)) + im.dot(&(&w * &im))) / 6.0;
            let classical = hartree_energy(&FieldSample::new(u), &kernel, eps);
            assert!((quadratic - classical).abs() < 1e-12 * classical.abs().max(1.0), "{quadratic} vs {classical}");
        }
    }
}
