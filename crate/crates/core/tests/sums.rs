use iontrap::continuum::ContinuumModel;
use iontrap::ion_array::solve_scaled;
use iontrap::sums::{self, TnForm};
use iontrap::{IonArray, SolverOptions};
use proptest::prelude::*;

fn chain(n: usize) -> IonArray<f64> {
    let s = solve_scaled::<f64>(n, &SolverOptions::default()).unwrap();
    IonArray::from_positions(s.positions, 1.0).unwrap()
}

#[test]
fn s_n_falls_from_centre_to_edge() {
    let a = chain(101);
    for n in [3, 4, 8] {
        let s: Vec<f64> = (50..101).map(|i| sums::s_n_exact(&a, i, n).unwrap()).collect();
        assert!(s.windows(2).all(|w| w[1] < w[0]), "n={n}");
    }
}

#[test]
fn central_ion_estimate_improves_with_order() {
    let a = chain(500);
    let local = sums::local_spacings(&a).unwrap();
    let err = |n: u32| {
        let exact = sums::s_n_exact(&a, 250, n).unwrap();
        let approx = sums::s_n_continuum(local[250], n).unwrap();
        (exact - approx).abs() / exact
    };
    assert!(err(8) <= err(3));
}

#[test]
fn t_n_continuum_within_ten_percent() {
    let mut misses = Vec::new();
    for n_ions in [200usize, 500, 1000] {
        let a = chain(n_ions);
        for n in 3..=16u32 {
            let exact = sums::t_n_exact(&a, n).unwrap();
            let cont = sums::t_n_continuum::<f64>(n_ions, n, ContinuumModel::DubinFluid, TnForm::Integral).unwrap();
            let rel = (exact - cont).abs() / exact;
            if rel > 0.10 {
                misses.push(format!("N={n_ions} n={n} rel={rel:.3}"));
            }
        }
    }
    assert!(misses.is_empty(), "{}", misses.join(", "));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn sums_are_translation_invariant(
        gaps in proptest::collection::vec(0.2f64..3.0, 2..30),
        shift in -50.0f64..50.0,
        n in 3u32..12,
    ) {
        let mut z = vec![0.0];
        for g in &gaps {
            let last = *z.last().unwrap();
            z.push(last + g);
        }
        let a = IonArray::from_positions(z.clone(), 1.0).unwrap();
        let b = IonArray::from_positions(z.iter().map(|x| x + shift).collect(), 1.0).unwrap();
        for i in 0..z.len() {
            let (x, y) = (sums::s_n_exact(&a, i, n).unwrap(), sums::s_n_exact(&b, i, n).unwrap());
            prop_assert!((x - y).abs() <= 1e-9 * x);
        }
        let (x, y) = (sums::t_n_exact(&a, n).unwrap(), sums::t_n_exact(&b, n).unwrap());
        prop_assert!((x - y).abs() <= 1e-9 * x);
    }

    #[test]
    fn mirrored_chains_swap_sums(gaps in proptest::collection::vec(0.2f64..3.0, 2..20), n in 3u32..10) {
        let mut z = vec![0.0];
        for g in &gaps {
            let last = *z.last().unwrap();
            z.push(last + g);
        }
        let m: Vec<f64> = z.iter().rev().map(|x| -x).collect();
        let a = IonArray::from_positions(z.clone(), 1.0).unwrap();
        let b = IonArray::from_positions(m, 1.0).unwrap();
        let k = z.len();
        for i in 0..k {
            let (x, y) = (sums::s_n_exact(&a, i, n).unwrap(), sums::s_n_exact(&b, k - 1 - i, n).unwrap());
            prop_assert!((x - y).abs() <= 1e-12 * x);
        }
    }
}
