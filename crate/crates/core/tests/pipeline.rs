use approx::assert_abs_diff_eq;
use nalgebra::DMatrix;
use onebit_mimo::configs::{build_config, induced_arrangement, Architecture, ChannelInstance};
use onebit_mimo::counting::{r_central, r_general};
use onebit_mimo::geometry::{enumerate_cells, enumerate_cells_with, is_general_position, HyperplaneArrangement, DEFAULT_GP_TOL};
use onebit_mimo::packing::{pack_margin, validate_packing};
use onebit_mimo::simulate::{
    constellation_from_config, mutual_information, optimize_input, rate_curve_with, sample_channel, transition_mc,
    RateCurveParams, Series,
};
use onebit_mimo::Exec;
use proptest::prelude::*;

fn rows_2d(raw: &[(f64, f64, f64)]) -> Vec<(Vec<f64>, f64)> {
    raw.iter().map(|&(a, b, c)| (vec![a.cos() * b, a.sin() * b], c)).collect()
}

#[test]
fn configuration_to_rate() {
    let ch = sample_channel(2, 3, 21).unwrap();
    let power = 1e4;
    for (arch, points) in Architecture::ALL.into_iter().zip([5, 8, 9, 11]) {
        let cfg = build_config(arch, &ch, 4, power).unwrap();
        let induced = induced_arrangement(&ch, &cfg).unwrap();
        assert_eq!(induced.dropped, 0);
        let cons = constellation_from_config(&ch, &cfg, power).unwrap();
        assert_eq!(cons.len(), points, "{arch}");
        assert!(cons.average_power() <= power);
        let tm = transition_mc(&ch, &cfg, &cons, 20_000, 3).unwrap();
        let uniform = mutual_information(&tm, &cons.prior).unwrap();
        let (best, prior) = optimize_input(&tm, 1e-6).unwrap();
        assert!(best + 1e-6 >= uniform);
        assert_abs_diff_eq!(prior.iter().sum::<f64>(), 1.0, epsilon = 1e-9);
        // well separated points at 40 dB: the channel is nearly noiseless
        assert_abs_diff_eq!(uniform, (points as f64).log2(), epsilon = 0.05);
    }
}

#[test]
fn sweep_is_independent_of_execution_policy() {
    let params = RateCurveParams {
        power_db: vec![-5.0, 10.0, 30.0],
        trials: 3,
        mc_samples: 3000,
        seed: 4,
        ..RateCurveParams::reference()
    };
    let a = rate_curve_with(&params, Exec::Sequential).unwrap();
    let b = rate_curve_with(&params, Exec::Parallel).unwrap();
    assert_eq!(a, b);
    assert_eq!(a.entries.len(), 3 * 5);
    for db in &params.power_db {
        let reference = a.entry(*db, Series::Unquantized).unwrap().mean_rate_bits;
        for arch in Architecture::ALL {
            assert!(a.entry(*db, Series::Quantized(arch)).unwrap().mean_rate_bits <= reference);
        }
    }
}

#[test]
fn identity_channel_recovers_target_layout() {
    let ch = ChannelInstance::normalized(DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 1.0])).unwrap();
    let cfg = build_config(Architecture::GeneralPosition, &ch, 4, 400.0).unwrap();
    let arr = induced_arrangement(&ch, &cfg).unwrap().arrangement;
    assert!(is_general_position(&arr, DEFAULT_GP_TOL).unwrap());
    assert_eq!(enumerate_cells(&arr, 100.0).unwrap().len(), 11);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn cells_match_the_count_and_witness_their_signs(
        raw in prop::collection::vec((0.0..std::f64::consts::PI, 0.5..2.0, -3.0..3.0), 1..6)
    ) {
        let arr = HyperplaneArrangement::from_rows(2, &rows_2d(&raw)).unwrap();
        prop_assume!(is_general_position(&arr, 1e-3).unwrap());
        let cells = enumerate_cells(&arr, 1e3).unwrap();
        prop_assert!(cells.len() as u64 <= r_general(2, raw.len() as u32).unwrap());
        for c in &cells {
            prop_assert_eq!(&arr.sign_vector_of(c.witness.as_slice()), &c.sign_vector);
        }
        for w in cells.windows(2) {
            prop_assert!(w[0].sign_vector < w[1].sign_vector);
        }
    }

    #[test]
    fn central_counts_are_exact(angles in prop::collection::vec(0.0..std::f64::consts::PI, 1..7)) {
        let rows: Vec<_> = angles.iter().map(|a| (vec![a.cos(), a.sin()], 0.0)).collect();
        let arr = HyperplaneArrangement::from_rows(2, &rows).unwrap();
        prop_assume!(is_general_position(&arr, 1e-3).unwrap());
        let n = enumerate_cells(&arr, 1.0).unwrap().len() as u64;
        prop_assert_eq!(n, r_central(angles.len() as u32, 2).unwrap());
    }

    #[test]
    fn cell_count_survives_permutation_and_policy(
        raw in prop::collection::vec((0.0..std::f64::consts::PI, 0.5..2.0, -3.0..3.0), 1..6),
        shift in 0usize..6,
    ) {
        let arr = HyperplaneArrangement::from_rows(2, &rows_2d(&raw)).unwrap();
        let n = arr.count();
        let perm: Vec<usize> = (0..n).map(|i| (i + shift) % n).collect();
        let seq = enumerate_cells_with(&arr, 1e3, Exec::Sequential).unwrap();
        let par = enumerate_cells_with(&arr, 1e3, Exec::Parallel).unwrap();
        prop_assert_eq!(seq.len(), par.len());
        let permuted = enumerate_cells(&arr.permuted(&perm).unwrap(), 1e3).unwrap();
        prop_assert_eq!(seq.len(), permuted.len());
    }

    #[test]
    fn packings_are_valid_and_grow_with_the_ball(
        raw in prop::collection::vec((0.0..std::f64::consts::PI, 0.5..2.0, -3.0..3.0), 1..5),
        r in 1.5..6.0f64,
    ) {
        let arr = HyperplaneArrangement::from_rows(2, &rows_2d(&raw)).unwrap();
        let small = pack_margin(&arr, r).unwrap();
        let large = pack_margin(&arr, r + 2.0).unwrap();
        prop_assert!(validate_packing(&small).is_ok());
        prop_assert!(validate_packing(&large).is_ok());
        prop_assert!(small.len() <= large.len());
        prop_assert!(large.len() <= enumerate_cells(&arr, r + 2.0).unwrap().len());
    }
}
