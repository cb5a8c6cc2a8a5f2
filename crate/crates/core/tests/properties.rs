use nalgebra::DMatrix;
use num_complex::Complex;
use proptest::prelude::*;
use qbeats::circuit::{damp_stats, noise_correction, rz_angle, Circuit, MeasurementStats};
use qbeats::dynamics::DensityMatrix;
use qbeats::hamiltonian::partition_parameters;
use qbeats::postprocess::boxcar_kernel;
use qbeats::relaxation::{apply_channel, infinite_temperature_thermal_channel, RelaxationParams};
use qbeats::spin::{spin_addition_counts, state_count};
use qbeats::system::RelaxationTimes;
use qbeats::HalfInt;

fn relaxation() -> impl Strategy<Value = (f64, f64)> {
    (0.5f64..500.0, 0.05f64..2.0).prop_map(|(t1, frac)| (t1, t1 * frac))
}

fn stats() -> impl Strategy<Value = MeasurementStats<f64>> {
    prop::array::uniform4(0.01f64..1.0).prop_map(|w| {
        let total: f64 = w.iter().sum();
        MeasurementStats::from_array(w.map(|x| x / total)).unwrap()
    })
}

proptest! {
    #[test]
    fn multiplet_counts_fill_the_register(n in 1usize..=16) {
        let row = spin_addition_counts(n).unwrap();
        prop_assert_eq!(state_count(&row), 1u64 << n);
        let smallest = if n % 2 == 0 { HalfInt::ZERO } else { HalfInt::HALF };
        prop_assert_eq!(*row.keys().next().unwrap(), smallest);
        prop_assert_eq!(row[&HalfInt::from_twice(n as i32)], 1);
    }

    #[test]
    fn partition_amplitudes_are_normalized(n in 2usize..=12, k in 0i32..=6) {
        let twice = n as i32 - 2 * k;
        prop_assume!(twice > 0);
        let p = partition_parameters::<f64>(HalfInt::from_twice(twice), n).unwrap();
        prop_assert!((p.x * p.x + p.y * p.y - 1.0).abs() < 1e-14);
    }

    #[test]
    fn thermal_channel_is_trace_preserving((t1, t2) in relaxation(), t in 0.0f64..1000.0, mix in 0.0f64..1.0) {
        let params = RelaxationParams::new(t, RelaxationTimes::from_ns(t1, t2).unwrap()).unwrap();
        let channel = infinite_temperature_thermal_channel(&params, 0).unwrap();
        prop_assert!(channel.completeness_error() < 1e-12);
        let c = Complex::new(0.3, -0.2) * (mix * (1.0 - mix)).sqrt();
        let m = DMatrix::from_row_slice(2, 2, &[Complex::new(mix, 0.0), c, c.conj(), Complex::new(1.0 - mix, 0.0)]);
        let rho = DensityMatrix::new(m).unwrap();
        let out = apply_channel(&rho, &channel).unwrap();
        prop_assert!((out.matrix().trace().re - 1.0).abs() < 1e-12);
    }

    #[test]
    fn kernel_is_normalized_and_symmetric(width in 0.05f64..5.0, step in 0.01f64..1.0) {
        let k = boxcar_kernel::<f64>(width, step).unwrap();
        prop_assert!((k.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        for (a, b) in k.iter().zip(k.iter().rev()) {
            prop_assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn correction_inverts_damping(undamped in stats(), reference in stats()) {
        let dens = [
            1.0 - 4.0 * reference.t_plus,
            1.0 - 4.0 * reference.t_minus,
            reference.singlet.powi(2) - reference.t0.powi(2),
        ];
        prop_assume!(dens.iter().all(|d| d.abs() > 0.05));
        let measured = damp_stats(&undamped, &reference);
        let back = noise_correction(&measured, &reference).unwrap();
        prop_assert!(back.max_abs_diff(&undamped) < 1e-9);
    }

    #[test]
    fn rz_encoding_reproduces_singlet(s in 0.0f64..=1.0) {
        let half = rz_angle(s).unwrap() / 2.0;
        prop_assert!((half.cos().powi(2) - s).abs() < 1e-12);
    }

    #[test]
    fn circuit_dump_round_trips(ops in prop::collection::vec((0u8..6, 0usize..3, -10.0f64..10.0), 0..30)) {
        let mut c = Circuit::<f64>::new(3).unwrap();
        for (op, site, angle) in ops {
            let other = (site + 1) % 3;
            match op {
                0 => c.h(site),
                1 => c.rz(angle, site),
                2 => c.u3(angle, -angle / 3.0, angle * 0.7, site),
                3 => c.cnot(site, other),
                4 => c.delay(angle.abs(), site),
                _ => c.crx(angle, other, site),
            }
            .unwrap();
        }
        c.measure(&[0, 2]).unwrap();
        prop_assert_eq!(Circuit::parse(&c.dump()).unwrap(), c);
    }
}
