use dogforge::parallel::par_sweep;
use dogforge_core::bench::{
    default_rates, standard_orange_slice, sweep, AxisKind, PulseShape, SweepTarget,
};
use dogforge_core::Error;

fn targets() -> Vec<SweepTarget> {
    [0.3, 1.2, -2.0]
        .iter()
        .map(|&p| {
            let f = standard_orange_slice(p, PulseShape::Sech, 1.0, 2001).unwrap();
            SweepTarget::new(format!("sech {p}"), f).unwrap()
        })
        .collect()
}

#[test]
fn parallel_sweep_matches_the_sequential_one_bit_for_bit() {
    let t = targets();
    let rates = default_rates(1e-3, 1e-1);
    for axis in [AxisKind::DetuningRate, AxisKind::AmplitudeRate] {
        let seq = sweep(&t, axis, &rates).unwrap();
        for threads in [Some(1), Some(3), None] {
            assert_eq!(par_sweep(&t, axis, &rates, threads).unwrap(), seq);
        }
    }
}

#[test]
fn parallel_sweep_rejects_empty_and_unsorted_input() {
    let rates = [1e-3, 1e-2];
    let e = par_sweep(&[], AxisKind::DetuningRate, &rates, Some(2)).unwrap_err();
    assert_eq!(e.kind.exit_code(), 3);
    assert_eq!(e.message, Error::Empty("design list").to_string());
    assert!(par_sweep(&targets(), AxisKind::DetuningRate, &[1e-2, 1e-3], None).is_err());
}
