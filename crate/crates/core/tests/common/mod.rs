#![allow(dead_code)]

use std::f64::consts::PI;
use std::sync::OnceLock;

use dogforge_core::curvekit::uniform_grid;
use dogforge_core::dogsynth::{
    orange_slice_2d, twisted_3d, DogDesign, OrangeSliceOptions, TwistOptions,
};
use dogforge_core::qdyn::ControlFields;
use dogforge_core::Tolerances;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const XI_COARSE: f64 = PI / 2000.0;
pub const XI_FINE: f64 = PI / 20000.0;

fn cached(
    cell: &'static OnceLock<DogDesign>,
    make: impl FnOnce() -> DogDesign,
) -> &'static DogDesign {
    cell.get_or_init(make)
}

pub fn twisted(xi: f64) -> &'static DogDesign {
    static A: OnceLock<DogDesign> = OnceLock::new();
    static B: OnceLock<DogDesign> = OnceLock::new();
    static Z: OnceLock<DogDesign> = OnceLock::new();
    let cell = if xi == XI_COARSE {
        &A
    } else if xi == XI_FINE {
        &B
    } else if xi == 0.0 {
        &Z
    } else {
        panic!("no cached twisted design for xi = {xi}");
    };
    cached(cell, || {
        twisted_3d(xi, 1.0, &TwistOptions::default(), &Tolerances::default())
            .unwrap()
            .with_label(format!("twisted xi={xi:.4e}"))
    })
}

pub fn orange(phi0: f64) -> &'static DogDesign {
    static CELLS: [OnceLock<DogDesign>; 4] = [
        OnceLock::new(),
        OnceLock::new(),
        OnceLock::new(),
        OnceLock::new(),
    ];
    let k = [0.0, PI / 4.0, PI / 2.0, 3.0 * PI / 4.0]
        .iter()
        .position(|p| *p == phi0)
        .unwrap_or_else(|| panic!("no cached orange-slice design for phi0 = {phi0}"));
    cached(&CELLS[k], || {
        orange_slice_2d(
            phi0,
            1.0,
            &OrangeSliceOptions::default(),
            &Tolerances::default(),
        )
        .unwrap()
        .with_label(format!("orange phi0={phi0:.4}"))
    })
}

/// Smooth fields from a few random Fourier modes on `[0, duration]`.
pub fn random_smooth_fields(seed: u64, n: usize, duration: f64) -> ControlFields {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let t = uniform_grid(0.0, duration, n);
    let mut modes = |scale: f64| -> Vec<(f64, f64, f64)> {
        (1..=3)
            .map(|k| {
                let w = 2.0 * PI * k as f64 / duration;
                (
                    scale * rng.random_range(-1.0..1.0) / k as f64,
                    w,
                    rng.random_range(0.0..2.0 * PI),
                )
            })
            .collect()
    };
    let om = modes(0.3);
    let ph = modes(1.0);
    let de = modes(0.4);
    let eval = |m: &[(f64, f64, f64)], s: f64| {
        m.iter().map(|(a, w, p)| a * (w * s + p).sin()).sum::<f64>()
    };
    let omega = t.iter().map(|&s| 1.0 + eval(&om, s)).collect();
    let phi = t.iter().map(|&s| eval(&ph, s)).collect();
    let delta = t.iter().map(|&s| eval(&de, s)).collect();
    ControlFields::new(t, omega, phi, delta).unwrap()
}
