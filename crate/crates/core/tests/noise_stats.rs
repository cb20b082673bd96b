use rand::Rng;

use huffdp::perturbation::{
    gaussian_baseline, gaussian_sigma, laplace_density, staircase_noise, StaircaseParams,
};
use huffdp::rng::seeded;
use huffdp::{laplace_sample, NoiseParams};

const N: usize = 1_000_000;

fn moments(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var)
}

#[test]
fn laplace_variance_and_median() {
    let p = NoiseParams::new(1.0, 0.0, 1.0).unwrap();
    let mut rng = seeded(1);
    let mut xs: Vec<f64> = (0..N).map(|_| laplace_sample(&p, &mut rng)).collect();
    let (mean, var) = moments(&xs);
    assert!((1.9..=2.1).contains(&var), "variance {var}");
    assert!(mean.abs() <= 0.01, "mean {mean}");
    xs.sort_by(f64::total_cmp);
    let median = xs[N / 2];
    assert!(median.abs() <= 0.01 * p.scale(), "median {median}");
}

#[test]
fn laplace_location_shift() {
    let p = NoiseParams::new(2.0, 5.0, 4.0).unwrap();
    let mut rng = seeded(2);
    let xs: Vec<f64> = (0..200_000).map(|_| laplace_sample(&p, &mut rng)).collect();
    let (mean, var) = moments(&xs);
    assert!((mean - 5.0).abs() < 0.01);
    assert!((var - 2.0 * 0.25).abs() < 0.02);
}

#[test]
fn doubling_epsilon_halves_magnitude() {
    // two-sample z-test on mean |X|
    let n = 200_000;
    let p1 = NoiseParams::new(1.0, 0.0, 1.0).unwrap();
    let p2 = NoiseParams::new(1.0, 0.0, 2.0).unwrap();
    let mut rng = seeded(3);
    let a: Vec<f64> = (0..n)
        .map(|_| laplace_sample(&p2, &mut rng).abs())
        .collect();
    let b: Vec<f64> = (0..n)
        .map(|_| laplace_sample(&p1, &mut rng).abs() / 2.0)
        .collect();
    let (ma, va) = moments(&a);
    let (mb, vb) = moments(&b);
    let z = (ma - mb) / (va / n as f64 + vb / n as f64).sqrt();
    assert!(z.abs() < 1.96, "z = {z}");
}

#[test]
fn laplace_ratio_bounded_by_exp_epsilon() {
    let mut rng = seeded(4);
    for _ in 0..100 {
        let eps: f64 = rng.random_range(0.01..5.0);
        let sens: f64 = rng.random_range(0.1..10.0);
        let f_d: f64 = rng.random_range(-100.0..100.0);
        let f_d2 = f_d + rng.random_range(-sens..=sens);
        let b = sens / eps;
        let bound = eps.exp() * (1.0 + 1e-12);
        for i in 0..10_000 {
            let x = f_d - 30.0 * b + 60.0 * b * i as f64 / 9_999.0;
            let ratio = laplace_density(x, f_d, b) / laplace_density(x, f_d2, b);
            assert!(ratio <= bound, "ratio {ratio} > {bound}");
        }
    }
}

#[test]
fn gaussian_std_matches_sigma() {
    let sigma = gaussian_sigma(1.0, 1e-5, 1.0).unwrap();
    let mut rng = seeded(5);
    let v = 3.0;
    let noise: Vec<f64> = (0..N)
        .map(|_| gaussian_baseline(v, 1.0, 1e-5, 1.0, &mut rng).unwrap() - v)
        .collect();
    let (mean, var) = moments(&noise);
    assert!((var.sqrt() - sigma).abs() <= 0.01 * sigma);
    assert!(mean.abs() < 0.02);
}

#[test]
fn staircase_is_symmetric() {
    let p = StaircaseParams::new(1.0, 1.0, None).unwrap();
    let mut rng = seeded(6);
    let xs: Vec<f64> = (0..N).map(|_| staircase_noise(&p, &mut rng)).collect();
    let (mean, _) = moments(&xs);
    assert!(mean.abs() <= 0.01, "mean {mean}");
}

#[test]
fn staircase_beats_laplace_on_l1() {
    let sp = StaircaseParams::new(1.0, 1.0, None).unwrap();
    let lp = NoiseParams::new(1.0, 0.0, 1.0).unwrap();
    let mut rng = seeded(7);
    let mut s = 0.0;
    let mut l = 0.0;
    for _ in 0..N {
        s += staircase_noise(&sp, &mut rng).abs();
        l += laplace_sample(&lp, &mut rng).abs();
    }
    let (s, l) = (s / N as f64, l / N as f64);
    // closed form E|S| at ε=1 with the ℓ1-optimal γ, by direct integration
    assert!((s - 0.959_517).abs() < 0.005, "staircase mean |S| {s}");
    assert!(s < l, "{s} !< {l}");
}

#[test]
fn staircase_density_shape() {
    // mass in [0, γ) vs [γ, 1) follows the tall/short stair ratio
    let eps: f64 = 1.0;
    let p = StaircaseParams::new(eps, 1.0, None).unwrap();
    let g = p.gamma;
    let mut rng = seeded(8);
    let (mut tall, mut short) = (0usize, 0usize);
    for _ in 0..N {
        let x = staircase_noise(&p, &mut rng).abs();
        if x < g {
            tall += 1;
        } else if x < 1.0 {
            short += 1;
        }
    }
    let observed = short as f64 / tall as f64;
    let expected = (1.0 - g) * (-eps).exp() / g;
    assert!((observed - expected).abs() < 0.01 * expected.max(1.0));
}
