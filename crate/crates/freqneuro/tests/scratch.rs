// Temporary calibration probe; deleted before release.
use freqneuro::snes::SearchDistribution;

fn sphere(c: &[f64]) -> f64 {
    c.iter().map(|x| x * x).sum()
}

fn rosenbrock(c: &[f64]) -> f64 {
    c.windows(2)
        .map(|w| 100.0 * (w[1] - w[0] * w[0]).powi(2) + (1.0 - w[0]).powi(2))
        .sum()
}

#[test]
#[ignore]
fn probe_ellipsoid() {
    // Separable, condition number 1e4: SNES's per-dimension adaptation
    // should handle this cleanly if the update is correct.
    let d = 10usize;
    let ell = |c: &[f64]| -> f64 {
        c.iter()
            .enumerate()
            .map(|(i, x)| 10f64.powf(4.0 * i as f64 / (d - 1) as f64) * x * x)
            .sum()
    };
    for seed in 0..5 {
        let mut dist = SearchDistribution::with_init(vec![1.0; d], vec![1.0; d], seed).unwrap();
        let mut best = f64::INFINITY;
        for g in 1..=600 {
            let pop = dist.ask();
            let f: Vec<f64> = pop.candidates().iter().map(|c| ell(c)).collect();
            for v in &f {
                best = best.min(*v);
            }
            dist.tell(&pop, &f, false).unwrap();
            if g % 150 == 0 {
                println!("ellipsoid seed {seed} gen {g}: best {best:.3e}");
            }
        }
    }
}

#[test]
#[ignore]
fn probe_sphere_lambda() {
    for lambda in [16usize, 32, 64, 128] {
        let mut gens_needed = Vec::new();
        for seed in 0..5 {
            let mut dist = SearchDistribution::with_init(vec![1.0; 20], vec![0.5; 20], seed)
                .unwrap()
                .with_population_size(lambda);
            let mut best = f64::INFINITY;
            let mut reached = None;
            for g in 1..=150 {
                let pop = dist.ask();
                let f: Vec<f64> = pop.candidates().iter().map(|c| sphere(c)).collect();
                for v in &f {
                    best = best.min(*v);
                }
                dist.tell(&pop, &f, false).unwrap();
                if best < 1e-6 {
                    reached = Some(g);
                    break;
                }
            }
            gens_needed.push(reached);
        }
        println!("lambda {lambda}: gens to 1e-6 = {gens_needed:?}");
    }
}

#[test]
#[ignore]
fn probe_rosenbrock_lambda() {
    for (lambda, start, s0) in [
        (14usize, 0.0, 0.5),
        (56, 0.0, 0.5),
        (128, 0.0, 0.5),
        (56, 0.8, 0.1),
        (128, 0.8, 0.1),
        (128, 0.95, 0.05),
    ] {
        let mut finals = Vec::new();
        for seed in 0..5 {
            let mut dist =
                SearchDistribution::with_init(vec![start; 10], vec![s0; 10], seed)
                    .unwrap()
                    .with_population_size(lambda);
            let mut best = f64::INFINITY;
            for _ in 1..=300 {
                let pop = dist.ask();
                let f: Vec<f64> = pop.candidates().iter().map(|c| rosenbrock(c)).collect();
                for v in &f {
                    best = best.min(*v);
                }
                dist.tell(&pop, &f, false).unwrap();
            }
            finals.push(best);
        }
        finals.sort_by(|a, b| a.partial_cmp(b).unwrap());
        println!("lambda {lambda} start {start} s0 {s0}: finals {finals:?}");
    }
}
