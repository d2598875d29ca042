// Copyright 2026 The fraclab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

//! End-to-end acceptance checks. Prints one PASS/FAIL line per check and
//! exits nonzero if any fails.

use std::f64::consts::FRAC_1_SQRT_2;
use std::time::{Duration, Instant};

use fraclab::bounds::{
    corollary_bound, envelope_terms, thm1_bound, thm1_bound_restricted, BoundInputs, Corollary,
};
use fraclab::boxcount::{
    count_curve, estimate_dimension, minkowski_sum_check, CountCurve, CountSource, CurveOptions,
};
use fraclab::exact::Lambda;
use fraclab::ifs::{
    compose, preset, resolve_lambda, stopping_set, IfsSystem, PointCloud, PresetName, PresetParams,
    Similarity, Word,
};
use fraclab::overlap::{exact_overlaps, Mode};
use fraclab::separation::{
    gap_report, monte_carlo_scan, separation_table, sum_set, sum_set_exact, write_scan_csv,
    write_separation_csv, ScanOptions, DEFAULT_DEDUP_TOL,
};
use fraclab::sphere::{orbit_counts, sg_attractor, RotationSet};
use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const WINDOW: (u32, u32) = (8, 15);
const SLOPE_TOL: f64 = 0.08;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn comb_poly(poly: &str) -> fraclab::ifs::PresetSystem {
    let l = resolve_lambda(None, Some(&poly.parse().unwrap()), None).unwrap();
    preset(PresetName::BernoulliComb, &PresetParams::with_lambda(l)).unwrap()
}

fn comb_curve(poly: &str) -> (CountCurve, Duration) {
    let t = Instant::now();
    let system = comb_poly(poly);
    let ms: Vec<u32> = (WINDOW.0..=WINDOW.1).collect();
    let curve = count_curve(CountSource::System(&system), &ms, &CurveOptions::default()).unwrap();
    (curve, t.elapsed())
}

fn slope(curve: &CountCurve) -> f64 {
    estimate_dimension(curve, WINDOW).unwrap().slope
}

struct Curves {
    garsia2: CountCurve,
    garsia2_time: Duration,
    garsia3: CountCurve,
    garsia3_time: Duration,
    golden: CountCurve,
}

fn garsia_slopes(c: &Curves) -> Outcome {
    let s2 = slope(&c.garsia2);
    let s3 = slope(&c.garsia3);
    let t3 = 2.0 - 1.0 / 3.0;
    let limit = Duration::from_secs(180);
    let pass = (s2 - 1.5).abs() <= SLOPE_TOL
        && (s3 - t3).abs() <= SLOPE_TOL
        && c.garsia2_time < limit
        && c.garsia3_time < limit;
    outcome(
        pass,
        format!(
            "slope(2^-1/2)={s2:.4} (1.5±{SLOPE_TOL}, {:.0}s) slope(2^-1/3)={s3:.4} ({t3:.4}±{SLOPE_TOL}, {:.0}s)",
            c.garsia2_time.as_secs_f64(),
            c.garsia3_time.as_secs_f64()
        ),
    )
}

fn pisot_contrast(c: &Curves) -> Outcome {
    let g = slope(&c.golden);
    let s2 = slope(&c.garsia2);
    outcome(
        g <= 1.20 && s2 - g >= 0.25,
        format!("slope(golden)={g:.4} (<= 1.20) gap to garsia={:.4} (>= 0.25)", s2 - g),
    )
}

fn convergence_rate(c: &Curves) -> Outcome {
    let dev = |m: u32| (c.garsia2.get(m).unwrap() as f64).log2() / m as f64 - 1.5;
    let worst = (WINDOW.0..=WINDOW.1).map(|m| dev(m).abs() * m as f64).fold(0.0, f64::max);
    let ratio = dev(WINDOW.0).abs() / dev(WINDOW.1).abs();
    outcome(
        worst <= 20.0 && ratio >= 1.5,
        format!("max |log2N/m-1.5|*m={worst:.3} (<= 20) decrease factor m=8..15={ratio:.3} (>= 1.5)"),
    )
}

fn max_min_solver() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0xB0B);
    let inputs: Vec<BoundInputs> = (0..1000)
        .map(|_| {
            let d = rng.random_range(1..=4u32);
            let s: f64 = rng.random_range(0.0..6.0);
            BoundInputs::new(
                s,
                rng.random_range(0.0..=1.0) * s.min(d as f64),
                rng.random_range(0.0..=1.0) * d as f64,
                rng.random_range(0.0..=1.0) * s,
                d,
            )
            .unwrap()
        })
        .collect();
    let t = Instant::now();
    let solved: Vec<f64> = inputs.iter().map(|i| thm1_bound(i).unwrap().value).collect();
    let mut cor_err = 0.0f64;
    for inp in &inputs {
        let cases = [
            (Corollary::Cor2, BoundInputs { gamma: 0.0, ..*inp }),
            (Corollary::Cor3, BoundInputs { beta: 0.0, ..*inp }),
            (Corollary::Cor4, BoundInputs { alpha: 0.0, beta: 0.0, ..*inp }),
        ];
        for (c, i) in cases {
            let closed = corollary_bound(c, &i).unwrap();
            let env = thm1_bound_restricted(&i, c.terms()).unwrap().value;
            cor_err = cor_err.max((closed - env).abs());
        }
    }
    let solver_time = t.elapsed();
    let mut grid_err = 0.0f64;
    for (inp, v) in inputs.iter().zip(&solved) {
        let terms = envelope_terms(inp);
        let mut best = f64::NEG_INFINITY;
        for k in 0..=1_000_000u32 {
            let x = k as f64 * 1e-6;
            let low = terms.iter().map(|t| t.at(x)).fold(f64::INFINITY, f64::min);
            best = best.max(low);
        }
        grid_err = grid_err.max((v - best).abs());
    }
    let sharp = thm1_bound(&BoundInputs::new(2.0, 1.0, 1.0, 0.0, 2).unwrap()).unwrap().value;
    outcome(
        grid_err <= 1e-5 && cor_err <= 1e-9 && sharp == 1.5 && solver_time < Duration::from_secs(5),
        format!(
            "grid err={grid_err:.2e} (<= 1e-5) corollary err={cor_err:.2e} (<= 1e-9) sharp={sharp} solver {:.3}s",
            solver_time.as_secs_f64()
        ),
    )
}

fn separation_suite() -> Outcome {
    let golden = (5f64.sqrt() - 1.0) / 2.0;
    let lambdas = [0.55, 0.6, 0.62, golden, FRAC_1_SQRT_2, 0.75, 0.8, 0.9];
    let ss = [0.05, 0.2, 0.5, 1.0, 2.0];
    let ns = [4usize, 8, 12, 14, 16];
    let mut cases = 0;
    let mut t_violations = 0;
    for &l in &lambdas {
        for &n in &ns {
            let set = sum_set(l, n, DEFAULT_DEDUP_TOL).unwrap();
            for &s in &ss {
                cases += 1;
                if set.t_count(s) > set.r2_count(s) {
                    t_violations += 1;
                }
            }
        }
    }
    let q = Lambda::rational(fraclab::exact::ratio(3, 5));
    let full = (1..=16).all(|n| sum_set_exact(&q, n).unwrap().set.len() == 1 << n);
    let k_emp = (1..=20)
        .map(|n| gap_report(FRAC_1_SQRT_2, n).unwrap().scaled_gap)
        .fold(f64::INFINITY, f64::min);
    let g = comb_poly("x^2-x-1").into_similarity().unwrap();
    let pairs = exact_overlaps(&g, 3, Mode::Exact).unwrap();
    let found = pairs.iter().any(|p| {
        (p.word_a == [1, 0, 0] && p.word_b == [0, 1, 1]) || (p.word_a == [0, 1, 1] && p.word_b == [1, 0, 0])
    });
    outcome(
        t_violations == 0 && cases == 200 && full && k_emp >= 0.2 && found,
        format!(
            "T<=R2 on {cases} cases ({t_violations} violations) |A_n(3/5)|=2^n n<=16: {full} min scaled gap n<=20={k_emp:.4} (>= 0.2) golden (100)~(011): {found}"
        ),
    )
}

fn monte_carlo() -> Outcome {
    let t = Instant::now();
    let rows = monte_carlo_scan(&ScanOptions {
        boxdim_samples: 10,
        ..ScanOptions::default()
    })
    .unwrap();
    let elapsed = t.elapsed();
    let passed = rows.iter().filter(|r| r.all_pass).count();
    let mut errs: Vec<f64> = rows
        .iter()
        .filter_map(|r| r.slope.map(|s| (s - r.target).abs()))
        .collect();
    errs.sort_by(f64::total_cmp);
    let median = (errs[errs.len() / 2 - 1] + errs[errs.len() / 2]) / 2.0;
    outcome(
        rows.len() == 20 && passed >= 16 && errs.len() == 10 && median <= 0.10 && elapsed < Duration::from_secs(600),
        format!(
            "{passed}/20 pass the 2^(n-1) threshold for n in 6..=14 (>= 16) median |slope-log2(4λ)|={median:.4} (<= 0.10) {:.0}s",
            elapsed.as_secs_f64()
        ),
    )
}

fn minkowski() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5EED);
    let mut violations = 0;
    for k in 0..200 {
        let d = 1 + k % 3;
        let cloud = |rng: &mut ChaCha8Rng| {
            let n = rng.random_range(1..40);
            let spread: f64 = rng.random_range(0.01..2.0);
            let pts: Vec<Vec<f64>> = (0..n)
                .map(|_| (0..d).map(|_| rng.random_range(-spread..spread)).collect())
                .collect();
            PointCloud::from_points(d, &pts).unwrap()
        };
        let x = cloud(&mut rng);
        let y = cloud(&mut rng);
        let m = rng.random_range(0..10);
        if !minkowski_sum_check(&x, &y, m).unwrap().holds {
            violations += 1;
        }
    }
    outcome(violations == 0, format!("200 random pairs, {violations} violations"))
}

fn sphere() -> Outcome {
    let e1 = [1.0, 0.0, 0.0];
    let free = orbit_counts(&RotationSet::default_pair(), &e1, 8, 6).unwrap();
    let increasing = free.counts[1..=8].windows(2).all(|w| w[0] < w[1]);
    let flat = orbit_counts(&RotationSet::commuting_pair(), &e1, 8, 6).unwrap();
    let t = Instant::now();
    let sg = sg_attractor(0.95, &RotationSet::default_pair(), &e1, 7).unwrap();
    outcome(
        increasing && free.epsilon_hat >= 0.2 && flat.epsilon_hat <= 0.05 && sg.estimate.slope >= 1.3,
        format!(
            "counts n=1..8 strictly increasing: {increasing} eps={:.4} (>= 0.2) commuting eps={:.4} (<= 0.05) attractor c=0.95 dim={:.4} (>= 1.3, {:.0}s)",
            free.epsilon_hat,
            flat.epsilon_hat,
            sg.estimate.slope,
            t.elapsed().as_secs_f64()
        ),
    )
}

fn rotation(t: f64) -> DMatrix<f64> {
    DMatrix::from_row_slice(2, 2, &[t.cos(), -t.sin(), t.sin(), t.cos()])
}

fn with_threads<T: Send>(n: usize, f: impl FnOnce() -> T + Send) -> T {
    rayon::ThreadPoolBuilder::new().num_threads(n).build().unwrap().install(f)
}

fn structural(c: &Curves) -> Outcome {
    let t = Instant::now();
    let system = IfsSystem::new(
        2,
        vec![
            Similarity::new(0.5, rotation(0.3), DVector::from_column_slice(&[0.1, 0.0])).unwrap(),
            Similarity::new(0.4, rotation(-1.1), DVector::from_column_slice(&[0.5, 0.2])).unwrap(),
            Similarity::homothety(0.3, &[0.2, 0.6]).unwrap(),
        ],
        None,
    )
    .unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut compose_err = 0.0f64;
    for _ in 0..200 {
        let word = |rng: &mut ChaCha8Rng| Word((0..rng.random_range(0..8)).map(|_| rng.random_range(0..3u8)).collect());
        let (i, j) = (word(&mut rng), word(&mut rng));
        let lhs = compose(&system, &i.concat(&j)).unwrap();
        let rhs = compose(&system, &i).unwrap().then(&compose(&system, &j).unwrap());
        let x = DVector::from_column_slice(&[rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)]);
        compose_err = compose_err.max((lhs.apply(&x) - rhs.apply(&x)).norm());
    }
    let mut prefix_free = true;
    for r in [0.3, 0.1, 0.02, 0.004] {
        let words = stopping_set(&system, r).unwrap();
        for a in &words {
            for b in &words {
                if a != b && a.is_prefix_of(b) {
                    prefix_free = false;
                }
            }
        }
    }
    let mut refinement = true;
    for curve in [&c.garsia2, &c.garsia3, &c.golden] {
        for (m, n) in &curve.entries {
            if let Some(next) = curve.get(m + 1) {
                refinement &= *n <= next && next <= 4 * n;
            }
        }
    }
    let threads = std::thread::available_parallelism().map_or(1, |n| n.get()).max(4);
    let run = |n: usize| {
        with_threads(n, || {
            let system = preset(PresetName::BernoulliComb, &PresetParams::with_lambda(Lambda::real(0.61))).unwrap();
            let ms: Vec<u32> = (3..=11).collect();
            let opts = CurveOptions {
                delta_matching: true,
                ..CurveOptions::default()
            };
            let mut bytes = Vec::new();
            count_curve(CountSource::System(&system), &ms, &opts)
                .unwrap()
                .write_csv(&mut bytes)
                .unwrap();
            write_separation_csv(&separation_table(0.61, 18, 1.0).unwrap(), &mut bytes).unwrap();
            let scan = monte_carlo_scan(&ScanOptions {
                samples: 6,
                n_max: 12,
                ..ScanOptions::default()
            })
            .unwrap();
            write_scan_csv(&scan, &mut bytes).unwrap();
            bytes
        })
    };
    let identical = run(1) == run(threads);
    let elapsed = t.elapsed();
    outcome(
        compose_err < 1e-12 && prefix_free && refinement && identical && elapsed < Duration::from_secs(60),
        format!(
            "compose err={compose_err:.1e} prefix-free: {prefix_free} N(m)<=N(m+1)<=4N(m): {refinement} CSV identical at 1 and {threads} threads: {identical} ({:.0}s)",
            elapsed.as_secs_f64()
        ),
    )
}

fn main() {
    let (garsia2, garsia2_time) = comb_curve("x^2-2");
    let (garsia3, garsia3_time) = comb_curve("x^3-2");
    let (golden, _) = comb_curve("x^2-x-1");
    let curves = Curves {
        garsia2,
        garsia2_time,
        garsia3,
        garsia3_time,
        golden,
    };
    let checks: Vec<(&str, Box<dyn Fn() -> Outcome + '_>)> = vec![
        ("garsia dimension", Box::new(|| garsia_slopes(&curves))),
        ("pisot contrast", Box::new(|| pisot_contrast(&curves))),
        ("rate of convergence", Box::new(|| convergence_rate(&curves))),
        ("max-min solver", Box::new(max_min_solver)),
        ("separation suite", Box::new(separation_suite)),
        ("monte carlo scan", Box::new(monte_carlo)),
        ("minkowski sums", Box::new(minkowski)),
        ("sphere orbits", Box::new(sphere)),
        ("structural invariants", Box::new(|| structural(&curves))),
    ];
    let mut failed = 0;
    for (i, (name, check)) in checks.iter().enumerate() {
        let o = check();
        if !o.pass {
            failed += 1;
        }
        println!("{} {}: {} {}", i + 1, name, if o.pass { "PASS" } else { "FAIL" }, o.detail);
    }
    if failed > 0 {
        println!("{failed} acceptance check(s) failed");
        std::process::exit(1);
    }
}
