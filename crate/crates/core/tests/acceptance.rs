//! Acceptance criteria. Each test prints one `[PASS]`/`[FAIL]` line; run
//! with `cargo test -p vqpm --test acceptance -- --nocapture` to see them.

use std::collections::BTreeMap;
use std::f64::consts::FRAC_PI_4;
use std::sync::OnceLock;
use std::time::{Duration, Instant};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use vqpm::experiments::{aggregate, run_sweep, write_aggregates, write_instances, InstanceRecord, SweepConfig};
use vqpm::qubo::{brute_force_solve, generate_random, scale_problem, Bitstring, QuboInstance};
use vqpm::spectrum::{apply_gate_list, build_gate_list, build_oracle, eigengap};
use vqpm::state::StateVector;
use vqpm::vqpm::{hadamard_branches, power_step, run, run_exact_power, VqpmConfig};

fn report(id: &str, name: &str, ok: bool, detail: String) {
    println!("[{}] {id} {name}: {detail}", if ok { "PASS" } else { "FAIL" });
    assert!(ok, "{id} {name} failed: {detail}");
}

fn worked_example() -> QuboInstance {
    QuboInstance::from_upper_matrix(&[
        vec![4.02377326, -1.06286586, 0.49009314, 0.95332512],
        vec![0.0, 1.4338403, -1.4136876, 0.29605018],
        vec![0.0, 0.0, -3.60973431, -0.7966874],
        vec![0.0, 0.0, 0.0, -0.52469588],
    ])
    .unwrap()
}

/// (bitstring, y, y scaled, y scaled + π/4) as printed in the published table.
#[allow(clippy::approx_constant)]
const TABLE: [(&str, f64, f64, f64); 16] = [
    ("0000", 0.0, 0.0, 0.7854),
    ("0001", -0.5247, -0.02822, 0.75718),
    ("0010", -3.60973, -0.19412, 0.59128),
    ("0011", -4.93112, -0.26518, 0.52022),
    ("0100", 1.43384, 0.07711, 0.86251),
    ("0101", 1.20519, 0.06481, 0.85021),
    ("0110", -3.58958, -0.19304, 0.59236),
    ("0111", -4.61491, -0.24818, 0.53722),
    ("1000", 4.02377, 0.21639, 1.00178),
    ("1001", 4.4524, 0.23944, 1.02483),
    ("1010", 0.90413, 0.04862, 0.83402),
    ("1011", 0.53607, 0.02883, 0.81423),
    ("1100", 4.39475, 0.23634, 1.02173),
    ("1101", 5.11943, 0.27531, 1.06071),
    ("1110", -0.13858, -0.00745, 0.77795),
    ("1111", -0.21059, -0.01132, 0.77407),
];

fn random_state(n: usize, rng: &mut ChaCha8Rng) -> StateVector {
    let amps = (0..1 << n)
        .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
        .collect();
    let mut v = StateVector::from_amplitudes(n, amps).unwrap();
    v.normalize();
    v
}

#[test]
fn ac1_table_reproduction() {
    let start = Instant::now();
    let p = worked_example();
    let s = scale_problem(&p).unwrap();
    let oracle = build_oracle(&s).unwrap();
    let mut worst = 0.0f64;
    for (bits, y, y_scaled, shifted) in TABLE {
        let x: Bitstring = bits.parse().unwrap();
        let got = [
            p.objective(&x).unwrap(),
            s.base.objective(&x).unwrap(),
            oracle.phase(&x),
        ];
        for (g, want) in got.iter().zip([y, y_scaled, shifted]) {
            worst = worst.max((g - want).abs());
        }
    }
    let elapsed = start.elapsed();
    report(
        "AC1",
        "Table 1 reproduction",
        worst <= 5e-6 && elapsed < Duration::from_secs(1),
        format!("max deviation {worst:.2e} (tol 5e-6) over 16x3 entries in {elapsed:?}"),
    );
}

#[test]
fn ac2_worked_example_eigengap() {
    let oracle = build_oracle(&scale_problem(&worked_example()).unwrap()).unwrap();
    let gap = eigengap(&oracle);
    report(
        "AC2",
        "worked-example eigengap",
        (gap - 0.017).abs() <= 5e-4,
        format!("eigengap {gap:.6} vs 0.017 (tol 5e-4)"),
    );
}

#[test]
fn ac3_worked_example_solve() {
    let s = scale_problem(&worked_example()).unwrap();
    let cfg = VqpmConfig {
        gamma: 1e-4,
        p_diff: 1e-3,
        max_iters: 100,
        ..VqpmConfig::default()
    };
    let target: Bitstring = "0011".parse().unwrap();
    let r = run(&s, &cfg, Some(&target)).unwrap();
    let best = r
        .trace
        .iter()
        .filter_map(|t| t.success_prob)
        .fold(0.0f64, f64::max);
    let ok = r.found == target && best >= 0.5 && r.iterations <= 100;
    report(
        "AC3",
        "worked-example variational solve",
        ok,
        format!(
            "found {} after {} iterations ({}), peak success probability {best:.5}",
            r.found, r.iterations, r.termination
        ),
    );
}

#[test]
fn ac4_exact_mode_matches_brute_force() {
    let start = Instant::now();
    let cfg = VqpmConfig::default();
    let (mut checked, mut matched, mut seed) = (0, 0, 0u64);
    while checked < 200 {
        let n = 2 + (seed as usize % 7);
        let p = generate_random(n, 40_000 + seed).unwrap();
        seed += 1;
        let s = scale_problem(&p).unwrap();
        if eigengap(&build_oracle(&s).unwrap()) <= 1e-6 {
            continue;
        }
        checked += 1;
        let r = run_exact_power(&s, &cfg).unwrap();
        if r.found == brute_force_solve(&p).unwrap().0 {
            matched += 1;
        }
    }
    let elapsed = start.elapsed();
    report(
        "AC4",
        "exact-mode oracle equivalence",
        matched == checked && elapsed < Duration::from_secs(30),
        format!("{matched}/{checked} readouts equal the brute-force argmin in {elapsed:?}"),
    );
}

#[test]
fn ac5_invariant_suite() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let (mut bounds_ok, mut complete_ok, mut low_ok, mut low_cases) = (true, true, true, 0);
    let mut worst_completeness = 0.0f64;
    for k in 0..1000u64 {
        let n = 1 + (k as usize % 8);
        let mut p = generate_random(n, 50_000 + k).unwrap();
        if k % 2 == 1 {
            // all coefficients non-positive keeps every phase at or below π/4 < 1
            p = QuboInstance::new(
                n,
                p.linear().iter().map(|v| -v.abs()).collect(),
                p.quadratic().iter().map(|(&key, v)| (key, -v.abs())).collect::<BTreeMap<_, _>>(),
            )
            .unwrap();
        }
        let oracle = build_oracle(&scale_problem(&p).unwrap()).unwrap();
        let v = random_state(n, &mut rng);
        let (p0, p1) = hadamard_branches(&v, &oracle).unwrap();
        let (_, step_p0) = power_step(&v, &oracle).unwrap();
        bounds_ok &= (0.5..=1.0).contains(&p0) && (p0 - step_p0).abs() < 1e-12;
        worst_completeness = worst_completeness.max((p0 + p1 - 1.0).abs());
        complete_ok &= (p0 + p1 - 1.0).abs() <= 1e-10;
        if oracle.phases().iter().all(|&l| l <= 1.0) {
            low_cases += 1;
            low_ok &= p0 >= 0.77;
        }
    }

    let mut monotone_ok = true;
    let mut worst_drop = 0.0f64;
    for k in 0..100u64 {
        let n = 2 + (k as usize % 9);
        let oracle = build_oracle(&scale_problem(&generate_random(n, 60_000 + k).unwrap()).unwrap()).unwrap();
        let mut v = StateVector::uniform(n);
        let mut last = 0.0;
        for _ in 0..50 {
            let (next, p0) = power_step(&v, &oracle).unwrap();
            worst_drop = worst_drop.max(last - p0);
            monotone_ok &= p0 >= last - 1e-12;
            last = p0;
            v = next;
        }
    }
    report(
        "AC5",
        "P0 bounds, completeness, low-phase bound, exact-mode monotonicity",
        bounds_ok && complete_ok && low_ok && low_cases > 0 && monotone_ok,
        format!(
            "bounds {bounds_ok}; max |P0+P1-1| {worst_completeness:.1e}; P0>=0.77 on {low_cases} low-phase cases {low_ok}; \
             monotone over 100x50 steps {monotone_ok} (largest drop {worst_drop:.1e})"
        ),
    );
}

#[test]
fn ac6_gate_direct_equivalence() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut worst = 0.0f64;
    for k in 0..100u64 {
        let n = 1 + (k as usize % 10);
        let s = scale_problem(&generate_random(n, 70_000 + k).unwrap()).unwrap();
        let v = random_state(n, &mut rng);
        let via_gates = apply_gate_list(&build_gate_list(&s), &v).unwrap();
        let direct = build_oracle(&s).unwrap().apply(&v).unwrap();
        worst = worst.max(via_gates.max_deviation(&direct).unwrap());
    }
    report(
        "AC6",
        "gate-list / direct diagonal equivalence",
        worst <= 1e-12,
        format!("max elementwise deviation {worst:.2e} over 100 instances (tol 1e-12)"),
    );
}

const SWEEP_SEED: u64 = 2024;

fn sweep_config() -> SweepConfig {
    SweepConfig::new(2, 16, 50, SWEEP_SEED)
}

struct SweepRun {
    records: Vec<InstanceRecord>,
    elapsed: Duration,
}

fn sweep() -> &'static SweepRun {
    static SWEEP: OnceLock<SweepRun> = OnceLock::new();
    SWEEP.get_or_init(|| {
        let start = Instant::now();
        let records = run_sweep(&sweep_config()).unwrap();
        SweepRun {
            records,
            elapsed: start.elapsed(),
        }
    })
}

fn csv_bytes(records: &[InstanceRecord]) -> (Vec<u8>, Vec<u8>) {
    let mut inst = Vec::new();
    write_instances(&mut inst, records).unwrap();
    let mut agg = Vec::new();
    write_aggregates(&mut agg, &aggregate(records).unwrap()).unwrap();
    (inst, agg)
}

/// Least-squares line through `(x, y)`; returns (slope, intercept, r²).
fn linear_fit(points: &[(f64, f64)]) -> (f64, f64, f64) {
    let m = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / m;
    let my = points.iter().map(|p| p.1).sum::<f64>() / m;
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let syy: f64 = points.iter().map(|p| (p.1 - my).powi(2)).sum();
    let slope = sxy / sxx;
    let r2 = if syy > 0.0 { sxy * sxy / (sxx * syy) } else { 1.0 };
    (slope, my - slope * mx, r2)
}

/// Centered three-point moving average; endpoints average what exists.
fn smooth3(values: &[f64]) -> Vec<f64> {
    (0..values.len())
        .map(|i| {
            let lo = i.saturating_sub(1);
            let hi = (i + 1).min(values.len() - 1);
            values[lo..=hi].iter().sum::<f64>() / (hi - lo + 1) as f64
        })
        .collect()
}

#[test]
fn ac7_sweep_trends() {
    let run = sweep();
    let agg = aggregate(&run.records).unwrap();
    let cfg = sweep_config();

    let max_iters = run.records.iter().map(|r| r.iterations).max().unwrap();
    let a_ok = max_iters <= 100 && run.records.len() == 15 * 50;

    let points: Vec<(f64, f64)> = agg.iter().map(|a| (a.n as f64, a.mean_iterations)).collect();
    let (slope, intercept, r2) = linear_fit(&points);
    let fitted16 = slope * 16.0 + intercept;
    let observed16 = agg.iter().find(|a| a.n == 16).unwrap().mean_iterations;
    let b_ok = fitted16 < 100.0 && observed16 < 100.0;

    let gaps: Vec<f64> = agg.iter().map(|a| a.mean_eigengap).collect();
    let smoothed = smooth3(&gaps);
    let c_ok = smoothed.windows(2).all(|w| w[1] < w[0]);

    let mut d_ok = true;
    let mut d_detail = Vec::new();
    for a in &agg {
        if let (Some(err), Some(ham)) = (a.mean_abs_error_nonexact, a.mean_hamming_nonexact) {
            let ok = err < 50.0 * a.mean_eigengap && ham <= 4.0;
            d_ok &= ok;
            if !ok {
                d_detail.push(format!("n={} err {err:.3e} gap {:.3e} ham {ham:.2}", a.n, a.mean_eigengap));
            }
        }
    }

    println!("n   mean_iter  mean_gap     exact  err_nonexact  ham_nonexact");
    for a in &agg {
        println!(
            "{:<3} {:>9.3}  {:.4e}  {:>5}  {:>12}  {:>12}",
            a.n,
            a.mean_iterations,
            a.mean_eigengap,
            a.exact_count,
            a.mean_abs_error_nonexact.map(|v| format!("{v:.4e}")).unwrap_or_else(|| "-".into()),
            a.mean_hamming_nonexact.map(|v| format!("{v:.3}")).unwrap_or_else(|| "-".into()),
        );
    }
    report(
        "AC7a",
        "sweep runs terminate within 100 iterations",
        a_ok,
        format!("{} runs over n={}..{}, max iterations {max_iters}", run.records.len(), cfg.n_min, cfg.n_max),
    );
    report(
        "AC7b",
        "mean iterations non-explosive",
        b_ok,
        format!("fit {slope:.4}*n + {intercept:.4} (r2 {r2:.3}); fitted(16) {fitted16:.3}, observed(16) {observed16:.3}"),
    );
    report(
        "AC7c",
        "mean eigengap decreasing after smoothing",
        c_ok,
        format!("smoothed gaps {:?}", smoothed.iter().map(|g| format!("{g:.3e}")).collect::<Vec<_>>()),
    );
    report(
        "AC7d",
        "non-exact error below 50x eigengap and Hamming <= 4",
        d_ok,
        if d_detail.is_empty() { "all sizes within bands".into() } else { d_detail.join("; ") },
    );
    report(
        "AC7t",
        "sweep runtime under 10 minutes",
        run.elapsed < Duration::from_secs(600),
        format!("{:?}", run.elapsed),
    );
}

#[test]
fn ac8_determinism() {
    let first = csv_bytes(&sweep().records);
    let again = csv_bytes(&run_sweep(&sweep_config()).unwrap());
    let single = vqpm::par::with_threads(Some(1), || csv_bytes(&run_sweep(&sweep_config()).unwrap()));
    report(
        "AC8",
        "byte-identical sweep CSVs",
        first == again && first == single,
        format!(
            "instance CSV {} bytes, aggregate CSV {} bytes; repeat equal {}, single-thread equal {}",
            first.0.len(),
            first.1.len(),
            first == again,
            first == single
        ),
    );
}

#[test]
fn ac9_record_consistency() {
    let records = &sweep().records;
    let bad: Vec<_> = records
        .iter()
        .filter(|r| {
            let zero_raw = r.raw_abs_error <= 1e-12;
            r.exact != (r.hamming == 0) || r.exact != zero_raw
        })
        .map(|r| (r.n, r.seed))
        .collect();
    let exact = records.iter().filter(|r| r.exact).count();
    report(
        "AC9",
        "exact <=> Hamming 0 <=> raw error 0",
        bad.is_empty(),
        format!("{} records ({exact} exact), inconsistent: {bad:?}", records.len()),
    );
}

#[test]
fn phase_shift_is_quarter_turn() {
    let s = scale_problem(&worked_example()).unwrap();
    assert_eq!(s.phase_shift, FRAC_PI_4);
}
