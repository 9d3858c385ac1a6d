//! Acceptance suite. Runs every criterion and prints one PASS/FAIL line each.
//! With `SWSEQ_ACCEPTANCE_STRICT=1` the process exits non-zero when any
//! criterion fails.

use std::f64::consts::{PI, TAU};
use std::panic;
use std::process::ExitCode;
use std::sync::OnceLock;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use swseq_core::ambiguity::{
    ambiguity_surface, ambiguity_value, ambiguity_with_instants, linspace, AngleAxis,
    to_db, ObjectiveConfig, ObjectiveEvaluator, Region, DEFAULT_DOPPLER_FRACTION,
};
use swseq_core::analysis::{
    alias_scan, compare_schemes, effective_factor, peak_sidelobe, CompareSettings, ComparisonReport, SchemeSet, SweepGrids,
};
use swseq_core::anneal::{anneal, temperature_schedule, AnnealConfig, AnnealTrace, UpdateKind};
use swseq_core::arrays::{effective_elements, make_octagonal, make_ula, ArrayModel, Direction, PanelRing};
use swseq_core::crlb::{crlb_doppler, crlb_report, ParamVector};
use swseq_core::signal::ReceiveParams;
use swseq_core::switching::{
    hybrid_init, random_init, sequential, SwitchingSequence, DEFAULT_SLOT_PERIOD_S,
};
use swseq_core::Error;

const K_MAX: usize = 200;
const RANDOM_SEED: u64 = 1;
const HYBRID_SEED: u64 = 2;
const ANNEAL_SEED: u64 = 3;
/// Reference panel for the octagonal comparison (interior of the slot order).
const REFERENCE_PANEL: usize = 4;

struct OctagonalRun {
    array: ArrayModel,
    evaluator: ObjectiveEvaluator,
    random: (SwitchingSequence, AnnealTrace),
    hybrid: (SwitchingSequence, AnnealTrace),
    report: ComparisonReport,
}

fn octagonal_run() -> &'static OctagonalRun {
    static RUN: OnceLock<OctagonalRun> = OnceLock::new();
    RUN.get_or_init(|| {
        let ring = PanelRing::default();
        let array = make_octagonal(&ring).unwrap();
        let dt = DEFAULT_SLOT_PERIOD_S;
        let region = Region::from_slot_period(dt, DEFAULT_DOPPLER_FRACTION).unwrap();
        let objective = ObjectiveConfig::default();
        let evaluator = ObjectiveEvaluator::new(&array, &region, &objective).unwrap();
        let m = array.len();

        let rand_init = random_init(m, dt, 1, &mut ChaCha8Rng::seed_from_u64(RANDOM_SEED)).unwrap();
        let hyb_init = hybrid_init(
            array.partition().unwrap(),
            dt,
            1,
            &mut ChaCha8Rng::seed_from_u64(HYBRID_SEED),
        )
        .unwrap();
        let random = anneal(&rand_init, &AnnealConfig::new(K_MAX, ANNEAL_SEED, UpdateKind::Random), &evaluator).unwrap();
        let hybrid = anneal(&hyb_init, &AnnealConfig::new(K_MAX, ANNEAL_SEED, UpdateKind::Hybrid), &evaluator).unwrap();

        let seq = sequential(m, dt, 1).unwrap();
        let reference = ReceiveParams::new(Direction::horizon(ring.panel_azimuth(REFERENCE_PANEL)).unwrap(), 0.0);
        let settings = CompareSettings {
            reference,
            grids: SweepGrids {
                axis: AngleAxis::Eoa,
                doppler: linspace(-3000.0, 3000.0, 1201),
                angle: linspace(30.0, 150.0, 241).into_iter().map(f64::to_radians).collect(),
            },
            threshold_db: -10.0,
            region,
            objective,
            amplitude: 1.0,
            noise_sigma: 0.1,
        };
        let set = SchemeSet {
            sequential: &seq,
            random: &random.0,
            hybrid: &hybrid.0,
        };
        let (report, _) = compare_schemes(&array, &set, &settings).unwrap();
        OctagonalRun {
            array,
            evaluator,
            random,
            hybrid,
            report,
        }
    })
}

type Outcome = Result<String, String>;

fn check(cond: bool, detail: String) -> Outcome {
    if cond {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn broadening_ratio() -> Outcome {
    let run = octagonal_run();
    let r = &run.report;
    let widths: Vec<String> = r
        .schemes
        .iter()
        .map(|s| {
            format!(
                "{} {:.1} Hz",
                s.name,
                s.doppler_width.as_ref().map_or(f64::NAN, |w| w.width())
            )
        })
        .collect();
    let ratio = r.broadening_ratio.ok_or("Doppler main lobe clipped by the grid")?;
    check(
        (2.3..=3.1).contains(&ratio),
        format!("ratio {ratio:.3} (1/xi = {:.3}; {})", r.inverse_xi, widths.join(", ")),
    )
}

fn angular_preservation() -> Outcome {
    let r = &octagonal_run().report;
    let width = |i: usize| r.schemes[i].angle_width.as_ref().map(|w| w.width());
    let (rand, hyb) = (width(1).ok_or("random EOA lobe clipped")?, width(2).ok_or("hybrid EOA lobe clipped")?);
    check(
        (hyb - rand).abs() <= 0.5,
        format!("EOA width random {rand:.3} deg, hybrid {hyb:.3} deg"),
    )
}

fn crlb_equivalence() -> Outcome {
    let mut checked = 0;
    let mut worst = 0.0f64;
    for m in [4usize, 8, 16] {
        let array = make_ula(m, 0.5, 1.0).unwrap();
        for phi_deg in [45.0f64, 90.0, 135.0] {
            let theta = ParamVector::new(phi_deg.to_radians(), 20.0, 1.0, 0.3).unwrap();
            let mut qualifying = 0;
            for seed in 0..200u64 {
                let seq = random_init(m, 1e-3, 1, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
                let rep = crlb_report(&array, 0.5, &seq, &theta, 0.1);
                let (Some(ratio), Some(num)) = (rep.off_diag_ratio, rep.numeric.as_ref()) else {
                    continue;
                };
                if ratio >= 0.05 {
                    continue;
                }
                qualifying += 1;
                let dp = (rep.closed_form.var_phi.unwrap() / num.var_phi - 1.0).abs();
                let dn = (rep.closed_form.var_nu.unwrap() / num.var_nu - 1.0).abs();
                worst = worst.max(dp).max(dn);
                if dp >= 0.01 || dn >= 0.01 {
                    return Err(format!(
                        "M={m} phi={phi_deg} seed={seed}: relative errors {dp:.2e} (phi), {dn:.2e} (nu)"
                    ));
                }
            }
            if qualifying == 0 {
                return Err(format!("M={m} phi={phi_deg}: no sequence with off_diag_ratio < 0.05"));
            }
            checked += qualifying;
        }
    }
    Ok(format!("{checked} decoupled cases, worst relative error {worst:.2e}"))
}

fn crlb_ordering() -> Outcome {
    let ring = PanelRing::default();
    let array = make_octagonal(&ring).unwrap();
    let dir = Direction::horizon(ring.panel_azimuth(REFERENCE_PANEL)).unwrap();
    let eff = effective_elements(&array, &dir, -10.0).unwrap();
    let dt = DEFAULT_SLOT_PERIOD_S;
    let mut min_ratio = f64::INFINITY;
    for seed in 0..20u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let hyb = hybrid_init(array.partition().unwrap(), dt, 1, &mut rng).unwrap();
        let rnd = random_init(array.len(), dt, 1, &mut rng).unwrap();
        let h = crlb_doppler(&hyb.eta_subset(&eff, true), 1.0, 0.1).unwrap();
        let r = crlb_doppler(&rnd.eta_vector(true), 1.0, 0.1).unwrap();
        min_ratio = min_ratio.min(h / r);
        if h < r {
            return Err(format!("seed {seed}: hybrid {h:.3e} < random {r:.3e}"));
        }
    }
    Ok(format!("20 seeds, min hybrid/random ratio {min_ratio:.3}"))
}

fn aliasing() -> Outcome {
    let m = 32;
    let dt = 1e-4;
    let array = make_ula(m, 0.5, 1.0).unwrap();
    let region = Region::from_slot_period(dt, DEFAULT_DOPPLER_FRACTION).unwrap();
    let reference = ReceiveParams::new(Direction::horizon(PI / 2.0).unwrap(), 0.0);
    let seq = sequential(m, dt, 1).unwrap();

    // element phases (m - c)(pi cos phi' + 2 pi nu' dt) cancel on the alias line
    let phi2 = 80f64.to_radians();
    let nu2 = -(PI * phi2.cos()) / (TAU * dt);
    let predicted = ambiguity_value(&array, &seq, &reference, &ReceiveParams::new(Direction::horizon(phi2).unwrap(), nu2))
        .unwrap()
        .norm();

    let bound = region.doppler_bound();
    let doppler = linspace(-bound, bound, 401);
    let angle: Vec<f64> = linspace(0.0, 180.0, 361).into_iter().map(f64::to_radians).collect();
    let seq_surface = ambiguity_surface(&array, &seq, reference, &doppler, AngleAxis::Aoa, &angle).unwrap();
    let seq_lobes = alias_scan(&seq_surface);
    let psl_seq = seq_lobes.first().map_or(0.0, |l| l.magnitude);

    let evaluator = ObjectiveEvaluator::new(&array, &region, &ObjectiveConfig::default()).unwrap();
    let init = random_init(m, dt, 1, &mut ChaCha8Rng::seed_from_u64(5)).unwrap();
    let (opt, _) = anneal(&init, &AnnealConfig::new(K_MAX, 6, UpdateKind::Random), &evaluator).unwrap();
    let rnd_surface = ambiguity_surface(&array, &opt, reference, &doppler, AngleAxis::Aoa, &angle).unwrap();
    let psl_rnd = peak_sidelobe(&rnd_surface);
    let reduction = to_db(psl_seq) - to_db(psl_rnd);
    check(
        predicted >= 0.99 && psl_seq >= 0.99 && reduction >= 6.0,
        format!(
            "|X| at predicted alias point {predicted:.6}, sequential PSL {psl_seq:.4}, optimized random PSL {psl_rnd:.4}, reduction {reduction:.2} dB"
        ),
    )
}

fn random_receive(rng: &mut ChaCha8Rng) -> ReceiveParams {
    let dir = Direction::new(rng.random_range(0.0..TAU), rng.random_range(0.0..PI)).unwrap();
    ReceiveParams::new(dir, rng.random_range(-5000.0..5000.0))
}

fn ambiguity_properties() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut draws = 0;
    let mut skipped = 0;
    let (mut e_bound, mut e_self, mut e_sym, mut e_shift) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    while draws < 10_000 {
        let array = if rng.random_bool(0.5) {
            make_ula(rng.random_range(2..=16), rng.random_range(0.1..1.5), 1.0).unwrap()
        } else {
            make_octagonal(&PanelRing {
                panels: rng.random_range(3..=8),
                rows: rng.random_range(1..=3),
                cols: rng.random_range(1..=3),
                patch_exponent: rng.random_range(0.5..3.0),
                ..PanelRing::default()
            })
            .unwrap()
        };
        let dt = rng.random_range(1e-6..1e-4);
        let snapshots = rng.random_range(1..=3);
        let seq = random_init(array.len(), dt, snapshots, &mut rng).unwrap();
        let (mu, mu2) = (random_receive(&mut rng), random_receive(&mut rng));
        let (x, x_rev, x_self) = match (
            ambiguity_value(&array, &seq, &mu, &mu2),
            ambiguity_value(&array, &seq, &mu2, &mu),
            ambiguity_value(&array, &seq, &mu, &mu),
        ) {
            (Ok(a), Ok(b), Ok(c)) => (a, b, c),
            (Err(Error::DegenerateDirection { .. }), ..) => {
                skipped += 1;
                continue;
            }
            (a, b, c) => return Err(format!("unexpected error: {:?}", a.and(b).and(c).unwrap_err())),
        };
        let shift = rng.random_range(-1e-2..1e-2);
        let eta: Vec<f64> = seq.eta_vector(true).iter().map(|t| t + shift).collect();
        let x_shift = ambiguity_with_instants(&array, &eta, &mu, &mu2).unwrap();
        e_bound = e_bound.max(x.norm() - 1.0);
        e_self = e_self.max((x_self.norm() - 1.0).abs());
        e_sym = e_sym.max((x.norm() - x_rev.norm()).abs());
        e_shift = e_shift.max((x.norm() - x_shift.norm()).abs());
        draws += 1;
    }
    check(
        e_bound <= 1e-12 && e_self <= 1e-12 && e_sym <= 1e-12 && e_shift <= 1e-10,
        format!(
            "{draws} draws ({skipped} degenerate redrawn): max |X|-1 {e_bound:.1e}, self {e_self:.1e}, symmetry {e_sym:.1e}, shift {e_shift:.1e}"
        ),
    )
}

/// Largest and mean relative decrease per 10 iterations after iteration 100.
fn stabilization(trace: &AnnealTrace) -> (f64, f64) {
    let f: Vec<f64> = trace.records.iter().map(|r| r.objective).collect();
    let windows: Vec<f64> = (100..f.len() - 10).map(|k| (f[k] - f[k + 10]) / f[k].abs()).collect();
    let max = windows.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mean = (f[100] - f[f.len() - 1]) / f[100].abs() * 10.0 / (f.len() - 101) as f64;
    (max, mean)
}

fn annealing() -> Outcome {
    let run = octagonal_run();
    let m = run.array.len();
    let dt = DEFAULT_SLOT_PERIOD_S;
    let rand_init = random_init(m, dt, 1, &mut ChaCha8Rng::seed_from_u64(RANDOM_SEED)).unwrap();
    let (again, trace) = anneal(&rand_init, &AnnealConfig::new(K_MAX, ANNEAL_SEED, UpdateKind::Random), &run.evaluator).unwrap();
    let reproducible = again == run.random.0
        && trace.records == run.random.1.records
        && trace.best_sequence == run.random.1.best_sequence;

    let mut schedule_exact = true;
    let mut improvements_accepted = true;
    for (_, t) in [&run.random, &run.hybrid] {
        let mut prev = t.initial_objective;
        for r in &t.records {
            schedule_exact &= r.temperature == temperature_schedule(t.initial_temperature, t.cooling_rate, r.k);
            if r.proposal_objective < prev {
                improvements_accepted &= r.accepted;
            }
            prev = r.objective;
        }
    }
    let f_rand = run.random.1.final_objective();
    let f_hyb = run.hybrid.1.final_objective();
    let (s_rand, s_hyb) = (stabilization(&run.random.1), stabilization(&run.hybrid.1));
    check(
        reproducible && schedule_exact && improvements_accepted && f_rand < f_hyb && s_rand.0 < 0.01 && s_hyb.0 < 0.01,
        format!(
            "reproducible {reproducible}, schedule exact {schedule_exact}, improvements accepted {improvements_accepted}, final random {f_rand:.6e} vs hybrid {f_hyb:.6e}, 10-iteration decrease after k=100 (max/mean): random {:.2}%/{:.2}%, hybrid {:.2}%/{:.2}%",
            100.0 * s_rand.0,
            100.0 * s_rand.1,
            100.0 * s_hyb.0,
            100.0 * s_hyb.1
        ),
    )
}

fn effective_factor_check() -> Outcome {
    let ring = PanelRing::default();
    let oct = make_octagonal(&ring).unwrap();
    let xi = effective_factor(&oct, &Direction::horizon(ring.panel_azimuth(0)).unwrap(), -10.0).unwrap();
    let square = PanelRing {
        panels: 4,
        patch_exponent: 0.0,
        ..PanelRing::default()
    };
    let sq = make_octagonal(&square).unwrap();
    let xi_sq = effective_factor(&sq, &Direction::horizon(square.panel_azimuth(1)).unwrap(), -10.0).unwrap();
    check(
        (2.5 / 8.0..=3.5 / 8.0).contains(&xi) && xi_sq == 0.25,
        format!("octagonal xi {xi} ({} of 8 panels), square sector xi {xi_sq}", xi * 8.0),
    )
}

fn dirichlet() -> Outcome {
    let m = 12;
    let dt = 2e-5;
    let array = make_ula(m, 0.5, 1.0).unwrap();
    let seq = sequential(m, dt, 1).unwrap();
    let reference = ReceiveParams::new(Direction::from_degrees(30.0, 60.0).unwrap(), 0.0);
    let doppler = linspace(-2.0 / dt, 2.0 / dt, 1001);
    let surface = ambiguity_surface(&array, &seq, reference, &doppler, AngleAxis::Aoa, &[30f64.to_radians()]).unwrap();
    let mut worst = 0.0f64;
    for (i, &dnu) in doppler.iter().enumerate() {
        let x = PI * dnu * dt;
        let expected = if x.sin().abs() < 1e-12 {
            1.0
        } else {
            ((m as f64 * x).sin() / (m as f64 * x.sin())).abs()
        };
        worst = worst.max((surface.get(i, 0) - expected).abs());
    }
    check(worst <= 1e-9, format!("1001 points, max deviation {worst:.2e}"))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("1 broadening ratio", broadening_ratio),
        ("2 angular preservation", angular_preservation),
        ("3 CRLB oracle equivalence", crlb_equivalence),
        ("4 CRLB ordering", crlb_ordering),
        ("5 aliasing reproduction", aliasing),
        ("6 ambiguity properties", ambiguity_properties),
        ("7 annealing behavior", annealing),
        ("8 effective factor", effective_factor_check),
        ("9 Dirichlet oracle", dirichlet),
    ];
    let mut failed = Vec::new();
    for (name, run) in criteria {
        let outcome = panic::catch_unwind(run).unwrap_or_else(|e| {
            Err(e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panicked".into()))
        });
        match outcome {
            Ok(detail) => println!("PASS criterion {name}: {detail}"),
            Err(detail) => {
                failed.push(name);
                println!("FAIL criterion {name}: {detail}");
            }
        }
    }
    println!(
        "acceptance: {} of {} criteria passed{}",
        criteria.len() - failed.len(),
        criteria.len(),
        if failed.is_empty() {
            String::new()
        } else {
            format!("; failing: {}", failed.join(", "))
        }
    );
    let strict = std::env::var("SWSEQ_ACCEPTANCE_STRICT").is_ok_and(|v| v == "1");
    if strict && !failed.is_empty() {
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    }
}
