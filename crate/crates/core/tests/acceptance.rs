//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any
//! criterion fails.

use std::path::Path;
use std::time::{Duration, Instant};

use jscc::bounds::combined_outer;
use jscc::cognitive::{coexistence, inner_outer_gap, inner_region, RegionGrid};
use jscc::estimators::analog_params;
use jscc::mc::{simulate_linear_mmse, simulate_scheme_idealized, simulate_wz_mismatch, McConfig};
use jscc::mismatch::{
    design_allocation, digital_dpc_mismatch, hda_mismatch, mi_refinement_digital,
    mi_refinement_hda, mismatch_distortion, wz_mismatch_distortion, WzMismatchInputs,
};
use jscc::model::distortion_db;
use jscc::optimizer::{dominates, linspace, pareto_filter, ParetoPoint};
use jscc::schemes::{
    digital_dpc_distortion, hda_distortion, naive_dpc_distortion, optimize_scheme,
    uncoded_distortion,
};
use jscc::{Allocation, ChannelSpec, CognitiveConfig, Scheme, SourceModel};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(elapsed: Duration, limit_s: f64) -> Result<(), String> {
    check(elapsed.as_secs_f64() < limit_s, || {
        format!("took {:.2} s, limit {limit_s} s", elapsed.as_secs_f64())
    })
}

fn err(e: jscc::Error) -> String {
    e.to_string()
}

/// A valid random tuple from the ranges used by the randomized criteria.
fn random_tuple(rng: &mut ChaCha8Rng) -> (SourceModel, ChannelSpec, Allocation) {
    let model = SourceModel::new(
        rng.random_range(0.1..=10.0),
        rng.random_range(0.1..=10.0),
        rng.random_range(-0.99..=0.99),
    )
    .unwrap();
    let ch = ChannelSpec::new(rng.random_range(0.1..=100.0), 1.0).unwrap();
    let alloc = Allocation::for_channel(
        rng.random_range(0.0..=1.0),
        rng.random_range(0.0..=ch.p()),
        &ch,
    )
    .unwrap();
    (model, ch, alloc)
}

// ---------------------------------------------------------------------------

fn equivalence() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst: f64 = 0.0;
    for _ in 0..1000 {
        let (m, ch, a) = random_tuple(&mut rng);
        let sep = digital_dpc_distortion(&m, &ch, &a).map_err(err)?;
        let hda = hda_distortion(&m, &ch, &a).map_err(err)?;
        let rel = (sep - hda).abs() / sep.max(1e-12);
        check(rel <= 1e-9, || {
            format!("D_sep {sep:e} vs D_hda {hda:e} at {m:?} {ch:?} {a:?}")
        })?;
        worst = worst.max(rel);
    }
    within(start.elapsed(), 1.0)?;
    Ok(format!(
        "1000 tuples, worst relative gap {worst:.1e}, {:.3} s",
        start.elapsed().as_secs_f64()
    ))
}

fn endpoints() -> Outcome {
    let ch = ChannelSpec::new(10.0, 1.0).unwrap();
    let full = 1.0 / (1.0 + (10f64.sqrt() + 1.0).powi(2));
    let mut notes = Vec::new();
    for scheme in [Scheme::DigitalDpc, Scheme::Hda] {
        let d0 = optimize_scheme(&SourceModel::unit(0.0).unwrap(), &ch, scheme)
            .map_err(err)?
            .best
            .distortion;
        let d1 = optimize_scheme(&SourceModel::unit(1.0).unwrap(), &ch, scheme)
            .map_err(err)?
            .best
            .distortion;
        check((d0 - 1.0 / 11.0).abs() <= 1e-9, || {
            format!("{scheme} at rho=0: {d0:e}")
        })?;
        check((d1 - full).abs() <= 1e-6, || {
            format!("{scheme} at rho=1: {d1:e} vs {full:e}")
        })?;
        notes.push(format!(
            "{scheme}: {:.1e} / {:.1e}",
            (d0 - 1.0 / 11.0).abs(),
            (d1 - full).abs()
        ));
    }
    Ok(format!("errors at rho=0 / rho=1: {}", notes.join(", ")))
}

fn sandwich() -> Outcome {
    let start = Instant::now();
    let ch = ChannelSpec::new(10.0, 1.0).unwrap();
    let mut best_margin = f64::NEG_INFINITY;
    for rho in linspace(0.0, 1.0, 51) {
        let m = SourceModel::unit(rho).unwrap();
        let ob = combined_outer(&m, &ch);
        let cap = uncoded_distortion(&m, &ch)
            .map_err(err)?
            .min(naive_dpc_distortion(&m, &ch));
        for scheme in [Scheme::DigitalDpc, Scheme::Hda] {
            let d = optimize_scheme(&m, &ch, scheme)
                .map_err(err)?
                .best
                .distortion;
            check(ob <= d, || {
                format!("{scheme} at rho={rho}: outer {ob:e} > {d:e}")
            })?;
            check(d <= cap + 1e-12, || {
                format!("{scheme} at rho={rho}: {d:e} > min(uncoded, naive) {cap:e}")
            })?;
            if rho > 0.0 && rho < 1.0 {
                best_margin = best_margin.max(cap - d);
            }
        }
    }
    check(best_margin > 1e-6, || {
        format!("largest interior improvement {best_margin:e}")
    })?;
    within(start.elapsed(), 10.0)?;
    Ok(format!(
        "51 points, largest interior improvement {best_margin:.4e}, {:.2} s",
        start.elapsed().as_secs_f64()
    ))
}

fn monte_carlo() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2026);
    let mut zs = Vec::new();
    for i in 0..100u64 {
        let (m, ch, a) = random_tuple(&mut rng);
        let mc = McConfig::new(2_026_000 + i, 1_000_000).map_err(err)?;
        let d_star = analog_params(&m, &ch, &a).map_err(err)?.d_star;
        zs.push((
            "D*",
            simulate_linear_mmse(&m, &ch, &a, &mc)
                .map_err(err)?
                .z_score(d_star),
        ));
        let sep = digital_dpc_distortion(&m, &ch, &a).map_err(err)?;
        let e = simulate_scheme_idealized(&m, &ch, &a, Scheme::DigitalDpc, &mc).map_err(err)?;
        zs.push(("D_sep", e.z_score(sep)));
        let hda = hda_distortion(&m, &ch, &a).map_err(err)?;
        let e = simulate_scheme_idealized(&m, &ch, &a, Scheme::Hda, &mc).map_err(err)?;
        zs.push(("D_hda", e.z_score(hda)));
        // Side information improved by an actual noise below the design value.
        let better = ch
            .with_actual_noise(rng.random_range(0.1..=1.0) * ch.n_design())
            .map_err(err)?;
        let d_star_a = analog_params_actual(&m, &better, &a)?;
        let inp = WzMismatchInputs::new(d_star, d_star_a, sep.min(d_star)).map_err(err)?;
        let wz = wz_mismatch_distortion(&inp).distortion;
        zs.push(("wz", simulate_wz_mismatch(&inp, &mc).z_score(wz)));
    }
    // Each quantity contributes 100 values and gets its own allowance.
    let mut bands = Vec::new();
    for name in ["D*", "D_sep", "D_hda", "wz"] {
        let family: Vec<f64> = zs
            .iter()
            .filter(|(n, _)| *n == name)
            .map(|(_, z)| *z)
            .collect();
        let over4: Vec<f64> = family.iter().copied().filter(|z| *z > 4.0).collect();
        let in_band = family.iter().filter(|z| **z > 3.0 && **z <= 4.0).count();
        check(over4.is_empty(), || {
            format!("{name}: beyond 4 s.e.: {over4:?}")
        })?;
        check(in_band <= 2, || {
            format!("{name}: {in_band} of 100 values in (3, 4] s.e.")
        })?;
        bands.push(format!("{name} {in_band}"));
    }
    within(start.elapsed(), 120.0)?;
    let max = zs.iter().map(|(_, z)| *z).fold(0.0, f64::max);
    Ok(format!(
        "100 tuples x 4 quantities at n=1e6, values in (3,4] s.e.: {}, max z {max:.2}, {:.1} s",
        bands.join(", "),
        start.elapsed().as_secs_f64()
    ))
}

/// `D*` of the linear estimate at the actual noise of `ch`.
fn analog_params_actual(m: &SourceModel, ch: &ChannelSpec, a: &Allocation) -> Result<f64, String> {
    jscc::estimators::analog_params_at(m, ch.p(), a, ch.n_actual())
        .map(|p| p.d_star)
        .map_err(err)
}

fn mismatch() -> Outcome {
    let sweep = |design: &ChannelSpec, from_db: f64, to_db: f64, n: usize| -> Vec<ChannelSpec> {
        linspace(from_db, to_db, n)
            .into_iter()
            .map(|db| design.with_actual_snr_db(db).unwrap())
            .collect()
    };
    // (a) design 10 dB, actual in (10, 20] dB.
    let d10 = ChannelSpec::from_snr_db(1.0, 10.0).unwrap();
    for rho in [0.1, 0.5] {
        let m = SourceModel::unit(rho).unwrap();
        let a = design_allocation(&m, &d10).map_err(err)?;
        for ch in sweep(&d10, 10.0, 20.0, 65).into_iter().skip(1) {
            let (h, d) = (
                hda_mismatch(&m, &ch, &a).map_err(err)?,
                digital_dpc_mismatch(&m, &ch, &a).map_err(err)?,
            );
            check(h < d, || {
                format!(
                    "(a) rho={rho} at {:.2} dB: hda {h:e} >= digital {d:e}",
                    ch.actual_snr_db()
                )
            })?;
        }
    }
    // (b) design 0 dB: the better scheme depends on ρ.
    let d0 = ChannelSpec::from_snr_db(1.0, 0.0).unwrap();
    let mut wins = Vec::new();
    for rho in [0.1, 0.5] {
        let m = SourceModel::unit(rho).unwrap();
        let a = design_allocation(&m, &d0).map_err(err)?;
        let (mut hda_wins, mut digital_wins) = (0, 0);
        for ch in sweep(&d0, 0.0, 10.0, 65).into_iter().skip(1) {
            let (h, d) = (
                hda_mismatch(&m, &ch, &a).map_err(err)?,
                digital_dpc_mismatch(&m, &ch, &a).map_err(err)?,
            );
            hda_wins += usize::from(h < d);
            digital_wins += usize::from(d < h);
        }
        wins.push((rho, hda_wins, digital_wins));
    }
    check(wins[0].1 > 0, || {
        format!("(b) rho=0.1: hda never better {wins:?}")
    })?;
    check(wins[1].2 > 0, || {
        format!("(b) rho=0.5: digital never better {wins:?}")
    })?;
    // (c) monotone across the design point, matched value at the design point.
    for design in [&d0, &d10] {
        for rho in [0.1, 0.5] {
            let m = SourceModel::unit(rho).unwrap();
            let a = design_allocation(&m, design).map_err(err)?;
            let matched = digital_dpc_distortion(&m, design, &a).map_err(err)?;
            let db = design.design_snr_db();
            for scheme in [Scheme::DigitalDpc, Scheme::Hda] {
                let at_design = mismatch_distortion(&m, design, &a, scheme).map_err(err)?;
                check((at_design - matched).abs() <= 1e-9, || {
                    format!("(c) {scheme} rho={rho} design {db} dB: {at_design:e} vs matched {matched:e}")
                })?;
                let mut prev = f64::INFINITY;
                for ch in sweep(design, db - 10.0, db + 10.0, 81) {
                    let d = mismatch_distortion(&m, &ch, &a, scheme).map_err(err)?;
                    check(d <= prev, || {
                        format!(
                            "(c) {scheme} rho={rho} rises at {:.2} dB: {d:e} > {prev:e}",
                            ch.actual_snr_db()
                        )
                    })?;
                    prev = d;
                }
            }
        }
    }
    Ok(format!(
        "(a) hda better on 64 points for rho 0.1, 0.5; (b) design 0 dB grid points won by hda/digital: rho 0.1 {}/{}, rho 0.5 {}/{}; (c) monotone on 81 points",
        wins[0].1, wins[0].2, wins[1].1, wins[1].2
    ))
}

fn mutual_information() -> Outcome {
    let m = SourceModel::unit(0.0).unwrap();
    let pa_grid = linspace(0.0, 1.0, 64);
    let mut worst: f64 = 0.0;
    for db in [0.0, 10.0] {
        let ch = ChannelSpec::from_snr_db(1.0, db).unwrap();
        for &pa in &pa_grid {
            let a = Allocation::for_channel(1.0, pa, &ch).map_err(err)?;
            let d = digital_dpc_distortion(&m, &ch, &a).map_err(err)?;
            let (t, u) = (
                mi_refinement_digital(&m, &ch, &a, d).map_err(err)?,
                mi_refinement_hda(&m, &ch, &a).map_err(err)?,
            );
            check((t - u).abs() <= 1e-9, || {
                format!("{db} dB, pa={pa}: {t} vs {u}")
            })?;
            worst = worst.max((t - u).abs());
        }
    }
    let design = ChannelSpec::from_snr_db(1.0, 10.0).unwrap();
    let ch = design.with_actual_snr_db(15.0).unwrap();
    let mut exceptions = Vec::new();
    for &pa in &pa_grid {
        let a = Allocation::for_channel(1.0, pa, &design).map_err(err)?;
        let d = digital_dpc_distortion(&m, &design, &a).map_err(err)?;
        let (t, u) = (
            mi_refinement_digital(&m, &ch, &a, d).map_err(err)?,
            mi_refinement_hda(&m, &ch, &a).map_err(err)?,
        );
        if u <= t {
            exceptions.push(pa);
        }
    }
    check(exceptions.iter().all(|&pa| pa > 0.9), || {
        format!("I(V;U|Y) <= I(V;T|Y) at pa {exceptions:?}")
    })?;
    Ok(format!(
        "matched gap {worst:.1e} over 2x64 points; at 15 dB hda carries more except at pa {exceptions:?}"
    ))
}

fn weak_frontier() -> Outcome {
    let start = Instant::now();
    let grid = RegionGrid::default();
    let cfg = |rho: f64| CognitiveConfig::new(1.0, 1.0, 0.5, 0.5, rho).unwrap();

    let c0 = cfg(0.0);
    let inner = inner_region(&c0, &grid).map_err(err)?;
    let end = inner
        .points
        .iter()
        .map(|p| p.d2)
        .fold(f64::INFINITY, f64::min);
    // D_ob2 with the whole secondary power private: σ²/(1 + P_2).
    check((end - 0.5).abs() <= 1e-6, || {
        format!("unconstrained end D2 {end:e} vs 0.5")
    })?;
    let gap0 = inner_outer_gap(&c0, &inner, &grid).map_err(err)?;
    check(gap0.abs() <= 1e-6, || format!("gap at rho=0: {gap0:e}"))?;

    let mut gaps = Vec::new();
    for rho in [0.25, 0.5] {
        let c = cfg(rho);
        let inner = inner_region(&c, &grid).map_err(err)?;
        gaps.push(inner_outer_gap(&c, &inner, &grid).map_err(err)?);
    }
    check(gaps[0] > 0.0 && gaps[1] > gaps[0], || {
        format!("gaps {gaps:?}")
    })?;
    within(start.elapsed(), 30.0)?;
    Ok(format!(
        "gap {gap0:.1e} at rho=0, {:.4} at 0.25, {:.4} at 0.5, {:.1} s",
        gaps[0],
        gaps[1],
        start.elapsed().as_secs_f64()
    ))
}

fn coexistence_gain() -> Outcome {
    let grid = RegionGrid::default();
    let run = |h: f64, rho: f64| {
        coexistence(&CognitiveConfig::new(1.0, 1.0, h, h, rho).unwrap(), &grid).map_err(err)
    };
    let (w0, w5) = (run(0.5, 0.0)?, run(0.5, 0.5)?);
    let (s0, s5) = (run(1.5, 0.0)?, run(1.5, 0.5)?);
    check((w0.achievable - w0.outer).abs() <= 1e-6, || {
        format!("weak rho=0: {} vs {}", w0.achievable, w0.outer)
    })?;
    check(s0.achievable > s0.outer, || {
        format!("very strong rho=0: {} vs {}", s0.achievable, s0.outer)
    })?;
    let gain = |a: f64, b: f64| distortion_db(b) - distortion_db(a);
    let (gw, gs) = (
        gain(w0.achievable, w5.achievable),
        gain(s0.achievable, s5.achievable),
    );
    check(gs > gw, || {
        format!("SDR gain very strong {gs:.4} dB <= weak {gw:.4} dB")
    })?;
    Ok(format!(
        "weak rho=0 gap {:.1e}; SDR gain to rho=0.5: weak {gw:.3} dB, very strong {gs:.3} dB",
        (w0.achievable - w0.outer).abs()
    ))
}

fn pareto() -> Outcome {
    let start = Instant::now();
    for seed in 0..20u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(900 + seed);
        let mut points: Vec<ParetoPoint<usize>> = (0..10_000)
            .map(|i| ParetoPoint {
                d1: rng.random_range(0.0..1.0),
                d2: rng.random_range(0.0..1.0),
                payload: i,
            })
            .collect();
        // Exact ties and duplicates.
        for i in 0..200 {
            let j = rng.random_range(0..points.len());
            let (d1, d2) = (points[j].d1, points[j].d2);
            points[i] = ParetoPoint {
                d1,
                d2: if i % 2 == 0 { d2 } else { points[i].d2 },
                payload: i,
            };
        }
        let mut expected: Vec<usize> = points
            .iter()
            .filter(|p| !points.iter().any(|q| dominates(q, p)))
            .map(|p| p.payload)
            .collect();
        let mut got: Vec<usize> = pareto_filter(points)
            .into_iter()
            .map(|p| p.payload)
            .collect();
        expected.sort_unstable();
        got.sort_unstable();
        check(got == expected, || {
            format!(
                "seed {seed}: {} kept vs {} expected",
                got.len(),
                expected.len()
            )
        })?;
    }
    within(start.elapsed(), 5.0)?;
    Ok(format!(
        "20 seeds x 10^4 points, {:.2} s",
        start.elapsed().as_secs_f64()
    ))
}

fn reproducibility() -> Outcome {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures");
    let commands = std::fs::read_to_string(dir.join("commands.txt")).map_err(|e| e.to_string())?;
    let mut count = 0;
    for line in commands
        .lines()
        .filter(|l| !l.trim().is_empty() && !l.starts_with('#'))
    {
        let (file, args) = line
            .split_once(": ")
            .ok_or_else(|| format!("bad line {line}"))?;
        let fresh = jscc::cli::render(std::iter::once("jscc").chain(args.split_whitespace()))
            .map_err(|e| format!("{file}: {}", e.line()))?;
        let stored = std::fs::read_to_string(dir.join(file)).map_err(|e| format!("{file}: {e}"))?;
        check(fresh == stored, || {
            format!("{file} differs from a fresh run")
        })?;
        count += 1;
    }
    check(count > 0, || "no fixtures listed".into())?;
    Ok(format!("{count} fixture files byte-identical"))
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 10] = [
        ("equivalence of digital DPC and HDA", equivalence),
        ("endpoint tightness", endpoints),
        ("sandwich on the correlation sweep", sandwich),
        ("Monte-Carlo agreement", monte_carlo),
        ("SNR mismatch behavior", mismatch),
        ("refinement information coincidence", mutual_information),
        ("weak-regime frontier", weak_frontier),
        ("coexistence", coexistence_gain),
        ("Pareto filter oracle", pareto),
        ("fixture reproducibility", reproducibility),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        match f() {
            Ok(detail) => println!("PASS {:>2} {name}: {detail}", i + 1),
            Err(reason) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {reason}", i + 1);
            }
        }
    }
    println!(
        "{}/{} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
