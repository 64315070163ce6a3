//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

use std::collections::BTreeMap;
use std::time::Instant;

use cscp_core::fixtures;
use cscp_core::io::{replay_session, to_canonical_string};
use cscp_core::metrics::{relative_metrics, response_time_table, CostCoefficients};
use cscp_core::operator::{
    classify_ops, random_scenario, run_scenario, workload_ratio, Measure, OpClass, SessionLog, TimeModelParams,
};
use cscp_core::panel::{
    render_indicators, ExpectedStates, Family, Geometry, PanelSpec, PanelState, PlantState, Switch,
};
use cscp_core::synthesis::{lint_autonomy, synthesize_hierarchy, synthesize_matrix, synthesize_matrix_with_select};

type Outcome = Result<String, String>;

fn check(cond: bool, ok: String, fail: String) -> Outcome {
    if cond {
        Ok(ok)
    } else {
        Err(fail)
    }
}

/// Exhaustive over s; for each s every even b is tried upward until the
/// geometry first covers n (larger b only add controls).
fn matrix_oracle(n: usize) -> (usize, usize) {
    let mut best = (usize::MAX, usize::MAX);
    for s in 1..=2 * n {
        let mut b = 2;
        while s * (b / 2) < n {
            b += 2;
        }
        best = best.min((s + b, s.abs_diff(b)));
    }
    best
}

fn matrix_synthesis() -> Outcome {
    let start = Instant::now();
    let results: Vec<_> = (1..=500).map(|n| synthesize_matrix(n, true)).collect();
    let elapsed = start.elapsed().as_secs_f64();
    for (i, g) in results.into_iter().enumerate() {
        let n = i + 1;
        let g = g.map_err(|e| format!("n={n}: {e}"))?;
        let want = matrix_oracle(n);
        if g.capacity < n || (g.total_controls, g.s.abs_diff(g.b)) != want {
            return Err(format!("n={n}: got s={} b={}, oracle (controls, |s-b|) = {want:?}", g.s, g.b));
        }
    }
    check(
        elapsed < 5.0,
        format!("n=1..=500 match oracle, square-tie rule holds, {elapsed:.3}s"),
        format!("too slow: {elapsed:.3}s"),
    )
}

fn hierarchy_synthesis() -> Outcome {
    const N: usize = 5000;
    let mut best = vec![0usize; N + 1];
    for n in 2..=N {
        best[n] = (2..n).map(|f| f + best[n.div_ceil(f)]).fold(n, usize::min);
    }
    let start = Instant::now();
    let mut counts = BTreeMap::new();
    for n in 1..=N {
        let p = synthesize_hierarchy(n, None).map_err(|e| format!("n={n}: {e}"))?;
        if p.total_keys != best[n] {
            return Err(format!("n={n}: sum {} != oracle {}", p.total_keys, best[n]));
        }
        if let Some(f) = p.branching.iter().find(|f| !(2..=4).contains(*f)) {
            return Err(format!("n={n}: factor {f} outside 2..=4"));
        }
        for &f in &p.branching {
            *counts.entry(f).or_insert(0usize) += 1;
        }
    }
    let elapsed = start.elapsed().as_secs_f64();
    let c = |f| counts.get(&f).copied().unwrap_or(0);
    let detail = format!("3:{} vs 2+4:{} ({}+{}), {elapsed:.3}s", c(3), c(2) + c(4), c(2), c(4));
    check(c(3) > c(2) + c(4) && elapsed < 30.0, detail.clone(), detail)
}

fn soyuz_geometry() -> Outcome {
    let g = synthesize_matrix_with_select(192, 16, true).map_err(|e| e.to_string())?;
    let detail = format!("s={} b={} pairs={} capacity={}", g.s, g.b, g.b / 2, g.capacity);
    check(g.b == 24 && g.capacity >= 192, detail.clone(), detail)
}

fn run_fixture(panel: &str, plant: &str, scenario: &str) -> Result<SessionLog, String> {
    run_scenario(
        &fixtures::panel(panel).ok_or("missing panel")?,
        &fixtures::plant(plant).ok_or("missing plant")?,
        &fixtures::scenario(scenario).ok_or("missing scenario")?,
        &TimeModelParams::default(),
    )
    .map_err(|e| e.to_string())
}

fn workload_ratios() -> Outcome {
    let checking: Vec<SessionLog> = ["csd-r", "csf-16", "conv-192"]
        .iter()
        .map(|p| run_fixture(p, "soyuz-7k", "checking-run"))
        .collect::<Result<_, _>>()?;
    let auto: Vec<SessionLog> = ["csd-r", "csf-16", "conv-192"]
        .iter()
        .map(|p| run_fixture(p, "soyuz-7k-auto", "auto-mode-16"))
        .collect::<Result<_, _>>()?;
    let r = |a: &SessionLog, b: &SessionLog| workload_ratio(a, b, Measure::Load).map_err(|e| e.to_string());
    let vals = [
        ("checking mm/me", r(&checking[0], &checking[1])?, 1.15, 1.35),
        ("auto mm/me", r(&auto[0], &auto[1])?, 2.0, 3.0),
        ("checking mm/mc", r(&checking[0], &checking[2])?, 1.5, 1.7),
        ("auto mm/mc", r(&auto[0], &auto[2])?, 4.0, 5.0),
    ];
    let o_share = classify_ops(&auto[0]).share(OpClass::O);
    let mut detail: Vec<String> = vals.iter().map(|(n, v, _, _)| format!("{n}={v:.3}")).collect();
    detail.push(format!("O-share={:.1}%", 100.0 * o_share));
    let ok = vals.iter().all(|&(_, v, lo, hi)| (lo..=hi).contains(&v)) && (o_share - 0.61).abs() <= 0.05;
    check(ok, detail.join(" "), detail.join(" "))
}

fn o_loop_absence() -> Outcome {
    let plant = fixtures::plant("soyuz-7k-auto").ok_or("missing plant")?;
    let params = TimeModelParams::default();
    let panels = [fixtures::panel("csf-16").unwrap(), fixtures::panel("conv-192").unwrap()];
    let mut logs = 0;
    for seed in 0..200u64 {
        let sc = random_scenario(seed, &plant, 20);
        for spec in &panels {
            let log = run_scenario(spec, &plant, &sc, &params).map_err(|e| format!("seed {seed}: {e}"))?;
            if log.entries.iter().any(|e| e.op_class == OpClass::O) {
                return Err(format!("seed {seed}: O-class entry on {}", spec.id));
            }
            logs += 1;
        }
    }
    Ok(format!("200 scenarios, {logs} expanded-field logs, zero O-class entries"))
}

fn response_parity() -> Outcome {
    let plant = fixtures::plant("std-81").ok_or("missing plant")?;
    let tasks = fixtures::scenario("std-tasks").ok_or("missing scenario")?.steps;
    let panels: Vec<(PanelSpec, PlantState)> = ["me-81", "mm-81", "addr-81"]
        .iter()
        .map(|id| (fixtures::panel(id).unwrap(), plant.clone()))
        .collect();
    let table = response_time_table(&panels, &tasks, &TimeModelParams::default()).map_err(|e| e.to_string())?;
    let within = |a: f64, b: f64| (a - b).abs() <= 0.1 * a.min(b);
    let mut worst = (0.0f64, 0.0f64);
    for row in &table.rows {
        let (me, mm, addr) = (row.seconds[0], row.seconds[1], row.seconds[2]);
        if !within(me, mm) || !within(addr, me) || !within(addr, mm) {
            return Err(format!("{:?}: me={me:.3} mm={mm:.3} addr={addr:.3}", row.task));
        }
        worst.0 = worst.0.max((me - mm).abs() / me.min(mm));
        worst.1 = worst.1.max((addr - me.min(mm)).abs() / addr.min(me.min(mm)));
    }
    Ok(format!(
        "{} tasks; worst me/mm gap {:.1}%, worst address/matrix gap {:.1}%",
        table.rows.len(),
        100.0 * worst.0,
        100.0 * worst.1
    ))
}

fn metrics_ordinal() -> Outcome {
    let specs: Vec<PanelSpec> = ["conv-192", "csf-16", "csd-r"]
        .iter()
        .map(|id| fixtures::panel(id).unwrap())
        .collect();
    let rows = relative_metrics(&specs, 192, "csd-r", &CostCoefficients::default()).map_err(|e| e.to_string())?;
    let mm = rows.iter().find(|r| r.family == Family::MatrixMatrix).ok_or("no matrix-matrix row")?;
    let names = ["nprkl", "nprsl", "g", "s_area", "w"];
    for r in &rows {
        for (i, (a, b)) in r.relative().iter().zip(mm.relative()).enumerate() {
            if *a < b {
                return Err(format!("{} beats matrix-matrix on {}", r.spec_id, names[i]));
            }
        }
    }
    let detail = rows
        .iter()
        .map(|r| {
            let v = r.relative();
            format!("{}=[{:.2} {:.2} {:.2} {:.2} {:.2}]", r.spec_id, v[0], v[1], v[2], v[3], v[4])
        })
        .collect::<Vec<_>>()
        .join(" ");
    Ok(detail)
}

fn determinism() -> Outcome {
    let plant = fixtures::plant("soyuz-7k-auto").ok_or("missing plant")?;
    let params = TimeModelParams::default();
    let panels = [
        fixtures::panel("csd-r").unwrap(),
        fixtures::panel("csf-16").unwrap(),
        fixtures::panel("conv-192").unwrap(),
    ];
    for seed in 0..100u64 {
        let sc = random_scenario(1000 + seed, &plant, 16);
        let spec = &panels[seed as usize % panels.len()];
        let a = run_scenario(spec, &plant, &sc, &params).map_err(|e| e.to_string())?;
        let b = run_scenario(spec, &plant, &sc, &params).map_err(|e| e.to_string())?;
        if to_canonical_string(&a).unwrap() != to_canonical_string(&b).unwrap() {
            return Err(format!("seed {seed}: logs differ"));
        }
    }
    for (name, text) in fixtures::SESSIONS {
        let v = replay_session(text).map_err(|e| format!("{name}: {e}"))?;
        if !v.ok() {
            return Err(format!("{name}: {v:?}"));
        }
    }
    Ok(format!("100 scenarios byte-identical, {} shipped sessions replay identically", fixtures::SESSIONS.len()))
}

fn dark_screen() -> Outcome {
    let mut states = 0usize;
    for k in 1..=10usize {
        let nominal = PlantState::uniform("p", 1, k);
        let mut spec = PanelSpec::new(
            "me",
            Family::MatrixExpanded,
            Geometry::Matrix {
                select_buttons: 1,
                command_buttons: 2 * k,
            },
        );
        spec.dark_screen_capable = true;
        // Nominal pattern: alternate on/off so both deviation directions occur.
        let expected: ExpectedStates = nominal.units().map(|u| (u, Switch::from_on(u.unit % 2 == 0))).collect();
        let panel = PanelState::power_on(spec, &nominal);
        for mask in 0u32..(1 << k) {
            let mut plant = nominal.clone();
            for (i, unit) in plant.systems[0].units.iter_mut().enumerate() {
                unit.state = Switch::from_on(mask & (1 << i) != 0);
            }
            let lit = render_indicators(&panel, &plant, Some(&expected))
                .map_err(|e| e.to_string())?
                .lit_cells();
            let deviating = (0..k).filter(|&i| (mask & (1 << i) != 0) != (i % 2 == 0)).collect();
            if lit != deviating {
                return Err(format!("k={k} mask={mask:b}: lit {lit:?} != deviating {deviating:?}"));
            }
            states += 1;
        }
    }
    Ok(format!("{states} plant states over k=1..=10"))
}

fn lint_corpus() -> Outcome {
    let cases = fixtures::lint_cases();
    let clean = cases.iter().filter(|c| c.expected_violations == 0).count();
    if cases.len() != 20 || clean != 10 {
        return Err(format!("{} cases, {clean} clean", cases.len()));
    }
    for c in &cases {
        let n = lint_autonomy(&c.plant, &c.layout, &c.functions)
            .map_err(|e| format!("{}: {e}", c.id))?
            .violations
            .len();
        if n != c.expected_violations {
            return Err(format!("{}: {n} violations, expected {}", c.id, c.expected_violations));
        }
    }
    Ok("20 fixtures, exact violation counts".to_string())
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("matrix-synthesis-oracle", matrix_synthesis),
        ("hierarchy-oracle-branching-3", hierarchy_synthesis),
        ("soyuz-csd-geometry", soyuz_geometry),
        ("workload-ratios", workload_ratios),
        ("o-loop-absence", o_loop_absence),
        ("response-time-parity", response_parity),
        ("metrics-row-minimum", metrics_ordinal),
        ("determinism-replay", determinism),
        ("dark-screen-soundness", dark_screen),
        ("autonomy-lint-corpus", lint_corpus),
    ];
    let mut failed = 0;
    for (name, f) in criteria {
        match f() {
            Ok(detail) => println!("PASS {name}: {detail}"),
            Err(detail) => {
                failed += 1;
                println!("FAIL {name}: {detail}");
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
