// Copyright 2026 The pinch Developers
// SPDX-License-Identifier: Apache-2.0

//! End-to-end acceptance checks. Prints one `PASS`/`FAIL` line per criterion.
//!
//! Criteria listed in `KNOWN_MISSES` still run and still print `FAIL`; they
//! do not fail the process. A miss outside that list, or an unexpected pass
//! of a listed one, does.

use std::process::ExitCode;
use std::time::Instant;

use pinch::experiments::{oracle_checks, ExperimentConfig, Task};
use pinch::mermin::{mermin_repeats, mermin_scan, ScanPoint};
use pinch::rng::SampleStream;
use pinch::sampler::{transform_generic, transform_ghz, transform_w, Sampler};
use pinch::tensor::{ghz_amplitudes, ghz_tensor, w_amplitudes, w_tensor, SymmetricTensor};
use pinch::tomography::{fidelity_with_uncertainty, tomography_fidelity};
use pinch::Result;

const SEED: u64 = 20240601;
const SAMPLES: u64 = 1 << 20;

/// Shape scans average four repeats of this many samples per setting.
const SHAPE_SAMPLES: u64 = 1 << 16;
const SHAPE_REPEATS: usize = 4;

const KNOWN_MISSES: &[&str] = &["mermin scan gamma=0.5 peak", "fidelity curve W peak >= GHZ peak"];

struct Report {
    lines: Vec<(String, bool)>,
}

impl Report {
    fn check(&mut self, name: &str, pass: bool, detail: String) {
        let tag = match (pass, KNOWN_MISSES.contains(&name)) {
            (true, _) => "PASS",
            (false, false) => "FAIL",
            (false, true) => "FAIL (known)",
        };
        println!("{tag:<12} {name}: {detail}");
        self.lines.push((name.to_string(), pass));
    }

    fn ok(&self) -> bool {
        self.lines.iter().all(|(name, pass)| *pass != KNOWN_MISSES.contains(&name.as_str()))
    }
}

fn within(x: f64, lo: f64, hi: f64) -> bool {
    (lo..=hi).contains(&x)
}

fn ghz3_fidelity(rep: &mut Report) -> Result<()> {
    let t = ghz_tensor(3, 0.6, 0.0)?;
    let (f, table) = tomography_fidelity(&t, 2.0, SAMPLES, &SampleStream::new(SEED), &ghz_amplitudes(3, 0.0))?;
    rep.check(
        "GHZ n=3 tomography fidelity",
        within(f, 0.89, 0.97),
        format!("F = {f:.4} in [0.89, 0.97], {} coincidences", table.total_coincidences()),
    );
    Ok(())
}

fn photon_scan(rep: &mut Report) -> Result<()> {
    let bands = [(2, 0.95, 1.01), (3, 0.89, 0.97), (4, 0.70, 0.80), (5, 0.55, 0.67)];
    let stream = SampleStream::new(SEED);
    let mut pass = true;
    let mut detail = Vec::new();
    for (n, lo, hi) in bands {
        let t = ghz_tensor(n, 0.6, 0.0)?;
        let (f, _) = tomography_fidelity(&t, 2.0, SAMPLES, &stream.substream(n as u64), &ghz_amplitudes(n, 0.0))?;
        pass &= within(f, lo, hi);
        detail.push(format!("F{n} = {f:.4} in [{lo}, {hi}]"));
    }
    rep.check("photon-number scan", pass, detail.join(", "));
    Ok(())
}

struct Curve {
    rs: Vec<f64>,
    f: Vec<f64>,
    /// Standard error of each mean.
    se: Vec<f64>,
}

impl Curve {
    fn argmax(&self) -> usize {
        (0..self.f.len()).max_by(|&i, &j| self.f[i].total_cmp(&self.f[j])).expect("nonempty")
    }

    /// Largest rise against the peak direction, in units of combined standard error.
    fn unimodal_violation(&self) -> f64 {
        let k = self.argmax();
        let mut worst: f64 = 0.0;
        for i in 0..self.f.len() {
            for j in i + 1..self.f.len() {
                // before the peak F should not fall; after it, not rise
                let drop = if j <= k { self.f[i] - self.f[j] } else if i >= k { self.f[j] - self.f[i] } else { 0.0 };
                let se = (self.se[i].powi(2) + self.se[j].powi(2)).sqrt();
                worst = worst.max(drop / se);
            }
        }
        worst
    }
}

fn fidelity_curve(state: &str, gamma: f64, grid: &[f64], stream: &SampleStream) -> Result<Curve> {
    let mut c = Curve { rs: vec![], f: vec![], se: vec![] };
    for (k, &r) in grid.iter().enumerate() {
        let (t, target): (SymmetricTensor, _) = match state {
            "GHZ" => (ghz_tensor(3, r, 0.0)?, ghz_amplitudes(3, 0.0)),
            _ => (w_tensor(3, r, &[0.0, 0.0])?, w_amplitudes(3, &[0.0, 0.0])),
        };
        // points without coincidences carry no information on the shape
        if let Ok((f, s, _)) = fidelity_with_uncertainty(&t, gamma, SHAPE_SAMPLES, SHAPE_REPEATS, &stream.substream(k as u64), &target) {
            c.rs.push(r);
            c.f.push(f);
            c.se.push(s / (SHAPE_REPEATS as f64).sqrt());
        }
    }
    Ok(c)
}

fn fidelity_shape(rep: &mut Report) -> Result<()> {
    let gammas = [0.5, 1.0, 1.5, 2.0];
    let grid: Vec<f64> = (1..=12).map(|k| 0.2 * k as f64).collect();
    let stream = SampleStream::new(SEED);
    let mut peaks = Vec::new();
    for (s, state) in ["GHZ", "W"].into_iter().enumerate() {
        let mut curves = Vec::new();
        for (g, &gamma) in gammas.iter().enumerate() {
            curves.push(fidelity_curve(state, gamma, &grid, &stream.substream((4 * s + g) as u64))?);
        }
        let worst = curves.iter().map(Curve::unimodal_violation).fold(0.0, f64::max);
        rep.check(
            &format!("fidelity curve {state} unimodal"),
            worst < 3.0,
            format!("largest counter-trend step {worst:.2} standard errors (< 3)"),
        );
        let argmax: Vec<f64> = curves.iter().map(|c| c.rs[c.argmax()]).collect();
        let peak: Vec<(f64, f64)> = curves.iter().map(|c| (c.f[c.argmax()], c.se[c.argmax()])).collect();
        let r_falls = argmax.windows(2).all(|w| w[1] <= w[0]) && argmax[3] < argmax[0];
        let f_rises = peak.windows(2).all(|w| w[1].0 > w[0].0);
        rep.check(
            &format!("fidelity curve {state} peak trend"),
            r_falls && f_rises,
            format!(
                "argmax r {:?}, peak F [{}]",
                argmax.iter().map(|r| (r * 100.0).round() / 100.0).collect::<Vec<_>>(),
                peak.iter().map(|p| format!("{:.4}", p.0)).collect::<Vec<_>>().join(", ")
            ),
        );
        peaks.push(peak);
    }
    let (ghz, w) = (&peaks[0], &peaks[1]);
    let fails: Vec<String> = gammas
        .iter()
        .zip(ghz.iter().zip(w))
        .filter(|(_, (g, w))| w.0 < g.0)
        .map(|(gamma, (g, w))| format!("gamma={gamma}: W {:.4} < GHZ {:.4}", w.0, g.0))
        .collect();
    rep.check(
        "fidelity curve W peak >= GHZ peak",
        fails.is_empty(),
        if fails.is_empty() { "at every gamma".into() } else { fails.join(", ") },
    );
    Ok(())
}

fn mermin_table(rep: &mut Report) -> Result<()> {
    let rows = [(3, 0.6, 2.3, 3.45, 3.75), (4, 0.9, 0.6, 4.44, 4.64), (5, 0.5, 1.0, 5.17, 5.37)];
    let stream = SampleStream::new(SEED);
    let mut pass = true;
    let mut detail = Vec::new();
    for (k, (n, r, gamma, lo, hi)) in rows.into_iter().enumerate() {
        let s = mermin_repeats(&ghz_tensor(n, r, 0.0)?, gamma, SAMPLES, 20, &stream.substream(k as u64))?;
        pass &= within(s.mean, lo, hi);
        detail.push(format!("M{n} = {:.3} +- {:.3} in [{lo}, {hi}]", s.mean, s.stddev));
    }
    rep.check("Mermin n=3,4,5 values", pass, detail.join(", "));
    Ok(())
}

/// Interpolated values of `r` where `M` crosses the classical bound, first and last.
fn window(points: &[(f64, f64)], bound: f64) -> Option<(f64, f64)> {
    let cross = |i: usize| {
        let ((r0, m0), (r1, m1)) = (points[i], points[i + 1]);
        r0 + (bound - m0) * (r1 - r0) / (m1 - m0)
    };
    let ups: Vec<usize> = (0..points.len() - 1).filter(|&i| points[i].1 <= bound && points[i + 1].1 > bound).collect();
    let downs: Vec<usize> = (0..points.len() - 1).filter(|&i| points[i].1 > bound && points[i + 1].1 <= bound).collect();
    Some((cross(*ups.first()?), cross(*downs.last()?)))
}

fn mermin_scans(rep: &mut Report) -> Result<()> {
    let grid: Vec<f64> = (0..=40).map(|k| 0.2 + 0.05 * k as f64).collect();
    let cases = [(0.5, 3.11, 1.0, (0.55, 1.64)), (1.0, 2.97, 0.7, (0.3, 1.51))];
    let stream = SampleStream::new(SEED);
    for (g, (gamma, peak_m, peak_r, (lo, hi))) in cases.into_iter().enumerate() {
        let scan = mermin_scan(|r| ghz_tensor(3, r, 0.0), &grid, gamma, SAMPLES, 1, &stream.substream(g as u64))?;
        let points: Vec<(f64, f64)> = scan
            .iter()
            .filter_map(|ScanPoint { r, result }| result.as_ref().ok().map(|s| (*r, s.mean)))
            .collect();
        let &(r_at, m) = points.iter().max_by(|a, b| a.1.total_cmp(&b.1)).expect("scan has values");
        rep.check(
            &format!("mermin scan gamma={gamma} peak"),
            (m - peak_m).abs() <= 0.15 && (r_at - peak_r).abs() <= 0.15,
            format!("max M3 = {m:.3} at r = {r_at:.2}; want {peak_m} +- 0.15 at r = {peak_r} +- 0.15"),
        );
        let w = window(&points, 2.0);
        let pass = w.is_some_and(|(a, b)| (a - lo).abs() <= 0.15 && (b - hi).abs() <= 0.15);
        rep.check(
            &format!("mermin scan gamma={gamma} window"),
            pass,
            match w {
                Some((a, b)) => format!("M3 > 2 on ({a:.3}, {b:.3}); want ({lo}, {hi}) +- 0.15"),
                None => "no violation window".into(),
            },
        );
    }
    Ok(())
}

fn oracles(rep: &mut Report) -> Result<()> {
    let checks = oracle_checks(&ExperimentConfig::new(Task::OracleCheck))?;
    let failed: Vec<&str> = checks.iter().filter(|c| !c.pass).map(|c| c.name.as_str()).collect();
    rep.check(
        "oracle suite",
        failed.is_empty(),
        if failed.is_empty() { format!("{} checks pass", checks.len()) } else { format!("failed: {}", failed.join("; ")) },
    );
    Ok(())
}

fn sampler_stats(rep: &mut Report) -> Result<()> {
    let stream = SampleStream::new(SEED);
    let draws = 1_000_000u64;
    let mean = (0..draws)
        .map(|i| stream.realization_rng(i).vacuum_amplitude().norm_sqr())
        .sum::<f64>()
        / draws as f64;
    rep.check("sampler E|a|^2", (mean - 0.5).abs() <= 0.002, format!("{mean:.5} over {draws} draws (0.5 +- 0.002)"));

    let mut worst: f64 = 0.0;
    for (k, n) in [3usize, 4].into_iter().enumerate() {
        let mut rng = stream.substream(100 + k as u64).realization_rng(0);
        let r = 0.2 + 1.3 * rng.uniform();
        let theta = std::f64::consts::TAU * rng.uniform();
        let thetas: Vec<f64> = (0..n - 1).map(|_| std::f64::consts::TAU * rng.uniform()).collect();
        let ghz = ghz_tensor(n, r, theta)?;
        let w = w_tensor(n, r, &thetas)?;
        let sampler = Sampler::new(&ghz);
        for z in sampler.realizations(&stream.substream(200 + k as u64), 10_000) {
            let pairs = [
                (transform_generic(&ghz, &z.a)?, transform_ghz(n, r, theta, &z.a)?),
                (transform_generic(&w, &z.a)?, transform_w(n, r, &thetas, &z.a)?),
            ];
            for (g, s) in pairs {
                for (x, y) in g.iter().zip(&s) {
                    worst = worst.max((x - y).norm());
                }
            }
        }
    }
    rep.check(
        "sampler generic vs specialized",
        worst <= 1e-12,
        format!("max |diff| = {worst:.2e} over 10^4 realizations, GHZ and W, n = 3, 4"),
    );
    Ok(())
}

fn main() -> ExitCode {
    let mut rep = Report { lines: Vec::new() };
    let stages: [(&str, fn(&mut Report) -> Result<()>); 7] = [
        ("oracles", oracles),
        ("sampler", sampler_stats),
        ("GHZ n=3 fidelity", ghz3_fidelity),
        ("photon scan", photon_scan),
        ("Mermin table", mermin_table),
        ("mermin scans", mermin_scans),
        ("fidelity curves", fidelity_shape),
    ];
    for (name, stage) in stages {
        let t0 = Instant::now();
        if let Err(e) = stage(&mut rep) {
            rep.check(name, false, format!("error: {e}"));
        }
        eprintln!("  [{name}: {:.1?}]", t0.elapsed());
    }
    if rep.ok() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
