//! Link-level statistical checks on short sweeps.

use cpjam::harness::{sweep, sweep_blocks, Scenario, SimResult, SubspaceMode};
use cpjam::jammer::JammerMode;

fn base(mode: JammerMode, d: usize, snr: Vec<f64>, blocks: u64) -> Scenario {
    Scenario {
        id: "link".into(),
        null_dims: d,
        snr_grid_db: snr,
        blocks,
        seed: 11,
        ..Scenario::default()
    }
    .with_jammer_mode(mode)
    .resolved()
    .unwrap()
}

/// Batch means over `batches` disjoint block ranges: (mean BER, standard error).
fn ber_with_se(sc: &Scenario, batches: u64) -> (SimResult, Vec<f64>) {
    let per = sc.blocks / batches;
    let mut total = SimResult::empty(sc);
    let mut runs = Vec::new();
    for b in 0..batches {
        let r = sweep_blocks(sc, b * per..(b + 1) * per).unwrap();
        total.merge(&r).unwrap();
        runs.push(r.bers());
    }
    let n = batches as f64;
    let se = (0..sc.snr_grid_db.len())
        .map(|i| {
            let m = runs.iter().map(|v| v[i]).sum::<f64>() / n;
            (runs.iter().map(|v| (v[i] - m).powi(2)).sum::<f64>() / (n - 1.0) / n).sqrt()
        })
        .collect();
    (total, se)
}

#[test]
fn compliant_null_equals_smaller_jammerless_array() {
    // Nulling one dimension leaves a 7-antenna link with the same noise
    // level; the SNR label differs because it is normalized by B.
    let snr8 = -3.0;
    let snr7 = snr8 + 10.0 * (8.0f64 / 7.0).log10();
    let jammed = base(JammerMode::Compliant, 1, vec![snr8], 200);
    let mut plain = base(JammerMode::None, 0, vec![snr7], 200);
    plain.b_antennas = 7;
    plain.seed = 12;
    assert!((jammed.noise_var(snr8) - plain.noise_var(snr7)).abs() < 1e-12);

    let (a, se_a) = ber_with_se(&jammed, 10);
    let (b, se_b) = ber_with_se(&plain, 10);
    let (pa, pb) = (a.points[0].ber(), b.points[0].ber());
    let slack = 4.0 * (se_a[0].powi(2) + se_b[0].powi(2)).sqrt();
    assert!((pa - pb).abs() < slack, "compliant+null {pa:.4e} vs 7-antenna {pb:.4e} (+-{slack:.1e})");
}

#[test]
fn jammerless_waterfall_decreases() {
    let sc = base(JammerMode::None, 0, vec![-8.0, -6.0, -4.0, -2.0, 0.0], 60);
    let bers = sweep(&sc).unwrap().bers();
    assert!(bers.windows(2).all(|w| w[1] < w[0]), "{bers:?}");
}

#[test]
fn estimated_subspace_tracks_genie() {
    let genie = base(JammerMode::Violating, 4, vec![0.0, 6.0], 30);
    let est = Scenario { subspace_mode: SubspaceMode::Estimated, ..genie.clone() };
    let (g, e) = (sweep(&genie).unwrap(), sweep(&est).unwrap());
    for (pg, pe) in g.points.iter().zip(&e.points) {
        // training on noisy samples costs something but stays in the same regime
        assert!(pe.ber() >= 0.5 * pg.ber() && pe.ber() < 0.1, "{} vs {}", pg.ber(), pe.ber());
    }
    // a single null is not enough whichever way the subspace is found
    let one = Scenario { null_dims: 1, ..est };
    assert!(sweep(&one).unwrap().bers().iter().all(|&b| b > 0.15));
}

#[test]
fn more_blocks_shrink_the_spread() {
    let sc = base(JammerMode::Compliant, 1, vec![-3.0], 400);
    let (_, se_full) = ber_with_se(&sc, 20);
    let half = Scenario { blocks: 200, ..sc };
    let (_, se_half) = ber_with_se(&half, 20);
    // batch means: standard error scales as 1/sqrt(blocks); allow sampling noise
    let ratio = se_half[0] / se_full[0];
    assert!(ratio > 1.0 && ratio < 2.5, "ratio {ratio}");
}
