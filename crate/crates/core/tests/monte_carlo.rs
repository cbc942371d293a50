//! Seeded Monte-Carlo checks of the stage and channel behaviour.

use num_complex::Complex64;
use papr_core::metrics::{awgn_samples, papr, q_function, snr_measure_samples};
use papr_core::modem::{encode_payload, qam16_demap, qam16_map, BitBlock, FrameConfig};
use papr_core::signal::{
    band_mask, composite_window, dft, flat_top_window, flat_top_window_symmetric, idft, oversample,
    slepian_window, RandomStream, SpectrumVector, TimeSeries,
};
use papr_core::stages::{
    apply_slepian_flat_top, clip, clip_and_filter, correlation, matched_filter_phase,
    slm_transform, ClipConfig, ProposedConfig, SlmConfig,
};

fn frame(rng: &mut RandomStream, cfg: &FrameConfig) -> SpectrumVector {
    encode_payload(&BitBlock::new(rng.bits(cfg.payload_bits())).unwrap(), cfg).unwrap()
}

#[test]
fn oversampled_papr_is_at_least_nyquist_papr() {
    let cfg = FrameConfig::default();
    let mut rng = RandomStream::new(1);
    let trials = 10_000;
    let hits = (0..trials)
        .filter(|_| {
            let x = frame(&mut rng, &cfg);
            let nyq = papr(&idft(&x).unwrap()).unwrap().ratio;
            let up = papr(&oversample(&x, 4).unwrap()).unwrap().ratio;
            up >= nyq - 1e-12
        })
        .count();
    assert!(hits as f64 >= 0.99 * trials as f64, "{hits} / {trials}");
}

#[test]
fn single_clip_pass_lowers_mean_papr() {
    let cfg = FrameConfig::default();
    let mask = band_mask(64, 4);
    let clip_cfg = ClipConfig {
        clip_ratio: 1.2,
        ..ClipConfig::default()
    };
    let mut rng = RandomStream::new(2);
    let mut gain = 0.0;
    for _ in 0..10_000 {
        let x = oversample(&frame(&mut rng, &cfg), 4).unwrap();
        let y = clip_and_filter(&x, &clip_cfg, &mask).unwrap().signal;
        gain += papr(&x).unwrap().db - papr(&y).unwrap().db;
    }
    assert!(
        gain / 10_000.0 > 0.0,
        "mean reduction {:.3} dB",
        gain / 10_000.0
    );
}

#[test]
fn slm_lowers_mean_papr_and_hits_the_candidate_minimum() {
    let cfg = FrameConfig::default();
    let slm = SlmConfig::default();
    let mut rng = RandomStream::new(3);
    let (mut base, mut sel) = (0.0, 0.0);
    let n = 10_000;
    for _ in 0..n {
        let x = frame(&mut rng, &cfg);
        let out = slm_transform(&x, &slm, 4).unwrap();
        base += papr(&oversample(&x, 4).unwrap()).unwrap().db;
        sel += papr(&out.signal).unwrap().db;
    }
    let (base, sel) = (base / n as f64, sel / n as f64);
    eprintln!(
        "SLM M=16, N=64: mean {base:.3} dB -> {sel:.3} dB ({:.3} dB)",
        base - sel
    );
    assert!(sel < base);
}

fn out_of_band_power(original: &TimeSeries, processed: &TimeSeries, mask: &[bool]) -> f64 {
    let err: Vec<Complex64> = processed
        .samples()
        .iter()
        .zip(original.samples())
        .map(|(a, b)| a - b)
        .collect();
    let e = dft(&TimeSeries::from_samples(err).unwrap()).unwrap();
    e.bins()
        .iter()
        .zip(mask)
        .filter(|(_, m)| !**m)
        .map(|(c, _)| c.norm_sqr())
        .sum()
}

#[test]
fn windowed_peaks_leak_less_than_hard_clipping() {
    let cfg = FrameConfig::default();
    let mask = band_mask(64, 4);
    let (flat, slep) = ProposedConfig::default().windows(cfg.body_len()).unwrap();
    let mut rng = RandomStream::new(4);
    let (mut windowed, mut hard) = (0.0, 0.0);
    for _ in 0..200 {
        let x = oversample(&frame(&mut rng, &cfg), 4).unwrap();
        let a = 1.4 * x.rms();
        windowed += out_of_band_power(
            &x,
            &apply_slepian_flat_top(&x, &flat, &slep, a).unwrap(),
            &mask,
        );
        hard += out_of_band_power(&x, &clip(&x, a).unwrap(), &mask);
    }
    assert!(
        windowed < hard,
        "windowed {windowed:.4e} vs hard {hard:.4e}"
    );
}

#[test]
fn pilot_matched_filter_removes_a_common_rotation() {
    let cfg = FrameConfig::default();
    let reference = oversample(&cfg.pilot_spectrum().unwrap(), 4).unwrap();
    let mut rng = RandomStream::new(5);
    let mut sq = 0.0;
    for _ in 0..1000 {
        let clean = oversample(&frame(&mut rng, &cfg), 4).unwrap();
        let rot = Complex64::from_polar(1.0, 0.3);
        let rotated: Vec<Complex64> = clean.samples().iter().map(|s| s * rot).collect();
        let noisy = clean
            .with_samples(awgn_samples(&rotated, 20.0, &mut rng).unwrap())
            .unwrap();
        let fixed = matched_filter_phase(&noisy, &reference).unwrap();
        sq += correlation(&fixed, &clean).unwrap().arg().powi(2);
    }
    // the four pilots hold 1/16 of the energy, so single trials scatter by ~0.02 rad
    let rms = (sq / 1000.0).sqrt();
    assert!(rms < 0.05, "rms residual phase {rms:.4} rad");
}

/// Null-to-null main-lobe width in bins of the zero-padded spectrum.
fn main_lobe_width(w: &[f64], pad: usize) -> usize {
    let mut v: Vec<Complex64> = w.iter().map(|&x| Complex64::new(x, 0.0)).collect();
    v.resize(pad, Complex64::new(0.0, 0.0));
    let s = dft(&TimeSeries::from_samples(v).unwrap()).unwrap();
    let p: Vec<f64> = s.bins().iter().map(|c| c.norm_sqr()).collect();
    let first_null = (1..pad / 2).find(|&k| p[k + 1] > p[k]).unwrap();
    2 * first_null
}

#[test]
fn composite_main_lobe_is_no_narrower_than_flat_top() {
    let flat = flat_top_window_symmetric(33).unwrap();
    let composite = composite_window(&flat, &slepian_window(33, 2.5).unwrap()).unwrap();
    let (wf, wc) = (
        main_lobe_width(&flat.samples, 4096),
        main_lobe_width(&composite.samples, 4096),
    );
    assert!(wc >= wf, "composite {wc} bins vs flat-top {wf}");
}

#[test]
fn slepian_concentration_beats_flat_top_via_padded_dft() {
    let (n, nw, pad) = (64, 2.5, 8192);
    let w = nw / n as f64;
    let frac = |x: &[f64]| {
        let mut v: Vec<Complex64> = x.iter().map(|&s| Complex64::new(s, 0.0)).collect();
        v.resize(pad, Complex64::new(0.0, 0.0));
        let s = dft(&TimeSeries::from_samples(v).unwrap()).unwrap();
        let total: f64 = s.bins().iter().map(|c| c.norm_sqr()).sum();
        let inband: f64 = s
            .bins()
            .iter()
            .enumerate()
            .filter(|(k, _)| (*k.min(&(pad - k)) as f64) / pad as f64 <= w)
            .map(|(_, c)| c.norm_sqr())
            .sum();
        inband / total
    };
    let cs = frac(&slepian_window(n, nw).unwrap().samples);
    let cf = frac(&flat_top_window(n).unwrap().samples);
    assert!(cs > cf && cs > 0.99, "Slepian {cs} vs flat-top {cf}");
}

#[test]
fn awgn_hits_the_requested_snr() {
    let mut rng = RandomStream::new(6);
    let s: Vec<Complex64> = (0..1_000_000)
        .map(|i| Complex64::from_polar(1.0 + (i % 7) as f64 * 0.1, i as f64))
        .collect();
    let y = awgn_samples(&s, 20.0, &mut rng).unwrap();
    let measured = snr_measure_samples(&s, &y).unwrap();
    assert!((measured - 20.0).abs() <= 0.1, "{measured}");
}

#[test]
fn qam16_survives_40_db() {
    let mut rng = RandomStream::new(7);
    let bits = BitBlock::new(rng.bits(40_000)).unwrap();
    let symbols = qam16_map(&bits).unwrap();
    let noisy = awgn_samples(&symbols, 40.0, &mut rng).unwrap();
    assert_eq!(qam16_demap(&noisy), bits);
}

#[test]
fn gaussian_draws_have_unit_moments() {
    let g = RandomStream::new(8).gaussian(1_000_000);
    let mean = g.iter().sum::<f64>() / g.len() as f64;
    let var = g.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / g.len() as f64;
    assert!(
        mean.abs() <= 0.005 && (var - 1.0).abs() <= 0.01,
        "{mean} {var}"
    );
}

#[test]
fn q_function_matches_trapezoid_integration() {
    for x in [0.5, 2.0, 4.0] {
        let (b, steps) = (x + 40.0, 2_000_000);
        let h = (b - x) / steps as f64;
        let f = |t: f64| (-t * t / 2.0).exp() / (2.0 * std::f64::consts::PI).sqrt();
        let mut s = (f(x) + f(b)) / 2.0;
        for i in 1..steps {
            s += f(x + i as f64 * h);
        }
        let quad = s * h;
        assert!(
            (q_function(x) - quad).abs() <= 1e-10,
            "x = {x}: {} vs {quad}",
            q_function(x)
        );
    }
}
