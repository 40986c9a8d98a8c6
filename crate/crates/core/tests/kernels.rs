mod support;

use proptest::prelude::*;
use strokeaug::augment::{self, AugmentConfig};
use strokeaug::{DrawSource, GrayImage, Method, Mode, RngStream};
use support::reference::{self, RefConfig, Tape};

fn configs() -> Vec<AugmentConfig> {
    Method::ALL
        .iter()
        .flat_map(|&m| {
            m.modes()
                .map(move |mode| AugmentConfig::new(m, mode).unwrap())
        })
        .collect()
}

fn ref_cfg(c: &AugmentConfig) -> RefConfig {
    RefConfig {
        method: c.method(),
        mode: c.mode(),
        threshold: c.threshold(),
        k: c.k() as usize,
        row_prob: c.row_prob(),
    }
}

/// Runs kernel and reference on the same draws; also checks both consumed
/// the same number of draws.
fn check_against_reference(
    img: &GrayImage,
    cfg: &AugmentConfig,
    seed: u64,
) -> Result<(), TestCaseError> {
    let mut rng = RngStream::new(seed);
    let mut tape = Tape::record(&rng, 4096);
    let got = augment::apply(img, cfg, &mut rng);
    let want = reference::run(&reference::to_grid(img), &ref_cfg(cfg), &mut tape);
    prop_assert_eq!(reference::to_grid(&got), want);
    let mut after = RngStream::new(seed);
    for _ in 0..tape.pos {
        after.next_u64();
    }
    prop_assert_eq!(rng, after, "draw count differs from reference");
    Ok(())
}

fn arb_image(max: usize) -> impl Strategy<Value = GrayImage> {
    (1..=max, 1..=max).prop_flat_map(|(w, h)| {
        proptest::collection::vec(
            prop_oneof![3 => Just(0u8), 1 => 0u8..=15, 3 => any::<u8>()],
            w * h,
        )
        .prop_map(move |px| GrayImage::new(w, h, px).unwrap())
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn kernels_match_reference(
        img in arb_image(8),
        which in 0usize..8,
        seed: u64,
        threshold: u8,
        k in 1u64..300,
        row_prob in 0.0f64..=1.0,
    ) {
        let cfg = configs()[which]
            .with_threshold(threshold)
            .with_k(k).unwrap()
            .with_row_prob(row_prob).unwrap();
        check_against_reference(&img, &cfg, seed)?;
    }

    #[test]
    fn elongate_x_is_a_row_rearrangement(img in arb_image(10), seed: u64) {
        let cfg = AugmentConfig::new(Method::Elongate, Mode::XAxis).unwrap();
        let r = RngStream::new(seed).uniform_below(img.height() as u64) as usize;
        let out = augment::elongate(&img, &cfg, &mut RngStream::new(seed));
        for i in 0..img.height() {
            let src = if i <= r { i } else { i - 1 };
            prop_assert_eq!(out.row(i), img.row(src));
        }
    }

    #[test]
    fn line_erase_touches_one_line(img in arb_image(10), seed: u64, x_axis: bool) {
        let mode = if x_axis { Mode::XAxis } else { Mode::YAxis };
        let cfg = AugmentConfig::new(Method::LineErase, mode).unwrap();
        let n = if x_axis { img.height() } else { img.width() };
        let line = RngStream::new(seed).uniform_below(n as u64) as usize;
        let out = augment::line_erase(&img, &cfg, &mut RngStream::new(seed));
        for r in 0..img.height() {
            for c in 0..img.width() {
                let on_line = if x_axis { r == line } else { c == line };
                let want = if on_line { 0 } else { img.get(r, c) };
                prop_assert_eq!(out.get(r, c), want);
            }
        }
    }
}

/// The hand-traced rows, replayed through the reference with scripted draws.
#[test]
fn reference_agrees_with_hand_traces() {
    let raw = |n: u64, ds: &[u64]| -> Vec<u64> {
        ds.iter()
            .map(|&d| (((d as u128) << 64).div_ceil(n as u128)) as u64)
            .collect()
    };
    let thick = ref_cfg(&AugmentConfig::new(Method::Thick, Mode::Complete).unwrap());
    let out = reference::run(
        &vec![vec![0, 0, 50, 60, 0]],
        &thick,
        &mut Tape::from_raw(raw(10, &[3, 7])),
    );
    assert_eq!(out, vec![vec![0, 47, 50, 60, 53]]);
    let mut tape = Tape::from_raw(raw(10, &[2, 4, 1, 5]));
    let out = reference::run(&vec![vec![0, 50, 0, 60, 0]], &thick, &mut tape);
    assert_eq!(out, vec![vec![48, 50, 56, 60, 59]]);
    assert_eq!(tape.pos, 3);

    let thin = ref_cfg(&AugmentConfig::new(Method::Thin, Mode::Complete).unwrap());
    let out = reference::run(
        &vec![vec![0, 47, 50, 60, 53]],
        &thin,
        &mut Tape::from_raw(vec![]),
    );
    assert_eq!(out, vec![vec![0, 0, 50, 60, 0]]);
    let out = reference::run(&vec![vec![0, 200, 0]], &thin, &mut Tape::from_raw(vec![]));
    assert_eq!(out, vec![vec![0, 0, 0]]);

    let el = ref_cfg(&AugmentConfig::new(Method::Elongate, Mode::YAxis).unwrap());
    let out = reference::run(
        &vec![vec![10, 20, 30]],
        &el,
        &mut Tape::from_raw(raw(3, &[1])),
    );
    assert_eq!(out, vec![vec![10, 20, 20]]);
}

#[test]
fn default_thicken_fills_are_visible_ink() {
    // threshold 10, k 10: any filled pixel is at least 11 - 9 = 2
    let cfg = AugmentConfig::new(Method::Thick, Mode::Complete).unwrap();
    let mut rng = RngStream::new(77);
    for i in 0..500 {
        let img = support::synth::glyph(1, i);
        let out = augment::thicken(&img, &cfg, &mut rng);
        for (a, b) in img.pixels().iter().zip(out.pixels()) {
            if a != b {
                assert!(*a <= 10 && *b >= 2);
            }
        }
    }
}
