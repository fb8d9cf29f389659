use holoflow::metrics::{extract_curve, normalize_target, psnr, write_curve_csv, PsnrOptions, PsnrScaling, CURVE_HEADER};
use holoflow::{Error, GridShape, IntensityGrid, IterationRecord};
use proptest::prelude::*;

fn grid(v: Vec<f64>) -> IntensityGrid {
    IntensityGrid::new(GridShape::d1(v.len()).unwrap(), v).unwrap()
}

#[test]
fn psnr_by_hand() {
    // reference peak 1 after rescaling, error 0.1 on one of four samples
    let r = grid(vec![2.0, 0.0, 1.0, 1.0]);
    let d = grid(vec![2.2, 0.0, 1.0, 1.0]);
    let opts = PsnrOptions {
        scaling: PsnrScaling::None,
        ..Default::default()
    };
    let expect = 10.0 * (1.0 / (0.01 / 4.0f64)).log10();
    assert!((psnr(&d, &r, opts).unwrap() - expect).abs() < 1e-12);
}

#[test]
fn identical_images_hit_the_cap() {
    let r = grid(vec![1.0, 2.0, 3.0]);
    assert_eq!(psnr(&r, &r, PsnrOptions::default()).unwrap(), 99.0);
}

#[test]
fn degenerate_references_are_errors() {
    let z = grid(vec![0.0, 0.0]);
    assert!(psnr(&z, &z, PsnrOptions::default()).is_err());
    assert!(normalize_target(&z).is_err());
    let r = grid(vec![1.0, 2.0]);
    let short = grid(vec![1.0]);
    assert!(matches!(psnr(&short, &r, PsnrOptions::default()), Err(Error::ShapeMismatch { .. })));
}

fn record(iter: usize, min_amp: Option<f64>) -> IterationRecord {
    IterationRecord {
        iter,
        loss: 1.5 / (iter + 1) as f64,
        psnr_db: 10.0 + iter as f64,
        min_amp,
        max_grad_amp: None,
        elapsed_ms: 0.25,
    }
}

#[test]
fn curve_csv_layout() {
    let log = vec![record(0, Some(0.1)), record(5, None)];
    let mut buf = Vec::new();
    write_curve_csv(&log, &mut buf, false).unwrap();
    let text = String::from_utf8(buf).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], CURVE_HEADER);
    assert_eq!(lines[1], "0,1.5e0,1e1,1e-1,,");
    assert_eq!(lines[2], "5,2.5e-1,1.5e1,,,");
    let mut buf = Vec::new();
    write_curve_csv(&log, &mut buf, true).unwrap();
    assert!(String::from_utf8(buf).unwrap().lines().nth(1).unwrap().ends_with(",0.250"));
}

#[test]
fn curve_extraction() {
    let log = vec![record(0, Some(0.1)), record(5, None), record(10, Some(0.3))];
    assert_eq!(extract_curve(&log, "min_amp").unwrap(), vec![(0, 0.1), (10, 0.3)]);
    assert_eq!(extract_curve(&log, "psnr_db").unwrap().len(), 3);
    assert!(matches!(extract_curve(&log, "bogus"), Err(Error::UnknownField(f)) if f == "bogus"));
}

proptest! {
    #[test]
    fn prop_normalized_sum_is_n_squared(v in prop::collection::vec(0.0f64..10.0, 1..64)) {
        prop_assume!(v.iter().sum::<f64>() > 1e-6);
        let n = v.len() as f64;
        let t = normalize_target(&grid(v)).unwrap();
        prop_assert!((t.sum() - n * n).abs() <= 1e-9 * n * n);
    }

    #[test]
    fn prop_least_squares_psnr_ignores_display_scale(
        v in prop::collection::vec(0.01f64..10.0, 2..32),
        noise in prop::collection::vec(-0.5f64..0.5, 32),
        k in 0.01f64..100.0,
    ) {
        let r = grid(v.clone());
        let d = grid(v.iter().zip(&noise).map(|(a, e)| (a + e).max(0.0)).collect());
        let dk = grid(d.as_slice().iter().map(|x| x * k).collect());
        let a = psnr(&d, &r, PsnrOptions::default()).unwrap();
        let b = psnr(&dk, &r, PsnrOptions::default()).unwrap();
        prop_assert!((a - b).abs() < 1e-8);
    }

    #[test]
    fn prop_psnr_ignores_joint_scale(
        v in prop::collection::vec(0.01f64..10.0, 2..32),
        noise in prop::collection::vec(-0.5f64..0.5, 32),
        k in 0.01f64..100.0,
    ) {
        let opts = PsnrOptions { scaling: PsnrScaling::None, ..Default::default() };
        let r = grid(v.clone());
        let d = grid(v.iter().zip(&noise).map(|(a, e)| (a + e).max(0.0)).collect());
        let rk = grid(r.as_slice().iter().map(|x| x * k).collect());
        let dk = grid(d.as_slice().iter().map(|x| x * k).collect());
        let a = psnr(&d, &r, opts).unwrap();
        let b = psnr(&dk, &rk, opts).unwrap();
        prop_assert!((a - b).abs() < 1e-8);
    }

    #[test]
    fn prop_psnr_is_capped(v in prop::collection::vec(0.01f64..10.0, 1..32)) {
        let r = grid(v);
        let p = psnr(&r, &r, PsnrOptions::default()).unwrap();
        prop_assert!(p <= 99.0);
    }
}
