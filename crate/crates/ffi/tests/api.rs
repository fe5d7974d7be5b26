use std::ffi::{CStr, CString};
use std::ptr;

use radlab_ffi::*;

fn last_error() -> String {
    unsafe { CStr::from_ptr(radlab_last_error()) }.to_string_lossy().into_owned()
}

fn matrix(n: usize, re: &[f64], im: Option<&[f64]>) -> *mut RadlabMatrix {
    let mut m = ptr::null_mut();
    let im = im.map_or(ptr::null(), |v| v.as_ptr());
    assert_eq!(unsafe { radlab_matrix_new(n, re.as_ptr(), im, &mut m) }, RADLAB_OK);
    m
}

fn generate(family: &str, n: usize, index: u64) -> *mut RadlabMatrix {
    let family = CString::new(family).unwrap();
    let mut m = ptr::null_mut();
    assert_eq!(unsafe { radlab_matrix_generate(family.as_ptr(), n, 3, index, &mut m) }, RADLAB_OK);
    m
}

#[test]
fn jordan_block_radius_and_norm() {
    let m = matrix(2, &[0.0, 1.0, 0.0, 0.0], None);
    let (mut w, mut theta, mut norm) = (0.0, 0.0, 0.0);
    unsafe {
        assert_eq!(radlab_matrix_dim(m), 2);
        assert_eq!(radlab_numerical_radius(m, &mut w, &mut theta), RADLAB_OK);
        assert_eq!(radlab_numerical_radius(m, &mut w, ptr::null_mut()), RADLAB_OK);
        assert_eq!(radlab_op_norm(m, &mut norm), RADLAB_OK);
        let mut asc = 0.0;
        assert_eq!(radlab_numerical_radius_ascent(m, 8, 1, &mut asc), RADLAB_OK);
        assert!((asc - 0.5).abs() < 1e-9);
        radlab_matrix_free(m);
    }
    assert!((w - 0.5).abs() < 1e-12 && (norm - 1.0).abs() < 1e-12);
}

#[test]
fn json_round_trip() {
    let m = generate("ginibre", 3, 0);
    unsafe {
        let mut json = ptr::null_mut();
        assert_eq!(radlab_matrix_to_json(m, &mut json), RADLAB_OK);
        let mut back = ptr::null_mut();
        assert_eq!(radlab_matrix_from_json(json, &mut back), RADLAB_OK);
        for (i, j) in [(0, 0), (1, 2), (2, 1)] {
            let (mut a, mut b, mut c, mut d) = (0.0, 0.0, 0.0, 0.0);
            assert_eq!(radlab_matrix_entry(m, i, j, &mut a, &mut b), RADLAB_OK);
            assert_eq!(radlab_matrix_entry(back, i, j, &mut c, &mut d), RADLAB_OK);
            assert_eq!((a, b), (c, d));
        }
        radlab_string_free(json);
        radlab_matrix_free(back);
        radlab_matrix_free(m);
    }
}

#[test]
fn evaluates_a_chain_bound() {
    let m = generate("ginibre", 4, 1);
    let bound = CString::new("th4").unwrap();
    let ops = [m as *const RadlabMatrix];
    let mut records = [RadlabBoundRecord {
        lhs: 0.0,
        rhs: 0.0,
        slack: 0.0,
        explicit_bound: 0.0,
        link: 0,
    }; 4];
    let mut written = 0;
    let status = unsafe {
        radlab_eval_bound(bound.as_ptr(), ops.as_ptr(), 1, 0.0, 0.5, 1.0, records.as_mut_ptr(), 4, &mut written)
    };
    assert_eq!(status, RADLAB_OK);
    assert_eq!(written, 2);
    assert_eq!((records[0].link, records[1].link), (0, 1));
    assert!(records[0].explicit_bound.is_finite() && records[1].explicit_bound.is_nan());
    let mut w = 0.0;
    unsafe { radlab_numerical_radius(m, &mut w, ptr::null_mut()) };
    assert!(w <= records[0].explicit_bound + 1e-8);
    assert!(records[..2].iter().all(|r| !radlab_is_violation(*r, 1e-9)));

    // too small a buffer reports the count it needs
    let status = unsafe {
        radlab_eval_bound(bound.as_ptr(), ops.as_ptr(), 1, 0.0, 0.5, 1.0, records.as_mut_ptr(), 1, &mut written)
    };
    assert_eq!((status, written), (RADLAB_ERR_BUFFER_TOO_SMALL, 2));
    unsafe { radlab_matrix_free(m) };
}

#[test]
fn pair_bound_takes_two_operands() {
    let (t, s) = (generate("ginibre", 3, 2), generate("ginibre", 3, 3));
    let bound = CString::new("eq4_aldolat").unwrap();
    let mut rec = [RadlabBoundRecord { lhs: 0.0, rhs: 0.0, slack: 0.0, explicit_bound: 0.0, link: 0 }];
    let mut written = 0;
    let one = [t as *const RadlabMatrix];
    let status = unsafe {
        radlab_eval_bound(bound.as_ptr(), one.as_ptr(), 1, 1.0, 0.0, 1.0, rec.as_mut_ptr(), 1, &mut written)
    };
    assert_eq!(status, RADLAB_ERR_INVALID_ARGUMENT);
    assert!(last_error().contains("takes 2 operands"));
    let two = [t as *const RadlabMatrix, s];
    let status = unsafe {
        radlab_eval_bound(bound.as_ptr(), two.as_ptr(), 2, 1.0, 0.0, 1.0, rec.as_mut_ptr(), 1, &mut written)
    };
    assert_eq!(status, RADLAB_OK);
    assert!(rec[0].slack >= 0.0 && rec[0].link == -1);
    unsafe {
        radlab_matrix_free(t);
        radlab_matrix_free(s);
    }
}

#[test]
fn error_codes() {
    let mut m = ptr::null_mut();
    let bad_json = CString::new("{\"n\": 2, \"re\": [[1]]}").unwrap();
    let garbage = CString::new("not json").unwrap();
    unsafe {
        assert_eq!(radlab_matrix_new(2, ptr::null(), ptr::null(), &mut m), RADLAB_ERR_NULL_POINTER);
        assert_eq!(radlab_matrix_new(0, [0.0].as_ptr(), ptr::null(), &mut m), RADLAB_ERR_INVALID_ARGUMENT);
        assert_eq!(radlab_matrix_from_json(garbage.as_ptr(), &mut m), RADLAB_ERR_PARSE);
        assert_ne!(radlab_matrix_from_json(bad_json.as_ptr(), &mut m), RADLAB_OK);
        assert!(!last_error().is_empty());
        let mut w = 0.0;
        assert_eq!(radlab_numerical_radius(ptr::null(), &mut w, ptr::null_mut()), RADLAB_ERR_NULL_POINTER);
        assert_eq!(last_error(), "matrix is null");
        assert_eq!(radlab_matrix_dim(ptr::null()), 0);
        radlab_matrix_free(ptr::null_mut());
    }
    // a complex operand is rejected by the real-pair bound
    let c = generate("ginibre", 2, 0);
    let bound = CString::new("polarization_prop").unwrap();
    let ops = [c as *const RadlabMatrix, c];
    let mut written = 0;
    let mut rec = [RadlabBoundRecord { lhs: 0.0, rhs: 0.0, slack: 0.0, explicit_bound: 0.0, link: 0 }];
    let status = unsafe { radlab_eval_bound(bound.as_ptr(), ops.as_ptr(), 2, 0.0, 0.0, 1.0, rec.as_mut_ptr(), 1, &mut written) };
    assert_eq!(status, RADLAB_ERR_COMPLEX_INPUT);
    // the Kantorovich hypothesis never certifies
    let kant = CString::new("kant_prop").unwrap();
    let status = unsafe { radlab_eval_bound(kant.as_ptr(), ops.as_ptr(), 1, 0.5, 0.0, 1.0, rec.as_mut_ptr(), 1, &mut written) };
    assert_eq!(status, RADLAB_ERR_HYPOTHESIS);
    unsafe { radlab_matrix_free(c) };
}

#[test]
fn fov_points_stay_inside_the_radius() {
    let m = generate("upper_triangular", 3, 0);
    let (mut re, mut im) = (vec![0.0; 64], vec![0.0; 64]);
    let mut w = 0.0;
    unsafe {
        assert_eq!(radlab_fov_boundary(m, 64, re.as_mut_ptr(), im.as_mut_ptr()), RADLAB_OK);
        radlab_numerical_radius(m, &mut w, ptr::null_mut());
        assert_eq!(radlab_fov_boundary(m, 2, re.as_mut_ptr(), im.as_mut_ptr()), RADLAB_ERR_INVALID_ARGUMENT);
        radlab_matrix_free(m);
    }
    assert!(re.iter().zip(&im).all(|(a, b)| a.hypot(*b) <= w + 1e-9));
    let version = unsafe { CStr::from_ptr(radlab_version()) }.to_str().unwrap();
    assert_eq!(version, env!("CARGO_PKG_VERSION"));
}
