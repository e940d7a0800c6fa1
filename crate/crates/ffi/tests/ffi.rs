use std::ffi::{CStr, CString};
use std::ptr;

use forge_core::cache::{capacity_for_trace, make_baseline_policy, simulate, BaselineName, PolicyParams};
use forge_core::trace::gen_zipf;
use forge_ffi::*;

fn last_error() -> String {
    let p = forge_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

#[test]
fn cache_round_trip_matches_core() {
    unsafe {
        let mut t = ptr::null_mut();
        assert_eq!(forge_cache_trace_zipf(200, 5000, 0.8, 7, &mut t), ForgeStatus::Ok);
        assert!(forge_last_error().is_null());
        assert_eq!(forge_cache_trace_len(t), 5000);
        let mut cap = 0;
        assert_eq!(forge_cache_capacity(t, 0.1, &mut cap), ForgeStatus::Ok);

        let core = gen_zipf(200, 5000, 0.8, 7).unwrap();
        assert_eq!(cap, capacity_for_trace(&core, 0.1).unwrap());
        for name in BaselineName::ALL {
            let policy = CString::new(name.as_str()).unwrap();
            let mut m = ForgeCacheMetrics::default();
            assert_eq!(forge_cache_simulate(t, policy.as_ptr(), ptr::null(), cap, &mut m), ForgeStatus::Ok);
            let mut p = make_baseline_policy(name, &PolicyParams::default()).unwrap();
            let want = simulate(&core, cap, &mut p).unwrap();
            assert_eq!((m.hits, m.misses, m.accesses), (want.hits, want.misses, want.accesses), "{name}");
        }

        let dir = tempfile::tempdir().unwrap();
        let path = CString::new(dir.path().join("t.csv").to_str().unwrap()).unwrap();
        assert_eq!(forge_cache_trace_write(t, path.as_ptr()), ForgeStatus::Ok);
        let mut back = ptr::null_mut();
        assert_eq!(forge_cache_trace_read(path.as_ptr(), &mut back), ForgeStatus::Ok);
        assert_eq!(forge_cache_trace_len(back), 5000);
        forge_cache_trace_free(back);
        forge_cache_trace_free(t);
    }
}

#[test]
fn errors_set_status_and_message() {
    unsafe {
        let mut t = ptr::null_mut();
        assert_eq!(forge_cache_trace_zipf(10, 100, 1.0, 0, &mut t), ForgeStatus::Ok);
        let mut m = ForgeCacheMetrics::default();
        let bogus = CString::new("belady").unwrap();
        assert_eq!(forge_cache_simulate(t, bogus.as_ptr(), ptr::null(), 4, &mut m), ForgeStatus::InvalidArgument);
        assert!(last_error().contains("belady"));
        let lru = CString::new("lru").unwrap();
        let bad = CString::new("probation=2").unwrap();
        assert_eq!(forge_cache_simulate(t, lru.as_ptr(), bad.as_ptr(), 4, &mut m), ForgeStatus::InvalidArgument);
        assert_eq!(forge_cache_simulate(t, lru.as_ptr(), ptr::null(), 0, &mut m), ForgeStatus::Simulation);
        assert_eq!(forge_cache_simulate(ptr::null(), lru.as_ptr(), ptr::null(), 4, &mut m), ForgeStatus::NullArgument);
        assert!(last_error().contains("trace"));
        let missing = CString::new("/nonexistent/trace.csv").unwrap();
        let mut r = ptr::null_mut();
        assert_eq!(forge_cache_trace_read(missing.as_ptr(), &mut r), ForgeStatus::Io);
        assert!(r.is_null());
        assert_eq!(forge_cache_trace_zipf(0, 10, 1.0, 0, &mut r), ForgeStatus::InvalidArgument);
        forge_cache_trace_free(t);
        forge_cache_trace_free(ptr::null_mut());
        assert_eq!(forge_cache_trace_len(ptr::null()), 0);
    }
}

#[test]
fn packing_and_generation() {
    unsafe {
        let items = [6u64, 5, 4, 3, 7, 2];
        let mut t = ptr::null_mut();
        assert_eq!(forge_bin_trace_from_items(items.as_ptr(), items.len(), 10, &mut t), ForgeStatus::Ok);
        let ff = CString::new("first_fit").unwrap();
        let mut m = ForgePackMetrics::default();
        assert_eq!(forge_bin_pack(t, ff.as_ptr(), ptr::null(), &mut m), ForgeStatus::Ok);
        assert_eq!(m, ForgePackMetrics { bins_used: 3, lower_bound: 3 });
        forge_bin_trace_free(t);

        assert_eq!(forge_bin_trace_from_items(items.as_ptr(), items.len(), 5, &mut t), ForgeStatus::InvalidArgument);

        let mut g = ptr::null_mut();
        assert_eq!(
            forge_bin_trace_generate(500, ForgeItemDistribution::Weibull, 3.0, 45.0, 100, 1, &mut g),
            ForgeStatus::Ok
        );
        assert_eq!(forge_bin_trace_len(g), 500);
        let hk = CString::new("harmonic_k").unwrap();
        let k = CString::new("k=6").unwrap();
        assert_eq!(forge_bin_pack(g, hk.as_ptr(), k.as_ptr(), &mut m), ForgeStatus::Ok);
        assert!(m.lower_bound >= 1 && m.bins_used >= m.lower_bound && m.bins_used <= 500);
        forge_bin_trace_free(g);
    }
}

#[test]
fn gpr_ridge_closed_form() {
    // Scalar features 0, 1, 2 with targets 0, 0.5, 1 and no bias: the
    // posterior mean at x is x * sum(x y) / (sum(x^2) + noise).
    unsafe {
        let xs = [0.0, 1.0, 2.0];
        let ys = [0.0, 0.5, 1.0];
        let mut g = ptr::null_mut();
        assert_eq!(forge_gpr_fit(xs.as_ptr(), 3, 1, ys.as_ptr(), 1, 0.0, 0.5, &mut g), ForgeStatus::Ok);
        let mut mean = [0.0];
        let x = [1.0];
        assert_eq!(forge_gpr_predict(g, x.as_ptr(), 1, mean.as_mut_ptr(), 1), ForgeStatus::Ok);
        assert!((mean[0] - 2.5 / 5.5).abs() < 1e-9, "{}", mean[0]);
        let wrong = [1.0, 2.0];
        assert_eq!(forge_gpr_predict(g, wrong.as_ptr(), 2, mean.as_mut_ptr(), 1), ForgeStatus::InvalidArgument);
        assert_eq!(forge_gpr_predict(g, x.as_ptr(), 1, mean.as_mut_ptr(), 2), ForgeStatus::InvalidArgument);
        forge_gpr_free(g);
        assert_eq!(forge_gpr_fit(xs.as_ptr(), 3, 1, ys.as_ptr(), 1, 0.0, -1.0, &mut g), ForgeStatus::Numeric);
        assert_eq!(forge_gpr_fit(ptr::null(), 3, 1, ys.as_ptr(), 1, 0.0, 0.5, &mut g), ForgeStatus::NullArgument);
    }
}
