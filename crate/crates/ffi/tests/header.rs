//! Compiles and runs a C program against the generated header and the
//! shared library.

use std::path::PathBuf;
use std::process::Command;

const PROGRAM: &str = r#"
#include <stdio.h>
#include <string.h>
#include "forge.h"

int main(void) {
    ForgeCacheTrace *t = NULL;
    if (forge_cache_trace_zipf(100, 2000, 1.0, 3, &t) != FORGE_STATUS_OK) return 10;
    uint64_t cap = 0;
    if (forge_cache_capacity(t, 0.1, &cap) != FORGE_STATUS_OK) return 11;
    ForgeCacheMetrics m;
    if (forge_cache_simulate(t, "sieve", NULL, cap, &m) != FORGE_STATUS_OK) return 12;
    if (m.hits + m.misses != m.accesses || m.accesses != 2000) return 13;
    if (forge_cache_simulate(t, "nope", NULL, cap, &m) != FORGE_STATUS_INVALID_ARGUMENT) return 14;
    if (forge_last_error() == NULL || strstr(forge_last_error(), "nope") == NULL) return 15;
    forge_cache_trace_free(t);

    uint64_t items[] = {6, 5, 4, 3, 7, 2};
    ForgeBinTrace *b = NULL;
    if (forge_bin_trace_from_items(items, 6, 10, &b) != FORGE_STATUS_OK) return 20;
    ForgePackMetrics p;
    if (forge_bin_pack(b, "next_fit", NULL, &p) != FORGE_STATUS_OK) return 21;
    forge_bin_trace_free(b);

    double xs[] = {0.0, 1.0, 2.0}, ys[] = {0.0, 0.5, 1.0}, x = 1.0, mean = 0.0;
    ForgeGpr *g = NULL;
    if (forge_gpr_fit(xs, 3, 1, ys, 1, 0.0, 0.5, &g) != FORGE_STATUS_OK) return 30;
    if (forge_gpr_predict(g, &x, 1, &mean, 1) != FORGE_STATUS_OK) return 31;
    forge_gpr_free(g);
    printf("%llu %llu %.6f\n", (unsigned long long)p.bins_used, (unsigned long long)p.lower_bound, mean);
    return 0;
}
"#;

#[test]
fn c_program_links_and_runs() {
    let manifest = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    let include = manifest.join("include");
    // target/<profile>/deps/<test> -> target/<profile>
    let exe = std::env::current_exe().unwrap();
    let lib_dir = exe.parent().and_then(|d| d.parent()).unwrap().to_path_buf();
    let so = lib_dir.join(format!("{}forge_ffi{}", std::env::consts::DLL_PREFIX, std::env::consts::DLL_SUFFIX));
    assert!(so.exists(), "shared library not built at {}", so.display());

    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("main.c");
    std::fs::write(&src, PROGRAM).unwrap();
    let bin = dir.path().join("main");
    let cc = std::env::var("CC").unwrap_or_else(|_| "cc".into());
    let status = Command::new(&cc)
        .args(["-std=c99", "-Wall", "-Wextra", "-Werror", "-o"])
        .arg(&bin)
        .arg(&src)
        .arg("-I")
        .arg(&include)
        .arg("-L")
        .arg(&lib_dir)
        .arg("-lforge_ffi")
        .arg(format!("-Wl,-rpath,{}", lib_dir.display()))
        .status()
        .expect("running the C compiler");
    assert!(status.success(), "C compilation failed");
    let out = Command::new(&bin).output().unwrap();
    assert!(out.status.success(), "C program exited with {:?}", out.status);
    assert_eq!(String::from_utf8_lossy(&out.stdout), "4 3 0.454545\n");
}
