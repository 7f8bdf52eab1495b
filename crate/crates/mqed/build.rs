fn main() {
    // OpenBLAS ships both the BLAS and LAPACK entry points on this platform.
    println!("cargo:rustc-link-lib=dylib=openblas");
}
