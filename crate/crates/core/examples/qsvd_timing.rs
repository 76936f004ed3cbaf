//! Times the QSVD kernel and the rank-r projection on random inputs.
//!
//! cargo run --release --example qsvd_timing -- 100

use std::time::Instant;

use pqa::generate::random_quaternion_matrix;
use pqa::projections::pi1;
use pqa::qsvd::qsvd;

fn main() {
    let n: usize = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(100);
    let a = random_quaternion_matrix(n, n, 1);
    let reps = 5;
    let t = Instant::now();
    for _ in 0..reps {
        std::hint::black_box(qsvd(&a).unwrap());
    }
    println!("qsvd {n}x{n}: {:.1} ms", t.elapsed().as_secs_f64() * 1e3 / reps as f64);
    let t = Instant::now();
    for _ in 0..reps {
        std::hint::black_box(pi1(&a, n / 5).unwrap());
    }
    println!("pi1  {n}x{n}: {:.1} ms", t.elapsed().as_secs_f64() * 1e3 / reps as f64);
}
