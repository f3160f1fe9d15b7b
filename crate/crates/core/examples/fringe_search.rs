use std::time::Instant;

use polylab_core::fringe::find_fringe_1d;

fn main() {
    let max: u32 = std::env::args().nth(1).and_then(|a| a.parse().ok()).unwrap_or(3);
    for s in 0..=max {
        for d in 0..=max {
            let t = Instant::now();
            let r = find_fringe_1d(s, d, 32);
            println!("({s},{d}) {:?} {:.2?}", r.map(|f| (f.r_prime, f.low, f.high_reflected)), t.elapsed());
        }
    }
}
