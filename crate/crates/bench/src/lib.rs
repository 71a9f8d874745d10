//! Workload generators shared by the benches.

use blockforge::model::{rational, Complex, Point, Port};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// `n` atoms uniform in a square sized for mean degree about 4, detunings
/// 1..=3, the first `ports` atoms as ports.
pub fn random_unit_disk(n: usize, ports: usize, seed: u64) -> Complex {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let side = (n as f64 * std::f64::consts::PI / 4.0).sqrt();
    let pos = (0..n)
        .map(|_| Point::new(rng.random_range(0.0..side), rng.random_range(0.0..side)))
        .collect();
    let det = (0..n).map(|_| rational(rng.random_range(1..=3))).collect();
    let ports = (0..ports.min(n)).map(|i| Port::new(format!("p{i}"), i)).collect();
    Complex::geometric(pos, det, ports, 1.0).expect("random complex")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generator_is_deterministic() {
        let a = random_unit_disk(20, 3, 7);
        let b = random_unit_disk(20, 3, 7);
        assert_eq!(a.graph(), b.graph());
        assert_eq!(a.n_ports(), 3);
    }
}
