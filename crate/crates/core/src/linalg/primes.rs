pub fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= p {
        if p % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// The first `count` primes that are `>= start`.
pub fn primes_from(start: u64, count: usize) -> Vec<u64> {
    (start.max(2)..).filter(|&p| is_prime(p)).take(count).collect()
}
