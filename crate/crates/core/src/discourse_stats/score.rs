use std::sync::{OnceLock, RwLock};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};

use super::{bag_size, Event, EventBag, StatsError};

/// Largest bag [`multinomial_pmf`] evaluates exactly.
pub const MAX_EXACT_EVENTS: u64 = 20;

/// Anything that assigns probabilities to single events and to bag sizes.
pub trait EventDistribution {
    fn event_prob(&self, event: &Event) -> f64;
    fn n_prob(&self, n: u64) -> f64;
}

fn log_factorial_table() -> &'static RwLock<Vec<f64>> {
    static TABLE: OnceLock<RwLock<Vec<f64>>> = OnceLock::new();
    TABLE.get_or_init(|| RwLock::new(vec![0.0]))
}

/// `ln(n!)` from a cumulative table of `ln k`, grown on demand and shared
/// across threads.
pub fn log_factorial(n: u64) -> f64 {
    let n = n as usize;
    let table = log_factorial_table();
    {
        let read = table.read().expect("log-factorial table poisoned");
        if let Some(&v) = read.get(n) {
            return v;
        }
    }
    let mut write = table.write().expect("log-factorial table poisoned");
    while write.len() <= n {
        let k = write.len();
        let next = write[k - 1] + (k as f64).ln();
        write.push(next);
    }
    write[n]
}

/// Natural-log multinomial score of a bag:
/// `ln P(n) + ln n! + sum_i (x_i ln p_i - ln x_i!)`.
pub fn log_score<M: EventDistribution + ?Sized>(model: &M, bag: &EventBag) -> f64 {
    let n = bag_size(bag);
    let mut score = model.n_prob(n).ln() + log_factorial(n);
    for (event, &x) in bag {
        if x == 0 {
            continue;
        }
        score += x as f64 * model.event_prob(event).ln() - log_factorial(x);
    }
    score
}

/// `P(n) * n! / prod(x_i!) * prod(p_i^x_i)` in exact rational arithmetic
/// over the binary values of the model's probabilities, rounded once at the
/// end. Used to check [`log_score`].
pub fn multinomial_pmf<M: EventDistribution + ?Sized>(
    model: &M,
    bag: &EventBag,
) -> Result<f64, StatsError> {
    let n = bag_size(bag);
    if n > MAX_EXACT_EVENTS {
        return Err(StatsError::OverflowRisk {
            n: n as usize,
            max: MAX_EXACT_EVENTS as usize,
        });
    }
    let exact = |p: f64| {
        BigRational::from_float(p)
            .ok_or_else(|| StatsError::Format(format!("probability {p} is not finite")))
    };
    let mut prob = exact(model.n_prob(n))?;
    let mut coefficient = factorial(n);
    for (event, &x) in bag {
        coefficient /= factorial(x);
        let p = exact(model.event_prob(event))?;
        for _ in 0..x {
            prob *= &p;
        }
    }
    prob *= BigRational::from_integer(coefficient);
    prob.to_f64()
        .ok_or_else(|| StatsError::Format("probability out of f64 range".into()))
}

fn factorial(n: u64) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * k)
}
