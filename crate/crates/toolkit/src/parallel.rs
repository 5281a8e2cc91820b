//! Order-preserving fan-out over a fixed number of scoped worker threads.

use std::thread;

use crate::Error;

pub const THREADS_VAR: &str = "NEWTON_CIRCLE_THREADS";

/// Worker count from `NEWTON_CIRCLE_THREADS`, default 1.
pub fn threads() -> Result<usize, Error> {
    match std::env::var(THREADS_VAR) {
        Err(_) => Ok(1),
        Ok(s) => match s.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(n),
            _ => Err(Error::Usage(format!("{THREADS_VAR} must be a positive integer, got {s:?}"))),
        },
    }
}

/// `items.map(f)` with results in input order regardless of completion order.
pub fn map_ordered<T, R, F>(items: Vec<T>, workers: usize, f: F) -> Vec<R>
where
    T: Send,
    R: Send,
    F: Fn(T) -> R + Sync,
{
    if workers <= 1 || items.len() <= 1 {
        return items.into_iter().map(f).collect();
    }
    let chunk = items.len().div_ceil(workers);
    let mut chunks: Vec<Vec<T>> = Vec::new();
    let mut items = items.into_iter().peekable();
    while items.peek().is_some() {
        chunks.push(items.by_ref().take(chunk).collect());
    }
    let f = &f;
    thread::scope(|s| {
        let handles: Vec<_> = chunks.into_iter().map(|c| s.spawn(move || c.into_iter().map(f).collect::<Vec<R>>())).collect();
        handles.into_iter().flat_map(|h| h.join().expect("worker panicked")).collect()
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_is_kept() {
        let out = map_ordered((0..100).collect(), 7, |x: i32| x * x);
        assert_eq!(out, (0..100).map(|x| x * x).collect::<Vec<_>>());
        assert_eq!(map_ordered(Vec::<i32>::new(), 3, |x| x), Vec::<i32>::new());
    }
}
