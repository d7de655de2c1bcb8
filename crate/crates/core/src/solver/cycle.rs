use std::collections::VecDeque;

use crate::scalar::Real;

/// Circular buffer of recent primal residuals.
#[derive(Clone, Debug, PartialEq)]
pub struct CycleBuffer<T> {
    cap: usize,
    items: VecDeque<T>,
}

impl<T: Real> CycleBuffer<T> {
    pub fn new(cap: usize) -> Self {
        Self { cap, items: VecDeque::with_capacity(cap) }
    }

    pub fn capacity(&self) -> usize {
        self.cap
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn clear(&mut self) {
        self.items.clear();
    }

    pub fn push(&mut self, r: T) {
        if self.cap == 0 {
            return;
        }
        if self.items.len() == self.cap {
            self.items.pop_front();
        }
        self.items.push_back(r);
    }

    pub fn iter(&self) -> impl Iterator<Item = &T> {
        self.items.iter()
    }
}

/// True when a stored residual lies within `eps_buf` of `r_p`; `r_p` is
/// pushed afterwards either way.
pub fn detect_cycle<T: Real>(buf: &mut CycleBuffer<T>, r_p: T, eps_buf: T) -> bool {
    let hit = buf.iter().any(|&r| (r - r_p).abs() <= eps_buf);
    buf.push(r_p);
    hit
}
