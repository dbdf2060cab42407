//! Indexed binary max-heap of variables ordered by activity.

use crate::lit::Var;

const ABSENT: usize = usize::MAX;

#[derive(Debug, Clone, Default)]
pub(crate) struct VarHeap {
    heap: Vec<Var>,
    position: Vec<usize>,
}

/// Higher activity first; lower variable index breaks ties.
#[inline]
fn before(activity: &[f64], a: Var, b: Var) -> bool {
    let (x, y) = (activity[a.index()], activity[b.index()]);
    x > y || (x == y && a < b)
}

impl VarHeap {
    pub fn grow(&mut self, num_vars: usize) {
        if self.position.len() < num_vars {
            self.position.resize(num_vars, ABSENT);
        }
    }

    pub fn contains(&self, var: Var) -> bool {
        self.position
            .get(var.index())
            .is_some_and(|&p| p != ABSENT)
    }

    pub fn is_empty(&self) -> bool {
        self.heap.is_empty()
    }

    pub fn len(&self) -> usize {
        self.heap.len()
    }

    pub fn get(&self, i: usize) -> Var {
        self.heap[i]
    }

    pub fn insert(&mut self, var: Var, activity: &[f64]) {
        self.grow(var.index() + 1);
        if self.contains(var) {
            return;
        }
        self.position[var.index()] = self.heap.len();
        self.heap.push(var);
        self.sift_up(self.heap.len() - 1, activity);
    }

    /// Restores the heap property after `var`'s activity increased.
    pub fn increased(&mut self, var: Var, activity: &[f64]) {
        if self.contains(var) {
            self.sift_up(self.position[var.index()], activity);
        }
    }

    pub fn pop(&mut self, activity: &[f64]) -> Option<Var> {
        let top = *self.heap.first()?;
        let last = self.heap.pop().expect("non-empty");
        self.position[top.index()] = ABSENT;
        if !self.heap.is_empty() {
            self.heap[0] = last;
            self.position[last.index()] = 0;
            self.sift_down(0, activity);
        }
        Some(top)
    }

    fn sift_up(&mut self, mut i: usize, activity: &[f64]) {
        let var = self.heap[i];
        while i > 0 {
            let parent = (i - 1) / 2;
            if !before(activity, var, self.heap[parent]) {
                break;
            }
            self.heap[i] = self.heap[parent];
            self.position[self.heap[i].index()] = i;
            i = parent;
        }
        self.heap[i] = var;
        self.position[var.index()] = i;
    }

    fn sift_down(&mut self, mut i: usize, activity: &[f64]) {
        let var = self.heap[i];
        loop {
            let left = 2 * i + 1;
            if left >= self.heap.len() {
                break;
            }
            let right = left + 1;
            let child = if right < self.heap.len() && before(activity, self.heap[right], self.heap[left]) {
                right
            } else {
                left
            };
            if !before(activity, self.heap[child], var) {
                break;
            }
            self.heap[i] = self.heap[child];
            self.position[self.heap[i].index()] = i;
            i = child;
        }
        self.heap[i] = var;
        self.position[var.index()] = i;
    }
}
