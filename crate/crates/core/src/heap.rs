//! Addressable binary min-heap over dense integer ids.

const ABSENT: usize = usize::MAX;

/// Binary min-heap of ids in `0..capacity` keyed by `f64`, with
/// back-pointers for `decrease_key`. Equal keys order by smaller id.
#[derive(Clone, Debug)]
pub struct IndexedMinHeap {
    heap: Vec<usize>,
    pos: Vec<usize>,
    key: Vec<f64>,
}

impl IndexedMinHeap {
    pub fn new(capacity: usize) -> Self {
        IndexedMinHeap {
            heap: Vec::new(),
            pos: vec![ABSENT; capacity],
            key: vec![f64::INFINITY; capacity],
        }
    }

    pub fn len(&self) -> usize {
        self.heap.len()
    }

    pub fn is_empty(&self) -> bool {
        self.heap.is_empty()
    }

    #[inline]
    pub fn contains(&self, id: usize) -> bool {
        self.pos[id] != ABSENT
    }

    pub fn key(&self, id: usize) -> Option<f64> {
        self.contains(id).then(|| self.key[id])
    }

    pub fn peek(&self) -> Option<(usize, f64)> {
        self.heap.first().map(|&id| (id, self.key[id]))
    }

    /// Insert `id`, or lower its key if already present and `key` is smaller.
    pub fn push_or_decrease(&mut self, id: usize, key: f64) {
        if self.contains(id) {
            self.decrease_key(id, key);
        } else {
            self.insert(id, key);
        }
    }

    pub fn insert(&mut self, id: usize, key: f64) {
        assert!(!self.contains(id), "id {id} already in heap");
        debug_assert!(!key.is_nan());
        self.key[id] = key;
        self.pos[id] = self.heap.len();
        self.heap.push(id);
        self.sift_up(self.heap.len() - 1);
    }

    /// Lower the key of a queued id; larger keys are ignored.
    pub fn decrease_key(&mut self, id: usize, key: f64) {
        let p = self.pos[id];
        assert!(p != ABSENT, "id {id} not in heap");
        if key < self.key[id] {
            self.key[id] = key;
            self.sift_up(p);
        }
    }

    pub fn pop(&mut self) -> Option<(usize, f64)> {
        let top = *self.heap.first()?;
        let last = self.heap.pop().expect("non-empty");
        if !self.heap.is_empty() {
            self.heap[0] = last;
            self.pos[last] = 0;
            self.sift_down(0);
        }
        self.pos[top] = ABSENT;
        Some((top, self.key[top]))
    }

    #[inline]
    fn less(&self, a: usize, b: usize) -> bool {
        let (ka, kb) = (self.key[a], self.key[b]);
        ka < kb || (ka == kb && a < b)
    }

    fn sift_up(&mut self, mut p: usize) {
        let id = self.heap[p];
        while p > 0 {
            let parent = (p - 1) / 2;
            let pid = self.heap[parent];
            if !self.less(id, pid) {
                break;
            }
            self.heap[p] = pid;
            self.pos[pid] = p;
            p = parent;
        }
        self.heap[p] = id;
        self.pos[id] = p;
    }

    fn sift_down(&mut self, mut p: usize) {
        let id = self.heap[p];
        let len = self.heap.len();
        loop {
            let l = 2 * p + 1;
            if l >= len {
                break;
            }
            let r = l + 1;
            let c = if r < len && self.less(self.heap[r], self.heap[l]) { r } else { l };
            let cid = self.heap[c];
            if !self.less(cid, id) {
                break;
            }
            self.heap[p] = cid;
            self.pos[cid] = p;
            p = c;
        }
        self.heap[p] = id;
        self.pos[id] = p;
    }

    /// Check heap order and back-pointers. Used by tests.
    pub fn validate(&self) -> bool {
        for (p, &id) in self.heap.iter().enumerate() {
            if self.pos[id] != p {
                return false;
            }
            if p > 0 && self.less(id, self.heap[(p - 1) / 2]) {
                return false;
            }
        }
        let queued = self.pos.iter().filter(|&&p| p != ABSENT).count();
        queued == self.heap.len()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn pops_in_key_order_with_index_ties() {
        let mut h = IndexedMinHeap::new(10);
        h.insert(5, 1.0);
        h.insert(2, 1.0);
        h.insert(7, 0.5);
        h.insert(1, 3.0);
        h.decrease_key(1, 0.25);
        let order: Vec<_> = std::iter::from_fn(|| h.pop()).map(|(id, _)| id).collect();
        assert_eq!(order, vec![1, 7, 2, 5]);
    }

    #[test]
    fn decrease_key_ignores_larger() {
        let mut h = IndexedMinHeap::new(3);
        h.insert(0, 1.0);
        h.decrease_key(0, 2.0);
        assert_eq!(h.key(0), Some(1.0));
        h.push_or_decrease(0, 0.5);
        assert_eq!(h.key(0), Some(0.5));
        assert_eq!(h.pop(), Some((0, 0.5)));
        assert!(h.pop().is_none());
        assert!(!h.contains(0));
    }

    #[test]
    fn infinite_keys_are_fine() {
        let mut h = IndexedMinHeap::new(3);
        h.insert(2, f64::INFINITY);
        h.insert(1, f64::INFINITY);
        h.insert(0, 4.0);
        assert_eq!(h.pop().unwrap().0, 0);
        assert_eq!(h.pop().unwrap().0, 1);
    }

    #[derive(Debug, Clone)]
    enum Op {
        Push(usize, f64),
        Decrease(usize, f64),
        Pop,
    }

    fn op() -> impl Strategy<Value = Op> {
        prop_oneof![
            (0usize..64, 0.0..100.0f64).prop_map(|(i, k)| Op::Push(i, k)),
            (0usize..64, 0.0..100.0f64).prop_map(|(i, k)| Op::Decrease(i, k)),
            Just(Op::Pop),
        ]
    }

    proptest! {
        #[test]
        fn randomized_stress(ops in proptest::collection::vec(op(), 1..400)) {
            let mut h = IndexedMinHeap::new(64);
            let mut model: std::collections::BTreeMap<usize, f64> = Default::default();
            for op in ops {
                match op {
                    Op::Push(i, k) => {
                        h.push_or_decrease(i, k);
                        let e = model.entry(i).or_insert(k);
                        *e = e.min(k);
                    }
                    Op::Decrease(i, k) => {
                        if h.contains(i) {
                            h.decrease_key(i, k);
                            let e = model.get_mut(&i).unwrap();
                            *e = e.min(k);
                        }
                    }
                    Op::Pop => {
                        let expect = model
                            .iter()
                            .min_by(|a, b| a.1.total_cmp(b.1).then(a.0.cmp(b.0)))
                            .map(|(&i, &k)| (i, k));
                        prop_assert_eq!(h.pop(), expect);
                        if let Some((i, _)) = expect {
                            model.remove(&i);
                        }
                    }
                }
                prop_assert!(h.validate());
                prop_assert_eq!(h.len(), model.len());
            }
        }
    }
}
