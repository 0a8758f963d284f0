//! Per-vertex variable-length rows packed in one contiguous buffer.
//!
//! Rows are addressed through `(start, len, cap)` triples. A row that
//! outgrows its slot is moved to the tail of the buffer, so appends stay
//! amortised O(1) and the layout stays flat after a bulk build.

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
struct Slot {
    start: u32,
    len: u32,
    cap: u32,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rows<T> {
    slots: Vec<Slot>,
    data: Vec<T>,
}

impl<T> Default for Rows<T> {
    fn default() -> Self {
        Self {
            slots: Vec::new(),
            data: Vec::new(),
        }
    }
}

impl<T: Copy + Default> Rows<T> {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builds rows from `(row, item)` pairs in a single counting pass. Items
    /// keep their relative input order within a row.
    pub fn from_pairs(num_rows: usize, pairs: &[(u32, T)]) -> Self {
        let mut slots = vec![Slot::default(); num_rows];
        for &(r, _) in pairs {
            slots[r as usize].len += 1;
        }
        let mut acc = 0u32;
        for s in &mut slots {
            s.start = acc;
            s.cap = s.len;
            acc += s.len;
        }
        let mut data = vec![T::default(); acc as usize];
        let mut fill: Vec<u32> = slots.iter().map(|s| s.start).collect();
        for &(r, item) in pairs {
            let at = &mut fill[r as usize];
            data[*at as usize] = item;
            *at += 1;
        }
        Self { slots, data }
    }

    /// `num_rows` empty rows with room for `items` items in total.
    pub fn with_capacity(num_rows: usize, items: usize) -> Self {
        Self {
            slots: vec![Slot::default(); num_rows],
            data: Vec::with_capacity(items),
        }
    }

    /// Fills an empty, never-allocated row by appending to the buffer.
    pub fn append_row(&mut self, r: usize, items: &[T]) {
        let slot = &mut self.slots[r];
        debug_assert_eq!(slot.cap, 0);
        *slot = Slot {
            start: self.data.len() as u32,
            len: items.len() as u32,
            cap: items.len() as u32,
        };
        self.data.extend_from_slice(items);
    }

    pub fn num_rows(&self) -> usize {
        self.slots.len()
    }

    /// Total number of items over all rows.
    pub fn total_len(&self) -> usize {
        self.slots.iter().map(|s| s.len as usize).sum()
    }

    /// Length of the backing buffer, including slack.
    pub fn buffer_len(&self) -> usize {
        self.data.len()
    }

    #[inline]
    pub fn row(&self, r: usize) -> &[T] {
        let s = self.slots[r];
        &self.data[s.start as usize..(s.start + s.len) as usize]
    }

    pub fn add_row(&mut self) -> usize {
        self.slots.push(Slot {
            start: self.data.len() as u32,
            len: 0,
            cap: 0,
        });
        self.slots.len() - 1
    }

    fn relocate(&mut self, r: usize, new_cap: usize) {
        let s = self.slots[r];
        let new_start = self.data.len();
        self.data.extend_from_within(s.start as usize..(s.start + s.len) as usize);
        self.data.resize(new_start + new_cap, T::default());
        self.slots[r].start = new_start as u32;
        self.slots[r].cap = new_cap as u32;
    }

    pub fn push(&mut self, r: usize, item: T) {
        if self.slots[r].len == self.slots[r].cap {
            let new_cap = (self.slots[r].cap as usize * 2).max(2);
            self.relocate(r, new_cap);
        }
        let s = &mut self.slots[r];
        self.data[(s.start + s.len) as usize] = item;
        s.len += 1;
    }

    /// Replaces the contents of row `r`.
    pub fn set(&mut self, r: usize, items: &[T]) {
        if items.len() > self.slots[r].cap as usize {
            self.relocate(r, items.len());
        }
        let s = &mut self.slots[r];
        let start = s.start as usize;
        self.data[start..start + items.len()].copy_from_slice(items);
        s.len = items.len() as u32;
    }

    pub fn clear_row(&mut self, r: usize) {
        self.slots[r].len = 0;
    }

    /// Rewrites the buffer without slack, rows in id order.
    pub fn compact(&mut self) {
        let mut data = Vec::with_capacity(self.total_len());
        for s in &mut self.slots {
            let (start, len) = (s.start as usize, s.len as usize);
            s.start = data.len() as u32;
            s.cap = s.len;
            data.extend_from_slice(&self.data[start..start + len]);
        }
        self.data = data;
    }
}

impl<T: Copy + Default + PartialEq> Rows<T> {
    /// Removes the first occurrence of `item` from row `r`. Row order is not
    /// preserved.
    pub fn remove(&mut self, r: usize, item: T) -> bool {
        let s = self.slots[r];
        let (start, len) = (s.start as usize, s.len as usize);
        match self.data[start..start + len].iter().position(|&x| x == item) {
            Some(i) => {
                self.data.swap(start + i, start + len - 1);
                self.slots[r].len -= 1;
                true
            }
            None => false,
        }
    }

    pub fn contains(&self, r: usize, item: T) -> bool {
        self.row(r).contains(&item)
    }
}
