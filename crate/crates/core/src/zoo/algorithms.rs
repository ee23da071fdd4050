//! The sorting routines. Every comparison goes through [`Ctx`], which
//! records the pair and asks the (possibly noisy) oracle for the outcome.

use super::AlgorithmId;

pub(crate) struct Ctx<'a> {
    pub trace: Vec<(i64, i64)>,
    pub outcomes: Vec<bool>,
    less: &'a mut dyn FnMut(i64, i64) -> bool,
}

impl<'a> Ctx<'a> {
    pub fn new(less: &'a mut dyn FnMut(i64, i64) -> bool) -> Self {
        Ctx {
            trace: Vec::new(),
            outcomes: Vec::new(),
            less,
        }
    }

    fn ask(&mut self, x: i64, y: i64, record: (i64, i64)) -> bool {
        self.trace.push(record);
        let r = (self.less)(x, y);
        self.outcomes.push(r);
        r
    }

    /// Is `x` lighter than `y`? Recorded as `(x, y)`.
    fn lt(&mut self, x: i64, y: i64) -> bool {
        self.ask(x, y, (x, y))
    }

    /// Is `x` heavier than `y`? Recorded as `(x, y)`.
    fn gt(&mut self, x: i64, y: i64) -> bool {
        self.ask(y, x, (x, y))
    }
}

fn bubble_forward(a: &mut [i64], c: &mut Ctx) {
    let n = a.len();
    for pass in 0..n.saturating_sub(1) {
        let mut swapped = false;
        for j in 0..n - 1 - pass {
            if c.gt(a[j], a[j + 1]) {
                a.swap(j, j + 1);
                swapped = true;
            }
        }
        if !swapped {
            break;
        }
    }
}

fn bubble_bidirectional(a: &mut [i64], c: &mut Ctx) {
    if a.len() < 2 {
        return;
    }
    let (mut lo, mut hi) = (0, a.len() - 1);
    while lo < hi {
        let mut swapped = false;
        for j in lo..hi {
            if c.gt(a[j], a[j + 1]) {
                a.swap(j, j + 1);
                swapped = true;
            }
        }
        hi -= 1;
        if !swapped || lo >= hi {
            break;
        }
        swapped = false;
        for j in (lo..hi).rev() {
            if c.gt(a[j], a[j + 1]) {
                a.swap(j, j + 1);
                swapped = true;
            }
        }
        lo += 1;
        if !swapped {
            break;
        }
    }
}

fn move_to(a: &mut [i64], from: usize, to: usize) {
    if from > to {
        a[to..=from].rotate_right(1);
    } else {
        a[from..=to].rotate_left(1);
    }
}

fn linear_insert_bwd(a: &mut [i64], i: usize, c: &mut Ctx) {
    let key = a[i];
    let mut j = i;
    while j > 0 && c.gt(a[j - 1], key) {
        a[j] = a[j - 1];
        j -= 1;
    }
    a[j] = key;
}

fn binary_insert(a: &mut [i64], i: usize, c: &mut Ctx) {
    let key = a[i];
    let (mut lo, mut hi) = (0, i);
    while lo < hi {
        let mid = (lo + hi) / 2;
        if c.lt(key, a[mid]) {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    move_to(a, i, lo);
}

fn insertion_linear_bwd(a: &mut [i64], c: &mut Ctx) {
    for i in 1..a.len() {
        linear_insert_bwd(a, i, c);
    }
}

fn insertion_linear_fwd(a: &mut [i64], c: &mut Ctx) {
    for i in 1..a.len() {
        let key = a[i];
        let mut pos = 0;
        while pos < i && c.lt(a[pos], key) {
            pos += 1;
        }
        move_to(a, i, pos);
    }
}

fn insertion_binary_fwd(a: &mut [i64], c: &mut Ctx) {
    for i in 1..a.len() {
        binary_insert(a, i, c);
    }
}

/// Grows a sorted suffix from the right end.
fn insertion_binary_bwd(a: &mut [i64], c: &mut Ctx) {
    let n = a.len();
    for i in (0..n.saturating_sub(1)).rev() {
        let key = a[i];
        let (mut lo, mut hi) = (i + 1, n);
        while lo < hi {
            let mid = (lo + hi) / 2;
            if c.lt(a[mid], key) {
                lo = mid + 1;
            } else {
                hi = mid;
            }
        }
        move_to(a, i, lo - 1);
    }
}

/// Opens the sorted prefix at its middle, then scans within the chosen half.
fn dictionary_insert(a: &mut [i64], i: usize, c: &mut Ctx, high_bias: bool) {
    let key = a[i];
    let mid = if high_bias { i / 2 } else { (i - 1) / 2 };
    let pos = if c.lt(key, a[mid]) {
        if high_bias {
            let mut p = mid;
            while p > 0 && c.lt(key, a[p - 1]) {
                p -= 1;
            }
            p
        } else {
            let mut p = 0;
            while p < mid && c.lt(a[p], key) {
                p += 1;
            }
            p
        }
    } else if high_bias {
        let mut p = i;
        while p > mid + 1 && c.lt(key, a[p - 1]) {
            p -= 1;
        }
        p
    } else {
        let mut p = mid + 1;
        while p < i && c.lt(a[p], key) {
            p += 1;
        }
        p
    };
    move_to(a, i, pos);
}

fn dictionary(a: &mut [i64], c: &mut Ctx, high_bias: bool) {
    for i in 1..a.len() {
        dictionary_insert(a, i, c, high_bias);
    }
}

fn hybrid(a: &mut [i64], c: &mut Ctx, k: usize) {
    for i in 1..a.len() {
        if i < k {
            linear_insert_bwd(a, i, c);
        } else {
            dictionary_insert(a, i, c, false);
        }
    }
}

/// Merges two sorted runs. Two single items are recorded in run order;
/// longer merges record each pair smaller-first.
fn merge(l: &[i64], r: &[i64], c: &mut Ctx) -> Vec<i64> {
    let mut out = Vec::with_capacity(l.len() + r.len());
    let singles = l.len() == 1 && r.len() == 1;
    let (mut i, mut j) = (0, 0);
    while i < l.len() && j < r.len() {
        let (x, y) = (l[i], r[j]);
        let record = if singles { (x, y) } else { (x.min(y), x.max(y)) };
        if c.ask(x, y, record) {
            out.push(x);
            i += 1;
        } else {
            out.push(y);
            j += 1;
        }
    }
    out.extend_from_slice(&l[i..]);
    out.extend_from_slice(&r[j..]);
    out
}

fn merge_in_place(a: &mut [i64], lo: usize, mid: usize, hi: usize, c: &mut Ctx) {
    let merged = merge(&a[lo..mid], &a[mid..hi], c);
    a[lo..hi].copy_from_slice(&merged);
}

fn top_down(a: &mut [i64], lo: usize, hi: usize, c: &mut Ctx, right_first: bool) {
    if hi - lo < 2 {
        return;
    }
    let mid = lo + (hi - lo) / 2;
    if right_first {
        top_down(a, mid, hi, c, true);
        top_down(a, lo, mid, c, true);
    } else {
        top_down(a, lo, mid, c, false);
        top_down(a, mid, hi, c, false);
    }
    merge_in_place(a, lo, mid, hi, c);
}

fn split_tree(lo: usize, hi: usize, depth: usize, out: &mut Vec<(usize, usize, usize, usize)>) {
    if hi - lo < 2 {
        return;
    }
    let mid = lo + (hi - lo) / 2;
    out.push((depth, lo, mid, hi));
    split_tree(lo, mid, depth + 1, out);
    split_tree(mid, hi, depth + 1, out);
}

/// Top-down splits, merged one level at a time from the deepest level.
fn top_down_level_order(a: &mut [i64], c: &mut Ctx) {
    let mut tasks = Vec::new();
    split_tree(0, a.len(), 0, &mut tasks);
    tasks.sort_by_key(|t| std::cmp::Reverse(t.0));
    for (_, lo, mid, hi) in tasks {
        merge_in_place(a, lo, mid, hi, c);
    }
}

fn bottom_up_level_order(a: &mut [i64], c: &mut Ctx) {
    let n = a.len();
    let mut width = 1;
    while width < n {
        let mut lo = 0;
        while lo < n {
            let mid = (lo + width).min(n);
            let hi = (lo + 2 * width).min(n);
            if mid < hi {
                merge_in_place(a, lo, mid, hi, c);
            }
            lo += 2 * width;
        }
        width *= 2;
    }
}

/// Runs are merged as soon as the two newest have equal length, like a
/// binary counter; leftovers are merged from the right at the end.
fn bottom_up_cascade(a: &mut [i64], c: &mut Ctx) {
    let mut stack: Vec<Vec<i64>> = Vec::new();
    for &x in a.iter() {
        stack.push(vec![x]);
        while stack.len() >= 2 && stack[stack.len() - 1].len() == stack[stack.len() - 2].len() {
            let r = stack.pop().expect("two runs");
            let l = stack.pop().expect("two runs");
            stack.push(merge(&l, &r, c));
        }
    }
    while stack.len() >= 2 {
        let r = stack.pop().expect("two runs");
        let l = stack.pop().expect("two runs");
        stack.push(merge(&l, &r, c));
    }
    if let Some(run) = stack.pop() {
        a.copy_from_slice(&run);
    }
}

/// Natural merge sort: split into ascending runs, then merge neighbours
/// level by level.
fn bottom_up_natural(a: &mut [i64], c: &mut Ctx) {
    if a.is_empty() {
        return;
    }
    let mut runs = vec![vec![a[0]]];
    for i in 1..a.len() {
        if c.lt(a[i - 1], a[i]) {
            runs.last_mut().expect("nonempty").push(a[i]);
        } else {
            runs.push(vec![a[i]]);
        }
    }
    while runs.len() > 1 {
        let mut next = Vec::with_capacity(runs.len().div_ceil(2));
        for pair in runs.chunks(2) {
            next.push(match pair {
                [l, r] => merge(l, r, c),
                [l] => l.clone(),
                _ => unreachable!(),
            });
        }
        runs = next;
    }
    a.copy_from_slice(&runs[0]);
}

#[derive(Clone, Copy)]
pub(crate) enum Pivot {
    First,
    Last,
    Middle,
}

fn pivot_index(p: Pivot, lo: usize, hi: usize) -> usize {
    match p {
        Pivot::First => lo,
        Pivot::Last => hi,
        Pivot::Middle => lo + (hi - lo) / 2,
    }
}

fn quick_lomuto(a: &mut [i64], lo: usize, hi: usize, p: Pivot, c: &mut Ctx) {
    if lo >= hi {
        return;
    }
    a.swap(pivot_index(p, lo, hi), hi);
    let pivot = a[hi];
    let mut i = lo;
    for j in lo..hi {
        if c.lt(a[j], pivot) {
            a.swap(i, j);
            i += 1;
        }
    }
    a.swap(i, hi);
    if i > lo {
        quick_lomuto(a, lo, i - 1, p, c);
    }
    quick_lomuto(a, i + 1, hi, p, c);
}

fn quick_hoare(a: &mut [i64], lo: usize, hi: usize, p: Pivot, c: &mut Ctx) {
    if lo >= hi {
        return;
    }
    let pivot = a[pivot_index(p, lo, hi)];
    let (mut i, mut j) = (lo as isize - 1, hi as isize + 1);
    let split = loop {
        loop {
            i += 1;
            if i as usize > hi || !c.lt(a[i as usize], pivot) {
                break;
            }
        }
        loop {
            j -= 1;
            if j < lo as isize || !c.gt(a[j as usize], pivot) {
                break;
            }
        }
        if i >= j {
            break j;
        }
        a.swap(i as usize, j as usize);
    };
    // keep both halves strictly smaller than the range
    let split = split.clamp(lo as isize, hi as isize - 1) as usize;
    quick_hoare(a, lo, split, p, c);
    quick_hoare(a, split + 1, hi, p, c);
}

pub(crate) fn run(alg: AlgorithmId, a: &mut [i64], c: &mut Ctx) {
    use AlgorithmId::*;
    let last = a.len().saturating_sub(1);
    match alg {
        BsForward => bubble_forward(a, c),
        BsBidirectional => bubble_bidirectional(a, c),
        DsLowBias => dictionary(a, c, false),
        DsHighBias => dictionary(a, c, true),
        IsLinearFwd => insertion_linear_fwd(a, c),
        IsLinearBwd => insertion_linear_bwd(a, c),
        IsBinaryFwd => insertion_binary_fwd(a, c),
        IsBinaryBwd => insertion_binary_bwd(a, c),
        MsTdLeftFirst => top_down(a, 0, a.len(), c, false),
        MsTdRightFirst => top_down(a, 0, a.len(), c, true),
        MsTdLevelOrder => top_down_level_order(a, c),
        MsBuLevelOrder => bottom_up_level_order(a, c),
        MsBuCascade => bottom_up_cascade(a, c),
        MsBuNatural => bottom_up_natural(a, c),
        QsFirstLomuto => quick_lomuto(a, 0, last, Pivot::First, c),
        QsFirstHoare => quick_hoare(a, 0, last, Pivot::First, c),
        QsLastLomuto => quick_lomuto(a, 0, last, Pivot::Last, c),
        QsLastHoare => quick_hoare(a, 0, last, Pivot::Last, c),
        QsMiddleLomuto => quick_lomuto(a, 0, last, Pivot::Middle, c),
        QsMiddleHoare => quick_hoare(a, 0, last, Pivot::Middle, c),
        Hybrid3 => hybrid(a, c, 3),
        Hybrid4 => hybrid(a, c, 4),
        Hybrid5 => hybrid(a, c, 5),
        Hybrid6 => hybrid(a, c, 6),
    }
}
