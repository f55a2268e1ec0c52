"""Built-in few-shot examples: ten (function, contract) pairs per logic.

Each entry carries unit tests so the bank can be validated with the checker;
only the function text (never the tests) is shown in prompts.
"""

from __future__ import annotations

from functools import lru_cache

from ..speclang import SpecLevel

# (corpus entry text, contract text)
BANK = {
    SpecLevel.PROP: [
        ("""fn max2(x: int, y: int) -> int {
  if (x > y) { return x; }
  return y;
}
#[test] a(1, 2)
#[test] b(5, -3)""",
         "requires: true\nensures: (__out == x || __out == y) && __out >= x && __out >= y"),
        ("""fn min2(x: int, y: int) -> int {
  if (x < y) { return x; }
  return y;
}
#[test] a(1, 2)
#[test] b(5, -3)""",
         "requires: true\nensures: (__out == x || __out == y) && __out <= x && __out <= y"),
        ("""fn is_even(x: int) -> bool {
  return x % 2 == 0;
}
#[test] a(4)
#[test] b(7)""",
         "requires: true\nensures: (__out == true ==> x % 2 == 0) && "
         "(__out == false ==> x % 2 != 0)"),
        ("""fn clamp(x: int, lo: int, hi: int) -> int {
  if (x < lo) { return lo; }
  if (x > hi) { return hi; }
  return x;
}
#[test] a(5, 0, 10)
#[test] b(-5, 0, 10)
#[test] c(50, 0, 10)""",
         "requires: lo <= hi\nensures: lo <= __out && __out <= hi && "
         "(lo <= x && x <= hi ==> __out == x)"),
        ("""fn sign(x: int) -> int {
  if (x > 0) { return 1; }
  if (x < 0) { return -1; }
  return 0;
}
#[test] a(9)
#[test] b(-2)
#[test] c(0)""",
         "requires: true\nensures: (x > 0 ==> __out == 1) && (x == 0 ==> __out == 0) && "
         "(x < 0 ==> __out == -1)"),
        ("""fn abs(x: int) -> int {
  if (x < 0) { return -x; }
  return x;
}
#[test] a(-4)
#[test] b(3)""",
         "requires: true\nensures: (x >= 0 ==> __out == x) && (x < 0 ==> __out == -x)"),
        ("""fn quotient(x: int, y: int) -> int {
  return x / y;
}
#[test] a(7, 2)
#[test] b(-9, 3)""",
         "requires: y != 0\nensures: __out == x / y"),
        ("""/// Mask with the lowest n bits set.
fn low_bits(n: int) -> int {
  return (1 << n) - 1;
}
#[test] a(3)
#[test] b(0)""",
         "requires: 0 <= n && n < 64\nensures: __out == ((1 << n) - 1)"),
        ("""fn in_range(x: int, lo: int, hi: int) -> bool {
  return lo <= x && x < hi;
}
#[test] a(3, 0, 5)
#[test] b(9, 0, 5)""",
         "requires: true\nensures: (__out == true ==> lo <= x && x < hi) && "
         "(__out == false ==> x < lo || x >= hi)"),
        ("""fn implies(a: bool, b: bool) -> bool {
  return !a || b;
}
#[test] a(true, false)
#[test] b(false, false)""",
         "requires: true\nensures: __out == false ==> a == true && b == false"),
    ],
    SpecLevel.FOL: [
        ("""/// True iff v occurs in a.
fn contains(a: int[], v: int) -> bool {
  var i: int = 0;
  while (i < len(a)) {
    if (a[i] == v) { return true; }
    i = i + 1;
  }
  return false;
}
#[test] a([1, 2, 3], 2)
#[test] b([1, 2, 3], 7)""",
         "requires: true\nensures: (__out == true ==> EXISTS(0, i, len(a), a[i] == v)) && "
         "(__out == false ==> FORALL(0, i, len(a), a[i] != v))"),
        ("""fn max_elem(a: int[]) -> int {
  var m: int = a[0];
  var i: int = 1;
  while (i < len(a)) {
    if (a[i] > m) { m = a[i]; }
    i = i + 1;
  }
  return m;
}
#[test] a([3, 9, 2])""",
         "requires: len(a) > 0\nensures: FORALL(0, i, len(a), a[i] <= __out) && "
         "EXISTS(0, i, len(a), a[i] == __out)"),
        ("""fn min_elem(a: int[]) -> int {
  var m: int = a[0];
  var i: int = 1;
  while (i < len(a)) {
    if (a[i] < m) { m = a[i]; }
    i = i + 1;
  }
  return m;
}
#[test] a([3, 9, 2])""",
         "requires: len(a) > 0\nensures: FORALL(0, i, len(a), __out <= a[i]) && "
         "EXISTS(0, i, len(a), a[i] == __out)"),
        ("""fn count_eq(a: int[], v: int) -> int {
  var n: int = 0;
  var i: int = 0;
  while (i < len(a)) {
    if (a[i] == v) { n = n + 1; }
    i = i + 1;
  }
  return n;
}
#[test] a([1, 2, 1], 1)""",
         "requires: true\nensures: 0 <= __out && __out <= len(a) && "
         "(__out == 0 ==> FORALL(0, i, len(a), a[i] != v))"),
        ("""fn all_positive(a: int[]) -> bool {
  var i: int = 0;
  while (i < len(a)) {
    if (a[i] <= 0) { return false; }
    i = i + 1;
  }
  return true;
}
#[test] a([1, 2])
#[test] b([1, 0])""",
         "requires: true\nensures: (__out == true ==> FORALL(0, i, len(a), a[i] > 0)) && "
         "(__out == false ==> EXISTS(0, i, len(a), a[i] <= 0))"),
        ("""fn index_of(a: int[], v: int) -> int {
  var i: int = 0;
  while (i < len(a)) {
    if (a[i] == v) { return i; }
    i = i + 1;
  }
  return -1;
}
#[test] a([4, 5, 6], 5)
#[test] b([4, 5, 6], 1)""",
         "requires: true\nensures: (__out == -1 ==> FORALL(0, i, len(a), a[i] != v)) && "
         "(__out != -1 ==> 0 <= __out && __out < len(a) && a[__out] == v)"),
        ("""fn is_sorted(a: int[]) -> bool {
  var i: int = 1;
  while (i < len(a)) {
    if (a[i - 1] > a[i]) { return false; }
    i = i + 1;
  }
  return true;
}
#[test] a([1, 2, 2])
#[test] b([3, 1])""",
         "requires: true\nensures: __out == true ==> FORALL(0, i, len(a) - 1, a[i] <= a[i + 1])"),
        ("""fn all_equal(a: int[]) -> bool {
  var i: int = 1;
  while (i < len(a)) {
    if (a[i] != a[0]) { return false; }
    i = i + 1;
  }
  return true;
}
#[test] a([2, 2])
#[test] b([2, 3])""",
         "requires: true\nensures: __out == true ==> FORALL(0, i, len(a), a[i] == a[0])"),
        ("""fn count_below(a: int[], t: int) -> int {
  var n: int = 0;
  var i: int = 0;
  while (i < len(a)) {
    if (a[i] < t) { n = n + 1; }
    i = i + 1;
  }
  return n;
}
#[test] a([1, 5, 2], 3)""",
         "requires: true\nensures: 0 <= __out && __out <= len(a) && "
         "(FORALL(0, i, len(a), a[i] >= t) ==> __out == 0)"),
        ("""fn last_index(a: int[], v: int) -> int {
  var i: int = len(a) - 1;
  while (i >= 0) {
    if (a[i] == v) { return i; }
    i = i - 1;
  }
  return -1;
}
#[test] a([5, 1, 5], 5)""",
         "requires: true\nensures: (__out == -1 ==> FORALL(0, i, len(a), a[i] != v)) && "
         "(__out != -1 ==> a[__out] == v && FORALL(__out + 1, i, len(a), a[i] != v))"),
    ],
    SpecLevel.PROP_SL: [
        ("""/// Exchanges the values at x and y.
fn swap(x: ptr, y: ptr) -> void {
  var t: int = *x;
  *x = *y;
  *y = t;
}
#[test] a(_, _) with heap { x: [1], y: [2] }""",
         "requires: (x |-> a) * (y |-> b)\nensures: (x |-> b) * (y |-> a)"),
        ("""fn get(p: ptr) -> int {
  return *p;
}
#[test] a(_) with heap { p: [7] }""",
         "requires: p |-> v\nensures: __out == v && p |-> v"),
        ("""fn set(p: ptr, v: int) -> void {
  *p = v;
}
#[test] a(_, 4) with heap { p: [0] }""",
         "requires: p |-> _\nensures: p |-> v"),
        ("""fn incr(p: ptr) -> void {
  *p = *p + 1;
}
#[test] a(_) with heap { p: [1] }""",
         "requires: p |-> n\nensures: p |-> (n + 1)"),
        ("""/// Decodes a two-byte sequence.
fn get2(pc: ptr) -> int {
  return ((pc[0] & 31) << 6) | (pc[1] & 63);
}
#[test] a(_) with heap { pc: [195, 169] }""",
         "requires: (pc |-> _) * (pc + 1 |-> _)\n"
         "ensures: __out == ((pc[0] & 0x1f) << 6) | (pc[1] & 63)"),
        ("""fn read_or_zero(p: ptr) -> int {
  if (p == null) { return 0; }
  return *p;
}
#[test] a(_) with heap { p: [3] }
#[test] b(null)""",
         "requires: p == nullptr || p |-> _\n"
         "ensures: (p == nullptr ==> __out == 0) && (p != nullptr ==> __out == p[0])"),
        ("""fn copy_cell(dst: ptr, src: ptr) -> void {
  *dst = *src;
}
#[test] a(_, _) with heap { dst: [0], src: [5] }""",
         "requires: (dst |-> _) * (src |-> v)\nensures: (dst |-> v) * (src |-> v)"),
        ("""fn fresh() -> ptr {
  var p: ptr = alloc(1);
  *p = 0;
  return p;
}
#[test] a()""",
         "requires: true\nensures: __out |-> 0"),
        ("""fn max_cell(p: ptr, q: ptr) -> int {
  if (*p > *q) { return *p; }
  return *q;
}
#[test] a(_, _) with heap { p: [1], q: [8] }""",
         "requires: p |-> a && q |-> b\n"
         "ensures: (__out == a || __out == b) && __out >= a && __out >= b"),
        ("""fn zero_pair(p: ptr) -> void {
  p[0] = 0;
  p[1] = 0;
}
#[test] a(_) with heap { p: [4, 5] }""",
         "requires: (p |-> _) * (p + 1 |-> _)\nensures: (p |-> 0) * (p + 1 |-> 0)"),
    ],
    SpecLevel.FOSL: [
        ("""fn fill(p: ptr, n: int, v: int) -> void {
  var i: int = 0;
  while (i < n) {
    p[i] = v;
    i = i + 1;
  }
}
#[test] a(_, 2, 9) with heap { p: [0, 0] }""",
         "requires: 0 <= n && SEPFORALL(0, i, n, p + i |-> _)\n"
         "ensures: SEPFORALL(0, i, n, p + i |-> v)"),
        ("""/// Copies n cells from src to dst and returns dst.
fn copy(dst: ptr, src: ptr, n: int) -> ptr {
  var i: int = 0;
  while (i < n) {
    dst[i] = src[i];
    i = i + 1;
  }
  return dst;
}
#[test] a(_, _, 2) with heap { dst: [0, 0], src: [1, 2] }""",
         "requires: 0 <= n && SEPFORALL(0, i, n, dst + i |-> _) * "
         "SEPFORALL(0, i, n, src + i |-> _)\n"
         "ensures: __out == dst && SEPFORALL(0, i, n, __out + i |-> src[i])"),
        ("""fn zero_fill(p: ptr, n: int) -> void {
  var i: int = 0;
  while (i < n) {
    p[i] = 0;
    i = i + 1;
  }
}
#[test] a(_, 3) with heap { p: [1, 2, 3] }""",
         "requires: 0 <= n && SEPFORALL(0, i, n, p + i |-> _)\n"
         "ensures: SEPFORALL(0, i, n, p + i |-> 0)"),
        ("""fn count_zero_cells(p: ptr, n: int) -> int {
  var c: int = 0;
  var i: int = 0;
  while (i < n) {
    if (p[i] == 0) { c = c + 1; }
    i = i + 1;
  }
  return c;
}
#[test] a(_, 3) with heap { p: [0, 2, 0] }""",
         "requires: 0 <= n && SEPFORALL(0, i, n, p + i |-> _)\n"
         "ensures: 0 <= __out && __out <= n && SEPFORALL(0, i, n, p + i |-> _)"),
        ("""fn find_cell(p: ptr, n: int, v: int) -> int {
  var i: int = 0;
  while (i < n) {
    if (p[i] == v) { return i; }
    i = i + 1;
  }
  return -1;
}
#[test] a(_, 2, 8) with heap { p: [7, 8] }""",
         "requires: 0 <= n && SEPFORALL(0, i, n, p + i |-> _)\n"
         "ensures: (__out == -1 ==> FORALL(0, i, n, p[i] != v)) && "
         "(__out != -1 ==> p[__out] == v)"),
        ("""fn alloc_zeroed(n: int) -> ptr {
  var p: ptr = alloc(n);
  var i: int = 0;
  while (i < n) {
    p[i] = 0;
    i = i + 1;
  }
  return p;
}
#[test] a(3)""",
         "requires: 0 < n && n < 64\nensures: SEPFORALL(0, i, n, __out + i |-> 0)"),
        ("""fn is_zero_block(p: ptr, n: int) -> bool {
  var i: int = 0;
  while (i < n) {
    if (p[i] != 0) { return false; }
    i = i + 1;
  }
  return true;
}
#[test] a(_, 2) with heap { p: [0, 0] }
#[test] b(_, 2) with heap { p: [0, 1] }""",
         "requires: 0 <= n && SEPFORALL(0, i, n, p + i |-> _)\n"
         "ensures: __out == true ==> SEPFORALL(0, i, n, p + i |-> 0)"),
        ("""fn incr_all(p: ptr, n: int) -> void {
  var i: int = 0;
  while (i < n) {
    p[i] = p[i] + 1;
    i = i + 1;
  }
}
#[test] a(_, 2) with heap { p: [1, 2] }""",
         "requires: 0 <= n && SEPFORALL(0, i, n, p + i |-> _)\n"
         "ensures: SEPFORALL(0, i, n, p + i |-> _)"),
        ("""fn max_cells(p: ptr, n: int) -> int {
  var m: int = p[0];
  var i: int = 1;
  while (i < n) {
    if (p[i] > m) { m = p[i]; }
    i = i + 1;
  }
  return m;
}
#[test] a(_, 3) with heap { p: [4, 9, 1] }""",
         "requires: 0 < n && SEPFORALL(0, i, n, p + i |-> _)\n"
         "ensures: FORALL(0, i, n, p[i] <= __out) && EXISTS(0, i, n, p[i] == __out)"),
        ("""/// True iff some cell of the block holds v.
fn in_use(p: ptr, n: int, v: int) -> bool {
  var i: int = 0;
  while (i < n) {
    if (p[i] == v) { return true; }
    i = i + 1;
  }
  return false;
}
#[test] a(_, 2, 5) with heap { p: [1, 5] }""",
         "requires: 0 <= n && SEPFORALL(0, i, n, p + i |-> _)\n"
         "ensures: __out == true ==> SEPEXISTS(0, i, n, p + i |-> v)"),
    ],
}


@lru_cache(maxsize=None)
def _parsed(level: SpecLevel) -> tuple:
    from ..minilang import parse_entry
    out = []
    for text, contract in BANK[level]:
        fn, _ = parse_entry(text)
        source = fn.source
        if fn.doc:
            source = "\n".join(f"/// {line}" for line in fn.doc.splitlines()) + "\n" + source
        out.append((fn.name, source, contract))
    return tuple(out)


def examples_for(level: SpecLevel, exclude: str = "") -> list:
    """``(function text, contract text)`` pairs for ``level`` (without unit tests), leaving out
    any example named ``exclude``."""
    return [(src, contract) for name, src, contract in _parsed(level) if name != exclude]
