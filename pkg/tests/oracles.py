"""Slow, independent reference implementations used only by the tests.

Everything here works on plain Python sets and lists so it shares no code
with the package under test.
"""

from collections import deque

LAM = 255
CROSS = [(1, 0), (-1, 0), (0, 1), (0, -1)]


def to_set(mask):
    return {(x, y) for y in range(len(mask)) for x in range(len(mask[0])) if mask[y][x]}


def inside(p, w, h):
    return 0 <= p[0] < w and 0 <= p[1] < h


def dilate_set(s, offsets, w, h):
    return {(x + dx, y + dy) for (x, y) in s for (dx, dy) in offsets if inside((x + dx, y + dy), w, h)}


def erode_set(s, offsets, w, h):
    return {(x, y) for y in range(h) for x in range(w)
            if all((x + dx, y + dy) in s for (dx, dy) in offsets)}


def bfs_dt(evidence, w, h):
    """City-block distance by breadth-first search, mapped to max(0, LAM - d)."""
    dist = {}
    q = deque()
    for p in evidence:
        dist[p] = 0
        q.append(p)
    while q:
        x, y = q.popleft()
        for dx, dy in CROSS:
            n = (x + dx, y + dy)
            if inside(n, w, h) and n not in dist:
                dist[n] = dist[(x, y)] + 1
                q.append(n)
    return [[max(0, LAM - dist[(x, y)]) for x in range(w)] for y in range(h)]


def rule1(s, dt, evidence, w, h, flat):
    """Pixels just outside ``s`` that the external rule inserts."""
    out = set()
    for y in range(h):
        for x in range(w):
            if (x, y) in s:
                continue
            inner = [dt[y + dy][x + dx] for dx, dy in CROSS
                     if inside((x + dx, y + dy), w, h) and (x + dx, y + dy) in s]
            if not inner:
                continue
            m = min(inner)
            v = dt[y][x]
            if v > m or (flat and v == m and (x, y) not in evidence):
                out.add((x, y))
    return out


def rule2(s, dt, w, h, use_max):
    """Pixels of ``s`` that the internal rule removes (in-raster outside neighbours only)."""
    out = set()
    for (x, y) in s:
        outer = [dt[y + dy][x + dx] for dx, dy in CROSS
                 if inside((x + dx, y + dy), w, h) and (x + dx, y + dy) not in s]
        if not outer:
            continue
        ref = max(outer) if use_max else min(outer)
        if dt[y][x] > ref:
            out.add((x, y))
    return out


def simulate(s0, evidence, w, h, max_iters, flat=True, use_max=True):
    """Full stretching loop on sets; returns (final set, iterations, reason, per-iteration counts)."""
    dt = bfs_dt(evidence, w, h)
    s = set(s0)
    seen = {frozenset(s)}
    counts = []
    for it in range(1, max_iters + 1):
        ins = rule1(s, dt, evidence, w, h, flat)
        grown = s | ins
        rem = rule2(grown, dt, w, h, use_max)
        new = grown - rem
        counts.append((len(ins), len(rem)))
        if new == s:
            return new, it, "fixed_point", counts
        if frozenset(new) in seen:
            return new, it, "cycle", counts
        seen.add(frozenset(new))
        s = new
    return s, max_iters, "max_iters", counts


def block_mean_floor(rows):
    h, w = len(rows), len(rows[0])
    return [[(rows[2 * y][2 * x] + rows[2 * y][2 * x + 1] + rows[2 * y + 1][2 * x] + rows[2 * y + 1][2 * x + 1]) // 4
             for x in range(w // 2)] for y in range(h // 2)]


def block_or(rows):
    h, w = len(rows), len(rows[0])
    return [[bool(rows[2 * y][2 * x] or rows[2 * y][2 * x + 1] or rows[2 * y + 1][2 * x] or rows[2 * y + 1][2 * x + 1])
             for x in range(w // 2)] for y in range(h // 2)]


def window_range(rows):
    """max - min over each clipped 3x3 window."""
    h, w = len(rows), len(rows[0])
    out = []
    for y in range(h):
        line = []
        for x in range(w):
            vals = [rows[j][i] for j in range(max(0, y - 1), min(h, y + 2)) for i in range(max(0, x - 1), min(w, x + 2))]
            line.append(max(vals) - min(vals))
        out.append(line)
    return out


def row_interval(spec_h, horizon, vp, left, right, y):
    """Real-valued [left, right] extent of a template on row ``y`` by linear interpolation."""
    last = spec_h - 1
    t = 0.0 if last == horizon else (y - horizon) / (last - horizon)
    return vp + t * (left - vp), vp + t * (right - vp)
