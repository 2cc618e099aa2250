#!/usr/bin/env python3
"""Writes the bundled MovingAI maps under crates/core/maps/.

Output is deterministic: every map draws from its own seeded generator.
Terrain characters: '.' ground, 'T' tree, 'S' swamp, 'W' water, '@' obstacle.
"""

import random
from collections import deque
from pathlib import Path

OUT = Path(__file__).resolve().parent.parent / "crates" / "core" / "maps"


def blank(w, h, ch="."):
    return [[ch] * w for _ in range(h)]


def disk(grid, cx, cy, r, ch, only=None):
    h, w = len(grid), len(grid[0])
    for y in range(max(0, int(cy - r)), min(h, int(cy + r) + 1)):
        for x in range(max(0, int(cx - r)), min(w, int(cx + r) + 1)):
            if (x - cx) ** 2 + (y - cy) ** 2 <= r * r and (only is None or grid[y][x] in only):
                grid[y][x] = ch


def blob(grid, rng, cx, cy, size, ch, only=None):
    """Union of a few overlapping disks around (cx, cy)."""
    for _ in range(rng.randint(3, 6)):
        dx = rng.uniform(-size, size) * 0.6
        dy = rng.uniform(-size, size) * 0.6
        disk(grid, cx + dx, cy + dy, rng.uniform(size * 0.4, size * 0.8), ch, only)


def rect(grid, x0, y0, x1, y1, ch):
    for y in range(y0, y1):
        for x in range(x0, x1):
            if 0 <= y < len(grid) and 0 <= x < len(grid[0]):
                grid[y][x] = ch


def river(grid, rng, x, width, ch="W", wobble=1):
    h = len(grid)
    for y in range(h):
        x += rng.choice([-wobble, 0, 0, wobble])
        x = max(2, min(len(grid[0]) - width - 2, x))
        for k in range(width):
            grid[y][x + k] = ch
    return grid


def keep_largest_ground(grid):
    """Turns ground cells outside the largest 8-connected ground region into
    trees, so every ground cell is reachable for ground vehicles."""
    h, w = len(grid), len(grid[0])
    seen = [[False] * w for _ in range(h)]
    regions = []
    for sy in range(h):
        for sx in range(w):
            if grid[sy][sx] != "." or seen[sy][sx]:
                continue
            comp = []
            q = deque([(sx, sy)])
            seen[sy][sx] = True
            while q:
                x, y = q.popleft()
                comp.append((x, y))
                for dx in (-1, 0, 1):
                    for dy in (-1, 0, 1):
                        nx, ny = x + dx, y + dy
                        if (dx or dy) and 0 <= nx < w and 0 <= ny < h and not seen[ny][nx] and grid[ny][nx] == ".":
                            if dx and dy and (grid[y][nx] != "." or grid[ny][x] != "."):
                                continue
                            seen[ny][nx] = True
                            q.append((nx, ny))
            regions.append(comp)
    regions.sort(key=len, reverse=True)
    for comp in regions[1:]:
        for x, y in comp:
            grid[y][x] = "T"


def write(name, grid):
    OUT.mkdir(parents=True, exist_ok=True)
    h, w = len(grid), len(grid[0])
    text = f"type octile\nheight {h}\nwidth {w}\nmap\n" + "".join("".join(r) + "\n" for r in grid)
    (OUT / name).write_text(text)
    counts = {c: sum(r.count(c) for r in grid) for c in ".TSW@"}
    print(name, f"{w}x{h}", counts)


def highlands():
    rng = random.Random(11)
    g = blank(128, 128)
    for _ in range(14):
        blob(g, rng, rng.uniform(8, 120), rng.uniform(8, 120), rng.uniform(5, 10), "T")
    for _ in range(10):
        blob(g, rng, rng.uniform(8, 120), rng.uniform(8, 120), rng.uniform(4, 8), "@")
    for _ in range(7):
        cx, cy, s = rng.uniform(12, 116), rng.uniform(12, 116), rng.uniform(6, 11)
        blob(g, rng, cx, cy, s * 1.3, "S")
        blob(g, rng, cx, cy, s, "W")
    keep_largest_ground(g)
    write("highlands.map", g)


def wetlands():
    rng = random.Random(23)
    g = blank(160, 160)
    river(g, rng, 50, 4)
    river(g, rng, 110, 3)
    for y in (30, 80, 130):
        rect(g, 0, y, 160, y + 3, ".")
    for _ in range(18):
        blob(g, rng, rng.uniform(8, 152), rng.uniform(8, 152), rng.uniform(5, 9), "T")
    for _ in range(12):
        cx, cy, s = rng.uniform(10, 150), rng.uniform(10, 150), rng.uniform(5, 10)
        blob(g, rng, cx, cy, s * 1.4, "S", only=".T")
        blob(g, rng, cx, cy, s * 0.8, "W")
    for _ in range(8):
        blob(g, rng, rng.uniform(8, 152), rng.uniform(8, 152), rng.uniform(3, 6), "@")
    keep_largest_ground(g)
    write("wetlands.map", g)


def village():
    """60x60: houses and lanes west of a river, a wetland east of it.

    The wetland is swamp and open water broken by tree stands, so much of
    it is hidden from the bank and only aerial vehicles can go and look.
    Ground islands inside it are left in place: only aerial vehicles reach
    them.
    """
    rng = random.Random(5)
    g = blank(60, 60)
    # Village blocks.
    for by in range(2, 57, 8):
        for bx in range(2, 24, 7):
            if rng.random() < 0.75:
                w, h = rng.randint(3, 4), rng.randint(2, 4)
                rect(g, bx, by, bx + w, by + h, "@")
    for _ in range(5):
        blob(g, rng, rng.uniform(4, 24), rng.uniform(4, 56), 2.5, "T", only=".")
    for cx, cy, r in ((12, 16, 2.5), (18, 44, 3.0)):
        disk(g, cx, cy, r, "W")
        disk(g, cx, cy, r + 1.5, "S", only=".")
    # River with two fords.
    river(g, rng, 27, 3, wobble=1)
    rect(g, 24, 12, 34, 14, ".")
    rect(g, 24, 46, 34, 48, ".")
    # Wetland.
    rect(g, 34, 0, 60, 60, "S")
    for _ in range(9):
        blob(g, rng, rng.uniform(36, 58), rng.uniform(3, 57), rng.uniform(3, 5), "W", only="S")
    for _ in range(12):
        blob(g, rng, rng.uniform(36, 58), rng.uniform(3, 57), rng.uniform(1.5, 3), "T", only="SW")
    for _ in range(6):
        blob(g, rng, rng.uniform(38, 57), rng.uniform(4, 56), rng.uniform(2, 3.5), ".", only="S")
    write("village.map", g)


if __name__ == "__main__":
    highlands()
    wetlands()
    village()
