"""Exact minimization of binary oscillation energies via min-cut.

The energy  sum_w c_w * osc_w(theta) + sum_ij g_ij * theta_ij  is encoded
on a flow network with two auxiliary nodes per window: an OR node y_w >=
theta_i (cost c_w * y_w) and an AND node z_w <= theta_i (cost c_w * (1 -
z_w)), using osc_w = OR_w - AND_w for binary labelings.  Both inequalities
are hard (capacity above every finite cut), which makes the construction
pairwise-submodular and exactly graph-representable.

Capacities are scaled to 64-bit integers by a declared quantum; all
exactness statements are relative to the quantized energy.  The solver is
an augmenting-path max-flow with S/T search-tree reuse (the standard
vision strategy); a plain BFS augmenting-path fallback is provided for
cross-checks.  Both extremal minimizers come for free from the final
residual: the source-reachable set is the lattice-minimal minimizer and
the complement of the sink-reaching set is the lattice-maximal one.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from typing import Sequence

import numpy as np
from numba import njit

from .grid import BinarySet, DiscreteBall, Grid2D, ScalarField

DEFAULT_QUANTUM = 2.0 ** -32

FREE = 2  # cell states used during conditioning: 0, 1 fixed; 2 variable

_ROOT = -2
_NONE = -1


class InvalidEnergyError(ValueError):
    pass


class TooLargeForBruteForce(ValueError):
    pass


@dataclass
class CutGraph:
    """Pixel + auxiliary-node network for one binary minimization.

    ``tr`` holds merged terminal capacities (positive = residual source
    arc, negative = residual sink arc); ``offset_int`` is the constant the
    encoding drops, so quantized energy = (max flow + offset_int) * quantum.
    Cells conditioned out by the exact marginal bound are recorded in
    ``fixed`` and re-inserted into the returned labelings.
    """

    grid: Grid2D
    n_nodes: int
    first: np.ndarray      # CSR row pointers, len n_nodes+1
    head: np.ndarray       # arc heads
    rev: np.ndarray        # index of the reverse arc
    cap: np.ndarray        # int64 capacities
    tr: np.ndarray         # int64 merged terminal capacities per node
    offset_int: int
    quantum: float
    fixed: np.ndarray      # per-cell state: 0, 1, or FREE
    pixel_node: np.ndarray # per-cell node id (-1 where fixed)
    inf_cap: int

    @property
    def n_arcs(self) -> int:
        return int(self.head.size)

    @property
    def n_free_pixels(self) -> int:
        return int((self.fixed == FREE).sum())

    def dump_dimacs(self, path) -> None:
        """Debug dump in a DIMACS-like max-flow format (not a stable interface)."""
        n = self.n_nodes
        with open(path, "w") as fh:
            arcs = []
            for i in range(n):
                if self.tr[i] > 0:
                    arcs.append((n + 1, i + 1, int(self.tr[i])))
                elif self.tr[i] < 0:
                    arcs.append((i + 1, n + 2, int(-self.tr[i])))
            for u in range(n):
                for a in range(self.first[u], self.first[u + 1]):
                    if self.cap[a] > 0:
                        arcs.append((u + 1, int(self.head[a]) + 1, int(self.cap[a])))
            fh.write(f"p max {n + 2} {len(arcs)}\n")
            fh.write(f"n {n + 1} s\n")
            fh.write(f"n {n + 2} t\n")
            for u, v, c in arcs:
                fh.write(f"a {u} {v} {c}\n")


@dataclass(frozen=True)
class CutSolution:
    """Both canonical minimizers of one cut, plus the achieved value.

    energy_int = flow_int + offset_int is the exact quantized optimum of
    the encoded energy.
    """

    min_labeling: BinarySet
    max_labeling: BinarySet
    flow_value: float
    flow_int: int
    offset_int: int
    quantum: float

    @property
    def energy_int(self) -> int:
        return self.flow_int + self.offset_int

    @property
    def energy(self) -> float:
        return self.energy_int * self.quantum


@njit(cache=True, nogil=True)
def _classify_windows(state, offs_i, offs_j):
    """Per-center window flags: (any fixed 0, any fixed 1, any free member)."""
    h, w = state.shape
    k = offs_i.shape[0]
    any0 = np.zeros((h, w), np.bool_)
    any1 = np.zeros((h, w), np.bool_)
    anyf = np.zeros((h, w), np.bool_)
    for cj in range(h):
        for ci in range(w):
            a0 = False
            a1 = False
            af = False
            for t in range(k):
                i = ci + offs_i[t]
                j = cj + offs_j[t]
                if 0 <= i < w and 0 <= j < h:
                    s = state[j, i]
                    if s == 0:
                        a0 = True
                    elif s == 1:
                        a1 = True
                    else:
                        af = True
            any0[cj, ci] = a0
            any1[cj, ci] = a1
            anyf[cj, ci] = af
    return any0, any1, anyf


@njit(cache=True, nogil=True)
def _clipped_window_counts(h, w, offs_i, offs_j):
    """count[j,i] = number of window centers whose clipped window contains (i,j)."""
    count = np.zeros((h, w), np.int64)
    k = offs_i.shape[0]
    for cj in range(h):
        for ci in range(w):
            for t in range(k):
                i = ci + offs_i[t]
                j = cj + offs_j[t]
                if 0 <= i < w and 0 <= j < h:
                    count[j, i] += 1
    return count


@njit(cache=True, nogil=True)
def _count_window_arcs(state, offs_i, offs_j, y_node, z_node):
    h, w = state.shape
    k = offs_i.shape[0]
    n = 0
    for cj in range(h):
        for ci in range(w):
            y = y_node[cj, ci]
            z = z_node[cj, ci]
            if y < 0 and z < 0:
                continue
            both = 2 if (y >= 0 and z >= 0) else 1
            for t in range(k):
                i = ci + offs_i[t]
                j = cj + offs_j[t]
                if 0 <= i < w and 0 <= j < h and state[j, i] == FREE:
                    n += both
    return n


@njit(cache=True, nogil=True)
def _emit_window_arcs(state, offs_i, offs_j, pixel_node, y_node, z_node,
                      tails, heads, pos):
    """Append constraint arcs pixel->y (OR) and z->pixel (AND) for each window."""
    h, w = state.shape
    k = offs_i.shape[0]
    p = pos
    for cj in range(h):
        for ci in range(w):
            y = y_node[cj, ci]
            z = z_node[cj, ci]
            if y < 0 and z < 0:
                continue
            for t in range(k):
                i = ci + offs_i[t]
                j = cj + offs_j[t]
                if 0 <= i < w and 0 <= j < h and state[j, i] == FREE:
                    pix = pixel_node[j, i]
                    if y >= 0:
                        tails[p] = pix
                        heads[p] = y
                        p += 1
                    if z >= 0:
                        tails[p] = z
                        heads[p] = pix
                        p += 1
    return p


def _quantize(values, quantum: float) -> np.ndarray:
    scaled = np.rint(np.asarray(values, dtype=np.float64) / quantum)
    if np.any(np.abs(scaled) > 2.0 ** 62):
        raise InvalidEnergyError("quantized capacities overflow int64; use a coarser quantum")
    return scaled.astype(np.int64)


def build_binary_osc_graph(
    grid: Grid2D,
    balls_with_weights: Sequence[tuple[DiscreteBall, float]],
    unary: ScalarField,
    quantum: float = DEFAULT_QUANTUM,
    condition: bool = True,
) -> CutGraph:
    """Flow network whose min cut solves min_theta sum_w c_w osc_w + sum g theta.

    ``balls_with_weights`` lists (window stencil, per-window coefficient);
    coefficients must be positive.  ``unary`` is the per-cell linear term g.
    With ``condition`` on, cells whose unary dominates the total window
    weight that could ever act on them are fixed up front; this is exact
    because the marginal of flipping such a cell is strictly signed in any
    context, so its label agrees across all minimizers.
    """
    if not quantum > 0:
        raise InvalidEnergyError(f"capacity quantum must be positive, got {quantum}")
    if unary.grid.width != grid.width or unary.grid.height != grid.height:
        raise InvalidEnergyError("unary field grid does not match")
    for _, c in balls_with_weights:
        if not c > 0:
            raise InvalidEnergyError(f"window weights must be positive, got {c}")

    h, w = grid.height, grid.width
    g_int = _quantize(unary.values, quantum)
    c_ints = [int(_quantize([c], quantum)[0]) for _, c in balls_with_weights]
    if any(c == 0 for c in c_ints):
        raise InvalidEnergyError("a window weight quantizes to zero; use a finer quantum")

    offs = [
        (np.ascontiguousarray(b.offsets[:, 0]), np.ascontiguousarray(b.offsets[:, 1]))
        for b, _ in balls_with_weights
    ]

    state = np.full((h, w), FREE, dtype=np.uint8)
    if condition:
        wcap = np.zeros((h, w), dtype=np.int64)
        for (oi, oj), ci in zip(offs, c_ints):
            wcap += ci * _clipped_window_counts(h, w, oi, oj)
        state[g_int > wcap] = 0
        state[g_int < -wcap] = 1

    offset = int(g_int[state == 1].sum())

    pixel_node = np.full((h, w), -1, dtype=np.int64)
    free_flat = state == FREE
    n_free = int(free_flat.sum())
    pixel_node[free_flat] = np.arange(n_free)

    next_node = n_free
    scale_nodes = []  # (y_node grid, z_node grid, c_int) per scale
    for (oi, oj), ci in zip(offs, c_ints):
        any0, any1, anyf = _classify_windows(state, oi, oj)
        y_need = anyf & ~any1
        z_need = anyf & ~any0
        offset += ci * int((any0 & any1).sum())          # osc pinned to 1
        offset -= ci * int((y_need & z_need).sum())      # all-free windows
        y_node = np.full((h, w), -1, dtype=np.int64)
        z_node = np.full((h, w), -1, dtype=np.int64)
        ny = int(y_need.sum())
        y_node[y_need] = next_node + np.arange(ny)
        next_node += ny
        nz = int(z_need.sum())
        z_node[z_need] = next_node + np.arange(nz)
        next_node += nz
        scale_nodes.append((y_node, z_node, ci))

    n_nodes = next_node
    tr = np.zeros(n_nodes, dtype=np.int64)
    tr[:n_free] = -g_int[free_flat]
    offset += int(g_int[free_flat & (g_int < 0)].sum())
    for y_node, z_node, ci in scale_nodes:
        tr[y_node[y_node >= 0]] = -ci
        tr[z_node[z_node >= 0]] = ci

    inf_cap = int(np.abs(tr).sum()) + 1

    n_arcs = 0
    for (oi, oj), (y_node, z_node, _) in zip(offs, scale_nodes):
        n_arcs += int(_count_window_arcs(state, oi, oj, y_node, z_node))
    tails = np.empty(n_arcs, dtype=np.int64)
    heads = np.empty(n_arcs, dtype=np.int64)
    pos = 0
    for (oi, oj), (y_node, z_node, _) in zip(offs, scale_nodes):
        pos = _emit_window_arcs(state, oi, oj, pixel_node, y_node, z_node,
                                tails, heads, pos)
    assert pos == n_arcs
    caps = np.full(n_arcs, inf_cap, dtype=np.int64)

    first, head, rev, cap = _build_csr(n_nodes, tails, heads, caps)
    return CutGraph(
        grid=grid, n_nodes=n_nodes, first=first, head=head, rev=rev, cap=cap,
        tr=tr, offset_int=offset, quantum=quantum, fixed=state,
        pixel_node=pixel_node, inf_cap=inf_cap,
    )


def build_binary_tv_graph(
    grid: Grid2D,
    unary: ScalarField,
    edge_weight: float,
    quantum: float = DEFAULT_QUANTUM,
) -> CutGraph:
    """Pairwise 4-neighbor cut for the TV baseline (no auxiliary nodes).

    Each neighboring pair contributes edge_weight * |theta_a - theta_b|.
    """
    if not quantum > 0:
        raise InvalidEnergyError(f"capacity quantum must be positive, got {quantum}")
    if not edge_weight > 0:
        raise InvalidEnergyError(f"edge weight must be positive, got {edge_weight}")
    h, w = grid.height, grid.width
    g_int = _quantize(unary.values, quantum)
    e_int = int(_quantize([edge_weight], quantum)[0])
    if e_int == 0:
        raise InvalidEnergyError("edge weight quantizes to zero; use a finer quantum")

    n_nodes = h * w
    node = np.arange(n_nodes, dtype=np.int64).reshape(h, w)
    a1 = node[:, :-1].ravel()
    b1 = node[:, 1:].ravel()
    a2 = node[:-1, :].ravel()
    b2 = node[1:, :].ravel()
    tails = np.concatenate([a1, b1, a2, b2])
    heads = np.concatenate([b1, a1, b2, a2])
    caps = np.full(tails.size, e_int, dtype=np.int64)

    tr = (-g_int.ravel()).astype(np.int64)
    offset = int(g_int[g_int < 0].sum())
    inf_cap = int(np.abs(tr).sum() + caps.sum()) + 1

    first, head, rev, cap = _build_csr(n_nodes, tails, heads, caps)
    state = np.full((h, w), FREE, dtype=np.uint8)
    return CutGraph(
        grid=grid, n_nodes=n_nodes, first=first, head=head, rev=rev, cap=cap,
        tr=tr, offset_int=offset, quantum=quantum, fixed=state,
        pixel_node=node, inf_cap=inf_cap,
    )


def _build_csr(n_nodes, tails, heads, caps):
    """Paired-arc CSR: every input arc gets a 0-capacity reverse companion."""
    m = tails.size
    all_tails = np.concatenate([tails, heads])
    all_heads = np.concatenate([heads, tails])
    all_caps = np.concatenate([caps, np.zeros(m, dtype=np.int64)])
    pair = np.concatenate([np.arange(m, 2 * m), np.arange(m)])

    order = np.argsort(all_tails, kind="stable")
    inv = np.empty(2 * m, dtype=np.int64)
    inv[order] = np.arange(2 * m)

    head = all_heads[order]
    cap = all_caps[order]
    rev = inv[pair[order]]
    first = np.zeros(n_nodes + 1, dtype=np.int64)
    np.add.at(first, all_tails + 1, 1)
    first = np.cumsum(first).astype(np.int64)
    return first, np.ascontiguousarray(head), np.ascontiguousarray(rev), np.ascontiguousarray(cap)


# --- Boykov-Kolmogorov style max flow --------------------------------------
#
# tree: 0 free, 1 source tree, 2 sink tree.  parent: arc id into the node
# (S trees: the arc parent->node; T trees: the arc node->parent), _ROOT for
# nodes rooted at a terminal, _NONE for orphans and free nodes.  Terminal
# capacities are merged into tr.


@njit(cache=True, nogil=True)
def _bk_maxflow(n, first, head, rev, cap, tr):
    tree = np.zeros(n, np.uint8)
    parent = np.full(n, _NONE, np.int64)
    ts = np.zeros(n, np.int64)
    dist = np.zeros(n, np.int64)

    qcap = n + 1
    active = np.empty(qcap, np.int64)
    in_active = np.zeros(n, np.bool_)
    aq_head = 0
    aq_tail = 0
    orph = np.empty(qcap, np.int64)

    for i in range(n):
        if tr[i] > 0:
            tree[i] = 1
            parent[i] = _ROOT
        elif tr[i] < 0:
            tree[i] = 2
            parent[i] = _ROOT
        if tr[i] != 0:
            active[aq_tail] = i
            aq_tail = (aq_tail + 1) % qcap
            in_active[i] = True

    flow = 0
    time = 1

    while True:
        # --- growth: expand both trees until they touch ---
        meet = -1
        s_end = -1
        t_end = -1
        while aq_head != aq_tail:
            p = active[aq_head]
            tp = tree[p]
            if tp == 0:
                aq_head = (aq_head + 1) % qcap
                in_active[p] = False
                continue
            found = False
            for a in range(first[p], first[p + 1]):
                q = head[a]
                if tp == 1:
                    if cap[a] <= 0:
                        continue
                    tq = tree[q]
                    if tq == 0:
                        tree[q] = 1
                        parent[q] = a
                        ts[q] = ts[p]
                        dist[q] = dist[p] + 1
                        if not in_active[q]:
                            active[aq_tail] = q
                            aq_tail = (aq_tail + 1) % qcap
                            in_active[q] = True
                    elif tq == 2:
                        meet = a
                        s_end = p
                        t_end = q
                        found = True
                        break
                    elif ts[q] <= ts[p] and dist[q] > dist[p] + 1:
                        parent[q] = a
                        ts[q] = ts[p]
                        dist[q] = dist[p] + 1
                else:
                    ra = rev[a]
                    if cap[ra] <= 0:
                        continue
                    tq = tree[q]
                    if tq == 0:
                        tree[q] = 2
                        parent[q] = ra
                        ts[q] = ts[p]
                        dist[q] = dist[p] + 1
                        if not in_active[q]:
                            active[aq_tail] = q
                            aq_tail = (aq_tail + 1) % qcap
                            in_active[q] = True
                    elif tq == 1:
                        meet = ra
                        s_end = q
                        t_end = p
                        found = True
                        break
                    elif ts[q] <= ts[p] and dist[q] > dist[p] + 1:
                        parent[q] = ra
                        ts[q] = ts[p]
                        dist[q] = dist[p] + 1
            if found:
                break
            aq_head = (aq_head + 1) % qcap
            in_active[p] = False

        if meet < 0:
            break  # no augmenting path remains: max flow reached

        time += 1

        # --- bottleneck along root(S) .. s_end -> t_end .. root(T) ---
        b = cap[meet]
        x = s_end
        while parent[x] != _ROOT:
            a = parent[x]
            if cap[a] < b:
                b = cap[a]
            x = head[rev[a]]
        if tr[x] < b:
            b = tr[x]
        s_root = x
        x = t_end
        while parent[x] != _ROOT:
            a = parent[x]
            if cap[a] < b:
                b = cap[a]
            x = head[a]
        if -tr[x] < b:
            b = -tr[x]
        t_root = x

        # --- push b, collecting orphans at saturated parent arcs ---
        flow += b
        cap[meet] -= b
        cap[rev[meet]] += b
        oq_head = 0
        oq_tail = 0
        x = s_end
        while parent[x] != _ROOT:
            a = parent[x]
            cap[a] -= b
            cap[rev[a]] += b
            nxt = head[rev[a]]
            if cap[a] == 0:
                parent[x] = _NONE
                orph[oq_tail] = x
                oq_tail = (oq_tail + 1) % qcap
            x = nxt
        tr[s_root] -= b
        if tr[s_root] == 0:
            parent[s_root] = _NONE
            orph[oq_tail] = s_root
            oq_tail = (oq_tail + 1) % qcap
        x = t_end
        while parent[x] != _ROOT:
            a = parent[x]
            cap[a] -= b
            cap[rev[a]] += b
            nxt = head[a]
            if cap[a] == 0:
                parent[x] = _NONE
                orph[oq_tail] = x
                oq_tail = (oq_tail + 1) % qcap
            x = nxt
        tr[t_root] += b
        if tr[t_root] == 0:
            parent[t_root] = _NONE
            orph[oq_tail] = t_root
            oq_tail = (oq_tail + 1) % qcap

        # --- adoption: find new parents for orphans or free them ---
        while oq_head != oq_tail:
            o = orph[oq_head]
            oq_head = (oq_head + 1) % qcap
            to = tree[o]
            best_arc = _NONE
            best_dist = 1 << 60
            for a in range(first[o], first[o + 1]):
                q = head[a]
                if tree[q] != to:
                    continue
                res = cap[rev[a]] if to == 1 else cap[a]
                if res <= 0:
                    continue
                # origin check: q must still hang off a terminal
                x = q
                d = 0
                ok = False
                while True:
                    if ts[x] == time:
                        d += dist[x]
                        ok = True
                        break
                    pa = parent[x]
                    if pa == _ROOT:
                        ts[x] = time
                        dist[x] = 0
                        ok = True
                        break
                    if pa == _NONE:
                        break
                    d += 1
                    x = head[rev[pa]] if to == 1 else head[pa]
                if not ok:
                    continue
                # cache distances along the walked path
                x = q
                dd = d
                while ts[x] != time:
                    ts[x] = time
                    dist[x] = dd
                    dd -= 1
                    pa = parent[x]
                    if pa == _ROOT:
                        break
                    x = head[rev[pa]] if to == 1 else head[pa]
                if d < best_dist:
                    best_dist = d
                    best_arc = rev[a] if to == 1 else a
                    if d == 0:
                        break
            if best_arc != _NONE:
                parent[o] = best_arc
                ts[o] = time
                dist[o] = best_dist + 1
                continue
            # no valid parent: o leaves its tree; its children become
            # orphans and neighbors that could re-grow it reactivate
            tree[o] = 0
            for a in range(first[o], first[o + 1]):
                q = head[a]
                if tree[q] != to:
                    continue
                pa = parent[q]
                if pa >= 0:
                    par_node = head[rev[pa]] if to == 1 else head[pa]
                    if par_node == o:
                        parent[q] = _NONE
                        orph[oq_tail] = q
                        oq_tail = (oq_tail + 1) % qcap
                res = cap[rev[a]] if to == 1 else cap[a]
                if res > 0 and not in_active[q]:
                    active[aq_tail] = q
                    aq_tail = (aq_tail + 1) % qcap
                    in_active[q] = True

    return flow, tree


@njit(cache=True, nogil=True)
def _bfs_maxflow(n, first, head, rev, cap, tr):
    """Edmonds-Karp on the same merged-terminal representation."""
    flow = 0
    parent_arc = np.empty(n, np.int64)
    queue = np.empty(n, np.int64)
    while True:
        parent_arc[:] = _NONE
        qh = 0
        qt = 0
        reached_t = -1
        for i in range(n):
            if tr[i] > 0:
                parent_arc[i] = _ROOT
                if tr[i] < 0:
                    pass
                queue[qt] = i
                qt += 1
        while qh < qt and reached_t < 0:
            u = queue[qh]
            qh += 1
            if tr[u] < 0:
                reached_t = u
                break
            for a in range(first[u], first[u + 1]):
                if cap[a] > 0:
                    v = head[a]
                    if parent_arc[v] == _NONE:
                        parent_arc[v] = a
                        if tr[v] < 0:
                            reached_t = v
                            break
                        queue[qt] = v
                        qt += 1
            if reached_t >= 0:
                break
        if reached_t < 0:
            break
        b = -tr[reached_t]
        x = reached_t
        while parent_arc[x] != _ROOT:
            a = parent_arc[x]
            if cap[a] < b:
                b = cap[a]
            x = head[rev[a]]
        if tr[x] < b:
            b = tr[x]
        x = reached_t
        while parent_arc[x] != _ROOT:
            a = parent_arc[x]
            cap[a] -= b
            cap[rev[a]] += b
            x = head[rev[a]]
        tr[x] -= b
        tr[reached_t] += b
        flow += b

    # residual reachability gives the two canonical cuts
    tree = np.zeros(n, np.uint8)
    qh = 0
    qt = 0
    for i in range(n):
        if tr[i] > 0:
            tree[i] = 1
            queue[qt] = i
            qt += 1
    while qh < qt:
        u = queue[qh]
        qh += 1
        for a in range(first[u], first[u + 1]):
            if cap[a] > 0 and tree[head[a]] == 0:
                tree[head[a]] = 1
                queue[qt] = head[a]
                qt += 1
    qh = 0
    qt = 0
    for i in range(n):
        if tr[i] < 0 and tree[i] != 1:
            tree[i] = 2
            queue[qt] = i
            qt += 1
    while qh < qt:
        u = queue[qh]
        qh += 1
        for a in range(first[u], first[u + 1]):
            v = head[a]
            if cap[rev[a]] > 0 and tree[v] == 0:
                tree[v] = 2
                queue[qt] = v
                qt += 1
    return flow, tree


def solve_min_cut(graph: CutGraph, method: str = "bk") -> CutSolution:
    """Max flow and both extremal minimizers restricted to pixel nodes.

    min_labeling = source-reachable side of the final residual (lattice
    minimum of the argmin set), max_labeling = complement of the
    sink-reaching side (lattice maximum).  Both sets are properties of the
    energy, not of the particular max flow, so the result is deterministic.
    """
    cap = graph.cap.copy()
    tr = graph.tr.copy()
    if method == "bk":
        flow, tree = _bk_maxflow(graph.n_nodes, graph.first, graph.head,
                                 graph.rev, cap, tr)
    elif method == "bfs":
        flow, tree = _bfs_maxflow(graph.n_nodes, graph.first, graph.head,
                                  graph.rev, cap, tr)
    else:
        raise ValueError(f"unknown method {method!r}")

    h, w = graph.grid.height, graph.grid.width
    min_mask = np.zeros((h, w), dtype=np.uint8)
    max_mask = np.zeros((h, w), dtype=np.uint8)
    fixed1 = graph.fixed == 1
    min_mask[fixed1] = 1
    max_mask[fixed1] = 1
    free = graph.fixed == FREE
    if free.any():
        ids = graph.pixel_node[free]
        min_mask[free] = (tree[ids] == 1).astype(np.uint8)
        max_mask[free] = (tree[ids] != 2).astype(np.uint8)
    flow_int = int(flow)
    return CutSolution(
        min_labeling=BinarySet(graph.grid, min_mask),
        max_labeling=BinarySet(graph.grid, max_mask),
        flow_value=flow_int * graph.quantum,
        flow_int=flow_int,
        offset_int=graph.offset_int,
        quantum=graph.quantum,
    )


@njit(cache=True, nogil=True)
def _mixed_count_mask(mask, offs_i, offs_j):
    h, w = mask.shape
    k = offs_i.shape[0]
    count = 0
    for cj in range(h):
        for ci in range(w):
            saw0 = False
            saw1 = False
            for t in range(k):
                i = ci + offs_i[t]
                j = cj + offs_j[t]
                if 0 <= i < w and 0 <= j < h:
                    if mask[j, i] == 0:
                        saw0 = True
                    else:
                        saw1 = True
                    if saw0 and saw1:
                        count += 1
                        break
    return count


def cut_energy_int(
    grid: Grid2D,
    balls_with_weights: Sequence[tuple[DiscreteBall, float]],
    unary: ScalarField,
    mask: np.ndarray,
    quantum: float = DEFAULT_QUANTUM,
) -> int:
    """Quantized energy of one labeling; the brute-force oracle's evaluator."""
    g_int = _quantize(unary.values, quantum)
    total = int((g_int * mask).sum())
    for ball, c in balls_with_weights:
        ci = int(_quantize([c], quantum)[0])
        oi = np.ascontiguousarray(ball.offsets[:, 0])
        oj = np.ascontiguousarray(ball.offsets[:, 1])
        total += ci * int(_mixed_count_mask(np.ascontiguousarray(mask.astype(np.uint8)), oi, oj))
    return total


def brute_force_binary_min(
    grid: Grid2D,
    balls_with_weights: Sequence[tuple[DiscreteBall, float]],
    unary: ScalarField,
    quantum: float = DEFAULT_QUANTUM,
):
    """Exhaustive scan of all labelings on tiny grids (the definitional oracle).

    Returns (list of all minimizing masks, optimal quantized energy).
    """
    n = grid.n_cells
    if n > 20:
        raise TooLargeForBruteForce(f"{n} cells is too large for exhaustive search")
    h, w = grid.height, grid.width
    best = None
    argmins = []
    for bits in product((0, 1), repeat=n):
        mask = np.array(bits, dtype=np.uint8).reshape(h, w)
        e = cut_energy_int(grid, balls_with_weights, unary, mask, quantum)
        if best is None or e < best:
            best = e
            argmins = [mask]
        elif e == best:
            argmins.append(mask)
    return argmins, best
