"""Depth-first branch and bound over segments in line order.

One self-contained function so it can run compiled on int64 arrays or as plain
Python on lists of exact ints (used when values would overflow int64).

Leaf objective: ``sum(a[d])`` over OD pairs whose achieved improvement reaches
``thr[d]``, plus ``sum(bonus[e])`` over chosen segments.  The linear response
uses only the bonus term, the threshold response only the OD term.

Stats written back: ``stats[0]`` nodes, ``stats[1]`` status (0 optimal,
1 node limit hit).
"""

import numpy as np

try:
    import numba
except ImportError:  # pragma: no cover
    numba = None


def search(n, cost, u, upg, owner, caps, bonus,
           lo, hi, a, thr, ptr, idx, inv_thr,
           z, upper, node_limit, use_lp,
           ach, rem, chosen, phase, applied, comps, spend,
           lp_w, order, room, best_sel, stats):
    zero = upper - upper
    n_od = len(a)
    n_muni = len(caps)

    for d in range(n_od):
        ach[d] = zero
        rem[d] = zero
    for e in range(n):
        if upg[e] == 1:
            for p in range(ptr[e], ptr[e + 1]):
                rem[idx[p]] += u[e]
    locked = zero
    alive = zero
    for d in range(n_od):
        if thr[d] <= 0:
            locked += a[d]
        elif rem[d] >= thr[d]:
            alive += a[d]
    gained = zero
    bonus_left = zero
    for e in range(n):
        if upg[e] == 1:
            bonus_left += bonus[e]
    for m in range(n_muni):
        spend[m] = 0
    for e in range(n + 1):
        chosen[e] = 0
        phase[e] = 0
        applied[e] = 0
    comps[0] = 0

    best = zero - 1
    nodes = 0
    status = 0
    i = 0
    check = False
    while True:
        if check:
            # a decision for segment i was just applied; descend if promising
            check = False
            depth = i + 1
            k = comps[depth]
            ok = True
            if k >= z and chosen[i] == 0:
                # nothing may be added below this node
                ok = locked + gained > best
            elif locked + gained + alive + bonus_left <= best:
                ok = False
            elif use_lp and depth < n:
                # a*[thr <= s] <= a*s/thr, then a fractional knapsack per
                # municipality over the undecided segments
                for e in range(depth, n):
                    lp_w[e] = 0.0
                total = float(locked + gained)
                for d in range(n_od):
                    if ach[d] >= thr[d] or hi[d] < depth:
                        continue
                    share = float(a[d]) * inv_thr[d]
                    total += share * float(ach[d])
                    s = lo[d]
                    if s < depth:
                        s = depth
                    for e in range(s, hi[d] + 1):
                        lp_w[e] += share
                n_order = 0
                for e in range(depth, n):
                    if upg[e] == 1:
                        lp_w[e] = lp_w[e] * float(u[e]) + float(bonus[e])
                        order[n_order] = e
                        n_order += 1
                for x in range(1, n_order):
                    e = order[x]
                    key = lp_w[e] / cost[e]
                    y = x - 1
                    while y >= 0 and lp_w[order[y]] / cost[order[y]] < key:
                        order[y + 1] = order[y]
                        y -= 1
                    order[y + 1] = e
                for m in range(n_muni):
                    room[m] = float(caps[m] - spend[m])
                for x in range(n_order):
                    e = order[x]
                    m = owner[e]
                    if room[m] <= 0.0 or lp_w[e] <= 0.0:
                        continue
                    c = float(cost[e])
                    if c <= room[m]:
                        total += lp_w[e]
                        room[m] -= c
                    else:
                        total += lp_w[e] * room[m] / c
                        room[m] = 0.0
                # strict improvement needs best + 1; margin absorbs rounding
                ok = total * (1.0 + 1e-9) + 1e-6 >= float(best + 1)
            if ok:
                i = depth
                if i < n:
                    phase[i] = 0
            if nodes > node_limit:
                status = 1
                break
            continue

        if i == n:
            value = locked + gained
            if value > best:
                best = value
                for e in range(n):
                    best_sel[e] = chosen[e]
                if best >= upper:
                    break
            i -= 1
            if i < 0:
                break
            continue

        k = comps[i]
        prev = 0
        if i > 0:
            prev = chosen[i - 1]
        m = owner[i]

        if phase[i] == 0:
            phase[i] = 1
            applied[i] = 0
            new_k = k + 1
            if prev == 1:
                new_k = k
            if upg[i] == 1 and spend[m] + cost[i] <= caps[m] and new_k <= z:
                nodes += 1
                applied[i] = 1
                chosen[i] = 1
                spend[m] += cost[i]
                comps[i + 1] = new_k
                gained += bonus[i]
                bonus_left -= bonus[i]
                for p in range(ptr[i], ptr[i + 1]):
                    d = idx[p]
                    if ach[d] < thr[d] and ach[d] + u[i] >= thr[d]:
                        locked += a[d]
                        alive -= a[d]
                    ach[d] += u[i]
                    rem[d] -= u[i]
                check = True
            continue

        if phase[i] == 1:
            if applied[i] == 1:
                chosen[i] = 0
                spend[m] -= cost[i]
                gained -= bonus[i]
                bonus_left += bonus[i]
                for p in range(ptr[i], ptr[i + 1]):
                    d = idx[p]
                    ach[d] -= u[i]
                    rem[d] += u[i]
                    if ach[d] < thr[d] and ach[d] + u[i] >= thr[d]:
                        locked -= a[d]
                        alive += a[d]
                applied[i] = 0
            phase[i] = 2
            nodes += 1
            chosen[i] = 0
            comps[i + 1] = k
            if upg[i] == 1:
                bonus_left -= bonus[i]
                for p in range(ptr[i], ptr[i + 1]):
                    d = idx[p]
                    if ach[d] < thr[d] and ach[d] + rem[d] >= thr[d] and ach[d] + rem[d] - u[i] < thr[d]:
                        alive -= a[d]
                    rem[d] -= u[i]
            check = True
            continue

        # phase 2: undo the exclusion, return to the parent
        if upg[i] == 1:
            bonus_left += bonus[i]
            for p in range(ptr[i], ptr[i + 1]):
                d = idx[p]
                rem[d] += u[i]
                if ach[d] < thr[d] and ach[d] + rem[d] >= thr[d] and ach[d] + rem[d] - u[i] < thr[d]:
                    alive += a[d]
        i -= 1
        if i < 0:
            break

    stats[0] = nodes
    stats[1] = status
    return best


search_jit = numba.njit(cache=True)(search) if numba is not None else None
