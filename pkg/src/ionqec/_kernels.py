"""Numba kernels for the matching decoder's hot path.

Each shot's flipped detectors are clustered through exact pruning (an edge
whose weight exceeds the two endpoints' summed boundary distances can never
appear in a minimum-weight solution), then each cluster is solved exactly:
small clusters by bitmask dynamic programming, clusters above the DP cap
by an integer-weight blossom matching compiled below.  Both paths minimize
the same objective; nothing approximate happens here.

The blossom routine is a port of the classic primal-dual method for
maximum-weight matching (Galil's survey of Edmonds' algorithms), following
the array-based reference implementation by van Rantwijk that NetworkX
ships, restricted to complete graphs with int64 weights so that all dual
arithmetic stays exact.
"""

import numpy as np
from numba import njit

FLAG_OK = 0
FLAG_FALLBACK = 1
FLAG_DISCONNECTED = 2
FLAG_ERROR = 3


@njit(cache=True, nogil=True)
def _find(parent, i):
    while parent[i] != i:
        parent[i] = parent[parent[i]]
        i = parent[i]
    return i


@njit(cache=True, nogil=True)
def _solve_component(nodes, c, D, BD, OB, BO):
    """Exact minimum-weight pairing of one cluster (boundary allowed).

    Returns (weight, obs_parity); weight is inf when no feasible pairing
    exists (odd cluster with no boundary access).
    """
    full = (1 << c) - 1
    dp = np.full(full + 1, np.inf, dtype=np.float64)
    cho = np.full(full + 1, -2, dtype=np.int8)
    dp[0] = 0.0
    for S in range(1, full + 1):
        i = 0
        while not (S >> i) & 1:
            i += 1
        gi = nodes[i]
        rest = S ^ (1 << i)
        best = dp[rest] + BD[gi]
        bcho = -1
        j = i + 1
        while j < c:
            if (rest >> j) & 1:
                gj = nodes[j]
                w = D[gi, gj]
                if w < BD[gi] + BD[gj]:
                    cand = dp[rest ^ (1 << j)] + w
                    if cand < best:
                        best = cand
                        bcho = j
            j += 1
        dp[S] = best
        cho[S] = bcho
    weight = dp[full]
    obs = np.uint8(0)
    if not np.isfinite(weight):
        return weight, obs
    S = full
    while S:
        i = 0
        while not (S >> i) & 1:
            i += 1
        j = cho[S]
        if j < 0:
            obs ^= BO[nodes[i]]
            S ^= 1 << i
        else:
            obs ^= OB[nodes[i], nodes[j]]
            S ^= (1 << i) | (1 << j)
    return weight, obs


# ---------------------------------------------------------------------------
# Exact maximum-weight matching on a complete graph (blossom algorithm).
#
# Vertex ids are 0..n-1; non-trivial blossoms use ids n..2n-1 drawn from a
# free list.  label values: 0 free, 1 S, 2 T, 5 breadcrumb (S | 4) during
# back-tracing.  labeledge/bestedge rows of (-1, -1) stand for "none".
# All weights and duals are int64; with integer weights the algorithm is
# exact (duals stay integral because S-S edge slacks stay even).
# ---------------------------------------------------------------------------


@njit(cache=True, nogil=True)
def _mwm_leaves(b, n, childs, childslen, out):
    """Collect the leaf vertices of (possibly trivial) blossom b into out."""
    if b < n:
        out[0] = b
        return 1
    cnt = 0
    stack = np.empty(2 * n + 2, dtype=np.int64)
    sp = 0
    stack[sp] = b
    sp += 1
    while sp > 0:
        sp -= 1
        t = stack[sp]
        if t < n:
            out[cnt] = t
            cnt += 1
        else:
            for idx in range(childslen[t]):
                stack[sp] = childs[t, idx]
                sp += 1
    return cnt


@njit(cache=True, nogil=True)
def _mwm_assign_label(w, t, v, n, mate, label, labeledge, inblossom,
                      blossombase, bestedge, queue, qn, childs, childslen,
                      lv):
    """Label the top blossom of w with t through edge (v, w); v<0 for none.

    A T label immediately relays an S label to the mate of the blossom
    base, which is why this runs as a two-step loop instead of recursion.
    """
    while True:
        b = inblossom[w]
        label[w] = t
        label[b] = t
        labeledge[w, 0] = v
        labeledge[w, 1] = w if v >= 0 else -1
        labeledge[b, 0] = v
        labeledge[b, 1] = w if v >= 0 else -1
        bestedge[w, 0] = -1
        bestedge[w, 1] = -1
        bestedge[b, 0] = -1
        bestedge[b, 1] = -1
        if t == 1:
            cnt = _mwm_leaves(b, n, childs, childslen, lv)
            for idx in range(cnt):
                queue[qn[0]] = lv[idx]
                qn[0] += 1
            return
        base = blossombase[b]
        w = mate[base]
        v = base
        t = 1


@njit(cache=True, nogil=True)
def _mwm_scan_blossom(v, w, n, label, labeledge, inblossom, blossombase):
    """Trace back from S-vertices v and w; return a new blossom's base
    vertex, or -1 when the paths reach two different roots (augmenting
    path found)."""
    path = np.empty(2 * n + 2, dtype=np.int64)
    plen = 0
    base = -1
    while v >= 0:
        b = inblossom[v]
        if label[b] & 4:
            base = blossombase[b]
            break
        path[plen] = b
        plen += 1
        label[b] = 5
        if labeledge[b, 0] < 0:
            v = -1
        else:
            v = labeledge[b, 0]
            b = inblossom[v]
            v = labeledge[b, 0]
        if w >= 0:
            tmp = v
            v = w
            w = tmp
    for idx in range(plen):
        label[path[idx]] = 1
    return base


@njit(cache=True, nogil=True)
def _mwm_add_blossom(base, v, w, n, W, mate, label, labeledge, inblossom,
                     blossomparent, blossombase, bestedge, dualvar,
                     blossomdual, queue, qn, childs, childslen, bedges,
                     mybest, mybestlen, unusedb, un, stamp, stampval,
                     besto_e, bjlist, lv):
    """Shrink the odd cycle through base, v and w into a new S-blossom."""
    bb = inblossom[base]
    bv = inblossom[v]
    bw = inblossom[w]
    un[0] -= 1
    b = unusedb[un[0]]
    blossombase[b] = base
    blossomparent[b] = -1
    blossomparent[bb] = b

    tpath = np.empty(n + 2, dtype=np.int64)
    tedge = np.empty((n + 2, 2), dtype=np.int64)
    tlen = 0
    tedge[0, 0] = v
    tedge[0, 1] = w
    elen = 1
    vv = v
    bvv = bv
    while bvv != bb:
        blossomparent[bvv] = b
        tpath[tlen] = bvv
        tlen += 1
        tedge[elen, 0] = labeledge[bvv, 0]
        tedge[elen, 1] = labeledge[bvv, 1]
        elen += 1
        vv = labeledge[bvv, 0]
        bvv = inblossom[vv]
    tpath[tlen] = bb
    tlen += 1
    cl = 0
    for idx in range(tlen - 1, -1, -1):
        childs[b, cl] = tpath[idx]
        cl += 1
    for idx in range(elen):
        bedges[b, idx, 0] = tedge[elen - 1 - idx, 0]
        bedges[b, idx, 1] = tedge[elen - 1 - idx, 1]
    el = elen
    ww = w
    bww = bw
    while bww != bb:
        blossomparent[bww] = b
        childs[b, cl] = bww
        cl += 1
        bedges[b, el, 0] = labeledge[bww, 1]
        bedges[b, el, 1] = labeledge[bww, 0]
        el += 1
        ww = labeledge[bww, 0]
        bww = inblossom[ww]
    childslen[b] = cl

    label[b] = 1
    labeledge[b, 0] = labeledge[bb, 0]
    labeledge[b, 1] = labeledge[bb, 1]
    blossomdual[b] = 0

    cnt = _mwm_leaves(b, n, childs, childslen, lv)
    for idx in range(cnt):
        x = lv[idx]
        if label[inblossom[x]] == 2:
            queue[qn[0]] = x
            qn[0] += 1
        inblossom[x] = b

    # merge least-slack edge lists toward neighbouring S-blossoms
    stampval[0] += 1
    sv = stampval[0]
    nbj = 0
    sub = np.empty(n + 2, dtype=np.int64)
    for ci in range(childslen[b]):
        bv2 = childs[b, ci]
        if bv2 >= n and mybestlen[bv2] >= 0:
            nlist = mybestlen[bv2]
            for t in range(nlist):
                i0 = mybest[bv2, t, 0]
                j0 = mybest[bv2, t, 1]
                if inblossom[j0] == b:
                    tmp = i0
                    i0 = j0
                    j0 = tmp
                bj = inblossom[j0]
                if bj != b and label[bj] == 1:
                    sl = dualvar[i0] + dualvar[j0] - 2 * W[i0, j0]
                    if stamp[bj] != sv:
                        stamp[bj] = sv
                        besto_e[bj, 0] = i0
                        besto_e[bj, 1] = j0
                        bjlist[nbj] = bj
                        nbj += 1
                    else:
                        e0 = besto_e[bj, 0]
                        e1 = besto_e[bj, 1]
                        if sl < dualvar[e0] + dualvar[e1] - 2 * W[e0, e1]:
                            besto_e[bj, 0] = i0
                            besto_e[bj, 1] = j0
            mybestlen[bv2] = -1
        else:
            scnt = _mwm_leaves(bv2, n, childs, childslen, sub)
            for li in range(scnt):
                i0 = sub[li]
                for j0 in range(n):
                    if j0 == i0:
                        continue
                    bj = inblossom[j0]
                    if bj != b and label[bj] == 1:
                        sl = dualvar[i0] + dualvar[j0] - 2 * W[i0, j0]
                        if stamp[bj] != sv:
                            stamp[bj] = sv
                            besto_e[bj, 0] = i0
                            besto_e[bj, 1] = j0
                            bjlist[nbj] = bj
                            nbj += 1
                        else:
                            e0 = besto_e[bj, 0]
                            e1 = besto_e[bj, 1]
                            if sl < dualvar[e0] + dualvar[e1] - 2 * W[e0, e1]:
                                besto_e[bj, 0] = i0
                                besto_e[bj, 1] = j0
        bestedge[bv2, 0] = -1
        bestedge[bv2, 1] = -1

    mlen = 0
    for t in range(nbj):
        bj = bjlist[t]
        mybest[b, mlen, 0] = besto_e[bj, 0]
        mybest[b, mlen, 1] = besto_e[bj, 1]
        mlen += 1
    mybestlen[b] = mlen

    bestedge[b, 0] = -1
    bestedge[b, 1] = -1
    bestsl = np.int64(0)
    for t in range(mlen):
        i0 = mybest[b, t, 0]
        j0 = mybest[b, t, 1]
        sl = dualvar[i0] + dualvar[j0] - 2 * W[i0, j0]
        if bestedge[b, 0] < 0 or sl < bestsl:
            bestsl = sl
            bestedge[b, 0] = i0
            bestedge[b, 1] = j0
    return b


@njit(cache=True, nogil=True)
def _mwm_expand_blossom(b0, endstage, n, mate, label, labeledge, inblossom,
                        blossomparent, blossombase, bestedge, blossomdual,
                        allowedge, queue, qn, childs, childslen, bedges,
                        mybestlen, unusedb, un, lv):
    """Dissolve top-level blossom b0 (recursively at stage end)."""
    work = np.empty(2 * n + 2, dtype=np.int64)
    wl = 0
    work[wl] = b0
    wl += 1
    while wl > 0:
        wl -= 1
        b = work[wl]
        clen = childslen[b]
        for ci in range(clen):
            s = childs[b, ci]
            blossomparent[s] = -1
            if s < n:
                inblossom[s] = s
            elif endstage and blossomdual[s] == 0:
                work[wl] = s
                wl += 1
            else:
                cnt = _mwm_leaves(s, n, childs, childslen, lv)
                for li in range(cnt):
                    inblossom[lv[li]] = s
        if (not endstage) and label[b] == 2:
            # relabel the sub-blossoms along the alternating path from the
            # labelling edge around to the base
            entrychild = inblossom[labeledge[b, 1]]
            j = 0
            for ci in range(clen):
                if childs[b, ci] == entrychild:
                    j = ci
                    break
            if j & 1:
                j -= clen
                jstep = 1
            else:
                jstep = -1
            v0 = labeledge[b, 0]
            w0 = labeledge[b, 1]
            while j != 0:
                if jstep == 1:
                    jj = j % clen
                    p = bedges[b, jj, 0]
                    q = bedges[b, jj, 1]
                else:
                    jj = (j - 1) % clen
                    q = bedges[b, jj, 0]
                    p = bedges[b, jj, 1]
                label[w0] = 0
                label[q] = 0
                _mwm_assign_label(w0, 2, v0, n, mate, label, labeledge,
                                  inblossom, blossombase, bestedge, queue,
                                  qn, childs, childslen, lv)
                allowedge[p, q] = 1
                allowedge[q, p] = 1
                j += jstep
                if jstep == 1:
                    jj = j % clen
                    v0 = bedges[b, jj, 0]
                    w0 = bedges[b, jj, 1]
                else:
                    jj = (j - 1) % clen
                    w0 = bedges[b, jj, 0]
                    v0 = bedges[b, jj, 1]
                allowedge[v0, w0] = 1
                allowedge[w0, v0] = 1
                j += jstep
            bw2 = childs[b, 0]
            label[w0] = 2
            label[bw2] = 2
            labeledge[w0, 0] = v0
            labeledge[w0, 1] = w0
            labeledge[bw2, 0] = v0
            labeledge[bw2, 1] = w0
            bestedge[bw2, 0] = -1
            bestedge[bw2, 1] = -1
            j += jstep
            while childs[b, j % clen] != entrychild:
                bv2 = childs[b, j % clen]
                if label[bv2] == 1:
                    j += jstep
                    continue
                vfound = -1
                if bv2 >= n:
                    cnt = _mwm_leaves(bv2, n, childs, childslen, lv)
                    for li in range(cnt):
                        if label[lv[li]] != 0:
                            vfound = lv[li]
                            break
                elif label[bv2] != 0:
                    vfound = bv2
                if vfound >= 0:
                    label[vfound] = 0
                    label[mate[blossombase[bv2]]] = 0
                    _mwm_assign_label(vfound, 2, labeledge[vfound, 0], n,
                                      mate, label, labeledge, inblossom,
                                      blossombase, bestedge, queue, qn,
                                      childs, childslen, lv)
                j += jstep
        label[b] = 0
        labeledge[b, 0] = -1
        labeledge[b, 1] = -1
        bestedge[b, 0] = -1
        bestedge[b, 1] = -1
        blossomparent[b] = -1
        blossombase[b] = -1
        blossomdual[b] = 0
        mybestlen[b] = -1
        childslen[b] = 0
        unusedb[un[0]] = b
        un[0] += 1


@njit(cache=True, nogil=True)
def _mwm_augment_blossom(b0, v0, n, mate, blossomparent, blossombase,
                         childs, childslen, bedges):
    """Swap matched/unmatched edges inside blossom b0 so that v0 becomes
    the new base; sub-blossom tasks run off an explicit worklist since they
    touch disjoint state."""
    work = np.empty((2 * n + 2, 2), dtype=np.int64)
    wl = 0
    work[wl, 0] = b0
    work[wl, 1] = v0
    wl += 1
    tbuf = np.empty(n + 2, dtype=np.int64)
    ebuf = np.empty((n + 2, 2), dtype=np.int64)
    while wl > 0:
        wl -= 1
        b = work[wl, 0]
        v = work[wl, 1]
        t = v
        while blossomparent[t] != b:
            t = blossomparent[t]
        if t >= n:
            work[wl, 0] = t
            work[wl, 1] = v
            wl += 1
        clen = childslen[b]
        i = 0
        for ci in range(clen):
            if childs[b, ci] == t:
                i = ci
                break
        j = i
        if i & 1:
            j -= clen
            jstep = 1
        else:
            jstep = -1
        while j != 0:
            j += jstep
            t2 = childs[b, j % clen]
            if jstep == 1:
                w2 = bedges[b, j % clen, 0]
                x2 = bedges[b, j % clen, 1]
            else:
                x2 = bedges[b, (j - 1) % clen, 0]
                w2 = bedges[b, (j - 1) % clen, 1]
            if t2 >= n:
                work[wl, 0] = t2
                work[wl, 1] = w2
                wl += 1
            j += jstep
            t2 = childs[b, j % clen]
            if t2 >= n:
                work[wl, 0] = t2
                work[wl, 1] = x2
                wl += 1
            mate[w2] = x2
            mate[x2] = w2
        if i > 0:
            for ci in range(clen):
                src = (ci + i) % clen
                tbuf[ci] = childs[b, src]
                ebuf[ci, 0] = bedges[b, src, 0]
                ebuf[ci, 1] = bedges[b, src, 1]
            for ci in range(clen):
                childs[b, ci] = tbuf[ci]
                bedges[b, ci, 0] = ebuf[ci, 0]
                bedges[b, ci, 1] = ebuf[ci, 1]
        # the rotated cycle starts at the sub-blossom containing v, whose
        # own base becomes v once its worklist entry runs, so the new base
        # of b is v itself (the reference implementation asserts this)
        blossombase[b] = v


@njit(cache=True, nogil=True)
def _mwm_augment_matching(v, w, n, mate, label, labeledge, inblossom,
                          blossomparent, blossombase, childs, childslen,
                          bedges):
    """Flip matched edges along the augmenting path through S-vertices
    v and w."""
    for side in range(2):
        if side == 0:
            s = v
            j = w
        else:
            s = w
            j = v
        while True:
            bs = inblossom[s]
            if bs >= n:
                _mwm_augment_blossom(bs, s, n, mate, blossomparent,
                                     blossombase, childs, childslen, bedges)
            mate[s] = j
            if labeledge[bs, 0] < 0:
                break
            t = labeledge[bs, 0]
            bt = inblossom[t]
            s2 = labeledge[bt, 0]
            j2 = labeledge[bt, 1]
            if bt >= n:
                _mwm_augment_blossom(bt, j2, n, mate, blossomparent,
                                     blossombase, childs, childslen, bedges)
            mate[j2] = s2
            s = s2
            j = j2


@njit(cache=True, nogil=True)
def mwm_dense(n, W, mate):
    """Maximum-weight matching of the complete graph K_n, int64 weights.

    Fills mate (mate[v] = partner or -1) and returns 0, or a negative code
    if an internal iteration guard trips (which would mean a bug, not a
    property of the input).
    """
    B = 2 * n
    maxweight = np.int64(0)
    for i in range(n):
        for j in range(i + 1, n):
            if W[i, j] > maxweight:
                maxweight = W[i, j]
    label = np.zeros(B, dtype=np.int64)
    labeledge = np.full((B, 2), -1, dtype=np.int64)
    inblossom = np.arange(n)
    blossomparent = np.full(B, -1, dtype=np.int64)
    blossombase = np.full(B, -1, dtype=np.int64)
    for v in range(n):
        blossombase[v] = v
    bestedge = np.full((B, 2), -1, dtype=np.int64)
    dualvar = np.full(n, maxweight, dtype=np.int64)
    blossomdual = np.zeros(B, dtype=np.int64)
    allowedge = np.zeros((n, n), dtype=np.uint8)
    queue = np.empty(4 * n * n + 64, dtype=np.int64)
    qn = np.zeros(1, dtype=np.int64)
    childs = np.zeros((B, n + 2), dtype=np.int64)
    childslen = np.zeros(B, dtype=np.int64)
    bedges = np.zeros((B, n + 2, 2), dtype=np.int64)
    mybest = np.zeros((B, n + 2, 2), dtype=np.int64)
    mybestlen = np.full(B, -1, dtype=np.int64)
    unusedb = np.empty(n + 2, dtype=np.int64)
    un = np.zeros(1, dtype=np.int64)
    for idx in range(n):
        unusedb[idx] = n + idx
    un[0] = n
    stamp = np.zeros(B, dtype=np.int64)
    stampval = np.zeros(1, dtype=np.int64)
    besto_e = np.zeros((B, 2), dtype=np.int64)
    bjlist = np.empty(B + 2, dtype=np.int64)
    lv = np.empty(n + 2, dtype=np.int64)
    for v in range(n):
        mate[v] = -1
    guard_sub = 8 * (n * n + 4 * n + 16)

    for _stage in range(n // 2 + 2):
        for x in range(B):
            label[x] = 0
            labeledge[x, 0] = -1
            labeledge[x, 1] = -1
            bestedge[x, 0] = -1
            bestedge[x, 1] = -1
        for bidx in range(n, B):
            mybestlen[bidx] = -1
        for i in range(n):
            for j in range(n):
                allowedge[i, j] = 0
        qn[0] = 0
        for v in range(n):
            if mate[v] < 0 and label[inblossom[v]] == 0:
                _mwm_assign_label(v, 1, -1, n, mate, label, labeledge,
                                  inblossom, blossombase, bestedge, queue,
                                  qn, childs, childslen, lv)
        augmented = False
        subiter = 0
        while True:
            subiter += 1
            if subiter > guard_sub:
                return -2
            while qn[0] > 0 and not augmented:
                qn[0] -= 1
                v = queue[qn[0]]
                for w in range(n):
                    if w == v:
                        continue
                    bv = inblossom[v]
                    bw = inblossom[w]
                    if bv == bw:
                        continue
                    kslack = np.int64(0)
                    allowed = allowedge[v, w] == 1
                    if not allowed:
                        kslack = dualvar[v] + dualvar[w] - 2 * W[v, w]
                        if kslack <= 0:
                            allowed = True
                            allowedge[v, w] = 1
                            allowedge[w, v] = 1
                    if allowed:
                        lbw = label[bw]
                        if lbw == 0:
                            _mwm_assign_label(w, 2, v, n, mate, label,
                                              labeledge, inblossom,
                                              blossombase, bestedge, queue,
                                              qn, childs, childslen, lv)
                        elif lbw == 1:
                            base = _mwm_scan_blossom(v, w, n, label,
                                                     labeledge, inblossom,
                                                     blossombase)
                            if base >= 0:
                                _mwm_add_blossom(base, v, w, n, W, mate,
                                                 label, labeledge, inblossom,
                                                 blossomparent, blossombase,
                                                 bestedge, dualvar,
                                                 blossomdual, queue, qn,
                                                 childs, childslen, bedges,
                                                 mybest, mybestlen, unusedb,
                                                 un, stamp, stampval,
                                                 besto_e, bjlist, lv)
                            else:
                                _mwm_augment_matching(v, w, n, mate, label,
                                                      labeledge, inblossom,
                                                      blossomparent,
                                                      blossombase, childs,
                                                      childslen, bedges)
                                augmented = True
                                break
                        elif label[w] == 0:
                            label[w] = 2
                            labeledge[w, 0] = v
                            labeledge[w, 1] = w
                    elif label[bw] == 1:
                        if bestedge[bv, 0] < 0 or kslack < (
                                dualvar[bestedge[bv, 0]]
                                + dualvar[bestedge[bv, 1]]
                                - 2 * W[bestedge[bv, 0], bestedge[bv, 1]]):
                            bestedge[bv, 0] = v
                            bestedge[bv, 1] = w
                    elif label[w] == 0:
                        if bestedge[w, 0] < 0 or kslack < (
                                dualvar[bestedge[w, 0]]
                                + dualvar[bestedge[w, 1]]
                                - 2 * W[bestedge[w, 0], bestedge[w, 1]]):
                            bestedge[w, 0] = v
                            bestedge[w, 1] = w
            if augmented:
                break

            deltatype = 1
            delta = dualvar[0]
            for v2 in range(1, n):
                if dualvar[v2] < delta:
                    delta = dualvar[v2]
            de_v = np.int64(-1)
            de_w = np.int64(-1)
            deltablossom = np.int64(-1)
            for v2 in range(n):
                if label[inblossom[v2]] == 0 and bestedge[v2, 0] >= 0:
                    e0 = bestedge[v2, 0]
                    e1 = bestedge[v2, 1]
                    d = dualvar[e0] + dualvar[e1] - 2 * W[e0, e1]
                    if d < delta:
                        delta = d
                        deltatype = 2
                        de_v = e0
                        de_w = e1
            for b in range(B):
                if b >= n and blossombase[b] < 0:
                    continue
                if blossomparent[b] == -1 and label[b] == 1 \
                        and bestedge[b, 0] >= 0:
                    e0 = bestedge[b, 0]
                    e1 = bestedge[b, 1]
                    d = (dualvar[e0] + dualvar[e1] - 2 * W[e0, e1]) // 2
                    if d < delta:
                        delta = d
                        deltatype = 3
                        de_v = e0
                        de_w = e1
            for b in range(n, B):
                if blossombase[b] >= 0 and blossomparent[b] == -1 \
                        and label[b] == 2 and blossomdual[b] < delta:
                    delta = blossomdual[b]
                    deltatype = 4
                    deltablossom = b

            for v2 in range(n):
                lb = label[inblossom[v2]]
                if lb == 1:
                    dualvar[v2] -= delta
                elif lb == 2:
                    dualvar[v2] += delta
            for b in range(n, B):
                if blossombase[b] >= 0 and blossomparent[b] == -1:
                    if label[b] == 1:
                        blossomdual[b] += delta
                    elif label[b] == 2:
                        blossomdual[b] -= delta

            if deltatype == 1:
                break
            elif deltatype == 2:
                allowedge[de_v, de_w] = 1
                allowedge[de_w, de_v] = 1
                queue[qn[0]] = de_v
                qn[0] += 1
            elif deltatype == 3:
                allowedge[de_v, de_w] = 1
                allowedge[de_w, de_v] = 1
                queue[qn[0]] = de_v
                qn[0] += 1
            else:
                _mwm_expand_blossom(deltablossom, False, n, mate, label,
                                    labeledge, inblossom, blossomparent,
                                    blossombase, bestedge, blossomdual,
                                    allowedge, queue, qn, childs, childslen,
                                    bedges, mybestlen, unusedb, un, lv)

        if not augmented:
            break

        for b in range(n, B):
            if blossombase[b] >= 0 and blossomparent[b] == -1 \
                    and label[b] == 1 and blossomdual[b] == 0:
                _mwm_expand_blossom(b, True, n, mate, label, labeledge,
                                    inblossom, blossomparent, blossombase,
                                    bestedge, blossomdual, allowedge, queue,
                                    qn, childs, childslen, bedges, mybestlen,
                                    unusedb, un, lv)
    return 0


@njit(cache=True, nogil=True)
def blossom_component(members, c, D, BD, OB, BO):
    """Exact minimum-weight pairing of one cluster via blossom matching.

    Same contract as _solve_component but without the size cap: pairing a
    detector pair through the boundary costs the summed boundary distances,
    and an odd cluster gets one extra boundary node.  Returns
    (weight, obs_parity, status); status 1 flags an infeasible cluster and
    -2 an internal guard breach.
    """
    odd = c & 1
    nloc = c + odd
    wf = np.zeros((nloc, nloc), dtype=np.float64)
    wmax = 0.0
    for a in range(c):
        ga = members[a]
        for b2 in range(a + 1, c):
            gb = members[b2]
            dd = D[ga, gb]
            bb = BD[ga] + BD[gb]
            w = dd if dd < bb else bb
            wf[a, b2] = w
            wf[b2, a] = w
            if np.isfinite(w) and w > wmax:
                wmax = w
        if odd:
            w = BD[ga]
            wf[a, c] = w
            wf[c, a] = w
            if np.isfinite(w) and w > wmax:
                wmax = w
    if wmax <= 0.0:
        wmax = 1.0
    scale = (2.0 ** 42) / wmax
    big = np.int64(nloc // 2 + 2) * (np.int64(wmax * scale) + 1) + 7
    offs = big + 1
    Wi = np.zeros((nloc, nloc), dtype=np.int64)
    for a in range(nloc):
        for b2 in range(a + 1, nloc):
            w = wf[a, b2]
            if np.isfinite(w):
                iw = np.int64(w * scale + 0.5)
            else:
                iw = big
            Wi[a, b2] = offs - iw
            Wi[b2, a] = offs - iw
    mate = np.empty(nloc, dtype=np.int64)
    status = mwm_dense(nloc, Wi, mate)
    if status != 0:
        return np.inf, np.uint8(0), status
    total = 0.0
    obs = np.uint8(0)
    for a in range(nloc):
        b2 = mate[a]
        if b2 < 0:
            return np.inf, np.uint8(0), 1
        if b2 < a:
            continue
        if not np.isfinite(wf[a, b2]):
            return np.inf, np.uint8(0), 1
        ga = members[a]
        if b2 == c and odd == 1:
            total += BD[ga]
            obs ^= BO[ga]
        else:
            gb = members[b2]
            dd = D[ga, gb]
            bb = BD[ga] + BD[gb]
            if dd < bb:
                total += dd
                obs ^= OB[ga, gb]
            else:
                total += bb
                obs ^= BO[ga] ^ BO[gb]
    return total, obs, 0


@njit(cache=True, nogil=True)
def decode_shots(det, D, BD, OB, BO, cap, preds, weights, flags):
    """Decode a block of shots in place.

    det: (shots, n_det) uint8 flip matrix.  preds/weights/flags are output
    arrays of the same leading dimension.
    """
    nshots, nd = det.shape
    flipped = np.empty(nd, dtype=np.int64)
    parent = np.empty(nd, dtype=np.int64)
    members = np.empty(nd, dtype=np.int64)
    for s in range(nshots):
        m = 0
        for col in range(nd):
            if det[s, col]:
                flipped[m] = col
                m += 1
        preds[s] = 0
        weights[s] = 0.0
        flags[s] = FLAG_OK
        if m == 0:
            continue
        for i in range(m):
            parent[i] = i
        for i in range(m):
            gi = flipped[i]
            for j in range(i + 1, m):
                gj = flipped[j]
                if D[gi, gj] < BD[gi] + BD[gj]:
                    ri = _find(parent, i)
                    rj = _find(parent, j)
                    if ri != rj:
                        parent[ri] = rj
        total_w = 0.0
        pred = np.uint8(0)
        for i in range(m):
            if _find(parent, i) != i:
                continue
            c = 0
            for j in range(m):
                if _find(parent, j) == i:
                    members[c] = flipped[j]
                    c += 1
            if c > cap:
                flags[s] = FLAG_FALLBACK
                w, obs, st = blossom_component(members[:c], c, D, BD, OB, BO)
                if st != 0:
                    flags[s] = FLAG_DISCONNECTED if st == 1 else FLAG_ERROR
                    break
            else:
                w, obs = _solve_component(members[:c], c, D, BD, OB, BO)
                if not np.isfinite(w):
                    flags[s] = FLAG_DISCONNECTED
                    break
            total_w += w
            pred ^= obs
        if flags[s] == FLAG_OK or flags[s] == FLAG_FALLBACK:
            preds[s] = pred
            weights[s] = total_w


@njit(cache=True, nogil=True)
def xor_scatter(det, obs, positions, det_ids, obs_flip):
    """XOR one mechanism's symptom into sampled shots."""
    for p in positions:
        for d in det_ids:
            det[p, d] ^= 1
        if obs_flip:
            obs[p] ^= 1
