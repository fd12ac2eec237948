"""Independent brute-force oracles used to pin expected values in tests.

Everything here deliberately avoids the library's program builders: best
responses are evaluated with plain numpy argmax logic, worst-case
expectations over polytopes and transport balls come from exhaustive vertex
enumeration, and leader optimization is a grid search over the simplex.
Slow on purpose; only run at desk scale.
"""

from __future__ import annotations

import itertools

import numpy as np
from scipy.optimize import linprog


# -- elementary evaluation -----------------------------------------------------


def oracle_h(u_l, u_f, x, tol=1e-9):
    """Leader payoff under strong tie-breaking, computed directly."""
    x = np.asarray(x, dtype=float)
    follower = x @ np.asarray(u_f, dtype=float)
    leader = x @ np.asarray(u_l, dtype=float)
    br = np.flatnonzero(follower >= follower.max() - tol)
    return float(leader[br].max())


def simplex_grid(n: int, divisor: int) -> np.ndarray:
    """All points of the n-simplex with coordinates that are multiples of 1/divisor."""
    pts = []
    for cuts in itertools.combinations(range(divisor + n - 1), n - 1):
        prev = -1
        parts = []
        for c in cuts:
            parts.append(c - prev - 1)
            prev = c
        parts.append(divisor + n - 2 - prev)
        pts.append(parts)
    return np.array(pts, dtype=float) / divisor


# -- worst case by vertex enumeration -------------------------------------------


def _dedup_rows(points, tol=1e-9):
    out = []
    for p in points:
        if not any(np.max(np.abs(p - q)) <= tol for q in out):
            out.append(p)
    return out


def polytope_weight_vertices(A, b, k) -> list[np.ndarray]:
    """Vertices of {mu in the k-simplex : A mu <= b} by active-set enumeration."""
    A = np.asarray(A, dtype=float).reshape(-1, k)
    b = np.asarray(b, dtype=float).ravel()
    ineqs = [(A[r], b[r]) for r in range(A.shape[0])]
    for i in range(k):
        e = np.zeros(k)
        e[i] = -1.0
        ineqs.append((e, 0.0))
    verts = []
    for combo in itertools.combinations(range(len(ineqs)), k - 1):
        M = np.vstack([np.ones(k)] + [ineqs[i][0] for i in combo])
        rhs = np.array([1.0] + [ineqs[i][1] for i in combo])
        try:
            mu = np.linalg.solve(M, rhs)
        except np.linalg.LinAlgError:
            continue
        if all(a @ mu <= bb + 1e-9 for a, bb in ineqs):
            verts.append(mu)
    return _dedup_rows(verts)


def ball_weight_vertices(cost_pow, nu_weights, radius_pow) -> list[np.ndarray]:
    """Candidate worst-case weight vectors for a transport ball, exactly.

    Enumerates the vertices of the transport-plan polytope
    {g >= 0 : column sums = nu, total cost <= radius^t} and projects each to
    its row-sum weight vector; a linear worst case is attained at one of them.
    """
    cost_pow = np.asarray(cost_pow, dtype=float)
    kc, kn = cost_pow.shape
    K = kc * kn
    eqs = []
    for j in range(kn):
        row = np.zeros(K)
        row[j::kn] = 1.0
        eqs.append((row, float(nu_weights[j])))
    ineqs = [(cost_pow.ravel(), float(radius_pow))]
    for idx in range(K):
        e = np.zeros(K)
        e[idx] = -1.0
        ineqs.append((e, 0.0))
    need = K - kn
    verts = []
    for combo in itertools.combinations(range(len(ineqs)), need):
        M = np.vstack([r for r, _ in eqs] + [ineqs[i][0] for i in combo])
        rhs = np.array([v for _, v in eqs] + [ineqs[i][1] for i in combo])
        try:
            g = np.linalg.solve(M, rhs)
        except np.linalg.LinAlgError:
            continue
        if g.min() < -1e-9:
            continue
        if cost_pow.ravel() @ g > radius_pow + 1e-9:
            continue
        verts.append(g.reshape(kc, kn).sum(axis=1))
    return _dedup_rows(verts)


def grid_drsss_value(u_l, utilities, weight_vertices, divisor=200, tol=1e-9):
    """max over the strategy grid of the worst expected tie-break payoff.

    `weight_vertices` lists every candidate worst-case weight vector over
    `utilities`; the inner infimum is their minimum.
    """
    u_l = np.asarray(u_l, dtype=float)
    n = u_l.shape[0]
    grid = simplex_grid(n, divisor)
    mus = np.array(weight_vertices)
    best = -np.inf
    for x in grid:
        h = np.array([oracle_h(u_l, u, x, tol) for u in utilities])
        best = max(best, float((mus @ h).min()))
    return best


# -- classical Stackelberg value via one LP per follower action -----------------


def sse_multiple_lp(u_l, u_f):
    """Strong Stackelberg value: best over follower actions of the induced LP."""
    u_l = np.asarray(u_l, dtype=float)
    u_f = np.asarray(u_f, dtype=float)
    n, m = u_l.shape
    best = -np.inf
    for a in range(m):
        A_ub = (u_f - u_f[:, a][:, None]).T       # x'u_f(., a') <= x'u_f(., a)
        b_ub = np.zeros(m)
        res = linprog(-u_l[:, a], A_ub=A_ub, b_ub=b_ub,
                      A_eq=np.ones((1, n)), b_eq=[1.0],
                      bounds=[(0, 1)] * n, method="highs")
        if res.status == 0:
            best = max(best, -float(res.fun))
    return best


# -- sampled-envelope oracle for the inspection family ---------------------------


def inspection_family_dist_pow(mask_count, total, params, nominal):
    """Squared family distance of (hit, miss) pairs to one nominal pair."""
    d_hit = params[:, 0] - nominal[0]
    d_miss = params[:, 1] - nominal[1]
    return mask_count * d_hit ** 2 + (total - mask_count) * d_miss ** 2


def naive_envelope(h_values, dist_pow, lam, exact=()):
    """min over samples (and exact points) of lam * d^t + h."""
    vals = lam * np.asarray(dist_pow) + np.asarray(h_values)
    best = float(vals.min())
    for d, h in exact:
        best = min(best, lam * d + h)
    return best


def inspection_grid_oracle(game, ball, divisor=100, n_samples=10_000, seed=0,
                           tol=1e-9, return_argmax=False):
    """Grid-search upper bound oracle for the inspection family.

    For every strategy on the simplex grid the inner worst case is the dual
    bound sup_{lam >= 0} (-lam theta^t + sum_j nu_j env_j(lam)) where env_j is
    the lower envelope of lam d^t + h over n_samples sampled family members
    plus the exactly evaluated nominal point.

    The envelope collapses: a family member's best-response set depends only
    on the sign of hit - miss, so h takes one value per sign region and only
    the nearest sample of each region matters. The collapse is verified
    against the naive envelope in the test suite.
    """
    family = game.universe
    mask = family.mask.astype(float)
    c = int(family.mask.sum())
    total = game.n * game.m
    k = ball.k
    theta_pow = ball.radius_pow()
    nu = ball.nominal.weights

    rng = np.random.default_rng(seed)
    samples = rng.uniform(size=(n_samples, 2))        # columns: hit, miss
    plus = samples[:, 0] > samples[:, 1]              # prefers intersecting
    nominal_pairs = family.nominal_params

    d_plus = np.empty(k)
    d_minus = np.empty(k)
    for j in range(k):
        d = inspection_family_dist_pow(c, total, samples, nominal_pairs[j])
        d_plus[j] = d[plus].min() if plus.any() else np.inf
        d_minus[j] = d[~plus].min() if (~plus).any() else np.inf

    grid = simplex_grid(game.n, divisor)
    hit_prob = grid @ mask                            # (G, m)
    leader = grid @ game.u_l                          # (G, m)
    top = hit_prob.max(axis=1, keepdims=True)
    bot = hit_prob.min(axis=1, keepdims=True)
    h_plus = np.where(hit_prob >= top - tol, leader, -np.inf).max(axis=1)
    h_minus = np.where(hit_prob <= bot + tol, leader, -np.inf).max(axis=1)

    # exact evaluation of each nominal member on the whole grid
    h_nom = np.empty((grid.shape[0], k))
    for j in range(k):
        a, b = nominal_pairs[j]
        payoff = a * hit_prob + b * (1.0 - hit_prob)
        br = payoff >= payoff.max(axis=1, keepdims=True) - tol
        h_nom[:, j] = np.where(br, leader, -np.inf).max(axis=1)

    # candidate lambdas: kinks of each three-line envelope, plus endpoints
    cands = [np.zeros(grid.shape[0]), np.full(grid.shape[0], 1e7)]
    for j in range(k):
        lines_d = (0.0, d_plus[j], d_minus[j])
        lines_h = (h_nom[:, j], h_plus, h_minus)
        for p in range(3):
            for q in range(p + 1, 3):
                dd = lines_d[q] - lines_d[p]
                if abs(dd) < 1e-15:
                    continue
                lam = (lines_h[p] - lines_h[q]) / dd
                cands.append(np.maximum(lam, 0.0))
    lams = np.stack(cands, axis=1)                    # (G, n_cand)

    dual = -lams * theta_pow
    for j in range(k):
        env = np.minimum(h_nom[:, j][:, None],
                         np.minimum(h_plus[:, None] + lams * d_plus[j],
                                    h_minus[:, None] + lams * d_minus[j]))
        dual = dual + nu[j] * env
    values = dual.max(axis=1)
    best = int(np.argmax(values))
    if return_argmax:
        return float(values[best]), grid[best]
    return float(values[best])
