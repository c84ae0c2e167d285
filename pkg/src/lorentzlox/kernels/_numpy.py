"""Pure-numpy kernels, vectorised over arrays of u.

Domain violations produce NaN; callers decide whether that is an error.
"""
import numpy as np

from ..expr import (OP_ADD, OP_CONST, OP_COS, OP_COSH, OP_DIV, OP_EXP, OP_LOG,
                    OP_MUL, OP_NEG, OP_POW, OP_SIN, OP_SINH, OP_SQRT, OP_SUB,
                    OP_VAR)

NAME = "numpy"

# integrand selectors for simpson_increments
DVDU = 0
SPEED = 1

ROOT_CLAMP = 1e-9


def _powi(v, d, k):
    k = int(k)
    if k == 0:
        return np.ones_like(v), np.zeros_like(d)
    if k > 0:
        return v ** k, k * v ** (k - 1) * d
    inv = 1.0 / v
    p = inv ** (-k)
    return p, k * p * inv * d


def eval_tape(ops, args, u):
    """Value and derivative of a compiled tape at every point of ``u``."""
    u = np.asarray(u, dtype=np.float64)
    vals = []
    ders = []
    with np.errstate(all="ignore"):
        for op, arg in zip(ops.tolist(), args.tolist()):
            if op == OP_CONST:
                vals.append(np.full_like(u, arg))
                ders.append(np.zeros_like(u))
            elif op == OP_VAR:
                vals.append(u.copy())
                ders.append(np.ones_like(u))
            elif op <= OP_DIV:
                bv, bd = vals.pop(), ders.pop()
                av, ad = vals.pop(), ders.pop()
                if op == OP_ADD:
                    v, d = av + bv, ad + bd
                elif op == OP_SUB:
                    v, d = av - bv, ad - bd
                elif op == OP_MUL:
                    v, d = av * bv, ad * bv + av * bd
                else:
                    bv = np.where(bv == 0.0, np.nan, bv)
                    v = av / bv
                    d = (ad - v * bd) / bv
                vals.append(v)
                ders.append(d)
            else:
                x, dx = vals.pop(), ders.pop()
                if op == OP_NEG:
                    v, d = -x, -dx
                elif op == OP_POW:
                    v, d = _powi(x, dx, arg)
                elif op == OP_SIN:
                    v, d = np.sin(x), np.cos(x) * dx
                elif op == OP_COS:
                    v, d = np.cos(x), -np.sin(x) * dx
                elif op == OP_SINH:
                    v, d = np.sinh(x), np.cosh(x) * dx
                elif op == OP_COSH:
                    v, d = np.cosh(x), np.sinh(x) * dx
                elif op == OP_EXP:
                    v = np.exp(x)
                    d = v * dx
                elif op == OP_LOG:
                    x = np.where(x > 0.0, x, np.nan)
                    v, d = np.log(x), dx / x
                elif op == OP_SQRT:
                    x = np.where(x > 0.0, x, np.nan)
                    v = np.sqrt(x)
                    d = dx / (2.0 * v)
                else:
                    raise ValueError(f"bad opcode {op}")
                vals.append(v)
                ders.append(d)
    return vals[0], ders[0]


def metric(kind, c, eps, x1, dx1, xn, dxn):
    """Closed-form (E, F, G) from the two profile components that matter."""
    E = np.full_like(x1, float(eps))
    if kind == 1:
        F = -c * dxn
        G = x1 * x1 - c * c
    elif kind == 2:
        F = c * dx1
        G = xn * xn + c * c
    else:
        F = -c * dxn
        G = 2.0 * xn * xn
    return E, F, G


def quadratic(F, G, eps, theta):
    """Coefficients of (T^2 G - F^2) w^2 + 2 F (T^2 - eps) w - (1 - eps T^2) = 0.

    Returns (a, h, k, disc) for the reduced form a w^2 + 2 h w - k = 0 with
    disc = h^2 + a k.
    """
    t2 = theta * theta
    a = t2 * G - F * F
    h = F * (t2 - eps)
    k = 1.0 - eps * t2
    return a, h, k, h * h + a * k


def roots(F, G, eps, theta):
    """Both roots (plus, minus) of the dv/du quadratic, cancellation-free."""
    a, h, k, disc = quadratic(F, G, eps, theta)
    with np.errstate(all="ignore"):
        scale = h * h + np.abs(a * k)
        disc = np.where((disc < 0) & (disc >= -ROOT_CLAMP * scale), 0.0, disc)
        sq = np.sqrt(np.where(disc >= 0, disc, np.nan))
        pos = h >= 0
        q = np.where(pos, -h - sq, -h + sq)
        qz = q == 0.0
        q_safe = np.where(qz, 1.0, q)
        big = q_safe / a
        # q == 0 only when h == disc == 0: a double root at 0 if k == 0
        zero = np.where(k == 0.0, 0.0, np.nan)
        small = np.where(qz, zero, -k / q_safe)
        big = np.where(qz, zero, big)
        plus = np.where(pos, small, big)
        minus = np.where(pos, big, small)
    return plus, minus


def integrand(which, kind, c, eps, theta, branch, ops1, args1, opsn, argsn, u):
    x1, dx1 = eval_tape(ops1, args1, u)
    xn, dxn = eval_tape(opsn, argsn, u)
    E, F, G = metric(kind, c, eps, x1, dx1, xn, dxn)
    plus, minus = roots(F, G, eps, theta)
    w = plus if branch > 0 else minus
    if which == DVDU:
        return w
    with np.errstate(all="ignore"):
        return np.sqrt(np.abs(E + 2.0 * F * w + G * w * w))


def simpson_increments(which, kind, c, eps, theta, branch, ops1, args1, opsn, argsn,
                       knots, tol, max_depth):
    """Adaptive Simpson integral over each interval [knots[i], knots[i+1]].

    Panels are bisected until |S(h/2) - S(h)| / 15 <= local tolerance, where
    each interval starts with ``tol * width`` and halves on every split. The
    whole frontier of unfinished panels is refined at once.

    Returns (increments, status): status 0 ok, 1 non-finite integrand,
    2 depth limit hit.
    """
    f = lambda x: integrand(which, kind, c, eps, theta, branch, ops1, args1, opsn, argsn, x)
    knots = np.asarray(knots, dtype=np.float64)
    a = knots[:-1]
    b = knots[1:]
    m = 0.5 * (a + b)
    fx = f(np.concatenate([a, m, knots[-1:]]))
    nint = a.size
    fa = fx[:nint]
    fm = fx[nint:2 * nint]
    fb = np.concatenate([fa[1:], fx[2 * nint:]])
    whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb)
    eps_i = tol * (b - a)
    owner = np.arange(nint)
    depth = 0
    out = np.zeros(nint)
    status = 0
    if not np.all(np.isfinite(fx)):
        return out, 1
    while owner.size:
        lm = 0.5 * (a + m)
        rm = 0.5 * (m + b)
        fl = f(np.concatenate([lm, rm]))
        if not np.all(np.isfinite(fl)):
            return out, 1
        flm = fl[:owner.size]
        frm = fl[owner.size:]
        left = (m - a) / 6.0 * (fa + 4.0 * flm + fm)
        right = (b - m) / 6.0 * (fm + 4.0 * frm + fb)
        diff = left + right - whole
        done = np.abs(diff) <= 15.0 * eps_i
        if depth >= max_depth:
            status = 2
            done[:] = True
        np.add.at(out, owner[done], (left + right + diff / 15.0)[done])
        keep = ~done
        if not keep.any():
            break
        # children: left halves then right halves
        a, m, b, fa, fm, fb, whole, eps_i, owner = (
            np.concatenate([a[keep], m[keep]]),
            np.concatenate([lm[keep], rm[keep]]),
            np.concatenate([m[keep], b[keep]]),
            np.concatenate([fa[keep], fm[keep]]),
            np.concatenate([flm[keep], frm[keep]]),
            np.concatenate([fm[keep], fb[keep]]),
            np.concatenate([left[keep], right[keep]]),
            np.concatenate([eps_i[keep], eps_i[keep]]) * 0.5,
            np.concatenate([owner[keep], owner[keep]]),
        )
        depth += 1
    return out, status
