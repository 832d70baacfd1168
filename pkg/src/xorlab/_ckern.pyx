# cython: language_level=3
# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled training and projection kernels.

Mirrors _pycore.py operation for operation: same accumulation order, same
constants, same update expressions, so both backends produce bit-identical
floats.  Keep the two files in lockstep when editing either.
"""

from libc.math cimport exp, tanh, isfinite
from libc.stdlib cimport malloc, free
from libc.stdint cimport uint64_t

BACKEND = "c"
SSE_BLOWUP = 1e6

cdef uint64_t GAMMA = <uint64_t>0x9E3779B97F4A7C15
cdef uint64_t MIX1 = <uint64_t>0xBF58476D1CE4E5B9
cdef uint64_t MIX2 = <uint64_t>0x94D049BB133111EB
cdef double INV53 = 1.0 / 9007199254740992.0
cdef double C_BLOWUP = 1e6


cdef inline uint64_t sm_next(uint64_t* state) noexcept nogil:
    cdef uint64_t z
    state[0] = state[0] + GAMMA
    z = state[0]
    z = (z ^ (z >> 30)) * MIX1
    z = (z ^ (z >> 27)) * MIX2
    return z ^ (z >> 31)


cdef inline double sm_unit(uint64_t* state) noexcept nogil:
    return <double>(sm_next(state) >> 11) * INV53


def rng_uniform(seed, count):
    """count draws in [0, 1) from the seed's stream."""
    cdef uint64_t state = <uint64_t>(seed & 0xFFFFFFFFFFFFFFFF)
    cdef Py_ssize_t k, n = count
    out = [0.0] * n
    for k in range(n):
        out[k] = sm_unit(&state)
    return out


cdef inline double c_act(int code, double z) noexcept nogil:
    cdef double e
    if code == 0:
        return z
    if code == 1:
        return tanh(z)
    if code == 2:
        if z >= 0.0:
            return 1.0 / (1.0 + exp(-z))
        e = exp(z)
        return e / (1.0 + e)
    return z if z > 0.0 else 0.0


cdef inline double c_slope(int code, double z, double a) noexcept nogil:
    if code == 0:
        return 1.0
    if code == 1:
        return 1.0 - a * a
    if code == 2:
        return a * (1.0 - a)
    return 1.0 if z > 0.0 else 0.0


cdef double c_forward(int nlayers, int* sizes, int* acts, int* offs,
                      int* uoffs, double* w, double* x,
                      double* pre, double* post) noexcept nogil:
    cdef int l, i, j, n_prev, code, row, base
    cdef double z
    cdef double* a = x
    cdef double* zs
    cdef double* avs
    for l in range(nlayers):
        n_prev = sizes[l]
        base = offs[l]
        code = acts[l]
        zs = pre + uoffs[l]
        avs = post + uoffs[l]
        for i in range(sizes[l + 1]):
            row = base + i * (n_prev + 1)
            z = 0.0
            for j in range(n_prev):
                z += w[row + j] * a[j]
            z += w[row + n_prev]
            zs[i] = z
            avs[i] = c_act(code, z)
        a = avs
    return a[0]


cdef double c_sse(int nlayers, int* sizes, int* acts, int* offs, int* uoffs,
                  double* w, double* xs, double* ts, int n_samples,
                  double* pre, double* post) noexcept nogil:
    cdef int k, n_in = sizes[0]
    cdef double d, out, total = 0.0
    for k in range(n_samples):
        out = c_forward(nlayers, sizes, acts, offs, uoffs, w,
                        xs + k * n_in, pre, post)
        d = out - ts[k]
        total += d * d
    return total


cdef void c_backward(int nlayers, int* sizes, int* acts, int* offs,
                     int* uoffs, double* w, double target,
                     double* pre, double* post, double* delta) noexcept nogil:
    cdef int l, i, j, base, width, code, last = nlayers - 1
    cdef double acc, out = post[uoffs[last]]
    delta[uoffs[last]] = ((out - target)
                          * c_slope(acts[last], pre[uoffs[last]],
                                    post[uoffs[last]]))
    for l in range(last - 1, -1, -1):
        base = offs[l + 1]
        width = sizes[l + 1]
        code = acts[l]
        for j in range(width):
            acc = 0.0
            for i in range(sizes[l + 2]):
                acc += delta[uoffs[l + 1] + i] * w[base + i * (width + 1) + j]
            delta[uoffs[l] + j] = acc * c_slope(code, pre[uoffs[l] + j],
                                                post[uoffs[l] + j])


cdef struct KernelBufs:
    int* sizes
    int* acts
    int* offs
    int* uoffs
    double* xs
    double* ts
    double* pre
    double* post


cdef int _fill_bufs(KernelBufs* b, object sizes, object acts,
                    object xs, object ts) except -1:
    cdef int nlayers = len(sizes) - 1
    cdef int l, k
    b.sizes = <int*>malloc(len(sizes) * sizeof(int))
    b.acts = <int*>malloc(nlayers * sizeof(int))
    b.offs = <int*>malloc((nlayers + 1) * sizeof(int))
    b.uoffs = <int*>malloc((nlayers + 1) * sizeof(int))
    b.xs = <double*>malloc(max(len(xs), 1) * sizeof(double))
    b.ts = <double*>malloc(max(len(ts), 1) * sizeof(double))
    if (b.sizes == NULL or b.acts == NULL or b.offs == NULL
            or b.uoffs == NULL or b.xs == NULL or b.ts == NULL):
        raise MemoryError()
    for l in range(len(sizes)):
        b.sizes[l] = sizes[l]
    for l in range(nlayers):
        b.acts[l] = acts[l]
    b.offs[0] = 0
    b.uoffs[0] = 0
    for l in range(nlayers):
        b.offs[l + 1] = b.offs[l] + b.sizes[l + 1] * (b.sizes[l] + 1)
        b.uoffs[l + 1] = b.uoffs[l] + b.sizes[l + 1]
    for k in range(len(xs)):
        b.xs[k] = xs[k]
    for k in range(len(ts)):
        b.ts[k] = ts[k]
    b.pre = <double*>malloc(max(b.uoffs[nlayers], 1) * sizeof(double))
    b.post = <double*>malloc(max(b.uoffs[nlayers], 1) * sizeof(double))
    if b.pre == NULL or b.post == NULL:
        raise MemoryError()
    return 0


cdef void _free_bufs(KernelBufs* b) noexcept nogil:
    free(b.sizes)
    free(b.acts)
    free(b.offs)
    free(b.uoffs)
    free(b.xs)
    free(b.ts)
    free(b.pre)
    free(b.post)


def sse_dataset(sizes, acts, w, xs, ts):
    cdef KernelBufs b
    cdef int nlayers = len(sizes) - 1
    cdef int k
    cdef double result
    cdef double* cw = NULL
    b.sizes = b.acts = b.offs = b.uoffs = NULL
    b.xs = b.ts = b.pre = b.post = NULL
    try:
        _fill_bufs(&b, sizes, acts, xs, ts)
        cw = <double*>malloc(max(len(w), 1) * sizeof(double))
        if cw == NULL:
            raise MemoryError()
        for k in range(len(w)):
            cw[k] = w[k]
        result = c_sse(nlayers, b.sizes, b.acts, b.offs, b.uoffs, cw,
                       b.xs, b.ts, len(ts), b.pre, b.post)
    finally:
        free(cw)
        _free_bufs(&b)
    return result


def train_run(sizes, acts, xs, ts, lr, max_iters, tol, per_sample,
              seed, init_range, record):
    """Gradient-descent run; returns (weights, iters, sse, status, traj).

    Semantics identical to _pycore.train_run.
    """
    cdef KernelBufs b
    cdef int nlayers = len(sizes) - 1
    cdef int n_samples = len(ts)
    cdef int want_traj = 1 if record else 0
    cdef int stochastic = 1 if per_sample else 0
    cdef int max_it = max_iters
    cdef double c_lr = lr
    cdef double c_tol = tol
    cdef double c_range = init_range
    cdef uint64_t state = <uint64_t>(seed & 0xFFFFFFFFFFFFFFFF)
    cdef int n_weights, n_in, it, i, j, k, l, base, row, n_prev, bad
    cdef int status = 1
    cdef int iters = max_it
    cdef uint64_t jdraw
    cdef double di, sse
    cdef double* w = NULL
    cdef double* delta = NULL
    cdef double* gsum = NULL
    cdef double* below
    cdef double* x
    cdef int* order = NULL
    b.sizes = b.acts = b.offs = b.uoffs = NULL
    b.xs = b.ts = b.pre = b.post = NULL
    traj = []
    try:
        _fill_bufs(&b, sizes, acts, xs, ts)
        n_in = b.sizes[0]
        n_weights = b.offs[nlayers]
        w = <double*>malloc(n_weights * sizeof(double))
        delta = <double*>malloc(max(b.uoffs[nlayers], 1) * sizeof(double))
        gsum = <double*>malloc(n_weights * sizeof(double))
        order = <int*>malloc(max(n_samples, 1) * sizeof(int))
        if w == NULL or delta == NULL or gsum == NULL or order == NULL:
            raise MemoryError()
        for k in range(n_weights):
            w[k] = (2.0 * sm_unit(&state) - 1.0) * c_range
        for k in range(n_samples):
            order[k] = k
        sse = float("inf")

        for it in range(1, max_it + 1):
            if stochastic:
                for i in range(n_samples - 1, 0, -1):
                    jdraw = sm_next(&state) % (<uint64_t>(i + 1))
                    j = <int>jdraw
                    k = order[i]
                    order[i] = order[j]
                    order[j] = k
                for k in range(n_samples):
                    x = b.xs + order[k] * n_in
                    c_forward(nlayers, b.sizes, b.acts, b.offs, b.uoffs,
                              w, x, b.pre, b.post)
                    c_backward(nlayers, b.sizes, b.acts, b.offs, b.uoffs,
                               w, b.ts[order[k]], b.pre, b.post, delta)
                    for l in range(nlayers):
                        below = b.post + b.uoffs[l - 1] if l > 0 else x
                        n_prev = b.sizes[l]
                        base = b.offs[l]
                        for i in range(b.sizes[l + 1]):
                            row = base + i * (n_prev + 1)
                            di = delta[b.uoffs[l] + i]
                            for j in range(n_prev):
                                w[row + j] -= c_lr * (di * below[j])
                            w[row + n_prev] -= c_lr * di
            else:
                for k in range(n_weights):
                    gsum[k] = 0.0
                for k in range(n_samples):
                    x = b.xs + k * n_in
                    c_forward(nlayers, b.sizes, b.acts, b.offs, b.uoffs,
                              w, x, b.pre, b.post)
                    c_backward(nlayers, b.sizes, b.acts, b.offs, b.uoffs,
                               w, b.ts[k], b.pre, b.post, delta)
                    for l in range(nlayers):
                        below = b.post + b.uoffs[l - 1] if l > 0 else x
                        n_prev = b.sizes[l]
                        base = b.offs[l]
                        for i in range(b.sizes[l + 1]):
                            row = base + i * (n_prev + 1)
                            di = delta[b.uoffs[l] + i]
                            for j in range(n_prev):
                                gsum[row + j] += di * below[j]
                            gsum[row + n_prev] += di
                for k in range(n_weights):
                    w[k] -= c_lr * gsum[k]

            sse = c_sse(nlayers, b.sizes, b.acts, b.offs, b.uoffs, w,
                        b.xs, b.ts, n_samples, b.pre, b.post)
            if want_traj:
                traj.append(sse)
            bad = 0 if isfinite(sse) else 1
            if not bad:
                for k in range(n_weights):
                    if not isfinite(w[k]):
                        bad = 1
                        break
            if bad:
                status = 3
                iters = it
                break
            if sse > C_BLOWUP:
                status = 2
                iters = it
                break
            if sse < c_tol:
                status = 0
                iters = it
                break

        w_out = [0.0] * n_weights
        for k in range(n_weights):
            w_out[k] = w[k]
    finally:
        free(w)
        free(delta)
        free(gsum)
        free(order)
        _free_bufs(&b)
    return w_out, iters, sse, status, traj


def project_grid(sizes, acts, w, xs, ts, ia, ib, avals, bvals):
    """SSE at every (avals[i], bvals[j]) written into flat slots ia/ib."""
    cdef KernelBufs b
    cdef int nlayers = len(sizes) - 1
    cdef int n_samples = len(ts)
    cdef int c_ia = ia
    cdef int c_ib = ib
    cdef int i, j, k
    cdef int na = len(avals)
    cdef int nb = len(bvals)
    cdef double* work = NULL
    cdef double* ca = NULL
    cdef double* cb = NULL
    cdef double* grid = NULL
    b.sizes = b.acts = b.offs = b.uoffs = NULL
    b.xs = b.ts = b.pre = b.post = NULL
    try:
        _fill_bufs(&b, sizes, acts, xs, ts)
        work = <double*>malloc(max(len(w), 1) * sizeof(double))
        ca = <double*>malloc(max(na, 1) * sizeof(double))
        cb = <double*>malloc(max(nb, 1) * sizeof(double))
        grid = <double*>malloc(max(na * nb, 1) * sizeof(double))
        if work == NULL or ca == NULL or cb == NULL or grid == NULL:
            raise MemoryError()
        for k in range(len(w)):
            work[k] = w[k]
        for i in range(na):
            ca[i] = avals[i]
        for j in range(nb):
            cb[j] = bvals[j]
        for i in range(na):
            work[c_ia] = ca[i]
            for j in range(nb):
                work[c_ib] = cb[j]
                grid[i * nb + j] = c_sse(nlayers, b.sizes, b.acts, b.offs,
                                         b.uoffs, work, b.xs, b.ts,
                                         n_samples, b.pre, b.post)
        out = [0.0] * (na * nb)
        for k in range(na * nb):
            out[k] = grid[k]
    finally:
        free(work)
        free(ca)
        free(cb)
        free(grid)
        _free_bufs(&b)
    return out
