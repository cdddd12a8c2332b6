# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled simulation tick; mirrors ``_pykernel.tick`` operation for operation."""

from libc.math cimport sqrt
from libc.stdlib cimport malloc, free

cdef double EPS = 1e-12


cdef inline void _unit(double x, double y, double* ox, double* oy) noexcept nogil:
    cdef double n = sqrt(x * x + y * y)
    if n < EPS:
        ox[0] = 0.0
        oy[0] = 0.0
    else:
        ox[0] = x / n
        oy[0] = y / n


cdef inline void _clamp(double* x, double* y, double v_max) noexcept nogil:
    cdef double speed = sqrt(x[0] * x[0] + y[0] * y[0])
    cdef double f
    if speed > v_max:
        f = v_max / speed
        x[0] = x[0] * f
        y[0] = y[0] * f


cdef inline void _reflect(double* p, double* v, double hi) noexcept nogil:
    if p[0] < 0.0:
        p[0] = -p[0]
        v[0] = -v[0]
    elif p[0] > hi:
        p[0] = 2.0 * hi - p[0]
        v[0] = -v[0]


def tick(double[:, ::1] pos, double[:, ::1] vel, double[::1] trust,
         const unsigned char[:, ::1] adj,
         double w_c, double w_a, double w_s, double r_sep, double v_max,
         bint update_trusts, double noise_x, double noise_y,
         double goal_x, double goal_y, double leader_speed,
         double width, double length):
    cdef Py_ssize_t n = pos.shape[0]
    cdef Py_ssize_t i, j
    cdef int k
    cdef double px, py, dx, dy, d, r2 = r_sep * r_sep
    cdef double cx, cy, ax, ay, sx, sy, tsum, t
    cdef double ucx, ucy, uax, uay, usx, usy
    cdef double vx, vy
    cdef double* nv = <double*> malloc(2 * n * sizeof(double))
    cdef double* nt = <double*> malloc(n * sizeof(double))
    if nv == NULL or nt == NULL:
        free(nv)
        free(nt)
        raise MemoryError()

    with nogil:
        for i in range(n):
            nt[i] = trust[i]
        if update_trusts:
            for i in range(2, n):
                tsum = 0.0
                k = 0
                for j in range(n):
                    if adj[i, j]:
                        tsum += trust[j] - trust[i]
                        k += 1
                if k > 0:
                    t = trust[i] + 0.5 * (tsum / k)
                    if t < -1.0:
                        t = -1.0
                    if t > 1.0:
                        t = 1.0
                    nt[i] = t

        for i in range(1, n):
            px = pos[i, 0]
            py = pos[i, 1]
            cx = 0.0
            cy = 0.0
            ax = 0.0
            ay = 0.0
            sx = 0.0
            sy = 0.0
            k = 0
            for j in range(n):
                if adj[i, j]:
                    cx += pos[j, 0]
                    cy += pos[j, 1]
                    ax += vel[j, 0]
                    ay += vel[j, 1]
                    k += 1
                if j != i:
                    dx = pos[j, 0] - px
                    dy = pos[j, 1] - py
                    if dx * dx + dy * dy <= r2:
                        sx += dx
                        sy += dy
            if k > 0:
                _unit(cx / k - px, cy / k - py, &ucx, &ucy)
                _unit(ax / k - vel[i, 0], ay / k - vel[i, 1], &uax, &uay)
            else:
                ucx = 0.0
                ucy = 0.0
                uax = 0.0
                uay = 0.0
            _unit(-sx, -sy, &usx, &usy)
            t = nt[i]
            vx = vel[i, 0] + t * (w_c * ucx + w_a * uax) + w_s * usx
            vy = vel[i, 1] + t * (w_c * ucy + w_a * uay) + w_s * usy
            _clamp(&vx, &vy, v_max)
            nv[2 * i] = vx
            nv[2 * i + 1] = vy

        if n > 1:
            vx = nv[2] + noise_x
            vy = nv[3] + noise_y
            _clamp(&vx, &vy, v_max)
            nv[2] = vx
            nv[3] = vy

        dx = goal_x - pos[0, 0]
        dy = goal_y - pos[0, 1]
        d = sqrt(dx * dx + dy * dy)
        if d < EPS:
            nv[0] = 0.0
            nv[1] = 0.0
        else:
            nv[0] = dx / d * leader_speed
            nv[1] = dy / d * leader_speed

        for i in range(n):
            pos[i, 0] = pos[i, 0] + nv[2 * i]
            pos[i, 1] = pos[i, 1] + nv[2 * i + 1]
            vel[i, 0] = nv[2 * i]
            vel[i, 1] = nv[2 * i + 1]
            _reflect(&pos[i, 0], &vel[i, 0], width)
            _reflect(&pos[i, 1], &vel[i, 1], length)
            trust[i] = nt[i]

    free(nv)
    free(nt)
