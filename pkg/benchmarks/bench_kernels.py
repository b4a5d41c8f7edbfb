"""Compare the compiled and numpy quadrature kernels.

Run with ``python benchmarks/bench_kernels.py [--repeat N]``. Reports the time
for one batch of panel sums and for a 2001-point raw g2 trace with each kernel,
and checks that both give the same trace.
"""
import argparse
import time

import numpy as np

from biphoton_waveform import ThermalEnsemble, preset_params
from biphoton_waveform._kernels_py import gl_panel_sums as py_kernel
from biphoton_waveform.correlator import QuadratureSpec, TauGrid, integrate_velocity

try:
    from biphoton_waveform._kernels import gl_panel_sums as cy_kernel
except ImportError:
    cy_kernel = None


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return min(times), out


def panel_batch(kernel, params, u):
    s, d = params.system, params.drive
    edges = np.linspace(-6 * u, 6 * u, 2001)
    x, w = np.polynomial.legendre.leggauss(16)
    lo, hi = edges[:-1].copy(), edges[1:].copy()
    c = d.coefficient_c
    return lambda: kernel(lo, hi, x, w, 3e-9, d.k_p, d.k_c, d.delta_p, s.gamma_21, s.gamma_3,
                          d.omega_c**2, c.real, c.imag, u)


def trace(kernel, params, ens):
    taus = TauGrid().values
    quad = QuadratureSpec()
    return lambda: np.array(
        [abs(integrate_velocity(t, params, ens, quad, kernel=kernel).value) ** 2 for t in taus]
    )


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--preset", default="Cs-6D5/2")
    args = ap.parse_args()
    params = preset_params(args.preset)
    ens = ThermalEnsemble()
    kernels = {"python": py_kernel}
    if cy_kernel is not None:
        kernels["cython"] = cy_kernel
    else:
        print("compiled kernel not built; timing the numpy fallback only")

    rows, traces = [], {}
    for name, k in kernels.items():
        t_batch, _ = best_of(panel_batch(k, params, ens.u), args.repeat)
        t_trace, traces[name] = best_of(trace(k, params, ens), max(1, args.repeat // 2))
        rows.append((name, t_batch, t_trace))

    print(f"{'kernel':<8} {'2000 panels x 16 nodes':>24} {'2001-point g2 trace':>22}")
    for name, t_batch, t_trace in rows:
        print(f"{name:<8} {t_batch * 1e3:>21.2f} ms {t_trace:>20.2f} s")
    if len(rows) == 2:
        print(f"speed-up: panels x{rows[0][1] / rows[1][1]:.1f}, trace x{rows[0][2] / rows[1][2]:.1f}")
        a, b = traces["python"], traces["cython"]
        print(f"max relative trace difference: {np.max(np.abs(a - b)) / a.max():.2e}")


if __name__ == "__main__":
    main()
