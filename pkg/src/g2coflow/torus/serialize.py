"""JSON interchange for fields, forms, slices and residual reports.

Fields are serialized spectrally as lists of (mode vector, coefficient)
pairs: ``{"modes": [{"k": [k1..k6], "re": .., "im": ..}, ...]}``.  Mode
vectors always carry six entries; inactive axes must have k = 0.
"""

from __future__ import annotations

import json

import numpy as np

from .forms import BasicForm
from .grid import BasicField, Grid

_MODE_TOL = 1e-12


def grid_to_json(grid):
    return {"active_axes": list(grid.active_axes), "n": grid.n}


def grid_from_json(obj):
    return Grid(active_axes=tuple(obj["active_axes"]), n=int(obj["n"]))


def field_to_json(f, tol=_MODE_TOL):
    spec = f.spectrum()
    grid = f.grid
    modes = []
    if not grid.shape:
        if abs(spec) > tol:
            modes.append({"k": [0] * 6, "re": float(spec.real), "im": float(spec.imag)})
        return {"modes": modes}
    freqs = [grid.wavenumbers(p) for p in range(len(grid.shape))]
    for idx in np.argwhere(np.abs(spec) > tol):
        kvec = [0] * 6
        for pos, axis in enumerate(grid.active_axes):
            kvec[axis - 1] = int(freqs[pos][idx[pos]])
        c = spec[tuple(idx)]
        modes.append({"k": kvec, "re": float(c.real), "im": float(c.imag)})
    modes.sort(key=lambda m: tuple(m["k"]))
    return {"modes": modes}


def field_from_json(obj, grid):
    modes = {
        tuple(m["k"]): complex(m["re"], m.get("im", 0.0)) for m in obj["modes"]
    }
    return BasicField.from_modes(grid, modes)


def form_to_json(form, tol=_MODE_TOL):
    return {
        "degree": form.degree,
        "coeffs": {
            ",".join(map(str, idx)): field_to_json(f, tol)
            for idx, f in form.coeffs.items()
            if f.max_abs() > tol
        },
    }


def form_from_json(obj, grid):
    degree = int(obj["degree"])
    coeffs = {}
    for key, fobj in obj["coeffs"].items():
        idx = tuple(int(x) for x in key.split(",")) if key else ()
        coeffs[idx] = field_from_json(fobj, grid)
    return BasicForm(grid, degree, coeffs)


def slice_to_json(slice_):
    out = {
        "f": field_to_json(slice_.f),
        "f_dot": field_to_json(slice_.f_dot),
        "beta": form_to_json(slice_.beta),
        "gamma": form_to_json(slice_.gamma),
    }
    if slice_.alpha is not None:
        out["alpha"] = form_to_json(slice_.alpha)
    return out


def slice_from_json(obj, grid):
    from .slices import DeformationSlice

    return DeformationSlice(
        f=field_from_json(obj["f"], grid),
        f_dot=field_from_json(obj["f_dot"], grid),
        beta=form_from_json(obj["beta"], grid),
        gamma=form_from_json(obj["gamma"], grid),
        alpha=form_from_json(obj["alpha"], grid) if "alpha" in obj else None,
    )


def report_to_json(report):
    return report.to_dict()


def dump(obj, path):
    with open(path, "w") as fh:
        json.dump(obj, fh, indent=2, sort_keys=True)
        fh.write("\n")


def load(path):
    with open(path) as fh:
        return json.load(fh)
