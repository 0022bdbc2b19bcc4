#!/usr/bin/env python3
"""Smoke test for the cocycle_lab_py extension module.

Builds nothing itself: it locates the cdylib produced by
`cargo build -p cocycle-lab-py` (debug or release), copies it next to a
temp dir under the importable name, and exercises the bindings.
"""

import math
import pathlib
import shutil
import sys
import tempfile

ROOT = pathlib.Path(__file__).resolve().parent.parent


def locate_extension() -> pathlib.Path:
    names = ["libcocycle_lab_py.so", "libcocycle_lab_py.dylib", "cocycle_lab_py.dll"]
    candidates = [
        ROOT / "target" / profile / name
        for profile in ("release", "debug")
        for name in names
    ]
    for c in candidates:
        if c.exists():
            return c
    sys.exit(
        "extension not found; run `cargo build -p cocycle-lab-py` first\n"
        + "\n".join(f"  looked at {c}" for c in candidates)
    )


def main() -> None:
    ext = locate_extension()
    tmp = pathlib.Path(tempfile.mkdtemp(prefix="cocycle_lab_py_"))
    suffix = ".pyd" if ext.suffix == ".dll" else ".so"
    shutil.copy2(ext, tmp / f"cocycle_lab_py{suffix}")
    sys.path.insert(0, str(tmp))

    import cocycle_lab_py as lab

    # deterministic diagonal product: exponent is exactly log 2
    diag = lab.Measure.from_atoms([(1.0, 0.0, [2.0, 0.0, 0.0, 0.5])])
    est = diag.estimate_l1(n=2000, n_samples=4, seed=1)
    assert abs(est.value - math.log(2.0)) < 1e-12, est
    assert est.stderr == 0.0

    # the two-noise-atom quasiperiodic model: positive top exponent,
    # exponents pair to zero, and the certificate predicts positivity
    m = lab.Measure.op1(
        alpha=lab.golden_mean(),
        noise_atoms=[(0.5, 0.0), (0.5, 1.0)],
        harmonics=[(1, 2.0, 0.0)],
        energy=0.0,
    )
    est = m.estimate_l1(n=2000, n_samples=20, seed=3)
    assert est.value - 3.0 * est.stderr > 0.0, est

    spec = m.spectrum(n=2000, n_samples=10, k=2, seed=3)
    assert abs(spec[0].value + spec[1].value) < 1e-9, spec

    report = m.positivity_report()
    assert report["verdict"] == "positivity-predicted", report
    assert report["ergodicity"] and report["noncompact"], report

    # Furstenberg functional agrees with the direct estimate loosely
    func = m.furstenberg_functional(burn_in=1000, n_mc=50_000, seed=5)
    assert abs(func.value - est.value) < 5.0 * (func.stderr + est.stderr + 1e-3), (
        func,
        est,
    )

    # free cocycle closed form at a hyperbolic energy
    ref = lab.free_laplacian_reference(3.0)
    assert abs(ref - math.log((3.0 + math.sqrt(5.0)) / 2.0)) < 1e-14

    free = lab.Measure.op1(
        alpha=lab.golden_mean(), noise_atoms=[(1.0, 0.0)], harmonics=[], energy=3.0
    )
    est = free.estimate_l1(n=5000, n_samples=4, seed=7)
    assert abs(est.value - ref) < 5e-3, (est, ref)

    # determinism across calls
    a = m.estimate_l1(n=500, n_samples=8, seed=11)
    b = m.estimate_l1(n=500, n_samples=8, seed=11)
    assert (a.value, a.stderr) == (b.value, b.stderr)

    # invalid input surfaces as ValueError
    try:
        lab.Measure.from_atoms([(1.0, 0.0, [1.0, 2.0, 3.0])])
    except ValueError:
        pass
    else:
        sys.exit("expected ValueError for a non-square matrix")

    print("smoke test passed")


if __name__ == "__main__":
    main()
