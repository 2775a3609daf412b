"""One test per acceptance criterion, each printing a single PASS/FAIL line."""
import time

from uniformize.suites import run_suite


def check(label, report, seconds, limit, detail=""):
    ok = bool(report["passed"]) and seconds < limit
    print(f"{'PASS' if ok else 'FAIL'} {label}: {seconds:.2f}s (limit {limit}s){detail}")
    assert report["passed"], report
    assert seconds < limit


def timed(name, **opts):
    t0 = time.perf_counter()
    report = run_suite(name, **opts)
    return report, time.perf_counter() - t0


def worst(report, key="residual"):
    return max(r[key] for r in report["rows"])


def test_ac1_chazy():
    report, dt = timed("chazy", tol=1e-8, terms=50)
    assert [tuple(r["tau"]) for r in report["rows"]] == [(0, 1), (0, 2), (0.3, 1.2)]
    check("chazy", report, dt, 1,
          f", max residual {worst(report):.2e} with {report['constant']}"
          f", {report['residual_with_pi2_over_36']:.2e} with pi^2/36")


def test_ac2_quasi_modular_law():
    report, dt = timed("gauto", tol=1e-8)
    check("quasi-modular law", report, dt, 1, f", max residual {worst(report):.2e}")


def test_ac3_whittaker_monodromy():
    report, dt = timed("monodromy", tol=1e-6)
    orders = sorted({r["order"] for r in report["rows"]})
    assert orders == [2, 3] and len(report["rows"]) == 3 + 5 + 1
    check("whittaker monodromy", report, dt, 30, f", max trace residual {worst(report):.2e}")


def test_ac4_lambda_ode():
    report, dt = timed("lambda-ode", tol=1e-6, samples=20, terms=50)
    assert len(report["rows"]) == 20
    r = max(max(row["residual"], row["shift2"], row["scaling"]) for row in report["rows"])
    check("lambda ODE", report, dt, 120,
          f", max residual {r:.2e} (random jets {report['generic_min_residual']:.2e})")


def test_ac5_whittaker_g2_connection():
    report, dt = timed("whittaker-g2", tol=1e-6, samples=20, degree_cap=64)
    assert len(report["rows"]) == 20
    check("whittaker g=2 connection ODE", report, dt, 600,
          f", max residual {worst(report):.2e} (random jets {report['generic_min_residual']:.2e})")


def test_ac6_residue_invariant():
    report, dt = timed("residues-g123", samples=5)
    assert sorted({r["genus"] for r in report["rows"]}) == [1, 2, 3] and len(report["rows"]) == 15
    assert all(isinstance(r["sum"], int) and r["sum"] == 2 * r["genus"] - 2 for r in report["rows"])
    check("residue invariant", report, dt, 10)


def test_ac7_parity():
    report, dt = timed("parity", samples=10)
    assert len(report["rows"]) == 11
    check("parity", report, dt, 1)


def test_ac8_identities():
    report, dt = timed("identities")
    checks = {r["check"].split("(")[0] for r in report["rows"]}
    assert {"mobius", "branch model", "composition", "K", "psi relation 1", "psi relation 2"} <= checks
    check("symbolic identities", report, dt, 10)


def test_ac9_psi_ode():
    report, dt = timed("psi-ode", tol=1e-6, samples=20, terms=50)
    assert len(report["rows"]) == 20
    check("psi ODE", report, dt, 120,
          f", max residual {worst(report):.2e} (random jets {report['generic_min_residual']:.2e})")
