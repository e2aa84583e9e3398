"""Acceptance criteria, one test each.

Every test prints a single ``[criterion N] PASS|FAIL ...`` line before
asserting, so ``pytest -v`` shows the verdicts alongside the test names.
"""

import cmath
import math
import subprocess
import sys
import time

import numpy as np
import pytest

from conftest import make_scenario, ris1_grid, ris2_grid, specular
from rispathloss.campaign import read_sweep_csv
from rispathloss.config import resolve_config
from rispathloss.configuration import CodingState, ReflectionMap, focusing_phases, uniform_coding
from rispathloss.engine import (
    Scenario,
    TerminalPlacement,
    closed_form_power,
    metal_plate_received_power,
    pathloss_farfield_beam_refined,
    pathloss_nearfield_broadcast,
    pathloss_nearfield_focus_refined,
    received_power_general_legacy,
    received_power_general_refined,
    sweep_angle,
    sweep_distance,
)
from rispathloss.geometry import Point3, RisGrid, fraunhofer_distance, spherical_to_cartesian
from rispathloss.patterns import exponent_from_gain, gain_from_pattern_integral
from rispathloss.units import db_to_linear, linear_to_db


def verdict(capsys, n, ok, detail):
    with capsys.disabled():
        print(f"\n[criterion {n:2d}] {'PASS' if ok else 'FAIL'}  {detail}")
    assert ok, detail


def db(x):
    return 10.0 * math.log10(x)


def _peaks(table):
    p = table.dbm()
    neg, pos = table.x < 0, table.x > 0
    return float(table.x[neg][np.argmax(p[neg])]), float(table.x[pos][np.argmax(p[pos])])


def test_c01_dual_beam_directions(capsys):
    s1 = resolve_config("ris1").build()
    s2 = resolve_config("ris2").build()
    n1, p1 = _peaks(sweep_angle(s1, -70, 70, 0.5))
    n2, p2 = _peaks(sweep_angle(s2, -70, 70, 0.5))
    ok = abs(n1 + 34) <= 1.5 and abs(p1 - 34) <= 1.5 and abs(n2 + 37) <= 1.5 and abs(p2 - 37) <= 1.5
    verdict(capsys, 1, ok, f"RIS1 peaks {n1:+.1f}/{p1:+.1f} deg, RIS2 peaks {n2:+.1f}/{p2:+.1f} deg")


def test_c02_farfield_closed_form(capsys):
    worst = 0.0
    for grid, gain in ((ris1_grid(), 109.6), (ris2_grid(), 128.8)):
        d = 10.0 * fraunhofer_distance(grid)
        for theta in (0.0, 10.0, 45.0):
            tx, rx = specular(d, 1.2 * d, theta)
            s = make_scenario(grid, focusing_phases(grid, tx, rx, 0.8), tx, rx, gain)
            closed = pathloss_farfield_beam_refined(
                grid, gain, gain, 1.0, d, 1.2 * d, math.radians(theta), math.radians(theta), 0.8
            )
            worst = max(worst, abs(db(received_power_general_refined(s).pl / closed)))
    verdict(capsys, 2, worst <= 0.5, f"max |general - far-field| = {worst:.4f} dB (limit 0.5)")


def test_c03_focusing_identity(capsys):
    grid = ris2_grid()
    worst = 0.0
    for d1 in (0.25, 5.0):
        tx, rx = specular(d1, 1.0, 10.0)
        s = make_scenario(grid, focusing_phases(grid, tx, rx, 0.8), tx, rx, 128.8, cal_db=22.0)
        a = received_power_general_refined(s).pl
        b = pathloss_nearfield_focus_refined(s)
        worst = max(worst, abs(a / b - 1.0))
    verdict(capsys, 3, worst <= 1e-12, f"max relative difference {worst:.2e} (limit 1e-12)")


def test_c04_metal_plate(capsys):
    grid = ris1_grid()
    d1, d2 = 10 * fraunhofer_distance(grid), 13 * fraunhofer_distance(grid)
    plate = metal_plate_received_power(grid, 109.6, 109.6, 1.0, d1, d2, 0.1)
    ff = pathloss_farfield_beam_refined(grid, 109.6, 109.6, 1.0, d1, d2, 0.0, 0.0, 1.0)
    identity = abs((plate.pt / plate.pr) / ff - 1.0)
    tx, rx = Point3(0.0, 0.0, d1), Point3(0.0, 0.0, d2)
    mirror = uniform_coding(grid, CodingState("metal", 1.0, 0.0))
    general = received_power_general_refined(make_scenario(grid, mirror, tx, rx, 109.6)).pr
    gap = abs(db(general / plate.pr))
    ok = identity <= 1e-14 and gap <= 0.5
    verdict(capsys, 4, ok, f"plate vs far-field rel {identity:.1e}; plate vs general {gap:.4f} dB")


def _gap_over_sweep(grid, gain):
    d = fraunhofer_distance(grid)
    tx, rx = specular(10 * d, 10 * d, 10.0)
    s = make_scenario(grid, uniform_coding(grid, CodingState("u", 0.8, 0.0)), tx, rx, gain)
    t = sweep_distance(s, 10 * d, 20 * d, d, models=("refined", "legacy"))
    return t.dbm("legacy") - t.dbm("refined")


def test_c05_legacy_refined_gap(capsys):
    lam = 299792458.0 / 27e9
    ideal = RisGrid(20, 56, lam / 8, lam / 4, 27e9)  # dx dy = lambda^2 / 32
    g1 = _gap_over_sweep(ideal, 109.6)
    g2 = _gap_over_sweep(ris2_grid(), 128.8)
    ok = np.all(np.abs(g1 - 10.08) <= 0.01) and np.all(np.abs(g2 - 2.59) <= 0.05)
    verdict(
        capsys, 5, ok,
        f"RIS1 gap {g1.min():.4f}..{g1.max():.4f} dB (10.08+-0.01), "
        f"RIS2 gap {g2.min():.4f}..{g2.max():.4f} dB (2.59+-0.05)",
    )


def test_c06_gain_exponent_round_trip(capsys):
    worst = max(abs(gain_from_pattern_integral(exponent_from_gain(g)) / g - 1.0) for g in (2.0, 4.0, 109.6, 128.8))
    a1 = exponent_from_gain(db_to_linear(20.4))
    a2 = exponent_from_gain(db_to_linear(21.1))
    pairs = abs(a1 / 53.8 - 1) <= 1e-3 and abs(a2 / 63.4 - 1) <= 1e-3
    ok = worst <= 1e-3 and pairs
    verdict(capsys, 6, ok, f"max gain error {worst:.1e}; 20.4 dB -> {a1:.2f}, 21.1 dB -> {a2:.2f}")


def test_c07_fraunhofer_distances(capsys):
    f1, f2 = fraunhofer_distance(ris1_grid()), fraunhofer_distance(ris2_grid())
    ok = f"{f1:.4g}" == "1.107" and f"{f2:.4g}" == "5.086"
    verdict(capsys, 7, ok, f"RIS1 {f1:.4g} m, RIS2 {f2:.4g} m")


def _random_scenario(rng):
    n, m = (int(v) for v in rng.integers(1, 65, size=2))
    f = rng.uniform(3e9, 40e9)
    lam = 299792458.0 / f
    grid = RisGrid(n, m, lam * rng.uniform(0.1, 0.6), lam * rng.uniform(0.1, 0.6), f)
    gamma = rng.uniform(0, 1, size=(n, m)) * np.exp(1j * rng.uniform(-np.pi, np.pi, size=(n, m)))

    def terminal():
        pos = spherical_to_cartesian(rng.uniform(0.2, 20.0), rng.uniform(0, 1.45), rng.uniform(0, 2 * np.pi))
        return TerminalPlacement.with_gain(pos, float(rng.choice([1.0, 2.0, 10.0, 109.6, 128.8])))

    return Scenario(grid, ReflectionMap(grid, gamma), terminal(), terminal(), 0.1, rng.uniform(0.1, 1.0))


def test_c08_reciprocity(capsys):
    rng = np.random.default_rng(20240601)
    worst = 0.0
    for _ in range(100):
        s = _random_scenario(rng)
        a = received_power_general_refined(s).pl
        b = received_power_general_refined(s.swapped()).pl
        worst = max(worst, 0.0 if a == b else abs(b / a - 1.0))
    verdict(capsys, 8, worst <= 1e-12, f"100 scenarios, max relative PL change {worst:.1e}")


def test_c09_scaling_laws(capsys):
    grid = ris1_grid()
    tx, rx = specular(20.0, 10.0, 10.0)
    s = make_scenario(grid, focusing_phases(grid, tx, rx, 0.9), tx, rx, 109.6)
    pts = np.geomspace(10.0, 100.0, 11)
    pl = -sweep_distance(s, 0, 0, 0, points=pts).dbm()
    slope = float(np.polyfit(np.log10(pts), pl, 1)[0])
    lam = grid.wavelength
    bc = [pathloss_nearfield_broadcast(128.8, 128.8, 1.0, d, 3 * d, lam, 0.8) for d in (0.25, 2.5)]
    bc_slope = db(bc[1] / bc[0])
    ff = [pathloss_farfield_beam_refined(grid, 109.6, 109.6, 1.0, d, 2 * d, 0.2, 0.3, 0.9) for d in (20.0, 40.0)]
    ff_off = db(ff[1] / ff[0])
    bc_off = db(
        pathloss_nearfield_broadcast(128.8, 128.8, 1.0, 0.5, 1.5, lam, 0.8)
        / pathloss_nearfield_broadcast(128.8, 128.8, 1.0, 0.25, 0.75, lam, 0.8)
    )
    ok = (
        abs(slope - 20.0) <= 0.2
        and abs(bc_slope - 20.0) <= 1e-9
        and abs(ff_off - 40 * math.log10(2)) <= 1e-9
        and abs(bc_off - 20 * math.log10(2)) <= 1e-9
    )
    verdict(
        capsys, 9, ok,
        f"general slope {slope:.3f} dB/dec, broadcast slope {bc_slope:.6f} dB/dec, "
        f"doubling {ff_off:.4f} / {bc_off:.4f} dB",
    )


def test_c10_determinism(capsys):
    s = resolve_config("ris2").build()
    big = RisGrid(64, 64, 3.8e-3, 3.8e-3, 33e9)
    rng = np.random.default_rng(7)
    gamma = rng.uniform(0.2, 1.0, size=(64, 64)) * np.exp(1j * rng.uniform(-np.pi, np.pi, size=(64, 64)))
    s_big = Scenario(big, ReflectionMap(big, gamma), s.tx, s.rx, s.pt, s.g_line)
    serial = set()
    for w in (1, 4, 8):
        t = sweep_angle(s, -60, 60, 1.0, models=("refined", "legacy"), workers=w)
        text = ";".join(f"{v:.12f}" for name in t.columns for v in t.dbm(name))
        text += f"|{received_power_general_refined(s_big, workers=w).pr_dbm:.12f}"
        text += f"|{received_power_general_legacy(s_big, workers=w).pr_dbm:.12f}"
        serial.add(text)
    verdict(capsys, 10, len(serial) == 1, f"{len(serial)} distinct serializations across 1/4/8 workers")


def _brute_force_3x3():
    # plain re-derivation with math/cmath only
    c = 299792458.0
    f = 28e9
    lam = c / f
    dx, dy = 0.004, 0.006
    gt, gr = 30.0, 12.0
    pt, g_line = 0.05, 0.7
    tx = (0.31, -0.12, 0.77)
    rx = (-0.45, 0.2, 1.1)
    gamma = [[0.9 * cmath.exp(1j * (0.3 * n - 0.7 * m)) for m in range(3)] for n in range(3)]
    d1 = math.sqrt(sum(v * v for v in tx))
    d2 = math.sqrt(sum(v * v for v in rx))
    acc = 0j
    for n in range(3):
        for m in range(3):
            x = (m - 1) * dx
            y = (n - 1) * dy
            rt = math.sqrt((tx[0] - x) ** 2 + (tx[1] - y) ** 2 + tx[2] ** 2)
            rr = math.sqrt((rx[0] - x) ** 2 + (rx[1] - y) ** 2 + rx[2] ** 2)
            dd = x * x + y * y
            ctx = (d1 * d1 + rt * rt - dd) / (2 * d1 * rt)
            crx = (d2 * d2 + rr * rr - dd) / (2 * d2 * rr)
            F = ctx ** (gt / 2 - 1) * (tx[2] / rt) * (rx[2] / rr) * crx ** (gr / 2 - 1)
            acc += math.sqrt(F) * gamma[n][m] / (rt * rr) * cmath.exp(-2j * math.pi * (rt + rr) / lam)
    pr = pt * gt * gr * g_line * (dx * dy) ** 2 / (16 * math.pi**2) * abs(acc) ** 2
    grid = RisGrid(3, 3, dx, dy, f)
    s = Scenario(
        grid,
        ReflectionMap(grid, np.array(gamma)),
        TerminalPlacement.with_gain(Point3(*tx), gt),
        TerminalPlacement.with_gain(Point3(*rx), gr),
        pt,
        g_line,
    )
    return pr, s


def test_c11_oracle_equivalence(capsys):
    expected, s = _brute_force_3x3()
    got = received_power_general_refined(s).pr
    rel = abs(got / expected - 1.0)
    verdict(capsys, 11, rel <= 1e-9, f"3x3 brute force relative difference {rel:.1e}")


def _cli(*args):
    return subprocess.run([sys.executable, "-m", "rispathloss.cli", *args], capture_output=True, text=True)


def test_c12_cli_end_to_end(capsys, tmp_path):
    t0 = time.perf_counter()
    codes = []
    rmse = []
    for name in ("ris1", "ris2"):
        model = tmp_path / f"{name}.csv"
        codes.append(_cli("sweep", "--config", name, "--kind", "angle", "--start", "-60", "--stop", "60",
                          "--step", "0.5", "--out", str(model)).returncode)
        codes.append(_cli("pathloss", "--config", name, "--model", "all").returncode)
        codes.append(_cli("design", "--config", name, "--out", str(tmp_path / f"{name}_map.csv")).returncode)
        table = read_sweep_csv(model, "angle")
        meas = tmp_path / f"{name}_meas.csv"
        # synthetic measurement: every other model point, 0 dB offset
        rows = [f"{x:.6f},{p:.12f}" for x, p in zip(table.x[::2], table.dbm()[::2])]
        meas.write_text("x,power_dbm\n" + "\n".join(rows) + "\n")
        r = _cli("compare", "--model", str(model), "--measurements", str(meas), "--kind", "angle")
        codes.append(r.returncode)
        rmse.append(r.stdout.split("rmse = ")[1].split()[0] if r.returncode == 0 else "?")
    elapsed = time.perf_counter() - t0
    ok = all(c == 0 for c in codes) and rmse == ["0.00", "0.00"] and elapsed < 10.0
    verdict(capsys, 12, ok, f"exit codes {codes}, rmse {rmse} dB, {elapsed:.2f} s total")
