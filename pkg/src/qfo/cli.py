"""Scenario runner CLI.

    qfo run <file> [--out DIR] [--seed N] [--threads N] [--override-guards]
    qfo verify <file>
    qfo dump-defaults

Exit codes: 0 success, 2 parse/validation error, 3 guard violation,
4 I/O error.  Outputs are byte-deterministic for a given scenario and seed,
independent of the thread count; the summary JSON records the norms,
widths, guard margins and certificates of the run.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import elements as el
from . import systems as sy
from .errors import (
    AliasingGuardError,
    FarFieldError,
    NonUnitaryMapError,
    NyquistError,
    ResolutionError,
    ScenarioError,
    ShaperValidationError,
)
from .fields import SpatialField2D
from .fourier import spectral_to_temporal
from .gridio import write_csv_1d, write_field, write_profile_csv, write_volume
from .quantum import QuantumLightState, apply_unitary, photon_number_distribution
from .scenario import Scenario, default_scenario_text, load_scenario

EXIT_OK = 0
EXIT_PARSE = 2
EXIT_GUARD = 3
EXIT_IO = 4

_GUARD_ERRORS = (
    AliasingGuardError,
    FarFieldError,
    NonUnitaryMapError,
    NyquistError,
    ResolutionError,
    ShaperValidationError,
)


def _f(value, name):
    try:
        return float(value)
    except (TypeError, ValueError):
        raise ScenarioError(f"{name}: expected a number, got {value!r}")


class SpatialBench:
    """Compiled spatial pipeline: element closures plus guard margins."""

    def __init__(self, sc: Scenario, threads: int):
        self.sc = sc
        self.grid = sc.build_grid()
        self.k0 = sc.k0()
        self.threads = max(1, threads)
        self.z_max = el.fresnel_z_limit(self.grid, self.k0)
        self.guards: list[dict] = []
        self.steps = []  # (label, callable, fresnel z or None)
        self.pupils = []  # (label, PhaseMask) for four_f elements
        self._compile()

    def _compile(self):
        grid, k0 = self.grid, self.k0
        for i, spec in enumerate(self.sc.elements):
            label = f"element[{i}]:{spec.kind}"
            p = spec.params
            if spec.kind == "fresnel":
                z = _f(p.get("z"), label)
                self.guards.append(
                    {"guard": "fresnel-aliasing", "element": label, "z": z,
                     "z_max": self.z_max, "margin": self.z_max - abs(z)}
                )
                self.steps.append((label, lambda f, z=z: el.fresnel_propagate(f, z, k0), z))
            elif spec.kind == "lens":
                f_len = self.z_max if p.get("f") == "critical" else _f(p.get("f"), label)
                lens = sy.LensOperator(f_len, k0)
                self.steps.append((label, lambda f, lens=lens: sy.lens_apply(f, lens), None))
            elif spec.kind == "phase_mask":
                kind = p.get("phase", "quadratic")
                if kind == "quadratic":
                    mask = el.lens_phase(grid, _f(p.get("f"), label), k0)
                elif kind == "zero":
                    mask = el.PhaseMask.from_phase(grid, np.zeros((grid.nx, grid.ny)))
                else:
                    raise ScenarioError(f"{label}: unknown phase '{kind}'")
                self.steps.append((label, lambda f, m=mask: el.apply_phase_mask(f, m), None))
            elif spec.kind == "grating":
                m = int(p.get("samples", 2048))
                if p.get("profile", "binary_pi") == "binary_pi":
                    phi = np.zeros(m)
                    phi[m // 2:] = np.pi
                elif p["profile"] == "blazed":
                    phi = 2 * np.pi * np.arange(m) / m
                else:
                    raise ScenarioError(f"{label}: unknown profile '{p['profile']}'")
                gspec = el.grating_coefficients(
                    phi, _f(p.get("period"), label), int(p.get("max_order", 5))
                )
                self.guards.append(
                    {"guard": "grating-truncation", "element": label,
                     "retained_power": gspec.power, "tail": gspec.tail}
                )
                # renormalize the retained orders: the dropped tail is
                # reported above, and the state layer requires unit norm
                self.steps.append(
                    (label, lambda f, g=gspec: el.grating_diffract(f, g).normalized(), None)
                )
            elif spec.kind == "four_f":
                f_len = self.z_max if p.get("f", "critical") == "critical" else _f(p.get("f"), label)
                cgrid = sy.confocal_grid(grid, f_len, k0)
                pk = p.get("pupil", "flat")
                if pk == "flat":
                    phi = np.zeros((cgrid.nx, cgrid.ny))
                elif pk == "ramp":
                    a = _f(p.get("ramp"), label)
                    xx, _ = cgrid.mesh()
                    phi = a * xx
                elif pk == "binary_pi_x":
                    periods = int(p.get("periods", 16))
                    xx, _ = cgrid.mesh()
                    cellsize = cgrid.nx * cgrid.dx / periods
                    phi = np.where(((xx - cgrid.x0) % cellsize) < cellsize / 2, 0.0, np.pi)
                elif pk == "sine_x":
                    # smooth phase grating: diffraction orders decay like
                    # Bessel functions, keeping high orders off the grid edge
                    periods = int(p.get("periods", 16))
                    amp = _f(p.get("amplitude", 1.0), label)
                    xx, _ = cgrid.mesh()
                    phi = amp * np.cos(2 * np.pi * periods * (xx - cgrid.x0) / (cgrid.nx * cgrid.dx))
                else:
                    raise ScenarioError(f"{label}: unknown pupil '{pk}'")
                mask = el.PhaseMask.from_phase(cgrid, phi)
                self.pupils.append((label, mask))
                self.steps.append(
                    (label, lambda f, m=mask, fl=f_len: sy.four_f_apply(f, m, fl, k0), None)
                )
            else:
                raise ScenarioError(f"{label}: unknown element type '{spec.kind}'")

    def run(self, out_dir: Path, summary: dict):
        sc = self.sc
        packet = sc.build_spatial_input(self.grid)
        state = QuantumLightState(sc.build_repr(), packet)
        dist_before = photon_number_distribution(state.repr)
        summary["input"] = {
            "norm_sq": packet.norm_sq,
            "rms_width": packet.rms_width(),
            "mean_photon_number": state.repr.mean_photon_number(),
        }
        volumes = []  # (label, field entering the displacement, z span)
        for label, step, z in self.steps:
            if z is not None and sc.output.slices > 0:
                volumes.append((label, state.packet, z))
            state = apply_unitary(state, step)
        final = state.packet
        summary["output"] = {
            "norm_sq": final.norm_sq,
            "rms_width": final.rms_width(),
            "centroid": final.centroid(),
        }
        dist_after = photon_number_distribution(state.repr)
        summary["statistics_invariant"] = bool(
            np.array_equal(dist_before.probabilities, dist_after.probabilities)
        )
        out = sc.output
        if out.input_field:
            write_field(out_dir / out.input_field, packet)
        if out.pupil_field and self.pupils:
            label, mask = self.pupils[0]
            write_field(out_dir / out.pupil_field, SpatialField2D(mask.grid, mask.factor))
        if out.final_field:
            write_field(out_dir / out.final_field, final)
        if out.density_csv:
            dens = np.abs(final.values) ** 2
            prof = dens.sum(axis=1) * final.grid.dy
            write_csv_1d(out_dir / out.density_csv, "x", final.grid.x, prof.astype(complex))
        if out.number_distribution_csv:
            d = photon_number_distribution(state.repr)
            write_csv_1d(
                out_dir / out.number_distribution_csv, "n",
                np.arange(d.probabilities.size), d.probabilities.astype(complex),
            )
        vol_reports = []
        for vi, (label, start_field, z) in enumerate(volumes):
            zs = np.linspace(0.0, z, out.slices)
            slices = self._propagation_volume(start_field, zs)
            stem = f"{out.slices_stem}_{vi:02d}"
            write_volume(out_dir, stem, slices)
            vol_reports.append({"element": label, "stem": stem, "slices": len(slices)})
        if vol_reports:
            summary["volumes"] = vol_reports
        return summary

    def _propagation_volume(self, field: SpatialField2D, zs) -> list:
        def one(z):
            return (float(z), el.fresnel_propagate(field, float(z), self.k0))

        if self.threads > 1:
            from concurrent.futures import ThreadPoolExecutor

            with ThreadPoolExecutor(max_workers=self.threads) as pool:
                return list(pool.map(one, zs))
        return [one(z) for z in zs]

    def check_guards(self):
        """Raise the first violated guard (verify path and run preflight)."""
        for g in self.guards:
            if g["guard"] == "fresnel-aliasing" and g["margin"] < 0:
                raise AliasingGuardError(g["z"], g["z_max"])


class ShaperBench:
    def __init__(self, sc: Scenario, threads: int, rng: np.random.Generator):
        self.sc = sc
        self.threads = max(1, threads)
        self.grid = sc.build_omega_grid()
        self.packet = sc.build_spectral_input(self.grid)
        self.spec, self.phases = sc.build_shaper_spec(rng, self.packet)
        self.cert = sy.validate_shaper(self.spec, self.packet)

    def run(self, out_dir: Path, summary: dict):
        sc = self.sc
        state = QuantumLightState(sc.build_repr(), self.packet)
        dist_before = photon_number_distribution(state.repr)
        summary["shaper_certificate"] = self.cert.summary()
        if self.phases is not None:
            summary["chip_phases"] = [float(p) for p in self.phases]
        sim = sy.pulse_shaper_simulate(
            self.packet, self.spec, chips=sc.chips, workers=self.threads
        )
        closed = sy.pulse_shaper_apply(self.packet, self.spec)
        centers = sim.chip_centers
        expect = np.exp(1j * centers * 8 * self.spec.f_len / self.spec.c) * np.exp(
            -1j * self.spec.theta(centers)
        )
        two_path = float(
            np.linalg.norm(sim.chip_gains - expect) / np.linalg.norm(expect)
        )
        summary["two_path_rel_l2"] = two_path
        summary["off_center_residual"] = sim.max_off_center_residual
        summary["input"] = {"norm_sq": self.packet.norm_sq,
                            "support": list(self.packet.support())}
        summary["output"] = {"norm_sq": sim.output.norm_sq}
        dist_after = photon_number_distribution(state.repr)
        summary["statistics_invariant"] = bool(
            np.array_equal(dist_before.probabilities, dist_after.probabilities)
        )
        out = sc.output
        if out.spectrum_csv:
            write_profile_csv(out_dir / out.spectrum_csv, sim.output)
        if out.temporal_csv:
            write_profile_csv(out_dir / out.temporal_csv, spectral_to_temporal(sim.output))
        if out.final_field:
            write_profile_csv(out_dir / out.final_field, closed)
        return summary

    def check_guards(self):
        if not self.cert.passed:
            raise ShaperValidationError(
                f"deterministic separation violated: {self.cert.summary()}"
            )


def _build_bench(sc: Scenario, threads: int, seed: int):
    rng = np.random.default_rng(seed)
    if sc.kind == "shaper":
        return ShaperBench(sc, threads, rng)
    return SpatialBench(sc, threads)


def cmd_run(args) -> int:
    try:
        sc = load_scenario(args.scenario)
    except ScenarioError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    seed = sc.seed if args.seed is None else args.seed
    # no thread count or timing in the summary: outputs must be byte-identical
    # for a given scenario and seed regardless of parallelism
    summary: dict = {
        "scenario": str(args.scenario),
        "schema_version": sc.version,
        "kind": sc.kind,
        "seed": int(seed),
        "guards_overridden": bool(args.override_guards),
    }
    try:
        bench = _build_bench(sc, args.threads, seed)
        if not args.override_guards:
            bench.check_guards()
        summary["guards"] = getattr(bench, "guards", [])
        if isinstance(bench, SpatialBench):
            summary["fresnel_z_max"] = bench.z_max
        out_dir = Path(args.out)
        out_dir.mkdir(parents=True, exist_ok=True)
        bench.run(out_dir, summary)
    except _GUARD_ERRORS as exc:
        print(f"guard violation: {exc}", file=sys.stderr)
        return EXIT_GUARD
    except ScenarioError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO
    try:
        with open(out_dir / sc.output.summary, "w") as fh:
            json.dump(summary, fh, indent=2, sort_keys=True)
            fh.write("\n")
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO
    print(f"ok: wrote {out_dir / sc.output.summary}")
    return EXIT_OK


def cmd_verify(args) -> int:
    try:
        sc = load_scenario(args.scenario)
    except ScenarioError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    report: dict = {"scenario": str(args.scenario), "kind": sc.kind}
    try:
        bench = _build_bench(sc, 1, sc.seed)
        if isinstance(bench, ShaperBench):
            report["shaper_certificate"] = bench.cert.summary()
        else:
            report["fresnel_z_max"] = bench.z_max
            report["guards"] = bench.guards
        bench.check_guards()
    except _GUARD_ERRORS as exc:
        print(json.dumps(report, indent=2, sort_keys=True))
        print(f"guard violation: {exc}", file=sys.stderr)
        return EXIT_GUARD
    except ScenarioError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    print(json.dumps(report, indent=2, sort_keys=True))
    print("all guards and certificates pass")
    return EXIT_OK


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="qfo", description="quantum Fourier optics scenario runner"
    )
    sub = parser.add_subparsers(dest="command", required=True)
    run_p = sub.add_parser("run", help="execute a scenario and write artifacts")
    run_p.add_argument("scenario")
    run_p.add_argument("--out", default=".", help="output directory")
    run_p.add_argument("--seed", type=int, default=None, help="override the scenario seed")
    run_p.add_argument("--threads", type=int, default=1)
    run_p.add_argument("--override-guards", action="store_true")
    run_p.set_defaults(func=cmd_run)
    ver_p = sub.add_parser("verify", help="run guards and certificates only")
    ver_p.add_argument("scenario")
    ver_p.set_defaults(func=cmd_verify)
    dump_p = sub.add_parser("dump-defaults", help="print a template scenario")
    dump_p.set_defaults(func=lambda a: (print(default_scenario_text(), end=""), EXIT_OK)[1])
    args = parser.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
