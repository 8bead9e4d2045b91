"""Declarative optical-bench scenarios.

A scenario is a versioned TOML file: grid, light (wavenumber + Fock
representation), input packet constructor, an ordered element list, and
output requests.  Spatial benches run 2D wavefronts through elements;
shaper benches run a 1D spectral packet through the 8f pulse shaper.
``verify`` evaluates every guard and certificate without executing the
heavy propagation.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Any

import numpy as np
import tomli

from . import systems as sy
from .errors import ScenarioError
from .fields import SpatialField2D, SpectralField1D
from .grids import Grid1D, Grid2D
from .quantum import FockRepr
from .wavepackets import make_gaussian_2d, make_gaussian_spectrum, make_rect_spectrum, superpose

__all__ = ["Scenario", "load_scenario", "default_scenario_text"]

SCHEMA_VERSION = 1


def _need(table: dict, key: str, where: str):
    if key not in table:
        raise ScenarioError(f"{where}: missing required key '{key}'")
    return table[key]


@dataclass(frozen=True)
class ElementSpec:
    kind: str
    params: dict


@dataclass(frozen=True)
class OutputSpec:
    final_field: str | None = None
    input_field: str | None = None
    pupil_field: str | None = None
    density_csv: str | None = None
    slices: int = 0
    slices_stem: str = "volume"
    spectrum_csv: str | None = None
    temporal_csv: str | None = None
    summary: str = "summary.json"
    number_distribution_csv: str | None = None


@dataclass(frozen=True)
class Scenario:
    version: int
    kind: str  # "spatial" | "shaper"
    grid: dict
    light: dict
    input: dict
    elements: tuple[ElementSpec, ...] = ()
    output: OutputSpec = OutputSpec()
    seed: int = 0
    chips: int = 31

    # -- construction helpers -------------------------------------------------

    def build_grid(self) -> Grid2D:
        g = self.grid
        nx = int(_need(g, "nx", "[grid]"))
        ny = int(g.get("ny", nx))
        dx = float(_need(g, "dx", "[grid]"))
        dy = float(g.get("dy", dx))
        if "x0" in g or "y0" in g:
            return Grid2D(nx, ny, dx, dy, float(g.get("x0", 0.0)), float(g.get("y0", 0.0)))
        return Grid2D.centered(nx, ny, dx, dy)

    def build_omega_grid(self) -> Grid1D:
        g = self.grid
        n = int(_need(g, "n_omega", "[grid]"))
        d = float(_need(g, "d_omega", "[grid]"))
        start = float(_need(g, "omega_start", "[grid]"))
        return Grid1D(n, d, start)

    def k0(self) -> float:
        return float(_need(self.light, "k0", "[light]"))

    def build_repr(self) -> FockRepr:
        state = self.light.get("state", "coherent")
        if state == "coherent":
            a = self.light.get("alpha", 1.0)
            if isinstance(a, (list, tuple)):
                a = complex(a[0], a[1])
            return FockRepr.coherent(complex(a))
        if state == "fock":
            return FockRepr.fock(int(self.light.get("n", 1)))
        if state == "generic":
            return FockRepr.generic(np.asarray(self.light.get("coeffs"), dtype=complex))
        raise ScenarioError(f"[light]: unknown state '{state}'")

    def build_spatial_input(self, grid: Grid2D) -> SpatialField2D:
        t = self.input
        kind = t.get("kind", "gaussian")
        if kind == "gaussian":
            return make_gaussian_2d(
                grid,
                float(_need(t, "wx", "[input]")),
                float(t.get("wy", t.get("wx"))),
                cx=float(t.get("cx", 0.0)),
                cy=float(t.get("cy", 0.0)),
                tilt_kx=float(t.get("tilt_kx", 0.0)),
                tilt_ky=float(t.get("tilt_ky", 0.0)),
            )
        if kind == "two_gaussian":
            w = float(_need(t, "wx", "[input]"))
            wy = float(t.get("wy", w))
            sep = float(_need(t, "separation", "[input]"))
            return superpose(
                make_gaussian_2d(grid, w, wy, cx=-sep / 2),
                make_gaussian_2d(grid, w, wy, cx=+sep / 2),
            )
        raise ScenarioError(f"[input]: unknown kind '{kind}'")

    def build_spectral_input(self, grid: Grid1D) -> SpectralField1D:
        t = self.input
        kind = t.get("kind", "rect_spectrum")
        if kind == "rect_spectrum":
            return make_rect_spectrum(
                grid,
                float(_need(t, "omega_lo", "[input]")),
                float(_need(t, "omega_hi", "[input]")),
            )
        if kind == "gaussian_spectrum":
            return make_gaussian_spectrum(
                grid,
                float(_need(t, "center", "[input]")),
                float(_need(t, "width", "[input]")),
            )
        raise ScenarioError(f"[input]: unknown kind '{kind}'")

    def build_shaper_spec(self, rng: np.random.Generator, packet: SpectralField1D):
        if len(self.elements) != 1 or self.elements[0].kind != "pulse_shaper":
            raise ScenarioError("a shaper scenario needs exactly one [[element]] of type 'pulse_shaper'")
        p = self.elements[0].params
        pupil_kind = p.get("pupil", "blazed")
        m = int(p.get("pupil_samples", 512))
        if pupil_kind == "blazed":
            cell = 2.0 * np.pi * np.arange(m) / m
        elif pupil_kind == "binary_pi":
            cell = np.zeros(m)
            cell[m // 2 :] = np.pi
        elif pupil_kind == "sine":
            # carries a DC coefficient J0(amplitude): fails the no-DC gate
            amp = float(p.get("amplitude", 1.0))
            cell = amp * np.cos(2.0 * np.pi * np.arange(m) / m)
        else:
            raise ScenarioError(f"pulse_shaper: unknown pupil '{pupil_kind}'")
        lo, hi = packet.support()
        theta_kind = p.get("theta", "random_chips")
        if theta_kind == "zero":
            theta = lambda w: np.zeros_like(np.asarray(w, dtype=float))
            phases = None
        elif theta_kind == "linear":
            tau = float(p.get("tau", 1.0))
            theta = lambda w: tau * np.asarray(w, dtype=float)
            phases = None
        elif theta_kind == "random_chips":
            phases = 2.0 * np.pi * rng.random(self.chips)
            theta = sy.chip_phase_function(lo, hi, phases)
        else:
            raise ScenarioError(f"pulse_shaper: unknown theta '{theta_kind}'")
        spec = sy.PulseShaperSpec(
            pupil_phi_cell=cell,
            period=float(_need(p, "period", "pulse_shaper")),
            rmax=int(p.get("rmax", 1)),
            f_len=float(_need(p, "f_len", "pulse_shaper")),
            theta=theta,
            c=float(p.get("c", 1.0)),
        )
        return spec, phases


def _parse_elements(raw: Any) -> tuple:
    out = []
    for i, item in enumerate(raw or []):
        if "type" not in item:
            raise ScenarioError(f"[[element]] #{i}: missing 'type'")
        params = dict(item)
        kind = params.pop("type")
        out.append(ElementSpec(kind, params))
    return tuple(out)


def load_scenario(path) -> Scenario:
    path = Path(path)
    try:
        with open(path, "rb") as fh:
            data = tomli.load(fh)
    except FileNotFoundError:
        raise ScenarioError(f"scenario file not found: {path}")
    except tomli.TOMLDecodeError as exc:
        raise ScenarioError(f"{path}: TOML parse error: {exc}")
    version = data.get("version")
    if version != SCHEMA_VERSION:
        raise ScenarioError(f"{path}: unsupported or missing version {version!r}; need {SCHEMA_VERSION}")
    if "grid" not in data or "input" not in data:
        raise ScenarioError(f"{path}: scenario needs [grid] and [input] tables")
    kind = data.get("kind", "spatial")
    if kind not in ("spatial", "shaper"):
        raise ScenarioError(f"{path}: unknown scenario kind '{kind}'")
    out_raw = dict(data.get("output", {}))
    known = set(OutputSpec.__dataclass_fields__)
    unknown = set(out_raw) - known
    if unknown:
        raise ScenarioError(f"{path}: unknown [output] keys {sorted(unknown)}")
    output = OutputSpec(**out_raw)
    paths = [
        p for p in (
            output.final_field, output.input_field, output.pupil_field,
            output.density_csv, output.spectrum_csv,
            output.temporal_csv, output.summary, output.number_distribution_csv,
        ) if p
    ]
    if len(paths) != len(set(paths)):
        raise ScenarioError(f"{path}: output paths must be unique")
    return Scenario(
        version=version,
        kind=kind,
        grid=dict(data["grid"]),
        light=dict(data.get("light", {"k0": 1.0})),
        input=dict(data["input"]),
        elements=_parse_elements(data.get("element")),
        output=output,
        seed=int(data.get("seed", 0)),
        chips=int(data.get("chips", 31)),
    )


def default_scenario_text() -> str:
    """Template scenario with every table documented."""
    return """\
# qfo scenario file (TOML).  kind = "spatial" runs a 2D wavefront through
# the element list; kind = "shaper" runs a 1D spectral packet through the
# 8f pulse shaper.
version = 1
kind = "spatial"
seed = 0            # RNG seed for random phases (recorded in the summary)

[grid]              # spatial benches: centered nx x ny grid
nx = 256
dx = 0.5
# shaper benches use a frequency axis instead:
# n_omega = 256, d_omega = 0.001, omega_start = 0.78

[light]
k0 = 20.0           # single-mode wavenumber (dimensionless units)
state = "coherent"  # coherent | fock | generic
alpha = [1.3, 0.0]  # complex amplitude for coherent
# n = 1             # photon number for fock
# coeffs = [...]    # amplitude list for generic

[input]
kind = "gaussian"   # gaussian | two_gaussian | rect_spectrum | gaussian_spectrum
wx = 2.0
# cx, cy, tilt_kx, tilt_ky, separation, omega_lo, omega_hi, center, width

[[element]]         # ordered optical train
type = "fresnel"    # fresnel | lens | phase_mask | grating | four_f | pulse_shaper
z = 50.0

[[element]]
type = "lens"       # f = "critical" picks the distance where the confocal
f = "critical"      # grid coincides with the input grid

[output]
final_field = "final.qfo"
density_csv = "density.csv"
slices = 0          # n > 0 dumps a propagation volume for fresnel elements
summary = "summary.json"
"""
