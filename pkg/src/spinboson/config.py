"""YAML scenario configs with strict schema checks and line-numbered errors.

Example::

    system:
      n_qubits: 2
      coupling:
        linear: [[0.2, 0.1]]        # K x N; or polynomial / fully_connected / sectorized
    bath:
      omega: [1.0]
      temperature: 0.5
    run:
      times: {start: 0.0, stop: 10.0, points: 101}
      initial_state: ghz
    output:
      directory: out
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np
import yaml

from .errors import SpinBosonError, ValidationError
from .linear import fully_connected_coupling, sectorized_coupling
from .model import BathSpec, LinearCoupling, PolynomialCoupling, SystemSpec, basis_index
from .spectral import Ohmic, Tabulated, discretize


class ConfigError(SpinBosonError):
    """Malformed or inconsistent scenario config."""

    def __init__(self, message, line: Optional[int] = None, source: str = "<config>"):
        where = f"{source}:{line}: " if line is not None else f"{source}: "
        super().__init__(where + message)
        self.line = line


SCHEMA = {
    "system": {
        "n_qubits": None,
        "coupling": {"linear": None, "polynomial": None, "fully_connected": None,
                     "sectorized": None, "from_spectral": None},
        "hs_energies": None,
    },
    "bath": {
        "omega": None, "temperature": None, "nbar": None, "squeezing": None,
        "covariance": None, "first_moments": None,
        "spectral": {"family": None, "eta": None, "s": None, "omega_c": None,
                     "table": None, "modes": None, "scheme": None, "omega_max": None},
    },
    "run": {
        "times": {"start": None, "stop": None, "points": None},
        "initial_state": None, "elements": None, "cutoff": None, "tolerance": None,
        "convergence": None,
    },
    "output": {"directory": None, "observables": None},
}

OBSERVABLES = ("purity", "elements", "sectors")


# --- YAML with line numbers ------------------------------------------------------

def _to_python(node, lines, path, schema, source):
    """Convert a composed YAML node, checking mapping keys against ``schema``."""
    line = node.start_mark.line + 1
    lines[path] = line
    if isinstance(node, yaml.MappingNode) and isinstance(schema, dict):
        out = {}
        for key_node, value_node in node.value:
            key = key_node.value
            if key not in schema:
                where = ".".join(path + (key,))
                raise ConfigError(f"unknown key '{where}'", key_node.start_mark.line + 1,
                                  source)
            if key in out:
                raise ConfigError(f"duplicate key '{key}'", key_node.start_mark.line + 1,
                                  source)
            out[key] = _to_python(value_node, lines, path + (key,), schema[key], source)
        return out
    if isinstance(schema, dict):
        raise ConfigError(f"'{'.'.join(path)}' must be a mapping", line, source)
    # free-form value: let PyYAML construct it
    return yaml.SafeLoader(yaml.serialize(node)).get_single_data()


def load_yaml(text: str, source: str = "<config>"):
    try:
        node = yaml.compose(text, Loader=yaml.SafeLoader)
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        raise ConfigError(f"YAML syntax error: {exc}", mark.line + 1 if mark else None,
                          source) from None
    if node is None:
        raise ConfigError("empty config", 1, source)
    if not isinstance(node, yaml.MappingNode):
        raise ConfigError("top level must be a mapping", node.start_mark.line + 1, source)
    lines = {}
    data = _to_python(node, lines, (), SCHEMA, source)
    return data, lines


# --- scenario ----------------------------------------------------------------------

@dataclass
class Scenario:
    """Parsed config: the physical spec plus run and output settings."""

    spec: Optional[SystemSpec]
    times: np.ndarray
    rho0: Optional[np.ndarray]
    elements: list
    observables: tuple
    output_dir: Optional[Path]
    cutoff: Optional[int]
    tolerance: Optional[float]
    convergence: list
    spectral: Optional[object] = None
    temperature: Optional[float] = None
    raw: dict = field(default_factory=dict)


class _Ctx:
    def __init__(self, lines, source, base):
        self.lines, self.source, self.base = lines, source, base

    def fail(self, path, message):
        raise ConfigError(message, self.lines.get(tuple(path.split("."))), self.source)

    def number(self, value, path, integer=False, positive=False, nonneg=False):
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            self.fail(path, f"'{path}' must be a number")
        if integer and int(value) != value:
            self.fail(path, f"'{path}' must be an integer")
        if positive and not value > 0:
            self.fail(path, f"'{path}' must be positive")
        if nonneg and not value >= 0:
            self.fail(path, f"'{path}' must be non-negative")
        return int(value) if integer else float(value)

    def array(self, value, path, ndim=None):
        try:
            arr = np.array(value, dtype=float)
        except (TypeError, ValueError):
            self.fail(path, f"'{path}' must be numeric")
        if ndim is not None and arr.ndim != ndim:
            self.fail(path, f"'{path}' must be {ndim}-dimensional")
        return arr

    def resolve(self, p):
        p = Path(p)
        return p if p.is_absolute() else self.base / p


def _spectral_density(cfg, ctx):
    fam = cfg.get("family", "ohmic")
    if fam == "ohmic":
        for key in ("table",):
            if key in cfg:
                ctx.fail(f"bath.spectral.{key}", "'table' only applies to family 'tabulated'")
        try:
            return Ohmic(ctx.number(cfg.get("eta", 0.1), "bath.spectral.eta"),
                         ctx.number(cfg.get("s", 1.0), "bath.spectral.s"),
                         ctx.number(cfg.get("omega_c", 1.0), "bath.spectral.omega_c"))
        except ValidationError as exc:
            ctx.fail("bath.spectral", str(exc))
    if fam == "tabulated":
        if "table" not in cfg:
            ctx.fail("bath.spectral", "tabulated family needs 'table'")
        try:
            return Tabulated.from_file(ctx.resolve(cfg["table"]))
        except (OSError, ValueError) as exc:
            ctx.fail("bath.spectral.table", f"cannot read table: {exc}")
    ctx.fail("bath.spectral.family", f"unknown spectral family {fam!r}")


def _coupling(cfg, n, spectral_modes, ctx):
    if not isinstance(cfg, dict) or len(cfg) != 1:
        ctx.fail("system.coupling", "coupling needs exactly one of "
                 "linear / polynomial / fully_connected / sectorized / from_spectral")
    (kind, value), = cfg.items()
    path = f"system.coupling.{kind}"
    try:
        if kind == "linear":
            return LinearCoupling(ctx.array(value, path, ndim=2))
        if kind == "polynomial":
            if not isinstance(value, list):
                ctx.fail(path, "polynomial coupling must be a list of modes")
            modes = []
            for mode in value:
                terms = []
                for term in mode or []:
                    if not isinstance(term, dict) or set(term) - {"coefficient", "support"}:
                        ctx.fail(path, "monomials need keys 'coefficient' and 'support'")
                    terms.append((float(term["coefficient"]),
                                  tuple(int(i) for i in term.get("support", []))))
                modes.append(terms)
            return PolynomialCoupling(modes, n_qubits=n)
        if kind == "fully_connected":
            return fully_connected_coupling(ctx.array(value, path, ndim=1), n)
        if kind == "sectorized":
            return sectorized_coupling(ctx.array(value, path, ndim=1), n)
        if kind == "from_spectral":
            if spectral_modes is None:
                ctx.fail(path, "from_spectral needs bath.spectral")
            lam = spectral_modes[1]
            if value == "fully_connected":
                return fully_connected_coupling(lam, n)
            if value == "sectorized":
                return sectorized_coupling(lam, n)
            ctx.fail(path, "from_spectral must be 'fully_connected' or 'sectorized'")
    except ValidationError as exc:
        ctx.fail(path, str(exc))
    ctx.fail("system.coupling", f"unknown coupling kind {kind!r}")


def _bath(cfg, coupling, spectral_modes, ctx):
    T = cfg.get("temperature")
    if T is not None:
        T = ctx.number(T, "bath.temperature", nonneg=True)
    if spectral_modes is not None:
        if "omega" in cfg:
            ctx.fail("bath.omega", "give either omega or spectral, not both")
        omega = spectral_modes[0]
    elif "omega" in cfg:
        omega = ctx.array(cfg["omega"], "bath.omega", ndim=1)
    else:
        ctx.fail("bath", "bath needs 'omega' or 'spectral'")
    K = coupling.n_modes
    if omega.size != K and K % omega.size == 0:
        omega = np.tile(omega, K // omega.size)  # sectorized copies
    try:
        if "covariance" in cfg:
            for key in ("nbar", "squeezing"):
                if key in cfg:
                    ctx.fail(f"bath.{key}", f"'{key}' conflicts with 'covariance'")
            cov = ctx.array(cfg["covariance"], "bath.covariance", ndim=2)
            means = cfg.get("first_moments")
            if means is not None:
                means = ctx.array(means, "bath.first_moments", ndim=1)
            return BathSpec(omega=omega, temperature=T, covariance=cov, first_moments=means)
        if "first_moments" in cfg:
            ctx.fail("bath.first_moments", "first moments need an explicit covariance")
        nbar = cfg.get("nbar")
        if nbar is None and T is None:
            ctx.fail("bath", "bath needs 'temperature' or 'nbar'")
        z = cfg.get("squeezing")
        return BathSpec(omega=omega, temperature=T,
                        nbar=None if nbar is None else ctx.array(nbar, "bath.nbar"),
                        squeezing=None if z is None else ctx.array(z, "bath.squeezing"))
    except ValidationError as exc:
        ctx.fail("bath", str(exc))


def initial_state(name, n_qubits: int, ctx=None) -> np.ndarray:
    """Named initial qubit states: ``ghz``, ``plus_product``, ``basis:<i>``, ``file:<path>``,
    or a ``{real: ..., imag: ...}`` matrix."""
    D = 2**n_qubits

    def fail(msg):
        if ctx is None:
            raise ValidationError(msg)
        ctx.fail("run.initial_state", msg)

    if isinstance(name, dict):
        if set(name) - {"real", "imag"} or "real" not in name:
            fail("explicit initial state needs 'real' (and optionally 'imag')")
        rho = np.array(name["real"], dtype=complex)
        if "imag" in name:
            rho = rho + 1j * np.array(name["imag"], dtype=float)
    elif name == "ghz":
        psi = np.zeros(D, dtype=complex)
        psi[0] = psi[-1] = 1 / np.sqrt(2)
        rho = np.outer(psi, psi.conj())
    elif name == "plus_product":
        rho = np.full((D, D), 1.0 / D, dtype=complex)
    elif isinstance(name, str) and name.startswith("basis:"):
        try:
            i = int(name.split(":", 1)[1])
        except ValueError:
            fail(f"bad basis index in {name!r}")
        if not 0 <= i < D:
            fail(f"basis index {i} out of range for N={n_qubits}")
        rho = np.zeros((D, D), dtype=complex)
        rho[i, i] = 1.0
    elif isinstance(name, str) and name.startswith("file:"):
        path = name.split(":", 1)[1]
        path = ctx.resolve(path) if ctx is not None else Path(path)
        try:
            rho = np.load(path) if str(path).endswith(".npy") else np.loadtxt(path, dtype=complex)
        except (OSError, ValueError) as exc:
            fail(f"cannot read initial state: {exc}")
        rho = np.atleast_2d(np.asarray(rho, dtype=complex))
    else:
        fail(f"unknown initial state {name!r}")
    if rho.shape != (D, D):
        fail(f"initial state must be {D}x{D}, got {rho.shape}")
    return rho


def parse_config(text: str, source: str = "<config>", base_dir=None) -> Scenario:
    """Parse and validate a YAML scenario."""
    data, lines = load_yaml(text, source)
    ctx = _Ctx(lines, source, Path(base_dir) if base_dir else Path.cwd())
    system = data.get("system")
    bath_cfg = data.get("bath")
    run = data.get("run", {})
    out = data.get("output", {})
    if bath_cfg is None:
        ctx.fail("bath", "missing 'bath' block")

    spectral = None
    spectral_modes = None
    T = bath_cfg.get("temperature")
    if "spectral" in bath_cfg:
        scfg = bath_cfg["spectral"]
        spectral = _spectral_density(scfg, ctx)
        if "modes" in scfg:
            K = ctx.number(scfg["modes"], "bath.spectral.modes", integer=True, positive=True)
            scheme = scfg.get("scheme", "linear")
            wmax = scfg.get("omega_max")
            try:
                spectral_modes = discretize(spectral, K, scheme, omega_max=wmax)
            except ValidationError as exc:
                ctx.fail("bath.spectral", str(exc))

    spec = None
    if system is not None:
        if "n_qubits" not in system:
            ctx.fail("system", "missing 'system.n_qubits'")
        n = ctx.number(system["n_qubits"], "system.n_qubits", integer=True, positive=True)
        if "coupling" not in system:
            ctx.fail("system", "missing 'system.coupling'")
        coupling = _coupling(system["coupling"], n, spectral_modes, ctx)
        if spectral is not None and spectral_modes is None:
            ctx.fail("bath.spectral", "finite-mode runs need 'bath.spectral.modes'")
        bath = _bath(bath_cfg, coupling, spectral_modes, ctx)
        energies = system.get("hs_energies")
        try:
            spec = SystemSpec(n, coupling, bath, None if energies is None else
                              ctx.array(energies, "system.hs_energies", ndim=1))
            spec.energies
        except ValidationError as exc:
            ctx.fail("system", str(exc))

    times_cfg = run.get("times", {"start": 0.0, "stop": 0.0, "points": 1})
    start = ctx.number(times_cfg.get("start", 0.0), "run.times.start")
    stop = ctx.number(times_cfg.get("stop", start), "run.times.stop")
    points = ctx.number(times_cfg.get("points", 1), "run.times.points", integer=True,
                        positive=True)
    times = np.linspace(start, stop, points)

    rho0 = None
    elements = []
    if spec is not None:
        rho0 = initial_state(run.get("initial_state", "plus_product"), spec.n_qubits, ctx)
        D = spec.dim
        raw_el = run.get("elements", [[0, D - 1]])
        for pair in raw_el:
            if not (isinstance(pair, list) and len(pair) == 2):
                ctx.fail("run.elements", "elements are [row, column] pairs")
            a, b = pair
            if isinstance(a, list):
                a, b = basis_index(a), basis_index(b)
            if not (0 <= a < D and 0 <= b < D):
                ctx.fail("run.elements", f"element ({a}, {b}) out of range for dimension {D}")
            elements.append((int(a), int(b)))

    observables = tuple(out.get("observables", OBSERVABLES))
    for o in observables:
        if o not in OBSERVABLES:
            ctx.fail("output.observables", f"unknown observable {o!r}")
    cutoff = run.get("cutoff")
    if cutoff is not None:
        cutoff = ctx.number(cutoff, "run.cutoff", integer=True, positive=True)
    tol = run.get("tolerance")
    if tol is not None:
        tol = ctx.number(tol, "run.tolerance", positive=True)
    conv = [ctx.number(k, "run.convergence", integer=True, positive=True)
            for k in run.get("convergence", [])]
    directory = out.get("directory")
    return Scenario(spec=spec, times=times, rho0=rho0, elements=elements,
                    observables=observables,
                    output_dir=None if directory is None else ctx.resolve(directory),
                    cutoff=cutoff, tolerance=tol, convergence=conv, spectral=spectral,
                    temperature=None if T is None else float(T), raw=data)


def load_config(path) -> Scenario:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}", source=str(path)) from None
    return parse_config(text, source=str(path), base_dir=path.parent)

