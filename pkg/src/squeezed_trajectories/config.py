"""Run configuration: a flat ``key = value`` text format.

One pair per line; ``#`` starts a comment; blank lines are ignored.  Complex
values are written ``re+imi`` (``0.3+0.4i``, ``-0.2i``, ``1e-3-2.5e-1i``);
plain reals are accepted wherever a complex value is expected.

Keys
----
scheme        single-homodyne | double-homodyne | apriori | riccati-mfd |
              oracle-check | ensemble                         (required)
mu            coupling rate, > 0                              (required)
t_final       final time, > 0                                 (required)
delta, theta  detuning and local-oscillator phase             (default 0)
n1, m1, beta1 field 1 statistics and drive                    (default 0)
n2, m2, beta2 field 2 (double homodyne only)                  (default 0)
alpha0, zeta0, nu0  initial Gaussian state                    (default 0)
dt            step, ``dt * mu <= 0.01``                       (default 1e-3/mu)
seed          unsigned 64-bit integer                         (default 0)
measurement   single | double, for oracle-check and ensemble  (default single)
trajectories  ensemble size                     (ensemble only, required)
fock_dim      Fock truncation                   (oracle-check only, default 30)
oracle_scheme euler | milstein                  (oracle-check only, default euler)
output_path   CSV path                          (default ``<scheme>.csv``)
"""

from __future__ import annotations

import re
from dataclasses import dataclass, replace
from typing import Optional

from .errors import ConfigError, MissingKey, ParseError, UnknownKey
from .gaussian import BATH_TOL, BathSpec, GaussianMoments, ModelParams, physicality_gap

__all__ = ["RunConfig", "SCHEMES", "parse_config", "serialize", "format_complex"]

SCHEMES = (
    "single-homodyne",
    "double-homodyne",
    "apriori",
    "riccati-mfd",
    "oracle-check",
    "ensemble",
)
DEFAULT_FOCK_DIM = 30

_COMMON = {"scheme", "mu", "t_final", "delta", "theta", "n1", "m1", "beta1",
           "alpha0", "zeta0", "nu0", "dt", "seed", "output_path"}
_BATH2 = {"n2", "m2", "beta2"}
_COMPLEX = {"m1", "beta1", "m2", "beta2", "alpha0", "zeta0"}
_INT = {"seed", "trajectories", "fock_dim"}
_TEXT = {"scheme", "measurement", "output_path", "oracle_scheme"}
_LINE = re.compile(r"^\s*([A-Za-z_][A-Za-z0-9_]*)\s*=\s*(.*?)\s*$")
_NUM = r"[+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?"
_CPLX = re.compile(rf"^(?:(?P<re>{_NUM})(?P<im>[+-](?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)?i?"
                   rf"|(?P<pure>{_NUM})i)$")


def _allowed(scheme: str, measurement: str) -> set:
    keys = set(_COMMON)
    if scheme in ("oracle-check", "ensemble"):
        keys.add("measurement")
    if scheme == "double-homodyne" or measurement == "double":
        keys |= _BATH2
    if scheme == "ensemble":
        keys.add("trajectories")
    if scheme == "oracle-check":
        keys |= {"fock_dim", "oracle_scheme"}
    return keys


def _parse_complex(text: str) -> complex:
    t = text.replace(" ", "")
    mt = _CPLX.match(t)
    if not mt:
        raise ValueError(f"not a complex number in re+imi form: {text!r}")
    if mt.group("pure") is not None:
        return complex(0.0, float(mt.group("pure")))
    re_part = float(mt.group("re"))
    if mt.group("im") is not None:
        if not t.endswith("i"):
            raise ValueError(f"imaginary part must end in 'i': {text!r}")
        return complex(re_part, float(mt.group("im")))
    if t.endswith("i"):
        return complex(0.0, re_part)
    return complex(re_part, 0.0)


def format_complex(z: complex) -> str:
    """``re+imi`` with round-trip (``repr``) precision."""
    z = complex(z)
    im = repr(z.imag)
    sign = "" if im.startswith("-") else "+"
    return f"{z.real!r}{sign}{im}i"


@dataclass(frozen=True)
class RunConfig:
    scheme: str
    bath1: BathSpec
    params: ModelParams
    init: GaussianMoments
    t_final: float
    dt: float
    seed: int = 0
    bath2: Optional[BathSpec] = None
    measurement: str = "single"
    trajectories: Optional[int] = None
    fock_dim: Optional[int] = None
    output_path: Optional[str] = None
    oracle_scheme: str = "euler"

    def __post_init__(self):
        if self.scheme not in SCHEMES:
            raise ConfigError(f"unknown scheme {self.scheme!r}; expected one of {', '.join(SCHEMES)}")
        if self.measurement not in ("single", "double"):
            raise ConfigError(f"measurement must be 'single' or 'double', got {self.measurement!r}")
        if self.oracle_scheme not in ("euler", "milstein"):
            raise ConfigError(f"oracle_scheme must be 'euler' or 'milstein', got {self.oracle_scheme!r}")
        if not (self.t_final > 0 and self.dt > 0) or self.dt > self.t_final:
            raise ConfigError(f"need 0 < dt <= t_final, got dt={self.dt!r}, t_final={self.t_final!r}")
        if self.dt * self.params.mu > 0.01 * (1 + 1e-12):
            raise ConfigError(f"dt*mu={self.dt * self.params.mu!r} exceeds the stability guard 0.01")
        if not 0 <= self.seed < 2 ** 64:
            raise ConfigError(f"seed must be an unsigned 64-bit integer, got {self.seed!r}")
        if self.scheme == "ensemble" and (self.trajectories is None or self.trajectories < 1):
            raise ConfigError(f"ensemble needs trajectories >= 1, got {self.trajectories!r}")
        if self.fock_dim is not None and self.fock_dim < 2:
            raise ConfigError(f"fock_dim must be >= 2, got {self.fock_dim!r}")
        if physicality_gap(self.init.zeta, self.init.nu) < -BATH_TOL:
            raise ConfigError(
                f"initial state is not physical: need |zeta0|^2 <= nu0(nu0+1), got "
                f"zeta0={self.init.zeta!r}, nu0={self.init.nu!r}"
            )

    @property
    def is_double(self) -> bool:
        return self.scheme == "double-homodyne" or (
            self.scheme in ("oracle-check", "ensemble") and self.measurement == "double"
        )

    @property
    def field2(self) -> BathSpec:
        return self.bath2 if self.bath2 is not None else BathSpec()

    @property
    def dim(self) -> int:
        return self.fock_dim if self.fock_dim is not None else DEFAULT_FOCK_DIM

    def with_overrides(self, **kw) -> RunConfig:
        """Copy with the non-``None`` entries of ``kw`` replaced (CLI overrides)."""
        return replace(self, **{k: v for k, v in kw.items() if v is not None})


def parse_config(text: str) -> RunConfig:
    """Parse configuration text into a :class:`RunConfig`.

    Raises
    ------
    ParseError
        Malformed line or value, with its line number.
    UnknownKey
        Key not valid for the chosen scheme (or duplicated).
    MissingKey
        ``scheme``, ``mu``, ``t_final`` or a scheme-specific key is absent.
    NonPhysicalBath
        Bath statistics outside ``|m|^2 <= n(n+1)``.
    """
    raw: dict[str, tuple[int, str]] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        body = line.split("#", 1)[0]
        if not body.strip():
            continue
        mt = _LINE.match(body)
        if not mt:
            raise ParseError(lineno, f"expected 'key = value', got {line.strip()!r}")
        key, value = mt.group(1), mt.group(2)
        if not value:
            raise ParseError(lineno, f"empty value for {key!r}")
        if key in raw:
            raise ParseError(lineno, f"duplicate key {key!r} (first on line {raw[key][0]})")
        raw[key] = (lineno, value)

    if "scheme" not in raw:
        raise MissingKey("scheme")
    scheme = raw["scheme"][1]
    if scheme not in SCHEMES:
        raise ParseError(raw["scheme"][0], f"unknown scheme {scheme!r}; expected one of {', '.join(SCHEMES)}")
    measurement = raw.get("measurement", (0, "single"))[1]
    allowed = _allowed(scheme, measurement)
    for key, (lineno, _) in raw.items():
        if key not in allowed:
            raise UnknownKey(key, lineno, scheme)

    vals = {}
    for key, (lineno, value) in raw.items():
        try:
            if key in _TEXT:
                vals[key] = value
            elif key in _INT:
                vals[key] = int(value)
            elif key in _COMPLEX:
                vals[key] = _parse_complex(value)
            else:
                vals[key] = float(value)
        except ValueError as exc:
            raise ParseError(lineno, f"bad value for {key!r}: {exc}") from None

    required = ["mu", "t_final"] + (["trajectories"] if scheme == "ensemble" else [])
    for key in required:
        if key not in vals:
            raise MissingKey(key, scheme)

    params = ModelParams(vals.get("delta", 0.0), vals["mu"], vals.get("theta", 0.0))
    bath1 = BathSpec(vals.get("n1", 0.0), vals.get("m1", 0j), vals.get("beta1", 0j))
    bath2 = None
    if "n2" in allowed:
        bath2 = BathSpec(vals.get("n2", 0.0), vals.get("m2", 0j), vals.get("beta2", 0j))
    init = GaussianMoments(vals.get("alpha0", 0j), vals.get("zeta0", 0j), vals.get("nu0", 0.0))
    return RunConfig(
        scheme=scheme,
        bath1=bath1,
        params=params,
        init=init,
        t_final=vals["t_final"],
        dt=vals.get("dt", 1e-3 / params.mu),
        seed=vals.get("seed", 0),
        bath2=bath2,
        measurement=measurement,
        trajectories=vals.get("trajectories"),
        fock_dim=vals.get("fock_dim"),
        output_path=vals.get("output_path"),
        oracle_scheme=vals.get("oracle_scheme", "euler"),
    )


def serialize(cfg: RunConfig) -> str:
    """Configuration text that parses back to an equal :class:`RunConfig`."""
    lines = [
        f"scheme = {cfg.scheme}",
        f"mu = {cfg.params.mu!r}",
        f"delta = {cfg.params.delta!r}",
        f"theta = {cfg.params.theta!r}",
        f"n1 = {cfg.bath1.n!r}",
        f"m1 = {format_complex(cfg.bath1.m)}",
        f"beta1 = {format_complex(cfg.bath1.beta)}",
    ]
    if cfg.bath2 is not None:
        lines += [
            f"n2 = {cfg.bath2.n!r}",
            f"m2 = {format_complex(cfg.bath2.m)}",
            f"beta2 = {format_complex(cfg.bath2.beta)}",
        ]
    lines += [
        f"alpha0 = {format_complex(cfg.init.alpha)}",
        f"zeta0 = {format_complex(cfg.init.zeta)}",
        f"nu0 = {cfg.init.nu!r}",
        f"t_final = {cfg.t_final!r}",
        f"dt = {cfg.dt!r}",
        f"seed = {cfg.seed}",
    ]
    if cfg.scheme in ("oracle-check", "ensemble"):
        lines.append(f"measurement = {cfg.measurement}")
    if cfg.trajectories is not None:
        lines.append(f"trajectories = {cfg.trajectories}")
    if cfg.scheme == "oracle-check":
        lines.append(f"oracle_scheme = {cfg.oracle_scheme}")
    if cfg.fock_dim is not None:
        lines.append(f"fock_dim = {cfg.fock_dim}")
    if cfg.output_path is not None:
        lines.append(f"output_path = {cfg.output_path}")
    return "\n".join(lines) + "\n"
