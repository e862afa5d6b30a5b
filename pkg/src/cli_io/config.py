"""INI run configuration.

Every key has a default, so an empty file describes the reference
experiment. Values are resolved in the order: built-in default, file, then
the environment variable PCQC_<SECTION>_<KEY>. Unknown sections and keys are
kept as warnings rather than errors.
"""
import configparser
from dataclasses import asdict, dataclass, field, fields, replace
import hashlib
import json
import logging
import math
import os
from pathlib import Path
from typing import Any, Dict, List, Mapping, Optional, Tuple, Union

from field_profiles.models import PhysicalParams
from quantum_core.errors import (
    ConfigError, ConfigMissingKeyError, ConfigRangeError, ConfigTypeError, ModelParameterError,
)

logger = logging.getLogger(__name__)

ENV_PREFIX = 'PCQC_'


def _spec(default: Any, kind: str = 'float', low: Optional[float] = None, high: Optional[float] = None,
          positive: bool = False, choices: Tuple[str, ...] = ()):
    return field(default=default, metadata={'kind': kind, 'low': low, 'high': high,
                                             'positive': positive, 'choices': choices})


@dataclass(frozen=True)
class PhysicalSection:
    lattice_a: float = _spec(2.202e-3, positive=True)
    wavelength: float = _spec(5.9e-3, positive=True)
    omega: Optional[float] = _spec(None, 'optional_float', positive=True)
    dipole_mu10: float = _spec(2e-26, positive=True)
    g0: Optional[float] = _spec(None, 'optional_float', positive=True)
    v_B: float = _spec(767.7, positive=True)
    v_A: float = _spec(987.0, positive=True)


@dataclass(frozen=True)
class CavitySection:
    model: str = _spec('analytic', 'str', choices=('analytic', 'file'))
    width_sigma: float = _spec(2.2, positive=True)
    center: float = _spec(9.0)
    half_span: float = _spec(8.35, positive=True)
    samples_per_a: int = _spec(65, 'int', low=2)
    path: Optional[str] = _spec(None, 'optional_str')


@dataclass(frozen=True)
class WaveguideSection:
    model: str = _spec('analytic', 'str', choices=('analytic', 'file'))
    lobe_period: float = _spec(2.0, positive=True)
    envelope_sigma: float = _spec(5.0, positive=True)
    zone_start: float = _spec(0.0)
    zone_length: float = _spec(18.0, positive=True)
    zone_count: int = _spec(2, 'int', low=1)
    samples_per_a: int = _spec(65, 'int', low=2)
    zone_area: float = _spec(math.pi / 2.0, positive=True)
    peak_rabi: Optional[float] = _spec(None, 'optional_float', positive=True)
    path: Optional[str] = _spec(None, 'optional_str')


@dataclass(frozen=True)
class TeleportSection:
    theta: float = _spec(math.pi / 4.0, low=0.0, high=math.pi)
    phi: float = _spec(-math.pi / 6.0, low=-math.pi, high=math.pi)
    entry_b: float = _spec(0.0)
    handoff_b: float = _spec(18.0)
    entry_a: float = _spec(0.65)
    detector_a: float = _spec(17.35)
    readout_entry_b: float = _spec(43.0)
    target_area_b: float = _spec(9.0 * math.pi / 4.0, positive=True)
    target_area_a: float = _spec(7.0 * math.pi / 4.0, positive=True)
    trace_resolution: float = _spec(44e-9, positive=True)
    injection_time: Optional[float] = _spec(None, 'optional_float', positive=True)
    ideal_two_photon: bool = _spec(False, 'bool')
    outcome: int = _spec(1, 'int', low=0, high=1)


@dataclass(frozen=True)
class ReadoutSection:
    step: float = _spec(44e-9, positive=True)
    omega_m: Optional[float] = _spec(None, 'optional_float', positive=True)
    lab_frame: bool = _spec(False, 'bool')
    sampling: str = _spec('moments', 'str', choices=('moments', 'midpoint'))
    readout_input: str = _spec('ideal', 'str', choices=('ideal', 'teleported'))
    sweep_points: int = _spec(201, 'int', low=2)
    sweep_span: float = _spec(4.0, positive=True)


@dataclass(frozen=True)
class TomographySection:
    deltas: Optional[Tuple[float, ...]] = _spec(None, 'float_list')
    grid_points: int = _spec(25, 'int', low=4)
    search_span: float = _spec(4.0, positive=True)
    max_condition: float = _spec(1e6, positive=True)
    tol: float = _spec(1e-6, positive=True)
    measurements: Optional[str] = _spec(None, 'optional_str')


@dataclass(frozen=True)
class ShotsSection:
    n_per_delta: int = _spec(20000, 'int', low=1)
    seed: int = _spec(20240611, 'int', low=0)
    detector_efficiency: float = _spec(1.0, low=0.0, high=1.0, positive=True)
    emission_loss: float = _spec(0.0, low=0.0, high=0.999999)
    workers: int = _spec(1, 'int', low=1)
    z: float = _spec(1.96, positive=True)


@dataclass(frozen=True)
class OutputSection:
    out_dir: str = _spec('out', 'str')
    write_records: bool = _spec(False, 'bool')


SECTIONS = {
    'physical': PhysicalSection,
    'cavity': CavitySection,
    'waveguide': WaveguideSection,
    'teleport': TeleportSection,
    'readout': ReadoutSection,
    'tomography': TomographySection,
    'shots': ShotsSection,
    'output': OutputSection,
}


@dataclass(frozen=True)
class RunConfig:
    physical: PhysicalSection = field(default_factory=PhysicalSection)
    cavity: CavitySection = field(default_factory=CavitySection)
    waveguide: WaveguideSection = field(default_factory=WaveguideSection)
    teleport: TeleportSection = field(default_factory=TeleportSection)
    readout: ReadoutSection = field(default_factory=ReadoutSection)
    tomography: TomographySection = field(default_factory=TomographySection)
    shots: ShotsSection = field(default_factory=ShotsSection)
    output: OutputSection = field(default_factory=OutputSection)
    source: Optional[str] = None
    warnings: Tuple[str, ...] = ()

    def physical_params(self) -> PhysicalParams:
        try:
            return PhysicalParams(**asdict(self.physical))
        except ModelParameterError as exc:
            raise ConfigRangeError(str(exc), field='physical') from exc

    def canonical(self) -> Dict[str, Any]:
        """Every setting that influences results; the output section does not."""
        return {name: asdict(getattr(self, name)) for name in SECTIONS if name != 'output'}

    def config_hash(self) -> str:
        text = json.dumps(self.canonical(), sort_keys=True, separators=(',', ':'))
        return hashlib.sha256(text.encode('utf-8')).hexdigest()[:12]

    def with_overrides(self, **overrides: Any) -> 'RunConfig':
        """Apply 'section.key' overrides, e.g. {'shots.seed': 7}; None values are skipped."""
        sections = {name: getattr(self, name) for name in SECTIONS}
        for dotted, value in overrides.items():
            if value is None:
                continue
            section, key = dotted.split('.', 1)
            sections[section] = replace(sections[section], **{key: value})
        return replace(self, **sections)


# ---------------------------------------------------------------------------
# Parsing
# ---------------------------------------------------------------------------
_TRUE = {'1', 'true', 'yes', 'on'}
_FALSE = {'0', 'false', 'no', 'off'}


def _line_index(text: str) -> Dict[Tuple[str, str], int]:
    """1-based line of every 'key = value' entry, keyed by (section, key)."""
    index: Dict[Tuple[str, str], int] = {}
    section = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line[0] in '#;':
            continue
        if line.startswith('[') and line.endswith(']'):
            section = line[1:-1].strip().lower()
            index[(section, '')] = lineno
            continue
        for sep in ('=', ':'):
            if sep in line and section is not None:
                index[(section, line.split(sep, 1)[0].strip().lower())] = lineno
                break
    return index


def _convert(raw: str, kind: str, where: str, line: Optional[int]) -> Any:
    text = raw.strip()
    if kind.startswith('optional_') and text.lower() in ('', 'none', 'auto'):
        return None
    try:
        if kind in ('float', 'optional_float'):
            value = float(text)
            if not math.isfinite(value):
                raise ValueError
            return value
        if kind == 'int':
            return int(text)
        if kind == 'bool':
            if text.lower() in _TRUE:
                return True
            if text.lower() in _FALSE:
                return False
            raise ValueError
        if kind == 'float_list':
            if text.lower() in ('', 'none', 'auto'):
                return None
            return tuple(float(part) for part in text.split(',') if part.strip())
        return text
    except ValueError:
        raise ConfigTypeError(f"cannot read {text!r} as {kind.replace('optional_', '')}",
                              field=where, line=line) from None


def _check_range(value: Any, meta: Mapping[str, Any], where: str, line: Optional[int]) -> None:
    if value is None:
        return
    if meta['choices'] and value not in meta['choices']:
        raise ConfigRangeError(f"{value!r} is not one of {', '.join(meta['choices'])}", field=where, line=line)
    values = value if isinstance(value, tuple) else (value,)
    for v in values:
        if isinstance(v, str) or isinstance(v, bool):
            continue
        if meta['positive'] and not v > 0:
            raise ConfigRangeError(f"must be positive, got {v}", field=where, line=line)
        if meta['low'] is not None and v < meta['low']:
            raise ConfigRangeError(f"must be >= {meta['low']}, got {v}", field=where, line=line)
        if meta['high'] is not None and v > meta['high']:
            raise ConfigRangeError(f"must be <= {meta['high']}, got {v}", field=where, line=line)


def _read_section(name: str, cls: type, values: Mapping[str, str], environ: Mapping[str, str],
                  lines: Mapping[Tuple[str, str], int]) -> Any:
    kwargs = {}
    for f in fields(cls):
        where = f"{name}.{f.name}"
        env_key = f"{ENV_PREFIX}{name.upper()}_{f.name.upper()}"
        if env_key in environ:
            raw, line = environ[env_key], None
        elif f.name.lower() in values:
            raw, line = values[f.name.lower()], lines.get((name, f.name.lower()))
        else:
            continue
        value = _convert(raw, f.metadata['kind'], where, line)
        _check_range(value, f.metadata, where, line)
        kwargs[f.name] = value
    return cls(**kwargs)


def _resolve_path(path: Optional[str], base: Optional[Path]) -> Optional[str]:
    if path is None or base is None or os.path.isabs(path):
        return path
    return str(base / path)


def _validate(config: RunConfig, lines: Mapping[Tuple[str, str], int]) -> RunConfig:
    base = Path(config.source).parent if config.source else None
    resolved = {}
    for section in ('cavity', 'waveguide'):
        s = getattr(config, section)
        if s.model == 'file':
            if not s.path:
                raise ConfigMissingKeyError("model = file needs a profile path", field=f"{section}.path",
                                            line=lines.get((section, 'model')))
            path = _resolve_path(s.path, base)
            if not os.path.exists(path):
                raise ConfigRangeError(f"profile file {path} does not exist", field=f"{section}.path",
                                       line=lines.get((section, 'path')))
            resolved[f"{section}.path"] = path
    t = config.tomography
    if t.measurements:
        path = _resolve_path(t.measurements, base)
        if not os.path.exists(path):
            raise ConfigRangeError(f"measurement file {path} does not exist", field='tomography.measurements',
                                   line=lines.get(('tomography', 'measurements')))
        resolved['tomography.measurements'] = path
    if t.deltas is not None and len(set(t.deltas)) < 4:
        raise ConfigRangeError("at least 4 distinct detunings are needed", field='tomography.deltas',
                               line=lines.get(('tomography', 'deltas')))
    config = config.with_overrides(**resolved)
    config.physical_params()
    return config


def parse_config(path: Optional[Union[str, Path]] = None,
                 environ: Optional[Mapping[str, str]] = None) -> RunConfig:
    """Read and validate a run configuration; `path=None` gives the defaults plus environment."""
    environ = os.environ if environ is None else environ
    text = ''
    if path is not None:
        p = Path(path)
        if not p.exists():
            raise ConfigError(f"config file {p} does not exist")
        text = p.read_text(encoding='utf-8')
    parser = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=('#', ';'))
    try:
        parser.read_string(text, source=str(path or '<defaults>'))
    except configparser.Error as exc:
        raise ConfigError(f"unreadable config: {exc}") from exc
    lines = _line_index(text)

    warnings: List[str] = []
    for section in parser.sections():
        if section.lower() not in SECTIONS:
            warnings.append(f"unknown section [{section}] (line {lines.get((section.lower(), ''))})")
            continue
        known = {f.name.lower() for f in fields(SECTIONS[section.lower()])}
        for key in parser[section]:
            if key not in known:
                warnings.append(f"unknown key {section.lower()}.{key} (line {lines.get((section.lower(), key))})")
    for key in environ:
        if key.startswith(ENV_PREFIX):
            parts = key[len(ENV_PREFIX):].lower().split('_', 1)
            if len(parts) != 2 or parts[0] not in SECTIONS or \
                    parts[1] not in {f.name.lower() for f in fields(SECTIONS[parts[0]])}:
                warnings.append(f"unknown environment override {key}")

    sections = {}
    for name, cls in SECTIONS.items():
        values = {k.lower(): v for k, v in parser[name].items()} if parser.has_section(name) else {}
        sections[name] = _read_section(name, cls, values, environ, lines)
    for w in warnings:
        logger.warning("config: %s", w)
    config = RunConfig(**sections, source=str(path) if path is not None else None, warnings=tuple(warnings))
    return _validate(config, lines)
