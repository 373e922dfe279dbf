"""
Experiment settings: defaults merged with an optional config file and
command-line ``key=value`` overrides, then turned into an ExperimentSpec.

Config files are flat ``key = value`` lines (``#`` starts a comment); nested
tables are addressed with dotted keys such as ``pathloss_exponents.tx_user``.
A file ending in ``.json`` is read as a JSON object instead.
"""

import copy
import json
import math
from pathlib import Path
from typing import Any, Dict, Iterable, Optional, Union

from experiments.spec import ExperimentKind, ExperimentSpec, ScenarioConfig
from optim.apg import SolverOptions
from scenario.geometry import GeometryConfig, LinkBudget
from system.errors import ConfigurationError, InvalidInputError
from utils.logging import debug_print, info_print

DEFAULTS: Dict[str, Any] = {
    # Scenario
    'n': 4,
    'm': 100,
    'group_sizes': [3, 3, 3],
    'pt_dbm': 30.0,
    # Solver
    'tau': 50.0,
    'tol': 1e-5,
    'max_iters': 1000,
    'armijo_c': 1e-4,
    'shrink': 0.5,
    'alpha_init_f': 1e3,
    'alpha_init_theta': 1e3,
    'optimize_theta': True,
    # Channel model
    'noise_psd_dbm_hz': -174.0,
    'bandwidth_hz': 1e7,
    'carrier_hz': 2e9,
    'tx_center': [0.0, 20.0, 10.0],
    'irs_center': [30.0, 0.0, 5.0],
    'user_area_center': [350.0, 50.0, 2.0],
    'user_area_radius': 20.0,
    'element_spacing': None,       # half a wavelength
    'min_user_separation': None,   # two wavelengths
    'pathloss_intercepts_db': {'tx_irs': 35.6, 'irs_user': 35.6, 'tx_user': 32.6},
    'pathloss_exponents': {'tx_irs': 2.2, 'irs_user': 2.2, 'tx_user': 3.67},
    'rician_k_db': {'tx_irs': 10.0, 'irs_user': 10.0, 'tx_user': -math.inf},
    # Experiment
    'sweep_values': None,          # per-kind default grid
    'num_realizations': 20,
    'seed': 0,
    'parallel': 1,
    'warmup': True,
}


def parse_value(text: str) -> Any:
    """JSON first, then float (accepts inf/nan spellings), else the bare string"""
    text = text.strip()
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        pass
    try:
        return float(text)
    except ValueError:
        return text


def parse_flat_config(lines: Iterable[str], source: str = "<config>") -> Dict[str, Any]:
    entries: Dict[str, Any] = {}
    for lineno, raw in enumerate(lines, start=1):
        line = raw.split('#', 1)[0].strip()
        if not line:
            continue
        if '=' not in line:
            raise ConfigurationError(f"{source}:{lineno}: expected 'key = value', got {raw.strip()!r}")
        key, value = line.split('=', 1)
        key = key.strip()
        if not key:
            raise ConfigurationError(f"{source}:{lineno}: empty key")
        entries[key] = parse_value(value)
    return entries


def format_value(value: Any) -> str:
    """Inverse of parse_value; non-finite floats become JSON Infinity/NaN"""
    return json.dumps(value, sort_keys=True)


class ExperimentSettings:
    """Layered settings: defaults, then a config file, then overrides"""

    def __init__(self, config_path: Optional[Union[str, Path]] = None):
        self.defaults = copy.deepcopy(DEFAULTS)
        self.config_path = Path(config_path) if config_path is not None else None
        self._settings = self._load_settings()

    def _load_settings(self) -> Dict[str, Any]:
        settings = copy.deepcopy(self.defaults)
        if self.config_path is None:
            return settings
        try:
            text = self.config_path.read_text()
        except OSError as e:
            raise ConfigurationError(f"cannot read config file {self.config_path}: {e}") from e

        if self.config_path.suffix == '.json':
            try:
                entries = json.loads(text)
            except json.JSONDecodeError as e:
                raise ConfigurationError(f"invalid JSON in {self.config_path}: {e}") from e
            if not isinstance(entries, dict):
                raise ConfigurationError(f"{self.config_path} must hold a JSON object")
        else:
            entries = parse_flat_config(text.splitlines(), str(self.config_path))

        for key, value in entries.items():
            self._assign(settings, key, value)
        debug_print(f"Loaded {len(entries)} settings from {self.config_path}")
        return settings

    def _assign(self, settings: Dict[str, Any], key: str, value: Any):
        head, _, tail = key.partition('.')
        if head not in self.defaults:
            raise ConfigurationError(f"unknown setting '{head}'")
        if not tail:
            if isinstance(self.defaults[head], dict):
                if not isinstance(value, dict):
                    raise ConfigurationError(f"setting '{head}' expects a table")
                merged = dict(settings[head])
                for sub_key, sub_value in value.items():
                    self._assign_nested(head, merged, sub_key, sub_value)
                settings[head] = merged
            else:
                settings[head] = value
            return
        if not isinstance(self.defaults[head], dict):
            raise ConfigurationError(f"setting '{head}' has no sub-keys")
        merged = dict(settings[head])
        self._assign_nested(head, merged, tail, value)
        settings[head] = merged

    def _assign_nested(self, head: str, table: Dict[str, Any], key: str, value: Any):
        if key not in self.defaults[head]:
            raise ConfigurationError(f"unknown setting '{head}.{key}'")
        try:
            table[key] = float(value)
        except (TypeError, ValueError) as e:
            raise ConfigurationError(f"setting '{head}.{key}' must be a number, got {value!r}") from e

    def get(self, key: str, default: Any = None) -> Any:
        return self._settings.get(key, default)

    def set(self, key: str, value: Any):
        self._assign(self._settings, key, value)

    def get_all(self) -> Dict[str, Any]:
        return copy.deepcopy(self._settings)

    def update(self, settings: Dict[str, Any]):
        """Update multiple settings at once"""
        for key, value in settings.items():
            self.set(key, value)

    def apply_overrides(self, overrides: Iterable[str]):
        """Apply ``key=value`` strings as given on the command line"""
        for item in overrides:
            if '=' not in item:
                raise ConfigurationError(f"override must look like key=value, got {item!r}")
            key, value = item.split('=', 1)
            self.set(key.strip(), parse_value(value))
            debug_print(f"Override {key.strip()} = {value.strip()}")

    def reset_to_defaults(self):
        self._settings = copy.deepcopy(self.defaults)

    def format_flat(self) -> str:
        """Settings as ``key = value`` lines, sorted by key"""
        return "".join(f"{key} = {format_value(self._settings[key])}\n"
                       for key in sorted(self._settings))

    def save(self, path: Union[str, Path]):
        Path(path).write_text(self.format_flat())
        info_print(f"Settings written to {path}")

    def scenario_config(self) -> ScenarioConfig:
        s = self._settings
        try:
            geometry = GeometryConfig(
                tx_center=_point(s['tx_center'], 'tx_center'),
                irs_center=_point(s['irs_center'], 'irs_center'),
                user_area_center=_point(s['user_area_center'], 'user_area_center'),
                user_area_radius=float(s['user_area_radius']),
                carrier_hz=float(s['carrier_hz']),
                element_spacing=_optional_float(s['element_spacing']),
                min_user_separation=_optional_float(s['min_user_separation']),
            )
            budget = LinkBudget(
                noise_psd_dbm_hz=float(s['noise_psd_dbm_hz']),
                bandwidth_hz=float(s['bandwidth_hz']),
                pathloss_intercepts_db=dict(s['pathloss_intercepts_db']),
                pathloss_exponents=dict(s['pathloss_exponents']),
                rician_k_db=dict(s['rician_k_db']),
            )
            return ScenarioConfig(n=_integer(s['n'], 'n'), m=_integer(s['m'], 'm'),
                                  group_sizes=tuple(_integer(k, 'group_sizes') for k in s['group_sizes']),
                                  pt_dbm=float(s['pt_dbm']), geometry=geometry, budget=budget)
        except (TypeError, ValueError) as e:
            raise ConfigurationError(f"invalid scenario settings: {e}") from e

    def solver_options(self, seed: int = 0) -> SolverOptions:
        s = self._settings
        try:
            return SolverOptions(tau=float(s['tau']), tol=float(s['tol']),
                                 max_iters=_integer(s['max_iters'], 'max_iters'),
                                 armijo_c=float(s['armijo_c']), shrink=float(s['shrink']),
                                 alpha_init_f=float(s['alpha_init_f']),
                                 alpha_init_theta=float(s['alpha_init_theta']),
                                 seed=seed, optimize_theta=bool(s['optimize_theta']))
        except InvalidInputError as e:
            raise ConfigurationError(f"invalid solver settings: {e}") from e

    def to_spec(self, kind: Union[str, ExperimentKind], out: Optional[Union[str, Path]] = None) -> ExperimentSpec:
        try:
            kind = ExperimentKind(kind)
        except ValueError as e:
            raise ConfigurationError(f"unknown experiment kind {kind!r}") from e
        s = self._settings
        sweep = s['sweep_values']
        if sweep is not None and not isinstance(sweep, list):
            sweep = [sweep]
        try:
            sweep_values = tuple(float(v) for v in sweep) if sweep else ()
        except (TypeError, ValueError) as e:
            raise ConfigurationError(f"sweep_values must be numbers, got {sweep!r}") from e
        seed = _integer(s['seed'], 'seed')
        return ExperimentSpec(kind=kind, scenario=self.scenario_config(),
                              solver=self.solver_options(seed), sweep_values=sweep_values,
                              num_realizations=_integer(s['num_realizations'], 'num_realizations'),
                              out=Path(out) if out is not None else None, seed=seed,
                              parallel=_integer(s['parallel'], 'parallel'), warmup=bool(s['warmup']))


def _integer(value: Any, name: str) -> int:
    if isinstance(value, bool) or not isinstance(value, (int, float)) or int(value) != value:
        raise ConfigurationError(f"setting '{name}' must be an integer, got {value!r}")
    return int(value)


def _optional_float(value: Any) -> Optional[float]:
    return None if value is None else float(value)


def _point(value: Any, name: str):
    if not isinstance(value, (list, tuple)) or len(value) != 3:
        raise ConfigurationError(f"setting '{name}' must be a list of 3 coordinates, got {value!r}")
    return tuple(float(v) for v in value)
