"""TOML run configuration: scenario, encoding, training and output."""

import math
import os
from dataclasses import asdict, dataclass, field, fields

import tomlkit
from tomlkit.exceptions import TOMLKitError

from ..acquisition.scenario import ScenarioSpec
from ..inr.hashgrid import HashEncodingConfig
from ..unroll.train import PRESETS, UnrollConfig

OUTPUT_ROOT_ENV = "INRRECON_OUTPUT_ROOT"
DEFAULT_OUTPUT_ROOT = "runs"
AUTO = "auto"

_SECTIONS = ("scenario", "encoding", "unroll", "output")


class ConfigError(ValueError):
    """Invalid configuration; ``path`` is the dotted key at fault (or ``None``)."""

    def __init__(self, message, path=None, source=None):
        where = f"{source}: " if source else ""
        at = f"{path}: " if path else ""
        super().__init__(f"{where}{at}{message}")
        self.path = path
        self.detail = message


@dataclass(frozen=True)
class RunConfig:
    """Everything a ``recon`` run needs.

    ``encoding=None`` in ``unroll`` sizes the hash grid to the image.
    An empty ``output_dir`` means a fingerprint-named directory under the
    output root (``$INRRECON_OUTPUT_ROOT`` or ``./runs``).
    """

    scenario: ScenarioSpec = field(default_factory=ScenarioSpec)
    unroll: UnrollConfig = field(default_factory=UnrollConfig)
    output_dir: str = ""

    def fingerprint(self):
        return self.unroll.fingerprint(asdict(self.scenario))

    def resolve_output_dir(self, prefix="recon"):
        if self.output_dir:
            return self.output_dir
        root = os.environ.get(OUTPUT_ROOT_ENV) or DEFAULT_OUTPUT_ROOT
        return os.path.join(root, f"{prefix}-{self.fingerprint()[:12]}")


def _unroll_fields():
    return [f for f in fields(UnrollConfig) if f.name != "encoding"]


def _encoding_fields():
    return list(fields(HashEncodingConfig))


def _plain(value):
    if isinstance(value, tuple):
        return list(value)
    return value


def to_toml(config):
    """Render ``config`` as a commented TOML document."""
    doc = tomlkit.document()
    doc.add(tomlkit.comment("Reconstruction run configuration. Every key is shown with its value."))
    doc.add(tomlkit.nl())

    sc = tomlkit.table()
    sc.add(tomlkit.comment("simulated scan: Shepp-Logan phantom, synthetic coils, masked k-space"))
    for f in fields(ScenarioSpec):
        sc.add(f.name, _plain(getattr(config.scenario, f.name)))
    doc.add("scenario", sc)

    enc = tomlkit.table()
    enc.add(tomlkit.comment('growth = "auto" sizes the finest level to half the image side'))
    cur = config.unroll.encoding
    for f in _encoding_fields():
        if cur is None:
            value = AUTO if f.name == "growth" else f.default
        else:
            value = getattr(cur, f.name)
        enc.add(f.name, value)
    doc.add("encoding", enc)

    un = tomlkit.table()
    names = "; ".join(f"{k}: " + ", ".join(f"{n}={v}" for n, v in kv.items())
                      for k, kv in PRESETS.items())
    un.add(tomlkit.comment(f"hyperparameter presets: {names}"))
    for f in _unroll_fields():
        un.add(f.name, _plain(getattr(config.unroll, f.name)))
    doc.add("unroll", un)

    out = tomlkit.table()
    out.add(tomlkit.comment(f'empty dir: <${OUTPUT_ROOT_ENV} or "{DEFAULT_OUTPUT_ROOT}">/recon-<fingerprint>'))
    out.add("dir", config.output_dir)
    doc.add("output", out)
    return tomlkit.dumps(doc)


def default_config_text():
    return to_toml(RunConfig())


def _check_value(path, value, default):
    """Coerce ``value`` to the type of ``default`` or raise ConfigError."""
    if isinstance(default, bool):
        if not isinstance(value, bool):
            raise ConfigError(f"expected true/false, got {value!r}", path)
        return value
    if isinstance(default, int):
        if isinstance(value, bool) or not isinstance(value, int):
            raise ConfigError(f"expected an integer, got {value!r}", path)
        return int(value)
    if isinstance(default, float):
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigError(f"expected a number, got {value!r}", path)
        if not math.isfinite(value):
            raise ConfigError(f"expected a finite number, got {value!r}", path)
        return float(value)
    if isinstance(default, str):
        if not isinstance(value, str):
            raise ConfigError(f"expected a string, got {value!r}", path)
        return str(value)
    if isinstance(default, tuple):
        if not isinstance(value, list) or not all(
                isinstance(v, int) and not isinstance(v, bool) for v in value):
            raise ConfigError(f"expected a list of integers, got {value!r}", path)
        return tuple(int(v) for v in value)
    raise ConfigError(f"unsupported setting type for {value!r}", path)


def _section(doc, name):
    table = doc.get(name, {})
    if not isinstance(table, dict):
        raise ConfigError("expected a table", name)
    return table


def _read_fields(name, table, specs, special=None):
    special = special or {}
    known = {f.name: f for f in specs}
    for key in table:
        if key not in known:
            raise ConfigError("unknown key", f"{name}.{key}")
    out = {}
    for key, value in table.items():
        path = f"{name}.{key}"
        value = value.unwrap() if hasattr(value, "unwrap") else value
        if key in special:
            out[key] = special[key](path, value)
            continue
        f = known[key]
        out[key] = _check_value(path, value, f.default)
    return out


def _growth(path, value):
    if value == AUTO:
        return AUTO
    return _check_value(path, value, 1.0)


def _build(name, cls, kwargs):
    try:
        return cls(**kwargs)
    except (ValueError, TypeError) as exc:
        raise ConfigError(str(exc), name) from None


def parse_config(text, source=None):
    """Parse and validate TOML text into a :class:`RunConfig`.

    Every failure, including TOML syntax errors, surfaces as
    :class:`ConfigError`.
    """
    try:
        try:
            doc = tomlkit.parse(text).unwrap()
        except TOMLKitError as exc:
            raise ConfigError(f"invalid TOML: {exc}") from None
        for key in doc:
            if key not in _SECTIONS:
                raise ConfigError("unknown section", key)
        scenario = _build("scenario", ScenarioSpec,
                          _read_fields("scenario", _section(doc, "scenario"), fields(ScenarioSpec)))
        enc_kw = _read_fields("encoding", _section(doc, "encoding"), _encoding_fields(),
                              {"growth": _growth})
        growth = enc_kw.pop("growth", AUTO)
        if growth != AUTO:
            encoding = _build("encoding", HashEncodingConfig, {**enc_kw, "growth": growth})
        elif any(enc_kw[k] != getattr(HashEncodingConfig, k) for k in enc_kw):
            encoding = _build("encoding", HashEncodingConfig.for_image,
                              {"height": scenario.size, "width": scenario.size, **enc_kw})
        else:
            encoding = None
        un_kw = _read_fields("unroll", _section(doc, "unroll"), _unroll_fields())
        unroll = _build("unroll", UnrollConfig, {**un_kw, "encoding": encoding})
        out = _section(doc, "output")
        for key in out:
            if key != "dir":
                raise ConfigError("unknown key", f"output.{key}")
        out_dir = _check_value("output.dir", out.get("dir", ""), "")
        return RunConfig(scenario, unroll, out_dir)
    except ConfigError as exc:
        if source is not None:
            raise ConfigError(exc.detail, exc.path, source) from None
        raise


def load_config(path):
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror or exc}") from None
    except UnicodeDecodeError as exc:
        raise ConfigError(f"config {path} is not UTF-8 text: {exc}") from None
    return parse_config(text, source=os.fspath(path))
