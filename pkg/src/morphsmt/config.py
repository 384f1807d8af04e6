"""Flat ``section.key = value`` pipeline configuration.

Paths are resolved against the config file's own directory, so a config can
sit next to its corpus.  Every numeric setting is validated and every data
path must exist at load time.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, Optional

DATA_KEYS = tuple(
    f"{split}_{side}_{kind}"
    for split in ("train", "dev", "test")
    for side in ("src", "tgt")
    for kind in ("words", "morphs")
)

_SETTING_KEYS = {
    "granularity.max_words": ("max_words", int),
    "granularity.max_morphemes": ("max_morphemes", int),
    "lm.word_order": ("lm_word_order", int),
    "lm.morph_order": ("lm_morph_order", int),
    "lm.smoothing": ("lm_smoothing", str),
    "align.iterations": ("align_iterations", int),
    "align.heuristic": ("align_heuristic", str),
    "decoder.beam": ("beam", int),
    "decoder.distortion_limit": ("distortion_limit", int),
    "decoder.nbest": ("nbest", int),
    "mert.max_iters": ("mert_max_iters", int),
    "mert.epsilon": ("mert_epsilon", float),
    "merge.method": ("merge_method", str),
    "merge.alpha": ("merge_alpha", float),
    "merge.primary": ("merge_primary", str),
    "seed": ("seed", int),
}


class ConfigError(ValueError):
    pass


@dataclass
class PipelineConfig:
    paths: dict[str, Path] = field(default_factory=dict)
    max_words: int = 7
    max_morphemes: int = 10
    lm_word_order: int = 4
    lm_morph_order: int = 5
    lm_smoothing: str = "witten-bell"
    align_iterations: int = 5
    align_heuristic: str = "grow-diag-final-and"
    beam: int = 100
    distortion_limit: int = 6
    nbest: int = 100
    mert_max_iters: int = 10
    mert_epsilon: float = 0.0001
    merge_method: str = "our-method"
    merge_alpha: float = 0.6
    merge_primary: str = "wm"
    seed: int = 42

    def validate(self) -> None:
        positive = (
            "max_words", "max_morphemes", "lm_word_order", "lm_morph_order",
            "align_iterations", "beam", "nbest", "mert_max_iters", "seed",
        )
        for name in positive:
            if getattr(self, name) <= 0:
                raise ConfigError(f"{name} must be positive")
        if self.distortion_limit < 0:
            raise ConfigError("distortion_limit must be >= 0")
        if self.mert_epsilon <= 0:
            raise ConfigError("mert_epsilon must be positive")
        if not 0.0 <= self.merge_alpha <= 1.0:
            raise ConfigError("merge_alpha must be in [0, 1]")
        if self.merge_method not in ("our-method", "interpolation", "add-1", "add-2"):
            raise ConfigError(f"unknown merge method: {self.merge_method}")
        if self.merge_primary not in ("wm", "m"):
            raise ConfigError(f"merge.primary must be wm or m: {self.merge_primary}")
        if self.lm_smoothing not in ("mle", "witten-bell", "kneser-ney"):
            raise ConfigError(f"unknown smoothing: {self.lm_smoothing}")
        missing = [k for k in DATA_KEYS if k not in self.paths]
        if missing:
            raise ConfigError(f"missing data paths: {', '.join(missing)}")
        for key, path in self.paths.items():
            if not path.exists():
                raise ConfigError(f"data.{key}: no such file: {path}")

    def settings_items(self) -> list[tuple[str, str]]:
        """Canonical (key, value) list, for manifests."""
        items = [(k, str(self.paths[a])) for k, a in
                 ((f"data.{key}", key) for key in DATA_KEYS)]
        for key, (attr, _) in _SETTING_KEYS.items():
            items.append((key, str(getattr(self, attr))))
        return items


def parse_config_text(
    text: str, base_dir: Path, overrides: Optional[Mapping[str, str]] = None
) -> PipelineConfig:
    raw: dict[str, str] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if "=" not in stripped:
            raise ConfigError(f"line {lineno}: expected key = value: {line!r}")
        key, value = (part.strip() for part in stripped.split("=", 1))
        raw[key] = value
    raw.update(overrides or {})

    cfg = PipelineConfig()
    for key, value in raw.items():
        if key.startswith("data."):
            name = key[len("data."):]
            if name not in DATA_KEYS:
                raise ConfigError(f"unknown data key: {key}")
            cfg.paths[name] = (base_dir / value).resolve()
        elif key in _SETTING_KEYS:
            attr, conv = _SETTING_KEYS[key]
            try:
                setattr(cfg, attr, conv(value))
            except ValueError as exc:
                raise ConfigError(f"bad value for {key}: {value!r}") from exc
        else:
            raise ConfigError(f"unknown config key: {key}")
    cfg.validate()
    return cfg


def load_config(
    path, overrides: Optional[Mapping[str, str]] = None
) -> PipelineConfig:
    path = Path(path)
    return parse_config_text(
        path.read_text(encoding="utf-8"), path.resolve().parent, overrides
    )
