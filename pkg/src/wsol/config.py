"""JSON config documents: one file, fixed sections, unknown keys rejected.

Sections: ``distribution``, ``weights``, ``score``, ``loss``, ``train``.
A loss is either a single {score, weights, distribution} object or
{"components": [{..., "beta": b}, ...]} with coefficients summing to 1.
"""

from __future__ import annotations

import json
from pathlib import Path

from .errors import ConfigError, ValidationError
from .loss import CombinedLossSpec, LossSpec
from .scores import ScoreKind
from .threshold import ThresholdDistribution
from .trainer import SyntheticSeriesConfig, TrainConfig
from .weights import (
    CostWeight,
    CrossEntropyWeight,
    UnitWeight,
    ValueMaxWeight,
    ValueProdWeight,
    WeightSpec,
)

_TOP_KEYS = {"distribution", "weights", "score", "loss", "train"}


def _check_keys(obj: dict, allowed: set[str], where: str) -> None:
    if not isinstance(obj, dict):
        raise ConfigError(f"{where}: expected an object")
    unknown = set(obj) - allowed
    if unknown:
        raise ConfigError(f"{where}: unknown keys {sorted(unknown)}")


def _need(obj: dict, key: str, where: str):
    if key not in obj:
        raise ConfigError(f"{where}: missing key {key!r}")
    return obj[key]


def parse_distribution(obj: dict, where: str = "distribution") -> ThresholdDistribution:
    kind = _need(obj, "kind", where)
    try:
        if kind == "uniform":
            _check_keys(obj, {"kind", "a", "b"}, where)
            return ThresholdDistribution.uniform(obj.get("a", 0.0), obj.get("b", 1.0))
        if kind == "beta":
            _check_keys(obj, {"kind", "alpha", "beta"}, where)
            return ThresholdDistribution.beta_prior(
                _need(obj, "alpha", where), _need(obj, "beta", where)
            )
    except ValidationError as exc:
        raise ConfigError(f"{where}: {exc}") from None
    raise ConfigError(f"{where}: unknown kind {kind!r}")


def parse_weights(obj: dict, where: str = "weights") -> WeightSpec:
    variant = _need(obj, "variant", where)
    try:
        if variant == "unit":
            _check_keys(obj, {"variant"}, where)
            return UnitWeight()
        if variant == "cost":
            _check_keys(obj, {"variant", "c01", "c10"}, where)
            return CostWeight(c01=_need(obj, "c01", where), c10=_need(obj, "c10", where))
        if variant == "cross_entropy":
            _check_keys(obj, {"variant", "omega0", "omega1"}, where)
            return CrossEntropyWeight(
                omega0=_need(obj, "omega0", where), omega1=_need(obj, "omega1", where)
            )
        if variant == "value_prod":
            _check_keys(obj, {"variant", "omega"}, where)
            return ValueProdWeight(omega=tuple(_need(obj, "omega", where)))
        if variant == "value_max":
            _check_keys(obj, {"variant", "omega"}, where)
            return ValueMaxWeight(omega=tuple(_need(obj, "omega", where)))
    except ValidationError as exc:
        raise ConfigError(f"{where}: {exc}") from None
    raise ConfigError(f"{where}: unknown variant {variant!r}")


def parse_score(name, where: str = "score") -> ScoreKind:
    try:
        return ScoreKind.parse(name)
    except ValidationError as exc:
        raise ConfigError(f"{where}: {exc}") from None


def parse_loss(obj: dict, where: str = "loss") -> LossSpec | CombinedLossSpec:
    if "components" in obj:
        _check_keys(obj, {"components"}, where)
        parts = []
        for k, comp in enumerate(_need(obj, "components", where)):
            sub = f"{where}.components[{k}]"
            _check_keys(comp, {"score", "weights", "distribution", "beta"}, sub)
            parts.append(
                (
                    LossSpec(
                        score=parse_score(_need(comp, "score", sub), sub),
                        weights=parse_weights(_need(comp, "weights", sub), sub),
                        dist=parse_distribution(_need(comp, "distribution", sub), sub),
                    ),
                    float(_need(comp, "beta", sub)),
                )
            )
        try:
            return CombinedLossSpec(components=tuple(parts))
        except ValidationError as exc:
            raise ConfigError(f"{where}: {exc}") from None
    _check_keys(obj, {"score", "weights", "distribution"}, where)
    return LossSpec(
        score=parse_score(_need(obj, "score", where), where),
        weights=parse_weights(_need(obj, "weights", where), where),
        dist=parse_distribution(_need(obj, "distribution", where), where),
    )


def parse_train(
    obj: dict, loss: LossSpec | CombinedLossSpec, where: str = "train"
) -> TrainConfig:
    _check_keys(
        obj,
        {"epochs", "learning_rate", "seed", "hidden", "activation", "chunk"},
        where,
    )
    try:
        return TrainConfig(
            loss=loss,
            epochs=int(obj.get("epochs", 300)),
            learning_rate=float(obj.get("learning_rate", 0.5)),
            seed=int(obj.get("seed", 0)),
            hidden=tuple(int(h) for h in obj.get("hidden", [8])),
            activation=obj.get("activation", "tanh"),
            chunk=None if obj.get("chunk") is None else int(obj["chunk"]),
        )
    except ValidationError as exc:
        raise ConfigError(f"{where}: {exc}") from None


def parse_synth(obj: dict, where: str = "synth") -> SyntheticSeriesConfig:
    _check_keys(
        obj,
        {
            "n",
            "event_rate",
            "precursor_strength",
            "noise",
            "window",
            "seed",
            "features",
        },
        where,
    )
    defaults = SyntheticSeriesConfig()
    try:
        return SyntheticSeriesConfig(
            n=int(obj.get("n", defaults.n)),
            event_rate=float(obj.get("event_rate", defaults.event_rate)),
            precursor_strength=float(
                obj.get("precursor_strength", defaults.precursor_strength)
            ),
            noise=float(obj.get("noise", defaults.noise)),
            window=int(obj.get("window", defaults.window)),
            seed=int(obj.get("seed", defaults.seed)),
            features=int(obj.get("features", defaults.features)),
        )
    except ValidationError as exc:
        raise ConfigError(f"{where}: {exc}") from None


def load_json(path: str | Path) -> dict:
    try:
        doc = json.loads(Path(path).read_text())
    except OSError as exc:
        raise ConfigError(str(exc)) from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: {exc}") from None
    if not isinstance(doc, dict):
        raise ConfigError(f"{path}: top level must be an object")
    return doc


def load_config(path: str | Path) -> dict:
    """Load and validate a sectioned config document."""
    doc = load_json(path)
    _check_keys(doc, _TOP_KEYS, str(path))
    out: dict = {}
    if "distribution" in doc:
        out["distribution"] = parse_distribution(doc["distribution"])
    if "weights" in doc:
        out["weights"] = parse_weights(doc["weights"])
    if "score" in doc:
        out["score"] = parse_score(doc["score"])
    if "loss" in doc:
        out["loss"] = parse_loss(doc["loss"])
    if "train" in doc:
        out["train_raw"] = doc["train"]
    return out


def load_loss(path: str | Path) -> LossSpec | CombinedLossSpec:
    """Read a loss file: either a bare loss object or a {"loss": ...} document."""
    doc = load_json(path)
    if "loss" in doc:
        _check_keys(doc, {"loss"}, str(path))
        return parse_loss(doc["loss"])
    return parse_loss(doc, where=str(path))
