"""Reading and writing models and leakage reports.

JSON model files carry the whole model:

    {"alphabet_x": [...], "alphabet_y": [...],
     "prior": [...], "channel": [[...], ...]}

with ``channel[i][j] = P(Y = alphabet_y[j] | X = alphabet_x[i])``.

The CSV alternative splits the model: the channel file has a header row
of output symbols followed by one probability row per input symbol, and
the prior file has one ``symbol,probability`` line per input symbol (in
channel row order).  All numbers are plain decimal floats.
"""

from __future__ import annotations

import csv
import json
import math
from pathlib import Path
from typing import Union

import numpy as np

from .distributions import (
    Alphabet,
    DiscreteChannel,
    DiscreteDistribution,
    JointModel,
)
from .errors import ValidationError
from .leakage import LeakageProfile, maximal_leakage, mean_leakage

PathLike = Union[str, Path]


def _symbol(raw):
    """Keep integer labels as ints so JSON and CSV models agree."""
    if isinstance(raw, bool):
        raise ValidationError(f"invalid symbol {raw!r}")
    if isinstance(raw, (int, str)):
        return raw
    if isinstance(raw, float) and raw.is_integer():
        return int(raw)
    raise ValidationError(f"symbols must be strings or integers, got {raw!r}")


def _parse_float(text: str, where: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise ValidationError(f"{where}: {text!r} is not a decimal number") from None
    if math.isnan(value):
        raise ValidationError(f"{where}: NaN is not a probability")
    return value


def load_model_json(path: PathLike) -> JointModel:
    with open(path, encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ValidationError(
                f"{path}: JSON parse error at line {exc.lineno}, column {exc.colno}: {exc.msg}"
            ) from None
    missing = {"alphabet_x", "alphabet_y", "prior", "channel"} - set(doc)
    if missing:
        raise ValidationError(f"{path}: missing keys {sorted(missing)}")
    alphabet_x = Alphabet([_symbol(s) for s in doc["alphabet_x"]])
    alphabet_y = Alphabet([_symbol(s) for s in doc["alphabet_y"]])
    prior = DiscreteDistribution(
        alphabet_x,
        np.asarray(doc["prior"], dtype=float),
        float(doc.get("truncation_deficit", 0.0)),
    )
    channel = DiscreteChannel(
        alphabet_x, alphabet_y, np.asarray(doc["channel"], dtype=float)
    )
    return JointModel(prior, channel)


def save_model_json(model: JointModel, path: PathLike) -> None:
    doc = {
        "alphabet_x": list(model.input_alphabet.symbols),
        "alphabet_y": list(model.output_alphabet.symbols),
        "prior": model.prior.probs.tolist(),
        "truncation_deficit": model.prior.truncation_deficit,
        "channel": model.channel.matrix.tolist(),
    }
    Path(path).write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n", encoding="utf-8")


def load_prior_csv(path: PathLike) -> DiscreteDistribution:
    symbols, probs = [], []
    with open(path, newline="", encoding="utf-8") as fh:
        for lineno, row in enumerate(csv.reader(fh), start=1):
            if not row or (len(row) == 1 and not row[0].strip()):
                continue
            if len(row) != 2:
                raise ValidationError(
                    f"{path}: line {lineno}: expected 'symbol,probability'"
                )
            symbols.append(_symbol_from_text(row[0].strip()))
            probs.append(_parse_float(row[1].strip(), f"{path}: line {lineno}"))
    return DiscreteDistribution(Alphabet(symbols), np.asarray(probs))


def _symbol_from_text(text: str):
    try:
        return int(text)
    except ValueError:
        return text


def load_channel_csv(path: PathLike, input_alphabet: Alphabet) -> DiscreteChannel:
    with open(path, newline="", encoding="utf-8") as fh:
        rows = [row for row in csv.reader(fh) if row and any(c.strip() for c in row)]
    if not rows:
        raise ValidationError(f"{path}: empty channel file")
    output_alphabet = Alphabet([_symbol_from_text(c.strip()) for c in rows[0]])
    matrix = []
    for lineno, row in enumerate(rows[1:], start=2):
        if len(row) != output_alphabet.size:
            raise ValidationError(
                f"{path}: line {lineno}: expected {output_alphabet.size} columns, got {len(row)}"
            )
        matrix.append([_parse_float(c.strip(), f"{path}: line {lineno}") for c in row])
    if len(matrix) != input_alphabet.size:
        raise ValidationError(
            f"{path}: {len(matrix)} channel rows for {input_alphabet.size} prior symbols"
        )
    return DiscreteChannel(input_alphabet, output_alphabet, np.asarray(matrix))


def load_model(channel_path: PathLike, prior_path: PathLike = None) -> JointModel:
    """Load a model from a combined JSON file or a CSV channel/prior pair."""
    channel_path = Path(channel_path)
    if channel_path.suffix.lower() == ".json":
        return load_model_json(channel_path)
    if prior_path is None:
        raise ValidationError("CSV channels require a separate prior file")
    prior = load_prior_csv(prior_path)
    channel = load_channel_csv(channel_path, prior.alphabet)
    return JointModel(prior, channel)


def jsonable(value):
    """Make a value JSON-serializable, spelling infinities as 'inf'."""
    if isinstance(value, float):
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        return value
    if isinstance(value, dict):
        return {k: jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [jsonable(v) for v in value]
    return value


def profile_document(profile: LeakageProfile, units: str = "nats") -> dict:
    """Machine-readable leakage profile export."""
    return jsonable(
        {
            "units": units,
            "outcomes": list(profile.outcomes.symbols),
            "leakage": [lv.in_units(units) for lv in profile.leakages],
            "p_y": profile.weights.probs.tolist(),
            "maximal_leakage": maximal_leakage(profile).in_units(units),
            "mean_leakage": mean_leakage(profile).in_units(units),
        }
    )
