"""JSON schema documents for the file formats and CLI reports."""
from __future__ import annotations

import json
from functools import cache
from importlib import resources

import jsonschema

from ..errors import InputError

NAMES = ("lattice", "count_series", "ghf_report", "square_certificate", "assembly", "error")


@cache
def load_schema(name: str) -> dict:
    text = resources.files(__name__).joinpath(f"{name}.schema.json").read_text()
    return json.loads(text)


def validate_document(doc, name: str) -> None:
    try:
        jsonschema.validate(doc, load_schema(name))
    except jsonschema.ValidationError as exc:
        raise InputError(f"invalid {name} document: {exc.message}") from None
