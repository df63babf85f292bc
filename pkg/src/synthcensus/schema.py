"""Descriptor documents and the script mini-language.

A descriptor is a small XML document naming the entity to generate, how many
records, the generator variables, the output attributes (each defined by a
script expression over variable fields) and a CSV consumer::

    <setup defaultDataset="IE">
        <import domains="personcensus"/>
        <generate type="PersonCensus" count="30000">
            <variable name="person" generator="PersonCensusGenerator"/>
            <attribute name="FullName" script="person.givenName + ' ' + person.familyName"/>
            <consumer class="org.databene.platform.csv.CSVEntityExporter">
                <property name="uri" value="./output/people.csv"/>
                <property name="columns" value="FullName"/>
            </consumer>
        </generate>
    </setup>

Scripts follow ``expr := term ('+' term)*`` where a term is either a field
reference ``var.field`` or a single-quoted literal without escapes.
"""

from __future__ import annotations

import re
import xml.etree.ElementTree as ET
from dataclasses import dataclass
from typing import Mapping, Union

from synthcensus.errors import (
    DuplicateAttributeName,
    DuplicateVariableName,
    EmptyExpression,
    InvalidCount,
    MalformedDocument,
    MissingRequiredAttribute,
    ScriptSyntaxError,
    UnboundColumn,
    UnboundVariable,
    UndeclaredVariable,
    UnknownAttribute,
    UnknownElement,
    UnknownField,
    UnsupportedConsumer,
)

__all__ = [
    "FieldRef",
    "Literal",
    "ScriptExpr",
    "VariableSpec",
    "AttributeSpec",
    "ConsumerSpec",
    "DescriptorModel",
    "parse_script",
    "evaluate_script",
    "parse_descriptor",
    "serialize_descriptor",
    "bind_columns",
]

_IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")


@dataclass(frozen=True)
class FieldRef:
    variable: str
    field: str

    def __str__(self) -> str:
        return f"{self.variable}.{self.field}"


@dataclass(frozen=True)
class Literal:
    text: str

    def __str__(self) -> str:
        return f"'{self.text}'"


Term = Union[FieldRef, Literal]


@dataclass(frozen=True)
class ScriptExpr:
    terms: tuple[Term, ...]

    def field_refs(self) -> list[FieldRef]:
        return [t for t in self.terms if isinstance(t, FieldRef)]

    def __str__(self) -> str:
        return " + ".join(str(t) for t in self.terms)


def parse_script(text: str) -> ScriptExpr:
    """Parse a script expression into its term list.

    >>> parse_script("person.givenName + ' ' + person.familyName").terms[1]
    Literal(text=' ')
    """
    if not text or not text.strip():
        raise EmptyExpression("empty script expression")
    terms: list[Term] = []
    pos, end = 0, len(text)

    def skip_ws(i: int) -> int:
        while i < end and text[i].isspace():
            i += 1
        return i

    while True:
        pos = skip_ws(pos)
        if pos >= end:
            raise ScriptSyntaxError(f"dangling '+' at end of {text!r}")
        if text[pos] == "'":
            close = text.find("'", pos + 1)
            if close < 0:
                raise ScriptSyntaxError(f"unterminated literal at column {pos + 1} in {text!r}")
            terms.append(Literal(text[pos + 1 : close]))
            pos = close + 1
        else:
            m = _IDENT.match(text, pos)
            if not m:
                raise ScriptSyntaxError(f"unexpected {text[pos]!r} at column {pos + 1} in {text!r}")
            variable = m.group()
            pos = m.end()
            if pos >= end or text[pos] != ".":
                raise ScriptSyntaxError(f"field reference {variable!r} has no '.field' part in {text!r}")
            m = _IDENT.match(text, pos + 1)
            if not m:
                raise ScriptSyntaxError(f"malformed field reference after {variable + '.'!r} in {text!r}")
            terms.append(FieldRef(variable, m.group()))
            pos = m.end()
        pos = skip_ws(pos)
        if pos >= end:
            return ScriptExpr(tuple(terms))
        if text[pos] != "+":
            raise ScriptSyntaxError(f"expected '+' at column {pos + 1} in {text!r}")
        pos += 1


def evaluate_script(expr: ScriptExpr, bindings: Mapping[str, Mapping[str, str]]) -> str:
    """Concatenate the expression's terms, resolving field references in ``bindings``."""
    parts = []
    for term in expr.terms:
        if isinstance(term, Literal):
            parts.append(term.text)
            continue
        try:
            record = bindings[term.variable]
        except KeyError:
            raise UnboundVariable(f"variable {term.variable!r} is not bound") from None
        try:
            parts.append(record[term.field])
        except KeyError:
            raise UnknownField(f"{term.variable!r} has no field {term.field!r}") from None
    return "".join(parts)


@dataclass(frozen=True)
class VariableSpec:
    name: str
    generator_id: str
    dataset_region: str | None = None
    locale: str | None = None


@dataclass(frozen=True)
class AttributeSpec:
    name: str
    source: ScriptExpr


@dataclass(frozen=True)
class ConsumerSpec:
    uri: str
    columns: tuple[str, ...]
    kind: str = "csv"
    class_name: str | None = None


@dataclass(frozen=True)
class DescriptorModel:
    dataset_region: str | None
    entity_type: str
    count: int
    variables: tuple[VariableSpec, ...]
    attributes: tuple[AttributeSpec, ...]
    consumer: ConsumerSpec
    domains: tuple[str, ...] = ()

    def attribute(self, name: str) -> AttributeSpec:
        for attr in self.attributes:
            if attr.name == name:
                return attr
        raise KeyError(name)


# element -> (allowed attributes, required attributes)
_VOCABULARY: dict[str, tuple[frozenset[str], frozenset[str]]] = {
    "setup": (frozenset({"defaultDataset"}), frozenset()),
    "import": (frozenset({"domains"}), frozenset({"domains"})),
    "generate": (frozenset({"type", "count"}), frozenset({"type", "count"})),
    "variable": (frozenset({"name", "generator", "dataset", "locale"}), frozenset({"name", "generator"})),
    "attribute": (frozenset({"name", "script"}), frozenset({"name", "script"})),
    "consumer": (frozenset({"class"}), frozenset({"class"})),
    "property": (frozenset({"name", "value"}), frozenset({"name", "value"})),
}

_CONSUMER_PROPERTIES = ("uri", "columns")


def _check_element(el: ET.Element, expected_parent: str) -> None:
    if el.tag not in _VOCABULARY:
        raise UnknownElement(f"unknown element <{el.tag}> inside <{expected_parent}>")
    allowed, required = _VOCABULARY[el.tag]
    for key in el.attrib:
        if key not in allowed:
            raise UnknownAttribute(f"<{el.tag}> does not accept attribute {key!r}")
    for key in sorted(required):
        if key not in el.attrib:
            raise MissingRequiredAttribute(f"<{el.tag}> is missing required attribute {key!r}")
    if el.text and el.text.strip():
        raise MalformedDocument(f"<{el.tag}> must not contain text")


def _children(el: ET.Element, allowed: set[str]) -> list[ET.Element]:
    kids = list(el)
    for kid in kids:
        _check_element(kid, el.tag)
        if kid.tag not in allowed:
            raise UnknownElement(f"<{kid.tag}> is not allowed inside <{el.tag}>")
        if kid.tail and kid.tail.strip():
            raise MalformedDocument(f"stray text after <{kid.tag}>")
    return kids


def _parse_count(raw: str) -> int:
    value = raw.strip()
    if not re.fullmatch(r"-?[0-9]+", value):
        raise InvalidCount(f"count must be an integer, got {raw!r}")
    count = int(value)
    if count < 1:
        raise InvalidCount(f"count must be at least 1, got {count}")
    return count


def _parse_consumer(el: ET.Element) -> ConsumerSpec:
    class_name = el.attrib["class"]
    if not (class_name.lower() == "csv" or class_name.endswith("CSVEntityExporter")):
        raise UnsupportedConsumer(f"only CSV consumers are supported, got {class_name!r}")
    props: dict[str, str] = {}
    for prop in _children(el, {"property"}):
        name = prop.attrib["name"]
        if name not in _CONSUMER_PROPERTIES:
            raise UnknownAttribute(f"unknown consumer property {name!r}")
        if name in props:
            raise MalformedDocument(f"consumer property {name!r} given twice")
        props[name] = prop.attrib["value"]
    for name in _CONSUMER_PROPERTIES:
        if name not in props:
            raise MissingRequiredAttribute(f"consumer is missing property {name!r}")
    uri = props["uri"].strip()
    if not uri:
        raise MalformedDocument("consumer uri is empty")
    columns = tuple(c.strip() for c in props["columns"].split(","))
    if not columns or any(not c for c in columns):
        raise MalformedDocument(f"consumer columns contain an empty name: {props['columns']!r}")
    return ConsumerSpec(uri=uri, columns=columns, kind="csv", class_name=class_name)


def bind_columns(columns: tuple[str, ...] | list[str], attribute_names: list[str]) -> dict[str, str]:
    """Map each column to an attribute name.

    Matching is exact first, then case-insensitive with surrounding whitespace
    trimmed.
    """
    folded: dict[str, list[str]] = {}
    for name in attribute_names:
        folded.setdefault(name.strip().casefold(), []).append(name)
    binding = {}
    for column in columns:
        key = column.strip()
        if key in attribute_names:
            binding[column] = key
            continue
        matches = folded.get(key.casefold(), [])
        if len(matches) != 1:
            what = "matches no attribute" if not matches else f"is ambiguous between {matches}"
            raise UnboundColumn(f"column {column!r} {what}")
        binding[column] = matches[0]
    return binding


def parse_descriptor(text: str | bytes) -> DescriptorModel:
    """Parse and validate a descriptor document.

    Bytes input honours the encoding named in the XML prolog (the usual
    ``iso-8859-1`` case); str input is taken as already decoded.
    """
    probe = text if isinstance(text, str) else text.decode("latin-1")
    if "<!DOCTYPE" in probe or "<!ENTITY" in probe:
        raise MalformedDocument("document type declarations are not supported")
    try:
        root = ET.fromstring(text)
    except ET.ParseError as exc:
        raise MalformedDocument(f"not a well-formed document: {exc}") from None
    if root.tag != "setup":
        raise UnknownElement(f"root element must be <setup>, got <{root.tag}>")
    _check_element(root, "document")
    region = root.attrib.get("defaultDataset")

    domains: list[str] = []
    generates = []
    for kid in _children(root, {"import", "generate"}):
        if kid.tag == "import":
            domains.append(kid.attrib["domains"])
        else:
            generates.append(kid)
    if len(generates) != 1:
        raise MalformedDocument(f"expected exactly one <generate>, found {len(generates)}")
    gen = generates[0]
    entity_type = gen.attrib["type"].strip()
    if not entity_type:
        raise MalformedDocument("<generate> type is empty")
    count = _parse_count(gen.attrib["count"])

    variables: list[VariableSpec] = []
    attributes: list[AttributeSpec] = []
    consumers: list[ConsumerSpec] = []
    for kid in _children(gen, {"variable", "attribute", "consumer"}):
        if kid.tag == "variable":
            _children(kid, set())
            name = kid.attrib["name"].strip()
            if not _IDENT.fullmatch(name):
                raise MalformedDocument(f"invalid variable name {name!r}")
            if any(v.name == name for v in variables):
                raise DuplicateVariableName(f"variable {name!r} declared twice")
            variables.append(
                VariableSpec(
                    name=name,
                    generator_id=kid.attrib["generator"].strip(),
                    dataset_region=kid.attrib.get("dataset"),
                    locale=kid.attrib.get("locale"),
                )
            )
        elif kid.tag == "attribute":
            _children(kid, set())
            name = kid.attrib["name"].strip()
            if not name:
                raise MalformedDocument("attribute name is empty")
            if any(a.name == name for a in attributes):
                raise DuplicateAttributeName(f"attribute {name!r} declared twice")
            attributes.append(AttributeSpec(name=name, source=parse_script(kid.attrib["script"])))
        else:
            consumers.append(_parse_consumer(kid))
    if len(consumers) != 1:
        raise MalformedDocument(f"expected exactly one <consumer>, found {len(consumers)}")
    if not attributes:
        raise MalformedDocument("<generate> declares no attributes")

    declared = {v.name for v in variables}
    for attr in attributes:
        for ref in attr.source.field_refs():
            if ref.variable not in declared:
                raise UndeclaredVariable(
                    f"attribute {attr.name!r} references undeclared variable {ref.variable!r}"
                )
    consumer = consumers[0]
    bind_columns(consumer.columns, [a.name for a in attributes])

    return DescriptorModel(
        dataset_region=region,
        entity_type=entity_type,
        count=count,
        variables=tuple(variables),
        attributes=tuple(attributes),
        consumer=consumer,
        domains=tuple(domains),
    )


def serialize_descriptor(model: DescriptorModel) -> str:
    """Render ``model`` as a canonical descriptor document."""
    root = ET.Element("setup")
    if model.dataset_region is not None:
        root.set("defaultDataset", model.dataset_region)
    for domain in model.domains:
        ET.SubElement(root, "import", domains=domain)
    gen = ET.SubElement(root, "generate", type=model.entity_type, count=str(model.count))
    for var in model.variables:
        el = ET.SubElement(gen, "variable", name=var.name, generator=var.generator_id)
        if var.dataset_region is not None:
            el.set("dataset", var.dataset_region)
        if var.locale is not None:
            el.set("locale", var.locale)
    for attr in model.attributes:
        ET.SubElement(gen, "attribute", name=attr.name, script=str(attr.source))
    consumer = ET.SubElement(gen, "consumer", {"class": model.consumer.class_name or "csv"})
    ET.SubElement(consumer, "property", name="uri", value=model.consumer.uri)
    ET.SubElement(consumer, "property", name="columns", value=", ".join(model.consumer.columns))
    ET.indent(root, space="    ")
    return '<?xml version="1.0" encoding="utf-8"?>\n' + ET.tostring(root, encoding="unicode") + "\n"
