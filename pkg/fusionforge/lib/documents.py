""" fusionforge/lib/documents.py """

# Standard Library
import hashlib
import json

# Third Party
from schema import Schema, And, Or, Optional, SchemaError
from semantic_version import Version as SemanticVersion

# Package
from fusionforge.lib.exceptions import MalformedInput

SCHEMA_VERSION = SemanticVersion("1.0.0")

number = Or(int, float)
nonnegative_int = And(int, lambda x: x >= 0)
complex_pair = And([number], lambda pair: len(pair) == 2)
sparse_entry = And([number], lambda entry: len(entry) == 5)  # i, j, k, re, im


def compatible_version(version_string) -> bool:
	try:
		return SemanticVersion(version_string).major == SCHEMA_VERSION.major
	except ValueError:
		return False


version_field = And(str, compatible_version, error="Unsupported or missing 'schema_version'.")

group_schema = {
	"elements": [And(str, len)],
	"mult_table": [[nonnegative_int]],
}

fusion_ring_schema = Schema({
	"schema_version": version_field,
	"kind": "fusion_ring",
	"labels": [And(str, len)],
	"unit": nonnegative_int,
	"dual": [nonnegative_int],
	"N": [[[nonnegative_int]]],
})

graded_fusion_ring_body = {
	"schema_version": version_field,
	"kind": "graded_fusion_ring",
	"group": group_schema,
	"sectors": [{"element": And(str, len), "labels": [And(str, len)]}],
	"unit": nonnegative_int,
	"dual": [nonnegative_int],
	"N": [And([nonnegative_int], lambda entry: len(entry) == 4)],  # sparse: i, j, k, multiplicity
	"fp_dims": [number],
	"fusion_dims": [number],
}
graded_fusion_ring_schema = Schema(graded_fusion_ring_body)

modular_data_schema = Schema({
	"schema_version": version_field,
	"kind": "modular_data",
	"labels": [And(str, len)],
	"S": [[complex_pair]],
	Optional("unit"): nonnegative_int,
	Optional("tolerance"): number,
})

graded_algebra_spec_schema = Schema({
	"schema_version": version_field,
	"kind": "graded_algebra_spec",
	"group": group_schema,
	"sectors": [{"element": And(str, len), "dim": And(int, lambda x: x >= 1)}],
	"conv": [Or({"g": str, "entries": [sparse_entry]},
	            {"g": str, "dense": [[[complex_pair]]]})],
	"comp": [Or({"g": str, "h": str, "entries": [sparse_entry]},
	            {"g": str, "h": str, "dense": [[[complex_pair]]]})],
})

recovery_output_schema = Schema({
	"schema_version": version_field,
	"kind": "recovery_output",
	"graded": graded_fusion_ring_body,
	"C": [sparse_entry],
	"dplus": [number],
})

fraction_string = And(str, len)

pointed_extension_schema = Schema({
	"schema_version": version_field,
	"kind": "pointed_extension",
	Optional("hyperbolic_over"): [And(int, lambda x: x >= 1)],
	Optional("factors"): [And(int, lambda x: x >= 1)],
	Optional("bicharacter"): [[fraction_string]],
	Optional("lagrangian"): Or({"elements": [[int]]},
	                           {"H": [[int]], Optional("b"): [[fraction_string]]}),
	"G": group_schema,
	"pi": [[[int]]],
	Optional("omega"): [[[int]]],
})

result_schema = Schema({
	"schema_version": version_field,
	"kind": "result",
	"command": And(str, len),
	"library_version": str,
	"inputs_hash": And(str, lambda x: len(x) == 64),
	"tolerance": number,
	"seed": nonnegative_int,
	"result": dict,
}, ignore_extra_keys=False)

SCHEMAS = {
	"fusion_ring": fusion_ring_schema,
	"graded_fusion_ring": graded_fusion_ring_schema,
	"modular_data": modular_data_schema,
	"graded_algebra_spec": graded_algebra_spec_schema,
	"recovery_output": recovery_output_schema,
	"pointed_extension": pointed_extension_schema,
	"result": result_schema,
}


def to_pair(value) -> list:
	value = complex(value)
	return [float(value.real), float(value.imag)]


def from_pair(pair) -> complex:
	return complex(float(pair[0]), float(pair[1]))


def new_document(kind: str, **fields) -> dict:
	document = {"schema_version": str(SCHEMA_VERSION), "kind": kind}
	document.update(fields)
	return document


def validate_document(document: dict, kind: str | None = None) -> dict:
	"""
	Validate a parsed document against the schema for its 'kind'.
	"""
	if not isinstance(document, dict):
		raise MalformedInput(f"Expected a JSON object, found {type(document).__name__}.")
	kind = kind or document.get("kind")
	if kind not in SCHEMAS:
		raise MalformedInput(f"Unknown document kind '{kind}'.  Expected one of: {', '.join(SCHEMAS)}")
	if document.get("kind") != kind:
		raise MalformedInput(f"Expected a '{kind}' document, found '{document.get('kind')}'.")
	try:
		return SCHEMAS[kind].validate(document)
	except SchemaError as ex:
		raise MalformedInput(f"Malformed '{kind}' document: {ex}") from ex


def dump_document(document: dict) -> str:
	"""
	Canonical serialization.  Identical documents always produce identical bytes.
	"""
	return json.dumps(document, sort_keys=True, ensure_ascii=False, allow_nan=False, indent=2) + "\n"


def load_document(text: str, kind: str | None = None) -> dict:
	try:
		document = json.loads(text)
	except json.JSONDecodeError as ex:
		raise MalformedInput(f"Input is not valid JSON: {ex}") from ex
	return validate_document(document, kind)


def inputs_hash(inputs) -> str:
	"""
	SHA-256 of the canonical JSON form of 'inputs'.
	"""
	canonical = json.dumps(inputs, sort_keys=True, ensure_ascii=False, separators=(",", ":"))
	return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


def result_document(command: str, inputs, library_version: str, tolerance: float, seed: int, result: dict) -> dict:
	return new_document("result",
	                    command=command,
	                    library_version=library_version,
	                    inputs_hash=inputs_hash(inputs),
	                    tolerance=float(tolerance),
	                    seed=int(seed),
	                    result=result)
