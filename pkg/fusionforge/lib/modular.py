""" fusionforge/lib/modular.py """

from __future__ import annotations

# Standard Library
from dataclasses import dataclass
from functools import cached_property
import itertools
import math
import pathlib

# Third Party
import numpy as np

# Package
import fusionforge
from fusionforge.lib import documents
from fusionforge.lib.core_ring import FusionRing, FiniteGroup, Violation, product_ring
from fusionforge.lib.exceptions import MalformedInput, NotIntegral, UnknownCategory
from fusionforge.lib.utils import is_close_to_integer, normalize_label

GOLDEN_RATIO = (1 + math.sqrt(5)) / 2

CATALOG_NAMES = ("fibonacci", "ising", "toric_code", "su2", "pointed", "product", "trivial")


@dataclass(frozen=True, eq=False)
class ModularData:
	"""
	The unnormalized S-matrix of a modular category (S[unit][x] = d_x), together with its fusion ring.
	"""
	ring: FusionRing
	S: np.ndarray

	def __post_init__(self):
		S = np.array(self.S, dtype=np.complex128)
		rank = self.ring.rank
		if S.shape != (rank, rank):
			raise MalformedInput(f"S-matrix has shape {S.shape}, expected {(rank, rank)}.")
		S.setflags(write=False)
		object.__setattr__(self, "S", S)

	@property
	def labels(self) -> tuple[str, ...]:
		return self.ring.labels

	@property
	def rank(self) -> int:
		return self.ring.rank

	@property
	def unit(self) -> int:
		return self.ring.unit

	@cached_property
	def dims(self) -> np.ndarray:
		return self.S[self.unit, :].copy()

	@cached_property
	def global_dim(self) -> float:
		return float(np.sum(self.dims ** 2).real)

	def index(self, label: str) -> int:
		return self.ring.index(normalize_label(label, self.labels))

	def __eq__(self, other):
		if not isinstance(other, ModularData):
			return NotImplemented
		return self.ring == other.ring and np.allclose(self.S, other.S)

	__hash__ = None

	@staticmethod
	def from_s_matrix(labels, S, unit: int = 0, tolerance: float | None = None) -> ModularData:
		"""
		Build modular data from an S-matrix alone: duality from S^2 = dim*C, fusion rules from the Verlinde formula.
		"""
		S = np.array(S, dtype=np.complex128)
		rank = len(labels)
		if S.shape != (rank, rank):
			raise MalformedInput(f"S-matrix has shape {S.shape}, expected {(rank, rank)}.")
		if abs(S[unit, unit] - 1) > 1e-9:
			raise MalformedInput(f"S[unit][unit] = {S[unit, unit]}, expected 1 (unnormalized convention).")
		dims = S[unit, :]
		global_dim = float(np.sum(dims ** 2).real)
		if global_dim <= 0:
			raise MalformedInput(f"Global dimension {global_dim} is not positive.")

		charge_conjugation = (S @ S) / global_dim
		dual = []
		for y in range(rank):
			column = np.flatnonzero(np.abs(charge_conjugation[:, y] - 1) < 1e-6)
			if len(column) != 1:
				raise MalformedInput(f"S^2 is not dim*C: column {y} of S^2/dim has no unique entry equal to 1.")
			dual.append(int(column[0]))

		tensor = verlinde_tensor(S, unit, dual, tolerance)
		return ModularData(FusionRing(tuple(labels), tensor, unit, tuple(dual)), S)

	def to_document(self) -> dict:
		return documents.new_document("modular_data",
		                              labels=list(self.labels),
		                              unit=self.unit,
		                              S=[[documents.to_pair(entry) for entry in row] for row in self.S])

	@staticmethod
	def from_document(document: dict) -> ModularData:
		document = documents.validate_document(document, "modular_data")
		S = np.array([[documents.from_pair(entry) for entry in row] for row in document["S"]])
		return ModularData.from_s_matrix(tuple(document["labels"]), S, document.get("unit", 0), document.get("tolerance"))


def verlinde_tensor(S: np.ndarray, unit: int, dual, tolerance: float | None = None) -> np.ndarray:
	"""
	N^z_{xy} = (1/dim) sum_w S[x,w] S[y,w] S[dual z,w] / S[unit,w], rounded with a tolerance check.
	"""
	tolerance = tolerance or fusionforge.get_config_data().tolerance
	dims = S[unit, :]
	global_dim = np.sum(dims ** 2).real
	raw = np.einsum('xw,yw,zw,w->xyz', S, S, S[list(dual), :], 1 / dims, optimize=True) / global_dim
	rounded = np.rint(raw.real)
	bad = np.argwhere((np.abs(raw - rounded) > tolerance) | (rounded < 0))
	if len(bad):
		x, y, z = (int(each) for each in bad[0])
		raise NotIntegral("verlinde N^z_{xy}", (x, y, z), complex(raw[x, y, z]), tolerance)
	return rounded.astype(np.int64)


def verlinde(md: ModularData, tolerance: float | None = None) -> FusionRing:
	"""
	The fusion ring determined by the S-matrix of 'md'.
	"""
	tensor = verlinde_tensor(md.S, md.unit, md.ring.dual, tolerance)
	return FusionRing(md.labels, tensor, md.unit, md.ring.dual)


def mtc_formula_residual(md: ModularData) -> float:
	"""
	max |(1/dim) sum_{x,y} N^z_{xy} (d_v S[x,v]) (d_w S[y,w]) - delta_{v,w} d_v S[z,v]| over v, w, z.
	"""
	dims = md.dims
	left = np.einsum('xyz,xv,yw,v,w->vwz', md.ring.N.astype(np.complex128), md.S, md.S, dims, dims, optimize=True) / md.global_dim
	right = np.einsum('vw,v,zv->vwz', np.eye(md.rank), dims, md.S)
	return float(np.max(np.abs(left - right)))


def verify_modular_data(md: ModularData, tolerance: float = 1e-9) -> list[Violation]:
	violations = []
	S = md.S
	for x, y in np.argwhere(np.abs(S - S.T) > tolerance):
		if x < y:
			violations.append(Violation("S-symmetry", (x, y), f"S[{x}][{y}] = {S[x, y]} but S[{y}][{x}] = {S[y, x]}"))
	if abs(S[md.unit, md.unit] - 1) > tolerance:
		violations.append(Violation("S-unit", (md.unit, md.unit), f"S[unit][unit] = {S[md.unit, md.unit]}"))

	conjugation = np.zeros((md.rank, md.rank))
	for y, x in enumerate(md.ring.dual):
		conjugation[x, y] = 1
	for x, y in np.argwhere(np.abs(S @ S - md.global_dim * conjugation) > tolerance * max(1.0, md.global_dim)):
		violations.append(Violation("S-squared", (x, y), f"(S^2)[{x}][{y}] = {(S @ S)[x, y]}, expected dim*C = {md.global_dim * conjugation[x, y]}"))

	try:
		from_s = verlinde(md)
		for x, y, z in np.argwhere(from_s.N != md.ring.N):
			violations.append(Violation("verlinde", (x, y, z), f"verlinde gives {from_s.N[x, y, z]}, ring has {md.ring.N[x, y, z]}"))
	except NotIntegral as ex:
		violations.append(Violation("verlinde", tuple(ex.indices), str(ex)))

	residual = mtc_formula_residual(md)
	if residual > tolerance * max(1.0, md.global_dim ** 2):
		violations.append(Violation("mtc-formula", (), f"residual {residual:g}"))
	return violations


# ========
# Genus-g fusion coefficients
# ========

def _insertion_indices(md: ModularData, insertions) -> list[int]:
	return [md.index(label) if isinstance(label, str) else int(label) for label in insertions]


def genus_sum(md: ModularData, g: int, insertions) -> complex:
	"""
	dim^(g-1) * sum_y S[x1,y]...S[xn,y] / d_y^(n+2g-2), before rounding.
	"""
	if g < 0:
		raise MalformedInput(f"Genus must be nonnegative, not {g}.")
	indices = _insertion_indices(md, insertions)
	if not indices and g == 0:
		raise MalformedInput("Genus zero needs at least one insertion.")
	n = len(indices)
	numerator = np.prod(md.S[indices, :], axis=0) if indices else np.ones(md.rank, dtype=np.complex128)
	terms = numerator / md.dims ** (n + 2 * g - 2)
	return complex(md.global_dim ** (g - 1) * np.sum(terms))


def genus_coefficient(md: ModularData, g: int, insertions, tolerance: float | None = None) -> int:
	"""
	The genus-g fusion coefficient with the given insertions, by the generalized Verlinde formula.
	"""
	tolerance = tolerance or fusionforge.get_config_data().tolerance
	value = genus_sum(md, g, insertions)
	ok, nearest = is_close_to_integer(value, tolerance)
	if not ok:
		raise NotIntegral("genus_coefficient", (g, *insertions), value, tolerance)
	return nearest


def genus_coefficient_bruteforce(ring: FusionRing, g: int, ins_in, ins_out=()) -> int:
	"""
	sum over Z_0..Z_g of Hom(X_1...X_n, Z_0...Z_g) * Hom(Z_0...Z_g, Y_1...Y_m), by contracting ring.N.
	"""
	def as_indices(labels):
		return [ring.index(normalize_label(each, ring.labels)) if isinstance(each, str) else int(each) for each in labels]

	incoming = ring.multiplicity_vector(as_indices(ins_in))
	outgoing = ring.multiplicity_vector(as_indices(ins_out))
	total = 0
	for handles in itertools.product(range(ring.rank), repeat=g + 1):
		middle = ring.multiplicity_vector(handles)
		total += int(incoming @ middle) * int(middle @ outgoing)
	return total


# ========
# Deligne products and the catalog
# ========

def trivial_category() -> ModularData:
	return ModularData(FusionRing(("𝟙",), np.ones((1, 1, 1), dtype=np.int64), 0, (0,)), np.ones((1, 1)))


def deligne_product(first: ModularData, second: ModularData, reverse: bool = False) -> ModularData:
	"""
	first ⊠ second, or first ⊠ rev(second) when 'reverse' (entrywise conjugate S).
	"""
	second_s = np.conj(second.S) if reverse else second.S
	return ModularData(product_ring(first.ring, second.ring), np.kron(first.S, second_s))


def deligne_power(md: ModularData, n: int) -> ModularData:
	if n < 0:
		raise MalformedInput(f"Deligne powers need n >= 0, not {n}.")
	if n == 0:
		return trivial_category()
	result = md
	for _ in range(n - 1):
		result = deligne_product(result, md)
	return result


def su2_s_matrix(level: int) -> np.ndarray:
	"""
	S[a][b] = sin(pi (a+1)(b+1) / (k+2)) / sin(pi / (k+2)) for spins a, b = 0..k.
	"""
	spins = np.arange(level + 1)
	angle = np.pi / (level + 2)
	return np.sin(angle * np.outer(spins + 1, spins + 1)) / np.sin(angle)


def catalog(name: str, **params) -> ModularData:
	"""
	Built-in modular categories.
	"""
	logger = fusionforge.get_logger()
	match name.lower().replace("-", "_"):
		case "fibonacci" | "fib":
			phi = GOLDEN_RATIO
			return ModularData.from_s_matrix(("𝟙", "τ"), [[1, phi], [phi, -1]])

		case "ising":
			root2 = math.sqrt(2)
			return ModularData.from_s_matrix(("𝟙", "σ", "ψ"), [[1, root2, 1], [root2, 0, -root2], [1, -root2, 1]])

		case "su2":
			level = int(params.get("level", 1))
			if level < 1:
				raise MalformedInput(f"SU(2) level must be positive, not {level}.")
			return ModularData.from_s_matrix(tuple(str(spin) for spin in range(level + 1)), su2_s_matrix(level))

		case "toric_code":
			from fusionforge.lib.pointed import hyperbolic
			return pointed_category(hyperbolic([2]), labels=("𝟙", "e", "m", "ε"))

		case "pointed":
			if "metric_group" not in params:
				raise MalformedInput("catalog('pointed') needs a 'metric_group' parameter.")
			return pointed_category(params["metric_group"], labels=params.get("labels"))

		case "product":
			base = params.get("base", "fibonacci")
			if isinstance(base, str):
				base = catalog(base)
			n = int(params.get("n", 2))
			logger.debug(f"catalog: Deligne power {n} of a rank {base.rank} category")
			return deligne_power(base, n)

		case "trivial":
			return trivial_category()

		case _:
			raise UnknownCategory(f"Unknown category '{name}'.  Built-in names: {', '.join(CATALOG_NAMES)}")


def pointed_category(metric_group, labels=None) -> ModularData:
	"""
	The pointed modular category of a metric group: S[a][b] = exp(2 pi i chi_a(b)).
	"""
	elements = metric_group.elements
	S = np.array([[np.exp(2j * np.pi * float(metric_group.chi(a, b))) for b in elements] for a in elements])
	labels = tuple(labels) if labels else tuple(metric_group.label(element) for element in elements)
	return ModularData.from_s_matrix(labels, S)


def catalog_from_reference(reference: str) -> ModularData:
	"""
	Resolve a command-line category reference:
	    fibonacci, ising, toric_code, trivial, su2:<k>, hyperbolic:<n1>x<n2>..., <name>^<n>, or a JSON file path.
	"""
	reference = reference.strip()
	path = pathlib.Path(reference)
	if reference.endswith(".json") or path.is_file():
		if not path.is_file():
			raise MalformedInput(f"Category file '{reference}' does not exist.")
		return ModularData.from_document(documents.load_document(path.read_text(encoding="utf-8"), "modular_data"))

	if "^" in reference:
		base, _, power = reference.rpartition("^")
		if not power.isdigit():
			raise MalformedInput(f"Cannot read the power in '{reference}'.")
		return deligne_power(catalog_from_reference(base), int(power))

	name, _, argument = reference.partition(":")
	match name.lower():
		case "su2":
			if not argument.isdigit():
				raise MalformedInput(f"'{reference}': expected su2:<level>.")
			return catalog("su2", level=int(argument))
		case "hyperbolic":
			from fusionforge.lib.pointed import hyperbolic
			try:
				factors = [int(each) for each in argument.split("x") if each]
			except ValueError as ex:
				raise MalformedInput(f"'{reference}': expected hyperbolic:<n1>x<n2>...") from ex
			return pointed_category(hyperbolic(factors))
		case _:
			return catalog(name)


# ========
# The trivial-group modular diagonal spec
# ========

def lagrangian_spec(md: ModularData):
	"""
	End(I(1)) for a modular category, on the basis 1_x of the summands X ⊠ X̄:
	    1_x * 1_y = (1/dim) sum_z N^z_{xy} (d_x d_y / d_z) 1_z      1_x o 1_y = delta_{x,y} 1_x
	"""
	from fusionforge.lib.conv_engine import GradedAlgebraSpec

	group = FiniteGroup.trivial()
	dims = md.dims
	conv = md.ring.N * np.einsum('x,y,z->xyz', dims, dims, 1 / dims) / md.global_dim
	comp = np.zeros((md.rank,) * 3, dtype=np.complex128)
	for x in range(md.rank):
		comp[x, x, x] = 1
	identity = group.elements[0]
	return GradedAlgebraSpec(group, {identity: md.rank}, {identity: conv}, {(identity, identity): comp})


def convolution_basis(md: ModularData):
	"""
	The closed-form minimal idempotents e_v = sum_x (d_v / d_x) S[x,v] 1_x, labelled by the simples of 'md'.
	"""
	from fusionforge.lib.conv_engine import IdempotentBasis

	dims = md.dims
	vectors = [(dims[v] / dims) * md.S[:, v] for v in range(md.rank)]
	identity = FiniteGroup.trivial().elements[0]
	return IdempotentBasis({identity: vectors}, provenance="closed-form", labels={identity: list(md.labels)})
