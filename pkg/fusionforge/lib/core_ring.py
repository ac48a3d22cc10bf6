""" fusionforge/lib/core_ring.py """

from __future__ import annotations

# Standard Library
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import cached_property
import itertools

# Third Party
import numpy as np

# Package
import fusionforge
from fusionforge.lib import documents
from fusionforge.lib.exceptions import DegenerateRing, MalformedInput, NonConvergence
from fusionforge.lib.utils import join_labels

MAX_REPORTED_VIOLATIONS = 50


@dataclass(frozen=True)
class Violation:
	"""
	One failed axiom.  Violations are data, not errors.
	"""
	axiom: str
	indices: tuple
	message: str

	def to_dict(self) -> dict:
		return {"axiom": self.axiom, "indices": [int(each) for each in self.indices], "message": self.message}

	def __str__(self):
		return f"[{self.axiom}] {self.message}"


def _readonly(array: np.ndarray) -> np.ndarray:
	array = np.array(array, copy=True)
	array.setflags(write=False)
	return array


# ========
# Finite groups
# ========

@dataclass(frozen=True, eq=False)
class FiniteGroup:
	"""
	A finite group given by element labels and a multiplication table of indices.
	"""
	elements: tuple[str, ...]
	table: np.ndarray

	def __post_init__(self):
		object.__setattr__(self, "elements", tuple(str(each) for each in self.elements))
		try:
			table = np.asarray(self.table, dtype=np.int64)
		except (TypeError, ValueError) as ex:
			raise MalformedInput(f"Multiplication table is not a square array of integers: {ex}") from ex
		order = len(self.elements)
		if order == 0:
			raise MalformedInput("A group needs at least one element.")
		if len(set(self.elements)) != order:
			raise MalformedInput(f"Group element labels are not unique: {self.elements}")
		if table.shape != (order, order):
			raise MalformedInput(f"Multiplication table has shape {table.shape}, expected {(order, order)}.")
		if table.min() < 0 or table.max() >= order:
			raise MalformedInput("Multiplication table refers to elements that do not exist.")
		object.__setattr__(self, "table", _readonly(table))

		# Associativity, identity and inverses.
		# (ab)c vs a(bc), both indexed [a][b][c]
		if not np.array_equal(table[table, :], table[:, table]):
			raise MalformedInput("Multiplication table is not associative.")
		identities = [e for e in range(order) if np.array_equal(table[e], np.arange(order)) and np.array_equal(table[:, e], np.arange(order))]
		if len(identities) != 1:
			raise MalformedInput("Multiplication table has no two-sided identity.")
		identity = identities[0]
		for g in range(order):
			if identity not in table[g]:
				raise MalformedInput(f"Element '{self.elements[g]}' has no inverse.")

	@property
	def order(self) -> int:
		return len(self.elements)

	@cached_property
	def identity(self) -> int:
		order = self.order
		return next(e for e in range(order) if np.array_equal(self.table[e], np.arange(order)))

	def multiply(self, g: int, h: int) -> int:
		return int(self.table[g, h])

	def inverse(self, g: int) -> int:
		return int(np.flatnonzero(self.table[g] == self.identity)[0])

	def index(self, element: str) -> int:
		try:
			return self.elements.index(str(element))
		except ValueError as ex:
			raise MalformedInput(f"'{element}' is not an element of the group {list(self.elements)}.") from ex

	def __eq__(self, other):
		if not isinstance(other, FiniteGroup):
			return NotImplemented
		return self.elements == other.elements and np.array_equal(self.table, other.table)

	__hash__ = None

	@staticmethod
	def cyclic(n: int) -> FiniteGroup:
		if n < 1:
			raise MalformedInput(f"Cyclic group order must be positive, not {n}.")
		table = (np.arange(n)[:, None] + np.arange(n)[None, :]) % n
		return FiniteGroup(tuple(str(k) for k in range(n)), table)

	@staticmethod
	def trivial() -> FiniteGroup:
		return FiniteGroup.cyclic(1)

	@staticmethod
	def direct_product(first: FiniteGroup, second: FiniteGroup) -> FiniteGroup:
		pairs = list(itertools.product(range(first.order), range(second.order)))
		labels = [f"{first.elements[a]}{second.elements[b]}" for a, b in pairs]
		if len(set(labels)) != len(labels):
			labels = [f"{first.elements[a]}.{second.elements[b]}" for a, b in pairs]
		table = np.zeros((len(pairs), len(pairs)), dtype=np.int64)
		for i, (a1, b1) in enumerate(pairs):
			for j, (a2, b2) in enumerate(pairs):
				table[i, j] = first.table[a1, a2] * second.order + second.table[b1, b2]
		return FiniteGroup(tuple(labels), table)

	def to_dict(self) -> dict:
		return {"elements": list(self.elements), "mult_table": self.table.tolist()}

	@staticmethod
	def from_dict(data: dict) -> FiniteGroup:
		return FiniteGroup(tuple(data["elements"]), np.array(data["mult_table"], dtype=np.int64))


# ========
# Fusion rings
# ========

@dataclass(frozen=True, eq=False)
class FusionRing:
	"""
	A based fusion ring.  N[x][y][z] is the multiplicity of z in x*y.
	"""
	labels: tuple[str, ...]
	N: np.ndarray
	unit: int = 0
	dual: tuple[int, ...] = field(default=None)

	def __post_init__(self):
		object.__setattr__(self, "labels", tuple(self.labels))
		rank = len(self.labels)
		if rank == 0:
			raise DegenerateRing("A fusion ring needs at least one simple object.")
		if len(set(self.labels)) != rank:
			raise DegenerateRing(f"Labels are not unique: {self.labels}")

		try:
			tensor = np.asarray(self.N, dtype=np.float64)
		except (TypeError, ValueError) as ex:
			raise DegenerateRing(f"Fusion tensor is not a rank x rank x rank array of numbers: {ex}") from ex
		if tensor.shape != (rank, rank, rank):
			raise DegenerateRing(f"Fusion tensor has shape {tensor.shape}, expected {(rank, rank, rank)}.")
		if not np.all(np.equal(np.mod(tensor, 1), 0)) or tensor.min() < 0:
			raise DegenerateRing("Fusion coefficients must be nonnegative integers.")
		object.__setattr__(self, "N", _readonly(tensor.astype(np.int64)))

		if not 0 <= int(self.unit) < rank:
			raise DegenerateRing(f"Unit index {self.unit} is out of range for rank {rank}.")
		object.__setattr__(self, "unit", int(self.unit))

		dual = self.dual
		if dual is None:
			dual = dual_from_tensor(self.N, self.unit)
		dual = tuple(int(each) for each in dual)
		if len(dual) != rank or any(not 0 <= each < rank for each in dual):
			raise DegenerateRing(f"Duality map {dual} is not a map on {rank} labels.")
		object.__setattr__(self, "dual", dual)

	@property
	def rank(self) -> int:
		return len(self.labels)

	def index(self, label: str) -> int:
		try:
			return self.labels.index(label)
		except ValueError as ex:
			raise MalformedInput(f"Unknown label '{label}'.  Known labels: {', '.join(self.labels)}") from ex

	def fusion(self, x: str, y: str) -> dict[str, int]:
		"""
		The decomposition of x*y as {label: multiplicity}.
		"""
		row = self.N[self.index(x), self.index(y)]
		return {self.labels[z]: int(row[z]) for z in np.flatnonzero(row)}

	def multiplicity_vector(self, indices) -> np.ndarray:
		"""
		Multiplicities of the simples in the ordered product of 'indices'.  The empty product is the unit.
		"""
		vector = np.zeros(self.rank, dtype=np.int64)
		vector[self.unit] = 1
		for x in indices:
			vector = vector @ self.N[:, x, :]
		return vector

	def __eq__(self, other):
		if not isinstance(other, FusionRing):
			return NotImplemented
		return (self.labels == other.labels and self.unit == other.unit and self.dual == other.dual
		        and np.array_equal(self.N, other.N))

	__hash__ = None

	def to_document(self) -> dict:
		return documents.new_document("fusion_ring",
		                              labels=list(self.labels),
		                              unit=self.unit,
		                              dual=list(self.dual),
		                              N=self.N.tolist())

	@staticmethod
	def from_document(document: dict) -> FusionRing:
		document = documents.validate_document(document, "fusion_ring")
		return FusionRing(tuple(document["labels"]), np.array(document["N"], dtype=np.int64),
		                  document["unit"], tuple(document["dual"]))


def dual_from_tensor(N: np.ndarray, unit: int) -> tuple[int, ...]:
	"""
	Read the duality map off the unit column.  A simple without a unique dual takes its first candidate,
	or itself when there is none; verify_fusion_ring then reports the rigidity violation.
	"""
	duals = []
	for x in range(N.shape[0]):
		candidates = np.flatnonzero(N[x, :, unit])
		duals.append(int(candidates[0]) if len(candidates) else x)
	return tuple(duals)


def group_ring(factors, labels=None) -> FusionRing:
	"""
	The fusion ring of Vec(Z/n1 x ... x Z/nk).
	"""
	elements = list(itertools.product(*(range(n) for n in factors)))
	position = {element: i for i, element in enumerate(elements)}
	rank = len(elements)
	N = np.zeros((rank, rank, rank), dtype=np.int64)
	for i, a in enumerate(elements):
		for j, b in enumerate(elements):
			total = tuple((x + y) % n for x, y, n in zip(a, b, factors))
			N[i, j, position[total]] = 1
	if labels is None:
		labels = [".".join(str(each) for each in element) or "0" for element in elements]
	return FusionRing(tuple(labels), N, 0)


def product_ring(first: FusionRing, second: FusionRing) -> FusionRing:
	"""
	The fusion ring of a Deligne product; labels are joined with '⊠'.
	"""
	r1, r2 = first.rank, second.rank
	labels = tuple(join_labels(pair) for pair in itertools.product(first.labels, second.labels))
	N = np.einsum('ikm,jln->ijklmn', first.N, second.N).reshape(r1 * r2, r1 * r2, r1 * r2)
	unit = first.unit * r2 + second.unit
	dual = tuple(first.dual[a] * r2 + second.dual[b] for a, b in itertools.product(range(r1), range(r2)))
	return FusionRing(labels, N, unit, dual)


def ring_power(ring: FusionRing, n: int) -> FusionRing:
	if n < 1:
		raise MalformedInput(f"Ring powers start at 1, not {n}.")
	result = ring
	for _ in range(n - 1):
		result = product_ring(result, ring)
	return result


def verify_fusion_ring(ring: FusionRing) -> list[Violation]:
	"""
	Check the unit law, associativity, rigidity normalization and the dual involution.
	Returns an empty list iff all of them hold.
	"""
	N, unit, rank = ring.N, ring.unit, ring.rank
	identity = np.eye(rank, dtype=np.int64)
	violations = []

	for y, z in np.argwhere(N[unit] != identity):
		violations.append(Violation("unit", (unit, y, z), f"N[unit][{y}][{z}] = {N[unit, y, z]}, expected {identity[y, z]}"))
	for x, z in np.argwhere(N[:, unit, :] != identity):
		violations.append(Violation("unit", (x, unit, z), f"N[{x}][unit][{z}] = {N[x, unit, z]}, expected {identity[x, z]}"))

	violations.extend(_associativity_violations(N))

	for x in range(rank):
		for y in range(rank):
			expected = 1 if y == ring.dual[x] else 0
			if N[x, y, unit] != expected:
				violations.append(Violation("rigidity", (x, y, unit),
				                            f"N[{x}][{y}][unit] = {N[x, y, unit]}, expected {expected} (dual of {x} is {ring.dual[x]})"))
		if ring.dual[ring.dual[x]] != x:
			violations.append(Violation("dual", (x,), f"dual(dual({x})) = {ring.dual[ring.dual[x]]}"))

	return violations[:MAX_REPORTED_VIOLATIONS] if len(violations) > MAX_REPORTED_VIOLATIONS else violations


def _associativity_block(N: np.ndarray, a: int) -> np.ndarray:
	"""
	For fixed a, returns (ab)c - a(bc) as a [b, c, d] array.
	"""
	rank = N.shape[0]
	floats = N.astype(np.float64)  # exact below 2**53, and dispatches to BLAS
	left = (floats[a] @ floats.reshape(rank, rank * rank)).reshape(rank, rank, rank)
	right = (floats.reshape(rank * rank, rank) @ floats[a]).reshape(rank, rank, rank)
	return np.rint(left - right).astype(np.int64)


def _associativity_violations(N: np.ndarray) -> list[Violation]:
	rank = N.shape[0]
	threads = fusionforge.get_config_data().threads
	with ThreadPoolExecutor(max_workers=threads) as executor:
		blocks = list(executor.map(lambda a: _associativity_block(N, a), range(rank)))

	violations = []
	for a, block in enumerate(blocks):
		for b, c, d in np.argwhere(block != 0):
			violations.append(Violation("associativity", (a, b, c, d),
			                            f"sum_m N[{a}][{b}][m]N[m][{c}][{d}] - sum_m N[{b}][{c}][m]N[{a}][m][{d}] = {block[b, c, d]}"))
			if len(violations) >= MAX_REPORTED_VIOLATIONS:
				return violations
	return violations


def fp_dims(ring: FusionRing, tolerance: float | None = None, max_iterations: int | None = None) -> np.ndarray:
	"""
	Frobenius-Perron dimensions, by power iteration on the sum of the left multiplication matrices.
	"""
	config = fusionforge.get_config_data()
	tolerance = tolerance or config.fp_tolerance
	max_iterations = max_iterations or config.fp_max_iterations

	matrix = ring.N.sum(axis=0).astype(np.float64)  # [y, z] = sum_x N[x][y][z]
	vector = np.ones(ring.rank)
	for _ in range(max_iterations):
		updated = matrix @ vector
		updated /= updated[ring.unit]
		if np.max(np.abs(updated - vector)) < tolerance:
			vector = updated
			break
		vector = updated
	else:
		raise NonConvergence(f"fp_dims: power iteration did not reach {tolerance:g} within {max_iterations} iterations.")

	products = np.einsum('x,y->xy', vector, vector)
	residual = np.max(np.abs(products - ring.N.astype(np.float64) @ vector))
	if residual > 1e-9 * max(1.0, float(np.max(products))):
		raise NonConvergence(f"fp_dims: d[x]d[y] = sum_z N[x][y][z]d[z] holds only to {residual:g}.")
	return vector


# ========
# Graded fusion rings
# ========

@dataclass(frozen=True, eq=False)
class GradedFusionRing:
	"""
	A G-graded fusion ring.  Simples are pairs (g, x) listed sector by sector in group order.
	"""
	group: FiniteGroup
	sectors: dict[str, tuple[str, ...]]
	N: np.ndarray
	unit: int
	fusion_dims: np.ndarray
	dual: tuple[int, ...] = field(default=None)

	def __post_init__(self):
		missing = [g for g in self.group.elements if g not in self.sectors]
		extra = [g for g in self.sectors if str(g) not in self.group.elements]
		if missing or extra:
			raise DegenerateRing(f"Sectors must be indexed by the group elements; missing {missing}, unknown {extra}.")
		sectors = {str(g): tuple(self.sectors[g]) for g in self.group.elements}
		object.__setattr__(self, "sectors", sectors)
		rank = sum(len(labels) for labels in sectors.values())
		try:
			tensor = np.asarray(self.N, dtype=np.int64)
			fusion_dims = np.asarray(self.fusion_dims, dtype=np.float64)
		except (TypeError, ValueError) as ex:
			raise DegenerateRing(f"Graded fusion tensor or fusion dimensions are not numeric arrays: {ex}") from ex
		if tensor.shape != (rank, rank, rank):
			raise DegenerateRing(f"Graded fusion tensor has shape {tensor.shape}, expected {(rank, rank, rank)}.")
		if fusion_dims.shape != (rank,):
			raise DegenerateRing(f"Expected {rank} fusion dimensions, got shape {fusion_dims.shape}.")
		if not 0 <= int(self.unit) < rank:
			raise DegenerateRing(f"Unit index {self.unit} is out of range for rank {rank}.")
		object.__setattr__(self, "unit", int(self.unit))
		object.__setattr__(self, "N", _readonly(tensor))
		object.__setattr__(self, "fusion_dims", _readonly(fusion_dims))
		if self.dual is None:
			object.__setattr__(self, "dual", dual_from_tensor(self.N, self.unit))
		elif len(self.dual) != rank or any(not 0 <= int(each) < rank for each in self.dual):
			raise DegenerateRing(f"Duality map {list(self.dual)} is not a map on {rank} simples.")

	@cached_property
	def simples(self) -> list[tuple[str, str]]:
		return [(g, x) for g in self.group.elements for x in self.sectors[g]]

	@cached_property
	def offsets(self) -> dict[str, int]:
		result, position = {}, 0
		for g in self.group.elements:
			result[g] = position
			position += len(self.sectors[g])
		return result

	@property
	def rank(self) -> int:
		return len(self.simples)

	def index(self, g: str, x: str) -> int:
		try:
			return self.offsets[str(g)] + self.sectors[str(g)].index(x)
		except (KeyError, ValueError) as ex:
			raise MalformedInput(f"No simple ({g},{x}) in this graded ring.") from ex

	def coefficient(self, first: tuple[str, str], second: tuple[str, str], target: tuple[str, str]) -> int:
		return int(self.N[self.index(*first), self.index(*second), self.index(*target)])

	def product(self, first: tuple[str, str], second: tuple[str, str]) -> dict[tuple[str, str], int]:
		row = self.N[self.index(*first), self.index(*second)]
		return {self.simples[z]: int(row[z]) for z in np.flatnonzero(row)}

	def block(self, g: str, h: str) -> np.ndarray:
		"""
		The [x, y, z] block of N for x in sector g, y in sector h, z in sector gh.
		"""
		k = self.group.elements[self.group.multiply(self.group.index(g), self.group.index(h))]
		rows = slice(self.offsets[g], self.offsets[g] + len(self.sectors[g]))
		cols = slice(self.offsets[h], self.offsets[h] + len(self.sectors[h]))
		targets = slice(self.offsets[k], self.offsets[k] + len(self.sectors[k]))
		return self.N[rows, cols, targets]

	@cached_property
	def ring(self) -> FusionRing:
		"""
		The ungraded fusion ring, labels written '(g,x)'.
		"""
		return FusionRing(tuple(f"({g},{x})" for g, x in self.simples), self.N, self.unit, self.dual)

	@cached_property
	def fp_dims(self) -> np.ndarray:
		return fp_dims(self.ring)

	def __eq__(self, other):
		if not isinstance(other, GradedFusionRing):
			return NotImplemented
		return (self.group == other.group and self.sectors == other.sectors and self.unit == other.unit
		        and np.array_equal(self.N, other.N) and np.allclose(self.fusion_dims, other.fusion_dims))

	__hash__ = None

	@staticmethod
	def from_blocks(group: FiniteGroup, sectors: dict, blocks: dict, fusion_dims, unit: tuple[str, str]) -> GradedFusionRing:
		"""
		Assemble the flat tensor from blocks[(g, h)] of shape (|g|, |h|, |gh|).
		"""
		offsets, position = {}, 0
		for g in group.elements:
			offsets[g] = position
			position += len(sectors[g])
		N = np.zeros((position, position, position), dtype=np.int64)
		for (g, h), block in blocks.items():
			k = group.elements[group.multiply(group.index(g), group.index(h))]
			N[offsets[g]:offsets[g] + len(sectors[g]),
			  offsets[h]:offsets[h] + len(sectors[h]),
			  offsets[k]:offsets[k] + len(sectors[k])] = block
		unit_index = offsets[unit[0]] + list(sectors[unit[0]]).index(unit[1])
		return GradedFusionRing(group, sectors, N, unit_index, fusion_dims)

	def to_document(self) -> dict:
		nonzero = np.argwhere(self.N)
		return documents.new_document("graded_fusion_ring",
		                              group=self.group.to_dict(),
		                              sectors=[{"element": g, "labels": list(self.sectors[g])} for g in self.group.elements],
		                              unit=self.unit,
		                              dual=list(self.dual),
		                              N=[[int(i), int(j), int(k), int(self.N[i, j, k])] for i, j, k in nonzero],
		                              fp_dims=[float(each) for each in self.fp_dims],
		                              fusion_dims=[float(each) for each in self.fusion_dims])

	@staticmethod
	def from_document(document: dict) -> GradedFusionRing:
		document = documents.validate_document(document, "graded_fusion_ring")
		group = FiniteGroup.from_dict(document["group"])
		sectors = {entry["element"]: tuple(entry["labels"]) for entry in document["sectors"]}
		if len(sectors) != len(document["sectors"]):
			raise MalformedInput("A sector is listed more than once.")
		rank = sum(len(labels) for labels in sectors.values())
		N = np.zeros((rank, rank, rank), dtype=np.int64)
		for i, j, k, multiplicity in document["N"]:
			if max(i, j, k) >= rank:
				raise MalformedInput(f"Entry N[{i}][{j}][{k}] is out of range for {rank} simples.")
			N[i, j, k] = multiplicity
		return GradedFusionRing(group, sectors, N, document["unit"], np.array(document["fusion_dims"]), tuple(document["dual"]))


def verify_graded_ring(ring: GradedFusionRing, tolerance: float = 1e-6) -> list[Violation]:
	"""
	Everything verify_fusion_ring checks, plus the grading and the fusion-dimension conditions.
	"""
	violations = verify_fusion_ring(ring.ring)
	group = ring.group

	grades = np.array([group.index(g) for g, _ in ring.simples])
	expected = group.table[grades[:, None], grades[None, :]]  # [x, y] -> index of gh
	for x, y, z in np.argwhere(ring.N):
		if grades[z] != expected[x, y]:
			violations.append(Violation("grading", (x, y, z),
			                            f"N[{x}][{y}][{z}] = {ring.N[x, y, z]} but {ring.simples[z]} is not in sector "
			                            f"{group.elements[expected[x, y]]}"))

	dims = ring.fusion_dims
	if abs(dims[ring.unit] - 1.0) > tolerance:
		violations.append(Violation("fusion_dims", (ring.unit,), f"d+ of the unit is {dims[ring.unit]}, expected 1"))
	for x in range(ring.rank):
		x_bar = ring.dual[x]
		if grades[x_bar] != group.inverse(int(grades[x])):
			violations.append(Violation("grading", (x, x_bar), f"dual of {ring.simples[x]} is {ring.simples[x_bar]}, outside the inverse sector"))
		if dims[x] <= 0 or abs(dims[x] - dims[x_bar]) > tolerance * max(1.0, dims[x]):
			violations.append(Violation("fusion_dims", (x, x_bar), f"d+ {dims[x]} of {ring.simples[x]} vs {dims[x_bar]} of its dual"))

	return violations


def dplus_residual(ring: GradedFusionRing) -> float:
	"""
	max over x, y of |sum_z N[x][y][z] d+[z] - d+[x] d+[y]| / (d+[x] d+[y]).
	"""
	dims = ring.fusion_dims
	products = np.einsum('x,y->xy', dims, dims)
	return float(np.max(np.abs(ring.N.astype(np.float64) @ dims - products) / products))
