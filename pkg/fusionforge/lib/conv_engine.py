""" fusionforge/lib/conv_engine.py """

from __future__ import annotations

# Standard Library
from concurrent.futures import ThreadPoolExecutor
import contextvars
from dataclasses import dataclass, field
from functools import cmp_to_key
import itertools

# Third Party
import numpy as np

# Package
import fusionforge
from fusionforge.lib import documents
from fusionforge.lib.core_ring import FiniteGroup, GradedFusionRing, Violation, verify_graded_ring
from fusionforge.lib.exceptions import MalformedInput, NoDual, NotAFusionRing, NotIntegral, NotSemisimple, SelfConsistency
from fusionforge.lib.utils import Stopwatch

SORT_TOLERANCE = 1e-7


def _complex_readonly(array) -> np.ndarray:
	array = np.array(array, dtype=np.complex128)
	array.setflags(write=False)
	return array


@dataclass(frozen=True, eq=False)
class GradedAlgebraSpec:
	"""
	Structure constants of End(I(1)) = (+)_g V_g:
	    conv[g][i, j, k]       coefficient of b_k in b_i * b_j        (b in V_g)
	    comp[(g, h)][i, j, k]  coefficient of c_k in a_i o b_j        (a in V_g, b in V_h, c in V_gh)
	"""
	group: FiniteGroup
	dims: dict[str, int]
	conv: dict[str, np.ndarray]
	comp: dict[tuple[str, str], np.ndarray]

	def __post_init__(self):
		elements = self.group.elements
		dims = {g: int(self.dims[g]) for g in elements}
		conv, comp = {}, {}
		for g in elements:
			n = dims[g]
			if g not in self.conv:
				raise MalformedInput(f"Missing convolution constants for sector '{g}'.")
			conv[g] = _complex_readonly(self.conv[g])
			if conv[g].shape != (n, n, n):
				raise MalformedInput(f"conv['{g}'] has shape {conv[g].shape}, expected {(n, n, n)}.")
		for g, h in itertools.product(elements, repeat=2):
			k = self.product_sector(g, h)
			shape = (dims[g], dims[h], dims[k])
			comp[(g, h)] = _complex_readonly(self.comp[(g, h)]) if (g, h) in self.comp else _complex_readonly(np.zeros(shape))
			if comp[(g, h)].shape != shape:
				raise MalformedInput(f"comp[('{g}', '{h}')] has shape {comp[(g, h)].shape}, expected {shape}.")
		object.__setattr__(self, "dims", dims)
		object.__setattr__(self, "conv", conv)
		object.__setattr__(self, "comp", comp)

	@property
	def identity(self) -> str:
		return self.group.elements[self.group.identity]

	def product_sector(self, g: str, h: str) -> str:
		return self.group.elements[self.group.multiply(self.group.index(g), self.group.index(h))]

	def inverse_sector(self, g: str) -> str:
		return self.group.elements[self.group.inverse(self.group.index(g))]

	def convolve(self, g: str, x: np.ndarray, y: np.ndarray) -> np.ndarray:
		return np.einsum('i,j,ijk->k', x, y, self.conv[g])

	def compose(self, g: str, h: str, x: np.ndarray, y: np.ndarray) -> np.ndarray:
		return np.einsum('i,j,ijk->k', x, y, self.comp[(g, h)])

	def multiplication_operator(self, g: str, v: np.ndarray) -> np.ndarray:
		"""
		The matrix of x -> v * x on V_g.
		"""
		return np.einsum('i,ijk->kj', v, self.conv[g])

	def convolution_unit(self, g: str, tolerance: float = 1e-8) -> np.ndarray:
		"""
		The u in V_g with u * x = x for every x, by least squares.
		"""
		n = self.dims[g]
		system = self.conv[g].transpose(1, 2, 0).reshape(n * n, n)  # rows (j, k), columns i
		target = np.eye(n).reshape(n * n)
		unit, *_ = np.linalg.lstsq(system, target, rcond=None)
		residual = np.max(np.abs(system @ unit - target))
		if residual > tolerance * max(1.0, np.max(np.abs(unit))):
			raise NotSemisimple(f"sector '{g}': the convolution has no unit (least-squares residual {residual:g}).")
		return unit

	def composition_unit(self, tolerance: float = 1e-8) -> np.ndarray:
		e = self.identity
		n = self.dims[e]
		system = self.comp[(e, e)].transpose(1, 2, 0).reshape(n * n, n)
		target = np.eye(n).reshape(n * n)
		unit, *_ = np.linalg.lstsq(system, target, rcond=None)
		if np.max(np.abs(system @ unit - target)) > tolerance * max(1.0, np.max(np.abs(unit))):
			raise SelfConsistency("V_e has no unit for the composition product.")
		return unit

	def check_invariants(self, tolerance: float = 1e-8) -> list[Violation]:
		"""
		Commutativity and associativity of *, associativity of o, and the two units.
		"""
		violations = []
		for g in self.group.elements:
			conv = self.conv[g]
			scale = max(1.0, float(np.max(np.abs(conv))))
			if np.max(np.abs(conv - conv.transpose(1, 0, 2)), initial=0) > tolerance * scale:
				violations.append(Violation("conv-commutative", (self.group.index(g),), f"sector '{g}'"))
			left = np.einsum('ijm,mkl->ijkl', conv, conv)
			right = np.einsum('jkm,iml->ijkl', conv, conv)
			if np.max(np.abs(left - right), initial=0) > tolerance * scale ** 2:
				violations.append(Violation("conv-associative", (self.group.index(g),), f"sector '{g}'"))
			try:
				self.convolution_unit(g, tolerance)
			except NotSemisimple as ex:
				violations.append(Violation("conv-unit", (self.group.index(g),), str(ex)))

		for g, h, k in itertools.product(self.group.elements, repeat=3):
			gh, hk = self.product_sector(g, h), self.product_sector(h, k)
			left = np.einsum('ijm,mkl->ijkl', self.comp[(g, h)], self.comp[(gh, k)])
			right = np.einsum('jkm,iml->ijkl', self.comp[(h, k)], self.comp[(g, hk)])
			if np.max(np.abs(left - right), initial=0) > tolerance * max(1.0, float(np.max(np.abs(left), initial=0))):
				indices = tuple(self.group.index(each) for each in (g, h, k))
				violations.append(Violation("comp-associative", indices, f"sectors ('{g}', '{h}', '{k}')"))
		try:
			self.composition_unit(tolerance)
		except SelfConsistency as ex:
			violations.append(Violation("comp-unit", (self.group.identity,), str(ex)))
		return violations

	def to_document(self, threshold: float = 1e-15) -> dict:
		def sparse(array):
			return [[int(i), int(j), int(k), float(array[i, j, k].real), float(array[i, j, k].imag)]
			        for i, j, k in np.argwhere(np.abs(array) > threshold)]

		return documents.new_document("graded_algebra_spec",
		                              group=self.group.to_dict(),
		                              sectors=[{"element": g, "dim": self.dims[g]} for g in self.group.elements],
		                              conv=[{"g": g, "entries": sparse(self.conv[g])} for g in self.group.elements],
		                              comp=[{"g": g, "h": h, "entries": sparse(self.comp[(g, h)])}
		                                    for g, h in itertools.product(self.group.elements, repeat=2)])

	@staticmethod
	def from_document(document: dict) -> GradedAlgebraSpec:
		document = documents.validate_document(document, "graded_algebra_spec")
		group = FiniteGroup.from_dict(document["group"])
		dims = {entry["element"]: entry["dim"] for entry in document["sectors"]}

		def dense(entry, shape):
			if "dense" in entry:
				return np.array([[[documents.from_pair(z) for z in row] for row in plane] for plane in entry["dense"]])
			array = np.zeros(shape, dtype=np.complex128)
			for i, j, k, real, imag in entry["entries"]:
				array[int(i), int(j), int(k)] = complex(real, imag)
			return array

		product = lambda g, h: group.elements[group.multiply(group.index(g), group.index(h))]
		conv = {entry["g"]: dense(entry, (dims[entry["g"]],) * 3) for entry in document["conv"]}
		comp = {(entry["g"], entry["h"]): dense(entry, (dims[entry["g"]], dims[entry["h"]], dims[product(entry["g"], entry["h"])]))
		        for entry in document["comp"]}
		return GradedAlgebraSpec(group, dims, conv, comp)


@dataclass
class IdempotentBasis:
	"""
	Minimal convolution idempotents per sector, in the coordinates of V_g.
	"""
	vectors: dict[str, list[np.ndarray]]
	provenance: str = "extracted"  # or "closed-form"
	labels: dict[str, list[str]] | None = None

	def residual(self, spec: GradedAlgebraSpec) -> float:
		"""
		max over sectors of |e*e' - delta e|, and of |sum e - unit|.
		"""
		worst = 0.0
		for g, vectors in self.vectors.items():
			E = np.array(vectors, dtype=np.complex128)
			products = np.einsum('xi,yj,ijk->xyk', E, E, spec.conv[g])
			expected = np.einsum('xy,xk->xyk', np.eye(len(E)), E)
			worst = max(worst, float(np.max(np.abs(products - expected))))
			worst = max(worst, float(np.max(np.abs(E.sum(axis=0) - spec.convolution_unit(g)))))
		return worst


@dataclass(eq=False)
class RecoveryOutput:
	graded: GradedFusionRing
	C: np.ndarray  # raw C^z_{xy}, flat indices
	dplus: np.ndarray
	idempotents: IdempotentBasis = field(repr=False, default=None)

	def __eq__(self, other):
		# idempotents are not serialized
		if not isinstance(other, RecoveryOutput):
			return NotImplemented
		return (self.graded == other.graded and self.C.shape == other.C.shape
		        and np.allclose(self.C, other.C, rtol=0.0, atol=1e-12) and np.allclose(self.dplus, other.dplus))

	__hash__ = None

	def to_document(self, threshold: float = 1e-12) -> dict:
		entries = [[int(i), int(j), int(k), float(self.C[i, j, k].real), float(self.C[i, j, k].imag)]
		           for i, j, k in np.argwhere(np.abs(self.C) > threshold)]
		graded = self.graded.to_document()
		return documents.new_document("recovery_output",
		                              graded=graded,
		                              C=entries,
		                              dplus=[float(each) for each in self.dplus])

	@staticmethod
	def from_document(document: dict) -> RecoveryOutput:
		document = documents.validate_document(document, "recovery_output")
		graded = GradedFusionRing.from_document(document["graded"])
		rank = graded.rank
		C = np.zeros((rank, rank, rank), dtype=np.complex128)
		for i, j, k, real, imag in document["C"]:
			if not all(isinstance(each, int) and 0 <= each < rank for each in (i, j, k)):
				raise MalformedInput(f"Entry C[{i}][{j}][{k}] is not an index triple for {rank} simples.")
			C[i, j, k] = complex(real, imag)
		dplus = np.array(document["dplus"], dtype=np.float64)
		if dplus.shape != (rank,):
			raise MalformedInput(f"Expected {rank} values of d+, got {len(dplus)}.")
		return RecoveryOutput(graded, C, dplus)


# ========
# Step 3: minimal idempotents
# ========

def _cluster(eigenvalues: np.ndarray, gap: float) -> list[list[int]]:
	scale = float(np.max(np.abs(eigenvalues))) or 1.0
	clusters: list[list[int]] = []
	for i, value in enumerate(eigenvalues):
		for cluster in clusters:
			if any(abs(value - eigenvalues[j]) <= gap * scale for j in cluster):
				cluster.append(i)
				break
		else:
			clusters.append([i])
	return clusters


def _compare_vectors(first: np.ndarray, second: np.ndarray) -> int:
	for a, b in zip(first, second):
		for x, y in ((a.real, b.real), (a.imag, b.imag)):
			if abs(x - y) > SORT_TOLERANCE:
				return -1 if x < y else 1
	return 0


def canonical_order(vectors) -> list[np.ndarray]:
	return sorted(vectors, key=cmp_to_key(_compare_vectors))


def extract_idempotents(spec: GradedAlgebraSpec, g: str, rng: np.random.Generator | None = None) -> list[np.ndarray]:
	"""
	A complete set of minimal idempotents of (V_g, *): spectral projectors of a random element's
	multiplication operator, applied to the unit.
	"""
	config = fusionforge.get_config_data()
	logger = fusionforge.get_logger()
	rng = rng if rng is not None else np.random.default_rng(config.seed)
	n = spec.dims[g]
	unit = spec.convolution_unit(g)
	if n == 1:
		return [unit]

	for attempt in range(config.extraction_retries):
		v = rng.standard_normal(n)
		eigenvalues, eigenvectors = np.linalg.eig(spec.multiplication_operator(g, v))
		clusters = _cluster(eigenvalues, config.eigen_gap)
		if any(len(cluster) > 1 for cluster in clusters):
			logger.debug(f"extract_idempotents: sector '{g}' attempt {attempt} had a repeated eigenvalue; retrying.")
			continue
		try:
			inverse = np.linalg.inv(eigenvectors)
		except np.linalg.LinAlgError:
			logger.debug(f"extract_idempotents: sector '{g}' attempt {attempt} has a singular eigenbasis; retrying.")
			continue

		idempotents = [eigenvectors[:, cluster] @ inverse[cluster, :] @ unit for cluster in clusters]
		worst = max(float(np.max(np.abs(spec.convolve(g, e, e) - e))) / max(1.0, float(np.max(np.abs(e)))) for e in idempotents)
		if worst > 1e-6:
			logger.debug(f"extract_idempotents: sector '{g}' attempt {attempt} gave e*e - e of size {worst:g}; retrying.")
			continue
		return canonical_order(idempotents)

	raise NotSemisimple(f"sector '{g}': no complete set of {n} minimal idempotents after {config.extraction_retries} attempts.")


def _label_against_reference(vectors: list[np.ndarray], reference: list[np.ndarray], g: str) -> list[int]:
	"""
	For each reference vector, the position of the extracted idempotent that equals it.
	"""
	order = []
	for position, wanted in enumerate(reference):
		scale = max(1.0, float(np.max(np.abs(wanted))))
		distances = [float(np.max(np.abs(vector - wanted))) / scale for vector in vectors]
		best = int(np.argmin(distances))
		if distances[best] > 1e-6 or best in order:
			raise SelfConsistency(f"sector '{g}': closed-form idempotent {position} matches no extracted idempotent "
			                      f"(closest distance {distances[best]:g}).")
		order.append(best)
	if len(order) != len(vectors):
		raise SelfConsistency(f"sector '{g}': {len(vectors)} idempotents extracted, {len(order)} expected.")
	return order


# ========
# Steps 4 to 6
# ========

def _functionals(spec: GradedAlgebraSpec, g: str, E: np.ndarray) -> np.ndarray:
	"""
	L[i, z] with b_i * e_z = L[i, z] e_z, read at the coordinate of largest modulus of e_z.
	"""
	products = np.tensordot(E, spec.conv[g], axes=([1], [1]))  # [z, i, k] = (b_i * e_z)_k
	pivots = np.argmax(np.abs(E), axis=1)
	return np.array([products[z, :, pivots[z]] / E[z, pivots[z]] for z in range(len(E))]).T


def _composition_coefficients(spec: GradedAlgebraSpec, g: str, h: str, Eg: np.ndarray, Eh: np.ndarray, Egh: np.ndarray, functionals: np.ndarray) -> np.ndarray:
	"""
	C[x, y, z] with (e_x o e_y) * e_z = C[x, y, z] e_z.
	"""
	partial = np.tensordot(Eg, spec.comp[(g, h)], axes=([1], [0]))  # [x, j, k]
	composed = np.tensordot(Eh, partial, axes=([1], [1])).transpose(1, 0, 2)  # [x, y, k]
	return composed @ functionals


def recover_fusion(spec: GradedAlgebraSpec, seed: int | None = None, reference: IdempotentBasis | None = None,
                   tolerance: float | None = None) -> RecoveryOutput:
	"""
	The fusion rules of the extension described by 'spec'.

	With a closed-form 'reference' basis, extracted idempotents are matched to it and take its labels and order.
	Otherwise sectors are ordered by d+ and then by coordinates, and labelled x0, x1, ...
	"""
	config = fusionforge.get_config_data()
	logger = fusionforge.get_logger()
	seed = config.seed if seed is None else seed
	tolerance = tolerance or config.tolerance
	stopwatch = Stopwatch("recover_fusion", logger)
	elements = spec.group.elements

	# Step 3.  One generator per sector, spawned from the run seed, so thread scheduling cannot matter.
	generators = [np.random.default_rng(child) for child in np.random.SeedSequence(seed).spawn(len(elements))]
	with ThreadPoolExecutor(max_workers=config.threads) as executor:
		# Workers run in a copy of this context, so they see the same configuration and logger.
		futures = [executor.submit(contextvars.copy_context().run, extract_idempotents, spec, g, rng) for g, rng in zip(elements, generators)]
		extracted = [future.result() for future in futures]
	vectors = dict(zip(elements, extracted))
	for g in elements:
		if len(vectors[g]) != spec.dims[g]:
			raise NotSemisimple(f"sector '{g}': {len(vectors[g])} idempotents for a {spec.dims[g]}-dimensional sector.")

	labels: dict[str, list[str]] = {}
	if reference is not None:
		for g in elements:
			order = _label_against_reference(vectors[g], reference.vectors[g], g)
			vectors[g] = [vectors[g][i] for i in order]
			labels[g] = list(reference.labels[g]) if reference.labels else [f"x{i}" for i in range(len(order))]
	stopwatch.elapsed("idempotents")

	sizes = [len(vectors[g]) for g in elements]
	offsets = dict(zip(elements, np.cumsum([0] + sizes[:-1]).tolist()))
	rank = sum(sizes)
	matrices = {g: np.array(vectors[g], dtype=np.complex128) for g in elements}
	functionals = {g: _functionals(spec, g, matrices[g]) for g in elements}

	# Step 4.
	C = np.zeros((rank, rank, rank), dtype=np.complex128)

	def fill(pair):
		g, h = pair
		k = spec.product_sector(g, h)
		block = _composition_coefficients(spec, g, h, matrices[g], matrices[h], matrices[k], functionals[k])
		return g, h, k, block

	with ThreadPoolExecutor(max_workers=config.threads) as executor:
		for g, h, k, block in executor.map(fill, list(itertools.product(elements, repeat=2))):
			C[offsets[g]:offsets[g] + len(matrices[g]),
			  offsets[h]:offsets[h] + len(matrices[h]),
			  offsets[k]:offsets[k] + len(matrices[k])] = block

	# The o-unit: the idempotent of V_e acting as the identity under composition.
	e = spec.identity
	basis = np.eye(spec.dims[e])
	unit_errors = [float(np.max(np.abs(np.einsum('i,jik->jk', vector, spec.comp[(e, e)]) - basis)))
	               for vector in vectors[e]]
	unit_local = int(np.argmin(unit_errors))
	if unit_errors[unit_local] > 1e-6:
		raise SelfConsistency(f"no idempotent of V_e acts as the unit for composition (best error {unit_errors[unit_local]:g}).")
	unit = offsets[e] + unit_local

	# Step 5.
	grades = [g for g in elements for _ in vectors[g]]
	dual, dplus = [], np.zeros(rank)
	for x in range(rank):
		inverse = spec.inverse_sector(grades[x])
		lo = offsets[inverse]
		column = C[x, lo:lo + len(vectors[inverse]), unit]
		candidates = np.flatnonzero(np.abs(column) > tolerance)
		if len(candidates) != 1:
			raise NoDual(f"step 5, C^1_(x,y): simple {x} in sector '{grades[x]}' has {len(candidates)} dual candidates in sector '{inverse}'.")
		value = column[candidates[0]]
		if value.real <= 0 or abs(value.imag) > tolerance * max(1.0, abs(value)):
			raise NoDual(f"step 5, C^1_(x,y): C^1 at ({x}, {lo + candidates[0]}) is {value}, not a positive real.")
		dual.append(lo + int(candidates[0]))
		dplus[x] = np.sqrt(value.real)

	if reference is None:
		order = []
		for g in elements:
			local = sorted(range(len(vectors[g])),
			               key=cmp_to_key(lambda a, b, g=g: _compare_sector_entries(dplus, vectors[g], offsets[g], a, b)))
			order.extend(offsets[g] + i for i in local)
			vectors[g] = [vectors[g][i] for i in local]
			labels[g] = [f"x{i}" for i in range(len(local))]
		position = np.argsort(order)
		C = C[np.ix_(order, order, order)]
		dplus = dplus[order]
		dual = [int(position[dual[old]]) for old in order]
		unit = int(position[unit])

	# Step 6.
	scaled = np.abs(C * dplus[None, None, :] / np.einsum('x,y->xy', dplus, dplus)[:, :, None])
	N = np.rint(scaled)
	bad = np.argwhere(np.abs(scaled - N) > tolerance)
	if len(bad):
		x, y, z = (int(each) for each in bad[0])
		raise NotIntegral("N = |C^z_xy d+_z / (d+_x d+_y)|", (x, y, z), float(scaled[x, y, z]), tolerance)

	graded = GradedFusionRing(spec.group, labels, N.astype(np.int64), unit, dplus, tuple(dual))
	violations = verify_graded_ring(graded)
	if violations:
		raise NotAFusionRing(f"recovered ring fails {len(violations)} checks, first: {violations[0]}", violations)
	stopwatch.elapsed("recovery")
	logger.info(f"recover_fusion: rank {rank} over {len(elements)} sectors in {stopwatch.get_elapsed_seconds_total()} s")

	return RecoveryOutput(graded, C, dplus, IdempotentBasis(vectors, "extracted", labels))


def _compare_sector_entries(dplus: np.ndarray, vectors, offset: int, a: int, b: int) -> int:
	difference = dplus[offset + a] - dplus[offset + b]
	if abs(difference) > SORT_TOLERANCE * max(1.0, abs(dplus[offset + a])):
		return -1 if difference < 0 else 1
	return _compare_vectors(vectors[a], vectors[b])


def composition_check(spec: GradedAlgebraSpec, basis: IdempotentBasis, md) -> float:
	"""
	For the trivial-group modular spec: max |e_x o e_y - sum_z (d_x d_y / d_z) N^z_xy e_z|.
	Idempotents are taken in the label order of 'md'.
	"""
	e = spec.identity
	vectors = basis.vectors[e]
	if basis.labels:
		by_label = dict(zip(basis.labels[e], vectors))
		vectors = [by_label[label] for label in md.labels]
	E = np.array(vectors, dtype=np.complex128)
	dims = md.dims
	composed = np.einsum('xi,yj,ijk->xyk', E, E, spec.comp[(e, e)])
	expected = np.einsum('xyz,x,y,z,zk->xyk', md.ring.N.astype(np.complex128), dims, dims, 1 / dims, E, optimize=True)
	return float(np.max(np.abs(composed - expected)))
