""" fusionforge/lib/pointed.py """

from __future__ import annotations

# Standard Library
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
import itertools
import math

# Third Party
import numpy as np

# Package
import fusionforge
from fusionforge.lib import abelian, documents
from fusionforge.lib.abelian import Element
from fusionforge.lib.core_ring import FiniteGroup, GradedFusionRing
from fusionforge.lib.exceptions import DegenerateForm, InvalidAction, MalformedInput, NotIntegral, NotLagrangian, SelfConsistency
from fusionforge.lib.utils import exact_integer_sqrt


def mod_one(value: Fraction) -> Fraction:
	"""
	Reduce a Q/Z exponent into [0, 1).
	"""
	value = Fraction(value)
	return value - (value.numerator // value.denominator)


def phase(exponent: Fraction) -> complex:
	return complex(np.exp(2j * np.pi * float(exponent)))


# ========
# Metric groups
# ========

@dataclass(frozen=True, eq=False)
class MetricGroup:
	"""
	A finite abelian group Z/n_1 x ... x Z/n_k with a nondegenerate quadratic form q, written additively
	as exponents in Q/Z.
	"""
	factors: tuple[int, ...]
	q: dict
	hyperbolic_over: tuple[int, ...] | None = None

	def __post_init__(self):
		factors = tuple(int(n) for n in self.factors)
		if not factors or any(n < 1 for n in factors):
			raise DegenerateForm(f"Cyclic factor orders must be positive integers, not {self.factors}.")
		object.__setattr__(self, "factors", factors)
		q = {tuple(int(x) for x in element): mod_one(value) for element, value in self.q.items()}
		missing = set(abelian.all_elements(factors)) - set(q)
		if missing:
			raise DegenerateForm(f"The quadratic form is not defined on {sorted(missing)[:5]}.")
		object.__setattr__(self, "q", q)
		self._validate()

	def _validate(self):
		origin = abelian.zero(self.factors)
		if self.q[origin] != 0:
			raise DegenerateForm(f"q(0) = {self.q[origin]}, expected 0.")

		# chi is bi-additive iff it is additive in the first argument along each basis vector.
		basis = self.basis
		for a, g in itertools.product(self.elements, repeat=2):
			for e in basis:
				if mod_one(self.chi(self.add(a, e), g) - self.chi(a, g) - self.chi(e, g)) != 0:
					raise DegenerateForm(f"chi is not bi-additive at a={a}, e={e}, g={g}.")
				if mod_one(self.chi(g, self.add(a, e)) - self.chi(g, a) - self.chi(g, e)) != 0:
					raise DegenerateForm(f"chi is not bi-additive at g={g}, a={a}, e={e}.")

		for a in self.elements:
			if a != origin and all(self.chi(a, e) == 0 for e in basis):
				raise DegenerateForm(f"The form is degenerate: chi_{a} is trivial.")

	@cached_property
	def elements(self) -> list[Element]:
		return abelian.all_elements(self.factors)

	@cached_property
	def basis(self) -> list[Element]:
		return [tuple(1 if i == j else 0 for j in range(len(self.factors))) for i in range(len(self.factors))]

	@property
	def order(self) -> int:
		return len(self.elements)

	def add(self, a: Element, b: Element) -> Element:
		return abelian.add(a, b, self.factors)

	def chi(self, a: Element, b: Element) -> Fraction:
		"""
		The bicharacter chi_a(b) = q(a+b) - q(a) - q(b).
		"""
		return mod_one(self.q[self.add(a, b)] - self.q[tuple(a)] - self.q[tuple(b)])

	@staticmethod
	def label(element: Element) -> str:
		return ".".join(str(each) for each in element)

	@staticmethod
	def from_bicharacter(factors, matrix) -> MetricGroup:
		"""
		q(x) = b(x, x) with b(x, y) = sum_ij x_i y_j matrix[i][j].
		"""
		factors = tuple(int(n) for n in factors)
		matrix = [[Fraction(entry) for entry in row] for row in matrix]
		if len(matrix) != len(factors) or any(len(row) != len(factors) for row in matrix):
			raise DegenerateForm(f"The bicharacter needs a {len(factors)}x{len(factors)} matrix.")
		q = {}
		for x in abelian.all_elements(factors):
			q[x] = sum((x[i] * x[j] * matrix[i][j] for i, j in itertools.product(range(len(factors)), repeat=2)), Fraction(0))
		return MetricGroup(factors, q)


def hyperbolic(factors) -> MetricGroup:
	"""
	Â x A with q(phi, a) = phi(a).  Elements are (phi_1..phi_k, a_1..a_k).
	"""
	factors = tuple(int(n) for n in factors)
	k = len(factors)
	q = {}
	for element in abelian.all_elements(factors + factors):
		q[element] = sum((Fraction(element[i] * element[k + i], n) for i, n in enumerate(factors)), Fraction(0))
	return MetricGroup(factors + factors, q, hyperbolic_over=factors)


# ========
# Lagrangian subgroups
# ========

@dataclass(frozen=True, eq=False)
class LagrangianSubgroup:
	metric_group: MetricGroup
	elements: tuple[Element, ...]
	generators: tuple[Element, ...] = field(default=())

	def __post_init__(self):
		B = self.metric_group
		elements = tuple(sorted({tuple(int(x) % n for x, n in zip(element, B.factors)) for element in self.elements}))
		object.__setattr__(self, "elements", elements)
		members = set(elements)
		if abelian.zero(B.factors) not in members:
			raise NotLagrangian("A Lagrangian subgroup must contain 0.")
		for a, b in itertools.product(elements, repeat=2):
			if B.add(a, b) not in members:
				raise NotLagrangian(f"Not closed under addition: {a} + {b} = {B.add(a, b)}.")
		if len(elements) ** 2 != B.order:
			raise NotLagrangian(f"|L|^2 = {len(elements) ** 2}, but |B| = {B.order}.")
		for a in elements:
			if B.q[a] != 0:
				raise NotLagrangian(f"q does not vanish on L: q({a}) = {B.q[a]}.")
		if not self.generators:
			object.__setattr__(self, "generators", abelian.decompose(elements, B.factors).generators)

	@property
	def order(self) -> int:
		return len(self.elements)

	def __contains__(self, element) -> bool:
		return tuple(element) in self.elements


def lagrangian_from_elements(B: MetricGroup, elements) -> LagrangianSubgroup:
	return LagrangianSubgroup(B, tuple(tuple(element) for element in elements))


def lagrangian_from_pair(B: MetricGroup, H, b=None) -> LagrangianSubgroup:
	"""
	L_{H,b} = {(phi, h) : phi restricted to H equals b(h, -)}, for B hyperbolic over A.

	'H' lists generators of a subgroup of A; 'b' is the matrix of an alternating bicharacter on those
	generators (b(h_i, h_j) = b[i][j] in Q/Z).  A missing 'b' means the trivial bicharacter.
	"""
	if B.hyperbolic_over is None:
		raise NotLagrangian("lagrangian_from_pair needs a hyperbolic metric group.")
	factors = B.hyperbolic_over
	generators = [tuple(int(x) % n for x, n in zip(h, factors)) for h in H] or [abelian.zero(factors)]
	b = [[Fraction(entry) for entry in row] for row in b] if b else [[Fraction(0)] * len(generators) for _ in generators]
	if len(b) != len(generators) or any(len(row) != len(generators) for row in b):
		raise NotLagrangian(f"b needs a {len(generators)}x{len(generators)} matrix for {len(generators)} generators of H.")

	# Each element of H with a coordinate vector over the generators; b(h, h_j) must not depend on the choice.
	orders = [abelian.element_order(h, factors) for h in generators]
	pairing: dict[Element, tuple[Fraction, ...]] = {}
	for coefficients in itertools.product(*(range(order) for order in orders)):
		h = abelian.zero(factors)
		for c, generator in zip(coefficients, generators):
			h = abelian.add(h, abelian.scale(generator, c, factors), factors)
		values = tuple(mod_one(sum((c * b[i][j] for i, c in enumerate(coefficients)), Fraction(0))) for j in range(len(generators)))
		if pairing.setdefault(h, values) != values:
			raise NotLagrangian(f"b is not well defined on H: two words for {h} pair differently.")

	elements = []
	for phi in abelian.all_elements(factors):
		evaluations = tuple(mod_one(sum((Fraction(p * x, n) for p, x, n in zip(phi, k, factors)), Fraction(0))) for k in generators)
		for h, values in pairing.items():
			if evaluations == values:
				elements.append(phi + h)
	return LagrangianSubgroup(B, tuple(elements))


# ========
# Orthogonal actions
# ========

@dataclass(frozen=True, eq=False)
class OrthogonalAction:
	"""
	pi: G -> O(B, q) as integer matrices acting on column vectors, and a normalized 2-cocycle omega: G x G -> B.
	"""
	metric_group: MetricGroup
	group: FiniteGroup
	pi: dict
	omega: dict = field(default_factory=dict)

	def __post_init__(self):
		B, G = self.metric_group, self.group
		k = len(B.factors)
		pi = {}
		for g in G.elements:
			if g not in self.pi:
				raise InvalidAction(f"No matrix for group element '{g}'.")
			matrix = tuple(tuple(int(entry) for entry in row) for row in self.pi[g])
			if len(matrix) != k or any(len(row) != k for row in matrix):
				raise InvalidAction(f"pi('{g}') must be a {k}x{k} integer matrix.")
			for i, j in itertools.product(range(k), repeat=2):
				if (matrix[i][j] * B.factors[j]) % B.factors[i]:
					raise InvalidAction(f"pi('{g}') is not well defined modulo the factor orders at entry ({i}, {j}).")
			pi[g] = matrix
		object.__setattr__(self, "pi", pi)
		origin = abelian.zero(B.factors)
		omega = {(g, h): tuple(int(x) % n for x, n in zip(self.omega.get((g, h), origin), B.factors))
		         for g, h in itertools.product(G.elements, repeat=2)}
		object.__setattr__(self, "omega", omega)
		self._validate()

	def apply(self, g: str, a: Element) -> Element:
		matrix = self.pi[g]
		return tuple(sum(entry * x for entry, x in zip(row, a)) % n for row, n in zip(matrix, self.metric_group.factors))

	def multiply(self, g: str, h: str) -> str:
		return self.group.elements[self.group.multiply(self.group.index(g), self.group.index(h))]

	def inverse(self, g: str) -> str:
		return self.group.elements[self.group.inverse(self.group.index(g))]

	def _validate(self):
		B, G = self.metric_group, self.group
		e = G.elements[G.identity]
		for g in G.elements:
			for a in B.elements:
				if B.q[self.apply(g, a)] != B.q[a]:
					raise InvalidAction(f"pi('{g}') does not preserve q at {a}.")
		for a in B.basis:
			if self.apply(e, a) != a:
				raise InvalidAction("pi(e) is not the identity.")
			for g, h in itertools.product(G.elements, repeat=2):
				if self.apply(self.multiply(g, h), a) != self.apply(g, self.apply(h, a)):
					raise InvalidAction(f"pi is not a homomorphism at ('{g}', '{h}').")

		origin = abelian.zero(B.factors)
		for g in G.elements:
			if self.omega[(e, g)] != origin or self.omega[(g, e)] != origin:
				raise InvalidAction(f"omega is not normalized at '{g}'.")
		for g, h, k in itertools.product(G.elements, repeat=3):
			left = B.add(self.omega[(g, self.multiply(h, k))], self.apply(g, self.omega[(h, k)]))
			right = B.add(self.omega[(g, h)], self.omega[(self.multiply(g, h), k)])
			if left != right:
				raise InvalidAction(f"omega fails the cocycle identity at ('{g}', '{h}', '{k}').")

	@staticmethod
	def trivial(B: MetricGroup, group: FiniteGroup | None = None) -> OrthogonalAction:
		group = group or FiniteGroup.trivial()
		identity = _identity_matrix(len(B.factors))
		return OrthogonalAction(B, group, {g: identity for g in group.elements})


def _identity_matrix(k: int) -> tuple:
	return tuple(tuple(1 if i == j else 0 for j in range(k)) for i in range(k))


def duality_swap_matrix(B: MetricGroup) -> tuple:
	"""
	(phi, a) -> (a, phi) on a hyperbolic group over A = Z/n_1 x ... (identifying Â with A).
	"""
	if B.hyperbolic_over is None:
		raise InvalidAction("The duality swap needs a hyperbolic metric group.")
	k = len(B.hyperbolic_over)
	return tuple(tuple(1 if j == (i + k) % (2 * k) else 0 for j in range(2 * k)) for i in range(2 * k))


def inversion_matrix(B: MetricGroup) -> tuple:
	k = len(B.factors)
	return tuple(tuple(-1 if i == j else 0 for j in range(k)) for i in range(k))


def duality_swap(B: MetricGroup) -> OrthogonalAction:
	group = FiniteGroup.cyclic(2)
	return OrthogonalAction(B, group, {"0": _identity_matrix(len(B.factors)), "1": duality_swap_matrix(B)})


def inversion(B: MetricGroup) -> OrthogonalAction:
	group = FiniteGroup.cyclic(2)
	return OrthogonalAction(B, group, {"0": _identity_matrix(len(B.factors)), "1": inversion_matrix(B)})


def _compose_matrices(first, second, factors) -> tuple:
	k = len(factors)
	return tuple(tuple(sum(first[i][m] * second[m][j] for m in range(k)) % factors[i] for j in range(k)) for i in range(k))


# ========
# Sectors
# ========

@dataclass(frozen=True)
class PointedSector:
	"""
	L_g = L ∩ pi(g)^-1(L), its sorted basis, and its characters.
	"""
	element: str
	basis: tuple[Element, ...]
	decomposition: abelian.CyclicDecomposition

	@cached_property
	def characters(self) -> list[tuple[int, ...]]:
		return self.decomposition.characters()

	@cached_property
	def labels(self) -> list[str]:
		return [abelian.CyclicDecomposition.label(character) for character in self.characters]

	@cached_property
	def position(self) -> dict[Element, int]:
		return {a: i for i, a in enumerate(self.basis)}


@dataclass(frozen=True, eq=False)
class PointedExtension:
	"""
	The data (B, L, pi, omega) of a G-extension of Vec(A), with B = Â x A or any metric group with a Lagrangian L.
	"""
	lagrangian: LagrangianSubgroup
	action: OrthogonalAction

	def __post_init__(self):
		if self.lagrangian.metric_group.q != self.action.metric_group.q:
			raise InvalidAction("The Lagrangian and the action live on different metric groups.")

	@property
	def metric_group(self) -> MetricGroup:
		return self.lagrangian.metric_group

	@property
	def group(self) -> FiniteGroup:
		return self.action.group

	@property
	def order_a(self) -> int:
		"""
		|A| = |L| = sqrt(|B|).
		"""
		return self.lagrangian.order

	@cached_property
	def sectors(self) -> dict[str, PointedSector]:
		B, L = self.metric_group, self.lagrangian
		result = {}
		for g in self.group.elements:
			basis = tuple(a for a in L.elements if self.action.apply(g, a) in L)
			result[g] = PointedSector(g, basis, abelian.decompose(basis, B.factors))
		return result

	def twist(self, g: str, h: str, b: Element) -> Fraction:
		"""
		chi_{omega(h^-1, g^-1)}(b).
		"""
		omega = self.action.omega[(self.action.inverse(h), self.action.inverse(g))]
		return self.metric_group.chi(omega, b)

	def transport(self, g: str, h: str) -> list[Element]:
		"""
		K = {b in L_h : pi(h) b in L_g}, the support of e_alpha o e_beta.
		"""
		target = self.sectors[g].position
		return [b for b in self.sectors[h].basis if self.action.apply(h, b) in target]

	def to_document(self) -> dict:
		B = self.metric_group
		fields = {}
		if B.hyperbolic_over is not None:
			fields["hyperbolic_over"] = list(B.hyperbolic_over)
		else:
			fields["factors"] = list(B.factors)
			fields["bicharacter"] = [[str(_bicharacter_entry(B, i, j)) for j in range(len(B.factors))] for i in range(len(B.factors))]
		G = self.group
		return documents.new_document("pointed_extension",
		                              lagrangian={"elements": [list(a) for a in self.lagrangian.elements]},
		                              G=G.to_dict(),
		                              pi=[[list(row) for row in self.action.pi[g]] for g in G.elements],
		                              omega=[[list(self.action.omega[(g, h)]) for h in G.elements] for g in G.elements],
		                              **fields)

	@staticmethod
	def from_document(document: dict) -> PointedExtension:
		document = documents.validate_document(document, "pointed_extension")
		if "hyperbolic_over" in document:
			B = hyperbolic(document["hyperbolic_over"])
		elif "factors" in document and "bicharacter" in document:
			B = MetricGroup.from_bicharacter(document["factors"], document["bicharacter"])
		else:
			raise MalformedInput("A pointed extension needs either 'hyperbolic_over' or 'factors' with 'bicharacter'.")

		lagrangian = document.get("lagrangian", {"H": []})
		if "elements" in lagrangian:
			L = lagrangian_from_elements(B, lagrangian["elements"])
		else:
			L = lagrangian_from_pair(B, lagrangian["H"], lagrangian.get("b"))

		G = FiniteGroup.from_dict(document["G"])
		if len(document["pi"]) != G.order:
			raise InvalidAction(f"'pi' lists {len(document['pi'])} matrices for a group of order {G.order}.")
		pi = dict(zip(G.elements, document["pi"]))
		omega = {}
		if "omega" in document:
			table = document["omega"]
			if len(table) != G.order or any(len(row) != G.order for row in table):
				raise InvalidAction(f"'omega' must be a {G.order}x{G.order} table of elements of B.")
			omega = {(g, h): tuple(table[i][j]) for (i, g), (j, h) in itertools.product(enumerate(G.elements), repeat=2)}
		return PointedExtension(L, OrthogonalAction(B, G, pi, omega))


def _bicharacter_entry(B: MetricGroup, i: int, j: int) -> Fraction:
	"""
	A matrix m with q(x) = sum_ij x_i x_j m_ij: diagonal q(e_i), upper triangle chi(e_i, e_j), lower triangle zero.
	"""
	if i == j:
		return B.q[B.basis[i]]
	if i < j:
		return B.chi(B.basis[i], B.basis[j])
	return Fraction(0)


# ========
# Closed forms
# ========

def _character_table(extension: PointedExtension, g: str, points) -> list[tuple[Fraction, ...]]:
	sector = extension.sectors[g]
	return [tuple(sector.decomposition.evaluate(character, point) for point in points) for character in sector.characters]


def _fusion_block(extension: PointedExtension, g: str, h: str) -> tuple[np.ndarray, int]:
	"""
	The 0/1 pattern of N^gamma_{alpha beta} on one (g, h) block, and |K|.

	alpha(pi(h) b) + beta(b) + chi_omega(b) = gamma(b) for every b in K.
	"""
	gh = extension.action.multiply(g, h)
	K = extension.transport(g, h)
	alphas = _character_table(extension, g, [extension.action.apply(h, b) for b in K])
	betas = _character_table(extension, h, K)
	twists = [extension.twist(g, h, b) for b in K]

	# Characters of L_gh that agree on K share a restriction.
	restrictions: dict[tuple, list[int]] = {}
	for z, values in enumerate(_character_table(extension, gh, K)):
		restrictions.setdefault(values, []).append(z)

	pattern = np.zeros((len(alphas), len(betas), len(extension.sectors[gh].characters)), dtype=np.int64)
	for x, y in itertools.product(range(len(alphas)), range(len(betas))):
		target = tuple(mod_one(a + b + t) for a, b, t in zip(alphas[x], betas[y], twists))
		for z in restrictions.get(target, ()):
			pattern[x, y, z] = 1
	return pattern, len(K)


def pointed_fusion(extension: PointedExtension) -> GradedFusionRing:
	"""
	Fusion rules of the extension: N^gamma_{alpha beta} = delta(gamma = alpha pi(h) + beta + chi_omega on K)
	times |K| sqrt(|A|) / sqrt(|L_g| |L_h| |L_gh|).
	"""
	logger = fusionforge.get_logger()
	G = extension.group
	sectors = extension.sectors
	order_a = extension.order_a
	blocks = {}
	for g, h in itertools.product(G.elements, repeat=2):
		gh = extension.action.multiply(g, h)
		pattern, size_k = _fusion_block(extension, g, h)
		numerator = size_k * size_k * order_a
		denominator = len(sectors[g].basis) * len(sectors[h].basis) * len(sectors[gh].basis)
		multiplicity = exact_integer_sqrt(numerator, denominator)
		if multiplicity is None:
			raise NotIntegral("|K| sqrt(|A|) / sqrt(|L_g| |L_h| |L_gh|)", (G.index(g), G.index(h), G.index(gh)),
			                  math.sqrt(numerator / denominator), 0.0)
		blocks[(g, h)] = pattern * multiplicity

	labels = {g: sectors[g].labels for g in G.elements}
	fusion_dims = [math.sqrt(order_a / len(sectors[g].basis)) for g in G.elements for _ in sectors[g].labels]
	e = G.elements[G.identity]
	unit_label = sectors[e].labels[sectors[e].characters.index(tuple(0 for _ in sectors[e].decomposition.invariants))]
	logger.debug(f"pointed_fusion: sector sizes {[len(labels[g]) for g in G.elements]}")
	return GradedFusionRing.from_blocks(G, labels, blocks, fusion_dims, unit=(e, unit_label))


def pointed_idempotents(extension: PointedExtension):
	"""
	e_alpha = (|A| / |L_g|) sum_a alpha(a) 1_a.
	"""
	from fusionforge.lib.conv_engine import IdempotentBasis

	vectors, labels = {}, {}
	for g, sector in extension.sectors.items():
		scale = extension.order_a / len(sector.basis)
		vectors[g] = [scale * np.array([phase(value) for value in row]) for row in _character_table(extension, g, sector.basis)]
		labels[g] = sector.labels
	return IdempotentBasis(vectors, provenance="closed-form", labels=labels)


def pointed_spec(extension: PointedExtension, tolerance: float = 1e-9):
	"""
	End(I(1)) on the bases {1_a : a in L_g}:
	    1_a * 1_b = (1/|A|) 1_{a+b}
	    1_a o 1_b = exp(2 pi i chi_{omega(h^-1, g^-1)}(b)) 1_b   when pi(h) b = a, else 0
	Validated against (e_alpha o e_beta) = (|K||A| / (|L_g||L_h|)) sum over the allowed gamma of e_gamma.
	"""
	from fusionforge.lib.conv_engine import GradedAlgebraSpec

	B, G = extension.metric_group, extension.group
	sectors = extension.sectors
	order_a = extension.order_a

	conv = {}
	for g, sector in sectors.items():
		n = len(sector.basis)
		array = np.zeros((n, n, n), dtype=np.complex128)
		for (i, a), (j, b) in itertools.product(enumerate(sector.basis), repeat=2):
			array[i, j, sector.position[B.add(a, b)]] = 1 / order_a
		conv[g] = array

	comp = {}
	for g, h in itertools.product(G.elements, repeat=2):
		gh = extension.action.multiply(g, h)
		array = np.zeros((len(sectors[g].basis), len(sectors[h].basis), len(sectors[gh].basis)), dtype=np.complex128)
		for b in extension.transport(g, h):
			a = extension.action.apply(h, b)
			array[sectors[g].position[a], sectors[h].position[b], sectors[gh].position[b]] = phase(extension.twist(g, h, b))
		comp[(g, h)] = array

	spec = GradedAlgebraSpec(G, {g: len(sectors[g].basis) for g in G.elements}, conv, comp)

	basis = pointed_idempotents(extension)
	for g, h in itertools.product(G.elements, repeat=2):
		gh = extension.action.multiply(g, h)
		pattern, size_k = _fusion_block(extension, g, h)
		expected = pattern * (size_k * order_a / (len(sectors[g].basis) * len(sectors[h].basis)))
		Eg, Eh, Egh = (np.array(basis.vectors[each]) for each in (g, h, gh))
		composed = np.einsum('xi,yj,ijk->xyk', Eg, Eh, comp[(g, h)])
		residual = np.max(np.abs(composed - np.einsum('xyz,zk->xyk', expected, Egh)), initial=0.0)
		if residual > tolerance * max(1.0, float(order_a)):
			raise SelfConsistency(f"pointed_spec: idempotent products in sectors ('{g}', '{h}') are off by {residual:g}.")
	return spec


def recover_pointed(extension: PointedExtension, seed: int | None = None):
	"""
	Run the engine on pointed_spec and check it against pointed_fusion.
	"""
	from fusionforge.lib.conv_engine import recover_fusion

	recovery = recover_fusion(pointed_spec(extension), seed=seed, reference=pointed_idempotents(extension))
	expected = pointed_fusion(extension)
	if not np.array_equal(recovery.graded.N, expected.N):
		mismatch = np.argwhere(recovery.graded.N != expected.N)[0]
		x, y, z = (expected.simples[int(each)] for each in mismatch)
		raise SelfConsistency(f"pointed_spec: the engine gives N[{x}][{y}][{z}] = {recovery.graded.N[tuple(mismatch)]}, "
		                      f"the closed form gives {expected.N[tuple(mismatch)]}.")
	return recovery


# ========
# Presets
# ========

def _preset_ising() -> PointedExtension:
	B = hyperbolic([2])
	return PointedExtension(lagrangian_from_pair(B, []), duality_swap(B))


def _preset_tambara_yamagami() -> PointedExtension:
	B = hyperbolic([2, 2])
	return PointedExtension(lagrangian_from_pair(B, []), duality_swap(B))


def _preset_klein_z3() -> PointedExtension:
	"""
	Z/2 x Z/2 acting on hyperbolic Z/3 by the duality swap and by inversion.
	"""
	B = hyperbolic([3])
	G = FiniteGroup.direct_product(FiniteGroup.cyclic(2), FiniteGroup.cyclic(2))
	swap, invert = duality_swap_matrix(B), inversion_matrix(B)
	pi = {"00": _identity_matrix(2), "01": invert, "10": swap, "11": _compose_matrices(swap, invert, B.factors)}
	return PointedExtension(lagrangian_from_pair(B, []), OrthogonalAction(B, G, pi))


def _preset_z4_cocycle() -> PointedExtension:
	"""
	Trivial action of Z/2 on hyperbolic Z/4 with omega(1, 1) = (0, 2).
	"""
	B = hyperbolic([4])
	G = FiniteGroup.cyclic(2)
	identity = _identity_matrix(2)
	return PointedExtension(lagrangian_from_pair(B, []), OrthogonalAction(B, G, {"0": identity, "1": identity}, {("1", "1"): (0, 2)}))


PRESETS = {
	"ising": _preset_ising,
	"tambara-yamagami-z2z2": _preset_tambara_yamagami,
	"klein-z3": _preset_klein_z3,
	"z4-cocycle": _preset_z4_cocycle,
}


def preset(name: str) -> PointedExtension:
	try:
		return PRESETS[name]()
	except KeyError as ex:
		raise MalformedInput(f"Unknown pointed preset '{name}'.  Presets: {', '.join(PRESETS)}") from ex
