""" fusionforge/lib/abelian.py """

from __future__ import annotations

# Standard Library
from dataclasses import dataclass
from fractions import Fraction
import itertools

# Third Party
from sympy.polys.domains import ZZ
from sympy.polys.matrices import DomainMatrix
from sympy.polys.matrices.normalforms import smith_normal_decomp

# Package
from fusionforge.lib.exceptions import MalformedInput

Element = tuple[int, ...]


def add(a: Element, b: Element, factors) -> Element:
	return tuple((x + y) % n for x, y, n in zip(a, b, factors))


def scale(a: Element, k: int, factors) -> Element:
	return tuple((k * x) % n for x, n in zip(a, factors))


def zero(factors) -> Element:
	return tuple(0 for _ in factors)


def all_elements(factors) -> list[Element]:
	return list(itertools.product(*(range(n) for n in factors)))


def element_order(a: Element, factors) -> int:
	order, current = 1, a
	while any(current):
		current = add(current, a, factors)
		order += 1
	return order


def span(generators, factors) -> set[Element]:
	result = {zero(factors)}
	for generator in generators:
		multiples = [scale(generator, k, factors) for k in range(element_order(generator, factors))]
		result = {add(s, m, factors) for s in result for m in multiples}
	return result


@dataclass(frozen=True)
class CyclicDecomposition:
	"""
	A subgroup written as Z/d_1 x ... x Z/d_r (d_i > 1), with exact coordinates for each of its elements.
	"""
	factors: tuple[int, ...]
	generators: tuple[Element, ...]
	invariants: tuple[int, ...]
	coordinate_table: dict

	@property
	def order(self) -> int:
		return len(self.coordinate_table)

	def coordinates(self, element: Element) -> tuple[int, ...]:
		try:
			return self.coordinate_table[tuple(element)]
		except KeyError as ex:
			raise MalformedInput(f"{element} is not in the subgroup generated by {self.generators}.") from ex

	def characters(self) -> list[tuple[int, ...]]:
		"""
		Every character, as its exponent vector k (alpha_k(x) = sum_i k_i y_i / d_i).
		"""
		return list(itertools.product(*(range(d) for d in self.invariants)))

	def evaluate(self, character: tuple[int, ...], element: Element) -> Fraction:
		"""
		alpha(element) as an exponent in Q/Z, normalised into [0, 1).
		"""
		y = self.coordinates(element)
		total = sum((Fraction(k * c, d) for k, c, d in zip(character, y, self.invariants)), Fraction(0))
		return total - (total.numerator // total.denominator)

	@staticmethod
	def label(character: tuple[int, ...]) -> str:
		return "χ" + (".".join(str(each) for each in character) or "0")


def _to_domain_matrix(rows: list[list[int]]) -> DomainMatrix:
	return DomainMatrix([[ZZ(entry) for entry in row] for row in rows], (len(rows), len(rows[0])), ZZ)


def decompose(elements, factors) -> CyclicDecomposition:
	"""
	Cyclic decomposition of the subgroup 'elements' of Z/n_1 x ... x Z/n_k, via the Smith normal
	form of the relation lattice of a generating set.
	"""
	factors = tuple(int(n) for n in factors)
	elements = sorted({tuple(int(x) % n for x, n in zip(element, factors)) for element in elements})
	origin = zero(factors)
	if origin not in elements:
		raise MalformedInput("A subgroup must contain zero.")

	# Greedy generating set; every element gets one integer coordinate vector c over the generators.
	generators: list[Element] = []
	found: dict[Element, tuple[int, ...]] = {origin: ()}
	for candidate in elements:
		if candidate in found:
			continue
		order = element_order(candidate, factors)
		extended = {}
		for element, c in found.items():
			for t in range(order):
				extended.setdefault(add(element, scale(candidate, t, factors), factors), c + (t,))
		found = extended
		generators.append(candidate)
	if set(found) != set(elements):
		raise MalformedInput(f"The given elements are not closed under addition ({len(found)} generated, {len(elements)} given).")

	m, k = len(generators), len(factors)
	if m == 0:
		return CyclicDecomposition(factors, (), (), {origin: ()})

	# Relations among the generators: integer kernel of [g_1 ... g_m | diag(n)].
	presentation = [[generators[j][i] for j in range(m)] + [factors[i] if col == i else 0 for col in range(k)] for i in range(k)]
	smf, _, transform = smith_normal_decomp(_to_domain_matrix(presentation))
	smf, transform = smf.to_Matrix(), transform.to_Matrix()
	kernel_columns = [j for j in range(m + k) if all(smf[i, j] == 0 for i in range(k))]
	relations = [[int(transform[i, j]) for j in kernel_columns] for i in range(m)]

	# Z^m / relations = (+) Z/d_i, with the isomorphism c -> S c.
	smf2, left, _ = smith_normal_decomp(_to_domain_matrix(relations))
	smf2, left = smf2.to_Matrix(), left.to_Matrix()
	diagonal = [abs(int(smf2[i, i])) for i in range(min(smf2.shape))]
	kept = [i for i, d in enumerate(diagonal) if d > 1]
	invariants = tuple(diagonal[i] for i in kept)

	table = {}
	for element, c in found.items():
		image = [sum(int(left[i, j]) * c[j] for j in range(m)) for i in kept]
		table[element] = tuple(value % d for value, d in zip(image, invariants))

	product = 1
	for d in invariants:
		product *= d
	if product != len(elements) or len(set(table.values())) != len(elements):
		raise MalformedInput(f"Smith normal form gave invariants {invariants} for a subgroup of order {len(elements)}.")
	return CyclicDecomposition(factors, tuple(generators), invariants, table)
