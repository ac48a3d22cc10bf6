""" fusionforge/lib/permutation.py """

from __future__ import annotations

# Standard Library
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
import itertools
import math

# Third Party
import numpy as np

# Package
import fusionforge
from fusionforge.lib.core_ring import FiniteGroup, GradedFusionRing, Violation
from fusionforge.lib.exceptions import MalformedInput, NotIntegral, ParityViolation, SelfConsistency
from fusionforge.lib.modular import ModularData, deligne_power
from fusionforge.lib.utils import BOXTIMES, join_labels, split_label


@dataclass(frozen=True)
class CyclicSectorIndex:
	"""
	The sector g of C ≀ Z/n.  Its simples are the g-fixed objects (X_1 ⊠ ... ⊠ X_c)^{⊠o}, indexed by
	(X_1, ..., X_c) in mixed radix with the first slot most significant.
	"""
	n: int
	g: int

	def __post_init__(self):
		if self.n < 1:
			raise MalformedInput(f"The extension order must be positive, not {self.n}.")
		object.__setattr__(self, "g", self.g % self.n)

	@property
	def co_order(self) -> int:
		return math.gcd(self.g, self.n)

	@property
	def order(self) -> int:
		return self.n // self.co_order

	@property
	def element(self) -> str:
		return str(self.g)

	def size(self, rank: int) -> int:
		return rank ** self.co_order

	def labels(self, base_labels) -> tuple[str, ...]:
		return tuple(join_labels(each) for each in itertools.product(base_labels, repeat=self.co_order))

	def digits(self, rank: int) -> np.ndarray:
		"""
		[index, slot] -> simple of C in that slot.
		"""
		return np.array(list(itertools.product(range(rank), repeat=self.co_order)), dtype=np.int64).reshape(-1, self.co_order)

	def blocks(self, rank: int, p: int) -> np.ndarray:
		"""
		[index, i] -> the simple of C^⊠p formed by slots i*p .. i*p+p-1.
		"""
		weights = rank ** np.arange(p - 1, -1, -1)
		return self.digits(rank).reshape(-1, self.co_order // p, p) @ weights

	def index_of(self, slots, rank: int) -> int:
		"""
		Flat index of the fixed object whose first c slots are 'slots'.
		"""
		index = 0
		for x in slots[:self.co_order]:
			index = index * rank + int(x)
		return index


def _genus_data(n: int, g: int, h: int) -> tuple[int, int, int]:
	"""
	(p, k, m): the Deligne power, the genus, and the number of insertions for the (g, h) block.
	"""
	c_g, c_h, c_gh = (CyclicSectorIndex(n, each).co_order for each in (g, h, g + h))
	p = math.gcd(c_g, c_h)
	excess = n - c_g - c_h - c_gh
	if excess % p or (excess // p) % 2:
		raise ParityViolation(f"(n - c(g) - c(h) - c(g+h)) / gcd(c(g), c(h)) = {excess}/{p} is not an even integer "
		                      f"for n={n}, g={g}, h={h}.")
	return p, excess // (2 * p) + 1, (c_g + c_h + c_gh) // p


@dataclass
class _PowerCache:
	md: ModularData
	powers: dict = field(default_factory=dict)

	def get(self, p: int) -> ModularData:
		if p not in self.powers:
			self.powers[p] = deligne_power(self.md, p)
		return self.powers[p]


def _check_sector_cap(md: ModularData, n: int, sector_cap: int | None = None):
	cap = sector_cap or fusionforge.get_config_data().sector_cap
	if md.rank ** n > cap:
		raise MalformedInput(f"The untwisted sector of C≀Z/{n} has {md.rank ** n} simples, above the sector cap of {cap}.")


def _fusion_block(md: ModularData, n: int, g: int, h: int, powers: _PowerCache, tolerance: float) -> np.ndarray:
	"""
	N[x, y, z] = dim_p^(k-1) sum_W prod_i S_p[x_i, W] prod_j S_p[y_j, W] prod_l S_p[dual z_l, W] / d_W^(m+2k-2)
	where x_i, y_j, z_l are the blocks of p slots of X, Y, Z.
	"""
	p, k, m = _genus_data(n, g, h)
	md_p = powers.get(p)
	rank = md.rank
	dual = np.array(md_p.ring.dual)

	def insertions(element, dualize=False):
		blocks = CyclicSectorIndex(n, element).blocks(rank, p)
		if dualize:
			blocks = dual[blocks]
		return np.prod(md_p.S[blocks], axis=1)  # [index, W]

	weight = 1 / md_p.dims ** (m + 2 * k - 2)
	raw = md_p.global_dim ** (k - 1) * np.einsum('xw,yw,zw,w->xyz', insertions(g), insertions(h), insertions(g + h, True), weight, optimize=True)
	rounded = np.rint(raw.real)
	bad = np.argwhere((np.abs(raw - rounded) > tolerance) | (rounded < 0))
	if len(bad):
		x, y, z = (int(each) for each in bad[0])
		raise NotIntegral(f"genus-{k} coefficient over C^⊠{p} for sectors ({g}, {h})", (x, y, z), complex(raw[x, y, z]), tolerance)
	return rounded.astype(np.int64)


def cyclic_fusion(md: ModularData, n: int, tolerance: float | None = None, sector_cap: int | None = None) -> GradedFusionRing:
	"""
	The fusion ring of the Z/n permutation extension of 'md'.  Sector g holds the g-fixed simples, labelled
	by their first c(g) slots; d+ of (g, X) is |d_X| dim^((n - c(g)) / 2).
	"""
	config = fusionforge.get_config_data()
	logger = fusionforge.get_logger()
	tolerance = tolerance or config.tolerance
	_check_sector_cap(md, n, sector_cap)

	group = FiniteGroup.cyclic(n)
	indices = [CyclicSectorIndex(n, g) for g in range(n)]
	sectors = {index.element: index.labels(md.labels) for index in indices}
	powers = _PowerCache(md)
	for p in {math.gcd(a.co_order, b.co_order) for a, b in itertools.product(indices, repeat=2)}:
		powers.get(p)

	pairs = list(itertools.product(range(n), repeat=2))
	with ThreadPoolExecutor(max_workers=config.threads) as executor:
		computed = list(executor.map(lambda pair: _fusion_block(md, n, pair[0], pair[1], powers, tolerance), pairs))
	blocks = {(str(g), str(h)): block for (g, h), block in zip(pairs, computed)}

	dims = np.abs(md.dims)
	fusion_dims = []
	for index in indices:
		slot_dims = np.prod(dims[index.digits(md.rank)], axis=1)
		fusion_dims.extend(slot_dims * md.global_dim ** ((n - index.co_order) / 2))

	unit_label = join_labels([md.labels[md.unit]] * n)
	logger.debug(f"cyclic_fusion: n={n}, sector sizes {[len(sectors[index.element]) for index in indices]}")
	return GradedFusionRing.from_blocks(group, sectors, blocks, np.array(fusion_dims), unit=("0", unit_label))


def permutation_idempotents(md: ModularData, n: int, g: int) -> list[np.ndarray]:
	"""
	f_{g,X} = sum_Y (d_X dim^(n-c) / d_Y^o) S^(c)[X, Y] 1_Y over the basis of g-fixed objects.
	"""
	index = CyclicSectorIndex(n, g)
	md_c = deligne_power(md, index.co_order)
	dims = md_c.dims
	return [dims[x] * md.global_dim ** (n - index.co_order) * md_c.S[x, :] / dims ** index.order for x in range(md_c.rank)]


def permutation_basis(md: ModularData, n: int):
	from fusionforge.lib.conv_engine import IdempotentBasis

	vectors, labels = {}, {}
	for g in range(n):
		index = CyclicSectorIndex(n, g)
		vectors[index.element] = permutation_idempotents(md, n, g)
		labels[index.element] = list(index.labels(md.labels))
	return IdempotentBasis(vectors, provenance="closed-form", labels=labels)


def permutation_spec(md: ModularData, n: int, validate: bool = True, seed: int | None = None, sector_cap: int | None = None):
	"""
	End(I(1)) for C ≀ Z/n on the bases of g-fixed objects:
	    1_X * 1_Y = dim^-n (d_X^o d_Y^o / d_Z^o) N^Z_{XY} 1_Z      (fusion in C^⊠c)
	    1_R o 1_R = 1_R for every R fixed by both g and h, and zero otherwise.
	With 'validate', the engine run on this spec must reproduce cyclic_fusion.
	"""
	from fusionforge.lib.conv_engine import GradedAlgebraSpec, recover_fusion

	_check_sector_cap(md, n, sector_cap)
	group = FiniteGroup.cyclic(n)
	rank = md.rank
	scale = md.global_dim ** -n

	dims, conv = {}, {}
	for g in range(n):
		index = CyclicSectorIndex(n, g)
		md_c = deligne_power(md, index.co_order)
		powered = md_c.dims ** index.order
		conv[index.element] = scale * md_c.ring.N * np.einsum('x,y,z->xyz', powered, powered, 1 / powered)
		dims[index.element] = md_c.rank

	comp = {}
	for g, h in itertools.product(range(n), repeat=2):
		first, second, target = CyclicSectorIndex(n, g), CyclicSectorIndex(n, h), CyclicSectorIndex(n, g + h)
		p = math.gcd(first.co_order, second.co_order)
		array = np.zeros((first.size(rank), second.size(rank), target.size(rank)), dtype=np.complex128)
		for word in itertools.product(range(rank), repeat=p):
			slots = word * (n // p)
			array[first.index_of(slots, rank), second.index_of(slots, rank), target.index_of(slots, rank)] = 1
		comp[(first.element, second.element)] = array

	spec = GradedAlgebraSpec(group, dims, conv, comp)
	if validate:
		_check_against_closed_form(md, n, recover_fusion(spec, seed=seed, reference=permutation_basis(md, n)), sector_cap)
	return spec


def _check_against_closed_form(md: ModularData, n: int, recovery, sector_cap: int | None = None):
	expected = cyclic_fusion(md, n, sector_cap=sector_cap)
	recovered = recovery.graded
	if not np.array_equal(recovered.N, expected.N):
		mismatch = np.argwhere(recovered.N != expected.N)[0]
		x, y, z = (expected.simples[int(each)] for each in mismatch)
		raise SelfConsistency(f"permutation_spec: the engine gives N[{x}][{y}][{z}] = {recovered.N[tuple(mismatch)]}, "
		                      f"the closed form gives {expected.N[tuple(mismatch)]}.")


def recover_permutation(md: ModularData, n: int, seed: int | None = None, sector_cap: int | None = None):
	"""
	Run the engine on permutation_spec and check it against cyclic_fusion.
	"""
	from fusionforge.lib.conv_engine import recover_fusion

	recovery = recover_fusion(permutation_spec(md, n, validate=False, sector_cap=sector_cap), seed=seed,
	                          reference=permutation_basis(md, n))
	_check_against_closed_form(md, n, recovery, sector_cap)
	return recovery


# ========
# Consistency checks
# ========

@dataclass
class ParityReport:
	n: int
	pairs: int
	witnesses: list[tuple[int, int]] = field(default_factory=list)

	@property
	def passed(self) -> bool:
		return not self.witnesses

	def to_dict(self) -> dict:
		return {"n": self.n, "pairs": self.pairs, "passed": self.passed, "witnesses": [list(each) for each in self.witnesses]}


def parity_check(n: int) -> ParityReport:
	"""
	(n - (m,n) - (k,n) - (m+k,n)) / ((m,n),(k,n)) is an even integer for every m, k in Z/n.
	"""
	if n < 1:
		raise MalformedInput(f"parity_check needs n >= 1, not {n}.")
	report = ParityReport(n, n * n)
	for m, k in itertools.product(range(n), repeat=2):
		try:
			_genus_data(n, m, k)
		except ParityViolation:
			report.witnesses.append((m, k))
	return report


def rotate_label(label: str) -> str:
	slots = split_label(label)
	return join_labels(slots[1:] + slots[:1])


def rotation_violations(ring: GradedFusionRing) -> list[Violation]:
	"""
	Rotating the ⊠-slots of every label by one place must preserve the fusion rules.
	"""
	rotated = [ring.index(g, rotate_label(x)) for g, x in ring.simples]
	permuted = ring.N[np.ix_(rotated, rotated, rotated)]
	return [Violation("slot-rotation", (x, y, z), f"N[{ring.simples[x]}][{ring.simples[y]}][{ring.simples[z]}] changes under slot rotation")
	        for x, y, z in np.argwhere(permuted != ring.N)]


def factorization_check(md: ModularData, n: int, g: int, h: int) -> bool:
	"""
	The (g, h) block over C equals the (g/p, h/p) block of the Z/(n/p) extension of C^⊠p, p = gcd(c(g), c(h)).
	"""
	p = math.gcd(CyclicSectorIndex(n, g).co_order, CyclicSectorIndex(n, h).co_order)
	full = cyclic_fusion(md, n).block(str(g % n), str(h % n))
	reduced = cyclic_fusion(deligne_power(md, p), n // p).block(str((g % n) // p), str((h % n) // p))
	return np.array_equal(full, reduced)


# ========
# Appendix-style printing
# ========

def format_simple(g: str, label: str) -> str:
	compact = label.replace(BOXTIMES, "")
	return compact if g == "0" else f"({g},{compact})"


def format_product(ring: GradedFusionRing, x: int, y: int) -> str:
	"""
	'(1,τ)(1,τ) = 3(2,𝟙𝟙)+4(2,𝟙τ)+...' for the simples at flat indices x and y.
	"""
	terms = []
	for z in np.flatnonzero(ring.N[x, y]):
		multiplicity = int(ring.N[x, y, z])
		terms.append(f"{multiplicity if multiplicity != 1 else ''}{format_simple(*ring.simples[z])}")
	# untwisted labels carry no parentheses
	separator = "·" if ring.simples[x][0] == ring.simples[y][0] == "0" else ""
	return f"{format_simple(*ring.simples[x])}{separator}{format_simple(*ring.simples[y])} = {'+'.join(terms) or '0'}"


def appendix_lines(ring: GradedFusionRing) -> list[str]:
	"""
	Every product of two simples, with x <= y when the ring is commutative.
	"""
	commutative = np.array_equal(ring.N, ring.N.transpose(1, 0, 2))
	pairs = itertools.combinations_with_replacement(range(ring.rank), 2) if commutative else itertools.product(range(ring.rank), repeat=2)
	return [format_product(ring, x, y) for x, y in pairs]
