""" fusionforge/lib/tests.py """

import itertools
import json
import math

import numpy as np

import fusionforge


def _catalog_sample():
	from fusionforge.lib.modular import catalog, catalog_from_reference
	return [
		catalog("fibonacci"),
		catalog("ising"),
		catalog("toric_code"),
		catalog("trivial"),
		catalog("su2", level=3),
		catalog("su2", level=4),
		catalog_from_reference("fibonacci^2"),
		catalog_from_reference("hyperbolic:3"),
	]


# ========
# Fusion rings
# ========

def test_group_ring_z3():
	from fusionforge.lib.core_ring import fp_dims, group_ring, verify_fusion_ring
	ring = group_ring([3])
	assert ring.rank == 3
	assert ring.fusion("1", "2") == {"0": 1}
	assert verify_fusion_ring(ring) == []
	assert np.allclose(fp_dims(ring), [1, 1, 1])


def test_finite_group_rejects_bad_tables():
	import pytest
	from fusionforge.lib.core_ring import FiniteGroup
	from fusionforge.lib.exceptions import MalformedInput
	with pytest.raises(MalformedInput):
		FiniteGroup(("a", "b"), [[0, 1], [1, 1]])
	with pytest.raises(MalformedInput):
		FiniteGroup(("a", "b", "c"), [[0, 1, 2], [1, 0, 0], [2, 0, 1]])


def test_verify_detects_broken_associativity():
	from fusionforge.lib.core_ring import FusionRing, verify_fusion_ring
	from fusionforge.lib.modular import catalog
	# psi * psi = 1 + psi
	N = np.array(catalog("ising").ring.N)
	N[2, 2, 2] = 1
	violations = verify_fusion_ring(FusionRing(("𝟙", "σ", "ψ"), N, 0, (0, 1, 2)))
	assert any(each.axiom == "associativity" for each in violations)


def test_verify_reports_rigidity_as_data():
	from fusionforge.lib.core_ring import FusionRing, verify_fusion_ring
	# tau * tau = 2*1 + tau
	N = np.zeros((2, 2, 2), dtype=np.int64)
	N[0, 0, 0] = N[0, 1, 1] = N[1, 0, 1] = N[1, 1, 1] = 1
	N[1, 1, 0] = 2
	ring = FusionRing(("𝟙", "τ"), N, 0)
	assert ring.dual == (0, 1)
	violations = verify_fusion_ring(ring)
	assert [(each.axiom, tuple(each.indices)) for each in violations] == [("rigidity", (1, 1, 0))]


def test_malformed_rings_raise_malformed_input():
	import pytest
	from fusionforge.lib.core_ring import FiniteGroup, FusionRing, GradedFusionRing
	from fusionforge.lib.exceptions import MalformedInput
	from fusionforge.lib.modular import catalog
	from fusionforge.lib.permutation import cyclic_fusion
	with pytest.raises(MalformedInput):
		FiniteGroup(("a", "b"), [[0, 1], [1]])
	with pytest.raises(MalformedInput):
		FusionRing(("𝟙", "τ"), [[[1, 0], [0, 1]], [[0, 1]]], 0)

	document = cyclic_fusion(catalog("fibonacci"), 2).to_document()
	out_of_range = json.loads(json.dumps(document))
	out_of_range["N"].append([0, 0, 99, 1])
	missing_sector = json.loads(json.dumps(document))
	missing_sector["sectors"] = missing_sector["sectors"][1:]
	short_dims = json.loads(json.dumps(document))
	short_dims["fusion_dims"] = short_dims["fusion_dims"][:1]
	for broken in (out_of_range, missing_sector, short_dims):
		with pytest.raises(MalformedInput):
			GradedFusionRing.from_document(broken)


def test_fp_dims_are_multiplicative():
	from fusionforge.lib.core_ring import fp_dims, product_ring
	from fusionforge.lib.modular import GOLDEN_RATIO, catalog
	fib, ising = catalog("fibonacci").ring, catalog("ising").ring
	assert np.allclose(fp_dims(product_ring(fib, ising)), np.kron(fp_dims(fib), fp_dims(ising)))
	power = catalog("product", base="fibonacci", n=2)
	assert np.isclose(fp_dims(power.ring)[power.index("τ⊠τ")], GOLDEN_RATIO ** 2)
	assert np.allclose(fp_dims(catalog("product", base="fibonacci", n=3).ring), np.kron(fp_dims(power.ring), fp_dims(fib)))


def test_fp_dims_fibonacci():
	from fusionforge.lib.core_ring import fp_dims
	from fusionforge.lib.modular import GOLDEN_RATIO, catalog
	assert np.allclose(fp_dims(catalog("fibonacci").ring), [1, GOLDEN_RATIO])


def test_product_ring_labels():
	from fusionforge.lib.core_ring import ring_power
	from fusionforge.lib.modular import catalog, deligne_power
	md = deligne_power(catalog("fibonacci"), 2)
	assert ring_power(catalog("fibonacci").ring, 2) == md.ring
	assert md.labels == ("𝟙⊠𝟙", "𝟙⊠τ", "τ⊠𝟙", "τ⊠τ")
	assert md.ring.fusion("τ⊠𝟙", "τ⊠𝟙") == {"𝟙⊠𝟙": 1, "τ⊠𝟙": 1}
	assert md.index("tau x 1") == 2


# ========
# Modular data and the genus formula
# ========

def test_verlinde_small_categories():
	from fusionforge.lib.modular import catalog, verlinde
	fib = verlinde(catalog("fibonacci"))
	assert fib.fusion("τ", "τ") == {"𝟙": 1, "τ": 1}
	ising = verlinde(catalog("ising"))
	assert ising.fusion("σ", "σ") == {"𝟙": 1, "ψ": 1}
	assert ising.fusion("ψ", "ψ") == {"𝟙": 1}
	su2 = verlinde(catalog("su2", level=2))
	assert su2.fusion("1", "1") == {"0": 1, "2": 1}


def test_toric_code_is_z2_squared():
	from fusionforge.lib.modular import catalog
	md = catalog("toric_code")
	assert md.labels == ("𝟙", "e", "m", "ε")
	assert md.ring.fusion("e", "m") == {"ε": 1}
	assert md.global_dim == 4


def test_verify_modular_data_catalog():
	from fusionforge.lib.modular import verify_modular_data
	for md in _catalog_sample():
		assert verify_modular_data(md) == [], md.labels


def test_reverse_deligne_product_verifies():
	from fusionforge.lib.modular import catalog, catalog_from_reference, deligne_product, verify_modular_data, verlinde
	for md in (catalog("fibonacci"), catalog_from_reference("hyperbolic:3")):
		reversed_product = deligne_product(md, md, reverse=True)
		assert verify_modular_data(reversed_product) == []
		assert verlinde(reversed_product) == deligne_product(md, md).ring


def test_unknown_category():
	import pytest
	from fusionforge.lib.exceptions import UnknownCategory
	from fusionforge.lib.modular import catalog_from_reference
	with pytest.raises(UnknownCategory):
		catalog_from_reference("not-a-category")


def test_catalog_references():
	from fusionforge.lib.modular import catalog_from_reference
	assert catalog_from_reference("fibonacci^3").rank == 8
	assert catalog_from_reference("su2:3").rank == 4
	assert catalog_from_reference("hyperbolic:2x2").rank == 16


def test_fibonacci_lucas_table():
	from fusionforge.lib.modular import catalog, genus_coefficient, genus_sum
	md = catalog("fibonacci")
	genus_zero = [1, 0, 1, 1, 2, 3, 5, 8]
	genus_one = [2, 1, 3, 4, 7, 11, 18, 29]
	for n in range(8):
		insertions = ["τ"] * n
		if n:
			assert genus_coefficient(md, 0, insertions) == genus_zero[n], n
			assert abs(genus_sum(md, 0, insertions) - genus_zero[n]) < 1e-9
		assert genus_coefficient(md, 1, insertions) == genus_one[n], n
		assert abs(genus_sum(md, 1, insertions) - genus_one[n]) < 1e-9
	assert genus_zero[0] == genus_coefficient(md, 0, ["𝟙"])


def test_genus_matches_bruteforce():
	from fusionforge.lib.modular import catalog, genus_coefficient, genus_coefficient_bruteforce
	for md in (catalog("fibonacci"), catalog("toric_code")):
		for genus in range(3):
			for length in range(5):
				if genus == 0 and length == 0:
					continue
				for insertions in itertools.product(md.labels, repeat=length):
					expected = genus_coefficient_bruteforce(md.ring, genus, insertions)
					assert genus_coefficient(md, genus, insertions) == expected, (genus, insertions)


def test_genus_hand_values():
	from fusionforge.lib.modular import catalog, genus_coefficient_bruteforce
	ring = catalog("fibonacci").ring
	assert genus_coefficient_bruteforce(ring, 1, []) == 2
	assert genus_coefficient_bruteforce(ring, 1, ["τ"]) == 1
	assert genus_coefficient_bruteforce(ring, 1, ["τ", "τ"]) == 3
	assert genus_coefficient_bruteforce(ring, 2, []) == 5


def test_modular_identity_residual():
	from fusionforge.lib.modular import mtc_formula_residual
	for md in _catalog_sample():
		assert mtc_formula_residual(md) < 1e-8


# ========
# The convolution engine
# ========

def test_recovery_identity_catalog():
	from fusionforge.lib.conv_engine import recover_fusion
	from fusionforge.lib.modular import convolution_basis, lagrangian_spec
	for md in _catalog_sample():
		spec = lagrangian_spec(md)
		output = recover_fusion(spec, reference=convolution_basis(md))
		identity = spec.identity
		assert output.graded.sectors[identity] == md.labels
		assert np.array_equal(output.graded.N, md.ring.N), md.labels
		assert output.idempotents.residual(spec) < 1e-8
		assert np.allclose(output.dplus, np.abs(md.dims))


def test_recovery_without_reference():
	from fusionforge.lib.conv_engine import recover_fusion
	from fusionforge.lib.core_ring import verify_graded_ring
	from fusionforge.lib.modular import catalog, lagrangian_spec
	md = catalog("ising")
	output = recover_fusion(lagrangian_spec(md), seed=7)
	assert output.graded.sectors["0"] == ("x0", "x1", "x2")
	assert np.allclose(output.dplus, [1, 1, math.sqrt(2)])
	assert verify_graded_ring(output.graded) == []
	# x2 is σ: σσ = 𝟙 + ψ
	assert output.graded.N[2, 2].tolist() == [1, 1, 0]


def test_composition_check_modular():
	from fusionforge.lib.conv_engine import composition_check
	from fusionforge.lib.modular import catalog, convolution_basis, lagrangian_spec
	for name in ("fibonacci", "ising", "toric_code"):
		md = catalog(name)
		assert composition_check(lagrangian_spec(md), convolution_basis(md), md) < 1e-9


def test_spec_invariants():
	from fusionforge.lib.conv_engine import GradedAlgebraSpec
	from fusionforge.lib.modular import catalog, lagrangian_spec
	spec = lagrangian_spec(catalog("fibonacci"))
	assert spec.check_invariants() == []
	unit = spec.composition_unit()
	vector = np.array([0.5, 2.0])
	assert np.allclose(spec.compose("0", "0", unit, vector), vector)

	conv = np.array(spec.conv["0"])
	conv[0, 1, 1] += 0.5
	broken = GradedAlgebraSpec(spec.group, spec.dims, {"0": conv}, spec.comp)
	axioms = {each.axiom for each in broken.check_invariants()}
	assert "conv-commutative" in axioms


def test_spec_document():
	from fusionforge.lib import documents
	from fusionforge.lib.conv_engine import GradedAlgebraSpec, recover_fusion
	from fusionforge.lib.modular import catalog, lagrangian_spec
	spec = lagrangian_spec(catalog("ising"))
	text = documents.dump_document(spec.to_document())
	reloaded = GradedAlgebraSpec.from_document(documents.load_document(text, "graded_algebra_spec"))
	assert np.allclose(reloaded.conv["0"], spec.conv["0"])
	assert np.array_equal(recover_fusion(reloaded).graded.N, recover_fusion(spec).graded.N)


def test_not_semisimple():
	import pytest
	from fusionforge.lib.conv_engine import GradedAlgebraSpec, recover_fusion
	from fusionforge.lib.core_ring import FiniteGroup
	from fusionforge.lib.exceptions import NotSemisimple
	# span{1, x} with x*x = 0
	conv = np.zeros((2, 2, 2))
	conv[0, 0, 0] = conv[0, 1, 1] = conv[1, 0, 1] = 1
	comp = np.zeros((2, 2, 2))
	comp[0, 0, 0] = comp[1, 1, 1] = 1
	spec = GradedAlgebraSpec(FiniteGroup.trivial(), {"0": 2}, {"0": conv}, {("0", "0"): comp})
	with pytest.raises(NotSemisimple):
		recover_fusion(spec)


def test_seed_independence():
	from fusionforge.lib.conv_engine import recover_fusion
	from fusionforge.lib.modular import catalog_from_reference, lagrangian_spec
	spec = lagrangian_spec(catalog_from_reference("fibonacci^2"))
	tensors = [recover_fusion(spec, seed=seed).graded.N for seed in (0, 1, 2, 3, 2**40)]
	assert all(np.array_equal(tensors[0], each) for each in tensors[1:])


def test_seed_independence_across_sectors():
	from fusionforge.lib.modular import catalog
	from fusionforge.lib.permutation import recover_permutation
	from fusionforge.lib.pointed import preset, recover_pointed
	runs = [
		lambda seed: recover_pointed(preset("ising"), seed),
		lambda seed: recover_pointed(preset("klein-z3"), seed),
		lambda seed: recover_permutation(catalog("fibonacci"), 2, seed),
		lambda seed: recover_permutation(catalog("toric_code"), 2, seed),
	]
	for recover in runs:
		tensors = [recover(seed).graded.N for seed in (0, 1, 7, 2**20, 2**63)]
		assert all(np.array_equal(tensors[0], each) for each in tensors[1:])


def test_recovery_document_reloads():
	from fusionforge.lib import documents
	from fusionforge.lib.conv_engine import RecoveryOutput
	from fusionforge.lib.pointed import preset, recover_pointed
	recovery = recover_pointed(preset("ising"), 3)
	text = documents.dump_document(recovery.to_document())
	reloaded = RecoveryOutput.from_document(documents.load_document(text, "recovery_output"))
	assert reloaded == recovery
	assert documents.dump_document(reloaded.to_document()) == text


# ========
# Pointed extensions
# ========

def test_hyperbolic_z2():
	from fractions import Fraction
	from fusionforge.lib.pointed import hyperbolic
	B = hyperbolic([2])
	assert [B.q[x] for x in [(0, 0), (1, 0), (0, 1), (1, 1)]] == [0, 0, 0, Fraction(1, 2)]
	assert hyperbolic([3]).order == 9
	assert hyperbolic([2, 2]).order == 16


def test_degenerate_form():
	import pytest
	from fractions import Fraction
	from fusionforge.lib.exceptions import DegenerateForm
	from fusionforge.lib.pointed import MetricGroup
	with pytest.raises(DegenerateForm):
		MetricGroup((2,), {(0,): Fraction(0), (1,): Fraction(0)})


def test_lagrangian_from_pair():
	from fusionforge.lib.pointed import hyperbolic, lagrangian_from_pair
	B = hyperbolic([2])
	assert lagrangian_from_pair(B, []).elements == ((0, 0), (1, 0))
	assert lagrangian_from_pair(B, [(1,)]).elements == ((0, 0), (0, 1))

	B = hyperbolic([2, 2])
	L = lagrangian_from_pair(B, [(1, 0), (0, 1)], [["0", "1/2"], ["1/2", "0"]])
	assert L.order == 4
	assert any(any(x[:2]) and any(x[2:]) for x in L.elements)


def test_not_lagrangian():
	import pytest
	from fusionforge.lib.exceptions import NotLagrangian
	from fusionforge.lib.pointed import hyperbolic, lagrangian_from_elements
	with pytest.raises(NotLagrangian):
		lagrangian_from_elements(hyperbolic([2]), [(0, 0), (1, 1)])


def test_invalid_actions():
	import pytest
	from fusionforge.lib.core_ring import FiniteGroup
	from fusionforge.lib.exceptions import InvalidAction
	from fusionforge.lib.pointed import OrthogonalAction, hyperbolic
	B = hyperbolic([2])
	with pytest.raises(InvalidAction):
		OrthogonalAction(B, FiniteGroup.cyclic(2), {"0": [[1, 0], [0, 1]], "1": [[1, 1], [0, 1]]})
	with pytest.raises(InvalidAction):
		OrthogonalAction(B, FiniteGroup.cyclic(2), {"0": [[1, 0], [0, 1]], "1": [[1, 0], [0, 1]]}, {("0", "1"): (1, 0)})


def test_ising_from_duality():
	from fusionforge.lib.pointed import pointed_fusion, preset
	ring = pointed_fusion(preset("ising"))
	assert [len(ring.sectors[g]) for g in ("0", "1")] == [2, 1]
	sigma = ("1", ring.sectors["1"][0])
	assert ring.product(sigma, sigma) == {("0", "χ0"): 1, ("0", "χ1"): 1}
	assert math.isclose(ring.fusion_dims[ring.index(*sigma)], math.sqrt(2))


def test_tambara_yamagami():
	from fusionforge.lib.pointed import pointed_fusion, preset
	ring = pointed_fusion(preset("tambara-yamagami-z2z2"))
	m = ("1", ring.sectors["1"][0])
	assert sum(ring.product(m, m).values()) == 4
	assert math.isclose(ring.fusion_dims[ring.index(*m)], 2)


def test_non_hyperbolic_lagrangian():
	from fusionforge.lib.pointed import MetricGroup, OrthogonalAction, PointedExtension, lagrangian_from_elements, pointed_fusion
	B = MetricGroup.from_bicharacter([9], [["1/9"]])
	L = lagrangian_from_elements(B, [(0,), (3,), (6,)])
	ring = pointed_fusion(PointedExtension(L, OrthogonalAction.trivial(B)))
	assert ring.rank == 3
	assert np.all(ring.N.sum(axis=2) == 1)
	assert np.allclose(ring.fusion_dims, 1)


def _pointed_matrix():
	from fusionforge.lib.core_ring import FiniteGroup
	from fusionforge.lib.pointed import (OrthogonalAction, PointedExtension, PRESETS, duality_swap, hyperbolic, inversion,
	                                     lagrangian_from_pair)
	extensions = [factory() for factory in PRESETS.values()]
	for factors in ([2], [3], [4], [2, 2], [8]):
		B = hyperbolic(factors)
		extensions.append(PointedExtension(lagrangian_from_pair(B, []), OrthogonalAction.trivial(B, FiniteGroup.cyclic(2))))
	for factors in ([3], [4], [2, 4]):
		B = hyperbolic(factors)
		extensions.append(PointedExtension(lagrangian_from_pair(B, []), duality_swap(B)))
		extensions.append(PointedExtension(lagrangian_from_pair(B, []), inversion(B)))
	# Z/4 acting trivially on hyperbolic Z/2, with the carry cocycle
	B = hyperbolic([2])
	G = FiniteGroup.cyclic(4)
	carry = {(str(g), str(h)): (0, 1) for g in range(4) for h in range(4) if g + h >= 4}
	identity = [[1, 0], [0, 1]]
	extensions.append(PointedExtension(lagrangian_from_pair(B, []), OrthogonalAction(B, G, {g: identity for g in G.elements}, carry)))
	return extensions


def test_pointed_engine_matrix():
	from fusionforge.lib.core_ring import dplus_residual, verify_graded_ring
	from fusionforge.lib.pointed import pointed_fusion, recover_pointed
	for extension in _pointed_matrix():
		expected = pointed_fusion(extension)
		recovered = recover_pointed(extension).graded
		assert recovered == expected
		assert verify_graded_ring(expected) == []
		assert dplus_residual(expected) < 1e-6
		for g in expected.group.elements:
			sector = [expected.fusion_dims[expected.index(g, x)] ** 2 for x in expected.sectors[g]]
			assert math.isclose(sum(sector), extension.order_a)


def test_cocycle_shifts_characters():
	from fusionforge.lib.pointed import pointed_fusion, preset
	ring = pointed_fusion(preset("z4-cocycle"))
	product = ring.product(("1", "χ0"), ("1", "χ0"))
	assert product == {("0", "χ2"): 1}


def test_pointed_document():
	from fusionforge.lib import documents
	from fusionforge.lib.pointed import PointedExtension, pointed_fusion, preset
	extension = preset("klein-z3")
	text = documents.dump_document(extension.to_document())
	reloaded = PointedExtension.from_document(json.loads(text))
	assert pointed_fusion(reloaded) == pointed_fusion(extension)


# ========
# Permutation extensions
# ========

def _fibonacci_z4():
	from fusionforge.lib.modular import catalog
	from fusionforge.lib.permutation import cyclic_fusion
	return cyclic_fusion(catalog("fibonacci"), 4)


def _product_line(ring, first, second):
	from fusionforge.lib.permutation import format_product
	return format_product(ring, ring.index(*first), ring.index(*second))


def test_co_order():
	from fusionforge.lib.permutation import CyclicSectorIndex
	assert (CyclicSectorIndex(4, 2).co_order, CyclicSectorIndex(4, 2).order) == (2, 2)
	assert CyclicSectorIndex(4, 0).co_order == 4
	assert CyclicSectorIndex(4, 3).co_order == 1
	assert CyclicSectorIndex(6, 4).blocks(2, 2).shape == (4, 1)


def test_appendix_products():
	ring = _fibonacci_z4()
	expected = [
		(("1", "τ"), ("1", "τ"), "(1,τ)(1,τ) = 3(2,𝟙𝟙)+4(2,𝟙τ)+4(2,τ𝟙)+7(2,ττ)"),
		(("1", "𝟙"), ("1", "𝟙"), "(1,𝟙)(1,𝟙) = 2(2,𝟙𝟙)+(2,𝟙τ)+(2,τ𝟙)+3(2,ττ)"),
		(("1", "𝟙"), ("1", "τ"), "(1,𝟙)(1,τ) = (2,𝟙𝟙)+3(2,𝟙τ)+3(2,τ𝟙)+4(2,ττ)"),
		(("0", "τ⊠τ⊠τ⊠τ"), ("1", "𝟙"), "ττττ(1,𝟙) = 2(1,𝟙)+3(1,τ)"),
		(("0", "𝟙⊠𝟙⊠𝟙⊠τ"), ("2", "𝟙⊠𝟙"), "𝟙𝟙𝟙τ(2,𝟙𝟙) = (2,𝟙τ)"),
		(("0", "𝟙⊠τ⊠𝟙⊠τ"), ("2", "𝟙⊠𝟙"), "𝟙τ𝟙τ(2,𝟙𝟙) = (2,𝟙𝟙)+(2,𝟙τ)"),
		(("0", "𝟙⊠𝟙⊠τ⊠τ"), ("2", "𝟙⊠𝟙"), "𝟙𝟙ττ(2,𝟙𝟙) = (2,ττ)"),
		(("0", "𝟙⊠τ⊠𝟙⊠τ"), ("2", "𝟙⊠τ"), "𝟙τ𝟙τ(2,𝟙τ) = (2,𝟙𝟙)+2(2,𝟙τ)"),
		(("1", "𝟙"), ("2", "𝟙⊠𝟙"), "(1,𝟙)(2,𝟙𝟙) = 2(3,𝟙)+(3,τ)"),
		(("1", "𝟙"), ("2", "𝟙⊠τ"), "(1,𝟙)(2,𝟙τ) = (3,𝟙)+3(3,τ)"),
		(("1", "𝟙"), ("2", "τ⊠τ"), "(1,𝟙)(2,ττ) = 3(3,𝟙)+4(3,τ)"),
		(("1", "τ"), ("2", "𝟙⊠𝟙"), "(1,τ)(2,𝟙𝟙) = (3,𝟙)+3(3,τ)"),
		(("1", "τ"), ("2", "𝟙⊠τ"), "(1,τ)(2,𝟙τ) = 3(3,𝟙)+4(3,τ)"),
		(("1", "τ"), ("2", "τ⊠τ"), "(1,τ)(2,ττ) = 4(3,𝟙)+7(3,τ)"),
		(("2", "𝟙⊠𝟙"), ("2", "𝟙⊠𝟙"), "(2,𝟙𝟙)(2,𝟙𝟙) = 𝟙𝟙𝟙𝟙+𝟙τ𝟙τ+τ𝟙τ𝟙+ττττ"),
		(("2", "𝟙⊠𝟙"), ("2", "𝟙⊠τ"), "(2,𝟙𝟙)(2,𝟙τ) = 𝟙𝟙𝟙τ+𝟙τ𝟙𝟙+𝟙τ𝟙τ+τ𝟙ττ+τττ𝟙+ττττ"),
	]
	for first, second, line in expected:
		assert _product_line(ring, first, second) == line


def test_appendix_sector_zero():
	ring = _fibonacci_z4()
	coefficients = {"𝟙⊠𝟙⊠𝟙⊠𝟙": 1, "𝟙⊠𝟙⊠τ⊠τ": 1, "𝟙⊠τ⊠τ⊠τ": 1, "τ⊠τ⊠τ⊠τ": 2, "𝟙⊠𝟙⊠𝟙⊠τ": 0}
	for label, value in coefficients.items():
		assert ring.coefficient(("1", "𝟙"), ("3", "𝟙"), ("0", label)) == value, label


def test_generator_products_count_invariants():
	from fusionforge.lib.modular import catalog
	from fusionforge.lib.permutation import cyclic_fusion
	for md, n in ((catalog("fibonacci"), 3), (catalog("toric_code"), 2), (catalog("ising"), 3)):
		ring = cyclic_fusion(md, n)
		one = md.labels[md.unit]
		for label in ring.sectors["0"]:
			slots = [md.index(each) for each in label.split("⊠")]
			expected = int(md.ring.multiplicity_vector(slots)[md.unit])
			assert ring.coefficient(("1", one), (str(n - 1), one), ("0", label)) == expected, label


def test_permutation_structure():
	from fusionforge.lib.core_ring import dplus_residual, verify_graded_ring
	from fusionforge.lib.permutation import rotation_violations
	ring = _fibonacci_z4()
	assert [len(ring.sectors[g]) for g in ("0", "1", "2", "3")] == [16, 2, 4, 2]
	assert verify_graded_ring(ring) == []
	assert dplus_residual(ring) < 1e-6
	assert rotation_violations(ring) == []


def test_factorization():
	from fusionforge.lib.modular import catalog
	from fusionforge.lib.permutation import factorization_check
	md = catalog("fibonacci")
	assert factorization_check(md, 4, 2, 2)
	assert factorization_check(md, 4, 0, 2)
	assert factorization_check(md, 6, 2, 4)


def test_permutation_matches_bruteforce():
	from fusionforge.lib.modular import catalog, deligne_power, genus_coefficient_bruteforce
	from fusionforge.lib.permutation import CyclicSectorIndex, _genus_data, cyclic_fusion
	md = catalog("fibonacci")
	powers = {}
	for n in range(1, 5):
		ring = cyclic_fusion(md, n)
		for g, h in itertools.product(range(n), repeat=2):
			p, k, _ = _genus_data(n, g, h)
			if p not in powers:
				powers[p] = deligne_power(md, p).ring
			ring_p = powers[p]
			first, second, target = (CyclicSectorIndex(n, each).blocks(md.rank, p) for each in (g, h, g + h))
			block = ring.block(str(g), str(h))
			for x, y, z in itertools.product(range(len(first)), range(len(second)), range(len(target))):
				expected = genus_coefficient_bruteforce(ring_p, k, [int(each) for each in (*first[x], *second[y])], [int(each) for each in target[z]])
				assert block[x, y, z] == expected, (n, g, h, x, y, z)


def test_parity_up_to_twelve():
	from fusionforge.lib.permutation import parity_check
	for n in range(1, 13):
		report = parity_check(n)
		assert report.passed and report.pairs == n * n, report.to_dict()


def test_permutation_idempotents():
	from fusionforge.lib.modular import catalog
	from fusionforge.lib.permutation import cyclic_fusion, permutation_idempotents, permutation_spec
	md = catalog("fibonacci")
	spec = permutation_spec(md, 2, validate=False)
	vectors = permutation_idempotents(md, 2, 1)
	assert len(vectors) == 2
	for f in vectors:
		assert np.allclose(spec.convolve("1", f, f), f)

	toric = catalog("toric_code")
	ring = cyclic_fusion(toric, 2)
	assert len(permutation_idempotents(toric, 2, 1)) == 4
	assert np.allclose([ring.fusion_dims[ring.index("1", x)] for x in ring.sectors["1"]], 2)


def test_permutation_engine_matches_closed_form():
	from fusionforge.lib.modular import catalog
	from fusionforge.lib.permutation import cyclic_fusion, recover_permutation
	for name in ("fibonacci", "toric_code"):
		md = catalog(name)
		for n in (2, 3):
			recovery = recover_permutation(md, n)
			assert recovery.graded == cyclic_fusion(md, n), (name, n)


# ========
# Command line
# ========

def _invoke(arguments, **kwargs):
	from click.testing import CliRunner
	from fusionforge.cli import entry_point
	return CliRunner().invoke(entry_point, arguments, **kwargs)


def test_cli_genus():
	result = _invoke(["genus", "--category", "fibonacci", "-g", "1", "--insertions", "τ,τ,τ,τ,τ,τ,τ", "--format", "table"])
	assert result.exit_code == 0, result.output
	assert "29" in result.output.splitlines()


def test_cli_permutation_appendix():
	result = _invoke(["permutation", "--category", "fibonacci", "--n", "4", "--format", "appendix-style"])
	assert result.exit_code == 0, result.output
	assert "(1,τ)(1,τ) = 3(2,𝟙𝟙)+4(2,𝟙τ)+4(2,τ𝟙)+7(2,ττ)" in result.output.splitlines()


def test_cli_documents_are_reproducible():
	from fusionforge.lib import documents
	from fusionforge.lib.core_ring import GradedFusionRing
	from fusionforge.lib.modular import catalog
	from fusionforge.lib.permutation import cyclic_fusion
	arguments = ["extension-permutation", "--category", "fibonacci", "--n", "3", "--seed", "5"]
	first, second = _invoke(arguments), _invoke(arguments)
	assert first.exit_code == 0 and first.output == second.output
	document = documents.load_document(first.output, "result")
	assert document["seed"] == 5
	assert GradedFusionRing.from_document(document["result"]["ring"]) == cyclic_fusion(catalog("fibonacci"), 3)


def test_cli_exit_statuses(tmp_path):
	from fusionforge.lib import documents
	from fusionforge.lib.modular import catalog
	assert _invoke(["verlinde", "--category", "not-a-category"]).exit_code == 1

	document = catalog("ising").ring.to_document()
	document["N"][2][2][2] = 1
	broken = tmp_path / "broken.json"
	broken.write_text(documents.dump_document(document), encoding="utf-8")
	assert _invoke(["verify", "--ring", str(broken)]).exit_code == 2

	healthy = tmp_path / "healthy.json"
	healthy.write_text(documents.dump_document(catalog("ising").ring.to_document()), encoding="utf-8")
	assert _invoke(["verify", "--ring", str(healthy)]).exit_code == 0


def test_cli_engine_run(tmp_path):
	from fusionforge.lib import documents
	from fusionforge.lib.modular import catalog, lagrangian_spec
	spec_path = tmp_path / "spec.json"
	spec_path.write_text(documents.dump_document(lagrangian_spec(catalog("fibonacci")).to_document()), encoding="utf-8")
	output_path = tmp_path / "result.json"
	result = _invoke(["engine-run", "--spec", str(spec_path), "--format", "table", "--output", str(output_path)])
	assert result.exit_code == 0, result.output
	document = documents.load_document(output_path.read_text(encoding="utf-8"), "result")
	assert document["result"]["ring"]["fusion_dims"][1] > 1.6


def test_cli_pointed_preset():
	result = _invoke(["extension-pointed", "--preset", "ising", "--engine", "--format", "table"])
	assert result.exit_code == 0, result.output
	assert "(1,χ0)(1,χ0) = χ0+χ1" in result.output.splitlines()


def test_sector_cap_is_enforced_and_overridable():
	import pytest
	from fusionforge.lib.exceptions import MalformedInput
	from fusionforge.lib.modular import catalog
	from fusionforge.lib.permutation import cyclic_fusion, permutation_spec
	fib = catalog("fibonacci")
	with pytest.raises(MalformedInput):
		cyclic_fusion(fib, 4, sector_cap=8)
	with pytest.raises(MalformedInput):
		permutation_spec(fib, 3, validate=False, sector_cap=4)
	assert cyclic_fusion(fib, 4, sector_cap=16).rank == 24

	capped = _invoke(["permutation", "--category", "fibonacci", "--n", "4", "--sector-cap", "8"])
	assert capped.exit_code == 1
	assert "sector cap of 8" in capped.output
	allowed = _invoke(["permutation", "--category", "fibonacci", "--n", "4", "--sector-cap", "16", "--format", "appendix-style"])
	assert allowed.exit_code == 0, allowed.output


def test_cli_bad_environment_is_reported():
	import contextvars
	# a fresh context forces the configuration to load again, from the patched environment
	result = contextvars.Context().run(_invoke, ["verlinde", "--category", "fibonacci"], env={"FUSIONFORGE_TOLERANCE": "not-a-number"})
	assert result.exit_code == 1
	assert "Error (MalformedInput)" in result.output
	assert isinstance(result.exception, SystemExit)


def test_cli_appendix_separates_untwisted_factors():
	result = _invoke(["permutation", "--category", "fibonacci", "--n", "2", "--format", "appendix-style"])
	assert result.exit_code == 0, result.output
	lines = result.output.splitlines()
	assert "𝟙𝟙·ττ = ττ" in lines
	assert "ττ·ττ = 𝟙𝟙+𝟙τ+τ𝟙+ττ" in lines


def test_cli_verify_rejects_malformed_documents(tmp_path):
	from fusionforge.lib import documents
	from fusionforge.lib.modular import catalog
	from fusionforge.lib.permutation import cyclic_fusion
	document = cyclic_fusion(catalog("fibonacci"), 2).to_document()
	document["N"].append([0, 0, 99, 1])
	broken = tmp_path / "broken.json"
	broken.write_text(documents.dump_document(document), encoding="utf-8")
	result = _invoke(["verify", "--ring", str(broken)])
	assert result.exit_code == 1
	assert "Error (MalformedInput)" in result.output

	not_json = tmp_path / "not_json.json"
	not_json.write_text("{ N: ", encoding="utf-8")
	result = _invoke(["verify", "--ring", str(not_json)])
	assert result.exit_code == 1
	assert "MalformedInput" in result.output


def test_cli_engine_document_reloads(tmp_path):
	from fusionforge.lib import documents
	from fusionforge.lib.conv_engine import RecoveryOutput, recover_fusion
	from fusionforge.lib.modular import catalog, lagrangian_spec
	spec = lagrangian_spec(catalog("ising"))
	spec_path = tmp_path / "spec.json"
	spec_path.write_text(documents.dump_document(spec.to_document()), encoding="utf-8")
	result = _invoke(["engine-run", "--spec", str(spec_path), "--seed", "11"])
	assert result.exit_code == 0, result.output
	document = documents.load_document(result.output, "result")
	assert RecoveryOutput.from_document(document["result"]["recovery"]) == recover_fusion(spec, seed=11)


def test_config_defaults():
	config_data = fusionforge.get_config_data()
	assert 0 < config_data.tolerance <= 1e-2
	assert config_data.threads >= 1
