""" fusionforge/lib/exceptions.py """


class FusionForgeError(Exception):
	"""
	Base class for every error raised by fusionforge.
	"""
	exit_status = 1


# ----------------
# Malformed input
# ----------------

class MalformedInput(FusionForgeError, ValueError):
	exit_status = 1

class DegenerateRing(MalformedInput):
	"""
	Rank 0, a missing unit, or a tensor of the wrong shape.
	"""

class UnknownCategory(MalformedInput):
	pass

class DegenerateForm(MalformedInput):
	"""
	The quadratic form of a metric group is degenerate.
	"""

class NotLagrangian(MalformedInput):
	pass

class InvalidAction(MalformedInput):
	"""
	The orthogonal action or its 2-cocycle fails an invariant.
	"""


# ----------------
# Diagnostics: the input parsed, but the mathematics did not work out.
# ----------------

class Diagnostic(FusionForgeError):
	exit_status = 2

class NotIntegral(Diagnostic):

	def __init__(self, formula: str, indices, value, tolerance: float):
		self.formula = formula
		self.indices = indices
		self.value = value
		self.tolerance = tolerance
		super().__init__(f"{formula}: coefficient at {indices} is {value!r}, "
		                 f"which is not within {tolerance:g} of a nonnegative integer.")

class NoDual(Diagnostic):
	pass

class NotSemisimple(Diagnostic):
	pass

class NonConvergence(Diagnostic):
	pass

class ParityViolation(Diagnostic):
	pass

class SelfConsistency(Diagnostic):
	pass

class NotAFusionRing(Diagnostic):
	"""
	A computed ring failed verification.  Carries the list of violations.
	"""
	def __init__(self, message: str, violations=None):
		self.violations = list(violations or [])
		super().__init__(message)
