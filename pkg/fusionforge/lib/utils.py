""" fusionforge/lib/utils.py """

# NOTE: Functions here should not depend on other fusionforge modules, apart from the exceptions.

# Standard Library
import math
import time

# Package
from fusionforge.lib.exceptions import MalformedInput

BOXTIMES = "⊠"

# ASCII spellings accepted on the command line.
LABEL_ALIASES = {
	"1": "𝟙",
	"one": "𝟙",
	"tau": "τ",
	"sigma": "σ",
	"psi": "ψ",
	"eps": "ε",
	"epsilon": "ε",
}


def validate_datatype(argument_name, argument_value, expected_type, mandatory=False):
	"""
	A helpful generic function for checking a variable's datatype, and throwing an error on mismatches.

	NOTE: expected_type can be a single Type, or a tuple of Types.
	"""
	# Throw error if missing mandatory argument.
	NoneType = type(None)
	if mandatory and isinstance(argument_value, NoneType):
		raise MalformedInput(f"Argument '{argument_name}' is mandatory.")

	if argument_value is None:
		return argument_value  # datatype is going to be a NoneType, which is okay if not mandatory.

	# Check argument type
	if not isinstance(argument_value, expected_type):
		if isinstance(expected_type, tuple):
			expected_type_names = [ each.__name__ for each in expected_type ]
			msg = f"Argument '{argument_name}' should be one of these types: '{', '.join(expected_type_names)}'"
		else:
			msg = f"Argument '{argument_name}' should be of type = '{expected_type.__name__}'"
		msg += f"\nFound a {type(argument_value).__name__} with value '{argument_value}' instead."
		raise MalformedInput(msg)

	# Otherwise, return the argument to the caller.
	return argument_value


def join_labels(labels) -> str:
	"""
	Canonical label of a Deligne product of simples.
	"""
	return BOXTIMES.join(labels)


def split_label(label: str) -> list[str]:
	return label.split(BOXTIMES)


def normalize_label(label: str, known_labels) -> str:
	"""
	Map a user-supplied label (possibly spelled with ASCII aliases) onto one of 'known_labels'.
	Returns the label unchanged when nothing matches, so the caller can report it.
	"""
	label = label.strip()
	if label in known_labels:
		return label
	if label in LABEL_ALIASES and LABEL_ALIASES[label] in known_labels:
		return LABEL_ALIASES[label]

	pieces = label.replace(" ", "").replace(BOXTIMES, "x").split("x")
	candidate = join_labels(LABEL_ALIASES.get(piece, piece) for piece in pieces)
	if candidate in known_labels:
		return candidate
	return label


def is_close_to_integer(value: complex, tolerance: float) -> tuple[bool, int]:
	"""
	Returns (ok, nearest) where 'ok' means 'value' lies within 'tolerance' of the nonnegative integer 'nearest'.
	"""
	value = complex(value)
	nearest = round(value.real)
	ok = abs(value - nearest) <= tolerance and nearest >= 0
	return ok, int(nearest)


def exact_integer_sqrt(numerator: int, denominator: int) -> int | None:
	"""
	Returns the integer r with r*r == numerator/denominator, or None when no such integer exists.
	"""
	if denominator <= 0 or numerator < 0 or numerator % denominator:
		return None
	quotient = numerator // denominator
	root = math.isqrt(quotient)
	return root if root * root == quotient else None


class Stopwatch:
	"""
	My own take on a stopwatch program.
	"""
	def __init__(self, description=None, logger=None):
		self.start = time.perf_counter()
		self.last_checkpoint = self.start
		self.description = description or "Stopwatch"
		self.logger = logger

	def get_elapsed_seconds_total(self):
		now = time.perf_counter()
		seconds_elapsed_start = round(now - self.start,3)
		return seconds_elapsed_start

	def elapsed(self, prefix=None, no_print=False):
		"""
		Log the time elapsed since the start, and since the last checkpoint.
		"""
		now = time.perf_counter()
		seconds_elapsed_start = round(now - self.start,3)
		seconds_elapsed_last_checkpoint = round(now - self.last_checkpoint,3)

		if not no_print and self.logger:
			message = f"{seconds_elapsed_last_checkpoint} seconds since last Checkpoint, {seconds_elapsed_start} since Start."
			if prefix or self.description:
				message = f"---> {prefix or self.description} {message}"
			self.logger.debug(message)

		# This is now the 'last_checkpoint'
		self.last_checkpoint = now
		return seconds_elapsed_start


class DictToDot(dict):
	"""
	Makes a dictionary accessible via dot notation.
	"""
	def __init__(self, *args, **kwargs):
		super(DictToDot, self).__init__(*args, **kwargs)
		for arg in args:
			if isinstance(arg, dict):
				for k, v in arg.items():
					self[k] = v

		if kwargs:
			for k, v in kwargs.items():
				self[k] = v

	def __getattr__(self, attr):
		return self.get(attr)

	def __setattr__(self, key, value):
		self.__setitem__(key, value)

	def __setitem__(self, key, value):
		super(DictToDot, self).__setitem__(key, value)
		self.__dict__.update({key: value})

	def __delattr__(self, item):
		self.__delitem__(item)

	def __delitem__(self, key):
		super(DictToDot, self).__delitem__(key)
		del self.__dict__[key]
