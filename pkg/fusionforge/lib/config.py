""" fusionforge/lib/config.py """

# Standard library
from dataclasses import dataclass, field
import os
import pathlib
import pprint
try:
	import tomllib  # New in Python versions 3.11+.  Useless for writing TOML, but can read it.
except ModuleNotFoundError:  # Python 3.10: API-identical backport
	import tomli as tomllib

# Third Party
import psutil
from schema import Schema, And, Or, Optional, SchemaError, Use
import toml

from fusionforge.lib.app_logger import build_new_logger
from fusionforge.lib.exceptions import MalformedInput
from fusionforge.lib.utils import DictToDot

BASE_DIRECTORY = pathlib.Path("~/.config/fusionforge").expanduser()
MAX_TOLERANCE = 1e-2

# Environment variable name -> (configuration key, converter)
ENVIRONMENT_OVERRIDES = {
	"FUSIONFORGE_TOLERANCE": ("tolerance", float),
	"FUSIONFORGE_THREADS": ("threads", int),
}


def valid_tolerance(value) -> bool:
	return 0 < value <= MAX_TOLERANCE


def get_config_schema():
	"""
	Return the schema rules for the configuration file.
	"""
	result = Schema(
		{
			"description": str,
			"tolerance": And(Use(float), valid_tolerance),  # integer rounding tolerance
			"eigen_gap": And(Use(float), lambda x: 0 < x < 1),
			"extraction_retries": And(int, lambda x: x >= 1),
			"fp_tolerance": And(Use(float), lambda x: x > 0),
			"fp_max_iterations": And(int, lambda x: x >= 1),
			"sector_cap": And(int, lambda x: x >= 1),
			"threads": And(int, lambda x: x >= 1),
			"seed": And(int, lambda x: 0 <= x < 2**64),
			"tracing_level": And(str, lambda x: x.upper() in ('DEBUG', 'INFO', 'WARNING', 'ERROR', 'CRITICAL')),
			Optional("log_file"): And(str, len),
			Optional("debug_mode"): Or(int, bool),
		})
	return result


def get_default_config_template():
	# WARNING: Do not use 'None' as a value or the entire key will be left out of TOML file.
	return {
		"description": "fusionforge configuration",
		"tolerance": 1e-6,
		"eigen_gap": 1e-6,
		"extraction_retries": 8,
		"fp_tolerance": 1e-12,
		"fp_max_iterations": 10_000,
		"sector_cap": 4096,
		"threads": psutil.cpu_count(logical=False) or 1,
		"seed": 0,
		"tracing_level": "WARNING",
		"debug_mode": False,
	}


def default_config_file_path() -> pathlib.Path:
	if os.environ.get("FUSIONFORGE_CONFIG"):
		return pathlib.Path(os.environ["FUSIONFORGE_CONFIG"]).expanduser()
	return BASE_DIRECTORY / "fusionforge.toml"


@dataclass
class AppConfig:
	"""
	Class to hold application configuration data.
	This approach avoids import side effects, and polluting any namespaces.
	"""
	__logger: object = None
	__data_dict: dict = field(default_factory=dict)
	__config_file_path: pathlib.Path = None
	__loaded_from_disk: bool = False
	data: object = None  # this will end up being a list of attributes, accessible via dot notation

	def __init__(self, config_file_path=None):
		self.__logger = None
		self.__loaded_from_disk = False
		self.__config_file_path = pathlib.Path(config_file_path) if config_file_path else default_config_file_path()
		self.init_config_from_files()

	def get(self, key):
		return self.as_dictionary()[key]

	def as_dictionary(self):
		"""
		Return the configuration as a Python dictionary.
		"""
		return self.__data_dict

	def get_config_file_path(self):
		"""
		Return a path to the main configuration file.
		"""
		return self.__config_file_path

	def loaded_from_disk(self) -> bool:
		return self.__loaded_from_disk

	def debug_mode_enabled(self):
		"""
		Is the application running in "Debugging Mode"?
		"""
		return bool(self.as_dictionary().get('debug_mode', False))

	def print_config(self):
		"""
		Print the main configuration settings to stdout.
		"""
		print()  # empty line for aesthetics
		print(f"# source: {self.get_config_file_path() if self.loaded_from_disk() else 'built-in defaults'}")
		printer = pprint.PrettyPrinter(indent=4, compact=False)
		printer.pprint(self.as_dictionary())
		print()  # empty line for aesthetics

	def __read_configuration_from_disk(self):
		"""
		Load the main configuration file into memory, on top of the defaults.
		"""
		with self.get_config_file_path().open(mode="rb") as fstream:
			data_dictionary = tomllib.load(fstream)

		merged = get_default_config_template()
		merged.update(data_dictionary)
		self.__data_dict = merged
		self.__loaded_from_disk = True

	def __apply_environment_overrides(self):
		for variable_name, (key, converter) in ENVIRONMENT_OVERRIDES.items():
			raw_value = os.environ.get(variable_name)
			if raw_value is None or raw_value == "":
				continue
			try:
				self.__data_dict[key] = converter(raw_value)
			except ValueError as ex:
				raise MalformedInput(f"Environment variable {variable_name}='{raw_value}' is not a valid {converter.__name__}.") from ex

	def init_config_from_files(self):
		"""
		Load from the configuration file if it exists.  Otherwise use the default values in memory.
		"""
		try:
			self.__read_configuration_from_disk()
		except FileNotFoundError:
			self.revert_to_defaults()

		self.__apply_environment_overrides()
		try:
			self.__data_dict = get_config_schema().validate(self.__data_dict)
		except SchemaError as ex:
			raise MalformedInput(f"Invalid configuration ({self.get_config_file_path()}): {ex}") from ex

		# Enable some dot notation, just to make code a bit cleaner
		self.data = DictToDot(self.as_dictionary())

	def revert_to_defaults(self):
		"""
		Revert the in-memory configuration to the default settings.
		"""
		self.__data_dict = get_default_config_template()
		self.__loaded_from_disk = False

	def write_defaults_to_disk(self, overwrite=False) -> pathlib.Path:
		"""
		Write the default configuration template to disk in TOML format.
		"""
		new_file_path = self.get_config_file_path()
		if new_file_path.exists() and not overwrite:
			raise FileExistsError(f"Configuration file '{new_file_path}' already exists.")
		new_file_path.parent.mkdir(parents=True, exist_ok=True)
		with open(new_file_path, mode="w", encoding="utf-8") as fstream:
			toml.dump(get_default_config_template(), fstream)
		return new_file_path

	def get_logger(self):
		"""
		Returns the instance of logger associated with this configuration.
		"""
		if not self.__logger:
			self.__logger = build_new_logger("fusionforge",
			                                 self.as_dictionary().get("log_file"),
			                                 self.data.tracing_level.upper())
		return self.__logger
