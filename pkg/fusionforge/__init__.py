""" fusionforge/__init__.py """

import contextvars
import importlib.metadata

from semantic_version import Version as SemanticVersion

try:
	__version__ = importlib.metadata.version("fusionforge")  # read the version from pyproject.toml
except importlib.metadata.PackageNotFoundError:
	__version__ = "0.0.0"  # running from a source checkout

shared_config = contextvars.ContextVar('config')

def get_config():
	# If the context variable has not been initialized, do so now.
	if isinstance(shared_config.get('config'), str):
		initialize_shared_config()
	return shared_config.get('config')

def get_config_data():
	# If the context variable has not been initialized, do so now.
	if isinstance(shared_config.get('config'), str):
		initialize_shared_config()
	return shared_config.get('config').data

def get_logger():
	return get_config().get_logger()

def get_semantic_version() -> SemanticVersion:
	return SemanticVersion(__version__)

def initialize_shared_config():
	"""
	A useful one-liner function for initalizing the global content variable.
	"""
	from fusionforge.lib.config import AppConfig
	shared_config.set(AppConfig())
