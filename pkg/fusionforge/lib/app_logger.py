""" fusionforge/lib/app_logger.py """

import logging
import pathlib

LOG_FORMAT = '%(asctime)s - %(name)s - %(threadName)s - %(levelname)s - %(message)s'


def build_new_logger(logger_name: str, logfile_path, logging_level: str, stream_to_terminal=True):
	"""
	A named logger writing to an optional file and to stderr.  Stdout is left to result documents.
	"""
	logger = logging.getLogger(logger_name)
	level = logging.getLevelName(str(logging_level).upper())
	logger.setLevel(level if isinstance(level, int) else logging.WARNING)
	logger.handlers = []
	logger.propagate = False

	formatter = logging.Formatter(LOG_FORMAT)
	handlers = []
	if logfile_path:
		handlers.append(logging.FileHandler(filename=pathlib.Path(logfile_path).expanduser().resolve(), mode='a', encoding='utf-8'))
	if stream_to_terminal:
		handlers.append(logging.StreamHandler())  # defaults to sys.stderr

	for handler in handlers:
		handler.setFormatter(formatter)
		logger.addHandler(handler)
	return logger
