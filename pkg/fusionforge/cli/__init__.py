""" fusionforge/cli/__init__.py """

# Standard Library
from dataclasses import dataclass, field
import pathlib
import sys

# Third Party
import click

# Package
import fusionforge
from fusionforge import __version__
from fusionforge.lib import documents
from fusionforge.lib.exceptions import FusionForgeError, MalformedInput, NotAFusionRing
from fusionforge.lib.utils import normalize_label, validate_datatype

VERBOSE_MODE = False
OUTPUT_FORMATS = ('json', 'table', 'appendix-style')


# ========
# Jobs
# ========

@dataclass
class JobConfig:
	"""
	One command-line request, after parsing.
	"""
	command: str
	inputs: dict = field(default_factory=dict)
	tolerance: float | None = None
	seed: int | None = None
	output_format: str = 'json'
	output_path: pathlib.Path | None = None
	sector_cap: int | None = None

	def validate(self):
		config_data = fusionforge.get_config_data()
		if self.tolerance is None:
			self.tolerance = config_data.tolerance
		if self.seed is None:
			self.seed = config_data.seed
		validate_datatype("tolerance", self.tolerance, (float, int), mandatory=True)
		validate_datatype("seed", self.seed, int, mandatory=True)
		if not 0 < self.tolerance <= 1e-2:
			raise MalformedInput(f"Tolerance must lie in (0, 1e-2], not {self.tolerance}.")
		if not 0 <= self.seed < 2**64:
			raise MalformedInput(f"Seed must be a 64-bit unsigned integer, not {self.seed}.")
		validate_datatype("sector_cap", self.sector_cap, int)
		if self.sector_cap is not None and self.sector_cap < 1:
			raise MalformedInput(f"The sector cap must be positive, not {self.sector_cap}.")
		if self.output_format not in OUTPUT_FORMATS:
			raise MalformedInput(f"Unknown output format '{self.output_format}'.")


def read_input_document(path: str, kind: str | None = None) -> dict:
	with click.open_file(path, mode='r', encoding='utf-8') as fstream:
		try:
			return documents.load_document(fstream.read(), kind)
		except MalformedInput as ex:
			raise click.ClickException(f"({type(ex).__name__}) {path}: {ex}") from ex


def _ring_table(ring) -> str:
	lines = []
	for x in range(ring.rank):
		for y in range(ring.rank):
			products = ring.fusion(ring.labels[x], ring.labels[y])
			terms = '+'.join(f"{count if count != 1 else ''}{label}" for label, count in products.items())
			lines.append(f"{ring.labels[x]} x {ring.labels[y]} = {terms}")
	return '\n'.join(lines)


def _graded_table(graded) -> str:
	from fusionforge.lib.permutation import appendix_lines
	lines = [f"# sector {g}: {', '.join(graded.sectors[g])}" for g in graded.group.elements]
	lines.extend(appendix_lines(graded))
	return '\n'.join(lines)


def _execute(job: JobConfig) -> tuple[dict, str]:
	"""
	Run one job.  Returns the result payload and its human-readable rendering.
	"""
	from fusionforge.lib import modular

	match job.command:

		case 'catalog':
			name = job.inputs.get('name')
			if not name:
				return {"names": list(modular.CATALOG_NAMES)}, '\n'.join(modular.CATALOG_NAMES)
			md = modular.catalog_from_reference(name)
			text = '\n'.join(f"{label}  d={md.dims[i].real:.6f}" for i, label in enumerate(md.labels))
			return {"modular_data": md.to_document()}, text

		case 'verlinde':
			md = modular.catalog_from_reference(job.inputs['category'])
			ring = modular.verlinde(md, job.tolerance)
			return {"ring": ring.to_document()}, _ring_table(ring)

		case 'genus':
			md = modular.catalog_from_reference(job.inputs['category'])
			insertions = [normalize_label(each, md.labels) for each in job.inputs['insertions']]
			value = modular.genus_coefficient(md, job.inputs['genus'], insertions, job.tolerance)
			unrounded = modular.genus_sum(md, job.inputs['genus'], insertions)
			return {"value": value, "unrounded": documents.to_pair(unrounded)}, str(value)

		case 'extension-pointed':
			from fusionforge.lib.pointed import PointedExtension, pointed_fusion, preset, recover_pointed
			if 'preset' in job.inputs:
				extension = preset(job.inputs['preset'])
			else:
				extension = PointedExtension.from_document(job.inputs['extension'])
			result = {}
			if job.inputs.get('engine'):
				recovery = recover_pointed(extension, job.seed)
				graded = recovery.graded
				result["recovery"] = recovery.to_document()
			else:
				graded = pointed_fusion(extension)
			result["ring"] = graded.to_document()
			return result, _graded_table(graded)

		case 'extension-permutation':
			from fusionforge.lib.permutation import appendix_lines, cyclic_fusion, recover_permutation
			md = modular.catalog_from_reference(job.inputs['category'])
			result = {}
			if job.inputs.get('engine'):
				recovery = recover_permutation(md, job.inputs['n'], job.seed, job.sector_cap)
				graded = recovery.graded
				result["recovery"] = recovery.to_document()
			else:
				graded = cyclic_fusion(md, job.inputs['n'], job.tolerance, job.sector_cap)
			result["ring"] = graded.to_document()
			text = '\n'.join(appendix_lines(graded)) if job.output_format == 'appendix-style' else _graded_table(graded)
			return result, text

		case 'engine-run':
			from fusionforge.lib.conv_engine import GradedAlgebraSpec, recover_fusion
			spec = GradedAlgebraSpec.from_document(job.inputs['spec'])
			recovery = recover_fusion(spec, seed=job.seed, tolerance=job.tolerance)
			return {"recovery": recovery.to_document(), "ring": recovery.graded.to_document()}, _graded_table(recovery.graded)

		case 'verify':
			from fusionforge.lib.core_ring import FusionRing, GradedFusionRing, verify_fusion_ring, verify_graded_ring
			document = job.inputs['ring']
			if document.get('kind') == 'graded_fusion_ring':
				violations = verify_graded_ring(GradedFusionRing.from_document(document), job.tolerance)
			else:
				violations = verify_fusion_ring(FusionRing.from_document(document))
			if violations:
				raise NotAFusionRing(f"{len(violations)} violation(s), first: {violations[0]}", violations)
			return {"violations": []}, "✓ all checks passed"

		case _:
			raise MalformedInput(f"Unknown command '{job.command}'.")


def _log_failure(job: JobConfig, ex: Exception):
	try:
		config = fusionforge.get_config()
	except FusionForgeError:
		return  # the configuration itself failed to load
	if config.debug_mode_enabled():
		config.get_logger().exception(f"{job.command} failed with {type(ex).__name__}")
	else:
		config.get_logger().debug(f"{job.command} failed with {type(ex).__name__}")


def run(job: JobConfig) -> int:
	"""
	Execute a job and write its result document.  Returns the process exit status:
	0 on success, 1 for malformed input, 2 for a mathematical diagnostic.
	"""
	try:
		job.validate()
		result, text = _execute(job)
	except NotAFusionRing as ex:
		click.echo(f"✗ {ex}", err=True)
		for violation in ex.violations:
			click.echo(f"    {violation}", err=True)
		return ex.exit_status
	except FusionForgeError as ex:
		_log_failure(job, ex)
		click.echo(f"Error ({type(ex).__name__}): {ex}", err=True)
		return ex.exit_status

	document = documents.result_document(job.command, job.inputs, __version__, job.tolerance, job.seed, result)
	serialized = documents.dump_document(document)
	if job.output_path:
		job.output_path.write_text(serialized, encoding='utf-8')
	if job.output_format == 'json':
		if not job.output_path:
			click.echo(serialized, nl=False)
	else:
		click.echo(text)
	return 0


def _finish(job: JobConfig):
	click.get_current_context().exit(run(job))


# ========
# Click Group and the starting point for the CLI
# ========
@click.group(context_settings={ "help_option_names": ['-h', '--help']})
@click.version_option(version=__version__)
@click.option('--verbose', '-vb', is_flag=True, default=False, help='Prefix to any command for verbosity.')
def entry_point(verbose):
	"""
	CLI interface for fusionforge: fusion rules of graded extensions.
	"""
	if verbose:
		global VERBOSE_MODE  # pylint: disable=global-statement
		VERBOSE_MODE = True
		fusionforge.get_logger().setLevel('DEBUG')
		click.echo(f"Verbose mode is {'on' if verbose else 'off'}.", err=True)


def common_options(function):
	"""
	Options shared by every computing command.
	"""
	function = click.option('--output', '-o', 'output_path', type=click.Path(dir_okay=False, path_type=pathlib.Path),
	                        help='Also write the result document to this file.')(function)
	function = click.option('--seed', type=int, default=None, help='Random seed (defaults to the configured seed).')(function)
	function = click.option('--tolerance', type=float, default=None, help='Integer rounding tolerance.')(function)
	return function


def format_option(choices=('json', 'table')):
	return click.option('--format', 'output_format', type=click.Choice(choices, case_sensitive=False), default='json',
	                    help='json prints the result document; other formats print text.')


# ========
# Click commands begin here.
# ========

@entry_point.command('about')
def cmd_about():
	"""
	About the fusionforge application.
	"""
	print(f"fusionforge version {fusionforge.get_semantic_version()}")
	print("Copyright (C) 2026")
	print("Fusion rules of group-graded extensions, via the convolution and composition products.")


@entry_point.command('config')
@click.argument('command', type=click.Choice(['show', 'init'], case_sensitive=False))
@click.option('--overwrite', is_flag=True, default=False, help="With 'init', replace an existing file.")
def cmd_config(command, overwrite):
	"""
	Configuration of the fusionforge CLI.
	"""
	match command.split():
		case ['show']:
			fusionforge.get_config().print_config()
		case ['init']:
			try:
				path = fusionforge.get_config().write_defaults_to_disk(overwrite=overwrite)
			except FileExistsError as ex:
				click.echo(f"Error: {ex}  Use --overwrite to replace it.", err=True)
				sys.exit(1)
			print(f"Wrote default configuration to '{path}'")
		case _:
			print(f"Subcommand '{command}' not recognized.")


@entry_point.command('catalog')
@click.argument('name', required=False)
@format_option()
def cmd_catalog(name, output_format):
	"""
	List the built-in categories, or show one of them.
	"""
	_finish(JobConfig('catalog', {"name": name} if name else {}, output_format=output_format))


@entry_point.command('verlinde')
@click.option('--category', '-c', required=True, help='Catalog name, su2:<k>, hyperbolic:<n>x..., <name>^<n>, or a JSON file.')
@common_options
@format_option()
def cmd_verlinde(category, tolerance, seed, output_path, output_format):
	"""
	Fusion rules of a modular category from its S-matrix.
	"""
	_finish(JobConfig('verlinde', {"category": category}, tolerance, seed, output_format, output_path))


@entry_point.command('genus')
@click.option('--category', '-c', required=True)
@click.option('-g', '--genus', type=click.IntRange(min=0), required=True)
@click.option('--insertions', '-i', default='', help='Comma-separated labels, e.g. τ,τ or tau,tau.')
@common_options
@format_option()
def cmd_genus(category, genus, insertions, tolerance, seed, output_path, output_format):
	"""
	Genus-g fusion coefficient with the given insertions.
	"""
	labels = [each.strip() for each in insertions.split(',') if each.strip()]
	_finish(JobConfig('genus', {"category": category, "genus": genus, "insertions": labels}, tolerance, seed, output_format, output_path))


@entry_point.command('extension-pointed')
@click.option('--input', 'input_path', type=click.Path(exists=True, dir_okay=False, allow_dash=True), help="A 'pointed_extension' document, or '-' for stdin.")
@click.option('--preset', type=click.Choice(['ising', 'tambara-yamagami-z2z2', 'klein-z3', 'z4-cocycle']))
@click.option('--engine', is_flag=True, default=False, help='Also run the convolution engine and check it against the closed form.')
@common_options
@format_option()
def cmd_extension_pointed(input_path, preset, engine, tolerance, seed, output_path, output_format):
	"""
	Fusion rules of a G-extension of Vec(A).
	"""
	if bool(input_path) == bool(preset):
		raise click.UsageError("Give exactly one of --input and --preset.")
	inputs = {"preset": preset} if preset else {"extension": read_input_document(input_path, 'pointed_extension')}
	inputs["engine"] = engine
	_finish(JobConfig('extension-pointed', inputs, tolerance, seed, output_format, output_path))


@entry_point.command('permutation')
@click.option('--category', '-c', required=True)
@click.option('--n', 'n', type=click.IntRange(min=1), required=True, help='Order of the cyclic group.')
@click.option('--sector-cap', type=click.IntRange(min=1), default=None, help='Largest untwisted sector to build (defaults to the configured sector_cap).')
@click.option('--engine', is_flag=True, default=False, help='Also run the convolution engine and check it against the closed form.')
@common_options
@format_option(OUTPUT_FORMATS)
def cmd_permutation(category, n, engine, sector_cap, tolerance, seed, output_path, output_format):
	"""
	Fusion rules of the Z/n permutation extension of a modular category.
	"""
	_finish(JobConfig('extension-permutation', {"category": category, "n": n, "engine": engine}, tolerance, seed, output_format, output_path,
	                   sector_cap))


entry_point.add_command(cmd_permutation, name='extension-permutation')


@entry_point.command('engine-run')
@click.option('--spec', 'spec_path', type=click.Path(exists=True, dir_okay=False, allow_dash=True), required=True)
@common_options
@format_option()
def cmd_engine_run(spec_path, tolerance, seed, output_path, output_format):
	"""
	Recover the fusion rules encoded by a 'graded_algebra_spec' document.
	"""
	spec = read_input_document(spec_path, 'graded_algebra_spec')
	_finish(JobConfig('engine-run', {"spec": spec}, tolerance, seed, output_format, output_path))


@entry_point.command('verify')
@click.option('--ring', 'ring_path', type=click.Path(exists=True, dir_okay=False, allow_dash=True), required=True)
@common_options
@format_option()
def cmd_verify(ring_path, tolerance, seed, output_path, output_format):
	"""
	Check a fusion ring or graded fusion ring document.  Exit status 2 on violations.
	"""
	ring = read_input_document(ring_path)
	if ring.get('kind') not in ('fusion_ring', 'graded_fusion_ring'):
		raise click.UsageError(f"Expected a fusion ring document, found '{ring.get('kind')}'.")
	_finish(JobConfig('verify', {"ring": ring}, tolerance, seed, output_format, output_path))


test_choices: list = [
	'appendix',
	'fibonacci-lucas',
	'recovery',
	'pointed',
	'parity',
]
@entry_point.command('test')
@click.argument('command', type=click.Choice(test_choices, case_sensitive=False))
def cli_test(command):
	"""
	Run one of the built-in self checks.
	"""
	from fusionforge.lib import tests

	match command:
		case 'appendix':
			checks = [tests.test_appendix_products, tests.test_appendix_sector_zero]
		case 'fibonacci-lucas':
			checks = [tests.test_fibonacci_lucas_table]
		case 'recovery':
			checks = [tests.test_recovery_identity_catalog]
		case 'pointed':
			checks = [tests.test_pointed_engine_matrix]
		case 'parity':
			checks = [tests.test_parity_up_to_twelve]
		case _:
			test_choices_string = '\n    '.join(test_choices)
			print(f"Unhandled subcommand '{command}'.  Please choose one of:\n    {test_choices_string}\n")
			return

	failures = 0
	for check in checks:
		try:
			check()
			print(f"✓ {check.__name__}")
		except AssertionError as ex:
			failures += 1
			print(f"✗ {check.__name__}: {ex}")
	if failures:
		sys.exit(1)
