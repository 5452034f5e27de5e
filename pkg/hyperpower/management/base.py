# hyperpower/management/base.py
"""
Flags and plumbing shared by the gen, run and compare commands.

Exit codes: 0 when the run converged, 2 when it did not (or diverged),
1 for bad flags and unreadable input.
"""
import logging
import sys

from django.core.management.base import BaseCommand, CommandError

from hyperpower import dense
from hyperpower.coeff import DenomMode
from hyperpower.exceptions import InversionError
from hyperpower.generators import GeneratorKind, GeneratorSpec, generate_matrix
from hyperpower.matrix_io import read_matrix_market
from hyperpower.solver import MethodKind, SolverConfig

EXIT_USAGE = 1
EXIT_NOT_CONVERGED = 2

_VERBOSITY_LEVELS = {2: logging.INFO, 3: logging.DEBUG}


def usage_error(message):
    return CommandError(message, returncode=EXIT_USAGE)


def parse_method(value):
    try:
        return MethodKind(value.strip().lower())
    except ValueError:
        raise usage_error("unknown method %r (choose from %s)"
                          % (value, ", ".join(m.value for m in MethodKind))) from None


class SolverCommand(BaseCommand):
    """BaseCommand whose flag-parsing errors exit with status 1."""

    def create_parser(self, prog_name, subcommand, **kwargs):
        parser = super().create_parser(prog_name, subcommand, **kwargs)
        # argparse would exit with 2, which is reserved for non-convergence
        parser.called_from_command_line = False
        return parser

    def run_from_argv(self, argv):
        try:
            super().run_from_argv(argv)
        except CommandError as e:
            # only parse errors get here; Django handles the ones from handle()
            self.create_parser(argv[0], argv[1]).print_usage(sys.stderr)
            sys.stderr.write("%s\n" % e)
            sys.exit(e.returncode)

    def execute(self, *args, **options):
        level = _VERBOSITY_LEVELS.get(options.get("verbosity", 1))
        if level is None:
            return super().execute(*args, **options)
        hyperpower_logger = logging.getLogger("hyperpower")
        previous = hyperpower_logger.level
        hyperpower_logger.setLevel(level)
        try:
            return super().execute(*args, **options)
        finally:
            hyperpower_logger.setLevel(previous)

    # ---------- flag groups ----------
    def add_matrix_arguments(self, parser, require_source=True):
        source = parser.add_mutually_exclusive_group(required=require_source)
        source.add_argument('--input', type=str, help='Matrix Market file to read')
        source.add_argument('--gen', type=str, choices=[k.value for k in GeneratorKind],
                            help='Generate a test matrix of this kind')
        parser.add_argument('--n', type=int, help='Order of the generated matrix')
        parser.add_argument('--seed', type=int, default=0, help='Generator seed (unsigned 64-bit)')
        parser.add_argument('--eig-a', type=float, default=2.0, help='two-eig: first eigenvalue')
        parser.add_argument('--eig-b', type=float, default=5.0, help='two-eig: second eigenvalue')
        parser.add_argument('--allow-degenerate', action='store_true',
                            help='two-eig: accept equal eigenvalues')
        parser.add_argument('--complex', action='store_true', help='Treat the matrix as complex')

    def add_solver_arguments(self, parser):
        parser.add_argument('--eps', type=float, help='Residual-norm stop (default 1e-10)')
        parser.add_argument('--max-iter', type=int, help='Iteration cap (default 1000)')
        parser.add_argument('--denom-tol', type=float,
                            help='Gram determinant tolerance (default 1e-12 real, 1e-5 complex)')
        parser.add_argument('--denom-rel', action='store_true',
                            help='Scale the determinant test by max(1, c00*c11)')
        parser.add_argument('--x0-scale', type=float, help='Use X0 = c*A^* with this c')
        parser.add_argument('--recompute-residual', action='store_true',
                            help='Recompute F = I - AX after every step')

    # ---------- helpers ----------
    def load_matrix(self, options):
        """Return (matrix, seed); seed is None for file input."""
        try:
            if options.get('input'):
                matrix = read_matrix_market(options['input'])
                seed = None
            else:
                matrix = generate_matrix(self.generator_spec(options))
                seed = options['seed']
        except OSError as e:
            raise usage_error("cannot read %s: %s" % (options.get('input'), e.strerror or e))
        except (InversionError, ValueError) as e:
            raise usage_error(str(e))
        if options.get('complex'):
            matrix = dense.to_complex(matrix)
        return matrix, seed

    def generator_spec(self, options):
        if options.get('n') is None:
            raise usage_error("--n is required with --gen")
        return GeneratorSpec(
            kind=options['gen'],
            n=options['n'],
            seed=options['seed'],
            eig_a=options['eig_a'],
            eig_b=options['eig_b'],
            allow_degenerate=options['allow_degenerate'],
            complex_=options.get('complex', False),
        )

    def build_config(self, options, matrix, record_trace=True):
        try:
            return SolverConfig.from_settings(
                is_complex=dense.is_complex(matrix),
                epsilon=options.get('eps'),
                max_iter=options.get('max_iter'),
                denom_tol=options.get('denom_tol'),
                denom_mode=DenomMode.RELATIVE if options.get('denom_rel') else None,
                x0_scale=options.get('x0_scale'),
                recompute_residual=options.get('recompute_residual') or None,
                record_trace=record_trace,
            )
        except ValueError as e:
            raise usage_error(str(e))

    def require_square(self, matrix):
        rows, cols = matrix.shape
        if rows != cols:
            raise usage_error("matrix must be square, got %dx%d" % (rows, cols))
