# hyperpower/management/commands/run.py
from django.core.management.base import CommandError

from hyperpower import solver
from hyperpower.exceptions import DivergenceError, InversionError
from hyperpower.management.base import EXIT_NOT_CONVERGED, SolverCommand, parse_method, usage_error
from hyperpower.matrix_io import TraceFormat, export_trace


def summary_line(report):
    return ("method=%s n=%d iterations=%d final_res=%.6e matmuls=%d wall_ms=%.3f "
            "converged=%s stop=%s" % (
                report.method.value, report.n, report.iterations, report.final_res,
                report.matmul_count, report.wall_ns / 1e6,
                "true" if report.converged else "false", report.stop_reason.value))


class Command(SolverCommand):
    help = "Invert one matrix and print a summary (usage: manage.py run --method sshp2 --gen hilbert --n 4)"

    def add_arguments(self, parser):
        parser.add_argument('--method', type=str, default='sshp2', help='sshp2, hp2 or hp3')
        self.add_matrix_arguments(parser)
        self.add_solver_arguments(parser)
        parser.add_argument('--trace', type=str, help='Export the iteration trace to this path')
        parser.add_argument('--format', type=str, default='csv', choices=[f.value for f in TraceFormat],
                            help='Trace format (default csv)')

    def handle(self, *args, **options):
        method = parse_method(options['method'])
        matrix, seed = self.load_matrix(options)
        self.require_square(matrix)
        cfg = self.build_config(options, matrix, record_trace=bool(options.get('trace')))

        try:
            report = solver.run(matrix, method, cfg)
        except DivergenceError as e:
            raise CommandError(str(e), returncode=EXIT_NOT_CONVERGED)
        except InversionError as e:
            raise usage_error(str(e))

        self.stdout.write(summary_line(report))
        if options.get('trace'):
            try:
                export_trace(report, options['format'], options['trace'], seed=seed)
            except OSError as e:
                raise usage_error("cannot write %s: %s" % (options['trace'], e.strerror or e))

        if not report.converged:
            raise CommandError("%s did not converge (%s, final residual %.3e)"
                               % (method.value, report.stop_reason.value, report.final_res),
                               returncode=EXIT_NOT_CONVERGED)
