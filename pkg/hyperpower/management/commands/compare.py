# hyperpower/management/commands/compare.py
import csv

from django.core.management.base import CommandError

from hyperpower import solver
from hyperpower.exceptions import DivergenceError, InversionError
from hyperpower.management.base import EXIT_NOT_CONVERGED, SolverCommand, parse_method, usage_error
from hyperpower.matrix_io import FLOAT_FORMAT

TABLE_COLUMNS = ("method", "iterations", "matmul_count", "final_res", "converged", "stop_reason", "wall_ns")


def table_rows(reports):
    return [
        (r.method.value, r.iterations, r.matmul_count, r.final_res,
         "true" if r.converged else "false", r.stop_reason.value, r.wall_ns)
        for r in reports
    ]


def format_table(reports):
    lines = ["%-6s %10s %8s %14s %9s %10s %12s" % ("method", "iterations", "matmuls", "final_res",
                                                   "converged", "stop", "wall_ms")]
    for method, iterations, matmuls, final_res, converged, stop, wall_ns in table_rows(reports):
        lines.append("%-6s %10d %8d %14.6e %9s %10s %12.3f"
                     % (method, iterations, matmuls, final_res, converged, stop, wall_ns / 1e6))
    return "\n".join(lines)


class Command(SolverCommand):
    help = ("Run several methods on the same matrix and tabulate them "
            "(usage: manage.py compare --methods sshp2,hp2,hp3 --gen spd --n 100 --seed 7)")

    def add_arguments(self, parser):
        parser.add_argument('--methods', type=str, default='sshp2,hp2,hp3',
                            help='Comma-separated methods, at least two')
        self.add_matrix_arguments(parser)
        self.add_solver_arguments(parser)
        parser.add_argument('--table-csv', type=str, help='Also write the table as CSV')

    def handle(self, *args, **options):
        methods = [parse_method(m) for m in options['methods'].split(',') if m.strip()]
        if len(set(methods)) < 2:
            raise usage_error("compare needs at least two distinct methods, got %r" % options['methods'])
        matrix, _seed = self.load_matrix(options)
        self.require_square(matrix)
        cfg = self.build_config(options, matrix, record_trace=False)

        try:
            reports = solver.run_many(matrix, methods, configure=lambda method: cfg)
        except DivergenceError as e:
            raise CommandError(str(e), returncode=EXIT_NOT_CONVERGED)
        except InversionError as e:
            raise usage_error(str(e))

        self.stdout.write("n=%d" % matrix.shape[0])
        self.stdout.write(format_table(reports))

        path = options.get('table_csv')
        if path:
            try:
                with open(path, 'w', newline='', encoding='utf-8') as fh:
                    writer = csv.writer(fh, lineterminator='\n')
                    writer.writerow(TABLE_COLUMNS)
                    for row in table_rows(reports):
                        writer.writerow([row[0], row[1], row[2], FLOAT_FORMAT % row[3]] + list(row[4:]))
            except OSError as e:
                raise usage_error("cannot write %s: %s" % (path, e.strerror or e))

        stalled = [r.method.value for r in reports if not r.converged]
        if stalled:
            raise CommandError("not converged: %s" % ", ".join(stalled), returncode=EXIT_NOT_CONVERGED)
