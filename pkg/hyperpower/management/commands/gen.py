# hyperpower/management/commands/gen.py
from hyperpower.management.base import SolverCommand, usage_error
from hyperpower.matrix_io import format_matrix_market, write_matrix_market


class Command(SolverCommand):
    help = "Generate a seeded test matrix (usage: manage.py gen --gen spd --n 50 --seed 7 --output a.mtx)"

    def add_arguments(self, parser):
        self.add_matrix_arguments(parser)
        parser.add_argument('--output', type=str, help='Write Matrix Market here instead of stdout')

    def handle(self, *args, **options):
        if options.get('input'):
            raise usage_error("gen builds matrices; use --gen instead of --input")
        matrix, seed = self.load_matrix(options)
        output = options.get('output')
        if not output:
            self.stdout.write(format_matrix_market(matrix), ending='')
            return
        try:
            write_matrix_market(matrix, output)
        except OSError as e:
            raise usage_error("cannot write %s: %s" % (output, e.strerror or e))
        self.stdout.write("Wrote %s n=%d seed=%d to %s" % (options['gen'], matrix.shape[0], seed, output))
