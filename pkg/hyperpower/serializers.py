from django.conf import settings
from rest_framework import serializers

from . import dense
from .coeff import DenomMode
from .exceptions import InversionError
from .generators import GeneratorKind, GeneratorSpec, SEED_MAX
from .solver import MethodKind, SolverConfig

METHOD_CHOICES = [m.value for m in MethodKind]


def _max_n():
    return getattr(settings, "HYPERPOWER_API_MAX_N", 500)


class MatrixField(serializers.Field):
    """
    A matrix as a list of rows. Complex entries travel as [re, im] pairs;
    a matrix with any pair is complex as a whole.
    """
    default_error_messages = {
        "not_rows": "Expected a non-empty list of rows.",
        "ragged": "All rows must have the same length.",
        "entry": "Entries must be numbers or [re, im] pairs.",
    }

    def to_representation(self, value):
        if dense.is_complex(value):
            return [[[float(v.real), float(v.imag)] for v in row] for row in value]
        return [[float(v) for v in row] for row in value]

    def to_internal_value(self, data):
        if not isinstance(data, list) or not data or not all(isinstance(row, list) for row in data):
            self.fail("not_rows")
        if len({len(row) for row in data}) != 1 or not data[0]:
            self.fail("ragged")
        is_complex = False
        rows = []
        for row in data:
            out = []
            for entry in row:
                if isinstance(entry, list):
                    if len(entry) != 2 or not all(_is_number(p) for p in entry):
                        self.fail("entry")
                    out.append(complex(entry[0], entry[1]))
                    is_complex = True
                elif _is_number(entry):
                    out.append(entry)
                else:
                    self.fail("entry")
            rows.append(out)
        try:
            return dense.as_matrix(rows, complex_=is_complex)
        except InversionError as e:
            raise serializers.ValidationError(str(e))


def _is_number(value):
    return isinstance(value, (int, float)) and not isinstance(value, bool)


# ---------- Responses ----------

class IterationRecordSerializer(serializers.Serializer):
    k = serializers.IntegerField()
    alpha = serializers.FloatField(allow_null=True)
    beta = serializers.FloatField(allow_null=True)
    res_norm = serializers.FloatField()
    fallback = serializers.BooleanField()
    wall_ns = serializers.IntegerField()


class SolverConfigSerializer(serializers.Serializer):
    epsilon = serializers.FloatField()
    max_iter = serializers.IntegerField()
    denom_tol = serializers.FloatField()
    denom_mode = serializers.CharField(source="denom_mode.value")
    record_trace = serializers.BooleanField()
    x0_scale = serializers.FloatField(allow_null=True)
    recompute_residual = serializers.BooleanField()
    stagnation_window = serializers.IntegerField()
    stagnation_factor = serializers.FloatField()


class SolveReportSerializer(serializers.Serializer):
    method = serializers.CharField(source="method.value")
    n = serializers.IntegerField()
    is_complex = serializers.BooleanField()
    converged = serializers.BooleanField()
    stop_reason = serializers.CharField(source="stop_reason.value")
    iterations = serializers.IntegerField()
    final_res = serializers.FloatField()
    matmul_count = serializers.IntegerField()
    fallback_count = serializers.IntegerField()
    x0_scale = serializers.FloatField()
    identity_gap = serializers.FloatField()
    wall_ns = serializers.IntegerField()
    config = SolverConfigSerializer()
    trace = IterationRecordSerializer(many=True)
    x = MatrixField()


class ComparisonRowSerializer(serializers.Serializer):
    """One row of a method comparison; the same columns as the CSV table."""
    method = serializers.CharField(source="method.value")
    iterations = serializers.IntegerField()
    matmul_count = serializers.IntegerField()
    final_res = serializers.FloatField()
    converged = serializers.BooleanField()
    stop_reason = serializers.CharField(source="stop_reason.value")
    wall_ns = serializers.IntegerField()


# ---------- Requests ----------

class SolverOptionsSerializer(serializers.Serializer):
    matrix = MatrixField()
    epsilon = serializers.FloatField(required=False)
    max_iter = serializers.IntegerField(required=False, min_value=1)
    denom_tol = serializers.FloatField(required=False)
    denom_mode = serializers.ChoiceField(choices=[m.value for m in DenomMode], required=False)
    x0_scale = serializers.FloatField(required=False)
    recompute_residual = serializers.BooleanField(required=False, default=False)
    record_trace = serializers.BooleanField(required=False, default=True)

    def validate_matrix(self, value):
        rows, cols = value.shape
        if rows != cols:
            raise serializers.ValidationError("Matrix must be square, got %dx%d." % (rows, cols))
        if rows > _max_n():
            raise serializers.ValidationError("Matrix order %d exceeds the limit of %d." % (rows, _max_n()))
        return value

    def validate(self, attrs):
        try:
            attrs["config"] = SolverConfig.from_settings(
                is_complex=dense.is_complex(attrs["matrix"]),
                epsilon=attrs.get("epsilon"),
                max_iter=attrs.get("max_iter"),
                denom_tol=attrs.get("denom_tol"),
                denom_mode=attrs.get("denom_mode"),
                x0_scale=attrs.get("x0_scale"),
                recompute_residual=attrs.get("recompute_residual"),
                record_trace=attrs.get("record_trace"),
            )
        except ValueError as e:
            raise serializers.ValidationError(str(e))
        return attrs


class SolveRequestSerializer(SolverOptionsSerializer):
    method = serializers.ChoiceField(choices=METHOD_CHOICES, default=MethodKind.SSHP2.value)


class CompareRequestSerializer(SolverOptionsSerializer):
    methods = serializers.ListField(child=serializers.ChoiceField(choices=METHOD_CHOICES), min_length=2)

    def validate_methods(self, value):
        if len(set(value)) != len(value):
            raise serializers.ValidationError("Methods must not repeat.")
        return value


class GenerateRequestSerializer(serializers.Serializer):
    kind = serializers.ChoiceField(choices=[k.value for k in GeneratorKind])
    n = serializers.IntegerField(min_value=1)
    seed = serializers.IntegerField(min_value=0, max_value=SEED_MAX, default=0)
    eig_a = serializers.FloatField(required=False, default=2.0)
    eig_b = serializers.FloatField(required=False, default=5.0)
    allow_degenerate = serializers.BooleanField(required=False, default=False)
    complex = serializers.BooleanField(required=False, default=False)

    def validate_n(self, value):
        if value > _max_n():
            raise serializers.ValidationError("n exceeds the limit of %d." % _max_n())
        return value

    def validate(self, attrs):
        try:
            attrs["spec"] = GeneratorSpec(
                kind=attrs["kind"], n=attrs["n"], seed=attrs["seed"],
                eig_a=attrs["eig_a"], eig_b=attrs["eig_b"],
                allow_degenerate=attrs["allow_degenerate"], complex_=attrs["complex"],
            )
        except ValueError as e:
            raise serializers.ValidationError(str(e))
        return attrs
