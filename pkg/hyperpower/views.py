# hyperpower/views.py
import logging

from rest_framework import status
from rest_framework.exceptions import ValidationError
from rest_framework.response import Response
from rest_framework.views import APIView

from . import solver
from .exceptions import DivergenceError, InversionError
from .generators import generate_matrix
from .serializers import (
    ComparisonRowSerializer,
    CompareRequestSerializer,
    GenerateRequestSerializer,
    MatrixField,
    SolveReportSerializer,
    SolveRequestSerializer,
)

logger = logging.getLogger(__name__)


# ---------- Single solve ----------
class SolveAPIView(APIView):

    def post(self, request, *args, **kwargs):
        serializer = SolveRequestSerializer(data=request.data)
        serializer.is_valid(raise_exception=True)
        data = serializer.validated_data
        try:
            report = solver.run(data["matrix"], data["method"], data["config"])
        except DivergenceError as e:
            return Response({'detail': str(e)}, status=status.HTTP_422_UNPROCESSABLE_ENTITY)
        except InversionError as e:
            raise ValidationError({'matrix': [str(e)]})
        except Exception as e:
            logger.exception("Solve request failed")
            return Response({'detail': f'Solve failed: {e}'}, status=status.HTTP_500_INTERNAL_SERVER_ERROR)
        return Response(SolveReportSerializer(report).data, status=status.HTTP_200_OK)


# ---------- Method comparison ----------
class CompareAPIView(APIView):

    def post(self, request, *args, **kwargs):
        serializer = CompareRequestSerializer(data=request.data)
        serializer.is_valid(raise_exception=True)
        data = serializer.validated_data
        config = data["config"]
        try:
            reports = solver.run_many(data["matrix"], data["methods"], configure=lambda method: config)
        except DivergenceError as e:
            return Response({'detail': str(e)}, status=status.HTTP_422_UNPROCESSABLE_ENTITY)
        except InversionError as e:
            raise ValidationError({'matrix': [str(e)]})
        except Exception as e:
            logger.exception("Compare request failed")
            return Response({'detail': f'Compare failed: {e}'}, status=status.HTTP_500_INTERNAL_SERVER_ERROR)
        rows = ComparisonRowSerializer(reports, many=True).data
        return Response({'n': reports[0].n, 'rows': rows}, status=status.HTTP_200_OK)


# ---------- Test matrix generation ----------
class GenerateAPIView(APIView):

    def post(self, request, *args, **kwargs):
        serializer = GenerateRequestSerializer(data=request.data)
        serializer.is_valid(raise_exception=True)
        spec = serializer.validated_data["spec"]
        matrix = generate_matrix(spec)
        return Response({
            'kind': spec.kind.value,
            'n': spec.n,
            'seed': spec.seed,
            'matrix': MatrixField().to_representation(matrix),
        }, status=status.HTTP_200_OK)
