import logging

from django.shortcuts import get_object_or_404
from drf_spectacular.utils import extend_schema
from rest_framework import status
from rest_framework.response import Response
from rest_framework.views import APIView

from .exceptions import KernelError
from .models import DerivationRecord
from .serializers import (
    CheckRequestSerializer,
    ConversionRecordSerializer,
    ConvertRequestSerializer,
    DecideRequestSerializer,
    DecideResponseSerializer,
    DerivationDetailSerializer,
)
from .services import convert, decide, submit_derivation

logger = logging.getLogger(__name__)


class CheckDerivationView(APIView):
    """
    POST /api/check
    Store a derivation file and check it.
    """
    @extend_schema(request=CheckRequestSerializer, responses={201: DerivationDetailSerializer})

    def post(self, request):
        serializer = CheckRequestSerializer(data=request.data)
        if not serializer.is_valid():
            return Response(
                {'error': serializer.errors},
                status=status.HTTP_400_BAD_REQUEST
            )

        record = submit_derivation(serializer.validated_data['text'])
        return Response(DerivationDetailSerializer(record).data, status=status.HTTP_201_CREATED)


class ViewDerivationView(APIView):
    """
    GET /api/derivations/<derivation_id>
    """
    @extend_schema(responses={200: DerivationDetailSerializer})

    def get(self, request, derivation_id):
        record = get_object_or_404(DerivationRecord, id=derivation_id)
        return Response(DerivationDetailSerializer(record).data, status=status.HTTP_200_OK)


class DecideView(APIView):
    """
    POST /api/decide
    Decide an equality: a certificate when equal, normal forms when the
    pure decision procedure separates them, a search report otherwise.
    """
    @extend_schema(request=DecideRequestSerializer, responses={200: DecideResponseSerializer})

    def post(self, request):
        serializer = DecideRequestSerializer(data=request.data)
        if not serializer.is_valid():
            return Response(
                {'error': serializer.errors},
                status=status.HTTP_400_BAD_REQUEST
            )

        data = serializer.validated_data
        try:
            result = decide(data['context'], data['left'], data['right'], data['depth'])
        except KernelError as exc:
            return Response({'error': str(exc)}, status=status.HTTP_400_BAD_REQUEST)
        return Response(DecideResponseSerializer(result).data, status=status.HTTP_200_OK)


class ConvertView(APIView):
    """
    POST /api/cl/convert
    Search a combinatory conversion and compile it into a derivation.
    """
    @extend_schema(request=ConvertRequestSerializer, responses={201: ConversionRecordSerializer})

    def post(self, request):
        serializer = ConvertRequestSerializer(data=request.data)
        if not serializer.is_valid():
            return Response(
                {'error': serializer.errors},
                status=status.HTTP_400_BAD_REQUEST
            )

        data = serializer.validated_data
        try:
            record = convert(data['source'], data['target'], data['bound'])
        except KernelError as exc:
            logger.warning(f"Conversion request failed: {exc}")
            return Response({'error': str(exc)}, status=status.HTTP_400_BAD_REQUEST)
        return Response(ConversionRecordSerializer(record).data, status=status.HTTP_201_CREATED)
