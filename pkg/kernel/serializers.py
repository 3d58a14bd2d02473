from django.conf import settings
from rest_framework import serializers
from .models import ConversionRecord, DerivationRecord


class CheckRequestSerializer(serializers.Serializer):
    text = serializers.CharField(trim_whitespace=False)


class DerivationRecordSerializer(serializers.ModelSerializer):
    class Meta:
        model = DerivationRecord
        fields = ['id', 'status', 'conclusion', 'rules_used', 'size', 'error', 'error_path', 'created_at', 'checked_at']

    def to_representation(self, instance):
        data = super().to_representation(instance)
        data['derivation_id'] = data.pop('id')
        return data


class DerivationDetailSerializer(DerivationRecordSerializer):
    class Meta(DerivationRecordSerializer.Meta):
        fields = DerivationRecordSerializer.Meta.fields + ['text']


class DecideRequestSerializer(serializers.Serializer):
    context = serializers.CharField(required=False, allow_blank=True, default='')
    left = serializers.CharField()
    right = serializers.CharField()
    depth = serializers.IntegerField(required=False, min_value=0, max_value=settings.CWF_MAX_SEARCH_DEPTH)

    def validate(self, attrs):
        attrs.setdefault('depth', settings.CWF_SEARCH_DEPTH)
        return attrs


class DecideResponseSerializer(serializers.Serializer):
    equal = serializers.BooleanField()
    decided = serializers.BooleanField()
    judgment = serializers.CharField(required=False)
    derivation = serializers.CharField(required=False)
    left_normal_form = serializers.CharField(required=False)
    right_normal_form = serializers.CharField(required=False)
    explored = serializers.IntegerField(required=False)
    reason = serializers.CharField(required=False, allow_blank=True)


class ConvertRequestSerializer(serializers.Serializer):
    source = serializers.CharField()
    target = serializers.CharField()
    bound = serializers.IntegerField(required=False, min_value=0, max_value=settings.CWF_MAX_CONVERT_BOUND)

    def validate(self, attrs):
        attrs.setdefault('bound', settings.CWF_CONVERT_BOUND)
        return attrs


class ConversionRecordSerializer(serializers.ModelSerializer):
    derivation = DerivationRecordSerializer(allow_null=True)

    class Meta:
        model = ConversionRecord
        fields = ['id', 'source', 'target', 'bound', 'found', 'trace', 'explored', 'derivation']

    def to_representation(self, instance):
        data = super().to_representation(instance)
        data['conversion_id'] = data.pop('id')
        return data
