"""
Record validators
Marshmallow schemas for dataset and prediction lines
"""

from marshmallow import Schema, fields, validate, validates, ValidationError


class FeatureRecordSchema(Schema):
    """Schema validation cho one dataset line"""

    id = fields.Str(required=True, validate=validate.Length(min=1),
                    error_messages={'required': 'id is required'})
    streams = fields.Dict(
        keys=fields.Str(validate=validate.Length(min=1)),
        values=fields.List(fields.Float(allow_nan=False), validate=validate.Length(min=1)),
        required=True,
        error_messages={'required': 'streams is required'}
    )
    # Range against C is checked by the DAO, which knows C
    emotion = fields.Int(strict=True, allow_none=True, load_default=None)
    valence = fields.Float(allow_nan=False, allow_none=True, load_default=None)

    @validates('streams')
    def validate_streams_not_empty(self, value, **kwargs):
        """At least one stream per record"""
        if not value:
            raise ValidationError('At least one stream is required')


class PredictionRecordSchema(Schema):
    """Schema validation cho one exported prediction line"""

    id = fields.Str(required=True, validate=validate.Length(min=1))
    probs = fields.List(fields.Float(allow_nan=False), required=True, validate=validate.Length(min=2))
    valence = fields.Float(allow_nan=False, required=True)

    @validates('probs')
    def validate_distribution(self, value, **kwargs):
        """Posterior must be a distribution"""
        if any(p < 0 for p in value):
            raise ValidationError('probs must be non-negative')
        if abs(sum(value) - 1.0) > 1e-6:
            raise ValidationError('probs must sum to 1')
