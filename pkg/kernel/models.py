from django.db import models


class DerivationRecord(models.Model):
    class Status(models.TextChoices):
        PENDING = 'pending'
        ACCEPTED = 'accepted'
        REJECTED = 'rejected'

    text = models.TextField(help_text="Derivation in the s-expression file format")
    status = models.CharField(max_length=10, choices=Status.choices, default=Status.PENDING)
    conclusion = models.TextField(blank=True, default='')
    rules_used = models.JSONField(default=list, blank=True)
    size = models.IntegerField(null=True, blank=True, help_text="Distinct nodes")
    error = models.TextField(blank=True, default='')
    error_path = models.JSONField(null=True, blank=True, help_text="Premise indices from the root")
    created_at = models.DateTimeField(auto_now_add=True)
    checked_at = models.DateTimeField(null=True, blank=True)

    class Meta:
        db_table = 'derivations'
        ordering = ['-created_at']

    def __str__(self):
        return f"Derivation {self.id} ({self.status})"


class ConversionRecord(models.Model):
    source = models.CharField(max_length=2000)
    target = models.CharField(max_length=2000)
    bound = models.IntegerField()
    found = models.BooleanField(default=False)
    trace = models.TextField(blank=True, default='')
    derivation = models.ForeignKey(
        DerivationRecord, null=True, blank=True, on_delete=models.SET_NULL, related_name='conversions'
    )
    explored = models.IntegerField(default=0)
    created_at = models.DateTimeField(auto_now_add=True)

    class Meta:
        db_table = 'conversions'
        ordering = ['-created_at']

    def __str__(self):
        return f"{self.source} ~ {self.target} ({'found' if self.found else 'not within ' + str(self.bound)})"
