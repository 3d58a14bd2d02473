# Generated by Django 5.2.11 on 2026-10-17 09:12

import django.db.models.deletion
from django.db import migrations, models


class Migration(migrations.Migration):

    initial = True

    dependencies = [
    ]

    operations = [
        migrations.CreateModel(
            name='DerivationRecord',
            fields=[
                ('id', models.BigAutoField(auto_created=True, primary_key=True, serialize=False, verbose_name='ID')),
                ('text', models.TextField(help_text='Derivation in the s-expression file format')),
                ('status', models.CharField(choices=[('pending', 'Pending'), ('accepted', 'Accepted'), ('rejected', 'Rejected')], default='pending', max_length=10)),
                ('conclusion', models.TextField(blank=True, default='')),
                ('rules_used', models.JSONField(blank=True, default=list)),
                ('size', models.IntegerField(blank=True, help_text='Distinct nodes', null=True)),
                ('error', models.TextField(blank=True, default='')),
                ('error_path', models.JSONField(blank=True, help_text='Premise indices from the root', null=True)),
                ('created_at', models.DateTimeField(auto_now_add=True)),
                ('checked_at', models.DateTimeField(blank=True, null=True)),
            ],
            options={
                'db_table': 'derivations',
                'ordering': ['-created_at'],
            },
        ),
        migrations.CreateModel(
            name='ConversionRecord',
            fields=[
                ('id', models.BigAutoField(auto_created=True, primary_key=True, serialize=False, verbose_name='ID')),
                ('source', models.CharField(max_length=2000)),
                ('target', models.CharField(max_length=2000)),
                ('bound', models.IntegerField()),
                ('found', models.BooleanField(default=False)),
                ('trace', models.TextField(blank=True, default='')),
                ('explored', models.IntegerField(default=0)),
                ('created_at', models.DateTimeField(auto_now_add=True)),
                ('derivation', models.ForeignKey(blank=True, null=True, on_delete=django.db.models.deletion.SET_NULL, related_name='conversions', to='kernel.derivationrecord')),
            ],
            options={
                'db_table': 'conversions',
                'ordering': ['-created_at'],
            },
        ),
    ]
