# Generated by Django 4.2.17 on 2026-10-19 09:00

from django.db import migrations, models


class Migration(migrations.Migration):

    initial = True

    dependencies = []

    operations = [
        migrations.CreateModel(
            name='RunRecord',
            fields=[
                ('id', models.BigAutoField(auto_created=True, primary_key=True, serialize=False, verbose_name='ID')),
                ('command', models.CharField(max_length=30)),
                ('parameters', models.JSONField(default=dict)),
                ('output_path', models.CharField(blank=True, max_length=500)),
                ('checksum', models.CharField(blank=True, help_text='SHA-256 of the emitted file', max_length=64)),
                ('status', models.CharField(choices=[('success', 'Succeeded'), ('invalid', 'Validation Error'), ('failed', 'Verification Failed'), ('io_error', 'I/O Error')], max_length=10)),
                ('exit_code', models.PositiveSmallIntegerField(default=0)),
                ('message', models.TextField(blank=True)),
                ('created_at', models.DateTimeField(auto_now_add=True)),
            ],
            options={
                'verbose_name': 'Run Record',
                'verbose_name_plural': 'Run Records',
                'ordering': ['-created_at', '-id'],
            },
        ),
    ]
