import os
from celery import Celery

os.environ.setdefault('DJANGO_SETTINGS_MODULE', 'cwf_checker.settings')

app = Celery('cwf_checker')
app.config_from_object('django.conf:settings', namespace='CELERY')
app.autodiscover_tasks()
