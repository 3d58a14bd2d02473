from django.urls import path
from .views import (
    CheckDerivationView,
    ConvertView,
    DecideView,
    ViewDerivationView,
)

urlpatterns = [
    path('check', CheckDerivationView.as_view(), name='check-derivation'),
    path('derivations/<int:derivation_id>', ViewDerivationView.as_view(), name='view-derivation'),
    path('decide', DecideView.as_view(), name='decide'),
    path('cl/convert', ConvertView.as_view(), name='cl-convert'),
]
