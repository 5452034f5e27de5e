"""
URL configuration for inversion_project project.

Everything is served by the hyperpower app under /api/.
"""
from django.urls import path, include

urlpatterns = [
    path('', include('hyperpower.urls')),
]
