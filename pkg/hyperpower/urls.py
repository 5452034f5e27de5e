from django.urls import path
from . import views

urlpatterns = [
    path('api/solve/', views.SolveAPIView.as_view(), name='api-solve'),
    path('api/compare/', views.CompareAPIView.as_view(), name='api-compare'),
    path('api/generate/', views.GenerateAPIView.as_view(), name='api-generate'),
]
