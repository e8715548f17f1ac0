from hypothesis import HealthCheck, settings

settings.register_profile(
    "suite",
    deadline=None,  # first calls hit JIT compilation
    max_examples=40,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("suite")
