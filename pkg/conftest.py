# Keeps the repository root importable so `config` and `twalock` resolve under pytest.
