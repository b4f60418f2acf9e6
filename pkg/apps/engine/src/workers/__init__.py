from .runner import run_rows
