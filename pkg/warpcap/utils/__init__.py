from .env import default_threads, default_output_dir
from .records import record
