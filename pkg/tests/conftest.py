import os
import sys

# allow running pytest from a fresh checkout without the editable install
sys.path.insert(0, os.path.join(os.path.dirname(__file__), os.pardir, "src"))
