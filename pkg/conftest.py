import os
import sys

# tests import the engine as `src.<module>`, like the entry scripts do
sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))
