import sys

from .experiment_harness import main

sys.exit(main())
