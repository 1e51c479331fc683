import sys
from .cli import main

sys.exit(main())

# EOF - vim: ts=4 sw=4 noet
