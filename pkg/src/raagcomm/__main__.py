from raagcomm.cli import main
import sys
sys.exit(main())
