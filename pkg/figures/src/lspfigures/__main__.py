from lspfigures.cli import main

raise SystemExit(main())
