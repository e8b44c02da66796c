from memsconv.cli import main

raise SystemExit(main())
