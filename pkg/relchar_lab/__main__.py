from .verifier.main import main

raise SystemExit(main())
