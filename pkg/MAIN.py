import sys

from cli.triangle_lab import main


if __name__ == "__main__":
    try:
        sys.exit(main())
    except Exception as exc:
        print(f"❌ {exc}", file=sys.stderr)
        sys.exit(1)
