"""
rigsolve - command-line entry point
"""

from dotenv import load_dotenv

# Load environment variables before Settings are read
load_dotenv()

from rigsolve.commands import main  # noqa: E402

if __name__ == "__main__":
    raise SystemExit(main())
