"""Process entry point: python main.py <command> ..."""
from cli.main import main

if __name__ == "__main__":
    main()
