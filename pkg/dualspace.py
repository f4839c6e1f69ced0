#!/usr/bin/env python3
"""
Entry point for the dualspace command line
"""
import sys
from dotenv import load_dotenv

# Load environment before importing anything else
load_dotenv(".env.local")
load_dotenv(".env")

from cli.main import main

if __name__ == "__main__":
    sys.exit(main())
